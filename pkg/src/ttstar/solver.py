"""Numerical solver for the two-ray Riemann-Hilbert problem.

The contour is the full line s = e^{i delta/2} xi (xi < 0 is the minus
ray, xi > 0 the plus ray) truncated where the jump deviation falls
below tolerance.  With the upper sector on the left of increasing xi,
the boundary values of Y(mu) = I + (2 pi i)^-1 int W(s)/(s - mu) ds are

    Y_+ = I + PV[W] + W/2,      Y_- = I + PV[W] - W/2,

and the multiplicative jump Y_+ = Y_- J (J = G_- for xi < 0, G_+^{-1}
for xi > 0) becomes a linear system for X = Y_- - I at the collocation
nodes, with W = (I + X)(J - I).
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CertificationMissing,
    GridTooCoarse,
    NearContour,
    SingularMetric,
    SolveFailure,
)
from .geometry import choose_delta
from .jumps import VERDICT_REFUTED, JumpData, pair_decay, positivity_certificate

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class ContourDiscretization:
    delta: float
    r_min: float
    r_max: float
    xi: np.ndarray = field(repr=False)       # nodes, increasing
    w: np.ndarray = field(repr=False)        # Gauss-Legendre weights
    panels: tuple = ()                        # (start, stop) index ranges
    panel_order: int = 16

    @property
    def node_count(self):
        return len(self.xi)

    @property
    def nodes(self):
        """Complex collocation points on the contour."""
        return np.exp(0.5j * self.delta) * self.xi

    def segment(self, k):
        """0 for the minus ray (xi < 0), 1 for the plus ray."""
        return int(self.xi[k] > 0)


def _truncation_radius(s, x, rates, tol):
    """Largest |xi| at which any jump entry modulus envelope
    |S_jl| exp(-x g_jl (1/r + r)) still exceeds tol."""
    n = s.shape[0]
    r_max = 0.0
    for (j, l), g in rates.items():
        val = abs(s[j - 1, l - 1])
        if val <= tol:
            continue
        c = math.log(val / tol) / (x * g)
        if c <= 2.0:
            continue
        r_max = max(r_max, 0.5 * (c + math.sqrt(c * c - 4.0)))
    return r_max


def discretize(jd, tol=1e-13, panels_per_decade=8, panel_order=16,
               certificate=None, force=False):
    """Truncated, panelled contour for the given jump data.

    Panels are log-spaced in |xi| on each ray; each carries a
    Gauss-Legendre rule of the given order.  Refuses refuted jump data
    unless forced.
    """
    if (certificate is not None and certificate.verdict == VERDICT_REFUTED
            and not force):
        raise CertificationMissing(
            "jump data positivity was refuted; pass force=True to override"
        )
    rates = pair_decay(jd.spectrum, jd.delta)
    r_max = _truncation_radius(jd.s, jd.x, rates, tol)
    if r_max == 0.0:
        # every entry stays below tol: the solution is I to tolerance
        return ContourDiscretization(
            jd.delta, 1.0, 1.0, np.empty(0), np.empty(0), (), panel_order
        )
    r_min = 1.0 / r_max
    decades = math.log10(r_max / r_min)
    n_panels = max(2, math.ceil(panels_per_decade * decades))
    edges = np.logspace(math.log10(r_min), math.log10(r_max), n_panels + 1)
    gl_x, gl_w = np.polynomial.legendre.leggauss(panel_order)
    xi_parts, w_parts, panels = [], [], []
    pos = 0
    # minus ray: increasing xi from -r_max to -r_min
    for a, b in zip(edges[::-1], edges[-2::-1]):
        lo, hi = -a, -b
        half = 0.5 * (hi - lo)
        xi_parts.append(0.5 * (lo + hi) + half * gl_x)
        w_parts.append(half * gl_w)
        panels.append((pos, pos + panel_order))
        pos += panel_order
    # plus ray: increasing xi from r_min to r_max
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xi_parts.append(0.5 * (lo + hi) + half * gl_x)
        w_parts.append(half * gl_w)
        panels.append((pos, pos + panel_order))
        pos += panel_order
    return ContourDiscretization(
        jd.delta, r_min, r_max,
        np.concatenate(xi_parts), np.concatenate(w_parts),
        tuple(panels), panel_order,
    )


def _lagrange_diff(nodes):
    """Differentiation matrix of the Lagrange basis on the given nodes."""
    p = len(nodes)
    d = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            if i == j:
                d[i, j] = sum(
                    1.0 / (nodes[i] - nodes[k]) for k in range(p) if k != i
                )
            else:
                num = 1.0
                for k in range(p):
                    if k != i and k != j:
                        num *= (nodes[i] - nodes[k]) / (nodes[j] - nodes[k])
                d[i, j] = num / (nodes[j] - nodes[i])
    return d


def _pv_weights(disc):
    """Dense matrix a with PV[f](xi_k) ~ sum_j a_kj f(xi_j) for the
    Cauchy principal value (2 pi i)^-1 int f(xi)/(xi - xi_k) d xi over
    the truncated two-segment line.

    Same-segment singularities are handled by subtracting f(xi_k): the
    smooth quotient is integrated by the panel rules, the diagonal
    limit f'(xi_k) by Lagrange differentiation on the node's panel, and
    the log endpoint factor analytically.
    """
    xi, w = disc.xi, disc.w
    n = len(xi)
    seg = (xi > 0).astype(int)
    diff = xi[None, :] - xi[:, None]
    np.fill_diagonal(diff, 1.0)
    a = w[None, :] / diff
    np.fill_diagonal(a, 0.0)
    same = seg[None, :] == seg[:, None]
    np.fill_diagonal(same, False)
    # subtraction of f(xi_k) over the containing segment
    corr = -np.sum(np.where(same, a, 0.0), axis=1)
    for k in range(n):
        if seg[k] == 0:
            lo, hi = -disc.r_max, -disc.r_min
        else:
            lo, hi = disc.r_min, disc.r_max
        corr[k] += math.log((hi - xi[k]) / (xi[k] - lo))
    a = a.astype(complex)
    a[np.arange(n), np.arange(n)] += corr
    # diagonal limit of the subtracted quotient: w_k f'(xi_k)
    for start, stop in disc.panels:
        d = _lagrange_diff(xi[start:stop])
        for loc, k in enumerate(range(start, stop)):
            a[k, start:stop] += w[k] * d[loc]
    return a / TWO_PI_I


def _cauchy_weights_at(disc, t):
    """Row of boundary-value weights at an off-node contour point t,
    plus the coefficient of f(t) itself (subtraction + log term)."""
    xi, w = disc.xi, disc.w
    seg_t = int(t > 0)
    if seg_t == 0:
        lo, hi = -disc.r_max, -disc.r_min
    else:
        lo, hi = disc.r_min, disc.r_max
    row = w / (xi - t)
    same = ((xi > 0).astype(int) == seg_t)
    self_coeff = -np.sum(row[same]) + math.log((hi - t) / (t - lo))
    return row / TWO_PI_I, self_coeff / TWO_PI_I


def _lagrange_basis_at(nodes, t):
    p = len(nodes)
    vals = np.empty(p)
    for j in range(p):
        num = 1.0
        for k in range(p):
            if k != j:
                num *= (t - nodes[k]) / (nodes[j] - nodes[k])
        vals[j] = num
    return vals


@dataclass
class RHSolution:
    jd: JumpData
    disc: ContourDiscretization
    w_density: np.ndarray = field(repr=False)   # W at nodes, (N, n, n)
    jumps: np.ndarray = field(repr=False)        # J at nodes
    g: np.ndarray = None                         # Y(0)
    y_prime0: np.ndarray = None
    moments: np.ndarray = None                   # Y_1..Y_K, (K, n, n)
    residuals: dict = None
    method: str = "direct"

    def eval_y(self, mu, guard=None):
        """Cauchy-integral evaluation of Y at mu off the contour."""
        disc, n = self.disc, self.jd.n
        if disc.node_count == 0:
            return np.eye(n, dtype=complex)
        mu = complex(mu)
        z = cmath.exp(-0.5j * disc.delta) * mu
        if guard is None:
            guard = 2.0 * float(np.min(np.abs(np.diff(disc.xi))))
        on_band = abs(z.imag) < guard
        in_range = (disc.r_min - guard < abs(z.real) < disc.r_max + guard)
        if on_band and in_range:
            raise NearContour(
                f"mu={mu} within the contour guard band; use boundary values"
            )
        kern = disc.w / (disc.xi - z)
        return np.eye(n) + np.tensordot(kern, self.w_density, axes=1) / TWO_PI_I


def _assemble_moments(disc, w_density, count=6):
    """Y(mu) ~ I + Y_1/mu + Y_2/mu^2 + ...; Y_k = -(2 pi i)^-1
    int W(s) s^{k-1} ds on s = e^{i delta/2} xi."""
    phase = cmath.exp(0.5j * disc.delta)
    out = []
    for k in range(1, count + 1):
        kern = disc.w * disc.xi ** (k - 1) * phase ** k
        out.append(-np.tensordot(kern, w_density, axes=1) / TWO_PI_I)
    return np.array(out)


def solve_rh(jd, disc, method="auto", tol_jump=1e-10, max_iter=400):
    """Solve the collocated singular integral equation and report
    residuals at validation points interleaved between the nodes."""
    n = jd.n
    eye = np.eye(n, dtype=complex)
    if disc.node_count == 0:
        sol = RHSolution(jd, disc, np.empty((0, n, n), complex),
                         np.empty((0, n, n), complex), method="trivial")
        sol.g = np.eye(n, dtype=complex)
        sol.y_prime0 = np.zeros((n, n), complex)
        sol.moments = np.zeros((6, n, n), complex)
        sol.residuals = {"jump": 0.0, "normalization": 0.0, "sup_dev": 0.0}
        return sol
    nodes = disc.nodes
    big_j = np.array([jd.jump(s) for s in nodes])
    dev = big_j - eye
    sup_dev = float(np.max(np.sum(np.abs(dev), axis=2)))
    a = _pv_weights(disc)
    if method == "auto":
        method = "neumann" if sup_dev < 0.5 else "direct"
    nn = disc.node_count
    if method == "direct":
        # right-multiplications transpose to a block system C X^T = R^T
        c = np.zeros((nn, n, nn, n), dtype=complex)
        dev_t = np.transpose(dev, (0, 2, 1))
        for k in range(nn):
            c[k] = np.transpose(-a[k][:, None, None] * dev_t, (1, 0, 2))
            c[k, :, k, :] += (eye + 0.5 * dev[k]).T
        c = c.reshape(nn * n, nn * n)
        rhs = np.tensordot(a, dev, axes=1) - 0.5 * dev      # (N, n, n)
        rhs_t = np.transpose(rhs, (0, 2, 1)).reshape(nn * n, n)
        try:
            xt = np.linalg.solve(c, rhs_t)
        except np.linalg.LinAlgError as exc:
            raise SolveFailure(f"collocation system singular: {exc}") from exc
        x = np.transpose(xt.reshape(nn, n, n), (0, 2, 1))
        w_density = np.einsum("kij,kjl->kil", np.eye(n) + x, dev)
    else:
        w_density = dev.copy()
        prev_norm = math.inf
        for it in range(max_iter):
            y_minus = eye + np.tensordot(a, w_density, axes=1) \
                - 0.5 * w_density
            new_w = np.einsum("kij,kjl->kil", y_minus, dev)
            change = float(np.max(np.abs(new_w - w_density)))
            w_density = new_w
            if change < 1e-15:
                break
            if change > 10.0 * prev_norm and it > 5:
                raise SolveFailure(
                    f"Neumann iteration diverging (change {change:g})"
                )
            prev_norm = max(change, 1e-300)
        else:
            raise SolveFailure("Neumann iteration did not converge")
        x = np.tensordot(a, w_density, axes=1) - 0.5 * w_density
    sol = RHSolution(jd, disc, w_density, big_j, method=method)
    # extraction at 0 and the expansion moments at infinity
    kern0 = disc.w / disc.xi
    sol.g = np.eye(n) + np.tensordot(kern0, w_density, axes=1) / TWO_PI_I
    kern1 = disc.w / disc.xi ** 2 * cmath.exp(-0.5j * disc.delta)
    sol.y_prime0 = np.tensordot(kern1, w_density, axes=1) / TWO_PI_I
    sol.moments = _assemble_moments(disc, w_density)
    sol.residuals = {
        "jump": _jump_residual(sol),
        "normalization": float(np.max(np.abs(sol.moments[0]))) / 1e8,
        "sup_dev": sup_dev,
    }
    return sol


def _jump_residual(sol):
    """Sup of |Y_+ - Y_- J| at validation points placed between
    adjacent collocation nodes (densities Lagrange-interpolated)."""
    disc, jd = sol.disc, sol.jd
    n = jd.n
    worst = 0.0
    phase = cmath.exp(0.5j * disc.delta)
    for start, stop in disc.panels:
        xs = disc.xi[start:stop]
        mids = 0.5 * (xs[:-1] + xs[1:])
        # validate at three interior midpoints per panel
        take = [0, len(mids) // 2, len(mids) - 1]
        for idx in take:
            t = mids[idx]
            basis = _lagrange_basis_at(xs, t)
            w_t = np.tensordot(basis, sol.w_density[start:stop], axes=1)
            row, self_c = _cauchy_weights_at(disc, t)
            # subtraction: sum_j row_j (W_j - W_t) over the containing
            # segment (already folded into self_c) plus the log term
            y_minus = np.eye(n) + np.tensordot(row, sol.w_density, axes=1) \
                + self_c * w_t - 0.5 * w_t
            y_plus = y_minus + w_t
            j_t = jd.jump(phase * t)
            worst = max(worst, float(np.max(np.abs(y_plus - y_minus @ j_t))))
    return worst


def symmetry_residuals(sol, radii=None):
    """Sup over off-contour test points of |Y(-mu)^{-t} - Y(mu)| and
    |conj(Y(0))^{-1} conj(Y(1/conj(mu))) - Y(mu)|."""
    n = sol.jd.n
    if sol.disc.node_count == 0:
        return {"inversion": 0.0, "reality": 0.0}
    delta = sol.disc.delta
    if radii is None:
        radii = np.logspace(-0.5, 0.5, 7)
    args = (delta / 2 + math.pi / 2, delta / 2 - math.pi / 2)
    res_inv = res_real = 0.0
    g_conj_inv = np.linalg.inv(np.conj(sol.g))
    for r in radii:
        for ang in args:
            mu = r * cmath.exp(1j * ang)
            y = sol.eval_y(mu)
            y_neg = sol.eval_y(-mu)
            lhs = np.linalg.inv(y_neg).T
            res_inv = max(res_inv, float(np.max(np.abs(lhs - y))))
            y_ref = sol.eval_y(1.0 / np.conj(mu))
            lhs2 = g_conj_inv @ np.conj(y_ref)
            res_real = max(res_real, float(np.max(np.abs(lhs2 - y))))
    return {"inversion": res_inv, "reality": res_real}


@dataclass
class MetricCurve:
    """G(x) = Y(0) samples along a log-spaced x grid, with the spectral
    x-derivative G_x = 2 G [A, psi_1^(0)] extracted per solve."""

    spectrum: object
    s: np.ndarray = field(repr=False)
    delta: float = 0.0
    x: np.ndarray = None
    g: np.ndarray = field(default=None, repr=False)
    gx: np.ndarray = field(default=None, repr=False)
    moments: np.ndarray = field(default=None, repr=False)
    reports: tuple = ()
    solutions: tuple = field(default=(), repr=False)

    def gx_fd(self):
        """Second-order central differences in log x (one-sided at the
        ends); the independent cross-check on the spectral gx."""
        if len(self.x) < 3:
            raise GridTooCoarse("need at least 3 points for differences")
        el = np.log(self.x)
        dg = np.gradient(self.g, el, axis=0)
        return dg / self.x[:, None, None]

    def checks(self):
        """Per-x Hermitianity, orthogonality G conj(G) = I, unit
        determinant, and Cholesky positivity."""
        out = []
        for k in range(len(self.x)):
            g = self.g[k]
            herm = float(np.max(np.abs(g - np.conj(g).T)))
            orth = float(np.max(np.abs(g @ np.conj(g) - np.eye(len(g)))))
            det = abs(np.linalg.det(g) - 1.0)
            try:
                np.linalg.cholesky(0.5 * (g + np.conj(g).T))
                chol = True
            except np.linalg.LinAlgError:
                chol = False
            out.append({"x": float(self.x[k]), "hermitian": herm,
                        "orthogonality": orth, "det": det, "cholesky": chol})
        return out


def solve_at(spec, s, x, delta=None, tol_trunc=1e-13, panels_per_decade=8,
             panel_order=16, certificate=None):
    """One certified solve; returns the RHSolution."""
    if delta is None:
        delta = choose_delta(spec)
    jd = JumpData(spec, s, float(x), delta)
    disc = discretize(jd, tol=tol_trunc, panels_per_decade=panels_per_decade,
                      panel_order=panel_order, certificate=certificate)
    return solve_rh(jd, disc)


def psi1_zero(sol):
    """psi_1^(0) = G^-1 Y'(0) + x conj(A) from the expansion of
    Psi = G^-1 Y e^{mu^-1 x A + mu x conj(A)} at mu = 0."""
    spec, x = sol.jd.spectrum, sol.jd.x
    a_bar = np.diag(np.conj(np.array(spec.u)))
    try:
        g_inv = np.linalg.inv(sol.g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(str(exc)) from exc
    return g_inv @ sol.y_prime0 + x * a_bar


def spectral_gx(sol):
    """G_x = 2 G [A, psi_1^(0)] (radial equation route, no grid)."""
    a = np.diag(np.array(sol.jd.spectrum.u))
    p = psi1_zero(sol)
    return 2.0 * sol.g @ (a @ p - p @ a)


def metric_curve(spec, s, x_grid, delta=None, certificate="auto",
                 tol_trunc=1e-13, panels_per_decade=8, panel_order=16,
                 with_symmetry=True):
    """Solve the family of RH problems over the x grid."""
    if delta is None:
        delta = choose_delta(spec)
    cert = certificate
    if certificate == "auto":
        cert = positivity_certificate(spec, s, delta=delta)
    if cert is not None and cert.verdict == VERDICT_REFUTED:
        raise CertificationMissing("refusing to solve refuted jump data")
    x_grid = np.asarray(x_grid, dtype=float)
    gs, gxs, moments, reports, sols = [], [], [], [], []
    for x in x_grid:
        sol = solve_at(spec, s, x, delta=delta, tol_trunc=tol_trunc,
                       panels_per_decade=panels_per_decade,
                       panel_order=panel_order, certificate=cert)
        rep = dict(sol.residuals)
        rep["x"] = float(x)
        rep["method"] = sol.method
        if with_symmetry:
            rep.update(symmetry_residuals(sol))
        gs.append(sol.g)
        gxs.append(spectral_gx(sol))
        moments.append(sol.moments)
        reports.append(rep)
        sols.append(sol)
    return MetricCurve(
        spectrum=spec, s=np.asarray(s, dtype=complex), delta=delta,
        x=x_grid, g=np.array(gs), gx=np.array(gxs),
        moments=np.array(moments), reports=tuple(reports),
        solutions=tuple(sols),
    )


def tt_residual(curve, order=2):
    """Sup-norm residual of (x G^-1 G_x)_x = 4x [A, G^-1 conj(A) G] on
    the interior of the log-spaced grid; F = x G^-1 G_x uses the
    spectral G_x, its log-x derivative uses central differences."""
    x = curve.x
    m = len(x)
    need = 5 if order == 2 else 7
    if m < need:
        raise GridTooCoarse(f"need at least {need} grid points")
    el = np.log(x)
    h = el[1] - el[0]
    if np.max(np.abs(np.diff(el) - h)) > 1e-9 * abs(h):
        raise GridTooCoarse("grid must be uniform in log x")
    a = np.diag(np.array(curve.spectrum.u))
    a_bar = np.conj(a)
    g_inv = np.linalg.inv(curve.g)
    f = x[:, None, None] * np.einsum("kij,kjl->kil", g_inv, curve.gx)
    worst = 0.0
    lo = 1 if order == 2 else 2
    for k in range(lo, m - lo):
        if order == 2:
            df = (f[k + 1] - f[k - 1]) / (2 * h)
        else:
            df = (-f[k + 2] + 8 * f[k + 1] - 8 * f[k - 1] + f[k - 2]) / (12 * h)
        m_k = g_inv[k] @ a_bar @ curve.g[k]
        rhs = 4.0 * x[k] * (a @ m_k - m_k @ a)
        worst = max(worst, float(np.max(np.abs(df / x[k] - rhs))))
    return worst
