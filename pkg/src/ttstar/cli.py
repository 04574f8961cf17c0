"""Command-line entry point: geometry, braid orbits, ADE detection,
certification, RH solving, and closed-loop verification, with
machine-readable JSON/CSV artifacts.

Exit codes: 0 success, 1 bad input, 2 solve failure, 3 certification
refused, 4 verification failed.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import numpy as np
import scipy

from . import __version__, braid, cartan, exact, geometry, isomon, jumps, solver
from .errors import (
    CertificationMissing,
    SolveFailure,
    StiffnessFailure,
    StructureViolation,
    TTStarError,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_SOLVE_FAILURE = 2
EXIT_CERT_REFUSED = 3
EXIT_VERIFY_FAILED = 4


# ---------------------------------------------------------------- I/O

def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def load_spectrum(path):
    """Spectrum JSON: {"u": [[re, im], ...]}."""
    with open(path) as fh:
        data = json.load(fh)
    u = [complex(re, im) for re, im in data["u"]]
    return geometry.Spectrum(tuple(u))


def load_matrix(path):
    """Matrix JSON: row-major nested array; entries are numbers or
    rational strings like "-1" or "3/2"."""
    with open(path) as fh:
        rows = json.load(fh)
    return exact.as_matrix(rows)


def matrix_to_json(m):
    return [[str(x) if x.denominator != 1 else int(x) for x in row]
            for row in m]


def word_to_json(word):
    out = []
    for kind, arg in word:
        if kind == "move":
            out.append({"move": int(arg)})
        else:
            out.append({"sign": [int(e) for e in arg]})
    return out


def word_from_json(items):
    word = []
    for item in items:
        if "move" in item:
            word.append(("move", int(item["move"])))
        elif "sign" in item:
            word.append(("sign", tuple(int(e) for e in item["sign"])))
        else:
            raise ValueError(f"unknown braid generator {item!r}")
    return tuple(word)


def provenance(args, inputs):
    tols = {}
    for key in ("tol_angle", "tol_jump", "tol_iso"):
        if hasattr(args, key):
            tols[key.replace("_", "-")] = getattr(args, key)
    return {
        "tool": "ttstar",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "inputs": {name: _sha256(path) for name, path in inputs.items()},
        "tolerances": tols,
        "seed": getattr(args, "seed", None),
    }


def emit_json(args, payload, path=None):
    text = json.dumps(payload, indent=args.json_indent, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


RESIDUAL_COLUMNS = ("jump", "normalization", "sup_dev", "inversion", "reality")


def write_curve_csv(path, curve, prov):
    n = curve.spectrum.n
    lines = ["# ttstar curve v1"]
    for name, digest in sorted(prov["inputs"].items()):
        lines.append(f"# {name}_sha256={digest}")
    lines.append(f"# version={prov['version']}")
    lines.append(f"# delta={curve.delta!r}")
    header = ["x"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            header += [f"ReG_{i}_{j}", f"ImG_{i}_{j}"]
    header += [f"res_{c}" for c in RESIDUAL_COLUMNS]
    lines.append(",".join(header))
    for k in range(len(curve.x)):
        row = [repr(float(curve.x[k]))]
        for i in range(n):
            for j in range(n):
                row += [repr(float(curve.g[k, i, j].real)),
                        repr(float(curve.g[k, i, j].imag))]
        rep = curve.reports[k]
        row += [repr(float(rep.get(c, 0.0))) for c in RESIDUAL_COLUMNS]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve_csv(path):
    """Returns (x array, G array (m, n, n), delta or None)."""
    delta = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line[1:].strip().startswith("delta="):
                    delta = float(line.split("=", 1)[1])
                continue
            if line.startswith("x,"):
                continue
            rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise ValueError(f"no data rows in {path}")
    data = np.array(rows)
    n = int(round(np.sqrt((data.shape[1] - 1 - len(RESIDUAL_COLUMNS)) / 2)))
    x = data[:, 0]
    flat = data[:, 1:1 + 2 * n * n]
    g = (flat[:, 0::2] + 1j * flat[:, 1::2]).reshape(len(x), n, n)
    return x, g, delta


# ---------------------------------------------------------- commands

def cmd_rays(args):
    spec = load_spectrum(args.spectrum)
    arr = geometry.stokes_rays(spec, strict_pd=args.strict_pd,
                               tol_angle=args.tol_angle)
    payload = {
        "provenance": provenance(args, {"spectrum": args.spectrum}),
        "rays": [{"angle": r.angle, "pair": list(r.pair)} for r in arr.rays],
        "separating": [{"theta": t, "pair": list(r.pair)}
                       for t, r in zip(arr.thetas, arr.separating)],
        "m": arr.m,
        "pd": geometry.check_pd(spec, tol_angle=args.tol_angle),
        "delta": geometry.choose_delta(spec),
    }
    emit_json(args, payload, args.out)
    return EXIT_OK


def cmd_orbit(args):
    s = load_matrix(args.matrix)
    target = load_matrix(args.target)
    word = braid.orbit_search(s, target, bound=args.bound)
    payload = {
        "provenance": provenance(
            args, {"matrix": args.matrix, "target": args.target}),
        "found": word is not None,
        "word": word_to_json(word) if word is not None else None,
    }
    emit_json(args, payload, args.out)
    return EXIT_OK


def cmd_detect_ade(args):
    s = load_matrix(args.matrix)
    hit = cartan.detect_ade(s, orbit_bound=args.bound,
                            up_to_permutation=args.up_to_permutation)
    payload = {
        "provenance": provenance(args, {"matrix": args.matrix}),
        "type": f"{hit[0][0]}{hit[0][1]}" if hit else None,
        "witness_word": word_to_json(hit[1]) if hit else None,
    }
    emit_json(args, payload, args.out)
    return EXIT_OK


def cmd_charges(args):
    s = load_matrix(args.matrix)
    vals = braid.charges(s)
    poly = braid.charge_polynomial(s)
    payload = {
        "provenance": provenance(args, {"matrix": args.matrix}),
        "charges": [[z.real, z.imag] for z in vals],
        "charpoly": [str(c) for c in poly],
    }
    emit_json(args, payload, args.out)
    return EXIT_OK


def cmd_certify(args):
    spec = load_spectrum(args.spectrum)
    s = load_matrix(args.matrix)
    report = jumps.positivity_certificate(
        spec, s, analytic_only=args.analytic_only)
    payload = {
        "provenance": provenance(
            args, {"spectrum": args.spectrum, "matrix": args.matrix}),
        "verdict": report.verdict,
        "certified": report.certified,
        "route": report.route,
        "worst_min_eigenvalue": report.worst_min_eigenvalue,
        "delta": report.delta,
        "samples": report.samples,
    }
    emit_json(args, payload, args.out)
    return EXIT_OK if report.certified else EXIT_CERT_REFUSED


def cmd_minimize_f(args):
    result = jumps.f_minimize(args.family, grid_step=args.step,
                              seed=args.seed)
    result["provenance"] = provenance(args, {})
    emit_json(args, result, args.out)
    return EXIT_OK


def _x_grid(args):
    if args.x_count < 1:
        raise ValueError("x-count must be positive")
    return np.logspace(np.log10(args.x_min), np.log10(args.x_max),
                       args.x_count)


def _solve_curve(args, spec, s):
    curve = solver.metric_curve(spec, s, _x_grid(args),
                                tol_trunc=args.tol_trunc)
    checks = curve.checks()
    worst_jump = max(rep["jump"] for rep in curve.reports)
    ok = (worst_jump < args.tol_jump
          and all(c["hermitian"] < 1e-8 and c["orthogonality"] < 1e-8
                  and c["det"] < 1e-8 and c["cholesky"] for c in checks))
    return curve, checks, worst_jump, ok


def cmd_solve(args):
    spec = load_spectrum(args.spectrum)
    s = load_matrix(args.matrix)
    curve, checks, worst_jump, ok = _solve_curve(args, spec, s)
    prov = provenance(args, {"spectrum": args.spectrum,
                             "matrix": args.matrix})
    write_curve_csv(args.out, curve, prov)
    payload = {
        "provenance": prov,
        "delta": curve.delta,
        "x": [float(v) for v in curve.x],
        "worst_jump_residual": worst_jump,
        "checks": checks,
        "residuals": [
            {k: (v if isinstance(v, str) else float(v))
             for k, v in rep.items()} for rep in curve.reports
        ],
        "pass": ok,
    }
    emit_json(args, payload, args.report)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _verify_curve(args, spec, s, x, g, delta):
    """Re-solve at two x values for exact anchors; the metric fed to the
    ODE comes from the supplied curve, so corrupted curves fail."""
    if delta is None:
        delta = geometry.choose_delta(spec)
    picks = sorted({int(np.argmin(np.abs(x - t))) for t in (0.8, 1.6)})
    if len(picks) < 2:
        if len(x) < 2:
            raise ValueError("verification needs at least two x values")
        picks = [0, len(x) - 1]
    sols, gxs, moms = [], [], []
    for idx in picks:
        sol = solver.solve_at(spec, s, float(x[idx]), delta=delta,
                              tol_trunc=args.tol_trunc)
        sols.append(sol)
        gxs.append(solver.spectral_gx(sol))
        moms.append(sol.moments)
    mini = solver.MetricCurve(
        spectrum=spec, s=exact.to_numpy(s, dtype=complex), delta=delta,
        x=np.array([float(x[i]) for i in picks]),
        g=np.array([g[i] for i in picks]), gx=np.array(gxs),
        moments=np.array(moms), solutions=tuple(sols),
    )
    report = isomon.verify_isomonodromy(mini, x_indices=[0, 1],
                                        tol_iso=args.tol_iso)
    curve_mismatch = max(
        float(np.max(np.abs(g[i] - sols[k].g))) for k, i in enumerate(picks)
    )
    report["curve_mismatch"] = curve_mismatch
    report["pass"] = report["pass"] and curve_mismatch < 1e-6
    del report["reports"]
    return report


def cmd_verify(args):
    spec = load_spectrum(args.spectrum)
    s = load_matrix(args.matrix)
    x, g, delta = read_curve_csv(args.curve)
    try:
        report = _verify_curve(args, spec, s, x, g, delta)
    except StructureViolation as exc:
        report = {"pass": False, "error": str(exc)}
    payload = {"provenance": provenance(
        args, {"spectrum": args.spectrum, "matrix": args.matrix,
               "curve": args.curve})}
    payload.update(report)
    emit_json(args, payload, args.out)
    return EXIT_OK if report["pass"] else EXIT_VERIFY_FAILED


def cmd_pipeline(args):
    spec = load_spectrum(args.spectrum)
    s = load_matrix(args.matrix)
    prov = provenance(args, {"spectrum": args.spectrum,
                             "matrix": args.matrix})
    cert = jumps.positivity_certificate(spec, s)
    payload = {"provenance": prov,
               "certificate": {"verdict": cert.verdict, "route": cert.route}}
    if cert.verdict == jumps.VERDICT_REFUTED:
        payload["pass"] = False
        emit_json(args, payload, args.report)
        return EXIT_CERT_REFUSED
    curve, checks, worst_jump, solve_ok = _solve_curve(args, spec, s)
    write_curve_csv(args.out, curve, prov)
    payload["solve"] = {"worst_jump_residual": worst_jump, "checks": checks,
                        "pass": solve_ok}
    try:
        verify = _verify_curve(args, spec, s, curve.x, curve.g, curve.delta)
    except StructureViolation as exc:
        verify = {"pass": False, "error": str(exc)}
    payload["verify"] = verify
    payload["pass"] = solve_ok and verify["pass"]
    emit_json(args, payload, args.report)
    if not solve_ok or not verify["pass"]:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-angle", type=float, default=geometry.TOL_ANGLE)
    common.add_argument("--tol-jump", type=float, default=1e-10)
    common.add_argument("--tol-iso", type=float, default=1e-4)
    common.add_argument("--tol-trunc", type=float, default=1e-13)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json-indent", type=int, default=2)

    parser = argparse.ArgumentParser(
        prog="ttstar",
        description="Stokes geometry, braid orbits, ADE detection, and the "
                    "Riemann-Hilbert metric pipeline.")
    parser.add_argument("--version", action="version",
                        version=f"ttstar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rays", parents=[common],
                       help="Stokes-ray arrangement of a spectrum")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--strict-pd", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rays)

    p = sub.add_parser("orbit", parents=[common],
                       help="braid word search between two Stokes matrices")
    p.add_argument("--matrix", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("detect-ade", parents=[common],
                       help="bounded orbit search for an ADE representative")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--up-to-permutation", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect_ade)

    p = sub.add_parser("charges", parents=[common],
                       help="eigenvalues of S(S^-1)^t")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_charges)

    p = sub.add_parser("certify", parents=[common],
                       help="positivity certificate for the jump data")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--analytic-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("minimize-f", parents=[common],
                       help="minimum of the exceptional edge determinant")
    p.add_argument("--family", required=True, choices=["E6", "E7", "E8"])
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_minimize_f)

    solve_common = argparse.ArgumentParser(add_help=False)
    solve_common.add_argument("--spectrum", required=True)
    solve_common.add_argument("--matrix", required=True)
    solve_common.add_argument("--x-min", type=float, default=0.5)
    solve_common.add_argument("--x-max", type=float, default=5.0)
    solve_common.add_argument("--x-count", type=int, default=41)
    solve_common.add_argument("--out", required=True,
                              help="output CSV path for the metric curve")
    solve_common.add_argument("--report", help="optional JSON report path")

    p = sub.add_parser("solve", parents=[common, solve_common],
                       help="solve the RH family over an x grid")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common],
                       help="closed-loop Stokes recovery from a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pipeline", parents=[common, solve_common],
                       help="certify, solve, and verify in one run")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CertificationMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERT_REFUSED
    except (SolveFailure, StiffnessFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVE_FAILURE
    except (TTStarError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
