"""Command-line interface: ``liouspace <command> [options]``.

Standard output carries only machine-readable results (one JSON object or
number per line); diagnostics go to standard error, with verbosity set by
the ``LIOUSPACE_LOG`` environment variable (error, info or debug).

Exit codes: 0 success, 1 tolerance/factorization failure or I/O error,
2 malformed input or invalid parameters.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import duality_maps as dm
from . import phase_flow as pf
from . import schrodinger_like as sl
from .exceptions import FieldFormatError, NotFactorizableError
from .fieldio import read_field, write_field
from .fields import DensityMatrixField, PhaseSpaceField, UniformGrid1D, WaveFunctionField
from .verification import SUITES, run_suite

logger = logging.getLogger("liouspace")


class UsageError(Exception):
    pass


def _configure_logging():
    level = os.environ.get("LIOUSPACE_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(name)s] %(levelname)s %(message)s"))
    root = logging.getLogger("liouspace")
    root.handlers[:] = [handler]
    root.setLevel(levels.get(level, logging.ERROR))
    root.propagate = False


def _grid(text):
    try:
        return UniformGrid1D.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _floats(count):
    def parse(text):
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        return vals

    return parse


def _load(path, kind):
    obj = read_field(path)
    if not isinstance(obj, kind):
        raise FieldFormatError(f"{path}: expected a {kind.__name__} file, got {type(obj).__name__}")
    return obj


def _emit(payload):
    print(json.dumps(payload))


def cmd_evolve(args):
    try:
        g0 = pf.GaussianPhaseState.from_entries(args.q0, args.p0, *args.cov)
    except ValueError as exc:
        raise UsageError(f"invalid covariance: {exc}")
    qmin, qmax, nq, pmin, pmax, np_ = args.grid
    try:
        qgrid = UniformGrid1D(qmin, qmax, nq)
        pgrid = UniformGrid1D(pmin, pmax, np_)
    except ValueError as exc:
        raise UsageError(f"invalid grid: {exc}")
    g = pf.evolve_gaussian(g0, args.t)
    q, p = np.meshgrid(qgrid.points, pgrid.points, indexing="ij")
    values = pf.gaussian_density(g, pf.PhasePoint(q, p))
    write_field(args.out, PhaseSpaceField(qgrid, pgrid, values, args.t))
    (s_qq, s_qp), (_, s_pp) = g.cov
    _emit(
        {"t": args.t, "mean_q": g.mean_q, "mean_p": g.mean_p,
         "cov_qq": s_qq, "cov_qp": s_qp, "cov_pp": s_pp}
    )
    return 0


def cmd_f2rho(args):
    f = _load(args.input, PhaseSpaceField)
    rho = dm.f_to_rho(f, args.xgrid, args.pquad)
    write_field(args.out, rho)
    _emit({"t": rho.time, "trace": rho.trace().real, "purity": dm.purity(rho)})
    return 0


def cmd_rho2f(args):
    rho = _load(args.input, DensityMatrixField)
    f = dm.rho_to_f(rho, args.qgrid, args.pgrid, args.uquad)
    write_field(args.out, f)
    _emit({"t": f.time, "integral": f.integral(), "min": float(f.values.min())})
    return 0


def cmd_factorize(args):
    rho = _load(args.input, DensityMatrixField)
    psi = dm.factorize_density(rho, args.tol)
    write_field(args.out, psi)
    _emit({"t": psi.time, "gauge_anchor": psi.gauge_anchor, "norm": psi.norm()})
    return 0


def cmd_propagate(args):
    psi0 = _load(args.input, WaveFunctionField)
    psi = sl.propagate_psi(psi0, args.t, args.xgrid)
    write_field(args.out, psi)
    _emit({"t": psi.time, "norm": psi.norm()})
    return 0


def cmd_phase(args):
    if args.method == "closed":
        phi = float(sl.phase_closed(args.t))
        curve = None
        if args.out:
            n = max(2, int(round(abs(args.t) / args.step)) + 1)
            ts = np.linspace(0.0, args.t, n)
            curve = sl.GaugePhase("closed_form", 0.0, (ts, sl.phase_closed(ts)))
    else:
        curve = sl.phase_integrate(args.t, args.step)
        phi = float(curve.samples[1][-1])
    if args.out and curve is not None:
        write_field(args.out, curve)
    print(format(phi, ".17g"))
    return 0


def cmd_greens(args):
    g = complex(sl.greens(args.x, args.xp, args.t, args.prefactor_phase))
    _emit({"re": g.real, "im": g.imag, "abs": abs(g), "arg": float(np.angle(g))})
    return 0


def cmd_verify(args):
    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error("failed checks: %s", ", ".join(failed))
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liouspace",
        description="Classical particle in a linear potential: phase-space and wave-function pictures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="sample an evolved Gaussian phase-space density")
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--cov", type=_floats(3), default=[0.5, 0.0, 0.5], metavar="SQQ,SQP,SPP")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--grid", type=_floats(6), default=[-6.0, 6.0, 257, -8.0, 8.0, 257],
                   metavar="QMIN,QMAX,NQ,PMIN,PMAX,NP")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("f2rho", help="phase-space field -> density matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--xgrid", type=_grid, default=dm.DEFAULT_XGRID)
    p.add_argument("--pquad", type=_grid, default=None,
                   help="momentum quadrature grid (default: the field's momentum grid)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_f2rho)

    p = sub.add_parser("rho2f", help="density matrix -> phase-space field")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--qgrid", type=_grid, default=None, help="default: the matrix grid")
    p.add_argument("--pgrid", type=_grid, default=dm.DEFAULT_PGRID)
    p.add_argument("--uquad", type=_grid, default=None,
                   help="relative-coordinate grid (default: aligned with the matrix grid)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rho2f)

    p = sub.add_parser("factorize", help="rank-one density matrix -> wave function")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("propagate", help="evolve a wave function with the Green function")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--xgrid", type=_grid, default=None, help="output grid (default: input grid)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("phase", help="gauge phase phi(t) with phi(0) = 0")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", choices=["closed", "rk4"], default="closed")
    p.add_argument("--step", type=float, default=sl.DEFAULT_PHASE_STEP)
    p.add_argument("--out", default=None, help="also write the tabulated curve")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("greens-eval", help="evaluate the Green function G(x, x', t)")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--xp", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--prefactor-phase", type=float, default=sl.GREEN_PREFACTOR_PHASE)
    p.set_defaults(func=cmd_greens)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", choices=sorted(SUITES), default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotFactorizableError as exc:
        print(f"liouspace: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        print(f"liouspace: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"liouspace: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
