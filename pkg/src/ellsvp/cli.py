"""Command-line interface.

Every subcommand writes one JSON document to stdout (or ``--output``).
Exit codes:

0  success
1  ``verify`` ran and at least one criterion failed
2  usage or input parse error
3  a size cap was exceeded
4  any other library error (e.g. a body that cannot be rounded)
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .bodies import normalize
from .covering import DEFAULT_TRANSLATE_CAP, VolumeMethod, half_volume_radius, volume_ratio_diag
from .errors import CapExceededError, EllSvpError
from .estimate import f_tilde, l_tilde
from .grid import DEFAULT_MAX_DIM, GridMode, GridParams, enumerate_grid
from .lattice import DEFAULT_NODE_CAP, enumerate_in_ellipsoid, shortest_vector_l2
from .solver import SolverConfig, build_ellipsoid, solve_ell_program
from .svp import SvpConfig, points_in_body, svp

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_PARSE, EXIT_CAP, EXIT_ERROR = 0, 1, 2, 3, 4

# values pinned by --fixture
FIXTURE = {
    "epsilon": None,  # per-command default
    "max_iterations": 50_000,
    "mode": GridMode.THEOREM_SET.value,
    "node_cap": DEFAULT_NODE_CAP,
    "translate_cap": DEFAULT_TRANSLATE_CAP,
    "dim_cap": DEFAULT_MAX_DIM,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _epsilon(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads (never changes the output)")
    common.add_argument("--fixture", action="store_true",
                        help="pin epsilon, mode and caps to the built-in fixture values")
    common.add_argument("--mode", choices=[m.value for m in GridMode], default=GridMode.THEOREM_SET.value)
    common.add_argument("--epsilon", type=_epsilon, default=None)
    common.add_argument("--max-iterations", type=_positive_int, default=50_000)
    common.add_argument("--node-cap", type=_positive_int, default=DEFAULT_NODE_CAP)
    common.add_argument("--translate-cap", type=_positive_int, default=DEFAULT_TRANSLATE_CAP)
    common.add_argument("--dim-cap", type=_positive_int, default=DEFAULT_MAX_DIM)
    common.add_argument("--verbose", "-v", action="store_true")

    p = _Parser(prog="ellsvp", description="l-type ellipsoids and shortest vectors in general norms")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grid", parents=[common], help="Gaussian grid parameters and size")
    g.add_argument("--dim", "-n", type=_positive_int, required=True)
    g.add_argument("--dump", action="store_true", help="include integer points and weights")

    g = sub.add_parser("l-estimate", parents=[common], help="discrete l-estimate of a body")
    g.add_argument("--body", required=True)
    g.add_argument("--matrix", help="evaluate f~(A) for this matrix instead of A = I")

    g = sub.add_parser("ell-solve", parents=[common], help="solve the convex program for a body")
    g.add_argument("--body", required=True)

    g = sub.add_parser("diag-covering", parents=[common], help="volume-ratio covering bounds")
    g.add_argument("--body", required=True)
    g.add_argument("--ellipsoid", required=True)
    g.add_argument("--method", choices=[m.value for m in VolumeMethod], default=VolumeMethod.QUASI_MC.value)
    g.add_argument("--resolution", type=_positive_int)
    g.add_argument("--half-volume", action="store_true", help="also report the half-volume radius")

    g = sub.add_parser("enumerate", parents=[common], help="lattice points in an ellipsoid or body")
    g.add_argument("--basis", required=True)
    g.add_argument("--ellipsoid")
    g.add_argument("--center")
    g.add_argument("--body")
    g.add_argument("--scale", type=float)
    g.add_argument("--fallback-ball", action="store_true")

    g = sub.add_parser("svp-l2", parents=[common], help="Euclidean shortest vector")
    g.add_argument("--basis", required=True)

    g = sub.add_parser("svp", parents=[common], help="shortest vector in the norm of a body")
    g.add_argument("--basis", required=True)
    g.add_argument("--body", required=True)
    g.add_argument("--fallback-ball", action="store_true")

    g = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    g.add_argument("--quick", action="store_true", help="reduced trial counts")
    g.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _settings(args) -> dict:
    s = {
        "epsilon": args.epsilon,  # None selects the per-command default
        "max_iterations": args.max_iterations,
        "mode": args.mode,
        "node_cap": args.node_cap,
        "translate_cap": args.translate_cap,
        "dim_cap": args.dim_cap,
    }
    if args.fixture:
        s.update(FIXTURE)
    return s


def _svp_config(args, st) -> SvpConfig:
    return SvpConfig(epsilon=st["epsilon"] or SvpConfig.epsilon, max_iterations=st["max_iterations"],
                     mode=GridMode(st["mode"]),
                     fallback_ball=getattr(args, "fallback_ball", False),
                     translate_cap=st["translate_cap"], node_cap=st["node_cap"], threads=args.threads)


def _cmd_grid(args, st):
    params = GridParams.for_dim(args.dim, st["mode"])
    grid = enumerate_grid(params, st["dim_cap"])
    out = {"n": args.dim, "s": params.s, "mode": params.mode, "size": grid.size, "total_mass": grid.total_mass()}
    if args.dump:
        out["points"] = grid.points
        out["weights"] = grid.weights
    return out


def _cmd_l_estimate(args, st):
    body = io.read_body(args.body)
    grid = enumerate_grid(GridParams.for_dim(body.dim, st["mode"]), st["dim_cap"])
    out = {"s": grid.params.s, "size": grid.size, "mode": grid.params.mode}
    if args.matrix:
        out["f_tilde"] = f_tilde(body, grid, io.read_matrix(args.matrix, body.dim))
    else:
        out["l_tilde"] = l_tilde(body, grid)
    return out


def _cmd_ell_solve(args, st):
    body = io.read_body(args.body)
    rounded, T = normalize(body)
    grid = enumerate_grid(GridParams.for_dim(body.dim, st["mode"]), st["dim_cap"])
    cfg = SolverConfig(st["epsilon"] or SolverConfig.epsilon, st["max_iterations"], mode=GridMode(st["mode"]))
    res = solve_ell_program(rounded, grid, cfg)
    E = build_ellipsoid(res.A_opt, res.value, body.dim)
    return {
        "A_opt": res.A_opt,
        "value": res.value,
        "iterations": res.iterations,
        "certified_gap": res.certified_gap,
        "lower_bound": res.lower_bound,
        "status": res.status,
        "ellipsoid": io.ellipsoid_to_dict(E),
        "rounding_T": T,
        "rounded_body": io.body_to_dict(rounded),
        "note": "the ellipsoid lives in the rounded frame; T maps the body onto the rounded body",
    }


def _cmd_diag(args, st):
    body = io.read_body(args.body)
    E = io.read_ellipsoid(args.ellipsoid, body.dim)
    rep = volume_ratio_diag(body, E, args.method, args.resolution)
    out = rep.as_dict()
    if args.half_volume:
        hv = half_volume_radius(body, E.unit(), args.method, args.resolution)
        out["half_volume"] = {"radius": hv.radius, "fraction": hv.fraction, "saturated": hv.saturated}
    return out


def _cmd_enumerate(args, st):
    basis = io.read_lattice(args.basis)
    if args.ellipsoid:
        if args.body:
            raise io.ParseError("give either --ellipsoid or --body, not both")
        E = io.read_ellipsoid(args.ellipsoid, basis.dim)
        center = io.read_vector(args.center, basis.dim) if args.center else np.zeros(basis.dim)
        pts = enumerate_in_ellipsoid(basis, center, E, st["node_cap"])
    elif args.body:
        if args.scale is None or not args.scale > 0:
            raise io.ParseError("--body needs a positive --scale")
        body = io.read_body(args.body)
        pts = points_in_body(basis, body, args.scale, _svp_config(args, st))
    else:
        raise io.ParseError("enumerate needs --ellipsoid or --body")
    return {"count": len(pts), "points": pts}


def _cmd_svp_l2(args, st):
    basis = io.read_lattice(args.basis)
    v = shortest_vector_l2(basis, st["node_cap"])
    return {"vector": v, "norm": float(np.sqrt(float(v @ v)))}


def _cmd_svp(args, st):
    basis = io.read_lattice(args.basis)
    body = io.read_body(args.body)
    if basis.dim != body.dim:
        raise io.ParseError(f"basis has dim {basis.dim}, body has dim {body.dim}")
    return svp(basis, body, _svp_config(args, st)).as_dict()


def _cmd_verify(args, st):
    from .acceptance import run_all

    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise io.ParseError(f"--only expects comma-separated integers, got {args.only!r}") from None
    results = run_all(quick=args.quick, only=only, threads=args.threads,
                      log=(lambda m: print(m, file=sys.stderr)) if args.verbose else None)
    return {
        "quick": args.quick,
        "criteria": [r.as_dict() for r in results],
        "passed": all(r.passed for r in results),
    }


COMMANDS = {
    "grid": _cmd_grid,
    "l-estimate": _cmd_l_estimate,
    "ell-solve": _cmd_ell_solve,
    "diag-covering": _cmd_diag,
    "enumerate": _cmd_enumerate,
    "svp-l2": _cmd_svp_l2,
    "svp": _cmd_svp,
    "verify": _cmd_verify,
}


def run(argv=None) -> tuple[int, str]:
    """Run one command; returns the exit status and the JSON text (empty on error)."""
    args = build_parser().parse_args(argv)
    st = _settings(args)
    try:
        out = COMMANDS[args.command](args, st)
    except io.ParseError as exc:
        print(f"ellsvp: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE, ""
    except CapExceededError as exc:
        print(f"ellsvp: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP, ""
    except EllSvpError as exc:
        print(f"ellsvp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR, ""
    if args.fixture:
        out = {**out, "fixture": FIXTURE}
    text = io.dumps(out)
    status = EXIT_OK
    if args.command == "verify" and not out["passed"]:
        status = EXIT_VERIFY_FAILED
    return status, text


def main(argv=None) -> int:
    try:
        status, text = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if text:
        args = build_parser().parse_args(argv)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
