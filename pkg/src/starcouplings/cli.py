"""Command-line front end.

Subcommands: coupling, smatrix, greens, converge, oracle-check.  All
numeric payloads are computed by the library; the CLI only parses flags
and serializes results.

Output is deterministic: JSON fields appear in fixed order, floats are
written with 17 significant digits, complex entries as {"re": ..., "im":
...}.  Infinite parameters serialize as the strings "inf"/"-inf", NaN as
null.  Results go to stdout, diagnostics to stderr.

Exit codes: 0 success, 2 flag/usage error, 3 numeric or validation
failure (pole hit, inadmissible pair, budget exceeded), 4 convergence
sweep finished with at least one invalid stage (partial report emitted).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .convergence import convergence_sweep
from .coupling import (make_coupling, rescale_length, to_ab, unitarity_defect,
                       validate_ab)
from .errors import InvalidCouplingError, PoleError
from .finite_difference import (GridSpec, compare_kernels,
                                fd_resolvent_halfline, fd_resolvent_star)
from .greens import (HalflineBC, PointInteraction, StarModel, halfline_kernel,
                     star_green)
from .scattering import s_matrix

_FAMILY_FLAGS = {
    "delta": "delta",
    "delta-prime-s": "delta_prime_s",
    "delta-p": "delta_p",
    "delta-prime": "delta_prime",
}
_SCHEDULE_FLAGS = {
    "delta-prime-s": "delta_prime_s",
    "delta-prime": "delta_prime",
}
_STAR_FLAGS = {
    "delta-prime-s": "delta_prime_s",
    "delta-prime": "delta_prime",
    "central-delta": "central_delta",
    "central-delta-p": "central_delta_p",
}


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def _dumps(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _dumps({"re": float(obj.real), "im": float(obj.imag)})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        parts = (f"{json.dumps(str(k))}: {_dumps(v)}" for k, v in obj.items())
        return "{" + ", ".join(parts) + "}"
    if isinstance(obj, np.ndarray):
        return _dumps(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit_json(obj) -> None:
    print(_dumps(obj))


def _matrix(m: np.ndarray):
    return [[complex(v) for v in row] for row in np.asarray(m, dtype=complex)]


def _param_json(param: float):
    if math.isinf(param):
        return "inf" if param > 0 else "-inf"
    return float(param)


# ---------------------------------------------------------------------------
# flag parsing helpers
# ---------------------------------------------------------------------------

def _parse_param(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidCouplingError(f"cannot parse parameter {text!r}") from exc


def _parse_bc(text: str) -> HalflineBC:
    parts = text.split(":")
    kind = parts[0]
    if kind == "dirichlet" and len(parts) == 1:
        return HalflineBC.dirichlet()
    if kind == "neumann" and len(parts) == 1:
        return HalflineBC.neumann()
    if kind == "robin" and len(parts) == 2:
        return HalflineBC.robin(float(parts[1]))
    if kind == "robin-scaled" and len(parts) == 3:
        return HalflineBC.robin_scaled(int(parts[1]), float(parts[2]))
    raise ValueError(
        f"cannot parse boundary condition {text!r}; expected dirichlet, "
        "neumann, robin:B or robin-scaled:N:BETA")


def _parse_point(text: str) -> PointInteraction:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"cannot parse point {text!r}; expected A,C")
    return PointInteraction(a=float(parts[0]), c=_parse_param(parts[1]))


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"cannot parse grid {text!r}; expected L,N")
    return GridSpec(L=float(parts[0]), N=int(parts[1]))


def _parse_a_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_coupling(args) -> int:
    coupling = make_coupling(_FAMILY_FLAGS[args.family], args.n,
                             _parse_param(args.param))
    out = {
        "family": args.family,
        "n": coupling.n,
        "param": _param_json(coupling.param),
    }
    if args.rescale is not None:
        ell, ell_prime = args.rescale
        coupling = rescale_length(coupling, ell, ell_prime)
        out["rescale"] = {"ell": ell, "ell_prime": ell_prime}
    out["unitarity_defect"] = unitarity_defect(coupling.u)
    out["u"] = _matrix(coupling.u)
    failed = False
    if args.to_ab or args.validate:
        pair = to_ab(coupling)
        if args.to_ab:
            out["ab"] = {"a": _matrix(pair.a), "b": _matrix(pair.b)}
        if args.validate:
            diag = validate_ab(pair)
            out["diagnostics"] = {
                "rank": diag.rank,
                "hermiticity_defect": diag.hermiticity_defect,
                "min_gram_eigenvalue": diag.min_gram_eigenvalue,
                "ok": diag.ok,
            }
            failed = not diag.ok
    _emit_json(out)
    if failed:
        print("error: coupling failed validation", file=sys.stderr)
        return 3
    return 0


def _cmd_smatrix(args) -> int:
    coupling = make_coupling(_FAMILY_FLAGS[args.family], args.n,
                             _parse_param(args.param))
    s = s_matrix(coupling, args.k)
    defect = float(np.max(np.abs(s @ s.conj().T - np.eye(coupling.n))))
    _emit_json({
        "family": args.family,
        "n": coupling.n,
        "param": _param_json(coupling.param),
        "k": args.k,
        "unitarity_defect": defect,
        "s": _matrix(s),
    })
    return 0


def _cmd_greens(args) -> int:
    bc = _parse_bc(args.bc)
    points = [_parse_point(p) for p in (args.point or [])]
    kernel = halfline_kernel(bc, points, args.kappa)
    if args.grid is not None:
        grid = _parse_grid(args.grid)
        nodes = grid.boundary_nodes()
        values = kernel(nodes[:, None], nodes[None, :])
        print("x,y,re,im")
        for i, xv in enumerate(nodes):
            for j, yv in enumerate(nodes):
                print(f"{xv:.17g},{yv:.17g},{values[i, j]:.17g},0")
        return 0
    value = kernel(args.x, args.y)
    if args.emit == "plain":
        print(f"{value:.17g}")
        return 0
    _emit_json({
        "bc": args.bc,
        "points": [{"a": p.a, "c": _param_json(p.c)} for p in points],
        "kappa": args.kappa,
        "x": args.x,
        "y": args.y,
        "value": complex(value),
    })
    return 0


def _stage_json(stage) -> dict:
    return {
        "a": stage.a,
        "b": stage.b,
        "c": stage.c,
        "per_channel_b": stage.per_channel_b,
        "norm_sym": stage.norm_sym,
        "norm_comp": stage.norm_comp,
        "norm_total": stage.norm_total,
        "valid": stage.valid,
        "error": stage.error,
    }


def _cmd_converge(args) -> int:
    family = _SCHEDULE_FLAGS[args.family]
    grid = _parse_grid(args.grid)
    a_list = _parse_a_list(args.a_list)
    report = convergence_sweep(family, args.beta, args.n, args.kappa, a_list,
                               grid, threads=args.threads)
    if args.emit == "json":
        _emit_json({
            "family": args.family,
            "n": report.n,
            "beta": report.beta,
            "kappa": report.kappa,
            "grid": {"L": grid.L, "N": grid.N},
            "stages": [_stage_json(s) for s in report.stages],
            "fitted_slope": report.fitted_slope,
            "fitted_intercept": report.fitted_intercept,
        })
    else:
        print("a,b,c,per_channel_b,norm_sym,norm_comp,norm_total")
        for s in report.stages:
            row = (s.a, s.b, s.c, s.per_channel_b, s.norm_sym, s.norm_comp,
                   s.norm_total)
            print(",".join("nan" if math.isnan(v) else f"{v:.17g}"
                           for v in row))
        _emit_json({"fitted_slope": report.fitted_slope,
                    "fitted_intercept": report.fitted_intercept})
    if any(not s.valid for s in report.stages):
        print("error: some stages hit a pole guard", file=sys.stderr)
        return 4
    return 0


def _default_samples(L: float) -> list[tuple[float, float]]:
    # kept within L/4 so the far-end truncation never pollutes the budget
    xs = [f * L for f in (0.04, 0.08, 0.125, 0.17, 0.25)]
    return [(xv, yv) for xv in xs for yv in xs]


def _oracle_grid(L: float, h: float) -> GridSpec:
    return GridSpec(L=L, N=max(16, int(round(L / h)) - 1))


def _cmd_oracle_check(args) -> int:
    if (args.bc is None) == (args.star_family is None):
        raise ValueError("exactly one of --bc and --star-family is required")
    grid = _oracle_grid(args.L, args.step)
    kappa = args.kappa
    if args.bc is not None:
        bc = _parse_bc(args.bc)
        points = [_parse_point(p) for p in (args.point or [])]
        analytic = halfline_kernel(bc, points, kappa)
        sampled = fd_resolvent_halfline(bc, points, kappa, grid)
        samples = _default_samples(grid.L)
        model_desc = {"mode": "half", "bc": args.bc,
                      "points": [{"a": p.a, "c": _param_json(p.c)}
                                 for p in points]}
    else:
        kind = _STAR_FLAGS[args.star_family]
        if kind in ("delta_prime_s", "delta_prime"):
            model = StarModel(n=args.n, kind=kind, beta=args.beta)
        else:
            point = _parse_point(args.point[0]) if args.point else None
            model = StarModel(n=args.n, kind=kind, b=args.b, point=point)
        analytic = lambda j, x, l, y: star_green(model, kappa, j, x, l, y)  # noqa: E731
        sampled = fd_resolvent_star(model, kappa, grid)
        edges = sorted({0, model.n - 1})
        samples = [(j, xv, l, yv) for j in edges for l in edges
                   for (xv, yv) in _default_samples(grid.L)[::4]]
        model_desc = {"mode": "star", "family": args.star_family,
                      "n": args.n, "beta": args.beta, "b": args.b}

    stats = compare_kernels(analytic, sampled, samples)
    budget = 50.0 * grid.h ** 2
    out = dict(model_desc)
    out.update({
        "kappa": kappa,
        "L": grid.L,
        "N": grid.N,
        "h": grid.h,
        "max_abs": stats.max_abs,
        "rms": stats.rms,
        "samples": stats.count,
        "budget": budget,
        "ok": stats.max_abs <= budget,
    })
    if args.order_check:
        fine = grid.refined()
        # coarse-snapped coordinates stay exact nodes of the refined grid,
        # so both solves are compared at identical physical points
        snapped = [sampled.snap(*p) for p in samples]
        if args.bc is not None:
            sampled_fine = fd_resolvent_halfline(bc, points, kappa, fine)
        else:
            sampled_fine = fd_resolvent_star(model, kappa, fine)
        stats_fine = compare_kernels(analytic, sampled_fine, snapped)
        out["order_check"] = {
            "h_half": fine.h,
            "max_abs_half": stats_fine.max_abs,
            "ratio": stats.max_abs / stats_fine.max_abs
            if stats_fine.max_abs > 0 else math.nan,
        }
    _emit_json(out)
    if stats.max_abs > budget:
        print(f"error: max error {stats.max_abs:.3e} exceeds budget "
              f"{budget:.3e}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starcouplings",
        description="Vertex couplings on quantum star graphs: coupling "
                    "algebra, scattering matrices, resolvent kernels, "
                    "finite-difference cross-checks, convergence sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    coupling = sub.add_parser("coupling", help="build and convert couplings")
    coupling.add_argument("--family", required=True,
                          choices=sorted(_FAMILY_FLAGS))
    coupling.add_argument("--n", type=int, required=True)
    coupling.add_argument("--param", required=True,
                          help="coupling strength, a float or inf")
    coupling.add_argument("--to-ab", action="store_true", dest="to_ab",
                          help="include the boundary pair A = U - I, "
                               "B = i(U + I)")
    coupling.add_argument("--validate", action="store_true",
                          help="include admissibility diagnostics of (A, B)")
    coupling.add_argument("--rescale", nargs=2, type=float, default=None,
                          metavar=("L1", "L2"),
                          help="rescale the length unit from L1 to L2 first")
    coupling.set_defaults(func=_cmd_coupling)

    smatrix = sub.add_parser("smatrix", help="on-shell scattering matrix")
    smatrix.add_argument("--family", required=True,
                         choices=sorted(_FAMILY_FLAGS))
    smatrix.add_argument("--n", type=int, required=True)
    smatrix.add_argument("--param", required=True)
    smatrix.add_argument("--k", type=float, required=True,
                         help="momentum, k > 0")
    smatrix.set_defaults(func=_cmd_smatrix)

    greens = sub.add_parser("greens", help="half-line resolvent kernels")
    greens.add_argument("--bc", required=True,
                        help="dirichlet | neumann | robin:B | "
                             "robin-scaled:N:BETA")
    greens.add_argument("--kappa", type=float, required=True,
                        help="energy is -kappa^2, kappa > 0")
    greens.add_argument("--x", type=float, default=None)
    greens.add_argument("--y", type=float, default=None)
    greens.add_argument("--point", action="append", metavar="A,C",
                        help="delta interaction at A with strength C "
                             "(repeatable)")
    greens.add_argument("--grid", default=None, metavar="L,N",
                        help="emit the kernel on the full grid as csv")
    greens.add_argument("--emit", choices=("json", "plain"), default="json")
    greens.set_defaults(func=_cmd_greens)

    converge = sub.add_parser("converge", help="run a convergence sweep")
    converge.add_argument("--family", required=True,
                          choices=sorted(_SCHEDULE_FLAGS))
    converge.add_argument("--n", type=int, required=True)
    converge.add_argument("--beta", type=float, required=True)
    converge.add_argument("--kappa", type=float, default=1.0)
    converge.add_argument("--a-list", required=True, dest="a_list",
                          help="comma-separated, strictly decreasing")
    converge.add_argument("--grid", default="12,400", metavar="L,N")
    converge.add_argument("--emit", choices=("json", "csv"), default="csv")
    converge.add_argument("--threads", type=int,
                          default=os.cpu_count() or 1)
    converge.set_defaults(func=_cmd_converge)

    oracle = sub.add_parser(
        "oracle-check",
        help="compare closed-form kernels against the finite-difference "
             "solver")
    oracle.add_argument("--bc", default=None,
                        help="half-line mode boundary condition")
    oracle.add_argument("--point", action="append", metavar="A,C")
    oracle.add_argument("--star-family", default=None, dest="star_family",
                        choices=sorted(_STAR_FLAGS))
    oracle.add_argument("--n", type=int, default=2)
    oracle.add_argument("--beta", type=float, default=None)
    oracle.add_argument("--b", type=float, default=None)
    oracle.add_argument("--kappa", type=float, default=1.0)
    oracle.add_argument("--h", type=float, required=True, dest="step",
                        help="target mesh width; N is derived from L")
    oracle.add_argument("--L", type=float, default=12.0)
    oracle.add_argument("--order-check", action="store_true",
                        dest="order_check",
                        help="also solve at h/2 and report the error ratio")
    oracle.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.command == "greens" and args.grid is None \
            and (args.x is None or args.y is None):
        print("error: greens needs --x and --y (or --grid)", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (PoleError, InvalidCouplingError, ValueError,
            np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
