"""``projrk`` command line.

Every data-producing command writes one file (``--out``, with a default name
per command) plus ``<out>.meta.json`` holding the run metadata. Data files
never contain timestamps, so identical flags give byte-identical files.

Exit codes: 0 clean, 2 when validation flags were raised, 1 on usage or
runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from . import experiments as ex
from . import schemes as sch
from .analysis import default_window, stability_grid, stability_value
from .integrator import InstabilityError, PartitionedState, Trajectory, integrate, partitioned_step, step_count, write_trajectory_csv
from .tableau import (EmbeddedTableau, ParameterError, PartitionedTableau, TableauError,
                      TableauParseError, Tableau, to_json, validate_all)

EXIT_OK, EXIT_ERROR, EXIT_FLAGS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit with status 2, which is reserved for condition flags
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- config file ------------------------------------------------------------------


def load_config(path: str) -> dict[str, str]:
    """``key = value`` per line, ``#`` starts a comment; keys use flag names."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, val = line.partition("=")
            if not eq or not key.strip():
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


# -- formatting helpers ------------------------------------------------------------


def _fmt(x, precision: int) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.{precision}g}"


def write_csv(path: str, header: Sequence[str], rows, precision: int) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v, precision) for v in row) + "\n")


def write_sidecar(args, extra: dict | None = None) -> str:
    path = args.out + ".meta.json"
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "config", "out", "command_line") and not callable(v)}
    meta = {
        "tool": "projrk",
        "version": __version__,
        "command": args.command,
        "command_line": args.command_line,
        "parameters": params,
        "output": args.out,
    }
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _floats(text: str) -> list[float]:
    return ex.log_sweep(text)


# -- commands ---------------------------------------------------------------------


def _tableau_rows(t) -> tuple[list[str], list[list]]:
    parts: list[tuple[str, Tableau, tuple | None]]
    if isinstance(t, PartitionedTableau):
        parts = [("left", t.left, None), ("right", t.right, None)]
    elif isinstance(t, EmbeddedTableau):
        parts = [("main", t.base, t.b_tilde)]
    else:
        parts = [("main", t, None)]
    s = parts[0][1].s
    header = ["part", "i", "c", *[f"a{j}" for j in range(s)], "b"]
    if parts[0][2] is not None:
        header.append("b_tilde")
    rows = []
    for label, tab, bt in parts:
        for i in range(s):
            row = [label, i, tab.c[i], *tab.A[i], tab.b[i]]
            if bt is not None:
                row.append(bt[i])
            rows.append(row)
    return header, rows


def cmd_tableau(args) -> int:
    t = sch.parse_scheme(args.scheme)
    if args.format == "json":
        with open(args.out, "w", newline="\n") as fh:
            fh.write(to_json(t, indent=2) + "\n")
    else:
        write_csv(args.out, *_tableau_rows(t), args.precision)
    reports = validate_all(t, tol=args.tol, order=args.order)
    flagged = False
    for key, rep in reports.items():
        print(f"[{key}] " + "\n".join(rep.lines()))
        flagged |= not rep.ok
    write_sidecar(args, {"scheme": args.scheme,
                         "flags": {k: list(r.flags) for k, r in reports.items()}})
    return EXIT_FLAGS if flagged else EXIT_OK


def cmd_stability(args) -> int:
    t = sch.parse_scheme(args.scheme)
    if isinstance(t, PartitionedTableau):
        raise ParameterError("stability scans need a single tableau")
    if args.window == "fast":
        lam = args.lam if args.lam is not None else sch.split_scheme_id(args.scheme)[1].get("lam")
        lam = float(lam) if lam is not None else args.eps
        re_b, im_b = default_window("fast", lam)
    else:
        re_b, im_b = default_window("slow")
    re_b = (args.re_min if args.re_min is not None else re_b[0],
            args.re_max if args.re_max is not None else re_b[1])
    im_b = (args.im_min if args.im_min is not None else im_b[0],
            args.im_max if args.im_max is not None else im_b[1])
    grid = stability_grid(t, re_b, im_b, args.nx, args.ny, args.eps, args.workers)
    grid.write_csv(args.out, args.precision)
    g_slow = abs(complex(stability_value(t, -1.0)))
    g_fast = abs(complex(stability_value(t, -1.0 / args.eps)))
    print(f"|g(-1)| = {_fmt(g_slow, args.precision)}")
    print(f"|g(-1/eps)| = {_fmt(g_fast, args.precision)}")
    write_sidecar(args, {"scheme": args.scheme, "grid": grid.sidecar(),
                         "g_abs_slow_marker": g_slow, "g_abs_fast_marker": g_fast})
    return EXIT_OK


def _integrate_partitioned(pt: PartitionedTableau, sys_, left: list[int], dt: float, t_end: float) -> Trajectory:
    N = step_count(dt, t_end)
    u = sys_.initial()
    mask = np.zeros(u.size, dtype=bool)
    mask[left] = True

    def assemble(uL, uR):
        full = np.empty(u.size)
        full[mask], full[~mask] = uL, uR
        return full

    def f_L(uL, uR):
        return sys_.f(assemble(uL, uR))[mask]

    def f_R(uL, uR):
        return sys_.f(assemble(uL, uR))[~mask]

    state = PartitionedState.split(u, left)
    states = np.empty((N + 1, u.size))
    states[0] = u
    for n in range(N):
        try:
            state = partitioned_step(pt, f_L, f_R, state, dt)
        except InstabilityError as exc:
            raise InstabilityError(exc.stage, n) from exc
        states[n + 1] = assemble(state.u_L, state.u_R)
    return Trajectory(np.arange(N + 1) * dt, states, None, {"scheme": pt.name})


def cmd_integrate(args) -> int:
    t = sch.parse_scheme(args.scheme)
    sys_ = ex.parse_problem(args.problem)
    if isinstance(t, PartitionedTableau):
        if not args.left:
            raise ParameterError("partitioned schemes need --left <comma-separated component indices>")
        left = [int(i) for i in args.left.split(",")]
        if any(not 0 <= i < sys_.n for i in left):
            raise ParameterError(f"--left indices must lie in [0, {sys_.n})")
        traj = _integrate_partitioned(t, sys_, left, args.dt, args.t_end)
    else:
        traj = integrate(t, sys_, sys_.initial(), args.dt, args.t_end)
    write_trajectory_csv(traj, args.out, args.precision)
    extra = {"scheme": args.scheme, "problem": sys_.name, "steps": len(traj.times) - 1}
    if sys_.exact is not None:
        err = float(np.max(np.abs(traj.final - sys_.exact(traj.times[-1]))))
        print(f"max-norm error at t={_fmt(traj.times[-1], args.precision)}: {_fmt(err, args.precision)}")
        extra["final_error"] = err
    write_sidecar(args, extra)
    return EXIT_OK


def _dt_list(args) -> list[float]:
    if args.dts:
        return _floats(args.dts)
    return [args.dt0 / 2**i for i in range(args.halvings + 1)]


def cmd_converge(args) -> int:
    if not args.schemes:
        raise UsageError("converge: at least one scheme family is required")
    dts = _dt_list(args)
    rows = []
    summary = {}
    for fam in args.schemes:
        recs = ex.convergence_study(fam, args.problem, args.mode, dts, args.eps, args.t_end, args.lam)
        slopes = ex.slopes_by_record(recs)
        summary[fam] = [None if math.isnan(s) else s for s in slopes]
        for r, s in zip(recs, slopes):
            rows.append([fam, r.dt, r.lam, r.eps, r.error, r.overflow, s])
        print(f"{fam}: slopes " + " ".join(_fmt(s, 4) for s in slopes[1:]))
    write_csv(args.out, ["scheme", "dt", "lam", "eps", "error", "overflow", "slope"], rows, args.precision)
    write_sidecar(args, {"schemes": args.schemes, "dts": dts, "slopes": summary,
                         "coupling": ex.run_parameters.__doc__.split("\n\n", 1)[1].strip()})
    return EXIT_OK


def cmd_estimators(args) -> int:
    lams = _floats(args.lams)
    rows = ex.estimator_study(args.scheme, lams, args.dt)
    write_csv(args.out, ["lambda", "err_corrected", "err_low", "err_high", "estimate"],
              [[r.lam, r.err_corrected, r.err_low, r.err_high, r.estimate] for r in rows], args.precision)
    print(f"{args.scheme}: {len(rows)} rows at dt={_fmt(args.dt, args.precision)}")
    write_sidecar(args, {"scheme": args.scheme})
    return EXIT_OK


def cmd_limit_check(args) -> int:
    lams = _floats(args.lams) if args.lams else [1e-2 / 2**i for i in range(11)]
    rows = ex.limit_check(args.outer, args.K, lams)
    write_csv(args.out, ["lambda", "deviation", "ratio"], rows, args.precision)
    ratios = [r[2] for r in rows if not math.isnan(r[2])]
    if ratios:
        print(f"ratio range [{_fmt(min(ratios), 6)}, {_fmt(max(ratios), 6)}]")
    write_sidecar(args, {"outer": args.outer})
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

DEFAULT_OUT = {
    "tableau": "tableau.json",
    "stability": "stability.csv",
    "integrate": "trajectory.csv",
    "converge": "converge.csv",
    "estimators": "estimators.csv",
    "limit-check": "limit_check.csv",
}


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output data file (a .meta.json sidecar is written next to it)")
    common.add_argument("--config", help="key = value file; flags given on the command line win")
    common.add_argument("--precision", type=int, default=17, help="significant digits in CSV output")

    p = _Parser(prog="projrk", description=__doc__.split("\n\n")[0],
                epilog=sch.SCHEME_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"projrk {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    subs: dict[str, _Parser] = {}

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, epilog=sch.SCHEME_GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(func=func)
        subs[name] = sp
        return sp

    sp = add("tableau", cmd_tableau, "write a tableau and print its validation report")
    sp.add_argument("scheme", nargs="?")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--order", type=int, choices=(0, 1, 2), default=1,
                    help="highest accuracy condition that raises a flag")
    sp.add_argument("--tol", type=float, default=1e-12)

    sp = add("stability", cmd_stability, "sample |g| on a window of the complex plane")
    sp.add_argument("scheme", nargs="?")
    sp.add_argument("--window", choices=("slow", "fast"), default="slow")
    sp.add_argument("--lam", type=float, help="lam used to size the fast window")
    for k in ("re-min", "re-max", "im-min", "im-max"):
        sp.add_argument(f"--{k}", type=float)
    sp.add_argument("--nx", type=int, default=801)
    sp.add_argument("--ny", type=int, default=501)
    sp.add_argument("--eps", type=float, default=1e-5)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("integrate", cmd_integrate, "fixed-step integration of a test problem")
    sp.add_argument("scheme", nargs="?")
    sp.add_argument("--problem", default="model2:eps=1e-5")
    sp.add_argument("--dt", type=float, default=0.1)
    sp.add_argument("--t-end", type=float, default=1.0)
    sp.add_argument("--left", help="component indices of the left part (partitioned schemes)")

    sp = add("converge", cmd_converge, "error against dt for one or more scheme families")
    sp.add_argument("schemes", nargs="*", help="scheme ids with lam left open, e.g. pfe:K=1 prk4k1")
    sp.add_argument("--problem", default="model2")
    sp.add_argument("--mode", choices=ex.CONVERGENCE_MODES, default="shrinking-lambda")
    sp.add_argument("--dts", help="comma list or log:a:b:n; overrides --dt0/--halvings")
    sp.add_argument("--dt0", type=float, default=0.1)
    sp.add_argument("--halvings", type=int, default=3)
    sp.add_argument("--eps", type=float, default=1e-5, help="eps0, the fast scale at dt0")
    sp.add_argument("--lam", type=float, help="lam for fixed-lambda mode (default eps/dt0)")
    sp.add_argument("--t-end", type=float, default=1.0)

    sp = add("estimators", cmd_estimators, "one-step error estimator study on u' = -u")
    sp.add_argument("scheme", nargs="?")
    sp.add_argument("--dt", type=float, default=0.1)
    sp.add_argument("--lams", default="log:-6:-1:51")

    sp = add("limit-check", cmd_limit_check, "distance of prk tableaus from their lam -> 0 limit")
    sp.add_argument("outer", nargs="?")
    sp.add_argument("--K", type=int, default=1)
    sp.add_argument("--lams", help="comma list or log:a:b:n (default: 11 halvings from 1e-2)")
    return p, subs


def _apply_config(sp: _Parser, cfg: dict[str, str], command: str) -> None:
    dests = {a.dest for a in sp._actions}
    unknown = set(cfg) - dests - {"config"}
    if unknown:
        raise UsageError(f"config: unknown key(s) for {command}: {', '.join(sorted(unknown))}")
    if "schemes" in cfg:
        cfg = {**cfg, "schemes": cfg["schemes"].split()}
    sp.set_defaults(**cfg)


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    pre = parser.parse_args(argv)
    if pre.command is None:
        raise UsageError("a subcommand is required\n" + parser.format_usage())
    if pre.config:
        _apply_config(subs[pre.command], load_config(pre.config), pre.command)
        pre = parser.parse_args(argv)
    args = pre
    if isinstance(getattr(args, "schemes", None), str):
        args.schemes = args.schemes.split()
    positional = {"tableau": "scheme", "stability": "scheme", "integrate": "scheme",
                  "estimators": "scheme", "limit-check": "outer"}.get(args.command)
    if positional and not getattr(args, positional):
        raise UsageError(f"{args.command}: missing {positional}\n{sch.SCHEME_GRAMMAR}")
    if args.out is None:
        args.out = DEFAULT_OUT[args.command]
        if args.command == "tableau" and args.format == "csv":
            args.out = "tableau.csv"
    if not 1 <= args.precision <= 17:
        raise UsageError("--precision must be between 1 and 17")
    args.command_line = ["projrk", *argv]
    return args


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except (ParameterError, TableauError, TableauParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        msg = str(exc)
        if ("scheme" in msg or "key" in msg) and "problem" not in msg and sch.SCHEME_GRAMMAR not in msg:
            print(sch.SCHEME_GRAMMAR, file=sys.stderr)
    except InstabilityError as exc:
        print(f"error: unstable run: {exc}", file=sys.stderr)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
