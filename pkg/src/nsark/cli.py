"""Command-line front end: ``nsark trees | converge | check``.

Every subcommand accepts ``--config FILE`` (JSON); explicit flags override
values from the file. Output goes to stdout unless ``--output`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import gallery, orderlab, pds as pdsmod, solvers
from .trees import TreeLimitError, enumerate_trees

DEFAULTS = {
    "problem": "linear2",
    "scheme": "rk4",
    "h0": 0.1,
    "ratio": 0.5,
    "points": 8,
    "t_end": 1.0,
    "order": None,
    "format": "table",
    "seed": 0,
    "jobs": 1,
    "colors": 1,
    "method": "auto",
}


@dataclass
class ExperimentConfig:
    problem: object = "linear2"  # builtin name or inline PDS dict
    scheme: object = "rk4"  # gallery name or scheme dict
    h0: float = 0.1
    ratio: float = 0.5
    points: int = 8
    t_end: float = 1.0
    order: int | None = None
    format: str = "table"
    seed: int = 0
    jobs: int = 1
    colors: int = 1
    method: str = "auto"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h0 <= 0 or not 0 < self.ratio < 1 or self.points < 1:
            raise ValueError("grid needs h0 > 0, 0 < ratio < 1 and points >= 1")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")

    @property
    def grid(self) -> np.ndarray:
        return orderlab.geometric_grid(self.h0, self.ratio, self.points)

    def build_problem(self) -> pdsmod.PDS:
        if isinstance(self.problem, dict):
            return pdsmod.from_dict(self.problem)
        return pdsmod.builtin(self.problem)

    def build_scheme(self, problem: pdsmod.PDS):
        if isinstance(self.scheme, dict):
            return solvers.scheme_from_dict(self.scheme, problem)
        return gallery.scheme(self.scheme, problem)

    @property
    def scheme_name(self) -> str:
        if isinstance(self.scheme, dict):
            return self.scheme.get("name", self.scheme.get("kind", "custom"))
        return self.scheme

    def claimed_order(self) -> int:
        if self.order is not None:
            return int(self.order)
        if isinstance(self.scheme, str):
            return gallery.design_order(self.scheme)
        raise ValueError("--order is required for schemes given as JSON")


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        grid = data.pop("grid", {})
        values.update({k: grid[k] for k in ("h0", "ratio", "points") if k in grid})
        values.update(data)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    known = {k: values.pop(k) for k in list(values) if k in ExperimentConfig.__dataclass_fields__}
    return ExperimentConfig(**known, extra=values)


# subcommands -------------------------------------------------------------------

def cmd_trees(cfg: ExperimentConfig) -> tuple[str, int]:
    q = 3 if cfg.order is None else int(cfg.order)
    trees = enumerate_trees(q, int(cfg.colors))
    rows = [t.to_dict() for t in trees]
    if cfg.format == "json":
        return json.dumps(rows, indent=2) + "\n", 0
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["encoding", "order", "root_color", "sigma", "gamma"])
        for t in trees:
            d = t.to_dict()
            w.writerow([t.encode(), d["order"], d["root_color"], d["sigma"], d["gamma"]])
        return buf.getvalue(), 0
    lines = [f"{'tree':<24} {'order':>5} {'sigma':>5} {'gamma':>5}"]
    for t in trees:
        d = t.to_dict()
        lines.append(f"{t.encode():<24} {d['order']:>5} {d['sigma']:>5} {d['gamma']:>5}")
    lines.append(f"{len(trees)} trees (order <= {q}, {cfg.colors} colors)")
    return "\n".join(lines) + "\n", 0


def cmd_converge(cfg: ExperimentConfig) -> tuple[str, int]:
    problem = cfg.build_problem()
    scheme = cfg.build_scheme(problem)
    est = orderlab.empirical_order(scheme, None, cfg.t_end, cfg.grid, jobs=cfg.jobs)
    if cfg.format == "json":
        out = {"scheme": cfg.scheme_name, "problem": problem.name, "t_end": cfg.t_end,
               "h": est.h.tolist(), "error": est.errors.tolist(),
               "order": est.order, "fit_rms": est.fit_rms}
        return json.dumps(out, indent=2, sort_keys=True) + "\n", 0
    if cfg.format == "csv":
        return est.to_csv() + f"# fitted order: {est.order:.4f}\n", 0
    lines = [f"{'h':>12}  {'error':>12}"]
    lines += [f"{h:12.5e}  {e:12.5e}" for h, e in zip(est.h, est.errors)]
    lines.append(f"fitted order {est.order:.4f} (fit rms {est.fit_rms:.2e}) "
                 f"for {cfg.scheme_name} on {problem.name}")
    return "\n".join(lines) + "\n", 0


def run_check(cfg: ExperimentConfig) -> orderlab.ConditionReport:
    problem = cfg.build_problem()
    scheme = cfg.build_scheme(problem)
    p = cfg.claimed_order()
    states = orderlab.evaluation_states(problem.y0, 3, cfg.seed)
    method = cfg.method
    if method == "auto":
        method = {"rk": "u", "geco": "geco", "mprk": "mprk"}[scheme.kind]
    if method == "u":
        N = problem.N if scheme.kind == "mprk" else max(1, int(cfg.colors))
        return orderlab.u_residuals(scheme, enumerate_trees(p, N), p, cfg.grid, states,
                                    name=cfg.scheme_name, jobs=cfg.jobs)
    if method == "geco":
        return orderlab.geco_conditions(scheme.phi, scheme.tableau, p, states, cfg.grid,
                                        name=cfg.scheme_name)
    if method == "mprk":
        return orderlab.mprk_conditions(scheme, p, states, cfg.grid, name=cfg.scheme_name,
                                        jobs=cfg.jobs)
    raise ValueError(f"unknown method {method!r}")


def cmd_check(cfg: ExperimentConfig) -> tuple[str, int]:
    report = run_check(cfg)
    text = report.to_json() + "\n" if cfg.format == "json" else report.to_table()
    return text, 0 if report.passed else 1


COMMANDS = {"trees": cmd_trees, "converge": cmd_converge, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override it")
    common.add_argument("--format", choices=["json", "csv", "table"])
    common.add_argument("--order", type=int, help="tree order q / claimed order p")
    common.add_argument("--seed", type=int)
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--problem", help=f"builtin problem ({', '.join(pdsmod.BUILTINS)})")
    grid.add_argument("--scheme", help="gallery scheme name")
    grid.add_argument("--h0", type=float)
    grid.add_argument("--ratio", type=float)
    grid.add_argument("--points", type=int)
    grid.add_argument("--t-end", dest="t_end", type=float)
    grid.add_argument("--jobs", type=int, help="worker threads for grid points")

    parser = argparse.ArgumentParser(prog="nsark", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    t = sub.add_parser("trees", parents=[common], help="enumerate colored trees")
    t.add_argument("--colors", "-N", type=int, help="number of colors")
    sub.add_parser("converge", parents=[common, grid], help="global error convergence study")
    c = sub.add_parser("check", parents=[common, grid], help="order condition report")
    c.add_argument("--method", choices=["auto", "u", "geco", "mprk"])
    c.add_argument("--colors", "-N", type=int, help="colors for u residuals of unsplit schemes")
    sub.add_parser("schemes", help="list gallery schemes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "schemes":
        for name in gallery.names():
            print(f"{name:<22} order {gallery.nominal_order(name)}")
        return 0
    try:
        cfg = load_config(args)
        text, code = COMMANDS[args.command](cfg)
    except (ValueError, KeyError, TreeLimitError, OSError) as exc:
        print(f"nsark {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
