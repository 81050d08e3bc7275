"""Command-line harness: single solves, delta sweeps and exact-vs-inexact comparisons.

Subcommands::

    varpg list-problems
    varpg solve --problem ex6.1 --delta 0.5 --paper-starts --output runs.csv
    varpg sweep-delta --problem ex6.1 --deltas 0 0.25 0.5 0.75
    varpg compare --problem ex6.2

Exit codes: 0 success, 1 validation error, 2 solver failure in some instance.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .driver import Constant, DirectionMode, SolverConfig, SolverTrace, Status, solve_fipg, solve_ipg
from .linesearch import ArmijoParams
from .problems import PROBLEMS, get_problem, method_for, random_starts

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2

CSV_COLUMNS = ["instance", "x0", "x_final", "iterations", "cpu_seconds", "final_direction_norm",
               "status", "delta", "sigma", "gamma", "beta", "mode"]
FAILED = {Status.LINE_SEARCH_FAIL, Status.SUBPROBLEM_FAIL}


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Starts:
    """``count is None`` selects the problem's published starting points."""

    count: Optional[int] = None
    seed: int = 42

    @property
    def paper(self) -> bool:
        return self.count is None


@dataclass
class RunSpec:
    problem_name: str
    method: Optional[str] = None
    config: SolverConfig = field(default_factory=SolverConfig)
    starts: Starts = field(default_factory=Starts)
    output: Optional[Path] = None
    format: str = "csv"

    def validate(self):
        if self.problem_name not in PROBLEMS:
            raise ValidationError(f"unknown problem {self.problem_name!r}; choose from {sorted(PROBLEMS)}")
        expected = method_for(get_problem(self.problem_name))
        if self.method is None:
            self.method = expected
        if self.method not in ("ipg", "fipg"):
            raise ValidationError(f"unknown method {self.method!r}")
        if self.method != expected:
            raise ValidationError(f"{self.problem_name} requires method {expected}, got {self.method}")
        if self.starts.count is not None and self.starts.count < 1:
            raise ValidationError("starts count must be at least 1")
        if self.format not in ("csv", "text"):
            raise ValidationError(f"unknown format {self.format!r}")


def _fmt_vec(x) -> str:
    return ";".join(f"{v:.17g}" for v in np.atleast_1d(x))


def _fmt_float(x: float) -> str:
    return f"{x:.17g}"


def _mode_label(config: SolverConfig) -> str:
    return "exact" if config.exact else "delta"


def start_points(name: str, starts: Starts) -> list[np.ndarray]:
    if starts.paper:
        return [p.copy() for p in get_problem(name).paper_starts]
    return random_starts(name, starts.count, starts.seed)


def run_instances(name: str, config: SolverConfig, points: Sequence[np.ndarray]) -> list[SolverTrace]:
    problem = get_problem(name)
    solver = solve_fipg if method_for(problem) == "fipg" else solve_ipg
    # Instances are independent; run in order so output order is fixed.
    return [solver(problem, config, x0) for x0 in points]


def trace_row(i: int, trace: SolverTrace, config: SolverConfig) -> dict:
    a = config.armijo
    return {
        "instance": i + 1,
        "x0": _fmt_vec(trace.x0),
        "x_final": _fmt_vec(trace.x_final),
        "iterations": trace.iterations,
        "cpu_seconds": _fmt_float(trace.wall_seconds),
        "final_direction_norm": _fmt_float(trace.final_direction_norm),
        "status": trace.status.value,
        "delta": _fmt_float(config.delta),
        "sigma": _fmt_float(a.sigma),
        "gamma": _fmt_float(a.gamma),
        "beta": _fmt_float(config.beta(0)),
        "mode": _mode_label(config),
    }


def write_csv(rows: list[dict], columns: Sequence[str], dest) -> None:
    writer = csv.DictWriter(dest, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)


def _text_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    line = "  ".join(str(h).rjust(w) for h, w in zip(header, widths))
    out = [line, "-" * len(line)]
    for r in rows:
        out.append("  ".join(str(c).rjust(w) for c, w in zip(r, widths)))
    return "\n".join(out)


def summary_text(name: str, traces: Sequence[SolverTrace]) -> str:
    header = ["instance", "initial point", "solution", "cpu time", "iterations", "status"]
    rows = []
    for i, t in enumerate(traces):
        rows.append([
            i + 1,
            " ".join(f"{v:.4f}" for v in t.x0),
            " ".join(f"{v:.4f}" for v in t.x_final),
            f"{t.wall_seconds:.4f}",
            t.iterations,
            t.status.value,
        ])
    return f"{name}\n" + _text_table(header, rows)


def _emit(spec_output: Optional[Path], fmt: str, csv_text: str, text: str, stdout) -> None:
    body = csv_text if fmt == "csv" else text + "\n"
    if spec_output is None:
        stdout.write(body)
        return
    try:
        Path(spec_output).write_text(body, encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot write {spec_output}: {exc}") from exc


def run(spec: RunSpec, stdout=None) -> int:
    """Solve every start of ``spec``; writes one CSV row per instance and prints a summary."""
    stdout = stdout or sys.stdout
    try:
        spec.validate()
        points = start_points(spec.problem_name, spec.starts)
    except (ValidationError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    traces = run_instances(spec.problem_name, spec.config, points)
    rows = [trace_row(i, t, spec.config) for i, t in enumerate(traces)]
    buf = io.StringIO()
    write_csv(rows, CSV_COLUMNS, buf)
    text = summary_text(spec.problem_name, traces)
    try:
        _emit(spec.output, spec.format, buf.getvalue(), text, stdout)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if spec.output is not None:
        stdout.write(text + "\n")
    return EXIT_SOLVER if any(t.status in FAILED for t in traces) else EXIT_OK


@dataclass
class SweepRow:
    delta: float
    avg_cpu_seconds: float
    avg_iterations: float
    instances: int
    stationary: int
    failures: int


def sweep_delta(problem_name: str, deltas: Sequence[float], starts: Starts = Starts(),
                config: SolverConfig = SolverConfig(), repeats: int = 1) -> list[SweepRow]:
    """Average CPU time and iterations of the delta-approximate method per delta.

    ``repeats`` reruns each batch to average out timer noise; iteration counts
    are deterministic and unaffected.
    """
    if not deltas:
        raise ValidationError("at least one delta is required")
    for d in deltas:
        if not 0.0 <= d < 1.0:
            raise ValidationError(f"delta {d} outside [0, 1)")
    if problem_name not in PROBLEMS:
        raise ValidationError(f"unknown problem {problem_name!r}")
    if starts.count is not None and starts.count < 1:
        raise ValidationError("starts count must be at least 1")
    points = start_points(problem_name, starts)
    out = []
    for d in deltas:
        cfg = config.with_(delta=float(d), direction_mode=DirectionMode.DELTA_APPROX)
        times, iters, stat, fail = [], [], 0, 0
        for _ in range(max(1, repeats)):
            traces = run_instances(problem_name, cfg, points)
            times.extend(t.wall_seconds for t in traces)
        iters = [t.iterations for t in traces]
        stat = sum(t.status is Status.STATIONARY for t in traces)
        fail = sum(t.status in FAILED for t in traces)
        out.append(SweepRow(float(d), float(np.mean(times)), float(np.mean(iters)), len(traces), stat, fail))
    return out


SWEEP_COLUMNS = ["delta", "avg_cpu_seconds", "avg_iterations", "instances", "stationary", "failures"]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv([{
        "delta": _fmt_float(r.delta), "avg_cpu_seconds": _fmt_float(r.avg_cpu_seconds),
        "avg_iterations": _fmt_float(r.avg_iterations), "instances": r.instances,
        "stationary": r.stationary, "failures": r.failures,
    } for r in rows], SWEEP_COLUMNS, buf)
    return buf.getvalue()


def sweep_text(rows: Sequence[SweepRow]) -> str:
    header = ["delta"] + [f"{r.delta:g}" for r in rows]
    body = [
        ["avg cpu time"] + [f"{r.avg_cpu_seconds:.4f}" for r in rows],
        ["avg iterations"] + [f"{r.avg_iterations:.1f}" for r in rows],
    ]
    return _text_table(header, body)


def _radius_gap(x) -> float:
    r2 = float(np.dot(x, x))
    return min(abs(r2 - math.pi), abs(r2 - 2.0 * math.pi))


def compare_exact_inexact(problem_name: str, config: SolverConfig = SolverConfig(),
                          starts: Starts = Starts(), inexact: Optional[SolverConfig] = None) -> list[dict]:
    """Paired exact and delta-approximate runs from identical starts.

    ``inexact`` overrides the second configuration (by default ``config`` with
    delta-approximate directions).
    """
    if problem_name not in PROBLEMS:
        raise ValidationError(f"unknown problem {problem_name!r}")
    if starts.count is not None and starts.count < 1:
        raise ValidationError("starts count must be at least 1")
    points = start_points(problem_name, starts)
    exact_cfg = config.with_(direction_mode=DirectionMode.EXACT)
    inexact_cfg = inexact or config.with_(direction_mode=DirectionMode.DELTA_APPROX)
    ex = run_instances(problem_name, exact_cfg, points)
    inex = run_instances(problem_name, inexact_cfg, points)
    rows = []
    for i, (a, b) in enumerate(zip(ex, inex)):
        row = {
            "instance": i + 1,
            "x0": _fmt_vec(a.x0),
            "exact_iterations": a.iterations,
            "exact_cpu_seconds": _fmt_float(a.wall_seconds),
            "exact_status": a.status.value,
            "exact_x_final": _fmt_vec(a.x_final),
            "inexact_iterations": b.iterations,
            "inexact_cpu_seconds": _fmt_float(b.wall_seconds),
            "inexact_status": b.status.value,
            "inexact_x_final": _fmt_vec(b.x_final),
            "delta": _fmt_float(inexact_cfg.delta),
        }
        if problem_name == "ex6.2":
            row["exact_radius_gap"] = _fmt_float(_radius_gap(a.x_final))
            row["inexact_radius_gap"] = _fmt_float(_radius_gap(b.x_final))
        rows.append(row)
    return rows


def compare_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        write_csv(list(rows), list(rows[0].keys()), buf)
    return buf.getvalue()


def compare_text(rows: Sequence[dict]) -> str:
    header = ["instance", "exact its", "exact cpu", "inexact its", "inexact cpu"]
    body = [[r["instance"], r["exact_iterations"], f"{float(r['exact_cpu_seconds']):.4f}",
             r["inexact_iterations"], f"{float(r['inexact_cpu_seconds']):.4f}"] for r in rows]
    return _text_table(header, body)


# -- argument handling ------------------------------------------------------------

CONFIG_KEYS = {
    "problem": str, "method": str, "delta": float, "sigma": float, "gamma": float, "beta": float,
    "tol": float, "max_iter": int, "starts": int, "seed": int, "paper_starts": "bool",
    "output": str, "format": str, "mode": str, "budget": int,
}


def read_config_file(path: str) -> dict:
    """Read a ``[run]`` section of ``key = value`` pairs (INI syntax)."""
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise ValidationError(f"cannot read config file {path}")
    if not parser.has_section("run"):
        raise ValidationError("config file needs a [run] section")
    out = {}
    for key, raw in parser.items("run"):
        key = key.replace("-", "_")
        kind = CONFIG_KEYS.get(key)
        if kind is None:
            raise ValidationError(f"unknown config key {key!r}")
        try:
            out[key] = parser.getboolean("run", key) if kind == "bool" else kind(raw)
        except ValueError as exc:
            raise ValidationError(f"bad value for {key}: {raw!r}") from exc
    return out


def _add_common(p: argparse.ArgumentParser, with_problem_default: bool = True):
    p.add_argument("--config", help="INI file with a [run] section; flags override it")
    p.add_argument("--problem", help="problem name (see list-problems)")
    p.add_argument("--method", choices=["ipg", "fipg"])
    p.add_argument("--delta", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--tol", type=float, help="stop when ||v|| < tol")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--budget", type=int, help="candidate budget for delta-approximate directions")
    p.add_argument("--mode", choices=["exact", "delta"], help="direction mode")
    p.add_argument("--starts", type=int, help="number of random starts")
    p.add_argument("--seed", type=int)
    p.add_argument("--paper-starts", action="store_true", default=None, dest="paper_starts",
                   help="use the problem's published starting points (default)")
    p.add_argument("--output", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "text"])


def _settings(args) -> dict:
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def _config_from(settings: dict) -> SolverConfig:
    base = SolverConfig()
    armijo = ArmijoParams(sigma=settings.get("sigma", base.armijo.sigma),
                          gamma=settings.get("gamma", base.armijo.gamma))
    mode = settings.get("mode", "delta")
    return SolverConfig(
        delta=settings.get("delta", base.delta),
        armijo=armijo,
        beta_schedule=Constant(settings["beta"]) if "beta" in settings else base.beta_schedule,
        tol_stat=settings.get("tol", base.tol_stat),
        max_iter=settings.get("max_iter", base.max_iter),
        direction_mode=DirectionMode.EXACT if mode == "exact" else DirectionMode.DELTA_APPROX,
        budget=settings.get("budget", base.budget),
    )


def _starts_from(settings: dict) -> Starts:
    seed = settings.get("seed", 42)
    if settings.get("paper_starts") or "starts" not in settings:
        return Starts(None, seed)
    return Starts(settings["starts"], seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varpg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list-problems", help="list bundled problems")
    _add_common(sub.add_parser("solve", help="solve every start of one problem"))
    sw = sub.add_parser("sweep-delta", help="average effort per delta")
    _add_common(sw)
    sw.add_argument("--deltas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75])
    sw.add_argument("--repeats", type=int, default=1)
    _add_common(sub.add_parser("compare", help="paired exact vs delta-approximate runs"))
    return parser


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK

    if args.command == "list-problems":
        for name, factory in PROBLEMS.items():
            p = factory()
            doc = (factory.__doc__ or "").strip().splitlines()[0]
            stdout.write(f"{name}\t{method_for(p)}\tn={p.n} m={p.m}\t{doc}\n")
        return EXIT_OK

    try:
        settings = _settings(args)
        if "problem" not in settings:
            raise ValidationError("--problem is required")
        config = _config_from(settings)
        starts = _starts_from(settings)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    fmt = settings.get("format", "csv")
    output = Path(settings["output"]) if "output" in settings else None

    if args.command == "solve":
        spec = RunSpec(settings["problem"], settings.get("method"), config, starts, output, fmt)
        return run(spec, stdout)

    try:
        if settings.get("method") is not None and settings["problem"] in PROBLEMS:
            expected = method_for(get_problem(settings["problem"]))
            if settings["method"] != expected:
                raise ValidationError(f"{settings['problem']} requires method {expected}")
        if args.command == "sweep-delta":
            rows = sweep_delta(settings["problem"], args.deltas, starts, config, repeats=args.repeats)
            _emit(output, fmt, sweep_csv(rows), sweep_text(rows), stdout)
            failed = any(r.failures for r in rows)
        else:
            rows = compare_exact_inexact(settings["problem"], config, starts)
            _emit(output, fmt, compare_csv(rows), compare_text(rows), stdout)
            failed = any(r["exact_status"] in {s.value for s in FAILED}
                         or r["inexact_status"] in {s.value for s in FAILED} for r in rows)
    except (ValidationError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_SOLVER if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
