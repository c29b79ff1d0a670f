"""Command-line experiment harness.

Subcommands
-----------
run        one seeded run of an optimizer on a problem
bench      ``runs`` seeded runs plus a mean/std summary
antenna    sidelobe synthesis runs plus radiation pattern and layout export
stats      rank-based comparison of result files
traj-plot  SVG of logged 2-D search trajectories

Config files are flat ``key = value`` text (``#`` starts a comment). Command
line flags override file values. Keys:

=============  =======  ==============================================
key            type     default
=============  =======  ==============================================
algorithm      str      required: ncs, phc or random
problem        str      required: builtin name or ``antenna``
budget         int      required: objective evaluations per run
dim            int      30
lower, upper   float    builtin's conventional box
transform_file path     none (shift + rotation, see ``load_transform_file``)
f_bias         float    0
runs           int      25 (``run`` always does 1)
seed           int      0; run ``k`` uses ``seed + k``
n              int      10
sigma0         float    a tenth of the bound width
r              float    0.99
epoch          int      10
bound_policy   str      reflect
sigma_min      float    1e-10 * bound width
sigma_max      float    bound width
trajectory     bool     false
output_dir     path     ``$NCS_OUTPUT_DIR`` or ``results``
elements       int      37 (antenna)
mode           str      position_only (antenna)
angle_step     float    0.2 (antenna, degrees)
=============  =======  ==============================================

Output files: ``results.csv`` (``run,seed,final_error,evaluations``),
``summary.json``, ``trajectory_run<k>.csv`` (``iteration,rls,f,x1,...,xD``),
and for antenna runs ``layout.txt`` / ``pattern.txt`` of the best run.
"""

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import antenna
from .baselines import phc_run, random_search_run
from .engine import NcsConfig, RunRecord, ncs_run
from .estimator import t_max_for_budget
from .objectives import BUILTINS, load_transform_file, make_problem
from .plotting import emit_trajectory_svg, write_layout, write_pattern
from .stats import friedman, pairwise_verdicts, top_k_table

log = logging.getLogger("ncs")

OUTPUT_ENV = "NCS_OUTPUT_DIR"
ALGORITHMS = ("ncs", "phc", "random")
RESULT_HEADER = ["run", "seed", "final_error", "evaluations"]


class ExperimentConfigError(ValueError):
    pass


class UnknownConfigKey(ExperimentConfigError):
    pass


class ConfigTypeError(ExperimentConfigError):
    pass


class MissingConfigKey(ExperimentConfigError):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    problem: str
    budget: int
    dim: int = 30
    lower: Optional[float] = None
    upper: Optional[float] = None
    transform_file: Optional[str] = None
    f_bias: float = 0.0
    runs: int = 25
    seed: int = 0
    n: int = 10
    sigma0: Optional[float] = None
    r: float = 0.99
    epoch: int = 10
    bound_policy: str = "reflect"
    sigma_min: Optional[float] = None
    sigma_max: Optional[float] = None
    trajectory: bool = False
    output_dir: Optional[str] = None
    elements: int = 37
    mode: str = antenna.POSITION_ONLY
    angle_step: float = 0.2

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigTypeError(f"config key 'algorithm': must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.problem != "antenna" and self.problem not in BUILTINS:
            raise ConfigTypeError(
                f"config key 'problem': unknown problem {self.problem!r}; "
                f"choose 'antenna' or one of {sorted(BUILTINS)}"
            )
        if self.budget < 1:
            raise ConfigTypeError("config key 'budget': must be >= 1")
        if self.runs < 1:
            raise ConfigTypeError("config key 'runs': must be >= 1")
        if self.output_dir is None:
            self.output_dir = os.environ.get(OUTPUT_ENV, "results")

    @property
    def t_max(self):
        return t_max_for_budget(self.budget, self.n)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_REQUIRED = [name for name, f in _FIELDS.items() if f.default is dataclasses.MISSING]
_TYPES = {
    "algorithm": str, "problem": str, "budget": int, "dim": int, "lower": float,
    "upper": float, "transform_file": str, "f_bias": float, "runs": int, "seed": int,
    "n": int, "sigma0": float, "r": float, "epoch": int, "bound_policy": str,
    "sigma_min": float, "sigma_max": float, "trajectory": bool, "output_dir": str,
    "elements": int, "mode": str, "angle_step": float,
}


def _coerce(key, value):
    kind = _TYPES[key]
    if value is None or isinstance(value, kind) and not (kind is int and isinstance(value, bool)):
        return value
    text = str(value).strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind is int:
            return int(text, 10)
        return kind(text)
    except ValueError:
        raise ConfigTypeError(f"config key {key!r}: expected {kind.__name__}, got {value!r}") from None


def read_config_file(path):
    """Parse a flat ``key = value`` file into a dict of strings."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExperimentConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return values


def parse_config(path=None, overrides=None, defaults=None):
    """Build an :class:`ExperimentConfig` from defaults, a file, then overrides."""
    merged = dict(defaults or {})
    if path is not None:
        merged.update(read_config_file(path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(merged) - set(_FIELDS))
    if unknown:
        raise UnknownConfigKey(f"unknown config key(s): {', '.join(repr(k) for k in unknown)}")
    missing = [k for k in _REQUIRED if k not in merged]
    if missing:
        raise MissingConfigKey(f"missing required config key(s): {', '.join(missing)}")
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in merged.items()})


def build_problem(cfg):
    if cfg.problem == "antenna":
        grid = antenna.AngleGrid(step=cfg.angle_step)
        return antenna.susaa_objective(cfg.mode, cfg.elements, grid)
    shift = rotation = None
    if cfg.transform_file:
        shift, rotation = load_transform_file(cfg.transform_file, cfg.dim)
    bounds = None
    if cfg.lower is not None or cfg.upper is not None:
        if cfg.lower is None or cfg.upper is None:
            raise ExperimentConfigError("set both 'lower' and 'upper' or neither")
        bounds = (cfg.lower, cfg.upper)
    return make_problem(cfg.problem, cfg.dim, bounds=bounds, shift=shift, rotation=rotation, f_bias=cfg.f_bias)


def engine_config(cfg, seed):
    return NcsConfig(
        t_max=cfg.t_max,
        n=cfg.n,
        sigma0=cfg.sigma0,
        r=cfg.r,
        epoch=cfg.epoch,
        seed=seed,
        bound_policy=cfg.bound_policy,
        sigma_min=cfg.sigma_min,
        sigma_max=cfg.sigma_max,
        record_trajectory=cfg.trajectory,
    )


def run_once(cfg, problem, seed):
    if cfg.algorithm == "random":
        return random_search_run(problem, cfg.budget, seed)
    runner = ncs_run if cfg.algorithm == "ncs" else phc_run
    return runner(problem, engine_config(cfg, seed))


@dataclass
class ExperimentResult:
    records: list
    errors: list
    summary: dict
    problem: object
    output_dir: Path


def write_trajectory_csv(path, record):
    d = len(record.trajectory[0][2])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "rls", "f"] + [f"x{k + 1}" for k in range(d)])
        for it, rls, x, f in record.trajectory:
            w.writerow([it, rls, repr(float(f))] + [repr(float(v)) for v in x])


def read_trajectory_csv(path):
    trajectory = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs = [float(row[k]) for k in row if k.startswith("x")]
            trajectory.append((int(row["iteration"]), int(row["rls"]), np.array(xs), float(row["f"])))
    return trajectory


def summarize(errors):
    e = np.asarray(errors, dtype=float)
    return {
        "mean_error": float(np.mean(e)),
        "std_error": float(np.std(e)),
        "min_error": float(np.min(e)),
        "max_error": float(np.max(e)),
    }


def run_experiment(cfg, runs=None):
    """Execute seeded runs and write ``results.csv`` and ``summary.json``.

    Run ``k`` uses seed ``cfg.seed + k``. The summary standard deviation is
    the population one (``ddof=0``), so a single run reports 0.
    """
    runs = cfg.runs if runs is None else runs
    problem = build_problem(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, errors = [], []
    for k in range(runs):
        seed = cfg.seed + k
        try:
            rec = run_once(cfg, problem, seed)
        except Exception as exc:
            raise RuntimeError(f"run {k} (seed {seed}) failed: {exc}") from exc
        records.append(rec)
        errors.append(problem.error(rec.best_value))
        log.info("run %d seed %d: error %.6g", k, seed, errors[-1])
        if cfg.trajectory and rec.trajectory:
            write_trajectory_csv(out / f"trajectory_run{k}.csv", rec)

    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_HEADER)
        for k, (rec, err) in enumerate(zip(records, errors)):
            w.writerow([k, cfg.seed + k, repr(float(err)), rec.evaluations_used])

    summary = {
        "algorithm": cfg.algorithm,
        "problem": problem.name,
        "dim": problem.dim,
        "budget": cfg.budget,
        "runs": runs,
        "seed": cfg.seed,
        **summarize(errors),
        "best_run": int(np.argmin(errors)),
    }
    if cfg.problem == "antenna":
        summary["unit"] = "dB"
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return ExperimentResult(records, errors, summary, problem, out)


def export_antenna(result, cfg):
    best = result.records[result.summary["best_run"]]
    enc = antenna.SusaaEncoding(cfg.mode, cfg.elements)
    layout = antenna.decode_layout(enc, best.best_solution)
    grid = antenna.AngleGrid(step=cfg.angle_step)
    theta, level = antenna.radiation_pattern_db(layout, grid)
    write_layout(result.output_dir / "layout.txt", layout)
    write_pattern(result.output_dir / "pattern.txt", theta, level)
    return layout, antenna.psll_db(layout, grid)


# ---- stats -----------------------------------------------------------------


def load_results(path):
    """``(label, problem, errors)`` from a results CSV or a directory holding one."""
    path = Path(path)
    csv_path = path / "results.csv" if path.is_dir() else path
    summary_path = csv_path.parent / "summary.json"
    label, problem = csv_path.parent.name, "problem"
    if summary_path.is_file():
        meta = json.loads(summary_path.read_text())
        label = meta.get("algorithm", label)
        problem = meta.get("problem", problem)
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_HEADER:
            raise ExperimentConfigError(f"{csv_path}: expected header {','.join(RESULT_HEADER)}")
        errors = [float(row["final_error"]) for row in reader]
    return label, problem, errors


def compare(entries, alpha=0.05):
    """Comparison tables for ``(label, problem, errors)`` entries."""
    problems = sorted({p for _, p, _ in entries})
    labels = list(dict.fromkeys(lbl for lbl, _, _ in entries))
    table = {(p, lbl): e for lbl, p, e in entries}
    rows, verdicts = [], []
    for p in problems:
        present = [lbl for lbl in labels if (p, lbl) in table]
        v = pairwise_verdicts([table[(p, lbl)] for lbl in present], alpha)
        if len(present) == len(labels):
            verdicts.append(v)
        for i, lbl in enumerate(present):
            e = np.asarray(table[(p, lbl)])
            rows.append({
                "problem": p, "algorithm": lbl, "runs": e.size,
                "mean_error": float(e.mean()), "std_error": float(e.std()),
                "wins": int((v[i] > 0).sum()), "draws": int((v[i] == 0).sum() - 1),
                "losses": int((v[i] < 0).sum()),
            })
    ranks = None
    complete = [p for p in problems if all((p, lbl) in table for lbl in labels)]
    if len(complete) >= 2 and len(labels) >= 2:
        means = [[np.mean(table[(p, lbl)]) for lbl in labels] for p in complete]
        ranks = friedman(means)
    topk = top_k_table(verdicts) if verdicts else None
    return labels, rows, ranks, topk


def _cmd_stats(args):
    entries = [load_results(p) for p in args.inputs]
    if args.labels:
        if len(args.labels) != len(entries):
            raise ExperimentConfigError("--labels needs one label per input")
        entries = [(lbl, p, e) for lbl, (_, p, e) in zip(args.labels, entries)]
    labels, rows, ranks, topk = compare(entries, args.alpha)
    lines = [f"{'problem':<24} {'algorithm':<12} {'mean':>12} {'std':>12}  w-d-l"]
    for r in rows:
        lines.append(
            f"{r['problem']:<24} {r['algorithm']:<12} {r['mean_error']:>12.4e} "
            f"{r['std_error']:>12.4e}  {r['wins']}-{r['draws']}-{r['losses']}"
        )
    if ranks is not None:
        lines.append("")
        lines.append(f"Friedman chi2 = {ranks.statistic:.4f}, p = {ranks.p_value:.4g}")
        for lbl, rk in zip(labels, ranks.avg_ranks):
            lines.append(f"  {lbl:<12} average rank {rk:.3f}")
    if topk is not None:
        lines.append("")
        lines.append("Top-K counts: " + " ".join(f"K={k + 1}" for k in range(len(labels))))
        for lbl, c in zip(labels, topk):
            lines.append(f"  {lbl:<12} " + " ".join(str(x) for x in c))
    report = "\n".join(lines)
    print(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(report + "\n")
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        if ranks is not None or topk is not None:
            with open(out / "ranks.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["algorithm", "avg_rank"] + [f"top_{k + 1}" for k in range(len(labels))])
                for i, lbl in enumerate(labels):
                    rk = "" if ranks is None else repr(float(ranks.avg_ranks[i]))
                    w.writerow([lbl, rk] + ([] if topk is None else list(topk[i])))
    return 0


# ---- argument parsing ------------------------------------------------------


def _add_experiment_flags(p):
    s = argparse.SUPPRESS
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--algorithm", choices=ALGORITHMS, default=s)
    p.add_argument("--problem", default=s)
    p.add_argument("--dim", default=s)
    p.add_argument("--budget", default=s)
    p.add_argument("--lower", default=s)
    p.add_argument("--upper", default=s)
    p.add_argument("--transform-file", dest="transform_file", default=s)
    p.add_argument("--f-bias", dest="f_bias", default=s)
    p.add_argument("--runs", default=s)
    p.add_argument("--seed", default=s)
    p.add_argument("--n", default=s, help="number of parallel local searches")
    p.add_argument("--sigma0", default=s)
    p.add_argument("--r", default=s)
    p.add_argument("--epoch", default=s)
    p.add_argument("--bound-policy", dest="bound_policy", choices=("reflect", "clamp"), default=s)
    p.add_argument("--sigma-min", dest="sigma_min", default=s)
    p.add_argument("--sigma-max", dest="sigma_max", default=s)
    p.add_argument("--trajectory", action="store_const", const="true", default=s)
    p.add_argument("--output-dir", "-o", dest="output_dir", default=s)


def _overrides(args):
    skip = {"config", "command", "func", "verbose", "svg"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _cmd_run(args, runs=None):
    cfg = parse_config(args.config, _overrides(args))
    result = run_experiment(cfg, runs=runs)
    s = result.summary
    print(f"{s['algorithm']} on {s['problem']} (D={s['dim']}): "
          f"mean error {s['mean_error']:.6g} +- {s['std_error']:.3g} over {s['runs']} run(s)")
    if getattr(args, "svg", False):
        if result.problem.dim != 2 or not result.records[0].trajectory:
            raise ExperimentConfigError("--svg needs a 2-D problem and --trajectory")
        for k, rec in enumerate(result.records):
            emit_trajectory_svg(rec, result.problem, result.output_dir / f"trajectory_run{k}.svg")
    return 0


def _cmd_antenna(args):
    defaults = {"algorithm": "ncs", "problem": "antenna", "budget": 500000, "runs": 25}
    ov = _overrides(args)
    cfg = parse_config(args.config, ov, defaults=defaults)
    result = run_experiment(cfg)
    layout, psll = export_antenna(result, cfg)
    s = result.summary
    print(f"{cfg.elements}-element {cfg.mode}: mean PSLL {s['mean_error']:.3f} dB "
          f"(best {psll:.3f} dB) over {s['runs']} run(s)")
    return 0


def _cmd_traj_plot(args):
    bounds = tuple(float(v) for v in args.bounds) if args.bounds else None
    problem = make_problem(args.problem, 2, bounds=bounds)
    traj = read_trajectory_csv(args.trajectory_csv)
    best = min(traj, key=lambda e: e[3])
    rec = RunRecord(best[2], best[3], [], 0, trajectory=traj)
    emit_trajectory_svg(rec, problem, args.output)
    print(f"wrote {args.output}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ncs", description="Negatively correlated search experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run")
    _add_experiment_flags(p)
    p.add_argument("--svg", action="store_true", help="also write the trajectory SVG (2-D only)")
    p.set_defaults(func=lambda a: _cmd_run(a, runs=1))

    p = sub.add_parser("bench", help="multiple seeded runs with summary")
    _add_experiment_flags(p)
    p.add_argument("--svg", action="store_true", help="also write trajectory SVGs (2-D only)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("antenna", help="antenna array sidelobe synthesis")
    _add_experiment_flags(p)
    p.add_argument("--elements", default=argparse.SUPPRESS)
    p.add_argument("--mode", choices=(antenna.POSITION_ONLY, antenna.POSITION_PHASE), default=argparse.SUPPRESS)
    p.add_argument("--angle-step", dest="angle_step", default=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_antenna)

    p = sub.add_parser("stats", help="compare result files")
    p.add_argument("inputs", nargs="+", help="results.csv files or their directories")
    p.add_argument("--labels", nargs="+")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="directory for report.txt / report.csv / ranks.csv")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("traj-plot", help="SVG of a 2-D trajectory file")
    p.add_argument("trajectory_csv")
    p.add_argument("--problem", required=True)
    p.add_argument("--bounds", nargs=2, metavar=("LOW", "HIGH"))
    p.add_argument("--output", "-o", default="trajectory.svg")
    p.set_defaults(func=_cmd_traj_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"ncs {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
