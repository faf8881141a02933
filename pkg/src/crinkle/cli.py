"""Command-line entry point: ``crinkle <command> [--config FILE] [flags]``.

A run is described by one YAML document (see ``docs/formats.md``) plus flag
overrides.  Every run writes ``<output>.report.json``, ``<output>.samples.csv``
and ``<output>.meta.json``; the exit status is 0 when every check passes, 2 on
a tolerance failure and 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import __version__
from .experiments import (
    DEFAULT_TOLERANCES,
    ExperimentReport,
    experiment_diameter,
    experiment_dimension,
    experiment_gh_convergence,
    experiment_heyde_tail,
    experiment_orthogonality,
    experiment_truncated_moment,
    max_sq_distance,
)
from .formats import write_partial_sums, write_range_csv
from .levy_core import StablePower, range_points, sample_jumps
from .streams import resolve_workers, seed_stream
from .walks import Family, WalkConfig, simulate_walk

COMMANDS = (
    "simulate-walk",
    "simulate-subordinator",
    "diameter",
    "orthogonality",
    "truncated-moment",
    "heyde-tail",
    "gh-convergence",
    "dimension",
)


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for tolerance failures
    def error(self, message):
        raise ConfigError(message)


# (type, default) per key; None defaults mean "not set"
_SCHEMA = {
    "command": (str, None),
    "seed": (int, 0),
    "replicates": (int, 1000),
    "workers": (int, None),
    "output": (str, "crinkle-run"),
    "walk": {
        "d": (int, 100),
        "n": (int, 200),
        "T": (float, 1.0),
        "alpha": (float, 0.5),
        "family": (str, "axis"),
        "radial_min": (float, 1.0),
        "s": (float, 0.0),
    },
    "levy": {
        "alpha": (float, None),
        "delta": (float, 1e-8),
    },
    "experiment": {
        "eps": (float, 0.1),
        "d_ladder": (list, None),
        "s_values": (list, None),
        "x_grid": (list, [1.0, 4.0]),
        "method": (str, "conditional"),
        "stratified": (bool, True),
    },
    "tolerances": (dict, {}),
}


def _coerce(value, kind, path: str):
    if value is None:
        return None
    if kind is bool:
        if isinstance(value, bool):
            return value
    elif kind is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif kind is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if isinstance(value, str):
            # YAML 1.1 reads 1e-8 (no dot) as a string
            try:
                return float(value)
            except ValueError:
                pass
    elif kind is str:
        if isinstance(value, str):
            return value
    elif kind is list:
        if isinstance(value, (list, tuple)):
            items = []
            for k, v in enumerate(value):
                item = _coerce(v, float, f"{path}[{k}]")
                items.append(int(item) if item.is_integer() and path.endswith("d_ladder") else item)
            return items
    elif kind is dict:
        if isinstance(value, dict):
            out = {}
            for k, v in value.items():
                if k not in DEFAULT_TOLERANCES:
                    raise ConfigError(f"unknown key {path}.{k}")
                out[k] = _coerce(v, float, f"{path}.{k}")
            return out
    raise ConfigError(f"{path}: expected {kind.__name__}, got {type(value).__name__} {value!r}")


def _merge(schema: dict, doc, prefix: str = "") -> dict:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{prefix or 'document'}: expected a mapping")
    for key in doc:
        if key not in schema:
            raise ConfigError(f"unknown key {prefix}{key}")
    out = {}
    for key, entry in schema.items():
        path = f"{prefix}{key}"
        if isinstance(entry, dict):
            out[key] = _merge(entry, doc.get(key), path + ".")
        else:
            kind, default = entry
            out[key] = _coerce(doc[key], kind, path) if key in doc else default
    return out


@dataclass(frozen=True)
class LevySection:
    alpha: float
    delta: float


@dataclass(frozen=True)
class ExperimentSection:
    eps: float = 0.1
    d_ladder: Optional[tuple] = None
    s_values: Optional[tuple] = None
    x_grid: tuple = (1.0, 4.0)
    method: str = "conditional"
    stratified: bool = True


@dataclass(frozen=True)
class RunConfig:
    command: str
    walk: WalkConfig
    levy: LevySection
    replicates: int = 1000
    seed: int = 0
    workers: int = 1
    output: str = "crinkle-run"
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    tolerances: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        """Nested mapping in the config-file schema; parses back to ``self``."""
        w = self.walk
        e = self.experiment
        return {
            "command": self.command,
            "seed": self.seed,
            "replicates": self.replicates,
            "workers": self.workers,
            "output": self.output,
            "walk": {"d": w.d, "n": w.n, "T": w.T, "alpha": w.alpha,
                     "family": w.family.value, "radial_min": w.radial_min, "s": w.trunc_s},
            "levy": {"alpha": self.levy.alpha, "delta": self.levy.delta},
            "experiment": {
                "eps": e.eps,
                "d_ladder": None if e.d_ladder is None else list(e.d_ladder),
                "s_values": None if e.s_values is None else list(e.s_values),
                "x_grid": list(e.x_grid),
                "method": e.method,
                "stratified": e.stratified,
            },
            "tolerances": dict(self.tolerances),
        }


def _csv_floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crinkle", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML run document")
    p.add_argument("--seed", type=int)
    p.add_argument("--replicates", type=int, help="walks, pairs or draws, per command")
    p.add_argument("--workers", type=int, help="worker processes (env CRINKLE_WORKERS)")
    p.add_argument("--output", help="output path prefix")
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--alpha", type=float, help="tail index for both walk and Lévy measure")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--radial-min", type=float)
    p.add_argument("--s", type=float, help="truncation level")
    p.add_argument("--delta", type=float, help="jump-series threshold")
    p.add_argument("--eps", type=float)
    p.add_argument("--d-ladder", type=_csv_floats, help="comma-separated dimensions")
    p.add_argument("--s-values", type=_csv_floats, help="comma-separated truncation levels")
    p.add_argument("--x-grid", type=_csv_floats, help="comma-separated tail levels")
    p.add_argument("--method", choices=["conditional", "crude"])
    p.add_argument("--no-stratify", action="store_true", help="plain Monte Carlo draws")
    p.add_argument("--tolerance", action="append", default=[], metavar="KEY=VALUE")
    return p


_FLAG_PATHS = {
    "seed": ("seed",), "replicates": ("replicates",), "workers": ("workers",),
    "output": ("output",), "d": ("walk", "d"), "n": ("walk", "n"), "T": ("walk", "T"),
    "family": ("walk", "family"), "radial_min": ("walk", "radial_min"), "s": ("walk", "s"),
    "delta": ("levy", "delta"), "eps": ("experiment", "eps"),
    "d_ladder": ("experiment", "d_ladder"), "s_values": ("experiment", "s_values"),
    "x_grid": ("experiment", "x_grid"), "method": ("experiment", "method"),
}


def _overrides(args: argparse.Namespace) -> dict:
    doc: dict = {"command": args.command}
    for name, path in _FLAG_PATHS.items():
        value = getattr(args, name)
        if value is None:
            continue
        target = doc
        for part in path[:-1]:
            target = target.setdefault(part, {})
        target[path[-1]] = value
    if args.alpha is not None:
        doc.setdefault("walk", {})["alpha"] = args.alpha
        doc.setdefault("levy", {})["alpha"] = args.alpha
    if args.no_stratify:
        doc.setdefault("experiment", {})["stratified"] = False
    for item in args.tolerance:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tolerance expects KEY=VALUE, got {item!r}")
        doc.setdefault("tolerances", {})[key] = value
    return doc


def _deep_update(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_update(out[key], value)
        else:
            out[key] = value
    return out


def parse_config(text: str = "", argv: Sequence[str] = ()) -> RunConfig:
    """Build a :class:`RunConfig` from a YAML document and command-line flags.

    ``argv`` holds the command name and flags (no program name).  Flags win
    over document values; an empty ``argv`` requires ``command`` in the
    document.
    """
    try:
        doc = yaml.safe_load(text) if text and text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    _merge(_SCHEMA, doc)  # reject unknown keys and bad types before overrides
    if argv:
        args = build_parser().parse_args(list(argv))
        doc = _deep_update(doc, _overrides(args))
    values = _merge(_SCHEMA, doc)
    command = values["command"]
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}; got {command!r}")
    w = values["walk"]
    try:
        family = Family(w["family"])
    except ValueError:
        raise ConfigError(f"walk.family: unknown family {w['family']!r}") from None
    alpha = w["alpha"]
    levy_alpha = values["levy"]["alpha"] if values["levy"]["alpha"] is not None else alpha
    for path, a in (("walk.alpha", alpha), ("levy.alpha", levy_alpha)):
        if not 0.0 < a < 1.0:
            raise ConfigError(f"{path} must lie in (0, 1), got {a}")
    if values["replicates"] < 1:
        raise ConfigError("replicates must be >= 1")
    try:
        workers = resolve_workers(values["workers"])
        walk = WalkConfig(d=w["d"], n=w["n"], T=w["T"], alpha=alpha, family=family,
                          radial_min=w["radial_min"], trunc_s=w["s"], seed=values["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if values["levy"]["delta"] <= 0:
        raise ConfigError("levy.delta must be positive")
    e = values["experiment"]
    if e["method"] not in ("conditional", "crude"):
        raise ConfigError(f"experiment.method: unknown method {e['method']!r}")
    experiment = ExperimentSection(
        eps=e["eps"],
        d_ladder=None if e["d_ladder"] is None else tuple(int(d) for d in e["d_ladder"]),
        s_values=None if e["s_values"] is None else tuple(e["s_values"]),
        x_grid=tuple(e["x_grid"]),
        method=e["method"],
        stratified=e["stratified"],
    )
    return RunConfig(
        command=command,
        walk=walk,
        levy=LevySection(levy_alpha, values["levy"]["delta"]),
        replicates=values["replicates"],
        seed=values["seed"],
        workers=workers,
        output=values["output"],
        experiment=experiment,
        tolerances=dict(values["tolerances"]),
    )


def _simulate_walk(cfg: RunConfig, prefix: str) -> ExperimentReport:
    path = simulate_walk(cfg.walk, seed_stream(cfg.seed, 0))
    report = ExperimentReport("simulate-walk", cfg.to_document()["walk"] | {"seed": cfg.seed})
    report.add_statistic("steps", cfg.walk.steps, 1)
    report.add_statistic("a_n", cfg.walk.a_n, 1)
    report.add_statistic("max_norm_sq", float(path.step_norms_sq.max(initial=0.0)), 1)
    report.add_statistic("diam_sq_scaled", max_sq_distance(path.partial_sums) / path.a_n, 1)
    report.add_statistic("stored_columns", path.partial_sums.shape[1], 1)
    write_partial_sums(path, f"{prefix}.partial_sums.bin")
    report.samples = {
        "k": list(range(1, cfg.walk.steps + 1)),
        "norm_sq": path.step_norms_sq.tolist(),
    }
    return report


def _simulate_subordinator(cfg: RunConfig, prefix: str) -> ExperimentReport:
    measure = StablePower(cfg.levy.alpha)
    T, delta = cfg.walk.T, cfg.levy.delta
    jumps = sample_jumps(measure, T, delta, seed_stream(cfg.seed, 0))
    report = ExperimentReport(
        "simulate-subordinator",
        {"alpha": cfg.levy.alpha, "T": T, "delta": delta, "seed": cfg.seed},
    )
    report.add_statistic("atoms", len(jumps), 1, expected=T * measure.tail(delta))
    report.add_statistic("S_T_jumps", jumps.total, 1)
    report.add_statistic("S_T_compensated", jumps.total + T * measure.small_jump_mean(delta), 1)
    write_range_csv(range_points(jumps), f"{prefix}.range.csv")
    report.samples = {"x": jumps.times.tolist(), "y": jumps.sizes.tolist()}
    return report


def _dispatch(cfg: RunConfig, prefix: str) -> ExperimentReport:
    e, tol, workers = cfg.experiment, cfg.tolerances, cfg.workers
    if cfg.command == "simulate-walk":
        return _simulate_walk(cfg, prefix)
    if cfg.command == "simulate-subordinator":
        return _simulate_subordinator(cfg, prefix)
    if cfg.command == "diameter":
        return experiment_diameter(cfg.walk, cfg.replicates, delta=cfg.levy.delta,
                                   workers=workers, tolerances=tol)
    if cfg.command == "orthogonality":
        return experiment_orthogonality(cfg.walk, cfg.replicates, eps=e.eps,
                                        d_ladder=e.d_ladder, workers=workers, tolerances=tol)
    if cfg.command == "truncated-moment":
        return experiment_truncated_moment(cfg.walk, cfg.replicates, s_values=e.s_values,
                                           stratified=e.stratified, workers=workers,
                                           tolerances=tol)
    if cfg.command == "heyde-tail":
        return experiment_heyde_tail(cfg.levy.alpha, cfg.walk.d, cfg.walk.n, e.x_grid,
                                     cfg.replicates, seed=cfg.seed, method=e.method,
                                     workers=workers, tolerances=tol)
    if cfg.command == "gh-convergence":
        return experiment_gh_convergence(cfg.walk, cfg.replicates, d_ladder=e.d_ladder,
                                         workers=workers, tolerances=tol)
    return experiment_dimension(cfg.levy.alpha, cfg.replicates, T=cfg.walk.T,
                                delta=cfg.levy.delta, seed=cfg.seed, workers=workers,
                                tolerances=tol)


def run(cfg: RunConfig) -> int:
    """Execute ``cfg`` and write its artifacts; returns the exit status."""
    started = time.perf_counter()
    prefix = cfg.output
    try:
        Path(prefix).parent.mkdir(parents=True, exist_ok=True)
        report = _dispatch(cfg, prefix)
        Path(f"{prefix}.report.json").write_text(report.to_json())
        Path(f"{prefix}.samples.csv").write_text(report.samples_csv())
        meta = {
            "config": cfg.to_document(),
            "version": __version__,
            "wall_time_seconds": time.perf_counter() - started,
        }
        Path(f"{prefix}.meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"crinkle {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    for name, check in report.checks.items():
        if not check["passed"]:
            print(f"crinkle {cfg.command}: check {name} failed: "
                  f"value {check['value']} vs tolerance {check['tolerance']}", file=sys.stderr)
    for warning in report.warnings:
        print(f"crinkle {cfg.command}: warning: {warning}", file=sys.stderr)
    return 0 if report.passed else 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        text = Path(known.config).read_text() if known.config else ""
        cfg = parse_config(text, argv)
    except (OSError, ConfigError) as exc:
        print(f"crinkle: error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
