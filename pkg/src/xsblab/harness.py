"""Experiment configuration, report bundles, and reproducibility plumbing."""

from __future__ import annotations

import json
import os
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

THREADS_ENV = "XSB_LAB_THREADS"


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def pmap(fn, items, workers: int | None = None):
    """Order-preserving parallel map over independent tasks."""
    n = worker_count(workers)
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        params = dict(self.parameters)
        params.update(overrides)
        return ExperimentConfig(self.experiment, params, self.seed, self.output_dir)


def _parse_scalar(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    try:
        return int(low)
    except ValueError:
        pass
    try:
        return float(low)
    except ValueError:
        pass
    if "," in low:
        return [_parse_scalar(p) for p in low.split(",") if p.strip()]
    return low


def parse_override(text: str) -> tuple[str, object]:
    """'key=value' strings from the command line; lists are comma separated."""
    if "=" not in text:
        raise ValidationError([f"override {text!r} is not of the form key=value"])
    key, _, raw = text.partition("=")
    return key.strip(), _parse_scalar(raw)


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    """Read a TOML (default) or JSON experiment file."""
    p = Path(path)
    raw = p.read_bytes()
    if p.suffix == ".json" or raw.lstrip().startswith(b"{"):
        doc = json.loads(raw.decode())
    else:
        try:
            import tomllib  # py >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        doc = tomllib.loads(raw.decode())
    exp = doc.get("experiment", experiment)
    if isinstance(exp, dict):  # [experiment] table form
        name = exp.get("name", experiment)
        seed = int(exp.get("seed", 0))
        out = exp.get("output_dir", "out")
    else:
        name = exp
        seed = int(doc.get("seed", 0))
        out = doc.get("output_dir", "out")
    if name is None:
        raise ValidationError(["config does not name an experiment"])
    params = dict(doc.get("parameters", {}))
    return ExperimentConfig(experiment=str(name), parameters=params, seed=seed, output_dir=str(out))


# -- bundles -------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def rows_to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def emit_plotdata(series: dict, path) -> None:
    """Whitespace-separated columns with '# key=value' header comments.

    series: {'x': [...], 'y': [...], 'meta': {...}}.
    """
    xs = series.get("x", [])
    ys = series.get("y", [])
    if len(xs) == 0 or len(xs) != len(ys):
        raise ValidationError(["plot series must be nonempty with matching x/y lengths"])
    with open(path, "w") as fh:
        for k, v in sorted(series.get("meta", {}).items()):
            fh.write(f"# {k}={_fmt(v)}\n")
        for x, y in zip(xs, ys):
            fh.write(f"{_fmt(x)} {_fmt(y)}\n")


def parse_plotdata(path) -> dict:
    meta, xs, ys = {}, [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k.strip()] = _parse_scalar(v)
            continue
        if line.strip():
            a, b = line.split()
            xs.append(float(a))
            ys.append(float(b))
    return {"x": xs, "y": ys, "meta": meta}


@dataclass
class ReportBundle:
    """summary.json + CSV tables + plot-data files, written atomically."""

    summary: dict
    tables: dict = field(default_factory=dict)  # name -> (columns, rows)
    plotdata: dict = field(default_factory=dict)  # name -> series
    path: Path | None = None

    @property
    def passed(self) -> bool:
        verdicts = self.summary.get("verdicts", {})
        return bool(verdicts) and all(verdicts.values())

    @property
    def incomplete(self) -> bool:
        return bool(self.summary.get("incomplete", False))

    def write(self, out_dir) -> Path:
        out_dir = Path(out_dir)
        out_dir.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=".bundle-", dir=out_dir.parent))
        try:
            with open(tmp / "summary.json", "w") as fh:
                json.dump(self.summary, fh, indent=2, sort_keys=True, default=_fmt)
                fh.write("\n")
            for name, (columns, rows) in self.tables.items():
                (tmp / f"{name}.csv").write_text(rows_to_csv(columns, rows))
            if self.plotdata:
                (tmp / "plots").mkdir()
                for name, series in self.plotdata.items():
                    emit_plotdata(series, tmp / "plots" / f"{name}.dat")
            if out_dir.exists():
                shutil.rmtree(out_dir)
            os.replace(tmp, out_dir)
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        self.path = out_dir
        return out_dir


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ReportBundle:
    """Validate, dispatch to the owning module, write the bundle atomically."""
    from . import experiments

    runner = experiments.RUNNERS.get(config.experiment)
    if runner is None:
        known = ", ".join(sorted(experiments.RUNNERS))
        raise ValidationError([f"unknown experiment {config.experiment!r} (known: {known})"])
    bundle = runner(config, workers=workers)
    bundle.summary["config"] = {
        "experiment": config.experiment,
        "parameters": config.parameters,
        "seed": config.seed,
        "output_dir": config.output_dir,
    }
    out = Path(config.output_dir) / config.experiment
    bundle.write(out)
    return bundle
