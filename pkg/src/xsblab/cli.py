"""Command-line harness: one subcommand per experiment.

Exit codes: 0 all verdicts pass, 2 incomplete (partial per-point failures
or censoring), 1 hard error (bad config, solver failure).  Worker count is
capped by the XSB_LAB_THREADS environment variable or --threads.
"""

from __future__ import annotations

import sys

import click

from .errors import XsbLabError
from .experiments import CATALOG
from .harness import ExperimentConfig, load_config, parse_override, run_experiment

_SUBCOMMANDS = {
    "counterexample": "counterexample_scaling",
    "lemmas": "lemma_suite",
    "bound-scan": "uniform_bound",
    "trilinear": "trilinear_search",
    "evolve": "evolve",
    "picard": "picard_vs_splitstep",
    "dependence": "continuous_dependence",
    "existence-time": "existence_time",
}


def _print_catalog(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo("experiments:")
    for sub, name in _SUBCOMMANDS.items():
        click.echo(f"  {sub:16s} {name}: {CATALOG[name]}")
    ctx.exit(0)


@click.group(name="xsb-lab")
@click.option(
    "--list",
    "list_",
    is_flag=True,
    callback=_print_catalog,
    expose_value=False,
    is_eager=True,
    help="Print the experiment catalog and exit.",
)
def main():
    """Numerical laboratory for space-time weighted norms, a scaling
    counterexample, resonance-integral bounds, and two cross-validated
    solvers of a third-order cubic Schrodinger-type equation."""


def _run(experiment: str, config_path, seed, output, sets, threads):
    try:
        if config_path:
            cfg = load_config(config_path, experiment=experiment)
            if cfg.experiment != experiment:
                raise XsbLabError(
                    f"config file names experiment {cfg.experiment!r}, subcommand expects {experiment!r}"
                )
        else:
            cfg = ExperimentConfig(experiment=experiment)
        overrides = dict(parse_override(s) for s in sets)
        cfg = cfg.with_overrides(overrides)
        if seed is not None:
            cfg = ExperimentConfig(cfg.experiment, cfg.parameters, seed, cfg.output_dir)
        if output is not None:
            cfg = ExperimentConfig(cfg.experiment, cfg.parameters, cfg.seed, output)
        bundle = run_experiment(cfg, workers=threads)
    except XsbLabError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"bundle: {bundle.path}")
    for name, ok in sorted(bundle.summary.get("verdicts", {}).items()):
        click.echo(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    if bundle.incomplete:
        click.echo("  (incomplete: some points failed or were censored)")
        sys.exit(2)
    if bundle.passed or not bundle.summary.get("verdicts"):
        sys.exit(0)
    sys.exit(1)


def _register(sub: str, experiment: str):
    @main.command(name=sub, help=CATALOG[experiment])
    @click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="TOML or JSON experiment file.")
    @click.option("--seed", type=int, default=None, help="Override the RNG seed.")
    @click.option("--output", type=click.Path(), default=None, help="Output directory for the bundle.")
    @click.option("--set", "sets", multiple=True, help="Parameter override key=value (repeatable).")
    @click.option("--threads", type=int, default=None, help="Worker cap (default: XSB_LAB_THREADS or CPU count).")
    def _cmd(config_path, seed, output, sets, threads):
        _run(experiment, config_path, seed, output, sets, threads)


for _sub, _exp in _SUBCOMMANDS.items():
    _register(_sub, _exp)


if __name__ == "__main__":
    main()
