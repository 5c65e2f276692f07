"""Command-line entry point for the qutrit holonomy experiments."""

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from qutrit_holonomy import __version__
from qutrit_holonomy.core.errors import NumericalError, ValidationFailure
from qutrit_holonomy.experiments import EXPERIMENT_MAPPING, ResultTable
from qutrit_holonomy.experiments.tables import format_cell
from qutrit_holonomy.settings import BLOCH_STATES, AppConfig, get_config, load_config, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
MAX_PRINTED_ROWS = 40


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qutrit-holonomy", description="Qutrit holonomic gate experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=Path, dest="config", default=None, help="Experiment config file (YAML)")
    shared.add_argument("--output", type=Path, dest="output", default=None, help="Directory for result files")
    shared.add_argument("--seed", type=int, dest="seed", default=None, help="Seed of the shot sampler")
    shared.add_argument("--exact", action="store_true", help="Use exact probabilities instead of sampled shots")
    shared.add_argument("--no-noise", action="store_true", dest="no_noise", help="Disable the master equation")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, experiment in EXPERIMENT_MAPPING.items():
        summary = experiment.description.strip().splitlines()[0]
        subparser = subparsers.add_parser(name, parents=[shared], help=summary, description=summary)
        if name == "bloch":
            subparser.add_argument("--initial", choices=sorted(BLOCH_STATES), default=None, help="Initial state")
        if name == "tomography":
            subparser.add_argument("--records", type=Path, required=True, help="Measurement records JSON file")
    return parser


def resolve_config(args: argparse.Namespace) -> AppConfig:
    """Config file (or APP_CONFIG / defaults) with the command-line overrides applied."""
    config = load_config(args.config) if args.config is not None else get_config()
    tomography, noise, execution = {}, {}, {}
    if args.seed is not None:
        tomography["seed"] = args.seed
    if args.exact:
        tomography["shots"] = None
    if args.no_noise:
        noise["enabled"] = False
    if args.output is not None:
        execution["output_dir"] = str(args.output)
    update = {
        "tomography": config.tomography.model_copy(update=tomography),
        "noise": config.noise.model_copy(update=noise),
        "execution": config.execution.model_copy(update=execution),
    }
    if getattr(args, "initial", None) is not None:
        update["bloch"] = config.bloch.model_copy(update={"initial": args.initial})
    return config.model_copy(update=update)


def render(table: ResultTable, console: Console) -> None:
    view = Table(title=table.name, show_lines=False)
    for column in table.columns:
        view.add_column(column, justify="left" if column in ("model", "sequence", "operator") else "right")
    for row in table.rows[:MAX_PRINTED_ROWS]:
        view.add_row(*(_short(value) for value in row))
    console.print(view)
    if len(table.rows) > MAX_PRINTED_ROWS:
        console.print(f"... {len(table.rows) - MAX_PRINTED_ROWS} more rows in {table.name}.csv")
    for key, value in table.summary.items():
        console.print(f"[bold]{key}[/bold]: {value}")


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return format_cell(value)


def main(argv: list[str] | None = None) -> int:
    """Run one experiment; returns the process exit code."""
    args = build_parser().parse_args(argv)
    console = Console()
    try:
        config = resolve_config(args)
        setup_logging(config)
        experiment_class = EXPERIMENT_MAPPING[args.command]
        extra = {"records_path": args.records} if args.command == "tomography" else {}
        experiment = experiment_class(config=config, **extra)
        table = experiment.run()
        render(table, console)
        files = experiment.save(table, config.execution.output_dir)
        console.print(f"💾 {len(files)} files written to {config.execution.output_dir}")
    except (ValidationFailure, ValidationError, FileNotFoundError) as e:
        logger.error(f"❌ {e}")
        console.print(f"[red]❌ {e}[/red]")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"❌ Numerical failure: {e}")
        console.print(f"[red]❌ Numerical failure: {e}[/red]")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
