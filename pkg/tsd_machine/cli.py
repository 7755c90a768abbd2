import argparse
import logging
import sys
from pathlib import Path

from tsd_machine.bench import run_benchmark, run_fuzz
from tsd_machine.common.errors import ComponentError, ComponentParserError, TsdError, ValidityError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.pipeline import Pipeline
from tsd_machine.tsd_types import Final, FuelExhausted, RunConfig, RunData, Schedule, ValidateLevel, default_fuel

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_STUCK, EXIT_FUEL, EXIT_INVALID = 0, 1, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1, 2 is reserved for stuck runs."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument("file", type=Path, help="Program file (.tsd).")
    parser.add_argument("--fuel", type=int, default=None,
                        help="Maximum machine transitions (default: TSD_FUEL or 10^7).")
    parser.add_argument("--schedule", type=str, default="rr", metavar="{rr,rand:<seed>,par:<k>}",
                        help="Order in which prop tokens advance during a step.")
    parser.add_argument("--validate", type=str, default="off", choices=[str(v) for v in ValidateLevel],
                        help="Run the validity checks after every transition or after every step.")
    parser.add_argument("--step-returns-bool", action="store_true",
                        help="step returns 1 if any cell changed and 0 otherwise, instead of the count.")


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="tsd", description="Token-guided graph rewriting machine for "
                                                      "transparent synchronous dataflow programs.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")
    parser.add_argument("--list_components", action="store_true", help="List all available pipeline stages.")
    commands = parser.add_subparsers(dest="command")

    run = commands.add_parser("run", help="Run a program and print its peeked values or final value.")
    _add_run_options(run)
    run.add_argument("--trace", type=Path, default=None, help="Also write the JSONL trace to this file.")
    run.add_argument("--dot", type=Path, default=None, help="Also write the final graph as DOT to this file.")
    run.add_argument("--dump-initial-dot", type=Path, default=None, help="Write the initial graph as DOT.")
    run.add_argument("--stats", action="store_true", help="Print transition counts.")

    trace = commands.add_parser("trace", help="Run a program and write one JSON line per transition.")
    _add_run_options(trace)
    trace.add_argument("--out", type=Path, default=None, help="Trace file (default: standard output).")

    dot = commands.add_parser("dot", help="Print the graph of a program as DOT.")
    _add_run_options(dot)
    dot.add_argument("--at-step", type=int, default=None, help="Render the graph after this many transitions.")

    lint = commands.add_parser("lint", help="Check the translated graph of a program.")
    lint.add_argument("file", type=Path, help="Program file (.tsd).")
    lint.add_argument("--force-cycles", action="store_true", help="Check cycles even on very large graphs.")

    diff = commands.add_parser("diff", help="Compare the machine with the reference evaluator on a program.")
    _add_run_options(diff)

    fuzz = commands.add_parser("fuzz", help="Compare the machine with the reference evaluator on random programs.")
    fuzz.add_argument("--count", type=int, default=100)
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--max-depth", type=int, default=6)
    fuzz.add_argument("--max-cells", type=int, default=8)
    fuzz.add_argument("--workers", type=int, default=1)
    fuzz.add_argument("--recursive", action="store_true", help="Build every program around a recursive function.")

    bench = commands.add_parser("bench", help="Count transitions of benchmark programs of growing size.")
    bench.add_argument("--shape", type=str, default="chain",
                       choices=["chain", "tree", "field", "fold", "map", "alt-sum"])
    bench.add_argument("--sizes", type=str, default="100,1000,10000", help="Comma separated sizes.")
    bench.add_argument("--steps", type=int, default=1, help="step commands per program.")
    bench.add_argument("--csv", type=Path, default=None, help="Write the table as CSV.")
    bench.add_argument("--workers", type=int, default=1)

    pipeline = commands.add_parser("pipeline", help="Run a custom pipeline of stages.")
    pipeline.add_argument("--component", action="append", metavar="ComponentName[arg1=val2,arg2=val2]",
                          help="Stage of the pipeline (can be used multiple times). "
                               "If you prepend ComponentName with '!' it will not be run (only setup will be executed).")
    return parser


def run_from_cli(argv: list[str] | None = None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    if args.list_components:
        list_available_components()
        sys.exit(EXIT_OK)
    if args.command is None:
        parser.error("a command is required unless --list_components is specified")

    try:
        match args.command:
            case "fuzz":
                sys.exit(EXIT_OK if run_fuzz(args.count, args.seed, args.max_depth, args.max_cells, args.workers,
                                           args.recursive) else EXIT_STUCK)
            case "bench":
                sizes = [int(size) for size in args.sizes.split(",") if size.strip()]
                run_benchmark(args.shape, sizes, args.steps, args.csv, args.workers)
                sys.exit(EXIT_OK)
        config = _config_from_args(args)
        component_strings = _component_strings(args)
        if not component_strings:
            parser.error("At least one --component must be specified for a custom pipeline")
        pipeline = Pipeline.from_component_strings(component_strings)
        data = pipeline.setup_and_run(RunData(config=config, source_path=getattr(args, "file", None)))
    except ValidityError as e:
        logger.error("validity violation: %s", e)
        sys.exit(EXIT_INVALID)
    except (ComponentParserError, ComponentError, TsdError, OSError) as e:
        print(e, file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except ValueError as e:
        parser.error(str(e))

    sys.exit(exit_code(data))


def exit_code(data: RunData) -> int:
    if data.validity is not None and not data.validity.passed:
        return EXIT_INVALID
    agreement = data.additional_attributes.get("agreement")
    if agreement is not None and not agreement["agree"]:
        return EXIT_STUCK
    if data.outcome is None or isinstance(data.outcome, Final):
        return EXIT_OK
    return EXIT_FUEL if isinstance(data.outcome, FuelExhausted) else EXIT_STUCK


def _config_from_args(args) -> RunConfig:
    if not hasattr(args, "fuel"):
        return RunConfig()
    return RunConfig(fuel=args.fuel if args.fuel is not None else default_fuel(),
                     schedule=Schedule.parse(args.schedule),
                     validate_level=ValidateLevel(args.validate),
                     step_returns_bool=args.step_returns_bool,
                     trace_path=getattr(args, "trace", None) or getattr(args, "out", None),
                     dot_path=getattr(args, "dot", None),
                     initial_dot_path=getattr(args, "dump_initial_dot", None))


def _component_strings(args) -> list[str]:
    """Stage list of a subcommand."""
    if args.command == "pipeline":
        return args.component or []
    front = ["load_program", "parse", "typecheck", "translate"]
    match args.command:
        case "run":
            stages = front
            if args.dump_initial_dot:
                stages = stages + ["export_dot[initial=true]"]
            stages = stages + ["run_machine", f"print_outcome[stats={str(args.stats).lower()}]"]
            if args.trace:
                stages.append("save_trace")
            if args.dot:
                stages.append("export_dot")
            return stages
        case "trace":
            return front + ["run_machine[trace=true]", "save_trace"]
        case "dot":
            return front + [f"export_dot[at_step={args.at_step}]" if args.at_step is not None else "export_dot"]
        case "lint":
            return front + [f"lint_graph[force_cycles={str(args.force_cycles).lower()}]"]
        case "diff":
            return front[:3] + ["differential_check"]
    return []


def list_available_components():
    """
    List all available pipeline stages.
    """
    names = ComponentsRegister.names()
    print(f"Available components ({len(names)} total):\n")
    for name in names:
        print(f"{name}:\n\t{ComponentsRegister.get_component(name).get_help()}\n")


if __name__ == "__main__":
    run_from_cli()
