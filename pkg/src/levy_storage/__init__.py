COMMANDS = ("simulate", "estimate", "consistency", "coverage", "resample", "figures")


def run(command: str, config, out: str) -> list[str]:
    """Runs one command on a validated config and writes its CSV output.

    Returns:
        The paths written.
    """
    from .service import (run_consistency, run_coverage, run_estimate, run_figures, run_resampling, run_simulate,
                          write_grid, write_report)

    if command == "simulate":
        grid, metadata = run_simulate(config)
        return write_grid(grid, metadata, out)

    runners = {
        "estimate": run_estimate,
        "consistency": run_consistency,
        "coverage": run_coverage,
        "resample": run_resampling,
        "figures": run_figures,
    }
    return write_report(runners[command](config), out)


def main(argv: list[str] | None = None) -> int:
    """Levy Storage Toolkit Main Entry Point"""

    import argparse
    import sys

    from .logger import get_logger
    from .properties import ExperimentProperties, with_overrides
    from .schema.exceptions import ToolkitError

    parser = argparse.ArgumentParser(
        prog="levy-storage",
        description="Levy Storage Toolkit: simulate Levy-driven storage workloads and estimate their Laplace exponent "
                    "from probed samples"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "simulate": "Simulate one path and write its grid observations",
        "estimate": "Estimate the exponent with confidence intervals on one path",
        "consistency": "Estimates along growing horizons and several grid widths",
        "coverage": "Confidence interval coverage over independent replications",
        "resample": "Resampling estimator for several resample sizes",
        "figures": "Data sets of the estimate, interval and resampling figures",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        sub.add_argument("--config", type=str, help="Path to the config file")
        sub.add_argument("--seed", type=int, help="Master seed, overrides the config")
        sub.add_argument("--out", type=str, help=f"Output CSV path (default: {command}.csv)")
        sub.add_argument("--threads", type=int, help="Worker threads, overrides the config")

    args = parser.parse_args(argv)
    log = get_logger()

    try:
        config = ExperimentProperties().load(args.config)
        config = with_overrides(config, seed=args.seed, threads=args.threads)
        written = run(args.command, config, args.out or f"{args.command}.csv")
    except ToolkitError as e:
        log.error(f"{args.command} failed: {e}.")
        print(f"levy-storage {args.command}: {e}", file=sys.stderr)
        return e.code or 1

    log.info(f"{args.command} finished: {', '.join(written)}.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
