"""
Command-line entry point for the subsequence bench.
"""
import logging
import sys
from typing import Optional, Sequence

import click

import config
from handlers import (
    EXIT_CONFIG,
    build_seq_handler,
    error_handler,
    export_handler,
    gen_params_handler,
    ops_test_handler,
    run_handler,
    simulate_handler,
    verify_handler,
)

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL, logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )


def _run_config(ctx: click.Context, needs_seed: bool = False) -> config.RunConfig:
    opts = ctx.obj
    cfg = config.load_run_config(opts["config"], opts["overrides"])
    return cfg.validate(needs_seed=needs_seed)


@click.group()
@click.option("--profile", type=click.Choice(["faithful", "demo"]), default=None, help="Constant table.")
@click.option("--horizon", type=int, default=None, help="Number of blocks M.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="key = value experiment file.")
@click.option("--seed", type=int, default=None, help="64-bit seed for randomized runs.")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory; stdout when unset.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None, help="Report format.")
@click.option("--workers", type=int, default=None, help="Worker threads.")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def bench(ctx, profile, horizon, config_path, seed, out, fmt, workers, verbose):
    """Build and check the zero-density sequence, its operators and averages."""
    setup_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["config"] = config_path
    ctx.obj["overrides"] = {
        "profile": profile, "horizon": horizon, "seed": seed,
        "out": out, "format": fmt, "workers": workers,
    }


@bench.command("gen-params")
@click.pass_context
def gen_params(ctx):
    """Write the parameter ledger as JSON."""
    return run_handler(gen_params_handler, _run_config(ctx))


@bench.command("build-seq")
@click.option("--ledger", "ledger_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def build_seq(ctx, ledger_path):
    """Write the sequence (one integer per line) and block summaries."""
    return run_handler(build_seq_handler, _run_config(ctx), ledger_path)


@bench.command("verify")
@click.option("--ledger", "ledger_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def verify(ctx, ledger_path):
    """Check the ledger, the blocks and the count bounds."""
    return run_handler(verify_handler, _run_config(ctx), ledger_path)


@bench.command("ops-test")
@click.option("--trials", type=int, default=None, help="Trials per battery.")
@click.pass_context
def ops_test(ctx, trials):
    """Run the seeded operator batteries."""
    ctx.obj["overrides"]["trials"] = trials
    return run_handler(ops_test_handler, _run_config(ctx, needs_seed=True))


@bench.command("simulate")
@click.option("--ledger", "ledger_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def simulate(ctx, ledger_path):
    """Run the convergence experiment described by the config file."""
    return run_handler(simulate_handler, _run_config(ctx), ledger_path)


@bench.command("export")
@click.argument("source", type=click.Path(dir_okay=False))
@click.pass_context
def export(ctx, source):
    """Convert JSON-lines results to CSV or JSON plot data."""
    return run_handler(export_handler, _run_config(ctx), source)


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    try:
        result = bench.main(args=list(argv) if argv is not None else None,
                            prog_name="subseq-bench", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return EXIT_CONFIG
    except click.Abort:
        return EXIT_CONFIG
    except Exception as e:
        return error_handler(e)
    return result if isinstance(result, int) else 0


if __name__ == '__main__':
    sys.exit(cli())
