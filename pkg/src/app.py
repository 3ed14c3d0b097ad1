"""Command-line front end: price, survival, fig2 and verify"""
import argparse
import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional

import pandas as pd
from dotenv import load_dotenv
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from engines import pricing
from engines.mc_oracle import Barrier, Estimator, MonteCarloOracle, SimulationPlan
from engines.survival import corridor_curve
from models.run_config import RunConfig
from orchestrator import VerificationOrchestrator
from tools.csv_export import CONVERGENCE_COLUMNS, PRICE_COLUMNS, SURVIVAL_COLUMNS, write_csv
from utils.errors import (ConfigError, CtrwError, DomainError, ExcessiveCensoring,
                          InfeasibleRiskNeutral, InsufficientPower, InversionUnstable)
from utils.log import configure_logging
from utils.parsers import load_config_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

console = Console()
err_console = Console(stderr=True, soft_wrap=True)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override its values")
    common.add_argument("--rho", type=float, help="decay rate of up jumps")
    common.add_argument("--gamma", type=float, help="decay rate of down jumps")
    common.add_argument("--r", type=float, help="risk-free rate")
    common.add_argument("--spot", type=float, help="spot price S0")
    common.add_argument("--strike", type=float, help="strike K, or threshold K0 for binaries")
    common.add_argument("--lambda", dest="lambda", help="transaction rate, or 'auto' for the martingale rate")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--n-paths", "--paths", dest="n_paths", type=float, help="Monte Carlo path count")
    common.add_argument("--out", help="CSV destination (default stdout)")
    common.add_argument("--precision", type=int, help="significant digits in CSV output")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ctrw",
        description="Perpetual American options under a continuous-time random walk market",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    price = sub.add_parser("price", parents=[common], help="price one contract")
    kind = price.add_mutually_exclusive_group()
    kind.add_argument("--put", action="store_true", help="put (default)")
    kind.add_argument("--call", action="store_true", help="call")
    price.add_argument("--binary", action="store_true", help="binary payoff instead of vanilla")
    price.add_argument("--csv", action="store_true", default=None, help="emit a CSV row")

    survival = sub.add_parser("survival", parents=[common], help="survival curve with Monte Carlo frequencies")
    survival.add_argument("--threshold", type=float, help="one-sided threshold price K0 (default: strike)")
    survival.add_argument("--side", choices=["up", "down"], help="crossing direction")
    survival.add_argument("--lower", type=float, help="corridor lower price level")
    survival.add_argument("--upper", type=float, help="corridor upper price level")
    survival.add_argument("--times", help="'1,10,100' or 'start:stop:step'")

    fig2 = sub.add_parser("fig2", parents=[common], help="put prices converging to Black-Scholes")
    fig2.add_argument("--sigma", type=float, help="Black-Scholes volatility")
    fig2.add_argument("--rhos", help="comma list of rho values")
    fig2.add_argument("--moneyness", help="'0.9,1,1.1' or 'start:stop:step'")
    fig2.add_argument("--strike-normalized", dest="strike_normalized",
                      action=argparse.BooleanOptionalAction, default=None,
                      help="report prices per unit strike (default on)")

    verify = sub.add_parser("verify", parents=[common], help="Monte Carlo versus closed-form suite")
    verify.add_argument("--json", action="store_true", help="one JSON line per check")
    verify.add_argument("--checks", help="comma list of check names (default all)")
    return parser


def collect_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Merge config-file values with command-line flags (flags win)

    Args:
        args: Parsed arguments

    Returns:
        Raw mapping for RunConfig.from_mapping
    """
    values: Dict[str, Any] = {}
    if args.config:
        values.update(load_config_file(args.config))

    skip = {"command", "config", "verbose", "put", "call", "binary", "json", "checks"}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            values[key] = value

    if args.command == "price" and (args.put or args.call or args.binary or "payoff" not in values):
        style = "binary" if args.binary else "vanilla"
        values["payoff"] = f"{style}_{'call' if args.call else 'put'}"
    return values


def _fmt(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isinf(value)):
        return "never"
    return f"{value:.6f}"


def cmd_price(cfg: RunConfig) -> int:
    """Price one contract and print price, boundary and regime"""
    result = pricing.price(cfg.to_model(), cfg.to_spec())
    if cfg.csv:
        write_csv(pd.DataFrame([result.as_row()]), PRICE_COLUMNS, cfg.out, cfg.precision)
        return EXIT_OK

    table = Table(title=f"{result.spec.payoff.value} (K={result.spec.strike:g}, S0={result.s0:g})")
    table.add_column("price", justify="right")
    table.add_column("boundary", justify="right")
    table.add_column("regime")
    table.add_row(_fmt(result.price), _fmt(result.boundary), result.regime.value.capitalize())
    console.print(table)
    return EXIT_OK


def cmd_survival(cfg: RunConfig, oracle: Optional[MonteCarloOracle] = None) -> int:
    """Inverted survival curve next to Monte Carlo survival frequencies"""
    model = cfg.to_model()
    a, b = cfg.log_levels()
    curve = corridor_curve(model, a, b, model.x0, cfg.times)
    plan = SimulationPlan(model=model, estimator=Estimator.survival_at_times(cfg.times),
                          barrier=Barrier(a, b), n_paths=cfg.n_paths, seed=cfg.seed)
    est = (oracle or MonteCarloOracle()).run(plan)
    curve["mc"] = est.mean
    curve["mc_stderr"] = est.stderr
    logger.info("max talbot-stehfest gap %.3g, censored %d", float(curve["gap"].max()), est.censored)
    write_csv(curve, SURVIVAL_COLUMNS, cfg.out, cfg.precision)
    return EXIT_OK


def cmd_fig2(cfg: RunConfig) -> int:
    """CTRW put prices against the Black-Scholes put across rho and moneyness"""
    strike = 1.0 if cfg.strike_normalized else cfg.strike
    table = pricing.convergence_table(cfg.r, cfg.sigma, cfg.rhos, cfg.moneyness, strike=strike)
    write_csv(table, CONVERGENCE_COLUMNS, cfg.out, cfg.precision)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, checks: Optional[List[str]] = None, as_json: bool = False,
               orchestrator: Optional[VerificationOrchestrator] = None) -> int:
    """Run the verification suite; exit 0 only if every check passes"""
    report = (orchestrator or VerificationOrchestrator()).run_suite(cfg, checks)

    if as_json:
        for row in report["checks"]:
            print(json.dumps({**row, "seed": report["seed"], "n_paths": report["n_paths"]}))
    else:
        table = Table(title=f"verification (seed={report['seed']}, n_paths={report['n_paths']})")
        for column in ("check", "result", "estimate", "stderr", "target", "statistic", "detail"):
            table.add_column(column, justify="left" if column in ("check", "detail") else "right")
        for row in report["checks"]:
            table.add_row(row["check"], "PASS" if row["passed"] else "FAIL",
                          f"{row['estimate']:.6g}", f"{row['stderr']:.2g}", f"{row['target']:.6g}",
                          f"{row['statistic']:.3g}", row["detail"])
        console.print(table)
    return EXIT_OK if report["status"] == "pass" else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    # Load environment variables from .env file
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(verbose=args.verbose)

    try:
        cfg = RunConfig.from_mapping(collect_settings(args), args.command)
        if args.command == "price":
            return cmd_price(cfg)
        if args.command == "survival":
            return cmd_survival(cfg)
        if args.command == "fig2":
            return cmd_fig2(cfg)
        checks = [c.strip() for c in args.checks.split(",")] if args.checks else None
        return cmd_verify(cfg, checks, args.json)
    except ConfigError as e:
        for message in e.errors:
            err_console.print(f"[red]invalid input[/red] {escape(message)}")
        return EXIT_INVALID
    except (InfeasibleRiskNeutral, InsufficientPower) as e:
        err_console.print(f"[red]invalid input[/red] {escape(str(e))}")
        return EXIT_INVALID
    except (InversionUnstable, ExcessiveCensoring) as e:
        err_console.print(f"[red]numerical check failed[/red] {escape(str(e))}")
        return EXIT_FAILED
    except (DomainError, KeyError, OSError, ValueError) as e:
        err_console.print(f"[red]invalid input[/red] {escape(str(e))}")
        return EXIT_INVALID
    except CtrwError as e:
        err_console.print(f"[red]error[/red] {escape(str(e))}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
