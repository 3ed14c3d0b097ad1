"""Orchestrator - Runs the Monte Carlo versus closed-form verification suite"""
import logging
import math
from typing import Any, Callable, Dict, List, Optional

from engines import pricing
from engines.mc_oracle import Barrier, Estimator, MonteCarloOracle, SimulationPlan
from engines.process import risk_neutral_model
from engines.survival import phi_curve
from models.market import MarketModel
from models.options import OptionSpec
from models.run_config import RunConfig
from tools.check_catalog import get_check, get_check_names
from utils.config import get_settings
from utils.errors import CtrwError, InsufficientPower

logger = logging.getLogger(__name__)


class VerificationOrchestrator:
    """
    Runs each verification check in turn:
    1. Build the configured market and the risk-neutral reference market
    2. Estimate the check's functional with the Monte Carlo oracle
    3. Compare against the closed form (or the known overshoot law)

    The configured market is what gets simulated; an explicit lambda that is
    not the martingale rate therefore shows up as failed checks.
    """

    def __init__(self, oracle: Optional[MonteCarloOracle] = None, min_paths: Optional[int] = None):
        """
        Initialize the orchestrator

        Args:
            oracle: Monte Carlo oracle; a default-configured one when omitted
            min_paths: Smallest path count the suite will judge
        """
        self.oracle = oracle or MonteCarloOracle()
        self.min_paths = get_settings().min_paths if min_paths is None else min_paths
        self.workflow_log = []
        self._checks: Dict[str, Callable[[RunConfig, Dict[str, Any]], Dict[str, Any]]] = {
            "martingale": self._check_martingale,
            "binary_call": self._check_binary,
            "binary_put": self._check_binary,
            "vanilla_put": self._check_vanilla_put,
            "survival": self._check_survival,
            "overshoot_up": self._check_overshoot,
            "overshoot_down": self._check_overshoot,
        }

    def run_suite(self, config: RunConfig, checks: Optional[List[str]] = None) -> Dict[str, Any]:
        """
        Run the verification suite

        Args:
            config: Validated run configuration (model parameters, seed, n_paths)
            checks: Subset of check names; all checks by default

        Returns:
            Dict with overall status ("pass" or "fail"), per-check results and
            the workflow log

        Raises:
            InsufficientPower: If n_paths is below the minimum
        """
        self.workflow_log = []
        if config.n_paths < self.min_paths:
            raise InsufficientPower(config.n_paths, self.min_paths)

        results = []
        for name in checks or get_check_names():
            params = get_check(name)
            self._log_step(name, "Starting...")
            try:
                result = self._checks[name](config, {**params, "name": name})
                self._log_step(name, f"Completed - {'PASS' if result['passed'] else 'FAIL'}")
            except CtrwError as e:
                logger.warning("check %s errored: %s", name, e)
                self._log_step(name, f"Error: {str(e)}")
                result = self._row(name, False, detail=f"{type(e).__name__}: {e}")
            results.append(result)

        passed = all(r["passed"] for r in results)
        return {
            "status": "pass" if passed else "fail",
            "checks": results,
            "seed": config.seed,
            "n_paths": config.n_paths,
            "workflow_log": self.workflow_log,
        }

    @staticmethod
    def _row(name: str, passed: bool, estimate: float = math.nan, stderr: float = math.nan,
             target: float = math.nan, statistic: float = math.nan, detail: str = "") -> Dict[str, Any]:
        return {
            "check": name,
            "passed": bool(passed),
            "estimate": float(estimate),
            "stderr": float(stderr),
            "target": float(target),
            "statistic": float(statistic),
            "detail": detail,
        }

    def _markets(self, config: RunConfig, spot: float):
        simulated = config.to_model().with_spot(spot)
        reference = risk_neutral_model(config.jumps(), config.r, spot)
        return simulated, reference

    def _plan(self, config: RunConfig, model: MarketModel, estimator: Estimator,
              barrier: Optional[Barrier] = None, horizon: Optional[float] = None) -> SimulationPlan:
        return SimulationPlan(model=model, estimator=estimator, barrier=barrier,
                              n_paths=config.n_paths, seed=config.seed, horizon=horizon)

    def _check_martingale(self, config: RunConfig, params: Dict[str, Any]) -> Dict[str, Any]:
        model = config.to_model()
        est = self.oracle.run(self._plan(config, model, Estimator.martingale_check(params["times"])))
        z = [est.at(i).z_score(1.0) for i in range(len(params["times"]))]
        worst = max(range(len(z)), key=lambda i: abs(z[i]))
        point = est.at(worst)
        return self._row(params["name"], all(abs(v) <= params["n_stderr"] for v in z),
                         point.mean, point.stderr, 1.0, z[worst],
                         f"t={params['times'][worst]:g}, worst of {len(z)} times")

    def _check_binary(self, config: RunConfig, params: Dict[str, Any]) -> Dict[str, Any]:
        simulated, reference = self._markets(config, params["spot"])
        if params["name"] == "binary_call":
            spec, barrier = OptionSpec.binary_call(1.0), Barrier.up(0.0)
        else:
            spec, barrier = OptionSpec.binary_put(1.0), Barrier.down(0.0)
        target = pricing.binary_price(reference, spec).price
        est = self.oracle.run(self._plan(config, simulated, Estimator.discounted_crossing(config.r), barrier))
        z = est.z_score(target)
        return self._row(params["name"], abs(z) <= params["n_stderr"], est.mean, est.stderr, target, z,
                         f"S0/K0={params['spot']:g}, censored={est.censored}")

    def _check_vanilla_put(self, config: RunConfig, params: Dict[str, Any]) -> Dict[str, Any]:
        simulated, reference = self._markets(config, params["spot"])
        spec = OptionSpec.vanilla_put(1.0)
        result = pricing.vanilla_put_price(reference, spec)
        est = self.oracle.run(self._plan(config, simulated, Estimator.discounted_payoff(spec, result.boundary)))
        z = est.z_score(result.price)
        return self._row(params["name"], abs(z) <= params["n_stderr"], est.mean, est.stderr, result.price, z,
                         f"S0/K={params['spot']:g}, boundary={result.boundary:.6g}")

    def _check_survival(self, config: RunConfig, params: Dict[str, Any]) -> Dict[str, Any]:
        model = config.to_model().with_spot(params["spot"])
        times = params["times"]
        curve = phi_curve(model, 0.0, model.x0, "up", times)
        est = self.oracle.run(self._plan(config, model, Estimator.survival_at_times(times), Barrier.up(0.0)))
        z = [est.at(i).z_score(float(curve["phi"].iloc[i])) for i in range(len(times))]
        worst = max(range(len(z)), key=lambda i: abs(z[i]))
        gap = float(curve["gap"].max())
        passed = all(abs(v) <= params["n_stderr"] for v in z) and gap <= params["inversion_tolerance"]
        return self._row(params["name"], passed, est.at(worst).mean, est.at(worst).stderr,
                         float(curve["phi"].iloc[worst]), z[worst],
                         f"t={times[worst]:g}, talbot-stehfest gap={gap:.2e}")

    def _check_overshoot(self, config: RunConfig, params: Dict[str, Any]) -> Dict[str, Any]:
        model = config.to_model().with_spot(params["spot"])
        barrier = Barrier.up(0.0) if params["name"] == "overshoot_up" else Barrier.down(0.0)
        report = self.oracle.overshoot_distribution(
            self._plan(config, model, Estimator.discounted_crossing(config.r), barrier))
        return self._row(params["name"], report.p_value > params["min_p_value"], report.mean, report.stderr,
                         1.0 / report.rate, report.ks_statistic,
                         f"KS p={report.p_value:.3g} against Exp({report.rate:g}), n={report.samples.size}")

    def _log_step(self, check_name: str, message: str):
        """Log a workflow step"""
        self.workflow_log.append({
            "check": check_name,
            "message": message
        })
        logger.info("%s: %s", check_name, message)
