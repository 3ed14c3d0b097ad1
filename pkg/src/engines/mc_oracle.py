"""
Monte Carlo first-passage oracle for the CTRW market.

Paths are simulated jump by jump, vectorised over fixed-size blocks. Block b
draws from a Philox stream keyed by (seed, b), and per-path contributions are
concatenated in path order before the (pairwise) numpy reduction, so results
are bitwise identical for any number of worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from engines.process import sample_increments
from engines.rng import block_generator
from models.market import MarketModel
from models.options import OptionSpec, PayoffKind
from utils.config import get_settings
from utils.errors import DomainError, ExcessiveCensoring

logger = logging.getLogger(__name__)

DEFAULT_MAX_JUMPS = 10 ** 7
HORIZON_MEAN_WAITS = 50.0


class EstimatorKind(str, Enum):
    SURVIVAL_AT_TIMES = "survival_at_times"
    DISCOUNTED_CROSSING = "discounted_crossing"
    DISCOUNTED_PAYOFF = "discounted_payoff"
    MARTINGALE_CHECK = "martingale_check"


@dataclass(frozen=True)
class Estimator:
    """
    Functional of the path to average.

    Attributes:
        kind: Estimator family
        times: Observation times (survival, martingale)
        s: Discount rate of the crossing time (discounted crossing)
        spec: Contract paid at the crossing (discounted payoff)
        boundary: Exercise level in price units (discounted payoff)
    """
    kind: EstimatorKind
    times: Tuple[float, ...] = ()
    s: float = 0.0
    spec: Optional[OptionSpec] = None
    boundary: Optional[float] = None

    @classmethod
    def survival_at_times(cls, times) -> "Estimator":
        return cls(EstimatorKind.SURVIVAL_AT_TIMES, times=tuple(float(t) for t in times))

    @classmethod
    def discounted_crossing(cls, s: float) -> "Estimator":
        return cls(EstimatorKind.DISCOUNTED_CROSSING, s=float(s))

    @classmethod
    def discounted_payoff(cls, spec: OptionSpec, boundary: float) -> "Estimator":
        return cls(EstimatorKind.DISCOUNTED_PAYOFF, spec=spec, boundary=float(boundary))

    @classmethod
    def martingale_check(cls, times) -> "Estimator":
        return cls(EstimatorKind.MARTINGALE_CHECK, times=tuple(float(t) for t in times))

    @property
    def is_crossing(self) -> bool:
        return self.kind in (EstimatorKind.DISCOUNTED_CROSSING, EstimatorKind.DISCOUNTED_PAYOFF)


@dataclass(frozen=True)
class Barrier:
    """
    Absorbing log-price levels; the path is absorbed strictly beyond them.

    Attributes:
        lower: Lower log level (-inf for none)
        upper: Upper log level (+inf for none)
    """
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"barrier: need lower < upper, got {self.lower!r}, {self.upper!r}")

    @classmethod
    def up(cls, level_log: float) -> "Barrier":
        return cls(upper=float(level_log))

    @classmethod
    def down(cls, level_log: float) -> "Barrier":
        return cls(lower=float(level_log))

    @classmethod
    def corridor(cls, a: float, b: float) -> "Barrier":
        return cls(float(a), float(b))

    @property
    def side(self) -> Optional[str]:
        """'up' or 'down' for one-sided barriers, None for a corridor"""
        if math.isinf(self.lower) and not math.isinf(self.upper):
            return "up"
        if math.isinf(self.upper) and not math.isinf(self.lower):
            return "down"
        return None

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def crossed(self, x: np.ndarray) -> np.ndarray:
        return (x < self.lower) | (x > self.upper)


@dataclass(frozen=True)
class SimulationPlan:
    """
    Everything that determines a Monte Carlo estimate.

    Attributes:
        model: Market to simulate
        estimator: Functional to average
        barrier: Absorbing levels (required by crossing estimators)
        n_paths: Number of paths, ≥ 1
        seed: 64-bit seed
        horizon: Maximum simulated time; defaults to 50 mean waits for
            crossing estimators and to the last observation time otherwise
        max_jumps: Cap on jumps per path
    """
    model: MarketModel
    estimator: Estimator
    barrier: Optional[Barrier] = None
    n_paths: int = 100_000
    seed: int = 42
    horizon: Optional[float] = None
    max_jumps: int = DEFAULT_MAX_JUMPS

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError(f"n_paths: must be >= 1, got {self.n_paths}")
        if self.max_jumps < 1:
            raise DomainError(f"max_jumps: must be >= 1, got {self.max_jumps}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed: must fit in 64 unsigned bits, got {self.seed}")
        if self.horizon is not None and not self.horizon > 0:
            raise DomainError(f"horizon: must be > 0, got {self.horizon!r}")
        est = self.estimator
        if est.times:
            if any(not t > 0 for t in est.times):
                raise DomainError("times: observation times must be > 0")
            if self.horizon is not None and self.horizon < max(est.times):
                raise DomainError("horizon: must cover the last observation time")
        elif est.kind in (EstimatorKind.SURVIVAL_AT_TIMES, EstimatorKind.MARTINGALE_CHECK):
            raise DomainError(f"{est.kind.value}: needs at least one observation time")
        if est.kind is EstimatorKind.DISCOUNTED_PAYOFF:
            if est.spec is None or est.boundary is None or not est.boundary > 0:
                raise DomainError("discounted_payoff: needs a contract and a positive boundary")
        if est.kind in (EstimatorKind.SURVIVAL_AT_TIMES, EstimatorKind.DISCOUNTED_CROSSING):
            if self.barrier is None:
                raise DomainError(f"{est.kind.value}: needs a barrier")
        if est.kind is EstimatorKind.MARTINGALE_CHECK and self.barrier is not None:
            raise DomainError("martingale_check: paths must not be absorbed")
        if est.kind is EstimatorKind.DISCOUNTED_CROSSING and est.s < 0:
            raise DomainError(f"s: discount rate must be >= 0, got {est.s!r}")
        barrier = self.effective_barrier
        if barrier is not None and not barrier.contains(self.model.x0):
            raise DomainError("start point lies outside the barrier region")

    @property
    def effective_barrier(self) -> Optional[Barrier]:
        est = self.estimator
        if est.kind is EstimatorKind.DISCOUNTED_PAYOFF:
            level = math.log(est.boundary)
            return Barrier.up(level) if est.spec.payoff.is_call else Barrier.down(level)
        return self.barrier

    @property
    def effective_horizon(self) -> float:
        if self.horizon is not None:
            return self.horizon
        if self.estimator.times:
            return max(self.estimator.times)
        return HORIZON_MEAN_WAITS * self.model.waits.mean


@dataclass(frozen=True)
class McEstimate:
    """
    Sample mean of a path functional with its standard error.

    For multi-time estimators `mean` and `stderr` are arrays aligned with
    `times`; use `at(i)` for a scalar view.

    Attributes:
        mean: Sample mean
        stderr: Standard error of the mean (≥ 0)
        n_effective: Paths that contributed a resolved value
        censored: Paths stopped at the horizon or jump cap without resolution
        n_paths: Paths simulated
        seed: Seed used
        times: Observation times, empty for scalar estimators
        bias_bound: Largest possible bias caused by censoring
    """
    mean: object
    stderr: object
    n_effective: int
    censored: int
    n_paths: int
    seed: int
    times: Tuple[float, ...] = ()
    bias_bound: float = 0.0

    def at(self, i: int) -> "McEstimate":
        if not self.times:
            return self
        return McEstimate(float(self.mean[i]), float(self.stderr[i]), self.n_effective,
                          self.censored, self.n_paths, self.seed, (self.times[i],), self.bias_bound)

    def z_score(self, target: float) -> float:
        err = float(self.stderr)
        diff = float(self.mean) - target
        if err == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / err

    def agrees_with(self, target: float, n_stderr: float = 3.0) -> bool:
        return abs(self.z_score(target)) <= n_stderr


@dataclass
class _Block:
    """Raw per-path results of one block"""
    tau: np.ndarray          # crossing time, inf when not crossed
    x_tau: np.ndarray        # log-price right after the crossing jump
    t_stop: np.ndarray       # time at which simulation stopped
    capped: np.ndarray       # stopped by the jump cap before the horizon
    snapshots: Optional[np.ndarray] = field(default=None)  # (len(times), n) log-prices


@dataclass(frozen=True)
class OvershootReport:
    """
    Log-space overshoot at the crossing.

    Attributes:
        samples: Overshoot magnitudes (≥ 0)
        mean: Sample mean
        stderr: Standard error of the mean
        rate: Exponential rate it is tested against (ρ up, γ down)
        ks_statistic: Kolmogorov-Smirnov statistic against Exp(rate)
        p_value: KS p-value
        counts: Histogram counts
        edges: Histogram bin edges
    """
    samples: np.ndarray
    mean: float
    stderr: float
    rate: float
    ks_statistic: float
    p_value: float
    counts: np.ndarray
    edges: np.ndarray


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


class MonteCarloOracle:
    """
    Jump-by-jump simulator producing estimates with standard errors.

    Worker count affects wall time only; block size is part of the
    reproducibility key together with the seed.
    """

    def __init__(self, workers: Optional[int] = None, block_size: Optional[int] = None,
                 censor_bound: Optional[float] = None):
        """
        Args:
            workers: Thread cap; defaults to the CTRW_THREADS setting
            block_size: Paths per RNG block; defaults to the CTRW_MC_BLOCK setting
            censor_bound: Largest tolerated censoring bias
        """
        settings = get_settings()
        self.workers = max(1, workers or settings.threads)
        self.block_size = max(1, block_size or settings.mc_block)
        self.censor_bound = settings.censor_bound if censor_bound is None else censor_bound

    def _simulate_block(self, plan: SimulationPlan, block_index: int, n: int) -> _Block:
        model = plan.model
        rng = block_generator(plan.seed, block_index)
        barrier = plan.effective_barrier
        horizon = plan.effective_horizon
        times = np.asarray(plan.estimator.times if plan.estimator.kind is EstimatorKind.MARTINGALE_CHECK else ())

        x = np.full(n, model.x0)
        t = np.zeros(n)
        tau = np.full(n, np.inf)
        x_tau = np.full(n, np.nan)
        active = np.ones(n, dtype=bool)
        snapshots = np.full((times.size, n), np.nan) if times.size else None

        for _ in range(plan.max_jumps):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            dt, dx = sample_increments(model, rng, idx.size)
            t_old = t[idx]
            t_new = t_old + dt
            x_old = x[idx]
            if snapshots is not None:
                # X is constant on [t_old, t_new)
                for j, tj in enumerate(times):
                    hit = (t_old <= tj) & (t_new > tj)
                    snapshots[j, idx[hit]] = x_old[hit]
            beyond = t_new > horizon
            x_new = x_old + dx
            crossed = ~beyond & barrier.crossed(x_new) if barrier is not None else np.zeros(idx.size, dtype=bool)
            t[idx] = np.where(beyond, horizon, t_new)
            x[idx] = np.where(beyond, x_old, x_new)
            tau[idx[crossed]] = t_new[crossed]
            x_tau[idx[crossed]] = x_new[crossed]
            active[idx[beyond | crossed]] = False

        capped = active.copy()
        if capped.any():
            logger.warning("block %d: %d paths hit the %d-jump cap", block_index, int(capped.sum()), plan.max_jumps)
        return _Block(tau=tau, x_tau=x_tau, t_stop=t, capped=capped, snapshots=snapshots)

    def _simulate(self, plan: SimulationPlan) -> _Block:
        sizes = []
        remaining = plan.n_paths
        while remaining > 0:
            sizes.append(min(self.block_size, remaining))
            remaining -= sizes[-1]
        logger.info("simulating %d paths in %d blocks on %d workers", plan.n_paths, len(sizes), self.workers)
        if self.workers == 1 or len(sizes) == 1:
            blocks = [self._simulate_block(plan, b, n) for b, n in enumerate(sizes)]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                blocks = list(pool.map(lambda args: self._simulate_block(plan, *args), enumerate(sizes)))
        snaps = None
        if blocks[0].snapshots is not None:
            snaps = np.concatenate([blk.snapshots for blk in blocks], axis=1)
        return _Block(
            tau=np.concatenate([blk.tau for blk in blocks]),
            x_tau=np.concatenate([blk.x_tau for blk in blocks]),
            t_stop=np.concatenate([blk.t_stop for blk in blocks]),
            capped=np.concatenate([blk.capped for blk in blocks]),
            snapshots=snaps,
        )

    def _crossing_estimate(self, plan: SimulationPlan, sim: _Block, values: np.ndarray, s: float) -> McEstimate:
        crossed = np.isfinite(sim.tau)
        censored = int((~crossed).sum())
        # a censored path could still have crossed after t_stop, worth at most e^{-s t_stop}
        bias_bound = float(np.sum(np.exp(-s * sim.t_stop[~crossed])) / plan.n_paths)
        if s > 0 and bias_bound > self.censor_bound:
            raise ExcessiveCensoring(censored, plan.n_paths, bias_bound, self.censor_bound)
        return McEstimate(float(np.mean(values)), _stderr(values), plan.n_paths - censored,
                          censored, plan.n_paths, plan.seed, (), bias_bound)

    def run(self, plan: SimulationPlan) -> McEstimate:
        """
        Estimate the plan's functional.

        Args:
            plan: Simulation plan

        Returns:
            McEstimate (array-valued for multi-time estimators)

        Raises:
            ExcessiveCensoring: When censoring could bias a discounted estimate
                by more than the configured bound
        """
        est = plan.estimator
        sim = self._simulate(plan)
        if est.kind is EstimatorKind.DISCOUNTED_CROSSING:
            values = np.where(np.isfinite(sim.tau), np.exp(-est.s * np.where(np.isfinite(sim.tau), sim.tau, 0.0)), 0.0)
            return self._crossing_estimate(plan, sim, values, est.s)

        if est.kind is EstimatorKind.DISCOUNTED_PAYOFF:
            r = plan.model.r
            crossed = np.isfinite(sim.tau)
            spot = np.exp(np.where(crossed, sim.x_tau, 0.0))
            strike = est.spec.strike
            payoff = {
                PayoffKind.BINARY_CALL: np.ones_like(spot),
                PayoffKind.BINARY_PUT: np.ones_like(spot),
                PayoffKind.VANILLA_CALL: spot - strike,
                PayoffKind.VANILLA_PUT: strike - spot,
            }[est.spec.payoff]
            discount = np.exp(-r * np.where(crossed, sim.tau, 0.0))
            values = np.where(crossed, payoff * discount, 0.0)
            return self._crossing_estimate(plan, sim, values, r)

        times = np.asarray(est.times)
        if est.kind is EstimatorKind.SURVIVAL_AT_TIMES:
            # capped paths count as survivors; they are reported as censored
            alive = sim.tau[None, :] > times[:, None]
            means = alive.mean(axis=1)
            errs = np.array([_stderr(row.astype(float)) for row in alive])
            censored = int(sim.capped.sum())
            return McEstimate(means, errs, plan.n_paths - censored, censored, plan.n_paths,
                              plan.seed, tuple(est.times), 0.0)

        # martingale check: S(t) e^{-rt} / S₀
        ratios = np.exp(sim.snapshots - plan.model.x0 - plan.model.r * times[:, None])
        resolved = np.isfinite(ratios).all(axis=0)
        kept = ratios[:, resolved]
        means = kept.mean(axis=1)
        errs = np.array([_stderr(row) for row in kept])
        censored = int((~resolved).sum())
        return McEstimate(means, errs, plan.n_paths - censored, censored, plan.n_paths,
                          plan.seed, tuple(est.times), 0.0)

    def overshoot_distribution(self, plan: SimulationPlan, bins: int = 50) -> OvershootReport:
        """
        Overshoot of the crossing jump beyond a one-sided barrier.

        Returns:
            OvershootReport with a KS test against Exp(ρ) (up) or Exp(γ) (down)
        """
        if not plan.estimator.is_crossing:
            raise DomainError("overshoot_distribution: needs a crossing estimator")
        barrier = plan.effective_barrier
        side = barrier.side
        if side is None:
            raise DomainError("overshoot_distribution: needs a one-sided barrier")
        sim = self._simulate(plan)
        crossed = np.isfinite(sim.tau)
        s = plan.estimator.s if plan.estimator.kind is EstimatorKind.DISCOUNTED_CROSSING else plan.model.r
        self._crossing_estimate(plan, sim, crossed.astype(float), s)
        if side == "up":
            samples = sim.x_tau[crossed] - barrier.upper
            rate = plan.model.jumps.rho
        else:
            samples = barrier.lower - sim.x_tau[crossed]
            rate = plan.model.jumps.gamma
        if samples.size == 0:
            raise DomainError("overshoot_distribution: no path crossed the barrier")
        ks = stats.kstest(samples, "expon", args=(0.0, 1.0 / rate))
        counts, edges = np.histogram(samples, bins=bins)
        return OvershootReport(samples=samples, mean=float(samples.mean()), stderr=_stderr(samples),
                               rate=rate, ks_statistic=float(ks.statistic), p_value=float(ks.pvalue),
                               counts=counts, edges=edges)
