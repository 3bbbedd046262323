"""Monte Carlo LB/ALB: draw assignments, evaluate D_0, realize every clone as a fresh draw.

Two strategies give the same law of D_N under exact cloning:
  flat  OR of 2^N independent D_0 draws
  tree  one D_0 draw, then per stage a clone drawn from the tracked (noise-perturbed) law
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from services.approx_boost import NoiseModel, boost_approx
from services.cnf_core import Assignment, CnfFormula, evaluate, satisfied_mask, satisfying_table
from services.config import BoostConfig
from services.errors import ConfigError
from services.exact_boost import BoostParams, boost_exact, initial_d0
from services.ext_prob import ExtProb
from services.model_cache import ModelCache
from services.performance_monitor import PerformanceMonitor
from services.work_budget import WorkBudget
from utils.logging import log_structured

FLAT_MAX_VARS = 62


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    trials: int
    N: int
    noise: NoiseModel = NoiseModel.exact()
    strategy: str = 'auto'
    work_budget: Optional[int] = None
    allow_large_level: bool = False
    record_bits: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1 (got {self.trials})")
        if self.N < 0:
            raise ConfigError(f"N must be >= 0 (got {self.N})")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.strategy not in ('auto', 'flat', 'tree'):
            raise ConfigError(f"unknown strategy {self.strategy!r}")

    @property
    def resolved_strategy(self):
        if self.strategy != 'auto':
            return self.strategy
        return 'flat' if self.noise.is_exact else 'tree'


@dataclass(frozen=True)
class EmpiricalResult:
    ones: int
    trials: int
    freq: float
    ci95: float
    predicted: float
    sigma: float
    z_score: Optional[float]
    strategy: str
    N: int
    bits: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if not 0 <= self.ones <= self.trials:
            raise ValueError(f"ones={self.ones} outside [0, {self.trials}]")

    @property
    def within_3_sigma(self):
        if self.sigma == 0.0:
            return self.freq == self.predicted
        return abs(self.freq - self.predicted) <= 3 * self.sigma

    def to_dict(self):
        return {
            'ones': self.ones, 'trials': self.trials, 'freq': self.freq, 'ci95': self.ci95,
            'predicted': self.predicted, 'sigma': self.sigma, 'z_score': self.z_score,
            'within_3_sigma': self.within_3_sigma, 'strategy': self.strategy, 'N': self.N,
        }


def trial_rng(seed, trial):
    """Independent counter-based stream per (seed, trial index)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=trial << 192))


def sample_d0(f: CnfFormula, rng: np.random.Generator) -> int:
    bits = rng.integers(0, 2, size=f.n)
    return int(evaluate(f, Assignment(tuple(int(b) for b in bits))))


def _flat_trial(f, N, seed, trial, table):
    rng = trial_rng(seed, trial)
    draws = rng.integers(0, 1 << f.n, size=1 << N, dtype=np.uint64, endpoint=False)
    hits = table[draws] if table is not None else satisfied_mask(f, draws)
    return int(hits.any())


def _tree_trial(f, release, seed, trial):
    # release[v] = P(clone at stage v+1 is 1)
    rng = trial_rng(seed, trial)
    d = sample_d0(f, rng)
    u = rng.random(len(release))
    return int(d or bool((u < release).any()))


def _predicted_trace(f, cfg, run_id):
    count = ModelCache.count(f, run_id=run_id)
    d0 = initial_d0(count, f.n)
    params = BoostParams(N=cfg.N, n=f.n, noise=cfg.noise)
    if cfg.noise.is_exact:
        return boost_exact(d0, cfg.N, params)
    return boost_approx(d0, cfg.N, cfg.noise, n=f.n)


def sample_dN(f: CnfFormula, cfg: SamplerConfig, run_id=None) -> EmpiricalResult:
    strategy = cfg.resolved_strategy
    if strategy == 'flat':
        if not cfg.noise.is_exact:
            raise ConfigError('flat sampling realizes exact clones only; use the tree strategy for noisy cloning')
        if f.n > FLAT_MAX_VARS:
            raise ConfigError(f"flat sampling packs assignments into 64-bit words; n={f.n} > {FLAT_MAX_VARS}")
    WorkBudget.require(run_id, cfg.N, cfg.trials, cfg.work_budget, cfg.allow_large_level)

    trace = _predicted_trace(f, cfg, run_id)
    predicted = 1.0 - trace.final.to_float()

    if strategy == 'flat':
        table = satisfying_table(f) if f.n <= BoostConfig.SAMPLER_TABLE_MAX_VARS else None

        def run(trial):
            return _flat_trial(f, cfg.N, cfg.seed, trial, table)
    else:
        zero_prob = [min(max(d.to_float() + eps, 0.0), 1.0)
                     for d, eps in zip(trace.d[:-1], trace.eps_used)]
        release = 1.0 - np.asarray(zero_prob, dtype=float)

        def run(trial):
            return _tree_trial(f, release, cfg.seed, trial)

    with PerformanceMonitor.timed(f'sample_{strategy}'):
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                bits = list(pool.map(run, range(cfg.trials), chunksize=256))
        else:
            bits = [run(t) for t in range(cfg.trials)]

    ones = sum(bits)
    freq = ones / cfg.trials
    ci95 = 1.96 * math.sqrt(freq * (1.0 - freq) / cfg.trials)
    sigma = math.sqrt(predicted * (1.0 - predicted) / cfg.trials)
    if sigma > 0.0:
        z_score = (freq - predicted) / sigma
    else:
        z_score = 0.0 if freq == predicted else None
    result = EmpiricalResult(ones, cfg.trials, freq, ci95, predicted, sigma, z_score, strategy, cfg.N,
                             tuple(bits) if cfg.record_bits else None)
    log_structured('INFO', 'Sampling finished', run_id, N=cfg.N, trials=cfg.trials, strategy=strategy,
                   freq=freq, predicted=predicted, z_score=z_score)
    return result


def cost_report(n: int, N: int, m: Optional[int] = None, literal_count: Optional[int] = None) -> dict:
    """Classical work of one D_N draw: 2^N D_0 evaluations times the cost of one evaluation."""
    if literal_count is not None:
        per_d0, unit = literal_count, 'literal evaluations'
    elif m is not None:
        per_d0, unit = m, 'clause evaluations'
    else:
        per_d0, unit = 1, 'D_0 evaluations'
    draws = WorkBudget.cost(N)
    work = draws * per_d0
    return {
        'n': n, 'N': N,
        'd0_draws_per_sample': draws,
        'per_d0_cost': per_d0,
        'unit': unit,
        'work': work,
        'work_log10': ExtProb.from_fraction(work).log10() if work else 0.0,
    }
