"""Exact-distribution engine for LB(N).

d_0 = 1 - k_S / 2^n and d_{v+1} = d_v^2, so d_N = d_0^(2^N). Values are carried at a
working precision of 53 + N + guard bits and stored as ExtProb snapshots, which keeps
every stored d_v within one rounding of the true power.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import mpmath

from services.cnf_core import CnfFormula, ModelCount
from services.config import BoostConfig
from services.errors import BoundNotApplicableError, ConfigError
from services.ext_prob import ExtProb
from services.model_cache import ModelCache
from services.performance_monitor import PerformanceMonitor
from utils.logging import log_structured


@dataclass(frozen=True)
class BoostParams:
    """Boosting level N, variable count n, fan-in K, noise model (None means exact cloning)."""
    N: int
    n: int
    K: int = 2
    noise: Optional[object] = None

    def __post_init__(self):
        if self.N < 0:
            raise ConfigError(f"boosting level N must be >= 0 (got {self.N})")
        if self.K < 2:
            raise ConfigError(f"fan-in K must be >= 2 (got {self.K})")

    @property
    def mode(self):
        if self.noise is None or getattr(self.noise, 'is_exact', False):
            return 'exact'
        return 'approximate'

    def to_dict(self):
        out = {'N': self.N, 'n': self.n, 'K': self.K, 'mode': self.mode}
        if self.noise is not None:
            out['noise'] = self.noise.to_dict()
        return out


@dataclass(frozen=True)
class ProbTrace:
    d: Tuple[ExtProb, ...]
    eps_used: Tuple[float, ...]
    params: BoostParams

    def __post_init__(self):
        if len(self.d) != self.params.N + 1:
            raise ValueError(f"trace holds {len(self.d)} values for N={self.params.N}")

    @property
    def final(self):
        return self.d[-1]

    def rows(self):
        """(k, mantissa, exp2, eps_k) per step; the last row has no outgoing eps."""
        for k, value in enumerate(self.d):
            eps = self.eps_used[k] if k < len(self.eps_used) else ''
            yield (k, value.mantissa, value.exp2, eps)


def working_precision(N):
    return 53 + int(N) + BoostConfig.GUARD_BITS


def propagate(d0: ExtProb, eps_seq: Sequence[float], params: BoostParams) -> ProbTrace:
    """d_{k+1} = d_k * clamp(d_k + eps_k, 0, 1); eps all zero gives plain squaring."""
    values = [d0]
    with mpmath.workprec(working_precision(len(eps_seq))):
        running = d0.to_mpf()
        for eps in eps_seq:
            factor = running + mpmath.mpf(eps)
            factor = min(max(factor, mpmath.mpf(0)), mpmath.mpf(1))
            running = running * factor
            values.append(ExtProb.from_mpf(running))
    return ProbTrace(tuple(values), tuple(float(e) for e in eps_seq), params)


def _k_value(k_s):
    return k_s.k_s if isinstance(k_s, ModelCount) else int(k_s)


def initial_d0(k_s: Union[ModelCount, int], n: int) -> ExtProb:
    k = _k_value(k_s)
    if not 0 <= k <= 2 ** n:
        raise ValueError(f"k_s={k} outside [0, 2^{n}]")
    return ExtProb.from_fraction(1 - Fraction(k, 2 ** n))


def boost_exact(d0: ExtProb, N: int, params: Optional[BoostParams] = None) -> ProbTrace:
    if not d0.is_probability():
        raise ValueError(f"d0 must lie in [0, 1] (got {d0.decimal()})")
    params = params or BoostParams(N=N, n=0)
    with PerformanceMonitor.timed('boost_exact'):
        return propagate(d0, [0.0] * N, params)


def theorem1_bound(k_s: Union[ModelCount, int], n: int, N: int) -> ExtProb:
    """(e^{-k_S})^(2^(N-n)), the Theorem 1 ceiling on d_N for satisfiable instances."""
    k = _k_value(k_s)
    if k < 1:
        raise BoundNotApplicableError('Theorem 1 bounds the error of satisfiable instances only (k_s = 0)')
    with mpmath.workprec(128):
        exponent = mpmath.mpf(k) * mpmath.ldexp(mpmath.mpf(1), N - n)
        return ExtProb.from_mpf(mpmath.exp(-exponent))


@dataclass(frozen=True)
class DecisionRecord:
    satisfiable: bool
    k_s: int
    n: int
    m: int
    N: int
    d0: ExtProb
    d_N: ExtProb
    bound: Optional[ExtProb]
    trace: ProbTrace

    @property
    def verdict(self):
        return 'satisfiable' if self.satisfiable else 'unsatisfiable'

    @property
    def bound_holds(self):
        return None if self.bound is None else self.d_N < self.bound


def decide_lb(f: CnfFormula, p: BoostParams, cap=None, workers=1, run_id=None) -> DecisionRecord:
    with PerformanceMonitor.timed('count_models'):
        count = ModelCache.count(f, cap=cap, workers=workers, run_id=run_id)
    d0 = initial_d0(count, f.n)
    trace = boost_exact(d0, p.N, p)
    d_N = trace.final
    # 1 - d_N > 0 iff k_s > 0; read off k_s since d_N rounds to 1 once n - N > 53
    satisfiable = count.k_s > 0
    bound = theorem1_bound(count, f.n, p.N) if count.k_s >= 1 else None
    log_structured('INFO', 'LB decision', run_id, n=f.n, m=f.m, k_s=count.k_s, N=p.N,
                   d_N=d_N.decimal(), verdict='satisfiable' if satisfiable else 'unsatisfiable')
    return DecisionRecord(satisfiable, count.k_s, f.n, f.m, p.N, d0, d_N, bound, trace)


def plan_level(n: int, target, k_s: int = 1) -> int:
    """Smallest N >= n whose Theorem 1 bound is at most target."""
    target = target if isinstance(target, ExtProb) else ExtProb.from_float(target)
    if target.is_zero() or target >= ExtProb.one():
        raise ValueError('target error must lie in (0, 1)')
    with mpmath.workprec(128):
        needed = -mpmath.log(target.to_mpf()) / k_s
        shift = max(0, int(mpmath.ceil(mpmath.log(needed, 2))))
    # ceil(log2) can land one short after rounding
    while theorem1_bound(k_s, n, n + shift) > target:
        shift += 1
    while shift > 0 and theorem1_bound(k_s, n, n + shift - 1) <= target:
        shift -= 1
    return n + shift


def check_limit_sequence(k_s: int, ms: Sequence[int]):
    """a_m = (1 - k_s/m)^m rises strictly towards e^{-k_s}; checked at the given m > k_s."""
    ms = sorted(m for m in set(ms) if m > k_s)
    with mpmath.workprec(160):
        supremum = mpmath.exp(-k_s)
        previous = None
        increasing = bounded = True
        first_violation = None
        for m in ms:
            a_m = (1 - mpmath.mpf(k_s) / m) ** m
            if a_m >= supremum:
                bounded = False
                first_violation = first_violation or m
            if previous is not None and not a_m > previous:
                increasing = False
                first_violation = first_violation or m
            previous = a_m
    return {
        'k_s': k_s,
        'checked': len(ms),
        'increasing': increasing,
        'bounded': bounded,
        'supremum': ExtProb.from_mpf(supremum),
        'first_violation': first_violation,
    }
