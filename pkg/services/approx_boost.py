"""ALB(N): LB(N) with an approximate cloner whose copy misses the original's zero-probability
by at most eps. The tracked recurrence is d_{k+1} = d_k (d_k + eps_k), -eps <= eps_k <= eps.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import mpmath
import numpy as np

from services.errors import HypothesisError
from services.exact_boost import BoostParams, ProbTrace, propagate, working_precision
from services.ext_prob import ExtProb
from services.performance_monitor import PerformanceMonitor

LEMMA1_MIN_N = 7
_CHECK_PREC = 256
# top bit of counter word 2; sampler trials only use word 3 and no-go streams keep word 2 below 8
NOISE_STREAM_COUNTER = 1 << 191


@dataclass(frozen=True)
class NoiseModel:
    kind: str  # exact | fixed_plus | fixed_minus | uniform | adversarial
    eps: float = 0.0
    seed: int = 0
    target: str = 'maximize'

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0 (got {self.eps})")
        if self.kind not in ('exact', 'fixed_plus', 'fixed_minus', 'uniform', 'adversarial'):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.target not in ('maximize', 'minimize'):
            raise ValueError(f"adversarial target must be maximize or minimize (got {self.target!r})")

    @classmethod
    def exact(cls):
        return cls('exact')

    @classmethod
    def fixed_plus(cls, eps):
        return cls('fixed_plus', eps)

    @classmethod
    def fixed_minus(cls, eps):
        return cls('fixed_minus', eps)

    @classmethod
    def uniform(cls, eps, seed=0):
        return cls('uniform', eps, seed)

    @classmethod
    def adversarial(cls, eps, target='maximize'):
        return cls('adversarial', eps, target=target)

    @classmethod
    def from_name(cls, name, eps=0.0, seed=0):
        """Config names: exact, fixed_plus, fixed_minus, uniform, adversarial_max, adversarial_min."""
        if name == 'adversarial_max':
            return cls.adversarial(eps, 'maximize')
        if name == 'adversarial_min':
            return cls.adversarial(eps, 'minimize')
        if name == 'uniform':
            return cls.uniform(eps, seed)
        if name == 'exact':
            return cls.exact()
        return cls(name, eps)

    @property
    def is_exact(self):
        return self.kind == 'exact' or self.eps == 0.0

    def realize(self, N: int) -> List[float]:
        """The per-step eps_k sequence for N boosting steps."""
        if self.kind == 'exact':
            return [0.0] * N
        if self.kind == 'fixed_plus':
            return [self.eps] * N
        if self.kind == 'fixed_minus':
            return [-self.eps] * N
        if self.kind == 'adversarial':
            # d(d + c) is increasing in c for d >= 0, so a constant extreme is globally extremal
            sign = 1.0 if self.target == 'maximize' else -1.0
            return [sign * self.eps] * N
        rng = np.random.Generator(np.random.Philox(key=self.seed, counter=NOISE_STREAM_COUNTER))
        return [float(x) for x in rng.uniform(-self.eps, self.eps, size=N)]

    def to_dict(self):
        out = {'kind': self.kind, 'eps': self.eps}
        if self.kind == 'uniform':
            out['seed'] = self.seed
        if self.kind == 'adversarial':
            out['target'] = self.target
        return out


def boost_approx(d0: ExtProb, N: int, noise: NoiseModel, n: Optional[int] = None,
                 check_hypothesis: bool = False) -> ProbTrace:
    if not d0.is_probability():
        raise ValueError(f"d0 must lie in [0, 1] (got {d0.decimal()})")
    if check_hypothesis:
        if n is None:
            raise HypothesisError('hypothesis check needs the variable count n')
        _require_lemma1(n, noise.eps)
    params = BoostParams(N=N, n=n or 0, noise=noise)
    with PerformanceMonitor.timed('boost_approx'):
        return propagate(d0, noise.realize(N), params)


def _require_lemma1(n, eps=0.0):
    if n < LEMMA1_MIN_N:
        raise HypothesisError(f"Lemma 1 needs n >= {LEMMA1_MIN_N} (got n={n})")
    if Fraction(eps) > Fraction(1, 2 ** (n + 1)):
        raise HypothesisError(f"Lemma 1 needs eps <= 2^-{n + 1} (got {eps})")


def lemma1_bound(k: int, n: int) -> ExtProb:
    """2^(-7(k-n)+34); values above 1 are vacuous and returned as is."""
    _require_lemma1(n)
    if k < n:
        raise HypothesisError(f"Lemma 1 speaks about k >= n (got k={k}, n={n})")
    return ExtProb.pow2(-7 * (k - n) + 34)


def lemma2_bound(k: int, eps: float) -> Fraction:
    """1 - (2^k - 1) eps, exact; may be negative once the bound is vacuous."""
    if k < 0 or eps < 0:
        raise ValueError(f"need k >= 0 and eps >= 0 (got k={k}, eps={eps})")
    return 1 - (2 ** k - 1) * Fraction(eps)


def _mp(x):
    if isinstance(x, ExtProb):
        return x.to_mpf()
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _ulp(x: ExtProb):
    return mpmath.ldexp(mpmath.mpf(1), x.exp2 - 53) if not x.is_zero() else mpmath.mpf(0)


# =================== CHECKERS ===================

def lemma1_milestones(trace: ProbTrace, n: int, eps: float) -> Dict[str, dict]:
    """Intermediate bounds from the Lemma 1 argument, for every step the trace reaches."""
    e = Fraction(eps)
    limits = {
        2: ('d_{n+2} < 2/3', Fraction(2, 3)),
        3: ('d_{n+3} < 1/2 - 4eps', Fraction(1, 2) - 4 * e),
        4: ('d_{n+4} < 1/4 - 3eps', Fraction(1, 4) - 3 * e),
        5: ('d_{n+5} < 1/16 - eps', Fraction(1, 16) - e),
        6: ('d_{n+6} < 1/256', Fraction(1, 256)),
    }
    out = {}
    with mpmath.workprec(_CHECK_PREC):
        for offset, (name, limit) in limits.items():
            k = n + offset
            if k < len(trace.d):
                value = trace.d[k]
                out[name] = {'k': k, 'value': value, 'limit': float(limit),
                             'holds': _mp(value) < _mp(limit)}
        if n + 6 < len(trace.d):
            value = trace.d[n + 6]
            out['d_{n+6} + eps < 1/128'] = {'k': n + 6, 'value': value, 'limit': 1 / 128,
                                            'holds': _mp(value) + _mp(e) < mpmath.mpf(1) / 128}
    return out


def check_lemma1(trace: ProbTrace, n: int, k_max: Optional[int] = None) -> List[dict]:
    k_max = len(trace.d) - 1 if k_max is None else min(k_max, len(trace.d) - 1)
    cells = []
    for k in range(n, k_max + 1):
        bound = lemma1_bound(k, n)
        cells.append({'k': k, 'value': trace.d[k], 'bound': bound,
                      'vacuous': bound > ExtProb.one(), 'holds': trace.d[k] < bound})
    return cells


def check_lemma2(trace: ProbTrace, eps: float) -> List[dict]:
    """d_k >= 1 - (2^k - 1) eps, one ulp of slack, while the bound is positive."""
    cells = []
    with mpmath.workprec(_CHECK_PREC):
        for k, value in enumerate(trace.d):
            bound = lemma2_bound(k, eps)
            if bound <= 0:
                break
            holds = _mp(value) + _ulp(value) >= _mp(bound)
            cells.append({'k': k, 'value': value, 'bound': float(bound), 'holds': bool(holds)})
    return cells


def check_sandwich(trace: ProbTrace, eps: float, rel_tol: float = 2.0 ** -50) -> List[dict]:
    """d_k (d_k - eps) <= d_{k+1} <= d_k (d_k + eps) per step, with relative slack rel_tol."""
    failures = []
    with mpmath.workprec(_CHECK_PREC):
        e = _mp(eps)
        for k in range(len(trace.d) - 1):
            dk, nxt = _mp(trace.d[k]), _mp(trace.d[k + 1])
            lo, hi = dk * (dk - e), dk * (dk + e)
            slack = rel_tol * abs(hi) + _ulp(trace.d[k + 1])
            if nxt < lo - slack or nxt > hi + slack:
                failures.append({'k': k, 'value': trace.d[k + 1], 'low': float(lo), 'high': float(hi)})
    return failures


# =================== THEOREM 3 ===================

def unsat_error(N: int, eps: float) -> ExtProb:
    """1 - d_N from d_0 = 1 under -eps at every step."""
    return complement_error([-eps] * N)


def complement_error(eps_seq: Sequence[float]) -> ExtProb:
    """1 - d_N from d_0 = 1 under the realized eps_k.

    Carried as the complement e = 1 - d, e' = e + (e - c) - e(e - c) with c = eps_k, so its low digits survive.
    """
    with mpmath.workprec(working_precision(len(eps_seq))):
        e = mpmath.mpf(0)
        for eps in eps_seq:
            gap = e - mpmath.mpf(eps)
            if gap <= 0:
                continue  # d_k + eps_k clamps to 1
            if gap >= 1:
                e = mpmath.mpf(1)
            else:
                e = e + gap - e * gap
        return ExtProb.from_mpf(e)


@dataclass(frozen=True)
class AlbBoundReport:
    n: int
    N: int
    eps: float
    P_err_bound: ExtProb
    term_sat: ExtProb
    term_unsat: ExtProb
    which_max: str
    term_sat_vacuous: bool
    worst_sat_d_N: ExtProb
    worst_unsat_error: ExtProb
    milestones: Dict[str, dict]

    @property
    def observed_error(self):
        return max(self.worst_sat_d_N, self.worst_unsat_error)

    @property
    def holds(self):
        return self.observed_error < self.P_err_bound

    def to_dict(self):
        return {
            'n': self.n, 'N': self.N, 'eps': self.eps,
            'P_err_bound': self.P_err_bound.to_dict(),
            'term_sat': self.term_sat.to_dict(),
            'term_unsat': self.term_unsat.to_dict(),
            'which_max': self.which_max,
            'term_sat_vacuous': self.term_sat_vacuous,
            'worst_sat_d_N': self.worst_sat_d_N.to_dict(),
            'worst_unsat_error': self.worst_unsat_error.to_dict(),
            'holds': self.holds,
            'milestones': {name: {'k': cell['k'], 'value': cell['value'].to_dict(),
                                  'limit': cell['limit'], 'holds': cell['holds']}
                           for name, cell in self.milestones.items()},
        }


def theorem3_report(n: int, N: int, eps: float) -> AlbBoundReport:
    _require_lemma1(n, eps)
    if N < n:
        raise HypothesisError(f"Theorem 3 takes N >= n (got N={N}, n={n})")
    term_sat = ExtProb.pow2(-7 * (N - n) + 34)
    with mpmath.workprec(N + 128):
        term_unsat = ExtProb.from_mpf((mpmath.ldexp(mpmath.mpf(1), N) - 1) * mpmath.mpf(eps))
    if term_sat > term_unsat:
        which = 'sat'
    elif term_unsat > term_sat:
        which = 'unsat'
    else:
        which = 'tie'

    # worst cases: the Lemma 1 extreme on the satisfiable side, Lemma 2 on the unsatisfiable side
    sat_trace = boost_approx(ExtProb.from_fraction(1 - Fraction(1, 2 ** n)), N, NoiseModel.fixed_plus(eps), n=n)
    return AlbBoundReport(
        n=n, N=N, eps=eps,
        P_err_bound=max(term_sat, term_unsat),
        term_sat=term_sat,
        term_unsat=term_unsat,
        which_max=which,
        term_sat_vacuous=term_sat > ExtProb.one(),
        worst_sat_d_N=sat_trace.final,
        worst_unsat_error=unsat_error(N, eps),
        milestones=lemma1_milestones(sat_trace, n, eps),
    )


def plan_alb(n: int, target) -> dict:
    """Smallest N >= n and largest eps = 2^-j with both Theorem 3 terms at most target."""
    target = target if isinstance(target, ExtProb) else ExtProb.from_float(target)
    if target.is_zero() or target >= ExtProb.one():
        raise ValueError('target error must lie in (0, 1)')
    _require_lemma1(n)
    N = n
    while ExtProb.pow2(-7 * (N - n) + 34) > target:
        N += 1
    j = n + 1
    while ExtProb.from_fraction(Fraction(2 ** N - 1, 2 ** j)) > target:
        j += 1
    return {'n': n, 'N': N, 'eps_exp2': -j, 'eps': ExtProb.pow2(-j), 'target': target}


# =================== CLONING PRECISION ===================

@dataclass(frozen=True)
class CloningPrecision:
    n_in: int
    m_out: int
    fidelity: Fraction
    precision: Fraction

    def to_dict(self):
        return {'n_in': self.n_in, 'm_out': self.m_out,
                'fidelity': str(self.fidelity), 'precision': str(self.precision),
                'fidelity_float': float(self.fidelity), 'precision_float': float(self.precision)}


def gisin_massar(n_in: int, m_out: int) -> CloningPrecision:
    """Optimal unitary N -> M qubit cloning: fidelity (M(N+1)+N)/(M(N+2)), eps = (M-N)/(M(N+2))."""
    if not m_out > n_in >= 1:
        raise HypothesisError(f"optimal cloning needs m_out > n_in >= 1 (got n_in={n_in}, m_out={m_out})")
    fidelity = Fraction(m_out * (n_in + 1) + n_in, m_out * (n_in + 2))
    precision = Fraction(m_out - n_in, m_out * (n_in + 2))
    return CloningPrecision(n_in, m_out, fidelity, precision)


def precision_gap(n: int, n_in: int = 1, m_out: int = 2) -> dict:
    """How far optimal unitary cloning is from the eps = 2^(-n-6) that ALB(n+4) needs."""
    achievable = gisin_massar(n_in, m_out).precision
    required = Fraction(1, 2 ** (n + 6))
    ratio = achievable / required
    return {'n': n, 'required': ExtProb.from_fraction(required),
            'achievable': ExtProb.from_fraction(achievable),
            'ratio_log2': float(mpmath.log(_mp(ratio), 2))}
