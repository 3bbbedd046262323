"""Verification sweeps over the error bounds.

Every cell carries a status:
  holds                the bound held on every step checked
  violated             a finding; commands exit 3
  hypothesis-violated  the bound's preconditions fail for this cell; nothing was checked
  not-applicable       the bound says nothing here (unsatisfiable instance)
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import numpy as np

from services.approx_boost import (LEMMA1_MIN_N, NoiseModel, boost_approx, check_lemma1, check_lemma2,
                                   check_sandwich, lemma1_milestones, theorem3_report)
from services.cnf_core import random_kcnf
from services.errors import HypothesisError
from services.exact_boost import boost_exact, check_limit_sequence, initial_d0, theorem1_bound
from services.ext_prob import ExtProb
from services.model_cache import ModelCache
from services.performance_monitor import PerformanceMonitor
from utils.helpers import parse_int_range, parse_number_list
from utils.logging import log_structured

HOLDS = 'holds'
VIOLATED = 'violated'
HYPOTHESIS_VIOLATED = 'hypothesis-violated'
NOT_APPLICABLE = 'not-applicable'

THEOREM3_SETTINGS = ((12, 62), (4, 6))  # (N - n, -log2(eps) - n)
THEOREM3_DOMINANT_LIMIT = ExtProb.from_mpf(mpmath.power(2, mpmath.mpf(-49.5)))


@dataclass(frozen=True)
class SweepGrid:
    thm1_n: Sequence[int]
    thm1_extra_levels: int
    thm1_random_instances: int
    lemma1_n: Sequence[int]
    lemma1_extra_levels: int
    lemma1_eps_offsets: Sequence[int]
    include_zero_eps: bool
    lemma2_eps: Sequence[float]
    seed: int = 0
    enum_cap: Optional[int] = None

    @classmethod
    def from_run_config(cls, cfg):
        return cls(
            thm1_n=parse_int_range(cfg.thm1_n_range),
            thm1_extra_levels=cfg.thm1_extra_levels,
            thm1_random_instances=cfg.thm1_random_instances,
            lemma1_n=parse_int_range(cfg.lemma1_n_range),
            lemma1_extra_levels=cfg.lemma1_extra_levels,
            lemma1_eps_offsets=parse_int_range(cfg.lemma1_eps_offsets),
            include_zero_eps=cfg.include_zero_eps,
            lemma2_eps=parse_number_list(cfg.lemma2_eps),
            seed=cfg.seed,
            enum_cap=cfg.enum_cap,
        )


def _cell(family, params, status, **extra):
    return {'family': family, 'params': params, 'status': status, **extra}


# =================== THEOREM 1 ===================

def _theorem1_cells(n, k_s, N_max, source):
    if k_s == 0:
        return [_cell('theorem1', {'n': n, 'k_s': 0, 'source': source}, NOT_APPLICABLE)]
    trace = boost_exact(initial_d0(k_s, n), N_max)
    cells = []
    for N in range(n, N_max + 1):
        bound = theorem1_bound(k_s, n, N)
        d_N = trace.d[N]
        cells.append(_cell('theorem1', {'n': n, 'k_s': k_s, 'N': N, 'source': source},
                           HOLDS if d_N < bound else VIOLATED, value=d_N, bound=bound))
    return cells


def theorem1_jobs(grid: SweepGrid, workers: int = 1):
    rng = np.random.default_rng(grid.seed)
    jobs = []
    for n in grid.thm1_n:
        N_max = n + grid.thm1_extra_levels
        for k_s in sorted({1, 2, 2 ** n} & set(range(1, 2 ** n + 1))):
            jobs.append((n, k_s, N_max, 'crafted'))
        for _ in range(grid.thm1_random_instances):
            f = random_kcnf(n, max(1, 3 * n), rng)
            k_s = ModelCache.count(f, cap=grid.enum_cap, workers=workers).k_s
            jobs.append((n, k_s, N_max, 'random-3cnf'))
    return jobs


def limit_sequence_cells(k_values=(1, 2, 3), m_max=4096):
    cells = []
    for k_s in k_values:
        result = check_limit_sequence(k_s, range(k_s + 1, m_max + 1))
        status = HOLDS if result['increasing'] and result['bounded'] else VIOLATED
        cells.append(_cell('limit_sequence', {'k_s': k_s, 'm_max': m_max}, status,
                           bound=result['supremum'], checked=result['checked'],
                           first_violation=result['first_violation']))
    return cells


# =================== LEMMA 1 ===================

def lemma1_cell(n, eps, extra_levels):
    params = {'n': n, 'eps': eps, 'N': n + extra_levels}
    if n < LEMMA1_MIN_N:
        return _cell('lemma1', params, HYPOTHESIS_VIOLATED, reason=f"needs n >= {LEMMA1_MIN_N}")
    if Fraction(eps) > Fraction(1, 2 ** (n + 1)):
        return _cell('lemma1', params, HYPOTHESIS_VIOLATED, reason=f"needs eps <= 2^-{n + 1}")
    N = n + extra_levels
    d0 = ExtProb.from_fraction(1 - Fraction(1, 2 ** n))
    trace = boost_approx(d0, N, NoiseModel.fixed_plus(eps), n=n)
    steps = check_lemma1(trace, n)
    milestones = lemma1_milestones(trace, n, eps)
    sandwich_failures = check_sandwich(trace, eps)
    ok = (all(s['holds'] for s in steps) and all(m['holds'] for m in milestones.values())
          and not sandwich_failures)
    worst = max(steps, key=lambda s: s['value'].log2() - s['bound'].log2()) if steps else None
    extra = {
        'steps_checked': len(steps),
        'value': worst['value'] if worst else None,
        'bound': worst['bound'] if worst else None,
        'worst_k': worst['k'] if worst else None,
        'milestones': {name: {'k': m['k'], 'value': m['value'], 'limit': m['limit'], 'holds': m['holds']}
                       for name, m in milestones.items()},
        'sandwich_failures': len(sandwich_failures),
    }
    if eps == 0.0:
        exact = boost_exact(d0, N)
        extra['matches_exact'] = all(a == b for a, b in zip(trace.d, exact.d))
        ok = ok and extra['matches_exact']
    return _cell('lemma1', params, HOLDS if ok else VIOLATED, **extra)


def lemma1_eps_values(n, offsets, include_zero):
    values = [2.0 ** -(n + o) for o in sorted(set(offsets))]
    return ([0.0] if include_zero else []) + values


# =================== LEMMA 2 ===================

def lemma2_cell(eps):
    if not 0.0 < eps < 1.0:
        return _cell('lemma2', {'eps': eps}, HYPOTHESIS_VIOLATED, reason='needs 0 < eps < 1')
    # last k with a positive bound: 2^k - 1 < 1/eps
    k_max = 0
    while (2 ** (k_max + 1) - 1) * Fraction(eps) < 1:
        k_max += 1
    trace = boost_approx(ExtProb.one(), k_max, NoiseModel.fixed_minus(eps))
    cells = check_lemma2(trace, eps)
    with mpmath.workprec(256):
        d1 = trace.d[1].to_mpf() if k_max >= 1 else mpmath.mpf(1)
        one_ulp = mpmath.ldexp(mpmath.mpf(1), trace.d[1].exp2 - 53) if k_max >= 1 else mpmath.mpf(0)
        d1_exact = abs(d1 - (1 - mpmath.mpf(eps))) <= one_ulp
    ok = all(c['holds'] for c in cells) and bool(d1_exact)
    tightest = min(cells, key=lambda c: c['value'].to_float() - c['bound']) if cells else None
    return _cell('lemma2', {'eps': eps, 'N': k_max}, HOLDS if ok else VIOLATED,
                 steps_checked=len(cells), d1_exact=bool(d1_exact),
                 value=tightest['value'] if tightest else None,
                 bound=ExtProb.from_float(max(tightest['bound'], 0.0)) if tightest else None,
                 worst_k=tightest['k'] if tightest else None)


# =================== THEOREM 3 ===================

def theorem3_cell(n, level_offset, eps_offset):
    N, eps = n + level_offset, 2.0 ** -(n + eps_offset)
    params = {'n': n, 'N': N, 'eps': eps}
    try:
        report = theorem3_report(n, N, eps)
    except HypothesisError as e:
        return _cell('theorem3', params, HYPOTHESIS_VIOLATED, reason=str(e))
    ok = report.holds
    extra = {'value': report.observed_error, 'bound': report.P_err_bound, 'which_max': report.which_max,
             'term_sat': report.term_sat, 'term_unsat': report.term_unsat}
    if level_offset == 4:
        quarter = report.milestones.get('d_{n+4} < 1/4 - 3eps')
        extra['quarter_milestone'] = bool(quarter and quarter['holds'])
        ok = ok and extra['quarter_milestone']
    if level_offset == 12:
        extra['below_2^-49.5'] = report.P_err_bound < THEOREM3_DOMINANT_LIMIT
        ok = ok and extra['below_2^-49.5']
    return _cell('theorem3', params, HOLDS if ok else VIOLATED, **extra)


# =================== DRIVER ===================

def run_bounds(grid: SweepGrid, workers: int = 1, run_id=None) -> dict:
    tasks = []
    for job in theorem1_jobs(grid, workers):
        tasks.append(lambda job=job: _theorem1_cells(*job))
    tasks.append(limit_sequence_cells)
    for n in grid.lemma1_n:
        for eps in lemma1_eps_values(n, grid.lemma1_eps_offsets, grid.include_zero_eps):
            tasks.append(lambda n=n, eps=eps: [lemma1_cell(n, eps, grid.lemma1_extra_levels)])
    for eps in grid.lemma2_eps:
        tasks.append(lambda eps=eps: [lemma2_cell(eps)])
    for n in grid.lemma1_n:
        for level_offset, eps_offset in THEOREM3_SETTINGS:
            tasks.append(lambda n=n, a=level_offset, b=eps_offset: [theorem3_cell(n, a, b)])

    # mpmath precision is process-global: cells run serially, workers only feed model counting
    with PerformanceMonitor.timed('bounds_sweep'):
        cells: List[dict] = [cell for task in tasks for cell in task()]

    cells.sort(key=_cell_order)
    summary = {status: 0 for status in (HOLDS, VIOLATED, HYPOTHESIS_VIOLATED, NOT_APPLICABLE)}
    for cell in cells:
        summary[cell['status']] += 1
    log_structured('INFO', 'Bounds sweep finished', run_id, cells=len(cells), **{
        k.replace('-', '_'): v for k, v in summary.items()})
    if summary[VIOLATED]:
        log_structured('ERROR', 'Bound violations found', run_id, violated=summary[VIOLATED])
    return {'cells': cells, 'summary': summary, 'all_hold': summary[VIOLATED] == 0}


_FAMILY_ORDER = {'theorem1': 0, 'limit_sequence': 1, 'lemma1': 2, 'lemma2': 3, 'theorem3': 4}


def _cell_order(cell):
    p = cell['params']
    return (_FAMILY_ORDER[cell['family']], p.get('n', -1), p.get('source', ''), p.get('k_s', -1),
            p.get('eps', -1.0), p.get('N', -1))


def cells_to_rows(cells):
    """Flat CSV rows: family, n, k_s, eps, N, status, value, bound."""
    for cell in cells:
        p = cell['params']
        value, bound = cell.get('value'), cell.get('bound')
        yield [cell['family'], p.get('n', ''), p.get('k_s', ''), p.get('eps', ''), p.get('N', ''),
               cell['status'],
               value.decimal(17) if isinstance(value, ExtProb) else '',
               bound.decimal(17) if isinstance(bound, ExtProb) else '']
