from fractions import Fraction

import mpmath
import numpy as np
import pytest

from services.cnf_core import CnfFormula, count_models, random_kcnf
from services.errors import BoundNotApplicableError, ConfigError
from services.exact_boost import (BoostParams, boost_exact, check_limit_sequence, decide_lb, initial_d0, plan_level,
                                  theorem1_bound)
from services.ext_prob import ExtProb


def test_initial_d0_worked_example():
    assert initial_d0(10, 4).to_fraction() == Fraction(3, 8)


@pytest.mark.parametrize("d0,expected", [(ExtProb.one(), ExtProb.one()), (ExtProb.zero(), ExtProb.zero())])
def test_fixed_points(d0, expected):
    trace = boost_exact(d0, 12)
    assert all(v == expected for v in trace.d)


def test_fifteen_sixteenths_to_the_1024():
    trace = boost_exact(ExtProb.from_fraction(Fraction(15, 16)), 10)
    with mpmath.workprec(256):
        expected = (mpmath.mpf(15) / 16) ** 1024
    assert trace.final.relative_error(expected) < 2.0 ** -50
    assert len(trace.d) == 11


def test_single_model_at_level_n_is_about_one_over_e():
    trace = boost_exact(initial_d0(1, 8), 8)
    with mpmath.workprec(256):
        expected = (1 - mpmath.mpf(1) / 256) ** 256
    assert trace.final.relative_error(expected) < 2.0 ** -50
    assert abs(trace.final.to_float() - 0.36716) < 1e-4


def test_exponent_beyond_double_range():
    trace = boost_exact(ExtProb(0.5), 200)
    assert trace.final.mantissa == 0.5
    assert trace.final.exp2 == -2 ** 200 + 1


def test_theorem1_constant_for_level_n_plus_6():
    bound = theorem1_bound(1, 10, 16)
    assert bound.relative_error(mpmath.exp(-64)) < 1e-12
    assert abs(bound.to_float() - 1.603811e-28) / 1.603811e-28 < 1e-6
    assert bound < ExtProb.from_float(1.61e-28)


def test_theorem1_needs_a_model():
    with pytest.raises(BoundNotApplicableError):
        theorem1_bound(0, 5, 5)


def test_theorem1_holds_on_random_and_crafted_instances():
    rng = np.random.default_rng(11)
    cases = []
    for i in range(200):
        n = 3 + i % 10
        f = random_kcnf(n, int(rng.integers(1, 3 * n)), rng)
        cases.append((count_models(f).k_s, n))
    for n in range(1, 13):
        cases += [(1, n), (min(2, 2 ** n), n), (2 ** n, n)]
    checked = 0
    for k_s, n in cases:
        if k_s == 0:
            continue
        trace = boost_exact(initial_d0(k_s, n), n + 16)
        for N in range(n, n + 17):
            assert trace.d[N] < theorem1_bound(k_s, n, N), (k_s, n, N)
            checked += 1
    assert checked > 200 * 17 // 2


def test_decide_worked_example(worked_formula):
    record = decide_lb(worked_formula, BoostParams(N=10, n=4))
    assert record.satisfiable
    assert record.verdict == 'satisfiable'
    assert record.k_s == 10
    assert record.bound_holds
    assert record.bound < ExtProb.from_float(1.61e-28)


def test_decide_unsatisfiable(unsat_formula):
    record = decide_lb(unsat_formula, BoostParams(N=7, n=1))
    assert not record.satisfiable
    assert record.d_N == ExtProb.one()
    assert record.bound is None
    assert record.bound_holds is None


def test_verdict_follows_model_count_when_d_N_is_near_one():
    f = CnfFormula.from_lists(20, [[i] for i in range(1, 21)])
    record = decide_lb(f, BoostParams(N=0, n=20))
    assert record.satisfiable


def test_plan_level():
    assert plan_level(10, 1.61e-28) == 16
    assert plan_level(10, 0.5) == 10


def test_limit_sequence_rises_to_supremum():
    result = check_limit_sequence(1, range(2, 3000))
    assert result['increasing'] and result['bounded']
    assert result['first_violation'] is None
    assert result['supremum'].relative_error(mpmath.exp(-1)) < 1e-15


@pytest.mark.parametrize("kwargs", [{'N': -1, 'n': 3}, {'N': 3, 'n': 3, 'K': 1}])
def test_params_validation(kwargs):
    with pytest.raises(ConfigError):
        BoostParams(**kwargs)


def test_trace_rows():
    trace = boost_exact(ExtProb(0.5), 2)
    rows = list(trace.rows())
    assert rows[0] == (0, 0.5, 0, 0.0)
    assert rows[-1][3] == ''
