import itertools

import numpy as np
import pytest

from services.cnf_core import (Assignment, CnfFormula, Literal, count_models, evaluate, fingerprint, parse_dimacs,
                               random_kcnf, satisfied_mask, satisfying_table, serialize_dimacs)
from services.config import BoostConfig
from services.errors import CapacityError, DimacsParseError
from services.model_cache import ModelCache


def test_parse_worked_example(worked_formula):
    assert worked_formula.n == 4
    assert worked_formula.m == 2
    first, second = worked_formula.clauses
    assert first.literals == (Literal(2, True), Literal(3, True))
    assert [lit.to_dimacs() for lit in second.literals] == [1, 3, 2]


def test_count_worked_example(worked_formula):
    assert count_models(worked_formula).k_s == 10


def test_unsatisfiable_and_tautology(unsat_formula):
    assert count_models(unsat_formula).k_s == 0
    tautology = CnfFormula.from_lists(3, [[1, -1]])
    assert count_models(tautology).k_s == 8


@pytest.mark.parametrize("text,fragment", [
    ("1 2 0\n", "before the problem header"),
    ("c only comments\n", "missing problem header"),
    ("p cnf 2 1\np cnf 2 1\n1 0\n", "duplicate"),
    ("p cnf two 1\n1 0\n", "non-integer"),
    ("p dnf 2 1\n1 0\n", "malformed header"),
    ("p cnf 2 1\n0\n", "empty clause"),
    ("p cnf 2 1\n1 3 0\n", "exceeds n=2"),
    ("p cnf 2 1\n1 2\n", "not terminated"),
    ("p cnf 2 2\n1 2 0\n", "declares 2 clauses"),
    ("p cnf 2 1\n1 x 0\n", "not an integer"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(DimacsParseError) as exc:
        parse_dimacs(text)
    assert fragment in str(exc.value)


def test_parse_error_reports_line():
    with pytest.raises(DimacsParseError) as exc:
        parse_dimacs("c header next\np cnf 2 1\n1 5 0\n")
    assert exc.value.line == 3


def test_parse_accepts_bytes_comments_and_end_marker():
    f = parse_dimacs(b"c a\np cnf 3 2\n1 -2\n 3 0\nc between\n-1 0\n%\n0\n")
    assert f.m == 2
    assert [lit.to_dimacs() for lit in f.clauses[0].literals] == [1, -2, 3]


def test_repeated_literals_collapse_but_complements_stay():
    f = parse_dimacs("p cnf 2 1\n1 1 -1 2 0\n")
    assert [lit.to_dimacs() for lit in f.clauses[0].literals] == [1, -1, 2]


def test_serialize_parses_back_to_same_formula(worked_formula):
    again = parse_dimacs(serialize_dimacs(worked_formula))
    assert again == worked_formula
    assert fingerprint(again) == fingerprint(worked_formula)


def test_evaluate_rejects_wrong_length(worked_formula):
    with pytest.raises(ValueError):
        evaluate(worked_formula, Assignment((1, 0)))


def test_satisfied_mask_matches_evaluate(worked_formula):
    mask = satisfied_mask(worked_formula, np.arange(16, dtype=np.uint64))
    expected = [evaluate(worked_formula, Assignment.from_int(u, 4)) for u in range(16)]
    assert mask.tolist() == expected
    assert satisfying_table(worked_formula).sum() == 10


def test_assignment_int_encoding():
    a = Assignment.from_int(0b1010, 4)
    assert a.bits == (0, 1, 0, 1)
    assert a.to_int() == 0b1010


def test_count_models_capacity():
    f = CnfFormula.from_lists(12, [[1, 12]])
    with pytest.raises(CapacityError):
        count_models(f, cap=10)


def test_count_models_threaded_chunks_agree(monkeypatch, rng):
    f = random_kcnf(12, 30, rng)
    serial = count_models(f).k_s
    monkeypatch.setattr(BoostConfig, 'ENUM_CHUNK', 256)
    assert count_models(f, workers=4).k_s == serial


def test_model_cache_memoizes(worked_formula, monkeypatch):
    calls = []
    import services.model_cache as model_cache

    real = model_cache.count_models

    def counting(*args, **kwargs):
        calls.append(1)
        return real(*args, **kwargs)

    monkeypatch.setattr(model_cache, 'count_models', counting)
    assert ModelCache.count(worked_formula).k_s == 10
    assert ModelCache.count(parse_dimacs(serialize_dimacs(worked_formula))).k_s == 10
    assert len(calls) == 1


def _count_by_product(f):
    # independent enumeration: highest variable varies fastest, literals checked inline
    total = 0
    for bits in itertools.product((1, 0), repeat=f.n):
        values = bits[::-1]
        ok = True
        for clause in f.clauses:
            if not any((values[lit.var] == 0) if lit.negated else (values[lit.var] == 1) for lit in clause.literals):
                ok = False
                break
        total += ok
    return total


def test_counting_agrees_with_independent_enumeration(rng):
    for _ in range(500):
        n = int(rng.integers(1, 11))
        m = int(rng.integers(1, 4 * n + 2))
        f = random_kcnf(n, m, rng, k=int(rng.integers(1, 4)))
        assert count_models(f).k_s == _count_by_product(f)


@pytest.mark.parametrize("n", [13, 14, 15, 16])
def test_counting_agrees_with_independent_enumeration_at_larger_n(n, rng):
    f = random_kcnf(n, int(rng.integers(n, 3 * n)), rng)
    assert count_models(f).k_s == _count_by_product(f)


def test_dropping_clauses_never_unsatisfies(rng):
    for _ in range(60):
        n = int(rng.integers(1, 9))
        f = random_kcnf(n, int(rng.integers(1, 4 * n + 2)), rng)
        keep = rng.random(f.m) < 0.5
        keep[int(rng.integers(f.m))] = True
        sub = CnfFormula(n, tuple(c for c, k in zip(f.clauses, keep) if k))
        for u in range(2 ** n):
            a = Assignment.from_int(u, n)
            if evaluate(f, a):
                assert evaluate(sub, a)
        assert count_models(sub).k_s >= count_models(f).k_s


def test_random_kcnf_shape(rng):
    f = random_kcnf(5, 7, rng)
    assert f.n == 5 and f.m == 7
    assert all(len({lit.var for lit in c.literals}) == 3 for c in f.clauses)
