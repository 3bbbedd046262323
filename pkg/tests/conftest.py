import numpy as np
import pytest

from services.cnf_core import CnfFormula, parse_dimacs
from services.model_cache import ModelCache
from services.performance_monitor import PerformanceMonitor
from services.work_budget import WorkBudget

# (¬x3 ∨ ¬x4)(x1 ∨ x3 ∨ x2): 10 of 16 assignments satisfy it
WORKED_EXAMPLE = "c worked example\np cnf 4 2\n-3 -4 0\n1 3 2 0\n"
UNSAT_EXAMPLE = "p cnf 1 2\n1 0\n-1 0\n"


@pytest.fixture(autouse=True)
def reset_shared_state():
    ModelCache.clear()
    WorkBudget.reset()
    PerformanceMonitor.reset()
    yield


@pytest.fixture
def worked_formula():
    return parse_dimacs(WORKED_EXAMPLE)


@pytest.fixture
def unsat_formula():
    return parse_dimacs(UNSAT_EXAMPLE)


@pytest.fixture
def single_model_formula():
    """x1 x2 ... x8 as unit clauses: k_s = 1, n = 8."""
    return CnfFormula.from_lists(8, [[i] for i in range(1, 9)])


@pytest.fixture
def or_formula():
    return CnfFormula.from_lists(2, [[1, 2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def write_cnf(tmp_path):
    def _write(text, name='formula.cnf'):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write
