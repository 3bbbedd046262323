import csv
import json

import pytest
from click.testing import CliRunner

from app import cli
from tests.conftest import UNSAT_EXAMPLE, WORKED_EXAMPLE

SMALL_BOUNDS = ['--thm1-n-range', '1:3', '--thm1-extra-levels', '4', '--thm1-random-instances', '2',
                '--lemma1-n-range', '7:8', '--lemma1-extra-levels', '10', '--lemma2-eps', '1e-3']
SEVEN_VARS_SAT = "p cnf 7 2\n1 2 0\n-3 4 0\n"
SEVEN_VARS_UNSAT = "p cnf 7 2\n1 0\n-1 0\n"


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(cli, ['--log-level', 'ERROR', *args], catch_exceptions=False)
    return _run


def _report(result):
    return json.loads(result.output)


def test_solve_worked_example(run, write_cnf):
    result = run('solve', write_cnf(WORKED_EXAMPLE))
    assert result.exit_code == 0
    data = _report(result)
    assert data['command'] == 'solve'
    assert data['k_s'] == 10
    assert data['verdict'] == 'satisfiable'
    assert data['params']['N'] == 10
    assert data['bound_holds'] is True
    assert len(data['trace']) == 11
    assert data['resources']['gate_count']['CLONE'] == 10


def test_solve_unsatisfiable(run, write_cnf):
    result = run('solve', write_cnf(UNSAT_EXAMPLE), '-N', '5')
    assert result.exit_code == 1
    data = _report(result)
    assert data['verdict'] == 'unsatisfiable'
    assert data['d_N']['mantissa'] == 0.5 and data['d_N']['exp2'] == 1
    assert data['theorem1_bound'] is None


@pytest.mark.parametrize("text", ["p cnf 2 1\n1 3 0\n", "1 2 0\n", "p cnf 2 2\n1 0\n"])
def test_solve_malformed_input(run, write_cnf, text):
    result = run('solve', write_cnf(text))
    assert result.exit_code == 2
    assert 'Error:' in result.output


def test_solve_missing_file(run, tmp_path):
    result = run('solve', str(tmp_path / 'absent.cnf'))
    assert result.exit_code == 2
    assert 'not found' in result.output


def test_solve_writes_trace_csv(run, write_cnf, tmp_path):
    path = tmp_path / 'trace.csv'
    result = run('solve', write_cnf(WORKED_EXAMPLE), '-N', '3', '--csv', str(path))
    assert result.exit_code == 0
    with open(path, newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['k', 'mantissa', 'exp2', 'eps', 'decimal']
    assert len(rows) == 1 + 4
    assert [row[3] for row in rows[1:]] == ['0.0', '0.0', '0.0', '']


def test_solve_rejects_level_past_trace_limit(run, write_cnf):
    result = run('solve', write_cnf(WORKED_EXAMPLE), '-N', '4096')
    assert result.exit_code == 2
    assert 'level' in result.output


def test_alb_reports_theorem3_on_satisfiable_formula(run, write_cnf):
    result = run('alb', write_cnf(SEVEN_VARS_SAT), '--noise', 'plus', '--eps', '1e-3')
    assert result.exit_code == 0
    data = _report(result)
    assert data['command'] == 'alb'
    assert data['k_s'] == 72
    assert data['params']['N'] == 13 and data['params']['noise']['kind'] == 'fixed_plus'
    assert data['theorem3_status'] == 'applies'
    assert data['theorem3']['term_sat']['exp2'] == -7
    assert data['bound_holds'] is True
    assert data['error_probability'] == data['d_N']
    assert data['sandwich_failures'] == []
    assert data['precision_gap']['n'] == 7
    assert [step['eps'] for step in data['trace']] == [1e-3] * 13 + [None]


def test_alb_unsatisfiable_error_stays_under_the_unsat_term(run, write_cnf):
    result = run('alb', write_cnf(SEVEN_VARS_UNSAT), '--noise', 'minus', '--eps', str(2.0 ** -20))
    assert result.exit_code == 1
    data = _report(result)
    assert data['verdict'] == 'unsatisfiable'
    assert data['bound_holds'] is True
    error = data['error_probability']
    assert error['mantissa'] > 0
    assert -8 <= error['exp2'] <= -6


def test_alb_outside_hypotheses_still_runs(run, write_cnf):
    result = run('alb', write_cnf(WORKED_EXAMPLE), '--noise', 'plus', '--eps', '1e-3')
    assert result.exit_code == 0
    data = _report(result)
    assert data['theorem3'] is None
    assert data['theorem3_status'] == 'hypothesis-violated'
    assert data['theorem3_reason']
    assert data['bound_holds'] is None


def test_alb_trace_csv_carries_eps(run, write_cnf, tmp_path):
    path = tmp_path / 'alb.csv'
    result = run('alb', write_cnf(WORKED_EXAMPLE), '-N', '3', '--noise', 'plus', '--eps', '0.001',
                 '--csv', str(path))
    assert result.exit_code == 0
    with open(path, newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['k', 'mantissa', 'exp2', 'eps', 'decimal']
    assert [row[3] for row in rows[1:]] == ['0.001', '0.001', '0.001', '']


def test_alb_uniform_noise_is_seeded(run, write_cnf):
    path = write_cnf(SEVEN_VARS_SAT)
    first = _report(run('alb', path, '--noise', 'uniform', '--eps', '1e-3', '--seed', '8'))
    second = _report(run('alb', path, '--noise', 'uniform', '--eps', '1e-3', '--seed', '8'))
    assert first['trace'] == second['trace']
    assert all(abs(step['eps']) <= 1e-3 for step in first['trace'][:-1])


def test_solve_writes_report_file(run, write_cnf, tmp_path):
    path = tmp_path / 'report.json'
    result = run('solve', write_cnf(WORKED_EXAMPLE), '-o', str(path))
    assert json.loads(path.read_text()) == _report(result)


def test_bounds_small_grid(run):
    result = run('bounds', *SMALL_BOUNDS)
    assert result.exit_code == 0
    data = _report(result)
    assert data['all_hold'] is True
    assert data['summary']['violated'] == 0
    families = {cell['family'] for cell in data['cells']}
    assert families == {'theorem1', 'limit_sequence', 'lemma1', 'lemma2', 'theorem3'}
    zero_eps = [c for c in data['cells'] if c['family'] == 'lemma1' and c['params']['eps'] == 0.0]
    assert len(zero_eps) == 2
    assert all(c['matches_exact'] for c in zero_eps)


def test_bounds_outside_hypotheses(run):
    result = run('bounds', '--thm1-n-range', '1', '--thm1-extra-levels', '0', '--thm1-random-instances', '0',
                 '--lemma1-n-range', '5', '--lemma2-eps', '1e-3')
    assert result.exit_code == 0
    data = _report(result)
    flagged = [c for c in data['cells'] if c['family'] in ('lemma1', 'theorem3')]
    assert flagged and all(c['status'] == 'hypothesis-violated' for c in flagged)


def test_sample_report(run, write_cnf):
    result = run('sample', write_cnf(WORKED_EXAMPLE), '-N', '2', '--trials', '500', '--seed', '1')
    assert result.exit_code == 0
    data = _report(result)
    assert data['sampler']['strategy'] == 'flat'
    assert data['result']['trials'] == 500
    assert data['cost']['d0_draws_per_sample'] == 4


def test_sample_with_noise_uses_tree(run, write_cnf):
    result = run('sample', write_cnf(WORKED_EXAMPLE), '-N', '2', '--trials', '200', '--noise', 'plus',
                 '--eps', '0.01')
    assert result.exit_code == 0
    data = _report(result)
    assert data['sampler']['noise']['kind'] == 'fixed_plus'
    assert data['sampler']['strategy'] == 'tree'


def test_sample_over_budget(run, write_cnf):
    result = run('sample', write_cnf(WORKED_EXAMPLE), '-N', '20', '--trials', '100')
    assert result.exit_code == 2
    assert '2^20' in result.output


def test_sample_bits_csv(run, write_cnf, tmp_path):
    path = tmp_path / 'bits.csv'
    result = run('sample', write_cnf(WORKED_EXAMPLE), '-N', '1', '--trials', '30', '--record-bits',
                 '--csv', str(path))
    assert result.exit_code == 0
    with open(path, newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['trial', 'D_N']
    assert len(rows) == 31


def test_nogo_small_sweep(run):
    result = run('nogo', '--h-values', '1,2', '--trials', '20', '--seed', '1')
    assert result.exit_code == 0
    data = _report(result)
    assert data['report']['holds'] is True
    assert data['report']['trials'] == 20
    assert data['report']['h_values'] == [1, 2]


def test_nogo_rejects_large_register(run):
    result = run('nogo', '--h-values', '9', '--trials', '2')
    assert result.exit_code == 2


def test_resources_with_nodes(run, write_cnf):
    result = run('resources', write_cnf(WORKED_EXAMPLE), '-N', '2', '--include-nodes')
    assert result.exit_code == 0
    data = _report(result)
    assert data['resources']['time_model']['symbolic'] == '4*t_q + 5*t_K + 2*t_C'
    assert len(data['circuit']['nodes']) > 0


def test_config_file_merges_under_flags(run, write_cnf, tmp_path):
    config = tmp_path / 'run.env'
    config.write_text("trials=40\nlevel=1\nseed=4\n")
    path = write_cnf(WORKED_EXAMPLE)
    data = _report(run('--config', str(config), 'sample', path))
    assert data['sampler']['trials'] == 40 and data['sampler']['N'] == 1
    data = _report(run('--config', str(config), 'sample', path, '--trials', '25'))
    assert data['sampler']['trials'] == 25 and data['sampler']['seed'] == 4


def test_config_file_with_unknown_key(run, write_cnf, tmp_path):
    config = tmp_path / 'run.env'
    config.write_text("trails=40\n")
    result = run('--config', str(config), 'solve', write_cnf(WORKED_EXAMPLE))
    assert result.exit_code == 2
    assert "did you mean 'trials'" in result.output


def test_formula_from_config_file(run, write_cnf, tmp_path):
    config = tmp_path / 'run.env'
    config.write_text(f"formula={write_cnf(WORKED_EXAMPLE)}\nlevel=4\n")
    result = run('--config', str(config), 'solve')
    assert result.exit_code == 0
    assert _report(result)['params']['N'] == 4
