import click

from commands.common import (EXIT_FINDING, EXIT_NEGATIVE, EXIT_OK, csv_option, engine_command, formula_argument,
                             formula_info, load_formula, output_option, resolve_level, workers_option)
from services.boost_circuit import build_lb_circuit, report_resources
from services.exact_boost import BoostParams, decide_lb


@click.command('solve')
@formula_argument
@click.option('--level', '-N', type=int, default=None, help='Boosting level N (default n + level_offset)')
@click.option('--level-offset', type=int, default=None, help='N = n + offset when --level is absent')
@click.option('--fan-in', '-K', type=int, default=None, help='Gate fan-in K')
@click.option('--enum-cap', type=int, default=None, help='Largest n the model counter enumerates')
@click.option('--t-q', type=float, default=None, help='Time of one source draw')
@click.option('--t-k', type=float, default=None, help='Time of one K-gate layer')
@click.option('--t-c', type=float, default=None, help='Time of one clone call')
@workers_option
@output_option
@csv_option
@engine_command('solve')
def solve_cmd(cfg, run_id):
    """Run LB(N) on a DIMACS formula. Exit 0 satisfiable, 1 unsatisfiable."""
    f = load_formula(cfg, run_id)
    params = BoostParams(N=resolve_level(cfg, f.n), n=f.n, K=cfg.fan_in)
    circuit = build_lb_circuit(f, params, run_id)
    resources = report_resources(circuit, cfg.t_q, cfg.t_k, cfg.t_c)
    record = decide_lb(f, params, cap=cfg.enum_cap, workers=cfg.workers, run_id=run_id)

    payload = {
        'formula': formula_info(f, cfg.formula),
        'params': params,
        'k_s': record.k_s,
        'verdict': record.verdict,
        'satisfiable': record.satisfiable,
        'd0': record.d0,
        'd_N': record.d_N,
        'theorem1_bound': record.bound,
        'bound_holds': record.bound_holds,
        'trace': list(record.trace.d),
        'resources': resources,
    }
    if record.bound_holds is False:
        code = EXIT_FINDING
    else:
        code = EXIT_OK if record.satisfiable else EXIT_NEGATIVE
    rows = ([k, m, e, eps, value.decimal(17)] for (k, m, e, eps), value in zip(record.trace.rows(), record.trace.d))
    return payload, code, (['k', 'mantissa', 'exp2', 'eps', 'decimal'], rows)
