import click

from commands.common import (EXIT_FINDING, EXIT_NEGATIVE, EXIT_OK, csv_option, engine_command, formula_argument,
                             formula_info, load_formula, output_option, resolve_level, workers_option)
from services.approx_boost import (NoiseModel, boost_approx, check_sandwich, complement_error, precision_gap,
                                   theorem3_report)
from services.errors import HypothesisError
from services.exact_boost import initial_d0
from services.model_cache import ModelCache
from utils.logging import log_structured


@click.command('alb')
@formula_argument
@click.option('--level', '-N', type=int, default=None, help='Boosting level N (default n + level_offset)')
@click.option('--level-offset', type=int, default=None, help='N = n + offset when --level is absent')
@click.option('--noise', default=None, help='exact, fixed_plus, fixed_minus, uniform, adversarial_max, adversarial_min')
@click.option('--eps', type=float, default=None, help='Cloning approximation degree')
@click.option('--seed', type=int, default=None, help='Seed of the uniform noise stream')
@click.option('--enum-cap', type=int, default=None, help='Largest n the model counter enumerates')
@workers_option
@output_option
@csv_option
@engine_command('alb')
def alb_cmd(cfg, run_id):
    """
    Run ALB(N) on a DIMACS formula with an approximate cloner.

    Exit 0 satisfiable, 1 unsatisfiable, 3 if the run's error probability breaks the Theorem 3 bound.
    """
    f = load_formula(cfg, run_id)
    N = resolve_level(cfg, f.n)
    count = ModelCache.count(f, cap=cfg.enum_cap, workers=cfg.workers, run_id=run_id)
    noise = NoiseModel.from_name(cfg.noise, cfg.eps, cfg.seed)
    trace = boost_approx(initial_d0(count, f.n), N, noise, n=f.n)
    satisfiable = count.k_s > 0

    # wrong answer: D_N = 0 on a satisfiable formula, D_N = 1 on an unsatisfiable one
    error = trace.final if satisfiable else complement_error(trace.eps_used)

    theorem3, reason, bound_holds = None, None, None
    try:
        theorem3 = theorem3_report(f.n, N, noise.eps)
    except HypothesisError as e:
        reason = str(e)
    if theorem3 is not None:
        bound_holds = error < theorem3.P_err_bound

    sandwich = check_sandwich(trace, noise.eps)
    log_structured('INFO', 'ALB run', run_id, n=f.n, k_s=count.k_s, N=N, noise=noise.kind, eps=noise.eps,
                   error=error.decimal(), bound_holds=bound_holds)

    payload = {
        'formula': formula_info(f, cfg.formula),
        'params': trace.params,
        'k_s': count.k_s,
        'verdict': 'satisfiable' if satisfiable else 'unsatisfiable',
        'satisfiable': satisfiable,
        'd0': trace.d[0],
        'd_N': trace.final,
        'error_probability': error,
        'theorem3': theorem3,
        'theorem3_status': 'applies' if theorem3 is not None else 'hypothesis-violated',
        'theorem3_reason': reason,
        'bound_holds': bound_holds,
        'sandwich_failures': sandwich,
        'precision_gap': precision_gap(f.n),
        'trace': [{'k': k, 'd': value, 'eps': eps if eps != '' else None}
                  for (k, _, _, eps), value in zip(trace.rows(), trace.d)],
    }
    if bound_holds is False or sandwich:
        code = EXIT_FINDING
    else:
        code = EXIT_OK if satisfiable else EXIT_NEGATIVE
    rows = ([k, m, e, eps, value.decimal(17)] for (k, m, e, eps), value in zip(trace.rows(), trace.d))
    return payload, code, (['k', 'mantissa', 'exp2', 'eps', 'decimal'], rows)
