import click

from commands.common import (EXIT_OK, csv_option, engine_command, formula_argument, formula_info, load_formula,
                             output_option, resolve_level, workers_option)
from services.approx_boost import NoiseModel
from services.mc_sampler import SamplerConfig, cost_report, sample_dN


@click.command('sample')
@formula_argument
@click.option('--level', '-N', type=int, default=None, help='Boosting level N (default n + level_offset)')
@click.option('--level-offset', type=int, default=None)
@click.option('--trials', type=int, default=None, help='Number of D_N draws')
@click.option('--seed', type=int, default=None, help='64-bit seed; each trial gets its own stream')
@click.option('--noise', default=None, help='exact, fixed_plus, fixed_minus, uniform, adversarial_max, adversarial_min')
@click.option('--eps', type=float, default=None, help='Cloning approximation degree')
@click.option('--strategy', default=None, help='auto, flat or tree')
@click.option('--work-budget', type=int, default=None, help='Max D_0 evaluations (2^N per draw)')
@click.option('--allow-large-level/--no-allow-large-level', default=None, help='Permit N above the level cap')
@click.option('--record-bits/--no-record-bits', default=None, help='Keep per-trial D_N bits for the CSV')
@workers_option
@output_option
@csv_option
@engine_command('sample')
def sample_cmd(cfg, run_id):
    """Monte Carlo D_N: every clone is a fresh draw, so one sample costs 2^N evaluations of D_0."""
    f = load_formula(cfg, run_id)
    noise = NoiseModel.from_name(cfg.noise, cfg.eps, cfg.seed)
    sampler = SamplerConfig(
        seed=cfg.seed, trials=cfg.trials, N=resolve_level(cfg, f.n), noise=noise, strategy=cfg.strategy,
        work_budget=cfg.effective_work_budget(), allow_large_level=cfg.allow_large_level,
        record_bits=cfg.record_bits, workers=cfg.workers,
    )
    result = sample_dN(f, sampler, run_id=run_id)
    payload = {
        'formula': formula_info(f, cfg.formula),
        'sampler': {'seed': sampler.seed, 'trials': sampler.trials, 'N': sampler.N, 'noise': noise,
                    'strategy': result.strategy},
        'result': result,
        'cost': cost_report(f.n, sampler.N, f.m, f.literal_count),
    }
    table = None
    if result.bits is not None:
        table = (['trial', 'D_N'], ([t, bit] for t, bit in enumerate(result.bits)))
    return payload, EXIT_OK, table
