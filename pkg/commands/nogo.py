import click

from commands.common import EXIT_FINDING, EXIT_OK, engine_command, output_option, workers_option
from services.unitary_nogo import verify_monotone
from utils.helpers import parse_int_range


@click.command('nogo')
@click.option('--h-values', default=None, help="Hidden register sizes, e.g. '1,2,3' or '1:3'")
@click.option('--trials', 'nogo_trials', type=int, default=None, help='Random instances per h')
@click.option('--seed', type=int, default=None)
@click.option('--control/--no-control', default=None, help='Also run the unconstrained control group')
@workers_option
@output_option
@engine_command('nogo')
def nogo_cmd(cfg, run_id):
    """Check that unitary steps with a magnitude fixed point never decrease d. Exit 3 on a violation."""
    report = verify_monotone(parse_int_range(cfg.h_values), cfg.nogo_trials, seed=cfg.seed,
                             control=cfg.control, workers=cfg.workers, run_id=run_id)
    return {'seed': cfg.seed, 'report': report}, EXIT_OK if report.holds else EXIT_FINDING, None
