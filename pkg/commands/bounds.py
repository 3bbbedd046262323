import click

from commands.common import EXIT_FINDING, EXIT_OK, csv_option, engine_command, output_option, workers_option
from services.bound_sweeps import SweepGrid, cells_to_rows, run_bounds


@click.command('bounds')
@click.option('--thm1-n-range', default=None, help="n values for the Theorem 1 sweep, e.g. '1:12'")
@click.option('--thm1-extra-levels', type=int, default=None, help='Check N in [n, n + extra]')
@click.option('--thm1-random-instances', type=int, default=None, help='Random 3-CNF instances per n')
@click.option('--lemma1-n-range', default=None, help="n values for Lemma 1 and Theorem 3, e.g. '7:24'")
@click.option('--lemma1-extra-levels', type=int, default=None, help='Check k in [n, n + extra]')
@click.option('--lemma1-eps-offsets', default=None, help="eps = 2^-(n + o) for each o, e.g. '1,2'")
@click.option('--include-zero-eps/--no-include-zero-eps', default=None, help='Add the eps = 0 column')
@click.option('--lemma2-eps', default=None, help="Comma list, e.g. '1e-3,1e-6,2^-20'")
@click.option('--seed', type=int, default=None, help='Seed for the random instances')
@click.option('--enum-cap', type=int, default=None)
@workers_option
@output_option
@csv_option
@engine_command('bounds')
def bounds_cmd(cfg, run_id):
    """Sweep Theorems 1 and 3 and Lemmas 1 and 2. Exit 3 if any cell is violated."""
    grid = SweepGrid.from_run_config(cfg)
    result = run_bounds(grid, workers=cfg.workers, run_id=run_id)
    payload = {
        'grid': {
            'thm1_n': list(grid.thm1_n), 'thm1_extra_levels': grid.thm1_extra_levels,
            'thm1_random_instances': grid.thm1_random_instances,
            'lemma1_n': list(grid.lemma1_n), 'lemma1_extra_levels': grid.lemma1_extra_levels,
            'lemma1_eps_offsets': list(grid.lemma1_eps_offsets), 'include_zero_eps': grid.include_zero_eps,
            'lemma2_eps': list(grid.lemma2_eps), 'seed': grid.seed,
        },
        **result,
    }
    header = ['family', 'n', 'k_s', 'eps', 'N', 'status', 'value', 'bound']
    return payload, EXIT_OK if result['all_hold'] else EXIT_FINDING, (header, cells_to_rows(result['cells']))
