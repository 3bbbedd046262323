import click

from commands.common import (EXIT_OK, engine_command, formula_argument, formula_info, load_formula, output_option,
                             resolve_level)
from services.boost_circuit import build_lb_circuit, circuit_to_json, report_resources
from services.exact_boost import BoostParams
from services.mc_sampler import cost_report


@click.command('resources')
@formula_argument
@click.option('--level', '-N', type=int, default=None)
@click.option('--level-offset', type=int, default=None)
@click.option('--fan-in', '-K', type=int, default=None)
@click.option('--t-q', type=float, default=None)
@click.option('--t-k', type=float, default=None)
@click.option('--t-c', type=float, default=None)
@click.option('--include-nodes/--no-include-nodes', default=False, help='Embed the full node list')
@output_option
@engine_command('resources', local=('include_nodes',))
def resources_cmd(cfg, run_id, include_nodes=False):
    """Build the LB(N) circuit and report gates, depth and the time model."""
    f = load_formula(cfg, run_id)
    params = BoostParams(N=resolve_level(cfg, f.n), n=f.n, K=cfg.fan_in)
    circuit = build_lb_circuit(f, params, run_id)
    report = report_resources(circuit, cfg.t_q, cfg.t_k, cfg.t_c)
    payload = {
        'formula': formula_info(f, cfg.formula),
        'resources': report,
        'cost': cost_report(f.n, params.N, f.m, f.literal_count),
    }
    if include_nodes:
        payload['circuit'] = circuit_to_json(circuit, report)
    return payload, EXIT_OK, None
