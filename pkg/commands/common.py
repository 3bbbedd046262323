import functools

import click

from services.cnf_core import fingerprint, parse_dimacs
from services.config import BoostConfig, RunConfig
from services.errors import BoostError, ConfigError
from services.report_writer import write_csv, write_report
from utils.helpers import get_run_id, read_input_bytes
from utils.logging import configure_logging, log_structured
from utils.monitoring import Monitoring

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_FINDING = 3


def load_formula(cfg, run_id=None):
    if not cfg.formula:
        raise ConfigError('No formula given (pass a DIMACS path or set formula= in the config file)')
    f = parse_dimacs(read_input_bytes(cfg.formula))
    log_structured('INFO', 'Formula loaded', run_id, path=cfg.formula, n=f.n, m=f.m)
    return f


def formula_info(f, path=None):
    return {'path': path, 'n': f.n, 'm': f.m, 'fingerprint': fingerprint(f)}


def resolve_level(cfg, n):
    N = cfg.level if cfg.level is not None else n + cfg.level_offset
    if N > BoostConfig.LEVEL_MAX:
        raise ConfigError(f"level N={N} exceeds the trace limit {BoostConfig.LEVEL_MAX} (pass a smaller -N)")
    return N


def engine_command(command, local=()):
    """
    Shared body of every subcommand: merge config, run, emit a validated report, map to an exit status.

    The wrapped function takes (cfg, run_id, **local_options) and returns (payload, exit_code, csv),
    where csv is None or (header, rows).
    """
    def decorator(fn):
        @functools.wraps(fn)
        @click.pass_context
        def wrapper(ctx, **flags):
            obj = ctx.ensure_object(dict)
            configure_logging(obj.get('log_level') or 'INFO')
            run_id = get_run_id()
            local_values = {k: flags.pop(k) for k in local if k in flags}
            if obj.get('log_level'):
                flags['log_level'] = obj['log_level']
            try:
                cfg = RunConfig.from_file(obj.get('config_path'), flags)
                configure_logging(cfg.log_level)
                log_structured('INFO', 'Command started', run_id, command=command)
                payload, code, table = fn(cfg, run_id, **local_values)
                payload = {'command': command, 'run_id': run_id, **payload,
                           'runtime': Monitoring.log_runtime(run_id)}
                click.echo(write_report(payload, command, cfg.output))
                if cfg.csv and table is not None:
                    write_csv(cfg.csv, *table)
            except BoostError as e:
                log_structured('ERROR', 'Command failed', run_id, command=command, error=str(e))
                click.echo(f"Error: {e}", err=True)
                ctx.exit(EXIT_ERROR)
            ctx.exit(code)
        return wrapper
    return decorator


formula_argument = click.argument('formula', required=False, type=click.Path(dir_okay=False))
output_option = click.option('--output', '-o', default=None, help='Also write the JSON report here')
csv_option = click.option('--csv', default=None, help='Write a CSV table here')
workers_option = click.option('--workers', type=int, default=None, help='Worker threads')
