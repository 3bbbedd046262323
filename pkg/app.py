import click
from dotenv import load_dotenv

from commands import register_commands
from utils.logging import configure_logging, log_structured

# LB_WORK_BUDGET may come from a local .env
load_dotenv()


# =================== ENTRY POINT ===================

@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='key=value config file; explicit flags override it')
@click.option('--log-level', default=None, help='DEBUG, INFO, WARN or ERROR (logs go to stderr)')
@click.pass_context
def cli(ctx, config_path, log_level):
    """Simulate and verify cloning-based boosting for SAT."""
    ctx.ensure_object(dict)
    ctx.obj['config_path'] = config_path
    ctx.obj['log_level'] = log_level
    configure_logging(log_level or 'INFO')
    log_structured('DEBUG', 'CLI started', subcommand=ctx.invoked_subcommand, config=config_path)


# Register subcommands
register_commands(cli)

if __name__ == '__main__':
    cli()
