from commands.alb import alb_cmd
from commands.bounds import bounds_cmd
from commands.nogo import nogo_cmd
from commands.resources import resources_cmd
from commands.sample import sample_cmd
from commands.solve import solve_cmd

ALL_COMMANDS = (solve_cmd, alb_cmd, bounds_cmd, sample_cmd, nogo_cmd, resources_cmd)


def register_commands(group):
    for command in ALL_COMMANDS:
        group.add_command(command)
