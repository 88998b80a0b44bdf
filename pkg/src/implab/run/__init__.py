"""Scenario runner.

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""


from .operations import DataFile, OpResult, RunContext, supported_operations
from .runner import Runner, config_hash, run_scenario
from .scenario import OPERATIONS, Scenario, load_scenario
