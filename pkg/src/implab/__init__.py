"""Implab scenario runner for impulsive dynamical systems.

Provides the command line application on top of the :mod:`impulsive`
library:
    - run: load a scenario, run one analysis and write its data files.
    - catalog: list the example systems and emit their scenario files.

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""

__version__ = "0.1.1"
