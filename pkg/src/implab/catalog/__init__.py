"""Catalogue of example systems.

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""


from .catalog import canonical_scenario, run_catalog
