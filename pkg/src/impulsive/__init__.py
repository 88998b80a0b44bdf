"""Collection of classes and functions to analyse impulsive dynamical systems.

An impulsive dynamical system follows the flow of a vector field until it
hits the impulsive region D, jumps by an impulse to the landing region Dhat
and continues. Vector fields are provided by the sub-package
:mod:`impulsive.fields`, cross-sections by :mod:`impulsive.section`.

The following modules provide the analyses:
    - semiflow: hitting times, trajectories, Poincaré maps and holonomies.
    - periodic: periodic orbits, hyperbolicity and hyperbolization.
    - chains: pseudo-orbit graphs, chain recurrence and perturbation boxes.
    - connect: closing of pseudo-orbits and the density experiment.
    - examples: catalogue of example systems with expected facts.

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""

from .common import (AnalysisError, BadParams, BoundaryHit, BudgetExceeded, ChartError, ClosingFailure, ConfigError,
                     ContinuationFailed, DomainError, GrazingHit, HyperbolizationFailed, IncompatibleSections,
                     InvalidSystem, MultipleCrossings, NoCrossing, NoReturn, NotFound, SingularityError,
                     SingularJacobian, StepError, SupportOutsideChart, UnknownExample, check_param,
                     check_valid_required)
from .fields import FIELD_KIND, Field, create_field, field_from_config
from .flow import FlowResult, IntegratorOpts, eval_field, flow, flow_with_jacobian
from .section import CrossSection, boundary_distance, chart_to_ambient, create_section, transversality_margin
from .impulse import (Bump, Impulse, ValidationReport, apply, bump_linear, bump_translate, c1_distance,
                      impulse_lipschitz, jacobian, support_clusters, translate_ratio, validate)
from .semiflow import (HitResult, ImpulsiveSystem, Trajectory, discontinuity_report, first_hit, holonomy,
                       min_flight_time, poincare, poincare_full, poincare_jacobian, tau1_derivative_sup, trajectory)
from .periodic import (ORBIT_TAG, PeriodicOrbit, audit_kupka_smale, classify, continue_orbit, find_periodic,
                       make_hyperbolic, minimal_orbit, same_orbit, trace_orbit)
from .chains import (BoxCertificate, PseudoOrbitGraph, TiledCube, build_graph, chain_reaches, chain_recurrent_ambient,
                     chain_recurrent_cells, hausdorff_distance, omega_estimate, tile_cube, transition_norm_bound,
                     verify_box)
from .connect import ClosingPlan, close_orbit, close_to_periodic, density_experiment, find_pseudo_orbit
from .examples import ExampleSpec, Fact, expected_facts, list_examples, make_example


__version__ = "0.1.1"
