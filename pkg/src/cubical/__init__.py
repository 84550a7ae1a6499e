"""Finite CAT(0) cube complexes as median graphs: hyperplanes, gates, factor
systems, factored contact graphs, hierarchy paths and HHS audits."""

from .errors import *  # noqa: F401,F403
from .median import (Convexity, CubeComplex, Hyperplane, Subcomplex, ValidationReport,  # noqa: F401
                     convex_hull, crossing_set, diameter, distance, gate, gate_image, gate_map,
                     halfspace_hull, hyperplanes, interval, is_convex, median, separates,
                     subcomplex, validate_cube_complex)
from .generators import (ACCEPTANCE_FIXTURES, DefiningGraph, bridge_join, dumbbell,  # noqa: F401
                         export_complex, fixture, format_word, grid, import_complex,
                         named_graph, normal_form, parse_word, path_complex, product,
                         salvetti_ball, tree)
from .contact import (bottleneck_delta, collapse_contractibility, contact_graph,  # noqa: F401
                      crossing_graph, graph_geodesics, set_geodesics)
from .factors import (FactorSystem, classify_relation, color_factors,  # noqa: F401
                      factored_contact_graph, induced_factor_system, minimal_factor_system,
                      parallel_copies, parallel_decomposition, product_region, project_point,
                      raag_factor_system, rho, verify_factor_system)
from .hierarchy import (ProjectionTuple, consistency_check, distance_formula_rhs,  # noqa: F401
                        fit_distance_constants, hierarchy_path, length_comparison, realize,
                        tuple_of)
from .audit import AxiomReport, audit  # noqa: F401

__version__ = "0.1.0"
