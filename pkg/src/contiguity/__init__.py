"""Contiguity classes of simplicial maps, Rips filtrations and persistence."""
from .complex import (SimplicialComplex, Subdivision, barycentric_subdivision, boundary, carrier,
                      circle, iterated_subdivision, make_complex, mesh_size, pinched_sphere,
                      point, product_complex, simplex, standard_complex, torus)
from .errors import CapExceededError, ComplexError, ContiguityError, FiltrationError, MapError
from .homology import Barcode, betti_numbers, persistence_pairs, persistent_homology
from .maps import (ClassPartition, ContiguityComplex, SimplicialMap, approximate_subdivision,
                   build_contiguity_complex, contiguous, enumerate_maps, exact_class_count,
                   exponential_transpose, exponential_untranspose, is_simplicial,
                   mutually_contiguous, verify_approximation)
from .montecarlo import (ClosedWalkSampler, EstimatorState, WalkCertificate, WalkConfig,
                         circle_walk_partition, estimate_class_count, exact_circle_class_count,
                         map_distance, same_class_walk, uniform_closed_walk)
from .persistence import (h0_barcode, persistent_contiguity_h0, persistent_subdivision_h0,
                          rips_h0)
from .rips import FiniteMetricSpace, RipsFiltration, critical_filtration, rips_complex, rips_contiguous

__version__ = "0.1.0"
