"""Persistent homology of graph filtrations over directed acyclic graphs."""

from .linalg import QQ, Matrix, PrimeField, Rationals, SparseEchelon, Subspace, parse_field
from .simplicial import GlobalComplex, HomologyBasis, SubcomplexMask, betti, close_under_faces
from .dagmodel import (CycleFound, DisconnectedSelector, FiltrationError, GraphFiltration,
                       InclusionViolated, ParseError, SimplexwiseDAG, SubgraphSelector,
                       path_filtration, refine_to_simplexwise, validate)
from .ssss import RankTable, all_pairs_rank, lattice_rank_invariants, standard_persistence
from .subgraph import (PersistenceResult, VertexState, add_edge, local_persistence_rank,
                       oracle_rank, persistence_rank, propagate)
from .gmodule import (GModule, PersistenceDiagram, bottleneck, diagram_from_ranks,
                      homology_module, is_elementary, module_dimension)
from .pipelines import (PointCloud, RadiusSchedule, build_comparison_graph, build_parallel_graph,
                        compare_shapes, rips_complex, subsample_persistence)

__version__ = "0.1.0"
