"""crosskit: weighted crossing numbers, cut-norm regularity and drawing transfer."""

from .errors import (BudgetError, CrosskitError, DomainError, ParseError,
                     RegionError, StructureError)
from .graph import (QuotientGraph, VertexPartition, WeightedGraph, averaged,
                    blow_up, complete_bipartite, complete_graph,
                    crossing_lower_bound, induced_subgraph, parse_graph,
                    quotient, random_graph, serialize_graph)

__version__ = "0.1.0"
