from .graph_store import (
    CsrGraph,
    GraphFormatError,
    GraphValidationError,
    NodeIndexError,
    common_neighbor_count,
    load_csr,
    load_edge_list,
    save_csr,
    write_edge_list,
)
from .intersect import ContractViolation, intersect_count, intersect_galloping, intersect_linear
from .synthetic import clustered_powerlaw_graph, from_networkx, powerlaw_graph, two_cliques, with_random_weights
