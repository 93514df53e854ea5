from .partition_manager import (
    PARTITIONERS,
    PartitionAssignment,
    PartitionMembers,
    assign_node,
    balance_factor,
    edge_cut,
    partition_graph,
    partition_hash,
    partition_parallel,
    partition_stream,
    proximity_first,
    proximity_second,
    read_partition,
)
from .stream_order import ORDERS, normalize_order, stream_order
