from lpstream.net.lattice import (
    CENTER,
    GUARD,
    MetricNet,
    NetConfig,
    NetIndex,
    flat_index,
    from_flat,
    guarded_ceil,
    nearest_multiple,
    net_size,
    snap,
    unsnap,
)
from lpstream.net.sparse import SparseMatrixNet, rank_combination, unrank_combination

__all__ = [
    "CENTER",
    "GUARD",
    "MetricNet",
    "NetConfig",
    "NetIndex",
    "SparseMatrixNet",
    "flat_index",
    "from_flat",
    "guarded_ceil",
    "nearest_multiple",
    "net_size",
    "rank_combination",
    "snap",
    "unrank_combination",
    "unsnap",
]
