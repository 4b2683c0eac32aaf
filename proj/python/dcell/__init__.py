"""DCell Hamiltonian paths and cycles, partial deployments and broadcast."""

import json

from ._core import (
    DCellError,
    Listing,
    edge_list,
    edges,
    ft_hc,
    ft_hp,
    hp,
    is_kc_connected,
    partial_hp,
    simulate_json,
    t,
)


def simulate(n, k, scheme="flood", p=0.0, trials=1, seed=1, source=0):
    return json.loads(simulate_json(n, k, scheme, p, trials, seed, source))


__all__ = [
    "DCellError",
    "Listing",
    "edge_list",
    "edges",
    "ft_hc",
    "ft_hp",
    "hp",
    "is_kc_connected",
    "partial_hp",
    "simulate",
    "t",
]
