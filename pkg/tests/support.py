"""Shared builders for the test suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from realz import CorrelationPair, Distribution, Domain, enumerate_configurations


def single_site(cap: int, **kwargs) -> Domain:
    return Domain(distance=[[0.0]], occupancy_cap=(cap,), **kwargs)


def complete_domain(sites: int, cap: int = 1, spacing: float = 1.0, **kwargs) -> Domain:
    """Sites pairwise at the same distance (complete graph geometry)."""
    dist = np.full((sites, sites), spacing)
    np.fill_diagonal(dist, 0.0)
    return Domain(distance=dist, occupancy_cap=(cap,) * sites, **kwargs)


def pair_lattice_corr(rho: float, q: float) -> CorrelationPair:
    """Two-site lattice-gas correlations with common density and pair moment."""
    return CorrelationPair(
        rho1=np.array([rho, rho]),
        rho2=np.array([[0.0, q], [q, 0.0]]),
    )


def random_domain(rng, max_sites: int = 4, max_cap: int = 2, allow_exclusion: bool = True) -> Domain:
    sites = int(rng.integers(1, max_sites + 1))
    caps = tuple(int(rng.integers(1, max_cap + 1)) for _ in range(sites))
    dist = np.zeros((sites, sites))
    for i in range(sites):
        for j in range(i + 1, sites):
            dist[i, j] = dist[j, i] = float(rng.uniform(0.5, 2.0))
    exclusion = None
    if allow_exclusion and sites > 1 and rng.random() < 0.3:
        exclusion = float(rng.uniform(0.4, 1.2))
        caps = (1,) * sites
    return Domain(distance=dist, occupancy_cap=caps, exclusion_diameter=exclusion)


def random_distribution(rng, domain: Domain, exact: bool = False) -> Distribution:
    """Random finitely supported distribution on admissible configurations."""
    configs = enumerate_configurations(domain)
    count = int(rng.integers(1, min(len(configs), 6) + 1))
    chosen = sorted(rng.choice(len(configs), size=count, replace=False).tolist())
    if exact:
        raws = [int(rng.integers(1, 20)) for _ in chosen]
        total = sum(raws)
        weights = [Fraction(r, total) for r in raws]
    else:
        raws = rng.random(count) + 1e-3
        weights = (raws / raws.sum()).tolist()
    return Distribution(domain, tuple((configs[k], w) for k, w in zip(chosen, weights)))
