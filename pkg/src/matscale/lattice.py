"""Lattice configurations, clusters, symmetry orbits, and correlations.

Occupations are +/-1 vectors over crystal sites. A cluster is a site
subset; its cluster function is the product of the occupations it touches.
Correlations average the cluster function over the symmetry orbit, and a
model predicts a property as intercept + coefficients . features, where
the features are correlations or monomials of correlations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .polyfeatures import FeatureMap, evaluate_features


@dataclass(frozen=True)
class Cluster:
    """Strictly ascending site indices; the empty cluster is allowed."""

    sites: tuple[int, ...]

    def __init__(self, sites=()):
        sites = tuple(int(i) for i in sites)
        if any(i < 0 for i in sites):
            raise ValueError(f"site indices must be non-negative: {sites}")
        if any(a >= b for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites must be strictly ascending: {sites}")
        object.__setattr__(self, "sites", sites)

    def __len__(self):
        return len(self.sites)


class SymmetryGroup:
    """Explicit site-permutation group.

    Permutations map site i to perm[i]. Construction verifies, by brute
    force, that every element is a bijection, the identity is present,
    and the set is closed under composition.
    """

    def __init__(self, permutations: Sequence[Sequence[int]]):
        perms = np.asarray(permutations, dtype=int)
        if perms.ndim != 2 or perms.shape[0] < 1:
            raise ValueError("permutations must be a non-empty list of index lists")
        n = perms.shape[1]
        identity = np.arange(n)
        for p in perms:
            if not np.array_equal(np.sort(p), identity):
                raise ValueError(f"not a bijection on {n} sites: {p.tolist()}")
        elems = {tuple(p) for p in perms}
        if tuple(identity) not in elems:
            raise ValueError("group must contain the identity permutation")
        for p in perms:
            for q in perms:
                if tuple(p[q]) not in elems:  # (p o q)[i] = p[q[i]]
                    raise ValueError(
                        f"group not closed under composition: "
                        f"{p.tolist()} o {q.tolist()}"
                    )
        self.permutations = perms
        self.n_sites = n

    def __len__(self):
        return self.permutations.shape[0]

    @classmethod
    def identity(cls, n_sites: int) -> "SymmetryGroup":
        return cls([list(range(n_sites))])

    @classmethod
    def cyclic(cls, n_sites: int) -> "SymmetryGroup":
        """Rotations i -> i + k (mod n_sites)."""
        base = np.arange(n_sites)
        return cls([np.roll(base, -k) for k in range(n_sites)])

    @classmethod
    def generate(cls, generators: Sequence[Sequence[int]]) -> "SymmetryGroup":
        """Closure of the given generator permutations (brute-force BFS)."""
        gens = [tuple(int(i) for i in g) for g in generators]
        if not gens:
            raise ValueError("need at least one generator")
        n = len(gens[0])
        elems = {tuple(range(n))}
        frontier = list(elems)
        while frontier:
            new = []
            for e in frontier:
                for g in gens:
                    composed = tuple(g[e[i]] for i in range(n))
                    if composed not in elems:
                        elems.add(composed)
                        new.append(composed)
            frontier = new
        return cls(sorted(elems))


def as_occupations(s) -> np.ndarray:
    """Validate and return an occupation vector with entries in {-1, +1}."""
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("occupations must be a non-empty 1-D vector")
    arr = arr.astype(np.int64)
    if not np.all(np.abs(arr) == 1):
        raise ValueError("every occupation must be exactly -1 or +1")
    return arr


def apply_permutation(perm: Sequence[int], s) -> np.ndarray:
    """Transformed configuration s' with s'[perm[i]] = s[i]."""
    s = as_occupations(s)
    out = np.empty_like(s)
    out[np.asarray(perm, dtype=int)] = s
    return out


def cluster_function(c: Cluster, s) -> int:
    """Product of occupations over the cluster's sites; empty cluster -> 1."""
    s = as_occupations(s)
    if c.sites and c.sites[-1] >= s.size:
        raise ValueError(
            f"cluster touches site {c.sites[-1]} but config has {s.size} sites"
        )
    out = 1
    for i in c.sites:
        out *= int(s[i])
    return out


def orbit(c: Cluster, g: SymmetryGroup) -> set[Cluster]:
    """Distinct images of the cluster under every group element."""
    if c.sites and c.sites[-1] >= g.n_sites:
        raise ValueError(
            f"cluster touches site {c.sites[-1]} but group acts on {g.n_sites} sites"
        )
    return {Cluster(sorted(p[list(c.sites)])) for p in g.permutations}


def correlation(c: Cluster, g: SymmetryGroup, s) -> float:
    """Orbit-averaged cluster function, exactly in [-1, +1].

    The average runs over the distinct symmetry-equivalent clusters, not
    over group elements.
    """
    s = as_occupations(s)
    if s.size != g.n_sites:
        raise ValueError(f"config has {s.size} sites but group acts on {g.n_sites}")
    orb = sorted(orbit(c, g), key=lambda cl: cl.sites)
    total = sum(cluster_function(cl, s) for cl in orb)  # exact integer sum
    return total / len(orb)


def correlation_matrix(
    configs: Sequence, clusters: Sequence[Cluster], g: SymmetryGroup
) -> np.ndarray:
    """Row per configuration, column per cluster."""
    rows = [as_occupations(s) for s in configs]
    if any(r.size != g.n_sites for r in rows):
        raise ValueError("all configurations must match the group's site count")
    # Precompute orbit site-index arrays once per cluster.
    orbit_indices = []
    for c in clusters:
        orb = sorted(orbit(c, g), key=lambda cl: cl.sites)
        orbit_indices.append([np.array(cl.sites, dtype=int) for cl in orb])
    out = np.empty((len(rows), len(clusters)))
    for i, s in enumerate(rows):
        for j, idx_list in enumerate(orbit_indices):
            total = sum(int(np.prod(s[idx])) if idx.size else 1 for idx in idx_list)
            out[i, j] = total / len(idx_list)
    return out


@dataclass
class CeModel:
    """Sparse lattice model: correlations (or their monomials) times coefficients.

    feature_map=None means the features are the bare correlations, one per
    cluster; otherwise the correlations are expanded through the map's
    monomials first.
    """

    clusters: list[Cluster]
    coefficients: np.ndarray
    intercept: float = 0.0
    feature_map: Optional[FeatureMap] = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        q = (
            len(self.feature_map.monomials)
            if self.feature_map is not None
            else len(self.clusters)
        )
        if self.coefficients.shape != (q,):
            raise ValueError(
                f"expected {q} coefficients, got {self.coefficients.shape}"
            )
        if self.feature_map is not None and self.feature_map.p != len(self.clusters):
            raise ValueError(
                f"feature map expects {self.feature_map.p} base correlations "
                f"but model has {len(self.clusters)} clusters"
            )


def predict(model: CeModel, s, g: SymmetryGroup) -> float:
    """intercept + coefficients . features for one configuration."""
    x = correlation_matrix([s], model.clusters, g)[0]
    feats = x if model.feature_map is None else evaluate_features(x, model.feature_map)
    return float(model.intercept + np.dot(model.coefficients, feats))
