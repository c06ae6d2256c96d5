"""DOS fingerprints, Tanimoto similarity, sorted matrices, block statistics.

Spectra are discretized on an energy window around the Fermi level. In
raster mode each energy bin becomes a column of bits growing from zero up
to the binned DOS height; in vector mode the per-bin integrals are kept as
reals. Similarity is the Tanimoto coefficient of the flattened data.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

import numpy as np

DEFAULT_WINDOW = (-10.0, 10.0)
DEFAULT_GRID = (256, 64)

_XC_RANK = {"LDA": 0, "PBE": 1}
_TIER_RANK = {"light": 0, "tight": 1, "really_tight": 2}
_REL_RANK = {"ZORA": 0, "atomic_ZORA": 1, "none": 2}


@dataclass
class Spectrum:
    """A DOS curve: energies (eV, strictly ascending), dos (states/eV >= 0)."""

    energies: np.ndarray
    dos: np.ndarray
    fermi_energy: float

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.dos = np.asarray(self.dos, dtype=float)
        if self.energies.ndim != 1 or self.energies.shape != self.dos.shape:
            raise ValueError("energies and dos must be 1-D arrays of equal length")
        if self.energies.size < 2:
            raise ValueError("spectrum needs at least 2 points")
        if not np.all(np.diff(self.energies) > 0):
            raise ValueError("energies must be strictly ascending")
        if not np.all(self.dos >= 0):
            raise ValueError("dos values must be non-negative")
        if not (np.all(np.isfinite(self.energies)) and np.all(np.isfinite(self.dos))):
            raise ValueError("spectrum contains non-finite values")


@dataclass
class CalcMetadata:
    """Computational settings of one calculation (used as sort labels)."""

    xc: str
    n_kpt: int
    n_basis: int
    settings_tier: str
    relativistic: str

    def __post_init__(self):
        for name in ("xc", "settings_tier", "relativistic"):
            if not getattr(self, name):
                raise ValueError(f"CalcMetadata.{name} must be set")
        if self.relativistic not in _REL_RANK:
            raise ValueError(
                f"relativistic must be one of {sorted(_REL_RANK)}, "
                f"got {self.relativistic!r}"
            )
        if self.n_kpt < 1 or self.n_basis < 1:
            raise ValueError("n_kpt and n_basis must be positive")

    def sort_key(self):
        xc = _XC_RANK.get(self.xc)
        tier = _TIER_RANK.get(self.settings_tier)
        return (
            (xc, "") if xc is not None else (len(_XC_RANK), self.xc),
            self.n_kpt,
            (tier, "") if tier is not None else (len(_TIER_RANK), self.settings_tier),
            self.n_basis,
            _REL_RANK[self.relativistic],
        )


@dataclass
class Fingerprint:
    """Discretized spectrum: bit raster (bool, n_energy x n_dos) or real vector."""

    window: tuple[float, float]
    grid: tuple[int, int]
    mode: str
    data: np.ndarray

    def same_config(self, other: "Fingerprint") -> bool:
        return (
            self.window == other.window
            and self.grid == other.grid
            and self.mode == other.mode
        )


@dataclass
class SimilarityMatrix:
    values: np.ndarray
    ordering: list[int]          # row index -> original input index
    labels: list[CalcMetadata]

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _bin_integrals(x: np.ndarray, y: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Integral of the piecewise-linear curve (x, y) over each [e_i, e_{i+1}).

    The curve is treated as zero outside its data range; no extrapolation.
    """
    inner = x[(x > edges[0]) & (x < edges[-1])]
    pts = np.unique(np.concatenate([edges, inner]))
    vals = np.interp(pts, x, y, left=0.0, right=0.0)
    widths = np.diff(pts)
    seg = 0.5 * (vals[:-1] + vals[1:]) * widths
    mids = 0.5 * (pts[:-1] + pts[1:])
    seg[(mids < x[0]) | (mids > x[-1])] = 0.0  # segments outside the data range
    which = np.searchsorted(edges, mids) - 1
    heights = np.zeros(edges.size - 1)
    np.add.at(heights, which, seg)
    return heights


def bin_heights(
    spectrum: Spectrum, window: tuple[float, float], n_energy_bins: int
) -> np.ndarray:
    """Per-bin trapezoidal DOS integrals on the Fermi-shifted window."""
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must satisfy lo < hi, got {window}")
    if n_energy_bins < 1:
        raise ValueError("need at least one energy bin")
    shifted = spectrum.energies - spectrum.fermi_energy
    if shifted[-1] <= lo or shifted[0] >= hi:
        raise ValueError(
            f"window {window} does not overlap the spectrum range "
            f"[{shifted[0]:g}, {shifted[-1]:g}] after Fermi shift"
        )
    edges = np.linspace(lo, hi, n_energy_bins + 1)
    return _bin_integrals(shifted, spectrum.dos, edges)


def make_fingerprint(
    spectrum: Spectrum,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid: tuple[int, int] = DEFAULT_GRID,
    mode: str = "raster",
    h_max: Optional[float] = None,
) -> Fingerprint:
    """Fingerprint one spectrum.

    Raster mode needs the normalization ``h_max``; a column of height h
    gets floor(n_dos_bins * clamp(h, 0, h_max) / h_max) bits set. Use
    fingerprint_set() to share the set-wide default (max bin height over
    the compared spectra).
    """
    n_energy, n_dos = grid
    if n_energy < 1 or n_dos < 1:
        raise ValueError(f"grid dimensions must be >= 1, got {grid}")
    if mode not in ("raster", "vector"):
        raise ValueError(f"mode must be 'raster' or 'vector', got {mode!r}")
    heights = bin_heights(spectrum, window, n_energy)

    if mode == "vector":
        return Fingerprint(tuple(window), (n_energy, n_dos), mode, heights)

    if h_max is None:
        h_max = float(heights.max())
    if h_max < 0:
        raise ValueError("h_max must be non-negative")
    raster = np.zeros((n_energy, n_dos), dtype=bool)
    if h_max > 0:
        clamped = np.clip(heights, 0.0, h_max)
        n_bits = np.minimum((n_dos * clamped / h_max).astype(int), n_dos)
        for j, k in enumerate(n_bits):
            raster[j, :k] = True
    return Fingerprint(tuple(window), (n_energy, n_dos), mode, raster)


def fingerprint_set(
    spectra: Sequence[Spectrum],
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid: tuple[int, int] = DEFAULT_GRID,
    mode: str = "raster",
    h_max: Optional[float] = None,
) -> list[Fingerprint]:
    """Fingerprint a set of spectra with one shared normalization.

    When h_max is not given, the maximum bin height across the whole set
    is used, so rasters of different spectra are directly comparable.
    """
    if not spectra:
        raise ValueError("no spectra given")
    if mode == "raster" and h_max is None:
        all_heights = [bin_heights(s, window, grid[0]) for s in spectra]
        h_max = float(max(h.max() for h in all_heights))
    return [make_fingerprint(s, window, grid, mode, h_max) for s in spectra]


def tanimoto(f1: Fingerprint, f2: Fingerprint) -> float:
    """Tanimoto coefficient <a,b> / (<a,a> + <b,b> - <a,b>) in [0, 1].

    Both-all-zero fingerprints compare as 1.0 (defined limit).
    """
    if not f1.same_config(f2):
        raise ValueError("fingerprints have mismatched window/grid/mode")
    if f1.mode == "raster":
        a = f1.data.ravel()
        b = f2.data.ravel()
        ab = int(np.count_nonzero(a & b))
        aa = int(np.count_nonzero(a))
        bb = int(np.count_nonzero(b))
    else:
        a = f1.data.ravel()
        b = f2.data.ravel()
        ab = float(np.dot(a, b))
        aa = float(np.dot(a, a))
        bb = float(np.dot(b, b))
    denom = aa + bb - ab
    if denom == 0:
        return 1.0
    return ab / denom


def similarity_matrix(
    items: Sequence[tuple[Fingerprint, CalcMetadata]], n_workers: int = 1
) -> SimilarityMatrix:
    """Pairwise Tanimoto matrix; ordering is the identity permutation.

    The fill may be split across worker threads by row; every cell is
    computed by the same scalar routine, so the result is bit-identical
    for any worker count.
    """
    if not items:
        raise ValueError("need at least one (fingerprint, metadata) item")
    fps = [fp for fp, _ in items]
    labels = [md for _, md in items]
    for fp in fps[1:]:
        if not fp.same_config(fps[0]):
            raise ValueError("all fingerprints must share window/grid/mode")

    n = len(fps)
    values = np.ones((n, n))

    def fill_row(i: int):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = tanimoto(fps[i], fps[j])

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(fill_row, range(n)))
    else:
        for i in range(n):
            fill_row(i)
    return SimilarityMatrix(values=values, ordering=list(range(n)), labels=labels)


def sort_by_settings(m: SimilarityMatrix) -> SimilarityMatrix:
    """Permute rows/columns by (xc, n_kpt, settings_tier, n_basis, relativistic).

    LDA sorts before PBE, light < tight < really_tight, ZORA before
    atomic_ZORA; unknown tags sort after the known ones, alphabetically.
    """
    perm = sorted(range(m.n), key=lambda i: m.labels[i].sort_key())
    values = m.values[np.ix_(perm, perm)]
    return SimilarityMatrix(
        values=values,
        ordering=[m.ordering[p] for p in perm],
        labels=[m.labels[p] for p in perm],
    )


def block_stats(
    m: SimilarityMatrix, groups: Sequence[Hashable]
) -> dict[tuple[Hashable, Hashable], float]:
    """Mean similarity per (group_i, group_j) block.

    Diagonal entries are excluded from intra-group means; blocks left
    empty by that exclusion (singleton groups) are omitted.
    """
    if len(groups) != m.n:
        raise ValueError(
            f"groups must cover every index: got {len(groups)} for n={m.n}"
        )
    members: dict[Hashable, list[int]] = {}
    for i, g in enumerate(groups):
        members.setdefault(g, []).append(i)

    out: dict[tuple[Hashable, Hashable], float] = {}
    for gi, rows in members.items():
        for gj, cols in members.items():
            if gi == gj:
                vals = [m.values[i, j] for i in rows for j in cols if i != j]
            else:
                vals = [m.values[i, j] for i in rows for j in cols]
            if vals:
                out[(gi, gj)] = float(np.mean(vals))
    return out
