"""Grid definition, discrete Fourier transform pair, norms, and symbol functions.

Everything here operates on the discrete torus: N+1 equispaced nodes x_j = j*h
with mesh h = 1/(N+1) and periodic identification, N even.  Fourier modes carry
the symmetric signed index k = -N/2..N/2; because N+1 is odd these N+1 modes are
a complete orthogonal basis (each signed index hits a distinct residue mod N+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "GridVector",
    "SpectralVector",
    "Quadruple",
    "PairPhaseSequence",
    "make_grid",
    "dft",
    "idft",
    "lp_norm",
    "laplacian_symbol",
    "laplacian_symbol_values",
    "phase_mismatch",
    "phase_mismatch_factored",
    "dissipation_sum",
    "pair_phase_sequence",
    "pair_phase_gap",
    "pair_phase_difference",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with N+1 nodes and mesh size h = 1/(N+1).

    N must be even and at least 2.  Mode indices run over k = -N/2..N/2.
    """

    N: int

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)):
            raise TypeError(f"N must be an integer, got {type(self.N).__name__}")
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if self.N % 2 != 0:
            raise ValueError(f"N must be even, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 1.0 / (self.N + 1)

    @property
    def num_nodes(self) -> int:
        return self.N + 1

    @property
    def max_mode(self) -> int:
        return self.N // 2

    def nodes(self) -> np.ndarray:
        """Node coordinates x_j = j*h, j = 0..N."""
        return np.arange(self.N + 1) * self.h

    def modes(self) -> np.ndarray:
        """Signed mode indices -N/2..N/2 in ascending order."""
        return np.arange(-self.max_mode, self.max_mode + 1)

    def mode_in_range(self, n: int) -> bool:
        return -self.max_mode <= n <= self.max_mode

    def require_mode(self, n: int) -> None:
        if not self.mode_in_range(n):
            raise ValueError(
                f"mode index {n} outside [-{self.max_mode}, {self.max_mode}] for N={self.N}"
            )


def make_grid(N: int) -> GridSpec:
    """Build the grid for an even mode-count parameter N (h = 1/(N+1))."""
    return GridSpec(N)


def _frozen_complex(values, length: int, what: str) -> np.ndarray:
    v = np.array(values, dtype=np.complex128, copy=True)
    if v.shape != (length,):
        raise ValueError(f"{what} must have shape ({length},), got {v.shape}")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class GridVector:
    """Complex values at the N+1 grid nodes (physical space, periodic)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _frozen_complex(self.values, self.grid.num_nodes, "values")
        )

    def __len__(self) -> int:
        return self.grid.num_nodes


@dataclass(frozen=True)
class SpectralVector:
    """Fourier coefficients indexed k = -N/2..N/2, stored flat with offset N/2."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coeffs", _frozen_complex(self.coeffs, self.grid.num_nodes, "coeffs")
        )

    def coeff(self, k: int) -> complex:
        """Coefficient of mode k (signed index)."""
        self.grid.require_mode(k)
        return complex(self.coeffs[k + self.grid.max_mode])

    def __len__(self) -> int:
        return self.grid.num_nodes

    @classmethod
    def from_modes(cls, grid: GridSpec, entries: dict[int, complex]) -> "SpectralVector":
        """Build a spectral vector from a sparse {mode: coefficient} mapping."""
        coeffs = np.zeros(grid.num_nodes, dtype=np.complex128)
        for k, v in entries.items():
            grid.require_mode(k)
            coeffs[k + grid.max_mode] = v
        return cls(grid, coeffs)


@dataclass(frozen=True)
class Quadruple:
    """Four mode indices; the resonance flag records whether n1+n2 = n3+n4."""

    n1: int
    n2: int
    n3: int
    n4: int

    @property
    def is_resonant(self) -> bool:
        return self.n1 + self.n2 == self.n3 + self.n4

    def indices(self) -> tuple[int, int, int, int]:
        return (self.n1, self.n2, self.n3, self.n4)


@lru_cache(maxsize=64)
def _bin_order(N: int) -> np.ndarray:
    # flat index i (mode k = i - N/2) -> FFT bin k mod (N+1)
    idx = (np.arange(N + 1) - N // 2) % (N + 1)
    idx.setflags(write=False)
    return idx


def dft(v: GridVector) -> SpectralVector:
    """Forward transform: coeff(k) = h * sum_j v_j exp(-2*pi*i*k*j*h)."""
    g = v.grid
    bins = np.fft.fft(v.values)
    return SpectralVector(g, g.h * bins[_bin_order(g.N)])


def idft(s: SpectralVector) -> GridVector:
    """Inverse transform: v_j = sum_k coeff(k) exp(2*pi*i*k*j*h)."""
    g = s.grid
    bins = np.empty(g.num_nodes, dtype=np.complex128)
    bins[_bin_order(g.N)] = s.coeffs
    return GridVector(g, g.num_nodes * np.fft.ifft(bins))


def dft_direct(v: GridVector) -> SpectralVector:
    """O(N^2) direct-summation transform; reference oracle for :func:`dft`."""
    g = v.grid
    j = np.arange(g.num_nodes)
    ks = g.modes()
    phases = np.exp(-2j * np.pi * g.h * np.outer(ks, j))
    return SpectralVector(g, g.h * phases @ v.values)


def lp_norm(v: GridVector, p: float) -> float:
    """Discrete L^p norm (h * sum_j |v_j|^p)^(1/p); p = inf gives max modulus."""
    if math.isinf(p) and p > 0:
        return float(np.max(np.abs(v.values))) if len(v) else 0.0
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mags = np.abs(v.values)
    return float((v.grid.h * np.sum(mags**p)) ** (1.0 / p))


def laplacian_symbol(grid: GridSpec, n: int) -> float:
    """Eigenvalue of the negative discrete Laplacian on mode n.

    Equals 4*(N+1)^2 * sin^2(n*pi/(N+1)); even in n, zero only at n = 0,
    and changes convexity near |n| = (N+1)/4 (unlike the continuous symbol).
    """
    grid.require_mode(n)
    M = grid.num_nodes
    return 4.0 * M * M * math.sin(math.pi * n / M) ** 2


def laplacian_symbol_values(grid: GridSpec) -> np.ndarray:
    """Symbol evaluated on all modes -N/2..N/2, flat-indexed like coefficients."""
    M = grid.num_nodes
    ns = grid.modes()
    return 4.0 * M * M * np.sin(np.pi * ns / M) ** 2


def _require_quadruple_modes(grid: GridSpec, q: Quadruple) -> None:
    for n in q.indices():
        grid.require_mode(n)


def phase_mismatch(grid: GridSpec, q: Quadruple) -> float:
    """Beat frequency of a quadruple: symbol(n1) + symbol(n2) - symbol(n3) - symbol(n4).

    Antisymmetric under swapping the halves (n1,n2) <-> (n3,n4).
    """
    _require_quadruple_modes(grid, q)
    p = lambda n: laplacian_symbol(grid, n)
    return p(q.n1) + p(q.n2) - p(q.n3) - p(q.n4)


def phase_mismatch_factored(grid: GridSpec, q: Quadruple) -> float:
    """Trigonometric product form of :func:`phase_mismatch` for resonant quadruples.

    Requires n1+n2 = n3+n4.  The cosine factor vanishes when the shared pair sum
    sits at the convexity-change point (N+1)/2 of the doubled argument, which is
    what makes near-concentrated quadruples nearly stationary.
    """
    _require_quadruple_modes(grid, q)
    if not q.is_resonant:
        raise ValueError(f"quadruple {q.indices()} is not resonant (n1+n2 != n3+n4)")
    M = grid.num_nodes
    return (
        8.0
        * M
        * M
        * math.cos(math.pi * (q.n1 + q.n2) / M)
        * math.sin(math.pi * (q.n1 - q.n2 + q.n3 - q.n4) / (2.0 * M))
        * math.sin(math.pi * (q.n1 - q.n2 - q.n3 + q.n4) / (2.0 * M))
    )


def dissipation_sum(grid: GridSpec, q: Quadruple) -> float:
    """Sum of the four symbol values; sets the damping rate of a quadruple term."""
    _require_quadruple_modes(grid, q)
    p = lambda n: laplacian_symbol(grid, n)
    return p(q.n1) + p(q.n2) + p(q.n3) + p(q.n4)


@dataclass(frozen=True)
class PairPhaseSequence:
    """Pair-phase exponents mu(n) = -symbol(n) - symbol(r-n) over a mode range."""

    r: int
    ns: np.ndarray
    values: np.ndarray
    gaps: np.ndarray  # values[i+1] - values[i]

    def __post_init__(self) -> None:
        for name in ("ns", "values", "gaps"):
            a = np.asarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def pair_phase_sequence(grid: GridSpec, r: int, lo: int, hi: int) -> PairPhaseSequence:
    """Evaluate mu(n) = -symbol(n) - symbol(r-n) for n = lo..hi with its gaps.

    Both n and r-n must stay inside the mode range for every n in [lo, hi].
    """
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    for n in (lo, hi):
        grid.require_mode(n)
        grid.require_mode(r - n)
    ns = np.arange(lo, hi + 1)
    M = grid.num_nodes
    p = lambda m: 4.0 * M * M * np.sin(np.pi * m / M) ** 2
    values = -(p(ns) + p(r - ns))
    return PairPhaseSequence(r=r, ns=ns, values=values, gaps=np.diff(values))


def pair_phase_gap(grid: GridSpec, r: int, n: int) -> float:
    """Closed form of the consecutive gap mu(n+1) - mu(n).

    Equals 8*(N+1)^2 * cos(pi*r/(N+1)) * sin(pi*(r-2n-1)/(N+1)) * sin(pi/(N+1)).
    """
    grid.require_mode(n)
    grid.require_mode(n + 1)
    grid.require_mode(r - n)
    grid.require_mode(r - n - 1)
    M = grid.num_nodes
    return (
        8.0
        * M
        * M
        * math.cos(math.pi * r / M)
        * math.sin(math.pi * (r - 2 * n - 1) / M)
        * math.sin(math.pi / M)
    )


def pair_phase_difference(grid: GridSpec, r: int, n: int, m: int) -> float:
    """Closed form of mu(m) - mu(n), i.e. the beat between pair (n, r-n) and (m, r-m).

    Identical to phase_mismatch on the quadruple (n, r-n, m, r-m):
    8*(N+1)^2 * cos(pi*r/(N+1)) * sin(pi*(n+m-r)/(N+1)) * sin(pi*(n-m)/(N+1)).
    Vanishes when n = m and when n + m = r.
    """
    for idx in (n, m, r - n, r - m):
        grid.require_mode(idx)
    M = grid.num_nodes
    return (
        8.0
        * M
        * M
        * math.cos(math.pi * r / M)
        * math.sin(math.pi * (n + m - r) / M)
        * math.sin(math.pi * (n - m) / M)
    )
