"""Exact spectral propagators for the conservative and viscous schemes.

Both schemes diagonalize in the discrete Fourier basis: mode k evolves as
exp(-(i + a) * t * symbol(k)) with a = 0 for the conservative dynamics and
a > 0 the numerical viscosity.  A classical RK4 integrator on the node-space
ODE system is provided as an independent oracle for the propagators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_core import (
    GridSpec,
    GridVector,
    SpectralVector,
    idft,
    laplacian_symbol_values,
)

__all__ = [
    "CONSERVATIVE",
    "VISCOUS",
    "SchemeConfig",
    "EvolutionState",
    "propagate",
    "solution_at_nodes",
    "ode_integrate",
    "split_low_high",
]

CONSERVATIVE = "conservative"
VISCOUS = "viscous"


@dataclass(frozen=True)
class SchemeConfig:
    """Selects the dynamics: conservative, or viscous with damping coefficient a.

    The viscosity is stored together with the grid so the ratio a/h (the
    quantity that must stay bounded away from zero for uniform estimates)
    is always reportable.
    """

    grid: GridSpec
    kind: str
    viscosity: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (CONSERVATIVE, VISCOUS):
            raise ValueError(f"unknown scheme kind: {self.kind!r}")
        if self.kind == VISCOUS:
            if self.viscosity is None or not self.viscosity > 0:
                raise ValueError("viscous scheme requires viscosity a > 0")
        elif self.viscosity is not None:
            raise ValueError("conservative scheme takes no viscosity")

    @classmethod
    def conservative(cls, grid: GridSpec) -> "SchemeConfig":
        return cls(grid, CONSERVATIVE)

    @classmethod
    def viscous(cls, grid: GridSpec, viscosity: float | None = None) -> "SchemeConfig":
        """Viscous dynamics; defaults to the rule a(h) = h (so a/h = 1)."""
        a = grid.h if viscosity is None else float(viscosity)
        return cls(grid, VISCOUS, a)

    @property
    def damping(self) -> float:
        """Damping coefficient multiplying the symbol (0 when conservative)."""
        return self.viscosity if self.kind == VISCOUS else 0.0

    @property
    def viscosity_ratio(self) -> float:
        """a / h, the mesh-relative viscosity (0 when conservative)."""
        return self.damping / self.grid.h

    def describe(self) -> str:
        if self.kind == CONSERVATIVE:
            return CONSERVATIVE
        return f"{VISCOUS} (a={self.damping:.6g}, a/h={self.viscosity_ratio:.6g})"


def _require_same_grid(u0: SpectralVector, config: SchemeConfig) -> None:
    if u0.grid != config.grid:
        raise ValueError(
            f"grid mismatch: data N={u0.grid.N}, scheme N={config.grid.N}"
        )


def propagate(u0: SpectralVector, t: float, config: SchemeConfig) -> SpectralVector:
    """Evolve the coefficients to time t: coeff(k) *= exp(-(i + a) * t * symbol(k))."""
    _require_same_grid(u0, config)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    p = laplacian_symbol_values(config.grid)
    factors = np.exp(-(1j + config.damping) * t * p)
    return SpectralVector(config.grid, u0.coeffs * factors)


def solution_at_nodes(u0: SpectralVector, t: float, config: SchemeConfig) -> GridVector:
    """Physical-space solution at time t (inverse transform of the propagated data)."""
    return idft(propagate(u0, t, config))


def _periodic_laplacian(values: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(values, -1) - 2.0 * values + np.roll(values, 1)) / (h * h)


def ode_integrate(
    u0: GridVector,
    T: float,
    config: SchemeConfig,
    dt: float | None = None,
) -> GridVector:
    """Integrate the node-space ODE system du/dt = (i + a) * Lap_h u with RK4.

    Periodic wraparound is applied at the stencil ends.  Serves as an oracle
    independent of the spectral propagator.  The explicit step must satisfy
    dt * 4/h^2 <= 0.5; the default dt = 0.1 * h^2/4 has margin 5x.
    """
    if u0.grid != config.grid:
        raise ValueError(f"grid mismatch: data N={u0.grid.N}, scheme N={config.grid.N}")
    if T < 0:
        raise ValueError(f"T must be nonnegative, got {T}")
    h = config.grid.h
    if dt is None:
        dt = 0.1 * h * h / 4.0
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt * 4.0 / (h * h) > 0.5:
        raise ValueError(
            f"dt={dt} violates the stability bound dt*4/h^2 <= 0.5 (h={h:.6g})"
        )
    if T == 0:
        return GridVector(u0.grid, u0.values)

    n_steps = max(1, math.ceil(T / dt - 1e-12))
    step = T / n_steps
    factor = 1j + config.damping

    def rhs(values: np.ndarray) -> np.ndarray:
        return factor * _periodic_laplacian(values, h)

    u = np.array(u0.values, dtype=np.complex128)
    for _ in range(n_steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * step * k1)
        k3 = rhs(u + 0.5 * step * k2)
        k4 = rhs(u + step * k3)
        u = u + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return GridVector(u0.grid, u)


def split_low_high(
    u: SpectralVector, cutoff: int | None = None
) -> tuple[SpectralVector, SpectralVector]:
    """Split into modes |k| <= cutoff (low) and the rest (high); low + high = u.

    The default cutoff N//8 keeps the problematic region near |k| = N/4 in the
    high-frequency part, where the viscous damping rate is of order (N+1)^2.
    """
    grid = u.grid
    if cutoff is None:
        cutoff = grid.N // 8
    if cutoff < 0 or cutoff > grid.max_mode:
        raise ValueError(f"cutoff must lie in [0, {grid.max_mode}], got {cutoff}")
    mask = np.abs(grid.modes()) <= cutoff
    low = np.where(mask, u.coeffs, 0.0)
    high = np.where(mask, 0.0, u.coeffs)
    return SpectralVector(grid, low), SpectralVector(grid, high)


@dataclass(frozen=True)
class EvolutionState:
    """A scheme, a time stamp, and the coefficients at that time."""

    config: SchemeConfig
    t: float
    coeffs: SpectralVector

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")
        _require_same_grid(self.coeffs, self.config)

    @classmethod
    def initial(cls, config: SchemeConfig, u0: SpectralVector) -> "EvolutionState":
        return cls(config, 0.0, u0)

    def advanced(self, dt: float) -> "EvolutionState":
        """State at time t + dt (dt >= 0)."""
        return EvolutionState(self.config, self.t + dt, propagate(self.coeffs, dt, self.config))

    def at_nodes(self) -> GridVector:
        return idft(self.coeffs)
