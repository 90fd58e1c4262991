"""Grid-based 1-D quantum states and their observables.

Conventions: hbar = 1 internally, periodic grid, spectral momentum space.
The width parameter sigma of a Gaussian packet is the standard deviation of
the position *density* |psi|^2, i.e. Var(x) = sigma^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DomainError, GridMismatchError, NumericError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic spatial grid; n_points must be a power of two."""

    n_points: int
    x_min: float
    dx: float

    def __post_init__(self):
        n = self.n_points
        if n <= 0 or (n & (n - 1)) != 0:
            raise DomainError(f"n_points must be a positive power of two, got {n}")
        if not (np.isfinite(self.dx) and self.dx > 0 and np.isfinite(self.x_min)):
            raise DomainError("grid spacing must be finite and positive")

    @property
    def extent(self) -> float:
        return self.n_points * self.dx

    @property
    def x_max(self) -> float:
        return self.x_min + self.extent

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        """Spectral wavenumbers in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @classmethod
    def centered(cls, n_points: int, extent: float) -> "Grid1D":
        if n_points <= 0:
            raise DomainError(f"n_points must be positive, got {n_points}")
        dx = extent / n_points
        return cls(n_points=n_points, x_min=-extent / 2.0, dx=dx)


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    amps: np.ndarray  # complex128, length grid.n_points
    mass: float  # internal mass units (multiples of the nucleon mass)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"amps shape {amps.shape} does not match grid ({self.grid.n_points},)"
            )
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise DomainError(f"mass must be positive, got {self.mass}")
        amps.setflags(write=False)  # value-like: states never mutate in place
        object.__setattr__(self, "amps", amps)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def normalized(self) -> "WaveFunction":
        n2 = self.norm2()
        if not np.isfinite(n2) or n2 <= 0:
            raise DegeneracyError(f"cannot normalize state with norm^2 = {n2}")
        return WaveFunction(self.grid, self.amps / np.sqrt(n2), self.mass)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def with_amps(self, amps: np.ndarray) -> "WaveFunction":
        return WaveFunction(self.grid, amps, self.mass)

    def overlap(self, other: "WaveFunction") -> complex:
        """<self|other> by the grid quadrature."""
        _require_same_grid(self, other)
        return complex(np.vdot(self.amps, other.amps) * self.grid.dx)


@dataclass(frozen=True)
class HybridState:
    """Two-branch spin (x) pointer state: (up)*psi_up + (down)*psi_down."""

    branch_up: WaveFunction
    branch_down: WaveFunction

    def __post_init__(self):
        _require_same_grid(self.branch_up, self.branch_down)

    def norm2(self) -> float:
        return self.branch_up.norm2() + self.branch_down.norm2()

    def weights(self) -> tuple[float, float]:
        return self.branch_up.norm2(), self.branch_down.norm2()

    def normalized(self) -> "HybridState":
        n2 = self.norm2()
        if not np.isfinite(n2) or n2 <= 0:
            raise DegeneracyError(f"cannot normalize hybrid state with norm^2 = {n2}")
        s = 1.0 / np.sqrt(n2)
        return HybridState(
            self.branch_up.with_amps(self.branch_up.amps * s),
            self.branch_down.with_amps(self.branch_down.amps * s),
        )


def _require_same_grid(a: WaveFunction, b: WaveFunction) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
    if a.mass != b.mass:
        raise GridMismatchError(f"masses differ: {a.mass} vs {b.mass}")


def gaussian_packet(
    grid: Grid1D, x0: float, p0: float, sigma: float, mass: float
) -> WaveFunction:
    """Normalized minimum-uncertainty packet with Var(x) = sigma^2, <p> = p0.

    The 6-sigma support rule is a hard precondition: aliasing through the
    periodic boundary silently corrupts every downstream statistic.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive, got {sigma}")
    if x0 - 6.0 * sigma < grid.x_min:
        raise DomainError(
            f"packet support overflows the grid on the low side: "
            f"x0 - 6 sigma = {x0 - 6 * sigma} < x_min = {grid.x_min}"
        )
    if x0 + 6.0 * sigma > grid.x_max:
        raise DomainError(
            f"packet support overflows the grid on the high side: "
            f"x0 + 6 sigma = {x0 + 6 * sigma} > x_max = {grid.x_max}"
        )
    x = grid.x
    amps = np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x)
    psi = WaveFunction(grid, amps, mass)
    return psi.normalized()


def superpose(
    a: WaveFunction, b: WaveFunction, ca: complex, cb: complex
) -> WaveFunction:
    """Normalized ca*a + cb*b; raises DegeneracyError on exact cancellation."""
    _require_same_grid(a, b)
    amps = ca * a.amps + cb * b.amps
    out = WaveFunction(a.grid, amps, a.mass)
    n2 = out.norm2()
    if n2 < 1e-24:
        raise DegeneracyError(f"superposition has negligible norm^2 = {n2}")
    return out.normalized()


def observables(psi: WaveFunction, potential=None) -> dict[str, float]:
    """Spectral estimates of norm^2, <x>, Var(x), <p>, Var(p) and <H>.

    potential is a Potential from the propagator module (or None for free).
    """
    amps = psi.amps
    if not (np.all(np.isfinite(amps.real)) and np.all(np.isfinite(amps.imag))):
        raise NumericError("non-finite amplitudes")
    dx = psi.grid.dx
    rho = np.abs(amps) ** 2
    n2 = float(np.sum(rho) * dx)
    if n2 <= 0 or not np.isfinite(n2):
        raise NumericError(f"bad norm^2 = {n2}")
    x = psi.grid.x
    mean_x = float(np.sum(x * rho) * dx / n2)
    var_x = float(np.sum((x - mean_x) ** 2 * rho) * dx / n2)

    phi = np.fft.fft(amps)
    k = psi.grid.k
    rho_k = np.abs(phi) ** 2
    nk = float(np.sum(rho_k))
    mean_p = float(np.sum(k * rho_k) / nk)
    mean_p2 = float(np.sum(k**2 * rho_k) / nk)
    var_p = mean_p2 - mean_p**2

    kinetic = mean_p2 / (2.0 * psi.mass)
    if potential is None:
        v_mean = 0.0
    else:
        v = potential.values(psi.grid, psi.mass)
        v_mean = float(np.sum(v * rho) * dx / n2)
    return {
        "norm2": n2,
        "mean_x": mean_x,
        "var_x": var_x,
        "mean_p": mean_p,
        "var_p": var_p,
        "mean_p2": mean_p2,
        "energy": kinetic + v_mean,
    }
