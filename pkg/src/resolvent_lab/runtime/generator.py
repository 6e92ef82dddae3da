"""
Infinitesimal generators of holomorphic semigroups on the unit disk.

A generator is stored through its Berkson-Porta data,

    f(z) = (z - tau)(1 - z conj(tau)) p(z),   Re p >= 0,

where the Herglotz part p is either the Riesz-Herglotz integral of a finite
atomic measure plus i*gamma (``AtomicHerglotz``) or the subordination form
p = (q + conj(q) omega)/(1 - omega) with a Blaschke-structured Schwarz
function omega (``SchwarzHerglotz``). ``GeneratorSpec`` is the single source of
truth for f, f', f'', p and p'.

All evaluators accept a complex scalar or a numpy array and return the same
shape. Derivatives are closed-form; the only finite difference is p'' of the
Schwarz variant.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from ..errors import DomainError, OutOfRange
from ..schema.schema_model import CheckReport
from .grid import SamplingGrid, circle

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

SECOND_DERIVATIVE_STEP = 1e-6


def as_complex_array(z: ComplexLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def unwrap(arr: np.ndarray, scalar: bool):
    return complex(arr) if scalar else arr


def require_in_disk(z: np.ndarray, *, radius: float = 1.0, what: str = "point") -> None:
    bad = np.abs(z) >= radius
    if np.any(bad):
        first = complex(np.ravel(z)[np.argmax(np.ravel(bad))])
        raise DomainError(f"{what} {first} is outside the open disk of radius {radius:g}")


@dataclass(frozen=True)
class SchwarzFunction:
    """
    Finite Blaschke product omega(z) = rotation * z^power * prod_j (z - a_j)/(1 - conj(a_j) z).

    omega(0) = 0 and |omega| < 1 on the open disk hold by construction.
    ``vanishing`` flags the distinguished function omega = 0, which the
    product form cannot express.
    """

    rotation: complex = 1 + 0j
    zeros: tuple[complex, ...] = ()
    power: int = 1
    vanishing: bool = False

    def __post_init__(self) -> None:
        if self.vanishing:
            return
        if abs(abs(self.rotation) - 1.0) > 1e-12:
            raise ValueError(f"Schwarz rotation must be unimodular, got |{self.rotation}| = {abs(self.rotation)}")
        if self.power < 1:
            raise ValueError(f"Schwarz power must be >= 1, got {self.power}")
        for a in self.zeros:
            if abs(a) >= 1.0:
                raise ValueError(f"Blaschke zero {a} is not inside the unit disk")

    @classmethod
    def zero(cls) -> "SchwarzFunction":
        return cls(vanishing=True)

    @classmethod
    def identity(cls) -> "SchwarzFunction":
        return cls()

    @classmethod
    def from_angle(cls, rotation_angle: float = 0.0, *, power: int = 1, zeros: tuple[complex, ...] = ()) -> "SchwarzFunction":
        return cls(rotation=cmath.exp(1j * rotation_angle), zeros=tuple(zeros), power=power)

    def evaluate(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (omega(z), omega'(z)) by the product rule, without dividing by z."""
        if self.vanishing:
            return np.zeros_like(z), np.zeros_like(z)
        w = self.rotation * z**self.power
        dw = self.rotation * self.power * z ** (self.power - 1)
        for a in self.zeros:
            den = 1.0 - np.conj(a) * z
            b = (z - a) / den
            db = (1.0 - abs(a) ** 2) / den**2
            w, dw = w * b, dw * b + w * db
        return w, dw

    def __call__(self, z: ComplexLike):
        arr, scalar = as_complex_array(z)
        return unwrap(self.evaluate(arr)[0], scalar)

    def __repr__(self) -> str:
        if self.vanishing:
            return "<SchwarzFunction 0>"
        zeros = f" zeros={len(self.zeros)}" if self.zeros else ""
        return f"<SchwarzFunction rot={self.rotation:.6g} power={self.power}{zeros}>"


@dataclass(frozen=True)
class AtomicHerglotz:
    """
    p(z) = sum_k m_k (1 + z e^{-i theta_k})/(1 - z e^{-i theta_k}) + i gamma.

    Atoms are (angle, mass) pairs; angles are normalised to [0, 2 pi).
    """

    atoms: tuple[tuple[float, float], ...]
    gamma: float = 0.0

    kind = "atoms"

    def __post_init__(self) -> None:
        normalised = []
        for angle, mass in self.atoms:
            if not mass >= 0.0:
                raise ValueError(f"Herglotz atom at angle {angle} has negative mass {mass}")
            normalised.append((float(angle) % (2.0 * math.pi), float(mass)))
        if not any(m > 0.0 for _, m in normalised) and self.gamma == 0.0:
            raise ValueError("Herglotz measure is zero and gamma = 0: p would vanish identically")
        object.__setattr__(self, "atoms", tuple(normalised))

    @cached_property
    def _masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms], dtype=float)

    @cached_property
    def _conj_nodes(self) -> np.ndarray:
        return np.exp(-1j * np.array([a for a, _ in self.atoms], dtype=float))

    @property
    def q(self) -> complex:
        return complex(float(self._masses.sum()), self.gamma)

    @property
    def total_mass(self) -> float:
        return float(self._masses.sum())

    def evaluate(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = z[..., None] * self._conj_nodes
        one_minus = 1.0 - u
        p = np.sum(self._masses * (1.0 + u) / one_minus, axis=-1) + 1j * self.gamma
        dp = np.sum(self._masses * 2.0 * self._conj_nodes / one_minus**2, axis=-1)
        return p, dp

    def second_derivative(self, z: np.ndarray) -> np.ndarray:
        u = z[..., None] * self._conj_nodes
        return np.sum(self._masses * 4.0 * self._conj_nodes**2 / (1.0 - u) ** 3, axis=-1)

    def __repr__(self) -> str:
        return f"<AtomicHerglotz atoms={len(self.atoms)} q={self.q:.6g}>"


@dataclass(frozen=True)
class SchwarzHerglotz:
    """
    p(z) = (q + conj(q) omega(z)) / (1 - omega(z)) with Re q > 0.

    Re p = Re q (1 - |omega|^2)/|1 - omega|^2 >= 0 on the disk; omega = 0 gives
    the constant p = q.
    """

    q: complex
    omega: SchwarzFunction = SchwarzFunction(vanishing=True)

    kind = "schwarz"

    def __post_init__(self) -> None:
        if not self.q.real > 0.0:
            raise ValueError(f"Schwarz-form Herglotz part needs Re q > 0, got q = {self.q}")

    def evaluate(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w, dw = self.omega.evaluate(z)
        p = (self.q + np.conj(self.q) * w) / (1.0 - w)
        dp = 2.0 * self.q.real * dw / (1.0 - w) ** 2
        return p, dp

    def second_derivative(self, z: np.ndarray) -> np.ndarray:
        if self.omega.vanishing:
            return np.zeros_like(z)
        h = np.minimum(SECOND_DERIVATIVE_STEP, (1.0 - np.abs(z)) / 2.0)
        return (self.evaluate(z + h)[1] - self.evaluate(z - h)[1]) / (2.0 * h)

    def __repr__(self) -> str:
        return f"<SchwarzHerglotz q={self.q:.6g} omega={self.omega!r}>"


HerglotzData = Union[AtomicHerglotz, SchwarzHerglotz]


def herglotz_eval(h: HerglotzData, z: ComplexLike):
    """
    Evaluate the Herglotz part and its derivative.

    Parameters
    ----------
    h
        Herglotz data in either representation.
    z
        Point(s) of the open unit disk.

    Returns
    -------
    tuple
        ``(p(z), p'(z))``, complex scalars or arrays matching ``z``.

    Raises
    ------
    DomainError
        If some |z| >= 1.
    """
    arr, scalar = as_complex_array(z)
    require_in_disk(arr)
    p, dp = h.evaluate(arr)
    return unwrap(p, scalar), unwrap(dp, scalar)


def herglotz_second_derivative(h: HerglotzData, z: ComplexLike):
    arr, scalar = as_complex_array(z)
    require_in_disk(arr)
    return unwrap(h.second_derivative(arr), scalar)


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Berkson-Porta data (tau, p) of a generator f(z) = (z - tau)(1 - z conj(tau)) p(z).
    """

    herglotz: HerglotzData
    tau: complex = 0j
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", complex(self.tau))
        if abs(self.tau) > 1.0 + 1e-15:
            raise ValueError(f"Denjoy-Wolff point tau = {self.tau} lies outside the closed disk")

    @classmethod
    def linear(cls, q: complex = 1.0, *, label: str | None = "linear") -> "GeneratorSpec":
        """f(z) = q z, encoded canonically as the Schwarz form with omega = 0."""
        return cls(herglotz=SchwarzHerglotz(q=complex(q)), label=label)

    @classmethod
    def koebe(cls, q: complex = 1.0, *, label: str | None = "koebe") -> "GeneratorSpec":
        """f(z) = z (q + conj(q) z)/(1 - z); for q = 1 the Koebe-flow generator z(1+z)/(1-z)."""
        return cls(herglotz=SchwarzHerglotz(q=complex(q), omega=SchwarzFunction.identity()), label=label)

    @classmethod
    def from_atoms(
        cls,
        atoms: list[tuple[float, float]] | tuple[tuple[float, float], ...],
        gamma: float = 0.0,
        *,
        tau: complex = 0j,
        label: str | None = None,
    ) -> "GeneratorSpec":
        return cls(herglotz=AtomicHerglotz(atoms=tuple(atoms), gamma=gamma), tau=tau, label=label)

    @property
    def centered(self) -> bool:
        return self.tau == 0

    @property
    def interior_fixed_point(self) -> bool:
        return abs(self.tau) < 1.0

    @cached_property
    def q(self) -> complex:
        """f'(0); equals p(0) when tau = 0."""
        return complex(self.evaluate(np.zeros((), dtype=complex))[1])

    def require_centered(self) -> None:
        """Theorem checks need tau = 0 and Re f'(0) > 0."""
        if not self.centered:
            raise OutOfRange(f"generator {self.name} has tau = {self.tau}; theorem checks require tau = 0")
        if not self.q.real > 0.0:
            raise OutOfRange(f"generator {self.name} has Re q = {self.q.real}; theorem checks require Re q > 0")

    @property
    def name(self) -> str:
        return self.label or "<generator>"

    def _factor(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        tau_bar = np.conj(self.tau)
        h = (z - self.tau) * (1.0 - z * tau_bar)
        dh = 1.0 - 2.0 * z * tau_bar + abs(self.tau) ** 2
        return h, dh

    def evaluate(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(f, f') on an array already known to lie in the disk."""
        p, dp = self.herglotz.evaluate(z)
        if self.tau == 0:
            return z * p, p + z * dp
        h, dh = self._factor(z)
        return h * p, dh * p + h * dp

    def second_derivative(self, z: np.ndarray) -> np.ndarray:
        p, dp = self.herglotz.evaluate(z)
        d2p = self.herglotz.second_derivative(z)
        if self.tau == 0:
            return 2.0 * dp + z * d2p
        h, dh = self._factor(z)
        d2h = -2.0 * np.conj(self.tau)
        return d2h * p + 2.0 * dh * dp + h * d2p

    def __call__(self, z: ComplexLike):
        return generator_eval(self, z)[0]

    def __repr__(self) -> str:
        tau = "" if self.tau == 0 else f" tau={self.tau:.6g}"
        return f"<GeneratorSpec {self.name}{tau} q={self.q:.6g} {self.herglotz.kind}>"


def generator_eval(g: GeneratorSpec, z: ComplexLike):
    """
    Evaluate f and f' at point(s) of the open unit disk.

    Raises
    ------
    DomainError
        If some |z| >= 1.
    """
    arr, scalar = as_complex_array(z)
    require_in_disk(arr)
    f, df = g.evaluate(arr)
    return unwrap(f, scalar), unwrap(df, scalar)


def generator_second_derivative(g: GeneratorSpec, z: ComplexLike):
    arr, scalar = as_complex_array(z)
    require_in_disk(arr)
    return unwrap(g.second_derivative(arr), scalar)


def estimate_kappa(g: GeneratorSpec, *, n: int = 2048, radius: float = 1.0 - 1e-6) -> float:
    """
    Squeezing coefficient estimate: min Re p over a circle close to the boundary.

    Re p is harmonic, so its minimum over |z| <= radius sits on the circle.
    For purely atomic measures the infimum over the disk is 0 and this returns
    a small positive number of order 1 - radius.
    """
    p, _ = g.herglotz.evaluate(circle(radius, n))
    return float(np.min(p.real))


def validate_generator(g: GeneratorSpec, grid: SamplingGrid, *, tolerance: float = 1e-12) -> CheckReport:
    """
    Report min Re p over the grid and, for interior tau, |f(tau)|.

    The report passes iff min Re p >= -tolerance and |f(tau)| <= tolerance.
    Strict positivity of Re p (needed for Denjoy-Wolff convergence) is
    reported in ``details['min_re_p']`` rather than enforced.
    """
    grid.require_inside_unit_disk()
    pts = grid.points
    p, _ = g.herglotz.evaluate(pts)
    params = {"tau": [g.tau.real, g.tau.imag], "q": [g.q.real, g.q.imag], "tolerance": tolerance}
    re_p = CheckReport.from_margins("herglotz_real_part", p.real, pts, slack=tolerance)
    parts = [re_p]
    if g.interior_fixed_point:
        f_tau = abs(complex(g.evaluate(np.asarray(g.tau, dtype=complex))[0]))
        parts.append(CheckReport.from_margins("fixed_point", [tolerance - f_tau], [g.tau], slack=0.0))
    return CheckReport.combine(
        "validate_generator",
        parts,
        params=params,
        details={"min_re_p": re_p.worst_margin, "strictly_positive": re_p.worst_margin > 0.0},
    )
