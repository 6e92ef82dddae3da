from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class SamplingGrid:
    """
    Deterministic polar point set on the closed disk of radius ``outer_radius``.

    The origin is included once, followed by ``radii`` rings (radial-major
    order) at r_k = outer_radius * sin(pi k / (2 radii)), k = 1..radii, which
    clusters rings toward the boundary where extremal behaviour lives. Each
    ring carries ``angles`` equally spaced points starting at angle 0, so the
    positive real axis is always sampled.
    """

    radii: int = 64
    angles: int = 256
    outer_radius: float = 1.0 - 1e-3

    def __post_init__(self) -> None:
        if self.radii < 1 or self.angles < 1:
            raise ValueError("SamplingGrid needs at least one ring and one angle")
        if not 0.0 < self.outer_radius:
            raise ValueError(f"outer_radius must be positive, got {self.outer_radius}")

    @classmethod
    def for_disk(cls, radius: float, *, radii: int = 64, angles: int = 256) -> "SamplingGrid":
        return cls(radii=radii, angles=angles, outer_radius=radius)

    def require_inside_unit_disk(self) -> None:
        if self.outer_radius >= 1.0:
            raise DomainError(f"grid outer radius {self.outer_radius} is not inside the open unit disk")

    def scaled(self, outer_radius: float) -> "SamplingGrid":
        return SamplingGrid(radii=self.radii, angles=self.angles, outer_radius=outer_radius)

    @cached_property
    def ring_radii(self) -> np.ndarray:
        k = np.arange(1, self.radii + 1)
        return self.outer_radius * np.sin(np.pi * k / (2 * self.radii))

    @cached_property
    def points(self) -> np.ndarray:
        phi = 2.0 * np.pi * np.arange(self.angles) / self.angles
        rings = (self.ring_radii[:, None] * np.exp(1j * phi)[None, :]).ravel()
        return np.concatenate([np.zeros(1, dtype=complex), rings])

    @property
    def nonzero_points(self) -> np.ndarray:
        return self.points[1:]

    def __len__(self) -> int:
        return 1 + self.radii * self.angles

    def __repr__(self) -> str:
        return f"<SamplingGrid {self.radii}x{self.angles} outer={self.outer_radius:g}>"


def circle(radius: float, n: int) -> np.ndarray:
    """n equally spaced points on |z| = radius, starting at angle 0."""
    return radius * np.exp(2j * np.pi * np.arange(n) / n)
