from __future__ import annotations

import math

import pytest

from resolvent_lab.runtime.generator import GeneratorSpec, SchwarzFunction, SchwarzHerglotz
from resolvent_lab.runtime.grid import SamplingGrid
from resolvent_lab.utils.load import load_generator


@pytest.fixture(scope="session")
def linear() -> GeneratorSpec:
    return GeneratorSpec.linear(1.0)


@pytest.fixture(scope="session")
def koebe() -> GeneratorSpec:
    return GeneratorSpec.koebe(1.0)


@pytest.fixture(scope="session")
def atomic_single() -> GeneratorSpec:
    return GeneratorSpec.from_atoms([(0.0, 1.0)], label="atomic_single")


@pytest.fixture(scope="session")
def atomic_pair() -> GeneratorSpec:
    return GeneratorSpec.from_atoms([(math.pi / 3, 0.5), (-math.pi / 3, 0.5)], label="atomic_pair")


@pytest.fixture(scope="session", params=["atomic_a", "atomic_b", "atomic_c"])
def bundled_atomic(request) -> GeneratorSpec:
    return load_generator(request.param)


@pytest.fixture(scope="session")
def small_grid() -> SamplingGrid:
    return SamplingGrid(radii=8, angles=32, outer_radius=0.999)


@pytest.fixture(scope="session")
def tiny_grid() -> SamplingGrid:
    return SamplingGrid(radii=3, angles=8, outer_radius=0.99)



@pytest.fixture(scope="session", params=["linear", "koebe", "atomic_a", "atomic_b", "atomic_c", "schwarz"])
def sample_generator(request) -> GeneratorSpec:
    if request.param == "schwarz":
        omega = SchwarzFunction.from_angle(0.7, power=2, zeros=(0.3 - 0.2j,))
        return GeneratorSpec(herglotz=SchwarzHerglotz(q=1 + 1j, omega=omega), label="schwarz")
    return load_generator(request.param)
