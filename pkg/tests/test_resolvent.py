from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import koebe_resolvent
from resolvent_lab.errors import DomainError, NoConvergence, OutOfRange, RadiusExceeded
from resolvent_lab.runtime.generator import GeneratorSpec
from resolvent_lab.runtime.geometry import radii_resolvent, resolvent_class_params
from resolvent_lab.runtime.grid import SamplingGrid, circle
from resolvent_lab.runtime.resolvent import (
    SolverConfig,
    resolve,
    resolve_continued,
    resolve_continued_many,
    resolve_in_disk,
    resolve_many,
    univalence_probe,
)


def test_linear_resolvent_is_exact(linear):
    ev = resolve(linear, 10.0, 0.3 + 0.1j)
    assert abs(ev.value - (0.3 + 0.1j) / 11.0) <= 1e-15
    assert ev.d1 == pytest.approx(1.0 / 11.0)
    assert ev.d2 == 0
    assert not ev.continued


def test_koebe_resolvent_at_half(koebe):
    ev = resolve(koebe, 1.0, 0.5)
    assert ev.value == pytest.approx(0.2, abs=1e-14)
    # f'(0.2) = 2.125 so G' = 1/(1 + 2.125)
    assert ev.d1 == pytest.approx(0.32, abs=1e-13)
    assert ev.residual <= 1e-13


def test_resolvent_at_origin(koebe):
    assert resolve(koebe, 5.0, 0.0).value == 0


@pytest.mark.parametrize("r", [1.0, 3.0, 10.0, 100.0])
def test_koebe_matches_quadratic_root(koebe, r):
    ws = SamplingGrid(radii=16, angles=64, outer_radius=0.999).points
    values = resolve_many(koebe, r, ws).value
    assert np.max(np.abs(values - koebe_resolvent(ws, r))) <= 1e-10


@pytest.mark.slow
def test_resolvent_oracles_on_ten_thousand_points(linear, koebe):
    rng = np.random.default_rng(20240607)
    ws = np.sqrt(rng.uniform(0.0, 0.999**2, 10_000)) * np.exp(2j * np.pi * rng.uniform(size=10_000))
    for r in (1.0, 10.0, 100.0):
        assert np.max(np.abs(resolve_many(koebe, r, ws).value - koebe_resolvent(ws, r))) <= 1e-10
        assert np.max(np.abs(resolve_many(linear, r, ws).value - ws / (1.0 + r))) <= 1e-13


@pytest.mark.parametrize("r", [1.0, 10.0, 100.0])
def test_round_trip(koebe, bundled_atomic, r):
    zs = SamplingGrid(radii=16, angles=64, outer_radius=0.9).points
    for g in (koebe, bundled_atomic):
        ws = zs + r * g(zs)
        inside = np.abs(ws) < 0.999
        back = resolve_many(g, r, ws[inside]).value
        assert np.max(np.abs(back - zs[inside])) <= 1e-10


@given(
    st.floats(min_value=0.0, max_value=0.99),
    st.floats(min_value=0.0, max_value=2 * math.pi),
    st.sampled_from([0.5, 1.0, 7.0, 40.0]),
)
@settings(max_examples=100, deadline=None)
def test_resolvent_is_a_self_map_with_small_residual(rho, phi, r):
    g = GeneratorSpec.from_atoms([(0.4, 0.5), (2.1, 0.3), (4.6, 0.2)], gamma=0.25)
    w = rho * cmath.exp(1j * phi)
    ev = resolve(g, r, w)
    assert abs(ev.value) < 1.0
    assert abs(ev.value + r * g(ev.value) - w) <= 1e-12


@pytest.mark.parametrize("r", [1.0, 10.0])
def test_first_derivative_matches_central_differences(sample_generator, r):
    ws = SamplingGrid(radii=4, angles=16, outer_radius=0.9).points
    step = 1e-5
    d1 = resolve_many(sample_generator, r, ws).d1
    plus = resolve_many(sample_generator, r, ws + step).value
    minus = resolve_many(sample_generator, r, ws - step).value
    quotient = (plus - minus) / (2 * step)
    assert np.all(np.abs(quotient - d1) <= 1e-5 * np.abs(d1))


@pytest.mark.parametrize("q", [1.0, 1 + 1j, 2 - 1j, 0.5 + 3j])
@pytest.mark.parametrize("r", [0.5, 3.0, 40.0])
def test_derivative_at_origin(q, r):
    for g in (GeneratorSpec.linear(q), GeneratorSpec.koebe(q)):
        assert abs(resolve(g, r, 0.0).d1 - 1.0 / (1.0 + r * q)) <= 1e-10


@pytest.mark.parametrize("r", [0.5, 3.0, 40.0])
def test_second_coefficient_bound_at_origin(sample_generator, r):
    c = resolvent_class_params(sample_generator.q, r)
    ev = resolve(sample_generator, r, 0.0)
    assert ev.d1 == pytest.approx(1.0 / c.beta, abs=1e-10)
    assert abs(ev.d2) / 2.0 <= abs(c.alpha) / abs(c.beta) ** 3 + 1e-8


@pytest.mark.parametrize("q", [1.0, 1 + 1j])
def test_koebe_attains_the_second_coefficient_bound(q):
    r = 10.0
    c = resolvent_class_params(q, r)
    ev = resolve(GeneratorSpec.koebe(q), r, 0.0)
    assert abs(ev.d2) / 2.0 == pytest.approx(abs(c.alpha) / abs(c.beta) ** 3, rel=1e-12)


def test_resolvents_shrink_to_the_origin(koebe, bundled_atomic):
    ws = SamplingGrid(radii=8, angles=32, outer_radius=0.9).points
    for g in (koebe, bundled_atomic):
        sup = [np.max(np.abs(resolve_many(g, r, ws).value)) for r in (1.0, 10.0, 100.0, 1000.0)]
        assert all(b < a for a, b in zip(sup, sup[1:]))
        assert sup[-1] <= 0.9 / (1.0 + 1000.0 * g.q.real) * 3.0


def test_resolvents_converge_to_an_interior_fixed_point():
    tau = 0.3 + 0.2j
    g = GeneratorSpec.from_atoms([(0.0, 1.0), (2.0, 0.5)], tau=tau, label="shifted")
    ws = SamplingGrid(radii=6, angles=24, outer_radius=0.9).points
    dist = []
    for r in (1.0, 10.0, 100.0, 1000.0):
        batch = resolve_many(g, r, ws)
        assert batch.max_residual <= 1e-12
        assert resolve(g, r, tau).value == pytest.approx(tau, abs=1e-12)
        dist.append(float(np.max(np.abs(batch.value - tau))))
    assert all(b < a for a, b in zip(dist, dist[1:]))
    assert dist[-1] <= 1e-2


def test_batch_shape_and_indexing(koebe):
    ws = np.array([[0.1, 0.2], [0.3j, -0.4]])
    batch = resolve_many(koebe, 2.0, ws)
    assert batch.value.shape == ws.shape
    assert len(batch) == 4
    assert batch[3].w == ws.ravel()[3]
    assert batch.max_residual <= 1e-13


def test_invalid_inputs(koebe):
    with pytest.raises(DomainError):
        resolve(koebe, 1.0, 1.0)
    with pytest.raises(OutOfRange):
        resolve(koebe, 0.0, 0.5)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)


def test_no_convergence_is_reported(koebe):
    with pytest.raises(NoConvergence):
        resolve(koebe, 1.0, 0.9, SolverConfig(max_iter=1, continuation_steps=1))


def test_continuation_of_linear_resolvent(linear):
    rho = radii_resolvent(1.0, 10.0).rho
    assert rho > 2.0
    ev = resolve_continued(linear, 10.0, 1.5 + 0.5j)
    assert abs(ev.value - (1.5 + 0.5j) / 11.0) <= 1e-13
    assert ev.continued


def test_continuation_limits(linear, koebe):
    rho = radii_resolvent(1.0, 10.0).rho
    with pytest.raises(RadiusExceeded):
        resolve_continued(koebe, 10.0, rho)
    with pytest.raises(OutOfRange):
        resolve_continued(linear, 2.0, 1.0)


def test_continuation_agrees_with_direct_solve_inside_disk(koebe):
    ws = circle(0.8, 32)
    direct = resolve_many(koebe, 10.0, ws).value
    continued = resolve_continued_many(koebe, 10.0, ws).value
    assert np.max(np.abs(direct - continued)) <= 1e-12


def test_resolve_in_disk_merges_inner_and_outer(linear):
    ws = np.array([0.5, 1.2j, -0.9, 1.8])
    batch = resolve_in_disk(linear, 10.0, ws)
    assert np.max(np.abs(batch.value - ws / 11.0)) <= 1e-13
    assert list(batch.continued) == [False, True, False, True]


@pytest.mark.slow
@pytest.mark.parametrize("q", [1.0, 1 + 1j, 2 - 1j])
@pytest.mark.parametrize("x", [3.0, 10.0, 100.0])
def test_distortion_on_the_continuation_circle(q, x):
    g = GeneratorSpec.koebe(q)
    r = x / complex(q).real
    radii = radii_resolvent(q, r)
    ws = circle(0.99 * radii.rho, 256)
    assert np.max(np.abs(resolve_continued_many(g, r, ws).value)) <= radii.rho1 + 1e-9


def test_univalence_probe(koebe):
    rep = univalence_probe(koebe, 10.0, 1.0, 8)
    assert rep.passed
    assert rep.worst_margin > 0.0
    single = univalence_probe(koebe, 10.0, 0.5, 1)
    assert single.passed and single.worst_margin == math.inf
