from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from oracles import koebe_flow
from resolvent_lab.errors import NumericalFailure, OutOfRange, TrajectoryEscaped
from resolvent_lab.runtime.generator import GeneratorSpec
from resolvent_lab.runtime.geometry import orders
from resolvent_lab.runtime.grid import SamplingGrid
from resolvent_lab.runtime.integrators import DormandPrince54
from resolvent_lab.runtime.semigroup import (
    SectorSpec,
    check_normalized_convergence,
    check_sector,
    check_squeezing,
    check_uniform_bound,
    evolve_expo,
    evolve_ode,
    evolve_ode_many,
    generator_field,
    resolvent_field,
    resolvent_generator_suite,
    resolvent_sector,
    theorem_sector,
)

ROTATED = GeneratorSpec.linear(cmath.exp(1j * math.pi / 4), label="rotated")


# ---------------------------------------------------------------------------
# Integrator
# ---------------------------------------------------------------------------


def test_dormand_prince_lands_on_checkpoints(linear):
    cps = [0.1, 0.5, 1.0, 2.0]
    batch = DormandPrince54().integrate(generator_field(linear), np.array([0.5, 0.3j]), cps)
    assert np.array_equal(batch.checkpoints, cps)
    expected = np.array([0.5, 0.3j])[None, :] * np.exp(-np.array(cps))[:, None]
    assert np.max(np.abs(batch.values - expected)) <= 1e-10
    assert not batch.escaped.any()
    assert np.all(np.isnan(batch.escape_s))


def test_dormand_prince_rejects_bad_checkpoints(linear):
    with pytest.raises(ValueError):
        DormandPrince54().integrate(generator_field(linear), np.array([0.5]), [1.0, 0.5])
    with pytest.raises(ValueError):
        DormandPrince54(rtol=0.0)


def test_step_limit_is_a_numerical_failure(linear):
    with pytest.raises(NumericalFailure):
        DormandPrince54(max_steps=3, h_init=1e-3).integrate(generator_field(linear), np.array([0.5]), [10.0])


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------


def test_linear_flow_closed_form(linear):
    (point,) = evolve_ode(linear, 0.5, math.log(2.0))
    assert point.u == pytest.approx(0.25, abs=1e-10)
    assert point.t == pytest.approx(math.log(2.0))
    assert not point.escaped


def test_flow_along_complex_ray(linear):
    phase = 0.7
    points = evolve_ode(linear, 0.5, 3.0, phase, checkpoints=[1.0, 2.0, 3.0])
    for p in points:
        assert p.u == pytest.approx(0.5 * cmath.exp(-p.t), abs=1e-10)


def test_koebe_flow_matches_implicit_relation(koebe):
    cps = [0.1, 0.5, 1.0, 2.0, 5.0]
    points = evolve_ode(koebe, 0.5, 5.0, checkpoints=cps)
    for p in points:
        assert abs(p.u - koebe_flow(0.5, p.s)) <= 1e-9
    assert points[2].u.real == pytest.approx(0.098684, abs=1e-6)


def test_semigroup_law(koebe):
    zs = SamplingGrid(radii=3, angles=8, outer_radius=0.9).points
    field = generator_field(koebe)
    t, s = 0.7, 1.3
    direct = evolve_ode_many(field, zs, [t + s]).values[0]
    first = evolve_ode_many(field, zs, [t]).values[0]
    composed = evolve_ode_many(field, first, [s]).values[0]
    assert np.max(np.abs(direct - composed)) <= 1e-8


def test_modulus_is_non_increasing(bundled_atomic):
    zs = SamplingGrid(radii=3, angles=8, outer_radius=0.95).points
    batch = evolve_ode_many(generator_field(bundled_atomic), zs, [0.1, 0.5, 1.0, 2.0])
    mods = np.abs(batch.values)
    assert np.all(np.diff(mods, axis=0) <= 1e-10)


def test_flows_converge_to_the_fixed_point(koebe):
    for z in (0.9, -0.9, 0.6j):
        (point,) = evolve_ode(koebe, z, 20.0)
        assert abs(point.u) <= 1e-3
    tau = 0.3 + 0.2j
    shifted = GeneratorSpec.from_atoms([(0.0, 1.0), (2.0, 0.5)], tau=tau, label="shifted")
    for z in (-0.8, 0.5j, 0.6):
        points = evolve_ode(shifted, z, 20.0, checkpoints=[5.0, 20.0])
        assert abs(points[1].u - tau) <= abs(points[0].u - tau)
        assert abs(points[1].u - tau) <= 1e-3


def test_escape_on_the_real_axis_raises():
    def repelling(u: np.ndarray) -> np.ndarray:
        return -u

    with pytest.raises(TrajectoryEscaped) as info:
        evolve_ode(ROTATED, 0.5, 2.0, field=repelling)
    assert info.value.s == pytest.approx(math.log(2.0), abs=1e-6)


def test_escape_along_a_complex_ray_is_flagged():
    phase = math.pi / 4 + 0.1
    points = evolve_ode(ROTATED, 0.5, 20.0, phase)
    assert points[-1].escaped
    assert points[-1].s == pytest.approx(math.log(2.0) / math.sin(0.1), rel=1e-4)


def test_backward_flow_is_rejected(linear):
    with pytest.raises(OutOfRange):
        evolve_ode(linear, 0.5, -1.0)


def test_exponential_formula_linear(linear):
    assert evolve_expo(linear, 0.5, 1.0, 4) == pytest.approx(0.2048, abs=1e-14)
    assert evolve_expo(linear, 0.5, 1.0, 1) == pytest.approx(0.25, abs=1e-14)


def test_exponential_formula_converges(linear, koebe):
    for g, exact in ((linear, 0.5 * math.exp(-1.0)), (koebe, koebe_flow(0.5, 1.0))):
        errors = [abs(evolve_expo(g, 0.5, 1.0, 2**k) - exact) for k in range(4, 13, 2)]
        assert all(b <= a + 1e-11 for a, b in zip(errors, errors[1:]))
        assert abs(evolve_expo(g, 0.5, 1.0, 2**12, richardson=True) - exact) <= 1e-6


def test_exponential_formula_is_first_order(linear):
    exact = 0.5 * math.exp(-1.0)
    coarse = abs(evolve_expo(linear, 0.5, 1.0, 64) - exact)
    fine = abs(evolve_expo(linear, 0.5, 1.0, 128) - exact)
    assert coarse / fine == pytest.approx(2.0, rel=0.05)


def test_exponential_formula_input_checks(linear):
    with pytest.raises(ValueError):
        evolve_expo(linear, 0.5, 1.0, 0)
    with pytest.raises(OutOfRange):
        evolve_expo(linear, 0.5, 0.0, 4)


# ---------------------------------------------------------------------------
# Squeezing and sectors
# ---------------------------------------------------------------------------


def test_squeezing_linear_is_tight(linear, tiny_grid):
    rep = check_squeezing(linear, tiny_grid)
    assert rep.passed
    assert rep.params["kappa"] == pytest.approx(1.0)
    assert abs(rep.worst_margin) <= 1e-9


def test_squeezing_holds(koebe, bundled_atomic, tiny_grid):
    assert check_squeezing(koebe, tiny_grid).passed
    assert check_squeezing(bundled_atomic, tiny_grid).passed


def test_squeezing_with_a_too_large_kappa_fails(linear, tiny_grid):
    rep = check_squeezing(linear, tiny_grid, kappa=1.5)
    assert not rep.passed
    assert rep.worst_margin < 0.0


def test_theorem_sector_for_rotated_linear(small_grid):
    sector = theorem_sector(ROTATED, small_grid)
    assert sector.lower == pytest.approx(-math.pi / 2)
    assert sector.upper == pytest.approx(math.pi / 4)


def test_sector_survival_and_escape(linear, small_grid):
    assert check_sector(linear, 0.5, theorem_sector(linear, small_grid), 20.0, 7).passed
    assert check_sector(ROTATED, 0.5, theorem_sector(ROTATED, small_grid), 20.0, 7).passed

    outside = SectorSpec(center_arg=math.pi / 4 + 0.1, half_angle=0.05)
    rep = check_sector(ROTATED, 0.5, outside, 20.0, 3)
    assert not rep.passed
    assert rep.details["escaped_rays"] == 3
    assert rep.worst_margin < 0.0


def test_empty_sector_passes_vacuously(linear):
    rep = check_sector(linear, 0.5, SectorSpec(0.0, 0.0), 5.0, 4)
    assert rep.passed and rep.notes == "empty sector"


def test_resolvent_sector():
    sector = resolvent_sector(1.0, 10.0)
    assert sector.center_arg == 0.0
    assert sector.half_angle == pytest.approx(math.pi * orders(1.0, 10.0).gamma_r / 2.0)


def test_resolvent_flow_sector(koebe, tiny_grid):
    sector = resolvent_sector(1.0, 10.0)
    rep = check_sector(koebe, 0.5, sector, 20.0, 3, field=resolvent_field(koebe, 10.0), grid=tiny_grid)
    assert rep.params["s_end"] == 20.0
    assert rep.details["escaped_rays"] == 0
    assert rep.passed


# ---------------------------------------------------------------------------
# Resolvents as generators
# ---------------------------------------------------------------------------


def test_resolvent_generator_suite(linear, koebe, small_grid):
    lin = resolvent_generator_suite(linear, 10.0, small_grid)
    assert lin.passed
    assert lin.details["normalized_power"] == pytest.approx(0.5, abs=1e-12)
    rep = resolvent_generator_suite(koebe, 10.0, small_grid)
    assert rep.passed
    assert rep.params["kappa_r"] == pytest.approx(0.055347, rel=1e-4)
    assert set(rep.details) >= {"normalized_power", "kappa_lower", "real_q_lower", "resolvent_flow_squeezing"}


@pytest.mark.parametrize("q", [1.0, 1.0 + 1.0j])
@pytest.mark.parametrize("x", [6.0, 10.0, 100.0])
@pytest.mark.parametrize("make", [GeneratorSpec.linear, GeneratorSpec.koebe])
def test_resolvent_generator_suite_across_q(make, q, x, small_grid):
    g = make(q)
    rep = resolvent_generator_suite(g, x / g.q.real, small_grid)
    assert rep.passed, rep
    assert rep.details["resolvent_flow_squeezing"] >= -1e-7
    assert ("real_q_lower" in rep.details) == (complex(q).imag == 0.0)


@pytest.mark.parametrize("r", [0.5, 1.0, 5.0])
def test_resolvent_generator_suite_real_q_below_six(linear, koebe, small_grid, r):
    for g in (linear, koebe):
        rep = resolvent_generator_suite(g, r, small_grid)
        assert rep.passed, rep
        assert rep.details["real_q_lower"] >= -1e-9
        assert rep.details["skipped"] == ["normalized_power", "kappa_lower", "resolvent_flow_squeezing"]
        assert "kappa_r" not in rep.params
    assert resolvent_generator_suite(linear, r, small_grid).worst_margin == pytest.approx(
        0.5 / (1.0 + r), abs=1e-12
    )


def test_resolvent_generator_suite_complex_q_needs_x_at_least_six(small_grid):
    with pytest.raises(OutOfRange):
        resolvent_generator_suite(GeneratorSpec.koebe(1.0 + 1.0j), 5.0, small_grid)
    with pytest.raises(OutOfRange):
        resolvent_generator_suite(GeneratorSpec.linear(1.0), 0.0, small_grid)


def test_uniform_bound(linear, koebe, small_grid):
    lin = check_uniform_bound(linear, [10.0], small_grid)
    assert lin.passed
    assert lin.details["max_abs"][0] == pytest.approx(0.999 / 11.0)
    rep = check_uniform_bound(koebe, [3.0, 10.0, 100.0], small_grid)
    assert rep.passed
    max_abs = rep.details["max_abs"]
    assert max_abs[0] > max_abs[1] > max_abs[2]


def test_uniform_bound_precondition(koebe, small_grid):
    with pytest.raises(OutOfRange):
        check_uniform_bound(koebe, [2.0], small_grid)


def test_normalized_convergence(linear, koebe):
    lin = check_normalized_convergence(linear, [1.0, 10.0, 100.0])
    assert lin.passed
    assert max(lin.details["d"]) <= 1e-12
    rep = check_normalized_convergence(koebe, [10.0, 100.0, 1000.0, 10000.0])
    assert rep.passed
    d = rep.details["d"]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert rep.details["threshold_margin"] >= 0.0


def test_normalized_convergence_single_r(koebe):
    rep = check_normalized_convergence(koebe, [10.0])
    assert rep.passed
    assert rep.worst_margin == math.inf


def test_normalized_convergence_input_checks(koebe):
    with pytest.raises(OutOfRange):
        check_normalized_convergence(koebe, [1.0, 2.0], compact_radius=0.95)
    with pytest.raises(ValueError):
        check_normalized_convergence(koebe, [10.0, 1.0])
