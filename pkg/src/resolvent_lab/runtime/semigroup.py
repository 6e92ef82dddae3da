"""
Semigroup flows generated by f (or by a resolvent G_r), the exponential
formula, and the squeezing / sector / convergence checks built on them.

A flow along the complex-time ray t = s e^{i phase} solves
du/ds = -e^{i phase} f(u), u(0) = z.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..errors import OutOfRange, TrajectoryEscaped
from ..schema.pretty import fmt_complex
from ..schema.schema_model import CheckReport
from .generator import ComplexLike, GeneratorSpec, as_complex_array, estimate_kappa, require_in_disk, unwrap
from .geometry import DEFAULT_SLACK, orders, rho1_radius, rho_radius
from .grid import SamplingGrid
from .integrators import DormandPrince54, Field, FlowBatch
from .resolvent import DEFAULT_SOLVER, SolverConfig, resolve_many

logger = logging.getLogger(__name__)

DEFAULT_TIMES = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
FLOW_SLACK = 1e-7
SECTOR_MARGIN = 0.02


@dataclass(frozen=True)
class FlowPoint:
    """Trajectory value at ray parameter s; ``escaped`` marks the point where a trajectory left the disk."""

    s: float
    u: complex
    local_error: float
    phase: float = 0.0
    escaped: bool = False

    @property
    def t(self) -> complex:
        return self.s * complex(math.cos(self.phase), math.sin(self.phase))

    def __repr__(self) -> str:
        flag = " escaped" if self.escaped else ""
        return f"<FlowPoint s={self.s:g} u={fmt_complex(self.u)}{flag}>"


@dataclass(frozen=True)
class SectorSpec:
    """
    Sector {t : |arg t - center_arg| < half_angle} of complex times.

    A non-positive half angle is an empty sector; checks over it pass vacuously.
    """

    center_arg: float
    half_angle: float

    def __post_init__(self) -> None:
        if self.half_angle > math.pi / 2.0 + 1e-12:
            raise ValueError(f"sector half angle {self.half_angle} exceeds pi/2")

    @property
    def empty(self) -> bool:
        return self.half_angle <= 0.0

    @property
    def lower(self) -> float:
        return self.center_arg - self.half_angle

    @property
    def upper(self) -> float:
        return self.center_arg + self.half_angle

    def contains(self, phase: float) -> bool:
        return abs(phase - self.center_arg) < self.half_angle

    def phases(self, n: int, *, margin: float = SECTOR_MARGIN) -> np.ndarray:
        """n ray phases spread over the sector shrunk by ``margin`` on each side."""
        inner = self.half_angle - margin
        if inner <= 0.0 or n == 1:
            return np.array([self.center_arg])
        return np.linspace(self.center_arg - inner, self.center_arg + inner, n)

    def __repr__(self) -> str:
        return f"<SectorSpec ({self.lower:.6f}, {self.upper:.6f})>"


# ---------------------------------------------------------------------------
# Velocity fields
# ---------------------------------------------------------------------------


def generator_field(g: GeneratorSpec) -> Field:
    def field(u: np.ndarray) -> np.ndarray:
        return g.evaluate(u)[0]

    return field


def resolvent_field(g: GeneratorSpec, r: float, cfg: SolverConfig = DEFAULT_SOLVER) -> Field:
    """u -> G_r(u); the resolvent is itself a generator."""

    def field(u: np.ndarray) -> np.ndarray:
        return resolve_many(g, r, u, cfg).value

    return field


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------


def evolve_ode_many(
    field: Field,
    zs: ComplexLike,
    checkpoints: Sequence[float],
    *,
    phase: float = 0.0,
    integrator: DormandPrince54 | None = None,
) -> FlowBatch:
    arr, _ = as_complex_array(zs)
    require_in_disk(arr, what="initial point")
    integrator = integrator or DormandPrince54()
    return integrator.integrate(field, arr.ravel(), checkpoints, phase=phase)


def evolve_ode(
    g: GeneratorSpec,
    z: complex,
    t_end: float,
    phase: float = 0.0,
    *,
    checkpoints: Sequence[float] | None = None,
    field: Field | None = None,
    integrator: DormandPrince54 | None = None,
) -> list[FlowPoint]:
    """
    Integrate the flow of ``g`` from z along the ray of the given phase.

    Returns one FlowPoint per checkpoint (default: just ``t_end``). On the real
    time axis an escape means the generator is broken and raises; along a
    complex ray it is a legitimate outcome, returned as a final flagged point.

    Raises
    ------
    TrajectoryEscaped
        If phase = 0 and the trajectory reaches |u| >= 1 - 1e-12.
    """
    if t_end < 0.0:
        raise OutOfRange(f"backward flows are not supported (t_end = {t_end})")
    cps = sorted(checkpoints) if checkpoints is not None else [t_end]
    batch = evolve_ode_many(field or generator_field(g), np.asarray([z]), cps, phase=phase, integrator=integrator)
    if batch.escaped[0]:
        s_esc = float(batch.escape_s[0])
        if phase == 0.0:
            raise TrajectoryEscaped(f"trajectory of {g.name} from z = {z} escaped at t = {s_esc}", s=s_esc)
        logger.info(f"ray phase {phase:.6f} from z = {z} escaped at s = {s_esc:.6g}")
    out: list[FlowPoint] = []
    for i, s in enumerate(cps):
        u = batch.values[i, 0]
        if np.isnan(u):
            break
        out.append(FlowPoint(s=float(s), u=complex(u), local_error=float(batch.local_error[i, 0]), phase=phase))
    if batch.escaped[0]:
        out.append(
            FlowPoint(s=float(batch.escape_s[0]), u=complex(batch.last[0]), local_error=math.nan, phase=phase, escaped=True)
        )
    return out


def evolve_expo(
    g: GeneratorSpec,
    z: ComplexLike,
    t: float,
    n: int,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    richardson: bool = False,
):
    """
    n-fold iterate of the resolvent G_{t/n} applied to z.

    The iterate is a backward Euler scheme for the flow, first order in 1/n.
    With ``richardson=True`` the extrapolation 2 E(2n) - E(n) is returned,
    which is second order.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not t > 0.0:
        raise OutOfRange(f"exponential formula needs t > 0, got {t}")
    if richardson:
        coarse = evolve_expo(g, z, t, n, cfg)
        fine = evolve_expo(g, z, t, 2 * n, cfg)
        return 2.0 * fine - coarse
    arr, scalar = as_complex_array(z)
    require_in_disk(arr)
    u = arr.ravel()
    for _ in range(n):
        u = resolve_many(g, t / n, u, cfg).value
    return unwrap(u.reshape(arr.shape), scalar)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_squeezing(
    g: GeneratorSpec,
    grid: SamplingGrid,
    times: Sequence[float] = DEFAULT_TIMES,
    kappa: float | None = None,
    *,
    field: Field | None = None,
    slack: float = DEFAULT_SLACK,
    check: str = "squeezing",
) -> CheckReport:
    """
    |u(t, z)| <= |z| exp(-kappa t) on the grid at every checkpoint time.

    ``kappa`` defaults to the boundary scan of Re p. ``field`` replaces the
    flow of f, e.g. by the flow of a resolvent.
    """
    g.require_centered()
    grid.require_inside_unit_disk()
    if kappa is None:
        kappa = estimate_kappa(g)
    pts = grid.points
    cps = sorted(times)
    batch = evolve_ode_many(field or generator_field(g), pts, cps)
    if np.any(batch.escaped):
        i = int(np.argmax(batch.escaped))
        raise TrajectoryEscaped(f"squeezing flow from z = {pts[i]} escaped", s=float(batch.escape_s[i]))
    bound = np.abs(pts)[None, :] * np.exp(-kappa * np.asarray(cps))[:, None]
    margins = bound - np.abs(batch.values)
    witnesses = np.broadcast_to(pts[None, :], margins.shape)
    rep = CheckReport.from_margins(
        check,
        margins,
        witnesses,
        slack=slack,
        params={"kappa": kappa, "times": list(cps), "generator": g.name},
    )
    worst_t = cps[int(np.argmin(np.where(np.isnan(margins), -np.inf, margins))) // pts.size]
    return replace(rep, details={**rep.details, "worst_time": worst_t, "steps": batch.steps})


def theorem_sector(g: GeneratorSpec, grid: SamplingGrid) -> SectorSpec:
    """
    Sector of complex times (-a, b) with a = pi/2 + inf arg p, b = pi/2 - sup arg p,
    both capped at pi/2, from the extreme arguments of p over the grid.
    """
    p, _ = g.herglotz.evaluate(grid.points)
    args = np.angle(p)
    a = min(math.pi / 2.0 + float(np.min(args)), math.pi / 2.0)
    b = min(math.pi / 2.0 - float(np.max(args)), math.pi / 2.0)
    return SectorSpec(center_arg=(b - a) / 2.0, half_angle=(a + b) / 2.0)


def resolvent_sector(q: complex, r: float) -> SectorSpec:
    """Sector |arg t - arg(1 + rq)| < pi gamma_r / 2 for the semigroup generated by G_r."""
    rep = orders(q, r)
    return SectorSpec(center_arg=rep.sector_center, half_angle=rep.sector_half_angle)


def check_sector(
    g: GeneratorSpec,
    z: complex,
    sector: SectorSpec,
    s_end: float,
    n_rays: int,
    *,
    field: Field | None = None,
    margin: float = SECTOR_MARGIN,
    grid: SamplingGrid | None = None,
    samples: int = 32,
) -> CheckReport:
    """
    Rays strictly inside the sector must keep the trajectory from z in the disk up to s_end.

    Surviving rays have margin 1 - max |u| over the sampled ray; an escaped
    ray has margin (s_escape - s_end)/s_end < 0. The extreme arguments of
    field(u)/u over ``grid`` are reported for comparison with the sector.
    """
    require_in_disk(np.asarray(z, dtype=complex))
    field = field or generator_field(g)
    grid = grid or SamplingGrid(radii=16, angles=64)
    nz = grid.nonzero_points
    arg_p = np.angle(field(nz) / nz)
    params = {
        "z": [complex(z).real, complex(z).imag],
        "center_arg": sector.center_arg,
        "half_angle": sector.half_angle,
        "s_end": s_end,
        "generator": g.name,
    }
    details = {"arg_p_inf": float(np.min(arg_p)), "arg_p_sup": float(np.max(arg_p))}
    if sector.empty:
        return CheckReport("sector", True, math.inf, None, params, details, notes="empty sector")

    phases = sector.phases(n_rays, margin=margin)
    cps = np.linspace(0.0, s_end, samples + 1)[1:]
    margins, witnesses = [], []
    for phi in phases:
        batch = evolve_ode_many(field, np.asarray([z]), cps, phase=float(phi))
        if batch.escaped[0]:
            margins.append((float(batch.escape_s[0]) - s_end) / s_end)
        else:
            margins.append(1.0 - float(np.max(np.abs(batch.values[:, 0]))))
        witnesses.append(complex(math.cos(phi), math.sin(phi)))
    rep = CheckReport.from_margins("sector", margins, witnesses, slack=0.0, params=params, details=details)
    escaped = int(sum(1 for m in margins if m < 0.0))
    return replace(
        rep,
        passed=escaped == 0,
        details={**rep.details, "rays": len(phases), "escaped_rays": escaped},
        notes="witness is the unit direction of the worst ray",
    )


def resolvent_generator_suite(
    g: GeneratorSpec,
    r: float,
    grid: SamplingGrid,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    times: Sequence[float] = DEFAULT_TIMES,
    flow_grid: SamplingGrid | None = None,
    slack: float = DEFAULT_SLACK,
    flow_slack: float = FLOW_SLACK,
) -> CheckReport:
    """
    G_r as a generator: lower bounds on G_r(z)/z and squeezing of its flow.

    (a) Re(((1 + rq) G_r/z)^{1/(1 - gamma_r)}) >= 1/2,
    (b) Re(G_r/z) >= kappa(r),
    (c) Re(G_r/z) >= 1/(2(1 + rq)) when q is real,
    then |v(t)| <= |z| exp(-kappa(r) t) for the flow dv/dt = -G_r(v).

    (a), (b) and the flow need r Re q >= 6. Below that only (c) is run, which
    holds for every r > 0 when q is real; ``details["skipped"]`` lists the
    parts left out.

    Raises
    ------
    OutOfRange
        If r <= 0, or if r Re q < 6 and q is not real.
    """
    g.require_centered()
    grid.require_inside_unit_disk()
    q = g.q
    if not r > 0.0:
        raise OutOfRange(f"r must be positive, got {r}")
    x = r * q.real
    real_q = q.imag == 0.0
    if x < 6.0 and not real_q:
        raise OutOfRange(f"resolvent generator checks need r Re q >= 6 for complex q, got {x}")
    pts = grid.nonzero_points
    ratio = resolve_many(g, r, pts, cfg).value / pts
    params = {"q": [q.real, q.imag], "r": r, "generator": g.name}

    if x < 6.0:
        logger.info(f"r Re q = {x:g} < 6: running only the real-q lower bound")
        lower = CheckReport.from_margins("real_q_lower", ratio.real - 1.0 / (2.0 * (1.0 + x)), pts, slack=slack)
        return CheckReport.combine(
            "resolvent_generator",
            [lower],
            params=params,
            details={"skipped": ["normalized_power", "kappa_lower", "resolvent_flow_squeezing"]},
            notes=f"r Re q = {x:g} < 6: only Re(G_r/z) >= 1/(2(1 + rq)) checked",
        )

    rep = orders(q, r)
    gamma, kappa = rep.gamma_r, rep.kappa_r
    power = ((1.0 + r * q) * ratio) ** (1.0 / (1.0 - gamma))
    parts = [
        CheckReport.from_margins("normalized_power", power.real - 0.5, pts, slack=slack),
        CheckReport.from_margins("kappa_lower", ratio.real - kappa, pts, slack=slack),
    ]
    if real_q:
        parts.append(CheckReport.from_margins("real_q_lower", ratio.real - 1.0 / (2.0 * (1.0 + x)), pts, slack=slack))
    flow_grid = flow_grid or SamplingGrid(radii=4, angles=16, outer_radius=grid.outer_radius)
    parts.append(
        check_squeezing(
            g,
            flow_grid,
            times,
            kappa,
            field=resolvent_field(g, r, cfg),
            slack=flow_slack,
            check="resolvent_flow_squeezing",
        )
    )
    return CheckReport.combine(
        "resolvent_generator",
        parts,
        params={
            "q": [q.real, q.imag],
            "r": r,
            "A": rep.A,
            "gamma_r": gamma,
            "kappa_r": kappa,
            "kappa_admissible": rep.kappa_admissible,
            "generator": g.name,
        },
    )


def check_uniform_bound(
    g: GeneratorSpec,
    rs: Sequence[float],
    grid: SamplingGrid,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    slack: float = DEFAULT_SLACK,
) -> CheckReport:
    """
    |G_r(z)| <= 3/(1 + r Re q) on the grid for each r, together with the
    Schwarz-lemma bound |G_r(z)| <= rho1(r) |z| / rho(r).

    Raises
    ------
    OutOfRange
        If some r Re q <= 2.
    """
    g.require_centered()
    grid.require_inside_unit_disk()
    q = g.q
    pts = grid.points
    parts, max_abs = [], []
    for r in rs:
        x = r * q.real
        if not x > 2.0:
            raise OutOfRange(f"uniform bound needs r Re q > 2, got r Re q = {x} at r = {r}")
        mod = np.abs(resolve_many(g, r, pts, cfg).value)
        max_abs.append(float(np.max(mod)))
        parts.append(CheckReport.from_margins(f"uniform_r{r:g}", 3.0 / (1.0 + x) - mod, pts, slack=slack))
        schwarz = rho1_radius(q, r) * np.abs(pts) / rho_radius(q, r)
        parts.append(CheckReport.from_margins(f"schwarz_r{r:g}", schwarz - mod, pts, slack=slack))
    return CheckReport.combine(
        "uniform_bound",
        parts,
        params={"q": [q.real, q.imag], "r_values": list(rs), "generator": g.name},
        details={"max_abs": max_abs},
    )


def check_normalized_convergence(
    g: GeneratorSpec,
    rs: Sequence[float],
    compact_radius: float = 0.9,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    radii: int = 16,
    angles: int = 64,
    noise_floor: float = 1e-12,
) -> CheckReport:
    """
    d(r) = max_{|z| <= compact_radius} |(1 + rq) G_r(z) - z| must decrease strictly along rs.

    Values below ``noise_floor`` count as zero, so an exactly linear generator
    (d identically 0) passes. When the last r Re q >= 1e3, d(last) must also
    be at most 0.05 compact_radius.
    """
    g.require_centered()
    if compact_radius > 0.9:
        raise OutOfRange(f"compact radius must be <= 0.9, got {compact_radius}")
    rs = list(rs)
    if not rs:
        raise ValueError("need at least one r")
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError(f"r values must increase strictly, got {rs}")
    q = g.q
    pts = SamplingGrid(radii=radii, angles=angles, outer_radius=compact_radius).points
    d = []
    for r in rs:
        G = resolve_many(g, r, pts, cfg).value
        d.append(float(np.max(np.abs((1.0 + r * q) * G - pts))))

    margins = []
    for a, b in zip(d, d[1:]):
        margins.append(0.0 if a <= noise_floor and b <= noise_floor else a - b)
    monotone = all(m > 0.0 or (a <= noise_floor and b <= noise_floor) for m, a, b in zip(margins, d, d[1:]))
    threshold_margin = math.inf
    if rs[-1] * q.real >= 1e3:
        threshold_margin = 0.05 * compact_radius - d[-1]
    worst = min(margins + [threshold_margin])
    return CheckReport(
        check="normalized_convergence",
        passed=bool(monotone and threshold_margin >= 0.0),
        worst_margin=float(worst),
        witness=None,
        params={"q": [q.real, q.imag], "r_values": rs, "compact_radius": compact_radius, "generator": g.name},
        details={"d": d, "threshold_margin": threshold_margin},
    )
