"""
Closed-form radii and orders for resolvent classes, and grid predicates for
starlikeness, hyperbolic convexity and subordination.

Notation: for a generator with q = f'(0) and resolvent parameter r we write
x = r Re q throughout. The resolvent G_r belongs to the class with
alpha = 2x and beta = 1 + rq.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from ..errors import NegativeM, NumericalFailure, OutOfRange, PoleAtR, VariantUnsupported
from ..schema.pretty import fmt_complex, html_card
from ..schema.schema_model import CheckReport
from .generator import AtomicHerglotz, GeneratorSpec
from .grid import SamplingGrid
from .resolvent import DEFAULT_SOLVER, SolverConfig, resolve_many

logger = logging.getLogger(__name__)

DEFAULT_SLACK = 1e-9
CONVEXITY_SLACK = 1e-7


# ---------------------------------------------------------------------------
# Class parameters and the radii of univalence / covering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassParams:
    """Parameters (alpha, beta) of the class of F with Re((F(z)/z - beta)/alpha) > -1/2."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not (self.alpha * self.beta.conjugate()).real > 0.0:
            raise OutOfRange(f"class parameters need Re(alpha conj(beta)) > 0, got alpha={self.alpha}, beta={self.beta}")

    def psi(self, z):
        """The extremal function beta + alpha z/(1 - z)."""
        return self.beta + self.alpha * z / (1.0 - z)

    def __repr__(self) -> str:
        return f"<ClassParams alpha={fmt_complex(self.alpha)} beta={fmt_complex(self.beta)}>"


def psi(c: ClassParams) -> Callable:
    return c.psi


def resolvent_class_params(q: complex, r: float) -> ClassParams:
    """The class containing (Id + r f) for every generator f with f'(0) = q."""
    q = complex(q)
    return ClassParams(alpha=2.0 * r * q.real, beta=1.0 + r * q)


@dataclass(frozen=True)
class RadiiReport:
    M: float
    R: float
    R1: float
    R2: float
    R2_alt: float
    branch: str

    def __repr__(self) -> str:
        return (
            f"<RadiiReport {self.branch} M={self.M:.6g} R={self.R:.6g} R1={self.R1:.6g} "
            f"R2={self.R2:.6g} R2_alt={self.R2_alt:.6g}>"
        )

    def _repr_html_(self) -> str:
        return html_card(
            "RadiiReport",
            [("Branch", self.branch)] + [(k, f"{getattr(self, k):.12g}") for k in ("M", "R", "R1", "R2", "R2_alt")],
        )


def radii_general(c: ClassParams) -> RadiiReport:
    """
    Univalence radius R, image radius R1 and covering radius R2 for the class (alpha, beta).

    Two branches on Re(beta/alpha): above 3/4 the radius is |alpha|(1/2 - M)
    with R1 = 1, otherwise |alpha|(1 - sqrt(M))^2 with R1 = 1/sqrt(M) - 1.

    Raises
    ------
    NegativeM
        If M < 0 on the square-root branch.
    OutOfRange
        If R1 |beta| < R, where the covering formula has no real value.
    """
    ratio = (c.beta / c.alpha).real
    M = 1.0 - ratio
    abs_alpha, abs_beta = abs(c.alpha), abs(c.beta)
    if ratio > 0.75:
        branch = "half-plane"
        R = abs_alpha * (0.5 - M)
        R1 = 1.0
    else:
        branch = "sqrt"
        if M < 0.0:
            raise NegativeM(f"M = {M} < 0 for alpha={c.alpha}, beta={c.beta}")
        sqrt_m = math.sqrt(M)
        R = abs_alpha * (1.0 - sqrt_m) ** 2
        R1 = 1.0 / sqrt_m - 1.0
    disc = (R1 * abs_beta) ** 2 - R**2
    if disc < 0.0:
        raise OutOfRange(f"R1 |beta| = {R1 * abs_beta} < R = {R}: covering radius undefined for {c!r}")
    R2 = R * R1 / (R1 * abs_beta + math.sqrt(disc))
    R2_alt = abs_beta * R / (abs_beta**2 + abs(c.beta.real) * R)
    return RadiiReport(M=M, R=R, R1=R1, R2=R2, R2_alt=R2_alt, branch=branch)


@dataclass(frozen=True)
class ResolventRadii:
    """
    Continuation radius rho, image radius rho1, covering radii rho2 and rho3.

    ``rho2_sharp`` is the covering radius of the general class evaluated at
    (2x, 1 + rq); the closed form ``rho2`` never exceeds it.
    """

    rho: float
    rho1: float
    rho2: float
    rho3: float
    rho2_sharp: float

    def __iter__(self):
        return iter((self.rho, self.rho1, self.rho2, self.rho3))

    def __repr__(self) -> str:
        return (
            f"<ResolventRadii rho={self.rho:.6g} rho1={self.rho1:.6g} rho2={self.rho2:.6g} "
            f"rho3={self.rho3:.6g}>"
        )


def _require_continuation(q: complex, r: float) -> float:
    x = r * complex(q).real
    if not x > 2.0:
        raise OutOfRange(f"radius formula needs r Re q > 2, got r Re q = {x}")
    return x


def rho_radius(q: complex, r: float) -> float:
    x = _require_continuation(q, r)
    return (math.sqrt(2.0 * x) - math.sqrt(x - 1.0)) ** 2


def rho1_radius(q: complex, r: float) -> float:
    x = _require_continuation(q, r)
    return math.sqrt(2.0 * x / (x - 1.0)) - 1.0


def rho3_radius(q: complex, r: float) -> float:
    if not r > 0.0:
        raise OutOfRange(f"r must be positive, got {r}")
    b = abs(1.0 + r * complex(q))
    return 1.0 / (b + math.sqrt(b * b - 1.0))


def radii_resolvent(q: complex, r: float) -> ResolventRadii:
    """
    Radii of analytic continuation, distortion and covering for resolvents.

    Raises
    ------
    OutOfRange
        If r Re q <= 2.
    """
    q = complex(q)
    x = _require_continuation(q, r)
    rho = rho_radius(q, r)
    if not rho > 1.0 - 1e-12:
        raise NumericalFailure(f"continuation radius rho = {rho} is not above 1 for r Re q = {x}")
    rho2 = rho / (abs(1.0 + r * q) + math.sqrt(2.0 + x + r * r * abs(q) ** 2))
    sharp = radii_general(resolvent_class_params(q, r)).R2
    return ResolventRadii(rho=rho, rho1=rho1_radius(q, r), rho2=rho2, rho3=rho3_radius(q, r), rho2_sharp=sharp)


# ---------------------------------------------------------------------------
# A(r), r0 and orders
# ---------------------------------------------------------------------------


def A_of_r(r: float) -> float:
    """A(r) = 6r(1+r)/((1+r)^3 - 3(5r-1)); poles at r = 2 and r = (sqrt(33) - 5)/2."""
    den = (1.0 + r) ** 3 - 3.0 * (5.0 * r - 1.0)
    if abs(den) <= 1e-13 * max(1.0, (1.0 + abs(r)) ** 3):
        raise PoleAtR(f"A(r) has a pole at r = {r}")
    return 6.0 * r * (1.0 + r) / den


def r0_closed_form() -> float:
    return 1.0 + 2.0 * math.sqrt(7.0) * math.cos(math.atan(3.0 * math.sqrt(31.0) / 8.0) / 3.0)


@lru_cache(maxsize=1)
def find_r0() -> float:
    """
    Largest root of A(r) = 1, by bisection on [5, 7] cross-checked against the closed form.

    A(5) = 5/4 and A(7) < 1, and A is continuous there (both poles lie below 2).
    """
    root = bisect(lambda r: A_of_r(r) - 1.0, 5.0, 7.0, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)
    closed = r0_closed_form()
    if abs(root - closed) > 1e-9:
        raise NumericalFailure(f"r0 by bisection ({root!r}) disagrees with the closed form ({closed!r})")
    logger.debug(f"r0 = {root!r} (closed form {closed!r})")
    return float(root)


@dataclass(frozen=True)
class OrderReport:
    """
    Orders of starlikeness for the resolvent G_r, r Re q > r0.

    ``kappa_admissible`` is False when arg(1 + rq) lies outside the sector
    of half-angle pi gamma_r / 2, where the principal power in kappa(r) has
    non-positive real part; kappa_r is then reported as 0.
    """

    q: complex
    r: float
    A: float
    r0: float
    alpha_star: float
    beta_star: float
    gamma_r: float
    kappa_r: float
    kappa_admissible: bool
    k_qc: float
    sector_half_angle: float
    sector_center: float

    @property
    def x(self) -> float:
        return self.r * self.q.real

    def as_dict(self) -> dict:
        return {
            "q": [self.q.real, self.q.imag],
            "r": self.r,
            "A": self.A,
            "r0": self.r0,
            "alpha_star": self.alpha_star,
            "beta_star": self.beta_star,
            "gamma_r": self.gamma_r,
            "kappa_r": self.kappa_r,
            "kappa_admissible": self.kappa_admissible,
            "k_qc": self.k_qc,
            "sector_half_angle": self.sector_half_angle,
            "sector_center": self.sector_center,
        }

    def __repr__(self) -> str:
        return (
            f"<OrderReport q={fmt_complex(self.q)} r={self.r:g} A={self.A:.6g} "
            f"alpha*={self.alpha_star:.6g} gamma={self.gamma_r:.6g} kappa={self.kappa_r:.6g}>"
        )

    def __str__(self) -> str:
        rows = [f"OrderReport q={fmt_complex(self.q)} r={self.r:g} (r Re q = {self.x:g})"]
        for k, v in self.as_dict().items():
            if k not in ("q", "r"):
                rows.append(f"  {k:<18} {v}")
        return "\n".join(rows)

    def _repr_html_(self) -> str:
        return html_card("OrderReport", [(k, str(v)) for k, v in self.as_dict().items()])


def _require_above_r0(q: complex, r: float) -> float:
    x = r * complex(q).real
    r0 = find_r0()
    if not x > r0:
        raise OutOfRange(f"r Re q = {x} must exceed r0 = {r0:.6f}")
    return x


def orders(q: complex, r: float) -> OrderReport:
    """
    Orders of starlikeness, strong starlikeness and squeezing for G_r.

    Raises
    ------
    OutOfRange
        If r Re q <= r0.
    """
    q = complex(q)
    x = _require_above_r0(q, r)
    A = A_of_r(x)
    gamma = (1.0 - A) / (1.0 + A)
    b = 1.0 + r * q
    center = cmath.phase(b)
    half = math.pi * gamma / 2.0
    admissible = abs(center) < half
    if admissible:
        kappa = (b ** (1.0 / gamma)).real ** gamma / (2.0 ** (1.0 - gamma) * abs(b) ** 2)
    else:
        logger.warning(f"kappa(r) inadmissible for q={q}, r={r}: |arg(1+rq)| = {abs(center):.6f} >= {half:.6f}")
        kappa = 0.0
    return OrderReport(
        q=q,
        r=float(r),
        A=A,
        r0=find_r0(),
        alpha_star=1.0 / (1.0 + A),
        beta_star=(2.0 / math.pi) * math.asin(A),
        gamma_r=gamma,
        kappa_r=float(kappa),
        kappa_admissible=admissible,
        k_qc=A,
        sector_half_angle=half,
        sector_center=center,
    )


@dataclass(frozen=True)
class SpiralOrder:
    theta: float
    order: float
    lower_estimate: float | None

    def __float__(self) -> float:
        return self.order


def spirallike_order(q: complex, r: float, theta: float) -> SpiralOrder:
    """
    Order of theta-spirallikeness (cos theta - A)/((1 - A^2) cos theta).

    theta = 0 is allowed for every r Re q > r0; theta != 0 needs r Re q >= 6
    and |theta| <= arccos(6/(r Re q)). The lower estimate
    x(x cos theta - 6)/((x^2 - 36) cos theta) is attached when x > 6.
    """
    q = complex(q)
    x = _require_above_r0(q, r)
    if theta != 0.0:
        if x < 6.0:
            raise OutOfRange(f"theta != 0 needs r Re q >= 6, got {x}")
        if abs(theta) > math.acos(6.0 / x) + 1e-15:
            raise OutOfRange(f"|theta| = {abs(theta)} exceeds arccos(6/(r Re q)) = {math.acos(6.0 / x)}")
    A = A_of_r(x)
    cos_t = math.cos(theta)
    order = (cos_t - A) / ((1.0 - A * A) * cos_t)
    estimate = None
    if x > 6.0:
        estimate = x * (x * cos_t - 6.0) / ((x * x - 36.0) * cos_t)
        if order < estimate - 1e-12:
            raise NumericalFailure(f"spirallike order {order} below its lower estimate {estimate}")
    return SpiralOrder(theta=float(theta), order=order, lower_estimate=estimate)


@dataclass(frozen=True)
class EstimateChain:
    """Elementary bounds on A(x) and the orders for x = r Re q > 6."""

    x: float
    A: float
    A_upper: float
    A_upper_coarse: float
    alpha_lower: float
    alpha_lower_coarse: float
    beta_upper: float

    def holds(self, slack: float = 1e-12) -> bool:
        alpha = 1.0 / (1.0 + self.A)
        beta = (2.0 / math.pi) * math.asin(self.A)
        return (
            self.A < self.A_upper + slack
            and self.A_upper < self.A_upper_coarse + slack
            and alpha > self.alpha_lower - slack
            and self.alpha_lower > self.alpha_lower_coarse - slack
            and beta < self.beta_upper + slack
        )


def estimate_chain(q: complex, r: float) -> EstimateChain:
    x = r * complex(q).real
    if not x > 6.0:
        raise OutOfRange(f"bounds need r Re q > 6, got {x}")
    r0 = find_r0()
    shifted = 6.0 - r0 + x
    return EstimateChain(
        x=x,
        A=A_of_r(x),
        A_upper=6.0 / shifted,
        A_upper_coarse=6.0 / x,
        alpha_lower=shifted / (12.0 - r0 + x),
        alpha_lower_coarse=x / (6.0 + x),
        beta_upper=(2.0 / math.pi) * math.asin(6.0 / shifted),
    )


# ---------------------------------------------------------------------------
# Grid predicates
# ---------------------------------------------------------------------------


def starlike_functional_many(
    g: GeneratorSpec, r: float, ws: np.ndarray, cfg: SolverConfig = DEFAULT_SOLVER
) -> np.ndarray:
    """w G_r'(w)/G_r(w) through the Herglotz part evaluated at G_r(w); equals 1 at w = 0."""
    g.require_centered()
    G = resolve_many(g, r, ws, cfg).value
    p, dp = g.herglotz.evaluate(G)
    return (1.0 + r * p) / (1.0 + r * (p + G * dp))


def starlike_functional(g: GeneratorSpec, r: float, w: complex, cfg: SolverConfig = DEFAULT_SOLVER) -> complex:
    return complex(starlike_functional_many(g, r, np.asarray([w], dtype=complex), cfg)[0])


def _class_params_dict(q: complex, r: float) -> dict:
    c = resolvent_class_params(q, r)
    return {"q": [q.real, q.imag], "r": r, "alpha": c.alpha.real, "beta": [c.beta.real, c.beta.imag]}


def check_starlike_disk(
    g: GeneratorSpec,
    r: float,
    grid: SamplingGrid,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    slack: float = DEFAULT_SLACK,
) -> CheckReport:
    """
    The starlike functional stays in the disk centered 1/(1 - A^2) of radius A/(1 - A^2).

    The headline margin is radius - |S - center|. The implied bounds
    Re S >= alpha_r and |arg S| <= pi beta_r / 2 are checked too and their
    worst margins kept in ``details``.
    """
    g.require_centered()
    grid.require_inside_unit_disk()
    rep = orders(g.q, r)
    A = rep.A
    center = 1.0 / (1.0 - A * A)
    radius = A / (1.0 - A * A)
    pts = grid.points
    S = starlike_functional_many(g, r, pts, cfg)

    order = CheckReport.from_margins("starlike_order", S.real - rep.alpha_star, pts, slack=slack)
    strong = CheckReport.from_margins(
        "strong_starlike_order", math.pi * rep.beta_star / 2.0 - np.abs(np.angle(S)), pts, slack=slack
    )
    disk = CheckReport.from_margins(
        "starlike_disk",
        radius - np.abs(S - center),
        pts,
        slack=slack,
        params={**_class_params_dict(g.q, r), "A": A, "center": center, "radius": radius, "generator": g.name},
        details={"starlike_order": order.worst_margin, "strong_starlike_order": strong.worst_margin},
    )
    return replace(disk, passed=disk.passed and order.passed and strong.passed)


def check_hyperbolic_convexity(
    g: GeneratorSpec,
    r: float,
    grid: SamplingGrid,
    cfg: SolverConfig = DEFAULT_SOLVER,
    *,
    slack: float = CONVEXITY_SLACK,
) -> CheckReport:
    """Re(w G''/G' + 1 + 2 w conj(G) G'/(1 - |G|^2)) >= 0 over the grid."""
    g.require_centered()
    grid.require_inside_unit_disk()
    pts = grid.points
    batch = resolve_many(g, r, pts, cfg)
    G, d1, d2 = batch.value, batch.d1, batch.d2
    H = pts * d2 / d1 + 1.0 + 2.0 * pts * np.conj(G) * d1 / (1.0 - np.abs(G) ** 2)
    return CheckReport.from_margins(
        "hyperbolic_convexity",
        H.real,
        pts,
        slack=slack,
        params={"q": [g.q.real, g.q.imag], "r": r, "generator": g.name},
    )


def lemma_functional(x: float, z: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """2x|z conj(zeta)| / (1 + x - 2 Re(z conj(zeta)) + |z conj(zeta)|^2 (1 - x))."""
    u = z * np.conj(zeta)
    au = np.abs(u)
    return 2.0 * x * au / (1.0 + x - 2.0 * u.real + au**2 * (1.0 - x))


def check_lemma_bounds(
    g: GeneratorSpec,
    r: float,
    grid: SamplingGrid,
    *,
    slack: float = DEFAULT_SLACK,
) -> CheckReport:
    """
    Pointwise bounds behind the starlike disk, on |z| <= 3/(1 + r Re q).

    The grid is rescaled so its outer ring lies on that circle. Two families
    of margins are checked: A(x) - A_r(z, zeta_k) for every atom zeta_k, and
    A(x) - C_r(z)/B_r(z) with B_r = Re(1 + r p), C_r = |r z p'|. The ratio
    |r z p'/(1 + r p)| never exceeds C_r/B_r and is reported for reference.

    Raises
    ------
    VariantUnsupported
        If the Herglotz part is not an atomic measure.
    """
    if not isinstance(g.herglotz, AtomicHerglotz):
        raise VariantUnsupported(f"lemma bounds need an atomic Herglotz measure; {g.name} is {g.herglotz.kind}")
    g.require_centered()
    x = _require_above_r0(g.q, r)
    A = A_of_r(x)
    disk_radius = 3.0 / (1.0 + x)
    pts = grid.scaled(disk_radius).points

    zetas = np.array([cmath.exp(1j * a) for a, m in g.herglotz.atoms if m > 0.0], dtype=complex)
    ar = lemma_functional(x, pts[:, None], zetas[None, :])
    atom_pts = np.broadcast_to(pts[:, None], ar.shape)
    kernel = CheckReport.from_margins("kernel_bound", A - ar, atom_pts, slack=slack)

    p, dp = g.herglotz.evaluate(pts)
    B = (1.0 + r * p).real
    C = np.abs(r * pts * dp)
    ratio = CheckReport.from_margins("ratio_bound", A - C / B, pts, slack=slack)
    direct = np.abs(r * pts * dp / (1.0 + r * p))

    return CheckReport.combine(
        "lemma_bounds",
        [kernel, ratio],
        params={"q": [g.q.real, g.q.imag], "r": r, "A": A, "disk_radius": disk_radius, "generator": g.name},
        details={"max_direct_ratio": float(np.max(direct)), "atoms": int(zetas.size)},
    )


def subordination_membership(
    F: Callable[[np.ndarray], np.ndarray],
    c: ClassParams,
    grid: SamplingGrid,
    *,
    slack: float = DEFAULT_SLACK,
) -> CheckReport:
    """
    Re((F(z)/z - beta)/alpha) + 1/2 over the nonzero grid points.

    ``F`` is any vectorised evaluator with F(0) = 0 and F'(0) = beta.
    """
    pts = grid.nonzero_points
    values = np.asarray(F(pts), dtype=complex)
    margins = ((values / pts - c.beta) / c.alpha).real + 0.5
    return CheckReport.from_margins(
        "subordination",
        margins,
        pts,
        slack=slack,
        params={"alpha": [c.alpha.real, c.alpha.imag], "beta": [c.beta.real, c.beta.imag]},
    )


def check_subordination(
    g: GeneratorSpec,
    r: float,
    grid: SamplingGrid,
    *,
    slack: float = DEFAULT_SLACK,
) -> CheckReport:
    """Membership of Id + r f in the resolvent class (2r Re q, 1 + rq)."""
    g.require_centered()
    grid.require_inside_unit_disk()

    def F(z: np.ndarray) -> np.ndarray:
        return z + r * g.evaluate(z)[0]

    rep = subordination_membership(F, resolvent_class_params(g.q, r), grid, slack=slack)
    return replace(rep, params={**rep.params, "r": r, "generator": g.name})
