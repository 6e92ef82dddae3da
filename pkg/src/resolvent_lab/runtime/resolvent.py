"""
Pointwise nonlinear resolvents G_r = (Id + r f)^{-1}.

Every solve is a vectorised damped Newton iteration on z + r f(z) - w = 0 over
a flat array of targets, with a per-point convergence mask. Targets that do
not converge from the linearised initial guess are retried by homotopy along
the segment from the fixed point to w, warm-starting each segment.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import IterateEscaped, NoConvergence, OutOfRange, RadiusExceeded
from ..schema.pretty import fmt_complex, html_card
from ..schema.schema_model import CheckReport
from .generator import ComplexLike, GeneratorSpec, as_complex_array, require_in_disk

logger = logging.getLogger(__name__)

# Continuation stops this far inside the disk of analytic continuation.
CONTINUATION_MARGIN = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-13
    max_iter: int = 64
    continuation_steps: int = 16
    max_halvings: int = 40

    def __post_init__(self) -> None:
        if not self.tol > 0.0:
            raise ValueError(f"solver tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.continuation_steps < 1:
            raise ValueError(f"continuation_steps must be >= 1, got {self.continuation_steps}")


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class ResolventEval:
    """G_r(w) with its first two derivatives and solver diagnostics."""

    w: complex
    value: complex
    d1: complex
    d2: complex
    iterations: int
    residual: float
    continued: bool = False

    def __repr__(self) -> str:
        return (
            f"<ResolventEval G({fmt_complex(self.w)})={fmt_complex(self.value)} "
            f"iter={self.iterations} res={self.residual:.2e}>"
        )

    def __str__(self) -> str:
        return "\n".join(
            [
                f"ResolventEval at w = {fmt_complex(self.w, 12)}",
                f"  G(w)      {fmt_complex(self.value, 15)}",
                f"  G'(w)     {fmt_complex(self.d1, 15)}",
                f"  G''(w)    {fmt_complex(self.d2, 15)}",
                f"  iterations {self.iterations}{' (continued)' if self.continued else ''}",
                f"  residual   {self.residual:.3e}",
            ]
        )

    def _repr_html_(self) -> str:
        return html_card(
            "ResolventEval",
            [
                ("w", fmt_complex(self.w, 12)),
                ("G(w)", fmt_complex(self.value, 15)),
                ("G'(w)", fmt_complex(self.d1, 15)),
                ("G''(w)", fmt_complex(self.d2, 15)),
                ("Iterations", str(self.iterations)),
                ("Residual", f"{self.residual:.3e}"),
            ],
        )


@dataclass(frozen=True, eq=False)
class ResolventBatch:
    """Array form of ``ResolventEval``; every field has the shape of ``w``."""

    w: np.ndarray
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    continued: np.ndarray

    def __len__(self) -> int:
        return int(self.w.size)

    def __getitem__(self, i: int) -> ResolventEval:
        return ResolventEval(
            w=complex(self.w.flat[i]),
            value=complex(self.value.flat[i]),
            d1=complex(self.d1.flat[i]),
            d2=complex(self.d2.flat[i]),
            iterations=int(self.iterations.flat[i]),
            residual=float(self.residual.flat[i]),
            continued=bool(self.continued.flat[i]),
        )

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if self.residual.size else 0.0

    def __repr__(self) -> str:
        return f"<ResolventBatch n={len(self)} max_res={self.max_residual:.2e}>"


@dataclass
class _NewtonState:
    z: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    escaped: np.ndarray


def _newton(
    g: GeneratorSpec,
    r: float,
    w: np.ndarray,
    z0: np.ndarray,
    cfg: SolverConfig,
    bound: float,
) -> _NewtonState:
    """Damped Newton on flat arrays; iterates are kept in the open disk of radius ``bound``."""
    z = z0.astype(complex).copy()
    iterations = np.zeros(z.shape, dtype=int)
    residual = np.full(z.shape, np.inf)
    escaped = np.zeros(z.shape, dtype=bool)
    active = np.ones(z.shape, dtype=bool)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(cfg.max_iter + 1):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            za = z[idx]
            fa, dfa = g.evaluate(za)
            res = za + r * fa - w[idx]
            residual[idx] = np.abs(res)
            conv = residual[idx] <= cfg.tol
            active[idx[conv]] = False
            if k == cfg.max_iter:
                break
            idx, za, res, dfa = idx[~conv], za[~conv], res[~conv], dfa[~conv]
            step = res / (1.0 + r * dfa)
            bad = ~np.isfinite(step)
            step[bad] = 0.0
            znew = za - step
            out = (np.abs(znew) >= bound) | bad
            halvings = 0
            while np.any(out & ~bad) and halvings < cfg.max_halvings:
                step[out] *= 0.5
                znew[out] = za[out] - step[out]
                out = (np.abs(znew) >= bound) | bad
                halvings += 1
            escaped[idx[out]] = True
            active[idx[out]] = False
            z[idx[~out]] = znew[~out]
            iterations[idx] += 1

    converged = residual <= cfg.tol
    escaped &= ~converged
    return _NewtonState(z, iterations, residual, converged, escaped)


def _homotopy(
    g: GeneratorSpec,
    r: float,
    w: np.ndarray,
    start_w: complex,
    start_z: complex,
    cfg: SolverConfig,
    bound: float,
) -> _NewtonState:
    """Track the solution from (start_w, start_z) to w in ``continuation_steps`` warm-started segments."""
    z = np.full(w.shape, start_z, dtype=complex)
    total = np.zeros(w.shape, dtype=int)
    state = None
    for k in range(1, cfg.continuation_steps + 1):
        target = start_w + (w - start_w) * (k / cfg.continuation_steps)
        state = _newton(g, r, target, z, cfg, bound)
        total += state.iterations
        if not np.all(state.converged):
            break
        z = state.z
    assert state is not None
    state.iterations = total
    return state


def _raise_failure(state: _NewtonState, w: np.ndarray, r: float) -> None:
    failed = ~state.converged
    if not np.any(failed):
        return
    i = int(np.argmax(failed))
    if state.escaped[i]:
        raise IterateEscaped(f"Newton iterate escaped for w = {w[i]}, r = {r} and damping could not recover it")
    raise NoConvergence(
        f"no convergence for w = {w[i]}, r = {r}: residual {state.residual[i]:.3e} after continuation"
    )


def _iteration_bound(g: GeneratorSpec, r: float) -> float:
    """A priori disk containing G_r(D): D_{rho_1(r)} when r Re q > 2, else the unit disk."""
    from .geometry import rho1_radius

    if g.centered and r * g.q.real > 2.0:
        return rho1_radius(g.q, r)
    return 1.0


def _start_point(g: GeneratorSpec) -> complex:
    return g.tau if g.interior_fixed_point else 0j


def _finish(g: GeneratorSpec, r: float, w: np.ndarray, state: _NewtonState, continued: np.ndarray) -> ResolventBatch:
    z = state.z
    f, df = g.evaluate(z)
    d1 = 1.0 / (1.0 + r * df)
    d2 = -r * g.second_derivative(z) * d1**3
    residual = np.abs(z + r * f - w)
    return ResolventBatch(
        w=w,
        value=z,
        d1=d1,
        d2=d2,
        iterations=state.iterations,
        residual=residual,
        continued=continued,
    )


def _require_positive_r(r: float) -> None:
    if not r > 0.0:
        raise OutOfRange(f"resolvent parameter r must be positive, got {r}")


def _solve_flat(g: GeneratorSpec, r: float, w: np.ndarray, cfg: SolverConfig, bound: float) -> ResolventBatch:
    if g.interior_fixed_point:
        _, df_tau = g.evaluate(np.asarray([g.tau]))
        z0 = g.tau + (w - g.tau) / (1.0 + r * df_tau[0])
    else:
        z0 = w / (1.0 + r * g.q)
    z0 = np.where(np.abs(z0) < bound, z0, 0.0)
    state = _newton(g, r, w, z0, cfg, bound)
    continued = np.zeros(w.shape, dtype=bool)

    failed = np.flatnonzero(~state.converged)
    if failed.size:
        logger.debug(f"{failed.size} of {w.size} targets need continuation (r = {r})")
        retry = _homotopy(g, r, w[failed], _start_point(g), _start_point(g), cfg, bound)
        _raise_failure(retry, w[failed], r)
        state.z[failed] = retry.z
        state.iterations[failed] += retry.iterations
        state.residual[failed] = retry.residual
        state.converged[failed] = True
        continued[failed] = True
    return _finish(g, r, w, state, continued)


def resolve_many(g: GeneratorSpec, r: float, ws: ComplexLike, cfg: SolverConfig = DEFAULT_SOLVER) -> ResolventBatch:
    """
    Solve z + r f(z) = w for every target in ``ws`` (|w| < 1).

    Raises
    ------
    DomainError
        If some |w| >= 1.
    OutOfRange
        If r <= 0.
    NoConvergence, IterateEscaped
        If Newton and continuation both fail for some target.
    """
    _require_positive_r(r)
    arr, _ = as_complex_array(ws)
    require_in_disk(arr, what="target")
    if not g.centered:
        logger.warning(f"resolving {g.name} with tau = {g.tau}; non-centered resolvents are experimental")
    flat = arr.ravel()
    batch = _solve_flat(g, r, flat, cfg, _iteration_bound(g, r))
    return _reshape(batch, arr.shape)


def resolve(g: GeneratorSpec, r: float, w: complex, cfg: SolverConfig = DEFAULT_SOLVER) -> ResolventEval:
    """
    Evaluate G_r(w), G_r'(w) and G_r''(w) for a single |w| < 1.

    The initial guess is w/(1 + r q), exact for linear generators.
    """
    return resolve_many(g, r, np.asarray([w], dtype=complex), cfg)[0]


def _continuation_radius(g: GeneratorSpec, r: float) -> tuple[float, float]:
    from .geometry import rho1_radius, rho_radius

    g.require_centered()
    x = r * g.q.real
    if not x > 2.0:
        raise OutOfRange(f"analytic continuation needs r Re q > 2, got r Re q = {x}")
    return rho_radius(g.q, r), rho1_radius(g.q, r)


def resolve_continued_many(
    g: GeneratorSpec, r: float, ws: ComplexLike, cfg: SolverConfig = DEFAULT_SOLVER
) -> ResolventBatch:
    """
    Analytic continuation of G_r to the disk of radius rho(r), r Re q > 2.

    Each target is reached along the radius [0, w] in ``continuation_steps``
    warm-started Newton solves, with iterates confined to D_{rho_1(r)}.

    Raises
    ------
    RadiusExceeded
        If some |w| >= rho(r) (1 - 1e-6).
    """
    _require_positive_r(r)
    rho, rho1 = _continuation_radius(g, r)
    arr, _ = as_complex_array(ws)
    flat = arr.ravel()
    limit = rho * (1.0 - CONTINUATION_MARGIN)
    beyond = np.abs(flat) >= limit
    if np.any(beyond):
        w_bad = complex(flat[int(np.argmax(beyond))])
        raise RadiusExceeded(f"|w| = {abs(w_bad)} is not inside the continuation disk rho({r}) = {rho}")
    state = _homotopy(g, r, flat, 0j, 0j, cfg, rho1)
    _raise_failure(state, flat, r)
    batch = _finish(g, r, flat, state, np.ones(flat.shape, dtype=bool))
    return _reshape(batch, arr.shape)


def resolve_continued(g: GeneratorSpec, r: float, w: complex, cfg: SolverConfig = DEFAULT_SOLVER) -> ResolventEval:
    return resolve_continued_many(g, r, np.asarray([w], dtype=complex), cfg)[0]


def resolve_in_disk(g: GeneratorSpec, r: float, ws: ComplexLike, cfg: SolverConfig = DEFAULT_SOLVER) -> ResolventBatch:
    """Direct solves inside the unit disk, continuation for 1 <= |w| < rho(r)."""
    arr, _ = as_complex_array(ws)
    flat = arr.ravel()
    outer = np.abs(flat) >= 1.0
    if not np.any(outer):
        return resolve_many(g, r, arr, cfg)
    if np.all(outer):
        return resolve_continued_many(g, r, arr, cfg)
    inner = resolve_many(g, r, flat[~outer], cfg)
    cont = resolve_continued_many(g, r, flat[outer], cfg)
    merged = {}
    for name in ("value", "d1", "d2", "iterations", "residual", "continued"):
        a, b = getattr(inner, name), getattr(cont, name)
        out = np.empty(flat.shape, dtype=np.result_type(a, b))
        out[~outer], out[outer] = a, b
        merged[name] = out
    return _reshape(ResolventBatch(w=flat, **merged), arr.shape)


def _reshape(batch: ResolventBatch, shape: tuple[int, ...]) -> ResolventBatch:
    return ResolventBatch(
        w=batch.w.reshape(shape),
        value=batch.value.reshape(shape),
        d1=batch.d1.reshape(shape),
        d2=batch.d2.reshape(shape),
        iterations=batch.iterations.reshape(shape),
        residual=batch.residual.reshape(shape),
        continued=batch.continued.reshape(shape),
    )


def univalence_probe(
    g: GeneratorSpec, r: float, R: float, n: int, cfg: SolverConfig = DEFAULT_SOLVER
) -> CheckReport:
    """
    Brute-force injectivity probe of G_r on D_R.

    G_r is sampled on the polar n x n grid with radii R (1 - 1e-6) k / n and
    angles 2 pi j / n; the report carries the smallest difference quotient
    |G(w_i) - G(w_j)| / |w_i - w_j| over all pairs and passes iff it is
    strictly positive. With a single sample there are no pairs and the
    quotient is reported as +inf.
    """
    if n < 1:
        raise ValueError(f"univalence probe needs n >= 1, got {n}")
    if R >= 1.0:
        rho, _ = _continuation_radius(g, r)
        if R > rho:
            raise RadiusExceeded(f"probe radius {R} exceeds rho({r}) = {rho}")
    radii = R * (1.0 - CONTINUATION_MARGIN) * np.arange(1, n + 1) / n
    phi = 2.0 * np.pi * np.arange(n) / n
    ws = (radii[:, None] * np.exp(1j * phi)[None, :]).ravel()
    params = {"r": r, "R": R, "n": n}
    if ws.size < 2:
        return CheckReport("univalence_probe", True, float("inf"), None, params, {"pairs": 0})

    values = resolve_in_disk(g, r, ws, cfg).value
    i, j = np.triu_indices(ws.size, k=1)
    ratio = np.abs(values[i] - values[j]) / np.abs(ws[i] - ws[j])
    k = int(np.argmin(ratio))
    worst = float(ratio[k])
    return CheckReport(
        check="univalence_probe",
        passed=bool(worst > 0.0),
        worst_margin=worst,
        witness=complex(ws[i[k]]),
        params=params,
        details={"pairs": int(ratio.size), "partner": [float(ws[j[k]].real), float(ws[j[k]].imag)]},
    )
