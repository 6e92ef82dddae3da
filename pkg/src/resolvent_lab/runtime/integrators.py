"""
Embedded explicit Runge-Kutta integration of complex flows confined to the unit disk.

The integrator advances a whole vector of initial points with one shared step
size. Step control uses the max over points of the scaled local error, so
every trajectory meets the tolerance. Stage states that leave the disk cause
a step rejection; a point that keeps forcing rejections below the minimum
step, or whose accepted state reaches the escape threshold, is frozen and
reported as escaped while the remaining points continue.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import NumericalFailure

logger = logging.getLogger(__name__)

Field = Callable[[np.ndarray], np.ndarray]

ESCAPE_RADIUS = 1.0 - 1e-12
# step-size underflow this close to the circle counts as escape, not failure
BOUNDARY_LAYER = 0.999


@dataclass(frozen=True, eq=False)
class FlowBatch:
    """
    Checkpoint values of a vector of trajectories.

    ``values`` and ``local_error`` have shape (checkpoints, points); entries
    at or after a point's escape are NaN. ``escape_s`` is NaN for points that
    never escaped and ``last`` holds the last state inside the disk.
    """

    checkpoints: np.ndarray
    phase: float
    values: np.ndarray
    local_error: np.ndarray
    escaped: np.ndarray
    escape_s: np.ndarray
    last: np.ndarray
    steps: int

    def __repr__(self) -> str:
        return (
            f"<FlowBatch points={self.values.shape[1]} checkpoints={self.checkpoints.size} "
            f"escaped={int(self.escaped.sum())} steps={self.steps}>"
        )


class ExplicitRungeKutta:
    """
    Adaptive explicit Runge-Kutta pair given by an extended Butcher table.

    Subclasses fill in the stage count ``s``, the orders ``n`` (propagated)
    and ``m`` (embedded), the stage nodes ``eval_stages``, the table ``BT``
    whose last row holds the propagating weights, and the error weights ``TR``.
    """

    s: int
    n: int
    m: int
    eval_stages: list[float]
    BT: dict[int, list[float]]
    TR: list[float]

    def __init__(
        self,
        *,
        rtol: float = 1e-10,
        atol: float = 1e-12,
        h_init: float | None = None,
        h_min: float = 1e-12,
        max_steps: int = 1_000_000,
        safety: float = 0.9,
    ):
        if not (rtol > 0.0 and atol > 0.0):
            raise ValueError(f"tolerances must be positive, got rtol={rtol}, atol={atol}")
        self.rtol = rtol
        self.atol = atol
        self.h_init = h_init
        self.h_min = h_min
        self.max_steps = max_steps
        self.safety = safety

    def _attempt(self, field: Field, u: np.ndarray, h: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        One trial step. Returns (new state, error estimate, outside mask);
        points whose stage states left the disk are flagged and get NaN.
        """
        outside = np.zeros(u.shape, dtype=bool)
        ks: list[np.ndarray] = []
        y = u
        for i in range(self.s + 1):
            if i > 0:
                y = u + h * sum(a * k for a, k in zip(self.BT[i - 1], ks) if a != 0.0)
            bad = ~(np.abs(y) < 1.0)
            outside |= bad
            k = np.full(u.shape, np.nan, dtype=complex)
            ok = ~outside
            if np.any(ok):
                k[ok] = field(y[ok])
            ks.append(k)
        new = u + h * sum(b * k for b, k in zip(self.BT[self.s - 1], ks) if b != 0.0)
        err = h * sum(t * k for t, k in zip(self.TR, ks) if t != 0.0)
        return new, err, outside

    def integrate(
        self,
        field: Field,
        u0: np.ndarray,
        checkpoints: Sequence[float],
        *,
        phase: float = 0.0,
    ) -> FlowBatch:
        """
        Integrate du/ds = -exp(i phase) field(u) from s = 0 through the sorted checkpoints.

        Steps are clipped to land exactly on every checkpoint.

        Raises
        ------
        NumericalFailure
            If the step size underflows while no point is leaving the disk,
            or ``max_steps`` is exhausted.
        """
        cps = np.asarray(checkpoints, dtype=float)
        if cps.ndim != 1 or np.any(cps < 0.0) or np.any(np.diff(cps) < 0.0):
            raise ValueError("checkpoints must be a non-decreasing list of non-negative times")
        direction = -np.exp(1j * phase)

        def rhs(y: np.ndarray) -> np.ndarray:
            return direction * field(y)

        u = np.asarray(u0, dtype=complex).ravel().copy()
        npts = u.size
        values = np.full((cps.size, npts), np.nan, dtype=complex)
        local_error = np.full((cps.size, npts), np.nan)
        err_now = np.zeros(npts)
        escaped = ~(np.abs(u) < 1.0)
        escape_s = np.where(escaped, 0.0, np.nan)

        s = 0.0
        span = float(cps[-1]) if cps.size else 0.0
        h = self.h_init or max(min(0.01, span / 16.0), 1e-6)
        steps = 0
        order = min(self.n, self.m) + 1

        for ci, target in enumerate(cps):
            while s < target and not np.all(escaped):
                if steps >= self.max_steps:
                    raise NumericalFailure(f"integrator exceeded {self.max_steps} steps at s = {s}")
                active = np.flatnonzero(~escaped)
                h_try = min(h, target - s)
                landing = h_try == target - s
                new, err, outside = self._attempt(rhs, u[active], h_try)

                if np.any(outside):
                    h = h_try / 2.0
                    if h < self.h_min * max(1.0, s):
                        idx = active[outside]
                        escaped[idx] = True
                        escape_s[idx] = s
                        logger.debug(f"{idx.size} trajectories escaped at s = {s:.6g} (phase {phase:.4f})")
                        h = max(h_try, self.h_min)
                    continue

                scale = self.atol + self.rtol * np.maximum(np.abs(u[active]), np.abs(new))
                point_ratio = np.abs(err) / scale
                point_ratio[~np.isfinite(point_ratio)] = np.inf
                ratio = float(np.max(point_ratio)) if active.size else 0.0

                if ratio <= 1.0:
                    s = float(target) if landing else s + h_try
                    u[active] = new
                    err_now[active] = np.abs(err)
                    steps += 1
                    hit = np.abs(new) >= ESCAPE_RADIUS
                    if np.any(hit):
                        idx = active[hit]
                        escaped[idx] = True
                        escape_s[idx] = s
                    grow = 5.0 if ratio == 0.0 else min(5.0, max(0.2, self.safety * ratio ** (-1.0 / order)))
                    h_next = h_try * grow
                    # a step clipped to a checkpoint must not shrink the running step
                    h = max(h_next, h) if landing else h_next
                else:
                    h = h_try * max(0.2, self.safety * ratio ** (-1.0 / order))
                    if h < self.h_min * max(1.0, s):
                        culprits = point_ratio > 1.0
                        if not np.all(np.abs(u[active][culprits]) > BOUNDARY_LAYER):
                            raise NumericalFailure(f"step size underflow at s = {s} (error ratio {ratio:.3e})")
                        idx = active[culprits]
                        escaped[idx] = True
                        escape_s[idx] = s
                        h = max(h_try, self.h_min)

            alive = ~escaped
            values[ci, alive] = u[alive]
            local_error[ci, alive] = err_now[alive]

        return FlowBatch(
            checkpoints=cps,
            phase=float(phase),
            values=values,
            local_error=local_error,
            escaped=escaped,
            escape_s=escape_s,
            last=u.copy(),
            steps=steps,
        )


class DormandPrince54(ExplicitRungeKutta):
    """Dormand-Prince 5(4) pair. Seven stages (FSAL), 5th order propagation with
    embedded 4th order error estimate.

    Characteristics
    ---------------
    * Order: 5 (propagating) / 4 (embedded)
    * Stages: 7
    * Explicit, adaptive timestep
    """

    def __init__(self, **solver_kwargs):
        super().__init__(**solver_kwargs)

        #number of stages excluding the final error stage
        self.s = 6

        #order of scheme and embedded method
        self.n = 5
        self.m = 4

        #intermediate evaluation times
        self.eval_stages = [0.0, 1/5, 3/10, 4/5, 8/9, 1, 1]

        #extended butcher table, last row are the 5th order weights
        self.BT = {
            0: [       1/5],
            1: [      3/40,        9/40],
            2: [     44/45,      -56/15,       32/9],
            3: [19372/6561, -25360/2187, 64448/6561, -212/729],
            4: [ 9017/3168,     -355/33, 46732/5247,   49/176, -5103/18656],
            5: [    35/384,           0,   500/1113,  125/192,  -2187/6784, 11/84],
            }

        #coefficients for local truncation error estimate
        self.TR = [71/57600, 0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40]
