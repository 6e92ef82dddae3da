from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from html import escape
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import OutOfRange
from ..schema.pretty import html_table
from .generator import GeneratorSpec
from .geometry import radii_resolvent, rho3_radius
from .resolvent import DEFAULT_SOLVER, SolverConfig, resolve_in_disk

logger = logging.getLogger(__name__)

IMAGE_COLOURS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
REFERENCE_COLOUR = "#7f7f7f"


@dataclass(frozen=True, eq=False)
class ImageCurve:
    """
    Closed polyline: the image under G_r of a circle |z| = c, or a reference
    circle. The sweep is closed, so the first and last points coincide.
    """

    label: str
    points: np.ndarray
    reference: bool = False

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.points)))

    def __len__(self) -> int:
        return int(self.points.size)

    def __repr__(self) -> str:
        kind = "reference" if self.reference else "image"
        return f"<ImageCurve {self.label} {kind} n={len(self)} max|.|={self.max_modulus:.6g}>"


def closed_sweep(radius: float, n: int) -> np.ndarray:
    phi = 2.0 * np.pi * np.arange(n) / (n - 1)
    pts = radius * np.exp(1j * phi)
    pts[-1] = pts[0]
    return pts


def _admissible_radius(g: GeneratorSpec, r: float) -> float:
    x = r * g.q.real
    if g.centered and x > 2.0:
        return radii_resolvent(g.q, r).rho
    return 1.0


def render_image_curves(
    g: GeneratorSpec,
    r: float,
    circle_radii: Sequence[float],
    angles: int = 256,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> list[ImageCurve]:
    """
    Images of the circles |z| = c under G_r, followed by the reference circles
    rho1, rho2, rho3 and 3/(1 + r Re q) (those defined for this r).

    Raises
    ------
    OutOfRange
        If some radius is not below rho(r) (or 1 when r Re q <= 2); raised
        before any solve.
    """
    if angles < 3:
        raise ValueError(f"need at least 3 angles, got {angles}")
    limit = _admissible_radius(g, r)
    for c in circle_radii:
        if not 0.0 < c < limit:
            raise OutOfRange(f"circle radius {c} is not inside (0, {limit:.12g}) for r = {r}")

    curves = []
    for c in circle_radii:
        values = resolve_in_disk(g, r, closed_sweep(c, angles), cfg).value
        values[-1] = values[0]
        curves.append(ImageCurve(label=f"G_r(|z|={c:g})", points=values))

    x = r * g.q.real
    refs: list[tuple[str, float]] = []
    if g.centered and x > 2.0:
        radii = radii_resolvent(g.q, r)
        refs += [("rho1", radii.rho1), ("rho2", radii.rho2)]
    refs.append(("rho3", rho3_radius(g.q, r)))
    if x > 2.0:
        refs.append(("3/(1+rRe q)", 3.0 / (1.0 + x)))
    curves += [ImageCurve(label=name, points=closed_sweep(rad, angles), reference=True) for name, rad in refs]
    logger.info(f"rendered {len(circle_radii)} image curves of {g.name} at r = {r}")
    return curves


def write_curves_csv(curves: Sequence[ImageCurve], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["label", "index", "re", "im"])
        for curve in curves:
            for i, z in enumerate(curve.points):
                writer.writerow([curve.label, i, f"{z.real:.17g}", f"{z.imag:.17g}"])


def svg_polyline(points: np.ndarray, *, extent: float, size: int, stroke: str, dashed: bool = False) -> str:
    scale = size / (2.0 * extent)
    xs = (points.real + extent) * scale
    ys = (extent - points.imag) * scale
    coords = " ".join(f"{x:.4f},{y:.4f}" for x, y in zip(xs, ys))
    dash = ' stroke-dasharray="4 3"' if dashed else ""
    return f'<polyline fill="none" stroke="{stroke}" stroke-width="1"{dash} points="{coords}"/>'


def render_svg(curves: Sequence[ImageCurve], *, size: int = 512) -> str:
    extent = 1.1 * max((c.max_modulus for c in curves), default=1.0) or 1.0
    body = []
    colour = 0
    for curve in curves:
        if curve.reference:
            stroke = REFERENCE_COLOUR
        else:
            stroke = IMAGE_COLOURS[colour % len(IMAGE_COLOURS)]
            colour += 1
        body.append(f"  <g><title>{escape(curve.label)}</title>")
        body.append("    " + svg_polyline(curve.points, extent=extent, size=size, stroke=stroke, dashed=curve.reference))
        body.append("  </g>")
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
            *body,
            "</svg>",
            "",
        ]
    )


def write_curves_svg(curves: Sequence[ImageCurve], path: Path, *, size: int = 512) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(curves, size=size), encoding="utf-8")


def curves_html(curves: Sequence[ImageCurve]) -> str:
    rows = [
        [escape(c.label), "reference" if c.reference else "image", str(len(c)), f"{c.max_modulus:.6g}"]
        for c in curves
    ]
    return html_table(["Label", "Kind", "Points", "Max modulus"], rows, numeric=(2, 3))
