from __future__ import annotations

import csv

import numpy as np
import pytest

from resolvent_lab.errors import OutOfRange
from resolvent_lab.runtime.geometry import radii_resolvent
from resolvent_lab.runtime.renderers import (
    closed_sweep,
    curves_html,
    render_image_curves,
    render_svg,
    write_curves_csv,
    write_curves_svg,
)


def test_closed_sweep_is_closed():
    pts = closed_sweep(0.5, 17)
    assert pts.size == 17
    assert pts[0] == pts[-1]
    assert np.allclose(np.abs(pts), 0.5)


def test_linear_images_are_scaled_circles(linear):
    curves = render_image_curves(linear, 10.0, [0.5, 2.0], angles=64)
    images = [c for c in curves if not c.reference]
    assert [len(c) for c in images] == [64, 64]
    assert images[0].max_modulus == pytest.approx(0.5 / 11.0, rel=1e-12)
    # beyond the unit disk the curve comes from continuation
    assert images[1].max_modulus == pytest.approx(2.0 / 11.0, rel=1e-10)
    assert all(c.points[0] == c.points[-1] for c in curves)


def test_reference_circles(linear):
    curves = render_image_curves(linear, 10.0, [0.5], angles=16)
    refs = {c.label: c for c in curves if c.reference}
    assert set(refs) == {"rho1", "rho2", "rho3", "3/(1+rRe q)"}
    radii = radii_resolvent(1.0, 10.0)
    assert refs["rho1"].max_modulus == pytest.approx(radii.rho1)
    assert refs["3/(1+rRe q)"].max_modulus == pytest.approx(3.0 / 11.0)


def test_small_r_has_fewer_references(koebe):
    curves = render_image_curves(koebe, 1.0, [0.5], angles=16)
    assert [c.label for c in curves if c.reference] == ["rho3"]


def test_radius_outside_admissible_range(linear, koebe):
    rho = radii_resolvent(1.0, 10.0).rho
    with pytest.raises(OutOfRange):
        render_image_curves(linear, 10.0, [0.5, rho], angles=16)
    with pytest.raises(OutOfRange):
        render_image_curves(koebe, 1.0, [1.0], angles=16)
    with pytest.raises(ValueError):
        render_image_curves(linear, 10.0, [0.5], angles=2)


def test_koebe_image_stays_within_uniform_bound(koebe):
    curves = render_image_curves(koebe, 10.0, [0.999], angles=128)
    assert curves[0].max_modulus <= 3.0 / 11.0


def test_csv_output(linear, tmp_path):
    curves = render_image_curves(linear, 10.0, [0.5], angles=8)
    path = tmp_path / "out" / "curves.csv"
    write_curves_csv(curves, path)
    with path.open(encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["label", "index", "re", "im"]
    assert len(rows) == 1 + sum(len(c) for c in curves)
    first = rows[1]
    assert first[0] == "G_r(|z|=0.5)"
    assert float(first[2]) == pytest.approx(0.5 / 11.0)


def test_svg_output(linear, tmp_path):
    curves = render_image_curves(linear, 10.0, [0.5, 0.9], angles=8)
    svg = render_svg(curves, size=200)
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == len(curves)
    assert svg.count('stroke-dasharray="4 3"') == sum(c.reference for c in curves)
    path = tmp_path / "curves.svg"
    write_curves_svg(curves, path, size=200)
    assert path.read_text(encoding="utf-8") == svg


def test_curves_html(linear):
    html = curves_html(render_image_curves(linear, 10.0, [0.5], angles=8))
    assert "G_r(|z|=0.5)" in html
    assert "reference" in html
