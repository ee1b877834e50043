"""Tests for pvpop.plot — the deterministic SVG scatter."""

import xml.etree.ElementTree as ET

import pytest

from pvpop.errors import DomainError
from pvpop.harness import ReplicationRecord, emit_csv
from pvpop.plot import (
    TAGLINE,
    load_pairs,
    max_vertical_deviation,
    render_scatter_svg,
    to_pixels,
    write_svg,
)

SVG = "{http://www.w3.org/2000/svg}"

POINTS = [(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]


def _circles(svg: str) -> list[tuple[str, str]]:
    root = ET.fromstring(svg)
    return [(c.get("cx"), c.get("cy")) for c in root.iter(f"{SVG}circle")]


class TestToPixels:
    def test_corners(self):
        assert to_pixels(0.0, 0.0) == (50.0, 370.0)
        assert to_pixels(1.0, 1.0) == (370.0, 50.0)


class TestRenderScatter:
    def test_marker_positions(self):
        svg = render_scatter_svg(POINTS)
        assert _circles(svg) == [
            ("50.000", "370.000"),
            ("210.000", "290.000"),
            ("370.000", "50.000"),
        ]

    def test_identity_line(self):
        root = ET.fromstring(render_scatter_svg(POINTS))
        identity = [e for e in root.iter(f"{SVG}line") if e.get("class") == "identity"]
        assert len(identity) == 1
        line = identity[0]
        assert (line.get("x1"), line.get("y1"), line.get("x2"), line.get("y2")) == (
            "50",
            "370",
            "370",
            "50",
        )

    def test_empty_has_axes_only(self):
        svg = render_scatter_svg([])
        assert _circles(svg) == []
        assert 'class="identity"' in svg
        assert 'class="axes"' in svg

    def test_deterministic(self):
        assert render_scatter_svg(POINTS, title="n=20") == render_scatter_svg(POINTS, title="n=20")

    def test_labels_escaped(self):
        svg = render_scatter_svg(POINTS, title="p < 0.05 & PoP")
        assert "p &lt; 0.05 &amp; PoP" in svg
        ET.fromstring(svg)

    def test_tagline(self):
        assert TAGLINE in render_scatter_svg(POINTS)

    @pytest.mark.parametrize("point", [(1.2, 0.5), (0.5, -0.1), (float("nan"), 0.5)])
    def test_outside_unit_square(self, point):
        with pytest.raises(DomainError):
            render_scatter_svg([point])


class TestDeviation:
    def test_max(self):
        assert max_vertical_deviation(POINTS) == 0.25

    def test_empty(self):
        assert max_vertical_deviation([]) == 0.0


class TestFiles:
    def test_load_and_write(self, tmp_path):
        records = [
            ReplicationRecord(0, 0.5, 1.0, 0.25, 0.5, {"y_E": 3}),
            ReplicationRecord(1, 0.0, 0.0, 0.0, 0.0, {"y_E": 5}),
        ]
        csv_path = tmp_path / "records.csv"
        emit_csv(records, csv_path, "binary-one-sample")
        assert load_pairs(csv_path, "one") == [(0.5, 0.25), (0.0, 0.0)]
        assert load_pairs(csv_path, "two") == [(1.0, 0.5), (0.0, 0.0)]

        svg_path = tmp_path / "scatter.svg"
        write_svg(svg_path, render_scatter_svg(load_pairs(csv_path)))
        assert _circles(svg_path.read_text(encoding="utf-8")) == [
            ("210.000", "290.000"),
            ("50.000", "370.000"),
        ]
