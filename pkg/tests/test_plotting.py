import math

from cleanflex import (
    FourierFunction,
    SupportCurve,
    catalog,
    clean_flex_census,
    sextactic_scan,
    vertex_scan,
)
from cleanflex.plotting import plot_conics, plot_function, plot_vertices


def test_function_plot_is_deterministic(tmp_path):
    u = FourierFunction([0, 0, 0, 0, 1.0])
    recs = clean_flex_census(u, 1).records
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_function(u, recs, a, "sin 2t")
    plot_function(u, recs, b, "sin 2t")
    assert a.read_bytes() == b.read_bytes()
    fig = plot_function(u, recs)
    ax = fig.axes[0]
    # u plus four osculating polynomials, then one marker line per flex
    assert len(ax.lines) == 5 + 4


def test_vertex_plot_marks_kinds(tmp_path):
    curve = SupportCurve(catalog("oval", eps=0.1))
    recs = vertex_scan(curve)
    path = tmp_path / "v.svg"
    plot_vertices(curve, recs, path)
    text = path.read_text()
    assert "clean max" in text and "clean min" in text


def test_degenerate_curve_plot_is_flagged(tmp_path):
    curve = SupportCurve(FourierFunction([1.0, 0.0, 0.0]))
    path = tmp_path / "c.svg"
    plot_vertices(curve, [], path)
    assert "degenerate" in path.read_text()


def test_conic_plot(tmp_path):
    curve = SupportCurve(catalog("trefoil", eps=0.05))
    recs = sextactic_scan(curve)
    fig = plot_conics(curve, recs, tmp_path / "s.svg")
    ax = fig.axes[0]
    assert len(ax.collections) >= 6
    lo, hi = ax.get_xlim()
    assert hi - lo > 2.0 and math.isfinite(lo)
