"""SVG output for combinatorial and geometric drawings."""
from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .blowup import _route_points, plan_coordinates
from .drawing import CombinatorialDrawing
from .geometry import GeometricDrawing


def _frame(points, size=480.0, pad=24.0):
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(P):
        return lambda p: (pad, pad), size
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9)
    k = (size - 2 * pad) / span

    def f(p):
        # y axis flipped so that the picture is not mirrored
        return (pad + (p[0] - lo[0]) * k, size - pad - (p[1] - lo[1]) * k)

    return f, size


def render_svg(D) -> str:
    """SVG text with one circle per vertex, one polyline per edge, one marker per crossing.

    Combinatorial drawings are laid out with straight-line grid coordinates
    of their planarization (each segment bent once at its midpoint), so
    crossings appear exactly at the dummy nodes.  Geometric drawings are
    drawn as given.
    """
    if isinstance(D, GeometricDrawing):
        G = D.graph
        verts = {v: tuple(map(float, D.points[v])) for v in range(G.n)}
        lines = {}
        for e in G.edges():
            lines[e] = D.polylines[e] if D.polylines is not None else [D.points[e[0]], D.points[e[1]]]
        marks = []
    else:
        P = D._plan
        if P.rot:
            pos, bend = plan_coordinates(P)
        else:
            pos, bend = {}, {}
        verts = {v: pos[v] for v in range(D.n)}
        lines = {P.ends[e]: _route_points(P, e, pos, bend) for e in P.drawn_edges()}
        marks = [pos[x] for x in P.dummy_nodes()]
    allpts = list(verts.values()) + [p for pl in lines.values() for p in pl]
    f, size = _frame(allpts)
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(int(size)), height=str(int(size)),
                     viewBox=f"0 0 {int(size)} {int(size)}")
    g_e = ET.SubElement(svg, "g", {"class": "edges", "stroke": "#333", "fill": "none", "stroke-width": "1.2"})
    for (u, v), pl in lines.items():
        pts = " ".join("%.2f,%.2f" % f(p) for p in pl)
        ET.SubElement(g_e, "polyline", {"class": "edge", "data-edge": f"{u}-{v}", "points": pts})
    g_x = ET.SubElement(svg, "g", {"class": "crossings", "fill": "#c22"})
    for p in marks:
        x, y = f(p)
        ET.SubElement(g_x, "circle", {"class": "crossing", "cx": "%.2f" % x, "cy": "%.2f" % y, "r": "2.5"})
    g_v = ET.SubElement(svg, "g", {"class": "vertices", "fill": "#fff", "stroke": "#000"})
    for v, p in verts.items():
        x, y = f(p)
        ET.SubElement(g_v, "circle", {"class": "vertex", "data-vertex": str(v), "cx": "%.2f" % x,
                                      "cy": "%.2f" % y, "r": "5"})
    return ET.tostring(svg, encoding="unicode")
