"""Acceptance criteria 1-12; each test prints one PASS/FAIL line."""
import math
import os
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from crosskit.cutnorm import cut_distance_exact, fk_partition, verify_regularity, witness_value
from crosskit.drawing import crossing_weight
from crosskit.drawing.blowup import blow_up_drawing, good_crossings, projection_mean_exhaustive
from crosskit.drawing.drawing import refine_locally_optimal
from crosskit.exact import crossing_number_exact, crossing_number_upper
from crosskit.graph import (VertexPartition, WeightedGraph, averaged, complete_bipartite, complete_graph,
                            crossing_lower_bound, random_graph, random_weighted_graph)
from crosskit.graphon import disk, rectilinear_density_upper, square, sylvester_convex_probability, triangle
from crosskit.pipeline import draw_cr, estimability_probe, estimate_cr
from crosskit.transfer import check_regions, subdivide_regions, transfer_drawing

from oracles import brute_cut_distance

SLOW = bool(os.environ.get("CROSSKIT_SLOW"))


@pytest.fixture
def report(capsys):
    def _report(num, ok, detail=""):
        with capsys.disabled():
            print(f"\nCRITERION {num}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return _report


def test_criterion_01_exact_values(report):
    rows, ok = [], True
    for name, G, want in [("K4", complete_graph(4), 0), ("K5", complete_graph(5), 1),
                          ("K6", complete_graph(6), 3), ("K3,3", complete_bipartite(3, 3), 1)]:
        t = time.time()
        s = crossing_number_exact(G, time_limit=600)
        dt = time.time() - t
        ok &= s.exact and s.value == want and dt < 600
        rows.append(f"{name}={s.value}({dt:.1f}s)")
    if SLOW:
        t = time.time()
        s = crossing_number_exact(complete_graph(7), max_nodes=10 ** 9, time_limit=3600)
        rows.append(f"K7={s.value} exact={s.exact} ({time.time() - t:.0f}s, optional)")
    else:
        rows.append("K7 optional, skipped (set CROSSKIT_SLOW=1)")
    report(1, ok, " ".join(rows))


def test_criterion_02_weighted_scaling(report):
    ok = True
    for a in [Fraction(1, 2), Fraction(1, 3), Fraction(2, 7), Fraction(9, 10), Fraction(1)]:
        s = crossing_number_exact(complete_graph(5, a))
        ok &= s.exact and s.value == a * a
    report(2, ok, "cr(alpha K5) = alpha^2 for 5 rational alphas")


def test_criterion_03_cut_norm_oracle(report):
    rng = np.random.default_rng(2024)
    bad = 0
    for i in range(50):
        n = int(rng.integers(2, 11))
        G1 = random_weighted_graph(n, float(rng.uniform(0.2, 0.9)), 1000 + i, 6)
        G2 = random_weighted_graph(n, float(rng.uniform(0.2, 0.9)), 2000 + i, 6)
        w = cut_distance_exact(G1, G2)
        ref, S, T = brute_cut_distance(G1, G2)
        if not (w.exact and w.value == ref and witness_value(G1, G2, w.S, w.T) == ref):
            bad += 1
    report(3, bad == 0, f"50 pairs n<=10, mismatches={bad}")


def test_criterion_04_regularity(report):
    G = random_graph(16, 0.5, 0)
    r = fk_partition(G, 0.25)
    v = verify_regularity(G, r.partition)
    K = complete_bipartite(8, 8)
    rk = fk_partition(K, 0.1)
    vk = verify_regularity(K, rk.partition)
    ok = v.exact and v.value <= Fraction(1, 4) and vk.exact and vk.value == 0
    report(4, ok, f"G(16,.5): k={r.partition.k} defect={float(v.value):.4f}; K8,8: k={rk.partition.k} defect={vk.value}")


def test_criterion_05_blow_up(report):
    D = crossing_number_exact(complete_graph(5)).drawing
    ok, rows = True, []
    for m in (2, 3):
        B = blow_up_drawing(D, m)
        g, tot = good_crossings(B, m), crossing_weight(B)
        ok &= g == m ** 4 and tot <= m ** 4 + 5 ** 3 * m ** 4
        rows.append(f"m={m}: good={g} total={tot}")
    for n, m in [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2), (6, 2)]:
        Dn = crossing_number_exact(complete_graph(n)).drawing
        B = blow_up_drawing(Dn, m)
        mean = projection_mean_exhaustive(B, m)
        ok &= mean <= crossing_weight(B) / Fraction(m ** 4)
        rows.append(f"K{n}[{m}] mean={float(mean):.3f}<=total/m^4={float(crossing_weight(B) / m ** 4):.3f}")
    report(5, ok, "; ".join(rows))


def test_criterion_06_same_drawing_bound(report):
    n, bad, worst = 12, 0, 0.0
    for i in range(50):
        G1 = random_weighted_graph(n, 0.5, 3000 + i, 5)
        G2 = random_weighted_graph(n, 0.5, 4000 + i, 5)
        d = cut_distance_exact(G1, G2)
        assert d.exact
        U = WeightedGraph(n, {e: 1 for e in set(G1.weights) | set(G2.weights)})
        D = crossing_number_upper(U, restarts=1, seed=i).drawing
        gap = abs(crossing_weight(D, G1) - crossing_weight(D, G2))
        bound = d.value ** 2 * n ** 8
        bad += gap > bound
        worst = max(worst, float(gap / bound) if bound else 0.0)
    report(6, bad == 0, f"50 pairs n=12, violations={bad}, max gap/bound={worst:.2e}")


def test_criterion_07_regions(report):
    eps = 0.5
    ok, counts, worst = True, [], 0
    for i in range(20):
        p = 0.3 if i < 10 else 0.5
        G = random_graph(30, p, 500 + i)
        D = refine_locally_optimal(crossing_number_upper(G, restarts=1, seed=i).drawing)
        S = subdivide_regions(D, eps)
        c = check_regions(S)
        ok &= c["interior"] and c["cap"] and c["cover"]
        counts.append(S.region_count)
        worst = max(worst, c["max_size"])
    C = max(counts) * eps ** 2
    ok &= max(counts) <= 10 / eps ** 2
    report(7, ok, f"20 drawings, eps={eps}, max region size={worst} (cap 8), region counts {min(counts)}-{max(counts)}, measured C={C:.2f}")


def sparse_corpus():
    out, i = [], 0
    while len(out) < 30:
        n = 7 + i % 3
        p = (0.45, 0.5, 0.55)[(i // 3) % 3]
        G = random_graph(n, p, 100 + i)
        s = crossing_number_exact(G, time_limit=20)
        if s.exact:
            out.append((G, s.value))
        i += 1
    return out


def test_criterion_08_never_below_optimum(report):
    inst = [(complete_graph(n), crossing_number_exact(complete_graph(n)).value) for n in (3, 4, 5, 6)]
    inst += sparse_corpus()
    viol_draw = viol_tr = runs = 0
    for idx, (G, cr) in enumerate(inst):
        lab = np.random.default_rng(idx).integers(0, 3, size=G.n)
        classes = [tuple(int(v) for v in np.flatnonzero(lab == c)) for c in range(3)]
        P = VertexPartition(tuple(c for c in classes if c))
        G1 = averaged(G, P)
        D1 = refine_locally_optimal(crossing_number_upper(G1, restarts=2, seed=idx).drawing)
        for seed in range(100):
            D, _ = draw_cr(G, seed=seed, restarts=2)
            viol_draw += crossing_weight(D) < cr
            D2, _ = transfer_drawing(G1, D1, G, P, seed=seed)
            viol_tr += crossing_weight(D2) < cr
            runs += 1
    report(8, viol_draw == 0 and viol_tr == 0,
           f"{len(inst)} instances x 100 seeds ({runs} runs each): draw_cr violations={viol_draw}, transfer violations={viol_tr}")


def test_criterion_09_pipeline_consistency(report):
    vals, ok, rows = {}, True, []
    for n in (60, 80, 100):
        G = random_graph(n, 0.5, 0)
        r = estimate_cr(G, 0.25)
        lo = crossing_lower_bound(G)
        up = crossing_number_upper(G, restarts=50).value
        inside = lo <= r.estimate <= up
        ok &= inside
        vals[n] = r.normalized
        rows.append(f"n={n}: {r.normalized:.3e} in [{float(lo) / n ** 4:.2e}, {float(up) / n ** 4:.2e}]={inside}")
    spread = max(abs(a - b) / max(a, b) for a in vals.values() for b in vals.values())
    ok &= spread <= 0.2
    full = estimate_cr(random_graph(100, 1.0, 0), 0.25).normalized
    ratio = vals[100] / full
    ok &= 0.2 <= ratio <= 0.3
    report(9, ok, "; ".join(rows) + f"; max relative spread={spread:.3f}; ratio p.5/p1={ratio:.3f}")


def test_criterion_10_sylvester(report):
    ok, rows = True, []
    for R, want in [(square(), 25 / 36), (triangle(), 2 / 3), (disk(), 1 - 35 / (12 * math.pi ** 2))]:
        t = time.time()
        p, rad = sylvester_convex_probability(R, 10 ** 6, seed=7)
        dt = time.time() - t
        ok &= abs(p - want) <= rad and p >= 0.379972 - rad and dt < 60
        rows.append(f"{R.name}={p:.5f} (target {want:.5f}, radius {rad:.5f}, {dt:.1f}s)")
    report(10, ok, "; ".join(rows))


def test_criterion_11_rectilinear(report):
    got = [rectilinear_density_upper(n, 10 ** 5, seed=0)[0] for n in (4, 5, 6)]
    report(11, got == [0, 1, 3], f"n=4/5/6 -> {got}")


def test_criterion_12_probe(report):
    out = estimability_probe(random_graph(200, 0.5, 0), 80, trials=20, seed=0)
    report(12, out["relative_std"] <= 0.15,
           f"G(200,.5) k=80 20 trials: mean={out['mean']:.3e} std/mean={out['relative_std']:.3f}")
