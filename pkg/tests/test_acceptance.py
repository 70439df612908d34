"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line
that is printed in the terminal summary.

Slow: the full module takes roughly 40 minutes on one core.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from qcomposite.graph import ModelParams, UndirectedGraph
from qcomposite.montecarlo import (SweepConfig, coupling_experiment, csv_text,
                                   empirical_transition_width, estimate_points,
                                   pair_edge_frequency, sweep)
from qcomposite.properties import Budget, PropertySpec, Verdict, check, oracle_check
from qcomposite.theory import (UnreachableTarget, critical_key_pool, critical_key_ring,
                               critical_node_count, critical_satisfied, deviation,
                               exact_edge_probability, limit_probability)

SEED = 1
KCONN1 = PropertySpec.kconn(1)
FIG2A_SPECS = tuple(PropertySpec.parse(s) for s in ("kconn:2", "ham", "pm", "minked:2"))


def record(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    assert ok, ACCEPTANCE[number]


def fig2a_config(threads: int) -> SweepConfig:
    return SweepConfig(model="rkg", n=1000, q=2, P=50000, axis="K", start=70, stop=110, step=2,
                       properties=FIG2A_SPECS, samples=500, seed=SEED, threads=threads)


@pytest.fixture(scope="module")
def fig2a():
    cfg = fig2a_config(1)
    t = time.perf_counter()
    points = sweep(cfg)
    elapsed = time.perf_counter() - t
    return cfg, points, csv_text(points, cfg), elapsed


def curves(points):
    out = {}
    for pt in points:
        out.setdefault(str(pt.property), []).append(pt)
    return out


def within_3_sigma_nondecreasing(pts) -> bool:
    return all(b.emp_prob >= a.emp_prob - 3 * math.hypot(a.stderr, b.stderr)
               for a, b in itertools.combinations(pts, 2))


def half_crossing(pts) -> float | None:
    """K where the curve first reaches 0.5, linearly interpolated."""
    for a, b in zip(pts, pts[1:]):
        if b.emp_prob >= 0.5 > a.emp_prob:
            ka, kb = a.params["K"], b.params["K"]
            return ka + (0.5 - a.emp_prob) / (b.emp_prob - a.emp_prob) * (kb - ka)
    return None


# --- 1 -------------------------------------------------------------------------------

def test_criterion_1_edge_probability():
    t = time.perf_counter()
    details, ok = [], True
    for q, K, P in [(1, 20, 10**4), (2, 30, 10**4), (3, 40, 2 * 10**4)]:
        pairs = 10**6
        p = exact_edge_probability(q, K, P)
        freq = pair_edge_frequency(q, K, P, pairs, base_seed=SEED) / pairs
        z = (freq - p) / math.sqrt(p * (1 - p) / pairs)
        ok &= abs(z) <= 4
        details.append(f"({q},{K},{P}) z={z:+.2f}")
    elapsed = time.perf_counter() - t
    ok &= elapsed < 60
    record(1, "edge probability", ok, f"{', '.join(details)}; {elapsed:.1f}s")


# --- 2 -------------------------------------------------------------------------------

def _oracle_graphs():
    rng = np.random.default_rng(SEED)
    for _ in range(500):
        p = rng.uniform(0.1, 0.9)
        yield UndirectedGraph(8, [e for e in itertools.combinations(range(8), 2)
                                  if rng.random() < p])
    yield UndirectedGraph.complete(4)
    yield UndirectedGraph.cycle(5)
    yield UndirectedGraph.cycle(6)
    yield UndirectedGraph.petersen()
    for leaves in (2, 3, 4, 5):
        yield UndirectedGraph.star(leaves)


def test_criterion_2_oracle_conformance():
    t = time.perf_counter()
    budget = Budget(50_000_000)
    checked = mismatches = unknowns = 0
    for g in _oracle_graphs():
        specs = [PropertySpec.parse(f"{kind}:{k}") for kind in ("minked", "kconn", "krobust")
                 for k in range(1, 5)]
        specs.append(PropertySpec.matching())
        if g.n >= 3:
            specs.append(PropertySpec.hamilton())
        for spec in specs:
            out = check(g, spec, budget)
            checked += 1
            unknowns += out.verdict is Verdict.UNKNOWN
            mismatches += out.verdict is not oracle_check(g, spec).verdict
    elapsed = time.perf_counter() - t
    ok = mismatches == 0 and unknowns == 0 and elapsed < 120
    record(2, "oracle conformance", ok,
           f"{checked} verdicts, {mismatches} mismatches, {unknowns} unknown; {elapsed:.1f}s")


# --- 3 -------------------------------------------------------------------------------

def test_criterion_3_transition_curves(fig2a):
    cfg, points, _, elapsed = fig2a
    ok = elapsed < 30 * 60
    details = []
    for name, pts in curves(points).items():
        spec = pts[0].property
        crit = critical_key_ring(cfg.q, cfg.n, cfg.P, spec, 0.5).value
        cross = half_crossing(pts)
        mono = within_3_sigma_nondecreasing(pts)
        rises = pts[0].emp_prob < 0.05 and pts[-1].emp_prob > 0.95
        near = cross is not None and abs(cross - crit) <= 4
        ok &= mono and rises and near
        cross_txt = "none" if cross is None else f"{cross:.1f}"
        details.append(f"{name} cross={cross_txt} vs {crit}"
                       f"{'' if mono else ' non-monotone'}{'' if rises else ' no-rise'}")
    record(3, "transition curves", ok, f"{'; '.join(details)}; {elapsed / 60:.1f} min")


# --- 4 -------------------------------------------------------------------------------

def test_criterion_4_threshold_ordering(fig2a):
    _, points, _, _ = fig2a
    c = curves(points)

    def at_least(big, small):
        return [b.params["K"] for b, s in zip(c[big], c[small])
                if b.emp_prob < s.emp_prob - 3 * math.hypot(b.stderr, s.stderr)]

    bad = {f"{x}>={y}": at_least(x, y) for x, y in
           [("minked:2", "kconn:2"), ("kconn:2", "ham"), ("pm", "kconn:2")]}
    ok = not any(bad.values())
    detail = ", ".join(f"{k}: {'ok' if not v else v}" for k, v in bad.items())
    record(4, "threshold ordering", ok, detail)


# --- 5 -------------------------------------------------------------------------------

def test_criterion_5_limit_calibration():
    n, q = 10_000, 1
    P = round(10 * n * math.log(n))
    window = []
    for K in range(q, 200):
        pred = limit_probability(KCONN1, deviation(ModelParams(n, q, K, P), KCONN1).alpha).value
        if 0.01 <= pred <= 0.99:
            window.append(K)
        elif pred > 0.99:
            break
    worst, worst_k = 0.0, None
    for K in window:
        pt = estimate_points("rkg", {"n": n, "q": q, "K": K, "P": P}, [KCONN1], 500, SEED,
                             point_index=K)[0]
        gap = abs(pt.emp_prob - pt.predicted)
        if gap > worst:
            worst, worst_k = gap, K
    record(5, "limit calibration", worst <= 0.10,
           f"P={P}, K in [{window[0]},{window[-1]}], sup gap {worst:.3f} at K={worst_k}")


# --- 6 -------------------------------------------------------------------------------

def test_criterion_6_coupling():
    n, q, P = 500, 1, 5000

    def pred(K):
        return limit_probability(KCONN1, deviation(ModelParams(n, q, K, P), KCONN1).alpha).value

    K = min(range(q, 100), key=lambda k: abs(pred(k) - 0.5))
    res = coupling_experiment(q, K, P, n, KCONN1, samples=1000, base_seed=SEED)
    ok = res.rkg.emp_prob >= res.er.emp_prob - 0.05
    record(6, "coupling inequality", ok,
           f"K={K}: rkg {res.rkg.emp_prob:.3f} vs er {res.er.emp_prob:.3f}")


# --- 7 -------------------------------------------------------------------------------

def test_criterion_7_width_dichotomy():
    t = time.perf_counter()
    sharp = empirical_transition_width(1, 2000, 2000, KCONN1, 0.1, samples=500, base_seed=SEED)
    wide = empirical_transition_width(2, 1000, 50000, KCONN1, 0.1, samples=500, base_seed=SEED)
    elapsed = time.perf_counter() - t
    ok = sharp.width <= 1 and wide.width >= 3 and elapsed < 45 * 60
    ok &= sharp.consistent() and wide.consistent()
    record(7, "width dichotomy", ok,
           f"q=1 width {sharp.width} (K {sharp.K_minus}..{sharp.K_plus}), "
           f"q=2 width {wide.width} (K {wide.K_minus}..{wide.K_plus}); {elapsed / 60:.1f} min")


# --- 8 -------------------------------------------------------------------------------

def test_criterion_8_critical_self_consistency():
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    checked = failures = unreachable = 0
    for _ in range(200):
        q = int(rng.integers(1, 4))
        n = int(rng.integers(3, 100_000))
        P = int(rng.integers(1000, 1_000_000))
        k = int(rng.integers(1, 7))
        p = float(rng.uniform(0.01, 0.99))
        spec = PropertySpec.kconn(k)
        K = max(q, int(math.sqrt(P) / 4))
        for solve in ("K", "P", "n"):
            try:
                if solve == "K":
                    c = critical_key_ring(q, n, P, spec, p)
                    good = critical_satisfied(c, q, n=n, P=P)
                elif solve == "P":
                    c = critical_key_pool(q, n, K, spec, p)
                    good = critical_satisfied(c, q, n=n, K=K)
                else:
                    c = critical_node_count(q, K, P, spec, p)
                    good = critical_satisfied(c, q, K=K, P=P)
            except UnreachableTarget:
                unreachable += 1
                continue
            checked += 1
            failures += not good
    elapsed = time.perf_counter() - t
    ok = failures == 0 and checked >= 400 and elapsed < 1.0
    record(8, "critical self-consistency", ok,
           f"{checked} solutions, {failures} inconsistent, {unreachable} unreachable; "
           f"{elapsed * 1000:.0f} ms")


# --- 9 -------------------------------------------------------------------------------

def test_criterion_9_determinism(fig2a):
    cfg, _, text_1, _ = fig2a
    t = time.perf_counter()
    cfg8 = fig2a_config(8)
    text_8 = csv_text(sweep(cfg8), cfg8)
    elapsed = time.perf_counter() - t
    same = text_1.encode() == text_8.encode()
    record(9, "determinism", same,
           f"threads 1 vs 8: {'byte-identical' if same else 'DIFFERENT'} "
           f"({len(text_1)} bytes); rerun {elapsed / 60:.1f} min")
