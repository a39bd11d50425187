"""Acceptance checks, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from fsfw import (
    K2, count_ball, count_by_bags, classify_spanning_trees, edge_probability_c, enumerate_spanning_trees,
    fsf_constants, matrix_tree_count, product, recursion_a,
)
from fsfw.closed_form import quadratic_residual, ratio_s
from fsfw.estimators import bag_count_distribution
from fsfw.exact import CountTable, exact_bag_distribution, formula_bag_classes, ratio_sequence
from fsfw.graphs import build_ball, build_perfect_tree, complete_graph, cycle_graph
from fsfw.rng import RngStream
from fsfw.walks import decompose_trips, erased_bag_check, memorable_bags, random_walk, wilson_tree_counts

SEED = 20240917
RESULTS: list["Result"] = []


@dataclass
class Result:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}: {self.detail}"


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def check_triple_oracle() -> Result:
    t0 = time.perf_counter()
    bad = []
    for d in (3, 4):
        for w in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)):
            for n in (0, 1, 2):
                a, _ = recursion_a(d, w, n)
                if a != matrix_tree_count(product(build_perfect_tree(d, n), K2, w)):
                    bad.append(("a", d, w, n))
                if count_ball(d, w, n) != matrix_tree_count(product(build_ball(d, n), K2, w)):
                    bad.append(("ball", d, w, n))
            if recursion_a(d, w, 0) != (w, w):
                bad.append(("anchor a_0", d, w))
    anchors = recursion_a(3, 1, 1) == (15, 9) and count_ball(3, 1, 1) == 54
    if not anchors:
        bad.append("anchors (15, 9, 54)")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    return Result("exact-count triple oracle", ok, f"24 grid points, mismatches={bad}, {elapsed:.2f}s (<10s)")


def check_partition_identity() -> Result:
    bad = []
    for w in (Fraction(1), Fraction(2)):
        classes = classify_spanning_trees(product(build_ball(3, 1), K2, w), method="enumerate")
        if sum(classes.values()) != count_ball(3, w, 1):
            bad.append(f"sum w={w}")
        if classes.get(1) != count_by_bags(3, w, 1, 1):
            bad.append(f"m=1 w={w}")
    for n in range(3, 7):
        total = count_ball(3, 1, n)
        formula = {m: count_by_bags(3, 1, n, m) for m in range(1, n)}
        complement = total - sum(formula.values())
        boundary = classify_spanning_trees(product(build_ball(3, n), K2, Fraction(1)), method="paths")
        if complement <= 0 or complement != sum(v for m, v in boundary.items() if m >= n):
            bad.append(f"complement n={n}")
        if any(boundary.get(m) != v for m, v in formula.items()):
            bad.append(f"classes n={n}")
    return Result("partition identity", not bad, f"T1 w in {{1,2}} and n=3..6, mismatches={bad}")


GRID = [(d, 2.0**k) for d in range(3, 9) for k in range(-5, 6)]


def check_closed_form_identities() -> Result:
    t0 = time.perf_counter()
    worst_res = worst_c30 = worst_mass = 0.0
    for d, w in GRID:
        c = edge_probability_c(d, w)
        worst_res = max(worst_res, abs(quadratic_residual(c, d, w)))
        worst_c30 = max(worst_c30, abs(c - ratio_sequence(d, w, 30)[30][0]))
        k = fsf_constants(d, w)
        worst_mass = max(worst_mass, abs(k.q1 + k.K * k.r**2 / (1 - k.r) - 1))
    elapsed = time.perf_counter() - t0
    ok = worst_res < 1e-12 and worst_c30 <= 1e-6 and worst_mass < 1e-12 and elapsed < 5
    return Result("closed-form identities", ok,
                  f"max residual={worst_res:.1e}, max |c-c_30|={worst_c30:.1e}, "
                  f"max |mass-1|={worst_mass:.1e}, {elapsed:.2f}s (<5s)")


def check_s_against_table() -> Result:
    t0 = time.perf_counter()
    errors = [(abs(ratio_s(d, w) - CountTable(d, Fraction(w)).s(8)), d, w) for d, w in GRID]
    misses = [e for e in errors if e[0] > 1e-6]
    worst = max(errors)
    elapsed = time.perf_counter() - t0
    return Result("closed-form s vs exact ratio at n=8", not misses and elapsed < 5,
                  f"{len(misses)}/{len(GRID)} grid points off by >1e-6, worst {worst[0]:.1e} "
                  f"at d={worst[1]}, w={worst[2]:g}, {elapsed:.2f}s")


def _wilson_fixtures():
    yield "triangle", complete_graph(3)
    yield "4-cycle", cycle_graph(4)
    for w in (Fraction(1, 2), Fraction(1), Fraction(2)):
        yield f"A1 w={w}", product(build_perfect_tree(3, 1), K2, w)
        yield f"T1 w={w}", product(build_ball(3, 1), K2, w)


def check_sampler_correctness() -> Result:
    t0 = time.perf_counter()
    N = 100_000
    bad = []
    min_p = 1.0
    for i, (name, g) in enumerate(_wilson_fixtures()):
        trees = enumerate_spanning_trees(g)
        total = sum(t.weight for t in trees)
        counts = wilson_tree_counts(g, N, RngStream(SEED, 1, (i,)))
        probs = [float(t.weight / total) for t in trees]
        observed = [counts.get(t.edges, 0) for t in trees]
        pvalue = chisquare(observed, [p * N for p in probs]).pvalue
        min_p = min(min_p, pvalue)
        per_tree = all(abs(o / N - p) <= 4 * binomial_sigma(p, N) for o, p in zip(observed, probs))
        if pvalue < 1e-3 or not per_tree or sum(observed) != N:
            bad.append(name)
    exact = exact_bag_distribution(3, 1, 3)
    dist = bag_count_distribution(3, K2, 1.0, 3, N, RngStream(SEED, 2))
    worst_z = max(abs(dist.frequency(m) - float(p)) / binomial_sigma(float(p), N) for m, p in exact.items())
    if worst_z > 3:
        bad.append("lerw T3")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    return Result("sampler correctness", ok,
                  f"8 Wilson fixtures min p={min_p:.3g} (>1e-3), LERW T3 worst |z|={worst_z:.2f} (<=3), "
                  f"failures={bad}, {elapsed:.1f}s (<120s)")


def check_convergence() -> Result:
    t0 = time.perf_counter()
    N = 100_000
    classes, _ = formula_bag_classes(3, 1, 8)
    exact = float(classes[1])
    q1 = fsf_constants(3, 1.0).q1
    dist = bag_count_distribution(3, K2, 1.0, 8, N, RngStream(SEED, 3))
    est = dist.frequency(1)
    z = abs(est - exact) / binomial_sigma(exact, N)
    gap = abs(exact - q1)
    elapsed = time.perf_counter() - t0
    ok = z <= 3 and gap < 0.02 and elapsed < 300
    return Result("convergence to q_1 at n=8", ok,
                  f"q1_hat={est:.5f}, t1/t={exact:.6f}, |z|={z:.2f} (<=3), q1={q1:.6f}, "
                  f"|t1/t-q1|={gap:.1e} (<0.02), {elapsed:.1f}s (<300s)")


def check_erased_bags() -> Result:
    g_by_w = {}
    rng = np.random.default_rng(SEED)
    checks = violations = 0
    for i in range(1000):
        w = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        w = round(w, 3)
        g = g_by_w.setdefault(w, product(build_ball(3, 3), K2, Fraction(w).limit_denominator(1000)))
        root = g.base.root
        walk = random_walk(g, g.vertex(root, 0), g.vertex(root, 1), RngStream(SEED, 4, (i,)))
        for trip in decompose_trips(walk, root, g):
            memorable = memorable_bags(trip, g)
            for D in {g.bag_of(v) for v in trip.vertices} - memorable - {root}:
                checks += 1
                if not erased_bag_check(walk, trip, D, g):
                    violations += 1
    ok = violations == 0 and checks > 0
    return Result("erased bags stay off the loop erasure", ok, f"1000 walks on T3, {checks} (trip, bag) checks, "
                                                 f"{violations} violations")


def check_memorable_trend() -> Result:
    from fsfw.estimators import memorable_tail_curve

    curve = memorable_tail_curve(3, K2, 20.0, 6, [1, 2, 3, 4], 20_000, RngStream(SEED, 5))
    ests = [curve[m].estimate for m in (1, 2, 3, 4)]
    ok = all(a > b for a, b in zip(ests, ests[1:]))
    return Result("memorable tail trend", ok,
                  "w=20, n=6, N=2e4: " + ", ".join(f"m={m}: {e:.5f}" for m, e in zip((1, 2, 3, 4), ests)))


CRITERIA = [
    check_triple_oracle,
    check_partition_identity,
    check_closed_form_identities,
    check_s_against_table,
    check_sampler_correctness,
    check_convergence,
    check_erased_bags,
    check_memorable_trend,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__.removeprefix("check_"))
def test_acceptance(criterion):
    result = criterion()
    RESULTS.append(result)
    print(result.line())
    assert result.ok, result.line()


if __name__ == "__main__":
    failed = 0
    for criterion in CRITERIA:
        result = criterion()
        print(result.line(), flush=True)
        failed += not result.ok
    raise SystemExit(1 if failed else 0)
