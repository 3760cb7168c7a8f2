"""Acceptance suite: every guarantee and lower-bound claim at desk scale.

Each test runs one verification suite at its full trial count and prints a
single pass/fail line (run with -s to see them live).  Checks with stated
runtime budgets assert them too.
"""
import time

from coreclust.bench import verify_bounds

TIME_BUDGETS = {  # seconds, where a budget is part of the check
    "acceptance-01": 30.0,
    "acceptance-02": 60.0,
    "acceptance-15": 120.0,
}


def _run(label: str, suites, trials=None, seed: int = 0) -> None:
    t0 = time.perf_counter()
    results = []
    for name in suites:
        results.extend(verify_bounds(name, trials=trials, seed=seed))
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results)
    checks = sum(r.checks for r in results)
    detail = "; ".join(r.detail for r in results if r.detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {label} "
          f"({'+'.join(suites)}): {checks} checks in {elapsed:.1f}s"
          + (f" [{detail}]" if detail else ""))
    for r in results:
        assert r.passed, f"{label}: {r.name} failed: {r.failures[:1]}"
    budget = TIME_BUDGETS.get(label)
    if budget is not None:
        assert elapsed < budget, f"{label} exceeded {budget}s ({elapsed:.1f}s)"


def test_01_greedy_ball_beta_bound():
    """Greedy ball output is a (1, 2*ceil(n/k)+1)-core clustering on 200
    random metric instances."""
    _run("acceptance-01", ["greedy-beta-bound"], trials=200)


def test_02_line_tree_beta_bounds():
    """Quantile step ceil(n/k) gives beta <= ceil(n/k)-1 and step
    ceil(n/(k+1)) gives beta <= k, on 200 random lines and 200 trees."""
    _run("acceptance-02", ["line-beta-bound", "tree-beta-bound"], trials=200)


def test_03_line_tree_two_one_core():
    """Step ceil(n/k) placements block no coalition of size 2n/k."""
    _run("acceptance-03", ["line-two-one-core", "tree-two-one-core"], trials=200)


def test_04_line_tree_alpha_beta_tradeoff():
    """(alpha, max(1, 1/(alpha-1)))-core membership on lines and trees for
    alpha in {1.1, 1.25, 1.5, 2.0}."""
    _run("acceptance-04", ["line-tree-tradeoff"], trials=200)


def test_05_general_metric_alpha_beta_tradeoff():
    """(alpha, max(4, 2/(alpha-1)+3))-core membership for greedy ball for
    alpha in {1.5, 2, 3}."""
    _run("acceptance-05", ["greedy-tradeoff"], trials=200)


def test_06_mst_cover_two_core():
    """MST vertex-cover placement is a (1,2)-core clustering when
    ceil(n/2) <= k <= n-2, on 100 random metric instances."""
    _run("acceptance-06", ["mst-two-core"], trials=100)


def test_07_total_distance_optimum_in_core():
    """Total-distance minimizers at k=1 and k=n-1 are exact core members,
    cross-checked against the exhaustive oracle."""
    _run("acceptance-07", ["opt-core"], trials=50)


def test_08_k4_exact_core_empty():
    """All 6 clusterings of the unit K4: exact core empty; every one is in
    the (1,2)-core and the (1.01,1)-core; beta_min is exactly 2."""
    _run("acceptance-08", ["k4-empty"])


def test_09_line_beta_lower_bound():
    """The k=6 line gadget (n=42) keeps beta_min >= k/2 = 3 for algorithm
    outputs plus 500 sampled clusterings."""
    _run("acceptance-09", ["line-beta-lb"], trials=500)


def test_10_line_alpha_lower_bound():
    """The C=10 far-parts gadget always blocks with 2C-3 = 17 agents at
    beta=1 over 500 sampled clusterings, so alpha_sup >= 1.7."""
    _run("acceptance-10", ["line-alpha-lb"], trials=500)


def test_11_clique_alpha_lower_bound():
    """The unit 10-clique always admits a size-5 blocking coalition at
    beta=1 (alpha_sup >= k/2 = 2.5) over samples plus algorithm outputs."""
    _run("acceptance-11", ["clique-lb"], trials=200)


def test_12_unit_tree_lower_bound():
    """The 50-vertex unit broom tree keeps beta_min >= 14/13 and a size-8
    blocking coalition at beta=1 for 1000 sampled clusterings."""
    _run("acceptance-12", ["broom-tree-lb"], trials=1000)


def test_13_kmedians_infinitely_unfair():
    """Lloyd k-medians hits beta = inf on the far-groups gadget; greedy
    ball stays within 2*ceil(n/k)+1 = 15."""
    _run("acceptance-13", ["kmedians-unfair"])


def test_14_oracle_equivalence():
    """Fast audit matches exhaustive enumeration within 1e-7 relative, and
    best coalition ratios are monotone in coalition size (1000 checks)."""
    _run("acceptance-14", ["oracle"], trials=1000)


def test_15_gaussian_mixture_comparison():
    """Refined two-stage clustering is weakly fairer than k-means++ on at
    least 7 of 10 k values in both dimensions at social cost within 2x,
    with seed 0, n=1000, weights (0.2, 0.3, 0.5), k=8..17."""
    _run("acceptance-15", ["gaussian"], seed=0)
