"""Fairness audit: examples, oracle agreement, monotonicity, witnesses."""
import itertools
import math

import numpy as np
import pytest

from coreclust.audit import (audit, coalition_size, deviation_candidates,
                             is_in_core, max_blocking_size, min_beta,
                             oracle_audit)
from coreclust.bench import random_clustering
from coreclust.errors import ParameterError, SizeLimitError, ValidationError
from coreclust.instance import (CONTINUOUS_LINE, Clustering, Instance,
                                gen_k4, gen_kmedians_bad, gen_line_beta_lb)
from coreclust.metric import Space


@pytest.fixture
def k4():
    return gen_k4()


@pytest.fixture
def k4_y(k4):
    return Clustering(centers=[0, 1])


def line_instance(agents, k, candidates=CONTINUOUS_LINE):
    return Instance(space=Space.line(), agents=[float(a) for a in agents],
                    candidates=candidates, k=k)


# ---------------------------------------------------------------------------
# coalition size
# ---------------------------------------------------------------------------

def test_coalition_size_examples(k4):
    assert coalition_size(k4, 1.0) == 2
    assert coalition_size(k4, 1.0001) == 3


def test_coalition_size_broom():
    from coreclust.instance import gen_broom_tree
    assert coalition_size(gen_broom_tree(), 1.0) == 8


def test_coalition_size_integer_guard():
    inst = line_instance(list(range(10)), k=5, candidates=[0.0])
    assert coalition_size(inst, 2.0) == 4  # exactly 4, not bumped to 5


def test_coalition_size_rejects_small_alpha(k4):
    with pytest.raises(ParameterError):
        coalition_size(k4, 0.5)


# ---------------------------------------------------------------------------
# deviation candidates
# ---------------------------------------------------------------------------

def test_deviations_k4(k4, k4_y):
    assert deviation_candidates(k4, k4_y) == [2, 3]


def test_deviations_line_excludes_occupied():
    inst = gen_line_beta_lb(2)
    devs = deviation_candidates(inst, Clustering(centers=[1.0, 3.0]))
    assert devs == [2.0]


def test_deviations_empty_means_vacuous_core(k4):
    clustering = Clustering(centers=[0, 1])
    full = Instance(space=k4.space, agents=k4.agents, candidates=[0, 1], k=2)
    assert deviation_candidates(full, clustering) == []
    beta, witness = min_beta(full, clustering, 1.0)
    assert beta == 0.0 and witness is None


def test_deviations_exclude_colocated_duplicates():
    # two candidates share a location; using one bars deviating to the other
    pts = [(0.0, 0.0), (5.0, 0.0)]
    inst = Instance(space=Space.euclidean(2), agents=pts,
                    candidates=[(0.0, 0.0), (0.0, 0.0), (5.0, 0.0)], k=1)
    devs = deviation_candidates(inst, Clustering(centers=[(0.0, 0.0)]))
    assert devs == [(5.0, 0.0)]


# ---------------------------------------------------------------------------
# max blocking size
# ---------------------------------------------------------------------------

def test_max_blocking_size_k4_beta1(k4, k4_y):
    smax, witness = max_blocking_size(k4, k4_y, 1.0)
    assert smax == 2
    assert witness.coalition == [2, 3]
    assert witness.sum_to_Y == 2.0 and witness.sum_to_y_prime == 1.0


def test_max_blocking_size_k4_beta2(k4, k4_y):
    smax, witness = max_blocking_size(k4, k4_y, 2.0)
    assert smax == 0 and witness is None


def test_max_blocking_size_zero_when_covered():
    inst = line_instance([0, 1], k=2, candidates=[0.0, 1.0, 2.0])
    smax, _ = max_blocking_size(inst, Clustering(centers=[0.0, 1.0]), 1.0)
    assert smax == 0


# ---------------------------------------------------------------------------
# min beta
# ---------------------------------------------------------------------------

def test_min_beta_k4(k4, k4_y):
    beta, witness = min_beta(k4, k4_y, 1.0)
    assert beta == pytest.approx(2.0)
    assert witness.coalition == [2, 3] and witness.y_prime == 2


def test_min_beta_line_gadget():
    inst = gen_line_beta_lb(2)
    beta, witness = min_beta(inst, Clustering(centers=[1.0, 3.0]), 1.0)
    assert beta == pytest.approx(2.0)
    assert witness.sum_to_Y == pytest.approx(2.0)
    assert witness.sum_to_y_prime == pytest.approx(1.0)
    assert witness.y_prime == 2.0


def test_min_beta_infinite_on_kmedians_trap():
    from coreclust.baselines import lloyd_kmedians
    inst = gen_kmedians_bad(7)
    med = lloyd_kmedians(inst.agents, inst.k, seed=0)
    beta, witness = min_beta(inst, med, 1.0)
    assert math.isinf(beta)
    assert witness.y_prime == 0.0
    assert len(witness.coalition) == 7
    assert witness.sum_to_y_prime == 0.0 and witness.sum_to_Y == pytest.approx(7.0)


# ---------------------------------------------------------------------------
# is_in_core
# ---------------------------------------------------------------------------

def test_is_in_core_k4_matrix(k4):
    for combo in itertools.combinations(range(4), 2):
        clustering = Clustering(centers=list(combo))
        assert is_in_core(k4, clustering, 1.5, 1.0)[0]
        ok, witness = is_in_core(k4, clustering, 1.0, 1.0)
        assert not ok and witness is not None
        assert is_in_core(k4, clustering, 1.0, 2.0)[0]


def test_in_core_everything_when_k_equals_n():
    inst = line_instance([0, 1, 2], k=3, candidates=[0.0, 1.0, 2.0])
    clustering = Clustering(centers=[0.0, 1.0, 2.0])
    for alpha in (1.0, 1.5, 3.0):
        for beta in (1.0, 2.0):
            assert is_in_core(inst, clustering, alpha, beta)[0]


def test_boundary_closed_at_beta_min(k4, k4_y):
    beta, _ = min_beta(k4, k4_y, 1.0)
    assert is_in_core(k4, k4_y, 1.0, beta)[0]
    assert not is_in_core(k4, k4_y, 1.0, beta - 1e-3)[0]


def test_mismatched_k_rejected(k4):
    with pytest.raises(ValidationError):
        audit(k4, Clustering(centers=[0, 1, 2]))


# ---------------------------------------------------------------------------
# audit result
# ---------------------------------------------------------------------------

def test_audit_result_fields(k4, k4_y):
    res = audit(k4, k4_y, alpha=1.0, beta=1.0)
    assert res.beta_min == pytest.approx(2.0)
    assert res.s_max == 2
    assert res.alpha_sup == pytest.approx(1.0)
    assert not res.in_core


def test_audit_json_serialization(k4, k4_y):
    obj = audit(k4, k4_y).to_json()
    assert set(obj) >= {"alpha_query", "beta_query", "beta_min", "s_max",
                        "alpha_sup", "in_core", "witness"}
    assert obj["witness"]["coalition"] == [2, 3]
    inf_obj = audit(gen_kmedians_bad(7),
                    Clustering(centers=[1.0, 1e6, 2e6])).to_json()
    assert inf_obj["beta_min"] == "inf"


def test_audit_self_consistent_membership():
    rng = np.random.default_rng(0)
    from coreclust.bench import random_metric_instance
    for _ in range(20):
        inst = random_metric_instance(rng, n_max_euc=25, n_max_mat=20)
        clustering = random_clustering(rng, inst)
        res = audit(inst, clustering, alpha=1.0, beta=1.0)
        n, k = inst.n, inst.k
        if res.s_max >= coalition_size(inst, 1.0):
            above = res.alpha_sup + 1e-6
            assert is_in_core(inst, clustering, above, 1.0)[0]
            below = res.alpha_sup - 1e-6
            if below >= 1.0:
                assert not is_in_core(inst, clustering, below, 1.0)[0]


# ---------------------------------------------------------------------------
# witness consistency
# ---------------------------------------------------------------------------

def test_witness_sums_recompute():
    rng = np.random.default_rng(1)
    from coreclust.bench import random_metric_instance
    from coreclust.metric import cross_distances
    for _ in range(20):
        inst = random_metric_instance(rng, n_max_euc=25, n_max_mat=20)
        clustering = random_clustering(rng, inst)
        for witness in (min_beta(inst, clustering, 1.0)[1],
                        max_blocking_size(inst, clustering, 1.0)[1]):
            if witness is None:
                continue
            pts = [inst.agents[i] for i in witness.coalition]
            to_y = cross_distances(inst.space, pts,
                                   list(clustering.centers)).min(axis=1).sum()
            to_dev = cross_distances(inst.space, pts,
                                     [witness.y_prime]).sum()
            assert to_y == pytest.approx(witness.sum_to_Y, abs=1e-9)
            assert to_dev == pytest.approx(witness.sum_to_y_prime, abs=1e-9)


# ---------------------------------------------------------------------------
# top-s optimality and oracle agreement
# ---------------------------------------------------------------------------

def test_top_s_is_optimal_against_enumeration():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(4, 12))
        dY = rng.uniform(0, 5, size=n)
        dv = rng.uniform(0, 5, size=n)
        c = float(rng.uniform(0.5, 3.0))
        s = int(rng.integers(1, n + 1))
        gains = dY - c * dv
        top = np.sort(gains)[::-1][:s].sum()
        best = max(sum(gains[list(combo)])
                   for combo in itertools.combinations(range(n), s))
        assert top == pytest.approx(best)


def test_oracle_agreement_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(4, 13))
        coords = [float(x) for x in rng.integers(0, 12, size=n)]
        inst = line_instance(coords, k=int(rng.integers(1, 4)),
                             candidates=sorted(set(coords)))
        if inst.k > inst.n:
            continue
        clustering = random_clustering(rng, inst)
        fast_beta, _ = min_beta(inst, clustering, 1.0)
        fast_smax, _ = max_blocking_size(inst, clustering, 1.0)
        res = oracle_audit(inst, clustering, alpha=1.0, beta=1.0)
        if math.isinf(fast_beta) or math.isinf(res.beta_min):
            assert math.isinf(fast_beta) == math.isinf(res.beta_min)
        else:
            assert fast_beta == pytest.approx(res.beta_min, rel=1e-7)
        assert fast_smax == res.s_max


def test_oracle_size_limits():
    inst = line_instance(list(range(20)), k=2,
                         candidates=[float(i) for i in range(20)])
    with pytest.raises(SizeLimitError):
        oracle_audit(inst, Clustering(centers=[0.0, 1.0]))


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------

def test_beta_min_non_increasing_in_alpha():
    rng = np.random.default_rng(4)
    from coreclust.bench import random_metric_instance
    for _ in range(15):
        inst = random_metric_instance(rng, n_max_euc=20, n_max_mat=15)
        clustering = random_clustering(rng, inst)
        values = []
        for alpha in (1.0, 1.2, 1.5, 2.0):
            if coalition_size(inst, alpha) > inst.n:
                break
            values.append(min_beta(inst, clustering, alpha)[0])
        for a, b in zip(values, values[1:]):
            if math.isinf(a):
                continue
            assert b <= a + 1e-9


def test_s_max_non_increasing_in_beta():
    rng = np.random.default_rng(5)
    from coreclust.bench import random_metric_instance
    for _ in range(15):
        inst = random_metric_instance(rng, n_max_euc=20, n_max_mat=15)
        clustering = random_clustering(rng, inst)
        values = [max_blocking_size(inst, clustering, beta)[0]
                  for beta in (1.0, 1.5, 2.0, 4.0)]
        for a, b in zip(values, values[1:]):
            assert b <= a


def test_lemma_downward_closure():
    # a blocking coalition of any larger size implies one of the base size
    rng = np.random.default_rng(6)
    checks = 0
    while checks < 50:
        n = int(rng.integers(4, 10))
        coords = [float(x) for x in rng.integers(0, 12, size=n)]
        inst = line_instance(coords, k=int(rng.integers(1, 4)),
                             candidates=sorted(set(coords)))
        clustering = random_clustering(rng, inst)
        smin = coalition_size(inst, 1.0)
        for beta in (1.0, 1.25):
            smax, _ = max_blocking_size(inst, clustering, beta)
            if smax > smin:
                ok, _ = is_in_core(inst, clustering, 1.0, beta)
                assert not ok  # the base size must block too
                checks += 1
        checks += 1
