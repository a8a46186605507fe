import math
import random

import numpy as np
import pytest

from wsnsim.clustering import (
    COV_EPSILON,
    Clustering,
    GaussianMixture,
    cluster_positions,
    e_step,
    em_loop,
    gaussian_density,
    initialize_mixture,
    log_likelihood,
    m_step,
    run_emd,
)
from wsnsim.errors import SingularCovariance, TooFewNodes

from conftest import make_scenario, random_positions


# ---- independent straight-line oracle -------------------------------------

def oracle_density(x, mu, sigma):
    dx, dy = x[0] - mu[0], x[1] - mu[1]
    a, b, c, d = sigma[0][0], sigma[0][1], sigma[1][0], sigma[1][1]
    det = a * d - b * c
    # 2x2 inverse by hand
    q = (d * dx * dx - (b + c) * dx * dy + a * dy * dy) / det
    return math.exp(-0.5 * q) / (2 * math.pi * math.sqrt(det))


def oracle_e_step(pi, mu, sigma, points):
    resp = []
    for x in points:
        weighted = [pi[k] * oracle_density(x, mu[k], sigma[k]) for k in range(len(pi))]
        total = sum(weighted)
        resp.append([w / total for w in weighted])
    return resp


def oracle_m_step(resp, points):
    n = len(points)
    k_count = len(resp[0])
    pi, mu, sigma = [], [], []
    for k in range(k_count):
        nk = sum(resp[i][k] for i in range(n))
        pi.append(nk / n)
        mx = sum(resp[i][k] * points[i][0] for i in range(n)) / nk
        my = sum(resp[i][k] * points[i][1] for i in range(n)) / nk
        mu.append((mx, my))
        sxx = sum(resp[i][k] * (points[i][0] - mx) ** 2 for i in range(n)) / nk
        syy = sum(resp[i][k] * (points[i][1] - my) ** 2 for i in range(n)) / nk
        sxy = sum(resp[i][k] * (points[i][0] - mx) * (points[i][1] - my) for i in range(n)) / nk
        sigma.append(
            [[sxx + COV_EPSILON, sxy], [sxy, syy + COV_EPSILON]]
        )
    return pi, mu, sigma


# ---- gaussian_density ------------------------------------------------------

def test_density_at_mean_identity():
    assert gaussian_density((0, 0), (0, 0), np.eye(2)) == pytest.approx(1 / (2 * math.pi), rel=1e-12)


def test_density_exponent_minus_one():
    got = gaussian_density((1, 1), (0, 0), np.eye(2))
    assert got == pytest.approx(math.exp(-1) / (2 * math.pi), rel=1e-12)


def test_density_scaled_covariance():
    assert gaussian_density((3, 4), (3, 4), 4 * np.eye(2)) == pytest.approx(
        1 / (8 * math.pi), rel=1e-12
    )


def test_density_rejects_singular_covariance():
    with pytest.raises(SingularCovariance):
        gaussian_density((0, 0), (0, 0), np.zeros((2, 2)))
    with pytest.raises(SingularCovariance):
        gaussian_density((0, 0), (0, 0), np.array([[1.0, 2.0], [2.0, 1.0]]))


# ---- log_likelihood --------------------------------------------------------

def one_component(mu, sigma):
    return GaussianMixture(K=1, pi=np.array([1.0]), mu=np.array([mu]), sigma=np.array([sigma]))


def test_log_likelihood_single_point_at_mean():
    mix = one_component((2.0, 3.0), np.eye(2))
    assert log_likelihood(mix, [(2.0, 3.0)]) == pytest.approx(math.log(1 / (2 * math.pi)), rel=1e-12)


def test_log_likelihood_additive_over_points():
    mix = one_component((2.0, 3.0), np.eye(2))
    assert log_likelihood(mix, [(2.0, 3.0), (2.0, 3.0)]) == pytest.approx(
        2 * math.log(1 / (2 * math.pi)), rel=1e-12
    )


def test_log_likelihood_identical_components_collapse():
    k1 = one_component((1.0, 1.0), np.eye(2))
    k2 = GaussianMixture(
        K=2,
        pi=np.array([0.5, 0.5]),
        mu=np.array([(1.0, 1.0), (1.0, 1.0)]),
        sigma=np.array([np.eye(2), np.eye(2)]),
    )
    pts = [(0.0, 0.0), (1.5, 2.0)]
    assert log_likelihood(k2, pts) == pytest.approx(log_likelihood(k1, pts), rel=1e-12)


# ---- initialize_mixture ----------------------------------------------------

def test_initialize_k_equals_n_uses_all_positions():
    pts = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)]
    mix = initialize_mixture(pts, 3, seed=42)
    assert sorted(map(tuple, mix.mu.tolist())) == sorted(pts)


def test_initialize_k1():
    pts = [(0.0, 0.0), (5.0, 5.0)]
    mix = initialize_mixture(pts, 1, seed=1)
    assert mix.pi.tolist() == [1.0]
    assert tuple(mix.mu[0]) in {(0.0, 0.0), (5.0, 5.0)}


def test_initialize_deterministic():
    pts = [(float(i), float(i * i % 7)) for i in range(10)]
    a = initialize_mixture(pts, 3, seed=9)
    b = initialize_mixture(pts, 3, seed=9)
    assert np.array_equal(a.mu, b.mu) and np.array_equal(a.sigma, b.sigma)


def test_initialize_too_few_nodes():
    with pytest.raises(TooFewNodes):
        initialize_mixture([(0.0, 0.0)], 2, seed=0)


# ---- e_step ----------------------------------------------------------------

def test_e_step_single_component_all_ones():
    mix = one_component((0.0, 0.0), np.eye(2))
    resp = e_step(mix, [(1.0, 2.0), (-3.0, 0.5)])
    assert np.array_equal(resp, np.ones((2, 1)))


def test_e_step_identical_components_half():
    mix = GaussianMixture(
        K=2,
        pi=np.array([0.5, 0.5]),
        mu=np.array([(1.0, 1.0), (1.0, 1.0)]),
        sigma=np.array([np.eye(2), np.eye(2)]),
    )
    resp = e_step(mix, [(0.0, 0.0), (2.0, 2.0)])
    assert np.allclose(resp, 0.5, atol=1e-15)


def test_e_step_distant_component_near_zero():
    mix = GaussianMixture(
        K=2,
        pi=np.array([0.5, 0.5]),
        mu=np.array([(0.0, 0.0), (100.0, 0.0)]),
        sigma=np.array([np.eye(2), np.eye(2)]),
    )
    # Oracle: normalize the two hand-computed densities.
    d1 = oracle_density((0.0, 0.0), (0.0, 0.0), [[1, 0], [0, 1]])
    d2 = oracle_density((0.0, 0.0), (100.0, 0.0), [[1, 0], [0, 1]])
    expected = d1 / (d1 + d2)
    resp = e_step(mix, [(0.0, 0.0)])
    assert resp[0, 0] == pytest.approx(expected, abs=1e-12)
    assert resp[0, 0] > 1 - 1e-12


# ---- m_step ----------------------------------------------------------------

def test_m_step_sample_moments():
    pts = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
    mix = m_step(np.ones((4, 1)), pts)
    assert np.allclose(mix.mu[0], (0.0, 0.0))
    assert np.allclose(mix.sigma[0], 0.5 * np.eye(2) + COV_EPSILON * np.eye(2))


def test_m_step_collinear_hits_regularizer():
    pts = [(0.0, 0.0), (2.0, 0.0)]
    mix = m_step(np.ones((2, 1)), pts)
    assert np.allclose(mix.mu[0], (1.0, 0.0))
    assert np.allclose(mix.sigma[0], [[1.0 + COV_EPSILON, 0.0], [0.0, COV_EPSILON]])


def test_m_step_identical_points_uniform_responsibilities():
    pts = [(3.0, 3.0)] * 4
    mix = m_step(np.full((4, 2), 0.5), pts)
    assert np.allclose(mix.mu, [(3.0, 3.0), (3.0, 3.0)])


def test_one_iteration_matches_oracle():
    # N <= 6, K <= 2: one full E/M iteration against the straight-line oracle.
    rng = random.Random(7)
    for trial in range(20):
        pts = random_positions(rng, 6, 50, 50)
        mix = initialize_mixture(pts, 2, seed=trial)
        resp = e_step(mix, pts)
        pi = mix.pi.tolist()
        mu = [tuple(m) for m in mix.mu.tolist()]
        sigma = [s for s in mix.sigma.tolist()]
        oresp = oracle_e_step(pi, mu, sigma, pts)
        assert np.allclose(resp, oresp, rtol=1e-10, atol=1e-300)
        new = m_step(resp, pts)
        opi, omu, osigma = oracle_m_step(oresp, pts)
        assert np.allclose(new.pi, opi, rtol=1e-10)
        assert np.allclose(new.mu, omu, rtol=1e-10)
        assert np.allclose(new.sigma, osigma, rtol=1e-9)


# ---- run_emd ---------------------------------------------------------------

def blob_scenario(seed, sep=100.0, std=1.0, per_blob=10):
    rng = random.Random(seed)
    centers = [(0.0, 0.0), (sep, 0.0), (0.0, sep)]
    pts, labels = [], []
    for li, (cx, cy) in enumerate(centers):
        for _ in range(per_blob):
            pts.append((cx + rng.gauss(0, std), cy + rng.gauss(0, std)))
            labels.append(li)
    # shift positive
    minx = min(p[0] for p in pts)
    miny = min(p[1] for p in pts)
    pts = [(p[0] - minx + 1, p[1] - miny + 1) for p in pts]
    return pts, labels


def test_run_emd_k1_groups_all():
    s = make_scenario([(50.0, 50.0), (1.0, 2.0), (3.0, 4.0), (5.0, 1.0)], k=1)
    c = run_emd(s)
    assert c.assignment == (0, 0, 0)
    assert c.node_ids == (1, 2, 3)


def test_run_emd_recovers_blobs():
    pts, labels = blob_scenario(123)
    c = cluster_positions(tuple(range(len(pts))), pts, 3, seed=5, theta=1e-6, max_iters=200)
    # same partition up to relabeling
    mapping = {}
    for a, l in zip(c.assignment, labels):
        mapping.setdefault(l, a)
        assert mapping[l] == a
    assert len(set(mapping.values())) == 3


def test_run_emd_deterministic():
    rng = random.Random(99)
    s = make_scenario(random_positions(rng, 20, 100, 100), k=3, seed=11)
    a = run_emd(s)
    b = run_emd(s)
    assert a.assignment == b.assignment
    assert np.array_equal(a.responsibilities, b.responsibilities)
    assert a.log_likelihood_history == b.log_likelihood_history


def test_run_emd_monotone_loglik_and_normalization():
    rng = random.Random(4)
    pts = random_positions(rng, 30, 100, 100)
    mix = initialize_mixture(pts, 4, seed=3)
    arr = np.asarray(pts)
    prev = log_likelihood(mix, arr)
    for _ in range(40):
        resp = e_step(mix, arr)
        assert np.allclose(resp.sum(axis=1), 1.0, atol=1e-9)
        mix = m_step(resp, arr)
        assert abs(mix.pi.sum() - 1.0) <= 1e-12
        for k in range(4):
            assert np.linalg.eigvalsh(mix.sigma[k])[0] >= COV_EPSILON * (1 - 1e-9)
        cur = log_likelihood(mix, arr)
        assert cur >= prev - 1e-9 * abs(prev)
        prev = cur


def test_relabeling_invariance():
    rng = random.Random(12)
    pts = random_positions(rng, 25, 100, 100)
    mix = initialize_mixture(pts, 3, seed=8)
    perm = [2, 0, 1]
    permuted = GaussianMixture(
        K=3, pi=mix.pi[perm], mu=mix.mu[perm], sigma=mix.sigma[perm]
    )
    _, resp_a, _, _ = em_loop(mix, pts, 1e-6, 100)
    _, resp_b, _, _ = em_loop(permuted, pts, 1e-6, 100)
    # component j of the permuted run is component perm[j] of the original
    assert np.allclose(resp_b, resp_a[:, perm], rtol=1e-9, atol=1e-12)
    assign_a = np.argmax(resp_a, axis=1)
    assign_b = np.argmax(resp_b, axis=1)
    inv = {pk: j for j, pk in enumerate(perm)}
    assert [inv[a] for a in assign_a] == list(assign_b)


def test_every_cluster_non_empty():
    rng = random.Random(21)
    for seed in range(10):
        pts = random_positions(rng, 12, 100, 100)
        c = cluster_positions(tuple(range(12)), pts, 4, seed=seed, theta=1e-6, max_iters=200)
        assert set(c.assignment) == {0, 1, 2, 3}
