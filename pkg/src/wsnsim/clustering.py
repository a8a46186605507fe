"""Position-based node clustering with a K-component Gaussian mixture.

Fits the mixture by expectation-maximization over the 2-D node positions
(the sink is excluded) and hard-assigns every node to the cluster with the
highest posterior responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Scenario
from .errors import DegenerateLikelihood, SingularCovariance, TooFewNodes

# Added to every covariance diagonal; keeps coincident / collinear node
# layouts from producing singular matrices.
COV_EPSILON = 1e-6


@dataclass(frozen=True)
class GaussianMixture:
    """Mixture parameters: weights pi (K,), means mu (K, 2), covariances
    sigma (K, 2, 2)."""

    K: int
    pi: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class Clustering:
    """Hard clustering of the scenario's non-sink nodes.

    `node_ids[n]` is the node whose responsibilities sit in row n and whose
    cluster index is `assignment[n]`.
    """

    node_ids: tuple[int, ...]
    responsibilities: np.ndarray
    assignment: tuple[int, ...]
    final_log_likelihood: float
    iterations_used: int
    log_likelihood_history: tuple[float, ...]

    @property
    def K(self) -> int:
        return self.responsibilities.shape[1]

    def members(self, k: int) -> list[int]:
        return [nid for nid, a in zip(self.node_ids, self.assignment) if a == k]


def _check_spd(sigma: np.ndarray) -> None:
    if sigma.shape != (2, 2) or not np.allclose(sigma, sigma.T, atol=0, rtol=1e-9):
        raise SingularCovariance(f"covariance not symmetric: {sigma!r}")
    if np.linalg.eigvalsh(sigma)[0] <= 0:
        raise SingularCovariance(f"covariance not positive-definite: {sigma!r}")


def gaussian_density(x, mu, sigma) -> float:
    """Bivariate normal pdf at x."""
    sigma = np.asarray(sigma, dtype=float)
    _check_spd(sigma)
    diff = np.asarray(x, dtype=float) - np.asarray(mu, dtype=float)
    det = np.linalg.det(sigma)
    quad = float(diff @ np.linalg.inv(sigma) @ diff)
    return float(np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det)))


def _density_matrix(mixture: GaussianMixture, positions: np.ndarray) -> np.ndarray:
    """Weighted densities pi_k * N(x_n | mu_k, sigma_k), shape (N, K)."""
    n = positions.shape[0]
    out = np.empty((n, mixture.K))
    for k in range(mixture.K):
        sigma = mixture.sigma[k]
        _check_spd(sigma)
        inv = np.linalg.inv(sigma)
        det = np.linalg.det(sigma)
        diff = positions - mixture.mu[k]
        quad = np.einsum("ni,ij,nj->n", diff, inv, diff)
        out[:, k] = mixture.pi[k] * np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))
    return out


def log_likelihood(mixture: GaussianMixture, positions) -> float:
    positions = np.asarray(positions, dtype=float)
    totals = _density_matrix(mixture, positions).sum(axis=1)
    if np.any(totals <= 0.0):
        raise DegenerateLikelihood("mixture density underflowed to zero for some point")
    return float(np.log(totals).sum())


def _init_covariance(positions: np.ndarray) -> np.ndarray:
    s2 = max(float(np.var(positions)), COV_EPSILON)
    return s2 * np.eye(2)


def initialize_mixture(positions, K: int, seed: int) -> GaussianMixture:
    """Seeded initialization: uniform weights, means drawn from the node
    positions without replacement (squared-distance weighted, so spread-out
    starting means), isotropic covariances from the coordinate variance."""
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    if K > n:
        raise TooFewNodes(n, K)
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n))]
    for _ in range(1, K):
        d2 = np.full(n, np.inf)
        for c in chosen:
            d2 = np.minimum(d2, ((positions - positions[c]) ** 2).sum(axis=1))
        d2[chosen] = 0.0
        total = d2.sum()
        if total > 0:
            probs = d2 / total
        else:
            probs = np.ones(n) / n
            probs[chosen] = 0.0
            probs /= probs.sum()
        chosen.append(int(rng.choice(n, p=probs)))
    mu = positions[chosen].copy()
    sigma = np.repeat(_init_covariance(positions)[None, :, :], K, axis=0)
    pi = np.full(K, 1.0 / K)
    return GaussianMixture(K=K, pi=pi, mu=mu, sigma=sigma)


def e_step(mixture: GaussianMixture, positions) -> np.ndarray:
    positions = np.asarray(positions, dtype=float)
    weighted = _density_matrix(mixture, positions)
    totals = weighted.sum(axis=1, keepdims=True)
    if np.any(totals <= 0.0):
        raise DegenerateLikelihood("mixture density underflowed to zero for some point")
    return weighted / totals


def m_step(responsibilities, positions) -> GaussianMixture:
    resp = np.asarray(responsibilities, dtype=float)
    positions = np.asarray(positions, dtype=float)
    n, k_count = resp.shape
    nk = resp.sum(axis=0)
    pi = np.empty(k_count)
    mu = np.empty((k_count, 2))
    sigma = np.empty((k_count, 2, 2))
    needs_repair = []
    for k in range(k_count):
        if nk[k] < 1e-9:
            needs_repair.append(k)
            continue
        pi[k] = nk[k] / n
        mu[k] = resp[:, k] @ positions / nk[k]
        diff = positions - mu[k]
        sigma[k] = (resp[:, k, None] * diff).T @ diff / nk[k] + COV_EPSILON * np.eye(2)
    for k in needs_repair:
        # Empty component: reseed on the worst-covered point.
        worst = int(np.argmin(resp.max(axis=1)))
        pi[k] = 1.0 / n
        mu[k] = positions[worst]
        sigma[k] = _init_covariance(positions)
    if needs_repair:
        pi = pi / pi.sum()
    return GaussianMixture(K=k_count, pi=pi, mu=mu, sigma=sigma)


def em_loop(
    mixture: GaussianMixture,
    positions,
    theta: float,
    max_iters: int,
) -> tuple[GaussianMixture, np.ndarray, list[float], int]:
    """Alternate E/M steps from the given mixture until |delta P| < theta or
    max_iters. Returns (mixture, responsibilities, P history, iterations)."""
    positions = np.asarray(positions, dtype=float)
    history = [log_likelihood(mixture, positions)]
    iterations = 0
    for _ in range(max_iters):
        resp = e_step(mixture, positions)
        mixture = m_step(resp, positions)
        history.append(log_likelihood(mixture, positions))
        iterations += 1
        if abs(history[-1] - history[-2]) < theta:
            break
    return mixture, e_step(mixture, positions), history, iterations


def _repair_empty_clusters(resp: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    """Ensure every cluster index owns at least one node after argmax."""
    k_count = resp.shape[1]
    assignment = assignment.copy()
    for k in range(k_count):
        if np.any(assignment == k):
            continue
        counts = np.bincount(assignment, minlength=k_count)
        movable = np.flatnonzero(counts[assignment] >= 2)
        if movable.size == 0:
            continue
        best = movable[int(np.argmax(resp[movable, k]))]
        assignment[best] = k
    return assignment


def cluster_positions(
    node_ids: tuple[int, ...],
    positions,
    K: int,
    seed: int,
    theta: float,
    max_iters: int,
) -> Clustering:
    """Cluster an explicit list of (node id, position) pairs."""
    positions = np.asarray(positions, dtype=float)
    if len(node_ids) < K:
        raise TooFewNodes(len(node_ids), K)
    mixture = initialize_mixture(positions, K, seed)
    mixture, resp, history, iterations = em_loop(mixture, positions, theta, max_iters)
    assignment = _repair_empty_clusters(resp, np.argmax(resp, axis=1))
    return Clustering(
        node_ids=node_ids,
        responsibilities=resp,
        assignment=tuple(int(a) for a in assignment),
        final_log_likelihood=history[-1],
        iterations_used=iterations,
        log_likelihood_history=tuple(history),
    )


def run_emd(scenario: Scenario) -> Clustering:
    """Full clustering pass over the scenario's non-sink nodes."""
    node_ids = tuple(scenario.source_ids())
    positions = [scenario.nodes[i].position for i in node_ids]
    return cluster_positions(
        node_ids, positions, scenario.K, scenario.seed, scenario.theta_em, scenario.max_em_iters
    )
