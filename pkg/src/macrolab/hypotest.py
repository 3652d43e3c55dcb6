"""Exact optimal binary hypothesis tests and finite-copy error-rate series.

The optimal test minimizing tr(sigma Gamma) subject to tr(rho Gamma) >= eps,
0 <= Gamma <= 1, is built from the spectral projectors of rho - t*sigma at the
Neyman-Pearson threshold t, with a fractional weight on the near-kernel band
so the constraint is met with equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import relative_entropy
from .operators import (DIM_CAP, eig, hermitian_part, random_test_operator,
                        tensor_power, LOG_SUPPORT_RTOL)

KERNEL_BAND = 1e-10
BISECT_WIDTH = 1e-12


@dataclass(frozen=True)
class NPTestResult:
    epsilon: float
    threshold_t: float
    prob: float          # minimized tr(sigma Gamma)
    power: float         # achieved tr(rho Gamma)
    gamma_op: np.ndarray


def _split_projectors(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto eigenvalues > band and onto the near-kernel band."""
    w, v = eig(m)
    vp = v[:, w > KERNEL_BAND]
    v0 = v[:, np.abs(w) <= KERNEL_BAND]
    return vp @ vp.conj().T, v0 @ v0.conj().T


def np_optimal_test(rho: np.ndarray, sigma: np.ndarray,
                    eps: float) -> NPTestResult:
    """Exact quantum Neyman-Pearson minimizer."""
    if not 0 < eps <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {eps}")
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")

    # If enough of rho lives in sigma's kernel the error probability is 0.
    w_s, v_s = eig(sigma)
    cut = LOG_SUPPORT_RTOL * max(float(w_s[-1]), 0.0)
    ker = v_s[:, w_s <= cut]
    if ker.shape[1]:
        p_ker = float(np.trace(ker.conj().T @ rho @ ker).real)
        if p_ker >= eps - 1e-12:
            pk = ker @ ker.conj().T
            gamma = hermitian_part(min(eps / p_ker, 1.0) * pk)
            return NPTestResult(epsilon=eps, threshold_t=math.inf, prob=0.0,
                                power=float(np.trace(rho @ gamma).real),
                                gamma_op=gamma)

    def g_at_least(t: float, level: float) -> bool:
        """Whether g(t) = tr(rho P_+(rho - t sigma)) >= level.

        Compared through the complement 1 - g(t), a sum of small nonnegative
        overlaps, so levels near 1 are resolved without cancellation.
        """
        w, v = eig(hermitian_part(rho - t * sigma))
        rest = v[:, w <= KERNEL_BAND]
        deficit = float(np.trace(rest.conj().T @ rho @ rest).real)
        return deficit <= 1.0 - level

    def candidate(t: float) -> NPTestResult | None:
        pp, p0 = _split_projectors(hermitian_part(rho - t * sigma))
        p_plus = float(np.trace(rho @ pp).real)
        p_zero = float(np.trace(rho @ p0).real)
        c = 0.0
        if p_plus < eps and p_zero > 0:
            c = min(max((eps - p_plus) / p_zero, 0.0), 1.0)
        gamma = hermitian_part(pp + c * p0)
        power = float(np.trace(rho @ gamma).real)
        if power < eps - 1e-10:
            return None
        return NPTestResult(epsilon=eps, threshold_t=t,
                            prob=float(np.trace(sigma @ gamma).real),
                            power=power, gamma_op=gamma)

    # bracket the crossing of g(t) with eps, then bisect
    lo, hi = 0.0, 1.0
    for _ in range(80):
        if not g_at_least(hi, eps):
            break
        lo, hi = hi, 2 * hi
    while hi - lo > BISECT_WIDTH:
        mid = (lo + hi) / 2
        if g_at_least(mid, eps):
            lo = mid
        else:
            hi = mid

    # t = 0 guards the degenerate case where g is numerically flat at eps
    candidates = [c for c in (candidate(hi), candidate(lo), candidate(0.0))
                  if c is not None]
    return min(candidates, key=lambda c: c.prob)


def prob_eps_tensor(rho: np.ndarray, sigma: np.ndarray, eps: float, n: int,
                    cap: int = DIM_CAP) -> float:
    """Optimal error probability on n tensor copies."""
    return np_optimal_test(tensor_power(rho, n, cap=cap),
                           tensor_power(sigma, n, cap=cap), eps).prob


@dataclass(frozen=True)
class SteinRateSeries:
    epsilon: float
    rel_entropy: float
    rows: list[tuple[int, float, float]]  # (N, prob, rate); rate inf if prob 0


def stein_rate_series(rho: np.ndarray, sigma: np.ndarray, eps: float,
                      n_max: int, cap: int = DIM_CAP) -> SteinRateSeries:
    """Rates -(1/N) ln prob for N = 1..n_max, alongside S(rho||sigma)."""
    rows = []
    for n in range(1, n_max + 1):
        prob = prob_eps_tensor(rho, sigma, eps, n, cap=cap)
        rate = math.inf if prob <= 0 else -math.log(prob) / n
        rows.append((n, prob, rate))
    return SteinRateSeries(epsilon=eps,
                           rel_entropy=relative_entropy(rho, sigma),
                           rows=rows)


def sampled_gamma_bound(rho: np.ndarray, sigma: np.ndarray, eps: float,
                        n: int, trials: int, seed: int = 0,
                        cap: int = DIM_CAP) -> float:
    """Best objective over sampled feasible tests; an upper bound on prob.

    Samples random test operators (plus perturbations of the exact minimizer),
    restores feasibility by blending with the identity, and returns the
    smallest tr(sigma Gamma) seen.  Independent optimality cross-check.
    """
    rho_n = tensor_power(rho, n, cap=cap)
    sigma_n = tensor_power(sigma, n, cap=cap)
    dim = rho_n.shape[0]
    result = np_optimal_test(rho_n, sigma_n, eps)
    best = math.inf
    for i in range(trials):
        gamma = random_test_operator(seed, dim, index=i)
        if i % 2 == 1:
            # small feasible perturbation of the exact minimizer
            pert = 0.05 * (gamma - 0.5 * np.eye(dim))
            w, v = eig(hermitian_part(result.gamma_op + pert))
            gamma = hermitian_part((v * np.clip(w, 0.0, 1.0)) @ v.conj().T)
        power = float(np.trace(rho_n @ gamma).real)
        if power < eps:
            alpha = (1.0 - eps) / (1.0 - power) if power < 1.0 else 0.0
            gamma = hermitian_part(alpha * gamma + (1 - alpha) * np.eye(dim))
        best = min(best, float(np.trace(sigma_n @ gamma).real))
    return best
