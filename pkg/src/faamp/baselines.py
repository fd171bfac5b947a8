"""Comparison machinery: soft-thresholding AMP baseline, finite-alphabet
decision rules, the residual-budget parameter gamma, and an exhaustive
exact-MAP oracle for tiny instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementMatrix
from .signal_model import DiscretePrior

__all__ = [
    "KLargestRule",
    "ThresholdRule",
    "BaselineConfig",
    "gamma_for",
    "amp_bpdn_recover",
    "decide_k_largest",
    "decide_threshold",
    "exact_map_enumerate",
]

# Threshold multiplier for the soft-thresholding baseline: theta_t =
# KAPPA_DEFAULT * MAD(pseudo-data) / 0.6745. Fixed once on seeded Rademacher
# instances (W=512, R=205, K=20) and frozen; see BaselineConfig.
KAPPA_DEFAULT = 3.0
MAD_TO_STD = 0.6745

ENUMERATION_BUDGET = 2 ** 24


@dataclass(frozen=True)
class KLargestRule:
    k: int


@dataclass(frozen=True)
class ThresholdRule:
    alpha: float


@dataclass(frozen=True)
class BaselineConfig:
    """Configuration of the real-valued baseline and its quantization rule."""

    gamma: float
    iterations: int
    policy: KLargestRule | ThresholdRule
    kappa: float = KAPPA_DEFAULT

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if isinstance(self.policy, ThresholdRule) and self.policy.alpha <= 0:
            raise ValueError("threshold alpha must be positive")


def gamma_for(W: int, R: int, sigma: float) -> float:
    """Residual-norm budget sqrt(ceil(W/R)) * sigma * sqrt(R) * sqrt(1 + sqrt(2)/sqrt(R))."""
    if R < 1:
        raise ValueError("need R >= 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return math.sqrt(math.ceil(W / R)) * sigma * math.sqrt(R) \
        * math.sqrt(1.0 + math.sqrt(2.0) / math.sqrt(R))


def _soft(x: np.ndarray, theta: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def amp_bpdn_recover(matrix: MeasurementMatrix, v: np.ndarray, sigma2: float,
                     T: int, kappa: float = KAPPA_DEFAULT) -> np.ndarray:
    """Soft-thresholding AMP for the basis-pursuit denoising relaxation.

    Iterates x <- soft(x + Psi^T z, theta_t) with the Onsager-corrected
    residual z <- v - Psi x + (|supp x| / R) z. The threshold theta_t =
    kappa * median(|pseudo-data|) / 0.6745 uses a robust scale estimate of
    the current pseudo-data, so a sparse signal component does not inflate
    it. Returns the real-valued (unquantized) estimate.
    """
    psi = matrix.entries
    R, W = psi.shape
    v = np.asarray(v, dtype=float)
    if v.shape != (R,):
        raise ValueError(f"observation has shape {v.shape}, expected ({R},)")
    x = np.zeros(W)
    z = v.copy()
    for t in range(T):
        pseudo = x + psi.T @ z
        theta = kappa * np.median(np.abs(pseudo)) / MAD_TO_STD
        x_new = _soft(pseudo, theta)
        if not np.all(np.isfinite(x_new)):
            raise RuntimeError(f"non-finite baseline iterate at iteration {t + 1}")
        z = v - psi @ x_new + (np.count_nonzero(x_new) / R) * z
        x = x_new
    return x


def decide_k_largest(b_hat: np.ndarray, K: int) -> np.ndarray:
    """Sign the K largest-magnitude entries, zero the rest.

    Magnitude ties break toward the smaller index. Entries that are exactly
    zero stay zero even if selected, so the output can have fewer than K
    nonzeros when b_hat itself does.
    """
    b_hat = np.asarray(b_hat, dtype=float)
    if K > b_hat.shape[0]:
        raise ValueError("K exceeds the vector length")
    order = np.argsort(-np.abs(b_hat), kind="stable")
    out = np.zeros_like(b_hat)
    top = order[:K]
    out[top] = np.sign(b_hat[top])
    return out


def decide_threshold(b_hat: np.ndarray, alpha: float) -> np.ndarray:
    """sign(b_hat_w) where |b_hat_w| >= alpha, zero otherwise."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    b_hat = np.asarray(b_hat, dtype=float)
    return np.where(np.abs(b_hat) >= alpha, np.sign(b_hat), 0.0)


def exact_map_enumerate(matrix: MeasurementMatrix, v: np.ndarray, sigma2: float,
                        prior: DiscretePrior) -> np.ndarray:
    """Exhaustive MAP over all (S+1)^W candidates in A0^W.

    Maximizes -||v - Psi b||^2 / (2 sigma2) + sum_w log f(b_w); ties break
    lexicographically by augmented alphabet index. Only feasible at toy sizes;
    the candidate count is capped at 2^24.
    """
    psi = matrix.entries
    R, W = psi.shape
    v = np.asarray(v, dtype=float)
    if sigma2 <= 0:
        raise ValueError("exact MAP scoring needs sigma2 > 0")
    S1 = prior.alphabet.size + 1
    n_cand = S1 ** W
    if n_cand > ENUMERATION_BUDGET:
        raise ValueError(f"{n_cand} candidates exceed the enumeration budget")

    a0 = prior.alphabet.augmented
    log_pi = np.log(prior.weights_array)
    psi_cols = psi  # (R, W)

    best_score = -np.inf
    best = None
    chunk = 1 << 14
    it = itertools.product(range(S1), repeat=W)
    while True:
        block = np.fromiter(itertools.chain.from_iterable(
            itertools.islice(it, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        idx = block.reshape(-1, W)
        B = a0[idx]                              # (n, W)
        resid = v[None, :] - B @ psi_cols.T      # (n, R)
        scores = -np.einsum("nr,nr->n", resid, resid) / (2.0 * sigma2) \
            + log_pi[idx].sum(axis=1)
        j = int(np.argmax(scores))
        if scores[j] > best_score:               # strict: keeps lexicographic ties
            best_score = scores[j]
            best = B[j]
    return best
