"""Approximate message passing with a discrete prior, tracked in the log domain.

Per-edge messages are kept explicitly: the log-probability tensor has shape
W x (R+1) x (S+1), where slot r = R is the extra "final estimate" destination
whose measurement-side sums run over all rows without exclusion. One iteration
runs three steps:

  1. edge moments: mean xi and variance tau of each variable-to-measurement
     message from its log-probabilities;
  2. Gaussian moments: mean mu and variance eta of the product of incoming
     measurement-to-variable messages, via the central-limit approximation;
  3. prior incorporation: l(a_s) = log pi_s - (mu - a_s)^2 / (2 eta),
     normalized with a stable log-sum-exp.

The optimized path computes step 2 from full residuals plus per-edge
corrections in O(R*W); ``naive_reference_step`` evaluates the same formulas
with explicit triple loops and exclusions, and serves as the testing oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementMatrix
from .signal_model import DiscretePrior, prior_moments

__all__ = [
    "MessageState",
    "RecoveryResult",
    "NumericalFailureError",
    "init_state",
    "edge_moments",
    "gaussian_moments",
    "incorporate_prior",
    "amp_step",
    "run",
    "naive_reference_step",
]

VARIANCE_FLOOR = 1e-12


class NumericalFailureError(RuntimeError):
    """Non-finite values appeared during message passing."""


@dataclass
class MessageState:
    """Per-edge message state at iteration t.

    log_probs[w, r, s] is the normalized log-probability the message from
    variable w to measurement r assigns to augmented symbol s; r = R is the
    final-estimate slot. edge_means and edge_vars hold the matching xi and tau.
    """

    log_probs: np.ndarray   # (W, R+1, S+1)
    edge_means: np.ndarray  # (W, R+1)
    edge_vars: np.ndarray   # (W, R+1)
    iteration: int = 0

    @property
    def shape(self):
        return self.log_probs.shape


@dataclass(frozen=True)
class RecoveryResult:
    estimate: np.ndarray             # (W,) over A0
    final_log_posteriors: np.ndarray  # (W, S+1), normalized
    iterations_run: int


def init_state(prior: DiscretePrior, W: int, R: int) -> MessageState:
    """All messages start at the prior; xi and tau at the prior moments."""
    if W < 1 or R < 1:
        raise ValueError("need W >= 1 and R >= 1")
    pi = prior.weights_array
    if np.any(pi == 0):
        raise ValueError("zero prior weight breaks log-domain messages; "
                         "drop the symbol from the alphabet instead")
    mean, var = prior_moments(prior)
    l = np.tile(np.log(pi), (W, R + 1, 1))
    xi = np.full((W, R + 1), mean)
    tau = np.full((W, R + 1), var)
    return MessageState(log_probs=l, edge_means=xi, edge_vars=tau, iteration=0)


def edge_moments(state: MessageState, prior: DiscretePrior) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of each variable-to-measurement message."""
    a0 = prior.alphabet.augmented
    p = np.exp(state.log_probs)
    xi = p @ a0
    tau = p @ (a0 ** 2) - xi ** 2
    np.maximum(tau, 0.0, out=tau)  # clip rounding residue of order 1e-16
    return xi, tau


def gaussian_moments(state: MessageState, matrix: MeasurementMatrix,
                     v: np.ndarray, sigma2: float) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian approximation of the product of incoming measurement messages.

    mu[w, r] = sum_{rho != r} psi[rho, w] * (v[rho] - sum_{omega != w}
    psi[rho, omega] * xi[omega, rho]); the r = R slot sums over all rho.
    eta[w, r] = (1/R) * sum_{omega != w} tau[omega, r] + sigma2.

    Computed from full residuals with per-edge corrections, O(R*W) total.
    """
    psi = matrix.entries
    R, W = psi.shape
    xi, tau = state.edge_means, state.edge_vars
    xi_r = xi[:, :R]  # (W, R) edge means toward real measurements

    # z[rho] = v[rho] - sum_omega psi[rho, omega] * xi[omega, rho]
    z = v - np.einsum("rw,wr->r", psi, xi_r)
    # inner[w, rho]: the inner sum with omega = w excluded, i.e. z + own term
    inner = z[None, :] + psi.T * xi_r
    contrib = psi.T * inner             # (W, R) per-rho terms of the outer sum
    total = contrib.sum(axis=1)         # full outer sum, used by the final slot

    mu = np.empty((W, R + 1))
    mu[:, :R] = total[:, None] - contrib
    mu[:, R] = total

    col_tau = tau.sum(axis=0)           # (R+1,)
    eta = (col_tau[None, :] - tau) / R + sigma2
    np.maximum(eta, max(sigma2, VARIANCE_FLOOR), out=eta)
    return mu, eta


def incorporate_prior(mu: np.ndarray, eta: np.ndarray,
                      prior: DiscretePrior) -> np.ndarray:
    """Fold the prior into the Gaussian moments and renormalize in log domain."""
    a0 = prior.alphabet.augmented
    log_pi = np.log(prior.weights_array)
    # per-symbol 2D slices: reductions over the short symbol axis are slow,
    # so the log-sum-exp runs as a handful of full-plane operations instead
    neg_half_inv_eta = -0.5 / eta
    lbar = np.empty(mu.shape + (a0.size,))
    for s in range(a0.size):
        d = mu - a0[s]
        d *= d
        d *= neg_half_inv_eta
        d += log_pi[s]
        lbar[:, :, s] = d
    shift = lbar[:, :, 0].copy()
    for s in range(1, a0.size):
        np.maximum(shift, lbar[:, :, s], out=shift)
    acc = np.zeros_like(shift)
    for s in range(a0.size):
        lbar[:, :, s] -= shift
        acc += np.exp(lbar[:, :, s])
    norm = np.log(acc)
    lbar -= norm[:, :, None]
    return lbar


def amp_step(state: MessageState, matrix: MeasurementMatrix, v: np.ndarray,
             sigma2: float, prior: DiscretePrior) -> MessageState:
    """One full optimized iteration (steps 2-4)."""
    xi, tau = edge_moments(state, prior)
    work = MessageState(state.log_probs, xi, tau, state.iteration)
    mu, eta = gaussian_moments(work, matrix, v, sigma2)
    l = incorporate_prior(mu, eta, prior)
    new = MessageState(log_probs=l, edge_means=xi, edge_vars=tau,
                       iteration=state.iteration + 1)
    new.last_mu = mu    # exposed for equivalence tests
    new.last_eta = eta
    return new


def run(matrix: MeasurementMatrix, v: np.ndarray, sigma2: float,
        prior: DiscretePrior, T: int = 50,
        stop_tol: float | None = 1e-8) -> RecoveryResult:
    """Run AMP for up to T iterations and decide each symbol by the argmax of
    its final-slot log-posterior (ties to the smallest augmented index).

    Early-stops once the final-slot means move by less than ``stop_tol`` in
    max norm between consecutive iterations; pass ``stop_tol=None`` to always
    run exactly T iterations.
    """
    psi = matrix.entries
    R, W = psi.shape
    v = np.asarray(v, dtype=float)
    if v.shape != (R,):
        raise ValueError(f"observation has shape {v.shape}, expected ({R},)")
    if prior.alphabet.size + 1 != len(prior.weights):
        raise ValueError("inconsistent prior")

    state = init_state(prior, W, R)
    prev_final_means = state.edge_means[:, R].copy()
    iters = 0
    for _ in range(T):
        state = amp_step(state, matrix, v, sigma2, prior)
        iters += 1
        if not np.all(np.isfinite(state.log_probs)):
            raise NumericalFailureError(
                f"non-finite messages at iteration {iters}")
        final_means = state.edge_means[:, R]
        if stop_tol is not None and iters > 1 \
                and np.max(np.abs(final_means - prev_final_means)) < stop_tol:
            break
        prev_final_means = final_means.copy()

    final_log_post = state.log_probs[:, R, :]
    a0 = prior.alphabet.augmented
    estimate = a0[np.argmax(final_log_post, axis=1)]
    return RecoveryResult(estimate=estimate,
                          final_log_posteriors=final_log_post,
                          iterations_run=iters)


def naive_reference_step(state: MessageState, matrix: MeasurementMatrix,
                         v: np.ndarray, sigma2: float,
                         prior: DiscretePrior) -> MessageState:
    """Direct triple-loop evaluation of one iteration, with the rho != r and
    omega != w exclusions written out. Testing oracle for ``amp_step``;
    only sensible at small W*R."""
    psi = matrix.entries
    R, W = psi.shape
    a0 = prior.alphabet.augmented
    log_pi = np.log(prior.weights_array)

    p = np.exp(state.log_probs)
    xi = np.zeros((W, R + 1))
    tau = np.zeros((W, R + 1))
    for w in range(W):
        for r in range(R + 1):
            xi[w, r] = sum(a0[s] * p[w, r, s] for s in range(len(a0)))
            second = sum(a0[s] ** 2 * p[w, r, s] for s in range(len(a0)))
            tau[w, r] = max(second - xi[w, r] ** 2, 0.0)

    mu = np.zeros((W, R + 1))
    eta = np.zeros((W, R + 1))
    for w in range(W):
        for r in range(R + 1):
            acc = 0.0
            # r = R is the final-estimate slot: no row is excluded there
            for rho in (rho for rho in range(R) if rho != r):
                inner = v[rho]
                for omega in range(W):
                    if omega != w:
                        inner -= psi[rho, omega] * xi[omega, rho]
                acc += psi[rho, w] * inner
            mu[w, r] = acc
            tsum = 0.0
            for omega in range(W):
                if omega != w:
                    tsum += tau[omega, r]
            eta[w, r] = max(tsum / R + sigma2, max(sigma2, VARIANCE_FLOOR))

    l = np.zeros_like(state.log_probs)
    for w in range(W):
        for r in range(R + 1):
            lbar = np.array([log_pi[s] - (mu[w, r] - a0[s]) ** 2 / (2 * eta[w, r])
                             for s in range(len(a0))])
            shift = lbar.max()
            l[w, r] = lbar - (shift + np.log(np.sum(np.exp(lbar - shift))))

    new = MessageState(log_probs=l, edge_means=xi, edge_vars=tau,
                       iteration=state.iteration + 1)
    new.last_mu = mu    # exposed for equivalence tests
    new.last_eta = eta
    return new
