"""Finite-alphabet sparse signal model: alphabet, discrete prior, signal and
observation synthesis.

The signal b has W entries, exactly K of them nonzero, each nonzero drawn
uniformly from a finite alphabet A = {a_1, ..., a_S}. The augmented alphabet
A0 = A ∪ {0} always carries the zero symbol at index 0. Observations are
v = Psi b + n with i.i.d. Gaussian noise of variance sigma2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Alphabet",
    "DiscretePrior",
    "SparseSignal",
    "Observation",
    "make_prior",
    "make_prior_custom",
    "prior_moments",
    "draw_signal",
    "observe",
]


@dataclass(frozen=True)
class Alphabet:
    """Ordered nonzero symbols a_1..a_S; zero is implicit at augmented index 0."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("alphabet needs at least one nonzero symbol")
        if not all(np.isfinite(vals)):
            raise ValueError("alphabet symbols must be finite")
        if any(v == 0.0 for v in vals):
            raise ValueError("zero is implicit and must not appear in values")
        if len(set(vals)) != len(vals):
            raise ValueError("alphabet symbols must be pairwise distinct")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        """Number of nonzero symbols S."""
        return len(self.values)

    @property
    def augmented(self) -> np.ndarray:
        """A0 as an array [0, a_1, ..., a_S]."""
        return np.concatenate(([0.0], self.values))


@dataclass(frozen=True)
class DiscretePrior:
    """Mixture of point masses on A0 with weights pi_0..pi_S."""

    alphabet: Alphabet
    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != self.alphabet.size + 1:
            raise ValueError("need one weight per augmented symbol")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights)


@dataclass(frozen=True)
class SparseSignal:
    """A length-W vector over A0 with exactly `support_size` nonzeros."""

    entries: np.ndarray
    support_size: int


@dataclass(frozen=True)
class Observation:
    """Noisy linear measurements v of length R."""

    samples: np.ndarray
    noise_variance: float


def make_prior(alphabet: Alphabet, K: int, W: int) -> DiscretePrior:
    """Default sparsity prior: pi_0 = 1 - K/W, pi_s = K/(W*S) for nonzero symbols."""
    if not 0 < K < W:
        raise ValueError(f"need 0 < K < W, got K={K}, W={W}")
    S = alphabet.size
    pi0 = 1.0 - K / W
    pis = K / (W * S)
    return DiscretePrior(alphabet, (pi0,) + (pis,) * S)


def make_prior_custom(alphabet: Alphabet, weights) -> DiscretePrior:
    """Prior with user-supplied weights (pi_0, pi_1, ..., pi_S), renormalized."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (alphabet.size + 1,):
        raise ValueError("need one weight per augmented symbol")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"weights sum to {total}, expected 1 within 1e-6")
    w = w / total
    return DiscretePrior(alphabet, tuple(w))


def prior_moments(prior: DiscretePrior) -> tuple[float, float]:
    """Mean and variance of a single symbol under the prior."""
    a0 = prior.alphabet.augmented
    pi = prior.weights_array
    mean = float(a0 @ pi)
    var = float((a0 ** 2) @ pi - mean ** 2)
    return mean, max(var, 0.0)


def draw_signal(alphabet: Alphabet, K: int, W: int,
                rng: np.random.Generator) -> SparseSignal:
    """Draw a K-sparse signal: support uniform over size-K subsets of [W],
    nonzero values uniform over the alphabet."""
    if not 0 < K < W:
        raise ValueError(f"need 0 < K < W, got K={K}, W={W}")
    b = np.zeros(W)
    support = rng.choice(W, size=K, replace=False)
    values = np.asarray(alphabet.values)
    b[support] = values[rng.integers(0, alphabet.size, size=K)]
    return SparseSignal(entries=b, support_size=K)


def observe(matrix, signal: SparseSignal, sigma2: float,
            rng: np.random.Generator) -> Observation:
    """Synthesize v = Psi b + n with n ~ N(0, sigma2 I). sigma2 = 0 is noiseless."""
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    psi = matrix.entries
    if psi.shape[1] != signal.entries.shape[0]:
        raise ValueError(
            f"matrix has {psi.shape[1]} columns, signal has {signal.entries.shape[0]} entries")
    v = psi @ signal.entries
    if sigma2 > 0:
        v = v + np.sqrt(sigma2) * rng.standard_normal(psi.shape[0])
    return Observation(samples=v, noise_variance=float(sigma2))
