"""Measurement matrix constructions: Rademacher ensemble and the random
demodulator (integrate-and-dump accumulator H, random chipping diagonal D,
DFT synthesis F), stacked into a real matrix with unit-norm columns.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "MatrixKind",
    "MeasurementMatrix",
    "DegenerateColumnError",
    "make_rademacher",
    "make_accumulator",
    "demodulator_complex",
    "demodulator_stack",
    "make_random_demodulator",
    "column_norms",
    "save_matrix",
    "load_matrix",
]


class MatrixKind(Enum):
    RADEMACHER = "rademacher"
    RANDOM_DEMODULATOR = "random_demodulator"
    EXTERNAL = "external"


class DegenerateColumnError(ValueError):
    """A column collapsed to (numerically) zero norm before normalization."""


@dataclass(frozen=True)
class MeasurementMatrix:
    """Dense R x W real sensing matrix with unit-norm columns."""

    entries: np.ndarray
    kind: MatrixKind
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def make_rademacher(W: int, R: int, rng: np.random.Generator) -> MeasurementMatrix:
    """R x W matrix with i.i.d. equiprobable entries +-1/sqrt(R); columns have
    exact unit norm by construction."""
    if not 1 <= R <= W:
        raise ValueError(f"need 1 <= R <= W, got R={R}, W={W}")
    signs = rng.integers(0, 2, size=(R, W)) * 2 - 1
    entries = signs / np.sqrt(R)
    return MeasurementMatrix(entries=entries, kind=MatrixKind.RADEMACHER,
                             meta={"W": W, "R": R})


def make_accumulator(W: int, Rprime: int) -> np.ndarray:
    """Integrate-and-dump matrix H of shape R' x W.

    Row r integrates the sample interval [r*W/R', (r+1)*W/R'). When R' divides
    W the rows are 0/1 blocks of W/R' consecutive ones; otherwise a sample
    straddling a row boundary is split proportionally, so every column still
    sums to exactly 1.
    """
    if not 1 <= Rprime <= W:
        raise ValueError(f"need 1 <= R' <= W, got R'={Rprime}, W={W}")
    H = np.zeros((Rprime, W))
    width = W / Rprime
    for r in range(Rprime):
        lo, hi = r * width, (r + 1) * width
        c0, c1 = int(np.floor(lo)), int(np.ceil(hi))
        for c in range(c0, min(c1, W)):
            overlap = min(c + 1, hi) - max(c, lo)
            if overlap > 0:
                H[r, c] = overlap
    return H


def demodulator_complex(W: int, Rprime: int, signs: np.ndarray) -> np.ndarray:
    """Complex R' x W demodulator matrix H D F for a given +-1 chipping sequence.

    F is the W x W DFT synthesis matrix exp(+2*pi*i*n*k/W); D = diag(signs).
    """
    n = np.arange(W)
    F = np.exp(2j * np.pi * np.outer(n, n) / W)
    H = make_accumulator(W, Rprime)
    return H @ (signs[:, None] * F)


def demodulator_stack(psi_c: np.ndarray) -> np.ndarray:
    """Stack a complex matrix into real rows [Re; Im]."""
    return np.vstack([psi_c.real, psi_c.imag])


def make_random_demodulator(W: int, Rprime: int,
                            rng: np.random.Generator) -> MeasurementMatrix:
    """Real 2R' x W random demodulator matrix with unit-norm columns.

    Draws the chipping signs, forms H D F, stacks real and imaginary parts,
    and rescales each column to unit norm.
    """
    if not 1 <= Rprime <= W:
        raise ValueError(f"need 1 <= R' <= W, got R'={Rprime}, W={W}")
    signs = rng.integers(0, 2, size=W) * 2 - 1
    psi = demodulator_stack(demodulator_complex(W, Rprime, signs))
    norms = np.linalg.norm(psi, axis=0)
    bad = np.flatnonzero(norms < 1e-12)
    if bad.size:
        raise DegenerateColumnError(
            f"columns {bad.tolist()} have norm below 1e-12 before normalization")
    entries = psi / norms
    return MeasurementMatrix(
        entries=entries, kind=MatrixKind.RANDOM_DEMODULATOR,
        meta={"W": W, "R": 2 * Rprime, "Rprime": Rprime,
              "column_scale": norms, "signs": signs})


def column_norms(matrix: MeasurementMatrix) -> np.ndarray:
    """Euclidean norm of each column."""
    return np.linalg.norm(matrix.entries, axis=0)


def save_matrix(matrix: MeasurementMatrix, path) -> None:
    """Write a matrix dump: one header line with kind and dimensions, then the
    entries row-major as CSV."""
    R, W = matrix.entries.shape
    rp = matrix.meta.get("Rprime", "")
    seed = matrix.meta.get("seed", "")
    header = f"kind={matrix.kind.value} W={W} R={R} Rprime={rp} seed={seed}"
    with open(path, "w") as fh:
        np.savetxt(fh, matrix.entries, delimiter=",", fmt="%.17g", header=header)


def load_matrix(path) -> MeasurementMatrix:
    """Read a matrix dump written by :func:`save_matrix`."""
    with open(path) as fh:
        header = fh.readline().lstrip("# ").strip()
        entries = np.loadtxt(io.StringIO(fh.read()), delimiter=",", ndmin=2)
    fields = dict(kv.split("=", 1) for kv in header.split())
    kind = MatrixKind(fields.get("kind", "external"))
    meta = {"W": entries.shape[1], "R": entries.shape[0]}
    if fields.get("Rprime"):
        meta["Rprime"] = int(fields["Rprime"])
    if fields.get("seed"):
        meta["seed"] = int(fields["seed"])
    return MeasurementMatrix(entries=entries, kind=kind, meta=meta)
