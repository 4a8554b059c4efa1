"""Gibbs states and the Bogoliubov / Kubo-Mori superoperator family.

All four superoperators act diagonally on the eigenbasis matrix units
``|i><j|`` of a full-rank state ``rho = sum_i p_i |i><i|``; each kind is a
symmetric scalar weight applied to matrix element ``(i, j)``:

=====================  ===========================================
kind                   weight on element (i, j)
=====================  ===========================================
BOGOLIUBOV             (p_i + p_j) / 2
BOGOLIUBOV_INVERSE     2 / (p_i + p_j)
KUBO_MORI              (p_i - p_j) / (ln p_i - ln p_j)
COMPOSED               2 (p_i - p_j)^2 / ((ln p_i - ln p_j)^2 (p_i + p_j))
=====================  ===========================================

The KUBO_MORI and COMPOSED weights have removable singularities at p_i = p_j
with limit p_i; pairs within ``DEGENERACY_RTOL`` relative difference take the
limit.  Away from degeneracy the weights are evaluated through the log-ratio
``x = ln(p_i / p_j)``:

    kubo_mori = p_j * expm1(x) / x
    composed  = 2 p_j * expm1(x)^2 / (x^2 * (exp(x) + 1))

which avoids catastrophic cancellation for nearly equal probabilities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .operators import DimensionMismatchError, HermitianOperator, Spectrum

#: Probabilities below this floor are clipped so that logarithms stay finite.
#: Inverse temperatures large enough to underflow the floor are outside the
#: supported range; use the zero-temperature formulas in ``bounds`` instead.
PROB_FLOOR = 1e-300

#: Pairs with |p_i - p_j| <= DEGENERACY_RTOL * max(p_i, p_j) use the analytic
#: degenerate limit of the Kubo-Mori-type weights.
DEGENERACY_RTOL = 1e-12

#: Switch point between the expm1 form (small |x|) and the direct formula.
_SMALL_LOG_RATIO = 0.5


class SuperopKind(enum.Enum):
    """The four superoperators used by the thermal Fisher-information forms."""

    BOGOLIUBOV = "bogoliubov"
    BOGOLIUBOV_INVERSE = "bogoliubov_inverse"
    KUBO_MORI = "kubo_mori"
    COMPOSED = "composed"


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state of a spectrum at inverse temperature ``beta``.

    ``probs`` follow the eigenvalue order of ``spectrum`` (nonincreasing for
    beta > 0); ``log_probs`` are kept separately so weight evaluations never
    take logs of clipped probabilities.
    """

    beta: float
    spectrum: Spectrum
    probs: np.ndarray
    log_probs: np.ndarray
    log_partition: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        log_probs = np.asarray(self.log_probs, dtype=float)
        if probs.shape != (self.spectrum.dimension,) or log_probs.shape != probs.shape:
            raise ValueError("probability vector does not match the spectrum")
        probs.setflags(write=False)
        log_probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "log_probs", log_probs)

    @property
    def dimension(self) -> int:
        return self.spectrum.dimension

    def density_matrix(self) -> np.ndarray:
        """Dense ``rho = V diag(p) V^dagger``."""
        v = self.spectrum.eigenvectors
        return (v * self.probs) @ v.conj().T


def gibbs(spectrum: Spectrum, beta: float) -> ThermalState:
    """Gibbs state ``p_i = exp(-beta E_i) / Z`` with max-shifted exponentials.

    ``beta = 0`` gives the maximally mixed state.  Negative or non-finite
    beta is rejected.
    """
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0.0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    energies = spectrum.eigenvalues
    shifted = -beta * (energies - energies[0])
    log_norm = float(np.log(np.sum(np.exp(shifted))))
    log_probs = shifted - log_norm
    probs = np.maximum(np.exp(log_probs), PROB_FLOOR)
    log_partition = float(-beta * energies[0] + log_norm)
    return ThermalState(beta=beta, spectrum=spectrum, probs=probs,
                        log_probs=log_probs, log_partition=log_partition)


def bogoliubov_weight(a: float, b: float) -> float:
    """Arithmetic-mean weight ``(a + b) / 2``."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("probabilities must be positive")
    return 0.5 * (a + b)


def kmb_weight(a: float, b: float) -> float:
    """Kubo-Mori-Bogoliubov weight ``2(a-b)^2 / ((ln a - ln b)^2 (a+b))``.

    (Near-)degenerate inputs take the analytic limit, evaluated as the pair
    mean ``(a+b)/2`` (equal to ``a`` within the degeneracy tolerance); the
    mean keeps the weight symmetric and never above ``bogoliubov_weight``.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError("probabilities must be positive")
    if abs(a - b) <= DEGENERACY_RTOL * max(a, b):
        return 0.5 * (a + b)
    x = math.log(a) - math.log(b)
    if abs(x) <= _SMALL_LOG_RATIO:
        return 2.0 * b * math.expm1(x) ** 2 / (x * x * (math.exp(x) + 1.0))
    return 2.0 * (a - b) ** 2 / (x * x * (a + b))


def weight_matrix(state: ThermalState, kind: SuperopKind) -> np.ndarray:
    """Symmetric matrix of eigenbasis weights for one superoperator kind."""
    p = state.probs
    if kind is SuperopKind.BOGOLIUBOV:
        return 0.5 * (p[:, None] + p[None, :])
    if kind is SuperopKind.BOGOLIUBOV_INVERSE:
        return 2.0 / (p[:, None] + p[None, :])

    pi = p[:, None]
    pj = p[None, :]
    mean = 0.5 * (pi + pj)
    x = state.log_probs[:, None] - state.log_probs[None, :]
    degenerate = np.abs(pi - pj) <= DEGENERACY_RTOL * np.maximum(pi, pj)
    small = np.abs(x) <= _SMALL_LOG_RATIO
    # Guard values so that neither branch divides by zero or overflows where
    # its result is discarded.
    x_small = np.where(small & ~degenerate, x, 1.0)
    x_large = np.where(~small, x, 1.0)
    if kind is SuperopKind.KUBO_MORI:
        via_expm1 = pj * np.expm1(x_small) / x_small
        direct = (pi - pj) / x_large
    elif kind is SuperopKind.COMPOSED:
        via_expm1 = 2.0 * pj * np.expm1(x_small) ** 2 / (
            x_small * x_small * (np.exp(x_small) + 1.0))
        direct = 2.0 * (pi - pj) ** 2 / (x_large * x_large * (pi + pj))
    else:
        raise ValueError(f"unknown superoperator kind {kind!r}")
    out = np.where(degenerate, mean, np.where(small, via_expm1, direct))
    return out


def apply_superoperator(kind: SuperopKind, state: ThermalState,
                        op: HermitianOperator) -> HermitianOperator:
    """Apply one superoperator to a Hermitian operator.

    The operator is rotated into the eigenbasis of the state, each matrix
    element is scaled by the kind's weight, and the result is rotated back.
    Hermiticity is preserved because every weight matrix is real symmetric.
    """
    if op.dimension != state.dimension:
        raise DimensionMismatchError(
            f"operator dimension {op.dimension} != state dimension {state.dimension}")
    v = state.spectrum.eigenvectors
    in_basis = v.conj().T @ op.entries @ v
    scaled = weight_matrix(state, kind) * in_basis
    return HermitianOperator(v @ scaled @ v.conj().T)


def trace_pair(state: ThermalState, b: HermitianOperator, kind: SuperopKind,
               a: HermitianOperator) -> float:
    """``Tr[B * kind(A)]`` from eigenbasis matrix elements.

    Only the two basis rotations are performed; the transformed operator is
    never materialized.  For Hermitian inputs the result is real.
    """
    if a.dimension != state.dimension or b.dimension != state.dimension:
        raise DimensionMismatchError("operator dimensions must match the state")
    v = state.spectrum.eigenvectors
    a_basis = v.conj().T @ a.entries @ v
    b_basis = v.conj().T @ b.entries @ v
    value = np.sum(weight_matrix(state, kind) * a_basis * b_basis.conj())
    return float(value.real)
