"""Hermitian operators on N-qubit Hilbert spaces assembled from local Pauli terms.

Everything here is dense: the downstream thermal machinery needs full spectra,
so sparse storage buys nothing once eigenvectors are required.  Hilbert spaces
are qubit-only (local dimension 2) and the dense ceiling is ``MAX_DENSE_QUBITS``
qubits.

Conventions
-----------
* Site 0 is the *leftmost* tensor factor, i.e. the most significant bit of a
  computational-basis index.
* A parameterized Hamiltonian is linear in its parameters,
  ``H(theta) = H_0 + sum_m theta_m * H_m``, with each ``H_m`` a fixed sum of
  Pauli terms (the generator of parameter ``m``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: Absolute max-norm scale for Hermiticity checks on assembled operators.
HERMITICITY_ATOL = 1e-12

#: Largest qubit count accepted for dense spectral work (dimension 2**12).
MAX_DENSE_QUBITS = 12

PAULI_MATRICES = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_IDENTITY_2 = np.eye(2, dtype=complex)


class NonHermitianError(ValueError):
    """Raised when an operator fails the Hermiticity tolerance."""


class DimensionMismatchError(ValueError):
    """Raised when operands do not share a common dimension or length."""


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string, e.g. ``-J * Z_0 Z_1``.

    Parameters
    ----------
    coefficient:
        Real weight of the string.
    factors:
        Sequence of ``(site, axis)`` pairs with distinct sites and axis one of
        ``"X"``, ``"Y"``, ``"Z"``.  An empty sequence is the scaled identity.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        coefficient = float(self.coefficient)
        if not np.isfinite(coefficient):
            raise ValueError("PauliTerm coefficient must be finite")
        factors = tuple((int(site), str(axis).upper()) for site, axis in self.factors)
        sites = [site for site, _ in factors]
        if any(site < 0 for site in sites):
            raise ValueError("site indices must be non-negative")
        if len(set(sites)) != len(sites):
            raise ValueError(f"site indices within a term must be distinct, got {sites}")
        for _, axis in factors:
            if axis not in PAULI_MATRICES:
                raise ValueError(f"unknown Pauli axis {axis!r}, expected one of X, Y, Z")
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "factors", factors)

    def matrix(self, num_qubits: int) -> np.ndarray:
        """Dense matrix of the term on ``num_qubits`` qubits."""
        if any(site >= num_qubits for site, _ in self.factors):
            raise ValueError("term acts on a site outside the register")
        by_site = dict(self.factors)
        out = np.array([[self.coefficient]], dtype=complex)
        for site in range(num_qubits):
            factor = PAULI_MATRICES[by_site[site]] if site in by_site else _IDENTITY_2
            out = np.kron(out, factor)
        return out


@dataclass(frozen=True)
class ParamHamiltonian:
    """Linearly parameterized Hamiltonian ``H_0 + sum_m theta_m H_m``.

    ``generators[m]`` is the list of Pauli terms whose sum is
    ``H_m = dH/dtheta_m``; it does not depend on theta.
    """

    num_qubits: int
    fixed_terms: tuple[PauliTerm, ...]
    generators: tuple[tuple[PauliTerm, ...], ...]
    param_names: tuple[str, ...]

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        fixed_terms = tuple(self.fixed_terms)
        generators = tuple(tuple(terms) for terms in self.generators)
        param_names = tuple(str(name) for name in self.param_names)
        if len(generators) < 1:
            raise ValueError("at least one generator is required")
        if len(param_names) != len(generators):
            raise ValueError("param_names must match the number of generators")
        for term in fixed_terms + tuple(t for terms in generators for t in terms):
            if any(site >= self.num_qubits for site, _ in term.factors):
                raise ValueError(
                    f"term {term.factors} acts outside a {self.num_qubits}-qubit register")
        object.__setattr__(self, "fixed_terms", fixed_terms)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "param_names", param_names)

    @property
    def num_params(self) -> int:
        return len(self.generators)

    @property
    def dimension(self) -> int:
        return 2 ** self.num_qubits


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix; validated on construction."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {entries.shape}")
        scale = max(1.0, float(np.abs(entries).max(initial=0.0)))
        drift = float(np.abs(entries - entries.conj().T).max(initial=0.0))
        if drift > HERMITICITY_ATOL * scale:
            raise NonHermitianError(
                f"operator deviates from Hermiticity by {drift:.3e} (max-norm)")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition: ascending eigenvalues, eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        eigenvectors = np.asarray(self.eigenvectors, dtype=complex)
        if eigenvalues.ndim != 1 or eigenvectors.shape != (eigenvalues.size,) * 2:
            raise ValueError("inconsistent spectrum shapes")
        if np.any(np.diff(eigenvalues) < 0):
            raise ValueError("eigenvalues must be nondecreasing")
        eigenvalues.setflags(write=False)
        eigenvectors.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "eigenvectors", eigenvectors)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size


def assemble(model: ParamHamiltonian, theta: Sequence[float]) -> HermitianOperator:
    """Assemble ``H(theta) = H_0 + sum_m theta_m H_m`` as a dense matrix."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != model.num_params:
        raise DimensionMismatchError(
            f"theta has length {theta.size}, model has {model.num_params} parameters")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    total = np.zeros((model.dimension, model.dimension), dtype=complex)
    for term in model.fixed_terms:
        total += term.matrix(model.num_qubits)
    for value, terms in zip(theta, model.generators):
        for term in terms:
            total += value * term.matrix(model.num_qubits)
    return HermitianOperator(total)


def assemble_generator(model: ParamHamiltonian, mu: int) -> HermitianOperator:
    """Dense matrix of the generator ``H_mu``; independent of theta."""
    if not 0 <= mu < model.num_params:
        raise IndexError(f"generator index {mu} out of range [0, {model.num_params})")
    total = np.zeros((model.dimension, model.dimension), dtype=complex)
    for term in model.generators[mu]:
        total += term.matrix(model.num_qubits)
    return HermitianOperator(total)


def eigendecompose(op: HermitianOperator) -> Spectrum:
    """Full spectral decomposition of a Hermitian operator.

    The matrix is symmetrized as ``(A + A^dagger)/2`` before the solver to
    suppress rounding drift from tensor-product assembly.
    """
    sym = 0.5 * (op.entries + op.entries.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def spectral_spread(op: HermitianOperator) -> float:
    """Spectral spread ``lambda_max - lambda_min`` (>= 0)."""
    sym = 0.5 * (op.entries + op.entries.conj().T)
    eigenvalues = np.linalg.eigvalsh(sym)
    return float(eigenvalues[-1] - eigenvalues[0])


def commutator(a: HermitianOperator, b: HermitianOperator) -> np.ndarray:
    """Commutator ``ab - ba`` (anti-Hermitian complex matrix)."""
    if a.dimension != b.dimension:
        raise DimensionMismatchError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}")
    return a.entries @ b.entries - b.entries @ a.entries
