"""Exact QFI matrices of Gibbs states, SLDs, attainability diagnostics, and
two independent cross-check oracles.

The production route evaluates, in the Hamiltonian eigenbasis,

    F_{mu,nu} / beta^2 = sum_{ij} w_ij Re[conj(G^mu_ij) G^nu_ij]
                         - <H_mu> <H_nu>,

where ``G^mu = V^dagger H_mu V`` and ``w`` is the COMPOSED weight matrix of
:mod:`thermoqfi.thermal` (diagonal entries p_i).  This is an O(M^2 d^2) sum;
the superoperators are never materialized as d^2 x d^2 matrices.

``qfi_oracle_fd`` is deliberately independent of that route: it forms the full
Gibbs density matrix, differentiates it by central finite differences, and
uses the symmetric-logarithmic-derivative spectral representation

    F_{mu,nu} = sum_{ij} 2 Re[<i|drho_mu|j><j|drho_nu|i>] / (p_i + p_j).

``logZ_hessian_fd`` is a second oracle: the Hessian of ln Z(theta), which
equals the QFI whenever the fixed part and all generators commute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import (
    MAX_DENSE_QUBITS,
    DimensionMismatchError,
    HermitianOperator,
    ParamHamiltonian,
    assemble,
    assemble_generator,
    eigendecompose,
)
from .thermal import SuperopKind, ThermalState, gibbs, weight_matrix

#: Commutator spectral norms at or below 1e-10 * (1 + |A| |B|) count as zero.
COMMUTE_ZERO_RTOL = 1e-10

#: Eigenbasis pairs with p_i + p_j below this are dropped from the SLD sum.
_SLD_PAIR_FLOOR = 1e-12


@dataclass(frozen=True)
class QfiMatrix:
    """Real symmetric positive-semidefinite M x M Fisher information matrix."""

    entries: np.ndarray
    beta: float
    theta: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        m = theta.size
        if entries.shape != (m, m):
            raise ValueError(f"expected a {m}x{m} matrix, got shape {entries.shape}")
        scale = float(np.abs(entries).max(initial=0.0))
        asym = float(np.abs(entries - entries.T).max(initial=0.0))
        if asym > 1e-9 * max(scale, 1e-30):
            raise ValueError(f"QFI matrix asymmetric by {asym:.3e} (relative max-norm)")
        entries = 0.5 * (entries + entries.T)
        eigenvalues = np.linalg.eigvalsh(entries)
        if eigenvalues[0] < -1e-9 * (1.0 + max(eigenvalues[-1], 0.0)):
            raise ValueError(
                f"QFI matrix not positive semidefinite (min eigenvalue {eigenvalues[0]:.3e})")
        entries.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "theta", theta)

    @property
    def num_params(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class AttainabilityReport:
    """Commutation diagnostics for simultaneous multiparameter estimation.

    ``weak[m, n] = Im Tr(rho [L_m, L_n])`` (antisymmetric); vanishing weak
    commutators are sufficient for joint attainability of the per-parameter
    bounds.  ``strong[m, n]`` is the spectral norm of ``[L_m, L_n]``
    (symmetric, zero diagonal); vanishing strong commutators additionally
    yield a common optimal measurement basis.  The boolean conditions test
    ``[H, H_m] = 0`` and ``[H_m, H_n] = 0`` at the commutator-norm threshold.
    """

    weak: np.ndarray
    strong: np.ndarray
    cond_H_commute: np.ndarray
    cond_gen_commute: np.ndarray


def _prepared(model: ParamHamiltonian, theta, beta: float):
    """Shared spectral data: spectrum, state, eigenbasis generators, means."""
    theta = np.asarray(theta, dtype=float).ravel()
    if not np.all(np.isfinite(theta)) or not np.isfinite(beta):
        raise ValueError("theta and beta must be finite")
    if model.num_qubits > MAX_DENSE_QUBITS:
        raise ValueError(
            f"{model.num_qubits} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")
    spectrum = eigendecompose(assemble(model, theta))
    state = gibbs(spectrum, beta)
    v = spectrum.eigenvectors
    gens = np.stack([v.conj().T @ assemble_generator(model, m).entries @ v
                     for m in range(model.num_params)])
    means = np.einsum("i,mii->m", state.probs, gens).real
    return theta, spectrum, state, gens, means


def qfi_matrix(model: ParamHamiltonian, theta: Sequence[float], beta: float) -> QfiMatrix:
    """Exact QFI matrix of the Gibbs state of ``H(theta)`` at ``beta > 0``."""
    if beta <= 0.0:
        raise ValueError("beta must be positive for a QFI evaluation")
    theta, _, state, gens, means = _prepared(model, theta, beta)
    w = weight_matrix(state, SuperopKind.COMPOSED)
    covariance = np.einsum("mij,nij,ij->mn", gens.conj(), gens, w).real
    entries = beta ** 2 * (covariance - np.outer(means, means))
    return QfiMatrix(entries=entries, beta=beta, theta=theta)


def quadratic_form(f: QfiMatrix, n: Sequence[float]) -> float:
    """``n^T F n`` for the direction ``n``, used exactly as given."""
    n = np.asarray(n, dtype=float).ravel()
    if n.size != f.num_params:
        raise DimensionMismatchError(
            f"direction has length {n.size}, matrix is {f.num_params}x{f.num_params}")
    if not np.any(n != 0.0):
        raise ValueError("direction vector must be nonzero")
    return float(n @ f.entries @ n)


def effective_generator(model: ParamHamiltonian, n: Sequence[float]) -> HermitianOperator:
    """Weighted generator sum ``sum_m n_m H_m``."""
    n = np.asarray(n, dtype=float).ravel()
    if n.size != model.num_params:
        raise DimensionMismatchError(
            f"weights have length {n.size}, model has {model.num_params} parameters")
    total = np.zeros((model.dimension, model.dimension), dtype=complex)
    for weight, mu in zip(n, range(model.num_params)):
        if weight != 0.0:
            total += weight * assemble_generator(model, mu).entries
    return HermitianOperator(total)


def gibbs_derivative(model: ParamHamiltonian, theta: Sequence[float], beta: float,
                     mu: int) -> HermitianOperator:
    """Parameter derivative of the Gibbs state,
    ``drho_mu = -J_L[beta H_mu] + rho Tr[beta H_mu rho]``, in dense form."""
    if not 0 <= mu < model.num_params:
        raise IndexError(f"parameter index {mu} out of range")
    _, spectrum, state, gens, means = _prepared(model, theta, beta)
    wl = weight_matrix(state, SuperopKind.KUBO_MORI)
    in_basis = -beta * wl * gens[mu] + beta * means[mu] * np.diag(state.probs)
    v = spectrum.eigenvectors
    return HermitianOperator(v @ in_basis @ v.conj().T)


def _sld_in_basis(state: ThermalState, gen: np.ndarray, mean: float, beta: float) -> np.ndarray:
    """Eigenbasis matrix of ``L_mu = J_B^{-1}[drho_mu]``."""
    p = state.probs
    wl = weight_matrix(state, SuperopKind.KUBO_MORI)
    rho_dot = -beta * wl * gen + beta * mean * np.diag(p)
    pair = p[:, None] + p[None, :]
    scale = np.where(pair >= _SLD_PAIR_FLOOR, 2.0 / np.maximum(pair, _SLD_PAIR_FLOOR), 0.0)
    return scale * rho_dot


def sld(model: ParamHamiltonian, theta: Sequence[float], beta: float,
        mu: int) -> HermitianOperator:
    """Symmetric logarithmic derivative ``L_mu``.

    Solves ``(rho L + L rho) / 2 = drho_mu`` in the eigenbasis of rho; the
    defining relation holds to the accuracy of the spectral decomposition.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if not 0 <= mu < model.num_params:
        raise IndexError(f"parameter index {mu} out of range")
    _, spectrum, state, gens, means = _prepared(model, theta, beta)
    l_basis = _sld_in_basis(state, gens[mu], means[mu], beta)
    v = spectrum.eigenvectors
    return HermitianOperator(v @ l_basis @ v.conj().T)


def attainability(model: ParamHamiltonian, theta: Sequence[float],
                  beta: float) -> AttainabilityReport:
    """Weak/strong SLD commutation matrices plus generator commutation flags."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    theta, spectrum, state, gens, means = _prepared(model, theta, beta)
    m_params = model.num_params
    v = spectrum.eigenvectors
    slds = [v @ _sld_in_basis(state, gens[m], means[m], beta) @ v.conj().T
            for m in range(m_params)]
    rho = state.density_matrix()

    weak = np.zeros((m_params, m_params))
    strong = np.zeros((m_params, m_params))
    for m in range(m_params):
        for n in range(m + 1, m_params):
            comm = slds[m] @ slds[n] - slds[n] @ slds[m]
            value = np.trace(rho @ comm).imag
            weak[m, n] = value
            weak[n, m] = -value
            norm = float(np.linalg.norm(comm, 2))
            strong[m, n] = strong[n, m] = norm

    hamiltonian = assemble(model, theta).entries
    gen_dense = [assemble_generator(model, m).entries for m in range(m_params)]
    h_norm = float(np.linalg.norm(hamiltonian, 2))
    gen_norms = [float(np.linalg.norm(g, 2)) for g in gen_dense]

    def _commutes(a, b, norm_a, norm_b):
        comm_norm = float(np.linalg.norm(a @ b - b @ a, 2))
        return comm_norm <= COMMUTE_ZERO_RTOL * (1.0 + norm_a * norm_b)

    cond_h = np.array([_commutes(hamiltonian, g, h_norm, gn)
                       for g, gn in zip(gen_dense, gen_norms)])
    cond_gen = np.empty((m_params, m_params), dtype=bool)
    for m in range(m_params):
        for n in range(m_params):
            cond_gen[m, n] = _commutes(gen_dense[m], gen_dense[n],
                                       gen_norms[m], gen_norms[n])
    for arr in (weak, strong, cond_h, cond_gen):
        arr.setflags(write=False)
    return AttainabilityReport(weak=weak, strong=strong,
                               cond_H_commute=cond_h, cond_gen_commute=cond_gen)


def optimal_measurement(model: ParamHamiltonian, theta: Sequence[float], beta: float,
                        mu: int) -> list[np.ndarray]:
    """Rank-1 projectors onto the eigenvectors of ``L_mu``.

    Projective measurement in this basis attains the single-parameter bound
    for ``theta_mu``; completeness ``sum_k P_k = 1`` holds to solver accuracy.
    """
    l_mu = sld(model, theta, beta, mu)
    _, vectors = np.linalg.eigh(l_mu.entries)
    return [np.outer(vectors[:, k], vectors[:, k].conj())
            for k in range(vectors.shape[1])]


def qfi_oracle_fd(model: ParamHamiltonian, theta: Sequence[float], beta: float,
                  step: float | None = None) -> QfiMatrix:
    """Finite-difference QFI oracle, independent of the weight-matrix route.

    Builds the full Gibbs density matrix, forms ``drho_mu`` by central
    differences of step ``step`` (default ``1e-5 * max(1, |theta|_inf)``), and
    sums the SLD spectral representation.  Pairs with ``p_i + p_j < 1e-12``
    are excluded.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if step is None:
        step = 1e-5 * max(1.0, float(np.abs(theta).max(initial=0.0)))
    if step <= 0.0:
        raise ValueError("step must be positive")
    if beta <= 0.0:
        raise ValueError("beta must be positive")

    def rho_at(point):
        spectrum = eigendecompose(assemble(model, point))
        return gibbs(spectrum, beta).density_matrix()

    _, spectrum, state, _, _ = _prepared(model, theta, beta)
    v = spectrum.eigenvectors
    derivs = []
    for m in range(model.num_params):
        shift = np.zeros_like(theta)
        shift[m] = step
        drho = (rho_at(theta + shift) - rho_at(theta - shift)) / (2.0 * step)
        derivs.append(v.conj().T @ drho @ v)
    derivs = np.stack(derivs)

    pair = state.probs[:, None] + state.probs[None, :]
    w = np.where(pair >= _SLD_PAIR_FLOOR, 2.0 / np.maximum(pair, _SLD_PAIR_FLOOR), 0.0)
    entries = np.einsum("mij,nij,ij->mn", derivs, derivs.conj(), w).real
    return QfiMatrix(entries=entries, beta=beta, theta=theta)


def log_partition(model: ParamHamiltonian, theta: Sequence[float], beta: float) -> float:
    """``ln Tr exp(-beta H(theta))`` from the dense spectrum (max-shifted).

    The shifted log-sum-exp runs in extended precision: ``logZ_hessian_fd``
    divides rounding noise of this value by its squared step.
    """
    op = assemble(model, theta)
    energies = np.linalg.eigvalsh(0.5 * (op.entries + op.entries.conj().T))
    energies = energies.astype(np.longdouble)
    shifted = -np.longdouble(beta) * (energies - energies[0])
    return float(-np.longdouble(beta) * energies[0] + np.log(np.sum(np.exp(shifted))))


def logZ_hessian_fd(model: ParamHamiltonian, theta: Sequence[float], beta: float,
                    step: float | None = None) -> np.ndarray:
    """Central-difference Hessian of ``ln Z(theta)``.

    Equals the QFI matrix whenever the fixed part and all generators mutually
    commute; for non-commuting models the two differ and no equality is
    implied.  Default step ``1e-4 * max(1, |theta|_inf)``.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if step is None:
        step = 1e-4 * max(1.0, float(np.abs(theta).max(initial=0.0)))
    if step <= 0.0:
        raise ValueError("step must be positive")
    m_params = model.num_params

    def f(point):
        return log_partition(model, point, beta)

    base = f(theta)
    hessian = np.empty((m_params, m_params))
    for m in range(m_params):
        e_m = np.zeros_like(theta)
        e_m[m] = step
        hessian[m, m] = (f(theta + e_m) - 2.0 * base + f(theta - e_m)) / step ** 2
        for n in range(m + 1, m_params):
            e_n = np.zeros_like(theta)
            e_n[n] = step
            value = (f(theta + e_m + e_n) - f(theta + e_m - e_n)
                     - f(theta - e_m + e_n) + f(theta - e_m - e_n)) / (4.0 * step ** 2)
            hessian[m, n] = hessian[n, m] = value
    return hessian
