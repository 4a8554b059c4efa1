"""Sensitivity bounds: finite-temperature covariance bound, Heisenberg-limit
matrix with its saturating GHZ state, and zero-temperature gap bounds.

Bound chain (for directions ``n`` and Gibbs states at inverse temperature
beta):

    n^T F n  <=  beta^2 n^T Gamma n  <=  beta^2 spread(H^e)^2 / 4,

where ``Gamma`` is the symmetrized connected covariance of the generators and
``H^e = sum_m n_m H_m``.  The first inequality holds for any model (the
composed thermal weights never exceed the Bogoliubov weights); the second is
the state-maximized variance.  For M blocks of ``N_m`` disjoint local +-1/2
generators, ``spread(H^e) = sum_m |n_m| N_m`` and the right-hand side is the
Heisenberg-limit form ``beta^2 (n . v)^2 / 4`` with ``v_m = sign(n_m) N_m``,
saturated by the GHZ state of the blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .operators import (
    MAX_DENSE_QUBITS,
    DimensionMismatchError,
    ParamHamiltonian,
    Spectrum,
    assemble,
    assemble_generator,
    eigendecompose,
    spectral_spread,
)
from .qfi import effective_generator, qfi_matrix, quadratic_form
from .thermal import ThermalState, gibbs

#: Relative slack for saturation flags.
SATURATION_RTOL = 1e-9

#: Levels within 1e-10 * (1 + spread) of the ground energy count as ground.
GAP_RTOL = 1e-10


class DegenerateGroundStateError(ValueError):
    """Ground level is degenerate; the gap-based formulas do not apply."""


class FullyDegenerateSpectrumError(ValueError):
    """All eigenvalues coincide; there is no gap at all."""


@dataclass(frozen=True)
class GhzSpec:
    """Block sizes and alignment signs of a collective-spin GHZ state."""

    block_sizes: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        block_sizes = tuple(int(n) for n in self.block_sizes)
        signs = tuple(int(s) for s in self.signs)
        if len(block_sizes) != len(signs):
            raise ValueError("block_sizes and signs must have equal length")
        if any(n < 1 for n in block_sizes):
            raise ValueError("block sizes must be >= 1")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "block_sizes", block_sizes)
        object.__setattr__(self, "signs", signs)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def total_qubits(self) -> int:
        return sum(self.block_sizes)

    @property
    def v(self) -> np.ndarray:
        """Extremal-eigenvalue vector ``(sign_1 N_1, ..., sign_M N_M)``."""
        return np.array(self.signs, dtype=float) * np.array(self.block_sizes, dtype=float)


@dataclass(frozen=True)
class BoundReport:
    """Per-direction bound evaluation; ``None`` marks an unavailable zero-T
    block (degenerate ground state)."""

    direction: np.ndarray
    qfi_value: float
    finite_T_bound: float
    gamma_HL_bound: float
    zero_T_limit: float | None
    zero_T_bound: float | None
    gap: float | None
    saturated: dict


def covariance_matrix(state: Union[ThermalState, np.ndarray],
                      model: ParamHamiltonian) -> np.ndarray:
    """Symmetrized connected covariance of the generators,
    ``Gamma_{mn} = Tr[rho (H_m H_n + H_n H_m)/2] - Tr[rho H_m] Tr[rho H_n]``.

    Accepts a ThermalState or a pure-state vector.
    """
    m_params = model.num_params
    gens = [assemble_generator(model, m).entries for m in range(m_params)]
    if isinstance(state, ThermalState):
        if state.dimension != model.dimension:
            raise DimensionMismatchError("state dimension does not match the model")
        v = state.spectrum.eigenvectors
        basis = np.stack([v.conj().T @ g @ v for g in gens])
        raw = np.einsum("i,mij,nji->mn", state.probs, basis, basis)
        means = np.einsum("i,mii->m", state.probs, basis).real
    else:
        psi = np.asarray(state, dtype=complex).ravel()
        if psi.size != model.dimension:
            raise DimensionMismatchError("state vector does not match the model")
        images = np.stack([g @ psi for g in gens])
        raw = images.conj() @ images.T
        means = np.einsum("i,mi->m", psi.conj(), images).real
    gamma = 0.5 * (raw + raw.T.conj()).real - np.outer(means, means)
    return 0.5 * (gamma + gamma.T)


def finite_temperature_bound(model: ParamHamiltonian, theta: Sequence[float],
                             beta: float, n: Sequence[float]) -> float:
    """Covariance upper bound ``beta^2 n^T Gamma(rho_Gibbs, H) n``."""
    n = np.asarray(n, dtype=float).ravel()
    if n.size != model.num_params:
        raise DimensionMismatchError("direction length does not match the model")
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    state = gibbs(eigendecompose(assemble(model, theta)), beta)
    gamma = covariance_matrix(state, model)
    return float(beta ** 2 * (n @ gamma @ n))


def gamma_HL(spec: GhzSpec, n: Sequence[float]) -> float:
    """Heisenberg-limit quadratic form ``(n . v)^2 / 4``.

    The signs of ``spec`` must agree with ``sign(n_k)`` wherever ``n_k`` is
    nonzero (zero entries contribute nothing, so any sign is accepted there).
    """
    n = np.asarray(n, dtype=float).ravel()
    if n.size != spec.num_blocks:
        raise DimensionMismatchError("direction length does not match the block count")
    for k, (weight, sign) in enumerate(zip(n, spec.signs)):
        if weight != 0.0 and int(np.sign(weight)) != sign:
            raise ValueError(f"sign {sign} of block {k} is inconsistent with n_{k}={weight}")
    return float(np.dot(n, spec.v) ** 2 / 4.0)


def gamma_HL_matrix(spec: GhzSpec) -> np.ndarray:
    """Rank-1 Heisenberg-limit matrix ``v v^T / 4``."""
    v = spec.v
    return np.outer(v, v) / 4.0


def ghz_spec_for_direction(block_sizes: Sequence[int], n: Sequence[float]) -> GhzSpec:
    """GhzSpec with signs ``sign(n_k)``; zero entries default to +1."""
    signs = tuple(1 if weight >= 0.0 else -1 for weight in np.asarray(n, dtype=float))
    return GhzSpec(block_sizes=tuple(int(b) for b in block_sizes), signs=signs)


def ghz_state(spec: GhzSpec) -> np.ndarray:
    """Equal superposition of the all-aligned and all-anti-aligned product
    states of the blocks (local +1/2 eigenstate = |0>).

    With site 0 as the most significant bit, the aligned branch sets every
    qubit of block m to |0> when sign_m = +1 and to |1> otherwise; the second
    branch is the global flip.
    """
    total = spec.total_qubits
    if total > MAX_DENSE_QUBITS:
        raise ValueError(f"{total} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")
    bits = []
    for size, sign in zip(spec.block_sizes, spec.signs):
        bits.extend([0 if sign > 0 else 1] * size)
    aligned = 0
    for bit in bits:
        aligned = (aligned << 1) | bit
    anti = (1 << total) - 1 - aligned
    psi = np.zeros(2 ** total, dtype=complex)
    psi[aligned] = psi[anti] = 1.0 / np.sqrt(2.0)
    return psi


def energy_gap(spectrum: Spectrum) -> float:
    """Gap between the two lowest distinct energy levels.

    Raises FullyDegenerateSpectrumError when all eigenvalues coincide and
    DegenerateGroundStateError when the ground level is degenerate.
    """
    energies = spectrum.eigenvalues
    if energies.size < 2:
        raise ValueError("gap requires dimension >= 2")
    spread = float(energies[-1] - energies[0])
    tol = GAP_RTOL * (1.0 + spread)
    if spread <= tol:
        raise FullyDegenerateSpectrumError(
            f"spectrum is fully degenerate within {tol:.3e}")
    gap = float(energies[1] - energies[0])
    if gap <= tol:
        raise DegenerateGroundStateError(
            f"ground level degenerate: E_1 - E_0 = {gap:.3e} <= {tol:.3e}")
    return gap


def zero_temperature_limit(model: ParamHamiltonian, theta: Sequence[float],
                           n: Sequence[float]) -> float:
    """Exact beta -> infinity value of ``n^T F n``,
    ``sum_{i>0} 4 |<0|H^e|i>|^2 / (E_i - E_0)^2`` (unique ground state)."""
    spectrum = eigendecompose(assemble(model, theta))
    energy_gap(spectrum)  # raises on degenerate ground level
    h_eff = effective_generator(model, n)
    ground = spectrum.eigenvectors[:, 0]
    amplitudes = spectrum.eigenvectors.conj().T @ (h_eff.entries @ ground)
    deltas = spectrum.eigenvalues - spectrum.eigenvalues[0]
    tol = GAP_RTOL * (1.0 + float(deltas[-1]))
    excited = deltas > tol
    return float(np.sum(4.0 * np.abs(amplitudes[excited]) ** 2 / deltas[excited] ** 2))


def zero_temperature_bound(model: ParamHamiltonian, theta: Sequence[float],
                           n: Sequence[float]) -> float:
    """Gap bound ``spread(H^e)^2 / Delta^2`` on the zero-temperature limit."""
    spectrum = eigendecompose(assemble(model, theta))
    gap = energy_gap(spectrum)
    spread = spectral_spread(effective_generator(model, n))
    return float(spread ** 2 / gap ** 2)


def heisenberg_bound(model: ParamHamiltonian, n: Sequence[float], beta: float) -> float:
    """State-maximized bound ``beta^2 spread(H^e)^2 / 4``.

    Dominates ``finite_temperature_bound`` for every state; equals
    ``beta^2 gamma_HL`` for disjoint blocks of local +-1/2 generators.
    """
    spread = spectral_spread(effective_generator(model, n))
    return float(beta ** 2 * spread ** 2 / 4.0)


def _is_saturated(value: float, bound: float) -> bool:
    return bound - value <= SATURATION_RTOL * (1.0 + abs(bound))


def evaluate_bounds(model: ParamHamiltonian, theta: Sequence[float], beta: float,
                    n: Sequence[float]) -> BoundReport:
    """Evaluate the full bound chain for one model, point, and direction.

    The zero-temperature block is reported as ``None`` (with no exception)
    when the ground level is degenerate.
    """
    n = np.asarray(n, dtype=float).ravel()
    value = quadratic_form(qfi_matrix(model, theta, beta), n)
    finite_t = finite_temperature_bound(model, theta, beta, n)
    hl = heisenberg_bound(model, n, beta)
    try:
        gap = energy_gap(eigendecompose(assemble(model, theta)))
        zt_limit = zero_temperature_limit(model, theta, n)
        zt_bound = zero_temperature_bound(model, theta, n)
    except (DegenerateGroundStateError, FullyDegenerateSpectrumError):
        gap = zt_limit = zt_bound = None
    saturated = {
        "finite_T": _is_saturated(value, finite_t),
        "gamma_HL": _is_saturated(value, hl),
        "zero_T": (zt_limit is not None and zt_bound is not None
                   and _is_saturated(zt_limit, zt_bound)),
    }
    n.setflags(write=False)
    return BoundReport(direction=n, qfi_value=value, finite_T_bound=finite_t,
                       gamma_HL_bound=hl, zero_T_limit=zt_limit,
                       zero_T_bound=zt_bound, gap=gap, saturated=saturated)
