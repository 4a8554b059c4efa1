"""Canonical model builders and the transfer-matrix solution of the
alternating-field Ising ring.

The ring has ``2N`` sites (indices cyclic modulo 2N), ferromagnetic coupling
``-J sum_i sigma^z_i sigma^z_{i+1}``, field ``B1`` on the even sublattice
(0-based sites 0, 2, ...) and ``B2`` on the odd sublattice.  All terms are
sigma^z-diagonal, so the quantum partition function equals the classical one
and the QFI matrix in (B1, B2) is the Hessian of ``ln Z``.

Transfer-matrix route
---------------------
``Z = Tr[(A_1 C A_2 C)^N]`` with per-site field factors
``A_k = diag(e^{-beta B_k}, e^{+beta B_k})`` and bond factor
``C_{zz'} = e^{beta J z z'}``.  The two-site block has

    trace  t   = 2 e^{2 beta J} cosh(beta (B1+B2))
                 + 2 e^{-2 beta J} cosh(beta (B1-B2)),
    det        = (e^{2 beta J} - e^{-2 beta J})^2,

so its eigenvalues are ``Lambda_+- = t/2 +- sqrt(t^2/4 - det)`` and
``Z = Lambda_+^N + Lambda_-^N``.  ``transfer_lambdas`` returns the per-site
pair ``lambda_+- = sqrt(Lambda_+-)`` so that ``Z = lambda_+^{2N} +
lambda_-^{2N}``.  When ``B1 == B2 == b`` this reduces to the closed form

    lambda_+- = e^{beta J} (cosh(theta) +- sqrt(sinh(theta)^2 + e^{-4 beta J})),
    theta = beta (B1 + B2) / 2,

which depends on the fields only through their mean.  The ``staggered`` flag
of the partition-function and QFI routines selects between the exact
staggered evaluation (default) and the mean-field-collapsed closed form; the
two differ by O(e^{-4 beta J}) relative terms when B1 != B2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import ParamHamiltonian, PauliTerm

#: Step factor for the transfer-matrix finite-difference Hessian.
_HESSIAN_STEP_FACTOR = 1e-4

#: Extended precision for ln Z evaluations inside the Hessian; second
#: differences amplify rounding of ln Z by 1/step^2, and 80-bit floats keep
#: that noise below the cross-validation tolerances.  Falls back silently to
#: float64 on platforms where longdouble is not wider.
_LNZ_DTYPE = np.longdouble


@dataclass(frozen=True)
class IsingConfig:
    """Alternating-field Ising ring: ``2 * n_pairs`` sites, coupling J,
    sublattice fields (B1, B2)."""

    n_pairs: int
    coupling: float
    fields: tuple[float, float]

    def __post_init__(self):
        n_pairs = int(self.n_pairs)
        if n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        coupling = float(self.coupling)
        fields = (float(self.fields[0]), float(self.fields[1]))
        if not (np.isfinite(coupling) and all(np.isfinite(b) for b in fields)):
            raise ValueError("coupling and fields must be finite")
        object.__setattr__(self, "n_pairs", n_pairs)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "fields", fields)


@dataclass(frozen=True)
class TransferResult:
    """Transfer-matrix eigenvalue pair, overflow-safe ln Z, and the 2x2 QFI."""

    lambda_plus: float
    lambda_minus: float
    log_partition: float
    qfi_2x2: np.ndarray

    def __post_init__(self):
        qfi = np.asarray(self.qfi_2x2, dtype=float)
        if qfi.shape != (2, 2):
            raise ValueError("qfi_2x2 must be a 2x2 matrix")
        if self.lambda_plus < self.lambda_minus or self.lambda_minus < 0.0:
            raise ValueError("transfer eigenvalues must satisfy lambda_+ >= lambda_- >= 0")
        qfi.setflags(write=False)
        object.__setattr__(self, "qfi_2x2", qfi)


def ising_alternating(cfg: IsingConfig) -> ParamHamiltonian:
    """Parameterized ring Hamiltonian with generators (B1, B2).

    Generator 0 is ``sum sigma^z`` over even 0-based sites, generator 1 the
    odd-site sum.  For n_pairs = 1 the two cyclic bonds coincide, giving the
    doubled coupling ``-2J sigma^z_0 sigma^z_1``.
    """
    sites = 2 * cfg.n_pairs
    fixed = tuple(PauliTerm(-cfg.coupling, ((i, "Z"), ((i + 1) % sites, "Z")))
                  for i in range(sites))
    even = tuple(PauliTerm(1.0, ((i, "Z"),)) for i in range(0, sites, 2))
    odd = tuple(PauliTerm(1.0, ((i, "Z"),)) for i in range(1, sites, 2))
    return ParamHamiltonian(num_qubits=sites, fixed_terms=fixed,
                            generators=(even, odd), param_names=("B1", "B2"))


def _reduced_block_eigenvalues(j, b1, b2, beta, dtype=float):
    """Eigenvalue pair of the two-site transfer block scaled by e^{-2 beta |J|}.

    The scaling keeps every quantity O(1), so downstream finite differences of
    ln Z are not polluted by rounding of the large coupling bulk 2 N beta |J|
    (restored analytically by the callers).
    """
    j, b1, b2, beta = (dtype(x) for x in (j, b1, b2, beta))
    w = np.exp(-4.0 * beta * np.abs(j))
    sum_arg = beta * (b1 + b2)
    diff_arg = beta * (b1 - b2)
    if j < 0.0:
        sum_arg, diff_arg = diff_arg, sum_arg
    cosh_sum = np.cosh(sum_arg)
    cosh_diff = np.cosh(diff_arg)
    half_trace = cosh_sum + w * cosh_diff
    det = (1.0 - w) ** 2
    # disc = half_trace^2 - det, factored so both factors are sums of
    # non-negative terms; the naive difference cancels near b1 + b2 = 0.
    low = 2.0 * np.sinh(sum_arg / 2.0) ** 2 + w * (cosh_diff + 1.0)
    high = half_trace + (1.0 - w)
    lam_plus = half_trace + np.sqrt(low * high)
    lam_minus = det / lam_plus if lam_plus > 0.0 else dtype(0.0)
    return lam_plus, lam_minus


def transfer_lambdas(j: float, b1: float, b2: float, beta: float) -> tuple[float, float]:
    """Per-site transfer eigenvalue pair of the staggered-field ring.

    ``Z = lambda_+^{2N} + lambda_-^{2N}``.  For equal fields the pair equals
    the uniform-field closed form quoted in the module docstring; lambda_-
    vanishes at J = 0.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    lam_plus, lam_minus = _reduced_block_eigenvalues(j, b1, b2, beta)
    scale = np.exp(beta * abs(j))
    return float(scale * np.sqrt(lam_plus)), float(scale * np.sqrt(lam_minus))


def _transfer_lnz_reduced(j, b1, b2, beta, n_pairs, staggered, dtype=float):
    """``ln Z - 2 N beta |J|``: the field-dependent part of the log partition."""
    if not staggered:
        mean = (b1 + b2) / 2.0
        b1 = b2 = mean
    lam_plus, lam_minus = _reduced_block_eigenvalues(j, b1, b2, beta, dtype=dtype)
    ratio = lam_minus / lam_plus
    return n_pairs * np.log(lam_plus) + np.log1p(ratio ** n_pairs)


def transfer_log_partition(j: float, b1: float, b2: float, beta: float,
                           n_pairs: int, staggered: bool = True) -> float:
    """Overflow-safe ``ln Z = ln(lambda_+^{2N} + lambda_-^{2N})``.

    ``staggered=False`` collapses both fields to their mean before
    evaluating, which makes ln Z a function of B1 + B2 alone.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    bulk = 2.0 * n_pairs * beta * abs(j)
    return float(bulk + _transfer_lnz_reduced(j, b1, b2, beta, n_pairs, staggered))


def transfer_qfi(cfg: IsingConfig, beta: float, n_pairs: int | None = None,
                 staggered: bool = True) -> TransferResult:
    """2x2 QFI matrix in (B1, B2) from the transfer-matrix ln Z.

    The Hessian is taken by central second differences with step
    ``1e-4 * max(1, |B1|, |B2|)``, evaluated in extended precision.  With
    ``staggered=False`` all entries coincide exactly (ln Z depends only on
    B1 + B2); the default staggered route matches dense diagonalization.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    pairs = cfg.n_pairs if n_pairs is None else int(n_pairs)
    if pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    j = cfg.coupling
    b1, b2 = cfg.fields
    step = _HESSIAN_STEP_FACTOR * max(1.0, abs(b1), abs(b2))

    if staggered:
        def f(x, y):
            return _transfer_lnz_reduced(j, x, y, beta, pairs, True, dtype=_LNZ_DTYPE)

        base = f(b1, b2)
        qfi = np.empty((2, 2))
        qfi[0, 0] = float((f(b1 + step, b2) - 2.0 * base + f(b1 - step, b2)) / step ** 2)
        qfi[1, 1] = float((f(b1, b2 + step) - 2.0 * base + f(b1, b2 - step)) / step ** 2)
        mixed = (f(b1 + step, b2 + step) - f(b1 + step, b2 - step)
                 - f(b1 - step, b2 + step) + f(b1 - step, b2 - step)) / (4.0 * step ** 2)
        qfi[0, 1] = qfi[1, 0] = float(mixed)
    else:
        # ln Z depends on the fields only through their mean here, so the
        # Hessian reduces by the chain rule to g''(mean) / 4 in every entry;
        # a single 1-D second difference keeps the entries exactly equal.
        mean = (b1 + b2) / 2.0

        def g(s):
            return _transfer_lnz_reduced(j, s, s, beta, pairs, True, dtype=_LNZ_DTYPE)

        curvature = float((g(mean + step) - 2.0 * g(mean) + g(mean - step)) / step ** 2)
        qfi = np.full((2, 2), curvature / 4.0)

    if staggered:
        lam_plus, lam_minus = transfer_lambdas(j, b1, b2, beta)
    else:
        mean = (b1 + b2) / 2.0
        lam_plus, lam_minus = transfer_lambdas(j, mean, mean, beta)
    log_partition = transfer_log_partition(j, b1, b2, beta, pairs, staggered)
    return TransferResult(lambda_plus=lam_plus, lambda_minus=lam_minus,
                          log_partition=log_partition, qfi_2x2=qfi)


def single_qubit_xyz() -> ParamHamiltonian:
    """``H = theta_1 sigma^x + theta_2 sigma^y + theta_3 sigma^z`` (M = 3)."""
    return ParamHamiltonian(
        num_qubits=1,
        fixed_terms=(),
        generators=(
            (PauliTerm(1.0, ((0, "X"),)),),
            (PauliTerm(1.0, ((0, "Y"),)),),
            (PauliTerm(1.0, ((0, "Z"),)),),
        ),
        param_names=("theta_x", "theta_y", "theta_z"),
    )


def disjoint_blocks_model(block_sizes: Sequence[int]) -> ParamHamiltonian:
    """M generators on disjoint qubit blocks; generator m is
    ``sum_k sigma^z_k / 2`` over its own block of ``N_m`` qubits."""
    sizes = [int(n) for n in block_sizes]
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError("block sizes must be a nonempty list of integers >= 1")
    generators = []
    offset = 0
    for size in sizes:
        generators.append(tuple(PauliTerm(0.5, ((offset + k, "Z"),))
                                for k in range(size)))
        offset += size
    return ParamHamiltonian(num_qubits=offset, fixed_terms=(),
                            generators=tuple(generators),
                            param_names=tuple(f"theta_{m}" for m in range(len(sizes))))


def local_field_chain(num_qubits: int) -> ParamHamiltonian:
    """Single-parameter chain ``H = theta sum_k sigma^z_k / 2``."""
    model = disjoint_blocks_model([num_qubits])
    return ParamHamiltonian(num_qubits=model.num_qubits, fixed_terms=(),
                            generators=model.generators, param_names=("theta",))
