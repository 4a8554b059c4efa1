"""Shared helpers: Pauli constants, independent oracles, random model factory."""

import numpy as np
import pytest

from thermoqfi import ParamHamiltonian, PauliTerm

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"X": SX, "Y": SY, "Z": SZ}


def kron_chain(factors):
    """Tensor product with factor 0 leftmost (most significant qubit)."""
    out = np.array([[1.0 + 0.0j]])
    for factor in factors:
        out = np.kron(out, factor)
    return out


def dense_term(coefficient, factors, num_qubits):
    """Independent dense expansion of one Pauli term (test-side oracle)."""
    by_site = dict(factors)
    mats = [PAULI[by_site[q]] if q in by_site else I2 for q in range(num_qubits)]
    return coefficient * kron_chain(mats)


def gibbs_rho_expm(hamiltonian, beta):
    """Gibbs density matrix via scipy's expm; independent of the package's
    eigendecomposition route."""
    from scipy.linalg import expm

    shifted = hamiltonian - np.min(np.linalg.eigvalsh(hamiltonian)) * np.eye(
        hamiltonian.shape[0])
    raw = expm(-beta * shifted)
    return raw / np.trace(raw).real


def random_model(rng, num_qubits=None, num_params=None, max_terms=2,
                 with_fixed=True, axes="XYZ"):
    """Random Pauli-term model with 1- and 2-site strings."""
    if num_qubits is None:
        num_qubits = int(rng.integers(1, 4))
    if num_params is None:
        num_params = int(rng.integers(1, 4))

    def terms(count):
        out = []
        for _ in range(count):
            width = int(rng.integers(1, min(2, num_qubits) + 1))
            sites = rng.choice(num_qubits, size=width, replace=False)
            out.append(PauliTerm(float(rng.uniform(-1.0, 1.0)),
                                 tuple((int(s), axes[rng.integers(len(axes))])
                                       for s in sites)))
        return tuple(out)

    fixed = terms(int(rng.integers(1, max_terms + 1))) if with_fixed else ()
    generators = tuple(terms(int(rng.integers(1, max_terms + 1)))
                       for _ in range(num_params))
    return ParamHamiltonian(num_qubits=num_qubits, fixed_terms=fixed,
                            generators=generators,
                            param_names=tuple(f"p{i}" for i in range(num_params)))


def conforming_model(rng, max_blocks=3, max_block_size=3):
    """Model of the local-structure form: each generator is a sum of +-1/2
    single-site operators of a random axis on its own qubit block."""
    blocks = [int(rng.integers(1, max_block_size + 1))
              for _ in range(int(rng.integers(1, max_blocks + 1)))]
    generators = []
    offset = 0
    for size in blocks:
        axis = "XYZ"[rng.integers(3)]
        generators.append(tuple(PauliTerm(0.5, ((offset + k, axis),))
                                for k in range(size)))
        offset += size
    model = ParamHamiltonian(num_qubits=offset, fixed_terms=(),
                             generators=tuple(generators),
                             param_names=tuple(f"p{i}" for i in range(len(blocks))))
    return model, blocks


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)
