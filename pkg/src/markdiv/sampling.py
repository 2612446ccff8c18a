"""Seeded random generators, Hamiltonians and channels for property sweeps."""

import numpy as np

from .superop import LindbladGenerator, QuantumChannel, Superoperator, kraus_superoperator


def ginibre(d, rng, shape=None):
    """Matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1)."""
    shape = (d, d) if shape is None else shape
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_lindbladian(d, rng, *, frobenius=None, traceless=False):
    L = ginibre(d, rng)
    if traceless:
        L = L - np.trace(L) / d * np.eye(d)
    if frobenius is not None:
        L = L * (frobenius / np.linalg.norm(L))
    return L


def random_normal_lindbladian(d, rng):
    """``U diag(z) U^dagger`` with Haar-ish unitary ``U`` and Gaussian ``z``."""
    U = random_unitary(d, rng)
    z = ginibre(d, rng, shape=(d,))
    return (U * z) @ U.conj().T


def random_hamiltonian(d, rng, *, scale=1.0):
    A = ginibre(d, rng)
    return scale * (A + A.conj().T) / 2


def random_unitary(d, rng):
    Q, R = np.linalg.qr(ginibre(d, rng))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_lindblad_generator(d, rng, *, n_lindbladians=1, scale=1.0, hamiltonian=True):
    """Random GKLS generator, each Lindbladian of Frobenius norm ``scale``."""
    H = random_hamiltonian(d, rng, scale=scale) if hamiltonian else np.zeros((d, d), complex)
    Ls = tuple(random_lindbladian(d, rng, frobenius=scale) for _ in range(n_lindbladians))
    return LindbladGenerator(H, Ls)


def random_stinespring_channel(d, rng, env_dim=None) -> QuantumChannel:
    """Channel from a random isometry C^d -> C^d (x) C^env_dim."""
    env_dim = d if env_dim is None else env_dim
    V, _ = np.linalg.qr(ginibre(d * env_dim, rng, shape=(d * env_dim, d)))
    kraus = [V[e * d:(e + 1) * d, :] for e in range(env_dim)]
    return QuantumChannel.from_superop(kraus_superoperator(kraus))


def random_unital_channel(d, rng, n_unitaries=3) -> QuantumChannel:
    """Random mixture of unitary conjugations."""
    w = rng.dirichlet(np.ones(n_unitaries))
    M = sum(wi * np.kron(U.conj(), U) for wi, U in
            zip(w, (random_unitary(d, rng) for _ in range(n_unitaries))))
    return QuantumChannel.from_superop(Superoperator(d, M))
