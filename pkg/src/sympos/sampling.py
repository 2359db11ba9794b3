"""Random symplectic matrices and random positive paths for tests and the verifier."""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .constructions import TWO_PI, diag_rotation_loop
from .core import block_diag2, rotation, standard_j, symplectic_inverse
from .paths import SampledPath, _as_times

DEFAULT_SEED = 0xC0FFEE


def make_rng(seed=DEFAULT_SEED) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def spawn(rng: np.random.Generator, n: int) -> list:
    """Independent child generators (``SeedSequence`` spawning)."""
    return [np.random.Generator(np.random.PCG64(s)) for s in rng.bit_generator.seed_seq.spawn(n)]


def random_symmetric(rng, d: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(d, d)) * scale
    return 0.5 * (a + a.T)


def random_pd(rng, d: int, floor: float = 0.2, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(d, d)) * scale
    return a @ a.T / d + floor * np.eye(d)


def random_symplectic(rng, half_dim: int, scale: float = 0.5) -> np.ndarray:
    """``exp(J S)`` for a random symmetric ``S``."""
    J = standard_j(half_dim)
    return scipy.linalg.expm(J @ random_symmetric(rng, 2 * half_dim, scale))


def random_sp4_mixed(rng) -> np.ndarray:
    """Random Sp(4) element drawn from a mix of stratum types."""
    kind = rng.integers(5)
    if kind == 0:
        return random_symplectic(rng, 2, 1.0)
    if kind == 1:
        # elliptic blocks: O_U
        return block_diag2(rotation(rng.uniform(0.2, 3.0)), rotation(rng.uniform(-3.0, -0.2)))
    if kind == 2:
        lam, mu = rng.uniform(1.2, 4.0, size=2) * rng.choice([-1, 1], size=2)
        return np.diag([lam, 1 / lam, mu, 1 / mu])
    if kind == 3:
        lam = rng.uniform(1.2, 4.0)
        return block_diag2(rotation(rng.uniform(0.2, 3.0)), np.diag([lam, 1 / lam]))
    # complex quadruple
    z = rng.uniform(1.1, 2.0) * np.exp(1j * rng.uniform(0.2, 1.3))
    a, b = z.real, z.imag
    D = np.array([[a, -b, 0, 0], [b, a, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    D[2:, 2:] = np.linalg.inv(D[:2, :2]).T
    # D = diag(Z, Z^{-T}) is symplectic for the pairing between the two blocks;
    # move it to the block-diagonal J by a fixed permutation-type map
    S = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1.0]])
    M = S @ D @ S.T
    return M


def random_pd_schedule(rng, d: int, floor: float = 0.3, modes: int = 2):
    """Smooth random ``P(t) = L(t) L(t)^T + floor I`` with trigonometric ``L``."""
    L0 = rng.normal(size=(d, d)) / np.sqrt(d)
    Ls = [rng.normal(size=(d, d)) / np.sqrt(d) for _ in range(modes)]
    om = rng.uniform(0.5, 2.0, size=modes)
    ph = rng.uniform(0, TWO_PI, size=modes)

    def P(t):
        t = _as_times(t)
        L = np.broadcast_to(L0, (t.size, d, d)).copy()
        for k in range(modes):
            L = L + np.sin(om[k] * t + ph[k])[:, None, None] * Ls[k]
        return L @ np.swapaxes(L, 1, 2) + floor * np.eye(d)

    return P


def random_positive_path(rng, half_dim: int, T: float = TWO_PI, samples: int = 400, start=None,
                         floor: float = 0.3, couple: float = 1.0) -> SampledPath:
    """Integrated positive path with a random smooth PD generator schedule."""
    d = 2 * half_dim
    J = standard_j(half_dim)
    P = random_pd_schedule(rng, d, floor)

    def gen(t):
        return J @ (couple * P(t))

    a0 = np.eye(d) if start is None else np.asarray(start, dtype=float)
    times = np.linspace(0.0, T, samples)
    return SampledPath.from_generator(gen, times, a0, substeps=2)


def random_positive_loop(rng, k: int, l: int, samples: int = 400) -> SampledPath:
    """Conjugate ``X diag(e^{jkt}, e^{jlt}) X^{-1}`` of a positive loop based at I."""
    X = random_symplectic(rng, 2, 0.4)
    Xi = symplectic_inverse(X)
    base = diag_rotation_loop(k, l, samples)

    def func(t):
        return X @ base.func(t) @ Xi

    def gen(t):
        return X @ base.generator(t) @ Xi

    return SampledPath.from_function(func, 0.0, TWO_PI, samples, generator=gen, is_loop=True)
