"""Construction of random physical two-mode covariance matrices.

Used by the verification suite and the tests: a covariance built as a random
symplectic transformation of a two-mode thermal state is physical by
construction (symplectic eigenvalues >= 1/2) and, whenever the two-mode
squeezing is strong enough, entangled.  Quadrature order (x1, p1, x2, p2),
vacuum variance 1/2.
"""

from __future__ import annotations

import numpy as np


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = j
    return out


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def single_mode_ops(theta: float, r: float) -> np.ndarray:
    """Rotation followed by a squeeze, one mode."""
    return np.diag([np.exp(r), np.exp(-r)]) @ rotation(theta)


def beamsplitter(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def two_mode_squeeze(r: float) -> np.ndarray:
    ch, sh = np.cosh(r), np.sinh(r)
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    return np.block([[ch * eye, sh * z], [sh * z, ch * eye]])


def two_mode_squeezed_cov(r: float) -> np.ndarray:
    """Pure two-mode squeezed vacuum; its PT-symplectic minimum is e^{-2r}/2."""
    s = two_mode_squeeze(r)
    return 0.5 * s @ s.T


def random_symplectic(rng: np.random.Generator, max_squeeze: float = 1.0) -> np.ndarray:
    s1 = single_mode_ops(rng.uniform(0, 2 * np.pi), rng.uniform(-max_squeeze, max_squeeze))
    s2 = single_mode_ops(rng.uniform(0, 2 * np.pi), rng.uniform(-max_squeeze, max_squeeze))
    local = np.block([[s1, np.zeros((2, 2))], [np.zeros((2, 2)), s2]])
    return (
        two_mode_squeeze(rng.uniform(-max_squeeze, max_squeeze))
        @ beamsplitter(rng.uniform(0, 2 * np.pi))
        @ local
    )


def random_physical_cov(
    rng: np.random.Generator,
    max_squeeze: float = 1.0,
    max_thermal: float = 2.0,
) -> np.ndarray:
    """Random physical 4x4 covariance S diag(n1,n1,n2,n2) S^T, n >= 1/2."""
    nu = 0.5 + rng.uniform(0.0, max_thermal, size=2)
    s = random_symplectic(rng, max_squeeze)
    v = s @ np.diag([nu[0], nu[0], nu[1], nu[1]]) @ s.T
    return 0.5 * (v + v.T)
