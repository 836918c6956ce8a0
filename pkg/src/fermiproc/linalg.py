"""Dense linear-algebra helpers shared by the oracles and the equivalence checks."""

from __future__ import annotations

import numpy as np

# Pade(13) coefficients and theta_13 from Higham (2005)
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    Kept independent of ``scipy.linalg.expm`` so it can serve as the oracle
    that closed-form gate actions are checked against.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expm needs a square matrix")
    if n == 0:
        return a.copy()
    norm1 = np.linalg.norm(a, 1)
    s = 0
    if norm1 > _THETA13:
        s = int(np.ceil(np.log2(norm1 / _THETA13)))
        a = a / (2.0**s)
    b = _PADE13
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


def phase_insensitive_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral-norm distance ``||u - e^{i phi} v||`` at the overlap-optimal phase.

    The phase is ``arg tr(v^dag u)``, which minimises the Frobenius distance;
    the returned spectral norm is therefore an upper bound on the true minimum.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    ov = np.vdot(v, u)
    ph = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    return float(np.linalg.norm(u - ph * v, 2))


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def circular_distance(a: float, b: float) -> float:
    """Distance between two phases given as fractions of a full turn."""
    d = (a - b) % 1.0
    return min(d, 1.0 - d)
