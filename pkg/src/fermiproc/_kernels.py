"""Hot inner loops, compiled with numba when available.

Set ``FERMIPROC_NUMBA=0`` in the environment before import to force the
pure-numpy implementations.  Both variants are always importable under the
``*_numba`` / ``*_numpy`` names so the benchmark can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("FERMIPROC_NUMBA", "1").lower() not in ("0", "false", "no", "off")

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _WANT_NUMBA

STRATEGY_NONE = 0
STRATEGY_CYCLIC = 1
STRATEGY_SWAP = 2


# ---------------------------------------------------------------------------
# ladder-operator images of basis states
# ---------------------------------------------------------------------------

def ladder_image_numpy(states, creators, annihilators):
    """Image of each basis state under ``c+_{C0} c+_{C1} ... c_{A0} c_{A1} ...``.

    Returns ``(targets, signs)``; ``targets`` is -1 where the state is
    annihilated.  Operators act right to left with the sign convention
    ``(-1)**(number of occupied modes below the acted-on mode)``.
    """
    s = np.asarray(states, dtype=np.int64).copy()
    sign = np.ones(s.shape[0], dtype=np.float64)
    alive = np.ones(s.shape[0], dtype=np.bool_)
    ops = [(int(m), False) for m in annihilators[::-1]] + [(int(m), True) for m in creators[::-1]]
    for mode, create in ops:
        bit = np.int64(1) << np.int64(mode)
        occ = (s & bit) != 0
        alive &= ~occ if create else occ
        below = np.bitwise_count(s & (bit - 1)).astype(np.int64)
        sign *= np.where(below & 1, -1.0, 1.0)
        s = s | bit if create else s & ~bit
    targets = np.where(alive, s, -1)
    return targets, np.where(alive, sign, 0.0)


def apply_two_level_numpy(amps, idx_a, idx_b, signs, u, cols):
    """In-place 2x2 rotation on row pairs ``(a, b)`` of ``amps[:, cols]``.

    The block is ``u`` for sign +1 and ``diag(1,-1) u diag(1,-1)`` for -1.
    """
    if idx_a.size == 0:
        return
    x = amps[np.ix_(idx_a, cols)]
    y = amps[np.ix_(idx_b, cols)]
    s = signs[:, None]
    amps[np.ix_(idx_a, cols)] = u[0, 0] * x + s * u[0, 1] * y
    amps[np.ix_(idx_b, cols)] = s * u[1, 0] * x + u[1, 1] * y


def _bonds(L, parity):
    if L == 2:
        return np.array([[0, 1]], dtype=np.int64)
    xs = np.arange(parity, L, 2)
    if L % 2:
        xs = xs[xs + 1 < L]
    return np.stack([xs, (xs + 1) % L], axis=1).astype(np.int64)


def _bond_table(L):
    # (2, nb, 2) padded with -1 so the compiled loop sees a fixed shape
    b0, b1 = _bonds(L, 0), _bonds(L, 1)
    nb = max(len(b0), len(b1))
    out = -np.ones((2, nb, 2), dtype=np.int64)
    out[0, : len(b0)] = b0
    out[1, : len(b1)] = b1
    return out


def floquet_fidelities_numpy(w0, h, c, s, strategy, rounds, renorm_every):
    """Evolve occupied columns with and without disorder; fidelity per round.

    ``w0`` is the (L, N) block of initially occupied single-particle columns.
    Round ``t`` applies the bond layer of parity ``t % 2`` and then the
    disorder phases ``exp(-i h[sigma_t(x)])``.
    """
    L = w0.shape[0]
    bonds = _bond_table(L)
    ideal = w0.astype(np.complex128).copy()
    noisy = ideal.copy()
    sigma = np.arange(L)
    fid = np.empty(rounds)
    for t in range(rounds):
        p = t % 2
        bl = bonds[p]
        bl = bl[bl[:, 0] >= 0]
        i, j = bl[:, 0], bl[:, 1]
        for w in (ideal, noisy):
            xi, xj = w[i].copy(), w[j].copy()
            w[i] = c * xi - 1j * s * xj
            w[j] = -1j * s * xi + c * xj
        if strategy == STRATEGY_CYCLIC:
            sigma = (np.arange(L) - t) % L
        noisy *= np.exp(-1j * h[sigma])[:, None]
        if strategy == STRATEGY_SWAP:
            nxt = sigma.copy()
            nxt[i] = sigma[j]
            nxt[j] = sigma[i]
            sigma = nxt
        if renorm_every > 0 and (t + 1) % renorm_every == 0:
            for w in (ideal, noisy):
                uu, _, vh = np.linalg.svd(w, full_matrices=False)
                w[:] = uu @ vh
        m = ideal.conj().T @ noisy
        fid[t] = abs(np.linalg.det(m)) ** 2
    return fid


if HAVE_NUMBA:

    @njit(cache=True)
    def _ladder_image_nb(states, creators, annihilators):
        n = states.shape[0]
        targets = np.empty(n, dtype=np.int64)
        signs = np.empty(n, dtype=np.float64)
        for k in range(n):
            st = states[k]
            sg = 1.0
            ok = True
            for q in range(annihilators.shape[0] - 1, -1, -1):
                m = annihilators[q]
                bit = np.int64(1) << m
                if (st & bit) == 0:
                    ok = False
                    break
                below = st & (bit - 1)
                cnt = 0
                while below:
                    below &= below - 1
                    cnt += 1
                if cnt & 1:
                    sg = -sg
                st &= ~bit
            if ok:
                for q in range(creators.shape[0] - 1, -1, -1):
                    m = creators[q]
                    bit = np.int64(1) << m
                    if (st & bit) != 0:
                        ok = False
                        break
                    below = st & (bit - 1)
                    cnt = 0
                    while below:
                        below &= below - 1
                        cnt += 1
                    if cnt & 1:
                        sg = -sg
                    st |= bit
            if ok:
                targets[k] = st
                signs[k] = sg
            else:
                targets[k] = -1
                signs[k] = 0.0
        return targets, signs

    def ladder_image_numba(states, creators, annihilators):
        return _ladder_image_nb(
            np.ascontiguousarray(states, dtype=np.int64),
            np.asarray(creators, dtype=np.int64),
            np.asarray(annihilators, dtype=np.int64),
        )

    @njit(cache=True)
    def apply_two_level_numba(amps, idx_a, idx_b, signs, u, cols):
        u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        for p in range(idx_a.shape[0]):
            a = idx_a[p]
            b = idx_b[p]
            s = signs[p]
            for q in range(cols.shape[0]):
                cc = cols[q]
                x = amps[a, cc]
                y = amps[b, cc]
                amps[a, cc] = u00 * x + s * u01 * y
                amps[b, cc] = s * u10 * x + u11 * y

    @njit(cache=True)
    def _floquet_nb(w0, h, c, s, strategy, rounds, renorm_every, bonds):
        L = w0.shape[0]
        N = w0.shape[1]
        ideal = w0.copy()
        noisy = w0.copy()
        sigma = np.arange(L)
        nxt = np.arange(L)
        fid = np.empty(rounds)
        phase = np.empty(L, dtype=np.complex128)
        for t in range(rounds):
            p = t % 2
            for k in range(bonds.shape[1]):
                i = bonds[p, k, 0]
                if i < 0:
                    continue
                j = bonds[p, k, 1]
                for col in range(N):
                    xi = ideal[i, col]
                    xj = ideal[j, col]
                    ideal[i, col] = c * xi - 1j * s * xj
                    ideal[j, col] = -1j * s * xi + c * xj
                    xi = noisy[i, col]
                    xj = noisy[j, col]
                    noisy[i, col] = c * xi - 1j * s * xj
                    noisy[j, col] = -1j * s * xi + c * xj
            if strategy == 1:
                for x in range(L):
                    sigma[x] = (x - t) % L
            for x in range(L):
                phase[x] = np.exp(-1j * h[sigma[x]])
            for x in range(L):
                for col in range(N):
                    noisy[x, col] *= phase[x]
            if strategy == 2:
                for x in range(L):
                    nxt[x] = sigma[x]
                for k in range(bonds.shape[1]):
                    i = bonds[p, k, 0]
                    if i < 0:
                        continue
                    j = bonds[p, k, 1]
                    nxt[i] = sigma[j]
                    nxt[j] = sigma[i]
                for x in range(L):
                    sigma[x] = nxt[x]
            if renorm_every > 0 and (t + 1) % renorm_every == 0:
                uu, _, vh = np.linalg.svd(ideal, full_matrices=False)
                ideal = uu @ vh
                uu, _, vh = np.linalg.svd(noisy, full_matrices=False)
                noisy = uu @ vh
            m = ideal.conj().T @ noisy
            fid[t] = abs(np.linalg.det(m)) ** 2
        return fid

    def floquet_fidelities_numba(w0, h, c, s, strategy, rounds, renorm_every):
        return _floquet_nb(
            np.ascontiguousarray(w0, dtype=np.complex128),
            np.ascontiguousarray(h, dtype=np.float64),
            float(c),
            float(s),
            int(strategy),
            int(rounds),
            int(renorm_every),
            _bond_table(w0.shape[0]),
        )


if USE_NUMBA:
    ladder_image = ladder_image_numba
    apply_two_level = apply_two_level_numba
    floquet_fidelities = floquet_fidelities_numba
else:
    ladder_image = ladder_image_numpy
    apply_two_level = apply_two_level_numpy
    floquet_fidelities = floquet_fidelities_numpy

bonds = _bonds
