"""Jitted trial loop.

Mirrors :mod:`ftthreshold.ftec` and :func:`ftthreshold.montecarlo.run_trial`
gate for gate and draw for draw, so a kernel trial and a reference trial fed
the same generator return the same result.

Register layout of ``q`` (shape ``(12, 2)``, columns bit/phase): data qubits
0..6, cat qubits 7..10, verification ancilla 11.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CAT0 = 7
ANC = 11

CAT_FAILED = -1


@njit(cache=True)
def _e1(q, i, p, g):
    if g.random() < p:
        q[i, 0] ^= g.random() < 0.5
        q[i, 1] ^= g.random() < 0.5


@njit(cache=True)
def _e2(q, i, j, p, g):
    if g.random() < p:
        q[i, 0] ^= g.random() < 0.5
        q[j, 0] ^= g.random() < 0.5
        q[i, 1] ^= g.random() < 0.5
        q[j, 1] ^= g.random() < 0.5


@njit(cache=True)
def _xor(q, s, t, p, g):
    q[t, 0] ^= q[s, 0]
    q[s, 1] ^= q[t, 1]
    _e2(q, s, t, p, g)


@njit(cache=True)
def _had(q, i, p, g):
    _e1(q, i, p, g)
    h = q[i, 0]
    q[i, 0] = q[i, 1]
    q[i, 1] = h


@njit(cache=True)
def _make_cat(q, n, p, g, max_attempts):
    for attempt in range(1, max_attempts + 1):
        for k in range(n):
            q[CAT0 + k, 0] = 0
            q[CAT0 + k, 1] = 0
            _e1(q, CAT0 + k, p, g)
        _e1(q, CAT0, p, g)
        for k in range(1, n):
            _xor(q, CAT0 + k - 1, CAT0 + k, p, g)
        q[ANC, 0] = 0
        q[ANC, 1] = 0
        _e1(q, ANC, p, g)
        _xor(q, CAT0, ANC, p, g)
        _xor(q, CAT0 + n - 1, ANC, p, g)
        _e1(q, ANC, p, g)
        if q[ANC, 0] == 0:
            return attempt
    return CAT_FAILED


@njit(cache=True)
def _syndrome_bit(q, support, basis, p, g, max_cat_attempts):
    n = support.shape[0]
    if _make_cat(q, n, p, g, max_cat_attempts) == CAT_FAILED:
        return -1
    if basis == 0:
        for k in range(n):
            _had(q, CAT0 + k, p, g)
        for k in range(n):
            _xor(q, support[k], CAT0 + k, p, g)
    else:
        for k in range(n):
            _xor(q, CAT0 + k, support[k], p, g)
        for k in range(n):
            _had(q, CAT0 + k, p, g)
    z = 0
    for k in range(n):
        _e1(q, CAT0 + k, p, g)
        z ^= q[CAT0 + k, 0]
    return z


@njit(cache=True)
def _ftec_round(q, comp, one_third, guard, max_meas, round_index, supports, decode, p, g, max_cat_attempts):
    """Returns 0 on success, 1 if aborted at ``max_meas``, -1 on cat failure."""
    a = round_index % 3
    cycle = np.empty(4, dtype=np.int64)
    cycle[0] = a
    cycle[1] = (a + 1) % 3
    cycle[2] = (a + 2) % 3
    cycle[3] = 3
    latest = np.zeros(4, dtype=np.int64)
    last = np.zeros(4, dtype=np.int64)  # ring of the last four readings
    n = 0
    while True:
        if n >= max_meas:
            return 1
        r = cycle[n % 4]
        b = _syndrome_bit(q, supports[r], comp, p, g, max_cat_attempts)
        if b < 0:
            return -1
        latest[r] = b
        last[n % 4] = b
        n += 1
        if one_third and n == 1 and b == 0:
            return 0
        if n >= 4 and (last[0] ^ last[1] ^ last[2] ^ last[3]) == 0:
            if guard:
                # oldest-first view of the ring
                b0 = last[n % 4]
                b1 = last[(n + 1) % 4]
                b2 = last[(n + 2) % 4]
                b3 = last[(n + 3) % 4]
                if b0 == 0 and b1 == 0 and b2 == 1 and b3 == 1:
                    continue
            break
    z = decode[(latest[0] << 2) | (latest[1] << 1) | latest[2]]
    if z >= 0:
        q[z, comp] ^= 1
        _e1(q, z, p, g)
    return 0


@njit(cache=True)
def _canonicalize(q, rows, decode, logical):
    for comp in range(2):
        s = 0
        for i in range(3):
            z = 0
            for j in range(7):
                z ^= rows[i, j] & q[j, comp]
            s = (s << 1) | z
        zpos = decode[s]
        parity = 0
        for j in range(7):
            parity ^= q[j, comp]
            q[j, comp] = 0
        if zpos >= 0:
            q[zpos, comp] = 1
            parity ^= 1
        if parity:
            logical[comp] ^= 1


@njit(cache=True)
def run_trial_kernel(
    g,
    p_gate,
    p_batch,
    nop,
    one_third,
    guard,
    max_meas,
    max_rounds,
    rows,
    supports,
    decode,
    max_cat_attempts,
    explicit_gates,
):
    """One trial.  Returns (ops_survived, rounds, status, aborted_ftec).

    status: 0 failed (logical error), 1 censored at ``max_rounds``,
    -1 cat preparation gave up.
    """
    q = np.zeros((12, 2), dtype=np.int64)
    logical = np.zeros(2, dtype=np.int64)
    aborted = 0
    for r in range(1, max_rounds + 1):
        for j in range(7):
            if explicit_gates:
                for _ in range(nop):
                    _e1(q, j, p_gate, g)
            elif g.random() < p_batch:
                q[j, 0] ^= g.random() < 0.5
                q[j, 1] ^= g.random() < 0.5
        for comp in range(2):
            res = _ftec_round(q, comp, one_third, guard, max_meas, r, supports, decode, p_gate, g, max_cat_attempts)
            if res < 0:
                return nop * r, r, -1, aborted
            aborted += res
        _canonicalize(q, rows, decode, logical)
        if logical[0] or logical[1]:
            return nop * r, r, 0, aborted
    return nop * max_rounds, max_rounds, 1, aborted


def code_arrays(code) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(parity rows 3x7, supports of the four cycle rows 4x4, decode table with -1 for none)."""
    rows = np.array(code.parity_rows, dtype=np.int64)
    supports = np.array([[j for j, v in enumerate(r) if v] for r in code.cycle_rows], dtype=np.int64)
    decode = np.array([-1 if z is None else z for z in code.decode_table], dtype=np.int64)
    return rows, supports, decode


@njit(cache=True)
def sample_cats_kernel(g, n_samples, size, p, max_attempts):
    """Classify ``n_samples`` verified cats.

    Returns ``counts[pf, bf]`` (phase flips mod 2, bit flips up to branch
    exchange) and the total number of preparation attempts.
    """
    q = np.zeros((12, 2), dtype=np.int64)
    counts = np.zeros((2, 3), dtype=np.int64)
    attempts = 0
    for _ in range(n_samples):
        a = _make_cat(q, size, p, g, max_attempts)
        if a == CAT_FAILED:
            return counts, -1
        attempts += a
        pf = 0
        w = 0
        for k in range(size):
            pf ^= q[CAT0 + k, 1]
            w += q[CAT0 + k, 0]
        counts[pf, min(w, size - w)] += 1
    return counts, attempts


@njit(cache=True)
def run_recoveries_kernel(
    g, n, with_error, p, one_third, guard, max_meas, rows, supports, decode, max_cat_attempts
):
    """Failures among ``n`` single recovery steps, each on a fresh block.

    With ``with_error`` the block starts with one uniformly random
    nontrivial Pauli on a uniformly random qubit.
    """
    q = np.zeros((12, 2), dtype=np.int64)
    logical = np.zeros(2, dtype=np.int64)
    failures = 0
    aborted = 0
    for t in range(n):
        q[:, :] = 0
        logical[:] = 0
        if with_error:
            j = int(g.random() * 7)
            kind = 1 + int(g.random() * 3)
            q[j, 0] = kind & 1
            q[j, 1] = kind >> 1
        for comp in range(2):
            res = _ftec_round(q, comp, one_third, guard, max_meas, t, supports, decode, p, g, max_cat_attempts)
            if res < 0:
                return failures, -1
            aborted += res
        _canonicalize(q, rows, decode, logical)
        if logical[0] or logical[1]:
            failures += 1
    return failures, aborted
