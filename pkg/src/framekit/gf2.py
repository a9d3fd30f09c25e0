"""Small dense linear algebra over GF(2)."""
from __future__ import annotations

import numpy as np


def solve(a, b):
    """One solution ``v`` of ``a @ v = b (mod 2)`` or None if inconsistent.

    Free variables are set to zero.
    """
    a = np.array(a, dtype=np.uint8) % 2
    b = np.array(b, dtype=np.uint8).reshape(-1) % 2
    rows, cols = a.shape
    m = np.concatenate([a, b[:, None]], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.nonzero(m[r:, c])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        m[[r, p]] = m[[p, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if np.any(m[r:, cols]):
        return None
    v = np.zeros(cols, dtype=np.uint8)
    for i, c in enumerate(pivots):
        v[c] = m[i, cols]
    return v


def rank(a) -> int:
    a = np.array(a, dtype=np.uint8) % 2
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        hit = np.nonzero(a[r:, c])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r
