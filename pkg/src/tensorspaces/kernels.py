"""Dense mod-p kernels behind the finite-field oracles.

Exhaustive sweeps over prime fields (GL enumeration, first-isomorphism
search, batched pullback comparisons) dominate oracle runtime, so they run
on int64 numpy arrays; the hot loops are numba @njit compiled when numba is
importable, with a pure-numpy fallback selected by TSF_PURE_NUMPY=1.  Only
prime fields and arities up to 3 take this route; everything else stays on
the exact sparse path in forms.py, which these kernels must agree with
(tested) but never replace as the certificate checker.
"""

from __future__ import annotations

import os

import numpy as np

from .linalg import gl_order

_NUMBA_FNS = None


def backend():
    """Active kernel backend: 'numba' or 'numpy'."""
    if os.environ.get("TSF_PURE_NUMPY") == "1":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def _numba_fns():
    global _NUMBA_FNS
    if _NUMBA_FNS is not None:
        return _NUMBA_FNS
    from numba import njit

    @njit(cache=True)
    def gl_fill(d, p, out):
        count = 0
        total = 1
        for _ in range(d * d):
            total *= p
        digits = np.empty(d * d, dtype=np.int64)
        for code in range(total):
            c = code
            for pos in range(d * d - 1, -1, -1):
                digits[pos] = c % p
                c //= p
            if d == 1:
                det = digits[0]
            elif d == 2:
                det = digits[0] * digits[3] - digits[1] * digits[2]
            else:
                a, b, cc = digits[0], digits[1], digits[2]
                dd, e, f = digits[3], digits[4], digits[5]
                g, h, i = digits[6], digits[7], digits[8]
                det = a * (e * i - f * h) - b * (dd * i - f * g) + cc * (dd * h - e * g)
            if det % p != 0:
                for k in range(d * d):
                    out[count, k // d, k % d] = digits[k]
                count += 1
        return count

    @njit(cache=True)
    def peq1(w, f, target, p):
        d, d2 = f.shape
        for a in range(d2):
            acc = 0
            for i in range(d):
                acc += w[i] * f[i, a]
            if acc % p != target[a]:
                return False
        return True

    @njit(cache=True)
    def peq2(w, f, target, p):
        d, d2 = f.shape
        for a in range(d2):
            for b in range(d2):
                acc = 0
                for i in range(d):
                    fia = f[i, a]
                    if fia == 0:
                        continue
                    for j in range(d):
                        acc += w[i, j] * fia * f[j, b]
                if acc % p != target[a, b]:
                    return False
        return True

    @njit(cache=True)
    def peq3(w, f, target, p):
        d, d2 = f.shape
        for a in range(d2):
            for b in range(d2):
                for c in range(d2):
                    acc = 0
                    for i in range(d):
                        fia = f[i, a]
                        if fia == 0:
                            continue
                        for j in range(d):
                            fjb = fia * f[j, b]
                            if fjb == 0:
                                continue
                            for k in range(d):
                                acc += w[i, j, k] * fjb * f[k, c]
                    if acc % p != target[a, b, c]:
                        return False
        return True

    _NUMBA_FNS = {"gl_fill": gl_fill, "peq": {1: peq1, 2: peq2, 3: peq3}}
    return _NUMBA_FNS


def dense_from_form(form):
    """Prime-field sparse form -> int64 numpy tensor."""
    arr = np.zeros((form.dim,) * form.arity, dtype=np.int64)
    for key, val in form.entries.items():
        arr[key] = val
    return arr


def pullback_dense(w, f, p):
    """Dense pullback by iterated mode contraction, mod p."""
    out = w
    for _ in range(w.ndim):
        out = np.tensordot(out, f, axes=([0], [0])) % p
    return out


def gl_matrices(d, p):
    """All invertible d x d matrices mod p, row-major lexicographic order."""
    if d > 3:
        raise ValueError("dense GL enumeration limited to d <= 3")
    n = gl_order(d, p)
    out = np.empty((n, d, d), dtype=np.int64)
    if backend() == "numba":
        filled = _numba_fns()["gl_fill"](d, p, out)
        assert filled == n
        return out
    total = p ** (d * d)
    weights = p ** np.arange(d * d - 1, -1, -1, dtype=np.int64)
    filled = 0
    for start in range(0, total, 1 << 18):
        codes = np.arange(start, min(start + (1 << 18), total), dtype=np.int64)
        digits = (codes[:, None] // weights) % p
        mats = digits.reshape(-1, d, d)
        if d == 1:
            det = mats[:, 0, 0]
        elif d == 2:
            det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
        else:
            det = (
                mats[:, 0, 0] * (mats[:, 1, 1] * mats[:, 2, 2] - mats[:, 1, 2] * mats[:, 2, 1])
                - mats[:, 0, 1] * (mats[:, 1, 0] * mats[:, 2, 2] - mats[:, 1, 2] * mats[:, 2, 0])
                + mats[:, 0, 2] * (mats[:, 1, 0] * mats[:, 2, 1] - mats[:, 1, 1] * mats[:, 2, 0])
            )
        keep = mats[det % p != 0]
        out[filled : filled + len(keep)] = keep
        filled += len(keep)
    assert filled == n
    return out


_EINSUM = {
    1: "i,tia->ta",
    2: "ij,tia,tjb->tab",
    3: "ijk,tia,tjb,tkc->tabc",
}


def batch_pullback(w, mats, p):
    """Pull one dense form back along a stack of matrices at once."""
    n = w.ndim
    args = [w] + [mats] * n
    return np.einsum(_EINSUM[n], *args) % p


def iso_search_dense(A, B):
    """First g in GL enumeration order with B-forms pulling back to A-forms.

    Agrees entry-for-entry with the exact sparse path; returns a
    linalg.Matrix or None.
    """
    from .linalg import Matrix

    p = A.field.p
    d = A.dim
    if any(f.partition.size > 3 for f in A.forms):
        raise ValueError("dense iso search limited to arity <= 3")
    wa = [dense_from_form(f.canonical) % p for f in A.forms]
    wb = [dense_from_form(f.canonical) % p for f in B.forms]
    mats = gl_matrices(d, p)
    if backend() == "numba":
        fns = _numba_fns()["peq"]
        for t in range(len(mats)):
            g = mats[t]
            ok = True
            for fa, fb in zip(wa, wb):
                if not fns[fa.ndim](fb, g, fa, p):
                    ok = False
                    break
            if ok:
                return Matrix(A.field, [[int(x) for x in row] for row in g])
        return None
    mask = np.ones(len(mats), dtype=bool)
    for fa, fb in zip(wa, wb):
        pulled = batch_pullback(fb, mats, p)
        mask &= (pulled == fa).reshape(len(mats), -1).all(axis=1)
        if not mask.any():
            return None
    t = int(np.argmax(mask))
    g = mats[t]
    return Matrix(A.field, [[int(x) for x in row] for row in g])
