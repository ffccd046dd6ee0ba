"""Exact dense linear algebra over a prime field GF(p).

Every downstream question (catalecticant ranks, syzygy kernels, strand
homology, socles) reduces to rank / kernel / membership computations on
dense matrices over GF(p), so this module is the performance core.

Entries are int64 residues in [0, p).  Elimination runs on column panels:
pivots are found by short eliminations confined to the panel, and the
trailing block then absorbs the panel's accumulated row operations as two
matrix products whose inner dimension is the panel rank.  Products are
evaluated through float64 BLAS whenever the accumulator provably fits in
2^53 (exact in that regime), with a chunked int64 fallback for large p.
The reduced row echelon form over a field is unique, so panel size and
BLAS threading cannot change any result bit.
"""

from __future__ import annotations

import numpy as np

_PANEL = 160   # pivot panel width (tuning constant, not part of any contract)
_SLAB = 8192   # trailing-update column slab, bounds temporary float64 memory

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin; the witness set covers all 64-bit inputs."""
    if p < 2:
        return False
    for w in _MR_WITNESSES:
        if p % w == 0:
            return p == w
    d, r = p - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, p)
        if x == 1 or x == p - 1:
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class Prime(int):
    """A verified prime characteristic in [2, 2^31)."""

    def __new__(cls, p):
        p = int(p)
        if not 2 <= p < 2 ** 31:
            raise ValueError(f"characteristic out of range [2, 2^31): {p}")
        if not is_prime(p):
            raise ValueError(f"not a prime: {p}")
        return super().__new__(cls, p)


def _mulmod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) % p for residue matrices."""
    k = A.shape[1]
    out_shape = (A.shape[0], B.shape[1])
    if k == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return np.zeros(out_shape, dtype=np.int64)
    if k * (p - 1) ** 2 < 2 ** 53:
        C = A.astype(np.float64) @ B.astype(np.float64)
        return np.rint(C).astype(np.int64) % p
    # accumulator could overflow 2^53: chunk the inner dimension in int64
    step = max(1, (2 ** 62) // ((p - 1) ** 2))
    acc = np.zeros(out_shape, dtype=np.int64)
    for i in range(0, k, step):
        acc = (acc + A[:, i:i + step] @ B[i:i + step]) % p
    return acc


def _plain_gauss_jordan(a: np.ndarray, p: int) -> list[int]:
    """Unblocked in-place RREF; returns pivot columns. Reference/small sizes."""
    m, w = a.shape
    piv: list[int] = []
    r = 0
    for c in range(w):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        fac = a[:, c].copy()
        fac[r] = 0
        hit = np.nonzero(fac)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(fac[hit], a[r])) % p
        piv.append(c)
        r += 1
    return piv


def _inv_small(M: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a small invertible matrix over GF(p)."""
    k = M.shape[0]
    a = np.concatenate([M % p, np.eye(k, dtype=np.int64)], axis=1)
    piv = _plain_gauss_jordan(a, p)
    if piv != list(range(k)):
        raise ValueError("matrix not invertible")
    return a[:, k:]


def _gauss_jordan(a: np.ndarray, p: int) -> list[int]:
    """In-place RREF of a residue matrix; returns pivot columns.

    Pivots for one panel of columns are located by eliminations restricted
    to the panel.  The panel's net effect on trailing columns is then: new
    pivot rows become F times their own initial values (F the inverse of
    the initial pivot minor), and every other row subtracts its initial
    panel coefficients times those finished pivot rows.  Both steps are
    matrix products with inner dimension = panel rank.
    """
    m, w = a.shape
    npiv = 0
    c0 = 0
    pivots: list[int] = []
    while c0 < w and npiv < m:
        c1 = min(c0 + _PANEL, w)
        panel = a[:, c0:c1].copy()
        p0 = panel.copy()
        prows: list[int] = []
        pcols: list[int] = []
        taken = np.zeros(m, dtype=bool)
        for j in range(c1 - c0):
            col = panel[:, j]
            i = -1
            for t in np.nonzero(col[npiv:])[0]:
                r = npiv + int(t)
                if not taken[r]:
                    i = r
                    break
            if i < 0:
                continue
            panel[i] = panel[i] * pow(int(col[i]), p - 2, p) % p
            fac = panel[:, j].copy()
            fac[i] = 0
            hit = np.nonzero(fac)[0]
            if hit.size:
                panel[hit] = (panel[hit] - np.outer(fac[hit], panel[i])) % p
            taken[i] = True
            prows.append(i)
            pcols.append(j)
            pivots.append(c0 + j)
        k = len(prows)
        if k and c1 < w:
            rows = np.asarray(prows)
            cols = np.asarray(pcols)
            F = _inv_small(p0[np.ix_(rows, cols)], p)
            C = p0[:, cols].copy()
            C[rows] = 0
            for u0 in range(c1, w, _SLAB):
                u1 = min(u0 + _SLAB, w)
                T = a[:, u0:u1]
                V = _mulmod(F, T[rows], p)
                T = (T - _mulmod(C, V, p)) % p
                T[rows] = V
                a[:, u0:u1] = T
        a[:, c0:c1] = panel
        # swap the new pivot rows up so pivot rows are always 0..npiv-1
        for j in range(k):
            dst, src = npiv + j, prows[j]
            if src != dst:
                a[[dst, src]] = a[[src, dst]]
                for l in range(j + 1, k):
                    if prows[l] == dst:
                        prows[l] = src
        npiv += k
        c0 = c1
    return pivots


class FMatrix:
    """Immutable dense matrix over GF(p).

    `a` is an int64 ndarray of residues in [0, p), marked read-only.
    """

    __slots__ = ("p", "a")

    def __init__(self, p, data):
        self.p = p if isinstance(p, Prime) else Prime(p)
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("FMatrix data must be two-dimensional")
        arr %= self.p
        arr.setflags(write=False)
        self.a = arr

    @classmethod
    def of(cls, p: Prime, arr: np.ndarray) -> "FMatrix":
        """Wrap an already-reduced int64 array without copying."""
        self = object.__new__(cls)
        self.p = p
        arr.setflags(write=False)
        self.a = arr
        return self

    @classmethod
    def zeros(cls, p, rows: int, cols: int) -> "FMatrix":
        p = p if isinstance(p, Prime) else Prime(p)
        return cls.of(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p, n: int) -> "FMatrix":
        p = p if isinstance(p, Prime) else Prime(p)
        return cls.of(p, np.eye(n, dtype=np.int64) % p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def transpose(self) -> "FMatrix":
        return FMatrix.of(self.p, np.ascontiguousarray(self.a.T))

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FMatrix(GF({int(self.p)}), {self.rows}x{self.cols})"


def rref(M: FMatrix) -> tuple[FMatrix, int, list[int]]:
    """Reduced row echelon form, rank, and strictly increasing pivot columns."""
    a = M.a.copy()
    piv = _gauss_jordan(a, M.p)
    return FMatrix.of(M.p, a), len(piv), piv


def rank(M: FMatrix) -> int:
    a = M.a.copy()
    return len(_gauss_jordan(a, M.p))


def kernel_basis(M: FMatrix) -> FMatrix:
    """Canonical basis of the right null space, one row per free column.

    Row for free column c has 1 at c and back-substituted pivot entries, so
    the output is itself in RREF (up to row order by free column).
    """
    R, r, piv = rref(M)
    w = M.cols
    pivset = set(piv)
    free = [c for c in range(w) if c not in pivset]
    K = np.zeros((len(free), w), dtype=np.int64)
    if free:
        K[np.arange(len(free)), free] = 1
        if r:
            neg = (-R.a[:r][:, free]) % M.p
            for j, c in enumerate(piv):
                K[:, c] = neg[j]
    return FMatrix.of(M.p, K)


def left_kernel(M: FMatrix) -> FMatrix:
    """Canonical basis of {v : v M = 0}."""
    return kernel_basis(M.transpose())


def matmul(A: FMatrix, B: FMatrix) -> FMatrix:
    if A.p != B.p:
        raise ValueError("characteristic mismatch")
    if A.cols != B.rows:
        raise ValueError("dimension mismatch")
    return FMatrix.of(A.p, _mulmod(A.a, B.a, A.p))


def reduce_rows(R: np.ndarray, piv: list[int], V: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduce row vectors V against RREF rows R: returns (coeffs, residual).

    residual = V - coeffs @ R[:rank]; a row of V lies in the row space iff
    its residual row is zero.
    """
    r = len(piv)
    if r == 0:
        return np.zeros((V.shape[0], 0), dtype=np.int64), V % p
    coeffs = V[:, piv] % p
    resid = (V - _mulmod(coeffs, R[:r], p)) % p
    return coeffs, resid


def row_space_membership(M: FMatrix, v) -> bool:
    """True iff v lies in the row space of M."""
    vv = np.asarray(v, dtype=np.int64).reshape(1, -1) % M.p
    if vv.shape[1] != M.cols:
        raise ValueError("dimension mismatch")
    R, r, piv = rref(M)
    _, resid = reduce_rows(R.a, piv, vv, M.p)
    return not resid.any()


def solve_right(A: FMatrix, B: FMatrix) -> FMatrix:
    """Canonical X with A X = B (free variables zero); raises if inconsistent."""
    if A.p != B.p:
        raise ValueError("characteristic mismatch")
    if A.rows != B.rows:
        raise ValueError("dimension mismatch")
    n = A.cols
    aug = np.concatenate([A.a, B.a], axis=1).copy()
    piv = _gauss_jordan(aug, A.p)
    if any(c >= n for c in piv):
        raise ValueError("inconsistent system")
    X = np.zeros((n, B.cols), dtype=np.int64)
    for j, c in enumerate(piv):
        X[c] = aug[j, n:]
    return FMatrix.of(A.p, X)
