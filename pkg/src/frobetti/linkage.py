"""The linked ideal J_q = ((x_1^q..x_n^q) : f) and its generator/socle data.

J_q is the annihilator of the divided element φ = f / (x_1^(q-1)..x_n^(q-1)),
so its graded pieces split as J_i = c_i ⊕ K̂_i where c = (x_1^q..x_n^q) and
K̂_i is the left kernel of the B-restricted pairing matrix (B = monomials
with all exponents < q).  Generator counting works entirely in B-coordinates:
for i ≥ q+1 the degree-q part of the span is automatic (c_i = P_1·c_{i-1}),
so new generators at degree i are dim K̂_i − dim π_B(P_1·K̂_{i-1}).

Two measurement modes share that arithmetic.  The literal scan computes the
kernel at every degree q..s+1.  When the quick compressedness check passes,
dim K̂_i = max(0, |B_i| − |B_{s-i}|) in every degree, so kernels are only
extracted at degrees where the running span falls short of that dimension —
at large q this replaces hundreds of eliminations with two.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ffla import FMatrix, Prime, rank, reduce_rows, rref
from .invsys import MultigradeSplitter, _relcomp_checks, bbasis, bhat_kernel, dim_B
from .polyring import DividedElem, HomogPoly, basis, dim_P


def link_inverse_poly(f: HomogPoly, q: int) -> DividedElem:
    """Inverse polynomial of J_q: divided monomial exponents q-1-a, term by term."""
    d = f.deg
    if d >= q:
        raise ValueError(f"require deg f < q (got deg f={d}, q={q})")
    if d <= 1:
        warnings.warn("degree-1 f accepted for smoke tests only", RuntimeWarning, stacklevel=2)
    n = f.n
    s = n * (q - 1) - d
    tgt = basis(n, s)
    out = np.zeros(tgt.size, dtype=np.int64)
    for m, c in f.terms():
        g = tuple(q - 1 - e for e in m)
        out[tgt.rank(g)] = c
    return DividedElem(f.p, n, s, out)


@lru_cache(maxsize=None)
def _bshift(n: int, q: int, i: int, t: int) -> np.ndarray:
    """Index map B_i -> B_{i+1} under multiplication by x_t (-1 = lands in c)."""
    src = bbasis(n, i, q)
    tgt = bbasis(n, i + 1, q)
    shifted = src.exps.copy()
    shifted[:, t] += 1
    full = basis(n, i + 1).rank_rows(shifted)
    return tgt.full_to_sub[full]


def _mul_into_B(vecs: np.ndarray, n: int, q: int, i: int) -> np.ndarray:
    """π_B(x_t · v) for all variables t, stacked: (n·k) × |B_{i+1}| rows."""
    k = vecs.shape[0]
    w = bbasis(n, i + 1, q).size
    out = np.zeros((n * k, w), dtype=np.int64)
    for t in range(n):
        sh = _bshift(n, q, i, t)
        ok = sh >= 0
        out[t * k : (t + 1) * k, sh[ok]] = vecs[:, ok]
    return out


def _bkernel(phi: DividedElem, i: int, q: int) -> FMatrix:
    """Basis of K̂_i = J_i ∩ span(B_i), rows over the B_i monomial basis.

    Row vectors v with v·Φ̂_i = 0; since Φ̂_i is the transpose of Φ̂_{s-i},
    this is the right kernel of the (s-i)-degree matrix — built directly to
    avoid materializing both orientations at large q.
    """
    if i > phi.deg:
        return FMatrix.identity(phi.p, bbasis(phi.n, i, q).size)
    return bhat_kernel(phi, phi.deg - i, q)


def _phi_splitter(phi: DividedElem) -> MultigradeSplitter:
    return MultigradeSplitter(basis(phi.n, phi.deg).exps[np.nonzero(phi.coef)[0]])


def _col_keys(sp: MultigradeSplitter, n: int, q: int, i: int) -> np.ndarray:
    lab = sp.labels(bbasis(n, i, q).exps)
    return np.unique(lab, axis=0, return_inverse=True)[1]


def _grouped_rref(p, a: np.ndarray, ckey: np.ndarray):
    """RREF basis of the row space of a when every row's support sits in one
    column class (true of kernel rows and their variable shifts).  Splitting
    by class keeps each elimination at roughly a component's size.  Returns
    (basis rows, rank)."""
    nz = a != 0
    live = nz.any(axis=1)
    if not live.any():
        return np.zeros((0, a.shape[1]), dtype=np.int64), 0
    a = a[live]
    rcls = ckey[np.argmax(nz[live], axis=1)]
    parts = []
    total = 0
    for c in np.unique(rcls):
        rows_c = a[rcls == c]
        cols_c = np.nonzero(ckey == c)[0]
        sub = rows_c[:, cols_c]
        if np.count_nonzero(sub) != np.count_nonzero(rows_c):
            raise AssertionError("row support crosses column classes")
        R, r, _ = rref(FMatrix.of(p, sub))
        full = np.zeros((r, a.shape[1]), dtype=np.int64)
        full[:, cols_c] = R.a[:r]
        parts.append(full)
        total += r
    return np.concatenate(parts, axis=0), total


@dataclass(frozen=True)
class GeneratorProfile:
    """Minimal generator counts by degree; bounds hold entries only known
    as upper bounds (the odd-socle-degree second candidate)."""

    counts: dict[int, int]
    bounds: dict[int, int] = field(default_factory=dict)
    ci_minimal: bool | None = None  # measured profiles: x_t^q independent mod P1·J

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def degrees(self) -> list[int]:
        return sorted(set(self.counts) | set(self.bounds))


def _count_at_q(phi: DividedElem, q: int, n: int, kprev: FMatrix, kq: FMatrix):
    """Generators at degree q itself: the c-monomials join here, and products
    of J_{q-1} can leave the B-span, so this one degree works in full P_q
    coordinates.  Returns (count, ci_minimal)."""
    p = phi.p
    full_q = basis(n, q)
    if kprev.rows == 0:
        return n + kq.rows, True
    prods = np.zeros((n * kprev.rows, full_q.size), dtype=np.int64)
    for t in range(n):
        shifted = bbasis(n, q - 1, q).exps.copy()
        shifted[:, t] += 1
        cols = full_q.rank_rows(shifted)
        prods[t * kprev.rows : (t + 1) * kprev.rows, cols] = kprev.a
    R, r, _ = rref(FMatrix.of(p, prods))
    cvecs = np.zeros((n, full_q.size), dtype=np.int64)
    for t in range(n):
        mono = [0] * n
        mono[t] = q
        cvecs[t, full_q.rank(tuple(mono))] = 1
    kvecs = np.zeros((kq.rows, full_q.size), dtype=np.int64)
    kvecs[:, bbasis(n, q, q).idx] = kq.a
    total = rank(FMatrix.of(p, np.concatenate([R.a[:r], cvecs, kvecs], axis=0)))
    with_ci = rank(FMatrix.of(p, np.concatenate([R.a[:r], cvecs], axis=0)))
    return total - r, with_ci - r == n


def _profile_literal(phi: DividedElem, q: int, n: int) -> GeneratorProfile:
    p = phi.p
    s = phi.deg
    sp = _phi_splitter(phi)
    counts: dict[int, int] = {}
    ci_minimal = True
    kprev = FMatrix.zeros(p, 0, bbasis(n, 0, q).size)
    for i in range(1, s + 2):
        ki = _bkernel(phi, i, q)
        if i == q:
            mu, ci_minimal = _count_at_q(phi, q, n, kprev, ki)
        else:
            if kprev.rows:
                span = _mul_into_B(kprev.a, n, q, i - 1)
                _, r = _grouped_rref(p, span, _col_keys(sp, n, q, i))
            else:
                r = 0
            mu = ki.rows - r
        if mu:
            counts[i] = mu
        kprev = ki
    return GeneratorProfile(counts=counts, ci_minimal=ci_minimal)


def _profile_fast(phi: DividedElem, q: int, n: int, seed: FMatrix | None) -> GeneratorProfile:
    """Span scan that reads dim K̂_i from the compressed Hilbert function and
    only extracts kernels at degrees where new generators actually appear."""
    p = phi.p
    s = phi.deg
    sp = _phi_splitter(phi)
    counts: dict[int, int] = {q: n}
    if seed is not None:
        i_start = (s + 1) // 2
        counts[i_start] = seed.rows
        vecs = seed.a
    else:
        i_start = s // 2
        vecs = np.zeros((0, bbasis(n, i_start, q).size), dtype=np.int64)
    for i in range(i_start + 1, s + 2):
        exp_dim = bbasis(n, i, q).size - (dim_B(n, s - i, q) if i <= s else 0)
        span = _mul_into_B(vecs, n, q, i - 1)
        basis_rows, r = _grouped_rref(p, span, _col_keys(sp, n, q, i))
        if r == exp_dim:
            vecs = basis_rows
            continue
        ki = _bkernel(phi, i, q)
        if ki.rows != exp_dim:
            raise RuntimeError(
                f"compressed Hilbert function violated at degree {i}: "
                f"kernel dim {ki.rows} != {exp_dim}"
            )
        counts[i] = exp_dim - r
        vecs = ki.a
    return GeneratorProfile(counts=counts, ci_minimal=True)


def measured_generator_profile(f: HomogPoly, q: int, thorough: bool = False) -> GeneratorProfile:
    """Degrees and counts of minimal generators of J_q, by span growth.

    thorough=True forces the degree-by-degree kernel scan; by default the
    compressed shortcut is used whenever the quick check passes (the two
    modes agree — the fast path verifies every span dimension it uses).
    """
    phi = link_inverse_poly(f, q)
    n = f.n
    s = phi.deg
    # the shortcut needs every degree <= q to sit at or below the middle
    # (for n=3 this is q >= d+3), so that J has only the n CI generators there
    if not thorough and 2 * q <= s:
        if s % 2 == 0:
            if _relcomp_checks(f, q, "quick").verdict:
                return _profile_fast(phi, q, n, seed=None)
        else:
            # the quick check at ⌈s/2⌉ is the same elimination that yields
            # the first kernel, so extract vectors and test the dimension
            i1 = (s + 1) // 2
            k1 = _bkernel(phi, i1, q)
            if k1.rows == bbasis(n, i1, q).size - dim_B(n, s - i1, q):
                return _profile_fast(phi, q, n, seed=k1)
    return _profile_literal(phi, q, n)


def predicted_generator_profile(n: int, d: int, q: int) -> GeneratorProfile:
    """Generator degrees/counts forced for relatively compressed links.

    Even s: n at degree q plus the four-binomial count at s/2+1 (equal to 2d
    when n=3).  Odd s: n at q, d at ⌈s/2⌉, and an upper bound 3d at ⌈s/2⌉+1.
    """
    if n < 3:
        raise ValueError("n >= 3 required")
    if q * (n - 2) < n + d:
        raise ValueError(f"require q >= (n+d)/(n-2) (got q={q}, n={n}, d={d})")
    s = n * (q - 1) - d
    counts = {q: n}
    bounds: dict[int, int] = {}
    if s % 2 == 0:
        i0 = s // 2 + 1

        def dimc(j: int) -> int:
            return dim_P(n, j) - dim_B(n, j, q)

        counts[i0] = dim_P(n, i0) - dim_P(n, s - i0) + dimc(s - i0) - dimc(i0)
    else:
        counts[(s + 1) // 2] = d
        bounds[(s + 1) // 2 + 1] = 3 * d
    return GeneratorProfile(counts=counts, bounds=bounds)


@dataclass(frozen=True)
class SocleReport:
    dims: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.dims.values())


def _fmul_rows(f: HomogPoly, q: int, j: int) -> np.ndarray:
    """Rows spanning π_B(f·B_{j-d}) inside B_j."""
    n = f.n
    src = bbasis(n, j - f.deg, q)
    tgt = bbasis(n, j, q)
    out = np.zeros((src.size, tgt.size), dtype=np.int64)
    if src.size and tgt.size:
        full = basis(n, j)
        for m, c in f.terms():
            ranks = full.rank_rows(src.exps + np.asarray(m, dtype=np.int64))
            sub = tgt.full_to_sub[ranks]
            ok = sub >= 0
            out[np.nonzero(ok)[0], sub[ok]] += c
    return out % f.p


def socle_direct(f: HomogPoly | None, q: int, *, p=None, n: int = 3) -> SocleReport:
    """Socle of P/((x_1^q..x_n^q) + (f)) by simultaneous multiplication kernels.

    With f omitted this is the complete-intersection quotient P/c.
    Per degree j: soc_j = |B_j| − rank[x_1 .. x_n mod U_{j+1}] − rank U_j,
    where U_j = π_B(f·B_{j-d}) (the image rows are themselves closed under
    multiplication, so they always land inside the degree-(j+1) image).
    """
    if f is None:
        if p is None:
            raise ValueError("p required when f is omitted")
        p = Prime(p)
    else:
        p, n = f.p, f.n
    top = n * (q - 1)
    dims: dict[int, int] = {}
    U_next: tuple[np.ndarray, list[int]] | None = None  # rref rows, pivots at j+1
    for j in range(top, -1, -1):
        bj = bbasis(n, j, q)
        if f is not None:
            Uj_raw = _fmul_rows(f, q, j)
            R, rj, piv = rref(FMatrix.of(p, Uj_raw))
            Uj = (R.a[:rj], piv)
        else:
            Uj = (np.zeros((0, bj.size), dtype=np.int64), [])
        rank_Uj = len(Uj[1])
        quot_dim = bj.size - rank_Uj
        if quot_dim > 0:
            bnext = bbasis(n, j + 1, q)
            if bnext.size == 0 or (U_next is not None and len(U_next[1]) == bnext.size):
                soc = quot_dim  # everything above is zero: whole piece is socle
            else:
                blocks = []
                for t in range(n):
                    S = np.zeros((bj.size, bnext.size), dtype=np.int64)
                    sh = _bshift(n, q, j, t)
                    ok = sh >= 0
                    S[np.nonzero(ok)[0], sh[ok]] = 1
                    if U_next is not None and U_next[1]:
                        Urows, Upiv = U_next
                        _, S = reduce_rows(Urows, Upiv, S, p)
                    blocks.append(S)
                M = np.concatenate(blocks, axis=1)
                nullity = bj.size - rank(FMatrix.of(p, M))
                soc = nullity - rank_Uj
            if soc:
                dims[j] = soc
        U_next = Uj
    return SocleReport(dims=dims)


def socle_via_link(f: HomogPoly, q: int) -> SocleReport:
    """Socle read off the generator profile of J_q (degree j ↔ n(q-1) − j)."""
    profile = measured_generator_profile(f, q)
    if not profile.ci_minimal:
        raise ValueError("link degeneracy")
    n = f.n
    top = n * (q - 1)
    dims: dict[int, int] = {}
    for i, c in profile.counts.items():
        extra = c - n if i == q else c
        if extra > 0:
            dims[top - i] = extra
    return SocleReport(dims=dims)


@dataclass(frozen=True)
class KUShiftReport:
    ok: bool
    shift: int
    q0: int
    q1: int
    pairs: list  # (degree at q0, degree at q0 + shift, dim at q0, dim at q1)

    def __bool__(self) -> bool:
        return self.ok


def ku_shift_check(f: HomogPoly, q0: int, q1: int) -> KUShiftReport:
    """Socle of the q1 instance = socle of the q0 instance shifted by (3/2)(q1−q0)."""
    d = f.deg
    p = int(f.p)

    def _pow_of_p(q):
        v = q
        while v > 1 and v % p == 0:
            v //= p
        return v == 1

    if not _pow_of_p(q0) or not _pow_of_p(q1):
        raise ValueError(f"q0, q1 must be powers of p={p}")
    if q1 < q0:
        raise ValueError("require q1 >= q0")
    if q0 < d + 3:
        raise ValueError(f"require q0 >= d+3 (got q0={q0}, d={d})")
    for q in (q0, q1):
        if not _relcomp_checks(f, q, "quick").verdict:
            raise ValueError(f"link not relatively compressed at q={q}")
    assert (3 * (q1 - q0)) % 2 == 0
    shift = 3 * (q1 - q0) // 2
    s0 = socle_via_link(f, q0)
    s1 = socle_via_link(f, q1)
    degrees = sorted(set(j + shift for j in s0.dims) | set(s1.dims))
    pairs = []
    ok = True
    for j1 in degrees:
        v0 = s0.dims.get(j1 - shift, 0)
        v1 = s1.dims.get(j1, 0)
        pairs.append((j1 - shift, j1, v0, v1))
        ok = ok and v0 == v1
    return KUShiftReport(ok=ok, shift=shift, q0=q0, q1=q1, pairs=pairs)
