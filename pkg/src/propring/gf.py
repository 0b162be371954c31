"""Table-based arithmetic for the small finite fields F_{p^f}.

Field elements are encoded as integers in [0, q) with q = p^f: the element
with polynomial-basis coordinates (c_0, ..., c_{f-1}) gets the index
sum(c_i * p^i).  For f = 1 the index is the residue itself.  All linear
algebra in the package (row reduction, rank, solving) runs over these index
arrays with numpy fancy-indexing into the q x q operation tables, which keeps
every computation exact.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import ConfigError

# fixed compatible primitive lifts: key (p, deg), value monic coefficient
# tuple (a_0, ..., a_{deg-1}, 1) ascending.  Chosen as the ascending-lex
# smallest monic primitive polynomial whose root is norm-compatible with the
# smaller-degree entries; properties are re-verified by the test suite.
IRREDUCIBLE_LIFTS = {
    (5, 1): (2, 1),
    (5, 2): (3, 2, 1),
    (5, 3): (2, 0, 1, 1),
    (5, 4): (3, 0, 2, 2, 1),
    (5, 6): (3, 0, 1, 0, 0, 1, 1),
    (7, 1): (2, 1),
    (7, 2): (5, 2, 1),
    (7, 3): (2, 1, 1, 1),
    (7, 4): (5, 0, 4, 1, 1),
    (7, 6): (5, 0, 0, 4, 2, 1, 1),
    (11, 1): (3, 1),
    (11, 2): (8, 1, 1),
    (11, 4): (8, 0, 5, 2, 1),
    (13, 1): (2, 1),
    (13, 2): (11, 4, 1),
    (13, 4): (11, 0, 8, 1, 1),
}


def _polmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _polmod(a, m, p):
    a = [c % p for c in a]
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        if c:
            sh = len(a) - 1 - dm
            for i, y in enumerate(m):
                a[sh + i] = (a[sh + i] - c * y) % p
        a.pop()
        while len(a) > 1 and a[-1] == 0 and len(a) - 1 >= dm:
            a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _polpow(a, e, m, p):
    r = [1]
    a = _polmod(a, m, p)
    while e:
        if e & 1:
            r = _polmod(_polmul(r, a, p), m, p)
        a = _polmod(_polmul(a, a, p), m, p)
        e >>= 1
    return r


def _prime_factors(n):
    fs = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            fs.add(d)
            n //= d
        d += 1
    if n > 1:
        fs.add(n)
    return sorted(fs)


def _is_irreducible(f, p):
    n = len(f) - 1
    x = [0, 1]
    t = x
    for _ in range(n):
        t = _polpow(t, p, f, p)
    if t != _polmod(x, f, p):
        return False
    for ell in _prime_factors(n):
        t = x
        for _ in range(n // ell):
            t = _polpow(t, p, f, p)
        if t == _polmod(x, f, p):
            return False
    return True


def _is_primitive(f, p):
    n = len(f) - 1
    q1 = p**n - 1
    x = [0, 1]
    if _polpow(x, q1, f, p) != [1]:
        return False
    return all(_polpow(x, q1 // ell, f, p) != [1] for ell in _prime_factors(q1))


def _is_compatible(f, p, smaller):
    n = len(f) - 1
    for m, g in smaller.items():
        if m < n and n % m == 0:
            e = (p**n - 1) // (p**m - 1)
            xe = _polpow([0, 1], e, f, p)
            acc = [0]
            powr = [1]
            for c in g:
                if c:
                    t = _polmul([c], powr, p)
                    acc = [
                        ((acc[i] if i < len(acc) else 0) + (t[i] if i < len(t) else 0)) % p
                        for i in range(max(len(acc), len(t)))
                    ]
                powr = _polmod(_polmul(powr, xe, p), f, p)
            if _polmod(acc, f, p) != [0]:
                return False
    return True


@functools.lru_cache(maxsize=None)
def irreducible_lift(p: int, deg: int) -> tuple[int, ...]:
    """Monic degree-deg polynomial over Z, irreducible and primitive mod p,
    norm-compatible with the smaller-degree choices.  Table lookup with a
    deterministic ascending-lex search as fallback."""
    if (p, deg) in IRREDUCIBLE_LIFTS:
        return IRREDUCIBLE_LIFTS[(p, deg)]
    smaller = {m: list(irreducible_lift(p, m)) for m in range(1, deg) if deg % m == 0}

    def rec(prefix):
        if len(prefix) == deg:
            if prefix[0] == 0:
                return None
            f = prefix + [1]
            if _is_irreducible(f, p) and _is_primitive(f, p) and _is_compatible(f, p, smaller):
                return tuple(f)
            return None
        for a in range(p):
            r = rec(prefix + [a])
            if r is not None:
                return r
        return None

    found = rec([])
    if found is None:
        raise ConfigError(f"no compatible primitive polynomial found for p={p}, deg={deg}")
    return found


class GF:
    """F_{p^f} with precomputed operation tables on integer indices."""

    def __init__(self, p: int, f: int):
        self.p = p
        self.f = f
        self.q = q = p**f
        self.poly = irreducible_lift(p, f)
        # multiplication table via polynomial arithmetic
        add = np.zeros((q, q), dtype=np.int16)
        mul = np.zeros((q, q), dtype=np.int16)
        coords = [self.coords(i) for i in range(q)]
        for a in range(q):
            ca = coords[a]
            for b in range(a, q):
                cb = coords[b]
                s = [(x + y) % p for x, y in zip(ca, cb)]
                add[a, b] = add[b, a] = self.index(s)
                m = _polmod(_polmul(list(ca), list(cb), p), list(self.poly), p)
                m += [0] * (f - len(m))
                mul[a, b] = mul[b, a] = self.index(m)
        self.add = add
        self.mul = mul
        neg = np.zeros(q, dtype=np.int16)
        for a in range(q):
            neg[a] = self.index([(-c) % p for c in coords[a]])
        self.neg = neg
        inv = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            row = mul[a]
            inv[a] = int(np.nonzero(row == 1)[0][0])
        self.inv = inv
        frob = np.zeros(q, dtype=np.int16)
        for a in range(q):
            frob[a] = self.pow(a, p)
        self.frob = frob  # x -> x^p

    def coords(self, idx: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.f):
            out.append(idx % self.p)
            idx //= self.p
        return tuple(out)

    def index(self, coords) -> int:
        out = 0
        for c in reversed(list(coords)):
            out = out * self.p + (c % self.p)
        return out

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = int(self.inv[a]), -e
        r = 1
        while e:
            if e & 1:
                r = int(self.mul[r, a])
            a = int(self.mul[a, a])
            e >>= 1
        return r

    # generator of the multiplicative group (root of the defining polynomial
    # for f > 1; for f = 1 the residue -poly[0] mod p)
    @property
    def gen(self) -> int:
        if self.f == 1:
            return (-self.poly[0]) % self.p
        return self.p  # index of the coordinate vector (0, 1, 0, ...)


@functools.lru_cache(maxsize=None)
def gf(p: int, f: int) -> GF:
    return GF(p, f)


def rref(rows: np.ndarray, field: GF) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q.  Returns (reduced nonzero rows,
    pivot column list).  Input is not modified."""
    a = np.array(rows, dtype=np.int16)
    if a.ndim != 2:
        raise ValueError("rref expects a matrix")
    nrows, ncols = a.shape
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        s = inv[a[r, c]]
        a[r] = mul[s, a[r]]
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            # subtract col[hit] * a[r] from each hit row
            factors = neg[col[hit]]
            a[hit] = add[a[hit], mul[factors.reshape(-1, 1), a[r].reshape(1, -1)]]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(rows: np.ndarray, field: GF) -> int:
    if len(rows) == 0:
        return 0
    return rref(rows, field)[0].shape[0]


def residue(vec: np.ndarray, basis: np.ndarray, pivots: list[int], field: GF) -> np.ndarray:
    """Reduce vec against an rref basis; zero result means membership."""
    v = np.array(vec, dtype=np.int16)
    add, mul, neg = field.add, field.mul, field.neg
    for row, c in zip(basis, pivots):
        if v[c]:
            v = add[v, mul[neg[v[c]], row]]
    return v


def in_span(vec: np.ndarray, basis: np.ndarray, pivots: list[int], field: GF) -> bool:
    return not residue(vec, basis, pivots, field).any()


def solve(vec: np.ndarray, basis: np.ndarray, pivots: list[int], field: GF):
    """Coefficients expressing vec over the rref basis, or None."""
    v = np.array(vec, dtype=np.int16)
    add, mul, neg = field.add, field.mul, field.neg
    coeffs = np.zeros(len(basis), dtype=np.int16)
    for i, (row, c) in enumerate(zip(basis, pivots)):
        if v[c]:
            coeffs[i] = v[c]
            v = add[v, mul[neg[v[c]], row]]
    if v.any():
        return None
    return coeffs


def matmul(a: np.ndarray, b: np.ndarray, field: GF) -> np.ndarray:
    """Matrix product over F_q.  Prime fields go through integer matmul;
    extensions contract one shared axis of table lookups at a time."""
    a = np.asarray(a, dtype=np.int16)
    b = np.asarray(b, dtype=np.int16)
    if field.f == 1:
        return (a.astype(np.int64) @ b.astype(np.int64) % field.p).astype(np.int16)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int16)
    for k in range(a.shape[1]):
        out = field.add[out, field.mul[a[:, k].reshape(-1, 1), b[k].reshape(1, -1)]]
    return out


def matvec(a: np.ndarray, v: np.ndarray, field: GF) -> np.ndarray:
    return matmul(a, np.asarray(v, dtype=np.int16).reshape(-1, 1), field)[:, 0]


def mat_inverse(a: np.ndarray, field: GF) -> np.ndarray:
    """Inverse of a square matrix over F_q; raises ValueError if singular."""
    a = np.asarray(a, dtype=np.int16)
    n = a.shape[0]
    aug = np.zeros((n, 2 * n), dtype=np.int16)
    aug[:, :n] = a
    aug[np.arange(n), n + np.arange(n)] = 1
    red, piv = rref(aug, field)
    if piv != list(range(n)):
        raise ValueError("matrix is singular")
    return red[:, n:].copy()


class ColumnSolver:
    """Solver for A x = v where A has the given full-rank columns over F_q.

    Row-reduces [A^T | I] once; solving a target is then a single reduction
    pass.  Columns that are linearly dependent are rejected up front.
    """

    def __init__(self, cols, field: GF):
        self.field = field
        cols = [np.asarray(c, dtype=np.int16) for c in cols]
        self.n = len(cols[0])
        self.k = len(cols)
        aug = np.zeros((self.k, self.n + self.k), dtype=np.int16)
        for j, c in enumerate(cols):
            aug[j, : self.n] = c
            aug[j, self.n + j] = 1
        red, piv = rref(aug, field)
        if any(c >= self.n for c in piv) or len(piv) != self.k:
            raise ValueError("columns are linearly dependent")
        self._red = red
        self._piv = piv

    def solve(self, v):
        field = self.field
        add, mul, neg = field.add, field.mul, field.neg
        r = np.zeros(self.n + self.k, dtype=np.int16)
        r[: self.n] = np.asarray(v, dtype=np.int16)
        for row, c in zip(self._red, self._piv):
            if r[c]:
                r = add[r, mul[neg[r[c]], row]]
        if r[: self.n].any():
            return None
        return neg[r[self.n :]]
