"""Digit-coordinate models of the two truncated 3f-dimensional groups.

Both groups come with an ordered generating family of length 3f,

    indices 0..f-1      "A" generators, valuation 1/2,
    indices f..2f-1     "B" generators, valuation 1/2,
    indices 2f..3f-1    "C" generators, valuation 1,

and every element of the depth-M truncation (the group modulo its subgroup
of p^M-th powers) is an ordered product  prod_i g_i^(x_i)  for a unique
digit vector x in [0, p^M)^(3f).  All group operations run through exact
matrix or quaternion arithmetic at coefficient level p^(M+1): the guard
digit is what makes the top coordinate of every element recoverable, so
multiplication of cosets is computed exactly and no floating or symbolic
approximation appears anywhere.

Case GL2: upper-triangular-unipotent-mod-p matrices over the unramified
degree-f ring, taken modulo the center.  Canonical coset representatives
have determinant exactly 1 (scale by the Hensel square root of the
determinant).  Decomposition is closed-form: g = [[a,b],[c,d]] factors as
U(u) L(w) D(t) with t = d^(-1), u = b t, w = c d; A-digits are the
Teichmueller coordinates of u, B-digits those of w/p, and C-digits come
from peeling t in 1 + pO level by level against the generators 1 + p[a^i].

Case QUAT: norm-one units a + b*P of the quaternion order over the
quadratic ring (P^2 = p, P c = sigma(c) P), modulo the center, with
canonical representatives of reduced norm exactly 1.  Decomposition is by
successive approximation over valuation levels 1/2, 1, 3/2, ..., M: at a
half-integer level the b-part layer is solved in the residue-field basis
{a^i, a^i z}, at an integer level the a-part layer lands in the anti-fixed
line spanned by {a^i eta}, eta = (z - sigma(z))/2, because the norm-one
constraint kills the fixed part.

The valuation of a digit vector is  min_i ( omega(g_i) + v_p(x_i) )  over
the nonzero digits, a value in (1/2)Z; the identity gets None.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

import numpy as np

from .config import PrimeConfig
from .errors import ConfigError, NonConvergent, NotInGroup
from .gf import ColumnSolver
from .padic import Quaternion, quat_context, zq_ring

Digits = tuple[int, ...]


def _vp(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class GroupModel:
    """Shared digit machinery; concrete subclasses supply realization and
    decomposition through their coordinate model."""

    def __init__(self, p: int, f: int, M: int):
        self.p = p
        self.f = f
        self.M = M
        self.n = 3 * f
        self.pM = p**M
        self.order = self.pM**self.n
        self.identity: Digits = (0,) * self.n
        # doubled valuations of the generators: 1 for A and B, 2 for C
        self.two_omega = tuple(1 if i < 2 * f else 2 for i in range(self.n))
        self._realized: dict[Digits, object] = {}
        self._decomposed: dict[object, Digits] = {}
        self._tables: dict[Digits, np.ndarray] = {}
        self._strides = tuple(self.pM ** (self.n - 1 - i) for i in range(self.n))

    # -- digit bookkeeping -------------------------------------------------

    def check_digits(self, x) -> Digits:
        t = tuple(int(c) for c in x)
        if len(t) != self.n or any(c < 0 or c >= self.pM for c in t):
            raise NotInGroup(f"digit vector must have {self.n} entries in [0, {self.pM})")
        return t

    def generator(self, i: int) -> Digits:
        return tuple(1 if j == i else 0 for j in range(self.n))

    def index_of(self, x: Digits) -> int:
        return sum(c * s for c, s in zip(x, self._strides))

    def digits_of(self, idx: int) -> Digits:
        out = []
        for s in self._strides:
            out.append(idx // s)
            idx %= s
        return tuple(out)

    def all_elements(self):
        """All digit vectors in index order."""
        return itertools.product(range(self.pM), repeat=self.n)

    def two_omega_of(self, x: Digits) -> int | None:
        """Doubled valuation of the element, or None for the identity."""
        best = None
        for c, w in zip(x, self.two_omega):
            if c:
                v = w + 2 * _vp(c, self.p, self.M)
                if best is None or v < best:
                    best = v
        return best

    def omega(self, x: Digits) -> Fraction | None:
        t = self.two_omega_of(x)
        return None if t is None else Fraction(t, 2)

    # -- group operations --------------------------------------------------

    def realize(self, x: Digits):
        r = self._realized.get(x)
        if r is None:
            r = self._realize(x)
            self._realized[x] = r
        return r

    def decompose(self, concrete) -> Digits:
        key = self._key(concrete)
        d = self._decomposed.get(key)
        if d is None:
            d = self._decompose(concrete)
            self._decomposed[key] = d
        return d

    def mul(self, x: Digits, y: Digits) -> Digits:
        return self.decompose(self._mul(self.realize(x), self.realize(y)))

    def inv(self, x: Digits) -> Digits:
        return self.decompose(self._inv(self.realize(x)))

    def power(self, x: Digits, e: int) -> Digits:
        if e < 0:
            return self.power(self.inv(x), -e)
        acc, base = self.identity, x
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def commutator(self, x: Digits, y: Digits) -> Digits:
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))

    def conjugate(self, x: Digits, g: Digits) -> Digits:
        return self.mul(self.mul(self.inv(g), x), g)

    def pth_root(self, x: Digits) -> Digits:
        """The p-th root of an element of valuation > p/(p-1), by digit
        refinement; exact by construction, verified before returning."""
        y = self.identity
        for _ in range(2 * self.M + 3):
            d = self.mul(self.inv(self.power(y, self.p)), x)
            if d == self.identity:
                return y
            if any(c % self.p for c in d):
                raise NonConvergent("element has no p-th root at this depth")
            y = self.mul(y, tuple(c // self.p for c in d))
        raise NonConvergent("p-th root refinement did not stabilize")

    # -- derived structure -------------------------------------------------

    def right_mul_table(self, h: Digits) -> np.ndarray:
        """Permutation of element indices given by right multiplication.

        Generator tables are built from group arithmetic; everything else
        is composed from them along the digit word of h, since
        x h = ((x g_1^(h_1)) g_2^(h_2)) ... matches the basis order."""
        h = self.check_digits(h)
        t = self._tables.get(h)
        if t is None:
            if sum(h) == 1:
                rh = self.realize(h)
                t = np.empty(self.order, dtype=np.int32)
                for idx, x in enumerate(self.all_elements()):
                    t[idx] = self.index_of(self.decompose(self._mul(self.realize(x), rh)))
            else:
                t = np.arange(self.order, dtype=np.int32)
                for i, e in enumerate(h):
                    if e:
                        g = self.right_mul_table(self.generator(i))
                        for _ in range(e):
                            t = g[t]
            self._tables[h] = t
        return t

    def random_element(self, rng) -> Digits:
        return tuple(int(rng.integers(self.pM)) for _ in range(self.n))

    def random_in_filtration(self, rng, two_omega_min: int) -> Digits:
        """Uniform digit vector subject to doubled valuation >= the bound."""
        out = []
        for w in self.two_omega:
            e = max(0, -(-(two_omega_min - w) // 2))  # ceil
            if e >= self.M:
                out.append(0)
            else:
                out.append(self.p**e * int(rng.integers(self.pM // self.p**e)))
        return tuple(out)

    def central_witness(self, i: int) -> tuple[Digits, Digits, Digits]:
        """(x, y, w) with C_i = [x, y] * w^p holding exactly in the
        truncated group; certifies that the C generators are commutators
        up to p-th powers."""
        target = self.generator(2 * self.f + i)
        a, b = self._witness_pair(i)
        for x, y in ((a, b), (b, a)):
            c = self.commutator(x, y)
            r = self.mul(self.inv(c), target)
            t = self.two_omega_of(r)
            if t is None or t >= 3:
                w = self.pth_root(r)
                assert self.mul(c, self.power(w, self.p)) == target
                return x, y, w
        raise NonConvergent("no commutator witness with small enough residual")

    # -- to be provided per case -------------------------------------------

    def _realize(self, x: Digits):
        raise NotImplementedError

    def _decompose(self, concrete) -> Digits:
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def _key(self, concrete):
        raise NotImplementedError

    def _witness_pair(self, i: int) -> tuple[Digits, Digits]:
        raise NotImplementedError


class GL2Model(GroupModel):
    def __init__(self, p: int, f: int, M: int):
        super().__init__(p, f, M)
        self.ring = zq_ring(p, f, M + 1)
        R = self.ring
        tb = R.teich_basis
        self._tb = tb
        self._tdiag = [R.one + p * tb[i] for i in range(f)]  # 1 + p[a^i]
        self._tdiag_inv = [R.inv(t) for t in self._tdiag]

    # concrete elements are 4-tuples (a, b, c, d) of ring elements, det 1

    def _key(self, m):
        return (m[0].vec, m[1].vec, m[2].vec, m[3].vec)

    def _mul(self, m, n):
        a, b, c, d = m
        e, f_, g, h = n
        return (a * e + b * g, a * f_ + b * h, c * e + d * g, c * f_ + d * h)

    def _inv(self, m):
        a, b, c, d = m
        return (d, -b, -c, a)

    def _realize(self, x):
        R = self.ring
        f = self.f
        u = R.zero
        w = R.zero
        for i in range(f):
            if x[i]:
                u = u + x[i] * self._tb[i]
            if x[f + i]:
                w = w + (self.p * x[f + i]) * self._tb[i]
        t = R.one
        for i in range(f):
            e = x[2 * f + i]
            if e:
                t = t * self._tdiag[i] ** e
        ti = R.inv(t)
        # U(u) * L(w) * D(t)
        return (t + u * (w * t), u * ti, w * t, ti)

    def _decompose(self, m):
        R = self.ring
        p, f, M = self.p, self.f, self.M
        a, b, c, d = m
        if not R.is_unit(d):
            raise NotInGroup("lower-right entry must be a unit")
        t = R.inv(d)
        u = b * t
        w = c * d
        digits = [0] * self.n
        for i, cu in enumerate(R.teich_coords(u)):
            digits[i] = cu % self.pM
        for i, cw in enumerate(R.teich_coords(w)):
            if cw % p:
                raise NotInGroup("lower-left entry must vanish mod p")
            digits[f + i] = (cw // p) % self.pM
        # peel the diagonal part t in 1 + pO against 1 + p[a^i]
        cur = t
        for k in range(1, M + 1):
            pk = p**k
            dev = R.teich_coords(cur - R.one)
            for i in range(f):
                if dev[i] % pk:
                    raise NotInGroup("diagonal part must be congruent to 1 mod p")
                delta = (dev[i] // pk) % p
                if delta:
                    digits[2 * f + i] += delta * p ** (k - 1)
                    cur = cur * self._tdiag_inv[i] ** (delta * p ** (k - 1))
        if cur != R.one:
            raise NotInGroup("diagonal peeling did not terminate")
        return tuple(digits)

    def normalize(self, entries) -> Digits:
        """Digits of a user-supplied matrix [[a,b],[c,d]]: validates the
        congruence pattern, scales to determinant 1, decomposes."""
        R = self.ring
        elems = []
        for e in entries:
            elems.append(R.element(e) if not isinstance(e, int) else R.from_int(e))
        a, b, c, d = elems
        if (a - R.one).vp() < 1 or (d - R.one).vp() < 1 or c.vp() < 1:
            raise NotInGroup("matrix is not in the pro-p Iwahori pattern")
        det = a * d - b * c
        s = R.inv(R.hensel_sqrt(det))
        return self.decompose((a * s, b * s, c * s, d * s))

    def _witness_pair(self, i):
        # an upper element with entry [a^i] against the first lower generator
        return self.generator(i), self.generator(self.f)


class QuatModel(GroupModel):
    def __init__(self, p: int, f: int, M: int):
        super().__init__(p, f, M)
        self.ctx = quat_context(p, f, M + 1)
        R = self.ctx.ring
        F = R.field
        self.sig_idx = F.frob.copy()
        for _ in range(f - 1):
            self.sig_idx = F.frob[self.sig_idx]
        alpha = self.ctx.alpha_residue()
        zeta = F.gen
        at = [R.teichmuller(F.pow(alpha, i)) for i in range(f)]
        zt = R.teichmuller(zeta)
        self._gens = []
        for i in range(f):
            self._gens.append(self._norm_one(self.ctx.quat(R.one, at[i])))
        for i in range(f):
            self._gens.append(self._norm_one(self.ctx.quat(R.one, at[i] * zt)))
        for i in range(f):
            self._gens.append(self._norm_one(self.ctx.quat(R.one + p * (at[i] * zt), R.zero)))
        # residue-field solvers for the two layer types
        ap = [F.pow(alpha, i) for i in range(f)]
        half_cols = [F.coords(e) for e in ap]
        half_cols += [F.coords(F.mul[e, zeta]) for e in ap]
        self._half = ColumnSolver(half_cols, F)
        eta = F.mul[F.add[zeta, F.neg[self.sig_idx[zeta]]], F.inv[2]]
        self._eta = int(eta)
        self._int = ColumnSolver([F.coords(F.mul[e, eta]) for e in ap], F)

    def _norm_one(self, q: Quaternion) -> Quaternion:
        R = self.ctx.ring
        s = R.inv(R.hensel_sqrt(q.nrd()))
        return self.ctx.quat(q.a * s, q.b * s)

    def _key(self, q):
        return (q.a.vec, q.b.vec)

    def _mul(self, a, b):
        return a * b

    def _inv(self, a):
        return a.inv()

    def _realize(self, x):
        acc = self.ctx.one
        for i in range(self.n):
            if x[i]:
                g = self._gens[i]
                e = x[i]
                pw = g
                out = None
                while e:
                    if e & 1:
                        out = pw if out is None else out * pw
                    pw = pw * pw
                    e >>= 1
                acc = acc * out
        return acc

    def _decompose(self, q):
        R = self.ctx.ring
        F = R.field
        p, f, M = self.p, self.f, self.M
        if (q.a - R.one).vp() < 1:
            raise NotInGroup("scalar part must be congruent to 1 mod p")
        digits = [0] * self.n
        y: Digits = self.identity
        for step in range(1, 2 * M + 1):
            d = self.realize(y).inv() * q
            if step % 2 == 1:  # level k + 1/2: b-part layer at depth k
                k = (step - 1) // 2
                pk = p**k
                vec = d.b.vec
                if any(c % pk for c in vec):
                    raise NotInGroup("b-part layer appeared below its level")
                beta = F.index((c // pk) % p for c in vec)
                if beta:
                    sol = self._half.solve(F.coords(beta))
                    for i in range(f):
                        digits[i] += int(sol[i]) * pk
                        digits[f + i] += int(sol[f + i]) * pk
            else:  # level k: a-part layer at depth k, anti-fixed
                k = step // 2
                pk = p**k
                vec = (d.a - R.one).vec
                if any(c % pk for c in vec):
                    raise NotInGroup("a-part layer appeared below its level")
                gamma = F.index((c // pk) % p for c in vec)
                if gamma:
                    sol = self._int.solve(F.coords(gamma))
                    if sol is None:
                        raise NotInGroup("a-part layer is not anti-fixed")
                    for i in range(f):
                        digits[2 * f + i] += int(sol[i]) * p ** (k - 1)
            y = tuple(digits)
        d = self.realize(y).inv() * q
        if d.a != R.one or d.b.vp() < M:
            raise NotInGroup("digit extraction did not terminate")
        return y

    def normalize(self, a_coords, b_coords) -> Digits:
        """Digits of a user-supplied unit a + b*P: validates the unit-one
        pattern, scales to reduced norm 1, decomposes."""
        R = self.ctx.ring
        q = self.ctx.quat(R.element(a_coords), R.element(b_coords))
        if (q.a - R.one).vp() < 1:
            raise NotInGroup("scalar part must be congruent to 1 mod p")
        return self.decompose(self._norm_one(q))

    def _witness_pair(self, i):
        # b-part gamma with gamma - sigma(gamma) = a^i eta, i.e. a^i eta / 2
        F = self.ctx.ring.field
        alpha = self.ctx.alpha_residue()
        gamma = F.mul[F.mul[F.pow(alpha, i), self._eta], F.inv[2]]
        sol = self._half.solve(F.coords(int(gamma)))
        if sol is None:
            raise NonConvergent("witness layer target not solvable")
        x = [0] * self.n
        for j in range(self.f):
            x[j] = int(sol[j])
            x[self.f + j] = int(sol[self.f + j])
        return tuple(x), self.generator(0)


def quaternion_commutator_congruence(p: int, f: int, level: int = 3) -> dict:
    """The commutator of 1 + [zeta]Pi against 1 + gamma Pi equals
    1 + gamma([zeta] - [zeta^(p^f)]) p modulo p Pi O_D, for gamma running
    over all Teichmueller representatives of the residue field of the
    unramified part.

    gamma runs over a full set of representatives of O_K/p^2, where O_K is
    the base ring fixed by the conjugation: Teichmueller lifts of the fixed
    subfield at both digits (p^(2f) values; 25 for f = 1).

    Membership in p Pi O_D means: scalar part divisible by p^2, Pi-part
    divisible by p.  The commutator convention (which of the two bracket
    orders) is not pinned a priori; both are tried on a nonzero sample and
    the matching one is used throughout, recorded in the report."""
    ctx = quat_context(p, f, level)
    R = ctx.ring
    F = R.field
    sig_idx = F.frob.copy()
    for _ in range(f - 1):
        sig_idx = F.frob[sig_idx]
    fixed = [i for i in range(F.q) if sig_idx[i] == i]
    assert len(fixed) == p**f
    zt = R.teichmuller(F.gen)
    u = ctx.quat(R.one, zt)
    coeff = (zt - ctx.sigma(zt)) * ctx.p_elem

    def bracket(v, order):
        return u.inv() * v.inv() * u * v if order == 0 else u * v * u.inv() * v.inv()

    def holds(g, order):
        v = ctx.quat(R.one, g)
        d = bracket(v, order)
        rhs_a = R.one + g * coeff
        return (d.a - rhs_a).vp() >= 2 and d.b.vp() >= 1

    order = 0 if holds(R.one, 0) else 1
    checked = 0
    failures = []
    for r0 in fixed:
        for r1 in fixed:
            g = R.teichmuller(r0) + R.teichmuller(r1) * R.from_int(p)
            if not holds(g, order):
                failures.append((r0, r1))
            checked += 1
    return {
        "p": p, "f": f, "level": level,
        "convention": "inverse-first" if order == 0 else "direct-first",
        "gammas_checked": checked, "failures": failures[:10], "ok": not failures,
    }


@functools.lru_cache(maxsize=None)
def _model(p: int, f: int, M: int, case: str) -> GroupModel:
    if case == "GL2":
        return GL2Model(p, f, M)
    if case == "QUAT":
        return QuatModel(p, f, M)
    raise ConfigError(f"unknown case {case!r}")


def group_model(cfg: PrimeConfig) -> GroupModel:
    return _model(cfg.p, cfg.f, cfg.M, cfg.case)
