"""The truncated completed group ring F_p[G/G^(p^M)] and its canonical
filtration by powers of the maximal ideal.

Elements are dense vectors over F_p indexed by group digit vectors (flat
index order of groups.GroupModel).  The second coordinate system is the
monomial basis

    z^k = (g_1 - 1)^(k_1) (g_2 - 1)^(k_2) ... (g_n - 1)^(k_n),

ordered products over the generating family, k in [0, p^M)^n.  A group
element with digits x expands as

    [x] = sum_k  prod_i binom(x_i, k_i)  z^k      (mod p),

an exact finite identity because the ordered product of the generator
powers matches the ordering of the monomials, so the change of basis is a
tensor product of univariate binomial matrices mod p.  Its inverse is
computed, not hand-signed.

The weight of a monomial index is nu'(k) = sum_i w_i k_i with w = 1 for the
A and B positions and w = 2 for the C positions (doubled generator
valuations).  The certified statement about the maximal ideal m (kernel of
the augmentation) is

    m^j = span{ z^k : nu'(k) >= j }   for all j,

from which nu(a) = max{j : a in m^j} is read off the monomial support.
The certificate is non-circular: the inclusion m^j <= span comes from a
dual induction (the coefficient functionals e_k with nu'(k) < j kill m^j,
checked through the operators phi -> phi(. z_i) which generate the step
from m^j to m^(j+1)), and the reverse dimension bound comes from exhibited
group witnesses C_i = [x,y] w^p which place every z^k inside m^(nu'(k)).
Truncation is faithful for nu below p^M: the kernel of the projection from
the full completed ring is spanned by monomials with some k_i >= p^M, all
of weight at least p^M.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools

import numpy as np

from .config import PrimeConfig
from .errors import CutoffBeyondFaithful
from .gf import gf, rank, rref
from .groups import Digits, GroupModel, group_model


def _binom_table(rows: int, p: int) -> np.ndarray:
    b = np.zeros((rows, rows), dtype=np.int16)
    b[:, 0] = 1
    for x in range(1, rows):
        for k in range(1, x + 1):
            b[x, k] = (b[x - 1, k - 1] + b[x - 1, k]) % p
    return b


class GroupAlgebra:
    def __init__(self, model: GroupModel):
        self.model = model
        self.p = model.p
        self.n = model.n
        self.pM = model.pM
        self.order = model.order
        self.nu_weights = tuple(model.two_omega)
        self._P = _binom_table(self.pM, self.p)  # P[x, k] = binom(x, k)
        self._Q = self._invert_mod_p(self._P)
        self._nu_w: np.ndarray | None = None
        self._perms: list[np.ndarray] | None = None
        self._mono_cache: dict[Digits, np.ndarray] = {}

    def _invert_mod_p(self, m: np.ndarray) -> np.ndarray:
        F = gf(self.p, 1)
        aug = np.concatenate(
            [m.astype(np.int16), np.eye(len(m), dtype=np.int16)], axis=1
        )
        red, piv = rref(aug, F)
        assert list(piv) == list(range(len(m)))
        return red[:, len(m) :].copy()

    # -- dense vectors -------------------------------------------------------

    def zero(self) -> np.ndarray:
        return np.zeros(self.order, dtype=np.int16)

    def of_group(self, x: Digits) -> np.ndarray:
        a = self.zero()
        a[self.model.index_of(self.model.check_digits(x))] = 1
        return a

    def of_dict(self, terms: dict[Digits, int]) -> np.ndarray:
        a = self.zero()
        for x, c in terms.items():
            a[self.model.index_of(self.model.check_digits(x))] = (
                a[self.model.index_of(self.model.check_digits(x))] + c
            ) % self.p
        return a

    def to_dict(self, a: np.ndarray) -> dict[Digits, int]:
        out = {}
        for idx in np.nonzero(a)[0]:
            out[self.model.digits_of(int(idx))] = int(a[idx])
        return out

    # -- multiplication ------------------------------------------------------

    def gen_perm(self, i: int) -> np.ndarray:
        if self._perms is None:
            self._perms = [None] * self.n
        if self._perms[i] is None:
            self._perms[i] = self.model.right_mul_table(self.model.generator(i))
        return self._perms[i]

    def gmul(self, a: np.ndarray, x: Digits) -> np.ndarray:
        """Right multiplication by the group element with digits x."""
        perm = self.model.right_mul_table(x)
        out = np.empty_like(a)
        out[perm] = a
        return out

    def zmul(self, a: np.ndarray, i: int, e: int = 1) -> np.ndarray:
        """Right multiplication by (g_i - 1)^e."""
        perm = self.gen_perm(i)
        for _ in range(e):
            b = np.empty_like(a)
            b[perm] = a
            a = (b - a) % self.p
        return a

    def word_mul(self, a: np.ndarray, word) -> np.ndarray:
        """Right multiplication by an ordered word of (i, e) z-chunks."""
        for i, e in word:
            a = self.zmul(a, i, e)
        return a

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """General product; cost scales with the support of b."""
        out = self.zero().astype(np.int64)
        for idx in np.nonzero(b)[0]:
            out += int(b[idx]) * self.gmul(a, self.model.digits_of(int(idx)))
        return (out % self.p).astype(np.int16)

    def monomial(self, k: Digits) -> np.ndarray:
        """Dense vector of z^k."""
        k = tuple(int(c) for c in k)
        m = self._mono_cache.get(k)
        if m is None:
            m = self.of_group(self.model.identity)
            for i, e in enumerate(k):
                if e:
                    m = self.zmul(m, i, e)
            self._mono_cache[k] = m
        return m

    # -- basis transforms ----------------------------------------------------

    def _axis_apply(self, mat: np.ndarray, arr: np.ndarray) -> np.ndarray:
        """Contract mat[k, x] against each of the n digit axes of arr;
        arr may carry one leading batch axis."""
        lead = arr.shape[:-1]
        a = arr.reshape(lead + (self.pM,) * self.n).astype(np.float64)
        m = mat.astype(np.float64)
        off = len(lead)
        for ax in range(self.n):
            a = np.moveaxis(np.tensordot(a, m, axes=([off + ax], [1])), -1, off + ax)
            a %= self.p
        return a.astype(np.int16).reshape(lead + (self.order,))

    def to_monomial(self, a: np.ndarray) -> np.ndarray:
        """Coefficients over the z^k basis, same flat index layout."""
        return self._axis_apply(self._P.T, a)

    def from_monomial(self, c: np.ndarray) -> np.ndarray:
        return self._axis_apply(self._Q.T, c)

    def dual_to_monomial(self, phi: np.ndarray) -> np.ndarray:
        """Coordinates of a functional (values on the group basis) over the
        coefficient functionals e_k."""
        return self._axis_apply(self._Q, phi)

    # -- expansion without dense arrays --------------------------------------

    def expand_group_sparse(self, x: Digits) -> dict[Digits, int]:
        """Monomial expansion of a single group element by the closed form;
        works at any size since no full-space array is involved."""
        x = self.model.check_digits(x)
        per_axis = []
        for xi in x:
            col = [(k, int(self._P[xi, k])) for k in range(xi + 1) if self._P[xi, k]]
            per_axis.append(col)
        out = {}
        for combo in itertools.product(*per_axis):
            coeff = 1
            for _, c in combo:
                coeff = (coeff * c) % self.p
            out[tuple(k for k, _ in combo)] = coeff
        return out

    def expand_dict_sparse(self, terms: dict[Digits, int]) -> dict[Digits, int]:
        out: dict[Digits, int] = {}
        for x, c in terms.items():
            for k, ck in self.expand_group_sparse(x).items():
                v = (out.get(k, 0) + c * ck) % self.p
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return out

    # -- weights and nu --------------------------------------------------------

    def nu_prime(self, k) -> int:
        return sum(w * int(c) for w, c in zip(self.nu_weights, k))

    @property
    def nu_weight_array(self) -> np.ndarray:
        if self._nu_w is None:
            w = np.zeros(1, dtype=np.int32)
            for wi in self.nu_weights:
                w = np.add.outer(w, wi * np.arange(self.pM, dtype=np.int32)).ravel()
            self._nu_w = w
        return self._nu_w

    def nu_max(self) -> int:
        return sum(w * (self.pM - 1) for w in self.nu_weights)

    def nu(self, a: np.ndarray) -> int | None:
        """min nu' over the monomial support; None for zero."""
        c = self.to_monomial(a)
        hit = np.nonzero(c)[0]
        if hit.size == 0:
            return None
        return int(self.nu_weight_array[hit].min())

    def nu_sparse(self, expansion: dict[Digits, int]) -> int | None:
        vals = [self.nu_prime(k) for k, c in expansion.items() if c % self.p]
        return min(vals) if vals else None

    def nu_faithful(self, a: np.ndarray) -> int:
        """nu with the guarantee that it agrees with the untruncated ring;
        beyond p^M the truncation cannot certify the value."""
        v = self.nu(a)
        if v is None or v >= self.pM:
            raise CutoffBeyondFaithful(
                f"nu is at least {self.pM}, beyond the faithful range of depth M={self.model.M}"
            )
        return v

    def in_filtration(self, a: np.ndarray, j: int) -> bool:
        """Membership in span{z^k : nu'(k) >= j} (= m^j once certified)."""
        c = self.to_monomial(a)
        return not c[self.nu_weight_array < j].any()

    def hilbert_counts(self, jmax: int) -> list[int]:
        w = self.nu_weight_array
        return [int((w == j).sum()) for j in range(jmax + 1)]


@dataclasses.dataclass
class MaxidealCertificate:
    ok: bool
    functionals_checked: int
    jmax: int
    witnesses: list[dict]
    violations: list[dict]
    primal_crosschecked: bool

    def summary(self) -> str:
        state = "certified" if self.ok else "FAILED"
        extra = ", primal span cross-checked" if self.primal_crosschecked else ""
        return (
            f"maximal-ideal powers {state}: {self.functionals_checked} coefficient "
            f"functionals through weight {self.jmax}, {len(self.witnesses)} central "
            f"witnesses{extra}"
        )


def check_maximal_ideal_powers(
    alg: GroupAlgebra, jmax: int | None = None, chunk: int = 512
) -> MaxidealCertificate:
    """Certify m^j = span{z^k : nu'(k) >= j} for 0 <= j <= jmax + 1.

    Two halves, neither assuming the conclusion:

    * Dual induction.  ann(m^j) in the dual is spanned by the coefficient
      functionals e_k with nu'(k) < j.  Since the augmentation ideal is
      generated by the z_i on either side, m^(j+1) = sum_i m^j z_i, so the
      step needs exactly: e_k composed with right multiplication by z_i
      lies in span{e_k' : nu'(k') < nu'(k)}.  That membership is what the
      batched sweep below verifies for every k, reading the composed
      functional off the right-multiplication permutation and taking its
      coordinates over the e_k'.
    * Dimension count.  The inclusion above caps dim ann(m^j); equality
      needs dim m^j >= #{nu' >= j}, which follows once z_i lies in m^(w_i).
      Weight one is the definition of m; weight two is certified by the
      group identity C_i = [x, y] w^p (checked exactly), because
      [x,y] - 1 = x^(-1)y^(-1)((x-1)(y-1) - (y-1)(x-1)) lands in m^2 and
      w^p - 1 = (w - 1)^p in characteristic p.

    At depth M = 1 the filtration is additionally rebuilt primally
    (closure of spans under right multiplication) and compared, an
    independent exhaustive oracle at small size.
    """
    model = alg.model
    p, n, pM, order = alg.p, alg.n, alg.pM, alg.order
    nu_w = alg.nu_weight_array
    if jmax is None:
        jmax = alg.nu_max()

    witnesses = []
    for i in range(model.f):
        x, y, w = model.central_witness(i)
        target = model.generator(2 * model.f + i)
        ok = model.mul(model.commutator(x, y), model.power(w, p)) == target
        witnesses.append(
            {"generator": 2 * model.f + i, "x": x, "y": y, "w": w, "holds": bool(ok)}
        )

    perms = [alg.gen_perm(i) for i in range(n)]
    digit_grid = [
        (np.arange(order, dtype=np.int64) // (pM ** (n - 1 - i))) % pM for i in range(n)
    ]

    sel = np.nonzero(nu_w <= jmax)[0]
    violations: list[dict] = []
    checked = 0
    for start in range(0, sel.size, chunk):
        ks = sel[start : start + chunk]
        kdig = [(ks // (pM ** (n - 1 - i))) % pM for i in range(n)]
        rows = np.ones((ks.size, order), dtype=np.int16)
        for i in range(n):
            rows *= alg._P[digit_grid[i][None, :], kdig[i][:, None]]
            rows %= p
        level = nu_w[ks]
        for i in range(n):
            delta = (rows[:, perms[i]] - rows) % p
            coords = alg.dual_to_monomial(delta)
            bad = (coords != 0) & (nu_w[None, :] >= level[:, None])
            if bad.any():
                for r, c in zip(*np.nonzero(bad)):
                    violations.append(
                        {
                            "k": model.digits_of(int(ks[r])),
                            "generator": i,
                            "lands_on": model.digits_of(int(c)),
                        }
                    )
                    if len(violations) >= 10:
                        break
        checked += ks.size

    primal = False
    if model.M == 1:
        primal = _primal_crosscheck(alg)

    ok = all(w["holds"] for w in witnesses) and not violations and (model.M != 1 or primal)
    return MaxidealCertificate(
        ok=ok,
        functionals_checked=checked,
        jmax=jmax,
        witnesses=witnesses,
        violations=violations,
        primal_crosschecked=primal,
    )


def _primal_crosscheck(alg: GroupAlgebra) -> bool:
    """Rebuild m^j at depth 1 by repeated right multiplication and compare
    with the weighted monomial spans, exhaustively."""
    F = gf(alg.p, 1)
    order = alg.order
    idx_id = alg.model.index_of(alg.model.identity)
    basis = []
    for idx in range(order):
        if idx == idx_id:
            continue
        v = alg.zero()
        v[idx] = 1
        v[idx_id] = alg.p - 1
        basis.append(v)
    cur, piv = rref(np.array(basis, dtype=np.int16), F)
    for j in range(1, alg.nu_max() + 2):
        target = [alg.monomial(alg.model.digits_of(int(k))) for k in np.nonzero(alg.nu_weight_array >= j)[0]]
        dim_m = cur.shape[0]
        if dim_m != len(target):
            return False
        if target and rank(np.concatenate([cur, np.array(target, dtype=np.int16)]), F) != dim_m:
            return False
        nxt = [alg.zmul(row, i) for row in cur for i in range(alg.n)]
        if not nxt:
            break
        cur, piv = rref(np.array(nxt, dtype=np.int16), F)
        if cur.shape[0] == 0:
            cur = np.zeros((0, order), dtype=np.int16)
    return True


@functools.lru_cache(maxsize=None)
def _algebra(p: int, f: int, M: int, case: str) -> GroupAlgebra:
    return GroupAlgebra(group_model(PrimeConfig(p=p, f=f, M=M, case=case)))


def group_algebra(cfg: PrimeConfig) -> GroupAlgebra:
    return _algebra(cfg.p, cfg.f, cfg.M, cfg.case)
