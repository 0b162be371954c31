"""Truncated group ring: dense multiplication, the monomial expansion, the
weight filtration, and the maximal-ideal power certificate."""

import numpy as np
import pytest

from propring.algebra import check_maximal_ideal_powers, group_algebra
from propring.config import PrimeConfig
from propring.errors import CutoffBeyondFaithful
from propring.graded import hilbert_oracle


def rand_sparse(alg, rng, support=12):
    v = alg.zero()
    idx = rng.choice(alg.order, size=support, replace=False)
    v[idx] = rng.integers(0, alg.p, size=support)
    return v


def test_group_embedding_multiplicative(alg, rng):
    m = alg.model
    for _ in range(50):
        x, y = m.random_element(rng), m.random_element(rng)
        lhs = alg.mul(alg.of_group(x), alg.of_group(y))
        assert np.array_equal(lhs, alg.of_group(m.mul(x, y)))


def test_mul_associative_and_distributive(alg, rng):
    for _ in range(15):
        a, b, c = (rand_sparse(alg, rng) for _ in range(3))
        assert np.array_equal(alg.mul(alg.mul(a, b), c), alg.mul(a, alg.mul(b, c)))
        lhs = alg.mul(a, (b + c) % alg.p)
        rhs = (alg.mul(a, b) + alg.mul(a, c)) % alg.p
        assert np.array_equal(lhs, rhs)


def test_monomial_expansion_roundtrip(alg, rng):
    for _ in range(10):
        a = rand_sparse(alg, rng)
        assert np.array_equal(alg.from_monomial(alg.to_monomial(a)), a)
        c = rand_sparse(alg, rng)
        assert np.array_equal(alg.to_monomial(alg.from_monomial(c)), c)


def test_monomial_weight_is_nu(alg, rng):
    for _ in range(40):
        k = tuple(int(v) for v in rng.integers(0, alg.pM, size=alg.n))
        if alg.nu_prime(k) < alg.pM:
            assert alg.nu(alg.monomial(k)) == alg.nu_prime(k)


def test_augmentation_generator_weights(alg):
    m = alg.model
    one = alg.of_group(m.identity)
    for i in range(m.n):
        zi = (alg.of_group(m.generator(i)) - one) % alg.p
        assert alg.nu(zi) == m.two_omega[i]
        assert np.array_equal(zi, alg.monomial(m.generator(i)))


def test_product_weights_superadditive(alg, rng):
    for _ in range(30):
        a, b = rand_sparse(alg, rng, 6), rand_sparse(alg, rng, 6)
        va, vb, vab = alg.nu(a), alg.nu(b), alg.nu(alg.mul(a, b))
        if va is None or vb is None:
            assert vab is None
        elif vab is not None:
            assert vab >= va + vb


def test_in_filtration(alg):
    zc = alg.monomial(alg.model.generator(2 * alg.model.f))
    assert alg.in_filtration(zc, 2)
    assert not alg.in_filtration(zc, 3)


def test_nu_faithful_rejects_vanishing(alg):
    with pytest.raises(CutoffBeyondFaithful):
        alg.nu_faithful(alg.zero())


def test_hilbert_counts_frozen(alg):
    assert alg.hilbert_counts(6) == [1, 2, 4, 6, 9, 12, 16]
    assert alg.hilbert_counts(6) == hilbert_oracle(6, 1, False)


def test_sparse_expansion_matches_dense(alg, rng):
    for _ in range(10):
        g = alg.model.random_element(rng)
        sparse = alg.expand_group_sparse(g)
        dense = alg.to_monomial(alg.of_group(g))
        ref = {k: int(v) for k, v in sparse.items() if v}
        got = {
            alg.model.digits_of(int(i)): int(dense[i]) for i in np.nonzero(dense)[0]
        }
        assert ref == got


def test_maxideal_powers_certificate(alg):
    cert = check_maximal_ideal_powers(alg, jmax=6)
    assert cert.ok
    assert cert.violations == []
    assert cert.functionals_checked > 0
    assert "certified" in cert.summary()


@pytest.mark.parametrize("p,f,T", [(5, 2, 3), (7, 1, 4)])
def test_hilbert_counts_other_parameters(p, f, T):
    alg = group_algebra(PrimeConfig(p, f, 1, "GL2"))
    assert alg.hilbert_counts(T) == hilbert_oracle(T, f, False)
