"""Unit arithmetic over truncated unramified extensions and the ramified
quaternion order: Teichmueller lifts, Hensel square roots, Frobenius,
reduced norms."""

from fractions import Fraction

import pytest

from propring.errors import InputNotUnitOne
from propring.padic import quat_context, zq_ring

R25 = zq_ring(5, 1, 2)


def test_teichmuller_frozen_values():
    # the unique x = 2 mod 5 with x^5 = x in Z/25 is 7
    assert R25.teichmuller(2).vec == (7,)
    assert R25.teichmuller(3).vec == (18,)


def test_teichmuller_multiplicative_and_fixed():
    for a in range(5):
        ta = R25.teichmuller(a)
        assert ta**5 == ta
        for b in range(5):
            assert ta * R25.teichmuller(b) == R25.teichmuller((a * b) % 5)


def test_hensel_sqrt_frozen_values():
    assert R25.hensel_sqrt(R25.from_int(21)).vec == (11,)
    assert R25.hensel_sqrt(R25.from_int(6)).vec == (16,)


def test_hensel_sqrt_squares_back():
    for u in (1, 6, 11, 16, 21):
        r = R25.hensel_sqrt(R25.from_int(u))
        assert r * r == R25.from_int(u)
        assert r.residue_index == 1


def test_hensel_sqrt_rejects_non_unit_one():
    with pytest.raises(InputNotUnitOne):
        R25.hensel_sqrt(R25.from_int(7))


def test_inverse_frozen_value():
    assert R25.inv(R25.from_int(6)) == R25.from_int(21)
    for x in (1, 2, 3, 4, 6, 7, 21, 24):
        e = R25.from_int(x)
        assert e * R25.inv(e) == R25.from_int(1)


def test_valuation_and_units():
    assert R25.from_int(5).vp() == 1
    assert R25.from_int(1).vp() == 0
    assert R25.from_int(0).vp() == 2  # capped at the truncation level
    assert R25.is_unit(R25.from_int(7))
    assert not R25.is_unit(R25.from_int(10))


def test_unramified_degree_two_frobenius():
    R = zq_ring(5, 2, 2)
    frob = R.frobenius(1)
    one = R.from_int(1)
    assert frob(one) == one
    for idx in range(1, 25):
        t = R.teichmuller(idx)
        # order two on the degree-two extension, multiplicative
        assert frob(frob(t)) == t
        assert frob(t * t) == frob(t) * frob(t)
        assert frob(t + one) == frob(t) + one


def test_teich_coordinate_roundtrip():
    R = zq_ring(5, 2, 2)
    for idx in (0, 1, 7, 12, 23):
        e = R.teichmuller(idx) + R.teichmuller((idx * 3) % 25) * R.from_int(5)
        assert R.from_teich_coords(R.teich_coords(e)) == e


def test_quaternion_norm_frozen():
    ctx = quat_context(5, 1, 3)
    R = ctx.ring
    one_plus_pi = ctx.quat(R.from_int(1), R.from_int(1))
    assert one_plus_pi.nrd() == R.from_int(1 - 5)


def test_quaternion_uniformizer():
    ctx = quat_context(5, 1, 3)
    R = ctx.ring
    pi = ctx.quat(R.from_int(0), R.from_int(1))
    assert pi.pi_val() == Fraction(1, 2)
    assert pi * pi == ctx.quat(R.from_int(5), R.from_int(0))
    assert pi.nrd() == R.from_int(-5)


def test_quaternion_norm_multiplicative():
    import numpy as np

    ctx = quat_context(5, 1, 3)
    R = ctx.ring
    rng = np.random.default_rng(11)

    def rand_unit():
        while True:
            q = ctx.quat(R.from_int(int(rng.integers(125))),
                         R.from_int(int(rng.integers(125))))
            if R.is_unit(q.nrd()):
                return q

    for _ in range(25):
        x, y = rand_unit(), rand_unit()
        assert (x * y).nrd() == x.nrd() * y.nrd()
        assert (x * y).conj() == y.conj() * x.conj()
        xi = x.inv()
        assert x * xi == ctx.quat(R.from_int(1), R.from_int(0))
