"""JSON forms of configs, elements, ideals, and modules."""

import numpy as np
import pytest

from propring.algebra import group_algebra
from propring.config import PrimeConfig
from propring.errors import ConfigError
from propring.gf import gf
from propring.graded import default_ideals
from propring.jsonio import (
    algebra_element_from_json,
    algebra_element_to_json,
    config_from_json,
    digits_from_json,
    digits_to_json,
    element_nu,
    group_element_digits,
    ideal_spec_from_json,
    ideal_spec_to_json,
    module_from_json,
    module_to_json,
    monomial_expansion_to_json,
    to_jsonable,
)
from propring.modules import quotient_module

F5 = gf(5, 1)


def test_config_roundtrip():
    cfg = config_from_json({"p": 5, "f": 1, "M": 2, "N": 1, "case": "QUAT"})
    assert cfg == PrimeConfig(5, 1, 2, "QUAT", N=1)
    with pytest.raises(ConfigError):
        config_from_json({"p": 5, "f": 1, "case": "GL2"})
    with pytest.raises(ConfigError):
        config_from_json([1, 2])


def test_digits_roundtrip():
    cfg = PrimeConfig(5, 1, 2, "GL2")
    d = digits_to_json((21, 6, 24))
    assert digits_from_json(d, cfg) == (21, 6, 24)
    with pytest.raises(ConfigError):
        digits_from_json({"digits": [1, 2]}, cfg)
    with pytest.raises(ConfigError):
        digits_from_json({"digits": [25, 0, 0]}, cfg)


def test_group_element_dispatch():
    cfg, digits = group_element_digits(
        {"p": 5, "f": 1, "M": 2, "case": "GL2", "matrix": [[1, 1], [5, 6]]}
    )
    assert cfg.case == "GL2"
    assert digits == (21, 6, 24)
    cfg2, digits2 = group_element_digits(
        {"p": 5, "f": 1, "M": 2, "case": "GL2", "digits": [21, 6, 24]}
    )
    assert digits2 == (21, 6, 24)


def test_algebra_element_roundtrip():
    alg = group_algebra(PrimeConfig(5, 1, 2, "GL2"))
    items = [
        {"digits": [0, 0, 1], "coeff": 1},
        {"digits": [0, 0, 0], "coeff": [4]},
    ]
    comps = algebra_element_from_json(alg, items)
    assert len(comps) == 1
    assert element_nu(alg, comps) == 2
    out = algebra_element_to_json(alg, comps)
    assert algebra_element_to_json(alg, algebra_element_from_json(alg, out)) == out


def test_algebra_element_components_f2():
    alg = group_algebra(PrimeConfig(5, 2, 1, "GL2"))
    items = [
        {"digits": [1, 0, 0, 0, 0, 0], "coeff": [0, 1]},
        {"digits": [0, 0, 0, 0, 0, 0], "coeff": [0, 4]},
    ]
    comps = algebra_element_from_json(alg, items)
    assert len(comps) == 2
    assert not comps[0].any()
    assert element_nu(alg, comps) == 1
    exp = monomial_expansion_to_json(alg, comps, 2)
    assert exp["terms"] == [{"exps": [1, 0, 0, 0, 0, 0], "coeff": [0, 1]}]


def test_monomial_expansion_cutoff_gate():
    alg = group_algebra(PrimeConfig(5, 1, 2, "GL2"))
    comps = algebra_element_from_json(alg, [{"digits": [0, 0, 1], "coeff": 1}])
    with pytest.raises(ConfigError):
        monomial_expansion_to_json(alg, comps, 25)


def test_ideal_spec_roundtrip():
    for spec in default_ideals(1, F5):
        d = ideal_spec_to_json(spec, F5)
        back = ideal_spec_from_json(d, 1, F5)
        assert back.name == spec.name
        assert back.f_gens == spec.f_gens


def test_module_roundtrip():
    cfg = PrimeConfig(5, 1, 2, "GL2")
    mod = quotient_module(cfg, seed=4)
    d = module_to_json(mod)
    back = module_from_json(d)
    assert back.dim == mod.dim
    assert all(np.array_equal(a, b) for a, b in zip(back.gen_action, mod.gen_action))
    with pytest.raises(ConfigError):
        module_from_json({"dim": 2})


def test_to_jsonable():
    out = to_jsonable({"a": np.int64(3), "b": (np.int16(1), 2), "c": [np.array([1, 2])]})
    assert out == {"a": 3, "b": [1, 2], "c": [[1, 2]]}
