"""Finite modules over the truncated ring: builders, the three gradings,
minimal annihilator exponents, and the restriction-only reconstruction."""

import numpy as np
import pytest

from propring.config import PrimeConfig
from propring.errors import ConfigError, LevelTooDeep, RelationCheckFailed
from propring.gf import gf, matmul
from propring.graded import build_JN, default_ideals
from propring.modules import (
    FiniteModule,
    build_module,
    check_exponent_transfer,
    check_multiplicative,
    deep_line_module,
    dualize,
    equivariant_maps,
    find_isomorphism,
    grade,
    min_annihilator_exponent,
    module_corpus,
    quotient_module,
    regular_module,
    restriction_determinism,
    trivial_module,
    weight_quotient_module,
)

F5 = gf(5, 1)
IDEALS = default_ideals(1, F5)


@pytest.fixture(scope="session")
def deep(cfg):
    return deep_line_module(cfg)


def test_trivial_module(cfg):
    mod = trivial_module(cfg)
    assert mod.dim == 1
    for kind in ("gr", "int", "res"):
        gm = grade(mod, kind, N=None if kind == "gr" else 1)
        assert gm.piece_dims() == [1]
        for spec in IDEALS:
            use = spec if kind == "gr" else build_JN(spec, 1, F5)
            src = mod if kind == "gr" else None
            rep = min_annihilator_exponent(gm, use, source=src)
            assert rep.ell == 1


def test_regular_module_frozen_gradings():
    mod = regular_module(PrimeConfig(5, 1, 1, "GL2"))
    assert mod.dim == 125
    dims = grade(mod, "gr").piece_dims()
    assert dims == [1, 2, 4, 6, 9, 10, 12, 12, 13, 12, 12, 10, 9, 6, 4, 2, 1]
    assert sum(dims) == 125


def test_regular_module_c_exponent_matches_nilpotency():
    # independent oracle: smallest e with (rho(C) - I)^e = 0 as a dense matrix
    mod = regular_module(PrimeConfig(5, 1, 1, "GL2"))
    field = mod.field
    zc = field.add[mod.gen_action[2], field.neg[mod.identity_matrix()]]
    e = 0
    cur = mod.identity_matrix()
    while cur.any():
        cur = matmul(cur, zc, field)
        e += 1
        assert e <= mod.dim + 1, "nilpotency bound blown"
    rep = min_annihilator_exponent(grade(mod, "gr"), IDEALS[0], source=mod)
    assert rep.ell == e == 5


def test_weight_quotient_dims(cfg):
    mod = weight_quotient_module(cfg, 6)
    assert mod.dim == 34
    assert grade(mod, "gr").piece_dims() == [1, 2, 4, 6, 9, 12]


def test_deep_module_has_live_twist(deep):
    assert deep.dim == 36
    q = deep.power_of(2 * deep.cfg.f, deep.cfg.p ** (deep.cfg.M - 1))
    assert not np.array_equal(q, deep.identity_matrix())


def test_deep_module_frozen_exponents(deep):
    for spec in IDEALS:
        out = check_exponent_transfer(deep, spec, 1)
        assert out["ok"]
        assert out["exponents"] == {
            "gr_ideal": 6,
            "gr_twist": 2,
            "int_twist": 2,
            "res_twist": 2,
        }


def test_quotient_corpus(cfg, rng):
    mods = module_corpus(cfg, count=8)
    assert len(mods) == 10
    assert mods[0].provenance.startswith("trivial")
    assert mods[1].provenance.startswith("deep")
    for mod in mods:
        assert 1 <= mod.dim <= 40
        check_multiplicative(mod, rng, pairs=256)


def test_grading_chains_are_filtrations(deep):
    gr_dims = grade(deep, "gr").piece_dims()
    int_dims = grade(deep, "int", 1).piece_dims()
    res_dims = grade(deep, "res", 1).piece_dims()
    for dims in (gr_dims, int_dims, res_dims):
        assert sum(dims) == deep.dim
        assert dims[0] >= 1
    # the subsampled chain reads the full chain at multiples of p^N
    sizes = [c.shape[0] for c in grade(deep, "gr").chain]
    last = len(sizes) - 1
    sub = []
    i = 0
    while True:
        sub.append(sizes[min(i * 5, last)])
        if sub[-1] == 0:
            break
        i += 1
    assert int_dims == [sub[t] - sub[t + 1] for t in range(len(sub) - 1)]


def test_multiplicativity_catches_corruption():
    mod = regular_module(PrimeConfig(5, 1, 1, "GL2"))
    broken = FiniteModule(
        cfg=mod.cfg,
        dim=mod.dim,
        gen_action=(mod.identity_matrix(),) + mod.gen_action[1:],
        provenance="corrupted",
    )
    with pytest.raises(RelationCheckFailed):
        check_multiplicative(broken, np.random.default_rng(0), pairs=64)


def test_build_module_explicit_roundtrip(cfg, rng):
    mod = quotient_module(cfg, seed=5)
    again = build_module(
        cfg, "explicit", matrices=[np.array(m) for m in mod.gen_action]
    )
    assert again.dim == mod.dim
    singular = [np.array(m) for m in mod.gen_action]
    singular[0] = np.zeros_like(singular[0])
    with pytest.raises(ConfigError):
        build_module(cfg, "explicit", matrices=singular)


def test_grade_level_gate(deep):
    with pytest.raises(LevelTooDeep):
        grade(deep, "int", 2)
    with pytest.raises(LevelTooDeep):
        grade(deep, "res", None)


def test_twisted_exponent_needs_scaled_ideal(deep):
    gm = grade(deep, "int", 1)
    with pytest.raises(ConfigError):
        min_annihilator_exponent(gm, IDEALS[1], source=deep)


def test_exponent_transfer_on_quotients(cfg):
    for seed in (1, 2, 3):
        mod = quotient_module(cfg, seed=seed)
        for spec in IDEALS:
            out = check_exponent_transfer(mod, spec, 1)
            assert out["ok"], (seed, spec.name, out)


def test_restriction_determinism(deep, rng):
    out = restriction_determinism(deep, IDEALS[0], 1, rng, basis_changes=3)
    assert out["ok"]
    assert out["twist_present"]
    assert out["restricted_path"] == out["exponent"]
    assert set(out["basis_change_exponents"]) == {out["exponent"]}


def test_dual_of_dual_is_isomorphic(cfg, rng):
    mod = quotient_module(cfg, seed=7, max_dim=12)
    dd = dualize(dualize(mod))
    iso = find_isomorphism(mod, dd, rng)
    assert iso is not None


def test_equivariant_self_maps_contain_identity(cfg):
    mod = quotient_module(cfg, seed=7, max_dim=12)
    maps = equivariant_maps(mod, mod)
    stack = np.array([m.reshape(-1) % 5 for m in maps], dtype=np.int16)
    eye = np.eye(mod.dim, dtype=np.int16).reshape(1, -1)
    from propring.gf import rank

    assert rank(stack, F5) == rank(np.vstack([stack, eye]), F5)
