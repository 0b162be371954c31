"""Scenario runner: registry, seed derivation, report canonicalization."""

import pytest

from propring.checks import CHECKS, parse_scenario, report_bytes, report_csv, run_scenario, sub_rng
from propring.errors import ConfigError

TINY = {
    "name": "tiny",
    "config": {"p": 5, "f": 1, "M": 2, "N": 1, "case": "GL2"},
    "seed": 3,
    "checks": [
        "arithmetic-oracles",
        {"check": "hilbert-series", "params": {"tmax": 4}},
    ],
}


def test_registry_names():
    assert sorted(CHECKS) == [
        "arithmetic-oracles",
        "central-power-classes",
        "exponent-transfer",
        "hilbert-series",
        "ideal-power-spans",
        "quaternion-commutator",
        "restriction-determinism",
        "sandwich",
        "tau-contract",
    ]


def test_sub_rng_is_seed_and_name_separated():
    a = sub_rng(1, "x").integers(0, 10**9, size=4)
    b = sub_rng(1, "x").integers(0, 10**9, size=4)
    c = sub_rng(1, "y").integers(0, 10**9, size=4)
    d = sub_rng(2, "x").integers(0, 10**9, size=4)
    assert list(a) == list(b)
    assert list(a) != list(c)
    assert list(a) != list(d)


def test_parse_scenario_validation():
    name, cfg, seed, checks = parse_scenario(TINY)
    assert name == "tiny" and seed == 3 and len(checks) == 2
    for broken in (
        [],
        {"config": TINY["config"], "checks": ["arithmetic-oracles"]},
        {"name": "x", "config": TINY["config"], "checks": []},
        {"name": "x", "config": TINY["config"], "checks": ["nope"]},
        {"name": "x", "config": {"p": 5, "f": 1, "M": 2}, "checks": ["arithmetic-oracles"]},
    ):
        with pytest.raises(ConfigError):
            parse_scenario(broken)


def test_run_scenario_deterministic():
    r1, code1 = run_scenario(TINY)
    r2, code2 = run_scenario(TINY)
    assert code1 == code2 == 0
    assert report_bytes(r1) == report_bytes(r2)
    assert [c["status"] for c in r1["checks"]] == ["pass", "pass"]
    # checks run in name order regardless of scenario order
    assert [c["name"] for c in r1["checks"]] == ["arithmetic-oracles", "hilbert-series"]


def test_timings_do_not_touch_canonical_bytes():
    plain, _ = run_scenario(TINY)
    timed, _ = run_scenario(TINY, include_timings=True)
    assert any("elapsed_s" in c for c in timed["checks"])
    assert report_bytes(plain) == report_bytes(timed)


def test_report_csv_shape():
    report, _ = run_scenario(TINY)
    lines = report_csv(report).strip().splitlines()
    assert lines[0] == "check,status"
    assert lines[1:] == ["arithmetic-oracles,pass", "hilbert-series,pass"]


def test_header_carries_config_and_seed():
    report, _ = run_scenario(TINY)
    h = report["header"]
    assert (h["p"], h["f"], h["M"], h["N"], h["case"], h["seed"]) == (5, 1, 2, 1, "GL2", 3)
