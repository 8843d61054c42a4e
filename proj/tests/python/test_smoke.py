import math

import pytest

import ghzw


def test_ideal_values():
    assert ghzw.ideal_strategy_value("W3") == pytest.approx(4 + 4 * math.sqrt(2), abs=1e-9)
    assert ghzw.ideal_strategy_value("W4") == pytest.approx(4 + 2 * math.sqrt(2), abs=1e-9)
    assert ghzw.build_w3().bound == 8.0
    assert ghzw.build_w4().bound == 6.0


def test_threshold():
    t = ghzw.threshold_mixed_noise("W3", 0.5)
    assert t.p == pytest.approx(0.7836, abs=1e-3)
    assert t.fidelity == pytest.approx(0.7975, abs=1e-3)


def test_behavior_and_witness_json():
    b = ghzw.noisy_ghz_behavior("W4", 0.9, 0.5)
    assert b.n_parties == 4
    assert b.is_nonsignalling()
    w = ghzw.Witness.from_json(ghzw.build_w3().to_json())
    assert w.n_terms == ghzw.build_w3().n_terms
    with pytest.raises(ghzw.GhzwError):
        ghzw.ghz_behavior("W9")


def test_polytope():
    assert len(ghzw.local_deterministic_vertices([2, 2, 2])) == 64
    assert ghzw.nonsignalling_extremum(ghzw.build_w3()) == pytest.approx(-8.0, abs=1e-9)
    u = ghzw.Behavior.uniform([2, 2, 2])
    assert ghzw.polytope_visibility(u, ghzw.local_deterministic_vertices([2, 2, 2])) == pytest.approx(1.0)


def test_inflation_bell_ring():
    table = [0.0] * 16
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if a ^ b == x & y:
                        table[(x * 2 + y) * 4 + a * 2 + b] = 0.5
    pr = ghzw.Behavior([2, 2], table)
    system = ghzw.InflationSystem(2, 2)
    assert system.n_columns == 256
    r = system.visibility(pr)
    assert r["visibility"] == pytest.approx(0.75, abs=1e-7)
    assert r["certificate_ok"]
    assert not r["feasible"]
    assert system.feasible(ghzw.Behavior.uniform([2, 2]))


def test_table1():
    ds = ghzw.parse_dataset(ghzw.bundled_dataset())
    assert ds.n_records == 9
    assert ds.counts("ZZZZ")[0] == 8552
    assert ghzw.eval_w4_from_data(ds) == pytest.approx(6.71429, abs=1e-5)
    assert ghzw.eval_w3_from_data(ds) == pytest.approx(9.50801, abs=1e-5)
    mean, sigma = ghzw.monte_carlo_sigma(ds, "W4", 1000, 3)
    assert 0.015 < sigma < 0.035
    s = ghzw.stabilizer_fidelity(ds)
    assert s["fidelity_bound"] == pytest.approx(0.97412, abs=1e-5)
