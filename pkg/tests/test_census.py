import json

import numpy as np
import pytest

from planarcc.bounds import IndexPolynomial
from planarcc.census import (CensusOptions, CensusResult, KeyStore, compare_with_bounds,
                             epsilon_masses, hard_checks, mcmillan_bartky_check,
                             reflection_pairs_complete, run_census)
from planarcc.config import Configuration, MassVector, config_key, normalize, reflect
from planarcc.serialize import census_to_dict, dumps

from conftest import cached_census


def test_three_body_census():
    res = cached_census((1.0, 2.0, 3.0))
    assert res.saturated and not res.degenerate_found
    assert res.counts() == [2, 3]
    assert res.collinear_count == 3
    assert all(r.residual_norm < 1e-12 for r in res.records)
    assert all(c["pass"] for c in hard_checks(res).values())
    minima = [r for r in res.records if r.index_report.index == 0]
    assert all(r.classification.convex for r in minima)


def test_census_accepts_plain_list_and_rejects_two_bodies():
    assert run_census([1, 1, 1]).counts() == [2, 3]
    with pytest.raises(ValueError):
        run_census([1, 1])


def test_census_is_reproducible():
    a = census_to_dict(run_census([1.0, 0.5, 2.0], CensusOptions(seed=5)))
    b = census_to_dict(run_census([1.0, 0.5, 2.0], CensusOptions(seed=5)))
    assert dumps(a) == dumps(b)


def test_unsaturated_budget():
    res = run_census([1, 2, 3], CensusOptions(starts_budget=50, batch_size=25, window_min=10**6))
    assert not res.saturated
    assert res.starts_used == 50
    assert res.comparisons["binding"] is False


def test_key_store():
    c = normalize(Configuration.from_points([[0, 0], [1, 0], [0.2, 0.9]], [1, 1, 1]))
    store = KeyStore()
    assert store.add(config_key(c))
    assert not store.add(config_key(c))
    assert config_key(reflect(c)) not in store
    nudged = Configuration(c.positions + 1e-10, c.masses)
    assert config_key(nudged) in store
    moved = Configuration(c.positions + np.array([[1e-4, 0], [0, 0], [0, 0]]), c.masses)
    assert config_key(moved) not in store
    assert len(store) == 1


def test_reflection_orphan_detected():
    res = cached_census((1.0, 2.0, 3.0))
    noncollinear = [i for i, r in enumerate(res.records) if not r.classification.collinear]
    drop = noncollinear[0]
    partial = CensusResult(res.masses, [r for i, r in enumerate(res.records) if i != drop],
                           IndexPolynomial([1, 3]), True, 0, False, 0, 0)
    ok, orphans = reflection_pairs_complete(partial)
    assert not ok and len(orphans) == 1


def test_artificial_counts_fail_bounds():
    res = CensusResult(MassVector([1, 1, 1, 1]), [], IndexPolynomial([1, 0, 12]),
                       True, 0, False, 0, 0)
    comp = compare_with_bounds(res)
    assert not comp["bouquet_morse"]["pass"]
    assert not comp["mccord"]["pass"]
    assert not comp["first_palmore_total"]["pass"]
    assert comp["ignored_palmore"]["asserted"] is False


def test_mcmillan_bartky_only_for_four_bodies():
    res = CensusResult(MassVector([1] * 5), [], IndexPolynomial([1]), True, 0, False, 0, 0)
    assert mcmillan_bartky_check(res) == {"applicable": False}


def test_epsilon_masses():
    assert epsilon_masses([1.0, 1.0, "eps"], 0.01).values == (1.0, 1.0, 0.01)
    with pytest.raises(ValueError):
        epsilon_masses([1.0, 1.0, "eps"], -0.01)


def test_census_dict_is_json():
    data = census_to_dict(cached_census((1.0, 2.0, 3.0)))
    back = json.loads(dumps(data))
    assert back == data
    c = Configuration.from_points(back["records"][0]["positions"], back["masses"])
    # shortest-repr floats round-trip exactly
    first = cached_census((1.0, 2.0, 3.0)).records[0].configuration
    assert np.array_equal(c.positions, first.positions)
