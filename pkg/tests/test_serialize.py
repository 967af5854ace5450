"""Round trips and error handling for the JSON/CSV file formats."""

import json

import numpy as np
import pytest

from driftwin import serialize
from driftwin.water import DemandEstimate, DemandProfile, MeterLog, simulate_households
from driftwin.windows import IntervalWindow, atomize


def test_windows_round_trip():
    windows = [
        IntervalWindow(id="w1", intervals=((0.0, 2.0),)),
        IntervalWindow(id="w2", intervals=((1.0, 3.0), (4.5, 5.0))),
    ]
    text = serialize.windows_to_json(windows)
    assert serialize.windows_from_json(text) == windows


def test_windows_json_must_be_list():
    with pytest.raises(ValueError):
        serialize.windows_from_json('{"id": "w1"}')
    with pytest.raises((KeyError, TypeError)):
        serialize.windows_from_json('[{"name": "w1"}]')


def test_atom_set_json_shape():
    windows = serialize.windows_from_json(
        '[{"id": "a", "intervals": [[0, 2]]}, {"id": "b", "intervals": [[1, 3]]}]'
    )
    atoms, _ = atomize(windows)
    data = json.loads(serialize.atom_set_to_json(atoms))
    assert data["horizon"] == [0.0, 3.0]
    assert [a["index"] for a in data["atoms"]] == list(range(len(data["atoms"])))
    assert all(a["length"] > 0 for a in data["atoms"])


def test_matrix_round_trip_exact():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(4, 7)) * 10.0 ** rng.integers(-12, 12, size=(4, 7))
    text = serialize.matrix_to_csv(M)
    back = serialize.matrix_from_csv(text)
    assert np.array_equal(back, M)  # repr() round-trips floats exactly


def test_matrix_from_csv_errors():
    with pytest.raises(ValueError):
        serialize.matrix_from_csv("")
    with pytest.raises(ValueError):
        serialize.matrix_from_csv("1.0,abc\n")


def test_incidence_round_trip():
    inc = serialize.incidence_from_csv("1.0,0.0\n1.0,1.0\n")
    assert np.array_equal(inc.entries, [[1.0, 0.0], [1.0, 1.0]])
    assert serialize.incidence_to_csv(inc) == "1.0,0.0\n1.0,1.0\n"


def test_meter_logs_round_trip():
    profile = DemandProfile(
        hourly_rate=np.full(24, 2.0), jump_mean=1.0, jump_sd=0.25, horizon_days=2
    )
    logs, _ = simulate_households(profile, 3, 4.0, seed=0)
    text = serialize.meter_logs_to_csv(logs)
    back = serialize.meter_logs_from_csv(text)
    assert len(back) == len(logs)
    for a, b in zip(back, logs):
        assert a.household_id == b.household_id
        # timestamps survive the ISO 8601 round trip to microsecond precision
        for (ta, va), (tb, vb) in zip(a.readings, b.readings):
            assert abs(ta - tb) <= 1e-6 / 3600.0
            assert va == vb


def test_meter_logs_bad_header():
    with pytest.raises(ValueError):
        serialize.meter_logs_from_csv("a,b,c\n")


def test_profile_round_trip():
    profile = DemandProfile(
        hourly_rate=np.arange(1.0, 25.0), jump_mean=0.5, jump_sd=0.1, horizon_days=3
    )
    back = serialize.profile_from_json(serialize.profile_to_json(profile))
    assert np.array_equal(back.hourly_rate, profile.hourly_rate)
    assert back.jump_mean == profile.jump_mean
    assert back.jump_sd == profile.jump_sd
    assert back.horizon_days == profile.horizon_days


def test_estimate_round_trip():
    est = DemandEstimate(
        hourly_mean=np.linspace(0.0, 5.0, 24),
        hourly_var=np.linspace(0.1, 1.0, 24),
        community_size=150,
    )
    back = serialize.estimate_from_json(serialize.estimate_to_json(est))
    assert np.array_equal(back.hourly_mean, est.hourly_mean)
    assert np.array_equal(back.hourly_var, est.hourly_var)
    assert back.community_size == est.community_size


def test_profile_json_missing_key():
    with pytest.raises(KeyError):
        serialize.profile_from_json('{"hourly_rate": [1]}')
