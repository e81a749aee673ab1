import json

import pytest

from convexeq.instancefile import load, parse_instance
from convexeq.instances import catalog, export, get, replay
from convexeq.runner import solve, verify

IDS = [pi.id for pi in catalog()]


def test_catalog_ids_unique():
    assert len(IDS) == len(set(IDS)) == 14


@pytest.mark.parametrize("ident", IDS)
def test_replay(ident):
    checks = replay(get(ident))
    assert checks, "instance carries no checks"
    failed = [(name, detail) for name, ok, detail in checks if not ok]
    assert not failed


def test_get_unknown():
    with pytest.raises(KeyError):
        get("no-such-instance")


def test_export_round_trip(tmp_path):
    paths = export(tmp_path)
    assert len(paths) == len(IDS)
    for pi, path in zip(catalog(), paths):
        again = load(path)
        assert again.to_dict() == pi.instance.to_dict()
        assert parse_instance(json.loads(path.read_text())).id == pi.id


def test_projection_values():
    assert solve(get("square-projection-2-2").instance)["point"] == [1.0, 1.0]
    assert solve(get("square-projection-0-5").instance)["point"] == [0.0, 1.0]


def test_counterexample_disagrees():
    rep = verify(get("interval-x2").instance)
    assert rep["reduced"]["forced"]
    assert not rep["comparison"]["agree"]
    assert rep["brute"]["solutions"] == [[0.0]]


def test_farthest_center_lists_every_corner():
    rep = solve(get("square-farthest-center").instance)
    assert sorted(map(tuple, rep["points"])) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert all(m > 0 for m in rep["exposing_margins"])


def test_brute_mode_reports_resolution():
    rep = solve(get("square-farthest").instance, mode="brute")
    assert rep["resolution"] == 0.05
    assert rep["solutions"] == [[-1.0, -1.0]]


def test_verify_rejects_brute_mode():
    with pytest.raises(ValueError, match="--mode"):
        verify(get("square-farthest").instance, mode="brute")


def test_shipped_files_match_catalog():
    from pathlib import Path

    shipped = Path(__file__).resolve().parent.parent / "instances"
    for pi in catalog():
        assert load(shipped / f"{pi.id}.json").to_dict() == pi.instance.to_dict()
