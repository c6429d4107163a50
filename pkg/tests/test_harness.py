import json

import numpy as np
import pytest

from arealaw.errors import ConfigError, InvalidRegion
from arealaw.harness.analysis import (ChainGeometry, Comparison, ProofChainRecord,
                                      proof_chain_report, saturation_scan,
                                      window_mutual_information, window_sites)
from arealaw.harness.config import resolve, validate
from arealaw.harness.output import csv_text, format_number, svg_plot
from arealaw.harness.workers import num_workers, pool_map
from arealaw.qcore import density_from_pure, partial_trace
from arealaw.entropies import mutual_information
from arealaw.states import entangled_pair_chain, ghz, haar_random_state, product_state


def test_window_sites():
    assert window_sites(8, "line", 0, 2) == ([0, 1], [2, 3, 4, 5], [6, 7])
    assert window_sites(6, "ring", 4, 1) == ([4], [5, 0], [1])
    with pytest.raises(InvalidRegion):
        window_sites(8, "line", 1, 2)


def test_window_information_matches_density_route():
    s = haar_random_state(8, 2)
    bl, bc, br = window_sites(8, "line", 1, 1)
    sites = bc + bl + br
    from arealaw.qcore import reduced_density_sites
    rho = reduced_density_sites(s, sites)
    assert window_mutual_information(s, bl, bc, br) == pytest.approx(
        mutual_information(rho, split=len(bc)), abs=1e-10)


def test_scan_product_state():
    res = saturation_scan(product_state(8), 0.1)
    assert res.found and res.l == 1 and res.value == pytest.approx(0.0, abs=1e-12)
    assert len(res.inspected) == 1


def test_scan_pair_chain_pair_aligned():
    res = saturation_scan(entangled_pair_chain(6), 1.0, site=0, l0=2)
    assert res.found and res.l == 2 and res.start == 0
    assert res.b_left == (0, 1) and res.b_center == (2, 3, 4, 5)
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_odd_aligned_window_cuts_two_pairs():
    bl, bc, br = window_sites(12, "line", 1, 2)
    assert window_mutual_information(entangled_pair_chain(6), bl, bc, br) == pytest.approx(4.0)


def test_scan_ghz_not_found():
    res = saturation_scan(ghz(12), 0.25)
    assert not res.found
    assert {r["l"] for r in res.inspected} == {1, 2}
    # the window never covers the whole chain, so every inspected value is 1 bit
    assert all(r["I_bits"] == pytest.approx(1.0) for r in res.inspected)


def test_scan_value_reverifies():
    s = haar_random_state(12, 5)
    res = saturation_scan(s, 2.0, site=6)
    assert res.found
    direct = window_mutual_information(s, res.b_left, res.b_center, res.b_right)
    assert abs(direct - res.value) <= 1e-9 and res.value <= 2.0 * res.l


def test_comparison_consistency():
    c = Comparison.make("x", "a", 0.3, "b", 0.5)
    assert c.holds and c.consistent()
    bad = Comparison("x", "a", 0.7, "b", 0.5, True)
    assert not bad.consistent()


def test_product_state_record():
    rec = proof_chain_report(product_state(12), ChainGeometry.blocks(4, 4, 4, b_left=(0,),
                                                                    b_center=(1, 2), b_right=(3,)))
    assert all(c.holds for c in rec.premises + rec.conclusions)
    assert rec.conclusions[0].lhs == pytest.approx(0.0, abs=1e-12)
    assert rec.naive_intuition_violated is False


def test_pair_chain_record():
    rec = proof_chain_report(entangled_pair_chain(6), ChainGeometry.blocks(4, 4, 4))
    prem, concl = rec.premises[0], rec.conclusions[0]
    assert prem.lhs == pytest.approx(0.0, abs=1e-12) and prem.holds
    assert concl.lhs <= 1.0 and concl.holds


def test_record_roundtrip_and_tamper_detection():
    s = haar_random_state(8, 1)
    geom = ChainGeometry.from_window(8, 2, 1, x=(0,), y=(1,), z=(2,))
    rec = proof_chain_report(s, geom, restarts=2)
    d = json.loads(json.dumps(rec.to_dict()))
    assert ProofChainRecord.from_dict(d).consistent()
    d["conclusions"][0]["holds"] = not d["conclusions"][0]["holds"]
    with pytest.raises(ValueError):
        ProofChainRecord.from_dict(d)


def test_single_shot_variant():
    s = haar_random_state(8, 3)
    geom = ChainGeometry.from_window(8, 2, 1, x=(0, 1), y=(2,), z=(3, 4))
    rec = proof_chain_report(s, geom, "single_shot", epsilon=0.01, restarts=2)
    assert rec.variant == "single_shot"
    assert "H_max" in rec.conclusions[0].lhs_label
    assert rec.conclusions[1].rhs_label.startswith("I_max")


def test_format_number():
    assert format_number(0.5) == "0.5"
    assert format_number(3e-5) == "3e-05"
    assert format_number(0.0) == "0e+00"
    assert format_number(-2.5e-7) == "-2.5e-07"
    assert format_number(1 / 3 * 1e-5) == repr(1 / 3 * 1e-5)
    assert format_number(1e-4) == "0.0001"
    assert format_number(True) == "true" and format_number(7) == "7"
    assert csv_text(["a", "b"], [(1, 0.25)]) == "a,b\n1,0.25\n"


def test_svg_is_wellformed():
    import xml.etree.ElementTree as ET
    root = ET.fromstring(svg_plot({"s": ([1, 2, 3], [1.0, float("nan"), 0.5])}, "t", "x", "y"))
    assert root.tag.endswith("svg")
    assert any(el.tag.endswith("polyline") for el in root.iter())


def test_workers_env_cap(monkeypatch):
    monkeypatch.setenv("EDC_NUM_WORKERS", "1")
    assert num_workers(8) == 1
    monkeypatch.setenv("EDC_NUM_WORKERS", "3")
    assert num_workers(8) == 3
    assert pool_map(lambda x: x * x, range(6), workers=3) == [0, 1, 4, 9, 16, 25]


def test_config_validation_messages():
    with pytest.raises(ConfigError, match="'model'"):
        validate({"params": {}})
    with pytest.raises(ConfigError, match="params.h"):
        validate({"model": "tfim", "params": {"num_sites": 6}})
    with pytest.raises(ConfigError, match="options.epsilon"):
        validate({"model": "ghz", "params": {"n": 4}, "options": {"epsilon": -1}})
    cfg = resolve({"model": "haar", "params": {"n": 4}}, "entropy-profile", seed=9, out="x")
    assert cfg["seed"] == 9 and cfg["params"]["seed"] == 9 and cfg["output_dir"] == "x"
    assert cfg["options"]["start"] == 0
