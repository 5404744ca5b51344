import csv
import io
import json
import warnings

import numpy as np
import pytest

from vilenkin import Convention, DomainError, Point, forward, make_group, walsh
from vilenkin import calibration, fixtures
from vilenkin import experiments as ex


def test_q_index():
    g = walsh(8)
    assert ex.q_index(g, 2) == 21
    assert ex.q_index(g, 3) == 85
    assert ex.q_index(make_group([2, 3], 6), 1) == 7


def test_no_growth_rule():
    assert ex.no_growth([1.0, 2.0, 2.05], 0.1)
    assert not ex.no_growth([1.0, 2.0, 2.2], 0.1)
    assert ex.no_growth([3.0], 0.0)


def test_lower_bound_rejects_small_A():
    with pytest.raises(DomainError):
        ex.verify_lemma2(walsh(6), 2)


def test_lower_bound_reports_both_conventions():
    rep = ex.verify_lemma2(walsh(6), 3)
    assert rep.params["q"] == 21
    assert {(c["k"], c["s"]) for c in rep.cases} == {(0, 2)}
    assert rep.measured["min_ratio_classical"] >= 0.25
    assert "classical" in rep.measured["satisfying_conventions"]


def test_lower_bound_mixed_group_runs():
    rep = ex.verify_lemma2(make_group([2, 3], 6), 3)
    assert "min_ratio_paper" in rep.measured


def test_cylinder_integral_n_grid():
    assert ex.lemma4_ns(walsh(5), 3) == [8, 9, 12, 16]


def test_cylinder_integral_mixed_group():
    rep = ex.verify_lemma4(make_group([2, 3], 5), [3, 4])
    assert rep.passed


def test_atoms_are_seeded():
    g = walsh(8)
    a = ex.theorem1_atoms(g, 0.4, 3, 4, seed=7)
    b = ex.theorem1_atoms(g, 0.4, 3, 4, seed=7)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))
    assert [x.rank for x in a] == [4, 5, 6, 4]


def test_atom_integral_small_case():
    g = walsh(6)
    a = ex.theorem1_atoms(g, 1 / 3, 2, 1)[0]
    J, low = ex.atom_integral(a, Point.zero(2), 1 / 3, g.M[5])
    assert J > 0
    assert low <= 1e-12 * a.sup()


def test_atom_driver_rejects_p():
    with pytest.raises(DomainError):
        ex.verify_theorem1(walsh(6), 0.5, [2])


def test_atom_driver_report_shape(tmp_path):
    rep = ex.verify_theorem1(walsh(6), 0.4, [2, 3], 3, fixture_dir=tmp_path)
    assert len(rep.cases) == 6
    assert rep.flags["sigma_vanishes_below_MN"]
    assert rep.flags["translation_invariant"]
    # no fixture in the empty directory: the bound check fails loudly
    assert rep.flags["theorem1_J_p0_4_paper_within_fixture"] is False
    assert rep.notes


def test_counterexample_spectrum():
    g = walsh(8)
    f = ex.counterexample_function(g, 3)
    c = forward(f).coeffs
    assert np.allclose(c[64:128], 1) and np.allclose(c[:64], 0)


@pytest.mark.parametrize("m", [(2,), (3,), (2, 3)])
def test_counterexample_checks(m, quiet):
    rep = ex.run_counterexample(make_group(m, 10), ex.CounterexampleCase(3, 0.4))
    for flag in ("spectrum_indicator", "partial_sum_branches", "shift_identity", "kernel_chain", "witness"):
        assert rep.flags[flag], (flag, rep.measured)


def test_counterexample_small_nk_warns():
    with pytest.warns(UserWarning):
        ex.run_counterexample(walsh(6), ex.CounterexampleCase(2, 0.4))


def test_counterexample_classical_chain_is_only_reported():
    rep = ex.run_counterexample(walsh(8), ex.CounterexampleCase(3, 0.4), Convention.CLASSICAL)
    assert "kernel_chain" not in rep.flags
    assert rep.measured["kernel_chain_error"] > 0


def test_case_validation():
    with pytest.raises(DomainError):
        ex.CounterexampleCase(3, 0.6)
    with pytest.raises(DomainError):
        ex.CounterexampleCase(0, 0.3)


def test_phi_families():
    n = np.array([1, 10, 100])
    assert np.allclose(ex.phi_family("const", 0.3)(n), 1)
    assert np.allclose(ex.phi_family("power", 1 / 3)(n), n + 1)
    assert np.allclose(ex.phi_family("powerlog", 1 / 3)(n), (n + 1) / np.log2(n + 2) ** 2)
    with pytest.raises(DomainError):
        ex.phi_family("bogus", 0.3)


def test_sweep_const_growth_factor():
    rep = ex.divergence_sweep(walsh(12), 0.4, "const", [3, 4])
    R = rep.measured["ratios"]
    step = (4.0 ** (1 / 0.4 - 2))
    assert 0.5 * step <= R[1] / R[0] <= 2 * step
    assert rep.passed


def test_sweep_parallel_matches_serial():
    g = walsh(12)
    a = ex.divergence_sweep(g, 1 / 3, "powerlog", [3, 4], workers=1)
    b = ex.divergence_sweep(g, 1 / 3, "powerlog", [3, 4], workers=2)
    assert a.cases == b.cases


def test_sweep_columns():
    rep = ex.divergence_sweep(walsh(10), 1 / 3, "powerlog", [3, 4])
    cols, _ = rep.csv_rows()
    for c in ("n_k", "q", "M_2nk", "hp_norm", "weak_lp", "ratio", "normalized_ratio", "convention"):
        assert c in cols


def test_report_serialization(tmp_path):
    rep = ex.verify_lemma3(walsh(3), 2)
    jp, cp = rep.write(tmp_path, "x", header={"seed": 1})
    doc = json.loads(jp.read_text())
    assert doc["passed"] is True and doc["run_config"] == {"seed": 1}
    raw = cp.read_bytes()
    assert b"\r\n" in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode())))
    assert rows[0]["A"] == "2"
    assert not list(tmp_path.glob("*.tmp"))


def test_report_serialization_is_stable(tmp_path):
    a = ex.verify_partition(walsh(4), [2, 3]).to_csv()
    b = ex.verify_partition(walsh(4), [2, 3]).to_csv()
    assert a == b


# calibration oracles reproduce the driver measurements through separate code paths


def test_calibration_l1_sup_matches_driver(tmp_path):
    g = walsh(6)
    measured = calibration.measure_eq4(g, 64)
    rep = ex.verify_eq4(g, 64, fixture_dir=tmp_path)
    for cv in ("paper", "classical"):
        assert measured[f"eq4_sup_l1_{cv}"] == pytest.approx(rep.measured[f"eq4_sup_l1_{cv}"], rel=1e-12)


def test_calibration_decomposition_matches_driver(tmp_path):
    g = make_group([2, 3], 6)
    measured = calibration.measure_eq5(g, 30, 6)
    rep = ex.verify_eq5(g, 30, 6, fixture_dir=tmp_path)
    for cv in ("paper", "classical"):
        assert measured[f"eq5_c_{cv}"] == pytest.approx(rep.measured[f"eq5_c_{cv}"], rel=1e-9)


def test_calibration_cylinder_integral_matches_driver(tmp_path):
    g = walsh(5)
    measured = calibration.measure_lemma4(g, (2, 3))
    rep = ex.verify_lemma4(g, [2, 3], fixture_dir=tmp_path)
    for cv in ("paper", "classical"):
        assert measured[f"lemma4_ratio_{cv}"] == pytest.approx(rep.measured[f"lemma4_ratio_{cv}"], rel=1e-12)


def test_calibration_atom_integral_matches_driver(tmp_path):
    g = walsh(6)
    measured = calibration.measure_theorem1(g, (0.4,), (2, 3), 3, convs=(Convention.PAPER,))
    rep = ex.verify_theorem1(g, 0.4, [2, 3], 3, fixture_dir=tmp_path)
    assert measured["theorem1_J_p0_4_paper"] == pytest.approx(rep.measured["theorem1_J_p0_4_paper"], rel=1e-10)


def test_calibrate_writes_and_is_deterministic(tmp_path):
    g = walsh(6)
    p1, m1 = calibration.calibrate("eq4", g, tmp_path, n_max=64)
    first = p1.read_text()
    p2, _ = calibration.calibrate("eq4", g, tmp_path, n_max=64)
    assert p1 == p2 and p2.read_text() == first
    recs = json.loads(first)
    for r in recs:
        assert {"experiment_id", "constant_name", "value", "oracle_version"} <= set(r)
        assert r["value"] == pytest.approx(r["measured"] * 1.1)
    rep = ex.verify_eq4(g, 64, fixture_dir=tmp_path)
    assert rep.passed


def test_fixture_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(fixtures.ENV_VAR, str(tmp_path))
    assert fixtures.fixture_dir() == tmp_path
    with pytest.raises(fixtures.FixtureMissingError):
        fixtures.load_constant("eq4", "eq4_sup_l1_paper", walsh(4))
    assert fixtures.try_constant("eq4", "eq4_sup_l1_paper", walsh(4)) is None


def test_packaged_fixtures_present(monkeypatch):
    monkeypatch.delenv(fixtures.ENV_VAR, raising=False)
    g = walsh(9)
    for exp, name in [
        ("eq4", "eq4_sup_l1_paper"),
        ("eq5", "eq5_c_classical"),
        ("lemma4", "lemma4_ratio_paper"),
        ("theorem1", "theorem1_J_p0_3333_paper"),
    ]:
        assert fixtures.load_constant(exp, name, g) > 0


def test_group_label():
    assert fixtures.group_label(walsh(5)) == "2"
    assert fixtures.group_label(make_group([2, 3], 5)) == "2-3"
    assert fixtures.group_label(make_group([3, 2, 2], 3)) == "3-2-2"


def test_partition_driver_notes():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = ex.verify_partition(make_group([3], 4), [2, 3, 4])
    assert rep.passed
