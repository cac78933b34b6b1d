import pytest

from conekit.cones import ConeResult
from conekit.mobility import InternalError, analyze, ckg_dof, classify, format_report, thread_count


@pytest.fixture(scope="module")
def fayet_report(fayet):
    return analyze(fayet, seed=20200607)


def test_ckg(fayet, fourbar):
    assert ckg_dof(fayet) == 2
    assert ckg_dof(fourbar) == -2


def test_fayet_report(fayet_report):
    r = fayet_report
    assert (r.static_rank, r.delta_diff, r.kappa) == (15, 5, 2)
    assert (r.delta_loc, r.delta_loc_status) == (3, "confirmed")
    assert r.rank_verdicts == {16: "constant", 17: "constant", 18: "constant"}
    assert (r.delta_top, r.shaky_degree, r.overconstraint_degree) == (2, 2, 1)
    assert r.constraint_singular.value is True
    assert r.kinematic_singular.value is False
    assert r.cspace_singular.value is False
    assert "smooth-motions-only" in r.kinematic_singular.caveats
    assert "cusps-not-captured-by-tangent-cone" in r.cspace_singular.caveats


def test_report_is_deterministic(fayet, fayet_report):
    again = analyze(fayet, seed=20200607)
    assert again.to_dict() == fayet_report.to_dict()


def test_fourbar_report(fourbar):
    r = analyze(fourbar)
    assert (r.delta_diff, r.delta_loc, r.shaky_degree) == (1, 1, 0)
    assert (r.delta_top, r.overconstraint_degree) == (-2, 3)
    assert r.constraint_singular.value is True


def test_triangle_is_rigid(triangle):
    r = analyze(triangle)
    assert r.delta_diff == r.delta_loc == 0
    assert r.rigid
    assert "rigid structure (delta_loc=0)" in format_report(r)


def test_inconsistent_inputs_raise(fayet, fayet_cone):
    bogus = ConeResult([fayet_cone.cone(2), fayet_cone.cone(1)], None, "order-cap")
    with pytest.raises(InternalError):
        classify(fayet, bogus, {}, {}, None)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("CONEKIT_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("CONEKIT_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()
