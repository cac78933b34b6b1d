import numpy as np
import pytest

from conekit.continuation import distance_to_span, numeric_rank, path_tangent, shakiness_witness, trace_path
from conekit.model import jacobian


def basis_array(branch):
    return np.array([[float(x) for x in v] for v in branch.basis])


def test_numeric_rank_examples(fayet):
    assert numeric_rank(np.array(jacobian(fayet).to_float())) == 15
    assert numeric_rank(np.eye(5)) == 5
    rng = np.random.default_rng(0)
    assert numeric_rank(rng.standard_normal((7, 2)) @ rng.standard_normal((2, 7))) == 2
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), 1.5)


def test_k2_u_direction_traces(fayet, fayet_cone):
    d = np.zeros(20)
    d[[1, 4]] = [-1, 1]  # computed K^2 generator on joints 2 and 5
    d /= np.linalg.norm(d)
    tr = trace_path(fayet, d, 50, 0.02)
    assert tr.completed and len(tr.samples) == 51
    assert tr.max_residual() <= 1e-12
    assert set(tr.ranks()) == {15}


def test_k1_minus_k2_direction_fails(fayet, fayet_cone):
    K1 = basis_array(fayet_cone.cone(1)[0])
    K2 = basis_array(fayet_cone.cone(2)[0])
    Qk, _ = np.linalg.qr(K2.T)
    d = K1[2] - Qk @ (Qk.T @ K1[2])
    d /= np.linalg.norm(d)
    tr = trace_path(fayet, d, 50, 0.02)
    assert not tr.completed and tr.failed_step <= 3
    w = shakiness_witness(fayet, d, in_cone=False)
    assert w.numeric_failure and w.non_continuable
    assert all(floor > 1e-12 for floor in w.floors.values())


def test_witness_never_overrules_exact_membership(fayet, fayet_cone):
    K2 = basis_array(fayet_cone.cone(2)[0])
    d = K2.sum(axis=0)
    w = shakiness_witness(fayet, d / np.linalg.norm(d), in_cone=True)
    assert not w.non_continuable
    assert not w.numeric_failure


def test_zero_direction(fayet):
    tr = trace_path(fayet, np.zeros(20), 5, 0.1)
    assert tr.completed
    assert all(np.array_equal(s.q, np.zeros(20)) for s in tr.samples)
    assert tr.max_residual() == 0.0


def test_path_tangent_in_terminal_cone(fayet, fayet_cone):
    K2 = basis_array(fayet_cone.terminal[0])
    rng = np.random.default_rng(3)
    d = rng.standard_normal(3) @ K2
    d /= np.linalg.norm(d)
    tr = trace_path(fayet, d, 2, 1e-4)
    assert distance_to_span(path_tangent(tr), K2) <= 1e-6


def test_path_symmetry(fayet, fayet_cone):
    K2 = basis_array(fayet_cone.terminal[0])
    d = K2[1] / np.linalg.norm(K2[1])
    fwd = trace_path(fayet, d, 10, 0.02)
    back = trace_path(fayet, -d, 10, 0.02)
    for a, b in zip(fwd.samples, back.samples):
        assert abs(a.residual - b.residual) <= 1e-12


def test_fourbar_traces_at_rank_three(fourbar):
    d = np.array([-1.0, 1.0, -1.0, 1.0]) / 2
    tr = trace_path(fourbar, d, 20, 0.02)
    assert tr.completed and set(tr.ranks()) == {3}


def test_bad_arguments(fayet):
    with pytest.raises(ValueError):
        trace_path(fayet, np.ones(20) / np.sqrt(20), 3, 0.0)
    with pytest.raises(ValueError):
        trace_path(fayet, np.ones(20), 3, 0.1)
