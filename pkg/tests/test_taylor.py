import random

import sympy

from conekit import jets
from conekit.cones import compare_spans
from conekit.exact import Q
from conekit.model import Joint, LinkageModel, jacobian
from conekit.screws import hat
from conekit.taylor import differentials, vk_solve
from conekit.topology import FundamentalCycle, LinkageGraph


def single_joint_model(Y):
    g = LinkageGraph.from_edges([(1, "ground", "ground")], base="ground")
    return LinkageModel((Joint(1, tuple(Q(v) for v in Y), "helical"),), g, (FundamentalCycle.from_signed([1]),))


def test_first_term_is_jacobian_block(fayet):
    rng = random.Random(0)
    x = [jets.random_rational(rng) for _ in range(20)]
    Jx = list(jacobian(fayet) @ x)
    for l in range(fayet.gamma):
        (T1,) = differentials(fayet, l, 1)
        value = [[p(x) for p in row] for row in T1]
        assert value == hat(tuple(Jx[6 * l : 6 * l + 6]))


def test_single_joint_second_term():
    Y = (0, 0, 1, 1, 2, 0)
    m = single_joint_model(Y)
    T2 = differentials(m, 0, 2)[1]
    H = sympy.Matrix(hat(tuple(sympy.Integer(v) for v in Y)))
    expect = H * H / 2
    for r in range(4):
        for c in range(4):
            assert T2[r][c]([Q(1)]) == Q(str(expect[r, c]))
            assert T2[r][c]([Q(3)]) == 9 * T2[r][c]([Q(1)])


def test_third_term_against_symbolic_product(fayet):
    rng = random.Random(1)
    x = [jets.random_rational(rng) for _ in range(20)]
    t = sympy.symbols("t")
    f = sympy.eye(4)
    for j, sgn, c, Y in fayet.loop_steps(0):
        H = sympy.Matrix(hat(tuple(sympy.Rational(int(v.numerator), int(v.denominator)) for v in Y))) * sgn
        a = H * sympy.Rational(int(x[c].numerator), int(x[c].denominator)) * t
        f = f * (sympy.eye(4) + a + a * a / 2 + a * a * a / 6)
    T3 = differentials(fayet, 0, 3)[2]
    for r in range(3):
        for cc in range(4):
            coeff = sympy.expand(f[r, cc]).coeff(t, 3)
            assert T3[r][cc](x) == Q(str(coeff))


def test_v1_v2_match_cones(fayet, fayet_cone):
    v1 = vk_solve(fayet, 1)
    v2 = vk_solve(fayet, 2)
    assert v1.dims() == [5] and v2.dims() == [3]
    assert compare_spans(v1.branches[0].basis, fayet_cone.cone(1)[0].basis) == "equal"
    assert compare_spans(v2.branches[0].basis, fayet_cone.cone(2)[0].basis) == "equal"


def test_rigid_triangle_v1_is_origin(triangle):
    assert vk_solve(triangle, 1).dims() == [0]


def test_terminal_cone_satisfies_vk(fayet, fayet_cone):
    sys3 = vk_solve(fayet, 3)
    assert not sys3.unresolved
    for v in fayet_cone.terminal[0].basis:
        assert any(compare_spans([v], b.basis) in ("subset", "equal") for b in sys3.branches)
