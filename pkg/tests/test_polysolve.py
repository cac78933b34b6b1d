from gmpy2 import mpq

from conekit.poly import Poly
from conekit.polysolve import semidefinite_kernel, solve_poly_cone


def var(n, i):
    return Poly.var(n, i)


def spans(sol):
    return sorted(tuple(tuple(v) for v in b.basis) for b in sol.branches)


def test_empty_system_is_full_space():
    sol = solve_poly_cone([], 3)
    assert [b.dim for b in sol.branches] == [3]
    assert not sol.unresolved


def test_product_splits_into_lines():
    t0, t1 = var(2, 0), var(2, 1)
    sol = solve_poly_cone([t0 * t1], 2)
    assert sorted(b.dim for b in sol.branches) == [1, 1]
    assert spans(sol) == [((0, 1),), ((1, 0),)]


def test_definite_form_gives_origin():
    t0, t1 = var(2, 0), var(2, 1)
    sol = solve_poly_cone([t0 * t0 + t1 * t1], 2)
    assert [b.dim for b in sol.branches] == [0]


def test_difference_of_squares():
    t0, t1 = var(2, 0), var(2, 1)
    sol = solve_poly_cone([t0 * t0 - t1 * t1], 2)
    assert sorted(b.dim for b in sol.branches) == [1, 1]
    for b in sol.branches:
        (v,) = b.basis
        assert abs(v[0]) == abs(v[1])


def test_irreducible_quadric_is_unresolved():
    t0, t1 = var(2, 0), var(2, 1)
    sol = solve_poly_cone([t0 * t0 - 2 * t1 * t1], 2)
    assert sol.unresolved
    assert sol.branches[0].residuals


def test_linear_and_mixed_equations():
    t = [var(3, i) for i in range(3)]
    sol = solve_poly_cone([t[0] + t[1], t[2] * t[0]], 3)
    assert sorted(b.dim for b in sol.branches) == [1, 1]


def test_non_cone_zero_set():
    # x0 + x1^2 = 0 is a parabola: points on it do not scale, and no line through 0 lies in it
    x0, x1 = var(2, 0), var(2, 1)
    p = x0 + x1 * x1
    assert p([mpq(-1), mpq(1)]) == 0
    assert p([mpq(-2), mpq(2)]) != 0
    sol = solve_poly_cone([p], 2)
    assert [b.dim for b in sol.branches] == [0]
    assert not sol.unresolved


def test_semidefinite_kernel():
    t0, t1, t2 = var(3, 0), var(3, 1), var(3, 2)
    ker = semidefinite_kernel((t0 - t1) * (t0 - t1) + t2 * t2)
    assert len(ker) == 1
    assert semidefinite_kernel(t0 * t0 - t1 * t1) is None
