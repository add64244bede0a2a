import itertools

import pytest

from polylef import corpus, linalg
from polylef.algebra import Kind, ParameterMatrix, artinian_reduction
from polylef.fields import gf2k_field, prime_field
from polylef.integration import (
    balancing_identity_check,
    degree_functional,
    differential_identity_check,
    differential_variables,
    enumerate_coherent_sets,
    enumerate_flags,
    flag_independence_check,
    linear_identity_check,
    parseval_brute_force,
    parseval_check,
    parseval_revealed_check,
    product_weights,
    select_flags,
)

F = gf2k_field(32)


def interior(poly, h):
    return [m.point for m in poly.points(h) if m.interior]


# -- exact fixtures ------------------------------------------------------------


def test_segment01_degree_is_inverse_determinant():
    poly = corpus.get("segment01")
    theta = ParameterMatrix.symbolic(poly)
    k = theta.field
    deg = degree_functional(poly, theta)
    t = {(i, p): k.var((i, (p,))) for i in range(2) for p in range(2)}
    det = k.add(k.mul(t[0, 0], t[1, 1]), k.mul(t[0, 1], t[1, 0]))
    assert deg.at((1,)) == k.inv(det)


def test_segment02_degree_fixture():
    poly = corpus.get("segment02")
    theta = ParameterMatrix.symbolic(poly)
    k = theta.field
    deg = degree_functional(poly, theta)
    t = {(i, p): k.var((i, (p,))) for i in range(2) for p in range(3)}

    def m(*terms):
        out = k.one
        for x in terms:
            out = k.mul(out, x)
        return out

    den = k.sum([
        m(t[0, 0], t[0, 0], t[1, 2], t[1, 2]), m(t[0, 0], t[0, 1], t[1, 1], t[1, 2]),
        m(t[0, 0], t[0, 2], t[1, 1], t[1, 1]), m(t[0, 1], t[0, 1], t[1, 0], t[1, 2]),
        m(t[0, 1], t[0, 2], t[1, 0], t[1, 1]), m(t[0, 2], t[0, 2], t[1, 0], t[1, 0]),
    ])
    nums = {
        (1,): k.add(m(t[0, 1], t[1, 2]), m(t[0, 2], t[1, 1])),
        (2,): k.add(m(t[0, 0], t[1, 2]), m(t[0, 2], t[1, 0])),
        (3,): k.add(m(t[0, 0], t[1, 1]), m(t[0, 1], t[1, 0])),
    }
    for point, num in nums.items():
        assert deg.at(point) == k.mul(num, k.inv(den))
    assert k.is_zero(deg.at((0,))) and k.is_zero(deg.at((4,)))


def test_functional_kills_the_relations():
    poly = corpus.get("square_pm1")
    theta = ParameterMatrix.random(poly, F, 3)
    deg = degree_functional(poly, theta)
    top = artinian_reduction(poly, theta, Kind.RELATIVE, poly.dim + 1)
    row = deg.values.reshape(1, -1)
    assert not F.nonzero(linalg.matmul(F, row, top.relation_image)).any()


def test_unit_triangle_degree_is_inverse_determinant_for_every_flag():
    poly = corpus.get("unit_triangle")
    theta = ParameterMatrix.random(poly, F, 9)
    det = linalg.det(F, theta.values)
    flags = enumerate_flags(poly)
    assert len(flags) == 6
    for fl in flags:
        deg = degree_functional(poly, theta, fl)
        assert deg.of(poly.lattice_points) == F.inv(det)


def test_coherent_sets_of_the_triangle():
    poly = corpus.get("unit_triangle")
    sets = enumerate_coherent_sets(poly, enumerate_flags(poly)[0])
    assert len(sets) == 1 and sorted(sets[0]) == sorted(poly.lattice_points)


def test_flag_enumeration_and_selection():
    sq = corpus.get("square_pm1")
    flags = enumerate_flags(sq)
    assert len(flags) == 8  # 4 vertices x 2 edges
    assert select_flags(sq, "first") == flags[:1]
    assert select_flags(sq, "count:3") == flags[:3]
    assert len(enumerate_flags(corpus.get("unit_cube"))) == 48
    with pytest.raises(ValueError):
        select_flags(sq, "some")


@pytest.mark.parametrize("name", ["square_pm1", "unit_cube", "reflexive_triangle", "cross2", "reflexive_simplex3"])
def test_flag_independence_at_specializations(name):
    poly = corpus.get(name)
    flags = enumerate_flags(poly)
    pick = [flags[i] for i in sorted({0, len(flags) // 2, len(flags) - 1})]
    for seed in range(2):
        res = flag_independence_check(poly, ParameterMatrix.random(poly, F, seed), pick)
        assert res["holds"], res


@pytest.mark.parametrize("name", ["segment01", "segment02", "segment03"])
def test_flag_independence_exact(name):
    poly = corpus.get(name)
    res = flag_independence_check(poly, ParameterMatrix.symbolic(poly), enumerate_flags(poly))
    assert res["holds"]


def test_flag_independence_up_to_sign_in_odd_characteristic():
    poly = corpus.get("square_pm1")
    fld = prime_field(2**31 - 1)
    theta = ParameterMatrix.random(poly, fld, 0)
    values = [degree_functional(poly, theta, fl).values for fl in enumerate_flags(poly)]
    for v in values[1:]:
        same = all(fld.eq(a, b) for a, b in zip(values[0], v))
        flipped = all(fld.eq(a, fld.neg(b)) for a, b in zip(values[0], v))
        assert same or flipped


# -- linear and balancing ------------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_linear_identity_square(seed):
    poly = corpus.get("square_pm1")
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, seed))
    for s in range(3):
        for pt in interior(poly, 2):
            assert linear_identity_check(deg, s, pt).holds


def test_linear_identity_exact_segment():
    poly = corpus.get("segment02")
    deg = degree_functional(poly, ParameterMatrix.symbolic(poly))
    results = [linear_identity_check(deg, 1, [p]) for p in poly.lattice_points]
    assert [r.holds for r in results] == [None, True, None]
    assert linear_identity_check(deg, 0, (1,)).holds


def test_linear_identity_with_zero_row():
    poly = corpus.get("square_pm1")
    theta = ParameterMatrix.random(poly, F, 1)
    deg = degree_functional(poly, theta)
    theta.values[2] = 0
    assert linear_identity_check(deg, 2, (0, 0)).holds


@pytest.mark.parametrize("seed", range(5))
def test_balancing_identity_square(seed):
    poly = corpus.get("square_pm1")
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, seed))
    pts = poly.lattice_points
    for q in pts:
        for J in itertools.combinations_with_replacement(pts, 2):
            res = balancing_identity_check(deg, [(0, 0), q], J)
            assert res.holds


def test_balancing_identity_exact_segment_and_gate():
    poly = corpus.get("segment02")
    deg = degree_functional(poly, ParameterMatrix.symbolic(poly))
    for j in poly.lattice_points:
        assert balancing_identity_check(deg, [(1,)], [j]).holds
    assert balancing_identity_check(deg, [(0,)], [(1,)]).skipped


def test_balancing_with_repeated_point_in_j():
    poly = corpus.get("square_pm1")
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, 0))
    res = balancing_identity_check(deg, [(0, 0), (1, 0)], [(1, 1), (1, 1)])
    assert res.holds


# -- Parseval --------------------------------------------------------------------


@pytest.mark.parametrize("name", ["segment01", "segment02", "segment03"])
def test_parseval_exact_on_segments(name):
    poly = corpus.get(name)
    deg = degree_functional(poly, ParameterMatrix.symbolic(poly))
    for pt in interior(poly, 2):
        res = parseval_check(deg, pt)
        assert res.holds
        assert res.rhs == parseval_brute_force(deg, pt)
    for a in interior(poly, 1):
        assert parseval_revealed_check(deg, {a: deg.field.one}).holds
    if len(interior(poly, 1)) > 1:
        assert parseval_revealed_check(deg, {a: deg.field.one for a in interior(poly, 1)}).holds


@pytest.mark.parametrize("name", ["square_pm1", "reflexive_simplex3"])
@pytest.mark.parametrize("seed", range(5))
def test_parseval_specialized(name, seed):
    poly = corpus.get(name)
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, seed))
    for pt in interior(poly, poly.dim + 1):
        assert parseval_check(deg, pt).holds
    if (poly.dim + 1) % 2 == 0:
        k = (poly.dim + 1) // 2
        u = {a: F.element_from_key("u", seed, a) for a in interior(poly, k)}
        assert parseval_revealed_check(deg, u).holds


def test_product_weights_match_ordered_sum():
    poly = corpus.get("square_pm1")
    theta = ParameterMatrix.random(poly, F, 2)
    weights = product_weights(theta)
    n = len(theta.points)
    brute = {}
    for beta in itertools.product(range(n), repeat=theta.rows):
        s = tuple(sum(theta.points[j][c] for j in beta) for c in range(2))
        w = F.one
        for i, j in enumerate(beta):
            w = F.mul(w, theta.values[i, j])
        brute[s] = F.add(brute.get(s, F.zero), w)
    assert {k: int(v) for k, v in weights.items()} == {k: int(v) for k, v in brute.items()}


def test_parseval_brute_force_specialized():
    poly = corpus.get("cross2")
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, 4))
    for pt in interior(poly, 3):
        assert parseval_check(deg, pt).rhs == parseval_brute_force(deg, pt)


def test_revealed_parseval_zero_element():
    poly = corpus.get("segment02")
    deg = degree_functional(poly, ParameterMatrix.symbolic(poly))
    res = parseval_revealed_check(deg, {})
    assert res.holds and deg.field.is_zero(res.lhs)


def test_parseval_refuses_odd_characteristic():
    poly = corpus.get("square_pm1")
    deg = degree_functional(poly, ParameterMatrix.random(poly, prime_field(2**31 - 1), 0))
    with pytest.raises(ValueError):
        parseval_check(deg, (0, 0))


# -- differential identity -------------------------------------------------------


def test_differential_variables_pair_rows():
    assert differential_variables([(1,), (2,)]) == [(0, (1,)), (1, (1,)), (2, (2,)), (3, (2,))]


@pytest.mark.parametrize("name", ["segment02", "segment03"])
def test_differential_identity_exact(name):
    poly = corpus.get(name)
    deg = degree_functional(poly, ParameterMatrix.symbolic(poly))
    one = deg.field.one
    for u in interior(poly, 1):
        for F_ in itertools.combinations(poly.lattice_points, 1):
            assert differential_identity_check(deg, {u: one}, F_).holds
    assert differential_identity_check(deg, {}, [(1,)]).holds


def test_differential_needs_symbolic_backend():
    poly = corpus.get("segment02")
    deg = degree_functional(poly, ParameterMatrix.random(poly, F, 0))
    with pytest.raises(ValueError):
        differential_identity_check(deg, {(1,): 1}, [(1,)])
