import random
from fractions import Fraction

import pytest

from lipgrowth.cw_spaces import (
    ComplexSpec,
    SpecError,
    build_space,
    derive_constraints,
    gromov_predicted_exponent,
    leaf_counts,
    obstruction_count_exponent,
    preset,
    pushforward,
    solve_parameters,
    theorem_zeta,
    top_dimension,
    validate,
    zeta_is_hall,
    zeta_is_nonzero,
)
from lipgrowth.graded_lie import Generator, lie_degree
from lipgrowth.growth_count import ConstraintSystem, closed_form_exponent

from oracles import multilinear_pushforward


def test_presets():
    e1, e2 = preset("example1"), preset("example2")
    assert (e1.ell, e1.m, e1.p, e1.q, e1.n) == (3, 4, 2, 1, 9)
    assert (e2.ell, e2.m, e2.p, e2.q, e2.n) == (3, 4, 2, 2, 12)
    for s in (e1, e2):
        validate(s)
        assert zeta_is_hall(s) and zeta_is_nonzero(s)
    with pytest.raises(SpecError):
        preset("example9")


def test_theorem_zeta_shape():
    x, y = Generator("x", 2), Generator("y", 4)
    assert theorem_zeta(2, 4, 2, 3) == (x, (y, (y, (y, x))))
    assert theorem_zeta(2, 4, 1, 2) == (y, (y, x))


def test_top_dimension_matches_degree():
    for ell, m, p, q in [(2, 4, 2, 3), (3, 4, 1, 5), (3, 5, 4, 7)]:
        s = build_space(ell, m, p, q)
        assert s.n == top_dimension(ell, m, p, q)
        assert lie_degree(s.zeta) == s.n - 2


@pytest.mark.parametrize("args,needle", [
    ((3, 4, 2, 1), "p < q"),
    ((1, 3, 1, 2), "ell >= 2"),
    ((2, 3, 1, 2), "m >= 4"),
    ((2, 5, 1, 2), "m - ell"),
    ((3, 4, 0, 2), "p >= 1"),
])
def test_build_space_names_the_violation(args, needle):
    with pytest.raises(SpecError, match=needle):
        build_space(*args)


@pytest.mark.parametrize("r,expected", [
    ("5", (2, 4, 2, 3, 13)),
    ("9/2", (2, 4, 5, 6, 25)),
    ("13/2", (3, 5, 5, 6, 36)),
])
def test_solve_parameters_examples(r, expected):
    s = solve_parameters(r)
    assert (s.ell, s.m, s.p, s.q, s.n) == expected
    assert s.r == Fraction(r)
    assert closed_form_exponent(derive_constraints(s)) == (Fraction(r), False)


def test_solve_parameters_random():
    rng = random.Random(3)
    for _ in range(150):
        den = rng.randint(1, 20)
        r = Fraction(rng.randint(4 * den + 1, 20 * den), den)
        s = solve_parameters(r)
        assert s.r == r and s.p < s.q
        assert closed_form_exponent(derive_constraints(s)) == (r, False)
        assert zeta_is_nonzero(s)


@pytest.mark.parametrize("r", [4, Fraction(7, 2), 0, -3])
def test_solve_parameters_rejects_small(r):
    with pytest.raises(SpecError):
        solve_parameters(r)


def test_theorem_zeta_is_nonzero_but_not_mirror_hall():
    # innermost [y, x] sits on the other side of the Hall order used here
    s = build_space(2, 4, 2, 3)
    assert zeta_is_nonzero(s)
    assert not zeta_is_hall(s)


def test_pushforward_matches_multilinear_expansion():
    for name in ("example1", "example2"):
        s = preset(name)
        for a in (-3, 0, 2, 5):
            for b in (-2, 1, 4):
                coeff, z = pushforward(s, a, b)
                expanded = multilinear_pushforward(s.zeta, {s.gen_ell: a, s.gen_m: b})
                assert z == s.zeta
                assert expanded.terms.get(s.zeta, 0) == coeff == a ** s.p * b ** s.q


def test_derive_constraints():
    assert derive_constraints(preset("example1")) == ConstraintSystem(3, 4, 2, 1, 9)
    assert leaf_counts(preset("example2")) == (2, 2)


def test_json_round_trip_and_tamper():
    for s in (preset("example1"), preset("example2"), solve_parameters("11/2")):
        assert ComplexSpec.from_json(s.to_json()) == s
    bad = preset("example1").to_json()
    bad["n"] = 10
    with pytest.raises(SpecError):
        ComplexSpec.from_json(bad)
    bad = solve_parameters(5).to_json()
    bad["p"] = 3
    with pytest.raises(SpecError):
        ComplexSpec.from_json(bad)


def test_validate_rejects_zero_zeta():
    x, y = Generator("x", 3), Generator("y", 5)
    # [x, [y, y]] with y even-degree: zero
    spec = ComplexSpec("theorem32", 3, 5, 1, 2, top_dimension(3, 5, 1, 2), (x, (y, y)))
    with pytest.raises(SpecError, match="zero"):
        validate(spec)


def test_gromov_and_obstruction_exponents():
    assert gromov_predicted_exponent(preset("example1")) == 7
    assert obstruction_count_exponent([(1, 3), (1, 4)]) == 7
    assert obstruction_count_exponent([]) == 0
    with pytest.raises(ValueError):
        obstruction_count_exponent([(-1, 2)])
