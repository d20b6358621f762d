import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lipgrowth.graded_lie import (
    FreeGradedLieAlgebra,
    Generator,
    LieElement,
    NonHomogeneousError,
    all_trees,
    assoc_embed,
    bracket,
    element_from_json,
    embed_coefficient,
    foliage,
    hilbert_check,
    is_nonzero,
    lie_degree,
    n_leaves,
    pbw_series,
    tensor_series,
    tree_from_json,
    tree_str,
    tree_to_json,
)

from oracles import embed_rank, koszul, random_element, random_tree

X = Generator("x", 4)  # degree 3, odd
Y = Generator("y", 3)  # degree 2, even
Z = Generator("z", 2)  # degree 1, odd
GENS = [Z, Y, X]
ALG = FreeGradedLieAlgebra(GENS)

# x on S^3 and y on S^4, ordered y < x
X3, Y4 = Generator("x", 3), Generator("y", 4)
ALG34 = FreeGradedLieAlgebra([Y4, X3])


def norm(e):
    return ALG.normalize(e)


# -- basics -----------------------------------------------------------------------


def test_generator_degree_and_validation():
    assert X.lie_degree == 3 and lie_degree(X) == 3
    assert lie_degree((X, (Y, Z))) == 6
    assert n_leaves((X, (Y, Z))) == 3
    with pytest.raises(ValueError):
        Generator("w", 1)


def test_tree_str_and_foliage():
    t = (X, (Y, Z))
    assert tree_str(t) == "[x,[y,z]]"
    assert foliage(t) == (X, Y, Z)


def test_element_drops_zeros_and_rejects_mixed_degrees():
    e = LieElement({X: 0, (Y, Z): 2})
    assert e.terms == {(Y, Z): Fraction(2)}
    assert LieElement({X: 0}).is_zero()
    with pytest.raises(NonHomogeneousError):
        LieElement({X: 1, Y: 1})


def test_element_arithmetic():
    a = LieElement.of(X, 2)
    b = LieElement.of(X, Fraction(1, 2))
    assert (a - a).is_zero()
    assert (a + b).terms[X] == Fraction(5, 2)
    assert (-a).terms[X] == -2
    assert (3 * b).terms[X] == Fraction(3, 2)
    assert hash(a) == hash(LieElement.of(X, 2))


def test_bracket_is_bilinear_expansion():
    u = LieElement({X: 1})
    v = LieElement({(Y, Z): 2, (Z, Y): 1})
    w = bracket(u, v)
    assert w.terms == {(X, (Y, Z)): 2, (X, (Z, Y)): 1}


# -- embedding ------------------------------------------------------------------


def test_embedding_of_simple_brackets():
    # [y, z] = yz - zy (y even);  [x, z] = xz + zx (both odd)
    assert assoc_embed((Y, Z)) == {(Y, Z): 1, (Z, Y): -1}
    assert assoc_embed((X, Z)) == {(X, Z): 1, (Z, X): 1}
    assert assoc_embed((Y, Y)) == {}
    assert assoc_embed((X, X)) == {(X, X): 2}


def test_embed_coefficient_matches_full_embedding():
    rng = random.Random(7)
    for _ in range(300):
        t = random_tree(rng, GENS, 6)
        full = assoc_embed(t)
        for w, c in full.items():
            assert embed_coefficient(t, w) == c
        assert embed_coefficient(t, foliage(t)) == full.get(foliage(t), 0)


def test_is_nonzero_agrees_with_embedding():
    rng = random.Random(11)
    for _ in range(500):
        t = random_tree(rng, GENS, 7)
        assert is_nonzero(t) == bool(assoc_embed(t))


def test_is_nonzero_on_large_iterated_bracket():
    t = X3
    for _ in range(40):
        t = (Y4, t)
    for _ in range(30):
        t = (X3, t)
    assert is_nonzero(t)


# -- the four randomized invariants ------------------------------------------------


def test_antisymmetry_random():
    rng = random.Random(1)
    for _ in range(1000):
        u = random_tree(rng, GENS, 3)
        v = random_tree(rng, GENS, 3)
        s = -koszul(lie_degree(u), lie_degree(v))
        assert norm((u, v)) == s * norm((v, u))


def test_jacobi_random():
    rng = random.Random(2)
    for _ in range(1000):
        a, b, c = (random_tree(rng, GENS, 2) for _ in range(3))
        da, db, dc = lie_degree(a), lie_degree(b), lie_degree(c)
        total = (koszul(da, dc) * norm((a, (b, c)))
                 + koszul(db, da) * norm((b, (c, a)))
                 + koszul(dc, db) * norm((c, (a, b))))
        assert total.is_zero()


def test_normalize_idempotent_and_hall_supported():
    rng = random.Random(3)
    for _ in range(1000):
        e = random_element(rng, GENS, 5)
        n1 = norm(e)
        assert all(ALG.is_hall(t) for t in n1.terms)
        assert norm(n1) == n1


def test_normalize_preserves_embedding():
    rng = random.Random(4)
    for _ in range(1000):
        e = random_element(rng, GENS, 5)
        assert assoc_embed(norm(e)) == assoc_embed(e)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(GENS), min_size=2, max_size=5), st.randoms(use_true_random=False))
def test_normal_form_zero_iff_embedding_zero(letters, rnd):
    t = letters[0]
    for g in letters[1:]:
        t = (g, t) if rnd.random() < 0.5 else (t, g)
    assert norm(t).is_zero() == (assoc_embed(t) == {})


# -- Hall basis -------------------------------------------------------------------


def test_hall_basis_small_case():
    basis = ALG34.hall_basis(10)
    assert basis[:4] == [X3, Y4, (X3, Y4), (Y4, Y4)]
    assert ((X3, Y4), (X3, Y4)) in basis


def test_mirror_convention_examples():
    assert ALG34.is_hall((X3, (X3, Y4)))
    assert not ALG34.is_hall((X3, (Y4, X3)))
    xy = (X3, Y4)  # degree 5, odd
    assert ALG34.is_hall((xy, xy))
    assert ALG34.normalize((xy, xy)) == LieElement.of((xy, xy))
    assert not ALG34.is_hall((X3, X3))  # even degree self-bracket vanishes


def test_hall_basis_is_a_basis_per_degree():
    # independence and spanning against the embedding, degree by degree
    trees = all_trees(GENS, 6)
    basis = ALG.hall_basis(6)
    for d in range(1, 7):
        bd = [t for t in basis if lie_degree(t) == d]
        assert embed_rank(bd) == len(bd)
        assert embed_rank(trees[d]) == len(bd)


@pytest.mark.parametrize("degs", [[2, 3], [1, 3], [2, 4], [2], [3], [2, 2], [1, 1, 2]])
def test_hilbert_identity(degs):
    gens = [Generator(f"g{i}", d + 1) for i, d in enumerate(degs)]
    rep = hilbert_check(gens, 12)
    assert rep.ok, rep


def test_hilbert_23_recursion():
    rep = hilbert_check([Generator("x", 3), Generator("y", 4)], 12)
    c = rep.tensor_coeffs
    assert rep.ok
    assert all(c[n] == c[n - 2] + c[n - 3] for n in range(3, 13))


def test_series_helpers():
    assert tensor_series([1], 5) == [1] * 6
    # one even generator of degree 2: (1 - t^2)^-1
    assert pbw_series([0, 0, 1, 0, 0], 4) == [1, 0, 1, 0, 1]
    # one odd generator of degree 1: (1 + t)
    assert pbw_series([0, 1, 0], 2) == [1, 1, 0]


def test_self_bracket_rules():
    # odd k: [k,[k,k]] = 0 ; even k: [k,k] = 0
    assert norm((X, (X, X))).is_zero()
    assert norm((Y, Y)).is_zero()
    # [a,[k,k]] = 2[[a,k],k]
    lhs = norm((Y, (X, X)))
    rhs = 2 * norm(((Y, X), X))
    assert lhs == rhs and not lhs.is_zero()


def test_foreign_generator_rejected():
    with pytest.raises(ValueError):
        ALG.normalize((X, Generator("w", 3)))


def test_json_round_trip():
    rng = random.Random(5)
    gens = {g.name: g for g in GENS}
    for _ in range(100):
        t = random_tree(rng, GENS, 6)
        blob = json.loads(json.dumps(tree_to_json(t)))
        assert tree_from_json(blob, gens) == t
    e = random_element(rng, GENS, 4)
    assert element_from_json(json.loads(json.dumps(e.to_json())), gens) == e
    with pytest.raises(ValueError):
        tree_from_json([1, 2, 3], gens)
