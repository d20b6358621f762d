"""Free graded Lie algebras over Q with a Hall basis.

Trees are built from :class:`Generator` leaves and 2-tuples ``(left, right)``
for brackets.  A generator attached to the sphere ``S^n`` has Lie degree
``n - 1``; the bracket adds degrees.

The Hall set used here is fixed by a total order on the generators (listed
smallest first).  Ordinary Hall trees satisfy, for ``t = (u, v)``:

* ``u`` and ``v`` are Hall and ``v < u`` in the Hall order;
* ``v`` is a generator, or ``v = (v1, v2)`` with ``v1 >= u``.

The Hall order puts trees with more leaves first, then compares generators by
their given order and compound trees left-to-right.  So every compound tree
sorts below its left factor.  On top of the ordinary Hall trees, the graded
basis contains the self-bracket ``(a, a)`` for every odd-degree Hall tree
``a``.

Correctness does not rest on this description: :func:`assoc_embed` maps into
the tensor algebra, where brackets become graded commutators, and that map is
injective.  The test-suite checks normal forms and basis independence against
it.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union


@dataclass(frozen=True, order=True)
class Generator:
    """Generator of pi_*(wedge of spheres) coming from the sphere ``S^sphere_dim``."""

    name: str
    sphere_dim: int

    def __post_init__(self):
        if self.sphere_dim < 2:
            raise ValueError(f"sphere_dim must be >= 2, got {self.sphere_dim}")

    @property
    def lie_degree(self) -> int:
        return self.sphere_dim - 1

    def __repr__(self):
        return self.name


Tree = Union[Generator, Tuple["Tree", "Tree"]]
Word = Tuple[Generator, ...]


class NonHomogeneousError(ValueError):
    pass


def is_leaf(t: Tree) -> bool:
    return isinstance(t, Generator)


@functools.lru_cache(maxsize=None)
def lie_degree(t: Tree) -> int:
    if isinstance(t, Generator):
        return t.lie_degree
    return lie_degree(t[0]) + lie_degree(t[1])


@functools.lru_cache(maxsize=None)
def n_leaves(t: Tree) -> int:
    if isinstance(t, Generator):
        return 1
    return n_leaves(t[0]) + n_leaves(t[1])


def leaves(t: Tree) -> Iterator[Generator]:
    if isinstance(t, Generator):
        yield t
    else:
        yield from leaves(t[0])
        yield from leaves(t[1])


def tree_str(t: Tree) -> str:
    if isinstance(t, Generator):
        return t.name
    return f"[{tree_str(t[0])},{tree_str(t[1])}]"


def _koszul(i: int, j: int) -> int:
    return -1 if (i * j) % 2 else 1


class LieElement:
    """Homogeneous rational combination of bracket trees.

    Zero coefficients are dropped on construction, so ``terms`` never holds
    zeros.  The zero element has no degree (``degree is None``).
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping[Tree, object] = ()):
        clean: Dict[Tree, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for t, c in items:
            c = Fraction(c)
            if c:
                clean[t] = clean.get(t, Fraction(0)) + c
                if not clean[t]:
                    del clean[t]
        degrees = {lie_degree(t) for t in clean}
        if len(degrees) > 1:
            raise NonHomogeneousError(f"mixed degrees {sorted(degrees)}")
        self.terms = clean
        self.degree = degrees.pop() if degrees else None

    @classmethod
    def of(cls, t: Tree, coeff=1) -> "LieElement":
        return cls({t: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return LieElement(out)

    def __neg__(self):
        return LieElement({t: -c for t, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __rmul__(self, scalar) -> "LieElement":
        scalar = Fraction(scalar)
        return LieElement({t: scalar * c for t, c in self.terms.items()})

    __mul__ = __rmul__

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{tree_str(t)}" for t, c in sorted(self.terms.items(), key=lambda kv: tree_str(kv[0])))

    def to_json(self) -> list:
        return [
            {"tree": tree_to_json(t), "numerator": c.numerator, "denominator": c.denominator}
            for t, c in sorted(self.terms.items(), key=lambda kv: tree_str(kv[0]))
        ]


def bracket(u: LieElement, v: LieElement) -> LieElement:
    """Bilinear expansion of [u, v] into node trees (no normalization)."""
    out: Dict[Tree, Fraction] = {}
    for tu, cu in u.terms.items():
        for tv, cv in v.terms.items():
            key = (tu, tv)
            out[key] = out.get(key, 0) + cu * cv
    return LieElement(out)


# -- associative embedding -------------------------------------------------


def _poly_add(acc: Dict[Word, Fraction], poly: Mapping[Word, Fraction], scale) -> None:
    for w, c in poly.items():
        v = acc.get(w, 0) + scale * c
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)


@functools.lru_cache(maxsize=None)
def _embed_tree(t: Tree) -> Tuple[Tuple[Word, Fraction], ...]:
    if isinstance(t, Generator):
        return (((t,), Fraction(1)),)
    left, right = dict(_embed_tree(t[0])), dict(_embed_tree(t[1]))
    sign = _koszul(lie_degree(t[0]), lie_degree(t[1]))
    out: Dict[Word, Fraction] = {}
    for w1, c1 in left.items():
        for w2, c2 in right.items():
            _poly_add(out, {w1 + w2: c1 * c2}, 1)
            _poly_add(out, {w2 + w1: c1 * c2}, -sign)
    return tuple(sorted(out.items(), key=lambda kv: [g.name for g in kv[0]]))


def assoc_embed(e: Union[LieElement, Tree]) -> Dict[Word, Fraction]:
    """Image in the tensor algebra: [u, v] -> uv - (-1)^{|u||v|} vu.

    The map is injective on the free graded Lie algebra, so ``e == 0`` there
    exactly when the returned polynomial is empty.
    """
    if not isinstance(e, LieElement):
        e = LieElement.of(e)
    out: Dict[Word, Fraction] = {}
    for t, c in e.terms.items():
        _poly_add(out, dict(_embed_tree(t)), c)
    return out


def embed_coefficient(t: Tree, word: Sequence[Generator]) -> Fraction:
    """Coefficient of ``word`` in ``assoc_embed(t)``, without expanding the rest.

    Runs over (subtree, start position) pairs, so it stays polynomial in the
    size of ``t`` where the full embedding has up to 2^(leaves - 1) words.
    """
    word = tuple(word)
    if len(word) != n_leaves(t):
        return Fraction(0)

    @functools.lru_cache(maxsize=None)
    def coef(node: Tree, start: int) -> Fraction:
        if isinstance(node, Generator):
            return Fraction(1) if word[start] == node else Fraction(0)
        u, v = node
        nu, nv = n_leaves(u), n_leaves(v)
        out = Fraction(0)
        cu = coef(u, start)
        if cu:
            out += cu * coef(v, start + nu)
        cv = coef(v, start)
        if cv:
            out -= _koszul(lie_degree(u), lie_degree(v)) * cv * coef(u, start + nv)
        return out

    return coef(t, 0)


def foliage(t: Tree) -> Word:
    return tuple(leaves(t))


def is_nonzero(t: Tree, full_limit: int = 14) -> bool:
    """Whether the tree ``t`` is nonzero in the free graded Lie algebra.

    A nonzero coefficient of some candidate word in the embedding settles it
    at any size.  Candidates are the leaf word, its reverse, and the words
    listing equal letters together (for [x,..[x,[y,..[y,x]]]] the word
    y..yx..x arises from a single expansion path).  Small trees that match no
    candidate get the full embedding.
    """
    fol = foliage(t)
    counts: Dict[Generator, int] = {}
    for g in fol:
        counts[g] = counts.get(g, 0) + 1
    candidates = [fol, fol[::-1]]
    if len(counts) <= 4:
        for perm in itertools.permutations(counts):
            candidates.append(tuple(g for g in perm for _ in range(counts[g])))
    for w in candidates:
        if embed_coefficient(t, w):
            return True
    if n_leaves(t) <= full_limit:
        return bool(assoc_embed(t))
    raise ValueError(f"cannot certify tree with {n_leaves(t)} leaves either way")


# -- Hall basis --------------------------------------------------------------


class FreeGradedLieAlgebra:
    """Free graded Lie algebra on ``generators`` (given smallest first)."""

    def __init__(self, generators: Sequence[Generator]):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValueError(f"generator names must be unique: {names}")
        if len(set(generators)) != len(generators):
            raise ValueError("duplicate generators")
        if not generators:
            raise ValueError("need at least one generator")
        self.generators = tuple(generators)
        self._rank = {g: i for i, g in enumerate(self.generators)}
        self._bracket_cache: Dict[Tuple[Tree, Tree], Dict[Tree, Fraction]] = {}
        self._in_progress: set = set()

    def __repr__(self):
        return f"FreeGradedLieAlgebra({list(self.generators)!r})"

    # Hall order -------------------------------------------------------------

    def order_key(self, t: Tree):
        """Sort key for the Hall order (smaller key = smaller tree)."""
        return (-n_leaves(t), self._inner_key(t))

    def _inner_key(self, t: Tree):
        if isinstance(t, Generator):
            return (0, self._rank[t])
        return (1, self.order_key(t[0]), self.order_key(t[1]))

    def less(self, s: Tree, t: Tree) -> bool:
        return self.order_key(s) < self.order_key(t)

    def _check_tree(self, t: Tree) -> None:
        for g in leaves(t):
            if g not in self._rank:
                raise ValueError(f"generator {g!r} is not in {self!r}")

    def is_ordinary_hall(self, t: Tree) -> bool:
        if isinstance(t, Generator):
            return t in self._rank
        u, v = t
        if not (self.is_ordinary_hall(u) and self.is_ordinary_hall(v)):
            return False
        if not self.less(v, u):
            return False
        return isinstance(v, Generator) or not self.less(v[0], u)

    @staticmethod
    def is_self_bracket(t: Tree) -> bool:
        return not isinstance(t, Generator) and t[0] == t[1]

    def is_hall(self, t: Tree) -> bool:
        """Membership in the graded Hall basis (ordinary Hall or odd self-bracket)."""
        if self.is_self_bracket(t):
            return self.is_ordinary_hall(t[0]) and lie_degree(t[0]) % 2 == 1
        return self.is_ordinary_hall(t)

    def _ordinary_hall_by_degree(self, max_degree: int) -> Dict[int, List[Tree]]:
        by_deg: Dict[int, List[Tree]] = {d: [] for d in range(1, max_degree + 1)}
        for g in self.generators:
            if g.lie_degree <= max_degree:
                by_deg[g.lie_degree].append(g)
        for d in range(1, max_degree + 1):
            for du in range(1, d):
                for u in by_deg[du]:
                    for v in by_deg[d - du]:
                        if not self.less(v, u):
                            continue
                        if isinstance(v, Generator) or not self.less(v[0], u):
                            by_deg[d].append((u, v))
        return by_deg

    def hall_basis(self, max_degree: int) -> List[Tree]:
        """Basis trees of degree <= max_degree, sorted by degree then Hall order."""
        ordinary = self._ordinary_hall_by_degree(max_degree)
        out = [t for d in ordinary for t in ordinary[d]]
        out += [(a, a) for a in out if lie_degree(a) % 2 == 1 and 2 * lie_degree(a) <= max_degree]
        return sorted(out, key=lambda t: (lie_degree(t), self.order_key(t)))

    # normalization -------------------------------------------------------

    def normalize(self, e: Union[LieElement, Tree]) -> LieElement:
        """Rewrite ``e`` on the Hall basis (graded antisymmetry + Jacobi)."""
        if not isinstance(e, LieElement):
            e = LieElement.of(e)
        out: Dict[Tree, Fraction] = {}
        for t, c in e.terms.items():
            self._check_tree(t)
            _acc(out, self._normalize_tree(t), c)
        return LieElement(out)

    def _normalize_tree(self, t: Tree) -> Dict[Tree, Fraction]:
        if isinstance(t, Generator):
            return {t: Fraction(1)}
        left = self._normalize_tree(t[0])
        right = self._normalize_tree(t[1])
        out: Dict[Tree, Fraction] = {}
        for a, ca in left.items():
            for b, cb in right.items():
                _acc(out, self.bracket_basis(a, b), ca * cb)
        return out

    def bracket_basis(self, a: Tree, b: Tree) -> Dict[Tree, Fraction]:
        """[a, b] for basis trees a, b, expanded on the basis."""
        key = (a, b)
        hit = self._bracket_cache.get(key)
        if hit is not None:
            return hit
        if key in self._in_progress:
            raise RuntimeError(f"rewriting loop at [{tree_str(a)}, {tree_str(b)}]")
        self._in_progress.add(key)
        try:
            result = self._bracket_basis(a, b)
        finally:
            self._in_progress.discard(key)
        self._bracket_cache[key] = result
        return result

    def _bracket_basis(self, a: Tree, b: Tree) -> Dict[Tree, Fraction]:
        da, db = lie_degree(a), lie_degree(b)
        swap = -_koszul(da, db)  # [a, b] = swap * [b, a]
        if self.is_self_bracket(b):
            # [a, [k, k]] = 2 [[a, k], k] for odd k
            k = b[0]
            if a == k:
                return {}
            out: Dict[Tree, Fraction] = {}
            for g, cg in self.bracket_basis(a, k).items():
                _acc(out, self.bracket_basis(g, k), 2 * cg)
            return out
        if self.is_self_bracket(a):
            return _scaled(self.bracket_basis(b, a), swap)
        if a == b:
            return {(a, a): Fraction(1)} if da % 2 else {}
        if self.less(a, b):
            return _scaled(self.bracket_basis(b, a), swap)
        # now b < a, both ordinary Hall
        if isinstance(b, Generator) or not self.less(b[0], a):
            return {(a, b): Fraction(1)}
        # [a, [b1, b2]] = [[a, b1], b2] + (-1)^{|a||b1|} [b1, [a, b2]]
        b1, b2 = b
        out = {}
        for g, cg in self.bracket_basis(a, b1).items():
            _acc(out, self.bracket_basis(g, b2), cg)
        sign = _koszul(da, lie_degree(b1))
        for g, cg in self.bracket_basis(a, b2).items():
            _acc(out, self.bracket_basis(b1, g), sign * cg)
        return out

    # dimension check -----------------------------------------------------------

    def hilbert_check(self, max_degree: int) -> "HilbertReport":
        return hilbert_check(self.generators, max_degree, self)


def _acc(acc: Dict[Tree, Fraction], terms: Mapping[Tree, Fraction], scale) -> None:
    for t, c in terms.items():
        v = acc.get(t, 0) + scale * c
        if v:
            acc[t] = v
        else:
            acc.pop(t, None)


def _scaled(terms: Mapping[Tree, Fraction], scale) -> Dict[Tree, Fraction]:
    return {t: scale * c for t, c in terms.items()}


# -- Hilbert series ---------------------------------------------------------


@dataclass(frozen=True)
class HilbertReport:
    max_degree: int
    basis_dims: Tuple[int, ...]  # index d -> number of basis elements of degree d
    tensor_coeffs: Tuple[int, ...]  # coefficients of 1 / (1 - sum t^deg g)
    product_coeffs: Tuple[int, ...]  # coefficients of the PBW product
    first_mismatch: Union[int, None]

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None


def tensor_series(degrees: Iterable[int], max_degree: int) -> List[int]:
    """Coefficients of 1 / (1 - sum_i t^{d_i}) up to t^max_degree."""
    degrees = list(degrees)
    c = [0] * (max_degree + 1)
    c[0] = 1
    for n in range(1, max_degree + 1):
        c[n] = sum(c[n - d] for d in degrees if d <= n)
    return c


def pbw_series(dims: Sequence[int], max_degree: int) -> List[int]:
    """prod_{d even} (1-t^d)^{-dims[d]} * prod_{d odd} (1+t^d)^{dims[d]}, truncated."""
    series = [0] * (max_degree + 1)
    series[0] = 1
    for d in range(1, max_degree + 1):
        for _ in range(dims[d]):
            if d % 2 == 0:
                # multiply by 1/(1 - t^d)
                for n in range(d, max_degree + 1):
                    series[n] += series[n - d]
            else:
                # multiply by (1 + t^d)
                for n in range(max_degree, d - 1, -1):
                    series[n] += series[n - d]
    return series


def hilbert_check(gens: Sequence[Generator], max_degree: int,
                  algebra: Union[FreeGradedLieAlgebra, None] = None) -> HilbertReport:
    """Compare Hall-basis dimensions with the tensor-algebra Hilbert series."""
    algebra = algebra or FreeGradedLieAlgebra(gens)
    dims = [0] * (max_degree + 1)
    for t in algebra.hall_basis(max_degree):
        dims[lie_degree(t)] += 1
    tensor = tensor_series((g.lie_degree for g in gens), max_degree)
    product = pbw_series(dims, max_degree)
    mismatch = next((d for d in range(max_degree + 1) if tensor[d] != product[d]), None)
    return HilbertReport(max_degree, tuple(dims), tuple(tensor), tuple(product), mismatch)


# -- JSON ----------------------------------------------------------------------


def tree_to_json(t: Tree):
    if isinstance(t, Generator):
        return t.name
    return [tree_to_json(t[0]), tree_to_json(t[1])]


def tree_from_json(obj, gens: Mapping[str, Generator]) -> Tree:
    if isinstance(obj, str):
        return gens[obj]
    if isinstance(obj, list) and len(obj) == 2:
        return (tree_from_json(obj[0], gens), tree_from_json(obj[1], gens))
    raise ValueError(f"malformed tree: {obj!r}")


def generator_to_json(g: Generator) -> dict:
    return {"name": g.name, "sphere_dim": g.sphere_dim}


def element_from_json(obj: list, gens: Mapping[str, Generator]) -> LieElement:
    return LieElement(
        (tree_from_json(term["tree"], gens), Fraction(term["numerator"], term["denominator"]))
        for term in obj
    )


def all_trees(gens: Sequence[Generator], max_degree: int) -> Dict[int, List[Tree]]:
    """Every bracket tree over ``gens`` up to ``max_degree``, grouped by degree."""
    by_deg: Dict[int, List[Tree]] = {d: [] for d in range(1, max_degree + 1)}
    for g in gens:
        if g.lie_degree <= max_degree:
            by_deg[g.lie_degree].append(g)
    for d in range(1, max_degree + 1):
        for du in range(1, d):
            by_deg[d].extend(itertools.product(by_deg[du], by_deg[d - du]))
    return by_deg
