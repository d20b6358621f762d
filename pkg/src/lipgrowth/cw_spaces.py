"""Two-cell-plus-top-cell spaces X = (S^ell v S^m) u_zeta D^n and their degree constraints.

A cellular L-Lipschitz map X -> Y has degrees (a, b) on the two spheres.  The
top cell then has degree a^p b^q (the pushforward of the attaching class
zeta), and cell-by-cell volume bounds give the constraint system

    |a| <= L^ell,  |b| <= L^m,  |a^p b^q| <= L^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

from .graded_lie import (
    FreeGradedLieAlgebra,
    Generator,
    Tree,
    is_nonzero,
    leaves,
    lie_degree,
    tree_from_json,
    tree_to_json,
)
from .growth_count import ConstraintSystem

FAMILIES = ("theorem32", "example1", "example2")
L_NAME, M_NAME = "x", "y"


class SpecError(ValueError):
    """Parameters that do not describe a space of the requested family."""


@dataclass(frozen=True)
class ComplexSpec:
    family: str
    ell: int
    m: int
    p: int
    q: int
    n: int
    zeta: Tree

    @property
    def gen_ell(self) -> Generator:
        return Generator(L_NAME, self.ell)

    @property
    def gen_m(self) -> Generator:
        return Generator(M_NAME, self.m)

    def algebra(self) -> FreeGradedLieAlgebra:
        """The free algebra on the two spheres, ordered id_m < id_ell."""
        return FreeGradedLieAlgebra([self.gen_m, self.gen_ell])

    @property
    def r(self) -> Fraction:
        """The exponent ell + m + (2 - p - q)/q targeted by the theorem family."""
        return self.ell + self.m + Fraction(2 - self.p - self.q, self.q)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "ell": self.ell,
            "m": self.m,
            "p": self.p,
            "q": self.q,
            "n": self.n,
            "zeta": tree_to_json(self.zeta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ComplexSpec":
        gens = {L_NAME: Generator(L_NAME, obj["ell"]), M_NAME: Generator(M_NAME, obj["m"])}
        spec = cls(obj["family"], obj["ell"], obj["m"], obj["p"], obj["q"], obj["n"],
                   tree_from_json(obj["zeta"], gens))
        validate(spec)
        return spec


def top_dimension(ell: int, m: int, p: int, q: int) -> int:
    return p * (ell - 1) + q * (m - 1) + 2


def theorem_zeta(ell: int, m: int, p: int, q: int) -> Tree:
    """[x,[x,...[y,[y,...[y, x]...]]]] with p-1 outer x's and q y's."""
    x, y = Generator(L_NAME, ell), Generator(M_NAME, m)
    t: Tree = x
    for _ in range(q):
        t = (y, t)
    for _ in range(p - 1):
        t = (x, t)
    return t


def _theorem_violations(ell: int, m: int, p: int, q: int) -> Iterable[str]:
    if ell < 2:
        yield f"ell >= 2 (got ell={ell})"
    if m < 4:
        yield f"m >= 4 (got m={m})"
    if not ell < m:
        yield f"ell < m (got ell={ell}, m={m})"
    if m - ell not in (1, 2):
        yield f"m - ell in {{1, 2}} (got {m - ell})"
    if p < 1:
        yield f"p >= 1 (got p={p})"
    if not p < q:
        yield f"p < q (got p={p}, q={q})"


def build_space(ell: int, m: int, p: int, q: int) -> ComplexSpec:
    """The theorem-family space with attaching class the iterated bracket zeta."""
    bad = list(_theorem_violations(ell, m, p, q))
    if bad:
        raise SpecError("theorem32 parameters violate: " + "; ".join(bad))
    spec = ComplexSpec("theorem32", ell, m, p, q, top_dimension(ell, m, p, q),
                       theorem_zeta(ell, m, p, q))
    validate(spec)
    return spec


def preset(name: str) -> ComplexSpec:
    x, y = Generator(L_NAME, 3), Generator(M_NAME, 4)
    if name == "example1":
        return ComplexSpec("example1", 3, 4, 2, 1, 9, (x, (x, y)))
    if name == "example2":
        xy = (x, y)
        return ComplexSpec("example2", 3, 4, 2, 2, 12, (xy, xy))
    raise SpecError(f"unknown preset {name!r} (choose example1 or example2)")


def zeta_is_nonzero(spec: ComplexSpec) -> bool:
    """Certified via a nonzero coefficient of the tensor-algebra embedding."""
    return is_nonzero(spec.zeta)


def zeta_is_hall(spec: ComplexSpec) -> bool:
    return spec.algebra().is_hall(spec.zeta)


def validate(spec: ComplexSpec) -> None:
    """Raise SpecError unless ``spec`` satisfies its family's invariants."""
    if spec.family not in FAMILIES:
        raise SpecError(f"unknown family {spec.family!r}")
    if spec.family == "theorem32":
        bad = list(_theorem_violations(spec.ell, spec.m, spec.p, spec.q))
        if bad:
            raise SpecError("theorem32 parameters violate: " + "; ".join(bad))
        if spec.n != top_dimension(spec.ell, spec.m, spec.p, spec.q):
            raise SpecError("n != p(ell-1) + q(m-1) + 2")
    else:
        ref = preset(spec.family)
        if (spec.ell, spec.m, spec.p, spec.q, spec.n, spec.zeta) != (
                ref.ell, ref.m, ref.p, ref.q, ref.n, ref.zeta):
            raise SpecError(f"{spec.family} is a fixed preset")
    if lie_degree(spec.zeta) != spec.n - 2:
        raise SpecError(f"lie_degree(zeta) = {lie_degree(spec.zeta)} != n - 2 = {spec.n - 2}")
    counts = leaf_counts(spec)
    if counts != (spec.p, spec.q):
        raise SpecError(f"zeta has leaf counts {counts}, expected (p, q) = {(spec.p, spec.q)}")
    # a Hall zeta is nonzero; otherwise fall back on the embedding
    if not (zeta_is_hall(spec) or zeta_is_nonzero(spec)):
        raise SpecError("zeta is zero in the free graded Lie algebra")


def leaf_counts(spec: ComplexSpec) -> Tuple[int, int]:
    """(number of S^ell leaves, number of S^m leaves) in zeta."""
    gx, gy = spec.gen_ell, spec.gen_m
    na = nb = 0
    for g in leaves(spec.zeta):
        if g == gx:
            na += 1
        elif g == gy:
            nb += 1
        else:
            raise SpecError(f"zeta uses foreign generator {g!r}")
    return na, nb


def solve_parameters(r: Union[Fraction, int, str]) -> ComplexSpec:
    """A theorem-family space whose growth exponent is exactly ``r``.

    s = ell + m is the integer with r in (s-2, s-1]; c = s - r lies in [1, 2);
    q is the least multiple of denom(c - 1) exceeding 2/(2 - c), and
    p = (c - 1) q + 2.  Then ell + m + (2 - p - q)/q = r and p < q.
    """
    r = Fraction(r)
    if r <= 4:
        raise SpecError(f"need r > 4, got {r}")
    # r in (s-2, s-1]  <=>  s - 1 = ceil(r)
    s = math.ceil(r) + 1
    if s < 6:
        raise SpecError(f"r = {r} needs ell + m = {s} < 6")
    ell, m = ((s - 1) // 2, (s + 1) // 2) if s % 2 else (s // 2 - 1, s // 2 + 1)
    c = s - r
    v = (c - 1).denominator
    bound = Fraction(2) / (2 - c)
    q = (math.floor(bound / v) + 1) * v
    p = (c - 1) * q + 2
    assert p.denominator == 1
    spec = build_space(ell, m, int(p), q)
    assert spec.r == r
    return spec


def pushforward(spec: ComplexSpec, a: int, b: int) -> Tuple[int, Tree]:
    """Top-cell degree forced by sphere degrees (a, b): a^#x * b^#y times zeta."""
    na, nb = leaf_counts(spec)
    return a ** na * b ** nb, spec.zeta


def derive_constraints(spec: ComplexSpec) -> ConstraintSystem:
    na, nb = leaf_counts(spec)
    return ConstraintSystem(spec.ell, spec.m, na, nb, spec.n)


def gromov_predicted_exponent(spec: ComplexSpec) -> int:
    """Exponent counting only the two sphere degrees (ignores the top cell)."""
    return spec.ell + spec.m


def obstruction_count_exponent(entries: Iterable[Tuple[int, int]]) -> int:
    """sum of rank * weight over (rank, weight) obstruction groups."""
    total = 0
    for rank, weight in entries:
        if rank < 0 or weight < 0:
            raise ValueError(f"rank and weight must be >= 0, got ({rank}, {weight})")
        total += rank * weight
    return total
