"""Asymptotic Lipschitz-cost classes and the budget checks of the extension arguments.

A :class:`CostExpr` is a finite sum of atoms ``L^e (log L)^k [exp(kappa sqrt(log L))]``,
each implicitly multiplied by an unspecified constant.  Atoms are ordered
lexicographically by (power of L, subexponential flag, power of log); a sum is
compared through its leading atom.

Combination rules used throughout:

* a Whitehead product of two maps costs a constant times the max of the two;
* a degree-d self-map of S^k can be realized with cost O(d^(1/k));
* concatenating homotopies over a fixed-length interval costs the max of the
  pieces.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .cw_spaces import ComplexSpec
from .graded_lie import leaves
from .growth_count import integer_root

Number = Union[int, Fraction]


@dataclass(frozen=True)
class Atom:
    pow_L: Fraction = Fraction(0)
    pow_log: int = 0
    subexp: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pow_L", Fraction(self.pow_L))
        if self.pow_log < 0:
            raise ValueError("pow_log must be >= 0")

    @property
    def key(self) -> Tuple[Fraction, bool, int]:
        return (self.pow_L, self.subexp, self.pow_log)

    def __mul__(self, other: "Atom") -> "Atom":
        return Atom(self.pow_L + other.pow_L, self.pow_log + other.pow_log,
                    self.subexp or other.subexp)

    def log_value(self, L: float, kappa: float = 1.0) -> float:
        """log of the atom's value at L (constant taken as 1)."""
        lg = math.log(L)
        out = float(self.pow_L) * lg
        if self.pow_log:
            out += self.pow_log * math.log(lg)
        if self.subexp:
            out += kappa * math.sqrt(lg)
        return out

    def render(self, var: str) -> str:
        parts = []
        if self.pow_L:
            parts.append(var if self.pow_L == 1 else f"{var}^({self.pow_L})")
        if self.pow_log:
            parts.append(f"log({var})" + (f"^{self.pow_log}" if self.pow_log > 1 else ""))
        if self.subexp:
            parts.append(f"exp(k*sqrt(log {var}))")
        return "*".join(parts) or "1"


class CostExpr:
    """Sum of cost atoms in the variable ``var`` (an O-class)."""

    __slots__ = ("atoms", "var")

    def __init__(self, atoms: Iterable[Atom], var: str = "L"):
        atoms = frozenset(atoms)
        if not atoms:
            raise ValueError("a cost class needs at least one atom")
        self.atoms = atoms
        self.var = var

    @classmethod
    def constant(cls, var: str = "L") -> "CostExpr":
        return cls([Atom()], var)

    @classmethod
    def power(cls, e: Number, log: int = 0, subexp: bool = False, var: str = "L") -> "CostExpr":
        return cls([Atom(Fraction(e), log, subexp)], var)

    def _check(self, other: "CostExpr") -> None:
        if self.var != other.var:
            raise ValueError(f"cannot combine costs in {self.var} and {other.var}")

    def __mul__(self, other: "CostExpr") -> "CostExpr":
        self._check(other)
        return CostExpr((a * b for a in self.atoms for b in other.atoms), self.var)

    def __add__(self, other: "CostExpr") -> "CostExpr":
        self._check(other)
        return CostExpr(self.atoms | other.atoms, self.var)

    def leading(self) -> Atom:
        return max(self.atoms, key=lambda a: a.key)

    def canonical(self) -> "CostExpr":
        """The same O-class with every dominated atom dropped."""
        return CostExpr([self.leading()], self.var)

    def compare(self, other: "CostExpr") -> int:
        self._check(other)
        a, b = self.leading().key, other.leading().key
        return (a > b) - (a < b)

    def dominates(self, other: "CostExpr") -> bool:
        return self.compare(other) > 0

    def dominated_by(self, other: "CostExpr") -> bool:
        """Strictly slower growth than ``other``."""
        return self.compare(other) < 0

    def same_class(self, other: "CostExpr") -> bool:
        return self.compare(other) == 0

    def log_value(self, L: float, kappa: float = 1.0) -> float:
        vals = [a.log_value(L, kappa) for a in self.atoms]
        top = max(vals)
        return top + math.log(sum(math.exp(v - top) for v in vals))

    def evaluate(self, L: float, kappa: float = 1.0) -> float:
        return math.exp(self.log_value(L, kappa))

    def __eq__(self, other):
        if not isinstance(other, CostExpr):
            return NotImplemented
        return self.var == other.var and self.atoms == other.atoms

    def __hash__(self):
        return hash((self.atoms, self.var))

    def __str__(self):
        ordered = sorted(self.atoms, key=lambda a: a.key, reverse=True)
        return " + ".join(a.render(self.var) for a in ordered)

    __repr__ = __str__


def dominance_log_threshold(a: CostExpr, b: CostExpr, kappa: float = 1.0) -> float:
    """A value T with a(L) >= b(L) whenever log L >= T (unit constants).

    Requires a.dominates(b).  Since a(L) >= lead(a)(L) and b(L) <= |b| max
    atom, it suffices that g = log lead(a) - log(|b| beta) is >= 0 and
    nondecreasing for every atom beta of b.  With x = log L,
    g'(x) = d + k/x + s kappa / (2 sqrt x), and past the points checked
    below its sign can no longer change.
    """
    if not a.dominates(b):
        raise ValueError("threshold needs a to dominate b")
    lead = a.leading()
    nb = math.log(len(b.atoms))
    worst = 1.0
    for beta in b.atoms:
        d = float(lead.pow_L - beta.pow_L)
        k = lead.pow_log - beta.pow_log
        s = kappa * (int(lead.subexp) - int(beta.subexp))

        def g(x):
            return d * x + k * math.log(x) + s * math.sqrt(x) - nb

        def dg(x):
            return d + k / x + s / (2 * math.sqrt(x))

        # with k > 0 > s the derivative dips once, at sqrt x = 4k/|s|
        floor_x = (4 * k / -s) ** 2 if k > 0 > s else 1.0
        x = max(1.0, floor_x)
        while not (g(x) >= 0 and dg(x) >= 0):
            x *= 2
        worst = max(worst, x)
    return worst


def cost_max(*costs: CostExpr) -> CostExpr:
    out = costs[0]
    for c in costs[1:]:
        out = out + c
    return out.canonical()


def cost_product(*costs: CostExpr) -> CostExpr:
    out = costs[0]
    for c in costs[1:]:
        out = out * c
    return out


def cost_sum(*costs: CostExpr) -> CostExpr:
    out = costs[0]
    for c in costs[1:]:
        out = out + c
    return out


# -- cost rules ------------------------------------------------------------------


def cost_degree_map(k: int, d: Union[CostExpr, int]) -> CostExpr:
    """Cost class of an efficient degree-d self-map of S^k: d^(1/k).

    ``d`` is a cost class (the degree as a function of L) or a fixed integer,
    which costs a constant.  Log powers are rounded up after taking the root.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if isinstance(d, CostExpr):
        return CostExpr(
            (Atom(a.pow_L / k, -(-a.pow_log // k), a.subexp) for a in d.atoms), d.var
        )
    return CostExpr.constant()


def degree_map_lipschitz(k: int, d: int) -> float:
    """Numeric d^(1/k) for a concrete degree (0 for the constant map)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    d = abs(d)
    if d == 0:
        return 0.0
    return math.exp(math.log(d) / k)


def cost_whitehead(c1: CostExpr, c2: CostExpr) -> CostExpr:
    return cost_max(c1, c2)


def cost_nullhomotopy(c: CostExpr, mode: str = "theorem") -> CostExpr:
    """Cost of a nullhomotopy of a map of cost ``c`` into a formal target.

    ``theorem`` includes the exp(kappa sqrt(log L)) loss that is known to
    suffice; ``conjecture`` assumes a linear bound.
    """
    if mode == "theorem":
        return c * CostExpr.power(0, subexp=True, var=c.var)
    if mode == "conjecture":
        return c
    raise ValueError(f"mode must be 'theorem' or 'conjecture', got {mode!r}")


# -- the budget of the Example-1 extension ----------------------------------------


@dataclass
class Stage:
    name: str
    measured: float
    claimed: CostExpr
    ratio: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "measured": self.measured, "claimed": str(self.claimed),
                "ratio": self.ratio, "pass": self.passed}


@dataclass
class BudgetReport:
    L: int
    eps: Fraction
    a: int
    b: int
    s: int
    t: int
    e: int
    stages: List[Stage] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(st.passed for st in self.stages)

    def stage(self, name: str) -> Stage:
        for st in self.stages:
            if st.name == name:
                return st
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"L": self.L, "eps": str(self.eps), "a": self.a, "b": self.b,
                "s": self.s, "t": self.t, "e": self.e,
                "stages": [st.to_json() for st in self.stages]}


class InadmissiblePair(ValueError):
    pass


def _eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"need 0 < eps < 1, got {eps}")
    return eps


def floor_power(L: int, e: Fraction) -> int:
    """floor(L^e) for rational e >= 0, exactly."""
    return integer_root(L ** e.numerator, e.denominator)


def _le_power(x: int, L: int, e: Fraction) -> bool:
    """|x| <= L^e, exactly."""
    return abs(x) ** e.denominator <= L ** e.numerator


def floor_div_power(X: int, L: int, e: Fraction) -> int:
    """floor(X / L^e) for rational e >= 0, exactly (X may be negative)."""
    u, v = e.numerator, e.denominator
    den = L ** u  # X / L^e = (X^v / L^u)^(1/v)
    f = integer_root(abs(X) ** v // den, v)
    if X >= 0:
        return f
    exact = f ** v * den == abs(X) ** v
    return -f if exact else -(f + 1)


def admissible_bounds(L: int, eps) -> Tuple[Fraction, Fraction, Fraction]:
    eps = _eps(eps)
    return 3 - eps, 4 - eps, 9 - 2 * eps


def check_admissible(L: int, eps, a: int, b: int) -> None:
    ea, eb, eab = admissible_bounds(L, eps)
    if not _le_power(a, L, ea):
        raise InadmissiblePair(f"|a| = {abs(a)} > L^(3-eps) (floor {floor_power(L, ea)})")
    if not _le_power(b, L, eb):
        raise InadmissiblePair(f"|b| = {abs(b)} > L^(4-eps) (floor {floor_power(L, eb)})")
    if not _le_power(a * a * b, L, eab):
        raise InadmissiblePair(f"|a^2 b| = {abs(a * a * b)} > L^(9-2eps)")


def example_budget(spec: ComplexSpec, L: int, eps, a: int, b: int,
                   C: float = 2.0) -> BudgetReport:
    """Exact (s, t, e) split and stage-by-stage cost checks for degrees (a, b).

    The top cell's boundary map [a x, [a x, b y]] is compared with the pinched
    map [s x, t [x, y]] v e [x, [x, y]] where s = floor(L^(3-eps)),
    t = floor(a^2 b / L^(3-eps)) and e = a^2 b - s t.  Each stage records a
    measured Lipschitz-type quantity, its claimed class, and the ratio
    measured / claimed(L); a stage passes when the ratio is at most ``C``.
    """
    if spec.family != "example1":
        raise ValueError("example_budget applies to the example1 space")
    eps = _eps(eps)
    check_admissible(L, eps, a, b)
    top = 3 - eps
    s = floor_power(L, top)
    X = a * a * b
    t = floor_div_power(X, L, top)
    e = X - s * t

    sub = CostExpr.power(1 - eps / 4)
    stages: List[Stage] = []

    def add(name: str, measured: float, claimed: CostExpr, ok: Optional[bool] = None):
        ratio = measured / claimed.evaluate(L)
        passed = ratio <= C if ok is None else (ok and ratio <= C)
        stages.append(Stage(name, measured, claimed, ratio, passed))

    g1 = max(degree_map_lipschitz(3, a), degree_map_lipschitz(4, b))
    add("g1 = [u3a, [u3a, u4b]]", g1, cost_whitehead(sub, sub))
    add("u3s", degree_map_lipschitz(3, s), sub)
    prod = max(degree_map_lipschitz(3, s), degree_map_lipschitz(6, t))
    add("[s x, t [x,y]] nullhomotopy", prod,
        cost_whitehead(cost_degree_map(3, CostExpr.power(top)), sub))
    add("|e| correction size", float(abs(e)), CostExpr.power(6))
    add("e [x,[x,y]] nullhomotopy (cone on u8e)", degree_map_lipschitz(8, e),
        cost_degree_map(8, CostExpr.power(6)))
    # homotopy g1 ~ g2 comes from the nullhomotopy theorem; its class must be o(L)
    g12 = cost_nullhomotopy(sub, "theorem")
    linear = CostExpr.power(1)
    add("g1 ~ g2 homotopy input", max(g1, prod), sub, ok=g12.dominated_by(linear))
    total = max(g1, prod, degree_map_lipschitz(8, e))
    add("total (concatenation)", total, linear)
    return BudgetReport(L, eps, a, b, s, t, e, stages)


def sample_admissible(L: int, eps, rng: random.Random) -> Tuple[int, int]:
    """Uniform a in the allowed range, then uniform b given a."""
    ea, eb, eab = admissible_bounds(L, eps)
    amax = floor_power(L, ea)
    a = rng.randint(-amax, amax)
    bmax = floor_power(L, eb)
    if a:
        # |b| <= L^(9-2eps) / a^2  <=>  |b|^v a^(2v) <= L^u
        u, v = eab.numerator, eab.denominator
        bmax = min(bmax, integer_root(L ** u // (a * a) ** v, v))
    return a, rng.randint(-bmax, bmax)


def log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class SweepResult:
    seed: int
    eps: Fraction
    Ls: List[int]
    trials: int
    pass_rate: Dict[int, float]
    max_ratio: Dict[str, List[float]]
    slopes: Dict[str, float]
    e_identity: bool
    e_exponent: Dict[int, float]

    def to_json(self) -> dict:
        return {"seed": self.seed, "eps": str(self.eps), "L": self.Ls, "trials": self.trials,
                "pass_rate": {str(k): v for k, v in self.pass_rate.items()},
                "max_ratio": self.max_ratio, "slopes": self.slopes,
                "e_identity": self.e_identity,
                "e_observed_exponent": {str(k): v for k, v in self.e_exponent.items()}}


def budget_sweep(Ls: Sequence[int], eps, trials: int, seed: int = 0,
                 C: float = 2.0) -> SweepResult:
    """Run example_budget on ``trials`` random admissible pairs per L.

    For each stage the worst ratio per L is kept, and its log-log slope
    against L measures hidden growth.  The observed exponent of |e| is
    log(max |e|) / log L.
    """
    from .cw_spaces import preset

    spec = preset("example1")
    rng = random.Random(seed)
    pass_rate: Dict[int, float] = {}
    max_ratio: Dict[str, List[float]] = {}
    e_ok = True
    e_exp: Dict[int, float] = {}
    for L in Ls:
        worst: Dict[str, float] = {}
        passed = 0
        emax = 0
        for _ in range(trials):
            a, b = sample_admissible(L, eps, rng)
            rep = example_budget(spec, L, eps, a, b, C)
            passed += rep.passed
            e_ok &= a * a * b == rep.s * rep.t + rep.e
            emax = max(emax, abs(rep.e))
            for st in rep.stages:
                worst[st.name] = max(worst.get(st.name, 0.0), st.ratio)
        pass_rate[L] = passed / trials
        e_exp[L] = math.log(emax) / math.log(L) if emax > 0 else float("-inf")
        for name, v in worst.items():
            max_ratio.setdefault(name, []).append(v)
    slopes = {name: log_slope(Ls, vals) for name, vals in max_ratio.items()
              if len(Ls) >= 2 and all(v > 0 for v in vals)}
    return SweepResult(seed, Fraction(eps), list(Ls), trials, pass_rate, max_ratio, slopes,
                       e_ok, e_exp)


# -- Example-2 side conditions -----------------------------------------------------


def example2_side_conditions(L: int, a: int, b: int) -> Dict[str, Tuple[int, int, bool]]:
    """Arithmetic side conditions of the explicit O(L) construction.

    s = ceil(|a| / L^2) and t = ceil(|b| / L^3) are the layer counts; checked
    are s t <= 2L and (2s + 1) t <= 6L + 3 (the latter from s t <= 2L and
    t <= L).  Values are (lhs, rhs, ok).
    """
    if abs(a) > L ** 3 or abs(b) > L ** 4 or (a * b) ** 2 > L ** 12:
        raise InadmissiblePair(f"({a}, {b}) violates the example2 constraints at L={L}")
    s = -(-abs(a) // L ** 2)
    t = -(-abs(b) // L ** 3)
    return {
        "layers s*t <= 2L": (s * t, 2 * L, s * t <= 2 * L),
        "(2s+1)t = O(L)": ((2 * s + 1) * t, 6 * L + 3, (2 * s + 1) * t <= 6 * L + 3),
    }


# -- distortion ----------------------------------------------------------------------


def distortion_bounds(spec: ComplexSpec, N: int) -> Tuple[CostExpr, CostExpr]:
    """Cost classes (in N) bounding the distortion of N * zeta.

    Lower: a nullhomotopy of N zeta across the top cell has degree N there, so
    costs at least N^(1/n).  Upper: scale one generator factor of zeta by N
    with an efficient degree-N map, i.e. the cheapest of N^(1/dim) over the
    spheres appearing in zeta.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if N == 1:
        return CostExpr.constant("N"), CostExpr.constant("N")
    lower = CostExpr.power(Fraction(1, spec.n), var="N")
    Nvar = CostExpr.power(1, var="N")
    const = CostExpr.constant("N")
    options = [cost_whitehead(const, cost_degree_map(g.sphere_dim, Nvar))
               for g in set(leaves(spec.zeta))]
    upper = min(options, key=lambda c: c.leading().key)
    return lower, upper
