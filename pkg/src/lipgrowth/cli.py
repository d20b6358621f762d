"""Command-line entry point: ``lipgrowth <command> [flags]``.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 an
iteration budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import cw_spaces, growth_count, lip_cost
from .graded_lie import FreeGradedLieAlgebra, Generator, lie_degree, tree_str

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
HALL_MAX_DEGREE_CAP = 24
GEN_NAMES = "xyzuvwabcdefgh"


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


# -- space selection ------------------------------------------------------------


def resolve_space(args) -> "cw_spaces.ComplexSpec | growth_count.ConstraintSystem":
    """A ComplexSpec, or a bare ConstraintSystem for ``--space box``."""
    try:
        if args.r is not None:
            return cw_spaces.solve_parameters(_rational(args.r))
        space = args.space
        explicit = [args.l, args.m, args.p, args.q]
        if space in ("example1", "example2"):
            return cw_spaces.preset(space)
        if space == "box" or (space is None and args.p is None and args.q is None
                              and args.l is not None and args.m is not None):
            if args.l is None or args.m is None:
                raise UsageError("box space needs --l and --m")
            return growth_count.ConstraintSystem(args.l, args.m)
        if space in (None, "theorem"):
            if any(v is None for v in explicit):
                raise UsageError("give --space example1|example2|box, --r, or all of --l --m --p --q")
            return explicit_space(args.l, args.m, args.p, args.q)
        raise UsageError(f"unknown space {space!r}")
    except (cw_spaces.SpecError, ValueError) as exc:
        raise UsageError(str(exc))


def explicit_space(ell: int, m: int, p: int, q: int) -> cw_spaces.ComplexSpec:
    """The theorem family, or a preset whose parameters match exactly."""
    for name in ("example1", "example2"):
        ref = cw_spaces.preset(name)
        if (ref.ell, ref.m, ref.p, ref.q) == (ell, m, p, q):
            return ref
    return cw_spaces.build_space(ell, m, p, q)


def constraints_of(space) -> growth_count.ConstraintSystem:
    if isinstance(space, growth_count.ConstraintSystem):
        return space
    return cw_spaces.derive_constraints(space)


# -- output helpers ---------------------------------------------------------------


def _emit(obj, out: Optional[Path], filename: str) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text + "\n")


def render_svg(samples: Sequence[growth_count.GrowthSample], fit: growth_count.FitResult,
               width: int = 480, height: int = 360) -> str:
    """Log-log scatter of the samples with the fitted curve."""
    xs = [math.log(s.L) for s in samples]
    ys = [growth_count._log_count(s.count) for s in samples]
    # refit the intercept of the chosen model for drawing
    lx = [math.log(x) for x in xs]
    g = fit.gamma_hat if fit.model == "power_log" else 0.0
    c = sum(y - fit.r_hat * x - g * l for x, y, l in zip(xs, ys, lx)) / len(xs)
    line_x = [xs[0] + (xs[-1] - xs[0]) * i / 40 for i in range(41)]
    line_y = [c + fit.r_hat * x + g * math.log(x) for x in line_x]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + line_y), max(ys + line_y)
    pad = 50

    def px(x):
        return pad + (x - x0) / ((x1 - x0) or 1) * (width - 2 * pad)

    def py(y):
        return height - pad - (y - y0) / ((y1 - y0) or 1) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">log L</text>',
        f'<text x="14" y="{height / 2}" font-size="12" transform="rotate(-90 14 {height / 2})" '
        f'text-anchor="middle">log count</text>',
        f'<text x="{pad}" y="{pad - 16}" font-size="12">{fit.model}: r = {fit.r_hat:.4f}'
        + (f", gamma = {fit.gamma_hat:.3f}" if fit.model == "power_log" else "") + "</text>",
    ]
    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(line_x, line_y))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="crimson"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- commands -----------------------------------------------------------------------


def cmd_solve(args) -> int:
    if args.r is None:
        raise UsageError("solve needs --r")
    r = _rational(args.r)
    try:
        spec = cw_spaces.solve_parameters(r)
    except cw_spaces.SpecError as exc:
        raise UsageError(str(exc))
    obj = spec.to_json()
    obj["r"] = str(spec.r)
    _emit(obj, args.out, "spec.json")
    return EXIT_OK


def cmd_count(args) -> int:
    if args.L is None or args.L < 1:
        raise UsageError("count needs --L >= 1")
    sys_ = constraints_of(resolve_space(args))
    c = growth_count.count_pairs(sys_, args.L, budget=args.budget, blocked=args.blocked)
    print(c)
    if args.out is not None:
        path = args.out if args.out.suffix == ".csv" else args.out / "samples.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        new = not path.exists()
        with path.open("a") as fh:
            if new:
                fh.write("L,count\n")
            fh.write(f"{args.L},{c}\n")
    return EXIT_OK


def _count_task(job):
    sys_, L, budget, blocked = job
    return growth_count.count_pairs(sys_, L, budget=budget, blocked=blocked)


def cmd_estimate(args) -> int:
    if args.points < 4:
        raise UsageError("estimate needs --points >= 4")
    if args.lmin < 2 or args.lmax <= args.lmin:
        raise UsageError("need 2 <= --lmin < --lmax")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    sys_ = constraints_of(resolve_space(args))
    grid = growth_count.sample_grid(args.lmin, args.lmax, args.points, args.spacing)
    if len(grid) < 4:
        raise UsageError(f"grid has only {len(grid)} distinct L values")
    # grids reach L^ell far beyond any plain budget, so fits always count in blocked mode
    jobs = [(sys_, L, args.budget, True) for L in grid]
    out: Optional[Path] = args.out
    fh = None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        fh = (out / "samples.csv").open("w")
        fh.write("L,count\n")
    samples: List[growth_count.GrowthSample] = []
    try:
        if args.workers == 1:
            results = map(_count_task, jobs)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=args.workers)
            results = pool.map(_count_task, jobs)
        try:
            for L, c in zip(grid, results):
                samples.append(growth_count.GrowthSample(L, c))
                if fh is not None:
                    # flushed per row so an interrupted run keeps its samples
                    fh.write(f"{L},{c}\n")
                    fh.flush()
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    finally:
        if fh is not None:
            fh.close()
    fit = growth_count.fit_growth(samples)
    obj = fit.to_json()
    if out is not None:
        (out / "plot.svg").write_text(render_svg(samples, fit))
    _emit(obj, out, "fit.json")
    return EXIT_OK


def cmd_hall(args) -> int:
    if not args.degrees:
        raise UsageError("hall needs --degrees, e.g. 2,3")
    try:
        degs = [int(d) for d in args.degrees.split(",")]
    except ValueError:
        raise UsageError(f"bad degree list {args.degrees!r}")
    if any(d < 1 for d in degs) or len(degs) > len(GEN_NAMES):
        raise UsageError("degrees must be >= 1 (at most 14 generators)")
    if not 1 <= args.max_degree <= HALL_MAX_DEGREE_CAP:
        raise UsageError(f"--max-degree must be in [1, {HALL_MAX_DEGREE_CAP}]")
    gens = [Generator(GEN_NAMES[i], d + 1) for i, d in enumerate(degs)]
    alg = FreeGradedLieAlgebra(gens)
    basis = alg.hall_basis(args.max_degree)
    report = alg.hilbert_check(args.max_degree)
    print("generators: " + ", ".join(f"{g.name} (degree {g.lie_degree})" for g in gens))
    print("hall basis:")
    for t in basis:
        print(f"  {lie_degree(t):>3}  {tree_str(t)}")
    print("degree  dim")
    for d in range(1, args.max_degree + 1):
        print(f"{d:>6}  {report.basis_dims[d]}")
    print("hilbert check: " + ("pass" if report.ok else f"FAIL at degree {report.first_mismatch}"))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify_zeta(args) -> int:
    space = resolve_space(args)
    if isinstance(space, growth_count.ConstraintSystem):
        raise UsageError("verify-zeta needs a space with an attaching class")
    hall = cw_spaces.zeta_is_hall(space)
    nonzero = cw_spaces.zeta_is_nonzero(space)
    r, has_log = growth_count.closed_form_exponent(cw_spaces.derive_constraints(space))
    obj = {
        "spec": space.to_json(),
        "hall": hall,
        "nonzero": nonzero,
        "closed_form_exponent": str(r),
        "log_factor": has_log,
        "gromov_predicted_exponent": cw_spaces.gromov_predicted_exponent(space),
    }
    _emit(obj, args.out, "verify.json")
    # a Hall element is nonzero; failing Hall membership alone is not fatal
    return EXIT_OK if nonzero else EXIT_VERIFY


def cmd_budget(args) -> int:
    space = resolve_space(args) if (args.space or args.r or args.l) else cw_spaces.preset("example1")
    if not isinstance(space, cw_spaces.ComplexSpec) or space.family != "example1":
        raise UsageError("budget applies to --space example1")
    eps = _rational(args.eps)
    if not 0 < eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    try:
        Ls = [int(v) for v in str(args.L or "10,100,1000").split(",")]
    except ValueError:
        raise UsageError(f"bad --L list {args.L!r}")
    if any(L < 2 for L in Ls) or args.trials < 1:
        raise UsageError("need every L >= 2 and --trials >= 1")
    sweep = lip_cost.budget_sweep(Ls, eps, args.trials, args.seed)
    obj = sweep.to_json()
    obj["all_pass"] = all(v == 1.0 for v in sweep.pass_rate.values()) and sweep.e_identity
    _emit(obj, args.out, "report.json")
    return EXIT_OK if obj["all_pass"] else EXIT_VERIFY


COMMANDS = {
    "solve": cmd_solve,
    "count": cmd_count,
    "estimate": cmd_estimate,
    "hall": cmd_hall,
    "verify-zeta": cmd_verify_zeta,
    "budget": cmd_budget,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lipgrowth", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--space", choices=["example1", "example2", "theorem", "box"])
    parser.add_argument("--l", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--r", help="target exponent, e.g. 9/2")
    parser.add_argument("--L", help="scale (count) or comma list of scales (budget)")
    parser.add_argument("--lmin", type=int, default=16)
    parser.add_argument("--lmax", type=int, default=256)
    parser.add_argument("--points", type=int, default=9)
    parser.add_argument("--spacing", choices=["log", "linear"], default="log")
    parser.add_argument("--eps", default="1/5")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=growth_count.DEFAULT_BUDGET)
    parser.add_argument("--blocked", action="store_true",
                        help="run-length counting, not budget-limited")
    parser.add_argument("--out", type=Path)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--degrees", help="hall: comma list of generator degrees")
    parser.add_argument("--max-degree", type=int, default=6)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "count":
            try:
                args.L = int(args.L) if args.L is not None else None
            except ValueError:
                raise UsageError(f"bad --L {args.L!r}")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except growth_count.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
