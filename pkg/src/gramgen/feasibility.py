"""Feasibility gate for generation parameters and parameter acquisition from a rule count.

Every comparison is done on cleared-denominator integer forms, so boundary
cases (e.g. ``|R_P-| == S_NT * S_T**2``) are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, Unsatisfiable
from .grammar import BRANCH, ITER, P_NO, P_WITH, RuleClass

DEFAULT_PARAM_ATTEMPTS = 10_000


@dataclass(frozen=True)
class GenerationParams:
    s_t_max: int
    s_nt_max: int
    n_paren_no: int
    n_paren_with: int = 0
    n_iter: int = 0
    n_branch: int = 0

    def __post_init__(self):
        validate_params(self)

    @property
    def total_rules(self) -> int:
        return self.n_paren_no + self.n_paren_with + self.n_iter + self.n_branch

    def counts(self) -> dict[str, int]:
        return {P_NO: self.n_paren_no, P_WITH: self.n_paren_with, ITER: self.n_iter, BRANCH: self.n_branch}

    def __str__(self):
        return (
            f"S_T={self.s_t_max} S_NT={self.s_nt_max} P-={self.n_paren_no} "
            f"P+={self.n_paren_with} I={self.n_iter} B={self.n_branch}"
        )


def validate_params(p: GenerationParams) -> None:
    for name in ("s_t_max", "s_nt_max", "n_paren_no"):
        value = getattr(p, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise DomainError(f"{name} must be a positive integer, got {value!r}")
    for name in ("n_paren_with", "n_iter", "n_branch"):
        value = getattr(p, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class Violation:
    constraint: str
    lhs: int
    rhs: int

    def __str__(self):
        return f"{self.constraint}: {self.lhs} > {self.rhs}"


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    violations: tuple[Violation, ...] = field(default=())

    def describe(self) -> str:
        if self.feasible:
            return "feasible"
        return "violated " + ", ".join(str(v) for v in self.violations)


def class_capacity(cls, s_nt: int, s_t: int) -> int:
    """Number of distinct rules of a class over ``s_nt`` nonterminals and ``s_t`` terminals."""
    agg = cls.aggregate if isinstance(cls, RuleClass) else cls
    if agg not in (P_WITH, P_NO, ITER, BRANCH):
        raise ValueError(f"unknown rule class {cls!r}")
    if agg == P_WITH:
        return s_nt**2 * s_t**2
    if agg == P_NO:
        return s_nt * s_t**2
    if agg == ITER:
        return 2 * s_nt**2 * s_t
    return s_nt**3


def n_min_connect(n_paren_with: int, n_iter: int, n_branch: int) -> int:
    """Root symbol plus every nonterminal slot on the right of non-terminal rules."""
    return n_paren_with + n_iter + 2 * n_branch + 1


def check_feasible(p: GenerationParams) -> FeasibilityVerdict:
    validate_params(p)
    t2 = p.s_t_max**2
    n_min = n_min_connect(p.n_paren_with, p.n_iter, p.n_branch)
    checks = (
        ("C1", p.n_paren_no, p.s_nt_max * t2),
        ("C2", p.n_paren_no, n_min * t2),
        ("C3", p.n_paren_with, class_capacity(P_WITH, p.s_nt_max, p.s_t_max)),
        ("C4", p.n_iter, class_capacity(ITER, p.s_nt_max, p.s_t_max)),
        ("C5", p.n_branch, class_capacity(BRANCH, p.s_nt_max, p.s_t_max)),
    )
    violations = tuple(Violation(name, lhs, rhs) for name, lhs, rhs in checks if lhs > rhs)
    return FeasibilityVerdict(not violations, violations)


def _ceil_root(radicand: Fraction, k: int) -> int:
    """Smallest non-negative integer ``s`` with ``s**k >= radicand``."""
    if radicand <= 0:
        return 0
    s = max(0, int(float(radicand) ** (1.0 / k)) - 1)
    while s**k < radicand:
        s += 1
    while s > 0 and (s - 1) ** k >= radicand:
        s -= 1
    return s


def terminal_bounds(n_paren_no: int, n_paren_with: int, n_iter: int, n_branch: int) -> tuple[int, int]:
    n_min = n_min_connect(n_paren_with, n_iter, n_branch)
    lower = max(1, _ceil_root(Fraction(n_paren_no, n_min), 2))
    upper = 2 * n_paren_no + 2 * n_paren_with
    return lower, upper


def nonterminal_bounds(n_paren_no: int, n_paren_with: int, n_iter: int, n_branch: int, s_t: int) -> tuple[int, int]:
    mean = (
        Fraction(n_paren_no, s_t**2)
        + _ceil_root(Fraction(n_paren_with, s_t**2), 2)
        + _ceil_root(Fraction(n_iter, 2 * s_t), 2)
        + _ceil_root(Fraction(n_branch), 3)
    ) / 4
    lower = max(1, math.ceil(mean))
    if n_branch >= n_paren_no - 1:
        upper = n_paren_no + n_paren_with + n_iter + n_branch
    else:
        upper = n_paren_with + n_iter + 2 * n_branch + 1
    return lower, upper


def draw_composition(total: int, rng) -> tuple[int, int, int, int]:
    """Uniform composition ``(P-, P+, I, B)`` of ``total`` with ``P- >= 1``."""
    # stars and bars over total-1 stars with three bars
    bars = sorted(rng.sample(range(total - 1 + 3), 3))
    parts = (bars[0], bars[1] - bars[0] - 1, bars[2] - bars[1] - 1, total - 1 + 3 - bars[2] - 1)
    return parts[0] + 1, parts[1], parts[2], parts[3]


def params_for_split(n_paren_no, n_paren_with, n_iter, n_branch, rng) -> GenerationParams | None:
    """Draw symbol maxima for a fixed rule split; ``None`` when the draw is rejected."""
    t_lo, t_hi = terminal_bounds(n_paren_no, n_paren_with, n_iter, n_branch)
    if t_lo > t_hi:
        return None
    s_t = rng.randint(t_lo, t_hi)
    nt_lo, nt_hi = nonterminal_bounds(n_paren_no, n_paren_with, n_iter, n_branch, s_t)
    if nt_lo > nt_hi:
        return None
    s_nt = rng.randint(nt_lo, nt_hi)
    params = GenerationParams(s_t, s_nt, n_paren_no, n_paren_with, n_iter, n_branch)
    if not check_feasible(params).feasible:
        return None
    return params


def derive_params(total_rules: int, rng, attempts: int = DEFAULT_PARAM_ATTEMPTS) -> GenerationParams:
    if not isinstance(total_rules, int) or total_rules < 1:
        raise DomainError(f"total_rules must be a positive integer, got {total_rules!r}")
    for _ in range(attempts):
        split = draw_composition(total_rules, rng)
        params = params_for_split(*split, rng)
        if params is not None:
            return params
    raise Unsatisfiable(f"no feasible parameters sampled for {total_rules} rules in {attempts} attempts")
