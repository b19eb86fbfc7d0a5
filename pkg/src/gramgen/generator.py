"""Iterative construction of consistent grammars.

The build keeps every symbol productive at every step:

1. all terminal parenthesis rules (``A -> a b``) are added first;
2. the remaining rules are added one at a time and right-hand sides only use
   existing (hence productive) nonterminals;
3. the most recently created nonterminal becomes the start symbol ``$``.

The most recently created nonterminal is the *root*.  A nonterminal that is
not reachable from the root heads a *hanging* component.  Creating a new
left-hand side that does not reach the old root leaves the old root hanging;
using a hanging symbol on the right of a connected rule absorbs it.  Each
hanging component needs one right-hand-side nonterminal slot to be absorbed,
so the number of hanging symbols may never exceed the slots still to come.
With no hanging symbols left at the end, everything is reachable from the
root, and the grammar is consistent once the root becomes the start symbol.
"""

from __future__ import annotations

import itertools
import string
from collections import Counter
from dataclasses import dataclass

from .errors import DeadEnd, IncompleteBuild, InfeasibleParams, InternalRetryExhausted
from .feasibility import GenerationParams, check_feasible
from .grammar import (
    AGGREGATE_ARITY,
    BRANCH,
    ITER,
    P_NO,
    P_WITH,
    START_LABEL,
    Grammar,
    Rule,
    RuleClass,
)

DEFAULT_RESTARTS = 1000
_SAMPLE_TRIES = 16

_CLASSES_OF = {
    P_NO: (RuleClass.PAREN_NO,),
    P_WITH: (RuleClass.PAREN_WITH,),
    ITER: (RuleClass.ITER_LEFT, RuleClass.ITER_RIGHT),
    BRANCH: (RuleClass.BRANCH,),
}


def terminal_label(i: int) -> str:
    return string.ascii_lowercase[i] if i < 26 else f"t{i + 1}"


def nonterminal_label(i: int) -> str:
    return string.ascii_uppercase[i] if i < 26 else f"N{i + 1}"


@dataclass(frozen=True)
class TraceStep:
    step: int
    rule: Rule
    rule_class: RuleClass
    created: tuple[str, ...]


@dataclass(frozen=True)
class GenerationResult:
    grammar: Grammar
    trace: tuple[TraceStep, ...]
    params: GenerationParams
    restarts: int = 0

    @property
    def start_source(self) -> str:
        """Label the start symbol carried before it was renamed to ``$``."""
        return _last_created(self.trace)


def _last_created(trace) -> str:
    last = None
    for step in trace:
        if step.rule.lhs in step.created:
            last = step.rule.lhs
    return last


class BuildState:
    """Partial grammar plus the bookkeeping the construction principles need."""

    def __init__(self, params: GenerationParams):
        self.params = params
        self.terminals: list[str] = []
        self.nonterminals: list[str] = []
        self.rules: list[Rule] = []
        self.rule_classes: list[RuleClass] = []
        self.hanging: list[str] = []
        self.remaining: dict[str, int] = params.counts()
        self.last_created: str | None = None
        self.created_for: dict[str, Rule] = {}
        self.trace: list[TraceStep] = []
        self._t_set: set[str] = set()
        self._nt_set: set[str] = set()
        self._rule_set: set[Rule] = set()
        self._paren_no_per_lhs: Counter = Counter()
        self._connected: set[str] = set()
        self._successors: dict[str, set[str]] = {}
        self._reach_cache: dict[str, frozenset] = {}

    # -- derived quantities ------------------------------------------------

    @property
    def budget(self) -> int:
        """Nonterminal slots on the right-hand sides of all rules still to add."""
        r = self.remaining
        return r[P_WITH] + r[ITER] + 2 * r[BRANCH]

    @property
    def total_remaining(self) -> int:
        return sum(self.remaining.values())

    def connected(self) -> list[str]:
        """Nonterminals reachable from the root, in creation order."""
        return [n for n in self.nonterminals if n in self._connected]

    def reach(self, nt: str) -> frozenset:
        """Nonterminals reachable from ``nt`` (itself included) in the current rules."""
        cached = self._reach_cache.get(nt)
        if cached is None:
            seen = {nt}
            stack = [nt]
            while stack:
                for nxt in self._successors.get(stack.pop(), ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            cached = self._reach_cache[nt] = frozenset(seen)
        return cached

    def _after(self, lhs: str, rhs) -> tuple[set, list]:
        """Connected set and hanging list that adding ``lhs -> rhs`` would leave."""
        connected = set() if lhs not in self._nt_set else set(self._connected)
        connected.add(lhs)
        for sym in rhs:
            if sym in self._nt_set and sym not in connected:
                connected |= self.reach(sym)
        hanging = [h for h in self.hanging if h not in connected]
        if lhs not in self._nt_set and self.last_created is not None and self.last_created not in connected:
            hanging.append(self.last_created)
        return connected, hanging

    def fresh_terminal(self, offset: int = 0) -> str:
        return terminal_label(len(self.terminals) + offset)

    def fresh_nonterminal(self) -> str:
        return nonterminal_label(len(self.nonterminals))

    def partial_grammar(self) -> Grammar:
        """The rules so far, with an arbitrary start (analysis use only)."""
        return Grammar(self.terminals, self.nonterminals, self.rules, self.last_created)

    # -- admissibility -----------------------------------------------------

    def rejection(self, cls: RuleClass, lhs: str, rhs) -> str | None:
        """Why ``lhs -> rhs`` of class ``cls`` cannot be added now, or ``None``."""
        p = self.params
        agg = cls.aggregate
        if self.remaining[agg] <= 0:
            return "no quota left for this class"
        if agg != P_NO and self.remaining[P_NO] > 0:
            return "terminal parenthesis rules come first"
        shape = cls.shape
        if len(rhs) != len(shape):
            return "right-hand side does not fit the class shape"
        new_terminals = []
        for sym, is_t in zip(rhs, shape):
            if is_t:
                if sym in self._nt_set:
                    return f"{sym} is a nonterminal"
                if sym not in self._t_set and sym not in new_terminals:
                    new_terminals.append(sym)
            elif sym not in self._nt_set:
                return f"{sym} is not an existing productive nonterminal"
        if len(self.terminals) + len(new_terminals) > p.s_t_max:
            return "terminal maximum exceeded"

        new_lhs = lhs not in self._nt_set
        if new_lhs:
            if lhs in self._t_set or lhs in new_terminals:
                return f"{lhs} is a terminal"
            if len(self.nonterminals) >= p.s_nt_max:
                return "nonterminal maximum reached"
        elif lhs not in self._connected:
            return "left-hand side is not reachable from the current root"

        if Rule(lhs, rhs) in self._rule_set:
            return "duplicate rule"

        _, hanging_after = self._after(lhs, rhs)
        if len(hanging_after) > self.budget - AGGREGATE_ARITY[agg]:
            return "hanging symbols would exceed the remaining connection budget"
        return None

    def can_add(self, cls: RuleClass, lhs: str, rhs) -> bool:
        return self.rejection(cls, lhs, tuple(rhs)) is None

    # -- mutation ----------------------------------------------------------

    def add(self, cls: RuleClass, lhs: str, rhs) -> TraceStep:
        rhs = tuple(rhs)
        reason = self.rejection(cls, lhs, rhs)
        if reason is not None:
            raise ValueError(f"cannot add {lhs} -> {' '.join(rhs)}: {reason}")
        rule = Rule(lhs, rhs)
        created = []
        new_lhs = lhs not in self._nt_set
        if new_lhs:
            created.append(lhs)
        for sym, is_t in zip(rhs, cls.shape):
            if is_t and sym not in self._t_set:
                self.terminals.append(sym)
                self._t_set.add(sym)
                created.append(sym)
        if cls.aggregate == P_NO:
            self._paren_no_per_lhs[lhs] += 1
        self._connected, self.hanging = self._after(lhs, rhs)
        self._successors.setdefault(lhs, set()).update(s for s in rhs if s in self._nt_set)
        self._reach_cache.clear()
        if new_lhs:
            self.nonterminals.append(lhs)
            self._nt_set.add(lhs)
            self.last_created = lhs
            self.created_for[lhs] = rule
        self.rules.append(rule)
        self.rule_classes.append(cls)
        self._rule_set.add(rule)
        self.remaining[cls.aggregate] -= 1
        step = TraceStep(len(self.trace) + 1, rule, cls, tuple(created))
        self.trace.append(step)
        return step

    # -- exhaustive fallback -----------------------------------------------

    def candidates(self, agg: str, new_lhs: bool | None = None) -> list[tuple[RuleClass, str, tuple]]:
        """Every admissible rule of an aggregate class, fresh symbols in canonical order."""
        p = self.params
        room_t = p.s_t_max - len(self.terminals)
        fresh_t = [self.fresh_terminal(i) for i in range(min(room_t, 2))]
        t_pool = self.terminals + fresh_t
        lhs_pool = []
        if new_lhs is not True:
            lhs_pool.extend(self.connected())
        if new_lhs is not False and len(self.nonterminals) < p.s_nt_max:
            lhs_pool.append(self.fresh_nonterminal())
        out = []
        for cls in _CLASSES_OF[agg]:
            pools = [t_pool if is_t else self.nonterminals for is_t in cls.shape]
            for rhs in itertools.product(*pools):
                if not _canonical_fresh(rhs, fresh_t):
                    continue
                for lhs in lhs_pool:
                    if self.rejection(cls, lhs, rhs) is None:
                        out.append((cls, lhs, rhs))
        return out


def _canonical_fresh(rhs, fresh) -> bool:
    expected = 0
    for sym in rhs:
        if sym in fresh:
            idx = fresh.index(sym)
            if idx > expected:
                return False
            if idx == expected:
                expected += 1
    return True


# ---------------------------------------------------------------------------
# random choices


def _draw_terminals(state: BuildState, count: int, rng) -> list[str]:
    """Fair coin per slot between a new terminal and an existing one."""
    out = []
    pending = []
    for _ in range(count):
        existing = state.terminals + pending
        can_new = len(state.terminals) + len(pending) < state.params.s_t_max
        if can_new and (not existing or rng.random() < 0.5):
            sym = state.fresh_terminal(len(pending))
            pending.append(sym)
        else:
            sym = rng.choice(existing)
        out.append(sym)
    return out


def _paren_no_capacity(state: BuildState, new_lhs: bool) -> int:
    """Terminal parenthesis rules that still fit after adding one with the given lhs mode."""
    p = state.params
    pairs = p.s_t_max**2
    n_nt = len(state.nonterminals)
    hanging = len(state.hanging)
    if new_lhs:
        hanging += 1 if state.last_created is not None else 0
        n_nt += 1
        left_on_lhs = pairs - 1
    else:
        left_on_lhs = pairs - state._paren_no_per_lhs[state.last_created] - 1
    more_lhs = max(0, min(p.s_nt_max - n_nt, state.budget - hanging))
    return left_on_lhs + more_lhs * pairs


def phase_seed_paren_no(state: BuildState, rng) -> None:
    """Add all terminal parenthesis rules."""
    p = state.params
    pairs = p.s_t_max**2
    total = state.remaining[P_NO]
    for k in range(total):
        still_needed = total - k - 1
        modes = []
        cur = state.last_created
        if (
            cur is not None
            and state._paren_no_per_lhs[cur] < pairs
            and _paren_no_capacity(state, False) >= still_needed
        ):
            modes.append(False)
        if (
            len(state.nonterminals) < p.s_nt_max
            and (cur is None or len(state.hanging) + 1 <= state.budget)
            and _paren_no_capacity(state, True) >= still_needed
        ):
            modes.append(True)
        if not modes:
            raise DeadEnd("no room for the next terminal parenthesis rule")
        new_lhs = modes[0] if len(modes) == 1 else rng.random() < 0.5
        lhs = state.fresh_nonterminal() if new_lhs else cur
        for _ in range(_SAMPLE_TRIES):
            rhs = tuple(_draw_terminals(state, 2, rng))
            if state.rejection(RuleClass.PAREN_NO, lhs, rhs) is None:
                state.add(RuleClass.PAREN_NO, lhs, rhs)
                break
        else:
            options = state.candidates(P_NO, new_lhs)
            if not options:
                raise DeadEnd("terminal pairs exhausted")
            state.add(*rng.choice(options))


def _required_hanging(state: BuildState, arity: int, displaced: bool) -> int:
    """Hanging symbols a rule of this arity must absorb to keep within the budget."""
    return max(0, len(state.hanging) + displaced - (state.budget - arity))


def _lhs_modes(state: BuildState, agg: str) -> list[bool]:
    arity = AGGREGATE_ARITY[agg]
    modes = []
    if _required_hanging(state, arity, False) <= arity:
        modes.append(False)
    if len(state.nonterminals) < state.params.s_nt_max and (
        _required_hanging(state, arity, True) <= arity or _required_hanging(state, arity, False) <= arity - 1
    ):
        modes.append(True)
    return modes


def _sample_rule(state: BuildState, agg: str, new_lhs: bool, rng):
    cls = rng.choice(_CLASSES_OF[agg])
    arity = cls.nt_arity
    slots = [i for i, is_t in enumerate(cls.shape) if not is_t]
    rng.shuffle(slots)
    rhs = [None] * len(cls.shape)
    if new_lhs:
        lhs = state.fresh_nonterminal()
        required = _required_hanging(state, arity, True)
        if required > arity:
            # the old root has to stay reachable through this rule
            rhs[slots.pop()] = state.last_created
            required = _required_hanging(state, arity, False)
    else:
        lhs = rng.choice(state.connected())
        required = _required_hanging(state, arity, False)
    for h in state.hanging[:required]:
        rhs[slots.pop()] = h
    for i in slots:
        rhs[i] = rng.choice(state.nonterminals)
    t_slots = [i for i, is_t in enumerate(cls.shape) if is_t]
    for i, t in zip(t_slots, _draw_terminals(state, len(t_slots), rng)):
        rhs[i] = t
    return cls, lhs, tuple(rhs)


def step_add_rule(state: BuildState, rng) -> TraceStep:
    """Add one rule of a randomly chosen remaining class."""
    classes = [a for a in (P_WITH, ITER, BRANCH) if state.remaining[a] > 0]
    if not classes:
        raise IncompleteBuild("no rule quota remains")
    while classes:
        agg = rng.choice(classes)
        modes = _lhs_modes(state, agg)
        if modes:
            new_lhs = modes[0] if len(modes) == 1 else rng.random() < 0.5
            for _ in range(_SAMPLE_TRIES):
                cls, lhs, rhs = _sample_rule(state, agg, new_lhs, rng)
                if state.rejection(cls, lhs, rhs) is None:
                    return state.add(cls, lhs, rhs)
            options = state.candidates(agg)
            if options:
                return state.add(*rng.choice(options))
        classes.remove(agg)
    raise DeadEnd("no admissible rule for any remaining class")


def finalize_start(state: BuildState) -> Grammar:
    if state.total_remaining:
        raise IncompleteBuild(f"rules still to add: {state.remaining}")
    if state.hanging:
        raise IncompleteBuild(f"hanging symbols left unconnected: {state.hanging}")
    root = state.last_created
    grammar = Grammar(state.terminals, state.nonterminals, state.rules, root)
    return grammar.relabel({root: START_LABEL})


def generate(p: GenerationParams, rng, max_restarts: int = DEFAULT_RESTARTS) -> GenerationResult:
    verdict = check_feasible(p)
    if not verdict.feasible:
        raise InfeasibleParams(verdict)
    for attempt in range(max_restarts + 1):
        state = BuildState(p)
        try:
            phase_seed_paren_no(state, rng)
            while state.total_remaining:
                step_add_rule(state, rng)
        except DeadEnd:
            continue
        return GenerationResult(finalize_start(state), tuple(state.trace), p, attempt)
    raise InternalRetryExhausted(f"{max_restarts} restarts did not produce a grammar for {p}")


def replay(p: GenerationParams, steps) -> Grammar:
    """Rebuild a grammar from trace steps, re-checking every principle on the way."""
    state = BuildState(p)
    for step in steps:
        state.add(step.rule_class, step.rule.lhs, step.rule.rhs)
    return finalize_start(state)


def render_trace(result: GenerationResult) -> str:
    """Step table: created symbols and the rule added at each step, then the start promotion."""
    rows = [("step", "new symbols", "rule", "class")]
    for step in result.trace:
        rows.append((str(step.step), " ".join(step.created) or "-", str(step.rule), step.rule_class.value))
    root = result.start_source
    rows.append((str(len(result.trace) + 1), f"{root} => {START_LABEL}", "(start symbol)", "-"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"
