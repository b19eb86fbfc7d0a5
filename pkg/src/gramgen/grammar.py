"""Grammar data types, the four rule classes, consistency analysis and the text format.

Symbols are plain string labels.  A grammar keeps its terminal and
nonterminal labels in two disjoint, ordered tuples, so the kind of a symbol
is always answered by the grammar that holds it.
"""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateRule, FormatError, ShapeError, UndeclaredSymbol, ValidationError

START_LABEL = "$"

# aggregate class names, as the rule counts are reported
P_NO = "P-"
P_WITH = "P+"
ITER = "I"
BRANCH = "B"
AGGREGATES = (P_NO, P_WITH, ITER, BRANCH)


class RuleClass(enum.Enum):
    PAREN_WITH = "ParenWithNT"
    PAREN_NO = "ParenNoNT"
    BRANCH = "Branch"
    ITER_LEFT = "IterLeft"
    ITER_RIGHT = "IterRight"

    @property
    def shape(self) -> tuple[bool, ...]:
        """Terminal flag for each right-hand-side position."""
        return _SHAPE_OF[self]

    @property
    def nt_arity(self) -> int:
        return self.shape.count(False)

    @property
    def aggregate(self) -> str:
        return _AGGREGATE_OF[self]


_SHAPE_OF = {
    RuleClass.PAREN_WITH: (True, False, True),
    RuleClass.PAREN_NO: (True, True),
    RuleClass.BRANCH: (False, False),
    RuleClass.ITER_LEFT: (True, False),
    RuleClass.ITER_RIGHT: (False, True),
}
_CLASS_OF_SHAPE = {shape: cls for cls, shape in _SHAPE_OF.items()}
_AGGREGATE_OF = {
    RuleClass.PAREN_WITH: P_WITH,
    RuleClass.PAREN_NO: P_NO,
    RuleClass.BRANCH: BRANCH,
    RuleClass.ITER_LEFT: ITER,
    RuleClass.ITER_RIGHT: ITER,
}
AGGREGATE_ARITY = {P_NO: 0, P_WITH: 1, ITER: 1, BRANCH: 2}


@dataclass(frozen=True)
class Rule:
    lhs: str
    rhs: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))

    def __str__(self):
        return f"{self.lhs} -> {' '.join(self.rhs)}"


def classify_rule(lhs: str, rhs: Sequence[str], terminals) -> RuleClass:
    """Return the class whose shape ``rhs`` has; ``terminals`` is any container of terminal labels."""
    if lhs in terminals:
        raise ShapeError(f"left-hand side {lhs!r} is a terminal")
    shape = tuple(s in terminals for s in rhs)
    try:
        return _CLASS_OF_SHAPE[shape]
    except KeyError:
        raise ShapeError(f"{lhs} -> {' '.join(rhs)} matches no rule class") from None


def check_label(label: str) -> None:
    if not isinstance(label, str) or not label or label == "->" or label.startswith("#"):
        raise ValidationError(f"invalid symbol label {label!r}")
    if any(ch.isspace() for ch in label):
        raise ValidationError(f"symbol label {label!r} contains whitespace")


def check_symbol_tables(terminals: Sequence[str], nonterminals: Sequence[str]) -> None:
    for label in (*terminals, *nonterminals):
        check_label(label)
    if len(set(terminals)) != len(terminals):
        raise ValidationError("duplicate terminal label")
    if len(set(nonterminals)) != len(nonterminals):
        raise ValidationError("duplicate nonterminal label")
    shared = set(terminals) & set(nonterminals)
    if shared:
        raise ValidationError(f"labels used as both terminal and nonterminal: {sorted(shared)}")


@dataclass(frozen=True)
class Grammar:
    """An immutable grammar whose every rule belongs to one of the four classes."""

    terminals: tuple[str, ...]
    nonterminals: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str
    _classes: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _terminal_set: frozenset = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        terminals = tuple(self.terminals)
        nonterminals = tuple(self.nonterminals)
        rules = tuple(r if isinstance(r, Rule) else Rule(r[0], r[1]) for r in self.rules)
        object.__setattr__(self, "terminals", terminals)
        object.__setattr__(self, "nonterminals", nonterminals)
        object.__setattr__(self, "rules", rules)

        check_symbol_tables(terminals, nonterminals)
        if not rules:
            raise ValidationError("a grammar needs at least one rule")
        if self.start not in nonterminals:
            raise ValidationError(f"start symbol {self.start!r} is not a declared nonterminal")
        term_set, nt_set = set(terminals), set(nonterminals)
        seen = set()
        classes = {}
        for rule in rules:
            for s in (rule.lhs, *rule.rhs):
                if s not in term_set and s not in nt_set:
                    raise UndeclaredSymbol(f"{rule}: symbol {s!r} is not declared")
            if rule in seen:
                raise DuplicateRule(f"duplicate rule {rule}")
            seen.add(rule)
            classes[rule] = classify_rule(rule.lhs, rule.rhs, term_set)
        object.__setattr__(self, "_classes", classes)
        object.__setattr__(self, "_terminal_set", frozenset(term_set))

    def rule_class(self, rule: Rule) -> RuleClass:
        return self._classes[rule]

    def is_terminal(self, label: str) -> bool:
        return label in self._terminal_set

    def rules_of(self, aggregate: str) -> list[Rule]:
        return [r for r in self.rules if self._classes[r].aggregate == aggregate]

    def class_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(AGGREGATES, 0)
        for rule in self.rules:
            counts[self._classes[rule].aggregate] += 1
        return counts

    def rules_by_lhs(self) -> dict[str, list[Rule]]:
        index = defaultdict(list)
        for rule in self.rules:
            index[rule.lhs].append(rule)
        return index

    def used_terminals(self) -> list[str]:
        """Terminals occurring in some rule, in declaration order."""
        used = {s for r in self.rules for s in r.rhs}
        return [t for t in self.terminals if t in used]

    def relabel(self, mapping: dict[str, str]) -> Grammar:
        def m(s):
            return mapping.get(s, s)

        return Grammar(
            [m(t) for t in self.terminals],
            [m(n) for n in self.nonterminals],
            [Rule(m(r.lhs), [m(s) for s in r.rhs]) for r in self.rules],
            m(self.start),
        )

    def with_start(self, start: str) -> Grammar:
        return Grammar(self.terminals, self.nonterminals, self.rules, start)

    def __str__(self):
        return serialize_grammar(self)


# ---------------------------------------------------------------------------
# consistency analysis


@dataclass(frozen=True)
class ConsistencyReport:
    achievable_symbols: frozenset
    productive_symbols: frozenset
    achievable_rules: frozenset
    productive_rules: frozenset
    consistent: bool

    def problems(self, g: Grammar) -> list[str]:
        out = []
        for s in (*g.nonterminals, *g.terminals):
            if s not in self.achievable_symbols:
                out.append(f"symbol {s} is not achievable")
            if s not in self.productive_symbols:
                out.append(f"symbol {s} is not productive")
        for r in g.rules:
            if r not in self.achievable_rules:
                out.append(f"rule {r} is not achievable")
            if r not in self.productive_rules:
                out.append(f"rule {r} is not productive")
        return out


def productive_closure(g: Grammar) -> tuple[frozenset, frozenset]:
    """Least fixed point of productivity, starting from the terminals."""
    return _productive(g.terminals, g.rules)


def _productive(terminals: Iterable[str], rules: Sequence[Rule]):
    symbols = set(terminals)
    productive_rules = set()
    pending = list(rules)
    changed = True
    while changed:
        changed = False
        still_pending = []
        for rule in pending:
            if all(s in symbols for s in rule.rhs):
                productive_rules.add(rule)
                if rule.lhs not in symbols:
                    symbols.add(rule.lhs)
                changed = True
            else:
                still_pending.append(rule)
        pending = still_pending
    return frozenset(symbols), frozenset(productive_rules)


def achievable_closure(g: Grammar) -> tuple[frozenset, frozenset]:
    """Breadth-first search from the start symbol over the rules."""
    by_lhs = g.rules_by_lhs()
    symbols = {g.start}
    rules = set()
    queue = deque([g.start])
    while queue:
        lhs = queue.popleft()
        for rule in by_lhs.get(lhs, ()):
            rules.add(rule)
            for s in rule.rhs:
                if s not in symbols:
                    symbols.add(s)
                    queue.append(s)
    return frozenset(symbols), frozenset(rules)


def check_consistency(g: Grammar) -> ConsistencyReport:
    prod_sym, prod_rules = productive_closure(g)
    ach_sym, ach_rules = achievable_closure(g)
    everything = set(g.terminals) | set(g.nonterminals)
    all_rules = set(g.rules)
    consistent = (
        everything <= prod_sym
        and everything <= ach_sym
        and all_rules <= prod_rules
        and all_rules <= ach_rules
    )
    return ConsistencyReport(ach_sym, prod_sym, ach_rules, prod_rules, consistent)


# ---------------------------------------------------------------------------
# text format


@dataclass
class GrammarText:
    """Raw sections of a grammar file, before any class checks."""

    start: str
    terminals: list[str]
    nonterminals: list[str]
    rules: list[tuple[int, str, list[str]]]  # (line number, lhs, rhs)


_HEADERS = ("start", "terminals", "nonterminals")


def read_sections(text: str) -> GrammarText:
    headers = {}
    rules = []
    in_rules = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_rules:
            if "->" not in line:
                raise FormatError(f"expected 'LHS -> symbols', got {line!r}", lineno)
            lhs, _, rhs = line.partition("->")
            lhs_parts = lhs.split()
            rhs_parts = rhs.split()
            if len(lhs_parts) != 1:
                raise FormatError("left-hand side must be exactly one symbol", lineno)
            if not rhs_parts:
                raise FormatError("empty right-hand side", lineno)
            rules.append((lineno, lhs_parts[0], rhs_parts))
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise FormatError(f"expected a header line, got {line!r}", lineno)
        if key == "rules":
            if value.strip():
                raise FormatError("'rules:' takes no value", lineno)
            in_rules = True
        elif key in _HEADERS:
            if key in headers:
                raise FormatError(f"duplicate '{key}:' header", lineno)
            headers[key] = value.split()
        else:
            raise FormatError(f"unknown header {key!r}", lineno)
    for key in _HEADERS:
        if key not in headers:
            raise FormatError(f"missing '{key}:' header")
    if len(headers["start"]) != 1:
        raise FormatError("'start:' takes exactly one label")
    if not in_rules:
        raise FormatError("missing 'rules:' section")
    return GrammarText(headers["start"][0], headers["terminals"], headers["nonterminals"], rules)


def parse_grammar_text(text: str) -> Grammar:
    sections = read_sections(text)
    terminals = set(sections.terminals)
    declared = terminals | set(sections.nonterminals)
    seen = set()
    rules = []
    for lineno, lhs, rhs in sections.rules:
        for s in (lhs, *rhs):
            if s not in declared:
                raise UndeclaredSymbol(f"line {lineno}: symbol {s!r} is not declared")
        try:
            classify_rule(lhs, rhs, terminals)
        except ShapeError as exc:
            raise FormatError(str(exc), lineno) from None
        rule = Rule(lhs, rhs)
        if rule in seen:
            raise DuplicateRule(f"line {lineno}: duplicate rule {rule}")
        seen.add(rule)
        rules.append(rule)
    return Grammar(sections.terminals, sections.nonterminals, rules, sections.start)


def format_sections(start, terminals, nonterminals, rule_lines, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"start: {start}")
    lines.append(f"terminals: {' '.join(terminals)}")
    lines.append(f"nonterminals: {' '.join(nonterminals)}")
    lines.append("rules:")
    lines.extend(rule_lines)
    return "\n".join(lines) + "\n"


def serialize_grammar(g: Grammar, comments: Sequence[str] = ()) -> str:
    return format_sections(g.start, g.terminals, g.nonterminals, [str(r) for r in g.rules], comments)


def load_grammar(path) -> Grammar:
    return parse_grammar_text(Path(path).read_text(encoding="utf-8"))


def save_grammar(g: Grammar, path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(serialize_grammar(g, comments), encoding="utf-8")
