"""Relaxed Chomsky Normal Form conversion, CYK recognition and bounded language enumeration.

Each rule class has its own conversion pattern, so no general
START/TERM/BIN/DEL/UNIT pipeline is needed:

    A -> C D      unchanged
    A -> a b      A -> N_a N_b
    A -> c E      A -> N_c E          (and A -> E c  =>  A -> E N_c)
    A -> a B b    A -> N_a X,  X -> B N_b   with X fresh

plus one ``N_t -> t`` rule per terminal that occurs in a converted rule.
The start symbol may appear on right-hand sides.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from .errors import BudgetExceeded, FormatError, UndeclaredSymbol, UnknownTerminal, UnsupportedRule
from .grammar import Grammar, Rule, RuleClass, check_symbol_tables, format_sections, read_sections

MAX_ENUMERATION_LENGTH = 12
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class CnfStats:
    added_symbols: int  # proxy nonterminals, one per used terminal
    added_rules: int  # proxy rules plus one extra rule per P+ rule
    cluster_symbols: int = 0


@dataclass(frozen=True)
class CnfGrammar:
    terminals: tuple[str, ...]
    nonterminals: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str
    stats: CnfStats | None = field(default=None, compare=False)
    _parser: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "nonterminals", tuple(self.nonterminals))
        object.__setattr__(self, "rules", tuple(self.rules))
        check_symbol_tables(self.terminals, self.nonterminals)
        t_set, nt_set = set(self.terminals), set(self.nonterminals)
        if self.start not in nt_set:
            raise UndeclaredSymbol(f"start symbol {self.start!r} is not a declared nonterminal")
        for rule in self.rules:
            if rule.lhs not in nt_set:
                raise UndeclaredSymbol(f"{rule}: {rule.lhs!r} is not a declared nonterminal")
            if len(rule.rhs) == 1 and rule.rhs[0] in t_set:
                continue
            if len(rule.rhs) == 2 and all(s in nt_set for s in rule.rhs):
                continue
            raise UnsupportedRule(f"{rule} is neither binary nor a single terminal")

    @property
    def binary_rules(self) -> list[Rule]:
        return [r for r in self.rules if len(r.rhs) == 2]

    @property
    def terminal_rules(self) -> list[Rule]:
        return [r for r in self.rules if len(r.rhs) == 1]

    @property
    def parser(self) -> CykParser:
        if self._parser is None:
            object.__setattr__(self, "_parser", CykParser(self))
        return self._parser

    def __str__(self):
        return serialize_cnf(self)


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def to_cnf(g: Grammar) -> CnfGrammar:
    taken = set(g.terminals) | set(g.nonterminals)
    proxies: dict[str, str] = {}
    added_nts: list[str] = []
    rules: list[Rule] = []

    def proxy(t):
        if t not in proxies:
            proxies[t] = _fresh(f"N_{t}", taken)
            added_nts.append(proxies[t])
        return proxies[t]

    clusters = 0
    for rule in g.rules:
        cls = g.rule_class(rule)
        rhs = rule.rhs
        if cls is RuleClass.BRANCH:
            rules.append(rule)
        elif cls is RuleClass.PAREN_NO:
            rules.append(Rule(rule.lhs, (proxy(rhs[0]), proxy(rhs[1]))))
        elif cls is RuleClass.ITER_LEFT:
            rules.append(Rule(rule.lhs, (proxy(rhs[0]), rhs[1])))
        elif cls is RuleClass.ITER_RIGHT:
            rules.append(Rule(rule.lhs, (rhs[0], proxy(rhs[1]))))
        elif cls is RuleClass.PAREN_WITH:
            left, right = proxy(rhs[0]), proxy(rhs[2])
            clusters += 1
            cluster = _fresh(f"X{clusters}", taken)
            added_nts.append(cluster)
            rules.append(Rule(rule.lhs, (left, cluster)))
            rules.append(Rule(cluster, (rhs[1], right)))
        else:  # pragma: no cover - Grammar only admits the classes above
            raise UnsupportedRule(f"no conversion pattern for {rule}")
    rules.extend(Rule(n, (t,)) for t, n in proxies.items())
    stats = CnfStats(
        added_symbols=len(proxies),
        added_rules=len(proxies) + clusters,
        cluster_symbols=clusters,
    )
    return CnfGrammar(g.terminals, (*g.nonterminals, *added_nts), rules, g.start, stats)


# ---------------------------------------------------------------------------
# CYK


class CykParser:
    """CYK recognizer over bit-set cells; pair combinations are memoised per grammar."""

    def __init__(self, c: CnfGrammar):
        self.grammar = c
        self.index = {nt: i for i, nt in enumerate(c.nonterminals)}
        self.start_bit = 1 << self.index[c.start]
        self.by_terminal: dict[str, int] = {t: 0 for t in c.terminals}
        by_left = defaultdict(list)
        for rule in c.rules:
            bit = 1 << self.index[rule.lhs]
            if len(rule.rhs) == 1:
                self.by_terminal[rule.rhs[0]] |= bit
            else:
                b, d = rule.rhs
                by_left[self.index[b]].append((1 << self.index[d], bit))
        self.by_left = dict(by_left)
        self._combine_cache: dict[tuple[int, int], int] = {}

    def combine(self, left: int, right: int) -> int:
        key = (left, right)
        out = self._combine_cache.get(key)
        if out is None:
            out = 0
            for b, pairs in self.by_left.items():
                if left >> b & 1:
                    for d_bit, a_bit in pairs:
                        if right & d_bit:
                            out |= a_bit
            self._combine_cache[key] = out
        return out

    def _check(self, w: Sequence[str]):
        for tok in w:
            if tok not in self.by_terminal:
                raise UnknownTerminal(f"{tok!r} is not a terminal of this grammar")

    def masks(self, w: Sequence[str]) -> list[list[int]]:
        """``table[l-1][i]``: bit set of nonterminals deriving ``w[i:i+l]``."""
        self._check(w)
        n = len(w)
        table = [[self.by_terminal[tok] for tok in w]]
        combine = self.combine
        for length in range(2, n + 1):
            row = []
            for i in range(n - length + 1):
                cell = 0
                for k in range(1, length):
                    left = table[k - 1][i]
                    if left:
                        right = table[length - k - 1][i + k]
                        if right:
                            cell |= combine(left, right)
                row.append(cell)
            table.append(row)
        return table

    def accepts(self, w: Sequence[str]) -> bool:
        if isinstance(w, str):
            w = w.split()
        if not w:
            self._check(w)
            return False
        return bool(self.masks(w)[-1][0] & self.start_bit)

    def table(self, w: Sequence[str]) -> list[list[frozenset]]:
        names = self.grammar.nonterminals
        return [
            [frozenset(names[i] for i in range(len(names)) if mask >> i & 1) for mask in row]
            for row in self.masks(w)
        ]


def cyk_parse(c: CnfGrammar, w: Union[Sequence[str], str]) -> bool:
    """Membership of ``w`` (token sequence, or whitespace-separated string) in L(c)."""
    return c.parser.accepts(w)


def cyk_table(c: CnfGrammar, w: Sequence[str]) -> list[list[frozenset]]:
    if isinstance(w, str):
        w = w.split()
    return c.parser.table(w)


# ---------------------------------------------------------------------------
# bounded enumeration (test oracle)


def min_yield_lengths(g) -> dict[str, int]:
    """Length of the shortest terminal string each nonterminal derives."""
    terminals = set(g.terminals)
    best: dict[str, int] = {}
    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            total = 0
            for s in rule.rhs:
                if s in terminals:
                    total += 1
                elif s in best:
                    total += best[s]
                else:
                    break
            else:
                if total < best.get(rule.lhs, total + 1):
                    best[rule.lhs] = total
                    changed = True
    return best


def enumerate_language(g, max_len: int, node_budget: int = DEFAULT_NODE_BUDGET) -> set[tuple[str, ...]]:
    """All words of length ``<= max_len`` derivable from the start symbol.

    Works on :class:`Grammar` and :class:`CnfGrammar` alike by expanding the
    leftmost nonterminal of every sentential form breadth-first, dropping
    forms whose shortest completion is already too long.
    """
    if max_len > MAX_ENUMERATION_LENGTH:
        raise ValueError(f"max_len {max_len} exceeds the enumeration guard {MAX_ENUMERATION_LENGTH}")
    terminals = set(g.terminals)
    minlen = min_yield_lengths(g)
    by_lhs = defaultdict(list)
    for rule in g.rules:
        if all(s in terminals or s in minlen for s in rule.rhs):
            by_lhs[rule.lhs].append(rule.rhs)
    if g.start not in minlen:
        return set()

    def cost(form):
        return sum(1 if s in terminals else minlen[s] for s in form)

    words = set()
    start = (g.start,)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for form in frontier:
            for i, sym in enumerate(form):
                if sym not in terminals:
                    break
            else:
                words.add(form)
                continue
            head, tail = form[:i], form[i + 1 :]
            for rhs in by_lhs[sym]:
                new = head + rhs + tail
                if new not in seen and cost(new) <= max_len:
                    seen.add(new)
                    if len(seen) > node_budget:
                        raise BudgetExceeded(f"more than {node_budget} sentential forms")
                    nxt.append(new)
        frontier = nxt
    return words


# ---------------------------------------------------------------------------
# text format


def serialize_cnf(c: CnfGrammar, comments: Sequence[str] = ()) -> str:
    return format_sections(c.start, c.terminals, c.nonterminals, [str(r) for r in c.rules], comments)


def parse_cnf_text(text: str) -> CnfGrammar:
    sections = read_sections(text)
    terminals = set(sections.terminals)
    nonterminals = set(sections.nonterminals)
    rules = []
    for lineno, lhs, rhs in sections.rules:
        for s in (lhs, *rhs):
            if s not in terminals and s not in nonterminals:
                raise UndeclaredSymbol(f"line {lineno}: symbol {s!r} is not declared")
        binary = len(rhs) == 2 and all(s in nonterminals for s in rhs)
        unary = len(rhs) == 1 and rhs[0] in terminals
        if lhs not in nonterminals or not (binary or unary):
            raise FormatError(f"'{lhs} -> {' '.join(rhs)}' is not a CNF rule", lineno)
        rules.append(Rule(lhs, rhs))
    return CnfGrammar(sections.terminals, sections.nonterminals, rules, sections.start)


def load_cnf(path) -> CnfGrammar:
    return parse_cnf_text(Path(path).read_text(encoding="utf-8"))


def save_cnf(c: CnfGrammar, path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(serialize_cnf(c, comments), encoding="utf-8")
