"""Positive example sets.

Two constructions:

* coverage sets: the grammar is linearised, turned into a graph whose edges
  are linear rules, and for every ordered 1-, 2- and 3-sequence of edges the
  shortest start-to-Γ walk through them (in that order) is read off as a word;
* uniform sets: exact derivation-tree counts per nonterminal and length drive
  a top-down sampler that draws trees of a given yield length uniformly.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .cnf import CnfGrammar, cyk_parse, to_cnf
from .errors import EmptyLength, NoYield
from .exampleset import ExampleSet
from .grammar import Grammar, Rule, RuleClass


class _Gamma:
    __slots__ = ()

    def __repr__(self):
        return "Γ"


GAMMA = _Gamma()


def shortest_yields(g: Grammar) -> dict[str, tuple[str, ...]]:
    """Shortest terminal yield per nonterminal; ties go to the lexicographically smallest."""
    best: dict[str, tuple[str, ...]] = {}

    def key(word):
        return (len(word), word)

    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            parts = []
            for s in rule.rhs:
                if g.is_terminal(s):
                    parts.append((s,))
                elif s in best:
                    parts.append(best[s])
                else:
                    break
            else:
                word = tuple(itertools.chain.from_iterable(parts))
                old = best.get(rule.lhs)
                if old is None or key(word) < key(old):
                    best[rule.lhs] = word
                    changed = True
    return best


# ---------------------------------------------------------------------------
# linear grammar and its graph


@dataclass(frozen=True)
class LinearRule:
    """``lhs -> left nt right`` (or ``lhs -> left`` when ``nt`` is None)."""

    lhs: str
    left: tuple[str, ...]
    nt: str | None
    right: tuple[str, ...]
    origin: Rule
    substituted: str | None = None  # branch operand replaced by its shortest yield

    def __str__(self):
        parts = [*self.left, *([self.nt] if self.nt else []), *self.right]
        return f"{self.lhs} -> {' '.join(parts)}"


@dataclass(frozen=True)
class LinearGrammar:
    rules: tuple[LinearRule, ...]
    start: str
    nonterminals: tuple[str, ...]

    def words(self, max_len: int) -> set[tuple[str, ...]]:
        """Every word of length ``<= max_len``, by bounded expansion (each rule adds a terminal)."""
        by_lhs = {}
        for r in self.rules:
            by_lhs.setdefault(r.lhs, []).append(r)
        out = set()
        stack = [((), self.start, ())]
        while stack:
            left, nt, right = stack.pop()
            for r in by_lhs.get(nt, ()):
                new_left, new_right = left + r.left, r.right + right
                if len(new_left) + len(new_right) > max_len:
                    continue
                if r.nt is None:
                    out.add(new_left + new_right)
                else:
                    stack.append((new_left, r.nt, new_right))
        return out


def to_linear(g: Grammar) -> LinearGrammar:
    yields = shortest_yields(g)
    missing = [n for n in g.nonterminals if n not in yields]
    if missing:
        raise NoYield(f"nonterminals without a terminal yield: {missing}")
    rules: list[LinearRule] = []
    seen = set()

    def emit(lr):
        key = (lr.lhs, lr.left, lr.nt, lr.right)
        if key not in seen:
            seen.add(key)
            rules.append(lr)

    for rule in g.rules:
        cls = g.rule_class(rule)
        a, rhs = rule.lhs, rule.rhs
        if cls is RuleClass.PAREN_NO:
            emit(LinearRule(a, rhs, None, (), rule))
        elif cls is RuleClass.PAREN_WITH:
            emit(LinearRule(a, rhs[:1], rhs[1], rhs[2:], rule))
        elif cls is RuleClass.ITER_LEFT:
            emit(LinearRule(a, rhs[:1], rhs[1], (), rule))
        elif cls is RuleClass.ITER_RIGHT:
            emit(LinearRule(a, (), rhs[0], rhs[1:], rule))
        else:
            b, c = rhs
            emit(LinearRule(a, yields[b], c, (), rule, substituted=b))
            emit(LinearRule(a, (), b, yields[c], rule, substituted=c))
    return LinearGrammar(tuple(rules), g.start, g.nonterminals)


@dataclass(frozen=True)
class Edge:
    index: int
    src: str
    dst: object  # nonterminal label or GAMMA
    rule: LinearRule


class LinearGraph:
    """Nonterminals plus Γ as nodes; one edge per linear rule."""

    def __init__(self, lg: LinearGrammar):
        self.linear = lg
        self.nodes = (*lg.nonterminals, GAMMA)
        self.edges = tuple(
            Edge(i, r.lhs, GAMMA if r.nt is None else r.nt, r) for i, r in enumerate(lg.rules)
        )
        self.out_edges = {n: [] for n in self.nodes}
        for e in self.edges:
            self.out_edges[e.src].append(e)
        self._trees: dict = {}

    def _bfs_tree(self, source):
        tree = self._trees.get(source)
        if tree is None:
            tree = {source: None}
            queue = deque([source])
            while queue:
                node = queue.popleft()
                for e in self.out_edges[node]:
                    if e.dst not in tree:
                        tree[e.dst] = e
                        queue.append(e.dst)
            self._trees[source] = tree
        return tree

    def shortest_path(self, source, target) -> list[Edge] | None:
        tree = self._bfs_tree(source)
        if target not in tree:
            return None
        path = []
        node = target
        while tree[node] is not None:
            path.append(tree[node])
            node = tree[node].src
        path.reverse()
        return path

    def walk_through(self, start, required: Sequence[Edge], max_len: int) -> list[Edge] | None:
        """Shortest start-to-Γ walk traversing ``required`` edges in order."""
        walk: list[Edge] = []
        node = start
        for e in required:
            if node is GAMMA:
                return None
            seg = self.shortest_path(node, e.src)
            if seg is None:
                return None
            walk.extend(seg)
            walk.append(e)
            node = e.dst
        if node is not GAMMA:
            seg = self.shortest_path(node, GAMMA)
            if seg is None:
                return None
            walk.extend(seg)
        if len(walk) > max_len:
            return None
        return walk


def walk_word(walk: Sequence[Edge]) -> tuple[str, ...]:
    """Left parts in walk order, right parts in reverse walk order."""
    left = tuple(itertools.chain.from_iterable(e.rule.left for e in walk))
    right = tuple(itertools.chain.from_iterable(e.rule.right for e in reversed(walk)))
    return left + right


def optimal_positive_set(g: Grammar, cnf: CnfGrammar | None = None, name: str = "grammar") -> ExampleSet:
    """Coverage words for every ordered 1-, 2- and 3-sequence of linear rules.

    ``witnesses[i]`` lists walks (as edge indices) spelling word i; a walk is
    kept when it is the first for its word or covers an edge no earlier walk did.
    """
    cnf = cnf or to_cnf(g)
    graph = LinearGraph(to_linear(g))
    cap = 4 * len(graph.nodes)
    out = ExampleSet("positive", "optimal", grammar=name)
    position: dict[tuple, int] = {}
    covered: set[int] = set()
    for k in (1, 2, 3):
        for combo in itertools.permutations(graph.edges, k):
            walk = graph.walk_through(g.start, combo, cap)
            if walk is None:
                continue
            word = walk_word(walk)
            indices = tuple(e.index for e in walk)
            if word in position:
                if not covered.issuperset(indices):
                    out.witnesses[position[word]].append(indices)
                    covered.update(indices)
                continue
            if not cyk_parse(cnf, word):  # pragma: no cover - linearisation is sound
                raise AssertionError(f"coverage word {' '.join(word)} is not in the language")
            position[word] = len(out)
            out.add(word, witness=[indices])
            covered.update(indices)
    return out


# ---------------------------------------------------------------------------
# counting and uniform sampling


class CountTable:
    """``counts[X][n]``: derivation trees rooted at X whose yield has length n."""

    def __init__(self, g: Grammar, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be at least 1")
        self.grammar = g
        self.n_max = n_max
        self.counts = {nt: [0] * (n_max + 1) for nt in g.nonterminals}
        self._by_lhs = g.rules_by_lhs()
        for n in range(1, n_max + 1):
            for nt in g.nonterminals:
                self.counts[nt][n] = sum(c for *_, c in self.contributions(nt, n))

    def __getitem__(self, nt):
        return self.counts[nt]

    def total(self, n: int) -> int:
        return self.counts[self.grammar.start][n] if n <= self.n_max else 0

    def contributions(self, nt: str, n: int):
        """Yield ``(rule, split, count)`` for every way to derive length n from ``nt``."""
        g, counts = self.grammar, self.counts
        for rule in self._by_lhs.get(nt, ()):
            cls = g.rule_class(rule)
            if cls is RuleClass.PAREN_NO:
                if n == 2:
                    yield rule, None, 1
            elif cls is RuleClass.PAREN_WITH:
                if n > 2:
                    c = counts[rule.rhs[1]][n - 2]
                    if c:
                        yield rule, None, c
            elif cls is RuleClass.BRANCH:
                b, d = rule.rhs
                for k in range(1, n):
                    c = counts[b][k] * counts[d][n - k]
                    if c:
                        yield rule, k, c
            else:
                sub = rule.rhs[1] if cls is RuleClass.ITER_LEFT else rule.rhs[0]
                if n > 1:
                    c = counts[sub][n - 1]
                    if c:
                        yield rule, None, c


def build_count_table(g: Grammar, n_max: int) -> CountTable:
    return CountTable(g, n_max)


def sample_tree(table: CountTable, nt: str, n: int, rng):
    """Uniformly drawn derivation tree ``(rule, subtrees)`` of yield length n."""
    total = table[nt][n] if n <= table.n_max else 0
    if not total:
        raise EmptyLength(f"{nt} derives no string of length {n}")
    pick = rng.randrange(total)
    for rule, split, c in table.contributions(nt, n):
        if pick < c:
            break
        pick -= c
    g = table.grammar
    cls = g.rule_class(rule)
    if cls is RuleClass.PAREN_NO:
        return rule, ()
    if cls is RuleClass.BRANCH:
        b, d = rule.rhs
        return rule, (sample_tree(table, b, split, rng), sample_tree(table, d, n - split, rng))
    if cls is RuleClass.PAREN_WITH:
        return rule, (sample_tree(table, rule.rhs[1], n - 2, rng),)
    sub = rule.rhs[1] if cls is RuleClass.ITER_LEFT else rule.rhs[0]
    return rule, (sample_tree(table, sub, n - 1, rng),)


def tree_yield(g: Grammar, tree) -> tuple[str, ...]:
    rule, children = tree
    out = []
    kids = iter(children)
    for s in rule.rhs:
        if g.is_terminal(s):
            out.append(s)
        else:
            out.extend(tree_yield(g, next(kids)))
    return tuple(out)


def sample_uniform(
    g: Grammar,
    n: int,
    count: int,
    rng,
    table: CountTable | None = None,
    cnf: CnfGrammar | None = None,
    name: str = "grammar",
) -> ExampleSet:
    """``count`` uniform tree draws of yield length n, deduplicated."""
    if table is None or table.n_max < n:
        table = CountTable(g, n)
    if not table.total(n):
        raise EmptyLength(f"the grammar derives no string of length {n}")
    cnf = cnf or to_cnf(g)
    out = ExampleSet("positive", "uniform", grammar=name)
    for _ in range(count):
        word = tree_yield(g, sample_tree(table, g.start, n, rng))
        if word not in out:
            if not cyk_parse(cnf, word):  # pragma: no cover - sampled trees are derivations
                raise AssertionError(f"sampled word {' '.join(word)} is not in the language")
            out.add(word)
    return out


def stratified_positive_set(
    g: Grammar, max_len: int, per_len: int, rng, cnf: CnfGrammar | None = None, name: str = "grammar"
) -> ExampleSet:
    """Union of uniform draws for every length 2..max_len the grammar reaches."""
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    table = CountTable(g, max_len)
    cnf = cnf or to_cnf(g)
    out = ExampleSet("positive", "uniform", grammar=name)
    for n in range(2, max_len + 1):
        if table.total(n):
            for word in sample_uniform(g, n, per_len, rng, table=table, cnf=cnf):
                out.add(word)
    return out
