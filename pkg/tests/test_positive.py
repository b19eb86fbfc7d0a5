import random
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from gramgen.cnf import cyk_parse, to_cnf
from gramgen.errors import EmptyLength
from gramgen.positive import (
    GAMMA,
    CountTable,
    LinearGraph,
    build_count_table,
    optimal_positive_set,
    sample_tree,
    sample_uniform,
    shortest_yields,
    stratified_positive_set,
    to_linear,
    walk_word,
)
from oracles import count_trees, grammar_of, leftmost_trees, small_grammars


def _linear_set(lg):
    return {(r.lhs, r.left, r.nt, r.right) for r in lg.rules}


def test_shortest_yields(table1):
    assert shortest_yields(table1) == {"A": ("a", "b"), "B": ("b", "c"), "$": ("b", "c", "c")}


def test_linear_table1(table1):
    lin = _linear_set(to_linear(table1))
    assert ("$", ("a", "b"), "A", ()) in lin
    assert ("$", (), "A", ("a", "b")) in lin
    assert len(lin) == 6


def test_linear_without_branches_is_isomorphic():
    g = grammar_of("S -> a S b; S -> c T; T -> T c; T -> a b")
    lg = to_linear(g)
    assert [r.origin for r in lg.rules] == list(g.rules)
    for r in lg.rules:
        parts = [*r.left, *([r.nt] if r.nt else []), *r.right]
        assert tuple(parts) == r.origin.rhs


def test_linear_branch_pattern():
    lg = to_linear(grammar_of("S -> B C; B -> a b; C -> b c"))
    assert _linear_set(lg) == {
        ("S", ("a", "b"), "C", ()),
        ("S", (), "B", ("b", "c")),
        ("B", ("a", "b"), None, ()),
        ("C", ("b", "c"), None, ()),
    }
    substituted = {r.substituted for r in lg.rules if r.lhs == "S"}
    assert substituted == {"B", "C"}


@pytest.mark.parametrize("seed", range(15))
def test_linear_soundness(seed):
    (g,) = small_grammars(1, seed)
    c = to_cnf(g)
    lg = to_linear(g)
    assert all(g.is_terminal(s) for r in lg.rules for s in (*r.left, *r.right))
    for w in lg.words(8):
        assert cyk_parse(c, w)


def test_graph_shape(table1):
    graph = LinearGraph(to_linear(table1))
    assert len(graph.edges) == len(graph.linear.rules)
    assert GAMMA in graph.nodes
    assert sum(1 for e in graph.edges if e.dst is GAMMA) == 2


def test_optimal_trivial():
    assert optimal_positive_set(grammar_of("S -> a b")).examples == [("a", "b")]


def _check_optimal(g):
    c = to_cnf(g)
    es = optimal_positive_set(g, c)
    lg = to_linear(g)
    graph = LinearGraph(lg)
    assert len(es) <= 2 * len(lg.rules) ** 3
    assert es.kind == "positive" and es.method == "optimal"
    for word, walks in zip(es.examples, es.witnesses):
        assert cyk_parse(c, word)
        for walk in walks:
            assert walk_word([graph.edges[i] for i in walk]) == word
    # an edge lies on a start -> end walk iff its source is reachable and the end is reachable from it
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(graph.nodes)
    dg.add_edges_from((e.src, e.dst) for e in graph.edges)
    from_start = {g.start} | nx.descendants(dg, g.start)
    to_end = {GAMMA} | nx.ancestors(dg, GAMMA)
    used = {i for walks in es.witnesses for w in walks for i in w}
    for e in graph.edges:
        if e.src in from_start and e.dst in to_end:
            assert e.index in used


def test_optimal_table1(table1):
    _check_optimal(table1)


@pytest.mark.parametrize("seed", range(25))
def test_optimal_generated(seed):
    (g,) = small_grammars(1, seed, max_t=4, max_nt=5, max_count=4, max_total=10)
    _check_optimal(g)


def test_count_table_examples(table1):
    t = build_count_table(grammar_of("S -> a b"), 5)
    assert t["S"] == [0, 0, 1, 0, 0, 0]
    t = build_count_table(table1, 8)
    assert t["$"][3] == 1 and t["$"][4] == 1
    with pytest.raises(ValueError):
        CountTable(table1, 0)


@pytest.mark.parametrize("seed", range(20))
def test_count_table_matches_brute_force(seed):
    (g,) = small_grammars(1, 100 + seed)
    t = build_count_table(g, 8)
    for n in range(1, 9):
        assert t.total(n) == count_trees(g, n)


def test_sample_examples(table1):
    rng = random.Random(0)
    assert sample_uniform(grammar_of("S -> a b"), 2, 5, rng).examples == [("a", "b")]
    for _ in range(20):
        assert sample_uniform(table1, 3, 1, rng).examples == [("b", "c", "c")]
    g = grammar_of("S -> a S b; S -> a b")
    assert sample_uniform(g, 6, 10, rng).examples == [tuple("aaabbb")]
    with pytest.raises(EmptyLength):
        sample_uniform(g, 5, 1, rng)


def _tree_key(tree):
    rule, kids = tree
    out = [rule]
    for k in kids:
        out.extend(_tree_key(k))
    return tuple(out)


def test_sampler_uniform_over_trees():
    # ambiguous grammar: several trees per word
    g = grammar_of("S -> S S; S -> a b; S -> a S b; S -> S b")
    n = 6
    trees = leftmost_trees(g, n)
    table = build_count_table(g, n)
    assert table.total(n) == len(trees) >= 3
    rng = random.Random(11)
    draws = Counter(_tree_key(sample_tree(table, "S", n, rng)) for _ in range(5000))
    assert set(draws) == {used for _, used in trees}
    assert chisquare([draws[used] for _, used in trees]).pvalue > 0.001


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_stratified_properties(seed):
    (g,) = small_grammars(1, seed)
    c = to_cnf(g)
    es = stratified_positive_set(g, 7, 4, random.Random(seed), c)
    assert all(2 <= len(w) <= 7 and cyk_parse(c, w) for w in es)


def test_stratified_examples(table1):
    es = stratified_positive_set(table1, 4, 10, random.Random(0))
    assert set(es) == {("b", "c", "c"), ("a", "b", "a", "b")}
    assert stratified_positive_set(grammar_of("S -> a b"), 3, 5, random.Random(0)).examples == [("a", "b")]
    with pytest.raises(ValueError):
        stratified_positive_set(table1, 1, 5, random.Random(0))


def test_sampling_deterministic(table1):
    a = stratified_positive_set(table1, 9, 5, random.Random(42))
    b = stratified_positive_set(table1, 9, 5, random.Random(42))
    assert a.examples == b.examples
