import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramgen.cnf import (
    CnfGrammar,
    cyk_parse,
    cyk_table,
    enumerate_language,
    parse_cnf_text,
    serialize_cnf,
    to_cnf,
)
from gramgen.errors import BudgetExceeded, FormatError, UnknownTerminal, UnsupportedRule
from gramgen.grammar import Rule
from oracles import all_words, grammar_of, small_grammars


def test_table1_conversion(table1):
    c = to_cnf(table1)
    assert c.stats.added_symbols == 3 and c.stats.added_rules == 3 and c.stats.cluster_symbols == 0
    assert {"N_a", "N_b", "N_c"} <= set(c.nonterminals)
    assert len(c.rules) == 8 and c.start == "$"
    assert Rule("A", ("$", "N_c")) in c.rules


def test_paren_with_clusters_trailing_pair():
    c = to_cnf(grammar_of("S -> a B b; B -> a b"))
    assert set(c.rules) == {
        Rule("S", ("N_a", "X1")),
        Rule("X1", ("B", "N_b")),
        Rule("B", ("N_a", "N_b")),
        Rule("N_a", ("a",)),
        Rule("N_b", ("b",)),
    }
    assert (c.stats.added_symbols, c.stats.added_rules, c.stats.cluster_symbols) == (2, 3, 1)


def test_branch_unchanged():
    c = to_cnf(grammar_of("S -> A B; A -> a b; B -> a b"))
    assert Rule("S", ("A", "B")) in c.rules


def test_proxy_names_avoid_clashes():
    g = grammar_of("S -> a N_a; N_a -> a b")
    c = to_cnf(g)
    assert "N_a'" in c.nonterminals
    assert cyk_parse(c, "a a b")


def test_cnf_rejects_long_rules():
    with pytest.raises(UnsupportedRule):
        CnfGrammar(["a"], ["S"], [Rule("S", ("a", "a"))], "S")


def test_cyk_examples(table1):
    c = to_cnf(table1)
    assert cyk_parse(c, "b c c")
    assert cyk_parse(c, ["a", "b", "a", "b"])
    assert not cyk_parse(c, "a b")
    assert not cyk_parse(c, [])
    assert not cyk_parse(c, "")
    with pytest.raises(UnknownTerminal):
        cyk_parse(c, "b x")


def test_cyk_table_cells(table1):
    c = to_cnf(table1)
    table = cyk_table(c, "b c c")
    assert table[0] == [{"N_b"}, {"N_c"}, {"N_c"}]
    assert table[1][0] == {"B"}
    assert "$" in table[2][0]


def test_enumerate_examples(table1):
    words = enumerate_language(table1, 4)
    assert ("b", "c", "c") in words and ("a", "b", "a", "b") in words
    assert ("a", "b") not in words
    g = grammar_of("S -> a b")
    assert enumerate_language(g, 2) == {("a", "b")}
    assert enumerate_language(g, 1) == set()
    with pytest.raises(ValueError):
        enumerate_language(g, 13)


def test_enumerate_budget():
    g = grammar_of("S -> S S; S -> a b; S -> b a")
    with pytest.raises(BudgetExceeded):
        enumerate_language(g, 12, node_budget=50)


def test_serialize_round_trip(table1):
    c = to_cnf(table1)
    back = parse_cnf_text(serialize_cnf(c))
    assert back == c


def test_parse_cnf_rejects_non_cnf():
    text = "start: S\nterminals: a\nnonterminals: S\nrules:\nS -> a a\n"
    with pytest.raises(FormatError, match="line 5"):
        parse_cnf_text(text)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_accounting_and_cluster_structure(seed):
    (g,) = small_grammars(1, seed, max_t=5, max_nt=6, max_count=5, max_total=None)
    c = to_cnf(g)
    n_with = g.class_counts()["P+"]
    assert c.stats.added_rules - c.stats.added_symbols == n_with
    assert c.stats.added_symbols == len(g.used_terminals())
    assert len(c.rules) == len(g.rules) + c.stats.added_rules
    added = set(c.nonterminals) - set(g.nonterminals)
    clusters = [n for n in added if not any(r.lhs == n and len(r.rhs) == 1 for r in c.rules)]
    assert len(clusters) == n_with
    for x in clusters:
        mentions = Counter(r for r in c.rules for s in (r.lhs, *r.rhs) if s == x)
        assert len(mentions) == 2


@pytest.mark.parametrize("seed", range(20))
def test_cyk_matches_enumeration(seed):
    (g,) = small_grammars(1, seed, max_total=7)
    c = to_cnf(g)
    lang = enumerate_language(g, 7)
    assert enumerate_language(c, 7) == lang
    rng = random.Random(seed)
    words = list(all_words(g.terminals, 7))
    for w in rng.sample(words, min(200, len(words))) + sorted(lang):
        assert cyk_parse(c, w) == (w in lang)
