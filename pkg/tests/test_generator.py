import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramgen.errors import DeadEnd, IncompleteBuild, InfeasibleParams
from gramgen.feasibility import GenerationParams, check_feasible
from gramgen.generator import (
    BuildState,
    finalize_start,
    generate,
    phase_seed_paren_no,
    render_trace,
    replay,
    step_add_rule,
)
from gramgen.grammar import BRANCH, ITER, Rule, RuleClass, check_consistency
from oracles import grid_tuples, productive_naive, random_feasible_params

R = RuleClass
TABLE1 = GenerationParams(3, 4, 2, 0, 2, 1)


def test_table1_replay(table1):
    state = BuildState(TABLE1)
    state.add(R.PAREN_NO, "A", ("a", "b"))
    state.add(R.PAREN_NO, "B", ("b", "c"))
    assert state.hanging == ["A"] and state.last_created == "B"
    state.add(R.BRANCH, "C", ("A", "A"))
    assert "A" not in state.hanging and state.last_created == "C"
    state.add(R.ITER_RIGHT, "A", ("C", "c"))
    assert state.hanging == ["B"] and state.budget == 1
    # the last iteration rule is forced to take B on its right-hand side
    options = state.candidates(ITER)
    assert options and all("B" in rhs for _, _, rhs in options)
    assert ("C", ("B", "c")) in {(lhs, rhs) for _, lhs, rhs in options}
    state.add(R.ITER_RIGHT, "C", ("B", "c"))
    g = finalize_start(state)
    assert set(g.rules) == set(table1.rules)
    assert set(g.nonterminals) == set(table1.nonterminals) and g.start == "$"
    assert check_consistency(g).consistent


def test_inadmissible_rules_rejected():
    state = BuildState(TABLE1)
    with pytest.raises(ValueError):
        state.add(R.BRANCH, "A", ("A", "A"))  # parenthesis rules come first
    state.add(R.PAREN_NO, "A", ("a", "b"))
    with pytest.raises(ValueError):
        state.add(R.PAREN_NO, "A", ("a", "b"))  # duplicate
    with pytest.raises(ValueError):
        state.add(R.PAREN_NO, "B", ("d", "e"))  # unknown terminals beyond the fresh one


def test_single_rule_build():
    for seed in range(20):
        res = generate(GenerationParams(2, 3, 1), random.Random(seed))
        (rule,) = res.grammar.rules
        assert rule.lhs == "$" and res.grammar.nonterminals == ("$",)
        assert check_consistency(res.grammar).consistent


def test_seed_phase_single_rule_has_no_hanging():
    state = BuildState(GenerationParams(2, 2, 1, 0, 1, 0))
    phase_seed_paren_no(state, random.Random(0))
    assert state.hanging == []


def test_seed_phase_forced_new_lhs():
    # one terminal means one pair per left-hand side
    for seed in range(20):
        state = BuildState(GenerationParams(1, 2, 2, 0, 1, 0))
        phase_seed_paren_no(state, random.Random(seed))
        assert len({r.lhs for r in state.rules}) == 2
        assert state.hanging == [state.rules[0].lhs]


def test_dead_end_when_branch_triples_exhausted():
    state = BuildState(GenerationParams(1, 1, 1, 0, 0, 1))
    state.add(R.PAREN_NO, "A", ("a", "a"))
    state.add(R.BRANCH, "A", ("A", "A"))
    state.remaining[BRANCH] = 1  # pretend a second branch rule is owed
    with pytest.raises(DeadEnd):
        step_add_rule(state, random.Random(0))


def test_finalize_incomplete():
    state = BuildState(GenerationParams(2, 2, 2, 0, 1, 0))
    state.add(R.PAREN_NO, "A", ("a", "b"))
    state.add(R.PAREN_NO, "B", ("a", "b"))
    with pytest.raises(IncompleteBuild):
        finalize_start(state)  # quota left
    state.remaining[ITER] = 0
    assert state.hanging == ["A"]
    with pytest.raises(IncompleteBuild):
        finalize_start(state)  # hanging left


def test_infeasible_grid_rejected():
    for t in grid_tuples():
        p = GenerationParams(*t)
        if not check_feasible(p).feasible:
            with pytest.raises(InfeasibleParams):
                generate(p, random.Random(0))


def _check_state(state):
    rules = state.rules
    # everything built so far is productive
    assert set(state.nonterminals) <= productive_naive(_Partial(state))
    assert len(state.hanging) <= state.budget
    if state.last_created is not None:
        graph = nx.DiGraph()
        graph.add_nodes_from(state.nonterminals)
        graph.add_edges_from((r.lhs, s) for r in rules for s in r.rhs if s in state.nonterminals)
        reach = {state.last_created} | nx.descendants(graph, state.last_created)
        unreachable = set(state.nonterminals) - reach
        assert set(state.hanging) <= unreachable
        covered = set()
        for h in state.hanging:
            covered |= {h} | nx.descendants(graph, h)
        assert unreachable <= covered


class _Partial:
    def __init__(self, state):
        self.terminals = state.terminals
        self.rules = state.rules


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_invariants_hold_after_every_step(seed):
    rng = random.Random(seed)
    p = random_feasible_params(rng, max_t=3, max_nt=5, max_count=4)
    state = BuildState(p)
    try:
        phase_seed_paren_no(state, rng)
        _check_state(state)
        while state.total_remaining:
            step_add_rule(state, rng)
            _check_state(state)
    except DeadEnd:
        return
    g = finalize_start(state)
    assert check_consistency(g).consistent


def _postconditions(p, res):
    g = res.grammar
    assert g.class_counts() == p.counts()
    assert len(g.terminals) <= p.s_t_max and len(g.nonterminals) <= p.s_nt_max
    assert len(set(g.rules)) == len(g.rules)
    assert check_consistency(g).consistent
    assert g.start == "$"
    # the start symbol is the nonterminal created last
    created = [s for step in res.trace for s in step.created if s == step.rule.lhs]
    assert created[-1] == res.start_source


def test_table1_params_many_seeds():
    for seed in range(1000):
        _postconditions(TABLE1, generate(TABLE1, random.Random(seed)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_random_params_postconditions(seed):
    rng = random.Random(seed)
    p = random_feasible_params(rng, max_t=6, max_nt=8, max_count=8)
    res = generate(p, rng)
    _postconditions(p, res)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_replay_and_determinism(seed):
    p = random_feasible_params(random.Random(seed), max_t=4, max_nt=6, max_count=5)
    a = generate(p, random.Random(seed))
    b = generate(p, random.Random(seed))
    assert a == b
    assert replay(p, a.trace) == a.grammar


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_created_lhs_not_on_its_own_rhs(seed):
    p = random_feasible_params(random.Random(seed), max_t=4, max_nt=6, max_count=5)
    res = generate(p, random.Random(seed))
    for step in res.trace:
        if step.rule.lhs in step.created:
            assert step.rule.lhs not in step.rule.rhs


def test_render_trace():
    res = generate(TABLE1, random.Random(3))
    text = render_trace(res)
    lines = text.splitlines()
    assert lines[0].split()[:1] == ["step"]
    assert len(lines) == len(res.trace) + 2
    assert f"{res.start_source} => $" in lines[-1]
    assert str(res.trace[0].rule) in lines[1]


def test_trace_rules_are_pre_rename():
    res = generate(TABLE1, random.Random(5))
    renamed = {Rule("$" if r.lhs == res.start_source else r.lhs,
                    tuple("$" if s == res.start_source else s for s in r.rhs)) for r in (s.rule for s in res.trace)}
    assert renamed == set(res.grammar.rules)
