"""Graphviz DOT rendering of a grammar: symbol nodes plus one expansion node per rule."""

from __future__ import annotations

from .grammar import Grammar


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: Grammar, name: str = "grammar") -> str:
    lines = [f"digraph {_quote(name)} {{", "  rankdir=TB;"]
    for nt in g.nonterminals:
        extra = ", peripheries=2" if nt == g.start else ""
        lines.append(f"  {_quote('nt:' + nt)} [label={_quote(nt)}, shape=box{extra}];")
    for t in g.terminals:
        lines.append(f"  {_quote('t:' + t)} [label={_quote(t)}, shape=ellipse];")
    edges = []
    for i, rule in enumerate(g.rules):
        node = _quote(f"r{i}")
        lines.append(f"  {node} [label={_quote(g.rule_class(rule).value)}, shape=diamond];")
        edges.append(f"  {_quote('nt:' + rule.lhs)} -> {node};")
        for pos, sym in enumerate(rule.rhs, start=1):
            kind = "t:" if g.is_terminal(sym) else "nt:"
            edges.append(f"  {node} -> {_quote(kind + sym)} [label={pos}];")
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
