"""End-to-end benchmark kit: parameters -> grammar -> CNF -> example sets, written to one directory."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .cnf import CnfGrammar, cyk_parse, load_cnf, parse_cnf_text, save_cnf, to_cnf
from .dot import export_dot
from .errors import Exhausted, GrammarError, InfeasibleParams, UnknownTerminal, ValidationError
from .exampleset import ExampleSet, read_example_set, write_example_set
from .feasibility import FeasibilityVerdict, GenerationParams, check_feasible, derive_params
from .generator import generate, render_trace
from .grammar import AGGREGATES, Grammar, check_consistency, load_grammar, parse_grammar_text, save_grammar
from .negative import levenshtein_negatives, random_negatives
from .positive import optimal_positive_set, stratified_positive_set

GRAMMAR_FILE = "grammar.txt"
CNF_FILE = "grammar.cnf.txt"
DOT_FILE = "grammar.dot"
REPORT_FILE = "report.txt"
SET_FILES = {
    "pos_optimal": "pos_optimal.txt",
    "pos_uniform": "pos_uniform.txt",
    "neg_random": "neg_random.txt",
    "neg_levenshtein": "neg_levenshtein.txt",
}
MAX_SEED = 2**64


@dataclass
class RunConfig:
    out_dir: str | Path
    params: GenerationParams | None = None
    total_rules: int | None = None
    grammar_path: str | Path | None = None
    seed: int = 0
    pos_optimal: bool = False
    pos_uniform: bool = False
    uniform_max_len: int = 8
    uniform_per_len: int = 10
    neg_random: bool = False
    random_count: int = 100
    random_min_len: int = 1
    random_max_len: int = 10
    neg_lev: bool = False
    lev_count: int = 100
    lev_distance: int = 1

    @property
    def mode(self) -> str:
        modes = [
            name
            for name, value in (
                ("explicit-params", self.params),
                ("rule-count", self.total_rules),
                ("load-grammar", self.grammar_path),
            )
            if value is not None
        ]
        if len(modes) != 1:
            raise ValueError(f"exactly one of params, total_rules, grammar_path must be set (got {modes or 'none'})")
        return modes[0]

    @property
    def requested_sets(self) -> list[str]:
        flags = (
            ("pos_optimal", self.pos_optimal),
            ("pos_uniform", self.pos_uniform),
            ("neg_random", self.neg_random),
            ("neg_levenshtein", self.neg_lev),
        )
        return [name for name, on in flags if on]

    def validate(self) -> None:
        mode = self.mode
        if not isinstance(self.seed, int) or not 0 <= self.seed < MAX_SEED:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if mode == "load-grammar" and not self.requested_sets:
            raise ValueError("a loaded grammar needs at least one example set to be requested")
        if self.pos_uniform and (self.uniform_max_len < 2 or self.uniform_per_len < 1):
            raise ValueError("uniform positives need max_len >= 2 and per_len >= 1")
        if self.neg_random and (self.random_count < 1 or not 1 <= self.random_min_len <= self.random_max_len):
            raise ValueError("random negatives need count >= 1 and 1 <= min_len <= max_len")
        if self.neg_lev and (self.lev_count < 1 or self.lev_distance < 1):
            raise ValueError("edit-distance negatives need count >= 1 and distance >= 1")


@dataclass
class RunReport:
    out_dir: Path
    grammar_path: Path
    cnf_path: Path
    dot_path: Path
    report_path: Path
    params: GenerationParams | None
    verdict: FeasibilityVerdict | None
    trace: str
    sets: dict[str, tuple[Path, int]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def files(self) -> list[Path]:
        return [self.grammar_path, self.cnf_path, self.dot_path, *(p for p, _ in self.sets.values()), self.report_path]


def stage_rng(seed: int, stage: str) -> random.Random:
    """Independent generator per pipeline stage, derived from the run seed."""
    return random.Random(f"{seed}/{stage}")


def _summary(g: Grammar, cnf: CnfGrammar) -> list[str]:
    counts = g.class_counts()
    return [
        "rules: " + " ".join(f"{agg}={counts[agg]}" for agg in AGGREGATES) + f" total={len(g.rules)}",
        f"terminals: {len(g.terminals)} ({len(g.used_terminals())} used)",
        f"nonterminals: {len(g.nonterminals)}",
        f"cnf: rules={len(cnf.rules)} nonterminals={len(cnf.nonterminals)} "
        f"added_symbols={cnf.stats.added_symbols} added_rules={cnf.stats.added_rules}",
    ]


def run(config: RunConfig) -> RunReport:
    """Build every requested artifact into ``config.out_dir``.

    Raises InfeasibleParams before anything is written when the parameters fail
    the gate.  Sets that could not be filled are written partially and listed
    in ``warnings``.
    """
    started = time.perf_counter()
    config.validate()
    mode = config.mode
    seed = config.seed
    params = verdict = None
    trace = ""
    if mode == "load-grammar":
        g = load_grammar(config.grammar_path)
        report = check_consistency(g)
        if not report.consistent:
            raise ValidationError("loaded grammar is not consistent: " + "; ".join(report.problems(g)))
        name = Path(config.grammar_path).stem
    else:
        if mode == "rule-count":
            params = derive_params(config.total_rules, stage_rng(seed, "params"))
        else:
            params = config.params
        verdict = check_feasible(params)
        if not verdict.feasible:
            raise InfeasibleParams(verdict)
        result = generate(params, stage_rng(seed, "generation"))
        g = result.grammar
        trace = render_trace(result)
        name = "grammar"

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cnf = to_cnf(g)
    rep = RunReport(out, out / GRAMMAR_FILE, out / CNF_FILE, out / DOT_FILE, out / REPORT_FILE, params, verdict, trace)
    header = [f"seed: {seed}"] + ([f"params: {params}"] if params else [])
    save_grammar(g, rep.grammar_path, header)
    save_cnf(cnf, rep.cnf_path, header)
    rep.dot_path.write_text(export_dot(g, name), encoding="utf-8")

    made: dict[str, ExampleSet] = {}

    def emit(key, build):
        try:
            es = build()
        except Exhausted as exc:
            es = exc.partial
            rep.warnings.append(f"{key}: {exc}")
        es.seed = seed
        path = out / SET_FILES[key]
        write_example_set(es, path)
        rep.sets[key] = (path, len(es))
        made[key] = es

    if config.pos_optimal:
        emit("pos_optimal", lambda: optimal_positive_set(g, cnf, name))
    if config.pos_uniform:
        rng = stage_rng(seed, "pos_uniform")
        emit(
            "pos_uniform",
            lambda: stratified_positive_set(g, config.uniform_max_len, config.uniform_per_len, rng, cnf, name),
        )
    if config.neg_random:
        rng = stage_rng(seed, "neg_random")
        emit(
            "neg_random",
            lambda: random_negatives(
                cnf, config.random_count, config.random_min_len, config.random_max_len, rng, name=name
            ),
        )
    if config.neg_lev:
        sources = [w for key in ("pos_optimal", "pos_uniform") if key in made for w in made[key]]
        if not sources:
            sources = list(optimal_positive_set(g, cnf, name))
        rng = stage_rng(seed, "neg_lev")
        emit(
            "neg_levenshtein",
            lambda: levenshtein_negatives(cnf, sources, config.lev_count, config.lev_distance, rng, name=name),
        )

    lines = [f"mode: {mode}", f"seed: {seed}"]
    if params is not None:
        lines += [f"params: {params}", f"feasibility: {verdict.describe()}"]
    else:
        lines.append(f"source: {config.grammar_path}")
    lines += _summary(g, cnf)
    lines.append("files:")
    lines += [f"  {p.name}" for p in (rep.grammar_path, rep.cnf_path, rep.dot_path)]
    lines += [f"  {path.name} ({size} examples)" for path, size in rep.sets.values()]
    lines += [f"warning: {w}" for w in rep.warnings]
    if trace:
        lines += ["trace:", trace.rstrip("\n")]
    rep.report_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    rep.seconds = time.perf_counter() - started
    return rep


@dataclass
class AuditEntry:
    file: str
    checked: int
    failures: list[tuple[str, ...]]

    @property
    def ok(self) -> bool:
        return not self.failures


def load_any_grammar(path) -> CnfGrammar:
    """CNF of a grammar file in either the four-class format or already in CNF."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return to_cnf(parse_grammar_text(text))
    except GrammarError as first:
        try:
            return parse_cnf_text(text)
        except GrammarError:
            raise first from None


def audit(out_dir) -> list[AuditEntry]:
    """Re-check every example file in a run directory against its CNF grammar."""
    out = Path(out_dir)
    cnf = load_cnf(out / CNF_FILE)
    entries = []
    for key, fname in SET_FILES.items():
        path = out / fname
        if not path.exists():
            continue
        es = read_example_set(path)
        want = es.kind == "positive"
        bad = []
        for word in es:
            try:
                member = cyk_parse(cnf, word)
            except UnknownTerminal:
                member = False
            if member != want:
                bad.append(word)
        entries.append(AuditEntry(fname, len(es), bad))
    return entries
