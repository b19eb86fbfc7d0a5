"""Labelled example sets and their one-example-per-line file format."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import FormatError

KINDS = ("positive", "negative")
METHODS = ("optimal", "uniform", "random", "levenshtein")


@dataclass
class ExampleSet:
    """Distinct terminal strings (token tuples) in first-seen order, plus generation metadata.

    ``sources`` (Levenshtein negatives) and ``witnesses`` (optimal positives)
    run parallel to ``examples`` when present; they live in memory only.
    """

    kind: str
    method: str
    examples: list[tuple[str, ...]] = field(default_factory=list)
    grammar: str = "grammar"
    seed: int | None = None
    distance: int | None = None
    sources: list[tuple[str, ...]] | None = None
    witnesses: list | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        unique = list(dict.fromkeys(tuple(e) for e in self.examples))
        if len(unique) != len(self.examples) and (self.sources or self.witnesses):
            raise ValueError("duplicate examples cannot carry per-example metadata")
        self.examples = unique
        self._seen = set(unique)

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __contains__(self, word):
        return tuple(word) in self._seen

    def add(self, word: Iterable[str], source=None, witness=None) -> bool:
        """Append ``word`` unless already present; returns whether it was added."""
        word = tuple(word)
        if word in self._seen:
            return False
        self._seen.add(word)
        self.examples.append(word)
        if source is not None:
            if self.sources is None:
                self.sources = []
            self.sources.append(tuple(source))
        if witness is not None:
            if self.witnesses is None:
                self.witnesses = []
            self.witnesses.append(witness)
        return True


def format_example_set(es: ExampleSet) -> str:
    lines = [f"# grammar: {es.grammar}", f"# kind: {es.kind}", f"# method: {es.method}"]
    if es.seed is not None:
        lines.append(f"# seed: {es.seed}")
    if es.distance is not None:
        lines.append(f"# distance: {es.distance}")
    lines.extend(" ".join(word) for word in es.examples)
    return "\n".join(lines) + "\n"


def parse_example_set(text: str) -> ExampleSet:
    headers = {}
    words = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                headers[key.strip()] = value.strip()
            continue
        words.append(tuple(line.split()))
    for key in ("kind", "method"):
        if key not in headers:
            raise FormatError(f"missing '# {key}:' header")
    try:
        seed = int(headers["seed"]) if "seed" in headers else None
        distance = int(headers["distance"]) if "distance" in headers else None
    except ValueError as exc:
        raise FormatError(f"bad numeric header: {exc}") from None
    return ExampleSet(
        headers["kind"],
        headers["method"],
        words,
        grammar=headers.get("grammar", "grammar"),
        seed=seed,
        distance=distance,
    )


def write_example_set(es: ExampleSet, path) -> None:
    Path(path).write_text(format_example_set(es), encoding="utf-8")


def read_example_set(path) -> ExampleSet:
    return parse_example_set(Path(path).read_text(encoding="utf-8"))
