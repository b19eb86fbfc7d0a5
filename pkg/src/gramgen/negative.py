"""Negative example sets: rejection-sampled random strings and edit-distance mutations."""

from __future__ import annotations

from typing import Sequence

from .cnf import CnfGrammar, cyk_parse
from .errors import DomainError, Exhausted
from .exampleset import ExampleSet

ATTEMPTS_PER_EXAMPLE = 1000


def levenshtein_distance(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two token sequences (strings count per character)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _check_count(count):
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")


def random_negatives(
    c: CnfGrammar,
    count: int,
    min_len: int,
    max_len: int,
    rng,
    attempts_per_example: int = ATTEMPTS_PER_EXAMPLE,
    name: str = "grammar",
    seed: int | None = None,
) -> ExampleSet:
    """``count`` distinct strings of uniform length in [min_len, max_len] that the grammar rejects."""
    _check_count(count)
    if min_len < 1 or max_len < min_len:
        raise DomainError(f"need 1 <= min_len <= max_len, got {min_len}..{max_len}")
    if not c.terminals:
        raise DomainError("the grammar has no terminals")
    sigma = c.terminals
    out = ExampleSet("negative", "random", grammar=name, seed=seed)
    for _ in range(attempts_per_example * count):
        n = rng.randint(min_len, max_len)
        word = tuple(rng.choice(sigma) for _ in range(n))
        if word not in out and not cyk_parse(c, word):
            out.add(word)
            if len(out) == count:
                return out
    raise Exhausted(f"only {len(out)} of {count} random negatives found", partial=out)


def mutate(word: tuple, edits: int, sigma: Sequence[str], rng) -> tuple:
    """Apply ``edits`` random insertions, deletions or substitutions."""
    w = list(word)
    for _ in range(edits):
        ops = ["insert"]
        if w:
            ops.append("delete")
            if len(sigma) > 1:
                ops.append("substitute")
        op = rng.choice(ops)
        if op == "insert":
            w.insert(rng.randint(0, len(w)), rng.choice(sigma))
        elif op == "delete":
            del w[rng.randrange(len(w))]
        else:
            i = rng.randrange(len(w))
            w[i] = rng.choice([s for s in sigma if s != w[i]])
    return tuple(w)


def levenshtein_negatives(
    c: CnfGrammar,
    positives,
    count: int,
    distance: int,
    rng,
    attempts_per_example: int = ATTEMPTS_PER_EXAMPLE,
    name: str = "grammar",
    seed: int | None = None,
) -> ExampleSet:
    """Rejected strings at exactly ``distance`` edits from a uniformly chosen positive source."""
    _check_count(count)
    if not isinstance(distance, int) or distance < 1:
        raise DomainError(f"distance must be at least 1, got {distance!r}")
    sources = [tuple(w) for w in positives]
    if not sources:
        raise DomainError("no positive examples to mutate")
    sigma = c.terminals
    out = ExampleSet("negative", "levenshtein", grammar=name, seed=seed, distance=distance)
    for _ in range(attempts_per_example * count):
        source = rng.choice(sources)
        word = mutate(source, distance, sigma, rng)
        if not word or word in out:
            continue
        if levenshtein_distance(source, word) != distance or cyk_parse(c, word):
            continue
        out.add(word, source=source)
        if len(out) == count:
            return out
    raise Exhausted(f"only {len(out)} of {count} edit-distance negatives found", partial=out)
