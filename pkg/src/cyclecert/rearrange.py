"""Symbolic commutator rearrangement of matrix-product words.

A product word L over subsystem symbols that contains at least m factors A_p
can be rewritten as A_p^m * L1 + L2, where each L2 term swaps one adjacent
pair A_i A_p into the commutator symbol for (p, i).  The rewrite underpins
the word-norm stability criterion: the bound constant c is the maximum of
||product|| * e^(gamma*length) over all short admissible walk prefixes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import CycleSet
from .linalg import InvalidInputError, SwitchedFamily, commutator, spectral_norm


@dataclass(frozen=True)
class Sub:
    """Subsystem matrix symbol A_i."""

    i: int


@dataclass(frozen=True)
class Comm:
    """Commutator symbol A_p A_i - A_i A_p; needs i != p."""

    p: int
    i: int

    def __post_init__(self):
        if self.i == self.p:
            raise InvalidInputError("commutator symbol needs two distinct indices")


@dataclass(frozen=True)
class WordSum:
    """Signed sum of product words; terms are (sign, word) pairs."""

    terms: tuple

    def __post_init__(self):
        for sign, word in self.terms:
            if sign not in (-1, 1):
                raise InvalidInputError("term signs must be +1 or -1")
            tuple(word)


def parse_word(text: str) -> tuple:
    """Word from a whitespace-separated index list, leftmost symbol first."""
    try:
        indices = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise InvalidInputError(f"bad word serialization {text!r}") from exc
    if not indices or any(i < 1 for i in indices):
        raise InvalidInputError("word indices must be positive integers")
    return tuple(Sub(i) for i in indices)


def format_word(word) -> str:
    if any(not isinstance(s, Sub) for s in word):
        raise InvalidInputError("only plain product words serialize to index lists")
    return " ".join(str(s.i) for s in word)


def word_from_signal(signal) -> tuple:
    """Product word of a walk prefix: sigma(t-1)...sigma(0), leftmost first."""
    return tuple(Sub(int(i)) for i in reversed(tuple(signal)))


def rearrange(word, p: int, m: int) -> tuple[tuple, WordSum]:
    """Rewrite L == A_p^m * L1 + L2 by bubbling the leftmost m occurrences of
    A_p to the front, one adjacent transposition at a time.

    Every transposition across A_i emits one terminal correction term of sign
    -1 in which the swapped pair is replaced by the commutator symbol (p, i).
    """
    syms = list(word)
    if m < 1:
        raise InvalidInputError("m must be positive")
    if any(not isinstance(s, Sub) for s in syms):
        raise InvalidInputError("rearrange expects a plain product word")
    if sum(1 for s in syms if s.i == p) < m:
        raise InvalidInputError(f"word contains fewer than {m} factors with index {p}")
    corrections = []
    for k in range(m):
        j = next(idx for idx in range(k, len(syms)) if syms[idx].i == p)
        while j > k:
            left = syms[j - 1]
            corrections.append(
                (-1, tuple(syms[:j - 1]) + (Comm(p, left.i),) + tuple(syms[j + 1:])))
            syms[j - 1], syms[j] = syms[j], syms[j - 1]
            j -= 1
    return tuple(syms[m:]), WordSum(tuple(corrections))


def recombined(l1, l2: WordSum, p: int, m: int) -> WordSum:
    """A_p^m * L1 + L2 as a single word sum, for numeric verification."""
    head = (Sub(p),) * m + tuple(l1)
    return WordSum(((1, head),) + l2.terms)


def _symbol_matrix(sym, family: SwitchedFamily) -> np.ndarray:
    if isinstance(sym, Sub):
        return family.matrix(sym.i)
    if isinstance(sym, Comm):
        return commutator(family.matrix(sym.p), family.matrix(sym.i))
    raise InvalidInputError(f"unknown word symbol {sym!r}")


def evaluate_word(w, family: SwitchedFamily) -> np.ndarray:
    """Numeric value of a word or word sum; the empty word is the identity.

    Symbols multiply left to right in word order (the leftmost symbol is the
    leftmost matrix factor).
    """
    if isinstance(w, WordSum):
        total = np.zeros((family.d, family.d))
        for sign, word in w.terms:
            total = total + sign * evaluate_word(word, family)
        return total
    out = np.eye(family.d)
    for sym in w:
        out = out @ _symbol_matrix(sym, family)
    return out


def concatenation_prefixes(cycle_set: CycleSet, max_len: int) -> list:
    """Every vertex sequence of length <= max_len that prefixes some
    concatenation of the set's cycles, sorted by (length, sequence)."""
    if max_len < 0:
        raise InvalidInputError("max_len must be nonnegative")
    prefixes = {()}
    complete = {()}
    while complete:
        extended = set()
        for seq in complete:
            for cyc in cycle_set.cycles:
                ext = seq + cyc
                for ln in range(len(seq) + 1, min(len(ext), max_len) + 1):
                    prefixes.add(ext[:ln])
                if len(ext) < max_len:
                    extended.add(ext)
        complete = extended
    return sorted(prefixes, key=lambda s: (len(s), s))


def prefix_product(family: SwitchedFamily, signal) -> np.ndarray:
    """Matrix product A_sigma(t-1) ... A_sigma(0) for a walk prefix."""
    out = np.eye(family.d)
    for i in signal:
        out = family.matrix(int(i)) @ out
    return out


def basis_constant(family: SwitchedFamily, cycle_set: CycleSet, gamma: float,
                   max_len: int) -> float:
    """Induction-basis constant: max of ||product|| * e^(gamma*length) over
    admissible walk prefixes up to max_len, floored at 1."""
    c = 1.0
    for seq in concatenation_prefixes(cycle_set, max_len):
        c = max(c, spectral_norm(prefix_product(family, seq))
                * math.exp(gamma * len(seq)))
    return c


def word_norm_margin(word, family: SwitchedFamily, gamma: float,
                     c: float) -> float:
    """Slack of ||word|| <= c * e^(-gamma * |word|); negative means violated."""
    return c * math.exp(-gamma * len(word)) - spectral_norm(
        evaluate_word(word, family))
