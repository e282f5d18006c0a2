"""Covering sums X_n and partition sums X_{n,k} by exhaustive word enumeration.

The walk is depth first and carries the column sums of the running product
``M_w`` (one O(d) update per tree edge, see
:func:`rauzy.core.generator_column_sums`). Each visited word contributes the
integer ``P = prod(column sums)``, so ``nu(M_w) = 1/P``. Nodes are tallied
into a histogram ``{(n, k, P): count}``; both exact and floating values are
derived from that histogram in sorted key order, which makes every result
independent of worker count and scheduling.

All "volumes" are relative to the standard simplex, i.e. they are ``nu``
values. The covering criterion X_n -> 0 is unaffected by that constant.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Union

from .core import (
    check_dimension,
    check_word,
    column_norms,
    generator_column_sums,
    nu,
    word_matrix,
)

DEFAULT_BUDGET = 3**13
DEFAULT_PREFIX_DEPTH = 4
VOLUME_UNITS = "relative to vol_{d-1} of the standard simplex"


class BudgetExceededError(RuntimeError):
    """The requested enumeration would visit more leaves than allowed."""


@dataclass(frozen=True)
class DeltaMode:
    """Exponent applied to volumes: exact unit exponent or a float in (0, 1]."""

    delta: float = 1.0
    exact: bool = False

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.exact and self.delta != 1:
            raise ValueError("exact mode is only defined for delta = 1")

    def power(self, x: Fraction, mult: int = 1):
        """``x ** (mult * delta)``; exact for the unit exponent."""
        if self.exact:
            return Fraction(x) ** mult
        return float(x) ** (mult * self.delta)

    def label(self) -> str:
        return "exact" if self.exact else repr(self.delta)


EXACT = DeltaMode(1.0, exact=True)

DeltaLike = Union[DeltaMode, float, int, None]


def as_mode(delta: DeltaLike) -> DeltaMode:
    """Coerce ``None``/``EXACT`` to exact mode and numbers to float mode."""
    if delta is None:
        return EXACT
    if isinstance(delta, DeltaMode):
        return delta
    return DeltaMode(float(delta))


@dataclass(frozen=True)
class XRecord:
    n: int
    k: int | None
    value: Union[Fraction, float]
    word_count: int


# -- word classification ------------------------------------------------------

CONSTANT = 0


def classify(w: Iterable[int]) -> int:
    """Return k if ``w`` lies in A_{n,k}, or ``CONSTANT`` (0) if all symbols agree."""
    w = tuple(w)
    if not w:
        raise ValueError("cannot classify the empty word")
    k = 1
    while k < len(w) and w[k] == w[0]:
        k += 1
    return CONSTANT if k == len(w) else k


# -- the walk -----------------------------------------------------------------


def _walk(d, cols, n, first, run, max_n, min_record, hist):
    """Tally every node of depth in [min_record, max_n] below the given state.

    ``run`` is the length of the leading block of equal symbols; the node's
    class is CONSTANT when ``run == n`` and ``run`` otherwise.
    """
    if n >= min_record:
        hist[(n, CONSTANT if run == n else run, math.prod(cols))] += 1
    if n == max_n:
        return
    for j in range(1, d + 1):
        child = generator_column_sums(cols, j)
        if n == 0:
            f, r = j, 1
        elif run == n and j == first:
            f, r = first, run + 1
        else:
            f, r = first, run
        _walk(d, child, n + 1, f, r, max_n, min_record, hist)


def _state_after(d, start_cols, prefix):
    cols, first, run = start_cols, 0, 0
    for n, j in enumerate(prefix):
        cols = generator_column_sums(cols, j)
        if n == 0:
            first, run = j, 1
        elif run == n and j == first:
            run += 1
    return cols, first, run


def _subtree_task(args):
    d, start_cols, prefix, max_n, min_record = args
    cols, first, run = _state_after(d, start_cols, prefix)
    hist: Counter = Counter()
    _walk(d, cols, len(prefix), first, run, max_n, max(min_record, len(prefix)), hist)
    return hist


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("RAUZY_THREADS", "1") or 1)
    return max(1, int(workers))


def histogram(
    d: int,
    max_n: int,
    *,
    min_record: int | None = None,
    start_word: Iterable[int] = (),
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
    prefix_depth: int = DEFAULT_PREFIX_DEPTH,
) -> Counter:
    """Histogram ``{(n, k, P): count}`` over all words of length ``min_record..max_n``.

    With ``start_word`` u, the walk enumerates the words ``u + i`` but
    ``n``/``k`` describe the suffix i alone. The split into subtrees happens at
    a fixed prefix depth regardless of ``workers``.
    """
    check_dimension(d)
    if max_n < 0:
        raise ValueError(f"n must be >= 0, got {max_n}")
    if d**max_n > budget:
        raise BudgetExceededError(
            f"{d}^{max_n} = {d**max_n} leaves exceeds the enumeration budget {budget}"
        )
    if min_record is None:
        min_record = max_n
    start_cols = column_norms(word_matrix(d, check_word(d, start_word)))
    p = min(prefix_depth, max_n)

    hist: Counter = Counter()
    # Shallow nodes are few; tally them directly.
    for n in range(min_record, p):
        for prefix in cartesian(range(1, d + 1), repeat=n):
            cols, first, run = _state_after(d, start_cols, prefix)
            hist[(n, CONSTANT if run == n else run, math.prod(cols))] += 1

    tasks = [
        (d, start_cols, prefix, max_n, min_record)
        for prefix in cartesian(range(1, d + 1), repeat=p)
    ]
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) == 1:
        parts = map(_subtree_task, tasks)
        for part in parts:
            hist.update(part)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_subtree_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))):
                hist.update(part)
    return hist


# -- reductions ---------------------------------------------------------------


def fraction_sum(terms: Iterable[Fraction]) -> Fraction:
    """Exact sum by balanced pairwise reduction (keeps intermediate sizes even)."""
    items = list(terms)
    if not items:
        return Fraction(0)
    while len(items) > 1:
        nxt = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return Fraction(items[0])


def reduce_counts(counts: dict[int, int], mode: DeltaMode):
    """Sum ``count * (1/P) ** delta`` over a ``{P: count}`` map, keys in sorted order."""
    keys = sorted(counts)
    if mode.exact:
        return fraction_sum(Fraction(counts[p], p) for p in keys)
    return math.fsum(counts[p] * (1 / p) ** mode.delta for p in keys)


def _select(hist: Counter, n: int, k: int | None) -> tuple[dict[int, int], int]:
    sel: Counter = Counter()
    words = 0
    for (hn, hk, p), c in hist.items():
        if hn == n and (k is None or hk == k):
            sel[p] += c
            words += c
    return sel, words


@dataclass(frozen=True)
class PartitionTable:
    """All X_n and X_{n,k} for n <= n_max, from a single walk."""

    d: int
    n_max: int
    mode: DeltaMode
    hist: Counter

    def x(self, n: int):
        return reduce_counts(_select(self.hist, n, None)[0], self.mode)

    def xk(self, n: int, k: int):
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
        return reduce_counts(_select(self.hist, n, k)[0], self.mode)

    def constant_part(self, n: int):
        return reduce_counts(_select(self.hist, n, CONSTANT)[0], self.mode)

    def word_count(self, n: int, k: int | None = None) -> int:
        return _select(self.hist, n, k)[1]


def partition_table(
    d: int,
    n_max: int,
    delta: DeltaLike = EXACT,
    *,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> PartitionTable:
    mode = as_mode(delta)
    hist = histogram(d, n_max, min_record=0, budget=budget, workers=workers)
    return PartitionTable(d, n_max, mode, hist)


def x_sum(d: int, n: int, delta: DeltaLike = EXACT, *, budget: int = DEFAULT_BUDGET, workers: int | None = None):
    """X_n = sum over words of length n of nu(M_w) ** delta."""
    mode = as_mode(delta)
    hist = histogram(d, n, budget=budget, workers=workers)
    return reduce_counts(_select(hist, n, None)[0], mode)


def x_partition_sum(
    d: int, n: int, k: int, delta: DeltaLike = EXACT, *, budget: int = DEFAULT_BUDGET, workers: int | None = None
):
    """X_{n,k}: the covering sum restricted to words whose first k symbols agree and the next differs."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    mode = as_mode(delta)
    hist = histogram(d, n, budget=budget, workers=workers)
    return reduce_counts(_select(hist, n, k)[0], mode)


def prefixed_sum(
    d: int, prefix: Iterable[int], n: int, delta: DeltaLike = EXACT, *, budget: int = DEFAULT_BUDGET, workers: int | None = None
):
    """Sum over |i| = n of nu(M_prefix M_i) ** delta."""
    mode = as_mode(delta)
    hist = histogram(d, n, start_word=prefix, budget=budget, workers=workers)
    return reduce_counts(_select(hist, n, None)[0], mode)


def remainder_closed_form(d: int, n: int) -> Fraction:
    """nu(M_1 M_2^n) = 2^(1-d) (2n+1)^(-1) (n+1)^(2-d)."""
    check_dimension(d)
    return Fraction(1, 2 ** (d - 1) * (2 * n + 1) * (n + 1) ** (d - 2))


def remainder_summands(d: int, n: int) -> list[tuple[int, int, Fraction]]:
    """``(omega, j, nu(M_omega M_j^n))`` for every ordered pair omega != j."""
    check_dimension(d)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return [
        (omega, j, nu(word_matrix(d, (omega,) + (j,) * n)))
        for j in range(1, d + 1)
        for omega in range(1, d + 1)
        if omega != j
    ]


def remainder_term(d: int, n: int, delta: DeltaLike = EXACT):
    """r_n by direct summation over the d(d-1) words (omega, j, ..., j)."""
    mode = as_mode(delta)
    terms = [mode.power(v) for _, _, v in remainder_summands(d, n)]
    return fraction_sum(terms) if mode.exact else math.fsum(terms)


def x_series(
    d: int, n_max: int, delta: DeltaLike = EXACT, *, budget: int = DEFAULT_BUDGET, workers: int | None = None
) -> list[XRecord]:
    """Rows of X_n (k=None) and X_{n,1} (k=1, for n >= 2) for n = 0..n_max."""
    table = partition_table(d, n_max, delta, budget=budget, workers=workers)
    rows = []
    for n in range(n_max + 1):
        rows.append(XRecord(n, None, table.x(n), table.word_count(n)))
        if n >= 2:
            rows.append(XRecord(n, 1, table.xk(n, 1), table.word_count(n, 1)))
    return rows
