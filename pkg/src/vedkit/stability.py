"""Empirical test of stable polynomiality of n -> vED(n).

Exact forward differences on a fit window pick a candidate degree; the
polynomial interpolated through the window then has to reproduce held-out
values exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .exactcore import NOT_STABILIZED, Rat, forward_diff_order, interpolate, poly_eval
from . import grassloc


@dataclass
class VedTable:
    entries: dict  # n -> (ved, degs)

    def __post_init__(self):
        ns = sorted(self.entries)
        if not ns:
            raise ValueError("empty table")
        if ns != list(range(ns[0], ns[-1] + 1)):
            raise ValueError("table range must be contiguous")
        if any(v[0] <= 0 for v in self.entries.values()):
            raise ValueError("vED values must be positive")
        self.entries = {n: self.entries[n] for n in ns}

    @property
    def nMin(self) -> int:
        return min(self.entries)

    @property
    def nMax(self) -> int:
        return max(self.entries)

    def value(self, n: int) -> int:
        return self.entries[n][0]

    @classmethod
    def from_values(cls, values: Mapping[int, int]) -> "VedTable":
        return cls({n: (v, []) for n, v in values.items()})

    def rows(self) -> list:
        return [(n, v) for n, (v, _) in self.entries.items()]


@dataclass
class FitReport:
    detectedDegree: object
    coefficients: list
    fitWindow: tuple
    holdout: list = field(default_factory=list)

    @property
    def stable(self) -> bool:
        if self.detectedDegree is NOT_STABILIZED or not self.holdout:
            return False
        return all(match for *_, match in self.holdout)

    def to_dict(self) -> dict:
        return {
            "detectedDegree": (
                str(NOT_STABILIZED) if self.detectedDegree is NOT_STABILIZED else self.detectedDegree
            ),
            "coefficients": [str(c) for c in self.coefficients],
            "fitWindow": list(self.fitWindow),
            "holdout": [
                {"n": n, "predicted": str(p), "actual": a, "match": ok}
                for n, p, a, ok in self.holdout
            ],
            "stable": self.stable,
        }


def ved_table(nMin: int, nMax: int, compute: Optional[Callable[[int], tuple]] = None) -> VedTable:
    """Tabulate vED over ``nMin..nMax``.

    ``compute(n)`` must return ``(ved, degs)``; the default runs the
    localization engine, and callers can pass a cache-backed function.
    """
    if nMin < 3:
        raise ValueError("nMin must be >= 3")
    if nMin > nMax:
        raise ValueError(f"empty range {nMin}..{nMax}")
    if compute is None:
        def compute(n):
            r = grassloc.ved(n)
            return r.ved, r.degs
    return VedTable({n: tuple(compute(n)) for n in range(nMin, nMax + 1)})


def fit_and_validate(table: VedTable, window: tuple, holdoutCount: int) -> FitReport:
    a, b = window
    if not (table.nMin <= a < b <= table.nMax):
        raise ValueError(f"window {window} outside table range {table.nMin}..{table.nMax}")
    if b + holdoutCount > table.nMax:
        raise ValueError(f"table has fewer than {holdoutCount} entries above the window")
    xs = list(range(a, b + 1))
    ys = [table.value(n) for n in xs]
    degree = forward_diff_order(ys)
    if degree is NOT_STABILIZED:
        return FitReport(NOT_STABILIZED, [], (a, b), [])
    if degree + 1 > len(xs):
        raise ValueError("window insufficient")
    # use the tail of the window: that is where stabilization shows first
    pts = list(zip(xs, ys))[-(degree + 1):]
    coeffs = interpolate(pts)[: degree + 1]
    holdout = []
    for n in range(b + 1, b + holdoutCount + 1):
        pred = poly_eval(coeffs, n)
        actual = table.value(n)
        holdout.append((n, pred, actual, pred == Rat(actual)))
    return FitReport(degree, coeffs, (a, b), holdout)


def earliest_stable_window(table: VedTable, width: int, holdoutCount: int) -> Optional[FitReport]:
    """Slide a window of ``width`` points upward; return the first stable fit."""
    for a in range(table.nMin, table.nMax - holdoutCount - width + 2):
        rep = fit_and_validate(table, (a, a + width - 1), holdoutCount)
        if rep.stable:
            return rep
    return None
