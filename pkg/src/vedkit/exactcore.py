"""Exact rational substrate: elementary symmetric functions, truncated power
series, Lagrange interpolation and finite-difference degree detection.

Rationals are :class:`fractions.Fraction`, which is always kept in lowest
terms with a positive denominator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Fraction
Number = Union[int, Fraction]


class NotStabilized:
    """Sentinel returned when no constant difference order is found."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_STABILIZED"

    def __str__(self) -> str:
        return "not stabilized"

    def __reduce__(self):
        return (NotStabilized, ())


NOT_STABILIZED = NotStabilized()


def elem_sym_all(roots: Iterable[Number]) -> list:
    """Return ``[e_0, e_1, ..., e_k]`` of the given roots.

    Works on ints or Fractions; the type of the output follows the input.
    """
    coeffs = [1]
    for r in roots:
        nxt = coeffs + [0]
        for a in range(len(coeffs), 0, -1):
            nxt[a] += r * coeffs[a - 1]
        coeffs = nxt
    return coeffs


def elem_sym(roots: Sequence[Number], a: int) -> Rat:
    """a-th elementary symmetric polynomial of ``roots``."""
    if a < 0:
        raise ValueError("a must be non-negative")
    if a > len(roots):
        return Rat(0)
    return Rat(elem_sym_all(roots)[a])


@dataclass(frozen=True)
class TruncSeries:
    """Power series modulo ``x**(order + 1)`` with dense rational coefficients."""

    coefficients: tuple

    def __init__(self, coefficients: Iterable[Number], order: int | None = None):
        coeffs = [Rat(c) for c in coefficients]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        coeffs = (coeffs + [Rat(0)] * (order + 1))[: order + 1]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> Rat:
        return self.coefficients[k]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        order = min(self.order, other.order)
        a, b = self.coefficients, other.coefficients
        out = [sum((a[i] * b[k - i] for i in range(k + 1)), Rat(0)) for k in range(order + 1)]
        return TruncSeries(out, order)

    def tolist(self) -> list:
        return list(self.coefficients)


def series_inverse(c: TruncSeries) -> TruncSeries:
    """Return ``s`` with ``c * s == 1`` modulo ``x**(order + 1)``."""
    c0 = c.coefficients[0]
    if c0 == 0:
        raise ZeroDivisionError("non-invertible series")
    coeffs = c.coefficients
    s = [Rat(1) / c0]
    for k in range(1, c.order + 1):
        acc = sum((coeffs[i] * s[k - i] for i in range(1, k + 1)), Rat(0))
        s.append(-acc / c0)
    return TruncSeries(s, c.order)


def interpolate(points: Sequence[tuple]) -> list:
    """Coefficients (ascending) of the unique polynomial of degree
    ``< len(points)`` through ``points``, via Newton divided differences.
    """
    if not points:
        raise ValueError("need at least one point")
    xs = [Rat(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate abscissae")
    table = [Rat(y) for _, y in points]
    n = len(xs)
    newton = [table[0]]
    for level in range(1, n):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i]) for i in range(n - level)
        ]
        newton.append(table[0])
    # expand the Newton form into monomial coefficients
    coeffs = [Rat(0)] * n
    for k in range(n - 1, -1, -1):
        # coeffs <- coeffs * (x - xs[k]) + newton[k]
        shifted = [Rat(0)] + coeffs[:-1]
        coeffs = [shifted[i] - xs[k] * coeffs[i] for i in range(n)]
        coeffs[0] += newton[k]
    return coeffs


def poly_eval(coeffs: Sequence[Number], x: Number) -> Rat:
    acc = Rat(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def forward_differences(values: Sequence[Number]) -> list:
    v = [Rat(x) for x in values]
    return [v[i + 1] - v[i] for i in range(len(v) - 1)]


def forward_diff_order(values: Sequence[Number]):
    """Smallest ``d`` whose d-th forward differences are all equal.

    Only orders leaving at least two differences are examined, so a match is
    never vacuous. Returns :data:`NOT_STABILIZED` otherwise.
    """
    if len(values) < 2:
        raise ValueError("need at least two values")
    row = [Rat(x) for x in values]
    for d in range(len(values) - 1):
        if all(x == row[0] for x in row):
            return d
        row = forward_differences(row)
    return NOT_STABILIZED
