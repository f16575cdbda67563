"""Sparse complex polynomial systems with batched evaluation.

A polynomial is a mapping ``exponent tuple -> complex coefficient``.  Systems
are compiled once into flat term tables so that values and Jacobians at many
points are computed with a handful of numpy operations.  Every reduction runs
row by row, so the value at a point does not depend on which other points
share the batch.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

Poly = Mapping[tuple, complex]


def poly_degree(p: Poly) -> int:
    return max((sum(e) for e, c in p.items() if c != 0), default=0)


def poly_add(*polys: Poly) -> dict:
    out: dict = {}
    for p in polys:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def poly_scale(p: Poly, s: complex) -> dict:
    return {e: s * c for e, c in p.items() if s * c != 0}


def poly_mul(p: Poly, q: Poly) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def poly_diff(p: Poly, v: int) -> dict:
    out = {}
    for e, c in p.items():
        if e[v] > 0:
            e2 = e[:v] + (e[v] - 1,) + e[v + 1:]
            out[e2] = out.get(e2, 0) + c * e[v]
    return out


def monomial(nvars: int, powers: Mapping[int, int], coeff: complex = 1) -> dict:
    e = [0] * nvars
    for v, k in powers.items():
        e[v] += k
    return {tuple(e): coeff}


def constant(nvars: int, c: complex) -> dict:
    return {(0,) * nvars: c} if c != 0 else {}


class _TermTable:
    """Flattened terms grouped by output row (rows may be empty)."""

    def __init__(self, rows: Sequence[Poly], nvars: int):
        exps, coefs, starts = [], [], []
        for p in rows:
            starts.append(len(coefs))
            items = sorted(p.items()) or [((0,) * nvars, 0.0)]
            for e, c in items:
                exps.append(e)
                coefs.append(complex(c))
        self.exps = np.array(exps, dtype=np.int64).reshape(-1, nvars)
        self.coefs = np.array(coefs, dtype=complex)
        self.starts = np.array(starts, dtype=np.int64)
        self.maxdeg = int(self.exps.max()) if self.exps.size else 0
        self.nrows = len(rows)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        """``X`` has shape (P, nvars); returns (P, nrows)."""
        P, nv = X.shape
        pw = np.ones((nv, self.maxdeg + 1, P), dtype=complex)
        for k in range(1, self.maxdeg + 1):
            pw[:, k, :] = pw[:, k - 1, :] * X.T
        M = np.broadcast_to(self.coefs[:, None], (len(self.coefs), P)).copy()
        for v in range(nv):
            M *= pw[v, self.exps[:, v], :]
        return np.add.reduceat(M, self.starts, axis=0).T


class PolySystem:
    """Square or rectangular system of sparse polynomials."""

    def __init__(self, polys: Sequence[Poly], nvars: int, names: Sequence[str] | None = None):
        self.polys = [dict(p) for p in polys]
        self.nvars = nvars
        for p in self.polys:
            for e in p:
                if len(e) != nvars:
                    raise ValueError("exponent length does not match nvars")
        self.names = list(names) if names is not None else [f"x{k + 1}" for k in range(nvars)]
        self._values = None
        self._jac = None
        self._abs = None

    def __len__(self) -> int:
        return len(self.polys)

    @property
    def degrees(self) -> list:
        return [poly_degree(p) for p in self.polys]

    def _compile(self):
        if self._values is None:
            self._values = _TermTable(self.polys, self.nvars)
            rows = [poly_diff(p, v) for p in self.polys for v in range(self.nvars)]
            self._jac = _TermTable(rows, self.nvars)

    def evaluate(self, X) -> np.ndarray:
        """Values at one point (shape (nvars,)) or a batch (shape (P, nvars))."""
        self._compile()
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            return self._values(X[None, :])[0]
        return self._values(X)

    def term_scale(self, X) -> np.ndarray:
        """``sum |c| |x|^e`` per equation: the size a rounding error is measured against."""
        if self._abs is None:
            self._abs = _TermTable([{e: abs(c) for e, c in p.items()} for p in self.polys], self.nvars)
        X = np.abs(np.asarray(X, dtype=complex)).astype(complex)
        if X.ndim == 1:
            return self._abs(X[None, :])[0].real
        return self._abs(X).real

    def relative_residual(self, x) -> float:
        """Largest componentwise backward error ``|f_i(x)| / sum |c| |x|^e``."""
        num = np.abs(self.evaluate(x))
        den = self.term_scale(x)
        return float(np.max(num / np.where(den > 0, den, 1.0)))

    def jacobian(self, X) -> np.ndarray:
        self._compile()
        X = np.asarray(X, dtype=complex)
        single = X.ndim == 1
        Xb = X[None, :] if single else X
        J = self._jac(Xb).reshape(Xb.shape[0], len(self.polys), self.nvars)
        return J[0] if single else J

    def homogenize(self) -> "PolySystem":
        """Homogenize each equation to its own degree; the new variable is first."""
        out = []
        for p, d in zip(self.polys, self.degrees):
            out.append({(d - sum(e),) + e: c for e, c in p.items()})
        return PolySystem(out, self.nvars + 1, ["x0"] + self.names)

    def __repr__(self) -> str:
        return f"PolySystem({len(self)} equations, {self.nvars} variables, degrees={self.degrees})"
