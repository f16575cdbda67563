"""ED-critical Lagrange system of the 3 x 3 symmetroid {det X = 0}.

Coordinates on Sym^2(C^3) are fixed once as

    (x1, x2, x3, x4, x5, x6) = (x11, x12, x13, x22, x23, x33)

so that X = [[x1, x2, x3], [x2, x4, x5], [x3, x5, x6]].  The seventh unknown is
the multiplier lambda.  Every gram matrix below is written in this order.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import factorial, prod
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .polysys import PolySystem, constant, monomial, poly_add, poly_mul, poly_scale

COORDS = ("x11", "x12", "x13", "x22", "x23", "x33")
VARIABLES = COORDS + ("lambda",)
_INDEX = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}
INVERTIBILITY_RTOL = 1e-8


def sym_index(i: int, j: int) -> int:
    return _INDEX[(min(i, j), max(i, j))]


def to_matrix(x: Sequence) -> np.ndarray:
    x = np.asarray(x)
    return np.array(
        [[x[0], x[1], x[2]], [x[1], x[3], x[4]], [x[2], x[4], x[5]]], dtype=x.dtype
    )


def det3(x) -> complex:
    x1, x2, x3, x4, x5, x6 = (x[k] for k in range(6))
    return x1 * x4 * x6 - x1 * x5**2 - x2**2 * x6 + 2 * x2 * x3 * x5 - x3**2 * x4


def grad_det3(x) -> np.ndarray:
    """Gradient of det in the six coordinates (off-diagonal entries count twice)."""
    x1, x2, x3, x4, x5, x6 = (x[k] for k in range(6))
    return np.array(
        [
            x4 * x6 - x5**2,
            2 * (x3 * x5 - x2 * x6),
            2 * (x2 * x5 - x3 * x4),
            x1 * x6 - x3**2,
            2 * (x2 * x3 - x1 * x5),
            x1 * x4 - x2**2,
        ]
    )


# --- metrics ---------------------------------------------------------------


@dataclass
class MetricSpec:
    kind: str
    gram: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        if g.shape != (6, 6):
            raise ValueError("gram must be 6 x 6")
        if not np.array_equal(g, g.T):
            raise ValueError("gram must be symmetric")
        sv = np.linalg.svd(g, compute_uv=False)
        if sv[-1] < INVERTIBILITY_RTOL * sv[0]:
            raise ValueError("degenerate metric (gram is numerically singular)")
        self.gram = g

    def quadratic_form(self, v) -> float:
        v = np.asarray(v)
        return v @ self.gram @ v

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **self.params}
        if self.kind == "explicit":
            d["gram"] = self.gram.tolist()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "MetricSpec":
        kind = d["kind"]
        if kind == "bombieriWeyl":
            return bw_metric()
        if kind == "genericRandom":
            return random_metric(int(d["seed"]))
        if kind == "diagonal":
            return diag_family_metric(d["a"])
        if kind == "explicit":
            return cls("explicit", np.array(d["gram"], dtype=float))
        raise ValueError(f"unknown metric kind {kind!r}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "MetricSpec":
        """CLI syntax: ``bw``, ``random``, ``identity``, ``diag:a1,...,a6``
        or ``file:<path>`` (a JSON object as produced by :meth:`to_dict`)."""
        if text == "bw":
            return bw_metric()
        if text == "random":
            return random_metric(seed)
        if text == "identity":
            return diag_family_metric([1.0] * 6)
        if text.startswith("diag:"):
            return diag_family_metric([float(a) for a in text[5:].split(",")])
        if text.startswith("file:"):
            return cls.from_dict(json.loads(Path(text[5:]).read_text()))
        raise ValueError(f"unrecognized metric spec {text!r}")


def bw_gram() -> np.ndarray:
    """Bombieri-Weyl gram: 1 on diagonal entries x_ii, 2 on x_ij (i < j)."""
    return np.diag([1.0, 2.0, 2.0, 1.0, 2.0, 1.0])


def bw_metric() -> MetricSpec:
    return MetricSpec("bombieriWeyl", bw_gram())


def random_metric(seed: int, max_tries: int = 100) -> MetricSpec:
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        r = rng.uniform(-1.0, 1.0, size=(6, 6))
        g = np.triu(r) + np.triu(r, 1).T
        try:
            return MetricSpec("genericRandom", g, {"seed": int(seed)})
        except ValueError:
            continue
    raise RuntimeError(f"no invertible random metric after {max_tries} draws")


def diag_family_metric(a: Sequence[float]) -> MetricSpec:
    a = [float(x) for x in a]
    if len(a) != 6:
        raise ValueError("need six diagonal weights")
    if any(x <= 0 for x in a):
        raise ValueError("diagonal weights must be positive")
    return MetricSpec("diagonal", np.diag(a), {"a": a})


# --- targets ---------------------------------------------------------------


@dataclass
class TargetPoint:
    u: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex)
        if self.u.shape != (6,):
            raise ValueError("target must have six coordinates")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("target has non-finite entries")

    @property
    def on_variety(self) -> bool:
        scale = 1.0 + np.max(np.abs(self.u)) ** 3
        return abs(det3(self.u)) < 1e-10 * scale

    def to_dict(self) -> dict:
        return {"re": self.u.real.tolist(), "im": self.u.imag.tolist(), "seed": self.seed}


def random_target(seed: int) -> TargetPoint:
    rng = np.random.default_rng(seed)
    re, im = rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6)
    return TargetPoint(re + 1j * im, seed)


# --- the system ------------------------------------------------------------


def _det_poly(nv: int = 7) -> dict:
    m = lambda powers, c=1: monomial(nv, powers, c)  # noqa: E731
    return poly_add(
        m({0: 1, 3: 1, 5: 1}),
        m({0: 1, 4: 2}, -1),
        m({1: 2, 5: 1}, -1),
        m({1: 1, 2: 1, 4: 1}, 2),
        m({2: 2, 3: 1}, -1),
    )


@dataclass
class LagrangeSystem:
    metric: MetricSpec
    target: TargetPoint
    system: PolySystem

    variables = VARIABLES

    @property
    def degrees(self) -> list:
        return self.system.degrees

    def evaluate(self, z) -> np.ndarray:
        return self.system.evaluate(z)

    def jacobian(self, z) -> np.ndarray:
        return self.system.jacobian(z)

    def bezout_number(self) -> int:
        return prod(self.degrees)


def build_system(metric: MetricSpec, u: TargetPoint) -> LagrangeSystem:
    """Equations: det X = 0 and ``gram (x - u) - lambda grad det(X) = 0``."""
    if u.on_variety:
        warnings.warn("target point lies on the determinantal hypersurface", RuntimeWarning)
    nv = 7
    det = _det_poly(nv)
    lam = monomial(nv, {6: 1})
    grads = [
        {e[:v] + (e[v] - 1,) + e[v + 1:]: c * e[v] for e, c in det.items() if e[v] > 0}
        for v in range(6)
    ]
    qu = metric.gram @ u.u
    eqs = [det]
    for r in range(6):
        row = [monomial(nv, {k: 1}, metric.gram[r, k]) for k in range(6) if metric.gram[r, k] != 0]
        eqs.append(
            poly_add(*row, constant(nv, -qu[r]), poly_scale(poly_mul(lam, grads[r]), -1))
        )
    return LagrangeSystem(metric, u, PolySystem(eqs, nv, list(VARIABLES)))


# --- Bombieri-Weyl product on symmetric tensors ----------------------------


def multinomial(alpha: Sequence[int]) -> int:
    out = factorial(sum(alpha))
    for a in alpha:
        out //= factorial(a)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for k in range(total, -1, -1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


@dataclass
class SymTensor:
    """``f = sum binom(d, alpha) f_alpha e^alpha``; stores the ``f_alpha``."""

    degree: int
    dimension: int
    coefficients: dict

    def __post_init__(self):
        for alpha in self.coefficients:
            if len(alpha) != self.dimension or sum(alpha) != self.degree:
                raise ValueError(f"bad multi-index {alpha}")

    @staticmethod
    def num_coefficients(dimension: int, degree: int) -> int:
        from math import comb

        return comb(dimension + degree - 1, degree)

    @classmethod
    def from_polynomial(cls, degree: int, dimension: int, coeffs: Mapping[tuple, float]) -> "SymTensor":
        """From ordinary monomial coefficients ``c_alpha = binom(d, alpha) f_alpha``."""
        return cls(degree, dimension, {a: c / multinomial(a) for a, c in coeffs.items()})

    @classmethod
    def power_of_linear_form(cls, v: Sequence[float], degree: int) -> "SymTensor":
        """Coefficients of ``v^d`` in this normalization are ``f_alpha = v^alpha``."""
        v = list(v)
        coeffs = {
            alpha: prod(x**a for x, a in zip(v, alpha))
            for alpha in _compositions(degree, len(v))
        }
        return cls(degree, len(v), coeffs)


def bw_product(f: SymTensor, g: SymTensor) -> float:
    if (f.degree, f.dimension) != (g.degree, g.dimension):
        raise ValueError("Bombieri-Weyl product needs tensors of equal degree and dimension")
    return sum(
        multinomial(alpha) * c * g.coefficients[alpha]
        for alpha, c in f.coefficients.items()
        if alpha in g.coefficients
    )
