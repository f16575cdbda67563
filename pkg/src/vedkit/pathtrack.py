"""Homotopy continuation for square polynomial systems.

``H(x, t) = (1 - t) G(x) + gamma t F(x)`` is followed from t = 0 to t = 1.
Paths are tracked in projective space: both systems are homogenized with an
extra coordinate x0 and a random complex affine chart ``a . X = 1`` is added,
so paths heading to solutions at infinity stay bounded (x0 -> 0) instead of
blowing up.  All paths in a batch advance together, each with its own t and
step size; a path's arithmetic never mixes with another path's, so splitting
the batch across threads does not change any result.

Endpoints are judged by componentwise backward error, not by the raw value of
F, so large solutions are not penalized for roundoff.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .edlagrange import LagrangeSystem, MetricSpec, TargetPoint, build_system
from .polysys import PolySystem, constant, monomial, poly_add


@dataclass(frozen=True)
class TrackerConfig:
    initialStep: float = 0.05
    minStep: float = 1e-7
    newtonTol: float = 1e-11
    maxNewtonIters: int = 5
    divergenceNorm: float = 1e8
    endgameStart: float = 0.95
    singularCondThreshold: float = 1e12
    dedupeTol: float = 1e-6
    maxSteps: int = 20000
    # once the step is below floorStep, a stalled Newton correction under
    # trackingFloorTol (relative) is taken as the attainable precision there
    trackingFloorTol: float = 1e-8
    floorStep: float = 1e-4
    # paths that underflow within this distance of t = 1 get a Newton polish at t = 1
    endpointPolishWindow: float = 1e-5

    def __post_init__(self):
        for name in ("initialStep", "minStep", "newtonTol", "maxNewtonIters", "divergenceNorm",
                     "singularCondThreshold", "dedupeTol", "maxSteps", "trackingFloorTol",
                     "floorStep", "endpointPolishWindow"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.minStep < self.initialStep:
            raise ValueError("minStep must be smaller than initialStep")
        if self.trackingFloorTol < self.newtonTol:
            raise ValueError("trackingFloorTol must not be below newtonTol")
        if not 0 < self.endgameStart < 1:
            raise ValueError("endgameStart must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class PathStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    SINGULAR = "singularEndpoint"
    STEP_FAILURE = "stepFailure"


@dataclass
class PathResult:
    status: PathStatus
    endpoint: np.ndarray
    residual: float  # componentwise backward error, see PolySystem.relative_residual
    conditionEstimate: float
    stepsTaken: int
    t: float = 1.0


@dataclass
class SolutionSet:
    solutions: list
    pathsTracked: int
    seeds: dict = field(default_factory=dict)
    statusCounts: dict = field(default_factory=dict)
    residuals: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.solutions)

    def to_dict(self, digits: int = 10) -> dict:
        return {
            "count": self.count,
            "pathsTracked": self.pathsTracked,
            "statusCounts": dict(self.statusCounts),
            "seeds": dict(self.seeds),
            "maxResidual": max(self.residuals, default=0.0),
            "solutions": [
                [[round(z.real, digits), round(z.imag, digits)] for z in s] for s in self.solutions
            ],
        }


@dataclass
class Homotopy:
    G: PolySystem
    F: PolySystem
    gamma: complex = 1.0

    def __post_init__(self):
        if len(self.G) != len(self.F) or self.G.nvars != self.F.nvars:
            raise ValueError("start and target systems must share equations and variables")
        if len(self.F) != self.F.nvars:
            raise ValueError("only square systems are supported")

    def evaluate(self, x, t: float) -> np.ndarray:
        return (1 - t) * self.G.evaluate(x) + self.gamma * t * self.F.evaluate(x)


def random_gamma(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.uniform()))


def total_degree_start(degrees: Sequence[int], seed: int):
    """Start system ``x_i^{d_i} - r_i`` with random unit-modulus ``r_i``, and
    all of its prod(d_i) solutions."""
    if any(d < 1 for d in degrees):
        raise ValueError("degrees must be >= 1")
    rng = np.random.default_rng(seed)
    n = len(degrees)
    r = np.exp(2j * np.pi * rng.uniform(size=n))
    polys = [
        poly_add(monomial(n, {i: d}), constant(n, -r[i])) for i, d in enumerate(degrees)
    ]
    roots = [
        np.exp((1j * np.angle(r[i]) + 2j * np.pi * np.arange(d)) / d) for i, d in enumerate(degrees)
    ]
    starts = np.array(list(itertools.product(*roots)), dtype=complex).reshape(-1, n)
    return PolySystem(polys, n), starts


# --- batched projective tracker --------------------------------------------

_RUNNING, _DONE, _FAILED = 0, 1, 2


class _ProjectiveHomotopy:
    def __init__(self, h: Homotopy, patch: np.ndarray):
        self.Gh = h.G.homogenize()
        self.Fh = h.F.homogenize()
        self.gamma = h.gamma
        self.patch = patch
        self.n = h.F.nvars + 1

    def values(self, X, t):
        g, f = self.Gh.evaluate(X), self.Fh.evaluate(X)
        tt = t[:, None]
        H = (1 - tt) * g + self.gamma * tt * f
        chart = (X * self.patch).sum(axis=1) - 1.0
        return np.concatenate([H, chart[:, None]], axis=1), self.gamma * f - g

    def jac(self, X, t):
        Jg, Jf = self.Gh.jacobian(X), self.Fh.jacobian(X)
        tt = t[:, None, None]
        J = (1 - tt) * Jg + self.gamma * tt * Jf
        row = np.broadcast_to(self.patch, (X.shape[0], 1, self.n))
        return np.concatenate([J, row], axis=1)


def _solve(J, b):
    """Batched solve; singular systems give non-finite rows instead of raising."""
    try:
        return np.linalg.solve(J, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty_like(b)
        for k in range(len(b)):
            try:
                out[k] = np.linalg.solve(J[k], b[k])
            except np.linalg.LinAlgError:
                out[k] = np.nan
        return out


def _inf_norm(A):
    return np.max(np.abs(A), axis=-1)


class _BatchTracker:
    def __init__(self, ph: _ProjectiveHomotopy, cfg: TrackerConfig):
        self.ph, self.cfg = ph, cfg

    def velocity(self, X, t):
        _, Ht = self.ph.values(X, t)
        rhs = np.concatenate([-Ht, np.zeros((len(X), 1), complex)], axis=1)
        return _solve(self.ph.jac(X, t), rhs)

    def newton(self, X, t, iters, allow_floor=None, patient=False):
        """Returns (X, converged mask).  ``patient`` keeps iterating through a
        slow start instead of giving up when a correction fails to halve."""
        cfg = self.cfg
        conv = np.zeros(len(X), bool)
        prev = np.full(len(X), np.inf)
        last = np.full(len(X), np.inf)
        if allow_floor is None:
            allow_floor = np.zeros(len(X), bool)
        active = np.ones(len(X), bool)
        for _ in range(iters):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            Hv, _ = self.ph.values(X[idx], t[idx])
            dX = _solve(self.ph.jac(X[idx], t[idx]), Hv)
            X[idx] = X[idx] - dX
            nrm = _inf_norm(dX)
            scale = np.maximum(1.0, _inf_norm(X[idx]))
            ok = nrm <= cfg.newtonTol * scale
            stalled = (nrm > 0.5 * prev[idx]) & ~ok
            floor = stalled & (nrm <= cfg.trackingFloorTol * scale) & allow_floor[idx]
            bad = ~np.isfinite(nrm) | (stalled & (not patient))
            conv[idx[ok | floor]] = True
            prev[idx] = nrm
            last[idx] = nrm / scale
            active[idx[ok | bad]] = False
        # out of iterations while still contracting slowly
        rest = np.flatnonzero(active & allow_floor)
        conv[rest[last[rest] <= cfg.trackingFloorTol]] = True
        return X, conv

    def run(self, X0: np.ndarray):
        cfg = self.cfg
        P = len(X0)
        X = X0.copy()
        t = np.zeros(P)
        h = np.full(P, cfg.initialStep)
        streak = np.zeros(P, int)
        steps = np.zeros(P, int)
        state = np.full(P, _RUNNING)
        while True:
            idx = np.flatnonzero(state == _RUNNING)
            if idx.size == 0:
                break
            x, tt = X[idx], t[idx]
            cap = np.where(tt >= cfg.endgameStart, cfg.initialStep / 4, cfg.initialStep)
            hh = np.minimum(np.minimum(h[idx], cap), 1.0 - tt)
            # RK4 predictor on the Davidenko equation
            k1 = self.velocity(x, tt)
            k2 = self.velocity(x + 0.5 * hh[:, None] * k1, tt + 0.5 * hh)
            k3 = self.velocity(x + 0.5 * hh[:, None] * k2, tt + 0.5 * hh)
            k4 = self.velocity(x + hh[:, None] * k3, tt + hh)
            pred = x + (hh / 6)[:, None] * (k1 + 2 * k2 + 2 * k3 + k4)
            tnew = np.where(hh >= 1.0 - tt, 1.0, tt + hh)
            ok_pred = np.all(np.isfinite(pred), axis=1)
            pred[~ok_pred] = x[~ok_pred]
            corr, conv = self.newton(pred, tnew, cfg.maxNewtonIters, hh < cfg.floorStep)
            acc = conv & ok_pred
            steps[idx] += 1

            a = idx[acc]
            X[a], t[a] = corr[acc], tnew[acc]
            streak[a] += 1
            grow = a[streak[a] >= 3]
            h[grow] = np.minimum(2 * h[grow], cfg.initialStep)
            streak[grow] = 0
            state[a[t[a] >= 1.0]] = _DONE

            r = idx[~acc]
            h[r] = hh[~acc] / 2
            streak[r] = 0
            state[r[h[r] < cfg.minStep]] = _FAILED
            over = idx[steps[idx] >= cfg.maxSteps]
            state[over[state[over] == _RUNNING]] = _FAILED
        # a path can speed up sharply right before t = 1 when the endpoint is
        # badly scaled (large multiplier); finish those with Newton at t = 1
        late = np.flatnonzero((state == _FAILED) & (t >= 1.0 - cfg.endpointPolishWindow))
        if late.size:
            Xl, conv = self.newton(X[late].copy(), np.ones(late.size), 4 * cfg.maxNewtonIters,
                                   np.ones(late.size, bool), patient=True)
            done = late[conv]
            X[done], t[done], state[done] = Xl[conv], 1.0, _DONE
        return X, t, steps, state


def _affine_polish(F: PolySystem, x: np.ndarray, tol: float, iters: int = 8):
    for _ in range(iters):
        J = F.jacobian(x)
        try:
            dx = np.linalg.solve(J, F.evaluate(x))
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(dx)):
            break
        x = x - dx
        if np.max(np.abs(dx)) <= tol * max(1.0, np.max(np.abs(x))) * 1e-3:
            break
    return x


def _finalize(F: PolySystem, X, t, steps, state, cfg: TrackerConfig) -> list:
    out = []
    for k in range(len(X)):
        Xk = X[k]
        x0 = Xk[0]
        scale = np.max(np.abs(Xk[1:])) if len(Xk) > 1 else 1.0
        far = abs(x0) * cfg.divergenceNorm <= scale
        x = Xk[1:] / x0 if x0 != 0 else np.full(len(Xk) - 1, np.inf + 0j)
        if far or not np.all(np.isfinite(x)):
            out.append(PathResult(PathStatus.DIVERGED, x, np.inf, np.inf, int(steps[k]), float(t[k])))
            continue
        if state[k] == _FAILED:
            status = PathStatus.SINGULAR if t[k] >= cfg.endgameStart else PathStatus.STEP_FAILURE
            out.append(PathResult(status, x, F.relative_residual(x), np.inf, int(steps[k]),
                                  float(t[k])))
            continue
        x = _affine_polish(F, x, cfg.newtonTol)
        res = F.relative_residual(x)
        try:
            cond = float(np.linalg.cond(F.jacobian(x)))
        except np.linalg.LinAlgError:
            cond = np.inf
        if np.max(np.abs(x)) >= cfg.divergenceNorm:
            status = PathStatus.DIVERGED
        elif cond < cfg.singularCondThreshold and res < cfg.newtonTol:
            status = PathStatus.CONVERGED
        else:
            status = PathStatus.SINGULAR
        out.append(PathResult(status, x, res, cond, int(steps[k]), 1.0))
    return out


def track(h: Homotopy, starts, cfg: TrackerConfig | None = None, seed: int = 0,
          threads: int = 1) -> list:
    """Track every start point; one :class:`PathResult` per start, in order.

    ``seed`` fixes the random affine chart.  ``threads`` splits the batch into
    contiguous chunks tracked concurrently; results do not depend on it.
    """
    cfg = cfg or TrackerConfig()
    starts = np.atleast_2d(np.asarray(starts, dtype=complex))
    if starts.shape[1] != h.F.nvars:
        raise ValueError("start points have the wrong dimension")
    rng = np.random.default_rng(seed)
    patch = rng.normal(size=h.F.nvars + 1) + 1j * rng.normal(size=h.F.nvars + 1)
    patch /= np.linalg.norm(patch)
    ph = _ProjectiveHomotopy(h, patch)
    X0 = np.concatenate([np.ones((len(starts), 1), complex), starts], axis=1)
    X0 = X0 / (X0 * patch).sum(axis=1)[:, None]

    def work(chunk):
        return _BatchTracker(ph, cfg).run(chunk)

    threads = max(1, int(threads))
    if threads == 1 or len(X0) < 2:
        parts = [work(X0)]
    else:
        chunks = np.array_split(X0, min(threads, len(X0)))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    X = np.concatenate([p[0] for p in parts])
    t = np.concatenate([p[1] for p in parts])
    steps = np.concatenate([p[2] for p in parts])
    state = np.concatenate([p[3] for p in parts])
    return _finalize(h.F, X, t, steps, state, cfg)


def classify(results: Sequence[PathResult], cfg: TrackerConfig | None = None,
             seeds: dict | None = None) -> SolutionSet:
    """Keep finite nonsingular converged endpoints and merge near-duplicates.

    Endpoints are sorted lexicographically by (real, imaginary) parts of each
    coordinate and clustered greedily at ``dedupeTol``; each cluster is
    represented by its first member in sorted order.
    """
    cfg = cfg or TrackerConfig()
    counts = {s.value: 0 for s in PathStatus}
    for r in results:
        counts[r.status.value] += 1
    keep = [
        r for r in results
        if r.status is PathStatus.CONVERGED
        and np.max(np.abs(r.endpoint)) < cfg.divergenceNorm
        and r.conditionEstimate < cfg.singularCondThreshold
    ]
    keep.sort(key=lambda r: tuple(v for z in r.endpoint for v in (z.real, z.imag)))
    reps: list = []
    for r in keep:
        if not any(np.max(np.abs(r.endpoint - q.endpoint)) <= cfg.dedupeTol for q in reps):
            reps.append(r)
    return SolutionSet(
        [r.endpoint for r in reps],
        len(results),
        dict(seeds or {}),
        counts,
        [r.residual for r in reps],
    )


# --- ED drivers -------------------------------------------------------------


def suspicious(sols: SolutionSet) -> bool:
    """A path lost mid-way, or two paths that ended on the same solution."""
    return (sols.statusCounts.get(PathStatus.STEP_FAILURE.value, 0) > 0
            or sols.statusCounts.get(PathStatus.CONVERGED.value, 0) > sols.count)


def _with_retries(attempt, attempts: int) -> SolutionSet:
    """Run ``attempt(k)`` until a clean run; otherwise keep the largest count.

    Classification only admits verified nonsingular solutions, so a larger
    count is never less trustworthy than a smaller one.
    """
    best = None
    for k in range(max(1, attempts)):
        sols = attempt(k)
        sols.seeds["attempt"] = k
        if best is None or sols.count > best.count:
            best = sols
        if not suspicious(sols):
            return sols
    return best


def ed_count(metric: MetricSpec, u: TargetPoint, cfg: TrackerConfig | None = None,
             seed: int = 0, threads: int = 1, attempts: int = 3) -> SolutionSet:
    """Count the ED-critical points of the symmetroid for ``(metric, u)``
    by a total-degree homotopy on the 7 x 7 Lagrange system.

    A run flagged by :func:`suspicious` is repeated with fresh start, chart and
    gamma, all drawn from the same seeded stream.
    """
    cfg = cfg or TrackerConfig()
    system = build_system(metric, u)
    rng = np.random.default_rng(seed)

    def attempt(_):
        start_seed, chart_seed = (int(s) for s in rng.integers(0, 2**31, size=2))
        gamma = random_gamma(rng)
        G, starts = total_degree_start(system.degrees, start_seed)
        results = track(Homotopy(G, system.system, gamma), starts, cfg, chart_seed, threads)
        seeds = {
            "seed": int(seed),
            "startSeed": start_seed,
            "chartSeed": chart_seed,
            "gamma": [gamma.real, gamma.imag],
            "targetSeed": u.seed,
            "metric": metric.to_dict(),
        }
        return classify(results, cfg, seeds)

    return _with_retries(attempt, attempts)


def parameter_homotopy(baseSystem: LagrangeSystem, baseSolutions: SolutionSet,
                       newMetric: MetricSpec, newTarget: TargetPoint,
                       cfg: TrackerConfig | None = None, seed: int = 0,
                       threads: int = 1, attempts: int = 3) -> SolutionSet:
    """Carry known solutions of one instance to another.

    Uses ``(1 - t) F_base + gamma t F_new``.  The Lagrange equations are linear
    in the coefficients ``(gram, gram u)``, so every intermediate system is
    again an ED Lagrange system (for a complex gram and target) and the
    random ``gamma`` keeps the segment off the discriminant.  Suspicious runs
    are retried with a new gamma as in :func:`ed_count`.
    """
    cfg = cfg or TrackerConfig()
    new = build_system(newMetric, newTarget)
    rng = np.random.default_rng(seed)
    starts = np.array(baseSolutions.solutions, dtype=complex).reshape(-1, 7)

    def attempt(_):
        gamma = random_gamma(rng)
        chart_seed = int(rng.integers(0, 2**31))
        h = Homotopy(baseSystem.system, new.system, gamma)
        results = track(h, starts, cfg, chart_seed, threads)
        seeds = {"seed": int(seed), "chartSeed": chart_seed, "gamma": [gamma.real, gamma.imag],
                 "targetSeed": newTarget.seed, "metric": newMetric.to_dict()}
        return classify(results, cfg, seeds)

    return _with_retries(attempt, attempts)
