"""Gradient descent driver and acceleration schedules.

Three ways to combine plain gradient descent with window extrapolation:

* online1 -- run ``k`` GD steps, extrapolate over the window, restart GD
  from the extrapolated point, repeat.
* online2 -- after the first window, take a single GD step from each
  extrapolated point and slide the window by one.
* offline -- GD runs untouched; every sliding window is extrapolated as a
  side-channel measurement that never feeds back.

Traces count gradient evaluations of the descent updates only; the
gradient at the origin used by the direct methods is cached once on the
problem instance.  An extrapolation therefore costs zero evaluations and
budgets are exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .base import ParamsMixin, as_vector
from .extrapolators import (
    ExtrapolationResult,
    Extrapolator,
    IterateWindow,
    make_extrapolator,
)
from .problems import Problem

SCHEMES = ("plain-gd", "online1", "online2", "offline")


class DivergenceError(RuntimeError):
    """GD produced a non-finite iterate.  Carries the finite prefix."""

    def __init__(self, message: str, iterates: list[np.ndarray]):
        super().__init__(message)
        self.iterates = iterates


@dataclass
class SchemeConfig:
    """How to schedule descent steps and extrapolations.

    ``budget`` counts gradient evaluations; ``stepsize=None`` means the
    classic ``1/L``.  ``guard`` protects restarting schemes from a bad
    solve: an extrapolated point that is non-finite or more than 10x
    worse than the newest iterate is replaced by that iterate (the event
    is recorded with its fallback flag set).
    """

    scheme: str = "online1"
    window: int = 3
    budget: int = 100
    stepsize: float | None = None
    guard: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.budget < self.window + 1:
            raise ValueError("budget must be at least window + 1")
        if self.stepsize is not None and self.stepsize <= 0.0:
            raise ValueError("stepsize must be positive")


@dataclass(frozen=True)
class TraceEvent:
    grad_evals: int
    kind: str  # "gd" | "extrapolation"
    point: np.ndarray
    f_value: float
    f_gap: float
    fallback: bool = False


@dataclass
class ConvergenceTrace:
    """Ordered per-event record of one run."""

    events: list[TraceEvent] = field(default_factory=list)
    diverged: bool = False

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]

    @property
    def grad_evals(self) -> int:
        return self.events[-1].grad_evals if self.events else 0

    @property
    def final_gap(self) -> float:
        return self.events[-1].f_gap

    @property
    def extrapolation_count(self) -> int:
        return len(self.of_kind("extrapolation"))

    @property
    def fallback_count(self) -> int:
        return sum(1 for e in self.events if e.fallback)


def gd_run(problem: Problem, x0, steps: int, alpha: float) -> list[np.ndarray]:
    """Plain descent ``x_{k+1} = x_k - alpha grad_f(x_k)``.

    Returns ``x_0 .. x_steps`` (exactly ``steps`` gradient evaluations).
    Raises :class:`DivergenceError` with the finite prefix if an iterate
    leaves the representable range.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    x = as_vector(x0, size=problem.n, name="x0")
    iterates = [x]
    # divergence is detected, not raised by the FPU
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            x = x - alpha * problem.grad(x)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(f"non-finite iterate at step {i + 1}", iterates)
            iterates.append(x)
    return iterates


def _resolve_stepsize(problem: Problem, cfg: SchemeConfig) -> float:
    return cfg.stepsize if cfg.stepsize is not None else 1.0 / problem.lipschitz


class _Recorder:
    """Accumulates trace events, computing f and the gap once per point."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.f_star = problem.f_star
        self.trace = ConvergenceTrace()

    def add(self, grad_evals: int, kind: str, point: np.ndarray,
            fallback: bool = False, f_value: float | None = None) -> float:
        if f_value is None:
            f_value = self.problem.value(point)
        self.trace.events.append(
            TraceEvent(grad_evals, kind, point, f_value, f_value - self.f_star,
                       fallback)
        )
        return f_value


def _apply_guard(problem: Problem, result: ExtrapolationResult,
                 newest: np.ndarray, newest_f: float,
                 guard: bool) -> tuple[np.ndarray, float, bool]:
    """Pick the point a restarting scheme continues from.

    A flagged fallback always continues from the newest iterate (the
    no-op restart); with the guard on, so does any non-finite or
    order-of-magnitude-worse extrapolated point.
    """
    if result.fallback:
        return newest, newest_f, True
    point = result.point
    if guard:
        if not np.all(np.isfinite(point)):
            return newest, newest_f, True
        f = problem.value(point)
        if not np.isfinite(f) or f > 10.0 * newest_f:
            return newest, newest_f, True
        return point, f, False
    return point, problem.value(point), False


def run_plain_gd(problem: Problem, x0, cfg: SchemeConfig) -> ConvergenceTrace:
    """Descent only; one gd event per evaluation plus the starting point."""
    alpha = _resolve_stepsize(problem, cfg)
    rec = _Recorder(problem)
    rec.add(0, "gd", as_vector(x0, size=problem.n, name="x0"))
    try:
        iterates = gd_run(problem, x0, cfg.budget, alpha)
    except DivergenceError as err:
        for i, x in enumerate(err.iterates[1:], start=1):
            rec.add(i, "gd", x)
        rec.trace.diverged = True
        return rec.trace
    for i, x in enumerate(iterates[1:], start=1):
        rec.add(i, "gd", x)
    return rec.trace


def run_online1(problem: Problem, x0, cfg: SchemeConfig,
                extrapolator: Extrapolator) -> ConvergenceTrace:
    """Restarting schedule: k GD steps, extrapolate, restart from the result.

    Extrapolation events land exactly at evaluation counts k, 2k, ...;
    a final partial window (budget not a multiple of k) runs plain GD.
    """
    alpha = _resolve_stepsize(problem, cfg)
    k = cfg.window
    g0 = problem.grad_at_zero
    rec = _Recorder(problem)
    start = as_vector(x0, size=problem.n, name="x0")
    rec.add(0, "gd", start)
    evals = 0
    while evals < cfg.budget:
        steps = min(k, cfg.budget - evals)
        try:
            xs = gd_run(problem, start, steps, alpha)
        except DivergenceError as err:
            for i, x in enumerate(err.iterates[1:], start=1):
                rec.add(evals + i, "gd", x)
            rec.trace.diverged = True
            return rec.trace
        newest_f = 0.0
        for i, x in enumerate(xs[1:], start=1):
            newest_f = rec.add(evals + i, "gd", x)
        evals += steps
        if steps < k:
            break
        window = IterateWindow.from_points(xs, np.full(k, alpha))
        result = extrapolator.extrapolate(window, g0)
        point, f, fell_back = _apply_guard(problem, result, xs[-1], newest_f,
                                           cfg.guard)
        rec.add(evals, "extrapolation", point, fallback=fell_back, f_value=f)
        start = point
    return rec.trace


def run_online2(problem: Problem, x0, cfg: SchemeConfig,
                extrapolator: Extrapolator) -> ConvergenceTrace:
    """Sliding schedule: one GD step per cycle from each extrapolated point.

    After ``c`` cycles the window holds descent iterates ``c+1 .. c+k``.
    The stepsize pairs inside the window are taken at face value even
    though each new iterate descends from an extrapolated point rather
    than its window predecessor; that approximation is inherent to the
    schedule.
    """
    if cfg.window < 2:
        raise ValueError("online2 needs window >= 2")
    alpha = _resolve_stepsize(problem, cfg)
    k = cfg.window
    g0 = problem.grad_at_zero
    rec = _Recorder(problem)
    start = as_vector(x0, size=problem.n, name="x0")
    rec.add(0, "gd", start)
    try:
        xs = gd_run(problem, start, k, alpha)
    except DivergenceError as err:
        for i, x in enumerate(err.iterates[1:], start=1):
            rec.add(i, "gd", x)
        rec.trace.diverged = True
        return rec.trace
    newest_f = 0.0
    for i, x in enumerate(xs[1:], start=1):
        newest_f = rec.add(i, "gd", x)
    evals = k
    window = deque(xs[1:], maxlen=k)  # iterates 1 .. k
    while True:
        win = IterateWindow.from_points(list(window), np.full(k - 1, alpha))
        result = extrapolator.extrapolate(win, g0)
        point, f, fell_back = _apply_guard(problem, result, window[-1], newest_f,
                                           cfg.guard)
        rec.add(evals, "extrapolation", point, fallback=fell_back, f_value=f)
        if evals >= cfg.budget:
            break
        nxt = point - alpha * problem.grad(point)
        evals += 1
        if not np.all(np.isfinite(nxt)):
            rec.trace.diverged = True
            return rec.trace
        newest_f = rec.add(evals, "gd", nxt)
        window.append(nxt)
    return rec.trace


def run_offline(problem: Problem, x0, cfg: SchemeConfig,
                extrapolator: Extrapolator) -> ConvergenceTrace:
    """Side-channel schedule: GD runs untouched, every window is measured.

    The gd events are bit-identical to :func:`run_plain_gd`; each window
    of ``k+1`` consecutive iterates adds one extrapolation event at the
    evaluation count of its newest member (``budget - k + 1`` events).
    """
    alpha = _resolve_stepsize(problem, cfg)
    k = cfg.window
    g0 = problem.grad_at_zero
    rec = _Recorder(problem)
    rec.add(0, "gd", as_vector(x0, size=problem.n, name="x0"))
    try:
        iterates = gd_run(problem, x0, cfg.budget, alpha)
    except DivergenceError as err:
        for i, x in enumerate(err.iterates[1:], start=1):
            rec.add(i, "gd", x)
        rec.trace.diverged = True
        return rec.trace
    stepsizes = np.full(k, alpha)
    for t, x in enumerate(iterates[1:], start=1):
        rec.add(t, "gd", x)
        if t >= k:
            win = IterateWindow.from_points(iterates[t - k:t + 1], stepsizes)
            result = extrapolator.extrapolate(win, g0)
            point = result.point
            rec.add(t, "extrapolation", point, fallback=result.fallback)
    return rec.trace


def run_scheme(problem: Problem, x0, cfg: SchemeConfig,
               extrapolator: Extrapolator | None = None) -> ConvergenceTrace:
    """Dispatch on ``cfg.scheme``; the accelerated schedules need an extrapolator."""
    if cfg.scheme == "plain-gd":
        return run_plain_gd(problem, x0, cfg)
    if extrapolator is None:
        raise ValueError(f"scheme {cfg.scheme!r} requires an extrapolator")
    runner = {
        "online1": run_online1,
        "online2": run_online2,
        "offline": run_offline,
    }[cfg.scheme]
    return runner(problem, x0, cfg, extrapolator)


class AcceleratedGD(ParamsMixin):
    """Estimator-style front end: configure once, ``fit`` on a problem.

    After ``fit(problem, x0)`` the instance exposes ``trace_``, the final
    point ``x_`` and its objective gap ``f_gap_``.
    """

    def __init__(self, method: str = "dna1", scheme: str = "online1",
                 window: int = 3, budget: int = 100, lam: float = 1e-8,
                 stepsize: float | None = None, guard: bool = True):
        self.method = method
        self.scheme = scheme
        self.window = window
        self.budget = budget
        self.lam = lam
        self.stepsize = stepsize
        self.guard = guard

    def fit(self, problem: Problem, x0) -> "AcceleratedGD":
        if self.method == "gd":
            cfg = SchemeConfig("plain-gd", self.window, self.budget,
                               self.stepsize, self.guard)
            extrapolator = None
        else:
            cfg = SchemeConfig(self.scheme, self.window, self.budget,
                               self.stepsize, self.guard)
            extrapolator = make_extrapolator(self.method, lam=self.lam)
        self.trace_ = run_scheme(problem, x0, cfg, extrapolator)
        last = self.trace_.events[-1]
        self.x_ = last.point
        self.f_gap_ = last.f_gap
        return self
