"""Solution families of nonautonomous, possibly non-unique dynamics.

A model couples a time-dependent right-hand side f(t, x, u) with a
*selection space* describing the admissible inputs u.  Multivaluedness is
made executable this way: the solution set through an initial state is the
set of trajectories over all admissible selections.  Single-valued
dynamics use a singleton selection space; differential inclusions use an
interval of control values; discretised PDE models use a finite family of
solver variants.

Selections are piecewise constant on the model's time step.  Their values
are addressed by *absolute* segment index (see :mod:`pullbacklab.rng`), so
a selection realises the same input signal on [a, b] no matter how far in
the past the trajectory was started.  Translation and concatenation of
trajectories are then exact grid operations.

All times live on the lattice {k * dt}; callers must pass lattice times
(checked to 1e-9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConcatenationError,
    ContractViolation,
    DivergenceError,
    NoPredecessorError,
)
from .metric import MetricDescriptor, SetCloud
from .rng import keyed_signs, keyed_uniforms, stable_seed

__all__ = [
    "SelectionRule",
    "SelectionSpace",
    "ProcessModel",
    "Trajectory",
    "CompleteOrbit",
    "UscReport",
    "solve",
    "evolve_points",
    "translate",
    "concatenate",
    "sample_solution_set",
    "upper_semicontinuity_check",
    "extend_backward",
    "reintegrate",
    "reintegration_residual",
]

_LATTICE_TOL = 1e-9
DEFAULT_JUNCTION_TOL = 1e-9


# ---------------------------------------------------------------------------
# selections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionRule:
    """Recipe for one admissible input signal.

    strategy:
      * ``constant`` — u ≡ value (drawn once from the seed when value is None)
      * ``piecewise-constant-random`` — value redrawn every switch_period
      * ``extremal`` — bang-bang at the interval endpoints, sign redrawn
        every switch_period

    Identical (seed, strategy, switch_period, value) always realise the
    identical signal.
    """

    seed: int
    strategy: str = "constant"
    switch_period: float = math.inf
    value: float | None = None


@dataclass(frozen=True)
class SelectionSpace:
    """Admissible selections of a model.

    kind ``singleton``: the dynamics are single valued, u ≡ 0.
    kind ``interval``: scalar controls with |u| ≤ radius.
    kind ``variants``: u is an integer index into a finite family of solver
    variants (used by discretised PDE models).
    """

    kind: str = "singleton"
    radius: float = 0.0
    n_variants: int = 1
    switch_period: float = 0.5

    def __post_init__(self):
        if self.kind not in ("singleton", "interval", "variants"):
            raise ContractViolation(f"unknown selection space kind {self.kind!r}")
        if self.kind == "interval" and self.radius < 0:
            raise ContractViolation("interval radius must be nonnegative")
        if self.kind == "variants" and self.n_variants < 1:
            raise ContractViolation("variant family must be nonempty")
        if not self.switch_period > 0:
            raise ContractViolation("switch_period must be positive")

    def canonical_rule(self, seed: int = 0) -> SelectionRule:
        """The deterministic reference selection (u ≡ 0 / variant 0)."""
        return SelectionRule(seed=seed, strategy="constant", value=0.0)

    def ensemble_rules(self, n: int, seed: int) -> list[SelectionRule]:
        """A deterministic mix of n selections covering the space.

        For interval spaces the two extremal constants are always members 0
        and 1, further constants are stratified across [-radius, radius],
        and the remainder alternate random piecewise and bang-bang
        selections.  For degenerate spaces all members coincide.
        """
        if n < 1:
            raise ContractViolation("ensemble size must be positive")
        if self.kind == "singleton" or (self.kind == "interval" and self.radius == 0.0):
            return [SelectionRule(seed=stable_seed(seed, i), value=0.0) for i in range(n)]
        if self.kind == "variants":
            return [
                SelectionRule(seed=stable_seed(seed, i), value=float(i % self.n_variants))
                for i in range(n)
            ]
        rules: list[SelectionRule] = []
        n_const = max(0, (n - 2 + 2) // 3)  # every third member after the extremals
        const_slot = 0
        for i in range(n):
            s = stable_seed(seed, i)
            if i == 0:
                rules.append(SelectionRule(seed=s, value=+self.radius))
            elif i == 1:
                rules.append(SelectionRule(seed=s, value=-self.radius))
            elif i % 3 == 2:
                c = -self.radius + 2.0 * self.radius * (const_slot + 0.5) / max(n_const, 1)
                const_slot += 1
                rules.append(SelectionRule(seed=s, value=c))
            elif i % 3 == 0:
                rules.append(
                    SelectionRule(
                        seed=s,
                        strategy="piecewise-constant-random",
                        switch_period=self.switch_period,
                    )
                )
            else:
                rules.append(
                    SelectionRule(
                        seed=s, strategy="extremal", switch_period=self.switch_period
                    )
                )
        return rules

    def bridge_controls(self, n: int = 9) -> np.ndarray:
        """Deterministic constant control candidates for orbit matching."""
        if self.kind == "singleton" or (self.kind == "interval" and self.radius == 0.0):
            return np.zeros(1)
        if self.kind == "variants":
            return np.arange(self.n_variants, dtype=float)
        if n < 2 or n % 2 == 0:
            raise ContractViolation("bridge control count must be odd and >= 3")
        return np.linspace(-self.radius, self.radius, n)

    def segment_values(
        self, rule: SelectionRule, seg_lo: int, seg_hi: int
    ) -> np.ndarray:
        """Values of the selection on absolute segments seg_lo..seg_hi-1."""
        count = seg_hi - seg_lo
        if rule.strategy == "constant" or not math.isfinite(rule.switch_period):
            if rule.value is not None:
                v = rule.value
            elif self.kind == "interval":
                v = float(
                    (2.0 * keyed_uniforms(rule.seed, np.array([0])) - 1.0)[0]
                    * self.radius
                )
            else:
                v = 0.0
            return np.full(count, v)
        keys = np.arange(seg_lo, seg_hi)
        if rule.strategy == "piecewise-constant-random":
            return (2.0 * keyed_uniforms(rule.seed, keys) - 1.0) * self.radius
        if rule.strategy == "extremal":
            return keyed_signs(rule.seed, keys) * self.radius
        raise ContractViolation(f"unknown selection strategy {rule.strategy!r}")


# ---------------------------------------------------------------------------
# models and trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessModel:
    """A dynamical-system description with an explicit selection input.

    ``rhs(t, X, u)`` must accept a state batch X of shape (m, dimension)
    and a control vector u of shape (m,) and return the batch of
    derivatives.  Models with ``scheme='rk4'`` are integrated explicitly;
    a model may instead provide ``stepper(t, X, u, dt)`` for implicit or
    otherwise custom stepping (scheme ``custom``).
    """

    name: str
    dimension: int
    rhs: Callable[[float, np.ndarray, np.ndarray], np.ndarray] | None
    selection_space: SelectionSpace
    metric: MetricDescriptor
    dt: float
    scheme: str = "rk4"
    stepper: Callable[[float, np.ndarray, np.ndarray, float], np.ndarray] | None = None
    time_independent: bool = False
    theta: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ContractViolation("dt must be positive")
        if self.scheme == "rk4" and self.rhs is None:
            raise ContractViolation("rk4 models need a right-hand side")
        if self.scheme == "custom" and self.stepper is None:
            raise ContractViolation("custom models need a stepper")

    def step_index(self, t: float) -> int:
        """Integer lattice index of t, validated to the lattice tolerance."""
        k = round(t / self.dt)
        if abs(t - k * self.dt) > _LATTICE_TOL * max(1.0, abs(t)):
            raise ContractViolation(
                f"time {t!r} is not on the dt={self.dt!r} lattice"
            )
        return k

    def steps_per_segment(self) -> int:
        period = self.selection_space.switch_period
        if not math.isfinite(period):
            return 1
        m = round(period / self.dt)
        if m < 1 or abs(period - m * self.dt) > _LATTICE_TOL:
            raise ContractViolation("switch_period must be a multiple of dt")
        return m


@dataclass(frozen=True)
class Trajectory:
    """One selected solution on a uniform time grid.

    states[k] is the state at times[k]; controls[k] is the input held on
    [times[k], times[k+1]).
    """

    start_time: float
    dt: float
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    selection: SelectionRule | None = None
    model_name: str = ""

    def __post_init__(self):
        for name in ("times", "states", "controls"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.times.shape[0] != self.states.shape[0]:
            raise ContractViolation("times/states length mismatch")
        if self.controls.shape[0] != max(self.times.shape[0] - 1, 0):
            raise ContractViolation("controls must have one entry per step")
        spacing = np.diff(self.times)
        if spacing.size and np.any(np.abs(spacing - self.dt) > 1e-12 * max(1.0, abs(self.dt))):
            raise ContractViolation("trajectory grid must be uniform")

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def n_steps(self) -> int:
        return self.times.shape[0] - 1

    def index_of(self, t: float) -> int:
        k = round((t - self.start_time) / self.dt)
        if k < 0 or k > self.n_steps() or abs(
            t - self.times[k]
        ) > _LATTICE_TOL * max(1.0, abs(t)):
            raise ContractViolation(f"time {t!r} not on the trajectory grid")
        return k

    def value_at(self, t: float) -> np.ndarray:
        return self.states[self.index_of(t)]


@dataclass(frozen=True)
class CompleteOrbit:
    """A two-sided orbit assembled from section points of a family.

    Consecutive coarse states are bridged by constant controls; ``gaps``
    records the junction residual of each bridge, so every restriction
    re-integrates to within max(gaps).
    """

    times: np.ndarray
    states: np.ndarray
    segment_controls: np.ndarray
    gaps: np.ndarray
    certified_window: tuple[float, float]
    model_name: str = ""

    def value_at(self, t: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > _LATTICE_TOL * max(1.0, abs(t)):
            raise ContractViolation(f"time {t!r} not on the orbit grid")
        return self.states[k]


# ---------------------------------------------------------------------------
# integration core
# ---------------------------------------------------------------------------

def _control_table(
    model: ProcessModel, rules: Sequence[SelectionRule], k0: int, n_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-member segment values plus the per-step column index."""
    mseg = model.steps_per_segment()
    steps = np.arange(k0, k0 + max(n_steps, 1))
    segs = np.floor_divide(steps, mseg)
    seg_lo, seg_hi = int(segs[0]), int(segs[-1]) + 1
    cols = (segs - seg_lo).astype(np.int64)
    space = model.selection_space
    table = np.empty((len(rules), seg_hi - seg_lo))
    for i, rule in enumerate(rules):
        table[i] = space.segment_values(rule, seg_lo, seg_hi)
    return table, cols


def _advance(
    model: ProcessModel, t: float, X: np.ndarray, u: np.ndarray, dt: float
) -> np.ndarray:
    if model.scheme == "custom":
        return model.stepper(t, X, u, dt)
    f = model.rhs
    k1 = f(t, X, u)
    k2 = f(t + 0.5 * dt, X + 0.5 * dt * k1, u)
    k3 = f(t + 0.5 * dt, X + 0.5 * dt * k2, u)
    k4 = f(t + dt, X + dt * k3, u)
    return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _evolve(
    model: ProcessModel,
    tau: float,
    X0: np.ndarray,
    n_steps: int,
    rules: Sequence[SelectionRule],
    record: bool = False,
):
    """March a batch of states n_steps forward from tau in lockstep."""
    X = np.array(X0, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.dimension:
        raise ContractViolation("state batch has the wrong shape")
    if len(rules) != X.shape[0]:
        raise ContractViolation("one selection rule per batch member required")
    k0 = model.step_index(tau)
    table, cols = _control_table(model, rules, k0, n_steps)
    controls = np.empty((X.shape[0], n_steps)) if record else None
    history = np.empty((n_steps + 1,) + X.shape) if record else None
    if record:
        history[0] = X
    dt = model.dt
    for k in range(n_steps):
        u = table[:, cols[k]]
        t = (k0 + k) * dt
        X = _advance(model, t, X, u, dt)
        if not np.all(np.isfinite(X)):
            raise DivergenceError("state left the finite range", t)
        if record:
            controls[:, k] = u
            history[k + 1] = X
    if record:
        return history, controls
    return X


def evolve_points(
    model: ProcessModel,
    tau: float,
    points: np.ndarray,
    t_end: float,
    rules: Sequence[SelectionRule],
) -> np.ndarray:
    """Final states of an ensemble evolved from tau to t_end."""
    n_steps = model.step_index(t_end) - model.step_index(tau)
    if n_steps < 0:
        raise ContractViolation("t_end must not precede tau")
    if n_steps == 0:
        return np.array(points, dtype=float)
    return _evolve(model, tau, points, n_steps, rules)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def solve(
    model: ProcessModel,
    tau: float,
    z,
    t_end: float,
    sel: SelectionRule | None = None,
) -> Trajectory:
    """Integrate one selected solution with phi(tau) = z."""
    if t_end < tau - _LATTICE_TOL:
        raise ContractViolation("t_end must not precede tau")
    rule = sel if sel is not None else model.selection_space.canonical_rule()
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n_steps = model.step_index(t_end) - model.step_index(tau)
    k0 = model.step_index(tau)
    times = (k0 + np.arange(n_steps + 1)) * model.dt
    if n_steps == 0:
        return Trajectory(tau, model.dt, times, z[None, :], np.zeros(0), rule, model.name)
    history, controls = _evolve(model, tau, z[None, :], n_steps, [rule], record=True)
    return Trajectory(
        tau, model.dt, times, history[:, 0, :], controls[0], rule, model.name
    )


def reintegrate(model: ProcessModel, tau: float, z, controls: np.ndarray) -> Trajectory:
    """Integrate from z with an explicit per-step control record."""
    controls = np.asarray(controls, dtype=float)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    k0 = model.step_index(tau)
    X = z[None, :].astype(float)
    history = np.empty((controls.shape[0] + 1, 1, z.shape[0]))
    history[0] = X
    for k in range(controls.shape[0]):
        t = (k0 + k) * model.dt
        X = _advance(model, t, X, controls[k : k + 1], model.dt)
        if not np.all(np.isfinite(X)):
            raise DivergenceError("state left the finite range", t)
        history[k + 1] = X
    times = (k0 + np.arange(controls.shape[0] + 1)) * model.dt
    return Trajectory(tau, model.dt, times, history[:, 0, :], controls, None, model.name)


def reintegration_residual(model: ProcessModel, tr: Trajectory) -> float:
    """Largest one-step defect of a trajectory under its own controls."""
    worst = 0.0
    k0 = model.step_index(tr.start_time)
    for k in range(tr.n_steps()):
        t = (k0 + k) * model.dt
        image = _advance(
            model, t, tr.states[k : k + 1], tr.controls[k : k + 1], model.dt
        )
        worst = max(worst, model.metric.distance(image[0], tr.states[k + 1]))
    return worst


def translate(tr: Trajectory, s: float) -> Trajectory:
    """Restrict a trajectory to [tau + s, end]; states are unchanged."""
    if s < 0:
        raise ContractViolation("translation offset must be nonnegative")
    k = round(s / tr.dt)
    if abs(s - k * tr.dt) > 1e-12 * max(1.0, abs(s)):
        raise ContractViolation("offset must be a multiple of dt")
    if k > tr.n_steps():
        raise ContractViolation("offset exceeds the trajectory span")
    return Trajectory(
        float(tr.times[k]),
        tr.dt,
        tr.times[k:],
        tr.states[k:],
        tr.controls[k:],
        tr.selection,
        tr.model_name,
    )


def concatenate(
    phi: Trajectory,
    psi: Trajectory,
    s: float,
    junction_tol: float = DEFAULT_JUNCTION_TOL,
    metric: MetricDescriptor | None = None,
) -> Trajectory:
    """Follow phi up to time s, then psi.

    Both trajectories must be defined at s and agree there to within
    junction_tol in the given metric (Euclidean by default).
    """
    if abs(phi.dt - psi.dt) > 1e-15:
        raise ContractViolation("trajectories use different time steps")
    i = phi.index_of(s)
    j = psi.index_of(s)
    metric = metric or MetricDescriptor.euclidean(phi.states.shape[1])
    gap = metric.distance(phi.states[i], psi.states[j])
    if gap > junction_tol:
        raise ConcatenationError(gap, junction_tol)
    times = np.concatenate([phi.times[: i + 1], psi.times[j + 1 :]])
    states = np.concatenate([phi.states[: i + 1], psi.states[j + 1 :]])
    controls = np.concatenate([phi.controls[:i], psi.controls[j:]])
    return Trajectory(
        phi.start_time, phi.dt, times, states, controls, None, phi.model_name
    )


def sample_solution_set(
    model: ProcessModel, tau: float, z, t_end: float, n: int, seed: int
) -> list[Trajectory]:
    """n selected solutions through (tau, z), deterministic given seed."""
    if n < 1:
        raise ContractViolation("n must be >= 1")
    rules = model.selection_space.ensemble_rules(n, stable_seed(seed, model.name, tau))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n_steps = model.step_index(t_end) - model.step_index(tau)
    k0 = model.step_index(tau)
    times = (k0 + np.arange(n_steps + 1)) * model.dt
    Z = np.repeat(z[None, :], n, axis=0)
    history, controls = _evolve(model, tau, Z, n_steps, rules, record=True)
    return [
        Trajectory(tau, model.dt, times, history[:, i, :], controls[i], rules[i], model.name)
        for i in range(n)
    ]


@dataclass(frozen=True)
class UscReport:
    """Outcome of an empirical upper-semicontinuity check."""

    passed: bool
    selected_indices: tuple[int, ...]
    sup_deviation: float
    deviations: np.ndarray
    threshold: np.ndarray


def upper_semicontinuity_check(
    model: ProcessModel,
    tau: float,
    z_seq: Sequence,
    z,
    horizon: float,
    tol: float,
    lip: float = 1.0,
    rule: SelectionRule | None = None,
) -> UscReport:
    """Check that solutions from convergent initial data stay uniformly close.

    Solutions through the z_j (all with one matched selection) are compared
    with the solution through z on [tau, tau + horizon]; index j is
    selected when its sup deviation is within tol + lip * d(z_j, z).
    Failure is a report outcome, not an error.
    """
    if len(z_seq) == 0:
        raise ContractViolation("z_seq must be nonempty")
    rule = rule or model.selection_space.canonical_rule()
    z = np.atleast_1d(np.asarray(z, dtype=float))
    zs = np.stack([np.atleast_1d(np.asarray(p, dtype=float)) for p in z_seq])
    batch = np.concatenate([zs, z[None, :]])
    n_steps = model.step_index(tau + horizon) - model.step_index(tau)
    history, _ = _evolve(model, tau, batch, n_steps, [rule] * batch.shape[0], record=True)
    limit = history[:, -1, :]
    w = model.metric.weights
    dev = np.sqrt(
        np.max(np.sum(w * (history[:, :-1, :] - limit[:, None, :]) ** 2, axis=2), axis=0)
    )
    d0 = np.sqrt(np.sum(w * (zs - z) ** 2, axis=1))
    threshold = tol + lip * d0
    selected = tuple(int(i) for i in np.nonzero(dev <= threshold)[0])
    passed = len(selected) == len(z_seq)
    sup_dev = float(dev[list(selected)].max()) if selected else float(dev.max())
    return UscReport(passed, selected, sup_dev, dev, threshold)


def bridge_images(
    model: ProcessModel,
    s0: float,
    s1: float,
    points: np.ndarray,
    control_values: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(point, control) product images under the flow from s0 to s1.

    Returns (images, point_index, control_index) with rows ordered
    point-major so that argmin tie-breaking prefers low point indices.
    """
    n_p, n_c = points.shape[0], control_values.shape[0]
    X0 = np.repeat(points, n_c, axis=0)
    rules = [
        SelectionRule(seed=0, value=float(control_values[i % n_c]))
        for i in range(n_p * n_c)
    ]
    images = evolve_points(model, s0, X0, s1, rules)
    idx = np.arange(n_p * n_c)
    return images, idx // n_c, idx % n_c


def extend_backward(
    model: ProcessModel,
    anchor_time: float,
    anchor_point,
    family,
    depth: float,
    tol: float,
    n_bridge: int = 9,
) -> CompleteOrbit:
    """Greedy backward orbit through a section point of a family.

    At each earlier family grid time the section's points are combined
    with constant bridge controls; the pair whose one-step image lands
    nearest the current point is kept (lowest index on ties).  Fails with
    the time of first failure when no image lands within tol.
    """
    x = np.atleast_1d(np.asarray(anchor_point, dtype=float))
    grid = np.asarray(family.grid_times(), dtype=float)
    lo_time = anchor_time - depth
    if grid.min() > lo_time + _LATTICE_TOL or grid.max() < anchor_time - _LATTICE_TOL:
        raise ContractViolation("family grid does not cover the requested window")
    anchor_cloud = family.cloud_at(anchor_time)
    w = model.metric.weights
    if np.sqrt(np.min(np.sum(w * (anchor_cloud.points - x) ** 2, axis=1))) > tol:
        raise ContractViolation("anchor point is not within tol of its section")
    idx_anchor = int(np.argmin(np.abs(grid - anchor_time)))
    idx_lo = int(np.argmin(np.abs(grid - lo_time)))
    controls = model.selection_space.bridge_controls(n_bridge)

    rev_states = [x]
    rev_controls: list[float] = []
    rev_gaps: list[float] = []
    target = x
    for k in range(idx_anchor, idx_lo, -1):
        s_prev, s_cur = float(grid[k - 1]), float(grid[k])
        pts = family.cloud_at(s_prev).points
        images, p_idx, c_idx = bridge_images(model, s_prev, s_cur, pts, controls)
        dists = np.sqrt(np.sum(w * (images - target) ** 2, axis=1))
        best = int(np.argmin(dists))
        if dists[best] > tol:
            raise NoPredecessorError(s_prev, float(dists[best]))
        target = pts[p_idx[best]]
        rev_states.append(target)
        rev_controls.append(float(controls[c_idx[best]]))
        rev_gaps.append(float(dists[best]))
    times = grid[idx_lo : idx_anchor + 1]
    return CompleteOrbit(
        times=times,
        states=np.stack(rev_states[::-1]),
        segment_controls=np.asarray(rev_controls[::-1]),
        gaps=np.asarray(rev_gaps[::-1]),
        certified_window=(float(grid[idx_lo]), float(anchor_time)),
        model_name=model.name,
    )
