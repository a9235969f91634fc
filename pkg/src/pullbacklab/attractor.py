"""Pullback computation of attractor sections and their limit sets.

A section A(t) is approximated by evolving a tempered ball of initial
states, sampled a horizon h in the past, forward to t under an ensemble of
selections, and increasing h until two successive horizon clouds agree in
Hausdorff distance.  The achieved Cauchy gap is attached to every section
rather than hidden.

Seeds are derived from (run seed, model name, t, horizon, member index),
so any section can be recomputed in isolation and families do not depend
on grid order.  Selection draws deliberately omit the horizon component:
a selection realises the same input signal near t no matter how deep the
pullback, which is what makes successive horizon clouds comparable for
genuinely multivalued models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolation, HorizonExhaustedError, NonSettlingError
from .metric import SetCloud, hausdorff, prune, semidist
from .process import ProcessModel, bridge_images, evolve_points, extend_backward
from .rng import generator, stable_seed

__all__ = [
    "PullbackConfig",
    "SectionResult",
    "AttractorFamily",
    "AttractionReport",
    "QuasiInvarianceReport",
    "pullback_section",
    "attractor_family",
    "forward_limit",
    "backward_limit",
    "tail_compactness",
    "autonomous_attractor",
    "quasi_invariance_check",
    "selected_attraction_check",
]

_LATTICE_TOL = 1e-9
DEFAULT_TAIL_FRACTIONS = (0.5, 0.375, 0.25)


@dataclass(frozen=True)
class PullbackConfig:
    """Parameters of the pullback iteration.

    The initial family D(tau) is a ball of radius
    ``sampler_radius * (1 + |tau|) ** sampler_growth``; polynomial growth
    keeps the family tempered for every positive exponential rate theta.
    """

    horizons: tuple[float, ...]
    ensemble_size: int = 64
    sampler_radius: float = 1.0
    sampler_growth: float = 0.5
    prune_tol: float = 1e-6
    section_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        hs = tuple(float(h) for h in self.horizons)
        if len(hs) < 2 or any(b <= a for a, b in zip(hs, hs[1:])) or hs[0] <= 0:
            raise ContractViolation("horizons must be >= 2 strictly increasing positive values")
        object.__setattr__(self, "horizons", hs)
        if self.ensemble_size < 1:
            raise ContractViolation("ensemble_size must be positive")
        if self.sampler_growth < 0:
            raise ContractViolation(
                "sampler growth must be nonnegative (polynomial, hence tempered)"
            )
        if not (self.prune_tol > 0 and self.section_tol > 0):
            raise ContractViolation("tolerances must be positive")

    def sampler_radius_at(self, tau: float) -> float:
        return self.sampler_radius * (1.0 + abs(tau)) ** self.sampler_growth


@dataclass(frozen=True)
class SectionResult:
    """One converged section with its convergence evidence."""

    time: float
    cloud: SetCloud
    horizon: float
    gap: float
    gap_history: tuple[float, ...]


def _sample_ball(model: ProcessModel, radius: float, n: int, seed: int) -> np.ndarray:
    """n points uniform in the metric ball of the given radius."""
    rng = generator(seed)
    d = model.dimension
    if d == 1:
        return rng.uniform(-radius, radius, size=(n, 1))
    v = rng.normal(size=(n, d))
    v /= np.linalg.norm(v * model.metric.scale(), axis=1, keepdims=True)
    r = radius * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / d)
    return (v * r) / model.metric.scale()


def _horizon_cloud(
    model: ProcessModel, t: float, h: float, cfg: PullbackConfig
) -> SetCloud:
    tau = t - h
    points = _sample_ball(
        model,
        cfg.sampler_radius_at(tau),
        cfg.ensemble_size,
        stable_seed(cfg.seed, model.name, t, h, "init"),
    )
    rules = model.selection_space.ensemble_rules(
        cfg.ensemble_size, stable_seed(cfg.seed, model.name, t, "sel")
    )
    final = evolve_points(model, tau, points, t, rules)
    return prune(SetCloud(final, model.metric), cfg.prune_tol)


def pullback_section(model: ProcessModel, t: float, cfg: PullbackConfig) -> SectionResult:
    """Section A(t) via the Cauchy-stopped pullback iteration.

    Clouds are computed for increasing horizons; the first cloud whose
    Hausdorff distance to the next horizon's cloud falls below
    section_tol is returned with that gap attached.
    """
    prev_cloud = None
    prev_h = math.nan
    gaps: list[float] = []
    for h in cfg.horizons:
        cloud = _horizon_cloud(model, t, h, cfg)
        if prev_cloud is not None:
            gap = hausdorff(prev_cloud, cloud)
            gaps.append(gap)
            if gap < cfg.section_tol:
                return SectionResult(t, prev_cloud, prev_h, gap, tuple(gaps))
        prev_cloud, prev_h = cloud, h
    raise HorizonExhaustedError(gaps)


@dataclass(frozen=True)
class AttractorFamily:
    """Attractor sections over a time grid, with their pullback evidence."""

    model: ProcessModel
    grid: tuple[float, ...]
    results: tuple[SectionResult, ...]
    config: PullbackConfig

    def __post_init__(self):
        if len(self.grid) != len(self.results) or not self.grid:
            raise ContractViolation("one section per grid time required")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ContractViolation("grid must be strictly increasing")

    def grid_times(self) -> tuple[float, ...]:
        return self.grid

    def span(self) -> float:
        return self.grid[-1] - self.grid[0]

    def index_of(self, t: float) -> int:
        k = int(np.argmin(np.abs(np.asarray(self.grid) - t)))
        if abs(self.grid[k] - t) > _LATTICE_TOL * max(1.0, abs(t)):
            raise ContractViolation(f"time {t!r} is not on the family grid")
        return k

    def cloud_at(self, t: float) -> SetCloud:
        return self.results[self.index_of(t)].cloud

    def section_or_compute(self, t: float) -> SetCloud:
        """Section at t, computed on demand when absent from the grid."""
        try:
            return self.cloud_at(t)
        except ContractViolation:
            return pullback_section(self.model, t, self.config).cloud

    @classmethod
    def from_clouds(cls, model, grid, clouds, config) -> "AttractorFamily":
        """Wrap externally supplied clouds (used for candidate families)."""
        results = tuple(
            SectionResult(float(t), c, math.nan, 0.0, ())
            for t, c in zip(grid, clouds)
        )
        return cls(model, tuple(float(t) for t in grid), results, config)


def attractor_family(
    model: ProcessModel, grid, cfg: PullbackConfig
) -> AttractorFamily:
    """One pullback section per grid time; sections are independent."""
    ts = tuple(float(t) for t in grid)
    if not ts:
        raise ContractViolation("grid must be nonempty")
    results = tuple(pullback_section(model, t, cfg) for t in ts)
    return AttractorFamily(model, ts, results, cfg)


# ---------------------------------------------------------------------------
# limit sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitResult:
    """A stabilised tail-union cloud with its stabilisation evidence."""

    cloud: SetCloud
    gaps: tuple[float, ...]
    diameters: tuple[float, ...]
    stable: bool


def _tail_union(
    family: AttractorFamily, fractions, forward: bool
) -> list[SetCloud]:
    fracs = sorted(set(float(f) for f in fractions), reverse=True)
    if len(fracs) < 3:
        raise ContractViolation("need at least 3 distinct tail windows")
    span = family.span()
    clouds = []
    for f in fracs:
        if forward:
            cut = family.grid[-1] - f * span
            members = [r.cloud for r, t in zip(family.results, family.grid) if t >= cut - _LATTICE_TOL]
        else:
            cut = family.grid[0] + f * span
            members = [r.cloud for r, t in zip(family.results, family.grid) if t <= cut + _LATTICE_TOL]
        if not members:
            raise ContractViolation("a tail window contains no sections")
        pts = np.concatenate([c.points for c in members])
        clouds.append(prune(SetCloud(pts, family.model.metric), family.config.prune_tol))
    return clouds


def _limit(family, fractions, forward: bool) -> LimitResult:
    clouds = _tail_union(family, fractions, forward)
    gaps = tuple(hausdorff(a, b) for a, b in zip(clouds, clouds[1:]))
    diams = tuple(c.diameter() for c in clouds)
    stable = max(gaps) <= family.config.section_tol
    return LimitResult(clouds[-1], gaps, diams, stable)


def forward_limit(
    family: AttractorFamily, tail_fractions=DEFAULT_TAIL_FRACTIONS
) -> LimitResult:
    """Approximate limit set of the sections as t -> +infinity.

    The nested-intersection definition is replaced by pruned unions over
    shrinking right tail windows; the gap between successive windows is
    the stabilisation evidence.  An unstable tail is flagged, the cloud is
    still returned.
    """
    return _limit(family, tail_fractions, forward=True)


def backward_limit(
    family: AttractorFamily, tail_fractions=DEFAULT_TAIL_FRACTIONS
) -> LimitResult:
    """Mirror of :func:`forward_limit` over left tail windows."""
    return _limit(family, tail_fractions, forward=False)


def tail_compactness(
    family: AttractorFamily, forward: bool = True, tail_fractions=DEFAULT_TAIL_FRACTIONS
) -> LimitResult:
    """Compactness proxy for the tail of a family.

    On finite data compactness is witnessed by stabilising eps-nets of the
    tail unions together with bounded, non-growing diameters; the returned
    ``stable`` flag combines both.
    """
    res = _limit(family, tail_fractions, forward)
    diam_ok = all(
        b <= a + 2.0 * family.config.section_tol
        for a, b in zip(res.diameters, res.diameters[1:])
    )
    return replace(res, stable=res.stable and diam_ok)


def autonomous_attractor(
    model: ProcessModel,
    absorb_radius: float,
    settle_time: float,
    cfg: PullbackConfig,
) -> SetCloud:
    """Global attractor of a time-independent model by forward settling.

    An ensemble sampled from the absorbing ball is evolved for
    settle_time; doubling the time must move the pruned cloud by less
    than section_tol, otherwise the run is rejected as unsettled.
    """
    if not model.time_independent:
        raise ContractViolation("autonomous_attractor needs a time-independent model")
    points = _sample_ball(
        model, absorb_radius, cfg.ensemble_size, stable_seed(cfg.seed, model.name, "auto")
    )
    rules = model.selection_space.ensemble_rules(
        cfg.ensemble_size, stable_seed(cfg.seed, model.name, "auto-sel")
    )
    mid = evolve_points(model, 0.0, points, settle_time, rules)
    end = evolve_points(model, settle_time, mid, 2.0 * settle_time, rules)
    cloud_mid = prune(SetCloud(mid, model.metric), cfg.prune_tol)
    cloud_end = prune(SetCloud(end, model.metric), cfg.prune_tol)
    gap = hausdorff(cloud_mid, cloud_end)
    if gap >= cfg.section_tol:
        raise NonSettlingError(gap, cfg.section_tol)
    return cloud_mid


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiInvarianceReport:
    """Orbit-shadowing certification over a family."""

    fraction_certified: float
    worst_excursion: float
    attempted: int
    certified: int
    failures: tuple[tuple[float, int, str], ...]  # (anchor time, point index, reason)


def quasi_invariance_check(
    model: ProcessModel,
    family: AttractorFamily,
    depth: float,
    tol: float,
    n_bridge: int = 9,
) -> QuasiInvarianceReport:
    """Certify that section points lie on orbits that stay in the family.

    Every point of every section whose backward window is covered by the
    grid is extended depth units backward and then shadowed forward to the
    end of the grid; it is certified when all junction gaps and forward
    excursions from the corresponding sections stay within tol.
    """
    grid = np.asarray(family.grid)
    controls = model.selection_space.bridge_controls(n_bridge)
    w = model.metric.weights
    attempted = certified = 0
    worst = 0.0
    failures: list[tuple[float, int, str]] = []
    for idx, t in enumerate(grid):
        if t - depth < grid[0] - _LATTICE_TOL:
            continue
        pts = family.results[idx].cloud.points
        for j in range(pts.shape[0]):
            attempted += 1
            excursion = 0.0
            try:
                orbit = extend_backward(model, float(t), pts[j], family, depth, tol, n_bridge)
                excursion = float(orbit.gaps.max()) if orbit.gaps.size else 0.0
            except Exception as exc:  # no-predecessor or divergence
                failures.append((float(t), j, type(exc).__name__))
                continue
            current = pts[j]
            ok = True
            for k in range(idx, len(grid) - 1):
                images, p_idx, _ = bridge_images(
                    model, float(grid[k]), float(grid[k + 1]), current[None, :], controls
                )
                target = family.results[k + 1].cloud.points
                d_sec = np.sqrt(
                    np.min(
                        np.sum(w * (images[:, None, :] - target[None, :, :]) ** 2, axis=2),
                        axis=1,
                    )
                )
                best = int(np.argmin(d_sec))
                excursion = max(excursion, float(d_sec[best]))
                if d_sec[best] > tol:
                    failures.append((float(t), j, "forward-excursion"))
                    ok = False
                    break
                current = images[best]
            if ok:
                certified += 1
                worst = max(worst, excursion)
    fraction = certified / attempted if attempted else 0.0
    return QuasiInvarianceReport(fraction, worst, attempted, certified, tuple(failures))


@dataclass(frozen=True)
class AttractionReport:
    """Semidistances of evolved ensembles to a candidate compact family."""

    grid: tuple[float, ...]
    horizons: tuple[float, ...]
    eps: np.ndarray  # shape (len(grid), len(horizons))
    monotone: bool
    verdict: bool


def selected_attraction_check(
    model: ProcessModel, candidate: AttractorFamily, cfg: PullbackConfig
) -> AttractionReport:
    """Measure eps(t, h) = semidist(evolved cloud from t-h, K(t)).

    The verdict is true when, for every grid time, the eps sequence over
    deepening horizons ends below section_tol; monotone decay (up to
    section_tol slack) is reported separately.
    """
    eps = np.empty((len(candidate.grid), len(cfg.horizons)))
    for i, t in enumerate(candidate.grid):
        target = candidate.results[i].cloud
        for j, h in enumerate(cfg.horizons):
            evolved = _horizon_cloud(model, float(t), float(h), cfg)
            eps[i, j] = semidist(evolved, target)
    monotone = bool(
        np.all(eps[:, 1:] <= eps[:, :-1] + cfg.section_tol)
    )
    verdict = bool(np.all(eps[:, -1] <= cfg.section_tol))
    return AttractionReport(
        candidate.grid, cfg.horizons, eps, monotone, verdict and monotone
    )
