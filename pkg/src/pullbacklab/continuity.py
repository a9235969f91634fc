"""Numerical verification of continuity and limit behaviour of sections.

Each check produces a :class:`ConvergenceTable`: abscissae, measured set
distances, an optional fitted rate, and a verdict at a stated tolerance.
Limit verdicts use "eventually below tol with a nonincreasing trend over
the last three abscissae", which is robust to pullback noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attractor import (
    AttractorFamily,
    DEFAULT_TAIL_FRACTIONS,
    tail_compactness,
)
from .errors import ContractViolation
from .metric import SetCloud, hausdorff, semidist
from .process import ProcessModel, solve
from .rng import stable_seed

__all__ = [
    "ConvergenceTable",
    "continuity_modulus",
    "forward_convergence",
    "backward_convergence",
    "asymptotic_autonomy_check",
    "autonomous_tracking",
    "backward_autonomous_tracking",
]


@dataclass(frozen=True)
class ConvergenceTable:
    """Distances against abscissae with a verdict at a stated tolerance."""

    label: str
    abscissae: np.ndarray
    distances: np.ndarray
    tol: float
    verdict: bool
    fit: float | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.abscissae, dtype=float)
        d = np.asarray(self.distances, dtype=float)
        if a.shape != d.shape or a.ndim != 1:
            raise ContractViolation("abscissae/distances must be matching vectors")
        if np.any(np.diff(a) <= 0):
            raise ContractViolation("abscissae must be strictly increasing")
        if not np.all(np.isfinite(d)):
            raise ContractViolation("distances must be finite")
        a.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "abscissae", a)
        object.__setattr__(self, "distances", d)

    def rows(self):
        return zip(self.abscissae.tolist(), self.distances.tolist())


def _eventually_below(distances: np.ndarray, tol: float, slack: float) -> bool:
    """Last three entries below tol and nonincreasing up to slack."""
    if distances.shape[0] < 3:
        return bool(np.all(distances <= tol))
    tail = distances[-3:]
    return bool(np.all(tail <= tol) and np.all(np.diff(tail) <= slack))


def continuity_modulus(
    family: AttractorFamily, t: float, deltas
) -> ConvergenceTable:
    """Hausdorff modulus of the section map around t.

    Rows hold signed offsets ±delta against dist_H(A(t+offset), A(t)).
    A slope is fitted through the origin by least squares; the verdict
    accepts when every distance is within 2 * section_tol of the fitted
    linear modulus, i.e. when the distances genuinely shrink with delta.
    """
    deltas = sorted(float(d) for d in deltas)
    if not deltas or deltas[0] <= 0:
        raise ContractViolation("deltas must be positive")
    base = family.section_or_compute(t)
    offsets = [-d for d in reversed(deltas)] + deltas
    dists = np.array(
        [hausdorff(family.section_or_compute(t + o), base) for o in offsets]
    )
    offs = np.array(offsets)
    slope = float(np.sum(dists * np.abs(offs)) / np.sum(offs**2))
    tol = 2.0 * family.config.section_tol
    verdict = bool(np.all(dists <= slope * np.abs(offs) + tol))
    return ConvergenceTable(
        label=f"continuity t={t:g}",
        abscissae=offs,
        distances=dists,
        tol=tol,
        verdict=verdict,
        fit=slope,
    )


def _convergence(
    family: AttractorFamily, limit: SetCloud, tol: float | None, forward: bool, label: str
) -> ConvergenceTable:
    tol = 2.0 * family.config.section_tol if tol is None else tol
    dists = np.array([semidist(r.cloud, limit) for r in family.results])
    ordered = dists if forward else dists[::-1]
    proxy = tail_compactness(family, forward=forward)
    verdict = _eventually_below(ordered, tol, family.config.section_tol) and proxy.stable
    return ConvergenceTable(
        label=label,
        abscissae=np.asarray(family.grid),
        distances=dists,
        tol=tol,
        verdict=verdict,
        notes={
            "compactness_proxy": proxy.stable,
            "tail_gaps": proxy.gaps,
            "tail_diameters": proxy.diameters,
        },
    )


def forward_convergence(
    family: AttractorFamily, limit: SetCloud, tol: float | None = None
) -> ConvergenceTable:
    """semidist(A(t), limit) over the grid, verdict for t -> +infinity.

    The verdict also requires the forward-compactness proxy of the family
    (stable tail unions), matching the hypothesis under which convergence
    to the forward limit set is asserted.
    """
    return _convergence(family, limit, tol, True, "forward-convergence")


def backward_convergence(
    family: AttractorFamily, limit: SetCloud, tol: float | None = None
) -> ConvergenceTable:
    """Mirror of :func:`forward_convergence` for t -> -infinity."""
    return _convergence(family, limit, tol, False, "backward-convergence")


def asymptotic_autonomy_check(
    model: ProcessModel,
    autonomous_model: ProcessModel,
    family: AttractorFamily,
    t_offsets,
    tau_list,
    tol: float,
) -> ConvergenceTable:
    """Deviation of attractor-borne solutions from autonomous ones.

    For each tau, a selected solution through the section point
    x_tau in A(tau) is compared on the offset window with the autonomous
    solution started from the same point; the row records the sup
    deviation.  Starting the comparison solution at x_tau (rather than at
    the limit of the x_tau, which the matched-index sequence converges to)
    gives the rate actually guaranteed by the difference estimate.
    """
    offs = np.asarray(sorted(float(o) for o in t_offsets))
    if offs.size == 0 or offs[0] < 0:
        raise ContractViolation("t_offsets must be nonnegative")
    taus = [float(v) for v in tau_list]
    horizon = float(offs[-1])
    devs = []
    rule = model.selection_space.canonical_rule(stable_seed("autonomy", model.name))
    for tau in taus:
        x_tau = family.section_or_compute(tau).points[0]
        full = solve(model, tau, x_tau, tau + horizon, rule)
        frozen = solve(
            autonomous_model,
            0.0,
            x_tau,
            horizon,
            autonomous_model.selection_space.canonical_rule(),
        )
        k_full = [full.index_of(tau + o) for o in offs]
        k_auto = [frozen.index_of(o) for o in offs]
        diff = full.states[k_full] - frozen.states[k_auto]
        w = model.metric.weights
        devs.append(float(np.max(np.sqrt(np.sum(w * diff**2, axis=1)))))
    dists = np.asarray(devs)
    verdict = _eventually_below(dists, tol, family.config.section_tol)
    return ConvergenceTable(
        label="asymptotic-autonomy",
        abscissae=np.asarray(taus),
        distances=dists,
        tol=tol,
        verdict=verdict,
    )


def autonomous_tracking(
    family: AttractorFamily, a_inf: SetCloud, tol: float | None = None
) -> ConvergenceTable:
    """semidist(A(t), A_inf) over the grid plus the forward-compactness proxy.

    Reporting the proxy alongside the distances covers both directions of
    the tracking equivalence: decay of the distances under the proxy, and
    the proxy as the conclusion recovered from decay.
    """
    return _convergence(family, a_inf, tol, True, "autonomous-tracking")


def backward_autonomous_tracking(
    family: AttractorFamily, a_inf: SetCloud, tol: float | None = None
) -> ConvergenceTable:
    """Mirror of :func:`autonomous_tracking` for t -> -infinity."""
    return _convergence(family, a_inf, tol, False, "backward-autonomous-tracking")
