"""ODE testbeds with closed-form oracles.

Three scalar models exercise the attractor machinery:

* ``linear``     x' = -x + b(t)        single valued, explicit pullback solution
* ``cubic``      x' = -x**3 + g(t)     monotone nonlinearity
* ``inclusion``  x' = -x + u, |u|<=eps genuinely multivalued

Every oracle here is computed by quadrature or closed form, never by the
package's own time stepping, so agreement between the two routes is a real
test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import ContractViolation, IntegralDivergenceError
from .metric import MetricDescriptor, SetCloud
from .process import ProcessModel, SelectionSpace

__all__ = [
    "BenchmarkSpec",
    "FORCINGS",
    "make_linear",
    "make_cubic",
    "make_inclusion",
    "build",
    "linear_pullback_oracle",
    "inclusion_bruteforce_oracle",
]

# Named scalar forcings usable from config files.  "decay"-type forcings
# freeze at their t=0 value for t < 0 so backward dynamics stay tame.
FORCINGS: dict[str, Callable[[float], float]] = {
    "zero": lambda t: 0.0,
    "one": lambda t: 1.0,
    "sin": math.sin,
    "decay": lambda t: math.exp(-max(t, 0.0)),
    "one-plus-decay": lambda t: 1.0 + math.exp(-max(t, 0.0)),
}


@dataclass(frozen=True)
class BenchmarkSpec:
    """Constructor arguments for one testbed model."""

    kind: str  # linear | cubic | inclusion
    forcing: str = "zero"
    eps: float = 1.0
    dt: float = 1e-3
    switch_period: float = 0.5

    def __post_init__(self):
        if self.kind not in ("linear", "cubic", "inclusion"):
            raise ContractViolation(f"unknown benchmark kind {self.kind!r}")
        if self.kind != "inclusion" and self.forcing not in FORCINGS:
            raise ContractViolation(f"unknown forcing {self.forcing!r}")
        if self.eps < 0:
            raise ContractViolation("inclusion radius must be nonnegative")


def make_linear(
    b: Callable[[float], float], name: str = "linear", dt: float = 1e-3
) -> ProcessModel:
    """x' = -x + b(t) as a single-valued model."""

    def rhs(t, X, u):
        return -X + b(t)

    return ProcessModel(
        name=name,
        dimension=1,
        rhs=rhs,
        selection_space=SelectionSpace(kind="singleton"),
        metric=MetricDescriptor.euclidean(1),
        dt=dt,
        time_independent=False,
    )


def make_cubic(
    g: Callable[[float], float], name: str = "cubic", dt: float = 1e-3
) -> ProcessModel:
    """x' = -x**3 + g(t); the scalar analog of a monotone reaction term."""

    def rhs(t, X, u):
        return -(X**3) + g(t)

    return ProcessModel(
        name=name,
        dimension=1,
        rhs=rhs,
        selection_space=SelectionSpace(kind="singleton"),
        metric=MetricDescriptor.euclidean(1),
        dt=dt,
        time_independent=False,
    )


def make_autonomous(kind: str, value: float = 0.0, dt: float = 1e-3) -> ProcessModel:
    """Frozen counterparts x' = -x + value or x' = -x**3 + value."""
    maker = make_linear if kind == "linear" else make_cubic
    model = maker(lambda t: value, name=f"{kind}-frozen-{value:g}", dt=dt)
    return replace(model, time_independent=True)


def make_inclusion(
    eps: float, dt: float = 1e-3, switch_period: float = 0.5, name: str = "inclusion"
) -> ProcessModel:
    """x' = -x + u with piecewise-constant controls |u| <= eps."""
    if eps < 0:
        raise ContractViolation("eps must be nonnegative")

    def rhs(t, X, u):
        return -X + u[:, None]

    return ProcessModel(
        name=f"{name}-{eps:g}",
        dimension=1,
        rhs=rhs,
        selection_space=SelectionSpace(
            kind="interval", radius=eps, switch_period=switch_period
        ),
        metric=MetricDescriptor.euclidean(1),
        dt=dt,
        time_independent=True,
    )


def build(spec: BenchmarkSpec) -> ProcessModel:
    if spec.kind == "linear":
        return make_linear(FORCINGS[spec.forcing], f"linear-{spec.forcing}", spec.dt)
    if spec.kind == "cubic":
        return make_cubic(FORCINGS[spec.forcing], f"cubic-{spec.forcing}", spec.dt)
    return make_inclusion(spec.eps, spec.dt, spec.switch_period)


def linear_pullback_oracle(
    b: Callable[[float], float], t: float, tol: float = 1e-10
) -> float:
    """The unique bounded complete solution of x' = -x + b(t), evaluated at t.

    Computed as the convolution integral of b against exp(-s) by adaptive
    quadrature, truncating the history once the tail increment falls below
    tol.  Raises when b grows too fast for the integral to exist.
    """
    total = 0.0
    lo, hi = 0.0, 1.0
    prev_inc = math.inf
    for _ in range(64):
        inc, _ = quad(lambda s: math.exp(-s) * b(t - s), lo, hi, epsabs=tol / 8, limit=200)
        total += inc
        if abs(inc) < tol and abs(inc) <= abs(prev_inc):
            return total
        if abs(inc) > max(abs(prev_inc), 1.0 / tol):
            break
        prev_inc = inc
        lo, hi = hi, 2.0 * hi
    raise IntegralDivergenceError(
        "history integral did not converge; forcing growth looks inadmissible"
    )


def inclusion_bruteforce_oracle(
    eps: float, horizon: float, n_switches: int
) -> SetCloud:
    """Reachable pullback endpoints of all enumerated bang-bang selections.

    Starting from x = 0 a horizon ago, every selection constant on the
    intervals between n_switches switch points contributes the endpoint
    sum of signed response weights; all 2**(n_switches+1) sign patterns
    are enumerated in closed form.

    Switch points sit on a uniform grid ending at the observation time
    with spacing ln 2, so each interval's integrated response is half the
    previous one and the endpoint sums fill the reachable interval
    [-eps(1-e^-horizon), eps(1-e^-horizon)] with near-uniform gaps.
    """
    if eps < 0:
        raise ContractViolation("eps must be nonnegative")
    if n_switches < 0 or n_switches > 16:
        raise ContractViolation("n_switches must lie in [0, 16]")
    if not horizon > 0:
        raise ContractViolation("horizon must be positive")
    metric = MetricDescriptor.euclidean(1)
    if eps == 0.0:
        return SetCloud(np.zeros((1, 1)), metric)
    spacing = min(math.log(2.0), horizon / (n_switches + 1))
    # interval edges measured as s - t (history coordinates, 0 at observation)
    edges = np.concatenate(
        [[-horizon], -spacing * np.arange(n_switches, -1, -1.0)]
    )
    weights = np.exp(edges[1:]) - np.exp(edges[:-1])
    n_int = weights.shape[0]
    masks = ((np.arange(2**n_int)[:, None] >> np.arange(n_int)) & 1) * 2.0 - 1.0
    endpoints = eps * (masks @ weights)
    return SetCloud(np.unique(endpoints)[:, None], metric)
