"""Degenerate diffusion on (0, 1) with dynamic boundary conditions.

Semi-discrete model on N interior nodes plus the two boundary traces,
which evolve as state variables of their own:

    u_t = d/dx Phi(u_x) - f1(t, u) + g1(t, x)        in (0, 1)
    u_t = -(outward flux) - f2(t, u) + g2(t)          at x = 0 and x = 1

with the regularised flux Phi(w) = (w^2 + eps_reg)^((p-2)/2) w, one-sided
gradients at the cell interfaces, and p > 2.  State vectors are laid out
as [trace(0), u_1, ..., u_N, trace(1)].

The natural norm combines the trapezoid rule on the interval with unit
point masses at the two boundary points; the same weights drive the
metric used by the attractor machinery, so both agree by construction.

Time stepping is semi-implicit Euler: flux coefficients are frozen at the
current state, giving a diagonally dominant tridiagonal system (solved by
a batched Thomas sweep); the reaction terms are explicit.  Non-uniqueness
of the continuum problem is modelled by a finite family of solver
variants (flux regularisations x substep refinements) acting as the
selection space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .continuity import ConvergenceTable
from .errors import ContractViolation, IntegralDivergenceError
from .metric import MetricDescriptor
from .process import ProcessModel, SelectionSpace, Trajectory

__all__ = [
    "PLapConfig",
    "DiscreteField",
    "default_config",
    "metric_descriptor",
    "x2_norm",
    "plap_rhs",
    "step",
    "make_plap_model",
    "make_frozen_plap_model",
    "DEFAULT_VARIANTS",
    "dissipativity_check",
    "forcing_tail",
    "k_integral_sups",
    "absorbing_radius",
    "absorbing_radius_sup",
    "cross_monotonicity_check",
    "gronwall_bound",
]

DEFAULT_VARIANTS: tuple[tuple[float, int], ...] = (
    (1e-6, 1),
    (1e-8, 1),
    (1e-10, 1),
    (1e-6, 2),
    (1e-8, 2),
    (1e-10, 2),
)


@dataclass(frozen=True)
class PLapConfig:
    """Data of the evolution problem and of its frozen limit.

    r_growth holds the exponents of the coercivity bound
    ``a_i(t) |s|**r_growth_i - k_i(t) <= f_i(t, s) s``; the norm exponent
    2r - 2 used by the forcing integrals comes from ``r``.  The defaults
    set r_growth_i = r + 1 = 4 with r = 3 (so 2r - 2 = 4), which is the
    smallest consistent choice; both are plain configuration.

    c0, c_big scale the absorbing radius and c_rate is the exponential
    rate of the comparison bound; none of them is pinned by the model, so
    all three default to 1.
    """

    p: float = 3.0
    r: float = 3.0
    n_interior: int = 17
    theta: float = 1.0
    eps_reg: float = 1e-8
    a0: float = 1.0
    r_growth: tuple[float, float] = (4.0, 4.0)
    c0: float = 1.0
    c_big: float = 1.0
    c_rate: float = 1.0
    dt: float = 1e-3
    f1: Callable = None
    f2: Callable = None
    f1_limit: Callable = None
    f2_limit: Callable = None
    a_coef: tuple[Callable, Callable] = None
    k_coef: tuple[Callable, Callable] = None
    growth_coef: tuple[Callable, Callable] = None
    g1: Callable = None
    g2: Callable = None
    g1_limit: Callable = None
    g2_limit: np.ndarray = None

    def __post_init__(self):
        if not (self.p > 2 and self.r > 2):
            raise ContractViolation("need p > 2 and r > 2")
        if self.n_interior < 1 or self.eps_reg <= 0 or self.dt <= 0:
            raise ContractViolation("bad discretisation parameters")
        if not self.a0 > 0:
            raise ContractViolation("a0 must be positive")

    @property
    def h(self) -> float:
        return 1.0 / (self.n_interior + 1)

    @property
    def norm_power(self) -> float:
        return 2.0 * self.r - 2.0

    def nodes(self) -> np.ndarray:
        """All node coordinates, boundary points included."""
        return np.linspace(0.0, 1.0, self.n_interior + 2)

    def interior_nodes(self) -> np.ndarray:
        return self.nodes()[1:-1]


def _default_decay(t: float) -> float:
    return math.exp(-max(t, 0.0))


def default_config(n_interior: int = 17, dt: float = 1e-3, **overrides) -> PLapConfig:
    """Smallest data set exercising every checker.

    Cubic reaction on both the interval and the boundary, forcings that
    decay exponentially to constant limits (frozen at their t = 0 values
    for t < 0), and the constant field 1 as the exact steady state of the
    frozen problem.
    """
    cube = lambda t, s: s**3
    cfg = PLapConfig(
        n_interior=n_interior,
        dt=dt,
        f1=cube,
        f2=cube,
        f1_limit=lambda s: s**3,
        f2_limit=lambda s: s**3,
        a_coef=(lambda t: 1.0, lambda t: 1.0),
        k_coef=(lambda t: 1.0, lambda t: 1.0),
        growth_coef=(lambda t: 1.5, lambda t: 1.5),
        g1=lambda t, x: 1.0 + _default_decay(t) * (1.0 + 0.5 * np.cos(np.pi * x)),
        g2=lambda t: np.array([1.0, 1.0]) + 0.5 * _default_decay(t),
        g1_limit=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        g2_limit=np.array([1.0, 1.0]),
    )
    return replace(cfg, **overrides) if overrides else cfg


@dataclass(frozen=True)
class DiscreteField:
    """One element of the product state space: interior values plus traces."""

    interior: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        inner = np.asarray(self.interior, dtype=float)
        bnd = np.asarray(self.boundary, dtype=float)
        if bnd.shape != (2,):
            raise ContractViolation("boundary must hold exactly two values")
        if not (np.all(np.isfinite(inner)) and np.all(np.isfinite(bnd))):
            raise ContractViolation("field values must be finite")
        inner.setflags(write=False)
        bnd.setflags(write=False)
        object.__setattr__(self, "interior", inner)
        object.__setattr__(self, "boundary", bnd)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.boundary[0]], self.interior, [self.boundary[1]]])

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "DiscreteField":
        v = np.asarray(v, dtype=float)
        return cls(v[1:-1], np.array([v[0], v[-1]]))

    @classmethod
    def constant(cls, value: float, cfg: PLapConfig) -> "DiscreteField":
        return cls(np.full(cfg.n_interior, value), np.array([value, value]))


def _trap_weights(cfg: PLapConfig) -> np.ndarray:
    w = np.full(cfg.n_interior + 2, cfg.h)
    w[0] = w[-1] = 0.5 * cfg.h
    return w


def metric_descriptor(cfg: PLapConfig) -> MetricDescriptor:
    """Quadrature weights of the product norm: trapezoid plus point masses."""
    w = _trap_weights(cfg)
    w[0] += 1.0
    w[-1] += 1.0
    return MetricDescriptor(cfg.n_interior + 2, w)


def omega_power_sum(values: np.ndarray, power: float, cfg: PLapConfig) -> float:
    """Trapezoid value of |v|**power over the interval (all nodes)."""
    return float(np.sum(_trap_weights(cfg) * np.abs(values) ** power))


def gamma_power_sum(values: np.ndarray, power: float) -> float:
    """Sum of |v|**power over the two boundary point masses."""
    return float(np.sum(np.abs(np.asarray(values, dtype=float)) ** power))


def x2_norm(u, cfg: PLapConfig) -> float:
    """Product norm: sqrt(interval quadrature of u^2 + boundary squares)."""
    v = u.to_vector() if isinstance(u, DiscreteField) else np.asarray(u, dtype=float)
    return float(np.sqrt(omega_power_sum(v, 2.0, cfg) + gamma_power_sum([v[0], v[-1]], 2.0)))


# ---------------------------------------------------------------------------
# spatial operator and time stepping
# ---------------------------------------------------------------------------

def _flux(w: np.ndarray, cfg: PLapConfig, eps_reg: float | None = None) -> np.ndarray:
    eps = cfg.eps_reg if eps_reg is None else eps_reg
    return (w * w + eps) ** (0.5 * (cfg.p - 2.0)) * w


def _rhs_batch(V: np.ndarray, t: float, cfg: PLapConfig, eps_reg=None) -> np.ndarray:
    h = cfg.h
    w = np.diff(V, axis=1) / h
    flux = _flux(w, cfg, eps_reg)
    out = np.empty_like(V)
    out[:, 1:-1] = (
        np.diff(flux, axis=1) / h
        - cfg.f1(t, V[:, 1:-1])
        + cfg.g1(t, cfg.interior_nodes())
    )
    g2 = np.asarray(cfg.g2(t), dtype=float)
    out[:, 0] = flux[:, 0] - cfg.f2(t, V[:, 0]) + g2[0]
    out[:, -1] = -flux[:, -1] - cfg.f2(t, V[:, -1]) + g2[1]
    return out


def plap_rhs(u: DiscreteField, t: float, cfg: PLapConfig) -> DiscreteField:
    """Right-hand side of the semi-discrete system at one field.

    The boundary rows carry the negated outward flux: the one-sided
    gradient into the domain enters with + at x = 0 and with - at x = 1.
    """
    out = _rhs_batch(u.to_vector()[None, :], t, cfg)[0]
    return DiscreteField.from_vector(out)


def _tridiag_solve(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Thomas sweep, vectorised over the leading batch axis."""
    n = b.shape[1]
    cp = np.empty_like(b)
    dp = np.empty_like(b)
    piv = b[:, 0]
    if np.any(piv == 0.0):
        raise ContractViolation("singular tridiagonal system")
    cp[:, 0] = c[:, 0] / piv
    dp[:, 0] = d[:, 0] / piv
    for i in range(1, n):
        piv = b[:, i] - a[:, i] * cp[:, i - 1]
        if np.any(piv == 0.0):
            raise ContractViolation("singular tridiagonal system")
        cp[:, i] = c[:, i] / piv
        dp[:, i] = (d[:, i] - a[:, i] * dp[:, i - 1]) / piv
    x = np.empty_like(b)
    x[:, -1] = dp[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[:, i] * x[:, i + 1]
    return x


def _step_batch(
    V: np.ndarray, t: float, dt: float, cfg: PLapConfig, eps_reg=None
) -> np.ndarray:
    h = cfg.h
    w = np.diff(V, axis=1) / h
    eps = cfg.eps_reg if eps_reg is None else eps_reg
    D = (w * w + eps) ** (0.5 * (cfg.p - 2.0))  # frozen interface coefficients
    m, n = V.shape
    a = np.zeros((m, n))
    b = np.ones((m, n))
    c = np.zeros((m, n))
    r = dt / (h * h)
    a[:, 1:-1] = -r * D[:, :-1]
    c[:, 1:-1] = -r * D[:, 1:]
    b[:, 1:-1] = 1.0 + r * (D[:, :-1] + D[:, 1:])
    rb = dt / h
    b[:, 0] = 1.0 + rb * D[:, 0]
    c[:, 0] = -rb * D[:, 0]
    b[:, -1] = 1.0 + rb * D[:, -1]
    a[:, -1] = -rb * D[:, -1]
    rhs = np.empty_like(V)
    rhs[:, 1:-1] = V[:, 1:-1] + dt * (
        cfg.g1(t, cfg.interior_nodes()) - cfg.f1(t, V[:, 1:-1])
    )
    g2 = np.asarray(cfg.g2(t), dtype=float)
    rhs[:, 0] = V[:, 0] + dt * (g2[0] - cfg.f2(t, V[:, 0]))
    rhs[:, -1] = V[:, -1] + dt * (g2[1] - cfg.f2(t, V[:, -1]))
    return _tridiag_solve(a, b, c, rhs)


def step(u: DiscreteField, t: float, dt: float, cfg: PLapConfig) -> DiscreteField:
    """One semi-implicit Euler step (implicit frozen flux, explicit reaction)."""
    if not dt > 0:
        raise ContractViolation("dt must be positive")
    return DiscreteField.from_vector(_step_batch(u.to_vector()[None, :], t, dt, cfg)[0])


def make_plap_model(
    cfg: PLapConfig,
    variants: Sequence[tuple[float, int]] = DEFAULT_VARIANTS,
    name: str = "plap",
    time_independent: bool = False,
) -> ProcessModel:
    """Wrap the discretisation as a process with solver-variant selections.

    Variant i of the selection space integrates with its own flux
    regularisation and substep count, standing in for the different
    solution branches of the non-unique continuum problem.
    """
    variants = tuple((float(e), int(s)) for e, s in variants)

    def stepper(t, X, u, dt):
        out = np.empty_like(X)
        vid = u.astype(int)
        for v in np.unique(vid):
            eps, nsub = variants[v]
            sub = X[vid == v]
            tt, ddt = t, dt / nsub
            for _ in range(nsub):
                sub = _step_batch(sub, tt, ddt, cfg, eps)
                tt += ddt
            out[vid == v] = sub
        return out

    return ProcessModel(
        name=name,
        dimension=cfg.n_interior + 2,
        rhs=None,
        selection_space=SelectionSpace(kind="variants", n_variants=len(variants)),
        metric=metric_descriptor(cfg),
        dt=cfg.dt,
        scheme="custom",
        stepper=stepper,
        time_independent=time_independent,
        theta=cfg.theta,
    )


def frozen_config(cfg: PLapConfig) -> PLapConfig:
    """Config of the limit problem: forcings and reactions at their limits."""
    g2l = np.asarray(cfg.g2_limit, dtype=float)
    return replace(
        cfg,
        f1=lambda t, s: cfg.f1_limit(s),
        f2=lambda t, s: cfg.f2_limit(s),
        g1=lambda t, x: cfg.g1_limit(x),
        g2=lambda t: g2l,
    )


def make_frozen_plap_model(
    cfg: PLapConfig, variants=DEFAULT_VARIANTS, name: str = "plap-frozen"
) -> ProcessModel:
    return make_plap_model(frozen_config(cfg), variants, name, time_independent=True)


# ---------------------------------------------------------------------------
# structural checkers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DissipativityReport:
    passed: bool
    worst_lower: tuple[float, float]
    worst_growth: tuple[float, float]
    witnesses: dict


def dissipativity_check(cfg: PLapConfig, t_grid, s_grid) -> DissipativityReport:
    """Pointwise coercivity and growth control of the reaction terms.

    Checks  a_i(t) |s|**r_i - k_i(t) <= f_i(t, s) s  and
    |f_i(t, s)| <= growth_i(t) (|s|**(r_i - 1) + 1)  on the grids; a
    violation shows up as a negative margin with its witnessing (t, s).
    """
    ts = np.asarray(list(t_grid), dtype=float)
    ss = np.asarray(list(s_grid), dtype=float)
    if ts.size == 0 or ss.size == 0:
        raise ContractViolation("grids must be nonempty")
    worst_lower, worst_growth, witnesses = [], [], {}
    for i, (f, a, k, big, ri) in enumerate(
        [
            (cfg.f1, cfg.a_coef[0], cfg.k_coef[0], cfg.growth_coef[0], cfg.r_growth[0]),
            (cfg.f2, cfg.a_coef[1], cfg.k_coef[1], cfg.growth_coef[1], cfg.r_growth[1]),
        ]
    ):
        best = {"lower": math.inf, "growth": math.inf}
        for t in ts:
            fv = f(t, ss)
            margins = {
                "lower": fv * ss - (a(t) * np.abs(ss) ** ri - k(t)),
                "growth": big(t) * (np.abs(ss) ** (ri - 1.0) + 1.0) - np.abs(fv),
            }
            for tag, vals in margins.items():
                j = int(np.argmin(vals))
                if vals[j] < best[tag]:
                    best[tag] = float(vals[j])
                    witnesses[f"f{i+1}-{tag}"] = (float(t), float(ss[j]))
        worst_lower.append(best["lower"])
        worst_growth.append(best["growth"])
    passed = min(*worst_lower, *worst_growth) >= -1e-12
    return DissipativityReport(passed, tuple(worst_lower), tuple(worst_growth), witnesses)


def _forcing_gap_power(cfg: PLapConfig, s: float, power: float) -> float:
    nodes = cfg.nodes()
    d1 = np.asarray(cfg.g1(s, nodes), dtype=float) - cfg.g1_limit(nodes)
    d2 = np.asarray(cfg.g2(s), dtype=float) - np.asarray(cfg.g2_limit, dtype=float)
    return omega_power_sum(d1, power, cfg) + gamma_power_sum(d2, power)


def _adaptive_right_tail(integrand, lo: float, tol: float = 1e-12) -> float:
    """Integral over [lo, inf) by doubling truncation windows."""
    total = 0.0
    width = 1.0
    prev = math.inf
    for _ in range(48):
        inc, _ = quad(integrand, lo, lo + width, epsabs=tol / 16, limit=200)
        total += inc
        if abs(inc) < tol and abs(inc) <= abs(prev):
            return total
        if abs(inc) > abs(prev) * 1.0000001 and abs(prev) < math.inf and width > 4.0:
            raise IntegralDivergenceError("tail increments are not decaying")
        prev = inc
        lo += width
        width *= 2.0
    raise IntegralDivergenceError("tail integral did not converge")


def forcing_tail(cfg: PLapConfig, tau: float) -> float:
    """Integrated (2r-2)-distance of the forcing from its limit, past tau.

    Evaluates  int_tau^inf  ||g1(s) - g1_limit||^(2r-2) over the interval
    plus the boundary analog  ds  by adaptive truncation; raises when the
    integrand does not decay.
    """
    power = cfg.norm_power
    return _adaptive_right_tail(lambda s: _forcing_gap_power(cfg, s, power), tau)


def _adaptive_left_tail(integrand_shifted, t: float, theta: float, tol: float = 1e-12) -> float:
    """int_{-inf}^t e^{theta (s - t)} phi(s) ds by doubling history windows."""
    total = 0.0
    hi = t
    width = 1.0
    prev = math.inf
    for _ in range(48):
        inc, _ = quad(
            lambda s: math.exp(theta * (s - t)) * integrand_shifted(s),
            hi - width,
            hi,
            epsabs=tol / 16,
            limit=200,
        )
        total += inc
        if abs(inc) < tol and abs(inc) <= abs(prev):
            return total
        if abs(inc) > abs(prev) * 1.0000001 and abs(prev) < math.inf and width > 4.0:
            raise IntegralDivergenceError("history increments are not decaying")
        prev = inc
        hi -= width
        width *= 2.0
    raise IntegralDivergenceError("history integral did not converge")


@dataclass(frozen=True)
class KIntegralReport:
    grid: tuple[float, ...]
    linear: np.ndarray
    power: np.ndarray
    converged: np.ndarray
    sup_linear: float
    sup_power: float


def k_integral_sups(cfg: PLapConfig, t_grid) -> KIntegralReport:
    """Exponentially weighted history integrals of the coercivity offsets.

    For each grid time t the two integrals
      int_{-inf}^t e^{theta (s-t)} (k1 + k2)(s) ds     and
      int_{-inf}^t e^{theta (s-t)} (k1^(r-1) + k2^(r-1))(s) ds
    are evaluated by adaptive truncation; per-time divergence is flagged
    rather than raised, and a flagged entry makes the grid sup infinite.
    """
    ts = [float(t) for t in t_grid]
    if not ts:
        raise ContractViolation("t_grid must be nonempty")
    k1, k2 = cfg.k_coef
    rm1 = cfg.r - 1.0
    lin = np.empty(len(ts))
    pw = np.empty(len(ts))
    ok = np.ones(len(ts), dtype=bool)
    for i, t in enumerate(ts):
        try:
            lin[i] = _adaptive_left_tail(lambda s: k1(s) + k2(s), t, cfg.theta)
            pw[i] = _adaptive_left_tail(
                lambda s: k1(s) ** rm1 + k2(s) ** rm1, t, cfg.theta
            )
        except IntegralDivergenceError:
            lin[i] = pw[i] = math.inf
            ok[i] = False
    sup_l = float(lin.max()) if ok.all() else math.inf
    sup_p = float(pw.max()) if ok.all() else math.inf
    return KIntegralReport(tuple(ts), lin, pw, ok, sup_l, sup_p)


def absorbing_radius(cfg: PLapConfig, t: float) -> float:
    """Radius of the absorbing ball at time t.

    R(t)**p = c0 + c_big * (J_(2r-2)(t+1) + e^theta * J_2(t+1)) where
    J_q(T) is the exponentially weighted history integral of the q-th
    power forcing norms up to T.  The weights e^(-theta(t+1)) and
    e^(-theta t) of the two raw integrals are folded in analytically so
    large times cannot overflow.
    """
    T = t + 1.0
    j_high = _adaptive_left_tail(
        lambda s: _absolute_forcing_power(cfg, s, cfg.norm_power), T, cfg.theta
    )
    j_two = _adaptive_left_tail(
        lambda s: _absolute_forcing_power(cfg, s, 2.0), T, cfg.theta
    )
    val = cfg.c0 + cfg.c_big * (j_high + math.exp(cfg.theta) * j_two)
    return float(val ** (1.0 / cfg.p))


def _absolute_forcing_power(cfg: PLapConfig, s: float, power: float) -> float:
    nodes = cfg.nodes()
    v1 = np.asarray(cfg.g1(s, nodes), dtype=float)
    v2 = np.asarray(cfg.g2(s), dtype=float)
    return omega_power_sum(v1, power, cfg) + gamma_power_sum(v2, power)


def absorbing_radius_sup(cfg: PLapConfig, t_grid) -> float:
    """Grid supremum of the absorbing radius (uniform-boundedness helper)."""
    return max(absorbing_radius(cfg, float(t)) for t in t_grid)


@dataclass(frozen=True)
class CrossMonotonicityReport:
    taus: tuple[float, ...]
    worst_margins: np.ndarray
    passed: bool
    improving: bool


def cross_monotonicity_check(
    cfg: PLapConfig, alpha: Callable[[float, float], float], pairs
) -> CrossMonotonicityReport:
    """Alignment of the time-dependent reactions with their limits.

    For each pair (tau, U, V) of a full-problem trajectory U (times
    tau + t) and a frozen-problem trajectory V (times t), the two inner
    products
      <f1(t+tau, u) - f1_limit(v), u - v>   over the interval and
      <f2(t+tau, u) - f2_limit(v), u - v>   over the boundary
    must stay above -alpha(tau, t) pointwise in t.  Margins (value +
    alpha) are reported per tau together with whether the worst margin
    improves as tau grows.
    """
    taus, worst = [], []
    trap = None
    for tau, u_traj, v_traj in pairs:
        if u_traj.states.shape != v_traj.states.shape:
            raise ContractViolation("trajectory pair is not aligned")
        if trap is None:
            trap = _trap_weights(cfg)
        margins = []
        for k in range(v_traj.states.shape[0]):
            t_off = float(v_traj.times[k])
            u = u_traj.states[k]
            v = v_traj.states[k]
            fu = cfg.f1(t_off + tau, u)
            fv = cfg.f1_limit(v)
            ip1 = float(np.sum(trap * (fu - fv) * (u - v)))
            bu = np.array([u[0], u[-1]])
            bv = np.array([v[0], v[-1]])
            ip2 = float(
                np.sum((cfg.f2(t_off + tau, bu) - cfg.f2_limit(bv)) * (bu - bv))
            )
            al = float(alpha(tau, t_off))
            margins.append(min(ip1 + al, ip2 + al))
        taus.append(float(tau))
        worst.append(min(margins))
    worst_arr = np.asarray(worst)
    order = np.argsort(taus)
    improving = bool(np.all(np.diff(worst_arr[order]) >= -1e-12))
    return CrossMonotonicityReport(
        tuple(taus), worst_arr, bool(np.all(worst_arr >= -1e-12)), improving
    )


def _l2_forcing_tail(cfg: PLapConfig, tau: float, c: float) -> float:
    """int_0^inf e^(-c s) (squared forcing distance from the limit at s + tau) ds."""
    return _adaptive_right_tail(
        lambda s: math.exp(-c * s) * _forcing_gap_power(cfg, s + tau, 2.0), 0.0
    )


def gronwall_bound(
    cfg: PLapConfig,
    u_traj: Trajectory,
    v_traj: Trajectory,
    tau: float,
    c: float | None = None,
    alpha_sup: float = 0.0,
) -> ConvergenceTable:
    """Measured distance between shifted and frozen solutions vs its bound.

    The differential estimate
      d/dt ||W||^2 <= 4 alpha + c ||W||^2 + (squared forcing distance)
    integrates to
      ||W(t)||^2 <= e^(ct) (||W(0)||^2 + (4t/c) alpha_sup + tail(tau)),
    and the table compares the measured norms against the square root of
    that right-hand side.  (The bound is kept in squared form; taking
    norms term by term before integrating would not majorise.)
    """
    if u_traj.states.shape != v_traj.states.shape:
        raise ContractViolation("trajectory pair is not aligned")
    c = cfg.c_rate if c is None else float(c)
    if not c > 0:
        raise ContractViolation("rate constant must be positive")
    offsets = v_traj.times - v_traj.times[0]
    diffs = u_traj.states - v_traj.states
    measured = np.array([x2_norm(diffs[k], cfg) for k in range(diffs.shape[0])])
    tail = _l2_forcing_tail(cfg, tau, c)
    base = measured[0] ** 2
    bound = np.sqrt(
        np.exp(c * offsets) * (base + (4.0 * offsets / c) * alpha_sup + tail)
    )
    verdict = bool(np.all(measured <= bound + 1e-12))
    return ConvergenceTable(
        label=f"gronwall tau={tau:g}",
        abscissae=offsets,
        distances=measured,
        tol=0.0,
        verdict=verdict,
        notes={"bound": bound, "tail": tail, "alpha_sup": alpha_sup, "c": c},
    )
