"""Forward-Euler time integration of the four equation families.

Families and their native clocks:

  NONLOCAL_SIGMA  u_s = D1 Lap u - Phi(s) u + Psi(s) u^p / (avg u^r)^gamma
  SHADOW_TAU      the above with explicit inhibitor eta:
                  u_s = D1 Lap u - Phi u + phi^2 u^p / eta^q,
                  tau eta' = -Phi eta + phi^2 (avg u^r) / eta^s
  NONLOCAL_T      u_t = (D1/rho^2) Lap u - L(t) u + L(t)^gamma u^p / (avg u^r)^gamma
  FULL_RD         u_t = (D1/rho^2) Lap u - L u + u^p/v^q,
                  tau v_t = (D2/rho^2) Lap v - L v + u^r/v^s

The t-form reaction coefficient L^gamma is the exact image of the
sigma-form Psi under the clock change (Psi/rho^2 = L^gamma), so the two
formulations integrate the same dynamics.

The effective step is min(dt, h^2/(4 D_eff), relative growth clamp); the
clamp keeps each update below ~10% of the solution scale so runs terminate
cleanly at the blow-up threshold instead of overflowing.  The stiff linear
diffusion of the FULL_RD inhibitor (D2/tau is large in the regimes of
interest) is advanced with an exact cosine-spectral implicit solve; its
kinetics and the whole activator equation remain forward Euler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np
import scipy.fft

from .analysis import BlowUpReport, Verdict, detect_blowup
from .evolution import (
    EvolutionLaw,
    LawKind,
    dilution_coefficient,
    dissipation_coeff,
    phi_squared,
    reaction_coeff,
    scale_factor,
    sigma_horizon,
    sigma_of_t,
    t_of_sigma,
)
from .initdata import InitSpec, build_initial
from .mesh import Field, Grid, RadialGrid, RectGrid
from .params import Parameters, derive_indices

POSITIVITY_FLOOR = 1e-12


class SystemKind(Enum):
    NONLOCAL_T = "nonlocal_t"
    NONLOCAL_SIGMA = "nonlocal_sigma"
    SHADOW_TAU = "shadow_tau"
    FULL_RD = "full_rd"

    @property
    def t_native(self) -> bool:
        return self in (SystemKind.NONLOCAL_T, SystemKind.FULL_RD)


class NonPositiveStateError(RuntimeError):
    """Raised when the non-local mean, eta or v loses positivity."""


@dataclass
class RunConfig:
    system: SystemKind
    params: Parameters
    law: EvolutionLaw
    grid: Grid
    init: InitSpec
    dt: float = 5e-4
    end_time: float = 1.0
    blowup_threshold: float = 1e6
    quench_threshold: float = 1e-3
    sample_stride: int = 20
    eta0: float | None = None
    v0: float | None = None
    dt_safety: float = 1.0
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.end_time <= 0.0:
            raise ValueError(f"end_time must be positive, got {self.end_time}")
        if self.sample_stride < 1:
            raise ValueError(f"sample_stride must be >= 1, got {self.sample_stride}")
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError(f"dt_safety must be in (0, 1], got {self.dt_safety}")
        if self.law.kind is LawKind.LOGISTIC and not self.system.t_native:
            raise ValueError("logistic evolution is integrated in t-form only")
        if self.system is SystemKind.FULL_RD and not isinstance(self.grid, RectGrid):
            raise ValueError("the full two-species system runs on the rectangle grid")
        grid_dim = 2 if isinstance(self.grid, RectGrid) else self.grid.dim
        if self.law.dimension != grid_dim:
            raise ValueError(
                f"evolution dimension {self.law.dimension} != grid dimension {grid_dim}"
            )


class TimeSeries:
    """Sampled scalar diagnostics along a run."""

    columns = ("t", "sigma", "sup_norm", "mean_u", "zeta", "w_moment", "eta_or_supv")

    def __init__(self) -> None:
        self.t: list[float] = []
        self.sigma: list[float] = []
        self.sup_norm: list[float] = []
        self.mean_u: list[float] = []
        self.zeta: list[float] = []
        self.w_moment: list[float] = []
        self.eta_or_supv: list[float] = []

    def append(self, t, sigma, sup, mean_u, zeta, w_moment, aux) -> None:
        self.t.append(t)
        self.sigma.append(sigma)
        self.sup_norm.append(sup)
        self.mean_u.append(mean_u)
        self.zeta.append(zeta)
        self.w_moment.append(w_moment)
        self.eta_or_supv.append(aux)

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(self.columns) + "\n")
            for row in zip(
                self.t, self.sigma, self.sup_norm, self.mean_u,
                self.zeta, self.w_moment, self.eta_or_supv,
            ):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def fast_pow(u: np.ndarray, e: float) -> np.ndarray:
    """u**e with multiply chains for small integer exponents (hot path)."""
    if e == 1.0:
        return u
    if e == 2.0:
        return u * u
    if e == 3.0:
        return u * u * u
    if e == 4.0:
        sq = u * u
        return sq * sq
    if e == 0.0:
        return np.ones_like(u)
    return np.power(u, e)


@dataclass
class RunState:
    u: np.ndarray
    aux: float | np.ndarray | None
    clock: float
    steps: int = 0
    verdict: Verdict | None = None
    dt_last: float = 0.0


class _Ctx:
    """Precomputed per-run machinery: weights, laplacian, spectral solver."""

    def __init__(self, config: RunConfig):
        self.cfg = config
        self.idx = derive_indices(config.params)
        g = config.grid
        self.w = g.quad_weights().ravel()
        self.is_rect = isinstance(g, RectGrid)
        self.pin_outer = isinstance(g, RadialGrid) and g.outer_bc == "dirichlet"
        self.h2 = g.h_min**2
        if self.is_rect:
            self.hx2, self.hy2 = g.hx**2, g.hy**2
        else:
            self.h = g.h
            self.fface = g.face_areas()
            self.voln = g.cell_volumes() / g.dim
        if config.system is SystemKind.FULL_RD:
            lx = (2.0 * np.cos(np.pi * np.arange(g.nx) / (g.nx - 1)) - 2.0) / g.hx**2
            ly = (2.0 * np.cos(np.pi * np.arange(g.ny) / (g.ny - 1)) - 2.0) / g.hy**2
            self.lam = ly[:, None] + lx[None, :]

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        """Array-level stencil matching mesh.laplacian_rect / laplacian_radial."""
        if self.is_rect:
            e = np.pad(u, 1, mode="reflect")
            lap = (e[1:-1, 2:] - 2.0 * u + e[1:-1, :-2]) / self.hx2
            lap += (e[2:, 1:-1] - 2.0 * u + e[:-2, 1:-1]) / self.hy2
            return lap
        flux = self.fface * (u[1:] - u[:-1]) / self.h
        lap = np.empty_like(u)
        lap[0] = flux[0] / self.voln[0]
        lap[1:-1] = (flux[1:] - flux[:-1]) / self.voln[1:-1]
        lap[-1] = 0.0 if self.pin_outer else -flux[-1] / self.voln[-1]
        return lap

    def nonlocal_mean(self, u: np.ndarray, power: float) -> float:
        m = float(np.dot(self.w, fast_pow(u, power).ravel()))
        if m <= 0.0:
            raise NonPositiveStateError(f"nonlocal mean of u^{power} is {m}")
        return m

    def diffuse_inhibitor(self, v: np.ndarray, nu: float) -> np.ndarray:
        """Solve (I - nu*Lap) v_new = v exactly in the cosine basis."""
        vhat = scipy.fft.dctn(v, type=1)
        vhat /= 1.0 - nu * self.lam
        return scipy.fft.idctn(vhat, type=1)


def rhs(
    config: RunConfig,
    u: Field,
    aux: float | np.ndarray | None,
    clock: float,
) -> tuple[Field, float | np.ndarray | None]:
    """Right-hand side of the selected family at the given native-clock time.

    Returns the pointwise activator rate and, when an inhibitor is present,
    its rate (for FULL_RD: the kinetic part only; the inhibitor diffusion is
    applied inside step() by an exact spectral solve).
    """
    ctx = _Ctx(config)
    du, daux = _rhs_arrays(ctx, u.values, aux, clock)
    return Field(u.grid, du), daux


def _rhs_arrays(ctx: _Ctx, u, aux, clock):
    cfg = ctx.cfg
    p = cfg.params
    gamma = ctx.idx.gamma
    if np.min(u) <= 0.0:
        raise NonPositiveStateError("activator lost positivity")
    kind = cfg.system
    lap = ctx.laplacian(u)
    up = fast_pow(u, p.p)
    if kind is SystemKind.NONLOCAL_SIGMA:
        phi = dissipation_coeff(cfg.law, clock)
        psi = reaction_coeff(cfg.law, clock, gamma)
        denom = ctx.nonlocal_mean(u, p.r) ** gamma if gamma != 0.0 else 1.0
        return p.D1 * lap - phi * u + psi * up / denom, None
    if kind is SystemKind.NONLOCAL_T:
        rho2 = scale_factor(cfg.law, clock) ** 2
        L = dilution_coefficient(cfg.law, clock)
        denom = ctx.nonlocal_mean(u, p.r) ** gamma if gamma != 0.0 else 1.0
        return (p.D1 / rho2) * lap - L * u + L**gamma * up / denom, None
    if kind is SystemKind.SHADOW_TAU:
        eta = aux
        if eta is None or eta <= POSITIVITY_FLOOR:
            raise NonPositiveStateError(f"inhibitor eta nonpositive: {eta}")
        phi = dissipation_coeff(cfg.law, clock)
        ph2 = phi_squared(cfg.law, clock)
        du = p.D1 * lap - phi * u + ph2 * up / eta**p.q
        deta = (-phi * eta + ph2 * ctx.nonlocal_mean(u, p.r) / eta**p.s) / p.tau
        return du, deta
    v = aux
    if v is None or np.min(v) <= POSITIVITY_FLOOR:
        raise NonPositiveStateError("inhibitor v nonpositive")
    rho2 = scale_factor(cfg.law, clock) ** 2
    L = dilution_coefficient(cfg.law, clock)
    du = (p.D1 / rho2) * lap - L * u + up / fast_pow(v, p.q)
    dv_kin = (-L * v + fast_pow(u, p.r) / fast_pow(v, p.s)) / p.tau
    return du, dv_kin


def _positivity_guard(vals, dvals) -> float:
    """Largest dt keeping a positive explicit-Euler update comfortably positive."""
    return 0.45 * float(np.min(vals / (np.abs(dvals) + 1e-300)))


def _dt_effective(ctx: _Ctx, u, du, aux, daux, clock) -> float:
    cfg = ctx.cfg
    if cfg.system.t_native:
        d_eff = cfg.params.D1 / scale_factor(cfg.law, clock) ** 2
    else:
        d_eff = cfg.params.D1
    dt = min(cfg.dt, ctx.h2 / (4.0 * d_eff))
    sup_u = float(np.max(u))
    sup_du = float(np.max(np.abs(du)))
    dt = min(dt, 0.1 * (1.0 + sup_u) / (1.0 + sup_du))
    dt = min(dt, _positivity_guard(u, du))
    if cfg.system is SystemKind.SHADOW_TAU:
        dt = min(dt, 0.45 * aux / (abs(daux) + 1e-300))
    elif cfg.system is SystemKind.FULL_RD:
        sup_v = float(np.max(aux))
        sup_dv = float(np.max(np.abs(daux)))
        dt = min(dt, 0.1 * (1.0 + sup_v) / (1.0 + sup_dv))
        dt = min(dt, _positivity_guard(aux, daux))
    return dt * cfg.dt_safety


def step(config: RunConfig, state: RunState, ctx: _Ctx | None = None) -> RunState:
    """One forward-Euler update; advances clocks, re-checks positivity,
    and sets the verdict on threshold crossing, horizon or overflow."""
    if state.verdict is not None:
        raise RuntimeError("run already terminated")
    if ctx is None:
        ctx = _Ctx(config)
    return _step(ctx, state)


def _step(ctx: _Ctx, state: RunState) -> RunState:
    cfg = ctx.cfg
    u, aux, clock = state.u, state.aux, state.clock
    sup = float(np.max(u))
    if not math.isfinite(sup):
        state.verdict = Verdict.NON_FINITE
        return state
    if sup >= cfg.blowup_threshold:
        state.verdict = Verdict.BLOW_UP
        return state
    if sup <= cfg.quench_threshold:
        state.verdict = Verdict.QUENCH
        return state
    end = cfg.end_time
    if not cfg.system.t_native:
        # the sigma horizon is t = inf; stop within a relative tolerance of it
        end = min(end, sigma_horizon(cfg.law) * (1.0 - 1e-9))
    if clock >= end * (1.0 - 1e-14):
        state.verdict = Verdict.HORIZON_REACHED
        return state
    try:
        du, daux = _rhs_arrays(ctx, u, aux, clock)
    except NonPositiveStateError:
        state.verdict = Verdict.NON_FINITE
        return state
    dt = _dt_effective(ctx, u, du, aux, daux, clock)
    dt = min(dt, end - clock)
    if not math.isfinite(dt) or dt <= 0.0:
        state.verdict = Verdict.NON_FINITE
        return state
    u_new = u + dt * du
    if ctx.pin_outer:
        u_new[-1] = u[-1]
    if cfg.system is SystemKind.SHADOW_TAU:
        aux_new = aux + dt * daux
    elif cfg.system is SystemKind.FULL_RD:
        rho2 = scale_factor(cfg.law, clock) ** 2
        nu = dt * cfg.params.D2 / (cfg.params.tau * rho2)
        aux_new = ctx.diffuse_inhibitor(aux + dt * daux, nu)
    else:
        aux_new = None
    state.u = u_new
    state.aux = aux_new
    state.clock = clock + dt
    state.steps += 1
    state.dt_last = dt
    if not np.isfinite(u_new).all() or np.min(u_new) <= 0.0:
        state.verdict = Verdict.NON_FINITE
    return state


def _clocks(cfg: RunConfig, clock: float) -> tuple[float, float]:
    if cfg.system.t_native:
        return clock, sigma_of_t(cfg.law, clock)
    return t_of_sigma(cfg.law, clock), clock


def advance(config: RunConfig) -> tuple[TimeSeries, BlowUpReport, dict[str, Field]]:
    """Run the configured system until a verdict or the horizon.

    Samples diagnostics every sample_stride steps, whenever the sup norm has
    grown by 5% since the last sample (so the blow-up tail is resolved), and
    at termination.  Snapshots are taken at the first state reaching each
    requested time plus the final state.  The blow-up event time is refined
    by the extrapolation in analysis.detect_blowup.
    """
    ctx = _Ctx(config)
    p = config.params
    u0 = build_initial(config.init, config.grid, p=p.p)
    aux: float | np.ndarray | None = None
    if config.system is SystemKind.SHADOW_TAU:
        if p.tau <= 0.0:
            raise ValueError("shadow system needs tau > 0")
        if config.eta0 is not None:
            aux = float(config.eta0)
        else:
            zr = float(np.dot(ctx.w, fast_pow(u0.values, p.r).ravel()))
            bal = phi_squared(config.law, 0.0) / dissipation_coeff(config.law, 0.0)
            aux = (bal * zr) ** (1.0 / (p.s + 1.0))
    elif config.system is SystemKind.FULL_RD:
        if p.tau <= 0.0:
            raise ValueError("the full system needs tau > 0")
        aux = np.full(config.grid.shape, 2.0 if config.v0 is None else config.v0)
    sup0 = float(np.max(u0.values))
    min0 = float(np.min(u0.values))
    if config.blowup_threshold <= sup0:
        raise ValueError(
            f"blowup_threshold {config.blowup_threshold} must exceed initial sup {sup0}"
        )
    if config.quench_threshold >= min0:
        raise ValueError(
            f"quench_threshold {config.quench_threshold} must be below initial min {min0}"
        )

    series = TimeSeries()
    snapshots: dict[str, Field] = {}
    pending = sorted(config.snapshot_times)
    state = RunState(u=u0.values.copy(), aux=aux, clock=0.0)

    def sample() -> None:
        t, sigma = _clocks(config, state.clock)
        u = state.u
        sup = float(np.max(u))
        mu = float(np.dot(ctx.w, u.ravel()))
        zeta = float(np.dot(ctx.w, fast_pow(u, p.r).ravel()))
        wmom = float(np.dot(ctx.w, fast_pow(u, p.r + 1.0 - p.p).ravel()))
        if config.system is SystemKind.SHADOW_TAU:
            a = float(state.aux)
        elif config.system is SystemKind.FULL_RD:
            a = float(np.max(state.aux))
        else:
            a = math.nan
        series.append(t, sigma, sup, mu, zeta, wmom, a)

    sample()
    last_sup = series.sup_norm[-1]
    last_clock = state.clock
    while state.verdict is None:
        _step(ctx, state)
        if state.verdict is not None:
            break
        sup = float(np.max(state.u))
        if state.steps % config.sample_stride == 0 or sup >= 1.05 * last_sup:
            sample()
            last_sup = series.sup_norm[-1]
            last_clock = state.clock
        while pending and state.clock >= pending[0]:
            label = f"clock{pending.pop(0)!r}"
            snapshots[label] = Field(config.grid, state.u.copy())
    if state.clock != last_clock:
        sample()
    snapshots["final"] = Field(config.grid, state.u.copy())

    report = detect_blowup(
        series, p.p, config.blowup_threshold, config.quench_threshold
    )
    if state.verdict in (Verdict.HORIZON_REACHED, Verdict.NON_FINITE):
        report.verdict = state.verdict
    if report.verdict in (Verdict.BLOW_UP, Verdict.QUENCH) and report.event_time_t is None:
        t, sigma = _clocks(config, state.clock)
        report.event_time_t, report.event_time_sigma = t, sigma
    return series, report, snapshots
