"""Incompressible MHD dynamics on the torus.

The momentum and induction equations are advanced in coefficient space.
Quadratic products are evaluated on a collocation grid fine enough that the
retained band stays alias-free, the pressure is eliminated per mode by the
Leray projection, and diffusion is integrated exactly by the integrating
factor inside the RK4 stages.  A scalar quadrature of the dissipation rate
rides along the same stages so the energy ledger closes to the integrator's
own order.

Time-step guidance: diffusion costs nothing (it is exact), so stability is
set by advection.  A conservative bound is dt <= 1.5 / (kappa_max * V_max)
with kappa_max = 2*pi*K/L and V_max the collocation maximum of |u| + |b|;
see :func:`advective_dt_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield, replace
from typing import Callable

import numpy as np

from .criteria import CriterionSpec, MonitorStatus, BOOTSTRAP_TAGS, monitor_update, monitored_field
from .field import SpectralField, gradient, leray_project, _leray_raw
from .grid import Grid, make_grid
from .norms import EnergyLedger, NormSeries, accumulate, energy, lp_norm, wxyz

__all__ = [
    "MhdState",
    "SimConfig",
    "InitialCondition",
    "SimResult",
    "DivergedError",
    "pressure_solve",
    "mhd_rhs",
    "step_ifrk4",
    "simulate",
    "compute_record",
    "initial_state",
    "taylor_green_state",
    "single_mode_state",
    "advective_dt_bound",
]

_DIV_TOL = 1e-10


class DivergedError(RuntimeError):
    """The integration produced non-finite coefficients."""


@dataclass(frozen=True)
class MhdState:
    """Velocity/magnetic pair at one instant, plus the diffusivities.

    Both fields carry one component per axis, share the grid, and must be
    divergence-free to rounding.  NSE runs simply carry b identically zero.
    """

    u: SpectralField
    b: SpectralField
    time: float = 0.0
    nu: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        g = self.u.grid
        if self.b.grid != g:
            raise ValueError("u and b must share a grid")
        for name, f in (("u", self.u), ("b", self.b)):
            if f.components != g.dim:
                raise ValueError(f"{name} needs {g.dim} components, has {f.components}")
            if not np.all(np.isfinite(f.coeffs)):
                raise ValueError(f"{name} has non-finite coefficients")
            _check_divfree(g, f.coeffs, name)
        if self.nu < 0 or self.eta < 0:
            raise ValueError("diffusivities must be non-negative")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @property
    def has_b(self) -> bool:
        return bool(np.any(self.b.coeffs))


def _check_divfree(g: Grid, coeffs: np.ndarray, name: str) -> None:
    div = sum(g.wave_axes[a] * coeffs[a] for a in range(g.dim))
    scale = float(np.abs(coeffs).max())
    kmax = 2 * np.pi * g.band_limit / g.side_length
    bound = _DIV_TOL * max(kmax * scale, 1e-30)
    worst = float(np.abs(div).max())
    if worst > bound:
        raise ValueError(
            f"{name} is not divergence-free (defect {worst:.3e}, bound {bound:.3e})"
        )


# -- nonlinear terms ----------------------------------------------------------


def _product_modes(g: Grid) -> int:
    # products of two K-band fields alias back into the band unless 3K < M;
    # fall back to the padded evaluation grid when the base grid is too tight
    if 3 * g.band_limit < g.modes_per_axis:
        return g.modes_per_axis
    return g.eval_modes


def _stress_divergence(
    g: Grid, us: np.ndarray, bs: np.ndarray | None, m: int
) -> np.ndarray:
    """-d_i (u_i u_j - b_i b_j) as K-band coefficients, from samples on m."""
    dim = g.dim
    out = np.zeros((dim,) + g.shape, dtype=complex)
    for i in range(dim):
        for j in range(i, dim):
            prod = us[i] * us[j]
            if bs is not None:
                prod = prod - bs[i] * bs[j]
            s = g.analyze(prod)
            out[j] -= 1j * g.wave_axes[i] * s
            if i != j:
                out[i] -= 1j * g.wave_axes[j] * s
    return out * g.band_mask[None]


def _induction_divergence(
    g: Grid, us: np.ndarray, bs: np.ndarray, m: int
) -> np.ndarray:
    """-d_i (u_i b_j - b_i u_j) as K-band coefficients."""
    dim = g.dim
    out = np.zeros((dim,) + g.shape, dtype=complex)
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            s = g.analyze(us[i] * bs[j] - bs[i] * us[j])
            out[j] -= 1j * g.wave_axes[i] * s
    return out * g.band_mask[None]


def _nonlinear(
    g: Grid, u: np.ndarray, b: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray | None]:
    m = _product_modes(g)
    us = g.sample(u, m)
    bs = g.sample(b, m) if b is not None else None
    du = _leray_raw(g, _stress_divergence(g, us, bs, m))
    db = None
    if b is not None:
        db = _leray_raw(g, _induction_divergence(g, us, bs, m))
    return du, db


def _dissipation_rate(
    g: Grid, u: np.ndarray, b: np.ndarray | None, nu: float, eta: float
) -> float:
    r = 2.0 * nu * g.volume * float(np.sum(g.k_squared[None] * np.abs(u) ** 2))
    if b is not None:
        r += 2.0 * eta * g.volume * float(np.sum(g.k_squared[None] * np.abs(b) ** 2))
    return r


# Above this the per-mode decay over one step is so close to complete that
# the slow variable is frozen at its initial value instead of interpolated;
# it also keeps the unwinding exponentials representable.
_FITTED_Z_CUT = 40.0


def _hermite_weights(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature weights for ∫_0^1 e^{-z τ} q(τ) dτ with q cubic Hermite.

    Returns the weights of q(1) - q(0), q'(0) and q'(1); the constant part
    of q is integrated by the caller against the stepper's own decay factor.
    Built from the moments mu_j = ∫ τ^j e^{-z τ} dτ; at z = 0 the weights
    reduce to the derivative-corrected trapezoid (1/2, 1/12, -1/12).
    """
    small = z < 0.5
    zs = np.where(small, 1.0, z)
    ez = np.exp(-zs)
    mu1 = (1.0 - (1.0 + zs) * ez) / zs**2
    mu2 = (2.0 - (2.0 + zs * (2.0 + zs)) * ez) / zs**3
    mu3 = (3.0 * mu2 - ez) / zs
    # series mu_j = sum_n (-z)^n / (n! (n+j+1)); 18 terms reach roundoff at z=0.5
    s1 = np.zeros_like(z)
    s2 = np.zeros_like(z)
    s3 = np.zeros_like(z)
    term = np.ones_like(z)
    for n in range(18):
        s1 += term / (n + 2)
        s2 += term / (n + 3)
        s3 += term / (n + 4)
        term *= -z / (n + 1)
    mu1 = np.where(small, s1, mu1)
    mu2 = np.where(small, s2, mu2)
    mu3 = np.where(small, s3, mu3)
    w1 = 3.0 * mu2 - 2.0 * mu3
    wp0 = mu3 - 2.0 * mu2 + mu1
    wp1 = mu3 - mu2
    return w1, wp0, wp1


def _dissipation_increment(
    g: Grid,
    dt: float,
    diff: float,
    d0: np.ndarray,
    d1: np.ndarray,
    d0p: np.ndarray,
    d1p: np.ndarray,
    decay: np.ndarray,
) -> float:
    """∫ 2 diff ||grad field||^2 over one step, from slow-variable data.

    ``d0`` and ``d1`` are the per-mode component sums |v|^2 of the
    integrating-factor variable v(s) = e^{+diff k^2 s} field(s) at the step
    ends, ``d0p``/``d1p`` its one-sided derivatives in units of the step,
    and ``decay`` the squared per-step decay factor assembled from the same
    rounded half-step exponentials the stepper applies.  Anchoring the d0
    term on ``decay`` instead of a fresh exp(-z) keeps the pure-diffusion
    part of the ledger consistent with the state update to rounding noise;
    the cubic Hermite correction then carries only the O(dt) nonlinear
    modulation, where weight roundoff is harmless.
    """
    if diff == 0.0:
        return 0.0
    z = (2.0 * diff * dt) * g.k_squared
    w1, wp0, wp1 = _hermite_weights(z)
    corr = z * ((d1 - d0) * w1 + d0p * wp0 + d1p * wp1)
    # past the cutoff the clamped unwinding makes the end samples
    # meaningless, so the slow factor is frozen at its start value
    tot = d0 * (1.0 - decay) + np.where(z > _FITTED_Z_CUT, 0.0, corr)
    return g.volume * float(np.sum(tot))


def _mode_power(coeffs: np.ndarray) -> np.ndarray:
    # sum over components of |c|^2, leaving the mode axes
    return np.sum(coeffs.real**2 + coeffs.imag**2, axis=0)


def dissipation_rate(state: MhdState) -> float:
    """Instantaneous 2(nu ||grad u||^2 + eta ||grad b||^2), exact via Parseval."""
    return _dissipation_rate(
        state.grid,
        state.u.coeffs,
        state.b.coeffs if state.has_b else None,
        state.nu,
        state.eta,
    )


# -- public operators ---------------------------------------------------------


def pressure_solve(u: SpectralField, b: SpectralField | None = None) -> SpectralField:
    """Mean-zero pressure balancing the momentum nonlinearity.

    Solves Delta pi = -d_i d_j (u_i u_j - b_i b_j) per mode from exactly
    dealiased products, returning the band-limited scalar field.
    """
    g = u.grid
    if u.components != g.dim:
        raise ValueError("pressure_solve needs one velocity component per axis")
    m = _product_modes(g)
    us = g.sample(u.coeffs, m)
    bs = g.sample(b.coeffs, m) if b is not None else None
    pi_hat = np.zeros(g.shape, dtype=complex)
    for i in range(g.dim):
        for j in range(i, g.dim):
            prod = us[i] * us[j]
            if bs is not None:
                prod = prod - bs[i] * bs[j]
            s = g.analyze(prod)
            w = g.wave_axes[i] * g.wave_axes[j] / g.k_squared_safe
            pi_hat -= (w if i == j else 2.0 * w) * s
    pi_hat *= g.band_mask
    pi_hat[(0,) * g.dim] = 0.0
    return SpectralField(g, pi_hat[None])


def mhd_rhs(state: MhdState) -> tuple[SpectralField, SpectralField]:
    """Full right-hand side (nonlinear transport + diffusion), projected."""
    g = state.grid
    b_arr = state.b.coeffs if state.has_b else None
    du, db = _nonlinear(g, state.u.coeffs, b_arr)
    k2 = g.k_squared[None]
    du = du - state.nu * k2 * state.u.coeffs
    if db is None:
        db = np.zeros_like(state.b.coeffs)
    db = db - state.eta * k2 * state.b.coeffs
    return SpectralField(g, du), SpectralField(g, db)


def step_ifrk4(state: MhdState, dt: float) -> tuple[MhdState, float]:
    """One integrating-factor RK4 step.

    Diffusion is applied exactly through the integrating factor; the RK4
    stages see only the nonlinear terms.  Returns the advanced state and
    the dissipation integral over the step, quadratured per mode from the
    endpoint values and derivatives of the slow variable so the energy
    ledger closes below the integrator's own energy residual.  Raises
    :class:`DivergedError` when the step produces non-finite values.
    """
    if not (dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    g = state.grid
    u0 = state.u.coeffs
    b0 = state.b.coeffs
    has_b = state.has_b
    nu, eta = state.nu, state.eta
    k2 = g.k_squared[None]
    eu = np.exp(-nu * k2 * (dt / 2))
    eb = np.exp(-eta * k2 * (dt / 2))
    barg = b0 if has_b else None

    # unwinding exponentials for the ledger's slow-variable samples; modes
    # past the fitted cutoff never use them, so the exponent can be clamped
    eui = np.exp(np.minimum(nu * k2 * (dt / 2), _FITTED_Z_CUT / 2))
    ebi = np.exp(np.minimum(eta * k2 * (dt / 2), _FITTED_Z_CUT / 2))

    # a blowup ends as DivergedError below, so the overflow on the way there
    # is expected and not worth a warning per stage
    with np.errstate(over="ignore", invalid="ignore"):
        n1u, n1b = _nonlinear(g, u0, barg)

        u2 = eu * (u0 + (dt / 2) * n1u)
        b2 = eb * (b0 + (dt / 2) * n1b) if has_b else b0
        n2u, n2b = _nonlinear(g, u2, b2 if has_b else None)

        u3 = eu * u0 + (dt / 2) * n2u
        b3 = eb * b0 + (dt / 2) * n2b if has_b else b0
        n3u, n3b = _nonlinear(g, u3, b3 if has_b else None)

        u4 = eu * (eu * u0 + dt * n3u)
        b4 = eb * (eb * b0 + dt * n3b) if has_b else b0
        n4u, n4b = _nonlinear(g, u4, b4 if has_b else None)

        u_new = eu * (eu * u0 + (dt / 6) * (eu * n1u + 2 * (n2u + n3u))) + (
            dt / 6
        ) * n4u
        if has_b:
            b_new = eb * (eb * b0 + (dt / 6) * (eb * n1b + 2 * (n2b + n3b))) + (
                dt / 6
            ) * n4b
        else:
            b_new = b0

        if nu != 0.0 or eta != 0.0:
            # endpoint slope of the slow variable needs the nonlinearity at
            # the completed step; a fifth evaluation, spent only here
            nnu, nnb = _nonlinear(g, u_new, b_new if has_b else None)
            # the unwound endpoint is assembled from the stage terms directly
            # so no e^{+x} e^{-x} round trip ever touches the O(1) u0 part
            v1u = u0 + (dt / 6) * (
                n1u + 2.0 * (eui * (n2u + n3u)) + eui * (eui * n4u)
            )
            d0p_u = 2.0 * dt * np.sum((u0.conj() * n1u).real, axis=0)
            d1p_u = 2.0 * dt * np.sum(
                (v1u.conj() * (eui * (eui * nnu))).real, axis=0
            )
            pu = ((eu * eu) * (eu * eu))[0]
            dinc = _dissipation_increment(
                g, dt, nu, _mode_power(u0), _mode_power(v1u), d0p_u, d1p_u, pu
            )
            if has_b:
                v1b = b0 + (dt / 6) * (
                    n1b + 2.0 * (ebi * (n2b + n3b)) + ebi * (ebi * n4b)
                )
                d0p_b = 2.0 * dt * np.sum((b0.conj() * n1b).real, axis=0)
                d1p_b = 2.0 * dt * np.sum(
                    (v1b.conj() * (ebi * (ebi * nnb))).real, axis=0
                )
                pb = ((eb * eb) * (eb * eb))[0]
                dinc += _dissipation_increment(
                    g,
                    dt,
                    eta,
                    _mode_power(b0),
                    _mode_power(v1b),
                    d0p_b,
                    d1p_b,
                    pb,
                )
        else:
            dinc = 0.0
    if not (
        np.all(np.isfinite(u_new))
        and np.all(np.isfinite(b_new))
    ):
        raise DivergedError(f"non-finite coefficients at t={state.time + dt:.6g}")
    new = MhdState(
        SpectralField(g, u_new),
        SpectralField(g, b_new),
        state.time + dt,
        nu,
        eta,
    )
    return new, dinc


def advective_dt_bound(state: MhdState) -> float:
    """Conservative stable step for the explicit advective stage."""
    g = state.grid
    kmax = 2 * np.pi * g.band_limit / g.side_length
    vmax = lp_norm(state.u, math.inf)
    if state.has_b:
        vmax += lp_norm(state.b, math.inf)
    return 1.5 / max(kmax * vmax, 1e-30)


# -- configuration and driver -------------------------------------------------


@dataclass(frozen=True)
class InitialCondition:
    """Initial-state recipe for :func:`simulate`."""

    preset: str = "taylor_green"
    seed: int = 0
    decay: float = 3.0
    amplitude: float = 1.0
    b_amplitude: float = 0.0

    _PRESETS = ("zero", "taylor_green", "single_mode", "random_divfree")

    def __post_init__(self):
        if self.preset not in self._PRESETS:
            raise ValueError(
                f"unknown preset '{self.preset}' (one of {self._PRESETS})"
            )
        if self.decay <= 0:
            raise ValueError("spectral decay must be positive")


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation.

    ``record_every`` and ``snapshot_every`` are step counts; snapshots must
    align with records so a replay sees the same sample times.  ``free_axes``
    (1-based) picks which two component axes are treated as the monitored
    pair, with the anisotropic plane being the complementary axes.
    """

    dim: int = 4
    modes_per_axis: int = 16
    side_length: float = 2.0 * np.pi
    nu: float = 1.0
    eta: float = 1.0
    dt: float = 1e-3
    t_end: float = 0.1
    initial: InitialCondition = dfield(default_factory=InitialCondition)
    record_every: int = 1
    snapshot_every: int = 0
    criteria: tuple[CriterionSpec, ...] = ()
    monitor_bootstrap: bool = False
    free_axes: tuple[int, int] = (3, 4)

    def __post_init__(self):
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.nu < 0 or self.eta < 0:
            raise ValueError("diffusivities must be non-negative")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        if self.snapshot_every and self.snapshot_every % self.record_every:
            raise ValueError(
                "snapshot_every must be a multiple of record_every so replays "
                "see record-aligned states"
            )
        labels = [s.label for s in self.criteria]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate criterion theorems in one run")
        if self.dim != 4:
            split = ("u3", "u4", "grad_u3", "grad_u4", "dpi3", "dpi4")
            for s in self.criteria:
                for comp, _ in s.pairs:
                    if comp in split:
                        raise ValueError(
                            f"criterion {s.label} monitors '{comp}', which needs "
                            f"the two-component split of dim 4 (dim is {self.dim})"
                        )
        # the two-axis split only exists in dim 4; lower dims keep the default
        if self.dim == 4:
            fa = self.free_axes
            if len(fa) != 2 or len(set(fa)) != 2 or not all(1 <= a <= 4 for a in fa):
                raise ValueError(
                    f"free_axes must be two distinct 1-based axes <= 4, got {fa}"
                )
        if self.n_steps < 1:
            raise ValueError("t_end must cover at least one step")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def free_axes0(self) -> tuple[int, int]:
        return (self.free_axes[0] - 1, self.free_axes[1] - 1)

    @property
    def needs_pressure(self) -> bool:
        return any(s.needs_pressure for s in self.criteria)

    def make_grid(self) -> Grid:
        return make_grid(self.dim, self.modes_per_axis, self.side_length)


def taylor_green_state(
    grid: Grid, nu: float = 1.0, eta: float = 1.0, amplitude: float = 1.0
) -> MhdState:
    """Planar vortex array in the first two axes; exactly pressure-balanced
    so the nonlinearity is a pure gradient and the flow decays by diffusion."""
    coeffs = np.zeros((grid.dim,) + grid.shape, dtype=complex)
    # u1 = cos(k x1) sin(k x2), u2 = -sin(k x1) cos(k x2) with k = 2*pi/L
    q = amplitude / 4.0
    m = grid.modes_per_axis

    def put(comp, k1, k2, val):
        coeffs[(comp, k1 % m, k2 % m) + (0,) * (grid.dim - 2)] += val

    put(0, 1, 1, -1j * q)
    put(0, 1, -1, 1j * q)
    put(0, -1, 1, -1j * q)
    put(0, -1, -1, 1j * q)
    put(1, 1, 1, 1j * q)
    put(1, -1, 1, -1j * q)
    put(1, 1, -1, 1j * q)
    put(1, -1, -1, -1j * q)
    u = SpectralField(grid, coeffs)
    return MhdState(u, SpectralField.zeros(grid, grid.dim), 0.0, nu, eta)


def single_mode_state(
    grid: Grid, nu: float = 1.0, eta: float = 1.0, amplitude: float = 1.0
) -> MhdState:
    """u = amplitude * sin(2*pi*x1/L) e2: self-advection vanishes, so the
    exact evolution is pure diffusive decay of the single mode."""
    coeffs = np.zeros((grid.dim,) + grid.shape, dtype=complex)
    sel1 = (1, 1) + (0,) * (grid.dim - 1)
    selm = (1, grid.modes_per_axis - 1) + (0,) * (grid.dim - 1)
    coeffs[sel1] = -0.5j * amplitude
    coeffs[selm] = 0.5j * amplitude
    u = SpectralField(grid, coeffs)
    return MhdState(u, SpectralField.zeros(grid, grid.dim), 0.0, nu, eta)


def initial_state(config: SimConfig, grid: Grid | None = None) -> MhdState:
    from .field import synth_random_divfree

    g = grid or config.make_grid()
    ic = config.initial
    if ic.preset == "zero":
        z = SpectralField.zeros(g, g.dim)
        return MhdState(z, z, 0.0, config.nu, config.eta)
    if ic.preset == "taylor_green":
        return taylor_green_state(g, config.nu, config.eta, ic.amplitude)
    if ic.preset == "single_mode":
        return single_mode_state(g, config.nu, config.eta, ic.amplitude)
    if ic.preset == "random_divfree":
        u = synth_random_divfree(g, g.dim, ic.seed, ic.decay, ic.amplitude)
        if ic.b_amplitude > 0:
            b = synth_random_divfree(g, g.dim, ic.seed + 1, ic.decay, ic.b_amplitude)
        else:
            b = SpectralField.zeros(g, g.dim)
        return MhdState(u, b, 0.0, config.nu, config.eta)
    raise ValueError(f"unknown preset '{ic.preset}'")


def compute_record(
    u: SpectralField,
    b: SpectralField,
    config: SimConfig,
) -> tuple[dict[str, float], SpectralField | None]:
    """One row of diagnostics for a state, plus the pressure if required.

    This single code path serves both the live run and snapshot replay, so
    the two produce identical values for identical states.
    """
    has_b = bool(np.any(b.coeffs))
    barg = b if has_b else None
    row: dict[str, float] = {"energy": energy(u, barg)}
    plane = tuple(a for a in range(4) if a not in config.free_axes0) if config.dim == 4 else None
    if plane is not None:
        vals = wxyz(u, barg, plane=plane)
        row.update(W=vals.W, X=vals.X, Y=vals.Y, Z=vals.Z)
    pi = None
    if config.needs_pressure:
        pi = pressure_solve(u, barg)
    if config.monitor_bootstrap:
        n = config.dim
        row["gradu_LN"] = lp_norm(gradient(u), n)
        row["gradb_LN"] = lp_norm(gradient(b), n) if has_b else 0.0
    for spec in config.criteria:
        for comp, (p, _r) in spec.pairs:
            f = monitored_field(comp, u, b, pi, config.free_axes0)
            row[spec.norm_tag(comp)] = lp_norm(f, p)
    return row, pi


def _advance_accumulators(
    series: NormSeries,
    statuses: list[MonitorStatus],
    config: SimConfig,
    dt_rec: float,
) -> None:
    if config.monitor_bootstrap:
        for tag in BOOTSTRAP_TAGS:
            accumulate(series, tag, 2.0, dt_rec, key=f"acc_bootstrap_{tag}")
    for status in statuses:
        monitor_update(status, series, dt_rec)


def accumulator_columns(config: SimConfig) -> tuple[tuple[str, str, float], ...]:
    """(accumulator key, source tag, exponent r) in canonical column order."""
    cols: list[tuple[str, str, float]] = []
    for spec in config.criteria:
        for comp, (_p, r) in spec.pairs:
            cols.append((spec.accumulator_key(comp), spec.norm_tag(comp), r))
    if config.monitor_bootstrap:
        for tag in BOOTSTRAP_TAGS:
            cols.append((f"acc_bootstrap_{tag}", tag, 2.0))
    return tuple(cols)


@dataclass
class SimResult:
    """Everything a run produced (file writing is the caller's business)."""

    status: str
    config: SimConfig
    grid: Grid
    series: NormSeries
    ledger: EnergyLedger
    ledger_history: dict[str, list[float]]
    monitor_statuses: list[MonitorStatus]
    final_state: MhdState
    states: list[tuple[float, MhdState, SpectralField | None]]


def simulate(
    config: SimConfig,
    initial: MhdState | None = None,
    snapshot_sink: Callable[[int, MhdState, SpectralField | None], None] | None = None,
    keep_states: bool = False,
) -> SimResult:
    """Run the configured simulation.

    Records diagnostics on the record cadence, hands states on the snapshot
    cadence to ``snapshot_sink`` (and keeps them in memory when
    ``keep_states``), and returns cleanly with status ``"diverged"`` if the
    integration blows up.
    """
    grid = config.make_grid()
    if initial is not None and initial.grid != grid:
        raise ValueError("initial state grid does not match the configuration")
    state = initial if initial is not None else initial_state(config, grid)
    series = NormSeries()
    statuses = [MonitorStatus.for_spec(s) for s in config.criteria]
    e0 = energy(state.u, state.b if state.has_b else None)
    ledger = EnergyLedger(e0)
    acc_cols = accumulator_columns(config)
    history: dict[str, list[float]] = {"dissipation_integral": [], "defect": []}
    for key, _tag, _r in acc_cols:
        history[key] = []
    states: list[tuple[float, MhdState, SpectralField | None]] = []
    n_steps = config.n_steps
    status = "completed"
    last_rec_t = None

    for n in range(n_steps + 1):
        t = n * config.dt
        at_record = n % config.record_every == 0 or n == n_steps
        if at_record:
            # a run heading for divergence can overflow |u|^p here; inf is the
            # honest record for that, no warning needed
            with np.errstate(over="ignore"):
                row, pi = compute_record(state.u, state.b, config)
            series.record(t, row)
            # dt 0 at the first record seeds the sup accumulators with the
            # initial value; integral accumulators start moving from the
            # second record
            dt_rec = (t - last_rec_t) if last_rec_t is not None else 0.0
            _advance_accumulators(series, statuses, config, dt_rec)
            last_rec_t = t
            history["dissipation_integral"].append(ledger.dissipation_integral)
            history["defect"].append(ledger.defect)
            for key, _tag, _r in acc_cols:
                history[key].append(series.accumulators[key])
            at_snapshot = config.snapshot_every and (
                n % config.snapshot_every == 0 or n == n_steps
            )
            if at_snapshot:
                if snapshot_sink is not None:
                    snapshot_sink(n, state, pi)
                if keep_states:
                    states.append((t, state, pi))
        if n == n_steps:
            break
        try:
            state, dinc = step_ifrk4(state, config.dt)
        except DivergedError:
            status = "diverged"
            break
        # pin the clock to the grid-exact multiple so snapshot headers agree
        # bit for bit with the recorded time column; the replace also re-runs
        # the divergence check every step
        state = replace(state, time=(n + 1) * config.dt)
        ledger.advance(energy(state.u, state.b if state.has_b else None), dinc)

    for st in statuses:
        st.verdict = "diverged" if status == "diverged" else "accumulators_finite"
        if status != "diverged" and not st.finite:
            st.verdict = "accumulator_divergent"
    return SimResult(
        status,
        config,
        grid,
        series,
        ledger,
        history,
        statuses,
        state,
        states,
    )
