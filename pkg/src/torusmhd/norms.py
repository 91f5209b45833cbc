"""Norms, anisotropic functionals, time series and the energy ledger.

Quadratic quantities (L2 norms, Sobolev seminorms, the W/X/Y/Z functionals)
are evaluated exactly in coefficient space via Parseval.  General L^p norms
sample the field on the padded evaluation grid and quadrature |f|^p there;
for band-limited integrands of degree <= pad_factor that quadrature is again
exact, otherwise it is the documented approximation.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass, field as dfield
from typing import Mapping

import numpy as np

from .field import SpectralField

__all__ = [
    "lp_norm",
    "l2_norm",
    "l2_inner",
    "energy",
    "sobolev_seminorm",
    "wxyz",
    "WXYZ",
    "NormSeries",
    "accumulate",
    "EnergyLedger",
    "energy_ledger_update",
]

WXYZ = namedtuple("WXYZ", ["W", "X", "Y", "Z"])


def _magnitude(field: SpectralField, m_eval: int | None) -> np.ndarray:
    vals = field.sample(m_eval)
    if vals.shape[0] == 1:
        return np.abs(vals[0])
    return np.sqrt((vals**2).sum(axis=0))


def lp_norm(field: SpectralField, p: float, m_eval: int | None = None) -> float:
    """L^p norm of |f| (pointwise Euclidean magnitude for vector fields).

    p = inf takes the collocation maximum on the evaluation grid.
    """
    if p != math.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    mag = _magnitude(field, m_eval)
    if p == math.inf:
        return float(mag.max())
    return float(field.grid.quadrature(mag**p) ** (1.0 / p))


def l2_norm(field: SpectralField) -> float:
    """Parseval L2 norm, exact in coefficient space."""
    g = field.grid
    return float(np.sqrt(g.volume * np.sum(np.abs(field.coeffs) ** 2)))


def l2_inner(f: SpectralField, g: SpectralField) -> float:
    """L2 inner product summed over components, exact via Parseval."""
    if f.grid != g.grid or f.components != g.components:
        raise ValueError("inner product requires matching grids and components")
    return float(f.grid.volume * np.sum(np.conj(f.coeffs) * g.coeffs).real)


def energy(u: SpectralField, b: SpectralField | None = None) -> float:
    """Squared L2 norm of the state: ||u||^2 (+ ||b||^2 when present)."""
    e = l2_norm(u) ** 2
    if b is not None:
        e += l2_norm(b) ** 2
    return e


def sobolev_seminorm(field: SpectralField, s: float) -> float:
    """Homogeneous seminorm ||Lambda^s f||_L2; s = 0 is the mean-zero L2 norm."""
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    g = field.grid
    with np.errstate(divide="ignore"):
        weight = np.where(g.k_squared > 0, g.k_squared_safe**s, 0.0)
    return float(np.sqrt(g.volume * np.sum(weight[None] * np.abs(field.coeffs) ** 2)))


def _weighted_energy(field: SpectralField, weight: np.ndarray) -> float:
    return float(
        field.grid.volume * np.sum(weight[None] * np.abs(field.coeffs) ** 2)
    )


def wxyz(
    u: SpectralField,
    b: SpectralField | None = None,
    plane: tuple[int, int] = (0, 1),
) -> WXYZ:
    """The four anisotropic dissipation functionals of a (u, b) state.

    W restricts the gradient to the two ``plane`` axes, X is the full
    gradient energy, Y crosses the plane gradient with the full one, Z is
    the Laplacian energy.  All are squared norms summed over u and b.
    """
    g = u.grid
    if g.dim != 4:
        raise ValueError("anisotropic functionals are defined on dim-4 grids")
    if len(plane) != 2 or len(set(plane)) != 2 or not all(0 <= a < 4 for a in plane):
        raise ValueError(f"plane must be two distinct axes in 0..3, got {plane}")
    k2_plane = sum(g.wave_axes[a] ** 2 for a in plane)
    k2 = g.k_squared
    fields = [u] if b is None else [u, b]
    vals = [0.0, 0.0, 0.0, 0.0]
    for f in fields:
        vals[0] += _weighted_energy(f, k2_plane)
        vals[1] += _weighted_energy(f, k2)
        vals[2] += _weighted_energy(f, k2_plane * k2)
        vals[3] += _weighted_energy(f, k2 * k2)
    return WXYZ(*vals)


class NormSeries:
    """Aligned time series of scalar diagnostics plus running accumulators.

    Every record must supply the same tag set; times must be strictly
    increasing.  Accumulators are advanced explicitly via :func:`accumulate`
    so that a replay from stored snapshots reproduces them bit for bit.
    """

    def __init__(self) -> None:
        self.times: list[float] = []
        self.records: dict[str, list[float]] = {}
        self.accumulators: dict[str, float] = {}

    def __len__(self) -> int:
        return len(self.times)

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(self.records)

    def record(self, t: float, values: Mapping[str, float]) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError(
                f"record times must be strictly increasing ({t} after {self.times[-1]})"
            )
        if self.records and set(values) != set(self.records):
            raise ValueError(
                "record tag set changed: expected "
                f"{sorted(self.records)}, got {sorted(values)}"
            )
        self.times.append(float(t))
        for tag, v in values.items():
            self.records.setdefault(tag, []).append(float(v))

    def value(self, tag: str, index: int = -1) -> float:
        if tag not in self.records:
            raise KeyError(tag)
        return self.records[tag][index]


def accumulate(
    series: NormSeries, tag: str, r: float, dt: float, key: str | None = None
) -> float:
    """Advance the running integral of value^r (or sup for r = inf) for a tag.

    Call once after each new record; the finite-r update is the trapezoid
    rule on the last interval.  Returns the accumulator value.
    """
    if tag not in series.records:
        raise KeyError(f"series has no tag '{tag}'")
    if key is None:
        key = f"int[{tag}]^r{r}"
    hist = series.records[tag]
    if r == math.inf:
        cur = series.accumulators.get(key, -math.inf)
        series.accumulators[key] = max(cur, hist[-1])
    else:
        if r <= 0:
            raise ValueError(f"exponent r must be positive or inf, got {r}")
        cur = series.accumulators.get(key, 0.0)
        if len(hist) >= 2:
            cur += 0.5 * dt * (hist[-2] ** r + hist[-1] ** r)
        series.accumulators[key] = cur
    return series.accumulators[key]


@dataclass
class EnergyLedger:
    """Bookkeeping for the energy inequality along a run.

    ``defect = initial - current - dissipation_integral`` vanishes for the
    exact dynamics; along the discrete trajectory it is the time-integration
    error and stays non-negative up to that error's size.
    """

    initial_energy: float
    current_energy: float = dfield(default=math.nan)
    dissipation_integral: float = 0.0
    _last_rate: float = dfield(default=math.nan, repr=False)

    def __post_init__(self):
        if math.isnan(self.current_energy):
            self.current_energy = self.initial_energy

    @property
    def defect(self) -> float:
        return self.initial_energy - self.current_energy - self.dissipation_integral

    def advance(self, current_energy: float, dissipation_increment: float) -> None:
        """Stepper path: the increment is integrated inside the time step."""
        self.current_energy = float(current_energy)
        self.dissipation_integral += float(dissipation_increment)


def energy_ledger_update(
    ledger: EnergyLedger, current_energy: float, dissipation_rate: float, dt: float
) -> EnergyLedger:
    """Replay path: trapezoid-advance the ledger from sampled dissipation rates.

    The first call only seeds the rate; subsequent calls integrate over the
    preceding interval of width dt.
    """
    ledger.current_energy = float(current_energy)
    if not math.isnan(ledger._last_rate):
        ledger.dissipation_integral += 0.5 * dt * (ledger._last_rate + dissipation_rate)
    ledger._last_rate = float(dissipation_rate)
    return ledger
