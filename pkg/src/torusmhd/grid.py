"""Collocation/spectral grids on the periodic N-torus.

A :class:`Grid` fixes the torus dimension, the number of retained modes per
axis, the physical side length, and the band limit used for dealiasing.  All
transform plumbing (padded sampling, analysis, quadrature) lives here so that
field operations elsewhere can stay purely algebraic.

Coefficient convention: a real field is represented by complex coefficients
``c[k]`` with ``f(x) = sum_k c[k] exp(i kappa . x)`` where
``kappa = 2*pi*k/L`` and ``k`` runs over the integer lattice in FFT layout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = ["Grid", "make_grid", "set_fft_workers", "fft_workers"]

TWO_PI = 2.0 * np.pi

_FFT_WORKERS = int(os.environ.get("TORUSMHD_THREADS", "0")) or -1


def set_fft_workers(n: int | None) -> None:
    """Set the FFT worker-thread count (None or <=0 means all cores)."""
    global _FFT_WORKERS
    _FFT_WORKERS = n if n and n > 0 else -1


def fft_workers() -> int:
    return _FFT_WORKERS


@dataclass(frozen=True)
class Grid:
    """Periodic torus grid with a fixed dealiasing band.

    Use :func:`make_grid` to construct validated instances; the raw
    constructor skips the band-limit check on purpose so that debug grids
    (e.g. deliberately aliased ones for negative controls) remain
    expressible.

    Attributes
    ----------
    dim : int
        Torus dimension.
    modes_per_axis : int
        Stored modes per axis (the FFT size M).
    side_length : float
        Physical period L of every axis.
    band_limit : int
        Retained band K: coefficients vanish unless |k_a| <= K for all axes.
    pad_factor : int
        Refinement of the evaluation grid used for pointwise products and
        non-quadratic quadrature.
    """

    dim: int
    modes_per_axis: int
    side_length: float = TWO_PI
    band_limit: int = 0
    pad_factor: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.modes_per_axis < 2 or self.modes_per_axis % 2:
            raise ValueError(
                f"modes_per_axis must be even and >= 2, got {self.modes_per_axis}"
            )
        if not (self.side_length > 0):
            raise ValueError(f"side_length must be positive, got {self.side_length}")
        if self.band_limit == 0:
            object.__setattr__(self, "band_limit", self.modes_per_axis // 3)
        if self.band_limit < 1:
            raise ValueError(f"band_limit must be >= 1, got {self.band_limit}")
        if self.pad_factor < 1:
            raise ValueError(f"pad_factor must be >= 1, got {self.pad_factor}")

    # -- derived geometry -------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.modes_per_axis,) * self.dim

    @property
    def volume(self) -> float:
        return self.side_length**self.dim

    @property
    def eval_modes(self) -> int:
        return self.pad_factor * self.modes_per_axis

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers along one axis, FFT layout."""
        m = self.modes_per_axis
        return np.fft.fftfreq(m, 1.0 / m).astype(int)

    def _axis_shape(self, axis: int) -> tuple[int, ...]:
        return (1,) * axis + (self.modes_per_axis,) + (1,) * (self.dim - axis - 1)

    @cached_property
    def wave_axes(self) -> tuple[np.ndarray, ...]:
        """Physical wavenumbers kappa_a, one broadcast-ready array per axis."""
        scale = TWO_PI / self.side_length
        return tuple(
            scale * self.wavenumbers.reshape(self._axis_shape(a))
            for a in range(self.dim)
        )

    @cached_property
    def k_squared(self) -> np.ndarray:
        return sum(k**2 for k in self.wave_axes)

    @cached_property
    def k_squared_safe(self) -> np.ndarray:
        # 1.0 at the mean mode so division is safe; callers zero it themselves
        return np.where(self.k_squared > 0, self.k_squared, 1.0)

    @cached_property
    def band_mask(self) -> np.ndarray:
        absk = np.abs(self.wavenumbers)
        mask = np.ones(self.shape, dtype=bool)
        for a in range(self.dim):
            mask &= absk.reshape(self._axis_shape(a)) <= self.band_limit
        return mask

    @cached_property
    def _reversal_index(self) -> np.ndarray:
        # position of wavenumber -k for each stored position
        m = self.modes_per_axis
        return (-np.arange(m)) % m

    def conj_reversed(self, coeffs: np.ndarray) -> np.ndarray:
        """conj(c(-k)), the coefficient array a real field must equal."""
        idx = self._reversal_index
        sel = (slice(None),) * (coeffs.ndim - self.dim) + np.ix_(*[idx] * self.dim)
        return np.conj(coeffs[sel])

    def coordinates(self, m_eval: int | None = None) -> tuple[np.ndarray, ...]:
        """Collocation coordinates along each axis of the evaluation grid."""
        m = m_eval or self.eval_modes
        x = np.arange(m) * (self.side_length / m)
        return tuple(
            x.reshape((1,) * a + (m,) + (1,) * (self.dim - a - 1))
            for a in range(self.dim)
        )

    # -- transforms -------------------------------------------------------

    def _spatial_axes(self, arr: np.ndarray) -> tuple[int, ...]:
        return tuple(range(arr.ndim - self.dim, arr.ndim))

    def scatter(self, coeffs: np.ndarray, m_eval: int) -> np.ndarray:
        """Embed M-layout coefficients into an m_eval-layout spectral array."""
        if m_eval < self.modes_per_axis:
            raise ValueError("evaluation grid must be at least as fine as the grid")
        lead = coeffs.shape[: coeffs.ndim - self.dim]
        out = np.zeros(lead + (m_eval,) * self.dim, dtype=complex)
        idx = self.wavenumbers % m_eval
        sel = (slice(None),) * len(lead) + np.ix_(*[idx] * self.dim)
        out[sel] = coeffs
        return out

    def gather(self, coeffs_fine: np.ndarray, m_eval: int) -> np.ndarray:
        """Extract this grid's M-layout coefficients from a finer layout."""
        lead_n = coeffs_fine.ndim - self.dim
        idx = self.wavenumbers % m_eval
        sel = (slice(None),) * lead_n + np.ix_(*[idx] * self.dim)
        return coeffs_fine[sel]

    def sample(self, coeffs: np.ndarray, m_eval: int | None = None) -> np.ndarray:
        """Evaluate coefficients on the (padded) collocation grid.

        Returns real values of shape ``lead + (m_eval,)*dim``.
        """
        m = m_eval or self.eval_modes
        spread = self.scatter(coeffs, m) if m != self.modes_per_axis else coeffs
        vals = sfft.ifftn(spread, axes=self._spatial_axes(spread), workers=_FFT_WORKERS)
        return vals.real * float(m) ** self.dim

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Transform collocation values back to M-layout coefficients.

        The input may live on any grid at least as fine as M; content beyond
        the stored layout aliases, so callers are responsible for having
        band-limited data (or for applying the band mask afterwards).
        """
        m_eval = values.shape[-1]
        spec = sfft.fftn(
            values.astype(complex, copy=False),
            axes=self._spatial_axes(values),
            workers=_FFT_WORKERS,
        ) / float(m_eval) ** self.dim
        if m_eval == self.modes_per_axis:
            return spec
        return self.gather(spec, m_eval)

    def quadrature(self, values: np.ndarray) -> float | np.ndarray:
        """Trapezoid (= rectangle, periodic) quadrature over the torus.

        Exact for integrands band-limited below the sampling resolution.
        Sums over the trailing ``dim`` axes.
        """
        m_eval = values.shape[-1]
        w = (self.side_length / m_eval) ** self.dim
        out = w * values.sum(axis=self._spatial_axes(values))
        return float(out) if np.ndim(out) == 0 else out

    def with_side_length(self, side_length: float) -> "Grid":
        return Grid(
            self.dim, self.modes_per_axis, side_length, self.band_limit, self.pad_factor
        )


def make_grid(dim: int, modes_per_axis: int, side_length: float = TWO_PI) -> Grid:
    """Validated grid constructor.

    The band limit is fixed at ``floor(M/3)`` so that triple products of
    band-limited fields stay below the sampling resolution of the default
    evaluation grid and their quadrature is exact.
    """
    if dim not in (2, 3, 4):
        raise ValueError(f"dim must be one of 2, 3, 4, got {dim}")
    if modes_per_axis < 8:
        raise ValueError(f"modes_per_axis must be >= 8, got {modes_per_axis}")
    if modes_per_axis % 2:
        raise ValueError(f"modes_per_axis must be even, got {modes_per_axis}")
    if not (side_length > 0):
        raise ValueError(f"side_length must be positive, got {side_length}")
    return Grid(dim, modes_per_axis, float(side_length), modes_per_axis // 3)
