"""Band-limited vector fields on the torus and the operators acting on them.

Everything here is exact in coefficient space: derivatives and Fourier
multipliers act mode by mode, the Leray projection is the per-mode
orthogonal projection onto divergence-free vectors, and rescaling moves a
field onto the shrunken torus without touching its integer mode content.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Grid, make_grid

__all__ = [
    "SpectralField",
    "WaveMultiplier",
    "make_grid",
    "apply_multiplier",
    "leray_project",
    "rescale_field",
    "synth_random_divfree",
    "synth_random_field",
    "divergence",
    "gradient",
    "partial_derivative",
    "derivative_multiplier",
    "laplacian_multiplier",
    "plane_laplacian_multiplier",
    "fractional_laplacian_multiplier",
    "field_from_function",
]

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SpectralField:
    """A real field stored as complex Fourier coefficients.

    ``coeffs`` has shape ``(components,) + (M,)*dim`` in FFT layout.  The
    named constructors guarantee Hermitian symmetry and the band limit;
    :meth:`validate` re-checks both for data arriving from outside
    (snapshots, hand-built arrays).
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != self.grid.dim + 1 or c.shape[1:] != self.grid.shape:
            raise ValueError(
                f"coefficient shape {c.shape} does not match grid "
                f"(components,) + {self.grid.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, grid: Grid, components: int) -> "SpectralField":
        return cls(grid, np.zeros((components,) + grid.shape, dtype=complex))

    @classmethod
    def from_samples(cls, grid: Grid, values: np.ndarray) -> "SpectralField":
        """Build a field from real collocation values (band-projected)."""
        vals = np.asarray(values, dtype=float)
        if vals.ndim == grid.dim:
            vals = vals[None]
        coeffs = grid.analyze(vals) * grid.band_mask
        return cls(grid, coeffs)

    # -- basic queries ----------------------------------------------------

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def component(self, i: int) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs[i : i + 1])

    def sample(self, m_eval: int | None = None) -> np.ndarray:
        return self.grid.sample(self.coeffs, m_eval)

    def mean(self) -> np.ndarray:
        return self.coeffs[(slice(None),) + (0,) * self.grid.dim].real.copy()

    def validate(self, tol: float = _HERMITIAN_TOL) -> None:
        """Raise if the invariants (real field, band limit, finite) fail."""
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("field coefficients contain non-finite entries")
        scale = np.abs(self.coeffs).max() or 1.0
        herm = np.abs(self.coeffs - self.grid.conj_reversed(self.coeffs)).max()
        if herm > tol * scale:
            raise ValueError(
                f"field is not Hermitian-symmetric (defect {herm:.3e}, scale {scale:.3e})"
            )
        outside = np.abs(self.coeffs * ~self.grid.band_mask).max()
        if outside > tol * scale:
            raise ValueError(
                f"field has content outside the band limit (max {outside:.3e})"
            )

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def _check_compatible(self, other: "SpectralField") -> None:
        if other.grid != self.grid or other.components != self.components:
            raise ValueError("fields live on different grids or component counts")


@dataclass(frozen=True)
class WaveMultiplier:
    """A Fourier multiplier: a scalar symbol evaluated on the wavevector lattice.

    ``symbol(grid)`` returns an array broadcastable against coefficient
    arrays.  Symbols must be finite everywhere; singular symbols are defined
    to vanish at the mean mode.
    """

    description: str
    symbol: Callable[[Grid], np.ndarray]

    def symbol_array(self, grid: Grid) -> np.ndarray:
        sym = np.asarray(self.symbol(grid), dtype=complex)
        sym = np.broadcast_to(sym, grid.shape)
        if not np.all(np.isfinite(sym)):
            raise ValueError(f"multiplier '{self.description}' has non-finite symbol")
        return sym


def derivative_multiplier(axis: int) -> WaveMultiplier:
    return WaveMultiplier(
        f"d/dx{axis + 1}", lambda g: 1j * g.wave_axes[axis]
    )


def laplacian_multiplier() -> WaveMultiplier:
    return WaveMultiplier("laplacian", lambda g: -g.k_squared)


def plane_laplacian_multiplier(axes: tuple[int, ...]) -> WaveMultiplier:
    """Laplacian restricted to a subset of axes (0-based)."""
    ax = tuple(axes)
    return WaveMultiplier(
        f"laplacian_axes{ax}",
        lambda g: -sum(g.wave_axes[a] ** 2 for a in ax),
    )


def fractional_laplacian_multiplier(s: float) -> WaveMultiplier:
    """|kappa|^s, with the singular/vanishing symbol set to 0 at the mean mode."""

    def sym(g: Grid) -> np.ndarray:
        with np.errstate(divide="ignore"):
            out = np.where(g.k_squared > 0, g.k_squared_safe ** (s / 2.0), 0.0)
        return out

    return WaveMultiplier(f"lambda^{s}", sym)


def apply_multiplier(field: SpectralField, mult: WaveMultiplier) -> SpectralField:
    """Apply a Fourier multiplier, rejecting symbols that would break reality.

    A real output requires the symbol to satisfy sym(-k) = conj(sym(k)).
    """
    g = field.grid
    sym = mult.symbol_array(g)
    scale = np.abs(sym).max() or 1.0
    # only banded modes carry content; the self-paired Nyquist row would
    # falsely flag every odd symbol
    defect = np.abs((g.conj_reversed(sym) - sym) * g.band_mask).max()
    if defect > 1e-13 * scale:
        raise ValueError(
            f"multiplier '{mult.description}' breaks Hermitian symmetry "
            f"(defect {defect:.3e})"
        )
    return SpectralField(g, field.coeffs * sym[None])


def partial_derivative(field: SpectralField, axis: int) -> SpectralField:
    return apply_multiplier(field, derivative_multiplier(axis))


def gradient(field: SpectralField) -> SpectralField:
    """Stack all first derivatives: components ordered (axis, component)."""
    g = field.grid
    parts = [1j * g.wave_axes[a] * field.coeffs for a in range(g.dim)]
    return SpectralField(g, np.concatenate(parts, axis=0))


def divergence(field: SpectralField) -> SpectralField:
    g = field.grid
    if field.components != g.dim:
        raise ValueError("divergence needs one component per axis")
    div = sum(1j * g.wave_axes[a] * field.coeffs[a] for a in range(g.dim))
    return SpectralField(g, div[None])


def leray_project(field: SpectralField) -> SpectralField:
    """Per-mode projection onto divergence-free vectors; mean mode untouched."""
    g = field.grid
    if field.components != g.dim:
        raise ValueError("leray projection needs one component per axis")
    return SpectralField(g, _leray_raw(g, field.coeffs))


def _leray_raw(g: Grid, coeffs: np.ndarray) -> np.ndarray:
    div = sum(g.wave_axes[a] * coeffs[a] for a in range(g.dim))
    frac = div / g.k_squared_safe
    return coeffs - np.stack([g.wave_axes[a] * frac for a in range(g.dim)])


def rescale_field(field: SpectralField, lam: int) -> SpectralField:
    """The dilation f -> lam * f(lam x) realised on the torus of side L/lam.

    Integer lam wraps the dilated field an exact whole number of times
    around the original period, so the integer mode content is unchanged;
    only the amplitude and the physical side length move.
    """
    lam_i = int(lam)
    if lam_i != lam or lam_i < 1:
        raise ValueError(f"rescale factor must be a positive integer, got {lam}")
    g = field.grid
    out_grid = g.with_side_length(g.side_length / lam_i)
    return SpectralField(out_grid, lam_i * field.coeffs)


def _hermitian_noise(grid: Grid, components: int, rng: np.random.Generator) -> np.ndarray:
    shape = (components,) + grid.shape
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return 0.5 * (a + grid.conj_reversed(a))


def _shaped_noise(
    grid: Grid, components: int, seed: int, decay: float
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = _hermitian_noise(grid, components, rng)
    with np.errstate(divide="ignore"):
        shape = np.where(
            grid.k_squared > 0, grid.k_squared_safe ** (-decay / 2.0), 0.0
        )
    return a * (shape * grid.band_mask)[None]


def _normalized(grid: Grid, coeffs: np.ndarray, amplitude: float) -> np.ndarray:
    norm = np.sqrt(grid.volume * np.sum(np.abs(coeffs) ** 2))
    if norm == 0:
        raise ValueError("degenerate random draw, cannot normalize")
    return coeffs * (amplitude / norm)


def synth_random_field(
    grid: Grid,
    components: int,
    seed: int,
    decay: float = 3.0,
    amplitude: float = 1.0,
) -> SpectralField:
    """Mean-zero random band-limited field with |k|^(-decay) coefficients.

    Deterministic in the seed; the L2 norm is normalized to ``amplitude``.
    """
    coeffs = _shaped_noise(grid, components, seed, decay)
    return SpectralField(grid, _normalized(grid, coeffs, amplitude))


def synth_random_divfree(
    grid: Grid,
    components: int,
    seed: int,
    decay: float = 3.0,
    amplitude: float = 1.0,
) -> SpectralField:
    """Divergence-free variant of :func:`synth_random_field`.

    Requires one component per axis so the per-mode projection applies.
    """
    if components != grid.dim:
        raise ValueError(
            f"divergence-free synthesis needs components == dim, got "
            f"{components} on a dim-{grid.dim} grid"
        )
    coeffs = _leray_raw(grid, _shaped_noise(grid, components, seed, decay))
    return SpectralField(grid, _normalized(grid, coeffs, amplitude))


def field_from_function(
    grid: Grid, fn: Callable[..., np.ndarray], components: int = 1
) -> SpectralField:
    """Sample ``fn(x1, ..., xd)`` (returning (components, ...) values) on the
    evaluation grid and band-project.  Convenience for analytic test fields."""
    xs = grid.coordinates(grid.eval_modes)
    vals = np.asarray(fn(*xs), dtype=float)
    target = (components,) + (grid.eval_modes,) * grid.dim
    vals = np.broadcast_to(vals, target) if vals.shape != target else vals
    return SpectralField.from_samples(grid, vals)
