import numpy as np
import pytest

from torusmhd.grid import Grid, make_grid, set_fft_workers, fft_workers


def test_make_grid_validation():
    with pytest.raises(ValueError):
        make_grid(5, 16)
    with pytest.raises(ValueError):
        make_grid(2, 6)
    with pytest.raises(ValueError):
        make_grid(2, 17)
    with pytest.raises(ValueError):
        make_grid(2, 16, side_length=0.0)
    g = make_grid(3, 12, side_length=3.0)
    assert g.band_limit == 4
    assert g.shape == (12, 12, 12)
    assert g.volume == pytest.approx(27.0)
    assert g.eval_modes == 24


def test_raw_grid_allows_debug_bands():
    # the raw constructor is the escape hatch for deliberately aliased grids
    g = Grid(2, 16, 2 * np.pi, 7, 1)
    assert g.band_limit == 7
    with pytest.raises(ValueError):
        Grid(2, 16, 2 * np.pi, -1)


def test_wavenumbers_layout(grid2):
    k = grid2.wavenumbers
    assert k[0] == 0 and k[1] == 1 and k[-1] == -1
    assert k.min() == -grid2.modes_per_axis // 2


def test_band_mask_counts(grid2):
    # (2K+1)^dim surviving modes
    kk = 2 * grid2.band_limit + 1
    assert int(grid2.band_mask.sum()) == kk**2


def test_sample_analyze_roundtrip(grid2):
    rng = np.random.default_rng(0)
    c = rng.standard_normal((1,) + grid2.shape) + 1j * rng.standard_normal(
        (1,) + grid2.shape
    )
    c = 0.5 * (c + grid2.conj_reversed(c)) * grid2.band_mask
    vals = grid2.sample(c)
    back = grid2.analyze(vals)
    assert np.abs(back - c).max() < 1e-13


def test_sample_matches_direct_sum():
    g = make_grid(2, 8)
    c = np.zeros((1,) + g.shape, dtype=complex)
    c[0, 1, 2] = 0.3 - 0.2j
    c[0, -1, -2] = 0.3 + 0.2j
    xs = g.coordinates(g.eval_modes)
    direct = 2 * np.real((0.3 - 0.2j) * np.exp(1j * (xs[0] + 2 * xs[1])))
    assert np.abs(g.sample(c)[0] - direct).max() < 1e-13


def test_scatter_gather_inverse(grid2):
    rng = np.random.default_rng(1)
    c = rng.standard_normal((3,) + grid2.shape)
    fine = grid2.scatter(c.astype(complex), 48)
    assert fine.shape == (3, 48, 48)
    back = grid2.gather(fine, 48)
    assert np.array_equal(back, c.astype(complex))
    with pytest.raises(ValueError):
        grid2.scatter(c.astype(complex), grid2.modes_per_axis - 2)


def test_quadrature_parseval(grid2):
    rng = np.random.default_rng(2)
    c = rng.standard_normal((1,) + grid2.shape) + 1j * rng.standard_normal(
        (1,) + grid2.shape
    )
    c = 0.5 * (c + grid2.conj_reversed(c)) * grid2.band_mask
    vals = grid2.sample(c)
    # int |f|^2 = V * sum |c_k|^2 for band-limited f on the padded grid
    lhs = grid2.quadrature(vals**2)
    rhs = grid2.volume * float(np.sum(np.abs(c) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_quadrature_constant():
    g = make_grid(3, 8, side_length=2.0)
    vals = np.full((16, 16, 16), 1.5)
    assert g.quadrature(vals) == pytest.approx(1.5 * 8.0, rel=1e-14)


def test_fft_workers_roundtrip():
    old = fft_workers()
    try:
        set_fft_workers(2)
        assert fft_workers() == 2
        set_fft_workers(None)
        assert fft_workers() == -1
    finally:
        set_fft_workers(old if old > 0 else None)
