import numpy as np
import pytest

from stratwave import (Field, Grid, GridMismatch, SpectralField, convolve,
                       dealias, derivative, field_from_binary, field_from_csv,
                       field_to_binary, field_to_csv, hilbert, integral,
                       to_physical, to_spectral, wrap_contamination)
from stratwave.errors import BadParameter


def random_field(grid, rng, real=True):
    vals = rng.standard_normal(grid.N)
    if not real:
        vals = vals + 1j * rng.standard_normal(grid.N)
    return Field(grid=grid, samples=vals)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def test_grid_basics():
    g = Grid(64, 10.0)
    assert g.dx * g.N == pytest.approx(2 * g.L)
    assert g.dxi == pytest.approx(np.pi / g.L)
    assert g.x[0] == -10.0 and g.x[-1] == pytest.approx(10.0 - g.dx)
    assert g.resolves(0.9 * np.pi / g.dx)
    assert not g.resolves(np.pi / g.dx)


@pytest.mark.parametrize("N", [15, 17, 100, 8])
def test_grid_rejects_bad_sizes(N):
    with pytest.raises(BadParameter):
        Grid(N, 10.0)


# ---------------------------------------------------------------------------
# transform pair
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("N", [16, 256, 4096, 2 ** 16, 2 ** 20])
def test_round_trip(N):
    rng = np.random.default_rng(7)
    g = Grid(N, 37.0)
    f = random_field(g, rng, real=False)
    back = to_physical(to_spectral(f))
    scale = np.max(np.abs(f.samples))
    assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * scale


def test_parseval():
    rng = np.random.default_rng(3)
    g = Grid(1024, 21.0)
    f = random_field(g, rng)
    F = to_spectral(f)
    phys = np.sum(np.abs(f.samples) ** 2) * g.dx
    spec = np.sum(np.abs(F.coefficients) ** 2) * g.dxi / (2 * np.pi)
    assert spec == pytest.approx(phys, rel=1e-13)


def test_constant_concentrates_at_zero():
    g = Grid(128, 5.0)
    F = to_spectral(Field(g, np.ones(g.N)))
    nonzero = np.abs(F.coefficients) > 1e-10
    assert nonzero.sum() == 1 and nonzero[g.j == 0][0]
    # the xi=0 coefficient is the discrete integral: 2L
    assert F.coefficients[g.j == 0][0].real == pytest.approx(2 * g.L)


def test_cosine_two_symmetric_modes():
    g = Grid(128, 5.0)
    f = Field(g, np.cos(g.dxi * g.x))
    F = to_spectral(f)
    large = np.abs(F.coefficients) > 1e-9 * np.max(np.abs(F.coefficients))
    assert sorted(g.j[large].tolist()) == [-1, 1]


def test_integral_equals_zero_mode():
    rng = np.random.default_rng(11)
    g = Grid(256, 8.0)
    f = random_field(g, rng)
    F = to_spectral(f)
    assert integral(f) == pytest.approx(float(F.coefficients[g.j == 0][0].real),
                                        rel=1e-12, abs=1e-12)


def test_grid_mismatch_detected():
    rng = np.random.default_rng(0)
    f = random_field(Grid(64, 10.0), rng)
    h = random_field(Grid(64, 11.0), rng)
    with pytest.raises(GridMismatch):
        convolve(f, h)


# ---------------------------------------------------------------------------
# derivative and Hilbert transform
# ---------------------------------------------------------------------------

def test_derivative_trig():
    g = Grid(256, 12.0)
    om = 3 * np.pi / g.L
    f = Field(g, np.sin(om * g.x))
    df = derivative(f)
    assert np.max(np.abs(df.samples.real - om * np.cos(om * g.x))) <= 1e-10
    const = derivative(Field(g, np.full(g.N, 2.7)))
    assert np.max(np.abs(const.samples)) <= 1e-12


def test_derivative_eigenfunction():
    g = Grid(128, 6.0)
    om = 5 * g.dxi
    f = Field(g, np.exp(1j * om * g.x))
    df = derivative(f)
    assert np.allclose(df.samples, 1j * om * f.samples, atol=1e-10)


def test_hilbert_on_cosine_and_constant():
    g = Grid(256, 10.0)
    om = 4 * g.dxi
    Hc = hilbert(Field(g, np.cos(om * g.x)))
    # i sign(xi) convention: H cos = -sin
    assert np.max(np.abs(Hc.samples.real - (-np.sin(om * g.x)))) <= 1e-10
    Hconst = hilbert(Field(g, np.ones(g.N)))
    assert np.max(np.abs(Hconst.samples)) <= 1e-13


def test_hilbert_involution_on_mean_zero():
    rng = np.random.default_rng(5)
    g = Grid(512, 9.0)
    f = random_field(g, rng)
    F = to_spectral(f)
    coeffs = F.coefficients.copy()
    coeffs[g.j == 0] = 0.0
    f0 = to_physical(SpectralField(g, coeffs))
    hh = hilbert(hilbert(f0))
    assert np.max(np.abs(hh.samples + f0.samples)) <= 1e-10 * np.max(np.abs(f0.samples))


def test_hilbert_commutes_with_derivative():
    rng = np.random.default_rng(9)
    g = Grid(512, 9.0)
    f = random_field(g, rng)
    f = to_physical(dealias(to_spectral(f), 1))  # band-limit first
    a = hilbert(derivative(f))
    b = derivative(hilbert(f))
    assert np.max(np.abs(a.samples - b.samples)) <= 1e-10 * np.max(np.abs(a.samples))


# ---------------------------------------------------------------------------
# dealiasing
# ---------------------------------------------------------------------------

def test_dealias_rule_arithmetic():
    g16 = Grid(16, 1.0)
    F = SpectralField(g16, np.ones(16))
    D = dealias(F, 1)
    kept = g16.j[np.abs(D.coefficients) > 0]
    assert np.max(np.abs(kept)) == 5          # zero |j| > 16/3
    g32 = Grid(32, 1.0)
    D2 = dealias(SpectralField(g32, np.ones(32)), 3)
    kept2 = g32.j[np.abs(D2.coefficients) > 0]
    assert np.max(np.abs(kept2)) == 6         # zero |j| > 32/5


def test_dealias_idempotent_projection():
    rng = np.random.default_rng(2)
    g = Grid(128, 4.0)
    F = to_spectral(random_field(g, rng))
    once = dealias(F, 2)
    twice = dealias(once, 2)
    assert np.array_equal(once.coefficients, twice.coefficients)
    assert np.linalg.norm(once.coefficients) <= np.linalg.norm(F.coefficients)


# ---------------------------------------------------------------------------
# field container and serialization
# ---------------------------------------------------------------------------

def test_real_hint_enforced():
    g = Grid(64, 2.0)
    with pytest.raises(BadParameter):
        Field(g, np.full(g.N, 1.0 + 1e-3j), is_real_hint=True)
    Field(g, np.full(g.N, 1.0 + 1e-14j), is_real_hint=True)  # fine


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    g = Grid(128, 6.0)
    f = random_field(g, rng, real=False)
    path = tmp_path / "f.csv"
    field_to_csv(f, path)
    back = field_from_csv(path)
    assert back.grid == g
    assert np.max(np.abs(back.samples - f.samples)) == 0.0


def test_binary_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    g = Grid(256, 3.5)
    f = random_field(g, rng, real=False)
    path = tmp_path / "f.stwv"
    field_to_binary(f, path)
    back = field_from_binary(path)
    assert back.grid == g
    assert np.array_equal(back.samples, f.samples)


def test_binary_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.stwv"
    path.write_bytes(b"NOPE" + b"\0" * 32)
    with pytest.raises(BadParameter):
        field_from_binary(path)


def test_wrap_contamination_estimate():
    g = Grid(2 ** 16, 400.0)
    # 1/x^2 tail measured at x=200 with L=400: images at 600 and 1000
    est = wrap_contamination(g, 200.0, 2.0)
    assert est == pytest.approx((200 / 600) ** 2 + (200 / 1000) ** 2, rel=1e-12)
    assert wrap_contamination(Grid(2 ** 16, 3200.0), 200.0, 2.0) < 2.2e-3
