"""Periodic grid, transform pair, multiplier application, dealiasing.

The line is truncated to the box [-L, L) with N (power of two) points.  The
discrete pair approximates the angular-convention transforms

    uhat(xi_j) = sum_k u(x_k) e^{-i x_k xi_j} dx,          xi_j = (pi/L) j,
    u(x_k)     = (dxi / 2pi) sum_j uhat(xi_j) e^{i x_k xi_j},   dxi = pi/L,

so spectral coefficients are samples of the continuum transform (including
the e^{+i L xi_j} = (-1)^j phase from the grid origin at x = -L).  With this
normalisation, discrete Parseval holds exactly:

    sum |u_k|^2 dx = (dxi / 2pi) sum |uhat_j|^2,

and the coefficient at xi = 0 is the discrete integral of u over the box.
Inverse-transforming samples of a continuum transform yields the 2L-periodic
sum of the continuum function (Poisson summation); experiments must keep
their measurement windows wrap-safe (see wrap_contamination).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BadParameter, GridMismatch


class Grid:
    """Uniform periodic grid on [-L, L) with N = 2^q points (N >= 16)."""

    __slots__ = ("N", "L", "dx", "dxi", "x", "j", "xi", "_sign")

    def __init__(self, N: int, L: float):
        if N < 16 or (N & (N - 1)) != 0:
            raise BadParameter(f"N must be a power of two >= 16, got {N}")
        if not L > 0:
            raise BadParameter(f"L must be positive, got {L}")
        self.N = int(N)
        self.L = float(L)
        self.dx = 2.0 * self.L / self.N
        self.dxi = np.pi / self.L
        self.x = -self.L + self.dx * np.arange(self.N)
        self.j = np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)
        self.xi = self.dxi * self.j
        # exact (-1)^j phase relating FFT indexing to the x = -L origin
        self._sign = np.where(self.j % 2 == 0, 1.0, -1.0)

    @property
    def nyquist(self) -> float:
        """Largest resolved angular frequency pi/dx."""
        return np.pi / self.dx

    def resolves(self, xi_target: float) -> bool:
        """True when the Nyquist frequency strictly exceeds xi_target."""
        return self.nyquist > xi_target

    def index_of(self, x_value: float) -> int:
        """Grid index of the sample nearest to x_value."""
        return int(round((x_value + self.L) / self.dx)) % self.N

    def __eq__(self, other):
        return isinstance(other, Grid) and self.N == other.N and self.L == other.L

    def __hash__(self):
        return hash((self.N, self.L))

    def __repr__(self):
        return f"Grid(N={self.N}, L={self.L})"


REAL_HINT_TOL = 1e-10


@dataclass
class Field:
    """Physical-space samples on a grid."""

    grid: Grid
    samples: np.ndarray
    is_real_hint: bool = False

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if self.samples.shape != (self.grid.N,):
            raise BadParameter(
                f"samples shape {self.samples.shape} != grid size ({self.grid.N},)"
            )
        if self.is_real_hint:
            amax = float(np.max(np.abs(self.samples)))
            if amax > 0 and float(np.max(np.abs(self.samples.imag))) > REAL_HINT_TOL * amax:
                raise BadParameter("is_real_hint set but imaginary part is significant")

    @property
    def real(self) -> np.ndarray:
        return self.samples.real

    def l2_norm(self) -> float:
        """Discrete L2 norm sqrt(sum |u|^2 dx)."""
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.dx))


@dataclass
class SpectralField:
    """Spectral coefficients indexed by xi_j (FFT ordering)."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        if self.coefficients.shape != (self.grid.N,):
            raise BadParameter("coefficient array does not match grid size")


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatch(f"{a.grid!r} vs {b.grid!r}")


def to_spectral(f: Field) -> SpectralField:
    """Forward transform; coefficients sample the continuum transform."""
    g = f.grid
    coeffs = g.dx * g._sign * np.fft.fft(f.samples)
    return SpectralField(grid=g, coefficients=coeffs)


def to_physical(F: SpectralField, real_hint: bool = False) -> Field:
    """Inverse transform back to physical samples."""
    g = F.grid
    samples = np.fft.ifft(F.coefficients * g._sign) / g.dx
    return Field(grid=g, samples=samples, is_real_hint=real_hint)


def derivative(f: Field) -> Field:
    """Spectral derivative (multiplier i xi); Nyquist mode is zeroed.

    Exact for band-limited trigonometric polynomials.
    """
    g = f.grid
    F = to_spectral(f)
    mult = 1j * g.xi
    mult[g.j == -g.N // 2] = 0.0
    return to_physical(SpectralField(g, mult * F.coefficients),
                       real_hint=f.is_real_hint)


def hilbert(f: Field) -> Field:
    """Hilbert transform: multiplier i sign(xi), with sign(0) = 0."""
    g = f.grid
    F = to_spectral(f)
    mult = 1j * np.sign(g.xi)
    return to_physical(SpectralField(g, mult * F.coefficients))


def dealias(F: SpectralField, k: int) -> SpectralField:
    """Zero coefficients with |j| > N/(k+2) (keeps fraction 2/(k+2) of modes).

    Generalized 2/3-rule for the degree-(k+1) nonlinearity u^{k+1}.
    Idempotent, norm non-increasing.
    """
    if k < 1:
        raise BadParameter(f"k must be >= 1, got {k}")
    g = F.grid
    coeffs = np.where(np.abs(g.j) > g.N / (k + 2), 0.0, F.coefficients)
    return SpectralField(grid=g, coefficients=coeffs)


def dealias_mask(grid: Grid, k: int) -> np.ndarray:
    """Boolean-as-float mask used by dealias (1 on kept modes)."""
    if k < 1:
        raise BadParameter(f"k must be >= 1, got {k}")
    return np.where(np.abs(grid.j) > grid.N / (k + 2), 0.0, 1.0)


def convolve(f: Field, g: Field, real_hint: bool = False) -> Field:
    """Continuum-normalised convolution (f*g)(x) = int f(y) g(x-y) dy."""
    _check_same_grid(f, g)
    Ff = to_spectral(f)
    Fg = to_spectral(g)
    return to_physical(SpectralField(f.grid, Ff.coefficients * Fg.coefficients),
                       real_hint=real_hint)


def integral(f: Field) -> float:
    """Discrete integral of Re f over the box (the xi = 0 coefficient)."""
    return float(np.sum(f.samples.real) * f.grid.dx)


def wrap_contamination(grid: Grid, x_edge: float, exponent: float) -> float:
    """Estimated wrap-around contamination ratio at |x| = x_edge.

    For a two-sided |x|^-exponent tail, the nearest periodic images sit at
    distances 2L -+ x_edge; returns their combined relative contribution.
    """
    if x_edge <= 0 or x_edge >= grid.L:
        raise BadParameter("x_edge must lie in (0, L)")
    q = exponent
    return float((x_edge / (2 * grid.L - x_edge)) ** q
                 + (x_edge / (2 * grid.L + x_edge)) ** q)


# ---------------------------------------------------------------------------
# Serialization: CSV (x, re, im) and the STWV binary block.
# ---------------------------------------------------------------------------

BINARY_MAGIC = b"STWV"
BINARY_VERSION = 1


def field_to_csv(f: Field, path) -> None:
    """Write columns x, re, im with round-trip-exact float formatting."""
    with open(path, "w") as fh:
        fh.write("x,re,im\n")
        for xv, sv in zip(f.grid.x, f.samples):
            fh.write(f"{xv:.17g},{sv.real:.17g},{sv.imag:.17g}\n")


def field_from_csv(path, grid: Optional[Grid] = None) -> Field:
    """Read a field written by field_to_csv; the grid is inferred from x."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 3:
        raise BadParameter(f"{path}: expected 3 columns (x, re, im)")
    x = data[:, 0]
    N = len(x)
    dx = x[1] - x[0]
    L = -x[0]
    if grid is None:
        grid = Grid(N, L)
    if grid.N != N or abs(grid.dx - dx) > 1e-12 * abs(dx):
        raise GridMismatch(f"{path}: CSV grid does not match {grid!r}")
    return Field(grid=grid, samples=data[:, 1] + 1j * data[:, 2])


def field_to_binary(f: Field, path) -> None:
    """Little-endian block: magic 'STWV', version u32, N u64, L f64, payload."""
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<IQd", BINARY_VERSION, f.grid.N, f.grid.L))
        fh.write(f.samples.astype("<c16").tobytes())


def field_from_binary(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BINARY_MAGIC:
            raise BadParameter(f"{path}: bad magic {magic!r}")
        version, N, L = struct.unpack("<IQd", fh.read(4 + 8 + 8))
        if version != BINARY_VERSION:
            raise BadParameter(f"{path}: unsupported version {version}")
        payload = fh.read(16 * N)
        samples = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    return Field(grid=Grid(N, L), samples=samples)
