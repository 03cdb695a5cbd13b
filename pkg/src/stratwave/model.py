"""Dispersion and dissipation symbols of the model equation.

The equation under study is

    u_t + D(u_x) + u^k u_x + eta*(H d_x^n u + H_m u) = 0,    eta > 0,

with D a Fourier multiplier with real symbol p(xi), H the Hilbert transform
and H_m = -d_x^2 (m=2) or H d_x^3 (m=3).  All multipliers are expressed in
the angular Fourier pair

    u(x) = (1/2pi) int e^{i x xi} uhat(xi) dxi,

under which d_x has multiplier i*xi and H has multiplier i*sign(xi), so that
H d_x^n carries i^{n+1}|xi| xi^{n-1} and H_m carries |xi|^m.  The combined
dissipation symbol is

    phi_{m,n}(xi) = -eta * (i^{n+1} |xi| xi^{n-1} + |xi|^m),

and the full linear multiplier (the symbol of the linear semigroup generator)

    L(xi) = -i p(xi) xi + phi_{m,n}(xi).

Key structural facts, all unit-tested:

* For n even, Re phi = -eta|xi|^m exactly, so |exp(L t)| = exp(-eta|xi|^m t).
* For n odd with n = 3 + 4d, phi is real and equals -eta(|xi|^n + |xi|^m).
* For n = 1, phi is real and equals eta(|xi| - |xi|^m): an amplification band
  on |xi| < 1 with sup_xi Re phi = eta * B(m), B(2) = 1/4, B(3) = 2/(3 sqrt 3).
* For n = 5 + 4d, phi grows like +eta|xi|^n: those n are rejected (InvalidN).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParameter, InvalidN, InvalidRange, UnknownPreset

#: origin_regularity sentinel for symbols smooth at xi = 0 (polynomials).
SMOOTH = 10**6


@dataclass(frozen=True)
class DispersionSymbol:
    """Real-valued dispersion symbol p(xi) with growth and regularity metadata.

    sigma is the polynomial growth exponent (|p(xi)| <= c |xi|^sigma) and
    origin_regularity the number of continuous derivatives at xi = 0, which
    gates how large n the tail-decay analysis supports (p must be C^{n-1} near 0).
    """

    kind: str
    sigma: float
    origin_regularity: int
    a: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )

    @staticmethod
    def kdv() -> "DispersionSymbol":
        """p(xi) = -|xi|^2 (KdV-type dispersion, smooth at the origin)."""
        return DispersionSymbol(kind="kdv", sigma=2.0, origin_regularity=SMOOTH)

    @staticmethod
    def bo() -> "DispersionSymbol":
        """p(xi) = |xi| (Benjamin-Ono-type dispersion, C^0 at the origin)."""
        return DispersionSymbol(kind="bo", sigma=1.0, origin_regularity=0)

    @staticmethod
    def dgbo(a: float) -> "DispersionSymbol":
        """p(xi) = |xi|^{1+a}, a in (0,1): between BO (a=0) and KdV (a=1)."""
        if not 0.0 < a < 1.0:
            raise BadParameter(f"dgbo exponent a must lie in (0,1), got {a}")
        return DispersionSymbol(kind="dgbo", sigma=1.0 + a, origin_regularity=1, a=a)

    @staticmethod
    def custom(
        func: Callable[[np.ndarray], np.ndarray],
        sigma: float,
        origin_regularity: int,
    ) -> "DispersionSymbol":
        """Wrap a user symbol; sigma and regularity must be declared.

        The growth bound is checked empirically (fitted_growth_constant);
        the declared regularity is trusted.
        """
        if sigma <= 0:
            raise BadParameter("sigma must be positive")
        if origin_regularity < 0:
            raise BadParameter("origin_regularity must be >= 0")
        return DispersionSymbol(
            kind="custom", sigma=sigma, origin_regularity=origin_regularity, func=func
        )

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind == "kdv":
            return -np.abs(xi) ** 2
        if self.kind == "bo":
            return np.abs(xi)
        if self.kind == "dgbo":
            return np.abs(xi) ** (1.0 + self.a)
        out = np.asarray(self.func(xi))
        if np.iscomplexobj(out) and np.max(np.abs(out.imag)) > 0:
            raise BadParameter("custom dispersion symbol must be real-valued")
        return out.real if np.iscomplexobj(out) else out

    def supports_decay_order(self, n: int) -> bool:
        """True when p is smooth enough (C^{n-1} at 0) for the order-n theory."""
        return self.origin_regularity >= n - 1


@dataclass(frozen=True)
class ModelParams:
    """Validated (m, n, k, eta) with the derived smoothing rate alpha.

    alpha is the short-time blow-up rate of kernel norms: 1/m when n = 1 or
    n is even (including n = 2), 1/n when n = 3 + 4d.  Always 0 < alpha <= 1/2.
    """

    m: int
    n: int
    k: int
    eta: float
    alpha: float


def smoothing_rate(m: int, n: int) -> float:
    """alpha(m, n): 1/m for n = 1 or n even, 1/n for n = 3 + 4d."""
    if n == 1 or n % 2 == 0:
        return 1.0 / m
    return 1.0 / n


def validate_params(m: int, n: int, k: int, eta: float) -> ModelParams:
    """Validate model parameters and derive alpha.

    Rejects n = 5 + 4d (d >= 0): for those, |Khat(t, xi)| ~ exp(eta|xi|^n t)
    and the construction fails.
    """
    if m not in (2, 3):
        raise InvalidRange(f"m must be 2 or 3, got {m}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidRange(f"n must be an integer >= 1, got {n}")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidRange(f"k must be an integer >= 1, got {k}")
    if not eta > 0:
        raise InvalidRange(f"eta must be positive, got {eta}")
    if n % 4 == 1 and n >= 5:
        raise InvalidN(
            f"n = {n} = 5 + 4d is excluded: the kernel spectrum grows like "
            f"exp(eta |xi|^{n} t)"
        )
    return ModelParams(m=int(m), n=int(n), k=int(k), eta=float(eta),
                       alpha=smoothing_rate(m, n))


def dissipation_symbol(xi, params: ModelParams):
    """phi_{m,n}(xi) = -eta (i^{n+1} |xi| xi^{n-1} + |xi|^m).

    Total on real xi; phi(0) = 0.  Scalar in, scalar out; arrays broadcast.
    """
    xi_arr = np.asarray(xi, dtype=float)
    absxi = np.abs(xi_arr)
    i_pow = 1j ** (params.n + 1)
    phi = -params.eta * (i_pow * absxi * xi_arr ** (params.n - 1) + absxi ** params.m)
    if np.isscalar(xi) or xi_arr.ndim == 0:
        return complex(phi)
    return phi


def linear_multiplier(xi, sym: DispersionSymbol, params: ModelParams):
    """L(xi) = -i p(xi) xi + phi_{m,n}(xi); Re L = Re phi."""
    xi_arr = np.asarray(xi, dtype=float)
    L = -1j * sym(xi_arr) * xi_arr + dissipation_symbol(xi_arr, params)
    if np.isscalar(xi) or xi_arr.ndim == 0:
        return complex(L)
    return L


def amplification_bound(params: ModelParams) -> float:
    """B(m, n) with sup_xi Re phi_{m,n} = eta * B.

    For n = 1 this is max_{r>=0} (r - r^m): 1/4 for m = 2, 2/(3 sqrt 3) for
    m = 3.  For every other admissible n, Re phi <= 0 and B = 0.
    """
    if params.n != 1:
        return 0.0
    if params.m == 2:
        return 0.25
    return 2.0 / (3.0 * math.sqrt(3.0))


def fitted_growth_constant(sym: DispersionSymbol, xi_max: float = 256.0,
                           npts: int = 4096) -> float:
    """Empirical c with |p(xi)| <= c |xi|^sigma on a sampled log range."""
    xi = np.logspace(-3, np.log10(xi_max), npts)
    vals = np.abs(np.asarray(sym(xi), dtype=float))
    c = float(np.max(vals / xi ** sym.sigma))
    if not np.isfinite(c):
        raise BadParameter("growth constant not finite on sampled range")
    return c


# ---------------------------------------------------------------------------
# Presets: the five physical models (eta stays a free parameter).
# ---------------------------------------------------------------------------

PRESET_NAMES = ("ost", "gost", "bo_perturbed", "chen_lee", "dgbo_perturbed")


def preset(name: str, eta: float = 1.0, k: int = 2, a: float = 0.5):
    """Named model presets returning (DispersionSymbol, ModelParams).

    ost             KdV dispersion, m=3, n=1, k=1   (Ostrovsky-Stepanyams-Tsimring)
    gost            KdV dispersion, m=3, n=1, k in {2,3}
    bo_perturbed    BO dispersion, m=3, n=1, k=1
    chen_lee        BO dispersion, m=2, n=1, k=1
    dgbo_perturbed  |xi|^{1+a} dispersion, m=3, n=2, k=1
    """
    if name == "ost":
        return DispersionSymbol.kdv(), validate_params(3, 1, 1, eta)
    if name == "gost":
        if k not in (2, 3):
            raise BadParameter(f"gost requires k in {{2,3}}, got {k}")
        return DispersionSymbol.kdv(), validate_params(3, 1, k, eta)
    if name == "bo_perturbed":
        return DispersionSymbol.bo(), validate_params(3, 1, 1, eta)
    if name == "chen_lee":
        return DispersionSymbol.bo(), validate_params(2, 1, 1, eta)
    if name == "dgbo_perturbed":
        return DispersionSymbol.dgbo(a), validate_params(3, 2, 1, eta)
    raise UnknownPreset(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


def model_from_config(cfg: dict):
    """Build (sym, params) from a model-config dict.

    Either {"preset": name, "eta": ..., "k": ..., "a": ...} or
    {"symbol": {"kind": ..., "a": ...}, "m": ..., "n": ..., "k": ..., "eta": ...}.
    """
    if "preset" in cfg:
        kwargs = {}
        for key in ("eta", "k", "a"):
            if key in cfg:
                kwargs[key] = cfg[key]
        return preset(cfg["preset"], **kwargs)
    sc = cfg["symbol"]
    kind = sc["kind"]
    if kind == "kdv":
        sym = DispersionSymbol.kdv()
    elif kind == "bo":
        sym = DispersionSymbol.bo()
    elif kind == "dgbo":
        sym = DispersionSymbol.dgbo(sc["a"])
    else:
        raise BadParameter(f"unknown symbol kind {kind!r}")
    params = validate_params(cfg["m"], cfg["n"], cfg["k"], cfg["eta"])
    return sym, params
