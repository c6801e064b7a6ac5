"""Autocovariances by MA(infinity) convolution and by spectral quadrature.

Two independent routes are provided:

* :func:`acvf_ma` sums ``sigma2 * sum_k c_k c_{k+h}`` over the causal
  coefficients from :func:`harma.model.ma_coefficients`;
* :func:`acvf_spectral` integrates ``2 * int_0^pi f(w) cos(h w) dw``.

The spectral integrand is evaluated in factored form. Each unit-circle zero
``w_i`` of the trinomial is divided out, so
``f(w) = b(w) * prod |2 sin((w - w_i)/2)|^(-2 nu k_i)`` with ``b`` smooth and
nonvanishing. Next to a pole the algebraic factor is handed to QUADPACK's
``alg`` weight, and the rest of each segment uses the oscillatory ``cos``
weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import IO, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate, signal

from . import _csvio
from .errors import DomainError, NonCausalWarning, QuadratureError, TruncationWarning
from .humbert import humbert_coefficients
from .model import HarmaModel, ma_coefficients, psi_weights, require_stationary, validate
from .spectral import arma_gain, deflated_trinomial, kernel_zeros

MA_CONVOLUTION = "ma_convolution"
SPECTRAL_QUADRATURE = "spectral_quadrature"
MINIMUM_PHASE = "minimum_phase"


@dataclass(eq=False)
class AcvfTable:
    """Autocovariances at lags ``0..H`` with per-lag error estimates."""

    lags: np.ndarray
    values: np.ndarray
    method: str
    error_estimates: np.ndarray
    truncation_index: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.lags = np.asarray(self.lags, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        self.error_estimates = np.asarray(self.error_estimates, dtype=float)

    def to_csv(self, fh: IO[str], provenance: Sequence[tuple[str, str]] = ()) -> None:
        rows = [(str(int(h)), _csvio.fmt(v), self.method, _csvio.fmt(e))
                for h, v, e in zip(self.lags, self.values, self.error_estimates)]
        _csvio.write(fh, provenance, ("lag", "value", "method", "error_estimate"), rows)

    @classmethod
    def from_csv(cls, fh: IO[str]) -> "AcvfTable":
        _prov, header, rows = _csvio.read(fh)
        if header != ["lag", "value", "method", "error_estimate"]:
            raise ValueError(f"unexpected ACVF header {header}")
        methods = {r[2] for r in rows}
        if len(methods) != 1:
            raise ValueError("mixed methods in one ACVF table")
        return cls([int(r[0]) for r in rows], [float(r[1]) for r in rows],
                   methods.pop(), [float(r[3]) for r in rows])


# ---------------------------------------------------------------------------
# convolution route
# ---------------------------------------------------------------------------

def _lagged_products(c: np.ndarray, H: int) -> np.ndarray:
    N = len(c) - 1
    return np.array([np.dot(c[: N + 1 - h], c[h:]) for h in range(H + 1)])


def _max_unit_multiplicity(model: HarmaModel) -> int:
    return max((k for _, k in kernel_zeros(model)), default=1)


def tail_estimate(c: np.ndarray, M: int, nu: float, multiplicity: int = 1) -> float:
    """Estimate of ``sum_{k > M} c_k^2`` assuming ``|c_k| ~ k^(K nu - 1)``.

    Uses the envelope ``max |c_k|`` over ``k in [M/2, M]`` so that oscillating
    sequences are not underestimated at a node of the oscillation.
    """
    if M < 1:
        return math.inf
    expo = 1.0 - 2.0 * multiplicity * max(nu, 0.0) if nu > 0 else 1.0 - 2.0 * nu
    if expo <= 0:
        return math.inf
    env = float(np.max(np.abs(c[M // 2: M + 1])))
    return env * env * M / expo


def acvf_ma(model: HarmaModel, H: int, N: int) -> AcvfTable:
    """``gamma(h) = sigma2 * sum_{k=0}^{N-h} c_k c_{k+h}`` for ``h = 0..H``.

    The error estimate at lag ``h`` is ``sigma2 * sqrt(T(N-h) T(N))`` with
    ``T`` from :func:`tail_estimate`, which bounds the omitted cross terms by
    Cauchy-Schwarz. If the trinomial has a root inside the unit disk the causal
    coefficients diverge; the estimate is then ``inf`` and a
    :class:`NonCausalWarning` is issued.
    """
    if N < H:
        raise ValueError("need N >= H")
    report = validate(model)
    c = ma_coefficients(model, N).values
    gam = model.sigma2 * _lagged_products(c, H)
    if not report.causal_expansion:
        warnings.warn("causal MA(infinity) coefficients grow geometrically; "
                      "truncated ACVF does not converge as N grows",
                      NonCausalWarning, stacklevel=2)
        err = np.full(H + 1, math.inf)
    else:
        K = _max_unit_multiplicity(model)
        tN = tail_estimate(c, N, model.nu, K)
        err = np.array([model.sigma2 * math.sqrt(tail_estimate(c, N - h, model.nu, K) * tN)
                        for h in range(H + 1)])
        if err[0] > 1e-6 * gam[0]:
            warnings.warn(f"ACVF tail estimate {err[0]:.3g} exceeds 1e-6 * gamma(0)",
                          TruncationWarning, stacklevel=2)
    return AcvfTable(np.arange(H + 1), gam, MA_CONVOLUTION, err, N)


def printed_double_sum(model: HarmaModel, H: int, N: int) -> AcvfTable:
    """``sigma2 * sum_j sum_n psi_j psi_{j+h} Pi_n Pi_{n+h}``, truncated at ``N``.

    This factorizes as the product of the lagged sums of ``psi`` and of the
    Humbert coefficients. It is not the autocovariance of the composite filter
    and is provided only to quantify the difference from :func:`acvf_ma`,
    which is stored in ``metadata["difference_from_ma"]``.
    """
    require_stationary(model)
    psi = psi_weights(model.phi, model.theta, N, check=False).values
    hum = humbert_coefficients(model.family, N)
    vals = model.sigma2 * _lagged_products(psi, H) * _lagged_products(hum, H)
    ref = model.sigma2 * _lagged_products(ma_coefficients(model, N).values, H)
    return AcvfTable(np.arange(H + 1), vals, "printed_double_sum",
                     np.full(H + 1, math.nan), N,
                     {"difference_from_ma": (vals - ref).tolist()})


# ---------------------------------------------------------------------------
# minimum-phase (Wold) coefficients
# ---------------------------------------------------------------------------

def _power_series_power(p: np.ndarray, alpha: float, N: int) -> np.ndarray:
    # Coefficients of p(z)^alpha with p[0] = 1 (J. C. P. Miller's recurrence).
    d = len(p) - 1
    b = np.zeros(N + 1)
    b[0] = 1.0
    for n in range(1, N + 1):
        s = 0.0
        for k in range(1, min(n, d) + 1):
            s += ((alpha + 1.0) * k - n) * p[k] * b[n - k]
        b[n] = s / n
    return b


def minimum_phase_coefficients(model: HarmaModel, N: int) -> np.ndarray:
    """Causal square-summable weights with the same spectral density.

    Each trinomial root ``r`` with ``|r| < 1`` is replaced by ``1/conj(r)``,
    which leaves ``|1 - a z + z^m|`` unchanged on the unit circle up to the
    constant ``prod |r|^-1``. The resulting weights agree with
    :func:`harma.model.ma_coefficients` whenever the trinomial has no root
    inside the unit disk.
    """
    require_stationary(model)
    roots = P.polyroots(model.family.trinomial())
    scale = 1.0
    reflected = []
    for r in roots:
        if abs(r) < 1.0 - 1e-12:
            scale /= abs(r)
            reflected.append(1.0 / np.conj(r))
        else:
            reflected.append(r)
    poly = P.polyfromroots(reflected)
    poly = (poly / poly[0]).real
    frac = scale ** (-model.nu) * _power_series_power(poly, -model.nu, N)
    return signal.lfilter(model.ma_polynomial(), model.ar_polynomial(), frac)


def acvf_minimum_phase(model: HarmaModel, H: int, N: int) -> AcvfTable:
    """Convolution ACVF over :func:`minimum_phase_coefficients`."""
    if N < H:
        raise ValueError("need N >= H")
    c = minimum_phase_coefficients(model, N)
    gam = model.sigma2 * _lagged_products(c, H)
    K = _max_unit_multiplicity(model)
    tN = tail_estimate(c, N, model.nu, K)
    err = np.array([model.sigma2 * math.sqrt(tail_estimate(c, N - h, model.nu, K) * tN)
                    for h in range(H + 1)])
    return AcvfTable(np.arange(H + 1), gam, MINIMUM_PHASE, err, N)


# ---------------------------------------------------------------------------
# spectral route
# ---------------------------------------------------------------------------

class SpectralAcvf(NamedTuple):
    value: float
    error: float
    pieces: int


class _FactoredDensity:
    def __init__(self, model: HarmaModel):
        self.model = model
        self.zeros = kernel_zeros(model)
        self.h = deflated_trinomial(model.family, self.zeros)
        self.const = model.sigma2 / (2.0 * math.pi)
        self.nu = model.nu
        for w, k in self.zeros:
            if -2.0 * self.nu * k <= -1.0:
                raise DomainError(
                    f"spectral density is not integrable at w={w:.6g} "
                    f"(exponent {-2 * self.nu * k:g})")

    def singular_points(self) -> dict[float, float]:
        """Points of [0, pi] with the exponent of ``|w - s|`` there."""
        pts: dict[float, float] = {}
        for w, k in self.zeros:
            if w >= 0.0 and self.nu != 0.0:
                pts[w] = pts.get(w, 0.0) - 2.0 * self.nu * k
        return pts

    def smooth(self, w, skip: float | None = None):
        # f(w) with the factor at `skip` replaced by its ratio to |w - skip|.
        w = np.asarray(w, dtype=float)
        z = np.exp(-1j * w)
        out = self.const * arma_gain(self.model, w)
        if self.nu == 0.0:
            return out
        out = out * np.abs(P.polyval(z, self.h)) ** (-2.0 * self.nu)
        for wi, k in self.zeros:
            d = np.abs(2.0 * np.sin((w - wi) / 2.0))
            if skip is not None and abs(wi - skip) < 1e-14:
                dist = np.abs(w - wi)
                d = np.where(dist > 0, d / np.where(dist > 0, dist, 1.0), 1.0)
            out = out * d ** (-2.0 * self.nu * k)
        return out

    def __call__(self, w):
        return self.smooth(w)


def _quad(f, a, b, h, wvar_alg, epsabs, epsrel, limit):
    kw = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if wvar_alg is not None:
        g = (lambda w: f(w) * math.cos(h * w)) if h else f
        res = integrate.quad(g, a, b, weight="alg", wvar=wvar_alg, **kw)
    elif h:
        res = integrate.quad(f, a, b, weight="cos", wvar=h, **kw)
    else:
        res = integrate.quad(f, a, b, **kw)
    return res[0], res[1], (res[3] if len(res) > 3 else "")


def acvf_spectral(model: HarmaModel, h: int, tol: float = 1e-9,
                  limit: int = 400) -> SpectralAcvf:
    """``gamma(h) = 2 int_0^pi f(w) cos(h w) dw`` by pole-aware quadrature.

    ``[0, pi]`` is split at every kernel zero. A piece of width
    ``min(L/4, pi/(2h))`` next to each singular endpoint is integrated with the
    algebraic weight ``|w - s|^(-2 nu k)`` factored out; the remainder uses
    the ``cos(h w)`` weight. Raises :class:`QuadratureError` when the
    accumulated error estimate exceeds ``100 * tol * max(1, |gamma|)``.
    """
    require_stationary(model)
    if int(h) != h:
        raise ValueError("lag must be an integer")
    h = abs(int(h))
    dens = _FactoredDensity(model)
    sing = dens.singular_points()
    knots = sorted({0.0, math.pi, *sing})
    total, err, pieces = 0.0, 0.0, 0
    for lo, hi in zip(knots[:-1], knots[1:]):
        al = sing.get(lo, 0.0)
        ar = sing.get(hi, 0.0)
        width = hi - lo
        delta = min(width / 4.0, math.pi / (2.0 * h) if h else width / 4.0)
        a, b = lo, hi
        if al:
            v, e, _ = _quad(lambda w, s=lo: dens.smooth(w, skip=s), lo, lo + delta, h,
                            (al, 0.0), tol, tol, limit)
            total, err, pieces, a = total + v, err + e, pieces + 1, lo + delta
        if ar:
            v, e, _ = _quad(lambda w, s=hi: dens.smooth(w, skip=s), hi - delta, hi, h,
                            (0.0, ar), tol, tol, limit)
            total, err, pieces, b = total + v, err + e, pieces + 1, hi - delta
        v, e, _ = _quad(dens, a, b, h, None, tol, tol, limit)
        total, err, pieces = total + v, err + e, pieces + 1
    value, error = 2.0 * total, 2.0 * err
    if not math.isfinite(value) or error > 100.0 * tol * max(1.0, abs(value)):
        raise QuadratureError(
            f"spectral quadrature at lag {h}: error estimate {error:.3g} "
            f"exceeds tolerance {tol:.3g}")
    return SpectralAcvf(value, error, pieces)


def acvf_spectral_table(model: HarmaModel, H: int, tol: float = 1e-9) -> AcvfTable:
    res = [acvf_spectral(model, h, tol) for h in range(H + 1)]
    return AcvfTable(np.arange(H + 1), [r.value for r in res], SPECTRAL_QUADRATURE,
                     [r.error for r in res], None, {"tol": tol})


# ---------------------------------------------------------------------------
# seasonal long memory
# ---------------------------------------------------------------------------

def lrd_asymptote(nu: float, omega0: float, h: int) -> float:
    """``h^(2 nu - 1) cos(h omega0)`` for ``0 < nu < 1/2``, ``0 < omega0 < pi``."""
    if not 0.0 < nu < 0.5:
        raise DomainError("lrd_asymptote needs 0 < nu < 1/2")
    if not 0.0 < omega0 < math.pi:
        raise DomainError("lrd_asymptote needs 0 < omega0 < pi")
    if int(h) != h or h < 1:
        raise DomainError("lag must be a positive integer")
    return float(h) ** (2.0 * nu - 1.0) * math.cos(h * omega0)


def lrd_ratio_probe(model: HarmaModel, omega0: float, lags: Sequence[int],
                    method: str = "spectral", N: int | None = None,
                    tol: float = 1e-9) -> list[tuple[int, float]]:
    """Ratios ``gamma(h) h^(1 - 2 nu) / cos(h omega0)`` over ``lags``.

    Lags with ``|cos(h omega0)| < 0.5`` are rejected. ``method`` selects
    :func:`acvf_spectral` or :func:`acvf_ma` (which then needs ``N``).
    """
    nu = model.nu
    if not 0.0 < nu < 0.5:
        raise DomainError("lrd_ratio_probe needs 0 < nu < 1/2")
    lags = [int(h) for h in lags]
    bad = [h for h in lags if h < 1 or abs(math.cos(h * omega0)) < 0.5]
    if bad:
        raise DomainError(f"lags {bad[:5]} violate |cos(h omega0)| >= 0.5")
    if method == "spectral":
        gam = {h: acvf_spectral(model, h, tol).value for h in lags}
    elif method == "ma":
        if N is None:
            raise ValueError("method='ma' needs N")
        table = acvf_ma(model, max(lags), N)
        gam = {h: table.values[h] for h in lags}
    else:
        raise ValueError(f"unknown method {method!r}")
    return [(h, gam[h] * h ** (1.0 - 2.0 * nu) / math.cos(h * omega0)) for h in lags]


def sample_acvf(x, max_lag: int, demean: bool = True, unbiased: bool = False) -> np.ndarray:
    """Sample autocovariances at lags ``0..max_lag``.

    Divides by ``n`` by default, or by ``n - h`` with ``unbiased``.
    """
    x = np.asarray(x, dtype=float)
    if demean:
        x = x - x.mean()
    n = len(x)
    out = np.array([np.dot(x[: n - h], x[h:]) for h in range(max_lag + 1)])
    return out / (n - np.arange(max_lag + 1) if unbiased else n)
