"""HARMA(p, nu, u, q) model definition, validation and linearization.

The process is ``Phi(B) (1 - a B + B^m)^nu X_t = Theta(B) eps_t`` with
``Phi(z) = 1 - sum phi_j z^j``, ``Theta(z) = 1 + sum theta_j z^j`` and
Gaussian innovations of variance ``sigma2``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import signal

from .errors import DegeneratePolynomialError, DomainError, ValidationError
from .humbert import CoeffSeries, PolyFamily, humbert_coefficients, specialization

ROOT_TOL = 1e-10
NEAR_BOUNDARY = 1e-6
NU_NEAR_HALF = 1e-3


@dataclass(frozen=True)
class HarmaModel:
    """Immutable parameterization of a Type 1 or Type 2 HARMA process."""

    family: PolyFamily
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "theta", tuple(float(x) for x in self.theta))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not all(math.isfinite(x) for x in self.phi + self.theta):
            raise ValueError("AR/MA coefficients must be finite")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @classmethod
    def build(cls, variant: str, m: int, nu: float, u: float,
              phi: Sequence[float] = (), theta: Sequence[float] = (),
              sigma2: float = 1.0) -> "HarmaModel":
        return cls(PolyFamily(variant, m, nu, u), tuple(phi), tuple(theta), sigma2)

    @classmethod
    def named(cls, name: str, nu: float, u: float, phi: Sequence[float] = (),
              theta: Sequence[float] = (), sigma2: float = 1.0) -> "HarmaModel":
        """Model over a named family, e.g. ``HarmaModel.named("pincherle", 0.3, 0.1)``."""
        return cls(specialization(name, nu, u), tuple(phi), tuple(theta), sigma2)

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)

    @property
    def nu(self) -> float:
        return self.family.nu

    @property
    def u(self) -> float:
        return self.family.u

    @property
    def m(self) -> int:
        return self.family.m

    @property
    def variant(self) -> str:
        return self.family.variant

    def ar_polynomial(self) -> np.ndarray:
        """Ascending coefficients of ``Phi(z)``."""
        return np.concatenate([[1.0], -np.asarray(self.phi, dtype=float)])

    def ma_polynomial(self) -> np.ndarray:
        """Ascending coefficients of ``Theta(z)``."""
        return np.concatenate([[1.0], np.asarray(self.theta, dtype=float)])

    def to_document(self) -> dict:
        """Flat key-value document: variant, m, nu, u, phi, theta, sigma2."""
        return {
            "variant": self.variant,
            "m": self.m,
            "nu": self.nu,
            "u": self.u,
            "phi": list(self.phi),
            "theta": list(self.theta),
            "sigma2": self.sigma2,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "HarmaModel":
        missing = {"variant", "m", "nu", "u"} - set(doc)
        if missing:
            raise KeyError(f"model document lacks {sorted(missing)}")
        return cls.build(doc["variant"], int(doc["m"]), float(doc["nu"]), float(doc["u"]),
                         doc.get("phi", ()), doc.get("theta", ()),
                         float(doc.get("sigma2", 1.0)))

    def document_hash(self) -> str:
        blob = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of :func:`validate`.

    ``stationary`` and ``invertible`` follow the parameter-range theorem: AR
    (resp. MA) roots outside the unit circle, ``|nu| < 1/2`` and ``u`` in its
    closed range. ``causal_expansion`` is reported separately. It is False
    when the trinomial ``1 - a z + z^m`` has a root strictly inside the unit
    disk, in which case its power-series coefficients grow geometrically and
    the causal MA(infinity) sum diverges even though the spectral density is
    integrable. For ``m >= 3`` this happens for every ``u > 0`` because the
    root moduli multiply to one.
    """

    ar_root_moduli: tuple[float, ...]
    ma_root_moduli: tuple[float, ...]
    trinomial_root_moduli: tuple[float, ...]
    nu_ok: bool
    u_ok: bool
    stationary: bool
    invertible: bool
    causal_expansion: bool
    boundary_flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "ar_root_moduli": list(self.ar_root_moduli),
            "ma_root_moduli": list(self.ma_root_moduli),
            "trinomial_root_moduli": list(self.trinomial_root_moduli),
            "nu_ok": self.nu_ok,
            "u_ok": self.u_ok,
            "stationary": self.stationary,
            "invertible": self.invertible,
            "causal_expansion": self.causal_expansion,
            "boundary_flags": list(self.boundary_flags),
        }


def _root_moduli(coeffs: np.ndarray, label: str, order: int) -> tuple[float, ...]:
    if order == 0:
        return ()
    if coeffs[-1] == 0.0:
        raise DegeneratePolynomialError(
            f"{label} coefficient {order} is zero; polynomial degree is below {order}")
    # polyroots diagonalizes the companion matrix
    return tuple(sorted(float(abs(r)) for r in P.polyroots(coeffs)))


def validate(model: HarmaModel) -> StationarityReport:
    """Check parameter ranges and AR/MA roots of ``model``."""
    ar = _root_moduli(model.ar_polynomial(), "AR", model.p)
    ma = _root_moduli(model.ma_polynomial(), "MA", model.q)
    tri = tuple(sorted(float(abs(r)) for r in P.polyroots(model.family.trinomial())))

    fam = model.family
    flags = []
    nu_ok = abs(fam.nu) < 0.5
    u_ok = 0.0 <= fam.u <= fam.u_max
    if not nu_ok:
        flags.append(f"|nu| = {abs(fam.nu):g} is not below 1/2")
    elif 0.5 - abs(fam.nu) < NU_NEAR_HALF:
        flags.append("|nu| is within 1e-3 of 1/2")
    if not u_ok:
        flags.append(f"u = {fam.u:g} outside [0, {fam.u_max:g}]")
    elif fam.u == 0.0:
        flags.append("u at lower boundary 0")
    elif fam.u == fam.u_max:
        flags.append(f"u at upper boundary {fam.u_max:g}")

    ar_ok = all(r > 1.0 + ROOT_TOL for r in ar)
    ma_ok = all(r > 1.0 + ROOT_TOL for r in ma)
    for name, mods in (("AR", ar), ("MA", ma)):
        if any(1.0 + ROOT_TOL < r <= 1.0 + NEAR_BOUNDARY for r in mods):
            flags.append(f"{name} root modulus within 1e-6 of the unit circle")

    causal = bool(min(tri, default=np.inf) >= 1.0 - 1e-9)
    if not causal:
        flags.append(
            f"trinomial root inside unit disk (min modulus {min(tri):.6g}); causal "
            "coefficients grow geometrically")
    if any(abs(r - 1.0) <= 1e-9 for r in tri):
        flags.append("trinomial has unit-modulus roots: spectral poles present")

    return StationarityReport(ar, ma, tri, nu_ok, u_ok,
                              stationary=ar_ok and nu_ok and u_ok,
                              invertible=ma_ok and nu_ok and u_ok,
                              causal_expansion=causal,
                              boundary_flags=tuple(flags))


def require_stationary(model: HarmaModel, invertible: bool = False) -> StationarityReport:
    report = validate(model)
    if not report.stationary or (invertible and not report.invertible):
        what = "stationary and invertible" if invertible else "stationary"
        raise ValidationError(f"model is not {what}: " + "; ".join(report.boundary_flags
                                                                  or _reasons(report)))
    return report


def _reasons(report: StationarityReport) -> list[str]:
    out = []
    if report.ar_root_moduli and min(report.ar_root_moduli) <= 1.0 + ROOT_TOL:
        out.append("AR root on or inside the unit circle")
    if report.ma_root_moduli and min(report.ma_root_moduli) <= 1.0 + ROOT_TOL:
        out.append("MA root on or inside the unit circle")
    return out or ["parameter range violated"]


def psi_weights(phi: Sequence[float], theta: Sequence[float], N: int,
                check: bool = True) -> CoeffSeries:
    """Weights of ``Theta(z) / Phi(z) = sum psi_j z^j`` for ``j = 0..N``.

    ``psi_j = theta_j [j <= q] + sum_{i=1}^{min(j,p)} phi_i psi_{j-i}``.
    With ``check`` the AR polynomial must have all roots outside the unit circle.
    """
    phi = [float(x) for x in phi]
    theta = [float(x) for x in theta]
    if check and phi:
        mods = _root_moduli(np.concatenate([[1.0], -np.asarray(phi)]), "AR", len(phi))
        if min(mods) <= 1.0 + ROOT_TOL:
            raise ValidationError("AR polynomial has a root on or inside the unit circle")
    psi = [1.0]
    for j in range(1, N + 1):
        v = theta[j - 1] if j <= len(theta) else 0.0
        for i in range(1, min(j, len(phi)) + 1):
            v += phi[i - 1] * psi[j - i]
        psi.append(v)
    return CoeffSeries(np.array(psi), "psi", N, "recurrence")


def ma_coefficients(model: HarmaModel, N: int) -> CoeffSeries:
    """Causal MA(infinity) weights ``c_0..c_N`` of ``Theta/Phi * (1 - aB + B^m)^-nu``."""
    require_stationary(model)
    hum = humbert_coefficients(model.family, N)
    c = signal.lfilter(model.ma_polynomial(), model.ar_polynomial(), hum)
    return CoeffSeries(c, model.family, N, "convolution")


class VarianceSeries(NamedTuple):
    value: float
    last_term: float


def variance_series(model: HarmaModel, N: int) -> VarianceSeries:
    """Partial sum of ``sigma2 * sum ((nu)_n/n!)^2 (a - 1)^(2n)`` to ``n = N``.

    This is the closed series obtained by collapsing the double sum in the
    stationarity argument. It does not equal ``sigma2 * sum c_k^2`` in
    general and is kept as a diagnostic only; use
    :func:`harma.covariance.acvf_ma` for the variance.
    """
    if model.p or model.q:
        raise DomainError("variance_series is defined for p = q = 0 only")
    base = (model.family.linear_coefficient - 1.0) ** 2
    terms = []
    w = 1.0
    for n in range(N + 1):
        if n:
            w *= (model.nu + n - 1) / n
        terms.append(w * w * base ** n)
    return VarianceSeries(model.sigma2 * math.fsum(terms), model.sigma2 * terms[-1])


def suggest_truncation(nu: float, target: float = 1e-6, n_max: int = 10**7) -> int:
    """Smallest ``n`` with ``n^(2nu-2) / Gamma(nu)^2`` below ``target``."""
    if nu == 0.0:
        return 0
    if not nu < 1.0:
        raise DomainError("suggest_truncation needs nu < 1")
    g2 = math.gamma(nu) ** 2
    n = math.ceil((target * g2) ** (1.0 / (2.0 * nu - 2.0)))
    return int(min(max(n, 1), n_max))


def ar_decay_length(model: HarmaModel) -> int:
    """``ceil(1 / min log|root|)`` over AR roots, or 0 without AR part."""
    if not model.p:
        return 0
    mods = _root_moduli(model.ar_polynomial(), "AR", model.p)
    if min(mods) <= 1.0:
        raise ValidationError("AR polynomial is not stationary")
    return int(math.ceil(1.0 / math.log(min(mods))))
