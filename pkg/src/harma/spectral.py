"""Spectral density, trigonometric kernel, spectral poles and periodogram."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from . import _csvio
from .humbert import PolyFamily
from .model import HarmaModel

TYPE_A = "type_a"
TYPE_B = "type_b"
M2_COSINV = "m2_cosinv"

DEFAULT_POLE_TOL = 1e-8
_CLAMP = 1e-14
_DEDUP = 1e-12

FamilyLike = Union[HarmaModel, PolyFamily]


def _family(obj: FamilyLike) -> PolyFamily:
    return obj.family if isinstance(obj, HarmaModel) else obj


def u_function(obj: FamilyLike, omega):
    """Kernel ``U(w) = |1 - a e^{-iw} + e^{-imw}|^2`` in its cosine form.

    ``U = 2 + a^2 - 2a (cos w + cos((1-m) w)) + 2 cos(m w)``, with ``a = m u``
    for Type 1 and ``a = 2u`` for Type 2. Values within 1e-14 of zero are
    returned as exactly 0. Accepts scalars or arrays.
    """
    fam = _family(obj)
    a = fam.linear_coefficient
    m = fam.m
    w = np.asarray(omega, dtype=float)
    val = 2.0 + a * a - 2.0 * a * (np.cos(w) + np.cos((1 - m) * w)) + 2.0 * np.cos(m * w)
    val = np.where(np.abs(val) < _CLAMP, 0.0, val)
    return float(val) if val.ndim == 0 else val


def arma_gain(model: HarmaModel, omega):
    """``|Theta(e^{-iw})|^2 / |Phi(e^{-iw})|^2``."""
    z = np.exp(-1j * np.asarray(omega, dtype=float))
    num = np.abs(P.polyval(z, model.ma_polynomial())) ** 2
    den = np.abs(P.polyval(z, model.ar_polynomial())) ** 2
    return num / den


def spectral_density(model: HarmaModel, omega):
    """``f(w) = sigma2/(2 pi) * |Theta|^2/|Phi|^2 * U(w)^(-nu)``.

    Where the kernel vanishes the result is ``inf`` for ``nu > 0`` and ``0``
    for ``nu < 0``.
    """
    w = np.asarray(omega, dtype=float)
    U = np.asarray(u_function(model, w))
    nu = model.nu
    with np.errstate(divide="ignore"):
        if nu == 0.0:
            kern = np.ones_like(U)
        else:
            kern = np.where(U > 0, np.power(np.where(U > 0, U, 1.0), -nu),
                            np.inf if nu > 0 else 0.0)
    out = model.sigma2 / (2.0 * math.pi) * arma_gain(model, w) * kern
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# spectral poles
# ---------------------------------------------------------------------------

def _candidates(fam: PolyFamily, include_pi: bool) -> list[tuple[float, str]]:
    m = fam.m
    a = fam.linear_coefficient
    inside = (lambda w: -math.pi < w <= math.pi) if include_pi else (
        lambda w: -math.pi < w < math.pi)
    out = []
    # m = 2: 2 cos w = a
    if m == 2:
        c = a / 2.0
        if abs(c) <= 1.0:
            w = math.acos(c)
            out.extend([(w, M2_COSINV), (-w, M2_COSINV)])
    # a = 0: z^m = -1, w = (4n +- 1) pi / m, i.e. every odd multiple of pi/m.
    # Listed for any a since verification by U < tol also catches a near 0.
    for k in range(-m, m + 1):
        w = (2 * k + 1) * math.pi / m
        if inside(w):
            out.append((w, TYPE_A))
    # m != 2: z^(m-2) = 1 and a = 2 cos w, w = 2 n pi / (m - 2)
    if m != 2:
        d = abs(m - 2)
        for n in range(-d, d + 1):
            w = 2 * n * math.pi / d
            if inside(w):
                out.append((w, TYPE_B))
    return out


def _verified_zeros(fam: PolyFamily, tol: float, include_pi: bool) -> list[tuple[float, str]]:
    found: list[tuple[float, str]] = []
    for w, tag in _candidates(fam, include_pi):
        if u_function(fam, w) < tol and all(abs(w - v) > _DEDUP for v, _ in found):
            found.append((w, tag))
    return sorted(found)


def singular_frequencies(model: FamilyLike, tol: float = DEFAULT_POLE_TOL
                         ) -> list[tuple[float, str]]:
    """Frequencies in ``(-pi, pi)`` where the kernel ``U`` vanishes.

    Candidates come from the closed-form pole families (``type_a``: u = 0,
    odd multiples of pi/m; ``type_b``: multiples of 2 pi/(m-2) with matching
    u; ``m2_cosinv``: ``+-arccos(u)`` for m = 2). A candidate is returned only
    if ``U(candidate) < tol``. Together these families contain every unit-circle
    zero of ``1 - a z + z^m``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _verified_zeros(_family(model), tol, include_pi=False)


def kernel_zeros(model: FamilyLike, tol: float = DEFAULT_POLE_TOL
                 ) -> list[tuple[float, int]]:
    """Zeros of ``U`` on ``(-pi, pi]`` with the multiplicity of the trinomial root."""
    fam = _family(model)
    out = []
    for w, _ in _verified_zeros(fam, tol, include_pi=True):
        z = complex(math.cos(w), -math.sin(w))
        deriv = -fam.linear_coefficient + fam.m * z ** (fam.m - 1)
        out.append((w, 2 if abs(deriv) < 1e-6 else 1))
    return out


def deflated_trinomial(fam: PolyFamily, zeros: Sequence[tuple[float, int]]) -> np.ndarray:
    """Ascending complex coefficients of ``h`` with ``g(z) = h(z) prod (z - z_i)``.

    ``g = 1 - a z + z^m`` and ``z_i = e^{-i w_i}`` runs over ``zeros`` with
    multiplicity, so ``U(w) = |h(e^{-iw})|^2 prod |2 sin((w - w_i)/2)|^2``.
    """
    h = fam.trinomial().astype(complex)
    for w, mult in zeros:
        z0 = complex(math.cos(w), -math.sin(w))
        for _ in range(mult):
            h, _rem = P.polydiv(h, np.array([-z0, 1.0]))
    return np.atleast_1d(h)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SpectrumGrid:
    """Frequencies paired with spectral values and pole annotations."""

    omegas: np.ndarray
    values: np.ndarray
    singular_omegas: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.omegas.shape != self.values.shape:
            raise ValueError("omegas and values differ in shape")

    @property
    def is_singular(self) -> np.ndarray:
        return np.isposinf(self.values)

    def to_csv(self, fh: IO[str], provenance: Sequence[tuple[str, str]] = ()) -> None:
        rows = [(_csvio.fmt(w), _csvio.fmt(v), "true" if s else "false")
                for w, v, s in zip(self.omegas, self.values, self.is_singular)]
        _csvio.write(fh, provenance, ("omega", "value", "is_singular"), rows)

    @classmethod
    def from_csv(cls, fh: IO[str]) -> "SpectrumGrid":
        _prov, header, rows = _csvio.read(fh)
        if header != ["omega", "value", "is_singular"]:
            raise ValueError(f"unexpected spectrum header {header}")
        om = np.array([float(r[0]) for r in rows])
        vals = np.array([float(r[1]) for r in rows])
        sing = [(w, "") for w, r in zip(om, rows) if r[2] == "true"]
        return cls(om, vals, sing)


def spectrum_grid(model: HarmaModel, n_points: int,
                  tol: float = DEFAULT_POLE_TOL) -> SpectrumGrid:
    """Spectral density on ``n_points`` uniform nodes of ``(-pi, pi)``.

    Nodes are ``-pi + 2 pi k / (n_points + 1)``, ``k = 1..n_points``. The
    verified singular frequencies are merged into the grid (a node closer
    than 1e-12 is replaced), so poles always appear as ``inf`` entries when
    ``nu > 0``.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    nodes = -math.pi + 2.0 * math.pi * np.arange(1, n_points + 1) / (n_points + 1)
    poles = singular_frequencies(model, tol)
    if poles:
        pw = np.array([w for w, _ in poles])
        keep = np.all(np.abs(nodes[:, None] - pw[None, :]) > _DEDUP, axis=1)
        nodes = np.sort(np.concatenate([nodes[keep], pw]))
    vals = np.asarray(spectral_density(model, nodes), dtype=float)
    if poles:
        at_pole = np.isin(nodes, [w for w, _ in poles])
        if model.nu > 0:
            vals[at_pole] = np.inf
        elif model.nu < 0:
            vals[at_pole] = 0.0
    return SpectrumGrid(nodes, vals, poles)


def periodogram(series, method: str = "fft") -> SpectrumGrid:
    """Raw periodogram ``|sum_t x_t e^{-i w t}|^2 / (2 pi n)`` after mean removal.

    Evaluated at the Fourier frequencies ``2 pi k / n``, ``k = 1..(n-1)//2``.
    ``method="direct"`` evaluates the DFT sum explicitly.
    """
    x = np.asarray(getattr(series, "values", series), dtype=float)
    n = len(x)
    if n < 2:
        raise ValueError("periodogram needs at least 2 observations")
    x = x - x.mean()
    K = (n - 1) // 2
    k = np.arange(1, K + 1)
    omegas = 2.0 * math.pi * k / n
    if method == "fft":
        dft = np.fft.fft(x)[1: K + 1]
    elif method == "direct":
        t = np.arange(1, n + 1)
        dft = np.empty(K, dtype=complex)
        step = max(1, 2**22 // max(n, 1))
        for s in range(0, K, step):
            w = omegas[s: s + step]
            dft[s: s + step] = np.exp(-1j * np.outer(w, t)) @ x
    else:
        raise ValueError(f"unknown periodogram method {method!r}")
    return SpectrumGrid(omegas, np.abs(dft) ** 2 / (2.0 * math.pi * n), [])
