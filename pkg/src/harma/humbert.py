"""Coefficients of the Humbert generating functions.

Type 1 polynomials are the power-series coefficients of
``(1 - m*u*t + t**m) ** -nu`` and Type 2 those of ``(1 - 2*u*t + t**m) ** -nu``.
Both share the form ``(1 - a*t + t**m) ** -nu`` with ``a = m*u`` or ``a = 2*u``,
and every route in this module works on that common form.

Three independent routes are provided:

* :func:`coeff_explicit_type2` / :func:`coeff_explicit_type1`, the finite
  alternating sum over ``k <= n // m``;
* :func:`coeff_series_oracle`, a direct expansion of the binomial series
  ``sum_n (nu)_n / n! * (a*t - t**m) ** n`` by repeated polynomial
  multiplication;
* :func:`coeff_recurrence`, the forward recurrence in ``n``.

The explicit sum and the oracle are evaluated in exact rational arithmetic
(the float inputs are converted to their exact binary values), so they are
free of both factorial overflow and cancellation; only the final value is
rounded. The explicit sum also has a pure floating-point path that works in
log-magnitude/sign form and warns when cancellation becomes severe.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import PrecisionWarning, RecurrenceMismatchError, UnknownFamilyError

TYPE1 = "type1"
TYPE2 = "type2"
VARIANTS = (TYPE1, TYPE2)

# Relative tolerance (with an absolute floor near zero) used when the
# recurrence sign is matched against the oracle.
_SIGN_CHECK_RTOL = 1e-8
_SIGN_CHECK_ATOL = 1e-12
_SIGN_CHECK_ORDER = 20
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def _check_variant(variant: str) -> str:
    v = str(variant).lower().replace(" ", "")
    aliases = {"1": TYPE1, "type1": TYPE1, "type_1": TYPE1,
               "2": TYPE2, "type2": TYPE2, "type_2": TYPE2}
    if v not in aliases:
        raise ValueError(f"unknown variant {variant!r}; expected 'type1' or 'type2'")
    return aliases[v]


def _check_m(m: int) -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class PolyFamily:
    """A Humbert polynomial family ``(variant, m, nu, u)``.

    No range restriction is placed on ``nu`` and ``u`` here; the generating
    function is a valid power series for any real parameters. Process-level
    admissibility is checked by :func:`harma.model.validate`.
    """

    variant: str
    m: int
    nu: float
    u: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", _check_variant(self.variant))
        object.__setattr__(self, "m", _check_m(self.m))
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "u", float(self.u))

    @property
    def linear_coefficient(self) -> float:
        """The ``a`` in ``1 - a*t + t**m``."""
        return linear_coefficient(self.variant, self.m, self.u)

    @property
    def u_max(self) -> float:
        """Upper end of the process-level range for ``u``."""
        return 2.0 / self.m if self.variant == TYPE1 else 1.0

    def trinomial(self) -> np.ndarray:
        """Ascending coefficients of ``1 - a*z + z**m``."""
        c = np.zeros(self.m + 1)
        c[0] = 1.0
        c[1] -= self.linear_coefficient
        c[self.m] += 1.0
        return c


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """Prefix ``values[0..N]`` of an infinite coefficient sequence."""

    values: np.ndarray
    family: Any
    truncation_index: int
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) != self.truncation_index + 1:
            raise ValueError("CoeffSeries length must equal truncation_index + 1")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]


def linear_coefficient(variant: str, m: int, u: float) -> float:
    variant = _check_variant(variant)
    return m * u if variant == TYPE1 else 2.0 * u


def _exact_linear_coefficient(variant: str, m: int, u: float) -> Fraction:
    uf = Fraction(u)
    return m * uf if _check_variant(variant) == TYPE1 else 2 * uf


def pochhammer(nu: float, n: int) -> float:
    """Rising factorial ``(nu)_n = nu (nu+1) ... (nu+n-1)``, with ``(nu)_0 = 1``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0
    for i in range(n):
        out *= nu + i
    return out


# ---------------------------------------------------------------------------
# explicit finite sum
# ---------------------------------------------------------------------------

def _as_ratio(x: Fraction | float) -> tuple[int, int]:
    f = Fraction(x)
    return f.numerator, f.denominator


def _rising_numerators(V: int, E: int, n: int) -> list[int]:
    """``P_j = prod_{i<j} (V + i E)``, so that ``(V/E)_j = P_j / E**j``."""
    table = [1]
    for i in range(n):
        table.append(table[-1] * (V + i * E))
    return table


def _explicit_exact(m: int, nu: Fraction, a: Fraction, n: int,
                    rising: list[int] | None = None) -> Fraction:
    # Every term shares the denominator E^n D^n n!, so the sum is formed in
    # integers and reduced once.
    V, E = _as_ratio(nu)
    A, D = _as_ratio(a)
    if rising is None:
        rising = _rising_numerators(V, E, n)
    fn = math.factorial(n)
    num = 0
    for k in range(n // m + 1):
        e = n - m * k
        j = n - (m - 1) * k
        term = (rising[j] * E ** (n - j) * A ** e * D ** (n - e)
                * (fn // (math.factorial(k) * math.factorial(e))))
        num += -term if k % 2 else term
    return Fraction(num, E ** n * D ** n * fn)


def _explicit_float(m: int, nu: float, a: float, n: int,
                    cancellation_threshold: float) -> float:
    # log|(nu)_j| and sign for j = 0..n
    logp = [0.0]
    sgnp = [1.0]
    for i in range(n):
        f = nu + i
        if f == 0.0:
            logp.append(-math.inf)
            sgnp.append(0.0)
        else:
            logp.append(logp[-1] + math.log(abs(f)))
            sgnp.append(sgnp[-1] * math.copysign(1.0, f))
    log_a = math.log(abs(a)) if a != 0.0 else -math.inf
    sgn_a = math.copysign(1.0, a)

    logs, signs = [], []
    for k in range(n // m + 1):
        e = n - m * k
        j = n - (m - 1) * k
        if sgnp[j] == 0.0 or (a == 0.0 and e > 0):
            continue
        lt = logp[j] - math.lgamma(k + 1) - math.lgamma(e + 1)
        if e:
            lt += e * log_a
        s = sgnp[j] * (-1.0 if k % 2 else 1.0) * (sgn_a ** e)
        logs.append(lt)
        signs.append(s)
    if not logs:
        return 0.0
    top = max(logs)
    scaled = [s * math.exp(lt - top) for s, lt in zip(signs, logs)]
    total = math.fsum(scaled)
    magnitude = math.fsum(abs(x) for x in scaled)
    if total == 0.0 or magnitude / abs(total) > cancellation_threshold:
        warnings.warn(
            f"explicit sum at n={n}: cancellation ratio "
            f"{magnitude / abs(total) if total else math.inf:.3g} exceeds "
            f"{cancellation_threshold:.3g}; result may be inaccurate",
            PrecisionWarning, stacklevel=3)
    if total == 0.0:
        return 0.0
    log_mag = top + math.log(abs(total))
    if log_mag > _LOG_FLOAT_MAX:
        warnings.warn(f"explicit sum at n={n} overflows float range",
                      PrecisionWarning, stacklevel=3)
        return math.copysign(math.inf, total)
    return math.copysign(math.exp(log_mag), total)


def coeff_explicit_type2(m: int, nu: float, u: float, n: int, *,
                         exact: bool = True,
                         cancellation_threshold: float = 1e8) -> float:
    """Type 2 Humbert coefficient ``Q_{n,m}^nu(u)`` from the explicit sum.

    ``Q = sum_{k=0}^{n//m} (-1)^k (nu)_{n-(m-1)k} / (k! (n-mk)!) (2u)^{n-mk}``.

    Args:
        m: Order of the trinomial, ``m >= 1``.
        nu: Exponent.
        u: Polynomial argument.
        n: Coefficient index, ``n >= 0``.
        exact: Accumulate in exact rational arithmetic (default). With
            ``exact=False`` the terms are formed from log-magnitudes and signs,
            summed with :func:`math.fsum`, and a :class:`PrecisionWarning` is
            issued when ``sum|term| / |sum|`` exceeds ``cancellation_threshold``.
        cancellation_threshold: Warning threshold for the float path.
    """
    m = _check_m(m)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if exact:
        return float(_explicit_exact(m, Fraction(nu), 2 * Fraction(u), n))
    return _explicit_float(m, float(nu), 2.0 * u, n, cancellation_threshold)


def coeff_explicit_type1(m: int, nu: float, u: float, n: int, *,
                         exact: bool = True,
                         cancellation_threshold: float = 1e8) -> float:
    """Type 1 Humbert coefficient ``Pi_{n,m}^nu(u) = Q_{n,m}^nu(m*u/2)``.

    The substitution is carried out exactly, so the result is the exact
    coefficient of ``(1 - m*u*t + t**m) ** -nu`` rounded once.
    """
    m = _check_m(m)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if exact:
        return float(_explicit_exact(m, Fraction(nu), m * Fraction(u), n))
    return _explicit_float(m, float(nu), m * u, n, cancellation_threshold)


def coeff_explicit(variant: str, m: int, nu: float, u: float, n: int, **kw) -> float:
    if _check_variant(variant) == TYPE1:
        return coeff_explicit_type1(m, nu, u, n, **kw)
    return coeff_explicit_type2(m, nu, u, n, **kw)


def explicit_series(variant: str, m: int, nu: float, u: float, N: int) -> CoeffSeries:
    """Explicit-sum coefficients ``0..N`` sharing one exact Pochhammer table."""
    m = _check_m(m)
    variant = _check_variant(variant)
    nuf = Fraction(nu)
    a = _exact_linear_coefficient(variant, m, u)
    rising = _rising_numerators(*_as_ratio(nuf), N)
    vals = [float(_explicit_exact(m, nuf, a, n, rising)) for n in range(N + 1)]
    return CoeffSeries(np.array(vals), PolyFamily(variant, m, nu, u), N, "explicit")


# ---------------------------------------------------------------------------
# binomial-series oracle
# ---------------------------------------------------------------------------

def coeff_series_oracle(variant: str, m: int, nu: float, u: float, N: int) -> CoeffSeries:
    """Independent oracle: expand ``sum_n (nu)_n/n! (a t - t^m)^n`` to order ``N``.

    Powers of the inner binomial are built by repeated truncated polynomial
    multiplication in exact rationals. ``(a t - t^m)^n`` has lowest degree
    ``n``, so only ``n <= N`` contribute.
    """
    m = _check_m(m)
    variant = _check_variant(variant)
    if N < 0:
        raise ValueError("N must be nonnegative")
    # With a = A/D and nu = V/E, (a t - t^m)^n = D^-n (A t - D t^m)^n and
    # (nu)_n / n! = prod(V + iE) / (E^n n!). All terms are put over the common
    # denominator E^N D^N N! and accumulated as integers.
    A, D = _as_ratio(_exact_linear_coefficient(variant, m, u))
    V, E = _as_ratio(Fraction(nu))
    inner = {1: A}
    inner[m] = inner.get(m, 0) - D   # m == 1 collapses to (A - D) t

    acc = [0] * (N + 1)
    power = [0] * (N + 1)
    power[0] = 1
    rising = 1
    fN = math.factorial(N)
    acc[0] = E ** N * D ** N * fN
    for n in range(1, N + 1):
        nxt = [0] * (N + 1)
        for i in range(n - 1, N + 1):
            pi = power[i]
            if pi:
                for d, cd in inner.items():
                    if i + d <= N:
                        nxt[i + d] += pi * cd
        power = nxt
        rising *= V + (n - 1) * E
        if rising:
            scale = rising * (E * D) ** (N - n) * (fN // math.factorial(n))
            for j in range(n, N + 1):
                if power[j]:
                    acc[j] += scale * power[j]
    denom = E ** N * D ** N * fN
    out = [Fraction(x, denom) for x in acc]
    return CoeffSeries(np.array([float(x) for x in out]),
                       PolyFamily(variant, m, nu, u), N, "series_oracle")


# ---------------------------------------------------------------------------
# recurrence
# ---------------------------------------------------------------------------

def _run_recurrence(m: int, nu: float, a: float, seeds: list[float], N: int,
                    sign: int) -> list[float]:
    # (n+1) c_{n+1} = a (n+nu) c_n - sign * (n + m nu - m + 1) c_{n-m+1}
    c = list(seeds[: N + 1])
    for n in range(len(c) - 1, N):
        prev = c[n - m + 1] if n - m + 1 >= 0 else 0.0
        # integer part first so that m * nu survives when n = m - 1
        c.append((a * (n + nu) * c[n] - sign * ((n - m + 1) + m * nu) * prev) / (n + 1))
    return c


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= max(_SIGN_CHECK_ATOL, _SIGN_CHECK_RTOL * max(abs(x), abs(y)))


@functools.lru_cache(maxsize=256)
def _select_sign(variant: str, m: int, nu: float, u: float) -> int:
    order = _SIGN_CHECK_ORDER
    oracle = coeff_series_oracle(variant, m, nu, u, order).values
    a = linear_coefficient(variant, m, u)
    seeds = [coeff_explicit(variant, m, nu, u, n) for n in range(min(m, order + 1))]
    # +1 is the sign obtained by differentiating the generating function;
    # the alternative is tried only if it fails.
    for sign in (+1, -1):
        trial = _run_recurrence(m, nu, a, seeds, order, sign)
        if all(_close(x, y) for x, y in zip(trial, oracle)):
            return sign
    raise RecurrenceMismatchError(
        f"no third-term sign reproduces the series oracle for "
        f"({variant}, m={m}, nu={nu}, u={u})")


def coeff_recurrence(variant: str, m: int, nu: float, u: float, N: int) -> CoeffSeries:
    """Humbert coefficients ``0..N`` by forward recurrence in floating point.

    The recurrence reads
    ``(n+1) c_{n+1} - a (n+nu) c_n  +/-  (n + m nu - m + 1) c_{n-m+1} = 0``
    and is seeded with ``c_0..c_{m-1}`` from the explicit sum. The sign of the
    last term is chosen by matching the series oracle up to order 20; the
    chosen sign is stored in ``metadata["third_term_sign"]``.
    """
    m = _check_m(m)
    variant = _check_variant(variant)
    if N < 0:
        raise ValueError("N must be nonnegative")
    sign = _select_sign(variant, m, float(nu), float(u))
    a = linear_coefficient(variant, m, u)
    seeds = [coeff_explicit(variant, m, nu, u, n) for n in range(min(m, N + 1))]
    vals = _run_recurrence(m, float(nu), a, seeds, N, sign)
    return CoeffSeries(np.array(vals), PolyFamily(variant, m, nu, u), N, "recurrence",
                       {"third_term_sign": "+" if sign > 0 else "-"})


def humbert_coefficients(family: PolyFamily, N: int) -> np.ndarray:
    """Fast float coefficients ``0..N`` of ``family`` (recurrence route)."""
    return coeff_recurrence(family.variant, family.m, family.nu, family.u, N).values


# ---------------------------------------------------------------------------
# named specializations
# ---------------------------------------------------------------------------

SPECIALIZATIONS = {
    "gegenbauer": (TYPE2, 2),
    "pincherle": (TYPE1, 3),
    "horadam": (TYPE2, 1),
    "horadam_pethe": (TYPE2, 3),
}


def specialization(name: str, nu: float, u: float) -> PolyFamily:
    """Named Humbert family: gegenbauer, pincherle, horadam or horadam_pethe."""
    key = str(name).lower().replace("-", "_")
    if key not in SPECIALIZATIONS:
        raise UnknownFamilyError(
            f"unknown family {name!r}; expected one of {sorted(SPECIALIZATIONS)}")
    variant, m = SPECIALIZATIONS[key]
    return PolyFamily(variant, m, nu, u)
