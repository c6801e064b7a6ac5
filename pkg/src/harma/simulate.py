"""Seeded sample paths by truncated fractional filtering and ARMA recursion."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from scipy import signal

from . import _csvio
from .covariance import minimum_phase_coefficients
from .errors import BurnInWarning, NonCausalWarning, ValidationError
from .humbert import PolyFamily, humbert_coefficients
from .model import HarmaModel, ar_decay_length, validate

GENERATOR_ID = "numpy-pcg64-ziggurat-v1"
HUMBERT = "humbert"
MINIMUM_PHASE = "minimum_phase"


def gaussian_noise(seed: int, n: int, sigma2: float = 1.0) -> np.ndarray:
    """``n`` i.i.d. ``N(0, sigma2)`` draws from PCG64 with numpy's ziggurat."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    gen = np.random.Generator(np.random.PCG64(int(seed)))
    return math.sqrt(sigma2) * gen.standard_normal(int(n))


def fractional_filter(family: PolyFamily, eps, N: int,
                      coefficients: np.ndarray | None = None) -> np.ndarray:
    """``Z_t = sum_{k=0}^{N} Pi_k eps_{t-k}``, with ``eps_t = 0`` for ``t < 0``.

    ``coefficients`` overrides the Humbert weights ``Pi_0..Pi_N``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    eps = np.asarray(eps, dtype=float)
    if eps.size < 1:
        raise ValueError("eps must be non-empty")
    pi = humbert_coefficients(family, N) if coefficients is None else np.asarray(coefficients)
    return np.convolve(eps, pi[: N + 1])[: eps.size]


def default_truncation(nu: float) -> int:
    return 1000 if nu > 0 else 50


def minimum_burn_in(model: HarmaModel, N: int) -> int:
    """``N + 10 * ar_decay_length(model)``."""
    return N + 10 * ar_decay_length(model)


def _filter_weights(model: HarmaModel, N: int, filter: str) -> np.ndarray:
    if filter == HUMBERT:
        return humbert_coefficients(model.family, N)
    if filter == MINIMUM_PHASE:
        bare = HarmaModel(model.family, (), (), model.sigma2)
        return minimum_phase_coefficients(bare, N)
    raise ValueError(f"unknown filter {filter!r}")


def _arma(model: HarmaModel, z: np.ndarray) -> np.ndarray:
    if not (model.p or model.q):
        return z
    return signal.lfilter(model.ma_polynomial(), model.ar_polynomial(), z)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A simulated path with everything needed to replay it."""

    values: np.ndarray
    seed: int
    model: HarmaModel
    truncation_index: int
    burn_in: int
    generator_id: str = GENERATOR_ID
    filter: str = HUMBERT

    def __len__(self) -> int:
        return len(self.values)

    def provenance(self) -> list[tuple[str, str]]:
        return [
            ("seed", str(self.seed)),
            ("N", str(self.truncation_index)),
            ("burn_in", str(self.burn_in)),
            ("generator_id", self.generator_id),
            ("filter", self.filter),
            ("model_hash", self.model.document_hash()),
            ("model", json.dumps(self.model.to_document(), sort_keys=True)),
        ]

    def to_csv(self, fh: IO[str], provenance: Sequence[tuple[str, str]] = ()) -> None:
        rows = [(str(t), _csvio.fmt(x)) for t, x in enumerate(self.values, start=1)]
        _csvio.write(fh, list(provenance) + self.provenance(), ("t", "x"), rows)

    @classmethod
    def from_csv(cls, fh: IO[str]) -> "TimeSeries":
        prov, header, rows = _csvio.read(fh)
        if header != ["t", "x"]:
            raise ValueError(f"unexpected series header {header}")
        model = HarmaModel.from_document(json.loads(prov["model"]))
        if model.document_hash() != prov.get("model_hash", model.document_hash()):
            raise ValueError("model hash does not match the model document")
        return cls(np.array([float(r[1]) for r in rows]), int(prov["seed"]), model,
                   int(prov["N"]), int(prov["burn_in"]), prov["generator_id"],
                   prov.get("filter", HUMBERT))


def simulate(model: HarmaModel, n: int, seed: int, N: int | None = None,
             burn_in: int | None = None, filter: str = HUMBERT) -> TimeSeries:
    """Simulate ``n`` observations of ``model``.

    Draws ``n + burn_in`` innovations, applies the fractional filter truncated
    at ``N`` and then the ARMA recursion with zero initial conditions, and
    drops the first ``burn_in`` values.

    Args:
        model: A stationary and invertible model.
        n: Number of retained observations.
        seed: Seed of the innovation generator.
        N: Truncation index of the fractional filter. Defaults to 1000 for
            ``nu > 0`` and 50 otherwise.
        burn_in: Discarded prefix. Defaults to :func:`minimum_burn_in`.
        filter: ``"humbert"`` uses the generating-function coefficients.
            ``"minimum_phase"`` uses the square-summable weights of
            :func:`harma.covariance.minimum_phase_coefficients`, which differ
            only when the trinomial has a root inside the unit disk.

    Returns:
        The path as a :class:`TimeSeries`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    report = validate(model)
    if not (report.stationary and report.invertible):
        raise ValidationError("simulate needs a stationary and invertible model")
    if N is None:
        N = default_truncation(model.nu)
    floor = minimum_burn_in(model, N)
    if burn_in is None:
        burn_in = floor
    elif burn_in < floor:
        warnings.warn(f"burn_in={burn_in} is below N + 10 * AR decay length = {floor}",
                      BurnInWarning, stacklevel=2)
    if filter == HUMBERT and not report.causal_expansion and model.nu != 0.0:
        warnings.warn("trinomial has a root inside the unit disk; the truncated "
                      "causal filter weights grow geometrically with N",
                      NonCausalWarning, stacklevel=2)
    eps = gaussian_noise(seed, n + burn_in, model.sigma2)
    z = fractional_filter(model.family, eps, N, _filter_weights(model, N, filter))
    x = _arma(model, z)[burn_in:]
    return TimeSeries(x, int(seed), model, int(N), int(burn_in), GENERATOR_ID, filter)


def impulse_response(model: HarmaModel, N: int, length: int | None = None,
                     filter: str = HUMBERT) -> np.ndarray:
    """Output of the simulation filter chain for a unit impulse at ``t = 0``."""
    length = N + 1 if length is None else length
    delta = np.zeros(length)
    delta[0] = 1.0
    z = fractional_filter(model.family, delta, N, _filter_weights(model, N, filter))
    return _arma(model, z)
