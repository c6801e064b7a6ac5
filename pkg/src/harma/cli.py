"""Command-line front end: ``harma <command> [options]``.

Every artifact starts with provenance lines (tool version, command and the
fully resolved config as sorted JSON). Settings merge as
``defaults <- --config file <- explicit flags``. ``--config`` accepts either a
flat JSON object or a previously written artifact, whose ``config`` line is
then reused.

Exit status: 0 success, 2 config or parse error, 3 validation failure,
4 numerical failure. Failures also print a JSON error record to stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, _csvio
from .covariance import acvf_ma, acvf_minimum_phase, acvf_spectral_table
from .errors import (
    DegeneratePolynomialError,
    QuadratureError,
    RecurrenceMismatchError,
    UnknownFamilyError,
    ValidationError,
)
from .humbert import SPECIALIZATIONS, coeff_recurrence, explicit_series
from .model import HarmaModel, require_stationary, validate
from .simulate import TimeSeries, default_truncation, simulate
from .spectral import periodogram, singular_frequencies, spectrum_grid, u_function

COMMANDS = ("coeffs", "validate", "simulate", "spectrum", "acvf", "singularities",
            "periodogram")
FAMILIES = ("custom", "gegenbauer", "pincherle", "horadam", "horadam-pethe")

MODEL_DEFAULTS = {"family": "custom", "variant": "type1", "m": 3, "nu": 0.3, "u": 0.1,
                  "phi": [], "theta": [], "sigma2": 1.0}
COMMAND_DEFAULTS = {
    "coeffs": {"trunc": 50, "method": "recurrence"},
    "validate": {},
    "simulate": {"n": 1000, "seed": 0, "trunc": None, "burn_in": None, "replicates": 1,
                 "filter": "humbert"},
    "spectrum": {"points": 512, "tol": 1e-8},
    "acvf": {"lags": 20, "trunc": 10000, "tol": 1e-9, "method": "ma"},
    "singularities": {"tol": 1e-8},
    "periodogram": {"input": None, "n": 1024, "seed": 0, "trunc": None, "burn_in": None,
                    "filter": "humbert"},
}
METHODS = {"coeffs": ("recurrence", "explicit"),
           "acvf": ("ma", "spectral", "minimum_phase")}


class ConfigError(Exception):
    """Bad command line or config file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved invocation."""

    command: str
    settings: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"

    def model(self) -> HarmaModel:
        s = self.settings
        return HarmaModel.build(s["variant"], s["m"], s["nu"], s["u"], s["phi"], s["theta"],
                                s["sigma2"])

    def config_json(self) -> str:
        doc = dict(self.settings, command=self.command, format=self.format)
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def provenance(self) -> list[tuple[str, str]]:
        return [("tool", f"harma {__version__}"), ("command", self.command),
                ("config", self.config_json())]


# ---------------------------------------------------------------------------
# parsing and config resolution
# ---------------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="harma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"harma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--family", choices=FAMILIES, default=S)
        p.add_argument("--variant", choices=("type1", "type2"), default=S)
        p.add_argument("--m", type=int, default=S)
        p.add_argument("--nu", type=float, default=S)
        p.add_argument("--u", type=float, default=S)
        p.add_argument("--phi", type=_float_list, default=S, metavar="CSV-LIST")
        p.add_argument("--theta", type=_float_list, default=S, metavar="CSV-LIST")
        p.add_argument("--sigma2", type=float, default=S)
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        keys = COMMAND_DEFAULTS[name]
        if "n" in keys:
            p.add_argument("--n", type=int, default=S)
        if "seed" in keys:
            p.add_argument("--seed", type=int, default=S)
        if "trunc" in keys:
            p.add_argument("--trunc", type=int, default=S)
        if "burn_in" in keys:
            p.add_argument("--burn-in", dest="burn_in", type=int, default=S)
        if "lags" in keys:
            p.add_argument("--lags", type=int, default=S)
        if "points" in keys:
            p.add_argument("--points", type=int, default=S)
        if "tol" in keys:
            p.add_argument("--tol", type=float, default=S)
        if "replicates" in keys:
            p.add_argument("--replicates", type=int, default=S)
        if "filter" in keys:
            p.add_argument("--filter", choices=("humbert", "minimum_phase"), default=S)
        if "input" in keys:
            p.add_argument("--input", metavar="PATH", default=S)
        if "method" in keys:
            p.add_argument("--method", choices=METHODS[name], default=S)
    return parser


def load_config_file(path: str) -> dict:
    """Read a flat JSON config, or the ``# config:`` line of an artifact."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        doc = json.loads(text)
        if isinstance(doc, dict) and "provenance" in doc and "data" in doc:
            doc = json.loads(doc["provenance"]["config"])
    except json.JSONDecodeError:
        lines = [ln for ln in text.splitlines() if ln.startswith("# config:")]
        if not lines:
            raise ConfigError(f"{path} is neither JSON nor an artifact with a config line")
        try:
            doc = json.loads(lines[0].partition(":")[2])
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad config line in {path}: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _resolve_family(s: dict, explicit: dict) -> None:
    fam = s["family"].replace("_", "-")
    if fam not in FAMILIES:
        raise ConfigError(f"unknown family {s['family']!r}")
    s["family"] = fam
    if fam == "custom":
        return
    variant, m = SPECIALIZATIONS[fam.replace("-", "_")]
    for key, want in (("variant", variant), ("m", m)):
        if key in explicit and explicit[key] != want:
            raise ConfigError(f"family {fam} fixes {key}={want}, got {explicit[key]}")
        s[key] = want


def resolve(args: argparse.Namespace) -> RunConfig:
    ns = vars(args).copy()
    command = ns.pop("command")
    cfg_path = ns.pop("config", None)
    out = ns.pop("out", None)
    fmt = ns.pop("format", "csv")
    allowed = set(MODEL_DEFAULTS) | set(COMMAND_DEFAULTS[command])
    file_doc = load_config_file(cfg_path) if cfg_path else {}
    file_doc = {k.replace("-", "_"): v for k, v in file_doc.items()
                if k not in ("command", "format")}
    # configs from other commands may carry their own keys; only complain about typos
    known_anywhere = set(MODEL_DEFAULTS).union(*COMMAND_DEFAULTS.values())
    if set(file_doc) - known_anywhere:
        raise ConfigError(f"unknown config keys {sorted(set(file_doc) - known_anywhere)}")
    file_doc = {k: v for k, v in file_doc.items() if k in allowed}
    if "family" in ns:
        # a family flag overrides any variant/m the file derived from its own family
        file_doc.pop("variant", None)
        file_doc.pop("m", None)
    explicit = dict(file_doc, **ns)
    s = dict(MODEL_DEFAULTS, **COMMAND_DEFAULTS[command])
    s.update(explicit)
    _resolve_family(s, explicit)
    try:
        s["m"] = int(s["m"])
        for k in ("nu", "u", "sigma2"):
            s[k] = float(s[k])
        s["phi"] = [float(x) for x in s["phi"]]
        s["theta"] = [float(x) for x in s["theta"]]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad model setting: {exc}")
    if s.get("replicates", 1) < 1:
        raise ConfigError("--replicates must be at least 1")
    if s.get("replicates", 1) > 1 and not out:
        raise ConfigError("--replicates needs --out")
    return RunConfig(command, s, out, fmt)


# ---------------------------------------------------------------------------
# commands: each returns (header, rows, json-data, extra-provenance, status)
# ---------------------------------------------------------------------------

@dataclass
class _Artifact:
    header: Sequence[str]
    rows: list
    data: object
    extra: list = field(default_factory=list)
    status: int = 0


def _coeffs(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    s = cfg.settings
    fam = model.family
    N = s["trunc"]
    if N is None or N < 0:
        raise ConfigError("--trunc must be a non-negative integer")
    if s["method"] == "explicit":
        series = explicit_series(fam.variant, fam.m, fam.nu, fam.u, N)
    else:
        series = coeff_recurrence(fam.variant, fam.m, fam.nu, fam.u, N)
    vals = series.values
    rows = [(str(n), _csvio.fmt(v)) for n, v in enumerate(vals)]
    return _Artifact(("n", "value"), rows, {"n": list(range(N + 1)), "value": vals.tolist()},
                     [("method", series.method)])


def _validate(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    rep = validate(model).to_dict()
    rows = [(k, json.dumps(v, sort_keys=True) if not isinstance(v, bool) else _csvio.fmt(v))
            for k, v in rep.items()]
    return _Artifact(("field", "value"), rows, rep,
                     status=0 if rep["stationary"] else 3)


def _series_rows(ts: TimeSeries):
    return [(str(t), _csvio.fmt(x)) for t, x in enumerate(ts.values, start=1)]


def _simulate_one(cfg: RunConfig, model: HarmaModel, seed: int) -> _Artifact:
    s = cfg.settings
    ts = simulate(model, s["n"], seed, s["trunc"], s["burn_in"], s["filter"])
    return _Artifact(("t", "x"), _series_rows(ts),
                     {"t": list(range(1, len(ts) + 1)), "x": ts.values.tolist()},
                     ts.provenance())


def _grid_artifact(grid) -> _Artifact:
    rows = [(_csvio.fmt(w), _csvio.fmt(v), _csvio.fmt(bool(b)))
            for w, v, b in zip(grid.omegas, grid.values, grid.is_singular)]
    data = {"omega": grid.omegas.tolist(), "value": grid.values.tolist(),
            "is_singular": grid.is_singular.tolist()}
    return _Artifact(("omega", "value", "is_singular"), rows, data)


def _spectrum(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    require_stationary(model)
    return _grid_artifact(spectrum_grid(model, cfg.settings["points"], cfg.settings["tol"]))


def _acvf(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    s = cfg.settings
    H, N = s["lags"], s["trunc"]
    if H < 0:
        raise ConfigError("--lags must be non-negative")
    require_stationary(model)
    if s["method"] == "spectral":
        table = acvf_spectral_table(model, H, s["tol"])
    elif s["method"] == "minimum_phase":
        table = acvf_minimum_phase(model, H, N)
    else:
        table = acvf_ma(model, H, N)
    rows = [(str(int(h)), _csvio.fmt(v), table.method, _csvio.fmt(e))
            for h, v, e in zip(table.lags, table.values, table.error_estimates)]
    data = {"lag": table.lags.tolist(), "value": table.values.tolist(),
            "method": table.method, "error_estimate": table.error_estimates.tolist()}
    return _Artifact(("lag", "value", "method", "error_estimate"), rows, data)


def _singularities(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    poles = singular_frequencies(model, cfg.settings["tol"])
    rows = [(_csvio.fmt(w), tag, _csvio.fmt(float(u_function(model, w)))) for w, tag in poles]
    data = [{"omega": w, "kind": tag, "U": float(u_function(model, w))} for w, tag in poles]
    return _Artifact(("omega", "kind", "U"), rows, data)


def _periodogram(cfg: RunConfig, model: HarmaModel) -> _Artifact:
    s = cfg.settings
    if s["input"]:
        try:
            with open(s["input"]) as fh:
                ts = TimeSeries.from_csv(fh)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read series {s['input']}: {exc}")
        x = ts.values
    else:
        x = simulate(model, s["n"], s["seed"], s["trunc"], s["burn_in"], s["filter"]).values
    return _grid_artifact(periodogram(x))


HANDLERS = {"coeffs": _coeffs, "validate": _validate, "spectrum": _spectrum,
            "acvf": _acvf, "singularities": _singularities, "periodogram": _periodogram}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "nan" if math.isnan(x) else x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render(cfg: RunConfig, art: _Artifact) -> str:
    prov = cfg.provenance() + art.extra
    if cfg.format == "json":
        doc = {"provenance": dict(prov), "data": _jsonable(art.data)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    _csvio.write(buf, prov, art.header, art.rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            fh.write(text)


def replicate_path(out: str, i: int) -> Path:
    p = Path(out)
    return p.with_name(f"{p.stem}_r{i:04d}{p.suffix}")


def _run_simulate(cfg: RunConfig, model: HarmaModel) -> int:
    s = cfg.settings
    R = s["replicates"]
    if s["trunc"] is None:
        s = dict(s, trunc=default_truncation(model.nu))
        cfg = RunConfig(cfg.command, s, cfg.out, cfg.format)
    if R == 1:
        _emit(render(cfg, _simulate_one(cfg, model, s["seed"])), cfg.out)
        return 0

    def one(i: int):
        sub = RunConfig(cfg.command, dict(s, seed=s["seed"] + i, replicates=1), None,
                        cfg.format)
        text = render(sub, _simulate_one(sub, model, s["seed"] + i))
        path = replicate_path(cfg.out, i)
        _emit(text, str(path))
        return {"replicate": i, "seed": s["seed"] + i, "file": path.name,
                "sha256": hashlib.sha256(text.encode()).hexdigest()}

    with ThreadPoolExecutor() as pool:
        entries = list(pool.map(one, range(R)))
    p = Path(cfg.out)
    manifest = {"provenance": dict(cfg.provenance()), "replicates": entries}
    _emit(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
          str(p.with_name(f"{p.stem}_manifest.json")))
    return 0


def run(cfg: RunConfig) -> int:
    """Execute ``cfg`` and write its artifact. Returns the exit status."""
    model = cfg.model()
    if cfg.command == "simulate":
        return _run_simulate(cfg, model)
    art = HANDLERS[cfg.command](cfg, model)
    _emit(render(cfg, art), cfg.out)
    return art.status


def _fail(status: int, exc: BaseException) -> int:
    record = {"status": status, "error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = resolve(build_parser().parse_args(argv))
    except (ConfigError, UnknownFamilyError) as exc:
        return _fail(2, exc)
    try:
        return run(cfg)
    except ConfigError as exc:
        return _fail(2, exc)
    except (QuadratureError, RecurrenceMismatchError, DegeneratePolynomialError,
            ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(4, exc)
    except (ValidationError, ValueError) as exc:
        return _fail(3, exc)


if __name__ == "__main__":
    sys.exit(main())
