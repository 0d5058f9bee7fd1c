"""Run configuration: key-value config files with sections, plus CLI overrides.

File grammar (``#`` or ``;`` start a comment, blank lines ignored)::

    [source]
    chain = A               # preset A/B, or "custom" with L, J, M, thetas
    L = 12
    J = 0.8
    M = 1.35
    thetas = 7*pi/32, 7*pi/32, ...
    ensemble = coe          # instead of chain: coe or cue
    n = 4096

    [run]
    realizations = 10
    seed = 0
    observables = spacings, ratios, evec, evec-log, entropy, coefficients
    orders = 2, 4, 7, 12
    samples_per_order = 500
    cluster_tol = 1e-7
    output = out/

    [bins]
    spacings = 0, 4, 40     # low, high, bin count
    eta = 0, 10, 50
    eta_log = -12, 4, 64
    coefficients = 5, 61    # half-width in units of the COE sigma, bin count
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .chain import PRESETS, ChainParams
from .ensembles import EnsembleKind
from .errors import ConfigError, ContractViolation
from .spectral import DEFAULT_CLUSTER_TOL

OBSERVABLES = ("spacings", "ratios", "evec", "evec-log", "entropy", "coefficients")
DEFAULT_ORDERS = (2, 4, 7, 12)

_KEYS = {
    "source": {"chain", "l", "j", "m", "thetas", "ensemble", "n"},
    "run": {"realizations", "seed", "observables", "orders", "samples_per_order", "cluster_tol", "output"},
    "bins": {"spacings", "eta", "eta_log", "coefficients"},
}


@dataclass(frozen=True)
class Bins:
    spacings: tuple[float, float, int] = (0.0, 4.0, 40)
    eta: tuple[float, float, int] = (0.0, 10.0, 50)
    eta_log: tuple[float, float, int] = (-12.0, 4.0, 64)
    coefficients: tuple[float, int] = (5.0, 61)


@dataclass(frozen=True)
class Source:
    """Either a kicked chain (``chain`` set) or a circular ensemble."""

    chain: ChainParams | None = None
    preset: str | None = None
    ensemble: EnsembleKind | None = None
    N: int | None = None

    @property
    def is_chain(self) -> bool:
        return self.chain is not None

    @property
    def dim(self) -> int:
        return self.chain.N if self.is_chain else self.N

    def descriptor(self) -> dict:
        if self.is_chain:
            return {"type": "chain", "preset": self.preset, **self.chain.as_dict()}
        return {"type": "ensemble", "ensemble": self.ensemble.value, "N": self.N}


@dataclass(frozen=True)
class RunConfig:
    source: Source
    realizations: int = 1
    base_seed: int = 0
    observables: tuple[str, ...] = OBSERVABLES
    orders: tuple[int, ...] = DEFAULT_ORDERS
    samples_per_order: int = 500
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    output: Path = Path("out")
    bins: Bins = field(default_factory=Bins)

    def __post_init__(self):
        if self.source.is_chain and self.realizations != 1:
            raise ConfigError("a deterministic chain has exactly one realization")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        bad = set(self.observables) - set(OBSERVABLES)
        if bad:
            raise ConfigError(f"unknown observables {sorted(bad)}; choose from {list(OBSERVABLES)}")
        L = self.source.dim.bit_length() - 1
        if "entropy" in self.observables or "coefficients" in self.observables:
            if 1 << L != self.source.dim:
                raise ConfigError("entropy and coefficients need N = 2**L")
        for k in self.orders if "coefficients" in self.observables else ():
            if not 0 <= k <= L:
                raise ConfigError(f"order {k} outside 0..{L}")

    def to_dict(self) -> dict:
        d = {
            "source": self.source.descriptor(),
            "realizations": self.realizations,
            "base_seed": self.base_seed,
            "observables": list(self.observables),
            "orders": list(self.orders),
            "samples_per_order": self.samples_per_order,
            "cluster_tol": self.cluster_tol,
            "bins": asdict(self.bins),
        }
        return d

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()


_ANGLE = re.compile(
    r"^\s*(?P<sign>[-+])?\s*(?P<num>(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)?\s*\*?\s*(?P<pi>pi)?\s*(/\s*(?P<den>\d+(\.\d*)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """Parse ``0.7``, ``7*pi/32``, ``7pi/32``, ``pi/4`` or ``pi``."""
    m = _ANGLE.match(text)
    if not m or (m.group("num") is None and m.group("pi") is None):
        raise ConfigError(f"malformed angle {text!r}")
    value = float(m.group("num")) if m.group("num") else 1.0
    if m.group("pi"):
        value *= math.pi
    if m.group("den"):
        den = float(m.group("den"))
        if den == 0:
            raise ConfigError(f"malformed angle {text!r}: division by zero")
        value /= den
    return -value if m.group("sign") == "-" else value


def read_config_file(path: str | Path) -> dict[tuple[str, str], tuple[str, int]]:
    """Return ``{(section, key): (value, line_number)}``; rejects unknown keys."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    out = {}
    section = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = re.split(r"\s[#;]|^[#;]", raw, maxsplit=1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{path}:{lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip().lower()
            if section not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if section is None:
            raise ConfigError(f"{path}:{lineno}: key outside of a section")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS[section]:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} in [{section}]")
        out[(section, key)] = (value, lineno)
    return out


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _num(text: str, kind, where: str):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r} as {kind.__name__}") from None


def build_config(settings: dict[str, str], where: dict[str, str] | None = None) -> RunConfig:
    """Assemble a RunConfig from flat ``settings`` (keys like ``source.chain``).

    ``where`` maps a key to a human-readable location (file line or flag)
    used in error messages.
    """
    where = where or {}

    def loc(key):
        return where.get(key, key)

    def get(key, default=None):
        return settings.get(key, default)

    chain_name = get("source.chain")
    ens_name = get("source.ensemble")
    if chain_name and ens_name:
        raise ConfigError(f"{loc('source.chain')}: choose either a chain or an ensemble, not both")
    if not chain_name and not ens_name:
        raise ConfigError("no source given: set a chain (A, B, custom) or an ensemble (coe, cue)")

    if chain_name:
        name = chain_name.strip()
        if name.upper() in PRESETS:
            params = PRESETS[name.upper()]
            preset = name.upper()
            for key in ("source.l", "source.j", "source.m", "source.thetas"):
                if key in settings:
                    raise ConfigError(f"{loc(key)}: preset {preset} fixes all chain parameters")
        elif name.lower() == "custom":
            missing = [k for k in ("source.l", "source.j", "source.m", "source.thetas") if k not in settings]
            if missing:
                raise ConfigError(f"custom chain is missing {', '.join(m.split('.')[1] for m in missing)}")
            L = _num(get("source.l"), int, loc("source.l"))
            thetas = [parse_angle(t) for t in _split(get("source.thetas"))]
            if len(thetas) != L:
                raise ConfigError(f"{loc('source.thetas')}: {len(thetas)} angles given but L = {L}")
            try:
                params = ChainParams(L, _num(get("source.j"), float, loc("source.j")),
                                     _num(get("source.m"), float, loc("source.m")), tuple(thetas))
            except ContractViolation as exc:
                raise ConfigError(str(exc)) from None
            preset = None
        else:
            raise ConfigError(f"{loc('source.chain')}: unknown chain {name!r} (A, B or custom)")
        source = Source(chain=params, preset=preset)
    else:
        try:
            kind = EnsembleKind.parse(ens_name)
        except ContractViolation as exc:
            raise ConfigError(f"{loc('source.ensemble')}: {exc}") from None
        if "source.n" not in settings:
            raise ConfigError("ensemble source needs a dimension n")
        N = _num(get("source.n"), int, loc("source.n"))
        if N < 2:
            raise ConfigError(f"{loc('source.n')}: N must be >= 2")
        source = Source(ensemble=kind, N=N)

    kwargs = {}
    if "run.realizations" in settings:
        kwargs["realizations"] = _num(get("run.realizations"), int, loc("run.realizations"))
    elif not source.is_chain:
        kwargs["realizations"] = 10
    if "run.seed" in settings:
        seed = _num(get("run.seed"), int, loc("run.seed"))
        if not 0 <= seed < 2**64:
            raise ConfigError(f"{loc('run.seed')}: seed must be an unsigned 64-bit integer")
        kwargs["base_seed"] = seed
    if "run.observables" in settings:
        obs = tuple(_split(get("run.observables")))
        bad = set(obs) - set(OBSERVABLES)
        if bad:
            raise ConfigError(f"{loc('run.observables')}: unknown observables {sorted(bad)}")
        kwargs["observables"] = obs
    if "run.orders" in settings:
        kwargs["orders"] = tuple(_num(t, int, loc("run.orders")) for t in _split(get("run.orders")))
    if "run.samples_per_order" in settings:
        kwargs["samples_per_order"] = _num(get("run.samples_per_order"), int, loc("run.samples_per_order"))
    if "run.cluster_tol" in settings:
        kwargs["cluster_tol"] = _num(get("run.cluster_tol"), float, loc("run.cluster_tol"))
    if "run.output" in settings:
        kwargs["output"] = Path(get("run.output"))

    bins = Bins()
    for key in ("spacings", "eta", "eta_log"):
        full = f"bins.{key}"
        if full in settings:
            parts = _split(settings[full])
            if len(parts) != 3:
                raise ConfigError(f"{loc(full)}: expected 'low, high, count'")
            lo, hi = (_num(p, float, loc(full)) for p in parts[:2])
            count = _num(parts[2], int, loc(full))
            if not hi > lo or count < 1:
                raise ConfigError(f"{loc(full)}: need high > low and count >= 1")
            bins = replace(bins, **{key: (lo, hi, count)})
    if "bins.coefficients" in settings:
        parts = _split(settings["bins.coefficients"])
        if len(parts) != 2:
            raise ConfigError(f"{loc('bins.coefficients')}: expected 'half_width_sigmas, count'")
        bins = replace(bins, coefficients=(_num(parts[0], float, loc("bins.coefficients")),
                                           _num(parts[1], int, loc("bins.coefficients"))))
    kwargs["bins"] = bins
    return RunConfig(source=source, **kwargs)


def parse_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Config file values overridden by ``overrides`` (flat ``section.key`` names)."""
    settings: dict[str, str] = {}
    where: dict[str, str] = {}
    if path is not None:
        for (section, key), (value, lineno) in read_config_file(path).items():
            settings[f"{section}.{key}"] = value
            where[f"{section}.{key}"] = f"{path}:{lineno}"
    overrides = overrides or {}
    custom = overrides.get("source.chain", "").strip().lower() == "custom"
    if ("source.chain" in overrides or "source.ensemble" in overrides) and not custom:
        # a source given on the command line replaces the file's source;
        # "custom" instead refers to the chain parameters in the file
        for k in [k for k in settings if k.startswith("source.")]:
            del settings[k]
    for key, value in overrides.items():
        settings[key] = value
        where[key] = f"--{key.split('.', 1)[1].replace('_', '-')}"
    return build_config(settings, where)
