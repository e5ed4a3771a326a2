"""Experiment configuration: one schema, loadable from TOML or JSON.

Lengths in the file use the units spelled out in the key names (um, mm, nm,
us); they are converted to SI on load. Unknown keys are rejected so typos
fail loudly. The same resolved dictionary feeds the run manifest hash, so
identical configurations hash identically regardless of source format.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .field_core import GridSpec
from .storage_channel import ChannelSpec, NoiseSpec
from .vector_state import parse_state_descriptor

# The four reference states: theta = 0, 90, 180, 270 degrees on label pairs
# (1,3), (-3,4), (0,-5), (2,-2).
DEFAULT_STATES = (
    ("psi1", "PPB(1,3,0)"),
    ("psi2", "PPB(-3,4,90)"),
    ("psi3", "PPB(0,-5,180)"),
    ("psi4", "PPB(2,-2,270)"),
)


@dataclass(frozen=True)
class GridBlock:
    n: int = 512
    pitch_um: float = 1.5625
    wavelength_nm: float = 795.0

    def to_grid(self) -> GridSpec:
        return GridSpec(self.n, self.pitch_um * 1e-6, self.wavelength_nm * 1e-9)


@dataclass(frozen=True)
class RingBlock:
    """Ring-mode parameters shared by all synthesized states.

    Free parameters of the desk-scale model; they are not measured values.
    """

    r_r_um: float = 100.0
    w0_um: float = 10.0

    @property
    def r_r(self) -> float:
        return self.r_r_um * 1e-6

    @property
    def w0(self) -> float:
        return self.w0_um * 1e-6


@dataclass(frozen=True)
class ChannelBlock:
    eta0: float = 0.143
    sigma_a_mm: float = 1.0
    p_dep: float = 0.0
    p_phi: float = 0.0
    storage_time_us: float = 1.5
    amplitude_convention: str = "eta"

    def to_channel(self, p_dep: float | None = None, p_phi: float | None = None
                   ) -> ChannelSpec:
        """Build the channel, optionally overriding the noise per state."""
        noise = NoiseSpec(
            p_dep=self.p_dep if p_dep is None else p_dep,
            p_phi=self.p_phi if p_phi is None else p_phi,
        )
        return ChannelSpec(
            eta0=self.eta0,
            sigma_a=self.sigma_a_mm * 1e-3,
            noise=noise,
            storage_time=self.storage_time_us * 1e-6,
            amplitude_convention=self.amplitude_convention,
        )


@dataclass(frozen=True)
class StateBlock:
    name: str
    descriptor: str
    p_dep: float | None = None
    p_phi: float | None = None

    def labels(self) -> tuple[int, int, float]:
        return parse_state_descriptor(self.descriptor)


@dataclass(frozen=True)
class ScanBlock:
    alpha_points: int = 64

    def alphas(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * np.pi, self.alpha_points, endpoint=False)


@dataclass(frozen=True)
class TomographyBlock:
    method: str = "linear"
    counts_per_setting: int = 0  # 0 = exact probabilities


@dataclass(frozen=True)
class GridEvalBlock:
    """Fidelity-grid evaluation over all (L1, L2) label pairs."""

    l_min: int = -5
    l_max: int = 5
    realization: str = "pov"       # "pov" or "lg"
    lg_w0_mm: float = 1.0          # vortex waist for the "lg" counterfactual
    lg_pitch_um: float = 50.0      # pitch of the grid holding the LG modes


@dataclass(frozen=True)
class RadiusSweepBlock:
    l_min: int = -5
    l_max: int = 5
    lg_w0_um: float = 60.0


@dataclass(frozen=True)
class HologramBlock:
    mode: str = "bg"               # gaussian | lg | bg | pov
    l: int = 3
    carrier_period_um: float = 50.0
    k_r_per_mm: float = 12.0       # bg only
    w0_um: float = 100.0           # waist/envelope of the target (mask-neutral)
    r_r_um: float = 100.0          # pov only (mask-neutral)


@dataclass(frozen=True)
class PovValidationBlock:
    focal_length_mm: float = 75.0
    w0_um: float = 10.0            # target ring thickness at the focal plane
    ratios: tuple[float, ...] = (5.0, 10.0, 20.0)
    l: int = 1
    n: int = 512
    output_pitch_um: float = 2.0


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 12345
    grid: GridBlock = GridBlock()
    ring: RingBlock = RingBlock()
    channel: ChannelBlock = ChannelBlock()
    scan: ScanBlock = ScanBlock()
    tomography: TomographyBlock = TomographyBlock()
    grid_eval: GridEvalBlock = GridEvalBlock()
    radius_sweep: RadiusSweepBlock = RadiusSweepBlock()
    hologram: HologramBlock = HologramBlock()
    pov_validation: PovValidationBlock = PovValidationBlock()
    states: tuple[StateBlock, ...] = tuple(
        StateBlock(name=n, descriptor=d) for n, d in DEFAULT_STATES
    )

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Stable hash of the resolved configuration."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_BLOCK_TYPES = {
    "grid": GridBlock,
    "ring": RingBlock,
    "channel": ChannelBlock,
    "scan": ScanBlock,
    "tomography": TomographyBlock,
    "grid_eval": GridEvalBlock,
    "radius_sweep": RadiusSweepBlock,
    "hologram": HologramBlock,
    "pov_validation": PovValidationBlock,
}


def _build_block(cls, data: dict, context: str):
    if not isinstance(data, dict):
        raise ConfigError(f"[{context}] must be a table/object")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"[{context}] unknown keys: {sorted(unknown)}")
    coerced = {}
    for key, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    try:
        return cls(**coerced)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{context}] {exc}") from exc


def _build_states(entries, context: str = "states") -> tuple[StateBlock, ...]:
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"[{context}] must be a non-empty array of tables")
    states = []
    for i, entry in enumerate(entries):
        block = _build_block(StateBlock, entry, f"{context}[{i}]")
        try:
            block.labels()
        except ValueError as exc:
            raise ConfigError(f"[{context}[{i}]] {exc}") from exc
        states.append(block)
    names = [s.name for s in states]
    if len(set(names)) != len(names):
        raise ConfigError(f"[{context}] state names must be unique")
    return tuple(states)


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a table/object")
    known = set(_BLOCK_TYPES) | {"seed", "states"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kwargs = {}
    if "seed" in data:
        seed = data["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
        kwargs["seed"] = seed
    for name, cls in _BLOCK_TYPES.items():
        if name in data:
            kwargs[name] = _build_block(cls, data[name], name)
    if "states" in data:
        kwargs["states"] = _build_states(data["states"])
    cfg = ExperimentConfig(**kwargs)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    try:
        cfg.grid.to_grid()
        cfg.channel.to_channel()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.scan.alpha_points < 8:
        raise ConfigError("scan.alpha_points must be at least 8")
    if cfg.tomography.method not in ("linear", "mle"):
        raise ConfigError("tomography.method must be 'linear' or 'mle'")
    if cfg.tomography.counts_per_setting < 0:
        raise ConfigError("tomography.counts_per_setting must be nonnegative")
    if cfg.grid_eval.l_min > cfg.grid_eval.l_max:
        raise ConfigError("grid_eval.l_min must not exceed grid_eval.l_max")
    if cfg.grid_eval.realization not in ("pov", "lg"):
        raise ConfigError("grid_eval.realization must be 'pov' or 'lg'")
    if cfg.radius_sweep.l_min > cfg.radius_sweep.l_max:
        raise ConfigError("radius_sweep.l_min must not exceed radius_sweep.l_max")
    if cfg.hologram.mode not in ("gaussian", "lg", "bg", "pov"):
        raise ConfigError("hologram.mode must be gaussian, lg, bg or pov")
    if min(cfg.pov_validation.ratios, default=0.0) <= 0:
        raise ConfigError("pov_validation.ratios must be positive")


def load_config(path: str | Path) -> ExperimentConfig:
    """Load a TOML or JSON configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    suffix = path.suffix.lower()
    try:
        if suffix == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
        elif suffix == ".toml":
            try:
                import tomllib  # Python >= 3.11
            except ModuleNotFoundError:
                import tomli as tomllib
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            raise ConfigError(f"unsupported config format: {suffix!r} (use .toml or .json)")
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"failed to parse {path}: {exc}") from exc
    return config_from_dict(data)


def default_config() -> ExperimentConfig:
    return ExperimentConfig()
