"""Grid-sampled complex optical fields and analytic structured-light modes.

Conventions used throughout the package:

* square grids of ``n`` samples per side with pixel centers at
  ``(i + 0.5 - n/2) * pitch``, so no sample sits exactly on the optical axis;
* arrays are indexed ``amplitude[iy, ix]`` with x along columns;
* synthesized modes are normalized to unit power on their grid, except for
  ring modes constructed with an explicit Fourier-lens focal length, which
  carry the physical ring prefactor instead;
* phase masks wrap to [0, 2*pi) and are quantized to 256 levels only when
  exported to an image file.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.special import jv

from .errors import DegenerateFieldError, GridMismatchError, SamplingError

DEFAULT_WAVELENGTH = 795e-9  # nominal D1-line probe, meters

# Sampling guards (multiples of the grid pitch).
_MIN_RADIAL_PIXELS = 3.0      # narrowest resolvable Gaussian waist / ring thickness
_MIN_AZIMUTHAL_PIXELS = 4.0   # shortest resolvable azimuthal phase period
_MIN_CARRIER_PIXELS = 4.0     # blazed-grating period floor
_MIN_BESSEL_PIXELS = 2.5      # radial oscillation period floor for Bessel rings


@dataclass(frozen=True)
class GridSpec:
    """Square sampling grid with physical pitch and design wavelength."""

    n: int
    pitch: float
    wavelength: float = DEFAULT_WAVELENGTH

    def __post_init__(self) -> None:
        if self.n < 64 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 64, got {self.n}")
        if not self.pitch > 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def k(self) -> float:
        """Wave number 2*pi/wavelength (derived, never stored)."""
        return 2.0 * np.pi / self.wavelength

    @property
    def extent(self) -> float:
        """Physical side length n*pitch in meters."""
        return self.n * self.pitch

    def axis(self) -> np.ndarray:
        """Pixel-center coordinates along one axis."""
        return (np.arange(self.n) + 0.5 - self.n / 2) * self.pitch

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return read-only (x, y, r, phi) arrays for this grid."""
        return _grid_coords(self.n, self.pitch)


@lru_cache(maxsize=16)
def _grid_coords(n: int, pitch: float):
    axis = (np.arange(n) + 0.5 - n / 2) * pitch
    x, y = np.meshgrid(axis, axis)
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    for arr in (x, y, r, phi):
        arr.setflags(write=False)
    return x, y, r, phi


@dataclass(frozen=True)
class TransverseField:
    """One polarization component of a beam, sampled on a :class:`GridSpec`."""

    grid: GridSpec
    amplitude: np.ndarray

    def __post_init__(self) -> None:
        amp = np.ascontiguousarray(self.amplitude, dtype=np.complex128)
        if amp.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"amplitude shape {amp.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise ValueError("amplitude contains non-finite values")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def power(self) -> float:
        """Total power, the discrete integral of |E|^2 with pitch^2 measure."""
        return float(np.sum(self.intensity()) * self.grid.pitch**2)


@dataclass(frozen=True)
class GaussianMode:
    """Fundamental Gaussian, 1/e field radius ``w0``."""

    w0: float

    def __post_init__(self) -> None:
        if not self.w0 > 0:
            raise ValueError("w0 must be positive")


@dataclass(frozen=True)
class LGMode:
    """Laguerre-Gaussian vortex with radial index zero.

    Bright-ring peak radius is w0*sqrt(|l|/2), so the ring grows with the
    topological charge; this is the mode family whose size asymmetry the
    ring modes below are designed to remove.
    """

    l: int
    w0: float

    def __post_init__(self) -> None:
        if not self.w0 > 0:
            raise ValueError("w0 must be positive")


@dataclass(frozen=True)
class BGMode:
    """Bessel beam of order ``l`` with radial wave vector ``k_r``, apodized
    by a Gaussian envelope of radius ``w0_env``."""

    l: int
    k_r: float
    w0_env: float

    def __post_init__(self) -> None:
        if not self.k_r > 0:
            raise ValueError("k_r must be positive")
        if not self.w0_env > 0:
            raise ValueError("w0_env must be positive")


@dataclass(frozen=True)
class POVMode:
    """Ring mode exp(il*phi)*exp(-(r-r_r)^2/w0^2) whose radius ``r_r`` is
    independent of the topological charge ``l``.

    When ``focal_length`` is given, the synthesized field carries the physical
    prefactor i^(l-1) * 2f/(k*w0^2) of the ring produced at the focal plane of
    a Fourier lens; otherwise the mode is unit-power normalized.
    """

    l: int
    r_r: float
    w0: float
    focal_length: float | None = None

    def __post_init__(self) -> None:
        if not self.r_r > 0:
            raise ValueError("r_r must be positive")
        if not self.w0 > 0:
            raise ValueError("w0 must be positive")
        if self.focal_length is not None and not self.focal_length > 0:
            raise ValueError("focal_length must be positive")


ModeSpec = GaussianMode | LGMode | BGMode | POVMode


@dataclass(frozen=True)
class HologramMask:
    """Wrapped phase mask with a blazed carrier, ready for SLM-style export."""

    grid: GridSpec
    phase: np.ndarray
    carrier_period: float

    def __post_init__(self) -> None:
        phase = np.ascontiguousarray(self.phase, dtype=np.float64)
        if phase.shape != (self.grid.n, self.grid.n):
            raise ValueError("phase shape does not match grid")
        if phase.min() < 0.0 or phase.max() >= 2.0 * np.pi:
            raise ValueError("phase must be wrapped to [0, 2*pi)")
        phase.setflags(write=False)
        object.__setattr__(self, "phase", phase)


def _characteristic_radius(mode: ModeSpec) -> float:
    if isinstance(mode, GaussianMode):
        return mode.w0
    if isinstance(mode, LGMode):
        return mode.w0 * (np.sqrt(abs(mode.l) / 2.0) + 1.0)
    if isinstance(mode, BGMode):
        return mode.w0_env
    if isinstance(mode, POVMode):
        return mode.r_r + 2.0 * mode.w0
    raise TypeError(f"unsupported mode spec: {mode!r}")


def _check_sampling(mode: ModeSpec, grid: GridSpec) -> None:
    pitch = grid.pitch
    r_char = _characteristic_radius(mode)
    if r_char >= grid.extent / 4.0:
        raise SamplingError(
            f"characteristic radius {r_char:.3e} m exceeds a quarter of the "
            f"grid extent {grid.extent:.3e} m"
        )
    if isinstance(mode, (GaussianMode, LGMode)):
        if mode.w0 < _MIN_RADIAL_PIXELS * pitch:
            raise SamplingError(f"waist {mode.w0:.3e} m under-resolved at pitch {pitch:.3e} m")
    if isinstance(mode, POVMode) and mode.w0 < _MIN_RADIAL_PIXELS * pitch:
        raise SamplingError(
            f"ring thickness {mode.w0:.3e} m under-resolved at pitch {pitch:.3e} m"
        )
    if isinstance(mode, BGMode) and 2.0 * np.pi / mode.k_r < _MIN_BESSEL_PIXELS * pitch:
        raise SamplingError(
            f"radial period {2 * np.pi / mode.k_r:.3e} m aliases at pitch {pitch:.3e} m"
        )
    # Azimuthal phase gradient: the fringe period along the intensity-carrying
    # circumference must stay above the pixel scale.
    l = getattr(mode, "l", 0)
    if l:
        if isinstance(mode, POVMode):
            r_inner = max(mode.r_r - 2.0 * mode.w0, mode.w0)
        elif isinstance(mode, LGMode):
            r_inner = 0.5 * mode.w0 * np.sqrt(abs(l) / 2.0)
        else:  # BGMode: first ring sits near |l|/k_r, same scale as radial period
            r_inner = max(abs(l), 1) / mode.k_r
        if 2.0 * np.pi * r_inner / abs(l) < _MIN_AZIMUTHAL_PIXELS * pitch:
            raise SamplingError(
                f"azimuthal phase of charge {l} aliases at radius {r_inner:.3e} m"
            )


def synthesize(mode: ModeSpec, grid: GridSpec) -> TransverseField:
    """Sample an analytic mode on ``grid``.

    Raises :class:`SamplingError` when the mode would not fit the grid or
    its phase structure would alias.
    """
    _check_sampling(mode, grid)
    _, _, r, phi = grid.coords()

    if isinstance(mode, GaussianMode):
        amp = np.exp(-(r**2) / mode.w0**2).astype(np.complex128)
    elif isinstance(mode, LGMode):
        a = abs(mode.l)
        amp = (np.sqrt(2.0) * r / mode.w0) ** a * np.exp(-(r**2) / mode.w0**2)
        amp = amp * np.exp(1j * mode.l * phi)
    elif isinstance(mode, BGMode):
        amp = jv(mode.l, mode.k_r * r) * np.exp(-(r**2) / mode.w0_env**2)
        amp = amp * np.exp(1j * mode.l * phi)
    elif isinstance(mode, POVMode):
        amp = np.exp(-((r - mode.r_r) ** 2) / mode.w0**2) * np.exp(1j * mode.l * phi)
        if mode.focal_length is not None:
            # physical ring amplitude at the Fourier plane: i^(l-1) * 2f/(k w0^2)
            phase_factor = (1j) ** ((mode.l - 1) % 4)
            prefactor = 2.0 * mode.focal_length / (grid.k * mode.w0**2)
            return TransverseField(grid, phase_factor * prefactor * amp)
    else:
        raise TypeError(f"unsupported mode spec: {mode!r}")

    field = TransverseField(grid, amp)
    power = field.power()
    if not power > 0:
        raise DegenerateFieldError("synthesized mode has zero power on this grid")
    return TransverseField(grid, field.amplitude / np.sqrt(power))


def inner_product(a: TransverseField, b: TransverseField) -> complex:
    """Discrete overlap integral conj(a)*b with pitch^2 measure."""
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
    return complex(np.vdot(a.amplitude, b.amplitude) * a.grid.pitch**2)


def total_power(field: TransverseField) -> float:
    return field.power()


def ring_radius(field: TransverseField) -> float:
    """Intensity-weighted mean radius of the azimuthally averaged intensity.

    Sub-pixel stable; for a thin ring of thickness w0 centred at r_r it
    returns r_r up to a bias of order w0^2/(4 r_r).
    """
    intensity = field.intensity()
    power = float(intensity.sum())
    if not power > 0:
        raise DegenerateFieldError("field carries no power")
    _, _, r, _ = field.grid.coords()
    return float((r * intensity).sum() / power)


def radial_profile(field: TransverseField) -> tuple[np.ndarray, np.ndarray]:
    """Azimuthally averaged intensity in annular bins one pitch wide.

    Returns (bin-center radii, mean intensity per annulus).
    """
    intensity = field.intensity()
    _, _, r, _ = field.grid.coords()
    pitch = field.grid.pitch
    idx = (r / pitch).astype(np.intp).ravel()
    n_bins = int(idx.max()) + 1
    sums = np.bincount(idx, weights=intensity.ravel(), minlength=n_bins)
    counts = np.bincount(idx, minlength=n_bins)
    valid = counts > 0
    radii = (np.arange(n_bins)[valid] + 0.5) * pitch
    return radii, sums[valid] / counts[valid]


def peak_radius(field: TransverseField) -> float:
    """Radius of the brightest annulus, refined to sub-pixel by a parabola.

    Complements :func:`ring_radius` for modes whose radial profile is
    asymmetric (the vortex family whose peak sits at w0*sqrt(|l|/2)).
    """
    radii, profile = radial_profile(field)
    if not profile.max() > 0:
        raise DegenerateFieldError("field carries no power")
    j = int(np.argmax(profile))
    if 0 < j < len(profile) - 1:
        lo, mid, hi = profile[j - 1], profile[j], profile[j + 1]
        denom = lo - 2.0 * mid + hi
        shift = 0.0 if denom == 0 else float(np.clip(0.5 * (lo - hi) / denom, -0.5, 0.5))
    else:
        shift = 0.0
    step = radii[1] - radii[0] if len(radii) > 1 else field.grid.pitch
    return float(radii[j] + shift * step)


def sample_bilinear(field: TransverseField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of the complex amplitude at physical points.

    Points outside the sampled area evaluate to zero.
    """
    n, pitch = field.grid.n, field.grid.pitch
    fx = np.asarray(x) / pitch + n / 2 - 0.5
    fy = np.asarray(y) / pitch + n / 2 - 0.5
    i0 = np.floor(fx).astype(np.intp)
    j0 = np.floor(fy).astype(np.intp)
    tx = fx - i0
    ty = fy - j0
    out = np.zeros(np.broadcast(fx, fy).shape, dtype=np.complex128)
    amp = field.amplitude
    for dj, di, w in (
        (0, 0, (1 - tx) * (1 - ty)),
        (0, 1, tx * (1 - ty)),
        (1, 0, (1 - tx) * ty),
        (1, 1, tx * ty),
    ):
        ii = i0 + di
        jj = j0 + dj
        ok = (ii >= 0) & (ii < n) & (jj >= 0) & (jj < n)
        vals = np.zeros_like(out)
        vals[ok] = amp[jj[ok], ii[ok]]
        out += w * vals
    return out


def resample_bilinear(field: TransverseField, grid: GridSpec) -> TransverseField:
    """Resample a field onto another grid (intended: the coarser one)."""
    x, y, _, _ = grid.coords()
    return TransverseField(grid, sample_bilinear(field, x, y))


def azimuthal_winding(field: TransverseField, radius: float | None = None,
                      samples: int = 720) -> int:
    """Net phase winding (in units of 2*pi) around a circle of given radius.

    Defaults to the extracted ring radius. The winding equals the dominant
    topological charge of a vortex field.
    """
    if radius is None:
        radius = ring_radius(field)
    angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    vals = sample_bilinear(field, radius * np.cos(angles), radius * np.sin(angles))
    if np.any(np.abs(vals) == 0):
        raise DegenerateFieldError("field vanishes on the sampling circle")
    steps = np.angle(np.roll(vals, -1) / vals)
    return int(np.rint(steps.sum() / (2.0 * np.pi)))


def make_hologram(target: ModeSpec, grid: GridSpec, carrier_period: float) -> HologramMask:
    """Phase mask l*phi (+ k_r*r for Bessel targets) on a blazed carrier.

    The carrier runs along x with the given period; the result is wrapped to
    [0, 2*pi) and deterministic for identical inputs.
    """
    if carrier_period < _MIN_CARRIER_PIXELS * grid.pitch:
        raise SamplingError(
            f"carrier period {carrier_period:.3e} m aliases at pitch {grid.pitch:.3e} m"
        )
    x, _, r, phi = grid.coords()
    l = getattr(target, "l", 0)
    phase = l * phi + 2.0 * np.pi * x / carrier_period
    if isinstance(target, BGMode):
        if 2.0 * np.pi / target.k_r < _MIN_BESSEL_PIXELS * grid.pitch:
            raise SamplingError("axicon term aliases on this grid")
        phase = phase + target.k_r * r
    wrapped = np.mod(phase, 2.0 * np.pi)
    wrapped[wrapped >= 2.0 * np.pi] = 0.0  # guard float round-up at the seam
    return HologramMask(grid, wrapped, carrier_period)


def phase_winding(mask: HologramMask, radius_pixels: float = 5.0,
                  samples: int = 720) -> int:
    """Signed count of 2*pi windings of the mask phase around the optical axis.

    A charge-l fork grating shows |l| dislocations with winding sign(l);
    the blazed carrier and any radial term contribute no net winding.
    """
    n, pitch = mask.grid.n, mask.grid.pitch
    field = TransverseField(mask.grid, np.exp(1j * mask.phase))
    return azimuthal_winding(field, radius=radius_pixels * pitch, samples=samples)


def export_mask_image(mask: HologramMask, path: str | Path) -> None:
    """Write the mask as an 8-bit grayscale image, value = round(phase/2pi*255).

    The format follows the suffix: ``.pgm`` (binary P5) or ``.png``.
    Identical masks produce bit-identical files.
    """
    path = Path(path)
    levels = np.round(mask.phase / (2.0 * np.pi) * 255.0).astype(np.uint8)
    if path.suffix.lower() == ".pgm":
        header = f"P5\n{mask.grid.n} {mask.grid.n}\n255\n".encode("ascii")
        path.write_bytes(header + levels.tobytes())
    elif path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(levels, mode="L").save(path)
    else:
        raise ValueError(f"unsupported image suffix: {path.suffix!r}")


_DUMP_HEADER = struct.Struct("<Id4x")  # n: u32, pitch: f64, 4 pad bytes -> 16 bytes


def dump_field(field: TransverseField, path: str | Path) -> None:
    """Binary debug dump: 16-byte header {n: u32, pitch: f64 le}, then
    little-endian float64 interleaved re/im, row-major."""
    buf = np.empty((field.grid.n, field.grid.n, 2), dtype="<f8")
    buf[..., 0] = field.amplitude.real
    buf[..., 1] = field.amplitude.imag
    header = _DUMP_HEADER.pack(field.grid.n, field.grid.pitch)
    Path(path).write_bytes(header + buf.tobytes())


def load_field(path: str | Path, wavelength: float = DEFAULT_WAVELENGTH) -> TransverseField:
    """Read a field written by :func:`dump_field`.

    The dump stores only n and pitch; the wavelength must be supplied.
    """
    raw = Path(path).read_bytes()
    n, pitch = _DUMP_HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<f8", offset=_DUMP_HEADER.size)
    pairs = data.reshape(n, n, 2)
    return TransverseField(GridSpec(n, pitch, wavelength), pairs[..., 0] + 1j * pairs[..., 1])
