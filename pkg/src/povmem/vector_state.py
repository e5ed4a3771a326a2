"""Polarization x orbital-angular-momentum beam states.

A vector vortex state lives in the two-qubit space spanned by
{H, V} x {L1, L2}, where L1 and L2 are the topological charges of the two
ring modes riding on the horizontal and vertical polarization components.
The abstract ket and its sampled field realization are kept as a linked
pair: channel and measurement physics act on kets, while the fields back the
mode-size-independence claims. Basis order is [H.L1, H.L2, V.L1, V.L2].
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NotOnSphereError
from .field_core import GridSpec, POVMode, TransverseField, sample_bilinear, synthesize

DEFAULT_L_BOUND = 5
_CROSS_TERM_TOL = 1e-9


@dataclass(frozen=True)
class TwoDofKet:
    """Normalized ket over {H, V} x {L1, L2} with integer mode labels.

    ``degenerate=True`` flags states with L1 == L2, for which the two mode
    labels coincide and only the polarization qubit is physical.
    """

    amplitudes: np.ndarray
    l1: int
    l2: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (4,):
            raise ValueError("amplitudes must be a length-4 vector")
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm < 1e-12:
            raise ValueError("ket has zero or non-finite norm")
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"ket must be normalized, |psi| = {norm}")
        amps = amps / norm
        # global phase convention: first nonzero amplitude real nonnegative
        for c in amps:
            if abs(c) > 1e-12:
                amps = amps * (np.conj(c) / abs(c))
                break
        if self.l1 == self.l2 and not self.degenerate:
            raise ValueError("L1 == L2 requires the degenerate flag")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def create(cls, amplitudes, l1: int, l2: int, *,
               l_bound: int | None = DEFAULT_L_BOUND) -> "TwoDofKet":
        """Build a ket, normalizing the amplitudes and enforcing the label policy."""
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if not norm > 0:
            raise ValueError("ket has zero norm")
        if l_bound is not None and (abs(l1) > l_bound or abs(l2) > l_bound):
            raise ValueError(f"mode labels must lie in [-{l_bound}, {l_bound}]")
        return cls(amps / norm, l1, l2, degenerate=(l1 == l2))

    @property
    def c_hl1(self) -> complex:
        return complex(self.amplitudes[0])

    @property
    def c_hl2(self) -> complex:
        return complex(self.amplitudes[1])

    @property
    def c_vl1(self) -> complex:
        return complex(self.amplitudes[2])

    @property
    def c_vl2(self) -> complex:
        return complex(self.amplitudes[3])

    def projector(self) -> np.ndarray:
        """Rank-one projector |psi><psi| as a plain 4x4 array."""
        return np.outer(self.amplitudes, np.conj(self.amplitudes))


@dataclass(frozen=True)
class VectorBeamField:
    """Sampled H and V field components on a shared grid."""

    e_h: TransverseField
    e_v: TransverseField

    def __post_init__(self) -> None:
        if self.e_h.grid != self.e_v.grid:
            raise ValueError("H and V components must share a grid")
        if not self.e_h.power() + self.e_v.power() > 0:
            raise ValueError("vector field carries no power")

    @property
    def grid(self) -> GridSpec:
        return self.e_h.grid


class HyopsCoord(NamedTuple):
    """Point on the hybrid-order sphere whose poles are |H,L1> and |V,L2>."""

    theta: float
    phi: float
    l1: int
    l2: int


class EncodingCapacity(NamedTuple):
    conventional: int
    perfect: int


def make_ppb(l1: int, l2: int, theta: float, r_r: float, w0: float,
             grid: GridSpec, *, l_bound: int | None = DEFAULT_L_BOUND
             ) -> tuple[TwoDofKet, VectorBeamField]:
    """Construct the ring-mode vector state (|H,L1> + e^{i theta}|V,L2>)/sqrt(2).

    The field realization places equal power in the two arms: the H component
    carries the charge-L1 ring and the V component e^{i theta} times the
    charge-L2 ring, both with radius r_r and thickness w0.
    """
    ket = TwoDofKet.create(
        [1.0, 0.0, 0.0, np.exp(1j * theta)], l1, l2, l_bound=l_bound
    )
    mode_h = synthesize(POVMode(l1, r_r, w0), grid)
    mode_v = synthesize(POVMode(l2, r_r, w0), grid)
    e_h = TransverseField(grid, mode_h.amplitude / np.sqrt(2.0))
    e_v = TransverseField(grid, np.exp(1j * theta) * mode_v.amplitude / np.sqrt(2.0))
    return ket, VectorBeamField(e_h, e_v)


def polarizer_field(field: VectorBeamField, polarizer_angle: float) -> TransverseField:
    """Complex field transmitted by a linear polarizer at the given angle."""
    beta = float(polarizer_angle)
    amp = np.cos(beta) * field.e_h.amplitude + np.sin(beta) * field.e_v.amplitude
    return TransverseField(field.grid, amp)


def polarizer_pattern(field: VectorBeamField, polarizer_angle: float) -> np.ndarray:
    """Intensity pattern behind a linear polarizer.

    For a two-charge ring state at 45 degrees the azimuthal profile follows
    1 + cos((L2-L1)*phi + theta), i.e. |L2-L1| petals around the ring.
    """
    return polarizer_field(field, polarizer_angle).intensity()


def count_petals(grid: GridSpec, intensity: np.ndarray, radius: float,
                 samples: int = 2048) -> int:
    """Count azimuthal intensity maxima on a circle of the given radius.

    The count is the dominant azimuthal harmonic of the sampled profile,
    which is robust against interpolation wiggle; profiles whose modulation
    is below 20% of the mean count as unpetalled.
    """
    field = TransverseField(grid, np.sqrt(np.clip(intensity, 0.0, None)))
    angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    ring = np.abs(sample_bilinear(field, radius * np.cos(angles),
                                  radius * np.sin(angles))) ** 2
    mean = ring.mean()
    if not mean > 0:
        return 0
    spectrum = np.abs(np.fft.rfft(ring)) / samples
    spectrum[0] = 0.0
    harmonic = int(np.argmax(spectrum))
    if spectrum[harmonic] < 0.1 * mean:  # full-contrast petals reach 0.5
        return 0
    return harmonic


def hyops_coord(ket: TwoDofKet) -> HyopsCoord:
    """Sphere coordinates of a separable state c_H|H,L1> + c_V|V,L2>.

    Theta = 2*atan2(|c_V|, |c_H|) runs from the |H,L1> pole (0) to the
    |V,L2> pole (pi); Phi is the relative phase arg(c_V) - arg(c_H) mod 2*pi.
    """
    cross = max(abs(ket.c_hl2), abs(ket.c_vl1))
    if cross > _CROSS_TERM_TOL:
        raise NotOnSphereError(
            f"cross terms of magnitude {cross:.2e} exceed {_CROSS_TERM_TOL}"
        )
    c_h, c_v = ket.c_hl1, ket.c_vl2
    theta = 2.0 * np.arctan2(abs(c_v), abs(c_h))
    if abs(c_h) < 1e-12 or abs(c_v) < 1e-12:
        phi = 0.0  # poles: azimuth undefined, fixed by convention
    else:
        phi = float(np.mod(np.angle(c_v) - np.angle(c_h), 2.0 * np.pi))
    return HyopsCoord(float(theta), phi, ket.l1, ket.l2)


def ket_from_hyops(coord: HyopsCoord, *,
                   l_bound: int | None = DEFAULT_L_BOUND) -> TwoDofKet:
    """Inverse of :func:`hyops_coord`."""
    if not 0.0 <= coord.theta <= np.pi:
        raise DomainError("theta must lie in [0, pi]")
    c_h = np.cos(coord.theta / 2.0)
    c_v = np.sin(coord.theta / 2.0) * np.exp(1j * coord.phi)
    return TwoDofKet.create([c_h, 0.0, 0.0, c_v], coord.l1, coord.l2, l_bound=l_bound)


def encoding_capacity(d: int) -> EncodingCapacity:
    """Number of encodable states given d storable orthogonal vortex modes.

    Symmetric +/-l pairing allows 2d-1 states; charge-independent ring modes
    lift the pairing constraint and allow all d^2 label combinations.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    return EncodingCapacity(conventional=2 * d - 1, perfect=d * d)


_DESCRIPTOR_RE = re.compile(
    r"^\s*PPB\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+(?:\.\d+)?)\s*\)\s*$"
)


def parse_state_descriptor(text: str) -> tuple[int, int, float]:
    """Parse ``PPB(L1,L2,theta_deg)`` into (l1, l2, theta_radians)."""
    m = _DESCRIPTOR_RE.match(text)
    if m is None:
        raise ValueError(f"malformed state descriptor: {text!r}")
    l1, l2 = int(m.group(1)), int(m.group(2))
    theta = float(np.deg2rad(float(m.group(3))))
    return l1, l2, theta


def format_state_descriptor(l1: int, l2: int, theta: float) -> str:
    """Inverse of :func:`parse_state_descriptor`; theta given in radians."""
    deg = float(np.rad2deg(theta)) % 360.0
    return f"PPB({l1},{l2},{deg:g})"
