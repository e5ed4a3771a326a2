"""Simulator and analysis toolkit for optical memories of perfect Poincare beams."""

from .errors import (
    ConfigError,
    DegenerateFieldError,
    DomainError,
    GridMismatchError,
    InvalidStateError,
    NotOnSphereError,
    PovmemError,
    RegimeViolationError,
    SamplingError,
    SingularFrameError,
)
from .field_core import (
    BGMode,
    GaussianMode,
    GridSpec,
    HologramMask,
    LGMode,
    POVMode,
    TransverseField,
    azimuthal_winding,
    dump_field,
    export_mask_image,
    inner_product,
    load_field,
    make_hologram,
    peak_radius,
    phase_winding,
    ring_radius,
    synthesize,
)
from .fourier_optics import LensSpec, RelaySpec, lens_fourier, relay_4f, validate_pov_analytic
from .measurement_tomo import (
    DensityMatrix,
    InterferenceScan,
    MeasurementSetting,
    estimate_fidelity_from_visibility,
    fidelity,
    interference_scan,
    probabilities,
    project,
    reconstruct,
    tomography_settings,
)
from .storage_channel import (
    ChannelReport,
    ChannelSpec,
    NoiseSpec,
    apply_channel,
    mode_efficiency,
    predict_fidelity,
)
from .vector_state import (
    EncodingCapacity,
    HyopsCoord,
    TwoDofKet,
    VectorBeamField,
    encoding_capacity,
    format_state_descriptor,
    hyops_coord,
    ket_from_hyops,
    make_ppb,
    parse_state_descriptor,
    polarizer_field,
    polarizer_pattern,
)

__version__ = "0.1.0"

__all__ = [
    "BGMode",
    "ChannelReport",
    "ChannelSpec",
    "ConfigError",
    "DegenerateFieldError",
    "DensityMatrix",
    "DomainError",
    "EncodingCapacity",
    "GaussianMode",
    "GridMismatchError",
    "GridSpec",
    "HologramMask",
    "HyopsCoord",
    "InterferenceScan",
    "InvalidStateError",
    "LGMode",
    "LensSpec",
    "MeasurementSetting",
    "NoiseSpec",
    "NotOnSphereError",
    "POVMode",
    "PovmemError",
    "RegimeViolationError",
    "RelaySpec",
    "SamplingError",
    "SingularFrameError",
    "TransverseField",
    "TwoDofKet",
    "VectorBeamField",
    "apply_channel",
    "azimuthal_winding",
    "dump_field",
    "encoding_capacity",
    "estimate_fidelity_from_visibility",
    "export_mask_image",
    "fidelity",
    "format_state_descriptor",
    "hyops_coord",
    "inner_product",
    "interference_scan",
    "ket_from_hyops",
    "lens_fourier",
    "load_field",
    "make_hologram",
    "make_ppb",
    "mode_efficiency",
    "parse_state_descriptor",
    "peak_radius",
    "phase_winding",
    "polarizer_field",
    "polarizer_pattern",
    "predict_fidelity",
    "probabilities",
    "project",
    "reconstruct",
    "relay_4f",
    "ring_radius",
    "synthesize",
    "tomography_settings",
    "validate_pov_analytic",
]
