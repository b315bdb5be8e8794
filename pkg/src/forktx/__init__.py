"""Phase-coherent transport through a Y-shaped normal/superconducting fork."""

__version__ = "0.1.0"

from .andreev import AndreevModel, andreev_amplitude, andreev_matrix
from .braess import braess_scan, transmission_classical, transmission_quantum
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    ForktxError,
    SingularLoopError,
    SingularMatrixError,
)
from .transport import (
    DeviceConfig,
    ReflectionResult,
    SpectrumResult,
    btk_reference,
    classical_kernel,
    conductance_kernel,
    reflection_amplitudes,
    spectrum,
)
from .vertex import LeadBlocks, VertexParams, hole_vertex, lead_blocks, star_vertex
