"""Optical tomography of one- and two-mode bosonic states under nonlinear dynamics."""

from .fock import (
    FockState1,
    FockState2,
    StateSpec,
    fidelity,
    hermite_functions,
    make_cs,
    make_fock,
    make_pacs,
    make_tcs,
    product_state,
)
from .tomography import (
    NormalizationDriftError,
    ThetaGrid,
    Tomogram1,
    Tomogram2Section,
    XGrid,
    reduced_tomogram,
    tomogram_single,
    tomogram_two_section,
)

__version__ = "0.1.0"

__all__ = [
    "FockState1", "FockState2", "StateSpec", "fidelity", "hermite_functions", "make_cs",
    "make_fock", "make_pacs", "make_tcs", "product_state", "NormalizationDriftError",
    "ThetaGrid", "Tomogram1", "Tomogram2Section", "XGrid", "reduced_tomogram",
    "tomogram_single", "tomogram_two_section",
]
