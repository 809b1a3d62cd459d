"""Exact perfect state transfer and periodicity for continuous-time quantum walks on graphs."""

__version__ = "0.1.0"

from .errors import Graph6Error, InvalidParameter, NotCommuting, PSTKitError, UnsupportedSpectrum
from .graph_core import (Graph, cartesian, cartesian_power, complement, make_named, matching_cover,
                         parse_graph6, read_graph6_file, switching_pair, tensor, write_graph6)
from .qfield import ExactTime, QuadValue, UnitPhase, phase_order
from .spectra import SpectralDecomposition, decompose, strong_cospectral, support
from .pst_core import (PSTCertificate, PSTFailure, PeriodicityCertificate, certify_pst, minimal_period,
                       periodic_at, transfer_phase)
from .product_framework import (BlockDecomposition, FactorRequirement, Violation, necessary_check,
                                simultaneous_decompose, sum_product_unitary)
from .tensor_pst import (TensorPSTReport, YCertificate, cartesian_power_certificate, make_y_certificate,
                         min_cartesian_power, tensor_necessary, tensor_pst_check, tensor_unitary)
from .switching_pst import (SwitchingFailure, SwitchingReport, complement_switching_check,
                            matching_switching_check, switching_blocks, switching_pst_check)
from .walk_oracle import fidelity, scan, unitary, verify_certificate

__all__ = [name for name in dir() if not name.startswith("_")]
