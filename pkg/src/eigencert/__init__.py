"""Certified perturbation data for simple isolated eigenvalues of dense matrices."""

__version__ = "0.1.0"

from .numkernel import NormKind, eig_all, op_norm, restricted_op_norm, solve, vec_norm  # noqa: E402
from .eigendata import (  # noqa: E402
    EigenTriple,
    Selector,
    SpectralData,
    analyze,
    duality_pair,
    extract_triple,
    spectral_data,
)
from .envelopes import (  # noqa: E402
    BaseCertificate,
    base_certificate,
    k_bounds,
    r_bounds,
    tau_gamma_envelope,
    taylor_enclosure,
)
from .gaps import check_gap_c1, gap_radius_short, gap_radius_theoremC, rho_root  # noqa: E402
from .certify import CampaignConfig, perron_certificate  # noqa: E402

__all__ = [
    "NormKind", "eig_all", "op_norm", "restricted_op_norm", "solve", "vec_norm",
    "EigenTriple", "Selector", "SpectralData", "analyze", "duality_pair", "extract_triple",
    "spectral_data", "BaseCertificate", "base_certificate", "k_bounds", "r_bounds",
    "tau_gamma_envelope", "taylor_enclosure", "check_gap_c1", "gap_radius_short",
    "gap_radius_theoremC", "rho_root", "CampaignConfig", "perron_certificate",
]
