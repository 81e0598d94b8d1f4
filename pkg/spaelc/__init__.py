"""
spaelc - iterative soft-decision decoding of short binary codes with random
edge local complementation (ELC) of the Tanner graph.

Codes (QR/EQR, alist files, weight-reduced parity-check matrices), the ELC
machinery (orbits, canonical forms), automorphism-group sampling, SPA,
SPA-PD and SPA-ELC decoders, and a Monte Carlo FER harness.
"""

__version__ = "0.1.0"

from .codes import CodeSpec, eqr_code, load_alist, qr_code, reduce_weight, save_alist
from .core import Experiment
from .decode import DecodeParams, DecodeResult, decode, spa, spa_elc, spa_pd
from .errors import SpaelcError
from .gf2 import BinMatrix
from .sim import FerPoint, SimConfig, run_curve, run_point, sweep_p
from .tanner import TannerGraph, canonical_form, labeled_orbit_size, s_orbit

__all__ = [
    "BinMatrix",
    "CodeSpec",
    "DecodeParams",
    "DecodeResult",
    "Experiment",
    "FerPoint",
    "SimConfig",
    "SpaelcError",
    "TannerGraph",
    "canonical_form",
    "decode",
    "eqr_code",
    "labeled_orbit_size",
    "load_alist",
    "qr_code",
    "reduce_weight",
    "run_curve",
    "run_point",
    "s_orbit",
    "save_alist",
    "spa",
    "spa_elc",
    "spa_pd",
    "sweep_p",
]
