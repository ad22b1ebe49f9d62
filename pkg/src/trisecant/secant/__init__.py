"""Residual evaluators for the flex, tangent, trisecant and quadrisecant
conditions, the flex dynamics of a moving zero and the Calogero-Moser
isospectrality check."""

from .bdhe import bdhe_residual
from .calogero import cm_acceleration, cm_integrate, cm_isospectrality, cm_lax, cm_spectral, default_z_samples
from .data import CMState, FlexData, PrymQuadData, TangentData, TrisecantData, cjson, cload
from .dynamics import (
    LaurentData,
    MotionData,
    flex_dynamics,
    laurent_vw,
    laurent_wave_step,
    tau_cm,
    tau_from_flex,
    track_zero,
)
from .fixtures import (
    bdhe_fixture,
    fay_triple,
    lame_flex_fixture,
    prym_g1_fixture,
    tangent_fixture,
    trisecant_fixture,
)
from .flex import flex_A_residual, flex_B_residual, flex_C_residual
from .prym import (
    prym_A_residual,
    prym_B_residual,
    prym_C_residual,
    prym_five_term_residual,
    prym_quad_identity,
    prym_quad_residuals,
)
from .report import Accumulator, ResidualReport
from .tangent import tangent_A_residual, tangent_B_residual, tangent_C_residual
from .trisecant import trisecant_A_residual, trisecant_B_residual, trisecant_C_residual, trisecant_points

__all__ = [
    "Accumulator", "ResidualReport",
    "FlexData", "TangentData", "TrisecantData", "PrymQuadData", "CMState", "cjson", "cload",
    "flex_A_residual", "flex_B_residual", "flex_C_residual",
    "tangent_A_residual", "tangent_B_residual", "tangent_C_residual",
    "trisecant_A_residual", "trisecant_B_residual", "trisecant_C_residual", "trisecant_points",
    "bdhe_residual",
    "prym_A_residual", "prym_B_residual", "prym_C_residual", "prym_five_term_residual",
    "prym_quad_identity", "prym_quad_residuals",
    "flex_dynamics", "laurent_vw", "track_zero", "tau_from_flex", "tau_cm",
    "LaurentData", "MotionData", "laurent_wave_step",
    "cm_lax", "cm_spectral", "cm_acceleration", "cm_integrate", "cm_isospectrality", "default_z_samples",
    "lame_flex_fixture", "tangent_fixture", "trisecant_fixture", "fay_triple", "bdhe_fixture",
    "prym_g1_fixture",
]
