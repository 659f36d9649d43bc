"""Matrix-weighted dyadic sequence spaces and almost-diagonal operators."""

from ._adseq import (
    DyadicCube,
    Window,
    admissible,
    apply_bdef,
    bdef_entry,
    classify,
    cube_at,
    distance_factor,
    growth_run,
    norm,
    reducing_power_closed_form,
    rho_q,
    series_probe,
)

__all__ = [
    "DyadicCube",
    "Window",
    "admissible",
    "apply_bdef",
    "bdef_entry",
    "classify",
    "cube_at",
    "distance_factor",
    "growth_run",
    "norm",
    "reducing_power_closed_form",
    "rho_q",
    "series_probe",
]
