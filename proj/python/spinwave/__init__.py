"""Two-spinor identity verification and FRW mode solver."""

from fractions import Fraction

from ._spinwave import (
    DATA_DIR,
    ScaleFactorModel,
    SpinwaveError,
    bivector_from_spinors,
    canonicalize,
    hodge_dual,
    integrate_mode,
    run_cli,
    spectrum_csv,
    spinors_from_bivector,
    stress_energy,
    verify_file,
    verify_identity,
)
from ._spinwave import weight_of as _weight_of


def weight_of(expr: str) -> tuple[Fraction, Fraction]:
    """(weight, antiweight) of an index expression."""
    (wn, wd), (an, ad) = _weight_of(expr)
    return Fraction(wn, wd), Fraction(an, ad)


__all__ = [
    "DATA_DIR",
    "ScaleFactorModel",
    "SpinwaveError",
    "bivector_from_spinors",
    "canonicalize",
    "hodge_dual",
    "integrate_mode",
    "run_cli",
    "spectrum_csv",
    "spinors_from_bivector",
    "stress_energy",
    "verify_file",
    "verify_identity",
    "weight_of",
]
