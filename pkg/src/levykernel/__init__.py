"""Numerical toolkit for transition densities of symmetric jump Levy
processes: characteristic exponents, Fourier-inverted densities, certified
two-sided bounds, and regime-partitioned envelope verification."""

from .measures import (
    AtomAngle,
    CustomProfile,
    DoublingReport,
    FiniteJumpMeasure,
    HighIntensity,
    LevyMeasure,
    MeasureError,
    TemperedStable,
    TruncatedStable,
    UniformAngle,
    ball_mass,
    clipped_second_moment,
    doubling_check,
    second_moment,
    split,
    tail_mass,
)

__all__ = [
    "AtomAngle",
    "CustomProfile",
    "DoublingReport",
    "FiniteJumpMeasure",
    "HighIntensity",
    "LevyMeasure",
    "MeasureError",
    "TemperedStable",
    "TruncatedStable",
    "UniformAngle",
    "ball_mass",
    "clipped_second_moment",
    "doubling_check",
    "second_moment",
    "split",
    "tail_mass",
]

__version__ = "0.1.0"
