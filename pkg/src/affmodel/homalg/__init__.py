"""Exact linear homological algebra over QQ or GF(p)."""

from .cech import (
    CoverCohomologyData,
    CoverData,
    IncompatibleRestrictions,
    TwoCoverComplexes,
    cech_cohomology,
    cech_complex,
    cohomology_data,
    mayer_vietoris,
    mayer_vietoris_split,
    ordered_cech_complex,
    random_cover_data,
    random_two_cover,
    total_complex,
    two_cover_pipeline,
)
from .complexes import (
    CochainComplex,
    ComplexError,
    FilteredCochainComplex,
    FiltrationError,
    GradedVectorSpace,
    SpectralSequence,
    SpectralSequencePage,
    cohomology,
    graded_cohomology,
    random_filtered_complex,
    spectral_sequence,
)
from .simplicial import (
    FiniteSimplicialComplex,
    NotSimplicial,
    SimplicialMap,
    cellular_check,
    cochain_complex,
    simplicial_cohomology,
    skeletal_filtration_ss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
