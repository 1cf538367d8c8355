"""Fixed-to-fixed-length amplitude shapers for probabilistic amplitude shaping."""

from .combinatorics import (
    Alphabet,
    CoefficientLUT,
    binom,
    build_mr_lut,
    build_sr_lut,
    composition_energy,
    enumerate_compositions,
    lut_lookup,
    multinom,
)
from .errors import (
    CodebookError,
    CompositionMismatchError,
    DecodeIntegrityError,
    DegenerateShaperError,
    LUTMiss,
    RateInfeasibleError,
    ShapingError,
)
from .ranking import (
    Engine,
    ccdm_payload_bits,
    mr_demap,
    mr_map,
    pa_demap,
    pa_map,
    sr_rank,
    sr_unrank,
)
from .shapers import (
    Scheme,
    ShaperCodebook,
    build_ccdm,
    build_hcss,
    build_mpdm,
    codebook_average_pmf,
    deshape,
    shape,
)

__version__ = "0.1.0"
