"""Exact computations with stacky CDGAs: CDGAs, denormalisation, étale checks, MC data and totalisations."""

__version__ = "0.1.0"

from .algebra import Element, GeneratorSpec, Presentation, Truth, format_element, is_unit, parse_element
from .cdga import (
    CDGA,
    FreeDGModule,
    MorphismPresentation,
    check_d_squared,
    cohomology_dim,
    cohomology_dims,
    kahler,
    structure_map,
)
from .constructions import ActionData, AffineData, LieAlgebraData, ce_flatness_equivalence, chevalley_eilenberg, de_rham
from .errors import CDGAError, ParseError, ValidationError
from .etale import acyclicity, check_etale, check_geometric, classify_extension
from .mcgauge import GaugeElement, MatrixLieData, gauge_transform, mc_check, point_check
from .report import Verdict, VerificationReport
from .totalization import ChainCochainComplex, hat_tot, internal_hom, tangent_base_change, tangent_complex
