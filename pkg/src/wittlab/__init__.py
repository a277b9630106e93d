"""Exact quadratic-form computations over iterated Laurent-series towers."""

from .errors import InvariantViolation, ResourceError, ValidationError, WittlabError
from .expr import FormParseError, parse_form
from .forms import Form, PfisterSpec, det, disc, hyperbolic, lift, negate, perp, pfister, residue_split, scale, tensor
from .ideals import (
    divides,
    enumerate_pfister,
    find_link,
    in_In,
    is_gp_n,
    linkage_number,
    pfister_decomposition,
    pfister_number,
)
from .squareclass import (
    FieldTower,
    SquareClass,
    class_of_minus_one,
    enumerate_classes,
    lift_class,
    mul,
    parse_class,
    parse_field,
    split_class,
)
from .structure import (
    CampaignReport,
    GAClassification,
    congruent_mod_In,
    ga_classify,
    ga_up_witness,
    going_down_check,
    is_generalised_albert,
    make_albert_factor,
    sim_campaign,
    twisted_pfister_detect,
)
from .witt import (
    WittClass,
    anisotropic_part,
    diman,
    is_hyperbolic,
    is_isotropic,
    is_subform,
    isometric,
    represents,
    similar,
    witt_equal,
    witt_index,
)

__version__ = "0.1.0"
