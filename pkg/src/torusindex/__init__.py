"""Invariant indices from torus fixed-point data by localization and torus averaging."""

from .algebra import LaurentPoly, LaurentRational, NotPolynomial, polynomialize, reduce, sum_rational
from .averaging import (
    Chamber,
    ChamberError,
    IndexReport,
    SingularityNotCancelled,
    av_exact,
    av_numeric,
    ball_average,
    chamber_validate,
    default_chamber,
    index_compute,
    renormalized_class,
)
from .characteristic import OperatorKind, ahat_genus, dirac_factor, euler_form, l_genus, sign_factor
from .datasets import BUILTINS, builtin_datasets
from .localization import (
    AuxLine,
    Dataset,
    DatasetError,
    FixedComponent,
    NormalLine,
    dataset_validate,
    load_dataset,
)
from .series import TruncatedSeries, ts_exp, ts_inverse, ts_mul, ts_sqrt

__all__ = [
    "AuxLine", "BUILTINS", "Chamber", "ChamberError", "Dataset", "DatasetError", "FixedComponent",
    "IndexReport", "LaurentPoly", "LaurentRational", "NormalLine", "NotPolynomial", "OperatorKind",
    "SingularityNotCancelled", "TruncatedSeries", "ahat_genus", "av_exact", "av_numeric",
    "ball_average", "builtin_datasets", "chamber_validate", "dataset_validate", "default_chamber",
    "dirac_factor", "euler_form", "index_compute", "l_genus", "load_dataset", "polynomialize",
    "reduce", "renormalized_class", "sign_factor", "sum_rational", "ts_exp", "ts_inverse", "ts_mul",
    "ts_sqrt",
]
