"""Linear spline index regression.

Thin python surface over the C++ core: penalized convolution-smoothed
fitting with data-driven knot count, sandwich inference, and the
multiplier-bootstrap test for knot existence.
"""

from _lsir import (  # noqa: F401
    __version__,
    fit,
    fit_at,
    fit_null,
    fit_oracle,
    gen_case,
    hinge,
    pen_value,
    predict,
    prox,
    qn,
    qn_dx,
    qn_dxx,
    soft_threshold,
    test_knots,
)

__all__ = [
    "fit",
    "fit_at",
    "fit_null",
    "fit_oracle",
    "gen_case",
    "hinge",
    "pen_value",
    "predict",
    "prox",
    "qn",
    "qn_dx",
    "qn_dxx",
    "soft_threshold",
    "test_knots",
]
