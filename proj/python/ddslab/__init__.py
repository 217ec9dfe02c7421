"""Double Dirichlet series experiments over Q."""

from ._ddslab import (
    DdslabError,
    __version__,
    box_covered,
    chi,
    cli,
    criterion_count,
    eta,
    exp_meansquare,
    exp_nonvanishing,
    gl1_value,
    group_elements,
    group_order,
    kronecker,
    moebius,
    rr_from_coefficient,
    rr_monotone,
    run_criterion,
    z_pure,
)

__all__ = [
    "DdslabError",
    "__version__",
    "box_covered",
    "chi",
    "cli",
    "criterion_count",
    "eta",
    "exp_meansquare",
    "exp_nonvanishing",
    "gl1_value",
    "group_elements",
    "group_order",
    "kronecker",
    "moebius",
    "rr_from_coefficient",
    "rr_monotone",
    "run_criterion",
    "z_pure",
]
