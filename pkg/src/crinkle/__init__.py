"""Heavy-tailed random walks in high dimension and their crinkled-subordinator limits."""
from __future__ import annotations

__version__ = "0.1.0"

from .levy_core import (  # noqa: E402
    CrinkledRange,
    CustomTail,
    JumpSet,
    LevyMeasure,
    StablePower,
    epsilon_net,
    hull_vertex_mask,
    range_distance,
    range_distance_matrix,
    range_points,
    sample_jumps,
    sample_subordinator_values,
    subordinator_value,
)
from .metric import (  # noqa: E402
    Correspondence,
    FiniteMetricSpace,
    FinitePointSet,
    correspondence_distortion,
    d_iso_upper,
    diameter,
    distance_matrix,
    gh_exact_small,
    hausdorff,
    match_increments,
    wiener_distance_bound,
    wiener_point,
    wiener_tail_bound,
)
from .streams import seed_stream  # noqa: E402
from .walks import Family, WalkConfig, WalkPath, simulate_walk, truncate_steps  # noqa: E402
