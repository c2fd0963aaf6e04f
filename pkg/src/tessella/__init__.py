"""Substitution tilings with exact arithmetic.

Inflation rules, exact patch generation, substitution-matrix analysis of
tile orientations, and finite probes of the tiling space.
"""

from .errors import *  # noqa: F401,F403
from .rules import (InflationRule, Prototile, Child, builtin, validate_rule, parse_rule,
                    load_rule, serialize, dumps)
from .engine import Patch, Tile, iterate, inflate_patch, boundary_ratio, support_polygon
from .analysis import (substitution_matrix, twisted_matrix, spectral_radius, check_hypotheses,
                       weyl_sum, frequency_convergence, is_rational_multiple_of_pi)
from .space import (CenteredPatch, centered, patch_distance, congruent_subpatch,
                    adjacency_census)
from .render import RenderSpec, render_svg

__version__ = "0.1.0"
