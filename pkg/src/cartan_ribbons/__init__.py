"""Developable Cartan ribbons on parametric surfaces."""
from .errors import RibbonError
from .surface import ParametricSurface, builtin_surface, gauss_curvature, unit_normal
from .curves import CurveOnSurface, DarbouxSample, darboux_frame, frame_matrix, sample_curve
from .development import PlanarCurve, develop_curve, developed_curvature, parallel_transport_check
from .ribbon import (PlanarRibbon, Ribbon, build_ribbon, develop_ribbon, flatness_residual,
                     ruling_direction, striction_curve)

__version__ = "0.1.0"
