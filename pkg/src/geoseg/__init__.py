"""geoseg: interactive geodesic image segmentation.

Closed contours are extracted as concatenations of globally optimal
geodesic paths under Finsler metrics that encode region homogeneity,
edge anisotropy/asymmetry and optional curvature regularization, solved
by constrained fast marching on 2D and orientation-lifted grids.
"""

from ._kernels import NUMBA_ENABLED
from .imagecore import (GridGeometry, Image, OrientedGridGeometry,
                        gaussian_smooth, load_image, load_mask, save_contour,
                        save_mask)
from .metrics import (MetricField, asym_quadratic_metric, compose_qz,
                      curvature_metric, isotropic_metric, riemannian_metric,
                      vcgeo_metric)
from .eikonal import (ConstraintSet, DistanceMap, GeodesicPath, backtrack,
                      dijkstra_oracle, path_cost, solve)
from .dualcut import DualCutConfig, SegmentationResult, segment, vcgeo_segment
from .evaluate import jaccard, synth_image

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED", "GridGeometry", "Image", "OrientedGridGeometry",
    "gaussian_smooth", "load_image", "load_mask", "save_contour", "save_mask",
    "MetricField", "asym_quadratic_metric", "compose_qz", "curvature_metric",
    "isotropic_metric", "riemannian_metric", "vcgeo_metric",
    "ConstraintSet", "DistanceMap", "GeodesicPath", "backtrack",
    "dijkstra_oracle", "path_cost", "solve",
    "DualCutConfig", "SegmentationResult", "segment", "vcgeo_segment",
    "jaccard", "synth_image",
    "__version__",
]
