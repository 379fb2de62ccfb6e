"""Vector-valued Fourier analysis on {-1,1}^n and Pisier-type constants."""
from .cube import (
    BiCubeFunction,
    CoordSet,
    CubeFunction,
    CubePoint,
    SizingError,
    cube_mean,
    inverse_walsh,
    walsh_transform,
    walsh_value,
)
from .spaces import NormedSpace, l1cube, lp_bicube_norm, lp_cube_norm, lr, parse_space, space_norm

__version__ = "0.1.0"

__all__ = [
    "BiCubeFunction",
    "CoordSet",
    "CubeFunction",
    "CubePoint",
    "NormedSpace",
    "SizingError",
    "cube_mean",
    "inverse_walsh",
    "l1cube",
    "lp_bicube_norm",
    "lp_cube_norm",
    "lr",
    "parse_space",
    "space_norm",
    "walsh_transform",
    "walsh_value",
]
