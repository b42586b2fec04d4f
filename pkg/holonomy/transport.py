# holonomy/transport.py
"""Horizontal lifts, surface/volume holonomies, string transport and tangent samples."""
from __future__ import annotations

from holonomy.logic.transport.holonomy import (
    CubeTransport,
    cube_transport,
    surface_holonomy,
    surface_holonomy_local,
    volume_holonomy,
)
from holonomy.logic.transport.horizontality import check_lift_horizontality
from holonomy.logic.transport.lifts import (
    LiftGrid,
    horizontal_lift_path,
    standard_lift_cube,
    standard_lift_square,
    standard_lift_tesseract,
)
from holonomy.logic.transport.strings import StringFiberPoint, act_string, transport_string
from holonomy.logic.transport.tangent import TangentSample, decompose_tangent

__all__ = [
    "LiftGrid",
    "StringFiberPoint",
    "TangentSample",
    "CubeTransport",
    "horizontal_lift_path",
    "standard_lift_square",
    "surface_holonomy",
    "surface_holonomy_local",
    "standard_lift_cube",
    "volume_holonomy",
    "cube_transport",
    "standard_lift_tesseract",
    "transport_string",
    "act_string",
    "decompose_tangent",
    "check_lift_horizontality",
]
