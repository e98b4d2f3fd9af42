import numpy as np
import pytest

from lgp.boundary import (
    BoundaryFunction,
    clamped_linear_trace,
    constant_trace,
)
from lgp.geometry import Annulus, ConvexBoundary


@pytest.fixture(scope="session")
def unit_two_annulus():
    """Concentric circles of radii 1 and 2 sampled at 4096 vertices."""
    outer = ConvexBoundary.circle((0.0, 0.0), 2.0, 4096, "outer")
    inner = ConvexBoundary.circle((0.0, 0.0), 1.0, 4096, "inner")
    return Annulus(outer=outer, inner=inner)


def concentric_ramp_data(annulus):
    """Ramp from 0 to 1 across |y| bands on both circles; flat caps above and below.

    Outer: ramp over y in [-1, 1]; inner: ramp over y in [-1/2, 1/2].
    """
    return BoundaryFunction(
        outer=clamped_linear_trace(annulus.outer, "y", (-1.0, 1.0), (0.0, 1.0)),
        inner=clamped_linear_trace(annulus.inner, "y", (-0.5, 0.5), (0.0, 1.0)),
    )


def tangent_ramp_data(annulus):
    """Outer trace clamp(y, -1, 1); inner trace y itself (no flat parts)."""
    return BoundaryFunction(
        outer=clamped_linear_trace(annulus.outer, "y", (-1.0, 1.0), (-1.0, 1.0)),
        inner=clamped_linear_trace(annulus.inner, "y", (-1.0, 1.0), (-1.0, 1.0)),
    )


def constant_data(annulus, c_outer=0.0, c_inner=None):
    c_inner = c_outer if c_inner is None else c_inner
    return BoundaryFunction(
        outer=constant_trace(annulus.outer, c_outer),
        inner=constant_trace(annulus.inner, c_inner),
    )


@pytest.fixture(scope="session")
def concentric_ramp(unit_two_annulus):
    return concentric_ramp_data(unit_two_annulus)


@pytest.fixture(scope="session")
def tangent_ramp(unit_two_annulus):
    return tangent_ramp_data(unit_two_annulus)
