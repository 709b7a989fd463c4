"""Shared fixtures: ground-state solves are cached per session.

Domain sizes track the profile width 1/sqrt(|E|), which varies by three
orders of magnitude across the (q, d) test matrix.
"""

import warnings

import pytest

from eigstab.grid import Grid
from eigstab.groundstate import solve_ground_state


def solve_quiet(q, d, extent, n):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_ground_state(q, d, Grid.radial(d, extent, n))


@pytest.fixture(scope="session")
def gs_q4_d1():
    return solve_quiet(4.0, 1, 20.0, 4000)


@pytest.fixture(scope="session")
def gs_q4_d1_wide():
    # sup-norm comparisons against the closed form need the boundary
    # truncation (~ 2 A e^(-kappa L)) below 1e-6, hence the larger box
    return solve_quiet(4.0, 1, 30.0, 6000)


@pytest.fixture(scope="session")
def gs_q3_d1():
    return solve_quiet(3.0, 1, 20.0, 4000)


@pytest.fixture(scope="session")
def gs_q4_d3():
    return solve_quiet(4.0, 3, 1500.0, 6000)


@pytest.fixture(scope="session")
def gs_q103_d3():
    return solve_quiet(10.0 / 3.0, 3, 250.0, 4000)


@pytest.fixture(scope="session")
def line_grid():
    return Grid.line(20.0, 4000)
