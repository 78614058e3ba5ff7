import numpy as np
import pytest

from ernwave.evolution import GridSpec, InitialDataSpec, evolve
from ernwave.nonlinearity import Kind, NonlinearitySpec
from ernwave.spacetime import SpacetimeParams

EXTREMAL = SpacetimeParams(mass=1.0, charge=1.0)


@pytest.fixture(scope="session")
def lin_run():
    """Linear (Zero kind) reference run with slice probes, reused by the
    diagnostics and horizon tests."""
    g = GridSpec.for_domain(EXTREMAL, 4.0, 8.0, 0.01, 0.01)
    d = InitialDataSpec(0.1, g.u_extent - 0.25, 0.5, horizon_positive=True)
    return evolve(EXTREMAL, g, d, NonlinearitySpec(), probes=[1.0, 2.0, 3.0],
                  r_split=2.0)


@pytest.fixture(scope="session")
def null_run():
    """Small null-form run with sources, for the nonlinearity norms."""
    g = GridSpec.for_domain(EXTREMAL, 3.0, 4.0, 0.02, 0.02)
    d = InitialDataSpec(0.1, 1.0, 0.5)
    return evolve(EXTREMAL, g, d, NonlinearitySpec(kind=Kind.NULL_FORM),
                  probes=[1.0, 2.0], r_split=2.0)
