"""Shared test fixtures and high-precision oracles."""

import sys
from pathlib import Path

# Allow running pytest from a fresh checkout without installing the package.
try:
    import rbkernel  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import mpmath as mp
import pytest

mp.mp.dps = 40


def mp_regular(m, r):
    """Oracle u_m(r) = r j_m(r) through mpmath's half-integer Bessel J."""
    r = mp.mpf(r)
    return r * mp.sqrt(mp.pi / (2 * r)) * mp.besselj(m + mp.mpf("0.5"), r)


def mp_irregular(m, r):
    """Oracle v_m(r) = r y_m(r) through mpmath's half-integer Bessel Y."""
    r = mp.mpf(r)
    return r * mp.sqrt(mp.pi / (2 * r)) * mp.bessely(m + mp.mpf("0.5"), r)


def mp_p(r):
    """Oracle for the closed form of p at 40 digits."""
    r = mp.mpf(r)
    return 1 - (3 + 3 * mp.cos(r) ** 2) / r**2 + 3 * mp.sin(2 * r) / r**3


@pytest.fixture(scope="session")
def reference_spec():
    from rbkernel import reference_spec

    return reference_spec()


@pytest.fixture(scope="session")
def root_r():
    """The first positive root of p, found once per session."""
    from rbkernel import find_root

    return find_root(2.0, 2.5, tol=1e-12).root
