"""Shared fixtures and independent finite-difference helpers.

The FD helpers here are deliberately local to the test suite so analytic
code is always checked against an implementation it does not share.
"""

from __future__ import annotations

import numpy as np
import pytest


def fd_gradient(fn, x, h=1e-5):
    """Central-difference gradient of a vector-valued function."""
    x = np.asarray(x, dtype=float)
    cols = []
    for d in range(x.size):
        step = np.zeros_like(x)
        step[d] = h
        cols.append((np.asarray(fn(x + step)) - np.asarray(fn(x - step))) / (2 * h))
    return np.stack(cols, axis=-1)


def fd_hessian(fn, x, h=1e-5):
    """Central four-point cross differences of a vector-valued function."""
    x = np.asarray(x, dtype=float)
    p = x.size
    base = np.asarray(fn(x), dtype=float)
    out = np.zeros(base.shape + (p, p))
    for d in range(p):
        for e in range(p):
            sd = np.zeros_like(x)
            se = np.zeros_like(x)
            sd[d] = h
            se[e] = h
            out[..., d, e] = (
                np.asarray(fn(x + sd + se))
                - np.asarray(fn(x + sd - se))
                - np.asarray(fn(x - sd + se))
                + np.asarray(fn(x - sd - se))
            ) / (4 * h * h)
    return out


def block_error(analytic, reference):
    """Max absolute deviation over the block, relative to its largest entry."""
    analytic = np.asarray(analytic, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = max(float(np.max(np.abs(reference))), 1e-12)
    return float(np.max(np.abs(analytic - reference))) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
