"""Shared test oracles: high-order finite-difference stencils and random
sphere sampling, independent of the library's own differentiation paths."""

import numpy as np

# 6th-order central stencils
_D1_OFFSETS = np.array([-3, -2, -1, 0, 1, 2, 3])
_D1_WEIGHTS = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60])
_D2_WEIGHTS = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])


def fd6_first(f, t, h=1e-3):
    vals = np.array([np.asarray(f(t + k * h), dtype=float) for k in _D1_OFFSETS])
    return np.tensordot(_D1_WEIGHTS, vals, axes=1) / h


def fd6_second(f, t, h=1e-3):
    vals = np.array([np.asarray(f(t + k * h), dtype=float) for k in _D1_OFFSETS])
    return np.tensordot(_D2_WEIGHTS, vals, axes=1) / (h * h)


def second_difference(f, t, h):
    """Plain symmetric second difference, the most literal oracle."""
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)


def random_unit(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_tangent_direction(rng, x):
    v = rng.normal(size=3)
    v -= np.dot(v, x) * x
    v -= np.dot(v, x) * x
    return v / np.linalg.norm(v)


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def hemisphere_cloud(rng, n_min=5, n_max=40, max_angle_frac=0.95):
    """Random cloud strictly inside an open hemisphere around a random center."""
    c = random_unit(rng)
    n = int(rng.integers(n_min, n_max))
    pts = []
    while len(pts) < n:
        p = random_unit(rng)
        u = p - np.dot(p, c) * c
        nu = np.linalg.norm(u)
        if nu < 1e-9:
            continue
        ang = rng.uniform(0.0, np.pi / 2 * max_angle_frac)
        pts.append(np.cos(ang) * c + np.sin(ang) * (u / nu))
    return np.asarray(pts), c
