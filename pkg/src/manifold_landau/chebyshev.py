"""Smallest enclosing spherical cap via maximin inner product.

Minimizing the sup of chordal distances from a unit vector to a point
cloud on the sphere is equivalent (chordal identity |x-p|^2 = 2 - 2<x,p>)
to maximizing f(x) = min_i <x, p_i>. The solver runs projected
supergradient ascent from 16 deterministic starts, keeps the best
iterate ever seen, then polishes it to a genuine local maximizer with
rotating-frame golden-section steps plus exact active-set candidates.
An exhaustive icosphere scan with one chart refinement serves as the
independent oracle.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InvalidInputError, OffManifoldError
from .geometry import SurfacePoint, tangent_frame
from .golden import golden_max

ASCENT_ITERATIONS = 500
ASCENT_STALL_WINDOW = 50
ASCENT_STALL_TOL = 1e-10
POLISH_ROUNDS = 10
ICOSAHEDRON_EDGE_ARC = math.atan(2.0)  # ~63.435 deg between adjacent vertices


@dataclass(frozen=True)
class CapCenter:
    """Center of the smallest spherical cap enclosing a point cloud."""

    e: SurfacePoint
    minimax_chordal_radius: float
    min_inner_product: float
    iterations: int
    converged: bool
    warning: str | None = None


def _cloud_array(points) -> np.ndarray:
    pts = [p.coords if isinstance(p, SurfacePoint) else np.asarray(p, dtype=float)
           for p in points]
    if len(pts) == 0:
        raise InvalidInputError("need at least one point")
    P = np.asarray(pts, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3:
        raise InvalidInputError("points must be 3-vectors")
    if not np.all(np.isfinite(P)):
        raise InvalidInputError("points must be finite")
    norms = np.linalg.norm(P, axis=1)
    off = np.abs(norms - 1.0)
    if np.any(off > 1e-6):
        raise OffManifoldError(f"point {int(np.argmax(off))} is off the sphere by {off.max():.3e}")
    return P / norms[:, None]


def _objective(P: np.ndarray, x: np.ndarray) -> float:
    return float(np.min(P @ x))


def icosahedron_vertices() -> np.ndarray:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = []
    for s1 in (-1.0, 1.0):
        for s2 in (-1.0, 1.0):
            raw.append((0.0, s1, s2 * phi))
            raw.append((s1, s2 * phi, 0.0))
            raw.append((s2 * phi, 0.0, s1))
    V = np.array(raw)
    return V / np.linalg.norm(V, axis=1)[:, None]


@lru_cache(maxsize=8)
def icosphere(level: int) -> np.ndarray:
    """Vertices of the icosahedron subdivided `level` times and projected
    to the sphere; 10 * 4**level + 2 vertices."""
    if level < 0:
        raise InvalidInputError("subdivision level must be >= 0")
    verts = [tuple(v) for v in icosahedron_vertices()]
    faces = [tuple(f) for f in ConvexHull(np.array(verts)).simplices]
    for _ in range(level):
        index = {v: i for i, v in enumerate(verts)}
        midpoint_cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint_cache:
                m = np.asarray(verts[i]) + np.asarray(verts[j])
                m /= np.linalg.norm(m)
                m = tuple(m)
                index[m] = len(verts)
                verts.append(m)
                midpoint_cache[key] = index[m]
            return midpoint_cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    V = np.asarray(verts, dtype=float)
    V.setflags(write=False)
    return V


def _starts(P: np.ndarray) -> np.ndarray:
    mean = P.sum(axis=0)
    n = np.linalg.norm(mean)
    mean = mean / n if n > 1e-12 else P[0]
    return np.vstack([mean, icosahedron_vertices(), np.eye(3)])  # 1 + 12 + 3


def _ascent(P: np.ndarray, X0: np.ndarray, iterations: int):
    """Projected supergradient ascent with step 0.5/sqrt(k), run on all
    starts simultaneously; the active point with the smallest index is
    the supergradient. Returns the best iterate seen across every chain
    and whether that chain's final stall window improved."""
    X = X0.copy()
    dots = X @ P.T
    best_f = dots.min(axis=1)
    best_X = X.copy()
    checkpoint = best_f.copy()
    for k in range(1, iterations + 1):
        idx = np.argmin(dots, axis=1)  # first minimum = smallest index
        X = X + (0.5 / math.sqrt(k)) * P[idx]
        X /= np.linalg.norm(X, axis=1)[:, None]
        dots = X @ P.T
        f = dots.min(axis=1)
        improved = f > best_f
        best_X[improved] = X[improved]
        best_f[improved] = f[improved]
        if k == iterations - ASCENT_STALL_WINDOW:
            checkpoint = best_f.copy()
    j = int(np.argmax(best_f))
    converged = bool(best_f[j] - checkpoint[j] < ASCENT_STALL_TOL)
    return best_X[j], float(best_f[j]), converged


def _geodesic_step(x, d, angle):
    return math.cos(angle) * x + math.sin(angle) * d


def _polish(P: np.ndarray, x: np.ndarray, f: float):
    """Drive the ascent output to a local maximizer: alternate golden
    line searches along a tangent frame that rotates each round (so
    nonsmooth ridges cannot stall the zigzag), then try exact candidates
    built from the active set."""
    width = 0.1
    stalled = 0
    for r in range(POLISH_ROUNDS):
        u, v = tangent_frame(x)
        rot = 0.5 * r
        du = math.cos(rot) * u + math.sin(rot) * v
        dv = -math.sin(rot) * u + math.cos(rot) * v
        moved = 0.0
        for d in (du, dv):
            a, fa = golden_max(lambda ang: _objective(P, _geodesic_step(x, d, ang)),
                               -width, width, tol=1e-11, maxiter=52)
            if fa > f:
                cand = _geodesic_step(x, d, a)
                cand /= np.linalg.norm(cand)
                f_cand = _objective(P, cand)
                if f_cand > f:
                    x, f = cand, f_cand
                    moved = max(moved, abs(a))
        if moved >= 0.9 * width:
            width = min(2.0 * width, 1.5)
        else:
            width = max(4.0 * moved, 0.3 * width, 1e-9)
        stalled = stalled + 1 if (moved == 0.0 and width <= 1e-8) else 0
        if stalled >= 2:
            break
    xc, fc = _active_set_candidates(P, x)
    if fc > f:
        return xc, fc
    return x, f


def _active_set_candidates(P: np.ndarray, x: np.ndarray):
    """Exact stationary candidates: maximin optima generically equalize
    two or three active points, which pins the center to a bisector
    circle (searched by golden section) or to a single intersection."""
    dots = P @ x
    order = np.argsort(dots, kind="stable")[:5]
    best_x, best_f = x, _objective(P, x)
    for i, j in combinations(order, 2):
        w = P[i] - P[j]
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        n = w / nw
        c0 = x - np.dot(x, n) * n
        nc = np.linalg.norm(c0)
        if nc < 1e-12:
            continue
        c0 /= nc
        c1 = np.cross(n, c0)
        a, fa = golden_max(lambda ang: _objective(P, math.cos(ang) * c0 + math.sin(ang) * c1),
                           -0.5, 0.5, tol=1e-14, maxiter=80)
        if fa > best_f:
            cand = math.cos(a) * c0 + math.sin(a) * c1
            best_x, best_f = cand / np.linalg.norm(cand), fa
    for i, j, k in combinations(order, 3):
        d = np.cross(P[i] - P[j], P[i] - P[k])
        nd = np.linalg.norm(d)
        if nd < 1e-12:
            continue
        for cand in (d / nd, -d / nd):
            fc = _objective(P, cand)
            if fc > best_f:
                best_x, best_f = cand, fc
    return best_x, best_f


def chebyshev_center(points, iterations: int = ASCENT_ITERATIONS,
                     polish: bool = True) -> CapCenter:
    """Cap center of a cloud of unit vectors.

    Starts: normalized mean of the cloud, the 12 icosahedron vertices
    and the 3 coordinate axes (16 in total). When the best objective is
    not positive no open hemisphere contains the cloud; the maximin
    point is still returned, with a warning, so downstream hypothesis
    checks can report the failure instead of erroring.
    """
    P = _cloud_array(points)
    best_x, best_f, converged = _ascent(P, _starts(P), iterations)
    if polish:
        best_x, best_f = _polish(P, best_x, best_f)
    best_f = _objective(P, best_x)  # exact objective at the returned center
    warning = None
    if best_f <= 0.0:
        warning = "cloud is not contained in an open hemisphere; minimizer may be non-unique"
    return CapCenter(
        e=SurfacePoint(best_x),
        minimax_chordal_radius=math.sqrt(max(0.0, 2.0 - 2.0 * best_f)),
        min_inner_product=best_f,
        iterations=iterations * len(_starts(P)),
        converged=converged,
        warning=warning,
    )


def chebyshev_grid_oracle(points, subdivisions: int = 5) -> CapCenter:
    """Exhaustive maximin over an icosphere grid, then one golden refine
    per spherical-chart coordinate around the best vertex. Test oracle:
    slower and cruder than the solver, but with guaranteed coverage."""
    P = _cloud_array(points)
    V = icosphere(subdivisions)
    f_all = (V @ P.T).min(axis=1)
    b = V[int(np.argmax(f_all))]

    # chart centered at b, rotated to the equator so both coordinates are
    # well conditioned near the center
    R = _rotation_to_ex(b)
    delta = 1.2 * ICOSAHEDRON_EDGE_ARC / (2 ** subdivisions)

    def chart(phi, psi):
        local = np.array([math.cos(psi) * math.cos(phi),
                          math.cos(psi) * math.sin(phi),
                          math.sin(psi)])
        return R.T @ local

    phi_star, _ = golden_max(lambda p: _objective(P, chart(p, 0.0)),
                             -delta, delta, tol=1e-12, maxiter=70)
    psi_star, f_star = golden_max(lambda q: _objective(P, chart(phi_star, q)),
                                  -delta, delta, tol=1e-12, maxiter=70)
    e = chart(phi_star, psi_star)
    e /= np.linalg.norm(e)
    f_star = _objective(P, e)
    warning = None
    if f_star <= 0.0:
        warning = "cloud is not contained in an open hemisphere; minimizer may be non-unique"
    return CapCenter(
        e=SurfacePoint(e),
        minimax_chordal_radius=math.sqrt(max(0.0, 2.0 - 2.0 * f_star)),
        min_inner_product=f_star,
        iterations=len(V),
        converged=True,
        warning=warning,
    )


def _rotation_to_ex(b: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping b to (1, 0, 0)."""
    ex = np.array([1.0, 0.0, 0.0])
    c = float(np.dot(b, ex))
    if c > 1.0 - 1e-12:
        return np.eye(3)
    if c < -1.0 + 1e-12:
        return np.diag([-1.0, -1.0, 1.0])
    axis = np.cross(b, ex)
    axis /= np.linalg.norm(axis)
    K = np.array([[0.0, -axis[2], axis[1]],
                  [axis[2], 0.0, -axis[0]],
                  [-axis[1], axis[0], 0.0]])
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)
