"""Curve families on the unit sphere and R^d, and sup-norm scans.

Analytic families carry exact first and second derivatives. Sampled
curves differentiate their own grid with 4th-order central stencils in
the interior and 2nd-order one-sided stencils at the ends; between
nodes they evaluate the local degree-4 interpolant so scan refinement
has a continuous function to work with.

Suprema over the real line are approximated on a finite window: a
uniform grid scan followed by golden-section refinement around the
best grid points. Periodic curves report their period so callers can
scan exactly one of them.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .config import chunked_extremum
from .errors import (
    IngestionError,
    InvalidCurveError,
    InvalidInputError,
    NumericFailureError,
    OutOfDomainError,
)
from .geometry import Manifold, as_vector
from .golden import golden_max_batch

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# phase functions: the closed set of time laws used by the analytic families


@dataclass(frozen=True)
class LinearPhase:
    """theta(t) = omega t + phi"""

    omega: float
    phi: float = 0.0

    def value(self, t):
        return self.omega * t + self.phi

    def d1(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.omega)

    def d2(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    @property
    def is_constant(self):
        return self.omega == 0.0

    def value_period(self):
        return None

    def mod2pi_period(self):
        if self.omega == 0.0:
            return None
        return TWO_PI / abs(self.omega)


@dataclass(frozen=True)
class QuadraticPhase:
    """theta(t) = alpha t^2 / 2 + omega t"""

    alpha: float
    omega: float = 0.0

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.alpha * t * t + self.omega * t

    def d1(self, t):
        return self.alpha * np.asarray(t, dtype=float) + self.omega

    def d2(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.alpha)

    @property
    def is_constant(self):
        return self.alpha == 0.0 and self.omega == 0.0

    def value_period(self):
        return None

    def mod2pi_period(self):
        if self.alpha == 0.0 and self.omega != 0.0:
            return TWO_PI / abs(self.omega)
        return None


@dataclass(frozen=True)
class SinusoidalPhase:
    """theta(t) = amp sin(omega t) + drift t"""

    amp: float
    omega: float
    drift: float = 0.0

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return self.amp * np.sin(self.omega * t) + self.drift * t

    def d1(self, t):
        t = np.asarray(t, dtype=float)
        return self.amp * self.omega * np.cos(self.omega * t) + self.drift

    def d2(self, t):
        t = np.asarray(t, dtype=float)
        return -self.amp * self.omega ** 2 * np.sin(self.omega * t)

    @property
    def is_constant(self):
        return (self.amp == 0.0 or self.omega == 0.0) and self.drift == 0.0

    def value_period(self):
        if self.drift == 0.0 and self.amp != 0.0 and self.omega != 0.0:
            return TWO_PI / abs(self.omega)
        return None

    def mod2pi_period(self):
        if self.amp == 0.0 or self.omega == 0.0:
            return LinearPhase(self.drift).mod2pi_period()
        if self.drift == 0.0:
            return TWO_PI / abs(self.omega)
        return None


PHASE_KINDS = {"linear": LinearPhase, "quadratic": QuadraticPhase, "sinusoidal": SinusoidalPhase}


def combine_periods(periods, tol=1e-9, max_multiple=64):
    """Least common period of the given list, if the entries are
    commensurate within small integer multiples; None otherwise.

    Entries of None mean aperiodic and poison the result; an empty list
    (everything constant) also yields None.
    """
    ps = [p for p in periods]
    if not ps:
        return None
    if any(p is None for p in ps):
        return None
    common = ps[0]
    for p in ps[1:]:
        found = None
        for m in range(1, max_multiple + 1):
            ratio = m * common / p
            n = round(ratio)
            if n >= 1 and abs(ratio - n) <= tol * max(1.0, ratio):
                found = m * common
                break
        if found is None:
            return None
        common = found
    return common


# ---------------------------------------------------------------------------
# evaluations and windows


@dataclass(frozen=True)
class CurveEvaluation:
    """Position, velocity and ambient second derivative at one time."""

    t: float
    x: np.ndarray
    xdot: np.ndarray
    xddot: np.ndarray


@dataclass(frozen=True)
class TimeWindow:
    t_min: float
    t_max: float
    samples: int

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            raise InvalidInputError("window endpoints must be finite")
        if not self.t_min < self.t_max:
            raise InvalidInputError("window requires t_min < t_max")
        if self.samples < 3:
            raise InvalidInputError("window requires at least 3 samples")

    @property
    def step(self) -> float:
        return (self.t_max - self.t_min) / (self.samples - 1)

    def grid(self) -> np.ndarray:
        # t_min + k*step rather than linspace so that doubling the density
        # (samples' = 2*samples - 1) reproduces the coarse nodes bit-exactly
        ts = self.t_min + np.arange(self.samples) * self.step
        ts[-1] = self.t_max
        return ts


@dataclass(frozen=True)
class SupEstimate:
    """Windowed supremum of a scalar quantity along a curve."""

    value: float
    argmax_t: float
    grid_step: float
    refined: bool
    samples: int


DEFAULT_WINDOW = (-20.0, 20.0, 40001)
PERIODIC_SAMPLES = 4097


def default_window(curve, samples: int | None = None) -> TimeWindow:
    """One period when the curve is periodic, the curve's own grid for
    sampled data, else [-20, 20] x 40001."""
    period = curve.period()
    if period is not None:
        return TimeWindow(0.0, period, samples or PERIODIC_SAMPLES)
    dom = curve.domain()
    if dom is not None:
        n = getattr(curve, "ts", None)
        return TimeWindow(dom[0], dom[1], samples or (len(n) if n is not None else PERIODIC_SAMPLES))
    t_min, t_max, n = DEFAULT_WINDOW
    return TimeWindow(t_min, t_max, samples or n)


# ---------------------------------------------------------------------------
# curve families


class Curve:
    """Common interface: batch jets, scalar evaluation, optional period."""

    manifold: Manifold

    def batch(self, ts: np.ndarray):
        """Return (X, Xd, Xdd) arrays of shape (len(ts), dim)."""
        raise NotImplementedError

    def evaluate(self, t: float) -> CurveEvaluation:
        ts = np.array([float(t)])
        X, Xd, Xdd = self.batch(ts)
        return CurveEvaluation(float(t), X[0], Xd[0], Xdd[0])

    def period(self):
        """Fundamental period of t -> x(t), or None when unknown/aperiodic."""
        return None

    def domain(self):
        """(t_lo, t_hi) evaluation domain; None means all of R."""
        return None


def _unit(v, name):
    v = as_vector(v, dim=3)
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > 1e-9:
        raise InvalidCurveError(f"{name} must be a unit vector (norm {n!r})")
    return v


@dataclass(frozen=True)
class GreatCircle(Curve):
    """x(t) = cos(theta(t)) a + sin(theta(t)) b with a, b orthonormal."""

    a: np.ndarray
    b: np.ndarray
    phase: object
    manifold: Manifold = field(default_factory=Manifold.sphere2, init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", _unit(self.a, "a"))
        object.__setattr__(self, "b", _unit(self.b, "b"))
        dot = float(np.dot(self.a, self.b))
        if abs(dot) > 1e-9:
            raise InvalidCurveError(f"a and b must be orthogonal (<a,b> = {dot:.3e})")

    def batch(self, ts):
        th = self.phase.value(ts)
        d1 = self.phase.d1(ts)
        d2 = self.phase.d2(ts)
        c, s = np.cos(th), np.sin(th)
        u = np.outer(c, self.a) + np.outer(s, self.b)      # x
        w = np.outer(-s, self.a) + np.outer(c, self.b)     # dx/dtheta
        X = u
        Xd = d1[:, None] * w
        Xdd = d2[:, None] * w - (d1 ** 2)[:, None] * u
        return X, Xd, Xdd

    def period(self):
        return self.phase.mod2pi_period()


@dataclass(frozen=True)
class Latitude(Curve):
    """Circle at fixed colatitude: (sin c cos theta, sin c sin theta, cos c)."""

    colatitude: float
    phase: object
    manifold: Manifold = field(default_factory=Manifold.sphere2, init=False)

    def __post_init__(self):
        if not 0.0 < self.colatitude < math.pi:
            raise InvalidCurveError("colatitude must lie strictly between 0 and pi")

    def batch(self, ts):
        sc = math.sin(self.colatitude)
        cc = math.cos(self.colatitude)
        th = self.phase.value(ts)
        d1 = self.phase.d1(ts)
        d2 = self.phase.d2(ts)
        c, s = np.cos(th), np.sin(th)
        n = len(np.atleast_1d(th))
        X = np.column_stack([sc * c, sc * s, np.full(n, cc)])
        w = np.column_stack([-sc * s, sc * c, np.zeros(n)])    # dx/dtheta
        ww = np.column_stack([-sc * c, -sc * s, np.zeros(n)])  # d2x/dtheta2
        Xd = d1[:, None] * w
        Xdd = d2[:, None] * w + (d1 ** 2)[:, None] * ww
        return X, Xd, Xdd

    def period(self):
        return self.phase.mod2pi_period()


@dataclass(frozen=True)
class RotatingFrame:
    """One factor of a compound curve: rotation about a fixed axis whose
    angle follows a phase function."""

    axis: np.ndarray
    phase: object

    def __post_init__(self):
        k = as_vector(self.axis, dim=3)
        n = float(np.linalg.norm(k))
        if n == 0.0:
            raise InvalidCurveError("rotation axis must be nonzero")
        object.__setattr__(self, "axis", k / n)


@dataclass(frozen=True)
class SphericalCompound(Curve):
    """Composition of rotating frames applied to a base point:
    x(t) = R_1(theta_1(t)) ... R_m(theta_m(t)) x0.

    Orthogonal factors keep the point exactly on the sphere, and the
    product rule gives exact derivatives for any number of factors.
    """

    frames: tuple
    base: np.ndarray
    manifold: Manifold = field(default_factory=Manifold.sphere2, init=False)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if not self.frames:
            raise InvalidCurveError("compound curve needs at least one frame")
        object.__setattr__(self, "base", _unit(self.base, "base"))

    def batch(self, ts):
        # With R_i' = th_i' K_i R_i and R_i'' = th_i'' K_i R_i + th_i'^2 K_i^2 R_i,
        # every product-rule term collapses to prefix-matrix times vector chains,
        # which keeps the cost linear in small matvec ops.
        ts = np.asarray(ts, dtype=float)
        n = len(ts)
        m = len(self.frames)
        eye = np.broadcast_to(np.eye(3), (n, 3, 3))
        R, K, d1, d2 = [], [], [], []
        for fr in self.frames:
            th = np.atleast_1d(fr.phase.value(ts))
            d1.append(np.atleast_1d(fr.phase.d1(ts)))
            d2.append(np.atleast_1d(fr.phase.d2(ts)))
            Km = _skew3(fr.axis)
            K.append(Km)
            sin, cos = np.sin(th), np.cos(th)
            R.append(eye + sin[:, None, None] * Km
                     + (1.0 - cos)[:, None, None] * (Km @ Km))

        def matvec(M, u):
            return np.einsum("nij,nj->ni", M, u)

        def fixvec(Km, u):
            return np.einsum("ij,nj->ni", Km, u)

        # suffix vectors v[j] = R_j ... R_{m-1} base
        v = [None] * (m + 1)
        v[m] = np.broadcast_to(self.base, (n, 3))
        for j in range(m - 1, -1, -1):
            v[j] = matvec(R[j], v[j + 1])
        X = v[0]

        # prefix matrices Q[i] = R_0 ... R_{i-1}; Q[0] is the identity
        Q = [None] * m
        for i in range(1, m):
            Q[i] = R[0] if i == 1 else np.einsum("nij,njk->nik", Q[i - 1], R[i - 1])

        def lapply(i, u):
            return u if Q[i] is None else matvec(Q[i], u)

        Kv = [fixvec(K[i], v[i]) for i in range(m)]

        Xd = np.zeros_like(X)
        for i in range(m):
            Xd += lapply(i, d1[i][:, None] * Kv[i])

        Xdd = np.zeros_like(X)
        for i in range(m):
            term = d2[i][:, None] * Kv[i] + (d1[i] ** 2)[:, None] * fixvec(K[i], Kv[i])
            Xdd += lapply(i, term)
        for i in range(m):
            for j in range(i + 1, m):
                u = d1[j][:, None] * Kv[j]
                for k in range(j - 1, i, -1):
                    u = matvec(R[k], u)
                u = d1[i][:, None] * fixvec(K[i], matvec(R[i], u))
                Xdd += 2.0 * lapply(i, u)
        return X, Xd, Xdd

    def period(self):
        periods = []
        for fr in self.frames:
            if fr.phase.is_constant:
                continue
            periods.append(fr.phase.mod2pi_period())
        return combine_periods(periods)


def _skew3(k):
    return np.array([
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ])


@dataclass(frozen=True)
class EuclideanAnalytic(Curve):
    """R^d curve whose components are finite sums of phase functions."""

    components: tuple  # tuple of tuples of phase functions

    def __post_init__(self):
        comps = tuple(tuple(terms) for terms in self.components)
        if not comps:
            raise InvalidCurveError("need at least one component")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "manifold", Manifold.euclidean(len(comps)))

    def batch(self, ts):
        ts = np.asarray(ts, dtype=float)
        n = len(ts)
        d = len(self.components)
        X = np.zeros((n, d))
        Xd = np.zeros((n, d))
        Xdd = np.zeros((n, d))
        for j, terms in enumerate(self.components):
            for term in terms:
                X[:, j] += term.value(ts)
                Xd[:, j] += term.d1(ts)
                Xdd[:, j] += term.d2(ts)
        return X, Xd, Xdd

    def period(self):
        periods = []
        for terms in self.components:
            for term in terms:
                if term.is_constant:
                    continue
                periods.append(term.value_period())
        return combine_periods(periods)


# ---------------------------------------------------------------------------
# sampled curves

SNAP_FRACTION = 1e-9  # of the grid step: closer than this counts as a node

# offsets of the 5-node window relative to the evaluation node, by position
_WINDOW_PATTERNS = {}


def _window_inverse(offsets):
    if offsets not in _WINDOW_PATTERNS:
        V = np.vander(np.asarray(offsets, dtype=float), 5, increasing=True)
        _WINDOW_PATTERNS[offsets] = np.linalg.inv(V)
    return _WINDOW_PATTERNS[offsets]


@dataclass(frozen=True)
class SampledCurve(Curve):
    """Uniformly sampled curve differentiated with finite differences.

    Node jets use the documented stencils (4th-order central in the
    interior, 2nd-order near and at the ends); off-node times evaluate
    the degree-4 interpolant through the 5 nearest nodes, which at
    interior nodes reproduces the central stencils exactly.
    """

    ts: np.ndarray
    points: np.ndarray
    manifold: Manifold

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if len(ts) < 5:
            raise IngestionError(f"need at least 5 samples, got {len(ts)}", row=len(ts))
        if pts.shape[0] != len(ts):
            raise IngestionError("times and points disagree in length")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "points", pts)

    @property
    def step(self) -> float:
        return float((self.ts[-1] - self.ts[0]) / (len(self.ts) - 1))

    def domain(self):
        return float(self.ts[0]), float(self.ts[-1])

    def _node_jet(self, idx):
        f = self.points
        h = self.step
        n = len(self.ts)
        i = int(idx)
        if 2 <= i <= n - 3:
            xd = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h)
            xdd = (-f[i + 2] + 16 * f[i + 1] - 30 * f[i] + 16 * f[i - 1] - f[i - 2]) / (12 * h * h)
        elif i in (1, n - 2):
            xd = (f[i + 1] - f[i - 1]) / (2 * h)
            xdd = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h)
        elif i == 0:
            xd = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
            xdd = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
        else:  # i == n - 1
            xd = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
            xdd = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / (h * h)
        return f[i], xd, xdd

    def batch(self, ts):
        ts = np.asarray(ts, dtype=float)
        lo, hi = self.domain()
        h = self.step
        pad = SNAP_FRACTION * h
        if np.any(ts < lo - pad) or np.any(ts > hi + pad):
            bad = ts[(ts < lo - pad) | (ts > hi + pad)][0]
            raise OutOfDomainError(f"t = {bad!r} outside sampled domain [{lo!r}, {hi!r}]")
        n = len(self.ts)
        dim = self.points.shape[1]
        X = np.empty((len(ts), dim))
        Xd = np.empty((len(ts), dim))
        Xdd = np.empty((len(ts), dim))
        for k, t in enumerate(ts):
            pos = (t - lo) / h
            nearest = int(np.clip(round(pos), 0, n - 1))
            if abs(t - self.ts[nearest]) <= pad:
                X[k], Xd[k], Xdd[k] = self._node_jet(nearest)
                continue
            start = int(np.clip(nearest - 2, 0, n - 5))
            offsets = tuple(range(start - nearest, start - nearest + 5))
            Vinv = _window_inverse(offsets)
            coeff = Vinv @ self.points[start:start + 5]  # (5, dim), powers of s
            s = (t - self.ts[nearest]) / h
            powers = s ** np.arange(5)
            X[k] = powers @ coeff
            Xd[k] = (np.arange(1, 5) * s ** np.arange(4) / h) @ coeff[1:]
            d2w = np.array([2.0, 6.0 * s, 12.0 * s * s]) / (h * h)
            Xdd[k] = d2w @ coeff[2:]
        return X, Xd, Xdd


def load_sampled(rows) -> SampledCurve:
    """Build a sphere SampledCurve from (t, x, y, z) rows.

    The grid must be uniform within 1e-9 relative step jitter and every
    point within 1e-6 of unit norm; points are renormalized on ingest.
    Errors name the first offending row (1-based).
    """
    data = np.asarray(list(rows), dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise IngestionError("rows must be (t, x, y, z) quadruples")
    if data.shape[0] < 5:
        raise IngestionError(f"need at least 5 rows, got {data.shape[0]}", row=data.shape[0])
    if not np.all(np.isfinite(data)):
        bad = int(np.argwhere(~np.all(np.isfinite(data), axis=1))[0, 0]) + 1
        raise IngestionError(f"non-finite value at row {bad}", row=bad)
    ts = data[:, 0]
    steps = np.diff(ts)
    if np.any(steps <= 0):
        bad = int(np.argwhere(steps <= 0)[0, 0]) + 2
        raise IngestionError(f"times must be strictly increasing; violated at row {bad}", row=bad)
    nominal = (ts[-1] - ts[0]) / (len(ts) - 1)
    jitter = np.abs(steps - nominal) / nominal
    if np.any(jitter > 1e-9):
        bad = int(np.argmax(jitter > 1e-9)) + 2
        raise IngestionError(
            f"non-uniform grid at row {bad}: step deviates by {jitter.max():.3e} relative",
            row=bad)
    pts = data[:, 1:]
    norms = np.linalg.norm(pts, axis=1)
    off = np.abs(norms - 1.0)
    if np.any(off > 1e-6):
        bad = int(np.argmax(off > 1e-6)) + 1
        raise IngestionError(
            f"point at row {bad} is off the unit sphere by {off.max():.3e}", row=bad)
    pts = pts / norms[:, None]
    return SampledCurve(ts, pts, Manifold.sphere2())


def read_curve_csv(path) -> SampledCurve:
    """Read the documented CSV format (header t,x,y,z) into a SampledCurve."""
    return load_sampled(read_points_csv(path)[0])


def read_points_csv(path):
    """Parse a t,x,y,z CSV; returns (rows, points) without uniformity checks.

    Used directly by the cap-center command, where the times are
    irrelevant and the cloud need not be a uniform curve sample.
    """
    rows = []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["t", "x", "y", "z"]:
            raise IngestionError("expected CSV header 't,x,y,z'")
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise IngestionError(f"row {lineno}: expected 4 fields, got {len(row)}", row=lineno)
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise IngestionError(f"row {lineno}: non-numeric field", row=lineno)
    if not rows:
        raise IngestionError("CSV contains no data rows")
    data = np.asarray(rows, dtype=float)
    pts = data[:, 1:]
    norms = np.linalg.norm(pts, axis=1)
    off = np.abs(norms - 1.0)
    if np.any(off > 1e-6):
        bad = int(np.argmax(off > 1e-6)) + 1
        raise IngestionError(f"point at row {bad} is off the unit sphere by {off.max():.3e}",
                             row=bad)
    return rows, pts / norms[:, None]


# ---------------------------------------------------------------------------
# windowed extrema

QUANTITIES = ("speed", "covariant_accel_norm", "aux_value", "aux_gradient_norm")


def quantity_values(curve, ts, quantity, aux=None) -> np.ndarray:
    """Evaluate a named or custom scalar quantity along the curve.

    Custom quantities are callables f(ts, X, Xd, Xdd) -> values operating
    on whole batches.
    """
    X, Xd, Xdd = curve.batch(ts)
    if callable(quantity):
        return np.asarray(quantity(ts, X, Xd, Xdd), dtype=float)
    if quantity == "speed":
        return np.linalg.norm(Xd, axis=1)
    if quantity == "covariant_accel_norm":
        if curve.manifold.is_sphere:
            radial = np.einsum("ni,ni->n", Xdd, X)
            acc = Xdd - radial[:, None] * X
        else:
            acc = Xdd
        return np.linalg.norm(acc, axis=1)
    if quantity == "aux_value":
        if aux is None:
            raise InvalidInputError("aux_value quantity needs an auxiliary function")
        return aux.value_batch(X)
    if quantity == "aux_gradient_norm":
        if aux is None:
            raise InvalidInputError("aux_gradient_norm quantity needs an auxiliary function")
        return aux.gradient_norm_batch(X)
    raise InvalidInputError(f"unknown quantity {quantity!r}")


def _check_finite(values, ts):
    bad = ~np.isfinite(values)
    if np.any(bad):
        t_bad = float(np.asarray(ts)[bad][0])
        raise NumericFailureError(f"non-finite quantity value at t = {t_bad!r}", t=t_bad)


def scan_extremum(curve, window: TimeWindow, quantity, aux=None,
                  mode: str = "max", refine: bool = True,
                  refine_candidates: int = 3) -> SupEstimate:
    """Grid extremum with golden-section refinement around the best
    bracket(s). Works for max and min; ties go to the smallest t."""
    dom = curve.domain()
    if dom is not None:
        lo, hi = dom
        pad = SNAP_FRACTION * max(1.0, abs(hi - lo))
        if window.t_min < lo - pad or window.t_max > hi + pad:
            raise OutOfDomainError(
                f"window [{window.t_min}, {window.t_max}] exceeds curve domain [{lo}, {hi}]")
    sign = 1.0 if mode == "max" else -1.0

    def values_fn(ts):
        vals = quantity_values(curve, ts, quantity, aux=aux)
        _check_finite(vals, ts)
        return sign * vals

    ts = window.grid()
    t_star, v_star, values = chunked_extremum(values_fn, ts, mode="max")
    best_t, best_v = t_star, v_star

    refined = True
    if refine and len(ts) >= 3:
        k = min(refine_candidates, len(ts))
        top = np.argpartition(values, -k)[-k:]
        lo_b = ts[np.maximum(top - 1, 0)]
        hi_b = ts[np.minimum(top + 1, len(ts) - 1)]
        # a bracket of 1e-5 steps pins a smooth extremum to ~1e-12 in value
        tol = max(1e-13, window.step * 1e-5)
        xs, ys = golden_max_batch(values_fn, lo_b, hi_b, tol=tol, maxiter=32)
        j = int(np.argmax(ys))
        if ys[j] > best_v:
            best_t, best_v = float(xs[j]), float(ys[j])
        moved = (best_v - v_star) / max(abs(v_star), 1e-12)
        refined = moved < 1e-10

    return SupEstimate(value=sign * best_v, argmax_t=best_t,
                       grid_step=window.step, refined=refined,
                       samples=window.samples)


def sup_norm(curve, window: TimeWindow, quantity, aux=None,
             refine: bool = True) -> SupEstimate:
    """Windowed sup of a scalar quantity: grid max, then golden-section
    refinement around the 3 best grid points."""
    return scan_extremum(curve, window, quantity, aux=aux, mode="max", refine=refine)
