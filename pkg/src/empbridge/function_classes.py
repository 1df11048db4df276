"""Parametric function classes: evaluation, metric, grids, entropy counts.

Four kinds of pointwise-evaluable classes on [0,1]^d, all bounded by half the
envelope constant M:

* ``intervals``      indicators 1{x <= t} of lower intervals, t in [0,1];
* ``rectangles``     indicators 1{x <= t componentwise} of lower-left
                     rectangles, t in [0,1]^d;
* ``holder``         piecewise-linear interpolants on an equally spaced knot
                     mesh whose knot values satisfy |v_i - v_j| <= R |x_i - x_j|^s
                     for every knot pair, plus the envelope bound;
* ``finite``         an explicit duplicate-free list of members given by
                     (form, parameter) descriptors with form one of
                     "interval", "rectangle", "constant".

The intrinsic metric is the uncentered L2(P) distance
d_P(f, h) = sqrt(E (f(X) - h(X))^2). This differs from the centered Gram form
used for the Gaussian field whenever means differ; both are computed from the
same moment engine (mean vector and uncentered second-moment matrix) and are
kept strictly apart.

Grids (epsilon-nets), covering numbers, bracketing numbers, and entropy-model
fits are all defined relative to a declared finite verification mesh of
parameters, which makes every "covers" predicate decidable. Covering counts on
meshes of at most 24 points use an exact branch-and-bound set cover; larger
meshes use a greedy upper bound with a separation-packing lower certificate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .distributions import Distribution
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateFitError,
    DomainError,
    UnsupportedOperationError,
)
from .quadrature import adaptive_simpson

KINDS = ("intervals", "rectangles", "holder", "finite")
FINITE_FORMS = ("interval", "rectangle", "constant")


@dataclass(frozen=True)
class EntropyRegime:
    """Declared entropy metadata: polynomial ("vc") or exponential ("br")."""

    kind: str
    c0: float = 1.0
    nu0: float = 1.0
    b0: float = 1.0
    r0: float = 0.5

    def __post_init__(self):
        if self.kind not in ("vc", "br"):
            raise ConfigError(f"regime kind must be 'vc' or 'br', got {self.kind!r}")
        if self.kind == "vc" and (self.c0 <= 0 or self.nu0 <= 0):
            raise ConfigError("vc regime needs c0 > 0 and nu0 > 0")
        if self.kind == "br" and not (self.b0 > 0 and 0 < self.r0 < 1):
            raise ConfigError("br regime needs b0 > 0 and 0 < r0 < 1")


@dataclass(frozen=True)
class FunctionClass:
    kind: str
    envelope: float = 2.0  # M; every member satisfies |f| <= M/2
    regime: EntropyRegime | None = None
    dim: int = 1
    mesh_size: int = 1000
    holder_exponent: float = 1.0  # s in (0, 1]
    holder_radius: float = 1.0  # R
    knot_count: int = 9
    mesh_seed: int = 20260815
    members: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown class kind {self.kind!r}")
        if self.envelope <= 0:
            raise ConfigError("envelope bound must be positive")
        if self.regime is None:
            object.__setattr__(self, "regime", _default_regime(self.kind))
        if self.kind == "intervals" and self.dim != 1:
            raise ConfigError("interval indicators are one-dimensional")
        if self.kind == "rectangles" and self.dim < 1:
            raise ConfigError("rectangles need dim >= 1")
        if self.kind == "holder":
            if not (0 < self.holder_exponent <= 1):
                raise ConfigError("holder exponent must lie in (0, 1]")
            if self.holder_radius <= 0:
                raise ConfigError("holder radius must be positive")
            if self.knot_count < 2:
                raise ConfigError("holder classes need at least 2 knots")
        if self.kind == "finite":
            if not self.members:
                raise ConfigError("finite class needs a nonempty member list")
            canon = [_canonical_member(m) for m in self.members]
            if len(set(canon)) != len(canon):
                raise ConfigError("finite member list has duplicates")
            object.__setattr__(self, "members", tuple(canon))
            for form, param in self.members:
                _validate_member(form, param, self.dim, self.envelope)
        if self.mesh_size < 1:
            raise ConfigError("mesh size must be >= 1")

    # -- parameter mesh -----------------------------------------------------

    @cached_property
    def mesh(self) -> tuple:
        """Declared verification mesh of parameters."""
        if self.kind == "intervals":
            return tuple(float(t) for t in np.linspace(0.0, 1.0, self.mesh_size))
        if self.kind == "rectangles":
            per_axis = max(2, int(round(self.mesh_size ** (1.0 / self.dim))))
            axis = np.linspace(0.0, 1.0, per_axis)
            return tuple(itertools.product(*([tuple(axis)] * self.dim)))
        if self.kind == "holder":
            return self._holder_mesh()
        return self.members

    @cached_property
    def knots(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.knot_count)

    def _holder_mesh(self) -> tuple:
        """Deterministic sample of admissible knot-value vectors.

        Random rough shapes are rescaled so the pairwise knot constraint and
        the envelope bound hold exactly; rescaling preserves both. The zero
        function is always member 0.
        """
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.mesh_seed, spawn_key=(7,)))
        )
        xs = self.knots
        s, radius, half = self.holder_exponent, self.holder_radius, self.envelope / 2.0
        gaps = np.abs(xs[:, None] - xs[None, :]) ** s
        out = [tuple(0.0 for _ in xs)]
        while len(out) < self.mesh_size:
            step = rng.uniform(-1.0, 1.0, size=len(xs) - 1)
            v = np.concatenate([[rng.uniform(-half, half)], step]).cumsum()
            dv = np.abs(v[:, None] - v[None, :])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(dv > 0, radius * gaps / np.where(dv > 0, dv, 1.0), np.inf)
            scale = min(1.0, float(ratio.min()) * (1.0 - 1e-12))
            v = v * scale
            peak = float(np.abs(v).max())
            if peak > half:
                v = v * (half / peak)
            out.append(tuple(float(x) for x in v))
        return tuple(out)

    # -- evaluation ----------------------------------------------------------

    def evaluate_many(self, theta, xs: np.ndarray) -> np.ndarray:
        """Vectorized f_theta over an array of sample points."""
        xs = np.asarray(xs, dtype=float)
        if self.kind == "intervals":
            return (xs <= float(theta)).astype(float)
        if self.kind == "rectangles":
            t = np.asarray(theta, dtype=float)
            pts = xs if xs.ndim == 2 else xs[:, None]
            return np.all(pts <= t[None, :], axis=1).astype(float)
        if self.kind == "holder":
            return np.interp(xs, self.knots, np.asarray(theta, dtype=float))
        form, param = theta
        return _member_eval(form, param, xs)

    def evaluate_matrix(self, params, xs: np.ndarray) -> np.ndarray:
        """Matrix f_theta(x_i), shape (n, len(params))."""
        xs = np.asarray(xs, dtype=float)
        if self.kind == "intervals":
            thetas = np.asarray(params, dtype=float)
            return (xs[:, None] <= thetas[None, :]).astype(float)
        if self.kind == "rectangles":
            t = np.asarray(params, dtype=float)
            pts = xs if xs.ndim == 2 else xs[:, None]
            return np.all(pts[:, None, :] <= t[None, :, :], axis=2).astype(float)
        cols = [self.evaluate_many(p, xs) for p in params]
        return np.column_stack(cols) if cols else np.zeros((len(xs), 0))

    def validate_theta(self, theta):
        if self.kind == "intervals":
            t = float(theta)
            if not (0.0 <= t <= 1.0):
                raise DomainError(f"interval parameter {t} outside [0,1]")
            return t
        if self.kind == "rectangles":
            t = tuple(float(v) for v in theta)
            if len(t) != self.dim or any(not (0.0 <= v <= 1.0) for v in t):
                raise DomainError(f"rectangle parameter {t} invalid for dim {self.dim}")
            return t
        if self.kind == "holder":
            v = np.asarray(theta, dtype=float)
            if v.shape != (self.knot_count,):
                raise DomainError("holder parameter must give one value per knot")
            if np.abs(v).max() > self.envelope / 2.0 + 1e-12:
                raise DomainError("holder knot values exceed the envelope")
            xs = self.knots
            lim = self.holder_radius * np.abs(xs[:, None] - xs[None, :]) ** self.holder_exponent
            if np.any(np.abs(v[:, None] - v[None, :]) > lim + 1e-9):
                raise DomainError("knot values violate the smoothness constraint")
            return tuple(float(x) for x in v)
        m = _canonical_member(theta)
        if m not in self.members:
            raise DomainError("parameter is not a member of the finite class")
        return m

    def grid_bound(self, epsilon: float) -> float:
        """Declared covering-number bound evaluated at epsilon/2."""
        r = self.regime
        if r.kind == "vc":
            return r.c0 * self.envelope**r.nu0 * epsilon ** (-r.nu0)
        expo = 2.0 ** (2.0 * r.r0) * r.b0**2 / epsilon ** (2.0 * r.r0)
        return math.inf if expo > 700 else math.exp(expo)

    def to_spec(self) -> dict:
        spec = {"kind": self.kind, "M": self.envelope, "mesh_size": self.mesh_size}
        r = self.regime
        spec["regime"] = (
            {"type": "vc", "c0": r.c0, "nu0": r.nu0}
            if r.kind == "vc"
            else {"type": "br", "b0": r.b0, "r0": r.r0}
        )
        if self.kind == "rectangles":
            spec["dim"] = self.dim
        if self.kind == "holder":
            spec.update(
                s=self.holder_exponent,
                R=self.holder_radius,
                knots=self.knot_count,
                mesh_seed=self.mesh_seed,
            )
        if self.kind == "finite":
            spec["members"] = [
                {"form": f, "theta": list(p) if isinstance(p, tuple) else p}
                for f, p in self.members
            ]
        return spec


def _default_regime(kind: str) -> EntropyRegime:
    # Interval/rectangle indicators have polynomial L2 entropy with exponent
    # about twice the VC-subgraph dimension; c0 = 4 leaves validation slack.
    if kind == "holder":
        return EntropyRegime("br", b0=1.0, r0=0.75)
    return EntropyRegime("vc", c0=4.0, nu0=2.0)


def _canonical_member(member) -> tuple:
    if isinstance(member, dict):
        form, param = member.get("form"), member.get("theta", member.get("value"))
    else:
        form, param = member
    if form not in FINITE_FORMS:
        raise ConfigError(f"unknown finite-member form {form!r}")
    if isinstance(param, (list, tuple, np.ndarray)):
        param = tuple(float(v) for v in param)
    else:
        param = float(param)
    return (form, param)


def _validate_member(form, param, dim, envelope):
    if form == "interval":
        if not isinstance(param, float) or not (0.0 <= param <= 1.0):
            raise ConfigError(f"interval member parameter {param} outside [0,1]")
    elif form == "rectangle":
        if not isinstance(param, tuple) or any(not (0.0 <= v <= 1.0) for v in param):
            raise ConfigError(f"rectangle member parameter {param} invalid")
    else:
        if abs(param) > envelope / 2.0:
            raise ConfigError("constant member exceeds the envelope")


def _member_eval(form, param, xs: np.ndarray) -> np.ndarray:
    if form == "interval":
        return (xs <= param).astype(float)
    if form == "rectangle":
        pts = xs if xs.ndim == 2 else xs[:, None]
        t = np.asarray(param, dtype=float)
        return np.all(pts <= t[None, :], axis=1).astype(float)
    return np.full(len(xs), param, dtype=float)


# -- operations ---------------------------------------------------------------


def evaluate(cls: FunctionClass, theta, x) -> float:
    """f_theta(x) for a single point, with domain validation."""
    theta = cls.validate_theta(theta)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if cls.kind == "rectangles" and xs.ndim == 1 and cls.dim > 1:
        xs = xs[None, :]
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError(f"sample point {x} outside [0,1]^d")
    return float(cls.evaluate_many(theta, xs)[0])


def mean_vector(cls: FunctionClass, P: Distribution, params) -> np.ndarray:
    """E f_theta(X) for each parameter."""
    params = list(params)
    if cls.kind == "intervals":
        _require_dim(P, 1)
        return np.asarray(P.cdf(np.asarray(params, dtype=float)), dtype=float)
    if cls.kind == "rectangles":
        _require_dim(P, cls.dim)
        t = np.asarray(params, dtype=float)
        if P.kind == "product-uniform":
            return t.prod(axis=1)
        if P.kind == "discrete":
            pts = P._atom_array()
            w = np.asarray(P.weights, float)
            ind = np.all(pts[:, None, :] <= t[None, :, :], axis=2)
            return w @ ind
        raise DomainError(f"rectangle moments undefined under {P.kind}")
    if cls.kind == "holder":
        _require_dim(P, 1)
        vals = np.asarray(params, dtype=float)  # (p, K) knot values
        if P.kind in ("uniform", "product-uniform"):
            h = 1.0 / (cls.knot_count - 1)
            return h * (0.5 * vals[:, 0] + vals[:, 1:-1].sum(axis=1) + 0.5 * vals[:, -1])
        if P.kind == "discrete":
            pts = P._atom_array()[:, 0]
            w = np.asarray(P.weights, float)
            return np.array([w @ np.interp(pts, cls.knots, v) for v in vals])
        return np.array([_holder_beta_moment(cls, P, v, None) for v in vals])
    out = []
    for form, param in params:
        out.append(_member_mean(form, param, P))
    return np.asarray(out, dtype=float)


def second_moment_matrix(cls: FunctionClass, P: Distribution, params) -> np.ndarray:
    """Uncentered Gram matrix E f_i(X) f_j(X)."""
    params = list(params)
    p = len(params)
    if cls.kind == "intervals":
        _require_dim(P, 1)
        t = np.asarray(params, dtype=float)
        return np.asarray(P.cdf(np.minimum(t[:, None], t[None, :])), dtype=float)
    if cls.kind == "rectangles":
        _require_dim(P, cls.dim)
        t = np.asarray(params, dtype=float)
        if P.kind == "product-uniform":
            return np.minimum(t[:, None, :], t[None, :, :]).prod(axis=2)
        if P.kind == "discrete":
            pts = P._atom_array()
            w = np.asarray(P.weights, float)
            ind = np.all(pts[:, None, :] <= t[None, :, :], axis=2).astype(float)
            return ind.T @ (ind * w[:, None])
        raise DomainError(f"rectangle moments undefined under {P.kind}")
    if cls.kind == "holder":
        _require_dim(P, 1)
        vals = np.asarray(params, dtype=float)
        if P.kind in ("uniform", "product-uniform"):
            # Product of linear pieces is quadratic per cell; one Simpson
            # application per cell is exact.
            h = 1.0 / (cls.knot_count - 1)
            a, b = vals[:, :-1], vals[:, 1:]
            return (a @ a.T + (a + b) @ (a + b).T + b @ b.T) * (h / 6.0)
        if P.kind == "discrete":
            pts = P._atom_array()[:, 0]
            w = np.asarray(P.weights, float)
            mat = np.column_stack([np.interp(pts, cls.knots, v) for v in vals])
            return mat.T @ (mat * w[:, None])
        out = np.empty((p, p))
        for i in range(p):
            for j in range(i, p):
                out[i, j] = out[j, i] = _holder_beta_moment(cls, P, vals[i], vals[j])
        return out
    out = np.empty((p, p))
    for i in range(p):
        for j in range(i, p):
            out[i, j] = out[j, i] = _member_cross(params[i], params[j], P)
    return out


def _require_dim(P: Distribution, dim: int):
    if P.dim != dim:
        raise DomainError(f"distribution dimension {P.dim} does not match class ({dim})")


def _holder_beta_moment(cls, P, v1, v2) -> float:
    """E f g under a beta law: adaptive quadrature split at the knots."""
    xs = cls.knots
    f1 = lambda x: np.interp(x, xs, v1)
    if v2 is None:
        g = lambda x: float(f1(x) * P.pdf(x))
    else:
        f2 = lambda x: np.interp(x, xs, v2)
        g = lambda x: float(f1(x) * f2(x) * P.pdf(x))
    per = 1e-8 / (len(xs) - 1)
    return sum(adaptive_simpson(g, xs[i], xs[i + 1], per) for i in range(len(xs) - 1))


def _member_mean(form, param, P: Distribution) -> float:
    if form == "constant":
        return param
    if form == "interval":
        _require_dim(P, 1)
        return float(P.cdf(param))
    _require_dim(P, len(param))
    if P.kind == "product-uniform" or (P.kind == "uniform" and len(param) == 1):
        return float(np.prod(param))
    if P.kind == "discrete":
        pts = P._atom_array()
        w = np.asarray(P.weights, float)
        return float(w @ np.all(pts <= np.asarray(param)[None, :], axis=1))
    raise DomainError(f"rectangle moments undefined under {P.kind}")


def _member_cross(m1, m2, P: Distribution) -> float:
    (f1, p1), (f2, p2) = m1, m2
    if f1 == "constant":
        return p1 * _member_mean(f2, p2, P)
    if f2 == "constant":
        return p2 * _member_mean(f1, p1, P)
    if f1 == "interval" and f2 == "interval":
        return float(P.cdf(min(p1, p2)))
    if f1 == "rectangle" and f2 == "rectangle":
        both = tuple(min(a, b) for a, b in zip(p1, p2))
        return _member_mean("rectangle", both, P)
    raise DomainError(f"cross moment undefined for forms {f1}/{f2}")


def dP_matrix(cls: FunctionClass, P: Distribution, params) -> np.ndarray:
    """Pairwise intrinsic distances sqrt(E (f_i - f_j)^2)."""
    q = second_moment_matrix(cls, P, params)
    d2 = np.diag(q)[:, None] + np.diag(q)[None, :] - 2.0 * q
    return np.sqrt(np.clip(d2, 0.0, None))


def dP_distance(cls: FunctionClass, P: Distribution, theta1, theta2) -> float:
    t1 = cls.validate_theta(theta1)
    t2 = cls.validate_theta(theta2)
    return float(dP_matrix(cls, P, [t1, t2])[0, 1])


# -- grids ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    """An epsilon-net of class members with its covariance under P."""

    epsilon: float
    centers: tuple
    gram: np.ndarray
    distribution: str

    @property
    def size(self) -> int:
        return len(self.centers)


def build_grid(
    cls: FunctionClass,
    P: Distribution,
    epsilon: float,
    budget: int = 4096,
    mesh=None,
) -> Grid:
    """Select centers forming a strict epsilon-net of the verification mesh.

    Interval classes use an exact one-pass sweep (minimal for a 1-D totally
    ordered metric); other kinds use greedy set cover with deterministic tie
    breaking. Raises a capacity error when more than ``budget`` centers would
    be needed.
    """
    if not (0.0 < epsilon < 1.0):
        raise DomainError("epsilon must lie in (0, 1)")
    mesh = list(mesh if mesh is not None else cls.mesh)
    if not mesh:
        raise DomainError("verification mesh is empty")
    if cls.kind == "intervals" and mesh == sorted(mesh):
        centers = _interval_sweep(cls, P, mesh, epsilon)
    else:
        dmat = dP_matrix(cls, P, mesh)
        centers = [mesh[i] for i in _greedy_cover(dmat < epsilon)]
    if len(centers) > budget:
        raise CapacityError(
            f"grid needs {len(centers)} centers, exceeding the budget of {budget}"
        )
    bound = cls.grid_bound(epsilon)
    if len(centers) > bound:
        raise DomainError(
            f"grid size {len(centers)} exceeds the declared entropy bound {bound:.3g} "
            f"at epsilon/2; declared regime constants are too small"
        )
    from .bridge import covariance

    gram = covariance(cls, P, centers)
    return Grid(float(epsilon), tuple(centers), gram, P.label)


def _interval_sweep(cls, P, mesh, epsilon) -> list:
    # Coverage in CDF space: d(a, b) < eps iff |F(a) - F(b)| < eps^2.
    window = epsilon * epsilon
    thetas = np.asarray(mesh, dtype=float)
    F = np.asarray(P.cdf(thetas), dtype=float)
    centers = []
    i = 0
    n = len(mesh)
    while i < n:
        j = int(np.searchsorted(F, F[i] + window, side="left")) - 1
        j = max(j, i)
        centers.append(float(thetas[j]))
        i = int(np.searchsorted(F, F[j] + window, side="left"))
        i = max(i, j + 1)
    return centers


def _greedy_cover(ball: np.ndarray) -> list:
    """Greedy set cover over a boolean coverage matrix ball[c, p]."""
    n = ball.shape[0]
    uncovered = np.ones(n, dtype=bool)
    picks = []
    while uncovered.any():
        gains = (ball & uncovered[None, :]).sum(axis=1)
        c = int(np.argmax(gains))  # argmax takes the lowest index on ties
        if gains[c] == 0:
            raise DomainError("mesh point not coverable by any candidate center")
        picks.append(c)
        uncovered &= ~ball[c]
    return picks


def net_radius(cls: FunctionClass, P: Distribution, grid: Grid, mesh=None) -> float:
    """Max over mesh parameters of the distance to the nearest center."""
    mesh = list(mesh if mesh is not None else cls.mesh)
    union = list(grid.centers) + mesh
    d = dP_matrix(cls, P, union)[: len(grid.centers), len(grid.centers) :]
    return float(d.min(axis=0).max())


# -- covering and bracketing ----------------------------------------------------


@dataclass(frozen=True)
class CoverCertificate:
    lower: int
    upper: int
    exact: bool


def covering_certificate(
    cls: FunctionClass,
    P: Distribution,
    epsilon: float,
    mesh=None,
    exact_limit: int = 24,
) -> CoverCertificate:
    """Minimal strict-ball cover of the mesh, exact for small meshes.

    Large meshes return a greedy upper bound and a lower bound from a
    first-fit 2*epsilon-separated subset (an open epsilon-ball contains at
    most one point of such a subset).
    """
    if not (0.0 < epsilon < 1.0):
        raise DomainError("epsilon must lie in (0, 1)")
    mesh = list(mesh if mesh is not None else cls.mesh)
    if not mesh:
        raise DomainError("verification mesh is empty")
    d = dP_matrix(cls, P, mesh)
    ball = d < epsilon
    if len(mesh) <= exact_limit:
        size = _exact_cover_size(ball)
        return CoverCertificate(size, size, True)
    upper = len(_greedy_cover(ball))
    sep = d >= 2.0 * epsilon
    kept: list[int] = []
    for i in range(len(mesh)):
        if all(sep[i, j] for j in kept):
            kept.append(i)
    return CoverCertificate(len(kept), upper, False)


def covering_number_dP(
    cls: FunctionClass,
    P: Distribution,
    epsilon: float,
    mesh=None,
    exact_limit: int = 24,
) -> int:
    return covering_certificate(cls, P, epsilon, mesh, exact_limit).upper


def _exact_cover_size(ball: np.ndarray) -> int:
    """Branch-and-bound minimal set cover over candidate rows of ``ball``."""
    n = ball.shape[0]
    masks = []
    full = (1 << n) - 1
    for i in range(n):
        m = 0
        for j in range(n):
            if ball[i, j]:
                m |= 1 << j
        masks.append(m)
    # Drop dominated candidates for speed; keep lowest index among equals.
    order = sorted(range(n), key=lambda i: -bin(masks[i]).count("1"))
    keep = []
    for i in order:
        if not any(masks[i] | masks[k] == masks[k] and masks[i] != masks[k] for k in keep):
            keep.append(i)
    cand = [masks[i] for i in keep]
    best = len(_greedy_cover(ball))

    def recurse(covered: int, used: int):
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        # Branch on the uncovered point with the fewest covering candidates.
        rem = full & ~covered
        pick, fewest = -1, None
        for j in range(n):
            if rem >> j & 1:
                cover_j = [m for m in cand if m >> j & 1]
                if fewest is None or len(cover_j) < len(fewest):
                    pick, fewest = j, cover_j
                    if len(cover_j) <= 1:
                        break
        if not fewest:
            return
        for m in fewest:
            recurse(covered | m, used + 1)

    recurse(0, 0)
    return best


@dataclass(frozen=True)
class BracketSet:
    count: int
    brackets: tuple  # pairs of (lower, upper) descriptors, kind-specific


def bracketing_set(cls: FunctionClass, P: Distribution, epsilon: float) -> BracketSet:
    if not (0.0 < epsilon < 1.0):
        raise DomainError("epsilon must lie in (0, 1)")
    if cls.kind == "intervals":
        return _interval_brackets(cls, P, epsilon)
    if cls.kind == "holder":
        return _holder_brackets(cls, P, epsilon)
    raise UnsupportedOperationError(
        f"bracketing is defined for interval and holder kinds, not {cls.kind!r}"
    )


def bracketing_number(cls: FunctionClass, P: Distribution, epsilon: float) -> int:
    return bracketing_set(cls, P, epsilon).count


def _interval_brackets(cls, P, epsilon) -> BracketSet:
    # Monotone chain: brackets [1{x<=a}, 1{x<=b}] with CDF gap <= eps^2, so
    # the bracket width is d_P(l, u) = sqrt(F(b) - F(a)) <= eps.
    k = int(math.ceil(1.0 / (epsilon * epsilon)))
    qs = np.linspace(0.0, 1.0, k + 1)
    mesh = np.asarray(cls.mesh, dtype=float)
    F = np.asarray(P.cdf(mesh), dtype=float)
    # Map CDF levels back to parameter boundaries on the mesh.
    bounds = [float(mesh[np.searchsorted(F, q, side="left").clip(0, len(mesh) - 1)]) for q in qs]
    bounds[0], bounds[-1] = 0.0, 1.0
    pairs = tuple((bounds[i], bounds[i + 1]) for i in range(k))
    return BracketSet(k, pairs)


def _holder_brackets(cls, P, epsilon) -> BracketSet:
    # Piecewise-constant envelopes: quantized cell values with half-width
    # covering within-cell variation (R w^s <= eps/4) plus quantization eps/8.
    s, radius = cls.holder_exponent, cls.holder_radius
    w_max = (epsilon / (4.0 * radius)) ** (1.0 / s)
    n_cells = int(math.ceil(1.0 / w_max))
    if n_cells > 1 << 16:
        raise CapacityError(f"holder bracketing needs {n_cells} cells, over the 65536 budget")
    eta = epsilon / 4.0
    mids = (np.arange(n_cells) + 0.5) / n_cells
    xs = cls.knots
    seen = set()
    for theta in cls.mesh:
        vals = np.interp(mids, xs, np.asarray(theta, dtype=float))
        seen.add(tuple(np.round(vals / eta).astype(int)))
    half = radius * (1.0 / n_cells) ** s + eta / 2.0
    brackets = tuple((key, half) for key in sorted(seen))
    return BracketSet(len(seen), brackets)


# -- entropy fits ----------------------------------------------------------------


@dataclass(frozen=True)
class EntropyReport:
    epsilons: tuple
    counts: tuple
    model: str  # "vc" or "br"
    constants: dict
    residual: float

    def __post_init__(self):
        if any(c < 1 for c in self.counts):
            raise DomainError("covering counts must be >= 1")
        for i in range(len(self.epsilons) - 1):
            if self.counts[i] > self.counts[i + 1]:
                raise DomainError("counts must be nonincreasing as radius grows")


def fit_entropy_counts(epsilons, counts, model: str) -> EntropyReport:
    """Least-squares fit of the declared entropy law to (epsilon, count) data."""
    eps = np.asarray(list(epsilons), dtype=float)
    cnt = np.asarray(list(counts), dtype=float)
    if len(eps) < 3:
        raise DomainError("need at least 3 radii")
    if np.any(np.diff(eps) >= 0):
        raise DomainError("radii must be strictly decreasing")
    if np.allclose(cnt, cnt[0]):
        raise DegenerateFitError("all counts equal; nothing to fit")
    x = np.log(1.0 / eps)
    if model == "vc":
        y = np.log(cnt)
    elif model == "br":
        if np.any(cnt <= 1):
            raise DegenerateFitError("br fit needs counts > 1 (log log)")
        y = np.log(np.log(cnt))
    else:
        raise ConfigError(f"unknown entropy model {model!r}")
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.abs(y - (slope * x + intercept)).max())
    if model == "vc":
        constants = {"c0": float(np.exp(intercept)), "nu0": float(slope)}
    else:
        constants = {"b0": float(np.exp(intercept / 2.0)), "r0": float(slope / 2.0)}
    return EntropyReport(
        tuple(float(e) for e in eps), tuple(int(c) for c in cnt), model, constants, resid
    )


def fit_entropy(cls: FunctionClass, P: Distribution, epsilons) -> EntropyReport:
    counts = [covering_number_dP(cls, P, e) for e in epsilons]
    return fit_entropy_counts(epsilons, counts, cls.regime.kind)


def uniform_covering_lower_bound(
    cls: FunctionClass,
    epsilon: float,
    n_support: int = 32,
    k_measures: int = 64,
    seed: int = 0,
    extra_measures=(),
) -> int:
    """Lower bound of the uniform covering number at radius eps * M/2.

    Maximizes the d_Q covering count over random discrete measures Q plus any
    supplied ones. Can falsify a declared polynomial bound, never certify it.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(99,))))
    radius = epsilon * cls.envelope / 2.0
    mesh = list(cls.mesh)
    worst = 1
    measures = [
        rng.random((n_support, cls.dim)) if cls.dim > 1 else rng.random(n_support)
        for _ in range(k_measures)
    ]
    measures.extend(np.asarray(m, dtype=float) for m in extra_measures)
    for pts in measures:
        vals = cls.evaluate_matrix(mesh, np.asarray(pts))
        diff = vals[:, :, None] - vals[:, None, :]
        d = np.sqrt((diff**2).mean(axis=0))
        worst = max(worst, len(_greedy_cover(d < radius)))
    return worst


def class_from_spec(spec: dict) -> FunctionClass:
    """Build a FunctionClass from a config dictionary."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("class spec must be a dict with a 'kind'")
    kind = spec["kind"]
    regime = None
    if "regime" in spec:
        r = spec["regime"]
        if r.get("type") == "vc":
            regime = EntropyRegime("vc", c0=float(r.get("c0", 1.0)), nu0=float(r.get("nu0", 1.0)))
        elif r.get("type") == "br":
            regime = EntropyRegime("br", b0=float(r.get("b0", 1.0)), r0=float(r.get("r0", 0.5)))
        else:
            raise ConfigError(f"unknown regime type {r.get('type')!r}")
    kwargs = dict(
        kind=kind,
        envelope=float(spec.get("M", 2.0)),
        regime=regime,
        mesh_size=int(spec.get("mesh_size", 1000)),
    )
    if kind == "rectangles":
        kwargs["dim"] = int(spec.get("dim", 2))
    if kind == "holder":
        kwargs.update(
            holder_exponent=float(spec.get("s", 1.0)),
            holder_radius=float(spec.get("R", 1.0)),
            knot_count=int(spec.get("knots", 9)),
            mesh_seed=int(spec.get("mesh_seed", 20260815)),
            mesh_size=int(spec.get("mesh_size", 64)),
        )
    if kind == "finite":
        kwargs["members"] = tuple(spec.get("members", ()))
        kwargs["mesh_size"] = len(kwargs["members"]) or 1
    return FunctionClass(**kwargs)
