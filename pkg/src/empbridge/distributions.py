"""Sampling distributions on [0,1]^d.

Four kinds: uniform on [0,1], product-uniform on [0,1]^d, beta(a,b) on [0,1],
and discrete with explicit atoms and weights. Each knows how to draw i.i.d.
samples from a supplied generator and how to evaluate its 1-D CDF (used by
closed-form indicator moments).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConfigError, DomainError

KINDS = ("uniform", "product-uniform", "beta", "discrete")


@dataclass(frozen=True)
class Distribution:
    kind: str
    dim: int = 1
    a: float = 1.0
    b: float = 1.0
    atoms: tuple = field(default=())
    weights: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown distribution kind {self.kind!r}")
        if self.dim < 1:
            raise ConfigError("dimension must be >= 1")
        if self.kind in ("uniform", "beta") and self.dim != 1:
            raise ConfigError(f"{self.kind} distribution is one-dimensional")
        if self.kind == "beta" and (self.a <= 0 or self.b <= 0):
            raise ConfigError("beta shapes must be positive")
        if self.kind == "discrete":
            if not self.atoms:
                raise ConfigError("discrete distribution needs atoms")
            if len(self.atoms) != len(self.weights):
                raise ConfigError("atoms and weights must have equal length")
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0):
                raise ConfigError("weights must be nonnegative")
            if abs(float(w.sum()) - 1.0) > 1e-12:
                raise ConfigError(f"weights sum to {w.sum()}, not 1 within 1e-12")
            pts = self._atom_array()
            if pts.ndim != 2 or pts.shape[1] != self.dim:
                raise ConfigError("atom dimension does not match dim")
            if np.any(pts < 0.0) or np.any(pts > 1.0):
                raise ConfigError("atoms must lie in [0,1]^d")

    def _atom_array(self) -> np.ndarray:
        pts = np.asarray(self.atoms, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return pts

    @property
    def label(self) -> str:
        if self.kind == "beta":
            return f"beta({self.a:g},{self.b:g})"
        if self.kind == "product-uniform":
            return f"product-uniform(d={self.dim})"
        if self.kind == "discrete":
            return f"discrete({len(self.atoms)} atoms)"
        return self.kind

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. points; shape (n,) when dim == 1, else (n, dim)."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        if self.kind == "uniform":
            return rng.random(n)
        if self.kind == "product-uniform":
            out = rng.random((n, self.dim))
            return out[:, 0] if self.dim == 1 else out
        if self.kind == "beta":
            return rng.beta(self.a, self.b, size=n)
        pts = self._atom_array()
        idx = rng.choice(len(self.atoms), size=n, p=np.asarray(self.weights, float))
        out = pts[idx]
        return out[:, 0] if self.dim == 1 else out

    def cdf(self, x) -> np.ndarray | float:
        """CDF at x for one-dimensional kinds."""
        if self.dim != 1:
            raise DomainError("cdf is defined for one-dimensional distributions")
        xs = np.asarray(x, dtype=float)
        if self.kind == "uniform" or self.kind == "product-uniform":
            out = np.clip(xs, 0.0, 1.0)
        elif self.kind == "beta":
            out = special.betainc(self.a, self.b, np.clip(xs, 0.0, 1.0))
        else:
            pts = self._atom_array()[:, 0]
            w = np.asarray(self.weights, float)
            out = (w[None, :] * (pts[None, :] <= xs.reshape(-1, 1))).sum(axis=1)
            out = out.reshape(xs.shape)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def pdf(self, x) -> np.ndarray | float:
        """Density at x (absolutely continuous 1-D kinds only)."""
        if self.dim != 1:
            raise DomainError("pdf is defined for one-dimensional distributions")
        if self.kind == "discrete":
            raise DomainError("discrete distribution has no density")
        xs = np.asarray(x, dtype=float)
        if self.kind == "beta":
            if self.a < 1.0 or self.b < 1.0:
                raise DomainError(
                    "beta density unbounded at the endpoints for a < 1 or b < 1; "
                    "quadrature moments require a, b >= 1"
                )
            lognorm = (
                special.gammaln(self.a + self.b)
                - special.gammaln(self.a)
                - special.gammaln(self.b)
            )
            with np.errstate(divide="ignore"):
                out = np.where(
                    (xs >= 0) & (xs <= 1),
                    np.exp(lognorm)
                    * xs ** (self.a - 1.0)
                    * (1.0 - xs) ** (self.b - 1.0),
                    0.0,
                )
        else:
            out = np.where((xs >= 0) & (xs <= 1), 1.0, 0.0)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def to_spec(self) -> dict:
        spec = {"kind": self.kind}
        if self.kind == "product-uniform":
            spec["dim"] = self.dim
        if self.kind == "beta":
            spec["a"] = self.a
            spec["b"] = self.b
        if self.kind == "discrete":
            spec["atoms"] = [list(a) if hasattr(a, "__len__") else a for a in self.atoms]
            spec["weights"] = list(self.weights)
        return spec


def distribution_from_spec(spec: dict) -> Distribution:
    """Build a Distribution from a config dictionary."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("distribution spec must be a dict with a 'kind'")
    kind = spec["kind"]
    if kind == "discrete":
        atoms = tuple(
            tuple(a) if isinstance(a, (list, tuple)) else float(a)
            for a in spec.get("atoms", ())
        )
        dim = spec.get("dim")
        if dim is None:
            first = atoms[0] if atoms else 0.0
            dim = len(first) if isinstance(first, tuple) else 1
        return Distribution(
            kind, dim=int(dim), atoms=atoms, weights=tuple(spec.get("weights", ()))
        )
    return Distribution(
        kind,
        dim=int(spec.get("dim", 1)),
        a=float(spec.get("a", 1.0)),
        b=float(spec.get("b", 1.0)),
    )
