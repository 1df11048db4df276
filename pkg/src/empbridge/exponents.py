"""Exact rate exponents, computed in rational arithmetic.

Two entropy regimes drive every rate in the package. Under a polynomial
covering profile with index nu0 the single-n coupling rate is n^{-tau1} times
(log n)^{tau2}, and a blocked construction with block growth k^alpha achieves
the path rate n^{1/2 - tau(alpha)}. Under an exponential profile with index
r0 the rates are logarithmic: (log n)^{-kappa} for a single n and
sqrt(n) (log n)^{-tau} along blocked paths. All five exponents are small
rationals, so they are computed and reported as Fractions, never floats.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError, DomainError


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (str, float)):
        try:
            return Fraction(str(x) if isinstance(x, float) else x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot interpret {x!r} as an exact rational") from exc
    raise ConfigError(f"cannot interpret {x!r} as an exact rational")


def rate_vc(nu0) -> tuple[Fraction, Fraction]:
    """Exponent pair (tau1, tau2) = (1/(2+5 nu0), (4+5 nu0)/(4+10 nu0))."""
    nu0 = _as_fraction(nu0)
    if nu0 <= 0:
        raise DomainError("nu0 must be positive")
    return Fraction(1) / (2 + 5 * nu0), (4 + 5 * nu0) / (4 + 10 * nu0)


def rate_thm1(alpha, tau1) -> Fraction:
    """Path rate exponent tau(alpha) = (alpha tau1 - 1/2) / (1 + alpha),
    defined on the strict window 1/(2 tau1) < alpha < 1/tau1."""
    alpha, tau1 = _as_fraction(alpha), _as_fraction(tau1)
    if tau1 <= 0:
        raise DomainError("tau1 must be positive")
    if not (Fraction(1, 2) < alpha * tau1 < 1):
        raise DomainError(
            f"alpha = {alpha} violates 1/2 < tau1 alpha < 1 (tau1 = {tau1})"
        )
    return (alpha * tau1 - Fraction(1, 2)) / (1 + alpha)


def rate_br(r0) -> Fraction:
    """Log-rate exponent kappa = (1 - r0) / (2 r0)."""
    r0 = _as_fraction(r0)
    if not (0 < r0 < 1):
        raise DomainError("r0 must lie in (0, 1)")
    return (1 - r0) / (2 * r0)


def rate_thm2(kappa) -> tuple[Fraction, Fraction]:
    """(theta, tau) with theta = kappa (1/2 - kappa), tau = theta / (1 - kappa)."""
    kappa = _as_fraction(kappa)
    if not (0 < kappa < Fraction(1, 2)):
        raise DomainError("kappa must lie in (0, 1/2)")
    theta = kappa * (Fraction(1, 2) - kappa)
    tau = theta / (1 - kappa)
    return theta, tau
