"""Univalent semigroups from Koenigs maps, their generators and annulus interiors.

A normalized Koenigs map sigma (sigma(0) = 0, sigma'(0) = 1) determines the
semigroup phi_t = sigma^{-1}(e^{-t} sigma) with generator
rho(z) = sigma(z) / (z sigma'(z)), i.e. d/dt phi_t = -phi_t rho(phi_t).
Everything here is binary64.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "GeometryError",
    "SingularGenerator",
    "IntegrationError",
    "BandLimitWarning",
    "KoenigsMap",
    "SemigroupSpec",
    "Mobius",
    "CircleFlow",
    "AnnulusSpec",
    "Region",
    "parse_koenigs",
    "circle_points",
    "interior_samples",
    "rho_from_koenigs",
    "evolve_phi",
    "koenigs_functional_check",
    "split_rho",
    "annulus_interior",
    "phi_closed_form",
    "real_part_fourier",
]

DEFAULT_TOL = 1e-10
DEFAULT_LOG2_SAMPLES = 9


class GeometryError(ValueError):
    pass


class SingularGenerator(GeometryError):
    pass


class IntegrationError(GeometryError):
    pass


class BandLimitWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KoenigsMap:
    """sigma and sigma' as vectorized callables, plus a descriptor for reports."""

    sigma: Callable[[np.ndarray], np.ndarray]
    dsigma: Callable[[np.ndarray], np.ndarray]
    descriptor: object = "custom"
    mobius_a: float | None = None

    def __post_init__(self):
        s0 = complex(np.asarray(self.sigma(np.array([0j])))[0])
        d0 = complex(np.asarray(self.dsigma(np.array([0j])))[0])
        if abs(s0) > 1e-12:
            raise GeometryError(f"Koenigs map must fix 0 (sigma(0) = {s0})")
        if abs(d0 - 1) > 1e-10:
            raise GeometryError(f"Koenigs map must have sigma'(0) = 1 (got {d0})")

    @classmethod
    def identity(cls) -> "KoenigsMap":
        return cls(lambda z: np.asarray(z, dtype=complex),
                   lambda z: np.ones_like(np.asarray(z, dtype=complex)),
                   "identity", 0.0)

    @classmethod
    def mobius(cls, a) -> "KoenigsMap":
        """sigma(z) = z / (1 - a z), whose generator is rho = 1 - a z."""
        a = float(Fraction(str(a)))
        if abs(a) >= 1:
            raise GeometryError("mobius Koenigs map needs |a| < 1")
        return cls(lambda z: np.asarray(z, dtype=complex) / (1 - a * np.asarray(z, dtype=complex)),
                   lambda z: 1 / (1 - a * np.asarray(z, dtype=complex)) ** 2,
                   f"mobius:a={Fraction(str(a)).limit_denominator(10**6)}", a)

    @classmethod
    def series(cls, coeffs: Sequence[complex]) -> "KoenigsMap":
        """sigma(z) = sum_k coeffs[k-1] z^k (so coeffs[0] must be 1)."""
        c = np.asarray([0] + [complex(x) for x in coeffs], dtype=complex)
        dc = c[1:] * np.arange(1, len(c))
        return cls(lambda z: np.polyval(c[::-1], np.asarray(z, dtype=complex)),
                   lambda z: np.polyval(dc[::-1], np.asarray(z, dtype=complex)),
                   {"series": [str(x) for x in coeffs]})

    def rho(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.mobius_a is not None:
            return 1 - self.mobius_a * z
        out = np.empty_like(z)
        small = np.abs(z) < 1e-8
        ds = self.dsigma(z)
        out[~small] = self.sigma(z[~small]) / (z[~small] * ds[~small])
        out[small] = 1.0
        return out

    def vector_field(self, w: np.ndarray) -> np.ndarray:
        """-w rho(w) = -sigma(w) / sigma'(w), regular at w = 0."""
        w = np.asarray(w, dtype=complex)
        return -self.sigma(w) / self.dsigma(w)


def parse_koenigs(desc) -> KoenigsMap:
    if isinstance(desc, KoenigsMap):
        return desc
    if isinstance(desc, dict):
        if "koenigs" in desc:
            return parse_koenigs(desc["koenigs"])
        if "series" in desc:
            return KoenigsMap.series([complex(Fraction(str(x))) if not isinstance(x, complex) else x
                                      for x in desc["series"]])
    if isinstance(desc, str):
        if desc == "identity":
            return KoenigsMap.identity()
        if desc.startswith("mobius:a="):
            return KoenigsMap.mobius(desc.split("=", 1)[1])
    raise GeometryError(f"unknown Koenigs descriptor {desc!r}")


def circle_points(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def interior_samples(n: int, seed: int = 0, radius: float = 0.95) -> np.ndarray:
    """Deterministic pseudo-random points of the open disk of the given radius."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


@dataclass
class SemigroupSpec:
    koenigs: KoenigsMap
    log2_samples: int = DEFAULT_LOG2_SAMPLES
    tol: float = DEFAULT_TOL
    rho_samples: np.ndarray = field(init=False, repr=False)
    rho_hat: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.rho_samples, self.rho_hat = rho_from_koenigs(self.koenigs, self.log2_samples)

    def rho_coeffs(self, cutoff: int | None = None, drop: float = 1e-14) -> dict[int, complex]:
        return {n: a for n, a in self.rho_hat.items()
                if abs(a) > drop and (cutoff is None or abs(n) <= cutoff)}


def rho_from_koenigs(sigma: KoenigsMap, log2_samples: int = DEFAULT_LOG2_SAMPLES,
                     tol: float = 1e-12, band_warn: float = 1e-8):
    """Samples of rho on 2^k circle points and its Fourier coefficients.

    Returns ``(samples, rho_hat)`` with ``rho_hat[n]`` for |n| <= 2^(k-1).
    """
    n = 2 ** log2_samples
    z = circle_points(n)
    ds = sigma.dsigma(z)
    if np.min(np.abs(ds)) <= tol:
        raise SingularGenerator("sigma' vanishes at a circle sample")
    samples = sigma.sigma(z) / (z * ds)
    if not np.all(np.isfinite(samples)):
        raise SingularGenerator("rho is unbounded on the circle samples")
    coeffs = np.fft.fft(samples) / n
    half = n // 2
    rho_hat = {k: complex(coeffs[k % n]) for k in range(-half + 1, half)}
    top = max(abs(coeffs[half]), abs(coeffs[half - 1]), abs(coeffs[half + 1]))
    if top > band_warn * max(1.0, np.max(np.abs(coeffs))):
        warnings.warn(f"generator has Fourier energy {top:.2e} near the band edge; "
                      "increase the sample count", BandLimitWarning, stacklevel=2)
    return samples, rho_hat


def _as_spec(spec) -> SemigroupSpec:
    if isinstance(spec, SemigroupSpec):
        return spec
    return SemigroupSpec(parse_koenigs(spec))


def evolve_phi(spec, t: float, z_samples, tol: float | None = None) -> np.ndarray:
    """phi_t(z) by RK45 integration of d/dt phi = -sigma(phi)/sigma'(phi)."""
    spec = _as_spec(spec)
    tol = spec.tol if tol is None else tol
    z = np.atleast_1d(np.asarray(z_samples, dtype=complex))
    if t < 0:
        raise GeometryError("t must be >= 0")
    if np.any(np.abs(z) > 1 + 1e-12):
        raise GeometryError("samples must lie in the closed unit disk")
    if t == 0:
        return z.copy()
    vf = spec.koenigs.vector_field
    sol = solve_ivp(lambda _s, w: vf(w), (0.0, float(t)), z, method="RK45",
                    atol=tol * 1e-2, rtol=tol * 1e-2)
    if not sol.success:
        raise IntegrationError(sol.message)
    path = sol.y
    if np.any(np.abs(path) > 1 + 10 * tol):
        raise IntegrationError("trajectory left the closed unit disk")
    return path[:, -1]


def phi_closed_form(koenigs: KoenigsMap, t: float, z) -> np.ndarray:
    """Closed-form phi_t for the identity and Mobius Koenigs maps."""
    if koenigs.mobius_a is None:
        raise GeometryError("no closed form for this Koenigs map")
    a = koenigs.mobius_a
    z = np.asarray(z, dtype=complex)
    e = math.exp(-t)
    return e * z / (1 - a * z * (1 - e))


def koenigs_functional_check(spec, t: float, z_samples, tol: float | None = None) -> float:
    """max |sigma(phi_t(z)) - e^{-t} sigma(z)| over the samples."""
    spec = _as_spec(spec)
    z = np.atleast_1d(np.asarray(z_samples, dtype=complex))
    if t == 0:
        return 0.0
    w = evolve_phi(spec, t, z, tol)
    s = spec.koenigs.sigma
    return float(np.max(np.abs(s(w) - math.exp(-t) * s(z))))


# ---------------------------------------------------------------------------
# circle flows


class CircleFlow:
    """Flow of d theta/ds = g(theta) on the circle, g a real trigonometric polynomial.

    ``gamma(s, theta)`` returns the time-s map; ``derivative(s, theta)`` its
    theta-derivative, from the variational equation.
    """

    def __init__(self, g_hat: dict[int, complex], tol: float = DEFAULT_TOL):
        self.g_hat = {int(n): complex(a) for n, a in g_hat.items() if abs(a) > 0}
        self.tol = tol

    def g(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta, dtype=complex)
        for n, a in self.g_hat.items():
            out += a * np.exp(1j * n * theta)
        return out.real

    def dg(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta, dtype=complex)
        for n, a in self.g_hat.items():
            out += 1j * n * a * np.exp(1j * n * theta)
        return out.real

    @property
    def trivial(self) -> bool:
        return not self.g_hat

    def _solve(self, s: float, theta: np.ndarray):
        m = theta.size

        def rhs(_u, y):
            th, d = y[:m], y[m:]
            return np.concatenate([self.g(th), self.dg(th) * d])

        y0 = np.concatenate([theta, np.ones(m)])
        sol = solve_ivp(rhs, (0.0, float(s)), y0, method="RK45",
                        atol=self.tol * 1e-2, rtol=self.tol * 1e-2)
        if not sol.success:
            raise IntegrationError(sol.message)
        return sol.y[:m, -1], sol.y[m:, -1]

    def gamma(self, s: float, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if s == 0 or self.trivial:
            return theta.copy()
        return self._solve(s, theta)[0]

    def derivative(self, s: float, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if s == 0 or self.trivial:
            return np.ones_like(theta)
        return self._solve(s, theta)[1]


def split_rho(rho_samples: np.ndarray, tol: float = DEFAULT_TOL):
    """Split rho on the circle into f + i g with f, g real.

    Returns ``(f, g, flow)`` where ``flow`` integrates d theta/ds = g(theta).
    """
    rho_samples = np.asarray(rho_samples, dtype=complex)
    n = rho_samples.size
    f = rho_samples.real.copy()
    g = rho_samples.imag.copy()
    g_hat = np.fft.fft(g) / n
    half = n // 2
    coeffs = {k: complex(g_hat[k % n]) for k in range(-half + 1, half) if abs(g_hat[k % n]) > 1e-14}
    return f, g, CircleFlow(coeffs, tol)


def real_part_fourier(rho_hat: dict[int, complex]) -> tuple[dict, dict]:
    """Fourier coefficients of f = Re rho and g = Im rho on the circle."""
    keys = set(rho_hat) | {-n for n in rho_hat}
    f_hat, g_hat = {}, {}
    for n in sorted(keys):
        a = rho_hat.get(n, 0)
        b = np.conj(rho_hat.get(-n, 0))
        fv, gv = (a + b) / 2, (a - b) / 2j
        if abs(fv) > 1e-15:
            f_hat[n] = complex(fv)
        if abs(gv) > 1e-15:
            g_hat[n] = complex(gv)
    return f_hat, g_hat


# ---------------------------------------------------------------------------
# annuli


@dataclass(frozen=True)
class Mobius:
    """psi(z) = e^{i beta} (z - a) / (1 - conj(a) z), |a| < 1."""

    a: complex = 0j
    beta: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise GeometryError("Mobius parameter must satisfy |a| < 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.beta) * (z - self.a) / (1 - np.conj(self.a) * z)

    def to_json(self) -> dict:
        return {"a": [float(np.real(self.a)), float(np.imag(self.a))], "beta": float(self.beta)}


@dataclass
class AnnulusSpec:
    psi: Mobius
    rho: SemigroupSpec
    t: float
    gamma: CircleFlow | None = None

    def __post_init__(self):
        if self.t < 0:
            raise GeometryError("t must be >= 0")


@dataclass
class Region:
    outer: np.ndarray
    inner: np.ndarray
    resolution: float
    empty: bool = False
    warning: str | None = None

    def _classify(self, z: complex) -> str:
        if self.empty:
            return "outside"
        margin = 2 * self.resolution
        if _dist_to_polygon(z, self.outer) < margin or _dist_to_polygon(z, self.inner) < margin:
            return "indeterminate"
        in_outer = _winding(z, self.outer) != 0
        in_inner = _winding(z, self.inner) != 0
        return "inside" if in_outer and not in_inner else "outside"

    def contains(self, z) -> list[str] | str:
        if np.ndim(z) == 0:
            return self._classify(complex(z))
        return [self._classify(complex(w)) for w in np.ravel(z)]

    def to_json(self) -> dict:
        pts = lambda poly: [[float(p.real), float(p.imag)] for p in poly]
        return {"outer": pts(self.outer), "inner": pts(self.inner),
                "empty": self.empty, "resolution": self.resolution,
                "warning": self.warning}


def _winding(z: complex, poly: np.ndarray) -> int:
    d = poly - z
    ang = np.angle(np.roll(d, -1) / d)
    return int(round(ang.sum() / (2 * np.pi)))


def _dist_to_polygon(z: complex, poly: np.ndarray) -> float:
    a = poly
    b = np.roll(poly, -1)
    ab = b - a
    denom = np.abs(ab) ** 2
    u = np.clip(np.real((z - a) * np.conj(ab)) / np.where(denom > 0, denom, 1), 0, 1)
    return float(np.min(np.abs(a + u * ab - z)))


def annulus_interior(spec: AnnulusSpec, resolution: float = 1e-2) -> Region:
    """Polygonal approximation of psi(open disk minus phi_t(closed disk))."""
    n = max(64, int(math.ceil(2 * math.pi / resolution)))
    circle = circle_points(n)
    outer = spec.psi(circle)
    if spec.t == 0:
        return Region(outer, outer.copy(), resolution, empty=True)
    inner = spec.psi(evolve_phi(spec.rho, spec.t, circle))
    gap = min(_dist_to_polygon(w, outer) for w in inner)
    if gap < resolution:
        msg = f"region thinner than resolution ({gap:.3g} < {resolution:.3g}); treated as empty"
        warnings.warn(msg, stacklevel=2)
        return Region(outer, inner, resolution, empty=True, warning=msg)
    return Region(outer, inner, resolution)
