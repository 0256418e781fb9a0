"""Generalized-annulus operators U(psi) e^{-t L(rho)} U(gamma)* on Virasoro truncations.

The e^{-tL(rho)} factor is exact on a level truncation (L(rho) only lowers
levels).  Factors involving two-sided smeared fields, like e^{isL(g)}, are
exponentials of compressions and carry a ``exact = False`` flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
import scipy.linalg

from .exact import fmt_fraction
from .geometry import CircleFlow, Mobius
from .virasoro import (
    VermaTruncation,
    exp_annulus_matrix,
    mode_matrix,
    smeared_mode_matrix,
)

__all__ = [
    "TruncatedAnnulusOp",
    "PHASE_CONVENTION",
    "build_exact_part",
    "build_diffeo_factor",
    "unitarity_deviation",
    "trotter_product",
    "trotter_cauchy_distances",
    "pullback_fourier",
    "covariance_check",
    "compose_annuli",
    "mobius_factor",
]

PHASE_CONVENTION = "lift fixed by U(rotation by theta) = exp(i theta L0) on the truncation"


@dataclass
class TruncatedAnnulusOp:
    c: object
    h: object
    cutoff: int
    matrix: np.ndarray
    path: str
    exact: bool
    N: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def provenance(self) -> dict:
        out = {"c": fmt_fraction(self.c), "h": fmt_fraction(self.h), "cutoff": self.cutoff,
               "path": self.path, "N": self.N, "exact": self.exact,
               "phase_convention": PHASE_CONVENTION}
        out.update(self.extra)
        return out

    def provenance_json(self) -> str:
        return json.dumps(self.provenance, sort_keys=True)

    def adjoint(self) -> "TruncatedAnnulusOp":
        return replace(self, matrix=self.matrix.conj().T, path=f"adjoint({self.path})")


def _op(trunc: VermaTruncation, cutoff, matrix, path, exact, N=None, **extra):
    return TruncatedAnnulusOp(trunc.params.c, trunc.params.h, cutoff, matrix, path, exact, N, extra)


def _cut(trunc: VermaTruncation, cutoff):
    return trunc.cutoff if cutoff is None else cutoff


def build_exact_part(trunc: VermaTruncation, rho_coeffs: Mapping[int, complex], t: float,
                     cutoff: int | None = None) -> TruncatedAnnulusOp:
    cutoff = _cut(trunc, cutoff)
    m = exp_annulus_matrix(trunc, rho_coeffs, t, cutoff)
    return _op(trunc, cutoff, m.matrix, "exact", True)


def _hermitian_exp(H: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H, via its eigendecomposition."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(scale * w)) @ V.conj().T


def _smeared(trunc, coeffs, cutoff) -> np.ndarray:
    return smeared_mode_matrix(trunc, coeffs, cutoff).matrix


def _hermitian_part(A: np.ndarray) -> np.ndarray:
    return (A + A.conj().T) / 2


def build_diffeo_factor(trunc: VermaTruncation, g_fourier: Mapping[int, complex], s: float,
                        cutoff: int | None = None, working_cutoff: int | None = None
                        ) -> TruncatedAnnulusOp:
    """Compression to ``cutoff`` of exp(i s L(g)) evaluated at ``working_cutoff``.

    With ``working_cutoff == cutoff`` (the default) the result is exactly
    unitary up to round-off.  A larger working cutoff models the compression of
    the untruncated unitary, whose deviation from unitarity measures the
    leakage out of the low levels.
    """
    cutoff = _cut(trunc, cutoff)
    work = cutoff if working_cutoff is None else working_cutoff
    if work < cutoff or work > trunc.cutoff:
        raise ValueError("working cutoff must lie between cutoff and the truncation cutoff")
    H = _hermitian_part(_smeared(trunc, g_fourier, work))
    U = _hermitian_exp(H, 1j * s)
    dim = trunc.offsets(cutoff)[-1]
    U = U[:dim, :dim]
    dev = unitarity_deviation(U)
    return _op(trunc, cutoff, U, "diffeo", False, working_cutoff=work, unitarity_deviation=dev)


def unitarity_deviation(U: np.ndarray) -> float:
    return float(np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0]), 2))


def trotter_product(trunc: VermaTruncation, f_fourier: Mapping[int, complex],
                    g_fourier: Mapping[int, complex], t: float, N: int,
                    cutoff: int | None = None) -> TruncatedAnnulusOp:
    """(e^{-itL(g)/N} e^{-tL(f)/N})^N with both factors built from compressions."""
    if N < 1:
        raise ValueError("N must be >= 1")
    cutoff = _cut(trunc, cutoff)
    Lf = _hermitian_part(_smeared(trunc, f_fourier, cutoff))
    Lg = _hermitian_part(_smeared(trunc, g_fourier, cutoff))
    step = _hermitian_exp(Lg, -1j * t / N) @ _hermitian_exp(Lf, -t / N)
    return _op(trunc, cutoff, np.linalg.matrix_power(step, N), "trotter", False, N)


def trotter_cauchy_distances(trunc, f_fourier, g_fourier, t, Ns, cutoff=None) -> dict[int, float]:
    """Operator-norm distances d(N, 2N) between successive Trotter products."""
    cache: dict[int, np.ndarray] = {}

    def prod(n):
        if n not in cache:
            cache[n] = trotter_product(trunc, f_fourier, g_fourier, t, n, cutoff).matrix
        return cache[n]

    return {n: float(np.linalg.norm(prod(2 * n) - prod(n), 2)) for n in Ns}


# ---------------------------------------------------------------------------
# stress-energy covariance


def _trig_eval(coeffs: Mapping[int, complex], theta: np.ndarray) -> np.ndarray:
    out = np.zeros_like(theta, dtype=complex)
    for n, a in coeffs.items():
        out += a * np.exp(1j * n * theta)
    return out


def pullback_fourier(f_fourier: Mapping[int, complex], flow: CircleFlow, s: float,
                     convention: str = "multiply", log2_samples: int = 8,
                     band: int | None = None) -> dict[int, complex]:
    """Fourier data of gamma_s' * (f o gamma_s) ("multiply") or (f o gamma_s) / gamma_s' ("divide").

    The "divide" form is the pushforward of the vector field f d/dtheta by gamma_{-s}.
    """
    n = 2 ** log2_samples
    theta = 2 * np.pi * np.arange(n) / n
    moved = flow.gamma(s, theta)
    deriv = flow.derivative(s, theta)
    vals = _trig_eval(f_fourier, moved)
    if convention == "multiply":
        vals = vals * deriv
    elif convention == "divide":
        vals = vals / deriv
    else:
        raise ValueError(f"unknown convention {convention!r}")
    coeffs = np.fft.fft(vals) / n
    band = n // 2 - 1 if band is None else band
    return {k: complex(coeffs[k % n]) for k in range(-band, band + 1) if abs(coeffs[k % n]) > 1e-15}


def covariance_check(trunc: VermaTruncation, f_fourier: Mapping[int, complex], g_flow: CircleFlow,
                     t: float, N: int, j: int, cutoff: int | None = None,
                     convention: str = "divide", compare_levels: int | None = None) -> dict:
    """Compare U(gamma_{t/N}) e^{-tL(f_j)/N} U(gamma_{t/N})* with e^{-tL(f_{j+1})/N}.

    f_j is the transport of f along the flow by time -tj/N.  Both sides are
    built from compressions at ``cutoff``; they are compared on the levels
    <= ``compare_levels`` (default: all).  alpha is the Frobenius least-squares
    scalar <B, A>/<A, A> and the residual is ||alpha A - B||_F / ||B||_F.
    """
    if not 0 <= j < N:
        raise ValueError("need 0 <= j < N")
    cutoff = _cut(trunc, cutoff)
    g_hat = g_flow.g_hat
    s = t / N
    fj = pullback_fourier(f_fourier, g_flow, -t * j / N, convention) if j else dict(f_fourier)
    fj1 = pullback_fourier(f_fourier, g_flow, -t * (j + 1) / N, convention)
    U = build_diffeo_factor(trunc, g_hat, s, cutoff).matrix
    Lfj = _hermitian_part(_smeared(trunc, fj, cutoff))
    Lfj1 = _hermitian_part(_smeared(trunc, fj1, cutoff))
    lhs = U @ _hermitian_exp(Lfj, -s) @ U.conj().T
    rhs = _hermitian_exp(Lfj1, -s)
    if compare_levels is not None:
        k = trunc.offsets(cutoff)[compare_levels + 1]
        lhs, rhs = lhs[:k, :k], rhs[:k, :k]
    # B = alpha A: A is the transported side, B the target
    A, B = rhs, lhs
    alpha = np.vdot(A, B) / np.vdot(A, A)
    residual = float(np.linalg.norm(alpha * A - B) / np.linalg.norm(B))
    return {"alpha_estimate": complex(alpha), "residual": residual}


# ---------------------------------------------------------------------------


def compose_annuli(opA: TruncatedAnnulusOp, opB: TruncatedAnnulusOp) -> TruncatedAnnulusOp:
    """The product opA @ opB (apply B first)."""
    if (opA.c, opA.h, opA.cutoff) != (opB.c, opB.h, opB.cutoff):
        raise ValueError("operators live on different truncations")
    if opA.matrix.shape != opB.matrix.shape:
        raise ValueError("shape mismatch")
    return TruncatedAnnulusOp(opA.c, opA.h, opA.cutoff, opA.matrix @ opB.matrix,
                              f"{opA.path}*{opB.path}", opA.exact and opB.exact)


def mobius_factor(trunc: VermaTruncation, psi: Mobius, cutoff: int | None = None
                  ) -> TruncatedAnnulusOp:
    """U(psi) as e^{alpha L_{-1}} lambda^{L_0} e^{conj(a) L_1} at truncation.

    Writing psi(z) = alpha + lambda z / (1 - conj(a) z) gives alpha = psi(0) and
    lambda = psi'(0).  Each factor's compression is exact (L_{-1} only raises,
    L_1 only lowers), the product of compressions is not.
    """
    cutoff = _cut(trunc, cutoff)
    a = complex(psi.a)
    alpha = complex(psi(0))
    lam = np.exp(1j * psi.beta) * (1 - abs(a) ** 2)
    Lm1 = mode_matrix(trunc, -1, cutoff)
    L1 = mode_matrix(trunc, 1, cutoff)
    offs = trunc.offsets(cutoff)
    weights = np.concatenate([np.full(offs[n + 1] - offs[n], float(trunc.params.h) + n)
                              for n in range(cutoff + 1)])
    D = np.diag(np.exp(weights * np.log(lam)))
    M = scipy.linalg.expm(alpha * Lm1) @ D @ scipy.linalg.expm(np.conj(a) * L1)
    return _op(trunc, cutoff, M, "mobius", False)
