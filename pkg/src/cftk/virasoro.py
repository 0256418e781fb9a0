"""Truncated Verma modules M(c,h), their unitary quotients L(c,h), and mode matrices.

Basis convention: a level-n PBW monomial is a partition ``lam = (l1, ..., lk)``
with ``l1 >= ... >= lk >= 1`` and stands for ``L_{-l1} ... L_{-lk} v``.  Levels
are listed in reverse-lexicographic order, so level 2 is ``(L_{-2}v, L_{-1}^2 v)``.

All algebra is exact over Q.  Float matrices appear only at the boundary
(:func:`smeared_mode_matrix`, :func:`exp_annulus_matrix`), expressed in an
orthonormal frame obtained from the exact LDL^T factors of the Gram blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
import scipy.linalg

from .exact import (
    ExactScalar,
    NotPositiveSemidefinite,
    as_fraction,
    enumerate_partitions,
    fmt_fraction,
    ldl,
)

__all__ = [
    "VirasoroParams",
    "VermaModule",
    "VermaTruncation",
    "IrreducibleTruncation",
    "ModeMatrix",
    "CutoffOverflow",
    "verma_basis",
    "apply_ln",
    "gram_matrix",
    "irreducible_truncation",
    "smeared_mode_matrix",
    "mode_matrix",
    "level_weights",
    "exp_annulus_matrix",
    "sl2_norm_experiment",
    "sl2_bound",
    "discrete_series",
]


class CutoffOverflow(ValueError):
    """A raising mode pushed a state past the working cutoff."""


@dataclass(frozen=True)
class VirasoroParams:
    c: Fraction
    h: Fraction

    def __post_init__(self):
        c, h = as_fraction(self.c), as_fraction(self.h)
        if h < 0:
            raise ValueError("lowest weight h must be >= 0")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "h", h)

    @classmethod
    def parse(cls, c, h) -> "VirasoroParams":
        if isinstance(c, ExactScalar) or isinstance(h, ExactScalar):
            return cls(as_fraction(c), as_fraction(h))
        return cls(Fraction(str(c)), Fraction(str(h)))

    def to_json(self) -> dict:
        return {"c": fmt_fraction(self.c), "h": fmt_fraction(self.h)}


def discrete_series(m: int) -> tuple[Fraction, list[Fraction]]:
    """Central charge c = 1 - 6/((m+2)(m+3)) and its allowed lowest weights."""
    p, q = m + 2, m + 3
    c = 1 - Fraction(6, p * q)
    hs = set()
    for r in range(1, p):
        for s in range(1, r + 1):
            hs.add(Fraction((q * r - p * s) ** 2 - 1, 4 * p * q))
    return c, sorted(hs)


class VermaModule:
    """Exact action of the Virasoro modes on PBW monomials of M(c,h).

    Results are memoized per instance; instances are cheap, so use one per
    evaluation context.
    """

    def __init__(self, params: VirasoroParams):
        self.params = params
        self.c = params.c
        self.h = params.h
        self._memo: dict = {}

    def apply_monomial(self, n: int, lam: tuple) -> dict:
        key = (n, lam)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._apply_monomial(n, lam)
        self._memo[key] = out
        return out

    def _apply_monomial(self, n: int, lam: tuple) -> dict:
        if n == 0:
            return {lam: self.h + sum(lam)}
        if n < 0:
            m = -n
            if not lam or m >= lam[0]:
                return {(m,) + lam: Fraction(1)}
            first, rest = lam[0], lam[1:]
            # L_{-m} L_{-first} = L_{-first} L_{-m} + (first - m) L_{-m-first}
            out = self.apply(-first, self.apply_monomial(-m, rest))
            _axpy(out, first - m, self.apply_monomial(-(m + first), rest))
            return out
        if not lam:
            return {}
        first, rest = lam[0], lam[1:]
        # L_n L_{-first} = L_{-first} L_n + (n + first) L_{n-first} + central
        out = self.apply(-first, self.apply_monomial(n, rest))
        _axpy(out, n + first, self.apply_monomial(n - first, rest))
        if n == first:
            _axpy(out, self.c * (n ** 3 - n) / 12, {rest: Fraction(1)})
        return out

    def apply(self, n: int, vec: Mapping) -> dict:
        out: dict = {}
        for lam, coef in vec.items():
            if coef:
                _axpy(out, coef, self.apply_monomial(n, lam))
        return out

    def inner(self, lam: tuple, mu: tuple) -> Fraction:
        """<L_{-lam} v, L_{-mu} v> via the adjoint rule L_n^* = L_{-n}."""
        if sum(lam) != sum(mu):
            return Fraction(0)
        vec = {mu: Fraction(1)}
        for part in lam:
            vec = self.apply(part, vec)
        return vec.get((), Fraction(0))

    def gram(self, level: int) -> list[list[Fraction]]:
        basis = enumerate_partitions(level)
        n = len(basis)
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = self.inner(basis[i], basis[j])
        return g


def _axpy(acc: dict, a, vec: Mapping) -> None:
    for k, v in vec.items():
        s = acc.get(k, 0) + a * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


# ---------------------------------------------------------------------------
# truncations


@dataclass
class ModeMatrix:
    label: str
    domain_cutoff: int
    codomain_cutoff: int
    matrix: np.ndarray
    exact: bool = False
    basis: str = "orthonormal"


@dataclass
class _Level:
    level: int
    verma_basis: list          # all PBW monomials at this level
    selected: list             # indices of monomials kept as a quotient basis
    gram: list                 # exact Gram of the kept monomials
    quotient_map: list         # r x p(n) exact matrix: Verma coords -> quotient coords
    frame: np.ndarray          # float F with G_SS = F F^T


class VermaTruncation:
    """Levels 0..cutoff of M(c,h) with exact Gram blocks.

    ``gram`` is computed lazily per level.  When every Gram block is
    nonsingular the float layer uses an orthonormal frame, otherwise the raw
    PBW basis (``basis == "pbw"``).
    """

    quotient = False

    def __init__(self, params: VirasoroParams, cutoff: int):
        if cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        self.params = params
        self.cutoff = cutoff
        self.module = VermaModule(params)
        self.basis = [enumerate_partitions(n) for n in range(cutoff + 1)]
        self._gram: dict[int, list] = {}
        self._levels: dict[int, _Level] = {}

    def gram(self, level: int) -> list[list[Fraction]]:
        if level not in self._gram:
            self._gram[level] = self.module.gram(level)
        return self._gram[level]

    def level_data(self, level: int) -> _Level:
        if level not in self._levels:
            self._levels[level] = self._build_level(level)
        return self._levels[level]

    def _build_level(self, level: int) -> _Level:
        basis = enumerate_partitions(level)
        g = self.gram(level)
        p = len(basis)
        ident = [[Fraction(int(i == j)) for j in range(p)] for i in range(p)]
        try:
            selected, L, D = ldl(g)
        except NotPositiveSemidefinite:
            selected, L, D = [], [], []
        if len(selected) == p:
            frame = _float_frame(L, D)
        else:
            frame = np.eye(p)
            selected = list(range(p))
        return _Level(level, basis, selected, g, ident, frame)

    @property
    def orthonormal(self) -> bool:
        for n in range(self.cutoff + 1):
            d = self.level_data(n)
            try:
                sel, _, _ = ldl(d.gram)
            except NotPositiveSemidefinite:
                return False
            if len(sel) != len(d.verma_basis):
                return False
        return True

    def dims(self) -> list[int]:
        return [len(self.level_data(n).selected) for n in range(self.cutoff + 1)]

    def offsets(self, cutoff: int | None = None) -> list[int]:
        cutoff = self.cutoff if cutoff is None else cutoff
        offs, acc = [], 0
        for n in range(cutoff + 1):
            offs.append(acc)
            acc += len(self.level_data(n).selected)
        offs.append(acc)
        return offs

    def exact_mode_block(self, n: int, level: int) -> list[list[Fraction]] | None:
        """Exact matrix of L_n from level ``level`` to ``level - n`` in quotient coordinates."""
        target = level - n
        if target < 0 or target > self.cutoff:
            return None
        src = self.level_data(level)
        dst = self.level_data(target)
        pos = {lam: k for k, lam in enumerate(dst.verma_basis)}
        cols = []
        for j in src.selected:
            vec = self.module.apply_monomial(n, src.verma_basis[j])
            coords = [Fraction(0)] * len(dst.verma_basis)
            for lam, coef in vec.items():
                coords[pos[lam]] += coef
            q = [sum((row[k] * coords[k] for k in range(len(coords))), Fraction(0))
                 for row in dst.quotient_map]
            cols.append(q)
        return [list(r) for r in zip(*cols)] if cols else [[] for _ in dst.selected]


class IrreducibleTruncation(VermaTruncation):
    """Levels 0..cutoff of L(c,h) = M(c,h) / radical of the Gram form."""

    quotient = True

    def __init__(self, params: VirasoroParams, cutoff: int):
        super().__init__(params, cutoff)
        for n in range(cutoff + 1):
            self.level_data(n)

    def _build_level(self, level: int) -> _Level:
        basis = enumerate_partitions(level)
        g = self.gram(level)
        try:
            selected, L, D = ldl(g)
        except NotPositiveSemidefinite as exc:
            raise NotPositiveSemidefinite(
                f"Gram matrix of M({fmt_fraction(self.params.c)},{fmt_fraction(self.params.h)}) "
                f"is not positive semidefinite at level {level}: {exc}"
            ) from None
        r = len(selected)
        gss = [[g[i][j] for j in selected] for i in selected]
        gsall = [[g[i][j] for j in range(len(basis))] for i in selected]
        qmap = _solve(gss, gsall) if r else []
        return _Level(level, basis, selected, gss, qmap, _float_frame(L, D))

    @property
    def orthonormal(self) -> bool:
        return True

    def quotient_gram(self, level: int) -> list[list[Fraction]]:
        return self.level_data(level).gram


def _solve(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact solution X of A X = B for nonsingular A (Gauss-Jordan)."""
    n = len(a)
    m = [row[:] + brow[:] for row, brow in zip(a, b)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [row[n:] for row in m]


def _float_frame(L, D) -> np.ndarray:
    if not D:
        return np.zeros((0, 0))
    Lf = np.array([[float(x) for x in row] for row in L])
    return Lf * np.sqrt(np.array([float(d) for d in D]))[None, :]


# ---------------------------------------------------------------------------
# operations


def verma_basis(params: VirasoroParams, cutoff: int) -> VermaTruncation:
    return VermaTruncation(params, cutoff)


def apply_ln(params: VirasoroParams, n: int, state: Mapping, working_cutoff: int,
             module: VermaModule | None = None) -> dict:
    """Apply L_n to ``{partition: coefficient}`` and return the PBW-normal result."""
    module = module or VermaModule(params)
    out = module.apply(n, state)
    for lam in out:
        if sum(lam) > working_cutoff:
            raise CutoffOverflow(
                f"L_{n} produced level {sum(lam)} beyond working cutoff {working_cutoff}"
            )
    return out


def gram_matrix(params: VirasoroParams, level: int) -> list[list[Fraction]]:
    if level < 0:
        raise ValueError("level must be >= 0")
    return VermaModule(params).gram(level)


def irreducible_truncation(params: VirasoroParams, cutoff: int) -> IrreducibleTruncation:
    return IrreducibleTruncation(params, cutoff)


def _mode_matrix_exact_blocks(trunc: VermaTruncation, n: int, cutoff: int):
    offs = trunc.offsets(cutoff)
    for level in range(cutoff + 1):
        target = level - n
        if 0 <= target <= cutoff:
            blk = trunc.exact_mode_block(n, level)
            yield level, target, offs, blk


def mode_matrix(trunc: VermaTruncation, n: int, cutoff: int | None = None) -> np.ndarray:
    """Float matrix of L_n compressed to levels <= cutoff, in the truncation's frame."""
    cutoff = trunc.cutoff if cutoff is None else cutoff
    if cutoff > trunc.cutoff:
        raise ValueError("cutoff exceeds the truncation")
    cache = trunc.__dict__.setdefault("_float_modes", {})
    key = (n, cutoff)
    if key in cache:
        return cache[key]
    offs = trunc.offsets(cutoff)
    dim = offs[-1]
    out = np.zeros((dim, dim))
    for level, target, _, blk in _mode_matrix_exact_blocks(trunc, n, cutoff):
        if not blk or not blk[0]:
            continue
        b = np.array([[float(x) for x in row] for row in blk])
        fs = trunc.level_data(level).frame
        ft = trunc.level_data(target).frame
        # coordinates y = F^T x; operator in y-coords is F_t^T B F_s^{-T}
        b = ft.T @ b @ np.linalg.inv(fs.T)
        out[offs[target]:offs[target + 1], offs[level]:offs[level + 1]] = b
    cache[key] = out
    return out


def smeared_mode_matrix(trunc: VermaTruncation, coeffs: Mapping[int, complex],
                        cutoff: int | None = None) -> ModeMatrix:
    """Matrix of sum_n coeffs[n] L_n compressed to levels <= cutoff."""
    cutoff = trunc.cutoff if cutoff is None else cutoff
    dim = trunc.offsets(cutoff)[-1]
    out = np.zeros((dim, dim), dtype=complex)
    for n, a in coeffs.items():
        if a == 0 or abs(n) > cutoff:
            continue
        out += complex(a) * mode_matrix(trunc, int(n), cutoff)
    label = "L(" + ",".join(f"{n}:{complex(a):g}" for n, a in sorted(coeffs.items())) + ")"
    return ModeMatrix(label, cutoff, cutoff, out, exact=False,
                      basis="orthonormal" if trunc.orthonormal else "pbw")


def level_weights(trunc: VermaTruncation, cutoff: int | None = None) -> np.ndarray:
    cutoff = trunc.cutoff if cutoff is None else cutoff
    offs = trunc.offsets(cutoff)
    w = np.zeros(offs[-1])
    for n in range(cutoff + 1):
        w[offs[n]:offs[n + 1]] = float(trunc.params.h) + n
    return w


PARLETT_MIN_GAP = 0.05


def exp_annulus_matrix(trunc: VermaTruncation, rho_coeffs: Mapping[int, complex], t: float,
                       cutoff: int | None = None) -> ModeMatrix:
    """exp(-t L(rho)) on levels <= cutoff for rho supported on modes n >= 0.

    L(rho) only lowers levels, so the span of levels <= N is invariant and the
    compression is exact.  The exponential is evaluated with the block Parlett
    recurrence (diagonal blocks are scalars rho_0 (h + n)).  The recurrence
    divides by the gap t |rho_0| between neighbouring blocks, so below
    PARLETT_MIN_GAP (including rho_0 == 0) scipy's expm is used instead.
    """
    if any(n < 0 and a != 0 for n, a in rho_coeffs.items()):
        raise ValueError("rho must be supported on modes n >= 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    cutoff = trunc.cutoff if cutoff is None else cutoff
    A = smeared_mode_matrix(trunc, rho_coeffs, cutoff).matrix
    T = -t * A
    offs = trunc.offsets(cutoff)
    rho0 = complex(rho_coeffs.get(0, 0))
    if t == 0:
        F = np.eye(T.shape[0], dtype=complex)
    elif abs(t * rho0) < PARLETT_MIN_GAP:
        F = scipy.linalg.expm(T)
    else:
        F = _block_parlett_exp(T, offs, [-t * rho0 * (float(trunc.params.h) + n)
                                         for n in range(cutoff + 1)])
    label = f"exp(-{t:g} L(rho))"
    return ModeMatrix(label, cutoff, cutoff, F, exact=True,
                      basis="orthonormal" if trunc.orthonormal else "pbw")


def _block_parlett_exp(T: np.ndarray, offs: list[int], tau: list[complex]) -> np.ndarray:
    """exp(T) for block upper-triangular T whose diagonal blocks are tau_k * I."""
    nb = len(tau)
    F = np.zeros_like(T, dtype=complex)
    sl = [slice(offs[k], offs[k + 1]) for k in range(nb)]
    for k in range(nb):
        F[sl[k], sl[k]] = np.exp(tau[k]) * np.eye(offs[k + 1] - offs[k])
    for d in range(1, nb):
        for k in range(nb - d):
            l = k + d
            acc = np.zeros((offs[k + 1] - offs[k], offs[l + 1] - offs[l]), dtype=complex)
            for m in range(k, l):
                acc += F[sl[k], sl[m]] @ T[sl[m], sl[l]]
            for m in range(k + 1, l + 1):
                acc -= T[sl[k], sl[m]] @ F[sl[m], sl[l]]
            F[sl[k], sl[l]] = acc / (tau[k] - tau[l])
    return F


# ---------------------------------------------------------------------------
# sl(2) norm experiment


def sl2_bound(t: float, z: complex, r: float) -> float:
    s = abs(z) + r
    return s ** t / (r * math.sqrt(1.0 - s * s))


def sl2_operator(t: float, z: complex, r: float, cutoff: int) -> np.ndarray:
    """Compression of e^{z L_{-1}} r^{L_0} to span(xi_0..xi_cutoff) of V_t.

    Uses L_0 xi_n = (t+n) xi_n and L_{-1} xi_n = sqrt((n+2t)(n+1)) xi_{n+1}.
    e^{zL_{-1}} is lower triangular, so its compression is exact.
    """
    if t == 0:
        # V_0 is the trivial one-dimensional module
        return np.ones((1, 1), dtype=complex)
    N = cutoff + 1
    X = np.zeros((N, N), dtype=complex)
    logz = np.log(complex(z)) if z != 0 else None
    for m in range(N):
        base = r ** (t + m)
        X[m, m] = base
        if logz is None:
            continue
        logprod = 0.0
        for k in range(1, N - m):
            j = m + k - 1
            logprod += 0.5 * (math.log(j + 2 * t) + math.log(j + 1))
            X[m + k, m] = base * np.exp(k * logz + logprod - math.lgamma(k + 1))
    return X


def sl2_norm_experiment(t_lowest: float, z: complex, r: float, cutoff: int) -> dict:
    if r <= 0:
        raise ValueError("r must be > 0")
    if abs(z) + r >= 1:
        raise ValueError("need |z| + r < 1")
    if t_lowest < 0:
        raise ValueError("lowest weight must be >= 0")
    X = sl2_operator(t_lowest, z, r, cutoff)
    norm = float(np.linalg.norm(X, 2))
    return {"truncated_norm": norm, "bound": sl2_bound(t_lowest, z, r)}
