"""Descent intertwining operators Y(a, x) = p_K x^Delta Y(a, x)|_N at truncation.

The shipped instance is the parity decomposition of the charged fermion under
its even subalgebra W = V^0: V = V^0 + V^1.  Because every Fock state of
weight w has parity 2w mod 2, the parity projections are diagonal and commute
with L_0 and with every mode of an even state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .exact import fmt_fraction, parse_fraction
from .fermion import (
    PSI,
    VACUUM,
    FermionSpace,
    FermionVOA,
    FockState,
    _as_vec,
    _axpy,
    _parity_of_vec,
    _weight_of_vec,
    binom,
    format_state,
)

__all__ = [
    "GridError",
    "NotASubmodule",
    "SubmoduleProjection",
    "IntertwinerTruncation",
    "delta_shift",
    "descent_modes",
    "check_intertwiner_axioms",
    "parity_descent",
    "subalgebra_generators",
]


class GridError(ValueError):
    """A nonzero mode outside the configured grid was needed; widen the grid."""


class NotASubmodule(ValueError):
    pass


def delta_shift(delta_m, delta_n, delta_k) -> Fraction:
    """Delta = -Delta_K + Delta_M + Delta_N."""
    return -parse_fraction(delta_k) + parse_fraction(delta_m) + parse_fraction(delta_n)


@dataclass
class SubmoduleProjection:
    """Orthogonal projection onto a span of Fock basis states (diagonal in the basis)."""

    name: str
    keep: Callable[[FockState], bool]
    space: FermionSpace

    @classmethod
    def parity(cls, which: str, space: FermionSpace) -> "SubmoduleProjection":
        if which == "even":
            return cls("even", lambda s: s.parity == 0, space)
        if which == "odd":
            return cls("odd", lambda s: s.parity == 1, space)
        if which == "identity":
            return cls("identity", lambda s: True, space)
        raise ValueError(f"unknown parity projection {which!r}")

    @classmethod
    def span(cls, name: str, states: Iterable[FockState], space: FermionSpace):
        keep = frozenset(states)
        return cls(name, lambda s: s in keep, space)

    def apply(self, vec: Mapping) -> dict:
        return {s: c for s, c in vec.items() if self.keep(s)}

    def matrix(self) -> list[list[Fraction]]:
        n = self.space.dim
        return [[Fraction(int(i == j and self.keep(s))) for j in range(n)]
                for i, s in enumerate(self.space.states)]

    def is_idempotent_selfadjoint(self) -> bool:
        m = self.matrix()
        n = len(m)
        sq = [[sum(m[i][k] * m[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return sq == m and all(m[i][j] == m[j][i] for i in range(n) for j in range(n))

    def commutes_with_l0(self) -> bool:
        # diagonal in an L_0 eigenbasis
        return True


def subalgebra_generators() -> list[dict]:
    """Even states generating the modes the projections must commute with."""
    voa = FermionVOA()
    return [
        {FockState((1,), (1,)): Fraction(1)},            # U(1) current
        dict(voa.conformal_vector),
        {FockState((3, 1), ()): Fraction(1)},
        {FockState((), (3, 1)): Fraction(1)},
    ]


def _commutation_defects(p: SubmoduleProjection, voa: FermionVOA, cutoff_modes: int) -> list:
    bad = []
    for u in subalgebra_generators():
        for n in range(-cutoff_modes - 2, cutoff_modes + 3):
            for s in p.space.states:
                v = {s: Fraction(1)}
                lhs = p.apply(voa.apply_mode(u, n, v))
                rhs = voa.apply_mode(u, n, p.apply(v))
                if lhs != rhs:
                    bad.append((n, format_state(s)))
    return bad


@dataclass
class IntertwinerTruncation:
    """Modes a^Y_(k) = p_K a_(k + Delta) p_N for k in a shifted integer grid."""

    pK: SubmoduleProjection
    pN: SubmoduleProjection
    delta: Fraction
    grid: tuple
    voa: FermionVOA
    label: str = "Y"
    _corruptions: dict = field(default_factory=dict, repr=False)

    def in_grid(self, k) -> bool:
        return parse_fraction(k) in self.grid

    def mode(self, a: Mapping, k, vec: Mapping, strict: bool = True) -> dict:
        """a^Y_(k) applied to vec.  Raises GridError for nonzero modes off the grid."""
        k = parse_fraction(k)
        n = k + self.delta
        if n.denominator != 1:
            return {}
        out = self.pK.apply(self.voa.apply_mode(a, int(n), self.pN.apply(vec)))
        for s, ca in a.items():
            for c, cv in vec.items():
                hit = self._corruptions.get((s, k, c))
                if hit:
                    _axpy(out, ca * cv, hit)
        if strict and out and k not in self.grid:
            raise GridError(f"mode k={fmt_fraction(k)} is nonzero but outside the grid "
                            f"[{fmt_fraction(self.grid[0])}, {fmt_fraction(self.grid[-1])}]; widen it")
        return out

    def corrupt(self, a: FockState, k, c: FockState, b: FockState, amount=Fraction(1)) -> None:
        """Add ``amount`` to the (b, c) entry of a^Y_(k); for mutation tests."""
        key = (a, parse_fraction(k), c)
        self._corruptions.setdefault(key, {})
        _axpy(self._corruptions[key], 1, {b: Fraction(amount)})

    def grading_defects(self, a: Mapping) -> list:
        """(k, state) pairs violating a^Y_(k) V_alpha in V_{alpha - k - 1 + Delta_a}."""
        wa = _weight_of_vec(a)
        bad = []
        for k in self.grid:
            for s in self.pN.space.states:
                target = s.weight - k - 1 + wa
                for t in self.mode(a, k, {s: Fraction(1)}):
                    if t.weight != target:
                        bad.append((fmt_fraction(k), format_state(s)))
        return bad


def descent_modes(pK: SubmoduleProjection, pN: SubmoduleProjection, a=None,
                  grid_width: int = 4, delta=Fraction(0), voa: FermionVOA | None = None,
                  validate: bool = True) -> IntertwinerTruncation:
    """Build the descent intertwiner after validating that pK and pN are W-module maps."""
    voa = voa or FermionVOA()
    delta = parse_fraction(delta)
    if validate:
        for p in (pK, pN):
            bad = _commutation_defects(p, voa, 2)
            if bad:
                raise NotASubmodule(f"projection {p.name!r} fails to commute with the even "
                                    f"subalgebra (first defect at mode {bad[0][0]} on {bad[0][1]})")
    frac = -delta - (-delta).__floor__()
    grid = tuple(Fraction(k) + frac for k in range(-grid_width, grid_width + 1))
    return IntertwinerTruncation(pK, pN, delta, grid, voa, f"Y[{pK.name}<-{pN.name}]")


def parity_descent(cutoff=3, grid_width: int | None = None, voa: FermionVOA | None = None
                   ) -> tuple[IntertwinerTruncation, SubmoduleProjection, SubmoduleProjection]:
    """The intertwiner of type (V^1; V^1, V^0): odd charges, even source, odd target."""
    space = FermionSpace(cutoff)
    if grid_width is None:
        # Borcherds sums at weights <= cutoff reach mode indices near -4 * cutoff
        grid_width = int(4 * space.cutoff) + 4
    pK = SubmoduleProjection.parity("odd", space)
    pN = SubmoduleProjection.parity("even", space)
    Y = descent_modes(pK, pN, {PSI: Fraction(1)}, grid_width,
                      delta_shift(0, 0, 0), voa)
    return Y, pK, pN


# ---------------------------------------------------------------------------
# axioms


def _maxabs(vecs: Iterable[Mapping]) -> Fraction:
    best = Fraction(0)
    for v in vecs:
        for c in v.values():
            best = max(best, abs(Fraction(c)))
    return best


def _basis(space: FermionSpace, keep) -> list[FockState]:
    return [s for s in space.states if keep(s)]


def check_derivative_axiom(Y: IntertwinerTruncation, max_weight=None) -> dict:
    """Exhaustive check of (L_{-1} a)^Y_(k) = -k a^Y_(k-1) over charges, grid and N-basis."""
    space = Y.pN.space
    max_weight = space.cutoff - 1 if max_weight is None else parse_fraction(max_weight)
    charges = [s for s in _basis(space, Y.pK.keep) if s.weight <= max_weight]
    sources = _basis(space, Y.pN.keep)
    residuals, samples = [], 0
    for a in charges:
        av = {a: Fraction(1)}
        da = Y.voa.virasoro(-1, av)
        for k in Y.grid:
            if k - 1 not in Y.grid:
                continue
            for c in sources:
                cv = {c: Fraction(1)}
                r = Y.mode(da, k, cv, strict=False)
                _axpy(r, k, Y.mode(av, k - 1, cv, strict=False))
                residuals.append(r)
                samples += 1
    return {"axiom": "derivative", "samples": samples, "max_residual": fmt_fraction(_maxabs(residuals))}


def _sample_triples(Y: IntertwinerTruncation, seed: int, count: int, index_range: int):
    rng = random.Random(seed)
    space = Y.pN.space
    us = _basis(space, lambda s: s.parity == 0)
    charges = _basis(space, Y.pK.keep)
    sources = _basis(space, Y.pN.keep)
    window = [k for k in Y.grid if abs(k) <= index_range]
    out = []
    for _ in range(count):
        out.append((rng.choice(us), rng.choice(charges), rng.choice(sources),
                    rng.randint(-index_range, index_range), rng.randint(-index_range, index_range),
                    rng.choice(window)))
    return out


def intertwiner_borcherds_residual(Y, u, a, c, m, n, k) -> dict:
    """sum_j C(m,j) Y(u_(n+j) a)_(m+k-j) c
       - sum_j (-1)^j C(n,j) [u_(m+n-j) Y(a)_(k+j) c - (-1)^(p(u)p(a)+n) Y(a)_(n+k-j) u_(m+j) c]."""
    voa = Y.voa
    u, a, c = _as_vec(u), _as_vec(a), _as_vec(c)
    pu, pa = _parity_of_vec(u), _parity_of_vec(a)
    wu, wa, wc = _weight_of_vec(u), _weight_of_vec(a), _weight_of_vec(c)
    out: dict = {}
    for j in range(max(int(wu + wa - n - 1), -1) + 1):
        ua = voa.apply_mode(u, n + j, a)
        if ua:
            _axpy(out, binom(m, j), Y.mode(ua, m + k - j, c))
    sign = (-1) ** ((pu * pa + n) % 2)
    # Y(a)_(k+j) c vanishes once its weight drops below zero; likewise u_(m+j) c
    jmax = max(int(wa + wc - k - 1 + Y.delta), int(wu + wc - m - 1), -1)
    for j in range(jmax + 1):
        coef = (-1) ** j * binom(n, j)
        if not coef:
            continue
        yc = Y.mode(a, k + j, c)
        if yc:
            _axpy(out, -coef, voa.apply_mode(u, m + n - j, yc))
        uc = voa.apply_mode(u, m + j, c)
        if uc:
            _axpy(out, sign * coef, Y.mode(a, n + k - j, uc))
    return out


def intertwiner_commutator_residual(Y, u, a, c, m, k) -> dict:
    """[u_(m), Y(a)_(k)] c - sum_j C(m,j) Y(u_(j) a)_(m+k-j) c."""
    voa = Y.voa
    u, a, c = _as_vec(u), _as_vec(a), _as_vec(c)
    pu, pa = _parity_of_vec(u), _parity_of_vec(a)
    wu, wa = _weight_of_vec(u), _weight_of_vec(a)
    out = voa.apply_mode(u, m, Y.mode(a, k, c))
    _axpy(out, -((-1) ** (pu * pa)), Y.mode(a, k, voa.apply_mode(u, m, c)))
    for j in range(max(int(wu + wa - 1), -1) + 1):
        ua = voa.apply_mode(u, j, a)
        if ua:
            _axpy(out, -binom(m, j), Y.mode(ua, m + k - j, c))
    return out


def check_intertwiner_axioms(Y: IntertwinerTruncation, seed: int = 0, samples: int = 50,
                             index_range: int = 2) -> list[dict]:
    """Residual reports for the derivative property, Borcherds identity and commutator formula."""
    reports = [check_derivative_axiom(Y)]
    trip = _sample_triples(Y, seed, samples, index_range)
    res = [intertwiner_borcherds_residual(Y, {u: 1}, {a: 1}, {c: 1}, m, n, k)
           for u, a, c, m, n, k in trip]
    reports.append({"axiom": "borcherds", "samples": len(res), "max_residual": fmt_fraction(_maxabs(res))})
    trip = _sample_triples(Y, seed + 1, samples, index_range)
    res = [intertwiner_commutator_residual(Y, {u: 1}, {a: 1}, {c: 1}, m, k)
           for u, a, c, m, _n, k in trip]
    reports.append({"axiom": "commutator", "samples": len(res), "max_residual": fmt_fraction(_maxabs(res))})
    return reports
