"""The charged free fermion vertex operator superalgebra at truncation.

Fock states are ``FockState(psi, psistar)``: strictly decreasing tuples of
*doubled* mode indices, so ``FockState((3, 1), (1,))`` is
psi_{-3/2} psi_{-1/2} psistar_{-1/2} |0>.  The psi block always stands to the
left of the psistar block.

Vectors are sparse dicts ``{FockState: Fraction}``.  Modes of composite states
are computed lazily and exactly from the Borcherds product formula applied to
the leading creation operator; no cutoff is involved, so identities checked
with :meth:`FermionVOA.apply_mode` hold on the full Fock space.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, NamedTuple

from .exact import (
    ExactScalar,
    GradedBasis,
    GradedVector,
    QSeries,
    enumerate_partitions,
    fmt_fraction,
    parse_fraction,
    qseries_of_graded_dims,
)

__all__ = [
    "FockState",
    "FermionSpace",
    "FermionVOA",
    "ModeOp",
    "Surd",
    "VACUUM",
    "PSI",
    "PSISTAR",
    "fock_basis",
    "car_apply",
    "parse_state",
    "format_state",
    "field_mode",
    "check_borcherds",
    "check_commutator",
    "check_invariance",
    "character",
    "character_oracle",
    "segal_round_annulus_check",
    "check_derivative",
    "grading_defect",
    "car_defects",
    "borcherds_sides",
    "random_samples",
    "binom",
]

HALF = Fraction(1, 2)


class FockState(NamedTuple):
    psi: tuple = ()
    psistar: tuple = ()

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(self.psi) + sum(self.psistar), 2)

    @property
    def parity(self) -> int:
        return (len(self.psi) + len(self.psistar)) % 2

    def __str__(self) -> str:
        return format_state(self)


VACUUM = FockState()
PSI = FockState((1,), ())
PSISTAR = FockState((), (1,))


def format_state(s: FockState) -> str:
    out = "".join(f"psi({fmt_fraction(Fraction(-d, 2))})" for d in s.psi)
    out += "".join(f"psi*({fmt_fraction(Fraction(-d, 2))})" for d in s.psistar)
    return out + "|0>"


# ---------------------------------------------------------------------------
# CAR action


def car_apply(mode: tuple, state: FockState):
    """Apply a generator mode ``("psi" | "psistar", r)`` to a basis state.

    Returns ``(sign, new_state)`` or ``None`` when the result is zero.
    """
    kind, r = mode
    r = Fraction(r)
    if r.denominator != 2:
        raise ValueError(f"mode index must be half-odd, got {r}")
    d = abs(int(2 * r))
    psi, star = state
    k = len(psi)
    if kind == "psi":
        if r < 0:
            if d in psi:
                return None
            pos = sum(1 for x in psi if x > d)
            return (-1) ** pos, FockState(psi[:pos] + (d,) + psi[pos:], star)
        if d not in star:
            return None
        pos = star.index(d)
        return (-1) ** (k + pos), FockState(psi, star[:pos] + star[pos + 1:])
    if kind == "psistar":
        if r < 0:
            if d in star:
                return None
            pos = sum(1 for x in star if x > d)
            return (-1) ** (k + pos), FockState(psi, star[:pos] + (d,) + star[pos:])
        if d not in psi:
            return None
        pos = psi.index(d)
        return (-1) ** pos, FockState(psi[:pos] + psi[pos + 1:], star)
    raise ValueError(f"unknown generator {kind!r}")


def car_apply_vec(mode: tuple, vec: Mapping) -> dict:
    out: dict = {}
    for s, c in vec.items():
        hit = car_apply(mode, s)
        if hit is not None:
            sign, t = hit
            _acc(out, t, sign * c)
    return out


def _acc(out: dict, key, val) -> None:
    if not val:
        return
    v = out.get(key, 0) + val
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _axpy(out: dict, a, vec: Mapping) -> None:
    if not a:
        return
    for k, v in vec.items():
        _acc(out, k, a * v)


def _parity_of_vec(vec: Mapping) -> int:
    ps = {s.parity for s in vec}
    if len(ps) > 1:
        raise ValueError("vector is not of homogeneous parity")
    return ps.pop() if ps else 0


def _weight_of_vec(vec: Mapping) -> Fraction:
    ws = {s.weight for s in vec}
    if len(ws) > 1:
        raise ValueError("vector is not homogeneous")
    return ws.pop() if ws else Fraction(0)


# ---------------------------------------------------------------------------
# state literals

_TOKEN = re.compile(r"\s*(psi\*|psistar|psi)\(\s*([-+]?\d+(?:/\d+)?)\s*\)")


def parse_state(text: str) -> dict:
    """Parse ``"psi(-1/2)psi*(-3/2)|0>"`` (modes applied right to left).

    The special names ``"vac"`` and ``"nu"`` give the vacuum and the conformal vector.
    """
    text = text.strip()
    if text in ("vac", "|0>", "Omega"):
        return {VACUUM: Fraction(1)}
    if text == "nu":
        return dict(FermionVOA().conformal_vector)
    if not text.endswith("|0>"):
        raise ValueError(f"state literal must end with |0>: {text!r}")
    body = text[:-3]
    modes, pos = [], 0
    while pos < len(body):
        m = _TOKEN.match(body, pos)
        if not m:
            raise ValueError(f"cannot parse state literal near {body[pos:]!r}")
        kind = "psi" if m.group(1) == "psi" else "psistar"
        modes.append((kind, Fraction(m.group(2))))
        pos = m.end()
    vec = {VACUUM: Fraction(1)}
    for mode in reversed(modes):
        vec = car_apply_vec(mode, vec)
    return vec


# ---------------------------------------------------------------------------
# basis


def _doubled(parts) -> tuple:
    return tuple(int(2 * p) for p in parts)


def _states_at(weight: Fraction) -> list[FockState]:
    out = []
    twice = int(2 * weight)
    # psi-block weight from high to low, each block in reverse-lex order
    for a in range(twice, -1, -1):
        b = twice - a
        for p in enumerate_partitions(Fraction(a, 2), "half_odd", strict=True):
            for q in enumerate_partitions(Fraction(b, 2), "half_odd", strict=True):
                out.append(FockState(_doubled(p), _doubled(q)))
    return out


@dataclass
class FermionSpace:
    """Orthonormal Fock basis on weights 0, 1/2, ..., cutoff."""

    cutoff: Fraction

    def __post_init__(self):
        self.cutoff = parse_fraction(self.cutoff)
        if self.cutoff < 0 or (2 * self.cutoff).denominator != 1:
            raise ValueError("cutoff must lie in (1/2) Z_{>=0}")
        self.weights = [Fraction(k, 2) for k in range(int(2 * self.cutoff) + 1)]
        self.by_weight = {w: _states_at(w) for w in self.weights}
        self.states = [s for w in self.weights for s in self.by_weight[w]]
        self.index = {s: i for i, s in enumerate(self.states)}
        self.graded_basis = GradedBasis(
            "fermion", lambda w: _states_at(parse_fraction(w)),
            lambda w: int(2 * parse_fraction(w)) % 2)

    def dims(self) -> list[int]:
        return [len(self.by_weight[w]) for w in self.weights]

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def vacuum(self) -> FockState:
        return VACUUM

    def to_graded(self, vec: Mapping) -> GradedVector:
        return GradedVector.from_terms(self.graded_basis,
                                       {(s.weight, s): ExactScalar(c) for s, c in vec.items()})

    def to_json(self) -> dict:
        return {"cutoff": fmt_fraction(self.cutoff),
                "weights": [fmt_fraction(w) for w in self.weights],
                "dims": self.dims(),
                "basis": {fmt_fraction(w): [format_state(s) for s in self.by_weight[w]]
                          for w in self.weights}}


def fock_basis(cutoff) -> FermionSpace:
    return FermionSpace(cutoff)


# ---------------------------------------------------------------------------
# vertex operators


def binom(m: int, j: int) -> Fraction:
    """Generalized binomial coefficient m choose j for any integer m, j >= 0."""
    num = 1
    for i in range(j):
        num *= m - i
    return Fraction(num, factorial(j))


class FermionVOA:
    """Evaluation context: memoized exact modes a_(n) of Fock states.

    ``theta_sign`` is the phase picked up by each generator under the
    antilinear involution theta (psi -> s psistar, psistar -> s psi).
    """

    MAX_DEPTH = 64

    def __init__(self, theta_sign: int = -1):
        self._memo: dict = {}
        self.theta_sign = theta_sign
        self._nu: dict | None = None

    # -- modes of basis states ------------------------------------------------

    def apply_mode_basis(self, a: FockState, n: int, c: FockState, depth: int = 0) -> dict:
        key = (a, n, c)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if depth > self.MAX_DEPTH:
            raise RecursionError("mode recursion exceeded its depth bound")
        out = self._mode(a, n, c, depth)
        self._memo[key] = out
        return out

    def _mode(self, a: FockState, n: int, c: FockState, depth: int) -> dict:
        if a.weight + c.weight - n - 1 < 0:
            return {}
        if a == VACUUM:
            return {c: Fraction(1)} if n == -1 else {}
        if a == PSI or a == PSISTAR:
            kind = "psi" if a == PSI else "psistar"
            hit = car_apply((kind, n + HALF), c)
            return {} if hit is None else {hit[1]: Fraction(hit[0])}
        # a = g_(m) b with g the leading creation operator
        if a.psi:
            g, d, b = PSI, a.psi[0], FockState(a.psi[1:], a.psistar)
        else:
            g, d, b = PSISTAR, a.psistar[0], FockState((), a.psistar[1:])
        m = -(d + 1) // 2
        sign2 = -1 if (b.parity + m) % 2 else 1
        jmax = max(int(b.weight + c.weight - n - 1), int(c.weight - HALF), -1)
        out: dict = {}
        for j in range(jmax + 1):
            coef = binom(m, j) * (-1) ** j
            if not coef:
                continue
            inner = self.apply_mode_basis(b, n + j, c, depth + 1)
            if inner:
                _axpy(out, coef, self.apply_mode_vec(g, m - j, inner, depth + 1))
            inner = self.apply_mode_basis(g, j, c, depth + 1)
            if inner:
                _axpy(out, -sign2 * coef, self.apply_mode_vec(b, m + n - j, inner, depth + 1))
        return out

    def apply_mode_vec(self, a: FockState, n: int, vec: Mapping, depth: int = 0) -> dict:
        out: dict = {}
        for c, coef in vec.items():
            _axpy(out, coef, self.apply_mode_basis(a, n, c, depth))
        return out

    def apply_mode(self, avec: Mapping, n: int, vec: Mapping) -> dict:
        """a_(n) v for arbitrary finite vectors a and v."""
        out: dict = {}
        for a, ca in avec.items():
            _axpy(out, ca, self.apply_mode_vec(a, n, vec))
        return out

    # -- Virasoro -------------------------------------------------------------

    @property
    def conformal_vector(self) -> dict:
        """nu = alpha psi_{-3/2} psistar_{-1/2}|0> + beta psi_{-1/2} psistar_{-3/2}|0>.

        alpha and beta are fixed by requiring nu_(1) to act as 1/2 on both generators.
        """
        if self._nu is None:
            s1, s2 = FockState((3,), (1,)), FockState((1,), (3,))
            eqs = []
            for g in (PSI, PSISTAR):
                r1 = self.apply_mode_basis(s1, 1, g).get(g, Fraction(0))
                r2 = self.apply_mode_basis(s2, 1, g).get(g, Fraction(0))
                eqs.append((r1, r2, HALF))
            (a11, a12, b1), (a21, a22, b2) = eqs
            det = a11 * a22 - a12 * a21
            if det == 0:
                raise ArithmeticError("conformal vector equations are singular")
            alpha = (b1 * a22 - a12 * b2) / det
            beta = (a11 * b2 - b1 * a21) / det
            self._nu = {s1: alpha, s2: beta}
        return self._nu

    def virasoro(self, n: int, vec: Mapping) -> dict:
        """L_n = nu_(n+1)."""
        return self.apply_mode(self.conformal_vector, n + 1, vec)

    # -- theta ------------------------------------------------------------------

    def theta(self, vec: Mapping) -> dict:
        """The antilinear involution exchanging psi and psistar modes."""
        out: dict = {}
        for s, c in vec.items():
            modes = [("psistar", Fraction(-d, 2)) for d in s.psi]
            modes += [("psi", Fraction(-d, 2)) for d in s.psistar]
            v = {VACUUM: Fraction(1)}
            for mode in reversed(modes):
                v = car_apply_vec(mode, v)
            phase = self.theta_sign ** (len(s.psi) + len(s.psistar))
            _axpy(out, phase * _conj_rational(c), v)
        return out


def _conj_rational(c):
    return c.conjugate() if isinstance(c, ExactScalar) else c


@dataclass
class ModeOp:
    """The mode a_(n) of a state ``a`` acting on a :class:`FermionSpace`."""

    label: str
    state: dict
    n: int
    space: FermionSpace
    voa: FermionVOA

    def apply(self, vec: Mapping) -> dict:
        return self.voa.apply_mode(self.state, self.n, vec)

    def matrix(self) -> list[list[Fraction]]:
        """Exact matrix of the compression to the truncated space."""
        dim = self.space.dim
        m = [[Fraction(0)] * dim for _ in range(dim)]
        for j, s in enumerate(self.space.states):
            for t, v in self.apply({s: Fraction(1)}).items():
                i = self.space.index.get(t)
                if i is not None:
                    m[i][j] = v
        return m


def field_mode(a, n: int, space: FermionSpace | None = None,
               voa: FermionVOA | None = None) -> ModeOp:
    """a_(n) as a :class:`ModeOp`; ``a`` may be a state literal, FockState or vector."""
    vec = _as_vec(a)
    space = space or FermionSpace(max([Fraction(2)] + [s.weight for s in vec]))
    voa = voa or FermionVOA()
    label = " + ".join(f"{fmt_fraction(c)}*{format_state(s)}" for s, c in vec.items())
    return ModeOp(f"({label})_({n})", vec, n, space, voa)


def _as_vec(a) -> dict:
    if isinstance(a, str):
        return parse_state(a)
    if isinstance(a, FockState):
        return {a: Fraction(1)}
    if isinstance(a, GradedVector):
        return {lab: as_rational(c) for (_, lab), c in a.terms().items()}
    return dict(a)


def as_rational(c) -> Fraction:
    if isinstance(c, ExactScalar):
        if c.im != 0:
            raise ValueError("expected a rational coefficient")
        return c.re
    return Fraction(c)


# ---------------------------------------------------------------------------
# axiom checks


def _sub(u: Mapping, v: Mapping) -> dict:
    out = dict(u)
    _axpy(out, -1, v)
    return out


def borcherds_sides(voa: FermionVOA, a: Mapping, b: Mapping, c: Mapping,
                    m: int, n: int, k: int) -> tuple[dict, dict]:
    """Both sides of the Borcherds identity applied to c.

    sum_j C(m,j) (a_(n+j) b)_(m+k-j) c
      = sum_j (-1)^j C(n,j) [a_(m+n-j) b_(k+j) c - (-1)^(p(a)p(b)+n) b_(n+k-j) a_(m+j) c]
    """
    pa, pb = _parity_of_vec(a), _parity_of_vec(b)
    wa, wb, wc = _weight_of_vec(a), _weight_of_vec(b), _weight_of_vec(c)
    lhs: dict = {}
    for j in range(max(int(wa + wb - n - 1), -1) + 1):
        ab = voa.apply_mode(a, n + j, b)
        if ab:
            _axpy(lhs, binom(m, j), voa.apply_mode(ab, m + k - j, c))
    rhs: dict = {}
    sign = (-1) ** ((pa * pb + n) % 2)
    jmax = max(int(wb + wc - k - 1), int(wa + wc - m - 1), -1)
    for j in range(jmax + 1):
        coef = (-1) ** j * binom(n, j)
        if not coef:
            continue
        bc = voa.apply_mode(b, k + j, c)
        if bc:
            _axpy(rhs, coef, voa.apply_mode(a, m + n - j, bc))
        ac = voa.apply_mode(a, m + j, c)
        if ac:
            _axpy(rhs, -sign * coef, voa.apply_mode(b, n + k - j, ac))
    return lhs, rhs


def check_borcherds(a, b, c_state, m: int, n: int, k: int,
                    voa: FermionVOA | None = None) -> dict:
    """LHS - RHS of the Borcherds identity on c_state (exact; zero expected)."""
    voa = voa or FermionVOA()
    lhs, rhs = borcherds_sides(voa, _as_vec(a), _as_vec(b), _as_vec(c_state), m, n, k)
    return _sub(lhs, rhs)


def check_commutator(a, b, c_state, m: int, k: int, voa: FermionVOA | None = None) -> dict:
    """[a_(m), b_(k)] c - sum_j C(m,j) (a_(j) b)_(m+k-j) c (supercommutator)."""
    voa = voa or FermionVOA()
    a, b, c = _as_vec(a), _as_vec(b), _as_vec(c_state)
    pa, pb = _parity_of_vec(a), _parity_of_vec(b)
    wa, wb = _weight_of_vec(a), _weight_of_vec(b)
    lhs = voa.apply_mode(a, m, voa.apply_mode(b, k, c))
    _axpy(lhs, -((-1) ** (pa * pb)), voa.apply_mode(b, k, voa.apply_mode(a, m, c)))
    rhs: dict = {}
    for j in range(max(int(wa + wb - 1), -1) + 1):
        ab = voa.apply_mode(a, j, b)
        if ab:
            _axpy(rhs, binom(m, j), voa.apply_mode(ab, m + k - j, c))
    return _sub(lhs, rhs)


def check_derivative(a, n: int, c_state, voa: FermionVOA | None = None) -> dict:
    """(L_{-1} a)_(n) c + n a_(n-1) c."""
    voa = voa or FermionVOA()
    a, c = _as_vec(a), _as_vec(c_state)
    da = voa.virasoro(-1, a)
    out = voa.apply_mode(da, n, c)
    _axpy(out, n, voa.apply_mode(a, n - 1, c))
    return out


def grading_defect(a, n: int, c_state, voa: FermionVOA | None = None) -> list:
    """States in a_(n) c whose weight differs from wt(c) - n - 1 + wt(a)."""
    voa = voa or FermionVOA()
    a, c = _as_vec(a), _as_vec(c_state)
    target = _weight_of_vec(c) - n - 1 + _weight_of_vec(a)
    return [s for s in voa.apply_mode(a, n, c) if s.weight != target]


def car_defects(space: FermionSpace) -> int:
    """Number of (mode pair, basis state) combinations violating the CAR."""
    rs = [Fraction(k, 2) for k in range(-int(2 * space.cutoff) - 1, int(2 * space.cutoff) + 2, 2)]
    modes = [(kind, r) for kind in ("psi", "psistar") for r in rs]
    bad = 0
    for x in modes:
        for y in modes:
            expect = int(x[0] != y[0] and x[1] + y[1] == 0)
            for s in space.states:
                v = {s: Fraction(1)}
                tot = car_apply_vec(x, car_apply_vec(y, v))
                _axpy(tot, 1, car_apply_vec(y, car_apply_vec(x, v)))
                _axpy(tot, -expect, v)
                bad += bool(tot)
    return bad


def _l1_powers(voa: FermionVOA, a: dict) -> list[dict]:
    out = [a]
    while out[-1]:
        out.append(voa.virasoro(1, out[-1]))
    return out[:-1]


def check_invariance(a, cutoff, voa: FermionVOA | None = None) -> dict:
    """Exact residual of the invariance axiom for a homogeneous state ``a``.

    For basis states b, c with weights <= cutoff and every mode index m = -E-1
    this compares conj(<(theta a)_(m) c, b>) with
        sum_j e^{i pi Delta} i^{p(a)} / j! <(L_1^j a)_(E - j + 2 Delta - 1) b, c>,
    which is the coefficient form of
        <b, Y(theta a, conj x) c> = <Y(e^{x L_1} (-x^{-2})^{L_0} kappa a, x^{-1}) b, c>.
    Returns ``{"max_residual", "entries", "residuals"}`` with ExactScalar values.
    """
    voa = voa or FermionVOA()
    space = FermionSpace(cutoff)
    a = _as_vec(a)
    delta = _weight_of_vec(a)
    p = _parity_of_vec(a)
    theta_a = voa.theta(a)
    powers = _l1_powers(voa, a)
    # e^{i pi Delta} i^p = i^{2 Delta + p}
    phase = ExactScalar.root_of_unity8(int(2 * (2 * delta + p)) % 8)
    residuals = {}
    worst = ExactScalar(0)
    count = 0
    for b in space.states:
        for c in space.states:
            # (theta a)_(m) c lands at weight wt(c) + Delta - m - 1 = wt(b)
            mm = c.weight + delta - 1 - b.weight
            if mm.denominator != 1:
                continue
            m = int(mm)
            lhs = ExactScalar(voa.apply_mode(theta_a, m, {c: Fraction(1)}).get(b, 0)).conjugate()
            e = -m - 1
            rhs = ExactScalar(0)
            for j, aj in enumerate(powers):
                nn = e - j + 2 * delta - 1
                if nn.denominator != 1:
                    raise ValueError("mode index must be integral")
                val = voa.apply_mode(aj, int(nn), {b: Fraction(1)}).get(c, 0)
                if val:
                    rhs = rhs + phase * Fraction(val, factorial(j))
            count += 1
            r = lhs - rhs
            if r:
                residuals[(format_state(b), format_state(c), m)] = r
                if abs(r) > abs(worst):
                    worst = r
    return {"max_residual": worst, "entries": count, "residuals": residuals}


# ---------------------------------------------------------------------------
# characters


def character(cutoff) -> QSeries:
    space = FermionSpace(cutoff)
    return qseries_of_graded_dims(dict(zip(space.weights, space.dims())), space.cutoff)


def character_oracle(cutoff) -> QSeries:
    """Coefficients of prod_{n>=1} (1 + q^{n-1/2})^2 by polynomial multiplication in q^{1/2}."""
    cutoff = parse_fraction(cutoff)
    top = int(2 * cutoff)
    poly = [0] * (top + 1)
    poly[0] = 1
    for odd in range(1, top + 1, 2):
        for _ in range(2):
            for e in range(top, odd - 1, -1):
                poly[e] += poly[e - odd]
    return qseries_of_graded_dims({Fraction(e, 2): c for e, c in enumerate(poly)}, cutoff)


# ---------------------------------------------------------------------------
# Segal relations for the round annulus


@dataclass(frozen=True)
class Surd:
    """p + q sqrt(r) over Q for a fixed rational r."""

    p: Fraction
    q: Fraction
    r: Fraction

    def __add__(self, o):
        o = self._lift(o)
        return Surd(self.p + o.p, self.q + o.q, self.r)

    def __sub__(self, o):
        o = self._lift(o)
        return Surd(self.p - o.p, self.q - o.q, self.r)

    def __mul__(self, o):
        o = self._lift(o)
        return Surd(self.p * o.p + self.q * o.q * self.r, self.p * o.q + self.q * o.p, self.r)

    __rmul__ = __mul__

    def _lift(self, o):
        if isinstance(o, Surd):
            if o.r != self.r:
                raise ValueError("surds over different radicands")
            return o
        return Surd(Fraction(o), Fraction(0), self.r)

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def __str__(self):
        return f"{fmt_fraction(self.p)} + {fmt_fraction(self.q)}*sqrt({fmt_fraction(self.r)})"

    @classmethod
    def power(cls, r: Fraction, e: Fraction) -> "Surd":
        """r^e for e in (1/2) Z_{>=0}, principal root."""
        whole = int(e)
        if e - whole == 0:
            return cls(r ** whole, Fraction(0), r)
        return cls(Fraction(0), r ** whole, r)


def segal_round_annulus_check(r, k: int, cutoff, generator: str = "psi") -> dict:
    """Exact residual of a(z^k) r^{L_0} - r^{k+1/2} r^{L_0} a(z^k) on the truncation.

    a(z^k) is the mode ``generator_{k+1/2}``.  Entries live in Q(sqrt r).
    """
    r = parse_fraction(r)
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")
    if k < 0:
        raise ValueError("k must be >= 0")
    space = FermionSpace(cutoff)
    mode = (generator, Fraction(2 * k + 1, 2))
    scale = Surd.power(r, Fraction(2 * k + 1, 2))
    worst, nonzero = None, 0
    for s in space.states:
        rl0 = Surd.power(r, s.weight)
        hit = car_apply(mode, s)
        if hit is None:
            continue
        sign, t = hit
        lhs = rl0 * sign
        rhs = scale * Surd.power(r, t.weight) * sign
        res = lhs - rhs
        if res:
            nonzero += 1
            worst = res
    return {"nonzero_entries": nonzero, "residual": "0" if worst is None else str(worst),
            "entries_checked": space.dim}


def random_samples(seed: int, count: int, max_weight, index_range: int = 3):
    """Deterministic random homogeneous basis triples and mode indices."""
    rng = random.Random(seed)
    space = FermionSpace(max_weight)
    states = space.states
    out = []
    for _ in range(count):
        a, b, c = (rng.choice(states) for _ in range(3))
        m, n, k = (rng.randint(-index_range, index_range) for _ in range(3))
        out.append((a, b, c, m, n, k))
    return out
