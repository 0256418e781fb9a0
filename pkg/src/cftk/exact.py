"""Exact scalars, partitions and weight-graded vectors.

Everything in the algebraic layer (Virasoro, fermion, codes) is computed over
the Gaussian rationals Q(i).  Real-only computations use :class:`fractions.Fraction`
directly; :class:`ExactScalar` interoperates with ``int`` and ``Fraction`` so
the two can be mixed freely.

Inner products are linear in the FIRST argument and conjugate-linear in the
second, everywhere in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

__all__ = [
    "ExactScalar",
    "as_fraction",
    "as_scalar",
    "conj",
    "fmt_fraction",
    "parse_fraction",
    "enumerate_partitions",
    "partition_count",
    "GradedBasis",
    "GradedVector",
    "graded_inner",
    "QSeries",
    "qseries_of_graded_dims",
    "bareiss_rank",
    "nullspace",
    "ldl",
    "NotPositiveSemidefinite",
]


def parse_fraction(text) -> Fraction:
    """Parse ``"p/q"``, ``"3"``, ``"-1/2"`` (or pass through numbers) exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("refusing to convert a float to an exact rational")
    return Fraction(str(text).strip())


def fmt_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_fraction(x) -> Fraction:
    if isinstance(x, ExactScalar):
        if x.im != 0:
            raise ValueError(f"expected a real scalar, got {x}")
        return x.re
    return parse_fraction(x)


class ExactScalar:
    """Gaussian rational ``re + im*i`` with exact field operations."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = parse_fraction(re)
        self.im = parse_fraction(im)

    @classmethod
    def i(cls) -> "ExactScalar":
        return cls(0, 1)

    @classmethod
    def root_of_unity8(cls, k: int) -> "ExactScalar":
        """zeta_8**k, only for even k (the odd powers are irrational)."""
        k %= 8
        if k % 2:
            raise ValueError("odd powers of zeta_8 are not Gaussian rationals")
        return [cls(1), cls(0, 1), cls(-1), cls(0, -1)][k // 2]

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other)
        if isinstance(other, complex):
            raise TypeError("refusing to mix binary64 complex into exact arithmetic")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ExactScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "ExactScalar":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("ExactScalar division by zero")
        return ExactScalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ExactScalar(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"ExactScalar({fmt_fraction(self.re)!r}, {fmt_fraction(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return fmt_fraction(self.re)
        if self.re == 0:
            return f"{fmt_fraction(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{fmt_fraction(self.re)}{sign}{fmt_fraction(abs(self.im))}i"

    def to_json(self) -> list[str]:
        return [fmt_fraction(self.re), fmt_fraction(self.im)]

    @classmethod
    def from_json(cls, data) -> "ExactScalar":
        re, im = data
        return cls(re, im)


def as_scalar(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    return ExactScalar(parse_fraction(x))


def conj(x):
    """Complex conjugate that leaves ints and Fractions untouched."""
    if isinstance(x, ExactScalar):
        return x.conjugate()
    return x


# ---------------------------------------------------------------------------
# partitions

PART_SETS = ("positive", "half_odd")


def _parts_unit(part_set: str) -> Fraction:
    if part_set == "positive":
        return Fraction(1)
    if part_set == "half_odd":
        return Fraction(1, 2)
    raise ValueError(f"unknown part set {part_set!r}; expected one of {PART_SETS}")


def enumerate_partitions(total, part_set: str = "positive", strict: bool = False) -> list[tuple]:
    """All partitions of ``total`` into parts from ``part_set``, reverse-lex ordered.

    ``part_set="positive"`` uses parts 1, 2, 3, ... and returns tuples of ints;
    ``part_set="half_odd"`` uses 1/2, 3/2, ... and returns tuples of Fractions.
    Each partition is weakly decreasing (strictly, if ``strict``); the list
    starts with the lexicographically largest partition.

    >>> enumerate_partitions(4)
    [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    >>> [tuple(map(str, p)) for p in enumerate_partitions("2", "half_odd", strict=True)]
    [('3/2', '1/2')]
    """
    total = parse_fraction(total)
    if total < 0:
        raise ValueError("total must be nonnegative")
    _parts_unit(part_set)
    if part_set == "positive":
        if total.denominator != 1:
            raise ValueError(f"{total} is not a sum of positive integers")
        n = int(total)
        return [tuple(p) for p in _int_partitions(n, n, strict)]
    # half-odd parts: 2*part is an odd positive integer; work with doubled values
    doubled = total * 2
    if doubled.denominator != 1:
        raise ValueError(f"{total} is not a sum of half-odd parts")
    out = []
    for p in _odd_partitions(int(doubled), int(doubled), strict):
        out.append(tuple(Fraction(x, 2) for x in p))
    return out


def _int_partitions(n: int, largest: int, strict: bool):
    if n == 0:
        yield []
        return
    for first in range(min(n, largest), 0, -1):
        nxt = first - 1 if strict else first
        for rest in _int_partitions(n - first, nxt, strict):
            yield [first] + rest


def _odd_partitions(n: int, largest: int, strict: bool):
    if n == 0:
        yield []
        return
    start = min(n, largest)
    if start % 2 == 0:
        start -= 1
    for first in range(start, 0, -2):
        nxt = first - 2 if strict else first
        for rest in _odd_partitions(n - first, nxt, strict):
            yield [first] + rest


def partition_count(n: int) -> int:
    """p(n) via Euler's pentagonal-number recurrence (independent of the enumerator)."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        s, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            s += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                s += sign * p[m - g2]
            k += 1
        p[m] = s
    return p[n]


# ---------------------------------------------------------------------------
# graded vectors


@dataclass(frozen=True, eq=False)
class GradedBasis:
    """Registry of basis labels per conformal weight.

    ``labels_at(weight)`` must be deterministic.  ``parity_at(weight)`` gives
    the parity (0/1) of every label at that weight.
    """

    name: str
    labels_at: Callable[[Fraction], Sequence]
    parity_at: Callable[[Fraction], int] = lambda w: 0
    _index: dict = field(default_factory=dict, repr=False)

    def labels(self, weight) -> tuple:
        weight = parse_fraction(weight)
        if weight not in self._index:
            labels = tuple(self.labels_at(weight))
            self._index[weight] = (labels, {lab: k for k, lab in enumerate(labels)})
        return self._index[weight][0]

    def position(self, weight, label) -> int:
        self.labels(weight)
        return self._index[parse_fraction(weight)][1][label]

    def dim(self, weight) -> int:
        return len(self.labels(weight))


class GradedVector:
    """A finitely supported vector ``sum_w v_w`` with dense blocks per weight.

    Zero blocks are dropped on construction, so equality is structural.
    """

    __slots__ = ("basis", "blocks")

    def __init__(self, basis: GradedBasis, blocks: Mapping | None = None):
        self.basis = basis
        clean = {}
        for w, coeffs in (blocks or {}).items():
            w = parse_fraction(w)
            coeffs = tuple(coeffs)
            if len(coeffs) != basis.dim(w):
                raise ValueError(
                    f"block at weight {w} has {len(coeffs)} entries, basis has {basis.dim(w)}"
                )
            if any(coeffs):
                clean[w] = coeffs
        self.blocks = dict(sorted(clean.items()))

    @classmethod
    def from_terms(cls, basis: GradedBasis, terms: Mapping) -> "GradedVector":
        """Build from ``{(weight, label): coefficient}``."""
        blocks: dict = {}
        for (w, label), coef in terms.items():
            w = parse_fraction(w)
            if w not in blocks:
                blocks[w] = [0] * basis.dim(w)
            blocks[w][basis.position(w, label)] += coef
        return cls(basis, blocks)

    def terms(self) -> dict:
        out = {}
        for w, coeffs in self.blocks.items():
            for label, c in zip(self.basis.labels(w), coeffs):
                if c:
                    out[(w, label)] = c
        return out

    @property
    def weights(self) -> list[Fraction]:
        return list(self.blocks)

    @property
    def parity(self) -> str:
        ps = {self.basis.parity_at(w) for w in self.blocks}
        if not ps or ps == {0}:
            return "even"
        if ps == {1}:
            return "odd"
        return "mixed"

    def is_zero(self) -> bool:
        return not self.blocks

    def _check(self, other: "GradedVector"):
        if other.basis is not self.basis:
            raise ValueError("graded vectors live on different basis registries")

    def __add__(self, other: "GradedVector") -> "GradedVector":
        self._check(other)
        blocks = dict(self.blocks)
        for w, coeffs in other.blocks.items():
            if w in blocks:
                blocks[w] = tuple(a + b for a, b in zip(blocks[w], coeffs))
            else:
                blocks[w] = coeffs
        return GradedVector(self.basis, blocks)

    def __neg__(self):
        return GradedVector(self.basis, {w: tuple(-c for c in cs) for w, cs in self.blocks.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "GradedVector":
        return GradedVector(self.basis, {w: tuple(s * c for c in cs) for w, cs in self.blocks.items()})

    def __eq__(self, other):
        return (
            isinstance(other, GradedVector)
            and other.basis is self.basis
            and self.blocks == other.blocks
        )

    def __repr__(self):
        return f"GradedVector({self.basis.name}, {self.to_json()['blocks']})"

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "blocks": [
                {"weight": fmt_fraction(w), "coeffs": [as_scalar(c).to_json() for c in cs]}
                for w, cs in self.blocks.items()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, basis: GradedBasis, data) -> "GradedVector":
        if isinstance(data, str):
            data = json.loads(data)
        blocks = {}
        for blk in data["blocks"]:
            cs = []
            for pair in blk["coeffs"]:
                s = ExactScalar.from_json(pair)
                cs.append(s.re if s.im == 0 else s)
            blocks[parse_fraction(blk["weight"])] = cs
        return cls(basis, blocks)


def graded_inner(u: GradedVector, v: GradedVector, gram: Mapping) -> ExactScalar:
    """<u, v> = sum_w u_w^T G_w conj(v_w); weights present in only one side contribute 0.

    ``gram`` maps weight -> square Hermitian matrix (nested sequences) with
    ``G[i][j] = <e_i, e_j>``.
    """
    if u.basis is not v.basis:
        raise ValueError("graded vectors live on different basis registries")
    for w in u.blocks.keys() | v.blocks.keys():
        if w not in gram:
            raise KeyError(f"no Gram block for weight {fmt_fraction(w)}")
    total = ExactScalar(0)
    for w in u.blocks.keys() & v.blocks.keys():
        G = gram[w]
        uw, vw = u.blocks[w], v.blocks[w]
        for i, ui in enumerate(uw):
            if not ui:
                continue
            row = G[i]
            acc = 0
            for j, vj in enumerate(vw):
                if vj:
                    acc = acc + row[j] * conj(vj)
            total = total + ui * acc
    return total


# ---------------------------------------------------------------------------
# q-series


@dataclass(frozen=True)
class QSeries:
    """Truncated q-series with exact rational exponents, strictly increasing."""

    terms: tuple[tuple[Fraction, int], ...]

    def coefficient(self, exp) -> int:
        exp = parse_fraction(exp)
        for e, c in self.terms:
            if e == exp:
                return c
        return 0

    def to_json(self) -> list[dict]:
        return [{"exp": fmt_fraction(e), "coef": str(c)} for e, c in self.terms]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "QSeries":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple((parse_fraction(d["exp"]), int(d["coef"])) for d in data))

    def __str__(self):
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}q^{fmt_fraction(e)}")
        return " + ".join(parts) if parts else "0"


def qseries_of_graded_dims(dims: Mapping, cutoff) -> QSeries:
    """Character-style q-series from ``{weight: dim}``; zero dims are omitted."""
    cutoff = parse_fraction(cutoff)
    items = []
    for w, d in dims.items():
        w = parse_fraction(w)
        if w <= cutoff and d:
            if d < 0:
                raise ValueError("graded dimensions must be nonnegative")
            items.append((w, int(d)))
    items.sort()
    for (a, _), (b, _) in zip(items, items[1:]):
        if a == b:
            raise ValueError(f"duplicate weight {a}")
    return QSeries(tuple(items))


# ---------------------------------------------------------------------------
# exact linear algebra over Q


def _integerize(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (rank/kernel preserving)."""
    from math import lcm

    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        m = 1
        for x in fr:
            m = lcm(m, x.denominator)
        out.append([int(x * m) for x in fr])
    return out


def bareiss_rank(matrix: Sequence[Sequence]) -> tuple[int, list[int]]:
    """Rank and pivot columns of a rational matrix by fraction-free elimination."""
    a = _integerize(matrix)
    if not a:
        return 0, []
    nrows, ncols = len(a), len(a[0])
    prev = 1
    r = 0
    pivots = []
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) // prev
            a[i][col] = 0
        prev = a[r][col]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return r, pivots


def nullspace(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact basis of {x : A x = 0} (reduced row echelon over Q)."""
    a = [[Fraction(x) for x in row] for row in matrix]
    if not a:
        return []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        basis.append(v)
    return basis


class NotPositiveSemidefinite(ValueError):
    pass


def ldl(gram: Sequence[Sequence]) -> tuple[list[int], list[list[Fraction]], list[Fraction]]:
    """Greedy exact LDL^T of a rational symmetric PSD matrix.

    Returns ``(selected, L, D)``: ``selected`` are the indices whose Gram
    sub-block is nonsingular (a basis modulo the radical), and on that sub-block
    ``G_SS = L diag(D) L^T`` with unit lower-triangular ``L`` and ``D > 0``.

    Raises :class:`NotPositiveSemidefinite` when the matrix is indefinite.
    """
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i):
            if g[i][j] != g[j][i]:
                raise ValueError("Gram matrix is not symmetric")
    # Schur complement with respect to the selected indices, updated in place
    schur = [row[:] for row in g]
    selected: list[int] = []
    cols: list[list[Fraction]] = []  # column k of L, indexed by original index
    D: list[Fraction] = []
    for j in range(n):
        d = schur[j][j]
        if d < 0:
            raise NotPositiveSemidefinite(f"negative pivot {d} at index {j}")
        if d == 0:
            continue
        col = [schur[i][j] / d for i in range(n)]
        for i in range(n):
            if col[i] == 0:
                continue
            for k in range(n):
                schur[i][k] -= col[i] * d * col[k]
        selected.append(j)
        cols.append(col)
        D.append(d)
    if any(x != 0 for row in schur for x in row):
        raise NotPositiveSemidefinite("nonzero Schur complement with zero diagonal")
    L = [[cols[k][i] for k in range(len(selected))] for i in selected]
    return selected, L, D
