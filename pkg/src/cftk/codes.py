"""Binary codes, code lattices, braid signs and twisted cocycles.

Codewords are stored as tuples of 0/1 ints.  The code lattice of C is
realized in "y-coordinates": a vector v = y / sqrt(2) with y in Z^n and
y = c (mod 2) for some codeword c, so v.v' = y.y' / 2 is exact.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import ExactScalar, fmt_fraction

__all__ = [
    "BinaryCode",
    "Lattice",
    "Cocycle",
    "Obstruction",
    "BudgetExceeded",
    "builtin_code",
    "code_from_text",
    "random_code",
    "code_predicates",
    "dual_code",
    "code_lattice",
    "lattice_report",
    "theta_series",
    "braid_sign",
    "solve_cocycle",
    "verify_cocycle",
    "rref_gf2",
]

CODEWORD_CACHE_LIMIT = 2 ** 20


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# GF(2) linear algebra


def rref_gf2(rows: Sequence[Sequence[int]], n: int) -> tuple[list[tuple], list[int]]:
    """Reduced row echelon form over GF(2); returns (nonzero rows, pivot columns)."""
    m = [list(int(x) % 2 for x in r) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][col]:
                m[i] = [a ^ b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def nullspace_gf2(rows: Sequence[Sequence[int]], n: int) -> list[tuple]:
    red, pivots = rref_gf2(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, p in zip(red, pivots):
            v[p] = row[f]
        basis.append(tuple(v))
    return basis


def _dot(p, q) -> int:
    return sum(a * b for a, b in zip(p, q))


def _add(p, q) -> tuple:
    return tuple(a ^ b for a, b in zip(p, q))


@dataclass
class BinaryCode:
    n: int
    generator: tuple          # RREF rows
    pivots: tuple = ()
    name: str = "code"
    _words: list | None = field(default=None, repr=False)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], n: int | None = None, name: str = "code"):
        rows = [tuple(int(x) for x in r) for r in rows]
        if n is None:
            if not rows:
                raise ValueError("length needed for an empty generator list")
            n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("generator rows must have equal length")
        red, piv = rref_gf2(rows, n)
        return cls(n, tuple(red), tuple(piv), name)

    @property
    def dim(self) -> int:
        return len(self.generator)

    @property
    def size(self) -> int:
        return 2 ** self.dim

    def codewords(self) -> list[tuple]:
        if self._words is not None:
            return self._words
        if self.size > CODEWORD_CACHE_LIMIT:
            raise BudgetExceeded("code too large to enumerate")
        words = []
        zero = (0,) * self.n
        for bits in itertools.product((0, 1), repeat=self.dim):
            w = zero
            for b, row in zip(bits, self.generator):
                if b:
                    w = _add(w, row)
            words.append(w)
        self._words = words
        return words

    def weight_enumerator(self) -> dict[int, int]:
        return dict(sorted(Counter(sum(w) for w in self.codewords()).items()))

    def min_weight(self) -> int:
        ws = [k for k in self.weight_enumerator() if k > 0]
        return min(ws) if ws else 0

    def contains(self, word) -> bool:
        red, piv = rref_gf2(list(self.generator) + [tuple(word)], self.n)
        return len(red) == self.dim

    def same_code(self, other: "BinaryCode") -> bool:
        return self.n == other.n and self.generator == other.generator

    def to_text(self) -> str:
        return "".join("".join(map(str, r)) + "\n" for r in self.generator)


def code_from_text(text: str, name: str = "file") -> BinaryCode:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or any(set(r) - {"0", "1"} for r in rows):
        raise ValueError("code file must contain 0/1 generator rows")
    return BinaryCode.from_rows([[int(ch) for ch in r] for r in rows], name=name)


def _golay24_rows() -> list[tuple]:
    g = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]      # coefficients of x^0..x^11
    rows = []
    for shift in range(12):
        word = [0] * 23
        for k, c in enumerate(g):
            word[(k + shift) % 23] = c
        rows.append(tuple(word) + (sum(word) % 2,))
    return rows


_NAMED = re.compile(r"^(repetition|trivial|pair11|full)\((\d+)\)$")


def builtin_code(name: str) -> BinaryCode:
    """hamming8, golay24, repetition(n), trivial(n), pair11(n), full(n)."""
    if name == "hamming8":
        rows = ["11110000", "00111100", "00001111", "01010101"]
        return BinaryCode.from_rows([[int(c) for c in r] for r in rows], name=name)
    if name == "golay24":
        return BinaryCode.from_rows(_golay24_rows(), name=name)
    m = _NAMED.match(name.replace(" ", ""))
    if not m:
        raise ValueError(f"unknown builtin code {name!r}")
    kind, n = m.group(1), int(m.group(2))
    if kind == "repetition":
        if n < 1:
            raise ValueError("repetition code needs n >= 1")
        return BinaryCode.from_rows([[1] * n], name=name)
    if kind == "trivial":
        return BinaryCode.from_rows([], n=n, name=name)
    if kind == "full":
        return BinaryCode.from_rows([[int(i == j) for j in range(n)] for i in range(n)], name=name)
    if n % 2:
        raise ValueError("pair11(n) needs n even")
    rows = [[int(j in (2 * i, 2 * i + 1)) for j in range(n)] for i in range(n // 2)]
    return BinaryCode.from_rows(rows, n=n, name=name)


def random_code(n: int, k: int, seed: int) -> BinaryCode:
    rng = random.Random(seed)
    rows = [[rng.randint(0, 1) for _ in range(n)] for _ in range(k)]
    return BinaryCode.from_rows(rows, n=n, name=f"random({n},{k},{seed})")


def code_predicates(C: BinaryCode) -> dict[str, bool]:
    """even / doubly_even / self_orthogonal / self_dual.

    Self-orthogonality is checked on generator pairs (bilinearity makes that
    sufficient); evenness and double evenness on all codewords.
    """
    words = C.codewords()
    even = all(sum(w) % 2 == 0 for w in words)
    doubly = all(sum(w) % 4 == 0 for w in words)
    so = all(_dot(r, s) % 2 == 0 for r in C.generator for s in C.generator)
    return {"even": even, "doubly_even": doubly, "self_orthogonal": so,
            "self_dual": so and 2 * C.dim == C.n}


def dual_code(C: BinaryCode) -> BinaryCode:
    return BinaryCode.from_rows(nullspace_gf2(C.generator, C.n), n=C.n, name=f"dual({C.name})")


# ---------------------------------------------------------------------------
# lattices


def _det_fraction(m: list[list[Fraction]]) -> Fraction:
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return det


@dataclass
class Lattice:
    """Lattice with basis rows y_i (vectors y_i / sqrt 2) and exact Gram matrix."""

    rank: int
    basis_y: list                  # integer rows in y-coordinates
    gram: list                     # Fraction entries: y_i . y_j / 2
    code: BinaryCode | None = None

    @property
    def det(self) -> Fraction:
        return _det_fraction(self.gram)

    @property
    def integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    @property
    def even(self) -> bool:
        return self.integral and all(self.gram[i][i].denominator == 1 and self.gram[i][i] % 2 == 0
                                     for i in range(self.rank))

    def gram_csv(self) -> str:
        return "".join(",".join(fmt_fraction(x) for x in row) + "\n" for row in self.gram)


def code_lattice(C: BinaryCode) -> Lattice:
    """Lambda_C = union over codewords c of sqrt(2) Z^n + c / sqrt(2).

    Basis in y-coordinates: the RREF codeword generators plus 2 e_j for each
    non-pivot column j.
    """
    n = C.n
    rows = [list(r) for r in C.generator]
    for j in range(n):
        if j not in C.pivots:
            rows.append([2 * int(i == j) for i in range(n)])
    # order rows by leading column so the basis matrix is triangular
    rows.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
    gram = [[Fraction(_dot(a, b), 2) for b in rows] for a in rows]
    return Lattice(n, rows, gram, C)


def _theta_poly_1d(top: int, odd: bool) -> list[int]:
    """Coefficients in q^{y^2} of sum over y in 2Z (or 2Z+1) up to exponent top."""
    poly = [0] * (top + 1)
    y = 1 if odd else 0
    while y * y <= top:
        poly[y * y] += 1 if y == 0 else 2
        y += 2
    return poly


def _poly_mul(a: list[int], b: list[int], top: int) -> list[int]:
    out = [0] * (top + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(0, top + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _poly_pow(a: list[int], k: int, top: int) -> list[int]:
    out = [1] + [0] * top
    for _ in range(k):
        out = _poly_mul(out, a, top)
    return out


def theta_series(C: BinaryCode, norm_cutoff) -> list[tuple[Fraction, int]]:
    """[(norm, count)] for Lambda_C from the weight enumerator and 1d shells.

    A codeword of weight w contributes theta_even^{n-w} theta_odd^w in q^{|y|^2},
    and a vector's norm is |y|^2 / 2.
    """
    norm_cutoff = Fraction(norm_cutoff)
    top = int(2 * norm_cutoff)
    ev, od = _theta_poly_1d(top, False), _theta_poly_1d(top, True)
    total = [0] * (top + 1)
    for w, count in C.weight_enumerator().items():
        term = _poly_mul(_poly_pow(ev, C.n - w, top), _poly_pow(od, w, top), top)
        for e in range(top + 1):
            total[e] += count * term[e]
    return [(Fraction(e, 2), c) for e, c in enumerate(total) if c]


def lattice_report(L: Lattice, norm_cutoff=4, max_rank: int = 24) -> dict:
    if L.code is None:
        raise ValueError("lattice report needs the underlying code")
    if L.rank > max_rank or Fraction(norm_cutoff) > 8:
        raise BudgetExceeded("enumeration budget exceeded (rank <= 24, norm <= 8)")
    theta = theta_series(L.code, norm_cutoff)
    roots = dict(theta).get(Fraction(2), 0)
    preds = code_predicates(L.code)
    return {
        "rank": L.rank,
        "det": fmt_fraction(L.det),
        "integral": L.integral,
        "even": L.even,
        "unimodular": L.det == 1,
        "root_count": roots,
        "theta": [[_num(nm), c] for nm, c in theta],
        "self_orthogonal": preds["self_orthogonal"],
        "doubly_even": preds["doubly_even"],
    }


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else fmt_fraction(x)


# ---------------------------------------------------------------------------
# braid signs


_EPS_EXP = {"bosonic": 0, "fermionic": 4, "semionic": 2}   # eps = zeta_8^k


def braid_sign(p, q, kind: str) -> ExactScalar:
    """eps^{p.q} with eps = 1, -1, i for bosonic, fermionic, semionic.

    For semionic currents p.q must be even, so the value is (-1)^{p.q/2}.
    """
    if kind not in _EPS_EXP:
        raise ValueError(f"unknown kind {kind!r}")
    d = _dot(p, q)
    if kind == "semionic" and d % 2:
        raise ValueError(f"semionic braid sign needs p.q even (got {d})")
    return ExactScalar.root_of_unity8((_EPS_EXP[kind] * d) % 8)


# ---------------------------------------------------------------------------
# cocycles


def _eps_exponent(eps) -> int:
    table = {1: 0, -1: 4, "1": 0, "-1": 4, "i": 2, "bosonic": 0, "fermionic": 4, "semionic": 2}
    if isinstance(eps, ExactScalar):
        for k in range(8):
            if ExactScalar.root_of_unity8(k) == eps:
                return k
    if eps in table:
        return table[eps]
    raise ValueError(f"epsilon must be 1, -1 or i (got {eps!r})")


@dataclass
class Cocycle:
    code: BinaryCode
    eps_exponent: int                  # eps = zeta_8^eps_exponent
    table: dict                        # (p, q) -> exponent k, value zeta_8^k

    def value(self, p, q) -> ExactScalar:
        return ExactScalar.root_of_unity8(self.table[(tuple(p), tuple(q))] % 8)

    def to_json(self) -> dict:
        words = self.code.codewords()
        return {
            "codewords": ["".join(map(str, w)) for w in words],
            "eps": ExactScalar.root_of_unity8(self.eps_exponent).to_json(),
            "exponents_mod8": [[self.table[(p, q)] for q in words] for p in words],
        }


@dataclass
class Obstruction:
    triple: tuple                      # (p, q, i) whose constraint cannot be met
    reason: str

    def to_json(self) -> dict:
        return {"triple": ["".join(map(str, w)) for w in self.triple], "reason": self.reason}


def _constraints(words, eps_k):
    """Linear constraints sum coef * x[var] = rhs (mod 8), var = (p index, q index)."""
    index = {w: k for k, w in enumerate(words)}
    out = []
    for p, q, i in itertools.product(range(len(words)), repeat=3):
        P, Q, I = words[p], words[q], words[i]
        terms = Counter()
        terms[(p, index[_add(Q, I)])] += 1
        terms[(q, i)] += 1
        terms[(q, index[_add(P, I)])] -= 1
        terms[(p, i)] -= 1
        rhs = (eps_k * _dot(P, Q)) % 8
        out.append(((p, q, i), {v: c % 8 for v, c in terms.items() if c % 8}, rhs))
    return out


def solve_cocycle(C: BinaryCode, eps, max_size: int = 64, node_budget: int = 200000):
    """Find c: C x C -> mu_8 with c(p,q+i)c(q,i) = eps^{p.q} c(q,p+i)c(p,i).

    Gauge: c(0, .) = c(., 0) = 1.  Depth-first search with constraint
    propagation in a fixed variable order.  Returns a :class:`Cocycle` (re-verified
    on all triples) or an :class:`Obstruction` naming an unsatisfiable triple.
    """
    if C.size > max_size:
        raise BudgetExceeded(f"cocycle search is capped at |C| <= {max_size}")
    eps_k = _eps_exponent(eps)
    words = C.codewords()
    m = len(words)
    zero = words.index((0,) * C.n)
    cons = _constraints(words, eps_k)
    by_var: dict = {}
    for ci, (_, terms, _) in enumerate(cons):
        for v in terms:
            by_var.setdefault(v, []).append(ci)
    assign = {}
    for k in range(m):
        assign[(zero, k)] = 0
        assign[(k, zero)] = 0
    order = [(a, b) for a in range(m) for b in range(m) if a != zero and b != zero]
    nodes = [0]
    last_fail = [None]

    def propagate(assign, queue):
        trail = []
        while queue:
            ci = queue.pop()
            trip, terms, rhs = cons[ci]
            unknown = [v for v in terms if v not in assign]
            acc = (rhs - sum(c * assign[v] for v, c in terms.items() if v in assign)) % 8
            if not unknown:
                if acc:
                    last_fail[0] = trip
                    return trail, False
                continue
            if len(unknown) == 1:
                v = unknown[0]
                c = terms[v]
                sols = [x for x in range(8) if (c * x - acc) % 8 == 0]
                if not sols:
                    last_fail[0] = trip
                    return trail, False
                if len(sols) == 1:
                    assign[v] = sols[0]
                    trail.append(v)
                    queue.extend(by_var.get(v, ()))
        return trail, True

    def undo(assign, trail):
        for v in trail:
            del assign[v]

    trail0, ok = propagate(assign, list(range(len(cons))))
    if not ok:
        return Obstruction(_words_of(words, last_fail[0]), "constraint violated by the gauge")

    def dfs(pos):
        while pos < len(order) and order[pos] in assign:
            pos += 1
        if pos == len(order):
            return True
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetExceeded("cocycle search node budget exhausted")
        v = order[pos]
        for x in range(8):
            assign[v] = x
            trail, ok = propagate(assign, list(by_var.get(v, ())))
            if ok and dfs(pos + 1):
                return True
            undo(assign, trail)
            del assign[v]
        return False

    if not dfs(0):
        return Obstruction(_words_of(words, last_fail[0]), "no assignment in mu_8 satisfies this constraint")
    table = {(words[a], words[b]): assign[(a, b)] for a in range(m) for b in range(m)}
    coc = Cocycle(C, eps_k, table)
    if verify_cocycle(coc) is not None:
        raise AssertionError("search returned a table that fails re-verification")
    return coc


def _words_of(words, trip):
    return tuple(words[k] for k in trip) if trip else ()


def verify_cocycle(coc: Cocycle):
    """Check the twisted cocycle condition on all triples; return the first failure or None."""
    words = coc.code.codewords()
    t = coc.table
    for p, q, i in itertools.product(words, repeat=3):
        lhs = t[(p, _add(q, i))] + t[(q, i)]
        rhs = coc.eps_exponent * _dot(p, q) + t[(q, _add(p, i))] + t[(p, i)]
        if (lhs - rhs) % 8:
            return (p, q, i)
    return None
