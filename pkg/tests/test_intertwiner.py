from fractions import Fraction

import pytest

from cftk.fermion import PSI, VACUUM, FermionSpace, FermionVOA, FockState, field_mode
from cftk.intertwiner import (
    GridError, NotASubmodule, SubmoduleProjection, check_intertwiner_axioms, delta_shift,
    descent_modes, parity_descent, subalgebra_generators,
)

VOA = FermionVOA()


def test_delta_shift_table():
    assert delta_shift(0, 0, 0) == 0
    assert delta_shift("1/2", 0, "1/2") == 0
    assert delta_shift("1/4", "1/4", 0) == Fraction(1, 2)


def test_projections_are_module_maps():
    sp = FermionSpace(3)
    for which in ("even", "odd", "identity"):
        p = SubmoduleProjection.parity(which, sp)
        assert p.is_idempotent_selfadjoint() and p.commutes_with_l0()
    bogus = SubmoduleProjection.span("vac-only", [VACUUM], sp)
    with pytest.raises(NotASubmodule):
        descent_modes(bogus, bogus, {PSI: 1}, 4)


def test_projection_naturality_on_generators():
    sp = FermionSpace(2)
    p = SubmoduleProjection.parity("even", sp)
    for a in subalgebra_generators():
        for n in range(-3, 4):
            for s in sp.states:
                v = {s: Fraction(1)}
                assert p.apply(VOA.apply_mode(a, n, v)) == VOA.apply_mode(a, n, p.apply(v))


def test_identity_descent_recovers_field_modes():
    sp = FermionSpace(2)
    ident = SubmoduleProjection.parity("identity", sp)
    Y = descent_modes(ident, ident, {PSI: 1}, 8)
    for n in range(-3, 3):
        m = field_mode(PSI, n, sp).matrix()
        for j, s in enumerate(sp.states):
            got = Y.mode({PSI: Fraction(1)}, n, {s: Fraction(1)})
            assert {t: v for t, v in got.items() if t in sp.index} == \
                {sp.states[i]: m[i][j] for i in range(sp.dim) if m[i][j]}


def test_parity_descent_blocks():
    Y, pK, pN = parity_descent(3)
    for k in range(-3, 3):
        for s in pN.space.states:
            out = Y.mode({PSI: Fraction(1)}, k, {s: Fraction(1)})
            assert all(t.parity == 1 for t in out)
            if s.parity == 1:
                assert out == {}


def test_vacuum_charge_descends_to_projection():
    sp = FermionSpace(2)
    ident = SubmoduleProjection.parity("identity", sp)
    even = SubmoduleProjection.parity("even", sp)
    Y = descent_modes(even, ident, {VACUUM: 1}, 4)
    for k in Y.grid:
        for s in sp.states:
            out = Y.mode({VACUUM: Fraction(1)}, k, {s: Fraction(1)})
            expect = {s: 1} if (k == -1 and s.parity == 0) else {}
            assert out == expect


def test_grading_law():
    Y, _, _ = parity_descent(3)
    for a in (PSI, FockState((3,), ()), FockState((1,), (1,))):
        assert Y.grading_defects({a: Fraction(1)}) == []


def test_grid_error_when_too_narrow():
    Y, _, _ = parity_descent(3, grid_width=1)
    with pytest.raises(GridError):
        Y.mode({PSI: Fraction(1)}, -3, {VACUUM: Fraction(1)})


def test_trivial_intertwiner_axioms():
    sp = FermionSpace(2)
    ident = SubmoduleProjection.parity("identity", sp)
    Y = descent_modes(ident, ident, {PSI: 1}, 12)
    assert all(r["max_residual"] == "0" for r in check_intertwiner_axioms(Y, seed=5, samples=20))


def test_parity_descent_axioms():
    Y, _, _ = parity_descent(3)
    reports = check_intertwiner_axioms(Y, seed=0, samples=50)
    assert [r["axiom"] for r in reports] == ["derivative", "borcherds", "commutator"]
    assert all(r["max_residual"] == "0" for r in reports)


def test_corruption_is_flagged():
    Y, _, _ = parity_descent(3)
    Y.corrupt(PSI, -2, VACUUM, FockState((3,), ()), 1)
    reports = {r["axiom"]: r["max_residual"] for r in check_intertwiner_axioms(Y, seed=0, samples=50)}
    assert reports["derivative"] != "0" and reports["borcherds"] != "0"
