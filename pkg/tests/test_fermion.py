from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from cftk.exact import ExactScalar
from cftk.fermion import (
    PSI, PSISTAR, VACUUM, FermionSpace, FermionVOA, FockState, car_apply, car_defects,
    character, character_oracle, check_borcherds, check_commutator, check_derivative,
    check_invariance, field_mode, format_state, grading_defect, parse_state, random_samples,
    segal_round_annulus_check,
)

VOA = FermionVOA()
H = Fraction(1, 2)


def test_basis_examples():
    sp = FermionSpace(2)
    assert sp.dims() == [1, 2, 1, 2, 4]
    assert [format_state(s) for s in sp.by_weight[Fraction(1)]] == ["psi(-1/2)psi*(-1/2)|0>"]
    assert FermionSpace(0).states == [VACUUM]


def test_parse_format_roundtrip():
    for s in FermionSpace(3).states:
        assert parse_state(format_state(s)) == {s: 1}


def test_car_examples():
    assert car_apply(("psi", -H), VACUUM) == (1, PSI)
    assert car_apply(("psi", -H), PSI) is None
    assert car_apply(("psi", H), PSISTAR) == (1, VACUUM)
    assert car_apply(("psistar", H), PSISTAR) is None
    assert car_apply(("psi", H), VACUUM) is None


def test_car_relations_exhaustive():
    assert car_defects(FermionSpace(3)) == 0


def test_vacuum_field_is_identity():
    sp = FermionSpace(2)
    m = field_mode("vac", -1, sp).matrix()
    assert m == [[Fraction(int(i == j)) for j in range(sp.dim)] for i in range(sp.dim)]
    for n in (-3, -2, 0, 1, 2):
        assert not any(any(r) for r in field_mode("vac", n, sp).matrix())


def test_virasoro_relations_c1():
    sp = FermionSpace(3)
    for m, n in product(range(-3, 4), repeat=2):
        for s in sp.states:
            v = {s: Fraction(1)}
            lhs = VOA.virasoro(m, VOA.virasoro(n, v))
            for k, c in VOA.virasoro(n, VOA.virasoro(m, v)).items():
                lhs[k] = lhs.get(k, 0) - c
            rhs = {k: (m - n) * c for k, c in VOA.virasoro(m + n, v).items()}
            if m == -n:
                rhs[s] = rhs.get(s, 0) + Fraction(m ** 3 - m, 12)
            diff = {k: lhs.get(k, 0) - rhs.get(k, 0) for k in set(lhs) | set(rhs)}
            assert not any(diff.values()), (m, n, s)


def test_norm_of_l_minus_2_vacuum():
    v = VOA.virasoro(-2, {VACUUM: Fraction(1)})
    assert sum(c * c for c in v.values()) == H


def test_virasoro_adjoint_in_orthonormal_basis():
    sp = FermionSpace(3)
    nu = VOA.conformal_vector
    for n in (1, 2, 3):
        Ln = field_mode(nu, n + 1, sp, VOA).matrix()
        Lmn = field_mode(nu, -n + 1, sp, VOA).matrix()
        assert Ln == [list(r) for r in zip(*Lmn)]


def test_borcherds_examples():
    assert not check_borcherds("vac", "psi(-1/2)|0>", "psi*(-1/2)|0>", 1, -2, 0)
    assert not check_borcherds("psi(-1/2)|0>", "psi(-1/2)|0>", "vac", 0, 0, -1)


samples = st.sampled_from(random_samples(11, 400, 3))


@given(samples)
def test_borcherds_property(sample):
    a, b, c, m, n, k = sample
    assert not check_borcherds(a, b, c, m, n, k)


@given(samples)
def test_commutator_property(sample):
    a, b, c, m, _n, k = sample
    assert not check_commutator(a, b, c, m, k)


@given(samples)
def test_grading_and_derivative(sample):
    a, _b, c, _m, n, _k = sample
    assert grading_defect(a, n, c) == []
    assert not check_derivative(a, n, c)


@pytest.mark.parametrize("state", ["vac", "nu", "psi(-1/2)|0>", "psi*(-1/2)|0>",
                                   "psi(-3/2)|0>", "psi(-1/2)psi*(-1/2)|0>"])
def test_invariance(state):
    r = check_invariance(state, 3)
    assert r["max_residual"] == ExactScalar(0) and r["entries"] > 0


def test_theta_sign_plus_one_breaks_invariance():
    # the unsigned exchange psi <-> psistar is not the invariant form's involution
    r = check_invariance("psi(-1/2)|0>", 2, FermionVOA(theta_sign=1))
    assert r["max_residual"] != ExactScalar(0)


def test_character_examples():
    assert [c for _, c in character(2).terms] == [1, 2, 1, 2, 4]
    assert character(4).coefficient(0) == 1
    assert character(4) == character_oracle(4)
    # pairs of strict half-odd partitions of total weight 4 (frozen from enumeration)
    assert character(4).coefficient(4) == 9


@pytest.mark.parametrize("r", ["1/3", "1/2", "1", "2/7"])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("gen", ["psi", "psistar"])
def test_segal_round_annulus(r, k, gen):
    out = segal_round_annulus_check(r, k, 4, gen)
    assert out["residual"] == "0" and out["entries_checked"] == FermionSpace(4).dim


def test_segal_validation():
    with pytest.raises(ValueError):
        segal_round_annulus_check("3/2", 0, 2)
