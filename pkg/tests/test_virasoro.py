import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cftk.exact import NotPositiveSemidefinite, ldl
from cftk.virasoro import (
    VirasoroParams, VermaModule, apply_ln, discrete_series, exp_annulus_matrix, gram_matrix,
    irreducible_truncation, level_weights, mode_matrix, sl2_bound, sl2_norm_experiment,
    smeared_mode_matrix, verma_basis,
)

P = VirasoroParams.parse


def test_verma_basis_sizes():
    assert verma_basis(P("1/2", "0"), 0).dims() == [1]
    assert verma_basis(P("1/2", "0"), 2).dims() == [1, 1, 2]
    assert verma_basis(P("1/2", "0"), 5).dims()[5] == 7


@pytest.mark.parametrize("c,h", [("1/2", "1/16"), ("1", "3/7"), ("7/10", "3/5")])
def test_apply_ln_examples(c, h):
    p = P(c, h)
    assert apply_ln(p, 1, apply_ln(p, -1, {(): 1}, 1), 1) == {(): 2 * p.h}
    assert apply_ln(p, 2, apply_ln(p, -2, {(): 1}, 2), 2) == {(): 4 * p.h + p.c / 2}
    for lam in [(1,), (2, 1), (1, 1, 1)]:
        assert apply_ln(p, 0, {lam: 1}, 3) == {lam: p.h + sum(lam)}


def test_gram_examples():
    p = P("1/2", "1/16")
    assert gram_matrix(p, 1) == [[2 * p.h]]
    assert gram_matrix(p, 2) == [[4 * p.h + p.c / 2, 6 * p.h], [6 * p.h, 8 * p.h ** 2 + 4 * p.h]]
    assert gram_matrix(P("1/2", "0"), 1) == [[0]]


def test_discrete_series_unitarity():
    for m in (1, 2, 3):
        c, hs = discrete_series(m)
        for h in hs:
            for level in range(5):
                ldl(gram_matrix(VirasoroParams(c, h), level))


def test_nonunitary_gram_detected():
    with pytest.raises(NotPositiveSemidefinite):
        ldl(gram_matrix(P("-1", "1/10"), 2))


def test_irreducible_examples():
    assert irreducible_truncation(P("1/2", "0"), 2).dims() == [1, 0, 1]
    assert irreducible_truncation(P("1", "0"), 1).dims() == [1, 0]
    assert irreducible_truncation(P("1/2", "1/16"), 4).dims() == [1, 1, 1, 2, 2]
    # frozen from the exact Gram kernel computation
    assert irreducible_truncation(P("1/2", "0"), 6).dims() == [1, 0, 1, 1, 2, 2, 3]


small = st.integers(-4, 4)


@given(small, st.sampled_from([(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1), ()]),
       st.sampled_from(["1/2,0", "1,1", "1/2,1/16"]))
def test_adjointness_property(n, lam, ch):
    c, h = ch.split(",")
    mod = VermaModule(P(c, h))
    la = mod.apply(n, {lam: 1})
    level = sum(lam) - n
    if level < 0:
        return
    from cftk.exact import enumerate_partitions
    for mu in enumerate_partitions(level):
        lhs = sum(v * mod.inner(k, mu) for k, v in la.items())
        rhs = sum(v * mod.inner(lam, k) for k, v in mod.apply(-n, {mu: 1}).items())
        assert lhs == rhs


def test_mode_matrices_hermitian_and_commutator():
    tr = irreducible_truncation(P("1/2", "1/2"), 6)
    L1, Lm1, L0 = mode_matrix(tr, 1), mode_matrix(tr, -1), mode_matrix(tr, 0)
    assert np.allclose(Lm1, L1.conj().T, atol=1e-12)
    assert np.allclose(np.diag(L0), level_weights(tr))
    # [L1, L-1] = 2 L0 away from the top level
    k = tr.offsets()[6]
    comm = (L1 @ Lm1 - Lm1 @ L1)[:k, :k]
    assert np.allclose(comm, 2 * L0[:k, :k], atol=1e-12)


def test_smeared_examples():
    tr = irreducible_truncation(P("1/2", "1/2"), 5)
    d = smeared_mode_matrix(tr, {0: 1}).matrix
    assert np.allclose(d, np.diag(level_weights(tr)))
    up = smeared_mode_matrix(tr, {1: -0.3}).matrix
    assert np.allclose(np.tril(up), 0)
    herm = smeared_mode_matrix(tr, {-1: 1, 1: 1}).matrix
    assert np.allclose(herm, herm.conj().T, atol=1e-12)


def test_exp_annulus_examples():
    tr = irreducible_truncation(P("1/2", "1/16"), 6)
    t = 0.37
    d = exp_annulus_matrix(tr, {0: 1}, t).matrix
    assert np.allclose(d, np.diag(np.exp(-t * level_weights(tr))))
    assert np.allclose(exp_annulus_matrix(tr, {0: 1, 1: -0.5}, 0.0).matrix, np.eye(d.shape[0]))
    tr0 = irreducible_truncation(P("1/2", "0"), 6)
    m = exp_annulus_matrix(tr0, {0: 1, 1: -0.5}, t).matrix
    assert np.allclose(np.tril(m, -1), 0)
    assert np.allclose(np.diag(m), np.exp(-t * level_weights(tr0)))
    with pytest.raises(ValueError):
        exp_annulus_matrix(tr0, {-1: 1}, t)


def test_exp_annulus_matches_expm():
    import scipy.linalg
    tr = irreducible_truncation(P("1", "1"), 5)
    rho = {0: 1, 1: -0.5, 2: 0.1j}
    m = exp_annulus_matrix(tr, rho, 0.8).matrix
    ref = scipy.linalg.expm(-0.8 * smeared_mode_matrix(tr, rho).matrix)
    assert np.max(np.abs(m - ref)) < 1e-12


@given(st.floats(0, 1), st.floats(0, 1))
def test_exp_annulus_semigroup(t, s):
    tr = irreducible_truncation(P("1/2", "0"), 6)
    rho = {0: 1, 1: -0.5}
    a = exp_annulus_matrix(tr, rho, t).matrix @ exp_annulus_matrix(tr, rho, s).matrix
    b = exp_annulus_matrix(tr, rho, t + s).matrix
    assert np.linalg.norm(a - b, 2) < 1e-10


def test_sl2_examples():
    out = sl2_norm_experiment(0.7, 0, 0.9, 20)
    assert out["truncated_norm"] == pytest.approx(0.9 ** 0.7, rel=1e-12)
    assert sl2_norm_experiment(0, 0, 0.5, 0)["truncated_norm"] == pytest.approx(1.0)
    out = sl2_norm_experiment(1, 0.3, 0.4, 64)
    assert out["bound"] == pytest.approx(0.7 / (0.4 * math.sqrt(0.51)), rel=1e-12)
    assert abs(out["bound"] - 2.4504) < 1e-4
    assert out["truncated_norm"] <= 2.4504
    with pytest.raises(ValueError):
        sl2_norm_experiment(1, 0.6, 0.5, 8)


@given(st.floats(0.05, 3), st.floats(0, 0.5), st.floats(0, 2 * math.pi), st.floats(0.05, 0.4))
def test_sl2_norm_bound_and_monotone(t, rz, ph, r):
    z = rz * complex(math.cos(ph), math.sin(ph))
    norms = [sl2_norm_experiment(t, z, r, n)["truncated_norm"] for n in (8, 16, 32)]
    bound = sl2_bound(t, z, r)
    assert all(x < bound + 1e-9 for x in norms)
    assert norms[0] <= norms[1] + 1e-9 and norms[1] <= norms[2] + 1e-9


@given(st.floats(0.1, 2), st.floats(0, 0.3), st.floats(0.1, 0.3), st.floats(0.05, 0.3))
def test_sl2_rescaling_inequality(t, rz, r, ds):
    s = r + ds
    if rz + s >= 1:
        return
    norm_r = sl2_norm_experiment(t, rz, r, 32)["truncated_norm"]
    assert norm_r <= (r / s) ** t * sl2_bound(t, rz, s) + 1e-9
