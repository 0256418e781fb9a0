"""The acceptance battery: ten checks over the exactly computable layer.

Each ``criterion_*`` function returns a :class:`Report` with raw metrics, so
callers (the CLI and the test suite) can apply their own assertions.
"""

from __future__ import annotations

import cmath
import itertools
import math
import time
from fractions import Fraction

import numpy as np

from . import annulus, codes, fermion, geometry, intertwiner, virasoro
from .exact import enumerate_partitions, fmt_fraction
from .report import Report, RunConfig

__all__ = ["CRITERIA", "run_suite", "VIRASORO_PAIRS", "NORM_GRID"]

VIRASORO_PAIRS = [("1/2", "0"), ("1/2", "1/2"), ("1/2", "1/16"), ("1", "0"), ("1", "1")]
TROTTER_T = math.log(2)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# 1-2: Virasoro


def _vec_inner(module: virasoro.VermaModule, x: dict, y: dict) -> Fraction:
    total = Fraction(0)
    for lam, a in x.items():
        for mu, b in y.items():
            if sum(lam) == sum(mu):
                total += a * b * module.inner(lam, mu)
    return total


def virasoro_exactness_defects(c: str, h: str, max_level: int = 4, max_mode: int = 4) -> dict:
    params = virasoro.VirasoroParams.parse(c, h)
    mod = virasoro.VermaModule(params)
    basis = [lam for n in range(max_level + 1) for lam in enumerate_partitions(n)]
    adj_bad = comm_bad = adj_n = comm_n = 0
    for n in range(-max_mode, max_mode + 1):
        for a in basis:
            la = mod.apply(n, {a: Fraction(1)})
            for b in basis:
                if sum(a) - n != sum(b):
                    continue
                adj_n += 1
                if _vec_inner(mod, la, {b: Fraction(1)}) != _vec_inner(mod, {a: Fraction(1)}, mod.apply(-n, {b: Fraction(1)})):
                    adj_bad += 1
    for m in range(-max_mode, max_mode + 1):
        for n in range(-max_mode, max_mode + 1):
            for x in basis:
                xv = {x: Fraction(1)}
                out = mod.apply(m, mod.apply(n, xv))
                virasoro._axpy(out, -1, mod.apply(n, mod.apply(m, xv)))
                virasoro._axpy(out, -(m - n), mod.apply(m + n, xv))
                if m == -n:
                    virasoro._axpy(out, -params.c * (m ** 3 - m) / 12, xv)
                comm_n += 1
                comm_bad += bool(out)
    return {"adjoint_checks": adj_n, "adjoint_failures": adj_bad,
            "commutator_checks": comm_n, "commutator_failures": comm_bad}


def criterion_1(cfg: RunConfig, mutate: bool = False) -> Report:
    per = {f"{c},{h}": virasoro_exactness_defects(c, h) for c, h in VIRASORO_PAIRS}
    ok = all(v["adjoint_failures"] == 0 and v["commutator_failures"] == 0 for v in per.values())
    return Report("virasoro-exactness", {"pairs": VIRASORO_PAIRS, "max_level": 4, "max_mode": 4},
                  _status(ok), {"per_pair": per})


def criterion_2(cfg: RunConfig, mutate: bool = False) -> Report:
    from .exact import NotPositiveSemidefinite, ldl

    per = {}
    ok = True
    for c, h in VIRASORO_PAIRS:
        p = virasoro.VirasoroParams.parse(c, h)
        mod = virasoro.VermaModule(p)
        psd_levels = []
        for level in range(7):
            try:
                ldl(mod.gram(level))
                psd_levels.append(True)
            except NotPositiveSemidefinite:
                psd_levels.append(False)
        g1 = mod.gram(1)
        g2 = mod.gram(2)
        cc, hh = p.c, p.h
        want2 = [[4 * hh + cc / 2, 6 * hh], [6 * hh, 8 * hh * hh + 4 * hh]]
        entry = {"psd_levels": psd_levels, "level1": g1 == [[2 * hh]], "level2": g2 == want2,
                 "level2_gram": [[fmt_fraction(x) for x in r] for r in g2]}
        ok &= all(psd_levels) and entry["level1"] and entry["level2"]
        per[f"{c},{h}"] = entry
    return Report("virasoro-gram", {"pairs": VIRASORO_PAIRS, "max_level": 6}, _status(ok), {"per_pair": per})


# ---------------------------------------------------------------------------
# 3: sl(2) norm bound

NORM_T = (0.25, 1.0, 2.5)
NORM_S = (0.5, 0.7, 0.9)
NORM_R_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)
NORM_PHASES = tuple(2 * math.pi * k / 5 for k in range(5))
NORM_CUTOFFS = (16, 32, 64)


def NORM_GRID():
    """(t, z, r): three lowest weights x |z| + r in {0.5, 0.7, 0.9} x five r/(|z|+r) x five arg z."""
    for t in NORM_T:
        for s in NORM_S:
            for f in NORM_R_FRACTIONS:
                r = f * s
                for ph in NORM_PHASES:
                    yield t, (s - r) * cmath.exp(1j * ph), r


def criterion_3(cfg: RunConfig, mutate: bool = False, slack: float = 1e-9) -> Report:
    worst_margin = math.inf
    monotone_violations = bound_violations = points = 0
    for t, z, r in NORM_GRID():
        norms = [virasoro.sl2_norm_experiment(t, z, r, N)["truncated_norm"] for N in NORM_CUTOFFS]
        bound = virasoro.sl2_bound(t, z, r)
        points += 1
        for nv in norms:
            worst_margin = min(worst_margin, bound - nv)
            bound_violations += not (nv < bound + slack)
        monotone_violations += sum(1 for a, b in zip(norms, norms[1:]) if b < a - slack)
    ok = bound_violations == 0 and monotone_violations == 0
    return Report("sl2-norm-bound", {"t": NORM_T, "s": NORM_S, "r_fractions": NORM_R_FRACTIONS,
                                     "phases": 5, "cutoffs": NORM_CUTOFFS},
                  _status(ok), {"grid_points": points, "bound_violations": bound_violations,
                                "monotone_violations": monotone_violations,
                                "min_bound_minus_norm": worst_margin},
                  tolerances={"slack": slack})


# ---------------------------------------------------------------------------
# 4: semigroups


def criterion_4(cfg: RunConfig, mutate: bool = False, tol: float = 1e-8) -> Report:
    z = geometry.interior_samples(64, seed=cfg.seed)
    metrics = {}
    ok = True
    for desc in ("identity", "mobius:a=1/2"):
        spec = geometry.SemigroupSpec(geometry.parse_koenigs(desc), tol=cfg.ode_tol)
        entry = {}
        for t in (0.25, math.log(2)):
            w = geometry.evolve_phi(spec, t, z)
            closed = float(np.max(np.abs(w - geometry.phi_closed_form(spec.koenigs, t, z))))
            func = geometry.koenigs_functional_check(spec, t, z)
            s = 0.5
            semi = float(np.max(np.abs(geometry.evolve_phi(spec, s, w) - geometry.evolve_phi(spec, t + s, z))))
            entry[f"t={t:.6g}"] = {"closed_form": closed, "functional": func, "semigroup": semi}
            ok &= closed < tol and func < tol and semi < tol
        metrics[desc] = entry
    return Report("semigroup-koenigs", {"samples": 64, "t": [0.25, math.log(2)]}, _status(ok),
                  metrics, tolerances={"max_residual": tol, "ode_tol": cfg.ode_tol})


# ---------------------------------------------------------------------------
# 5: Trotter


def trotter_setup(cutoff: int = 8):
    spec = geometry.SemigroupSpec(geometry.parse_koenigs("mobius:a=1/2"))
    f_hat, g_hat = geometry.real_part_fourier(spec.rho_coeffs())
    trunc = virasoro.irreducible_truncation(virasoro.VirasoroParams.parse("1/2", "0"), cutoff)
    return spec, f_hat, g_hat, trunc


def criterion_5(cfg: RunConfig, mutate: bool = False) -> Report:
    spec, f_hat, g_hat, trunc = trotter_setup(8)
    Ns = (8, 16, 32, 64)
    dists = {}
    ok = True
    for cut in (4, 6, 8):
        d = annulus.trotter_cauchy_distances(trunc, f_hat, g_hat, TROTTER_T, Ns, cut)
        dists[str(cut)] = {str(k): v for k, v in d.items()}
        vals = [d[n] for n in Ns]
        ok &= all(b < a for a, b in zip(vals, vals[1:]))
    ok &= dists["8"]["64"] < 1e-3
    import scipy.linalg

    Lf = virasoro.smeared_mode_matrix(trunc, f_hat, 8).matrix
    ref = scipy.linalg.expm(-TROTTER_T * Lf)
    g0 = max(float(np.max(np.abs(annulus.trotter_product(trunc, f_hat, {}, TROTTER_T, n, 8).matrix - ref)))
             for n in Ns + (128,))
    ok &= g0 < 1e-12
    return Report("trotter", {"t": TROTTER_T, "N": Ns, "cutoffs": [4, 6, 8], "c": "1/2", "h": "0"},
                  _status(ok), {"cauchy_distances": dists, "g_zero_max_deviation": g0},
                  provenance={"c": "1/2", "h": "0", "cutoff": 8, "path": "trotter", "N": 128,
                              "exact": False, "phase_convention": annulus.PHASE_CONVENTION},
                  tolerances={"d64_cutoff8": 1e-3, "g_zero": 1e-12})


# ---------------------------------------------------------------------------
# 6-8: fermion and intertwiner


def fermion_battery(cutoff=3, seed: int = 0, borcherds: int = 100, commutator: int = 50) -> dict:
    voa = fermion.FermionVOA()
    space = fermion.FermionSpace(cutoff)
    out = {"car_defects": fermion.car_defects(space)}
    samples = fermion.random_samples(seed, borcherds, cutoff)
    nonzero = bad = 0
    for a, b, c, m, n, k in samples:
        lhs, rhs = fermion.borcherds_sides(voa, {a: 1}, {b: 1}, {c: 1}, m, n, k)
        nonzero += bool(lhs or rhs)
        bad += lhs != rhs
    out["borcherds"] = {"samples": borcherds, "nonzero_sides": nonzero, "failures": bad}
    samples = fermion.random_samples(seed + 1, commutator, cutoff)
    out["commutator"] = {"samples": commutator,
                         "failures": sum(bool(fermion.check_commutator({a: 1}, {b: 1}, {c: 1}, m, k, voa))
                                         for a, b, c, m, _n, k in samples)}
    grading = deriv = 0
    for a, _b, c, m, n, _k in fermion.random_samples(seed + 2, 50, cutoff):
        grading += bool(fermion.grading_defect({a: 1}, n, {c: 1}, voa))
        deriv += bool(fermion.check_derivative({a: 1}, n, {c: 1}, voa))
    out["grading_failures"] = grading
    out["derivative_failures"] = deriv
    inv = {}
    for label in ("vac", "nu", "psi(-1/2)|0>"):
        r = fermion.check_invariance(label, cutoff, voa)
        inv[label] = {"entries": r["entries"], "max_residual": str(r["max_residual"])}
    out["invariance"] = inv
    ch = fermion.character(4)
    oracle = fermion.character_oracle(4)
    out["character"] = [[fmt_fraction(e), c] for e, c in ch.terms]
    out["character_matches_product"] = ch.terms == oracle.terms
    return out


def criterion_6(cfg: RunConfig, mutate: bool = False) -> Report:
    m = fermion_battery(cfg.fermion_cutoff, cfg.seed)
    ok = (m["car_defects"] == 0 and m["borcherds"]["failures"] == 0 and m["commutator"]["failures"] == 0
          and m["grading_failures"] == 0 and m["derivative_failures"] == 0
          and all(v["max_residual"] == "0" for v in m["invariance"].values())
          and m["character_matches_product"]
          and [c for _, c in m["character"]][:5] == [1, 2, 1, 2, 4])
    return Report("fermion-vosa", {"cutoff": cfg.fermion_cutoff, "seed": cfg.seed}, _status(ok), m)


def criterion_7(cfg: RunConfig, mutate: bool = False) -> Report:
    res = {}
    ok = True
    for r in ("1/3", "1/2"):
        for k in (0, 1, 2):
            for gen in ("psi", "psistar"):
                out = fermion.segal_round_annulus_check(r, k, 4, gen)
                res[f"r={r},k={k},{gen}"] = out["residual"]
                ok &= out["residual"] == "0"
    return Report("segal-round-annulus", {"r": ["1/3", "1/2"], "k": [0, 1, 2], "cutoff": 4},
                  _status(ok), {"residuals": res})


def criterion_8(cfg: RunConfig, mutate: bool = False) -> Report:
    Y, pK, pN = intertwiner.parity_descent(cfg.fermion_cutoff, cfg.grid_width or None)
    if mutate:
        Y.corrupt(fermion.PSI, -2, fermion.VACUUM, fermion.FockState((3,), ()), 1)
    reports = intertwiner.check_intertwiner_axioms(Y, seed=cfg.seed)
    shifts = {"(0,0,0)": intertwiner.delta_shift(0, 0, 0),
              "(1/2,0,1/2)": intertwiner.delta_shift("1/2", 0, "1/2"),
              "(1/4,1/4,0)": intertwiner.delta_shift("1/4", "1/4", 0)}
    want = {"(0,0,0)": 0, "(1/2,0,1/2)": 0, "(1/4,1/4,0)": Fraction(1, 2)}
    ok = all(r["max_residual"] == "0" for r in reports) and shifts == want
    return Report("intertwiner-descent", {"cutoff": cfg.fermion_cutoff, "mutated": mutate},
                  _status(ok), {"axioms": reports, "delta_shift": {k: fmt_fraction(v) for k, v in shifts.items()}})


# ---------------------------------------------------------------------------
# 9-10: codes


def random_code_flags(count: int = 20, seed: int = 0) -> dict:
    import random

    rng = random.Random(seed)
    bad = []
    for k in range(count):
        n = rng.randint(1, 12)
        dim = rng.randint(0, n)
        C = codes.random_code(n, dim, rng.randrange(10 ** 9))
        p = codes.code_predicates(C)
        L = codes.code_lattice(C)
        if L.integral != p["self_orthogonal"] or L.even != p["doubly_even"]:
            bad.append(C.name)
    return {"codes": count, "mismatches": bad}


def criterion_9(cfg: RunConfig, mutate: bool = False) -> Report:
    h8 = codes.builtin_code("hamming8")
    preds = codes.code_predicates(h8)
    rep8 = codes.lattice_report(codes.code_lattice(h8), norm_cutoff=4)
    g24 = codes.builtin_code("golay24")
    rep24 = codes.lattice_report(codes.code_lattice(g24), norm_cutoff=2)
    rnd = random_code_flags(20, cfg.seed)
    theta8 = {nm: c for nm, c in rep8["theta"]}
    ok = (all(preds.values()) and rep8["even"] and rep8["det"] == "1" and rep8["root_count"] == 240
          and theta8.get(0) == 1 and theta8.get(2) == 240 and theta8.get(4) == 2160
          and rep24["even"] and rep24["det"] == "1" and rep24["root_count"] == 48
          and not rnd["mismatches"])
    return Report("codes-lattices", {"seed": cfg.seed}, _status(ok),
                  {"hamming8_predicates": preds, "hamming8_lattice": rep8,
                   "golay24_lattice": {k: v for k, v in rep24.items() if k != "theta"},
                   "random_codes": rnd})


def braid_tables(n: int = 4) -> dict:
    from .exact import ExactScalar

    words = list(itertools.product((0, 1), repeat=n))
    mism = 0
    rejected = 0
    expected_rejections = 0
    for p in words:
        for q in words:
            d = sum(a * b for a, b in zip(p, q))
            mism += codes.braid_sign(p, q, "bosonic") != ExactScalar(1)
            mism += codes.braid_sign(p, q, "fermionic") != ExactScalar((-1) ** d)
            if d % 2:
                expected_rejections += 1
                try:
                    codes.braid_sign(p, q, "semionic")
                except ValueError:
                    rejected += 1
            else:
                mism += codes.braid_sign(p, q, "semionic") != ExactScalar((-1) ** (d // 2))
    return {"pairs": len(words) ** 2, "mismatches": mism,
            "semionic_violations": expected_rejections, "semionic_rejected": rejected}


def criterion_10(cfg: RunConfig, mutate: bool = False) -> Report:
    cases = [("trivial(3)", e) for e in (1, -1, "i")] + [("repetition(2)", -1), ("repetition(4)", "i")]
    res = {}
    ok = True
    for name, eps in cases:
        out = codes.solve_cocycle(codes.builtin_code(name), eps)
        good = isinstance(out, codes.Cocycle) and codes.verify_cocycle(out) is None
        res[f"{name},eps={eps}"] = "consistent" if good else "obstructed"
        ok &= good
    bt = braid_tables(4)
    ok &= bt["mismatches"] == 0 and bt["semionic_rejected"] == bt["semionic_violations"]
    return Report("cocycles-braids", {"cases": [f"{n},{e}" for n, e in cases]}, _status(ok),
                  {"cocycles": res, "braid_tables": bt})


CRITERIA = {
    1: ("virasoro-exactness", criterion_1, 30),
    2: ("virasoro-gram", criterion_2, 60),
    3: ("sl2-norm-bound", criterion_3, 60),
    4: ("semigroup-koenigs", criterion_4, 10),
    5: ("trotter", criterion_5, 120),
    6: ("fermion-vosa", criterion_6, 120),
    7: ("segal-round-annulus", criterion_7, 10),
    8: ("intertwiner-descent", criterion_8, 30),
    9: ("codes-lattices", criterion_9, 180),
    10: ("cocycles-braids", criterion_10, 30),
}


def _full_extras(cfg: RunConfig) -> dict:
    """Extra checks in the full profile: larger samples and the hamming8 cocycles."""
    out = {}
    m = fermion_battery(cfg.fermion_cutoff, cfg.seed + 100, borcherds=300, commutator=150)
    out["fermion_extended"] = m["borcherds"]["failures"] == 0 and m["commutator"]["failures"] == 0
    h8 = codes.builtin_code("hamming8")
    out["hamming8_cocycles"] = all(isinstance(codes.solve_cocycle(h8, e), codes.Cocycle) for e in (1, -1, "i"))
    Y, _, _ = intertwiner.parity_descent(cfg.fermion_cutoff)
    out["intertwiner_extended"] = all(r["max_residual"] == "0"
                                      for r in intertwiner.check_intertwiner_axioms(Y, cfg.seed + 7, 200))
    return out


def run_suite(profile: str = "fast", cfg: RunConfig | None = None, mutate: bool = False,
              timings: dict | None = None) -> Report:
    """Run the battery; ``timings`` (if given) receives wall-clock seconds per check."""
    if profile not in ("fast", "full"):
        raise ValueError("profile must be fast or full")
    cfg = cfg or RunConfig()
    results = {}
    failing = []
    for idx, (name, fn, _limit) in CRITERIA.items():
        t0 = time.perf_counter()
        rep = fn(cfg, mutate=mutate)
        if timings is not None:
            timings[name] = time.perf_counter() - t0
        results[name] = rep.status
        if rep.status != "pass":
            failing.append(name)
    if profile == "full":
        extras = _full_extras(cfg)
        for k, v in extras.items():
            results[k] = "pass" if v else "fail"
            if not v:
                failing.append(k)
    return Report("suite", {"profile": profile, "mutate": mutate, "config": cfg.to_json()},
                  _status(not failing), {"checks": results, "failing": failing})
