"""Command-line entry point: every computation and check as a subcommand emitting a Report.

Exit codes: 0 pass, 1 fail (or indeterminate), 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exact import fmt_fraction, ldl, NotPositiveSemidefinite, parse_fraction
from .report import Report, RunConfig, load_config

__all__ = ["main", "build_parser", "run", "UsageError"]

NORM_SLACK = 1e-9
SEMIGROUP_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _word(text: str) -> tuple:
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"not a 0/1 word: {text!r}")
    return tuple(int(ch) for ch in text)


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _matrix_json(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0.0) > 0:
        return [[[float(x.real), float(x.imag)] for x in row] for row in m]
    return np.real(m).astype(float).tolist()


# ---------------------------------------------------------------------------
# virasoro


def cmd_virasoro_gram(a, cfg):
    from .virasoro import VirasoroParams, gram_matrix, verma_basis

    p = VirasoroParams.parse(a.c, a.h)
    g = gram_matrix(p, a.level)
    try:
        selected, _, _ = ldl(g)
        psd, rank = True, len(selected)
    except NotPositiveSemidefinite:
        psd, rank = False, None
    basis = verma_basis(p, a.level).level_data(a.level).verma_basis
    return Report("virasoro-gram", {"c": a.c, "h": a.h, "level": a.level}, _status(psd),
                  {"basis": ["L" + "".join(f"(-{k})" for k in lam) for lam in basis],
                   "gram": [[fmt_fraction(x) for x in row] for row in g],
                   "positive_semidefinite": psd, "rank": rank})


def cmd_virasoro_irrep(a, cfg):
    from .exact import qseries_of_graded_dims
    from .virasoro import VirasoroParams, irreducible_truncation

    cutoff = a.cutoff if a.cutoff is not None else cfg.virasoro_cutoff
    p = VirasoroParams.parse(a.c, a.h)
    try:
        tr = irreducible_truncation(p, cutoff)
        dims = tr.dims()
    except NotPositiveSemidefinite as exc:
        return Report("virasoro-irrep", {"c": a.c, "h": a.h, "cutoff": cutoff}, "fail",
                      {"error": str(exc)})
    ch = qseries_of_graded_dims({Fraction(k): d for k, d in enumerate(dims)}, cutoff)
    return Report("virasoro-irrep", {"c": a.c, "h": a.h, "cutoff": cutoff}, "pass",
                  {"dims": dims, "character": [[fmt_fraction(e), n] for e, n in ch.terms],
                   "orthonormal": tr.orthonormal},
                  provenance={"c": a.c, "h": a.h, "cutoff": cutoff, "path": "irreducible",
                              "exact": True})


def cmd_virasoro_norm_bound(a, cfg):
    from .virasoro import sl2_norm_experiment

    cutoffs = a.cutoffs
    norms = [sl2_norm_experiment(a.t, a.z, a.r, n)["truncated_norm"] for n in cutoffs]
    bound = sl2_norm_experiment(a.t, a.z, a.r, cutoffs[0])["bound"]
    below = all(x < bound + NORM_SLACK for x in norms)
    monotone = all(y >= x - NORM_SLACK for x, y in zip(norms, norms[1:]))
    return Report("virasoro-norm-bound",
                  {"t": a.t, "z": [a.z.real, a.z.imag], "r": a.r, "cutoffs": list(cutoffs)},
                  _status(below and monotone),
                  {"truncated_norms": norms, "bound": bound, "below_bound": below,
                   "nondecreasing": monotone},
                  tolerances={"slack": NORM_SLACK})


# ---------------------------------------------------------------------------
# semigroup


def _semigroup(a, cfg):
    from .geometry import SemigroupSpec, parse_koenigs

    return SemigroupSpec(parse_koenigs(a.koenigs), log2_samples=cfg.fourier_log2, tol=cfg.ode_tol)


def cmd_semigroup_evolve(a, cfg):
    from .geometry import evolve_phi, interior_samples, phi_closed_form

    spec = _semigroup(a, cfg)
    z = np.array(a.z, dtype=complex) if a.z else interior_samples(a.samples, cfg.seed)
    w = evolve_phi(spec, a.t, z)
    metrics = {"z": z, "phi": w}
    try:
        metrics["closed_form_deviation"] = float(np.max(np.abs(w - phi_closed_form(spec.koenigs, a.t, z))))
    except ValueError:
        pass
    return Report("semigroup-evolve", {"koenigs": a.koenigs, "t": a.t}, "pass", metrics,
                  tolerances={"ode_tol": cfg.ode_tol})


def cmd_semigroup_check(a, cfg):
    from .geometry import evolve_phi, interior_samples, koenigs_functional_check

    spec = _semigroup(a, cfg)
    z = interior_samples(a.samples, cfg.seed)
    functional = koenigs_functional_check(spec, a.t, z)
    s = a.t / 2
    semi = float(np.max(np.abs(evolve_phi(spec, s, evolve_phi(spec, a.t - s, z)) - evolve_phi(spec, a.t, z))))
    worst = max(functional, semi)
    return Report("semigroup-check", {"koenigs": a.koenigs, "t": a.t, "samples": a.samples,
                                      "seed": cfg.seed},
                  _status(worst < SEMIGROUP_TOL),
                  {"functional_residual": functional, "semigroup_residual": semi, "max_residual": worst},
                  tolerances={"max_residual": SEMIGROUP_TOL, "ode_tol": cfg.ode_tol})


# ---------------------------------------------------------------------------
# annulus


def _annulus_setup(a, cfg):
    from .geometry import real_part_fourier
    from .virasoro import VirasoroParams, irreducible_truncation

    cutoff = a.cutoff if a.cutoff is not None else cfg.virasoro_cutoff
    spec = _semigroup(a, cfg)
    trunc = irreducible_truncation(VirasoroParams.parse(a.c, a.h), cutoff)
    rho = spec.rho_coeffs()
    f_hat, g_hat = real_part_fourier(rho)
    return cutoff, spec, trunc, rho, f_hat, g_hat


def _params(a, cutoff, **extra):
    d = {"c": a.c, "h": a.h, "cutoff": cutoff, "koenigs": a.koenigs, "t": a.t}
    d.update(extra)
    return d


def cmd_annulus_exact(a, cfg):
    from .annulus import build_exact_part

    cutoff, spec, trunc, rho, _, _ = _annulus_setup(a, cfg)
    op = build_exact_part(trunc, rho, a.t, cutoff)
    return Report("annulus-exact", _params(a, cutoff), "pass",
                  {"matrix": _matrix_json(op.matrix), "operator_norm": float(np.linalg.norm(op.matrix, 2)),
                   "rho_fourier": {str(k): v for k, v in sorted(rho.items())}},
                  provenance=op.provenance)


def cmd_annulus_trotter(a, cfg):
    from .annulus import PHASE_CONVENTION, trotter_cauchy_distances

    cutoff, spec, trunc, rho, f_hat, g_hat = _annulus_setup(a, cfg)
    ns = a.ns or cfg.trotter_ns
    d = trotter_cauchy_distances(trunc, f_hat, g_hat, a.t, ns, cutoff)
    vals = [d[n] for n in ns]
    ok = all(y < x for x, y in zip(vals, vals[1:]))
    return Report("annulus-trotter", _params(a, cutoff, N=list(ns)), _status(ok),
                  {"cauchy_distances": {str(n): d[n] for n in ns}, "strictly_decreasing": ok},
                  provenance={"c": a.c, "h": a.h, "cutoff": cutoff, "path": "trotter",
                              "N": 2 * ns[-1], "exact": False, "phase_convention": PHASE_CONVENTION})


def cmd_annulus_covariance(a, cfg):
    from .annulus import PHASE_CONVENTION, covariance_check
    from .geometry import CircleFlow

    cutoff, spec, trunc, rho, f_hat, g_hat = _annulus_setup(a, cfg)
    flow = CircleFlow(g_hat, tol=cfg.ode_tol)
    out = covariance_check(trunc, f_hat, flow, a.t, a.N, a.j, cutoff, a.convention, a.compare_levels)
    return Report("annulus-covariance",
                  _params(a, cutoff, N=a.N, j=a.j, convention=a.convention, compare_levels=a.compare_levels),
                  _status(out["residual"] < a.tol), out,
                  provenance={"c": a.c, "h": a.h, "cutoff": cutoff, "path": "covariance", "N": a.N,
                              "exact": False, "phase_convention": PHASE_CONVENTION},
                  tolerances={"residual": a.tol})


def cmd_annulus_region(a, cfg):
    from .geometry import AnnulusSpec, Mobius, annulus_interior
    from .plotting import region_svg

    spec = _semigroup(a, cfg)
    psi = Mobius(a.a, a.beta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        region = annulus_interior(AnnulusSpec(psi, spec, a.t), a.resolution)
    out_dir = Path(a.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    svg = region_svg(region, out_dir / "annulus-region.svg", f"t={a.t:g} {a.koenigs}", a.points or None)
    metrics = {"region": region.to_json(), "svg": svg.name}
    if a.points:
        metrics["membership"] = {f"{p.real:g}{p.imag:+g}i": m
                                 for p, m in zip(a.points, region.contains(np.array(a.points)))}
    status = "indeterminate" if region.empty else "pass"
    return Report("annulus-region", {"koenigs": a.koenigs, "t": a.t, "psi": psi.to_json(),
                                     "resolution": a.resolution}, status, metrics,
                  tolerances={"resolution": a.resolution})


# ---------------------------------------------------------------------------
# fermion


def _fcut(a, cfg):
    return a.cutoff if a.cutoff is not None else cfg.fermion_cutoff


def cmd_fermion_basis(a, cfg):
    from .fermion import FermionSpace

    space = FermionSpace(_fcut(a, cfg))
    return Report("fermion-basis", {"cutoff": fmt_fraction(space.cutoff)}, "pass",
                  dict(space.to_json(), dim=space.dim))


def cmd_fermion_borcherds(a, cfg):
    from .fermion import FermionVOA, borcherds_sides, format_state, random_samples

    voa = FermionVOA()
    cutoff = _fcut(a, cfg)
    bad, nonzero = [], 0
    for x, y, z, m, n, k in random_samples(cfg.seed, a.samples, cutoff, a.index_range):
        lhs, rhs = borcherds_sides(voa, {x: 1}, {y: 1}, {z: 1}, m, n, k)
        nonzero += bool(lhs or rhs)
        if lhs != rhs:
            bad.append([format_state(x), format_state(y), format_state(z), m, n, k])
    return Report("fermion-borcherds", {"cutoff": str(cutoff), "samples": a.samples, "seed": cfg.seed,
                                        "index_range": a.index_range},
                  _status(not bad), {"failures": bad, "nonzero_samples": nonzero,
                                     "max_residual": "0" if not bad else "nonzero"})


def cmd_fermion_invariance(a, cfg):
    from .fermion import check_invariance

    cutoff = _fcut(a, cfg)
    r = check_invariance(a.state, cutoff)
    worst = r["max_residual"]
    return Report("fermion-invariance", {"state": a.state, "cutoff": str(cutoff)}, _status(not worst),
                  {"entries": r["entries"], "max_residual": worst,
                   "nonzero_residuals": len(r["residuals"])})


def cmd_fermion_char(a, cfg):
    from .fermion import character, character_oracle

    cutoff = a.cutoff if a.cutoff is not None else "4"
    ch, oracle = character(cutoff), character_oracle(cutoff)
    return Report("fermion-char", {"cutoff": str(cutoff)}, _status(ch.terms == oracle.terms),
                  {"character": [[fmt_fraction(e), n] for e, n in ch.terms],
                   "matches_product": ch.terms == oracle.terms})


def cmd_fermion_segal(a, cfg):
    from .fermion import segal_round_annulus_check

    cutoff = a.cutoff if a.cutoff is not None else "4"
    out = segal_round_annulus_check(a.r, a.k, cutoff, a.generator)
    return Report("fermion-segal", {"r": a.r, "k": a.k, "cutoff": str(cutoff), "generator": a.generator},
                  _status(out["residual"] == "0"), out)


# ---------------------------------------------------------------------------
# intertwiner


def _descent(a, cfg):
    from .intertwiner import parity_descent

    return parity_descent(_fcut(a, cfg), cfg.grid_width or None)


def cmd_intertwiner_descend(a, cfg):
    from .fermion import PSI, format_state

    Y, pK, pN = _descent(a, cfg)
    defects = Y.grading_defects({PSI: Fraction(1)})
    modes = {}
    for k in range(-2, 2):
        entries = []
        for s in pN.space.states:
            for t, v in Y.mode({PSI: Fraction(1)}, k, {s: Fraction(1)}).items():
                entries.append([format_state(t), format_state(s), fmt_fraction(v)])
        modes[str(k)] = entries
    return Report("intertwiner-descend",
                  {"cutoff": str(_fcut(a, cfg)), "target": pK.name, "source": pN.name},
                  _status(not defects),
                  {"label": Y.label, "delta": Y.delta,
                   "grid": [fmt_fraction(Y.grid[0]), fmt_fraction(Y.grid[-1])],
                   "psi_modes": modes, "grading_defects": defects})


def cmd_intertwiner_check(a, cfg):
    from .fermion import PSI, VACUUM, FockState
    from .intertwiner import check_intertwiner_axioms

    Y, _, _ = _descent(a, cfg)
    if a.mutate:
        Y.corrupt(PSI, -2, VACUUM, FockState((3,), ()), 1)
    reports = check_intertwiner_axioms(Y, cfg.seed, a.samples)
    ok = all(r["max_residual"] == "0" for r in reports)
    return Report("intertwiner-check", {"cutoff": str(_fcut(a, cfg)), "samples": a.samples,
                                        "seed": cfg.seed, "mutate": a.mutate},
                  _status(ok), {"axioms": reports})


# ---------------------------------------------------------------------------
# codes


def _code(a):
    from .codes import builtin_code, code_from_text

    if bool(a.builtin) == bool(a.file):
        raise UsageError("give exactly one of --builtin or --file")
    if a.builtin:
        return builtin_code(a.builtin)
    return code_from_text(Path(a.file).read_text(encoding="utf-8"), Path(a.file).name)


def cmd_code_predicates(a, cfg):
    from .codes import code_predicates

    C = _code(a)
    preds = code_predicates(C)
    return Report("code-predicates", {"code": C.name, "n": C.n, "dim": C.dim}, "pass",
                  dict(preds, weight_enumerator=C.weight_enumerator(), min_weight=C.min_weight()))


def cmd_code_lattice(a, cfg):
    from .codes import code_lattice, lattice_report

    C = _code(a)
    L = code_lattice(C)
    rep = lattice_report(L, a.norm_cutoff)
    if a.report == "roots":
        metrics = {k: rep[k] for k in ("root_count", "even", "det")}
    else:
        metrics = rep
    if a.out:
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{C.name}-gram.csv").write_text(L.gram_csv(), encoding="utf-8")
    return Report("code-lattice", {"code": C.name, "report": a.report, "norm_cutoff": a.norm_cutoff},
                  "pass", metrics)


def cmd_code_theta(a, cfg):
    from .codes import _num, theta_series

    C = _code(a)
    theta = theta_series(C, a.norm_cutoff)
    return Report("code-theta", {"code": C.name, "norm_cutoff": a.norm_cutoff}, "pass",
                  {"theta": [[_num(nm), c] for nm, c in theta]})


def cmd_code_cocycle(a, cfg):
    from .codes import Cocycle, solve_cocycle, verify_cocycle

    C = _code(a)
    out = solve_cocycle(C, a.eps)
    params = {"code": C.name, "eps": a.eps}
    if isinstance(out, Cocycle):
        ok = verify_cocycle(out) is None
        return Report("code-cocycle", params, _status(ok),
                      {"result": "consistent" if ok else "inconsistent", "cocycle": out.to_json()})
    return Report("code-cocycle", params, "fail", {"result": "obstructed", "obstruction": out.to_json()})


def cmd_code_braid(a, cfg):
    from .codes import braid_sign

    if len(a.p) != len(a.q):
        raise UsageError("words must have equal length")
    value = braid_sign(a.p, a.q, a.kind)
    return Report("code-braid", {"p": "".join(map(str, a.p)), "q": "".join(map(str, a.q)),
                                 "kind": a.kind}, "pass", {"sign": value})


# ---------------------------------------------------------------------------
# suite


def cmd_suite(a, cfg):
    from .suite import run_suite

    return run_suite(a.profile, cfg, a.mutate)


# ---------------------------------------------------------------------------
# parser


def _globals(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="INI file with a [cftk] section")
    parser.add_argument("--seed", type=int, default=d, help="RNG seed (overrides CFTK_SEED)")
    parser.add_argument("--out", default=d, help="directory for report and artifact files")
    parser.add_argument("--format", choices=("json", "csv"), default=d, help="report format")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cftk", description="Exact and numerical checks for unitary CFT constructions.")
    _globals(p, suppress=False)
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(group, name, fn, help_=None):
        sp = group.add_parser(name, help=help_)
        _globals(sp, suppress=True)
        sp.set_defaults(func=fn)
        return sp

    def vir_pair(sp):
        sp.add_argument("--c", required=True)
        sp.add_argument("--h", required=True)

    v = top.add_parser("virasoro", help="Verma modules, Gram matrices, sl(2) norm bound")
    vg = v.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sp = leaf(vg, "gram", cmd_virasoro_gram, "exact Gram matrix at one level")
    vir_pair(sp)
    sp.add_argument("--level", type=int, required=True)
    sp = leaf(vg, "irrep", cmd_virasoro_irrep, "irreducible quotient dimensions")
    vir_pair(sp)
    sp.add_argument("--cutoff", type=int)
    sp = leaf(vg, "norm-bound", cmd_virasoro_norm_bound, "dilation-translation operator norm")
    sp.add_argument("--t", type=float, required=True, help="lowest weight")
    sp.add_argument("--z", type=_complex, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--cutoffs", type=_int_list, default=(16, 32, 64))

    s = top.add_parser("semigroup", help="Koenigs semigroups of univalent self-maps")
    sg = s.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("evolve", cmd_semigroup_evolve), ("check", cmd_semigroup_check)):
        sp = leaf(sg, name, fn)
        sp.add_argument("--koenigs", required=True, help="identity | mobius:a=p/q")
        sp.add_argument("--t", type=float, required=True)
        sp.add_argument("--samples", type=int, default=64)
        if name == "evolve":
            sp.add_argument("--z", type=_complex, nargs="*")

    an = top.add_parser("annulus", help="truncated generalized-annulus operators")
    ag = an.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("exact", cmd_annulus_exact), ("trotter", cmd_annulus_trotter),
                     ("covariance", cmd_annulus_covariance)):
        sp = leaf(ag, name, fn)
        sp.add_argument("--c", default="1/2")
        sp.add_argument("--h", default="0")
        sp.add_argument("--cutoff", type=int)
        sp.add_argument("--koenigs", default="mobius:a=1/2")
        sp.add_argument("--t", type=float, default=math.log(2))
        if name == "trotter":
            sp.add_argument("--ns", type=_int_list)
        if name == "covariance":
            sp.add_argument("--N", type=int, default=16)
            sp.add_argument("--j", type=int, default=1)
            sp.add_argument("--convention", choices=("divide", "multiply"), default="divide")
            sp.add_argument("--compare-levels", type=int)
            sp.add_argument("--tol", type=float, default=1e-6)
    sp = leaf(ag, "region", cmd_annulus_region, "interior region as JSON and SVG")
    sp.add_argument("--koenigs", default="mobius:a=1/2")
    sp.add_argument("--t", type=float, default=math.log(2))
    sp.add_argument("--a", type=_complex, default=0j, help="Mobius parameter of psi")
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--resolution", type=float, default=1e-2)
    sp.add_argument("--points", type=_complex, nargs="*")

    f = top.add_parser("fermion", help="charged free fermion vertex superalgebra")
    fg = f.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sp = leaf(fg, "basis", cmd_fermion_basis)
    sp.add_argument("--cutoff")
    sp = leaf(fg, "borcherds", cmd_fermion_borcherds)
    sp.add_argument("--cutoff")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--index-range", type=int, default=3)
    sp = leaf(fg, "invariance", cmd_fermion_invariance)
    sp.add_argument("--state", default="psi(-1/2)|0>")
    sp.add_argument("--cutoff")
    sp = leaf(fg, "char", cmd_fermion_char)
    sp.add_argument("--cutoff")
    sp = leaf(fg, "segal", cmd_fermion_segal)
    sp.add_argument("--r", default="1/2")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--cutoff")
    sp.add_argument("--generator", choices=("psi", "psistar"), default="psi")

    it = top.add_parser("intertwiner", help="parity-descent intertwining operator")
    ig = it.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sp = leaf(ig, "descend", cmd_intertwiner_descend)
    sp.add_argument("--cutoff")
    sp = leaf(ig, "check", cmd_intertwiner_check)
    sp.add_argument("--cutoff")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--mutate", action="store_true", help="corrupt one mode entry (canary)")

    c = top.add_parser("code", help="binary codes, code lattices, cocycles, braid signs")
    cg = c.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("predicates", cmd_code_predicates), ("lattice", cmd_code_lattice),
                     ("theta", cmd_code_theta), ("cocycle", cmd_code_cocycle)):
        sp = leaf(cg, name, fn)
        sp.add_argument("--builtin", help="hamming8 | golay24 | repetition(n) | trivial(n) | pair11(n)")
        sp.add_argument("--file", help="text file, one generator per line")
        if name == "lattice":
            sp.add_argument("--report", choices=("roots", "full"), default="full")
        if name in ("lattice", "theta"):
            sp.add_argument("--norm-cutoff", type=_fraction, default=Fraction(4))
        if name == "cocycle":
            sp.add_argument("--eps", choices=("1", "-1", "i"), required=True)
    sp = leaf(cg, "braid", cmd_code_braid)
    sp.add_argument("--p", type=_word, required=True)
    sp.add_argument("--q", type=_word, required=True)
    sp.add_argument("--kind", choices=("bosonic", "fermionic", "semionic"), required=True)

    sp = leaf(top, "suite", cmd_suite, "acceptance battery")
    sp.add_argument("--profile", choices=("fast", "full"), default="fast")
    sp.add_argument("--mutate", action="store_true", help="corrupt the intertwiner (canary)")
    return p


def _error_report(kind: str, message: str, argv) -> Report:
    return Report("error", {"argv": list(argv)}, "indeterminate", {"error": kind, "message": message})


def _emit(report: Report, fmt: str, out_dir) -> str:
    text = report.render(fmt)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{report.check}.{fmt}").write_text(text, encoding="utf-8")
    return text


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv``, run the subcommand and return (exit code, rendered report)."""
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(getattr(args, "config", None), getattr(args, "seed", None))
        fmt = getattr(args, "format", None) or cfg.format
        report = args.func(args, cfg)
    except UsageError as exc:
        return 2, _emit(_error_report("usage", str(exc), argv), fmt, None)
    except Exception as exc:  # any runtime failure still yields a diagnostic and exit 2
        return 2, _emit(_error_report(type(exc).__name__, str(exc), argv), fmt, None)
    return report.exit_code, _emit(report, fmt, getattr(args, "out", None))


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
