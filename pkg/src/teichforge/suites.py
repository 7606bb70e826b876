"""Reproduction suites: each returns a SuiteResult with a JSON-able detail dict.

Used by ``teichforge lemmas`` and by the acceptance tests."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import mcg, pipeline, veech
from .subgroups import fold, normalizer
from .surface_atlas import AMBIENT_WORDS, F04, F11, build_atlas, grade_action
from .words import AMBIENT


@dataclass
class SuiteResult:
    name: str
    ok: bool
    seconds: float
    details: dict = field(default_factory=dict)
    warning: str | None = None

    def to_json(self) -> dict:
        return {"suite": self.name, "ok": self.ok, "seconds": round(self.seconds, 3),
                "warning": self.warning, "details": self.details}


def _timed(name: str, fn: Callable[[], tuple[bool, dict]], warning=None) -> SuiteResult:
    t = time.perf_counter()
    ok, details = fn()
    return SuiteResult(name, bool(ok), time.perf_counter() - t, details, warning)


# --- 1 ----------------------------------------------------------------------

def atlas_suite() -> SuiteResult:
    def run():
        build_atlas.cache_clear()
        at = build_atlas()
        ker = grade_action((0, 1, 2))
        A = fold(at.ambient_A, AMBIENT).action()
        B = fold(at.ambient_B, AMBIENT).action()
        i11 = fold(AMBIENT_WORDS["F11"], AMBIENT).action()
        i04 = fold(AMBIENT_WORDS["F04"], AMBIENT).action()
        d = {
            "basis_A_equals_ker_phi": A.same_subgroup(ker),
            "basis_B_equals_ker_phi": B.same_subgroup(ker),
            "index_pi14_in_G": ker.degree,
            "index_pi11_in_G": i11.degree,
            "index_pi04_in_G": i04.degree,
            "index_pi14_in_pi11": fold(at.basis_B, F11).vertices,
            "index_pi14_in_pi04": fold(at.basis_A, F04).vertices,
        }
        ok = (d["basis_A_equals_ker_phi"] and d["basis_B_equals_ker_phi"]
              and (d["index_pi14_in_G"], d["index_pi11_in_G"], d["index_pi04_in_G"]) == (8, 2, 4)
              and (d["index_pi14_in_pi11"], d["index_pi14_in_pi04"]) == (4, 2))
        return ok, d
    return _timed("atlas", run)


# --- 2 ----------------------------------------------------------------------

def lemma1_suite() -> SuiteResult:
    def run():
        rows = mcg.lemma1_identities()
        return len(rows) == 9 and all(r["holds"] for r in rows), {"identities": rows}
    return _timed("lemma1", run)


# --- 3 ----------------------------------------------------------------------

def matrices_suite(samples: int = 24, seed: int = 0, max_len: int = 8) -> SuiteResult:
    def run():
        got = {
            "push_xb": mcg.push_lift(F04_03("xb")).homology,
            "push_yb": mcg.push_lift(F04_03("yb")).homology,
            "lift_G1": mcg.aut_lift(mcg.G1).homology,
            "lift_G2": mcg.aut_lift(mcg.G2).homology,
        }
        want = {"push_xb": mcg.G1, "push_yb": mcg.G2, "lift_G1": mcg.G1, "lift_G2": mcg.G2}
        mats = {k: bool(mcg.projectively_equal(v, want[k])) for k, v in got.items()}
        rng = np.random.default_rng(seed)
        reps = mcg.verify_diagram2([mcg.random_gamma2(rng, max_len) for _ in range(samples)])
        d = {"matrices": {k: v.tolist() for k, v in got.items()}, "matrices_ok": mats,
             "diagram_samples": len(reps), "diagram_agree": sum(r.agrees for r in reps),
             "tau_used": sum(r.tau_used for r in reps)}
        return all(mats.values()) and all(r.agrees for r in reps), d
    warn = "no diagram samples" if samples == 0 else None
    return _timed("lemma1-matrices", run, warn)


def F04_03(name: str):
    from .surface_atlas import F03
    return F03.parse(name)


# --- 4, 5, 6 ----------------------------------------------------------------

def delta_sample(samples: int, seed: int, max_index: int = 6) -> list[pipeline.DeltaSpec]:
    if samples == 0:
        return []
    return pipeline.sample_deltas(samples, max_index, np.random.default_rng(seed))


def lemma2_suite(samples: int = 12, seed: int = 0) -> SuiteResult:
    def run():
        rows = []
        for d in delta_sample(samples, seed):
            tilde = pipeline.pullback_chain(pipeline.delta0_from_delta(d)).tilde
            wits = pipeline.lemma2(tilde)
            rows.append({"index": d.index, "perms": d.action.to_json()["perms"],
                         "conjugators": {w.generator: None if w.conjugator is None else str(w.conjugator)
                                         for w in wits},
                         "ok": all(w.ok for w in wits)})
        return all(r["ok"] for r in rows), {"subgroups": rows}
    return _timed("lemma2", run, "vacuous: no samples" if samples == 0 else None)


def lemma3_suite(samples: int = 12, seed: int = 0) -> SuiteResult:
    def run():
        rows = []
        for d in delta_sample(samples, seed):
            r = pipeline.lemma3(d)
            rows.append({"index": d.index, "k": r.k, "class_perms": [list(p) for p in r.perms],
                         "convention": r.convention, "ok": r.ok})
        return all(r["ok"] for r in rows), {"subgroups": rows}
    return _timed("lemma3", run, "vacuous: no samples" if samples == 0 else None)


def prop4_suite(samples: int = 12, seed: int = 0, budget: int = 10_000) -> SuiteResult:
    def run():
        rows = []
        for i, d in enumerate(delta_sample(samples, seed)):
            d0 = pipeline.delta0_from_delta(d)
            try:
                r = pipeline.self_normalizing_refine(d0, np.random.default_rng(seed + i), budget)
            except pipeline.BudgetExhausted:
                rows.append({"index": d.index, "ok": False})
                continue
            # independent recomputation: the normalizer quotient has the same degree
            selfnorm = normalizer(r.subgroup).degree == r.subgroup.degree
            inside = all(d0.contains(g) for g in r.subgroup.schreier.generators)
            rows.append({"index": d.index, "degree": r.subgroup.degree,
                         "candidates": r.candidates, "self_normalizing": selfnorm,
                         "contained": inside, "ok": selfnorm and inside})
        return all(r["ok"] for r in rows), {"subgroups": rows}
    return _timed("prop4", run, "vacuous: no samples" if samples == 0 else None)


# --- 7 ----------------------------------------------------------------------

INDEX2_DELTA = ((1, 0), (0, 1))  # G1 swaps the two cosets, G2 fixes them


def theorem2_suite(seed: int = 0) -> SuiteResult:
    def run():
        d = pipeline.DeltaSpec.from_perms(*INDEX2_DELTA)
        c = pipeline.construct(d, seed=seed)
        res = veech.stabilizer(c.layered, d.index)
        rep = veech.verify_theorem(res, d, c.layered)
        dets = {"primes": list(c.H.primes), "ell": c.ell.ell,
                "index": c.layered.factored_index(), "orbit_size": res.orbit_size,
                "schreier_generators": [g.as_list() for g in res.schreier_generators],
                "minus_one_stabilizes": res.minus_one_stabilizes, "theorem": rep.to_json()}
        return rep.ok and res.orbit_size == 12, dets
    return _timed("theorem2", run)


# --- 8 ----------------------------------------------------------------------

TOY_PRIMES = (2, 2, 3, 2)


def toy_suite(seed: int = 0, bound: int = 10_000) -> SuiteResult:
    """Layered conjugacy against table conjugacy on every pair of subgroups
    met while walking the SL(2,Z) orbit of a materializable Lambda."""
    def run():
        d = pipeline.DeltaSpec.whole()
        c = pipeline.construct(d, seed=seed, toy_primes=TOY_PRIMES)
        lam = c.layered
        res = veech.stabilizer(lam, d.index)
        met = [lam]
        frontier = [lam]
        seen = {veech.class_key(lam)}
        while frontier:
            nxt = []
            for L in frontier:
                for _, g in veech.GENERATORS:
                    img = L.transport(veech.restriction_of(g))
                    met.append(img)
                    k = veech.class_key(img)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(img)
            frontier = nxt
        keys = [veech.class_key(L) for L in met]
        tables = [veech.induce_to_pi11(veech.materialize(L, bound)) for L in met]
        agree = total = 0
        for i in range(len(met)):
            for j in range(i, len(met)):
                total += 1
                agree += (keys[i] == keys[j]) == veech.table_conjugate(tables[i], tables[j])
        # the table path computes its own orbit
        tab = veech.orbit_stabilizer(tables[0], veech.act_on_table, equal=veech.table_conjugate)
        d = {"toy_primes": list(TOY_PRIMES), "index": lam.index(), "pi11_degree": tables[0].degree,
             "subgroups_met": len(met), "pairs": total, "agree": agree,
             "layered_orbit": res.orbit_size, "table_orbit": tab.orbit_size}
        return agree == total and tab.orbit_size == res.orbit_size, d
    return _timed("toy", run)


# --- 9 ----------------------------------------------------------------------

def origami_suite() -> SuiteResult:
    def run():
        at = build_atlas()
        o = veech.origami_export(at.F14_in_F11)
        triv = veech.veech_of_origami(veech.Origami((0,), (0,)))
        # Nielsen-Schreier on every subgroup built along the way
        built = [at.F14_in_F11, at.F14_in_F04]
        d = pipeline.DeltaSpec.from_perms(*INDEX2_DELTA)
        c = pipeline.construct(d, seed=0)
        built += [c.delta0, c.refined.subgroup, c.pulls.bar, c.pulls.tilde, c.pulls_prime.tilde]
        rank_ok = all(len(s.schreier.generators) == 1 + s.degree * (s.mark.rank - 1) for s in built)
        dets = {"pi14_origami": o.to_json(), "trivial_orbit": triv.orbit_size,
                "trivial_is_sl2": triv.contains(mcg.S) and triv.contains(mcg.T),
                "rank_identity_subgroups": len(built), "rank_identity": rank_ok}
        ok = ((o.degree, o.genus, o.punctures) == (4, 1, 4) and triv.orbit_size == 1
              and dets["trivial_is_sl2"] and rank_ok)
        return ok, dets
    return _timed("origami", run)


SUITES = {
    "atlas": lambda a: atlas_suite(),
    "lemma1": lambda a: lemma1_suite(),
    "lemma1-matrices": lambda a: matrices_suite(a.get("samples", 24), a.get("seed", 0)),
    "lemma2": lambda a: lemma2_suite(a.get("samples", 12), a.get("seed", 0)),
    "lemma3": lambda a: lemma3_suite(a.get("samples", 12), a.get("seed", 0)),
    "prop4": lambda a: prop4_suite(a.get("samples", 12), a.get("seed", 0), a.get("budget", 10_000)),
    "theorem2": lambda a: theorem2_suite(a.get("seed", 0)),
    "toy": lambda a: toy_suite(a.get("seed", 0)),
    "origami": lambda a: origami_suite(),
}


def run_suites(names=None, **args) -> list[SuiteResult]:
    names = names or list(SUITES)
    return [SUITES[n](args) for n in names]
