import copy
import math
import json

import numpy as np
import pytest

from teichforge import pipeline as P
from teichforge.mcg import G1, G2, aut_lift
from teichforge.subgroups import CosetAction, is_self_normalizing, normalizer
from teichforge.surface_atlas import F03, F04, F11, F14B, rewrite
from teichforge.veech import materialize

INDEX2 = P.DeltaSpec.from_perms((1, 0), (0, 1))


@pytest.fixture(scope="module")
def index2():
    return P.construct(INDEX2, seed=0)


def test_deltaspec_json_and_validation():
    assert P.DeltaSpec.from_json(INDEX2.to_json()).action.same_subgroup(INDEX2.action)
    with pytest.raises(ValueError):
        P.DeltaSpec.from_perms((1, 0, 2), (0, 1, 2))  # not transitive
    with pytest.raises(ValueError):
        P.DeltaSpec.from_json({"mark": "F11", "perms": {"a": [0], "b": [0]}})


def test_delta0():
    whole = P.delta0_from_delta(P.DeltaSpec.whole())
    assert whole.mark == F03 and whole.degree == 1
    d0 = P.delta0_from_delta(INDEX2)
    assert d0.degree == 2 and d0.perms == INDEX2.action.perms


def test_pullback_chain():
    pb = P.pullback_chain(P.delta0_from_delta(P.DeltaSpec.whole()))
    assert pb.tilde.degree == 1
    pb = P.pullback_chain(P.delta0_from_delta(INDEX2))
    assert pb.bar.contains(F04.gen(2))
    assert pb.tilde.degree == 2


@pytest.mark.parametrize("perms,k", [
    (((0,), (0,)), 1),
    (((1, 0), (0, 1)), 2),
    (((1, 2, 3, 4, 5, 0), (0, 1, 2, 3, 4, 5)), 6),
])
def test_alpha_classes(perms, k):
    d = P.DeltaSpec.from_perms(*perms)
    pb = P.pullback_chain(P.delta0_from_delta(d))
    assert len(P.alpha_classes(pb.tilde)) == k
    rep = P.lemma3(d, pb)
    assert rep.ok


def test_lemma3_on_non_normal_subgroups(rng):
    for d in P.sample_deltas(6, 5, rng):
        assert P.lemma3(d).ok


def test_lemma2_witnesses(rng):
    for d in P.sample_deltas(4, 4, rng):
        tilde = P.pullback_chain(P.delta0_from_delta(d)).tilde
        for wit in P.lemma2(tilde):
            assert wit.ok
            psi = aut_lift({"G1": G1, "G2": G2, "g1": G1.inverse(), "g2": G2.inverse()}[wit.generator]).restriction
            image = tilde.image_under_automorphism(psi.inverse_images)
            assert tilde.conjugate_subgroup(wit.conjugator).same_subgroup(image)


def test_refinement_examples():
    sn = CosetAction(F03, ((1, 0, 2), (0, 2, 1)))
    assert is_self_normalizing(sn)
    d0 = P.delta0_from_delta(INDEX2)
    r = P.self_normalizing_refine(d0, np.random.default_rng(3))
    assert normalizer(r.subgroup).degree == r.subgroup.degree
    assert all(d0.contains(g) for g in r.subgroup.schreier.generators)
    again = P.self_normalizing_refine(d0, np.random.default_rng(3))
    assert again.subgroup.same_subgroup(r.subgroup)


def test_refinement_budget():
    d0 = P.delta0_from_delta(INDEX2)
    with pytest.raises(P.BudgetExhausted):
        P.self_normalizing_refine(d0, np.random.default_rng(0), budget=1)


def test_build_H_detection(atlas):
    H = P.build_H((3, 5, 7), 2)
    x2 = rewrite(F14B, atlas.x * atlas.x)
    assert not H.contains(x2) and H.contains(x2 ** 3)
    z2 = atlas.punctures[0].word
    # alpha's vector is minus the sum of the betas: only a power lies in H
    assert not H.contains(z2) and H.contains(z2 ** 105)
    assert all(P.h_invariance(H).values())
    sig = H.signature()
    assert sig["beta1"] == [3] and sig["beta2"] == [5] and sig["beta3"] == [7]


def test_build_H_guards():
    with pytest.raises(P.GuardViolation):
        P.build_H((3, 3, 5), 2)
    with pytest.raises(P.GuardViolation):
        P.build_H((3, 5, 7), 4)
    with pytest.raises(ValueError):
        P.build_H((3, 5, 9), 2)


def test_H_index_matches_materialized():
    H = P.build_H((2, 3, 5), 1)
    lam = P.LayeredSubgroup.from_parts(CosetAction.whole(F14B), H, None)
    assert lam.index() == 2 ** 3 * 3 ** 3 * 5 ** 3
    assert materialize(lam, 30_000).degree == lam.index()


def test_Aj(index2):
    K1 = P.pullback_chain(P.delta0_from_delta(P.DeltaSpec.whole())).tilde
    (A1,) = P.build_Aj(K1, K1, 7)
    assert A1.dim == 0
    c = index2
    A = c.A
    assert len(A) == 2 and A[0] != A[1]
    assert P.distinctness_witnesses(A) is not None
    for j, a in enumerate(A):
        for i, v in P.alpha_class_vectors(c.pulls_prime.tilde, c.pulls.tilde):
            if i != j:
                assert a.contains(v % a.q)


def test_choose_ell(index2):
    Kp, tilde = index2.pulls_prime.tilde, index2.pulls.tilde
    rep = P.choose_ell(Kp, tilde, (3, 5, 7), 2)
    assert rep.ell == 11
    assert rep.intersection_indices == P.conjugate_intersection_indices(Kp)
    assert len(rep.intersection_indices) == Kp.degree


def test_lambda_basics(index2, atlas):
    lam = index2.layered
    assert lam.contains(F14B.identity)
    assert not lam.contains(F11.gen(0))
    assert not lam.contains(atlas.a)
    # primes coprime to [pi14:K] make K surject onto pi14/H, so each H layer
    # keeps the codimension 5 - dim of its span
    fi = lam.factored_index()
    for p, h in zip(index2.H.primes, index2.H.spans):
        assert fi[str(p)] == 5 - h.dim
    A1 = index2.A[0]
    assert fi[str(A1.q)] == lam.K.rank() - A1.dim
    assert lam.index() == math.prod(int(k) ** v for k, v in fi.items() if k != "K") * fi["K"]


def test_toy_membership_matches_table(rng, atlas):
    c = P.construct(P.DeltaSpec.whole(), toy_primes=(2, 2, 3, 2))
    lam = c.layered
    table = materialize(lam)
    for _ in range(1000):
        w = P.random_word(F14B, int(rng.integers(0, 10)), rng)
        if rng.integers(0, 2):
            w = w ** 6  # powers land in Lambda more often
        assert lam.contains(w) == table.contains(w)
    assert c.certificate()["toy"] is True


def test_transport_is_functorial(index2):
    lam = index2.layered
    f, g = aut_lift(G1).restriction, aut_lift(G2).restriction
    assert lam.transport(f @ g).key() == lam.transport(g).transport(f).key()


def test_certificate_round_trip(index2):
    cert = json.loads(json.dumps(index2.certificate(), sort_keys=True))
    rep, lam = P.verify_certificate(cert, INDEX2)
    assert rep.ok and lam.key() == index2.layered.key()
    bad = copy.deepcopy(cert)
    row = bad["A"][0]["basis"][0]
    row[-1] = (row[-1] + 1) % bad["A"][0]["q"]
    rep, _ = P.verify_certificate(bad)
    assert not rep.ok and rep.first_failure == "A subspaces"
    rep, _ = P.verify_certificate(cert, P.DeltaSpec.whole())
    assert rep.first_failure == "delta matches certificate"


def test_construction_is_deterministic():
    a = json.dumps(P.construct(INDEX2, seed=5).certificate(), sort_keys=True)
    b = json.dumps(P.construct(INDEX2, seed=5).certificate(), sort_keys=True)
    assert a == b
