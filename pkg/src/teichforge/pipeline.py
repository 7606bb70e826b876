"""From a finite-index subgroup Delta of Gamma(2) to the layered subgroup
Lambda = Delta_{1,ell} of pi_{1,4}.

Steps: relabel Delta as Delta_0 <= pi_{0,3}; refine to a self-normalizing
Delta'_0; pull both back to pi_{0,4} and pi_{1,4}; decompose the class of
alpha; build the prime layers H (from the betas) and A_{1,ell} (from the alpha
classes); assemble.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import ModSubspace, is_prime, next_prime
from .mcg import aut_lift, gamma2_to_pi03, push_lift, FreeAut, G1, G2
from .subgroups import (CosetAction, conjugacy_equal, cyclic_class_decomposition,
                        induce_up, is_self_normalizing, normalizer_points,
                        random_transitive_action)
from .surface_atlas import F03, F04, F11, F14B, GAMMA2, build_atlas
from .words import FreeWord, ReflectionWord, conjugate_in_free

CERT_SCHEMA = "teichforge/certificate/v1"
DELTA_SCHEMA = "teichforge/delta/v1"


class PipelineError(RuntimeError):
    pass


class BudgetExhausted(PipelineError):
    pass


class GuardViolation(PipelineError):
    pass


# --- Delta --------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaSpec:
    """A finite-index subgroup of projective Gamma(2), as a coset action on
    the letters G1, G2.  The subgroup always contains -1 by convention."""

    action: CosetAction
    contains_minus_one: bool = True

    def __post_init__(self):
        if self.action.mark != GAMMA2:
            raise ValueError("Delta must be given over the Gamma2 mark")
        if not self.action.is_transitive():
            raise ValueError("Delta's coset action must be transitive")

    @property
    def index(self) -> int:
        return self.action.degree

    @classmethod
    def whole(cls) -> "DeltaSpec":
        return cls(CosetAction.whole(GAMMA2))

    @classmethod
    def from_perms(cls, g1: Sequence[int], g2: Sequence[int]) -> "DeltaSpec":
        return cls(CosetAction(GAMMA2, (tuple(g1), tuple(g2))))

    def contains(self, word: FreeWord) -> bool:
        return self.action.contains(word)

    def to_json(self) -> dict:
        d = self.action.to_json()
        d["schema"] = DELTA_SCHEMA
        d["contains_minus_one"] = self.contains_minus_one
        return d

    @classmethod
    def from_json(cls, d: dict) -> "DeltaSpec":
        if d.get("schema", DELTA_SCHEMA) != DELTA_SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        if d.get("mark", "Gamma2") != "Gamma2":
            raise ValueError("Delta must be given over the Gamma2 mark")
        return cls(CosetAction.from_json(dict(d, mark="Gamma2")),
                   bool(d.get("contains_minus_one", True)))


def random_delta(index: int, rng) -> DeltaSpec:
    return DeltaSpec(random_transitive_action(GAMMA2, index, rng).canonical_form())


def sample_deltas(count: int, max_index: int, rng) -> list[DeltaSpec]:
    """``count`` pairwise distinct subgroups of index 2..max_index."""
    seen: dict = {}
    attempts = 0
    while len(seen) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise PipelineError("could not sample enough distinct subgroups")
        d = random_delta(int(rng.integers(2, max_index + 1)), rng)
        seen.setdefault(d.action.key(), d)
    return [seen[k] for k in sorted(seen, key=lambda k: (len(k[1][0]), k[1]))]


# --- relabeling and pullbacks -------------------------------------------------

def delta0_from_delta(d: DeltaSpec) -> CosetAction:
    """The subgroup of pi_{0,3} corresponding to Delta (G1 -> xb, G2 -> yb)."""
    letters = gamma2_to_pi03(GAMMA2.word((1, 2))).letters
    if letters != (1, 2):
        raise PipelineError("identification of Gamma(2) with pi_{0,3} is not a relabeling")
    return CosetAction(F03, d.action.perms)


@dataclass(frozen=True)
class Pullbacks:
    bar: CosetAction    # over F04
    tilde: CosetAction  # over F14B


def pullback_chain(delta0: CosetAction) -> Pullbacks:
    at = build_atlas()
    xb, yb = F03.gens()
    bar = delta0.pullback([xb, yb, F03.identity], F04)
    if bar.degree != delta0.degree:
        raise PipelineError("[pi04 : Delta-bar] differs from [pi03 : Delta_0]")
    if not bar.contains(F04.gen(2)):
        raise PipelineError("z is not in Delta-bar")
    words04 = [at.rewrite(F04, w) for w in at.ambient_B]
    tilde = bar.pullback(words04, F14B)
    if tilde.degree != bar.degree:
        raise PipelineError("Delta-bar does not surject onto pi04/pi14")
    return Pullbacks(bar, tilde)


# --- the alpha classes (Lemma 3) ---------------------------------------------

def alpha_word() -> FreeWord:
    return build_atlas().punctures[0].word


def alpha_classes(tilde: CosetAction) -> list[FreeWord]:
    """Representatives r alpha r^-1 of the tilde-classes inside [alpha]_{pi14}.

    alpha fixes every coset, so there is one class per coset, indexed by the
    coset (representative ``transversal(p) alpha transversal(p)^-1``)."""
    dec = cyclic_class_decomposition(tilde, alpha_word())
    if any(m != 1 for _, m in dec):
        raise PipelineError("alpha acts nontrivially on the cosets of Delta-tilde")
    return [w for w, _ in dec]


def class_of_alpha_conjugate(tilde: CosetAction, w: FreeWord) -> int:
    """Coset index of the tilde-class containing w, a pi14-conjugate of alpha."""
    h = conjugate_in_free(alpha_word(), w)
    if h is None:
        raise PipelineError(f"{w} is not in the class of alpha")
    return tilde.apply(0, h)


def push_class_action(pulls: Pullbacks, c: FreeWord) -> tuple[int, ...]:
    """Permutation of the tilde-classes of alpha induced by Push(c), made to
    preserve Delta-bar by an inner correction lying in pi14."""
    at = build_atlas()
    push = push_lift(c).aut
    lift = _lift_to_pi14(c)
    theta = FreeAut.inner(lift.inverse()) @ push
    tilde = pulls.tilde
    perm = []
    for p in range(tilde.degree):
        t = tilde.transversal(p)
        amb = at.to_ambient(F14B, t * alpha_word() * t.inverse())
        img = theta(at.rewrite(F04, amb))
        perm.append(class_of_alpha_conjugate(tilde, at.rewrite(F14B, img)))
    if sorted(perm) != list(range(tilde.degree)):
        raise PipelineError("push does not permute the alpha classes")
    return tuple(perm)


def _lift_to_pi14(c: FreeWord) -> FreeWord:
    """A word of pi04 lying in pi14 and mapping to c under the forget map."""
    at = build_atlas()
    w = F04.word(c.letters)
    z = F04.gen(2)
    if not at.in_pi14(at.to_ambient(F04, w)):
        w = w * z
    if not at.in_pi14(at.to_ambient(F04, w)):
        raise PipelineError("could not lift to pi14")
    return w


@dataclass
class Lemma3Report:
    k: int
    index: int
    perms: tuple
    convention: str | None

    @property
    def ok(self) -> bool:
        return self.k == self.index and self.convention == "inverse"


def lemma3(d: DeltaSpec, pulls: Pullbacks | None = None) -> Lemma3Report:
    """k equals the index, and the class action matches the coset action."""
    pulls = pulls or pullback_chain(delta0_from_delta(d))
    k = len(alpha_classes(pulls.tilde))
    perms = tuple(push_class_action(pulls, gamma2_to_pi03(g)) for g in GAMMA2.gens())
    # Push is a left action on classes; the coset action is a right action,
    # so the class permutations match the inverse permutations.
    target = d.action.canonical
    inv = tuple(tuple(np.argsort(p).tolist()) for p in perms)
    conv = "inverse" if CosetAction(GAMMA2, inv).canonical == target else None
    return Lemma3Report(k, d.index, perms, conv)


# --- Lemma 2 --------------------------------------------------------------------

@dataclass
class Lemma2Witness:
    generator: str
    conjugator: FreeWord | None

    @property
    def ok(self) -> bool:
        return self.conjugator is not None


def lemma2(tilde: CosetAction) -> list[Lemma2Witness]:
    """For G1, G2 and inverses: the lift maps Delta-tilde to a pi14-conjugate."""
    out = []
    for name, m in (("G1", G1), ("G2", G2), ("g1", G1.inverse()), ("g2", G2.inverse())):
        psi = aut_lift(m).restriction
        image = tilde.image_under_automorphism(psi.inverse_images)
        beta = conjugacy_equal(tilde, image)
        if beta is not None:
            # explicit check: beta image beta^-1 lies in tilde for every generator
            bi = beta.inverse()
            for g in image.schreier.generators:
                if not tilde.contains(beta * g * bi):
                    beta = None
                    break
        out.append(Lemma2Witness(name, beta))
    return out


# --- self-normalizing refinement (Prop. 4) -----------------------------------

@dataclass
class RefineResult:
    subgroup: CosetAction
    candidates: int
    inner_degree: int


def self_normalizing_refine(delta0: CosetAction, rng, budget: int = 10_000,
                            per_degree: int = 50, require_pi14: bool = True) -> RefineResult:
    """A self-normalizing subgroup of pi_{0,3} of finite index in ``delta0``.

    Candidates are random transitive actions of delta0's free Schreier basis
    on m points, induced up to pi_{0,3}; m grows every ``per_degree`` draws.
    With ``require_pi14`` the pullback to pi_{1,4} must be self-normalizing
    too (it always is when the pi_{0,3} subgroup is; the check is a guard)."""
    tried = 0
    if _accept(delta0, require_pi14):
        return RefineResult(delta0.canonical_form(), 1, 1)
    tried = 1
    sch = delta0.schreier
    m = 2
    while tried < budget:
        for _ in range(per_degree):
            if tried >= budget:
                break
            tried += 1
            sub = random_transitive_action(sch.basis, m, rng)
            cand = induce_up(sub, delta0, delta0.express_in_basis)
            if _accept(cand, require_pi14):
                for g in cand.schreier.generators:
                    if not delta0.contains(g):
                        raise PipelineError("refinement is not contained in Delta_0")
                return RefineResult(cand.canonical_form(), tried, m)
        m += 1
    raise BudgetExhausted(f"no self-normalizing refinement within {budget} candidates")


def _accept(c: CosetAction, require_pi14: bool) -> bool:
    if not is_self_normalizing(c):
        return False
    if require_pi14:
        return is_self_normalizing(pullback_chain(c).tilde)
    return True


# --- the layers -----------------------------------------------------------------

def inclusion_matrix(K: CosetAction) -> np.ndarray:
    """Columns: basis-B exponent sums of K's Schreier generators (shape 5 x rank)."""
    return np.array([g.exponent_sums() for g in K.schreier.generators], dtype=np.int64).T


@dataclass(frozen=True)
class HLevel:
    primes: tuple[int, int, int]
    spans: tuple[ModSubspace, ModSubspace, ModSubspace]

    def contains(self, w: FreeWord) -> bool:
        v = np.array(w.exponent_sums(), dtype=np.int64)
        return all(h.contains(v % p) for p, h in zip(self.primes, self.spans))

    def index(self) -> int:
        out = 1
        for p, h in zip(self.primes, self.spans):
            out *= p ** h.codim
        return out

    def signature(self) -> dict[str, list[int]]:
        """Which primes detect each puncture class (vector outside the span)."""
        at = build_atlas()
        out = {}
        for pc, vec in zip(at.punctures, at.puncture_vectors):
            out[pc.name] = [p for p, h in zip(self.primes, self.spans)
                            if not h.contains(np.array(vec) % p)]
        return out

    def to_json(self) -> dict:
        return {"primes": list(self.primes), "spans": [h.to_json() for h in self.spans]}


def build_H(primes: Sequence[int], delta_index: int | None = None, toy: bool = False) -> HLevel:
    p = tuple(int(x) for x in primes)
    if len(p) != 3 or not all(is_prime(x) for x in p):
        raise ValueError("three primes required")
    if not toy:
        if len(set(p)) != 3:
            raise GuardViolation("the three primes must be distinct")
        if delta_index is not None and min(p) <= delta_index:
            raise GuardViolation("each prime must exceed [Gamma(2):Delta]")
    at = build_atlas()
    betas = at.puncture_vectors[1:]
    spans = tuple(ModSubspace.span(q, 5, [betas[j] for j in range(3) if j != i])
                  for i, q in enumerate(p))
    H = HLevel(p, spans)
    for i, pc in enumerate(at.punctures[1:]):
        b = pc.word
        if H.contains(b):
            raise PipelineError(f"{pc.name} representative lies in H")
        if not H.contains(b ** p[i]):
            raise PipelineError(f"{pc.name} representative to the power {p[i]} is not in H")
    # alpha's vector is minus the sum of the betas, so only a power lands in H
    a = at.punctures[0].word
    if not H.contains(a ** (p[0] * p[1] * p[2])):
        raise PipelineError("alpha to the power p1 p2 p3 is not in H")
    return H


def h_invariance(H: HLevel) -> dict[str, bool]:
    """Whether each corrected Gamma(2) generator lift maps every span to itself."""
    out = {}
    for name, m in (("G1", G1), ("G2", G2)):
        lift = aut_lift(m)
        mat = np.array([lift.restriction(e).exponent_sums() for e in F14B.gens()],
                       dtype=np.int64).T
        out[name] = (lift.puncture_perm == (0, 1, 2, 3)
                     and all(h.image(mat) == h for h in H.spans))
    return out


def alpha_class_vectors(Kp: CosetAction, tilde: CosetAction) -> list[tuple[int, np.ndarray]]:
    """(tilde-coset, abelianization in Kp) for each Kp-class inside [alpha]."""
    out = []
    a = alpha_word()
    for w, m in cyclic_class_decomposition(Kp, a):
        if m != 1:
            raise PipelineError("alpha acts nontrivially on the cosets of Delta-tilde'")
        out.append((class_of_alpha_conjugate(tilde, w), _ab(Kp, w)))
    return out


def _ab(K: CosetAction, w: FreeWord) -> np.ndarray:
    v = np.zeros(K.rank(), dtype=np.int64)
    for x in K.express_letters(w):
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def build_Aj(Kp: CosetAction, tilde: CosetAction, ell: int) -> list[ModSubspace]:
    vecs = alpha_class_vectors(Kp, tilde)
    k = tilde.degree
    return [ModSubspace.span(ell, Kp.rank(), [v % ell for i, v in vecs if i != j])
            for j in range(k)]


def distinctness_witnesses(A: Sequence[ModSubspace]) -> list[dict] | None:
    """For each pair, a basis vector of one span lying outside the other."""
    out = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            wit = None
            for a, b, name in ((A[i], A[j], i), (A[j], A[i], j)):
                for r in a.basis:
                    if not b.contains(r):
                        wit = {"pair": [i, j], "from": name, "vector": list(r)}
                        break
                if wit:
                    break
            if wit is None:
                return None
            out.append(wit)
    return out


def conjugate_intersection_indices(K: CosetAction) -> list[int]:
    """[K : eta K eta^-1 cap K] for eta over the coset representatives of K."""
    out = []
    for p in range(K.degree):
        conj = K.rebased(p)
        out.append(K.intersect(conj).degree // K.degree)
    return out


@dataclass
class EllReport:
    ell: int
    lower_bound: int
    excluded: list[int]
    intersection_indices: list[int]
    rejected: list[dict]

    def to_json(self) -> dict:
        return {"ell": self.ell, "lower_bound": self.lower_bound, "excluded": self.excluded,
                "intersection_indices": self.intersection_indices, "rejected": self.rejected}


def choose_ell(Kp: CosetAction, tilde: CosetAction, primes: Sequence[int], delta0_index: int,
               start: int | None = None) -> EllReport:
    if not is_self_normalizing(Kp):
        raise PipelineError("Delta-tilde' is not self-normalizing in pi14")
    idx = conjugate_intersection_indices(Kp)
    bound = max(delta0_index, Kp.degree)
    ell = next_prime(max(bound, (start or 0) - 1))
    rejected = []
    while True:
        why = None
        if ell in primes:
            why = "equals some p_i"
        elif any(i % ell == 0 for i in idx):
            why = "divides an intersection index"
        elif distinctness_witnesses(build_Aj(Kp, tilde, ell)) is None:
            why = "A-subspaces not distinct"
        if why is None:
            return EllReport(ell, bound, list(primes), idx, rejected)
        rejected.append({"ell": ell, "reason": why})
        ell = next_prime(ell)


def smallest_faithful_primes(delta_index: int, K_index: int) -> tuple[int, int, int]:
    bound = max(delta_index, K_index)
    p1 = next_prime(bound)
    p2 = next_prime(p1)
    return (p1, p2, next_prime(p2))


# --- the layered subgroup -----------------------------------------------------

@dataclass(frozen=True)
class LayeredSubgroup:
    """L = {w in K : ab_K(w) mod q lies in W_q for every layer prime q}.

    K is a finite-index subgroup of pi_{1,4} (basis-B coset action, canonical
    labeling) and each W_q a subspace of H_1(K; Z/q) in K's Schreier basis."""

    K: CosetAction
    layers: tuple[ModSubspace, ...]

    def __post_init__(self):
        qs = [W.q for W in self.layers]
        if qs != sorted(set(qs)):
            raise ValueError("layers must have distinct increasing primes")
        r = self.K.rank()
        if any(W.dim_ambient != r for W in self.layers):
            raise ValueError("layer dimension differs from the rank of K")

    @classmethod
    def from_parts(cls, K: CosetAction, H: HLevel | None, A: ModSubspace | None) -> "LayeredSubgroup":
        K = K.canonical_form() if K.canonical != K.perms else K
        incl = inclusion_matrix(K)
        by_q: dict[int, ModSubspace] = {}
        if H is not None:
            for p, h in zip(H.primes, H.spans):
                W = h.preimage(incl)
                by_q[p] = by_q[p].intersect(W) if p in by_q else W
        if A is not None:
            by_q[A.q] = by_q[A.q].intersect(A) if A.q in by_q else A
        return cls(K, tuple(by_q[q] for q in sorted(by_q)))

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(W.q for W in self.layers)

    def contains(self, w) -> bool:
        if isinstance(w, ReflectionWord):
            at = build_atlas()
            if not at.in_pi14(w):
                return False
            w = at.rewrite(F14B, w)
        elif w.basis == F11:
            at = build_atlas()
            if not at.F14_in_F11.contains(w):
                return False
            w = at.rewrite(F14B, w)
        if not self.K.contains(w):
            return False
        v = _ab(self.K, w)
        return all(W.contains(v % W.q) for W in self.layers)

    def index(self) -> int:
        """[pi14 : L]."""
        out = self.K.degree
        for W in self.layers:
            out *= W.q ** W.codim
        return out

    def factored_index(self) -> dict:
        return {"K": self.K.degree, **{str(W.q): W.codim for W in self.layers}}

    def key(self) -> tuple:
        return (self.K.key(), tuple((W.q, W.basis) for W in self.layers))

    def transport(self, psi: FreeAut) -> "LayeredSubgroup":
        """The image psi(L) for an automorphism psi of pi14 (basis-B)."""
        K2 = self.K.image_under_automorphism(psi.inverse_images).canonical_form()
        cols = [_ab(self.K, psi.inverse()(g)) for g in K2.schreier.generators]
        M = np.array(cols, dtype=np.int64).T if cols else np.zeros((self.K.rank(), 0), dtype=np.int64)
        return LayeredSubgroup(K2, tuple(W.preimage(M % W.q) for W in self.layers))

    def to_json(self) -> dict:
        return {"K": self.K.to_json(), "layers": [W.to_json() for W in self.layers]}

    @classmethod
    def from_json(cls, d: dict) -> "LayeredSubgroup":
        K = CosetAction.from_json(d["K"])
        return cls(K, tuple(ModSubspace.from_json(x) for x in d["layers"]))


# --- assembly -------------------------------------------------------------------

@dataclass
class Construction:
    delta: DeltaSpec
    delta0: CosetAction
    refined: RefineResult
    pulls: Pullbacks
    pulls_prime: Pullbacks
    alpha_reps: list[FreeWord]
    H: HLevel
    ell: EllReport
    A: list[ModSubspace]
    witnesses: list[dict]
    layered: LayeredSubgroup
    seed: int
    toy: bool

    def certificate(self) -> dict:
        Kp = self.pulls_prime.tilde
        return {
            "schema": CERT_SCHEMA,
            "seed": self.seed,
            "toy": self.toy,
            "faithful": not self.toy,
            "degenerate": self.delta.index == 1,
            "delta": self.delta.to_json(),
            "delta0_prime": self.refined.subgroup.to_json(),
            "refinement": {"candidates": self.refined.candidates,
                           "inner_degree": self.refined.inner_degree,
                           "normalizer_points": normalizer_points(self.refined.subgroup)},
            "delta_tilde_prime": Kp.to_json(),
            "k": len(self.alpha_reps),
            "alpha_reps": [str(w) for w in self.alpha_reps],
            "H": self.H.to_json(),
            "signature": self.H.signature(),
            "ell": self.ell.to_json(),
            "A": [a.to_json() for a in self.A],
            "A_distinct": self.witnesses,
            "lambda": self.layered.to_json(),
            "index": {"pi14": self.layered.factored_index(),
                      "pi11_factor": 4},
        }


def construct(d: DeltaSpec, seed: int = 0, toy_primes: Sequence[int] | None = None,
              budget: int = 10_000) -> Construction:
    rng = np.random.default_rng(seed)
    delta0 = delta0_from_delta(d)
    pulls = pullback_chain(delta0)
    reps = alpha_classes(pulls.tilde)
    if len(reps) != d.index:
        raise PipelineError(f"k = {len(reps)} differs from the index {d.index}")
    if not lemma3(d, pulls).ok:
        raise PipelineError("the action on alpha classes differs from the coset action")
    refined = self_normalizing_refine(delta0, rng, budget)
    pp = pullback_chain(refined.subgroup)
    Kp = pp.tilde
    # Delta-tilde' <= Delta-tilde
    for g in Kp.schreier.generators:
        if not pulls.tilde.contains(g):
            raise PipelineError("Delta-tilde' is not contained in Delta-tilde")
    toy = toy_primes is not None
    if toy:
        p1, p2, p3, ell = (int(x) for x in toy_primes)
        H = build_H((p1, p2, p3), toy=True)
        A = build_Aj(Kp, pulls.tilde, ell)
        rep = EllReport(ell, 0, [p1, p2, p3], conjugate_intersection_indices(Kp), [])
        wit = distinctness_witnesses(A) or []
    else:
        primes = smallest_faithful_primes(d.index, Kp.degree)
        H = build_H(primes, d.index)
        rep = choose_ell(Kp, pulls.tilde, primes, delta0.degree)
        ell = rep.ell
        A = build_Aj(Kp, pulls.tilde, ell)
        wit = distinctness_witnesses(A)
        if wit is None:
            raise PipelineError("A-subspaces are not distinct")
    lam = assemble_lambda(Kp, H, A[0])
    sanity_checks(lam, rng)
    return Construction(d, delta0, refined, pulls, pp, reps, H, rep, A, wit, lam, seed, toy)


def assemble_lambda(Kp: CosetAction, H: HLevel, A1: ModSubspace) -> LayeredSubgroup:
    return LayeredSubgroup.from_parts(Kp, H, A1)


def random_word(basis, length: int, rng) -> FreeWord:
    r = basis.rank
    letters = [int(x) for x in rng.integers(1, r + 1, size=length)]
    signs = rng.integers(0, 2, size=length)
    return basis.word([x if s else -x for x, s in zip(letters, signs)])


def sanity_checks(lam: LayeredSubgroup, rng, samples: int = 100) -> None:
    """Identity in, grade-one letters out, and conjugates of a beta
    representative (never in H, which is normal) rejected."""
    at = build_atlas()
    if not lam.contains(F14B.identity):
        raise PipelineError("identity not in Lambda")
    if lam.contains(F11.gen(0)):
        raise PipelineError("a lies in Lambda")
    b = at.punctures[1].word
    for _ in range(samples):
        w = random_word(F14B, int(rng.integers(0, 9)), rng)
        if lam.contains(w * b * w.inverse()):
            raise PipelineError("a conjugate of beta1 lies in Lambda")


def check_guards(lam: LayeredSubgroup, delta_index: int) -> None:
    """Faithfulness of the class key: every layer prime exceeds [pi14:K] and
    the index of Delta."""
    n = lam.K.degree
    for q in lam.primes:
        if q <= n or q <= delta_index:
            raise GuardViolation(f"layer prime {q} does not exceed [pi14:K] = {n} "
                                 f"and [Gamma(2):Delta] = {delta_index}")


# --- certificate re-verification ---------------------------------------------

@dataclass
class CertificateReport:
    checks: list[tuple[str, bool]]
    toy: bool

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((name for name, ok in self.checks if not ok), None)

    def to_json(self) -> dict:
        return {"ok": self.ok, "toy": self.toy, "first_failure": self.first_failure,
                "checks": [{"check": n, "ok": ok} for n, ok in self.checks]}


def verify_certificate(cert: dict, delta: DeltaSpec | None = None) -> tuple[CertificateReport, LayeredSubgroup | None]:
    """Recompute every check from the certificate data alone."""
    checks: list[tuple[str, bool]] = []

    def check(name, ok):
        checks.append((name, bool(ok)))
        return bool(ok)

    if cert.get("schema") != CERT_SCHEMA:
        raise ValueError(f"unsupported certificate schema {cert.get('schema')!r}")
    toy = bool(cert.get("toy"))
    d = DeltaSpec.from_json(cert["delta"])
    if delta is not None and not check("delta matches certificate",
                                       delta.action.same_subgroup(d.action)):
        return CertificateReport(checks, toy), None
    delta0 = delta0_from_delta(d)
    pulls = pullback_chain(delta0)
    check("k equals the index", cert["k"] == d.index == len(alpha_classes(pulls.tilde)))
    check("alpha representatives", [str(w) for w in alpha_classes(pulls.tilde)] == cert["alpha_reps"])
    d0p = CosetAction.from_json(cert["delta0_prime"])
    check("Delta'_0 contained in Delta_0", all(delta0.contains(g) for g in d0p.schreier.generators))
    check("Delta'_0 self-normalizing", normalizer_points(d0p) == [0])
    Kp = pullback_chain(d0p).tilde
    check("Delta-tilde' table", Kp.same_subgroup(CosetAction.from_json(cert["delta_tilde_prime"])))
    check("Delta-tilde' self-normalizing", is_self_normalizing(Kp))
    primes = tuple(cert["H"]["primes"])
    try:
        H = build_H(primes, d.index, toy=toy)
        check("H spans", [h.to_json() for h in H.spans] == cert["H"]["spans"])
        check("H preserved by Gamma(2) lifts", all(h_invariance(H).values()))
    except (GuardViolation, PipelineError, ValueError):
        check("H construction", False)
        return CertificateReport(checks, toy), None
    ell = cert["ell"]["ell"]
    idx = conjugate_intersection_indices(Kp)
    check("intersection indices", idx == cert["ell"]["intersection_indices"])
    if not toy:
        check("ell constraints", is_prime(ell) and ell > delta0.degree and ell not in primes
              and all(i % ell for i in idx))
    A = build_Aj(Kp, pulls.tilde, ell)
    check("A subspaces", [a.to_json() for a in A] == cert["A"])
    wit_ok = len(cert["A_distinct"]) == len(A) * (len(A) - 1) // 2
    for wit in cert["A_distinct"]:
        i, j = wit["pair"]
        src, other = (A[i], A[j]) if wit["from"] == i else (A[j], A[i])
        v = wit["vector"]
        wit_ok &= src.contains(v) and not other.contains(v)
    check("A distinctness witnesses", wit_ok)
    lam = assemble_lambda(Kp, H, A[0])
    check("Lambda layers", lam.to_json() == cert["lambda"])
    try:
        check_guards(lam, d.index)
        check("prime guards", True)
    except GuardViolation:
        check("prime guards", False)
    return CertificateReport(checks, toy), lam
