# structure_lab.py
"""
Структурные процедуры для ℓ-групп порядка ℓ³, ℓ⁴ и A′-групп:
распознавание A′-дерева, нормальная абелева подгруппа индекса ℓ,
классификация групп порядка ℓ⁴ экспоненты ℓ² со свидетелями,
и проекции π_j для третьего типа.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import factorint

from errors import EngineAssertion, PreconditionError
from group_core import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    closure,
    exponent,
    find_complement,
    is_normal,
    normal_abelian_subgroups,
    normal_subgroups,
    normalizer_centralizer,
    semidirect_product,
    subgroup_as_group,
    two_gen_l2_group,
)

logger = logging.getLogger(__name__)

KIND_ABELIAN = "abelian"
KIND_CYCLIC = "cyclic"
KIND_EXPONENT_L = "exponent_l"
KIND_MODULAR = "exponent_l3_modular"
KIND_TYPE1 = "exponent_l2_type1"
KIND_TYPE2 = "type2"
KIND_TYPE3 = "type3"


def prime_power(order: int) -> Tuple[int, int]:
    """(ℓ, n) для порядка ℓⁿ, иначе PreconditionError."""
    f = factorint(order)
    if len(f) != 1:
        raise PreconditionError(f"order {order} is not a prime power")
    ell, n = next(iter(f.items()))
    return int(ell), int(n)


# ---------------------
# A′-группы
# ---------------------

@dataclass
class AprimeTree:
    kind: str                      # abelian | semidirect | direct
    group: FiniteGroup
    normal: Optional[Subgroup] = None
    complement: Optional[Subgroup] = None
    children: List["AprimeTree"] = field(default_factory=list)

    def to_dict(self):
        data = {"kind": self.kind, "order": self.group.order}
        if self.normal is not None:
            data["normal_order"] = self.normal.order
        if self.complement is not None:
            data["complement_order"] = self.complement.order
        if self.children:
            data["children"] = [c.to_dict() for c in self.children]
        return data


def _pi_number(n: int, pi) -> bool:
    return all(p in pi for p in factorint(n))


def is_aprime_group(G: FiniteGroup) -> Optional[AprimeTree]:
    if G.is_abelian():
        return AprimeTree("abelian", G)
    primes = sorted(factorint(G.order))
    # неабелева ℓ-группа не раскладывается в взаимно простые части
    if len(primes) == 1:
        return None
    orders = [int(o) for o in G.orders]
    for size in range(1, len(primes)):
        for pi in combinations(primes, size):
            hall = 1
            for p in pi:
                hall *= p ** factorint(G.order)[p]
            members = [g for g in range(G.order) if _pi_number(orders[g], pi)]
            if len(members) != hall:
                continue
            H = closure(G, members)
            if H.order != hall or not H.is_abelian() or not is_normal(G, H):
                continue
            K = find_complement(G, H)
            if K is None:
                continue
            Kg, _ = subgroup_as_group(G, K, name=f"{G.name}/complement")
            child = is_aprime_group(Kg)
            if child is not None:
                logger.debug("%s: A' split over normal Hall subgroup of order %d", G.name, hall)
                return AprimeTree("semidirect", G, normal=H, complement=K, children=[child])
    normals = [N for N in normal_subgroups(G) if 1 < N.order < G.order]
    for N1 in normals:
        for N2 in normals:
            if N1.order > N2.order or N1.order * N2.order != G.order or len(N1._set & N2._set) != 1:
                continue
            G1, _ = subgroup_as_group(G, N1, name=f"{G.name}/left")
            G2, _ = subgroup_as_group(G, N2, name=f"{G.name}/right")
            t1, t2 = is_aprime_group(G1), is_aprime_group(G2)
            if t1 is not None and t2 is not None:
                return AprimeTree("direct", G, normal=N1, complement=N2, children=[t1, t2])
    return None


# ---------------------
# ℓ-группы
# ---------------------

def burnside_check(G: FiniteGroup) -> Subgroup:
    """Нормальная абелева подгруппа порядка ℓ^{n-1} в группе порядка ℓ³ или ℓ⁴."""
    ell, n = prime_power(G.order)
    if n not in (3, 4):
        raise PreconditionError(f"{G.name}: order {G.order} is not ell^3 or ell^4")
    found = normal_abelian_subgroups(G, ell ** (n - 1), limit=1)
    if not found:
        raise EngineAssertion(f"{G.name}: no normal abelian subgroup of order {ell ** (n - 1)}")
    return found[0]


def exponent_ell_split(G: FiniteGroup) -> Tuple[Subgroup, Subgroup]:
    """Расщепление 1 → C(ℓ)^{n-1} → G → C(ℓ) → 1 для групп экспоненты ℓ."""
    ell, _ = prime_power(G.order)
    if exponent(G) != ell:
        raise PreconditionError(f"{G.name} does not have exponent {ell}")
    H = burnside_check(G)
    K = find_complement(G, H)
    if K is None:
        raise EngineAssertion(f"{G.name}: exponent-{ell} extension does not split")
    return H, K


@dataclass
class Ell4Classification:
    kind: str
    ell: int
    n: int
    H: Optional[Subgroup] = None
    tau: Optional[int] = None
    sigma1: Optional[int] = None
    sigma: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    c: Optional[int] = None
    complement: Optional[Subgroup] = None
    rho: Optional[int] = None
    case: Optional[str] = None
    alternates: List[str] = field(default_factory=list)
    group: Optional[FiniteGroup] = field(default=None, repr=False)
    _projector: Optional["Type3Projector"] = field(default=None, repr=False)

    def projector(self) -> "Type3Projector":
        if self.kind != KIND_TYPE3:
            raise PreconditionError(f"projection needs a type3 classification, got {self.kind}")
        if self._projector is None:
            self._projector = Type3Projector(self.group, self)
        return self._projector

    def to_dict(self):
        data = {"kind": self.kind, "ell": self.ell, "n": self.n}
        for name in ("tau", "sigma1", "sigma", "a", "b", "c", "rho", "case"):
            value = getattr(self, name)
            if value is not None:
                data[name] = value
        if self.H is not None:
            data["H_order"] = self.H.order
        if self.complement is not None:
            data["complement_order"] = self.complement.order
        if self.alternates:
            data["alternates"] = list(self.alternates)
        return data


def _exponent_of(G: FiniteGroup, base: int, x: int, modulus_step: int, count: int) -> Optional[int]:
    """Наименьшее e в range(count) с x = base^{e·modulus_step}."""
    for e in range(count):
        if G.power(base, e * modulus_step) == x:
            return e
    return None


def _fill_constants(G: FiniteGroup, cls: Ell4Classification):
    """a, b, σ, c по τ, σ₁ и H."""
    ell, tau, sigma1 = cls.ell, cls.tau, cls.sigma1
    conj = G.conj(sigma1, tau)
    powers = G.cyclic_powers(tau)
    r = powers.index(conj) if conj in powers else None
    if r is None or (r - 1) % ell:
        raise EngineAssertion(f"{G.name}: sigma1 does not act on <tau> by 1 + a*ell")
    cls.a = ((r - 1) // ell) % ell
    for b in range(ell):
        sigma = G.mult(sigma1, G.power(tau, -b))
        if sigma in cls.H:
            cls.b, cls.sigma = b, sigma
            break
    else:
        raise EngineAssertion(f"{G.name}: no b with sigma1 * tau^-b in H")
    c = _exponent_of(G, tau, G.power(cls.sigma, ell), ell, ell)
    if c is None:
        raise EngineAssertion(f"{G.name}: sigma^ell is not a power of tau^ell")
    cls.c = c


def _lowest_outside(G: FiniteGroup, S: Subgroup) -> int:
    return next(g for g in range(G.order) if g not in S)


def _alternates(G: FiniteGroup, ell: int, kind: str) -> List[str]:
    alt = []
    if kind != KIND_TYPE2:
        for x in range(G.order):
            if G.element_order(x) != ell * ell:
                continue
            X = closure(G, [x])
            if not is_normal(G, X):
                continue
            K = find_complement(G, X)
            if K is not None and any(G.element_order(k) == ell * ell for k in K.members):
                alt.append(KIND_TYPE2)
                break
    if kind != KIND_TYPE1:
        for H in normal_abelian_subgroups(G, ell ** 3):
            if find_complement(G, H) is not None:
                alt.append(KIND_TYPE1)
                break
    return alt


def classify_ell4(G: FiniteGroup, with_alternates: bool = True) -> Ell4Classification:
    ell, n = prime_power(G.order)
    if ell == 2 or n not in (3, 4):
        raise PreconditionError(f"{G.name}: classification needs order ell^3 or ell^4 with ell odd")
    exp = exponent(G)
    if exp == G.order:
        return Ell4Classification(KIND_CYCLIC, ell, n, group=G)
    if G.is_abelian():
        return Ell4Classification(KIND_ABELIAN, ell, n, group=G)
    if exp == ell:
        H, K = exponent_ell_split(G)
        return Ell4Classification(KIND_EXPONENT_L, ell, n, H=H, complement=K, group=G)
    if exp == ell ** (n - 1):
        tau = next(g for g in range(G.order) if G.element_order(g) == exp)
        H = closure(G, [tau])
        K = find_complement(G, H)
        if K is None:
            raise EngineAssertion(f"{G.name}: <tau> of index {ell} has no complement")
        sigma = next(k for k in K.members if k != G.identity)
        return Ell4Classification(KIND_MODULAR, ell, n, H=H, tau=tau, sigma=sigma, complement=K, group=G)
    if n != 4 or exp != ell * ell:
        raise EngineAssertion(f"{G.name}: exponent {exp} outside the classification")

    # σ порядка ℓ² с максимальным #(N/C), при равенстве наименьший индекс
    best, best_q = None, 0
    for g in range(G.order):
        if G.element_order(g) != ell * ell:
            continue
        N, C = normalizer_centralizer(G, g)
        q = N.order // C.order
        if q > best_q:
            best, best_q = g, q
    sigma = best
    N, C = normalizer_centralizer(G, sigma)
    cls: Ell4Classification

    if C.order >= ell ** 3:
        if C.order == ell ** 3:
            H = C
        else:
            H = next((X for X in (closure(G, [sigma, x]) for x in range(G.order)) if X.order == ell ** 3), None)
            if H is None:
                raise EngineAssertion(f"{G.name}: no abelian subgroup of order {ell ** 3} through central sigma")
        K = find_complement(G, H)
        if K is not None:
            cls = Ell4Classification(KIND_TYPE1, ell, n, H=H, tau=sigma, complement=K, case="split", group=G)
        elif best_q == ell:
            tau = sigma
            T = closure(G, [tau])
            rho = None
            for g in range(G.order):
                if g in H:
                    continue
                R = closure(G, [g])
                if len(R._set & T._set) == 1 and closure(G, [tau, g]).order == G.order:
                    rho = g
                    break
            if rho is None:
                raise EngineAssertion(f"{G.name}: no element rho with G = <tau> x| <rho>")
            cls = Ell4Classification(KIND_TYPE2, ell, n, H=H, tau=tau, rho=rho,
                                     complement=closure(G, [rho]), case="nonsplit_full", group=G)
        else:
            tau = _lowest_outside(G, H)
            _, Ct = normalizer_centralizer(G, tau)
            X = Ct if Ct.order == ell ** 3 else next(
                (Y for Y in (closure(G, [tau, y]) for y in Ct.members) if Y.order == ell ** 3), None)
            if X is None:
                raise EngineAssertion(f"{G.name}: C(tau) has no subgroup of order {ell ** 3} through tau")
            T = closure(G, [tau])
            sigma1 = next((x for x in X.members if G.element_order(x) == ell and x not in T), None)
            if sigma1 is None:
                raise EngineAssertion(f"{G.name}: no sigma1 of order {ell} centralizing tau")
            cls = Ell4Classification(KIND_TYPE3, ell, n, H=H, tau=tau, sigma1=sigma1,
                                     case="nonsplit_trivial", group=G)
            _fill_constants(G, cls)
    else:
        tau = sigma
        candidates = [S for S in normal_abelian_subgroups(G, ell ** 3) if tau not in S]
        if not candidates:
            raise EngineAssertion(f"{G.name}: no normal abelian subgroup of order {ell ** 3} avoiding tau")
        H = candidates[0]
        T = closure(G, [tau])
        sigma1 = next((x for x in N.members
                       if x not in T and x not in C and G.element_order(x) == ell), None)
        if sigma1 is None:
            raise EngineAssertion(f"{G.name}: no sigma1 of order {ell} acting nontrivially on tau")
        cls = Ell4Classification(KIND_TYPE3, ell, n, H=H, tau=tau, sigma1=sigma1,
                                 case="small_centralizer", group=G)
        _fill_constants(G, cls)

    if with_alternates:
        cls.alternates = _alternates(G, ell, cls.kind)
    logger.info("%s classified as %s (%s)", G.name, cls.kind, cls.case)
    return cls


def verify_witnesses(G: FiniteGroup, cls: Ell4Classification) -> List[str]:
    """Список нарушенных условий на свидетелей; пустой список означает, что всё проверено."""
    ell = cls.ell
    problems = []

    def need(cond, message):
        if not cond:
            problems.append(message)

    if cls.kind in (KIND_EXPONENT_L, KIND_MODULAR, KIND_TYPE1):
        H, K = cls.H, cls.complement
        need(is_normal(G, H), "H is not normal")
        need(H.is_abelian(), "H is not abelian")
        need(H.order * K.order == G.order and len(H._set & K._set) == 1, "K is not a complement of H")
    if cls.kind == KIND_MODULAR:
        need(G.element_order(cls.tau) == G.order // ell, "tau does not have order ell^(n-1)")
    if cls.kind == KIND_TYPE1:
        need(cls.tau in cls.H and H.order == ell ** 3, "tau must lie in H of order ell^3")
    if cls.kind == KIND_TYPE2:
        T, R = closure(G, [cls.tau]), closure(G, [cls.rho])
        need(is_normal(G, T), "<tau> is not normal")
        need(R.order == ell * ell and len(T._set & R._set) == 1, "<rho> is not a cyclic complement of <tau>")
        need(closure(G, [cls.tau, cls.rho]).order == G.order, "tau and rho do not generate G")
        need(find_complement(G, cls.H) is None, "extension over H splits")
    if cls.kind == KIND_TYPE3:
        H = cls.H
        N, C = normalizer_centralizer(G, cls.tau)
        T = closure(G, [cls.tau])
        need(is_normal(G, H) and H.is_abelian() and H.order == ell ** 3, "H is not normal abelian of order ell^3")
        need(cls.tau not in H, "tau lies in H")
        need(G.element_order(cls.tau) == ell * ell, "tau does not have order ell^2")
        need(cls.sigma1 in N and cls.sigma1 not in T and G.element_order(cls.sigma1) == ell,
             "sigma1 is not an order-ell element of N(tau) outside <tau>")
        need((cls.sigma1 in C) == (N.order == C.order), "sigma1 acts on tau inconsistently with N/C")
        need(cls.sigma in H and G.mult(cls.sigma, G.power(cls.tau, cls.b)) == cls.sigma1, "sigma1 != sigma tau^b")
        need(G.power(cls.sigma, ell) == G.power(cls.tau, cls.c * ell), "sigma^ell != tau^(c ell)")
        need(G.conj(cls.sigma, cls.tau) == G.power(cls.tau, 1 + cls.a * ell), "sigma tau sigma^-1 != tau^(1+a ell)")
    return problems


# ---------------------
# Проекции π_j
# ---------------------

class Type3Projector:
    """
    G̃ = H ⋊ 𝒢̃, где 𝒢̃ = ⟨τ̃, σ̃⟩ порядка ℓ³ с теми же соотношениями, что ⟨τ, σ⟩,
    τ̃ действует на H сопряжением τ, σ̃ тривиально.
    π_j(h, τ̃^i σ̃^m) = h · (h₀^j τ)^i · σ^{(1-j)m}.
    """

    def __init__(self, G: FiniteGroup, cls: Ell4Classification):
        if cls.kind != KIND_TYPE3:
            raise PreconditionError(f"projection needs a type3 classification, got {cls.kind}")
        self.G = G
        self.cls = cls
        ell = cls.ell
        self.ell = ell
        self.Hg, self.embedding = subgroup_as_group(G, cls.H, name=f"{G.name}/H")
        self.cover = two_gen_l2_group(ell, cls.a, cls.c)
        local = np.full(G.order, -1, dtype=np.int64)
        local[self.embedding] = np.arange(self.embedding.size)
        tau_action = local[G.table[G.table[cls.tau, self.embedding], G.inverse[cls.tau]]]
        identity = np.arange(self.Hg.order)
        # порядок порождающих метациклической группы: τ̃, затем σ̃
        self.extended = semidirect_product(self.Hg, self.cover, [tau_action, identity],
                                           name=f"{G.name}~")
        self.tau_tilde = ell          # индекс τ̃ в 𝒢̃
        self._homs: Dict[int, GroupHom] = {}

        orders_h_tau = [G.element_order(G.mult(int(h), cls.tau)) for h in self.embedding]
        if all(o == ell * ell for o in orders_h_tau):
            self.case = 1
            self.h0 = None
        else:
            self.case = 2
            self.h0 = int(min(h for h, o in zip(self.embedding, orders_h_tau) if o == ell))

    def _tau_image(self, j: int) -> int:
        if self.case == 1:
            return self.cls.tau
        return self.G.mult(self.G.power(self.h0, j), self.cls.tau)

    def hom(self, j: int) -> GroupHom:
        if j not in self._homs:
            G, ell = self.G, self.ell
            t = self._tau_image(j)
            s = self.G.power(self.cls.sigma, 1 - j)
            pw_t = np.array([G.power(t, i) for i in range(ell * ell)])
            pw_s = np.array([G.power(s, m) for m in range(ell)])
            g_idx = np.arange(ell ** 3)
            cover_img = G.table[pw_t[g_idx // ell], pw_s[g_idx % ell]]
            images = G.table[self.embedding[:, None], cover_img[None, :]].ravel()
            pi = GroupHom(self.extended, G, images)
            if not pi.verify():
                raise EngineAssertion(f"{G.name}: pi_{j} is not a homomorphism")
            if not pi.is_surjective():
                raise EngineAssertion(f"{G.name}: pi_{j} is not surjective")
            self._homs[j] = pi
        return self._homs[j]

    def _lift(self, h: int) -> int:
        """Индекс h·τ̃ в G̃ для h ∈ H (h задан индексом в G)."""
        local = int(np.flatnonzero(self.embedding == h)[0])
        return local * self.cover.order + self.tau_tilde

    def valid_js(self, h1: int, h2: int) -> List[int]:
        if self.case == 1:
            return [0]
        ell, out = self.ell, []
        for j in range(ell):
            t = self._tau_image(j)
            if all(self.G.element_order(self.G.mult(h, t)) == ell * ell for h in (h1, h2)):
                out.append(j)
        return out

    def project(self, h1: int, h2: int) -> Tuple[int, GroupHom]:
        js = self.valid_js(h1, h2)
        if not js:
            raise EngineAssertion(f"{self.G.name}: no valid j for h1={h1}, h2={h2}")
        j = js[0]
        return j, self.hom(j)

    def check_pair(self, h1: int, h2: int) -> List[str]:
        problems = []
        j, pi = self.project(h1, h2)
        for h in (h1, h2):
            if self.G.element_order(pi(self._lift(h))) != self.ell ** 2:
                problems.append(f"pi_{j}(h tau~) has wrong order for h={h}")
        kernel = pi.kernel()
        h_part = [x for x in kernel.members if x % self.cover.order == self.cover.identity]
        if len(h_part) != 1:
            problems.append(f"kernel of pi_{j} meets H nontrivially")
        return problems


def type3_projection(G: FiniteGroup, cls: Ell4Classification, h1: int, h2: int) -> GroupHom:
    if cls.H is None or h1 not in cls.H or h2 not in cls.H:
        raise PreconditionError("h1 and h2 must lie in H")
    return cls.projector().project(h1, h2)[1]


def type3_steinitz_identity(ell: int, A: int, B: int, modulus: Optional[int] = None) -> Dict[str, object]:
    """
    B(ℓ²-1)ℓ² + A((ℓ-1)/2)ℓ³ = ((ℓ-1)/2)ℓ²(2(ℓ+1)B + ℓA);
    при 2(ℓ+1)B + ℓA ≡ 1 (mod modulus) показатель сводится к ((ℓ-1)/2)ℓ².
    """
    if ell % 2 == 0:
        raise PreconditionError(f"ell must be odd, got {ell}")
    half = (ell - 1) // 2
    lhs = B * (ell * ell - 1) * ell * ell + A * half * ell ** 3
    rhs = half * ell * ell * (2 * (ell + 1) * B + ell * A)
    result = {"ell": ell, "A": A, "B": B, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}
    if modulus is not None:
        result["modulus"] = modulus
        result["collapses"] = (rhs - half * ell * ell) % modulus == 0
    return result
