# steinitz.py
"""
𝒲(k,G) в двух формах произведения, классы Штейница по данным ветвления,
допустимость ветвящихся простых, решатель сравнений для показателей,
конструктивная нижняя граница и сертификаты "очень хорошей" группы.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint

import config
from classgroup import (
    ClassSubgroup,
    FiniteAbelianGroup,
    IdealClass,
    WReport,
    class_group,
    join_all,
    power_subgroup,
    w_cyclotomic,
    w_subgroup,
)
from cyclo import EQUAL, EFieldDescriptor, FieldSpec, e_field, e_field_compare, validate_field_for_group
from errors import NoSolutionError, PreconditionError, UnsupportedBranchError
from group_core import (
    FiniteGroup,
    SemidirectSplit,
    Subgroup,
    closure,
    cyclic_class_representatives,
    normalizer_centralizer,
    semidirect_product,
    subgroup_as_group,
)
from models import fraction_to_json
from structure_lab import (
    KIND_EXPONENT_L,
    KIND_MODULAR,
    KIND_TYPE1,
    KIND_TYPE2,
    KIND_TYPE3,
    AprimeTree,
    classify_ell4,
    is_aprime_group,
    prime_power,
    type3_steinitz_identity,
)
from timer_utils import timer

logger = logging.getLogger(__name__)


def _is_power_of(o: int, ell: int) -> bool:
    while o % ell == 0:
        o //= ell
    return o == 1


def subgroup_exponent(S: ClassSubgroup) -> int:
    return reduce(lcm, (S.ambient.element_order(g) for g in S.generators()), 1)


@dataclass
class TauEntry:
    tau: int
    tau_order: int
    descriptor: EFieldDescriptor
    w: WReport
    exponent: Fraction

    def to_dict(self):
        data = {"tau": self.tau, "tau_order": self.tau_order, "w_order": self.w.order,
                "exponent": fraction_to_json(self.exponent)}
        data.update(self.descriptor.to_dict())
        return data


@dataclass
class CalWReport:
    subgroup: ClassSubgroup
    ell_form: ClassSubgroup
    per_tau: List[TauEntry]
    forms_agree: bool
    mode: str = "representatives"
    i: int = 1

    @property
    def order(self) -> int:
        return self.subgroup.order

    @property
    def heuristic(self) -> bool:
        return any(e.w.heuristic for e in self.per_tau)

    def to_dict(self):
        data = self.subgroup.to_dict()
        data.update({
            "forms_agree": self.forms_agree,
            "heuristic": self.heuristic,
            "mode": self.mode,
            "i": self.i,
            "ambient": list(self.subgroup.ambient.divisors),
            "per_tau": [e.to_dict() for e in self.per_tau],
        })
        return data


def _taus(G: FiniteGroup, mode: str) -> List[int]:
    if mode == "representatives":
        return cyclic_class_representatives(G)
    if mode == "full":
        return [g for g in range(G.order) if g != G.identity]
    raise PreconditionError(f"unknown enumeration mode {mode!r}")


def cal_w(k: FieldSpec, G: FiniteGroup, bound: int = config.DEFAULT_PRIME_BOUND,
          mode: str = "representatives", i: int = 1) -> CalWReport:
    if i not in (0, 1):
        raise PreconditionError(f"i must be 0 or 1, got {i}")
    if G.order > config.ORDER_CAP:
        raise PreconditionError(f"{G.name}: order above the cap")
    validate_field_for_group(k, G)
    ambient = class_group(k)
    n = G.order
    with timer(f"cal_w {G.name} over {k.label}"):
        entries = []
        element_parts = []
        ell_parts = []
        for tau in _taus(G, mode):
            o = G.element_order(tau)
            E = e_field(k, G, tau)
            W = w_subgroup(k, E, bound)
            t = Fraction((o - 1) * n, 2 ** i * o)
            entries.append(TauEntry(tau, o, E, W, t))
            element_parts.append(power_subgroup(W.subgroup, t, ambient))
            primes = list(factorint(o))
            if len(primes) == 1:
                ell = primes[0]
                ell_parts.append(power_subgroup(W.subgroup, Fraction((ell - 1) * n, 2 ** i * o), ambient))
        upper = join_all(ambient, element_parts)
        ell_form = join_all(ambient, ell_parts)
    report = CalWReport(upper, ell_form, entries, upper == ell_form, mode=mode, i=i)
    logger.info("cal_w(%s, %s): order %d, forms agree: %s", k.label, G.name, upper.order, report.forms_agree)
    return report


def product_forms_check(k: FieldSpec, G: FiniteGroup, i: int, bound: int = config.DEFAULT_PRIME_BOUND) -> bool:
    return cal_w(k, G, bound, i=i).forms_agree


@dataclass
class RamificationDatum:
    cls: IdealClass
    inertia_gen: int
    e: Optional[int] = None


def steinitz_from_ramification(k: FieldSpec, G: FiniteGroup, data: Sequence[RamificationDatum]) -> IdealClass:
    """∏ cls^{((e-1)/2)(#G/e)} по ветвящимся простым, только для нечётного #G."""
    if G.order % 2 == 0:
        raise UnsupportedBranchError(f"{G.name}: Steinitz class from ramification needs odd order")
    ambient = class_group(k)
    total = ambient.zero
    for datum in data:
        e = G.element_order(datum.inertia_gen)
        if e <= 1:
            raise PreconditionError("inertia generator must be nontrivial")
        if datum.e is not None and datum.e != e:
            raise PreconditionError(f"declared ramification index {datum.e} differs from o(tau) = {e}")
        total = ambient.add(total, ambient.scale(datum.cls, (e - 1) // 2 * (G.order // e)))
    return total


def check_ram_admissible(k: FieldSpec, G: FiniteGroup, tau: int, x: Sequence[int],
                         bound: int = config.DEFAULT_PRIME_BOUND) -> bool:
    return w_subgroup(k, e_field(k, G, tau), bound).subgroup.contains(x)


def exponent_solver(u: int, v: int, w: int, n: int) -> Tuple[int, int]:
    """Лексикографически наименьшие A, B ∈ [2, 2n+2] с uA + vB ≡ w (mod n)."""
    if n < 1:
        raise PreconditionError(f"modulus must be positive, got {n}")
    if w % gcd(gcd(u, v), n):
        raise NoSolutionError(f"gcd({u}, {v}, {n}) does not divide {w}")
    for A in range(2, 2 * n + 3):
        for B in range(2, 2 * n + 3):
            if (u * A + v * B - w) % n == 0:
                return A, B
    raise NoSolutionError(f"no A, B > 1 with {u}A + {v}B = {w} mod {n}")


@dataclass
class LowerBound:
    subgroup: ClassSubgroup
    congruences: List[Dict[str, object]] = field(default_factory=list)

    def to_dict(self):
        data = self.subgroup.to_dict()
        data["congruences"] = list(self.congruences)
        return data


def constructive_lower_bound(k: FieldSpec, G: FiniteGroup, split: SemidirectSplit, rt_of_complement: ClassSubgroup,
                             bound: int = config.DEFAULT_PRIME_BOUND) -> LowerBound:
    """
    R_t(k,𝒢)^{#H} · ∏_{ℓ | #H} ∏_{τ ∈ H{ℓ}*} W(k,E_{k,G,τ})^{((ℓ-1)/2)(#G/o(τ))}.
    """
    H = split.normal
    if not H.is_abelian():
        raise PreconditionError(f"{G.name}: normal part of the split is not abelian")
    if H.order % 2 == 0:
        raise PreconditionError(f"{G.name}: normal part of the split has even order")
    ambient = class_group(k)
    parts = [power_subgroup(rt_of_complement, H.order, ambient)]
    congruences = []
    for tau in cyclic_class_representatives(G):
        if tau not in H:
            continue
        o = G.element_order(tau)
        ell = next(iter(factorint(o)))
        if not _is_power_of(o, ell):
            continue
        W = w_subgroup(k, e_field(k, G, tau), bound).subgroup
        parts.append(power_subgroup(W, (ell - 1) // 2 * (G.order // o), ambient))
        u = (ell - 1) // 2 * (H.order // ell)
        v = (o - 1) * (H.order // o)
        w = (ell - 1) // 2 * (H.order // o)
        modulus = subgroup_exponent(W)
        entry = {"tau": tau, "tau_order": o, "modulus": modulus}
        try:
            entry["solution"] = list(exponent_solver(u, v, w, modulus))
        except NoSolutionError:
            entry["solution"] = None
        congruences.append(entry)
    return LowerBound(join_all(ambient, parts), congruences)


def lower_bound_from_action(k: FieldSpec, H: FiniteGroup, K: FiniteGroup, action, rt_of_complement: ClassSubgroup,
                            bound: int = config.DEFAULT_PRIME_BOUND) -> LowerBound:
    """То же по данным (H, 𝒢, μ): строит G = H ⋊_μ 𝒢 и берёт его расщепление."""
    G = semidirect_product(H, K, action)
    return constructive_lower_bound(k, G, G.split, rt_of_complement, bound)


# ---------------------
# Сертификаты
# ---------------------

ROUTE_ABELIAN = "abelian"
ROUTE_APRIME = "aprime"
ROUTE_EXPONENT_L = "exponent_ell"
ROUTE_MAX_EXPONENT = "max_exponent"
ROUTE_UNCLASSIFIED = "unclassified"


@dataclass
class CertificateReport:
    upper: ClassSubgroup
    lower: ClassSubgroup
    route: str
    closed_form: Optional[ClassSubgroup] = None
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.upper == self.lower

    def to_dict(self):
        data = {
            "route": self.route,
            "equal": self.equal,
            "upper": self.upper.to_dict(),
            "lower": self.lower.to_dict(),
            "details": dict(self.details),
        }
        if self.closed_form is not None:
            data["closed_form"] = self.closed_form.to_dict()
            data["closed_form_agrees"] = self.closed_form == self.upper
        return data


def _trivial_split(G: FiniteGroup) -> SemidirectSplit:
    return SemidirectSplit(G, Subgroup(tuple(range(G.order)), G), closure(G, []))


def abelian_lower_bound(k: FieldSpec, G: FiniteGroup, bound: int) -> ClassSubgroup:
    if G.order % 2 == 0:
        raise PreconditionError(f"{G.name}: lower bound needs odd order")
    return constructive_lower_bound(k, G, _trivial_split(G), ClassSubgroup.trivial(class_group(k)), bound).subgroup


def _aprime_lower(k: FieldSpec, tree: AprimeTree, bound: int) -> ClassSubgroup:
    G = tree.group
    if tree.kind == "abelian":
        return abelian_lower_bound(k, G, bound)
    if tree.kind == "semidirect":
        rt = _aprime_lower(k, tree.children[0], bound)
        return constructive_lower_bound(k, G, SemidirectSplit(G, tree.normal, tree.complement), rt, bound).subgroup
    ambient = class_group(k)
    left, right = tree.children
    lower_left = _aprime_lower(k, left, bound)
    lower_right = _aprime_lower(k, right, bound)
    return power_subgroup(lower_left, right.group.order, ambient).join(
        power_subgroup(lower_right, left.group.order, ambient))


def _split_lower(k: FieldSpec, G: FiniteGroup, H: Subgroup, K: Subgroup, bound: int) -> LowerBound:
    Kg, _ = subgroup_as_group(G, K, name=f"{G.name}/complement")
    rt = abelian_lower_bound(k, Kg, bound)
    return constructive_lower_bound(k, G, SemidirectSplit(G, H, K), rt, bound)


def max_normalizer_element(G: FiniteGroup) -> int:
    """Элемент порядка ℓ² с максимальным #(N/C), наименьший индекс при равенстве."""
    ell, _ = prime_power(G.order)
    best, best_q = None, 0
    for g in range(G.order):
        if G.element_order(g) != ell * ell:
            continue
        N, C = normalizer_centralizer(G, g)
        if N.order // C.order > best_q:
            best, best_q = g, N.order // C.order
    if best is None:
        raise PreconditionError(f"{G.name} has no element of order {ell * ell}")
    return best


def max_normalizer_formula(k: FieldSpec, G: FiniteGroup, bound: int = config.DEFAULT_PRIME_BOUND) -> ClassSubgroup:
    """W(k,E_{k,G,τ})^{((ℓ-1)/2)ℓ²} для τ порядка ℓ² с максимальным #(N/C)."""
    ell, _ = prime_power(G.order)
    tau = max_normalizer_element(G)
    W = w_subgroup(k, e_field(k, G, tau), bound).subgroup
    return power_subgroup(W, (ell - 1) // 2 * ell * ell, class_group(k))


def _type3_lower(k: FieldSpec, G: FiniteGroup, cls, bound: int, details: Dict[str, object]) -> Optional[ClassSubgroup]:
    ell = cls.ell
    ambient = class_group(k)
    projector = cls.projector()
    failures = 0
    for h1 in cls.H.members:
        for h2 in cls.H.members:
            failures += bool(projector.check_pair(h1, h2))
    details["projection_case"] = projector.case
    details["projection_failures"] = failures
    W_tau = w_subgroup(k, e_field(k, G, cls.tau), bound).subgroup
    inside = W_tau.issubset(w_cyclotomic(k, ell, bound).subgroup)
    details["w_inside_w_ell"] = inside
    same_field = e_field_compare(e_field(k, projector.cover, projector.tau_tilde),
                                 e_field(k, G, cls.tau), k) == EQUAL
    details["cover_field_matches"] = same_field
    modulus = subgroup_exponent(W_tau)
    A, B = exponent_solver(ell, 2 * (ell + 1), 1, modulus)
    identity = type3_steinitz_identity(ell, A, B, modulus)
    details["identity"] = identity
    if failures or not inside or not same_field or not identity["equal"] or not identity["collapses"]:
        return None
    return power_subgroup(W_tau, (ell - 1) // 2 * ell * ell, ambient)


def very_good_certificate(k: FieldSpec, G: FiniteGroup, bound: int = config.DEFAULT_PRIME_BOUND) -> CertificateReport:
    if G.order % 2 == 0:
        raise PreconditionError(f"{G.name}: very good certificates need odd order")
    ambient = class_group(k)
    upper = cal_w(k, G, bound).subgroup
    trivial = ClassSubgroup.trivial(ambient)

    if G.is_abelian():
        return CertificateReport(upper, abelian_lower_bound(k, G, bound), ROUTE_ABELIAN)

    tree = is_aprime_group(G)
    if tree is not None:
        return CertificateReport(upper, _aprime_lower(k, tree, bound), ROUTE_APRIME, details={"tree": tree.to_dict()})

    factors = factorint(G.order)
    if len(factors) != 1 or next(iter(factors.values())) not in (3, 4):
        return CertificateReport(upper, trivial, ROUTE_UNCLASSIFIED)
    cls = classify_ell4(G, with_alternates=False)
    ell, n = cls.ell, cls.n
    details = {"classification": cls.to_dict()}

    if cls.kind == KIND_EXPONENT_L:
        lower = _split_lower(k, G, cls.H, cls.complement, bound)
        closed = power_subgroup(w_cyclotomic(k, ell, bound).subgroup, (ell - 1) // 2 * ell ** (n - 1), ambient)
        details["congruences"] = lower.congruences
        return CertificateReport(upper, lower.subgroup, ROUTE_EXPONENT_L, closed, details)
    if cls.kind == KIND_MODULAR:
        lower = _split_lower(k, G, cls.H, cls.complement, bound)
        closed = power_subgroup(w_cyclotomic(k, ell ** (n - 2), bound).subgroup, (ell - 1) // 2 * ell, ambient)
        details["congruences"] = lower.congruences
        return CertificateReport(upper, lower.subgroup, ROUTE_MAX_EXPONENT, closed, details)

    closed = max_normalizer_formula(k, G, bound)
    if cls.kind == KIND_TYPE1:
        lower = _split_lower(k, G, cls.H, cls.complement, bound)
        return CertificateReport(upper, lower.subgroup, "type1", closed, details)
    if cls.kind == KIND_TYPE2:
        lower = _split_lower(k, G, closure(G, [cls.tau]), cls.complement, bound)
        return CertificateReport(upper, lower.subgroup, "type2", closed, details)
    if cls.kind == KIND_TYPE3:
        lower = _type3_lower(k, G, cls, bound, details)
        return CertificateReport(upper, lower if lower is not None else trivial, "type3", closed, details)
    return CertificateReport(upper, trivial, ROUTE_UNCLASSIFIED, details=details)


# ---------------------
# Башни полей
# ---------------------

@dataclass
class NormMap:
    """Объявленный гомоморфизм Cl(k₁) → Cl(k): образы стандартных образующих источника."""
    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    images: Tuple[IdealClass, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise PreconditionError(f"norm map needs {self.source.rank} images, got {len(self.images)}")
        self.images = tuple(self.target.reduce(v) for v in self.images)
        for d, v in zip(self.source.divisors, self.images):
            if any(self.target.scale(v, d)):
                raise PreconditionError(f"norm map image {v} is not killed by {d}: not a homomorphism")

    def apply(self, x: Sequence[int]) -> IdealClass:
        total = self.target.zero
        for c, v in zip(self.source.reduce(x), self.images):
            total = self.target.add(total, self.target.scale(v, c))
        return total


def tower_steinitz(st_k1_over_k: Sequence[int], h_order: int, norm_map: NormMap,
                   st_K_over_k1: Sequence[int]) -> IdealClass:
    """st(K/k) = st(k₁/k)^{#H} · N_{k₁/k}(st(K/k₁))."""
    target = norm_map.target
    return target.add(target.scale(st_k1_over_k, h_order), norm_map.apply(st_K_over_k1))
