# cyclo.py
"""
Циклотомические данные поля k: T_m(k) = образ Gal(k(ζ_m)/k) в (Z/mZ)^×,
и дескрипторы полей E = (m, S), S = T_m(k) ∩ Φ_τ (E это неподвижное поле S в k(ζ_m)).
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Optional, Tuple

from sympy import factorint, jacobi_symbol

from errors import DeclaredDataError, EngineAssertion, PreconditionError
from group_core import FiniteGroup, normalizer_centralizer, phi_image
from models import ResidueSubgroup

logger = logging.getLogger(__name__)

EQUAL = "equal"
SUBFIELD = "subfield"        # E₁ ⊊ E₂
SUPERFIELD = "superfield"    # E₂ ⊊ E₁
INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class DeclaredW:
    m: int
    s: Tuple[int, ...]
    generators: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class FieldSpec:
    """
    kind: rationals | imag_quadratic | declared.
    Для declared: gal это пары (m, T_m), class_group это инвариантные делители,
    prime_norm_classes это пары (норма, вектор класса).
    """
    kind: str
    d: Optional[int] = None
    gal: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    class_group: Tuple[int, ...] = ()
    prime_norm_classes: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    declared_w: Tuple[DeclaredW, ...] = ()
    name: Optional[str] = None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "imag_quadratic":
            return f"Q(sqrt(-{self.d}))"
        return "Q" if self.kind == "rationals" else "declared"

    def to_dict(self):
        data = {"kind": self.kind, "name": self.label}
        if self.d is not None:
            data["d"] = self.d
        return data


@dataclass(frozen=True)
class EFieldDescriptor:
    m: int
    s: ResidueSubgroup

    def __post_init__(self):
        if self.s.modulus != self.m:
            raise PreconditionError(f"descriptor modulus {self.m} differs from subgroup modulus {self.s.modulus}")

    def to_dict(self):
        return {"m": self.m, "s": list(self.s.members)}


def field_discriminant(d: int) -> int:
    if d < 1 or any(e > 1 for e in factorint(d).values()):
        raise PreconditionError(f"d must be a squarefree positive integer, got {d}")
    return -d if d % 4 == 3 else -4 * d


def kronecker(D: int, a: int) -> int:
    """Символ Кронекера (D|a) для a > 0."""
    if a < 1:
        raise PreconditionError(f"kronecker symbol needs a positive lower argument, got {a}")
    result = 1
    while a % 2 == 0:
        a //= 2
        if D % 2 == 0:
            return 0
        result *= 1 if D % 8 in (1, 7) else -1
    if a == 1:
        return result
    if gcd(D, a) != 1:
        return 0
    return result * int(jacobi_symbol(D % a, a))


@lru_cache(maxsize=None)
def gal_subgroup(k: FieldSpec, m: int) -> ResidueSubgroup:
    if m < 1:
        raise PreconditionError(f"modulus must be positive, got {m}")
    if k.kind == "rationals":
        return ResidueSubgroup.units(m)
    if k.kind == "imag_quadratic":
        D = field_discriminant(k.d)
        L = lcm(abs(D), m)
        return ResidueSubgroup.from_residues(
            m, (a for a in range(1, L + 1) if gcd(a, L) == 1 and kronecker(D, a) == 1))
    if k.kind == "declared":
        table = dict(k.gal)
        if m in table:
            return ResidueSubgroup.from_residues(m, table[m])
        for big in sorted(table):
            if big % m == 0:
                return ResidueSubgroup.from_residues(m, table[big])
        if m <= 2:
            return ResidueSubgroup.units(m)
        raise DeclaredDataError(f"{k.label}: no Galois data for modulus {m} or any multiple of it")
    raise PreconditionError(f"unknown field kind {k.kind!r}")


def validate_declared(k: FieldSpec):
    """Согласованность объявленных T_m: подгруппы, и редукция T_m даёт T_m' при m' | m."""
    if k.kind != "declared":
        return
    table = {m: ResidueSubgroup.from_residues(m, s) for m, s in k.gal}
    for m, T in table.items():
        try:
            T.check_closed()
        except PreconditionError as e:
            raise DeclaredDataError(f"{k.label}: T_{m} is not a subgroup ({e})") from e
    for m, T in table.items():
        for m2, T2 in table.items():
            if m != m2 and m % m2 == 0 and T.reduce(m2) != T2:
                raise DeclaredDataError(f"{k.label}: T_{m} does not reduce onto T_{m2}")
    logger.debug("Declared field %s: %d moduli consistent", k.label, len(table))


def validate_field_for_group(k: FieldSpec, G: FiniteGroup):
    """Для объявленного поля проверяет, что есть T_m для всех порядков элементов и их lcm."""
    if k.kind != "declared":
        return
    orders = sorted({int(o) for o in G.orders} - {1})
    for i, a in enumerate(orders):
        for b in orders[i:]:
            gal_subgroup(k, lcm(a, b))


def _e_field_uncached(k: FieldSpec, G: FiniteGroup, tau: int) -> EFieldDescriptor:
    phi = phi_image(G, tau)
    T = gal_subgroup(k, phi.modulus)
    return EFieldDescriptor(phi.modulus, T.intersect(phi))


def e_field(k: FieldSpec, G: FiniteGroup, tau: int) -> EFieldDescriptor:
    cache = G.__dict__.setdefault("_efield_cache", {})
    key = (k, int(tau))
    if key not in cache:
        cache[key] = _e_field_uncached(k, G, tau)
    return cache[key]


def lift(k: FieldSpec, E: EFieldDescriptor, M: int) -> ResidueSubgroup:
    """Прообраз S в T_M(k) при редукции M → m."""
    if M % E.m:
        raise PreconditionError(f"{E.m} does not divide {M}")
    T_M = gal_subgroup(k, M)
    return ResidueSubgroup(M, tuple(a for a in T_M.members if a % E.m in E.s.members))


def e_field_compare(E1: EFieldDescriptor, E2: EFieldDescriptor, k: FieldSpec) -> str:
    M = lcm(E1.m, E2.m)
    S1, S2 = lift(k, E1, M), lift(k, E2, M)
    sub12 = S2.issubset(S1)      # E₁ ⊆ E₂
    sub21 = S1.issubset(S2)
    if sub12 and sub21:
        return EQUAL
    if sub12:
        return SUBFIELD
    if sub21:
        return SUPERFIELD
    return INCOMPARABLE


def e_tau_ell_group(G: FiniteGroup, tau: int) -> int:
    """E_{k,G,τ} = k(ζ_e) для ℓ-группы, e = o(τ)/#(N/C)."""
    primes = factorint(G.order)
    if len(primes) != 1:
        raise PreconditionError(f"{G.name} is not an ell-group (order {G.order})")
    ell = next(iter(primes))
    if tau == G.identity:
        raise PreconditionError("e_tau is undefined for the identity element")
    N, C = normalizer_centralizer(G, tau)
    o = G.element_order(tau)
    e = o // (N.order // C.order)
    if e % ell:
        raise EngineAssertion(f"{G.name}: e_tau = {e} is not divisible by {ell}")
    expected = ResidueSubgroup.from_residues(o, (a for a in range(1, o + 1) if a % e == 1 % e and gcd(a, o) == 1))
    if phi_image(G, tau) != expected:
        raise EngineAssertion(f"{G.name}: image of the conjugation character at {tau} is not 1 + {e}Z")
    return e
