# classgroup.py
"""
Конечные абелевы группы и решётка их подгрупп, полуцелые степени A^t,
группы классов мнимых квадратичных полей через бинарные квадратичные формы,
поток (норма простого, класс) и подгруппы норм W(k,E).

Подгруппа B = Z^r / diag(d) хранится как решётка L, diag(d)Z^r ⊆ L ⊆ Z^r,
в эрмитовой нормальной форме по столбцам (верхнетреугольная r×r), так что
равенство подгрупп это равенство базисов.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import product
from math import gcd, lcm, prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix, factorint, primerange, primefactors, sqrt_mod
from sympy.core.intfunc import igcdex
from sympy.matrices.normalforms import hermite_normal_form

import config
from cyclo import EFieldDescriptor, FieldSpec, field_discriminant, gal_subgroup, kronecker
from errors import DeclaredDataError, PreconditionError
from group_core import FiniteGroup, closure
from models import ResidueSubgroup, fraction_to_json

logger = logging.getLogger(__name__)

IdealClass = Tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    divisors: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "divisors", tuple(int(d) for d in self.divisors))
        for i, d in enumerate(self.divisors):
            if d < 1:
                raise PreconditionError(f"invariant factors must be positive, got {self.divisors}")
            if i + 1 < len(self.divisors) and self.divisors[i + 1] % d:
                raise PreconditionError(f"invariant factors must divide each other, got {self.divisors}")

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def order(self) -> int:
        return prod(self.divisors)

    @property
    def exponent(self) -> int:
        return self.divisors[-1] if self.divisors else 1

    def reduce(self, v: Sequence[int]) -> IdealClass:
        if len(v) != self.rank:
            raise PreconditionError(f"class vector {tuple(v)} has wrong length for divisors {self.divisors}")
        return tuple(int(x) % d for x, d in zip(v, self.divisors))

    def add(self, u, v) -> IdealClass:
        return self.reduce([a + b for a, b in zip(u, v)])

    def scale(self, v, k: int) -> IdealClass:
        return self.reduce([k * a for a in v])

    @property
    def zero(self) -> IdealClass:
        return tuple(0 for _ in self.divisors)

    def elements(self):
        return product(*(range(d) for d in self.divisors))

    def element_order(self, v) -> int:
        v = self.reduce(v)
        return reduce(lcm, (d // gcd(x, d) for x, d in zip(v, self.divisors)), 1)

    def to_dict(self):
        return {"divisors": list(self.divisors), "order": self.order}


def _hnf_rows(ambient: FiniteAbelianGroup, columns: List[List[int]]) -> Tuple[Tuple[int, ...], ...]:
    r = ambient.rank
    cols = [list(c) for c in columns] + [[d if i == j else 0 for i in range(r)] for j, d in enumerate(ambient.divisors)]
    M = Matrix(r, len(cols), lambda i, j: cols[j][i])
    H = hermite_normal_form(M)
    H = H[:, H.cols - r:]
    return tuple(tuple(int(H[i, j]) for j in range(r)) for i in range(r))


def _integer_columns(M: Matrix) -> List[List[int]]:
    cols = []
    for j in range(M.cols):
        col = []
        for i in range(M.rows):
            x = M[i, j]
            if x.q != 1:
                raise PreconditionError("dual lattice basis is not integral")
            col.append(int(x))
        cols.append(col)
    return cols


@dataclass(frozen=True)
class ClassSubgroup:
    ambient: FiniteAbelianGroup
    basis: Tuple[Tuple[int, ...], ...]

    @classmethod
    def generated(cls, ambient: FiniteAbelianGroup, gens: Iterable[Sequence[int]]) -> "ClassSubgroup":
        if ambient.rank == 0:
            return cls(ambient, ())
        columns = [list(ambient.reduce(g)) for g in gens]
        return cls(ambient, _hnf_rows(ambient, [c for c in columns if any(c)]))

    @classmethod
    def trivial(cls, ambient: FiniteAbelianGroup) -> "ClassSubgroup":
        return cls.generated(ambient, [])

    @classmethod
    def full(cls, ambient: FiniteAbelianGroup) -> "ClassSubgroup":
        return cls.generated(ambient, [[1 if i == j else 0 for i in range(ambient.rank)] for j in range(ambient.rank)])

    @property
    def order(self) -> int:
        return self.ambient.order // prod(self.basis[i][i] for i in range(self.ambient.rank))

    def generators(self) -> List[IdealClass]:
        r = self.ambient.rank
        out = []
        for j in range(r):
            v = self.ambient.reduce([self.basis[i][j] for i in range(r)])
            if any(v):
                out.append(v)
        return out

    def contains(self, v: Sequence[int]) -> bool:
        r = self.ambient.rank
        if len(v) != r:
            raise PreconditionError(f"class vector {tuple(v)} has wrong length for divisors {self.ambient.divisors}")
        x = [0] * r
        for i in reversed(range(r)):
            rest = int(v[i]) - sum(self.basis[i][j] * x[j] for j in range(i + 1, r))
            if rest % self.basis[i][i]:
                return False
            x[i] = rest // self.basis[i][i]
        return True

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def _same_ambient(self, other: "ClassSubgroup"):
        if self.ambient != other.ambient:
            raise PreconditionError("subgroups live in different ambient groups")

    def join(self, other: "ClassSubgroup") -> "ClassSubgroup":
        self._same_ambient(other)
        return ClassSubgroup.generated(self.ambient, self.generators() + other.generators())

    def add_element(self, v: Sequence[int]) -> "ClassSubgroup":
        if self.contains(v):
            return self
        return ClassSubgroup.generated(self.ambient, self.generators() + [tuple(v)])

    def issubset(self, other: "ClassSubgroup") -> bool:
        self._same_ambient(other)
        return all(other.contains(g) for g in self.generators())

    def index(self) -> int:
        return self.ambient.order // self.order

    def _dual_columns(self, k: int = 1) -> List[List[int]]:
        N = self.ambient.exponent
        W = Matrix(self.basis)
        return _integer_columns(W.inv().T * (N * k))

    def _from_dual(self, columns: List[List[int]]) -> "ClassSubgroup":
        r, N = self.ambient.rank, self.ambient.exponent
        V = Matrix(_hnf_rows(FiniteAbelianGroup((N,) * r), columns))
        return ClassSubgroup.generated(self.ambient, _integer_columns(V.inv().T * N))

    def meet(self, other: "ClassSubgroup") -> "ClassSubgroup":
        self._same_ambient(other)
        if self.ambient.rank == 0:
            return self
        return self._from_dual(self._dual_columns() + other._dual_columns())

    def preimage_under_multiplication(self, k: int) -> "ClassSubgroup":
        """{x ∈ B : kx ∈ self}"""
        if self.ambient.rank == 0:
            return self
        return self._from_dual(self._dual_columns(k))

    def scale(self, k: int) -> "ClassSubgroup":
        return ClassSubgroup.generated(self.ambient, [self.ambient.scale(g, k) for g in self.generators()])

    def elements(self) -> List[IdealClass]:
        return [v for v in self.ambient.elements() if self.contains(v)]

    def random_element(self, rng) -> IdealClass:
        v = self.ambient.zero
        for g in self.generators():
            v = self.ambient.add(v, self.ambient.scale(g, rng.randrange(self.ambient.exponent)))
        return v

    def to_dict(self):
        return {
            "order": self.order,
            "generators": [list(g) for g in self.generators()],
        }


def join_all(ambient: FiniteAbelianGroup, subgroups: Iterable[ClassSubgroup]) -> ClassSubgroup:
    gens: List[IdealClass] = []
    for S in subgroups:
        if S.ambient != ambient:
            raise PreconditionError("subgroups live in different ambient groups")
        gens.extend(S.generators())
    return ClassSubgroup.generated(ambient, gens)


def power_subgroup(A: ClassSubgroup, t, ambient: FiniteAbelianGroup) -> ClassSubgroup:
    """
    A^t, t ∈ ½ℕ. Целое t: t-е степени A. Полуцелое t: {x ∈ B : x² ∈ A^{2t}}.
    """
    t = Fraction(t)
    if t < 0:
        raise PreconditionError(f"power exponent must be non-negative, got {t}")
    if (2 * t).denominator != 1:
        raise PreconditionError(f"power exponent must be a half-integer, got {t}")
    if A.ambient != ambient:
        raise PreconditionError("half-integer powers need the ambient group of A")
    if t.denominator == 1:
        return A.scale(int(t))
    return A.scale(int(2 * t)).preimage_under_multiplication(2)


# ---------------------
# Квадратичные формы
# ---------------------

def _solve_mod(a: int, b: int, m: int) -> Tuple[int, int]:
    """a·x ≡ b (mod m): частное решение и шаг."""
    x, _, g = igcdex(a, m)
    q, r = divmod(b, g)
    if r:
        raise PreconditionError(f"{a}x = {b} has no solution mod {m}")
    return (q * x) % m, m // g


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def normalized(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        if -a < b <= a:
            return self
        r = (a - b) // (2 * a)
        return QuadForm(a, b + 2 * r * a, a * r * r + b * r + c)

    def reduced(self) -> "QuadForm":
        f = self.normalized()
        a, b, c = f.a, f.b, f.c
        while a > c or (a == c and b < 0):
            s = (c + b) // (c + c)
            a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
        return QuadForm(a, b, c).normalized()

    def is_reduced(self) -> bool:
        return abs(self.b) <= self.a <= self.c and (self.b >= 0 or (abs(self.b) != self.a and self.a != self.c))

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduced()

    def compose(self, other: "QuadForm") -> "QuadForm":
        # композиция по схеме "Explaining composition"
        a1, b1, c1 = self.reduced().as_tuple()
        a2, b2, c2 = other.reduced().as_tuple()
        g = (b2 + b1) // 2
        h = (b2 - b1) // 2
        w = gcd(gcd(a1, a2), g)
        j, r, s, t, u = w, 0, a1 // w, a2 // w, g // w
        k_temp, step = _solve_mod(t * u, h * u + s * c1, s * t)
        n, _ = _solve_mod(t * step, h - t * k_temp, s)
        k = k_temp + step * n
        l = (t * k - h) // s
        m = (t * u * k - h * u - s * c1) // (s * t)
        a3 = s * t - r * u
        b3 = (j * u + m * r) - (k * t + l * s)
        c3 = k * l - j * m
        return QuadForm(a3, b3, c3).reduced()

    def as_tuple(self) -> Tuple[int, int, int]:
        return self.a, self.b, self.c

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadForm:
    b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


def reduced_forms(D: int) -> List[QuadForm]:
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"{D} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2 or (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (a == c and b < 0) or gcd(gcd(a, b), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
        a += 1
    return forms


def prime_form(D: int, p: int) -> QuadForm:
    """Приведённая форма (p, b, c) с наименьшим корнем b² ≡ D (mod 4p)."""
    roots = sqrt_mod(D % (4 * p), 4 * p, all_roots=True)
    if not roots:
        raise PreconditionError(f"{p} is not represented by any form of discriminant {D}")
    b = min(roots)
    return QuadForm(p, b, (b * b - D) // (4 * p)).reduced()


def abelian_invariants(G: FiniteGroup) -> Tuple[Tuple[int, ...], List[int], Dict[int, IdealClass]]:
    """
    Инвариантные делители абелевой группы G, базис и координаты всех элементов.
    Делители считаются по числу решений x^{p^k} = 1, базис ищется перебором с возвратом.
    """
    if not G.is_abelian():
        raise PreconditionError(f"{G.name} is not abelian")
    orders = [int(o) for o in G.orders]
    components: List[List[int]] = []
    for p in primefactors(G.order):
        counts = [1]
        k = 1
        while True:
            cnt = sum(1 for o in orders if (p ** k) % o == 0)
            counts.append(cnt)
            if cnt == counts[-2]:
                break
            k += 1
        # число циклических слагаемых порядка ≥ p^i
        at_least = [0] + [factorint(counts[i] // counts[i - 1]).get(p, 0) for i in range(1, len(counts))]
        exps = []
        for i in range(1, len(at_least)):
            nxt = at_least[i + 1] if i + 1 < len(at_least) else 0
            exps.extend([i] * (at_least[i] - nxt))
        components.append(sorted((p ** e for e in exps), reverse=True))
    width = max((len(c) for c in components), default=0)
    divisors = []
    for i in range(width):
        divisors.append(prod(c[i] for c in components if i < len(c)))
    divisors = sorted(divisors)

    basis: List[int] = []

    def search(i: int, current) -> bool:
        if i < 0:
            return True
        d = divisors[i]
        for x in range(G.order):
            if orders[x] != d or x in current:
                continue
            nxt = closure(G, basis + [x])
            if nxt.order == current.order * d:
                basis.append(x)
                if search(i - 1, nxt):
                    return True
                basis.pop()
        return False

    if not search(len(divisors) - 1, closure(G, [])):
        raise PreconditionError(f"{G.name}: no basis for invariants {divisors}")
    basis.reverse()
    coords: Dict[int, IdealClass] = {}
    for vec in product(*(range(d) for d in divisors)):
        x = G.identity
        for g, e in zip(basis, vec):
            x = G.mult(x, G.power(g, e))
        coords[x] = tuple(vec)
    return tuple(divisors), basis, coords


@dataclass
class QuadraticClassGroup:
    d: int
    discriminant: int
    ambient: FiniteAbelianGroup
    forms: List[QuadForm]
    vector_of: Dict[QuadForm, IdealClass] = field(repr=False)
    form_of: Dict[IdealClass, QuadForm] = field(repr=False)

    def class_of(self, f: QuadForm) -> IdealClass:
        return self.vector_of[f.reduced()]

    def to_dict(self):
        return {
            "d": self.d,
            "discriminant": self.discriminant,
            "divisors": list(self.ambient.divisors),
            "forms": {",".join(map(str, v)): str(f) for v, f in sorted(self.form_of.items())},
        }


@lru_cache(maxsize=None)
def class_group_imag_quadratic(d: int) -> QuadraticClassGroup:
    D = field_discriminant(d)
    forms = reduced_forms(D)
    principal = principal_form(D)
    forms.sort(key=lambda f: (f != principal, f.a, f.b))
    index = {f: i for i, f in enumerate(forms)}
    table = [[index[f.compose(g)] for g in forms] for f in forms]
    G = FiniteGroup(table, list(range(1, len(forms))), name=f"Cl({D})")
    divisors, _, coords = abelian_invariants(G)
    vector_of = {forms[i]: v for i, v in coords.items()}
    form_of = {v: f for f, v in vector_of.items()}
    logger.info("Class group of Q(sqrt(-%d)): h = %d, invariants %s", d, len(forms), divisors)
    return QuadraticClassGroup(d, D, FiniteAbelianGroup(divisors), forms, vector_of, form_of)


def class_group(k: FieldSpec) -> FiniteAbelianGroup:
    if k.kind == "rationals":
        return FiniteAbelianGroup(())
    if k.kind == "imag_quadratic":
        return class_group_imag_quadratic(k.d).ambient
    return FiniteAbelianGroup(k.class_group)


@lru_cache(maxsize=None)
def _stream(k: FieldSpec, bound: int) -> Tuple[Tuple[int, IdealClass], ...]:
    if bound < 2:
        raise PreconditionError(f"prime bound must be at least 2, got {bound}")
    entries: List[Tuple[int, IdealClass]] = []
    if k.kind == "rationals":
        entries = [(int(p), ()) for p in primerange(2, bound + 1)]
    elif k.kind == "imag_quadratic":
        cg = class_group_imag_quadratic(k.d)
        D = cg.discriminant
        zero = cg.ambient.zero
        for p in primerange(2, bound + 1):
            p = int(p)
            chi = kronecker(D, p)
            if chi == 0:
                continue
            if chi == -1:
                entries.append((p * p, zero))
                continue
            x = cg.class_of(prime_form(D, p))
            entries.append((p, x))
            entries.append((p, cg.ambient.scale(x, -1)))
    else:
        ambient = class_group(k)
        entries = [(int(n), ambient.reduce(v)) for n, v in k.prime_norm_classes if n <= bound]
        if not entries:
            raise DeclaredDataError(f"{k.label}: declared prime-norm table is empty below {bound}")
    return tuple(sorted(entries))


def prime_norm_class_stream(k: FieldSpec, bound: int) -> List[Tuple[int, IdealClass]]:
    return list(_stream(k, bound))


@dataclass
class WReport:
    subgroup: ClassSubgroup
    source: str
    heuristic: bool
    stable: bool
    stable_after: Optional[int] = None
    declared_agrees: Optional[bool] = None

    @property
    def order(self) -> int:
        return self.subgroup.order

    def to_dict(self):
        data = self.subgroup.to_dict()
        data.update({
            "source": self.source,
            "heuristic": self.heuristic,
            "stable": self.stable,
            "stable_after": self.stable_after,
        })
        if self.declared_agrees is not None:
            data["declared_agrees"] = self.declared_agrees
        return data


def _stream_subgroup(k: FieldSpec, E: EFieldDescriptor, T: ResidueSubgroup, ambient: FiniteAbelianGroup,
                     bound: int) -> Tuple[ClassSubgroup, Optional[int], bool]:
    W = ClassSubgroup.trivial(ambient)
    stable_after = None
    # окно считается в простых: у расщеплённого простого две записи с одной нормой
    since_change = 0
    last_norm = None
    for norm, x in _stream(k, bound):
        if gcd(norm, E.m) != 1:
            continue
        a = norm % E.m
        if a not in T:
            raise DeclaredDataError(f"{k.label}: norm {norm} mod {E.m} is outside T_{E.m}")
        f = E.s.coset_order(a, T)
        v = ambient.scale(x, f)
        if W.contains(v):
            if norm != last_norm:
                since_change += 1
                last_norm = norm
            continue
        W = W.add_element(v)
        stable_after = norm
        since_change = 0
        last_norm = norm
    return W, stable_after, since_change >= config.STABILITY_WINDOW


@lru_cache(maxsize=None)
def _w_subgroup(k: FieldSpec, m: int, s: Tuple[int, ...], bound: int) -> WReport:
    E = EFieldDescriptor(m, ResidueSubgroup(m, s))
    ambient = class_group(k)
    T = gal_subgroup(k, m)
    if not E.s.issubset(T):
        raise PreconditionError(f"descriptor subgroup {list(s)} mod {m} is not inside T_{m}")
    if ambient.order == 1:
        return WReport(ClassSubgroup.trivial(ambient), "trivial", heuristic=False, stable=True)
    for entry in k.declared_w:
        if entry.m == m and tuple(sorted(x % m for x in entry.s)) == s:
            declared = ClassSubgroup.generated(ambient, entry.generators)
            agrees = None
            if k.prime_norm_classes:
                computed, _, _ = _stream_subgroup(k, E, T, ambient, bound)
                agrees = computed == declared
                if not agrees:
                    raise DeclaredDataError(
                        f"{k.label}: declared W for (m={m}, S={list(s)}) has order {declared.order}, "
                        f"the prime stream gives {computed.order}")
            return WReport(declared, "declared", heuristic=False, stable=True, declared_agrees=agrees)
    if E.s == T:
        return WReport(ClassSubgroup.full(ambient), "base_field", heuristic=False, stable=True)
    W, stable_after, stable = _stream_subgroup(k, E, T, ambient, bound)
    full = W.order == ambient.order
    if not stable and not full:
        logger.warning("W(%s, m=%d, S=%s) not stable at bound %d", k.label, m, list(s), bound)
    return WReport(W, "stream", heuristic=not full, stable=stable or full, stable_after=stable_after)


def w_subgroup(k: FieldSpec, E: EFieldDescriptor, bound: int = config.DEFAULT_PRIME_BOUND) -> WReport:
    return _w_subgroup(k, E.m, E.s.members, bound)


def w_cyclotomic(k: FieldSpec, m: int, bound: int = config.DEFAULT_PRIME_BOUND) -> WReport:
    """W(k,m) = W(k, k(ζ_m))."""
    return w_subgroup(k, EFieldDescriptor(m, ResidueSubgroup.trivial(m)), bound)


def cyclotomic_power_inclusion(k: FieldSpec, m: int, n: int, bound: int = config.DEFAULT_PRIME_BOUND) -> bool:
    """W(k,m)^n ⊆ W(k,mn), если каждый простой делитель n делит m."""
    if m < 1 or n < 1 or any(m % q for q in primefactors(n)):
        raise PreconditionError(f"every prime dividing n={n} must divide m={m}")
    ambient = class_group(k)
    lhs = power_subgroup(w_cyclotomic(k, m, bound).subgroup, n, ambient)
    return lhs.issubset(w_cyclotomic(k, m * n, bound).subgroup)


def exponent_to_json(t) -> object:
    return fraction_to_json(Fraction(t))
