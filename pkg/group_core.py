# group_core.py
"""
Движок конечных групп на явных таблицах Кэли.

Элементы группы это индексы 0..n-1, таблица умножения хранится в numpy.
Все поиски (нормализаторы, дополнения, нормальные абелевы подгруппы)
исчерпывающие, ничьи разрешаются наименьшим индексом.

Соглашения по индексам в конструкциях:
- циклическая C(n): индекс i это g^i;
- прямое A×B и полупрямое H⋊K: индекс a*|B| + b (соответственно h*|K| + k);
- метациклическая ⟨τ,σ⟩: индекс i*K + j это τ^i σ^j;
- подстановочная: порядок обхода в ширину от тождественной подстановки.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

import config
from errors import GroupConstructionError, OrderCapError, PreconditionError, SpecError
from models import ResidueSubgroup

logger = logging.getLogger(__name__)

GroupElement = int


@dataclass
class GroupSpec:
    """
    Описание группы до построения. params зависят от kind:
    cyclic {n}; perm {degree, generators}; direct {factors}; semidirect {h, g, action | power};
    heisenberg {ell}; modular {ell, n}; two_gen_l2 {ell, a, c}; metacyclic {m, k, r, s}.
    """
    kind: str
    params: Dict[str, object] = field(default_factory=dict)
    name: Optional[str] = None


class FiniteGroup:
    """
    Конечная группа как таблица Кэли.

    Ассоциативность проверяется точно тестом Лайта по порождающим:
    (xg)y = x(gy) для всех x, y и всех порождающих g.
    """

    def __init__(self, table, generators: Sequence[int], name: str = "group",
                 labels: Optional[List[str]] = None, check: bool = True):
        table = np.asarray(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupConstructionError(f"{name}: multiplication table must be a non-empty square array")
        n = table.shape[0]
        if n > config.ORDER_CAP:
            raise OrderCapError(f"{name}: order {n} exceeds the cap {config.ORDER_CAP}")
        self.table = table
        self.order = n
        self.name = name
        self.labels = labels
        self.generators = tuple(int(g) for g in generators)
        self.split: Optional["SemidirectSplit"] = None
        self._orders = None
        self._phi_cache: Dict[int, ResidueSubgroup] = {}
        self._nc_cache: Dict[int, Tuple["Subgroup", "Subgroup"]] = {}

        idx = np.arange(n)
        left_ids = np.flatnonzero((table == idx).all(axis=1))
        if left_ids.size == 0:
            raise GroupConstructionError(f"{name}: no identity element")
        self.identity = int(left_ids[0])
        if not np.array_equal(table[:, self.identity], idx):
            raise GroupConstructionError(f"{name}: identity is not two-sided")
        self.inverse = np.argmax(table == self.identity, axis=1).astype(np.int32)
        if check:
            self._check_axioms()

    def _check_axioms(self):
        n, t = self.order, self.table
        idx = np.arange(n)
        if not (np.array_equal(np.sort(t, axis=1), np.broadcast_to(idx, (n, n)))
                and np.array_equal(np.sort(t, axis=0), np.broadcast_to(idx[:, None], (n, n)))):
            raise GroupConstructionError(f"{self.name}: table is not a Latin square")
        if not np.array_equal(t[self.inverse, idx], np.full(n, self.identity)):
            raise GroupConstructionError(f"{self.name}: inverses are not two-sided")
        if n > 1 and closure(self, self.generators).order != n:
            raise GroupConstructionError(f"{self.name}: declared generators do not generate the group")
        for g in self.generators:
            left = t[t[:, g], :]
            right = t[:, t[g, :]]
            if not np.array_equal(left, right):
                raise GroupConstructionError(f"{self.name}: multiplication is not associative")

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def mult(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return int(self.table[a, b])

    def inv(self, a: GroupElement) -> GroupElement:
        return int(self.inverse[a])

    def conj(self, g: GroupElement, x: GroupElement) -> GroupElement:
        """g x g⁻¹"""
        return int(self.table[self.table[g, x], self.inverse[g]])

    def label(self, g: GroupElement) -> str:
        if self.labels:
            return self.labels[g]
        return str(g)

    @property
    def orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.order
            idx = np.arange(n)
            orders = np.zeros(n, dtype=np.int64)
            cur = idx.copy()
            t = 1
            while True:
                hit = (cur == self.identity) & (orders == 0)
                orders[hit] = t
                if orders.all():
                    break
                cur = self.table[cur, idx]
                t += 1
            self._orders = orders
        return self._orders

    def element_order(self, g: GroupElement) -> int:
        return int(self.orders[g])

    def power(self, g: GroupElement, k: int) -> GroupElement:
        k %= int(self.orders[g])
        result, base = self.identity, int(g)
        while k:
            if k & 1:
                result = int(self.table[result, base])
            base = int(self.table[base, base])
            k >>= 1
        return result

    def cyclic_powers(self, g: GroupElement) -> List[GroupElement]:
        """[1, g, g², ..., g^{o-1}]"""
        out = [self.identity]
        x = int(g)
        while x != self.identity:
            out.append(x)
            x = int(self.table[x, g])
        return out

    def conjugates_of(self, x: GroupElement) -> np.ndarray:
        """Массив g x g⁻¹ по всем g (индекс массива это g)."""
        return self.table[self.table[:, x], self.inverse]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


@dataclass(frozen=True)
class Subgroup:
    members: Tuple[int, ...]
    parent: FiniteGroup = field(compare=False, hash=False, repr=False)
    _set: frozenset = field(init=False, compare=False, hash=False, repr=False, default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "_set", frozenset(self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return int(g) in self._set

    def as_array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)

    def is_abelian(self) -> bool:
        m = self.as_array()
        sub = self.parent.table[np.ix_(m, m)]
        return bool(np.array_equal(sub, sub.T))

    def to_dict(self):
        return {"order": self.order, "members": list(self.members)}


@dataclass
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: np.ndarray

    def verify(self) -> bool:
        img = np.asarray(self.images)
        if img.shape != (self.source.order,):
            return False
        if int(img[self.source.identity]) != self.target.identity:
            return False
        lhs = img[self.source.table]
        rhs = self.target.table[img[:, None], img[None, :]]
        return bool(np.array_equal(lhs, rhs))

    def __call__(self, x: GroupElement) -> GroupElement:
        return int(self.images[x])

    def kernel(self) -> Subgroup:
        return Subgroup(tuple(int(x) for x in np.flatnonzero(self.images == self.target.identity)), self.source)

    def image(self) -> Subgroup:
        return Subgroup(tuple(int(x) for x in np.unique(self.images)), self.target)

    def is_surjective(self) -> bool:
        return self.image().order == self.target.order


@dataclass
class SemidirectSplit:
    """G = normal ⋊ complement, обе подгруппы внутри G."""
    group: FiniteGroup
    normal: Subgroup
    complement: Subgroup

    def normal_group(self) -> Tuple[FiniteGroup, np.ndarray]:
        return subgroup_as_group(self.group, self.normal)

    def complement_group(self) -> Tuple[FiniteGroup, np.ndarray]:
        return subgroup_as_group(self.group, self.complement)


# ---------------------
# Подгруппы
# ---------------------

def closure(G: FiniteGroup, gens: Sequence[int]) -> Subgroup:
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    if gens.size == 0:
        return Subgroup((G.identity,), G)
    frontier = np.array([G.identity])
    while frontier.size:
        cand = np.unique(G.table[np.ix_(frontier, gens)].ravel())
        cand = cand[~mask[cand]]
        mask[cand] = True
        frontier = cand
    return Subgroup(tuple(int(x) for x in np.flatnonzero(mask)), G)


def is_normal(G: FiniteGroup, S: Subgroup) -> bool:
    if not G.generators:
        return True
    m = S.as_array()
    gens = np.asarray(G.generators)
    conj = G.table[G.table[np.ix_(gens, m)], G.inverse[gens][:, None]]
    return bool(np.isin(conj, m).all())


def center(G: FiniteGroup) -> Subgroup:
    mask = (G.table == G.table.T).all(axis=1)
    return Subgroup(tuple(int(x) for x in np.flatnonzero(mask)), G)


def exponent(G: FiniteGroup) -> int:
    return int(np.lcm.reduce(G.orders))


def conjugate_subgroup(G: FiniteGroup, S: Subgroup, g: GroupElement) -> Subgroup:
    m = S.as_array()
    conj = G.table[G.table[g, m], G.inverse[g]]
    return Subgroup(tuple(int(x) for x in np.unique(conj)), G)


def subgroup_as_group(G: FiniteGroup, S: Subgroup, name: Optional[str] = None) -> Tuple[FiniteGroup, np.ndarray]:
    """Самостоятельная группа на элементах S и вложение локальный индекс -> индекс в G."""
    m = S.as_array()
    local = np.full(G.order, -1, dtype=np.int64)
    local[m] = np.arange(m.size)
    table = local[G.table[np.ix_(m, m)]]
    gens: List[int] = []
    current = closure(G, [])
    for x in S.members:
        if current.order == S.order:
            break
        if x not in current:
            gens.append(x)
            current = closure(G, gens)
    labels = [G.label(int(x)) for x in m] if G.labels else None
    sub = FiniteGroup(table, [int(local[g]) for g in gens], name=name or f"{G.name}|{S.order}", labels=labels)
    return sub, m


def quotient(G: FiniteGroup, N: Subgroup) -> Tuple[FiniteGroup, GroupHom]:
    if not is_normal(G, N):
        raise PreconditionError(f"{G.name}: quotient by a non-normal subgroup")
    n_arr = N.as_array()
    coset_id = np.full(G.order, -1, dtype=np.int64)
    reps: List[int] = []
    for g in range(G.order):
        if coset_id[g] < 0:
            coset_id[G.table[g, n_arr]] = len(reps)
            reps.append(g)
    reps_arr = np.asarray(reps)
    table = coset_id[G.table[np.ix_(reps_arr, reps_arr)]]
    gens = sorted({int(coset_id[g]) for g in G.generators} - {int(coset_id[G.identity])})
    Q = FiniteGroup(table, gens, name=f"{G.name}/{N.order}")
    return Q, GroupHom(G, Q, coset_id)


def normalizer_centralizer(G: FiniteGroup, tau: GroupElement) -> Tuple[Subgroup, Subgroup]:
    tau = int(tau)
    if tau not in G._nc_cache:
        conj = G.conjugates_of(tau)
        cyc = np.asarray(G.cyclic_powers(tau))
        N = Subgroup(tuple(int(x) for x in np.flatnonzero(np.isin(conj, cyc))), G)
        C = Subgroup(tuple(int(x) for x in np.flatnonzero(conj == tau)), G)
        G._nc_cache[tau] = (N, C)
    return G._nc_cache[tau]


def phi_image(G: FiniteGroup, tau: GroupElement) -> ResidueSubgroup:
    """Φ_τ: показатели α с gτg⁻¹ = τ^α по g из нормализатора."""
    tau = int(tau)
    if tau == G.identity:
        raise PreconditionError("phi_image is undefined for the identity element")
    if tau not in G._phi_cache:
        powers = G.cyclic_powers(tau)
        pos = np.full(G.order, -1, dtype=np.int64)
        pos[powers] = np.arange(len(powers))
        vals = pos[G.conjugates_of(tau)]
        vals = np.unique(vals[vals >= 0])
        G._phi_cache[tau] = ResidueSubgroup(len(powers), tuple(int(a) for a in vals))
    return G._phi_cache[tau]


def ell_part(G: FiniteGroup, sigma: GroupElement, ell: int) -> GroupElement:
    if not isprime(ell):
        raise PreconditionError(f"{ell} is not prime")
    o = G.element_order(sigma)
    o_ell = 1
    while o % (o_ell * ell) == 0:
        o_ell *= ell
    return G.power(sigma, o // o_ell)


def ell_power_elements(G: FiniteGroup, ell: int) -> List[GroupElement]:
    if not isprime(ell):
        raise PreconditionError(f"{ell} is not prime")
    o = G.orders.copy()
    while True:
        div = (o % ell == 0)
        if not div.any():
            break
        o = np.where(div, o // ell, o)
    return [int(x) for x in np.flatnonzero(o == 1)]


def conjugacy_classes(G: FiniteGroup) -> List[Tuple[int, ...]]:
    seen = np.zeros(G.order, dtype=bool)
    classes = []
    for g in range(G.order):
        if not seen[g]:
            cls = np.unique(G.conjugates_of(g))
            seen[cls] = True
            classes.append(tuple(int(x) for x in cls))
    return classes


def cyclic_class_representatives(G: FiniteGroup, include_identity: bool = False) -> List[GroupElement]:
    """
    По одному представителю на класс сопряжённости циклических подгрупп:
    наименьший индекс среди порождающих всех сопряжённых ⟨τ⟩.
    """
    covered = np.zeros(G.order, dtype=bool)
    reps = []
    for g in range(G.order):
        if covered[g]:
            continue
        if g != G.identity or include_identity:
            reps.append(g)
        o = G.element_order(g)
        units = [u for u in range(1, o + 1) if gcd(u, o) == 1]
        for c in np.unique(G.conjugates_of(g)):
            for u in units:
                covered[G.power(int(c), u)] = True
    return reps


def _class_of(G: FiniteGroup, x: int) -> List[int]:
    return [int(c) for c in np.unique(G.conjugates_of(x))]


def normal_subgroups(G: FiniteGroup) -> List[Subgroup]:
    """Все нормальные подгруппы: обход нормальных замыканий, начиная с тривиальной."""
    reps = cyclic_class_representatives(G)
    start = closure(G, [])
    found = {start.members: (start, [])}
    queue = deque([start.members])
    while queue:
        key = queue.popleft()
        N, gens = found[key]
        for x in reps:
            if x in N:
                continue
            new_gens = gens + _class_of(G, x)
            M = closure(G, new_gens)
            if M.members not in found:
                found[M.members] = (M, new_gens)
                queue.append(M.members)
    return sorted((s for s, _ in found.values()), key=lambda s: (s.order, s.members))


def normal_abelian_subgroups(G: FiniteGroup, target_order: int, limit: Optional[int] = None) -> List[Subgroup]:
    """
    Нормальные абелевы подгруппы ровно порядка target_order.
    Поиск в глубину по нормальным замыканиям классов циклических подгрупп;
    limit обрывает поиск после стольких находок.
    """
    if target_order < 1 or G.order % target_order:
        raise PreconditionError(f"{target_order} does not divide |G| = {G.order}")
    reps = cyclic_class_representatives(G)
    start = closure(G, [])
    results: List[Subgroup] = []
    if target_order == 1:
        return [start]
    seen = {start.members}
    stack = [(start, [])]
    while stack:
        N, gens = stack.pop()
        children = []
        for x in reps:
            if x in N:
                continue
            new_gens = gens + _class_of(G, x)
            M = closure(G, new_gens)
            if M.members in seen or target_order % M.order or not M.is_abelian():
                continue
            seen.add(M.members)
            if M.order == target_order:
                results.append(M)
                if limit is not None and len(results) >= limit:
                    return results
            else:
                children.append((M, new_gens))
        # в стек в обратном порядке, чтобы первым шёл наименьший представитель
        stack.extend(reversed(children))
    return sorted(results, key=lambda s: s.members)


def find_complement(G: FiniteGroup, H: Subgroup) -> Optional[Subgroup]:
    """
    Дополнение K к нормальной H (H∩K = 1, |H||K| = |G|) или None.
    Порождающие G/H поднимаются в свои смежные классы элементами того же порядка,
    перебор всех наборов подъёмов.
    """
    if not is_normal(G, H):
        raise PreconditionError(f"{G.name}: complement requested for a non-normal subgroup")
    m = G.order // H.order
    if m == 1:
        return closure(G, [])
    if H.order == 1:
        return closure(G, range(G.order))
    Q, proj = quotient(G, H)
    qgens: List[int] = []
    current = closure(Q, [])
    for q in range(Q.order):
        if current.order == Q.order:
            break
        if q not in current:
            qgens.append(q)
            current = closure(Q, qgens)
    candidates = []
    for q in qgens:
        lifts = [int(g) for g in np.flatnonzero(proj.images == q) if G.orders[g] == Q.orders[q]]
        if not lifts:
            return None
        candidates.append(lifts)
    for combo in product(*candidates):
        K = closure(G, combo)
        if K.order == m and len(K._set & H._set) == 1:
            return K
    return None


def conjugacy_class_profile(G: FiniteGroup) -> List[Tuple[int, int, int]]:
    """Тройки (порядок элемента, размер класса, число таких классов)."""
    counter: Dict[Tuple[int, int], int] = {}
    for cls in conjugacy_classes(G):
        key = (G.element_order(cls[0]), len(cls))
        counter[key] = counter.get(key, 0) + 1
    return sorted((o, size, cnt) for (o, size), cnt in counter.items())


# ---------------------
# Конструкции
# ---------------------

def cyclic_group(n: int, name: Optional[str] = None) -> FiniteGroup:
    if n < 1:
        raise SpecError(f"cyclic group order must be positive, got {n}")
    if n > config.ORDER_CAP:
        raise OrderCapError(f"C({n}) exceeds the cap {config.ORDER_CAP}")
    idx = np.arange(n)
    table = np.add.outer(idx, idx) % n
    labels = ["1"] + [f"g^{i}" for i in range(1, n)]
    return FiniteGroup(table, [1] if n > 1 else [], name=name or f"C{n}", labels=labels)


def direct_product(A: FiniteGroup, B: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    na, nb = A.order, B.order
    if na * nb > config.ORDER_CAP:
        raise OrderCapError(f"{A.name}x{B.name} exceeds the cap {config.ORDER_CAP}")
    idx = np.arange(na * nb)
    ia, ib = idx // nb, idx % nb
    table = A.table[ia[:, None], ia[None, :]].astype(np.int64) * nb + B.table[ib[:, None], ib[None, :]]
    gens = [g * nb + B.identity for g in A.generators] + [A.identity * nb + h for h in B.generators]
    labels = None
    if A.labels or B.labels:
        labels = [f"({A.label(int(a))},{B.label(int(b))})" for a, b in zip(ia, ib)]
    G = FiniteGroup(table, gens, name=name or f"{A.name}x{B.name}", labels=labels)
    G.split = SemidirectSplit(
        G,
        Subgroup(tuple(sorted(a * nb + B.identity for a in range(na))), G),
        Subgroup(tuple(sorted(A.identity * nb + b for b in range(nb))), G),
    )
    return G


def _extend_action(H: FiniteGroup, K: FiniteGroup, gen_tables: List[np.ndarray]) -> np.ndarray:
    """Продолжает действие с порождающих K на всю K обходом в ширину и проверяет согласованность."""
    act = np.full((K.order, H.order), -1, dtype=np.int64)
    act[K.identity] = np.arange(H.order)
    queue = deque([K.identity])
    while queue:
        k = queue.popleft()
        for g, a in zip(K.generators, gen_tables):
            k2 = int(K.table[g, k])
            composed = a[act[k]]
            if act[k2, 0] < 0:
                act[k2] = composed
                queue.append(k2)
            elif not np.array_equal(act[k2], composed):
                raise GroupConstructionError("action tables do not define a homomorphism into Aut(H)")
    if (act < 0).any():
        raise GroupConstructionError("action does not reach every element of the acting group")
    return act


def _check_automorphism(H: FiniteGroup, a: np.ndarray):
    if a.shape != (H.order,) or not np.array_equal(np.sort(a), np.arange(H.order)):
        raise GroupConstructionError("action table is not a bijection of H")
    if not np.array_equal(a[H.table], H.table[a[:, None], a[None, :]]):
        raise GroupConstructionError("action table is not an automorphism of H")


def semidirect_product(H: FiniteGroup, K: FiniteGroup, action, name: Optional[str] = None) -> FiniteGroup:
    """
    H ⋊ K. action это либо по таблице на каждый порождающий K (в порядке K.generators),
    либо полная таблица на все элементы K.
    Умножение: (h1,k1)(h2,k2) = (h1·μ(k1)(h2), k1k2).
    """
    nh, nk = H.order, K.order
    if nh * nk > config.ORDER_CAP:
        raise OrderCapError(f"{H.name}:{K.name} exceeds the cap {config.ORDER_CAP}")
    tables = [np.asarray(a, dtype=np.int64) for a in action]
    for a in tables:
        _check_automorphism(H, a)
    if len(tables) == nk and len(tables) != len(K.generators):
        act = np.stack(tables) if tables else np.zeros((0, nh), dtype=np.int64)
        for k1 in range(nk):
            for k2 in range(nk):
                if not np.array_equal(act[K.table[k1, k2]], act[k1][act[k2]]):
                    raise GroupConstructionError("action tables do not define a homomorphism into Aut(H)")
    elif len(tables) == len(K.generators):
        act = _extend_action(H, K, tables)
    else:
        raise GroupConstructionError(
            f"expected {len(K.generators)} generator tables or {nk} element tables, got {len(tables)}")
    idx = np.arange(nh * nk)
    ih, ik = idx // nk, idx % nk
    h_part = H.table[ih[:, None], act[ik[:, None], ih[None, :]]].astype(np.int64)
    k_part = K.table[ik[:, None], ik[None, :]]
    table = h_part * nk + k_part
    gens = [h * nk + K.identity for h in H.generators] + [H.identity * nk + k for k in K.generators]
    G = FiniteGroup(table, gens, name=name or f"{H.name}:{K.name}")
    G.split = SemidirectSplit(
        G,
        Subgroup(tuple(sorted(h * nk + K.identity for h in range(nh))), G),
        Subgroup(tuple(sorted(H.identity * nk + k for k in range(nk))), G),
    )
    return G


def metacyclic_group(M: int, K: int, r: int, s: int, name: Optional[str] = None) -> FiniteGroup:
    """⟨τ,σ : τ^M = 1, σ^K = τ^s, στσ⁻¹ = τ^r⟩, индекс i*K + j это τ^i σ^j."""
    if M < 1 or K < 1:
        raise SpecError("metacyclic parameters must be positive")
    if M * K > config.ORDER_CAP:
        raise OrderCapError(f"metacyclic group of order {M * K} exceeds the cap {config.ORDER_CAP}")
    r %= M
    s %= M
    if gcd(r, M) != 1 or pow(r, K, M) != 1 % M or (s * (r - 1)) % M:
        raise GroupConstructionError(f"relations inconsistent for M={M}, K={K}, r={r}, s={s}")
    idx = np.arange(M * K)
    i, j = idx // K, idx % K
    r_pow = np.array([pow(r, e, M) for e in range(K)], dtype=np.int64)
    j_sum = j[:, None] + j[None, :]
    carry = (j_sum >= K).astype(np.int64)
    new_i = (i[:, None] + i[None, :] * r_pow[j[:, None]] + s * carry) % M
    table = new_i * K + j_sum % K
    gens = [g for g in ([K] if M > 1 else []) + ([1] if K > 1 else [])]
    labels = [_word(int(a), int(b)) for a, b in zip(i, j)]
    G = FiniteGroup(table, gens, name=name or f"Meta({M},{K},{r},{s})", labels=labels)
    if s == 0:
        G.split = SemidirectSplit(
            G,
            Subgroup(tuple(a * K for a in range(M)), G),
            Subgroup(tuple(range(K)), G),
        )
    return G


def _word(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("t" if i == 1 else f"t^{i}")
    if j:
        parts.append("s" if j == 1 else f"s^{j}")
    return "".join(parts) or "1"


def permutation_group(degree: int, generators: Sequence[Sequence[int]], name: Optional[str] = None) -> FiniteGroup:
    """Подстановочная группа; произведение a·b = a∘b (сначала b)."""
    perms = []
    for g in generators:
        g = tuple(int(x) for x in g)
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise SpecError(f"{g} is not a permutation of degree {degree}")
        perms.append(g)
    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    queue = deque([identity])
    while queue:
        a = queue.popleft()
        for g in perms:
            c = tuple(a[g[x]] for x in range(degree))
            if c not in index:
                index[c] = len(elements)
                elements.append(c)
                if len(elements) > config.ORDER_CAP:
                    raise OrderCapError(f"permutation group exceeds the cap {config.ORDER_CAP}")
                queue.append(c)
    P = np.asarray(elements, dtype=np.int64)
    keys = {row.tobytes(): i for i, row in enumerate(P)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        comp = P[a][P]
        table[a] = [keys[row.tobytes()] for row in comp]
    gens = sorted({index[g] for g in perms} - {0})
    labels = [str(list(e)) for e in elements]
    return FiniteGroup(table, gens, name=name or f"Perm{degree}", labels=labels)


def heisenberg_group(ell: int) -> FiniteGroup:
    """(C(ℓ)×C(ℓ)) ⋊ C(ℓ), порождающий действует (x, y) ↦ (x, x + y)."""
    if not isprime(ell):
        raise SpecError(f"heisenberg parameter must be prime, got {ell}")
    base = direct_product(cyclic_group(ell), cyclic_group(ell), name=f"C{ell}xC{ell}")
    shear = np.array([x * ell + (x + y) % ell for x in range(ell) for y in range(ell)])
    G = semidirect_product(base, cyclic_group(ell), [shear], name=f"Heis({ell})")
    if center(G).order != ell:
        raise GroupConstructionError(f"Heis({ell}): center of order {center(G).order}, expected {ell}")
    return G


def modular_group(ell: int, n: int) -> FiniteGroup:
    """σ^ℓ = τ^{ℓ^{n-1}} = 1, στσ⁻¹ = τ^{1+ℓ^{n-2}}."""
    if not isprime(ell) or n < 3:
        raise SpecError(f"modular group needs prime ell and n >= 3, got ell={ell}, n={n}")
    M = ell ** (n - 1)
    G = metacyclic_group(M, ell, 1 + ell ** (n - 2), 0, name=f"Mod({ell},{n})")
    if exponent(G) != M or G.is_abelian():
        raise GroupConstructionError(f"Mod({ell},{n}) does not satisfy its defining relations")
    return G


def two_gen_l2_group(ell: int, a: int, c: int) -> FiniteGroup:
    """τ^{ℓ²} = 1, σ^ℓ = τ^{cℓ}, στσ⁻¹ = τ^{1+aℓ}."""
    if not isprime(ell):
        raise SpecError(f"two_gen_l2 parameter must be prime, got {ell}")
    return metacyclic_group(ell * ell, ell, 1 + a * ell, c * ell, name=f"TG({ell},{a},{c})")


def predicted_order(spec: GroupSpec) -> Optional[int]:
    p = spec.params
    if spec.kind == "cyclic":
        return int(p["n"])
    if spec.kind == "direct":
        total = 1
        for f in p["factors"]:
            o = predicted_order(f)
            if o is None:
                return None
            total *= o
        return total
    if spec.kind == "semidirect":
        oh, og = predicted_order(p["h"]), predicted_order(p["g"])
        return None if oh is None or og is None else oh * og
    if spec.kind == "heisenberg":
        return int(p["ell"]) ** 3
    if spec.kind == "modular":
        return int(p["ell"]) ** int(p["n"])
    if spec.kind == "two_gen_l2":
        return int(p["ell"]) ** 3
    if spec.kind == "metacyclic":
        return int(p["m"]) * int(p["k"])
    return None


def build_group(spec: GroupSpec) -> FiniteGroup:
    expected = predicted_order(spec)
    if expected is not None and expected > config.ORDER_CAP:
        raise OrderCapError(f"predicted order {expected} exceeds the cap {config.ORDER_CAP}")
    p = spec.params
    kind = spec.kind
    if kind == "cyclic":
        G = cyclic_group(int(p["n"]))
    elif kind == "perm":
        G = permutation_group(int(p["degree"]), p["generators"])
    elif kind == "direct":
        factors = [build_group(f) for f in p["factors"]]
        if not factors:
            raise SpecError("direct product needs at least one factor")
        G = factors[0]
        for f in factors[1:]:
            G = direct_product(G, f)
    elif kind == "semidirect":
        H = build_group(p["h"])
        K = build_group(p["g"])
        if "power" in p:
            if p["h"].kind != "cyclic":
                raise SpecError("'power' action requires a cyclic normal factor")
            r = int(p["power"])
            if len(K.generators) != 1:
                raise SpecError("'power' action requires a cyclic acting group")
            action = [np.array([(h * r) % H.order for h in range(H.order)])]
        else:
            action = p["action"]
        G = semidirect_product(H, K, action)
    elif kind == "heisenberg":
        G = heisenberg_group(int(p["ell"]))
    elif kind == "modular":
        G = modular_group(int(p["ell"]), int(p["n"]))
    elif kind == "two_gen_l2":
        G = two_gen_l2_group(int(p["ell"]), int(p["a"]), int(p["c"]))
    elif kind == "metacyclic":
        G = metacyclic_group(int(p["m"]), int(p["k"]), int(p["r"]), int(p["s"]))
    else:
        raise SpecError(f"unknown group kind {kind!r}")
    if expected is not None and G.order != expected:
        raise GroupConstructionError(f"relations inconsistent: built order {G.order}, expected {expected}")
    if spec.name:
        G.name = spec.name
    logger.debug("Built group %s of order %d", G.name, G.order)
    return G
