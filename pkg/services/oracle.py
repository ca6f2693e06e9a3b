# services/oracle.py
"""
Независимая проверка W(k,E) для мнимых квадратичных полей.

Не использует поток простых из classgroup: для каждого простого p и каждой
приведённой формы (a,b,c) перебором решается a x² + bxy + c y² = p
с взаимно простыми x, y. Порядок Фробениуса берётся по p mod m в T_m/S.
"""
import logging
from math import gcd, isqrt
from typing import Optional

from sympy import primerange

from classgroup import ClassSubgroup, QuadForm, class_group_imag_quadratic
from cyclo import EFieldDescriptor, FieldSpec, gal_subgroup
from errors import PreconditionError

logger = logging.getLogger(__name__)


def represents_primitively(f: QuadForm, p: int) -> bool:
    """4a·p = (2ax + by)² + |D|y², поэтому |y| ≤ sqrt(4ap/|D|)."""
    a, b = f.a, f.b
    D = abs(f.discriminant)
    for y in range(0, isqrt(4 * a * p // D) + 1):
        rest = 4 * a * p - D * y * y
        root = isqrt(rest)
        if root * root != rest:
            continue
        for s in {root, -root}:
            num = s - b * y
            if num % (2 * a):
                continue
            x = num // (2 * a)
            if gcd(x, y) == 1:
                return True
    return False


def frobenius_order(p: int, E: EFieldDescriptor) -> int:
    f, x = 1, p % E.m
    while x not in E.s:
        x = (x * p) % E.m
        f += 1
    return f


def oracle_w_subgroup(k: FieldSpec, E: EFieldDescriptor, bound: int) -> ClassSubgroup:
    if k.kind != "imag_quadratic":
        raise PreconditionError(f"the W oracle handles imaginary quadratic fields only, got {k.kind}")
    cg = class_group_imag_quadratic(k.d)
    T = gal_subgroup(k, E.m)
    if not E.s.issubset(T):
        raise PreconditionError(f"descriptor subgroup mod {E.m} is not inside T_{E.m}")
    gens = []
    for p in primerange(2, bound + 1):
        p = int(p)
        if gcd(p, E.m * cg.discriminant) != 1:
            continue
        form: Optional[QuadForm] = next((f for f in cg.forms if represents_primitively(f, p)), None)
        if form is None:
            continue
        gens.append(cg.ambient.scale(cg.class_of(form), frobenius_order(p, E)))
    W = ClassSubgroup.generated(cg.ambient, gens)
    logger.debug("Oracle W(%s, m=%d, S=%s) has order %d", k.label, E.m, list(E.s.members), W.order)
    return W
