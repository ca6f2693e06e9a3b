import random
from fractions import Fraction

import pytest
from sympy import primerange

import config
from classgroup import (
    ClassSubgroup,
    FiniteAbelianGroup,
    QuadForm,
    class_group,
    class_group_imag_quadratic,
    cyclotomic_power_inclusion,
    exponent_to_json,
    power_subgroup,
    prime_form,
    prime_norm_class_stream,
    principal_form,
    reduced_forms,
    w_cyclotomic,
    w_subgroup,
)
from cyclo import EFieldDescriptor, FieldSpec
from errors import PreconditionError
from models import ResidueSubgroup


@pytest.fixture
def z2z4():
    return FiniteAbelianGroup((2, 4))


def test_invariant_factors_must_form_a_chain():
    with pytest.raises(PreconditionError):
        FiniteAbelianGroup((2, 3))
    B = FiniteAbelianGroup((2, 4))
    assert B.order == 8 and B.exponent == 4 and B.rank == 2
    assert B.element_order((1, 1)) == 4
    assert B.reduce((3, -1)) == (1, 3)


def test_subgroup_lattice_operations(z2z4):
    A = ClassSubgroup.generated(z2z4, [(1, 1)])
    C = ClassSubgroup.generated(z2z4, [(0, 1)])
    assert A.order == 4 and C.order == 4
    meet = A.meet(C)
    assert meet.order == 2
    assert meet.contains((0, 2))
    assert A.join(C) == ClassSubgroup.full(z2z4)
    assert A.index() == 2
    assert not A.issubset(C)
    assert meet.issubset(A) and meet.issubset(C)


def test_preimage_under_doubling(z2z4):
    trivial = ClassSubgroup.trivial(z2z4)
    two_torsion = trivial.preimage_under_multiplication(2)
    assert sorted(two_torsion.elements()) == [(0, 0), (0, 2), (1, 0), (1, 2)]


def test_equal_subgroups_have_equal_bases(z2z4):
    assert ClassSubgroup.generated(z2z4, [(1, 1)]) == ClassSubgroup.generated(z2z4, [(1, 3), (0, 2)])


def test_half_integer_power():
    B = FiniteAbelianGroup((6,))
    A = ClassSubgroup.generated(B, [(2,)])
    assert A.order == 3
    half = power_subgroup(A, Fraction(3, 2), B)
    assert sorted(half.elements()) == [(0,), (3,)]


def test_integer_power():
    B = FiniteAbelianGroup((6,))
    assert power_subgroup(ClassSubgroup.full(B), 2, B).order == 3
    assert power_subgroup(ClassSubgroup.full(B), 0, B).order == 1


@pytest.mark.parametrize("t", [Fraction(-1), Fraction(1, 3)])
def test_power_exponent_must_be_half_integer(t):
    B = FiniteAbelianGroup((6,))
    with pytest.raises(PreconditionError):
        power_subgroup(ClassSubgroup.full(B), t, B)


def test_random_element_stays_in_subgroup(z2z4):
    A = ClassSubgroup.generated(z2z4, [(1, 1)])
    rng = random.Random(7)
    assert all(A.contains(A.random_element(rng)) for _ in range(20))


def test_exponent_to_json():
    assert exponent_to_json(Fraction(7, 2)) == "7/2"
    assert exponent_to_json(3) == 3


def test_reduced_forms():
    assert reduced_forms(-20) == [QuadForm(1, 0, 5), QuadForm(2, 2, 3)]
    assert reduced_forms(-23) == [QuadForm(1, 1, 6), QuadForm(2, -1, 3), QuadForm(2, 1, 3)]
    with pytest.raises(PreconditionError):
        reduced_forms(-21)


def test_composition_with_inverse_is_principal():
    f = QuadForm(2, 1, 3)
    assert f.compose(f.inverse()) == principal_form(-23)
    assert f.compose(f) == QuadForm(2, -1, 3)


def test_prime_forms():
    assert prime_form(-20, 3) == QuadForm(2, 2, 3)
    assert prime_form(-20, 7) == QuadForm(2, 2, 3)
    assert prime_form(-20, 29) == QuadForm(1, 0, 5)


@pytest.mark.parametrize("d, divisors", [(5, (2,)), (23, (3,)), (1, ())])
def test_class_group_invariants(d, divisors):
    assert class_group_imag_quadratic(d).ambient.divisors == divisors


def test_class_of_maps_forms_to_vectors():
    cg = class_group_imag_quadratic(5)
    assert cg.class_of(QuadForm(1, 0, 5)) == (0,)
    assert cg.class_of(QuadForm(2, 2, 3)) == (1,)


def test_class_group_of_declared_field(q_i_sqrt10, rationals):
    assert class_group(q_i_sqrt10).divisors == (2,)
    assert class_group(rationals).order == 1


def test_prime_stream(imag5, rationals):
    assert prime_norm_class_stream(imag5, 10) == [(3, (1,)), (3, (1,)), (7, (1,)), (7, (1,))]
    assert prime_norm_class_stream(rationals, 10) == [(2, ()), (3, ()), (5, ()), (7, ())]
    with pytest.raises(PreconditionError):
        prime_norm_class_stream(imag5, 1)


def test_w_cyclotomic_sources(imag5, rationals, q_i_sqrt10):
    W9 = w_cyclotomic(imag5, 9)
    assert W9.order == 2
    assert W9.source == "stream"
    assert not W9.heuristic

    assert w_cyclotomic(rationals, 9).source == "trivial"

    declared = w_cyclotomic(q_i_sqrt10, 8)
    assert declared.source == "declared" and declared.order == 1
    base = w_cyclotomic(q_i_sqrt10, 4)
    assert base.source == "base_field" and base.order == 2


def test_w_cyclotomic_with_split_primes_only(imag5):
    # простое 3 делит модуль, вклад даёт только 7 (порядок 7 mod 9 равен 3)
    assert w_cyclotomic(imag5, 9, bound=7).order == 2


def test_cyclotomic_power_inclusion(imag5, imag23):
    assert cyclotomic_power_inclusion(imag5, 3, 3)
    assert cyclotomic_power_inclusion(imag23, 2, 4)
    with pytest.raises(PreconditionError):
        cyclotomic_power_inclusion(imag5, 3, 2)


def _repeated_norm_field(count):
    norms = [p for p in primerange(5, 2000) if p % 3 == 1][:count]
    table = tuple((p, (0,)) for p in norms for _ in range(2))
    return FieldSpec("declared", gal=((3, (1, 2)),), class_group=(2,),
                     prime_norm_classes=table, name=f"repeated{count}")


def test_stability_window_counts_primes_not_entries():
    E = EFieldDescriptor(3, ResidueSubgroup.trivial(3))
    # 30 простых по две записи: записей 60, но простых меньше окна
    short = w_subgroup(_repeated_norm_field(30), E, 2000)
    assert short.source == "stream" and short.order == 1
    assert not short.stable
    assert w_subgroup(_repeated_norm_field(config.STABILITY_WINDOW), E, 2000).stable
