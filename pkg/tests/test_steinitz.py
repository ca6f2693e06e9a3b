from fractions import Fraction

import pytest

from classgroup import ClassSubgroup, FiniteAbelianGroup, class_group
from cyclo import FieldSpec
from errors import NoSolutionError, PreconditionError, UnsupportedBranchError
from group_core import SemidirectSplit, closure, cyclic_group
from steinitz import (
    NormMap,
    RamificationDatum,
    cal_w,
    check_ram_admissible,
    constructive_lower_bound,
    exponent_solver,
    lower_bound_from_action,
    product_forms_check,
    steinitz_from_ramification,
    subgroup_exponent,
    tower_steinitz,
    very_good_certificate,
)


@pytest.fixture(scope="module")
def cl100():
    return FieldSpec("declared", gal=((2, (1,)),), class_group=(100,), name="cl100")


def test_cal_w_cyclic_over_imag5(imag5, c9):
    report = cal_w(imag5, c9)
    assert report.order == 2
    assert report.forms_agree
    assert [e.tau_order for e in report.per_tau] == [9, 3]
    assert [e.exponent for e in report.per_tau] == [Fraction(4), Fraction(3)]


def test_cal_w_c8_half_power(q_i_sqrt10):
    report = cal_w(q_i_sqrt10, cyclic_group(8))
    assert report.order == 2
    assert report.subgroup.index() == 1
    top = next(e for e in report.per_tau if e.tau_order == 8)
    assert top.exponent == Fraction(7, 2)
    assert top.w.order == 1
    assert top.to_dict()["exponent"] == "7/2"


def test_cal_w_over_rationals_is_trivial(rationals, heis3):
    assert cal_w(rationals, heis3).order == 1


def test_cal_w_full_mode_matches_representatives(imag5, mod3_3):
    assert cal_w(imag5, mod3_3, mode="full").subgroup == cal_w(imag5, mod3_3).subgroup


def test_cal_w_rejects_bad_arguments(imag5, c9):
    with pytest.raises(PreconditionError):
        cal_w(imag5, c9, i=2)
    with pytest.raises(PreconditionError):
        cal_w(imag5, c9, mode="everything")


def test_product_forms_check(imag5, c9, c7sdc3):
    assert product_forms_check(imag5, c9, 0)
    assert product_forms_check(imag5, c7sdc3, 1)


def test_steinitz_from_ramification(cl100):
    C27 = cyclic_group(27)
    data = [RamificationDatum((1,), 9), RamificationDatum((10,), 3)]
    # (3-1)/2·9·1 + (9-1)/2·3·10 = 9 + 120
    assert steinitz_from_ramification(cl100, C27, data) == (29,)


def test_steinitz_from_ramification_checks_index(cl100):
    with pytest.raises(PreconditionError):
        steinitz_from_ramification(cl100, cyclic_group(27), [RamificationDatum((1,), 9, e=9)])
    with pytest.raises(UnsupportedBranchError):
        steinitz_from_ramification(cl100, cyclic_group(8), [RamificationDatum((1,), 4)])


def test_check_ram_admissible(imag5, c9):
    assert check_ram_admissible(imag5, c9, 1, (1,))
    assert check_ram_admissible(imag5, c9, 3, (0,))


def test_exponent_solver():
    assert exponent_solver(1, 1, 0, 3) == (2, 4)
    assert exponent_solver(3, 8, 1, 1) == (2, 2)
    with pytest.raises(NoSolutionError):
        exponent_solver(2, 2, 1, 4)
    with pytest.raises(PreconditionError):
        exponent_solver(1, 1, 1, 0)


def test_constructive_lower_bound_for_heisenberg(imag5, heis3):
    rt = cal_w(imag5, cyclic_group(3)).subgroup
    lower = constructive_lower_bound(imag5, heis3, heis3.split, rt)
    assert lower.subgroup.order == 2
    assert lower.subgroup.issubset(cal_w(imag5, heis3).subgroup)
    assert all("solution" in entry for entry in lower.congruences)


def test_lower_bound_from_action_matches_built_split(imag5, c7sdc3):
    rt = cal_w(imag5, cyclic_group(3)).subgroup
    # образующий C3 действует на C7 возведением в квадрат
    doubling = [(2 * h) % 7 for h in range(7)]
    lower = lower_bound_from_action(imag5, cyclic_group(7), cyclic_group(3), [doubling], rt)
    assert lower.subgroup == constructive_lower_bound(imag5, c7sdc3, c7sdc3.split, rt).subgroup
    assert [entry["tau_order"] for entry in lower.congruences] == [7]


def test_constructive_lower_bound_needs_odd_abelian_normal_part(imag5):
    C6 = cyclic_group(6)
    split = SemidirectSplit(C6, closure(C6, [1]), closure(C6, []))
    with pytest.raises(PreconditionError):
        constructive_lower_bound(imag5, C6, split, ClassSubgroup.trivial(class_group(imag5)))


def test_subgroup_exponent():
    B = FiniteAbelianGroup((2, 4))
    assert subgroup_exponent(ClassSubgroup.full(B)) == 4
    assert subgroup_exponent(ClassSubgroup.trivial(B)) == 1


def test_certificate_abelian(imag5, c9):
    report = very_good_certificate(imag5, c9)
    assert report.route == "abelian"
    assert report.equal


def test_certificate_aprime(imag5, c7sdc3):
    report = very_good_certificate(imag5, c7sdc3)
    assert report.route == "aprime"
    assert report.upper.order == 2
    assert report.equal
    assert report.to_dict()["details"]["tree"]["kind"] == "semidirect"


def test_certificate_exponent_ell(rationals, heis3):
    report = very_good_certificate(rationals, heis3)
    assert report.route == "exponent_ell"
    assert report.equal
    assert report.closed_form == report.upper


def test_certificate_needs_odd_order(imag5):
    with pytest.raises(PreconditionError):
        very_good_certificate(imag5, cyclic_group(8))


def test_tower_steinitz():
    Z100 = FiniteAbelianGroup((100,))
    norm = NormMap(Z100, Z100, ((3,),))
    assert norm.apply((5,)) == (15,)
    assert tower_steinitz((1,), 27, norm, (5,)) == (42,)


def test_norm_map_must_be_a_homomorphism():
    with pytest.raises(PreconditionError):
        NormMap(FiniteAbelianGroup((3,)), FiniteAbelianGroup((100,)), ((1,),))
    with pytest.raises(PreconditionError):
        NormMap(FiniteAbelianGroup((3,)), FiniteAbelianGroup((3,)), ())
