import numpy as np
import pytest

import config
from errors import GroupConstructionError, OrderCapError, PreconditionError, SpecError
from group_core import (
    FiniteGroup,
    GroupSpec,
    build_group,
    center,
    closure,
    conjugacy_class_profile,
    cyclic_class_representatives,
    cyclic_group,
    direct_product,
    ell_part,
    ell_power_elements,
    exponent,
    find_complement,
    is_normal,
    metacyclic_group,
    normal_abelian_subgroups,
    normal_subgroups,
    normalizer_centralizer,
    permutation_group,
    phi_image,
    predicted_order,
    quotient,
    semidirect_product,
)
from models import ResidueSubgroup


def test_cyclic_group_basics():
    G = cyclic_group(8)
    assert G.order == 8
    assert G.is_abelian()
    assert exponent(G) == 8
    assert G.element_order(2) == 4
    assert G.power(3, 3) == 1
    assert G.label(0) == "1"


def test_cyclic_group_rejects_bad_orders():
    with pytest.raises(SpecError):
        cyclic_group(0)
    with pytest.raises(OrderCapError):
        cyclic_group(config.ORDER_CAP + 1)


def test_table_must_have_two_sided_identity():
    with pytest.raises(GroupConstructionError):
        FiniteGroup([[0, 1], [0, 1]], [1], name="broken")


def test_direct_product_index_convention():
    G = direct_product(cyclic_group(3), cyclic_group(3))
    # (1, 0) * (0, 1) = (1, 1)
    assert G.mult(1 * 3 + 0, 0 * 3 + 1) == 1 * 3 + 1
    assert G.split is not None
    assert G.split.normal.order == 3 and G.split.complement.order == 3


def test_semidirect_c7_by_c3(c7sdc3):
    G = c7sdc3
    assert G.order == 21
    assert not G.is_abelian()
    assert center(G).order == 1
    assert exponent(G) == 21
    assert conjugacy_class_profile(G) == [(1, 1, 1), (3, 7, 2), (7, 3, 2)]


def test_semidirect_rejects_non_automorphism():
    C7, C3 = cyclic_group(7), cyclic_group(3)
    shift = np.array([(h + 1) % 7 for h in range(7)])
    with pytest.raises(GroupConstructionError):
        semidirect_product(C7, C3, [shift])


def test_heisenberg_structure(heis3):
    assert heis3.order == 27
    assert exponent(heis3) == 3
    assert center(heis3).order == 3
    assert conjugacy_class_profile(heis3) == [(1, 1, 1), (3, 1, 2), (3, 3, 8)]


def test_modular_group_phi(mod3_3):
    # τ = индекс 3, σ = индекс 1, στσ⁻¹ = τ⁴
    assert mod3_3.element_order(3) == 9
    assert phi_image(mod3_3, 3) == ResidueSubgroup(9, (1, 4, 7))
    assert mod3_3.element_order(mod3_3.mult(1, 3)) == 9
    N, C = normalizer_centralizer(mod3_3, 3)
    assert N.order // C.order == 3


def test_phi_of_identity_is_undefined(c9):
    with pytest.raises(PreconditionError):
        phi_image(c9, c9.identity)


def test_metacyclic_rejects_inconsistent_relations():
    with pytest.raises(GroupConstructionError):
        metacyclic_group(9, 3, 2, 0)


def test_permutation_group_s3():
    S3 = permutation_group(3, [[1, 0, 2], [1, 2, 0]])
    assert S3.order == 6
    assert not S3.is_abelian()
    assert sorted(int(o) for o in S3.orders) == [1, 2, 2, 2, 3, 3]


def test_permutation_group_rejects_non_permutation():
    with pytest.raises(SpecError):
        permutation_group(3, [[0, 0, 1]])


def test_cyclic_class_representatives(c9, heis3):
    assert cyclic_class_representatives(c9) == [1, 3]
    # центр даёт одну подгруппу, нецентральные подгруппы порядка 3 образуют 4 класса
    assert len(cyclic_class_representatives(heis3)) == 5


def test_ell_parts():
    C6 = cyclic_group(6)
    assert ell_part(C6, 1, 3) == 2
    assert ell_power_elements(C6, 3) == [0, 2, 4]
    with pytest.raises(PreconditionError):
        ell_part(C6, 1, 4)


def test_closure_and_normality(heis3):
    Z = center(heis3)
    assert is_normal(heis3, Z)
    assert closure(heis3, []).order == 1
    Q, proj = quotient(heis3, Z)
    assert Q.order == 9 and Q.is_abelian()
    assert proj.verify()
    assert proj.kernel().members == Z.members


def test_normal_abelian_subgroups_of_heisenberg(heis3):
    found = normal_abelian_subgroups(heis3, 9)
    assert len(found) == 4
    assert all(S.is_abelian() and is_normal(heis3, S) for S in found)
    assert len(normal_abelian_subgroups(heis3, 9, limit=1)) == 1


def test_normal_subgroups_of_s3():
    S3 = permutation_group(3, [[1, 0, 2], [1, 2, 0]])
    assert [N.order for N in normal_subgroups(S3)] == [1, 3, 6]


def test_find_complement(c7sdc3):
    H = next(N for N in normal_subgroups(c7sdc3) if N.order == 7)
    K = find_complement(c7sdc3, H)
    assert K is not None and K.order == 3
    assert len(set(K.members) & set(H.members)) == 1


def test_find_complement_none_for_c9():
    C9 = cyclic_group(9)
    assert find_complement(C9, closure(C9, [3])) is None


def test_build_group_and_predicted_order():
    spec = GroupSpec("direct", {"factors": [GroupSpec("cyclic", {"n": 9}), GroupSpec("cyclic", {"n": 3})]},
                     name="c9xc3")
    assert predicted_order(spec) == 27
    G = build_group(spec)
    assert G.name == "c9xc3"
    assert exponent(G) == 9


def test_build_group_power_action_needs_cyclic_normal_part():
    spec = GroupSpec("semidirect", {
        "h": GroupSpec("direct", {"factors": [GroupSpec("cyclic", {"n": 3}), GroupSpec("cyclic", {"n": 3})]}),
        "g": GroupSpec("cyclic", {"n": 3}),
        "power": 2,
    })
    with pytest.raises(SpecError):
        build_group(spec)


def test_build_group_unknown_kind():
    with pytest.raises(SpecError):
        build_group(GroupSpec("dihedral", {"n": 4}))
