import pytest

from errors import PreconditionError
from group_core import cyclic_group, is_normal
from services import fixtures
from structure_lab import (
    KIND_ABELIAN,
    KIND_CYCLIC,
    KIND_EXPONENT_L,
    KIND_MODULAR,
    KIND_TYPE2,
    KIND_TYPE3,
    burnside_check,
    classify_ell4,
    exponent_ell_split,
    is_aprime_group,
    prime_power,
    type3_projection,
    type3_steinitz_identity,
    verify_witnesses,
)


def test_prime_power():
    assert prime_power(81) == (3, 4)
    assert prime_power(5) == (5, 1)
    with pytest.raises(PreconditionError):
        prime_power(12)


def test_aprime_trees(c9, c7sdc3, heis3):
    assert is_aprime_group(c9).kind == "abelian"
    tree = is_aprime_group(c7sdc3)
    assert tree.kind == "semidirect"
    assert tree.normal.order == 7 and tree.complement.order == 3
    assert is_aprime_group(heis3) is None


def test_burnside_witness(heis3, mod3_3):
    for G in (heis3, mod3_3):
        A = burnside_check(G)
        assert A.order == 9
        assert A.is_abelian() and is_normal(G, A)
    with pytest.raises(PreconditionError):
        burnside_check(cyclic_group(9))


def test_exponent_ell_split(heis3, mod3_3):
    H, K = exponent_ell_split(heis3)
    assert H.order == 9 and K.order == 3
    with pytest.raises(PreconditionError):
        exponent_ell_split(mod3_3)


def test_classify_small_groups(heis3, mod3_3):
    assert classify_ell4(cyclic_group(27)).kind == KIND_CYCLIC
    assert classify_ell4(fixtures.load_group("c9xc3")).kind == KIND_ABELIAN
    cls = classify_ell4(heis3)
    assert cls.kind == KIND_EXPONENT_L
    assert verify_witnesses(heis3, cls) == []
    cls = classify_ell4(mod3_3)
    assert cls.kind == KIND_MODULAR
    assert mod3_3.element_order(cls.tau) == 9
    assert verify_witnesses(mod3_3, cls) == []


def test_classify_needs_odd_prime_power():
    with pytest.raises(PreconditionError):
        classify_ell4(cyclic_group(8))
    with pytest.raises(PreconditionError):
        classify_ell4(cyclic_group(9))


@pytest.mark.slow
@pytest.mark.parametrize("name", ["modular3_4", "modular3_3xc3", "c9sdc9", "c3wrc3"])
def test_order_81_fixtures_match_manifest(name):
    G = fixtures.load_group(name)
    expected = next(e["kind"] for e in fixtures.group_entries() if e["name"] == name)
    cls = classify_ell4(G)
    assert cls.kind == expected
    assert verify_witnesses(G, cls) == []


@pytest.mark.slow
def test_type2_has_cyclic_complement():
    G = fixtures.load_group("c9sdc9")
    cls = classify_ell4(G)
    assert cls.kind == KIND_TYPE2
    assert G.element_order(cls.tau) == 9
    assert cls.complement.order == 9


@pytest.mark.slow
def test_type3_projection_is_verified():
    G = fixtures.load_group("c3wrc3")
    cls = classify_ell4(G, with_alternates=False)
    assert cls.kind == KIND_TYPE3
    h1, h2 = cls.H.members[1], cls.H.members[2]
    pi = type3_projection(G, cls, h1, h2)
    assert pi.verify()
    assert pi.is_surjective()
    assert cls.projector().check_pair(h1, h2) == []


def test_type3_projection_needs_type3(heis3):
    cls = classify_ell4(heis3)
    with pytest.raises(PreconditionError):
        type3_projection(heis3, cls, heis3.identity, heis3.identity)


@pytest.mark.parametrize("ell, A, B, lhs", [(3, 3, 2, 225), (5, 2, 2, 1700)])
def test_type3_steinitz_identity(ell, A, B, lhs):
    result = type3_steinitz_identity(ell, A, B)
    assert result["lhs"] == lhs
    assert result["equal"]


def test_type3_identity_collapses_when_congruence_holds():
    # 2·4·B + 3·A = 8·2 + 3·3 = 25 ≡ 1 (mod 2)
    assert type3_steinitz_identity(3, 3, 2, modulus=2)["collapses"]
    with pytest.raises(PreconditionError):
        type3_steinitz_identity(2, 1, 1)
