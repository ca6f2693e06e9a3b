import pytest

from errors import DeclaredDataError, SpecError
from parsers.field_spec import parse_field_shorthand, parse_field_spec
from parsers.group_spec import parse_group_shorthand, parse_group_spec


def test_parse_cyclic_spec():
    spec = parse_group_spec({"kind": "cyclic", "n": 8}, name="c8")
    assert spec.kind == "cyclic"
    assert spec.params == {"n": 8}
    assert spec.name == "c8"


def test_parse_nested_semidirect_spec():
    spec = parse_group_spec({
        "kind": "semidirect",
        "h": {"kind": "cyclic", "n": 7},
        "g": {"kind": "cyclic", "n": 3},
        "power": 2,
    })
    assert spec.params["h"].params == {"n": 7}
    assert spec.params["power"] == 2


@pytest.mark.parametrize("data", [
    {"kind": "cyclic"},
    {"kind": "dihedral", "n": 4},
    {"kind": "cyclic", "n": "8"},
    {"kind": "cyclic", "n": True},
    {"kind": "direct", "factors": []},
    {"kind": "semidirect", "h": {"kind": "cyclic", "n": 7}, "g": {"kind": "cyclic", "n": 3}},
    {"kind": "perm", "degree": 3, "generators": [1, 0, 2]},
    [1, 2, 3],
])
def test_parse_group_spec_rejects(data):
    with pytest.raises(SpecError):
        parse_group_spec(data)


@pytest.mark.parametrize("text, kind, name", [
    ("C8", "cyclic", "C8"),
    ("c27", "cyclic", "C27"),
    ("C9xC3", "direct", "C9xC3"),
    ("heis3", "heisenberg", "heisenberg3"),
    ("mod3_4", "modular", "modular3_4"),
    ("tg3_1_0", "two_gen_l2", "tg3_1_0"),
])
def test_group_shorthand(text, kind, name):
    spec = parse_group_shorthand(text)
    assert spec.kind == kind
    assert spec.name == name


def test_group_shorthand_falls_through():
    assert parse_group_shorthand("modular3_3xc3") is None


def test_parse_field_specs():
    assert parse_field_spec({"kind": "rationals"}, name="Q").kind == "rationals"
    k = parse_field_spec({"kind": "imag_quadratic", "d": 23})
    assert k.d == 23
    with pytest.raises(SpecError):
        parse_field_spec({"kind": "imag_quadratic", "d": 8})
    with pytest.raises(SpecError):
        parse_field_spec({"kind": "real_quadratic", "d": 2})


def test_parse_declared_field():
    k = parse_field_spec({
        "kind": "declared",
        "gal": {"8": [1, 5], "4": [1]},
        "class_group": [2],
        "prime_norm_classes": [[17, [0]], [41, [1]]],
        "declared_w": [{"m": 8, "s": [1], "w": []}],
    }, name="toy")
    assert k.gal == ((4, (1,)), (8, (1, 5)))
    assert k.prime_norm_classes == ((17, (0,)), (41, (1,)))
    assert k.declared_w[0].m == 8
    assert k.label == "toy"


def test_declared_field_wrong_class_length():
    with pytest.raises(DeclaredDataError):
        parse_field_spec({"kind": "declared", "gal": {"4": [1]}, "class_group": [2],
                          "prime_norm_classes": [[5, [0, 1]]]})


def test_declared_field_inconsistent_gal():
    with pytest.raises(DeclaredDataError):
        parse_field_spec({"kind": "declared", "gal": {"8": [1, 5], "4": [1, 3]}, "class_group": [2]})


def test_declared_field_needs_gal():
    with pytest.raises(SpecError):
        parse_field_spec({"kind": "declared", "class_group": [2]})


@pytest.mark.parametrize("text, d", [("Q(sqrt-5)", 5), ("Q(sqrt(-23))", 23), ("imag5", 5)])
def test_field_shorthand(text, d):
    k = parse_field_shorthand(text)
    assert k.kind == "imag_quadratic" and k.d == d


def test_field_shorthand_rationals_and_unknown():
    assert parse_field_shorthand("Q").kind == "rationals"
    assert parse_field_shorthand("q_sqrt_m5") is None
    with pytest.raises(SpecError):
        parse_field_shorthand("imag4")
