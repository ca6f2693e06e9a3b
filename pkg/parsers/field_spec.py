# parsers/field_spec.py
"""
FieldSpec из JSON-словаря или короткой записи (Q, Q(sqrt-5), imag5).
"""
import logging
from typing import Optional

from common_regex import IMAG_QUADRATIC_REGEX, RATIONALS_REGEX
from cyclo import DeclaredW, FieldSpec, field_discriminant, validate_declared
from errors import DeclaredDataError, PreconditionError, SpecError

logger = logging.getLogger(__name__)


def _vector(value, rank: int, what: str):
    if not isinstance(value, list) or len(value) != rank or not all(isinstance(x, int) for x in value):
        raise DeclaredDataError(f"{what} must be a list of {rank} integers, got {value!r}")
    return tuple(value)


def _parse_declared(data: dict, name: Optional[str]) -> FieldSpec:
    gal_raw = data.get("gal")
    if not isinstance(gal_raw, dict) or not gal_raw:
        raise SpecError("declared field needs a non-empty 'gal' table")
    gal = []
    for key, members in gal_raw.items():
        try:
            m = int(key)
        except ValueError as e:
            raise SpecError(f"gal modulus {key!r} is not an integer") from e
        if not isinstance(members, list) or not members:
            raise SpecError(f"gal entry for {m} must be a non-empty list of residues")
        gal.append((m, tuple(sorted({int(a) % m for a in members}))))
    class_group = data.get("class_group", [])
    if not isinstance(class_group, list) or not all(isinstance(d, int) and d >= 1 for d in class_group):
        raise SpecError(f"class_group must be a list of positive integers, got {class_group!r}")
    rank = len(class_group)
    stream = []
    for entry in data.get("prime_norm_classes", []):
        if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], int):
            raise SpecError(f"prime_norm_classes entries are [norm, class vector], got {entry!r}")
        stream.append((entry[0], _vector(entry[1], rank, "declared class")))
    declared_w = []
    for entry in data.get("declared_w", []):
        if not isinstance(entry, dict) or not {"m", "s", "w"} <= set(entry):
            raise SpecError(f"declared_w entries need m, s and w, got {entry!r}")
        m = int(entry["m"])
        declared_w.append(DeclaredW(
            m,
            tuple(sorted({int(a) % m for a in entry["s"]})),
            tuple(_vector(v, rank, "declared W generator") for v in entry["w"]),
        ))
    try:
        spec = FieldSpec("declared", gal=tuple(sorted(gal)), class_group=tuple(class_group),
                         prime_norm_classes=tuple(stream), declared_w=tuple(declared_w), name=name)
        validate_declared(spec)
    except PreconditionError as e:
        raise DeclaredDataError(str(e)) from e
    logger.info("Loaded declared field %s: moduli %s, class group %s",
                spec.label, [m for m, _ in gal], class_group)
    return spec


def parse_field_spec(data, name: Optional[str] = None) -> FieldSpec:
    if not isinstance(data, dict):
        raise SpecError(f"field spec must be a JSON object, got {type(data).__name__}")
    kind = data.get("kind")
    name = data.get("name", name)
    if kind == "rationals":
        return FieldSpec("rationals", name=name)
    if kind == "imag_quadratic":
        d = data.get("d")
        if isinstance(d, bool) or not isinstance(d, int):
            raise SpecError(f"imag_quadratic field needs an integer 'd', got {d!r}")
        try:
            field_discriminant(d)
        except PreconditionError as e:
            raise SpecError(str(e)) from e
        return FieldSpec("imag_quadratic", d=d, name=name)
    if kind == "declared":
        return _parse_declared(data, name)
    raise SpecError(f"unknown field kind {kind!r}")


def parse_field_shorthand(text: str) -> Optional[FieldSpec]:
    text = text.strip().replace(" ", "")
    if RATIONALS_REGEX.match(text):
        return FieldSpec("rationals", name="Q")
    m = IMAG_QUADRATIC_REGEX.match(text)
    if m:
        d = int(m.group(1) or m.group(2))
        try:
            field_discriminant(d)
        except PreconditionError as e:
            raise SpecError(str(e)) from e
        return FieldSpec("imag_quadratic", d=d, name=f"Q(sqrt(-{d}))")
    return None
