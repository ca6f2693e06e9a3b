# services/fixtures.py
"""
Каталог фикстур: manifest.json, спецификации групп и полей, сценарии.
Построенные группы кэшируются в памяти процесса по (каталог, имя).
"""
import json
import logging
import os
from functools import lru_cache
from typing import Dict, List, Optional

import config
from cyclo import FieldSpec
from errors import SpecError
from group_core import FiniteGroup, GroupSpec, build_group
from parsers.field_spec import parse_field_shorthand, parse_field_spec
from parsers.group_spec import parse_group_shorthand, parse_group_spec

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise SpecError(f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON ({e})") from e


@lru_cache(maxsize=None)
def _manifest(directory: str) -> Dict:
    if not os.path.isdir(directory):
        raise SpecError(f"fixture directory not found: {directory}")
    path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.exists(path):
        raise SpecError(f"fixture manifest not found: {path}")
    data = _read_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("groups"), list):
        raise SpecError(f"{path}: manifest must be an object with a 'groups' list")
    if not data["groups"]:
        raise SpecError(f"{path}: manifest lists no group fixtures")
    logger.info("Fixture manifest %s: %d groups, %d fields",
                path, len(data["groups"]), len(data.get("fields", [])))
    return data


def load_manifest(directory: Optional[str] = None) -> Dict:
    return _manifest(os.path.abspath(config.fixtures_dir(directory)))


def group_entries(directory: Optional[str] = None) -> List[Dict]:
    return sorted(load_manifest(directory)["groups"], key=lambda e: e["name"])


def field_entries(directory: Optional[str] = None) -> List[Dict]:
    return sorted(load_manifest(directory).get("fields", []), key=lambda e: e["name"])


def scenario_entry(name: str, directory: Optional[str] = None) -> Dict:
    scenarios = load_manifest(directory).get("scenarios", {})
    if name not in scenarios:
        raise SpecError(f"unknown scenario {name!r}; known: {', '.join(sorted(scenarios))}")
    return scenarios[name]


@lru_cache(maxsize=None)
def load_anchors() -> Dict:
    """Метки проверок и сценариев (anchors.json), по ним отчёт сверяется с текстом."""
    data = _read_json(config.ANCHORS_FILE)
    if not isinstance(data, dict) or not isinstance(data.get("checks"), dict):
        raise SpecError(f"{config.ANCHORS_FILE}: anchors must be an object with a 'checks' map")
    return data


def check_anchor(check: str) -> Optional[str]:
    return load_anchors()["checks"].get(check)


def scenario_anchor(name: str) -> Optional[str]:
    return load_anchors().get("scenarios", {}).get(name)


def scenario_aliases() -> Dict[str, str]:
    """Метка сценария -> его имя в manifest.json."""
    return {label: name for name, label in load_anchors().get("scenarios", {}).items()}


def _entry(entries: List[Dict], name: str) -> Optional[Dict]:
    return next((e for e in entries if e["name"] == name), None)


def load_group_spec(name: str, directory: Optional[str] = None) -> GroupSpec:
    entry = _entry(group_entries(directory), name)
    if entry is None:
        raise SpecError(f"unknown group fixture {name!r}")
    base = os.path.abspath(config.fixtures_dir(directory))
    return parse_group_spec(_read_json(os.path.join(base, entry["spec"])), name=name)


@lru_cache(maxsize=None)
def _load_group(directory: str, name: str) -> FiniteGroup:
    return build_group(load_group_spec(name, directory))


def load_group(name: str, directory: Optional[str] = None) -> FiniteGroup:
    return _load_group(os.path.abspath(config.fixtures_dir(directory)), name)


@lru_cache(maxsize=None)
def _load_field(directory: str, name: str) -> FieldSpec:
    entry = _entry(field_entries(directory), name)
    if entry is None:
        raise SpecError(f"unknown field fixture {name!r}")
    return parse_field_spec(_read_json(os.path.join(directory, entry["spec"])), name=name)


def load_field(name: str, directory: Optional[str] = None) -> FieldSpec:
    return _load_field(os.path.abspath(config.fixtures_dir(directory)), name)


def resolve_group(arg: str, directory: Optional[str] = None) -> FiniteGroup:
    """
    -g: путь к JSON, короткая запись (C8, heis3, ...) или имя фикстуры.
    """
    if arg.endswith(".json") or os.path.sep in arg:
        return build_group(parse_group_spec(_read_json(arg), name=os.path.splitext(os.path.basename(arg))[0]))
    spec = parse_group_shorthand(arg)
    if spec is not None:
        return build_group(spec)
    return load_group(arg, directory)


def resolve_field(arg: str, directory: Optional[str] = None) -> FieldSpec:
    if arg.endswith(".json") or os.path.sep in arg:
        return parse_field_spec(_read_json(arg), name=os.path.splitext(os.path.basename(arg))[0])
    spec = parse_field_shorthand(arg)
    if spec is not None:
        return spec
    return load_field(arg, directory)
