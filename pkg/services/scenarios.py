# services/scenarios.py
"""
Сценарии reproduce: пересчёт известных примеров и сравнение с ожидаемыми
значениями из manifest.json (раздел "scenarios").
"""
import logging
from typing import Dict, List, Optional, Tuple

import config
from classgroup import power_subgroup, w_cyclotomic
from errors import SpecError
from services import fixtures
from steinitz import cal_w, max_normalizer_formula, very_good_certificate
from timer_utils import timer

logger = logging.getLogger(__name__)

SCENARIOS = ("c8_example", "max_exponent", "exponent_ell", "max_normalizer")


def scenario_names() -> Tuple[str, ...]:
    """Имена для reproduce: свои и метки из anchors.json."""
    return SCENARIOS + tuple(sorted(fixtures.scenario_aliases()))


class ScenarioReport:
    def __init__(self, name: str):
        self.name = name
        self.checks: List[Dict[str, object]] = []

    def expect(self, check: str, expected, got):
        passed = expected == got
        self.checks.append({"check": check, "expected": expected, "got": got, "passed": passed})
        if not passed:
            logger.warning("Scenario %s: %s expected %r, got %r", self.name, check, expected, got)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self):
        return {
            "scenario": self.name,
            "lemma": fixtures.scenario_anchor(self.name),
            "checks": list(self.checks),
            "passed": self.passed,
        }


def _c8_example(entry: Dict, directory: str, bound: int, report: ScenarioReport):
    k = fixtures.load_field(entry["field"], directory)
    G = fixtures.load_group(entry["group"], directory)
    expected = entry["expected"]
    calw = cal_w(k, G, bound)
    W = w_cyclotomic(k, G.order, bound)
    report.expect("calw_order", expected["calw_order"], calw.order)
    report.expect("w_cyclotomic_order", expected["w_order"], W.order)
    report.expect("calw_is_class_group", True, calw.subgroup.index() == 1)
    report.expect("strict_inclusion", True, W.subgroup.issubset(calw.subgroup) and W.order < calw.order)


def _max_exponent(entry: Dict, directory: str, bound: int, report: ScenarioReport):
    k = fixtures.load_field(entry["field"], directory)
    G = fixtures.load_group(entry["group"], directory)
    ell, n = entry["ell"], entry["n"]
    calw = cal_w(k, G, bound).subgroup
    closed = power_subgroup(w_cyclotomic(k, ell ** (n - 2), bound).subgroup, (ell - 1) // 2 * ell, calw.ambient)
    report.expect("calw_order", entry["expected"]["calw_order"], calw.order)
    report.expect("closed_form_agrees", True, calw == closed)
    certificate = very_good_certificate(k, G, bound)
    report.expect("certificate_route", "max_exponent", certificate.route)
    report.expect("certificate_equal", True, certificate.equal)


def _exponent_ell(entry: Dict, directory: str, bound: int, report: ScenarioReport):
    k = fixtures.load_field(entry["field"], directory)
    G = fixtures.load_group(entry["group"], directory)
    ell, n = entry["ell"], entry["n"]
    calw = cal_w(k, G, bound).subgroup
    closed = power_subgroup(w_cyclotomic(k, ell, bound).subgroup, (ell - 1) // 2 * ell ** (n - 1), calw.ambient)
    report.expect("calw_order", entry["expected"]["calw_order"], calw.order)
    report.expect("closed_form_agrees", True, calw == closed)
    certificate = very_good_certificate(k, G, bound)
    report.expect("certificate_route", "exponent_ell", certificate.route)
    report.expect("certificate_equal", True, certificate.equal)


def _max_normalizer(entry: Dict, directory: str, bound: int, report: ScenarioReport):
    for field_name in entry["fields"]:
        k = fixtures.load_field(field_name, directory)
        for group_name in entry["groups"]:
            G = fixtures.load_group(group_name, directory)
            calw = cal_w(k, G, bound).subgroup
            report.expect(f"{group_name}/{field_name}", True, calw == max_normalizer_formula(k, G, bound))


_RUNNERS = {
    "c8_example": _c8_example,
    "max_exponent": _max_exponent,
    "exponent_ell": _exponent_ell,
    "max_normalizer": _max_normalizer,
}


def run_scenario(name: str, directory: Optional[str] = None, bound: int = config.DEFAULT_PRIME_BOUND) -> Dict:
    name = fixtures.scenario_aliases().get(name, name)
    if name not in _RUNNERS:
        raise SpecError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")
    directory = config.fixtures_dir(directory)
    entry = fixtures.scenario_entry(name, directory)
    report = ScenarioReport(name)
    with timer(f"scenario {name}"):
        _RUNNERS[name](entry, directory, bound, report)
    logger.info("Scenario %s: %s", name, "PASS" if report.passed else "FAIL")
    return report.to_dict()
