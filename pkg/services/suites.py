# services/suites.py
"""
Проверочные наборы свойств для команды verify.

Каждый набор разбит на независимые задания (фикстура группы × поле).
Задания выполняются в ProcessPoolExecutor при --jobs > 1, результаты
сливаются и сортируются, так что отчёт не зависит от расписания.
Проваленные проверки уходят в логгер "failed_checks" одной JSON-строкой.
"""
import hashlib
import json
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional

from sympy import divisors, primefactors

import config
from classgroup import ClassSubgroup, FiniteAbelianGroup, cyclotomic_power_inclusion, power_subgroup, w_subgroup
from cyclo import EQUAL, SUBFIELD, EFieldDescriptor, e_field, e_field_compare, gal_subgroup
from errors import EngineAssertion, SpecError, SteinitzError
from group_core import center, exponent, is_normal
from models import ResidueSubgroup
from services import fixtures
from services.oracle import oracle_w_subgroup
from steinitz import RamificationDatum, cal_w, check_ram_admissible, max_normalizer_formula, \
    steinitz_from_ramification, very_good_certificate
from structure_lab import KIND_TYPE3, burnside_check, classify_ell4, exponent_ell_split, prime_power, verify_witnesses
from timer_utils import timer

logger = logging.getLogger(__name__)
failed_logger = logging.getLogger("failed_checks")

SUITES = (
    "efields",
    "powers",
    "w_mono",
    "w_oracle",
    "cyclotomic_powers",
    "product_forms",
    "discriminant",
    "ell4",
    "burnside",
    "type3",
    "very_good",
)


def rng_for(seed: int, key: str) -> random.Random:
    """Детерминированный генератор на пару (seed, key)."""
    h = hashlib.blake2b(f"{seed}:{key}".encode(), digest_size=16).digest()
    return random.Random(int.from_bytes(h, "big"))


@dataclass
class Job:
    suite: str
    group: Optional[str]
    field: Optional[str]
    directory: str
    seed: int
    bound: int

    @property
    def key(self) -> str:
        return f"{self.suite}:{self.group}:{self.field}"


@dataclass
class SuiteResult:
    checks: Dict[str, Dict[str, object]] = field(default_factory=dict)
    failures: List[Dict[str, object]] = field(default_factory=list)

    def _counts(self, check: str) -> Dict[str, object]:
        return self.checks.setdefault(check, {"passed": 0, "failed": 0, "lemma": fixtures.check_anchor(check)})

    def record(self, job: Job, check: str, ok: bool, detail=None):
        counts = self._counts(check)
        if ok:
            counts["passed"] += 1
            return
        counts["failed"] += 1
        self.failures.append({
            "suite": job.suite,
            "check": check,
            "lemma": counts["lemma"],
            "fixture": job.group,
            "field": job.field,
            "detail": detail,
        })

    def merge(self, other: "SuiteResult"):
        for check, counts in other.checks.items():
            mine = self._counts(check)
            mine["passed"] += counts["passed"]
            mine["failed"] += counts["failed"]
        self.failures.extend(other.failures)

    @property
    def passed(self) -> bool:
        return all(c["failed"] == 0 for c in self.checks.values())

    def to_dict(self):
        return {
            "checks": {name: dict(self.checks[name]) for name in sorted(self.checks)},
            "failures": sorted(self.failures, key=lambda f: json.dumps(f, sort_keys=True, default=str)),
            "passed": self.passed,
        }


# ---------------------
# Выбор фикстур
# ---------------------

def _entries(directory: str) -> List[Dict]:
    return fixtures.group_entries(directory)


def _tags(entry: Dict) -> Dict:
    return entry.get("tags", {})


def _ell_power_entries(directory: str) -> List[Dict]:
    out = []
    for entry in _entries(directory):
        tags = _tags(entry)
        ell = tags.get("ell")
        if ell and ell != 2 and tags.get("order") in (ell ** 3, ell ** 4):
            out.append(entry)
    return out


def _suite_fields(directory: str) -> List[str]:
    known = {e["name"] for e in fixtures.field_entries(directory)}
    missing = [name for name in config.SUITE_FIELDS if name not in known]
    if missing:
        raise SpecError(f"field fixtures missing from the manifest: {', '.join(missing)}")
    return list(config.SUITE_FIELDS)


def _descriptors(k, m: int) -> List[EFieldDescriptor]:
    """Все (m, S) с S ≤ T_m(k); S порождены не более чем двумя элементами."""
    T = gal_subgroup(k, m)
    seen = {}
    for a in T.members:
        for b in T.members:
            S = ResidueSubgroup.generated_by(m, [a, b])
            seen[S.members] = S
    return [EFieldDescriptor(m, seen[key]) for key in sorted(seen)]


def plan(suite: str, directory: str, seed: int, bound: int) -> List[Job]:
    def job(group=None, field_name=None):
        return Job(suite, group, field_name, directory, seed, bound)

    if suite == "powers":
        return [job()]
    if suite in ("w_mono", "cyclotomic_powers"):
        return [job(field_name=f) for f in _suite_fields(directory)]
    if suite == "w_oracle":
        return [job(field_name=f) for f in _suite_fields(directory)
                if fixtures.load_field(f, directory).kind == "imag_quadratic"]
    if suite == "efields":
        names = [e["name"] for e in _entries(directory) if _tags(e).get("order", 0) <= config.EFIELDS_MAX_ORDER]
        return [job(n, f) for n in names for f in _suite_fields(directory)]
    if suite == "product_forms":
        return [job(e["name"], f) for e in _entries(directory) for f in _suite_fields(directory)]
    if suite in ("discriminant", "very_good"):
        return [job(e["name"], f) for e in _entries(directory) if _tags(e).get("odd")
                for f in _suite_fields(directory)]
    if suite in ("ell4", "burnside", "type3"):
        return [job(e["name"]) for e in _ell_power_entries(directory)]
    raise SpecError(f"unknown suite {suite!r}; known: {', '.join(SUITES + ('all',))}")


# ---------------------
# Наборы
# ---------------------

def _efields(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    k = fixtures.load_field(job.field, job.directory)

    def same(E1, E2):
        return e_field_compare(E1, E2, k) == EQUAL

    # все τ ≠ 1 и все n с τⁿ ≠ 1, то есть 1 ≤ n < o(τ)
    for tau in range(G.order):
        if tau == G.identity:
            continue
        E = e_field(k, G, tau)
        o = G.element_order(tau)
        for n in range(1, o):
            rel = e_field_compare(e_field(k, G, G.power(tau, n)), E, k)
            result.record(job, "power_inclusion", rel in (EQUAL, SUBFIELD), {"tau": tau, "n": n, "relation": rel})
        for x in sorted({int(c) for c in G.conjugates_of(tau)}):
            result.record(job, "conjugation_invariance", same(e_field(k, G, x), E), {"tau": tau, "conjugate": x})
        for u in range(2, o):
            if gcd(u, o) == 1:
                result.record(job, "generator_independence", same(e_field(k, G, G.power(tau, u)), E),
                              {"tau": tau, "u": u})

    if G.split is not None:
        K, embedding = G.split.complement_group()
        for x in range(K.order):
            if x == K.identity:
                continue
            inner, outer = e_field(k, K, x), e_field(k, G, int(embedding[x]))
            result.record(job, "semidirect_restriction", inner.to_dict() == outer.to_dict(),
                          {"element": int(embedding[x]), "in_complement": inner.to_dict(), "in_group": outer.to_dict()})

    orders = sorted({int(o) for o in G.orders} - {1})
    moduli = sorted({lcm(a, b) for a in orders for b in orders})
    for m in moduli:
        T = gal_subgroup(k, m)
        for d in divisors(m)[:-1]:
            result.record(job, "tower_consistency", T.reduce(d) == gal_subgroup(k, d), {"m": m, "d": d})


def _random_abelian(rng: random.Random):
    divs = sorted(rng.randint(2, config.POWERS_MAX_DIVISOR) for _ in range(rng.randint(1, 3)))
    # цепочка делимости: d₁ | d₂ | d₃
    chain = []
    for d in divs:
        chain.append(d if not chain else lcm(chain[-1], d))
    ambient = FiniteAbelianGroup(chain)
    gens = [tuple(rng.randrange(d) for d in chain) for _ in range(rng.randint(1, 2))]
    return ambient, ClassSubgroup.generated(ambient, gens)


def _powers(job: Job, result: SuiteResult):
    rng = rng_for(job.seed, job.key)
    for i in range(config.POWERS_INSTANCES):
        B, A = _random_abelian(rng)
        m = rng.randint(1, 12)
        d = rng.choice(divisors(m))
        big, small = power_subgroup(A, Fraction(m, 2), B), power_subgroup(A, Fraction(d, 2), B)
        result.record(job, "divisor_inclusion", big.issubset(small),
                      {"instance": i, "divisors": list(B.divisors), "m": m, "d": d})

        B, A = _random_abelian(rng)
        ms = [rng.randint(1, 12) for _ in range(rng.randint(2, 3))]
        g = 0
        for x in ms:
            g = gcd(g, x)
        joined = ClassSubgroup.trivial(B)
        for x in ms:
            joined = joined.join(power_subgroup(A, Fraction(x, 2), B))
        result.record(job, "gcd_join", joined == power_subgroup(A, Fraction(g, 2), B),
                      {"instance": i, "divisors": list(B.divisors), "ms": ms})

    B = FiniteAbelianGroup((2,))
    A = ClassSubgroup.trivial(B)
    half = power_subgroup(power_subgroup(A, 2, B), Fraction(1, 2), B)
    result.record(job, "half_of_square", half != A and half.order == 2, {"order": half.order})


def _w_mono(job: Job, result: SuiteResult):
    k = fixtures.load_field(job.field, job.directory)
    descs = [E for m in config.W_ORACLE_MODULI for E in _descriptors(k, m)]
    for E1 in descs:
        for E2 in descs:
            if E1 is E2 or e_field_compare(E1, E2, k) not in (EQUAL, SUBFIELD):
                continue
            W1, W2 = w_subgroup(k, E1, job.bound).subgroup, w_subgroup(k, E2, job.bound).subgroup
            result.record(job, "w_reverse_inclusion", W2.issubset(W1),
                          {"smaller": E1.to_dict(), "larger": E2.to_dict()})


def _w_oracle(job: Job, result: SuiteResult):
    k = fixtures.load_field(job.field, job.directory)
    for m in config.W_ORACLE_MODULI:
        for E in _descriptors(k, m):
            ours = w_subgroup(k, E, job.bound).subgroup
            theirs = oracle_w_subgroup(k, E, job.bound)
            result.record(job, "oracle_agreement", ours == theirs,
                          {"descriptor": E.to_dict(), "stream": ours.to_dict(), "oracle": theirs.to_dict()})


def _cyclotomic_powers(job: Job, result: SuiteResult):
    k = fixtures.load_field(job.field, job.directory)
    for m in range(2, 10):
        for n in range(2, 10):
            if m * n > 36 or any(m % q for q in primefactors(n)):
                continue
            result.record(job, "cyclotomic_power_inclusion", cyclotomic_power_inclusion(k, m, n, job.bound), {"m": m, "n": n})


def _product_forms(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    k = fixtures.load_field(job.field, job.directory)
    reports = {}
    for i in (0, 1):
        reports[i] = cal_w(k, G, job.bound, i=i)
        result.record(job, f"product_forms_agree_i{i}", reports[i].forms_agree,
                      {"element_form": reports[i].subgroup.to_dict(), "ell_form": reports[i].ell_form.to_dict()})
    full = cal_w(k, G, job.bound, mode="full")
    result.record(job, "full_enumeration_matches", full.subgroup == reports[1].subgroup,
                  {"full": full.subgroup.to_dict(), "representatives": reports[1].subgroup.to_dict()})


def _discriminant(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    k = fixtures.load_field(job.field, job.directory)
    rng = rng_for(job.seed, job.key)
    upper = cal_w(k, G, job.bound).subgroup
    taus = [g for g in range(G.order) if g != G.identity]
    for i in range(config.RAMIFICATION_PROFILES):
        data = []
        for _ in range(rng.randint(1, 3)):
            tau = rng.choice(taus)
            W = w_subgroup(k, e_field(k, G, tau), job.bound).subgroup
            x = W.random_element(rng)
            if not check_ram_admissible(k, G, tau, x, job.bound):
                raise EngineAssertion(f"{G.name}: sampled class {x} is not admissible at {tau}")
            data.append(RamificationDatum(x, tau))
        st = steinitz_from_ramification(k, G, data)
        result.record(job, "discriminant_class_in_calw", upper.contains(st),
                      {"profile": i, "data": [[list(d.cls), d.inertia_gen] for d in data], "class": list(st)})


def _entry_for(job: Job) -> Dict:
    return next(e for e in _entries(job.directory) if e["name"] == job.group)


def _ell4(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    entry = _entry_for(job)
    cls = classify_ell4(G)
    expected = entry.get("kind")
    result.record(job, "kind_matches_manifest", expected is None or cls.kind == expected,
                  {"expected": expected, "got": cls.kind})
    problems = verify_witnesses(G, cls)
    result.record(job, "witnesses_verified", not problems, {"problems": problems})
    ell, n = prime_power(G.order)
    if n == 4 and exponent(G) == ell * ell and not G.is_abelian():
        for name in _suite_fields(job.directory):
            k = fixtures.load_field(name, job.directory)
            calw = cal_w(k, G, job.bound).subgroup
            formula = max_normalizer_formula(k, G, job.bound)
            result.record(job, "max_normalizer_formula", calw == formula,
                          {"field": name, "calw": calw.to_dict(), "formula": formula.to_dict()})


def _burnside(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    ell, n = prime_power(G.order)
    try:
        A = burnside_check(G)
        ok = A.order == ell ** (n - 1) and A.is_abelian() and is_normal(G, A)
    except EngineAssertion as e:
        ok, A = False, None
        logger.error("%s: %s", G.name, e)
    result.record(job, "normal_abelian_witness", ok, {"order": None if A is None else A.order})
    if exponent(G) == ell:
        try:
            H, K = exponent_ell_split(G)
            ok = H.order == ell ** (n - 1) and K.order == ell and len(H._set & K._set) == 1
        except EngineAssertion as e:
            ok = False
            logger.error("%s: %s", G.name, e)
        result.record(job, "exponent_ell_split", ok, {"center_order": center(G).order})


def _type3(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    ell, n = prime_power(G.order)
    if n != 4 or G.is_abelian() or exponent(G) != ell * ell:
        return
    cls = classify_ell4(G, with_alternates=False)
    if cls.kind != KIND_TYPE3:
        return
    projector = cls.projector()
    for h1 in cls.H.members:
        for h2 in cls.H.members:
            try:
                problems = projector.check_pair(h1, h2)
            except EngineAssertion as e:
                problems = [str(e)]
            result.record(job, "projection_verified", not problems,
                          {"h1": h1, "h2": h2, "case": projector.case, "problems": problems})


def _very_good(job: Job, result: SuiteResult):
    G = fixtures.load_group(job.group, job.directory)
    k = fixtures.load_field(job.field, job.directory)
    report = very_good_certificate(k, G, job.bound)
    result.record(job, "certificate_equal", report.equal,
                  {"route": report.route, "upper": report.upper.to_dict(), "lower": report.lower.to_dict()})


_RUNNERS = {
    "efields": _efields,
    "powers": _powers,
    "w_mono": _w_mono,
    "w_oracle": _w_oracle,
    "cyclotomic_powers": _cyclotomic_powers,
    "product_forms": _product_forms,
    "discriminant": _discriminant,
    "ell4": _ell4,
    "burnside": _burnside,
    "type3": _type3,
    "very_good": _very_good,
}


def run_job(job: Job) -> SuiteResult:
    result = SuiteResult()
    with timer(job.key):
        try:
            _RUNNERS[job.suite](job, result)
        except SteinitzError as e:
            # ошибка данных в одном задании не прерывает набор
            result.record(job, "job_completed", False, {"error": f"{type(e).__name__}: {e}"})
    return result


def _run_jobs(jobs: List[Job], workers: int) -> SuiteResult:
    merged = SuiteResult()
    if workers <= 1 or len(jobs) <= 1:
        results = [run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_job, jobs))
    for r in results:
        merged.merge(r)
    return merged


def run_suite(suite: str, directory: Optional[str] = None, seed: int = config.DEFAULT_SEED,
              bound: int = config.DEFAULT_PRIME_BOUND, jobs: int = 1) -> Dict[str, object]:
    directory = os.path.abspath(config.fixtures_dir(directory))
    fixtures.load_manifest(directory)
    names = list(SUITES) if suite == "all" else [suite]
    reports = {}
    for name in names:
        planned = plan(name, directory, seed, bound)
        logger.info("Suite %s: %d jobs", name, len(planned))
        result = _run_jobs(planned, jobs)
        for failure in result.to_dict()["failures"]:
            failed_logger.error(json.dumps(failure, ensure_ascii=False, default=str))
        reports[name] = result.to_dict()
    report = {"seed": seed, "bound": bound}
    if suite == "all":
        report["suite"] = "all"
        report["suites"] = reports
        report["passed"] = all(r["passed"] for r in reports.values())
    else:
        report["suite"] = suite
        report.update(reports[suite])
    return report
