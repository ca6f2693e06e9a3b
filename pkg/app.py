# app.py
"""
Командная строка steinitz-lab.

Отчёты пишутся в stdout (JSON или таблица), логи в stderr и, при --log-file,
в файл; проваленные проверки дополнительно идут в <log-file>.failures.
Коды возврата: 0 успех, 1 провал проверки, 2 некорректный ввод,
3 расхождение двух форм 𝒲, 4 противоречивые объявленные данные.
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

import config
from classgroup import class_group, w_subgroup
from cyclo import e_field, e_tau_ell_group, gal_subgroup, validate_field_for_group
from errors import EngineAssertion, PreconditionError, SpecError, SteinitzError
from group_core import (
    center,
    conjugacy_class_profile,
    cyclic_class_representatives,
    exponent,
    normalizer_centralizer,
    phi_image,
)
from models import RunConfig
from services import fixtures
from services.scenarios import run_scenario, scenario_names
from services.suites import SUITES, run_suite
from steinitz import cal_w, check_ram_admissible, very_good_certificate
from structure_lab import classify_ell4, is_aprime_group, prime_power, verify_witnesses
from utils.tables import render_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_FORMS_DISAGREE = 3


# ---------------------
# Логирование
# ---------------------

def setup_logging(level: str, log_file: Optional[str] = None):
    root = logging.getLogger()
    root.handlers.clear()
    root.setLevel(level)
    formatter = logging.Formatter(config.LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)
    if log_file:
        handler = logging.FileHandler(log_file, encoding="utf-8")
        handler.setFormatter(formatter)
        root.addHandler(handler)

    # Отдельный логгер для проваленных проверок, по одной JSON-записи на строку
    failed_logger = logging.getLogger("failed_checks")
    failed_logger.handlers.clear()
    failed_logger.setLevel(logging.ERROR)
    if log_file:
        fh = logging.FileHandler(log_file + ".failures", encoding="utf-8")
        fh.setFormatter(logging.Formatter(config.FAILURES_LOG_FORMAT))
        failed_logger.addHandler(fh)


def _level(verbose: int) -> str:
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    return config.LOG_LEVEL


# ---------------------
# Команды
# ---------------------

def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise SpecError(f"this command needs {flag}")
    return value


def _group(cfg: RunConfig):
    return fixtures.resolve_group(_require(cfg.group, "-g/--group"), cfg.fixtures)


def _field(cfg: RunConfig):
    return fixtures.resolve_field(_require(cfg.field, "-k/--field"), cfg.fixtures)


def cmd_analyze_group(cfg: RunConfig):
    G = _group(cfg)
    ell_group = None
    try:
        ell_group = prime_power(G.order)
    except PreconditionError:
        pass
    classes = []
    for tau in cyclic_class_representatives(G):
        N, C = normalizer_centralizer(G, tau)
        entry = {
            "tau": tau,
            "label": G.label(tau),
            "order": G.element_order(tau),
            "normalizer_order": N.order,
            "centralizer_order": C.order,
            "n_over_c": N.order // C.order,
            "phi": list(phi_image(G, tau).members),
        }
        if ell_group is not None:
            entry["e_tau"] = e_tau_ell_group(G, tau)
        classes.append(entry)
    tree = is_aprime_group(G)
    report = {
        "group": G.name,
        "order": G.order,
        "exponent": exponent(G),
        "abelian": G.is_abelian(),
        "center_order": center(G).order,
        "class_profile": [{"order": o, "class_size": s, "count": c} for o, s, c in conjugacy_class_profile(G)],
        "cyclic_classes": classes,
        "aprime": tree.to_dict() if tree is not None else None,
    }
    if ell_group is not None and ell_group[0] != 2 and ell_group[1] in (3, 4):
        report["classification"] = classify_ell4(G).to_dict()
    return report, EXIT_OK


def cmd_e_fields(cfg: RunConfig):
    G, k = _group(cfg), _field(cfg)
    validate_field_for_group(k, G)
    rows = []
    for tau in cyclic_class_representatives(G):
        E = e_field(k, G, tau)
        row = {"tau": tau, "label": G.label(tau), "tau_order": G.element_order(tau),
               "t_m": list(gal_subgroup(k, E.m).members)}
        row.update(E.to_dict())
        rows.append(row)
    return {"group": G.name, "field": k.label, "e_fields": rows}, EXIT_OK


def cmd_calw(cfg: RunConfig):
    G, k = _group(cfg), _field(cfg)
    report = cal_w(k, G, cfg.bound, mode=cfg.extra.get("mode", "representatives"), i=cfg.extra.get("i", 1))
    out = {"group": G.name, "field": k.label, "bound": cfg.bound, "calw": report.to_dict()}
    return out, EXIT_OK if report.forms_agree else EXIT_FORMS_DISAGREE


def cmd_classify(cfg: RunConfig):
    G = _group(cfg)
    cls = classify_ell4(G)
    problems = verify_witnesses(G, cls)
    report = {"group": G.name, "classification": cls.to_dict(), "witness_problems": problems}
    return report, EXIT_OK if not problems else EXIT_CHECK_FAILED


def cmd_certify(cfg: RunConfig):
    G, k = _group(cfg), _field(cfg)
    report = very_good_certificate(k, G, cfg.bound)
    return {"group": G.name, "field": k.label, "bound": cfg.bound, "certificate": report.to_dict()}, EXIT_OK


def _parse_class(text: Optional[str]) -> List[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as e:
        raise SpecError(f"class vector must be comma-separated integers, got {text!r}") from e


def cmd_admissible(cfg: RunConfig):
    G, k = _group(cfg), _field(cfg)
    tau = cfg.extra.get("tau")
    if tau is None or not 0 <= tau < G.order or tau == G.identity:
        raise PreconditionError(f"--tau must be a non-identity element index of {G.name}")
    x = class_group(k).reduce(_parse_class(cfg.extra.get("cls")))
    W = w_subgroup(k, e_field(k, G, tau), cfg.bound)
    report = {
        "group": G.name,
        "field": k.label,
        "tau": tau,
        "class": list(x),
        "admissible": check_ram_admissible(k, G, tau, x, cfg.bound),
        "w": W.to_dict(),
    }
    return report, EXIT_OK


def cmd_verify(cfg: RunConfig):
    report = run_suite(cfg.suite, cfg.fixtures, seed=cfg.seed, bound=cfg.bound, jobs=cfg.jobs)
    return report, EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_reproduce(cfg: RunConfig):
    report = run_scenario(_require(cfg.scenario, "a scenario name"), cfg.fixtures, cfg.bound)
    return report, EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_list_fixtures(cfg: RunConfig):
    manifest = fixtures.load_manifest(cfg.fixtures)
    return {
        "directory": config.fixtures_dir(cfg.fixtures),
        "groups": [{"name": e["name"], "kind": e.get("kind"), "tags": e.get("tags", {})}
                   for e in fixtures.group_entries(cfg.fixtures)],
        "fields": [e["name"] for e in fixtures.field_entries(cfg.fixtures)],
        "scenarios": sorted(manifest.get("scenarios", {})),
    }, EXIT_OK


COMMANDS = {
    "analyze-group": cmd_analyze_group,
    "e-fields": cmd_e_fields,
    "calw": cmd_calw,
    "classify": cmd_classify,
    "certify": cmd_certify,
    "admissible": cmd_admissible,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
    "list-fixtures": cmd_list_fixtures,
}


# ---------------------
# Разбор аргументов
# ---------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=config.DEFAULT_PRIME_BOUND, help="prime bound for W-subgroups")
    common.add_argument("--format", dest="fmt", choices=("json", "table"), default="json")
    common.add_argument("--fixtures", default=None, help="fixture directory (overrides STEINITZ_FIXTURES)")
    common.add_argument("--log-file", default=config.LOG_FILE)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="steinitz-lab", description="Steinitz classes and the subgroup W(k,G)")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_group(p, field_too=False):
        p.add_argument("-g", "--group", required=True, help="JSON path, fixture name or shorthand (C8, heis3, ...)")
        if field_too:
            p.add_argument("-k", "--field", required=True, help="JSON path, fixture name or shorthand (Q, imag5, ...)")
        return p

    with_group(sub.add_parser("analyze-group", parents=[common]))
    with_group(sub.add_parser("e-fields", parents=[common]), field_too=True)
    calw = with_group(sub.add_parser("calw", parents=[common]), field_too=True)
    calw.add_argument("--mode", choices=("representatives", "full"), default="representatives")
    calw.add_argument("--i", type=int, choices=(0, 1), default=1)
    with_group(sub.add_parser("classify", parents=[common]))
    with_group(sub.add_parser("certify", parents=[common]), field_too=True)
    adm = with_group(sub.add_parser("admissible", parents=[common]), field_too=True)
    adm.add_argument("--tau", type=int, required=True, help="element index of the inertia generator")
    adm.add_argument("--cls", default="", help="ideal class vector, comma separated")

    verify = sub.add_parser("verify", parents=[common])
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    verify.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    verify.add_argument("--jobs", type=int, default=1)

    reproduce = sub.add_parser("reproduce", parents=[common])
    reproduce.add_argument("scenario", choices=scenario_names())

    sub.add_parser("list-fixtures", parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    extra = {key: getattr(args, key) for key in ("mode", "i", "tau", "cls") if hasattr(args, key)}
    return RunConfig(
        command=args.command,
        group=getattr(args, "group", None),
        field=getattr(args, "field", None),
        bound=args.bound,
        fmt=args.fmt,
        seed=getattr(args, "seed", config.DEFAULT_SEED),
        suite=getattr(args, "suite", "all"),
        scenario=getattr(args, "scenario", None),
        jobs=getattr(args, "jobs", 1),
        fixtures=args.fixtures,
        log_file=args.log_file,
        verbose=args.verbose,
        extra=extra,
    )


def emit(report: Dict, fmt: str):
    if fmt == "table":
        sys.stdout.write(render_report(report) + "\n")
    else:
        sys.stdout.write(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(_level(args.verbose), args.log_file)
    try:
        cfg = config_from_args(args)
        report, code = COMMANDS[cfg.command](cfg)
    except EngineAssertion as e:
        logger.error("Engine assertion: %s", e)
        return e.exit_code
    except SteinitzError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    emit(report, cfg.fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
