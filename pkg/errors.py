# errors.py
"""
Иерархия исключений. У каждого класса свой exit_code, который app.py
отдаёт наружу как код возврата CLI.
"""


class SteinitzError(Exception):
    exit_code = 2


class SpecError(SteinitzError):
    """Некорректная спецификация группы/поля или отсутствующие фикстуры."""
    exit_code = 2


class OrderCapError(SpecError):
    pass


class GroupConstructionError(SpecError):
    """Действие не автоморфизмами или соотношения противоречивы."""


class PreconditionError(SpecError):
    pass


class UnsupportedBranchError(SteinitzError):
    exit_code = 2


class NoSolutionError(SteinitzError):
    exit_code = 2


class DeclaredDataError(SteinitzError):
    """Объявленные данные поля противоречат сами себе или потоку простых."""
    exit_code = 4


class EngineAssertion(AssertionError):
    """Объект, существование которого гарантировано, не найден."""
    exit_code = 1
