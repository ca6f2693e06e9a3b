# models.py
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Tuple

from errors import PreconditionError


def fraction_to_json(t: Fraction):
    """Целое как int, полуцелое как строка "p/q" (так стабильнее в JSON)."""
    t = Fraction(t)
    if t.denominator == 1:
        return t.numerator
    return f"{t.numerator}/{t.denominator}"


@dataclass(frozen=True)
class ResidueSubgroup:
    """
    Подгруппа (Z/mZ)^×, хранится как отсортированный кортеж вычетов.
    Для m = 1 единственный элемент записывается как 0.
    """
    modulus: int
    members: Tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise PreconditionError(f"modulus must be positive, got {self.modulus}")
        one = 1 % self.modulus
        if one not in self.members:
            raise PreconditionError(f"residue subgroup mod {self.modulus} must contain 1")
        if self.modulus > 1 and any(gcd(a, self.modulus) != 1 for a in self.members):
            raise PreconditionError(f"residues mod {self.modulus} must be units")

    def check_closed(self):
        # Квадратичная проверка, только для объявленных данных
        members = set(self.members)
        for a in self.members:
            for b in self.members:
                if (a * b) % self.modulus not in members:
                    raise PreconditionError(f"residues mod {self.modulus} are not closed: {a}*{b}")

    @classmethod
    def from_residues(cls, modulus: int, residues: Iterable[int]) -> "ResidueSubgroup":
        return cls(modulus, tuple(sorted({r % modulus for r in residues})))

    @classmethod
    def generated_by(cls, modulus: int, gens: Iterable[int]) -> "ResidueSubgroup":
        gens = [g % modulus for g in gens]
        members = {1 % modulus}
        frontier = list(members)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = (x * g) % modulus
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return cls(modulus, tuple(sorted(members)))

    @classmethod
    def trivial(cls, modulus: int) -> "ResidueSubgroup":
        return cls(modulus, (1 % modulus,))

    @classmethod
    def units(cls, modulus: int) -> "ResidueSubgroup":
        if modulus == 1:
            return cls(1, (0,))
        return cls(modulus, tuple(a for a in range(1, modulus) if gcd(a, modulus) == 1))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, a: int) -> bool:
        return a % self.modulus in self.members

    def reduce(self, modulus: int) -> "ResidueSubgroup":
        """Образ при редукции по делителю модуля."""
        if self.modulus % modulus:
            raise PreconditionError(f"{modulus} does not divide {self.modulus}")
        return ResidueSubgroup.from_residues(modulus, self.members)

    def intersect(self, other: "ResidueSubgroup") -> "ResidueSubgroup":
        if self.modulus != other.modulus:
            raise PreconditionError("intersection of residue subgroups with different moduli")
        return ResidueSubgroup(self.modulus, tuple(a for a in self.members if a in other.members))

    def issubset(self, other: "ResidueSubgroup") -> bool:
        return self.modulus == other.modulus and set(self.members) <= set(other.members)

    def coset_order(self, a: int, ambient: "ResidueSubgroup") -> int:
        """Порядок класса a·self в ambient/self."""
        if a not in ambient:
            raise PreconditionError(f"{a} mod {self.modulus} is outside the ambient residue group")
        f, x = 1, a % self.modulus
        while x not in self.members:
            x = (x * a) % self.modulus
            f += 1
        return f

    def to_dict(self):
        return {"m": self.modulus, "s": list(self.members)}


@dataclass
class RunConfig:
    command: str
    group: Optional[str] = None
    field: Optional[str] = None
    bound: int = 1000
    fmt: str = "json"
    seed: int = 1
    suite: str = "all"
    scenario: Optional[str] = None
    jobs: int = 1
    fixtures: Optional[str] = None
    log_file: Optional[str] = None
    verbose: int = 0
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.bound < 2:
            raise PreconditionError(f"prime bound must be at least 2, got {self.bound}")
        if self.jobs < 1:
            raise PreconditionError(f"jobs must be positive, got {self.jobs}")
        if self.fmt not in ("json", "table"):
            raise PreconditionError(f"unknown output format {self.fmt!r}")
