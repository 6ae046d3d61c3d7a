"""Subsystem registry: loads typing disciplines from config/subsystems/*.yaml.

A subsystem fixes which types may be contracted (and may appear in the
context of a recursion branch), and whether recursion is ramified, i.e.
whether the recursion argument must sit at a tier above the result.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import yaml

from linrec.config import settings
from linrec.core.algebra import DEFAULT_FAMILY, AlgebraFamily
from linrec.core.types import Base, Type

_ALIASES = str.maketrans({"𝖠": "A", "𝖶": "W", "∅": "0", "Ø": "0", " ": ""})


class ContractionClass(str, Enum):
    ALL = "all"  # every base type
    WORDS = "words"  # base types over word algebras
    EMPTY = "empty"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Subsystem:
    id: str
    contraction: ContractionClass
    ramified: bool
    name: str = ""
    characterizes: str = ""
    description: str = ""
    predicate: Callable[[Type], bool] | None = None

    def admits(self, t: Type, family: AlgebraFamily = DEFAULT_FAMILY) -> bool:
        """Whether t belongs to the contraction class."""
        match self.contraction:
            case ContractionClass.ALL:
                return isinstance(t, Base)
            case ContractionClass.WORDS:
                return isinstance(t, Base) and family[t.algebra].is_word_algebra
            case ContractionClass.EMPTY:
                return False
        return self.predicate is not None and self.predicate(t)

    def __str__(self) -> str:
        return self.id


def custom_subsystem(
    predicate: Callable[[Type], bool], *, ramified: bool, id: str = "custom"
) -> Subsystem:
    return Subsystem(id=id, contraction=ContractionClass.CUSTOM, ramified=ramified, predicate=predicate)


def normalize_id(text: str) -> str:
    return text.translate(_ALIASES).upper()


class SubsystemRegistry:
    def __init__(self, subsystems_dir: Path | None = None):
        subsystems_dir = subsystems_dir or settings.SUBSYSTEMS_DIR
        self._systems: dict[str, Subsystem] = {}
        for path in sorted(subsystems_dir.glob("*.yaml")):
            data = yaml.safe_load(path.read_text())
            system = Subsystem(
                id=data["id"],
                name=data.get("name", data["id"]),
                contraction=ContractionClass(data["contraction"]),
                ramified=bool(data.get("ramified", False)),
                characterizes=data.get("characterizes", ""),
                description=data.get("description", "").strip(),
            )
            self._systems[normalize_id(system.id)] = system

        if not self._systems:
            raise RuntimeError(f"No subsystems found in {subsystems_dir}")

    def get(self, system_id: str) -> Subsystem:
        """Look up by id; `H(𝖠)` and `H(A)`, `RH(∅)` and `RH(0)` are the same key."""
        try:
            return self._systems[normalize_id(system_id)]
        except KeyError:
            known = ", ".join(s.id for s in self.all())
            raise KeyError(f"unknown subsystem {system_id!r}; choose one of {known}") from None

    def exists(self, system_id: str) -> bool:
        return normalize_id(system_id) in self._systems

    def weaker(self, system_id: str) -> Subsystem:
        """The registered subsystem with the same contraction class and no ramification."""
        system = self.get(system_id)
        return self.get(system.id.removeprefix("R")) if system.ramified else system

    def all(self) -> list[Subsystem]:
        """H family first, then RH, each from the largest contraction class down."""
        order = {ContractionClass.ALL: 0, ContractionClass.WORDS: 1, ContractionClass.EMPTY: 2}
        return sorted(self._systems.values(), key=lambda s: (s.ramified, order.get(s.contraction, 3)))

    def list(self) -> list[dict[str, str]]:
        return [
            {
                "id": s.id,
                "name": s.name,
                "contraction": s.contraction.value,
                "ramified": "yes" if s.ramified else "no",
                "characterizes": s.characterizes,
            }
            for s in self.all()
        ]
