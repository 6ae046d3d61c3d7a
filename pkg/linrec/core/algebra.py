"""Free algebras, algebraic terms, term contexts and the canonical encodings.

An algebra is a finite list of constructors `c1_A, c2_A, ...` with arities.
The four built-ins U (unary numbers), B (binary strings), C (binary trees)
and D (binary trees with binary labels) are always part of a family.
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from linrec.errors import DecodeError


@dataclass(frozen=True)
class Constructor:
    algebra: str
    index: int  # 1-based, also the branch number in conditionals/recursions
    arity: int

    @property
    def name(self) -> str:
        return f"c{self.index}_{self.algebra}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FreeAlgebra:
    name: str
    constructors: tuple[Constructor, ...]

    @classmethod
    def declare(cls, name: str, arities: Sequence[int]) -> "FreeAlgebra":
        if not arities:
            raise ValueError(f"algebra {name} needs at least one constructor")
        if all(a > 0 for a in arities):
            raise ValueError(f"algebra {name} has no nullary constructor, so it has no terms")
        return cls(name, tuple(Constructor(name, i, a) for i, a in enumerate(arities, start=1)))

    @property
    def size(self) -> int:
        """k(A): the number of constructors, hence of branches."""
        return len(self.constructors)

    @property
    def max_arity(self) -> int:
        return max(c.arity for c in self.constructors)

    @property
    def is_word_algebra(self) -> bool:
        nullary = [c for c in self.constructors if c.arity == 0]
        return len(nullary) == 1 and all(c.arity in (0, 1) for c in self.constructors)

    def constructor(self, index: int) -> Constructor:
        return self.constructors[index - 1]

    @property
    def nullary(self) -> Constructor:
        return next(c for c in self.constructors if c.arity == 0)


UNARY = FreeAlgebra.declare("U", [1, 0])
BINARY = FreeAlgebra.declare("B", [1, 1, 0])
TREES = FreeAlgebra.declare("C", [2, 0])
LABELED_TREES = FreeAlgebra.declare("D", [2, 2, 0])

U_SUCC, U_ZERO = UNARY.constructors
B_ZERO, B_ONE, B_EMPTY = BINARY.constructors
C_NODE, C_LEAF = TREES.constructors


@dataclass(frozen=True)
class AlgebraFamily:
    algebras: tuple[FreeAlgebra, ...] = (UNARY, BINARY, TREES, LABELED_TREES)

    def __post_init__(self) -> None:
        names = [a.name for a in self.algebras]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate algebra names in {names}")
        for builtin in ("U", "B", "C", "D"):
            if builtin not in names:
                raise ValueError(f"built-in algebra {builtin} missing from the family")

    @cached_property
    def _by_name(self) -> dict[str, FreeAlgebra]:
        return {a.name: a for a in self.algebras}

    def __getitem__(self, name: str) -> FreeAlgebra:
        return self._by_name[name]

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def constructor(self, name: str) -> Constructor | None:
        """Look up `c<i>_<Alg>`; None when the name does not denote a constructor."""
        head, sep, alg = name.partition("_")
        if not sep or not head.startswith("c") or not head[1:].isdigit() or alg not in self:
            return None
        index = int(head[1:])
        algebra = self[alg]
        if not 1 <= index <= algebra.size:
            return None
        return algebra.constructor(index)

    @property
    def max_arity(self) -> int:
        """The constant K that every bound family is parameterized by."""
        return max(a.max_arity for a in self.algebras)

    def extend(self, algebra: FreeAlgebra) -> "AlgebraFamily":
        return AlgebraFamily(self.algebras + (algebra,))


DEFAULT_FAMILY = AlgebraFamily()


@dataclass(frozen=True)
class AlgTerm:
    """A closed constructor term: the data values of an algebra."""

    constructor: Constructor
    args: tuple["AlgTerm", ...] = ()
    size: int = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.args) != self.constructor.arity:
            raise ValueError(
                f"{self.constructor} takes {self.constructor.arity} arguments, got {len(self.args)}"
            )
        object.__setattr__(self, "size", 1 + sum(a.size for a in self.args))
        object.__setattr__(self, "_hash", hash((self.constructor, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def algebra(self) -> str:
        return self.constructor.algebra

    def __str__(self) -> str:
        if not self.args:
            return self.constructor.name
        parts = [self.constructor.name]
        parts += [f"({a})" if a.args else str(a) for a in self.args]
        return " ".join(parts)


@dataclass(frozen=True)
class Frame:
    """One constructor layer around a hole: `c t1 .. [.] .. tn` with the hole at `position`."""

    constructor: Constructor
    position: int  # 1-based
    siblings: tuple[AlgTerm, ...]

    def plug(self, t: AlgTerm) -> AlgTerm:
        k = self.position - 1
        return AlgTerm(self.constructor, self.siblings[:k] + (t,) + self.siblings[k:])

    @classmethod
    def around(cls, t: AlgTerm, position: int) -> "Frame":
        k = position - 1
        return cls(t.constructor, position, t.args[:k] + t.args[k + 1 :])


@dataclass(frozen=True)
class TermContext:
    """An algebraic term with exactly one hole, stored as frames from the root inward."""

    frames: tuple[Frame, ...] = ()

    @property
    def is_hole(self) -> bool:
        return not self.frames

    @property
    def size(self) -> int:
        return sum(1 + sum(s.size for s in f.siblings) for f in self.frames)

    def plug(self, t: AlgTerm) -> AlgTerm:
        for frame in reversed(self.frames):
            t = frame.plug(t)
        return t

    def extend(self, frame: Frame) -> "TermContext":
        return TermContext(self.frames + (frame,))

    def split_innermost(self) -> tuple["TermContext", Frame]:
        return TermContext(self.frames[:-1]), self.frames[-1]

    def __str__(self) -> str:
        text = "[.]"
        for frame in reversed(self.frames):
            parts = [frame.constructor.name]
            for i in range(1, frame.constructor.arity + 1):
                if i == frame.position:
                    piece = text if text == "[.]" else f"({text})"
                else:
                    arg = frame.siblings[i - 1 if i < frame.position else i - 2]
                    piece = f"({arg})" if arg.args else str(arg)
                parts.append(piece)
            text = " ".join(parts)
        return text


HOLE_CONTEXT = TermContext()


def decompositions(t: AlgTerm) -> Iterator[tuple[TermContext, AlgTerm]]:
    """Every way of writing t as u[s], root first (preorder)."""
    yield HOLE_CONTEXT, t
    for position, child in enumerate(t.args, start=1):
        frame = Frame.around(t, position)
        for u, s in decompositions(child):
            yield TermContext((frame,) + u.frames), s


# ---- encodings ----


def encode_nat(n: int) -> AlgTerm:
    if n < 0:
        raise ValueError("naturals only")
    t = AlgTerm(U_ZERO)
    for _ in range(n):
        t = AlgTerm(U_SUCC, (t,))
    return t


def decode_nat(t: AlgTerm) -> int:
    n = 0
    while t.constructor == U_SUCC:
        n += 1
        t = t.args[0]
    if t.constructor != U_ZERO:
        raise DecodeError(f"{t} is not a term of U")
    return n


def encode_binstring(s: str) -> AlgTerm:
    t = AlgTerm(B_EMPTY)
    for bit in reversed(s):
        if bit not in "01":
            raise ValueError(f"not a bit: {bit!r}")
        t = AlgTerm(B_ZERO if bit == "0" else B_ONE, (t,))
    return t


def decode_binstring(t: AlgTerm) -> str:
    bits: list[str] = []
    while t.constructor in (B_ZERO, B_ONE):
        bits.append("0" if t.constructor == B_ZERO else "1")
        t = t.args[0]
    if t.constructor != B_EMPTY:
        raise DecodeError(f"{t} is not a term of B")
    return "".join(bits)


def complete_tree(n: int) -> AlgTerm:
    """ct(n): the complete binary tree of height n in C."""
    t = AlgTerm(C_LEAF)
    for _ in range(n):
        t = AlgTerm(C_NODE, (t, t))
    return t
