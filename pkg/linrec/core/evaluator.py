"""Weak call-by-value reduction with instrumentation.

Redexes are never fired under an abstraction or inside the branches of a
conditional or recursion. `normalize` is deterministic (leftmost-outermost);
`explore` follows every redex choice to enumerate reducts up to alpha.
"""

import logging
from collections import Counter, deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import Enum

from linrec.config import Caps, settings
from linrec.core.algebra import AlgTerm
from linrec.core.terms import (
    Abs,
    App,
    Cond,
    Path,
    Rec,
    Term,
    alpha_key,
    apply,
    as_algebraic,
    is_value,
    print_term,
    replace_at,
    spine,
    subterm_at,
    substitute,
)
from linrec.core.types import Base
from linrec.errors import FuelExhausted, InvariantViolation

logger = logging.getLogger(__name__)


class RedexKind(str, Enum):
    BETA = "beta"
    CONDITIONAL = "conditional"
    RECURSIVE = "recursive"


@dataclass(frozen=True)
class Redex:
    path: Path
    kind: RedexKind
    argument: Term  # the value V, or the scrutinee of a conditional/recursion
    data: AlgTerm | None = None  # the argument as a data value, when it is one

    @property
    def argument_size(self) -> int:
        return self.argument.size


def _redex_here(m: Term, path: Path) -> Redex | None:
    if isinstance(m, App) and isinstance(m.fun, Abs) and is_value(m.arg):
        return Redex(path, RedexKind.BETA, m.arg, as_algebraic(m.arg))
    if isinstance(m, Cond | Rec):
        data = as_algebraic(m.scrutinee)
        if data is not None and data.constructor.index <= len(m.branches):
            kind = RedexKind.RECURSIVE if isinstance(m, Rec) else RedexKind.CONDITIONAL
            return Redex(path, kind, m.scrutinee, data)
    return None


def iter_redexes(m: Term, path: Path = ()) -> Iterator[Redex]:
    """Allowed redexes, leftmost-outermost first."""
    here = _redex_here(m, path)
    if here is not None:
        yield here
    if isinstance(m, App):
        yield from iter_redexes(m.fun, path + (0,))
        yield from iter_redexes(m.arg, path + (1,))
    elif isinstance(m, Cond | Rec):
        yield from iter_redexes(m.scrutinee, path + (0,))


def redexes(m: Term) -> list[Redex]:
    return list(iter_redexes(m))


def contract(m: Term) -> Term:
    """Fire the redex at the root of m."""
    match m:
        case App(Abs(binder, _, body), arg):
            return substitute(body, binder, arg)
        case Cond(scrutinee, branches):
            head, args = spine(scrutinee)
            return apply(branches[head.constructor.index - 1], *args)
        case Rec(scrutinee, branches):
            head, args = spine(scrutinee)
            calls = [Rec(a, branches) for a in args]
            return apply(branches[head.constructor.index - 1], *args, *calls)
    raise ValueError(f"no redex at the root of {print_term(m)}")


def step(m: Term, r: Redex) -> Term:
    return replace_at(m, r.path, contract(subterm_at(m, r.path)))


# ---- deterministic normalization ----


@dataclass
class RunStats:
    steps: int = 0
    max_term_size: int = 0
    max_argument_size: int = 0  # over algebraic arguments only
    counts: Counter = field(default_factory=Counter)

    def record(self, r: Redex, size_after: int) -> None:
        self.steps += 1
        self.counts[r.kind.value] += 1
        if r.data is not None:
            self.max_argument_size = max(self.max_argument_size, r.argument_size)
        self.max_term_size = max(self.max_term_size, size_after)


@dataclass(frozen=True)
class TraceLine:
    index: int
    kind: RedexKind
    path: Path
    argument_size: int
    term_size: int

    def __str__(self) -> str:
        path = ".".join(map(str, self.path)) or "root"
        return f"{self.index:>6}  {self.kind.value:<11}  {path:<16}  arg={self.argument_size:<5}  size={self.term_size}"


def normalize(
    m: Term,
    fuel: int | None = None,
    on_step: Callable[[TraceLine], None] | None = None,
) -> tuple[Term, RunStats]:
    fuel = settings.FUEL if fuel is None else fuel
    stats = RunStats(max_term_size=m.size)
    while True:
        r = next(iter_redexes(m), None)
        if r is None:
            logger.debug("normal form after %d steps", stats.steps)
            return m, stats
        if stats.steps >= fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps", stats, m)
        m = step(m, r)
        stats.record(r, m.size)
        if on_step is not None:
            on_step(TraceLine(stats.steps, r.kind, r.path, r.argument_size, m.size))


def assert_base_normal(m: Term, expected: Base | None = None, fuel: int | None = None) -> AlgTerm:
    """Normalize a closed term of base type; anything but a data value is a bug."""
    n, _ = normalize(m, fuel)
    t = as_algebraic(n)
    if t is None or (expected is not None and t.algebra != expected.algebra):
        raise InvariantViolation(
            f"closed term of base type normalized to {print_term(n)}, which is not a data value"
        )
    return t


# ---- reduct exploration ----


@dataclass
class Exploration:
    root: tuple
    states: dict[tuple, Term]
    successors: dict[tuple, set[tuple]]
    exhaustive: bool
    max_argument_size: int = 0
    max_term_size: int = 0
    arguments: set[AlgTerm] = field(default_factory=set)

    @property
    def terms(self) -> list[Term]:
        return list(self.states.values())


def successors(m: Term) -> list[Term]:
    return [step(m, r) for r in iter_redexes(m)]


def explore(m: Term, caps: Caps | None = None) -> Exploration:
    """Breadth-first search over all reduction choices, deduplicated up to alpha."""
    caps = caps or settings.caps
    root = alpha_key(m)
    ex = Exploration(root, {root: m}, {}, exhaustive=True, max_term_size=m.size)
    frontier: deque[tuple[tuple, int]] = deque([(root, 0)])
    while frontier:
        key, depth = frontier.popleft()
        n = ex.states[key]
        rs = redexes(n)
        for r in rs:
            if r.data is not None:
                ex.arguments.add(r.data)
                ex.max_argument_size = max(ex.max_argument_size, r.argument_size)
        if not rs:
            ex.successors[key] = set()
            continue
        if depth >= caps.max_steps:
            ex.exhaustive = False
            continue
        out: set[tuple] = set()
        for r in rs:
            nxt = step(n, r)
            k = alpha_key(nxt)
            out.add(k)
            if k not in ex.states:
                if len(ex.states) >= caps.max_states:
                    ex.exhaustive = False
                    continue
                ex.states[k] = nxt
                ex.max_term_size = max(ex.max_term_size, nxt.size)
                frontier.append((k, depth + 1))
        ex.successors[key] = out
    if not ex.exhaustive:
        logger.info("reduct exploration capped at %d states", len(ex.states))
    return ex


def reducts(m: Term, caps: Caps | None = None) -> tuple[list[Term], bool]:
    ex = explore(m, caps)
    return ex.terms, ex.exhaustive


def algebraic_potential_size(m: Term, caps: Caps | None = None) -> tuple[int, bool]:
    """A(M): the largest data argument of any redex of any reduct; a lower bound when capped."""
    ex = explore(m, caps)
    return ex.max_argument_size, ex.exhaustive


@dataclass
class DiamondReport:
    pairs_checked: int = 0
    violations: list[str] = field(default_factory=list)
    exhaustive: bool = True

    @property
    def holds(self) -> bool:
        return not self.violations


def check_diamond(m: Term, caps: Caps | None = None) -> DiamondReport:
    """Every two distinct one-step reducts of a reachable term share a one-step reduct."""
    ex = explore(m, caps)
    report = DiamondReport(exhaustive=ex.exhaustive)
    cache: dict[tuple, set[tuple]] = {}

    def next_keys(key: tuple) -> set[tuple]:
        if key not in cache:
            term = ex.states.get(key)
            if term is None:
                return set()
            cache[key] = {alpha_key(s) for s in successors(term)}
        return cache[key]

    for key, outs in ex.successors.items():
        ordered = sorted(outs, key=repr)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1 :]:
                if a not in ex.states or b not in ex.states:
                    report.exhaustive = False
                    continue
                report.pairs_checked += 1
                if not next_keys(a) & next_keys(b):
                    report.violations.append(
                        f"{print_term(ex.states[a])} and {print_term(ex.states[b])} do not rejoin"
                    )
    return report
