"""Context semantics: saturating the closure conditions of an interaction graph.

A token label is (t, e, U, L): a data value t on edge e, a stack U of
(term context, subterm, C^R vertex) entries naming the copy of every
enclosing box, and a type context L focusing on one base occurrence in the
type of e. A positive focus travels along the edge, a negative one against
it. Trees record how each label was obtained from earlier ones; the tree
set is the least set closed under the per-vertex rules below, computed by a
worklist ordered by term size and memoized on (e, U, L).
"""

import heapq
import itertools
import logging
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass, field

from linrec.config import Caps, settings
from linrec.core.algebra import (
    HOLE_CONTEXT,
    AlgTerm,
    Frame,
    TermContext,
    decompositions,
)
from linrec.core.graph import Edge, InteractionGraph, Vertex, VertexKind
from linrec.core.types import (
    HOLE,
    Arrow,
    Base,
    Hole,
    LeftOf,
    Polarity,
    RightOf,
    Type,
    TypeContext,
    arrows,
    count_right,
    final_codomain,
    hole_base,
    polarity,
    right_spine,
    strip_right,
)
from linrec.errors import DecompositionMismatch, InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StackEntry:
    context: TermContext
    term: AlgTerm
    vertex: int

    @property
    def whole(self) -> AlgTerm:
        return self.context.plug(self.term)

    def __str__(self) -> str:
        return f"({self.context}, {self.term}, v{self.vertex})"


Stack = tuple[StackEntry, ...]  # innermost box first
LabelKey = tuple[int, Stack, TypeContext]


@dataclass(frozen=True)
class Label:
    term: AlgTerm
    edge: int
    stack: Stack
    focus: TypeContext

    @property
    def key(self) -> LabelKey:
        return (self.edge, self.stack, self.focus)

    def __str__(self) -> str:
        stack = ", ".join(map(str, self.stack))
        return f"({self.term}, e{self.edge}, [{stack}], {self.focus})"


class SemTree:
    """A node of the context semantics; children are shared, never copied."""

    __slots__ = ("label", "children")

    def __init__(self, label: Label, children: tuple["SemTree", ...] = ()):
        self.label = label
        self.children = children

    @property
    def term(self) -> AlgTerm:
        return self.label.term

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemTree):
            return NotImplemented
        return self.label == other.label and [c.label for c in self.children] == [
            c.label for c in other.children
        ]

    def __hash__(self) -> int:
        return hash(self.label)

    def __repr__(self) -> str:
        return f"SemTree{self.label}"

    def nodes(self) -> Iterator["SemTree"]:
        """Every distinct node of the tree, each shared subtree once."""
        seen: set[LabelKey] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if node.label.key in seen:
                continue
            seen.add(node.label.key)
            yield node
            stack.extend(node.children)


def tree_term(t: SemTree) -> AlgTerm:
    """L(T): the data value at the root."""
    return t.label.term


def legal_stacks(t: SemTree) -> set[Stack]:
    """U(T): every stack appearing in a label of the tree."""
    return {n.label.stack for n in t.nodes()}


def guiding_type(t: SemTree, g: InteractionGraph) -> Base:
    """The base type every label of t focuses on; disagreement is a bug."""
    found: Base | None = None
    for n in t.nodes():
        base = hole_base(g.edges[n.label.edge].type, n.label.focus)
        if base is None or (found is not None and base != found):
            raise InvariantViolation(f"label {n.label} does not focus on {found}")
        found = base
    assert found is not None
    return found


def _is_relay(node: SemTree) -> bool:
    return len(node.children) == 1 and node.children[0].term == node.term


def _locate(t: SemTree, frames: tuple[Frame, ...]) -> SemTree:
    node = t
    for frame in frames:
        while _is_relay(node):
            node = node.children[0]
        if len(node.children) != frame.constructor.arity or node.term.constructor != frame.constructor:
            raise DecompositionMismatch(f"{node.label} was not built by {frame.constructor}")
        node = node.children[frame.position - 1]
    return node


def subtree_locator(t: SemTree, u: TermContext, s: AlgTerm) -> SemTree:
    """B(T, u, s): walk from the root along u down to the subtree carrying s."""
    if u.plug(s) != t.term:
        raise DecompositionMismatch(f"{u} around {s} is not {t.term}")
    return _locate(t, u.frames)


@dataclass
class Saturation:
    graph: InteractionGraph
    trees: dict[LabelKey, SemTree] = field(default_factory=dict)
    exhaustive: bool = True
    collisions: list[tuple[Label, Label]] = field(default_factory=list)

    def __iter__(self) -> Iterator[SemTree]:
        return iter(self.trees.values())

    def __len__(self) -> int:
        return len(self.trees)

    def terms(self) -> set[AlgTerm]:
        return {t.term for t in self.trees.values()}

    def lookup(self, edge: int, stack: Stack, focus: TypeContext) -> SemTree | None:
        return self.trees.get((edge, stack, focus))


class _Saturator:
    def __init__(self, g: InteractionGraph, caps: Caps):
        self.g = g
        self.caps = caps
        self.out = Saturation(g)
        self.by_place: dict[tuple[int, Stack], list[SemTree]] = defaultdict(list)
        self.heap: list[tuple[int, int, SemTree]] = []
        self.counter = itertools.count()
        self.constants_in_box: dict[int | None, list[Vertex]] = defaultdict(list)
        self.premises_of_box: dict[int, list[Vertex]] = defaultdict(list)
        for v in g.vertices.values():
            if v.kind is VertexKind.CONSTANT and v.constructor and v.constructor.arity == 0:
                self.constants_in_box[g.vertex_box.get(v.id)].append(v)
            elif v.kind is VertexKind.BOX_PREMISE:
                self.premises_of_box[g.vertex_box[v.id]].append(v)

    # ---- worklist ----

    def emit(
        self,
        term: AlgTerm,
        edge: int,
        stack: Stack,
        focus: TypeContext,
        children: tuple[SemTree, ...] = (),
    ) -> None:
        if term.size > self.caps.max_label_size or len(stack) > self.caps.max_stack_depth:
            self.out.exhaustive = False
            return
        label = Label(term, edge, stack, focus)
        known = self.out.trees.get(label.key)
        if known is not None:
            if known.term != term:
                self.out.collisions.append((known.label, label))
            return
        heapq.heappush(self.heap, (term.size, next(self.counter), SemTree(label, children)))

    def run(self) -> Saturation:
        for v in self.constants_in_box[None]:
            self.emit(AlgTerm(v.constructor), v.ports["out"], (), HOLE)
        while self.heap:
            if len(self.out.trees) >= self.caps.max_trees:
                self.out.exhaustive = False
                break
            _, _, tree = heapq.heappop(self.heap)
            key = tree.label.key
            known = self.out.trees.get(key)
            if known is not None:
                if known.term != tree.term:
                    self.out.collisions.append((known.label, tree.label))
                continue
            self.out.trees[key] = tree
            self.by_place[(tree.label.edge, tree.label.stack)].append(tree)
            self.arrive(tree)
        if not self.out.exhaustive:
            logger.info("saturation capped at %d trees", len(self.out.trees))
        logger.debug("saturated %d trees, %d collisions", len(self.out.trees), len(self.out.collisions))
        return self.out

    def arrive(self, tree: SemTree) -> None:
        e = self.g.edges[tree.label.edge]
        if polarity(tree.label.focus) is Polarity.POSITIVE:
            vid, port = e.target, e.target_port
        else:
            vid, port = e.source, e.source_port
        if vid is None:
            return
        v = self.g.vertices[vid]
        match v.kind:
            case VertexKind.ABSTRACTION:
                self.abstraction(v, port, tree)
            case VertexKind.APPLICATION:
                self.application(v, port, tree)
            case VertexKind.CONTRACTION:
                if port == "in":
                    self.relay(tree, v.ports["left"], tree.label.focus)
                    self.relay(tree, v.ports["right"], tree.label.focus)
            case VertexKind.CONSTANT:
                self.constant(v, tree)
            case VertexKind.CONDITIONAL:
                self.conditional(v, port, tree)
            case VertexKind.RECURSION:
                self.recursion(v, port, tree)
            case VertexKind.BOX_PREMISE:
                if port == "outer":
                    self.box_entry(v, tree)

    def relay(self, tree: SemTree, edge: int, focus: TypeContext, stack: Stack | None = None) -> None:
        lab = tree.label
        self.emit(lab.term, edge, lab.stack if stack is None else stack, focus, (tree,))

    def edge(self, v: Vertex, port: str) -> Edge:
        return self.g.edges[v.ports[port]]

    # ---- multiplicative vertices ----

    def abstraction(self, v: Vertex, port: str, tree: SemTree) -> None:
        focus = tree.label.focus
        out_type = self.edge(v, "out").type
        assert isinstance(out_type, Arrow)
        if port == "out":
            if isinstance(focus, LeftOf):
                self.relay(tree, v.ports["var"], focus.inner)
            elif isinstance(focus, RightOf):
                self.relay(tree, v.ports["body"], focus.inner)
        elif port == "var":
            self.relay(tree, v.ports["out"], LeftOf(focus, out_type.cod))
        elif port == "body":
            self.relay(tree, v.ports["out"], RightOf(out_type.dom, focus))

    def application(self, v: Vertex, port: str, tree: SemTree) -> None:
        focus = tree.label.focus
        fun_type = self.edge(v, "fun").type
        assert isinstance(fun_type, Arrow)
        if port == "arg":
            self.relay(tree, v.ports["fun"], LeftOf(focus, fun_type.cod))
        elif port == "fun":
            if isinstance(focus, LeftOf):
                self.relay(tree, v.ports["arg"], focus.inner)
            elif isinstance(focus, RightOf):
                self.relay(tree, v.ports["out"], focus.inner)
        elif port == "out":
            self.relay(tree, v.ports["fun"], RightOf(fun_type.dom, focus))

    def constant(self, v: Vertex, tree: SemTree) -> None:
        c = v.constructor
        assert c is not None
        out = v.ports["out"]
        base = final_codomain(self.g.edges[out].type)
        rights, below = count_right(tree.label.focus)
        if not isinstance(below, LeftOf) or not isinstance(below.inner, Hole) or rights >= c.arity:
            return
        stack = tree.label.stack
        args: list[SemTree] = []
        for p in range(c.arity):
            ctx = right_spine([base] * p, LeftOf(HOLE, arrows([base] * (c.arity - p - 1), base)))
            found = self.out.lookup(out, stack, ctx)
            if found is None:
                return
            args.append(found)
        term = AlgTerm(c, tuple(a.term for a in args))
        self.emit(term, out, stack, right_spine([base] * c.arity, HOLE), tuple(args))

    # ---- conditional ----

    def conditional(self, v: Vertex, port: str, tree: SemTree) -> None:
        stack = tree.label.stack
        if port == "scrutinee":
            if not isinstance(tree.label.focus, Hole):
                return
            t0 = tree.term
            i, n = t0.constructor.index, t0.constructor.arity
            base, result = self.edge(v, "scrutinee").type, self.edge(v, "result").type
            for j in range(1, n + 1):
                frame = Frame.around(t0, j)
                focus = right_spine([base] * (j - 1), LeftOf(HOLE, arrows([base] * (n - j), result)))
                self.emit(t0.args[j - 1], v.branch_port(i), stack, focus, (_locate(tree, (frame,)),))
            for waiting in list(self.by_place[(v.branch_port(i), stack)]):
                if polarity(waiting.label.focus) is Polarity.POSITIVE:
                    self.conditional_branch(v, i, waiting, tree)
            for waiting in list(self.by_place[(v.ports["result"], stack)]):
                if polarity(waiting.label.focus) is Polarity.NEGATIVE:
                    self.conditional_result(v, waiting, tree)
            return
        scrutinee = self.out.lookup(v.ports["scrutinee"], stack, HOLE)
        if scrutinee is None:
            return
        if port == "result":
            self.conditional_result(v, tree, scrutinee)
        elif port.startswith("branch") and int(port[6:]) == scrutinee.term.constructor.index:
            self.conditional_branch(v, int(port[6:]), tree, scrutinee)

    def conditional_branch(self, v: Vertex, i: int, tree: SemTree, scrutinee: SemTree) -> None:
        rest = strip_right(tree.label.focus, scrutinee.term.constructor.arity)
        if rest is not None:
            self.relay(tree, v.ports["result"], rest)

    def conditional_result(self, v: Vertex, tree: SemTree, scrutinee: SemTree) -> None:
        c = scrutinee.term.constructor
        base = self.edge(v, "scrutinee").type
        self.relay(tree, v.branch_port(c.index), right_spine([base] * c.arity, tree.label.focus))

    # ---- recursion boxes ----

    def copies(self, v: Vertex, t0: AlgTerm, rest: Stack, branch: int | None = None) -> Iterator[Stack]:
        """The stacks of every copy of the box of v, optionally only copies running `branch`."""
        for u, s in decompositions(t0):
            if branch is None or s.constructor.index == branch:
                yield (StackEntry(u, s, v.id),) + rest

    def recursion(self, v: Vertex, port: str, tree: SemTree) -> None:
        stack = tree.label.stack
        base = self.edge(v, "scrutinee").type
        result = self.edge(v, "result").type
        if port == "scrutinee":
            if isinstance(tree.label.focus, Hole):
                self.recursion_scrutinee(v, tree, base, result)
        elif port == "result":
            scrutinee = self.out.lookup(v.ports["scrutinee"], stack, HOLE)
            if scrutinee is not None:
                self.recursion_result(v, tree, scrutinee, base, result)
        elif port.startswith("branch") and stack and stack[0].vertex == v.id:
            self.recursion_branch(v, int(port[6:]), tree, base, result)

    def recursion_scrutinee(self, v: Vertex, tree: SemTree, base: Type, result: Type) -> None:
        rest, t0 = tree.label.stack, tree.term
        for copy in self.copies(v, t0, rest):
            entry = copy[0]
            s = entry.term
            n = s.constructor.arity
            for j in range(1, n + 1):
                focus = right_spine(
                    [base] * (j - 1), LeftOf(HOLE, arrows([base] * (n - j) + [result] * n, result))
                )
                frames = entry.context.frames + (Frame.around(s, j),)
                self.emit(s.args[j - 1], v.branch_port(s.constructor.index), copy, focus, (_locate(tree, frames),))
        for waiting in list(self.by_place[(v.ports["result"], rest)]):
            if polarity(waiting.label.focus) is Polarity.NEGATIVE:
                self.recursion_result(v, waiting, tree, base, result)
        for p in self.premises_of_box[v.id]:
            for waiting in list(self.by_place[(p.ports["outer"], rest)]):
                self.box_entry(p, waiting, tree)
        for c in self.constants_in_box[v.id]:
            branch = self.g.vertex_branch.get(c.id)
            for copy in self.copies(v, t0, rest, branch):
                self.emit(AlgTerm(c.constructor), c.ports["out"], copy, HOLE)

    def recursion_result(self, v: Vertex, tree: SemTree, scrutinee: SemTree, base: Type, result: Type) -> None:
        t0 = scrutinee.term
        n = t0.constructor.arity
        stack = (StackEntry(HOLE_CONTEXT, t0, v.id),) + tree.label.stack
        focus = right_spine([base] * n, right_spine([result] * n, tree.label.focus))
        self.relay(tree, v.branch_port(t0.constructor.index), focus, stack)

    def recursion_branch(self, v: Vertex, i: int, tree: SemTree, base: Type, result: Type) -> None:
        top, rest = tree.label.stack[0], tree.label.stack[1:]
        s = top.term
        n = s.constructor.arity
        if s.constructor.index != i:
            return
        after_data = strip_right(tree.label.focus, n)
        if after_data is None:
            return
        rights, below = count_right(after_data)
        if rights >= n:
            # this copy produced its result
            answer = strip_right(after_data, n)
            assert answer is not None
            if top.context.is_hole:
                self.relay(tree, v.ports["result"], answer, rest)
                return
            outer, frame = top.context.split_innermost()
            parent = frame.plug(s)
            m, k = parent.constructor.arity, frame.position
            focus = right_spine(
                [base] * m, right_spine([result] * (k - 1), LeftOf(answer, arrows([result] * (m - k), result)))
            )
            stack = (StackEntry(outer, parent, v.id),) + rest
            self.relay(tree, v.branch_port(parent.constructor.index), focus, stack)
        elif isinstance(below, LeftOf):
            # the copy asks its k-th recursive argument, i.e. the copy on the k-th child
            k = rights + 1
            child = s.args[k - 1]
            entry = StackEntry(top.context.extend(Frame.around(s, k)), child, v.id)
            m = child.constructor.arity
            focus = right_spine([base] * m, right_spine([result] * m, below.inner))
            self.relay(tree, v.branch_port(child.constructor.index), focus, (entry,) + rest)

    def box_entry(self, p: Vertex, tree: SemTree, scrutinee: SemTree | None = None) -> None:
        v = self.g.vertices[self.g.vertex_box[p.id]]
        rest = tree.label.stack
        if scrutinee is None:
            scrutinee = self.out.lookup(v.ports["scrutinee"], rest, HOLE)
            if scrutinee is None:
                return
        for copy in self.copies(v, scrutinee.term, rest, self.g.vertex_branch.get(p.id)):
            self.relay(tree, p.ports["inner"], tree.label.focus, copy)


def enumerate_trees(g: InteractionGraph, caps: Caps | None = None) -> Saturation:
    """The tree set of g, or the part of it reachable within the caps."""
    return _Saturator(g, caps or settings.caps).run()


def dump_tree(t: SemTree) -> str:
    """Indented text, one node per line; a shared subtree is printed once."""
    lines: list[str] = []
    seen: set[LabelKey] = set()

    def walk(node: SemTree, depth: int) -> None:
        pad = "  " * depth
        if node.label.key in seen and node.children:
            lines.append(f"{pad}{node.label} ...")
            return
        seen.add(node.label.key)
        lines.append(f"{pad}{node.label}")
        for c in node.children:
            walk(c, depth + 1)

    walk(t, 0)
    return "\n".join(lines)
