"""In-memory model of layered parallel-treebank annotation.

A corpus is built from four layers per language pair: constituent trees
(terminals plus nonterminal nodes with edge labels), predicate-argument
structures (predicates with class and group, role-named arguments),
a binding layer attaching each predicate/argument to tree nodes (with
optional excluded sub-nodes and binding tags), and a cross-lingual
alignment layer of tagged predicate/argument links.

All objects are immutable; loaders normalize collection order at
construction so that structurally equal annotations compare equal
regardless of source file order (token order excepted, which is
meaningful). Read operations are safe to share across threads.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

PRED_CLASSES = ("v", "n", "a")

DEFAULT_BINDING_TAGS = frozenset(("pv", "imp"))
DEFAULT_ALIGNMENT_TAGS = frozenset(("abs-opp", "incomp"))

# Nonterminal node ids live in a disjoint range from terminal indices,
# following the NEGRA/TIGER export convention; 0 addresses the virtual root.
VIRTUAL_ROOT = 0
MIN_NONTERMINAL_ID = 500

_NODE_REF_RE = re.compile(r"^([tn])([0-9]+)$")
_PRED_ID_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class ResolutionError(LookupError):
    """An identifier (node, predicate, argument, sentence, language) does not resolve."""


class EmptyYieldError(ValueError):
    """A binding's included-minus-excluded token set is empty."""


def is_uppercase_name(text: str) -> bool:
    """True if text is a valid lemma/role/group name: uppercase letters, _ or -."""
    if not text:
        return False
    return all(c in "_-" or unicodedata.category(c) == "Lu" for c in text)


def is_pred_id(text: str) -> bool:
    return bool(_PRED_ID_RE.match(text))


@dataclass(frozen=True)
class NodeRef:
    """Reference to a tree node: kind 't' + surface index, or 'n' + nonterminal id."""

    kind: str
    num: int

    @classmethod
    def parse(cls, text: str) -> "NodeRef":
        m = _NODE_REF_RE.match(text)
        if not m:
            raise ValueError(f"malformed node reference {text!r} (expected t<k> or n<id>)")
        return cls(m.group(1), int(m.group(2)))

    @classmethod
    def terminal(cls, index: int) -> "NodeRef":
        return cls("t", index)

    @classmethod
    def nonterminal(cls, node_id: int) -> "NodeRef":
        return cls("n", node_id)

    @property
    def sort_key(self) -> tuple[int, int]:
        # terminals before nonterminals, each ascending
        return (0 if self.kind == "t" else 1, self.num)

    def __str__(self) -> str:
        return f"{self.kind}{self.num}"


@dataclass(frozen=True)
class ElemRef:
    """Reference to a predicate (pred_id) or one of its arguments (pred_id + role)."""

    pred_id: str
    role: str | None = None

    @classmethod
    def parse(cls, text: str) -> "ElemRef":
        pred_id, dot, role = text.partition(".")
        if not is_pred_id(pred_id):
            raise ValueError(f"malformed element reference {text!r}: bad predicate id")
        if not dot:
            return cls(pred_id)
        if not is_uppercase_name(role):
            raise ValueError(f"malformed element reference {text!r}: bad role name")
        return cls(pred_id, role)

    @property
    def is_predicate(self) -> bool:
        return self.role is None

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.pred_id, self.role or "")

    def __str__(self) -> str:
        return self.pred_id if self.role is None else f"{self.pred_id}.{self.role}"


@dataclass(frozen=True)
class Token:
    """A terminal: 1-based surface index, word form, POS label, edge to parent."""

    index: int
    form: str
    pos: str
    edge: str | None = None
    parent: int = VIRTUAL_ROOT


@dataclass(frozen=True)
class NonTerminal:
    """A constituent node (id >= 500) with category, edge label and parent id."""

    id: int
    category: str
    edge: str | None = None
    parent: int = VIRTUAL_ROOT


@dataclass(frozen=True)
class SentenceTree:
    """One sentence's tokens plus constituent structure, parent-linked.

    Parent links address nonterminal ids or the virtual root (0). Lookup
    indexes are built eagerly; the parsers guarantee structural invariants
    (unique ids, acyclicity, no childless nonterminals) for loaded data.
    """

    sentence_id: str
    tokens: tuple[Token, ...]
    nonterminals: tuple[NonTerminal, ...] = ()
    _by_id: dict = field(init=False, repr=False, compare=False)
    _children: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        nts = tuple(sorted(self.nonterminals, key=lambda n: n.id))
        object.__setattr__(self, "nonterminals", nts)
        object.__setattr__(self, "_by_id", {nt.id: nt for nt in nts})
        children: dict[int, list[NodeRef]] = {}
        for tok in self.tokens:
            children.setdefault(tok.parent, []).append(NodeRef.terminal(tok.index))
        for nt in nts:
            children.setdefault(nt.parent, []).append(NodeRef.nonterminal(nt.id))
        object.__setattr__(self, "_children", children)

    def has_node(self, ref: NodeRef) -> bool:
        if ref.kind == "t":
            return 1 <= ref.num <= len(self.tokens)
        return ref.num in self._by_id

    def node(self, ref: NodeRef) -> Token | NonTerminal:
        if ref.kind == "t":
            if 1 <= ref.num <= len(self.tokens):
                return self.tokens[ref.num - 1]
        elif ref.num in self._by_id:
            return self._by_id[ref.num]
        raise ResolutionError(f"sentence {self.sentence_id}: unknown node {ref}")

    def children_of(self, node_id: int) -> tuple[NodeRef, ...]:
        """Direct children of a nonterminal id (or 0 for the virtual root)."""
        return tuple(self._children.get(node_id, ()))

    def node_refs(self):
        for tok in self.tokens:
            yield NodeRef.terminal(tok.index)
        for nt in self.nonterminals:
            yield NodeRef.nonterminal(nt.id)

    def parent_of(self, ref: NodeRef) -> int:
        node = self.node(ref)
        return node.parent


def node_yield(tree: SentenceTree, ref: NodeRef) -> list[int]:
    """All terminal indices dominated by ref (descendant-or-self), ascending.

    A terminal yields itself; a nonterminal yields every terminal reachable
    through child links.
    """
    tree.node(ref)
    if ref.kind == "t":
        return [ref.num]
    out: list[int] = []
    stack = [ref.num]
    seen = {ref.num}
    while stack:
        node_id = stack.pop()
        for child in tree.children_of(node_id):
            if child.kind == "t":
                out.append(child.num)
            elif child.num not in seen:
                seen.add(child.num)
                stack.append(child.num)
    out.sort()
    return out


def is_ancestor(tree: SentenceTree, ancestor: NodeRef, descendant: NodeRef) -> bool:
    """True if ancestor properly dominates descendant via parent links."""
    if ancestor.kind == "t":
        return False
    parent = tree.node(descendant).parent
    seen = set()
    while parent != VIRTUAL_ROOT and parent not in seen:
        if parent == ancestor.num:
            return True
        seen.add(parent)
        nt = tree._by_id.get(parent)
        if nt is None:
            return False
        parent = nt.parent
    return False


@dataclass(frozen=True)
class Predicate:
    pred_id: str
    lemma: str
    syn_class: str
    group: str


@dataclass(frozen=True)
class Argument:
    pred_id: str
    role: str


@dataclass(frozen=True)
class Binding:
    """Attachment of one predicate/argument to tree nodes.

    included: non-empty, pairwise dominance-incomparable node set.
    excluded: nodes pruned out of the yield; each must be a proper
    descendant of an included node. tags are only legal on predicate
    bindings (they explain arguments missing from the surface, e.g.
    passives and imperatives).
    """

    target: ElemRef
    included: frozenset[NodeRef]
    excluded: frozenset[NodeRef] = frozenset()
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "included", frozenset(self.included))
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        object.__setattr__(self, "tags", frozenset(self.tags))


def resolve_yield(tree: SentenceTree, binding: Binding) -> list[int]:
    """Union of included-node yields minus union of excluded-node yields, ascending.

    Raises EmptyYieldError when nothing remains; an empty yield is a data
    error, never a silent empty result.
    """
    covered: set[int] = set()
    for ref in binding.included:
        covered.update(node_yield(tree, ref))
    for ref in binding.excluded:
        covered.difference_update(node_yield(tree, ref))
    if not covered:
        raise EmptyYieldError(
            f"sentence {tree.sentence_id}: empty binding yield for {binding.target}"
        )
    return sorted(covered)


def is_discontinuous(tree: SentenceTree, binding: Binding) -> bool:
    """True if the binding's yield is not one contiguous index range."""
    covered = resolve_yield(tree, binding)
    return covered[-1] - covered[0] + 1 != len(covered)


@dataclass(frozen=True)
class MonolingualAnnotation:
    """One sentence's tree plus predicate-argument structure and bindings."""

    tree: SentenceTree
    predicates: tuple[Predicate, ...] = ()
    arguments: tuple[Argument, ...] = ()
    bindings: tuple[Binding, ...] = ()
    _preds: dict = field(init=False, repr=False, compare=False)
    _args: dict = field(init=False, repr=False, compare=False)
    _bindings: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        preds = tuple(sorted(self.predicates, key=lambda p: p.pred_id))
        args = tuple(sorted(self.arguments, key=lambda a: (a.pred_id, a.role)))
        binds = tuple(sorted(self.bindings, key=lambda b: b.target.sort_key))
        object.__setattr__(self, "predicates", preds)
        object.__setattr__(self, "arguments", args)
        object.__setattr__(self, "bindings", binds)
        object.__setattr__(self, "_preds", {p.pred_id: p for p in preds})
        object.__setattr__(self, "_args", {(a.pred_id, a.role): a for a in args})
        by_target: dict[ElemRef, list[Binding]] = {}
        for b in binds:
            by_target.setdefault(b.target, []).append(b)
        object.__setattr__(self, "_bindings", by_target)

    @property
    def sentence_id(self) -> str:
        return self.tree.sentence_id

    def has_element(self, ref: ElemRef) -> bool:
        if ref.is_predicate:
            return ref.pred_id in self._preds
        return (ref.pred_id, ref.role) in self._args

    def element(self, ref: ElemRef) -> Predicate | Argument:
        if ref.is_predicate:
            pred = self._preds.get(ref.pred_id)
            if pred is not None:
                return pred
        else:
            arg = self._args.get((ref.pred_id, ref.role))
            if arg is not None:
                return arg
        raise ResolutionError(f"sentence {self.sentence_id}: unknown element {ref}")

    def element_refs(self):
        for pred in self.predicates:
            yield ElemRef(pred.pred_id)
        for arg in self.arguments:
            yield ElemRef(arg.pred_id, arg.role)

    def bindings_for(self, ref: ElemRef) -> tuple[Binding, ...]:
        return tuple(self._bindings.get(ref, ()))

    def binding_for(self, ref: ElemRef) -> Binding:
        """The element's unique binding; validated data has exactly one."""
        found = self._bindings.get(ref)
        if not found:
            raise ResolutionError(f"sentence {self.sentence_id}: no binding for {ref}")
        return found[0]

    def arguments_of(self, pred_id: str) -> tuple[Argument, ...]:
        return tuple(a for a in self.arguments if a.pred_id == pred_id)


def element_of(annotation: MonolingualAnnotation, ref: ElemRef | str) -> Predicate | Argument:
    """Resolve 'p1' / 'p1.ROLE' style references against one annotation."""
    if isinstance(ref, str):
        try:
            ref = ElemRef.parse(ref)
        except ValueError as exc:
            raise ResolutionError(f"sentence {annotation.sentence_id}: {exc}") from exc
    return annotation.element(ref)


@dataclass(frozen=True)
class Alignment:
    """Cross-lingual link between two predicates or two arguments."""

    kind: str  # "pred" | "arg"
    left: ElemRef
    right: ElemRef
    tag: str | None = None

    @property
    def sort_key(self):
        return (self.left.sort_key, self.right.sort_key, self.kind, self.tag or "")


@dataclass(frozen=True)
class SentencePairAlignment:
    """All alignments between one sentence pair; ids are lang-qualified keys (en:s1)."""

    left_sentence: str
    right_sentence: str
    alignments: tuple[Alignment, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.alignments, key=lambda a: a.sort_key))
        object.__setattr__(self, "alignments", ordered)


@dataclass(frozen=True)
class PairSet:
    """One alignment set between two languages (one .al file's worth)."""

    left_lang: str
    right_lang: str
    pairs: tuple[SentencePairAlignment, ...] = ()

    def __post_init__(self):
        ordered = tuple(
            sorted(self.pairs, key=lambda p: (p.left_sentence, p.right_sentence))
        )
        object.__setattr__(self, "pairs", ordered)


@dataclass(frozen=True)
class TagRegistry:
    """Closed inventories of binding tags and alignment tags."""

    binding_tags: frozenset[str] = DEFAULT_BINDING_TAGS
    alignment_tags: frozenset[str] = DEFAULT_ALIGNMENT_TAGS


def sentence_key(lang: str, sentence_id: str) -> str:
    return f"{lang}:{sentence_id}"


def split_sentence_key(key: str) -> tuple[str, str]:
    lang, sep, sid = key.partition(":")
    if not sep or not lang or not sid:
        raise ValueError(f"malformed sentence key {key!r} (expected <lang>:<id>)")
    return lang, sid


@dataclass(frozen=True)
class ParallelCorpus:
    """Union of per-language treebanks plus pair sets of alignments.

    `validated` marks a corpus that passed full validation with no ERROR
    diagnostics; query evaluation requires it. The flag never participates
    in equality.
    """

    treebanks: dict[str, tuple[MonolingualAnnotation, ...]]
    pair_sets: tuple[PairSet, ...] = ()
    tag_registry: TagRegistry = TagRegistry()
    validated: bool = field(default=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        banks = {
            lang: tuple(sorted(anns, key=lambda a: a.sentence_id))
            for lang, anns in self.treebanks.items()
        }
        object.__setattr__(self, "treebanks", banks)
        object.__setattr__(self, "pair_sets", tuple(self.pair_sets))
        index = {}
        for lang, anns in banks.items():
            for ann in anns:
                index[sentence_key(lang, ann.sentence_id)] = ann
        object.__setattr__(self, "_index", index)

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(sorted(self.treebanks))

    def has_sentence(self, key: str) -> bool:
        return key in self._index

    def sentence(self, key: str) -> MonolingualAnnotation:
        ann = self._index.get(key)
        if ann is None:
            raise ResolutionError(f"unknown sentence {key}")
        return ann

    def sentences(self, lang: str) -> tuple[MonolingualAnnotation, ...]:
        if lang not in self.treebanks:
            raise ResolutionError(f"unknown language {lang!r}")
        return self.treebanks[lang]
