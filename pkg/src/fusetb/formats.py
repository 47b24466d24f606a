"""Parsers and canonical serializers for the three annotation file types.

All documents are UTF-8, NFC-normalized on input and LF-terminated on
output. Lines starting with ``%%`` are comments and are ignored anywhere;
blank lines are permitted only between blocks. Parsing is fail-fast: the
first structural ERROR aborts the file with a ParseError carrying a
Diagnostic (file + line); serializers are deterministic and emit the
canonical form, so parse -> serialize is byte-identity on canonical files
and serialize -> parse is structural identity on any valid data.

Formats:

``.tb`` (constituent trees)::

    #BOS <sid>
    <form>\\t<pos>\\t<edge>\\t<parent>     one line per terminal, surface order
    #<id>\\t<cat>\\t<edge>\\t<parent>      nonterminals, ids ascending from 500
    #EOS <sid>

``<parent>`` is a nonterminal id or 0 for the virtual root; ``<edge>`` is
``--`` when absent.

``.pa`` (predicate-argument structures and bindings)::

    #SENT <sid>
    PRED <pid> lemma=<LEMMA> class=<v|n|a> group=<GROUP> nodes=<ref>[,...]
               [excl=<ref>[,...]] [tags=<tag>[,...]]
    ARG <pid> role=<ROLE> nodes=<ref>[,...] [excl=<ref>[,...]]

Node refs are ``t<k>`` (terminal surface index) or ``n<id>`` (nonterminal).

``.al`` (alignments)::

    #PAIR <langL>:<sidL> <langR>:<sidR>
    PALIGN <pidL> <pidR> [tag=<t>]
    AALIGN <pidL>.<ROLE> <pidR>.<ROLE> [tag=<t>]
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .model import (
    MIN_NONTERMINAL_ID,
    PRED_CLASSES,
    VIRTUAL_ROOT,
    Alignment,
    Argument,
    Binding,
    ElemRef,
    NodeRef,
    NonTerminal,
    Predicate,
    SentencePairAlignment,
    SentenceTree,
    TagRegistry,
    Token,
    is_pred_id,
    is_uppercase_name,
)

__all__ = [
    "Diagnostic",
    "ParseError",
    "PredArg",
    "TagRegistry",
    "parse_alignments",
    "parse_predarg",
    "parse_trees",
    "serialize_alignments",
    "serialize_predarg",
    "serialize_trees",
]

ERROR = "ERROR"
WARNING = "WARNING"

_SID_RE = re.compile(r"^[A-Za-z0-9_.-]+$")
_LANG_RE = re.compile(r"^[a-z][a-z0-9_-]*$")
_TAG_RE = re.compile(r"^[a-z][a-z0-9-]*$")
_LABEL_RE = re.compile(r"^\S+$")  # POS / category / edge fields: no whitespace


@dataclass(frozen=True)
class Diagnostic:
    """One machine-readable finding: severity, stable code, location, message."""

    severity: str
    code: str
    file: str
    line: int | None
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    @property
    def sort_key(self):
        return (self.file, self.line if self.line is not None else 0, self.code, self.message)

    def render(self) -> str:
        loc = self.file if self.line is None else f"{self.file}:{self.line}"
        return f"{self.severity}\t{self.code}\t{loc}\t{self.message}"


class ParseError(Exception):
    """Fail-fast parse abort; carries the Diagnostic for the first error."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


def _err(code: str, file: str, line: int | None, message: str):
    raise ParseError(Diagnostic(ERROR, code, file, line, message))


def _lines(text: str, filename: str):
    """NFC-normalize and split; yields (line_number, line). Rejects CR endings."""
    text = unicodedata.normalize("NFC", text)
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    for lineno, line in enumerate(raw, 1):
        if line.endswith("\r"):
            _err("E-SYNTAX", filename, lineno, "carriage-return line ending (files must be LF)")
        yield lineno, line


def _check_sid(sid: str, filename: str, lineno: int) -> str:
    if not _SID_RE.match(sid):
        _err("E-SYNTAX", filename, lineno, f"malformed sentence id {sid!r}")
    return sid


# ---------------------------------------------------------------------------
# .tb — constituent trees


def parse_trees(text: str, filename: str = "<string>") -> list[SentenceTree]:
    """Parse a .tb document into SentenceTrees, in file order."""
    trees: list[SentenceTree] = []
    seen_sids: set[str] = set()
    sid = None
    sid_line = 0
    tokens: list[Token] = []
    nonterminals: list[NonTerminal] = []
    # declaration lines per node; terminals keyed by negative index so the
    # two id spaces share one map
    node_lines: dict[int, int] = {}
    in_nt_section = False

    def finish(end_line: int):
        if not tokens:
            _err("E-SYNTAX", filename, end_line, f"sentence {sid} has no terminals")
        known = {nt.id for nt in nonterminals}
        for tok in tokens:
            if tok.parent != VIRTUAL_ROOT and tok.parent not in known:
                _err(
                    "E-PARENT-UNKNOWN",
                    filename,
                    node_lines[-tok.index],
                    f"sentence {sid}: token {tok.index} attached to unknown node {tok.parent}",
                )
        for nt in nonterminals:
            if nt.parent != VIRTUAL_ROOT and nt.parent not in known:
                _err(
                    "E-PARENT-UNKNOWN",
                    filename,
                    node_lines[nt.id],
                    f"sentence {sid}: node {nt.id} attached to unknown node {nt.parent}",
                )
        parents = {nt.id: nt.parent for nt in nonterminals}
        cleared: set[int] = set()
        for nt in nonterminals:
            path: set[int] = set()
            node_id = nt.id
            while node_id != VIRTUAL_ROOT and node_id not in cleared:
                if node_id in path:
                    _err(
                        "E-TREE-CYCLE",
                        filename,
                        node_lines[node_id],
                        f"sentence {sid}: cycle through node {node_id}",
                    )
                path.add(node_id)
                node_id = parents[node_id]
            cleared.update(path)
        with_children = {tok.parent for tok in tokens} | {nt.parent for nt in nonterminals}
        for nt in nonterminals:
            if nt.id not in with_children:
                _err(
                    "E-NT-EMPTY",
                    filename,
                    node_lines[nt.id],
                    f"sentence {sid}: node {nt.id} has no children",
                )
        trees.append(SentenceTree(sid, tuple(tokens), tuple(nonterminals)))

    for lineno, line in _lines(text, filename):
        if line.startswith("%%"):
            continue
        if not line.strip():
            if sid is not None:
                _err("E-SYNTAX", filename, lineno, "blank line inside sentence block")
            continue
        if line.startswith("#BOS"):
            if sid is not None:
                _err("E-SYNTAX", filename, lineno, f"#BOS inside sentence {sid}")
            parts = line.split()
            if len(parts) != 2:
                _err("E-SYNTAX", filename, lineno, "malformed #BOS line")
            new_sid = _check_sid(parts[1], filename, lineno)
            if new_sid in seen_sids:
                _err("E-SENT-DUP", filename, lineno, f"duplicate sentence id {new_sid}")
            seen_sids.add(new_sid)
            sid, sid_line = new_sid, lineno
            tokens, nonterminals, node_lines = [], [], {}
            in_nt_section = False
            continue
        if line.startswith("#EOS"):
            if sid is None:
                _err("E-SYNTAX", filename, lineno, "#EOS outside sentence block")
            parts = line.split()
            if len(parts) != 2 or parts[1] != sid:
                _err("E-SYNTAX", filename, lineno, f"#EOS does not close sentence {sid}")
            finish(lineno)
            sid = None
            continue
        if sid is None:
            _err("E-SYNTAX", filename, lineno, "data line outside sentence block")
        fields = line.split("\t")
        if len(fields) != 4:
            _err("E-SYNTAX", filename, lineno, f"expected 4 tab-separated fields, got {len(fields)}")
        name, label, edge, parent_text = fields
        if not parent_text.isdigit():
            _err("E-SYNTAX", filename, lineno, f"malformed parent reference {parent_text!r}")
        parent = int(parent_text)
        if parent != VIRTUAL_ROOT and parent < MIN_NONTERMINAL_ID:
            _err("E-SYNTAX", filename, lineno, f"parent must be 0 or a nonterminal id, got {parent}")
        if not _LABEL_RE.match(label):
            _err("E-SYNTAX", filename, lineno, "empty or malformed label field")
        if not _LABEL_RE.match(edge):
            _err("E-SYNTAX", filename, lineno, "empty or malformed edge field")
        edge_label = None if edge == "--" else edge
        if name.startswith("#"):
            id_text = name[1:]
            if not id_text.isdigit():
                _err("E-SYNTAX", filename, lineno, f"malformed nonterminal id {name!r}")
            node_id = int(id_text)
            if node_id < MIN_NONTERMINAL_ID:
                _err(
                    "E-NODE-ID-RANGE",
                    filename,
                    lineno,
                    f"nonterminal id {node_id} below {MIN_NONTERMINAL_ID}",
                )
            if node_id in node_lines:
                _err("E-NODE-DUP", filename, lineno, f"duplicate nonterminal id {node_id}")
            if nonterminals and node_id < nonterminals[-1].id:
                _err("E-SYNTAX", filename, lineno, "nonterminal ids must be ascending")
            in_nt_section = True
            nonterminals.append(NonTerminal(node_id, label, edge_label, parent))
            node_lines[node_id] = lineno
        else:
            if in_nt_section:
                _err("E-SYNTAX", filename, lineno, "terminal line after nonterminal lines")
            if not name:
                _err("E-SYNTAX", filename, lineno, "empty token form")
            index = len(tokens) + 1
            tokens.append(Token(index, name, label, edge_label, parent))
            node_lines[-index] = lineno
    if sid is not None:
        _err("E-SYNTAX", filename, sid_line, f"sentence {sid} not closed by #EOS")
    return trees


def _edge_text(edge: str | None) -> str:
    return edge if edge is not None else "--"


def serialize_trees(trees) -> str:
    """Canonical .tb text: one block per tree, in the given order."""
    out: list[str] = []
    for tree in trees:
        out.append(f"#BOS {tree.sentence_id}")
        for tok in tree.tokens:
            out.append(f"{tok.form}\t{tok.pos}\t{_edge_text(tok.edge)}\t{tok.parent}")
        for nt in tree.nonterminals:
            out.append(f"#{nt.id}\t{nt.category}\t{_edge_text(nt.edge)}\t{nt.parent}")
        out.append(f"#EOS {tree.sentence_id}")
    return "".join(line + "\n" for line in out)


# ---------------------------------------------------------------------------
# .pa — predicate-argument structures with bindings


@dataclass(frozen=True)
class PredArg:
    """One sentence's parsed predicate-argument content."""

    predicates: tuple[Predicate, ...] = ()
    arguments: tuple[Argument, ...] = ()
    bindings: tuple[Binding, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "predicates", tuple(sorted(self.predicates, key=lambda p: p.pred_id))
        )
        object.__setattr__(
            self, "arguments", tuple(sorted(self.arguments, key=lambda a: (a.pred_id, a.role)))
        )
        object.__setattr__(
            self, "bindings", tuple(sorted(self.bindings, key=lambda b: b.target.sort_key))
        )


def _split_kv(fields: list[str], allowed: tuple[str, ...], filename: str, lineno: int) -> dict:
    kv: dict[str, str] = {}
    for item in fields:
        key, sep, value = item.partition("=")
        if not sep or key not in allowed:
            _err("E-SYNTAX", filename, lineno, f"unexpected field {item!r}")
        if key in kv:
            _err("E-SYNTAX", filename, lineno, f"duplicate key {key}=")
        if not value:
            _err("E-SYNTAX", filename, lineno, f"empty value for {key}=")
        kv[key] = value
    return kv


def _parse_refs(value: str, filename: str, lineno: int) -> frozenset[NodeRef]:
    refs = []
    for part in value.split(","):
        try:
            refs.append(NodeRef.parse(part))
        except ValueError as exc:
            _err("E-REF-SYNTAX", filename, lineno, str(exc))
    return frozenset(refs)


def _parse_tags(value: str, registry: TagRegistry, filename: str, lineno: int) -> frozenset[str]:
    tags = []
    for tag in value.split(","):
        if not _TAG_RE.match(tag):
            _err("E-SYNTAX", filename, lineno, f"malformed tag {tag!r}")
        if tag not in registry.binding_tags:
            _err("E-TAG-UNKNOWN", filename, lineno, f"unknown binding tag {tag!r}")
        tags.append(tag)
    return frozenset(tags)


def _check_name(value: str, what: str, filename: str, lineno: int) -> str:
    if not is_uppercase_name(value):
        _err("E-CASE", filename, lineno, f"{what} {value!r} must be uppercase letters, _ or -")
    return value


def parse_predarg(
    text: str, registry: TagRegistry | None = None, filename: str = "<string>"
) -> dict[str, PredArg]:
    """Parse a .pa document into sentence-id -> PredArg, preserving block order.

    Tags are validated against the registry; node references are checked
    syntactically only (resolution against the tree is the validator's job).
    """
    registry = registry or TagRegistry()
    result: dict[str, PredArg] = {}
    sid = None
    preds: list[Predicate] = []
    args: list[Argument] = []
    bindings: list[Binding] = []

    def finish():
        result[sid] = PredArg(tuple(preds), tuple(args), tuple(bindings))

    for lineno, line in _lines(text, filename):
        if line.startswith("%%"):
            continue
        if not line.strip():
            if sid is not None:
                _err("E-SYNTAX", filename, lineno, "blank line inside sentence block")
            continue
        if line.startswith("#SENT"):
            if sid is not None:
                finish()
            parts = line.split()
            if len(parts) != 2:
                _err("E-SYNTAX", filename, lineno, "malformed #SENT line")
            new_sid = _check_sid(parts[1], filename, lineno)
            if new_sid in result:
                _err("E-SENT-DUP", filename, lineno, f"duplicate sentence id {new_sid}")
            sid = new_sid
            preds, args, bindings = [], [], []
            continue
        if sid is None:
            _err("E-SYNTAX", filename, lineno, "data line outside #SENT block")
        fields = line.split()
        if len(fields) < 2 or fields[0] not in ("PRED", "ARG"):
            _err("E-SYNTAX", filename, lineno, f"expected PRED or ARG line, got {line!r}")
        pid = fields[1]
        if not is_pred_id(pid):
            _err("E-REF-SYNTAX", filename, lineno, f"malformed predicate id {pid!r}")
        if fields[0] == "PRED":
            kv = _split_kv(fields[2:], ("lemma", "class", "group", "nodes", "excl", "tags"), filename, lineno)
            for required in ("lemma", "class", "group"):
                if required not in kv:
                    _err("E-SYNTAX", filename, lineno, f"PRED line missing {required}=")
            if any(p.pred_id == pid for p in preds):
                _err("E-PRED-DUP", filename, lineno, f"duplicate predicate id {pid}")
            if kv["class"] not in PRED_CLASSES:
                _err(
                    "E-CLASS",
                    filename,
                    lineno,
                    f"predicate class {kv['class']!r} not in {{v,n,a}}",
                )
            lemma = _check_name(kv["lemma"], "lemma", filename, lineno)
            group = _check_name(kv["group"], "group", filename, lineno)
            preds.append(Predicate(pid, lemma, kv["class"], group))
            target = ElemRef(pid)
        else:
            kv = _split_kv(fields[2:], ("role", "nodes", "excl", "tags"), filename, lineno)
            if "role" not in kv:
                _err("E-SYNTAX", filename, lineno, "ARG line missing role=")
            if not any(p.pred_id == pid for p in preds):
                _err("E-ORDER", filename, lineno, f"ARG before PRED line for {pid}")
            role = _check_name(kv["role"], "role", filename, lineno)
            if any(a.pred_id == pid and a.role == role for a in args):
                _err("E-ROLE-DUP", filename, lineno, f"duplicate role {role} for predicate {pid}")
            args.append(Argument(pid, role))
            target = ElemRef(pid, role)
        if "excl" in kv and "nodes" not in kv:
            _err("E-SYNTAX", filename, lineno, "excl= requires nodes=")
        if "nodes" in kv:
            included = _parse_refs(kv["nodes"], filename, lineno)
            excluded = _parse_refs(kv["excl"], filename, lineno) if "excl" in kv else frozenset()
            tags = (
                _parse_tags(kv["tags"], registry, filename, lineno)
                if "tags" in kv
                else frozenset()
            )
            bindings.append(Binding(target, included, excluded, tags))
        elif "tags" in kv:
            _err("E-SYNTAX", filename, lineno, "tags= requires nodes=")
    if sid is not None:
        finish()
    return result


def _refs_text(refs: frozenset[NodeRef]) -> str:
    return ",".join(str(r) for r in sorted(refs, key=lambda r: r.sort_key))


def _binding_suffix(binding: Binding | None) -> str:
    if binding is None:
        return ""
    parts = [f" nodes={_refs_text(binding.included)}"]
    if binding.excluded:
        parts.append(f" excl={_refs_text(binding.excluded)}")
    if binding.tags:
        parts.append(f" tags={','.join(sorted(binding.tags))}")
    return "".join(parts)


def serialize_predarg(annotations) -> str:
    """Canonical .pa text from an ordered mapping of sentence id -> PredArg.

    Blocks follow the mapping order; within a block, predicates sort by id,
    each followed by its arguments sorted by role.
    """
    out: list[str] = []
    for sid, pa in annotations.items():
        out.append(f"#SENT {sid}")
        by_target: dict[ElemRef, Binding] = {b.target: b for b in pa.bindings}
        for pred in pa.predicates:
            suffix = _binding_suffix(by_target.get(ElemRef(pred.pred_id)))
            out.append(
                f"PRED {pred.pred_id} lemma={pred.lemma} class={pred.syn_class}"
                f" group={pred.group}{suffix}"
            )
            for arg in pa.arguments:
                if arg.pred_id != pred.pred_id:
                    continue
                suffix = _binding_suffix(by_target.get(ElemRef(arg.pred_id, arg.role)))
                out.append(f"ARG {arg.pred_id} role={arg.role}{suffix}")
    return "".join(line + "\n" for line in out)


# ---------------------------------------------------------------------------
# .al — alignments


def _parse_eref(text: str, filename: str, lineno: int) -> ElemRef:
    try:
        return ElemRef.parse(text)
    except ValueError as exc:
        _err("E-REF-SYNTAX", filename, lineno, str(exc))


def parse_alignments(
    text: str, registry: TagRegistry | None = None, filename: str = "<string>"
) -> list[SentencePairAlignment]:
    """Parse an .al document; sentence keys keep the lang prefix (en:s1).

    Endpoint element refs are syntax-checked only; whether they resolve,
    and whether their shape matches the PALIGN/AALIGN kind, is validated
    against the corpus later.
    """
    registry = registry or TagRegistry()
    pairs: list[SentencePairAlignment] = []
    seen: set[tuple[str, str]] = set()
    header = None
    alignments: list[Alignment] = []

    def finish():
        pairs.append(SentencePairAlignment(header[0], header[1], tuple(alignments)))

    for lineno, line in _lines(text, filename):
        if line.startswith("%%"):
            continue
        if not line.strip():
            if header is not None:
                _err("E-SYNTAX", filename, lineno, "blank line inside pair block")
            continue
        if line.startswith("#PAIR"):
            if header is not None:
                finish()
            parts = line.split()
            if len(parts) != 3:
                _err("E-SYNTAX", filename, lineno, "malformed #PAIR line")
            keys = []
            for part in parts[1:]:
                lang, sep, sid = part.partition(":")
                if not sep or not _LANG_RE.match(lang) or not _SID_RE.match(sid):
                    _err("E-SYNTAX", filename, lineno, f"malformed sentence reference {part!r}")
                keys.append(part)
            pair_key = (keys[0], keys[1])
            if pair_key in seen:
                _err("E-PAIR-DUP", filename, lineno, f"duplicate pair {keys[0]} {keys[1]}")
            seen.add(pair_key)
            header = pair_key
            alignments = []
            continue
        if header is None:
            _err("E-SYNTAX", filename, lineno, "data line outside #PAIR block")
        fields = line.split()
        if len(fields) not in (3, 4) or fields[0] not in ("PALIGN", "AALIGN"):
            _err("E-SYNTAX", filename, lineno, f"expected PALIGN or AALIGN line, got {line!r}")
        kind = "pred" if fields[0] == "PALIGN" else "arg"
        left = _parse_eref(fields[1], filename, lineno)
        right = _parse_eref(fields[2], filename, lineno)
        tag = None
        if len(fields) == 4:
            key, sep, value = fields[3].partition("=")
            if key != "tag" or not sep or not value:
                _err("E-SYNTAX", filename, lineno, f"unexpected field {fields[3]!r}")
            if not _TAG_RE.match(value):
                _err("E-SYNTAX", filename, lineno, f"malformed tag {value!r}")
            if value not in registry.alignment_tags:
                _err("E-TAG-UNKNOWN", filename, lineno, f"unknown alignment tag {value!r}")
            tag = value
        alignments.append(Alignment(kind, left, right, tag))
    if header is not None:
        finish()
    return pairs


def serialize_alignments(pairs) -> str:
    """Canonical .al text: pair blocks in given order, lines sorted by left ref."""
    out: list[str] = []
    for pair in pairs:
        out.append(f"#PAIR {pair.left_sentence} {pair.right_sentence}")
        for a in pair.alignments:
            keyword = "PALIGN" if a.kind == "pred" else "AALIGN"
            tag = f" tag={a.tag}" if a.tag is not None else ""
            out.append(f"{keyword} {a.left} {a.right}{tag}")
    return "".join(line + "\n" for line in out)
