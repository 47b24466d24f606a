"""Manifest handling, corpus assembly and corpus statistics.

A corpus is defined by a plain-text manifest; the corpus itself is the
union of the per-language annotation files plus the alignment sets::

    LANG <code> TREES <path> PREDARG <path>
    ALIGN <codeA> <codeB> <path>
    BINDTAGS <tag>[,<tag>...]      optional, replaces the default registry
    ALIGNTAGS <tag>[,<tag>...]     optional, replaces the default registry

Paths are relative to the manifest and must not contain whitespace.
``%%`` comments and blank lines are allowed. Sentence ids are qualified
with the language code (``en:s1``) once loaded, which keeps the union of
treebanks well-defined.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .formats import (
    ERROR,
    Diagnostic,
    ParseError,
    PredArg,
    parse_alignments,
    parse_predarg,
    parse_trees,
)
from .model import (
    DEFAULT_ALIGNMENT_TAGS,
    DEFAULT_BINDING_TAGS,
    MonolingualAnnotation,
    PairSet,
    ParallelCorpus,
    TagRegistry,
    split_sentence_key,
)
from .validate import validate_corpus

__all__ = [
    "Manifest",
    "LanguageEntry",
    "AlignEntry",
    "CorpusStats",
    "LanguageStats",
    "PairSetStats",
    "parse_manifest",
    "serialize_manifest",
    "parse_tag_registry",
    "load_corpus",
    "compute_stats",
]

_LANG_RE = re.compile(r"^[a-z][a-z0-9_-]*$")
_TAG_RE = re.compile(r"^[a-z][a-z0-9-]*$")


@dataclass(frozen=True)
class LanguageEntry:
    code: str
    trees_path: str
    predarg_path: str


@dataclass(frozen=True)
class AlignEntry:
    left_lang: str
    right_lang: str
    path: str


@dataclass(frozen=True)
class Manifest:
    languages: tuple[LanguageEntry, ...]
    align_sets: tuple[AlignEntry, ...] = ()
    registry: TagRegistry = TagRegistry()


def _err(code: str, file: str, line: int | None, message: str):
    raise ParseError(Diagnostic(ERROR, code, file, line, message))


def _parse_tag_list(value: str, file: str, lineno: int) -> frozenset[str]:
    tags = []
    for tag in value.split(","):
        if not _TAG_RE.match(tag):
            _err("E-MANIFEST-SYNTAX", file, lineno, f"malformed tag {tag!r}")
        tags.append(tag)
    return frozenset(tags)


def parse_manifest(text: str, filename: str = "<string>") -> Manifest:
    """Parse manifest text; paths are returned as written (not resolved)."""
    languages: list[LanguageEntry] = []
    aligns: list[tuple[int, AlignEntry]] = []
    binding_tags = None
    alignment_tags = None
    for lineno, line in _numbered_lines(text):
        if line.startswith("%%") or not line.strip():
            continue
        fields = line.split()
        directive = fields[0]
        if directive == "LANG":
            if len(fields) != 6 or fields[2] != "TREES" or fields[4] != "PREDARG":
                _err("E-MANIFEST-SYNTAX", filename, lineno, "expected LANG <code> TREES <path> PREDARG <path>")
            code = fields[1]
            if not _LANG_RE.match(code):
                _err("E-MANIFEST-SYNTAX", filename, lineno, f"malformed language code {code!r}")
            if any(entry.code == code for entry in languages):
                _err("E-MANIFEST-DUP", filename, lineno, f"duplicate language {code}")
            languages.append(LanguageEntry(code, fields[3], fields[5]))
        elif directive == "ALIGN":
            if len(fields) != 4:
                _err("E-MANIFEST-SYNTAX", filename, lineno, "expected ALIGN <codeA> <codeB> <path>")
            for code in fields[1:3]:
                if not _LANG_RE.match(code):
                    _err("E-MANIFEST-SYNTAX", filename, lineno, f"malformed language code {code!r}")
            aligns.append((lineno, AlignEntry(fields[1], fields[2], fields[3])))
        elif directive == "BINDTAGS":
            if len(fields) != 2 or binding_tags is not None:
                _err("E-MANIFEST-SYNTAX", filename, lineno, "malformed or repeated BINDTAGS line")
            binding_tags = _parse_tag_list(fields[1], filename, lineno)
        elif directive == "ALIGNTAGS":
            if len(fields) != 2 or alignment_tags is not None:
                _err("E-MANIFEST-SYNTAX", filename, lineno, "malformed or repeated ALIGNTAGS line")
            alignment_tags = _parse_tag_list(fields[1], filename, lineno)
        else:
            _err("E-MANIFEST-SYNTAX", filename, lineno, f"unknown directive {directive!r}")
    if not languages:
        _err("E-MANIFEST-SYNTAX", filename, None, "manifest declares no languages")
    declared = {entry.code for entry in languages}
    for lineno, entry in aligns:
        for code in (entry.left_lang, entry.right_lang):
            if code not in declared:
                _err("E-MANIFEST-LANG", filename, lineno, f"ALIGN references undeclared language {code}")
    registry = TagRegistry(
        binding_tags if binding_tags is not None else DEFAULT_BINDING_TAGS,
        alignment_tags if alignment_tags is not None else DEFAULT_ALIGNMENT_TAGS,
    )
    return Manifest(tuple(languages), tuple(entry for _, entry in aligns), registry)


def _numbered_lines(text: str):
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    return enumerate(raw, 1)


def serialize_manifest(manifest: Manifest) -> str:
    """Canonical manifest text; tag lines only when they differ from defaults."""
    out = [
        f"LANG {entry.code} TREES {entry.trees_path} PREDARG {entry.predarg_path}"
        for entry in manifest.languages
    ]
    out.extend(
        f"ALIGN {entry.left_lang} {entry.right_lang} {entry.path}"
        for entry in manifest.align_sets
    )
    if manifest.registry.binding_tags != DEFAULT_BINDING_TAGS:
        out.append("BINDTAGS " + ",".join(sorted(manifest.registry.binding_tags)))
    if manifest.registry.alignment_tags != DEFAULT_ALIGNMENT_TAGS:
        out.append("ALIGNTAGS " + ",".join(sorted(manifest.registry.alignment_tags)))
    return "".join(line + "\n" for line in out)


def parse_tag_registry(text: str, filename: str = "<string>") -> TagRegistry:
    """Parse a standalone tag-registry file (BINDTAGS/ALIGNTAGS lines only)."""
    binding_tags = None
    alignment_tags = None
    for lineno, line in _numbered_lines(text):
        if line.startswith("%%") or not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2 or fields[0] not in ("BINDTAGS", "ALIGNTAGS"):
            _err("E-MANIFEST-SYNTAX", filename, lineno, f"expected BINDTAGS or ALIGNTAGS line, got {line!r}")
        tags = _parse_tag_list(fields[1], filename, lineno)
        if fields[0] == "BINDTAGS":
            binding_tags = tags
        else:
            alignment_tags = tags
    return TagRegistry(
        binding_tags if binding_tags is not None else DEFAULT_BINDING_TAGS,
        alignment_tags if alignment_tags is not None else DEFAULT_ALIGNMENT_TAGS,
    )


def _read(path: Path, diags: list[Diagnostic]) -> str | None:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        diags.append(Diagnostic(ERROR, "E-IO", str(path), None, f"cannot read file: {exc}"))
        return None


def load_corpus(
    manifest_path, registry: TagRegistry | None = None
) -> tuple[ParallelCorpus | None, list[Diagnostic]]:
    """Load and fully validate the corpus a manifest defines.

    Returns (corpus, diagnostics); the corpus is None whenever any ERROR
    diagnostic was produced. A registry argument overrides the manifest's
    tag registry. When any file fails to parse, semantic validation is
    skipped: only the parse diagnostics are reported.
    """
    manifest_path = Path(manifest_path)
    diags: list[Diagnostic] = []
    text = _read(manifest_path, diags)
    if text is None:
        return None, diags
    try:
        manifest = parse_manifest(text, str(manifest_path))
    except ParseError as exc:
        return None, [exc.diagnostic]
    if registry is None:
        registry = manifest.registry
    base = manifest_path.parent

    treebanks: dict[str, tuple[MonolingualAnnotation, ...]] = {}
    lang_files: dict[str, str] = {}
    for entry in manifest.languages:
        trees_path = base / entry.trees_path
        pa_path = base / entry.predarg_path
        lang_files[entry.code] = str(pa_path)
        trees_text = _read(trees_path, diags)
        pa_text = _read(pa_path, diags)
        if trees_text is None or pa_text is None:
            continue
        try:
            trees = parse_trees(trees_text, str(trees_path))
            predarg = parse_predarg(pa_text, registry, str(pa_path))
        except ParseError as exc:
            diags.append(exc.diagnostic)
            continue
        known = {tree.sentence_id for tree in trees}
        for sid in predarg:
            if sid not in known:
                diags.append(
                    Diagnostic(
                        ERROR,
                        "E-SENT-UNKNOWN",
                        str(pa_path),
                        None,
                        f"sentence {sid} has annotations but no tree",
                    )
                )
        annotations = []
        for tree in trees:
            pa = predarg.get(tree.sentence_id, PredArg())
            annotations.append(
                MonolingualAnnotation(tree, pa.predicates, pa.arguments, pa.bindings)
            )
        treebanks[entry.code] = tuple(annotations)

    pair_sets: list[PairSet] = []
    pair_files: dict[tuple[str, str], str] = {}
    for entry in manifest.align_sets:
        al_path = base / entry.path
        pair_files[(entry.left_lang, entry.right_lang)] = str(al_path)
        al_text = _read(al_path, diags)
        if al_text is None:
            continue
        try:
            pairs = parse_alignments(al_text, registry, str(al_path))
        except ParseError as exc:
            diags.append(exc.diagnostic)
            continue
        for pair in pairs:
            left_lang = split_sentence_key(pair.left_sentence)[0]
            right_lang = split_sentence_key(pair.right_sentence)[0]
            if (left_lang, right_lang) != (entry.left_lang, entry.right_lang):
                diags.append(
                    Diagnostic(
                        ERROR,
                        "E-PAIR-LANG",
                        str(al_path),
                        None,
                        f"pair {pair.left_sentence} {pair.right_sentence} does not match"
                        f" ALIGN {entry.left_lang} {entry.right_lang}",
                    )
                )
        pair_sets.append(PairSet(entry.left_lang, entry.right_lang, tuple(pairs)))

    if any(d.is_error for d in diags):
        return None, sorted(set(diags), key=lambda d: d.sort_key)
    corpus = ParallelCorpus(treebanks, tuple(pair_sets), registry)
    corpus, vdiags = validate_corpus(corpus, lang_files, pair_files)
    diags = sorted(set(diags) | set(vdiags), key=lambda d: d.sort_key)
    if any(d.is_error for d in diags):
        return None, diags
    return corpus, diags


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class LanguageStats:
    sentences: int
    tokens: int
    predicates: int
    arguments: int
    by_class: dict[str, int] = field(default_factory=dict)
    binding_tags: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PairSetStats:
    left_lang: str
    right_lang: str
    pairs: int
    pred_alignments: int
    arg_alignments: int
    pred_tags: dict[str, int] = field(default_factory=dict)
    arg_tags: dict[str, int] = field(default_factory=dict)
    unaligned_predicates: dict[str, int] = field(default_factory=dict)
    unaligned_arguments: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusStats:
    languages: dict[str, LanguageStats]
    pair_sets: tuple[PairSetStats, ...]


def compute_stats(corpus: ParallelCorpus) -> CorpusStats:
    """Deterministic per-language and per-pair-set counts.

    Per pair set, unaligned counts cover elements of sentences that occur
    in that set's pairs (corpus-wide unalignment is a query concern).
    """
    languages: dict[str, LanguageStats] = {}
    for lang in corpus.languages:
        anns = corpus.treebanks[lang]
        by_class = {c: 0 for c in ("v", "n", "a")}
        tags: dict[str, int] = {}
        n_args = 0
        for ann in anns:
            n_args += len(ann.arguments)
            for pred in ann.predicates:
                if pred.syn_class in by_class:
                    by_class[pred.syn_class] += 1
            for binding in ann.bindings:
                for tag in binding.tags:
                    tags[tag] = tags.get(tag, 0) + 1
        languages[lang] = LanguageStats(
            sentences=len(anns),
            tokens=sum(len(ann.tree.tokens) for ann in anns),
            predicates=sum(len(ann.predicates) for ann in anns),
            arguments=n_args,
            by_class=by_class,
            binding_tags=dict(sorted(tags.items())),
        )
    set_stats = []
    for pair_set in corpus.pair_sets:
        pred_tags: dict[str, int] = {}
        arg_tags: dict[str, int] = {}
        n_pred = n_arg = 0
        aligned: set[tuple[str, object]] = set()
        for pair in pair_set.pairs:
            for a in pair.alignments:
                counts = pred_tags if a.kind == "pred" else arg_tags
                if a.kind == "pred":
                    n_pred += 1
                else:
                    n_arg += 1
                if a.tag is not None:
                    counts[a.tag] = counts.get(a.tag, 0) + 1
                aligned.add((pair.left_sentence, a.left))
                aligned.add((pair.right_sentence, a.right))
        unaligned_preds = {pair_set.left_lang: 0, pair_set.right_lang: 0}
        unaligned_args = {pair_set.left_lang: 0, pair_set.right_lang: 0}
        seen_keys = set()
        for pair in pair_set.pairs:
            for key, lang in (
                (pair.left_sentence, pair_set.left_lang),
                (pair.right_sentence, pair_set.right_lang),
            ):
                if key in seen_keys or not corpus.has_sentence(key):
                    continue
                seen_keys.add(key)
                ann = corpus.sentence(key)
                for ref in ann.element_refs():
                    if (key, ref) not in aligned:
                        if ref.is_predicate:
                            unaligned_preds[lang] += 1
                        else:
                            unaligned_args[lang] += 1
        set_stats.append(
            PairSetStats(
                left_lang=pair_set.left_lang,
                right_lang=pair_set.right_lang,
                pairs=len(pair_set.pairs),
                pred_alignments=n_pred,
                arg_alignments=n_arg,
                pred_tags=dict(sorted(pred_tags.items())),
                arg_tags=dict(sorted(arg_tags.items())),
                unaligned_predicates=unaligned_preds,
                unaligned_arguments=unaligned_args,
            )
        )
    return CorpusStats(languages, tuple(set_stats))
