from __future__ import annotations

import random
import unicodedata

import pytest

from fusetb.formats import (
    ParseError,
    PredArg,
    parse_alignments,
    parse_predarg,
    parse_trees,
    serialize_alignments,
    serialize_predarg,
    serialize_trees,
)
from fusetb.model import ElemRef, NodeRef, TagRegistry

from .conftest import FIXTURES
from .generators import random_annotation, random_corpus, random_tree


def parse_error_code(fn, *args, **kwargs) -> str:
    with pytest.raises(ParseError) as excinfo:
        fn(*args, **kwargs)
    diag = excinfo.value.diagnostic
    assert diag.file is not None and diag.line is not None
    return diag.code


# ---------------------------------------------------------------------------
# .tb


def test_parse_trees_minimal_document():
    text = "#BOS s1\nDie\tART\tNK\t502\nRichtlinie\tNN\tNK\t502\n#502\tNP\tSB\t0\n#EOS s1\n"
    trees = parse_trees(text)
    assert len(trees) == 1
    tree = trees[0]
    assert [t.form for t in tree.tokens] == ["Die", "Richtlinie"]
    assert len(tree.nonterminals) == 1
    nt = tree.nonterminals[0]
    assert (nt.id, nt.category, nt.edge, nt.parent) == (502, "NP", "SB", 0)
    assert tree.tokens[0].parent == 502


def test_parse_trees_empty_document():
    assert parse_trees("") == []
    assert parse_trees("%% nothing here\n\n") == []


def test_node_id_below_range():
    text = "#BOS s1\na\tNN\t--\t0\n#499\tNP\tSB\t0\n#EOS s1\n"
    assert parse_error_code(parse_trees, text) == "E-NODE-ID-RANGE"


def test_duplicate_sentence_id():
    block = "#BOS s1\na\tNN\t--\t0\n#EOS s1\n"
    assert parse_error_code(parse_trees, block + block) == "E-SENT-DUP"


def test_unknown_parent():
    text = "#BOS s1\na\tNN\t--\t510\n#EOS s1\n"
    assert parse_error_code(parse_trees, text) == "E-PARENT-UNKNOWN"


def test_cycle_detected():
    text = (
        "#BOS s1\na\tNN\t--\t501\n"
        "#501\tNP\t--\t502\n#502\tNP\t--\t501\n#EOS s1\n"
    )
    assert parse_error_code(parse_trees, text) == "E-TREE-CYCLE"


def test_childless_nonterminal():
    text = "#BOS s1\na\tNN\t--\t0\n#501\tNP\t--\t0\n#EOS s1\n"
    assert parse_error_code(parse_trees, text) == "E-NT-EMPTY"


def test_duplicate_node_id():
    text = (
        "#BOS s1\na\tNN\t--\t501\nb\tNN\t--\t501\n"
        "#501\tNP\t--\t0\n#501\tPP\t--\t0\n#EOS s1\n"
    )
    assert parse_error_code(parse_trees, text) == "E-NODE-DUP"


@pytest.mark.parametrize(
    "text",
    [
        "#BOS s1\na\tNN\t--\t0\n\n#EOS s1\n",  # blank line inside block
        "#BOS s1\na\tNN\t--\n#EOS s1\n",  # missing field
        "#BOS s1\n#EOS s1\n",  # no terminals
        "#BOS s1\na\tNN\t--\t0\n",  # missing #EOS
        "a\tNN\t--\t0\n",  # data outside block
        "#BOS s1\n#501\tNP\t--\t0\na\tNN\t--\t501\n#EOS s1\n",  # terminal after nonterminal
        "#BOS s1\na\tNN\t--\t502\nb\tNN\t--\t501\n#502\tNP\t--\t0\n#501\tNP\t--\t0\n#EOS s1\n",
        "#BOS s1\na\tNN\t--\t0\n#EOS s2\n",  # mismatched #EOS
    ],
)
def test_tb_syntax_errors(text):
    assert parse_error_code(parse_trees, text) == "E-SYNTAX"


def test_tb_fixture_round_trip_is_byte_identical():
    for name in ("en.tb", "de.tb"):
        text = (FIXTURES / name).read_text(encoding="utf-8")
        assert serialize_trees(parse_trees(text, name)) == text


def test_tb_random_round_trip():
    rng = random.Random(7)
    for i in range(150):
        trees = [random_tree(rng, f"s{k + 1}") for k in range(rng.randint(0, 3))]
        assert parse_trees(serialize_trees(trees)) == trees


def test_input_is_nfc_normalized():
    decomposed = unicodedata.normalize("NFD", "wörter")
    assert decomposed != "wörter"
    text = f"#BOS s1\n{decomposed}\tNN\t--\t0\n#EOS s1\n"
    trees = parse_trees(text)
    assert trees[0].tokens[0].form == "wörter"


# ---------------------------------------------------------------------------
# .pa


def test_parse_predarg_tagged_predicate_binding():
    text = "#SENT s5\nPRED p1 lemma=DOLMETSCHEN class=v group=DOLMETSCHEN nodes=t3 tags=pv\n"
    result = parse_predarg(text)
    pa = result["s5"]
    pred = pa.predicates[0]
    assert (pred.lemma, pred.syn_class, pred.group) == ("DOLMETSCHEN", "v", "DOLMETSCHEN")
    binding = pa.bindings[0]
    assert binding.included == frozenset({NodeRef.parse("t3")})
    assert binding.tags == frozenset({"pv"})


def test_parse_predarg_argument_line():
    text = (
        "#SENT s1\nPRED p1 lemma=HARMONISE class=v group=HARMONISE nodes=t7\n"
        "ARG p1 role=ENT_HARMONISED nodes=n502\n"
    )
    pa = parse_predarg(text)["s1"]
    assert pa.arguments[0].role == "ENT_HARMONISED"
    assert pa.bindings[0].target == ElemRef("p1")
    assert pa.bindings[1].target == ElemRef("p1", "ENT_HARMONISED")
    assert pa.bindings[1].included == frozenset({NodeRef.parse("n502")})


def test_parse_predarg_empty_document():
    assert parse_predarg("") == {}


@pytest.mark.parametrize(
    "line,code",
    [
        ("PRED p1 lemma=X class=x group=X nodes=t1", "E-CLASS"),
        ("PRED p1 lemma=x class=v group=X nodes=t1", "E-CASE"),
        ("PRED p1 lemma=X class=v group=X nodes=t1 tags=bogus", "E-TAG-UNKNOWN"),
        ("PRED p1 lemma=X class=v group=X nodes=q1", "E-REF-SYNTAX"),
        ("PRED p1 lemma=X class=v group=X excl=t1", "E-SYNTAX"),
        ("PRED p1 lemma=X class=v group=X tags=pv", "E-SYNTAX"),
        ("PRED p1 lemma=X class=v group=X nodes=t1 bogus=1", "E-SYNTAX"),
        ("PRED p1 lemma=X class=v nodes=t1", "E-SYNTAX"),
        ("ARG p1 role=AGENT nodes=t1", "E-ORDER"),
        ("PRED P1 lemma=X class=v group=X nodes=t1", "E-REF-SYNTAX"),
    ],
)
def test_pa_line_errors(line, code):
    assert parse_error_code(parse_predarg, f"#SENT s1\n{line}\n") == code


def test_pa_duplicate_pred_and_role():
    pred = "PRED p1 lemma=X class=v group=X nodes=t1\n"
    assert (
        parse_error_code(parse_predarg, "#SENT s1\n" + pred + pred) == "E-PRED-DUP"
    )
    arg = "ARG p1 role=AGENT nodes=t2\n"
    assert (
        parse_error_code(parse_predarg, "#SENT s1\n" + pred + arg + arg) == "E-ROLE-DUP"
    )


def test_pa_missing_nodes_yields_no_binding():
    # structural completeness (every element bound) is the validator's check
    pa = parse_predarg("#SENT s1\nPRED p1 lemma=X class=v group=X\n")["s1"]
    assert pa.predicates and not pa.bindings


def test_pa_custom_registry():
    text = "#SENT s1\nPRED p1 lemma=X class=v group=X nodes=t1 tags=refl\n"
    assert parse_error_code(parse_predarg, text) == "E-TAG-UNKNOWN"
    registry = TagRegistry(binding_tags=frozenset({"refl"}))
    pa = parse_predarg(text, registry)["s1"]
    assert pa.bindings[0].tags == frozenset({"refl"})


def test_pa_fixture_round_trip_is_byte_identical():
    for name in ("en.pa", "de.pa"):
        text = (FIXTURES / name).read_text(encoding="utf-8")
        assert serialize_predarg(parse_predarg(text, filename=name)) == text


def test_pa_random_round_trip():
    rng = random.Random(8)
    for i in range(150):
        annotations = {}
        for k in range(rng.randint(0, 3)):
            sid = f"s{k + 1}"
            ann = random_annotation(rng, random_tree(rng, sid))
            annotations[sid] = PredArg(ann.predicates, ann.arguments, ann.bindings)
        text = serialize_predarg(annotations)
        assert parse_predarg(text) == annotations


def test_pa_header_only_serialization():
    assert serialize_predarg({"s1": PredArg()}) == "#SENT s1\n"
    assert serialize_predarg({}) == ""


# ---------------------------------------------------------------------------
# .al


def test_parse_alignments_examples():
    text = (
        "#PAIR en:s3 de:s3\nPALIGN p1 p1 tag=abs-opp\n"
        "AALIGN p1.GIVER p1.MITGEBER tag=incomp\n"
    )
    pairs = parse_alignments(text)
    assert len(pairs) == 1
    pair = pairs[0]
    assert (pair.left_sentence, pair.right_sentence) == ("en:s3", "de:s3")
    kinds = {(a.kind, a.tag) for a in pair.alignments}
    assert kinds == {("pred", "abs-opp"), ("arg", "incomp")}


def test_alignment_unknown_tag():
    text = "#PAIR en:s1 de:s1\nPALIGN p1 p1 tag=bogus\n"
    assert parse_error_code(parse_alignments, text) == "E-TAG-UNKNOWN"


def test_alignment_duplicate_pair_header():
    block = "#PAIR en:s1 de:s1\nPALIGN p1 p1\n"
    assert parse_error_code(parse_alignments, block + block) == "E-PAIR-DUP"


@pytest.mark.parametrize(
    "text,code",
    [
        ("PALIGN p1 p1\n", "E-SYNTAX"),
        ("#PAIR en:s1 de:s1\nPALIGN p1\n", "E-SYNTAX"),
        ("#PAIR en:s1\nPALIGN p1 p1\n", "E-SYNTAX"),
        ("#PAIR en:s1 de:s1\nPALIGN p1. p2\n", "E-REF-SYNTAX"),
        ("#PAIR en:s1 de:s1\nAALIGN p1.x p2.Y\n", "E-REF-SYNTAX"),
        ("#PAIR en:s1 de:s1\nPALIGN p1 p1 atag=x\n", "E-SYNTAX"),
    ],
)
def test_al_syntax_errors(text, code):
    assert parse_error_code(parse_alignments, text) == code


def test_al_fixture_round_trip_is_byte_identical():
    text = (FIXTURES / "en-de.al").read_text(encoding="utf-8")
    assert serialize_alignments(parse_alignments(text, filename="en-de.al")) == text


def test_al_random_round_trip():
    rng = random.Random(9)
    for i in range(100):
        corpus = random_corpus(rng)
        pairs = list(corpus.pair_sets[0].pairs)
        assert parse_alignments(serialize_alignments(pairs)) == pairs


def test_al_header_only_serialization():
    from fusetb.model import SentencePairAlignment

    assert (
        serialize_alignments([SentencePairAlignment("en:s1", "de:s1")])
        == "#PAIR en:s1 de:s1\n"
    )


def test_comments_ignored_inside_blocks():
    text = "#BOS s1\n%% a comment\na\tNN\t--\t0\n#EOS s1\n"
    assert len(parse_trees(text)) == 1
    text = "#SENT s1\n%% c\nPRED p1 lemma=X class=v group=X nodes=t1\n"
    assert len(parse_predarg(text)["s1"].predicates) == 1
