from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from fusetb.corpus import load_corpus

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"
FIXTURE_FILES = ("corpus.manifest", "en.tb", "en.pa", "de.tb", "de.pa", "en-de.al")


@pytest.fixture(scope="session")
def fixture_corpus():
    corpus, diags = load_corpus(FIXTURES / "corpus.manifest")
    assert corpus is not None, [d.render() for d in diags]
    return corpus


@pytest.fixture()
def corpus_copy(tmp_path):
    """Writable copy of the fixture corpus for mutation tests."""
    dest = tmp_path / "corpus"
    shutil.copytree(FIXTURES, dest)
    return dest


def mutate_file(root: Path, name: str, old: str, new: str) -> None:
    path = root / name
    text = path.read_text(encoding="utf-8")
    assert old in text, f"mutation anchor {old!r} not found in {name}"
    path.write_text(text.replace(old, new, 1), encoding="utf-8")
