from __future__ import annotations

import sys
from pathlib import Path

import pytest

from tt0.elab import ElabResult, elaborate_text

sys.setrecursionlimit(100_000)

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
BAD_CORPUS = CORPUS / "bad"


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.tt0"))


def bad_corpus_files() -> list[Path]:
    return sorted(BAD_CORPUS.glob("*.tt0"))


@pytest.fixture(scope="session")
def corpus() -> dict[str, ElabResult]:
    """Every good corpus module, elaborated once."""
    out: dict[str, ElabResult] = {}
    for path in corpus_files():
        result = elaborate_text(path.read_text(), str(path))
        assert result.ok, [e.message for e in result.errors]
        out[path.stem] = result
    return out
