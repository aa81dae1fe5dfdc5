from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return DATA / "corpus"


@pytest.fixture(scope="session")
def manifest_path(corpus_dir) -> Path:
    return corpus_dir / "manifest.jsonl"


@pytest.fixture(scope="session")
def golden_dir(corpus_dir) -> Path:
    return corpus_dir / "golden"


@pytest.fixture(scope="session")
def bad_manifest_path() -> Path:
    return DATA / "bad_manifest" / "manifest.jsonl"
