"""Shared fixtures: the bundled Bageshree alphabet, corpus and models."""

import pytest

from src.app.corpus import service as corpus_service
from src.app.corpus import types as corpus_types
from src.app.model import io as model_io
from src.app.model import service as model_service
from src.app.model import types as model_types
from src.config import DEFAULT_DATA_DIR


def data_path(name: str) -> str:
    return str(DEFAULT_DATA_DIR / name)


@pytest.fixture(scope="session")
def bageshree() -> corpus_types.AlphabetFile:
    return corpus_service.load_alphabet(data_path("bageshree.json"))


@pytest.fixture(scope="session")
def alphabet(bageshree: corpus_types.AlphabetFile) -> corpus_types.Alphabet:
    return bageshree.alphabet


@pytest.fixture(scope="session")
def corpus(alphabet: corpus_types.Alphabet) -> list[corpus_types.NoteSequence]:
    with open(data_path("bageshree_corpus.txt"), encoding="utf-8") as f:
        return corpus_service.parse_corpus(f.read(), alphabet)


@pytest.fixture(scope="session")
def counts2() -> model_types.CountMatrix:
    model = model_io.load_model(data_path("bageshree_order2_counts.json"))
    assert isinstance(model, model_types.CountMatrix)
    return model


@pytest.fixture(scope="session")
def tpm2(counts2: model_types.CountMatrix) -> model_types.TransitionMatrix:
    return model_service.to_tpm(counts2)


@pytest.fixture(scope="session")
def tpm1() -> model_types.TransitionMatrix:
    model = model_io.load_model(data_path("bageshree_order1_tpm.json"))
    assert isinstance(model, model_types.TransitionMatrix)
    return model
