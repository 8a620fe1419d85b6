from pathlib import Path

import pytest

from teacheval import canonical_schema, parse_profiles, parse_responses, parse_sent_counts

SAMPLE_DATA = Path(__file__).resolve().parent.parent / "sample_data"


@pytest.fixture(scope="session")
def sample_dir() -> Path:
    return SAMPLE_DATA


@pytest.fixture(scope="session")
def schema():
    return canonical_schema()


@pytest.fixture(scope="session")
def sample_dataset(schema):
    return parse_responses(
        (SAMPLE_DATA / "responses.csv").read_text(),
        schema,
        profiles=parse_profiles((SAMPLE_DATA / "profiles.csv").read_text()),
        sent_counts=parse_sent_counts((SAMPLE_DATA / "sent.json").read_text()),
    )
