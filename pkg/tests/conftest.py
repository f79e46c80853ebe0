from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def identifier_shape_text() -> str:
    return (FIXTURES / "identifier_shape.ttl").read_text()
