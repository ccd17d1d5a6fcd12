import json
import random
from pathlib import Path

import pytest

from chaoscomp.keys import ChaosKey, keygen

FIXTURES = Path(__file__).parent / "fixtures"


def fixed_keys() -> dict[str, ChaosKey]:
    data = json.loads((FIXTURES / "keystream_golden.json").read_text())
    return {name: ChaosKey.from_values(e["key"]["logistic"], e["key"]["henon"],
                                       e["key"]["lorenz"], e["key"]["threshold"])
            for name, e in data.items()}


@pytest.fixture(scope="session")
def key() -> ChaosKey:
    return fixed_keys()["reference"]


@pytest.fixture(scope="session")
def random_keys() -> list[ChaosKey]:
    rng = random.Random(99)
    return [keygen(rng) for _ in range(8)]
