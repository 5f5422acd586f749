import hypothesis.strategies as st
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

purity = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def purity_vectors(min_qubits: int = 2, max_qubits: int = 7):
    return st.lists(purity, min_size=min_qubits, max_size=max_qubits)


def even_purity_vectors(max_n: int = 6):
    return st.integers(1, max_n // 2).flatmap(lambda h: st.lists(purity, min_size=2 * h + 1, max_size=2 * h + 1))


def rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture
def rel_dev():
    return rel
