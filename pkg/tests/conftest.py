import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from curvlab.kernels import Diagonal, DetBall2, DruryArveson, Power, Product, SzegoDisc, SzegoPolydisc

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def disc_atoms():
    diag = st.builds(
        lambda cs, tail: Diagonal(tuple(cs), tail),
        st.lists(st.floats(0.2, 5.0), min_size=1, max_size=4),
        st.floats(0.2, 5.0),
    )
    return st.one_of(st.just(SzegoDisc()), diag)


def atoms_for(kind: str, m: int):
    if kind == "disc":
        return disc_atoms()
    if kind == "ball":
        return st.just(DruryArveson(m))
    if kind == "polydisc":
        return st.just(SzegoPolydisc(m))
    return st.just(DetBall2())


def kernel_trees(kind: str, m: int, max_leaves: int = 3):
    """Products and positive powers of atoms on one domain."""
    base = atoms_for(kind, m)

    def extend(children):
        return st.one_of(
            st.builds(Product, children, children),
            st.builds(Power, children, st.sampled_from([0.5, 1.5, 2.0, 0.25, 3.0])),
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


DOMAINS = [("disc", 1), ("ball", 2), ("polydisc", 2), ("ball", 3), ("matrix2", 4)]


@st.composite
def kernel_and_point(draw):
    kind, m = draw(st.sampled_from(DOMAINS))
    k = draw(kernel_trees(kind, m))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    radius = draw(st.floats(0.0, 0.7 if kind == "matrix2" else 0.85))
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    if kind == "matrix2":
        v = v / np.linalg.norm(v.reshape(2, 2), 2)
    elif kind == "polydisc":
        v = v / np.max(np.abs(v))
    else:
        v = v / np.linalg.norm(v)
    return k, radius * v


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
