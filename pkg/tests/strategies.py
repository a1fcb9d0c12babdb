from hypothesis import strategies as st

from app.core.schedule import sample_mode
from app.schemas.mode import Family, UpdateMode
from app.schemas.ring import Configuration

SAMPLED = [Family.SEQ, Family.BS, Family.BP, Family.LC]

rules = st.integers(0, 255)


@st.composite
def modes(draw: st.DrawFn, min_n: int = 1, max_n: int = 8) -> UpdateMode:
    """A sampled mode of a randomly drawn family."""
    family = draw(st.sampled_from(SAMPLED))
    n = draw(st.integers(min_n, max_n))
    return sample_mode(family, n, draw(st.integers(0, 2**32 - 1)))


@st.composite
def configurations(draw: st.DrawFn, n: int) -> Configuration:
    return Configuration(bits=tuple(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))))


@st.composite
def mode_and_configuration(
    draw: st.DrawFn, min_n: int = 1, max_n: int = 8
) -> tuple[UpdateMode, Configuration]:
    mode = draw(modes(min_n, max_n))
    return mode, draw(configurations(mode.n))
