import itertools

from hypothesis import strategies as st

from distlab import relcore as rc


@st.composite
def small_graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return rc.graph(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def small_digraphs(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    # 0 none, 1 forward, 2 backward
    vals = draw(st.lists(st.integers(0, 2), min_size=len(pairs), max_size=len(pairs)))
    arcs = [(a, b) if v == 1 else (b, a) for (a, b), v in zip(pairs, vals) if v]
    return rc.digraph(n, arcs)
