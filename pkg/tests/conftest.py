from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from treeminors.graph_model import build_tree
from treeminors.oracle import _tree, prufer_decode

FIVE_LEAF_NEWICK = "((1:1,2:1)A:1,3:1,(4:1,5:1)C:1)B;"


def two_hub_tree():
    labels = ["1", "2", "3", "4", "5", "A", "B"]
    edges = [("A", "1", 1), ("A", "2", 1), ("B", "3", 1), ("B", "4", 1), ("B", "5", 1), ("A", "B", 1)]
    return build_tree(labels, edges)


def star3(a, b, c):
    return build_tree(["u", "v", "w", "o"], [("o", "u", a), ("o", "v", b), ("o", "w", c)])


def four_leaf(a, b, c, d, e):
    return build_tree(
        ["1", "2", "3", "4", "A", "B"],
        [("1", "A", a), ("2", "A", b), ("A", "B", c), ("3", "B", d), ("4", "B", e)],
    )


positive_rationals = st.builds(Fraction, st.integers(1, 12), st.integers(1, 12))


@st.composite
def trees(draw, min_n=1, max_n=7, unit=False):
    n = draw(st.integers(min_n, max_n))
    if n == 1:
        return _tree(1, [], [])
    seq = draw(st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    if unit:
        lengths = [1] * (n - 1)
    else:
        lengths = draw(st.lists(positive_rationals, min_size=n - 1, max_size=n - 1))
    return _tree(n, prufer_decode(seq, n), lengths)


@st.composite
def tree_and_subset(draw, min_n=1, max_n=7, unit=False, min_k=1):
    t = draw(trees(min_n=max(min_n, min_k), max_n=max_n, unit=unit))
    s = draw(st.sets(st.integers(0, t.n - 1), min_size=min_k, max_size=t.n))
    return t, tuple(sorted(s))


# acceptance criteria report ------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
