import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsark.trees import (
    ColoredTree,
    TreeLimitError,
    density,
    enumerate_trees,
    labelings,
    parse,
    symmetry,
    tree,
)


def naive_trees(q, N):
    """Independent enumerator: every parent array (parent index < child
    index) with every coloring, canonicalized by sorted strings."""

    def canon(parents, colors, node):
        kids = sorted(canon(parents, colors, k) for k in range(len(parents)) if parents[k] == node)
        return f"{colors[node]}(" + "".join(kids) + ")"

    out = set()
    for n in range(1, q + 1):
        for parents in itertools.product(*[range(k) for k in range(1, n)]):
            parents = (-1, *parents)
            for colors in itertools.product(range(1, N + 1), repeat=n):
                out.add(canon(parents, colors, 0))
    return out


def as_naive(t):
    return f"{t.root_color}(" + "".join(sorted(as_naive(c) for c in t.children)) + ")"


# enumeration ---------------------------------------------------------------

@pytest.mark.parametrize("q, N", [(1, 1), (1, 3), (2, 2), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2)])
def test_enumeration_matches_naive_generator(q, N):
    trees = enumerate_trees(q, N)
    encodings = {as_naive(t) for t in trees}
    assert len(encodings) == len(trees)
    assert encodings == naive_trees(q, N)


@pytest.mark.parametrize("N, expected", [(1, 4), (2, 20), (3, 57)])
def test_order3_count_closed_form(N, expected):
    # N + N^2 + N^3 (chains) + N * N(N+1)/2 (root with two leaves)
    assert len(enumerate_trees(3, N)) == expected
    assert expected == N + N**2 + N**3 + N * N * (N + 1) // 2


def test_order1_is_one_bullet_per_color():
    trees = enumerate_trees(1, 3)
    assert [t.encode() for t in trees] == ["1", "2", "3"]


def test_uncolored_counts():
    # 1, 1, 2, 4, 9, 20 rooted trees with n nodes
    trees = enumerate_trees(6, 1)
    assert [len(trees.of_order(k)) for k in range(1, 7)] == [1, 1, 2, 4, 9, 20]


@pytest.mark.parametrize("q, N", [(7, 1), (2, 9)])
def test_guard_limits(q, N):
    with pytest.raises(TreeLimitError):
        enumerate_trees(q, N)


def test_guard_is_configurable():
    assert len(enumerate_trees(7, 1, max_order=7).of_order(7)) == 48


@pytest.mark.parametrize("q, N", [(0, 1), (1, 0)])
def test_rejects_empty_requests(q, N):
    with pytest.raises(ValueError):
        enumerate_trees(q, N)


def test_membership_and_ordering():
    trees = enumerate_trees(3, 2)
    assert tree((1, [2])) in trees
    assert tree((1, [(2, [1]), 1])) not in trees
    assert list(trees.trees) == sorted(trees.trees, key=lambda t: (t.order, t.key))


# symmetry and density ---------------------------------------------------------

@pytest.mark.parametrize("spec, sigma, gamma", [
    ((3, [1, 1]), 2, 3),
    ((3, [1, 2]), 1, 3),
    (1, 1, 1),
    ((2, [(1, [3])]), 1, 6),
    ((1, [1, 1, 1]), 6, 4),
    ((1, [(1, [1]), (1, [1])]), 2, 20),
])
def test_symmetry_and_density(spec, sigma, gamma):
    t = tree(spec)
    assert symmetry(t) == sigma
    assert density(t) == gamma


def test_symmetry_uses_child_multiplicity_powers():
    # two identical children that each have symmetry 2: 2! * 2**2
    t = tree((1, [(1, [2, 2]), (1, [2, 2])]))
    assert symmetry(t) == 8


def test_density_ignores_colors_symmetry_does_not():
    a, b = tree((3, [1, 1])), tree((3, [1, 2]))
    assert density(a) == density(b)
    assert symmetry(a) != symmetry(b)


def test_sigma_divides_factorial():
    for t in enumerate_trees(5, 2):
        assert math.factorial(t.order) % symmetry(t) == 0


def test_labeled_count_identity():
    # sum over uncolored trees of n!/(sigma*gamma) counts heap-ordered trees: (n-1)!
    trees = enumerate_trees(6, 1)
    for n in range(1, 7):
        total = sum(math.factorial(n) // (symmetry(t) * density(t)) for t in trees.of_order(n))
        assert total == math.factorial(n - 1)


# canonical form -------------------------------------------------------------

def random_tree_strategy(max_leaves=8, colors=3):
    leaf = st.integers(1, colors).map(ColoredTree)
    return st.recursive(
        leaf,
        lambda kids: st.tuples(st.integers(1, colors), st.lists(kids, min_size=1, max_size=3))
        .map(lambda x: ColoredTree(x[0], tuple(x[1]))),
        max_leaves=max_leaves,
    )


@settings(max_examples=200, deadline=None)
@given(random_tree_strategy(), st.randoms(use_true_random=False))
def test_shuffling_children_keeps_encoding(t, rnd):
    def rebuild(node):
        kids = [rebuild(c) for c in node.children]
        rnd.shuffle(kids)
        return ColoredTree(node.root_color, tuple(kids))

    u = rebuild(t)
    assert u == t
    assert u.encode() == t.encode()
    assert hash(u) == hash(t)


@settings(max_examples=200, deadline=None)
@given(random_tree_strategy())
def test_parse_roundtrip_and_order(t):
    assert parse(t.encode()) == t
    parents, colors = t.flatten()
    assert len(parents) == t.order == 1 + sum(c.order for c in t.children)
    assert colors == t.colors()


@settings(max_examples=100, deadline=None)
@given(random_tree_strategy())
def test_recolor_preserves_density(t):
    assert density(t.recolor(lambda c: 1)) == density(t)
    assert symmetry(t.recolor(lambda c: 1)) >= symmetry(t)


def test_multiset_groups_equal_children():
    t = tree((1, [2, 2, (1, [2])]))
    assert [(c.encode(), m) for c, m in t.multiset] == [("2", 2), ("1[2]", 1)]


@pytest.mark.parametrize("text", ["", "1[", "1[2", "[1]", "1]", "1[2]x"])
def test_parse_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse(text)


def test_colors_are_one_based():
    with pytest.raises(ValueError):
        ColoredTree(0)


def test_to_dict():
    d = tree((3, [1, 1])).to_dict()
    assert d["order"] == 3 and d["root_color"] == 3 and d["sigma"] == 2 and d["gamma"] == 3
    assert [c["root_color"] for c in d["children"]] == [1, 1]


# labelings --------------------------------------------------------------------

@pytest.mark.parametrize("spec, s, count", [(1, 2, 2), ((1, [(2, [3])]), 3, 27), ((1, [2]), 4, 16)])
def test_labeling_counts(spec, s, count):
    assert sum(1 for _ in labelings(tree(spec), s)) == count


def test_labeled_edges_carry_child_colors():
    t = tree((1, [(2, [3])]))  # root mu=1, middle nu=2, leaf xi=3
    for lt in labelings(t, 3):
        i, j, k = lt.labels
        assert lt.edges == ((i, j, 2), (j, k, 3))
        assert lt.root_label == i and lt.root_color == 1
