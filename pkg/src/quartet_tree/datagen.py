"""Generators for controlled experiments where the right answer is known."""

from __future__ import annotations

import random
import string

import numpy as np

from .costs import DistanceMatrix
from .errors import InputError
from .ncd import Corpus
from .search import random_tree
from .tree import Tree

# 22 tag combinations over tags a..k: three families with disjoint tag pools
# plus three files bridging two families. No file uses more than 4 tags.
DEFAULT_TAG_SPEC = (
    "a", "ab", "ac", "ad", "abc", "abd", "acd", "abcd",
    "e", "ef", "eg", "efg", "fg",
    "h", "hi", "hj", "hij", "ijk", "hijk",
    "ae", "dh", "gk",
)  # fmt: skip

FULL_SCALE = {"tag_size": 1024, "file_size": 80 * 1024}
CI_SCALE = {"tag_size": 128, "file_size": 8 * 1024}


def random_tree_metric(
    n: int, rng: random.Random, labels=None, normalized: bool = False
) -> tuple[Tree, DistanceMatrix]:
    """Random tree and the matrix ``d(a, b) = (L(a, b) + 1) / 18``.

    ``L`` is the leaf-to-leaf path length in edges and ``d(a, a) = 0``. The
    divisor is 18 for every ``n``; ``normalized=True`` divides by ``2n``
    instead, which keeps all distances at most 1 for large trees.
    """
    if n < 4:
        raise InputError(f"need at least 4 leaves, got {n}")
    if labels is None:
        labels = [f"n{i:02d}" for i in range(n)]
    tree = random_tree(n, rng, labels)
    path = tree.leaf_distances().astype(np.float64)
    d = (path + 1.0) / (2 * n if normalized else 18)
    np.fill_diagonal(d, 0.0)
    return tree, DistanceMatrix(tree.labels, d)


def tag_corpus(
    rng: np.random.Generator,
    num_tags: int = 11,
    tag_size: int = 1024,
    file_size: int = 80 * 1024,
    copies_per_tag: int = 10,
    spec=DEFAULT_TAG_SPEC,
) -> Corpus:
    """Random files sharing randomly placed copies of random tags.

    Tags are ``num_tags`` random blocks named ``a``, ``b``, .... A file named
    ``"abd"`` starts as ``file_size`` random bytes; then for tag ``a``, ``b``
    and ``d`` in turn, ``copies_per_tag`` copies of the tag overwrite the
    file at uniformly random offsets. Later copies may overwrite earlier ones.
    """
    if num_tags > 26:
        raise InputError("at most 26 tags are supported")
    if tag_size > file_size:
        raise InputError("tags must not be larger than the files")
    names = string.ascii_lowercase[:num_tags]
    tags = {name: rng.bytes(tag_size) for name in names}
    items = []
    for combo in spec:
        if not 1 <= len(combo) <= 4 or len(set(combo)) != len(combo):
            raise InputError(f"tag combination {combo!r} must name 1 to 4 distinct tags")
        unknown = set(combo) - set(names)
        if unknown:
            raise InputError(f"tag combination {combo!r} uses unknown tags {sorted(unknown)}")
        data = bytearray(rng.bytes(file_size))
        for name in combo:
            for offset in rng.integers(0, file_size - tag_size + 1, size=copies_per_tag):
                data[offset:offset + tag_size] = tags[name]
        items.append((combo, bytes(data)))
    return Corpus(items)
