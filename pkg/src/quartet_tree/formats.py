"""Text formats: distance matrices, Newick trees, DOT graphs, weight lists.

Matrix file::

    4
    a 0 0.1 0.5 0.6
    b 0.1 0 0.5 0.6
    ...

Weights file (quartet topologies ``ab|cd`` with optional weight, default 1)::

    labels a b c d e
    a b | c d 1.0
    a e | b c

Newick trees are rooted at the internal node ``k0`` purely for the sake of
the syntax; readers should treat them as unrooted.
"""

from __future__ import annotations

import re
from pathlib import Path

from .costs import DistanceMatrix, WeightedQuartetList
from .errors import InputError
from .quartets import Topology
from .tree import Tree

# ---------------------------------------------------------------- matrix --


def format_matrix(matrix: DistanceMatrix) -> str:
    lines = [str(matrix.n)]
    for label, row in zip(matrix.labels, matrix.entries):
        lines.append(" ".join([label] + [repr(float(x)) for x in row]))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<matrix>") -> DistanceMatrix:
    lines = [(i, line) for i, line in enumerate(text.splitlines(), 1) if line.strip()]
    if not lines:
        raise InputError(f"{source}: empty matrix file")
    lineno, first = lines[0]
    try:
        n = int(first.strip())
    except ValueError:
        raise InputError(f"{source}:{lineno}: first line must be the object count") from None
    if n < 1:
        raise InputError(f"{source}:{lineno}: object count must be positive")
    rows = lines[1:]
    if len(rows) != n:
        raise InputError(f"{source}: expected {n} matrix rows, found {len(rows)}")
    labels, entries = [], []
    for lineno, line in rows:
        fields = line.split()
        if len(fields) != n + 1:
            raise InputError(f"{source}:{lineno}: expected a label and {n} values, found {len(fields) - 1} values")
        try:
            entries.append([float(x) for x in fields[1:]])
        except ValueError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
        labels.append(fields[0])
    try:
        return DistanceMatrix(labels, entries)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def read_matrix(path) -> DistanceMatrix:
    return parse_matrix(_read_text(path), str(path))


def write_matrix(matrix: DistanceMatrix, path) -> None:
    Path(path).write_text(format_matrix(matrix))


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


# --------------------------------------------------------------- weights --


def parse_weights(text: str, source: str = "<weights>") -> WeightedQuartetList:
    labels = None
    index: dict[str, int] = {}
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if labels is None:
            fields = line.split()
            if fields[0] != "labels":
                raise InputError(f"{source}:{lineno}: first line must be 'labels NAME ...'")
            labels = tuple(fields[1:])
            index = {lab: i for i, lab in enumerate(labels)}
            if len(index) != len(labels):
                raise InputError(f"{source}:{lineno}: duplicate labels")
            continue
        left, bar, right = line.partition("|")
        a = left.split()
        rest = right.split()
        if not bar or len(a) != 2 or len(rest) not in (2, 3):
            raise InputError(f"{source}:{lineno}: expected 'a b | c d [weight]'")
        try:
            ids = [index[name] for name in a + rest[:2]]
            weight = float(rest[2]) if len(rest) == 3 else 1.0
            entries.append((Topology.from_pairs(*ids), weight))
        except KeyError as exc:
            raise InputError(f"{source}:{lineno}: unknown label {exc}") from None
        except ValueError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
    if labels is None:
        raise InputError(f"{source}: no 'labels' line")
    try:
        return WeightedQuartetList(len(labels), entries, labels)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def read_weights(path) -> WeightedQuartetList:
    return parse_weights(_read_text(path), str(path))


def is_weights_file(path) -> bool:
    for line in _read_text(path).splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            return line.split()[0] == "labels"
    return False


# ---------------------------------------------------------------- newick --

_NEEDS_QUOTES = re.compile(r"[\s(),:;'\[\]]")


def _quote(label: str) -> str:
    if _NEEDS_QUOTES.search(label):
        return "'" + label.replace("'", "''") + "'"
    return label


def _canonical_layout(tree: Tree):
    """Root at the internal neighbor of leaf 0, order children by smallest
    leaf id, and name internal nodes k0, k1, ... in preorder."""
    n = tree.n
    adj = tree.adjacency
    root = adj[0][0]
    parent = {root: -1}
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                stack.append(w)
    min_leaf = {}
    for v in reversed(order):
        if v < n:
            min_leaf[v] = v
        else:
            min_leaf[v] = min(min_leaf[w] for w in adj[v] if w != parent[v])
    children = {
        v: sorted((w for w in adj[v] if w != parent[v]), key=min_leaf.__getitem__) for v in order if v >= n
    }
    names = {}
    counter = 0
    stack = [root]
    while stack:
        v = stack.pop()
        if v < n:
            names[v] = tree.labels[v]
        else:
            names[v] = f"k{counter}"
            counter += 1
            stack.extend(reversed(children[v]))
    return root, children, names


def format_newick(tree: Tree) -> str:
    """Canonical Newick text: equal trees give identical strings."""
    root, children, names = _canonical_layout(tree)
    n = tree.n

    def emit(v: int) -> str:
        if v < n:
            return _quote(names[v])
        return "(" + ",".join(emit(w) for w in children[v]) + ")" + names[v]

    return emit(root) + ";"


def format_dot(tree: Tree) -> str:
    """Graphviz description of the unrooted tree."""
    root, children, names = _canonical_layout(tree)
    lines = ["graph tree {"]
    for v in sorted(names, key=lambda v: (v >= tree.n, names[v])):
        shape = "box" if v < tree.n else "point"
        lines.append(f'  "{names[v]}" [shape={shape}];')
    stack = [root]
    while stack:
        v = stack.pop()
        for w in children.get(v, ()):
            lines.append(f'  "{names[v]}" -- "{names[w]}";')
            stack.append(w)
    lines.append("}")
    return "\n".join(lines) + "\n"


_TOKEN = re.compile(r"\s*('(?:[^']|'')*'|[(),;:]|[^\s(),;:']+)")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"bad Newick text near {text[pos:pos + 20]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_newick(text: str, labels=None) -> Tree:
    """Read a Newick tree as an unrooted ternary tree.

    Branch lengths and internal labels are ignored. A bifurcating root and
    unary nodes are suppressed. ``labels`` fixes the leaf id order; by
    default leaves are numbered in order of appearance.
    """
    tokens = _tokenize(text)
    pos = 0
    edges: list[tuple[int, int]] = []
    leaf_names: list[str] = []
    counter = [0]

    def new_node() -> int:
        counter[0] += 1
        return counter[0] - 1

    kind: dict[int, str | None] = {}

    def skip_label_and_length():
        nonlocal pos
        if pos < len(tokens) and tokens[pos] not in "(),;:":
            pos += 1
        if pos < len(tokens) and tokens[pos] == ":":
            pos += 2

    def subtree() -> int:
        nonlocal pos
        if pos >= len(tokens):
            raise InputError("unexpected end of Newick text")
        v = new_node()
        if tokens[pos] == "(":
            kind[v] = None
            pos += 1
            while True:
                w = subtree()
                edges.append((v, w))
                if pos >= len(tokens):
                    raise InputError("unbalanced parentheses in Newick text")
                tok = tokens[pos]
                pos += 1
                if tok == ")":
                    break
                if tok != ",":
                    raise InputError(f"unexpected {tok!r} in Newick text")
            skip_label_and_length()
        else:
            tok = tokens[pos]
            if tok in "),;:":
                raise InputError(f"missing leaf label before {tok!r}")
            name = tok[1:-1].replace("''", "'") if tok.startswith("'") else tok
            kind[v] = name
            leaf_names.append(name)
            pos += 1
            if pos < len(tokens) and tokens[pos] == ":":
                pos += 2
        return v

    subtree()
    if pos >= len(tokens) or tokens[pos] != ";":
        raise InputError("Newick text must end with ';'")
    if pos != len(tokens) - 1:
        raise InputError("trailing text after ';'")

    nbrs: dict[int, list[int]] = {v: [] for v in kind}
    for a, b in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    # suppress degree-2 internal nodes (bifurcating root, unary nodes)
    for v in list(nbrs):
        if kind[v] is None and len(nbrs[v]) == 2:
            a, b = nbrs.pop(v)
            nbrs[a][nbrs[a].index(v)] = b
            nbrs[b][nbrs[b].index(v)] = a
    if labels is None:
        labels = leaf_names
    labels = tuple(labels)
    if sorted(labels) != sorted(leaf_names):
        raise InputError("Newick leaves do not match the expected labels")
    n = len(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    ids = {}
    next_internal = n
    for v in sorted(nbrs):
        if kind[v] is None:
            if len(nbrs[v]) != 3:
                raise InputError(f"internal node of degree {len(nbrs[v])}; only ternary trees are supported")
            ids[v] = next_internal
            next_internal += 1
        else:
            ids[v] = index[kind[v]]
    adj: list = [None] * len(nbrs)
    for v, ws in nbrs.items():
        if ids[v] >= len(adj):
            raise InputError("Newick tree is not an unrooted ternary tree")
        adj[ids[v]] = [ids[w] for w in ws]
    return Tree(labels, adj)


def read_newick(path, labels=None) -> Tree:
    return parse_newick(_read_text(path), labels)
