"""Coloured rooted trees and their isomorphisms.

Trees are planar: every vertex carries a tuple of children, each a
`Node` or a bare input edge (`Leaf`).  The planar order at each vertex
is required to list the child colours in non-decreasing colour order, so
within a block of equal colours the planar order is genuine data.  The
bare edge `Leaf(c)` is itself a tree with one input and no vertices.

Vertices and leaves are addressed by paths: tuples of child positions
from the root, the root itself being ``()``.

An isomorphism is a root-preserving, colour-preserving bijection on
vertices and input edges respecting incidence; it need not preserve the
planar order of siblings.  Leaf edges of equal colour below a common
vertex can be permuted, so the automorphism group of the n-corolla on
colours (c_1, ..., c_n) is the stabilizer of that colour tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from operadkit.colours import ColourSet, Permutation, Signature

Path = tuple[int, ...]


class TreeError(ValueError):
    """Raised for malformed trees or incompatible grafting data."""


@dataclass(frozen=True)
class Leaf:
    colour: str


@dataclass(frozen=True)
class Node:
    colour: str
    children: tuple = ()


Tree = Leaf | Node


def is_leaf(tree: Tree) -> bool:
    return isinstance(tree, Leaf)


def input_colours(node: Node) -> tuple[str, ...]:
    return tuple(child.colour for child in node.children)


def signature_of(node: Node) -> Signature:
    return Signature(input_colours(node), node.colour)


def vertex_count(tree: Tree) -> int:
    if is_leaf(tree):
        return 0
    return 1 + sum(vertex_count(child) for child in tree.children)


def leaf_count(tree: Tree) -> int:
    if is_leaf(tree):
        return 1
    return sum(leaf_count(child) for child in tree.children)


def vertex_paths(tree: Tree) -> tuple[Path, ...]:
    """All vertex paths in preorder, leftmost branch first."""
    if is_leaf(tree):
        return ()
    acc = [()]
    for i, child in enumerate(tree.children):
        acc.extend((i,) + p for p in vertex_paths(child))
    return tuple(acc)


def leaf_paths(tree: Tree) -> tuple[Path, ...]:
    """All input edge paths in planar left-to-right order."""
    if is_leaf(tree):
        return ((),)
    acc = []
    for i, child in enumerate(tree.children):
        acc.extend((i,) + p for p in leaf_paths(child))
    return tuple(acc)


def subtree_at(tree: Tree, path: Path) -> Tree:
    for i in path:
        if is_leaf(tree):
            raise TreeError("path %r runs past a leaf" % (path,))
        tree = tree.children[i]
    return tree


def validate_tree(colour_set: ColourSet, tree: Tree) -> None:
    """Check colours are known and siblings are in colour order."""
    if is_leaf(tree):
        if tree.colour not in colour_set:
            raise TreeError("unknown colour %r" % (tree.colour,))
        return
    if tree.colour not in colour_set:
        raise TreeError("unknown colour %r" % (tree.colour,))
    keys = [colour_set.index(child.colour) for child in tree.children]
    if any(a > b for a, b in zip(keys, keys[1:])):
        raise TreeError("child colours not in colour order at some vertex")
    for child in tree.children:
        validate_tree(colour_set, child)


def corolla(colour_set: ColourSet, sig: Signature) -> Node:
    """The one-vertex tree with the given (ordered) signature."""
    colour_set.check_signature(sig)
    if not sig.is_ordered(colour_set):
        raise TreeError("corolla signature must be ordered: %s" % sig)
    return Node(sig.output, tuple(Leaf(c) for c in sig.inputs))


def graft(colour_set: ColourSet, sig: Signature, subtrees: list) -> Node:
    """Graft subtrees onto a corolla with the given signature.

    The i-th subtree replaces the i-th input edge; its root colour must
    equal the i-th input colour, which keeps the colour-order convention.
    """
    root = corolla(colour_set, sig)
    if len(subtrees) != sig.arity:
        raise TreeError("expected %d subtrees, got %d" % (sig.arity, len(subtrees)))
    for c, sub in zip(sig.inputs, subtrees):
        if sub.colour != c:
            raise TreeError("subtree colour %r does not match slot colour %r" % (sub.colour, c))
    return Node(root.colour, tuple(subtrees))


# ---------------------------------------------------------------------------
# Canonical forms


def tree_key(colour_set: ColourSet, tree: Tree):
    """A total order key; colour leads so sorted children stay colour-sorted."""
    if is_leaf(tree):
        return (colour_set.index(tree.colour), 0)
    return (colour_set.index(tree.colour), 1,
            tuple(tree_key(colour_set, child) for child in tree.children))


def canonical_form(colour_set: ColourSet, tree: Tree) -> Tree:
    """The canonical representative of the isomorphism class of ``tree``.

    Children are recursively canonicalised and sorted by `tree_key`; two
    trees are isomorphic exactly when their canonical forms are equal,
    which is cross-checked against `find_isos` in the test suite.
    """
    if is_leaf(tree):
        return tree
    children = sorted((canonical_form(colour_set, c) for c in tree.children),
                      key=lambda c: tree_key(colour_set, c))
    return Node(tree.colour, tuple(children))


# ---------------------------------------------------------------------------
# Isomorphisms


@dataclass(frozen=True)
class TreeIso:
    """A colour-preserving isomorphism between two trees.

    Maps are given on vertex paths and on input edge paths; the root is
    preserved and incidence is respected by construction in `find_isos`.
    """

    source: Tree
    target: Tree
    vertex_map: dict = field(compare=False)
    leaf_map: dict = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_key",
                           (tuple(sorted(self.vertex_map.items())),
                            tuple(sorted(self.leaf_map.items()))))

    def __eq__(self, other):
        return (self.source, self.target, self._key) == (other.source, other.target, other._key)

    def __hash__(self):
        return hash((self.source, self.target, self._key))

    @classmethod
    def identity(cls, tree: Tree) -> "TreeIso":
        return cls(tree, tree,
                   {p: p for p in vertex_paths(tree)},
                   {p: p for p in leaf_paths(tree)})

    def then(self, other: "TreeIso") -> "TreeIso":
        assert self.target == other.source
        return TreeIso(self.source, other.target,
                       {p: other.vertex_map[q] for p, q in self.vertex_map.items()},
                       {p: other.leaf_map[q] for p, q in self.leaf_map.items()})

    def inverse(self) -> "TreeIso":
        return TreeIso(self.target, self.source,
                       {q: p for p, q in self.vertex_map.items()},
                       {q: p for p, q in self.leaf_map.items()})

    def position_permutation(self, vertex: Path) -> Permutation:
        """How the iso permutes the child slots of ``vertex``.

        Slot i of the vertex is sent to slot pi(i) of its image; the
        permutation fixes the child colour tuple.
        """
        node = subtree_at(self.source, vertex)
        images = []
        for i, child in enumerate(node.children):
            m = self.leaf_map if is_leaf(child) else self.vertex_map
            images.append(m[vertex + (i,)][-1] + 1)
        return Permutation(tuple(images))


def _combine(beta, child_isos):
    vertex_map = {(): ()}
    leaf_map = {}
    for i, (j, (vm, lm)) in enumerate(zip(beta, child_isos)):
        for p, q in vm.items():
            vertex_map[(i,) + p] = (j,) + q
        for p, q in lm.items():
            leaf_map[(i,) + p] = (j,) + q
    return vertex_map, leaf_map


@lru_cache(maxsize=None)
def _match(s: Tree, t: Tree):
    """All (vertex_map, leaf_map) pairs of isomorphisms s -> t."""
    if is_leaf(s) or is_leaf(t):
        if is_leaf(s) and is_leaf(t) and s.colour == t.colour:
            return (({}, {(): ()}),)
        return ()
    if s.colour != t.colour or len(s.children) != len(t.children):
        return ()
    n = len(s.children)
    out = []

    def assign(i, used, beta, picked):
        if i == n:
            out.append(_combine(beta, picked))
            return
        for j in range(n):
            if j in used:
                continue
            for iso in _match(s.children[i], t.children[j]):
                assign(i + 1, used | {j}, beta + [j], picked + [iso])

    assign(0, frozenset(), [], [])
    return tuple(out)


def find_isos(source: Tree, target: Tree) -> tuple[TreeIso, ...]:
    """All isomorphisms between two trees (empty if none exist)."""
    return tuple(TreeIso(source, target, dict(vm), dict(lm))
                 for vm, lm in _match(source, target))


def automorphisms(tree: Tree) -> tuple[TreeIso, ...]:
    return find_isos(tree, tree)


# ---------------------------------------------------------------------------
# Input numberings

Numbering = tuple[Path, ...]


def numberings(tree: Tree) -> tuple[Numbering, ...]:
    """All bijections {1..n} -> input edges, as tuples of leaf paths."""
    return tuple(itertools.permutations(leaf_paths(tree)))


def planar_numbering(tree: Tree) -> Numbering:
    return leaf_paths(tree)


def numbering_act(tau: Numbering, sigma: Permutation) -> Numbering:
    """Right action: position i of the result is tau(sigma(i))."""
    return sigma.permute_tuple(tau)


def lambda_action(iso: TreeIso, tau: Numbering) -> Numbering:
    """Left action of an isomorphism on numberings: (phi . tau)(i) = phi(tau(i))."""
    return tuple(iso.leaf_map[p] for p in tau)


def vertex_order(tree: Tree, tau: Numbering) -> tuple[Path, ...]:
    """The linear order on vertices induced by an input numbering.

    The root comes first; vertices in different child subtrees are
    ordered by which subtree contains the earliest-numbered input edge,
    and each subtree is ordered recursively by the induced numbering.
    When every vertex has at least one input below it (in particular
    when all valences are >= 1) this order is isomorphism-invariant;
    subtrees without input edges are placed last, in planar order.
    """
    if is_leaf(tree):
        raise TreeError("a bare edge has no vertices to order")
    position = {p: i for i, p in enumerate(tau, start=1)}
    if set(position) != set(leaf_paths(tree)):
        raise TreeError("numbering does not enumerate the input edges")

    def walk(node, path):
        order = [path]
        ranked = []
        for i, child in enumerate(node.children):
            if is_leaf(child):
                continue
            nums = [position[path + (i,) + p] for p in leaf_paths(child)
                    if path + (i,) + p in position]
            first = min(nums) if nums else len(position) + 1
            ranked.append((first, i, child))
        ranked.sort(key=lambda r: (r[0], r[1]))
        for _, i, child in ranked:
            order.extend(walk(child, path + (i,)))
        return order

    return tuple(walk(tree, ()))


# ---------------------------------------------------------------------------
# Enumeration


def _child_pool(colour_set: ColourSet, max_leaves: int, max_vertices: int):
    pool = set()
    for colour in colour_set.colours:
        for n in range(0, max_leaves + 1):
            pool.update(enumerate_trees(colour_set, n, colour, max_vertices))
    return sorted(pool, key=lambda t: tree_key(colour_set, t))


@lru_cache(maxsize=None)
def _enumerate(colour_set: ColourSet, n: int, output: str, max_vertices: int):
    found = set()
    if n == 1:
        found.add(Leaf(output))
    if max_vertices >= 1:
        pool = _child_pool(colour_set, n, max_vertices - 1)

        def extend(children, start, leaves_left, vertex_budget):
            if leaves_left == 0:
                found.add(Node(output, tuple(children)))
            for k in range(start, len(pool)):
                cand = pool[k]
                nl = leaf_count(cand)
                nv = vertex_count(cand)
                if nl > leaves_left or nv > vertex_budget:
                    continue
                children.append(cand)
                extend(children, k, leaves_left - nl, vertex_budget - nv)
                children.pop()

        extend([], 0, n, max_vertices - 1)
    return tuple(sorted(found, key=lambda t: tree_key(colour_set, t)))


def enumerate_trees(colour_set: ColourSet, n: int, output: str,
                    max_vertices: int) -> tuple[Tree, ...]:
    """All isomorphism classes of trees with ``n`` inputs and the given root
    colour, up to the vertex bound, as canonical representatives."""
    if output not in colour_set:
        return ()
    return _enumerate(colour_set, n, output, max_vertices)


@lru_cache(maxsize=None)
def enumerate_planar_trees(colour_set: ColourSet, n: int, output: str,
                           max_vertices: int) -> tuple[Tree, ...]:
    """All planar trees (colour-sorted siblings, equal colours in any order)."""
    found = []
    if output not in colour_set:
        return ()
    if n == 1:
        found.append(Leaf(output))
    if max_vertices >= 1:
        pool = []
        for colour in colour_set.colours:
            for k in range(0, n + 1):
                pool.extend(enumerate_planar_trees(colour_set, k, colour, max_vertices - 1))

        def extend(children, leaves_left, vertex_budget):
            if leaves_left == 0:
                cand = Node(output, tuple(children))
                try:
                    validate_tree(colour_set, cand)
                except TreeError:
                    pass
                else:
                    found.append(cand)
            for sub in pool:
                nl = leaf_count(sub)
                nv = vertex_count(sub)
                if nl > leaves_left or nv > vertex_budget:
                    continue
                if children and colour_set.index(sub.colour) < colour_set.index(children[-1].colour):
                    continue
                children.append(sub)
                extend(children, leaves_left - nl, vertex_budget - nv)
                children.pop()

        extend([], n, max_vertices - 1)
    return tuple(dict.fromkeys(found))
