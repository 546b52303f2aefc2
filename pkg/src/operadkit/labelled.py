"""Labelled trees: the common core of free operads and the W-construction.

A labelled tree is a coloured tree whose vertices carry element names
and whose input edges carry the input numbering directly (each leaf
stores its input number, so renumbering and grafting never need path
bookkeeping).  Internal edges optionally carry a length, which the
W-construction uses and the free operad leaves as ``None``.

Equality of the operadic elements represented by labelled trees is
equality of canonical forms: `canonicalize` minimises the encoding over
all isomorphisms of the underlying tree, transporting vertex labels by
the induced slot permutations.  Transporting along an isomorphism that
moves slot i of a vertex to slot pi(i) multiplies the label by pi^{-1},
matching the right action convention for operad elements.
"""

from __future__ import annotations

import itertools
from ast import literal_eval
from dataclasses import dataclass

from operadkit.colours import ColourSet, Permutation, Signature


@dataclass(frozen=True)
class LLeaf:
    colour: str
    index: int


@dataclass(frozen=True)
class LEdge:
    length: str | None
    child: "LNode"


@dataclass(frozen=True)
class LNode:
    colour: str
    label: str
    children: tuple  # of LLeaf | LEdge


LTree = LLeaf | LNode  # a bare edge (LLeaf at the root) or a proper tree


def child_colour(child) -> str:
    return child.colour if isinstance(child, LLeaf) else child.child.colour


def node_signature(node: LNode) -> Signature:
    return Signature(tuple(child_colour(c) for c in node.children), node.colour)


def leaf_entries(tree: LTree) -> list[LLeaf]:
    """All leaves in planar left-to-right order."""
    if isinstance(tree, LLeaf):
        return [tree]
    out = []
    for child in tree.children:
        if isinstance(child, LLeaf):
            out.append(child)
        else:
            out.extend(leaf_entries(child.child))
    return out


def arity(tree: LTree) -> int:
    return len(leaf_entries(tree))


def vertex_count(tree: LTree) -> int:
    if isinstance(tree, LLeaf):
        return 0
    return 1 + sum(vertex_count(c.child) for c in tree.children
                   if isinstance(c, LEdge))


def internal_edge_count(tree: LTree) -> int:
    if isinstance(tree, LLeaf):
        return 0
    total = 0
    for child in tree.children:
        if isinstance(child, LEdge):
            total += 1 + internal_edge_count(child.child)
    return total


def numbered_colours(tree: LTree) -> tuple[str, ...]:
    """Input colours listed by input number (position j holds leaf j+1)."""
    entries = leaf_entries(tree)
    assert sorted(e.index for e in entries) == list(range(1, len(entries) + 1)), \
        "leaf indices must number the inputs bijectively"
    colours = [None] * len(entries)
    for e in entries:
        colours[e.index - 1] = e.colour
    return tuple(colours)


def relabel_indices(tree: LTree, mapping) -> LTree:
    """Apply ``mapping`` (a dict or callable) to every leaf index."""
    f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
    if isinstance(tree, LLeaf):
        return LLeaf(tree.colour, f(tree.index))

    def walk(node):
        children = []
        for child in node.children:
            if isinstance(child, LLeaf):
                children.append(LLeaf(child.colour, f(child.index)))
            else:
                children.append(LEdge(child.length, walk(child.child)))
        return LNode(node.colour, node.label, tuple(children))

    return walk(tree)


def transform_leaves(node: LNode, f) -> LNode:
    """Rebuild the tree with every leaf replaced by f(leaf), which may
    return a leaf or an internal edge; slot colours must be preserved."""
    children = []
    for child in node.children:
        if isinstance(child, LLeaf):
            new = f(child)
            assert child_colour(new) == child.colour
            children.append(new)
        else:
            children.append(LEdge(child.length, transform_leaves(child.child, f)))
    return LNode(node.colour, node.label, tuple(children))


def act_indices(tree: LTree, xi: Permutation) -> LTree:
    """The right action on a labelled tree: input j was input xi(j)."""
    xi_inv = xi.inverse()
    return relabel_indices(tree, lambda i: xi_inv(i))


def graft_numbered(outer: LTree, inners, edge_length=None) -> LTree:
    """Replace leaf j of ``outer`` by ``inners[j-1]``, renumbering inputs
    consecutively block by block; each new internal edge carries
    ``edge_length``."""
    offsets = [0]
    for t in inners:
        offsets.append(offsets[-1] + len(leaf_entries(t)))
    if isinstance(outer, LLeaf):
        return relabel_indices(inners[0], lambda i: i)

    def repl(leaf):
        inner = inners[leaf.index - 1]
        shifted = relabel_indices(inner, lambda i, o=offsets[leaf.index - 1]: o + i)
        if isinstance(shifted, LLeaf):
            return shifted
        return LEdge(edge_length, shifted)

    return transform_leaves(outer, repl)


# ---------------------------------------------------------------------------
# Encoding


def encode(tree: LTree):
    if isinstance(tree, LLeaf):
        return ("l", tree.colour, tree.index)
    return ("n", tree.colour, tree.label,
            tuple(("e", c.length, encode(c.child)) if isinstance(c, LEdge)
                  else ("l", c.colour, c.index)
                  for c in tree.children))


def decode(data) -> LTree:
    if data[0] == "l":
        return LLeaf(data[1], data[2])
    assert data[0] == "n"
    children = []
    for item in data[3]:
        if item[0] == "l":
            children.append(LLeaf(item[1], item[2]))
        else:
            children.append(LEdge(item[1], decode(item[2])))
    return LNode(data[1], data[2], tuple(children))


def name_of(tree: LTree) -> str:
    return repr(encode(tree))


def tree_from_name(name: str) -> LTree:
    return decode(literal_eval(name))


# ---------------------------------------------------------------------------
# Canonical forms


def _colour_stabilizer(colours: tuple[str, ...]) -> list[Permutation]:
    n = len(colours)
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))
            if all(colours[p[i] - 1] == colours[i] for i in range(n))]


def canonicalize(colour_set: ColourSet, act, tree: LTree) -> LTree:
    """The least representative of the isomorphism orbit of ``tree``.

    ``act(sig, label, perm)`` must implement the right action on vertex
    labels at the given ordered signature.  At each vertex the children
    are canonicalised recursively and every colour-preserving slot
    permutation is tried, twisting the label accordingly; the encoding
    with the least value wins.  Leaf indices and edge lengths travel
    with their slots.
    """
    if isinstance(tree, LLeaf):
        return tree

    def walk(node):
        children = tuple(c if isinstance(c, LLeaf) else LEdge(c.length, walk(c.child))
                         for c in node.children)
        colours = tuple(child_colour(c) for c in children)
        sig = Signature(colours, node.colour)
        best = None
        for pi in _colour_stabilizer(colours):
            inv = pi.inverse()
            arranged = inv.permute_tuple(children)
            label = act(sig, node.label, inv)
            cand = LNode(node.colour, label, arranged)
            key = encode(cand)
            if best is None or key < best[0]:
                best = (key, cand)
        return best[1]

    return walk(tree)
