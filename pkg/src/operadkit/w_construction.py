"""Resolutions by trees with lengths: the W-construction in finite sets.

A segment is a finite carrier with endpoints zero and one and an
associative join for which zero is neutral and one absorbing.  The
W-construction of Boardman and Vogt decorates free-operad trees over an
operad with lengths: vertices carry operad elements and every internal
edge carries a segment element.  Composition grafts trees and assigns
length one to each new internal edge.  Two rewrite rules identify
presentations of the same element: an internal edge of length zero is
contracted by composing the vertex labels it connects, and a unary
vertex labelled by a unit is deleted, joining the lengths of its two
edges when both are internal and dropping the remaining length when one
of them is external.  Normal forms contain neither kind of site, and
`w_operad` enumerates them directly.

Unary operads specialise to a calculus of strings: chains of composable
arrows in a finite category with waiting times between consecutive
arrows.  A zero waiting time composes the arrows around it; an identity
arrow merges the waiting times around it.  `CoherentString` implements
the string form directly, and the test suite plays it back against the
tree form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .collections import GSet
from .colours import (Permutation, Signature, sort_signature,
                      sorting_permutation, stabilizer_subgroup)
from .labelled import (LEdge, LLeaf, LNode, LTree, act_indices, canonicalize,
                       child_colour, encode, graft_numbered, leaf_entries,
                       name_of, node_signature, numbered_colours,
                       tree_from_name, vertex_count)
from .operads import (TRUNCATED, Element, Operad, act, compose,
                      partial_compose, unit_element, _Checker,
                      _signature_tuples)
from .reporting import Report
from .trees import (enumerate_trees, is_leaf, leaf_paths, numberings,
                    signature_of, subtree_at, vertex_paths)
from .zoo import FiniteEnrichedCategory


# ---------------------------------------------------------------------------
# Segments


@dataclass(frozen=True)
class Segment:
    """A finite segment: a carrier with endpoints and a join.

    ``join[(x, y)]`` is the join of x and y.  The laws asked of a
    segment are associativity of the join, neutrality of ``zero`` and
    absorption by ``one``; commutativity or an underlying order are not
    assumed, so the argument order of the join matters.
    """

    carrier: tuple
    zero: str
    one: str
    join: dict

    def __post_init__(self):
        assert len(set(self.carrier)) == len(self.carrier), "duplicate lengths"
        assert self.zero in self.carrier and self.one in self.carrier
        assert self.zero != self.one, "the endpoints must differ"


def chain_segment(names) -> Segment:
    """The segment on a chain of names: the first is zero, the last is
    one, and the join of two names is whichever comes later."""
    names = tuple(names)
    assert len(names) >= 2
    position = {x: i for i, x in enumerate(names)}
    join = {(x, y): (y if position[y] >= position[x] else x)
            for x in names for y in names}
    return Segment(names, names[0], names[-1], join)


def check_segment(H: Segment) -> Report:
    """Exhaustively verify the segment laws.

    Checks that the join is a total operation on the carrier, that it
    is associative, and that zero is neutral and one absorbing on both
    sides.
    """
    chk = _Checker("segment")
    xs = H.carrier
    for x, y in itertools.product(xs, repeat=2):
        chk.checks += 1
        value = H.join.get((x, y))
        if value is None:
            chk.flag("missing join entry (%r, %r)" % (x, y))
        elif value not in xs:
            chk.flag("join value %r at (%r, %r) outside the carrier"
                     % (value, x, y))

    def join(x, y):
        return H.join[(x, y)]

    for x, y, z in itertools.product(xs, repeat=3):
        chk.guarded("join associativity at (%r, %r, %r)" % (x, y, z),
                    lambda x=x, y=y, z=z: (join(join(x, y), z),
                                           join(x, join(y, z))))
    for x in xs:
        chk.guarded("zero left neutral at %r" % (x,),
                    lambda x=x: (join(H.zero, x), x))
        chk.guarded("zero right neutral at %r" % (x,),
                    lambda x=x: (join(x, H.zero), x))
        chk.guarded("one left absorbing at %r" % (x,),
                    lambda x=x: (join(H.one, x), H.one))
        chk.guarded("one right absorbing at %r" % (x,),
                    lambda x=x: (join(x, H.one), H.one))
    return chk.report()


# ---------------------------------------------------------------------------
# Elements


@dataclass(frozen=True)
class WElement:
    """A resolution element: a labelled numbered tree with edge lengths.

    The underlying labelled tree has its children in colour order at
    every vertex, so each vertex label is a stored component name of
    the base operad at the vertex's ordered signature.  Every internal
    edge carries a segment element as its length; external edges carry
    none.  A bare edge is the unit.  Equality is structural, so equal
    canonical forms mean equal elements.
    """

    tree: LTree

    def __post_init__(self):
        numbered_colours(self.tree)

        def walk(node):
            for child in node.children:
                if isinstance(child, LEdge):
                    assert child.length is not None, \
                        "internal edge without a length"
                    walk(child.child)

        if isinstance(self.tree, LNode):
            walk(self.tree)

    @property
    def colour(self) -> str:
        return self.tree.colour

    @property
    def arity(self) -> int:
        return len(leaf_entries(self.tree))

    @property
    def signature(self) -> Signature:
        """Inputs listed by input number, then the output colour."""
        return Signature(numbered_colours(self.tree), self.tree.colour)

    @property
    def name(self) -> str:
        return name_of(self.tree)


def make_w_element(tree, labels, lengths, numbering) -> WElement:
    """Assemble an element from path-keyed data on a coloured tree.

    ``labels`` maps vertex paths to element names at the vertex's
    ordered signature, ``lengths`` maps every internal edge to a
    segment element, each edge addressed by the path of its lower
    vertex (the endpoint away from the root), and ``numbering`` lists
    the leaf paths by input number.
    """
    index_of = {path: j + 1 for j, path in enumerate(numbering)}

    def walk(node, path):
        children = []
        for i, child in enumerate(node.children):
            child_path = path + (i,)
            if is_leaf(child):
                children.append(LLeaf(child.colour, index_of[child_path]))
            else:
                children.append(LEdge(lengths[child_path],
                                      walk(child, child_path)))
        return LNode(node.colour, labels[path], tuple(children))

    if is_leaf(tree):
        return WElement(LLeaf(tree.colour, index_of[()]))
    return WElement(walk(tree, ()))


def w_corolla(P, elem: Element) -> WElement:
    """The one-vertex element presenting an operad element."""
    sorted_sig, rho = sort_signature(P.colours, elem.signature)
    gset = P.components.get(sorted_sig)
    assert gset is not None and elem.name in gset.elements, \
        "element %r not stored at %s" % (elem.name, sorted_sig)
    children = tuple(LLeaf(c, rho(i))
                     for i, c in enumerate(sorted_sig.inputs, start=1))
    tree = LNode(sorted_sig.output, elem.name, children)
    return WElement(canonicalize(P.colours, _label_action(P), tree))


def _label_action(P):
    """The right action on vertex labels, in the form `canonicalize`
    expects."""

    def act_label(sig, label, perm):
        return P.components[sig].act(label, perm)

    return act_label


def _check_element(w: WElement, P, H: Segment) -> None:
    """Assert that labels come from ``P`` and lengths from ``H``."""

    def walk(node):
        sig = node_signature(node)
        gset = P.components.get(sig)
        assert gset is not None and node.label in gset.elements, \
            "label %r not in the component at %s" % (node.label, sig)
        for child in node.children:
            if isinstance(child, LEdge):
                assert child.length in H.carrier, \
                    "length %r outside the segment" % (child.length,)
                walk(child.child)

    if isinstance(w.tree, LNode):
        walk(w.tree)


# ---------------------------------------------------------------------------
# Rewriting


def _is_unit_vertex(node: LNode, P) -> bool:
    return (len(node.children) == 1
            and child_colour(node.children[0]) == node.colour
            and node.label == P.units.get(node.colour))


def w_redexes(w: WElement, P, H: Segment) -> tuple:
    """All rewrite sites of ``w``, children before parents, left to
    right.

    A site is ``("contract", path)`` for an internal edge of length
    zero, addressed by the path of its lower vertex, or
    ``("delete", path)`` for a unary vertex labelled by a unit.
    `w_normalize` always applies the first site; the normal form does
    not depend on that choice, which the test suite exercises with
    random orders.
    """
    sites = []

    def walk(node, path):
        for i, child in enumerate(node.children):
            if isinstance(child, LEdge):
                walk(child.child, path + (i,))
                if child.length == H.zero:
                    sites.append(("contract", path + (i,)))
        if _is_unit_vertex(node, P):
            sites.append(("delete", path))

    if isinstance(w.tree, LNode):
        walk(w.tree, ())
    return tuple(sites)


def _contract(P, node: LNode, slot: int) -> LNode:
    """Compose the vertex below child ``slot`` into ``node``, splicing
    the grandchildren into the freed position and restoring colour
    order; the composite label is again a stored name."""
    inner = node.children[slot].child
    composite = partial_compose(P, Element(node_signature(node), node.label),
                                slot + 1,
                                Element(node_signature(inner), inner.label))
    spliced = node.children[:slot] + inner.children + node.children[slot + 1:]
    rho = sorting_permutation(P.colours, composite.signature.inputs)
    return LNode(node.colour, composite.name, rho.permute_tuple(spliced))


def w_apply(w: WElement, site, P, H: Segment) -> WElement:
    """Apply one rewrite site and return the rewritten element.

    Contraction composes the two vertex labels around a zero-length
    edge.  Deletion removes a unit-labelled unary vertex: between two
    internal edges the lengths merge under the join, the length nearer
    the leaves first; next to an external edge the internal length is
    dropped.  Contraction can leave the truncated range of ``P``, in
    which case TruncationError propagates.
    """
    kind, path = site
    tree = w.tree
    assert isinstance(tree, LNode), "a bare edge has no rewrite sites"
    if kind == "delete" and path == ():
        assert _is_unit_vertex(tree, P)
        child = tree.children[0]
        if isinstance(child, LLeaf):
            return WElement(child)
        return WElement(child.child)

    def edit(node, rest):
        i = rest[0]
        edge = node.children[i]
        if len(rest) > 1:
            replaced = LEdge(edge.length, edit(edge.child, rest[1:]))
        elif kind == "contract":
            assert edge.length == H.zero
            return _contract(P, node, i)
        else:
            below = edge.child
            assert _is_unit_vertex(below, P)
            grand = below.children[0]
            if isinstance(grand, LLeaf):
                replaced = grand
            else:
                replaced = LEdge(H.join[(grand.length, edge.length)],
                                 grand.child)
        children = node.children[:i] + (replaced,) + node.children[i + 1:]
        return LNode(node.colour, node.label, children)

    assert path, "the root edge cannot be contracted"
    return WElement(edit(tree, path))


def w_normalize(w: WElement, P, H: Segment) -> WElement:
    """The canonical normal form of ``w``.

    Applies the first rewrite site until none remain; every application
    removes one vertex, so the loop ends within vertices plus internal
    edges many steps.  The result is the least representative of the
    isomorphism class of the rewritten tree, so equal return values
    mean equal resolution elements.  Contractions compose in ``P`` and
    can leave its truncated range; TruncationError then propagates.
    """
    _check_element(w, P, H)
    while True:
        sites = w_redexes(w, P, H)
        if not sites:
            break
        w = w_apply(w, sites[0], P, H)
    return WElement(canonicalize(P.colours, _label_action(P), w.tree))


# ---------------------------------------------------------------------------
# Composition and the counit


def w_compose(w1: WElement, slot: int, w2: WElement, P, H: Segment) -> WElement:
    """Graft ``w2`` into input ``slot`` of ``w1`` and normalize.

    The new internal edge carries length one and the inputs renumber as
    in partial composition: the grafted inputs take over the numbers
    ``slot`` onward and the later inputs of ``w1`` shift up.
    """
    colours = numbered_colours(w1.tree)
    assert 1 <= slot <= len(colours)
    assert w2.colour == colours[slot - 1], \
        "inner output must match the slot colour"
    inners = [LLeaf(c, 1) for c in colours]
    inners[slot - 1] = w2.tree
    grafted = graft_numbered(w1.tree, inners, H.one)
    return w_normalize(WElement(grafted), P, H)


def epsilon(w: WElement, P) -> Element:
    """Forget the lengths and compose the whole tree in ``P``.

    The result is the element whose input j is the leaf numbered j.
    Rewrite steps do not change the result, so epsilon is constant on
    the fibres of `w_normalize`.
    """
    tree = w.tree
    if isinstance(tree, LLeaf):
        return unit_element(P, tree.colour)

    def evaluate(node):
        inner = []
        for child in node.children:
            if isinstance(child, LLeaf):
                inner.append(unit_element(P, child.colour))
            else:
                inner.append(evaluate(child.child))
        return compose(P, Element(node_signature(node), node.label), inner)

    planar = evaluate(tree)
    pi = Permutation(tuple(e.index for e in leaf_entries(tree)))
    return act(P, planar, pi.inverse())


# ---------------------------------------------------------------------------
# The resolution as a truncated operad


def w_operad(P, H: Segment, max_arity: int, max_vertices: int) -> Operad:
    """The truncated resolution of ``P`` weighted by ``H``.

    Elements are isomorphism classes of normal forms: labelled numbered
    trees as in the free operad, with a length on every internal edge.
    Normal forms carry no zero lengths and no unit labels on unary
    vertices, so the classes are enumerated by excluding both; the bare
    edge is the unit.  Composition grafts with length one on the new
    edges, which creates no rewrite sites, and composites needing more
    than ``max_vertices`` vertices are marked truncated.
    """
    assert max_arity >= 1 and max_vertices >= 1
    cs = P.colours
    act_label = _label_action(P)
    lengths = tuple(t for t in H.carrier if t != H.zero)

    element_sets = {}

    def add(sig, name):
        element_sets.setdefault(sig, set()).add(name)

    for c in cs.colours:
        add(Signature((c,), c), repr(encode(LLeaf(c, 1))))

    for n in range(0, max_arity + 1):
        for c in cs.colours:
            for tree in enumerate_trees(cs, n, c, max_vertices):
                if is_leaf(tree):
                    continue
                paths = vertex_paths(tree)
                pools = []
                usable = True
                for path in paths:
                    vertex_sig = signature_of(subtree_at(tree, path))
                    gset = P.components.get(vertex_sig)
                    if gset is None or not gset.elements:
                        usable = False
                        break
                    names = list(gset.elements)
                    if (vertex_sig.arity == 1
                            and vertex_sig.inputs[0] == vertex_sig.output):
                        unit = P.units.get(vertex_sig.output)
                        names = [x for x in names if x != unit]
                    if not names:
                        usable = False
                        break
                    pools.append(names)
                if not usable:
                    continue
                edges = [p for p in paths if p]
                leafs = leaf_paths(tree)
                d = Signature(tuple(sorted((subtree_at(tree, p).colour
                                            for p in leafs), key=cs.index)), c)
                taus = [tau for tau in numberings(tree)
                        if all(subtree_at(tree, tau[j]).colour == d.inputs[j]
                               for j in range(n))]
                for labels in itertools.product(*pools):
                    label_map = dict(zip(paths, labels))
                    for ts in itertools.product(lengths, repeat=len(edges)):
                        length_map = dict(zip(edges, ts))
                        for tau in taus:
                            we = make_w_element(tree, label_map,
                                                length_map, tau)
                            canon = canonicalize(cs, act_label, we.tree)
                            add(d, repr(encode(canon)))

    components = {}
    for sig in sorted(element_sets, key=lambda s: (s.arity,
                                                   tuple(cs.index(c) for c in s.inputs),
                                                   cs.index(s.output))):
        names = tuple(sorted(element_sets[sig]))
        group = stabilizer_subgroup(cs, sig)
        action = {}
        for xi in group:
            table = {}
            for name in names:
                moved = canonicalize(cs, act_label,
                                     act_indices(tree_from_name(name), xi))
                table[name] = repr(encode(moved))
            action[xi] = table
        components[sig] = GSet(names, group, action)

    units = {c: repr(encode(LLeaf(c, 1))) for c in cs.colours}
    W = Operad(cs, components, units, {}, max(s.arity for s in components))

    for s in components:
        if s.arity == 0:
            continue
        for us in _signature_tuples(W, s.inputs, W.max_arity):
            e = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            rho_e = sorting_permutation(cs, e)
            table = {}
            for x in components[s].elements:
                outer = tree_from_name(x)
                for ys in itertools.product(*(components[u].elements for u in us)):
                    grafted = graft_numbered(outer,
                                             [tree_from_name(y) for y in ys],
                                             H.one)
                    if vertex_count(grafted) > max_vertices:
                        table[(x, ys)] = TRUNCATED
                        continue
                    stored = canonicalize(cs, act_label,
                                          act_indices(grafted, rho_e))
                    table[(x, ys)] = repr(encode(stored))
            W.gamma[(s, us)] = table
    return W


# ---------------------------------------------------------------------------
# Strings: the unary calculus


@dataclass(frozen=True)
class CoherentString:
    """A chain of composable arrows with waiting times between them.

    ``objects`` lists the objects visited from source to target.
    ``arrows[i]`` runs from ``objects[i]`` to ``objects[i + 1]``, and
    ``waiting_times[i]`` sits between ``arrows[i]`` and
    ``arrows[i + 1]``, so a string with n + 1 arrows has n waiting
    times.  The string with a single identity arrow and no waiting
    times is the unit.
    """

    objects: tuple
    arrows: tuple
    waiting_times: tuple

    def __post_init__(self):
        assert self.arrows, "a string has at least one arrow"
        assert len(self.objects) == len(self.arrows) + 1
        assert len(self.waiting_times) == len(self.arrows) - 1

    @property
    def source(self):
        return self.objects[0]

    @property
    def target(self):
        return self.objects[-1]


def _check_string(s: CoherentString, C: FiniteEnrichedCategory,
                  H: Segment) -> None:
    for i, f in enumerate(s.arrows):
        pair = (s.objects[i], s.objects[i + 1])
        assert f in C.arrows(*pair), "arrow %r not in hom%r" % (f, pair)
    for t in s.waiting_times:
        assert t in H.carrier, "waiting time %r outside the segment" % (t,)


def coherent_normalize(s: CoherentString, C: FiniteEnrichedCategory,
                       H: Segment) -> CoherentString:
    """The normal form of a string under the two string rules.

    A zero waiting time composes the two arrows around it.  An identity
    arrow between two waiting times merges them under the join, the
    earlier time first; an identity arrow at either end is dropped
    together with the adjacent waiting time.  The single identity arrow
    presents the unit and stays as it is.  The leftmost zero is always
    rewritten first, then the leftmost removable identity; the result
    does not depend on that order.
    """
    _check_string(s, C, H)
    objects = list(s.objects)
    arrows = list(s.arrows)
    times = list(s.waiting_times)
    changed = True
    while changed:
        changed = False
        for i, t in enumerate(times):
            if t == H.zero:
                triple = (objects[i], objects[i + 1], objects[i + 2])
                arrows[i:i + 2] = [C.composition[triple][(arrows[i],
                                                          arrows[i + 1])]]
                del times[i]
                del objects[i + 1]
                changed = True
                break
        if changed:
            continue
        for i in range(len(arrows)):
            if (len(arrows) > 1 and objects[i] == objects[i + 1]
                    and arrows[i] == C.identities[objects[i]]):
                if i == 0:
                    del times[0]
                elif i == len(arrows) - 1:
                    del times[-1]
                else:
                    times[i - 1] = H.join[(times[i - 1], times[i])]
                    del times[i]
                del arrows[i]
                del objects[i]
                changed = True
                break
    return CoherentString(tuple(objects), tuple(arrows), tuple(times))


def coherent_compose(s1: CoherentString, s2: CoherentString,
                     C: FiniteEnrichedCategory, H: Segment) -> CoherentString:
    """Concatenate two strings with waiting time one at the junction,
    then normalize; ``s1`` runs first, so its target must be the source
    of ``s2``."""
    assert s1.target == s2.source, "strings do not meet at the junction"
    joined = CoherentString(s1.objects + s2.objects[1:],
                            s1.arrows + s2.arrows,
                            s1.waiting_times + (H.one,) + s2.waiting_times)
    return coherent_normalize(joined, C, H)
