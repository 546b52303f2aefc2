"""Stock coloured operads: monoids, modules, category structures,
diagrams, graded algebras, and the tree operads whose algebras are
operads.

Every constructor returns a truncated operad: composition tables are
complete up to the stated arity bound, and composites that would leave
the bound raise TruncationError through the usual composition entry
points.  Constructors whose content is planar expose the planar operad
alongside the symmetrized one.
"""

from __future__ import annotations

import itertools
from ast import literal_eval
from collections import defaultdict
from dataclasses import dataclass

from .collections import GSet
from .colours import (ColourSet, Signature, sorting_permutation,
                      stabilizer_subgroup)
from .operads import (Element, NSOperad, Operad, OperadError, OperadMap,
                      _Checker, _signature_tuples, compose, pullback_colours,
                      restrict_operad, symmetrize)
from .reporting import Report


# ---------------------------------------------------------------------------
# Planar operads with one operation per allowed signature


def _planar_tuples(by_output, colour_seq, budget):
    """Tuples of allowed signatures matching an output colour sequence,
    with total arity at most ``budget``."""

    def rec(i, remaining):
        if i == len(colour_seq):
            yield ()
            return
        for sig in by_output.get(colour_seq[i], ()):
            if sig.arity <= remaining:
                for tail in rec(i + 1, remaining - sig.arity):
                    yield (sig,) + tail

    yield from rec(0, budget)


def _singleton_ns(cs: ColourSet, named: dict, units: dict, max_arity: int) -> NSOperad:
    """A planar operad with exactly one operation at each allowed
    signature.

    ``named`` maps the allowed signatures to their operation names; the
    composite of allowed operations is the operation at the composite
    signature, which must again be allowed.
    """
    components = {sig: (name,) for sig, name in named.items()}
    by_output = defaultdict(list)
    for sig in named:
        by_output[sig.output].append(sig)
    gamma = {}
    for s in named:
        if s.arity == 0:
            continue
        for us in _planar_tuples(by_output, s.inputs, max_arity):
            flat = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            d = Signature(flat, s.output)
            value = named.get(d)
            if value is None:
                raise OperadError("composition leaves the pattern at %s" % (d,))
            gamma[(s, us)] = {(named[s], tuple(named[u] for u in us)): value}
    return NSOperad(cs, components, units, gamma, max_arity)


def make_ass_planar(max_arity: int) -> NSOperad:
    """The planar operad for monoids: one operation in each arity."""
    cs = ColourSet(("x",))
    named = {Signature(("x",) * n, "x"): "m%d" % n for n in range(max_arity + 1)}
    return _singleton_ns(cs, named, {"x": "m1"}, max_arity)


def make_ass(max_arity: int) -> Operad:
    """The operad for monoids; its arity n component is the regular
    Sigma_n-set."""
    return symmetrize(make_ass_planar(max_arity))


def make_comm(max_arity: int) -> Operad:
    """The operad for commutative monoids: one operation in each arity,
    fixed by every permutation.

    The smallest symmetric operad with operations in all arities; handy
    wherever a test needs an uncoloured operad parameter without the
    bulk of the regular representations."""
    cs = ColourSet(("x",))
    components = {}
    for n in range(max_arity + 1):
        sig = Signature(("x",) * n, "x")
        name = "m%d" % n
        group = stabilizer_subgroup(cs, sig)
        components[sig] = GSet((name,), group, {xi: {name: name} for xi in group})
    units = {"x": "m1"}
    P = Operad(cs, components, units, {}, max_arity)
    for s in components:
        if s.arity == 0:
            continue
        for us in _signature_tuples(P, s.inputs, max_arity):
            total = sum(u.arity for u in us)
            entry = ("m%d" % s.arity, tuple("m%d" % u.arity for u in us))
            P.gamma[(s, us)] = {entry: "m%d" % total}
    return P


def make_lmod_planar(max_arity: int) -> NSOperad:
    """The planar operad for a monoid acting on a left module: colour a
    carries the monoid, colour m the module, and the module input of an
    action operation sits in the last slot."""
    cs = ColourSet(("a", "m"))
    named = {}
    for n in range(max_arity + 1):
        named[Signature(("a",) * n, "a")] = "mul%d" % n
    for n in range(1, max_arity + 1):
        named[Signature(("a",) * (n - 1) + ("m",), "m")] = "act%d" % n
    return _singleton_ns(cs, named, {"a": "mul1", "m": "act1"}, max_arity)


def make_lmod(max_arity: int) -> Operad:
    return symmetrize(make_lmod_planar(max_arity))


def make_rmod_planar(max_arity: int) -> NSOperad:
    """The mirror of the left module operad: the module input of an
    action operation sits in the first slot."""
    cs = ColourSet(("a", "m"))
    named = {}
    for n in range(max_arity + 1):
        named[Signature(("a",) * n, "a")] = "mul%d" % n
    for n in range(1, max_arity + 1):
        named[Signature(("m",) + ("a",) * (n - 1), "m")] = "act%d" % n
    return _singleton_ns(cs, named, {"a": "mul1", "m": "act1"}, max_arity)


def make_rmod(max_arity: int) -> Operad:
    return symmetrize(make_rmod_planar(max_arity))


def make_bimod_planar(max_arity: int) -> NSOperad:
    """The planar operad for a bimodule: two monoid colours a and b and
    a module colour m, with a-inputs before and b-inputs after the
    module input."""
    cs = ColourSet(("a", "b", "m"))
    named = {}
    for n in range(max_arity + 1):
        named[Signature(("a",) * n, "a")] = "mulA%d" % n
        named[Signature(("b",) * n, "b")] = "mulB%d" % n
    for p in range(max_arity):
        for q in range(max_arity - p):
            sig = Signature(("a",) * p + ("m",) + ("b",) * q, "m")
            named[sig] = "act%d_%d" % (p, q)
    return _singleton_ns(cs, named,
                         {"a": "mulA1", "b": "mulB1", "m": "act0_0"}, max_arity)


def make_bimod(max_arity: int) -> Operad:
    return symmetrize(make_bimod_planar(max_arity))


# ---------------------------------------------------------------------------
# Pattern suboperads of a pulled back one-colour operad


def _single_colour(P) -> str:
    assert len(P.colours) == 1, "expected a one-colour operad"
    return P.colours.colours[0]


def make_mod_p(P, max_arity: int) -> Operad:
    """Algebra-module pairs over a one-colour operad: all-a components
    are the components of P, and an output-m component keeps exactly the
    operations with one module input."""
    c = _single_colour(P)
    cs = ColourSet(("a", "m"))

    def keep(sig):
        count = sig.inputs.count("m")
        return count == 0 if sig.output == "a" else count == 1

    return pullback_colours(P, cs, {"a": c, "m": c}, max_arity, keep)


def make_morphism_operad(P, n: int, max_arity: int) -> Operad:
    """Strings of n composable maps between algebras over a one-colour
    operad: colours are the stages 0..n, and P(k) sits at a signature
    exactly when every input stage is at most the output stage."""
    c = _single_colour(P)
    cs = ColourSet(tuple(range(n + 1)))
    return pullback_colours(P, cs, {i: c for i in range(n + 1)}, max_arity,
                            lambda sig: all(i <= sig.output for i in sig.inputs))


def make_gr(P, max_grade: int, max_arity: int) -> Operad:
    """The graded variant of a one-colour operad: colours are grades,
    and P(k) sits at a signature exactly when the input grades sum to
    the output grade."""
    c = _single_colour(P)
    cs = ColourSet(tuple(range(max_grade + 1)))
    return pullback_colours(P, cs, {i: c for i in range(max_grade + 1)}, max_arity,
                            lambda sig: sum(sig.inputs) == sig.output)


def make_gr_inclusion(P, max_grade: int, max_arity: int) -> OperadMap:
    """The inclusion of the graded variant of P into the pullback of P
    along the grade-collapsing colour map."""
    c = _single_colour(P)
    cs = ColourSet(tuple(range(max_grade + 1)))
    full = pullback_colours(P, cs, {i: c for i in range(max_grade + 1)}, max_arity)
    graded = restrict_operad(full, lambda sig: sum(sig.inputs) == sig.output)
    element_maps = {sig: {name: name for name in gset.elements}
                    for sig, gset in graded.components.items()}
    return OperadMap(graded, full, {i: i for i in range(max_grade + 1)},
                     element_maps)


# ---------------------------------------------------------------------------
# Categories with a fixed object set, and diagrams on a fixed category


def make_cat_o_planar(objects, max_arity: int) -> NSOperad:
    """The planar operad whose algebras are categories with the given
    object set: colours are ordered pairs of objects, operations are
    composable chains, and the empty chain at a diagonal colour provides
    the identity arrows."""
    objects = tuple(objects)
    assert len(set(objects)) == len(objects), "duplicate objects"
    cs = ColourSet(tuple(sorted((a, b) for a in objects for b in objects)))
    named = {}
    for a in objects:
        named[Signature((), (a, a))] = "c"
    for n in range(1, max_arity + 1):
        for seq in itertools.product(objects, repeat=n + 1):
            sig = Signature(tuple((seq[i], seq[i + 1]) for i in range(n)),
                            (seq[0], seq[n]))
            named[sig] = "c"
    units = {pair: "c" for pair in cs.colours}
    return _singleton_ns(cs, named, units, max_arity)


def make_cat_o(objects, max_arity: int) -> Operad:
    return symmetrize(make_cat_o_planar(objects, max_arity))


@dataclass(frozen=True)
class FiniteEnrichedCategory:
    """A category with finitely many objects and arrows.

    ``hom`` maps object pairs to tuples of arrow names (missing pairs
    mean no arrows), ``identities`` picks an arrow in each hom(a, a),
    and ``composition[(a, b, c)][(f, g)]`` is the composite of f: a -> b
    followed by g: b -> c.
    """

    objects: tuple
    hom: dict
    identities: dict
    composition: dict

    def arrows(self, a, b) -> tuple:
        return tuple(self.hom.get((a, b), ()))


def check_category(C: FiniteEnrichedCategory) -> Report:
    """Verify the category axioms on the explicit tables."""
    chk = _Checker("category")
    objects = C.objects
    if len(set(objects)) != len(objects):
        chk.flag("duplicate objects")
    for pair in C.hom:
        if not (pair[0] in objects and pair[1] in objects):
            chk.flag("hom key %r outside the object set" % (pair,))
    for a in objects:
        chk.checks += 1
        if C.identities.get(a) not in C.arrows(a, a):
            chk.flag("missing identity at %r" % (a,))

    triples = set(itertools.product(objects, repeat=3))
    for a, b, c in sorted(triples):
        table = C.composition.get((a, b, c), {})
        domain = set(itertools.product(C.arrows(a, b), C.arrows(b, c)))
        found = set(table)
        chk.checks += 1
        for entry in sorted(domain - found):
            chk.flag("missing composite %r at %r" % (entry, (a, b, c)))
        for entry in sorted(found - domain):
            chk.flag("unexpected composite %r at %r" % (entry, (a, b, c)))
        for entry in sorted(domain & found):
            chk.checks += 1
            if table[entry] not in C.arrows(a, c):
                chk.flag("composite %r at %r lands outside hom" % (entry, (a, b, c)))
    for key in C.composition:
        if key not in triples:
            chk.flag("composition key %r outside the object set" % (key,))

    def composite(a, b, c, f, g):
        return C.composition[(a, b, c)][(f, g)]

    for a, b in itertools.product(objects, repeat=2):
        for f in C.arrows(a, b):
            chk.guarded("left identity on %r" % (f,),
                        lambda a=a, b=b, f=f: (composite(a, a, b, C.identities[a], f), f))
            chk.guarded("right identity on %r" % (f,),
                        lambda a=a, b=b, f=f: (composite(a, b, b, f, C.identities[b]), f))
    for a, b, c, d in itertools.product(objects, repeat=4):
        for f in C.arrows(a, b):
            for g in C.arrows(b, c):
                for h in C.arrows(c, d):
                    chk.guarded(
                        "associativity of %r, %r, %r" % (f, g, h),
                        lambda a=a, b=b, c=c, d=d, f=f, g=g, h=h: (
                            composite(a, c, d, composite(a, b, c, f, g), h),
                            composite(a, b, d, f, composite(b, c, d, g, h))))
    return chk.report()


def make_diag(C: FiniteEnrichedCategory) -> Operad:
    """The diagram operad of a finite enriched category: colours are the
    objects, unary operations are the arrows, and composition is the
    category composition.  Algebras are diagrams on C."""
    cs = ColourSet(tuple(sorted(C.objects)))
    components = {}
    for a, b in itertools.product(cs.colours, repeat=2):
        arrows = C.arrows(a, b)
        if not arrows:
            continue
        sig = Signature((a,), b)
        group = stabilizer_subgroup(cs, sig)
        components[sig] = GSet(arrows, group,
                               {group[0]: {f: f for f in arrows}})
    units = {a: C.identities[a] for a in cs.colours}
    gamma = {}
    for a, b, c in itertools.product(cs.colours, repeat=3):
        fs, gs = C.arrows(a, b), C.arrows(b, c)
        if not (fs and gs):
            continue
        s, u = Signature((b,), c), Signature((a,), b)
        gamma[(s, (u,))] = {(g, (f,)): C.composition[(a, b, c)][(f, g)]
                            for g in gs for f in fs}
    return Operad(cs, components, units, gamma, 1)


def category_from_diagram(P) -> FiniteEnrichedCategory:
    """Read a finite enriched category off a unary operad."""
    objects = tuple(P.colours.colours)
    hom = {}
    for a, b in itertools.product(objects, repeat=2):
        gset = P.components.get(Signature((a,), b))
        if gset is not None and gset.elements:
            hom[(a, b)] = tuple(gset.elements)
    composition = {}
    for a, b, c in itertools.product(objects, repeat=3):
        fs, gs = hom.get((a, b), ()), hom.get((b, c), ())
        if not (fs and gs):
            continue
        table = {}
        for f in fs:
            for g in gs:
                res = compose(P, Element(Signature((b,), c), g),
                              [Element(Signature((a,), b), f)])
                table[(f, g)] = res.name
        composition[(a, b, c)] = table
    return FiniteEnrichedCategory(objects, hom, dict(P.units), composition)


# ---------------------------------------------------------------------------
# The tree operads whose algebras are operads
#
# A planar rooted tree is written 'e' for a bare edge, or a tuple of
# child trees for a vertex whose arity is the length of the tuple.
# Vertices are indexed 1..k in preorder and input edges 1..n in planar
# order.  An element of the tree operad is a triple (tree, sigma, tau)
# where sigma lists the planar index of the vertex carrying each number
# and tau lists the planar index of the input edge carrying each number.


def _s_arities(tree) -> list:
    if tree == "e":
        return []
    out = [len(tree)]
    for child in tree:
        out.extend(_s_arities(child))
    return out


def _s_leaf_count(tree) -> int:
    if tree == "e":
        return 1
    return sum(_s_leaf_count(child) for child in tree)


def _planar_trees(max_vertices: int, max_colour: int, min_valence: int) -> list:
    """All planar rooted trees within the bounds: at most ``max_vertices``
    vertices, vertex arities between ``min_valence`` and ``max_colour``,
    and at most ``max_colour`` input edges."""

    def gen(budget):
        out = ["e"]
        if budget == 0:
            return out
        for p in range(min_valence, max_colour + 1):
            for kids in kid_lists(p, budget - 1):
                out.append(tuple(kids))
        return out

    def kid_lists(p, budget):
        if p == 0:
            yield []
            return
        for first in gen(budget):
            used = len(_s_arities(first))
            for rest in kid_lists(p - 1, budget - used):
                yield [first] + rest

    return [t for t in gen(max_vertices) if _s_leaf_count(t) <= max_colour]


def _substitute(outer, inners):
    """Replace each vertex of ``outer`` by a tree, matching the planar
    input slots of the vertex with the numbered input edges of the
    replacement.

    ``inners[v - 1]`` is the pair (tree, tau) for the vertex with planar
    index v.  Returns the new tree together with the origins of its
    input edges (the outer planar leaf index) and of its vertices (the
    pair of outer planar vertex index and inner planar vertex index),
    both in planar order.
    """
    leaf_counter = itertools.count(1)
    vertex_counter = itertools.count(1)

    def build(node):
        if node == "e":
            return ("L", next(leaf_counter))
        v = next(vertex_counter)
        kids = [build(child) for child in node]
        inner_tree, tau = inners[v - 1]
        inv = [0] * len(tau)
        for slot, pos in enumerate(tau, start=1):
            inv[pos - 1] = slot
        wcount = itertools.count(1)
        jcount = itertools.count(1)

        def graft(nd):
            if nd == "e":
                j = next(jcount)
                return kids[inv[j - 1] - 1]
            w = next(wcount)
            return ("V", (v, w), tuple(graft(c) for c in nd))

        return graft(inner_tree)

    tagged = build(outer)
    leaf_origins = []
    vertex_origins = []

    def extract(nd):
        if nd[0] == "L":
            leaf_origins.append(nd[1])
            return "e"
        vertex_origins.append(nd[1])
        return tuple(extract(c) for c in nd[2])

    tree = extract(tagged)
    return tree, leaf_origins, vertex_origins


def _s_graft(x, ys):
    """Compose tree operad elements in slot order: the vertex numbered i
    of the outer triple is replaced by the i-th inner triple."""
    tree, sigma, tau = x
    assign = [None] * len(sigma)
    for i, v in enumerate(sigma, start=1):
        inner_tree, _, inner_tau = ys[i - 1]
        assign[v - 1] = (inner_tree, inner_tau)
    new_tree, leaf_origins, vertex_origins = _substitute(tree, assign)

    vertex_pos = {vo: p for p, vo in enumerate(vertex_origins, start=1)}
    new_sigma = []
    for i, v in enumerate(sigma, start=1):
        inner_sigma = ys[i - 1][1]
        new_sigma.extend(vertex_pos[(v, w)] for w in inner_sigma)

    leaf_pos = {lo: p for p, lo in enumerate(leaf_origins, start=1)}
    new_tau = tuple(leaf_pos[v] for v in tau)
    return new_tree, tuple(new_sigma), new_tau


def _corolla(n: int):
    return ("e",) * n


def _make_s(max_colour: int, max_vertices: int, min_valence: int) -> Operad:
    low = 1 if min_valence >= 1 else 0
    cs = ColourSet(tuple(range(low, max_colour + 1)))
    trees = _planar_trees(max_vertices, max_colour, min_valence)

    components = {}
    buckets = defaultdict(list)
    for tree in trees:
        arities = _s_arities(tree)
        n = _s_leaf_count(tree)
        if not (low <= n <= max_colour):
            continue
        k = len(arities)
        sig = Signature(tuple(sorted(arities)), n)
        taus = list(itertools.permutations(range(1, n + 1)))
        for sigma in itertools.permutations(range(1, k + 1)):
            if any(arities[sigma[i] - 1] != sig.inputs[i] for i in range(k)):
                continue
            for tau in taus:
                buckets[sig].append((tree, sigma, tau))
    for sig in sorted(buckets, key=lambda s: (s.arity, s.inputs, s.output)):
        group = stabilizer_subgroup(cs, sig)
        elements = tuple(repr(t) for t in buckets[sig])
        action = {}
        for xi in group:
            moved = {}
            for tree, sigma, tau in buckets[sig]:
                shuffled = tuple(sigma[xi(i) - 1] for i in range(1, len(sigma) + 1))
                moved[repr((tree, sigma, tau))] = repr((tree, shuffled, tau))
            action[xi] = moved
        components[sig] = GSet(elements, group, action)

    units = {n: repr((_corolla(n), (1,), tuple(range(1, n + 1))))
             for n in cs.colours}
    P = Operad(cs, components, units, {}, max_vertices)

    decoded = {}
    for gset in components.values():
        for name in gset.elements:
            decoded[name] = literal_eval(name)

    for s in sorted(components, key=lambda t: (t.arity, t.inputs, t.output)):
        if s.arity == 0:
            continue
        for us in _signature_tuples(P, s.inputs, max_vertices):
            flat = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            rho = sorting_permutation(cs, flat)
            table = {}
            for x in components[s].elements:
                triple = decoded[x]
                for ys in itertools.product(*(components[u].elements for u in us)):
                    tree, sigma, tau = _s_graft(triple, [decoded[y] for y in ys])
                    stored = tuple(sigma[rho(i) - 1] for i in range(1, len(sigma) + 1))
                    table[(x, ys)] = repr((tree, stored, tau))
            P.gamma[(s, us)] = table
    return P


def make_s(max_colour: int, max_vertices: int) -> Operad:
    """The coloured operad whose algebras are operads: colours are
    arities, elements are planar trees with numbered vertices and
    numbered input edges, and composition substitutes trees into
    vertices."""
    return _make_s(max_colour, max_vertices, 0)


def make_s_plus(max_colour: int, max_vertices: int) -> Operad:
    """The suboperad of the tree operad on vertices of valence at least
    one; its algebras are operads without nullary part."""
    return _make_s(max_colour, max_vertices, 1)


def make_s0(max_colour: int, max_vertices: int) -> NSOperad:
    """The planar operad of vertex-numbered planar trees, composing by
    substitution with planar matching; its algebras are planar
    operads."""
    cs = ColourSet(tuple(range(max_colour + 1)))
    trees = _planar_trees(max_vertices, max_colour, 0)

    components = defaultdict(list)
    for tree in trees:
        arities = _s_arities(tree)
        n = _s_leaf_count(tree)
        if n > max_colour:
            continue
        k = len(arities)
        for sigma in itertools.permutations(range(1, k + 1)):
            sig = Signature(tuple(arities[sigma[i - 1] - 1] for i in range(1, k + 1)), n)
            components[sig].append((tree, sigma))

    by_output = defaultdict(list)
    for sig in components:
        by_output[sig.output].append(sig)

    gamma = {}
    for s, bucket in components.items():
        if s.arity == 0:
            continue
        for us in _planar_tuples(by_output, s.inputs, max_vertices):
            table = {}
            for tree, sigma in bucket:
                x = (tree, sigma, tuple(range(1, _s_leaf_count(tree) + 1)))
                for ys in itertools.product(*(components[u] for u in us)):
                    inner = [(t, sg, tuple(range(1, _s_leaf_count(t) + 1)))
                             for t, sg in ys]
                    new_tree, new_sigma, _ = _s_graft(x, inner)
                    table[(repr((tree, sigma)),
                           tuple(repr(y) for y in ys))] = repr((new_tree, new_sigma))
            gamma[(s, us)] = table

    named = {sig: tuple(repr(t) for t in pairs) for sig, pairs in components.items()}
    units = {n: repr((_corolla(n), (1,))) for n in cs.colours}
    return NSOperad(cs, named, units, gamma, max_vertices)
