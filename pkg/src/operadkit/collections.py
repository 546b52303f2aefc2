"""Symmetric collections in finite sets and the box tensor product.

A collection stores one finite right G-set per ordered signature, where
G is the stabilizer of the input colour tuple.  The component at an
arbitrary signature is the stored one, transported along the stable
sorting permutation; `transport_permutation` supplies the cocycle
xi(sig, sigma) used for that transport, so the full symmetric-sequence
structure is recovered without storing redundant components.

The box product is computed in the same smaller representation: the
component at an ordered signature (d; c) is the quotient of the set of
tuples (outer signature, ordered position partition, outer element,
inner elements) by the stabilizer of the outer signature.  Ranging over
ordered partitions rather than over all permutations picks one
representative per inner-stabilizer coset; ranging over all permutations
would overcount each class by the order of the inner stabilizers and
break the unit law, which the unit and cross-representation tests pin
down.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from operadkit.colours import (ColourSet, Permutation, Signature, block_sum,
                               sort_signature, sorting_permutation,
                               stabilizer_subgroup)


class CollectionError(ValueError):
    """Raised for malformed collections or incompatible components."""


@dataclass
class GSet:
    """A finite set with a right action of a fixed list of permutations."""

    elements: tuple[str, ...]
    group: tuple[Permutation, ...]
    action: dict  # Permutation -> {element -> element}

    def act(self, x: str, g: Permutation) -> str:
        return self.action[g][x]

    def violations(self) -> list[str]:
        out = []
        if len(set(self.elements)) != len(self.elements):
            out.append("duplicate element names")
        for g in self.group:
            table = self.action.get(g)
            if table is None:
                out.append("missing action table for %r" % (g.images,))
                continue
            if sorted(table) != sorted(self.elements) or sorted(table.values()) != sorted(self.elements):
                out.append("action by %r is not a bijection of the carrier" % (g.images,))
        identity = Permutation.identity(self.group[0].degree) if self.group else None
        if identity is not None:
            for x in self.elements:
                if self.act(x, identity) != x:
                    out.append("identity moves %r" % (x,))
        for g in self.group:
            for h in self.group:
                gh = g * h
                for x in self.elements:
                    if self.act(self.act(x, g), h) != self.act(x, gh):
                        out.append("action not compatible with composition at (%r, %r)"
                                   % (g.images, h.images))
                        break
        return out

    def orbit(self, x: str) -> frozenset:
        return frozenset(self.act(x, g) for g in self.group)


def orbit_representatives(gset: GSet) -> tuple:
    """One element from each orbit, in carrier order."""
    reps = []
    seen = set()
    for x in gset.elements:
        if x in seen:
            continue
        reps.append(x)
        seen.update(gset.orbit(x))
    return tuple(reps)


def trivial_gset(elements, group) -> GSet:
    """A G-set with the identity action; valid for one-element carriers
    or genuinely fixed points."""
    elements = tuple(elements)
    return GSet(elements, tuple(group), {g: {x: x for x in elements} for g in group})


@dataclass
class Collection:
    """Ordered-signature indexed components; absent keys mean empty."""

    colours: ColourSet
    components: dict  # Signature -> GSet

    def component(self, sig: Signature) -> GSet | None:
        return self.components.get(sig)

    def signatures(self) -> list[Signature]:
        return sorted(self.components, key=_sig_key(self.colours))

    def violations(self) -> list[str]:
        out = []
        for sig, gset in self.components.items():
            if not sig.is_ordered(self.colours):
                out.append("component signature %s is not ordered" % sig)
                continue
            expected = stabilizer_subgroup(self.colours, sig)
            if tuple(gset.group) != expected:
                out.append("component %s does not carry the stabilizer action" % sig)
            out.extend("%s: %s" % (sig, v) for v in gset.violations())
        return out


@dataclass
class PointedCollection(Collection):
    units: dict = field(default_factory=dict)  # colour -> element name

    def violations(self) -> list[str]:
        out = Collection.violations(self)
        for c in self.colours.colours:
            sig = Signature((c,), c)
            name = self.units.get(c)
            if name is None:
                out.append("missing unit at colour %r" % (c,))
            else:
                gset = self.component(sig)
                if gset is None or name not in gset.elements:
                    out.append("unit %r at colour %r is not a component element" % (name, c))
        return out


def _sig_key(colour_set: ColourSet):
    def key(sig: Signature):
        return (sig.arity, tuple(colour_set.index(c) for c in sig.inputs),
                colour_set.index(sig.output))
    return key


@lru_cache(maxsize=None)
def transport_permutation(colour_set: ColourSet, sig: Signature,
                          sigma: Permutation) -> Permutation:
    """The stabilizer element moving the stored value at sort(sig) to the
    stored value at sort(sig . sigma).

    With rho_s the stable sorting permutation of s, this is
    rho_s^{-1} * sigma * rho_{s.sigma}; the assignment is a cocycle, so
    transporting by sigma then tau equals transporting by sigma * tau.
    """
    rho = sorting_permutation(colour_set, sig.inputs)
    rho2 = sorting_permutation(colour_set, sigma.permute_tuple(sig.inputs))
    return rho.inverse() * sigma * rho2


def unit_collection(colour_set: ColourSet, unit_name: str = "1") -> PointedCollection:
    """The unit for the box product: a point at (c; c) for each colour."""
    components = {}
    units = {}
    for c in colour_set.colours:
        sig = Signature((c,), c)
        components[sig] = trivial_gset((unit_name,), stabilizer_subgroup(colour_set, sig))
        units[c] = unit_name
    return PointedCollection(colour_set, components, units)


def pointwise_tensor(x: Collection, y: Collection) -> Collection:
    """Componentwise cartesian product with the diagonal action."""
    assert x.colours == y.colours
    components = {}
    for sig, gx in x.components.items():
        gy = y.component(sig)
        if gy is None:
            continue
        elements = tuple(repr((a, b)) for a in gx.elements for b in gy.elements)
        action = {g: {repr((a, b)): repr((gx.act(a, g), gy.act(b, g)))
                      for a in gx.elements for b in gy.elements}
                  for g in gx.group}
        components[sig] = GSet(elements, gx.group, action)
    return Collection(x.colours, components)


# ---------------------------------------------------------------------------
# Box product


def _partitions_with_contents(positions_by_colour, wanted):
    """Ordered partitions of positions into blocks with given colour counts.

    ``wanted[i]`` maps colour -> how many positions block i needs; yields
    tuples of blocks, each a sorted tuple of positions.
    """
    n = len(wanted)
    blocks = [[] for _ in range(n)]

    colours = sorted(positions_by_colour)

    def distribute(ci):
        if ci == len(colours):
            yield tuple(tuple(sorted(b)) for b in blocks)
            return
        colour = colours[ci]
        positions = positions_by_colour[colour]
        counts = [wanted[i].get(colour, 0) for i in range(n)]
        for split in _splits(positions, counts):
            for i in range(n):
                blocks[i].extend(split[i])
            yield from distribute(ci + 1)
            for i in range(n):
                if split[i]:
                    del blocks[i][-len(split[i]):]
        return

    yield from distribute(0)


def _splits(positions, counts):
    """All ways to split ``positions`` into disjoint subsets of given sizes."""
    if sum(counts) != len(positions):
        return
    if not counts:
        yield ()
        return
    first, rest = counts[0], counts[1:]
    for chosen in itertools.combinations(positions, first):
        remaining = [p for p in positions if p not in chosen]
        for tail in _splits(remaining, rest):
            yield (chosen,) + tail


@dataclass(frozen=True)
class _Raw:
    outer: Signature
    blocks: tuple            # tuple of sorted position tuples (1-based)
    x: str
    ys: tuple


def _raw_key(colour_set, raw):
    return (tuple(colour_set.index(c) for c in raw.outer.inputs),
            colour_set.index(raw.outer.output), raw.blocks, raw.x, raw.ys)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        parent = self.parent
        parent.setdefault(a, a)
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self):
        groups = {}
        for a in self.parent:
            groups.setdefault(self.find(a), []).append(a)
        return list(groups.values())


def _shift(raw: _Raw, sigma: Permutation, x_gset: GSet) -> _Raw:
    """The generating relation of the quotient: permuting the inner
    factors by sigma while acting on the outer element by sigma keeps
    the represented element fixed, because the block permutation of
    sigma converts one position partition into the other."""
    blocks = tuple(raw.blocks[sigma(i) - 1] for i in range(1, len(raw.blocks) + 1))
    ys = tuple(raw.ys[sigma(i) - 1] for i in range(1, len(raw.ys) + 1))
    return _Raw(raw.outer, blocks, x_gset.act(raw.x, sigma), ys)


def _block_twist(block: tuple, xi_inv) -> tuple[tuple, Permutation]:
    """Image block under xi^{-1} with the induced within-block permutation."""
    moved = [xi_inv[b] for b in block]
    new_block = tuple(sorted(moved))
    index = {p: j + 1 for j, p in enumerate(new_block)}
    pi = Permutation(tuple(index[p] for p in moved))
    return new_block, pi


def _act_raw(raw: _Raw, xi: Permutation, y_gsets) -> _Raw:
    xi_inv = {xi(i): i for i in range(1, xi.degree + 1)}
    blocks = []
    ys = []
    for block, y, gset in zip(raw.blocks, raw.ys, y_gsets):
        new_block, pi = _block_twist(block, xi_inv)
        blocks.append(new_block)
        ys.append(gset.act(y, pi.inverse()))
    return _Raw(raw.outer, tuple(blocks), raw.x, tuple(ys))


def box_product(x: Collection, y: Collection,
                max_arity: int | None = None) -> Collection:
    """The box tensor of two collections in the smaller representation.

    With ``max_arity`` set, components of larger arity are left out.
    """
    assert x.colours == y.colours
    colour_set = x.colours

    # Group raws by output ordered signature.
    raw_data = {}  # Signature -> (list of _Raw, {raw: inner gsets})
    for outer_sig, outer_gset in x.components.items():
        c = outer_sig.output
        inner_choices = []
        for ci in outer_sig.inputs:
            choices = [sig for sig in y.components if sig.output == ci]
            inner_choices.append(choices)
        for inner_sigs in itertools.product(*inner_choices):
            flat = tuple(itertools.chain.from_iterable(s.inputs for s in inner_sigs))
            if max_arity is not None and len(flat) > max_arity:
                continue
            d_sig = Signature(tuple(sorted(flat, key=colour_set.index)), c)
            k = len(flat)
            positions_by_colour = {}
            for p in range(1, k + 1):
                positions_by_colour.setdefault(d_sig.inputs[p - 1], []).append(p)
            wanted = []
            for s in inner_sigs:
                counts = {}
                for colour in s.inputs:
                    counts[colour] = counts.get(colour, 0) + 1
                wanted.append(counts)
            inner_gsets = tuple(y.components[s] for s in inner_sigs)
            bucket = raw_data.setdefault(d_sig, [])
            for blocks in _partitions_with_contents(positions_by_colour, wanted):
                for xe in outer_gset.elements:
                    for ys in itertools.product(*(g.elements for g in inner_gsets)):
                        bucket.append((_Raw(outer_sig, blocks, xe, ys), outer_gset, inner_gsets))

    components = {}
    for d_sig in sorted(raw_data, key=_sig_key(colour_set)):
        bucket = raw_data[d_sig]
        gsets_for = {raw: (og, igs) for raw, og, igs in bucket}
        uf = _UnionFind()
        for raw, outer_gset, inner_gsets in bucket:
            uf.find(raw)
            for sigma in stabilizer_subgroup(colour_set, raw.outer):
                uf.union(raw, _shift(raw, sigma, outer_gset))
        classes = uf.classes()
        rep_of = {}
        for members in classes:
            rep = min(members, key=lambda r: _raw_key(colour_set, r))
            for m in members:
                rep_of[m] = rep
        reps = sorted({rep_of[r] for r in rep_of}, key=lambda r: _raw_key(colour_set, r))
        names = {rep: _encode_raw(rep) for rep in reps}
        group = stabilizer_subgroup(colour_set, d_sig)
        action = {}
        for xi in group:
            table = {}
            for rep in reps:
                _, inner_gsets = gsets_for[rep]
                moved = _act_raw(rep, xi, inner_gsets)
                table[names[rep]] = names[rep_of[uf.find(moved)]]
            action[xi] = table
        components[d_sig] = GSet(tuple(names[rep] for rep in reps), group, action)
    return Collection(colour_set, components)


def _encode_raw(raw: _Raw) -> str:
    return repr(((raw.outer.inputs, raw.outer.output), raw.blocks, raw.x, raw.ys))


# ---------------------------------------------------------------------------
# Equivariant bijections


def find_equivariant_bijection(a: GSet, b: GSet) -> dict | None:
    """A bijection commuting with the actions, or None; backtracking search."""
    if len(a.elements) != len(b.elements) or tuple(a.group) != tuple(b.group):
        return None
    assignment = {}
    used = set()

    def assign(i):
        if i == len(a.elements):
            return True
        xa = a.elements[i]
        if xa in assignment:
            return assign(i + 1)
        for xb in b.elements:
            if xb in used:
                continue
            stack = [(xa, xb)]
            added = []
            ok = True
            while stack and ok:
                p, q = stack.pop()
                if p in assignment:
                    if assignment[p] != q:
                        ok = False
                    continue
                if q in used:
                    ok = False
                    continue
                assignment[p] = q
                used.add(q)
                added.append(p)
                for g in a.group:
                    stack.append((a.act(p, g), b.act(q, g)))
            if ok and assign(i + 1):
                return True
            for p in added:
                used.discard(assignment.pop(p))
        return False

    if assign(0):
        return dict(assignment)
    return None
