"""Coloured operads in finite sets, in the smaller representation.

An operad stores one component per ordered signature plus composition
tables indexed by an ordered outer signature and a tuple of ordered
inner signatures; compositions at all other signatures are recovered by
transporting along stable sorting permutations.  Elements are handled in
pair form: an `Element` carries an arbitrary signature together with the
name of the stored representative at the sorted signature, and `act` and
`compose` move pairs around with the transport cocycle, so callers never
see the sorting bookkeeping.

`check_operad` verifies the axioms exhaustively up to an arity bound,
`as_monoid` verifies the same laws routed through the box product
quotients of the underlying collection, and the two verdicts agree on
corrupted inputs.  `free_operad` builds truncated free operads on a
collection of generators, `symmetrize` turns a planar operad into a
symmetric one, and `pullback_colours` / `pushforward_colours` change the
colour set.
"""

from __future__ import annotations

import itertools
from ast import literal_eval
from dataclasses import dataclass, field
from operator import itemgetter

from operadkit.colours import (ColourSet, Permutation, Signature,
                               adjacent_transpositions,
                               all_permutations, block_permutation, block_sum,
                               sort_signature, sorting_permutation,
                               stabilizer_subgroup)
from operadkit.collections import (Collection, GSet, PointedCollection,
                                   box_product, orbit_representatives,
                                   transport_permutation, unit_collection)
from operadkit.labelled import (LEdge, LLeaf, LNode, act_indices, canonicalize,
                                decode, encode, graft_numbered, vertex_count)
from operadkit.reporting import Report
from operadkit.trees import (enumerate_trees, is_leaf, leaf_paths, numberings,
                             signature_of, subtree_at, vertex_paths)


class OperadError(ValueError):
    """Raised for malformed operads or invalid compositions."""


class TruncationError(OperadError):
    """Raised when a composition leaves the truncated range."""


TRUNCATED = "__truncated__"


@dataclass(frozen=True)
class Element:
    """An operad element in pair form.

    ``name`` is the stored representative at the sorted version of
    ``signature``; the pair denotes that representative transported back
    along the stable sorting permutation.
    """

    signature: Signature
    name: str


@dataclass
class Operad(PointedCollection):
    gamma: dict = field(default_factory=dict)
    max_arity: int = 0
    # Cache of composition bookkeeping keyed by signature arrangement;
    # see _composition_plan.  Entries hold references into gamma and the
    # component action tables, which is safe because those dictionaries
    # are only ever mutated in place.
    _plans: dict = field(default_factory=dict, repr=False, compare=False)


def elements_at(P, sig: Signature) -> list[Element]:
    """All elements at ``sig``, which need not be ordered."""
    stored, _ = sort_signature(P.colours, sig)
    gset = P.component(stored)
    if gset is None:
        return []
    return [Element(sig, name) for name in gset.elements]


def unit_element(P, colour: str) -> Element:
    return Element(Signature((colour,), colour), P.units[colour])


def act(P, elem: Element, sigma: Permutation) -> Element:
    """The right action of a permutation on an element in pair form."""
    sig = elem.signature
    assert sigma.degree == sig.arity
    stored, _ = sort_signature(P.colours, sig)
    gset = P.components[stored]
    xi = transport_permutation(P.colours, sig, sigma)
    return Element(sig.permute(sigma), gset.act(elem.name, xi))


def _picker(idx):
    """Reindexing callable for a tuple, or None for the identity order."""
    if idx == tuple(range(len(idx))):
        return None
    if len(idx) == 1:
        return lambda t, i=idx[0]: (t[i],)
    return itemgetter(*idx)


@dataclass(frozen=True)
class _Plan:
    """Signature-level bookkeeping for one composition arrangement.

    Composing at fixed outer and inner signatures always reads the same
    table and transports the value by the same permutation, so that work
    is done once here and every element combination afterwards costs a
    few dictionary lookups.
    """

    result_sig: Signature
    outer_sorted: Signature
    order: tuple  # 0-based positions of the inner elements in table order
    table: dict
    act_map: dict  # stored value -> value transported to the result order
    pick: object  # reindexer from slot order to table order, None if equal


def _composition_plan(P, s: Signature, q_sigs: tuple) -> _Plan:
    cs = P.colours
    result_inputs = tuple(itertools.chain.from_iterable(u.inputs for u in q_sigs))
    result_sig = Signature(result_inputs, s.output)
    outer_sorted, rho = sort_signature(cs, s)
    order = tuple(rho(j) - 1 for j in range(1, s.arity + 1))
    inner_sorted = []
    pis = []
    for i in order:
        u, pi = sort_signature(cs, q_sigs[i])
        inner_sorted.append(u)
        pis.append(pi)
    key = (outer_sorted, tuple(inner_sorted))
    table = P.gamma.get(key)
    if table is None:
        raise OperadError("missing composition table at %s <- %s"
                          % (outer_sorted, [str(u) for u in inner_sorted]))
    d = tuple(itertools.chain.from_iterable(u.inputs for u in inner_sorted))
    d_sig = Signature(d, s.output)
    sizes = tuple(u.arity for u in q_sigs)
    g = (block_sum(tuple(pi.inverse() for pi in pis))
         * block_permutation(rho, sizes).inverse())
    assert g.permute_tuple(d) == result_inputs
    xi = transport_permutation(cs, d_sig, g)
    stored, _ = sort_signature(cs, d_sig)
    target = P.components.get(stored)
    if target is None:
        raise OperadError("missing target component at %s" % (stored,))
    act_map = target.action.get(xi)
    if act_map is None:
        raise OperadError("missing action table for %r at %s" % (xi.images, stored))
    return _Plan(result_sig, outer_sorted, order, table, act_map, _picker(order))


def _resolve_plan(P, s: Signature, q_sigs: tuple) -> _Plan:
    plan = P._plans.get((s, q_sigs))
    if plan is None:
        plan = _composition_plan(P, s, q_sigs)
        P._plans[(s, q_sigs)] = plan
    return plan


def compose(P, p: Element, qs) -> Element:
    """The full composition of ``p`` with one element per input slot.

    Works at arbitrary signatures: the stored table at the sorted
    signatures supplies the value, which is transported to the requested
    slot order by the block permutation of the outer sorting permutation
    and the inner sorting permutations.  The bookkeeping is cached per
    signature arrangement, so repeated composites at the same signatures
    are cheap.
    """
    qs = list(qs)
    s = p.signature
    assert len(qs) == s.arity, "one inner element per input slot"
    for colour, q in zip(s.inputs, qs):
        assert q.signature.output == colour, "inner output must match the slot colour"
    if not qs:
        return p
    total = sum(q.signature.arity for q in qs)
    if total > P.max_arity:
        raise TruncationError("composite arity %d exceeds the bound %d"
                              % (total, P.max_arity))
    plan = _resolve_plan(P, s, tuple(q.signature for q in qs))
    entry = (p.name, tuple(qs[i].name for i in plan.order))
    value = plan.table.get(entry)
    if value is None:
        raise OperadError("missing composition entry %r at %s"
                          % (entry, plan.outer_sorted))
    if value == TRUNCATED:
        raise TruncationError("composition entry %r at %s is truncated"
                              % (entry, plan.outer_sorted))
    return Element(plan.result_sig, plan.act_map[value])


def partial_compose(P, p: Element, slot: int, q: Element) -> Element:
    """Compose ``q`` into one input slot of ``p``, units elsewhere."""
    assert 1 <= slot <= p.signature.arity
    inners = [unit_element(P, c) for c in p.signature.inputs]
    inners[slot - 1] = q
    return compose(P, p, inners)


# ---------------------------------------------------------------------------
# Axiom checking


def _component_signatures(P, bound: int) -> list[Signature]:
    out = [sig for sig, gset in P.components.items()
           if sig.arity <= bound and gset.elements]
    cs = P.colours
    out.sort(key=lambda sig: (sig.arity,
                              tuple(cs.index(c) for c in sig.inputs),
                              cs.index(sig.output)))
    return out


def _signature_tuples(P, colour_seq, budget: int):
    """Tuples of ordered nonempty signatures matching an output colour
    sequence, with total arity at most ``budget``."""
    sigs = _component_signatures(P, budget)
    options = {}
    for c in set(colour_seq):
        options[c] = [sig for sig in sigs if sig.output == c]

    def rec(i, remaining):
        if i == len(colour_seq):
            yield ()
            return
        for sig in options[colour_seq[i]]:
            if sig.arity <= remaining:
                for tail in rec(i + 1, remaining - sig.arity):
                    yield (sig,) + tail

    yield from rec(0, budget)


class _Checker:
    def __init__(self, subject):
        self.subject = subject
        self.checks = 0
        self.violations = []

    def compare(self, context, left, right):
        self.checks += 1
        if left != right:
            self.violations.append("%s: %r != %r" % (context, left, right))

    def flag(self, message):
        self.violations.append(message)

    def guarded(self, context, thunk):
        """Run a law check, recording lookup failures as violations and
        treating symmetric truncation as a skip."""
        self.checks += 1
        try:
            left, right = thunk()
        except TruncationError:
            return
        except (OperadError, KeyError) as exc:
            self.violations.append("%s: %s" % (context, exc))
            return
        if left != right:
            self.violations.append("%s: %r != %r" % (context, left, right))

    def report(self):
        return Report(self.subject, self.checks, tuple(self.violations))


# Above this many estimated element checks, the associativity sweep in
# check_operad switches from the literal two-level enumeration to the
# single-insertion generating family; see the comment in check_operad.
_DIRECT_ASSOC_LIMIT = 200_000


def _associativity_cost(P, sigs, reps, bound, limit):
    """Estimate the element checks in the literal two-level sweep.

    Counts outer and middle representatives against every deep filling,
    treating the deep budget per slot as independent, so the result is
    an overcount of what the direct sweep would visit.  Stops early once
    the running total passes ``limit``; only the comparison against the
    limit is meaningful then.
    """
    deep = {}

    def deep_weight(u):
        w = deep.get(u)
        if w is None:
            if u.arity == 0:
                w = 1
            else:
                w = 0
                for block in _signature_tuples(P, u.inputs, bound):
                    t = 1
                    for v in block:
                        t *= len(reps[v])
                    w += t
                    if w > limit:
                        break
            deep[u] = w
        return w

    total = 0
    for s in sigs:
        if s.arity == 0 or s.arity > bound:
            continue
        base = len(reps[s])
        for us in _signature_tuples(P, s.inputs, bound):
            t = base
            for u in us:
                t *= len(reps[u]) * deep_weight(u)
            total += t
            if total > limit:
                return total
    return total


def check_operad(P, max_arity: int | None = None) -> Report:
    """Exhaustively verify the operad axioms up to an arity bound.

    Checks, in order: the component actions and units at the collection
    level, completeness and typing of the composition tables, the unit
    laws, equivariance in the outer and inner slots over every element,
    and associativity for every two-level composite shape within the
    bound.  The associativity loops are reduced to orbit
    representatives, at the element level and at the level of slot
    arrangements, because the action and equivariance laws carry the
    equation across each orbit.  On operads where even the reduced
    enumeration is large, the deep layer is restricted to units in all
    positions but one, which generates the remaining instances; the
    verdict is the same either way.
    """
    bound = P.max_arity if max_arity is None else min(max_arity, P.max_arity)
    chk = _Checker("operad")
    cs = P.colours

    for v in P.violations():
        chk.flag(v)
    chk.checks += 1

    # Composition table domains.
    expected_keys = set()
    sigs = _component_signatures(P, P.max_arity)
    for s in sigs:
        if s.arity == 0:
            continue
        gset = P.components[s]
        for us in _signature_tuples(P, s.inputs, P.max_arity):
            key = (s, us)
            expected_keys.add(key)
            chk.checks += 1
            table = P.gamma.get(key)
            if table is None:
                chk.flag("missing composition table at %s <- %s"
                         % (s, [str(u) for u in us]))
                continue
            domain = set(itertools.product(
                gset.elements,
                itertools.product(*(P.components[u].elements for u in us))))
            found = set(table)
            for entry in sorted(domain - found):
                chk.flag("missing entry %r at %s" % (entry, s))
            for entry in sorted(found - domain):
                chk.flag("unexpected entry %r at %s" % (entry, s))
            d = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            stored, _ = sort_signature(cs, Signature(d, s.output))
            target = P.components.get(stored)
            for entry in sorted(domain & found):
                value = table[entry]
                if value == TRUNCATED:
                    continue
                if target is None or value not in target.elements:
                    chk.flag("entry %r at %s has value %r outside %s"
                             % (entry, s, value, stored))
    for key in P.gamma:
        if key not in expected_keys:
            chk.flag("unexpected composition table at %s <- %s"
                     % (key[0], [str(u) for u in key[1]]))

    # Unit laws.
    for s in sigs:
        for name in P.components[s].elements:
            p = Element(s, name)
            if s.arity >= 1:
                chk.guarded(
                    "right unit law at %s, %r" % (s, name),
                    lambda p=p, s=s: (
                        compose(P, p, [unit_element(P, c) for c in s.inputs]), p))
            chk.guarded(
                "left unit law at %s, %r" % (s, name),
                lambda p=p, s=s: (
                    compose(P, unit_element(P, s.output), [p]), p))

    # The law sweeps below run at the level of stored names: for each
    # arrangement of signatures the tables, transports, and index maps
    # are resolved once, and the element loops are plain dictionary
    # lookups.  This matches applying compose and act elementwise but
    # keeps the per-instance cost flat.

    def try_plan(s_arr, u_arrs):
        try:
            return _resolve_plan(P, s_arr, tuple(u_arrs)), None
        except OperadError as exc:
            return None, str(exc)

    def action_table(sig, perm):
        stored, _ = sort_signature(cs, sig)
        gset = P.components.get(stored)
        if gset is None:
            return None, "missing component at %s" % (stored,)
        table = gset.action.get(transport_permutation(cs, sig, perm))
        if table is None:
            return None, "missing action table at %s" % (stored,)
        return table, None

    def skip_all(ctx, err, count):
        chk.checks += count
        chk.flag("%s: %s" % (ctx, err))

    # Equivariance in the outer slot, for every element; permutations
    # outside the stabilizer exercise the transport cocycle as well.
    # Adjacent transpositions suffice: the law for a product follows
    # from the laws for its factors through the block permutation
    # cocycle, so a violation anywhere forces one at a transposition.
    for s in sigs:
        n = s.arity
        if n == 0 or n > bound:
            continue
        outer_names = P.components[s].elements
        for us in _signature_tuples(P, s.inputs, bound):
            sizes = tuple(u.arity for u in us)
            name_lists = [P.components[u].elements for u in us]
            count = len(outer_names)
            for names in name_lists:
                count *= len(names)
            e_sig = Signature(
                tuple(itertools.chain.from_iterable(u.inputs for u in us)),
                s.output)
            plan0, err0 = try_plan(s, us)
            for sigma in adjacent_transpositions(n):
                def ctx(s=s, sigma=sigma):
                    return "outer equivariance at %s by %r" % (s, sigma.images)
                planl, err = try_plan(
                    s.permute(sigma),
                    tuple(us[sigma(j) - 1] for j in range(1, n + 1)))
                err = err0 or err
                if err is None:
                    act_p, err = action_table(s, sigma)
                if err is None:
                    act_e, err = action_table(
                        e_sig, block_permutation(sigma, sizes))
                if err is not None:
                    skip_all(ctx(), err, count)
                    continue
                pick0 = plan0.pick
                pickl = _picker(tuple(sigma(i + 1) - 1 for i in planl.order))
                tab0, map0 = plan0.table, plan0.act_map
                tabl, mapl = planl.table, planl.act_map
                chk.checks += count
                for pname in outer_names:
                    pmoved = act_p[pname]
                    for qnames in itertools.product(*name_lists):
                        try:
                            v0 = tab0[(pname,
                                       qnames if pick0 is None else pick0(qnames))]
                            vl = tabl[(pmoved,
                                       qnames if pickl is None else pickl(qnames))]
                            if v0 == TRUNCATED or vl == TRUNCATED:
                                continue
                            left = mapl[vl]
                            right = act_e[map0[v0]]
                        except KeyError as exc:
                            chk.flag("%s at %r: missing %s" % (ctx(), (pname,) + qnames, exc))
                            continue
                        if left != right:
                            chk.flag("%s at %r: %r != %r"
                                     % (ctx(), (pname,) + qnames, left, right))

    # Equivariance in each inner slot separately; combined with the
    # component action laws this covers simultaneous inner actions.
    for s in sigs:
        n = s.arity
        if n == 0 or n > bound:
            continue
        outer_names = P.components[s].elements
        for us in _signature_tuples(P, s.inputs, bound):
            sizes = tuple(u.arity for u in us)
            name_lists = [P.components[u].elements for u in us]
            count = len(outer_names)
            for names in name_lists:
                count *= len(names)
            e_sig = Signature(
                tuple(itertools.chain.from_iterable(u.inputs for u in us)),
                s.output)
            plan0, err0 = try_plan(s, us)
            for slot in range(n):
                if sizes[slot] == 0:
                    continue
                for tau in adjacent_transpositions(sizes[slot]):
                    def ctx(s=s, slot=slot, tau=tau):
                        return ("inner equivariance at %s slot %d by %r"
                                % (s, slot + 1, tau.images))
                    blocks = tuple(tau if j == slot else Permutation.identity(k)
                                   for j, k in enumerate(sizes))
                    moved_us = list(us)
                    moved_us[slot] = us[slot].permute(tau)
                    planl, err = try_plan(s, moved_us)
                    err = err0 or err
                    if err is None:
                        act_q, err = action_table(us[slot], tau)
                    if err is None:
                        act_e, err = action_table(e_sig, block_sum(blocks))
                    if err is not None:
                        skip_all(ctx(), err, count)
                        continue
                    pick0 = plan0.pick
                    pickl = planl.pick
                    tab0, map0 = plan0.table, plan0.act_map
                    tabl, mapl = planl.table, planl.act_map
                    chk.checks += count
                    for pname in outer_names:
                        for qnames in itertools.product(*name_lists):
                            try:
                                moved = (qnames[:slot]
                                         + (act_q[qnames[slot]],)
                                         + qnames[slot + 1:])
                                v0 = tab0[(pname,
                                           qnames if pick0 is None else pick0(qnames))]
                                vl = tabl[(pname,
                                           moved if pickl is None else pickl(moved))]
                                if v0 == TRUNCATED or vl == TRUNCATED:
                                    continue
                                left = mapl[vl]
                                right = act_e[map0[v0]]
                            except KeyError as exc:
                                chk.flag("%s at %r: missing %s"
                                         % (ctx(), (pname,) + qnames, exc))
                                continue
                            if left != right:
                                chk.flag("%s at %r: %r != %r"
                                         % (ctx(), (pname,) + qnames, left, right))

    # Associativity, for every two-level composite shape within the
    # bound.  The element loops run over orbit representatives only, and
    # the shape loops run over one arrangement per orbit of the slot
    # permutations fixing the outer signature: acting on any layer of an
    # instance, or permuting slots of equal colour together with their
    # inner factors and deep blocks, rewrites both sides of the equation
    # by the same block permutation, using the action and equivariance
    # laws verified above, so a violation at an arbitrary instance
    # forces either an earlier violation or one at a canonical
    # all-representative instance.
    #
    # When even the canonical enumeration is too large, the deep layer
    # is restricted further to the single-insertion family: the unit in
    # every deep position except at most one.  Together with the unit
    # laws, equivariance and table completeness checked above, these
    # instances imply the general law by induction on the number of
    # non-unit deep factors: rewriting one non-unit factor at a time
    # uses only single-insertion instances, and every composite met
    # along the way stays within the arity bound.  Both strategies reach
    # the same verdict; the direct sweep is kept for small operads
    # because it checks the stated instances literally.
    reps = {}
    options = {}
    for s in sigs:
        reps[s] = orbit_representatives(P.components[s])
        options.setdefault(s.output, []).append(s)
    direct = _associativity_cost(
        P, sigs, reps, bound, _DIRECT_ASSOC_LIMIT) <= _DIRECT_ASSOC_LIMIT

    def canonical_tuples(colour_seq, budget):
        # One tuple per orbit of the permutations preserving the colour
        # sequence: choices are nondecreasing within equal-colour runs.
        n = len(colour_seq)

        def rec(i, remaining, start):
            if i == n:
                yield ()
                return
            opts = options.get(colour_seq[i], ())
            lo = start if i > 0 and colour_seq[i] == colour_seq[i - 1] else 0
            for k in range(lo, len(opts)):
                sig = opts[k]
                if sig.arity <= remaining:
                    for tail in rec(i + 1, remaining - sig.arity, k):
                        yield (sig,) + tail

        yield from rec(0, budget, 0)

    slot_cache = {}

    def slot_options(u):
        # Ways to fill the inputs of one middle-layer slot, with the
        # composite plan and its signature resolved once per block.  An
        # option records the block, its composite arity, the plan with
        # its error and result signature, and one name list per deep
        # position.  A padding block of bare units leaves the middle
        # element alone by the right unit law, so it is recorded
        # without a plan, like an empty block under a constant.
        got = slot_cache.get(u)
        if got is None:
            if u.arity == 0:
                got = [((), 0, None, None, u, [])]
            elif direct:
                got = []
                for block in _signature_tuples(P, u.inputs, bound):
                    total = sum(v.arity for v in block)
                    plan, err = try_plan(u, block)
                    f_sig = u if plan is None else plan.result_sig
                    got.append((block, total, plan, err, f_sig,
                                [reps[v] for v in block]))
            else:
                pads = tuple(Signature((c,), c) for c in u.inputs)
                pad_lists = [[P.units.get(c)] for c in u.inputs]
                got = [(pads, u.arity, None, None, u, pad_lists)]
                for p in range(u.arity):
                    for v in options.get(u.inputs[p], ()):
                        total = u.arity - 1 + v.arity
                        if total > bound:
                            continue
                        block = pads[:p] + (v,) + pads[p + 1:]
                        plan, err = try_plan(u, block)
                        f_sig = u if plan is None else plan.result_sig
                        lists = (pad_lists[:p] + [reps[v]]
                                 + pad_lists[p + 1:])
                        got.append((block, total, plan, err, f_sig, lists))
            slot_cache[u] = got
        return got

    for s in sigs:
        n = s.arity
        if n == 0 or n > bound:
            continue
        s_reps = reps[s]
        ctx = "associativity at %s" % (s,)
        for us in canonical_tuples(s.inputs, bound):
            mid_total = sum(u.arity for u in us)
            if mid_total == 0:
                continue
            d = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            e_sig = Signature(d, s.output)
            inner_reps = [reps[u] for u in us]
            n_inner = len(s_reps)
            for names in inner_reps:
                n_inner *= len(names)
            offsets = [0]
            for u in us:
                offsets.append(offsets[-1] + u.arity)
            slot_lists = [slot_options(u) for u in us]
            plan0, err0 = try_plan(s, us)
            pick0 = None if plan0 is None else plan0.pick

            if direct:
                def assignments():
                    # One assignment per orbit of the permutations
                    # moving equal middle slots: block choices are
                    # nondecreasing across runs of equal inner
                    # signatures.
                    def choose(j, remaining, prev):
                        if j == n:
                            yield ()
                            return
                        opts = slot_lists[j]
                        lo = prev if j > 0 and us[j] == us[j - 1] else 0
                        for k in range(lo, len(opts)):
                            opt = opts[k]
                            if opt[1] <= remaining:
                                for tail in choose(
                                        j + 1, remaining - opt[1], k):
                                    yield (opt,) + tail

                    yield from choose(0, bound, 0)
            else:
                def assignments():
                    # Units everywhere, then one non-unit block in one
                    # slot at a time.  Inserting into a later slot of a
                    # run of equal middle signatures repeats the first
                    # slot of the run up to a slot swap, so only the
                    # first is kept.
                    pads = tuple(sl[0] for sl in slot_lists)
                    yield pads
                    for j in range(n):
                        if j > 0 and us[j] == us[j - 1]:
                            continue
                        head = mid_total - us[j].arity
                        for opt in slot_lists[j][1:]:
                            if head + opt[1] <= bound:
                                yield pads[:j] + (opt,) + pads[j + 1:]

            for chosen in assignments():
                vs = tuple(itertools.chain.from_iterable(
                    opt[0] for opt in chosen))
                deep_lists = list(itertools.chain.from_iterable(
                    opt[5] for opt in chosen))
                count = n_inner
                for names in deep_lists:
                    count *= len(names)
                planl, errl = try_plan(e_sig, vs)
                err = err0 or errl
                f_sigs = []
                part_data = []
                for j, opt in enumerate(chosen):
                    plan, perr, f_sig = opt[2], opt[3], opt[4]
                    f_sigs.append(f_sig)
                    if err is None and perr is not None:
                        err = perr
                    part_data.append(None if plan is None else (
                        plan.table, plan.act_map, plan.pick,
                        offsets[j], offsets[j + 1]))
                if err is None:
                    planr, err = try_plan(s, tuple(f_sigs))
                if err is not None:
                    skip_all(ctx, err, count)
                    continue
                pickl = planl.pick
                pickr = planr.pick
                tab0, map0 = plan0.table, plan0.act_map
                tabl, mapl = planl.table, planl.act_map
                tabr, mapr = planr.table, planr.act_map
                chk.checks += count
                for pname in s_reps:
                    for qnames in itertools.product(*inner_reps):
                        entry0 = (pname,
                                  qnames if pick0 is None else pick0(qnames))
                        v0 = tab0.get(entry0)
                        if v0 is None:
                            chk.flag("%s at %r: missing entry %r"
                                     % (ctx, (pname,) + qnames, entry0))
                            continue
                        if v0 == TRUNCATED:
                            continue
                        try:
                            z = map0[v0]
                        except KeyError as exc:
                            chk.flag("%s at %r: value outside target (%s)"
                                     % (ctx, (pname,) + qnames, exc))
                            continue
                        for rnames in itertools.product(*deep_lists):
                            try:
                                vl = tabl[(z,
                                           rnames if pickl is None else pickl(rnames))]
                                if vl == TRUNCATED:
                                    continue
                                parts = []
                                truncated = False
                                for j in range(n):
                                    data = part_data[j]
                                    if data is None:
                                        parts.append(qnames[j])
                                        continue
                                    tab, amap, pick, lo, hi = data
                                    rblock = rnames[lo:hi]
                                    vj = tab[(qnames[j],
                                              rblock if pick is None else pick(rblock))]
                                    if vj == TRUNCATED:
                                        truncated = True
                                        break
                                    parts.append(amap[vj])
                                if truncated:
                                    continue
                                vr = tabr[(pname,
                                           tuple(parts) if pickr is None
                                           else pickr(parts))]
                                if vr == TRUNCATED:
                                    continue
                                left = mapl[vl]
                                right = mapr[vr]
                            except KeyError as exc:
                                chk.flag("%s at %r: missing %s"
                                         % (ctx, (pname,) + qnames + rnames, exc))
                                continue
                            if left != right:
                                chk.flag("%s at %r: %r != %r"
                                         % (ctx, (pname,) + qnames + rnames,
                                            left, right))

    return chk.report()


# ---------------------------------------------------------------------------
# The monoid point of view


def _shift_raw(raw, sigma, outer_gset):
    outer, blocks, x, ys = raw
    n = len(blocks)
    return (outer,
            tuple(blocks[sigma(i) - 1] for i in range(1, n + 1)),
            outer_gset.act(x, sigma),
            tuple(ys[sigma(i) - 1] for i in range(1, n + 1)))


def _raw_sort_key(cs, raw):
    outer, blocks, x, ys = raw
    return (tuple(cs.index(c) for c in outer.inputs), cs.index(outer.output),
            blocks, x, ys)


def _encode_class(raw):
    outer, blocks, x, ys = raw
    return repr(((outer.inputs, outer.output), blocks, x, ys))


def as_monoid(P, max_arity: int | None = None) -> Report:
    """Verify the operad laws in the monoid presentation.

    The underlying collection is squared with the box product and the
    structure map is evaluated on decoded class representatives; the
    checks route every multiplication through the box quotient classes,
    so they detect exactly the failures `check_operad` detects, phrased
    through the monoid laws: well-definedness and equivariance of the
    structure map, the unit laws against the unit collection, and
    associativity of two-level multiplications.
    """
    bound = P.max_arity if max_arity is None else min(max_arity, P.max_arity)
    chk = _Checker("monoid view")
    cs = P.colours

    for v in P.violations():
        chk.flag(v)
    chk.checks += 1

    X = Collection(cs, P.components)

    def raw_value(d_sig, raw):
        outer, blocks, x, ys = raw
        inners = []
        for j, (block, y) in enumerate(zip(blocks, ys)):
            u = Signature(tuple(d_sig.inputs[p - 1] for p in block), outer.inputs[j])
            inners.append(Element(u, y))
        rho0 = Permutation(tuple(itertools.chain.from_iterable(blocks)))
        res = compose(P, Element(outer, x), inners)
        assert res.signature == d_sig.permute(rho0)
        return act(P, res, rho0.inverse())

    def class_raw(name):
        (inputs, output), blocks, x, ys = literal_eval(name)
        return (Signature(tuple(inputs), output), blocks, x, ys)

    try:
        XX = box_product(X, X, bound)
    except KeyError as exc:
        chk.flag("box product failed: %s" % exc)
        return chk.report()

    # Well-definedness on box classes and equivariance of the structure map.
    for d_sig, gset in sorted(XX.components.items(),
                              key=lambda kv: (kv[0].arity, kv[0].inputs, kv[0].output)):
        for name in gset.elements:
            raw = class_raw(name)
            outer_gset = P.components.get(raw[0])
            if outer_gset is None:
                chk.flag("class %r has no outer component %s" % (name, raw[0]))
                continue
            base = None
            for sigma in stabilizer_subgroup(cs, raw[0]):
                moved = _shift_raw(raw, sigma, outer_gset)
                ctx = "structure map well-defined on %r under %r" % (name, sigma.images)
                try:
                    value = raw_value(d_sig, moved)
                except (OperadError, KeyError) as exc:
                    chk.checks += 1
                    chk.flag("%s: %s" % (ctx, exc))
                    continue
                if base is None:
                    base = value
                    chk.checks += 1
                else:
                    chk.compare(ctx, value, base)
            if base is None:
                continue
            for xi in gset.group:
                ctx = "structure map equivariance on %r under %r" % (name, xi.images)
                moved_class = gset.act(name, xi)
                def both(moved_class=moved_class, base=base, xi=xi, d_sig=d_sig):
                    left = raw_value(d_sig, class_raw(moved_class))
                    return left, act(P, base, xi)
                chk.guarded(ctx, both)

    # Unit laws through the box classes against the unit collection; the
    # unit class decodes to a unit-collection point, which is sent to
    # the operad unit before composing.
    U = unit_collection(cs)
    UX = box_product(U, X, bound)
    for d_sig, gset in UX.components.items():
        seen = []
        for name in gset.elements:
            outer, blocks, _, ys = class_raw(name)
            seen.append(ys[0])
            u = Signature(tuple(d_sig.inputs[p - 1] for p in blocks[0]),
                          outer.inputs[0])
            ctx = "left unit law on %r" % (name,)
            def both(outer=outer, u=u, y=ys[0], d_sig=d_sig):
                res = compose(P, unit_element(P, outer.output), [Element(u, y)])
                return res, Element(d_sig, y)
            chk.guarded(ctx, both)
        target = X.component(d_sig)
        if target is not None:
            chk.compare("left unit classes biject at %s" % (d_sig,),
                        sorted(seen), sorted(target.elements))
    XU = box_product(X, U, bound)
    for d_sig, gset in XU.components.items():
        for name in gset.elements:
            outer, blocks, x, _ = class_raw(name)
            rho0 = Permutation(tuple(itertools.chain.from_iterable(blocks)))
            ctx = "right unit law on %r" % (name,)
            def both(outer=outer, x=x, rho0=rho0):
                res = compose(P, Element(outer, x),
                              [unit_element(P, c) for c in outer.inputs])
                return act(P, res, rho0.inverse()), act(P, Element(outer, x),
                                                        rho0.inverse())
            chk.guarded(ctx, both)

    # Associativity of two-level multiplications, each step routed
    # through its box class representative.
    def build_raw(outer_sig, inner_sigs, x, ys):
        e = tuple(itertools.chain.from_iterable(u.inputs for u in inner_sigs))
        tau = sorting_permutation(cs, e)
        tau_inv = tau.inverse()
        blocks = []
        offset = 0
        for u in inner_sigs:
            blocks.append(tuple(sorted(tau_inv(offset + i) for i in range(1, u.arity + 1))))
            offset += u.arity
        d_sig = Signature(tau.permute_tuple(e), outer_sig.output)
        return d_sig, (outer_sig, tuple(blocks), x, tuple(ys))

    def multiply(outer_sig, inner_sigs, x, ys):
        d_sig, raw = build_raw(outer_sig, inner_sigs, x, ys)
        outer_gset = P.components[outer_sig]
        orbit = [_shift_raw(raw, sigma, outer_gset)
                 for sigma in stabilizer_subgroup(cs, outer_sig)]
        rep = min(orbit, key=lambda r: _raw_sort_key(cs, r))
        comp = XX.component(d_sig)
        if comp is None or _encode_class(rep) not in comp.elements:
            raise OperadError("raw %r has no box class at %s" % (rep, d_sig))
        return d_sig, raw_value(d_sig, rep)

    sigs = _component_signatures(P, bound)
    for s in sigs:
        if s.arity == 0:
            continue
        for us in _signature_tuples(P, s.inputs, bound):
            k = sum(u.arity for u in us)
            if k == 0:
                continue
            d = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            offsets = [0]
            for u in us:
                offsets.append(offsets[-1] + u.arity)
            inner_elements = [elements_at(P, u) for u in us]
            for vs in _signature_tuples(P, d, bound):
                deep_elements = [elements_at(P, v) for v in vs]
                for name in P.components[s].elements:
                    for qs in itertools.product(*inner_elements):
                        for rs in itertools.product(*deep_elements):
                            def both(name=name, qs=qs, rs=rs, us=us, vs=vs, s=s,
                                     offsets=offsets):
                                d_sig, z1 = multiply(s, us, name,
                                                     [q.name for q in qs])
                                left_sig, left = multiply(
                                    d_sig, vs, z1.name, [r.name for r in rs])
                                parts = []
                                for j in range(len(us)):
                                    sub = vs[offsets[j]:offsets[j + 1]]
                                    sub_rs = rs[offsets[j]:offsets[j + 1]]
                                    wj_sig, wj = multiply(us[j], sub, qs[j].name,
                                                          [r.name for r in sub_rs])
                                    parts.append((wj_sig, wj))
                                right_sig, right = multiply(
                                    s, tuple(p[0] for p in parts), name,
                                    [p[1].name for p in parts])
                                assert left_sig == right_sig
                                return left, right
                            chk.guarded("associativity through classes at %s" % (s,),
                                        both)

    return chk.report()


# ---------------------------------------------------------------------------
# Maps of operads


@dataclass
class OperadMap:
    source: Operad
    target: Operad
    colour_map: dict      # source colour -> target colour
    element_maps: dict    # source ordered Signature -> {name -> target name}


def map_signature(f: OperadMap, sig: Signature) -> Signature:
    return Signature(tuple(f.colour_map[c] for c in sig.inputs),
                     f.colour_map[sig.output])


def apply_map(f: OperadMap, elem: Element) -> Element:
    """Apply an operad map in pair form.

    The stored image lives at the target-sorted image of the
    source-sorted signature; the result is transported so that its
    signature is the pointwise image of the input signature.
    """
    sig = elem.signature
    stored, rho = sort_signature(f.source.colours, sig)
    image = f.element_maps[stored][elem.name]
    mapped = map_signature(f, stored)
    mapped_stored, _ = sort_signature(f.target.colours, mapped)
    assert image in f.target.components[mapped_stored].elements
    return act(f.target, Element(mapped, image), rho.inverse())


def check_operad_map(f: OperadMap, max_arity: int | None = None) -> Report:
    """Verify that an operad map preserves units, actions and composition."""
    bound = f.source.max_arity if max_arity is None else min(max_arity,
                                                             f.source.max_arity)
    chk = _Checker("operad map")
    cs = f.source.colours
    for c in cs.colours:
        if c not in f.colour_map:
            chk.flag("colour %r has no image" % (c,))
    if chk.violations:
        return chk.report()

    sigs = _component_signatures(f.source, bound)
    for s in sigs:
        table = f.element_maps.get(s)
        if table is None or set(table) != set(f.source.components[s].elements):
            chk.flag("element map at %s does not cover the component" % (s,))
    if chk.violations:
        return chk.report()

    for c in cs.colours:
        chk.guarded("unit preserved at %r" % (c,),
                    lambda c=c: (apply_map(f, unit_element(f.source, c)),
                                 unit_element(f.target, f.colour_map[c])))

    for s in sigs:
        n = s.arity
        for name in f.source.components[s].elements:
            p = Element(s, name)
            for sigma in all_permutations(n):
                chk.guarded(
                    "action preserved at %s by %r" % (s, sigma.images),
                    lambda p=p, sigma=sigma: (apply_map(f, act(f.source, p, sigma)),
                                              act(f.target, apply_map(f, p), sigma)))

    for s in sigs:
        if s.arity == 0:
            continue
        for us in _signature_tuples(f.source, s.inputs, bound):
            inner_elements = [elements_at(f.source, u) for u in us]
            for name in f.source.components[s].elements:
                p = Element(s, name)
                for qs in itertools.product(*inner_elements):
                    def both(p=p, qs=qs):
                        left = apply_map(f, compose(f.source, p, list(qs)))
                        right = compose(f.target, apply_map(f, p),
                                        [apply_map(f, q) for q in qs])
                        return left, right
                    chk.guarded("composition preserved at %s" % (s,), both)

    return chk.report()


# ---------------------------------------------------------------------------
# Planar operads and symmetrization


@dataclass
class NSOperad:
    """A planar operad: components at arbitrary signatures, no actions."""

    colours: ColourSet
    components: dict   # Signature -> tuple of names
    units: dict        # colour -> name
    gamma: dict        # (Signature, tuple[Signature, ...]) -> {(x, ys): name}
    max_arity: int


def ns_compose(Q: NSOperad, p: Element, qs) -> Element:
    qs = list(qs)
    s = p.signature
    assert len(qs) == s.arity
    for colour, q in zip(s.inputs, qs):
        assert q.signature.output == colour
    if not qs:
        return p
    result_inputs = tuple(itertools.chain.from_iterable(q.signature.inputs for q in qs))
    if len(result_inputs) > Q.max_arity:
        raise TruncationError("composite arity %d exceeds the bound %d"
                              % (len(result_inputs), Q.max_arity))
    key = (s, tuple(q.signature for q in qs))
    table = Q.gamma.get(key)
    if table is None:
        raise OperadError("missing planar composition table at %s" % (s,))
    value = table.get((p.name, tuple(q.name for q in qs)))
    if value is None:
        raise OperadError("missing planar composition entry at %s" % (s,))
    if value == TRUNCATED:
        raise TruncationError("planar composition entry at %s is truncated" % (s,))
    return Element(Signature(result_inputs, s.output), value)


def symmetrize(Q: NSOperad) -> Operad:
    """The symmetric operad generated freely on the planar structure.

    The component at an ordered signature d is the disjoint union of the
    planar components at all permuted signatures d.sigma, recorded as
    pairs (p, sigma) with the free action xi.(p, sigma) = (p, xi^{-1} o
    sigma); composition reorders the planar factors through sigma and
    collects the block permutation bookkeeping into the recorded
    permutation.
    """
    cs = Q.colours
    pair = lambda name, perm: repr((name, perm.images))

    components = {}
    ordered = sorted({sort_signature(cs, sig)[0] for sig in Q.components},
                     key=lambda sig: (sig.arity,
                                      tuple(cs.index(c) for c in sig.inputs),
                                      cs.index(sig.output)))
    members = {}
    for d in ordered:
        n = d.arity
        bucket = []
        for sigma in all_permutations(n):
            for name in Q.components.get(d.permute(sigma), ()):
                bucket.append((name, sigma))
        if not bucket:
            continue
        members[d] = bucket
        group = stabilizer_subgroup(cs, d)
        elements = tuple(pair(name, sigma) for name, sigma in bucket)
        action = {}
        for xi in group:
            xi_inv = xi.inverse()
            action[xi] = {pair(name, sigma): pair(name, xi_inv * sigma)
                          for name, sigma in bucket}
        components[d] = GSet(elements, group, action)

    units = {c: pair(Q.units[c], Permutation.identity(1)) for c in cs.colours}

    P = Operad(cs, components, units, {}, Q.max_arity)
    for s, bucket in members.items():
        if s.arity == 0:
            continue
        n = s.arity
        for us in _signature_tuples(P, s.inputs, Q.max_arity):
            sizes = tuple(u.arity for u in us)
            e = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            rho_e = sorting_permutation(cs, e)
            table = {}
            inner_members = [members[u] for u in us]
            for p_name, sigma in bucket:
                for inner in itertools.product(*inner_members):
                    outer_q_sig = s.permute(sigma)
                    inner_q_sigs = tuple(us[sigma(j) - 1].permute(inner[sigma(j) - 1][1])
                                         for j in range(1, n + 1))
                    q_names = tuple(inner[sigma(j) - 1][0] for j in range(1, n + 1))
                    entry = (pair(p_name, sigma),
                             tuple(pair(name, tau) for name, tau in inner))
                    planar_table = Q.gamma.get((outer_q_sig, inner_q_sigs))
                    if planar_table is None:
                        raise OperadError("planar table missing at %s" % (outer_q_sig,))
                    value = planar_table[(p_name, q_names)]
                    if value == TRUNCATED:
                        table[entry] = TRUNCATED
                        continue
                    omega = (rho_e.inverse()
                             * block_permutation(sigma, sizes)
                             * block_sum(tuple(inner[sigma(j) - 1][1]
                                               for j in range(1, n + 1))))
                    table[entry] = pair(value, omega)
            P.gamma[(s, us)] = table
    return P


# ---------------------------------------------------------------------------
# Free operads


def _tree_to_ltree(tree, labels, tau):
    """Decorate a coloured tree: ``labels`` maps vertex paths to names,
    ``tau`` lists leaf paths by input number."""
    index_of = {path: j + 1 for j, path in enumerate(tau)}

    def walk(node, path):
        children = []
        for i, child in enumerate(node.children):
            child_path = path + (i,)
            if is_leaf(child):
                children.append(LLeaf(child.colour, index_of[child_path]))
            else:
                children.append(LEdge(None, walk(child, child_path)))
        return LNode(node.colour, labels[path], tuple(children))

    if is_leaf(tree):
        return LLeaf(tree.colour, index_of[()])
    return walk(tree, ())


def free_operad(K: Collection, max_vertices: int) -> Operad:
    """The free operad on a collection of generators, truncated by the
    number of vertices of the representing labelled trees.

    Elements are isomorphism classes of labelled numbered trees with at
    most ``max_vertices`` vertices; a bare edge represents the unit.
    When ``K`` is pointed, trees with a unit label on a vertex of arity
    one are identified with the tree that omits the vertex, and the
    classes are represented by the trees without such vertices.
    Compositions whose result needs more vertices are marked truncated.
    """
    cs = K.colours
    unit_labels = K.units if isinstance(K, PointedCollection) else {}

    def label_act(sig, label, perm):
        return K.components[sig].act(label, perm)

    arities = [sig.arity for sig in K.components if K.components[sig].elements]
    growth = max([a - 1 for a in arities if a >= 1], default=0)
    max_possible = 1 + max_vertices * growth

    element_sets = {}

    def add(sig, name):
        element_sets.setdefault(sig, set()).add(name)

    for c in cs.colours:
        add(Signature((c,), c), repr(encode(LLeaf(c, 1))))

    for n in range(0, max_possible + 1):
        for c in cs.colours:
            for tree in enumerate_trees(cs, n, c, max_vertices):
                if is_leaf(tree):
                    continue
                paths = vertex_paths(tree)
                pools = []
                usable = True
                for path in paths:
                    vertex_sig = signature_of(subtree_at(tree, path))
                    gset = K.components.get(vertex_sig)
                    if gset is None or not gset.elements:
                        usable = False
                        break
                    names = list(gset.elements)
                    if vertex_sig.arity == 1:
                        unit = unit_labels.get(vertex_sig.output)
                        if unit is not None:
                            names = [x for x in names if x != unit]
                    if not names:
                        usable = False
                        break
                    pools.append(names)
                if not usable:
                    continue
                leafs = leaf_paths(tree)
                d = Signature(tuple(sorted((subtree_at(tree, p).colour
                                            for p in leafs), key=cs.index)), c)
                for labels in itertools.product(*pools):
                    label_map = dict(zip(paths, labels))
                    for tau in numberings(tree):
                        if any(subtree_at(tree, tau[j]).colour != d.inputs[j]
                               for j in range(n)):
                            continue
                        ltree = _tree_to_ltree(tree, label_map, tau)
                        canon = canonicalize(cs, label_act, ltree)
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
                moved = canonicalize(cs, label_act,
                                     act_indices(decode(literal_eval(name)), xi))
                table[name] = repr(encode(moved))
            action[xi] = table
        components[sig] = GSet(names, group, action)

    units = {c: repr(encode(LLeaf(c, 1))) for c in cs.colours}
    max_arity = max(sig.arity for sig in components)
    P = Operad(cs, components, units, {}, max_arity)

    for s in components:
        if s.arity == 0:
            continue
        for us in _signature_tuples(P, s.inputs, max_arity):
            e = tuple(itertools.chain.from_iterable(u.inputs for u in us))
            rho_e = sorting_permutation(cs, e)
            table = {}
            for x in components[s].elements:
                outer = decode(literal_eval(x))
                for ys in itertools.product(*(components[u].elements for u in us)):
                    grafted = graft_numbered(outer,
                                             [decode(literal_eval(y)) for y in ys])
                    if vertex_count(grafted) > max_vertices:
                        table[(x, ys)] = TRUNCATED
                        continue
                    stored = canonicalize(cs, label_act, act_indices(grafted, rho_e))
                    table[(x, ys)] = repr(encode(stored))
            P.gamma[(s, us)] = table
    return P


def generator_element(K: Collection, sig: Signature, label: str) -> Element:
    """The one-vertex tree of a generator, as a free operad element at
    the given ordered signature."""
    assert sig.is_ordered(K.colours)
    assert label in K.components[sig].elements

    def label_act(s, name, perm):
        return K.components[s].act(name, perm)

    corolla = LNode(sig.output, label,
                    tuple(LLeaf(c, j + 1) for j, c in enumerate(sig.inputs)))
    canon = canonicalize(K.colours, label_act, corolla)
    return Element(sig, repr(encode(canon)))


# ---------------------------------------------------------------------------
# Changing colours


def _ordered_signatures_over(cs: ColourSet, max_arity: int):
    for n in range(0, max_arity + 1):
        for inputs in itertools.combinations_with_replacement(cs.colours, n):
            for output in cs.colours:
                yield Signature(inputs, output)


def pullback_colours(P, new_colours: ColourSet, alpha: dict,
                     max_arity: int | None = None, keep=None) -> Operad:
    """Reindex an operad along a map of colour sets.

    ``alpha`` sends each new colour to a colour of ``P``; the component
    at a new signature is the component of ``P`` at the image signature,
    with actions and compositions transported through the stable sorting
    permutations on both sides.  An optional ``keep`` predicate on new
    signatures carves out a suboperad directly; unit signatures must be
    kept and composites of kept signatures must stay kept.
    """
    assert set(alpha) == set(new_colours.colours)
    bound = P.max_arity if max_arity is None else min(max_arity, P.max_arity)
    cs = P.colours
    if keep is not None:
        for c in new_colours.colours:
            assert keep(Signature((c,), c)), "unit signatures must be kept"
    components = {}
    for t in _ordered_signatures_over(new_colours, bound):
        if keep is not None and not keep(t):
            continue
        image = Signature(tuple(alpha[c] for c in t.inputs), alpha[t.output])
        stored, _ = sort_signature(cs, image)
        gset = P.components.get(stored)
        if gset is None or not gset.elements:
            continue
        group = stabilizer_subgroup(new_colours, t)
        action = {}
        for xi in group:
            xi_t = transport_permutation(cs, image, xi)
            action[xi] = {name: gset.act(name, xi_t) for name in gset.elements}
        components[t] = GSet(gset.elements, group, action)

    units = {c: P.units[alpha[c]] for c in new_colours.colours}
    out = Operad(new_colours, components, units, {}, bound)

    for t in components:
        if t.arity == 0:
            continue
        for ws in _signature_tuples(out, t.inputs, bound):
            e = tuple(itertools.chain.from_iterable(w.inputs for w in ws))
            if keep is not None:
                stored_result, _ = sort_signature(new_colours, Signature(e, t.output))
                if not keep(stored_result):
                    raise OperadError("composition leaves the kept pattern at %s"
                                      % (stored_result,))
            rho_e = sorting_permutation(new_colours, e)
            p_sig = Signature(tuple(alpha[c] for c in t.inputs), alpha[t.output])
            table = {}
            for x in components[t].elements:
                for ys in itertools.product(*(components[w].elements for w in ws)):
                    inner = [Element(Signature(tuple(alpha[c] for c in w.inputs),
                                               alpha[w.output]), y)
                             for w, y in zip(ws, ys)]
                    try:
                        res = compose(P, Element(p_sig, x), inner)
                        value = act(P, res, rho_e).name
                    except TruncationError:
                        value = TRUNCATED
                    table[(x, ys)] = value
            out.gamma[(t, ws)] = table
    return out


def pushforward_colours(P, new_colours: ColourSet, alpha: dict) -> Operad:
    """Extend an operad along an injective map of colour sets.

    ``alpha`` sends each colour of ``P`` to a new colour, injectively;
    image signatures keep their components and colours outside the image
    receive only their unit.
    """
    assert set(alpha) == set(P.colours.colours)
    inverse = {}
    for c, d in alpha.items():
        assert d in new_colours.colours
        assert d not in inverse, "colour map must be injective"
        inverse[d] = c
    cs = P.colours

    components = {}
    for t in _ordered_signatures_over(new_colours, P.max_arity):
        if all(c in inverse for c in t.inputs) and t.output in inverse:
            image = Signature(tuple(inverse[c] for c in t.inputs), inverse[t.output])
            stored, _ = sort_signature(cs, image)
            gset = P.components.get(stored)
            if gset is None or not gset.elements:
                continue
            group = stabilizer_subgroup(new_colours, t)
            action = {}
            for xi in group:
                xi_t = transport_permutation(cs, image, xi)
                action[xi] = {name: gset.act(name, xi_t) for name in gset.elements}
            components[t] = GSet(gset.elements, group, action)
    for d in new_colours.colours:
        if d not in inverse:
            sig = Signature((d,), d)
            components[sig] = GSet(("1",), stabilizer_subgroup(new_colours, sig),
                                   {Permutation.identity(1): {"1": "1"}})

    units = {}
    for d in new_colours.colours:
        units[d] = P.units[inverse[d]] if d in inverse else "1"
    out = Operad(new_colours, components, units, {}, P.max_arity)

    for t in components:
        if t.arity == 0:
            continue
        for ws in _signature_tuples(out, t.inputs, P.max_arity):
            e = tuple(itertools.chain.from_iterable(w.inputs for w in ws))
            rho_e = sorting_permutation(new_colours, e)
            table = {}
            if t.output in inverse and all(c in inverse for c in t.inputs):
                p_sig = Signature(tuple(inverse[c] for c in t.inputs),
                                  inverse[t.output])
                for x in components[t].elements:
                    for ys in itertools.product(*(components[w].elements for w in ws)):
                        inner = [Element(Signature(tuple(inverse[c] for c in w.inputs),
                                                   inverse[w.output]), y)
                                 for w, y in zip(ws, ys)]
                        try:
                            res = compose(P, Element(p_sig, x), inner)
                            value = act(P, res, rho_e).name
                        except TruncationError:
                            value = TRUNCATED
                        table[(x, ys)] = value
            else:
                # The only composable shapes outside the image are unit
                # against unit at a single new colour.
                assert t.arity == 1 and t.inputs == (t.output,)
                table[("1", ("1",))] = "1"
            out.gamma[(t, ws)] = table
    return out


def restrict_operad(P, keep) -> Operad:
    """The suboperad on the components whose ordered signature satisfies
    ``keep``; unit signatures must be kept and the composition tables
    must stay inside the kept components."""
    cs = P.colours
    for c in cs.colours:
        assert keep(Signature((c,), c)), "unit signatures must be kept"
    components = {sig: gset for sig, gset in P.components.items() if keep(sig)}
    gamma = {}
    for (s, us), table in P.gamma.items():
        if not keep(s) or not all(keep(u) for u in us):
            continue
        if s not in components or any(u not in components for u in us):
            continue
        e = tuple(itertools.chain.from_iterable(u.inputs for u in us))
        stored, _ = sort_signature(cs, Signature(e, s.output))
        sub = {}
        for (x, ys), value in table.items():
            if x not in components[s].elements:
                continue
            if any(y not in components[u].elements for u, y in zip(us, ys)):
                continue
            if value != TRUNCATED and not keep(stored):
                raise OperadError("restriction is not closed at %s" % (stored,))
            sub[(x, ys)] = value
        if sub:
            gamma[(s, us)] = sub
    return Operad(cs, components, dict(P.units), gamma, P.max_arity)
