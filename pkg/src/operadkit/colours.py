"""Colour sets, signatures and permutations.

A colour set is a finite linearly ordered set of names.  A signature
records the input colours and the output colour of an operation; it is
ordered when the inputs are non-decreasing in the colour order.  Ordered
signatures index the stored components of collections and operads; the
component at an arbitrary signature is recovered by transporting along
the sorting permutation.

Permutations are written in one-line notation with 1-based values and
compose like functions: ``(s * t)(i) == s(t(i))``.  Tuples carry a right
action ``permute_tuple(d, s)[i] == d[s(i)]``, so acting by ``s`` then
``t`` equals acting by ``s * t``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


class ColourError(ValueError):
    """Raised when a colour or signature is used inconsistently."""


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of {1, ..., n} in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        assert sorted(self.images) == list(range(1, n + 1)), self.images
        object.__setattr__(self, "_hash", hash(self.images))

    def __hash__(self):
        # Permutations are hashed constantly as table keys; the cached
        # value avoids rehashing the images tuple on every lookup.
        return self._hash

    @classmethod
    @lru_cache(maxsize=None)
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Function composition: apply ``other`` first, then ``self``."""
        assert self.degree == other.degree
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        # Inverses recur on the shared objects handed out by the cached
        # constructors, so the result is stashed on the instance.
        inv = getattr(self, "_inv", None)
        if inv is None:
            images = [0] * self.degree
            for i, j in enumerate(self.images, start=1):
                images[j - 1] = i
            inv = Permutation(tuple(images))
            object.__setattr__(self, "_inv", inv)
            object.__setattr__(inv, "_inv", self)
        return inv

    def is_identity(self) -> bool:
        return all(j == i for i, j in enumerate(self.images, start=1))

    def permute_tuple(self, d: tuple) -> tuple:
        """Right action on tuples: position i of the result is d[s(i)]."""
        assert len(d) == self.degree
        return tuple(d[j - 1] for j in self.images)


def all_permutations(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation(p) for p in itertools.permutations(range(1, n + 1)))


def adjacent_transpositions(n: int) -> tuple[Permutation, ...]:
    """The permutations swapping positions i and i + 1; they generate
    the full symmetric group."""
    out = []
    for i in range(1, n):
        images = list(range(1, n + 1))
        images[i - 1], images[i] = images[i], images[i - 1]
        out.append(Permutation(tuple(images)))
    return tuple(out)


@lru_cache(maxsize=None)
def block_permutation(sigma: Permutation, sizes: tuple[int, ...]) -> Permutation:
    """The permutation moving whole blocks of the given sizes by ``sigma``.

    For a tuple u split into consecutive blocks u(1), ..., u(n) of the
    given sizes, ``permute_tuple(u, block_permutation(sigma, sizes))`` is
    the concatenation u(sigma(1)), ..., u(sigma(n)).
    """
    assert sigma.degree == len(sizes)
    offsets = [0]
    for size in sizes:
        offsets.append(offsets[-1] + size)
    images = []
    for i in range(1, sigma.degree + 1):
        m = sigma(i)
        images.extend(range(offsets[m - 1] + 1, offsets[m] + 1))
    return Permutation(tuple(images))

@lru_cache(maxsize=None)
def block_sum(perms: tuple[Permutation, ...]) -> Permutation:
    """The block-diagonal permutation acting as perms[i] on the i-th block."""
    images = []
    offset = 0
    for p in perms:
        images.extend(offset + j for j in p.images)
        offset += p.degree
    return Permutation(tuple(images))


@dataclass(frozen=True)
class ColourSet:
    """A finite linearly ordered set of colour names.

    Names may be strings, integers, or tuples of such, as long as all
    names in one set sort against each other.
    """

    colours: tuple

    def __post_init__(self):
        assert len(set(self.colours)) == len(self.colours), "duplicate colours"

    @classmethod
    def lexicographic(cls, names) -> "ColourSet":
        return cls(tuple(sorted(names)))

    def __contains__(self, colour: str) -> bool:
        return colour in self.colours

    def __len__(self) -> int:
        return len(self.colours)

    def index(self, colour: str) -> int:
        try:
            return self.colours.index(colour)
        except ValueError:
            raise ColourError("unknown colour %r" % (colour,)) from None

    def check_signature(self, sig: "Signature") -> None:
        for c in sig.inputs + (sig.output,):
            if c not in self:
                raise ColourError("unknown colour %r in %s" % (c, sig))


@dataclass(frozen=True, order=True)
class Signature:
    """Input colours and output colour of an operation."""

    inputs: tuple
    output: object

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.inputs, self.output)))

    def __hash__(self):
        # Signatures key every component and composition table; caching
        # the hash keeps those lookups cheap.
        return self._hash

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def is_ordered(self, colour_set: ColourSet) -> bool:
        keys = [colour_set.index(c) for c in self.inputs]
        return all(a <= b for a, b in zip(keys, keys[1:]))

    def permute(self, sigma: Permutation) -> "Signature":
        return Signature(sigma.permute_tuple(self.inputs), self.output)

    def __str__(self) -> str:
        return "(%s; %s)" % (", ".join(str(c) for c in self.inputs), self.output)


@lru_cache(maxsize=None)
def sort_signature(colour_set: ColourSet, sig: Signature) -> tuple[Signature, Permutation]:
    """Stable-sort the inputs of ``sig`` into colour order.

    Returns the ordered signature together with the sorting permutation
    rho, with ``sig.permute(rho) == sorted`` and equal colours kept in
    their original relative order.  The stable choice makes rho the
    canonical coset representative used for stored composition tables.
    The result is cached: sorting shows up on every composition, and
    the cache also makes repeated calls return identical objects.
    """
    colour_set.check_signature(sig)
    rho = sorting_permutation(colour_set, sig.inputs)
    return sig.permute(rho), rho


@lru_cache(maxsize=None)
def sorting_permutation(colour_set: ColourSet, inputs: tuple) -> Permutation:
    order = sorted(range(len(inputs)), key=lambda i: (colour_set.index(inputs[i]), i))
    return Permutation(tuple(i + 1 for i in order))


@lru_cache(maxsize=None)
def _stabilizer(indices: tuple[int, ...]) -> tuple[Permutation, ...]:
    n = len(indices)
    perms = []
    for p in itertools.permutations(range(1, n + 1)):
        if all(indices[p[i] - 1] == indices[i] for i in range(n)):
            perms.append(Permutation(p))
    return tuple(perms)


def stabilizer_subgroup(colour_set: ColourSet, sig: Signature) -> tuple[Permutation, ...]:
    """All permutations fixing the input colour tuple of ``sig``.

    For an ordered signature these are exactly the permutations sigma
    with c_{sigma(1)} <= ... <= c_{sigma(n)}; the order of the group is
    the product of the factorials of the colour multiplicities.
    """
    colour_set.check_signature(sig)
    return _stabilizer(tuple(colour_set.index(c) for c in sig.inputs))
