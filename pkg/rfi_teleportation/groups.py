"""
DESCRIPTION:
    Finite permutation groups, their subgroups up to conjugacy, and G-sets
    (coset spaces, disjoint unions, user actions).

    Group elements are stored as rows of an integer array in breadth-first
    order from the identity (index 0). Generator s applied to element x gives
    the element s*x; every (x, s) edge of that search is kept, so anything
    defined on generators (matrices, set actions) can be extended along the
    words and checked against every relation of the group.

COMMENTS:
    Composition convention: (p*q)(i) = p[q[i]], i.e. q acts first.
"""

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from rfi_teleportation.config import ELEMENT_CAP
from rfi_teleportation.errors import GroupTooLargeError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """
    A bijection of {0..degree-1}, given by its image array.

    Attributes:
    - images: tuple of 0-indexed images.
    """
    images: tuple

    def __post_init__(self):
        if not all(isinstance(i, (int, np.integer)) and not isinstance(i, bool) for i in self.images):
            raise ValidationError(f"Error: permutation images must be integers, got {list(self.images)}.")
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValidationError(f"Error: {list(self.images)} is not a bijection on 0..{len(images) - 1}.")
        object.__setattr__(self, 'images', images)

    @classmethod
    def identity(cls, degree):
        return cls(tuple(range(degree)))

    @property
    def degree(self):
        return len(self.images)

    def __mul__(self, other):
        if other.degree != self.degree:
            raise ValidationError("Error: cannot compose permutations of different degree.")
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self):
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))


class PermGroup:
    """
    A finite group of permutations, closed from its generators.

    Attributes:
    - degree: number of points acted on.
    - generators: list of Permutation.
    - name: optional label.
    - perms: (order, degree) integer array, breadth-first element order.
    - parent, parent_generator: the breadth-first tree; element y equals
      generators[parent_generator[y]] * element parent[y].
    - edges: (order, n_generators) array, edges[x, s] = index of generators[s] * x.
    """

    def __init__(self, degree, generators, name=None, cap=ELEMENT_CAP):
        if degree < 1:
            raise ValidationError(f"Error: degree must be >= 1, got {degree}.")
        gens = [g if isinstance(g, Permutation) else Permutation(tuple(g)) for g in generators]
        for g in gens:
            if g.degree != degree:
                raise ValidationError(f"Error: generator {list(g.images)} has degree {g.degree}, expected {degree}.")
        self.degree = degree
        self.generators = gens
        self.name = name
        self.cap = cap
        self._close()

    def _close(self):
        gens = np.array([g.images for g in self.generators], dtype=np.int64).reshape(len(self.generators), self.degree)
        rows = [np.arange(self.degree, dtype=np.int64)]
        index = {rows[0].tobytes(): 0}
        parent = [-1]
        parent_generator = [-1]
        edges = []
        queue = deque([0])
        while queue:
            x = queue.popleft()
            row = []
            for s in range(len(gens)):
                y = gens[s][rows[x]]
                key = y.tobytes()
                if key not in index:
                    if len(rows) >= self.cap:
                        raise GroupTooLargeError(f"Error: group closure exceeds the element cap of {self.cap}.")
                    index[key] = len(rows)
                    rows.append(y)
                    parent.append(x)
                    parent_generator.append(s)
                    queue.append(index[key])
                row.append(index[key])
            edges.append(row)
        self.perms = np.array(rows, dtype=np.int64)
        self._index = index
        self.parent = np.array(parent)
        self.parent_generator = np.array(parent_generator)
        self.edges = np.array(edges, dtype=np.int64).reshape(len(rows), len(gens))
        if math.factorial(self.degree) % self.order != 0:
            raise ValidationError(f"Error: order {self.order} does not divide {self.degree}!.")
        logger.debug(f"Closed group {self.label} of order {self.order}")

    @property
    def order(self):
        return len(self.perms)

    @property
    def label(self):
        return self.name or f"<group of order {self.order} on {self.degree} points>"

    def element(self, i):
        return Permutation(tuple(self.perms[i]))

    def index_of(self, perm):
        images = perm.images if isinstance(perm, Permutation) else perm
        key = np.asarray(images, dtype=np.int64).tobytes()
        if key not in self._index:
            raise ValidationError(f"Error: {list(images)} is not an element of {self.label}.")
        return self._index[key]

    def product(self, i, j):
        """Index of element i * element j."""
        return self._index[self.perms[i][self.perms[j]].tobytes()]

    @cached_property
    def inverses(self):
        inv = np.empty_like(self.perms)
        inv[np.arange(self.order)[:, None], self.perms] = np.arange(self.degree)
        return np.array([self._index[row.tobytes()] for row in inv])

    @cached_property
    def multiplication_table(self):
        table = np.empty((self.order, self.order), dtype=np.int64)
        for i in range(self.order):
            composed = self.perms[i][self.perms]
            table[i] = [self._index[row.tobytes()] for row in composed]
        return table

    @cached_property
    def conjugacy_classes(self):
        return conjugacy_classes(self)

    @cached_property
    def class_of(self):
        owner = np.empty(self.order, dtype=np.int64)
        for c, members in enumerate(self.conjugacy_classes):
            owner[list(members)] = c
        return owner

    @property
    def class_representatives(self):
        return [members[0] for members in self.conjugacy_classes]

    def extend_along_words(self, generator_values, combine, identity, equal):
        """
        Extends a map given on generators to every element and checks it on every edge.

        Parameters:
        - generator_values: one value per generator.
        - combine: combine(generator_value, element_value) -> value of generator * element.
        - identity: value at the identity.
        - equal: equal(a, b) -> bool, used to check each relation.

        Returns:
        - values: list indexed by element, and the list of (x, s) edges that failed.
        """
        values = [identity]
        for y in range(1, self.order):
            values.append(combine(generator_values[self.parent_generator[y]], values[self.parent[y]]))
        failures = []
        for x in range(self.order):
            for s in range(len(self.generators)):
                if not equal(combine(generator_values[s], values[x]), values[self.edges[x, s]]):
                    failures.append((x, s))
        return values, failures

    def same_as(self, other):
        return self is other or (
            self.degree == other.degree and self.order == other.order
            and np.array_equal(self.perms, other.perms))


def make_group(degree, generators, name=None, cap=ELEMENT_CAP):
    """
    Closes the generators to a permutation group.

    Parameters:
    - degree: number of points.
    - generators: list of Permutation or image lists.
    - name: optional label.
    - cap: element cap. Default: ELEMENT_CAP.

    Returns:
    - PermGroup in breadth-first element order.
    """
    group = PermGroup(degree, generators, name=name, cap=cap)
    logger.info(f"Group {group.label}: order {group.order}, {len(group.generators)} generators")
    return group


def conjugacy_classes(G):
    """Conjugacy classes as sorted index tuples, ordered by minimal element (identity first)."""
    seen = np.zeros(G.order, dtype=bool)
    gen_rows = G.perms[[G.index_of(g) for g in G.generators]] if G.generators else np.empty((0, G.degree), dtype=np.int64)
    gen_inv = np.empty_like(gen_rows)
    for s, row in enumerate(gen_rows):
        gen_inv[s][row] = np.arange(G.degree)
    classes = []
    for g in range(G.order):
        if seen[g]:
            continue
        members = {g}
        queue = deque([g])
        # conjugation orbit under the generators is the full class
        while queue:
            x = queue.popleft()
            for s in range(len(gen_rows)):
                y = G._index[gen_rows[s][G.perms[x][gen_inv[s]]].tobytes()]
                if y not in members:
                    members.add(y)
                    queue.append(y)
        seen[list(members)] = True
        classes.append(tuple(sorted(members)))
    return classes


def brute_force_conjugacy_classes(G):
    """Conjugacy classes by conjugating with every element; slow reference version."""
    mul = G.multiplication_table
    inv = G.inverses
    classes = {}
    for g in range(G.order):
        members = tuple(sorted({int(mul[mul[h, g], inv[h]]) for h in range(G.order)}))
        classes[members] = True
    return sorted(classes, key=lambda c: c[0])


@dataclass(frozen=True)
class Subgroup:
    """
    A subgroup, stored as sorted element indices into the parent's element order.
    """
    group: PermGroup = field(repr=False, compare=False)
    members: tuple

    @property
    def order(self):
        return len(self.members)

    def __contains__(self, element):
        return element in set(self.members)


def make_subgroup(G, members):
    """Validates closure of the given element indices and wraps them as a Subgroup."""
    members = tuple(sorted({int(m) for m in members}))
    if not members or members[0] != 0:
        raise ValidationError("Error: a subgroup must contain the identity.")
    if any(m < 0 or m >= G.order for m in members):
        raise ValidationError("Error: subgroup member index out of range.")
    member_set = set(members)
    for a in members:
        if int(G.inverses[a]) not in member_set:
            raise ValidationError("Error: subgroup is not closed under inverses.")
        for b in members:
            if G.product(a, b) not in member_set:
                raise ValidationError("Error: subgroup is not closed under composition.")
    return Subgroup(G, members)


def _closure(mul, generators):
    members = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in generators:
            y = int(mul[s, x])
            if y not in members:
                members.add(y)
                queue.append(y)
    return frozenset(members)


def _check_cap(G, cap):
    if G.order > cap:
        raise GroupTooLargeError(f"Error: group order {G.order} exceeds the cap of {cap}.")


def all_subgroups(G, cap=ELEMENT_CAP):
    """
    Every subgroup of G: cyclic subgroups, closed under joins with cyclic
    subgroups until nothing new appears. Every subgroup is a join of cyclic ones.
    """
    _check_cap(G, cap)
    mul = G.multiplication_table
    cyclic = {}
    for g in range(G.order):
        cyclic.setdefault(_closure(mul, [g]), g)
    found = {members: [gen] for members, gen in cyclic.items()}
    frontier = list(found)
    while frontier:
        fresh = []
        for members in frontier:
            for cyc, gen in cyclic.items():
                if cyc <= members:
                    continue
                gens = found[members] + [gen]
                joined = _closure(mul, gens)
                if joined not in found:
                    found[joined] = gens
                    fresh.append(joined)
        frontier = fresh
    return [Subgroup(G, tuple(sorted(m))) for m in found]


def exhaustive_subgroups(G, max_generators=3, cap=ELEMENT_CAP):
    """Closures of every set of at most max_generators elements; reference enumeration."""
    _check_cap(G, cap)
    mul = G.multiplication_table
    found = set()
    for k in range(max_generators + 1):
        for gens in itertools.combinations(range(G.order), k):
            found.add(_closure(mul, gens))
    return [Subgroup(G, tuple(sorted(m))) for m in found]


def conjugate_subgroup(G, H, g):
    """The subgroup g H g^-1."""
    mul = G.multiplication_table
    inv = int(G.inverses[g])
    return Subgroup(G, tuple(sorted(int(mul[mul[g, h], inv]) for h in H.members)))


def _canonical_conjugate(G, members):
    mul = G.multiplication_table
    inv = G.inverses
    idx = np.array(members)
    best = None
    for g in range(G.order):
        conj = tuple(sorted(mul[mul[g, idx], inv[g]].tolist()))
        if best is None or conj < best:
            best = conj
    return best


def subgroups_up_to_conjugacy(G, cap=ELEMENT_CAP):
    """
    One representative per conjugacy class of subgroups, ordered by size and
    then lexicographically. The representative is the lexicographically
    least member of its class.
    """
    representatives = {_canonical_conjugate(G, s.members) for s in all_subgroups(G, cap=cap)}
    ordered = sorted(representatives, key=lambda m: (len(m), m))
    logger.info(f"{G.label}: {len(ordered)} conjugacy classes of subgroups")
    return [Subgroup(G, m) for m in ordered]


@dataclass(frozen=True)
class GSet:
    """
    A finite set {0..size-1} with an action of a PermGroup.

    Attributes:
    - group: the acting group.
    - size: number of points.
    - action: (order, size) array, action[g] is the image array of element g.
    - provenance: 'coset-space(H)', 'disjoint-union', 'natural' or 'user'.
    """
    group: PermGroup = field(repr=False, compare=False)
    size: int
    action: np.ndarray = field(repr=False, compare=False)
    provenance: str = 'user'

    def image(self, g, x):
        return int(self.action[g, x])

    def generator_images(self):
        return [self.action[self.group.index_of(s)].tolist() for s in self.group.generators]


def gset_from_generator_images(G, images, size=None):
    """
    Builds a user G-set from the image permutation of each generator.

    Parameters:
    - G: PermGroup.
    - images: one image list per generator of G, all of a common length.
    - size: number of points, needed only when G has no generators.

    Returns:
    - GSet with provenance 'user'.
    """
    if len(images) != len(G.generators):
        raise ValidationError(f"Error: expected {len(G.generators)} generator images, got {len(images)}.")
    perms = [Permutation(tuple(img)) for img in images]
    if perms:
        size = perms[0].degree
    elif size is None:
        raise ValidationError("Error: a group without generators needs the G-set size given explicitly.")
    if any(p.degree != size for p in perms):
        raise ValidationError("Error: generator images have different sizes.")
    rows = [np.array(p.images, dtype=np.int64) for p in perms]
    values, failures = G.extend_along_words(
        rows,
        combine=lambda s, x: s[x],
        identity=np.arange(size, dtype=np.int64),
        equal=np.array_equal,
    )
    if failures:
        raise ValidationError(f"Error: generator images violate {len(failures)} group relations.")
    return GSet(G, size, np.array(values, dtype=np.int64).reshape(G.order, size), 'user')


def natural_gset(G):
    """The defining action of G on its degree points."""
    return GSet(G, G.degree, G.perms.copy(), 'natural')


def coset_space(G, H):
    """
    The coset space G/H with G acting by left multiplication.

    Cosets are ordered by their minimal member index.
    """
    if not isinstance(H, Subgroup) or not H.group.same_as(G):
        raise ValidationError("Error: H is not a subgroup of G.")
    H = make_subgroup(G, H.members)
    coset_of = np.full(G.order, -1, dtype=np.int64)
    representatives = []
    for x in range(G.order):
        if coset_of[x] >= 0:
            continue
        for h in H.members:
            coset_of[G.product(x, h)] = len(representatives)
        representatives.append(x)
    action = np.empty((G.order, len(representatives)), dtype=np.int64)
    for g in range(G.order):
        action[g] = [coset_of[G.product(g, r)] for r in representatives]
    return GSet(G, len(representatives), action, f'coset-space({list(H.members)})')


def disjoint_union(X, Y):
    """The disjoint union X ⊔ Y; Y's points are shifted by |X|."""
    if not X.group.same_as(Y.group):
        raise ValidationError("Error: cannot take the disjoint union of G-sets over different groups.")
    action = np.concatenate([X.action, Y.action + X.size], axis=1).astype(np.int64)
    return GSet(X.group, X.size + Y.size, action, 'disjoint-union')


def fixed_point_count(X, g):
    """Number of points x with g.x = x."""
    return int(np.count_nonzero(X.action[g] == np.arange(X.size)))


def orbit_count(X):
    """Burnside: the average number of fixed points."""
    total = sum(fixed_point_count(X, g) for g in range(X.group.order))
    return total / X.group.order


def orbits(X):
    """Orbits of the action, each a sorted list, ordered by minimal point."""
    seen = np.zeros(X.size, dtype=bool)
    result = []
    for x in range(X.size):
        if not seen[x]:
            members = sorted(set(X.action[:, x].tolist()))
            seen[members] = True
            result.append(members)
    return result


def _orbit_map(X, x0, Y, y0):
    mapping = {}
    for g in range(X.group.order):
        a, b = int(X.action[g, x0]), int(Y.action[g, y0])
        if mapping.setdefault(a, b) != b:
            return None
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def are_isomorphic(X, Y):
    """
    Searches for a relabeling of X onto Y commuting with the action.

    Returns:
    - the relabeling as a list (point of X -> point of Y), or None.
    """
    if X.size != Y.size or not X.group.same_as(Y.group):
        return None
    x_orbits, y_orbits = orbits(X), orbits(Y)
    if sorted(map(len, x_orbits)) != sorted(map(len, y_orbits)):
        return None

    def search(i, used, mapping):
        if i == len(x_orbits):
            return mapping
        x0 = x_orbits[i][0]
        for j, orbit in enumerate(y_orbits):
            if j in used or len(orbit) != len(x_orbits[i]):
                continue
            for y0 in orbit:
                partial = _orbit_map(X, x0, Y, y0)
                if partial is None:
                    continue
                found = search(i + 1, used | {j}, {**mapping, **partial})
                if found is not None:
                    return found
        return None

    mapping = search(0, frozenset(), {})
    if mapping is None:
        return None
    return [mapping[x] for x in range(X.size)]


### NAMED GROUPS ###
def cyclic_group(n):
    return make_group(n, [[(i + 1) % n for i in range(n)]] if n > 1 else [], name=f'Z{n}')


def symmetric_group(n):
    if n == 1:
        return make_group(1, [], name='S1')
    if n == 2:
        return make_group(2, [[1, 0]], name='S2')
    transposition = [1, 0] + list(range(2, n))
    cycle = [(i + 1) % n for i in range(n)]
    return make_group(n, [transposition, cycle], name=f'S{n}')


def dihedral_group(n):
    """Symmetries of a regular n-gon, order 2n."""
    rotation = [(i + 1) % n for i in range(n)]
    reflection = [(n - 1 - i) % n for i in range(n)]
    return make_group(n, [rotation, reflection], name=f'D{2 * n}')


def quaternion_group():
    """Q8 acting on itself by left multiplication; point 2*u + sign encodes (+-1) * unit u in (1, i, j, k)."""
    unit_products = {
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    }

    def left_multiplication(a):
        images = []
        for point in range(8):
            u, negative = divmod(point, 2)
            sign, unit = unit_products[(a, u)]
            images.append(2 * unit + (negative ^ (sign < 0)))
        return images

    return make_group(8, [left_multiplication(1), left_multiplication(2)], name='Q8')
