"""Permutation groups with stabiliser chains, words and presentations.

Permutations on ``{0, ..., n-1}`` are tuples of images; composition is
left-to-right, so ``(p * q)(i) = q[p[i]]`` and points are acted on from the
right: ``i ^ (pq) = (i ^ p) ^ q``.

:class:`PermGroup` keeps a base and strong generating set built by a
deterministic Schreier-Sims procedure.  Every strong generator carries a
word in the original generators, every transversal element a word in the
strong generators, so that any group element can be rewritten as a word in
the original generators (:meth:`PermGroup.express`) and a finite
presentation on the strong generators can be read off the stabiliser chain
(:meth:`PermGroup.presentation`).

Heavier operations (conjugacy of subgroups, normalisers, centralisers) work
on the full element table of the group held as a numpy array; on groups of
the sizes treated here (up to tens of thousands of elements of small
degree) a vectorised scan over all elements beats a backtrack search by a
wide margin and has no tuning knobs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm
from random import Random

import numpy as np

# ---------------------------------------------------------------------------
# permutations as tuples


def pident(n):
    return tuple(range(n))


def pmul(p, q):
    """Compose left-to-right: apply p, then q."""
    return tuple(q[i] for i in p)


def pinv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def pconj(p, g):
    """g^-1 p g (the conjugate of p by g, acting after relabelling by g)."""
    gi = pinv(g)
    return tuple(g[p[gi[i]]] for i in range(len(p)))


def pcommutator(a, b):
    return pmul(pmul(pinv(a), pinv(b)), pmul(a, b))


def cycle_type(p):
    n = len(p)
    seen = [False] * n
    out = []
    for i in range(n):
        if not seen[i]:
            ln = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                ln += 1
            out.append(ln)
    return tuple(sorted(out, reverse=True))


def porder(p):
    return lcm(*cycle_type(p))


def is_identity(p):
    return all(i == j for i, j in enumerate(p))


# ---------------------------------------------------------------------------
# words


def word_inverse(word):
    return tuple((i, -e) for i, e in reversed(word))


def word_free_reduce(word):
    out = []
    for i, e in word:
        if out and out[-1][0] == i and out[-1][1] == -e:
            out.pop()
        else:
            out.append((i, e))
    return tuple(out)


def word_evaluate(word, gens, inverses=None):
    """Evaluate a word (pairs ``(index, +-1)``) in the given permutations."""
    n = len(gens[0]) if gens else 0
    out = pident(n)
    for i, e in word:
        g = gens[i] if e > 0 else (
            inverses[i] if inverses is not None else pinv(gens[i]))
        out = pmul(out, g)
    return out


# ---------------------------------------------------------------------------
# element tables


def _as_table(rows, degree):
    dtype = np.uint8 if degree <= 255 else np.uint16
    return np.array(rows, dtype=dtype).reshape(-1, degree)


class ElementTable:
    """All elements of a group as a lexicographically sorted numpy array.

    Provides O(log n) membership via a void view over contiguous rows, and
    vectorised composition and conjugation over the whole table.
    """

    def __init__(self, rows, degree):
        t = _as_table(rows, degree)
        order = np.lexsort(t.T[::-1])
        self.table = np.ascontiguousarray(t[order])
        self.degree = degree
        self._void = self.table.view(
            np.dtype((np.void, self.table.dtype.itemsize * degree))).ravel()

    def __len__(self):
        return self.table.shape[0]

    def _rows_void(self, rows):
        rows = np.ascontiguousarray(rows.astype(self.table.dtype))
        return rows.view(
            np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()

    def index_of(self, rows):
        """Sorted-table indices of the given rows (must all be members)."""
        v = self._rows_void(np.atleast_2d(np.asarray(rows)))
        idx = np.searchsorted(self._void, v)
        if (idx >= len(self)).any() or (self._void[idx] != v).any():
            raise KeyError("row is not an element of the group")
        return idx

    def contains_rows(self, rows):
        v = self._rows_void(np.atleast_2d(np.asarray(rows)))
        idx = np.searchsorted(self._void, v)
        ok = idx < len(self)
        ok[ok] = self._void[idx[ok]] == v[ok]
        return ok

    def perm(self, i):
        return tuple(int(x) for x in self.table[i])

    def compose_all(self, p):
        """Table of x * p for every row x (apply x then p)."""
        p = np.asarray(p, dtype=self.table.dtype)
        return p[self.table]

    def conjugate_all(self, p):
        """Table of g^-1 p g for every row g."""
        inv_rows = np.argsort(self.table, axis=1)
        p = np.asarray(p)
        return np.take_along_axis(self.table, p[inv_rows].astype(np.int64),
                                  axis=1)


# ---------------------------------------------------------------------------
# stabiliser chains


@dataclass
class _Level:
    point: int
    gen_indices: list          # indices into the strong generator list
    orbit: dict                # point -> transversal perm (base -> point)
    orbit_words: dict          # point -> word in strong generator indices


class PermGroup:
    """A permutation group with a deterministic base and strong generating set.

    ``generators`` may contain duplicates or identities; they keep their
    indices for purposes of words, but only nontrivial ones enter the chain.
    """

    def __init__(self, generators, degree=None):
        generators = [tuple(g) for g in generators]
        if degree is None:
            if not generators:
                raise ValueError("need a degree for the trivial group")
            degree = len(generators[0])
        for g in generators:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of 0..{degree - 1}: {g}")
        self.degree = degree
        self.generators = generators
        self.base = []
        self.sgens = []            # strong generators (permutations)
        self.sgen_words = []       # words in original generators
        self.levels = []
        self._build()
        self._cache = {}

    # -- construction ------------------------------------------------------

    def _sgen_level(self, p):
        """Deepest level whose base prefix the permutation fixes."""
        for i, b in enumerate(self.base):
            if p[b] != b:
                return i
        return len(self.base)

    def _add_base_point(self, moved):
        self.base.append(moved)
        self.levels.append(_Level(moved, [], {}, {}))

    def _rebuild_orbit(self, i):
        level = self.levels[i]
        level.gen_indices = [j for j, s in enumerate(self.sgens)
                             if self._sgen_level(s) >= i]
        b = level.point
        n = self.degree
        level.orbit = {b: pident(n)}
        level.orbit_words = {b: ()}
        frontier = [b]
        while frontier:
            new = []
            for pt in frontier:
                t = level.orbit[pt]
                w = level.orbit_words[pt]
                for j in level.gen_indices:
                    s = self.sgens[j]
                    img = s[pt]
                    if img not in level.orbit:
                        level.orbit[img] = pmul(t, s)
                        level.orbit_words[img] = w + ((j, 1),)
                        new.append(img)
            frontier = new

    def _strip(self, p, start=0):
        """Return (level, residue) of sifting from the given level down."""
        for i in range(start, len(self.levels)):
            level = self.levels[i]
            img = p[level.point]
            if img not in level.orbit:
                return i, p
            p = pmul(p, pinv(level.orbit[img]))
        return len(self.levels), p

    def _strip_word(self, p):
        """Word in strong generator indices for a member, deepest level first."""
        parts = []
        for level in self.levels:
            img = p[level.point]
            if img not in level.orbit:
                return None
            parts.append(level.orbit_words[img])
            p = pmul(p, pinv(level.orbit[img]))
        if not is_identity(p):
            return None
        out = ()
        for w in reversed(parts):
            out = out + w
        return out

    def _add_sgen(self, p, word):
        lvl = self._sgen_level(p)
        if lvl == len(self.base):
            moved = min(i for i in range(self.degree) if p[i] != i)
            self._add_base_point(moved)
        self.sgens.append(p)
        self.sgen_words.append(tuple(word))
        return self._sgen_level(p)

    def _strip_with_word(self, p, word, start):
        """Sift from ``start`` down, extending the strong-generator word.

        Returns ``(level, residue, word)`` where the word (in strong
        generator indices) evaluates to the residue.
        """
        for i in range(start, len(self.levels)):
            level = self.levels[i]
            img = p[level.point]
            if img not in level.orbit:
                return i, p, word
            word = word + word_inverse(level.orbit_words[img])
            p = pmul(p, pinv(level.orbit[img]))
        return len(self.levels), p, word

    def _build(self):
        for idx, g in enumerate(self.generators):
            if not is_identity(g):
                self._add_sgen(g, ((idx, 1),))
        if not self.base:
            return
        for i in range(len(self.levels)):
            self._rebuild_orbit(i)
        # verify levels bottom-up; a new strong generator at level l sends
        # the scan back down to l (deeper levels keep their generator sets
        # and stay verified)
        i = len(self.levels) - 1
        while i >= 0:
            self._rebuild_orbit(i)
            level = self.levels[i]
            restart = None
            for pt in sorted(level.orbit):
                t = level.orbit[pt]
                tw = level.orbit_words[pt]
                for j in level.gen_indices:
                    s = self.sgens[j]
                    img = s[pt]
                    schreier = pmul(pmul(t, s), pinv(level.orbit[img]))
                    word = tw + ((j, 1),) + word_inverse(
                        level.orbit_words[img])
                    lvl, res, word = self._strip_with_word(
                        schreier, word, i + 1)
                    if not is_identity(res):
                        self._add_sgen(res, self._expand_sgen_word(word))
                        for k in range(i + 1, len(self.levels)):
                            self._rebuild_orbit(k)
                        restart = len(self.levels) - 1 if lvl >= len(
                            self.levels) - 1 else lvl
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    def _expand_sgen_word(self, word):
        """Rewrite a word in strong generator indices into original ones."""
        out = ()
        for j, e in word:
            w = self.sgen_words[j]
            out = out + (w if e > 0 else word_inverse(w))
        return word_free_reduce(out)

    # -- basic queries -----------------------------------------------------

    @property
    def order(self):
        out = 1
        for level in self.levels:
            out *= len(level.orbit)
        return out

    @property
    def identity(self):
        return pident(self.degree)

    def __contains__(self, p):
        _, res = self._strip(tuple(p))
        return is_identity(res)

    def express(self, p):
        """A word in the original generators evaluating to ``p``.

        Returns ``None`` for non-members.
        """
        w = self._strip_word(tuple(p))
        if w is None:
            return None
        return self._expand_sgen_word(w)

    def express_sgens(self, p):
        """A word in the strong generators evaluating to ``p`` (or None)."""
        return self._strip_word(tuple(p))

    def chain_decomposition(self, p):
        """Transversal factorisation ``p = t[k-1] * ... * t[0]``.

        Returns a list of ``(level, point)`` pairs, deepest level first; the
        element equals the product of ``transversal(level, point)`` in that
        order.  Raises for non-members.
        """
        p = tuple(p)
        out = []
        for i, level in enumerate(self.levels):
            img = p[level.point]
            if img not in level.orbit:
                raise ValueError("not a member")
            out.append((i, img))
            p = pmul(p, pinv(level.orbit[img]))
        if not is_identity(p):
            raise ValueError("not a member")
        out.reverse()
        return [(i, pt) for i, pt in out if not is_identity(
            self.levels[i].orbit[pt])]

    def transversal(self, level, point):
        return self.levels[level].orbit[point]

    def transversal_word(self, level, point):
        """Word in strong generator indices for a transversal element."""
        return self.levels[level].orbit_words[point]

    def random_element(self, rng: Random):
        """Uniformly random element (product of random transversal picks)."""
        out = pident(self.degree)
        for level in reversed(self.levels):
            pts = sorted(level.orbit)
            out = pmul(out, level.orbit[pts[rng.randrange(len(pts))]])
        return out

    def subgroup(self, gens):
        return PermGroup(list(gens), self.degree)

    # -- element enumeration ----------------------------------------------

    def elements(self):
        """Iterate over all elements (no particular order)."""
        chains = [[level.orbit[pt] for pt in sorted(level.orbit)]
                  for level in reversed(self.levels)]
        if not chains:
            yield pident(self.degree)
            return
        for combo in itertools.product(*chains):
            out = combo[0]
            for t in combo[1:]:
                out = pmul(out, t)
            yield out

    def element_table(self) -> ElementTable:
        if 'table' not in self._cache:
            rows = np.array([pident(self.degree)],
                            dtype=np.uint8 if self.degree <= 255 else np.uint16)
            for level in reversed(self.levels):
                ts = [np.asarray(level.orbit[pt], dtype=rows.dtype)
                      for pt in sorted(level.orbit)]
                # all products rows[i] * t: apply the accumulated deeper
                # factors first, then the transversal element
                rows = np.concatenate([np.take(t, rows) for t in ts], axis=0)
            self._cache['table'] = ElementTable(rows, self.degree)
        return self._cache['table']

    # -- conjugacy of elements --------------------------------------------

    def conjugacy_classes(self):
        """List of (representative, size); canonical deterministic order.

        Representatives are the lexicographically smallest class members;
        classes are sorted by (element order, class size, representative).
        """
        if 'classes' not in self._cache:
            et = self.element_table()
            n = len(et)
            cls = np.full(n, -1, dtype=np.int64)
            gens = [g for g in self.generators if not is_identity(g)]
            conj_tables = []
            for g in gens:
                gi = pinv(g)
                garr = np.asarray(g, dtype=np.int64)
                giarr = np.asarray(gi, dtype=np.int64)
                conj_tables.append((garr, giarr))
            nclass = 0
            classes = []
            for start in range(n):
                if cls[start] >= 0:
                    continue
                members = [start]
                cls[start] = nclass
                frontier = np.array([start])
                while frontier.size:
                    rows = et.table[frontier]
                    new = []
                    for garr, giarr in conj_tables:
                        conj = garr[rows[:, giarr]]
                        idx = et.index_of(conj)
                        fresh = idx[cls[idx] < 0]
                        if fresh.size:
                            fresh = np.unique(fresh)
                            cls[fresh] = nclass
                            new.append(fresh)
                            members.extend(fresh.tolist())
                    frontier = np.concatenate(new) if new else np.array([])
                rep = et.perm(min(members))
                classes.append((rep, len(members)))
                nclass += 1
            order = sorted(range(nclass),
                           key=lambda i: (porder(classes[i][0]),
                                          classes[i][1], classes[i][0]))
            self._cache['classes'] = [classes[i] for i in order]
            relabel = {old: new for new, old in enumerate(order)}
            self._cache['class_index'] = np.array(
                [relabel[c] for c in cls.tolist()])
        return self._cache['classes']

    def class_index_of(self, p):
        """Index into :meth:`conjugacy_classes` of the class of ``p``."""
        self.conjugacy_classes()
        et = self.element_table()
        return int(self._cache['class_index'][et.index_of(
            np.asarray([p]))[0]])

    def exponent(self):
        return lcm(*[porder(rep) for rep, _ in self.conjugacy_classes()])

    # -- subgroup-level operations ----------------------------------------

    def centralizer_elements(self, p):
        et = self.element_table()
        parr = np.asarray(p, dtype=et.table.dtype)
        left = parr[et.table]                      # x then p... (g * p)
        right = np.take_along_axis(
            et.table, np.tile(np.asarray(p, dtype=np.int64),
                              (len(et), 1)), axis=1)  # p then g
        mask = (left == right).all(axis=1)
        return et.table[mask]

    def normalizer(self, sub: "PermGroup") -> "PermGroup":
        """N_G(H) via a vectorised scan of the whole element table."""
        et = self.element_table()
        ht = sub.element_table()
        inv_rows = np.argsort(et.table, axis=1)
        mask = np.ones(len(et), dtype=bool)
        for h in _generating_rows(sub):
            harr = np.asarray(h, dtype=np.int64)
            conj = np.take_along_axis(et.table, harr[inv_rows], axis=1)
            mask &= ht.contains_rows(conj)
        return group_from_elements(et.table[mask], self.degree)

    def conjugating_element(self, a: "PermGroup", b: "PermGroup"):
        """Some g in G with a^g = b (as subgroups), or None."""
        if a.order != b.order:
            return None
        g = self._conjugate_into_scan(a, b)
        return g

    def is_conjugate_subgroup(self, a, b):
        return self.conjugating_element(a, b) is not None

    def conjugate_into(self, a: "PermGroup", b: "PermGroup"):
        """Some g in G with a^g a subgroup of b, or None."""
        if b.order % a.order:
            return None
        return self._conjugate_into_scan(a, b)

    def _conjugate_into_scan(self, a, b):
        et = self.element_table()
        bt = b.element_table()
        inv_rows = np.argsort(et.table, axis=1)
        mask = np.ones(len(et), dtype=bool)
        for h in _generating_rows(a):
            harr = np.asarray(h, dtype=np.int64)
            conj = np.take_along_axis(et.table[mask], harr[inv_rows[mask]],
                                      axis=1)
            sub = bt.contains_rows(conj)
            idx = np.nonzero(mask)[0]
            mask[idx[~sub]] = False
            if not mask.any():
                return None
        i = int(np.nonzero(mask)[0][0])
        return et.perm(i)

    def is_conjugate_element(self, x, y) -> bool:
        if cycle_type(x) != cycle_type(y):
            return False
        return self.class_index_of(x) == self.class_index_of(y)

    # -- structure ---------------------------------------------------------

    def derived_subgroup(self) -> "PermGroup":
        gens = [g for g in self.generators if not is_identity(g)]
        seeds = [pcommutator(a, b) for a in gens for b in gens]
        return normal_closure(self, seeds)

    def solvable_residual(self) -> "PermGroup":
        cur = self
        while True:
            nxt = cur.derived_subgroup()
            if nxt.order == cur.order:
                return nxt
            cur = nxt

    def derived_length(self):
        cur = self
        length = 0
        while cur.order > 1:
            nxt = cur.derived_subgroup()
            if nxt.order == cur.order:
                return None  # not solvable
            cur = nxt
            length += 1
        return length

    def is_perfect(self):
        return self.order == self.derived_subgroup().order

    def is_solvable(self):
        return self.derived_length() is not None

    def is_nilpotent(self):
        """Definitional lower central series test."""
        cur = self
        while cur.order > 1:
            gens = [g for g in self.generators if not is_identity(g)]
            hgen = [h for h in cur.generators if not is_identity(h)]
            seeds = [pcommutator(g, h) for g in gens for h in hgen]
            nxt = normal_closure(self, seeds)
            if nxt.order == cur.order:
                return False
            cur = nxt
        return True

    # -- cosets ------------------------------------------------------------

    def coset_action(self, sub: "PermGroup"):
        """Action on right cosets of ``sub``; returns (PermGroup, labels).

        ``labels`` maps each element-table index of G to a coset number;
        coset 0 is the subgroup itself, numbering follows a breadth-first
        sweep by the generators in order.
        """
        et = self.element_table()
        index = self.order // sub.order
        labels = np.full(len(et), -1, dtype=np.int64)
        start = et.index_of(_as_table(list(_table_rows(sub)), self.degree))
        labels[start] = 0
        reps = [self.identity]
        frontier = [0]
        coset_rows = {0: start}
        ncoset = 1
        gen_list = [g for g in self.generators if not is_identity(g)]
        while frontier:
            new = []
            for c in frontier:
                rows = et.table[coset_rows[c]]
                for g in gen_list:
                    shifted = np.asarray(g, dtype=et.table.dtype)[rows]
                    idx = et.index_of(shifted)
                    if labels[idx[0]] < 0:
                        labels[idx] = ncoset
                        coset_rows[ncoset] = idx
                        reps.append(pmul(reps[c], g))
                        new.append(ncoset)
                        ncoset += 1
            frontier = new
        assert ncoset == index, "coset sweep did not reach every coset"
        action_gens = []
        for g in gen_list:
            images = []
            for c in range(ncoset):
                i = coset_rows[c][0]
                shifted = np.asarray(g, dtype=et.table.dtype)[
                    et.table[i]][None, :]
                images.append(int(labels[et.index_of(shifted)[0]]))
            action_gens.append(tuple(images))
        return PermGroup(action_gens, index), labels, reps

    # -- presentations -----------------------------------------------------

    def presentation(self) -> "Presentation":
        """A finite presentation on the strong generators.

        Relators come from the stabiliser chain: for every level, orbit
        point and level generator, the Schreier element ``t s t'^-1`` is
        rewritten through the deeper levels; the resulting relation words
        evaluate to the identity and present the group.
        """
        relators = []
        for i, level in enumerate(self.levels):
            for pt in sorted(level.orbit):
                t = level.orbit[pt]
                tw = level.orbit_words[pt]
                for j in level.gen_indices:
                    s = self.sgens[j]
                    img = s[pt]
                    schreier = pmul(pmul(t, s), pinv(level.orbit[img]))
                    word = tw + ((j, 1),) + word_inverse(
                        level.orbit_words[img])
                    rest = schreier
                    for k in range(i + 1, len(self.levels)):
                        lv = self.levels[k]
                        ipt = rest[lv.point]
                        word = word + word_inverse(lv.orbit_words[ipt])
                        rest = pmul(rest, pinv(lv.orbit[ipt]))
                    assert is_identity(rest), "chain failed to sift"
                    word = word_free_reduce(word)
                    if word:
                        relators.append(word)
        seen = set()
        unique = []
        for w in relators:
            if w not in seen:
                seen.add(w)
                unique.append(w)
        return Presentation(len(self.sgens), tuple(self.sgen_words),
                            tuple(unique))


@dataclass(frozen=True)
class Presentation:
    """Presentation on a group's strong generators.

    ``gen_words`` express each presentation generator as a word in the
    original generators of the group the presentation came from;
    ``relators`` are words in the presentation generators (indices into
    ``gen_words``).
    """

    ngens: int
    gen_words: tuple
    relators: tuple

    def abelianized_relator_matrix(self):
        """Exponent-sum matrix of the relators (rows) in the generators."""
        rows = []
        for w in self.relators:
            row = [0] * self.ngens
            for i, e in w:
                row[i] += e
            rows.append(row)
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.ngens)


# ---------------------------------------------------------------------------
# helpers on groups


def _table_rows(group: PermGroup):
    return group.element_table().table


def _generating_rows(group: PermGroup):
    gens = [g for g in group.generators if not is_identity(g)]
    return gens if gens else [group.identity]


def group_from_elements(rows, degree) -> PermGroup:
    """Subgroup generated (in fact constituted) by the given element rows.

    Keeps only generators that grow the group, so the resulting generating
    set is small; the rows are assumed to be closed under the group
    operations (they come from masked element-table scans).
    """
    gens = []
    cur = None
    target = len(rows)
    for r in np.asarray(rows):
        p = tuple(int(x) for x in r)
        if is_identity(p):
            continue
        if cur is None or p not in cur:
            gens.append(p)
            cur = PermGroup(gens, degree)
            if cur.order == target:
                break
    if cur is None:
        return PermGroup([], degree)
    assert cur.order == target, "rows were not closed"
    return cur


def normal_closure(ambient: PermGroup, seeds) -> PermGroup:
    """Smallest subgroup of ``ambient`` containing ``seeds`` and normal in it."""
    seeds = [tuple(s) for s in seeds if not is_identity(s)]
    if not seeds:
        return PermGroup([], ambient.degree)
    gens = []
    cur = PermGroup([], ambient.degree)
    queue = list(seeds)
    while queue:
        x = queue.pop(0)
        if x in cur:
            continue
        gens.append(x)
        cur = PermGroup(gens, ambient.degree)
        for g in _generating_rows(ambient):
            queue.append(pconj(x, g))
            queue.append(pconj(x, pinv(g)))
    return cur


def orbits(gens, degree):
    """Orbits of the group generated by ``gens`` on points."""
    seen = [False] * degree
    out = []
    for i in range(degree):
        if seen[i]:
            continue
        orb = [i]
        seen[i] = True
        frontier = [i]
        while frontier:
            new = []
            for pt in frontier:
                for g in gens:
                    img = g[pt]
                    if not seen[img]:
                        seen[img] = True
                        orb.append(img)
                        new.append(img)
            frontier = new
        out.append(sorted(orb))
    return out


def abelian_invariants(group: PermGroup):
    """Invariant factors of G/[G,G] via the abelianised presentation."""
    from . import intlinalg
    if group.order == 1:
        return intlinalg.TRIVIAL_GROUP
    pres = group.presentation()
    rel = pres.abelianized_relator_matrix()
    inv = intlinalg.quotient_invariants(pres.ngens, rel)
    assert inv.free_rank == 0, "abelianisation of a finite group must be finite"
    return inv
