"""Exhaustive checks of the splitting facts the grid and cube estimators rely on.

Grid fact: a two-dimensional box holding ``W >= 2`` points of ``S`` has a
sub-box holding between ``W/4`` and ``3W/4`` of them, found either as a cut
along one axis (a proper prefix or suffix of the coordinates on that axis)
or, when no such cut exists, inside a one-wide slab holding at least half of
the points: the slab itself, or a cut of the slab along the other axis.
Axis cuts alone are not enough: the five-point plus on a 3 x 3 box has
marginals ``(1, 3, 1)`` both ways, so every cut holds 1 or 4 points.
The estimator's own sample band only needs an axis cut whose smaller side
holds at least ``W/(4d)`` points, which :func:`grid_band_counterexamples`
checks separately.

Cube fact: a sub-cube holding ``W >= 2`` points has a sub-cube, obtained by
fixing its free coordinates in ascending order, holding between ``W/3`` and
``2W/3`` of them.

Both are checked independently of the estimator code. The grid check works
on marginals: whether a cut or slab works depends only on the row and
column sums, so every ``a x b`` box is covered by enumerating the failing
column-sum and row-sum vectors and asking (Gale-Ryser) whether some 0/1
matrix has both.
A direct enumeration over every point set on small boxes backs this up.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction

import numpy as np


def marginal_has_cut(sums, q: Fraction = Fraction(1, 4)) -> bool:
    """Some proper prefix of ``sums`` totals between ``q W`` and ``(1 - q) W``.

    A suffix cut holds the complement of a prefix cut, and the band is
    symmetric, so prefixes suffice.
    """
    total = sum(sums)
    acc = 0
    for v in sums[:-1]:
        acc += v
        if q * total <= acc <= (1 - q) * total:
            return True
    return False


def slab_fallback(sums) -> bool:
    """A one-wide slab, or a cut of it along the other axis, holds ``W/4 .. 3W/4``.

    A slab with ``c`` points in ``[W/4, 3W/4]`` works as is. With ``c > 3W/4``
    its points sit on distinct coordinates of the other axis, so its prefix
    counts step through every integer up to ``c``, and the band (width
    ``W/2 >= 1``) holds one of them.
    """
    total = sum(sums)
    return any(4 * c >= total for c in sums)


def _grid_fact(cols, rows) -> bool:
    return (marginal_has_cut(cols) or marginal_has_cut(rows)
            or slab_fallback(cols) or slab_fallback(rows))


def realizable(rows, cols) -> bool:
    """Gale-Ryser: is there a 0/1 matrix with these row and column sums?"""
    if sum(rows) != sum(cols):
        return False
    r = sorted(rows, reverse=True)
    for k in range(1, len(r) + 1):
        if sum(r[:k]) > sum(min(c, k) for c in cols):
            return False
    return True


def failing_marginals(length: int, cap: int, test) -> dict:
    """Vectors in ``{0..cap}^length`` with total >= 2 failing ``test``, grouped by
    ``(total, sorted vector)``."""
    out = defaultdict(list)
    for vec in itertools.product(range(cap + 1), repeat=length):
        total = sum(vec)
        if total >= 2 and not test(vec):
            out[(total, tuple(sorted(vec, reverse=True)))].append(vec)
    return out


def _marginal_search(max_side: int, test) -> list:
    found = []
    cache = {}
    for a in range(1, max_side + 1):  # columns (x extent)
        for b in range(1, max_side + 1):  # rows (y extent)
            if (a, b) not in cache:
                cache[(a, b)] = failing_marginals(a, b, test)
            if (b, a) not in cache:
                cache[(b, a)] = failing_marginals(b, a, test)
            for (wc, pc), cvecs in cache[(a, b)].items():
                for (wr, pr), rvecs in cache[(b, a)].items():
                    if wc == wr and realizable(pr, pc):
                        found.append((a, b, cvecs[0], rvecs[0]))
    return found


def grid_counterexamples_by_marginals(max_side: int = 6) -> list:
    """Boxes ``a x b`` (``a, b <= max_side``) holding a point set with no in-band
    cut or slab.

    Returns ``(a, b, column sums, row sums)`` witnesses; empty when the fact
    holds. Both marginals must fail, and a pair of failing marginals matters
    only if some point set has them.
    """
    return _marginal_search(max_side, lambda v: marginal_has_cut(v) or slab_fallback(v))


def axis_cut_counterexamples(max_side: int = 6) -> list:
    """Like :func:`grid_counterexamples_by_marginals` but with axis cuts only."""
    return _marginal_search(max_side, marginal_has_cut)


def grid_band_counterexamples(max_side: int = 6, d: int = 2) -> list:
    """Point sets with no axis cut whose smaller side holds at least ``W/(4d)`` points."""
    q = Fraction(1, 4 * d)
    return _marginal_search(max_side, lambda v: marginal_has_cut(v, q))


def grid_counterexamples_direct(max_side: int = 4, slabs: bool = True) -> list:
    """Enumerate every point set of every ``a x b`` box with ``a, b <= max_side``,
    counting points in each axis cut, slab and slab cut directly.

    With ``slabs=False`` only axis cuts count; each witness is ``(a, b, mask)``
    with bit ``y * a + x`` set for point ``(x, y)``, zero-based.
    """
    found = []
    for a in range(1, max_side + 1):
        for b in range(1, max_side + 1):
            cells = a * b
            masks = np.arange(1 << cells, dtype=np.int64)
            bits = ((masks[:, None] >> np.arange(cells)) & 1).reshape(-1, b, a)
            total = bits.sum(axis=(1, 2))
            tot = total[:, None]
            ok = np.zeros(masks.size, dtype=bool)
            for axis, length in ((2, a), (1, b)):
                marg = bits.sum(axis=3 - axis)
                prefix = np.cumsum(marg, axis=1)[:, : length - 1]
                ok |= ((4 * prefix >= tot) & (4 * prefix <= 3 * tot)).any(axis=1)
            # one-wide slabs and their cuts along the other axis
            for lines in ((bits, bits.transpose(0, 2, 1)) if slabs else ()):
                for k in range(lines.shape[2]):
                    line = lines[:, :, k]
                    whole = line.sum(axis=1)[:, None]
                    ok |= ((4 * whole >= tot) & (4 * whole <= 3 * tot)).any(axis=1)
                    pre = np.cumsum(line, axis=1)[:, :-1]
                    suf = whole - pre
                    for part in (pre, suf):
                        ok |= ((4 * part >= tot) & (4 * part <= 3 * tot)).any(axis=1)
            bad = np.flatnonzero((total >= 2) & ~ok)
            found.extend((a, b, int(m)) for m in bad)
    return found


def cube_counterexamples(d: int = 4) -> list:
    """Every sub-cube of ``{0,1}^d`` and every point set in it with at least two points."""
    found = []
    for pattern in itertools.product((None, 0, 1), repeat=d):
        free = sum(p is None for p in pattern)
        size = 1 << free
        masks = np.arange(1 << size, dtype=np.int64)
        # bit o of a mask = point with offset o; offset bits follow ascending free coordinates
        bits = (masks[:, None] >> np.arange(size)) & 1
        total = bits.sum(axis=1)
        ok = np.zeros(masks.size, dtype=bool)
        for t in range(1, free + 1):
            block = 1 << (free - t)
            counts = bits.reshape(-1, 1 << t, block).sum(axis=2)
            ok |= ((3 * counts >= total[:, None]) & (3 * counts <= 2 * total[:, None])).any(axis=1)
        bad = np.flatnonzero((total >= 2) & ~ok)
        found.extend((pattern, int(m)) for m in bad[:5])
    return found
