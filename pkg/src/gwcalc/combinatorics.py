"""Partition enumeration and sign conventions for the curve-count recursions.

Two-vertex stable splittings come in a complex flavor (genus splits
g1 + g2 = g with a two-block partition of the marked points) and a real
flavor (a conjugate pair of genus-g' vertices plus a central genus-g0
vertex, 2g' + g0 = g, with a three-block partition).  The sign functions
implement the graded-commutativity bookkeeping: permutation signs count
inversions among odd-degree insertions, split signs count odd-odd
crossings of a two-block partition, and the real splitting weight
attaches a factor 2 per point on the doubled side.

Index sets are sorted lists/tuples of 1-based indices; ell is bounded by
64 so sets can be bitmask-encoded by callers that enumerate heavily.
"""

from __future__ import annotations

from collections import namedtuple
from itertools import product

MAX_POINTS = 64

StablePartition = namedtuple("StablePartition", ["g1", "g2", "I", "J"])
RealPartition = namedtuple("RealPartition", ["gp", "g0", "I", "J", "K"])


def _check_points(ell):
    if not (0 <= ell <= MAX_POINTS):
        raise ValueError("number of marked points must be in 0..%d" % MAX_POINTS)


def _as_sorted_tuple(indices):
    out = tuple(sorted(int(i) for i in indices))
    for i in out:
        if i < 1:
            raise ValueError("indices are 1-based, got %d" % i)
    if len(set(out)) != len(out):
        raise ValueError("repeated index in %r" % (indices,))
    return out


def _check_disjoint(*sets):
    seen = set()
    for s in sets:
        for i in s:
            if i in seen:
                raise ValueError("index sets overlap at %d" % i)
            seen.add(i)


def enumerate_partitions(g, ell):
    """All two-vertex splittings (g1, g2; I, J) of genus g with ell points.

    Complete and duplicate-free: (g+1) * 2**ell elements, ordered by
    (g1, I).
    """
    _check_points(ell)
    if g < 0:
        raise ValueError("genus must be nonnegative")
    out = []
    all_points = range(1, ell + 1)
    for g1 in range(g + 1):
        for mask in range(1 << ell):
            I = tuple(i for i in all_points if mask >> (i - 1) & 1)
            J = tuple(i for i in all_points if not mask >> (i - 1) & 1)
            out.append(StablePartition(g1, g - g1, I, J))
    out.sort(key=lambda p: (p.g1, p.I))
    return out

def enumerate_real_partitions(g, ell):
    """All real splittings (g', g0; I, J, K): 2g' + g0 = g, three blocks.

    Complete and duplicate-free: (g//2 + 1) * 3**ell elements.
    """
    _check_points(ell)
    if g < 0:
        raise ValueError("genus must be nonnegative")
    out = []
    for gp in range(g // 2 + 1):
        g0 = g - 2 * gp
        for placement in product((0, 1, 2), repeat=ell):
            blocks = ([], [], [])
            for i, w in enumerate(placement, start=1):
                blocks[w].append(i)
            out.append(RealPartition(gp, g0, tuple(blocks[0]),
                                     tuple(blocks[1]), tuple(blocks[2])))
    return out


def koszul_sign_permutation(perm, degs):
    """Sign of reordering graded insertions by the permutation perm.

    ``perm`` is a sequence with perm[i-1] = image of slot i (1-based,
    a bijection of [ell]); ``degs`` are the cohomological degrees in the
    original slot order.  Returns (-1)**(number of inversions i < j,
    perm[i] > perm[j], with both degrees odd).
    """
    ell = len(perm)
    if sorted(perm) != list(range(1, ell + 1)):
        raise ValueError("not a permutation of 1..%d: %r" % (ell, perm))
    if len(degs) != ell:
        raise ValueError("degree vector has wrong length")
    exp = 0
    for i in range(ell):
        if degs[i] % 2 == 0:
            continue
        for j in range(i + 1, ell):
            if degs[j] % 2 and perm[i] > perm[j]:
                exp += 1
    return -1 if exp % 2 else 1


def split_exponent(I, J, degs):
    """Inversion count of the two-block split: odd-odd pairs i in I, j in J
    with i > j.  Returned as an integer exponent for callers that add
    several exponents before collapsing to a sign."""
    I = _as_sorted_tuple(I)
    J = _as_sorted_tuple(J)
    _check_disjoint(I, J)
    exp = 0
    for i in I:
        if degs[i - 1] % 2 == 0:
            continue
        for j in J:
            if i > j and degs[j - 1] % 2:
                exp += 1
    return exp


def split_sign(I, J, degs):
    """(-1)**split_exponent(I, J, degs): the sign of pulling the block I
    in front of the block J out of the interleaved original order."""
    return -1 if split_exponent(I, J, degs) % 2 else 1


def eps_n(P, n):
    """Dimension-dependent exponent of a two-vertex splitting.

    (n-1)/2 * (g1-1) * (g2-1) for odd n; returned as an integer so it can
    be combined additively with the split exponent.
    """
    if n % 2 == 0:
        raise ValueError("eps_n is defined for odd n only")
    return (n - 1) // 2 * (P.g1 - 1) * (P.g2 - 1)


def eps_n_mu(P, n, degs, mu_J_degree):
    """Full splitting exponent: eps_n(P) + split inversions + (g1-1)|mu_J|."""
    return (eps_n(P, n) + split_exponent(P.I, P.J, degs)
            + (P.g1 - 1) * int(mu_J_degree))


def real_wdvv_weight(I, J, degs):
    """Weight of a real two-block splitting: (-1)**exponent * 2**|J|.

    I is the central-side block, J the doubled-side block; I and J must
    partition [ell].  The factor 2 per doubled-side point accounts for
    the two placements of each such point on the conjugate pair.
    """
    I = _as_sorted_tuple(I)
    J = _as_sorted_tuple(J)
    _check_disjoint(I, J)
    if set(I) | set(J) != set(range(1, len(degs) + 1)):
        raise ValueError("I and J must partition 1..%d" % len(degs))
    sign = split_sign(I, J, degs)
    return sign * (1 << len(J))


def order_bijection(I, J):
    """Order-preserving bijection [|I ⊔ J|] -> I ⊔ J as a dict."""
    I = _as_sorted_tuple(I)
    J = _as_sorted_tuple(J)
    _check_disjoint(I, J)
    merged = sorted(I + J)
    return {k + 1: v for k, v in enumerate(merged)}


def sort_insertions_sign(items, deg_of):
    """Stable-sort ``items`` and count the odd-odd crossings of the sort.

    ``deg_of`` maps an item to its cohomological degree.  Returns
    (sorted_items, sign) where sign is the Koszul sign of the reordering
    (insertion sort; each adjacent swap of two odd-degree items flips the
    sign).  Used by key canonicalization.
    """
    items = list(items)
    exp = 0
    # insertion sort, counting crossings of odd-degree pairs exactly
    for i in range(1, len(items)):
        cur = items[i]
        cur_odd = deg_of(cur) % 2
        j = i - 1
        while j >= 0 and items[j] > cur:
            items[j + 1] = items[j]
            if cur_odd and deg_of(items[j]) % 2:
                exp += 1
            j -= 1
        items[j + 1] = cur
    return items, (-1 if exp % 2 else 1)
