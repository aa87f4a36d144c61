"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names (:func:`pairwise_dissimilarity`, :func:`constrained_average_linkage`)
dispatch on :data:`lart._accel.USE_NUMBA`. Both flavours accumulate in the
same order per entry, so linkage results agree exactly on identical input;
dissimilarities agree to rounding (numpy uses pairwise summation).
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# --- dissimilarity ---------------------------------------------------------
#
# X is P^t with column c scaled by 1/sqrt(kappa_c). For rows a=(i,k), b=(j,l)
# the distance is ||X[a] - X[b] o swap(k,l)|| where swap exchanges the column
# blocks of layers k and l (identity when k == l).

@njit
def _dissimilarity_numba(X, n, L):
    size = n * L
    S = np.zeros((size, size))
    for a in range(size):
        k = a // n
        for b in range(a + 1, size):
            l = b // n
            acc = 0.0
            if k == l:
                for c in range(size):
                    d = X[a, c] - X[b, c]
                    acc += d * d
            else:
                shift = (l - k) * n
                for c in range(size):
                    m = c // n
                    if m == k:
                        cb = c + shift
                    elif m == l:
                        cb = c - shift
                    else:
                        cb = c
                    d = X[a, c] - X[b, cb]
                    acc += d * d
            s = np.sqrt(acc)
            S[a, b] = s
            S[b, a] = s
    return S


def _swap_columns(n, L, k, l):
    perm = np.arange(n * L)
    perm[k * n:(k + 1) * n] = np.arange(l * n, (l + 1) * n)
    perm[l * n:(l + 1) * n] = np.arange(k * n, (k + 1) * n)
    return perm


def _dissimilarity_numpy(X, n, L):
    size = n * L
    S = np.zeros((size, size))
    for k in range(L):
        rows_k = X[k * n:(k + 1) * n]
        for l in range(k, L):
            other = X[l * n:(l + 1) * n][:, _swap_columns(n, L, k, l)]
            for i in range(n):
                start = i + 1 if l == k else 0
                diff = rows_k[i] - other[start:]
                d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
                a = k * n + i
                S[a, l * n + start:(l + 1) * n] = d
    iu = np.triu_indices(size, 1)
    S[(iu[1], iu[0])] = S[iu]
    return S


# --- constrained average linkage --------------------------------------------
#
# Clusters live in slots 0..n-1; a merge keeps the lower slot. D holds the sum
# of pairwise dissimilarities between clusters, so average linkage is
# D[a, b] / (size[a] * size[b]) and the update D[a] += D[b] is exact.
# Ties on the average go to the lexicographically smallest (id_lo, id_hi).

@njit
def _linkage_numba(S, conn):
    n = S.shape[0]
    D = S.copy()
    adj = conn.copy()
    size = np.ones(n)
    ids = np.arange(n)
    active = np.ones(n, dtype=np.bool_)
    pairs = np.empty((max(n - 1, 0), 2), dtype=np.int64)
    dists = np.empty(max(n - 1, 0))
    count = 0
    while True:
        best = np.inf
        ba = -1
        bb = -1
        blo = -1
        bhi = -1
        for a in range(n):
            if not active[a]:
                continue
            for b in range(a + 1, n):
                if not active[b] or not adj[a, b]:
                    continue
                d = D[a, b] / (size[a] * size[b])
                lo = ids[a]
                hi = ids[b]
                if lo > hi:
                    lo, hi = hi, lo
                if d < best or (d == best and (lo < blo or (lo == blo and hi < bhi))):
                    best = d
                    ba = a
                    bb = b
                    blo = lo
                    bhi = hi
        if ba < 0:
            break
        pairs[count, 0] = blo
        pairs[count, 1] = bhi
        dists[count] = best
        for c in range(n):
            D[ba, c] += D[bb, c]
            D[c, ba] = D[ba, c]
            adj[ba, c] = adj[ba, c] or adj[bb, c]
            adj[c, ba] = adj[ba, c]
        adj[ba, ba] = False
        size[ba] += size[bb]
        active[bb] = False
        ids[ba] = n + count
        count += 1
    return pairs[:count], dists[:count]


def _linkage_numpy(S, conn):
    n = S.shape[0]
    D = S.copy()
    adj = conn.copy()
    np.fill_diagonal(adj, False)
    size = np.ones(n)
    ids = np.arange(n)
    active = np.ones(n, dtype=bool)
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    pairs, dists = [], []
    while True:
        mask = adj & upper & active[:, None] & active[None, :]
        if not mask.any():
            break
        a_idx, b_idx = np.nonzero(mask)
        avg = D[a_idx, b_idx] / (size[a_idx] * size[b_idx])
        best = avg.min()
        tied = np.flatnonzero(avg == best)
        lo = np.minimum(ids[a_idx[tied]], ids[b_idx[tied]])
        hi = np.maximum(ids[a_idx[tied]], ids[b_idx[tied]])
        pick = tied[np.lexsort((hi, lo))[0]]
        a, b = a_idx[pick], b_idx[pick]
        pairs.append((min(ids[a], ids[b]), max(ids[a], ids[b])))
        dists.append(best)
        D[a] += D[b]
        D[:, a] = D[a]
        adj[a] |= adj[b]
        adj[:, a] = adj[a]
        adj[a, a] = False
        size[a] += size[b]
        active[b] = False
        ids[a] = n + len(pairs) - 1
    return (np.array(pairs, dtype=np.int64).reshape(-1, 2),
            np.array(dists, dtype=np.float64))


if USE_NUMBA:
    _dissimilarity_impl = _dissimilarity_numba
    _linkage_impl = _linkage_numba
else:
    _dissimilarity_impl = _dissimilarity_numpy
    _linkage_impl = _linkage_numpy


def pairwise_dissimilarity(X, n, L):
    """Full dissimilarity matrix from the degree-scaled walk rows ``X``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _dissimilarity_impl(X, int(n), int(L))


def constrained_average_linkage(S, conn):
    """Average-linkage merges restricted to pairs with ``conn`` set.

    Returns
    -------
    pairs : (m, 2) int64 array
        Cluster ids joined at each step, smaller id first. Singletons are
        ``0..n-1``; the cluster formed at step ``s`` gets id ``n + s``.
    dists : (m,) float array
        Average linkage distance of each merge.
    """
    S = np.ascontiguousarray(S, dtype=np.float64)
    conn = np.ascontiguousarray(conn, dtype=np.bool_)
    return _linkage_impl(S, conn)
