"""Jitted kernels: coboundary reduction with clearing and apparent-pair skips.

One kernel serves both ordinary persistence and image persistence.  A block
in dimension d reduces the matrix whose columns are d-simplices in reverse
order of the domain filtration (diameters ``dist_f``) and whose rows are
(d+1)-simplices keyed by the codomain filtration (diameters ``dist_g``),
youngest row first, so the pivot of a column is its oldest codomain cofacet.
With ``dist_f is dist_g`` the pairs are exactly the ordinary persistence
pairs read off a relative coboundary reduction; with ``dist_f >= dist_g``
entrywise they are the finite intervals of the induced image module (pairs
whose codomain death precedes their domain birth are ephemeral and carry no
interval).

Simplices are handled as combinatorial ranks; columns are generated on the
fly and never materialized globally.  Distances are flat ``n*n`` float64
arrays; ``binom`` is a Pascal table large enough for ``C(n, d+2)``.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.core import types
from numba.typed import Dict as NumbaDict
from numba.typed import List as NumbaList


@njit(cache=True)
def _rank_of_insert(verts, d1, w, binom):
    """cindex of verts U {w} plus the insertion position of w."""
    r = np.int64(0)
    pos = 0
    for i in range(d1):
        if verts[i] < w:
            r += binom[verts[i], i + 1]
            pos += 1
        else:
            r += binom[verts[i], i + 2]
    r += binom[w, pos + 1]
    return r, pos


@njit(cache=True)
def _decode(rank, dim, n, binom, out):
    r = rank
    v = n - 1
    for i in range(dim, -1, -1):
        while binom[v, i + 1] > r:
            v -= 1
        out[i] = v
        r -= binom[v, i + 1]
        v -= 1


@njit(cache=True)
def _diam(verts, d1, dist, n):
    m = 0.0
    for a in range(d1):
        va = verts[a]
        for b in range(a + 1, d1):
            x = dist[va * n + verts[b]]
            if x > m:
                m = x
    return m


@njit(cache=True)
def _inv_mod(a, p):
    # Fermat inverse; p prime
    r = np.int64(1)
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


@njit(cache=True)
def _cofacet_column(verts, d1, n, dist_g, gdiam, thr, binom, p):
    """Sorted coboundary column of one simplex: cofacets with codomain
    diameter <= thr, ordered (g asc, cindex desc) so entry 0 is the pivot
    (the oldest cofacet in the codomain filtration)."""
    cap = n - d1
    gs = np.empty(cap, np.float64)
    cis = np.empty(cap, np.int64)
    cfs = np.empty(cap, np.int64)
    m = 0
    # w descending yields cindex descending; a stable sort on g keeps that
    for w in range(n - 1, -1, -1):
        member = False
        for i in range(d1):
            if verts[i] == w:
                member = True
                break
        if member:
            continue
        g = gdiam
        ok = True
        for i in range(d1):
            x = dist_g[w * n + verts[i]]
            if x > thr:
                ok = False
                break
            if x > g:
                g = x
        if not ok or g > thr:
            continue
        r, pos = _rank_of_insert(verts, d1, w, binom)
        gs[m] = g
        cis[m] = r
        cfs[m] = 1 if pos % 2 == 0 else p - 1
        m += 1
    order = np.argsort(gs[:m], kind="mergesort")
    return gs[:m][order], cis[:m][order], cfs[:m][order]


@njit(cache=True)
def _oldest_cofacet(verts, d1, n, dist_g, gdiam, thr):
    """Pivot candidate of the raw coboundary column: the cofacet minimal in
    (g asc, cindex desc).  Enumerating w descending makes cindex descend, so
    the first w attaining the minimal diameter wins the tie automatically.
    Returns (found, w, g)."""
    best_w = -1
    best_g = np.inf
    for w in range(n - 1, -1, -1):
        member = False
        for i in range(d1):
            if verts[i] == w:
                member = True
                break
        if member:
            continue
        g = gdiam
        ok = True
        for i in range(d1):
            x = dist_g[w * n + verts[i]]
            if x > thr:
                ok = False
                break
            if x > g:
                g = x
        if not ok:
            continue
        if g < best_g:
            best_g = g
            best_w = w
    return best_w >= 0, best_w, best_g


@njit(cache=True)
def _is_youngest_facet(sigma_ci, tau_verts, d2, n, dist_f, dist_g, binom):
    """True iff sigma is the facet of tau latest in the domain order, which
    refines sub-diameter ties by codomain diameter then descending cindex."""
    best_f = -1.0
    best_g = -1.0
    best_ci = np.int64(-1)
    fverts = np.empty(d2 - 1, np.int64)
    for drop in range(d2):
        k = 0
        for i in range(d2):
            if i != drop:
                fverts[k] = tau_verts[i]
                k += 1
        f = _diam(fverts, d2 - 1, dist_f, n)
        g = _diam(fverts, d2 - 1, dist_g, n)
        ci = np.int64(0)
        for i in range(d2 - 1):
            ci += binom[fverts[i], i + 1]
        if (
            (f > best_f)
            or (f == best_f and g > best_g)
            or (f == best_f and g == best_g and ci < best_ci)
        ):
            best_f = f
            best_g = g
            best_ci = ci
    return best_ci == sigma_ci


@njit(cache=True)
def _merge_add(g1, c1, f1, g2, c2, f2, lam, p):
    """col1 + lam*col2 over F_p in (g asc, cindex desc) order (coboundary)."""
    n1 = g1.shape[0]
    n2 = g2.shape[0]
    go = np.empty(n1 + n2, np.float64)
    co = np.empty(n1 + n2, np.int64)
    fo = np.empty(n1 + n2, np.int64)
    i = 0
    j = 0
    k = 0
    while i < n1 or j < n2:
        if j >= n2:
            go[k] = g1[i]
            co[k] = c1[i]
            fo[k] = f1[i]
            k += 1
            i += 1
        elif i >= n1:
            v = (lam * f2[j]) % p
            if v != 0:
                go[k] = g2[j]
                co[k] = c2[j]
                fo[k] = v
                k += 1
            j += 1
        elif c1[i] == c2[j]:
            v = (f1[i] + lam * f2[j]) % p
            if v != 0:
                go[k] = g1[i]
                co[k] = c1[i]
                fo[k] = v
                k += 1
            i += 1
            j += 1
        elif (g1[i] < g2[j]) or (g1[i] == g2[j] and c1[i] > c2[j]):
            go[k] = g1[i]
            co[k] = c1[i]
            fo[k] = f1[i]
            k += 1
            i += 1
        else:
            v = (lam * f2[j]) % p
            if v != 0:
                go[k] = g2[j]
                co[k] = c2[j]
                fo[k] = v
                k += 1
            j += 1
    return go[:k], co[:k], fo[:k]


@njit(cache=True)
def _merge_add_rev(g1, c1, f1, g2, c2, f2, lam, p):
    """col1 + lam*col2 over F_p in (f desc, cindex asc) order (boundary,
    youngest entry first)."""
    n1 = g1.shape[0]
    n2 = g2.shape[0]
    go = np.empty(n1 + n2, np.float64)
    co = np.empty(n1 + n2, np.int64)
    fo = np.empty(n1 + n2, np.int64)
    i = 0
    j = 0
    k = 0
    while i < n1 or j < n2:
        if j >= n2:
            go[k] = g1[i]
            co[k] = c1[i]
            fo[k] = f1[i]
            k += 1
            i += 1
        elif i >= n1:
            v = (lam * f2[j]) % p
            if v != 0:
                go[k] = g2[j]
                co[k] = c2[j]
                fo[k] = v
                k += 1
            j += 1
        elif c1[i] == c2[j]:
            v = (f1[i] + lam * f2[j]) % p
            if v != 0:
                go[k] = g1[i]
                co[k] = c1[i]
                fo[k] = v
                k += 1
            i += 1
            j += 1
        elif (g1[i] > g2[j]) or (g1[i] == g2[j] and c1[i] < c2[j]):
            go[k] = g1[i]
            co[k] = c1[i]
            fo[k] = f1[i]
            k += 1
            i += 1
        else:
            v = (lam * f2[j]) % p
            if v != 0:
                go[k] = g2[j]
                co[k] = c2[j]
                fo[k] = v
                k += 1
            j += 1
    return go[:k], co[:k], fo[:k]


@njit(cache=True)
def _reduce_block(
    cols_ci,
    cols_f,
    d,
    n,
    dist_f,
    dist_g,
    thr,
    binom,
    p,
    use_apparent,
    pivot_map,
    stored_g,
    stored_c,
    stored_f,
    pair_sigma,
    pair_sigma_f,
    pair_tau,
    pair_tau_g,
    ess,
):
    npairs = 0
    ness = 0
    verts = np.empty(d + 1, np.int64)
    verts2 = np.empty(d + 1, np.int64)
    tverts = np.empty(d + 2, np.int64)
    for idx in range(cols_ci.shape[0]):
        ci = cols_ci[idx]
        _decode(ci, d, n, binom, verts)
        gdiam = _diam(verts, d + 1, dist_g, n)
        found, wstar, gstar = _oldest_cofacet(verts, d + 1, n, dist_g, gdiam, thr)
        if not found:
            ess[ness] = ci
            ness += 1
            continue
        if use_apparent:
            # splice w* into the vertex list to get the pivot candidate
            k2 = 0
            for i in range(d + 1):
                if verts[i] < wstar:
                    tverts[k2] = verts[i]
                    k2 += 1
            tverts[k2] = wstar
            k2 += 1
            for i in range(d + 1):
                if verts[i] > wstar:
                    tverts[k2] = verts[i]
                    k2 += 1
            if _is_youngest_facet(ci, tverts, d + 2, n, dist_f, dist_g, binom):
                # apparent pair: the raw column is already reduced and no
                # younger column can ever reach this pivot, so the column
                # never needs to be materialized
                tci, _ = _rank_of_insert(verts, d + 1, wstar, binom)
                pivot_map[tci] = np.int64(-idx - 1)
                pair_sigma[npairs] = ci
                pair_sigma_f[npairs] = cols_f[idx]
                pair_tau[npairs] = tci
                pair_tau_g[npairs] = gstar
                npairs += 1
                continue
        g, c, f = _cofacet_column(verts, d + 1, n, dist_g, gdiam, thr, binom, p)
        while True:
            if g.shape[0] == 0:
                ess[ness] = ci
                ness += 1
                break
            tau = c[0]
            if tau in pivot_map:
                h = pivot_map[tau]
                if h >= 0:
                    og, oc, of = stored_g[h], stored_c[h], stored_f[h]
                else:
                    j2 = -h - 1
                    _decode(cols_ci[j2], d, n, binom, verts2)
                    gd2 = _diam(verts2, d + 1, dist_g, n)
                    og, oc, of = _cofacet_column(
                        verts2, d + 1, n, dist_g, gd2, thr, binom, p
                    )
                lam = (p - (f[0] * _inv_mod(of[0], p)) % p) % p
                g, c, f = _merge_add(g, c, f, og, oc, of, lam, p)
            else:
                pivot_map[tau] = np.int64(len(stored_g))
                stored_g.append(g)
                stored_c.append(c)
                stored_f.append(f)
                pair_sigma[npairs] = ci
                pair_sigma_f[npairs] = cols_f[idx]
                pair_tau[npairs] = tau
                pair_tau_g[npairs] = g[0]
                npairs += 1
                break
    return npairs, ness


def reduce_block(cols_ci, cols_f, d, n, dist_f, dist_g, thr, binom, p, use_apparent):
    """Reduce one coboundary block.

    cols_ci/cols_f must already be in processing order: the reverse of the
    domain order (sub-diameter asc, codomain diameter asc, cindex desc),
    with cleared columns removed.  Returns
    (pair_sigma, pair_sigma_fdiam, pair_tau, pair_tau_gdiam, essential).
    """
    ncols = len(cols_ci)
    if ncols == 0:
        return (
            np.empty(0, np.int64),
            np.empty(0, np.float64),
            np.empty(0, np.int64),
            np.empty(0, np.float64),
            np.empty(0, np.int64),
        )
    pair_sigma = np.empty(ncols, np.int64)
    pair_sigma_f = np.empty(ncols, np.float64)
    pair_tau = np.empty(ncols, np.int64)
    pair_tau_g = np.empty(ncols, np.float64)
    ess = np.empty(ncols, np.int64)
    pivot_map = NumbaDict.empty(types.int64, types.int64)
    stored_g = NumbaList.empty_list(types.float64[:])
    stored_c = NumbaList.empty_list(types.int64[:])
    stored_f = NumbaList.empty_list(types.int64[:])
    npairs, ness = _reduce_block(
        np.ascontiguousarray(cols_ci, dtype=np.int64),
        np.ascontiguousarray(cols_f, dtype=np.float64),
        d,
        n,
        dist_f,
        dist_g,
        thr,
        binom,
        np.int64(p),
        use_apparent,
        pivot_map,
        stored_g,
        stored_c,
        stored_f,
        pair_sigma,
        pair_sigma_f,
        pair_tau,
        pair_tau_g,
        ess,
    )
    return (
        pair_sigma[:npairs].copy(),
        pair_sigma_f[:npairs].copy(),
        pair_tau[:npairs].copy(),
        pair_tau_g[:npairs].copy(),
        ess[:ness].copy(),
    )


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def union_find_pairs(n, eu, ev):
    """Zero-dimensional pairs over edges already in filtration order.

    Age of a component is the age of its creating vertex; with all vertices
    entering at diameter 0 and ties broken by descending cindex, the oldest
    vertex is the one with the largest index, so a merge kills the class of
    the smaller creator (this matches the matrix reduction exactly).
    Returns (birth_vertex, edge_position, negative_flags, essential_vertices).
    """
    m = eu.shape[0]
    parent = np.arange(n)
    size = np.ones(n, np.int64)
    creator = np.arange(n)
    cap = n if n < m + 1 else m + 1
    pair_v = np.empty(cap, np.int64)
    pair_e = np.empty(cap, np.int64)
    neg = np.zeros(m, np.bool_)
    k = 0
    for e in range(m):
        ru = _find(parent, eu[e])
        rv = _find(parent, ev[e])
        if ru == rv:
            continue
        cu = creator[ru]
        cv = creator[rv]
        dying = cu if cu < cv else cv
        surviving = cu if cu > cv else cv
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
        creator[ru] = surviving
        pair_v[k] = dying
        pair_e[k] = e
        neg[e] = True
        k += 1
    nroots = 0
    ess = np.empty(n, np.int64)
    for v in range(n):
        if _find(parent, v) == v:
            ess[nroots] = creator[v]
            nroots += 1
    return pair_v[:k].copy(), pair_e[:k].copy(), neg, ess[:nroots].copy()


@njit(cache=True)
def enumerate_triangles(n, dist, thr, binom):
    """All 2-simplices with diameter <= thr as (cindex, diameter) arrays."""
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i * n + j] > thr:
                continue
            for k2 in range(j + 1, n):
                if dist[i * n + k2] <= thr and dist[j * n + k2] <= thr:
                    count += 1
    cis = np.empty(count, np.int64)
    ds = np.empty(count, np.float64)
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            dij = dist[i * n + j]
            if dij > thr:
                continue
            for k2 in range(j + 1, n):
                dik = dist[i * n + k2]
                djk = dist[j * n + k2]
                if dik <= thr and djk <= thr:
                    dmax = dij
                    if dik > dmax:
                        dmax = dik
                    if djk > dmax:
                        dmax = djk
                    cis[m] = binom[i, 1] + binom[j, 2] + binom[k2, 3]
                    ds[m] = dmax
                    m += 1
    return cis, ds


@njit(cache=True)
def _boundary_column(tau_ci, d, n, dist, binom, p, tverts, fverts):
    """Boundary column of a (d+1)-simplex, youngest facet first
    ((f desc, cindex asc) order)."""
    _decode(tau_ci, d + 1, n, binom, tverts)
    nf = d + 2
    gs = np.empty(nf, np.float64)
    cis = np.empty(nf, np.int64)
    cfs = np.empty(nf, np.int64)
    for drop in range(nf):
        k2 = 0
        for i in range(nf):
            if i != drop:
                fverts[k2] = tverts[i]
                k2 += 1
        fdiam = _diam(fverts, d + 1, dist, n)
        ci = np.int64(0)
        for i in range(d + 1):
            ci += binom[fverts[i], i + 1]
        gs[drop] = fdiam
        cis[drop] = ci
        cfs[drop] = 1 if drop % 2 == 0 else p - 1
    order = np.argsort(cis, kind="mergesort")
    gs2, cis2, cfs2 = gs[order], cis[order], cfs[order]
    order2 = np.argsort(-gs2, kind="mergesort")
    return gs2[order2], cis2[order2], cfs2[order2]


@njit(cache=True)
def boundary_death_reduction(death_ci, d, n, dist, binom, p, out_pivot):
    """Reduce the boundary columns of the death (d+1)-simplices ``death_ci``
    (in filtration order) against each other, returning the reduced chains
    packed into flat arrays.  out_pivot[j] receives the pivot (= paired
    birth d-simplex) of column j, or -1 if the column vanished (which a
    genuine death column never does)."""
    m = death_ci.shape[0]
    pivot_map = NumbaDict.empty(types.int64, types.int64)
    chains_g = NumbaList.empty_list(types.float64[:])
    chains_ci = NumbaList.empty_list(types.int64[:])
    chains_cf = NumbaList.empty_list(types.int64[:])
    tverts = np.empty(d + 2, np.int64)
    fverts = np.empty(d + 1, np.int64)

    for j in range(m):
        g, c, f = _boundary_column(death_ci[j], d, n, dist, binom, p, tverts, fverts)
        while True:
            if g.shape[0] == 0:
                out_pivot[j] = -1
                chains_g.append(g)
                chains_ci.append(c)
                chains_cf.append(f)
                break
            piv = c[0]
            if piv in pivot_map:
                h = pivot_map[piv]
                og, oc, of = chains_g[h], chains_ci[h], chains_cf[h]
                lam = (p - (f[0] * _inv_mod(of[0], p)) % p) % p
                g, c, f = _merge_add_rev(g, c, f, og, oc, of, lam, p)
            else:
                pivot_map[piv] = np.int64(j)
                chains_g.append(g)
                chains_ci.append(c)
                chains_cf.append(f)
                out_pivot[j] = piv
                break
    total = 0
    for j in range(m):
        total += chains_ci[j].shape[0]
    flat_ci = np.empty(total, np.int64)
    flat_cf = np.empty(total, np.int64)
    offs = np.empty(m + 1, np.int64)
    t = 0
    for j in range(m):
        offs[j] = t
        cj = chains_ci[j]
        fj = chains_cf[j]
        for q in range(cj.shape[0]):
            flat_ci[t] = cj[q]
            flat_cf[t] = fj[q]
            t += 1
    offs[m] = t
    return flat_ci, flat_cf, offs
