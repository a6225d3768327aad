"""Hot numeric kernels with numba and pure-numpy implementations.

Every kernel exists twice: a loop form compiled with ``@njit`` when numba is
available, and a vectorized numpy form. The active backend is chosen at import
time; set ``EPSAMPLE_NO_NUMBA=1`` to force the numpy path. ``BACKEND`` reports
which one won.

Conventions shared by all kernels:

* lines are slope/intercept pairs (a, b) meaning y = a*x + b
* "above" is the closed-above rule only where stated; strict comparisons are
  exact float compares, never tolerance-based
* empty x-intervals are encoded as (+inf, -inf)
"""

from __future__ import annotations

import math
import os

import numpy as np

_INF = math.inf

_disabled = os.environ.get("EPSAMPLE_NO_NUMBA", "").strip() not in ("", "0")
try:  # pragma: no cover - exercised implicitly by import
    if _disabled:
        raise ImportError("numba disabled by EPSAMPLE_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# halfplane mass sums


def _halfplane_sums_loop(la, lb, si, sj, px, py, w):
    m = la.shape[0]
    n = px.shape[0]
    out = np.zeros(m, dtype=np.float64)
    for i in range(m):
        a = la[i]
        b = lb[i]
        s1 = si[i]
        s2 = sj[i]
        acc = 0.0
        for j in range(n):
            if j == s1 or j == s2:
                continue
            if py[j] > a * px[j] + b:
                acc += w[j]
        out[i] = acc
    return out


def _halfplane_sums_np(la, lb, si, sj, px, py, w):
    m = la.shape[0]
    out = np.empty(m, dtype=np.float64)
    # chunk over lines to bound the broadcast matrix at ~4e6 entries
    n = max(1, px.shape[0])
    step = max(1, int(4_000_000 // n))
    for lo in range(0, m, step):
        hi = min(m, lo + step)
        above = py[None, :] > la[lo:hi, None] * px[None, :] + lb[lo:hi, None]
        sums = above @ w
        for k in range(lo, hi):
            for s in (si[k], sj[k]):
                if s >= 0 and above[k - lo, s]:
                    sums[k - lo] -= w[s]
        out[lo:hi] = sums
    return out


def halfplane_sums(la, lb, px, py, w, si=None, sj=None):
    """Weighted mass strictly above each line, minus up to two skipped indices.

    ``si``/``sj`` hold per-line point indices to exclude (-1 for none); used
    when a line is spanned by two of the evaluation points, whose boundary
    membership is decided combinatorially by the caller rather than by the
    sign of a near-zero residual.
    """
    la = np.ascontiguousarray(la, dtype=np.float64)
    lb = np.ascontiguousarray(lb, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if si is None:
        si = np.full(la.shape[0], -1, dtype=np.int64)
    else:
        si = np.ascontiguousarray(si, dtype=np.int64)
    if sj is None:
        sj = np.full(la.shape[0], -1, dtype=np.int64)
    else:
        sj = np.ascontiguousarray(sj, dtype=np.int64)
    return _halfplane_sums_impl(la, lb, si, sj, px, py, w)


# ---------------------------------------------------------------------------
# interval clipping of lines against a convex region


def _clip_intervals_loop(la, lb, lo0, hi0, ea, eb, eup, xlo, xhi, rtol, atol):
    m = la.shape[0]
    k = ea.shape[0]
    lo = np.empty(m, dtype=np.float64)
    hi = np.empty(m, dtype=np.float64)
    for i in range(m):
        a = la[i]
        b = lb[i]
        clo = lo0[i]
        chi = hi0[i]
        if clo < xlo:
            clo = xlo
        if chi > xhi:
            chi = xhi
        for e in range(k):
            if clo > chi:
                break
            da = a - ea[e]
            db = b - eb[e]
            ta = rtol * max(abs(a), abs(ea[e])) + atol
            tb = rtol * max(abs(b), abs(eb[e])) + atol
            if abs(da) <= ta:
                if abs(db) <= tb:
                    # collinear with a boundary edge: by convention not inside
                    clo = _INF
                    chi = -_INF
                elif (db > 0.0) != eup[e]:
                    clo = _INF
                    chi = -_INF
                continue
            root = -db / da
            # need da*x + db >= 0 when the cell is above this edge, else <= 0
            if (da > 0.0) == eup[e]:
                if root > clo:
                    clo = root
            else:
                if root < chi:
                    chi = root
        if clo > chi:
            lo[i] = _INF
            hi[i] = -_INF
        else:
            lo[i] = clo
            hi[i] = chi
    return lo, hi


def _clip_intervals_np(la, lb, lo0, hi0, ea, eb, eup, xlo, xhi, rtol, atol):
    lo = np.maximum(lo0, xlo)
    hi = np.minimum(hi0, xhi)
    for e in range(ea.shape[0]):
        da = la - ea[e]
        db = lb - eb[e]
        ta = rtol * np.maximum(np.abs(la), abs(ea[e])) + atol
        tb = rtol * np.maximum(np.abs(lb), abs(eb[e])) + atol
        par = np.abs(da) <= ta
        bad = par & ((np.abs(db) <= tb) | ((db > 0.0) != eup[e]))
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.where(par, 0.0, -db / da)
        tighten_lo = (~par) & ((da > 0.0) == eup[e])
        tighten_hi = (~par) & ~tighten_lo
        lo = np.where(tighten_lo & (root > lo), root, lo)
        hi = np.where(tighten_hi & (root < hi), root, hi)
        lo = np.where(bad, _INF, lo)
        hi = np.where(bad, -_INF, hi)
    empty = lo > hi
    lo = np.where(empty, _INF, lo)
    hi = np.where(empty, -_INF, hi)
    return lo, hi


def clip_intervals(la, lb, lo0, hi0, edges_a, edges_b, edges_up, xlo, xhi,
                   rtol=1e-9, atol=1e-12):
    """Clip per-line x-intervals against a convex region.

    The region is the intersection of halfplanes (edge line, side) with an
    optional x-window. ``edges_up[e]`` True means the region lies on or above
    edge e. Lines collinear with an edge come back empty: a boundary line is
    not a crossing line.
    """
    la = np.ascontiguousarray(la, dtype=np.float64)
    lb = np.ascontiguousarray(lb, dtype=np.float64)
    lo0 = np.ascontiguousarray(lo0, dtype=np.float64)
    hi0 = np.ascontiguousarray(hi0, dtype=np.float64)
    ea = np.ascontiguousarray(edges_a, dtype=np.float64)
    eb = np.ascontiguousarray(edges_b, dtype=np.float64)
    eup = np.ascontiguousarray(edges_up, dtype=np.bool_)
    return _clip_intervals_impl(la, lb, lo0, hi0, ea, eb, eup,
                                float(xlo), float(xhi), float(rtol), float(atol))


# ---------------------------------------------------------------------------
# bulk point location in a tree mirror

NODE_LEAF = 0
NODE_LINE = 1
NODE_XSPLIT = 2


def _locate_loop(kind, na, nb, above, below, px, py):
    n = px.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while kind[node] != NODE_LEAF:
            if kind[node] == NODE_LINE:
                if py[i] >= na[node] * px[i] + nb[node]:
                    node = above[node]
                else:
                    node = below[node]
            else:
                if px[i] >= na[node]:
                    node = above[node]
                else:
                    node = below[node]
        out[i] = node
    return out


def _locate_np(kind, na, nb, above, below, px, py):
    n = px.shape[0]
    out = np.empty(n, dtype=np.int64)
    stack = [(0, np.arange(n, dtype=np.int64))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if kind[node] == NODE_LEAF:
            out[idx] = node
            continue
        if kind[node] == NODE_LINE:
            up = py[idx] >= na[node] * px[idx] + nb[node]
        else:
            up = px[idx] >= na[node]
        stack.append((above[node], idx[up]))
        stack.append((below[node], idx[~up]))
    return out


def locate_points(kind, na, nb, above, below, px, py):
    """Leaf node id for each point, routed closed-above / closed-right."""
    return _locate_impl(
        np.ascontiguousarray(kind, dtype=np.int8),
        np.ascontiguousarray(na, dtype=np.float64),
        np.ascontiguousarray(nb, dtype=np.float64),
        np.ascontiguousarray(above, dtype=np.int64),
        np.ascontiguousarray(below, dtype=np.int64),
        np.ascontiguousarray(px, dtype=np.float64),
        np.ascontiguousarray(py, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# double-wedge queries against a frozen tree

# Stack entries carry, per wedge boundary line, the feasible x-interval inside
# the current region plus a resolved side (0 while the line can still cross).


def _wedge_query_loop(kind, na, nb, anx, any_, above, below, counts,
                      leaf_lo, leaf_hi, leaf_ptr, pt_x, pt_y, pt_id,
                      ua, ub, va, vb, report, out_ids):
    total = 0
    nout = 0
    maxstack = 2 * kind.shape[0] + 4
    s_node = np.empty(maxstack, dtype=np.int64)
    s_state = np.empty((maxstack, 6), dtype=np.float64)  # lo1 hi1 s1 lo2 hi2 s2
    s_node[0] = 0
    s_state[0, 0] = -_INF
    s_state[0, 1] = _INF
    s_state[0, 2] = 0.0
    s_state[0, 3] = -_INF
    s_state[0, 4] = _INF
    s_state[0, 5] = 0.0
    top = 1
    while top > 0:
        top -= 1
        node = s_node[top]
        lo1 = s_state[top, 0]
        hi1 = s_state[top, 1]
        s1 = s_state[top, 2]
        lo2 = s_state[top, 3]
        hi2 = s_state[top, 4]
        s2 = s_state[top, 5]
        if s1 != 0.0 and s2 != 0.0:
            if s1 != s2:
                total += counts[node]
                if report:
                    p0 = leaf_ptr[leaf_lo[node]]
                    p1 = leaf_ptr[leaf_hi[node]]
                    for p in range(p0, p1):
                        out_ids[nout] = pt_id[p]
                        nout += 1
            continue
        if kind[node] == NODE_LEAF:
            p0 = leaf_ptr[leaf_lo[node]]
            p1 = leaf_ptr[leaf_hi[node]]
            for p in range(p0, p1):
                x = pt_x[p]
                y = pt_y[p]
                d1 = y - (ua * x + ub)
                d2 = y - (va * x + vb)
                if d1 * d2 <= 0.0:
                    total += 1
                    if report:
                        out_ids[nout] = pt_id[p]
                        nout += 1
            continue
        qx = anx[node]
        qy = any_[node]
        for side in range(2):
            child = above[node] if side == 0 else below[node]
            c_lo1, c_hi1, c_s1 = lo1, hi1, s1
            c_lo2, c_hi2, c_s2 = lo2, hi2, s2
            if kind[node] == NODE_LINE:
                a = na[node]
                b = nb[node]
                if c_s1 == 0.0:
                    c_lo1, c_hi1, c_s1 = _clip_one(ua, ub, a, b, side, c_lo1,
                                                   c_hi1, qx, qy)
                if c_s2 == 0.0:
                    c_lo2, c_hi2, c_s2 = _clip_one(va, vb, a, b, side, c_lo2,
                                                   c_hi2, qx, qy)
            else:
                x0 = na[node]
                if c_s1 == 0.0:
                    c_lo1, c_hi1, c_s1 = _clip_one_x(ua, ub, x0, side, c_lo1,
                                                     c_hi1, qx, qy)
                if c_s2 == 0.0:
                    c_lo2, c_hi2, c_s2 = _clip_one_x(va, vb, x0, side, c_lo2,
                                                     c_hi2, qx, qy)
            s_node[top] = child
            s_state[top, 0] = c_lo1
            s_state[top, 1] = c_hi1
            s_state[top, 2] = c_s1
            s_state[top, 3] = c_lo2
            s_state[top, 4] = c_hi2
            s_state[top, 5] = c_s2
            top += 1
    return total, nout


# Sign convention for the traversal state: s = +1 when the child region lies
# strictly above wedge line g, -1 when strictly below, 0 while g may still
# cross it. A subtree with both signs resolved is entirely inside the double
# wedge iff the signs differ, which matches the per-point rule d1*d2 <= 0
# because every point of such a subtree is strictly sided.


def _clip_one_py(ga, gb, a, b, side, lo, hi, qx, qy):
    # g's feasible x-interval inside the child of a line node.
    # side 0: child region is y >= a*x+b, side 1: y < a*x+b.
    da = ga - a
    db = gb - b
    if da == 0.0:
        if db == 0.0:
            # g is the split line: above child sits strictly above g
            return _INF, -_INF, (1.0 if side == 0 else -1.0)
        # parallel: g either stays in the child's halfplane or misses it
        if (db > 0.0) == (side == 0):
            return lo, hi, 0.0
        return _INF, -_INF, (1.0 if side == 0 else -1.0)
    # inside-child constraint on g: da*x + db >= 0 (side 0) or <= 0 (side 1)
    root = -db / da
    if (da > 0.0) == (side == 0):
        nlo = max(lo, root)
        nhi = hi
    else:
        nlo = lo
        nhi = min(hi, root)
    if nlo <= nhi:
        return nlo, nhi, 0.0
    d = qy - (ga * qx + gb)  # anchor on the split chord, in both closures
    if d > 0.0:
        return _INF, -_INF, 1.0
    if d < 0.0:
        return _INF, -_INF, -1.0
    return lo, hi, 0.0  # ambiguous anchor: keep descending unresolved


def _clip_one_x_py(ga, gb, x0, side, lo, hi, qx, qy):
    # side 0: x >= x0, side 1: x < x0
    if side == 0:
        nlo = max(lo, x0)
        nhi = hi
    else:
        nlo = lo
        nhi = min(hi, x0)
    if nlo <= nhi:
        return nlo, nhi, 0.0
    d = qy - (ga * qx + gb)
    if d > 0.0:
        return _INF, -_INF, 1.0
    if d < 0.0:
        return _INF, -_INF, -1.0
    return lo, hi, 0.0


def wedge_query(frozen, upper_a, upper_b, lower_a, lower_b, report=False):
    """Count (optionally report ids of) stored points inside a double wedge.

    ``frozen`` is the tuple produced by ``ArrangementTree.freeze()``. A point
    is inside when it does not lie strictly on the same side of both boundary
    lines; boundary contact counts as inside. Coincident boundary lines make
    the wedge the whole plane, a case the caller is expected to short-circuit.
    """
    (kind, na, nb, anx, any_, above, below, counts, leaf_lo, leaf_hi,
     leaf_ptr, pt_x, pt_y, pt_id) = frozen
    out_ids = np.empty(pt_id.shape[0] if report else 0, dtype=np.int64)
    total, nout = _wedge_query_impl(
        kind, na, nb, anx, any_, above, below, counts, leaf_lo, leaf_hi,
        leaf_ptr, pt_x, pt_y, pt_id,
        float(upper_a), float(upper_b), float(lower_a), float(lower_b),
        bool(report), out_ids)
    if report:
        return total, out_ids[:nout]
    return total, None


# ---------------------------------------------------------------------------
# rotational sweep for the halfplane discrepancy extremes


def _sweep_loop(px, py, dm):
    n = px.shape[0]
    best_hi = 0.0
    best_lo = 0.0
    ang = np.empty(n - 1, dtype=np.float64)
    mass = np.empty(n - 1, dtype=np.float64)
    for i in range(n):
        m = 0
        for j in range(n):
            if j == i:
                continue
            ang[m] = math.atan2(py[j] - py[i], px[j] - px[i])
            mass[m] = dm[j]
            m += 1
        order = np.argsort(ang[:m])
        a2 = np.empty(2 * m, dtype=np.float64)
        p2 = np.empty(2 * m + 1, dtype=np.float64)
        p2[0] = 0.0
        for k in range(m):
            a2[k] = ang[order[k]]
            a2[k + m] = a2[k] + 2.0 * math.pi
            p2[k + 1] = p2[k] + mass[order[k]]
        for k in range(m):
            p2[k + m + 1] = p2[k + m] + mass[order[k]]
        di = dm[i]
        for k in range(m):
            start = k + 1
            while start < k + m and a2[start] == a2[k]:
                start += 1
            end = np.searchsorted(a2, a2[k] + math.pi)
            o = p2[end] - p2[start]
            mk = p2[k + 1] - p2[k]
            v1 = o
            v2 = o + di
            v3 = o + di + mk
            if v1 > best_hi:
                best_hi = v1
            if v1 < best_lo:
                best_lo = v1
            if v2 > best_hi:
                best_hi = v2
            if v2 < best_lo:
                best_lo = v2
            if v3 > best_hi:
                best_hi = v3
            if v3 < best_lo:
                best_lo = v3
    return best_hi, best_lo


def _sweep_np(px, py, dm):
    n = px.shape[0]
    best_hi = 0.0
    best_lo = 0.0
    idx = np.arange(n)
    for i in range(n):
        keep = idx != i
        ang = np.arctan2(py[keep] - py[i], px[keep] - px[i])
        mass = dm[keep]
        order = np.argsort(ang, kind="mergesort")
        ang = ang[order]
        mass = mass[order]
        m = ang.shape[0]
        a2 = np.concatenate([ang, ang + 2.0 * np.pi])
        p2 = np.concatenate([[0.0], np.cumsum(np.concatenate([mass, mass]))])
        ks = np.arange(m)
        start = np.searchsorted(a2, ang, side="right")
        end = np.searchsorted(a2, ang + np.pi, side="left")
        o = p2[end] - p2[start]
        v2 = o + dm[i]
        v3 = v2 + mass[ks]
        best_hi = max(best_hi, o.max(), v2.max(), v3.max())
        best_lo = min(best_lo, o.min(), v2.min(), v3.min())
    return best_hi, best_lo


def sweep_extremes(px, py, dm):
    """Extremes of signed halfplane discrepancy sum(dm over h) over halfplanes.

    Enumerates, for every pivot point, the halfplanes whose boundary rotates
    through it: open configurations, pivot-only-closed, and pivot+event-closed.
    Returns (max, min) over that complete family (0 included via the empty
    halfplane).
    """
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    dm = np.ascontiguousarray(dm, dtype=np.float64)
    if px.shape[0] < 2:
        return 0.0, 0.0
    return _sweep_impl(px, py, dm)


def _sweep_active_loop(px, py, dm, active):
    n = px.shape[0]
    best_hi = 0.0
    best_lo = 0.0
    ang = np.empty(n - 1, dtype=np.float64)
    mass = np.empty(n - 1, dtype=np.float64)
    act = np.empty(n - 1, dtype=np.bool_)
    for i in range(n):
        if not active[i]:
            continue
        m = 0
        for j in range(n):
            if j == i:
                continue
            ang[m] = math.atan2(py[j] - py[i], px[j] - px[i])
            mass[m] = dm[j]
            act[m] = active[j]
            m += 1
        order = np.argsort(ang[:m])
        a2 = np.empty(2 * m, dtype=np.float64)
        p2 = np.empty(2 * m + 1, dtype=np.float64)
        am = np.empty(m, dtype=np.bool_)
        p2[0] = 0.0
        for k in range(m):
            a2[k] = ang[order[k]]
            a2[k + m] = a2[k] + 2.0 * math.pi
            p2[k + 1] = p2[k] + mass[order[k]]
            am[k] = act[order[k]]
        for k in range(m):
            p2[k + m + 1] = p2[k + m] + mass[order[k]]
        di = dm[i]
        for k in range(m):
            if not am[k]:
                continue
            start = k + 1
            while start < k + m and a2[start] == a2[k]:
                start += 1
            end = np.searchsorted(a2, a2[k] + math.pi)
            o = p2[end] - p2[start]
            mk = p2[k + 1] - p2[k]
            v1 = o
            v2 = o + di
            v3 = o + di + mk
            if v1 > best_hi:
                best_hi = v1
            if v1 < best_lo:
                best_lo = v1
            if v2 > best_hi:
                best_hi = v2
            if v2 < best_lo:
                best_lo = v2
            if v3 > best_hi:
                best_hi = v3
            if v3 < best_lo:
                best_lo = v3
    return best_hi, best_lo


def _sweep_active_np(px, py, dm, active):
    n = px.shape[0]
    best_hi = 0.0
    best_lo = 0.0
    idx = np.arange(n)
    for i in range(n):
        if not active[i]:
            continue
        keep = idx != i
        ang = np.arctan2(py[keep] - py[i], px[keep] - px[i])
        mass = dm[keep]
        act = active[keep]
        order = np.argsort(ang, kind="mergesort")
        ang = ang[order]
        mass = mass[order]
        act = act[order]
        m = ang.shape[0]
        a2 = np.concatenate([ang, ang + 2.0 * np.pi])
        p2 = np.concatenate([[0.0], np.cumsum(np.concatenate([mass, mass]))])
        ks = np.flatnonzero(act)
        if ks.shape[0] == 0:
            continue
        start = np.searchsorted(a2, ang[ks], side="right")
        end = np.searchsorted(a2, ang[ks] + np.pi, side="left")
        o = p2[end] - p2[start]
        v2 = o + dm[i]
        v3 = v2 + mass[ks]
        best_hi = max(best_hi, o.max(), v2.max(), v3.max())
        best_lo = min(best_lo, o.min(), v2.min(), v3.min())
    return best_hi, best_lo


def sweep_discrepancy(px, py, dm, active=None):
    """Max/min signed halfplane mass over boundaries spanned by active pairs.

    Same family as ``sweep_extremes`` (open, pivot-closed, both-closed
    configurations at every pivot/event pair) but both boundary points must
    be active; masses always count every point. active=None means all.
    """
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    dm = np.ascontiguousarray(dm, dtype=np.float64)
    if active is None:
        active = np.ones(px.shape[0], dtype=np.bool_)
    else:
        active = np.ascontiguousarray(active, dtype=np.bool_)
    if int(active.sum()) < 2:
        return 0.0, 0.0
    return _sweep_active_impl(px, py, dm, active)


# ---------------------------------------------------------------------------
# scan statistic over net-pair halfplanes


def _scan_phi_loop(nx, ny, sx, sy, wm, wb):
    t = nx.shape[0]
    k = sx.shape[0]
    best = -1.0
    bi = -1
    bj = -1
    bup = True
    for i in range(t):
        for j in range(i + 1, t):
            dx = nx[j] - nx[i]
            if dx == 0.0:
                continue
            a = (ny[j] - ny[i]) / dx
            b = ny[i] - a * nx[i]
            ma = 0.0
            ba = 0.0
            for q in range(k):
                if sy[q] >= a * sx[q] + b:
                    ma += wm[q]
                    ba += wb[q]
            phi = abs(ma - ba)
            if phi > best:
                best = phi
                bi = i
                bj = j
                bup = ma >= ba
    return best, bi, bj, bup


def _scan_phi_np(nx, ny, sx, sy, wm, wb):
    t = nx.shape[0]
    best = -1.0
    bi = -1
    bj = -1
    bup = True
    ii, jj = np.triu_indices(t, k=1)
    step = max(1, 2_000_000 // max(1, sx.shape[0]))
    for c0 in range(0, ii.shape[0], step):
        i = ii[c0:c0 + step]
        j = jj[c0:c0 + step]
        dx = nx[j] - nx[i]
        ok = dx != 0.0
        if not ok.any():
            continue
        i, j, dx = i[ok], j[ok], dx[ok]
        a = (ny[j] - ny[i]) / dx
        b = ny[i] - a * nx[i]
        above = sy[None, :] >= a[:, None] * sx[None, :] + b[:, None]
        ma = above @ wm
        ba = above @ wb
        phi = np.abs(ma - ba)
        q = int(np.argmax(phi))
        if phi[q] > best:
            best = float(phi[q])
            bi = int(i[q])
            bj = int(j[q])
            bup = bool(ma[q] >= ba[q])
    return best, bi, bj, bup


def scan_phi(nx, ny, sx, sy, wm, wb):
    """Maximize |m(h) - b(h)| over closed-above halfplanes through net pairs.

    wm/wb are per-sample-point masses for the two measures (already
    normalized). Complementary halfplanes score identically, so only the
    above side is scanned; the returned flag says which side holds the
    measured excess. Returns (phi, i, j, above) with (i, j) the first
    maximizing net pair; (-1, -1) when no pair spans a usable line.
    """
    nx = np.ascontiguousarray(nx, dtype=np.float64)
    ny = np.ascontiguousarray(ny, dtype=np.float64)
    sx = np.ascontiguousarray(sx, dtype=np.float64)
    sy = np.ascontiguousarray(sy, dtype=np.float64)
    wm = np.ascontiguousarray(wm, dtype=np.float64)
    wb = np.ascontiguousarray(wb, dtype=np.float64)
    return _scan_phi_impl(nx, ny, sx, sy, wm, wb)


# ---------------------------------------------------------------------------
# backend selection

if HAS_NUMBA:
    BACKEND = "numba"
    _sig_cache = dict(cache=True)
    _halfplane_sums_impl = njit(**_sig_cache)(_halfplane_sums_loop)
    _clip_intervals_impl = njit(**_sig_cache)(_clip_intervals_loop)
    _locate_impl = njit(**_sig_cache)(_locate_loop)
    _clip_one = njit(**_sig_cache)(_clip_one_py)
    _clip_one_x = njit(**_sig_cache)(_clip_one_x_py)
    _wedge_query_impl = njit(**_sig_cache)(_wedge_query_loop)
    _sweep_impl = njit(**_sig_cache)(_sweep_loop)
    _sweep_active_impl = njit(**_sig_cache)(_sweep_active_loop)
    _scan_phi_impl = njit(**_sig_cache)(_scan_phi_loop)
else:
    BACKEND = "numpy"
    _halfplane_sums_impl = _halfplane_sums_np
    _clip_intervals_impl = _clip_intervals_np
    _locate_impl = _locate_np
    _clip_one = _clip_one_py
    _clip_one_x = _clip_one_x_py
    _wedge_query_impl = _wedge_query_loop
    _sweep_impl = _sweep_np
    _sweep_active_impl = _sweep_active_np
    _scan_phi_impl = _scan_phi_np
