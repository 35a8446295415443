"""Hot numeric kernels: constrained fast-marching solvers and the exact
Euclidean distance transform.

Every kernel here is written as a plain scalar-loop function and compiled
with numba's ``@njit`` at import time. Setting the environment variable
``GEOSEG_NO_NUMBA=1`` (or numba being unavailable) selects the pure-Python
fallback path instead: the same functions run uncompiled. The public flag
``NUMBA_ENABLED`` reports which path is active;
``benchmarks/bench_kernels.py`` compares the two.

Grid layout: 2D fields are flat ``i = y*W + x``; lifted fields are flat
``i = (y*W + x)*K + k`` with ``theta_k = 2*pi*k/K``.

Metric variant codes: 0 isotropic, 1 riemannian, 2 asym_quadratic.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("GEOSEG_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = _env not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit as _njit

        def _jit(fn):
            return _njit(cache=True)(fn)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
if not NUMBA_ENABLED:
    def _jit(fn):
        return fn

INF = np.inf
_GOLD = 0.6180339887498949
_GOLD_ITERS = 36


# ---------------------------------------------------------------------------
# binary heap keyed by (value, index); index tie-break keeps runs bit-stable


@_jit
def _heap_push(hv, hi, hn, v, i):
    if hn >= hv.shape[0]:
        cap = hv.shape[0] * 2
        nv = np.empty(cap, np.float64)
        ni = np.empty(cap, np.int64)
        for t in range(hn):
            nv[t] = hv[t]
            ni[t] = hi[t]
        hv = nv
        hi = ni
    k = hn
    hv[k] = v
    hi[k] = i
    while k > 0:
        p = (k - 1) // 2
        if hv[p] > hv[k] or (hv[p] == hv[k] and hi[p] > hi[k]):
            hv[p], hv[k] = hv[k], hv[p]
            hi[p], hi[k] = hi[k], hi[p]
            k = p
        else:
            break
    return hv, hi, hn + 1


@_jit
def _heap_pop(hv, hi, hn):
    v = hv[0]
    i = hi[0]
    hn -= 1
    hv[0] = hv[hn]
    hi[0] = hi[hn]
    k = 0
    while True:
        l = 2 * k + 1
        r = l + 1
        m = k
        if l < hn and (hv[l] < hv[m] or (hv[l] == hv[m] and hi[l] < hi[m])):
            m = l
        if r < hn and (hv[r] < hv[m] or (hv[r] == hv[m] and hi[r] < hi[m])):
            m = r
        if m == k:
            break
        hv[m], hv[k] = hv[k], hv[m]
        hi[m], hi[k] = hi[k], hi[m]
        k = m
    return v, i, hn


# ---------------------------------------------------------------------------
# constraint predicates


@_jit
def cut_ok(px, py, ex, ey, cut_code, zx, zy):
    """Admissibility of the update edge reading from neighbor p+e into p,
    against the cut ray anchored at z.

    cut_code 1: cut infinitesimally beneath {y=zy, x>=zx} (positive ray);
    cut_code 2: cut infinitesimally above  {y=zy, x<=zx} (negative ray).
    A segment touching the axis line only at an endpoint with the wrong
    abscissa does not cross.
    """
    if cut_code == 0:
        return True
    ya = py - zy
    xa = px - zx
    yb = ya + ey
    xb = xa + ex
    if cut_code == 1:
        if ya == 0.0 and xa >= 0.0:
            return ey >= 0.0
        if (ya >= 0.0) != (yb >= 0.0):
            t = ya / (ya - yb)
            xc = xa + t * (xb - xa)
            if xc >= 0.0:
                return False
        return True
    else:
        if ya == 0.0 and xa <= 0.0:
            return ey <= 0.0
        if (ya > 0.0) != (yb > 0.0):
            t = ya / (ya - yb)
            xc = xa + t * (xb - xa)
            if xc <= 0.0:
                return False
        return True


@_jit
def _blocked_path(xn, yn, ex, ey, W, blocked):
    """True if the segment from (xn, yn) to its neighbor passes over a
    blocked pixel. Samples at ~4 points per unit length so radius-2
    offsets cannot jump a one-pixel wall."""
    qx = xn + ex
    qy = yn + ey
    if blocked[int(qy + 0.5) * W + int(qx + 0.5)] == 1:
        return True
    span = abs(ex)
    if abs(ey) > span:
        span = abs(ey)
    m = int(4 * span)
    for s in range(1, m):
        t = s / m
        sx = int(xn + t * ex + 0.5)
        sy = int(yn + t * ey + 0.5)
        if blocked[sy * W + sx] == 1:
            return True
    return False


@_jit
def edge_ok_2d(xn, yn, ex, ey, W, H, cut_code, zx, zy, blocked, has_blocked):
    """Full admissibility of reading a value from neighbor (xn+ex, yn+ey)."""
    qx = xn + ex
    qy = yn + ey
    if qx < 0 or qx >= W or qy < 0 or qy >= H:
        return False
    if not cut_ok(float(xn), float(yn), float(ex), float(ey), cut_code, zx, zy):
        return False
    if has_blocked == 1 and _blocked_path(float(xn), float(yn), float(ex), float(ey), W, blocked):
        return False
    return True


# ---------------------------------------------------------------------------
# metric costs


@_jit
def _cost_2d(variant, speed, m11, m12, m22, ox, oy, wgt, j, ux, uy):
    if variant == 0:
        c = speed[j] * np.sqrt(ux * ux + uy * uy)
    else:
        q = m11[j] * ux * ux + 2.0 * m12[j] * ux * uy + m22[j] * uy * uy
        if variant == 2:
            d = ox[j] * ux + oy[j] * uy
            if d > 0.0:
                q += d * d
        c = np.sqrt(q)
    return wgt[j] * c


@_jit
def _min_lin_sqrt(va, dv, p2, p1, p0, lo, hi):
    """Exact minimum over [lo, hi] of va + dv*t + sqrt(p0 + p1 t + p2 t^2)
    for a PSD quadratic radicand (stationary points solve a quadratic).
    Returns (value, argmin)."""
    q = p0 + lo * (p1 + lo * p2)
    best = va + dv * lo + np.sqrt(q if q > 0.0 else 0.0)
    tbest = lo
    q = p0 + hi * (p1 + hi * p2)
    f = va + dv * hi + np.sqrt(q if q > 0.0 else 0.0)
    if f < best:
        best = f
        tbest = hi
    if p2 > 0.0:
        e = p2 - dv * dv
        if e > 0.0:
            disc = 4.0 * p2 * p0 - p1 * p1
            if disc < 0.0:
                disc = 0.0
            s = abs(dv) * np.sqrt(disc / e)
            for sgn in (-1.0, 1.0):
                t = (-p1 + sgn * s) / (2.0 * p2)
                if lo < t < hi:
                    q = p0 + t * (p1 + t * p2)
                    f = va + dv * t + np.sqrt(q if q > 0.0 else 0.0)
                    if f < best:
                        best = f
                        tbest = t
    return best, tbest


@_jit
def _face_min_2d(variant, speed, m11, m12, m22, ox, oy, wgt, j,
                 va, eax, eay, vb, ebx, eby):
    """Exact simplex-face minimum: the objective along the face is linear
    interpolation of values plus the metric cost of the interpolated
    tangent, a sqrt of a quadratic in t (piecewise for the asymmetric
    part's sign switch). Returns (value, argmin t)."""
    w2 = wgt[j] * wgt[j]
    dv = vb - va
    dx = ebx - eax
    dy = eby - eay
    if variant == 0:
        s2 = speed[j] * speed[j] * w2
        p0 = s2 * (eax * eax + eay * eay)
        p1 = s2 * 2.0 * (eax * dx + eay * dy)
        p2 = s2 * (dx * dx + dy * dy)
        return _min_lin_sqrt(va, dv, p2, p1, p0, 0.0, 1.0)
    a11 = m11[j]
    a12 = m12[j]
    a22 = m22[j]
    p0 = w2 * (a11 * eax * eax + 2.0 * a12 * eax * eay + a22 * eay * eay)
    p1 = w2 * 2.0 * (a11 * eax * dx + a12 * (eax * dy + eay * dx) + a22 * eay * dy)
    p2 = w2 * (a11 * dx * dx + 2.0 * a12 * dx * dy + a22 * dy * dy)
    if variant == 1:
        return _min_lin_sqrt(va, dv, p2, p1, p0, 0.0, 1.0)
    # asymmetric part: <omega, u(t)> = l0 + l1 t with u = -(ea + t d)
    l0 = -(ox[j] * eax + oy[j] * eay)
    l1 = -(ox[j] * dx + oy[j] * dy)
    q0 = p0 + w2 * l0 * l0
    q1 = p1 + w2 * 2.0 * l0 * l1
    q2 = p2 + w2 * l1 * l1
    if l1 == 0.0:
        if l0 > 0.0:
            return _min_lin_sqrt(va, dv, q2, q1, q0, 0.0, 1.0)
        return _min_lin_sqrt(va, dv, p2, p1, p0, 0.0, 1.0)
    ts = -l0 / l1
    if l1 > 0.0:
        # positive part active for t > ts
        lo_pos, hi_pos = ts, 1.0
        lo_neg, hi_neg = 0.0, ts
    else:
        lo_pos, hi_pos = 0.0, ts
        lo_neg, hi_neg = ts, 1.0
    best = INF
    tbest = 0.0
    if hi_pos > 0.0 and lo_pos < 1.0:
        lp = lo_pos if lo_pos > 0.0 else 0.0
        hp = hi_pos if hi_pos < 1.0 else 1.0
        if hp >= lp:
            best, tbest = _min_lin_sqrt(va, dv, q2, q1, q0, lp, hp)
    if hi_neg > 0.0 and lo_neg < 1.0:
        ln = lo_neg if lo_neg > 0.0 else 0.0
        hn = hi_neg if hi_neg < 1.0 else 1.0
        if hn >= ln:
            f, t = _min_lin_sqrt(va, dv, p2, p1, p0, ln, hn)
            if f < best:
                best = f
                tbest = t
    return best, tbest


# ---------------------------------------------------------------------------
# 2D constrained label-setting solver


@_jit
def solve_2d(H, W, variant, speed, m11, m12, m22, ox, oy, wgt,
             offs, src, cut_code, zx, zy, blocked, has_blocked,
             stop_mask, early_stop, value_cap):
    """Single-pass label-setting scheme over the fixed symmetric stencil.

    Updates use the two simplex faces adjacent to the offset pointing at
    the freshly accepted point, plus the single-edge endpoint values.
    Returns (dist, state, reached, pa, pb, pt): state 0 far / 1 trial / 2
    accepted; reached = flat index of the first accepted stop point (-1:
    none); (pa, pb, pt) record the minimizing simplex of each update so
    geodesics can be traced by walking the parent chain (pb = -1 for
    single-edge updates; geodesic support point = (1-t) pos(pa) + t
    pos(pb)).
    """
    N = H * W
    dist = np.full(N, INF)
    state = np.zeros(N, np.uint8)
    pa = np.full(N, -1, np.int64)
    pb = np.full(N, -1, np.int64)
    pt = np.zeros(N, np.float64)
    K = offs.shape[0]
    opp = np.zeros(K, np.int64)
    for a2 in range(K):
        for b2 in range(K):
            if offs[a2, 0] == -offs[b2, 0] and offs[a2, 1] == -offs[b2, 1]:
                opp[a2] = b2
    hv = np.empty(1024, np.float64)
    hi = np.empty(1024, np.int64)
    hn = 0
    for s_i in range(src.shape[0]):
        s = src[s_i]
        if dist[s] != 0.0:
            dist[s] = 0.0
            state[s] = 1
            hv, hi, hn = _heap_push(hv, hi, hn, 0.0, s)
    reached = -1
    while hn > 0:
        v, i, hn = _heap_pop(hv, hi, hn)
        if state[i] == 2:
            continue
        if v > dist[i]:
            continue
        state[i] = 2
        if value_cap >= 0.0 and v > value_cap:
            break
        if early_stop == 1 and stop_mask[i] == 1:
            reached = i
            break
        xi = i % W
        yi = i // W
        for a in range(K):
            xn = xi + offs[a, 0]
            yn = yi + offs[a, 1]
            if xn < 0 or xn >= W or yn < 0 or yn >= H:
                continue
            j = yn * W + xn
            if state[j] == 2:
                continue
            if has_blocked == 1 and blocked[j] == 1:
                continue
            em = opp[a]
            emx = offs[em, 0]
            emy = offs[em, 1]
            if not edge_ok_2d(xn, yn, emx, emy, W, H, cut_code, zx, zy,
                              blocked, has_blocked):
                continue
            best = v + _cost_2d(variant, speed, m11, m12, m22, ox, oy, wgt,
                                j, float(-emx), float(-emy))
            best_pa = i
            best_pb = -1
            best_t = 0.0
            for w2 in range(2):
                p = (em - 1 + 2 * w2) % K
                epx = offs[p, 0]
                epy = offs[p, 1]
                if not edge_ok_2d(xn, yn, epx, epy, W, H, cut_code, zx, zy,
                                  blocked, has_blocked):
                    continue
                jp = (yn + epy) * W + (xn + epx)
                vb = dist[jp]
                if vb == INF:
                    continue
                if not cut_ok(float(xn), float(yn), 0.5 * (emx + epx),
                              0.5 * (emy + epy), cut_code, zx, zy):
                    continue
                fm, tm = _face_min_2d(variant, speed, m11, m12, m22, ox, oy,
                                      wgt, j, v, float(emx), float(emy),
                                      vb, float(epx), float(epy))
                if fm < best:
                    best = fm
                    best_t = tm
                    if tm >= 1.0:
                        best_pa = jp
                        best_pb = -1
                        best_t = 0.0
                    elif tm <= 0.0:
                        best_pa = i
                        best_pb = -1
                        best_t = 0.0
                    else:
                        best_pa = i
                        best_pb = jp
            if best < dist[j]:
                dist[j] = best
                state[j] = 1
                pa[j] = best_pa
                pb[j] = best_pb
                pt[j] = best_t
                hv, hi, hn = _heap_push(hv, hi, hn, best, j)
    return dist, state, reached, pa, pb, pt


# ---------------------------------------------------------------------------
# orientation-lifted solver (curvature-penalized metrics)


@_jit
def _cost_lift(P, wgt, K, beta, vs_code, nsp, nk, usx, usy, nu):
    sn = np.sqrt(usx * usx + usy * usy)
    if sn == 0.0:
        if nu == 0.0:
            return 0.0
        if vs_code == 0:
            return wgt[nsp] * P[nsp * K + nk] * np.sqrt(beta) * abs(nu)
        return INF
    if vs_code == 0:
        c = np.sqrt(sn * sn + beta * nu * nu)
    else:
        c = sn + beta * nu * nu / sn
    return wgt[nsp] * P[nsp * K + nk] * c


@_jit
def _face_obj_lift(t, P, wgt, K, beta, vs_code, nsp, nk,
                   va, uax, uay, nua, vb, ubx, uby, nub):
    usx = (1.0 - t) * uax + t * ubx
    usy = (1.0 - t) * uay + t * uby
    nu = (1.0 - t) * nua + t * nub
    return (1.0 - t) * va + t * vb + _cost_lift(P, wgt, K, beta, vs_code,
                                                nsp, nk, usx, usy, nu)


@_jit
def _face_min_lift(P, wgt, K, beta, vs_code, nsp, nk,
                   va, uax, uay, nua, vb, ubx, uby, nub):
    """Simplex-face minimum on the lifted grid, returning (value, t).

    The Reeds-Shepp-forward cost is sqrt(|u|^2 + beta nu^2): a
    sqrt-of-quadratic in t, solved in closed form; the elastica cost uses
    a golden-section search."""
    if vs_code == 0:
        w = wgt[nsp] * P[nsp * K + nk]
        w2 = w * w
        dx = ubx - uax
        dy = uby - uay
        dn = nub - nua
        p0 = w2 * (uax * uax + uay * uay + beta * nua * nua)
        p1 = w2 * 2.0 * (uax * dx + uay * dy + beta * nua * dn)
        p2 = w2 * (dx * dx + dy * dy + beta * dn * dn)
        return _min_lin_sqrt(va, vb - va, p2, p1, p0, 0.0, 1.0)
    f0 = _face_obj_lift(0.0, P, wgt, K, beta, vs_code, nsp, nk,
                        va, uax, uay, nua, vb, ubx, uby, nub)
    f1 = _face_obj_lift(1.0, P, wgt, K, beta, vs_code, nsp, nk,
                        va, uax, uay, nua, vb, ubx, uby, nub)
    a = 0.0
    b = 1.0
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc = _face_obj_lift(c, P, wgt, K, beta, vs_code, nsp, nk,
                        va, uax, uay, nua, vb, ubx, uby, nub)
    fd = _face_obj_lift(d, P, wgt, K, beta, vs_code, nsp, nk,
                        va, uax, uay, nua, vb, ubx, uby, nub)
    for _ in range(_GOLD_ITERS):
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - _GOLD * (b - a)
            fc = _face_obj_lift(c, P, wgt, K, beta, vs_code, nsp, nk,
                                va, uax, uay, nua, vb, ubx, uby, nub)
        else:
            a = c
            c = d
            fc = fd
            d = a + _GOLD * (b - a)
            fd = _face_obj_lift(d, P, wgt, K, beta, vs_code, nsp, nk,
                                va, uax, uay, nua, vb, ubx, uby, nub)
    best = f0
    tbest = 0.0
    if f1 < best:
        best = f1
        tbest = 1.0
    if fc < best:
        best = fc
        tbest = c
    if fd < best:
        best = fd
        tbest = d
    return best, tbest


@_jit
def _update_lifted(j, nx, ny, nk, W, H, K, P, wgt, beta, vs_code, dtheta,
                   e1, e2, dist, cut_code, zx, zy, blocked, has_blocked):
    """Full semi-Lagrangian update of the lifted point (nx, ny, nk).

    Stencil vertices (by arrival tangent): the forward spatial steps e1/e2
    at angular change {-1, 0, +1} plus the in-place rotations, i.e. values
    may flow from (x - e, nk or nk -+ 1) and (x, nk -+ 1). Mixed
    move-and-turn vertices keep the elastica metric (infinite for pure
    rotations) connected across orientation planes. Simplex faces pair
    each spatial direction's angular variants, the two spatial directions,
    and each turning vertex with its pure rotation.
    Returns (best, parent_a, parent_b, t).
    """
    nsp = ny * W + nx
    km = (nk - 1) % K
    kp = (nk + 1) % K
    best = INF
    bpa = -1
    bpb = -1
    bt = 0.0

    # vertex table: spatial dir (0 none, 1 e1, 2 e2) x angular nu sign
    # indices: 0:A0 1:Ap 2:Am 3:B0 4:Bp 5:Bm 6:Rp 7:Rm
    vidx = np.full(8, -1, np.int64)
    vval = np.full(8, INF)
    vux = np.zeros(8)
    vuy = np.zeros(8)
    vnu = np.zeros(8)

    for sdir in range(2):
        ex = e1[nk, 0] if sdir == 0 else e2[nk, 0]
        ey = e1[nk, 1] if sdir == 0 else e2[nk, 1]
        px = nx - ex
        py = ny - ey
        if px < 0 or px >= W or py < 0 or py >= H:
            continue
        if not edge_ok_2d(nx, ny, -ex, -ey, W, H, cut_code, zx, zy,
                          blocked, has_blocked):
            continue
        spn = py * W + px
        base = 3 * sdir
        for da in range(3):
            if da == 0:
                kq = nk
                nu = 0.0
            elif da == 1:
                kq = km
                nu = dtheta
            else:
                kq = kp
                nu = -dtheta
            jj = spn * K + kq
            vidx[base + da] = jj
            vval[base + da] = dist[jj]
            vux[base + da] = float(ex)
            vuy[base + da] = float(ey)
            vnu[base + da] = nu
    vidx[6] = nsp * K + km
    vval[6] = dist[vidx[6]]
    vnu[6] = dtheta
    vidx[7] = nsp * K + kp
    vval[7] = dist[vidx[7]]
    vnu[7] = -dtheta

    # singletons
    for vi in range(8):
        if vval[vi] == INF:
            continue
        f = vval[vi] + _cost_lift(P, wgt, K, beta, vs_code, nsp, nk,
                                  vux[vi], vuy[vi], vnu[vi])
        if f < best:
            best = f
            bpa = vidx[vi]
            bpb = -1
            bt = 0.0

    # simplex faces (pairs of vertex-table indices)
    for fi in range(9):
        if fi == 0:
            a2, b2 = 0, 3   # e1 vs e2 at fixed orientation
        elif fi == 1:
            a2, b2 = 0, 1
        elif fi == 2:
            a2, b2 = 0, 2
        elif fi == 3:
            a2, b2 = 3, 4
        elif fi == 4:
            a2, b2 = 3, 5
        elif fi == 5:
            a2, b2 = 1, 6   # turn-while-moving vs pure rotation
        elif fi == 6:
            a2, b2 = 2, 7
        elif fi == 7:
            a2, b2 = 4, 6
        else:
            a2, b2 = 5, 7
        va = vval[a2]
        vb = vval[b2]
        if va == INF or vb == INF:
            continue
        if fi == 0 and not cut_ok(float(nx), float(ny),
                                  -0.5 * (vux[a2] + vux[b2]),
                                  -0.5 * (vuy[a2] + vuy[b2]),
                                  cut_code, zx, zy):
            continue
        f, t = _face_min_lift(P, wgt, K, beta, vs_code, nsp, nk,
                              va, vux[a2], vuy[a2], vnu[a2],
                              vb, vux[b2], vuy[b2], vnu[b2])
        if f < best:
            best = f
            if 0.0 < t < 1.0:
                bpa = vidx[a2]
                bpb = vidx[b2]
                bt = t
            else:
                bpa = vidx[b2] if t >= 1.0 else vidx[a2]
                bpb = -1
                bt = 0.0
    return best, bpa, bpb, bt


@_jit
def solve_lifted(H, W, K, P, wgt, beta, vs_code, dtheta, e1, e2, src,
                 cut_code, zx, zy, blocked, has_blocked,
                 stop_mask_sp, early_stop, value_cap):
    """Label-setting solver on the orientation-lifted grid.

    An accepted point (x, k) can feed x + e1(k) and x + e2(k) at the same
    orientation and (x, k +- 1) through in-place rotations; each candidate
    receives a full stencil update. Returns (dist, state, reached, pa, pb,
    pt) with the same parent-chain convention as solve_2d.
    """
    N = H * W * K
    dist = np.full(N, INF)
    state = np.zeros(N, np.uint8)
    pa = np.full(N, -1, np.int64)
    pb = np.full(N, -1, np.int64)
    pt = np.zeros(N, np.float64)
    hv = np.empty(4096, np.float64)
    hi = np.empty(4096, np.int64)
    hn = 0
    for s_i in range(src.shape[0]):
        s = src[s_i]
        if dist[s] != 0.0:
            dist[s] = 0.0
            state[s] = 1
            hv, hi, hn = _heap_push(hv, hi, hn, 0.0, s)
    reached = -1
    while hn > 0:
        v, i, hn = _heap_pop(hv, hi, hn)
        if state[i] == 2:
            continue
        if v > dist[i]:
            continue
        state[i] = 2
        sp = i // K
        k = i % K
        if value_cap >= 0.0 and v > value_cap:
            break
        if early_stop == 1 and stop_mask_sp[sp] == 1:
            reached = i
            break
        xi = sp % W
        yi = sp // W
        for c in range(4):
            if c == 0:
                nx = xi + e1[k, 0]
                ny = yi + e1[k, 1]
                nk = k
            elif c == 1:
                nx = xi + e2[k, 0]
                ny = yi + e2[k, 1]
                nk = k
            elif c == 2:
                nx = xi
                ny = yi
                nk = (k - 1) % K
            else:
                nx = xi
                ny = yi
                nk = (k + 1) % K
            if nx < 0 or nx >= W or ny < 0 or ny >= H:
                continue
            nsp = ny * W + nx
            j = nsp * K + nk
            if state[j] == 2:
                continue
            if has_blocked == 1 and blocked[nsp] == 1:
                continue
            best, bpa, bpb, bt = _update_lifted(
                j, nx, ny, nk, W, H, K, P, wgt, beta, vs_code, dtheta,
                e1, e2, dist, cut_code, zx, zy, blocked, has_blocked)
            if best < dist[j]:
                dist[j] = best
                state[j] = 1
                pa[j] = bpa
                pb[j] = bpb
                pt[j] = bt
                hv, hi, hn = _heap_push(hv, hi, hn, best, j)
    return dist, state, reached, pa, pb, pt


# ---------------------------------------------------------------------------
# exact Euclidean distance transform (two-pass lower envelope on squared
# distances)


@_jit
def _edt_1d(f, d, v, z, n):
    k = -1
    for q in range(n):
        if f[q] == INF:
            continue
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -1e30
            z[1] = 1e30
            continue
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = 1e30
    if k < 0:
        for q in range(n):
            d[q] = INF
        return
    kk = 0
    for q in range(n):
        while z[kk + 1] < q:
            kk += 1
        dq = float(q - v[kk])
        d[q] = dq * dq + f[v[kk]]


@_jit
def edt_sq(sites):
    """Squared Euclidean distance to the nearest True pixel of ``sites``."""
    H, W = sites.shape
    tmp = np.empty((H, W))
    out = np.empty((H, W))
    n = H if H > W else W
    f = np.empty(n)
    d = np.empty(n)
    v = np.empty(n, np.int64)
    z = np.empty(n + 1)
    for x in range(W):
        for y in range(H):
            f[y] = 0.0 if sites[y, x] == 1 else INF
        _edt_1d(f, d, v, z, H)
        for y in range(H):
            tmp[y, x] = d[y]
    for y in range(H):
        for x in range(W):
            f[x] = tmp[y, x]
        _edt_1d(f, d, v, z, W)
        for x in range(W):
            out[y, x] = d[x]
    return out
