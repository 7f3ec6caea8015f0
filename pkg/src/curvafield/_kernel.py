"""Compiled hot path: field evaluation and RK4 curve integration.

Mirrors the reference implementation in ``field_eval``/``trajectory`` on
flat arrays; the test suite asserts the two paths agree.  Stage points of a
Runge-Kutta step may poke slightly outside the domain near the boundary,
so stage evaluation uses a relaxed containment tolerance with clamped face
distances, while committed samples are checked strictly.
"""

import math

from numba import njit

OUT_CONVERGED = 0
OUT_MAX_STEPS = 1
OUT_LEFT_DOMAIN = 2

# cell / face kind codes, kept in sync with fields.py
_CONST = 0
_TO_GOAL = 1
_TO_EXIT = 2
_FIXED = 0


@njit(cache=True)
def _bump(s):
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    a = math.exp(-1.0 / s) / s
    b = math.exp(-1.0 / (1.0 - s)) / (1.0 - s)
    return a / (a + b)


@njit(cache=True)
def _walk(normals, offsets, neighbors, t, x, y, tol):
    """Walk toward x from triangle t; returns (tri, min_distance) or (-1, d)."""
    for _ in range(256):
        dmin = 1e300
        kmin = 0
        for k in range(3):
            d = normals[t, k, 0] * x + normals[t, k, 1] * y + offsets[t, k]
            if d < dmin:
                dmin = d
                kmin = k
        if dmin >= -tol:
            return t, dmin
        nb = neighbors[t, kmin]
        if nb < 0:
            return -1, dmin
        t = nb
    return -1, -1e300


@njit(cache=True)
def _grid_locate(normals, offsets, grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                 grid_start, grid_items, x, y, tol):
    bx = int((x - grid_ox) / grid_cell)
    by = int((y - grid_oy) / grid_cell)
    if bx < 0 or bx >= grid_nx or by < 0 or by >= grid_ny:
        return -1
    i = by * grid_nx + bx
    for idx in range(grid_start[i], grid_start[i + 1]):
        t = grid_items[idx]
        dmin = 1e300
        for k in range(3):
            d = normals[t, k, 0] * x + normals[t, k, 1] * y + offsets[t, k]
            if d < dmin:
                dmin = d
        if dmin >= -tol:
            return t
    return -1


@njit(cache=True)
def _eval(normals, offsets, neighbors, face_a, face_b,
          cell_kind, cell_vec, exit_mid, exit_local,
          face_kind, face_vec, gx, gy, diam,
          grid_ox, grid_oy, grid_cell, grid_nx, grid_ny, grid_start, grid_items,
          t_hint, x, y, tol_relax):
    """Blended field at (x, y); returns (vx, vy, tri) with tri=-1 on failure."""
    t, _ = _walk(normals, offsets, neighbors, t_hint, x, y, tol_relax)
    if t < 0:
        t = _grid_locate(normals, offsets, grid_ox, grid_oy, grid_cell,
                         grid_nx, grid_ny, grid_start, grid_items, x, y, tol_relax)
        if t < 0:
            return 0.0, 0.0, -1

    d0 = max(0.0, normals[t, 0, 0] * x + normals[t, 0, 1] * y + offsets[t, 0])
    d1 = max(0.0, normals[t, 1, 0] * x + normals[t, 1, 1] * y + offsets[t, 1])
    d2 = max(0.0, normals[t, 2, 0] * x + normals[t, 2, 1] * y + offsets[t, 2])
    fs = 0
    ds = d0
    if d1 < ds:
        fs = 1
        ds = d1
    if d2 < ds:
        fs = 2
        ds = d2

    # cell vector
    ck = cell_kind[t]
    if ck == _CONST:
        cvx = cell_vec[t, 0]
        cvy = cell_vec[t, 1]
    elif ck == _TO_GOAL:
        cvx = gx - x
        cvy = gy - y
        n = math.hypot(cvx, cvy)
        if n < 1e-12:
            return 0.0, 0.0, t
        cvx /= n
        cvy /= n
    else:  # _TO_EXIT
        cvx = exit_mid[t, 0] - x
        cvy = exit_mid[t, 1] - y
        n = math.hypot(cvx, cvy)
        if n < 1e-9 * diam:
            k = exit_local[t]
            cvx = -normals[t, k, 0]
            cvy = -normals[t, k, 1]
        else:
            cvx /= n
            cvy /= n

    near = 1e-9 * diam
    second = d0 + d1 + d2 - ds - max(max(d0, d1), d2)
    if second < near:
        return cvx, cvy, t

    prod = 1.0
    if fs != 0:
        prod *= (d0 - ds) / d0
    if fs != 1:
        prod *= (d1 - ds) / d1
    if fs != 2:
        prod *= (d2 - ds) / d2
    sigma = 1.0 - prod
    if sigma < 0.0:
        sigma = 0.0
    elif sigma > 1.0:
        sigma = 1.0

    # face vector of the closest face
    if face_kind[t, fs] == _FIXED:
        fvx = face_vec[t, fs, 0]
        fvy = face_vec[t, fs, 1]
    else:
        fvx = gx - x
        fvy = gy - y
        n = math.hypot(fvx, fvy)
        if n < 1e-12:
            return cvx, cvy, t
        fvx /= n
        fvy /= n

    w = _bump(sigma)
    vx = (1.0 - w) * fvx + w * cvx
    vy = (1.0 - w) * fvy + w * cvy
    n = math.hypot(vx, vy)
    if n < 1e-9:
        return cvx, cvy, t
    return vx / n, vy / n, t


@njit(cache=True)
def integrate_kernel(normals, offsets, neighbors, tri_faces, face_a, face_b,
                     cell_kind, cell_vec, exit_mid, exit_local,
                     face_kind, face_vec, gx, gy, diam,
                     grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                     grid_start, grid_items,
                     x0, y0, t0, h, eps_goal, max_steps,
                     samples, trans):
    """Fixed-step RK4 with transition logging.

    samples: (max_steps + 1, 2) output; trans: (cap, 4) output rows
    (step, from, to, face).  Returns (n_samples, n_trans, outcome).
    """
    tol_strict = 1e-12 * diam
    tol_relax = 1e-6 * diam

    x = x0
    y = y0
    t = t0
    samples[0, 0] = x
    samples[0, 1] = y
    ns = 1
    nt = 0
    outcome = OUT_MAX_STEPS

    for step in range(max_steps):
        dgx = gx - x
        dgy = gy - y
        dist = math.hypot(dgx, dgy)
        if dist <= eps_goal:
            outcome = OUT_CONVERGED
            break
        hs = h
        if dist < 2.0 * h:
            hs = dist * 0.5
            if hs > h:
                hs = h

        # A committed point must pass the strict containment walk; near the
        # boundary an RK4 step can overshoot, so retry with a halved step.
        ok = False
        tt = t
        nx = x
        ny_ = y
        t_new = t
        for _ in range(8):
            v1x, v1y, tt = _eval(normals, offsets, neighbors, face_a, face_b,
                                 cell_kind, cell_vec, exit_mid, exit_local,
                                 face_kind, face_vec, gx, gy, diam,
                                 grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                                 grid_start, grid_items, t, x, y, tol_relax)
            if tt < 0:
                break
            v2x, v2y, t2 = _eval(normals, offsets, neighbors, face_a, face_b,
                                 cell_kind, cell_vec, exit_mid, exit_local,
                                 face_kind, face_vec, gx, gy, diam,
                                 grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                                 grid_start, grid_items, tt,
                                 x + 0.5 * hs * v1x, y + 0.5 * hs * v1y,
                                 tol_relax)
            if t2 < 0:
                hs *= 0.5
                continue
            v3x, v3y, t3 = _eval(normals, offsets, neighbors, face_a, face_b,
                                 cell_kind, cell_vec, exit_mid, exit_local,
                                 face_kind, face_vec, gx, gy, diam,
                                 grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                                 grid_start, grid_items, t2,
                                 x + 0.5 * hs * v2x, y + 0.5 * hs * v2y,
                                 tol_relax)
            if t3 < 0:
                hs *= 0.5
                continue
            v4x, v4y, t4 = _eval(normals, offsets, neighbors, face_a, face_b,
                                 cell_kind, cell_vec, exit_mid, exit_local,
                                 face_kind, face_vec, gx, gy, diam,
                                 grid_ox, grid_oy, grid_cell, grid_nx, grid_ny,
                                 grid_start, grid_items, t3,
                                 x + hs * v3x, y + hs * v3y, tol_relax)
            if t4 < 0:
                hs *= 0.5
                continue

            nx = x + hs / 6.0 * (v1x + 2.0 * v2x + 2.0 * v3x + v4x)
            ny_ = y + hs / 6.0 * (v1y + 2.0 * v2y + 2.0 * v3y + v4y)

            t_new, dmin = _walk(normals, offsets, neighbors, tt, nx, ny_,
                                tol_strict)
            if t_new >= 0:
                ok = True
                break
            hs *= 0.5
        if not ok:
            outcome = OUT_LEFT_DOMAIN
            break

        if t_new != tt:
            # Log the chain of face crossings along the committed segment.
            cur = tt
            ax_ = x
            ay_ = y
            for _ in range(32):
                if cur == t_new:
                    break
                kx = -1
                tmin = 2.0
                for k in range(3):
                    da = (normals[cur, k, 0] * ax_ + normals[cur, k, 1] * ay_
                          + offsets[cur, k])
                    db = (normals[cur, k, 0] * nx + normals[cur, k, 1] * ny_
                          + offsets[cur, k])
                    if db < 0.0 and da > db:
                        tc = da / (da - db)
                        if tc < 0.0:
                            tc = 0.0
                        if tc < tmin:
                            tmin = tc
                            kx = k
                if kx < 0:
                    break
                nxt = neighbors[cur, kx]
                if nxt < 0:
                    break
                if nt < trans.shape[0]:
                    trans[nt, 0] = step
                    trans[nt, 1] = cur
                    trans[nt, 2] = nxt
                    trans[nt, 3] = tri_faces[cur, kx]
                    nt += 1
                ax_ = ax_ + tmin * (nx - ax_)
                ay_ = ay_ + tmin * (ny_ - ay_)
                cur = nxt

        x = nx
        y = ny_
        t = t_new
        samples[ns, 0] = x
        samples[ns, 1] = y
        ns += 1

    return ns, nt, outcome
