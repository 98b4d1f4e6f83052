"""Compiled inner loops for the planar articulated vehicle.

Generalized coordinates are ``[cx, cy, theta, phi...]`` where ``(cx, cy)``
is the system centre of mass, ``theta`` the fuselage heading, and ``phi``
the hinged fold angles (left chain root->tip, then right). Using the system
COM as the translational coordinate decouples translation from the internal
motion in the mass matrix, so internal forces leave the COM velocity
untouched bit for bit.

Chain body ``b`` on side ``s`` (+1 left, -1 right) has axis angle
``theta + s*pi/2 - s*sum(phi)``: positive fold rotates every segment forward.

Everything here works on plain arrays so it can run under ``nogil``.
"""
import math

import numpy as np
from numba import njit

HALF_PI = 0.5 * math.pi

# per-step diagnostics layout in ``info``
I_NCONTACT = 0
I_CONTACT_PE = 1
I_NORMAL_SUM = 2


@njit(cache=True, nogil=True)
def chain_start(side, n):
    return 1 if side == 1 else n + 1


@njit(cache=True, nogil=True)
def frames(side, qindex, length, hw, n, q, v, beta, betad, start, sbias):
    """Axis angles/rates, inboard points (relative to the fuselage centre) and their bias accelerations."""
    theta = q[2]
    thd = v[2]
    beta[0] = theta
    betad[0] = thd
    start[0, 0] = 0.0
    start[0, 1] = 0.0
    sbias[0, 0] = 0.0
    sbias[0, 1] = 0.0
    for s in (1, -1):
        cs = chain_start(s, n)
        a0 = theta + s * HALF_PI
        px = hw * math.cos(a0)
        py = hw * math.sin(a0)
        bx = -thd * thd * px
        by = -thd * thd * py
        ang = a0
        angd = thd
        for b in range(cs, cs + n):
            k = qindex[b]
            if k >= 0:
                ang -= s * q[k]
                angd -= s * v[k]
            beta[b] = ang
            betad[b] = angd
            start[b, 0] = px
            start[b, 1] = py
            sbias[b, 0] = bx
            sbias[b, 1] = by
            ux = math.cos(ang)
            uy = math.sin(ang)
            L = length[b]
            px += L * ux
            py += L * uy
            bx -= angd * angd * L * ux
            by -= angd * angd * L * uy


@njit(cache=True, nogil=True)
def point_jac(side, qindex, n, start, b, rx, ry, J):
    """Jacobian (columns >= 2) of the relative position of a material point of body ``b`` at (rx, ry)."""
    J[:, :] = 0.0
    J[0, 2] = -ry
    J[1, 2] = rx
    if b == 0:
        return
    s = side[b]
    cs = chain_start(s, n)
    for k in range(cs, b + 1):
        c = qindex[k]
        if c >= 0:
            dx = rx - start[k, 0]
            dy = ry - start[k, 1]
            J[0, c] = s * dy
            J[1, c] = -s * dx


@njit(cache=True, nogil=True)
def ang_jac(side, qindex, n, b, Jw):
    Jw[:] = 0.0
    Jw[2] = 1.0
    if b == 0:
        return
    s = side[b]
    cs = chain_start(s, n)
    for k in range(cs, b + 1):
        c = qindex[k]
        if c >= 0:
            Jw[c] = -s


@njit(cache=True, nogil=True)
def body_com_rel(com, beta, start, b):
    if b == 0:
        return 0.0, 0.0
    return (start[b, 0] + com[b] * math.cos(beta[b]),
            start[b, 1] + com[b] * math.sin(beta[b]))


@njit(cache=True, nogil=True)
def mass_system(mass, com, inertia, side, qindex, n, nq, beta, betad, start, sbias,
                M, bias_q, Jbar, rbar, bbar, Jc, J):
    """Mass matrix and velocity-product generalized force (``-sum m J^T Jdot v``)."""
    nb = mass.shape[0]
    mtot = 0.0
    for b in range(nb):
        mtot += mass[b]
    rbar[:] = 0.0
    bbar[:] = 0.0
    Jbar[:, :] = 0.0
    # per-body COM Jacobians and biases, and their mass-weighted mean
    for b in range(nb):
        rx, ry = body_com_rel(com, beta, start, b)
        point_jac(side, qindex, n, start, b, rx, ry, J)
        Jc[b, :, :] = J
        m = mass[b]
        rbar[0] += m * rx
        rbar[1] += m * ry
        if b > 0:
            c = com[b]
            bd = betad[b]
            bx = sbias[b, 0] - bd * bd * c * math.cos(beta[b])
            by = sbias[b, 1] - bd * bd * c * math.sin(beta[b])
        else:
            bx = 0.0
            by = 0.0
        Jc[b, 0, 0] = bx  # stash bias in the unused translational columns
        Jc[b, 1, 0] = by
        bbar[0] += m * bx
        bbar[1] += m * by
        for i in range(2):
            for j in range(2, nq):
                Jbar[i, j] += m * J[i, j]
    rbar /= mtot
    bbar /= mtot
    Jbar /= mtot

    M[:, :] = 0.0
    bias_q[:] = 0.0
    M[0, 0] = mtot
    M[1, 1] = mtot
    Jw = np.zeros(nq)
    for b in range(nb):
        m = mass[b]
        bx = Jc[b, 0, 0] - bbar[0]
        by = Jc[b, 1, 0] - bbar[1]
        for j in range(2, nq):
            dj0 = Jc[b, 0, j] - Jbar[0, j]
            dj1 = Jc[b, 1, j] - Jbar[1, j]
            bias_q[j] -= m * (dj0 * bx + dj1 * by)
            for k in range(j, nq):
                dk0 = Jc[b, 0, k] - Jbar[0, k]
                dk1 = Jc[b, 1, k] - Jbar[1, k]
                M[j, k] += m * (dj0 * dk0 + dj1 * dk1)
        ang_jac(side, qindex, n, b, Jw)
        I = inertia[b]
        for j in range(2, nq):
            if Jw[j] != 0.0:
                for k in range(j, nq):
                    if Jw[k] != 0.0:
                        M[j, k] += I * Jw[j] * Jw[k]
    for j in range(2, nq):
        for k in range(j + 1, nq):
            M[k, j] = M[j, k]
    return mtot


@njit(cache=True, nogil=True)
def cholesky_inplace(A, nq):
    """Lower Cholesky factor of the rotational block ``A[2:, 2:]``; False if not SPD."""
    for j in range(2, nq):
        s = A[j, j]
        for k in range(2, j):
            s -= A[j, k] * A[j, k]
        if not (s > 0.0):
            return False
        d = math.sqrt(s)
        A[j, j] = d
        for i in range(j + 1, nq):
            t = A[i, j]
            for k in range(2, j):
                t -= A[i, k] * A[j, k]
            A[i, j] = t / d
    return True


@njit(cache=True, nogil=True)
def cholesky_solve(Lf, nq, rhs, out):
    for i in range(2, nq):
        t = rhs[i]
        for k in range(2, i):
            t -= Lf[i, k] * out[k]
        out[i] = t / Lf[i, i]
    for i in range(nq - 1, 1, -1):
        t = out[i]
        for k in range(i + 1, nq):
            t -= Lf[k, i] * out[k]
        out[i] = t / Lf[i, i]


@njit(cache=True, nogil=True)
def hinge_torque(k, c, kb, phimax, phi, rate):
    tau = -k * phi - c * rate
    if phi < 0.0:
        tau -= kb * phi
    elif phi > phimax:
        tau -= kb * (phi - phimax)
    return tau


@njit(cache=True, nogil=True)
def hinge_energy(k, kb, phimax, phi):
    e = 0.5 * k * phi * phi
    if phi < 0.0:
        e += 0.5 * kb * phi * phi
    elif phi > phimax:
        d = phi - phimax
        e += 0.5 * kb * d * d
    return e


@njit(cache=True, nogil=True)
def body_contact(length, half_t, beta, start, rbar, q, b, radius):
    """Closest axis point of body ``b`` to the pole centre.

    Returns (penetration_or_negative_gap, nx, ny, axis_x_rel, axis_y_rel, half_thickness)
    with the axis point relative to the fuselage centre.
    """
    ox = q[0] - rbar[0]  # world position of the fuselage centre
    oy = q[1] - rbar[1]
    ax = ox + start[b, 0]
    ay = oy + start[b, 1]
    L = length[b]
    t = 0.0
    if L > 0.0:
        ux = math.cos(beta[b])
        uy = math.sin(beta[b])
        t = -(ax * ux + ay * uy)
        if t < 0.0:
            t = 0.0
        elif t > L:
            t = L
        ax += t * ux
        ay += t * uy
    d = math.sqrt(ax * ax + ay * ay)
    if d > 0.0:
        nx = ax / d
        ny = ay / d
    else:
        nx = 1.0
        ny = 0.0
    h = half_t[b]
    return radius + h - d, nx, ny, ax - ox, ay - oy, h


@njit(cache=True, nogil=True)
def point_velocity(v, J, Jbar, nq):
    vx = v[0]
    vy = v[1]
    for j in range(2, nq):
        vx += (J[0, j] - Jbar[0, j]) * v[j]
        vy += (J[1, j] - Jbar[1, j]) * v[j]
    return vx, vy


@njit(cache=True, nogil=True)
def add_point_force(Q, J, Jbar, nq, fx, fy):
    Q[0] += fx
    Q[1] += fy
    for j in range(2, nq):
        Q[j] += (J[0, j] - Jbar[0, j]) * fx + (J[1, j] - Jbar[1, j]) * fy


@njit(cache=True, nogil=True)
def accelerations(mass, com, inertia, length, half_t, side, qindex,
                  hk, hc, hkb, hmax, hw, n,
                  q, v, radius, kn, cn, mu, vreg, dt, use_contacts,
                  body_force, joint_tau, a, info, ws):
    """Generalized accelerations; returns False if the mass matrix is not SPD.

    ``dt > 0`` enables the no-overshoot friction limit used when stepping;
    ``dt <= 0`` evaluates the raw regularized Coulomb law.
    """
    nb = mass.shape[0]
    nq = q.shape[0]
    beta, betad, start, sbias, M, bias_q, Jbar, rbar, bbar, Jc, J, Q, tmp, tmp2 = ws
    frames(side, qindex, length, hw, n, q, v, beta, betad, start, sbias)
    mtot = mass_system(mass, com, inertia, side, qindex, n, nq, beta, betad, start, sbias,
                       M, bias_q, Jbar, rbar, bbar, Jc, J)
    Q[:] = bias_q
    # external forces at body COMs
    for b in range(nb):
        fx = body_force[b, 0]
        fy = body_force[b, 1]
        if fx != 0.0 or fy != 0.0:
            rx, ry = body_com_rel(com, beta, start, b)
            point_jac(side, qindex, n, start, b, rx, ry, J)
            add_point_force(Q, J, Jbar, nq, fx, fy)
    # hinges
    for b in range(1, nb):
        k = qindex[b]
        if k >= 0:
            Q[k] += hinge_torque(hk[b], hc[b], hkb[b], hmax[b], q[k], v[k]) + joint_tau[k - 3]
    if not cholesky_inplace(M, nq):
        return False
    info[I_NCONTACT] = 0.0
    info[I_CONTACT_PE] = 0.0
    info[I_NORMAL_SUM] = 0.0
    if use_contacts:
        for b in range(nb):
            pen, nx, ny, rx, ry, h = body_contact(length, half_t, beta, start, rbar, q, b, radius)
            if pen < 0.0:
                continue
            # material point on the body surface facing the pole
            px = rx - h * nx
            py = ry - h * ny
            point_jac(side, qindex, n, start, b, px, py, J)
            vx, vy = point_velocity(v, J, Jbar, nq)
            approach = -(vx * nx + vy * ny)
            N = kn * pen + cn * approach
            if N < 0.0:
                N = 0.0
            tx = -ny
            ty = nx
            slip = vx * tx + vy * ty
            ft = 0.0
            if mu > 0.0 and N > 0.0:
                sat = slip / vreg
                if sat > 1.0:
                    sat = 1.0
                elif sat < -1.0:
                    sat = -1.0
                ft = -mu * N * sat
                if dt > 0.0 and slip != 0.0:
                    # effective tangential mass at the point: 1 / (t^T J M^-1 J^T t)
                    tmp[:] = 0.0
                    add_point_force(tmp, J, Jbar, nq, tx, ty)
                    cholesky_solve(M, nq, tmp, tmp2)
                    w = 1.0 / mtot
                    for j in range(2, nq):
                        w += tmp[j] * tmp2[j]
                    fstop = abs(slip) / (w * dt)
                    if abs(ft) > fstop:
                        ft = -fstop if slip > 0.0 else fstop
            add_point_force(Q, J, Jbar, nq, N * nx + ft * tx, N * ny + ft * ty)
            info[I_NCONTACT] += 1.0
            info[I_CONTACT_PE] += 0.5 * kn * pen * pen
            info[I_NORMAL_SUM] += N
    a[0] = Q[0] / mtot
    a[1] = Q[1] / mtot
    cholesky_solve(M, nq, Q, a)
    return True


@njit(cache=True, nogil=True)
def tip_points(length, beta, start, n):
    """Outboard ends of both tip segments, relative to the fuselage centre."""
    lt = n
    rt = 2 * n
    return (start[lt, 0] + length[lt] * math.cos(beta[lt]),
            start[lt, 1] + length[lt] * math.sin(beta[lt]),
            start[rt, 0] + length[rt] * math.cos(beta[rt]),
            start[rt, 1] + length[rt] * math.sin(beta[rt]))


def make_workspace(nb, nq):
    return (np.zeros(nb), np.zeros(nb), np.zeros((nb, 2)), np.zeros((nb, 2)),
            np.zeros((nq, nq)), np.zeros(nq), np.zeros((2, nq)), np.zeros(2), np.zeros(2),
            np.zeros((nb, 2, nq)), np.zeros((2, nq)), np.zeros(nq), np.zeros(nq), np.zeros(nq))


@njit(cache=True, nogil=True)
def kinetic_energy(mass, com, inertia, length, side, qindex, hw, n, q, v, ws):
    nq = q.shape[0]
    beta, betad, start, sbias, M, bias_q, Jbar, rbar, bbar, Jc, J, Q, tmp, tmp2 = ws
    frames(side, qindex, length, hw, n, q, v, beta, betad, start, sbias)
    mass_system(mass, com, inertia, side, qindex, n, nq, beta, betad, start, sbias,
                M, bias_q, Jbar, rbar, bbar, Jc, J)
    e = 0.0
    for i in range(nq):
        for j in range(nq):
            e += v[i] * M[i, j] * v[j]
    return 0.5 * e


@njit(cache=True, nogil=True)
def chain_points(length, side, qindex, hw, n, com_all, mass, q, pts):
    """World positions: fuselage centre, then per side root + n hinge/tip points.

    ``pts`` has shape (1 + 2*(n+1), 2): row 0 fuselage centre, rows 1..n+1 the
    left chain root..tip, rows n+2..2n+2 the right chain root..tip.
    """
    nb = mass.shape[0]
    theta = q[2]
    # relative positions first
    pts[0, 0] = 0.0
    pts[0, 1] = 0.0
    row = 1
    rbx = 0.0
    rby = 0.0
    mtot = mass[0]
    for s in (1, -1):
        cs = chain_start(s, n)
        ang = theta + s * HALF_PI
        px = hw * math.cos(ang)
        py = hw * math.sin(ang)
        pts[row, 0] = px
        pts[row, 1] = py
        row += 1
        for b in range(cs, cs + n):
            k = qindex[b]
            if k >= 0:
                ang -= s * q[k]
            ux = math.cos(ang)
            uy = math.sin(ang)
            rbx += mass[b] * (px + com_all[b] * ux)
            rby += mass[b] * (py + com_all[b] * uy)
            mtot += mass[b]
            px += length[b] * ux
            py += length[b] * uy
            pts[row, 0] = px
            pts[row, 1] = py
            row += 1
    ox = q[0] - rbx / mtot
    oy = q[1] - rby / mtot
    for i in range(pts.shape[0]):
        pts[i, 0] += ox
        pts[i, 1] += oy


@njit(cache=True, nogil=True)
def wrap_of_points(pts, first, count, sign):
    """Signed azimuth accumulated from the fuselage centre along ``count`` chain points."""
    prev = math.atan2(pts[0, 1], pts[0, 0])
    total = 0.0
    for i in range(first, first + count):
        a = math.atan2(pts[i, 1], pts[i, 0])
        d = a - prev
        while d > math.pi:
            d -= 2.0 * math.pi
        while d < -math.pi:
            d += 2.0 * math.pi
        total += d
        prev = a
    return sign * total


@njit(cache=True, nogil=True)
def segment_gap(ax, ay, bx, by, radius, h):
    """Surface gap between the pole and the capsule (a, b, h)."""
    ux = bx - ax
    uy = by - ay
    L2 = ux * ux + uy * uy
    t = 0.0
    if L2 > 0.0:
        t = -(ax * ux + ay * uy) / L2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = ax + t * ux
    cy = ay + t * uy
    return math.sqrt(cx * cx + cy * cy) - radius - h


@njit(cache=True, nogil=True)
def wing_wrap(pts, half_t, hw, n, side_sign, radius, margin):
    """Wrap angle of one wing; zero unless some segment of that wing is near the pole."""
    first = 1 if side_sign == 1 else n + 2
    cs = 1 if side_sign == 1 else n + 1
    near = False
    for j in range(n):
        g = segment_gap(pts[first + j, 0], pts[first + j, 1],
                        pts[first + j + 1, 0], pts[first + j + 1, 1], radius, half_t[cs + j])
        if g <= margin:
            near = True
            break
    if not near:
        return 0.0
    # fold sign: the left wing wraps clockwise, the right counter-clockwise
    w = wrap_of_points(pts, first, n + 1, -side_sign)
    if w < 0.0:
        return 0.0
    top = 2.0 * math.pi
    if w >= top:
        w = np.nextafter(top, 0.0)
    return w


# trial outcome codes reported by run_toss
END_SETTLED = 0
END_TIMEOUT = 1
END_ESCAPED = 2
END_UNSTABLE = 3


@njit(cache=True, nogil=True)
def run_toss(mass, com, inertia, length, half_t, side, qindex,
             hk, hc, hkb, hmax, hw, n,
             q0, v0, radius, kn, cn, mu, vreg,
             dt, timeout, settle_eps, settle_hold, margin,
             tip_dist, tip_closing, start_distance,
             traj_every, traj):
    """Integrate one toss with semi-implicit Euler until settle, escape or timeout.

    Returns (q, v, t, end_code, first_contact_time, impact_speed, tip_event,
    energy_at_impact, final_normal_sum, n_traj_rows).
    """
    nb = mass.shape[0]
    nq = q0.shape[0]
    q = q0.copy()
    v = v0.copy()
    a = np.zeros(nq)
    info = np.zeros(3)
    ws = (np.zeros(nb), np.zeros(nb), np.zeros((nb, 2)), np.zeros((nb, 2)),
          np.zeros((nq, nq)), np.zeros(nq), np.zeros((2, nq)), np.zeros(2), np.zeros(2),
          np.zeros((nb, 2, nq)), np.zeros((2, nq)), np.zeros(nq), np.zeros(nq), np.zeros(nq))
    body_force = np.zeros((nb, 2))
    joint_tau = np.zeros(max(nq - 3, 1))
    pts = np.zeros((1 + 2 * (n + 1), 2))
    J = np.zeros((2, nq))
    ltip = n
    rtip = 2 * n

    t = 0.0
    steps = 0
    max_steps = int(math.ceil(timeout / dt - 1e-9))
    contact_ever = False
    first_contact = -1.0
    impact_speed = 0.0
    e_impact = 0.0
    tip_event = False
    calm_since = -1.0
    end = END_TIMEOUT
    n_traj = 0
    beta, betad, start, sbias, M, bias_q, Jbar, rbar, bbar, Jc, Jw, Q, tmp, tmp2 = ws

    while steps < max_steps:
        if traj_every > 0 and steps % traj_every == 0 and n_traj < traj.shape[0]:
            traj[n_traj, 0] = t
            for i in range(nq):
                traj[n_traj, 1 + i] = q[i]
            n_traj += 1
        ok = accelerations(mass, com, inertia, length, half_t, side, qindex,
                           hk, hc, hkb, hmax, hw, n,
                           q, v, radius, kn, cn, mu, vreg, dt, True,
                           body_force, joint_tau, a, info, ws)
        if not ok:
            end = END_UNSTABLE
            break
        ncontact = info[I_NCONTACT]
        if ncontact > 0 and not contact_ever:
            contact_ever = True
            first_contact = t
            # fuselage velocity (what a marker on the body would measure)
            point_jac(side, qindex, n, start, 0, 0.0, 0.0, J)
            vx, vy = point_velocity(v, J, Jbar, nq)
            impact_speed = math.sqrt(vx * vx + vy * vy)
            e_impact = kinetic_energy(mass, com, inertia, length, side, qindex, hw, n, q, v, ws)
            for b in range(1, nb):
                k = qindex[b]
                if k >= 0:
                    e_impact += hinge_energy(hk[b], hkb[b], hmax[b], q[k])
            e_impact += info[I_CONTACT_PE]
        # tip proximity event (relative positions share the same offset)
        if not tip_event and contact_ever:
            lx = start[ltip, 0] + length[ltip] * math.cos(beta[ltip])
            ly = start[ltip, 1] + length[ltip] * math.sin(beta[ltip])
            rx = start[rtip, 0] + length[rtip] * math.cos(beta[rtip])
            ry = start[rtip, 1] + length[rtip] * math.sin(beta[rtip])
            dx = lx - rx
            dy = ly - ry
            dist = math.sqrt(dx * dx + dy * dy)
            if dist < tip_dist:
                point_jac(side, qindex, n, start, ltip, lx, ly, J)
                lvx, lvy = point_velocity(v, J, Jbar, nq)
                point_jac(side, qindex, n, start, rtip, rx, ry, J)
                rvx, rvy = point_velocity(v, J, Jbar, nq)
                if dist > 0.0:
                    closing = -((lvx - rvx) * dx + (lvy - rvy) * dy) / dist
                else:
                    closing = math.sqrt((lvx - rvx) ** 2 + (lvy - rvy) ** 2)
                if closing > tip_closing:
                    tip_event = True

        for i in range(nq):
            v[i] += dt * a[i]
        for i in range(nq):
            q[i] += dt * v[i]
        t = (steps + 1) * dt
        steps += 1
        finite = True
        for i in range(nq):
            if not (math.isfinite(q[i]) and math.isfinite(v[i])):
                finite = False
        if not finite:
            end = END_UNSTABLE
            break

        cx = q[0]
        cy = q[1]
        receding = cx * v[0] + cy * v[1] > 0.0
        if not contact_ever:
            if receding:
                end = END_ESCAPED
                break
            continue
        if steps % 10 == 0:
            ke = kinetic_energy(mass, com, inertia, length, side, qindex, hw, n, q, v, ws)
            if ke < settle_eps:
                if calm_since < 0.0:
                    calm_since = t
                elif t - calm_since >= settle_hold - 1e-12:
                    end = END_SETTLED
                    break
            else:
                calm_since = -1.0
        if receding and ncontact == 0 and math.sqrt(cx * cx + cy * cy) > 0.5 * start_distance:
            chain_points(length, side, qindex, hw, n, com, mass, q, pts)
            near = False
            for s in (1, -1):
                if wing_wrap(pts, half_t, hw, n, s, radius, margin) > 0.0:
                    near = True
            if not near:
                end = END_ESCAPED
                break

    if traj_every > 0 and n_traj < traj.shape[0]:
        traj[n_traj, 0] = t
        for i in range(nq):
            traj[n_traj, 1 + i] = q[i]
        n_traj += 1
    return q, v, t, end, first_contact, impact_speed, tip_event, e_impact, info[I_NORMAL_SUM], n_traj


@njit(cache=True, nogil=True)
def integrate(mass, com, inertia, length, half_t, side, qindex,
              hk, hc, hkb, hmax, hw, n,
              q, v, radius, kn, cn, mu, vreg, use_contacts, joint_tau,
              dt, nsteps, record_every, rec_q, rec_v):
    """Advance ``q``/``v`` in place by ``nsteps`` semi-implicit Euler steps.

    Every ``record_every`` steps (if > 0) the state is copied into the next
    row of ``rec_q``/``rec_v``. Returns the number of completed steps; fewer
    than ``nsteps`` means the mass matrix failed or the state went non-finite.
    """
    nb = mass.shape[0]
    nq = q.shape[0]
    a = np.zeros(nq)
    info = np.zeros(3)
    ws = (np.zeros(nb), np.zeros(nb), np.zeros((nb, 2)), np.zeros((nb, 2)),
          np.zeros((nq, nq)), np.zeros(nq), np.zeros((2, nq)), np.zeros(2), np.zeros(2),
          np.zeros((nb, 2, nq)), np.zeros((2, nq)), np.zeros(nq), np.zeros(nq), np.zeros(nq))
    body_force = np.zeros((nb, 2))
    row = 0
    for s in range(nsteps):
        if not accelerations(mass, com, inertia, length, half_t, side, qindex,
                             hk, hc, hkb, hmax, hw, n,
                             q, v, radius, kn, cn, mu, vreg, dt, use_contacts,
                             body_force, joint_tau, a, info, ws):
            return s
        for i in range(nq):
            v[i] += dt * a[i]
        for i in range(nq):
            q[i] += dt * v[i]
        for i in range(nq):
            if not (math.isfinite(q[i]) and math.isfinite(v[i])):
                return s
        if record_every > 0 and (s + 1) % record_every == 0 and row < rec_q.shape[0]:
            rec_q[row, :] = q
            rec_v[row, :] = v
            row += 1
    return nsteps
