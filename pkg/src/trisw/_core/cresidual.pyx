# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled residual. Mirrors ``pyresidual.residual`` operation by operation."""
import numpy as np
from libc.math cimport sqrt, pow

cdef double DRY_DEPTH = 1e-6
cdef double XI = 1e-7
cdef double MIN_SPEED_SUM = 1e-10
cdef double SQRT2 = sqrt(2.0)


cdef inline double dmax(double a, double b) nogil:
    return a if a >= b else b


cdef inline double dmin(double a, double b) nogil:
    return a if a <= b else b


cdef inline void finish(double w, double b, double qx, double qy, double eps,
                        double* out) nogil:
    # out = (w, h, qx, qy, u, v)
    cdef double h = dmax(w - b, 0.0)
    cdef double f, h4
    if h >= DRY_DEPTH:
        f = 1.0 / h
    else:
        h4 = h * h * h * h
        f = SQRT2 * h / sqrt(h4 + dmax(h4, eps))
    out[0] = w
    out[1] = h
    out[4] = f * qx
    out[5] = f * qy
    if h < DRY_DEPTH:
        out[2] = h * out[4]
        out[3] = h * out[5]
    else:
        out[2] = qx
        out[3] = qy


cdef inline void edge_flux(double* si, double* so, double nx, double ny, double d, double g,
                           double* res, double* amax) nogil:
    cdef double un_i = si[4] * nx + si[5] * ny
    cdef double un_o = so[4] * nx + so[5] * ny
    cdef double p_i = 0.5 * g * si[1] * si[1]
    cdef double p_o = 0.5 * g * so[1] * so[1]
    cdef double fi[3]
    cdef double fo[3]
    cdef double jump[3]
    fi[0] = si[2] * nx + si[3] * ny
    fi[1] = si[2] * un_i + p_i * nx
    fi[2] = si[3] * un_i + p_i * ny
    fo[0] = so[2] * nx + so[3] * ny
    fo[1] = so[2] * un_o + p_o * nx
    fo[2] = so[3] * un_o + p_o * ny
    jump[0] = so[0] - si[0]
    jump[1] = so[2] - si[2]
    jump[2] = so[3] - si[3]
    cdef double c_i = sqrt(g * si[1])
    cdef double c_o = sqrt(g * so[1])
    cdef double b_in = -dmin(dmin(un_i - c_i, un_o - c_o), 0.0)
    cdef double b_out = dmax(dmax(un_i + c_i, un_o + c_o), 0.0)
    cdef double s = b_in + b_out
    cdef double skew, diff
    cdef int m
    if s >= MIN_SPEED_SUM:
        skew = (b_in - b_out) / s * 0.5
        diff = b_in * b_out / s
        for m in range(3):
            # centred form: exactly antisymmetric and exact for equal states
            res[m] = d * (-(0.5 * (fi[m] + fo[m]) + skew * (fo[m] - fi[m])) + diff * jump[m])
    else:
        for m in range(3):
            res[m] = d * (-0.5 * (fi[m] + fo[m]))
    amax[0] = dmax(b_in, b_out)


def residual(double[::1] w, double[::1] qx, double[::1] qy,
             Py_ssize_t[::1] kinds, double[:, ::1] presc,
             double[::1] area, double[:, ::1] centroid, double[:, :, ::1] cell_vertices,
             double[:, ::1] edge_length, double[:, :, ::1] normal,
             double[:, :, ::1] midpoint, Py_ssize_t[:, ::1] neighbor,
             Py_ssize_t[:, ::1] neighbor_edge,
             double[:, ::1] b_edge, double[::1] b_cell, double[:, ::1] b_vertex,
             Py_ssize_t[:, ::1] stencil_idx, double[:, :, ::1] stencil_xy,
             double[::1] stencil_det, unsigned char[::1] stencil_ok,
             unsigned char[::1] transmissive, double[:, ::1] b_grad,
             Py_ssize_t[::1] bcell, Py_ssize_t[::1] bedge, double[:, ::1] bnormal,
             double[::1] ghost_b,
             Py_ssize_t[::1] e_left, Py_ssize_t[::1] e_left_k,
             Py_ssize_t[::1] e_right, Py_ssize_t[::1] e_right_k,
             double eps, double g):
    cdef Py_ssize_t nc = w.shape[0]
    cdef Py_ssize_t nb = bcell.shape[0]
    cdef Py_ssize_t ne = e_left.shape[0]

    ext_a = np.empty((nc + nb, 3))
    ug_a = np.zeros((nc, 3, 2))
    lg_a = np.zeros((nc, 3, 2))
    mid_a = np.empty((nc, 3, 6))
    slot_a = np.zeros((nc, 3, 3))
    smax_a = np.zeros((nc, 3))
    pi_a = np.empty((nc, 3))
    s2_a = np.empty(nc)
    s3_a = np.empty(nc)
    amax_a = np.empty(nc)
    cdef double[:, ::1] ext = ext_a
    cdef double[:, :, ::1] ug = ug_a
    cdef double[:, :, ::1] lg = lg_a
    cdef double[:, :, ::1] mid = mid_a
    cdef double[:, :, ::1] slot = slot_a
    cdef double[:, ::1] smax = smax_a
    cdef double[:, ::1] pi = pi_a
    cdef double[::1] s2 = s2_a
    cdef double[::1] s3 = s3_a
    cdef double[::1] amax = amax_a

    cdef Py_ssize_t j, k, m, i, c, kk, r, rk, nbr
    cdef double nx, ny, qn, wp, hp, det, du2, du3
    cdef double x1, y1, x2, y2, x3, y3
    cdef double g1x, g1y, g2x, g2y, g3x, g3y, n1, n2, n3, denom, w1, w2, w3
    cdef double xi2 = XI * XI
    cdef double wv[3]
    cdef double bv[3]
    cdef double wc[3]
    cdef double hmean, htil, ox, oy, gwx, gwy, q, d2, t, sx, sy, dh, a
    cdef double si[6]
    cdef double so[6]
    cdef double res[3]
    cdef int nplus, below[3], needs
    cdef Py_ssize_t src[3]

    with nogil:
        # cell means followed by ghost means
        for j in range(nc):
            ext[j, 0] = w[j]
            ext[j, 1] = qx[j]
            ext[j, 2] = qy[j]
        for i in range(nb):
            c = bcell[i]
            nx = bnormal[i, 0]
            ny = bnormal[i, 1]
            if kinds[i] == 0:
                qn = qx[c] * nx + qy[c] * ny
                ext[nc + i, 0] = w[c]
                ext[nc + i, 1] = qx[c] - 2.0 * qn * nx
                ext[nc + i, 2] = qy[c] - 2.0 * qn * ny
            elif kinds[i] == 1:
                ext[nc + i, 0] = (w[c] - b_cell[c]) + ghost_b[i]
                ext[nc + i, 1] = qx[c]
                ext[nc + i, 2] = qy[c]
            else:
                wp = dmax(presc[i, 0], ghost_b[i])
                hp = wp - ghost_b[i]
                ext[nc + i, 0] = wp
                ext[nc + i, 1] = hp * presc[i, 1]
                ext[nc + i, 2] = hp * presc[i, 2]

        # unlimited gradients: plane through the three stencil centroids
        for j in range(nc):
            if not stencil_ok[j]:
                continue
            x1 = stencil_xy[j, 0, 0]
            y1 = stencil_xy[j, 0, 1]
            x2 = stencil_xy[j, 1, 0]
            y2 = stencil_xy[j, 1, 1]
            x3 = stencil_xy[j, 2, 0]
            y3 = stencil_xy[j, 2, 1]
            det = stencil_det[j]
            for m in range(3):
                du2 = ext[stencil_idx[j, 1], m] - ext[stencil_idx[j, 0], m]
                du3 = ext[stencil_idx[j, 2], m] - ext[stencil_idx[j, 0], m]
                ug[j, m, 0] = ((y3 - y1) * du2 - (y2 - y1) * du3) / det
                ug[j, m, 1] = ((x2 - x1) * du3 - (x3 - x1) * du2) / det

        # limited gradients: weighted neighbour gradients
        for j in range(nc):
            if transmissive[j]:
                lg[j, 0, 0] = b_grad[j, 0]
                lg[j, 0, 1] = b_grad[j, 1]
                continue
            if not stencil_ok[j]:
                continue
            for k in range(3):
                nbr = neighbor[j, k]
                if nbr >= 0 and stencil_ok[nbr]:
                    src[k] = nbr
                else:
                    src[k] = j
            for m in range(3):
                g1x = ug[src[0], m, 0]
                g1y = ug[src[0], m, 1]
                g2x = ug[src[1], m, 0]
                g2y = ug[src[1], m, 1]
                g3x = ug[src[2], m, 0]
                g3y = ug[src[2], m, 1]
                n1 = g1x * g1x + g1y * g1y
                n2 = g2x * g2x + g2y * g2y
                n3 = g3x * g3x + g3y * g3y
                denom = n1 * n1 + n2 * n2 + n3 * n3 + 3.0 * xi2
                w1 = (n2 * n3 + xi2) / denom
                w2 = (n3 * n1 + xi2) / denom
                w3 = (n1 * n2 + xi2) / denom
                lg[j, m, 0] = w1 * g1x + w2 * g2x + w3 * g3x
                lg[j, m, 1] = w1 * g1y + w2 * g2y + w3 * g3y

        # midpoint states with the positivity fix on w
        for j in range(nc):
            gwx = lg[j, 0, 0]
            gwy = lg[j, 0, 1]
            needs = 0
            nplus = 3
            for k in range(3):
                ox = cell_vertices[j, k, 0] - centroid[j, 0]
                oy = cell_vertices[j, k, 1] - centroid[j, 1]
                wv[k] = w[j] + gwx * ox + gwy * oy
                bv[k] = b_vertex[j, k]
                below[k] = wv[k] < bv[k]
                if below[k]:
                    needs = 1
                    nplus -= 1
            hmean = w[j] - b_cell[j]
            if hmean <= 0.0:
                needs = 1
            if needs:
                if nplus > 0:
                    htil = 3.0 * hmean / nplus
                else:
                    htil = 0.0
                for k in range(3):
                    if below[k]:
                        wc[k] = bv[k]
                    else:
                        wc[k] = htil + bv[k]
            for k in range(3):
                ox = midpoint[j, k, 0] - centroid[j, 0]
                oy = midpoint[j, k, 1] - centroid[j, 1]
                if needs:
                    t = 0.5 * (wc[k] + wc[(k + 1) % 3])
                else:
                    t = w[j] + gwx * ox + gwy * oy
                finish(t, b_edge[j, k],
                       qx[j] + lg[j, 1, 0] * ox + lg[j, 1, 1] * oy,
                       qy[j] + lg[j, 2, 0] * ox + lg[j, 2, 1] * oy,
                       eps, &si[0])
                for m in range(6):
                    mid[j, k, m] = si[m]

            # bed-slope source
            sx = 0.0
            sy = 0.0
            for k in range(3):
                d2 = (b_edge[j, k] - mid[j, k, 0]) * (b_edge[j, k] - mid[j, k, 0])
                t = g * edge_length[j, k] * d2
                if k == 0:
                    sx = t * normal[j, k, 0]
                    sy = t * normal[j, k, 1]
                else:
                    sx = sx + t * normal[j, k, 0]
                    sy = sy + t * normal[j, k, 1]
            sx = sx / (2.0 * area[j])
            sy = sy / (2.0 * area[j])
            dh = b_cell[j] - w[j]
            s2[j] = sx + g * gwx * dh
            s3[j] = sy + g * gwy * dh

        # interior edges, each evaluated once
        for i in range(ne):
            c = e_left[i]
            k = e_left_k[i]
            r = e_right[i]
            rk = e_right_k[i]
            for m in range(6):
                si[m] = mid[c, k, m]
                so[m] = mid[r, rk, m]
            edge_flux(&si[0], &so[0], normal[c, k, 0], normal[c, k, 1], edge_length[c, k], g,
                      &res[0], &a)
            for m in range(3):
                slot[c, k, m] = res[m]
                slot[r, rk, m] = -res[m]
            smax[c, k] = a
            smax[r, rk] = a

        # boundary edges against ghost interface states
        for i in range(nb):
            c = bcell[i]
            k = bedge[i]
            nx = bnormal[i, 0]
            ny = bnormal[i, 1]
            for m in range(6):
                si[m] = mid[c, k, m]
            if kinds[i] == 0:
                qn = si[2] * nx + si[3] * ny
                q = si[4] * nx + si[5] * ny
                so[0] = si[0]
                so[1] = si[1]
                so[2] = si[2] - 2.0 * qn * nx
                so[3] = si[3] - 2.0 * qn * ny
                so[4] = si[4] - 2.0 * q * nx
                so[5] = si[5] - 2.0 * q * ny
            elif kinds[i] == 1:
                for m in range(6):
                    so[m] = si[m]
            else:
                hp = dmax(presc[i, 0] - b_edge[c, k], 0.0)
                finish(b_edge[c, k] + hp, b_edge[c, k], hp * presc[i, 1], hp * presc[i, 2],
                       eps, &so[0])
            edge_flux(&si[0], &so[0], nx, ny, edge_length[c, k], g, &res[0], &a)
            for m in range(3):
                slot[c, k, m] = res[m]
            smax[c, k] = a

        for j in range(nc):
            for m in range(3):
                pi[j, m] = (slot[j, 0, m] + slot[j, 1, m] + slot[j, 2, m]) / area[j]
            amax[j] = dmax(dmax(smax[j, 0], smax[j, 1]), smax[j, 2])

    return pi_a, s2_a, s3_a, amax_a
