"""Compiled quadrature kernels for the GN double integral.

Frequencies are in THz, distances in km, beta2/beta3 in ps^2/km and ps^3/km,
so phases come out in rad/km. PSDs are W/THz.

Node rules per channel-pair cell (f1 in channel j, f2 in channel k):

* generic cells: ``q`` x ``q`` midpoint nodes;
* cells on the axes f1 = f_i or f2 = f_i (the XPM rows/columns): ``q`` midpoint
  nodes along the interferer, and ``rp`` Gauss-Legendre nodes per half-channel in
  tan-mapped coordinates across the ridge, scaled to the ridge width;
* the SPM cell: additionally ``sp`` sinh-graded nodes per side along f2.

``rp == 0`` switches every cell to the plain midpoint rule.
"""
import math

import numpy as np
from numba import njit

TWO_PI_SQ = 4.0 * math.pi**2
SERIES_THRESHOLD = 1e-4


@njit(cache=True)
def _locate(fc, f):
    """Index k with fc[k] <= f < fc[k+1], clipped to [0, n-2]."""
    n = fc.size
    k = np.searchsorted(fc, f) - 1
    if k < 0:
        k = 0
    if k > n - 2:
        k = n - 2
    return k


@njit(cache=True)
def _interp_ln(fc, lnrho, f, out):
    n = fc.size
    if n == 1 or f <= fc[0]:
        out[:] = lnrho[0]
        return
    if f >= fc[n - 1]:
        out[:] = lnrho[n - 1]
        return
    k = _locate(fc, f)
    t = (f - fc[k]) / (fc[k + 1] - fc[k])
    for s in range(out.size):
        out[s] = (1.0 - t) * lnrho[k, s] + t * lnrho[k + 1, s]


@njit(cache=True)
def _psd(fc, g, half_b, f):
    n = fc.size
    k = np.searchsorted(fc, f)
    best = -1
    dist = 1e300
    if k < n:
        d = abs(fc[k] - f)
        if d < dist:
            dist = d
            best = k
    if k > 0:
        d = abs(fc[k - 1] - f)
        if d < dist:
            dist = d
            best = k - 1
    if best >= 0 and dist <= half_b * (1.0 + 1e-9):
        return g[best]
    return 0.0


@njit(cache=True)
def link_kernel_sq(l1, l2, l3, li, dz, phi):
    """|int_0^L sqrt(rho1 rho2 rho3 / rho_i) exp(-j phi z) dz|^2 on a uniform z grid.

    ln(rho) is linear within each segment, so every segment integral is exact.
    """
    nseg = l1.size - 1
    acc = 0.0 + 0.0j
    rot = complex(math.cos(phi * dz), -math.sin(phi * dz))
    e_prev = 1.0 + 0.0j
    a_prev = 0.5 * (l1[0] + l2[0] + l3[0] - li[0])
    w_prev = math.exp(a_prev)
    for s in range(nseg):
        a_next = 0.5 * (l1[s + 1] + l2[s + 1] + l3[s + 1] - li[s + 1])
        w_next = math.exp(a_next)
        e_next = e_prev * rot
        x = complex((a_next - a_prev) / dz, -phi)
        xd = x * dz
        if abs(xd) < SERIES_THRESHOLD:
            acc += dz * w_prev * e_prev * (1.0 + xd / 2.0 + xd * xd / 6.0)
        else:
            acc += (w_next * e_next - w_prev * e_prev) / x
        a_prev = a_next
        w_prev = w_next
        e_prev = e_next
    return acc.real * acc.real + acc.imag * acc.imag


@njit(cache=True)
def _phase(fi, f1, f2, b2, b3):
    return TWO_PI_SQ * (f1 - fi) * (f2 - fi) * (b2 + math.pi * b3 * (f1 + f2 - 2.0 * fi))


@njit(cache=True)
def _sq_integral(l2, dz):
    """int_0^L rho2(z)^2 dz with ln(rho2) linear on each segment."""
    acc = 0.0
    for s in range(l2.size - 1):
        a = 2.0 * l2[s]
        b = 2.0 * l2[s + 1]
        d = b - a
        if abs(d) < SERIES_THRESHOLD:
            acc += dz * math.exp(a) * (1.0 + d / 2.0 + d * d / 6.0)
        else:
            acc += dz * (math.exp(b) - math.exp(a)) / d
    return acc


@njit(cache=True)
def _ridge_closed(f2, l2, fc, g, dz, half_b, slope, s, ratio):
    """Narrow-ridge closed form of the f1 line integral, or -1 when not applicable.

    With phi ~ slope * x across the ridge and rho1 ~ rho_i, rho3 ~ rho2 there,
    Parseval gives int |K|^2 dx = (2 pi / slope) int rho2^2 dz over the whole
    line. The parts of the line outside channel k's bandwidth are removed (or
    re-weighted by the neighbouring PSD) using the large-phase envelope
    (1 + rho2(L)^2) / phi^2 of |K|^2.
    """
    n = fc.size
    k = 0
    if n > 1:
        k = _locate(fc, f2)
        if abs(fc[k + 1] - f2) < abs(fc[k] - f2):
            k += 1
    # x-interval where f1 stays in channel i and f3 = f2 + x stays in channel k
    lo = max(-half_b, fc[k] - half_b - f2)
    hi = min(half_b, fc[k] + half_b - f2)
    if not (lo < 0.0 < hi) or min(-lo, hi) < ratio * s:
        return -1.0
    env = 1.0 + math.exp(2.0 * l2[l2.size - 1])
    c2 = slope * slope
    acc = g[k] * (2.0 * math.pi * _sq_integral(l2, dz) / slope - env / c2 * (1.0 / hi - 1.0 / lo))
    # tails reaching into neighbouring channels
    for m in (k - 1, k + 1):
        if m < 0 or m >= n:
            continue
        a = max(-half_b, fc[m] - half_b - f2)
        b = min(half_b, fc[m] + half_b - f2)
        if b <= a:
            continue
        if a > 0.0:
            acc += g[m] * env / c2 * (1.0 / a - 1.0 / b)
        elif b < 0.0:
            acc += g[m] * env / c2 * (1.0 / -b - 1.0 / -a)
    return acc


@njit(cache=True)
def _ridge_line(i, f2, l2, fc, g, lnrho, li, dz, half_b, b2, b3, alpha, gl_x, gl_w, l1, l3, ratio):
    """Integral over f1 in channel i (through the ridge f1 = f_i) at fixed f2.

    Returns sum of w * G(f3) * |K|^2 (G(f1), G(f2) applied by the caller).
    """
    fi = fc[i]
    y = f2 - fi
    slope = TWO_PI_SQ * abs(y) * abs(b2 + math.pi * b3 * y)
    s = half_b
    if slope > 0.0:
        s = alpha / slope
    if s > half_b:
        s = half_b
    if s < 1e-12 * half_b:
        s = 1e-12 * half_b
    if ratio > 0.0 and slope > 0.0:
        closed = _ridge_closed(f2, l2, fc, g, dz, half_b, slope, s, ratio)
        if closed >= 0.0:
            return closed
    th_max = math.atan(half_b / s)
    acc = 0.0
    for m in range(gl_x.size):
        th = th_max * gl_x[m]
        c = math.cos(th)
        x = s * math.tan(th)
        wx = s / (c * c) * th_max * gl_w[m]
        for sign in (1.0, -1.0):
            f1 = fi + sign * x
            f3 = f1 + f2 - fi
            g3 = _psd(fc, g, half_b, f3)
            if g3 == 0.0:
                continue
            _interp_ln(fc, lnrho, f1, l1)
            _interp_ln(fc, lnrho, f3, l3)
            phi = _phase(fi, f1, f2, b2, b3)
            acc += wx * g3 * link_kernel_sq(l1, l2, l3, li, dz, phi)
    return acc


@njit(cache=True)
def _midpoint_cell(i, j, k, q, fc, g, lnrho, lmid, li, dz, half_b, b2, b3, l3):
    """Plain q x q midpoint rule over the cell (channel j) x (channel k)."""
    fi = fc[i]
    bw = 2.0 * half_b
    h = bw / q
    acc = 0.0
    for a in range(q):
        f1 = fc[j] - half_b + (a + 0.5) * h
        l1 = lmid[j * q + a]
        for b in range(q):
            f2 = fc[k] - half_b + (b + 0.5) * h
            f3 = f1 + f2 - fi
            g3 = _psd(fc, g, half_b, f3)
            if g3 == 0.0:
                continue
            _interp_ln(fc, lnrho, f3, l3)
            phi = _phase(fi, f1, f2, b2, b3)
            acc += g3 * link_kernel_sq(l1, lmid[k * q + b], l3, li, dz, phi)
    return acc * h * h * g[j] * g[k]


@njit(cache=True)
def nli_psd(targets, fc, g, half_b, lnrho, dz, beta2, beta3, alpha, q, rp, sp, full, gl_rx, gl_rw, gl_sx, gl_sw,
            ratio):
    """Double integral sum_{cells} int int G1 G2 G3 |K|^2 df1 df2 for each target channel.

    Multiply by (16/27) gamma_i^2 to get G_NLI(f_i) in W/THz.
    """
    n = fc.size
    nb = lnrho.shape[1]
    bw = 2.0 * half_b
    hq = bw / q
    # ln rho at every midpoint node, indexed channel * q + node
    lmid = np.empty((n * q, nb))
    for j in range(n):
        for a in range(q):
            _interp_ln(fc, lnrho, fc[j] - half_b + (a + 0.5) * hq, lmid[j * q + a])
    l1 = np.empty(nb)
    l2 = np.empty(nb)
    l3 = np.empty(nb)
    out = np.zeros(targets.size)
    for t in range(targets.size):
        i = targets[t]
        fi = fc[i]
        b2 = beta2[i]
        b3 = beta3[i]
        li = lnrho[i]
        acc = 0.0
        if rp == 0:
            acc += _midpoint_cell(i, i, i, q, fc, g, lnrho, lmid, li, dz, half_b, b2, b3, l3)
            for k in range(n):
                if k != i:
                    acc += 2.0 * _midpoint_cell(i, i, k, q, fc, g, lnrho, lmid, li, dz, half_b, b2, b3, l3)
        else:
            # SPM cell: sinh-graded along f2, ridge-mapped along f1
            c0 = TWO_PI_SQ * max(abs(b2), math.pi * abs(b3) * half_b)
            y0 = half_b
            if c0 > 0.0:
                y0 = min(half_b, alpha[i] / (c0 * half_b))
            t_max = math.asinh(half_b / y0)
            spm = 0.0
            for m in range(gl_sx.size):
                tt = t_max * gl_sx[m]
                y = y0 * math.sinh(tt)
                wy = y0 * math.cosh(tt) * t_max * gl_sw[m]
                for sign in (1.0, -1.0):
                    f2 = fi + sign * y
                    _interp_ln(fc, lnrho, f2, l2)
                    spm += wy * _ridge_line(i, f2, l2, fc, g, lnrho, li, dz, half_b, b2, b3, alpha[i], gl_rx, gl_rw, l1, l3, ratio)
            acc += spm * g[i] * g[i]
            # XPM rows (f1 in channel i) and their mirrored columns
            for k in range(n):
                if k == i:
                    continue
                row = 0.0
                for b in range(q):
                    f2 = fc[k] - half_b + (b + 0.5) * hq
                    row += hq * _ridge_line(i, f2, lmid[k * q + b], fc, g, lnrho, li, dz, half_b, b2, b3, alpha[i], gl_rx, gl_rw, l1, l3, ratio)
                acc += 2.0 * row * g[i] * g[k]
        if full:
            for j in range(n):
                if j == i:
                    continue
                for k in range(j, n):
                    if k == i:
                        continue
                    f3c = fc[j] + fc[k] - fi
                    k3 = np.searchsorted(fc, f3c)
                    near = 1e300
                    if k3 < n:
                        near = abs(fc[k3] - f3c)
                    if k3 > 0:
                        near = min(near, abs(fc[k3 - 1] - f3c))
                    if near > bw + half_b:
                        continue
                    cell = _midpoint_cell(i, j, k, q, fc, g, lnrho, lmid, li, dz, half_b, b2, b3, l3)
                    acc += cell if j == k else 2.0 * cell
        out[t] = acc
    return out
