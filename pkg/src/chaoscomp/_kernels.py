"""Compiled inner loops for the cipher maps, permutation and substitution.

These mirror the reference arithmetic in ``fxp`` and ``chaos`` exactly
(int64 intermediates, floor shifts, range checks after every operation);
the test suite replays both paths side by side.

State vectors are int64 arrays of raw fixed-point words:

    logistic: [x, mu]                    Q2.29
    henon:    [x, y, a, b]               Q4.27
    lorenz:   [x, y, z, sigma, rho, beta] Q10.21

Every step returns False as soon as an intermediate leaves the 32-bit
range; callers turn that into ``DivergentTrajectory``.
"""
import numpy as np
from numba import njit

LOGISTIC = 0
HENON = 1
LORENZ = 2

RAW_MIN = -(1 << 31)
RAW_MAX = (1 << 31) - 1

FB_LOGISTIC = 29
FB_HENON = 27
FB_LORENZ = 21
ONE_LOGISTIC = 1 << FB_LOGISTIC
ONE_HENON = 1 << FB_HENON
# forward-Euler step 1/128 in Q10.21
DT_LORENZ = 1 << (FB_LORENZ - 7)


@njit(cache=True, inline="always")
def _out(v):
    return v > RAW_MAX or v < RAW_MIN


@njit(cache=True)
def logistic_step(st):
    x = st[0]
    t = (st[1] * x) >> FB_LOGISTIC
    if _out(t):
        return False
    u = ONE_LOGISTIC - x
    if _out(u):
        return False
    x = (t * u) >> FB_LOGISTIC
    if _out(x):
        return False
    st[0] = x
    return True


@njit(cache=True)
def henon_step(st):
    x = st[0]
    y = st[1]
    xx = (x * x) >> FB_HENON
    if _out(xx):
        return False
    axx = (st[2] * xx) >> FB_HENON
    if _out(axx):
        return False
    s = ONE_HENON + y
    if _out(s):
        return False
    xn = s - axx
    if _out(xn):
        return False
    yn = (st[3] * x) >> FB_HENON
    if _out(yn):
        return False
    st[0] = xn
    st[1] = yn
    return True


@njit(cache=True)
def lorenz_step(st):
    x = st[0]
    y = st[1]
    z = st[2]
    d = y - x
    if _out(d):
        return False
    dx = (st[3] * d) >> FB_LORENZ
    if _out(dx):
        return False
    r = st[4] - z
    if _out(r):
        return False
    xr = (x * r) >> FB_LORENZ
    if _out(xr):
        return False
    dy = xr - y
    if _out(dy):
        return False
    xy = (x * y) >> FB_LORENZ
    if _out(xy):
        return False
    bz = (st[5] * z) >> FB_LORENZ
    if _out(bz):
        return False
    dz = xy - bz
    if _out(dz):
        return False
    xn = x + ((DT_LORENZ * dx) >> FB_LORENZ)
    yn = y + ((DT_LORENZ * dy) >> FB_LORENZ)
    zn = z + ((DT_LORENZ * dz) >> FB_LORENZ)
    if _out(xn) or _out(yn) or _out(zn):
        return False
    st[0] = xn
    st[1] = yn
    st[2] = zn
    return True


@njit(cache=True)
def step(st, kind):
    if kind == LOGISTIC:
        return logistic_step(st)
    if kind == HENON:
        return henon_step(st)
    return lorenz_step(st)


@njit(cache=True)
def advance(st, kind, n):
    """Run ``n`` steps; return the number completed before a saturation."""
    for i in range(n):
        if not step(st, kind):
            return i
    return n


@njit(cache=True)
def fill(st, kind, out):
    """Write one low byte of the x word per step; return steps completed."""
    for i in range(out.shape[0]):
        if not step(st, kind):
            return i
        out[i] = st[0] & 0xFF
    return out.shape[0]


@njit(cache=True)
def trajectory(st, kind, n):
    """Record the dynamic part of the state after each of ``n`` steps."""
    dims = 1 if kind == LOGISTIC else (2 if kind == HENON else 3)
    out = np.empty((n, dims), dtype=np.int64)
    for i in range(n):
        if not step(st, kind):
            return out[:i]
        for j in range(dims):
            out[i, j] = st[j]
    return out


@njit(cache=True)
def _same(a, b, dims):
    for j in range(dims):
        if a[j] != b[j]:
            return False
    return True


@njit(cache=True)
def cycle_period(st, kind, limit):
    """Brent cycle detection on the map orbit starting at ``st``.

    Returns the period if the orbit closes within ``limit`` steps, 0 if it
    does not, and -1 if the orbit saturates first.  ``st`` is not modified.
    """
    dims = 1 if kind == LOGISTIC else (2 if kind == HENON else 3)
    tort = st.copy()
    hare = st.copy()
    if not step(hare, kind):
        return -1
    power = 1
    lam = 1
    steps = 1
    while not _same(tort, hare, dims):
        if power == lam:
            tort[:] = hare
            power *= 2
            lam = 0
        if not step(hare, kind):
            return -1
        lam += 1
        steps += 1
        if steps > limit:
            return 0
    return lam


@njit(cache=True)
def permutation_trace(n_total, st, threshold, block, trace):
    """Replay the keyed block shuffle on source indices.

    After the call ``trace[i]`` is the source index of output position i.
    Each block of ``block`` bytes (shorter at the end) is shuffled
    independently, drawing from one running logistic stream.  Returns
    (bytes drawn, ok).
    """
    drawn = 0
    for i in range(n_total):
        trace[i] = i
    base = 0
    while base < n_total:
        n = min(block, n_total - base)
        half = n // 2
        srt = 0
        mid = half
        while srt != half and mid != n:
            if not logistic_step(st):
                return drawn, False
            drawn += 1
            if (st[0] & 0xFF) > threshold:
                tmp = trace[base + srt]
                trace[base + srt] = trace[base + mid]
                trace[base + mid] = tmp
                mid += 1
            srt += 1
        while mid != n:
            if not logistic_step(st):
                return drawn, False
            drawn += 1
            pos = mid + (st[0] & 0xFF) % (n - mid)
            tmp = trace[base + mid]
            trace[base + mid] = trace[base + pos]
            trace[base + pos] = tmp
            mid += 1
        base += n
    return drawn, True


@njit(cache=True)
def substitute(data, out, hst, lst, prev):
    """Henon XOR, add previous ciphertext byte, Lorenz XOR.

    Returns (prev, bytes done); bytes done < len(data) means a map saturated.
    """
    for i in range(data.shape[0]):
        if not henon_step(hst) or not lorenz_step(lst):
            return prev, i
        t = data[i] ^ (hst[0] & 0xFF)
        c = ((t + prev) & 0xFF) ^ (lst[0] & 0xFF)
        out[i] = c
        prev = c
    return prev, data.shape[0]


@njit(cache=True)
def desubstitute(data, out, hst, lst, prev):
    for i in range(data.shape[0]):
        if not henon_step(hst) or not lorenz_step(lst):
            return prev, i
        c = data[i]
        u = c ^ (lst[0] & 0xFF)
        out[i] = ((u - prev + 256) & 0xFF) ^ (hst[0] & 0xFF)
        prev = c
    return prev, data.shape[0]
