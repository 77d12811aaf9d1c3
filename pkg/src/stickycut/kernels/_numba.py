"""Numba-compiled kernels.

Every function here has a vectorized twin in ``_numpy`` with the same
signature and the same arithmetic order, so the two backends agree to
rounding error (bit-exact for the integer RNG).
"""
import math

import numpy as np
from numba import njit

from ._constants import (_A, _B, _C, _D, _E, _F, _F1, _F2, _FALLBACK_OFFSET,
                         _GOLDEN, _INV_2_53, _INV_SQRT_2PI, _K_CTR, _K_SEED,
                         _M1, _M2, _S11, _S27, _S30, _S31, _S33, _SQRT1_2,
                         _SQRT_2_OVER_PI, POWER, XI)

NAME = "numba"


# ---------------------------------------------------------------- RNG

@njit(cache=True, nogil=True, error_model="numpy")
def _mix_a(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True, error_model="numpy")
def _mix_b(z):
    z = (z ^ (z >> _S33)) * _F1
    z = (z ^ (z >> _S33)) * _F2
    return z ^ (z >> _S33)


@njit(cache=True, nogil=True, error_model="numpy")
def stream_key(seed, stream):
    return _mix_a(_mix_b(seed ^ _K_SEED) + _mix_a(stream + _GOLDEN))


@njit(cache=True, nogil=True, error_model="numpy")
def random_bits(key, counter):
    return _mix_b(key ^ _mix_a(counter * _GOLDEN + _K_CTR))


@njit(cache=True, nogil=True, error_model="numpy")
def _uniform(key, counter):
    return (float(random_bits(key, counter) >> _S11) + 0.5) * _INV_2_53


@njit(cache=True, nogil=True, error_model="numpy")
def _gaussian(key, counter):
    return _ndtri_rational(_uniform(key, counter))


@njit(cache=True, nogil=True, error_model="numpy")
def _coin(key, counter):
    return 1 if _uniform(key, counter) < 0.5 else -1


# ----------------------------------------------------- special functions

@njit(cache=True, nogil=True, error_model="numpy")
def _poly(c, x):
    acc = c[7]
    for k in range(6, -1, -1):
        acc = acc * x + c[k]
    return acc


@njit(cache=True, nogil=True, error_model="numpy")
def _ndtr(x):
    return 0.5 * math.erfc(-x * _SQRT1_2)


@njit(cache=True, nogil=True, error_model="numpy")
def _ndtri_rational(p):
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        x = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        x = _poly(_E, r) / _poly(_F, r)
    return -x if q < 0.0 else x


@njit(cache=True, nogil=True, error_model="numpy")
def _ndtri(p):
    # Refine on the lower half only; 1 - p is exact for p >= 0.5.
    upper = p > 0.5
    lo = 1.0 - p if upper else p
    x = _ndtri_rational(lo)
    dens = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    if dens > 0.0:
        x -= (_ndtr(x) - lo) / dens
    return -x if upper else x


@njit(cache=True, nogil=True, error_model="numpy")
def _xi(s):
    a = abs(s)
    if a >= 1.0:
        return 0.0
    q = _ndtri_rational(0.5 * (1.0 - a))
    return _SQRT_2_OVER_PI * math.exp(-0.5 * q * q)


@njit(cache=True, nogil=True, error_model="numpy")
def _speed(kind, alpha, ts, tv, s):
    if kind == XI:
        return _xi(s)
    if kind == POWER:
        a = (1.0 - s) * (1.0 + s)
        return a ** alpha if a > 0.0 else 0.0
    # tabulated, linear interpolation
    m = ts.shape[0]
    if s <= ts[0]:
        return tv[0]
    if s >= ts[m - 1]:
        return tv[m - 1]
    lo, hi = 0, m - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if ts[mid] <= s:
            lo = mid
        else:
            hi = mid
    frac = (s - ts[lo]) / (ts[hi] - ts[lo])
    return tv[lo] + frac * (tv[hi] - tv[lo])


@njit(cache=True, nogil=True, error_model="numpy")
def ndtr(x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _ndtr(x[i])
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def ndtri(p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = _ndtri(p[i])
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def ndtri_rational(p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = _ndtri_rational(p[i])
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def speed_values(kind, alpha, ts, tv, s):
    out = np.empty(s.shape[0])
    for i in range(s.shape[0]):
        out[i] = _speed(kind, alpha, ts, tv, s[i])
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def uniforms(seed, stream, counter0, count):
    key = stream_key(seed, stream)
    out = np.empty(count)
    for c in range(count):
        out[c] = _uniform(key, counter0 + np.uint64(c))
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def gaussians(seed, stream, counter0, count):
    key = stream_key(seed, stream)
    out = np.empty(count)
    for c in range(count):
        out[c] = _gaussian(key, counter0 + np.uint64(c))
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def gaussian_rows(seed, stream0, n_rows, width):
    """Row r holds counters 0..width-1 of stream ``stream0 + r``."""
    out = np.empty((n_rows, width))
    for r in range(n_rows):
        key = stream_key(seed, stream0 + np.uint64(r))
        for c in range(width):
            out[r, c] = _gaussian(key, np.uint64(c))
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def coins(seed, stream, count):
    key = stream_key(seed, stream)
    out = np.empty(count, dtype=np.int8)
    for c in range(count):
        out[c] = _coin(key, np.uint64(c))
    return out


# ------------------------------------------------------------- diffusion

@njit(cache=True, nogil=True, error_model="numpy")
def sticky_path(U, kind, alpha, ts, tv, dB, eps, record):
    n, d = U.shape
    K = dB.shape[0]
    thr = 1.0 - eps
    w = np.zeros(n)
    absorbed = np.full(n, -1, dtype=np.int64)
    path = np.zeros((K + 1 if record else 1, n))
    for k in range(K):
        for i in range(n):
            if absorbed[i] >= 0:
                continue
            x = 0.0
            for j in range(d):
                x += U[i, j] * dB[k, j]
            wi = w[i] + _speed(kind, alpha, ts, tv, w[i]) * x
            if wi > 1.0:
                wi = 1.0
            elif wi < -1.0:
                wi = -1.0
            if abs(wi) >= thr:
                wi = 1.0 if wi > 0.0 else -1.0
                absorbed[i] = k + 1
            w[i] = wi
        if record:
            for i in range(n):
                path[k + 1, i] = w[i]
    return path, w, absorbed


@njit(cache=True, nogil=True, error_model="numpy")
def sticky_batch(U, kind, alpha, ts, tv, seed, stream0, sqrt_h, K, eps,
                 ckpt, final, absorbed, at_ckpt, sigma, tie):
    n_rep, n = final.shape
    d = U.shape[1]
    n_ck = ckpt.shape[0]
    thr = 1.0 - eps
    dB = np.empty(d)
    w = np.empty(n)
    ab = np.empty(n, dtype=np.int64)
    for r in range(n_rep):
        stream = stream0 + np.uint64(r)
        key = stream_key(seed, stream)
        w[:] = 0.0
        ab[:] = -1
        active = n
        c = 0
        while c < n_ck and ckpt[c] == 0:
            at_ckpt[r, c, :] = 0.0
            c += 1
        for k in range(K):
            base = np.uint64(k * d)
            for j in range(d):
                dB[j] = sqrt_h * _gaussian(key, base + np.uint64(j))
            for i in range(n):
                if ab[i] >= 0:
                    continue
                x = 0.0
                for j in range(d):
                    x += U[i, j] * dB[j]
                wi = w[i] + _speed(kind, alpha, ts, tv, w[i]) * x
                if wi > 1.0:
                    wi = 1.0
                elif wi < -1.0:
                    wi = -1.0
                if abs(wi) >= thr:
                    wi = 1.0 if wi > 0.0 else -1.0
                    ab[i] = k + 1
                    active -= 1
                w[i] = wi
            while c < n_ck and ckpt[c] == k + 1:
                at_ckpt[r, c, :] = w
                c += 1
            if active == 0:
                break
        while c < n_ck:
            at_ckpt[r, c, :] = w
            c += 1
        fkey = stream_key(seed, stream + _FALLBACK_OFFSET)
        for i in range(n):
            final[r, i] = w[i]
            absorbed[r, i] = ab[i]
            if w[i] > 0.0:
                sigma[r, i] = 1
                tie[r, i] = False
            elif w[i] < 0.0:
                sigma[r, i] = -1
                tie[r, i] = False
            else:
                sigma[r, i] = _coin(fkey, np.uint64(i))
                tie[r, i] = True


@njit(cache=True, nogil=True, error_model="numpy")
def coupled_batch(U, kind, alpha, ts, tv, seed, stream0, sqrt_h, disc, eps,
                  with_w, ckpt, w_final, z_ckpt, z_final):
    """Euler W and discounted integral Z on the same increments.

    With ``with_w`` false only Z is advanced (``w_final`` is left at 0).
    """
    n_rep, n = z_final.shape
    d = U.shape[1]
    K = disc.shape[0]
    n_ck = ckpt.shape[0]
    thr = 1.0 - eps
    dB = np.empty(d)
    w = np.empty(n)
    z = np.empty(n)
    frozen = np.empty(n, dtype=np.bool_)
    for r in range(n_rep):
        key = stream_key(seed, stream0 + np.uint64(r))
        w[:] = 0.0
        z[:] = 0.0
        frozen[:] = False
        c = 0
        while c < n_ck and ckpt[c] == 0:
            z_ckpt[r, c, :] = 0.0
            c += 1
        for k in range(K):
            base = np.uint64(k * d)
            for j in range(d):
                dB[j] = sqrt_h * _gaussian(key, base + np.uint64(j))
            for i in range(n):
                x = 0.0
                for j in range(d):
                    x += U[i, j] * dB[j]
                z[i] += disc[k] * x
                if with_w and not frozen[i]:
                    wi = w[i] + _speed(kind, alpha, ts, tv, w[i]) * x
                    if wi > 1.0:
                        wi = 1.0
                    elif wi < -1.0:
                        wi = -1.0
                    if abs(wi) >= thr:
                        wi = 1.0 if wi > 0.0 else -1.0
                        frozen[i] = True
                    w[i] = wi
            while c < n_ck and ckpt[c] == k + 1:
                z_ckpt[r, c, :] = z
                c += 1
        for i in range(n):
            w_final[r, i] = w[i]
            z_final[r, i] = z[i]


@njit(cache=True, nogil=True, error_model="numpy")
def krivine_euler_batch(U, kind, alpha, ts, tv, seed, stream0, T, c_in,
                        c_out, sigma, stop_at):
    """Discrete recursion X += c_out * phi(c_in * X) * <gamma_t, u>.

    Stops a vector at the first |X| >= 1; unstopped vectors get a fair coin
    from the fallback stream (``stop_at`` stays -1 for them).
    """
    n_rep, n = sigma.shape
    d = U.shape[1]
    g = np.empty(d)
    x = np.empty(n)
    st = np.empty(n, dtype=np.int64)
    for r in range(n_rep):
        stream = stream0 + np.uint64(r)
        key = stream_key(seed, stream)
        x[:] = 0.0
        st[:] = -1
        active = n
        for t in range(T):
            base = np.uint64(t * d)
            for j in range(d):
                g[j] = _gaussian(key, base + np.uint64(j))
            for i in range(n):
                if st[i] >= 0:
                    continue
                dot = 0.0
                for j in range(d):
                    dot += U[i, j] * g[j]
                xi_ = x[i] + c_out * _speed(kind, alpha, ts, tv, c_in * x[i]) * dot
                x[i] = xi_
                if abs(xi_) >= 1.0:
                    st[i] = t + 1
                    active -= 1
            if active == 0:
                break
        fkey = stream_key(seed, stream + _FALLBACK_OFFSET)
        for i in range(n):
            stop_at[r, i] = st[i]
            if st[i] >= 0:
                sigma[r, i] = 1 if x[i] > 0.0 else -1
            else:
                sigma[r, i] = _coin(fkey, np.uint64(i))


# ---------------------------------------------------------------- maxcut

@njit(cache=True, nogil=True, error_model="numpy")
def brute_force(n, ei, ej, ew, mask_lo, mask_hi):
    """Best cut over masks in [mask_lo, mask_hi); vertex 1 is the top bit."""
    best = -1.0
    best_mask = -1
    m_edges = ei.shape[0]
    top = n - 1
    for m in range(mask_lo, mask_hi):
        val = 0.0
        for e in range(m_edges):
            a = ei[e]
            b = ej[e]
            ba = 0 if a == 0 else (m >> (top - a)) & 1
            bb = 0 if b == 0 else (m >> (top - b)) & 1
            if ba != bb:
                val += ew[e]
        if val > best:
            best = val
            best_mask = m
    return best, best_mask


@njit(cache=True, nogil=True, error_model="numpy")
def sdp_objective(Wd, V):
    n, r = V.shape
    tot = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if Wd[i, j] != 0.0:
                dot = 0.0
                for k in range(r):
                    dot += V[i, k] * V[j, k]
                tot += Wd[i, j] * (1.0 - dot) * 0.5
    return tot


@njit(cache=True, nogil=True, error_model="numpy")
def sdp_sweeps(Wd, V, max_sweeps, tol, history):
    """Gauss-Seidel mixing updates in place; returns the sweep count."""
    n, r = V.shape
    g = np.empty(r)
    obj = sdp_objective(Wd, V)
    history[0] = obj
    sweeps = 0
    for s in range(max_sweeps):
        for i in range(n):
            g[:] = 0.0
            for j in range(n):
                wij = Wd[i, j]
                if wij != 0.0:
                    for k in range(r):
                        g[k] += wij * V[j, k]
            nrm = 0.0
            for k in range(r):
                nrm += g[k] * g[k]
            nrm = math.sqrt(nrm)
            if nrm > 0.0:
                for k in range(r):
                    V[i, k] = -g[k] / nrm
        new = sdp_objective(Wd, V)
        sweeps = s + 1
        history[sweeps] = new
        if new - obj < tol:
            break
        obj = new
    return sweeps
