"""Pure-numpy kernels, vectorized across replicas instead of compiled.

Signatures mirror ``_numba``. Integer hashing is bit-identical; floating
results match to rounding (``scipy.special.erfc`` stands in for libm).
"""
import numpy as np
from scipy.special import erfc

from ._constants import (_A, _B, _C, _D, _E, _F, _F1, _F2, _GOLDEN, _INV_2_53,
                     _INV_SQRT_2PI, _K_CTR, _K_SEED, _M1, _M2, _S11, _S27,
                     _S30, _S31, _S33, _SQRT1_2, _SQRT_2_OVER_PI, XI, POWER,
                     _FALLBACK_OFFSET)

NAME = "numpy"

_CHUNK = 1 << 16


def _u64(x):
    return np.atleast_1d(np.asarray(x, dtype=np.uint64))


def _mix_a(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _mix_b(z):
    z = (z ^ (z >> _S33)) * _F1
    z = (z ^ (z >> _S33)) * _F2
    return z ^ (z >> _S33)


def stream_key(seed, stream):
    return _mix_a(_mix_b(_u64(seed) ^ _K_SEED) + _mix_a(_u64(stream) + _GOLDEN))


def random_bits(key, counter):
    return _mix_b(_u64(key) ^ _mix_a(_u64(counter) * _GOLDEN + _K_CTR))


def _uniform(key, counter):
    return ((random_bits(key, counter) >> _S11).astype(np.float64) + 0.5) * _INV_2_53


def _gaussian(key, counter):
    return ndtri_rational(_uniform(key, counter))


def _coin(key, counter):
    return np.where(_uniform(key, counter) < 0.5, 1, -1).astype(np.int8)


def _poly(c, x):
    acc = np.full_like(x, c[7])
    for k in range(6, -1, -1):
        acc = acc * x + c[k]
    return acc


def ndtr(x):
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) * _SQRT1_2)


def ndtri_rational(p):
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    out = np.empty_like(p)
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _poly(_A, r) / _poly(_B, r)
    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.where(qt < 0.0, p[tail], 1.0 - p[tail])
        r = np.sqrt(-np.log(r))
        near = r <= 5.0
        x = np.empty_like(r)
        rn = r[near] - 1.6
        x[near] = _poly(_C, rn) / _poly(_D, rn)
        rf = r[~near] - 5.0
        x[~near] = _poly(_E, rf) / _poly(_F, rf)
        out[tail] = np.where(qt < 0.0, -x, x)
    return out


def ndtri(p):
    p = np.asarray(p, dtype=np.float64)
    upper = p > 0.5
    lo = np.where(upper, 1.0 - p, p)
    x = ndtri_rational(lo)
    dens = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    ok = dens > 0.0
    x[ok] -= (ndtr(x[ok]) - lo[ok]) / dens[ok]
    return np.where(upper, -x, x)


def _xi(s):
    a = np.abs(s)
    out = np.zeros_like(a)
    inside = a < 1.0
    q = ndtri(0.5 * (1.0 - a[inside]))
    out[inside] = _SQRT_2_OVER_PI * np.exp(-0.5 * q * q)
    return out


def speed_values(kind, alpha, ts, tv, s):
    s = np.asarray(s, dtype=np.float64)
    if kind == XI:
        return _xi(s)
    if kind == POWER:
        a = (1.0 - s) * (1.0 + s)
        return np.where(a > 0.0, np.maximum(a, 0.0) ** alpha, 0.0)
    return np.interp(s, ts, tv)


def uniforms(seed, stream, counter0, count):
    key = stream_key(seed, stream)
    ctr = np.uint64(counter0) + np.arange(count, dtype=np.uint64)
    return _uniform(key, ctr)


def gaussians(seed, stream, counter0, count):
    return ndtri_rational(uniforms(seed, stream, counter0, count))


def gaussian_rows(seed, stream0, n_rows, width):
    keys = stream_key(seed, np.uint64(stream0) + np.arange(n_rows, dtype=np.uint64))
    out = np.empty((n_rows, width))
    for c in range(width):
        out[:, c] = _gaussian(keys, np.uint64(c))
    return out


def coins(seed, stream, count):
    key = stream_key(seed, stream)
    return _coin(key, np.arange(count, dtype=np.uint64))


def _dot_rows(U, dB):
    # dB: (R, d) -> (R, n), accumulating over j in order like the compiled loop
    x = np.zeros((dB.shape[0], U.shape[0]))
    for j in range(U.shape[1]):
        x += U[:, j][None, :] * dB[:, j][:, None]
    return x


def _euler_step(w, ab, x, kind, alpha, ts, tv, thr, step):
    live = ab < 0
    if not live.any():
        return 0
    wl = w[live]
    wl = wl + speed_values(kind, alpha, ts, tv, wl) * x[live]
    np.clip(wl, -1.0, 1.0, out=wl)
    hit = np.abs(wl) >= thr
    wl[hit] = np.where(wl[hit] > 0.0, 1.0, -1.0)
    w[live] = wl
    abl = ab[live]
    abl[hit] = step
    ab[live] = abl
    return int(hit.sum())


def sticky_path(U, kind, alpha, ts, tv, dB, eps, record):
    n = U.shape[0]
    K = dB.shape[0]
    thr = 1.0 - eps
    w = np.zeros(n)
    absorbed = np.full(n, -1, dtype=np.int64)
    path = np.zeros((K + 1 if record else 1, n))
    x_all = _dot_rows(U, dB)
    for k in range(K):
        _euler_step(w, absorbed, x_all[k], kind, alpha, ts, tv, thr, k + 1)
        if record:
            path[k + 1] = w
    return path, w, absorbed


def _gauss_step(keys, k, d, sqrt_h):
    dB = np.empty((keys.shape[0], d))
    for j in range(d):
        dB[:, j] = sqrt_h * _gaussian(keys, np.uint64(k * d + j))
    return dB


def sticky_batch(U, kind, alpha, ts, tv, seed, stream0, sqrt_h, K, eps,
                 ckpt, final, absorbed, at_ckpt, sigma, tie):
    n_rep, n = final.shape
    d = U.shape[1]
    thr = 1.0 - eps
    streams = np.uint64(stream0) + np.arange(n_rep, dtype=np.uint64)
    keys = stream_key(seed, streams)
    w = np.zeros((n_rep, n))
    ab = np.full((n_rep, n), -1, dtype=np.int64)
    c = 0
    while c < len(ckpt) and ckpt[c] == 0:
        at_ckpt[:, c, :] = 0.0
        c += 1
    rows = np.arange(n_rep)
    for k in range(K):
        if rows.size == 0:
            break
        dB = _gauss_step(keys[rows], k, d, sqrt_h)
        x = _dot_rows(U, dB)
        wr, abr = w[rows], ab[rows]
        _euler_step(wr, abr, x, kind, alpha, ts, tv, thr, k + 1)
        w[rows], ab[rows] = wr, abr
        while c < len(ckpt) and ckpt[c] == k + 1:
            at_ckpt[:, c, :] = w
            c += 1
        rows = rows[(abr < 0).any(axis=1)]
    while c < len(ckpt):
        at_ckpt[:, c, :] = w
        c += 1
    final[:] = w
    absorbed[:] = ab
    sigma[:] = np.sign(w).astype(np.int8)
    tie[:] = w == 0.0
    for r, i in zip(*np.nonzero(w == 0.0)):
        fkey = stream_key(seed, streams[r] + _FALLBACK_OFFSET)
        sigma[r, i] = _coin(fkey, np.uint64(i))[0]


def coupled_batch(U, kind, alpha, ts, tv, seed, stream0, sqrt_h, disc, eps,
                  with_w, ckpt, w_final, z_ckpt, z_final):
    n_rep, n = z_final.shape
    d = U.shape[1]
    thr = 1.0 - eps
    keys = stream_key(seed, np.uint64(stream0) + np.arange(n_rep, dtype=np.uint64))
    w = np.zeros((n_rep, n))
    z = np.zeros((n_rep, n))
    ab = np.full((n_rep, n), -1, dtype=np.int64)
    c = 0
    while c < len(ckpt) and ckpt[c] == 0:
        z_ckpt[:, c, :] = 0.0
        c += 1
    for k in range(disc.shape[0]):
        x = _dot_rows(U, _gauss_step(keys, k, d, sqrt_h))
        z += disc[k] * x
        if with_w:
            _euler_step(w, ab, x, kind, alpha, ts, tv, thr, k + 1)
        while c < len(ckpt) and ckpt[c] == k + 1:
            z_ckpt[:, c, :] = z
            c += 1
    w_final[:] = w
    z_final[:] = z


def krivine_euler_batch(U, kind, alpha, ts, tv, seed, stream0, T, c_in,
                        c_out, sigma, stop_at):
    n_rep, n = sigma.shape
    d = U.shape[1]
    streams = np.uint64(stream0) + np.arange(n_rep, dtype=np.uint64)
    keys = stream_key(seed, streams)
    x = np.zeros((n_rep, n))
    st = np.full((n_rep, n), -1, dtype=np.int64)
    rows = np.arange(n_rep)
    for t in range(T):
        if rows.size == 0:
            break
        dot = _dot_rows(U, _gauss_step(keys[rows], t, d, 1.0))
        xr, sr = x[rows], st[rows]
        live = sr < 0
        xl = xr[live]
        xl = xl + c_out * speed_values(kind, alpha, ts, tv, c_in * xl) * dot[live]
        xr[live] = xl
        srl = sr[live]
        srl[np.abs(xl) >= 1.0] = t + 1
        sr[live] = srl
        x[rows], st[rows] = xr, sr
        rows = rows[(sr < 0).any(axis=1)]
    stop_at[:] = st
    sigma[:] = np.where(x > 0.0, 1, -1).astype(np.int8)
    for r, i in zip(*np.nonzero(st < 0)):
        fkey = stream_key(seed, streams[r] + _FALLBACK_OFFSET)
        sigma[r, i] = _coin(fkey, np.uint64(i))[0]


def brute_force(n, ei, ej, ew, mask_lo, mask_hi):
    best = -1.0
    best_mask = -1
    top = n - 1
    for lo in range(mask_lo, mask_hi, _CHUNK):
        m = np.arange(lo, min(lo + _CHUNK, mask_hi), dtype=np.int64)
        val = np.zeros(m.shape[0])
        for a, b, wt in zip(ei, ej, ew):
            ba = 0 if a == 0 else (m >> (top - a)) & 1
            bb = 0 if b == 0 else (m >> (top - b)) & 1
            val += np.where(ba != bb, wt, 0.0)
        k = int(np.argmax(val))
        if val[k] > best:
            best = float(val[k])
            best_mask = int(m[k])
    return best, best_mask


def sdp_objective(Wd, V):
    iu = np.triu_indices(Wd.shape[0], 1)
    G = V @ V.T
    return float(np.sum(Wd[iu] * (1.0 - G[iu]) * 0.5))


def sdp_sweeps(Wd, V, max_sweeps, tol, history):
    obj = sdp_objective(Wd, V)
    history[0] = obj
    sweeps = 0
    for s in range(max_sweeps):
        for i in range(V.shape[0]):
            g = Wd[i] @ V
            nrm = np.sqrt(g @ g)
            if nrm > 0.0:
                V[i] = -g / nrm
        new = sdp_objective(Wd, V)
        sweeps = s + 1
        history[sweeps] = new
        if new - obj < tol:
            break
        obj = new
    return sweeps
