"""Fixed-step RK4 cores for the master and Schrodinger equations.

The hot loops are numba-compiled. A structural trick keeps them cheap:
density matrices stay *exactly* Hermitian through every RK4 stage (each
stage derivative is assembled in an explicitly conjugate-symmetric way), so
rho H = (H rho)^dagger and one sparse product per Liouvillian application
suffices.

Collapse operators must be generalized permutations (at most one nonzero
per row and per column); every channel in the physical model -- mode
annihilation, level transitions, level projectors -- has that shape. Their
jump action rho -> L rho L^dagger is then a pure gather, and L^dagger L is
diagonal, absorbed into a static damping vector.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


class ChannelStructureError(ValueError):
    """Collapse operator is not a generalized permutation."""


# ---------------------------------------------------------------------------
# packing


def pack_channels(channels, dim):
    """Flatten collapse channels for the kernels.

    Returns (starts, rows, srcs, amps, rates, gdiag):
    channel c occupies [starts[c], starts[c+1]) in rows/srcs/amps, and
    gdiag = -1/2 sum_c rate_c diag(L_c^dagger L_c).
    """
    starts = [0]
    rows, srcs, amps, rates = [], [], [], []
    gdiag = np.zeros(dim, dtype=np.float64)
    for op, rate in channels:
        coo = op.tocoo() if hasattr(op, "tocoo") else op.matrix.tocoo()
        seen_r, seen_c = set(), set()
        for r, c in zip(coo.row, coo.col):
            if r in seen_r or c in seen_c:
                raise ChannelStructureError(
                    "collapse operator has more than one entry in a row or column; "
                    "the fast kernel supports mode operators, level transitions "
                    "and projectors only")
            seen_r.add(r)
            seen_c.add(c)
        rows.extend(coo.row.tolist())
        srcs.extend(coo.col.tolist())
        amps.extend(coo.data.tolist())
        rates.append(rate)
        starts.append(len(rows))
        np.add.at(gdiag, coo.col, -0.5 * rate * np.abs(coo.data) ** 2)
    return (np.array(starts, dtype=np.int64),
            np.array(rows, dtype=np.int64),
            np.array(srcs, dtype=np.int64),
            np.array(amps, dtype=np.complex128),
            np.array(rates, dtype=np.float64),
            gdiag)


# ---------------------------------------------------------------------------
# numpy reference Liouvillian (general formula; used as the test oracle and
# as the implementation behind the public liouvillian_apply)


def liouvillian_matvec_np(rho, t, ham, channels):
    """d(rho)/dt for an arbitrary (possibly non-Hermitian) matrix rho.

    ham is a TermSum; channels iterable of (sparse-or-Operator, rate).
    """
    h = ham.at(t).matrix
    out = -1j * (h @ rho - rho @ h)
    for op, rate in channels:
        mat = op if hasattr(op, "shape") else op.matrix
        ld = mat.conjugate().transpose()
        ll = (ld @ mat).toarray() if hasattr(ld @ mat, "toarray") else ld @ mat
        out = out + rate * (mat @ rho @ ld - 0.5 * (ll @ rho + rho @ ll))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True, fastmath=True)
def _apply_master(rho, zr_zi, h0r, h0c, h0v, orow, ocol, oval, oterm,
                  gdiag, jst, jrow, jsrc, jamp, jrate, B, out):
    dim = rho.shape[0]
    B[:, :] = 0.0
    for p in range(h0r.shape[0]):
        v = h0v[p]
        br = B[h0r[p]]
        rr = rho[h0c[p]]
        for j in range(dim):
            br[j] += v * rr[j]
    for p in range(orow.shape[0]):
        z = zr_zi[oterm[p]] * oval[p]
        zc = np.conj(z)
        br = B[orow[p]]
        rr = rho[ocol[p]]
        for j in range(dim):
            br[j] += z * rr[j]
        bc = B[ocol[p]]
        rc = rho[orow[p]]
        for j in range(dim):
            bc[j] += zc * rc[j]
    # out = -i (B - B^dagger) + (g_i + g_j) rho  (exactly Hermitian)
    for i in range(dim):
        gi = gdiag[i]
        for j in range(dim):
            d = B[i, j] - np.conj(B[j, i])
            out[i, j] = complex(d.imag, -d.real) + (gi + gdiag[j]) * rho[i, j]
    for c in range(jrate.shape[0]):
        rt = jrate[c]
        for p in range(jst[c], jst[c + 1]):
            ip = jrow[p]
            sp = jsrc[p]
            ap = rt * jamp[p]
            for q in range(jst[c], jst[c + 1]):
                out[ip, jrow[q]] += ap * np.conj(jamp[q]) * rho[sp, jsrc[q]]


@njit(cache=True, fastmath=True)
def master_rk4_chunk(rho, t0, h, nsteps, freqs, h0r, h0c, h0v,
                     orow, ocol, oval, oterm, gdiag,
                     jst, jrow, jsrc, jamp, jrate):
    dim = rho.shape[0]
    nterms = freqs.shape[0]
    z = np.empty(nterms, dtype=np.complex128)
    B = np.empty((dim, dim), dtype=np.complex128)
    k1 = np.empty((dim, dim), dtype=np.complex128)
    k2 = np.empty((dim, dim), dtype=np.complex128)
    k3 = np.empty((dim, dim), dtype=np.complex128)
    k4 = np.empty((dim, dim), dtype=np.complex128)
    tmp = np.empty((dim, dim), dtype=np.complex128)
    for step in range(nsteps):
        t = t0 + step * h
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * t)
        _apply_master(rho, z, h0r, h0c, h0v, orow, ocol, oval, oterm,
                      gdiag, jst, jrow, jsrc, jamp, jrate, B, k1)
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * (t + 0.5 * h))
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + 0.5 * h * k1[i, j]
        _apply_master(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm,
                      gdiag, jst, jrow, jsrc, jamp, jrate, B, k2)
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + 0.5 * h * k2[i, j]
        _apply_master(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm,
                      gdiag, jst, jrow, jsrc, jamp, jrate, B, k3)
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * (t + h))
        for i in range(dim):
            for j in range(dim):
                tmp[i, j] = rho[i, j] + h * k3[i, j]
        _apply_master(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm,
                      gdiag, jst, jrow, jsrc, jamp, jrate, B, k4)
        sixth = h / 6.0
        for i in range(dim):
            for j in range(dim):
                rho[i, j] += sixth * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])


@njit(cache=True, fastmath=True)
def _apply_schrodinger(psi, zr_zi, h0r, h0c, h0v, orow, ocol, oval, oterm, out):
    out[:] = 0.0
    for p in range(h0r.shape[0]):
        out[h0r[p]] += h0v[p] * psi[h0c[p]]
    for p in range(orow.shape[0]):
        z = zr_zi[oterm[p]] * oval[p]
        out[orow[p]] += z * psi[ocol[p]]
        out[ocol[p]] += np.conj(z) * psi[orow[p]]
    for i in range(out.shape[0]):
        v = out[i]
        out[i] = complex(v.imag, -v.real)   # multiply by -i


@njit(cache=True, fastmath=True)
def schrodinger_rk4_chunk(psi, t0, h, nsteps, freqs, h0r, h0c, h0v,
                          orow, ocol, oval, oterm):
    dim = psi.shape[0]
    nterms = freqs.shape[0]
    z = np.empty(nterms, dtype=np.complex128)
    k1 = np.empty(dim, dtype=np.complex128)
    k2 = np.empty(dim, dtype=np.complex128)
    k3 = np.empty(dim, dtype=np.complex128)
    k4 = np.empty(dim, dtype=np.complex128)
    tmp = np.empty(dim, dtype=np.complex128)
    for step in range(nsteps):
        t = t0 + step * h
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * t)
        _apply_schrodinger(psi, z, h0r, h0c, h0v, orow, ocol, oval, oterm, k1)
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * (t + 0.5 * h))
        for i in range(dim):
            tmp[i] = psi[i] + 0.5 * h * k1[i]
        _apply_schrodinger(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm, k2)
        for i in range(dim):
            tmp[i] = psi[i] + 0.5 * h * k2[i]
        _apply_schrodinger(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm, k3)
        for m in range(nterms):
            z[m] = np.exp(-1j * freqs[m] * (t + h))
        for i in range(dim):
            tmp[i] = psi[i] + h * k3[i]
        _apply_schrodinger(tmp, z, h0r, h0c, h0v, orow, ocol, oval, oterm, k4)
        sixth = h / 6.0
        for i in range(dim):
            psi[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])


# ---------------------------------------------------------------------------
# pure-numpy chunk fallbacks (same stepping, vectorized formulas); kept for
# environments without a working numba and as an equivalence reference


def _apply_master_np(rho, z, h0_csr, oterms, gdiag, jumps):
    B = h0_csr @ rho
    for (op_csr, term_idx) in oterms:
        zc = z[term_idx]
        B = B + zc * (op_csr @ rho) + np.conj(zc) * (op_csr.conjugate().transpose() @ rho)
    out = -1j * (B - B.conj().T) + (gdiag[:, None] + gdiag[None, :]) * rho
    for rows, srcs, amps, rate in jumps:
        w = rate * np.outer(amps, amps.conj())
        out[np.ix_(rows, rows)] += w * rho[np.ix_(srcs, srcs)]
    return out


def master_rk4_chunk_np(rho, t0, h, nsteps, freqs, h0_csr, oterms, gdiag, jumps):
    for step in range(nsteps):
        t = t0 + step * h
        z0 = np.exp(-1j * freqs * t)
        z1 = np.exp(-1j * freqs * (t + 0.5 * h))
        z2 = np.exp(-1j * freqs * (t + h))
        k1 = _apply_master_np(rho, z0, h0_csr, oterms, gdiag, jumps)
        k2 = _apply_master_np(rho + 0.5 * h * k1, z1, h0_csr, oterms, gdiag, jumps)
        k3 = _apply_master_np(rho + 0.5 * h * k2, z1, h0_csr, oterms, gdiag, jumps)
        k4 = _apply_master_np(rho + h * k3, z2, h0_csr, oterms, gdiag, jumps)
        rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return rho


def _apply_schrodinger_np(psi, z, h0_csr, oterms):
    y = h0_csr @ psi
    for (op_csr, term_idx) in oterms:
        zc = z[term_idx]
        y = y + zc * (op_csr @ psi) + np.conj(zc) * (op_csr.conjugate().transpose() @ psi)
    return -1j * y


def schrodinger_rk4_chunk_np(psi, t0, h, nsteps, freqs, h0_csr, oterms):
    for step in range(nsteps):
        t = t0 + step * h
        z0 = np.exp(-1j * freqs * t)
        z1 = np.exp(-1j * freqs * (t + 0.5 * h))
        z2 = np.exp(-1j * freqs * (t + h))
        k1 = _apply_schrodinger_np(psi, z0, h0_csr, oterms)
        k2 = _apply_schrodinger_np(psi + 0.5 * h * k1, z1, h0_csr, oterms)
        k3 = _apply_schrodinger_np(psi + 0.5 * h * k2, z1, h0_csr, oterms)
        k4 = _apply_schrodinger_np(psi + h * k3, z2, h0_csr, oterms)
        psi += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return psi
