import numpy as np


def static_frame_propagator(model, space, t):
    """Exact closed-system propagator for the full interaction Hamiltonian.

    The interaction picture is the rotating frame of W = wc1*n1 + wc2*n2 +
    diag(level energies); undoing it turns the phase-modulated Hamiltonian
    into a constant one, so a single eigendecomposition gives U(t) exactly.
    Independent of the RK4 integration path.
    """
    from hybridccz.hamiltonians import h_full

    ham = h_full(model, space)
    dim = space.dim
    h_static = np.zeros((dim, dim), dtype=complex)
    for term in ham.terms:
        mat = term.op.toarray()
        h_static += term.coeff * mat + term.coeff * mat.conj().T
    freqs = model.freqs
    eps = np.array([0.0, freqs.omega_gg_prime, freqs.omega_eg_prime,
                    freqs.omega_fg + freqs.omega_gg_prime])
    w = np.empty(dim)
    for i in range(dim):
        n1, n2, lvl = space.unindex(i)
        w[i] = freqs.omega_c1 * n1 + freqs.omega_c2 * n2 + eps[lvl]
    evals, evecs = np.linalg.eigh(h_static + np.diag(w))
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    return np.diag(np.exp(1j * w * t)) @ u
