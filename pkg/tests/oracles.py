"""Independent reference implementations used only by the tests.

None of these call into the package; they use numpy's own samplers and
factorizations so agreement with the package is a real cross-check.
"""

import numpy as np


def principal_cosines_alternating(A, B, starts=20, iters=500, seed=0):
    """Principal-angle cosines from the variational definition.

    The k-th cosine is the maximum of ``u . v`` over unit ``u`` in span(A),
    ``v`` in span(B), each orthogonal to the previously chosen vectors.  Each
    maximization is done by alternating projections from several random
    starts (no SVD).
    """
    rng = np.random.default_rng(seed)
    A = np.linalg.qr(A)[0]
    B = np.linalg.qr(B)[0]
    if A.shape[1] > B.shape[1]:
        A, B = B, A
    us, vs, out = [], [], []
    for _ in range(A.shape[1]):
        best = (-1.0, None, None)
        for _ in range(starts):
            u = A @ rng.standard_normal(A.shape[1])
            for _ in range(iters):
                for w in us:
                    u = u - (w @ u) * w
                u /= np.linalg.norm(u)
                v = B @ (B.T @ u)
                for w in vs:
                    v = v - (w @ v) * w
                nv = np.linalg.norm(v)
                if nv < 1e-14:
                    break
                v /= nv
                u = A @ (A.T @ v)
            for w in us:
                u = u - (w @ u) * w
            u /= np.linalg.norm(u)
            v = B @ (B.T @ u)
            for w in vs:
                v = v - (w @ v) * w
            nv = np.linalg.norm(v)
            v = v / nv if nv > 0 else v
            val = float(u @ v)
            if val > best[0]:
                best = (val, u, v)
        out.append(max(best[0], 0.0))
        us.append(best[1])
        vs.append(best[2] if np.linalg.norm(best[2]) > 0 else best[1])
    return np.array(out)


def projector_distance(A, B):
    """``||P_A - P_B||_F / sqrt(2)`` from explicit projectors."""
    Qa, Qb = np.linalg.qr(A)[0], np.linalg.qr(B)[0]
    return np.linalg.norm(Qa @ Qa.T - Qb @ Qb.T) / np.sqrt(2.0)


def simulate_projected_affinity_sq(U1, U2, n, trials, seed):
    """Monte Carlo aff_Y^2 with numpy's Gaussian sampler and QR."""
    rng = np.random.default_rng(seed)
    N = U1.shape[0]
    out = np.empty(trials)
    for t in range(trials):
        Phi = rng.standard_normal((n, N)) / np.sqrt(n)
        V1 = np.linalg.qr(Phi @ U1)[0]
        V2 = np.linalg.qr(Phi @ U2)[0]
        out[t] = np.sum((V1.T @ V2) ** 2)
    return out
