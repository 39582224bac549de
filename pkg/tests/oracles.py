"""Independent reference computations used by the tests.

Everything here is deliberately written from scratch against the problem
definitions (grid searches, direct kron products, an external SLSQP
polish) so that it shares no code path with the library being tested.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize


def bloch_grid_lambda(amplitudes: np.ndarray, rounds: int = 9, points: int = 11) -> float:
    """Largest product-state overlap of a two-qubit pure state.

    Nested zoom over the four Bloch angles (theta, phi per qubit); each
    round shrinks the search box around the best grid point.  Phases on
    the second component only, which is fully general up to the global
    phase that the overlap modulus ignores.
    """
    psi = np.asarray(amplitudes, dtype=complex).reshape(2, 2)

    def overlap(t1, p1, t2, p2):
        a = np.array([np.cos(t1), np.sin(t1) * np.exp(1j * p1)])
        b = np.array([np.cos(t2), np.sin(t2) * np.exp(1j * p2)])
        return abs(a.conj() @ psi @ b.conj())

    centers = np.array([np.pi / 4, np.pi, np.pi / 4, np.pi])
    widths = np.array([np.pi / 2, 2 * np.pi, np.pi / 2, 2 * np.pi])
    best_val = -1.0
    for _ in range(rounds):
        axes = [np.linspace(c - w / 2, c + w / 2, points)
                for c, w in zip(centers, widths)]
        t1g, p1g, t2g, p2g = np.meshgrid(*axes, indexing="ij")
        a0 = np.cos(t1g)
        a1 = np.sin(t1g) * np.exp(1j * p1g)
        b0 = np.cos(t2g)
        b1 = np.sin(t2g) * np.exp(1j * p2g)
        vals = np.abs(
            a0.conj() * (psi[0, 0] * b0.conj() + psi[0, 1] * b1.conj())
            + a1.conj() * (psi[1, 0] * b0.conj() + psi[1, 1] * b1.conj())
        )
        flat = int(np.argmax(vals))
        idx = np.unravel_index(flat, vals.shape)
        best_val = float(vals[idx])
        centers = np.array([axes[d][idx[d]] for d in range(4)])
        widths = widths * (2.5 / points)
    return best_val


def symmetric_w_lambda(points: int = 2_000_001) -> float:
    """Best symmetric product overlap of the three-qubit W state.

    Over t in [0, 1] with each qubit in t|0> + sqrt(1-t^2)|1>, the overlap
    is sqrt(3) * t^2 * sqrt(1 - t^2); dense grid plus parabolic refinement.
    """
    t = np.linspace(0.0, 1.0, points)
    vals = np.sqrt(3.0) * t**2 * np.sqrt(np.clip(1.0 - t**2, 0.0, None))
    k = int(np.argmax(vals))
    lo, hi = max(k - 2, 0), min(k + 3, points - 1)
    tt = np.linspace(t[lo], t[hi], 100001)
    vv = np.sqrt(3.0) * tt**2 * np.sqrt(np.clip(1.0 - tt**2, 0.0, None))
    return float(np.max(vv))


def symmetric_ghz_lambda(points: int = 2_000_001) -> float:
    """Best symmetric product overlap of the three-qubit GHZ state."""
    t = np.linspace(0.0, 1.0, points)
    s = np.sqrt(np.clip(1.0 - t**2, 0.0, None))
    vals = (t**3 + s**3) / np.sqrt(2.0)
    return float(np.max(vals))


def schmidt_lambda(amplitudes: np.ndarray, dims) -> float:
    """Top singular value of the amplitude matrix (bipartite states)."""
    mat = np.asarray(amplitudes, dtype=complex).reshape(dims[0], dims[1])
    return float(np.linalg.svd(mat, compute_uv=False)[0])


# ---------------------------------------------------------------------------
# Published reference decomposition for the balanced two-component mixture
# at alpha = 0.5 (weight, then real parts factor-major, then imaginary
# parts factor-major; four decimal places as printed).
# ---------------------------------------------------------------------------

REFERENCE_ALPHA_HALF_ROWS = [
    [0.0414, 0.4495, 0.4497, 0.6749, 0.6747, 0.5458, 0.5457, 0.2113, 0.2114],
    [0.2163, 0.5211, 0.5210, 0.1227, 0.1227, 0.4780, 0.4781, 0.6963, 0.6964],
    [0.5000, 0.5572, -0.5572, -0.7061, 0.7061, -0.4353, 0.4353, 0.0369, -0.0369],
    [0.2423, 0.6908, 0.6909, 0.3020, 0.3020, 0.1506, 0.1508, 0.6393, 0.6395],
]


# ---------------------------------------------------------------------------
# Brute-force mixed-state maximization, independent of the library.
# ---------------------------------------------------------------------------

def _kron_rows(factor_arrays):
    """Batched kron: list of (B, N, d_i) -> (B, N, prod d)."""
    v = factor_arrays[0]
    for fi in factor_arrays[1:]:
        v = (v[..., :, None] * fi[..., None, :]).reshape(*v.shape[:-1], -1)
    return v


def brute_force_chi(
    rho: np.ndarray,
    dims,
    num_terms: int,
    samples: int = 100_000,
    seed: int = 0,
    polish_top: int = 6,
    batch: int = 2000,
):
    """Best objective over many random feasible ensembles, then polished.

    Sampling: random unit factors fill the slots beyond the eigen-based
    feasible states, weights are Dirichlet draws interpolated toward the
    feasible weights; the interpolation solving the norm constraint has a
    closed form because the constraint is quadratic with a known root at
    the feasible endpoint.  The top candidates are polished with SLSQP on
    the fully constrained problem (external solver, finite differences).

    Returns ``(best_value, diagnostics)``.
    """
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    m = len(dims)
    target = float(np.sum(np.abs(rho) ** 2))

    evals = np.linalg.eigvalsh(rho)[::-1]
    evals = np.clip(evals, 0.0, None)
    k_rank = int(np.sum(evals > 1e-12))
    p_fs = np.zeros(num_terms)
    p_fs[:k_rank] = evals[:k_rank] / evals[:k_rank].sum()
    fs_factors = []
    for i in range(m):
        rows = np.zeros((num_terms, dims[i]), dtype=complex)
        for k in range(num_terms):
            multi = np.unravel_index(k % n, dims)
            rows[k, multi[i]] = 1.0
        fs_factors.append(rows)

    top = []  # (objective, weights, factor list)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        done += b
        factors = []
        for i, d in enumerate(dims):
            block = np.broadcast_to(fs_factors[i], (b, num_terms, d)).copy()
            if k_rank < num_terms:
                z = rng.standard_normal((b, num_terms - k_rank, d)) \
                    + 1j * rng.standard_normal((b, num_terms - k_rank, d))
                z /= np.linalg.norm(z, axis=2)[:, :, None]
                block[:, k_rank:] = z
            factors.append(block)
        v = _kron_rows(factors)
        rv = v @ rho.T
        q = np.real(np.einsum("bkn,bkn->bk", v.conj(), rv))
        w = np.ones((b, num_terms, num_terms))
        for fi in factors:
            g = np.einsum("bkd,bld->bkl", fi.conj(), fi)
            w *= np.abs(g) ** 2
        u = rng.dirichlet(np.ones(num_terms), size=b)
        d_vec = p_fs[None, :] - u
        quad_a = np.einsum("bk,bkl,bl->b", d_vec, w, d_vec)
        quad_c = np.einsum("bk,bkl,bl->b", u, w, u)
        theta = np.ones(b)
        nz = np.abs(quad_a) > 1e-15
        t2 = np.where(nz, (quad_c - target) / np.where(nz, quad_a, 1.0), 1.0)
        take = nz & (t2 >= 0.0) & (t2 < 1.0)
        theta[take] = t2[take]
        p = (1.0 - theta[:, None]) * u + theta[:, None] * p_fs[None, :]
        obj = np.einsum("bk,bk->b", p, q)
        order = np.argsort(obj)[::-1][:polish_top]
        for j in order:
            top.append((float(obj[j]), p[j].copy(), [fi[j].copy() for fi in factors]))
        top.sort(key=lambda t: -t[0])
        top = top[:polish_top]

    best_sampled = top[0][0]
    best = best_sampled
    sizes = [num_terms * d for d in dims]

    def unpack(x):
        p = x[:num_terms]
        off = num_terms
        fs = []
        for d, size in zip(dims, sizes):
            re = x[off:off + size].reshape(num_terms, d)
            im = x[off + size:off + 2 * size].reshape(num_terms, d)
            fs.append(re + 1j * im)
            off += 2 * size
        return p, fs

    def pack(p, fs):
        parts = [p]
        for fi in fs:
            parts.append(fi.real.ravel())
            parts.append(fi.imag.ravel())
        return np.concatenate(parts)

    def evaluate(x):
        p, fs = unpack(x)
        v = _kron_rows([fi[None] for fi in fs])[0]
        q = np.real(np.einsum("kn,kn->k", v.conj(), v @ rho.T))
        w = np.ones((num_terms, num_terms))
        for fi in fs:
            w *= np.abs(fi.conj() @ fi.T) ** 2
        return p, fs, q, w

    def neg_obj(x):
        p, _, q, _ = evaluate(x)
        return -float(p @ q)

    def norm_con(x):
        p, _, _, w = evaluate(x)
        return float(p @ w @ p) - target

    constraints = [
        {"type": "eq", "fun": lambda x: float(np.sum(x[:num_terms]) - 1.0)},
        {"type": "eq", "fun": norm_con},
    ]
    for i in range(m):
        for k in range(num_terms):
            def unit(x, i=i, k=k):
                _, fs = unpack(x)
                return float(np.sum(np.abs(fs[i][k]) ** 2) - 1.0)
            constraints.append({"type": "eq", "fun": unit})
    bounds = [(0.0, 1.0)] * num_terms + [(None, None)] * (2 * sum(sizes))

    for obj0, p0, f0 in top:
        res = minimize(
            neg_obj, pack(p0, f0), method="SLSQP", bounds=bounds,
            constraints=constraints, options={"maxiter": 400, "ftol": 1e-14},
        )
        p1, f1 = unpack(res.x)
        _, _, q1, w1 = evaluate(res.x)
        feas = max(
            abs(float(np.sum(p1)) - 1.0),
            abs(float(p1 @ w1 @ p1) - target),
            max(abs(float(np.sum(np.abs(f1[i][k]) ** 2)) - 1.0)
                for i in range(m) for k in range(num_terms)),
            max(0.0, float(-p1.min())),
        )
        if feas < 1e-6:
            best = max(best, -float(res.fun))
    return best, {"sampled": best_sampled, "polished": best}
