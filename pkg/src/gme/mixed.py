"""Geometric measure of entanglement for mixed states.

The measure of a density matrix ``rho`` is its Frobenius distance to the
nearest disentangled state of the same Frobenius norm.  Expanding the
squared distance over the set of separable ensembles with at most
``N = n**2 + 1`` product terms turns the problem into a maximization:

    maximize   sum_k p_k <Phi_k| rho |Phi_k>
    over       unit factors phi_i^(k),  weights p on the simplex,
    subject to sum_{r,s} p_r p_s prod_i |<phi_i^r|phi_i^s>|^2 = ||rho||_F^2.

The optimal value ``chi`` (the mixed-state entanglement eigenvalue)
satisfies ``E^2 / 2 = ||rho||_F^2 - chi`` and the maximizing ensemble is
the nearest disentangled state.  This module solves the maximization with
a multi-start projected-gradient augmented-Lagrangian method followed by
an exact block-coordinate polish, recovers the Lagrange multipliers of the
full first-order optimality system, and reports the system's worst
residual as a certificate of local optimality.

Multiplier conventions (matching the stationarity system checked by
:func:`kkt_residual`): ``lam`` pairs with the norm constraint, ``kappa``
with the weight sum, ``mu_k`` with the unit-norm constraints of term k's
factors (equal across factors at a solution), and ``tau_k >= 0`` with the
bound ``p_k >= 0``.  At any solution ``kappa = sum_k mu_k`` and
``chi = lam * ||rho||_F^2 + kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .optim import project_simplex
from .states import (
    DensityMatrix,
    ProductState,
    SeparableEnsemble,
    ShapeMismatchError,
    SpaceShape,
    basis_product_state,
    frobenius_norm_squared,
)

# Eigenvalues below this count as zero when ranking a density matrix.
EIG_CUTOFF = 1e-12
# Hard ceiling on one start's total ascent iterations, in units of the
# per-stage cap, so a non-certifying start cannot hog the whole solve.
# Kept deliberately tight: the block-coordinate polish finishes ravine
# endgames far more efficiently than continued gradient ascent.
TOTAL_BUDGET_STAGES = 3
# Ensemble weights below this are reported as exactly zero.
WEIGHT_SNAP = 1e-10
# Relative singular-value cutoff declaring the (lam, kappa) fit degenerate.
RANK_TOL = 1e-6
# Tie margin between multi-start candidates.
TIE_TOL = 1e-12
# Sufficient-increase constant and smallest step of the backtracking search.
ARMIJO = 1e-4
MIN_STEP = 1e-14


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for :func:`solve`.

    ``num_terms=None`` means the dimension-based default ``n**2 + 1``.
    ``feas_tol`` bounds the norm-constraint violation of a reported
    ensemble; ``stat_tol`` is the projected-gradient stationarity target of
    the inner ascent; ``cert_tol`` is the optimality-residual level below
    which a candidate counts as certified.  ``max_inner`` caps the ascent
    iterations of one multiplier stage (of which there are at most
    ``max_outer``, within an overall per-start budget of
    ``TOTAL_BUDGET_STAGES * max_inner`` iterations).
    """

    starts: int = 30
    num_terms: int | None = None
    seed: int = 0
    feas_tol: float = 1e-8
    stat_tol: float = 1e-7
    max_outer: int = 100
    max_inner: int = 2000
    penalty_init: float = 1.0
    penalty_growth: float = 10.0
    act_tol: float = 1e-8
    cert_tol: float = 1e-5

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError(f"starts must be >= 1, got {self.starts}")
        if self.num_terms is not None and self.num_terms < 1:
            raise ValueError(f"num_terms must be >= 1, got {self.num_terms}")
        for name in ("feas_tol", "stat_tol", "penalty_init", "penalty_growth",
                     "act_tol", "cert_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("max_outer and max_inner must be >= 1")


@dataclass(frozen=True)
class MixedProblem:
    """A target density matrix plus the ensemble size to optimize over."""

    rho: DensityMatrix
    num_terms: int | None = None
    norm_sq_target: float | None = None

    def __post_init__(self):
        bound = self.rho.shape.caratheodory_bound
        terms = bound if self.num_terms is None else int(self.num_terms)
        if not 1 <= terms <= bound:
            raise ValueError(
                f"num_terms must be in [1, {bound}] for this space, got {terms}"
            )
        norm_sq = frobenius_norm_squared(self.rho)
        if self.norm_sq_target is not None:
            if abs(self.norm_sq_target - norm_sq) > 1e-12:
                raise ValueError(
                    f"norm_sq_target {self.norm_sq_target!r} does not match "
                    f"the matrix norm {norm_sq!r}"
                )
            norm_sq = float(self.norm_sq_target)
        object.__setattr__(self, "num_terms", terms)
        object.__setattr__(self, "norm_sq_target", norm_sq)


@dataclass(frozen=True)
class KktMultipliers:
    """Multipliers of the optimality system at a candidate ensemble.

    ``kappa == sum(mu)`` holds by construction of the recovery and is
    validated here; ``tau`` entries are nonnegative up to roundoff.
    """

    lam: float
    kappa: float
    mu: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).copy()
        tau = np.asarray(self.tau, dtype=float).copy()
        if mu.shape != tau.shape or mu.ndim != 1:
            raise ValueError("mu and tau must be 1-d arrays of equal length")
        if tau.min(initial=0.0) < -1e-8:
            raise ValueError(f"tau must be nonnegative, min is {tau.min()!r}")
        if abs(self.kappa - mu.sum()) > 1e-8:
            raise ValueError(
                f"kappa must equal sum(mu): {self.kappa!r} vs {mu.sum()!r}"
            )
        mu.flags.writeable = False
        tau.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class MeasureResult:
    """Outcome of :func:`solve`.

    ``chi`` is the best objective value found, ``measure_sq_half`` equals
    ``norm_sq_target - chi`` (half the squared distance to the reported
    ensemble), and ``converged`` means the ensemble is feasible within
    tolerance and its optimality residual passed the certificate gate.
    """

    chi: float
    measure_sq_half: float
    ensemble: SeparableEnsemble
    multipliers: KktMultipliers
    kkt_residual: float
    starts_used: int
    converged: bool

    @property
    def measure(self) -> float:
        """The distance ``E = sqrt(2 * measure_sq_half)``."""
        return float(np.sqrt(max(0.0, 2.0 * self.measure_sq_half)))


class ConstraintResiduals(NamedTuple):
    """Signed feasibility gaps of an ensemble against a target matrix."""

    norm_gap: float
    simplex_gap: float
    unit_gaps: np.ndarray  # shape (N, m): squared-norm excess per factor

    @property
    def max_violation(self) -> float:
        return max(
            abs(self.norm_gap),
            abs(self.simplex_gap),
            float(np.max(np.abs(self.unit_gaps))),
        )


# ---------------------------------------------------------------------------
# Raw-array evaluation.  ``weights`` is a length-N float vector and
# ``factors`` a list with one (N, d_i) complex array per subsystem; nothing
# here assumes feasibility, so these functions are also the surface for
# finite-difference gradient checks on arbitrary points.
# ---------------------------------------------------------------------------

def product_vectors(factors) -> np.ndarray:
    """Rows ``V[k] = kron(factors[0][k], ..., factors[m-1][k])``."""
    v = np.asarray(factors[0], dtype=complex)
    for fi in factors[1:]:
        v = (v[:, :, None] * np.asarray(fi, dtype=complex)[:, None, :]).reshape(
            v.shape[0], -1
        )
    return v


def _grams(factors):
    return [np.asarray(fi).conj() @ np.asarray(fi).T for fi in factors]


def _overlap_sq(grams) -> np.ndarray:
    out = np.abs(grams[0]) ** 2
    for g in grams[1:]:
        out = out * np.abs(g) ** 2
    return out


class _Eval(NamedTuple):
    v: np.ndarray          # (N, n) product vectors
    rv: np.ndarray         # (N, n) rows rho @ v_k
    q: np.ndarray          # (N,) expectations <Phi_k|rho|Phi_k>
    grams: list            # per-subsystem Gram matrices
    absq: list             # per-subsystem |Gram|^2
    w: np.ndarray          # (N, N) pairwise product-overlap squared
    s: np.ndarray          # (N,) w @ p


def _evaluate(rho: np.ndarray, weights: np.ndarray, factors) -> _Eval:
    v = product_vectors(factors)
    rv = v @ rho.T  # row k equals rho @ v_k
    q = np.real(np.einsum("kj,kj->k", v.conj(), rv))
    grams = _grams(factors)
    absq = [np.abs(g) ** 2 for g in grams]
    w = absq[0].copy()
    for a in absq[1:]:
        w *= a
    s = w @ weights
    return _Eval(v, rv, q, grams, absq, w, s)


def objective_arrays(rho: np.ndarray, weights: np.ndarray, factors) -> float:
    """``sum_k p_k <Phi_k|rho|Phi_k>`` on raw arrays."""
    ev = _evaluate(np.asarray(rho, dtype=complex), np.asarray(weights, float), factors)
    return float(np.asarray(weights, float) @ ev.q)


def norm_squared_arrays(weights, factors) -> float:
    """``sum_{r,s} p_r p_s prod_i |<phi_i^r|phi_i^s>|^2`` on raw arrays."""
    p = np.asarray(weights, dtype=float)
    w = _overlap_sq(_grams(factors))
    return float(p @ w @ p)


def _batch_contract_except(tensor: np.ndarray, factors, skip: int) -> np.ndarray:
    """Per-term contraction of all conjugated factors but ``skip``.

    ``tensor`` has shape ``(N, d_1, ..., d_m)``; the leading axis indexes
    ensemble terms.  Contracting in descending subsystem order keeps axis
    positions stable.
    """
    out = tensor
    m = len(factors)
    for j in sorted((j for j in range(m) if j != skip), reverse=True):
        sub_in = [0, *range(1, out.ndim)]
        sub_out = [0, *(a for a in range(1, out.ndim) if a != j + 1)]
        out = np.einsum(out, sub_in, np.asarray(factors[j]).conj(), [0, j + 1], sub_out)
    return out


def _partial_overlap_sq(absq, skip: int) -> np.ndarray:
    """``prod_{j != skip} |<phi_j^r|phi_j^s>|^2``."""
    out = None
    for j, a in enumerate(absq):
        if j == skip:
            continue
        out = a.copy() if out is None else out * a
    if out is None:  # single subsystem never happens (m >= 2) but stay safe
        out = np.ones_like(absq[0])
    return out


def objective_gradients(rho: np.ndarray, weights, factors):
    """Gradient of :func:`objective_arrays` in real parameters.

    Returns ``(grad_weights, grad_factors)`` where each factor gradient is
    complex-packed: its real part is the derivative with respect to the
    factor's real part and its imaginary part the derivative with respect
    to the imaginary part.
    """
    rho = np.asarray(rho, dtype=complex)
    p = np.asarray(weights, dtype=float)
    dims = [np.asarray(fi).shape[1] for fi in factors]
    ev = _evaluate(rho, p, factors)
    tensor = ev.rv.reshape(p.size, *dims)
    grad_factors = []
    for i in range(len(factors)):
        c = _batch_contract_except(tensor, factors, i)
        grad_factors.append(2.0 * p[:, None] * c)
    return ev.q.copy(), grad_factors


def norm_squared_gradients(weights, factors):
    """Gradient of :func:`norm_squared_arrays`, packed like
    :func:`objective_gradients`."""
    p = np.asarray(weights, dtype=float)
    grams = _grams(factors)
    absq = [np.abs(g) ** 2 for g in grams]
    w = absq[0].copy()
    for a in absq[1:]:
        w *= a
    grad_p = 2.0 * (w @ p)
    grad_factors = []
    for i, fi in enumerate(factors):
        part = _partial_overlap_sq(absq, i)
        mix = (part * grams[i].conj() * p[None, :]) @ np.asarray(fi, dtype=complex)
        grad_factors.append(4.0 * p[:, None] * mix)
    return grad_p, grad_factors


def pack_parameters(weights, factors) -> np.ndarray:
    """Flatten (weights, factors) into one real vector for derivative checks."""
    parts = [np.asarray(weights, dtype=float).ravel()]
    for fi in factors:
        fi = np.asarray(fi, dtype=complex)
        parts.append(fi.real.ravel())
        parts.append(fi.imag.ravel())
    return np.concatenate(parts)


def unpack_parameters(x: np.ndarray, num_terms: int, dims):
    """Inverse of :func:`pack_parameters`."""
    x = np.asarray(x, dtype=float)
    p = x[:num_terms].copy()
    offset = num_terms
    factors = []
    for d in dims:
        size = num_terms * d
        re = x[offset:offset + size].reshape(num_terms, d)
        im = x[offset + size:offset + 2 * size].reshape(num_terms, d)
        factors.append(re + 1j * im)
        offset += 2 * size
    return p, factors


# ---------------------------------------------------------------------------
# Public operations on validated objects.
# ---------------------------------------------------------------------------

def _stacked(e: SeparableEnsemble):
    return np.array(e.weights), [e.factor_matrix(i) for i in range(e.shape.num_factors)]


def _check_shapes(rho: DensityMatrix, e: SeparableEnsemble):
    if rho.shape.dims != e.shape.dims:
        raise ShapeMismatchError(rho.shape.dims, e.shape.dims)


def objective(rho: DensityMatrix, e: SeparableEnsemble) -> float:
    """Ensemble-averaged expectation ``sum_k p_k <Phi_k|rho|Phi_k>``."""
    _check_shapes(rho, e)
    p, factors = _stacked(e)
    return objective_arrays(rho.entries, p, factors)


def constraint_residuals(rho: DensityMatrix, e: SeparableEnsemble) -> ConstraintResiduals:
    """Signed feasibility gaps of ``e`` for the maximization over ``S(rho)``."""
    _check_shapes(rho, e)
    p, factors = _stacked(e)
    return constraint_residuals_arrays(
        frobenius_norm_squared(rho), p, factors
    )


def constraint_residuals_arrays(norm_sq_target: float, weights, factors) -> ConstraintResiduals:
    """Like :func:`constraint_residuals` but on raw, possibly infeasible arrays."""
    p = np.asarray(weights, dtype=float)
    norm_gap = norm_squared_arrays(p, factors) - float(norm_sq_target)
    simplex_gap = float(p.sum()) - 1.0
    unit = np.column_stack(
        [np.sum(np.abs(np.asarray(fi)) ** 2, axis=1) - 1.0 for fi in factors]
    )
    return ConstraintResiduals(float(norm_gap), simplex_gap, unit)


def feasible_start(rho: DensityMatrix, num_terms: int) -> SeparableEnsemble:
    """A feasible ensemble built from the eigenvalues of ``rho``.

    Places the nonzero eigenvalues (as weights) on mutually orthogonal
    computational-basis product states, so the pairwise overlaps vanish and
    the ensemble's squared norm is exactly ``sum_k alpha_k^2 = ||rho||_F^2``.
    Remaining slots get zero weight on further basis states.
    """
    evals = np.linalg.eigvalsh(rho.entries)[::-1]
    k_active = int(np.sum(evals > EIG_CUTOFF))
    if num_terms < k_active:
        raise ValueError(
            f"num_terms={num_terms} is below the matrix rank {k_active}"
        )
    weights = np.zeros(num_terms)
    weights[:k_active] = np.clip(evals[:k_active], 0.0, None)
    weights /= weights.sum()
    states = tuple(basis_product_state(rho.shape, k) for k in range(num_terms))
    return SeparableEnsemble(rho.shape, weights, states)


def recover_multipliers(
    rho: DensityMatrix,
    e: SeparableEnsemble,
    fit: str = "best",
    act_tol: float = 1e-8,
) -> KktMultipliers:
    """Recover ``(lam, kappa, mu, tau)`` at a candidate ensemble.

    ``lam`` and ``kappa`` are fit by least squares to the scalar optimality
    rows of the active terms (``p_k > act_tol``), where ``tau_k = 0``.  Then
    ``mu_k = p_k (q_k - lam * s_k)``, ``kappa`` is re-expressed as
    ``sum(mu)`` (an identity at exact solutions), and the inactive
    ``tau_k = lam * s_k + kappa - q_k`` are clipped at zero.

    With ``fit="best"`` (default) a degenerate active system (single
    active term, or numerically repeated rows) is additionally resolved
    along its null direction so the inactive ``tau`` come out nonnegative,
    and the candidate with the smaller optimality residual is returned.
    ``fit="min-norm"`` keeps the plain minimum-norm least-squares solution.
    """
    if fit not in ("best", "min-norm"):
        raise ValueError(f"unknown fit mode {fit!r}")
    _check_shapes(rho, e)
    p, factors = _stacked(e)
    lam, kappa, mu, tau, _ = _recover_core(
        np.asarray(rho.entries),
        frobenius_norm_squared(rho),
        p,
        factors,
        act_tol,
        resolve_degenerate=(fit == "best"),
    )
    return KktMultipliers(lam, kappa, mu, tau)


def _recover_core(rho_mat, target, p, factors, act_tol, resolve_degenerate=True):
    """Multiplier recovery on raw arrays; returns (lam, kappa, mu, tau, residual)."""
    ev = _evaluate(rho_mat, p, factors)
    active = p > act_tol
    if not np.any(active):
        raise ValueError("ensemble has no active weights above act_tol")
    pairs = _fit_lam_kappa(ev.s, ev.q, active, resolve_degenerate)
    parts = _stationarity_parts(p, factors, ev)
    if resolve_degenerate:
        # The scalar rows can be arbitrarily ill-conditioned (e.g. repeated
        # active terms), while the factor stationarity rows always pin lam
        # down linearly; offer that estimate as a further candidate.
        lam_stat = _stationarity_lam(p, factors, ev, parts)
        if lam_stat is not None:
            pairs.append((lam_stat, 0.0))
    best = None
    for lam, _kappa in pairs:
        mu = p * (ev.q - lam * ev.s)
        kappa = float(mu.sum())
        tau = np.where(active, 0.0, np.maximum(0.0, lam * ev.s + kappa - ev.q))
        res = _kkt_core(rho_mat, target, p, factors, lam, kappa, mu, tau, ev, parts)
        if best is None or res < best[-1]:
            best = (float(lam), kappa, mu, tau, res)
    return best


def _stationarity_parts(p, factors, ev):
    """Per-subsystem contraction and overlap-mix rows of the stationarity
    equations, reusable across candidate multiplier sets."""
    n_terms = p.size
    dims = [fi.shape[1] for fi in factors]
    tensor = ev.rv.reshape(n_terms, *dims)
    contractions = []
    mixes = []
    for i in range(len(factors)):
        contractions.append(_batch_contract_except(tensor, factors, i))
        part = _partial_overlap_sq(ev.absq, i)
        mixes.append((part * ev.grams[i].conj() * p[None, :]) @ factors[i])
    return contractions, mixes


def _stationarity_lam(p, factors, ev, parts):
    """Least-squares lam from the factor stationarity rows.

    Substituting ``mu_k = p_k (q_k - lam s_k)`` into the stationarity rows
    leaves them linear in lam; the minimizer has a closed form.
    """
    contractions, mixes = parts
    num = 0.0
    den = 0.0
    for fi, c_i, m_i in zip(factors, contractions, mixes):
        a = p[:, None] * (c_i - ev.q[:, None] * fi)
        b = p[:, None] * (m_i - ev.s[:, None] * fi)
        num += float(np.real(np.sum(b.conj() * a)))
        den += float(np.real(np.sum(b.conj() * b)))
    if den <= 1e-30:
        return None
    return num / den


def _fit_lam_kappa(s, q, active, resolve_degenerate: bool):
    """Candidate (lam, kappa) fits of the active scalar rows."""
    sa, qa = s[active], q[active]
    a_mat = np.column_stack([sa, np.ones_like(sa)])
    plain, *_ = np.linalg.lstsq(a_mat, qa, rcond=None)
    pairs = [tuple(plain)]
    if not resolve_degenerate:
        return pairs
    u, sv, vt = np.linalg.svd(a_mat)  # full matrices: need the null row of vt
    rank = int(np.sum(sv > RANK_TOL * sv[0]))
    if rank < 2:
        base = np.zeros(2)
        for j in range(rank):
            base += vt[j] * float(u[:, j] @ qa) / sv[j]
        null = vt[rank]
        t = _null_direction_step(base, null, s[~active], q[~active])
        adjusted = base + t * null
        if np.max(np.abs(adjusted - plain)) > 0:
            pairs.append(tuple(adjusted))
    return pairs


def _null_direction_step(base, null, s_inactive, q_inactive) -> float:
    """Move along the fit's null direction to make inactive ``tau`` feasible.

    Inactive rows give affine functions ``tau_k(t) = a_k + t b_k``.  If the
    set ``{t : tau_k(t) >= 0 for all k}`` is a nonempty interval, return
    its point closest to the minimum-norm solution; otherwise minimize the
    squared violation, a convex piecewise quadratic, exactly.
    """
    if s_inactive.size == 0:
        return float(-(base @ null))
    a = s_inactive * base[0] + base[1] - q_inactive
    b = s_inactive * null[0] + null[1]
    lo, hi = -np.inf, np.inf
    feasible = True
    for ak, bk in zip(a, b):
        if bk > 1e-14:
            lo = max(lo, -ak / bk)
        elif bk < -1e-14:
            hi = min(hi, -ak / bk)
        elif ak < -1e-12:
            feasible = False
    if feasible and lo <= hi:
        return float(np.clip(-(base @ null), lo, hi))

    # No fully feasible t: minimize sum_k min(0, a_k + t b_k)^2 piece by piece.
    slopes = np.abs(b) > 1e-14
    if not np.any(slopes):
        return float(-(base @ null))
    points = np.sort(-a[slopes] / b[slopes])
    edges = np.concatenate([[points[0] - 1.0], points, [points[-1] + 1.0]])
    best_t, best_val = 0.0, np.inf
    for left, right in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (left + right)
        viol = a + mid * b < 0
        if not np.any(viol):
            cand = mid
        else:
            denom = float(b[viol] @ b[viol])
            cand = mid if denom == 0 else float(-(a[viol] @ b[viol]) / denom)
            cand = float(np.clip(cand, left, right))
        val = float(np.sum(np.minimum(0.0, a + cand * b) ** 2))
        if val < best_val:
            best_t, best_val = cand, val
    return best_t


def kkt_residual(rho: DensityMatrix, e: SeparableEnsemble, mult: KktMultipliers) -> float:
    """Worst violation of the full first-order optimality system.

    Includes the factor stationarity rows (bra and ket forms are complex
    conjugates, so one norm covers both), the scalar rows in the weights,
    complementarity and sign conditions on ``tau`` and ``p``, and all
    feasibility gaps; returns the maximum over everything.
    """
    _check_shapes(rho, e)
    p, factors = _stacked(e)
    if mult.mu.size != p.size:
        raise ValueError(
            f"multipliers sized for {mult.mu.size} terms, ensemble has {p.size}"
        )
    return _kkt_core(
        np.asarray(rho.entries),
        frobenius_norm_squared(rho),
        p,
        factors,
        mult.lam,
        mult.kappa,
        mult.mu,
        mult.tau,
    )


def kkt_residual_blocks(rho: DensityMatrix, e: SeparableEnsemble,
                        mult: KktMultipliers) -> dict:
    """Named residuals of each block of the optimality system.

    Keys: ``stationarity`` (worst factor-equation row norm), ``scalar``
    (worst weight equation), ``complementarity``, ``sign`` (negativity of
    tau or the weights), ``norm_gap``, ``simplex_gap``, ``unit_norm``.
    """
    _check_shapes(rho, e)
    p, factors = _stacked(e)
    return _kkt_blocks_core(
        np.asarray(rho.entries), frobenius_norm_squared(rho), p, factors,
        mult.lam, mult.kappa, mult.mu, mult.tau,
    )


def _kkt_blocks_core(rho_mat, target, p, factors, lam, kappa, mu, tau,
                     ev=None, parts=None) -> dict:
    if ev is None:
        ev = _evaluate(rho_mat, p, factors)
    if parts is None:
        parts = _stationarity_parts(p, factors, ev)
    contractions, mixes = parts

    stationarity = 0.0
    for fi, c_i, mix in zip(factors, contractions, mixes):
        rows = p[:, None] * c_i - mu[:, None] * fi - lam * p[:, None] * mix
        stationarity = max(stationarity, float(np.max(np.linalg.norm(rows, axis=1))))

    return {
        "stationarity": stationarity,
        "scalar": float(np.max(np.abs(ev.q - lam * ev.s - kappa + tau))),
        "complementarity": float(np.max(np.abs(tau * p))),
        "sign": max(0.0, float(-np.min(tau)), float(-np.min(p))),
        "norm_gap": abs(float(p @ ev.s) - target),
        "simplex_gap": abs(float(p.sum()) - 1.0),
        "unit_norm": max(
            float(np.max(np.abs(np.sum(np.abs(fi) ** 2, axis=1) - 1.0)))
            for fi in factors
        ),
    }


def _kkt_core(rho_mat, target, p, factors, lam, kappa, mu, tau,
              ev=None, parts=None) -> float:
    blocks = _kkt_blocks_core(rho_mat, target, p, factors, lam, kappa, mu, tau,
                              ev, parts)
    return max(blocks.values())


# ---------------------------------------------------------------------------
# The augmented-Lagrangian solver.
# ---------------------------------------------------------------------------

class _AlState(NamedTuple):
    weights: np.ndarray
    factors: list


def _project(weights, factors, previous_factors):
    p = project_simplex(weights)
    out = []
    for fi, old in zip(factors, previous_factors):
        norms = np.sqrt(np.einsum("kd,kd->k", fi.real, fi.real)
                        + np.einsum("kd,kd->k", fi.imag, fi.imag))
        if norms.min() < 1e-12:  # zero row: keep the previous unit factor
            bad = norms < 1e-12
            fi = fi.copy()
            fi[bad] = old[bad]
            norms = np.linalg.norm(fi, axis=1)
        out.append(fi / norms[:, None])
    return p, out


def _distance_sq(p_a, f_a, p_b, f_b) -> float:
    d = p_a - p_b
    total = float(d @ d)
    for fa, fb in zip(f_a, f_b):
        z = (fa - fb).ravel()
        total += float(np.real(np.vdot(z, z)))
    return total


class _Inner:
    """Projected-gradient ascent on the augmented Lagrangian.

    Maximizes ``f - lam_hat * g - (c/2) * g**2`` where ``g`` is the signed
    norm-constraint violation, with weights projected onto the simplex and
    factors renormalized after every trial step.  Step sizes start from a
    Barzilai-Borwein estimate and backtrack until a sufficient-increase
    condition holds.
    """

    def __init__(self, rho, dims, target):
        self.rho = rho
        self.dims = dims
        self.target = target

    def value(self, p, factors, lam_hat, c):
        ev = _evaluate(self.rho, p, factors)
        g = float(p @ ev.s) - self.target
        val = float(p @ ev.q) - lam_hat * g - 0.5 * c * g * g
        return val, g, ev

    def gradient(self, p, factors, ev, g, lam_hat, c):
        coef = lam_hat + c * g
        grad_p = ev.q - 2.0 * coef * ev.s
        tensor = ev.rv.reshape(p.size, *self.dims)
        grad_f = []
        for i, fi in enumerate(factors):
            c_i = _batch_contract_except(tensor, factors, i)
            part = _partial_overlap_sq(ev.absq, i)
            mix = (part * ev.grams[i].conj() * p[None, :]) @ fi
            grad_f.append(2.0 * p[:, None] * c_i - 4.0 * coef * p[:, None] * mix)
        return grad_p, grad_f

    def ascend(self, p, factors, lam_hat, c, omega, max_inner, eta,
               certify=None, feas_tol=np.inf):
        val, g, ev = self.value(p, factors, lam_hat, c)
        prev_step = None
        prev_grad = None
        gm = np.inf
        stalled = False
        certified = False
        iters_done = 0
        eta = float(np.clip(eta, 1e-8, 1e6))
        recent = [val]  # nonmonotone line-search reference window
        last_move = np.inf
        for it in range(max_inner):
            grad_p, grad_f = self.gradient(p, factors, ev, g, lam_hat, c)

            # Stationarity: displacement of a unit-step projected point.
            # Skip the extra projection while steps are still large, since
            # the last accepted move bounds how stationary the point can be.
            gm = np.inf
            if it == 0 or last_move <= 10.0 * omega * max(1.0, eta):
                ref_p, ref_f = _project(
                    p + grad_p, [fi + gi for fi, gi in zip(factors, grad_f)], factors
                )
                gm = np.sqrt(_distance_sq(p, factors, ref_p, ref_f))
                if gm <= omega:
                    break
            # Certificate checks start only after some genuine ascent: a
            # barely perturbed start can sit at a first-order point (a
            # saddle of the problem) that certifies but should be escaped.
            if certify is not None and abs(g) <= feas_tol \
                    and it >= 25 and it % 25 == 0:
                if certify(p, factors):
                    certified = True
                    break

            if prev_step is not None and prev_grad is not None:
                ss = _step_norm_sq(prev_step)
                sy = _inner_product(prev_step, prev_grad, grad_p, grad_f)
                eta = ss / -sy if sy < -1e-18 else eta * 2.0
            eta = float(np.clip(eta, 1e-10, 1e6))

            ref_val = max(recent)
            accepted = False
            while eta >= MIN_STEP:
                trial_p, trial_f = _project(
                    p + eta * grad_p,
                    [fi + eta * gi for fi, gi in zip(factors, grad_f)],
                    factors,
                )
                trial_val, trial_g, trial_ev = self.value(trial_p, trial_f, lam_hat, c)
                move = _distance_sq(trial_p, trial_f, p, factors)
                if trial_val >= ref_val + ARMIJO * move / eta:
                    accepted = True
                    break
                eta *= 0.5
            if not accepted:
                # Improvements fell below floating-point resolution; the
                # optimality certificate decides how good this point is.
                stalled = True
                ref_p, ref_f = _project(
                    p + grad_p, [fi + gi for fi, gi in zip(factors, grad_f)], factors
                )
                gm = np.sqrt(_distance_sq(p, factors, ref_p, ref_f))
                break

            prev_step = (trial_p - p, [tf - fi for tf, fi in zip(trial_f, factors)])
            prev_grad = (grad_p, grad_f)
            p, factors, val, g, ev = trial_p, trial_f, trial_val, trial_g, trial_ev
            last_move = np.sqrt(move)
            recent.append(val)
            if len(recent) > 10:
                recent.pop(0)
            iters_done = it + 1
        return p, factors, g, gm, eta, stalled, certified, iters_done


def _step_norm_sq(step) -> float:
    dp, df = step
    total = float(dp @ dp)
    for d in df:
        total += float(np.sum(np.abs(d) ** 2))
    return total


def _inner_product(step, grad_old, grad_p_new, grad_f_new) -> float:
    """Real inner product of a step with the gradient change (ascent BB)."""
    dp, df = step
    gp_old, gf_old = grad_old
    out = float(dp @ (grad_p_new - gp_old))
    for d, g_new, g_old in zip(df, grad_f_new, gf_old):
        out += float(np.real(np.sum(d.conj() * (g_new - g_old))))
    return out


def _augmented_lagrangian(rho, dims, target, p0, factors0, cfg: SolverConfig):
    inner = _Inner(rho, dims, target)
    p, factors = p0, [np.array(f) for f in factors0]
    lam_hat, c = 0.0, cfg.penalty_init
    omega = max(cfg.stat_tol, 1e-3)
    eta = 1.0
    # Feasibility-restored starts have a near-zero initial gap, which says
    # nothing about the gap the ascent will open up; referencing progress
    # against a problem-scale floor keeps the penalty from exploding early.
    gap_ref = max(abs(norm_squared_arrays(p, factors) - target), 0.1)
    def certify(pc, fc):
        # Early acceptance when the recovered multipliers already place the
        # optimality residual comfortably below the reporting gate.
        try:
            *_, res = _recover_core(rho, target, pc, fc, cfg.act_tol)
        except ValueError:
            return False
        return res <= 0.5 * cfg.cert_tol

    converged = False
    stall_streak = 0
    budget = TOTAL_BUDGET_STAGES * cfg.max_inner
    prev_obj = -np.inf
    for _ in range(cfg.max_outer):
        if budget <= 0:
            break
        p, factors, g, gm, eta, stalled, certified, iters = inner.ascend(
            p, factors, lam_hat, c, omega, min(cfg.max_inner, budget), eta,
            certify=certify, feas_tol=cfg.feas_tol,
        )
        budget -= max(iters, 1)
        if certified:
            converged = True
            break
        obj = float(p @ _evaluate(rho, p, factors).q)
        if iters >= cfg.max_inner and abs(g) <= 1e-6 \
                and abs(obj - prev_obj) <= 1e-9:
            # A full stage moved the objective by less than the certificate
            # scale: gradient ascent has plateaued, let the block polish
            # finish the endgame.
            break
        prev_obj = obj
        if abs(g) <= cfg.feas_tol:
            if gm <= cfg.stat_tol or (iters >= 25 and certify(p, factors)):
                converged = True
                break
        elif abs(g) <= 1e-4 and iters >= 25:
            # Nearly feasible and nearly stationary: the residual norm gap
            # is often the only thing between here and a certificate.  The
            # constraint is exactly quadratic in the weights, so feasibility
            # can be restored in weight space at negligible cost.
            polished = _polish_weights(p, factors, target, cfg.feas_tol)
            if polished is not None and certify(polished, factors):
                p = polished
                converged = True
                break
        if stalled:
            stall_streak += 1
            # A stalled feasible point cannot improve further; an infeasible
            # one gets a couple of penalty bumps before giving up.
            if abs(g) <= cfg.feas_tol or stall_streak >= 3:
                break
        else:
            stall_streak = 0
        if abs(g) <= max(cfg.feas_tol, 0.25 * gap_ref):
            lam_hat += c * g
            gap_ref = max(abs(g), cfg.feas_tol)
        else:
            c = min(c * cfg.penalty_growth, 1e12)
        omega = max(cfg.stat_tol, 0.25 * omega)
    return p, factors, converged


def _polish_weights(p, factors, target, tol):
    """Restore the norm constraint by adjusting weights only.

    With the product states held fixed the constraint value is an exact
    quadratic in the weights, so a bracketed bisection along the (signed)
    constraint gradient, re-projected onto the simplex, reaches machine
    feasibility in a few dozen cheap evaluations.  Returns the corrected
    weights, or None when no bracket exists along this direction.
    """
    w = _overlap_sq(_grams(factors))

    def gap(x):
        return float(x @ w @ x) - target

    g0 = gap(p)
    if abs(g0) <= tol:
        return p
    direction = -np.sign(g0) * 2.0 * (w @ p)

    def point(mu):
        return project_simplex(p + mu * direction)

    denom = float(direction @ (2.0 * (w @ p)))
    scale = abs(g0) / max(abs(denom), 1e-30)
    hi = scale
    g_hi = gap(point(hi))
    expansions = 0
    while np.sign(g_hi) == np.sign(g0):
        hi *= 2.0
        g_hi = gap(point(hi))
        expansions += 1
        if expansions > 60:
            return None
    lo, g_lo = 0.0, g0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = gap(point(mid))
        if abs(g_mid) <= min(tol, 1e-12):
            return point(mid)
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    out = point(0.5 * (lo + hi))
    return out if abs(gap(out)) <= tol else None


def _block_polish(rho_mat, dims, target, p, factors, act_tol, cert_tol,
                  rounds=200):
    """Endgame refinement by exact block updates at the recovered multiplier.

    Near a solution the ascent can crawl along ill-conditioned factor
    directions.  With every other variable fixed, each factor maximizes a
    Hermitian quadratic form on its sphere (the multiplier-form Lagrangian
    restricted to one block), so the exact update is the top eigenvector of
    a small matrix.  Rounds alternate factor sweeps, a few weight ascent
    steps, weight-space feasibility restoration, and a multiplier re-fit.

    Returns up to two ``(weights, factors)`` points: the feasible point
    with the best objective seen, and the point with the best optimality
    residual (when distinct).  The caller turns both into candidates.
    """
    p = p.copy()
    factors = [fi.copy() for fi in factors]
    n_terms = p.size
    m = len(factors)
    rho_tensor = rho_mat.reshape(*dims, *dims)
    best_res = None   # (residual, point)
    best_obj = None   # (objective, point)
    since_improvement = 0

    for _ in range(rounds):
        try:
            lam, kappa, mu, tau, res = _recover_core(
                rho_mat, target, p, factors, act_tol
            )
        except ValueError:
            break
        obj = objective_arrays(rho_mat, p, factors)
        gap = abs(norm_squared_arrays(p, factors) - target)
        improved = False
        if best_res is None or res < best_res[0]:
            improved = best_res is None or res < 0.99 * best_res[0]
            best_res = (res, p.copy(), [fi.copy() for fi in factors])
        if gap <= 1e-10 and (best_obj is None or obj > best_obj[0]):
            improved = improved or best_obj is None \
                or obj > best_obj[0] + 1e-9
            best_obj = (obj, p.copy(), [fi.copy() for fi in factors])
        since_improvement = 0 if improved else since_improvement + 1
        if since_improvement >= 12 or res <= 0.5 * cert_tol:
            break
        lam_half = 0.5 * lam

        ev = _evaluate(rho_mat, p, factors)
        for i in range(m):
            part = _partial_overlap_sq(ev.absq, i)
            for k in range(n_terms):
                if p[k] <= act_tol:
                    continue
                # Effective objective matrix: rho contracted with the other
                # factors of term k on both sides.
                quad = _contract_rho_except(rho_tensor, factors, m, i, k)
                coupling = part[k] * p
                coupling[k] = 0.0
                penalty = (factors[i].T * coupling[None, :]) @ factors[i].conj()
                h = quad - 2.0 * lam_half * penalty
                h = 0.5 * (h + h.conj().T)
                _, vecs = np.linalg.eigh(h)
                factors[i][k] = vecs[:, -1]
            # Gram data changed; refresh for the next subsystem sweep.
            ev = _evaluate(rho_mat, p, factors)

        # A few multiplier-form ascent steps in the weights.
        for _ in range(5):
            grad = ev.q - 2.0 * lam_half * ev.s
            trial = project_simplex(p + 0.5 * grad)
            if float(trial @ ev.q) - lam_half * float(trial @ ev.w @ trial) <= \
               float(p @ ev.q) - lam_half * float(p @ ev.w @ p) + 1e-15:
                break
            p = trial
            ev = _evaluate(rho_mat, p, factors)

        polished = _polish_weights(p, factors, target, 1e-12)
        if polished is not None:
            p = polished

    points = []
    if best_obj is not None:
        points.append((best_obj[1], best_obj[2]))
    if best_res is not None and (
        not points or best_res[1] is not points[0][0]
    ):
        points.append((best_res[1], best_res[2]))
    if not points:
        points.append((p, factors))
    return points


def _contract_rho_except(rho_tensor, factors, m, i, k):
    """``(prod_{j != i} <phi_j^k|) rho (prod_{j != i} |phi_j^k>)`` as a
    d_i x d_i matrix.

    ``rho_tensor`` carries row axes 0..m-1 and column axes m..2m-1.
    Contracting in descending subsystem order keeps axis indices valid.
    """
    t = rho_tensor
    for j in sorted((j for j in range(m) if j != i), reverse=True):
        t = np.tensordot(factors[j][k].conj(), t, axes=(0, j))
    # Remaining axes: (row_i, col_1, ..., col_m).
    for j in sorted((j for j in range(m) if j != i), reverse=True):
        t = np.tensordot(t, factors[j][k], axes=(1 + j, 0))
    return t


def _random_feasible_point(fs_weights, fs_factors, shape, rng, target):
    """Random ensemble restored to the norm constraint.

    Keeps the eigen-based feasible states in their slots, fills the rest
    with random product factors, draws flat-Dirichlet weights, and bisects
    the interpolation toward the feasible weights until the norm constraint
    holds.  The interpolation endpoint is exactly feasible, so the search
    always terminates.
    """
    n_terms = fs_weights.size
    k_active = int(np.sum(fs_weights > 0))
    factors = []
    for i, d in enumerate(shape.dims):
        fi = np.array(fs_factors[i])
        if k_active < n_terms:
            z = rng.standard_normal((n_terms - k_active, d)) \
                + 1j * rng.standard_normal((n_terms - k_active, d))
            fi[k_active:] = z / np.linalg.norm(z, axis=1)[:, None]
        factors.append(fi)
    p_rand = rng.dirichlet(np.ones(n_terms))
    w = _overlap_sq(_grams(factors))

    def gap(theta):
        p = (1.0 - theta) * p_rand + theta * fs_weights
        return float(p @ w @ p) - target

    theta = _bisect_to_feasible(gap)
    p = (1.0 - theta) * p_rand + theta * fs_weights
    return p, factors


def _bisect_to_feasible(gap, tol=1e-12) -> float:
    g0 = gap(0.0)
    if abs(g0) <= tol:
        return 0.0
    # Look for a sign change on a coarse grid, then bisect it.
    prev_t, prev_g = 0.0, g0
    for t in np.linspace(0.0, 1.0, 17)[1:]:
        gt = gap(t)
        if abs(gt) <= tol:
            return float(t)
        if np.sign(gt) != np.sign(prev_g):
            lo, hi, glo = prev_t, float(t), prev_g
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                gm = gap(mid)
                if abs(gm) <= tol:
                    return mid
                if np.sign(gm) == np.sign(glo):
                    lo, glo = mid, gm
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_t, prev_g = float(t), gt
    # One-signed on [0, 1): creep toward the exactly feasible endpoint.
    theta = 0.5
    for _ in range(80):
        if abs(gap(theta)) <= tol:
            break
        theta = 0.5 * (1.0 + theta)
    return theta


class _Candidate(NamedTuple):
    chi: float
    ensemble: SeparableEnsemble
    multipliers: KktMultipliers
    residual: float
    feasible: bool
    certified: bool
    order: int


def _make_candidate(rho, e, cfg, order) -> _Candidate:
    p, factors = _stacked(e)
    rho_mat = np.asarray(rho.entries)
    target = frobenius_norm_squared(rho)
    chi = float(p @ _evaluate(rho_mat, p, factors).q)
    lam, kappa, mu, tau, residual = _recover_core(
        rho_mat, target, p, factors, cfg.act_tol
    )
    mult = KktMultipliers(lam, kappa, mu, tau)
    gap = abs(norm_squared_arrays(p, factors) - target)
    feasible = gap <= cfg.feas_tol
    # Certification is by the externally checkable optimality residual,
    # not by the optimizer's internal stopping state.
    certified = feasible and residual <= cfg.cert_tol
    return _Candidate(chi, e, mult, residual, feasible, certified, order)


def ensemble_norm_gap(rho: DensityMatrix, e: SeparableEnsemble) -> float:
    """Signed violation of the equal-norm constraint."""
    p, factors = _stacked(e)
    return norm_squared_arrays(p, factors) - frobenius_norm_squared(rho)


def _ensemble_from_arrays(shape: SpaceShape, weights, factors) -> SeparableEnsemble:
    p = np.asarray(weights, dtype=float).copy()
    p[p < WEIGHT_SNAP] = 0.0
    p /= p.sum()
    states = []
    for k in range(p.size):
        fs = []
        for fi in factors:
            row = fi[k]
            fs.append(row / np.linalg.norm(row))
        states.append(ProductState(shape, tuple(fs)))
    return SeparableEnsemble(shape, p, tuple(states))


def solve(problem: MixedProblem, config: SolverConfig | None = None) -> MeasureResult:
    """Compute the mixed-state measure by multi-start ascent.

    Start 0 is the eigenvalue-based feasible ensemble (kept as a candidate
    in its own right, so the result is never worse than that trivial
    point); remaining starts are random feasible points.  Each start runs
    the augmented-Lagrangian ascent and then the block-coordinate polish,
    contributing up to two candidates (best objective, best residual).
    Candidates are compared by objective value among feasible ones, with
    ties broken toward smaller optimality residual and then earlier start.
    ``converged`` on the result means the winning candidate passed the
    residual certificate.
    """
    cfg = config or SolverConfig()
    rho = problem.rho
    shape = rho.shape
    target = problem.norm_sq_target
    n_terms = problem.num_terms

    fs = feasible_start(rho, n_terms)
    fs_weights, fs_factors = _stacked(fs)
    candidates = [_make_candidate(rho, fs, cfg, order=0)]

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.starts)
    for idx, child in enumerate(seeds, start=1):
        rng = np.random.default_rng(child)
        if idx == 1:
            p0, f0 = fs_weights.copy(), [np.array(f) for f in fs_factors]
        else:
            p0, f0 = _random_feasible_point(fs_weights, fs_factors, shape, rng, target)
        rho_mat = np.asarray(rho.entries)
        p, factors, _ = _augmented_lagrangian(
            rho_mat, shape.dims, target, p0, f0, cfg
        )
        for p_c, f_c in _block_polish(
            rho_mat, shape.dims, target, p, factors, cfg.act_tol, cfg.cert_tol
        ):
            restored = _polish_weights(p_c, f_c, target, cfg.feas_tol)
            if restored is not None:
                p_c = restored
            e = _ensemble_from_arrays(shape, p_c, f_c)
            candidates.append(_make_candidate(rho, e, cfg, order=idx))

    chosen = _select(candidates)
    return MeasureResult(
        chi=chosen.chi,
        measure_sq_half=target - chosen.chi,
        ensemble=chosen.ensemble,
        multipliers=chosen.multipliers,
        kkt_residual=chosen.residual,
        starts_used=cfg.starts,
        converged=chosen.certified,
    )


def _select(candidates) -> _Candidate:
    pool = [c for c in candidates if c.feasible]
    if not pool:
        pool = list(candidates)
    best = pool[0]
    for cand in pool[1:]:
        if cand.chi > best.chi + TIE_TOL:
            best = cand
        elif cand.chi > best.chi - TIE_TOL and cand.residual < best.residual:
            best = cand
    return best


def entanglement_eigenvalue_mixed(
    problem: MixedProblem, config: SolverConfig | None = None
) -> float:
    """``lam * ||rho||_F^2 + kappa`` at the best recovered multipliers.

    Agrees with the optimal objective of :func:`solve` up to the residual
    level of the certificate.
    """
    result = solve(problem, config)
    return float(
        result.multipliers.lam * problem.norm_sq_target + result.multipliers.kappa
    )
