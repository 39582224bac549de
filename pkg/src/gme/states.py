"""Quantum state containers and the overlap/Gram primitives built on them.

A composite system with subsystem dimensions ``(d_1, ..., d_m)`` lives in a
Hilbert space of total dimension ``n = d_1 * ... * d_m``.  Vectors use the
row-major tensor basis (subsystem 1 varies slowest), so for two qubits the
basis order is ``|00>, |01>, |10>, |11>`` and a product state materializes
as the Kronecker product of its factors in subsystem order.

All containers are immutable after construction and validate their physics
invariants (unit norm, Hermiticity, positive semidefiniteness, trace one,
simplex weights) at construction time; the operations in this module are
pure functions and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Validation tolerances.  Vector norms are checked tighter than matrix
# properties because eigenvalue checks of nearly rank-deficient density
# matrices are themselves only accurate to ~1e-12.
UNIT_NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
TRACE_TOL = 1e-10
WEIGHT_TOL = 1e-10


class ShapeMismatchError(ValueError):
    """Raised when two objects live on different composite spaces."""

    def __init__(self, first, second):
        self.first = tuple(first)
        self.second = tuple(second)
        super().__init__(
            f"subsystem dimensions do not match: {self.first} vs {self.second}"
        )


class NotUnitaryError(ValueError):
    """Raised when a matrix expected to be unitary is not."""

    def __init__(self, index, deviation):
        self.index = index
        self.deviation = float(deviation)
        super().__init__(
            f"matrix for subsystem {index} deviates from unitarity by "
            f"{self.deviation:.3e}"
        )


def _as_complex_vector(data, name):
    arr = np.asarray(data, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SpaceShape:
    """Subsystem dimensions ``(d_1, ..., d_m)`` of a composite space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise ValueError(f"need at least 2 subsystems, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValueError(f"subsystem dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def num_factors(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def caratheodory_bound(self) -> int:
        """Number of product terms, ``n**2 + 1``, sufficient to represent
        any disentangled state on this space."""
        return self.total_dim**2 + 1


@dataclass(frozen=True)
class PureState:
    """A normalized pure state, stored as amplitudes in the tensor basis."""

    shape: SpaceShape
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_vector(self.amplitudes, "amplitudes")
        if amps.size != self.shape.total_dim:
            raise ValueError(
                f"amplitude length {amps.size} does not match total dimension "
                f"{self.shape.total_dim} of shape {self.shape.dims}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"amplitudes must have unit norm, got {nrm!r}")
        object.__setattr__(self, "amplitudes", amps)

    def as_tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.shape.dims)


@dataclass(frozen=True)
class ProductState:
    """A separable pure state, one unit vector per subsystem."""

    shape: SpaceShape
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.factors) != self.shape.num_factors:
            raise ValueError(
                f"expected {self.shape.num_factors} factors, got {len(self.factors)}"
            )
        factors = []
        for i, (f, d) in enumerate(zip(self.factors, self.shape.dims)):
            vec = _as_complex_vector(f, f"factor {i}")
            if vec.size != d:
                raise ValueError(
                    f"factor {i} has length {vec.size}, expected {d}"
                )
            nrm = np.linalg.norm(vec)
            if abs(nrm - 1.0) > UNIT_NORM_TOL:
                raise ValueError(f"factor {i} must have unit norm, got {nrm!r}")
            factors.append(vec)
        object.__setattr__(self, "factors", tuple(factors))

    def to_vector(self) -> np.ndarray:
        """Materialize the full tensor-product vector."""
        return kron_all(self.factors)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, trace-one matrix of a mixed state."""

    shape: SpaceShape
    entries: np.ndarray

    def __post_init__(self):
        n = self.shape.total_dim
        mat = np.asarray(self.entries, dtype=complex)
        if mat.shape != (n, n):
            raise ValueError(
                f"entries must be {n}x{n} for shape {self.shape.dims}, "
                f"got {mat.shape}"
            )
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (deviation {herm_dev:.3e})")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        lo = np.linalg.eigvalsh(mat).min()
        if lo < EIGENVALUE_FLOOR:
            raise ValueError(
                f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        v = psi.amplitudes
        return cls(psi.shape, np.outer(v, v.conj()))


@dataclass(frozen=True)
class SeparableEnsemble:
    """Convex mixture of product states: weights ``p_k`` and states ``Phi_k``.

    The induced matrix ``sum_k p_k |Phi_k><Phi_k|`` is disentangled by
    construction.  Weights may be exactly zero (inactive terms); negative
    weights within ``WEIGHT_TOL`` of zero are clamped to zero.
    """

    shape: SpaceShape
    weights: np.ndarray
    states: tuple[ProductState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.ndim != 1:
            raise ValueError(f"weights must be 1-d, got shape {w.shape}")
        if len(self.states) != w.size:
            raise ValueError(
                f"{w.size} weights but {len(self.states)} product states"
            )
        if w.min(initial=0.0) < -WEIGHT_TOL:
            raise ValueError(f"weights must be nonnegative, min is {w.min()!r}")
        np.clip(w, 0.0, None, out=w)
        total = w.sum()
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        for k, s in enumerate(self.states):
            if s.shape.dims != self.shape.dims:
                raise ShapeMismatchError(self.shape.dims, s.shape.dims)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def num_terms(self) -> int:
        return self.weights.size

    def factor_matrix(self, i: int) -> np.ndarray:
        """Factors of subsystem ``i`` stacked into an ``(N, d_i)`` array."""
        return np.array([s.factors[i] for s in self.states])


def kron_all(vectors) -> np.ndarray:
    """Kronecker product of a sequence of vectors, subsystem 1 slowest."""
    out = np.asarray(vectors[0], dtype=complex)
    for v in vectors[1:]:
        out = np.kron(out, v)
    return out


def product_overlap(a: ProductState, b: ProductState) -> complex:
    """Inner product ``<A|B> = prod_i <a_i|b_i>`` of two product states.

    Conjugate-symmetric: ``product_overlap(a, b) == conj(product_overlap(b, a))``.
    """
    if a.shape.dims != b.shape.dims:
        raise ShapeMismatchError(a.shape.dims, b.shape.dims)
    out = complex(1.0)
    for fa, fb in zip(a.factors, b.factors):
        out *= np.vdot(fa, fb)
    return complex(out)


def ensemble_to_density(e: SeparableEnsemble) -> DensityMatrix:
    """Materialize ``sum_k p_k |Phi_k><Phi_k|`` as a density matrix."""
    n = e.shape.total_dim
    mat = np.zeros((n, n), dtype=complex)
    for p, s in zip(e.weights, e.states):
        if p == 0.0:
            continue
        v = s.to_vector()
        mat += p * np.outer(v, v.conj())
    # Round off the anti-Hermitian noise so downstream eigenvalue checks
    # see an exactly Hermitian matrix.
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(e.shape, mat)


def ensemble_norm_squared(e: SeparableEnsemble) -> float:
    """Squared Frobenius norm of the ensemble's density matrix.

    Computed from the factor Gram matrices as
    ``sum_{r,s} p_r p_s prod_i |<phi_i^r|phi_i^s>|^2`` without materializing
    the matrix, which keeps the cost polynomial in the number of terms.
    """
    w = _pairwise_overlap_squared([e.factor_matrix(i) for i in range(e.shape.num_factors)])
    p = e.weights
    return float(p @ w @ p)


def _pairwise_overlap_squared(factor_matrices) -> np.ndarray:
    """``W[r, s] = prod_i |<phi_i^r|phi_i^s>|^2`` for stacked factors."""
    out = None
    for fm in factor_matrices:
        g = fm.conj() @ fm.T
        sq = np.abs(g) ** 2
        out = sq if out is None else out * sq
    return out


def frobenius_norm_squared(d: DensityMatrix) -> float:
    """Sum of squared moduli of the entries; in ``(0, 1]`` for states."""
    return float(np.sum(np.abs(d.entries) ** 2))


def expectation(d: DensityMatrix, s: ProductState) -> float:
    """Quadratic form ``<Phi| rho |Phi>``; real and in ``[0, 1]``."""
    if d.shape.dims != s.shape.dims:
        raise ShapeMismatchError(d.shape.dims, s.shape.dims)
    v = s.to_vector()
    return float(np.real(np.vdot(v, d.entries @ v)))


def apply_local_unitaries(d: DensityMatrix, us) -> DensityMatrix:
    """Conjugate a density matrix by a tensor product of local unitaries.

    Each ``us[i]`` must be a ``d_i x d_i`` unitary.  The result has the same
    trace, spectrum, and Frobenius norm as the input.
    """
    if len(us) != d.shape.num_factors:
        raise ValueError(
            f"expected {d.shape.num_factors} unitaries, got {len(us)}"
        )
    mats = []
    for i, (u, dim) in enumerate(zip(us, d.shape.dims)):
        u = np.asarray(u, dtype=complex)
        if u.shape != (dim, dim):
            raise ValueError(
                f"unitary {i} has shape {u.shape}, expected ({dim}, {dim})"
            )
        dev = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
        if dev > HERMITIAN_TOL:
            raise NotUnitaryError(i, dev)
        mats.append(u)
    big = mats[0]
    for u in mats[1:]:
        big = np.kron(big, u)
    out = big @ d.entries @ big.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(d.shape, out)


def basis_product_state(shape: SpaceShape, index: int) -> ProductState:
    """Computational-basis product state for flat index ``index``.

    The flat index is unraveled row-major, matching the tensor basis, so
    distinct indices give product states with zero mutual overlap.
    """
    multi = np.unravel_index(index % shape.total_dim, shape.dims)
    factors = []
    for pos, d in zip(multi, shape.dims):
        f = np.zeros(d, dtype=complex)
        f[pos] = 1.0
        factors.append(f)
    return ProductState(shape, tuple(factors))


def random_product_state(shape: SpaceShape, rng: np.random.Generator) -> ProductState:
    """Product state with factors uniform on the complex unit sphere."""
    factors = []
    for d in shape.dims:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        factors.append(z / np.linalg.norm(z))
    return ProductState(shape, tuple(factors))


def random_pure_state(shape: SpaceShape, rng: np.random.Generator) -> PureState:
    """Haar-random pure state on the composite space."""
    n = shape.total_dim
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(shape, z / np.linalg.norm(z))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def bell_state() -> PureState:
    """Two-qubit state ``(|00> + |11>)/sqrt(2)``."""
    return PureState(SpaceShape((2, 2)), np.array([1, 0, 0, 1]) / math.sqrt(2))


def ghz_state(num_qubits: int = 3) -> PureState:
    """``(|0...0> + |1...1>)/sqrt(2)`` on ``num_qubits`` qubits."""
    n = 2**num_qubits
    amps = np.zeros(n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(SpaceShape((2,) * num_qubits), amps)


def w_state(num_qubits: int = 3) -> PureState:
    """Equal superposition of all single-excitation basis states."""
    n = 2**num_qubits
    amps = np.zeros(n, dtype=complex)
    for q in range(num_qubits):
        amps[1 << q] = 1 / math.sqrt(num_qubits)
    return PureState(SpaceShape((2,) * num_qubits), amps)
