"""Small dense complex linear algebra and quantum entropic quantities.

Conventions used throughout the package:

* all logarithms are base 2, so every entropic quantity is in bits;
* subsystems of a composite state are indexed from 0 in tensor order;
* total dimensions stay small (<= ~64), so dense eigendecompositions are
  always affordable and no sparse machinery is provided;
* validity (hermiticity, trace, positivity) is checked once, when a
  `DensityMatrix` or `Povm` is constructed, not on every operation.

Adversarial systems are modelled as finite-dimensional throughout.  This is
a computational restriction, not a claim of tightness: the quantities
computed here are evaluated on explicit finite extensions only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
MIN_EIGENVALUE = -1e-9
EIGENVALUE_CLAMP = 1e-12

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _as_complex_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got an array of ndim {arr.ndim}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on labeled tensor factors.

    `dims` lists the dimension of each tensor factor; `matrix` is the
    (prod(dims) x prod(dims)) complex matrix in row-major tensor order.
    A factor of dimension 1 is allowed as a trivial subsystem (it arises
    as the environment of a purified pure state).
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid subsystem dimensions {dims}")
        m = _as_complex_matrix(self.matrix)
        d = math.prod(dims)
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian within 1e-10")
        tr = m.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {tr}, expected 1 within 1e-10")
        if np.linalg.eigvalsh(m).min() < MIN_EIGENVALUE:
            raise ValueError("matrix has an eigenvalue below -1e-9")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.dims)


@dataclass(frozen=True)
class Povm:
    """Positive operator-valued measure on one subsystem, one effect per outcome."""

    dim: int
    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        effects = tuple(_as_complex_matrix(e) for e in self.effects)
        if not effects:
            raise ValueError("POVM needs at least one effect")
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for e in effects:
            if e.shape != (self.dim, self.dim):
                raise ValueError(f"effect shape {e.shape} does not match dim {self.dim}")
            if np.abs(e - e.conj().T).max() > HERMITICITY_TOL:
                raise ValueError("POVM effect is not Hermitian within 1e-10")
            if np.linalg.eigvalsh(e).min() < -HERMITICITY_TOL:
                raise ValueError("POVM effect is not positive semidefinite within 1e-10")
            total += e
        if np.abs(total - np.eye(self.dim)).max() > HERMITICITY_TOL:
            raise ValueError("POVM effects do not sum to the identity within 1e-10")
        object.__setattr__(self, "effects", tuple(_frozen(e) for e in effects))

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


def tensor(a, b):
    """Kronecker product; for `DensityMatrix` arguments the dims concatenate."""
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(a.dims + b.dims, np.kron(a.matrix, b.matrix))
    return np.kron(_as_complex_matrix(a), _as_complex_matrix(b))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = math.prod(dims)
    return DensityMatrix(tuple(dims), np.eye(d, dtype=complex) / d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the `keep` factors, original factor ordering preserved."""
    keep = sorted({int(i) for i in keep})
    n = rho.n_factors
    if not keep:
        raise ValueError("keep must be a nonempty set of subsystem indices")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"subsystem index out of range for {n} factors: {keep}")
    if len(keep) == n:
        return rho
    t = rho.matrix.reshape(rho.dims + rho.dims)
    row = list(_LETTERS[:n])
    col = list(_LETTERS[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = math.prod(rho.dims[i] for i in keep)
    return DensityMatrix(tuple(rho.dims[i] for i in keep), reduced.reshape(d, d))


def permute_systems(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Reorder tensor factors so that new factor k is old factor `order[k]`."""
    order = [int(i) for i in order]
    if sorted(order) != list(range(rho.n_factors)):
        raise ValueError(f"order {order} is not a permutation of the factors")
    n = rho.n_factors
    t = rho.matrix.reshape(rho.dims + rho.dims)
    t = t.transpose(order + [n + i for i in order])
    dims = tuple(rho.dims[i] for i in order)
    d = math.prod(dims)
    return DensityMatrix(dims, t.reshape(d, d))


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix."""
    m = _as_complex_matrix(m)
    if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
        raise ValueError("matrix is not Hermitian within 1e-10")
    vals, vecs = np.linalg.eigh(m)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lambda log2 lambda) in bits, eigenvalues below 1e-12 treated as 0."""
    vals = np.linalg.eigvalsh(rho.matrix)
    vals = vals[vals > EIGENVALUE_CLAMP]
    return float(-(vals * np.log2(vals)).sum()) if vals.size else 0.0


def quantum_cmi(rho: DensityMatrix,
                groups: Sequence[Sequence[int]],
                eve: Sequence[int] = ()) -> float:
    """Multipartite conditional mutual information sum_i H(A_i|E) - H(A_1..A_N|E).

    `groups` collects the subsystem indices of each party A_i and `eve` the
    conditioning subsystems E (may be empty, in which case the conditional
    entropies are unconditional).  Together they must partition the factors.
    """
    groups = [tuple(int(i) for i in g) for g in groups]
    eve = tuple(int(i) for i in eve)
    flat = [i for g in groups for i in g] + list(eve)
    if len(groups) < 2 or any(not g for g in groups):
        raise ValueError("need at least two nonempty groups")
    if sorted(flat) != list(range(rho.n_factors)):
        raise ValueError("groups and eve must partition the subsystems")

    def ent(subsys: tuple[int, ...]) -> float:
        if not subsys:
            return 0.0
        return von_neumann_entropy(partial_trace(rho, subsys))

    h_eve = ent(eve)
    total = sum(ent(g + eve) - h_eve for g in groups)
    all_parties = tuple(i for g in groups for i in g)
    return total - (ent(all_parties + eve) - h_eve)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr[rho (log2 rho - log2 sigma)] if supp(rho) is in supp(sigma), else +inf.

    The support test declares a violation when a rho-eigenvector with
    eigenvalue > 1e-10 has sigma-expectation <= 1e-12.
    """
    if rho.dims != sigma.dims:
        raise ValueError("states must share the same subsystem dimensions")
    rvals, rvecs = eig_hermitian(rho.matrix)
    for lam, v in zip(rvals, rvecs.T):
        if lam > 1e-10 and (v.conj() @ sigma.matrix @ v).real <= 1e-12:
            return math.inf
    tr_rho_log_rho = float(sum(lam * math.log2(lam) for lam in rvals if lam > EIGENVALUE_CLAMP))
    svals, svecs = eig_hermitian(sigma.matrix)
    tr_rho_log_sigma = 0.0
    for mu, w in zip(svals, svecs.T):
        if mu > EIGENVALUE_CLAMP:
            tr_rho_log_sigma += math.log2(mu) * (w.conj() @ rho.matrix @ w).real
    return tr_rho_log_rho - tr_rho_log_sigma


def purify(rho: DensityMatrix) -> DensityMatrix:
    """Pure state on dims + (rank,) whose environment trace-out returns `rho`."""
    vals, vecs = eig_hermitian(rho.matrix)
    rank = max(1, int(np.sum(vals > EIGENVALUE_CLAMP)))
    amps = vecs[:, :rank] * np.sqrt(np.clip(vals[:rank], 0.0, None))
    psi = amps.reshape(-1)  # index (system, environment), row-major
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(rho.dims + (rank,), np.outer(psi, psi.conj()))
