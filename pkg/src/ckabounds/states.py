"""Concrete states: GHZ, ideal conference key states, noisy GHZ decompositions.

The noise model is the single-qubit depolarizing channel
``D_nu(rho) = (1 - nu) rho + nu I/2`` applied locally.  For the three-qubit
GHZ state the triple-depolarized state splits exactly into a GHZ part of
weight (1-nu)^3 and a biseparable remainder chi_nu assembled from the three
classically correlated pair states

    kappa_XY = (|00><00| + |11><11|) / 2

(each tensored with I/2 on the remaining qubit) plus a fully mixed term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import DensityMatrix, maximally_mixed, partial_trace, permute_systems, tensor

RECONSTRUCTION_TOL = 1e-10


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {nu}")
    return nu


def ghz(n_parties: int, local_dim: int = 2) -> DensityMatrix:
    """Pure GHZ state (1/sqrt(d)) sum_i |i...i> on `n_parties` qudits."""
    if n_parties < 2 or local_dim < 2:
        raise ValueError("GHZ state needs n_parties >= 2 and local_dim >= 2")
    d, n = local_dim, n_parties
    psi = np.zeros(d ** n, dtype=complex)
    stride = (d ** n - 1) // (d - 1)  # index of |i...i> is i * stride
    psi[::stride] = 1.0 / math.sqrt(d)
    return DensityMatrix((d,) * n, np.outer(psi, psi.conj()))


def ideal_key_state(n_parties: int, key_dim: int, eve_state: DensityMatrix) -> DensityMatrix:
    """(1/K) sum_k |k..k><k..k| over N registers, tensored with the adversary state."""
    if key_dim < 2:
        raise ValueError("key_dim must be at least 2")
    k, n = key_dim, n_parties
    key = np.zeros((k ** n, k ** n), dtype=complex)
    stride = (k ** n - 1) // (k - 1)
    for i in range(k):
        key[i * stride, i * stride] = 1.0 / k
    return tensor(DensityMatrix((k,) * n, key), eve_state)


def depolarize(rho: DensityMatrix, site: int, nu: float) -> DensityMatrix:
    """Depolarize the qubit factor `site`: (1-nu) rho + nu (I/2 (x) tr_site rho)."""
    nu = _check_nu(nu)
    site = int(site)
    if site < 0 or site >= rho.n_factors:
        raise IndexError(f"site {site} out of range for {rho.n_factors} factors")
    if rho.dims[site] != 2:
        raise ValueError(f"site {site} has dimension {rho.dims[site]}, expected a qubit")
    if nu == 0.0:
        return rho
    if rho.n_factors == 1:
        mixed = maximally_mixed((2,))
    else:
        rest = [i for i in range(rho.n_factors) if i != site]
        mixed = tensor(maximally_mixed((2,)), partial_trace(rho, rest))
        # re-insert the fresh I/2 factor at position `site`
        order = []
        nxt = 1
        for k in range(rho.n_factors):
            if k == site:
                order.append(0)
            else:
                order.append(nxt)
                nxt += 1
        mixed = permute_systems(mixed, order)
    return DensityMatrix(rho.dims, (1.0 - nu) * rho.matrix + nu * mixed.matrix)


def _kappa_with_mixed(pair: tuple[int, int]) -> DensityMatrix:
    """kappa on the two given qubits of a 3-qubit system, I/2 on the remaining one."""
    i, j = pair
    (rest,) = [k for k in range(3) if k not in pair]
    mat = np.zeros((8, 8), dtype=complex)
    for bit in range(2):
        for b in range(2):
            ket = [0, 0, 0]
            ket[i] = ket[j] = bit
            ket[rest] = b
            idx = ket[0] * 4 + ket[1] * 2 + ket[2]
            mat[idx, idx] = 0.25
    return DensityMatrix((2, 2, 2), mat)


@dataclass(frozen=True)
class GhzDecomposition:
    """Triple-depolarized 3-qubit GHZ state with its biseparable split.

    `state` is the channel output, built by applying the depolarizing channel
    to each qubit in turn.  `chi` is the normalized biseparable remainder and
    `kappa_terms` lists its ingredients as (label, absolute weight, state).
    Construction fails if ghz_weight * GHZ + biseparable_weight * chi does not
    reproduce `state` entrywise to 1e-10.
    """

    nu: float
    ghz_weight: float
    biseparable_weight: float
    chi: DensityMatrix
    kappa_terms: tuple[tuple[str, float, DensityMatrix], ...]
    state: DensityMatrix

    def __post_init__(self):
        if abs(self.ghz_weight + self.biseparable_weight - 1.0) > 1e-12:
            raise ValueError("decomposition weights do not sum to 1")
        term_total = sum(w for _, w, _ in self.kappa_terms)
        if abs(term_total - self.biseparable_weight) > 1e-12:
            raise ValueError("kappa term weights do not sum to the biseparable weight")
        recon = (self.ghz_weight * ghz(3, 2).matrix
                 + self.biseparable_weight * self.chi.matrix)
        err = np.abs(recon - self.state.matrix).max()
        if err > RECONSTRUCTION_TOL:
            raise ValueError(f"decomposition does not reconstruct the state (err {err:.2e})")


def noisy_ghz3(nu: float) -> GhzDecomposition:
    """Apply the depolarizing channel to all three qubits of GHZ and decompose."""
    nu = _check_nu(nu)
    state = ghz(3, 2)
    for site in range(3):
        state = depolarize(state, site, nu)

    ghz_w = (1.0 - nu) ** 3
    bis_w = 1.0 - ghz_w
    pair_w = (1.0 - nu) ** 2 * nu
    mix_w = (3.0 - 2.0 * nu) * nu ** 2
    kappa_terms = (
        ("AB1", pair_w, _kappa_with_mixed((0, 1))),
        ("AB2", pair_w, _kappa_with_mixed((0, 2))),
        ("B1B2", pair_w, _kappa_with_mixed((1, 2))),
        ("mixed", mix_w, maximally_mixed((2, 2, 2))),
    )
    if bis_w > 1e-15:
        chi_mat = sum(w * s.matrix for _, w, s in kappa_terms) / bis_w
    else:
        # nu -> 0 limit of chi: equal thirds of the pair terms, no mixed part
        chi_mat = sum(s.matrix for _, _, s in kappa_terms[:3]) / 3.0
    return GhzDecomposition(
        nu=nu,
        ghz_weight=ghz_w,
        biseparable_weight=bis_w,
        chi=DensityMatrix((2, 2, 2), chi_mat),
        kappa_terms=kappa_terms,
        state=state,
    )
