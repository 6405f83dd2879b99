"""Convex-combination eavesdropping on the parity-game conference key protocol.

The eavesdropper splits the key-setting behavior of the noisy device into a
GHZ part she cannot read and a biseparable part she knows completely:

    P(a,b1,b2,e) = (1-nu)^3 P_GHZ(a,b1,b2) [e = ?]
                 + (1-(1-nu)^3) P_L(a,b1,b2) [e = (a,b1,b2)]

Everything refers to the key-generating setting, where all parties measure
sigma_z.  The Eve alphabet has 9 symbols: index 0 is the ignorance symbol
'?', index 1 + 4a + 2b1 + b2 records the triple (a,b1,b2).  Her
post-processing keeps only triples that mimic an honest key round, mapping
(a,a,a) to a and everything else to '?' (output alphabet 0, 1, '?'=2).

This decomposition need not be the strongest available to the adversary;
`build_cc_attack` therefore accepts an alternative (weight, table) pair so
stronger biseparable splits can be plugged in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import behaviors, states
from .qmat import DensityMatrix
from .secrecy import JointDistribution

MARGINAL_TOL = 1e-10

EVE_IGNORANT = 0
EVE_ALPHABET = 9
POST_IGNORANT = 2
POST_ALPHABET = 3


def eve_symbol(a: int, b1: int, b2: int) -> int:
    """Eve-alphabet index recording the output triple."""
    return 1 + 4 * a + 2 * b1 + b2


def _key_setting_povms() -> tuple:
    z = behaviors.povm_from_observable(behaviors.PAULI_Z)
    return ((z,), (z,), (z,))


def _key_slice(state: DensityMatrix) -> np.ndarray:
    """All-sigma_z Born probabilities of a three-qubit state, shape (2, 2, 2)."""
    b = behaviors.behavior_from_measurement(state, _key_setting_povms())
    return b.conditional((0, 0, 0))


def local_behavior_from_chi(nu: float) -> np.ndarray:
    """Key-setting outcome table of the biseparable remainder chi_nu."""
    return _key_slice(states.noisy_ghz3(nu).chi)


@dataclass(frozen=True)
class CcAttack:
    """Convex-combination attack at the key-generating setting.

    `joint` is the distribution over (a, b1, b2, e) with the 9-symbol Eve
    alphabet.  Construction verifies that dropping Eve reproduces the
    device's key-setting behavior and that P(e = '?') equals 1 minus the
    local weight, both to 1e-10.
    """

    nu: float
    local_weight: float
    p_ghz: np.ndarray
    p_local: np.ndarray
    joint: JointDistribution

    def __post_init__(self):
        device = _key_slice(states.noisy_ghz3(self.nu).state)
        marginal = self.joint.probs.sum(axis=-1)
        if np.abs(marginal - device).max() > MARGINAL_TOL:
            raise ValueError("attack joint does not reproduce the device's key-setting behavior")
        p_ignorant = self.joint.probs[..., EVE_IGNORANT].sum()
        if abs(p_ignorant - (1.0 - self.local_weight)) > MARGINAL_TOL:
            raise ValueError("P(e = '?') does not match the nonlocal weight")


def build_cc_attack(nu: float,
                    local_weight: float | None = None,
                    local_table: np.ndarray | None = None) -> CcAttack:
    """Assemble the convex-combination attack for noise level `nu` < 1.

    By default the biseparable split of the depolarized GHZ state fixes the
    local weight 1-(1-nu)^3 and the local table; both can be overridden
    together to model a stronger decomposition.
    """
    nu = float(nu)
    if not 0.0 <= nu < 1.0:
        raise ValueError(f"attack construction needs 0 <= nu < 1, got {nu}")
    if (local_weight is None) != (local_table is None):
        raise ValueError("override the local weight and the local table together")
    p_ghz = _key_slice(states.ghz(3, 2))
    if local_weight is None:
        local_weight = 1.0 - (1.0 - nu) ** 3
        p_local = local_behavior_from_chi(nu)
    else:
        local_weight = float(local_weight)
        if not 0.0 <= local_weight <= 1.0:
            raise ValueError("local weight must lie in [0, 1]")
        p_local = np.array(local_table, dtype=float)
        if p_local.shape != (2, 2, 2):
            raise ValueError("local table must have shape (2, 2, 2)")

    probs = np.zeros((2, 2, 2, EVE_ALPHABET))
    for a, b1, b2 in itertools.product(range(2), repeat=3):
        probs[a, b1, b2, EVE_IGNORANT] = (1.0 - local_weight) * p_ghz[a, b1, b2]
        probs[a, b1, b2, eve_symbol(a, b1, b2)] = local_weight * p_local[a, b1, b2]
    joint = JointDistribution((2, 2, 2), EVE_ALPHABET, probs)
    return CcAttack(nu=nu, local_weight=local_weight, p_ghz=p_ghz,
                    p_local=p_local, joint=joint)


def eve_postprocess(attack: CcAttack) -> JointDistribution:
    """Apply Eve's honest-mimicry channel, collapsing her alphabet to {0, 1, ?}.

    '?' stays '?'; a recorded triple maps to the shared bit when all three
    outputs agree and to '?' otherwise.  The party marginal is untouched
    because the channel acts on Eve's symbol alone.
    """
    src = attack.joint.probs
    out = np.zeros((2, 2, 2, POST_ALPHABET))
    out[..., POST_IGNORANT] += src[..., EVE_IGNORANT]
    for a, b1, b2 in itertools.product(range(2), repeat=3):
        here = src[a, b1, b2, eve_symbol(a, b1, b2)]
        if a == b1 == b2:
            out[a, b1, b2, a] += here
        else:
            out[a, b1, b2, POST_IGNORANT] += here
    return JointDistribution((2, 2, 2), POST_ALPHABET, out)
