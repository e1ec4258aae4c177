"""Hilbert-space layout and elementary operators for ions coupled to motional modes.

The state space is a tensor product of ion internal factors followed by mode
(Fock) factors, row-major.  Ion levels are ordered upper-first: index 0 is
|e>, index 1 is |g>, and index 2 (when present) is the auxiliary upper level
|e'>.  This makes the component convention explicit: |e> = (1, 0)^T and
|g> = (0, 1)^T on a two-level ion, so the dressed rotation is literally the
matrix (1/sqrt(2)) [[1, 1], [-1, 1]].

All operators are dense complex ndarrays on the full product space.  The
basis layout object is passed alongside; matrices do not carry it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

# level indices inside one ion factor
_LEVEL_INDEX = {"e": 0, "g": 1, "aux": 2}

# transitions a laser can address: (lower, upper) level names
TRANSITIONS = {"ge": ("g", "e"), "ge_aux": ("g", "aux")}


@dataclass(frozen=True)
class BasisDescriptor:
    """Shape of the simulated product space.

    ion_levels : number of internal levels per simulated ion (2 or 3)
    mode_truncations : Fock cutoff n_max per mode; each factor has
        n_max + 1 levels.
    """

    ion_levels: tuple[int, ...]
    mode_truncations: tuple[int, ...]

    def __post_init__(self):
        if any(levels not in (2, 3) for levels in self.ion_levels):
            raise ValueError("ions carry 2 or 3 internal levels")
        if any(n < 1 for n in self.mode_truncations):
            raise ValueError("mode truncation must be >= 1")

    @property
    def n_ions(self) -> int:
        return len(self.ion_levels)

    @property
    def n_modes(self) -> int:
        return len(self.mode_truncations)

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return tuple(self.ion_levels) + tuple(n + 1 for n in self.mode_truncations)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def ion_slot(self, ion_index: int) -> int:
        if not 0 <= ion_index < self.n_ions:
            raise IndexError(f"ion index {ion_index} out of range")
        return ion_index

    def mode_slot(self, mode_index: int) -> int:
        if not 0 <= mode_index < self.n_modes:
            raise IndexError(f"mode index {mode_index} out of range")
        return self.n_ions + mode_index


def embed(basis: BasisDescriptor, slot: int, op: np.ndarray) -> np.ndarray:
    """Embed a single-factor operator into the full product space."""
    dims = basis.factor_dims
    if op.shape != (dims[slot], dims[slot]):
        raise ValueError(f"operator shape {op.shape} does not match factor {slot}")
    mats = [op.astype(complex) if k == slot else np.eye(d, dtype=complex)
            for k, d in enumerate(dims)]
    return reduce(np.kron, mats)


def mode_annihilator(n_max: int) -> np.ndarray:
    """Single-mode annihilation operator on a truncated Fock space."""
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for n in range(1, n_max + 1):
        a[n - 1, n] = np.sqrt(n)
    return a


def build_ladder(basis: BasisDescriptor, mode_index: int) -> np.ndarray:
    """Annihilation operator of one mode, embedded in the full space."""
    n_max = basis.mode_truncations[mode_index]
    return embed(basis, basis.mode_slot(mode_index), mode_annihilator(n_max))


def _ion_matrix(levels: int, which: str, transition: str) -> np.ndarray:
    lower, upper = TRANSITIONS[transition]
    i_up, i_lo = _LEVEL_INDEX[upper], _LEVEL_INDEX[lower]
    if max(i_up, i_lo) >= levels:
        raise ValueError(f"transition {transition!r} needs level {max(i_up, i_lo)}")
    m = np.zeros((levels, levels), dtype=complex)
    if which == "plus":
        m[i_up, i_lo] = 1.0
    elif which == "minus":
        m[i_lo, i_up] = 1.0
    elif which == "z":
        m[i_up, i_up] = 1.0
        m[i_lo, i_lo] = -1.0
    else:
        raise ValueError(f"unknown pauli component {which!r}")
    return m


def build_pauli(basis: BasisDescriptor, ion_index: int, which: str,
                transition: str = "ge") -> np.ndarray:
    """sigma_plus / sigma_minus / sigma_z of one ion on one transition.

    sigma_plus = |upper><lower| on the named transition; sigma_z is the
    population difference restricted to the transition's two levels (zero on
    the third level when one exists).
    """
    levels = basis.ion_levels[basis.ion_slot(ion_index)]
    return embed(basis, ion_index, _ion_matrix(levels, which, transition))


def dressed_rotation(basis: BasisDescriptor, ion_index: int,
                     transition: str = "ge") -> np.ndarray:
    """Rotation mapping dressed states onto bare levels: R|+> = |e>, R|-> = |g>.

    Acts as (1/sqrt(2)) [[1, 1], [-1, 1]] on the transition's (upper, lower)
    block and as the identity elsewhere.
    """
    levels = basis.ion_levels[basis.ion_slot(ion_index)]
    lower, upper = TRANSITIONS[transition]
    i_up, i_lo = _LEVEL_INDEX[upper], _LEVEL_INDEX[lower]
    if max(i_up, i_lo) >= levels:
        raise ValueError(f"transition {transition!r} needs level {max(i_up, i_lo)}")
    r = np.eye(levels, dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    r[i_up, i_up] = s
    r[i_up, i_lo] = s
    r[i_lo, i_up] = -s
    r[i_lo, i_lo] = s
    return embed(basis, ion_index, r)


def conjugate_pauli_by_R(which: str) -> np.ndarray:
    """Return R sigma_pm R^dagger on a bare two-level ion.

    Checks the closed form R sigma_pm R^dag = (sigma_z pm (sigma_plus -
    sigma_minus)) / 2 and raises if the numerical conjugation disagrees.
    """
    if which not in ("plus", "minus"):
        raise ValueError("which must be 'plus' or 'minus'")
    r = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)
    sp = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    sm = sp.T.conj()
    sz = np.diag([1.0, -1.0]).astype(complex)
    sig = sp if which == "plus" else sm
    conj = r @ sig @ r.conj().T
    sign = 1.0 if which == "plus" else -1.0
    closed = 0.5 * (sz + sign * (sp - sm))
    if not np.allclose(conj, closed, atol=1e-14):
        raise AssertionError("dressed conjugation identity violated")
    return conj


def _state_index(basis: BasisDescriptor, ion_level_indices: tuple[int, ...],
                 mode_numbers: tuple[int, ...]) -> int:
    digits = tuple(ion_level_indices) + tuple(mode_numbers)
    idx = 0
    for d, dim in zip(digits, basis.factor_dims):
        if not 0 <= d < dim:
            raise ValueError(f"factor value {d} outside dimension {dim}")
        idx = idx * dim + d
    return idx


class StateVector:
    """Normalized state on a BasisDescriptor's product space."""

    def __init__(self, basis: BasisDescriptor, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (basis.dim,):
            raise ValueError("amplitude vector does not match basis dimension")
        self.basis = basis
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(other.amplitudes, self.amplitudes))

    def population(self, other: "StateVector") -> float:
        return float(abs(self.overlap(other)) ** 2)

    def apply(self, op: np.ndarray) -> "StateVector":
        return StateVector(self.basis, op @ self.amplitudes)

    def top_level_leak(self, mode_index: int) -> float:
        """Amplitude (2-norm) sitting in the top Fock level of one mode."""
        dims = self.basis.factor_dims
        slot = self.basis.mode_slot(mode_index)
        resh = self.amplitudes.reshape(dims)
        sel = resh.take(indices=dims[slot] - 1, axis=slot)
        return float(np.linalg.norm(sel))


def basis_state(basis: BasisDescriptor, ion_labels: tuple[str, ...],
                mode_numbers: tuple[int, ...]) -> StateVector:
    """Build a product state from ion labels and Fock numbers.

    Ion labels: 'g', 'e', 'aux' for bare levels; '+' and '-' for the dressed
    combinations (|g> pm |e>)/sqrt(2); '+aux'/'-aux' for the same on the
    auxiliary transition.
    """
    if len(ion_labels) != basis.n_ions or len(mode_numbers) != basis.n_modes:
        raise ValueError("label counts do not match basis")
    amps = np.zeros(basis.dim, dtype=complex)
    # expand dressed labels into (level index, amplitude) pairs per ion
    expansions = []
    for label in ion_labels:
        if label in _LEVEL_INDEX:
            expansions.append([(_LEVEL_INDEX[label], 1.0)])
        elif label in ("+", "-"):
            sign = 1.0 if label == "+" else -1.0
            s = 1.0 / np.sqrt(2.0)
            expansions.append([(_LEVEL_INDEX["g"], s), (_LEVEL_INDEX["e"], sign * s)])
        elif label in ("+aux", "-aux"):
            sign = 1.0 if label == "+aux" else -1.0
            s = 1.0 / np.sqrt(2.0)
            expansions.append([(_LEVEL_INDEX["g"], s), (_LEVEL_INDEX["aux"], sign * s)])
        else:
            raise ValueError(f"unknown ion label {label!r}")
    # cartesian product over per-ion expansions
    combos = [((), 1.0)]
    for exp in expansions:
        combos = [(idx + (i,), amp * a) for idx, amp in combos for i, a in exp]
    for idx, amp in combos:
        amps[_state_index(basis, idx, tuple(mode_numbers))] = amp
    return StateVector(basis, amps)


def state_index(basis: BasisDescriptor, ion_labels: tuple[str, ...],
                mode_numbers: tuple[int, ...]) -> int:
    """Flat index of a bare product basis state (no dressed labels)."""
    idx = tuple(_LEVEL_INDEX[label] for label in ion_labels)
    return _state_index(basis, idx, tuple(mode_numbers))
