"""Hamiltonian builders for a single laser addressing one ion in a trap.

Everything is expressed in the mode interaction picture: mode operators carry
explicit phases exp(+-i nu_p t) and the optical carrier is absorbed, leaving
the laser detuning delta = omega_laser - omega_atom as the only internal
frequency.  hbar = 1 and frequencies are quoted in units of the lowest mode
frequency nu_1 throughout; time is in units of 1/nu_1.

Builders return dense Hermitian complex matrices on the product space
described by a BasisDescriptor.  The five pictures and how they nest:

  full             all orders in the Lamb-Dicke parameters, exp(iX(t)) or
                   sin(X(t)) coupling (travelling / standing wave at a node)
  lamb_dicke       first order in eta, Debye-Waller reduced Rabi frequency
  dressed_picture  frame of the dressed states (|g> pm |e>)/sqrt(2) rotating
                   at the effective Rabi frequency; valid at delta = 0
  effective_jc     the secular exchange term alone, valid on resonance
                   (effective Rabi = nu_q / 2)
  cz_red_sideband  the full Hamiltonian evaluated with delta = -nu_q

`autonomous_form` gives the unitarily equivalent time-independent matrix and
the diagonal frame generator connecting it to the pictures above; it is the
workhorse for long propagations and parameter sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .statespace import (
    TRANSITIONS,
    BasisDescriptor,
    build_ladder,
    build_pauli,
    embed,
    mode_annihilator,
)

WAVE_TYPES = ("travelling", "standing_node")

_LEVEL_INDEX = {"e": 0, "g": 1, "aux": 2}


@dataclass(frozen=True)
class SystemConfig:
    """Trap, chain and laser parameters for one addressed ion.

    lamb_dicke[j][p] is the effective Lamb-Dicke parameter of ion j for mode
    p, i.e. it already contains the mode-vector component of that ion.  All
    entries are stored non-negative; a sign on a mode coupling is a gauge
    choice (redefinition a_p -> -a_p) that cannot affect single-laser
    dynamics.
    """

    n_ions: int
    mode_freqs: tuple[float, ...]
    lamb_dicke: tuple[tuple[float, ...], ...]
    rabi: float
    detuning: float = 0.0
    wave_type: str = "travelling"
    addressed_ion: int = 0
    transition: str = "ge"
    laser_phase: float = 0.0

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError("need at least one ion")
        if not np.isfinite(self.laser_phase):
            raise ValueError("laser phase must be finite")
        freqs = np.asarray(self.mode_freqs, dtype=float)
        if freqs.ndim != 1 or len(freqs) < 1:
            raise ValueError("mode_freqs must be a non-empty sequence")
        if np.any(freqs <= 0) or np.any(np.diff(freqs) <= 0):
            raise ValueError("mode frequencies must be positive and strictly increasing")
        eta = np.asarray(self.lamb_dicke, dtype=float)
        if eta.shape != (self.n_ions, len(freqs)):
            raise ValueError("lamb_dicke must have shape (n_ions, n_modes)")
        if np.any(eta < 0):
            raise ValueError("effective Lamb-Dicke parameters are stored non-negative")
        if self.rabi < 0:
            raise ValueError("Rabi frequency must be non-negative")
        if self.wave_type not in WAVE_TYPES:
            raise ValueError(f"wave_type must be one of {WAVE_TYPES}")
        if not 0 <= self.addressed_ion < self.n_ions:
            raise ValueError("addressed_ion out of range")
        if self.transition not in TRANSITIONS:
            raise ValueError(f"transition must be one of {tuple(TRANSITIONS)}")

    @property
    def n_modes(self) -> int:
        return len(self.mode_freqs)

    @property
    def eta_row(self) -> np.ndarray:
        """Lamb-Dicke parameters of the addressed ion, one per mode."""
        return np.asarray(self.lamb_dicke[self.addressed_ion], dtype=float)

    @property
    def debye_waller(self) -> float:
        return math.exp(-0.5 * float(np.sum(self.eta_row ** 2)))

    @property
    def effective_rabi(self) -> float:
        """Debye-Waller reduced Rabi frequency of the addressed ion."""
        return self.rabi * self.debye_waller

    def with_effective_rabi(self, omega_prime: float) -> "SystemConfig":
        """Set the bare Rabi frequency so the effective one equals omega_prime."""
        if omega_prime < 0:
            raise ValueError("effective Rabi frequency must be non-negative")
        return replace(self, rabi=omega_prime / self.debye_waller)

    def addressed(self, ion: int, transition: str = "ge") -> "SystemConfig":
        return replace(self, addressed_ion=ion, transition=transition)


def single_ion_config(eta: float, omega_prime: float | None = None,
                      rabi: float | None = None, detuning: float = 0.0,
                      wave_type: str = "travelling") -> SystemConfig:
    """One ion, one mode at nu = 1; specify either rabi or omega_prime."""
    cfg = SystemConfig(n_ions=1, mode_freqs=(1.0,), lamb_dicke=((eta,),),
                       rabi=0.0, detuning=detuning, wave_type=wave_type)
    if (omega_prime is None) == (rabi is None):
        raise ValueError("specify exactly one of omega_prime, rabi")
    if omega_prime is not None:
        return cfg.with_effective_rabi(omega_prime)
    return replace(cfg, rabi=rabi)


def two_ion_chain_config(eta_cm: float = 0.1, omega_prime: float | None = None,
                         detuning: float = 0.0, wave_type: str = "travelling",
                         addressed_ion: int = 0) -> SystemConfig:
    """Two-ion chain with centre-of-mass and stretch modes.

    eta_cm is the effective Lamb-Dicke parameter of either ion for the CM
    mode (the mode-vector component 1/sqrt(2) is already inside it).  The
    stretch mode sits at sqrt(3) nu_1 and its parameter scales as
    nu_p^(-1/2); the stretch mode-vector components have equal magnitude.
    """
    nu_stretch = math.sqrt(3.0)
    eta_stretch = eta_cm * nu_stretch ** -0.5
    cfg = SystemConfig(
        n_ions=2,
        mode_freqs=(1.0, nu_stretch),
        lamb_dicke=((eta_cm, eta_stretch), (eta_cm, eta_stretch)),
        rabi=0.0,
        detuning=detuning,
        wave_type=wave_type,
        addressed_ion=addressed_ion,
    )
    if omega_prime is not None:
        cfg = cfg.with_effective_rabi(omega_prime)
    return cfg


@dataclass(frozen=True)
class HamiltonianKind:
    name: str
    picture: str


HAMILTONIAN_KINDS = {
    "full": HamiltonianKind("full", "mode_interaction"),
    "lamb_dicke": HamiltonianKind("lamb_dicke", "mode_interaction"),
    "dressed_picture": HamiltonianKind("dressed_picture", "dressed_rotating"),
    "effective_jc": HamiltonianKind("effective_jc", "dressed_rotating"),
    "cz_red_sideband": HamiltonianKind("cz_red_sideband", "mode_interaction"),
}


def _check_time(t: float):
    if not np.isfinite(t):
        raise ValueError("time must be finite")


def _mode_quadratures(config: SystemConfig, basis: BasisDescriptor,
                      t: float) -> list[np.ndarray]:
    """Small per-mode matrices eta_jp (a e^{-i nu t} + a^dag e^{+i nu t})."""
    eta = config.eta_row
    xs = []
    for p, nu in enumerate(config.mode_freqs):
        a = mode_annihilator(basis.mode_truncations[p])
        phase = np.exp(-1j * nu * t)
        xs.append(eta[p] * (phase * a + np.conj(phase) * a.conj().T))
    return xs


def _mode_space_function(xs: list[np.ndarray], fn) -> np.ndarray:
    """Apply a scalar function to X = sum_p X_p on the joint mode space.

    The X_p commute (different factors), so the joint eigenbasis is the
    Kronecker product of the per-mode eigenbases and the eigenvalues add.
    """
    vecs, vals = [], []
    for x in xs:
        w, v = np.linalg.eigh(x)
        vals.append(w)
        vecs.append(v)
    v_joint = reduce(np.kron, vecs)
    lam = reduce(np.add.outer, vals).ravel()
    return (v_joint * fn(lam)) @ v_joint.conj().T


def _coupling_operator(config: SystemConfig, basis: BasisDescriptor,
                       t: float) -> np.ndarray:
    """exp(iX(t)) (travelling) or sin(X(t)) (standing wave at a node) on the
    mode space, embedded in the full product space."""
    xs = _mode_quadratures(config, basis, t)
    if config.wave_type == "travelling":
        mats = []
        for x in xs:
            w, v = np.linalg.eigh(x)
            mats.append((v * np.exp(1j * w)) @ v.conj().T)
        e_modes = reduce(np.kron, mats)
        defect = np.max(np.abs(e_modes @ e_modes.conj().T - np.eye(len(e_modes))))
        if defect > 1e-8:
            raise ValueError("mode truncation cannot represent exp(iX) faithfully")
    else:
        e_modes = _mode_space_function(xs, np.sin)
    ion_dim = int(np.prod(basis.ion_levels))
    return np.kron(np.eye(ion_dim, dtype=complex), e_modes)


def full_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                     t: float) -> np.ndarray:
    """Laser-ion coupling to all orders in the Lamb-Dicke parameters."""
    _check_time(t)
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    e_op = _coupling_operator(config, basis, t)
    phase = np.exp(1j * (config.laser_phase - config.detuning * t))
    term = config.rabi * phase * (sp @ e_op)
    return term + term.conj().T


def lamb_dicke_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                           t: float) -> np.ndarray:
    """First order in eta with the Debye-Waller reduced Rabi frequency."""
    _check_time(t)
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    sm = sp.conj().T
    phase = np.exp(1j * (config.laser_phase - config.detuning * t))
    omega_eff = config.effective_rabi
    h = omega_eff * (phase * sp + np.conj(phase) * sm)
    eta = config.eta_row
    for p, nu in enumerate(config.mode_freqs):
        a = build_ladder(basis, p)
        f = np.exp(-1j * nu * t) * a + np.exp(1j * nu * t) * a.conj().T
        h = h + 1j * omega_eff * eta[p] * (phase * sp - np.conj(phase) * sm) @ f
    return h


def dressed_picture_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                                t: float) -> np.ndarray:
    """Exchange terms in the frame rotating with the dressed-state splitting.

    Requires delta = 0: the carrier must be driven resonantly for the
    dressed states to be stationary.
    """
    _check_time(t)
    if config.detuning != 0.0:
        raise ValueError("dressed picture requires zero carrier detuning")
    if config.laser_phase != 0.0:
        raise ValueError("dressed frames assume zero laser phase")
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    sm = sp.conj().T
    om = config.effective_rabi
    eta = config.eta_row
    h = np.zeros((basis.dim, basis.dim), dtype=complex)
    for p, nu in enumerate(config.mode_freqs):
        a = build_ladder(basis, p)
        ad = a.conj().T
        rot = np.exp(1j * (2 * om - nu) * t)
        crot = np.exp(1j * (2 * om + nu) * t)
        term = rot * (sp @ a) + crot * (sp @ ad)
        h = h + 1j * om * eta[p] * (term - term.conj().T)
    return h


def dressed_rotating_term(config: SystemConfig, basis: BasisDescriptor,
                          mode_q: int) -> np.ndarray:
    """The part of the dressed-picture Hamiltonian that is static on
    resonance: i Omega' eta_jq (sigma_plus a_q - sigma_minus a_q^dag)."""
    if config.laser_phase != 0.0:
        raise ValueError("dressed frames assume zero laser phase")
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    a = build_ladder(basis, mode_q)
    om = config.effective_rabi
    eta_q = config.eta_row[mode_q]
    term = sp @ a
    return 1j * om * eta_q * (term - term.conj().T)


def effective_jc_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                             mode_q: int, rtol: float = 1e-9) -> np.ndarray:
    """Resonant exchange coupling with mode q at the double-resonance point.

    Requires the effective Rabi frequency to equal nu_q / 2; the error
    message names the bare Rabi frequency that satisfies the condition.
    """
    nu_q = config.mode_freqs[mode_q]
    target = 0.5 * nu_q
    if abs(config.effective_rabi - target) > rtol * target:
        required = target / config.debye_waller
        raise ValueError(
            "effective Rabi frequency %.12g violates the resonance condition "
            "nu_q/2 = %.12g; set rabi = %.12g" % (config.effective_rabi, target, required))
    return dressed_rotating_term(config, basis, mode_q)


def cz_red_sideband_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                                t: float, rtol: float = 1e-9) -> np.ndarray:
    """Full Hamiltonian with the laser tuned to a red sideband (delta = -nu_q)."""
    freqs = np.asarray(config.mode_freqs)
    if not np.any(np.abs(config.detuning + freqs) <= rtol * freqs):
        raise ValueError("detuning does not sit on a red sideband (delta = -nu_q)")
    return full_hamiltonian(config, basis, t)


def cz_effective_hamiltonian(config: SystemConfig, basis: BasisDescriptor,
                             mode_q: int, rtol: float = 1e-9) -> np.ndarray:
    """Rotating-wave red-sideband exchange i Omega' eta_jq (sigma_plus a_q - h.c.).

    This is the idealized generator of the sideband pulses in the original
    two-qubit gate construction; requires delta = -nu_q.
    """
    nu_q = config.mode_freqs[mode_q]
    if abs(config.detuning + nu_q) > rtol * nu_q:
        raise ValueError("red-sideband coupling requires delta = -nu_q")
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    a = build_ladder(basis, mode_q)
    term = np.exp(1j * config.laser_phase) * (sp @ a)
    return 1j * config.effective_rabi * config.eta_row[mode_q] * (term - term.conj().T)


def leakage_estimate(config: SystemConfig, mode_q: int, mode_p: int) -> float:
    """Squared amplitude leaked into spectator mode p while driving mode q:
    (eta_jq nu_q / (2 |nu_p - nu_q|))^2."""
    if mode_p == mode_q:
        raise ValueError("leakage is defined for a spectator mode p != q")
    nu_q = config.mode_freqs[mode_q]
    nu_p = config.mode_freqs[mode_p]
    gap = abs(nu_p - nu_q)
    if gap == 0:
        raise ValueError("degenerate modes have no perturbative leakage bound")
    return float((config.eta_row[mode_q] * nu_q / (2.0 * gap)) ** 2)


def frame_diagonal(config: SystemConfig, basis: BasisDescriptor) -> np.ndarray:
    """Diagonal of the free generator sum_p nu_p n_p - delta P_upper.

    Conjugating by exp(i diag t) maps the autonomous form onto the mode
    interaction picture.
    """
    dims = basis.factor_dims
    diag = np.zeros(basis.dim)
    # mode number contributions
    for p, nu in enumerate(config.mode_freqs):
        slot = basis.mode_slot(p)
        contrib = np.zeros(dims[slot])
        contrib[:] = nu * np.arange(dims[slot])
        shape = [1] * len(dims)
        shape[slot] = dims[slot]
        diag = diag + np.broadcast_to(contrib.reshape(shape), dims).ravel()
    # detuning on the driven upper level
    if config.detuning != 0.0:
        _, upper = TRANSITIONS[config.transition]
        slot = basis.ion_slot(config.addressed_ion)
        contrib = np.zeros(dims[slot])
        contrib[_LEVEL_INDEX[upper]] = -config.detuning
        shape = [1] * len(dims)
        shape[slot] = dims[slot]
        diag = diag + np.broadcast_to(contrib.reshape(shape), dims).ravel()
    return diag


def autonomous_form(config: SystemConfig, basis: BasisDescriptor) -> tuple[np.ndarray, np.ndarray]:
    """Time-independent matrix generating the same dynamics as the full
    Hamiltonian, plus the diagonal frame generator.

    Returns (H_static, diag) with H_static = diag + coupling(t=0); the
    interaction-picture state is exp(+i diag t) applied elementwise to the
    Schroedinger-picture state, and

        full_hamiltonian(t) = exp(i diag t) (H_static - diag) exp(-i diag t).
    """
    diag = frame_diagonal(config, basis)
    sp = build_pauli(basis, config.addressed_ion, "plus", config.transition)
    e_op = _coupling_operator(config, basis, 0.0)
    term = config.rabi * np.exp(1j * config.laser_phase) * (sp @ e_op)
    h_static = np.diag(diag.astype(complex)) + term + term.conj().T
    return h_static, diag
