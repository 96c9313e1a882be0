"""Thermalizing qubit channels and their quantum-switch composition.

Conventions (units k_B = hbar = 1):

* probe Hamiltonian ``H = diag(0, gap)``, so the ground-state population of
  the thermal state is ``p = 1 / (1 + exp(-beta * gap))``;
* control state ``|psi_c> = sqrt(alpha)|0> + sqrt(1 - alpha)|1>``;
* joint operators are ordered ``probe ⊗ control`` (see :mod:`.matcore`);
* control ``|0>`` selects the ``K_i K_j`` ordering, ``|1>`` the ``K_j K_i`` one.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .matcore import as_matrix, check_density_matrix, tensor

COMPLETENESS_TOL = 1e-12

GROUND_STATE = np.diag([1.0, 0.0]).astype(complex)
_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class ProbeSpec:
    """Qubit probe with energy gap ``gap``.

    A zero gap is accepted as the degenerate no-information limit.
    """

    gap: float

    def __post_init__(self):
        if not (math.isfinite(self.gap) and self.gap >= 0):
            raise PreconditionError(f"probe gap must be finite and >= 0, got {self.gap}")

    def hamiltonian(self) -> np.ndarray:
        return np.diag([0.0, self.gap]).astype(complex)


@dataclass(frozen=True)
class HOProbeSpec:
    """Harmonic-oscillator probe with level spacing ``gap``.

    Kept separate from :class:`ProbeSpec` so the two probes cannot be swapped
    by accident in comparisons.
    """

    gap: float

    def __post_init__(self):
        if not (math.isfinite(self.gap) and self.gap >= 0):
            raise PreconditionError(f"oscillator spacing must be finite and >= 0, got {self.gap}")


@dataclass(frozen=True)
class BathSpec:
    """Bath inverse temperature and channel strength.

    ``beta = math.inf`` is the zero-temperature limit. ``lam`` is the
    damping strength ``1 - exp(-t / tau)``; ``lam = 1`` is full thermalization.
    """

    beta: float
    lam: float = 1.0

    def __post_init__(self):
        if math.isnan(self.beta) or self.beta < 0:
            raise PreconditionError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 <= self.lam <= 1.0:
            raise PreconditionError(f"lambda must lie in [0, 1], got {self.lam}")

    @classmethod
    def from_interaction_time(cls, beta: float, t: float, tau: float) -> "BathSpec":
        if t < 0 or tau <= 0:
            raise PreconditionError(f"need t >= 0 and tau > 0, got t={t}, tau={tau}")
        return cls(beta, -math.expm1(-t / tau))

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta


@dataclass(frozen=True)
class SwitchConfig:
    """Control qubit of the switch, weight ``alpha`` on ``|0>``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise PreconditionError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_xi(cls, xi: float) -> "SwitchConfig":
        """Control with coherence ``xi``; picks the root ``alpha <= 1/2``."""
        if not 0.0 <= xi <= 1.0:
            raise PreconditionError(f"xi must lie in [0, 1], got {xi}")
        return cls(0.5 * (1.0 - math.sqrt(1.0 - xi)))

    @property
    def xi(self) -> float:
        return 4.0 * self.alpha * (1.0 - self.alpha)

    @property
    def c_l1(self) -> float:
        """l1-norm of coherence of the control state; ``xi == c_l1**2``."""
        return 2.0 * math.sqrt(self.alpha * (1.0 - self.alpha))

    def state(self) -> np.ndarray:
        a = self.alpha
        c = math.sqrt(a * (1.0 - a))
        return np.array([[a, c], [c, 1.0 - a]], dtype=complex)


@dataclass(frozen=True)
class KrausChannel:
    """Ordered Kraus operators of a trace-preserving channel."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.operators)
        if not ops:
            raise PreconditionError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise PreconditionError("Kraus operators must be square with a common dimension")
        object.__setattr__(self, "operators", ops)
        err = self.completeness_error()
        if err > COMPLETENESS_TOL:
            raise PreconditionError(f"Kraus operators are not complete (max deviation {err:.3e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        if rho.shape != (self.dim, self.dim):
            raise PreconditionError(f"state shape {rho.shape} does not match channel dim {self.dim}")
        return sum(k @ rho @ k.conj().T for k in self.operators)


def boltzmann_factor(beta: float, gap: float) -> float:
    """``exp(-beta * gap)``, with the limits ``beta = inf`` and ``gap = 0`` made exact."""
    if gap == 0:
        return 1.0
    return math.exp(-beta * gap)


def thermal_weight(beta: float, gap: float) -> float:
    """Ground-state population ``p = 1 / (1 + exp(-beta * gap))``.

    Defined for any real ``beta`` (negative values are only used by finite
    differences); ``beta = inf`` gives exactly 1.
    """
    return 1.0 / (1.0 + boltzmann_factor(beta, gap))


def thermal_weight_derivative(beta: float, gap: float) -> float:
    """``dp/dbeta = gap * u / (1 + u)**2`` with ``u = exp(-beta * gap)``."""
    u = boltzmann_factor(beta, gap)
    return gap * u / (1.0 + u) ** 2


def gad_operators(p: float, lam: float) -> list:
    """The four generalized-amplitude-damping Kraus matrices for given ``p``, ``lam``."""
    if not 0.0 <= lam <= 1.0:
        raise PreconditionError(f"lambda must lie in [0, 1], got {lam}")
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    sl, sr = math.sqrt(lam), math.sqrt(1.0 - lam)
    return [
        sp * np.array([[1.0, 0.0], [0.0, sr]], dtype=complex),
        sp * np.array([[0.0, sl], [0.0, 0.0]], dtype=complex),
        sq * np.array([[sr, 0.0], [0.0, 1.0]], dtype=complex),
        sq * np.array([[0.0, 0.0], [sl, 0.0]], dtype=complex),
    ]


def gad_kraus(probe: ProbeSpec, bath: BathSpec) -> KrausChannel:
    """Generalized amplitude damping channel thermalizing the probe towards ``bath``.

    Its fixed point is the thermal state at ``bath.beta``; at ``bath.lam = 1``
    every input is mapped onto that state.
    """
    return KrausChannel(tuple(gad_operators(thermal_weight(bath.beta, probe.gap), bath.lam)))


def thermal_state(probe: ProbeSpec, beta: float) -> np.ndarray:
    if math.isnan(beta) or beta < 0:
        raise PreconditionError(f"beta must be >= 0, got {beta}")
    p = thermal_weight(beta, probe.gap)
    return np.diag([p, 1.0 - p]).astype(complex)


def apply_sequential(channel: KrausChannel, probe_state) -> np.ndarray:
    """Definite-order baseline: the channel applied twice in succession."""
    return channel.apply(channel.apply(probe_state))


def switch_kraus(channel: KrausChannel) -> list:
    """Joint Kraus operators ``W_ij = K_i K_j ⊗ |0><0| + K_j K_i ⊗ |1><1|``."""
    ks = channel.operators
    return [tensor(ki @ kj, _P0) + tensor(kj @ ki, _P1) for ki in ks for kj in ks]


def switch_apply(channel: KrausChannel, probe_state, control: SwitchConfig) -> np.ndarray:
    """Joint probe-control state after the switch, by summing all ``W_ij`` terms.

    The same channel is used on both paths.
    """
    if channel.dim != 2:
        raise PreconditionError(f"the switch acts on a qubit probe, channel dim is {channel.dim}")
    rho = check_density_matrix(probe_state)
    if rho.shape != (2, 2):
        raise PreconditionError(f"probe state must be 2x2, got {rho.shape}")
    joint_in = tensor(rho, control.state())
    out = np.zeros((4, 4), dtype=complex)
    for w in switch_kraus(channel):
        out += w @ joint_in @ w.conj().T
    return out


def switch_output_closed_form(control: SwitchConfig, p: float, probe_state=None) -> np.ndarray:
    """Joint output of the switch for full thermalization (``lam = 1``).

    With ``tau = diag(p, 1 - p)`` the output is::

        alpha tau ⊗ |0><0| + (1 - alpha) tau ⊗ |1><1|
            + sqrt(alpha (1 - alpha)) (tau rho tau ⊗ |0><1| + h.c.)

    so only the control coherence remembers the input ``rho``. For the
    default ground-state input the probe-major matrix is::

        [[alpha p,  p² c,          0,           0                 ],
         [p² c,     (1 - alpha) p, 0,           0                 ],
         [0,        0,             alpha (1-p), 0                 ],
         [0,        0,             0,           (1-alpha) (1-p)   ]]

    with ``c = sqrt(alpha (1 - alpha))``.
    """
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    rho = GROUND_STATE if probe_state is None else as_matrix(probe_state)
    a = control.alpha
    tau = np.diag([p, 1.0 - p]).astype(complex)
    coherence = math.sqrt(a * (1.0 - a)) * (tau @ rho @ tau)
    return (
        tensor(tau, np.diag([a, 1.0 - a]))
        + tensor(coherence, np.array([[0.0, 1.0], [0.0, 0.0]]))
        + tensor(coherence.conj().T, np.array([[0.0, 0.0], [1.0, 0.0]]))
    )


def switch_output(
    probe: ProbeSpec,
    beta: float,
    control: SwitchConfig,
    lam: float = 1.0,
    probe_state: Sequence | np.ndarray | None = None,
) -> np.ndarray:
    """Joint switch output as a function of bath temperature.

    Uses the closed form at ``lam = 1`` and the Kraus sum otherwise. Unlike
    :func:`gad_kraus` this accepts any real ``beta``, which finite
    differences around ``beta = 0`` need.
    """
    p = thermal_weight(beta, probe.gap)
    rho = GROUND_STATE if probe_state is None else np.asarray(probe_state, dtype=complex)
    if lam == 1.0:
        return switch_output_closed_form(control, p, rho)
    return switch_apply(KrausChannel(tuple(gad_operators(p, lam))), rho, control)
