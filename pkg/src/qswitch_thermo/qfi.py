"""Quantum Fisher information for the inverse temperature.

Two evaluation paths exist side by side:

* :func:`qfi_spectral` works on any parameterized density matrix, from its
  eigendecomposition and the derivative ``d rho / d beta``;
* the closed forms :func:`qfi_switch_analytic`, :func:`qfi_qubit_noswitch`
  and :func:`qfi_ho` for the three probes compared in this package.

All closed forms are written in ``u = exp(-beta * gap)`` so they stay finite
for any ``beta >= 0`` including ``beta = inf``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .channels import (
    GROUND_STATE,
    HOProbeSpec,
    ProbeSpec,
    SwitchConfig,
    boltzmann_factor,
    switch_output,
    thermal_weight,
    thermal_weight_derivative,
)
from .errors import NumericalError, PreconditionError
from .matcore import check_density_matrix, hermitian_eig, tensor

PAIR_DROP_TOL = 1e-12
ZERO_POP_TOL = 1e-15
ZERO_DERIV_TOL = 1e-12
NEGATIVE_TOL = -1e-10
ROUTE_AGREEMENT_RTOL = 1e-6

_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
_RAISE = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_LOWER = _RAISE.T.copy()


@dataclass(frozen=True)
class ParameterizedState:
    """A family of density matrices ``beta -> rho(beta)``.

    ``derivative_at``, when given, returns the exact ``d rho / d beta``;
    otherwise central differences are used.
    """

    state_at: Callable[[float], np.ndarray]
    derivative_at: Optional[Callable[[float], np.ndarray]] = None


@dataclass(frozen=True)
class QfiResult:
    value: float
    parameter: str  # "beta" | "temperature"
    method: str  # "analytic" | "spectral"
    derivative_method: str  # "analytic" | "central_difference(h=...)"
    inputs: dict = field(default_factory=dict)
    classical: Optional[float] = None
    coherent: Optional[float] = None

    def __post_init__(self):
        if not self.value >= 0:
            raise NumericalError(f"QFI must be non-negative, got {self.value}")


def _clamp(value: float) -> float:
    if value < NEGATIVE_TOL:
        raise NumericalError(f"negative QFI {value:.3e} beyond round-off")
    return max(value, 0.0)


def default_step(beta: float) -> float:
    return max(1e-5, 1e-6 * abs(beta))


def central_difference(state_at: Callable[[float], np.ndarray], beta: float, h: Optional[float] = None) -> np.ndarray:
    h = default_step(beta) if h is None else h
    return (np.asarray(state_at(beta + h)) - np.asarray(state_at(beta - h))) / (2.0 * h)


def spectral_terms(rho, drho) -> tuple:
    """Split the QFI of ``rho`` into its populations and coherence parts.

    With ``rho = sum_k p_k |k><k|`` and ``D = U† drho U`` the populations part
    is ``sum_k D_kk² / p_k`` and the coherence part is
    ``sum_{m != n} 2 |D_mn|² / (p_m + p_n)``; pairs with
    ``p_m + p_n <= 1e-12`` are dropped.

    Raises:
        NumericalError: if a vanishing population has a non-vanishing
            derivative (the rank of ``rho`` changes at this point).
    """
    eig = hermitian_eig(rho)
    p = eig.eigenvalues
    u = eig.eigenvectors
    d = u.conj().T @ np.asarray(drho, dtype=complex) @ u

    classical = 0.0
    for k, pk in enumerate(p):
        dk = d[k, k].real
        if pk <= ZERO_POP_TOL:
            if abs(dk) > ZERO_DERIV_TOL:
                raise NumericalError(
                    f"eigenvalue {pk:.3e} vanishes but its derivative is {dk:.3e}; rank changes here"
                )
            continue
        classical += dk * dk / pk

    coherent = 0.0
    n = len(p)
    for m in range(n):
        for k in range(n):
            if m == k:
                continue
            s = p[m] + p[k]
            if s <= PAIR_DROP_TOL:
                continue
            coherent += 2.0 * abs(d[m, k]) ** 2 / s
    return float(classical), float(coherent)


def symmetric_log_derivative(rho, drho) -> np.ndarray:
    """Solve ``drho = (L rho + rho L) / 2`` for ``L`` without diagonalizing ``rho``.

    The Lyapunov equation is vectorized and solved in the least-squares
    sense, so ``L`` vanishes on the kernel of a rank-deficient ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    eye = np.eye(n)
    # column-stacking: vec(A X B) = (B^T ⊗ A) vec(X)
    sup = np.kron(eye, rho) + np.kron(rho.T, eye)
    rhs = 2.0 * np.asarray(drho, dtype=complex).reshape(-1, order="F")
    vec_l, *_ = np.linalg.lstsq(sup, rhs, rcond=PAIR_DROP_TOL)
    sld = vec_l.reshape(n, n, order="F")
    return 0.5 * (sld + sld.conj().T)


def qfi_from_sld(rho, drho) -> float:
    """QFI as ``Tr(rho L²)`` with ``L`` from :func:`symmetric_log_derivative`."""
    sld = symmetric_log_derivative(rho, drho)
    return float(np.trace(np.asarray(rho) @ sld @ sld).real)


def qfi_spectral(ps: ParameterizedState, beta: float, h: Optional[float] = None, inputs: Optional[dict] = None) -> QfiResult:
    """QFI of a parameterized state from its spectral decomposition.

    The eigenbasis sum is cross-checked against ``Tr(rho L²)`` with the SLD
    solved directly in the computational basis; a disagreement beyond 1e-6
    relative raises :class:`NumericalError`.
    """
    rho = check_density_matrix(ps.state_at(beta))
    if ps.derivative_at is not None:
        drho = np.asarray(ps.derivative_at(beta), dtype=complex)
        deriv_method = "analytic"
        if abs(np.trace(drho)) > 1e-10:
            raise PreconditionError(f"state derivative must be traceless, trace is {np.trace(drho):.3e}")
    else:
        step = default_step(beta) if h is None else h
        drho = central_difference(ps.state_at, beta, step)
        deriv_method = f"central_difference(h={step:.6g})"
    if drho.shape != rho.shape:
        raise PreconditionError(f"derivative shape {drho.shape} does not match state {rho.shape}")

    classical, coherent = spectral_terms(rho, drho)
    value = _clamp(classical + coherent)
    via_sld = qfi_from_sld(rho, drho)
    if abs(via_sld - value) > ROUTE_AGREEMENT_RTOL * max(value, 1e-12):
        raise NumericalError(f"spectral QFI {value!r} and SLD QFI {via_sld!r} disagree")

    record = {"beta": beta}
    record.update(inputs or {})
    return QfiResult(value, "beta", "spectral", deriv_method, record, classical, coherent)


def d_rho_d_beta_switch(beta: float, probe: ProbeSpec, control: SwitchConfig, probe_state=None) -> np.ndarray:
    """Exact ``d/dbeta`` of the full-thermalization switch output.

    Only the thermal population depends on ``beta``:
    ``d tau = diag(1, -1) dp/dbeta`` and the coherence block ``tau rho tau``
    differentiates by the product rule.
    """
    p = thermal_weight(beta, probe.gap)
    dp = thermal_weight_derivative(beta, probe.gap)
    rho = GROUND_STATE if probe_state is None else np.asarray(probe_state, dtype=complex)
    a = control.alpha
    tau = np.diag([p, 1.0 - p]).astype(complex)
    dtau = dp * _SIGMA_Z
    dcoh = math.sqrt(a * (1.0 - a)) * (dtau @ rho @ tau + tau @ rho @ dtau)
    return (
        tensor(dtau, np.diag([a, 1.0 - a]))
        + tensor(dcoh, _RAISE)
        + tensor(dcoh.conj().T, _LOWER)
    )


def switch_family(probe: ProbeSpec, control: SwitchConfig, lam: float = 1.0, probe_state=None) -> ParameterizedState:
    """Joint switch output as a function of ``beta``.

    The exact derivative is attached only at ``lam = 1``; partial
    thermalization falls back to finite differences.
    """

    def state_at(beta):
        return switch_output(probe, beta, control, lam, probe_state)

    if lam != 1.0:
        return ParameterizedState(state_at)

    def derivative_at(beta):
        return d_rho_d_beta_switch(beta, probe, control, probe_state)

    return ParameterizedState(state_at, derivative_at)


def thermal_family(probe: ProbeSpec) -> ParameterizedState:
    def state_at(beta):
        p = thermal_weight(beta, probe.gap)
        return np.diag([p, 1.0 - p]).astype(complex)

    def derivative_at(beta):
        return thermal_weight_derivative(beta, probe.gap) * _SIGMA_Z

    return ParameterizedState(state_at, derivative_at)


def _check_beta(beta: float):
    if math.isnan(beta) or beta < 0:
        raise PreconditionError(f"beta must be >= 0, got {beta}")


def qfi_switch_analytic(beta: float, probe: ProbeSpec, control: SwitchConfig) -> QfiResult:
    """Closed-form QFI of the switched qubit at full thermalization.

    ``gap² ((2 + xi) e³ + 3 e² + e) / ((1 + e)³ (1 + 2e))`` with
    ``e = exp(beta * gap)``, evaluated in ``u = 1/e``.
    """
    _check_beta(beta)
    xi = control.xi
    eps = probe.gap
    u = boltzmann_factor(beta, eps)
    value = eps * eps * u * ((2.0 + xi) + 3.0 * u + u * u) / ((1.0 + u) ** 3 * (2.0 + u))
    return QfiResult(value, "beta", "analytic", "analytic",
                     {"beta": beta, "gap": eps, "xi": xi, "lam": 1.0})


def qfi_qubit_noswitch(beta: float, probe: ProbeSpec) -> QfiResult:
    """Thermal qubit QFI, equal to the energy variance ``gap² p (1 - p)``."""
    _check_beta(beta)
    eps = probe.gap
    u = boltzmann_factor(beta, eps)
    value = eps * eps * u / (1.0 + u) ** 2
    return QfiResult(value, "beta", "analytic", "analytic",
                     {"beta": beta, "gap": eps, "xi": 0.0, "lam": 1.0})


def qfi_ho(beta: float, probe: HOProbeSpec) -> QfiResult:
    """Thermal harmonic-oscillator QFI ``gap² u / (1 - u)²``; diverges as ``beta -> 0``."""
    if not beta > 0:
        raise PreconditionError(f"oscillator QFI needs beta > 0, got {beta}")
    eps = probe.gap
    if eps <= 0:
        raise PreconditionError(f"oscillator QFI needs a positive spacing, got {eps}")
    u = boltzmann_factor(beta, eps)
    value = eps * eps * u / (1.0 - u) ** 2
    return QfiResult(value, "beta", "analytic", "analytic", {"beta": beta, "gap": eps})


def to_temperature_parameter(f_beta: QfiResult, temperature: float) -> QfiResult:
    """Reparameterize a QFI from ``beta`` to ``T = 1/beta``: ``F_T = F_beta / T**4``."""
    if not temperature > 0:
        raise PreconditionError(f"temperature must be > 0, got {temperature}")
    if f_beta.parameter != "beta":
        raise PreconditionError(f"expected a QFI for beta, got parameter {f_beta.parameter!r}")
    beta = f_beta.inputs.get("beta")
    if beta is not None and not math.isclose(beta * temperature, 1.0, rel_tol=1e-12):
        raise PreconditionError(f"temperature {temperature} is not 1/beta for beta={beta}")
    jac = temperature ** -4
    inputs = dict(f_beta.inputs, temperature=temperature)
    scale = lambda v: None if v is None else v * jac  # noqa: E731
    return QfiResult(f_beta.value * jac, "temperature", f_beta.method, f_beta.derivative_method,
                     inputs, scale(f_beta.classical), scale(f_beta.coherent))
