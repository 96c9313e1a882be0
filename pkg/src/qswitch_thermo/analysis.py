"""Optimal gaps, probe comparisons and uncertainty bounds.

Every quantity here depends on the bath and probe only through the
dimensionless ratio ``x = beta * gap = gap / T``.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .channels import ProbeSpec, SwitchConfig, boltzmann_factor
from .errors import NumericalError, PreconditionError
from .qfi import qfi_switch_analytic

ROOT_BRACKET = (2.0 + 1e-6, 10.0)
ARGMAX_BRACKET = (0.1, 20.0)
RESIDUAL_TOL = 1e-10
XTOL = 1e-12
CROSSCHECK_TOL = 1e-6
CONSISTENCY_RTOL = 1e-10

# beta * gap used in place of the beta -> 0 and beta -> inf limits
HIGH_T_X = 1e-8
LOW_T_X = 50.0

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RootResult:
    x_star: float
    residual: float
    bracket: tuple
    iterations: int
    argmax_crosscheck: float = math.nan


@dataclass(frozen=True)
class ThresholdResult:
    x_star: float
    t_threshold: float
    residual: float
    polynomial_crosscheck: float


@dataclass(frozen=True)
class PrecisionQuery:
    """Number of repeated measurements ``nu`` for a Cramér-Rao estimate."""

    nu: int = 1

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 1:
            raise PreconditionError(f"nu must be an integer >= 1, got {self.nu}")


@dataclass(frozen=True)
class TurReport:
    beta: float
    gap: float
    xi: float
    nu: int
    f_switch: float
    delta_h: float
    cramer_rao_side: float  # delta_H / sqrt(nu * F_switch)
    bound_side: float  # tur_bound / sqrt(nu)
    relative_error: float
    consistent: bool


def _check_xi(xi: float):
    if not 0.0 <= xi <= 1.0:
        raise PreconditionError(f"xi must lie in [0, 1], got {xi}")


def switch_qfi_scaled(x: float, xi: float) -> float:
    """``x² F(x)/gap²``: switched-qubit QFI at unit temperature with gap ``x``."""
    u = math.exp(-x)
    return x * x * u * ((2.0 + xi) + 3.0 * u + u * u) / ((1.0 + u) ** 3 * (2.0 + u))


def optimal_gap_condition(x: float, xi: float) -> float:
    """Stationarity condition of the switched-qubit QFI in ``x``.

    For ``xi = 0`` this is ``e^x (x - 2) - (x + 2)``. Otherwise it is the
    cross-multiplied ``xi * D(x) - N(x)`` with::

        N = (1 + e^x)(1 + 2e^x)² [(x - 2) e^x - (x + 2)]
        D = e^{2x} [(2 + 3x) + (6 + 4x) e^x + (4 - 2x) e^{2x}]

    divided by the positive factor ``(1 + e^x)^4`` so that values near the
    root are O(1). ``D`` changes sign near ``x = 2.624``; the quotient form
    ``xi = N / D`` would put a pole inside the search bracket.
    """
    e = math.exp(x)
    if xi == 0.0:
        return e * (x - 2.0) - (x + 2.0)
    num = (1.0 + e) * (1.0 + 2.0 * e) ** 2 * ((x - 2.0) * e - (x + 2.0))
    den = e * e * ((2.0 + 3.0 * x) + (6.0 + 4.0 * x) * e + (4.0 - 2.0 * x) * e * e)
    return (xi * den - num) / (1.0 + e) ** 4


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-10) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]`` by golden-section search."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bracketed_root(f: Callable[[float], float], lo: float, hi: float, what: str) -> RootResult:
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NumericalError(
            f"{what}: no sign change on [{lo}, {hi}] (f(lo)={flo:.6g}, f(hi)={fhi:.6g})"
        )
    x, info = brentq(f, lo, hi, xtol=XTOL, maxiter=200, full_output=True)
    if not info.converged:
        raise NumericalError(f"{what}: root finder did not converge ({info.flag})")
    residual = f(x)
    if abs(residual) > RESIDUAL_TOL:
        raise NumericalError(f"{what}: residual {residual:.3e} at x={x!r} exceeds {RESIDUAL_TOL}")
    return RootResult(float(x), float(residual), (lo, hi), int(info.iterations))


def solve_optimal_gap(xi: float) -> RootResult:
    """Optimal ``x* = gap / T`` for a control with coherence ``xi``.

    The root of :func:`optimal_gap_condition` is certified against the
    golden-section maximizer of :func:`switch_qfi_scaled`; the two must agree
    within 1e-6.

    Raises:
        NumericalError: when the bracket has no sign change, the residual is
            too large, or the maximizer disagrees with the root.
    """
    _check_xi(xi)
    res = _bracketed_root(lambda x: optimal_gap_condition(x, xi), *ROOT_BRACKET, what=f"optimal gap (xi={xi})")
    x_max = golden_section_max(lambda x: switch_qfi_scaled(x, xi), *ARGMAX_BRACKET)
    if abs(x_max - res.x_star) > CROSSCHECK_TOL:
        raise NumericalError(
            f"optimal gap (xi={xi}): root {res.x_star!r} and argmax {x_max!r} disagree"
        )
    return RootResult(res.x_star, res.residual, res.bracket, res.iterations, x_max)


def switch_minus_ho(x: float) -> float:
    """Maximally coherent switched qubit minus oscillator QFI, both divided by ``gap² u``."""
    u = math.exp(-x)
    return (3.0 + 3.0 * u + u * u) / ((1.0 + u) ** 3 * (2.0 + u)) - 1.0 / (1.0 - u) ** 2


def threshold_polynomial() -> np.ndarray:
    """Coefficients in ``y = e^x`` of the crossing condition, highest power first.

    Clearing denominators in ``(3y³ + 3y² + y) / ((1 + y)³ (1 + 2y)) = y / (y - 1)²``
    leaves ``y⁴ - 10y³ - 11y² - 4y = 0``.
    """
    return np.array([1.0, -10.0, -11.0, -4.0, 0.0])


def ho_threshold(probe: ProbeSpec) -> ThresholdResult:
    """Temperature below which the switched qubit beats the oscillator probe.

    The crossing ``x*`` does not depend on the gap; ``T_threshold = gap / x*``.
    The bracketed root is checked against the real root ``y > 1`` of
    :func:`threshold_polynomial`.
    """
    if not probe.gap > 0:
        raise PreconditionError(f"threshold needs a positive gap, got {probe.gap}")
    res = _bracketed_root(switch_minus_ho, *ROOT_BRACKET, what="oscillator threshold")
    roots = np.roots(threshold_polynomial())
    real = [r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 1.0]
    if len(real) != 1:
        raise NumericalError(f"expected one real root y > 1, found {real}")
    x_poly = math.log(real[0])
    if abs(x_poly - res.x_star) > CROSSCHECK_TOL:
        raise NumericalError(f"threshold root {res.x_star!r} disagrees with polynomial root {x_poly!r}")
    return ThresholdResult(res.x_star, probe.gap / res.x_star, res.residual, x_poly)


def gain_ratio(beta: float, probe: ProbeSpec, control: SwitchConfig) -> float:
    """Switched over plain qubit QFI, ``((2+xi)e³ + 3e² + e) / (2e³ + 3e² + e)``."""
    if math.isnan(beta) or beta < 0:
        raise PreconditionError(f"beta must be >= 0, got {beta}")
    u = boltzmann_factor(beta, probe.gap)
    tail = 3.0 * u + u * u
    return ((2.0 + control.xi) + tail) / (2.0 + tail)


def precision_gain_percent(chi: float) -> float:
    """Percent reduction of the temperature error implied by a QFI ratio ``chi``."""
    if not chi >= 1.0:
        raise PreconditionError(f"gain ratio must be >= 1, got {chi}")
    return 100.0 * (math.sqrt(chi) - 1.0)


def delta_h(beta: float, probe: ProbeSpec) -> float:
    """Energy spread ``gap * sqrt(p (1 - p))`` of the thermal qubit."""
    if math.isnan(beta) or beta < 0:
        raise PreconditionError(f"beta must be >= 0, got {beta}")
    u = boltzmann_factor(beta, probe.gap)
    return probe.gap * math.sqrt(u) / (1.0 + u)


def tur_bound(beta: float, probe: ProbeSpec, control: SwitchConfig) -> float:
    """Lower bound on ``delta_beta * delta_H`` for the switched probe.

    ``1 / sqrt(1 + xi / ((1 + u)(2 + u)))`` with ``u = exp(-beta * gap)``,
    i.e. ``1 / sqrt(gain_ratio)``; the value 1 is recovered at ``xi = 0``.
    """
    if math.isnan(beta) or beta < 0:
        raise PreconditionError(f"beta must be >= 0, got {beta}")
    u = boltzmann_factor(beta, probe.gap)
    return 1.0 / math.sqrt(1.0 + control.xi / ((1.0 + u) * (2.0 + u)))


def tur_limits(control: SwitchConfig) -> dict:
    """Low- and high-temperature limits of :func:`tur_bound`."""
    xi = control.xi
    return {
        "low_T": 1.0 / math.sqrt(1.0 + xi / 2.0),
        "high_T": 1.0 / math.sqrt(1.0 + xi / 6.0),
    }


def tur_consistency(beta: float, probe: ProbeSpec, control: SwitchConfig,
                    query: PrecisionQuery = PrecisionQuery()) -> TurReport:
    """Check that :func:`tur_bound` is the Cramér-Rao bound rearranged.

    Compares ``delta_H / sqrt(nu * F_switch)`` with ``tur_bound / sqrt(nu)``.

    Raises:
        NumericalError: if the two sides differ by more than 1e-10 relative.
    """
    f_sw = qfi_switch_analytic(beta, probe, control).value
    dh = delta_h(beta, probe)
    if not f_sw > 0:
        raise PreconditionError(f"switched QFI vanishes at beta={beta}, gap={probe.gap}")
    lhs = dh / math.sqrt(query.nu * f_sw)
    rhs = tur_bound(beta, probe, control) / math.sqrt(query.nu)
    rel = abs(lhs - rhs) / abs(rhs)
    report = TurReport(beta, probe.gap, control.xi, query.nu, f_sw, dh, lhs, rhs, rel,
                       rel <= CONSISTENCY_RTOL)
    if not report.consistent:
        raise NumericalError(f"uncertainty bound inconsistent with Cramér-Rao: {lhs!r} vs {rhs!r}")
    return report



def limit_betas(probe: ProbeSpec) -> dict:
    """Inverse temperatures standing in for the ``beta -> 0`` and ``beta -> inf`` limits."""
    if not probe.gap > 0:
        raise PreconditionError(f"limits need a positive gap, got {probe.gap}")
    return {"high_T": HIGH_T_X / probe.gap, "low_T": LOW_T_X / probe.gap}


def gain_ratio_limits(probe: ProbeSpec, control: SwitchConfig) -> dict:
    """:func:`gain_ratio` evaluated at the two :func:`limit_betas`."""
    betas = limit_betas(probe)
    return {k: gain_ratio(b, probe, control) for k, b in betas.items()}
