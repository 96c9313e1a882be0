"""Qubit thermometry assisted by a quantum switch.

Units are k_B = hbar = 1 throughout.
"""

from .analysis import (
    PrecisionQuery,
    RootResult,
    ThresholdResult,
    TurReport,
    delta_h,
    gain_ratio,
    gain_ratio_limits,
    ho_threshold,
    precision_gain_percent,
    solve_optimal_gap,
    tur_bound,
    tur_consistency,
    tur_limits,
)
from .channels import (
    BathSpec,
    HOProbeSpec,
    KrausChannel,
    ProbeSpec,
    SwitchConfig,
    apply_sequential,
    gad_kraus,
    switch_apply,
    switch_output_closed_form,
    thermal_state,
)
from .errors import NumericalError, PreconditionError
from .matcore import EigenDecomposition, hermitian_eig, partial_trace_control, tensor
from .qfi import (
    ParameterizedState,
    QfiResult,
    d_rho_d_beta_switch,
    qfi_ho,
    qfi_qubit_noswitch,
    qfi_spectral,
    qfi_switch_analytic,
    switch_family,
    to_temperature_parameter,
)

__version__ = "0.1.0"
