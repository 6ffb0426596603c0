"""Simulate a faked CHSH violation on polarization-entangled photon pairs and
detect it with the loop consistency check on over-complete measurement data."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateDesign,
    EmptyRecord,
    InsufficientTrials,
    InvalidProbability,
    NotHermitian,
    NotPSD,
    SingularCorner,
)
from .measurement import WavePlateSetting, observable_from_setting  # noqa: E402
from .simulator import (  # noqa: E402
    EXACT,
    CheatPolicy,
    SettingsPlan,
    paper_cheat_policy,
    paper_plan,
    paper_settings,
    pooled_counts,
    run_trials,
)
from .spamloop import delta_from_grid, delta_statistics, trial_deltas, verdict  # noqa: E402
from .states import (  # noqa: E402
    TwoQubitState,
    WernerParams,
    fidelity,
    horodecki_report,
    m_from_params,
    maximize_chsh,
    phi_plus,
    negativity,
    rho_werner,
)
from .tomography import TomographyInput, characterize, fit_werner, reconstruct  # noqa: E402
