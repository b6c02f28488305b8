"""Stabilizing-cycle certificates for discrete-time switched linear systems."""

from .certify import (
    Algorithm1Result,
    Certificate,
    choose_gamma,
    epsilon_bound,
    epsilon_p,
    run_algorithm1,
    theorem_lhs,
)
from .graph import (
    CycleSet,
    SwitchDigraph,
    build_digraph,
    enumerate_cycles_through,
    group_concatenable,
)
from .linalg import (
    Stability,
    SwitchedFamily,
    commutator,
    family_norm_bound,
    find_m_rho,
    make_family,
    spectral_norm,
    verify_schur,
)
from .rearrange import (
    Comm,
    Sub,
    WordSum,
    basis_constant,
    evaluate_word,
    rearrange,
    word_norm_margin,
)
from .signal_sim import (
    SwitchingSignal,
    Trajectory,
    build_signal,
    simulate,
    verify_ges,
)

__version__ = "0.1.0"
