"""Equilibria, stability and dynamics of a three-stage anaerobic digestion chemostat."""
from .kinetics import Haldane, Linear, Monod, BreakEven, lambda1, lambda2_pair, h_functions
from .model import HydrolysisMode, ModelParams, RemovalRates, State, removal_rates, rhs
from .equilibria import (EquilibriumLabel, EquilibriumRecord, MultiplicityReport,
                         equilibria, equilibria_biomass, equilibria_firstorder, multiplicity)
from .stability import Verdict, StabilityVerdict, classify, jacobian, routh_report
from .simulate import SimConfig, Trajectory, integrate, check_omega, detect_convergence

__version__ = "0.1.0"
