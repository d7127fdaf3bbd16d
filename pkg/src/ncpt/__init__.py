"""Numerical workbench for noncommutative potential theory on
finite-dimensional tracial *-algebras."""

from .algebra import (HSVector, Model, ModelError, NotRealError,
                      functional_calculus, hs_inner, meet_one,
                      modular_conjugation, negative_part, operator_norm,
                      positive_part, validate_model)
from .dirichlet import (ApproxForm, DirichletGenerator, amplify_generator,
                        amplify_model, build_generator)
from .models import (Cocycle, GroupSpec, LengthFunction,
                     build_twisted_group_algebra, coboundary_length,
                     explicit_length, load_model_file, sine2_length)
from .potentials import (FiniteEnergyFunctional, Potential, energy_content,
                         is_potential, potential_of)
from .cdc import (BimoduleVector, DerivationCalculus, GammaCalculator,
                  closed_form_gamma_potential, potential_of_gamma)
from .multipliers import MultiplierReport, multiplier_norm
from .reports import CheckReport

__version__ = "0.1.0"

__all__ = [
    "ApproxForm", "BimoduleVector", "CheckReport", "Cocycle",
    "DerivationCalculus", "DirichletGenerator", "FiniteEnergyFunctional",
    "GammaCalculator", "GroupSpec", "HSVector", "LengthFunction", "Model",
    "ModelError", "MultiplierReport", "NotRealError", "Potential",
    "amplify_generator", "amplify_model", "build_generator",
    "build_twisted_group_algebra", "closed_form_gamma_potential",
    "coboundary_length", "energy_content", "explicit_length",
    "functional_calculus", "hs_inner", "is_potential", "load_model_file",
    "meet_one", "modular_conjugation", "multiplier_norm", "negative_part",
    "operator_norm", "positive_part", "potential_of", "potential_of_gamma",
    "sine2_length", "validate_model",
]
