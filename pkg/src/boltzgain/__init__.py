"""Numerical tools for the Boltzmann gain operator and its sharp L^p bounds.

Modules:

* ``kernel``: angular kernels, the measure xi and the beta-type integrals;
* ``radial``: the one-dimensional operator B, radial norms, extremizers;
* ``spherical``: the sphere operator P on R^n, symmetrization, pairings;
* ``gain``: Q+ and Q- (direct, Carleman and Fourier routes), L^p_lambda norms;
* ``harness``: sweeps and CSV/JSON reports;
* ``cli``: the command-line entry point.
"""
from .errors import AliasingWarning, DivergentConstant, DomainError, NonIntegrable, QuadratureFailure
from .kernel import AngularKernel, BetaResult, Finiteness, XiMeasure, beta_b, finiteness_check, grad_cutoff, sphere_area, xi_density
from .quadrature import QuadratureSpec
from .radial import (ExponentTriple, RadialProfile, SigmaMeasure, bilinear_B, extremizer_pair,
                     lemma23_check, lp_norm_radial, sharpness_study)
from .report import InequalityReport
from .spherical import (NuMeasure, RotationSampler, SphereRule, VelocityFunction, lemma21_pairing,
                        lemma22_check, operator_P, post_collision_pair, radial_reduce_P,
                        random_test_triple, sphere_rule, symmetrize, symmetrization_error,
                        theorem1_check, weighted_lp_norm)
from .gain import (CollisionKernel, GridFunction, LambdaNormSpec, fourier_transform,
                   inverse_fourier_transform, lambda_norm, q0_plus_bobylev, q_minus,
                   q_plus_carleman, q_plus_direct, theorem2_check)
from .harness import SweepSpec, emit, run_sweep

__version__ = "0.1.0"
