"""Certified evaluation of Verlinde numbers, Quot-scheme intersection numbers
and Jacobi theta identities."""

from .certball import (
    Ball,
    CertificationError,
    CertifiedInteger,
    ComplexBall,
    PossiblyZeroError,
    PrecisionExhausted,
    certify_integer,
    exp_2pi_i_rational,
    two_sin_pi_rational,
)

__version__ = "0.1.0"
