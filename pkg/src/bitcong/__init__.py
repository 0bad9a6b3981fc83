"""Congruence invariants for bit-blasted machine instruction sequences."""

from .blast import Relation, blast_instruction, blast_program, compose, identity_relation
from .domain import NamedBitOrder, compose_abstract, describes, encode_negation, from_model, merge
from .fixpoint import analyze
from .inference import infer, infer_io
from .machine import Cfg, Instruction, ParseError, Program, WordSpec, concrete_step, parse_program
from .modlin import (
    AffineSpace,
    CongruenceSystem,
    constraints_of,
    howell_form,
    intersect,
    nullspace,
    project,
    space_of,
)
from .sat import SatBudgetExceeded, Solver, solve

__version__ = "0.1.0"
