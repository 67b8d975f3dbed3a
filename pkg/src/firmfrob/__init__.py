"""Exact verification of firm Frobenius bundles: non-unital algebras carrying a
compatible counital comultiplication, with their modules and comodules."""

from .algcore import AlgebraData, LocalUnitFamily
from .coalgcore import CoalgebraData
from .errors import DegeneracyLeak, FirmFrobError, ParseError, Refused, UsageError
from .exactla import LinMap, Vec
from .fields import GF, QQ, FieldSpec
from .frobcore import FrobeniusBundle, MultiplierPair
from .modcomod import ComoduleData, ModuleData
from .report import CheckReport, Witness
from .suite import run_suite

__version__ = "0.1.0"

__all__ = [
    "AlgebraData", "CheckReport", "CoalgebraData", "ComoduleData", "DegeneracyLeak", "FieldSpec",
    "FirmFrobError", "FrobeniusBundle", "GF", "LinMap", "LocalUnitFamily", "ModuleData", "MultiplierPair",
    "ParseError", "QQ", "Refused", "UsageError", "Vec", "Witness", "run_suite",
]
