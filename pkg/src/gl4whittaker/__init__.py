"""Character-level check of pi_{N,psi} = Ind(theta) for strongly cuspidal pi of GL_4(o2) at small q."""
from .classfunctions import ClassFunction, KernelFourier, induce, inner_product
from .cosets import CosetGeometry, CosetRep
from .fields import FiniteField, make_field
from .matrices import ClassTable, MatrixRing, RegularEllipticElement, enumerate_classes
from .table import CharacterTable, build_table
from .tower import RingFlavor, Tower, TowerParams, find_tower_params, tower_arith
from .verifier import VerificationReport, Workbench, sweep, theta_Pi, verify, workbench
from .whittaker import ThetaCharacter, WhittakerEngine, WhittakerReport, build_theta

__all__ = [
    "CharacterTable",
    "ClassFunction",
    "ClassTable",
    "CosetGeometry",
    "CosetRep",
    "FiniteField",
    "KernelFourier",
    "MatrixRing",
    "RegularEllipticElement",
    "RingFlavor",
    "ThetaCharacter",
    "Tower",
    "TowerParams",
    "VerificationReport",
    "WhittakerEngine",
    "WhittakerReport",
    "Workbench",
    "build_table",
    "build_theta",
    "enumerate_classes",
    "find_tower_params",
    "induce",
    "inner_product",
    "make_field",
    "sweep",
    "theta_Pi",
    "tower_arith",
    "verify",
    "workbench",
]
