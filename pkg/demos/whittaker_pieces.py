"""Assemble the character of pi_{N,psi} restricted to GL_2(o2), piece by piece.

Off the identity coset the character lives on Z J1 and is read off from the
J1-restriction; the identity piece is an honest induced character.  A couple of
values are re-derived by brute force from the raw induced representation.
"""
import numpy as np

from gl4whittaker.oracle import MackeyOracle, sample_central_classes
from gl4whittaker.verifier import workbench
from gl4whittaker.whittaker import WhittakerEngine

wb = workbench(3, "eq")
theta = wb.theta((0, 0, 1, 0), 2)
engine = WhittakerEngine(wb.classes, theta)
report = engine.assemble()

for piece in report.pieces:
    print(f"coset {piece.label:>8}: dim {piece.dim:3d} (counted: {piece.dim_count})")
print("total dimension", report.dimension)

mult = engine.fourier.multiplicities(report.total)
print("\nphi_B occurring in the J1-restriction:", np.count_nonzero(mult), "characters, multiplicities", sorted(set(mult[mult > 0].tolist())))

d = next(d for d in engine.omega0 if d.nonvanishing and not d.is_identity)
cls = sample_central_classes(wb.classes, 2)[1]
g = wb.classes.reps[cls]
oracle = MackeyOracle(theta, d)
print(f"\nbrute force at class {cls}, coset {d.u, d.v}:", np.round(oracle.value(g), 8))
print("closed form:                     ", np.round(engine.character(d).values[cls], 8))
