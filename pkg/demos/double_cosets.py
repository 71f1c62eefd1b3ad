"""Walk through the double cosets T\\G/P for one regular elliptic x at q = 3.

Each representative A(u, v) carries a 2x2 matrix L over F_q; the piece of the
Whittaker space attached to it vanishes exactly when det L = 0.
"""
from gl4whittaker.cosets import CosetGeometry, grassmann_orbit_oracle
from gl4whittaker.verifier import workbench

wb = workbench(3, "eq")
x = wb.element((0, 1, 1, 0))
geom = CosetGeometry(x)

print("x =", x.coords, " X1 scalar:", x.X1_scalar)
print("X1 =", x.X1.tolist(), " X2 =", x.X2.tolist(), " X3 =", x.X3.tolist())

omega0 = geom.build_omega0()
print(f"\n{len(omega0)} double cosets (q + 1 = {wb.q + 1}):")
for d in omega0:
    B = d.calB.tolist() if d.nonvanishing else None
    print(f"  (u, v) = ({d.u}, {d.v})  det L = {d.det_L}  calB = {B}  {d.calB_type if B else 'vanishes'}")

# the same partition, seen as F_{q^4}^x-orbits on 2-planes in F_q^4
oracle = grassmann_orbit_oracle(wb.tower)
print("\nGr(4, 2) has", oracle.n_points, "points in orbits of sizes", sorted(oracle.orbit_sizes))
print("C-relation labels:   ", geom.c_partition().tolist())
print("Grassmannian labels: ", oracle.omega_labels.tolist())
