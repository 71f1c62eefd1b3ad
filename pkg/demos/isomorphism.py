"""Compare pi_{N,psi} with Ind(theta) over a small sweep, in both ring flavours.

Run with ``python3 demos/isomorphism.py``; each line is one theta.
"""
from gl4whittaker.verifier import DEFAULT_C, DEFAULT_X, flavor_signature, verify

for flavor in ("eq", "witt"):
    for x in DEFAULT_X:
        for c in DEFAULT_C:
            r = verify(3, flavor, x, c, sub_sum_samples=0).to_dict()
            s = r["structure"]
            print(
                f"{flavor:4s} x={x} c={c}  verdict={r['verdict']}  "
                f"{s['n_constituents']} constituents, block {'irreducible' if s['block_irreducible'] else 'reducible'}, "
                f"discrepancy {r['main']['max_discrepancy']:.1e}"
            )

r = verify(3, "eq", (0, 1, 1, 0), 1, sub_sum_samples=0).to_dict()
print("\nconstituents for x=(0,1,1,0), c=1:")
for t, dim, B, central, m in flavor_signature(r["structure"]):
    print(f"  {t:12s} dim {dim:3d}  B-class {B or '-'}  central {central}")
