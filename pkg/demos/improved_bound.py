"""Undo a disguise by class reduction, then certify the improved separation bound.

Run: python demos/improved_bound.py
"""

from conjsep import AlgebraicNumber, SigmaSet, compute_embeddings, normalize, reduce_class, transform_poly, verify_lemma33

base = normalize([-3, 1, 0, 0, 1])  # x^4 + x - 3
disguised = transform_poly(base, (3, 7, 2, 5))
start = AlgebraicNumber(compute_embeddings(disguised, 128))
res = reduce_class(start)
print(f"start   {start.poly}  M ~ {res.M_start.mid_float():.6g}")
print(f"reduced {res.number.poly}  M ~ {res.M.mid_float():.6g}  via {res.matrix}")
for line in res.trace:
    print("  ", line)

# labels 1, 2 are real and 3, 4 a complex pair; the last sigma omits a real label and is rejected
for sigma in (SigmaSet((1, 2)), SigmaSet((1, 2, 3)), SigmaSet((2, 3, 4))):
    try:
        rep = verify_lemma33(start.embset, res.matrix, sigma)
    except ValueError as exc:
        print(f"sigma {{{sigma}}}: {exc}")
        continue
    print(f"sigma {{{sigma}}}: {rep.verdict.value} ({len(rep.links)} links, shape {rep.info['shape']})")
