"""Separation against Mahler measure for x = 1/(2^(1/3) + d).

The mixed pair (one real, one complex conjugate) decays like M^(-2/3) while
the full product decays like M^(-2).  Run: python demos/cubic_exponents.py
"""

from conjsep import AlgebraicNumber, SigmaSet, compute_embeddings, family_ad, fit_exponent, normalize

seed = AlgebraicNumber(compute_embeddings(normalize([-2, 0, 0, 1]), 128))
ds = [2 ** k for k in range(1, 15)]

for sigma in (SigmaSet((1, 2)), SigmaSet((1, 2, 3))):
    batch = family_ad(seed, ds, sigma)
    fit = fit_exponent(batch)
    print(f"sigma = {{{sigma}}}: slope {fit.slope:+.4f}, worst relative width {fit.max_rel_width:.1e}")
    for rec in batch[::4]:
        print(f"  d = {rec.parameter:>5}  log M = {rec.M.log_mid():8.3f}  log S = {rec.S_sigma.log_mid():9.3f}")
