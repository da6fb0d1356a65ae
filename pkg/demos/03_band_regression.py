"""Band spectrum regression on a fractionally cointegrated pair.

The pair y = alpha + beta x + u has a long-memory regressor (d = 0.4)
and short-memory errors whose innovations are correlated with the
regressor's -- the textbook endogeneity that biases OLS.  Restricting the
fit to low frequencies (coarse wavelet scales, or Fourier ordinates near
the origin) shrinks that bias, and the fully modified variant removes
most of what remains.
"""

import numpy as np

from specband import BandSpec, fmnbls, nbls, ols, sim_fcoint, wbls

T, reps = 4096, 50
rows = {"ols": [], "wbls j=5:6": [], "nbls [T^.4,T^.6]": [], "fmnbls": []}
band = BandSpec.exponents(0.4, 0.6)

for r in range(reps):
    x, y, truth = sim_fcoint(beta=1.0, d=0.4, d_u=0.0, rho=0.5, n=T, seed=9000 + r)
    rows["ols"].append(ols(y, x).beta)
    rows["wbls j=5:6"].append(wbls(y, x, 5, 6, levels=6).beta)
    rows["nbls [T^.4,T^.6]"].append(nbls(y, x, band).beta)
    rows["fmnbls"].append(fmnbls(y, x, band).beta)

print(f"true beta = 1, rho = 0.5 endogeneity, {reps} replications\n")
print("estimator             mean beta    bias     sd")
for name, betas in rows.items():
    b = np.asarray(betas)
    print(f"{name:20s}  {b.mean():9.4f}  {b.mean()-1:+.4f}  {b.std():.4f}")

# one fitted object carries everything downstream code needs
x, y, _ = sim_fcoint(beta=1.0, d=0.4, d_u=0.0, rho=0.5, n=T, seed=1)
fit = wbls(y, x, 5, 6, levels=6)
print(f"\nsingle wbls fit: beta {fit.beta:.4f} (se {fit.se_beta:.4f}), "
      f"alpha {fit.alpha:+.5f}, residual d "
      f"{fit.residual_d.d_hat:.3f} ({fit.residual_d.se:.3f})")
