"""Pivotal sampling on [-1, 1] for polynomial regression.

Cells of equal leverage mass crowd towards the endpoints, one point is drawn
per cell, and the weighted point set integrates squared polynomials with an
error that falls roughly like 1/k.
"""
import numpy as np

from levpivot import RngState
from levpivot.continuum import (
    LeverageDensity,
    build_partition,
    embedding_error,
    fit_polynomial,
    sample_continuum,
    tau,
)
from levpivot.features import legendre_normalized

d = 6
dens = LeverageDensity(d)
print("tau at 0, 0.5, 1:", np.round(tau(dens, np.array([0.0, 0.5, 1.0])), 3))

part = build_partition(dens, 14)
print("cell widths:", np.round(part.widths, 3))

coeffs = np.random.default_rng(0).standard_normal(d + 1)
for mult in (5, 10, 20, 40, 80):
    k = mult * (d + 1)
    part = build_partition(dens, k)
    errs = [embedding_error(dens, sample_continuum(dens, part, RngState(s)), coeffs) for s in range(50)]
    print(f"k = {k:4d}: median relative error {np.median(errs):.2e}")

# fitting a smooth function from 30 well-placed samples
pts = sample_continuum(dens, build_partition(dens, 30), RngState(7))
sol = fit_polynomial(dens, pts, np.exp(pts))
t = np.linspace(-1, 1, 401)
print("max |fit - exp| on a fine grid:", f"{np.max(np.abs(legendre_normalized(t, d) @ sol.coefficients - np.exp(t))):.2e}")
