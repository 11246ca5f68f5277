# mixedspec/operations/__init__.py

"""
Package: operations

Numerical operations of the mixed parabolic-hyperbolic solver, bottom-up:

- quadrature: adaptive composite Gauss-Legendre integration
- basis: Dirichlet eigenpairs, projection of the forcing, decay fits
- modes: closed-form mode amplitudes and their time derivatives
- series: truncated series, tail bounds, field evaluation and tabulation
- oracle: independent references (direct seam solve, ODE steppers, finite differences)
- verify: residuals, seam jumps, integral bounds, uniqueness and convergence studies
- export: deterministic CSV and JSON rendering
- selftest: the bundled acceptance suite
"""
