"""Numerical tolerances shared across the package."""

#: algebraic identities (products, brackets, memberships)
ALGEBRAIC_TOL = 1e-12
#: integrated trajectories (attractor convergence, re-integration)
FLOW_TOL = 1e-6
#: norm drift allowed on trajectory points
NORM_TOL = 1e-9
#: pivot threshold for numerical rank of bracket closures
RANK_TOL = 1e-9
#: smallest norm accepted by project_to_sphere
DEGENERATE_NORM = 1e-14
#: integration slack for invariance claims
INVARIANCE_TOL = 1e-3
#: chordal radius used when comparing against sampled clouds
CLOUD_DELTA = 5e-2
