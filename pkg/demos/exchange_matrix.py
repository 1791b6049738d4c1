"""Walk through the elliptic dynamical exchange matrix.

Builds the two-site matrix at a sample point, shows the permutation
limit at zero spectral argument, and spot-checks the exchange relation
and inversion identity on random draws.

Run: python3 demos/exchange_matrix.py
"""

import numpy as np

from ellgt.rmatrix import (
    DynamicalParameter,
    dybe_residual,
    random_dynamical,
    random_spectral,
    rbar_matrix,
    unitarity_residual,
)
from ellgt.theta import EllipticParams


def main() -> None:
    np.set_printoptions(precision=4, suppress=True, linewidth=120)
    params = EllipticParams(q=0.5, r=3.0, N=2)
    dyn = DynamicalParameter.from_values([0.7, 0.0])

    print("two-site exchange matrix, N=2, u=0.2, P=(0.7, 0):")
    print(rbar_matrix(params, 0.2, dyn))
    print()

    print("at u=0 the matrix is exactly the flip of the two factors:")
    print(rbar_matrix(params, 0.0, dyn).real)
    print()

    rng = np.random.default_rng(7)
    worst_exchange = 0.0
    worst_inversion = 0.0
    for N in (2, 3):
        params = EllipticParams(q=0.5, r=3.0, N=N)
        for _ in range(10):
            us = tuple(random_spectral(rng, 3))
            sample_dyn = random_dynamical(rng, params)
            worst_exchange = max(
                worst_exchange, dybe_residual(params, us, sample_dyn)
            )
            (u,) = random_spectral(rng, 1)
            worst_inversion = max(
                worst_inversion, unitarity_residual(params, u, sample_dyn)
            )
    print(f"worst exchange-relation residual over 20 draws: "
          f"{worst_exchange:.3e}")
    print(f"worst inversion residual over 20 draws:         "
          f"{worst_inversion:.3e}")


if __name__ == "__main__":
    main()
