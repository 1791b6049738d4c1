"""Walk through the shuffle product of symmetrized weight functions.

Multiplies one-site generators, expands the product back into the
weight function basis (the coefficient of the concatenated word is
exactly one), and verifies the expansion at an independent evaluation
point.

Run: python3 demos/shuffle_products.py
"""

import numpy as np

from ellgt.partitions import IndexPartition
from ellgt.rmatrix import random_dynamical, random_spectral
from ellgt.shuffle import (
    expansion_residual,
    from_weight_function,
    star,
    tilde_expansion,
    unit,
    star_product,
)
from ellgt.theta import EllipticParams


def main() -> None:
    params = EllipticParams(q=0.5, r=3.0, N=2)
    rng = np.random.default_rng(31)

    one = from_weight_function(params, IndexPartition.from_word("1", 2))
    two = from_weight_function(params, IndexPartition.from_word("2", 2))
    product = star(params, one, two)

    us = tuple(random_spectral(rng, 2))
    dyn = random_dynamical(rng, params)
    parts, coeffs = tilde_expansion(params, product, us, dyn)
    print("expansion of (word 1) * (word 2) in the basis:")
    for part, coeff in zip(parts, coeffs):
        print(f"  {part.word_string()}: {coeff:.6f}")
    print()

    levels = [list(random_spectral(rng, 1))]
    residual = expansion_residual(
        params, product, parts, coeffs, levels, us, dyn
    )
    print(f"re-evaluation at an independent point, residual "
          f"{residual:.3e}")
    print()

    levels = [list(random_spectral(rng, 1))]
    us1 = tuple(random_spectral(rng, 2))
    dyn1 = random_dynamical(rng, params)
    base = product.evaluate(levels, us1, dyn1)
    with_unit = star_product(params, unit(2), product, levels, us1, dyn1)
    print(f"unit law: |1 * x - x| = {abs(with_unit - base):.3e}")


if __name__ == "__main__":
    main()
