"""Shared randomized-fixture builders for theory/weights/acceptance tests."""

import numpy as np

import surveykit as sk


def random_moments(rng: np.random.Generator, N: int | None = None) -> sk.PopulationMoments:
    return sk.PopulationMoments.from_coefficients(
        Ybar=float(rng.uniform(2, 50)),
        Xbar=float(rng.uniform(2, 50)),
        cy=float(rng.uniform(0.05, 0.6)),
        cx=float(rng.uniform(0.05, 0.6)),
        rho=float(rng.uniform(-0.95, 0.95)),
        N=int(N if N is not None else rng.integers(20, 500)),
        beta2x=float(rng.uniform(1.5, 6.0)),
    )


def random_factors(rng: np.random.Generator, N: int, two_phase: bool = False) -> sk.FiniteFactors:
    n = int(rng.integers(2, max(3, N // 2)))
    if not two_phase:
        return sk.finite_factors(N, n)
    n_prime = int(rng.integers(n + 1, N))
    return sk.finite_factors(N, n, n_prime)


def _nonzero(rng, lo, hi, cutoff=0.1):
    while True:
        v = float(rng.uniform(lo, hi))
        if abs(v) > cutoff:
            return v


def random_config(rng: np.random.Generator) -> sk.FamilyConfig:
    return sk.FamilyConfig(
        K1=float(rng.uniform(0.2, 3.0)),
        K2=int(rng.choice([1, -1])),
        K3=float(rng.uniform(0.0, 2.0)),
        K4=float(rng.uniform(0.2, 3.0)),
        K5=float(rng.uniform(0.0, 2.0)),
        alpha=_nonzero(rng, -2, 2),
        beta=_nonzero(rng, -2, 2),
        lam=float(rng.uniform(-2, 2)),
    )


def random_theory_inputs(seed: int, count: int, two_phase: bool = False):
    """Yield ``count`` well-conditioned (TheoryInput, WeightSolution-ready) fixtures.

    Draws that produce degenerate denominators or (near-)singular weight
    systems are discarded and redrawn, so every yielded input is solvable.
    """
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < count:
        moments = random_moments(rng)
        factors = random_factors(rng, moments.N, two_phase=two_phase)
        cfg = random_config(rng)
        try:
            ti = sk.TheoryInput.build(moments, factors, cfg)
            if two_phase:
                sk.solve_weights_two_phase(ti)
            else:
                sk.solve_weights(ti)
        except (sk.DegenerateDenominator, sk.SingularSystem):
            continue
        produced += 1
        yield ti
