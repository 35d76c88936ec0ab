"""Bias-annihilating, MSE-minimising weight systems for tp and tpd.

Three constraints pin the three weights: they sum to one, the effective
shrinkage coefficient hits its optimum (Q = Kx, resp. L2 = Kx), and the
weighted first-order member biases cancel.  In matrix form

    [ 1      1          1         ] [w0]   [ 1  ]
    [ 0   alpha*V1   beta-lam*V2/2] [w1] = [ Kx ]
    [ 0    B(t1)       B(t2)      ] [w2]   [ 0  ]

(two-phase: coefficients m*R1 and q - gamma*R2, biases B(t1d)/B(t2d)).  The
system is solved directly by Gaussian elimination with partial pivoting; the
printed closed forms for the weights are not used anywhere - the defining
constraints are the contract, and the returned residuals certify them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SingularSystem
from .theory import TheoryInput, theory_t1, theory_t1d, theory_t2, theory_t2d

#: A pivot below this fraction of the largest row norm flags singularity.
_PIVOT_TOL = 1e-12

_RESID_SUM_TOL = 1e-12
_RESID_OPT_TOL = 1e-10
_RESID_BIAS_TOL = 1e-10


@dataclass(frozen=True)
class WeightSolution:
    """Solved weights plus constraint-residual diagnostics.

    residual_sum  = |sum(w) - 1|
    residual_opt  = |Q - Kx|   (L2 - Kx for the two-phase system)
    residual_bias = |w1*B1 + w2*B2|
    condition_estimate = max |pivot| / min |pivot| of the elimination.
    """

    w: tuple[float, float, float]
    residual_sum: float
    residual_opt: float
    residual_bias: float
    condition_estimate: float


def _solve3(a: list[list[float]], b: list[float]) -> tuple[list[float], float]:
    """Solve a 3x3 system by Gaussian elimination with partial pivoting.

    Returns the solution and the pivot-ratio condition estimate.  Raises
    :class:`SingularSystem` when the smallest pivot falls below
    ``_PIVOT_TOL`` times the largest row norm.
    """
    a = [row[:] for row in a]
    b = b[:]
    norm = max(sum(abs(v) for v in row) for row in a)
    if norm == 0:
        raise SingularSystem("zero system matrix")
    threshold = _PIVOT_TOL * norm
    pivots: list[float] = []
    for k in range(3):
        p = max(range(k, 3), key=lambda i: abs(a[i][k]))
        if abs(a[p][k]) < threshold:
            raise SingularSystem(
                f"pivot {a[p][k]!r} in column {k} below {threshold!r}",
                rows=(tuple(a[1]), tuple(a[2])),
            )
        if p != k:
            a[k], a[p] = a[p], a[k]
            b[k], b[p] = b[p], b[k]
        pivots.append(abs(a[k][k]))
        for i in range(k + 1, 3):
            if a[i][k] != 0.0:
                lam = a[i][k] / a[k][k]
                for j in range(k, 3):
                    a[i][j] -= lam * a[k][j]
                b[i] -= lam * b[k]
    x = [0.0, 0.0, 0.0]
    for k in (2, 1, 0):
        x[k] = (b[k] - sum(a[k][j] * x[j] for j in range(k + 1, 3))) / a[k][k]
    return x, max(pivots) / min(pivots)


def _solve_constraints(a12: float, a13: float, b1: float, b2: float, kx: float) -> WeightSolution:
    matrix = [
        [1.0, 1.0, 1.0],
        [0.0, a12, a13],
        [0.0, b1, b2],
    ]
    rhs = [1.0, kx, 0.0]
    (w0, w1, w2), cond = _solve3(matrix, rhs)
    residual_sum = abs(w0 + w1 + w2 - 1.0)
    residual_opt = abs(w1 * a12 + w2 * a13 - kx)
    residual_bias = abs(w1 * b1 + w2 * b2)
    bias_scale = max(1.0, abs(b1), abs(b2))
    if (
        residual_sum > _RESID_SUM_TOL
        or residual_opt > _RESID_OPT_TOL * max(1.0, abs(kx))
        or residual_bias > _RESID_BIAS_TOL * bias_scale
    ):
        raise SingularSystem(
            f"solution residuals exceed bounds (sum={residual_sum!r}, opt={residual_opt!r}, "
            f"bias={residual_bias!r}); system too ill-conditioned",
            rows=(tuple(matrix[1]), tuple(matrix[2])),
        )
    return WeightSolution(
        w=(w0, w1, w2),
        residual_sum=residual_sum,
        residual_opt=residual_opt,
        residual_bias=residual_bias,
        condition_estimate=cond,
    )


def solve_weights(ti: TheoryInput) -> WeightSolution:
    """Solve the single-phase weight system for tp.

    The member biases enter with their full Ybar*f1 scaling; the solution is
    invariant under any common rescaling of that row.
    """
    c, sh = ti.cfg, ti.shape
    return _solve_constraints(
        a12=c.alpha * sh.V1,
        a13=c.beta - c.lam * sh.V2 / 2.0,
        b1=theory_t1(ti).bias,
        b2=theory_t2(ti).bias,
        kx=ti.moments.Kx,
    )


def solve_weights_two_phase(ti: TheoryInput) -> WeightSolution:
    """Solve the two-phase weight system for tpd."""
    c, sh = ti.cfg, ti.shape
    ti.factors.require_two_phase()
    return _solve_constraints(
        a12=c.m * sh.R1,
        a13=c.q - c.gamma * sh.R2,
        b1=theory_t1d(ti).bias,
        b2=theory_t2d(ti).bias,
        kx=ti.moments.Kx,
    )
