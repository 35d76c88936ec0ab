"""First-order bias, MSE, minimum-MSE and relative-efficiency formulas.

All expressions are Taylor expansions of the estimators in the relative
errors of the sample means, truncated after the terms whose expectation is
O(1/n).  Writing f1 = 1/n - 1/N and, for two-phase designs, f3 = 1/n - 1/n',
the single-phase family results are

    B(t1)   = Ybar * f1 * Cx^2 * (alpha*(alpha+1)*V1^2/2 - alpha*V1*Kx)
    MSE(t1) = Ybar^2 * f1 * (Cy^2 + Cx^2*(alpha^2*V1^2 - 2*alpha*V1*Kx))

    B(t2)   = Ybar * f1 * Cx^2 * (lam*V2*beta/2 - beta*(beta-1)/2
              - lam*(lam+2)*V2^2/8 - beta*Kx + lam*V2*Kx/2)
    MSE(t2) = Ybar^2 * f1 * (Cy^2 + Cx^2*(beta - lam*V2/2)^2
              - 2*Kx*Cx^2*(beta - lam*V2/2))

and the combined estimator tp has MSE Ybar^2*f1*(Cy^2 + Cx^2*(Q^2 - 2*Q*Kx))
with Q = w1*alpha*V1 + w2*(beta - lam*V2/2), minimised exactly at Q = Kx
where it equals the regression benchmark Ybar^2*f1*Cy^2*(1 - rho^2).

The two-phase formulas are the same brackets with f1 -> f3 on the auxiliary
terms and (alpha, V1, beta, lam, V2) -> (m, R1, q, gamma, 2*R2); both member
biases and MSEs reduce to the single-phase expressions when the first phase
is a census (f2 = 0, f3 = f1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ZeroMse
from .estimators import FamilyConfig, ShapeFactors, _weights_triple, shape_factors
from .population import FiniteFactors, PopulationMoments


@dataclass(frozen=True)
class BiasMse:
    """A first-order (bias, MSE) pair.

    The family MSE expressions are quadratic forms that can go nonpositive
    for extreme configurations; only the minimum-MSE values are sign-
    guaranteed, so no nonnegativity is enforced here.
    """

    bias: float
    mse: float


@dataclass(frozen=True)
class TheoryInput:
    """Everything the closed-form expressions need, bundled."""

    moments: PopulationMoments
    factors: FiniteFactors
    cfg: FamilyConfig
    shape: ShapeFactors

    @classmethod
    def build(cls, moments: PopulationMoments, factors: FiniteFactors, cfg: FamilyConfig) -> "TheoryInput":
        return cls(moments=moments, factors=factors, cfg=cfg, shape=shape_factors(cfg, moments.Xbar))


def _t1_bias_bracket(alpha: float, v1: float, kx: float) -> float:
    return alpha * (alpha + 1.0) * v1 * v1 / 2.0 - alpha * v1 * kx


def _t2_bias_bracket(beta: float, lam: float, v2: float, kx: float) -> float:
    return (
        lam * v2 * beta / 2.0
        - beta * (beta - 1.0) / 2.0
        - lam * (lam + 2.0) * v2 * v2 / 8.0
        - beta * kx
        + lam * v2 * kx / 2.0
    )


def theory_t1(ti: TheoryInput) -> BiasMse:
    """First-order bias and MSE of the shifted-ratio family member t1."""
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    cx2 = mo.Cx * mo.Cx
    a, v1 = c.alpha, sh.V1
    bias = mo.Ybar * fa.f1 * cx2 * _t1_bias_bracket(a, v1, mo.Kx)
    mse = mo.Ybar**2 * fa.f1 * (mo.Cy**2 + cx2 * (a * a * v1 * v1 - 2.0 * v1 * a * mo.Kx))
    return BiasMse(bias=bias, mse=mse)


def theory_t2(ti: TheoryInput) -> BiasMse:
    """First-order bias and MSE of the exponential-difference family member t2."""
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    cx2 = mo.Cx * mo.Cx
    b, lam, v2 = c.beta, c.lam, sh.V2
    bias = mo.Ybar * fa.f1 * cx2 * _t2_bias_bracket(b, lam, v2, mo.Kx)
    coef = b - lam * v2 / 2.0
    mse = mo.Ybar**2 * fa.f1 * (mo.Cy**2 + cx2 * coef * coef - 2.0 * mo.Kx * cx2 * coef)
    return BiasMse(bias=bias, mse=mse)


def theory_tp(ti: TheoryInput, weights) -> BiasMse:
    """First-order bias and MSE of the weighted combination tp.

    The bias is w1*B(t1) + w2*B(t2); the MSE depends on the weights only
    through Q = w1*alpha*V1 + w2*(beta - lam*V2/2).
    """
    _, w1, w2 = _weights_triple(weights)
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    cx2 = mo.Cx * mo.Cx
    bias = w1 * theory_t1(ti).bias + w2 * theory_t2(ti).bias
    q = w1 * c.alpha * sh.V1 + w2 * (c.beta - c.lam * sh.V2 / 2.0)
    mse = mo.Ybar**2 * fa.f1 * (mo.Cy**2 + cx2 * (q * q - 2.0 * q * mo.Kx))
    return BiasMse(bias=bias, mse=mse)


def mse_mean(moments: PopulationMoments, factors: FiniteFactors) -> float:
    """First-order (here: exact) MSE of the plain sample mean, the PRE base."""
    return moments.Ybar**2 * factors.f1 * moments.Cy**2


def min_mse_tp(moments: PopulationMoments, factors: FiniteFactors) -> float:
    """Minimum MSE of tp over the weight variety: Ybar^2*f1*Cy^2*(1 - rho^2)."""
    return moments.Ybar**2 * factors.f1 * moments.Cy**2 * (1.0 - moments.rho**2)


def theory_t1d(ti: TheoryInput) -> BiasMse:
    """First-order bias and MSE of the two-phase t1d.

    Grouping the f1/f2 terms via f3 = f1 - f2 (exact by construction), the
    bias is Ybar*f3*Cx^2*(m*(m+1)*R1^2/2 - m*R1*Kx), the single-phase t1
    bracket on the incremental factor f3.
    """
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    _, f3 = fa.require_two_phase()
    cx2 = mo.Cx * mo.Cx
    m, r1 = c.m, sh.R1
    bias = mo.Ybar * f3 * cx2 * _t1_bias_bracket(m, r1, mo.Kx)
    mse = mo.Ybar**2 * (fa.f1 * mo.Cy**2 + cx2 * f3 * (m * m * r1 * r1 - 2.0 * m * r1 * mo.Kx))
    return BiasMse(bias=bias, mse=mse)


def theory_t2d(ti: TheoryInput) -> BiasMse:
    """First-order bias and MSE of the two-phase t2d.

    With L1 = q - gamma*R2, the MSE is
    Ybar^2*(f1*Cy^2 + L1^2*f3*Cx^2 - 2*L1*f3*Kx*Cx^2); the cross term keeps
    it consistent with the combined-estimator MSE at weights (0, 0, 1).  The
    bias bracket is the single-phase t2 bracket at (q, gamma, 2*R2) on f3.
    """
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    _, f3 = fa.require_two_phase()
    cx2 = mo.Cx * mo.Cx
    q, gam, r2 = c.q, c.gamma, sh.R2
    bias = mo.Ybar * f3 * cx2 * _t2_bias_bracket(q, gam, 2.0 * r2, mo.Kx)
    l1 = q - gam * r2
    mse = mo.Ybar**2 * (fa.f1 * mo.Cy**2 + cx2 * f3 * (l1 * l1 - 2.0 * l1 * mo.Kx))
    return BiasMse(bias=bias, mse=mse)


def theory_tpd(ti: TheoryInput, weights) -> BiasMse:
    """First-order bias and MSE of the weighted two-phase combination tpd.

    Bias is h1*B(t1d) + h2*B(t2d); the MSE depends on the weights only
    through L2 = h1*m*R1 + h2*(q - gamma*R2).
    """
    _, h1, h2 = _weights_triple(weights)
    mo, fa, c, sh = ti.moments, ti.factors, ti.cfg, ti.shape
    _, f3 = fa.require_two_phase()
    cx2 = mo.Cx * mo.Cx
    bias = h1 * theory_t1d(ti).bias + h2 * theory_t2d(ti).bias
    l2 = h1 * c.m * sh.R1 + h2 * (c.q - c.gamma * sh.R2)
    mse = mo.Ybar**2 * (fa.f1 * mo.Cy**2 + cx2 * f3 * (l2 * l2 - 2.0 * l2 * mo.Kx))
    return BiasMse(bias=bias, mse=mse)


def min_mse_tpd(moments: PopulationMoments, factors: FiniteFactors) -> float:
    """Minimum MSE of tpd: Ybar^2*Cy^2*(f1 - f3*rho^2)."""
    _, f3 = factors.require_two_phase()
    return moments.Ybar**2 * moments.Cy**2 * (factors.f1 - f3 * moments.rho**2)


def pre_percent(mse_base: float, mse_est: float) -> float:
    """Percentage relative efficiency, 100 * MSE(sample mean) / MSE(estimator).

    Values above 100 mean the estimator beats the plain sample mean.
    """
    if mse_est <= 0:
        raise ZeroMse(f"PRE needs a strictly positive estimator MSE, got {mse_est}")
    return 100.0 * mse_base / mse_est


# Pinned configurations reproducing the classical estimators' first-order
# theory within the t1 family (V1 = 1 via K1=1, K3=0).


def theory_classical_ratio(moments: PopulationMoments, factors: FiniteFactors) -> BiasMse:
    """First-order bias/MSE of the classical ratio estimator (t1 at alpha=1, V1=1)."""
    cfg = FamilyConfig(K1=1.0, K2=1, K3=0.0, alpha=1.0)
    return theory_t1(TheoryInput.build(moments, factors, cfg))


def theory_exp_ratio(moments: PopulationMoments, factors: FiniteFactors) -> BiasMse:
    """First-order bias/MSE of the exponential-ratio estimator.

    Its expansion coincides with the t1 family at alpha=1/2, V1=1: both give
    ybar*(1 - e1/2 + 3*e1^2/8 + ...) in the relative error e1 of xbar.
    """
    cfg = FamilyConfig(K1=1.0, K2=1, K3=0.0, alpha=0.5)
    return theory_t1(TheoryInput.build(moments, factors, cfg))
