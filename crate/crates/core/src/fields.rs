//! Degeneracy laws `Ψ(x, t)` and Hamiltonians `ℋ(x, ξ)`.
//!
//! The weight `Ψ` multiplies the diffusion and decides whether the equation
//! is degenerate (`Ψ → 0` with the gradient) or singular (`Ψ → ∞`). Its
//! structure is pinned by two exponents `i_Ψ <= s_Ψ` and four constants:
//! `t ↦ Ψ(x,t)/t^{i_Ψ}` is almost non-decreasing with constant `𝔏₁`,
//! `t ↦ Ψ(x,t)/t^{s_Ψ}` is almost non-increasing with constant `𝔏₂`, and
//! `𝔞 <= Ψ(x,1) <= 𝔟`. Six built-in families cover the usual laws: pure
//! powers, double-phase, their log-borderline versions, and the
//! variable-exponent variants of all three.
//!
//! The Hamiltonian carries a growth envelope `|ℋ(x,ξ)| <= ϱ(x) |ξ|^σ` with
//! `σ` inside a declared window `(c₀, c₁)`, and optionally a modulus of
//! continuity in `x`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Point;

/// Coefficient field evaluable at any point of the bounding box.
#[derive(Clone)]
pub enum ScalarField {
    Const(f64),
    /// a0 + ax*x + ay*y
    Linear(f64, f64, f64),
    /// coef * |x|^power
    RadialPower { coef: f64, power: f64 },
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl ScalarField {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            ScalarField::Const(c) => *c,
            ScalarField::Linear(a0, ax, ay) => a0 + ax * p[0] + ay * p[1],
            ScalarField::RadialPower { coef, power } => {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                coef * r.powf(*power)
            }
            ScalarField::Custom(f) => f(p),
        }
    }

    pub fn from_fn(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> ScalarField {
        ScalarField::Custom(Arc::new(f))
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Const(c) => write!(f, "Const({c})"),
            ScalarField::Linear(a, b, c) => write!(f, "Linear({a},{b},{c})"),
            ScalarField::RadialPower { coef, power } => write!(f, "RadialPower({coef},{power})"),
            ScalarField::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Vector coefficient field (drift).
#[derive(Clone)]
pub enum VectorField {
    Const([f64; 2]),
    /// coef * |x| * x
    RadialOutward { coef: f64 },
    Custom(Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>),
}

impl VectorField {
    pub fn eval(&self, p: Point) -> [f64; 2] {
        match self {
            VectorField::Const(v) => *v,
            VectorField::RadialOutward { coef } => {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                [coef * r * p[0], coef * r * p[1]]
            }
            VectorField::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Const(v) => write!(f, "Const({v:?})"),
            VectorField::RadialOutward { coef } => write!(f, "RadialOutward({coef})"),
            VectorField::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Declared structural constants of a degeneracy law.
#[derive(Clone, Copy, Debug)]
pub struct PsiConstants {
    pub i_psi: f64,
    pub s_psi: f64,
    pub l1: f64,
    pub l2: f64,
    pub a: f64,
    pub b: f64,
}

impl PsiConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.i_psi > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "i_psi = {} must exceed -1",
                self.i_psi
            )));
        }
        if self.s_psi < self.i_psi {
            return Err(Error::InvalidParameter(format!(
                "s_psi = {} must be >= i_psi = {}",
                self.s_psi, self.i_psi
            )));
        }
        if self.l1 < 1.0 || self.l2 < 1.0 {
            return Err(Error::InvalidParameter(
                "almost-monotonicity constants must be >= 1".into(),
            ));
        }
        if !(self.a > 0.0) || self.b < self.a {
            return Err(Error::InvalidParameter(
                "window constants need 0 < a <= b".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone)]
pub enum PsiKind {
    /// |t|^p
    ConstantPower { p_hat: f64 },
    /// |t|^p + a(x) |t|^q
    DoublePhase { p_hat: f64, q_hat: f64, coeff: ScalarField },
    /// |t|^p (1 + a(x) log(1+t))
    LogDoublePhase { p_hat: f64, coeff: ScalarField },
    /// |t|^{p(x)}
    VariablePower { p_hat: ScalarField },
    /// |t|^{p(x)} + a(x) |t|^{q(x)}
    VariableDoublePhase {
        p_hat: ScalarField,
        q_hat: ScalarField,
        coeff: ScalarField,
    },
    /// |t|^{p(x)} (1 + a(x) log(1+t))
    LogVariableDoublePhase { p_hat: ScalarField, coeff: ScalarField },
    Custom(Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>),
}

/// A degeneracy law together with its declared structural constants.
#[derive(Clone, Debug)]
pub struct PsiField {
    pub kind: PsiKind,
    pub constants: PsiConstants,
}

impl fmt::Debug for PsiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiKind::ConstantPower { p_hat } => write!(f, "ConstantPower({p_hat})"),
            PsiKind::DoublePhase { p_hat, q_hat, .. } => write!(f, "DoublePhase({p_hat},{q_hat})"),
            PsiKind::LogDoublePhase { p_hat, .. } => write!(f, "LogDoublePhase({p_hat})"),
            PsiKind::VariablePower { .. } => write!(f, "VariablePower"),
            PsiKind::VariableDoublePhase { .. } => write!(f, "VariableDoublePhase"),
            PsiKind::LogVariableDoublePhase { .. } => write!(f, "LogVariableDoublePhase"),
            PsiKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PsiField {
    /// Ψ ≡ 1; the non-degenerate identity law.
    pub fn one() -> PsiField {
        PsiField::constant_power(0.0)
    }

    pub fn constant_power(p_hat: f64) -> PsiField {
        PsiField {
            kind: PsiKind::ConstantPower { p_hat },
            constants: PsiConstants {
                i_psi: p_hat,
                s_psi: p_hat,
                l1: 1.0,
                l2: 1.0,
                a: 1.0,
                b: 1.0,
            },
        }
    }

    /// `coeff_range` is the range of the modulating coefficient over the
    /// domain; it feeds the `a <= Ψ(x,1) <= b` window.
    pub fn double_phase(p_hat: f64, q_hat: f64, coeff: ScalarField, coeff_range: (f64, f64)) -> PsiField {
        PsiField {
            kind: PsiKind::DoublePhase { p_hat, q_hat, coeff },
            constants: PsiConstants {
                i_psi: p_hat,
                s_psi: q_hat,
                l1: 1.0,
                l2: 1.0,
                a: 1.0 + coeff_range.0,
                b: 1.0 + coeff_range.1,
            },
        }
    }

    pub fn log_double_phase(p_hat: f64, coeff: ScalarField, coeff_range: (f64, f64)) -> PsiField {
        PsiField {
            kind: PsiKind::LogDoublePhase { p_hat, coeff },
            constants: PsiConstants {
                i_psi: p_hat,
                s_psi: p_hat + 1.0,
                l1: 1.0,
                l2: 1.0,
                // Ψ(x,1) = 1 + a(x) log 2
                a: 1.0 + coeff_range.0 * std::f64::consts::LN_2,
                b: 1.0 + coeff_range.1 * std::f64::consts::LN_2,
            },
        }
    }

    /// `p_range` is the range of the variable exponent over the domain.
    pub fn variable_power(p_hat: ScalarField, p_range: (f64, f64)) -> PsiField {
        PsiField {
            kind: PsiKind::VariablePower { p_hat },
            constants: PsiConstants {
                i_psi: p_range.0,
                s_psi: p_range.1,
                l1: 1.0,
                l2: 1.0,
                a: 1.0,
                b: 1.0,
            },
        }
    }

    pub fn variable_double_phase(
        p_hat: ScalarField,
        q_hat: ScalarField,
        coeff: ScalarField,
        exp_range: (f64, f64),
        coeff_range: (f64, f64),
    ) -> PsiField {
        PsiField {
            kind: PsiKind::VariableDoublePhase { p_hat, q_hat, coeff },
            constants: PsiConstants {
                i_psi: exp_range.0,
                s_psi: exp_range.1,
                l1: 1.0,
                l2: 1.0,
                a: 1.0 + coeff_range.0,
                b: 1.0 + coeff_range.1,
            },
        }
    }

    pub fn log_variable_double_phase(
        p_hat: ScalarField,
        coeff: ScalarField,
        p_range: (f64, f64),
        coeff_range: (f64, f64),
    ) -> PsiField {
        PsiField {
            kind: PsiKind::LogVariableDoublePhase { p_hat, coeff },
            constants: PsiConstants {
                i_psi: p_range.0,
                s_psi: p_range.1 + 1.0,
                l1: 1.0,
                l2: 1.0,
                a: 1.0 + coeff_range.0 * std::f64::consts::LN_2,
                b: 1.0 + coeff_range.1 * std::f64::consts::LN_2,
            },
        }
    }

    /// Custom law; the caller must declare all structural constants.
    pub fn custom(
        eval: impl Fn(Point, f64) -> f64 + Send + Sync + 'static,
        constants: PsiConstants,
    ) -> PsiField {
        PsiField {
            kind: PsiKind::Custom(Arc::new(eval)),
            constants,
        }
    }
}

/// Evaluate `Ψ(x, t)` for `t >= 0`.
pub fn psi_eval(field: &PsiField, x: Point, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeT(t));
    }
    Ok(match &field.kind {
        PsiKind::ConstantPower { p_hat } => powt(t, *p_hat),
        PsiKind::DoublePhase { p_hat, q_hat, coeff } => {
            powt(t, *p_hat) + coeff.eval(x) * powt(t, *q_hat)
        }
        PsiKind::LogDoublePhase { p_hat, coeff } => {
            powt(t, *p_hat) * (1.0 + coeff.eval(x) * (1.0 + t).ln())
        }
        PsiKind::VariablePower { p_hat } => powt(t, p_hat.eval(x)),
        PsiKind::VariableDoublePhase { p_hat, q_hat, coeff } => {
            powt(t, p_hat.eval(x)) + coeff.eval(x) * powt(t, q_hat.eval(x))
        }
        PsiKind::LogVariableDoublePhase { p_hat, coeff } => {
            powt(t, p_hat.eval(x)) * (1.0 + coeff.eval(x) * (1.0 + t).ln())
        }
        PsiKind::Custom(f) => f(x, t),
    })
}

/// t^e with the power-law conventions t^0 = 1 and 0^e = 0 for e > 0.
fn powt(t: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        t
    } else if e == 2.0 {
        t * t
    } else {
        t.powf(e)
    }
}

/// Provable lower bound implied by the structural constants:
/// `(a/L2) t^{s_Ψ}` for `t <= 1` and `(a/L1) t^{i_Ψ}` for `t > 1`.
pub fn psi_lower_bound(field: &PsiField, _x: Point, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::NonPositiveT(t));
    }
    let c = &field.constants;
    Ok(if t <= 1.0 {
        c.a / c.l2 * powt(t, c.s_psi)
    } else {
        c.a / c.l1 * powt(t, c.i_psi)
    })
}

/// One violated structural inequality, with a witness.
#[derive(Clone, Debug)]
pub enum StructuralViolation {
    ExponentOrder {
        i_psi: f64,
        s_psi: f64,
    },
    /// a <= Ψ(x,1) <= b failed.
    UnitWindow {
        x: Point,
        psi_at_one: f64,
    },
    /// Ψ(s)/s^i <= L1 Ψ(t)/t^i failed for s <= t.
    AlmostNonDecreasing {
        x: Point,
        s: f64,
        t: f64,
        lhs: f64,
        rhs: f64,
    },
    /// Ψ(t)/t^s <= L2 Ψ(s)/s^s failed for s <= t.
    AlmostNonIncreasing {
        x: Point,
        s: f64,
        t: f64,
        lhs: f64,
        rhs: f64,
    },
}

/// Report from a sample-based structural validation.
#[derive(Clone, Debug)]
pub struct StructuralReport {
    pub violations: Vec<StructuralViolation>,
    /// The factor `a / L2` used by [`psi_lower_bound`] on `t <= 1`.
    pub lower_bound_factor: f64,
    /// The factor `L2 * a` that appears in some printed statements of the
    /// same bound; identical when `L2 = 1`, otherwise not provable.
    pub printed_lower_bound_factor: f64,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Log-spaced default sample of `t` values in `[1e-3, 1e3]`.
pub fn default_t_samples(per_axis: usize) -> Vec<f64> {
    let n = per_axis.max(2);
    (0..n)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (n - 1) as f64))
        .collect()
}

/// Check the declared constants against the law on a finite sample lattice.
/// Violations are data, not errors.
pub fn validate_structural(
    field: &PsiField,
    sample_xs: &[Point],
    sample_ts: &[f64],
) -> Result<StructuralReport> {
    if sample_xs.is_empty() || sample_ts.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    let mut ts = sample_ts.to_vec();
    ts.sort_by(f64::total_cmp);
    let c = field.constants;
    let mut violations = Vec::new();
    if c.i_psi <= -1.0 || c.s_psi < c.i_psi {
        violations.push(StructuralViolation::ExponentOrder {
            i_psi: c.i_psi,
            s_psi: c.s_psi,
        });
    }
    // Relative slack for the sampled inequalities; the exact laws satisfy
    // them with equality along pure powers.
    let tol = 1e-12;
    for &x in sample_xs {
        let p1 = psi_eval(field, x, 1.0)?;
        if p1 < c.a * (1.0 - tol) || p1 > c.b * (1.0 + tol) {
            violations.push(StructuralViolation::UnitWindow { x, psi_at_one: p1 });
        }
        for (si, &s) in ts.iter().enumerate() {
            if s <= 0.0 {
                return Err(Error::NonPositiveT(s));
            }
            let psi_s = psi_eval(field, x, s)?;
            for &t in &ts[si..] {
                let psi_t = psi_eval(field, x, t)?;
                let nd_lhs = psi_s / powt(s, c.i_psi);
                let nd_rhs = c.l1 * psi_t / powt(t, c.i_psi);
                if nd_lhs > nd_rhs * (1.0 + tol) + tol {
                    violations.push(StructuralViolation::AlmostNonDecreasing {
                        x,
                        s,
                        t,
                        lhs: nd_lhs,
                        rhs: nd_rhs,
                    });
                }
                let ni_lhs = psi_t / powt(t, c.s_psi);
                let ni_rhs = c.l2 * psi_s / powt(s, c.s_psi);
                if ni_lhs > ni_rhs * (1.0 + tol) + tol {
                    violations.push(StructuralViolation::AlmostNonIncreasing {
                        x,
                        s,
                        t,
                        lhs: ni_lhs,
                        rhs: ni_rhs,
                    });
                }
            }
        }
    }
    Ok(StructuralReport {
        violations,
        lower_bound_factor: c.a / c.l2,
        printed_lower_bound_factor: c.l2 * c.a,
    })
}

#[derive(Clone)]
pub enum HamiltonianKind {
    Zero,
    /// ⟨𝔅(x), ξ⟩ |ξ|^θ + ϱ(x) |ξ|^σ
    DriftPower { drift: VectorField, theta: f64 },
    /// a(x) |ξ|^θ + ϱ(x) |ξ|^σ
    TwoPower { coeff: ScalarField, theta: f64 },
    Custom(Arc<dyn Fn(Point, [f64; 2]) -> f64 + Send + Sync>),
}

impl fmt::Debug for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianKind::Zero => write!(f, "Zero"),
            HamiltonianKind::DriftPower { theta, .. } => write!(f, "DriftPower(theta={theta})"),
            HamiltonianKind::TwoPower { theta, .. } => write!(f, "TwoPower(theta={theta})"),
            HamiltonianKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Continuity data for the modulus assumption
/// `|ℋ(x,ξ) - ℋ(y,ξ)| <= ω(|x-y|) (1 + ℋ₀(|ξ|))`.
#[derive(Clone)]
pub struct ContinuityData {
    pub omega: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub h0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ContinuityData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContinuityData(..)")
    }
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub kind: HamiltonianKind,
    /// Coefficient of the |ξ|^σ term, and default growth envelope.
    pub rho: ScalarField,
    pub sigma: f64,
    /// Declared growth window 0 <= c0 < σ < c1.
    pub c0: f64,
    pub c1: f64,
    /// Envelope coefficient used by the growth check when the ϱ term alone
    /// does not dominate (drift and low-power terms); defaults to `rho`.
    pub growth_rho: Option<ScalarField>,
    pub continuity: Option<ContinuityData>,
}

impl Hamiltonian {
    pub fn zero() -> Hamiltonian {
        Hamiltonian {
            kind: HamiltonianKind::Zero,
            rho: ScalarField::Const(0.0),
            sigma: 1.0,
            c0: 0.0,
            c1: 2.0,
            growth_rho: None,
            continuity: None,
        }
    }

    pub fn drift_power(
        drift: VectorField,
        theta: f64,
        rho: ScalarField,
        sigma: f64,
        c0: f64,
        c1: f64,
    ) -> Hamiltonian {
        Hamiltonian {
            kind: HamiltonianKind::DriftPower { drift, theta },
            rho,
            sigma,
            c0,
            c1,
            growth_rho: None,
            continuity: None,
        }
    }

    pub fn two_power(
        coeff: ScalarField,
        theta: f64,
        rho: ScalarField,
        sigma: f64,
        c0: f64,
        c1: f64,
    ) -> Hamiltonian {
        Hamiltonian {
            kind: HamiltonianKind::TwoPower { coeff, theta },
            rho,
            sigma,
            c0,
            c1,
            growth_rho: None,
            continuity: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 >= 0.0 && self.c0 < self.sigma && self.sigma < self.c1) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {} must lie inside the window ({}, {})",
                self.sigma, self.c0, self.c1
            )));
        }
        Ok(())
    }
}

/// Evaluate `ℋ(x, ξ)`. Built-in kinds vanish at `ξ = 0` whenever their
/// exponents are positive (and the drift kind for any θ >= 0).
pub fn ham_eval(h: &Hamiltonian, x: Point, xi: [f64; 2]) -> f64 {
    let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    match &h.kind {
        HamiltonianKind::Zero => 0.0,
        HamiltonianKind::DriftPower { drift, theta } => {
            let b = drift.eval(x);
            (b[0] * xi[0] + b[1] * xi[1]) * powt(n, *theta) + h.rho.eval(x) * powt(n, h.sigma)
        }
        HamiltonianKind::TwoPower { coeff, theta } => {
            coeff.eval(x) * powt(n, *theta) + h.rho.eval(x) * powt(n, h.sigma)
        }
        HamiltonianKind::Custom(f) => f(x, xi),
    }
}

#[derive(Clone, Debug)]
pub struct GrowthViolation {
    pub x: Point,
    pub xi: [f64; 2],
    pub ham: f64,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub violations: Vec<GrowthViolation>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `|ℋ(x,ξ)| <= ϱ_growth(x) |ξ|^σ` on the sample set.
pub fn ham_growth_check(h: &Hamiltonian, samples: &[(Point, [f64; 2])]) -> GrowthReport {
    let env = h.growth_rho.as_ref().unwrap_or(&h.rho);
    let mut violations = Vec::new();
    for &(x, xi) in samples {
        let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let val = ham_eval(h, x, xi);
        let bound = env.eval(x) * powt(n, h.sigma);
        if val.abs() > bound * (1.0 + 1e-12) + 1e-300 {
            violations.push(GrowthViolation {
                x,
                xi,
                ham: val,
                bound,
            });
        }
    }
    GrowthReport { violations }
}

/// Check the continuity-in-x modulus on sampled pairs, when declared.
pub fn ham_continuity_check(
    h: &Hamiltonian,
    pairs: &[(Point, Point)],
    xis: &[[f64; 2]],
) -> Result<GrowthReport> {
    let cont = h.continuity.as_ref().ok_or_else(|| {
        Error::InvalidParameter("hamiltonian carries no continuity data".into())
    })?;
    let mut violations = Vec::new();
    for &(x, y) in pairs {
        let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        for &xi in xis {
            let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            let gap = (ham_eval(h, x, xi) - ham_eval(h, y, xi)).abs();
            let bound = (cont.omega)(d) * (1.0 + (cont.h0)(n));
            if gap > bound * (1.0 + 1e-12) + 1e-12 {
                violations.push(GrowthViolation {
                    x,
                    xi,
                    ham: gap,
                    bound,
                });
            }
        }
    }
    Ok(GrowthReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ORIGIN: Point = [0.0, 0.0];

    #[test]
    fn psi_eval_examples() {
        let p1 = PsiField::constant_power(1.0);
        assert_eq!(psi_eval(&p1, ORIGIN, 2.0).unwrap(), 2.0);

        let one = PsiField::one();
        for t in [0.0, 0.3, 5.0] {
            assert_eq!(psi_eval(&one, ORIGIN, t).unwrap(), 1.0);
        }

        let dp = PsiField::double_phase(1.0, 2.0, ScalarField::Const(1.0), (1.0, 1.0));
        assert_eq!(psi_eval(&dp, ORIGIN, 2.0).unwrap(), 6.0);

        assert!(psi_eval(&p1, ORIGIN, -0.1).is_err());
        // Pure power families with positive exponent vanish at the origin.
        assert_eq!(psi_eval(&p1, ORIGIN, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_examples() {
        let one = PsiField::one();
        assert_eq!(psi_lower_bound(&one, ORIGIN, 0.5).unwrap(), 1.0);

        let p1 = PsiField::constant_power(1.0);
        assert_eq!(psi_lower_bound(&p1, ORIGIN, 0.5).unwrap(), 0.5);
        assert_eq!(psi_lower_bound(&p1, ORIGIN, 3.0).unwrap(), 3.0);
        assert!(psi_lower_bound(&p1, ORIGIN, 0.0).is_err());
    }

    #[test]
    fn lower_bound_below_eval_for_all_families() {
        // p(x) = 1 + 0.25 x ranges over [0.75, 1.25] on the sampled points.
        let lin = ScalarField::Linear(1.0, 0.25, 0.0);
        let fields = [
            PsiField::constant_power(1.5),
            PsiField::double_phase(0.5, 2.0, ScalarField::Const(0.7), (0.7, 0.7)),
            PsiField::log_double_phase(1.0, ScalarField::Const(0.4), (0.4, 0.4)),
            PsiField::variable_power(lin.clone(), (0.75, 1.25)),
            PsiField::variable_double_phase(
                lin.clone(),
                ScalarField::Linear(2.0, -0.25, 0.0),
                ScalarField::Const(0.5),
                (0.75, 2.25),
                (0.5, 0.5),
            ),
            PsiField::log_variable_double_phase(lin, ScalarField::Const(0.3), (0.75, 1.25), (0.3, 0.3)),
        ];
        let xs = [[-1.0, 0.0], [0.0, 0.0], [1.0, 1.0]];
        for field in &fields {
            for &x in &xs {
                for &t in &default_t_samples(16) {
                    let lb = psi_lower_bound(field, x, t).unwrap();
                    let ev = psi_eval(field, x, t).unwrap();
                    assert!(
                        lb <= ev * (1.0 + 1e-12),
                        "{:?}: lower bound {} above value {} at t = {}",
                        field.kind,
                        lb,
                        ev,
                        t
                    );
                }
            }
        }
    }

    #[test]
    fn pure_power_homogeneity() {
        let f = PsiField::constant_power(1.7);
        for &t in &[0.2, 1.0, 3.7] {
            for &lam in &[0.5, 2.0, 11.0] {
                let lhs = psi_eval(&f, ORIGIN, lam * t).unwrap();
                let rhs = lam.powf(1.7) * psi_eval(&f, ORIGIN, t).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn validate_structural_pure_power_passes() {
        let f = PsiField::constant_power(1.0);
        let rep = validate_structural(&f, &[ORIGIN], &default_t_samples(20)).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
    }

    #[test]
    fn validate_structural_double_phase_passes() {
        // Brute-force check of both monotonicity ratios over the lattice.
        let f = PsiField::double_phase(1.0, 2.0, ScalarField::Const(1.0), (1.0, 1.0));
        assert_eq!(f.constants.i_psi, 1.0);
        assert_eq!(f.constants.s_psi, 2.0);
        assert_eq!(f.constants.a, 2.0);
        let rep = validate_structural(&f, &[ORIGIN, [0.5, 0.5]], &default_t_samples(20)).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
    }

    #[test]
    fn validate_structural_catches_wrong_s_psi() {
        // Declared s_psi = 1 for the law t^2: the almost-non-increasing
        // ratio fails with a witness s < t.
        let mut f = PsiField::constant_power(2.0);
        f.constants.s_psi = 1.0;
        let rep = validate_structural(&f, &[ORIGIN], &default_t_samples(20)).unwrap();
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, StructuralViolation::AlmostNonIncreasing { s, t, .. } if s < t)));
    }

    #[test]
    fn report_surfaces_both_lower_bound_factors() {
        let mut f = PsiField::constant_power(1.0);
        f.constants.l2 = 2.0;
        f.constants.a = 0.5;
        let rep = validate_structural(&f, &[ORIGIN], &default_t_samples(8)).unwrap();
        assert_eq!(rep.lower_bound_factor, 0.25);
        assert_eq!(rep.printed_lower_bound_factor, 1.0);
    }

    #[test]
    fn ham_eval_examples() {
        let z = Hamiltonian::zero();
        assert_eq!(ham_eval(&z, ORIGIN, [3.0, -4.0]), 0.0);

        let dp = Hamiltonian::drift_power(
            VectorField::Const([1.0, 0.0]),
            0.0,
            ScalarField::Const(0.0),
            1.0,
            0.0,
            2.0,
        );
        assert_eq!(ham_eval(&dp, ORIGIN, [2.0, 0.0]), 2.0);

        let tp = Hamiltonian::two_power(
            ScalarField::Const(1.0),
            1.0,
            ScalarField::Const(2.0),
            1.5,
            1.0,
            2.0,
        );
        assert_eq!(ham_eval(&tp, ORIGIN, [4.0, 0.0]), 4.0 + 2.0 * 8.0);
    }

    #[test]
    fn ham_vanishes_at_origin() {
        let kinds = [
            Hamiltonian::zero(),
            Hamiltonian::drift_power(
                VectorField::Const([2.0, -1.0]),
                1.0,
                ScalarField::Const(0.5),
                1.5,
                1.0,
                2.0,
            ),
            Hamiltonian::two_power(
                ScalarField::Const(0.7),
                1.0,
                ScalarField::Const(0.5),
                1.5,
                1.0,
                2.0,
            ),
        ];
        for h in &kinds {
            assert_eq!(ham_eval(h, [0.3, 0.3], [0.0, 0.0]), 0.0);
        }
    }

    #[test]
    fn growth_check_passes_and_fails() {
        let z = Hamiltonian::zero();
        let samples: Vec<(Point, [f64; 2])> = vec![(ORIGIN, [1.0, 0.0]), (ORIGIN, [0.0, 2.0])];
        assert!(ham_growth_check(&z, &samples).passed());

        // Drift with an inflated envelope passes on the sample.
        let mut dp = Hamiltonian::drift_power(
            VectorField::Const([1.0, 0.0]),
            0.0,
            ScalarField::Const(0.0),
            0.5,
            0.0,
            1.0,
        );
        let sample_xi: Vec<(Point, [f64; 2])> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&m| (ORIGIN, [m, 0.0]))
            .collect();
        // brute-force max of |H| / |xi|^sigma over the lattice
        let needed = sample_xi
            .iter()
            .map(|&(x, xi)| {
                let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                ham_eval(&dp, x, xi).abs() / n.powf(dp.sigma)
            })
            .fold(0.0f64, f64::max);
        dp.growth_rho = Some(ScalarField::Const(needed * 1.001));
        assert!(ham_growth_check(&dp, &sample_xi).passed());

        // Declared sigma below the true top exponent: violation at large |xi|.
        let tp = Hamiltonian::two_power(
            ScalarField::Const(1.0),
            0.5,
            ScalarField::Const(1.0),
            1.0,
            0.5,
            3.0,
        );
        let mut bad = tp.clone();
        bad.sigma = 0.75; // true growth has a |xi|^1 term
        let big: Vec<(Point, [f64; 2])> = [2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&m| (ORIGIN, [m, 0.0]))
            .collect();
        let rep = ham_growth_check(&bad, &big);
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|v| v.xi[0] >= 8.0));
    }

    #[test]
    fn continuity_check() {
        let h = Hamiltonian {
            kind: HamiltonianKind::TwoPower {
                coeff: ScalarField::Linear(1.0, 1.0, 0.0),
                theta: 1.0,
            },
            rho: ScalarField::Const(0.0),
            sigma: 1.5,
            c0: 1.0,
            c1: 2.0,
            growth_rho: None,
            continuity: Some(ContinuityData {
                omega: Arc::new(|d| d),
                h0: Arc::new(|n| n),
            }),
        };
        // |H(x,xi) - H(y,xi)| = |x1 - y1| |xi| <= |x-y| (1 + |xi|)
        let pairs = vec![([0.0, 0.0], [0.5, 0.0]), ([0.2, 0.1], [-0.3, 0.4])];
        let xis = vec![[1.0, 0.0], [0.0, 3.0]];
        assert!(ham_continuity_check(&h, &pairs, &xis).unwrap().passed());
    }
}
