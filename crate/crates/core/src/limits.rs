//! Limit laws in the positively recurrent case.
//!
//! Subcritical: conditioned on survival, `Z⁽ⁿ⁾` converges to a
//! linear-fractional Yaglom law `LF(h̃, g̃, m̃)` with
//! `m̃ = mλ(1-μ)⁻¹`, `h̃ = (1+m)(1-μ)⁻¹ v - m g (I-M)⁻¹` and
//! `g̃ = λ⁻¹(1-μ) g (I-M)⁻¹`, while survival decays like
//! `ρⁿ (1+m)⁻¹ (1-μ) uᵗ`.
//!
//! Critical: `n⁻¹ Z⁽ⁿ⁾ | survival ⇒ X v` with `X` exponential of mean
//! `(1+m)β⁻¹`, and survival decays like `n⁻¹ (1+m)⁻¹ β uᵗ`.
//!
//! Supercritical: `ρ⁻ⁿ Z⁽ⁿ⁾ wᵗ | survival` has the exponential tail
//! `e^{-x(ρ-1)/c_w}` and survival converges to `(ρ-1)(1+m)⁻¹ β uᵗ`.
//! Throughout `c_w = (1+m) β⁻¹ v wᵗ`.

use crate::error::{Error, Result};
use crate::lf_law::LFLaw;
use crate::linalg::{self, Matrix};
use crate::model::ModelTriplet;
use crate::spectral::{Criticality, Recurrence, SpectralSummary};

const DIRECTION_TOL: f64 = 1e-12;

/// The subcritical conditional limit `Y ~ LF(h̃, g̃, m̃)`; `h̃ 1ᵗ = 1`, so
/// the limit never charges the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct YaglomLaw(pub LFLaw);

impl YaglomLaw {
    pub fn law(&self) -> &LFLaw {
        &self.0
    }
}

/// Yaglom law of a subcritical positively recurrent model.
pub fn yaglom_law(t: &ModelTriplet, sum: &SpectralSummary) -> Result<YaglomLaw> {
    require_positive(sum)?;
    if sum.criticality != Criticality::Subcritical {
        return Err(Error::Precondition(
            "Yaglom law requires the subcritical case".into(),
        ));
    }
    let v = sum.v.as_ref().expect("positive case carries v");
    let (mu, lambda, m) = (sum.mu, sum.lambda, sum.m);
    let m_tilde = m * lambda / (1.0 - mu);
    // y = g (I - M)⁻¹ via one left solve; ρ < 1 keeps I - M invertible.
    let a = t.dim();
    let m_mat = t.mean_matrix();
    let mut i_minus_m = Matrix::identity(a);
    for i in 0..a {
        for j in 0..a {
            i_minus_m.set(i, j, i_minus_m.get(i, j) - m_mat.get(i, j));
        }
    }
    let y = linalg::solve_left(&i_minus_m, t.g())?;
    let h_tilde: Vec<f64> = v
        .iter()
        .zip(&y)
        .map(|(vj, yj)| (1.0 + m) / (1.0 - mu) * vj - m * yj)
        .collect();
    let g_tilde: Vec<f64> = y.iter().map(|yj| (1.0 - mu) / lambda * yj).collect();

    let h_sum: f64 = h_tilde.iter().sum();
    let g_sum: f64 = g_tilde.iter().sum();
    if (h_sum - 1.0).abs() > 1e-10 || (g_sum - 1.0).abs() > 1e-10 {
        return Err(Error::Uncertified(format!(
            "Yaglom normalization drifted: h̃1ᵗ = {h_sum}, g̃1ᵗ = {g_sum}"
        )));
    }
    let clamp = |x: f64| x.max(0.0);
    let law = LFLaw::new(
        0.0,
        h_tilde.iter().map(|&x| clamp(x)).collect(),
        g_tilde.iter().map(|&x| clamp(x)).collect(),
        m_tilde,
    )?;
    Ok(YaglomLaw(law))
}

/// `P(Z⁽ⁿ⁾ ≠ 0) ≈ ρⁿ (1+m)⁻¹ (1-μ) uᵗ` per starting type.
pub fn subcritical_survival_asym(sum: &SpectralSummary, n: usize) -> Result<Vec<f64>> {
    require_positive(sum)?;
    if sum.criticality != Criticality::Subcritical {
        return Err(Error::Precondition("requires the subcritical case".into()));
    }
    let u = sum.u.as_ref().unwrap();
    let scale = sum.rho.powi(n as i32) * (1.0 - sum.mu) / (1.0 + sum.m);
    Ok(u.iter().map(|ui| scale * ui).collect())
}

/// How the population is rescaled in a conditional limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `Z⁽ⁿ⁾ wᵗ / n` (critical case).
    LinearInN,
    /// `Z⁽ⁿ⁾ wᵗ / ρⁿ` (supercritical case).
    GeometricRho,
}

/// Exponential limit of a projected population, with the survival asymptote
/// exposed alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialLimit {
    /// `c_w = (1+m) β⁻¹ v wᵗ`.
    pub c_w: f64,
    /// Tail rate: the limit tail is `e^{-rate · x}`.
    pub rate: f64,
    pub scaling: Scaling,
    pub w: Vec<f64>,
    /// Coefficient vector of the survival asymptote per starting type:
    /// critical `survival(n) ≈ coeff/n`, supercritical `survival → coeff`.
    pub survival_coeff: Vec<f64>,
}

impl ExponentialLimit {
    /// Limiting conditional tail `P(scaled projection > x | survival)`.
    pub fn tail(&self, x: f64) -> f64 {
        (-self.rate * x).exp()
    }

    /// Mean of the limiting scaled projection.
    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Critical conditional limit: `n⁻¹ Z⁽ⁿ⁾ wᵗ ⇒ X v wᵗ`, `X ~ Exp` with mean
/// `(1+m)β⁻¹`; survival decays like `n⁻¹(1+m)⁻¹ β uᵗ`.
pub fn critical_limit(sum: &SpectralSummary, w: &[f64]) -> Result<ExponentialLimit> {
    require_positive(sum)?;
    if sum.criticality != Criticality::Critical {
        return Err(Error::Precondition("requires the critical case".into()));
    }
    let c_w = direction_constant(sum, w)?;
    let u = sum.u.as_ref().unwrap();
    let scale = sum.beta / (1.0 + sum.m);
    Ok(ExponentialLimit {
        c_w,
        rate: 1.0 / c_w,
        scaling: Scaling::LinearInN,
        w: w.to_vec(),
        survival_coeff: u.iter().map(|ui| scale * ui).collect(),
    })
}

/// Supercritical conditional limit: `P(Z⁽ⁿ⁾wᵗ > ρⁿ x | survival) →
/// e^{-x(ρ-1)/c_w}`; survival converges to `(ρ-1)(1+m)⁻¹ β uᵗ`.
pub fn supercritical_limit(sum: &SpectralSummary, w: &[f64]) -> Result<ExponentialLimit> {
    require_positive(sum)?;
    if sum.criticality != Criticality::Supercritical {
        return Err(Error::Precondition("requires the supercritical case".into()));
    }
    let c_w = direction_constant(sum, w)?;
    let u = sum.u.as_ref().unwrap();
    let scale = (sum.rho - 1.0) * sum.beta / (1.0 + sum.m);
    Ok(ExponentialLimit {
        c_w,
        rate: (sum.rho - 1.0) / c_w,
        scaling: Scaling::GeometricRho,
        w: w.to_vec(),
        survival_coeff: u.iter().map(|ui| scale * ui).collect(),
    })
}

/// The three closed-form asymptotics of the associated total-size process
/// started from a `g`-distributed root.
#[derive(Debug, Clone, PartialEq)]
pub struct CmjAsymptotics {
    pub criticality: Criticality,
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub mu: f64,
}

/// Survival and conditional-limit evaluators for the total-size process.
pub fn cmj_asymptotics(sum: &SpectralSummary) -> Result<CmjAsymptotics> {
    require_positive(sum)?;
    Ok(CmjAsymptotics {
        criticality: sum.criticality,
        alpha: sum.alpha,
        beta: sum.beta,
        m: sum.m,
        mu: sum.mu,
    })
}

impl CmjAsymptotics {
    /// Survival estimate at generation `n`:
    /// `e^{αn}(1-μ)/(mβ)`, `1/(nm)`, or `(e^α - 1)/m` by criticality.
    pub fn survival(&self, n: usize) -> f64 {
        match self.criticality {
            Criticality::Subcritical => {
                (self.alpha * n as f64).exp() * (1.0 - self.mu) / (self.m * self.beta)
            }
            Criticality::Critical => 1.0 / (n as f64 * self.m),
            Criticality::Supercritical => (self.alpha.exp() - 1.0) / self.m,
        }
    }

    /// Subcritical conditional limit pmf `P(Z = k | survival) →
    /// m^{k-1}(1+m)^{-k}`, `k ≥ 1`.
    pub fn geometric_limit_pmf(&self, k: u64) -> f64 {
        debug_assert!(k >= 1);
        self.m.powi(k as i32 - 1) / (1.0 + self.m).powi(k as i32)
    }

    /// Conditional tail of the rescaled total:
    /// critical `P(Z⁽ⁿ⁾ > nx | survival) → e^{-βx/(1+m)}`,
    /// supercritical `P(Z⁽ⁿ⁾ > e^{αn}x | survival) → e^{-xβ(e^α-1)/(1+m)}`.
    pub fn scaled_tail(&self, x: f64) -> f64 {
        match self.criticality {
            Criticality::Subcritical => f64::NAN,
            Criticality::Critical => (-self.beta * x / (1.0 + self.m)).exp(),
            Criticality::Supercritical => {
                (-x * self.beta * (self.alpha.exp() - 1.0) / (1.0 + self.m)).exp()
            }
        }
    }
}

fn require_positive(sum: &SpectralSummary) -> Result<()> {
    if sum.recurrence != Recurrence::PositiveRecurrent {
        return Err(Error::Precondition(
            "limit laws require the positively recurrent case".into(),
        ));
    }
    Ok(())
}

fn direction_constant(sum: &SpectralSummary, w: &[f64]) -> Result<f64> {
    let v = sum.v.as_ref().unwrap();
    if w.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    let vw = linalg::dot(v, w);
    if vw <= DIRECTION_TOL {
        return Err(Error::Precondition(format!(
            "direction w must satisfy v wᵗ > 0, got {vw}"
        )));
    }
    Ok((1.0 + sum.m) / sum.beta * vw)
}
