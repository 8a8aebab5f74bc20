//! Classification of the mean matrix and its Perron–Frobenius data.
//!
//! For an irreducible aperiodic mean matrix `M` the power series
//! `M(s) = Σ sⁿ Mⁿ` has a common convergence radius `R` (the convergence
//! parameter). The linear-fractional structure makes it explicit:
//! `R = e^{-α}` when the Malthusian parameter is finite and `R = R_f`
//! otherwise; `M` is `R`-recurrent iff `α > -∞` and `R`-positively recurrent
//! iff `β < ∞`. In the positive case `Rⁿ Mⁿ → uᵗ v` with
//!
//! - `uᵗ = (1+m) β⁻¹ Σ_{k≥1} Rᵏ Hᵏ 1ᵗ` (reproductive values),
//! - `v = m/(1+m) Σ_{k≥0} Rᵏ g Hᵏ` (stable type distribution),
//!
//! normalized so that `v uᵗ = v 1ᵗ = 1` and `g uᵗ = (1+m)/(mβ)`.

use crate::cmj::{self, MalthusResult, MalthusStatus, SeriesSum};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::ModelTriplet;

/// Residual tolerance for the eigen-identities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Default window for [`verify_limit_matrix`].
pub const DEFAULT_LIMIT_N_MAX: usize = 500;
/// Default convergence threshold for [`verify_limit_matrix`].
pub const DEFAULT_LIMIT_THRESHOLD: f64 = 1e-6;
const CRITICAL_ALPHA_TOL: f64 = 1e-10;
const SERIES_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Criticality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criticality::Subcritical => "subcritical",
            Criticality::Critical => "critical",
            Criticality::Supercritical => "supercritical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recurrence {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
}

impl std::fmt::Display for Recurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recurrence::Transient => "R-transient",
            Recurrence::NullRecurrent => "R-null-recurrent",
            Recurrence::PositiveRecurrent => "R-positive",
        })
    }
}

/// Sup-norm residuals of the defining identities, populated in the
/// positively recurrent case.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityResiduals {
    /// `‖R M uᵗ - uᵗ‖∞`
    pub eigen_u: f64,
    /// `‖R v M - v‖∞`
    pub eigen_v: f64,
    /// `|v uᵗ - 1|`
    pub vu: f64,
    /// `|v 1ᵗ - 1|`
    pub v_one: f64,
    /// `|g uᵗ - (1+m)/(mβ)|`
    pub gu: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.eigen_u
            .max(self.eigen_v)
            .max(self.vu)
            .max(self.v_one)
            .max(self.gu)
    }
}

/// Full classification of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub r: f64,
    /// Perron–Frobenius eigenvalue `ρ = 1/R` in the recurrent case.
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    /// Mean total offspring `μ = m f(1)` of the associated individual process.
    pub mu: f64,
    /// Mean life length `λ = 1 + f(1)`.
    pub lambda: f64,
    pub criticality: Criticality,
    pub recurrence: Recurrence,
    /// Right eigenvector (reproductive values), positive case only.
    pub u: Option<Vec<f64>>,
    /// Left eigenvector (stable type distribution), positive case only.
    pub v: Option<Vec<f64>>,
    pub residuals: IdentityResiduals,
}

/// Classifies a model given the Malthusian solve of its life law.
///
/// Requires an irreducible and aperiodic mean matrix; reducible or periodic
/// inputs return an error carrying the diagnostics.
pub fn classify(t: &ModelTriplet, res: &MalthusResult) -> Result<SpectralSummary> {
    let report = t.check_irreducible_aperiodic();
    if !report.irreducible {
        return Err(Error::NotIrreducible(format!(
            "zero rows {:?}, phantom types {:?}",
            report.zero_rows, report.phantoms
        )));
    }
    if !report.aperiodic {
        return Err(Error::Periodic(report.period.unwrap_or(0)));
    }
    if res.status == MalthusStatus::BoundaryUndecidable {
        return Err(Error::Uncertified(
            "Malthusian parameter undecidable from the truncated prefix".into(),
        ));
    }
    let life = cmj::life_law(t);
    let (mu, lambda) = match (life.mu(), life.lambda()) {
        (Some(mu), Some(lambda)) => (mu, lambda),
        _ => (f64::NAN, f64::NAN),
    };
    let r = res.r;
    let rho = 1.0 / r;
    let criticality = if res.alpha.is_finite() {
        if res.alpha.abs() <= CRITICAL_ALPHA_TOL {
            Criticality::Critical
        } else if res.alpha < 0.0 {
            Criticality::Subcritical
        } else {
            Criticality::Supercritical
        }
    } else if (rho - 1.0).abs() <= CRITICAL_ALPHA_TOL {
        Criticality::Critical
    } else if rho < 1.0 {
        Criticality::Subcritical
    } else {
        Criticality::Supercritical
    };
    let recurrence = if res.alpha == f64::NEG_INFINITY {
        Recurrence::Transient
    } else if res.beta.is_finite() {
        Recurrence::PositiveRecurrent
    } else {
        Recurrence::NullRecurrent
    };

    let mut summary = SpectralSummary {
        r,
        rho,
        alpha: res.alpha,
        beta: res.beta,
        m: t.m(),
        mu,
        lambda,
        criticality,
        recurrence,
        u: None,
        v: None,
        residuals: IdentityResiduals::default(),
    };
    if recurrence == Recurrence::PositiveRecurrent {
        let u = eigen_u(t, r, res.beta)?;
        let v = eigen_v(t, r)?;
        let m_mat = t.mean_matrix();
        let ones = vec![1.0; t.dim()];
        let mu_col: Vec<f64> = m_mat.mat_vec(&u).iter().map(|x| x * r).collect();
        let vm: Vec<f64> = linalg::vec_mat(&v, &m_mat).iter().map(|x| x * r).collect();
        let residuals = IdentityResiduals {
            eigen_u: linalg::sup_diff(&mu_col, &u),
            eigen_v: linalg::sup_diff(&vm, &v),
            vu: (linalg::dot(&v, &u) - 1.0).abs(),
            v_one: (linalg::dot(&v, &ones) - 1.0).abs(),
            gu: (linalg::dot(t.g(), &u) - (1.0 + t.m()) / (t.m() * res.beta)).abs(),
        };
        if residuals.max() > IDENTITY_TOL {
            return Err(Error::Uncertified(format!(
                "eigen-identity residual {:.3e} exceeds {IDENTITY_TOL:.0e}",
                residuals.max()
            )));
        }
        summary.u = Some(u);
        summary.v = Some(v);
        summary.residuals = residuals;
    }
    Ok(summary)
}

/// Convenience: life law, Malthusian solve and classification in one call.
pub fn classify_model(t: &ModelTriplet) -> Result<SpectralSummary> {
    let life = cmj::life_law(t);
    let res = life.malthus();
    classify(t, &res)
}

/// Right eigenvector `uᵗ = (1+m) β⁻¹ Σ_{k≥1} Rᵏ Hᵏ 1ᵗ`.
pub fn eigen_u(t: &ModelTriplet, r: f64, beta: f64) -> Result<Vec<f64>> {
    if !beta.is_finite() || !r.is_finite() {
        return Err(Error::Precondition(
            "eigen_u needs finite R and beta".into(),
        ));
    }
    let ones = vec![1.0; t.dim()];
    let mut term: Vec<f64> = t.h().mat_vec(&ones).iter().map(|x| x * r).collect();
    let mut acc = vec![0.0; t.dim()];
    sum_vector_series(&mut acc, &mut term, |v| {
        t.h().mat_vec(v).iter().map(|x| x * r).collect()
    })?;
    let scale = (1.0 + t.m()) / beta;
    Ok(acc.iter().map(|x| x * scale).collect())
}

/// Left eigenvector `v = m/(1+m) Σ_{k≥0} Rᵏ g Hᵏ`.
pub fn eigen_v(t: &ModelTriplet, r: f64) -> Result<Vec<f64>> {
    if !r.is_finite() {
        return Err(Error::Precondition("eigen_v needs finite R".into()));
    }
    let mut acc = vec![0.0; t.dim()];
    let mut term = t.g().to_vec();
    sum_vector_series(&mut acc, &mut term, |v| {
        linalg::vec_mat(v, t.h()).iter().map(|x| x * r).collect()
    })?;
    let scale = t.m() / (1.0 + t.m());
    Ok(acc.iter().map(|x| x * scale).collect())
}

/// Accumulates `Σ termₖ` where `step` maps one term to the next, stopping
/// once a geometric tail estimate certifies convergence. The contraction
/// ratio is taken as the worst over a recent window so a single small step
/// of a non-monotone series cannot end the summation early.
fn sum_vector_series(
    acc: &mut [f64],
    term: &mut Vec<f64>,
    step: impl Fn(&Vec<f64>) -> Vec<f64>,
) -> Result<()> {
    let mut recent = [f64::INFINITY; 4];
    let mut prev_norm = f64::INFINITY;
    for k in 0..SERIES_CAP {
        for (a, &x) in acc.iter_mut().zip(term.iter()) {
            *a += x;
        }
        let acc_norm = acc.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let norm = term.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm == 0.0 {
            return Ok(());
        }
        recent[k % recent.len()] = norm / prev_norm;
        let ratio_raw = recent.iter().fold(0.0f64, |m, &r| m.max(r));
        if ratio_raw.is_finite() {
            let ratio = ratio_raw.min(0.999_999);
            if norm * ratio / (1.0 - ratio) < 1e-14 * acc_norm.max(1e-300) {
                return Ok(());
            }
        }
        if norm > 1e280 {
            return Err(Error::Uncertified("divergent vector series".into()));
        }
        prev_norm = norm;
        *term = step(term);
    }
    Err(Error::Uncertified(
        "vector series did not converge within the iteration cap".into(),
    ))
}

/// `H(s) = Σ_{k≥0} sᵏ Hᵏ`, accumulated to machine tail.
pub fn h_series(t: &ModelTriplet, s: f64) -> Result<Matrix> {
    let a = t.dim();
    let mut acc = Matrix::identity(a);
    let mut term = Matrix::identity(a);
    let mut recent = [f64::INFINITY; 4];
    let mut prev_norm = f64::INFINITY;
    for k in 0..SERIES_CAP {
        term = term.mul(t.h()).scaled(s);
        let norm = term.sup_norm();
        if norm == 0.0 {
            return Ok(acc);
        }
        acc.add_assign(&term);
        recent[k % recent.len()] = norm / prev_norm;
        let ratio_raw = recent.iter().fold(0.0f64, |m, &r| m.max(r));
        if ratio_raw.is_finite() {
            let ratio = ratio_raw.min(0.999_999);
            if norm * ratio / (1.0 - ratio) < 1e-14 * acc.sup_norm().max(1e-300) {
                return Ok(acc);
            }
        }
        if norm > 1e280 {
            return Err(Error::Uncertified("H(s) diverges".into()));
        }
        prev_norm = norm;
    }
    Err(Error::Uncertified(
        "H(s) did not converge within the iteration cap".into(),
    ))
}

/// Value of the matrix power series `M(s) = Σ sⁿ Mⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub enum MSeries {
    Finite(Matrix),
    /// `m f(s) ≥ 1`: every entry diverges.
    Divergent,
}

/// Closed form `M(s) = H(s) + m/(1-mf(s)) (H(s)-I) 1ᵗ g H(s)`; element-wise
/// finite exactly when `m f(s) < 1`.
pub fn mseries(t: &ModelTriplet, s: f64) -> Result<MSeries> {
    if s < 0.0 {
        return Err(Error::InvalidArgument("mseries needs s >= 0".into()));
    }
    if s == 0.0 {
        return Ok(MSeries::Finite(Matrix::identity(t.dim())));
    }
    let life = cmj::life_law(t);
    let mf = match life.f_eval(s) {
        SeriesSum::Finite { value, remainder } => {
            let lo = t.m() * value;
            let hi = t.m() * (value + remainder);
            if lo >= 1.0 {
                return Ok(MSeries::Divergent);
            }
            if hi >= 1.0 {
                return Err(Error::Uncertified(format!(
                    "m f({s}) straddles 1 within its certification"
                )));
            }
            t.m() * (value + 0.5 * remainder)
        }
        SeriesSum::Divergent => return Ok(MSeries::Divergent),
        SeriesSum::Undecided => {
            return Err(Error::Uncertified(format!(
                "f({s}) undecidable from the truncated prefix"
            )))
        }
    };
    let hs = h_series(t, s)?;
    let ones = vec![1.0; t.dim()];
    // (H(s) - I) 1ᵗ
    let col: Vec<f64> = hs
        .mat_vec(&ones)
        .iter()
        .map(|x| x - 1.0)
        .collect();
    let row = linalg::vec_mat(t.g(), &hs);
    let mut out = linalg::outer(&col, &row).scaled(t.m() / (1.0 - mf));
    out.add_assign(&hs);
    Ok(MSeries::Finite(out))
}

/// Renewal recursion and its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalOutcome {
    /// `B(1)/A'(1)`; zero if the mean diverges.
    pub limit: f64,
    /// `tₙ` from `tₙ = bₙ + Σ_{k≤n} aₖ tₙ₋ₖ`.
    pub t: Vec<f64>,
}

/// Solves the discrete renewal equation `T(s) = B(s)/(1-A(s))` for a
/// probability sequence `a` (aperiodic, `Σa = 1`) and a summable nonnegative
/// `b`, returning `tₙ → B(1)/A'(1)`.
pub fn renewal_limit(a: &[f64], b: &[f64], n_max: usize) -> Result<RenewalOutcome> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty renewal sequence".into()));
    }
    let a0 = a[0];
    if a0 >= 1.0 {
        return Err(Error::InvalidArgument("a0 must be < 1".into()));
    }
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "a must be a probability sequence, sums to {total}"
        )));
    }
    if a.iter().any(|&x| x < 0.0) || b.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidArgument("negative renewal coefficients".into()));
    }
    let b_total: f64 = b.iter().sum();
    if b_total <= 0.0 || !b_total.is_finite() {
        return Err(Error::InvalidArgument(
            "b must have positive finite total".into(),
        ));
    }
    let mut g = 0usize;
    for (n, &an) in a.iter().enumerate().skip(1) {
        if an > 0.0 {
            g = gcd(g, n);
        }
    }
    if g != 1 {
        return Err(Error::Precondition(format!(
            "periodic renewal sequence (gcd of support = {g})"
        )));
    }
    let a_mean: f64 = a.iter().enumerate().map(|(n, &an)| n as f64 * an).sum();
    let limit = if a_mean.is_finite() && a_mean > 0.0 {
        b_total / a_mean
    } else {
        0.0
    };
    let mut t = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut conv = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            conv += a[k] * t[n - k];
        }
        let bn = b.get(n).copied().unwrap_or(0.0);
        t.push((bn + conv) / (1.0 - a0));
    }
    Ok(RenewalOutcome { limit, t })
}

/// Convergence record of `‖Rⁿ Mⁿ - uᵗv‖∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub sup_errors: Vec<f64>,
    /// First `n` (1-based) where the error fell below the threshold.
    pub converged_at: Option<usize>,
    pub final_error: f64,
    pub threshold: f64,
}

/// Tracks `Rⁿ Mⁿ → uᵗ v` for n = 1..n_max; the defaults elsewhere are
/// `n_max = 500`, `threshold = 1e-6`.
pub fn verify_limit_matrix(
    t: &ModelTriplet,
    sum: &SpectralSummary,
    n_max: usize,
    threshold: f64,
) -> Result<ConvergenceReport> {
    let (u, v) = match (&sum.u, &sum.v) {
        (Some(u), Some(v)) => (u, v),
        _ => {
            return Err(Error::Precondition(
                "limit matrix requires the positively recurrent case".into(),
            ))
        }
    };
    let target = linalg::outer(u, v);
    let rm = t.mean_matrix().scaled(sum.r);
    let mut pow = Matrix::identity(t.dim());
    let mut sup_errors = Vec::with_capacity(n_max);
    let mut converged_at = None;
    for n in 1..=n_max {
        pow = pow.mul(&rm);
        let err = pow.max_abs_diff(&target);
        if err < threshold && converged_at.is_none() {
            converged_at = Some(n);
        }
        sup_errors.push(err);
    }
    let final_error = sup_errors.last().copied().unwrap_or(f64::NAN);
    Ok(ConvergenceReport {
        sup_errors,
        converged_at,
        final_error,
        threshold,
    })
}

/// `β` recomputed through the matrix identity
/// `m g H(R) (H(R) - I) 1ᵗ = m Σ n Rⁿ g Hⁿ 1ᵗ`.
pub fn beta_via_h_series(t: &ModelTriplet, r: f64) -> Result<f64> {
    let hs = h_series(t, r)?;
    let ones = vec![1.0; t.dim()];
    let col: Vec<f64> = hs.mat_vec(&ones).iter().map(|x| x - 1.0).collect();
    let inner = hs.mat_vec(&col);
    Ok(t.m() * linalg::dot(t.g(), &inner))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
