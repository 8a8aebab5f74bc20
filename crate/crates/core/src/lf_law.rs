//! Multivariate linear-fractional distributions.
//!
//! A law `LF(h, g, m)` over `a` types puts mass `h0 = 1 - Σ hᵢ` on the zero
//! vector and, for a vector `k + eᵢ`,
//!
//! `P(Z = k + eᵢ) = hᵢ · mᵏ/(1+m)^(k+1) · (k choose k₁,k₂,…) · ∏ gⱼ^(kⱼ)`,
//!
//! where `k = Σ kⱼ`. Equivalently `Z = X + (Y₁ + … + Y_N)·1{X ≠ 0}` with `X`
//! the first component (masses `h0, hᵢ`), `N` geometric with mean `m`, and
//! `Yⱼ` iid draws from `g`. The generating function is the ratio of affine
//! forms `h0 + (Σ hᵢ sᵢ)/(1 + m - m Σ gᵢ sᵢ)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling;

const NORMALIZATION_TOL: f64 = 1e-12;

/// A multivariate linear-fractional law.
#[derive(Debug, Clone, PartialEq)]
pub struct LFLaw {
    h0: f64,
    h: Vec<f64>,
    g: Vec<f64>,
    m: f64,
}

impl LFLaw {
    /// Validates `h0 + Σ hᵢ = 1`, `Σ gᵢ = 1` (to 1e-12), nonnegativity and
    /// `m > 0`.
    pub fn new(h0: f64, h: Vec<f64>, g: Vec<f64>, m: f64) -> Result<Self> {
        if h.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                got: g.len(),
            });
        }
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::InvalidModel(format!("m must be positive, got {m}")));
        }
        if h0 < -NORMALIZATION_TOL || h.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidModel("negative first-component mass".into()));
        }
        if g.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidModel("negative entry in g".into()));
        }
        let h_total: f64 = h0 + h.iter().sum::<f64>();
        if (h_total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidModel(format!(
                "h0 + sum(h) = {h_total}, expected 1"
            )));
        }
        let g_total: f64 = g.iter().sum();
        if (g_total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidModel(format!(
                "sum(g) = {g_total}, expected 1"
            )));
        }
        Ok(LFLaw { h0, h, g, m })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Generating function `E(s^Z) = h0 + (Σ hᵢsᵢ)/(1 + m - m Σ gᵢsᵢ)`.
    pub fn pgf(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: s.len(),
            });
        }
        let hs: f64 = self.h.iter().zip(s).map(|(h, s)| h * s).sum();
        let gs: f64 = self.g.iter().zip(s).map(|(g, s)| g * s).sum();
        Ok(self.h0 + hs / (1.0 + self.m - self.m * gs))
    }

    /// Probability of the outcome vector `z`.
    ///
    /// Multinomial coefficients are taken in log-space so totals of a few
    /// hundred do not overflow.
    pub fn pmf(&self, z: &[u64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let total: u64 = z.iter().sum();
        if total == 0 {
            return Ok(self.h0);
        }
        // Sum over which component carries the first daughter.
        let k_total = total - 1;
        let base = k_total as f64 * self.m.ln() - (k_total + 1) as f64 * (1.0 + self.m).ln()
            + ln_factorial(k_total);
        let mut p = 0.0;
        for i in 0..self.dim() {
            if z[i] == 0 || self.h[i] == 0.0 {
                continue;
            }
            let mut ln_term = self.h[i].ln() + base;
            let mut zero_mass = false;
            for (j, (&zj, &gj)) in z.iter().zip(&self.g).enumerate() {
                let kj = if j == i { zj - 1 } else { zj };
                if kj == 0 {
                    continue;
                }
                if gj == 0.0 {
                    zero_mass = true;
                    break;
                }
                ln_term += kj as f64 * gj.ln() - ln_factorial(kj);
            }
            if !zero_mass {
                p += ln_term.exp();
            }
        }
        Ok(p)
    }

    /// Mean vector `h + m(1 - h0) g`.
    pub fn mean(&self) -> Vec<f64> {
        let extra = self.m * (1.0 - self.h0);
        self.h
            .iter()
            .zip(&self.g)
            .map(|(h, g)| h + extra * g)
            .collect()
    }

    /// The law of `Z` given `Z ≠ 0`: a multivariate shifted geometric with
    /// generating function `((1-h0)⁻¹ Σ hⱼsⱼ)/(1 + m - m Σ gⱼsⱼ)`.
    ///
    /// The normalization divides by `Σ hⱼ` rather than `1 - h0`: the two
    /// agree for a valid law, but the row sum keeps full precision when the
    /// survival mass is tiny.
    pub fn conditional(&self) -> Result<LFLaw> {
        let h_sum: f64 = self.h.iter().sum();
        if self.h0 >= 1.0 || h_sum <= 0.0 {
            return Err(Error::NullConditioning(
                "law is degenerate at zero (h0 = 1)".into(),
            ));
        }
        LFLaw::new(
            0.0,
            self.h.iter().map(|h| h / h_sum).collect(),
            self.g.clone(),
            self.m,
        )
    }

    /// Draws via the representation `Z = X + (Y₁+…+Y_N)·1{X ≠ 0}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let mut z = vec![0u64; self.dim()];
        let mut weights = Vec::with_capacity(self.dim() + 1);
        weights.push(self.h0);
        weights.extend_from_slice(&self.h);
        let first = sampling::categorical(rng, &weights);
        if first == 0 {
            return z;
        }
        z[first - 1] += 1;
        let n = sampling::geometric(rng, self.m);
        for _ in 0..n {
            z[sampling::categorical(rng, &self.g)] += 1;
        }
        z
    }
}

/// `ln n!` by direct summation; totals here are desk-scale.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}
