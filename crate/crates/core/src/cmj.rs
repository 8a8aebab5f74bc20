//! The associated single-type process with overlapping generations.
//!
//! Started from a `g`-distributed particle, the total population sizes
//! `Z⁽ⁿ⁾ 1ᵗ` of a linear-fractional model form a Crump–Mode–Jagers process
//! whose individuals are the maximal first-daughter chains. Its life law has
//! tails `dₙ = P(L > n) = g Hⁿ 1ᵗ`, and at every age before death an
//! individual bears a geometric(m) number of daughters. The pair `(d, m)`
//! determines everything:
//!
//! - `f(s) = Σ dₙ sⁿ` with convergence radius `R_f`;
//! - the Malthusian parameter `α` solving `m f(e^{-α}) = 1` when
//!   `f(R_f) ≥ 1/m`, and `α = -∞` otherwise;
//! - the regeneration law `d̂ₙ = m dₙ e^{-αn}` with mean
//!   `β = m Σ n dₙ e^{-αn}`, the mean age at childbearing.
//!
//! Life laws are stored as an exact prefix plus a tail descriptor, and every
//! series evaluation either certifies its remainder or says it cannot.

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{ModelTriplet, TruncationInfo};
use crate::Matrix;

/// Residual target for the Malthusian equation.
pub const MALTHUS_RESIDUAL: f64 = 1e-12;
const SERIES_REL_TOL: f64 = 1e-15;
const PREFIX_FLOOR: f64 = 1e-250;
const PREFIX_CAP: usize = 8192;

/// How the life-length tails continue beyond the stored prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    /// `dₙ = 0` beyond the prefix.
    ZeroBeyond,
    /// `dₙ = d_N · ratioⁿ⁻ᴺ` beyond the prefix.
    Geometric { ratio: f64 },
    /// `dₙ = c · n^{-k} · e^{-γn}` beyond the prefix.
    PowerExp { c: f64, gamma: f64, k: f64 },
    /// Only `dₙ ≤ d_N · prefactor · ratio_boundⁿ⁻ᴺ` is known beyond the
    /// prefix (the bound a truncated model iteration can certify).
    Truncated { ratio_bound: f64, prefactor: f64 },
}

/// Value of a nonnegative series together with what is known about its tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesSum {
    /// Partial sum `value` underestimates the series by at most `remainder`.
    Finite { value: f64, remainder: f64 },
    Divergent,
    /// A truncated tail prevents any bound.
    Undecided,
}

impl SeriesSum {
    pub fn value(&self) -> Option<f64> {
        match self {
            SeriesSum::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    fn scaled(self, s: f64) -> SeriesSum {
        match self {
            SeriesSum::Finite { value, remainder } => SeriesSum::Finite {
                value: value * s,
                remainder: remainder * s,
            },
            other => other,
        }
    }
}

/// Convergence radius report; `exact` is false for root-test estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub exact: bool,
}

/// Life-length law of the associated individual process.
#[derive(Debug, Clone, PartialEq)]
pub struct LifeLaw {
    d: Vec<f64>,
    m: f64,
    tail: Tail,
    f1: SeriesSum,
}

impl LifeLaw {
    /// Validates `1 ≥ d₁ ≥ d₂ ≥ … ≥ 0` on the prefix and tail consistency.
    pub fn new(mut d: Vec<f64>, m: f64, tail: Tail) -> Result<Self> {
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::InvalidModel(format!("m must be positive, got {m}")));
        }
        let mut prev = 1.0;
        for (n, &dn) in d.iter().enumerate() {
            if dn < 0.0 || dn > prev + 1e-15 {
                return Err(Error::InvalidModel(format!(
                    "life tails must be nonincreasing in [0,1]; d_{} = {dn} after {prev}",
                    n + 1
                )));
            }
            prev = dn;
        }
        match tail {
            Tail::Geometric { ratio } | Tail::Truncated { ratio_bound: ratio, .. } => {
                if !(0.0..=1.0).contains(&ratio) {
                    return Err(Error::InvalidModel(format!(
                        "tail ratio {ratio} outside [0,1]"
                    )));
                }
            }
            Tail::PowerExp { c, gamma, k } => {
                if c <= 0.0 || !c.is_finite() || gamma < 0.0 || k < 0.0 {
                    return Err(Error::InvalidModel(
                        "power-exponential tail needs c > 0, gamma >= 0, k >= 0".into(),
                    ));
                }
            }
            Tail::ZeroBeyond => {}
        }
        // A prefix ending in an exact zero has an exactly-zero tail.
        let tail = if d.last() == Some(&0.0) {
            while d.len() > 1 && d[d.len() - 2] == 0.0 {
                d.pop();
            }
            Tail::ZeroBeyond
        } else {
            tail
        };
        let mut law = LifeLaw {
            d,
            m,
            tail,
            f1: SeriesSum::Divergent,
        };
        law.f1 = law.weighted_series(1.0, 0);
        Ok(law)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn prefix(&self) -> &[f64] {
        &self.d
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// `dₙ = P(L > n)` for `n ≥ 1`; `None` when a truncated tail hides it.
    pub fn d(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return Some(1.0);
        }
        if n <= self.d.len() {
            return Some(self.d[n - 1]);
        }
        let last = self.d.last().copied().unwrap_or(1.0);
        let len = self.d.len();
        match self.tail {
            Tail::ZeroBeyond => Some(0.0),
            Tail::Geometric { ratio } => Some(last * ratio.powi((n - len) as i32)),
            Tail::PowerExp { c, gamma, k } => {
                Some(c * (n as f64).powf(-k) * (-gamma * n as f64).exp())
            }
            Tail::Truncated { .. } => None,
        }
    }

    /// True when `d(n)` is computable for every `n` (needed for sampling).
    pub fn samplable(&self) -> bool {
        !matches!(self.tail, Tail::Truncated { .. })
    }

    /// `f(1) = Σ dₙ`, cached at construction.
    pub fn f1(&self) -> SeriesSum {
        self.f1
    }

    /// Mean life length `λ = 1 + f(1)`.
    pub fn lambda(&self) -> Option<f64> {
        self.f1.value().map(|v| 1.0 + v)
    }

    /// Mean total offspring `μ = m f(1)`.
    pub fn mu(&self) -> Option<f64> {
        self.f1.value().map(|v| self.m * v)
    }

    /// `f(s) = Σ_{n≥1} dₙ sⁿ` with a certified remainder where possible.
    pub fn f_eval(&self, s: f64) -> SeriesSum {
        self.weighted_series(s, 0)
    }

    /// `Σ_{n≥1} n^w dₙ sⁿ` for weight `w ∈ {0, 1}`.
    pub fn weighted_series(&self, s: f64, w: u32) -> SeriesSum {
        if s < 0.0 {
            return SeriesSum::Undecided;
        }
        if s == 0.0 {
            return SeriesSum::Finite {
                value: 0.0,
                remainder: 0.0,
            };
        }
        let mut value = 0.0;
        let mut spow = 1.0;
        for (idx, &dn) in self.d.iter().enumerate() {
            spow *= s;
            if spow > 1e300 {
                // Terms of a nonincreasing-d series at huge s: divergence is
                // decided by the tail below; the prefix alone can overflow
                // only if some dₙ > 0 keeps multiplying in.
                if dn > 0.0 {
                    return SeriesSum::Divergent;
                }
            }
            value += weight(idx as u64 + 1, w) * dn * spow;
        }
        let n0 = self.d.len() as u64; // s^n0 = spow
        let last = self.d.last().copied().unwrap_or(1.0);
        match self.tail {
            Tail::ZeroBeyond => SeriesSum::Finite {
                value,
                remainder: 0.0,
            },
            Tail::Geometric { ratio } => {
                if last == 0.0 {
                    return SeriesSum::Finite {
                        value,
                        remainder: 0.0,
                    };
                }
                let q = ratio * s;
                if q >= 1.0 {
                    return SeriesSum::Divergent;
                }
                // Σ_{j≥1} (n0+j)^w last q^j s^{n0}.
                let tail_val = match w {
                    0 => last * spow * q / (1.0 - q),
                    _ => last * spow * (n0 as f64 * q / (1.0 - q) + q / ((1.0 - q) * (1.0 - q))),
                };
                SeriesSum::Finite {
                    value: value + tail_val,
                    remainder: value.abs() * SERIES_REL_TOL,
                }
            }
            Tail::PowerExp { c, gamma, k } => {
                power_exp_tail(c, gamma, k, s, n0, w).map_finite(|tail_val, rem| {
                    SeriesSum::Finite {
                        value: value + tail_val,
                        remainder: rem + value.abs() * SERIES_REL_TOL,
                    }
                })
            }
            Tail::Truncated {
                ratio_bound,
                prefactor,
            } => {
                if last == 0.0 {
                    return SeriesSum::Finite {
                        value,
                        remainder: 0.0,
                    };
                }
                let q = ratio_bound * s;
                if q >= 1.0 {
                    return SeriesSum::Undecided;
                }
                let bound = match w {
                    0 => last * spow * q / (1.0 - q),
                    _ => last * spow * (n0 as f64 * q / (1.0 - q) + q / ((1.0 - q) * (1.0 - q))),
                };
                SeriesSum::Finite {
                    value,
                    remainder: bound * prefactor,
                }
            }
        }
    }

    /// `R_f = inf{s > 0 : f(s) = ∞}`.
    pub fn radius(&self) -> Radius {
        let all_zero = self.d.iter().all(|&x| x == 0.0);
        match self.tail {
            Tail::ZeroBeyond => Radius {
                value: f64::INFINITY,
                exact: true,
            },
            Tail::Geometric { ratio } => Radius {
                value: if ratio == 0.0 { f64::INFINITY } else { 1.0 / ratio },
                exact: true,
            },
            Tail::PowerExp { gamma, .. } => Radius {
                value: gamma.exp(),
                exact: true,
            },
            Tail::Truncated { ratio_bound, .. } => {
                if all_zero {
                    return Radius {
                        value: f64::INFINITY,
                        exact: true,
                    };
                }
                // Root test on the stored prefix, floored by the known bound.
                let n = self.d.len();
                let last = self.d[n - 1];
                let root_est = if last > 0.0 {
                    1.0 / last.powf(1.0 / n as f64)
                } else {
                    f64::INFINITY
                };
                let lower = if ratio_bound > 0.0 {
                    1.0 / ratio_bound
                } else {
                    f64::INFINITY
                };
                Radius {
                    value: root_est.max(lower),
                    exact: false,
                }
            }
        }
    }

    /// `f(R_f)`, the boundary value deciding whether `α` is finite.
    fn boundary_value(&self) -> SeriesSum {
        let rf = self.radius();
        if rf.value.is_infinite() {
            // Polynomial f: f(s) → ∞ with s unless d ≡ 0.
            return if self.d.iter().any(|&x| x > 0.0) {
                SeriesSum::Divergent
            } else {
                SeriesSum::Finite {
                    value: 0.0,
                    remainder: 0.0,
                }
            };
        }
        if !rf.exact {
            return SeriesSum::Undecided;
        }
        self.f_eval(rf.value)
    }

    /// Solves for the Malthusian parameter and the mean age at childbearing.
    ///
    /// The boundary value `m f(R_f)` is evaluated first where the tail rule
    /// makes it available: below `1` the law is transient (`α = -∞`), at `1`
    /// the root sits exactly on the boundary (`α = -ln R_f`). Only a strict
    /// interior root is chased by bracketing and bisection.
    pub fn malthus(&self) -> MalthusResult {
        let rf = self.radius();
        let phi = |s: f64| self.f_eval(s).scaled(self.m);
        let s_cap = match self.tail {
            Tail::Truncated { ratio_bound, .. } if ratio_bound > 0.0 => 1.0 / ratio_bound,
            _ => rf.value,
        };

        match self.boundary_value() {
            SeriesSum::Finite { value, remainder } => {
                let bv_lo = self.m * value;
                let bv_hi = self.m * (value + remainder);
                if bv_hi < 1.0 - 1e-13 {
                    return MalthusResult {
                        alpha: f64::NEG_INFINITY,
                        r: rf.value,
                        beta: f64::INFINITY,
                        rf,
                        status: MalthusStatus::MinusInfinity,
                        bracket: (rf.value, rf.value),
                        iterations: 0,
                        residual: 1.0 - bv_hi,
                    };
                }
                if bv_lo <= 1.0 + 1e-11 {
                    // m f(R_f) = 1 within certification: α = -ln R_f.
                    let beta = self.beta_at(rf.value);
                    return MalthusResult {
                        alpha: -rf.value.ln(),
                        r: rf.value,
                        beta,
                        rf,
                        status: MalthusStatus::Boundary,
                        bracket: (rf.value, rf.value),
                        iterations: 0,
                        residual: (bv_lo - 1.0).abs(),
                    };
                }
                // m f(R_f) > 1 strictly: fall through to the interior search.
            }
            SeriesSum::Divergent => {} // f blows up at R_f: interior root exists
            SeriesSum::Undecided => {} // truncated prefix: the scan may still certify a root
        }

        if let Some((lo, hi)) = bracket_root(&phi, s_cap) {
            let (s_star, iterations, residual) = bisect(&phi, lo, hi);
            // A solved root must carry a certified residual; when the
            // truncated tail cannot certify it, the boundary region is
            // genuinely out of reach of the stored prefix.
            if residual <= 10.0 * MALTHUS_RESIDUAL {
                let alpha = -s_star.ln();
                let beta = self.beta_at(s_star);
                return MalthusResult {
                    alpha,
                    r: s_star,
                    beta,
                    rf,
                    status: MalthusStatus::Solved,
                    bracket: (lo, hi),
                    iterations,
                    residual,
                };
            }
            return MalthusResult {
                alpha: f64::NAN,
                r: s_star,
                beta: f64::NAN,
                rf,
                status: MalthusStatus::BoundaryUndecidable,
                bracket: (lo, hi),
                iterations,
                residual,
            };
        }

        MalthusResult {
            alpha: f64::NAN,
            r: rf.value,
            beta: f64::NAN,
            rf,
            status: MalthusStatus::BoundaryUndecidable,
            bracket: (0.0, s_cap),
            iterations: 0,
            residual: f64::NAN,
        }
    }

    /// `β = m Σ n dₙ sⁿ` at `s = e^{-α}`; infinite when the series diverges.
    fn beta_at(&self, s: f64) -> f64 {
        match self.weighted_series(s, 1) {
            SeriesSum::Finite { value, remainder } => self.m * (value + remainder * 0.5),
            SeriesSum::Divergent => f64::INFINITY,
            SeriesSum::Undecided => f64::NAN,
        }
    }

    /// Regeneration law `d̂ₙ = m dₙ e^{-αn}` on the stored prefix.
    pub fn regeneration_law(&self, res: &MalthusResult) -> Result<Vec<f64>> {
        if !res.alpha.is_finite() && res.alpha != 0.0 {
            return Err(Error::NoMalthusian(
                "regeneration law needs a finite Malthusian parameter".into(),
            ));
        }
        let r = res.r;
        let mut rn = 1.0;
        Ok(self
            .d
            .iter()
            .map(|&dn| {
                rn *= r;
                self.m * dn * rn
            })
            .collect())
    }

    /// Canonical `(H, g, m)` whose life law reproduces this `d`: the particle
    /// type is the individual's age, `H[i][i+1] = d_{i+1}/d_i` (with
    /// `d₀ = 1`), `g = e₁`, and a final absorbing-age type closes the space.
    ///
    /// Infinite-support tails are embedded through the stored prefix and the
    /// truncation is recorded on the returned triplet.
    pub fn age_structure_embedding(&self) -> Result<ModelTriplet> {
        let support = self.d.iter().take_while(|&&x| x > 0.0).count();
        if support == 0 {
            return Err(Error::InvalidModel(
                "age-structure embedding needs d1 > 0".into(),
            ));
        }
        let a = support + 1;
        let mut h = Matrix::zeros(a, a);
        let mut prev = 1.0;
        for i in 0..support {
            h.set(i, i + 1, self.d[i] / prev);
            prev = self.d[i];
        }
        let mut g = vec![0.0; a];
        g[0] = 1.0;
        let truncated_mass = match self.tail {
            Tail::ZeroBeyond => 0.0,
            _ => self.d.get(support).copied().unwrap_or(prev),
        };
        let t = ModelTriplet::new(h, g, self.m)?;
        if truncated_mass > 0.0 || support < self.d.len() {
            Ok(t.with_truncation(TruncationInfo {
                g_tail_mass: 0.0,
                row_sum_deficit: truncated_mass,
            }))
        } else {
            Ok(t)
        }
    }
}

impl std::fmt::Display for MalthusStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MalthusStatus::Solved => "solved",
            MalthusStatus::Boundary => "boundary",
            MalthusStatus::MinusInfinity => "minus-infinity",
            MalthusStatus::BoundaryUndecidable => "boundary-undecidable",
        };
        f.write_str(s)
    }
}

/// Outcome of [`LifeLaw::malthus`].
#[derive(Debug, Clone, PartialEq)]
pub struct MalthusResult {
    /// Malthusian parameter; `-inf` in the transient regime, NaN when
    /// undecidable from a truncated prefix.
    pub alpha: f64,
    /// Convergence parameter `R = e^{-α}` (or `R_f` when `α = -∞`).
    pub r: f64,
    /// Mean age at childbearing; `+inf` when the defining series diverges.
    pub beta: f64,
    pub rf: Radius,
    pub status: MalthusStatus,
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalthusStatus {
    /// Interior root of `m f(e^{-α}) = 1` located and certified.
    Solved,
    /// `m f(R_f) = 1` exactly: `α = -ln R_f`.
    Boundary,
    /// `f(R_f) < 1/m`: `α = -∞`.
    MinusInfinity,
    /// A bare prefix cannot decide the boundary.
    BoundaryUndecidable,
}

/// Builds the life law `dₙ = c n^{-k} e^{-γn}` together with its predicted
/// classification branch from `A = Σ c n^{-k}` against `1/m`.
pub fn power_exp_life_law(
    c: f64,
    gamma: f64,
    k: f64,
    m: f64,
) -> Result<(LifeLaw, PowerExpPrediction)> {
    if c <= 0.0 || c.is_nan() || c > 1.0 + 1e-12 {
        return Err(Error::InvalidModel(format!(
            "need 0 < c <= 1 so that d1 <= 1, got {c}"
        )));
    }
    let prefix: Vec<f64> = (1..=64u32)
        .map(|n| c * (n as f64).powf(-k) * (-gamma * n as f64).exp())
        .collect();
    let law = LifeLaw::new(prefix, m, Tail::PowerExp { c, gamma, k })?;
    let a = if k > 1.0 { c * zeta(k) } else { f64::INFINITY };
    let branch = if a > 1.0 / m + 1e-12 {
        PowerExpBranch::Interior
    } else if a < 1.0 / m - 1e-12 {
        PowerExpBranch::Transient
    } else {
        PowerExpBranch::Boundary { beta_finite: k > 2.0 }
    };
    let closed_form_alpha = if k == 0.0 {
        // f(s) = c q/(1-q) at q = s e^{-γ}: the root is at q = 1/(1+mc).
        Some((1.0 + m * c).ln() - gamma)
    } else {
        None
    };
    Ok((
        law,
        PowerExpPrediction {
            a,
            branch,
            closed_form_alpha,
        },
    ))
}

/// Predicted trichotomy of a power-exponential life law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExpPrediction {
    /// `A = Σ c n^{-k}` (`+inf` for `k ≤ 1`).
    pub a: f64,
    pub branch: PowerExpBranch,
    /// Exact `α` when available (`k = 0`).
    pub closed_form_alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerExpBranch {
    /// `A > 1/m`: `-γ < α < ∞` and `β < ∞`.
    Interior,
    /// `A = 1/m`: `α = -γ`, `β < ∞` iff `k > 2`.
    Boundary { beta_finite: bool },
    /// `A < 1/m`: `α = -∞`, `β = ∞`.
    Transient,
}

/// Life law of a model triplet: `dₙ = g Hⁿ 1ᵗ` computed by row iteration.
///
/// The prefix extends until the tails fall below 1e-60 (or a cap). Beyond it
/// only a bound is available: `d_{N+i} ≤ d_N · C · qⁱ`, where `q` is the
/// sharpest of the row-sum bounds `max_rowsum(H^{2^j})^{1/2^j}` (these
/// approach the spectral radius of `H`) and `C` absorbs the intermediate
/// powers.
pub fn life_law(t: &ModelTriplet) -> LifeLaw {
    let h = t.h();
    let mut w = t.g().to_vec();
    let mut d = Vec::new();
    loop {
        w = linalg::vec_mat(&w, h);
        let dn: f64 = w.iter().sum();
        d.push(dn.min(d.last().copied().unwrap_or(1.0)));
        if dn == 0.0 {
            break;
        }
        if d.len() >= 64 && (dn < PREFIX_FLOOR || d.len() >= PREFIX_CAP) {
            break;
        }
    }
    // Row-sum bounds of H^(2^j); d_{n+k} = (g Hⁿ)(H^k 1ᵗ) ≤ dₙ max_rowsum(H^k).
    let mut pow = h.clone();
    let mut bounds = Vec::new();
    let ones = vec![1.0; t.dim()];
    for _ in 0..6 {
        let tau = pow
            .mat_vec(&ones)
            .into_iter()
            .fold(0.0f64, f64::max)
            .min(1.0);
        bounds.push(tau);
        pow = pow.mul(&pow);
    }
    let ratio_bound = bounds
        .iter()
        .enumerate()
        .map(|(j, tau)| tau.powf(1.0 / (1u32 << j) as f64))
        .fold(1.0f64, f64::min);
    // τ_r ≤ Π over binary digits of r of τ_{2^i}, so a single prefactor
    // Π max(1, τ_{2^i}/q^{2^i}) makes d_N · C · qⁱ sound for every i.
    let prefactor: f64 = bounds
        .iter()
        .enumerate()
        .map(|(j, tau)| (tau / ratio_bound.powi(1 << j)).max(1.0))
        .product();
    LifeLaw::new(
        d,
        t.m(),
        Tail::Truncated {
            ratio_bound,
            prefactor,
        },
    )
    .expect("iterated tails are monotone")
}

/// Riemann zeta for real `k > 1` by Euler–Maclaurin (absolute error < 1e-14).
pub fn zeta(k: f64) -> f64 {
    assert!(k > 1.0, "zeta(k) needs k > 1");
    let m = 64.0f64;
    let mut sum = 0.0;
    let mut n = 1.0;
    while n < m {
        sum += n.powf(-k);
        n += 1.0;
    }
    sum + m.powf(1.0 - k) / (k - 1.0) + 0.5 * m.powf(-k) + k * m.powf(-k - 1.0) / 12.0
        - k * (k + 1.0) * (k + 2.0) * m.powf(-k - 3.0) / 720.0
}

fn weight(n: u64, w: u32) -> f64 {
    match w {
        0 => 1.0,
        _ => n as f64,
    }
}

enum TailSum {
    Finite { value: f64, remainder: f64 },
    Divergent,
}

impl TailSum {
    fn map_finite(self, f: impl FnOnce(f64, f64) -> SeriesSum) -> SeriesSum {
        match self {
            TailSum::Finite { value, remainder } => f(value, remainder),
            TailSum::Divergent => SeriesSum::Divergent,
        }
    }
}

/// `Σ_{n>n0} n^w · c n^{-k} e^{-γn} sⁿ` with certified remainder.
fn power_exp_tail(c: f64, gamma: f64, k: f64, s: f64, n0: u64, w: u32) -> TailSum {
    let q = s * (-gamma).exp();
    let p = w as f64 - k;
    if q > 1.0 {
        return TailSum::Divergent;
    }
    if q == 1.0 {
        // Σ n^p: converges iff p < -1.
        if p >= -1.0 {
            return TailSum::Divergent;
        }
        let (value, remainder) = power_sum_tail(p, n0);
        return TailSum::Finite {
            value: c * value,
            remainder: c * remainder,
        };
    }
    // Terms c n^p qⁿ: sum until the geometric bound certifies the rest.
    let mut value = 0.0;
    let mut n = n0 + 1;
    let mut qn = q.powf(n as f64);
    loop {
        let term = c * (n as f64).powf(p) * qn;
        value += term;
        // For p > 0 successive ratios approach q from above; inflate q a bit.
        let q_eff = (q * (1.0 + p.max(0.0) / n as f64)).min(0.999_999_999);
        let bound = term * q_eff / (1.0 - q_eff);
        if bound <= value.abs() * SERIES_REL_TOL + 1e-308 || term == 0.0 {
            return TailSum::Finite {
                value,
                remainder: bound,
            };
        }
        n += 1;
        qn *= q;
        if n > n0 + 100_000_000 {
            return TailSum::Finite {
                value,
                remainder: bound,
            };
        }
    }
}

/// `Σ_{n>n0} n^p` for `p < -1`, Euler–Maclaurin with certified error.
/// Returned as (underestimate, remainder bound).
fn power_sum_tail(p: f64, n0: u64) -> (f64, f64) {
    let m = (n0 + 1).max(128) as f64;
    let mut sum = 0.0;
    let mut n = (n0 + 1) as f64;
    while n < m {
        sum += n.powf(p);
        n += 1.0;
    }
    let tail = m.powf(p + 1.0) / (-p - 1.0) + 0.5 * m.powf(p) - p * m.powf(p - 1.0) / 12.0
        + p * (p - 1.0) * (p - 2.0) * m.powf(p - 3.0) / 720.0;
    let err = (p * (p - 1.0) * (p - 2.0) * (p - 3.0) * (p - 4.0) * m.powf(p - 5.0) / 30240.0)
        .abs()
        + 1e-16 * (sum.abs() + tail.abs());
    // Shift so the first component underestimates the true sum.
    (sum + tail - err, 2.0 * err)
}

/// Expanding scan for a sign change of `φ(s) - 1` on `(0, s_cap)`.
fn bracket_root(phi: &impl Fn(f64) -> SeriesSum, s_cap: f64) -> Option<(f64, f64)> {
    let finite_cap = if s_cap.is_finite() { s_cap } else { 1e12 };
    let mut lo = (finite_cap * 1e-6).min(1e-3);
    let certified_below = |s: f64| match phi(s) {
        SeriesSum::Finite { value, remainder } => {
            if remainder <= 1e-9 * value.max(1.0) {
                // Certification slack is below the residual target; the
                // point value decides.
                Some(value < 1.0)
            } else if value + remainder < 1.0 {
                Some(true)
            } else if value > 1.0 {
                Some(false)
            } else {
                None // straddles 1 within its certification
            }
        }
        SeriesSum::Divergent => Some(false),
        SeriesSum::Undecided => None,
    };
    match certified_below(lo)? {
        true => {}
        false => {
            // Root below our smallest scan point; shrink toward zero.
            let mut hi = lo;
            for _ in 0..200 {
                lo /= 4.0;
                match certified_below(lo) {
                    Some(true) => return Some((lo, hi)),
                    Some(false) => hi = lo,
                    None => return None,
                }
            }
            return None;
        }
    }
    // March toward the cap; geometric steps, then creep up to the boundary.
    let mut prev = lo;
    let mut s = lo;
    for _ in 0..4000 {
        s = if s * 2.0 < finite_cap {
            s * 2.0
        } else {
            finite_cap - (finite_cap - s) * 0.5
        };
        if (finite_cap - s) / finite_cap < 1e-12 {
            return None; // crept to the boundary without a crossing
        }
        match certified_below(s) {
            Some(true) => prev = s,
            Some(false) => return Some((prev, s)),
            None => return None,
        }
    }
    None
}

/// Bisection of `φ(s) = 1` to the residual target. Interval decisions only
/// use certified comparisons so the bracket always contains the true root;
/// the reported residual includes the certification slack.
fn bisect(phi: &impl Fn(f64) -> SeriesSum, mut lo: f64, mut hi: f64) -> (f64, u32, f64) {
    let mut mid = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for _ in 0..200 {
        iterations += 1;
        mid = 0.5 * (lo + hi);
        match phi(mid) {
            SeriesSum::Finite { value, remainder } => {
                residual = (value + 0.5 * remainder - 1.0).abs() + 0.5 * remainder;
                if residual <= MALTHUS_RESIDUAL || (hi - lo) <= mid.abs() * 1e-16 {
                    break;
                }
                if value > 1.0 {
                    hi = mid;
                } else if value + remainder < 1.0 || remainder <= 1e-13 {
                    lo = mid;
                } else {
                    // The tail bound straddles 1: no certified move exists.
                    break;
                }
            }
            SeriesSum::Divergent => {
                hi = mid;
                residual = f64::INFINITY;
            }
            SeriesSum::Undecided => {
                residual = f64::INFINITY;
                break;
            }
        }
    }
    (mid, iterations, residual)
}
