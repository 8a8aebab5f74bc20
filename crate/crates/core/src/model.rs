//! The process triplet `(H, g, m)` and the exact law of generation `n`.
//!
//! Row `i` of the substochastic matrix `H` is the (defective) type law of a
//! type-`i` particle's first daughter; `h_{i0} = 1 - Σⱼ h_{ij}` is the
//! no-offspring mass. All other daughters are geometric(m) many with types
//! iid from `g`, independently of the mother's type. The mean offspring
//! matrix is `M = H + m H 1ᵗ g`, and the generation-`n` vector started from
//! type `i` is again linear-fractional, `LF(hᵢ⁽ⁿ⁾, g⁽ⁿ⁾, m⁽ⁿ⁾)`, with
//!
//! - `m⁽ⁿ⁾ = m Σ_{k<n} g Mᵏ 1ᵗ`,
//! - `m⁽ⁿ⁾ g⁽ⁿ⁾ = m g (I + M + … + M^{n-1})`,
//! - `H⁽ⁿ⁾ = Mⁿ - (m⁽ⁿ⁾/(1+m⁽ⁿ⁾)) Mⁿ 1ᵗ g⁽ⁿ⁾`.

use crate::error::{Error, Result};
use crate::lf_law::LFLaw;
use crate::linalg::{self, Matrix};

const ROW_TOL: f64 = 1e-12;
const OVERFLOW_GUARD: f64 = 1e300;
/// Generation indices accepted by the iteration.
pub const MAX_GENERATION: usize = 1_000_000;

/// Truncation metadata carried when a countable model was cut to `a` types.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruncationInfo {
    /// Mass of `g` beyond the kept types.
    pub g_tail_mass: f64,
    /// Largest row-sum deficit introduced by dropping columns of `H`.
    pub row_sum_deficit: f64,
}

/// A linear-fractional branching process on a finite working type space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTriplet {
    h: Matrix,
    g: Vec<f64>,
    m: f64,
    truncation: Option<TruncationInfo>,
}

impl ModelTriplet {
    /// Validates substochastic rows, `Σ g = 1` (to 1e-12) and `m > 0`.
    pub fn new(h: Matrix, g: Vec<f64>, m: f64) -> Result<Self> {
        if h.rows() != h.cols() {
            return Err(Error::InvalidModel(format!(
                "H must be square, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        if g.len() != h.rows() {
            return Err(Error::DimensionMismatch {
                expected: h.rows(),
                got: g.len(),
            });
        }
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::InvalidModel(format!("m must be positive, got {m}")));
        }
        for i in 0..h.rows() {
            let mut sum = 0.0;
            for j in 0..h.cols() {
                let v = h.get(i, j);
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "H[{}][{}] = {v} is not a probability",
                        i + 1,
                        j + 1
                    )));
                }
                sum += v;
            }
            if sum > 1.0 + ROW_TOL {
                return Err(Error::InvalidModel(format!(
                    "row {} of H sums to {sum}, exceeding 1",
                    i + 1
                )));
            }
        }
        if g.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidModel("negative entry in g".into()));
        }
        let gsum: f64 = g.iter().sum();
        if (gsum - 1.0).abs() > ROW_TOL {
            return Err(Error::InvalidModel(format!(
                "g sums to {gsum}, expected 1"
            )));
        }
        Ok(ModelTriplet {
            h,
            g,
            m,
            truncation: None,
        })
    }

    pub fn with_truncation(mut self, info: TruncationInfo) -> Self {
        self.truncation = Some(info);
        self
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn truncation(&self) -> Option<&TruncationInfo> {
        self.truncation.as_ref()
    }

    /// No-offspring mass `h_{i0}` of type `i`.
    pub fn h_row_zero(&self, i: usize) -> f64 {
        (1.0 - self.h.row(i).iter().sum::<f64>()).max(0.0)
    }

    /// Offspring law of a type-`i` particle.
    pub fn row_law(&self, i: usize) -> LFLaw {
        LFLaw::new(
            self.h_row_zero(i),
            self.h.row(i).to_vec(),
            self.g.clone(),
            self.m,
        )
        .expect("triplet rows are valid LF laws")
    }

    /// Mean offspring matrix `M = H + m (H 1ᵗ) g`.
    pub fn mean_matrix(&self) -> Matrix {
        let ones = vec![1.0; self.dim()];
        let h_one = self.h.mat_vec(&ones);
        let mut m_mat = linalg::outer(&h_one, &self.g).scaled(self.m);
        m_mat.add_assign(&self.h);
        m_mat
    }

    /// Exact law of the generation-`n` vector per starting type.
    ///
    /// Generation 0 is the deterministic initial state and is rejected.
    pub fn generation_law(&self, n: usize) -> Result<GenerationLaw> {
        if n == 0 || n > MAX_GENERATION {
            return Err(Error::InvalidArgument(format!(
                "generation index {n} out of range"
            )));
        }
        let mut iter = self.generation_iter();
        let mut law = iter.next_law()?;
        for _ in 1..n {
            law = iter.next_law()?;
        }
        Ok(law)
    }

    /// Incremental generation-law iterator; `next_law()` yields n = 1, 2, ….
    pub fn generation_iter(&self) -> GenerationIter<'_> {
        let a = self.dim();
        GenerationIter {
            t: self,
            m_mat: self.mean_matrix(),
            n: 0,
            g_m_sum: vec![0.0; a],
            g_m_pow: self.g.clone(),
            m_pow: Matrix::identity(a),
            progress: None,
        }
    }

    /// `P(Z⁽ⁿ⁾ ≠ 0 | Z⁽⁰⁾ = eᵢ) = (1 + m⁽ⁿ⁾)⁻¹ (Mⁿ 1ᵗ)ᵢ` per type.
    pub fn survival_probability(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 || n > MAX_GENERATION {
            return Err(Error::InvalidArgument(format!(
                "generation index {n} out of range"
            )));
        }
        let m_mat = self.mean_matrix();
        let mut col = vec![1.0; self.dim()];
        let mut row = self.g.clone();
        let mut mn = 0.0;
        for _ in 0..n {
            mn += self.m * row.iter().sum::<f64>();
            row = linalg::vec_mat(&row, &m_mat);
            col = m_mat.mat_vec(&col);
            if col.iter().any(|v| v.abs() > OVERFLOW_GUARD) {
                return Err(Error::Overflow("survival_probability".into()));
            }
        }
        Ok(col.iter().map(|v| (v / (1.0 + mn)).min(1.0)).collect())
    }

    /// `E[s^{Z⁽ⁿ⁾} | Z⁽ⁿ⁾ ≠ 0, Z⁽⁰⁾ = eᵢ]`, the shifted-geometric conditional
    /// generating function of generation `n`.
    pub fn conditional_pgf(&self, i: usize, n: usize, s: &[f64]) -> Result<f64> {
        if i >= self.dim() {
            return Err(Error::InvalidArgument(format!("type index {i} out of range")));
        }
        let law = self.generation_law(n)?;
        let survival = self.survival_probability(n)?;
        if survival[i] <= 0.0 {
            return Err(Error::NullConditioning(format!(
                "type {i} is extinct by generation {n}"
            )));
        }
        law.row_law(i)?.conditional()?.pgf(s)
    }

    /// Types `j` with `(g Hⁿ)ⱼ = 0` for all `n ≤ horizon`. The result is a
    /// sound over-approximation of the phantom set and `exact` is set when
    /// the reachability closure stabilized before the horizon.
    pub fn phantom_types(&self, horizon: usize) -> PhantomReport {
        let a = self.dim();
        let mut reached: Vec<bool> = self.g.iter().map(|&x| x > 0.0).collect();
        let mut frontier = reached.clone();
        let mut exact = false;
        for _ in 0..horizon {
            let mut next = vec![false; a];
            for (i, &active) in frontier.iter().enumerate() {
                if !active {
                    continue;
                }
                for (j, item) in next.iter_mut().enumerate() {
                    if self.h.get(i, j) > 0.0 {
                        *item = true;
                    }
                }
            }
            let grew = next
                .iter()
                .zip(&reached)
                .any(|(&n, &r)| n && !r);
            for (r, &n) in reached.iter_mut().zip(&next) {
                *r |= n;
            }
            frontier = next;
            if !grew {
                // Within-n reachability is monotone: once a step adds no new
                // type the closure is complete.
                exact = true;
                break;
            }
        }
        PhantomReport {
            phantoms: (0..a).filter(|&j| !reached[j]).collect(),
            exact,
        }
    }

    /// Irreducibility (no phantom types and no zero rows of `H`) and
    /// aperiodicity (gcd of cycle lengths of `M`'s positivity pattern).
    pub fn check_irreducible_aperiodic(&self) -> IrreducibilityReport {
        let a = self.dim();
        let zero_rows: Vec<usize> = (0..a)
            .filter(|&i| self.h.row(i).iter().all(|&v| v == 0.0))
            .collect();
        let phantoms = self.phantom_types(2 * a + 2).phantoms;
        let irreducible = zero_rows.is_empty() && phantoms.is_empty();
        let m_mat = self.mean_matrix();
        let period = positivity_period(&m_mat);
        IrreducibilityReport {
            irreducible,
            aperiodic: period == Some(1),
            period,
            zero_rows,
            phantoms,
        }
    }
}

/// Result of [`ModelTriplet::phantom_types`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomReport {
    pub phantoms: Vec<usize>,
    pub exact: bool,
}

/// Result of [`ModelTriplet::check_irreducible_aperiodic`].
#[derive(Debug, Clone, PartialEq)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    pub aperiodic: bool,
    /// gcd of cycle lengths through state 0's strongly connected component,
    /// `None` when the graph has no cycle through it.
    pub period: Option<usize>,
    pub zero_rows: Vec<usize>,
    pub phantoms: Vec<usize>,
}

/// The law `LF(hᵢ⁽ⁿ⁾, g⁽ⁿ⁾, m⁽ⁿ⁾)` of generation `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationLaw {
    n: usize,
    hn: Matrix,
    gn: Vec<f64>,
    mn: f64,
}

impl GenerationLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hn(&self) -> &Matrix {
        &self.hn
    }

    pub fn gn(&self) -> &[f64] {
        &self.gn
    }

    pub fn mn(&self) -> f64 {
        self.mn
    }

    /// `h_{i0}⁽ⁿ⁾`, the extinction-by-`n` probability from type `i`.
    pub fn h_row_zero(&self, i: usize) -> f64 {
        (1.0 - self.hn.row(i).iter().sum::<f64>()).clamp(0.0, 1.0)
    }

    /// The LF law of `Z⁽ⁿ⁾` started from type `i`.
    pub fn row_law(&self, i: usize) -> Result<LFLaw> {
        // Tiny negative masses from cancellation are clamped before validation.
        let row: Vec<f64> = self.hn.row(i).iter().map(|&v| v.max(0.0)).collect();
        let gn: Vec<f64> = self.gn.iter().map(|&v| v.max(0.0)).collect();
        LFLaw::new(self.h_row_zero(i), row, gn, self.mn)
    }
}

/// Streams `GenerationLaw`s for n = 1, 2, … in `O(a³)` per step.
pub struct GenerationIter<'a> {
    t: &'a ModelTriplet,
    m_mat: Matrix,
    n: usize,
    /// `Σ_{k<n} g Mᵏ`.
    g_m_sum: Vec<f64>,
    /// `g Mⁿ`.
    g_m_pow: Vec<f64>,
    /// `Mⁿ`.
    m_pow: Matrix,
    progress: Option<Box<dyn FnMut(usize) -> bool + 'a>>,
}

impl<'a> GenerationIter<'a> {
    /// Installs a cooperative progress callback: it is invoked once per
    /// generation step (one step is at least `a²` multiplications) and
    /// returning `false` interrupts the iteration.
    pub fn with_progress(mut self, callback: impl FnMut(usize) -> bool + 'a) -> Self {
        self.progress = Some(Box::new(callback));
        self
    }

    pub fn next_law(&mut self) -> Result<GenerationLaw> {
        if self.n >= MAX_GENERATION {
            return Err(Error::InvalidArgument(format!(
                "generation index beyond {MAX_GENERATION}"
            )));
        }
        if let Some(cb) = self.progress.as_mut() {
            if !cb(self.n) {
                return Err(Error::Interrupted(self.n));
            }
        }
        self.n += 1;
        for (s, &p) in self.g_m_sum.iter_mut().zip(&self.g_m_pow) {
            *s += p;
        }
        self.g_m_pow = linalg::vec_mat(&self.g_m_pow, &self.m_mat);
        self.m_pow = self.m_pow.mul(&self.m_mat);
        if self.m_pow.sup_norm() > OVERFLOW_GUARD {
            return Err(Error::Overflow(format!("M^{} entries", self.n)));
        }
        let m = self.t.m();
        let mn = m * self.g_m_sum.iter().sum::<f64>();
        let gn: Vec<f64> = self.g_m_sum.iter().map(|&v| m * v / mn).collect();
        let ones = vec![1.0; self.t.dim()];
        let col = self.m_pow.mat_vec(&ones);
        let mut hn = self.m_pow.clone();
        let correction = linalg::outer(&col, &gn).scaled(mn / (1.0 + mn));
        hn = hn.sub(&correction);
        Ok(GenerationLaw {
            n: self.n,
            hn,
            gn,
            mn,
        })
    }
}

/// Scaled totals `(n, scaleⁿ · g Mⁿ 1ᵗ, scaleⁿ · m⁽ⁿ⁾)`, usable far past the
/// point where raw `Mⁿ` entries overflow.
pub struct ScaledMeanIter<'a> {
    m_mat: Matrix,
    m: f64,
    scale: f64,
    n: usize,
    /// `scaleⁿ · g Mⁿ`.
    w: Vec<f64>,
    /// `scaleⁿ · m⁽ⁿ⁾`.
    m_hat: f64,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl ModelTriplet {
    /// Iterator over `(n, scaleⁿ g Mⁿ 1ᵗ, scaleⁿ m⁽ⁿ⁾)` for n = 1, 2, ….
    /// With `scale = 1/ρ` both sequences stay bounded in every regime.
    pub fn scaled_mean_iter(&self, scale: f64) -> ScaledMeanIter<'_> {
        ScaledMeanIter {
            m_mat: self.mean_matrix(),
            m: self.m,
            scale,
            n: 0,
            w: self.g.clone(),
            m_hat: 0.0,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<'a> Iterator for ScaledMeanIter<'a> {
    type Item = (usize, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        // m⁽ⁿ⁺¹⁾ = m⁽ⁿ⁾ + m g Mⁿ 1ᵗ, rescaled by `scale` each step.
        let total_prev: f64 = self.w.iter().sum();
        self.m_hat = (self.m_hat + self.m * total_prev) * self.scale;
        self.w = linalg::vec_mat(&self.w, &self.m_mat);
        for v in &mut self.w {
            *v *= self.scale;
        }
        self.n += 1;
        let total: f64 = self.w.iter().sum();
        Some((self.n, total, self.m_hat))
    }
}

/// Period of the positivity digraph of `m_mat`: gcd of `dist(u)+1-dist(v)`
/// over edges inside the BFS tree from node 0, restricted to nodes that can
/// reach back. `None` when no cycle through node 0 exists.
fn positivity_period(m_mat: &Matrix) -> Option<usize> {
    let a = m_mat.rows();
    if a == 0 {
        return None;
    }
    let edge = |i: usize, j: usize| m_mat.get(i, j) > 0.0;
    let mut dist = vec![usize::MAX; a];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..a {
            if edge(u, v) && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..a {
        if dist[u] == usize::MAX {
            continue;
        }
        for v in 0..a {
            if edge(u, v) && dist[v] != usize::MAX {
                let diff = (dist[u] as i64 + 1 - dist[v] as i64).unsigned_abs() as usize;
                g = gcd(g, diff);
            }
        }
    }
    if g == 0 {
        None
    } else {
        Some(g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
