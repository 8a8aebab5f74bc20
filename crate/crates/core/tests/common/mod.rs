//! Shared fixtures: the model corpus and the independent test oracles.
#![allow(dead_code)] // each integration test binary uses its own subset

use lfbgw_core::{Matrix, ModelTriplet};

pub fn critical_1type() -> ModelTriplet {
    ModelTriplet::new(Matrix::from_rows(&[vec![0.5]]).unwrap(), vec![1.0], 1.0).unwrap()
}

pub fn subcritical_1type() -> ModelTriplet {
    ModelTriplet::new(Matrix::from_rows(&[vec![0.4]]).unwrap(), vec![1.0], 1.0).unwrap()
}

pub fn supercritical_1type() -> ModelTriplet {
    ModelTriplet::new(Matrix::from_rows(&[vec![0.8]]).unwrap(), vec![1.0], 1.0).unwrap()
}

/// The worked 2-type model: `H 1ᵗ = 0.3 · 1ᵗ`, so ρ = (1+m)·0.3.
pub fn rowsum_2type(m: f64) -> ModelTriplet {
    ModelTriplet::new(
        Matrix::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.0]]).unwrap(),
        vec![0.5, 0.5],
        m,
    )
    .unwrap()
}

/// Left-eigenvector model: `g H = 0.625 g` with unequal row sums, m = 0.2.
pub fn lefteig_2type() -> ModelTriplet {
    ModelTriplet::new(
        Matrix::from_rows(&[vec![0.5, 0.25], vec![0.125, 0.375]]).unwrap(),
        vec![0.5, 0.5],
        0.2,
    )
    .unwrap()
}

/// Critical row-sum model: `H 1ᵗ = 0.5 · 1ᵗ`, m = 1, ρ = 1, with a
/// non-uniform g so v is not trivial.
pub fn critical_rowsum_2type() -> ModelTriplet {
    ModelTriplet::new(
        Matrix::from_rows(&[vec![0.25, 0.25], vec![0.375, 0.125]]).unwrap(),
        vec![0.25, 0.75],
        1.0,
    )
    .unwrap()
}

/// Generic critical model: no Example-2 structure; m = 43/84 makes
/// μ = m f(1) = 1 exactly in rational arithmetic.
pub fn critical_generic_2type() -> ModelTriplet {
    ModelTriplet::new(
        Matrix::from_rows(&[vec![0.3, 0.4], vec![0.5, 0.1]]).unwrap(),
        vec![0.7, 0.3],
        43.0 / 84.0,
    )
    .unwrap()
}

/// All positively recurrent corpus models with names.
pub fn corpus() -> Vec<(&'static str, ModelTriplet)> {
    vec![
        ("critical_1type", critical_1type()),
        ("subcritical_1type", subcritical_1type()),
        ("supercritical_1type", supercritical_1type()),
        ("rowsum_2type", rowsum_2type(1.0)),
        ("super_2type", rowsum_2type(4.0)),
        ("lefteig_2type", lefteig_2type()),
        ("critical_rowsum_2type", critical_rowsum_2type()),
        ("critical_generic_2type", critical_generic_2type()),
    ]
}

/// Dense bivariate polynomial truncated at total degree `deg`; the
/// brute-force ring in which generating functions are composed.
#[derive(Debug, Clone)]
pub struct Poly2 {
    deg: usize,
    c: Vec<f64>,
}

impl Poly2 {
    pub fn zero(deg: usize) -> Self {
        Poly2 {
            deg,
            c: vec![0.0; (deg + 1) * (deg + 1)],
        }
    }

    pub fn constant(deg: usize, v: f64) -> Self {
        let mut p = Poly2::zero(deg);
        p.c[0] = v;
        p
    }

    /// The monomial `s₁` (axis 0) or `s₂` (axis 1).
    pub fn variable(deg: usize, axis: usize) -> Self {
        let mut p = Poly2::zero(deg);
        if axis == 0 {
            p.c[deg + 1] = 1.0; // (i, j) = (1, 0)
        } else {
            p.c[1] = 1.0;
        }
        p
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c[i * (self.deg + 1) + j]
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&other.c) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2 {
            deg: self.deg,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// Product truncated at total degree `deg`.
    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let deg = self.deg;
        let mut out = Poly2::zero(deg);
        for i1 in 0..=deg {
            for j1 in 0..=(deg - i1) {
                let a = self.coeff(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(deg - i1 - j1) {
                    for j2 in 0..=(deg - i1 - j1 - i2) {
                        let b = other.coeff(i2, j2);
                        if b != 0.0 {
                            out.c[(i1 + i2) * (deg + 1) + (j1 + j2)] += a * b;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Composes one linear-fractional generating function with inner series:
/// `h0 + (h·x)/(1+m - m g·x)`, expanded in the truncated ring.
pub fn lf_compose(h0: f64, h: &[f64], g: &[f64], m: f64, x: &[Poly2]) -> Poly2 {
    let deg = x[0].deg;
    let mut numer = Poly2::zero(deg);
    let mut gx = Poly2::zero(deg);
    for (k, xk) in x.iter().enumerate() {
        numer = numer.add(&xk.scale(h[k]));
        gx = gx.add(&xk.scale(g[k]));
    }
    // denom = (1+m) - m g·x = c0 (1 - w), w with zero constant term.
    let denom = Poly2::constant(deg, 1.0 + m).add(&gx.scale(-m));
    let c0 = denom.coeff(0, 0);
    let w = Poly2::constant(deg, 1.0).add(&denom.scale(-1.0 / c0));
    // 1/denom = (1/c0) Σ_{k≤deg} w^k (w is nilpotent in the truncated ring).
    let mut inv = Poly2::constant(deg, 1.0);
    let mut wk = Poly2::constant(deg, 1.0);
    for _ in 0..deg {
        wk = wk.mul(&w);
        inv = inv.add(&wk);
    }
    inv = inv.scale(1.0 / c0);
    numer.mul(&inv).add(&Poly2::constant(deg, h0))
}

/// `n`-fold iterate of the generating functions of a 2-type model, expanded
/// to total degree `deg`. Entry `i` is `φᵢ⁽ⁿ⁾`.
pub fn iterated_pgf_series(t: &ModelTriplet, n: usize, deg: usize) -> Vec<Poly2> {
    assert_eq!(t.dim(), 2);
    let mut current = vec![Poly2::variable(deg, 0), Poly2::variable(deg, 1)];
    for _ in 0..n {
        current = (0..2)
            .map(|i| {
                lf_compose(
                    t.h_row_zero(i),
                    t.h().row(i),
                    t.g(),
                    t.m(),
                    &current,
                )
            })
            .collect();
    }
    current
}

/// Rigorous bracket for `ζ(k)`: partial sum plus integral bounds.
pub fn zeta_bracket(k: f64, terms: usize) -> (f64, f64) {
    let mut sum = 0.0;
    for n in 1..=terms {
        sum += (n as f64).powf(-k);
    }
    let m = terms as f64;
    let lo = sum + (m + 1.0).powf(1.0 - k) / (k - 1.0);
    let hi = sum + m.powf(1.0 - k) / (k - 1.0);
    (lo, hi)
}
