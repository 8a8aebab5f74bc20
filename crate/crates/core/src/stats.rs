//! Chi-square tests used by the verification harness and the test suite.

/// Goodness-of-fit statistic and p-value for observed counts against cell
/// probabilities. Probabilities are renormalized over the supplied cells.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), probs.len());
    let n: f64 = observed.iter().map(|&c| c as f64).sum();
    let mass: f64 = probs.iter().sum();
    let mut stat = 0.0;
    for (&obs, &p) in observed.iter().zip(probs) {
        let expected = n * p / mass;
        if expected > 0.0 {
            let d = obs as f64 - expected;
            stat += d * d / expected;
        }
    }
    let df = (observed.len() - 1) as f64;
    (stat, chi_square_p(stat, df))
}

/// Two-sample chi-square on two count histograms over the same cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let na: f64 = a.iter().map(|&c| c as f64).sum();
    let nb: f64 = b.iter().map(|&c| c as f64).sum();
    let ka = (nb / na).sqrt();
    let kb = (na / nb).sqrt();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&ca, &cb) in a.iter().zip(b) {
        let total = ca + cb;
        if total == 0 {
            continue;
        }
        cells += 1;
        let d = ka * ca as f64 - kb * cb as f64;
        stat += d * d / total as f64;
    }
    let df = cells.saturating_sub(1) as f64;
    (stat, chi_square_p(stat, df))
}

/// Drops cells whose expected count (under `n * p`) falls below `min_expected`
/// by merging them into one overflow cell.
pub fn merge_sparse_bins(counts: &[u64], probs: &[f64], min_expected: f64) -> (Vec<u64>, Vec<f64>) {
    let n: f64 = counts.iter().map(|&c| c as f64).sum();
    let mut kept_counts = Vec::new();
    let mut kept_probs = Vec::new();
    let mut rest_count = 0u64;
    let mut rest_prob = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if n * p >= min_expected {
            kept_counts.push(c);
            kept_probs.push(p);
        } else {
            rest_count += c;
            rest_prob += p;
        }
    }
    if rest_prob > 0.0 || rest_count > 0 {
        kept_counts.push(rest_count);
        kept_probs.push(rest_prob);
    }
    (kept_counts, kept_probs)
}

/// Histogram of values capped at `max_value`; the last cell collects the tail.
pub fn histogram(values: &[u64], max_value: u64) -> Vec<u64> {
    let mut counts = vec![0u64; max_value as usize + 2];
    for &v in values {
        counts[v.min(max_value + 1) as usize] += 1;
    }
    counts
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_p(stat: f64, df: f64) -> f64 {
    if df <= 0.0 {
        return 1.0;
    }
    reg_gamma_q(df / 2.0, stat / 2.0)
}

/// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
fn reg_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series_p(a, x)
    } else {
        gamma_cf_q(a, x)
    }
}

fn gamma_series_p(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf_q(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos approximation, g = 7, n = 9.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
