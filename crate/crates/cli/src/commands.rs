//! The five subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lfbgw_core::cmj::{self, MalthusStatus};
use lfbgw_core::sim::{self, tree_to_contour, Label, SimConfig, Start};
use lfbgw_core::spectral::{self, Criticality, Recurrence, SpectralSummary};
use lfbgw_core::{limits, linalg, LifeLaw};

use crate::error::CliError;
use crate::model_file::{fmt_f64, parse_model, serialize_model, ModelFile};

/// CSV floats carry 17 significant digits.
fn fmt_csv(x: f64) -> String {
    let x = x + 0.0; // normalize -0.0
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

/// Parsed command-line configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_path: PathBuf,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub cap: usize,
    pub format: Format,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model_path: PathBuf::new(),
            n: 10,
            reps: 1000,
            seed: 0,
            out: None,
            tol: 1e-8,
            cap: 1_000_000,
            format: Format::Text,
            threads: 1,
        }
    }
}

impl RunConfig {
    fn load(&self) -> Result<ModelFile, CliError> {
        let text = fs::read_to_string(&self.model_path).map_err(|e| {
            CliError::Validation(format!("cannot read {}: {e}", self.model_path.display()))
        })?;
        parse_model(&text)
    }

    /// Writes `name` into the output directory, or to stdout without one.
    fn emit(&self, name: &str, content: &str) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(name), content)?;
            }
            None => {
                if self.format == Format::Csv {
                    print!("{content}");
                }
            }
        }
        Ok(())
    }
}

/// Display rounding at 1e-12 for the headline only; CSV keeps full precision.
fn fmt_short(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

fn classification_line(sum: &SpectralSummary) -> String {
    format!(
        "{}, {}, R={}, beta={}",
        sum.criticality,
        sum.recurrence,
        fmt_short(sum.r),
        fmt_short(sum.beta)
    )
}

/// `classify`: classification report plus a CSV of R, ρ, α, β, u, v.
pub fn cmd_classify(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.load()? {
        ModelFile::Triplet(t) => {
            let sum = spectral::classify_model(&t)?;
            println!("{}", classification_line(&sum));
            if cfg.format == Format::Text {
                println!("rho = {}", fmt_f64(sum.rho));
                println!("alpha = {}", fmt_f64(sum.alpha));
                println!("mu = {}", fmt_f64(sum.mu));
                println!("lambda = {}", fmt_f64(sum.lambda));
                if let (Some(u), Some(v)) = (&sum.u, &sum.v) {
                    let us: Vec<String> = u.iter().map(|&x| fmt_f64(x)).collect();
                    let vs: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
                    println!("u = {}", us.join(" "));
                    println!("v = {}", vs.join(" "));
                    println!("max identity residual = {:.3e}", sum.residuals.max());
                }
            }
            let mut csv = String::new();
            let a = t.dim();
            let mut header = "criticality,recurrence,R,rho,alpha,beta,m,mu,lambda".to_string();
            for j in 1..=a {
                write!(header, ",u_{j}").unwrap();
            }
            for j in 1..=a {
                write!(header, ",v_{j}").unwrap();
            }
            csv.push_str(&header);
            csv.push('\n');
            let empty = vec![f64::NAN; a];
            let u = sum.u.as_deref().unwrap_or(&empty);
            let v = sum.v.as_deref().unwrap_or(&empty);
            let mut row = format!(
                "{},{},{},{},{},{},{},{},{}",
                sum.criticality,
                sum.recurrence,
                fmt_csv(sum.r),
                fmt_csv(sum.rho),
                fmt_csv(sum.alpha),
                fmt_csv(sum.beta),
                fmt_csv(sum.m),
                fmt_csv(sum.mu),
                fmt_csv(sum.lambda)
            );
            for &x in u.iter().chain(v) {
                write!(row, ",{}", fmt_csv(x)).unwrap();
            }
            csv.push_str(&row);
            csv.push('\n');
            cfg.emit("classify.csv", &csv)?;
        }
        ModelFile::Life(life) => {
            let res = life.malthus();
            if res.status == MalthusStatus::BoundaryUndecidable {
                return Err(CliError::Numeric(
                    "Malthusian parameter undecidable from the stored prefix".into(),
                ));
            }
            let criticality = if res.alpha == f64::NEG_INFINITY || res.alpha < -1e-10 {
                Criticality::Subcritical
            } else if res.alpha.abs() <= 1e-10 {
                Criticality::Critical
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
            println!(
                "{criticality}, {recurrence}, R={}, beta={}",
                fmt_short(res.r),
                fmt_short(res.beta)
            );
            if cfg.format == Format::Text {
                println!("alpha = {}", fmt_f64(res.alpha));
                println!("R_f = {}", fmt_f64(res.rf.value));
                println!("solver status = {}", res.status);
            }
            let csv = format!(
                "criticality,recurrence,R,alpha,beta,m,R_f,status\n{},{},{},{},{},{},{},{}\n",
                criticality,
                recurrence,
                fmt_csv(res.r),
                fmt_csv(res.alpha),
                fmt_csv(res.beta),
                fmt_csv(life.m()),
                fmt_csv(res.rf.value),
                res.status
            );
            cfg.emit("classify.csv", &csv)?;
        }
    }
    Ok(())
}

/// `iterate`: exact generation-law summary for n = 1..N.
pub fn cmd_iterate(cfg: &RunConfig) -> Result<(), CliError> {
    let t = match cfg.load()? {
        ModelFile::Triplet(t) => t,
        ModelFile::Life(_) => {
            return Err(CliError::Numeric(
                "`iterate` needs a triplet model (the generation law lives on the type space)"
                    .into(),
            ))
        }
    };
    let a = t.dim();
    let m_mat = t.mean_matrix();
    let mut iter = t.generation_iter();
    let mut col = vec![1.0; a];
    let mut csv = String::new();
    let mut header = "n,m_n".to_string();
    for j in 1..=a {
        write!(header, ",g_n_{j}").unwrap();
    }
    for j in 1..=a {
        write!(header, ",survival_{j}").unwrap();
    }
    csv.push_str(&header);
    csv.push('\n');
    for n in 1..=cfg.n {
        let law = iter.next_law().map_err(|e| {
            CliError::Numeric(format!("iteration stopped at n = {n}: {e}; rerun with a smaller --n"))
        })?;
        col = m_mat.mat_vec(&col);
        let mut row = format!("{n},{}", fmt_csv(law.mn()));
        for &g in law.gn() {
            write!(row, ",{}", fmt_csv(g)).unwrap();
        }
        for &c in &col {
            write!(row, ",{}", fmt_csv((c / (1.0 + law.mn())).min(1.0))).unwrap();
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    if cfg.format == Format::Text {
        print!("{csv}");
    }
    cfg.emit("iterate.csv", &csv)?;
    Ok(())
}

/// One replicate summary row.
struct Replicate {
    survived: bool,
    total: u64,
    by_type: Vec<u64>,
    truncated: bool,
    contour: Option<String>,
}

fn run_replicates<F>(reps: usize, threads: usize, run: F) -> Vec<Replicate>
where
    F: Fn(usize) -> Replicate + Sync,
{
    let mut rows: Vec<Option<Replicate>> = (0..reps).map(|_| None).collect();
    if threads <= 1 {
        for (k, slot) in rows.iter_mut().enumerate() {
            *slot = Some(run(k));
        }
    } else {
        let chunk = reps.div_ceil(threads);
        std::thread::scope(|scope| {
            for (ci, slice) in rows.chunks_mut(chunk).enumerate() {
                let run = &run;
                scope.spawn(move || {
                    for (off, slot) in slice.iter_mut().enumerate() {
                        *slot = Some(run(ci * chunk + off));
                    }
                });
            }
        });
    }
    rows.into_iter().map(Option::unwrap).collect()
}

/// `simulate`: deterministic replicate summaries; replicate `k` draws from
/// stream `k` of the master seed, so the output is byte-identical across
/// thread counts.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.reps == 0 {
        return Err(CliError::Validation("--reps must be at least 1".into()));
    }
    let horizon = u32::try_from(cfg.n)
        .map_err(|_| CliError::Validation("--n too large for a horizon".into()))?;
    let model = cfg.load()?;
    let dump_contours = cfg.out.is_some() && cfg.reps <= 10_000;
    let rows = match &model {
        ModelFile::Triplet(t) => {
            let sim_cfg = SimConfig {
                horizon,
                node_cap: cfg.cap,
            };
            run_replicates(cfg.reps, cfg.threads, |k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                let run = sim::simulate_bgw(t, Start::FromG, sim_cfg, &mut rng);
                let counts = &run.counts[horizon as usize];
                let contour = dump_contours.then(|| contour_string(&run.tree));
                Replicate {
                    survived: counts.iter().any(|&c| c > 0),
                    total: counts.iter().sum(),
                    by_type: counts.clone(),
                    truncated: run.truncated,
                    contour,
                }
            })
        }
        ModelFile::Life(life) => {
            if !life.samplable() {
                return Err(CliError::Numeric(
                    "life law has no tail rule; it cannot be sampled".into(),
                ));
            }
            run_replicates(cfg.reps, cfg.threads, |k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                let run = sim::simulate_cmj(life, horizon, cfg.cap, &mut rng)
                    .expect("samplable checked above");
                let total = run.totals[horizon as usize];
                Replicate {
                    survived: total > 0,
                    total,
                    by_type: Vec::new(),
                    truncated: run.truncated,
                    contour: None,
                }
            })
        }
    };

    let a = match &model {
        ModelFile::Triplet(t) => t.dim(),
        ModelFile::Life(_) => 0,
    };
    let mut csv = String::new();
    let mut header = "replicate,survived,total".to_string();
    for j in 1..=a {
        write!(header, ",z_{j}").unwrap();
    }
    header.push_str(",truncated");
    csv.push_str(&header);
    csv.push('\n');
    for (k, row) in rows.iter().enumerate() {
        let mut line = format!("{k},{},{}", u8::from(row.survived), row.total);
        for &z in &row.by_type {
            write!(line, ",{z}").unwrap();
        }
        write!(line, ",{}", u8::from(row.truncated)).unwrap();
        csv.push_str(&line);
        csv.push('\n');
    }
    let survived = rows.iter().filter(|r| r.survived).count();
    if cfg.format == Format::Text {
        println!(
            "replicates = {}, survived at n = {}: {} ({:.5})",
            cfg.reps,
            cfg.n,
            survived,
            survived as f64 / cfg.reps as f64
        );
    }
    cfg.emit("replicates.csv", &csv)?;
    if dump_contours && a > 0 {
        let mut dump = String::from("replicate,steps,contour\n");
        for (k, row) in rows.iter().enumerate() {
            if let Some(c) = &row.contour {
                let steps = c.split(' ').count();
                dump.push_str(&format!("{k},{steps},{c}\n"));
            }
        }
        cfg.emit("contours.csv", &dump)?;
    }
    Ok(())
}

/// Contour as `level:label` tokens; label 0 marks a down-step, type `j`
/// prints as `j+1`.
fn contour_string(tree: &lfbgw_core::PlanarTree) -> String {
    let path = tree_to_contour(tree);
    let toks: Vec<String> = path
        .states
        .iter()
        .map(|s| match s.label {
            Label::Down => format!("{}:0", s.level),
            Label::Type(ty) => format!("{}:{}", s.level, ty + 1),
        })
        .collect();
    toks.join(" ")
}

/// `limits`: limit-law parameters and a survival asymptote table.
pub fn cmd_limits(cfg: &RunConfig) -> Result<(), CliError> {
    let t = match cfg.load()? {
        ModelFile::Triplet(t) => t,
        ModelFile::Life(life) => return life_limits(cfg, &life),
    };
    let sum = spectral::classify_model(&t)?;
    if sum.recurrence != Recurrence::PositiveRecurrent {
        return Err(CliError::Numeric(format!(
            "limit laws need the positively recurrent case, model is {}",
            sum.recurrence
        )));
    }
    let mut rows: Vec<(String, f64)> = vec![
        ("rho".into(), sum.rho),
        ("alpha".into(), sum.alpha),
        ("beta".into(), sum.beta),
        ("mu".into(), sum.mu),
    ];
    match sum.criticality {
        Criticality::Subcritical => {
            let y = limits::yaglom_law(&t, &sum)?;
            rows.push(("m_tilde".into(), y.law().m()));
            for (j, &h) in y.law().h().iter().enumerate() {
                rows.push((format!("h_tilde_{}", j + 1), h));
            }
            for (j, &g) in y.law().g().iter().enumerate() {
                rows.push((format!("g_tilde_{}", j + 1), g));
            }
            let asym = limits::subcritical_survival_asym(&sum, 1)?;
            for (j, &s) in asym.iter().enumerate() {
                rows.push((format!("survival_coeff_{}", j + 1), s / sum.rho));
            }
        }
        Criticality::Critical => {
            let w = vec![1.0; t.dim()];
            let lim = limits::critical_limit(&sum, &w)?;
            rows.push(("c_w".into(), lim.c_w));
            rows.push(("tail_rate".into(), lim.rate));
            rows.push(("limit_mean".into(), lim.mean()));
            for (j, &s) in lim.survival_coeff.iter().enumerate() {
                rows.push((format!("survival_coeff_{}", j + 1), s));
            }
        }
        Criticality::Supercritical => {
            let w = vec![1.0; t.dim()];
            let lim = limits::supercritical_limit(&sum, &w)?;
            rows.push(("c_w".into(), lim.c_w));
            rows.push(("tail_rate".into(), lim.rate));
            for (j, &s) in lim.survival_coeff.iter().enumerate() {
                rows.push((format!("survival_limit_{}", j + 1), s));
            }
        }
    }
    let mut csv = String::from("quantity,value\n");
    for (name, value) in &rows {
        csv.push_str(&format!("{name},{}\n", fmt_csv(*value)));
    }
    if cfg.format == Format::Text {
        println!("{}", classification_line(&sum));
        for (name, value) in &rows {
            println!("{name} = {}", fmt_f64(*value));
        }
    }
    cfg.emit("limits.csv", &csv)?;

    // Survival asymptote table on a doubling grid, averaged over g.
    let asy = limits::cmj_asymptotics(&sum)?;
    let mut table = String::from("n,exact_survival,asymptote\n");
    let mut n = 1usize;
    while n <= cfg.n.max(16) {
        match t.survival_probability(n) {
            Ok(s) => {
                let exact = linalg::dot(&s, t.g());
                table.push_str(&format!(
                    "{n},{},{}\n",
                    fmt_csv(exact),
                    fmt_csv(asy.survival(n))
                ));
            }
            Err(_) => break, // supercritical overflow horizon reached
        }
        n *= 2;
    }
    cfg.emit("limits_asymptote.csv", &table)?;
    Ok(())
}

fn life_limits(cfg: &RunConfig, life: &LifeLaw) -> Result<(), CliError> {
    let res = life.malthus();
    if res.status == MalthusStatus::BoundaryUndecidable {
        return Err(CliError::Numeric(
            "Malthusian parameter undecidable from the stored prefix".into(),
        ));
    }
    if !res.beta.is_finite() {
        return Err(CliError::Numeric(
            "limit laws need beta < infinity (positively recurrent case)".into(),
        ));
    }
    let m = life.m();
    let mu = life.mu().unwrap_or(f64::NAN);
    let rows = [
        ("alpha".to_string(), res.alpha),
        ("beta".to_string(), res.beta),
        ("mu".to_string(), mu),
        ("R".to_string(), res.r),
    ];
    let mut csv = String::from("quantity,value\n");
    for (name, value) in &rows {
        csv.push_str(&format!("{name},{}\n", fmt_csv(*value)));
    }
    if cfg.format == Format::Text {
        for (name, value) in &rows {
            println!("{name} = {}", fmt_f64(*value));
        }
    }
    cfg.emit("limits.csv", &csv)?;
    // Scalar survival asymptote for the total-size process.
    let survival = |n: usize| -> f64 {
        if res.alpha < -1e-10 {
            (res.alpha * n as f64).exp() * (1.0 - mu) / (m * res.beta)
        } else if res.alpha.abs() <= 1e-10 {
            1.0 / (n as f64 * m)
        } else {
            (res.alpha.exp() - 1.0) / m
        }
    };
    let mut table = String::from("n,asymptote\n");
    let mut n = 1usize;
    while n <= cfg.n.max(16) {
        table.push_str(&format!("{n},{}\n", fmt_csv(survival(n))));
        n *= 2;
    }
    cfg.emit("limits_asymptote.csv", &table)?;
    Ok(())
}

/// `verify`: runs the identity checks applicable to the model and prints one
/// PASS/FAIL line per check.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.load()?;
    let failures = std::cell::Cell::new(0usize);
    let check = |name: &str, outcome: Result<String, String>| match outcome {
        Ok(detail) if detail.is_empty() => println!("PASS {name}"),
        Ok(detail) => println!("PASS {name} ({detail})"),
        Err(detail) => {
            failures.set(failures.get() + 1);
            println!("FAIL {name}: {detail}");
        }
    };

    // Shared: parse/serialize round trip.
    let reser = serialize_model(&model);
    match parse_model(&reser) {
        Ok(back) => {
            let same = match (&model, &back) {
                (ModelFile::Triplet(a), ModelFile::Triplet(b)) => a == b,
                (ModelFile::Life(a), ModelFile::Life(b)) => {
                    a.prefix() == b.prefix() && a.m() == b.m()
                }
                _ => false,
            };
            check(
                "parse-roundtrip",
                if same {
                    Ok(String::new())
                } else {
                    Err("reparsed model differs".into())
                },
            );
        }
        Err(e) => check("parse-roundtrip", Err(e.to_string())),
    }

    let life = match &model {
        ModelFile::Triplet(t) => cmj::life_law(t),
        ModelFile::Life(l) => l.clone(),
    };

    // Life tails monotone.
    let monotone = life
        .prefix()
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-15);
    check(
        "life-monotone",
        if monotone {
            Ok(String::new())
        } else {
            Err("tails increase somewhere".into())
        },
    );

    let res = life.malthus();
    match res.status {
        MalthusStatus::Solved => check(
            "malthus-residual",
            if res.residual <= 1e-11 {
                Ok(format!("residual {:.2e}", res.residual))
            } else {
                Err(format!("residual {:.2e}", res.residual))
            },
        ),
        MalthusStatus::Boundary | MalthusStatus::MinusInfinity => check(
            "malthus-residual",
            Ok(format!("boundary case, status {}", res.status)),
        ),
        MalthusStatus::BoundaryUndecidable => {
            return Err(CliError::Numeric(
                "Malthusian parameter undecidable from the stored prefix".into(),
            ))
        }
    }
    if res.alpha.is_finite() {
        let mass = life
            .weighted_series(res.r, 0)
            .value()
            .map(|v| v * life.m());
        check(
            "regeneration-mass",
            match mass {
                Some(total) if (total - 1.0).abs() <= 1e-8 => Ok(format!("{total:.12}")),
                Some(total) => Err(format!("sums to {total}")),
                None => Err("series not certified".into()),
            },
        );
    }

    let t = match &model {
        ModelFile::Triplet(t) => t.clone(),
        ModelFile::Life(_) => {
            if failures.get() > 0 {
                return Err(CliError::Verification(format!(
                    "{} checks failed",
                    failures.get()
                )));
            }
            return Ok(());
        }
    };

    let report = t.check_irreducible_aperiodic();
    if !report.irreducible || !report.aperiodic {
        return Err(CliError::Numeric(format!(
            "mean matrix not irreducible+aperiodic (zero rows {:?}, phantoms {:?}, period {:?})",
            report.zero_rows, report.phantoms, report.period
        )));
    }

    // Semigroup consistency of the exact generation laws.
    let a = t.dim();
    let grid: Vec<Vec<f64>> = vec![
        vec![0.0; a],
        vec![0.5; a],
        (0..a).map(|j| 0.2 + 0.7 * j as f64 / a as f64).collect(),
        vec![1.0; a],
    ];
    let semigroup = (|| -> Result<f64, CliError> {
        let law2 = t.generation_law(2)?;
        let law3 = t.generation_law(3)?;
        let mut worst = 0.0f64;
        for s in &grid {
            let inner: Vec<f64> = (0..a)
                .map(|j| law2.row_law(j).unwrap().pgf(s).unwrap())
                .collect();
            for i in 0..a {
                let composed = t.row_law(i).pgf(&inner).unwrap();
                let direct = law3.row_law(i).unwrap().pgf(s).unwrap();
                worst = worst.max((composed - direct).abs());
            }
        }
        Ok(worst)
    })();
    check(
        "semigroup-pgf",
        match semigroup {
            Ok(worst) if worst <= 1e-9 => Ok(format!("max gap {worst:.2e}")),
            Ok(worst) => Err(format!("max gap {worst:.2e}")),
            Err(e) => Err(e.to_string()),
        },
    );

    // Generation mean equals the matrix power.
    let mean_check = (|| -> Result<f64, CliError> {
        let law = t.generation_law(4)?;
        let m_mat = t.mean_matrix();
        let pow = m_mat.mul(&m_mat).mul(&m_mat).mul(&m_mat);
        let mut worst = 0.0f64;
        for i in 0..a {
            let mean = law.row_law(i).unwrap().mean();
            worst = worst.max(linalg::sup_diff(&mean, pow.row(i)));
        }
        Ok(worst)
    })();
    check(
        "generation-mean",
        match mean_check {
            Ok(w) if w <= 1e-9 => Ok(format!("max gap {w:.2e}")),
            Ok(w) => Err(format!("max gap {w:.2e}")),
            Err(e) => Err(e.to_string()),
        },
    );

    // Survival from the generation law equals the closed formula, and is
    // monotone in n.
    let survival_check = (|| -> Result<(f64, bool), CliError> {
        let mut worst = 0.0f64;
        let mut monotone = true;
        let mut prev = vec![1.0; a];
        for n in 1..=8usize {
            let s = t.survival_probability(n)?;
            let law = t.generation_law(n)?;
            for i in 0..a {
                let row_sum: f64 = law.hn().row(i).iter().sum();
                worst = worst.max((row_sum - s[i]).abs());
                monotone &= s[i] <= prev[i] + 1e-12;
            }
            prev = s;
        }
        Ok((worst, monotone))
    })();
    check(
        "survival-formula",
        match survival_check {
            Ok((w, mono)) if w <= 1e-10 && mono => Ok(format!("max gap {w:.2e}")),
            Ok((w, mono)) => Err(format!("max gap {w:.2e}, monotone {mono}")),
            Err(e) => Err(e.to_string()),
        },
    );

    let sum = spectral::classify_model(&t)?;
    println!("INFO {}", classification_line(&sum));

    if sum.recurrence == Recurrence::PositiveRecurrent {
        check(
            "eigen-identities",
            if sum.residuals.max() <= cfg.tol {
                Ok(format!("max residual {:.2e}", sum.residuals.max()))
            } else {
                Err(format!("max residual {:.2e}", sum.residuals.max()))
            },
        );
        let conv = spectral::verify_limit_matrix(
            &t,
            &sum,
            spectral::DEFAULT_LIMIT_N_MAX,
            spectral::DEFAULT_LIMIT_THRESHOLD,
        )?;
        check(
            "limit-matrix",
            match conv.converged_at {
                Some(n) => Ok(format!("below 1e-6 at n = {n}")),
                None => Err(format!("final error {:.2e}", conv.final_error)),
            },
        );
        let beta2 = spectral::beta_via_h_series(&t, sum.r)?;
        check(
            "beta-identity",
            if (beta2 - sum.beta).abs() <= 1e-10 * sum.beta.max(1.0) {
                Ok(format!("{:.2e}", (beta2 - sum.beta).abs()))
            } else {
                Err(format!("{beta2} vs {}", sum.beta))
            },
        );
        let sign = |x: f64| {
            if x.abs() <= 1e-10 {
                0i8
            } else if x < 0.0 {
                -1
            } else {
                1
            }
        };
        check(
            "criticality-consistency",
            if sign(sum.alpha) == sign(sum.mu - 1.0) && sign(sum.alpha) == sign(sum.rho - 1.0) {
                Ok(String::new())
            } else {
                Err(format!(
                    "alpha {}, mu-1 {}, rho-1 {}",
                    sum.alpha,
                    sum.mu - 1.0,
                    sum.rho - 1.0
                ))
            },
        );

        match sum.criticality {
            Criticality::Subcritical => {
                let outcome = (|| -> Result<(usize, f64), CliError> {
                    let y = limits::yaglom_law(&t, &sum)?;
                    let mut iter = t.generation_iter();
                    let mut best = f64::INFINITY;
                    for n in 1..=400usize {
                        let law = iter.next_law()?;
                        let mut gap = (law.mn() - y.law().m()).abs();
                        for j in 0..a {
                            gap = gap.max((law.gn()[j] - y.law().g()[j]).abs());
                        }
                        best = best.min(gap);
                        if gap <= 1e-6 {
                            return Ok((n, gap));
                        }
                    }
                    Err(CliError::Verification(format!(
                        "no convergence within n = 400 (best {best:.2e})"
                    )))
                })();
                check(
                    "yaglom-convergence",
                    match outcome {
                        Ok((n, gap)) => Ok(format!("within 1e-6 at n = {n} ({gap:.2e})")),
                        Err(e) => Err(e.to_string()),
                    },
                );
            }
            Criticality::Critical => {
                let target = (1.0 + sum.m) / sum.beta;
                let mut value = f64::NAN;
                let mut prev = f64::NAN;
                for (n, _, m_hat) in t.scaled_mean_iter(1.0).take(10_000) {
                    value = m_hat / n as f64;
                    if n > 32 && ((value - prev) / value).abs() < 1e-3 {
                        break;
                    }
                    prev = value;
                }
                let rel = ((value - target) / target).abs();
                check(
                    "critical-growth",
                    if rel < 0.01 {
                        Ok(format!("m^(n)/n -> {value:.6} vs {target:.6}"))
                    } else {
                        Err(format!("m^(n)/n = {value} vs {target}"))
                    },
                );
            }
            Criticality::Supercritical => {
                let target = (1.0 + sum.m) / (sum.beta * (sum.rho - 1.0));
                let mut value = f64::NAN;
                let mut prev = f64::NAN;
                for (n, _, m_hat) in t.scaled_mean_iter(1.0 / sum.rho).take(10_000) {
                    value = m_hat;
                    if n > 32 && ((value - prev) / value).abs() < 1e-3 {
                        break;
                    }
                    prev = value;
                }
                let rel = ((value - target) / target).abs();
                check(
                    "supercritical-growth",
                    if rel < 0.01 {
                        Ok(format!("scaled m^(n) -> {value:.6} vs {target:.6}"))
                    } else {
                        Err(format!("scaled m^(n) = {value} vs {target}"))
                    },
                );
            }
        }
    }

    if failures.get() > 0 {
        return Err(CliError::Verification(format!(
            "{} checks failed",
            failures.get()
        )));
    }
    Ok(())
}
