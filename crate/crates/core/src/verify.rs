//! Built-in identity checks with a deterministic report.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{catalog_moments, catalog_moments_exact, commutator_ww_edge, dilate, push_square, Law, MeasureSpec, LAW_NAMES};
use crate::conv::{check_1418, commutator, free_add_density, free_mult_seq, MultMethod, SubordinationOptions};
use crate::error::{Error, Result};
use crate::idclass::{
    boolean_free_power_sides, cfp_seq, kurtosis_check, levy_meixner, main3_factor, main3_sides, positivity_scan,
    prop345_check, regular_drift, thm110_check, to_regular_form, truncated_drift, FreeTriplet, Thm110Condition,
};
use crate::ncpart::{
    boolean_cumulants_from_moments, free_cumulants_from_moments, free_mult_moments, moments_from_boolean_cumulants,
    moments_from_free_cumulants,
};
use crate::scalar::{max_abs_diff, max_rel_diff, rat, Rational, Scalar};
use crate::catalog::atomic_moments;
use crate::seq::SeqN;
use crate::transforms::{density_support, free_cumulant_series, linspace, s_series, EPS_SCHEDULE};

pub const DEFAULT_SEED: u64 = 20_110_418;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Identities,
    Densities,
    Regularity,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "identities" => Ok(Suite::Identities),
            "densities" => Ok(Suite::Densities),
            "regularity" => Ok(Suite::Regularity),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (expected all, identities, densities or regularity)"
            ))),
        }
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Identities => "identities",
            Suite::Densities => "densities",
            Suite::Regularity => "regularity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub anchor: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

impl Check {
    fn measured(name: &'static str, anchor: &'static str, deviation: f64, tolerance: f64) -> Self {
        Check {
            name,
            anchor,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
            error: None,
        }
    }

    fn from_result(name: &'static str, anchor: &'static str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(d) => Check::measured(name, anchor, d, tolerance),
            Err(e) => Check {
                name,
                anchor,
                deviation: f64::NAN,
                tolerance,
                pass: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Fixed-width table; byte-identical across runs with the same seed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "freeconv verify suite={} seed={}", self.suite.name(), self.seed);
        let _ = writeln!(
            out,
            "{:<32} {:<40} {:>12} {:>10}  {}",
            "check", "anchor", "deviation", "tolerance", "result"
        );
        for c in &self.checks {
            let dev = if c.deviation.is_nan() {
                "n/a".to_string()
            } else {
                format!("{:.3e}", c.deviation)
            };
            let _ = write!(
                out,
                "{:<32} {:<40} {:>12} {:>10.1e}  {}",
                c.name,
                c.anchor,
                dev,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            );
            if let Some(e) = &c.error {
                let _ = write!(out, " ({e})");
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(out, "{passed}/{} passed", self.checks.len());
        out
    }
}

pub fn run_verify(suite: Suite, seed: u64) -> Report {
    let mut checks = Vec::new();
    if matches!(suite, Suite::All | Suite::Identities) {
        checks.extend(identities(seed));
    }
    if matches!(suite, Suite::All | Suite::Densities) {
        checks.extend(densities());
    }
    if matches!(suite, Suite::All | Suite::Regularity) {
        checks.extend(regularity(seed));
    }
    Report { suite, seed, checks }
}

/// Random inputs shared by the checks and the tests.
pub mod gen {
    use super::*;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|w| rat(w, total)).collect()
    }

    /// Atomic law on `[0, ∞)` with nonzero mean: 1–3 atoms at `p/q`.
    pub fn positive_atomic(rng: &mut ChaCha8Rng) -> Vec<(Rational, Rational)> {
        let k = rng.gen_range(1..=3);
        let w = weights(rng, k);
        let mut atoms: Vec<(Rational, Rational)> = w
            .into_iter()
            .map(|w| (rat(rng.gen_range(0..=6), rng.gen_range(1..=3)), w))
            .collect();
        if atoms.iter().all(|(x, _)| x.is_zero()) {
            atoms[0].0 = rat(1, 1);
        }
        atoms
    }

    /// Symmetric atomic law: 1–2 pairs `±p/q`.
    pub fn symmetric_atomic(rng: &mut ChaCha8Rng) -> Vec<(Rational, Rational)> {
        let k = rng.gen_range(1..=2);
        let w = weights(rng, k);
        let mut atoms = Vec::new();
        for w in w {
            let x = rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
            let half = w / rat(2, 1);
            atoms.push((x.clone(), half.clone()));
            atoms.push((-x, half));
        }
        atoms
    }

    /// Rate in `(0, 3]` with denominator ≤ 4.
    pub fn rate(rng: &mut ChaCha8Rng) -> Rational {
        let d = rng.gen_range(1..=4);
        rat(rng.gen_range(1..=3 * d), d)
    }

    /// Free cumulants of a random symmetric compound free Poisson law.
    pub fn even_cumulants(rng: &mut ChaCha8Rng, n: usize) -> SeqN<Rational> {
        let lambda = rate(rng);
        let rho = symmetric_atomic(rng);
        cfp_seq(&lambda, &atomic_moments(&rho, n)).expect("positive rate")
    }

    pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
        rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
    }
}

fn exact_dev(a: &SeqN<Rational>, b: &SeqN<Rational>) -> f64 {
    if a == b {
        0.0
    } else {
        max_abs_diff(&a.values, &b.values).max(f64::MIN_POSITIVE)
    }
}

fn ones(n: usize) -> SeqN<Rational> {
    SeqN::free_cumulants(vec![rat(1, 1); n])
}

fn b_moments(n: usize) -> SeqN<Rational> {
    SeqN::moments((1..=n).map(|k| rat(if k % 2 == 0 { 1 } else { 0 }, 1)).collect())
}

/// `w² = m` in exact arithmetic, order 10.
pub fn w2_equals_m() -> Result<f64> {
    let sq = push_square(&MeasureSpec::law("semicircle", &[])?)?;
    let got: Vec<Rational> = sq.pushed_law().expect("law")?.moments_exact(10)?;
    let want: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 10)?;
    Ok(exact_dev(&SeqN::moments(got), &want))
}

/// `(μ⊠ν)² = μ⊠μ⊠ν²` for random atomic `μ ≥ 0`, symmetric `ν`, order `n`.
pub fn square_product(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let mu = atomic_moments(&gen::positive_atomic(&mut rng), 2 * n);
        let nu_atoms = gen::symmetric_atomic(&mut rng);
        let nu = atomic_moments(&nu_atoms, 2 * n);
        let prod = free_mult_moments(&mu, &nu)?;
        let lhs = SeqN::moments(prod.values.iter().skip(1).step_by(2).cloned().collect());
        let nu2: Vec<(Rational, Rational)> = nu_atoms.iter().map(|(x, w)| (x.clone() * x.clone(), w.clone())).collect();
        let mu_n = mu.truncate(n)?;
        let rhs = free_mult_moments(&free_mult_moments(&mu_n, &mu_n)?, &atomic_moments(&nu2, n))?;
        worst = worst.max(exact_dev(&lhs, &rhs));
    }
    Ok(worst)
}

/// `D_{t^{s−1}}((m^{⊠s})^{⊞t}) = (m^{⊞t})^{⊠s}` over `s ∈ {2,3}`, `t ∈ {0.5,1,2,3.5}`.
pub fn power_commutation_family() -> Result<f64> {
    let m = catalog_moments("marchenko_pastur", &[], 8)?;
    let mut worst = 0.0f64;
    for s in [2, 3] {
        for t in [0.5, 1.0, 2.0, 3.5] {
            worst = worst.max(check_1418(&m, s, t, 8)?.deviation);
        }
    }
    Ok(worst)
}

/// `w □ w` has free cumulants `(0,2,0,2,…)`.
pub fn commutator_ww() -> Result<f64> {
    let mut kw = vec![rat(0, 1); 8];
    kw[1] = rat(1, 1);
    let kw = SeqN::free_cumulants(kw);
    let got = commutator(&kw, &kw, 8)?;
    let want = SeqN::free_cumulants((1..=8).map(|k| rat(if k % 2 == 0 { 2 } else { 0 }, 1)).collect());
    Ok(exact_dev(&got, &want))
}

/// `m □ m = π(2, m ⊠ b)`, order `n`.
pub fn m_box_m(n: usize) -> Result<f64> {
    let lhs = commutator(&ones(n), &ones(n), n)?;
    let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], n)?;
    let jump = free_mult_moments(&m, &b_moments(n))?;
    let rhs = cfp_seq(&rat(2, 1), &jump)?;
    Ok(exact_dev(&lhs, &rhs))
}

/// `(μ² ⊠ b)^{⊞2} = μ □ μ` for random symmetric `μ`, order `n`.
pub fn mu2_b_commutator(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0x5151);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let k = gen::even_cumulants(&mut rng, 2 * n);
        let rhs = commutator(&k, &k, n)?;
        let mu = moments_from_free_cumulants(&k)?;
        let sq = SeqN::moments(mu.values.iter().skip(1).step_by(2).cloned().collect());
        let prod = free_mult_moments(&sq, &b_moments(n))?;
        let lhs = free_cumulants_from_moments(&prod)?.scale(&rat(2, 1));
        worst = worst.max(exact_dev(&lhs, &rhs));
    }
    Ok(worst)
}

/// The commutator ignores odd cumulants.
pub fn commutator_odd_invariance(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0x0dd);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let k1 = gen::even_cumulants(&mut rng, n);
        let k2 = gen::even_cumulants(&mut rng, n);
        let base = commutator(&k1, &k2, n)?;
        let perturb = |k: &SeqN<Rational>, rng: &mut ChaCha8Rng| {
            let mut v = k.values.clone();
            for i in (0..n).step_by(2) {
                v[i] = gen::small_rational(rng);
            }
            SeqN::free_cumulants(v)
        };
        let p1 = perturb(&k1, &mut rng);
        let p2 = perturb(&k2, &mut rng);
        let moved = commutator(&p1, &p2, n)?;
        worst = worst.max(exact_dev(&base, &moved));
        if base.values.iter().step_by(2).any(|v| !v.is_zero()) {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

/// Symmetric `π(λ, ρ)`: the factor is `π(λ, ρ²)` and `μ² = m ⊠ σ`.
pub fn square_factorization(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0x7272);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let lambda = gen::rate(&mut rng);
        let rho = gen::symmetric_atomic(&mut rng);
        let k = cfp_seq(&lambda, &atomic_moments(&rho, 2 * n))?;
        let sigma = main3_factor(&k)?;
        let rho2: Vec<(Rational, Rational)> = rho.iter().map(|(x, w)| (x.clone() * x.clone(), w.clone())).collect();
        let want = cfp_seq(&lambda, &atomic_moments(&rho2, n))?;
        worst = worst.max(exact_dev(&sigma, &want));
        let (a, b) = main3_sides(&k)?;
        worst = worst.max(exact_dev(&a, &b));
    }
    Ok(worst)
}

/// `𝔹((μ^{⊞(1−t)})^{⊎t/(1−t)}) = μ^{⊎t}` for `μ ∈ {w, m}`, `t ∈ {¼, ½, ¾}`.
pub fn boolean_free_power(n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for name in ["semicircle", "marchenko_pastur"] {
        let m = catalog_moments(name, &[], n)?;
        for t in [0.25, 0.5, 0.75] {
            let (l, r) = boolean_free_power_sides(&m, &t)?;
            worst = worst.max(max_rel_diff(&l.values, &r.values));
        }
    }
    Ok(worst)
}

/// Free cumulants by series reversion vs the non-crossing recursion, all
/// catalog laws.
pub fn cumulant_paths(n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for name in LAW_NAMES {
        let params: &[f64] = if name == "beta_1a" { &[0.7] } else { &[] };
        let m = catalog_moments(name, params, n)?;
        let series = free_cumulant_series(&m, n)?;
        let via_series = series.coeff_range(1, n as i32 + 1);
        let via_nc = free_cumulants_from_moments(&m)?;
        worst = worst.max(max_rel_diff(&via_series, &via_nc.values));
    }
    Ok(worst)
}

/// `S_{μ⊠ν} = S_μ S_ν` on random atomic pairs on `[0, ∞)`.
pub fn s_product_rule(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0x5);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let to_f = |a: Vec<(Rational, Rational)>| -> Vec<(f64, f64)> {
            a.iter().map(|(x, w)| (x.to_f64(), w.to_f64())).collect()
        };
        let mu = atomic_moments(&to_f(gen::positive_atomic(&mut rng)), n);
        let nu = atomic_moments(&to_f(gen::positive_atomic(&mut rng)), n);
        let prod = free_mult_seq(&mu, &nu, MultMethod::Combinatorial)?;
        let lhs = s_series(&prod, n)?;
        let rhs = s_series(&mu, n)?.mul(&s_series(&nu, n)?);
        let l = lhs.coeff_range(0, n as i32);
        let r = rhs.coeff_range(0, n as i32);
        worst = worst.max(max_rel_diff(&l, &r));
    }
    Ok(worst)
}

/// Moment ↔ cumulant and drift round trips on random floating inputs.
pub fn round_trips_float(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0xf1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let k = SeqN::free_cumulants((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>());
        let back = free_cumulants_from_moments(&moments_from_free_cumulants(&k)?)?;
        worst = worst.max(max_rel_diff(&back.values, &k.values));
        let r = SeqN::boolean_cumulants((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>());
        let back = boolean_cumulants_from_moments(&moments_from_boolean_cumulants(&r)?)?;
        worst = worst.max(max_rel_diff(&back.values, &r.values));
        let eta: f64 = rng.gen_range(-3.0..3.0);
        let atoms: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(0.01..2.5), rng.gen_range(0.1..2.0))).collect();
        let there = regular_drift(&eta, &atoms);
        worst = worst.max((truncated_drift(&there, &atoms) - eta).abs() / eta.abs().max(1.0));
    }
    Ok(worst)
}

/// The same round trips in exact arithmetic.
pub fn round_trips_exact(seed: u64, trials: usize, n: usize) -> Result<f64> {
    let mut rng = gen::rng(seed ^ 0xe1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let k = SeqN::free_cumulants((0..n).map(|_| gen::small_rational(&mut rng)).collect());
        let back = free_cumulants_from_moments(&moments_from_free_cumulants(&k)?)?;
        worst = worst.max(exact_dev(&back, &k));
        let r = SeqN::boolean_cumulants((0..n).map(|_| gen::small_rational(&mut rng)).collect());
        let back = boolean_cumulants_from_moments(&moments_from_boolean_cumulants(&r)?)?;
        worst = worst.max(exact_dev(&back, &r));
        let eta = gen::small_rational(&mut rng);
        let atoms: Vec<(Rational, Rational)> = (0..3)
            .map(|_| (rat(rng.gen_range(1..=10), rng.gen_range(1..=4)), rat(rng.gen_range(1..=5), 3)))
            .collect();
        if truncated_drift(&regular_drift(&eta, &atoms), &atoms) != eta {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

/// Density of `m ⊞ m̃` against the closed-form commutator density on
/// `|t| ≤ 2.2`, and the recovered right edge against the exact one.
pub struct CommutatorDensity {
    pub max_error: f64,
    pub edge: f64,
    pub edge_error: f64,
    pub failures: usize,
}

pub const EDGE_THRESHOLD: f64 = 1e-3;

pub fn commutator_density() -> Result<CommutatorDensity> {
    let m = MeasureSpec::law("marchenko_pastur", &[])?;
    let mt = dilate(&m, -1.0)?;
    let xs = linspace(-4.0, 4.0, 801);
    let res = free_add_density(&m, &mt, &xs, EPS_SCHEDULE, &SubordinationOptions::default())?;
    let MeasureSpec::Grid { densities, .. } = &res.inversion.measure else {
        return Err(Error::Degenerate("inversion returned no grid".into()));
    };
    let dens: Vec<f64> = densities.iter().map(|d| d * res.inversion.renormalization).collect();
    let law = Law::parse("commutator_ww", &[])?;
    let max_error = xs
        .iter()
        .zip(&dens)
        .filter(|(x, _)| x.abs() <= 2.2)
        .map(|(x, d)| (d - law.density(*x)).abs())
        .fold(0.0, f64::max);
    let (_, edge) = density_support(&xs, &dens, EDGE_THRESHOLD).ok_or(Error::Degenerate("empty density".into()))?;
    Ok(CommutatorDensity {
        max_error,
        edge,
        edge_error: (edge - commutator_ww_edge()).abs(),
        failures: res.failures.len(),
    })
}

/// `w ⊞ w` against the semicircle of variance 2 on `|x| ≤ 2.6`.
pub fn semicircle_sum_density() -> Result<f64> {
    let w = MeasureSpec::law("semicircle", &[])?;
    let xs = linspace(-3.0, 3.0, 301);
    let res = free_add_density(&w, &w, &xs, EPS_SCHEDULE, &SubordinationOptions::default())?;
    let MeasureSpec::Grid { densities, .. } = &res.inversion.measure else {
        return Err(Error::Degenerate("inversion returned no grid".into()));
    };
    let law = Law::parse("semicircle", &[0.0, 2.0])?;
    Ok(xs
        .iter()
        .zip(densities)
        .filter(|(x, _)| x.abs() <= 2.6)
        .map(|(x, d)| (d * res.inversion.renormalization - law.density(*x)).abs())
        .fold(0.0, f64::max))
}

pub const QUARTER_CIRCLE_KURTOSIS: f64 = -0.0233443;

/// Worst `|kurt^⊞ − (−0.0233443)|` over `σ ∈ {0.5, 1, 2}`.
pub fn quarter_circle_kurtosis() -> Result<f64> {
    let mut worst = 0.0f64;
    for s in [0.5, 1.0, 2.0] {
        let k = kurtosis_check(&catalog_moments("quarter_circle", &[s], 4)?)?;
        worst = worst.max((k.value - QUARTER_CIRCLE_KURTOSIS).abs());
    }
    Ok(worst)
}

/// Worst `|edge − (2t − 2√t)|` for `w₊^{⊞t}` over `t ∈ {¼, ½, 1, 2}`.
pub fn w_plus_edges() -> Result<f64> {
    let wp = FreeTriplet::for_law("semicircle", &[2.0, 1.0])?;
    let r = positivity_scan(&wp, &[0.25, 0.5, 1.0, 2.0])?;
    Ok(r.points
        .iter()
        .map(|p| (p.left_edge - (2.0 * p.t - 2.0 * p.t.sqrt())).abs())
        .fold(0.0, f64::max))
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn identities(seed: u64) -> Vec<Check> {
    vec![
        Check::from_result("w2_equals_m", "w² = m", 1e-12, w2_equals_m()),
        Check::from_result("square_product", "(μ⊠ν)² = μ⊠μ⊠ν²", 0.0, square_product(seed, 100, 8)),
        Check::from_result("power_commutation", "D_{t^{s-1}}((μ^⊠s)^⊞t) = (μ^⊞t)^⊠s", 1e-9, power_commutation_family()),
        Check::from_result("commutator_ww_cumulants", "w□w: κ = (0,2,0,2,…)", 0.0, commutator_ww()),
        Check::from_result("m_box_m", "m□m = π(2, m⊠b)", 0.0, m_box_m(10)),
        Check::from_result("mu2_b_commutator", "(μ²⊠b)^⊞2 = μ□μ", 0.0, mu2_b_commutator(seed, 20, 8)),
        Check::from_result("commutator_odd_invariance", "μ₁□μ₂ sees even cumulants only", 0.0, commutator_odd_invariance(seed, 20, 8)),
        Check::from_result("square_factorization", "μ² = m⊠σ, σ = π(λ, ρ²)", 0.0, square_factorization(seed, 50, 8)),
        Check::from_result("boolean_free_power", "𝔹((μ^⊞(1-t))^⊎t/(1-t)) = μ^⊎t", 1e-10, boolean_free_power(8)),
        Check::from_result("cumulant_paths", "C^⊞ by reversion = NC recursion", 1e-10, cumulant_paths(10)),
        Check::from_result("s_product_rule", "S_{μ⊠ν} = S_μ S_ν", 1e-9, s_product_rule(seed, 50, 8)),
        Check::from_result("round_trips_float", "moments ↔ cumulants, η ↔ η′", 1e-12, round_trips_float(seed, 200, 8)),
        Check::from_result("round_trips_exact", "moments ↔ cumulants, η ↔ η′", 0.0, round_trips_exact(seed, 200, 10)),
    ]
}

fn densities() -> Vec<Check> {
    let mut out = Vec::new();
    match commutator_density() {
        Ok(c) => {
            out.push(Check::measured("commutator_ww_density", "w□w = m ⊞ m̃ density", c.max_error, 2e-3));
            out.push(Check::measured("commutator_ww_edge", "edge √((11+5√5)/2)", c.edge_error, 5e-2));
        }
        Err(e) => {
            out.push(Check::from_result("commutator_ww_density", "w□w = m ⊞ m̃ density", 2e-3, Err(e.clone())));
            out.push(Check::from_result("commutator_ww_edge", "edge √((11+5√5)/2)", 5e-2, Err(e)));
        }
    }
    out.push(Check::from_result("semicircle_sum_density", "w ⊞ w = semicircle(0,2)", 1e-3, semicircle_sum_density()));
    out
}

fn regularity(seed: u64) -> Vec<Check> {
    let mut rng = gen::rng(seed ^ 0x4e6);
    vec![
        Check::from_result("quarter_circle_kurtosis", "kurt^⊞ ≈ −0.0233443", 1e-6, quarter_circle_kurtosis()),
        Check::from_result(
            "w_plus_not_regular",
            "w₊ has a semicircular part",
            0.0,
            FreeTriplet::for_law("semicircle", &[2.0, 1.0]).map(|t| flag(to_regular_form(&t).is_err())),
        ),
        Check::from_result("w_plus_edges", "edge of w₊^⊞t = 2t − 2√t", 1e-3, w_plus_edges()),
        Check::from_result(
            "cfp_regular",
            "π(λ, ρ) free regular for ρ ≥ 0",
            0.0,
            (|| -> Result<f64> {
                let mut ok = true;
                for _ in 0..20 {
                    let lambda = gen::rate(&mut rng).to_f64();
                    let rho: Vec<(f64, f64)> = gen::positive_atomic(&mut rng)
                        .iter()
                        .map(|(x, w)| (x.to_f64(), w.to_f64()))
                        .collect();
                    let t = FreeTriplet::compound_poisson(lambda, &rho)?;
                    ok &= to_regular_form(&t)?.is_free_regular();
                    ok &= prop345_check(&t)?.free_regular;
                    ok &= positivity_scan(&t, &[0.5, 1.0, 2.0])?.nonnegative_evidence;
                }
                Ok(flag(ok))
            })(),
        ),
        Check::from_result(
            "thm110_free_poisson",
            "∫₀¹ dm/x = ∞",
            0.0,
            MeasureSpec::law("marchenko_pastur", &[])
                .and_then(|m| thm110_check(&m))
                .map(|r| flag(r.condition == Thm110Condition::DivergentIntegral)),
        ),
        Check::from_result(
            "thm110_beta",
            "∫₀¹ p_a(x)/x dx = ∞",
            0.0,
            MeasureSpec::law("beta_1a", &[0.7])
                .and_then(|m| thm110_check(&m))
                .map(|r| flag(r.condition == Thm110Condition::DivergentIntegral)),
        ),
        Check::from_result(
            "meixner_support",
            "a − 2√b ≥ 0 ⇒ ν on [0,∞)",
            0.0,
            levy_meixner(3.0, 1.0, 1.0)
                .and_then(|r| Ok(flag(r.regular_given_nonnegative_drift && !levy_meixner(0.0, 1.0, 1.0)?.on_positive_axis))),
        ),
    ]
}
