//! Free additive, free multiplicative and boolean convolutions, powers, and
//! the free commutator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::{dilate_seq, MeasureSpec};
use crate::error::{Error, Result};
use crate::ncpart::{
    boolean_cumulants_from_moments, free_cumulants_from_moments, free_mult_moments, moments_from_boolean_cumulants,
    moments_from_free_cumulants, square_cumulants,
};
use crate::scalar::Scalar;
use crate::seq::{hankel_min_pivot, SeqKind, SeqN};
use crate::series::FormalSeries;
use crate::transforms::{assemble, f_transform, psi_series, s_series, StieltjesPoint, StieltjesResult};

/// `κ(μ ⊞ ν) = κ(μ) + κ(ν)`.
pub fn free_add_seq<T: Scalar>(ka: &SeqN<T>, kb: &SeqN<T>) -> Result<SeqN<T>> {
    ka.expect_kind(SeqKind::FreeCumulant)?;
    kb.expect_kind(SeqKind::FreeCumulant)?;
    if ka.order() != kb.order() {
        return Err(Error::InvalidArgument(format!(
            "cumulant orders differ ({} vs {})",
            ka.order(),
            kb.order()
        )));
    }
    Ok(SeqN::free_cumulants(
        ka.values.iter().zip(&kb.values).map(|(a, b)| a.clone() + b.clone()).collect(),
    ))
}

/// Free cumulants of `μ ⊞ ν` to order `n`.
pub fn free_add(mu: &MeasureSpec, nu: &MeasureSpec, n: usize) -> Result<SeqN<f64>> {
    free_add_seq(&mu.free_cumulant_seq(n)?, &nu.free_cumulant_seq(n)?)
}

/// `κ_n ↦ t κ_n` for `t ≥ 1`, where `μ^{⊞t}` exists for every `μ`.
pub fn free_power<T: Scalar>(kappa: &SeqN<T>, t: &T) -> Result<SeqN<T>> {
    if t.to_f64() < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "free power t = {} < 1 needs a freely infinitely divisible input; use free_power_fid",
            t.to_f64()
        )));
    }
    scale_cumulants(kappa, t)
}

/// `κ_n ↦ t κ_n` for any `t > 0`; the caller asserts `μ` is freely
/// infinitely divisible.
pub fn free_power_fid<T: Scalar>(kappa: &SeqN<T>, t: &T) -> Result<SeqN<T>> {
    if t.to_f64() <= 0.0 {
        return Err(Error::InvalidArgument(format!("free power needs t > 0, got {}", t.to_f64())));
    }
    scale_cumulants(kappa, t)
}

fn scale_cumulants<T: Scalar>(kappa: &SeqN<T>, t: &T) -> Result<SeqN<T>> {
    kappa.expect_kind(SeqKind::FreeCumulant)?;
    Ok(kappa.scale(t))
}

/// `r(μ ⊎ ν) = r(μ) + r(ν)`.
pub fn boolean_add<T: Scalar>(ra: &SeqN<T>, rb: &SeqN<T>) -> Result<SeqN<T>> {
    ra.expect_kind(SeqKind::BooleanCumulant)?;
    rb.expect_kind(SeqKind::BooleanCumulant)?;
    if ra.order() != rb.order() {
        return Err(Error::InvalidArgument(format!(
            "boolean cumulant orders differ ({} vs {})",
            ra.order(),
            rb.order()
        )));
    }
    Ok(SeqN::boolean_cumulants(
        ra.values.iter().zip(&rb.values).map(|(a, b)| a.clone() + b.clone()).collect(),
    ))
}

/// `r_n ↦ t r_n`, `t ≥ 0`.
pub fn boolean_power<T: Scalar>(r: &SeqN<T>, t: &T) -> Result<SeqN<T>> {
    r.expect_kind(SeqKind::BooleanCumulant)?;
    if t.to_f64() < 0.0 {
        return Err(Error::InvalidArgument(format!("boolean power needs t ≥ 0, got {}", t.to_f64())));
    }
    Ok(r.scale(t))
}

/// Moments of `μ ⊎ ν` to order `n`.
pub fn boolean_add_measures(mu: &MeasureSpec, nu: &MeasureSpec, n: usize) -> Result<SeqN<f64>> {
    let r = boolean_add(
        &boolean_cumulants_from_moments(&mu.moment_seq(n)?)?,
        &boolean_cumulants_from_moments(&nu.moment_seq(n)?)?,
    )?;
    moments_from_boolean_cumulants(&r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultMethod {
    /// Sum over non-crossing partitions with Kreweras complements.
    #[default]
    Combinatorial,
    /// Formal subordination through the S-transform of the positive factor.
    Series,
}

/// Moments of `μ ⊠ ν` with `μ` on `[0, ∞)` (or `ν` symmetric for the
/// combinatorial method).
pub fn free_mult_seq<T: Scalar>(mu: &SeqN<T>, nu: &SeqN<T>, method: MultMethod) -> Result<SeqN<T>> {
    mu.expect_kind(SeqKind::Moment)?;
    nu.expect_kind(SeqKind::Moment)?;
    match method {
        MultMethod::Combinatorial => free_mult_moments(mu, nu),
        MultMethod::Series => free_mult_series(mu, nu),
    }
}

/// `η = Ψ_{μ⊠ν}` from `η = Ψ_ν(z / S_μ(η))`, one order per sweep.
fn free_mult_series<T: Scalar>(mu: &SeqN<T>, nu: &SeqN<T>) -> Result<SeqN<T>> {
    let n = mu.order().min(nu.order());
    if mu.values.iter().all(Scalar::is_zero) && nu.values.iter().all(Scalar::is_zero) {
        return Err(Error::BothDeltaZero);
    }
    if mu.values[0].is_zero() {
        if mu.values.iter().all(Scalar::is_zero) {
            // δ₀ ⊠ ν = δ₀
            return Ok(SeqN::moments(vec![T::zero(); n]));
        }
        return Err(Error::InvalidArgument(
            "series method needs the positive factor first, with nonzero mean".into(),
        ));
    }
    let mu = mu.truncate(n)?;
    let nu = nu.truncate(n)?;
    let inv_s = s_series(&mu, n)?.reciprocal()?;
    let psi_nu = psi_series(&nu, n)?;
    let mut eta = FormalSeries::new(1, vec![T::zero(); n]);
    for _ in 0..n {
        let arg = inv_s.compose(&eta)?.shift(1);
        eta = psi_nu.compose(&arg)?;
    }
    Ok(SeqN::moments(eta.coeff_range(1, n as i32 + 1)))
}

/// Whether a moment sequence passes the Stieltjes (support in `[0,∞)`)
/// Hankel tests available at its order. Evidence only.
pub fn looks_nonnegative(m: &SeqN<f64>) -> bool {
    if m.order() == 0 {
        return true;
    }
    let scale = m.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    // shifted sequence m_{k+1}/m_1 is the moment sequence of x μ(dx)/m_1
    let m1 = m.values[0];
    if m1 < 0.0 {
        return false;
    }
    if m1 == 0.0 {
        return m.values.iter().all(|v| *v == 0.0);
    }
    let shifted = SeqN::moments(m.values[1..].iter().map(|v| v / m1).collect());
    hankel_min_pivot(m) > -1e-9 * scale && hankel_min_pivot(&shifted) > -1e-9 * scale
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeMultResult {
    pub moments: SeqN<f64>,
    /// `max(μ({0}), ν({0}))` when both are known.
    pub mass_at_zero: Option<f64>,
    /// Whether the operands were swapped to put the positive factor first.
    pub swapped: bool,
}

/// `μ ⊠ ν` at moment level, with the point mass at zero from
/// `(μ⊠ν)({0}) = max(μ({0}), ν({0}))`.
pub fn free_mult(mu: &MeasureSpec, nu: &MeasureSpec, n: usize, method: MultMethod) -> Result<FreeMultResult> {
    let ma = mu.moment_seq(n)?;
    let mb = nu.moment_seq(n)?;
    let positive = |spec: &MeasureSpec, m: &SeqN<f64>| spec.is_nonnegative().unwrap_or_else(|| looks_nonnegative(m));
    let (pa, pb) = (positive(mu, &ma), positive(nu, &mb));
    let swapped = !pa && pb;
    if !pa && !pb {
        return Err(Error::InvalidArgument(
            "free multiplicative convolution needs one operand supported on [0,∞)".into(),
        ));
    }
    let (first, second) = if swapped { (&mb, &ma) } else { (&ma, &mb) };
    let moments = free_mult_seq(first, second, method)?;
    let mass_at_zero = match (mu.mass_at_zero()?, nu.mass_at_zero()?) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    Ok(FreeMultResult {
        moments,
        mass_at_zero,
        swapped,
    })
}

/// `μ^{⊠s}` for an integer `s ≥ 1` by repeated products.
pub fn free_mult_power<T: Scalar>(m: &SeqN<T>, s: usize) -> Result<SeqN<T>> {
    if s == 0 {
        return Err(Error::InvalidArgument("⊠-power needs s ≥ 1".into()));
    }
    let mut acc = m.clone();
    for _ in 1..s {
        acc = free_mult_moments(&acc, m)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check1418 {
    pub s: usize,
    pub t: f64,
    pub order: usize,
    /// Largest entrywise difference relative to `max(1, |rhs|)`.
    pub deviation: f64,
    pub lhs: SeqN<f64>,
    pub rhs: SeqN<f64>,
}

/// Both sides of `D_{t^{s−1}}((μ^{⊠s})^{⊞t}) = (μ^{⊞t})^{⊠s}` at moment
/// level, for a free regular `μ` (caller-asserted).
pub fn check_1418(mu: &SeqN<f64>, s: usize, t: f64, n: usize) -> Result<Check1418> {
    if !(1..=4).contains(&s) {
        return Err(Error::InvalidArgument(format!("s must lie in 1..=4, got {s}")));
    }
    if n > 10 {
        return Err(Error::OrderTooLarge { what: "check_1418", requested: n, cap: 10 });
    }
    let mu = mu.truncate(n)?;
    let lhs_inner = free_mult_power(&mu, s)?;
    let lhs_pow = moments_from_free_cumulants(&free_power_fid(&free_cumulants_from_moments(&lhs_inner)?, &t)?)?;
    let lhs = dilate_seq(&lhs_pow, &t.powi(s as i32 - 1))?;
    let mu_t = moments_from_free_cumulants(&free_power_fid(&free_cumulants_from_moments(&mu)?, &t)?)?;
    let rhs = free_mult_power(&mu_t, s)?;
    let deviation = crate::scalar::max_rel_diff(&lhs.values, &rhs.values);
    Ok(Check1418 {
        s,
        t,
        order: n,
        deviation,
        lhs,
        rhs,
    })
}

/// Free cumulants of `μ₁ □ μ₂` from those of `μ₁, μ₂`, through
/// `((μ₁□μ₂)^{⊞1/2})² = μ₁² ⊠ μ₂²` and the even-cumulant reduction.
pub fn commutator<T: Scalar>(k1: &SeqN<T>, k2: &SeqN<T>, n: usize) -> Result<SeqN<T>> {
    k1.expect_kind(SeqKind::FreeCumulant)?;
    k2.expect_kind(SeqKind::FreeCumulant)?;
    if n % 2 == 1 || n == 0 {
        return Err(Error::InvalidArgument(format!("commutator order must be even and positive, got {n}")));
    }
    if n > 16 {
        return Err(Error::OrderTooLarge { what: "commutator", requested: n, cap: 16 });
    }
    let half = n / 2;
    // (a)+(b): only the even cumulants enter
    let alpha = |k: &SeqN<T>| -> Result<Vec<T>> { Ok(k.truncate(n)?.values.into_iter().skip(1).step_by(2).collect()) };
    let (a1, a2) = (alpha(k1)?, alpha(k2)?);
    if a1.iter().all(Scalar::is_zero) && a2.iter().all(Scalar::is_zero) {
        return Ok(SeqN::free_cumulants(vec![T::zero(); n]));
    }
    // (c) moments of μ_i²
    let sq1 = moments_from_free_cumulants(&square_cumulants(&a1)?)?;
    let sq2 = moments_from_free_cumulants(&square_cumulants(&a2)?)?;
    // (d) ρ = μ₁² ⊠ μ₂²
    let rho = free_mult_moments(&sq1, &sq2)?;
    // (e) s = (μ₁□μ₂)^{⊞1/2}, symmetric with s² = ρ
    let mut ms = vec![T::zero(); n];
    for j in 0..half {
        ms[2 * j + 1] = rho.values[j].clone();
    }
    // (f)+(g)
    let ks = free_cumulants_from_moments(&SeqN::moments(ms))?;
    Ok(ks.scale(&T::from_i64(2)))
}

/// Damping and tolerance of the subordination iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationOptions {
    pub damping: f64,
    pub restart_damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for SubordinationOptions {
    fn default() -> Self {
        SubordinationOptions {
            damping: 0.5,
            restart_damping: 0.25,
            tolerance: 1e-10,
            max_iter: 500,
        }
    }
}

/// Fixed point of the subordination equations at one `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationState {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SubordinationState {
    /// `F_{μ⊞ν}(z) = F_μ(ω₁)`.
    pub fn cauchy(&self, mu: &MeasureSpec) -> Result<Complex64> {
        Ok(1.0 / f_transform(mu, self.omega1)?)
    }
}

/// Solve `ω₁ = z + h_ν(z + h_μ(ω₁))`, `h = F − id`, by damped iteration from
/// `start`; on failure restart from `z` with the smaller damping.
pub fn subordinate(
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    z: Complex64,
    start: Complex64,
    opts: &SubordinationOptions,
) -> Result<SubordinationState> {
    let h = |m: &MeasureSpec, w: Complex64| -> Result<Complex64> { Ok(f_transform(m, w)? - w) };
    let step = |w: Complex64| -> Result<(Complex64, Complex64)> {
        let w2 = z + h(mu, w)?;
        // keep the argument in ℂ₊ where F is defined
        let w2 = Complex64::new(w2.re, w2.im.max(z.im));
        Ok((z + h(nu, w2)?, w2))
    };
    let mut best = None;
    for (damping, init) in [(opts.damping, start), (opts.restart_damping, z)] {
        let mut w = init;
        let mut residual = f64::INFINITY;
        for it in 1..=opts.max_iter {
            let (tw, _) = step(w)?;
            let tw = Complex64::new(tw.re, tw.im.max(z.im));
            let next = w + damping * (tw - w);
            residual = (tw - w).norm();
            w = next;
            if residual <= opts.tolerance * (1.0 + w.norm()) {
                let (_, w2) = step(w)?;
                return Ok(SubordinationState {
                    omega1: w,
                    omega2: w2,
                    residual,
                    iterations: it,
                    converged: true,
                });
            }
        }
        let (_, w2) = step(w)?;
        let state = SubordinationState {
            omega1: w,
            omega2: w2,
            residual,
            iterations: opts.max_iter,
            converged: false,
        };
        if best.as_ref().is_none_or(|b: &SubordinationState| state.residual < b.residual) {
            best = Some(state);
        }
    }
    Ok(best.expect("at least one attempt"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeAddDensity {
    pub inversion: StieltjesResult,
    /// Grid indices (with the worst residual) where subordination did not converge.
    pub failures: Vec<(usize, f64)>,
}

/// Density of `μ ⊞ ν` on the grid `xs` by analytic subordination followed by
/// Stieltjes inversion over the ε-schedule.
pub fn free_add_density(
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    xs: &[f64],
    eps: [f64; 3],
    opts: &SubordinationOptions,
) -> Result<FreeAddDensity> {
    mu.validate(crate::catalog::GRID_MASS_TOL)?;
    nu.validate(crate::catalog::GRID_MASS_TOL)?;
    let per_point: Vec<(StieltjesPoint, Option<f64>)> = xs
        .par_iter()
        .map(|&x| -> Result<(StieltjesPoint, Option<f64>)> {
            let mut a = [0.0; 3];
            let mut worst: Option<f64> = None;
            // largest ε first; each solve warm-starts the next
            let mut start = Complex64::new(x, eps[0]);
            for (k, e) in eps.iter().enumerate() {
                let z = Complex64::new(x, *e);
                let st = subordinate(mu, nu, z, start.max_im(z.im), opts)?;
                if !st.converged {
                    worst = Some(worst.map_or(st.residual, |w: f64| w.max(st.residual)));
                }
                start = st.omega1;
                a[k] = -st.cauchy(mu)?.im / std::f64::consts::PI;
            }
            Ok((StieltjesPoint::from_samples(eps, a), worst))
        })
        .collect::<Result<_>>()?;
    let pts: Vec<StieltjesPoint> = per_point.iter().map(|p| p.0).collect();
    let failures = per_point
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.1.map(|r| (i, r)))
        .collect();
    Ok(FreeAddDensity {
        inversion: assemble(xs, &pts)?,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvOp {
    FreeAdd,
    FreeMult,
    BooleanAdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvMethod {
    Combinatorial,
    Series,
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvTarget {
    Order(usize),
    Grid(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvRequest {
    pub a: MeasureSpec,
    pub b: MeasureSpec,
    pub op: ConvOp,
    pub target: ConvTarget,
    pub method: ConvMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvOutput {
    /// Free cumulants for `⊞`, moments for `⊎`.
    Sequence(SeqN<f64>),
    Mult(FreeMultResult),
    Density(FreeAddDensity),
}

impl ConvRequest {
    pub fn run(&self) -> Result<ConvOutput> {
        match (&self.op, &self.target, self.method) {
            (ConvOp::FreeAdd, ConvTarget::Grid(xs), ConvMethod::Analytic) => Ok(ConvOutput::Density(
                free_add_density(&self.a, &self.b, xs, crate::transforms::EPS_SCHEDULE, &SubordinationOptions::default())?,
            )),
            (ConvOp::FreeAdd, ConvTarget::Order(n), _) => Ok(ConvOutput::Sequence(free_add(&self.a, &self.b, *n)?)),
            (ConvOp::FreeMult, ConvTarget::Order(n), ConvMethod::Combinatorial) => {
                Ok(ConvOutput::Mult(free_mult(&self.a, &self.b, *n, MultMethod::Combinatorial)?))
            }
            (ConvOp::FreeMult, ConvTarget::Order(n), ConvMethod::Series) => {
                Ok(ConvOutput::Mult(free_mult(&self.a, &self.b, *n, MultMethod::Series)?))
            }
            (ConvOp::BooleanAdd, ConvTarget::Order(n), _) => {
                Ok(ConvOutput::Sequence(boolean_add_measures(&self.a, &self.b, *n)?))
            }
            (op, target, method) => Err(Error::Unsupported(format!(
                "{op:?} with {method:?} on {}",
                match target {
                    ConvTarget::Order(_) => "an order",
                    ConvTarget::Grid(_) => "a grid",
                }
            ))),
        }
    }
}

trait MaxIm {
    fn max_im(self, im: f64) -> Self;
}

impl MaxIm for Complex64 {
    fn max_im(self, im: f64) -> Self {
        Complex64::new(self.re, self.im.max(im))
    }
}
