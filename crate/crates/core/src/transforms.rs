//! Cauchy, reciprocal Cauchy, energy and free-cumulant transforms, the
//! S-transform at series level, and Stieltjes inversion.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::MeasureSpec;
use crate::error::{Error, Result};
use crate::ncpart::free_cumulants_from_moments;
use crate::quad::trapezoid;
use crate::scalar::Scalar;
use crate::series::FormalSeries;
use crate::seq::{SeqKind, SeqN};

/// Region of the complex plane a [`NumericMap`] is meant to be evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UpperHalfPlane,
    LowerHalfPlane,
    /// `iℂ₊ = {Re z < 0}`.
    LeftHalfPlane,
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::UpperHalfPlane => z.im > 0.0,
            Domain::LowerHalfPlane => z.im < 0.0,
            Domain::LeftHalfPlane => z.re < 0.0,
        }
    }
}

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A complex function with its domain tag.
#[derive(Clone)]
pub struct NumericMap {
    f: Arc<Evaluator>,
    pub domain: Domain,
}

impl std::fmt::Debug for NumericMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NumericMap").field("domain", &self.domain).finish()
    }
}

impl NumericMap {
    pub fn new(domain: Domain, f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        NumericMap { f: Arc::new(f), domain }
    }

    /// The Cauchy transform of `μ` on `ℂ₊`.
    pub fn cauchy_of(mu: &MeasureSpec) -> Result<Self> {
        mu.validate(crate::catalog::GRID_MASS_TOL)?;
        let mu = mu.clone();
        Ok(NumericMap::new(Domain::UpperHalfPlane, move |z| cauchy(&mu, z)))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !self.domain.contains(z) {
            return Err(Error::InvalidArgument(format!("{z} is outside the domain {:?}", self.domain)));
        }
        (self.f)(z)
    }
}

/// `G_μ(z) = ∫ μ(dx)/(z − x)`.
pub fn cauchy(mu: &MeasureSpec, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::RealArgument(z.im));
    }
    match mu {
        MeasureSpec::Atomic { atoms } => Ok(atoms.iter().map(|&(x, w)| w / (z - x)).sum()),
        MeasureSpec::Grid { xs, densities, atoms } => {
            let step = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let guard = step / 10.0;
            if z.im.abs() < guard {
                return Err(Error::BelowGridResolution { im: z.im.abs(), guard });
            }
            Ok(grid_cauchy(xs, densities, z) + atoms.iter().map(|&(x, w)| w / (z - x)).sum::<Complex64>())
        }
        MeasureSpec::Law { .. } => Ok(mu.pushed_law().expect("law variant")?.cauchy(z)),
        _ => Err(Error::Unsupported(format!(
            "Cauchy transform of a {} representation; give atoms, a grid or a law",
            mu.kind_name()
        ))),
    }
}

/// `∫ f(x)/(z − x) dx` for the piecewise-linear interpolant `f` of the grid.
fn grid_cauchy(xs: &[f64], ds: &[f64], z: Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..xs.len() - 1 {
        let (x0, x1, f0, f1) = (xs[i], xs[i + 1], ds[i], ds[i + 1]);
        if f0 == 0.0 && f1 == 0.0 {
            continue;
        }
        let s = (f1 - f0) / (x1 - x0);
        // f(x) = A − s(z − x) with A = f0 + s(z − x0)
        let a = f0 + s * (z - x0);
        let (u0, u1) = (z - x0, z - x1);
        total += a * (u0.ln() - u1.ln()) - s * (x1 - x0);
    }
    total
}

/// `F_μ = 1/G_μ`.
pub fn f_transform(mu: &MeasureSpec, z: Complex64) -> Result<Complex64> {
    let g = cauchy(mu, z)?;
    if g.norm() == 0.0 {
        return Err(Error::ZeroCauchy);
    }
    Ok(1.0 / g)
}

/// Energy function `K_μ(z) = z − F_μ(z)`.
pub fn boolean_k(mu: &MeasureSpec, z: Complex64) -> Result<Complex64> {
    Ok(z - f_transform(mu, z)?)
}

fn moment_prefix<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<Vec<T>> {
    m.expect_kind(SeqKind::Moment)?;
    Ok(m.truncate(n)?.values)
}

/// `G(1/w) = w + m₁w² + … + m_N w^{N+1}`, known modulo `w^{N+2}`.
fn cauchy_series_at_inverse<T: Scalar>(m: &[T]) -> FormalSeries<T> {
    let mut c = vec![T::one()];
    c.extend(m.iter().cloned());
    FormalSeries::new(1, c)
}

/// Free cumulant transform by compositional inversion: with `h(w) = G(1/w)`,
/// `C^⊞(u) = u/h^{⟨-1⟩}(u) − 1 = Σ_{n=1}^N κ_n uⁿ`.
pub fn free_cumulant_series<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<FormalSeries<T>> {
    let m = moment_prefix(m, n)?;
    let h = cauchy_series_at_inverse(&m);
    let hinv = h.reverse()?;
    let c = FormalSeries::identity((n + 2) as usize).div(&hinv)?;
    let one = FormalSeries::constant(T::one(), n + 1);
    Ok(c.sub(&one).truncate(n as i32 + 1))
}

/// Energy function in `w = 1/z`: `K(1/w) = r₁ + r₂w + … + r_N w^{N-1}`.
pub fn energy_series<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<FormalSeries<T>> {
    let m = moment_prefix(m, n)?;
    // K(1/w) = (1/w)(1 − 1/M(w)), M = 1 + Σ m_k w^k
    let mut c = vec![T::one()];
    c.extend(m.iter().cloned());
    let big_m = FormalSeries::new(0, c);
    let one = FormalSeries::constant(T::one(), n + 1);
    Ok(one.sub(&big_m.reciprocal()?).shift(-1).truncate(n as i32))
}

/// `Ψ_μ(z) = Σ_{n≥1} m_n zⁿ`.
pub fn psi_series<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<FormalSeries<T>> {
    Ok(FormalSeries::new(1, moment_prefix(m, n)?))
}

/// `χ_μ = Ψ_μ^{⟨-1⟩}`; needs `m₁ ≠ 0`.
pub fn chi_series<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<FormalSeries<T>> {
    let psi = psi_series(m, n)?;
    if psi.coeff(1).is_zero() {
        return Err(Error::InvalidArgument(
            "S-transform series needs a nonzero first moment".into(),
        ));
    }
    psi.reverse()
}

/// `S_μ(z) = χ_μ(z)(1+z)/z`, coefficients of `z⁰ … z^{N-1}`.
pub fn s_series<T: Scalar>(m: &SeqN<T>, n: usize) -> Result<FormalSeries<T>> {
    let chi = chi_series(m, n)?;
    Ok(chi.shift(-1).mul(&one_plus_z(n)).truncate(n as i32))
}

/// `1 + z`, exact, stored to `O(z^n)`.
fn one_plus_z<T: Scalar>(n: usize) -> FormalSeries<T> {
    let mut v = vec![T::one(), T::one()];
    v.resize(n.max(2), T::zero());
    FormalSeries::new(0, v)
}

/// Series-level checks behind `μ² = m ⊠ σ` for a symmetric `μ`, where `σ` has
/// free cumulants `κ_n(σ) = κ_{2n}(μ)`:
///
/// - `(1+z)·S_{μ²}(z) = S_σ(z)` (that is `S_{μ²} = S_m S_σ`),
/// - the compositional inverse of `z S_λ(z)` is `C^⊞_λ` for `λ = σ` and `λ = μ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareRelationReport {
    pub order: usize,
    pub s_product_deviation: f64,
    pub inverse_sigma_deviation: f64,
    pub inverse_square_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Run the square-relation checks on moments `m_1..=m_{2N}` of a symmetric
/// measure. Exact in rational mode (deviations are then 0).
pub fn s_square_relation_check<T: Scalar>(mu: &SeqN<T>, tolerance: f64) -> Result<SquareRelationReport> {
    mu.expect_kind(SeqKind::Moment)?;
    let n = mu.order() / 2;
    if n < 1 {
        return Err(Error::InsufficientOrder { need: 2, have: mu.order() });
    }
    let kappa = free_cumulants_from_moments(&mu.truncate(2 * n)?)?;
    for (i, k) in kappa.values.iter().enumerate().step_by(2) {
        if k.abs_f64() > 1e-12 {
            return Err(Error::NotSymmetric { index: i + 1, value: k.to_f64() });
        }
    }
    let sigma_k = SeqN::free_cumulants(kappa.values.iter().skip(1).step_by(2).cloned().collect());
    let sigma_m = crate::ncpart::moments_from_free_cumulants(&sigma_k)?;
    let square_m = crate::catalog::square_moments(&mu.truncate(2 * n)?)?;

    let s_sq = s_series(&square_m, n)?;
    let s_sigma = s_series(&sigma_m, n)?;
    let s_product_deviation = s_sq.mul(&one_plus_z(n)).truncate(n as i32).max_abs_diff(&s_sigma);

    let inverse_dev = |s: &FormalSeries<T>, m: &SeqN<T>| -> Result<f64> {
        // z S(z) known to z^n; its inverse to the same order
        let zs = s.shift(1);
        let inv = zs.reverse()?;
        let c = free_cumulant_series(m, n)?;
        Ok(inv.max_abs_diff(&c))
    };
    let inverse_sigma_deviation = inverse_dev(&s_sigma, &sigma_m)?;
    let inverse_square_deviation = inverse_dev(&s_sq, &square_m)?;
    let worst = s_product_deviation.max(inverse_sigma_deviation).max(inverse_square_deviation);
    Ok(SquareRelationReport {
        order: n,
        s_product_deviation,
        inverse_sigma_deviation,
        inverse_square_deviation,
        tolerance,
        pass: worst <= tolerance,
    })
}

/// Default ε-schedule for Stieltjes inversion.
pub const EPS_SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesResult {
    /// Recovered measure (densities renormalized; atoms as detected).
    pub measure: MeasureSpec,
    /// Mass of the raw recovery; densities and atoms were divided by this.
    pub renormalization: f64,
    /// Grid indices where the ε-sequence did not contract.
    pub oscillating: Vec<usize>,
    /// Grid indices clipped from a value below `-1e-6`.
    pub clipped: Vec<usize>,
    /// Grid points carrying a detected point mass, with its mass estimate.
    pub atoms: Vec<(f64, f64)>,
}

/// Density `−Im G(x+iε)/π` extrapolated to `ε = 0` from three values of `ε`
/// halving each time (two Richardson steps, removing the `ε` and `ε²` terms).
pub fn stieltjes_point(g: &NumericMap, x: f64, eps: [f64; 3]) -> Result<StieltjesPoint> {
    let mut a = [0.0; 3];
    for (k, e) in eps.iter().enumerate() {
        a[k] = -g.eval(Complex64::new(x, *e))?.im / PI;
    }
    Ok(StieltjesPoint::from_samples(eps, a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesPoint {
    pub density: f64,
    /// `πε·A(ε)` at the smallest `ε`: tends to the point mass at `x`.
    pub atom_mass: f64,
    pub atom: bool,
    pub oscillating: bool,
}

impl StieltjesPoint {
    /// `a[k] = −Im G(x+iε_k)/π` for `ε = h, h/2, h/4`.
    pub fn from_samples(eps: [f64; 3], a: [f64; 3]) -> Self {
        let density = (8.0 * a[2] - 6.0 * a[1] + a[0]) / 3.0;
        let d1 = a[1] - a[0];
        let d2 = a[2] - a[1];
        let oscillating = d2.abs() > 0.75 * d1.abs() + 1e-6 * (1.0 + a[2].abs());
        let masses: Vec<f64> = eps.iter().zip(a).map(|(e, v)| PI * e * v).collect();
        // for a density πεA(ε) shrinks like ε; for an atom it stays put
        let atom = masses[2] > 1e-4 && masses[2] > 0.5 * masses[0];
        StieltjesPoint {
            density,
            atom_mass: masses[2],
            atom,
            oscillating,
        }
    }
}

/// Recover a grid measure from a Cauchy transform on `ℂ₊`.
pub fn stieltjes_invert(g: &NumericMap, xs: &[f64], eps: [f64; 3]) -> Result<StieltjesResult> {
    let pts: Vec<StieltjesPoint> = xs
        .par_iter()
        .map(|&x| stieltjes_point(g, x, eps))
        .collect::<Result<_>>()?;
    assemble(xs, &pts)
}

pub fn assemble(xs: &[f64], pts: &[StieltjesPoint]) -> Result<StieltjesResult> {
    if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("inversion grid must be strictly increasing with at least two points".into()));
    }
    let mut densities = Vec::with_capacity(xs.len());
    let mut oscillating = vec![];
    let mut clipped = vec![];
    let mut atoms = vec![];
    for (i, p) in pts.iter().enumerate() {
        if p.atom {
            atoms.push((xs[i], p.atom_mass));
            densities.push(0.0);
            continue;
        }
        if p.oscillating {
            oscillating.push(i);
        }
        if p.density < -1e-6 {
            clipped.push(i);
        }
        densities.push(p.density.max(0.0));
    }
    // an atom flattens its neighbours' extrapolation too; zero them
    for &(x, _) in &atoms {
        let i = xs.partition_point(|v| *v < x);
        for j in [i.wrapping_sub(1), i + 1] {
            if j < xs.len() && !atoms.iter().any(|a| a.0 == xs[j]) {
                densities[j] = densities[j].min(pts[j].density.max(0.0));
            }
        }
    }
    let mass = trapezoid(xs, &densities) + atoms.iter().map(|a| a.1).sum::<f64>();
    if !(mass > 0.0) {
        return Err(Error::Degenerate("recovered measure has no mass on the grid".into()));
    }
    let measure = MeasureSpec::Grid {
        xs: xs.to_vec(),
        densities: densities.iter().map(|d| d / mass).collect(),
        atoms: atoms.iter().map(|&(x, w)| (x, w / mass)).collect(),
    };
    Ok(StieltjesResult {
        measure,
        renormalization: mass,
        oscillating,
        clipped,
        atoms,
    })
}

/// Outermost grid points where the density exceeds `threshold`.
pub fn density_support(xs: &[f64], densities: &[f64], threshold: f64) -> Option<(f64, f64)> {
    let first = densities.iter().position(|d| *d > threshold)?;
    let last = densities.iter().rposition(|d| *d > threshold)?;
    Some((xs[first], xs[last]))
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_moments_exact, Law};
    use crate::ncpart::{boolean_cumulants_from_moments, free_mult_moments};
    use crate::scalar::{rat, Rational};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cauchy_examples() {
        let g = cauchy(&MeasureSpec::delta(0.0), c(0.0, 1.0)).unwrap();
        assert!((g - c(0.0, -1.0)).norm() < 1e-15);
        let w = MeasureSpec::law("semicircle", &[]).unwrap();
        let g = cauchy(&w, c(0.0, 2.0)).unwrap();
        assert!((g - c(0.0, (2.0 - 8f64.sqrt()) / 2.0)).norm() < 1e-14);
        let b = MeasureSpec::Atomic { atoms: vec![(-1.0, 0.5), (1.0, 0.5)] };
        let g = cauchy(&b, c(0.0, 2.0)).unwrap();
        assert!((g - c(0.0, -0.4)).norm() < 1e-15);
        assert!(matches!(cauchy(&b, c(1.0, 0.0)), Err(Error::RealArgument(_))));
    }

    #[test]
    fn f_and_k_examples() {
        let d = MeasureSpec::delta(1.5);
        let z = c(0.3, 0.7);
        assert!((f_transform(&d, z).unwrap() - (z - 1.5)).norm() < 1e-14);
        assert!((boolean_k(&d, z).unwrap() - c(1.5, 0.0)).norm() < 1e-14);
        let b = MeasureSpec::law("symmetric_bernoulli", &[]).unwrap();
        let z = c(0.0, 2.0);
        assert!((f_transform(&b, z).unwrap() - (z - 1.0 / z)).norm() < 1e-14);
        assert!((boolean_k(&b, z).unwrap() - 1.0 / z).norm() < 1e-14);
    }

    #[test]
    fn grid_cauchy_matches_law_and_guards_resolution() {
        let xs = linspace(-2.0, 2.0, 2001);
        let ds = xs.iter().map(|&x| Law::parse("semicircle", &[]).unwrap().density(x)).collect();
        let g = MeasureSpec::Grid { xs, densities: ds, atoms: vec![] };
        let w = MeasureSpec::law("semicircle", &[]).unwrap();
        let z = c(0.5, 0.1);
        assert!((cauchy(&g, z).unwrap() - cauchy(&w, z).unwrap()).norm() < 1e-3);
        assert!(matches!(cauchy(&g, c(0.5, 1e-5)), Err(Error::BelowGridResolution { .. })));
    }

    #[test]
    fn mapping_properties_on_catalog() {
        let laws = [
            MeasureSpec::law("semicircle", &[1.0, 2.0]).unwrap(),
            MeasureSpec::law("marchenko_pastur", &[0.5]).unwrap(),
            MeasureSpec::law("symmetric_beta", &[]).unwrap(),
            MeasureSpec::law("quarter_circle", &[]).unwrap(),
            MeasureSpec::law("beta_1a", &[0.6]).unwrap(),
            MeasureSpec::law("chi_squared_1", &[]).unwrap(),
            MeasureSpec::law("commutator_ww", &[]).unwrap(),
        ];
        for mu in &laws {
            for re in [-3.0, -0.5, 0.0, 0.7, 2.5] {
                for im in [0.05, 0.5, 3.0] {
                    let z = c(re, im);
                    let g = cauchy(mu, z).unwrap();
                    assert!(g.im < 0.0, "{mu:?} {z}");
                    let f = f_transform(mu, z).unwrap();
                    assert!(f.im >= im - 1e-9, "{mu:?} {z}: {f}");
                }
            }
        }
    }

    #[test]
    fn cumulant_series_examples() {
        let w: SeqN<Rational> = catalog_moments_exact("semicircle", &[], 8).unwrap();
        let c = free_cumulant_series(&w, 8).unwrap();
        let want: Vec<Rational> = (1..=8).map(|k| if k == 2 { rat(1, 1) } else { rat(0, 1) }).collect();
        assert_eq!(c.coeff_range(1, 9), want);
        let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 8).unwrap();
        let c = free_cumulant_series(&m, 8).unwrap();
        assert_eq!(c.coeff_range(1, 9), vec![rat(1, 1); 8]);
        let d = SeqN::moments(vec![rat(3, 1), rat(9, 1), rat(27, 1)]);
        assert_eq!(free_cumulant_series(&d, 3).unwrap().coeff_range(1, 4), vec![rat(3, 1), rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn energy_series_gives_boolean_cumulants() {
        let b = SeqN::moments(vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let k = energy_series(&b, 6).unwrap();
        assert_eq!(k.coeff_range(0, 6), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let m: SeqN<Rational> = catalog_moments_exact("beta_1a", &[0.75], 8).unwrap();
        let r = boolean_cumulants_from_moments(&m).unwrap();
        assert_eq!(energy_series(&m, 8).unwrap().coeff_range(0, 8), r.values);
    }

    #[test]
    fn s_transform_closed_forms() {
        let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 8).unwrap();
        let s = s_series(&m, 8).unwrap();
        let want: Vec<Rational> = (0..8).map(|k| rat(if k % 2 == 0 { 1 } else { -1 }, 1)).collect();
        assert_eq!(s.coeff_range(0, 8), want);
        let d = SeqN::moments((1..=6).map(|k| rat(3, 1).powi(k)).collect());
        let s = s_series(&d, 6).unwrap();
        assert_eq!(s.coeff(0), rat(1, 3));
        assert!((1..6).all(|k| Scalar::is_zero(&s.coeff(k))));
        assert!(s_series(&SeqN::moments(vec![0.0, 1.0]), 2).is_err());
    }

    #[test]
    fn s_product_rule_on_m_boxtimes_m() {
        let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 8).unwrap();
        let mm = free_mult_moments(&m, &m).unwrap();
        assert_eq!(mm.values[..4].to_vec(), [1, 3, 12, 55].map(|v| rat(v, 1)).to_vec());
        let lhs = s_series(&mm, 8).unwrap();
        let sm = s_series(&m, 8).unwrap();
        assert_eq!(lhs, sm.mul(&sm));
    }

    #[test]
    fn square_relation_on_symmetric_examples() {
        // w: σ = δ₁, w² = m
        let w: SeqN<Rational> = catalog_moments_exact("semicircle", &[], 16).unwrap();
        let r = s_square_relation_check(&w, 0.0).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.order, 8);
        // ½(δ_c + δ_{-c}) with c = 3/2
        let c = rat(3, 2);
        let sb = crate::catalog::atomic_moments(&[(c.clone(), rat(1, 2)), (-c, rat(1, 2))], 12);
        assert!(s_square_relation_check(&sb, 0.0).unwrap().pass);
        // floating, commutator law
        let cw = SeqN::moments(Law::CommutatorWW.moments::<f64>(16).unwrap());
        let r = s_square_relation_check(&cw, 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(matches!(
            s_square_relation_check(&SeqN::moments(vec![1.0, 2.0, 5.0, 14.0]), 1e-10),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn stieltjes_recovers_semicircle_and_mp() {
        let w = MeasureSpec::law("semicircle", &[]).unwrap();
        let xs = linspace(-2.5, 2.5, 501);
        let res = stieltjes_invert(&NumericMap::cauchy_of(&w).unwrap(), &xs, EPS_SCHEDULE).unwrap();
        let MeasureSpec::Grid { densities, .. } = &res.measure else { panic!() };
        let mut worst: f64 = 0.0;
        for (x, d) in xs.iter().zip(densities) {
            if x.abs() <= 1.9 {
                worst = worst.max((d * res.renormalization - w.density(*x).unwrap()).abs());
            }
        }
        assert!(worst <= 1e-3, "max error {worst}");
        assert!(res.atoms.is_empty());

        let m = MeasureSpec::law("marchenko_pastur", &[0.5]).unwrap();
        let (a, b) = ((1.0 - 0.5f64.sqrt()).powi(2), (1.0 + 0.5f64.sqrt()).powi(2));
        let xs = linspace(-0.5, 3.5, 801);
        let res = stieltjes_invert(&NumericMap::cauchy_of(&m).unwrap(), &xs, EPS_SCHEDULE).unwrap();
        let MeasureSpec::Grid { densities, .. } = &res.measure else { panic!() };
        for (x, d) in xs.iter().zip(densities) {
            if *x > a + 0.1 && *x < b - 0.1 {
                let err = (d * res.renormalization - m.density(*x).unwrap()).abs();
                assert!(err <= 1e-3, "x={x}: {err}");
            }
        }
        assert_eq!(res.atoms.len(), 1);
        assert!((res.atoms[0].0).abs() < 1e-12 && (res.atoms[0].1 - 0.5).abs() < 1e-2, "{:?}", res.atoms);
    }

    #[test]
    fn stieltjes_flags_point_mass() {
        let d = MeasureSpec::delta(0.0);
        let xs = linspace(-1.0, 1.0, 41);
        let res = stieltjes_invert(&NumericMap::cauchy_of(&d).unwrap(), &xs, EPS_SCHEDULE).unwrap();
        assert_eq!(res.atoms.len(), 1);
        let MeasureSpec::Grid { densities, .. } = &res.measure else { panic!() };
        assert!(densities.iter().all(|v| *v < 1e-3), "{densities:?}");
    }
}
