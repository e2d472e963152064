use num_complex::Complex64;
use serde::Serialize;

use super::levy::{FreeTriplet, LevyMeasure, RegularForm, VoiculescuPair};
use crate::catalog::{Law, MeasureSpec};
use crate::error::{Error, Result};
use crate::ncpart::{
    boolean_cumulants_from_moments, free_cumulants_from_moments, free_mult_moments, moments_from_boolean_cumulants,
    moments_from_free_cumulants,
};
use crate::quad::integrate;
use crate::scalar::Scalar;
use crate::seq::{SeqKind, SeqN};

/// Free cumulants of `𝔹(μ)`: the boolean cumulants of `μ`, relabelled.
pub fn bp_boolean<T: Scalar>(m: &SeqN<T>) -> Result<SeqN<T>> {
    let r = boolean_cumulants_from_moments(m)?;
    Ok(SeqN::free_cumulants(r.values))
}

/// Moments of `𝔹((μ^{⊞(1−t)})^{⊎t/(1−t)})` and of `μ^{⊎t}` for `0 < t < 1`.
pub fn boolean_free_power_sides<T: Scalar>(m: &SeqN<T>, t: &T) -> Result<(SeqN<T>, SeqN<T>)> {
    m.expect_kind(SeqKind::Moment)?;
    let tf = t.to_f64();
    if !(tf > 0.0 && tf < 1.0) {
        return Err(Error::InvalidArgument(format!("t must lie in (0,1), got {tf}")));
    }
    let one = T::one();
    let inner = moments_from_free_cumulants(&free_cumulants_from_moments(m)?.scale(&(one.clone() - t.clone())))?;
    let boolean = boolean_cumulants_from_moments(&inner)?.scale(&(t.clone() / (one - t.clone())));
    let lhs = moments_from_free_cumulants(&SeqN::free_cumulants(boolean.values))?;
    let rhs = moments_from_boolean_cumulants(&boolean_cumulants_from_moments(m)?.scale(t))?;
    Ok((lhs, rhs))
}

/// `κ_n = λ m_n(ρ)`.
pub fn cfp_seq<T: Scalar>(lambda: &T, m_rho: &SeqN<T>) -> Result<SeqN<T>> {
    m_rho.expect_kind(SeqKind::Moment)?;
    if lambda.to_f64() <= 0.0 {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {}", lambda.to_f64())));
    }
    Ok(SeqN::free_cumulants(m_rho.scale(lambda).values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompoundPoisson {
    pub cumulants: SeqN<f64>,
    /// Set when the jump law is atomic.
    pub triplet: Option<FreeTriplet>,
    /// `(0, λρ)`, set when the jump law is atomic and on `[0, ∞)`.
    pub regular_form: Option<RegularForm>,
}

/// Compound free Poisson `π(λ, ρ)`.
pub fn cfp(lambda: f64, rho: &MeasureSpec, n: usize) -> Result<CompoundPoisson> {
    let cumulants = cfp_seq(&lambda, &rho.moment_seq(n)?)?;
    let (triplet, regular_form) = match rho {
        MeasureSpec::Atomic { atoms } => {
            let t = FreeTriplet::compound_poisson(lambda, atoms)?;
            let rf = if atoms.iter().all(|(x, _)| *x >= 0.0) {
                Some(RegularForm {
                    eta_prime: 0.0,
                    levy: t.levy.clone(),
                })
            } else {
                None
            };
            (Some(t), rf)
        }
        _ => (None, None),
    };
    Ok(CompoundPoisson {
        cumulants,
        triplet,
        regular_form,
    })
}

pub const SYMMETRY_TOL: f64 = 1e-12;

/// `κ_n(σ) = κ_{2n}(μ)` for symmetric `μ`, so that `μ² = m ⊠ σ`.
pub fn main3_factor<T: Scalar>(kappa: &SeqN<T>) -> Result<SeqN<T>> {
    kappa.expect_kind(SeqKind::FreeCumulant)?;
    if kappa.order() % 2 == 1 {
        return Err(Error::InvalidArgument(format!("order must be even, got {}", kappa.order())));
    }
    for (i, v) in kappa.values.iter().enumerate().step_by(2) {
        if v.abs_f64() > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                index: i + 1,
                value: v.to_f64(),
            });
        }
    }
    Ok(SeqN::free_cumulants(kappa.values.iter().skip(1).step_by(2).cloned().collect()))
}

/// Moments of `μ²` and of `m ⊠ σ`, to order `N/2`.
pub fn main3_sides<T: Scalar>(kappa: &SeqN<T>) -> Result<(SeqN<T>, SeqN<T>)> {
    let sigma = main3_factor(kappa)?;
    let half = sigma.order();
    let mu = moments_from_free_cumulants(kappa)?;
    let square = SeqN::moments(mu.values.iter().skip(1).step_by(2).cloned().collect());
    let m = moments_from_free_cumulants(&SeqN::free_cumulants(vec![T::one(); half]))?;
    let ms = moments_from_free_cumulants(&sigma)?;
    let prod = if ms.values.iter().all(Scalar::is_zero) {
        ms
    } else {
        free_mult_moments(&m, &ms)?
    };
    Ok((square, prod))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KurtosisVerdict {
    /// Negative free kurtosis: the measure is not freely infinitely divisible.
    NotFid,
    /// The necessary condition holds; nothing more follows.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kurtosis {
    pub value: f64,
    pub verdict: KurtosisVerdict,
}

/// `kurt^⊞ = m̃₄/m̃₂² − 2` from central moments.
pub fn kurtosis_check(m: &SeqN<f64>) -> Result<Kurtosis> {
    m.expect_kind(SeqKind::Moment)?;
    if m.order() < 4 {
        return Err(Error::InsufficientOrder { need: 4, have: m.order() });
    }
    let (m1, m2, m3, m4) = (m.values[0], m.values[1], m.values[2], m.values[3]);
    let c2 = m2 - m1 * m1;
    let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
    if c2.abs() <= 1e-14 * m2.abs().max(1.0) {
        return Err(Error::Degenerate("zero variance: a point mass, which is freely infinitely divisible".into()));
    }
    let value = c4 / (c2 * c2) - 2.0;
    Ok(Kurtosis {
        value,
        verdict: if value < 0.0 {
            KurtosisVerdict::NotFid
        } else {
            KurtosisVerdict::Inconclusive
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Thm110Condition {
    /// `μ({0}) > 0`.
    AtomAtZero,
    /// `μ({0}) = 0` and `∫₀¹ dμ/x = ∞`.
    DivergentIntegral,
    /// Neither condition holds; the criterion says nothing.
    Neither,
    /// The dyadic increments neither settle nor clearly decay.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm110Report {
    pub condition: Thm110Condition,
    pub atom_at_zero: f64,
    /// `∫_{2^{-k}}^{2^{1-k}} dμ/x` for `k = 1, 2, …`.
    pub increments: Vec<f64>,
    /// Fitted decay rate `β` in `increment_k ≈ C·2^{−kβ}`.
    pub decay_exponent: Option<f64>,
    /// Free regular by the integrability criterion, given FID.
    pub free_regular: bool,
}

pub const DYADIC_LEVELS: usize = 40;
const DIVERGENT_BETA: f64 = 0.02;
const CONVERGENT_BETA: f64 = 0.1;

/// Condition (i) or (ii) for an FID measure on `[0,∞)` (FID is the
/// caller's assertion), with (ii) decided by dyadic increments of `∫ dμ/x`.
pub fn thm110_check(mu: &MeasureSpec) -> Result<Thm110Report> {
    let (lo, _) = mu.support()?;
    if lo < 0.0 {
        return Err(Error::InvalidArgument(format!("support starts at {lo} < 0")));
    }
    let atoms = mu.atoms()?;
    let atom_at_zero: f64 = atoms.iter().filter(|(x, _)| *x == 0.0).map(|(_, w)| w).sum();
    let density = |x: f64| mu.density(x);
    let mut increments = Vec::with_capacity(DYADIC_LEVELS);
    for k in 1..=DYADIC_LEVELS {
        let (a, b) = (0.5f64.powi(k as i32), 0.5f64.powi(k as i32 - 1));
        let mut err = None;
        let ac = integrate(
            |u: f64| match density(u.exp()) {
                Ok(d) => d,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            },
            a.ln(),
            b.ln(),
            1e-300,
            1e-10,
            200,
        )
        .value;
        if let Some(e) = err {
            return Err(e);
        }
        let at: f64 = atoms.iter().filter(|(x, _)| *x > a && *x <= b).map(|(x, w)| w / x).sum();
        increments.push(ac + at);
    }
    let tail = DYADIC_LEVELS - 1;
    let span = 10;
    let (late, early) = (increments[tail], increments[tail - span]);
    let decay_exponent = if late > 0.0 && early > 0.0 {
        Some((early / late).log2() / span as f64)
    } else {
        None
    };
    let condition = if atom_at_zero > 0.0 {
        Thm110Condition::AtomAtZero
    } else {
        match decay_exponent {
            None if late == 0.0 => Thm110Condition::Neither,
            None => Thm110Condition::Inconclusive,
            Some(b) if b <= DIVERGENT_BETA => Thm110Condition::DivergentIntegral,
            Some(b) if b >= CONVERGENT_BETA => Thm110Condition::Neither,
            Some(_) => Thm110Condition::Inconclusive,
        }
    };
    Ok(Thm110Report {
        free_regular: matches!(condition, Thm110Condition::AtomAtZero | Thm110Condition::DivergentIntegral),
        condition,
        atom_at_zero,
        increments,
        decay_exponent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop345 {
    pub a_tau: f64,
    pub phi_minus_zero: f64,
    pub free_regular: bool,
}

/// Regularity through `a(τ) ≥ 0` and `φ(−0) ≥ 0`.
pub fn prop345_check(t: &FreeTriplet) -> Result<Prop345> {
    let pair = VoiculescuPair::from_triplet(t)?;
    let a_tau = pair.left_extremity();
    let phi_minus_zero = pair.phi_minus_zero();
    let slack = 1e-12 * (1.0 + pair.gamma.abs() + pair.total_mass());
    Ok(Prop345 {
        a_tau,
        phi_minus_zero,
        free_regular: a_tau >= 0.0 && phi_minus_zero >= -slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lem345 {
    pub a_mu: f64,
    pub a_tau: f64,
    pub f_left: f64,
    pub holds: bool,
}

/// `a(τ_μ) ≥ F_μ(a(μ) − 0)` for catalog laws with a closed-form triplet.
pub fn lem345_check(name: &str, params: &[f64]) -> Result<Lem345> {
    let law = Law::parse(name, params)?;
    let triplet = FreeTriplet::for_law(name, params)?;
    let pair = VoiculescuPair::from_triplet(&triplet)?;
    let a_mu = law.support().0;
    let a_tau = pair.left_extremity();
    let h = 1e-9 * a_mu.abs().max(1.0);
    let g = law.cauchy(Complex64::new(a_mu - h, 1e-15));
    let f_left = (1.0 / g).re;
    Ok(Lem345 {
        a_mu,
        a_tau,
        f_left,
        holds: a_tau >= f_left - 1e-6,
    })
}

/// Lévy measure of `π(λ, ρ)` for atomic `ρ`, off the origin.
pub fn cfp_levy(lambda: f64, atoms: &[(f64, f64)]) -> Result<LevyMeasure> {
    Ok(FreeTriplet::compound_poisson(lambda, atoms)?.levy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_moments_exact;
    use crate::scalar::{rat, Rational};

    fn q(n: i64) -> Rational {
        rat(n, 1)
    }

    #[test]
    fn bp_examples() {
        let c = rat(3, 2);
        let delta = SeqN::moments(vec![c.clone(), c.powi(2), c.powi(3)]);
        assert_eq!(bp_boolean(&delta).unwrap().values, vec![c, q(0), q(0)]);
        let b = SeqN::moments(vec![q(0), q(1), q(0), q(1), q(0), q(1)]);
        assert_eq!(bp_boolean(&b).unwrap().values, vec![q(0), q(1), q(0), q(0), q(0), q(0)]);
    }

    #[test]
    fn boolean_free_power_identity_on_w_and_m() {
        for name in ["semicircle", "marchenko_pastur"] {
            let m: SeqN<Rational> = catalog_moments_exact(name, &[], 8).unwrap();
            for t in [rat(1, 4), rat(1, 2), rat(3, 4)] {
                let (l, r) = boolean_free_power_sides(&m, &t).unwrap();
                assert_eq!(l, r, "{name} t={t}");
            }
        }
    }

    #[test]
    fn cfp_examples() {
        let r = cfp(1.0, &MeasureSpec::delta(1.0), 6).unwrap();
        assert_eq!(r.cumulants.values, vec![1.0; 6]);
        assert_eq!(r.regular_form.unwrap().eta_prime, 0.0);
        assert!(cfp(0.0, &MeasureSpec::delta(1.0), 6).is_err());
        // π(1, ν) = m ⊠ ν
        let nu: Vec<(Rational, Rational)> = vec![(rat(1, 2), rat(1, 3)), (q(2), rat(2, 3))];
        let mnu = crate::catalog::atomic_moments(&nu, 8);
        let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 8).unwrap();
        let prod = free_cumulants_from_moments(&free_mult_moments(&m, &mnu).unwrap()).unwrap();
        assert_eq!(cfp_seq(&q(1), &mnu).unwrap(), prod);
    }

    #[test]
    fn main3_examples() {
        let kw: SeqN<Rational> = SeqN::free_cumulants(vec![q(0), q(1), q(0), q(0), q(0), q(0), q(0), q(0)]);
        assert_eq!(main3_factor(&kw).unwrap().values, vec![q(1), q(0), q(0), q(0)]);
        let (a, b) = main3_sides(&kw).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values, vec![q(1), q(2), q(5), q(14)]);
        let z: SeqN<Rational> = SeqN::free_cumulants(vec![q(0); 4]);
        assert_eq!(main3_factor(&z).unwrap().values, vec![q(0); 2]);
        let (a, b) = main3_sides(&z).unwrap();
        assert_eq!(a, b);
        let bad = SeqN::free_cumulants(vec![0.0, 1.0, 1e-9, 0.0]);
        assert!(matches!(main3_factor(&bad), Err(Error::NotSymmetric { index: 3, .. })));
    }

    #[test]
    fn kurtosis_examples() {
        let qc = |s: f64| MeasureSpec::law("quarter_circle", &[s]).unwrap().moment_seq(4).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let k = kurtosis_check(&qc(s)).unwrap();
            assert!((k.value + 0.0233443).abs() < 1e-6, "{}", k.value);
            assert_eq!(k.verdict, KurtosisVerdict::NotFid);
        }
        let w = kurtosis_check(&MeasureSpec::law("semicircle", &[]).unwrap().moment_seq(4).unwrap()).unwrap();
        assert!(w.value.abs() < 1e-12 && w.verdict == KurtosisVerdict::Inconclusive);
        let m = kurtosis_check(&MeasureSpec::law("marchenko_pastur", &[]).unwrap().moment_seq(4).unwrap()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!(matches!(kurtosis_check(&MeasureSpec::delta(2.0).moment_seq(4).unwrap()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn thm110_examples() {
        let mp = thm110_check(&MeasureSpec::law("marchenko_pastur", &[]).unwrap()).unwrap();
        assert_eq!(mp.condition, Thm110Condition::DivergentIntegral);
        assert!(mp.free_regular);
        let beta = thm110_check(&MeasureSpec::law("beta_1a", &[0.7]).unwrap()).unwrap();
        assert_eq!(beta.condition, Thm110Condition::DivergentIntegral);
        let atom = MeasureSpec::Atomic { atoms: vec![(0.0, 0.3), (1.0, 0.7)] };
        assert_eq!(thm110_check(&atom).unwrap().condition, Thm110Condition::AtomAtZero);
        let wp = thm110_check(&MeasureSpec::law("semicircle", &[2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(wp.condition, Thm110Condition::Neither);
        assert!(!wp.free_regular);
        let away = MeasureSpec::law("semicircle", &[5.0, 1.0]).unwrap();
        assert_eq!(thm110_check(&away).unwrap().condition, Thm110Condition::Neither);
        assert!(thm110_check(&MeasureSpec::law("semicircle", &[]).unwrap()).is_err());
    }

    #[test]
    fn prop345_agrees_with_regular_form() {
        let cases = [
            FreeTriplet::for_law("semicircle", &[2.0, 1.0]).unwrap(),
            FreeTriplet::for_law("marchenko_pastur", &[0.5]).unwrap(),
            FreeTriplet::for_law("commutator_ww", &[]).unwrap(),
            FreeTriplet::delta(1.5),
            FreeTriplet::delta(-0.5),
            FreeTriplet::compound_poisson(2.0, &[(0.5, 0.5), (3.0, 0.5)]).unwrap(),
            FreeTriplet::compound_poisson(2.0, &[(0.5, 0.5), (3.0, 0.5)]).unwrap().shift(-0.1),
        ];
        for t in &cases {
            let p = prop345_check(t).unwrap();
            let r = super::super::levy::to_regular_form(t).map(|r| r.is_free_regular()).unwrap_or(false);
            assert_eq!(p.free_regular, r, "{t:?}");
        }
    }

    #[test]
    fn lem345_on_catalog() {
        for (name, params) in [
            ("semicircle", vec![0.0, 1.0]),
            ("semicircle", vec![2.0, 1.0]),
            ("marchenko_pastur", vec![1.0]),
            ("marchenko_pastur", vec![3.0]),
            ("marchenko_pastur", vec![0.4]),
        ] {
            let l = lem345_check(name, &params).unwrap();
            assert!(l.holds, "{name} {params:?}: {l:?}");
        }
        let w = lem345_check("semicircle", &[0.0, 1.0]).unwrap();
        assert!((w.f_left + 1.0).abs() < 1e-4 && w.a_tau == 0.0);
    }
}
