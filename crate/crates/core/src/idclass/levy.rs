use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadValue};
use crate::scalar::Scalar;
use crate::seq::SeqN;

/// Piecewise-linear Lévy density on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyGrid {
    pub xs: Vec<f64>,
    pub densities: Vec<f64>,
}

/// Free Meixner Lévy density `c√(4b−(x−a)²)/(πx²)` on `|x−a| < 2√b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meixner {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Meixner {
    pub fn support(&self) -> (f64, f64) {
        let r = 2.0 * self.b.sqrt();
        (self.a - r, self.a + r)
    }

    pub fn density(&self, x: f64) -> f64 {
        let d = 4.0 * self.b - (x - self.a).powi(2);
        if d <= 0.0 || x == 0.0 {
            0.0
        } else {
            self.c * d.sqrt() / (std::f64::consts::PI * x * x)
        }
    }
}

/// A Lévy measure: atoms away from 0 plus an optional density part.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyMeasure {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<LevyGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meixner: Option<Meixner>,
}

const LEVY_REL_TOL: f64 = 1e-12;

impl LevyMeasure {
    pub fn zero() -> Self {
        LevyMeasure::default()
    }

    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let l = LevyMeasure {
            atoms,
            ..Default::default()
        };
        l.validate()?;
        Ok(l)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.grid.is_none() && self.meixner.is_none()
    }

    pub fn is_atomic(&self) -> bool {
        self.grid.is_none() && self.meixner.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        for &(x, w) in &self.atoms {
            if x == 0.0 || !x.is_finite() {
                return Err(Error::InvalidMeasure(format!("Lévy atom at {x}; ν({{0}}) must be 0")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("Lévy atom mass {w} at {x} must be positive")));
            }
        }
        if let Some(g) = &self.grid {
            if g.xs.len() < 2 || g.xs.len() != g.densities.len() {
                return Err(Error::InvalidMeasure("Lévy grid needs ≥ 2 points and matching lengths".into()));
            }
            if g.xs.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidMeasure("Lévy grid abscissas must increase".into()));
            }
            if g.densities.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                return Err(Error::InvalidMeasure("Lévy grid densities must be finite and ≥ 0".into()));
            }
        }
        if let Some(m) = &self.meixner {
            if !(m.b > 0.0 && m.c > 0.0 && m.a.is_finite()) {
                return Err(Error::ParamDomain {
                    law: "free_meixner".into(),
                    reason: format!("need b > 0 and c > 0, got b = {}, c = {}", m.b, m.c),
                });
            }
        }
        if !self.min_one_t2().is_finite() {
            return Err(Error::InvalidMeasure("∫ min(1,t²) ν(dt) is not finite".into()));
        }
        Ok(())
    }

    /// `∫ g dν`. The density parts are integrated with splits at `-1, 0, 1`.
    pub fn integrate<V: QuadValue>(&self, g: impl Fn(f64) -> V) -> V {
        let mut total = V::zero();
        for &(x, w) in &self.atoms {
            total = total + g(x) * w;
        }
        if let Some(grid) = &self.grid {
            for (xw, dw) in grid.xs.windows(2).zip(grid.densities.windows(2)) {
                if dw[0] == 0.0 && dw[1] == 0.0 {
                    continue;
                }
                let slope = (dw[1] - dw[0]) / (xw[1] - xw[0]);
                let f = |x: f64| g(x) * (dw[0] + slope * (x - xw[0]));
                for (a, b) in split(xw[0], xw[1]) {
                    total = total + integrate(f, a, b, 1e-15, LEVY_REL_TOL, 200).value;
                }
            }
        }
        if let Some(m) = &self.meixner {
            let (lo, hi) = m.support();
            let theta = |x: f64| 2.0 * ((x - lo) / (hi - lo)).sqrt().asin();
            let f = |th: f64| {
                let s = (0.5 * th).sin();
                let x = lo + (hi - lo) * s * s;
                let w = m.density(x) * 0.5 * (hi - lo) * th.sin();
                if w == 0.0 {
                    V::zero()
                } else {
                    g(x) * w
                }
            };
            for (a, b) in split(lo, hi) {
                total = total + integrate(f, theta(a), theta(b), 1e-15, LEVY_REL_TOL, 2000).value;
            }
        }
        total
    }

    pub fn min_one_t2(&self) -> f64 {
        self.integrate(|t| (t * t).min(1.0))
    }

    /// Infimum of the support.
    pub fn left_extremity(&self) -> Option<f64> {
        let mut lo: Option<f64> = None;
        let mut upd = |x: f64| lo = Some(lo.map_or(x, |l| l.min(x)));
        for &(x, _) in &self.atoms {
            upd(x);
        }
        if let Some(g) = &self.grid {
            for (i, d) in g.densities.iter().enumerate() {
                if *d > 0.0 {
                    upd(g.xs[i.saturating_sub(1)]);
                    break;
                }
            }
        }
        if let Some(m) = &self.meixner {
            upd(m.support().0);
        }
        lo
    }

    /// Whether `ν` gives mass to `(−∞, 0]`.
    pub fn charges_nonpositive(&self) -> bool {
        self.left_extremity().is_some_and(|l| l < 0.0)
    }

    /// `∫_{(0,1]} t ν(dt)`, or `None` when it diverges.
    pub fn small_jump_mean(&self) -> Option<f64> {
        if let Some(m) = &self.meixner {
            let (lo, hi) = m.support();
            if lo < 0.0 && hi > 0.0 {
                return None;
            }
        }
        Some(self.integrate(|t| if t > 0.0 && t <= 1.0 { t } else { 0.0 }))
    }

    /// `∫ min(1,|t|) ν(dt)` over `(0,∞)`, or `None` when it diverges.
    pub fn positive_min_one_t(&self) -> Option<f64> {
        self.small_jump_mean()?;
        Some(self.integrate(|t| if t > 0.0 { t.min(1.0) } else { 0.0 }))
    }

    /// Total mass, or `None` when infinite.
    pub fn total_mass(&self) -> Option<f64> {
        if let Some(m) = &self.meixner {
            let (lo, hi) = m.support();
            if lo <= 0.0 && hi >= 0.0 {
                return None;
            }
        }
        Some(self.integrate(|_| 1.0))
    }

    /// Image under `t ↦ −t`.
    pub fn reflect(&self) -> Self {
        LevyMeasure {
            atoms: self.atoms.iter().map(|&(x, w)| (-x, w)).collect(),
            grid: self.grid.as_ref().map(|g| LevyGrid {
                xs: g.xs.iter().rev().map(|x| -x).collect(),
                densities: g.densities.iter().rev().copied().collect(),
            }),
            meixner: self.meixner.map(|m| Meixner { a: -m.a, ..m }),
        }
    }

    pub fn scale_mass(&self, c: f64) -> Self {
        LevyMeasure {
            atoms: self.atoms.iter().map(|&(x, w)| (x, c * w)).collect(),
            grid: self.grid.as_ref().map(|g| LevyGrid {
                xs: g.xs.clone(),
                densities: g.densities.iter().map(|d| c * d).collect(),
            }),
            meixner: self.meixner.map(|m| Meixner { c: c * m.c, ..m }),
        }
    }
}

fn split(a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![a];
    pts.extend([-1.0, 0.0, 1.0].into_iter().filter(|p| *p > a && *p < b));
    pts.push(b);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Free (or classical) characteristic triplet in the truncated form with
/// `1_{[−1,1]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeTriplet {
    pub eta: f64,
    pub a: f64,
    #[serde(default)]
    pub levy: LevyMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalTriplet {
    pub eta: f64,
    pub a: f64,
    #[serde(default)]
    pub levy: LevyMeasure,
}

/// Λ: the classical triplet of `μ` becomes the free triplet of `Λ(μ)`.
pub fn lambda_map(t: &ClassicalTriplet) -> FreeTriplet {
    FreeTriplet {
        eta: t.eta,
        a: t.a,
        levy: t.levy.clone(),
    }
}

pub fn lambda_inv(t: &FreeTriplet) -> ClassicalTriplet {
    ClassicalTriplet {
        eta: t.eta,
        a: t.a,
        levy: t.levy.clone(),
    }
}

/// `η′ = η − ∫_{(0,1]} t ν(dt)` for an atomic `ν`.
pub fn regular_drift<T: Scalar>(eta: &T, atoms: &[(T, T)]) -> T {
    let one = T::one();
    atoms.iter().fold(eta.clone(), |acc, (x, w)| {
        if x.to_f64() > 0.0 && x.to_f64() <= one.to_f64() {
            acc - x.clone() * w.clone()
        } else {
            acc
        }
    })
}

/// Inverse of [`regular_drift`].
pub fn truncated_drift<T: Scalar>(eta_prime: &T, atoms: &[(T, T)]) -> T {
    atoms.iter().fold(eta_prime.clone(), |acc, (x, w)| {
        if x.to_f64() > 0.0 && x.to_f64() <= 1.0 {
            acc + x.clone() * w.clone()
        } else {
            acc
        }
    })
}

/// Free cumulants of the triplet `(η, a, ν)` with atomic `ν`.
pub fn triplet_cumulants<T: Scalar>(eta: &T, a: &T, atoms: &[(T, T)], n: usize) -> SeqN<T> {
    let mut k = vec![T::zero(); n];
    for (j, slot) in k.iter_mut().enumerate() {
        let p = j + 1;
        let mut acc = atoms.iter().fold(T::zero(), |acc, (x, w)| {
            let big = x.to_f64().abs() > 1.0;
            if p == 1 && !big {
                acc
            } else {
                acc + x.powi(p) * w.clone()
            }
        });
        if p == 1 {
            acc = acc + eta.clone();
        }
        if p == 2 {
            acc = acc + a.clone();
        }
        *slot = acc;
    }
    SeqN::free_cumulants(k)
}

impl FreeTriplet {
    pub fn new(eta: f64, a: f64, levy: LevyMeasure) -> Result<Self> {
        let t = FreeTriplet { eta, a, levy };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() {
            return Err(Error::InvalidArgument("η must be finite".into()));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a must be ≥ 0, got {}", self.a)));
        }
        self.levy.validate()
    }

    /// `π(λ, ρ)` for atomic `ρ`: `ν = λρ` off 0 and the matching drift.
    pub fn compound_poisson(lambda: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("rate must be positive, got {lambda}")));
        }
        let atoms: Vec<(f64, f64)> = jumps.iter().filter(|(x, _)| *x != 0.0).map(|&(x, w)| (x, lambda * w)).collect();
        let eta = atoms.iter().filter(|(x, _)| x.abs() <= 1.0).map(|(x, w)| x * w).sum();
        FreeTriplet::new(eta, 0.0, LevyMeasure::atomic(atoms)?)
    }

    /// Triplets of the catalog laws that have one in closed form.
    pub fn for_law(name: &str, params: &[f64]) -> Result<Self> {
        match crate::catalog::Law::parse(name, params)? {
            crate::catalog::Law::Semicircle { mean, var } => FreeTriplet::new(mean, var, LevyMeasure::zero()),
            crate::catalog::Law::MarchenkoPastur { rate } => FreeTriplet::compound_poisson(rate, &[(1.0, 1.0)]),
            crate::catalog::Law::CommutatorWW => FreeTriplet::compound_poisson(2.0, &[(1.0, 0.5), (-1.0, 0.5)]),
            other => Err(Error::Unsupported(format!("no closed-form Lévy triplet for {}", other.name()))),
        }
    }

    pub fn delta(c: f64) -> Self {
        FreeTriplet {
            eta: c,
            a: 0.0,
            levy: LevyMeasure::zero(),
        }
    }

    /// Free cumulants `κ₁ = η + ∫ t 1_{|t|>1} ν`, `κ₂ = a + ∫ t² ν`, `κ_n = ∫ tⁿ ν`.
    pub fn cumulants(&self, n: usize) -> SeqN<f64> {
        let mut k: Vec<f64> = (1..=n)
            .map(|p| {
                self.levy.integrate(|t| {
                    if p == 1 && t.abs() <= 1.0 {
                        0.0
                    } else {
                        t.powi(p as i32)
                    }
                })
            })
            .collect();
        if n >= 1 {
            k[0] += self.eta;
        }
        if n >= 2 {
            k[1] += self.a;
        }
        SeqN::free_cumulants(k)
    }

    /// `μ ⊞ δ_c`.
    pub fn shift(&self, c: f64) -> Self {
        FreeTriplet {
            eta: self.eta + c,
            ..self.clone()
        }
    }

    /// Image of `μ` under `x ↦ −x`.
    pub fn reflect(&self) -> Self {
        FreeTriplet {
            eta: -self.eta,
            a: self.a,
            levy: self.levy.reflect(),
        }
    }

    /// Voiculescu transform `φ(w) = η + a/w + ∫ (wt/(w−t) − t 1_{[−1,1]}(t)) ν(dt)`.
    pub fn phi(&self, w: Complex64) -> Complex64 {
        let integral = self.levy.integrate(|t| {
            if t.abs() <= 1.0 {
                t * t / (w - t)
            } else {
                w * t / (w - t)
            }
        });
        let mut v = Complex64::new(self.eta, 0.0) + integral;
        if self.a != 0.0 {
            v += self.a / w;
        }
        v
    }

    /// `φ′(w) = −a/w² − ∫ t²/(w−t)² ν(dt)`.
    pub fn phi_prime(&self, w: Complex64) -> Complex64 {
        let integral = self.levy.integrate(|t| t * t / ((w - t) * (w - t)));
        let mut v = -integral;
        if self.a != 0.0 {
            v -= self.a / (w * w);
        }
        v
    }

    /// `φ` on the real axis left of the singular set.
    pub fn phi_real(&self, x: f64) -> f64 {
        let integral = self.levy.integrate(|t| if t.abs() <= 1.0 { t * t / (x - t) } else { x * t / (x - t) });
        self.eta + integral + if self.a != 0.0 { self.a / x } else { 0.0 }
    }

    pub fn phi_prime_real(&self, x: f64) -> f64 {
        let integral = self.levy.integrate(|t| t * t / ((x - t) * (x - t)));
        -integral - if self.a != 0.0 { self.a / (x * x) } else { 0.0 }
    }

    /// Left end of the singular set of `φ`: `supp ν`, plus 0 when `a > 0`.
    pub fn singular_left(&self) -> Option<f64> {
        let nu = self.levy.left_extremity();
        if self.a > 0.0 {
            Some(nu.map_or(0.0, |l| l.min(0.0)))
        } else {
            nu
        }
    }
}

/// `C^⊞(z) = η′z + ∫ (1/(1−zt) − 1) ν(dt)` with `ν` on `(0,∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularForm {
    pub eta_prime: f64,
    pub levy: LevyMeasure,
}

impl RegularForm {
    /// Free regular iff the drift is nonnegative.
    pub fn is_free_regular(&self) -> bool {
        self.eta_prime >= 0.0
    }

    pub fn to_triplet(&self) -> Result<FreeTriplet> {
        let small = self
            .levy
            .small_jump_mean()
            .ok_or_else(|| Error::NotRegularForm("∫ min(1,t) ν(dt) diverges".into()))?;
        FreeTriplet::new(self.eta_prime + small, 0.0, self.levy.clone())
    }
}

pub fn to_regular_form(t: &FreeTriplet) -> Result<RegularForm> {
    if t.a > 0.0 {
        return Err(Error::NotRegularForm(format!("semicircular part a = {} > 0", t.a)));
    }
    if t.levy.charges_nonpositive() {
        return Err(Error::NotRegularForm("Lévy measure charges (−∞, 0]".into()));
    }
    let small = t
        .levy
        .small_jump_mean()
        .ok_or_else(|| Error::NotRegularForm("∫ min(1,t) ν(dt) diverges".into()))?;
    Ok(RegularForm {
        eta_prime: t.eta - small,
        levy: t.levy.clone(),
    })
}

/// `(γ, τ)` in `φ(z) = γ + ∫ (1+xz)/(z−x) τ(dx)`, available when `ν` is atomic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiculescuPair {
    pub gamma: f64,
    pub tau: Vec<(f64, f64)>,
}

impl VoiculescuPair {
    /// `γ = η + ∫ (t/(1+t²) − t 1_{[−1,1]}) ν`, `τ = a δ₀ + t²/(1+t²) ν(dt)`.
    pub fn from_triplet(t: &FreeTriplet) -> Result<Self> {
        if !t.levy.is_atomic() {
            return Err(Error::Unsupported("τ is only extracted for atomic Lévy measures".into()));
        }
        let mut gamma = t.eta;
        let mut tau = Vec::new();
        if t.a > 0.0 {
            tau.push((0.0, t.a));
        }
        for &(x, w) in &t.levy.atoms {
            gamma += w * (x / (1.0 + x * x) - if x.abs() <= 1.0 { x } else { 0.0 });
            tau.push((x, w * x * x / (1.0 + x * x)));
        }
        Ok(VoiculescuPair { gamma, tau })
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        self.tau
            .iter()
            .fold(Complex64::new(self.gamma, 0.0), |acc, &(x, w)| acc + w * (1.0 + x * z) / (z - x))
    }

    pub fn total_mass(&self) -> f64 {
        self.tau.iter().map(|(_, w)| w).sum()
    }

    /// `a(τ)`, `+∞` for `τ = 0`.
    pub fn left_extremity(&self) -> f64 {
        self.tau.iter().filter(|(_, w)| *w > 0.0).map(|(x, _)| *x).fold(f64::INFINITY, f64::min)
    }

    /// `φ(−0)`, the limit along the negative axis.
    pub fn phi_minus_zero(&self) -> f64 {
        let mut v = self.gamma;
        for &(x, w) in &self.tau {
            if w == 0.0 {
                continue;
            }
            if x == 0.0 {
                return f64::NEG_INFINITY;
            }
            v -= w / x;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeixnerReport {
    pub levy: LevyMeasure,
    pub support: (f64, f64),
    pub on_positive_axis: bool,
    pub positive_min_one_t: Option<f64>,
    pub total_mass: Option<f64>,
    /// Free regular once the drift in regular form is nonnegative.
    pub regular_given_nonnegative_drift: bool,
}

pub fn levy_meixner(a: f64, b: f64, c: f64) -> Result<MeixnerReport> {
    let levy = LevyMeasure {
        meixner: Some(Meixner { a, b, c }),
        ..Default::default()
    };
    levy.validate()?;
    let support = Meixner { a, b, c }.support();
    let on_positive_axis = support.0 >= 0.0;
    let positive_min_one_t = levy.positive_min_one_t();
    Ok(MeixnerReport {
        support,
        on_positive_axis,
        total_mass: levy.total_mass(),
        regular_given_nonnegative_drift: on_positive_axis && positive_min_one_t.is_some(),
        positive_min_one_t,
        levy,
    })
}
