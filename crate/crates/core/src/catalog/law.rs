//! Named laws with closed-form densities, atoms and moments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ncpart::{catalan, nc_sum};
use crate::quad::{integrate, QuadValue};
use crate::scalar::Scalar;

/// Largest moment order served from closed forms.
pub const MAX_CLOSED_FORM_ORDER: usize = 64;
/// Largest moment order served by adaptive quadrature.
pub const MAX_QUADRATURE_ORDER: usize = 32;

pub const LAW_NAMES: [&str; 8] = [
    "semicircle",
    "marchenko_pastur",
    "symmetric_bernoulli",
    "symmetric_beta",
    "quarter_circle",
    "beta_1a",
    "chi_squared_1",
    "commutator_ww",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    /// Semicircle with the given mean and variance.
    Semicircle { mean: f64, var: f64 },
    /// Free Poisson with rate `rate` and jump size 1; `rate = 1` is `m`.
    MarchenkoPastur { rate: f64 },
    SymmetricBernoulli,
    /// `(1/πr)|x|^{-1/2}(r-|x|)^{1/2}` on `|x| < r`.
    SymmetricBeta { r: f64 },
    QuarterCircle { sigma: f64 },
    /// `B(1-a, 1+a)`: `sin(πa)/(πa) x^{-a}(1-x)^a` on `(0,1)`.
    Beta1a { a: f64 },
    ChiSquared1,
    /// Free commutator of two standard semicircles.
    CommutatorWW,
}

/// Half-width of the support of `w □ w`: `√((11+5√5)/2)`.
pub fn commutator_ww_edge() -> f64 {
    ((11.0 + 5.0 * 5f64.sqrt()) / 2.0).sqrt()
}

fn domain(law: &str, reason: impl Into<String>) -> Error {
    Error::ParamDomain {
        law: law.to_string(),
        reason: reason.into(),
    }
}

fn arity(law: &str, params: &[f64], max: usize) -> Result<()> {
    if params.len() > max {
        return Err(domain(law, format!("expected at most {max} parameters, got {}", params.len())));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(domain(law, "parameters must be finite"));
    }
    Ok(())
}

impl Law {
    /// Parse a catalog identifier with its parameter list; missing trailing
    /// parameters take their defaults (semicircle `0,1`; Marchenko–Pastur rate
    /// `1`; symmetric beta `r = 4`; quarter circle `σ = 1`).
    pub fn parse(name: &str, params: &[f64]) -> Result<Law> {
        let p = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let law = match name {
            "semicircle" => {
                arity(name, params, 2)?;
                let var = p(1, 1.0);
                if var <= 0.0 {
                    return Err(domain(name, format!("variance must be > 0, got {var}")));
                }
                Law::Semicircle { mean: p(0, 0.0), var }
            }
            "marchenko_pastur" => {
                arity(name, params, 1)?;
                let rate = p(0, 1.0);
                if rate <= 0.0 {
                    return Err(domain(name, format!("rate must be > 0, got {rate}")));
                }
                Law::MarchenkoPastur { rate }
            }
            "symmetric_bernoulli" => {
                arity(name, params, 0)?;
                Law::SymmetricBernoulli
            }
            "symmetric_beta" => {
                arity(name, params, 1)?;
                let r = p(0, 4.0);
                if r <= 0.0 {
                    return Err(domain(name, format!("half-width must be > 0, got {r}")));
                }
                Law::SymmetricBeta { r }
            }
            "quarter_circle" => {
                arity(name, params, 1)?;
                let sigma = p(0, 1.0);
                if sigma <= 0.0 {
                    return Err(domain(name, format!("sigma must be > 0, got {sigma}")));
                }
                Law::QuarterCircle { sigma }
            }
            "beta_1a" => {
                arity(name, params, 1)?;
                let a = *params
                    .first()
                    .ok_or_else(|| domain(name, "parameter a is required"))?;
                if !(a > 0.0 && a < 1.0) {
                    return Err(domain(name, format!("a must lie in (0,1), got {a}")));
                }
                Law::Beta1a { a }
            }
            "chi_squared_1" => {
                arity(name, params, 0)?;
                Law::ChiSquared1
            }
            "commutator_ww" => {
                arity(name, params, 0)?;
                Law::CommutatorWW
            }
            other => return Err(Error::UnknownLaw(other.to_string())),
        };
        Ok(law)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Law::Semicircle { .. } => "semicircle",
            Law::MarchenkoPastur { .. } => "marchenko_pastur",
            Law::SymmetricBernoulli => "symmetric_bernoulli",
            Law::SymmetricBeta { .. } => "symmetric_beta",
            Law::QuarterCircle { .. } => "quarter_circle",
            Law::Beta1a { .. } => "beta_1a",
            Law::ChiSquared1 => "chi_squared_1",
            Law::CommutatorWW => "commutator_ww",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Law::Semicircle { mean, var } => vec![mean, var],
            Law::MarchenkoPastur { rate } => vec![rate],
            Law::SymmetricBeta { r } => vec![r],
            Law::QuarterCircle { sigma } => vec![sigma],
            Law::Beta1a { a } => vec![a],
            Law::SymmetricBernoulli | Law::ChiSquared1 | Law::CommutatorWW => vec![],
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            Law::Semicircle { mean, .. } => mean == 0.0,
            Law::SymmetricBernoulli | Law::SymmetricBeta { .. } | Law::CommutatorWW => true,
            _ => false,
        }
    }

    fn mp_edges(rate: f64) -> (f64, f64) {
        let s = rate.sqrt();
        ((1.0 - s).powi(2), (1.0 + s).powi(2))
    }

    /// Closure of the support of the absolutely continuous part, if any.
    pub fn ac_support(&self) -> Option<(f64, f64)> {
        match *self {
            Law::Semicircle { mean, var } => {
                let h = 2.0 * var.sqrt();
                Some((mean - h, mean + h))
            }
            Law::MarchenkoPastur { rate } => Some(Self::mp_edges(rate)),
            Law::SymmetricBernoulli => None,
            Law::SymmetricBeta { r } => Some((-r, r)),
            Law::QuarterCircle { sigma } => Some((0.0, 2.0 * sigma)),
            Law::Beta1a { .. } => Some((0.0, 1.0)),
            Law::ChiSquared1 => Some((0.0, f64::INFINITY)),
            Law::CommutatorWW => {
                let c = commutator_ww_edge();
                Some((-c, c))
            }
        }
    }

    /// Smallest closed interval carrying the whole law (atoms included).
    pub fn support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some((a, b)) = self.ac_support() {
            lo = a;
            hi = b;
        }
        for (x, _) in self.atoms() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match *self {
            Law::MarchenkoPastur { rate } if rate < 1.0 => vec![(0.0, 1.0 - rate)],
            Law::SymmetricBernoulli => vec![(-1.0, 0.5), (1.0, 0.5)],
            _ => vec![],
        }
    }

    /// Density of the absolutely continuous part; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            Law::Semicircle { mean, var } => {
                let d = 4.0 * var - (x - mean).powi(2);
                if d <= 0.0 {
                    0.0
                } else {
                    d.sqrt() / (2.0 * PI * var)
                }
            }
            Law::MarchenkoPastur { rate } => {
                let (a, b) = Self::mp_edges(rate);
                if x <= a || x >= b || x <= 0.0 {
                    0.0
                } else {
                    ((b - x) * (x - a)).sqrt() / (2.0 * PI * x)
                }
            }
            Law::SymmetricBernoulli => 0.0,
            Law::SymmetricBeta { r } => {
                let ax = x.abs();
                if ax == 0.0 || ax >= r {
                    0.0
                } else {
                    ((r - ax) / ax).sqrt() / (PI * r)
                }
            }
            Law::QuarterCircle { sigma } => {
                if x < 0.0 || x >= 2.0 * sigma {
                    0.0
                } else {
                    (4.0 * sigma * sigma - x * x).sqrt() / (PI * sigma * sigma)
                }
            }
            Law::Beta1a { a } => {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    (PI * a).sin() / (PI * a) * x.powf(-a) * (1.0 - x).powf(a)
                }
            }
            Law::ChiSquared1 => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x / 2.0).exp() / (2.0 * PI * x).sqrt()
                }
            }
            Law::CommutatorWW => commutator_ww_density(x),
        }
    }

    /// Moments `m_1..=m_n` from closed forms, in the scalar field `T`.
    ///
    /// In exact mode parameters are taken as the exact binary rationals of the
    /// stored floats; the quarter circle has transcendental moments and is
    /// refused there.
    pub fn moments<T: Scalar>(&self, n: usize) -> Result<Vec<T>> {
        if n > MAX_CLOSED_FORM_ORDER {
            return Err(Error::OrderTooLarge {
                what: "catalog_moments",
                requested: n,
                cap: MAX_CLOSED_FORM_ORDER,
            });
        }
        let cat = catalan(MAX_CLOSED_FORM_ORDER);
        let m = match *self {
            Law::Semicircle { mean, var } => {
                let (mu, v) = (T::from_f64(mean), T::from_f64(var));
                (1..=n)
                    .map(|j| {
                        let mut s = T::zero();
                        for k in 0..=j / 2 {
                            let c = binomial(j, 2 * k) * cat[k];
                            s = s + T::from_u128(c) * mu.powi(j - 2 * k) * v.powi(k);
                        }
                        s
                    })
                    .collect()
            }
            Law::MarchenkoPastur { rate } => {
                // Narayana polynomials
                let l = T::from_f64(rate);
                (1..=n)
                    .map(|j| {
                        let mut s = T::zero();
                        for k in 1..=j {
                            let c = T::from_u128(binomial(j, k)) * T::from_u128(binomial(j, k - 1))
                                / T::from_i64(j as i64);
                            s = s + c * l.powi(k);
                        }
                        s
                    })
                    .collect()
            }
            Law::SymmetricBernoulli => (1..=n)
                .map(|j| if j % 2 == 0 { T::one() } else { T::zero() })
                .collect(),
            Law::SymmetricBeta { r } => {
                let q = T::from_f64(r) / T::from_i64(4);
                (1..=n)
                    .map(|j| {
                        if j % 2 == 0 {
                            T::from_u128(cat[j]) * q.powi(j)
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            }
            Law::QuarterCircle { sigma } => {
                if T::EXACT {
                    return Err(Error::Unsupported(
                        "quarter_circle moments involve π and have no exact form".into(),
                    ));
                }
                // I_k = ∫_0^1 u^k √(1-u²) du
                let mut i = vec![PI / 4.0, 1.0 / 3.0];
                for k in 2..=n {
                    let v = (k as f64 - 1.0) / (k as f64 + 2.0) * i[k - 2];
                    i.push(v);
                }
                (1..=n)
                    .map(|k| T::from_f64((2.0 * sigma).powi(k as i32 + 2) * i[k] / (PI * sigma * sigma)))
                    .collect()
            }
            Law::Beta1a { a } => {
                let a = T::from_f64(a);
                let mut acc = T::one();
                (0..n)
                    .map(|k| {
                        let k = T::from_i64(k as i64);
                        acc = acc.clone() * (k.clone() + T::one() - a.clone()) / (k + T::from_i64(2));
                        acc.clone()
                    })
                    .collect()
            }
            Law::ChiSquared1 => {
                let mut acc = T::one();
                (1..=n)
                    .map(|k| {
                        acc = acc.clone() * T::from_i64(2 * k as i64 - 1);
                        acc.clone()
                    })
                    .collect()
            }
            Law::CommutatorWW => {
                let kappa: Vec<T> = (1..=n)
                    .map(|k| if k % 2 == 0 { T::from_i64(2) } else { T::zero() })
                    .collect();
                nc_sum(&kappa)
            }
        };
        Ok(m)
    }

    /// Charts on which the absolutely continuous part has a smooth integrand.
    fn charts(&self) -> Vec<Chart> {
        let Some((lo, hi)) = self.ac_support() else {
            return vec![];
        };
        match *self {
            Law::Beta1a { a } => vec![Chart::Power {
                a: 0.0,
                b: 1.0,
                p: 1.0 / (1.0 - a),
            }],
            Law::ChiSquared1 => vec![Chart::SquareRoot { t_max: 40.0 }],
            Law::SymmetricBeta { .. } | Law::CommutatorWW => vec![
                Chart::Cos { a: lo, b: 0.0 },
                Chart::Cos { a: 0.0, b: hi },
            ],
            _ => vec![Chart::Cos { a: lo, b: hi }],
        }
    }

    /// `∫ g dμ_ac` over the absolutely continuous part, to relative accuracy
    /// about `rel_tol`.
    pub fn integrate_ac<V: QuadValue>(&self, g: impl Fn(f64) -> V, rel_tol: f64) -> V {
        let mut total = V::zero();
        for chart in self.charts() {
            let (t0, t1) = chart.range();
            let r = integrate(
                |t| {
                    let (x, dx) = chart.map(t);
                    let w = self.density(x) * dx;
                    if w == 0.0 || !w.is_finite() {
                        V::zero()
                    } else {
                        g(x) * w
                    }
                },
                t0,
                t1,
                rel_tol * 1e-3,
                rel_tol,
                4000,
            );
            total = total + r.value;
        }
        total
    }

    /// `∫ g dμ` including atoms.
    pub fn expect<V: QuadValue>(&self, g: impl Fn(f64) -> V, rel_tol: f64) -> V {
        let mut total = self.integrate_ac(&g, rel_tol);
        for (x, w) in self.atoms() {
            total = total + g(x) * w;
        }
        total
    }

    /// Cauchy transform `G(z)` for `z` off the real axis.
    pub fn cauchy(&self, z: Complex64) -> Complex64 {
        if z.im < 0.0 {
            return self.cauchy(z.conj()).conj();
        }
        match *self {
            Law::Semicircle { mean, var } => {
                let h = 2.0 * var.sqrt();
                let u = z - mean;
                (u - (u - h).sqrt() * (u + h).sqrt()) / (2.0 * var)
            }
            Law::MarchenkoPastur { rate } => {
                let (a, b) = Self::mp_edges(rate);
                (z + 1.0 - rate - (z - a).sqrt() * (z - b).sqrt()) / (2.0 * z)
            }
            _ => self.expect(|x| 1.0 / (z - x), 1e-11),
        }
    }
}

/// Density of `w □ w`, in a cancellation-free rearrangement:
/// `h − (3t²+1)/(9h) = (729h⁶ − (1+3t²)³) / (9h(A² + AB + B²))` with
/// `A = 9h²`, `B = 1+3t²`.
fn commutator_ww_density(t: f64) -> f64 {
    let s = t * t;
    let q = 1.0 + 11.0 * s - s * s;
    if q <= 0.0 {
        return 0.0;
    }
    let root = (q / 27.0).sqrt();
    let h = ((18.0 * s + 1.0) / 27.0 + t.abs() * root).cbrt();
    let a = 9.0 * h * h;
    let b = 1.0 + 3.0 * s;
    // numerator divided by |t|: 54(|t|q + root(1+18s))
    let num = 54.0 * (t.abs() * q + root * (1.0 + 18.0 * s));
    3f64.sqrt() / (2.0 * PI) * num / (9.0 * h * (a * a + a * b + b * b))
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Change of variables `x = x(t)` making endpoint singularities smooth.
#[derive(Debug, Clone, Copy)]
enum Chart {
    /// `x = a + (b-a) sin²(t/2)`, `t ∈ [0, π]`: square-root edges.
    Cos { a: f64, b: f64 },
    /// `x = a + (b-a) t^p`, `t ∈ [0, 1]`.
    Power { a: f64, b: f64, p: f64 },
    /// `x = t²`, `t ∈ [0, t_max]`.
    SquareRoot { t_max: f64 },
}

impl Chart {
    fn range(&self) -> (f64, f64) {
        match *self {
            Chart::Cos { .. } => (0.0, PI),
            Chart::Power { .. } => (0.0, 1.0),
            Chart::SquareRoot { t_max } => (0.0, t_max),
        }
    }

    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Chart::Cos { a, b } => {
                let s = (t / 2.0).sin();
                (a + (b - a) * s * s, (b - a) * t.sin() / 2.0)
            }
            Chart::Power { a, b, p } => (a + (b - a) * t.powf(p), (b - a) * p * t.powf(p - 1.0)),
            Chart::SquareRoot { .. } => (t * t, 2.0 * t),
        }
    }
}
