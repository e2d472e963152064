//! Tagged measure representations and their evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::law::{binomial, Law, MAX_QUADRATURE_ORDER};
use crate::error::{Error, Result};
use crate::ncpart::{free_cumulants_from_moments, moments_from_free_cumulants};
use crate::quad::{trapezoid, QuadValue};
use crate::scalar::Scalar;
use crate::seq::{SeqKind, SeqN};

/// Tolerance on total mass for atomic measures built in code.
pub const ATOM_MASS_TOL: f64 = 1e-12;
/// Tolerance on total mass for grids (and for any spec read from a file).
pub const GRID_MASS_TOL: f64 = 1e-6;

/// Pushforward applied on top of a catalog law, innermost first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Push {
    /// `x ↦ scale·x + shift`.
    Affine { scale: f64, shift: f64 },
    /// `x ↦ x²`.
    Square,
    /// `x ↦ √x` (law must live on `[0, ∞)` at this point of the chain).
    Sqrt,
    /// `μ ↦ ½(μ + μ(−·))`.
    Symmetrize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `(location, weight)` pairs.
    Atomic { atoms: Vec<(f64, f64)> },
    /// Piecewise-linear density on `xs` plus point masses.
    Grid {
        xs: Vec<f64>,
        densities: Vec<f64>,
        #[serde(default)]
        atoms: Vec<(f64, f64)>,
    },
    Law {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        push: Vec<Push>,
    },
    Moments {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass_at_zero: Option<f64>,
    },
    FreeCumulants {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass_at_zero: Option<f64>,
    },
}

/// A catalog law with its pushforward chain, parsed and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct PushedLaw {
    pub law: Law,
    pub push: Vec<Push>,
}

impl PushedLaw {
    pub fn new(law: Law, push: Vec<Push>) -> Result<Self> {
        let mut lo_hi = law.support();
        for (i, p) in push.iter().enumerate() {
            lo_hi = match *p {
                Push::Affine { scale, shift } => {
                    if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
                        return Err(Error::InvalidArgument(format!(
                            "push {i}: affine map needs finite nonzero scale and finite shift"
                        )));
                    }
                    let (a, b) = (scale * lo_hi.0 + shift, scale * lo_hi.1 + shift);
                    (a.min(b), a.max(b))
                }
                Push::Square => {
                    let (a, b) = lo_hi;
                    let hi = (a * a).max(b * b);
                    let lo = if a <= 0.0 && b >= 0.0 { 0.0 } else { (a * a).min(b * b) };
                    (lo, hi)
                }
                Push::Sqrt => {
                    if lo_hi.0 < 0.0 {
                        return Err(Error::InvalidMeasure(format!(
                            "push {i}: square root of a law charging negative reals"
                        )));
                    }
                    (lo_hi.0.sqrt(), lo_hi.1.sqrt())
                }
                Push::Symmetrize => {
                    let r = lo_hi.0.abs().max(lo_hi.1.abs());
                    (-r, r)
                }
            };
        }
        Ok(PushedLaw { law, push })
    }

    /// Images of a base point under the chain with their weights.
    fn images(&self, x: f64) -> Vec<(f64, f64)> {
        let mut pts = vec![(x, 1.0)];
        for p in &self.push {
            match *p {
                Push::Affine { scale, shift } => pts.iter_mut().for_each(|(y, _)| *y = scale * *y + shift),
                Push::Square => pts.iter_mut().for_each(|(y, _)| *y *= *y),
                Push::Sqrt => pts.iter_mut().for_each(|(y, _)| *y = y.max(0.0).sqrt()),
                Push::Symmetrize => {
                    pts = pts
                        .iter()
                        .flat_map(|&(y, w)| [(y, 0.5 * w), (-y, 0.5 * w)])
                        .collect();
                }
            }
        }
        pts
    }

    /// `∫ g dμ` for the pushed law, computed in base coordinates.
    pub fn expect<V: QuadValue>(&self, g: impl Fn(f64) -> V, rel_tol: f64) -> V {
        self.law.expect(
            |x| {
                self.images(x)
                    .into_iter()
                    .fold(V::zero(), |acc, (y, w)| acc + g(y) * w)
            },
            rel_tol,
        )
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let pts = self
            .law
            .atoms()
            .into_iter()
            .flat_map(|(x, w)| self.images(x).into_iter().map(move |(y, v)| (y, v * w)));
        merge_atoms(pts)
    }

    pub fn support(&self) -> (f64, f64) {
        // re-run the interval propagation from `new`
        let mut lo_hi = self.law.support();
        for p in &self.push {
            lo_hi = match *p {
                Push::Affine { scale, shift } => {
                    let (a, b) = (scale * lo_hi.0 + shift, scale * lo_hi.1 + shift);
                    (a.min(b), a.max(b))
                }
                Push::Square => {
                    let (a, b) = lo_hi;
                    let lo = if a <= 0.0 && b >= 0.0 { 0.0 } else { (a * a).min(b * b) };
                    (lo, (a * a).max(b * b))
                }
                Push::Sqrt => (lo_hi.0.max(0.0).sqrt(), lo_hi.1.sqrt()),
                Push::Symmetrize => {
                    let r = lo_hi.0.abs().max(lo_hi.1.abs());
                    (-r, r)
                }
            };
        }
        lo_hi
    }

    /// Density of the absolutely continuous part at `x`.
    pub fn density(&self, x: f64) -> f64 {
        self.density_prefix(self.push.len(), x)
    }

    fn density_prefix(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            return self.law.density(x);
        }
        let d = |y: f64| self.density_prefix(k - 1, y);
        match self.push[k - 1] {
            Push::Affine { scale, shift } => d((x - shift) / scale) / scale.abs(),
            Push::Square => {
                if x <= 0.0 {
                    0.0
                } else {
                    let r = x.sqrt();
                    (d(r) + d(-r)) / (2.0 * r)
                }
            }
            Push::Sqrt => {
                if x < 0.0 {
                    0.0
                } else {
                    2.0 * x * d(x * x)
                }
            }
            Push::Symmetrize => 0.5 * (d(x) + d(-x)),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self.push.last() {
            None => self.law.is_symmetric(),
            Some(Push::Symmetrize) => true,
            Some(Push::Affine { shift, .. }) if *shift == 0.0 => {
                PushedLaw::new(self.law, self.push[..self.push.len() - 1].to_vec())
                    .map(|p| p.is_symmetric())
                    .unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Moments `m_1..=m_n` in the field `T` by algebra on the base moments;
    /// `Unsupported` if the chain contains a square root.
    pub fn moments_exact<T: Scalar>(&self, n: usize) -> Result<Vec<T>> {
        self.moments_prefix(self.push.len(), n)
    }

    fn moments_prefix<T: Scalar>(&self, k: usize, n: usize) -> Result<Vec<T>> {
        if k == 0 {
            return self.law.moments(n);
        }
        match self.push[k - 1] {
            Push::Affine { scale, shift } => {
                let m = self.moments_prefix::<T>(k - 1, n)?;
                Ok(affine_moments(&m, &T::from_f64(scale), &T::from_f64(shift)))
            }
            Push::Square => {
                let m = self.moments_prefix::<T>(k - 1, 2 * n)?;
                Ok((1..=n).map(|j| m[2 * j - 1].clone()).collect())
            }
            Push::Symmetrize => {
                let m = self.moments_prefix::<T>(k - 1, n)?;
                Ok(zero_odd(&m))
            }
            Push::Sqrt => Err(Error::Unsupported(
                "moments through a square-root pushforward have no closed form".into(),
            )),
        }
    }

    /// Moments in double precision: closed forms when the chain allows,
    /// quadrature otherwise.
    pub fn moments(&self, n: usize) -> Result<Vec<f64>> {
        match self.moments_exact::<f64>(n) {
            Err(Error::Unsupported(_)) => {
                if n > MAX_QUADRATURE_ORDER {
                    return Err(Error::OrderTooLarge {
                        what: "quadrature moments",
                        requested: n,
                        cap: MAX_QUADRATURE_ORDER,
                    });
                }
                Ok((1..=n)
                    .map(|j| self.expect(|x| x.powi(j as i32), 1e-12))
                    .collect())
            }
            other => other,
        }
    }

    /// Cauchy transform, composed from the base law where the chain permits.
    pub fn cauchy(&self, z: Complex64) -> Complex64 {
        if self.push.contains(&Push::Sqrt) {
            return self.expect(|x| 1.0 / (z - x), 1e-11);
        }
        self.cauchy_prefix(self.push.len(), z)
    }

    fn cauchy_prefix(&self, k: usize, z: Complex64) -> Complex64 {
        if z.im < 0.0 {
            return self.cauchy_prefix(k, z.conj()).conj();
        }
        if k == 0 {
            return self.law.cauchy(z);
        }
        let g = |w: Complex64| self.cauchy_prefix(k - 1, w);
        match self.push[k - 1] {
            Push::Affine { scale, shift } => g((z - shift) / scale) / scale,
            Push::Square => {
                let r = z.sqrt();
                (g(r) - g(-r)) / (2.0 * r)
            }
            Push::Symmetrize => 0.5 * (g(z) - g(-z)),
            Push::Sqrt => unreachable!("square-root chains are integrated directly"),
        }
    }
}

/// `m_j(aX + c)` from `m_1..=m_n` of `X`.
pub(crate) fn affine_moments<T: Scalar>(m: &[T], a: &T, c: &T) -> Vec<T> {
    let at = |i: usize| if i == 0 { T::one() } else { m[i - 1].clone() };
    (1..=m.len())
        .map(|j| {
            (0..=j).fold(T::zero(), |acc, i| {
                acc + T::from_u128(binomial(j, i)) * a.powi(i) * c.powi(j - i) * at(i)
            })
        })
        .collect()
}

pub(crate) fn zero_odd<T: Scalar>(m: &[T]) -> Vec<T> {
    m.iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { T::zero() } else { v.clone() })
        .collect()
}

/// Sort by location and merge coincident atoms.
pub(crate) fn merge_atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = atoms.into_iter().filter(|a| a.1 != 0.0).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (x, w) in v {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 += w,
            _ => out.push((x, w)),
        }
    }
    out
}

/// Moments `m_1..=m_n` of a finitely supported measure, in any field.
pub fn atomic_moments<T: Scalar>(atoms: &[(T, T)], n: usize) -> SeqN<T> {
    let mut m = vec![T::zero(); n];
    for (x, w) in atoms {
        let mut p = w.clone();
        for v in m.iter_mut() {
            p = p * x.clone();
            *v = v.clone() + p.clone();
        }
    }
    SeqN::moments(m)
}

/// Linear interpolation of grid densities; zero outside `[xs₀, xs_last]`.
pub(crate) fn grid_density(xs: &[f64], ds: &[f64], x: f64) -> f64 {
    if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return ds[0];
    }
    if i == xs.len() {
        return ds[xs.len() - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    ds[i - 1] + t * (ds[i] - ds[i - 1])
}

/// `∫ x^k f(x) dx` over one cell of a piecewise-linear density, exact for
/// `k ≤ 21` (Kronrod 15-point).
fn cell_moment(x0: f64, x1: f64, f0: f64, f1: f64, k: i32) -> f64 {
    crate::quad::kronrod_panel(
        |x: f64| {
            let t = (x - x0) / (x1 - x0);
            x.powi(k) * (f0 + t * (f1 - f0))
        },
        x0,
        x1,
    )
}

impl MeasureSpec {
    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let spec = MeasureSpec::Atomic { atoms };
        spec.validate(ATOM_MASS_TOL)?;
        Ok(spec)
    }

    pub fn law(name: &str, params: &[f64]) -> Result<Self> {
        Law::parse(name, params)?;
        Ok(MeasureSpec::Law {
            name: name.to_string(),
            params: params.to_vec(),
            push: vec![],
        })
    }

    pub fn delta(c: f64) -> Self {
        MeasureSpec::Atomic { atoms: vec![(c, 1.0)] }
    }

    pub fn moments(values: Vec<f64>) -> Self {
        MeasureSpec::Moments {
            values,
            mass_at_zero: None,
        }
    }

    pub fn free_cumulants(values: Vec<f64>) -> Self {
        MeasureSpec::FreeCumulants {
            values,
            mass_at_zero: None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MeasureSpec::Atomic { .. } => "atomic",
            MeasureSpec::Grid { .. } => "grid",
            MeasureSpec::Law { .. } => "law",
            MeasureSpec::Moments { .. } => "moments",
            MeasureSpec::FreeCumulants { .. } => "free_cumulants",
        }
    }

    /// Check representation invariants; `mass_tol` bounds the deviation of
    /// the total mass from 1.
    pub fn validate(&self, mass_tol: f64) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidMeasure(s));
        match self {
            MeasureSpec::Atomic { atoms } => {
                if atoms.is_empty() {
                    return bad("atomic measure without atoms".into());
                }
                check_atoms(atoms)?;
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > mass_tol {
                    return bad(format!("atom weights sum to {total}, not 1"));
                }
            }
            MeasureSpec::Grid { xs, densities, atoms } => {
                if xs.len() < 2 || xs.len() != densities.len() {
                    return bad(format!(
                        "grid needs at least two abscissas and one density per abscissa ({} vs {})",
                        xs.len(),
                        densities.len()
                    ));
                }
                if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("grid abscissas must be finite and strictly increasing".into());
                }
                if let Some((i, d)) = densities.iter().enumerate().find(|(_, d)| !(d.is_finite() && **d >= 0.0)) {
                    return bad(format!("density at index {i} is {d}"));
                }
                check_atoms(atoms)?;
                let total = trapezoid(xs, densities) + atoms.iter().map(|a| a.1).sum::<f64>();
                if (total - 1.0).abs() > mass_tol {
                    return bad(format!("grid mass is {total}, not 1"));
                }
            }
            MeasureSpec::Law { name, params, push } => {
                PushedLaw::new(Law::parse(name, params)?, push.clone())?;
            }
            MeasureSpec::Moments { values, mass_at_zero } | MeasureSpec::FreeCumulants { values, mass_at_zero } => {
                if values.is_empty() {
                    return bad("empty sequence".into());
                }
                if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                    return bad(format!("entry {} is {v}", i + 1));
                }
                if let Some(z) = mass_at_zero {
                    if !(0.0..=1.0).contains(z) {
                        return bad(format!("mass_at_zero {z} outside [0,1]"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Validate, then rescale atoms and grid densities so the mass is exactly 1.
    pub fn normalized(self, mass_tol: f64) -> Result<Self> {
        self.validate(mass_tol)?;
        Ok(match self {
            MeasureSpec::Atomic { atoms } => {
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                MeasureSpec::Atomic {
                    atoms: atoms.into_iter().map(|(x, w)| (x, w / total)).collect(),
                }
            }
            MeasureSpec::Grid { xs, densities, atoms } => {
                let total = trapezoid(&xs, &densities) + atoms.iter().map(|a| a.1).sum::<f64>();
                MeasureSpec::Grid {
                    xs,
                    densities: densities.into_iter().map(|d| d / total).collect(),
                    atoms: atoms.into_iter().map(|(x, w)| (x, w / total)).collect(),
                }
            }
            other => other,
        })
    }

    pub fn pushed_law(&self) -> Option<Result<PushedLaw>> {
        match self {
            MeasureSpec::Law { name, params, push } => {
                Some(Law::parse(name, params).and_then(|l| PushedLaw::new(l, push.clone())))
            }
            _ => None,
        }
    }

    /// Point masses of the measure, if the representation exposes them.
    pub fn atoms(&self) -> Result<Vec<(f64, f64)>> {
        match self {
            MeasureSpec::Atomic { atoms } | MeasureSpec::Grid { atoms, .. } => Ok(merge_atoms(atoms.iter().copied())),
            MeasureSpec::Law { .. } => Ok(self.pushed_law().expect("law variant")?.atoms()),
            _ => Err(Error::Unsupported(format!(
                "{} representation carries no atom list",
                self.kind_name()
            ))),
        }
    }

    /// `μ({0})`: from atoms where present, from the stored value for sequence
    /// forms (`None` when not recorded).
    pub fn mass_at_zero(&self) -> Result<Option<f64>> {
        match self {
            MeasureSpec::Moments { mass_at_zero, .. } | MeasureSpec::FreeCumulants { mass_at_zero, .. } => {
                Ok(*mass_at_zero)
            }
            _ => Ok(Some(
                self.atoms()?.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum(),
            )),
        }
    }

    /// Density of the absolutely continuous part.
    pub fn density(&self, x: f64) -> Result<f64> {
        match self {
            MeasureSpec::Atomic { .. } => Ok(0.0),
            MeasureSpec::Grid { xs, densities, .. } => Ok(grid_density(xs, densities, x)),
            MeasureSpec::Law { .. } => Ok(self.pushed_law().expect("law variant")?.density(x)),
            _ => Err(Error::Unsupported(format!(
                "{} representation has no pointwise density",
                self.kind_name()
            ))),
        }
    }

    /// Smallest interval carrying the measure, for point representations.
    pub fn support(&self) -> Result<(f64, f64)> {
        let span = |atoms: &[(f64, f64)]| {
            atoms
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a.0), hi.max(a.0)))
        };
        match self {
            MeasureSpec::Atomic { atoms } => Ok(span(atoms)),
            MeasureSpec::Grid { xs, densities, atoms } => {
                let (mut lo, mut hi) = span(atoms);
                let first = densities.iter().position(|d| *d > 0.0);
                let last = densities.iter().rposition(|d| *d > 0.0);
                if let (Some(i), Some(j)) = (first, last) {
                    lo = lo.min(xs[i.saturating_sub(1)]);
                    hi = hi.max(xs[(j + 1).min(xs.len() - 1)]);
                }
                Ok((lo, hi))
            }
            MeasureSpec::Law { .. } => Ok(self.pushed_law().expect("law variant")?.support()),
            _ => Err(Error::Unsupported(format!(
                "{} representation has no explicit support",
                self.kind_name()
            ))),
        }
    }

    /// Moments `m_1..=m_n` in double precision.
    pub fn moment_seq(&self, n: usize) -> Result<SeqN<f64>> {
        match self {
            MeasureSpec::Atomic { atoms } => Ok(atomic_moments(atoms, n)),
            MeasureSpec::Grid { xs, densities, atoms } => {
                let mut m = atomic_moments(atoms, n).values;
                for (k, v) in m.iter_mut().enumerate() {
                    for i in 0..xs.len() - 1 {
                        *v += cell_moment(xs[i], xs[i + 1], densities[i], densities[i + 1], k as i32 + 1);
                    }
                }
                Ok(SeqN::moments(m))
            }
            MeasureSpec::Law { .. } => Ok(SeqN::moments(
                self.pushed_law().expect("law variant")?.moments(n)?,
            )),
            MeasureSpec::Moments { values, .. } => SeqN::moments(values.clone()).truncate(n),
            MeasureSpec::FreeCumulants { values, .. } => {
                moments_from_free_cumulants(&SeqN::free_cumulants(values.clone()).truncate(n)?)
            }
        }
    }

    /// Free cumulants `κ_1..=κ_n` in double precision.
    pub fn free_cumulant_seq(&self, n: usize) -> Result<SeqN<f64>> {
        match self {
            MeasureSpec::FreeCumulants { values, .. } => SeqN::free_cumulants(values.clone()).truncate(n),
            _ => free_cumulants_from_moments(&self.moment_seq(n)?),
        }
    }

    /// Sequence of the requested kind.
    pub fn seq(&self, kind: SeqKind, n: usize) -> Result<SeqN<f64>> {
        match kind {
            SeqKind::Moment => self.moment_seq(n),
            SeqKind::FreeCumulant => self.free_cumulant_seq(n),
            SeqKind::BooleanCumulant => crate::ncpart::boolean_cumulants_from_moments(&self.moment_seq(n)?),
        }
    }

    /// Whether the measure is invariant under `x ↦ −x` (to `1e-12` for
    /// sequence forms, through the odd moments).
    pub fn is_symmetric(&self) -> bool {
        match self {
            MeasureSpec::Law { .. } => self
                .pushed_law()
                .and_then(|r| r.ok())
                .map(|p| p.is_symmetric())
                .unwrap_or(false),
            MeasureSpec::Moments { values, .. } | MeasureSpec::FreeCumulants { values, .. } => {
                values.iter().step_by(2).all(|v| v.abs() <= 1e-12)
            }
            _ => self
                .moment_seq(9)
                .map(|m| m.max_odd_abs() <= 1e-12)
                .unwrap_or(false),
        }
    }

    /// Whether the measure lives on `[0, ∞)`. Sequence forms are not decided.
    pub fn is_nonnegative(&self) -> Option<bool> {
        self.support().ok().map(|(lo, _)| lo >= 0.0)
    }
}

fn check_atoms(atoms: &[(f64, f64)]) -> Result<()> {
    for (i, (x, w)) in atoms.iter().enumerate() {
        if !x.is_finite() || !w.is_finite() || *w <= 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "atom {i} at {x} has weight {w}; need finite location and positive weight"
            )));
        }
    }
    let mut locs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    locs.sort_by(f64::total_cmp);
    if let Some(w) = locs.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidMeasure(format!("duplicate atom location {}", w[0])));
    }
    Ok(())
}
