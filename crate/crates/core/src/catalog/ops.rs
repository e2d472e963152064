//! Shape operations: symmetrization, square and square-root pushforwards,
//! dilation and shift.

use super::law::Law;
use super::measure::{affine_moments, grid_density, merge_atoms, zero_odd, MeasureSpec, Push, PushedLaw};
use crate::error::{Error, Result};
use crate::ncpart::{free_cumulants_from_moments, moments_from_free_cumulants};
use crate::quad::trapezoid;
use crate::scalar::Scalar;
use crate::seq::{SeqKind, SeqN};

/// `Sym(μ)` on a moment or cumulant sequence: odd entries vanish.
pub fn symmetrize_seq<T: Scalar>(s: &SeqN<T>) -> Result<SeqN<T>> {
    match s.kind {
        SeqKind::Moment | SeqKind::FreeCumulant => Ok(s.even_part()),
        SeqKind::BooleanCumulant => Err(Error::Unsupported(
            "symmetrize boolean cumulants by converting to moments first".into(),
        )),
    }
}

/// Moments of `μ²` from moments of `μ`: `m_n(μ²) = m_{2n}(μ)`.
pub fn square_moments<T: Scalar>(m: &SeqN<T>) -> Result<SeqN<T>> {
    m.expect_kind(SeqKind::Moment)?;
    if m.order() % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "moment order {} is odd; the square needs an even number of moments",
            m.order()
        )));
    }
    Ok(SeqN::moments(m.values.iter().skip(1).step_by(2).cloned().collect()))
}

/// `D_a`: `m_n ↦ aⁿ m_n`, `κ_n ↦ aⁿ κ_n`, `r_n ↦ aⁿ r_n`.
pub fn dilate_seq<T: Scalar>(s: &SeqN<T>, a: &T) -> Result<SeqN<T>> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("dilation by zero".into()));
    }
    let mut p = T::one();
    let values = s
        .values
        .iter()
        .map(|v| {
            p = p.clone() * a.clone();
            v.clone() * p.clone()
        })
        .collect();
    Ok(SeqN::new(s.kind, values))
}

/// `μ ⊞ δ_c` on a moment or free-cumulant sequence.
pub fn shift_seq<T: Scalar>(s: &SeqN<T>, c: &T) -> Result<SeqN<T>> {
    match s.kind {
        SeqKind::FreeCumulant => {
            let mut v = s.values.clone();
            if let Some(k1) = v.first_mut() {
                *k1 = k1.clone() + c.clone();
            }
            Ok(SeqN::free_cumulants(v))
        }
        SeqKind::Moment => Ok(SeqN::moments(affine_moments(&s.values, &T::one(), c))),
        SeqKind::BooleanCumulant => Err(Error::Unsupported(
            "shift boolean cumulants by converting to moments first".into(),
        )),
    }
}

fn push_law(spec: &MeasureSpec, op: Push) -> Result<MeasureSpec> {
    let MeasureSpec::Law { name, params, push } = spec else {
        unreachable!("caller matched the law variant")
    };
    let mut push = push.clone();
    let law = Law::parse(name, params)?;
    // parametric shortcuts that keep the spec inside the catalog
    if push.is_empty() {
        match (law, op) {
            (Law::Semicircle { mean, var }, Push::Affine { scale, shift }) => {
                return Ok(MeasureSpec::Law {
                    name: name.clone(),
                    params: vec![scale * mean + shift, scale * scale * var],
                    push: vec![],
                });
            }
            (l, Push::Symmetrize) if l.is_symmetric() => return Ok(spec.clone()),
            _ => {}
        }
    }
    if op == Push::Symmetrize && PushedLaw::new(law, push.clone())?.is_symmetric() {
        return Ok(spec.clone());
    }
    push.push(op);
    PushedLaw::new(law, push.clone())?;
    Ok(MeasureSpec::Law {
        name: name.clone(),
        params: params.clone(),
        push,
    })
}

/// `Sym(μ)(dx) = ½(μ(dx) + μ(−dx))`.
pub fn symmetrize(mu: &MeasureSpec) -> Result<MeasureSpec> {
    match mu {
        MeasureSpec::Atomic { atoms } => Ok(MeasureSpec::Atomic {
            atoms: merge_atoms(atoms.iter().flat_map(|&(x, w)| [(x, w / 2.0), (-x, w / 2.0)])),
        }),
        MeasureSpec::Grid { xs, densities, atoms } => {
            let mut grid: Vec<f64> = xs.iter().flat_map(|&x| [x, -x]).collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let ds = grid
                .iter()
                .map(|&x| 0.5 * (grid_density(xs, densities, x) + grid_density(xs, densities, -x)))
                .collect();
            Ok(MeasureSpec::Grid {
                xs: grid,
                densities: ds,
                atoms: merge_atoms(atoms.iter().flat_map(|&(x, w)| [(x, w / 2.0), (-x, w / 2.0)])),
            })
        }
        MeasureSpec::Law { .. } => push_law(mu, Push::Symmetrize),
        MeasureSpec::Moments { values, mass_at_zero } => Ok(MeasureSpec::Moments {
            values: zero_odd(values),
            mass_at_zero: *mass_at_zero,
        }),
        MeasureSpec::FreeCumulants { values, mass_at_zero } => Ok(MeasureSpec::FreeCumulants {
            values: zero_odd(values),
            mass_at_zero: *mass_at_zero,
        }),
    }
}

/// Pushforward by `x ↦ x²`.
///
/// A grid is mapped cell by cell: the output abscissas are the squares of the
/// input ones, and the value at `0` (where a positive input density makes the
/// output blow up like `y^{-1/2}`) is chosen so the first cell keeps its mass.
pub fn push_square(mu: &MeasureSpec) -> Result<MeasureSpec> {
    match mu {
        MeasureSpec::Atomic { atoms } => Ok(MeasureSpec::Atomic {
            atoms: merge_atoms(atoms.iter().map(|&(x, w)| (x * x, w))),
        }),
        MeasureSpec::Grid { xs, densities, atoms } => {
            let f = |x: f64| grid_density(xs, densities, x);
            let mut ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
            if xs[0] < 0.0 && xs[xs.len() - 1] > 0.0 {
                ys.push(0.0);
            }
            ys.sort_by(f64::total_cmp);
            ys.dedup();
            let mut ds: Vec<f64> = ys
                .iter()
                .map(|&y| {
                    if y == 0.0 {
                        0.0
                    } else {
                        let r = y.sqrt();
                        (f(r) + f(-r)) / (2.0 * r)
                    }
                })
                .collect();
            if ys[0] == 0.0 && ys.len() > 1 {
                let r1 = ys[1].sqrt();
                let cell_mass = crate::quad::integrate(|x| f(x) + f(-x), 0.0, r1, 1e-14, 1e-12, 200).value;
                ds[0] = (2.0 * cell_mass / ys[1] - ds[1]).max(0.0);
            }
            Ok(MeasureSpec::Grid {
                xs: ys,
                densities: ds,
                atoms: merge_atoms(atoms.iter().map(|&(x, w)| (x * x, w))),
            })
        }
        MeasureSpec::Law { .. } => push_law(mu, Push::Square),
        MeasureSpec::Moments { values, mass_at_zero } => Ok(MeasureSpec::Moments {
            values: square_moments(&SeqN::moments(values.clone()))?.values,
            mass_at_zero: *mass_at_zero,
        }),
        MeasureSpec::FreeCumulants { values, .. } => {
            let m = moments_from_free_cumulants(&SeqN::free_cumulants(values.clone()))?;
            push_square(&MeasureSpec::moments(m.values))
        }
    }
}

/// Pushforward by `x ↦ √x` of a measure on `[0, ∞)`.
pub fn push_sqrt(mu: &MeasureSpec) -> Result<MeasureSpec> {
    let negative = |x: f64| Error::InvalidMeasure(format!("square root needs support in [0,∞); found mass at {x}"));
    match mu {
        MeasureSpec::Atomic { atoms } => {
            if let Some(a) = atoms.iter().find(|a| a.0 < 0.0) {
                return Err(negative(a.0));
            }
            Ok(MeasureSpec::Atomic {
                atoms: atoms.iter().map(|&(x, w)| (x.sqrt(), w)).collect(),
            })
        }
        MeasureSpec::Grid { xs, densities, atoms } => {
            if let Some(a) = atoms.iter().find(|a| a.0 < 0.0) {
                return Err(negative(a.0));
            }
            if let Some(i) = xs.iter().zip(densities).position(|(x, d)| *x < 0.0 && *d > 0.0) {
                return Err(negative(xs[i]));
            }
            // keep the cells with x ≥ 0, adding 0 if the grid straddles it
            let mut ys: Vec<f64> = xs.iter().filter(|x| **x >= 0.0).map(|x| x.sqrt()).collect();
            if xs[0] < 0.0 && ys.first() != Some(&0.0) {
                ys.insert(0, 0.0);
            }
            let mut ds: Vec<f64> = ys.iter().map(|&y| 2.0 * y * grid_density(xs, densities, y * y)).collect();
            // a density positive at 0 maps to a cell whose trapezoid misses
            // half its mass; fix the value at 0 to conserve the first cell
            if ys.len() > 1 && ys[0] == 0.0 && grid_density(xs, densities, 0.0) > 0.0 {
                let y1 = ys[1] * ys[1];
                let cell_mass = 0.5 * y1 * (grid_density(xs, densities, 0.0) + grid_density(xs, densities, y1));
                ds[0] = (2.0 * cell_mass / ys[1] - ds[1]).max(0.0);
            }
            Ok(MeasureSpec::Grid {
                xs: ys,
                densities: ds,
                atoms: atoms.iter().map(|&(x, w)| (x.sqrt(), w)).collect(),
            })
        }
        MeasureSpec::Law { .. } => push_law(mu, Push::Sqrt),
        MeasureSpec::Moments { .. } | MeasureSpec::FreeCumulants { .. } => Err(Error::Unsupported(
            "square root of a sequence form needs half-integer moments; use a point representation".into(),
        )),
    }
}

/// `D_a μ`, the law of `aX`.
pub fn dilate(mu: &MeasureSpec, a: f64) -> Result<MeasureSpec> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation factor must be finite and nonzero, got {a}")));
    }
    affine(mu, a, 0.0)
}

/// `μ ⊞ δ_c`, the law of `X + c`.
pub fn shift(mu: &MeasureSpec, c: f64) -> Result<MeasureSpec> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("shift must be finite, got {c}")));
    }
    affine(mu, 1.0, c)
}

fn affine(mu: &MeasureSpec, a: f64, c: f64) -> Result<MeasureSpec> {
    let map_atoms = |atoms: &[(f64, f64)]| merge_atoms(atoms.iter().map(|&(x, w)| (a * x + c, w)));
    match mu {
        MeasureSpec::Atomic { atoms } => Ok(MeasureSpec::Atomic { atoms: map_atoms(atoms) }),
        MeasureSpec::Grid { xs, densities, atoms } => {
            let mut pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(densities)
                .map(|(&x, &d)| (a * x + c, d / a.abs()))
                .collect();
            if a < 0.0 {
                pts.reverse();
            }
            Ok(MeasureSpec::Grid {
                xs: pts.iter().map(|p| p.0).collect(),
                densities: pts.iter().map(|p| p.1).collect(),
                atoms: map_atoms(atoms),
            })
        }
        MeasureSpec::Law { .. } => push_law(mu, Push::Affine { scale: a, shift: c }),
        MeasureSpec::Moments { values, mass_at_zero } => Ok(MeasureSpec::Moments {
            values: affine_moments(values, &a, &c),
            mass_at_zero: if c == 0.0 { *mass_at_zero } else { None },
        }),
        MeasureSpec::FreeCumulants { values, mass_at_zero } => {
            let mut k = dilate_seq(&SeqN::free_cumulants(values.clone()), &a)?.values;
            k[0] += c;
            Ok(MeasureSpec::FreeCumulants {
                values: k,
                mass_at_zero: if c == 0.0 { *mass_at_zero } else { None },
            })
        }
    }
}

/// Density of a catalog law at `x` (atoms excluded).
pub fn catalog_density(law: &str, params: &[f64], x: f64) -> Result<f64> {
    Ok(Law::parse(law, params)?.density(x))
}

pub fn catalog_atoms(law: &str, params: &[f64]) -> Result<Vec<(f64, f64)>> {
    Ok(Law::parse(law, params)?.atoms())
}

/// Moments `m_1..=m_n` of a catalog law.
pub fn catalog_moments(law: &str, params: &[f64], n: usize) -> Result<SeqN<f64>> {
    Ok(SeqN::moments(Law::parse(law, params)?.moments(n)?))
}

/// Moments in an exact field (parameters taken as exact binary rationals).
pub fn catalog_moments_exact<T: Scalar>(law: &str, params: &[f64], n: usize) -> Result<SeqN<T>> {
    Ok(SeqN::moments(Law::parse(law, params)?.moments(n)?))
}

/// Free cumulants `κ_1..=κ_n` of a catalog law.
pub fn catalog_free_cumulants<T: Scalar>(law: &str, params: &[f64], n: usize) -> Result<SeqN<T>> {
    free_cumulants_from_moments(&catalog_moments_exact(law, params, n)?)
}

/// Mass of a grid measure (trapezoid plus atoms).
pub fn grid_mass(xs: &[f64], densities: &[f64], atoms: &[(f64, f64)]) -> f64 {
    trapezoid(xs, densities) + atoms.iter().map(|a| a.1).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpart::catalan;
    use crate::scalar::{rat, Rational};

    fn w() -> MeasureSpec {
        MeasureSpec::law("semicircle", &[0.0, 1.0]).unwrap()
    }

    fn m() -> MeasureSpec {
        MeasureSpec::law("marchenko_pastur", &[]).unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        let s = symmetrize(&MeasureSpec::delta(1.0)).unwrap();
        assert_eq!(s, MeasureSpec::Atomic { atoms: vec![(-1.0, 0.5), (1.0, 0.5)] });
        assert_eq!(symmetrize(&s).unwrap(), s);
        assert_eq!(symmetrize(&w()).unwrap(), w());
        let mm = MeasureSpec::moments(vec![1.0, 2.0, 5.0, 14.0]);
        assert_eq!(symmetrize(&mm).unwrap(), MeasureSpec::moments(vec![0.0, 2.0, 0.0, 14.0]));
    }

    #[test]
    fn push_square_examples() {
        let b = MeasureSpec::law("symmetric_bernoulli", &[]).unwrap();
        assert_eq!(push_square(&b).unwrap().atoms().unwrap(), vec![(1.0, 1.0)]);
        let bin = MeasureSpec::Atomic { atoms: vec![(-1.0, 0.5), (1.0, 0.5)] };
        assert_eq!(push_square(&bin).unwrap(), MeasureSpec::delta(1.0));
        let w2 = push_square(&w()).unwrap().moment_seq(8).unwrap();
        let cat = catalan(8);
        for (k, v) in w2.values.iter().enumerate() {
            assert_eq!(*v, cat[k + 1] as f64);
        }
        // (b_s)² = w⁴
        let bs2 = push_square(&MeasureSpec::law("symmetric_beta", &[]).unwrap()).unwrap();
        let w4 = push_square(&push_square(&w()).unwrap()).unwrap();
        assert_eq!(bs2.moment_seq(8).unwrap(), w4.moment_seq(8).unwrap());
        assert!(push_square(&MeasureSpec::moments(vec![0.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn push_sqrt_examples() {
        assert_eq!(push_sqrt(&MeasureSpec::delta(4.0)).unwrap(), MeasureSpec::delta(2.0));
        let mu = MeasureSpec::Atomic { atoms: vec![(0.0, 0.25), (2.0, 0.5), (3.5, 0.25)] };
        assert_eq!(push_sqrt(&push_square(&mu).unwrap()).unwrap(), mu);
        assert!(push_sqrt(&MeasureSpec::delta(-1.0)).is_err());
        assert!(push_sqrt(&w()).is_err());
        // Sym(√m) has the semicircle moments
        let s = symmetrize(&push_sqrt(&m()).unwrap()).unwrap();
        let got = s.moment_seq(8).unwrap();
        let want = w().moment_seq(8).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-9, "{got:?}");
    }

    #[test]
    fn dilate_and_shift_examples() {
        assert_eq!(dilate(&MeasureSpec::delta(1.0), 3.0).unwrap(), MeasureSpec::delta(3.0));
        assert_eq!(shift(&w(), 2.0).unwrap(), MeasureSpec::law("semicircle", &[2.0, 1.0]).unwrap());
        let d = dilate(&MeasureSpec::moments(vec![1.0, 2.0, 5.0]), 2.0).unwrap();
        assert_eq!(d, MeasureSpec::moments(vec![2.0, 8.0, 40.0]));
        assert!(dilate(&w(), 0.0).is_err());
        let back = dilate(&dilate(&MeasureSpec::moments(vec![1.0, 2.0, 5.0, 14.0]), 3.0).unwrap(), 1.0 / 3.0).unwrap();
        let MeasureSpec::Moments { values, .. } = back else { panic!() };
        for (a, b) in values.iter().zip([1.0, 2.0, 5.0, 14.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_mode_w_squared_is_m() {
        let w: SeqN<Rational> = catalog_moments_exact("semicircle", &[], 20).unwrap();
        let w2 = square_moments(&w).unwrap();
        let m: SeqN<Rational> = catalog_moments_exact("marchenko_pastur", &[], 10).unwrap();
        assert_eq!(w2, m);
        assert_eq!(m.values[3], rat(14, 1));
    }

    #[test]
    fn grid_operations_preserve_mass_and_moments() {
        let n = 4001;
        let xs: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| catalog_density("semicircle", &[], x).unwrap()).collect();
        let g = MeasureSpec::Grid { xs, densities: ds, atoms: vec![] };
        g.validate(1e-5).unwrap();
        let sq = push_square(&g).unwrap();
        let MeasureSpec::Grid { xs, densities, atoms } = &sq else { panic!() };
        // the y^{-1/2} profile near 0 is convex, so the trapezoid overshoots
        let mass = grid_mass(xs, densities, atoms);
        assert!((mass - 1.0).abs() < 5e-4, "{mass}");
        let m = sq.moment_seq(3).unwrap();
        for (a, b) in m.values.iter().zip([1.0, 2.0, 5.0]) {
            assert!((a - b).abs() < 1e-3, "{m:?}");
        }
        let r = dilate(&g, -2.0).unwrap();
        r.validate(1e-5).unwrap();
        let back = push_sqrt(&sq).unwrap();
        let MeasureSpec::Grid { xs, densities, atoms } = &back else { panic!() };
        assert!((grid_mass(xs, densities, atoms) - 1.0).abs() < 1e-4);
    }
}
