use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::levy::{to_regular_form, FreeTriplet};
use crate::error::{Error, Result};
use crate::transforms::{stieltjes_invert, Domain, NumericMap, StieltjesResult};

pub const EDGE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub t: f64,
    pub left_edge: f64,
    /// The edge is a point mass rather than a density edge.
    pub atom: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    /// Evidence only: every scanned `μ^{⊞t}` sits in `[−1e−3, ∞)`.
    pub nonnegative_evidence: bool,
}

/// Left end of `supp μ^{⊞t}`.
///
/// `F_t` inverts `H_t(w) = w + tφ(w)`; on the real axis left of the
/// singular set of `φ` the map `H_t` is concave, so the edge is `H_t` at
/// the critical point, or at the singular edge when there is none. A zero
/// of `F_t` on that branch puts an atom at `H_t(0)`.
pub fn left_edge(triplet: &FreeTriplet, t: f64) -> Result<ScanPoint> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let Some(l) = triplet.singular_left() else {
        return Ok(ScanPoint {
            t,
            left_edge: t * triplet.eta,
            atom: true,
        });
    };
    let dh = |x: f64| 1.0 + t * triplet.phi_prime_real(x);
    let h = |x: f64| x + t * triplet.phi_real(x);
    let scale = l.abs().max(1.0);
    let mut hi = l - 1e-10 * scale;
    let critical = if dh(hi) > 0.0 {
        None
    } else {
        let mut lo = l - 1.0;
        let mut tries = 0;
        while dh(lo) <= 0.0 {
            lo = l - 2.0 * (l - lo);
            tries += 1;
            if tries > 80 {
                return Err(Error::NoConvergence("no point with H′ > 0 left of the singular set".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if dh(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    };
    let branch_end = critical.unwrap_or(l);
    if branch_end > 0.0 && triplet.a == 0.0 {
        return Ok(ScanPoint {
            t,
            left_edge: t * triplet.phi_real(0.0),
            atom: true,
        });
    }
    let x = critical.unwrap_or(hi);
    Ok(ScanPoint {
        t,
        left_edge: h(x),
        atom: false,
    })
}

/// Left edges of `μ^{⊞t}` over `ts`, in parallel.
pub fn positivity_scan(triplet: &FreeTriplet, ts: &[f64]) -> Result<ScanReport> {
    let points = ts.par_iter().map(|&t| left_edge(triplet, t)).collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        nonnegative_evidence: points.iter().all(|p| p.left_edge >= -EDGE_TOL),
        points,
    })
}

/// `G_{μ^{⊞t}}(z) = 1/w` where `w + tφ(w) = z`, `w ∈ ℂ₊`, by Newton's
/// method started inside ℂ₊.
pub fn power_cauchy(triplet: &FreeTriplet, t: f64, z: Complex64) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(Error::RealArgument(z.im));
    }
    // continuation from far inside ℂ₊, where w ≈ z, down to z
    let mut w = z + Complex64::new(0.0, 4.0);
    let steps = 8;
    for s in 0..=steps {
        let target = z + Complex64::new(0.0, 4.0 * (1.0 - s as f64 / steps as f64));
        let mut converged = false;
        for _ in 0..100 {
            let f = w + t * triplet.phi(w) - target;
            let d = 1.0 + t * triplet.phi_prime(w);
            let mut step = f / d;
            while (w - step).im <= 0.0 {
                step *= 0.5;
            }
            w -= step;
            if step.norm() <= 1e-14 * (1.0 + w.norm()) {
                converged = true;
                break;
            }
        }
        if !converged && s == steps {
            return Err(Error::NoConvergence(format!("subordination for μ^⊞{t} at z = {z}")));
        }
    }
    Ok(1.0 / w)
}

/// Density of `μ^{⊞t}` on `xs` via [`power_cauchy`] and Stieltjes inversion.
pub fn power_density(triplet: &FreeTriplet, t: f64, xs: &[f64], eps: [f64; 3]) -> Result<StieltjesResult> {
    let tr = triplet.clone();
    let g = NumericMap::new(Domain::UpperHalfPlane, move |z| power_cauchy(&tr, t, z));
    stieltjes_invert(&g, xs, eps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSide {
    pub triplet: FreeTriplet,
    /// `Ok(η′ ≥ 0)` or the reason regular form fails.
    pub regular: std::result::Result<bool, String>,
    pub scan: ScanReport,
}

impl WitnessSide {
    pub fn is_free_regular(&self) -> bool {
        matches!(self.regular, Ok(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftWitness {
    /// `μ ⊞ δ_a` for support `[−a, b]`.
    pub shifted: WitnessSide,
    /// Reflection of `μ ⊞ δ_{−b}`.
    pub reflected: WitnessSide,
}

impl ShiftWitness {
    /// At least one side fails to be free regular.
    pub fn witnessed(&self) -> bool {
        !self.shifted.is_free_regular() || !self.reflected.is_free_regular()
    }
}

pub const WITNESS_TS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

/// Move a compactly supported FID `μ` on `[lo, hi]` onto `[0, hi−lo]` from
/// both ends and test both results.
pub fn shift_nonregular_witness(triplet: &FreeTriplet, support: (f64, f64)) -> Result<ShiftWitness> {
    let (lo, hi) = support;
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("bad support [{lo}, {hi}]")));
    }
    let side = |t: FreeTriplet| -> Result<WitnessSide> {
        Ok(WitnessSide {
            regular: to_regular_form(&t).map(|r| r.is_free_regular()).map_err(|e| e.to_string()),
            scan: positivity_scan(&t, &WITNESS_TS)?,
            triplet: t,
        })
    };
    Ok(ShiftWitness {
        shifted: side(triplet.shift(-lo))?,
        reflected: side(triplet.shift(-hi).reflect())?,
    })
}
