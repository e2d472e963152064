//! Truncated formal Laurent series `Σ_{k=low}^{low+len-1} c_k z^k + O(z^{low+len})`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<T = f64> {
    low: i32,
    coeffs: Vec<T>,
}

impl<T: Scalar> FormalSeries<T> {
    pub fn new(low: i32, coeffs: Vec<T>) -> Self {
        FormalSeries { low, coeffs }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order];
        if order > 0 {
            coeffs[0] = c;
        }
        Self::new(0, coeffs)
    }

    /// The monomial `z`, known to `O(z^order)`.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order.saturating_sub(1)];
        if !coeffs.is_empty() {
            coeffs[0] = T::one();
        }
        Self::new(1, coeffs)
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    /// Exclusive truncation order: the series is known modulo `z^order`.
    pub fn order(&self) -> i32 {
        self.low + self.coeffs.len() as i32
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero below `low`; panics past the truncation order).
    pub fn coeff(&self, k: i32) -> T {
        assert!(k < self.order(), "coefficient z^{k} beyond truncation order {}", self.order());
        if k < self.low {
            T::zero()
        } else {
            self.coeffs[(k - self.low) as usize].clone()
        }
    }

    /// Coefficients of `z^lo .. z^{hi-1}`.
    pub fn coeff_range(&self, lo: i32, hi: i32) -> Vec<T> {
        (lo..hi).map(|k| self.coeff(k)).collect()
    }

    /// Re-express with lowest stored power `low` and truncation order `order`.
    pub fn reframe(&self, low: i32, order: i32) -> Result<Self> {
        if order > self.order() {
            return Err(Error::Series(format!(
                "cannot extend truncation from {} to {order}",
                self.order()
            )));
        }
        for k in self.low..low.min(order) {
            if !self.coeff(k).is_zero() {
                return Err(Error::Series(format!("nonzero coefficient at z^{k} below new low {low}")));
            }
        }
        Ok(Self::new(low, (low..order).map(|k| self.coeff(k)).collect()))
    }

    pub fn truncate(&self, order: i32) -> Self {
        let keep = (order - self.low).clamp(0, self.coeffs.len() as i32) as usize;
        Self::new(self.low, self.coeffs[..keep].to_vec())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self::new(self.low + k, self.coeffs.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|v| v.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let low = self.low.min(other.low);
        let order = self.order().min(other.order());
        let coeffs = (low..order)
            .map(|k| {
                let a = if k >= self.low { self.coeff(k) } else { T::zero() };
                let b = if k >= other.low { other.coeff(k) } else { T::zero() };
                a + b
            })
            .collect();
        Self::new(low, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let low = self.low + other.low;
        // relative precision is the smaller of the two
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(low, out)
    }

    /// `1/f` for a series whose lowest stored coefficient is nonzero.
    pub fn reciprocal(&self) -> Result<Self> {
        let lead = self
            .coeffs
            .first()
            .cloned()
            .ok_or_else(|| Error::Series("empty series".into()))?;
        if lead.is_zero() {
            return Err(Error::Series("leading coefficient is zero".into()));
        }
        let n = self.coeffs.len();
        let mut inv = Vec::with_capacity(n);
        inv.push(T::one() / lead.clone());
        for k in 1..n {
            let mut s = T::zero();
            for j in 1..=k {
                s = s + self.coeffs[j].clone() * inv[k - j].clone();
            }
            inv.push(-s / lead.clone());
        }
        Ok(Self::new(-self.low, inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// `self(g(z))` for a power series `self` (low ≥ 0) and `g` with `g(0) = 0`.
    /// The result is known modulo `z^{min(order(self), order(g))}`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if self.low < 0 {
            return Err(Error::Series("outer series has negative powers".into()));
        }
        let g = g.normalized_low(1)?;
        let order = self.order().min(g.order()).max(0);
        let mut result = vec![T::zero(); order as usize];
        let mut power = Self::constant(T::one(), order as usize);
        for k in 0..self.order().min(order) {
            let c = self.coeff(k);
            if !c.is_zero() {
                for (i, v) in power.coeffs.iter().enumerate() {
                    let idx = power.low as usize + i;
                    if idx < result.len() {
                        result[idx] = result[idx].clone() + c.clone() * v.clone();
                    }
                }
            }
            power = power.mul_trunc(&g, order);
        }
        Ok(Self::new(0, result))
    }

    /// Product known up to absolute truncation order `order`.
    fn mul_trunc(&self, other: &Self, order: i32) -> Self {
        let low = self.low + other.low;
        let len = (order - low).max(0) as usize;
        let mut out = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(low, out)
    }

    fn normalized_low(&self, low: i32) -> Result<Self> {
        if self.low >= low {
            let pad = (self.low - low) as usize;
            let mut coeffs = vec![T::zero(); pad];
            coeffs.extend(self.coeffs.iter().cloned());
            Ok(Self::new(low, coeffs))
        } else {
            self.reframe(low, self.order())
        }
    }

    /// Compositional inverse of `f = a₁z + a₂z² + …` with `a₁ ≠ 0`.
    pub fn reverse(&self) -> Result<Self> {
        let f = self.normalized_low(1)?;
        let a1 = f
            .coeffs
            .first()
            .cloned()
            .ok_or_else(|| Error::Series("empty series".into()))?;
        if a1.is_zero() {
            return Err(Error::Series("compositional inverse needs a nonzero linear term".into()));
        }
        let order = f.order();
        let mut g = Self::new(1, vec![T::zero(); (order - 1).max(0) as usize]);
        if order > 1 {
            g.coeffs[0] = T::one() / a1.clone();
        }
        for n in 2..order {
            // with g_n still zero, [z^n] f(g) = a₁ g_n + (lower terms)
            let fg = f.compose(&g.truncate(n + 1))?;
            let residual = fg.coeff(n);
            g.coeffs[(n - 1) as usize] = -residual / a1.clone();
        }
        Ok(g)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.low.min(other.low);
        let hi = self.order().min(other.order());
        (lo..hi)
            .map(|k| {
                let a = if k >= self.low { self.coeff(k) } else { T::zero() };
                let b = if k >= other.low { other.coeff(k) } else { T::zero() };
                (a - b).abs_f64()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> FormalSeries<f64> {
        FormalSeries::new(self.low, self.coeffs.iter().map(Scalar::to_f64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn geometric(order: usize) -> FormalSeries<Rational> {
        // z/(1-z)
        FormalSeries::new(1, vec![rat(1, 1); order - 1])
    }

    #[test]
    fn reciprocal_of_one_minus_z() {
        let f = FormalSeries::new(0, vec![rat(1, 1), rat(-1, 1), rat(0, 1), rat(0, 1)]);
        let r = f.reciprocal().unwrap();
        assert_eq!(r.coeffs(), &[rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn reverse_of_z_over_one_minus_z() {
        // inverse of z/(1-z) is z/(1+z)
        let g = geometric(8).reverse().unwrap();
        let expect: Vec<Rational> = (0..7).map(|k| if k % 2 == 0 { rat(1, 1) } else { rat(-1, 1) }).collect();
        assert_eq!(g.coeffs(), expect.as_slice());
        assert_eq!(g.order(), 8);
    }

    #[test]
    fn compose_with_reverse_is_identity() {
        let f = FormalSeries::new(1, vec![rat(2, 1), rat(-3, 1), rat(1, 5), rat(7, 2), rat(0, 1), rat(1, 1)]);
        let g = f.reverse().unwrap();
        let id = f.compose(&g).unwrap();
        assert_eq!(id.order(), f.order());
        for k in 0..id.order() {
            assert_eq!(id.coeff(k), if k == 1 { rat(1, 1) } else { rat(0, 1) });
        }
        let id2 = g.compose(&f).unwrap();
        for k in 0..id2.order() {
            assert_eq!(id2.coeff(k), if k == 1 { rat(1, 1) } else { rat(0, 1) });
        }
    }

    #[test]
    fn laurent_reciprocal_shifts_low() {
        let f = FormalSeries::new(-1, vec![1.0, 0.0, -1.0]);
        let r = f.reciprocal().unwrap();
        assert_eq!(r.low(), 1);
        assert_eq!(r.coeffs(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn reverse_needs_linear_term() {
        let f = FormalSeries::new(2, vec![1.0, 1.0]);
        assert!(f.reverse().is_err());
    }
}
