//! Non-crossing partitions and the cumulant combinatorics built on them.
//!
//! The production paths here are recursions, not enumerations: the
//! moment/free-cumulant relation is evaluated through the first-block
//! recursion `m_n = Σ_s κ_s [z^{n-s}] M(z)^s`, boolean cumulants through the
//! interval recursion, and free multiplicative convolution through a dynamic
//! program over monochromatic non-crossing partitions of the alternating word
//! `a b a b ... a b`. Explicit enumeration of `NC(n)` is kept for small `n`
//! and serves as the independent check on all of them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::{SeqKind, SeqN};

pub const MAX_ENUMERATE: usize = 14;
pub const MAX_CUMULANT_ORDER: usize = 20;
pub const MAX_SQUARE_ORDER: usize = 16;
pub const MAX_MULT_ORDER: usize = 16;

/// A set partition of `{1..n}` in canonical form: every block sorted, blocks
/// ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &e in b {
                if e == 0 || e > n || seen[e] {
                    return Err(Error::InvalidArgument(format!(
                        "element {e} out of range or repeated"
                    )));
                }
                seen[e] = true;
            }
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::InvalidArgument("blocks do not cover 1..n".into()));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        SetPartition { n, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    pub fn one_block(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let label = self.labels();
        let n = self.n;
        for a in 1..=n {
            for b in a + 1..=n {
                if label[b] == label[a] {
                    continue;
                }
                for c in b + 1..=n {
                    if label[c] != label[a] {
                        continue;
                    }
                    for d in c + 1..=n {
                        if label[d] == label[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Block index of every element, `labels()[e]` for `e` in `1..=n`.
    fn labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n + 1];
        for (k, b) in self.blocks.iter().enumerate() {
            for &e in b {
                label[e] = k;
            }
        }
        label
    }

    /// Cyclic successor of each element inside its block.
    fn as_permutation(&self) -> Vec<usize> {
        let mut next = vec![0; self.n + 1];
        for b in &self.blocks {
            for (i, &e) in b.iter().enumerate() {
                next[e] = b[(i + 1) % b.len()];
            }
        }
        next
    }

    fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len() - 1;
        let mut seen = vec![false; n + 1];
        let mut blocks = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut block = Vec::new();
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                block.push(e);
                e = perm[e];
            }
            blocks.push(block);
        }
        Self::canonical(n, blocks)
    }

    /// Rotate every element by one: `e ↦ e + 1 (mod n)`.
    pub fn rotate(&self) -> Self {
        let n = self.n;
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&e| e % n + 1).collect())
            .collect();
        Self::canonical(n, blocks)
    }
}

impl std::fmt::Display for SetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{{{}}}", parts.join("|"))
    }
}

/// All non-crossing partitions of `{1..n}`, in the order produced by a
/// left-to-right construction that keeps still-extendable blocks on a stack.
pub fn enumerate_nc(n: usize) -> Result<Vec<SetPartition>> {
    if n == 0 || n > MAX_ENUMERATE {
        return Err(Error::OrderTooLarge {
            what: "enumerate_nc",
            requested: n,
            cap: MAX_ENUMERATE,
        });
    }
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    extend_nc(1, n, &mut blocks, &mut stack, &mut out);
    Ok(out)
}

fn extend_nc(
    e: usize,
    n: usize,
    blocks: &mut Vec<Vec<usize>>,
    stack: &mut Vec<usize>,
    out: &mut Vec<SetPartition>,
) {
    if e > n {
        out.push(SetPartition::canonical(n, blocks.clone()));
        return;
    }
    blocks.push(vec![e]);
    stack.push(blocks.len() - 1);
    extend_nc(e + 1, n, blocks, stack, out);
    stack.pop();
    blocks.pop();

    // Joining an open block closes every block opened after it.
    for k in (0..stack.len()).rev() {
        let saved: Vec<usize> = stack[k + 1..].to_vec();
        let target = stack[k];
        stack.truncate(k + 1);
        blocks[target].push(e);
        extend_nc(e + 1, n, blocks, stack, out);
        blocks[target].pop();
        stack.extend(saved);
    }
}

/// Kreweras complement `K(π) = π⁻¹ ∘ γ` with `γ = (1 2 … n)`.
pub fn kreweras(p: &SetPartition) -> Result<SetPartition> {
    if !p.is_noncrossing() {
        return Err(Error::Crossing);
    }
    let n = p.n;
    let next = p.as_permutation();
    let mut prev = vec![0; n + 1];
    for e in 1..=n {
        prev[next[e]] = e;
    }
    let mut k = vec![0; n + 1];
    for e in 1..=n {
        k[e] = prev[e % n + 1];
    }
    Ok(SetPartition::from_permutation(&k))
}

/// Multiplicative weight `t_π = Π_{V∈π} t_{|V|}`.
pub fn partition_weight<T: Scalar>(p: &SetPartition, base: &[T]) -> T {
    p.block_sizes()
        .fold(T::one(), |acc, s| acc * base[s - 1].clone())
}

pub(crate) fn check_order(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::OrderTooLarge {
            what,
            requested: n,
            cap,
        });
    }
    Ok(())
}

/// `[z^k] (1 + Σ m_j z^j)^s` for `k < m.len()+1`: coefficients of the powers of
/// the moment series, computed only as far as the known prefix allows.
fn power_coeff<T: Scalar>(m: &[T], s: usize, k: usize) -> T {
    // series 1 + m_1 z + ... truncated at z^k
    let base: Vec<T> = std::iter::once(T::one())
        .chain(m.iter().take(k).cloned())
        .chain(std::iter::repeat(T::zero()))
        .take(k + 1)
        .collect();
    let mut acc = vec![T::zero(); k + 1];
    acc[0] = T::one();
    for _ in 0..s {
        let mut next = vec![T::zero(); k + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in base.iter().enumerate().take(k + 1 - i) {
                next[i + j] = next[i + j].clone() + a.clone() * b.clone();
            }
        }
        acc = next;
    }
    acc[k].clone()
}

/// `m_n = Σ_{π∈NC(n)} κ_π`, via the first-block recursion.
pub fn moments_from_free_cumulants<T: Scalar>(kappa: &SeqN<T>) -> Result<SeqN<T>> {
    kappa.expect_kind(SeqKind::FreeCumulant)?;
    check_order("moments_from_free_cumulants", kappa.order(), MAX_CUMULANT_ORDER)?;
    Ok(SeqN::moments(nc_sum(&kappa.values)))
}

/// `Σ_{π∈NC(n)} t_π` for `n = 1..=len(t)`.
pub(crate) fn nc_sum<T: Scalar>(t: &[T]) -> Vec<T> {
    let mut m: Vec<T> = Vec::with_capacity(t.len());
    for n in 1..=t.len() {
        let mut total = T::zero();
        for s in 1..=n {
            if t[s - 1].is_zero() {
                continue;
            }
            total = total + t[s - 1].clone() * power_coeff(&m, s, n - s);
        }
        m.push(total);
    }
    m
}

/// Möbius inversion of the moment-cumulant formula on `NC(n)`.
pub fn free_cumulants_from_moments<T: Scalar>(m: &SeqN<T>) -> Result<SeqN<T>> {
    m.expect_kind(SeqKind::Moment)?;
    check_order("free_cumulants_from_moments", m.order(), MAX_CUMULANT_ORDER)?;
    let mut kappa: Vec<T> = Vec::with_capacity(m.order());
    for n in 1..=m.order() {
        let known = &m.values[..n - 1];
        let mut lower = T::zero();
        for s in 1..n {
            if kappa[s - 1].is_zero() {
                continue;
            }
            lower = lower + kappa[s - 1].clone() * power_coeff(known, s, n - s);
        }
        kappa.push(m.values[n - 1].clone() - lower);
    }
    Ok(SeqN::free_cumulants(kappa))
}

/// Boolean cumulants: `m_n = Σ_{s=1}^n r_s m_{n-s}` inverted.
pub fn boolean_cumulants_from_moments<T: Scalar>(m: &SeqN<T>) -> Result<SeqN<T>> {
    m.expect_kind(SeqKind::Moment)?;
    check_order("boolean_cumulants_from_moments", m.order(), MAX_CUMULANT_ORDER)?;
    let mom = |k: usize| -> T {
        if k == 0 {
            T::one()
        } else {
            m.values[k - 1].clone()
        }
    };
    let mut r: Vec<T> = Vec::with_capacity(m.order());
    for n in 1..=m.order() {
        let mut v = m.values[n - 1].clone();
        for s in 1..n {
            v = v - r[s - 1].clone() * mom(n - s);
        }
        r.push(v);
    }
    Ok(SeqN::boolean_cumulants(r))
}

pub fn moments_from_boolean_cumulants<T: Scalar>(r: &SeqN<T>) -> Result<SeqN<T>> {
    r.expect_kind(SeqKind::BooleanCumulant)?;
    check_order("moments_from_boolean_cumulants", r.order(), MAX_CUMULANT_ORDER)?;
    let mut m: Vec<T> = Vec::with_capacity(r.order());
    for n in 1..=r.order() {
        let mut v = r.values[n - 1].clone();
        for s in 1..n {
            v = v + r.values[s - 1].clone() * m[n - s - 1].clone();
        }
        m.push(v);
    }
    Ok(SeqN::moments(m))
}

/// Free cumulants of `x²` for an even element `x` with determining sequence
/// `α_n = κ_{2n}(x)`: `κ_n(x²) = Σ_{π∈NC(n)} α_π`.
pub fn square_cumulants<T: Scalar>(alpha: &[T]) -> Result<SeqN<T>> {
    check_order("square_cumulants", alpha.len(), MAX_SQUARE_ORDER)?;
    Ok(SeqN::free_cumulants(nc_sum(alpha)))
}

/// Sum over non-crossing partitions of an alternating two-coloured word whose
/// blocks are monochromatic, weighted by `κ^{(c)}_{|V|}` per block of colour `c`.
///
/// Returns `A[c][L]`: the sum for the word of length `L` whose first letter has
/// colour `c`, for `L = 0..=max_len`.
fn alternating_word_sums<T: Scalar>(kappa: [&[T]; 2], max_len: usize) -> [Vec<T>; 2] {
    let mut a: [Vec<T>; 2] = [vec![T::one()], vec![T::one()]];
    // e[c][s][j]: first block (colour c) has s+1 elements, last one at position j.
    let mut e: [Vec<Vec<T>>; 2] = [Vec::new(), Vec::new()];
    for c in 0..2 {
        let max_block = kappa[c].len();
        e[c] = vec![vec![T::zero(); max_len + 1]; max_block.max(1)];
        if max_len >= 1 {
            e[c][0][1] = T::one();
        }
    }
    for len in 1..=max_len {
        // extend e[c][s][len] for s ≥ 1 using gaps of odd length g ≤ len-2
        for c in 0..2 {
            let other = 1 - c;
            for s in 1..e[c].len() {
                let mut v = T::zero();
                let mut g = 1;
                while g + 1 < len {
                    let prev = &e[c][s - 1][len - g - 1];
                    if !prev.is_zero() {
                        v = v + prev.clone() * a[other][g].clone();
                    }
                    g += 2;
                }
                e[c][s][len] = v;
            }
        }
        let mut fresh = [T::zero(), T::zero()];
        for c in 0..2 {
            let other = 1 - c;
            let mut v = T::zero();
            for (s, k) in kappa[c].iter().enumerate() {
                if k.is_zero() {
                    continue;
                }
                let mut inner = T::zero();
                for j in 1..=len {
                    let ej = &e[c][s][j];
                    if ej.is_zero() {
                        continue;
                    }
                    inner = inner + ej.clone() * a[other][len - j].clone();
                }
                v = v + k.clone() * inner;
            }
            fresh[c] = v;
        }
        let [f0, f1] = fresh;
        a[0].push(f0);
        a[1].push(f1);
    }
    a
}

/// Moments of `μ ⊠ ν` from the moments of both factors:
/// `m_n(μ⊠ν) = Σ_{π∈NC(n)} κ_π(μ) m_{K(π)}(ν)`.
///
/// `μ` must be supported on `[0, ∞)`, or `ν` symmetric; neither is checked
/// here beyond rejecting the pair `(δ₀, δ₀)`.
pub fn free_mult_moments<T: Scalar>(mu: &SeqN<T>, nu: &SeqN<T>) -> Result<SeqN<T>> {
    mu.expect_kind(SeqKind::Moment)?;
    nu.expect_kind(SeqKind::Moment)?;
    let n = mu.order().min(nu.order());
    check_order("free_mult_moments", n, MAX_MULT_ORDER)?;
    if mu.values.iter().all(Scalar::is_zero) && nu.values.iter().all(Scalar::is_zero) {
        return Err(Error::BothDeltaZero);
    }
    let ka = free_cumulants_from_moments(&mu.truncate(n)?)?;
    let kb = free_cumulants_from_moments(&nu.truncate(n)?)?;
    let sums = alternating_word_sums([&ka.values, &kb.values], 2 * n);
    Ok(SeqN::moments(
        (1..=n).map(|k| sums[0][2 * k].clone()).collect(),
    ))
}

/// Same quantity as [`free_mult_moments`], by explicit enumeration of `NC(n)`
/// and Kreweras complements. Exponential; for cross-checks only.
pub fn free_mult_moments_enumerated<T: Scalar>(mu: &SeqN<T>, nu: &SeqN<T>) -> Result<SeqN<T>> {
    let n = mu.order().min(nu.order());
    check_order("free_mult_moments_enumerated", n, 12)?;
    let ka = free_cumulants_from_moments(&mu.truncate(n)?)?;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut total = T::zero();
        for p in enumerate_nc(k)? {
            let kp = kreweras(&p)?;
            total = total + partition_weight(&p, &ka.values) * partition_weight(&kp, &nu.values);
        }
        out.push(total);
    }
    Ok(SeqN::moments(out))
}

/// Catalan numbers `C_0..=C_n` by the standard convolution recursion.
pub fn catalan(n: usize) -> Vec<u128> {
    let mut c = vec![1u128];
    for k in 1..=n {
        let v = (0..k).map(|i| c[i] * c[k - 1 - i]).sum();
        c.push(v);
    }
    c
}
