//! Exact arithmetic in `Z[w]`, `w` a primitive `p`-th root of unity.
//!
//! Elements are kept in the reduced power basis `1, w, ..., w^{p-2}` of
//! length `p - 1`, with the relation `w^{p-1} = -(1 + w + ... + w^{p-2})`
//! applied eagerly. Two values are equal iff their coefficient vectors are
//! equal, so all downstream checks are plain comparisons.
//!
//! Coefficients are arbitrary-precision integers: the adjugate solve for
//! second eigenmatrices runs Bareiss elimination whose intermediate minors
//! (and their Galois norms) overflow any fixed width once `p = 7` shows up.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// An element of `Z[w]` in the reduced power basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycInt {
    p: u32,
    coeffs: Vec<BigInt>,
}

/// Errors from constructing cyclotomic values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycError {
    /// Root order is not a prime.
    NotPrime(u32),
    /// Coefficient vector has the wrong length for the given `p`.
    BadLength { p: u32, len: usize },
}

impl fmt::Display for CycError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycError::NotPrime(p) => write!(f, "{p} is not prime"),
            CycError::BadLength { p, len } => {
                write!(f, "coefficient vector of length {len}, expected {}", p - 1)
            }
        }
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl CycInt {
    /// Builds a value from an explicit coefficient vector of length `p - 1`.
    pub fn new(p: u32, coeffs: Vec<BigInt>) -> Result<Self, CycError> {
        if !is_prime(p) {
            return Err(CycError::NotPrime(p));
        }
        if coeffs.len() != (p - 1) as usize {
            return Err(CycError::BadLength { p, len: coeffs.len() });
        }
        Ok(CycInt { p, coeffs })
    }

    /// Convenience constructor from machine integers.
    pub fn from_coeffs(p: u32, coeffs: &[i128]) -> Result<Self, CycError> {
        Self::new(p, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(p: u32) -> Self {
        CycInt { p, coeffs: vec![BigInt::ZERO; (p - 1) as usize] }
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// Canonical embedding of a rational integer.
    pub fn from_int(p: u32, n: i128) -> Self {
        let mut coeffs = vec![BigInt::ZERO; (p - 1) as usize];
        coeffs[0] = BigInt::from(n);
        CycInt { p, coeffs }
    }

    /// `w^k` with `k` taken mod `p`.
    pub fn root_power(p: u32, k: i64) -> Result<Self, CycError> {
        if !is_prime(p) {
            return Err(CycError::NotPrime(p));
        }
        let k = k.rem_euclid(p as i64) as u32;
        let mut coeffs = vec![BigInt::ZERO; (p - 1) as usize];
        if k == p - 1 {
            // w^{p-1} = -(1 + w + ... + w^{p-2})
            for c in coeffs.iter_mut() {
                *c = BigInt::from(-1);
            }
        } else {
            coeffs[k as usize] = BigInt::from(1);
        }
        Ok(CycInt { p, coeffs })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Machine-integer view of the coefficients, when they fit.
    pub fn coeffs_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_i128()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Returns `Some(n)` iff the value is the embedding of the integer `n`
    /// and it fits a machine integer.
    pub fn as_int(&self) -> Option<i128> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            self.coeffs[0].to_i128()
        } else {
            None
        }
    }

    fn assert_compatible(&self, other: &CycInt) {
        assert_eq!(
            self.p, other.p,
            "mismatched root orders: {} vs {}",
            self.p, other.p
        );
    }

    pub fn add(&self, other: &CycInt) -> CycInt {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn sub(&self, other: &CycInt) -> CycInt {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn neg(&self) -> CycInt {
        CycInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scalar_mul(&self, n: i128) -> CycInt {
        let n = BigInt::from(n);
        CycInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * &n).collect(),
        }
    }

    pub fn mul(&self, other: &CycInt) -> CycInt {
        self.assert_compatible(other);
        let d = (self.p - 1) as usize;
        // Convolution up to degree 2d - 2, then fold exponents >= d back in.
        let mut conv = vec![BigInt::ZERO; 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                conv[i + j] += a * b;
            }
        }
        let mut coeffs = vec![BigInt::ZERO; d];
        for (e, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = e as u32 % self.p;
            if e == self.p - 1 {
                for out in coeffs.iter_mut() {
                    *out -= &c;
                }
            } else {
                coeffs[e as usize] += c;
            }
        }
        CycInt { p: self.p, coeffs }
    }

    /// Image under the Galois automorphism `w -> w^k`, `gcd(k, p) = 1`.
    pub fn galois(&self, k: u32) -> CycInt {
        let k = k % self.p;
        assert!(k != 0, "w -> w^0 is not an automorphism");
        let mut coeffs = vec![BigInt::ZERO; (self.p - 1) as usize];
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let target = (e as u64 * k as u64 % self.p as u64) as u32;
            if target == self.p - 1 {
                for out in coeffs.iter_mut() {
                    *out -= c;
                }
            } else {
                coeffs[target as usize] += c;
            }
        }
        CycInt { p: self.p, coeffs }
    }

    /// Complex conjugation, `w -> w^{p-1} = w^{-1}`.
    pub fn conj(&self) -> CycInt {
        if self.p == 2 {
            return self.clone();
        }
        self.galois(self.p - 1)
    }

    /// Field norm down to `Z`: the product over all Galois conjugates.
    pub fn norm(&self) -> BigInt {
        let mut acc = self.clone();
        for k in 2..self.p {
            acc = acc.mul(&self.galois(k));
        }
        debug_assert!(acc.coeffs[1..].iter().all(|c| c.is_zero()));
        acc.coeffs.into_iter().next().expect("nonempty coefficients")
    }

    /// Exact division in `Z[w]`; `None` if `other` is zero or does not
    /// divide.
    pub fn div_exact(&self, other: &CycInt) -> Option<CycInt> {
        self.assert_compatible(other);
        if other.is_zero() {
            return None;
        }
        // a/b = a * prod_{k>=2} sigma_k(b) / N(b), with N(b) a rational
        // integer.
        let mut num = self.clone();
        for k in 2..self.p {
            num = num.mul(&other.galois(k));
        }
        let den = other.norm();
        let mut coeffs = Vec::with_capacity(num.coeffs.len());
        for c in &num.coeffs {
            if (c % &den) != BigInt::ZERO {
                return None;
            }
            coeffs.push(c / &den);
        }
        Some(CycInt { p: self.p, coeffs })
    }
}

impl fmt::Display for CycInt {
    // Compact `a + b*w + c*w^2` rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != BigInt::from(1) {
                        write!(f, "{a}*")?;
                    }
                    if e == 1 {
                        write!(f, "w")?;
                    } else {
                        write!(f, "w^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Determinant of a square matrix over `Z[w]` by fraction-free (Bareiss)
/// elimination; all divisions are exact.
pub fn det(n: usize, m: &[CycInt]) -> CycInt {
    assert!(n >= 1, "determinant of an empty matrix");
    assert_eq!(m.len(), n * n);
    let p = m[0].p();
    if n == 1 {
        return m[0].clone();
    }
    let mut a: Vec<CycInt> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = CycInt::one(p);
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let pivot = (k + 1..n).find(|&r| !a[r * n + k].is_zero());
            match pivot {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return CycInt::zero(p),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k * n + k]
                    .mul(&a[i * n + j])
                    .sub(&a[i * n + k].mul(&a[k * n + j]));
                a[i * n + j] = t
                    .div_exact(&prev)
                    .expect("Bareiss pivot division is exact");
            }
        }
        prev = a[k * n + k].clone();
    }
    a[(n - 1) * n + (n - 1)].scalar_mul(sign)
}

/// Adjugate matrix: `adj(M) * M = M * adj(M) = det(M) * I`. Row-major,
/// `n * n`.
///
/// Uses one fraction-free Gauss-Jordan pass over `[M | I]` (Montante's
/// method, exact divisions by the previous pivot), which leaves
/// `det(M) * I` on the left and the adjugate on the right. A vanishing
/// pivot falls back to the entrywise cofactor expansion.
pub fn adjugate(n: usize, m: &[CycInt]) -> Vec<CycInt> {
    assert_eq!(m.len(), n * n);
    if n == 1 {
        return alloc::vec![CycInt::one(m[0].p())];
    }
    if let Some(adj) = adjugate_montante(n, m) {
        return adj;
    }
    adjugate_cofactors(n, m)
}

fn adjugate_montante(n: usize, m: &[CycInt]) -> Option<Vec<CycInt>> {
    let p = m[0].p();
    let w = 2 * n;
    let mut a = vec![CycInt::zero(p); n * w];
    for i in 0..n {
        a[i * w..i * w + n].clone_from_slice(&m[i * n..(i + 1) * n]);
        a[i * w + n + i] = CycInt::one(p);
    }
    // Row swaps run the elimination on [S*M | S] for a permutation S, and
    // the permutation cancels against the augmented half up to the sign
    // det(S): the right half ends as det(S) * adj(M).
    let mut sign = 1i128;
    let mut prev = CycInt::one(p);
    for k in 0..n {
        if a[k * w + k].is_zero() {
            let pivot_row = (k + 1..n).find(|&r| !a[r * w + k].is_zero())?;
            for j in 0..w {
                a.swap(k * w + j, pivot_row * w + j);
            }
            sign = -sign;
        }
        let pivot = a[k * w + k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let lead = a[i * w + k].clone();
            for j in 0..w {
                let t = pivot.mul(&a[i * w + j]).sub(&lead.mul(&a[k * w + j]));
                a[i * w + j] = t.div_exact(&prev)?;
            }
        }
        prev = pivot;
    }
    // the left half is now det(S*M) * I; the right half det(S) * adj(M)
    let mut adj = Vec::with_capacity(n * n);
    for i in 0..n {
        debug_assert!(a[i * w + i] == a[0], "diagonal entries all equal det");
        for j in 0..n {
            adj.push(a[i * w + n + j].scalar_mul(sign));
        }
    }
    debug_assert!(n < 2 || a[w].is_zero());
    Some(adj)
}

fn adjugate_cofactors(n: usize, m: &[CycInt]) -> Vec<CycInt> {
    let mut out = Vec::with_capacity(n * n);
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for j in 0..n {
        for i in 0..n {
            minor.clear();
            for r in 0..n {
                if r == i {
                    continue;
                }
                for c in 0..n {
                    if c == j {
                        continue;
                    }
                    minor.push(m[r * n + c].clone());
                }
            }
            let cof = det(n - 1, &minor);
            out.push(if (i + j) % 2 == 0 { cof } else { cof.neg() });
        }
    }
    out
}

/// Deterministic ring-axiom sweep used by the standalone property suite and
/// the CLI selftest: associativity, commutativity and distributivity on
/// `trials` pseudo-random triples, plus conjugation involution and the
/// vanishing sum of all `p`-th roots.
pub fn ring_axioms_check(p: u32, trials: usize, seed: u64) -> Result<(), String> {
    use alloc::format;

    if !is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    let mut state = seed;
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut rand_elem = move || {
        let coeffs: Vec<i128> = (0..p - 1)
            .map(|_| (next() % 2001) as i128 - 1000)
            .collect();
        CycInt::from_coeffs(p, &coeffs).expect("valid by construction")
    };

    let mut total = CycInt::zero(p);
    for k in 0..p {
        total = total.add(&CycInt::root_power(p, k as i64).expect("p prime"));
    }
    if !total.is_zero() {
        return Err(format!("sum of all {p}-th roots of unity is {total}, not 0"));
    }

    for t in 0..trials {
        let (a, b, c) = (rand_elem(), rand_elem(), rand_elem());
        if a.mul(&b) != b.mul(&a) {
            return Err(format!("trial {t}: multiplication not commutative"));
        }
        if a.mul(&b).mul(&c) != a.mul(&b.mul(&c)) {
            return Err(format!("trial {t}: multiplication not associative"));
        }
        if a.mul(&b.add(&c)) != a.mul(&b).add(&a.mul(&c)) {
            return Err(format!("trial {t}: multiplication does not distribute"));
        }
        if a.conj().conj() != a {
            return Err(format!("trial {t}: conjugation is not an involution"));
        }
        if a.sub(&a) != CycInt::zero(p) {
            return Err(format!("trial {t}: a - a != 0"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega(p: u32) -> CycInt {
        CycInt::root_power(p, 1).unwrap()
    }

    #[test]
    fn cyclotomic_relation_p3() {
        // 1 + w + w^2 = 0
        let p = 3;
        let total = CycInt::one(p)
            .add(&omega(p))
            .add(&CycInt::root_power(p, 2).unwrap());
        assert!(total.is_zero());
    }

    #[test]
    fn root_products_wrap() {
        // w * w^2 = w^3 = 1 for p = 3
        let w = omega(3);
        let w2 = CycInt::root_power(3, 2).unwrap();
        assert_eq!(w.mul(&w2), CycInt::one(3));
    }

    #[test]
    fn power_basis_reduction_p5() {
        // w^4 = -1 - w - w^2 - w^3
        let w4 = CycInt::root_power(5, 4).unwrap();
        assert_eq!(w4, CycInt::from_coeffs(5, &[-1, -1, -1, -1]).unwrap());
    }

    #[test]
    fn root_power_wraps_mod_p() {
        assert_eq!(CycInt::root_power(3, 0).unwrap(), CycInt::one(3));
        assert_eq!(CycInt::root_power(3, 4).unwrap(), omega(3));
        assert_eq!(CycInt::root_power(2, 1).unwrap(), CycInt::from_int(2, -1));
    }

    #[test]
    fn conjugation() {
        // conj(w) = w^2 = -1 - w over p = 3
        assert_eq!(omega(3).conj(), CycInt::from_coeffs(3, &[-1, -1]).unwrap());
        assert_eq!(CycInt::from_int(2, -1).conj(), CycInt::from_int(2, -1));
        let a = CycInt::one(5).add(&omega(5));
        let expect = CycInt::one(5).add(&CycInt::root_power(5, 4).unwrap());
        assert_eq!(a.conj(), expect);
    }

    #[test]
    fn rational_detection() {
        // w + w^2 = -1 over p = 3
        let s = omega(3).add(&CycInt::root_power(3, 2).unwrap());
        assert_eq!(s.as_int(), Some(-1));
        assert_eq!(omega(3).as_int(), None);
        assert_eq!(CycInt::from_coeffs(2, &[7]).unwrap().as_int(), Some(7));
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(CycInt::root_power(4, 1), Err(CycError::NotPrime(4)));
        assert_eq!(
            CycInt::from_coeffs(6, &[0; 5]),
            Err(CycError::NotPrime(6))
        );
    }

    #[test]
    #[should_panic(expected = "mismatched root orders")]
    fn mixed_orders_panic() {
        let _ = omega(3).add(&omega(5));
    }

    #[test]
    fn exact_division() {
        let a = omega(5).add(&CycInt::from_int(5, 3));
        let b = CycInt::root_power(5, 3).unwrap().sub(&CycInt::one(5));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&CycInt::zero(5)), None);
        // 1 is not divisible by 2
        assert_eq!(CycInt::one(3).div_exact(&CycInt::from_int(3, 2)), None);
    }

    #[test]
    fn norm_of_one_minus_omega_is_p() {
        // N(1 - w) = Phi_p(1) = p
        for p in [2u32, 3, 5, 7] {
            let v = CycInt::one(p).sub(&omega(p));
            assert_eq!(v.norm(), BigInt::from(p));
        }
    }

    #[test]
    fn determinant_and_adjugate() {
        // det over Z embedded at p = 3: [[2, 1], [3, 4]] -> 5
        let m = [
            CycInt::from_int(3, 2),
            CycInt::from_int(3, 1),
            CycInt::from_int(3, 3),
            CycInt::from_int(3, 4),
        ];
        assert_eq!(det(2, &m), CycInt::from_int(3, 5));
        let adj = adjugate(2, &m);
        // adj * m = det * I
        let d = det(2, &m);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = CycInt::zero(3);
                for k in 0..2 {
                    acc = acc.add(&adj[i * 2 + k].mul(&m[k * 2 + j]));
                }
                let expect = if i == j { d.clone() } else { CycInt::zero(3) };
                assert_eq!(acc, expect);
            }
        }
    }

    #[test]
    fn determinant_with_zero_pivot() {
        // [[0, 1], [1, 0]] -> -1
        let m = [
            CycInt::zero(3),
            CycInt::one(3),
            CycInt::one(3),
            CycInt::zero(3),
        ];
        assert_eq!(det(2, &m), CycInt::from_int(3, -1));
    }

    #[test]
    fn adjugate_routes_agree() {
        // the one-pass elimination and the cofactor expansion must agree,
        // including when pivoting kicks in and when the matrix is singular
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 9) as i128 - 4
        };
        for p in [2u32, 3, 5] {
            for trial in 0..20 {
                let n = 3 + (trial % 3);
                let mut m: Vec<CycInt> = (0..n * n)
                    .map(|_| {
                        let coeffs: Vec<i128> = (0..p - 1).map(|_| next()).collect();
                        CycInt::from_coeffs(p, &coeffs).unwrap()
                    })
                    .collect();
                if trial % 4 == 0 {
                    // force a leading zero pivot
                    m[0] = CycInt::zero(p);
                }
                if trial % 5 == 0 {
                    // force a singular matrix: duplicate a row
                    for c in 0..n {
                        m[(n - 1) * n + c] = m[c].clone();
                    }
                }
                assert_eq!(
                    adjugate(n, &m),
                    adjugate_cofactors(n, &m),
                    "p = {p}, trial {trial}"
                );
            }
        }
    }

    #[test]
    fn adjugate_inverts_larger_cyclotomic_matrix() {
        // pseudo-random 6x6 over Z[w_7]; adj * m = det * I exercises the
        // coefficient growth the eigenmatrix solve produces
        let p = 7u32;
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 15) as i128 - 7
        };
        let n = 6;
        let m: Vec<CycInt> = (0..n * n)
            .map(|_| {
                let coeffs: Vec<i128> = (0..p - 1).map(|_| next()).collect();
                CycInt::from_coeffs(p, &coeffs).unwrap()
            })
            .collect();
        let d = det(n, &m);
        let adj = adjugate(n, &m);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CycInt::zero(p);
                for k in 0..n {
                    acc = acc.add(&adj[i * n + k].mul(&m[k * n + j]));
                }
                let expect = if i == j { d.clone() } else { CycInt::zero(p) };
                assert_eq!(acc, expect);
            }
        }
    }

    #[test]
    fn ring_axiom_sweep() {
        for p in [2, 3, 5] {
            ring_axioms_check(p, 500, 0xdecafbad).unwrap();
        }
    }

    #[test]
    fn conjugate_norm_is_nonnegative_real() {
        // a * conj(a) embeds to a nonnegative real; checked against the
        // floating embedding w -> exp(2*pi*i/p), tests only.
        let eval = |a: &CycInt| -> (f64, f64) {
            let p = a.p() as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for (e, c) in a.coeffs().iter().enumerate() {
                let theta = 2.0 * core::f64::consts::PI * (e as f64) / p;
                let c = c.to_i128().unwrap() as f64;
                re += c * theta.cos();
                im += c * theta.sin();
            }
            (re, im)
        };
        let mut state = 7u64;
        for p in [2u32, 3, 5, 7] {
            for _ in 0..200 {
                let coeffs: Vec<i128> = (0..p - 1)
                    .map(|_| {
                        state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                        ((state >> 33) % 41) as i128 - 20
                    })
                    .collect();
                let a = CycInt::from_coeffs(p, &coeffs).unwrap();
                let (re, im) = eval(&a.mul(&a.conj()));
                assert!(im.abs() < 1e-9, "imaginary part {im}");
                assert!(re > -1e-9, "negative real part {re}");
            }
        }
    }
}
