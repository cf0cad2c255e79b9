//! Arithmetic in `GF(p^m)` with an explicit irreducible modulus.
//!
//! Elements are identified by their canonical integer code: the base-`p`
//! encoding of the power-basis coordinate vector, so `code(x) = sum c_i p^i`
//! is a bijection onto `[0, q)`. The canonical enumeration of the field is
//! ascending code order and always starts with `0`.
//!
//! `LinearMap` covers every additive surjection onto a subfield used by the
//! constructions here: relative traces `x -> tr(beta * x)` onto a subfield
//! of order `r = p^s`, with the identity map as the `r = q` special case.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cyclotomic::is_prime;

/// A field element, stored as its canonical integer code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub fn code(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u32),
    BadDegree(u32),
    FieldTooLarge { p: u32, m: u32 },
    /// Modulus is not monic of degree `m` with coefficients in `[0, p)`.
    BadModulus(String),
    /// Modulus factors; the witness names a root or a proper factor.
    Reducible(String),
    CodeOutOfRange { code: u32, q: u32 },
    DivisionByZero,
    /// Requested subfield order is not `p^s` with `s | m`.
    BadSubfield { r: u32, q: u32 },
    /// Linear map with `beta = 0` (or otherwise not surjective).
    NotSurjective,
    WrongCharacteristic { expected: u32, found: u32 },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::BadDegree(m) => write!(f, "extension degree {m} must be >= 1"),
            FieldError::FieldTooLarge { p, m } => write!(f, "field GF({p}^{m}) too large"),
            FieldError::BadModulus(s) => write!(f, "bad modulus: {s}"),
            FieldError::Reducible(s) => write!(f, "modulus is reducible: {s}"),
            FieldError::CodeOutOfRange { code, q } => {
                write!(f, "element code {code} out of range for field of order {q}")
            }
            FieldError::DivisionByZero => write!(f, "inverse of zero"),
            FieldError::BadSubfield { r, q } => {
                write!(f, "{r} is not the order of a subfield of the field of order {q}")
            }
            FieldError::NotSurjective => write!(f, "linear map is not surjective"),
            FieldError::WrongCharacteristic { expected, found } => {
                write!(f, "expected characteristic {expected}, found {found}")
            }
        }
    }
}

/// Ambient field context: characteristic, degree and modulus polynomial.
///
/// Cheap to clone; matrices and schemes embed a copy so they stay
/// self-contained.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficient vector `c_0 ... c_m` with `c_m = 1`.
    /// Degree-1 fields use the degenerate modulus `x`.
    modulus: Vec<u32>,
}

// --- polynomial helpers over F_p (dense, low-degree-first) ---

fn poly_deg(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn poly_mod_reduce(mut a: Vec<u32>, modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    while let Some(d) = poly_deg(&a) {
        if d < m {
            break;
        }
        let lead = a[d];
        // modulus is monic: subtract lead * x^{d-m} * modulus
        for (i, &mc) in modulus.iter().enumerate() {
            let idx = d - m + i;
            let sub = (lead * mc) % p;
            a[idx] = (a[idx] + (p - sub)) % p;
        }
    }
    a.truncate(m.max(1));
    a.resize(m.max(1), 0);
    a
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let mut conv = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            conv[i + j] = (conv[i + j] + x * y) % p;
        }
    }
    poly_mod_reduce(conv, modulus, p)
}

/// Trial division of `f` (monic) by every monic polynomial of degree
/// `1..=deg(f)/2`; returns a factor if one divides.
fn find_factor(f: &[u32], p: u32) -> Option<Vec<u32>> {
    let n = poly_deg(f).unwrap_or(0);
    for d in 1..=n / 2 {
        // enumerate monic degree-d polynomials by their low coefficients
        let count = (p as u64).pow(d as u32);
        for mut idx in 0..count {
            let mut cand = vec![0u32; d + 1];
            for c in cand.iter_mut().take(d) {
                *c = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            cand[d] = 1;
            if poly_rem_is_zero(f, &cand, p) {
                return Some(cand);
            }
        }
    }
    None
}

fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let mut rem: Vec<u32> = f.to_vec();
    let gd = poly_deg(g).expect("divisor nonzero");
    let ginv = mod_inverse(g[gd], p);
    while let Some(d) = poly_deg(&rem) {
        if d < gd {
            return false;
        }
        let coef = (rem[d] * ginv) % p;
        for (i, &gc) in g.iter().enumerate() {
            let idx = d - gd + i;
            let sub = (coef * gc) % p;
            rem[idx] = (rem[idx] + (p - sub)) % p;
        }
    }
    true
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is a small prime; Fermat
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn poly_to_string(a: &[u32]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &c) in a.iter().enumerate() {
        if c == 0 {
            continue;
        }
        parts.push(match i {
            0 => format!("{c}"),
            1 if c == 1 => "x".into(),
            1 => format!("{c}x"),
            _ if c == 1 => format!("x^{i}"),
            _ => format!("{c}x^{i}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl FieldCtx {
    /// Field with the default modulus: the lexicographically smallest monic
    /// irreducible of degree `m` over `F_p`, coefficients compared
    /// low-degree-first. Degree-1 fields use the modulus `x`.
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        Self::validate_pm(p, m)?;
        if m == 1 {
            return Self::with_modulus(p, 1, &[0, 1]);
        }
        let count = (p as u64).pow(m);
        for mut idx in 0..count {
            let mut cand = vec![0u32; m as usize + 1];
            // low-degree-first lexicographic order == counting in base p
            // with c_0 as the least significant digit
            for c in cand.iter_mut().take(m as usize) {
                *c = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            cand[m as usize] = 1;
            if find_factor(&cand, p).is_none() && has_no_root(&cand, p) {
                return Self::with_modulus(p, m, &cand);
            }
        }
        unreachable!("an irreducible of every degree exists over F_p")
    }

    /// Field with an explicit monic modulus of degree `m`; irreducibility is
    /// verified by exhaustive root and factor search.
    pub fn with_modulus(p: u32, m: u32, modulus: &[u32]) -> Result<Self, FieldError> {
        Self::validate_pm(p, m)?;
        if modulus.len() != m as usize + 1 {
            return Err(FieldError::BadModulus(format!(
                "expected {} coefficients for degree {m}, got {}",
                m + 1,
                modulus.len()
            )));
        }
        if modulus[m as usize] != 1 {
            return Err(FieldError::BadModulus("not monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus(format!(
                "coefficient out of range mod {p}"
            )));
        }
        if m > 1 {
            for x in 0..p {
                if poly_eval(modulus, x, p) == 0 {
                    return Err(FieldError::Reducible(format!("root x={x}")));
                }
            }
            if let Some(factor) = find_factor(modulus, p) {
                return Err(FieldError::Reducible(format!(
                    "factor {}",
                    poly_to_string(&factor)
                )));
            }
        }
        let q = (p as u64).pow(m);
        Ok(FieldCtx {
            p,
            m,
            q: q as u32,
            modulus: modulus.to_vec(),
        })
    }

    fn validate_pm(p: u32, m: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m < 1 {
            return Err(FieldError::BadDegree(m));
        }
        let q = (p as u64).checked_pow(m);
        match q {
            Some(q) if q <= 1 << 16 => Ok(()),
            _ => Err(FieldError::FieldTooLarge { p, m }),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, code: u32) -> Result<FieldElement, FieldError> {
        if code < self.q {
            Ok(FieldElement(code))
        } else {
            Err(FieldError::CodeOutOfRange { code, q: self.q })
        }
    }

    /// Power-basis coordinates of `x`, low degree first, length `m`.
    pub fn coords(&self, x: FieldElement) -> Vec<u32> {
        let mut code = x.0;
        (0..self.m)
            .map(|_| {
                let d = code % self.p;
                code /= self.p;
                d
            })
            .collect()
    }

    fn encode(&self, coords: &[u32]) -> FieldElement {
        let mut code = 0u32;
        for &c in coords.iter().rev() {
            code = code * self.p + c;
        }
        FieldElement(code)
    }

    /// All `q` elements in canonical order; the first is always `0`.
    pub fn enumerate(&self) -> Vec<FieldElement> {
        (0..self.q).map(FieldElement).collect()
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let (a, b) = (self.coords(x), self.coords(y));
        let sum: Vec<u32> = a.iter().zip(&b).map(|(&u, &v)| (u + v) % self.p).collect();
        self.encode(&sum)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        let a = self.coords(x);
        let n: Vec<u32> = a.iter().map(|&u| (self.p - u) % self.p).collect();
        self.encode(&n)
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let prod = poly_mul_mod(&self.coords(x), &self.coords(y), &self.modulus, self.p);
        self.encode(&prod)
    }

    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement, FieldError> {
        if x.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(x, self.q as u64 - 2))
    }

    /// Absolute trace `x + x^p + ... + x^{p^{m-1}}`; lands in the prime
    /// subfield, so the result code is a residue `< p`.
    pub fn trace(&self, x: FieldElement) -> FieldElement {
        let t = self.relative_trace(x, self.p);
        debug_assert!(t.0 < self.p);
        t
    }

    /// Trace onto the subfield of order `r = p^s`:
    /// `x + x^r + x^{r^2} + ... + x^{r^{m/s - 1}}`.
    pub fn relative_trace(&self, x: FieldElement, r: u32) -> FieldElement {
        let mut acc = self.zero();
        let mut term = x;
        let steps = self.subfield_degree(r).expect("validated subfield order");
        for _ in 0..(self.m / steps) {
            acc = self.add(acc, term);
            term = self.pow(term, r as u64);
        }
        acc
    }

    /// `s` such that `r = p^s` and `s | m`, if any.
    fn subfield_degree(&self, r: u32) -> Option<u32> {
        let mut s = 0u32;
        let mut acc = 1u64;
        while acc < r as u64 {
            acc *= self.p as u64;
            s += 1;
        }
        if acc == r as u64 && s >= 1 && self.m.is_multiple_of(s) {
            Some(s)
        } else {
            None
        }
    }

    /// The elements of the subfield of order `r`, in canonical code order.
    pub fn subfield_elements(&self, r: u32) -> Result<Vec<FieldElement>, FieldError> {
        if self.subfield_degree(r).is_none() {
            return Err(FieldError::BadSubfield { r, q: self.q });
        }
        let elems: Vec<FieldElement> = self
            .enumerate()
            .into_iter()
            .filter(|&x| self.pow(x, r as u64) == x)
            .collect();
        debug_assert_eq!(elems.len(), r as usize);
        Ok(elems)
    }

    /// Full multiplication table, `q * q` codes; `tab[x * q + y] = code(x*y)`.
    pub fn mul_table(&self) -> Vec<u32> {
        let q = self.q as usize;
        let mut tab = vec![0u32; q * q];
        for x in 0..q {
            for y in x..q {
                let v = self.mul(FieldElement(x as u32), FieldElement(y as u32)).0;
                tab[x * q + y] = v;
                tab[y * q + x] = v;
            }
        }
        tab
    }

    /// Absolute-trace table: `tab[x] = tr(x)` as a residue `< p`.
    pub fn trace_table(&self) -> Vec<u32> {
        (0..self.q).map(|x| self.trace(FieldElement(x)).0).collect()
    }
}

fn poly_eval(a: &[u32], x: u32, p: u32) -> u32 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = (acc * x as u64 + c as u64) % p as u64;
    }
    acc as u32
}

fn has_no_root(f: &[u32], p: u32) -> bool {
    (0..p).all(|x| poly_eval(f, x, p) != 0)
}

/// Label describing how a [`LinearMap`] was requested; used for display and
/// deterministic file naming.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PhiKind {
    Identity,
    Trace,
    BetaTrace(u32),
    Subfield(u32),
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiKind::Identity => write!(f, "id"),
            PhiKind::Trace => write!(f, "trace"),
            PhiKind::BetaTrace(b) => write!(f, "beta{b}"),
            PhiKind::Subfield(r) => write!(f, "sub{r}"),
        }
    }
}

/// A surjective additive map `GF(q) -> GF(r)`, `r = p^s`, `s | m`, realized
/// as `x -> tr_{q -> r}(beta * x)`. The identity is the `r = q, beta = 1`
/// case. Additivity and surjectivity are verified exhaustively at
/// construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    ctx: FieldCtx,
    target_order: u32,
    beta: FieldElement,
    kind: PhiKind,
    /// Target subfield elements in canonical code order (`beta_1 = 0`).
    targets: Vec<FieldElement>,
}

impl LinearMap {
    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::build(ctx, ctx.q(), ctx.one(), PhiKind::Identity)
            .expect("identity map is additive and surjective")
    }

    /// Absolute trace onto the prime subfield.
    pub fn trace(ctx: &FieldCtx) -> Self {
        Self::build(ctx, ctx.p(), ctx.one(), PhiKind::Trace)
            .expect("absolute trace is additive and surjective")
    }

    /// `x -> tr(beta * x)` onto the prime subfield; `beta != 0`.
    pub fn beta_trace(ctx: &FieldCtx, beta: FieldElement) -> Result<Self, FieldError> {
        Self::build(ctx, ctx.p(), beta, PhiKind::BetaTrace(beta.0))
    }

    /// Relative trace onto the subfield of order `r`.
    pub fn subfield_trace(ctx: &FieldCtx, r: u32) -> Result<Self, FieldError> {
        Self::build(ctx, r, ctx.one(), PhiKind::Subfield(r))
    }

    fn build(
        ctx: &FieldCtx,
        target_order: u32,
        beta: FieldElement,
        kind: PhiKind,
    ) -> Result<Self, FieldError> {
        if beta.0 == 0 {
            return Err(FieldError::NotSurjective);
        }
        let targets = ctx.subfield_elements(target_order)?;
        let map = LinearMap {
            ctx: ctx.clone(),
            target_order,
            beta,
            kind,
            targets,
        };
        // Additivity is structural (trace of a product is F_p-linear), but
        // the whole artifact leans on it, so check it outright.
        for x in 0..ctx.q() {
            let fx = map.apply(FieldElement(x));
            if map.target_index(fx).is_none() {
                return Err(FieldError::NotSurjective);
            }
            for y in x..ctx.q() {
                let (ex, ey) = (FieldElement(x), FieldElement(y));
                if map.apply(ctx.add(ex, ey)) != ctx.add(map.apply(ex), map.apply(ey)) {
                    return Err(FieldError::NotSurjective);
                }
            }
        }
        let mut seen = vec![false; target_order as usize];
        for x in 0..ctx.q() {
            let idx = map
                .target_index(map.apply(FieldElement(x)))
                .ok_or(FieldError::NotSurjective)?;
            seen[idx] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(map)
        } else {
            Err(FieldError::NotSurjective)
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn target_order(&self) -> u32 {
        self.target_order
    }

    pub fn beta(&self) -> FieldElement {
        self.beta
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    /// Target elements in canonical order; index `i` is the class label
    /// `beta_{i+1}` used by the scheme construction.
    pub fn targets(&self) -> &[FieldElement] {
        &self.targets
    }

    pub fn apply(&self, x: FieldElement) -> FieldElement {
        self.ctx
            .relative_trace(self.ctx.mul(self.beta, x), self.target_order)
    }

    /// Index of a target element in the canonical target enumeration.
    pub fn target_index(&self, y: FieldElement) -> Option<usize> {
        self.targets.binary_search(&y).ok()
    }

    /// The fiber `phi^{-1}(target)` for each target, in enumeration order.
    pub fn fibers(&self) -> Vec<Vec<FieldElement>> {
        let mut fibers = vec![Vec::new(); self.target_order as usize];
        for x in self.ctx.enumerate() {
            let idx = self.target_index(self.apply(x)).expect("surjective map");
            fibers[idx].push(x);
        }
        fibers
    }
}

/// Witness for a failed hyperplane sum-cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperplaneWitness {
    pub f1: Vec<u32>,
    pub f2: Vec<u32>,
    pub shift: Vec<u32>,
    pub element: Vec<u32>,
    pub count: u64,
    pub expected: u64,
}

/// Checks, exhaustively, that for every pair of independent nonzero linear
/// functionals `f1, f2` on `F_p^n` and every shift `a`, the multiset
/// `{x + y + a : x in ker f1, y in ker f2}` contains each vector of `F_p^n`
/// exactly `p^{n-2}` times.
pub fn hyperplane_sum_cover_check(p: u32, n: u32) -> Result<(), HyperplaneWitness> {
    assert!(is_prime(p) && n >= 2, "requires prime p and n >= 2");
    let size = (p as u64).pow(n) as usize;
    let decode = |mut v: usize| -> Vec<u32> {
        (0..n)
            .map(|_| {
                let d = (v % p as usize) as u32;
                v /= p as usize;
                d
            })
            .collect()
    };
    let dot = |f: &[u32], v: &[u32]| -> u32 {
        f.iter().zip(v).map(|(&a, &b)| a * b).sum::<u32>() % p
    };
    let add_codes = |a: usize, b: usize| -> usize {
        let (va, vb) = (decode(a), decode(b));
        let mut code = 0usize;
        for i in (0..n as usize).rev() {
            code = code * p as usize + ((va[i] + vb[i]) % p) as usize;
        }
        code
    };
    let kernels: Vec<Vec<usize>> = (1..size)
        .map(|f| {
            let fv = decode(f);
            (0..size).filter(|&v| dot(&fv, &decode(v)) == 0).collect()
        })
        .collect();
    let expected = (p as u64).pow(n - 2);
    for f1 in 1..size {
        for f2 in f1 + 1..size {
            // skip scalar multiples: same kernel
            if kernels[f1 - 1] == kernels[f2 - 1] {
                continue;
            }
            for a in 0..size {
                let mut counts = vec![0u64; size];
                for &x in &kernels[f1 - 1] {
                    let xa = add_codes(x, a);
                    for &y in &kernels[f2 - 1] {
                        counts[add_codes(xa, y)] += 1;
                    }
                }
                if let Some(v) = counts.iter().position(|&c| c != expected) {
                    return Err(HyperplaneWitness {
                        f1: decode(f1),
                        f2: decode(f2),
                        shift: decode(a),
                        element: decode(v),
                        count: counts[v],
                        expected,
                    });
                }
            }
        }
    }
    Ok(())
}
