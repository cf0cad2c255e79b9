//! The translation association scheme on `X = F_q x F_q` induced by a
//! surjective additive map `phi : F_q -> F_r`.
//!
//! Relations, with `beta_1 = 0, ..., beta_r` the canonical enumeration of
//! the target subfield:
//!
//! * `R_0`: the diagonal;
//! * `R_i` (`1 <= i <= r`): pairs with `x_1 != y_1` and
//!   `phi((-x_1 + y_1)(-x_2 + y_2)) = beta_i`;
//! * `R_{r+1}`: pairs with `x_1 = y_1`, `x_2 != y_2`.
//!
//! All relations are translation invariant, so the scheme is represented by
//! its difference class function: the class of `(x, y)` depends only on
//! `y - x`. Intersection numbers are computed by counting over every
//! difference (which simultaneously verifies the scheme axiom that the
//! counts are constant on each class) and can be cross-validated against
//! dense adjacency-matrix products.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitmat::BitMatrix;
use crate::field::{FieldCtx, FieldElement, LinearMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeError {
    /// Index or argument precondition violated.
    Usage(SchemeUsage),
    /// `A_i * A_j` is not constant on a class: the two ordered pairs are in
    /// the same relation but see different counts.
    NotCoherent {
        i: usize,
        j: usize,
        pair_a: (usize, usize),
        pair_b: (usize, usize),
        count_a: u64,
        count_b: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeUsage {
    ClassOutOfRange { i: usize, classes: usize },
    MalformedPartition(&'static str),
    /// The vertex relabeling does not act on classes: two differences in the
    /// same class land in different classes.
    InconsistentClassMap {
        class: usize,
        diff_a: usize,
        diff_b: usize,
    },
}

impl SchemeError {
    pub fn is_verification_failure(&self) -> bool {
        matches!(self, SchemeError::NotCoherent { .. })
    }
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::Usage(u) => write!(f, "usage error: {u:?}"),
            SchemeError::NotCoherent { i, j, pair_a, pair_b, count_a, count_b } => write!(
                f,
                "A_{i}A_{j} not constant on a class: pair {pair_a:?} sees {count_a}, pair {pair_b:?} sees {count_b}"
            ),
        }
    }
}

/// A translation scheme (or candidate scheme) on `F_q x F_q`, stored as the
/// class of each difference vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SchemeInstance {
    ctx: FieldCtx,
    phi: Option<LinearMap>,
    q: u32,
    classes: usize,
    /// `dcf[d1 * q + d2]` is the class of the difference `(d1, d2)`.
    dcf: Vec<u8>,
    valencies: Vec<u64>,
}

/// The structure constants `p_{ij}^k` of a scheme, flattened.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntersectionTensor {
    classes: usize,
    data: Vec<u64>,
}

impl IntersectionTensor {
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        let c = self.classes;
        self.data[(i * c + j) * c + k]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    /// `p_{ij}^k = p_{ji}^k` everywhere.
    pub fn is_commutative(&self) -> bool {
        let c = self.classes;
        (0..c).all(|i| {
            (0..c).all(|j| (0..c).all(|k| self.get(i, j, k) == self.get(j, i, k)))
        })
    }

    /// Row-sum law: `sum_j p_{ij}^k = k_i` for every `i, k`.
    pub fn satisfies_row_sum_law(&self, valencies: &[u64]) -> bool {
        let c = self.classes;
        (0..c).all(|i| {
            (0..c).all(|k| (0..c).map(|j| self.get(i, j, k)).sum::<u64>() == valencies[i])
        })
    }
}

impl SchemeInstance {
    /// Builds the `(r + 2)`-class relation partition for the given map.
    pub fn build(ctx: &FieldCtx, phi: &LinearMap) -> Self {
        assert_eq!(phi.ctx(), ctx, "map built over a different field");
        let q = ctx.q();
        let r = phi.target_order() as usize;
        let classes = r + 2;
        let mul = ctx.mul_table();
        let qs = q as usize;
        let mut dcf = vec![0u8; qs * qs];
        let mut valencies = vec![0u64; classes];
        for d1 in 0..qs {
            for d2 in 0..qs {
                let class = if d1 == 0 && d2 == 0 {
                    0
                } else if d1 == 0 {
                    r + 1
                } else {
                    let prod = FieldElement(mul[d1 * qs + d2]);
                    1 + phi
                        .target_index(phi.apply(prod))
                        .expect("map is surjective onto its target")
                };
                dcf[d1 * qs + d2] = class as u8;
                valencies[class] += 1;
            }
        }
        valencies[0] = 1; // the diagonal class counts once per vertex
        let scheme = SchemeInstance {
            ctx: ctx.clone(),
            phi: Some(phi.clone()),
            q,
            classes,
            dcf,
            valencies,
        };
        debug_assert!(scheme.differences_symmetric());
        scheme
    }

    /// Class of the ordered pair `(x, y)` straight from the relation
    /// definitions, without the difference table. Oracle path for tests.
    pub fn pair_class_direct(
        ctx: &FieldCtx,
        phi: &LinearMap,
        x: (FieldElement, FieldElement),
        y: (FieldElement, FieldElement),
    ) -> usize {
        let r = phi.target_order() as usize;
        if x == y {
            0
        } else if x.0 == y.0 {
            r + 1
        } else {
            let prod = ctx.mul(ctx.sub(y.0, x.0), ctx.sub(y.1, x.1));
            1 + phi.target_index(phi.apply(prod)).expect("surjective")
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn phi(&self) -> Option<&LinearMap> {
        self.phi.as_ref()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn vertex_count(&self) -> usize {
        (self.q * self.q) as usize
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    /// Class of the difference vector `(d1, d2)` given by codes.
    pub fn difference_class(&self, d1: u32, d2: u32) -> usize {
        self.dcf[(d1 * self.q + d2) as usize] as usize
    }

    /// Class of the ordered vertex pair `(x, y)`; vertices are indexed
    /// `x = x1 * q + x2` in lexicographic code order.
    pub fn pair_class(&self, x: usize, y: usize) -> usize {
        let q = self.q as usize;
        let (x1, x2) = (x / q, x % q);
        let (y1, y2) = (y / q, y % q);
        let d1 = self.ctx.sub(FieldElement(y1 as u32), FieldElement(x1 as u32));
        let d2 = self.ctx.sub(FieldElement(y2 as u32), FieldElement(x2 as u32));
        self.dcf[d1.code() as usize * q + d2.code() as usize] as usize
    }

    /// `class(-d) == class(d)` for every difference (axiom of a symmetric
    /// scheme).
    pub fn differences_symmetric(&self) -> bool {
        let q = self.q as usize;
        for d1 in 0..q {
            for d2 in 0..q {
                let n1 = self.ctx.neg(FieldElement(d1 as u32)).code() as usize;
                let n2 = self.ctx.neg(FieldElement(d2 as u32)).code() as usize;
                if self.dcf[d1 * q + d2] != self.dcf[n1 * q + n2] {
                    return false;
                }
            }
        }
        true
    }

    /// Adjacency matrix of class `i` over the `q^2` vertices.
    pub fn adjacency_matrix(&self, i: usize) -> Result<BitMatrix, SchemeError> {
        if i >= self.classes {
            return Err(SchemeError::Usage(SchemeUsage::ClassOutOfRange {
                i,
                classes: self.classes,
            }));
        }
        let q = self.q as usize;
        let n = q * q;
        let mut m = BitMatrix::zero(n);
        // difference list of the class, then one row per translate
        let diffs: Vec<(usize, usize)> = (0..q)
            .flat_map(|d1| (0..q).map(move |d2| (d1, d2)))
            .filter(|&(d1, d2)| self.dcf[d1 * q + d2] as usize == i)
            .collect();
        for x1 in 0..q {
            for x2 in 0..q {
                let x = x1 * q + x2;
                for &(d1, d2) in &diffs {
                    let y1 = self.ctx.add(FieldElement(x1 as u32), FieldElement(d1 as u32));
                    let y2 = self.ctx.add(FieldElement(x2 as u32), FieldElement(d2 as u32));
                    m.set(x, y1.code() as usize * q + y2.code() as usize, true);
                }
            }
        }
        Ok(m)
    }

    /// Exact intersection numbers via the translation fast path: for every
    /// difference `w`, count `u` with `class(u) = i` and `class(w - u) = j`;
    /// the counts must be constant on each class. The failure witness names
    /// the least `(i, j)` and two ordered pairs in the same relation with
    /// different counts.
    pub fn intersection_numbers(&self) -> Result<IntersectionTensor, SchemeError> {
        let q = self.q as usize;
        let n = q * q;
        let c = self.classes;
        // counts[w][i][j]
        let mut counts = vec![0u64; n * c * c];
        let mut sub1 = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                sub1[a * q + b] = self.ctx.sub(FieldElement(a as u32), FieldElement(b as u32)).code();
            }
        }
        for w1 in 0..q {
            for w2 in 0..q {
                let w = w1 * q + w2;
                let base = w * c * c;
                for u1 in 0..q {
                    let e1 = sub1[w1 * q + u1] as usize;
                    for u2 in 0..q {
                        let i = self.dcf[u1 * q + u2] as usize;
                        let j = self.dcf[e1 * q + sub1[w2 * q + u2] as usize] as usize;
                        counts[base + i * c + j] += 1;
                    }
                }
            }
        }
        // representative difference per class (least vertex index)
        let mut rep = vec![usize::MAX; c];
        for w in 0..n {
            let k = self.dcf[w] as usize;
            if rep[k] == usize::MAX {
                rep[k] = w;
            }
        }
        // constancy check, lexicographically least witness
        for i in 0..c {
            for j in 0..c {
                for w in 0..n {
                    let k = self.dcf[w] as usize;
                    let expect = counts[rep[k] * c * c + i * c + j];
                    let got = counts[w * c * c + i * c + j];
                    if got != expect {
                        return Err(SchemeError::NotCoherent {
                            i,
                            j,
                            pair_a: (0, rep[k]),
                            pair_b: (0, w),
                            count_a: expect,
                            count_b: got,
                        });
                    }
                }
            }
        }
        let mut data = vec![0u64; c * c * c];
        for i in 0..c {
            for j in 0..c {
                for k in 0..c {
                    data[(i * c + j) * c + k] = counts[rep[k] * c * c + i * c + j];
                }
            }
        }
        Ok(IntersectionTensor { classes: c, data })
    }

    /// Intersection numbers recovered from dense adjacency products; the
    /// independent cross-validation route for the fast path. Also checks
    /// that each product is constant on every class.
    pub fn intersection_numbers_dense(&self) -> Result<IntersectionTensor, SchemeError> {
        let c = self.classes;
        let n = self.vertex_count();
        let mats: Vec<BitMatrix> = (0..c)
            .map(|i| self.adjacency_matrix(i).expect("class in range"))
            .collect();
        let mut data = vec![0u64; c * c * c];
        for i in 0..c {
            for j in 0..c {
                let mut per_class: Vec<Option<(u64, (usize, usize))>> = vec![None; c];
                for x in 0..n {
                    for y in 0..n {
                        // (A_i A_j)(x, y) = |row_i(x) & row_j(y)|, A_j symmetric
                        let v = mats[i].common_neighbors_with(&mats[j], x, y);
                        let k = self.pair_class(x, y);
                        match per_class[k] {
                            None => per_class[k] = Some((v, (x, y))),
                            Some((expect, first)) if expect != v => {
                                return Err(SchemeError::NotCoherent {
                                    i,
                                    j,
                                    pair_a: first,
                                    pair_b: (x, y),
                                    count_a: expect,
                                    count_b: v,
                                });
                            }
                            _ => {}
                        }
                    }
                }
                for (k, slot) in per_class.iter().enumerate() {
                    if let Some((v, _)) = slot {
                        data[(i * c + j) * c + k] = *v;
                    }
                }
            }
        }
        Ok(IntersectionTensor { classes: c, data })
    }

    /// Merges classes along the given partition of `{0, ..., classes - 1}`
    /// and re-verifies the scheme axioms. Part order determines the new
    /// class indices; `{0}` must be its own part and come first.
    pub fn fuse(&self, partition: &[Vec<usize>]) -> Result<SchemeInstance, SchemeError> {
        if partition.is_empty() || partition[0] != vec![0] {
            return Err(SchemeError::Usage(SchemeUsage::MalformedPartition(
                "first part must be exactly {0}",
            )));
        }
        let mut assigned = vec![usize::MAX; self.classes];
        for (new, part) in partition.iter().enumerate() {
            if part.is_empty() {
                return Err(SchemeError::Usage(SchemeUsage::MalformedPartition(
                    "empty part",
                )));
            }
            for &old in part {
                if old >= self.classes {
                    return Err(SchemeError::Usage(SchemeUsage::MalformedPartition(
                        "class index out of range",
                    )));
                }
                if assigned[old] != usize::MAX {
                    return Err(SchemeError::Usage(SchemeUsage::MalformedPartition(
                        "class appears twice",
                    )));
                }
                assigned[old] = new;
            }
        }
        if assigned.contains(&usize::MAX) {
            return Err(SchemeError::Usage(SchemeUsage::MalformedPartition(
                "partition does not cover all classes",
            )));
        }
        let dcf: Vec<u8> = self.dcf.iter().map(|&c| assigned[c as usize] as u8).collect();
        let mut valencies = vec![0u64; partition.len()];
        for (new, part) in partition.iter().enumerate() {
            valencies[new] = part.iter().map(|&old| self.valencies[old]).sum();
        }
        let fused = SchemeInstance {
            ctx: self.ctx.clone(),
            phi: None,
            q: self.q,
            classes: partition.len(),
            dcf,
            valencies,
        };
        fused.intersection_numbers()?;
        Ok(fused)
    }

    /// Induced action of the vertex map `(x1, x2) -> (c * x1, x2)` on
    /// classes. Succeeds iff every difference in a class lands in a single
    /// class; the result maps old class index to new.
    pub fn scale_class_map(&self, c: FieldElement) -> Result<Vec<usize>, SchemeError> {
        let q = self.q as usize;
        let mut map = vec![usize::MAX; self.classes];
        let mut rep = vec![usize::MAX; self.classes];
        for d1 in 0..q {
            let s1 = self.ctx.mul(c, FieldElement(d1 as u32)).code() as usize;
            for d2 in 0..q {
                let from = self.dcf[d1 * q + d2] as usize;
                let to = self.dcf[s1 * q + d2] as usize;
                if map[from] == usize::MAX {
                    map[from] = to;
                    rep[from] = d1 * q + d2;
                } else if map[from] != to {
                    return Err(SchemeError::Usage(SchemeUsage::InconsistentClassMap {
                        class: from,
                        diff_a: rep[from],
                        diff_b: d1 * q + d2,
                    }));
                }
            }
        }
        Ok(map)
    }
}

/// Intersection tensor of the Hamming scheme `H(2, q)` computed directly
/// from the distance partition on pairs over an alphabet of size `q`.
pub fn hamming_reference(q: u32) -> IntersectionTensor {
    assert!(q >= 2, "alphabet must have at least two symbols");
    let qs = q as usize;
    // distance classes over Z_q differences: 0, one coordinate, two
    let dcf: Vec<u8> = (0..qs * qs)
        .map(|d| {
            let (d1, d2) = (d / qs, d % qs);
            ((d1 != 0) as u8) + ((d2 != 0) as u8)
        })
        .collect();
    let c = 3usize;
    let mut counts = vec![0u64; qs * qs * c * c];
    for w1 in 0..qs {
        for w2 in 0..qs {
            let base = (w1 * qs + w2) * c * c;
            for u1 in 0..qs {
                for u2 in 0..qs {
                    let i = dcf[u1 * qs + u2] as usize;
                    let e1 = (w1 + qs - u1) % qs;
                    let e2 = (w2 + qs - u2) % qs;
                    let j = dcf[e1 * qs + e2] as usize;
                    counts[base + i * c + j] += 1;
                }
            }
        }
    }
    let mut rep = [usize::MAX; 3];
    for (w, &cls) in dcf.iter().enumerate() {
        if rep[cls as usize] == usize::MAX {
            rep[cls as usize] = w;
        }
    }
    let mut data = vec![0u64; c * c * c];
    for i in 0..c {
        for j in 0..c {
            for k in 0..c {
                data[(i * c + j) * c + k] = counts[rep[k] * c * c + i * c + j];
            }
        }
    }
    IntersectionTensor { classes: c, data }
}

/// Checks the two closed-form structure constants that hold for every
/// scheme built here: for middle classes `1 <= i, j <= r`,
/// `p_{ij}^0 = delta_{ij} q(q-1)/r` and `p_{ij}^{r+1}` equals
/// `(q/r)(q/r - 1)` when `i = j` and `(q/r)^2` otherwise.
pub fn closed_form_check(t: &IntersectionTensor, q: u32, r: u32) -> Result<(), (usize, usize)> {
    let rr = r as usize;
    let (q, r) = (q as u64, r as u64);
    for i in 1..=rr {
        for j in 1..=rr {
            let diag = q * (q - 1) / r;
            let expect0 = if i == j { diag } else { 0 };
            let last = if i == j {
                (q / r) * (q / r - 1)
            } else {
                (q / r) * (q / r)
            };
            if t.get(i, j, 0) != expect0 || t.get(i, j, rr + 1) != last {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

/// Which form of the product-decomposition's final term matches the actual
/// tensor for middle-class products. The two candidate readings differ in
/// whether the complement term excludes the last class or the first middle
/// class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalTermReading {
    /// `J - A_0 - A_{r+1}`: complement of the diagonal and the last class.
    ExcludesLastClass,
    /// `J - A_0 - A_1`: complement of the diagonal and the first middle
    /// class.
    ExcludesFirstMiddle,
    /// The two readings coincide (the final-term coefficient is zero).
    Both,
    Neither,
}

/// Reconstructs `A_i A_j` for middle classes from the decomposition into a
/// diagonal/last-class part, a middle-class multiset part, and a scaled
/// complement term, and reports which complement reading reproduces the
/// brute tensor. Only meaningful for prime-target schemes.
pub fn final_term_reading(
    s: &SchemeInstance,
    t: &IntersectionTensor,
) -> Option<FinalTermReading> {
    let phi = s.phi()?;
    let p = s.ctx.p();
    if phi.target_order() != p {
        return None;
    }
    let q = s.q as u64;
    let pp = p as u64;
    let c = s.classes;
    let w = q * (q - pp) / (pp * pp);
    let mut ok_last = true;
    let mut ok_first = true;
    for i in 1..=p as usize {
        for j in 1..=p as usize {
            // middle-term multiset: z in F_p^* \ {1}, class of
            // beta_i / z + beta_j / (1 - z) over the prime field
            let mut middle = vec![0u64; c];
            let (bi, bj) = ((i - 1) as u32, (j - 1) as u32);
            for z in 2..p {
                let zinv = mod_pow(z, p - 2, p);
                let ominv = mod_pow((1 + p - z) % p, p - 2, p);
                let h = (bi * zinv + bj * ominv) % p;
                middle[1 + h as usize] += q / pp;
            }
            for (k, &mid) in middle.iter().enumerate() {
                let base = if k == 0 {
                    if i == j { q * (q - 1) / pp } else { 0 }
                } else if k == c - 1 {
                    if i == j {
                        (q / pp) * (q / pp - 1)
                    } else {
                        (q / pp) * (q / pp)
                    }
                } else {
                    0
                };
                let pred_last = base + mid + if k == 0 || k == c - 1 { 0 } else { w };
                let pred_first = base + mid + if k == 0 || k == 1 { 0 } else { w };
                let actual = t.get(i, j, k);
                ok_last &= pred_last == actual;
                ok_first &= pred_first == actual;
            }
        }
    }
    Some(match (ok_last, ok_first) {
        (true, true) => FinalTermReading::Both,
        (true, false) => FinalTermReading::ExcludesLastClass,
        (false, true) => FinalTermReading::ExcludesFirstMiddle,
        (false, false) => FinalTermReading::Neither,
    })
}

fn mod_pow(base: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = (base % p) as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    acc as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LinearMap;

    fn scheme(p: u32, m: u32, phi: &str) -> SchemeInstance {
        let ctx = FieldCtx::new(p, m).unwrap();
        let map = match phi {
            "id" => LinearMap::identity(&ctx),
            "trace" => LinearMap::trace(&ctx),
            other => panic!("unknown map {other}"),
        };
        SchemeInstance::build(&ctx, &map)
    }

    #[test]
    fn class_counts_and_valencies() {
        let s = scheme(3, 1, "id");
        assert_eq!(s.class_count(), 5);
        assert_eq!(s.valencies(), &[1, 2, 2, 2, 2]);

        let s = scheme(2, 2, "trace");
        assert_eq!(s.class_count(), 4);
        assert_eq!(s.valencies(), &[1, 6, 6, 3]);

        let s = scheme(3, 2, "trace");
        assert_eq!(s.class_count(), 5);
        assert_eq!(s.valencies(), &[1, 24, 24, 24, 8]);
    }

    #[test]
    fn adjacency_basics() {
        let s = scheme(3, 1, "id");
        let a0 = s.adjacency_matrix(0).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(a0.get(x, y), x == y);
            }
        }
        // last class is I_q tensor (J_q - I_q)
        let a4 = s.adjacency_matrix(4).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                let expect = (x / 3 == y / 3) && (x % 3 != y % 3);
                assert_eq!(a4.get(x, y), expect);
            }
        }
        // all classes partition X x X
        let mats: Vec<BitMatrix> = (0..5).map(|i| s.adjacency_matrix(i).unwrap()).collect();
        for x in 0..9 {
            for y in 0..9 {
                let hits = mats.iter().filter(|m| m.get(x, y)).count();
                assert_eq!(hits, 1);
            }
        }
        assert!(matches!(
            s.adjacency_matrix(9),
            Err(SchemeError::Usage(SchemeUsage::ClassOutOfRange { .. }))
        ));
    }

    #[test]
    fn q2_first_class_row_sums() {
        let s = scheme(2, 1, "trace");
        let a1 = s.adjacency_matrix(1).unwrap();
        for x in 0..4 {
            assert_eq!(a1.row_sum(x), 1);
        }
    }

    #[test]
    fn dcf_matches_direct_definition() {
        let ctx = FieldCtx::new(3, 2).unwrap();
        let phi = LinearMap::trace(&ctx);
        let s = SchemeInstance::build(&ctx, &phi);
        let q = 9usize;
        for x in 0..(q * q) {
            for y in 0..(q * q) {
                let xe = (
                    FieldElement((x / q) as u32),
                    FieldElement((x % q) as u32),
                );
                let ye = (
                    FieldElement((y / q) as u32),
                    FieldElement((y % q) as u32),
                );
                assert_eq!(
                    s.pair_class(x, y),
                    SchemeInstance::pair_class_direct(&ctx, &phi, xe, ye)
                );
            }
        }
    }

    #[test]
    fn intersection_tensor_q3_identity() {
        let s = scheme(3, 1, "id");
        let t = s.intersection_numbers().unwrap();
        // last class is a disjoint union of triangles:
        // (J_3 - I_3)^2 = 2I + (J_3 - I_3)
        assert_eq!(t.get(4, 4, 0), 2);
        assert_eq!(t.get(4, 4, 4), 1);
        // closed-form diagonal values for middle classes
        closed_form_check(&t, 3, 3).unwrap();
        assert!(t.is_commutative());
        assert!(t.satisfies_row_sum_law(s.valencies()));
    }

    #[test]
    fn fast_path_matches_dense_products() {
        for (p, m, phi) in [(2u32, 1u32, "trace"), (3, 1, "id"), (2, 2, "trace"), (3, 2, "trace"), (2, 2, "id")] {
            let s = scheme(p, m, phi);
            let fast = s.intersection_numbers().unwrap();
            let dense = s.intersection_numbers_dense().unwrap();
            assert_eq!(fast, dense, "mismatch for GF({p}^{m}) {phi}");
        }
    }

    #[test]
    fn final_term_reading_is_complement_of_last() {
        for (p, m) in [(2u32, 2u32), (3, 2), (2, 3)] {
            let s = scheme(p, m, "trace");
            let t = s.intersection_numbers().unwrap();
            assert_eq!(
                final_term_reading(&s, &t),
                Some(FinalTermReading::ExcludesLastClass)
            );
        }
        // at q = p the complement coefficient vanishes and both readings agree
        let s = scheme(3, 1, "id");
        let t = s.intersection_numbers().unwrap();
        assert_eq!(final_term_reading(&s, &t), Some(FinalTermReading::Both));
    }

    #[test]
    fn fusion_de_caen_van_dam() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let s = SchemeInstance::build(&ctx, &LinearMap::identity(&ctx));
        assert_eq!(s.class_count(), 6);
        // merging R_1 and R_{q+1} gives a valid class-4 scheme
        let fused = s
            .fuse(&[vec![0], vec![1, 5], vec![2], vec![3], vec![4]])
            .unwrap();
        assert_eq!(fused.class_count(), 5);
        // further fusion to two classes gives the Hamming scheme H(2, 4)
        let hamming = s
            .fuse(&[vec![0], vec![1, 5], vec![2, 3, 4]])
            .unwrap();
        assert_eq!(hamming.valencies(), &[1, 6, 9]);
        let t = hamming.intersection_numbers().unwrap();
        assert_eq!(t, hamming_reference(4));
    }

    #[test]
    fn hamming_reference_values() {
        // H(2,2) is the 4-cycle: p_{11}^0 = valency 2
        let t = hamming_reference(2);
        assert_eq!(t.get(1, 1, 0), 2);
        // H(2,3) valencies: 2(q-1) = 4 and (q-1)^2 = 4
        let t3 = hamming_reference(3);
        assert_eq!(t3.get(1, 1, 0), 4);
        assert_eq!(t3.get(2, 2, 0), 4);
    }

    #[test]
    fn malformed_partitions_rejected() {
        let s = scheme(3, 1, "id");
        for bad in [
            vec![vec![0usize, 1], vec![2, 3, 4]],
            vec![vec![0], vec![1, 1], vec![2, 3, 4]],
            vec![vec![0], vec![1]],
            vec![vec![0], vec![1, 2, 3, 4, 5]],
        ] {
            assert!(matches!(
                s.fuse(&bad),
                Err(SchemeError::Usage(SchemeUsage::MalformedPartition(_)))
            ));
        }
    }

    #[test]
    fn trace_scheme_is_fusion_of_identity_scheme() {
        // per-pair class comparison between the trace scheme and the
        // identity scheme fused along trace fibers
        let ctx = FieldCtx::new(2, 3).unwrap();
        let id = SchemeInstance::build(&ctx, &LinearMap::identity(&ctx));
        let tr = SchemeInstance::build(&ctx, &LinearMap::trace(&ctx));
        let phi = LinearMap::trace(&ctx);
        let mut parts: Vec<Vec<usize>> = vec![vec![0]];
        let mut by_value: Vec<Vec<usize>> = vec![Vec::new(); 2];
        for (idx, x) in ctx.enumerate().into_iter().enumerate() {
            by_value[phi.apply(x).code() as usize].push(1 + idx);
        }
        parts.extend(by_value);
        parts.push(vec![id.class_count() - 1]);
        let fused = id.fuse(&parts).unwrap();
        let q = ctx.q() as usize;
        for x in 0..q * q {
            for y in 0..q * q {
                assert_eq!(fused.pair_class(x, y), tr.pair_class(x, y));
            }
        }
    }

    #[test]
    fn scale_map_permutes_classes() {
        // identity scheme: every c in F_q^* induces a class permutation
        let ctx = FieldCtx::new(2, 2).unwrap();
        let s = SchemeInstance::build(&ctx, &LinearMap::identity(&ctx));
        for c in 1..4u32 {
            let map = s.scale_class_map(FieldElement(c)).unwrap();
            let mut seen = vec![false; s.class_count()];
            for &t in &map {
                assert!(!seen[t]);
                seen[t] = true;
            }
            assert_eq!(map[0], 0);
            assert_eq!(map[s.class_count() - 1], s.class_count() - 1);
        }
        // trace scheme: prime-subfield scalars act, others need not be
        // consistent
        let ctx9 = FieldCtx::new(3, 2).unwrap();
        let s9 = SchemeInstance::build(&ctx9, &LinearMap::trace(&ctx9));
        for c in 1..3u32 {
            s9.scale_class_map(FieldElement(c)).unwrap();
        }
        assert!(s9.scale_class_map(FieldElement(3)).is_err());
    }

    #[test]
    fn translation_invariance_exhaustive_small() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let phi = LinearMap::trace(&ctx);
        let s = SchemeInstance::build(&ctx, &phi);
        let q = 4usize;
        let n = q * q;
        let add = |x: usize, z: usize| -> usize {
            let a = ctx.add(FieldElement((x / q) as u32), FieldElement((z / q) as u32));
            let b = ctx.add(FieldElement((x % q) as u32), FieldElement((z % q) as u32));
            a.code() as usize * q + b.code() as usize
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    assert_eq!(s.pair_class(x, y), s.pair_class(add(x, z), add(y, z)));
                }
            }
        }
    }

    #[test]
    fn subfield_target_scheme_is_coherent() {
        // phi onto the order-4 subfield of GF(16): axioms verified
        // empirically
        let ctx = FieldCtx::new(2, 4).unwrap();
        let phi = LinearMap::subfield_trace(&ctx, 4).unwrap();
        let s = SchemeInstance::build(&ctx, &phi);
        assert_eq!(s.class_count(), 6);
        assert_eq!(s.valencies(), &[1, 60, 60, 60, 60, 15]);
        let t = s.intersection_numbers().unwrap();
        closed_form_check(&t, 16, 4).unwrap();
    }
}
