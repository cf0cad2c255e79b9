//! Strongly-regular-graph analysis of the characteristic-3 trace schemes:
//! parameter extraction by exact common-neighbor counting, the
//! spread structure of `A_i + A_4`, and the swap-automorphism certificate
//! for the valency-`2k` graph `A_2 + A_3`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitmat::BitMatrix;
use crate::field::FieldElement;
use crate::scheme::SchemeInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SrgError {
    /// Input matrix is not symmetric with zero diagonal.
    Usage(&'static str),
    NotRegular { row_a: usize, row_b: usize },
    /// Common-neighbor count over an edge differs from the first edge's.
    LambdaVaries { pair: (usize, usize), expected: u64, found: u64 },
    /// Common-neighbor count over a non-edge differs from the first one's.
    MuVaries { pair: (usize, usize), expected: u64, found: u64 },
    /// Graph is not a disjoint union of equal cliques.
    NotCliqueUnion { vertex: usize },
    /// The scheme is not a characteristic-3 trace scheme.
    WrongScheme,
}

impl SrgError {
    pub fn is_verification_failure(&self) -> bool {
        !matches!(self, SrgError::Usage(_) | SrgError::WrongScheme)
    }
}

impl fmt::Display for SrgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SrgError::Usage(s) => write!(f, "usage error: {s}"),
            SrgError::NotRegular { row_a, row_b } => {
                write!(f, "not regular: rows {row_a} and {row_b} have different degrees")
            }
            SrgError::LambdaVaries { pair, expected, found } => write!(
                f,
                "edge {pair:?} has {found} common neighbors, expected {expected}"
            ),
            SrgError::MuVaries { pair, expected, found } => write!(
                f,
                "non-edge {pair:?} has {found} common neighbors, expected {expected}"
            ),
            SrgError::NotCliqueUnion { vertex } => {
                write!(f, "component of vertex {vertex} is not a clique")
            }
            SrgError::WrongScheme => write!(f, "requires a characteristic-3 trace scheme"),
        }
    }
}

/// Parameters `(v, k, lambda, mu)` of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    /// The standard feasibility identity `k(k - lambda - 1) = (v - k - 1)mu`.
    pub fn feasible(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == (self.v - self.k - 1) * self.mu
    }

    /// `mu = 0` means a disconnected (clique-union) graph.
    pub fn is_degenerate(&self) -> bool {
        self.mu == 0
    }

    /// Integer restricted eigenvalues, the roots of
    /// `x^2 - (lambda - mu) x - (k - mu)`, when they are integers.
    pub fn restricted_eigenvalues(&self) -> Option<(i64, i64)> {
        let b = self.lambda as i64 - self.mu as i64;
        let c = self.k as i64 - self.mu as i64;
        let disc = b * b + 4 * c;
        if disc < 0 {
            return None;
        }
        let root = (disc as u64).isqrt() as i64;
        if root * root != disc || (b + root) % 2 != 0 {
            return None;
        }
        Some(((b + root) / 2, (b - root) / 2))
    }
}

/// Checks strong regularity by exact inspection: constant degree, constant
/// common-neighbor count over edges (`lambda`) and over non-edges (`mu`).
/// The failure witness is the lexicographically least offending pair.
pub fn srg_params(a: &BitMatrix) -> Result<SrgParams, SrgError> {
    if !a.is_symmetric() {
        return Err(SrgError::Usage("matrix is not symmetric"));
    }
    if !a.diagonal_is_zero() {
        return Err(SrgError::Usage("diagonal is not zero"));
    }
    let n = a.n();
    let k = a.row_sum(0);
    for r in 1..n {
        if a.row_sum(r) != k {
            return Err(SrgError::NotRegular { row_a: 0, row_b: r });
        }
    }
    let mut lambda: Option<u64> = None;
    let mut mu: Option<u64> = None;
    for x in 0..n {
        for y in x + 1..n {
            let c = a.common_neighbors(x, y);
            if a.get(x, y) {
                match lambda {
                    None => lambda = Some(c),
                    Some(expected) if expected != c => {
                        return Err(SrgError::LambdaVaries {
                            pair: (x, y),
                            expected,
                            found: c,
                        })
                    }
                    _ => {}
                }
            } else {
                match mu {
                    None => mu = Some(c),
                    Some(expected) if expected != c => {
                        return Err(SrgError::MuVaries {
                            pair: (x, y),
                            expected,
                            found: c,
                        })
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(SrgParams {
        v: n as u64,
        k,
        lambda: lambda.unwrap_or(0),
        mu: mu.unwrap_or(0),
    })
}

/// Verifies the graph is a disjoint union of cliques of one size and
/// returns `(count, size)`.
pub fn disjoint_cliques(a: &BitMatrix) -> Result<(usize, usize), SrgError> {
    if !a.is_symmetric() || !a.diagonal_is_zero() {
        return Err(SrgError::Usage("matrix is not symmetric with zero diagonal"));
    }
    let n = a.n();
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        // members = closed neighborhood of start; must be mutually adjacent
        let mut members = vec![start];
        for y in 0..n {
            if a.get(start, y) {
                members.push(y);
            }
        }
        for &x in &members {
            for &y in &members {
                if x != y && !a.get(x, y) {
                    return Err(SrgError::NotCliqueUnion { vertex: start });
                }
            }
            // no edges may leave the component
            if a.row_sum(x) as usize != members.len() - 1 {
                return Err(SrgError::NotCliqueUnion { vertex: x });
            }
            component[x] = id;
        }
        sizes.push(members.len());
    }
    let size = sizes[0];
    if sizes.iter().any(|&s| s != size) {
        return Err(SrgError::NotCliqueUnion { vertex: 0 });
    }
    Ok((sizes.len(), size))
}

fn require_ternary_trace(s: &SchemeInstance) -> Result<(), SrgError> {
    let ok = s.ctx().p() == 3
        && s.phi()
            .map(|phi| phi.target_order() == 3)
            .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(SrgError::WrongScheme)
    }
}

/// Report for the spread structure of `A_i + A_4` in a characteristic-3
/// trace scheme: the union is strongly regular and the `A_4` cliques are
/// cliques of the union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadReport {
    pub class: usize,
    pub union_params: SrgParams,
    pub clique_count: usize,
    pub clique_size: usize,
    pub cliques_in_union: bool,
}

pub fn spread_check(s: &SchemeInstance, i: usize) -> Result<SpreadReport, SrgError> {
    require_ternary_trace(s)?;
    if !(1..=3).contains(&i) {
        return Err(SrgError::Usage("class index must be 1, 2 or 3"));
    }
    let a_i = s.adjacency_matrix(i).expect("class in range");
    let spread = s.adjacency_matrix(4).expect("class in range");
    let (clique_count, clique_size) = disjoint_cliques(&spread)?;
    let union = a_i.union(&spread);
    let union_params = srg_params(&union)?;
    // every spread clique is a clique of the union: the spread's edges are
    // a subset of the union's by construction, so check containment
    let cliques_in_union = (0..spread.n())
        .all(|x| (0..spread.n()).all(|y| !spread.get(x, y) || union.get(x, y)));
    Ok(SpreadReport {
        class: i,
        union_params,
        clique_count,
        clique_size,
        cliques_in_union,
    })
}

/// Verdicts backing a [`SwapCertificate`]; the certificate is valid only if
/// every field is true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapVerdicts {
    pub union_regular: bool,
    pub half_a_srg: bool,
    pub half_b_srg: bool,
    pub automorphism_of_union: bool,
    pub swaps_halves: bool,
    pub fixes_other_classes: bool,
}

/// Certificate that the graph `A_i + A_j` (the two swapped middle classes)
/// decomposes into two strongly regular halves exchanged by the vertex
/// involution `(x1, x2) -> (2 x1, x2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapCertificate {
    /// The two class indices actually exchanged by the involution.
    pub swapped_classes: (usize, usize),
    /// Shared parameters of the two halves.
    pub half_params: Option<SrgParams>,
    /// The involution as a vertex permutation.
    pub sigma: Vec<u32>,
    pub half_edges: (u64, u64),
    pub union_valency: u64,
    pub verdicts: SwapVerdicts,
}

impl SwapCertificate {
    pub fn is_valid(&self) -> bool {
        let v = &self.verdicts;
        v.union_regular
            && v.half_a_srg
            && v.half_b_srg
            && v.automorphism_of_union
            && v.swaps_halves
            && v.fixes_other_classes
    }
}

/// Builds and verifies the swap certificate for a characteristic-3 trace
/// scheme. The involution doubles the first coordinate; which two middle
/// classes it exchanges depends on the target enumeration, so the
/// certificate records the pair it actually swapped.
pub fn swap_automorphism(s: &SchemeInstance) -> Result<SwapCertificate, SrgError> {
    require_ternary_trace(s)?;
    let ctx = s.ctx();
    let q = ctx.q();
    let two = FieldElement(2);
    // induced action on classes; consistency is part of the verification
    let class_map = s
        .scale_class_map(two)
        .map_err(|_| SrgError::WrongScheme)?;
    let swapped: Vec<usize> = (1..=3).filter(|&i| class_map[i] != i).collect();
    let (ca, cb) = match swapped.as_slice() {
        [a, b] if class_map[*a] == *b && class_map[*b] == *a => (*a, *b),
        _ => {
            return Ok(SwapCertificate {
                swapped_classes: (0, 0),
                half_params: None,
                sigma: Vec::new(),
                half_edges: (0, 0),
                union_valency: 0,
                verdicts: SwapVerdicts {
                    union_regular: false,
                    half_a_srg: false,
                    half_b_srg: false,
                    automorphism_of_union: false,
                    swaps_halves: false,
                    fixes_other_classes: false,
                },
            })
        }
    };
    let fixes_other_classes = class_map[0] == 0
        && class_map[4] == 4
        && (1..=3).all(|i| i == ca || i == cb || class_map[i] == i);

    // the vertex permutation sigma(x1, x2) = (2 x1, x2)
    let sigma: Vec<u32> = (0..q * q)
        .map(|v| {
            let (x1, x2) = (v / q, v % q);
            ctx.mul(two, FieldElement(x1)).code() * q + x2
        })
        .collect();
    debug_assert!((0..q * q).all(|v| sigma[sigma[v as usize] as usize] == v));

    // edge-level verification through the difference classes: sigma is
    // additive, so the class of a mapped edge is the class of the mapped
    // difference
    let mut automorphism_of_union = true;
    let mut swaps_halves = true;
    for d1 in 0..q {
        let s1 = ctx.mul(two, FieldElement(d1)).code();
        for d2 in 0..q {
            let from = s.difference_class(d1, d2);
            let to = s.difference_class(s1, d2);
            let in_union = from == ca || from == cb;
            let to_union = to == ca || to == cb;
            automorphism_of_union &= in_union == to_union;
            if from == ca {
                swaps_halves &= to == cb;
            }
            if from == cb {
                swaps_halves &= to == ca;
            }
        }
    }

    let half_a = s.adjacency_matrix(ca).expect("class in range");
    let half_b = s.adjacency_matrix(cb).expect("class in range");
    let params_a = srg_params(&half_a);
    let params_b = srg_params(&half_b);
    let union = half_a.union(&half_b);
    let n = union.n();
    let union_deg = union.row_sum(0);
    let union_regular = (1..n).all(|r| union.row_sum(r) == union_deg);
    let half_params = match (&params_a, &params_b) {
        (Ok(a), Ok(b)) if a == b => Some(*a),
        _ => None,
    };
    Ok(SwapCertificate {
        swapped_classes: (ca, cb),
        half_params,
        sigma,
        half_edges: (half_a.edge_count(), half_b.edge_count()),
        union_valency: union_deg,
        verdicts: SwapVerdicts {
            union_regular,
            half_a_srg: params_a.is_ok(),
            half_b_srg: params_b.is_ok(),
            automorphism_of_union,
            swaps_halves,
            fixes_other_classes,
        },
    })
}

/// The published parameter family `(9^m, 3^{m-1}(3^m - 1), 9^{m-1},
/// 3^{m-1}(3^{m-1} - 1))`.
pub fn ternary_srg_params(m: u32) -> SrgParams {
    let three = 3u64.pow(m - 1);
    let q = 3u64.pow(m);
    SrgParams {
        v: q * q,
        k: three * (q - 1),
        lambda: three * three,
        mu: three * (three - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldCtx, LinearMap};

    fn ternary_scheme(m: u32) -> SchemeInstance {
        let ctx = FieldCtx::new(3, m).unwrap();
        let phi = LinearMap::trace(&ctx);
        SchemeInstance::build(&ctx, &phi)
    }

    #[test]
    fn params_q9_class1() {
        let s = ternary_scheme(2);
        let a1 = s.adjacency_matrix(1).unwrap();
        let params = srg_params(&a1).unwrap();
        assert_eq!(
            params,
            SrgParams { v: 81, k: 24, lambda: 9, mu: 6 }
        );
        assert!(params.feasible());
        assert!(!params.is_degenerate());
    }

    #[test]
    fn params_q3_are_degenerate() {
        // disjoint triangles: (9, 2, 1, 0)
        let s = ternary_scheme(1);
        for i in 1..=3 {
            let params = srg_params(&s.adjacency_matrix(i).unwrap()).unwrap();
            assert_eq!(params, SrgParams { v: 9, k: 2, lambda: 1, mu: 0 });
            assert!(params.is_degenerate());
            assert!(params.feasible());
        }
    }

    #[test]
    fn parameter_family_matches() {
        for m in [1u32, 2] {
            let s = ternary_scheme(m);
            let expect = ternary_srg_params(m);
            for i in 1..=3 {
                let params = srg_params(&s.adjacency_matrix(i).unwrap()).unwrap();
                assert_eq!(params, expect, "class {i}, m = {m}");
            }
        }
    }

    #[test]
    fn restricted_eigenvalues_match_spectrum() {
        // eigenvalues from the quadratic agree with the closed-form
        // spectrum entries 2*3^{m-1} and -3^{m-1}
        for m in [1u32, 2, 3] {
            let params = ternary_srg_params(m);
            if params.is_degenerate() {
                // disconnected case: k = lambda + 1, both roots still integral
                continue;
            }
            let (theta, tau) = params.restricted_eigenvalues().unwrap();
            assert_eq!(theta, 2 * 3i64.pow(m - 1));
            assert_eq!(tau, -(3i64.pow(m - 1)));
        }
    }

    #[test]
    fn spread_is_disjoint_cliques() {
        let s = ternary_scheme(2);
        let a4 = s.adjacency_matrix(4).unwrap();
        assert_eq!(disjoint_cliques(&a4).unwrap(), (9, 9));
        // a clique-union check on a non-clique graph fails
        let a1 = s.adjacency_matrix(1).unwrap();
        assert!(matches!(
            disjoint_cliques(&a1),
            Err(SrgError::NotCliqueUnion { .. })
        ));
    }

    #[test]
    fn spread_checks_pass() {
        let s9 = ternary_scheme(2);
        let report = spread_check(&s9, 1).unwrap();
        assert_eq!(report.union_params.v, 81);
        assert_eq!(report.union_params.k, 32);
        assert!(report.union_params.feasible());
        assert!(report.cliques_in_union);
        assert_eq!((report.clique_count, report.clique_size), (9, 9));

        let s3 = ternary_scheme(1);
        let report = spread_check(&s3, 2).unwrap();
        assert!(report.cliques_in_union);
        assert_eq!(report.union_params, SrgParams { v: 9, k: 4, lambda: 1, mu: 2 });
    }

    #[test]
    fn swap_certificates() {
        for m in [1u32, 2] {
            let s = ternary_scheme(m);
            let cert = swap_automorphism(&s).unwrap();
            assert!(cert.is_valid(), "m = {m}: {:?}", cert.verdicts);
            assert_eq!(cert.half_params.unwrap(), ternary_srg_params(m));
            assert_eq!(cert.swapped_classes, (2, 3));
            // involution
            let n = cert.sigma.len();
            for v in 0..n {
                assert_eq!(cert.sigma[cert.sigma[v] as usize] as usize, v);
            }
            assert_eq!(cert.union_valency, 2 * ternary_srg_params(m).k);
            assert_eq!(cert.half_edges.0, cert.half_edges.1);
        }
    }

    #[test]
    fn wrong_scheme_rejected() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let s = SchemeInstance::build(&ctx, &LinearMap::trace(&ctx));
        assert_eq!(swap_automorphism(&s).unwrap_err(), SrgError::WrongScheme);
        assert_eq!(spread_check(&s, 1).unwrap_err(), SrgError::WrongScheme);
    }

    #[test]
    fn srg_usage_errors() {
        let mut m = BitMatrix::zero(3);
        m.set(0, 1, true);
        assert!(matches!(srg_params(&m), Err(SrgError::Usage(_))));
        let mut d = BitMatrix::zero(3);
        d.set(1, 1, true);
        assert!(matches!(srg_params(&d), Err(SrgError::Usage(_))));
    }

    #[test]
    fn non_regular_witness() {
        // path on 3 vertices
        let mut m = BitMatrix::zero(3);
        for (a, b) in [(0, 1), (1, 2)] {
            m.set(a, b, true);
            m.set(b, a, true);
        }
        assert!(matches!(srg_params(&m), Err(SrgError::NotRegular { .. })));
    }
}
