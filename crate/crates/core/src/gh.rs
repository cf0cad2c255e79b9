//! Generalized Hadamard matrices over the additive group of a finite field:
//! the multiplication/subtraction-table constructors, the block composition
//! `M(H, L)` from a normalized GH matrix and a diagonal-1 Latin square,
//! entrywise homomorphic images, and exact verifiers for the GH, Bush-type
//! and symmetry properties.
//!
//! Verifiers return structured witnesses (row pair, block, element, count)
//! so a failed check is diagnosable from CLI output; the witness is always
//! the lexicographically least failure.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldCtx, FieldElement, LinearMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GhError {
    /// Dimension or index precondition violated.
    Usage(UsageError),
    /// GH row-difference check failed: rows are 1-based, `count` is how many
    /// times `element` appeared instead of `expected`.
    NotGh {
        row_a: usize,
        row_b: usize,
        element: FieldElement,
        count: u64,
        expected: u64,
    },
    /// Bush-type check failed at the given 1-based block.
    NotBush {
        block: (usize, usize),
        line: BlockLine,
        element: FieldElement,
        count: u64,
        expected: u64,
    },
    /// +-1 relabeling product check failed at entry `(row, col)`.
    NotOrthogonal { row: usize, col: usize, value: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UsageError {
    NotSquare { rows: usize, cols: usize },
    OrderMismatch { order: usize, expected: usize },
    RowIndexOutOfRange { k: usize, n: usize },
    ClassIndexOutOfRange { i: usize, n: usize },
    LatinDiagonalNotOne { i: usize },
    NotLatin { line: BlockLine, value: u32 },
    GroupMismatch,
    EntryOutsideGroup { index: usize, code: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLine {
    Row(usize),
    Col(usize),
}

impl GhError {
    /// True for verdicts that mean "the mathematics failed" as opposed to a
    /// malformed call.
    pub fn is_verification_failure(&self) -> bool {
        !matches!(self, GhError::Usage(_))
    }
}

impl fmt::Display for GhError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GhError::Usage(u) => write!(f, "usage error: {u:?}"),
            GhError::NotGh { row_a, row_b, element, count, expected } => write!(
                f,
                "rows ({row_a},{row_b}): element {} appears {count} times in the difference multiset, expected {expected}",
                element.code()
            ),
            GhError::NotBush { block, line, element, count, expected } => write!(
                f,
                "block ({},{}) {line:?}: element {} appears {count} times, expected {expected}",
                block.0, block.1, element.code()
            ),
            GhError::NotOrthogonal { row, col, value } => write!(
                f,
                "sign-relabeled product has off-target value {value} at ({row},{col})"
            ),
        }
    }
}

/// A rectangular matrix with entries in the additive group of a field (or a
/// subfield of it, after a homomorphic image).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupMatrix {
    ctx: FieldCtx,
    group_order: u32,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl GroupMatrix {
    pub fn new(
        ctx: &FieldCtx,
        group_order: u32,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<Self, GhError> {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let member = group_membership(ctx, group_order);
        for (i, e) in entries.iter().enumerate() {
            if (e.code() as usize) >= member.len() || !member[e.code() as usize] {
                return Err(GhError::Usage(UsageError::EntryOutsideGroup {
                    index: i,
                    code: e.code(),
                }));
            }
        }
        Ok(GroupMatrix {
            ctx: ctx.clone(),
            group_order,
            rows,
            cols,
            entries,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn group_order(&self) -> u32 {
        self.group_order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Entry at 0-based `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    pub fn is_symmetric(&self) -> bool {
        self.nonsymmetric_witness().is_none()
    }

    /// Least `(r, c)` with `M[r][c] != M[c][r]`, 0-based.
    pub fn nonsymmetric_witness(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if self.get(r, c) != self.get(c, r) {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// First row all zero.
    pub fn is_normalized(&self) -> bool {
        (0..self.cols).all(|c| self.get(0, c).code() == 0)
    }

    /// Normalization by columns: subtracts the first row from every column,
    /// making the first row zero without touching the GH property.
    pub fn normalized(&self) -> GroupMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                entries.push(self.ctx.sub(self.get(r, c), self.get(0, c)));
            }
        }
        GroupMatrix {
            ctx: self.ctx.clone(),
            group_order: self.group_order,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

fn group_membership(ctx: &FieldCtx, group_order: u32) -> Vec<bool> {
    let q = ctx.q() as usize;
    let mut member = vec![false; q];
    if group_order == ctx.q() {
        member.fill(true);
    } else {
        for e in ctx
            .subfield_elements(group_order)
            .expect("group order is a subfield order")
        {
            member[e.code() as usize] = true;
        }
    }
    member
}

/// A Latin square of order `n` over the index alphabet `{1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u32>,
}

impl LatinSquare {
    /// Validates the Latin property; cells are 1-based, row-major.
    pub fn new(n: usize, cells: Vec<u32>) -> Result<Self, GhError> {
        assert_eq!(cells.len(), n * n, "cell count mismatch");
        let mut seen = vec![false; n];
        for r in 0..n {
            seen.fill(false);
            for c in 0..n {
                let v = cells[r * n + c];
                if v < 1 || v > n as u32 || seen[(v - 1) as usize] {
                    return Err(GhError::Usage(UsageError::NotLatin {
                        line: BlockLine::Row(r + 1),
                        value: v,
                    }));
                }
                seen[(v - 1) as usize] = true;
            }
        }
        for c in 0..n {
            seen.fill(false);
            for r in 0..n {
                let v = cells[r * n + c];
                if seen[(v - 1) as usize] {
                    return Err(GhError::Usage(UsageError::NotLatin {
                        line: BlockLine::Col(c + 1),
                        value: v,
                    }));
                }
                seen[(v - 1) as usize] = true;
            }
        }
        Ok(LatinSquare { n, cells })
    }

    /// The cyclic difference square `l(i, j) = ((j - i) mod n) + 1`; its
    /// diagonal is all 1.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n)
            .flat_map(|i| (0..n).map(move |j| ((n + j - i) % n) as u32 + 1))
            .collect();
        LatinSquare { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// 1-based cell value at 0-based `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.cells[r * self.n + c]
    }

    pub fn diagonal_is_one(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 1)
    }
}

/// The `q x q` multiplication table of the field: entry `(i, j)` is
/// `alpha_i * alpha_j` in canonical enumeration order. Its first row and
/// column are zero, so it is a normalized GH(q, 1).
pub fn multiplication_table(ctx: &FieldCtx) -> GroupMatrix {
    let elems = ctx.enumerate();
    let entries = elems
        .iter()
        .flat_map(|&a| elems.iter().map(move |&b| (a, b)))
        .map(|(a, b)| ctx.mul(a, b))
        .collect();
    GroupMatrix {
        ctx: ctx.clone(),
        group_order: ctx.q(),
        rows: ctx.q() as usize,
        cols: ctx.q() as usize,
        entries,
    }
}

/// The subtraction table as a Latin square: cell `(i, j)` is the enumeration
/// index (1-based) of `-alpha_i + alpha_j`. The diagonal is all 1.
pub fn subtraction_table(ctx: &FieldCtx) -> LatinSquare {
    let elems = ctx.enumerate();
    let n = elems.len();
    let mut cells = Vec::with_capacity(n * n);
    for &a in &elems {
        for &b in &elems {
            cells.push(ctx.sub(b, a).code() + 1);
        }
    }
    LatinSquare { n, cells }
}

/// The row-difference block `C_k = (-h_{ki} + h_{kj})_{i,j}`; `k` is 1-based.
pub fn row_difference_block(h: &GroupMatrix, k: usize) -> Result<GroupMatrix, GhError> {
    if h.rows != h.cols {
        return Err(GhError::Usage(UsageError::NotSquare {
            rows: h.rows,
            cols: h.cols,
        }));
    }
    if k < 1 || k > h.rows {
        return Err(GhError::Usage(UsageError::RowIndexOutOfRange { k, n: h.rows }));
    }
    let n = h.rows;
    let row: Vec<FieldElement> = (0..n).map(|j| h.get(k - 1, j)).collect();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(h.ctx.sub(row[j], row[i]));
        }
    }
    Ok(GroupMatrix {
        ctx: h.ctx.clone(),
        group_order: h.group_order,
        rows: n,
        cols: n,
        entries,
    })
}

/// The block composition `M(H, L)`: a square matrix of order `n^2` whose
/// `(i, j)` block is `C_{l(i,j)}`. Requires `L` of the same order as `H`
/// with diagonal cells 1.
pub fn compose(h: &GroupMatrix, l: &LatinSquare) -> Result<GroupMatrix, GhError> {
    if h.rows != h.cols {
        return Err(GhError::Usage(UsageError::NotSquare {
            rows: h.rows,
            cols: h.cols,
        }));
    }
    if l.n != h.rows {
        return Err(GhError::Usage(UsageError::OrderMismatch {
            order: l.n,
            expected: h.rows,
        }));
    }
    if let Some(i) = (0..l.n).find(|&i| l.get(i, i) != 1) {
        return Err(GhError::Usage(UsageError::LatinDiagonalNotOne { i: i + 1 }));
    }
    let n = h.rows;
    let blocks: Vec<GroupMatrix> = (1..=n)
        .map(|k| row_difference_block(h, k).expect("validated above"))
        .collect();
    let mut entries = vec![FieldElement(0); n * n * n * n];
    let order = n * n;
    for bi in 0..n {
        for bj in 0..n {
            let block = &blocks[(l.get(bi, bj) - 1) as usize];
            for i in 0..n {
                let dst = (bi * n + i) * order + bj * n;
                for j in 0..n {
                    entries[dst + j] = block.get(i, j);
                }
            }
        }
    }
    Ok(GroupMatrix {
        ctx: h.ctx.clone(),
        group_order: h.group_order,
        rows: order,
        cols: order,
        entries,
    })
}

/// Entrywise image of `M` under a surjective additive map; the result lives
/// over the target subfield.
pub fn apply_hom(m: &GroupMatrix, phi: &LinearMap) -> Result<GroupMatrix, GhError> {
    if phi.ctx() != &m.ctx || m.group_order != m.ctx.q() {
        return Err(GhError::Usage(UsageError::GroupMismatch));
    }
    let entries = m.entries.iter().map(|&e| phi.apply(e)).collect();
    Ok(GroupMatrix {
        ctx: m.ctx.clone(),
        group_order: phi.target_order(),
        rows: m.rows,
        cols: m.cols,
        entries,
    })
}

/// Verifies the generalized Hadamard property: for every pair of distinct
/// rows, the difference multiset contains each of the `g` group elements
/// exactly `lambda` times.
pub fn verify_gh(m: &GroupMatrix, g: u32, lambda: u32) -> Result<(), GhError> {
    if m.rows != m.cols {
        return Err(GhError::Usage(UsageError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        }));
    }
    if g != m.group_order || m.rows != (g as u64 * lambda as u64) as usize {
        return Err(GhError::Usage(UsageError::OrderMismatch {
            order: m.rows,
            expected: (g as u64 * lambda as u64) as usize,
        }));
    }
    let q = m.ctx.q() as usize;
    let group: Vec<FieldElement> = if g == m.ctx.q() {
        m.ctx.enumerate()
    } else {
        m.ctx.subfield_elements(g).expect("validated group order")
    };
    let mut index_of = vec![usize::MAX; q];
    for (i, e) in group.iter().enumerate() {
        index_of[e.code() as usize] = i;
    }
    // difference table over codes; entries lie in the group, which is
    // closed under subtraction
    let mut sub = vec![0u32; q * q];
    for a in 0..q {
        for b in 0..q {
            sub[a * q + b] = m.ctx.sub(FieldElement(a as u32), FieldElement(b as u32)).code();
        }
    }
    let n = m.rows;
    let mut counts = vec![0u64; g as usize];
    for ra in 0..n {
        let row_a = &m.entries[ra * n..(ra + 1) * n];
        for rb in ra + 1..n {
            let row_b = &m.entries[rb * n..(rb + 1) * n];
            counts.fill(0);
            for j in 0..n {
                let d = sub[row_a[j].code() as usize * q + row_b[j].code() as usize];
                counts[index_of[d as usize]] += 1;
            }
            for (gi, &c) in counts.iter().enumerate() {
                if c != lambda as u64 {
                    return Err(GhError::NotGh {
                        row_a: ra + 1,
                        row_b: rb + 1,
                        element: group[gi],
                        count: c,
                        expected: lambda as u64,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Verifies the Bush-type property for block order `k`: the matrix order is
/// `k^2`, diagonal blocks are zero, and every row and column of every
/// off-diagonal block is equidistributed over the group.
pub fn verify_bush(m: &GroupMatrix, k: u32) -> Result<(), GhError> {
    let k = k as usize;
    if m.rows != m.cols || m.rows != k * k {
        return Err(GhError::Usage(UsageError::OrderMismatch {
            order: m.rows,
            expected: k * k,
        }));
    }
    let g = m.group_order as usize;
    // when g does not divide k no line can be equidistributed; the scan
    // below then fails on the first off-diagonal line with a count witness
    let per = (k / g) as u64;
    let divisible = k.is_multiple_of(g);
    let q = m.ctx.q() as usize;
    let group: Vec<FieldElement> = if m.group_order == m.ctx.q() {
        m.ctx.enumerate()
    } else {
        m.ctx.subfield_elements(m.group_order).expect("valid group")
    };
    let mut index_of = vec![usize::MAX; q];
    for (i, e) in group.iter().enumerate() {
        index_of[e.code() as usize] = i;
    }
    let mut counts = vec![0u64; g];
    for bi in 0..k {
        for bj in 0..k {
            if bi == bj {
                for i in 0..k {
                    for j in 0..k {
                        let e = m.get(bi * k + i, bj * k + j);
                        if e.code() != 0 {
                            return Err(GhError::NotBush {
                                block: (bi + 1, bj + 1),
                                line: BlockLine::Row(i + 1),
                                element: e,
                                count: 1,
                                expected: 0,
                            });
                        }
                    }
                }
                continue;
            }
            for i in 0..k {
                counts.fill(0);
                for j in 0..k {
                    counts[index_of[m.get(bi * k + i, bj * k + j).code() as usize]] += 1;
                }
                if let Some((gi, &c)) = counts
                    .iter()
                    .enumerate()
                    .find(|(_, &c)| !divisible || c != per)
                {
                    return Err(GhError::NotBush {
                        block: (bi + 1, bj + 1),
                        line: BlockLine::Row(i + 1),
                        element: group[gi],
                        count: c,
                        expected: per,
                    });
                }
            }
            for j in 0..k {
                counts.fill(0);
                for i in 0..k {
                    counts[index_of[m.get(bi * k + i, bj * k + j).code() as usize]] += 1;
                }
                if let Some((gi, &c)) = counts
                    .iter()
                    .enumerate()
                    .find(|(_, &c)| !divisible || c != per)
                {
                    return Err(GhError::NotBush {
                        block: (bi + 1, bj + 1),
                        line: BlockLine::Col(j + 1),
                        element: group[gi],
                        count: c,
                        expected: per,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the symmetry-condition check for `M(H, L)`: the entrywise
/// identity `-h_{l(i,j),k} + h_{l(i,j),l} = -h_{l(j,i),l} + h_{l(j,i),k}`
/// and the transpose comparison of the composed matrix are both evaluated
/// and must agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryReport {
    /// Least 1-based `(i, j, k, l)` violating the identity, if any.
    pub identity_witness: Option<[usize; 4]>,
    /// Least 0-based `(r, c)` with `M[r][c] != M[c][r]`, if any.
    pub matrix_witness: Option<(usize, usize)>,
}

impl SymmetryReport {
    pub fn identity_holds(&self) -> bool {
        self.identity_witness.is_none()
    }

    pub fn matrix_symmetric(&self) -> bool {
        self.matrix_witness.is_none()
    }

    pub fn verdicts_agree(&self) -> bool {
        self.identity_holds() == self.matrix_symmetric()
    }

    pub fn passed(&self) -> bool {
        self.identity_holds() && self.matrix_symmetric() && self.verdicts_agree()
    }
}

/// Evaluates both forms of the symmetry condition for the composition
/// `M(H, L)`.
pub fn symmetry_condition(h: &GroupMatrix, l: &LatinSquare) -> Result<SymmetryReport, GhError> {
    let m = compose(h, l)?;
    let n = h.rows;
    let blocks: Vec<GroupMatrix> = (1..=n)
        .map(|k| row_difference_block(h, k).expect("dims validated by compose"))
        .collect();
    let mut identity_witness = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let bij = &blocks[(l.get(i, j) - 1) as usize];
            let bji = &blocks[(l.get(j, i) - 1) as usize];
            for k in 0..n {
                for t in 0..n {
                    if bij.get(k, t) != bji.get(t, k) {
                        identity_witness = Some([i + 1, j + 1, k + 1, t + 1]);
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(SymmetryReport {
        identity_witness,
        matrix_witness: m.nonsymmetric_witness(),
    })
}

/// For a matrix over the order-2 group: relabel entries `0, 1` as `+1, -1`
/// and check `A * A^T = n * I` exactly over the integers.
pub fn sign_relabel_orthogonality(m: &GroupMatrix) -> Result<(), GhError> {
    if m.group_order != 2 || m.rows != m.cols {
        return Err(GhError::Usage(UsageError::GroupMismatch));
    }
    let n = m.rows;
    let signed: Vec<i64> = m
        .entries
        .iter()
        .map(|e| if e.code() == 0 { 1 } else { -1 })
        .collect();
    for r in 0..n {
        for c in r..n {
            let dot: i64 = (0..n).map(|j| signed[r * n + j] * signed[c * n + j]).sum();
            let expected = if r == c { n as i64 } else { 0 };
            if dot != expected {
                return Err(GhError::NotOrthogonal { row: r + 1, col: c + 1, value: dot });
            }
        }
    }
    Ok(())
}
