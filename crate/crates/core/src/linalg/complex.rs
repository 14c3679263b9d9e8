//! Finite-type graded modules, degreewise maps and truncated complexes.

use thiserror::Error;

use crate::linalg::matrix::Matrix;
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("degree {degree} outside the trusted range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: i64 },
    #[error("block in degree {degree} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        degree: usize,
        found: (usize, usize),
        expected: (usize, usize),
    },
    #[error("d∘d is nonzero out of degree {degree}")]
    NotAComplex { degree: usize },
    #[error("map does not commute with the differentials in degree {degree}")]
    NotAChainMap { degree: usize },
    #[error("free Künneth map is not invertible in degree {degree}")]
    KunnethNotInvertible { degree: usize },
    #[error("entry {value} in degree {degree} is not p-local")]
    NotPLocal { degree: usize, value: String },
}

/// Free module with an ordered labeled basis in each degree `0..=cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    basis: Vec<Vec<String>>,
}

impl GradedBasis {
    pub fn new(basis: Vec<Vec<String>>) -> Self {
        assert!(!basis.is_empty(), "a graded module needs degree 0");
        GradedBasis { basis }
    }

    pub fn cutoff(&self) -> usize {
        self.basis.len() - 1
    }

    /// Rank in degree `n`; zero outside `0..=cutoff`.
    pub fn rank(&self, n: i64) -> usize {
        if n < 0 || n as usize > self.cutoff() {
            0
        } else {
            self.basis[n as usize].len()
        }
    }

    pub fn labels(&self, n: usize) -> &[String] {
        &self.basis[n]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }
}

/// Degreewise matrices from degree `n` to degree `n + shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    pub shift: i32,
    pub blocks: Vec<Matrix>,
}

impl GradedMap {
    pub fn block(&self, n: usize) -> &Matrix {
        &self.blocks[n]
    }
}

/// A differential graded module truncated at `cutoff`.
///
/// `shift` is −1 for chain complexes and +1 for cochain complexes; block `n` is
/// the differential out of degree `n`. A block whose target lies above the
/// cutoff is unknown and stored with zero rows.
#[derive(Debug, Clone)]
pub struct ChainComplexFT {
    module: GradedBasis,
    differential: GradedMap,
}

impl ChainComplexFT {
    pub fn new(
        ctx: &PrimeContext,
        module: GradedBasis,
        differential: GradedMap,
    ) -> Result<Self, LinalgError> {
        assert!(differential.shift == 1 || differential.shift == -1);
        let c = ChainComplexFT {
            module,
            differential,
        };
        c.validate(ctx)?;
        Ok(c)
    }

    fn validate(&self, ctx: &PrimeContext) -> Result<(), LinalgError> {
        let n_max = self.cutoff();
        if self.differential.blocks.len() != n_max + 1 {
            return Err(LinalgError::ShapeMismatch {
                degree: self.differential.blocks.len(),
                found: (0, 0),
                expected: (0, 0),
            });
        }
        for n in 0..=n_max {
            let b = &self.differential.blocks[n];
            let expected = (self.target_rank(n), self.module.rank(n as i64));
            if b.shape() != expected {
                return Err(LinalgError::ShapeMismatch {
                    degree: n,
                    found: b.shape(),
                    expected,
                });
            }
            for (_, _, x) in b.triplets() {
                if !ctx.is_local(&x) {
                    return Err(LinalgError::NotPLocal {
                        degree: n,
                        value: x.to_string(),
                    });
                }
            }
        }
        for n in 0..=n_max {
            let Some(m) = self.next_degree(n) else { continue };
            let dd = self.block(m).mul(self.block(n));
            if !dd.is_zero() {
                return Err(LinalgError::NotAComplex { degree: n });
            }
        }
        Ok(())
    }

    pub fn shift(&self) -> i32 {
        self.differential.shift
    }

    pub fn cutoff(&self) -> usize {
        self.module.cutoff()
    }

    pub fn module(&self) -> &GradedBasis {
        &self.module
    }

    pub fn rank(&self, n: usize) -> usize {
        self.module.rank(n as i64)
    }

    pub fn block(&self, n: usize) -> &Matrix {
        self.differential.block(n)
    }

    /// Degree `n + shift`, if it is within `0..=cutoff`.
    pub fn next_degree(&self, n: usize) -> Option<usize> {
        let m = n as i64 + self.shift() as i64;
        (m >= 0 && m as usize <= self.cutoff()).then_some(m as usize)
    }

    /// Degree `n - shift`, the source of the differential into degree `n`.
    pub fn prev_degree(&self, n: usize) -> Option<usize> {
        let m = n as i64 - self.shift() as i64;
        (m >= 0 && m as usize <= self.cutoff()).then_some(m as usize)
    }

    fn target_rank(&self, n: usize) -> usize {
        self.module.rank(n as i64 + self.shift() as i64)
    }

    /// Differential out of degree `n`.
    pub fn outgoing(&self, n: usize) -> &Matrix {
        self.block(n)
    }

    /// Differential into degree `n`, as a `rank(n) × rank(n - shift)` matrix.
    pub fn incoming(&self, n: usize) -> Matrix {
        match self.prev_degree(n) {
            Some(m) => self.block(m).clone(),
            None => Matrix::zeros(self.rank(n), 0),
        }
    }

    /// Largest degree whose homology the truncation determines.
    pub fn max_trusted(&self) -> i64 {
        self.cutoff() as i64 - 1
    }

    pub fn is_trusted(&self, n: usize) -> bool {
        (n as i64) <= self.max_trusted()
    }

    pub fn trusted_degrees(&self) -> std::ops::Range<usize> {
        0..(self.max_trusted() + 1).max(0) as usize
    }

    pub fn check_trusted(&self, n: usize) -> Result<(), LinalgError> {
        if self.is_trusted(n) {
            Ok(())
        } else {
            Err(LinalgError::DegreeOutOfRange {
                degree: n,
                max: self.max_trusted(),
            })
        }
    }

    /// The complex with all differentials zero.
    pub fn zero_differential(ctx: &PrimeContext, module: GradedBasis, shift: i32) -> Self {
        let n_max = module.cutoff();
        let blocks = (0..=n_max)
            .map(|n| Matrix::zeros(module.rank(n as i64 + shift as i64), module.rank(n as i64)))
            .collect();
        ChainComplexFT::new(ctx, module, GradedMap { shift, blocks }).expect("zero differential")
    }

    /// The dual complex `Hom(C, Z_(p))` with transposed differentials.
    pub fn dual(&self) -> ChainComplexFT {
        let shift = -self.shift();
        let n_max = self.cutoff();
        let blocks = (0..=n_max)
            .map(|n| {
                // dual block out of n is the transpose of the block into n
                match self.prev_degree(n) {
                    Some(m) => self.block(m).transpose(),
                    None => Matrix::zeros(self.module.rank(n as i64 + shift as i64), self.rank(n)),
                }
            })
            .collect();
        let basis = (0..=n_max)
            .map(|n| self.module.labels(n).iter().map(|l| format!("{l}^#")).collect())
            .collect();
        ChainComplexFT {
            module: GradedBasis::new(basis),
            differential: GradedMap { shift, blocks },
        }
    }
}

/// Basis indexing for a degreewise tensor product `A ⊗ B`.
#[derive(Debug, Clone)]
pub struct TensorIndex {
    /// Per total degree: list of `(deg_a, idx_a, idx_b)`.
    pub pairs: Vec<Vec<(usize, usize, usize)>>,
    offsets: Vec<Vec<usize>>, // per total degree, per deg_a: start offset
    ranks_b: Vec<usize>,
}

impl TensorIndex {
    pub fn new(ranks_a: &[usize], ranks_b: &[usize], cutoff: usize) -> Self {
        let mut pairs = Vec::with_capacity(cutoff + 1);
        let mut offsets = Vec::with_capacity(cutoff + 1);
        for n in 0..=cutoff {
            let mut list = Vec::new();
            let mut offs = Vec::with_capacity(n + 1);
            for i in 0..=n {
                offs.push(list.len());
                let ra = ranks_a.get(i).copied().unwrap_or(0);
                let rb = ranks_b.get(n - i).copied().unwrap_or(0);
                for a in 0..ra {
                    for b in 0..rb {
                        list.push((i, a, b));
                    }
                }
            }
            pairs.push(list);
            offsets.push(offs);
        }
        TensorIndex {
            pairs,
            offsets,
            ranks_b: ranks_b.to_vec(),
        }
    }

    pub fn rank(&self, n: usize) -> usize {
        self.pairs[n].len()
    }

    pub fn index(&self, deg_a: usize, a: usize, deg_b: usize, b: usize) -> usize {
        let n = deg_a + deg_b;
        self.offsets[n][deg_a] + a * self.ranks_b[deg_b] + b
    }
}

/// `A ⊗ B` with `d(a⊗b) = da⊗b + (−1)^{|a|} a⊗db`, truncated at the smaller cutoff.
pub fn tensor_complex(
    ctx: &PrimeContext,
    a: &ChainComplexFT,
    b: &ChainComplexFT,
) -> (ChainComplexFT, TensorIndex) {
    assert_eq!(a.shift(), b.shift(), "tensor of complexes with different shifts");
    let shift = a.shift();
    let cutoff = a.cutoff().min(b.cutoff());
    let idx = TensorIndex::new(&a.module.ranks(), &b.module.ranks(), cutoff);
    let mut blocks = Vec::with_capacity(cutoff + 1);
    let mut basis = Vec::with_capacity(cutoff + 1);
    for n in 0..=cutoff {
        basis.push(
            idx.pairs[n]
                .iter()
                .map(|&(i, x, y)| format!("{}⊗{}", a.module.labels(i)[x], b.module.labels(n - i)[y]))
                .collect(),
        );
        let target = n as i64 + shift as i64;
        let trows = if target >= 0 && target as usize <= cutoff {
            idx.rank(target as usize)
        } else {
            0
        };
        let mut m = Matrix::zeros(trows, idx.rank(n));
        if trows > 0 {
            for (col, &(i, x, y)) in idx.pairs[n].iter().enumerate() {
                let j = n - i;
                // da ⊗ b
                if let Some(ti) = a.next_degree(i) {
                    let da = a.block(i);
                    for r in 0..da.rows() {
                        let c = da.get(r, x);
                        if !c.is_zero() {
                            *m.get_mut(idx.index(ti, r, j, y), col) += c.clone();
                        }
                    }
                }
                // (−1)^{|a|} a ⊗ db
                if let Some(tj) = b.next_degree(j) {
                    let db = b.block(j);
                    let sign = if i % 2 == 1 { -PLocal::one() } else { PLocal::one() };
                    for r in 0..db.rows() {
                        let c = db.get(r, y);
                        if !c.is_zero() {
                            *m.get_mut(idx.index(i, x, tj, r), col) += &sign * c;
                        }
                    }
                }
            }
        }
        blocks.push(m);
    }
    let complex = ChainComplexFT::new(ctx, GradedBasis::new(basis), GradedMap { shift, blocks })
        .expect("tensor product of complexes is a complex");
    (complex, idx)
}

/// Degree-preserving map between complexes, one matrix per degree.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub blocks: Vec<Matrix>,
}

impl ChainMap {
    /// Checks `d_B ∘ f = f ∘ d_A` in every degree where both sides are known.
    pub fn check(&self, source: &ChainComplexFT, target: &ChainComplexFT) -> Result<(), LinalgError> {
        let top = source.cutoff().min(target.cutoff());
        for n in 0..=top {
            let f = &self.blocks[n];
            if f.shape() != (target.rank(n), source.rank(n)) {
                return Err(LinalgError::ShapeMismatch {
                    degree: n,
                    found: f.shape(),
                    expected: (target.rank(n), source.rank(n)),
                });
            }
        }
        for n in 0..=top {
            let Some(m) = source.next_degree(n) else { continue };
            if m > top {
                continue;
            }
            let lhs = target.block(n).mul(&self.blocks[n]);
            let rhs = self.blocks[m].mul(source.block(n));
            if lhs != rhs {
                return Err(LinalgError::NotAChainMap { degree: n });
            }
        }
        Ok(())
    }

    pub fn compose(&self, inner: &ChainMap) -> ChainMap {
        ChainMap {
            blocks: self
                .blocks
                .iter()
                .zip(&inner.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn identity(c: &ChainComplexFT) -> ChainMap {
        ChainMap {
            blocks: (0..=c.cutoff()).map(|n| Matrix::identity(c.rank(n))).collect(),
        }
    }

    pub fn scalar(c: &ChainComplexFT, k: &PLocal) -> ChainMap {
        ChainMap {
            blocks: (0..=c.cutoff()).map(|n| Matrix::identity(c.rank(n)).scale(k)).collect(),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn two_term(ctx: &PrimeContext, top: usize, k: i64, cutoff: usize) -> ChainComplexFT {
        // Z_(p) in degrees top and top-1 joined by multiplication by k
        let basis = (0..=cutoff)
            .map(|n| {
                if n == top {
                    vec!["t".to_string()]
                } else if n + 1 == top {
                    vec!["b".to_string()]
                } else {
                    vec![]
                }
            })
            .collect();
        let module = GradedBasis::new(basis);
        let blocks = (0..=cutoff)
            .map(|n| {
                let mut m = Matrix::zeros(module.rank(n as i64 - 1), module.rank(n as i64));
                if n == top {
                    m.set(0, 0, PLocal::from_int(k));
                }
                m
            })
            .collect();
        ChainComplexFT::new(ctx, module, GradedMap { shift: -1, blocks }).unwrap()
    }

    #[test]
    fn rejects_non_complex() {
        let ctx = PrimeContext::new(3).unwrap();
        let module = GradedBasis::new(vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]]);
        let blocks = vec![
            Matrix::zeros(0, 1),
            Matrix::from_int_rows(&[&[1]]),
            Matrix::from_int_rows(&[&[1]]),
        ];
        assert_eq!(
            ChainComplexFT::new(&ctx, module, GradedMap { shift: -1, blocks }).unwrap_err(),
            LinalgError::NotAComplex { degree: 2 }
        );
    }

    #[test]
    fn tensor_squares_to_zero() {
        let ctx = PrimeContext::new(3).unwrap();
        let a = two_term(&ctx, 1, 3, 3);
        let (t, idx) = tensor_complex(&ctx, &a, &a);
        assert_eq!(t.rank(0), 1);
        assert_eq!(t.rank(1), 2);
        assert_eq!(t.rank(2), 1);
        assert_eq!(idx.index(1, 0, 1, 0), 0);
    }

    #[test]
    fn dual_reverses_shift() {
        let ctx = PrimeContext::new(3).unwrap();
        let a = two_term(&ctx, 2, 9, 3);
        let d = a.dual();
        assert_eq!(d.shift(), 1);
        assert_eq!(d.block(1), &Matrix::from_int_rows(&[&[9]]));
    }

    #[test]
    fn chain_map_check() {
        let ctx = PrimeContext::new(3).unwrap();
        let a = two_term(&ctx, 1, 3, 2);
        assert!(ChainMap::identity(&a).check(&a, &a).is_ok());
        let mut bad = ChainMap::identity(&a);
        bad.blocks[1] = Matrix::from_int_rows(&[&[2]]);
        assert_eq!(bad.check(&a, &a), Err(LinalgError::NotAChainMap { degree: 1 }));
    }
}
