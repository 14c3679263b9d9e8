//! Homology over `Z_(p)` with its torsion decomposition.

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::complex::{ChainComplexFT, ChainMap, LinalgError, TensorIndex};
use crate::linalg::matrix::Matrix;
use crate::linalg::snf::{self, smith_normal_form, Snf};
use crate::scalar::{PLocal, PrimeContext};

/// `H_n ≅ Z_(p)^free_rank ⊕ ⨁ Z/p^r` with explicit cycle representatives.
#[derive(Debug, Clone)]
pub struct HomologyDegree {
    pub degree: usize,
    pub free_rank: usize,
    /// Exponents `r` of the summands `Z/p^r`, nondecreasing.
    pub torsion_orders: Vec<u32>,
    /// Columns are cycles whose classes form a basis of the free part.
    pub free_reps: Matrix,
    /// Columns are cycles generating the torsion summands, in the order of `torsion_orders`.
    pub torsion_reps: Matrix,
    /// Row `i` reads off the `i`-th free coordinate of a cycle.
    pub free_projector: Matrix,
    boundary_snf: Snf,
}

impl HomologyDegree {
    /// Coordinates in the free part of the class of a cycle `z`.
    pub fn free_coordinates(&self, z: &[PLocal]) -> Vec<PLocal> {
        self.free_projector.apply(z)
    }

    /// Whether `v` is a boundary (exact p-local solve).
    pub fn is_boundary(&self, ctx: &PrimeContext, v: &[PLocal]) -> bool {
        snf::solve_with(ctx, &self.boundary_snf, v).is_some()
    }

    pub fn entry(&self, trusted: bool) -> HomologyEntry {
        HomologyEntry {
            degree: self.degree,
            free_rank: self.free_rank,
            torsion: self.torsion_orders.clone(),
            trusted,
        }
    }
}

/// Report record for one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyEntry {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<u32>,
    pub trusted: bool,
}

/// `H_n(C)` for one trusted degree.
pub fn homology(ctx: &PrimeContext, c: &ChainComplexFT, n: usize) -> Result<HomologyDegree, LinalgError> {
    c.check_trusted(n)?;
    let dim = c.rank(n);
    let out = c.outgoing(n);
    let inc = c.incoming(n);

    // cycles: Z_n = columns rank.. of V^{-1} for out = U D V
    let s_out = smith_normal_form(ctx, out);
    let kernel = s_out.kernel_basis();
    let k = kernel.cols();
    // boundaries in kernel coordinates: rows rank.. of V · inc
    let coords = s_out.v.mul(&inc).select_rows(s_out.rank..dim);
    let s_b = smith_normal_form(ctx, &coords);

    // basis of Z_n adapted to B_n: columns of kernel · U'
    let adapted = kernel.mul(&s_b.u);
    let mut torsion_orders = Vec::new();
    let mut torsion_cols = Vec::new();
    for (i, &v) in s_b.valuations.iter().enumerate() {
        if v > 0 {
            torsion_orders.push(v);
            torsion_cols.push(i);
        }
    }
    let free_cols: Vec<usize> = (s_b.rank..k).collect();
    let free_reps = adapted.select_columns(free_cols.iter().copied());
    let torsion_reps = adapted.select_columns(torsion_cols);
    // free coordinates: rows rank'.. of U'^{-1} · (rows rank.. of V)
    let v_rows = s_out.v.select_rows(s_out.rank..dim);
    let free_projector = s_b.u_inv.select_rows(free_cols.iter().copied()).mul(&v_rows);

    Ok(HomologyDegree {
        degree: n,
        free_rank: free_cols.len(),
        torsion_orders,
        free_reps,
        torsion_reps,
        free_projector,
        boundary_snf: smith_normal_form(ctx, &inc),
    })
}

/// Homology in every trusted degree.
#[derive(Debug, Clone)]
pub struct HomologyDecomposition {
    pub degrees: Vec<HomologyDegree>,
}

impl HomologyDecomposition {
    pub fn compute(ctx: &PrimeContext, c: &ChainComplexFT) -> Self {
        let degrees = c
            .trusted_degrees()
            .into_par_iter()
            .map(|n| homology(ctx, c, n).expect("trusted degree"))
            .collect();
        HomologyDecomposition { degrees }
    }

    pub fn get(&self, n: usize) -> Option<&HomologyDegree> {
        self.degrees.get(n)
    }

    pub fn free_ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|h| h.free_rank).collect()
    }

    pub fn entries(&self) -> Vec<HomologyEntry> {
        self.degrees.iter().map(|h| h.entry(true)).collect()
    }
}

/// Matrix of `F(H(f))` in degree `n`, in the free-representative bases.
pub fn induced_free_map(
    f: &ChainMap,
    source: &ChainComplexFT,
    target: &ChainComplexFT,
    h_source: &HomologyDegree,
    h_target: &HomologyDegree,
) -> Result<Matrix, LinalgError> {
    f.check(source, target)?;
    let n = h_source.degree;
    let image = f.blocks[n].mul(&h_source.free_reps);
    Ok(h_target.free_projector.mul(&image))
}

/// The free Künneth identification `FH(A) ⊗ FH(B) → FH(A ⊗ B)` in one degree.
#[derive(Debug, Clone)]
pub struct KunnethIso {
    pub degree: usize,
    /// Column order: `(deg_a, i, j)` for free basis elements `i` of `FH(A)_{deg_a}` and `j` of `FH(B)_{n-deg_a}`.
    pub pairs: Vec<(usize, usize, usize)>,
    pub matrix: Matrix,
    pub inverse: Matrix,
}

impl KunnethIso {
    /// Position of `(deg_a, i, j)` in the column order.
    pub fn position(&self, deg_a: usize, i: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|&t| t == (deg_a, i, j))
    }
}

/// Builds `Fκ` in degree `n`; fails if it is not invertible over `Z_(p)`.
pub fn kunneth_free_iso(
    ctx: &PrimeContext,
    h_a: &HomologyDecomposition,
    h_b: &HomologyDecomposition,
    h_t: &HomologyDegree,
    index: &TensorIndex,
) -> Result<KunnethIso, LinalgError> {
    let n = h_t.degree;
    let mut pairs = Vec::new();
    let mut cols = Vec::new();
    let dim = index.rank(n);
    for i in 0..=n {
        let (Some(ha), Some(hb)) = (h_a.get(i), h_b.get(n - i)) else {
            return Err(LinalgError::DegreeOutOfRange {
                degree: n,
                max: h_a.degrees.len().min(h_b.degrees.len()) as i64 - 1,
            });
        };
        for x in 0..ha.free_rank {
            let za = ha.free_reps.column(x);
            for y in 0..hb.free_rank {
                let zb = hb.free_reps.column(y);
                let mut v = vec![PLocal::zero(); dim];
                for (ra, ca) in za.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (rb, cb) in zb.iter().enumerate() {
                        if !cb.is_zero() {
                            v[index.index(i, ra, n - i, rb)] += ca * cb;
                        }
                    }
                }
                pairs.push((i, x, y));
                cols.push(h_t.free_coordinates(&v));
            }
        }
    }
    let matrix = Matrix::from_columns(h_t.free_rank, &cols);
    let inverse = snf::inverse(ctx, &matrix).ok_or(LinalgError::KunnethNotInvertible { degree: n })?;
    Ok(KunnethIso {
        degree: n,
        pairs,
        matrix,
        inverse,
    })
}
