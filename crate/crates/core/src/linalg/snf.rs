//! Smith normal form over the discrete valuation ring `Z_(p)`.
//!
//! Every nonzero entry is a unit times a power of `p`, so the entry of least
//! valuation divides everything else in the matrix and one elimination pass per
//! pivot suffices.

use crate::linalg::matrix::Matrix;
use crate::scalar::{PLocal, PrimeContext};

/// `M = U · diag(D) · V` with `U`, `V` invertible over `Z_(p)`.
///
/// The diagonal entries are exact powers `p^a`, nondecreasing in `a`, and only
/// the first `rank` of them are nonzero.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    pub diagonal: Vec<PLocal>,
    pub valuations: Vec<u32>,
    pub rank: usize,
}

impl Snf {
    /// The diagonal factor as a full `rows × cols` matrix.
    pub fn d_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.u.rows(), self.v.rows());
        for (i, x) in self.diagonal.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    /// A saturated basis of the kernel, as columns of `V^{-1}`.
    pub fn kernel_basis(&self) -> Matrix {
        self.v_inv.select_columns(self.rank..self.v_inv.cols())
    }

    /// Number of unit invariant factors.
    pub fn unit_rank(&self) -> usize {
        self.valuations.iter().filter(|&&v| v == 0).count()
    }
}

pub fn smith_normal_form(ctx: &PrimeContext, m: &Matrix) -> Snf {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    // L·M·R = D, with U = L^{-1}, V = R^{-1}
    let mut l = Matrix::identity(rows);
    let mut l_inv = Matrix::identity(rows);
    let mut r = Matrix::identity(cols);
    let mut r_inv = Matrix::identity(cols);
    let mut valuations = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(v) = ctx.val(a.get(i, j)) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };

        a.swap_rows(k, pi);
        l.swap_rows(k, pi);
        l_inv.swap_cols(k, pi);
        a.swap_cols(k, pj);
        r.swap_cols(k, pj);
        r_inv.swap_rows(k, pj);

        // normalize the pivot to exactly p^v
        let unit = ctx
            .divide_exact(a.get(k, k), &ctx.p_power(v))
            .expect("pivot is p^v times a unit");
        let unit_inv = ctx.divide_exact(&PLocal::one(), &unit).expect("unit");
        a.scale_row(k, &unit_inv);
        l.scale_row(k, &unit_inv);
        l_inv.scale_col(k, &unit);

        let pivot = a.get(k, k).clone();
        for i in k + 1..rows {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = -ctx
                .divide_exact(a.get(i, k), &pivot)
                .expect("minimal-valuation pivot divides its column");
            a.add_row_multiple(i, k, &f);
            l.add_row_multiple(i, k, &f);
            l_inv.add_col_multiple(k, i, &-f);
        }
        for j in k + 1..cols {
            if a.get(k, j).is_zero() {
                continue;
            }
            let f = -ctx
                .divide_exact(a.get(k, j), &pivot)
                .expect("minimal-valuation pivot divides its row");
            a.add_col_multiple(j, k, &f);
            r.add_col_multiple(j, k, &f);
            r_inv.add_row_multiple(k, j, &-f);
        }
        valuations.push(v);
    }

    let rank = valuations.len();
    let diagonal = (0..rows.min(cols))
        .map(|i| if i < rank { a.get(i, i).clone() } else { PLocal::zero() })
        .collect();
    Snf {
        u: l_inv,
        u_inv: l,
        v: r_inv,
        v_inv: r,
        diagonal,
        valuations,
        rank,
    }
}

/// Solves `M·x = b` over `Z_(p)`; `None` if no p-local solution exists.
pub fn solve(ctx: &PrimeContext, m: &Matrix, b: &[PLocal]) -> Option<Vec<PLocal>> {
    solve_with(ctx, &smith_normal_form(ctx, m), b)
}

/// Same as [`solve`] with a precomputed factorization of `M`.
pub fn solve_with(ctx: &PrimeContext, snf: &Snf, b: &[PLocal]) -> Option<Vec<PLocal>> {
    // U D V x = b  =>  D y = U^{-1} b, x = V^{-1} y
    let c = snf.u_inv.apply(b);
    let mut y = vec![PLocal::zero(); snf.v.rows()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            y[i] = ctx.divide_exact(ci, &snf.diagonal[i]).ok()?;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.v_inv.apply(&y))
}

/// A basis of the column span of `M` over `Z_(p)` (the nonzero columns of `U·D`).
pub fn column_span_basis(ctx: &PrimeContext, m: &Matrix) -> Matrix {
    let snf = smith_normal_form(ctx, m);
    let mut cols = Vec::with_capacity(snf.rank);
    for i in 0..snf.rank {
        let c: Vec<PLocal> = snf.u.column(i).iter().map(|x| x * &snf.diagonal[i]).collect();
        cols.push(c);
    }
    Matrix::from_columns(m.rows(), &cols)
}

/// Rank over `Q` by plain fraction-field row reduction, independent of the
/// valuation-driven pivoting in [`smith_normal_form`].
pub fn rational_rank(m: &Matrix) -> usize {
    use num_rational::BigRational;
    use num_traits::Zero;
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j).as_rational().clone()).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in rank + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[rank][c];
            for j in c..cols {
                let t = &a[rank][j] * &f;
                a[i][j] -= t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Invertible over `Z_(p)`: square with determinant of valuation zero.
pub fn is_invertible(ctx: &PrimeContext, m: &Matrix) -> bool {
    m.rows() == m.cols() && smith_normal_form(ctx, m).unit_rank() == m.rows()
}

/// Inverse of a matrix invertible over `Z_(p)`.
pub fn inverse(ctx: &PrimeContext, m: &Matrix) -> Option<Matrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let snf = smith_normal_form(ctx, m);
    if snf.unit_rank() != m.rows() {
        return None;
    }
    // M = U D V with D = I  =>  M^{-1} = V^{-1} U^{-1}
    Some(snf.v_inv.mul(&snf.u_inv))
}
