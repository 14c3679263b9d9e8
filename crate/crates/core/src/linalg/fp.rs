//! Linear algebra over `F_p` with residues stored as `u64` in `0..p`.

use crate::scalar::{inv_mod, mulmod};

pub type FpVector = Vec<u64>;

/// Incrementally built echelon form of a span.
///
/// Each inserted vector gets a generator index; reduced rows remember how they
/// were formed from generators so that [`Echelon::express`] can return
/// coordinates with respect to the inserted vectors.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u64,
    dim: usize,
    rows: Vec<(usize, FpVector, FpVector)>, // (pivot, row, combination of generators)
    generators: usize,
}

impl Echelon {
    pub fn new(p: u64, dim: usize) -> Self {
        Echelon {
            p,
            dim,
            rows: Vec::new(),
            generators: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce_with_combo(&self, v: &[u64]) -> (FpVector, FpVector) {
        let p = self.p;
        let mut v = v.to_vec();
        let mut combo = vec![0u64; self.generators];
        for (piv, row, rc) in &self.rows {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            // rows are normalized so row[piv] == 1
            let f = p - c;
            for (x, r) in v.iter_mut().zip(row) {
                if *r != 0 {
                    *x = (*x + mulmod(f, *r, p)) % p;
                }
            }
            for (x, r) in combo.iter_mut().zip(rc) {
                if *r != 0 {
                    *x = (*x + mulmod(c, *r, p)) % p;
                }
            }
        }
        (v, combo)
    }

    /// Remainder of `v` modulo the span.
    pub fn reduce(&self, v: &[u64]) -> FpVector {
        self.reduce_with_combo(v).0
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts `v` as the next generator; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.dim);
        let p = self.p;
        let (mut r, combo) = self.reduce_with_combo(v);
        self.generators += 1;
        for (_, _, rc) in &mut self.rows {
            rc.push(0);
        }
        // r = v - Σ combo_g · gen_g
        let mut rc: FpVector = combo.iter().map(|&c| (p - c) % p).collect();
        rc.push(1);
        debug_assert_eq!(rc.len(), self.generators);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(r[piv], p);
        for x in r.iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for x in rc.iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        self.rows.push((piv, r, rc));
        true
    }

    /// Coordinates of `v` in terms of all inserted generators, if `v` is in the span.
    ///
    /// Dependent generators receive coefficient zero.
    pub fn express(&self, v: &[u64]) -> Option<FpVector> {
        let (r, combo) = self.reduce_with_combo(v);
        if r.iter().any(|&x| x != 0) {
            return None;
        }
        Some(combo)
    }
}

/// `F_p` matrix stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub rows: usize,
    pub columns: Vec<FpVector>,
}

impl FpMatrix {
    pub fn new(rows: usize, columns: Vec<FpVector>) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows));
        FpMatrix { rows, columns }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self, p: u64) -> usize {
        let mut e = Echelon::new(p, self.rows);
        for c in &self.columns {
            e.insert(c);
        }
        e.rank()
    }

    pub fn apply(&self, p: u64, v: &[u64]) -> FpVector {
        let mut out = vec![0u64; self.rows];
        for (c, &x) in self.columns.iter().zip(v) {
            if x == 0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(c) {
                *o = (*o + mulmod(x, y, p)) % p;
            }
        }
        out
    }

    pub fn compose(&self, p: u64, inner: &FpMatrix) -> FpMatrix {
        FpMatrix::new(
            self.rows,
            inner.columns.iter().map(|c| self.apply(p, c)).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&x| x == 0))
    }

    pub fn column_span(&self, p: u64) -> Echelon {
        let mut e = Echelon::new(p, self.rows);
        for c in &self.columns {
            e.insert(c);
        }
        e
    }

    /// Dimension of the kernel.
    pub fn nullity(&self, p: u64) -> usize {
        self.cols() - self.rank(p)
    }
}

pub fn sub(p: u64, a: &[u64], b: &[u64]) -> FpVector {
    a.iter().zip(b).map(|(&x, &y)| (x + p - y) % p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn express_tracks_generators() {
        let p = 5;
        let mut e = Echelon::new(p, 3);
        assert!(e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 3, 1]));
        assert_eq!(e.rank(), 2);
        // 2·g0 + 3·g1 = (2, 4+3, 3) = (2, 2, 3)
        let c = e.express(&[2, 2, 3]).unwrap();
        assert_eq!(&c[..2], &[2, 3]);
        assert!(e.express(&[0, 0, 1]).is_none());
    }

    #[test]
    fn rank_and_nullity() {
        let m = FpMatrix::new(2, vec![vec![1, 1], vec![2, 2], vec![0, 1]]);
        assert_eq!(m.rank(3), 2);
        assert_eq!(m.nullity(3), 1);
        assert_eq!(m.apply(3, &[1, 1, 0]), vec![0, 0]);
    }
}
