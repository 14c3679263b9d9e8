//! The mod-`p` Bockstein spectral sequence of a `Z_(p)`-free complex.
//!
//! Pages are built as `Z_r / B_r` inside `C ⊗ F_p`, read off from Smith forms:
//! a chain `c` with `∂c = p^v u` survives to page `v`, and `u` is hit on page
//! `v + 1`. Each page stores integral lifts of its basis, the differential
//! `β_r`, and the embedding `m_{r+1}` of the next page.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::fp::{Echelon, FpMatrix, FpVector};
use crate::linalg::snf::{smith_normal_form, Snf};
use crate::linalg::{ChainComplexFT, HomologyDecomposition, LinalgError};
use crate::pbw::pbw_series;
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BocksteinError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("page {r} is out of range 1..={max}")]
    PageOutOfRange { r: u32, max: u32 },
    #[error("vector in degree {degree} is not a cycle")]
    NotACycle { degree: usize },
    #[error("E_inf is not divided-power free in degree {degree}: expected {expected}, found {found}")]
    NotGammaFree { degree: usize, expected: u64, found: usize },
}

/// One degree of one page.
#[derive(Debug, Clone)]
pub struct PageDegree {
    pub degree: usize,
    /// Basis of `E_r^n` as vectors of `C_n ⊗ F_p`.
    pub basis: Vec<FpVector>,
    /// Integral chains reducing to the basis vectors.
    pub lifts: Vec<Vec<PLocal>>,
    /// `v` with `∂(lift) = p^v·(unit column)`, `None` for cycles.
    lift_valuations: Vec<Option<u32>>,
    /// `∂(lift) / p^v` reduced mod `p`.
    lift_targets: Vec<FpVector>,
    /// `B_r` generators followed by the basis.
    echelon: Echelon,
    boundary_count: usize,
}

impl PageDegree {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a vector of `Z_r^n` in this page; `None` if it is not in `Z_r^n`.
    pub fn coordinates(&self, v: &[u64]) -> Option<FpVector> {
        let combo = self.echelon.express(v)?;
        Some(combo[self.boundary_count..].to_vec())
    }
}

#[derive(Debug, Clone)]
pub struct BSSPage {
    pub r: u32,
    pub degrees: Vec<PageDegree>,
    /// `β_r: E_r^n → E_r^{n+shift}`, present where both degrees are trusted.
    pub beta: Vec<Option<FpMatrix>>,
}

#[derive(Debug, Clone)]
pub struct BSSLadder {
    ctx: PrimeContext,
    shift: i32,
    pub pages: Vec<BSSPage>,
    /// `m_{r+1}: E_{r+1}^n → E_r^n`, indexed `[r-1][n]`.
    pub embeddings: Vec<Vec<FpMatrix>>,
    pub r_stop: u32,
    outgoing: Vec<Snf>,
    pub homology: HomologyDecomposition,
}

fn reduce(ctx: &PrimeContext, v: &[PLocal]) -> FpVector {
    v.iter().map(|x| ctx.reduce_mod_p(x)).collect()
}

fn target_degree(shift: i32, n: usize, trusted: usize) -> Option<usize> {
    let t = n as i64 + shift as i64;
    (t >= 0 && (t as usize) < trusted).then_some(t as usize)
}

/// Builds every page up to the stable one.
pub fn bockstein(ctx: &PrimeContext, c: &ChainComplexFT) -> BSSLadder {
    let trusted = c.trusted_degrees().end;
    let shift = c.shift();
    let outgoing: Vec<Snf> = (0..trusted)
        .into_par_iter()
        .map(|n| smith_normal_form(ctx, c.outgoing(n)))
        .collect();
    let incoming: Vec<Snf> = (0..trusted)
        .into_par_iter()
        .map(|n| smith_normal_form(ctx, &c.incoming(n)))
        .collect();
    let max_val = outgoing
        .iter()
        .chain(&incoming)
        .flat_map(|s| s.valuations.iter().copied())
        .max()
        .unwrap_or(0);
    let r_stop = max_val + 1;
    let homology = HomologyDecomposition::compute(ctx, c);

    let build_page = |r: u32| -> BSSPage {
        let degrees: Vec<PageDegree> = (0..trusted)
            .map(|n| {
                let out = &outgoing[n];
                let inc = &incoming[n];
                let dim = c.rank(n);
                let mut echelon = Echelon::new(ctx.p(), dim);
                let mut boundary_count = 0;
                for i in 0..inc.rank {
                    if inc.valuations[i] < r {
                        echelon.insert(&reduce(ctx, &inc.u.column(i)));
                        boundary_count += 1;
                    }
                }
                let mut basis = Vec::new();
                let mut lifts = Vec::new();
                let mut lift_valuations = Vec::new();
                let mut lift_targets = Vec::new();
                for i in 0..dim {
                    let v = if i < out.rank { Some(out.valuations[i]) } else { None };
                    if v.is_some_and(|v| v < r) {
                        continue;
                    }
                    let lift = out.v_inv.column(i);
                    let red = reduce(ctx, &lift);
                    if !echelon.contains(&red) {
                        echelon.insert(&red);
                        basis.push(red);
                        lifts.push(lift);
                        lift_valuations.push(v);
                        lift_targets.push(if v.is_some() {
                            reduce(ctx, &out.u.column(i))
                        } else {
                            Vec::new()
                        });
                    }
                }
                PageDegree {
                    degree: n,
                    basis,
                    lifts,
                    lift_valuations,
                    lift_targets,
                    echelon,
                    boundary_count,
                }
            })
            .collect();
        let beta = (0..trusted)
            .map(|n| {
                let t = target_degree(shift, n, trusted)?;
                let src = &degrees[n];
                let dst = &degrees[t];
                let cols = (0..src.dim())
                    .map(|k| match src.lift_valuations[k] {
                        Some(v) if v == r => dst
                            .coordinates(&src.lift_targets[k])
                            .expect("∂(lift)/p^r reduces into Z_r"),
                        _ => vec![0; dst.dim()],
                    })
                    .collect();
                Some(FpMatrix::new(dst.dim(), cols))
            })
            .collect();
        BSSPage { r, degrees, beta }
    };

    let pages: Vec<BSSPage> = (1..=r_stop).into_par_iter().map(build_page).collect();
    let embeddings = (1..pages.len())
        .map(|k| {
            let (lower, upper) = (&pages[k - 1], &pages[k]);
            (0..trusted)
                .map(|n| {
                    let cols = upper.degrees[n]
                        .basis
                        .iter()
                        .map(|v| lower.degrees[n].coordinates(v).expect("Z_{r+1} ⊂ Z_r"))
                        .collect();
                    FpMatrix::new(lower.degrees[n].dim(), cols)
                })
                .collect()
        })
        .collect();
    BSSLadder {
        ctx: *ctx,
        shift,
        pages,
        embeddings,
        r_stop,
        outgoing,
        homology,
    }
}

impl BSSLadder {
    pub fn trusted(&self) -> usize {
        self.outgoing.len()
    }

    pub fn page(&self, r: u32) -> Result<&BSSPage, BocksteinError> {
        let max = self.r_stop;
        if r == 0 {
            return Err(BocksteinError::PageOutOfRange { r, max });
        }
        // pages beyond r_stop are all equal to the last one
        Ok(&self.pages[(r.min(max) - 1) as usize])
    }

    pub fn e_infinity_page(&self) -> &BSSPage {
        self.pages.last().expect("at least one page")
    }

    pub fn dims(&self, r: u32) -> Result<Vec<usize>, BocksteinError> {
        Ok(self.page(r)?.degrees.iter().map(PageDegree::dim).collect())
    }

    fn check_degree(&self, n: usize) -> Result<(), BocksteinError> {
        if n >= self.trusted() {
            return Err(LinalgError::DegreeOutOfRange {
                degree: n,
                max: self.trusted() as i64 - 1,
            }
            .into());
        }
        Ok(())
    }

    /// `ρ_r` of the class of an integral cycle `z` of degree `n`.
    pub fn rho(&self, r: u32, n: usize, z: &[PLocal]) -> Result<FpVector, BocksteinError> {
        self.check_degree(n)?;
        if !self.outgoing[n].d_matrix().mul(&self.outgoing[n].v).apply(z).iter().all(PLocal::is_zero) {
            return Err(BocksteinError::NotACycle { degree: n });
        }
        let page = self.page(r)?;
        Ok(page.degrees[n]
            .coordinates(&reduce(&self.ctx, z))
            .expect("cycles reduce into every Z_r"))
    }

    /// `σ_{rs} = m_s ∘ … ∘ m_{r+1}: E_s^n → E_r^n`.
    pub fn sigma(&self, r: u32, s: u32, n: usize) -> Result<FpMatrix, BocksteinError> {
        self.check_degree(n)?;
        let s = s.min(self.r_stop);
        let r = r.min(s);
        let dim = self.page(s)?.degrees[n].dim();
        let mut acc = FpMatrix::new(dim, (0..dim).map(|i| unit(dim, i)).collect());
        for k in (r..s).rev() {
            acc = self.embeddings[(k - 1) as usize][n].compose(self.ctx.p(), &acc);
        }
        Ok(acc)
    }

    /// Whether `m_{r+1}ρ_{r+1}(z) − ρ_r(z)` lies in the image of `β_r`.
    pub fn reduction_witness(&self, r: u32, n: usize, z: &[PLocal]) -> Result<Option<bool>, BocksteinError> {
        let p = self.ctx.p();
        if r >= self.r_stop {
            // m is the identity from here on and β_r vanishes
            return Ok(Some(true));
        }
        let Some(src) = self.source_of(n) else {
            return Ok(None);
        };
        let page = self.page(r)?;
        let Some(beta) = page.beta[src].as_ref() else {
            return Ok(None);
        };
        let upper = self.rho(r + 1, n, z)?;
        let lower = self.rho(r, n, z)?;
        let m = &self.embeddings[(r - 1) as usize][n];
        let diff = crate::linalg::fp::sub(p, &m.apply(p, &upper), &lower);
        Ok(Some(beta.column_span(p).contains(&diff)))
    }

    /// Degree whose `β` lands in `n`.
    fn source_of(&self, n: usize) -> Option<usize> {
        let s = n as i64 - self.shift as i64;
        (s >= 0 && (s as usize) < self.trusted()).then_some(s as usize)
    }

    pub fn report(&self) -> Vec<BocksteinDegree> {
        (0..self.trusted())
            .map(|n| {
                let dims: Vec<usize> = self.pages.iter().map(|p| p.degrees[n].dim()).collect();
                let dim_e_inf = *dims.last().expect("page");
                let rank_fh = self.homology.degrees[n].free_rank;
                BocksteinDegree {
                    degree: n,
                    dims_per_page: dims,
                    dim_e_inf,
                    rank_fh,
                    converged: dim_e_inf == rank_fh,
                }
            })
            .collect()
    }

    /// Structural checks on all pages; returns the violated properties.
    pub fn law_violations(&self) -> Vec<String> {
        let p = self.ctx.p();
        let mut out = Vec::new();
        for page in &self.pages {
            let r = page.r;
            for n in 0..self.trusted() {
                let Some(beta) = &page.beta[n] else { continue };
                let t = target_degree(self.shift, n, self.trusted()).expect("β target");
                if let Some(next) = &page.beta[t] {
                    if !next.compose(p, beta).is_zero() {
                        out.push(format!("β_{r}∘β_{r} ≠ 0 (degree {n})"));
                    }
                }
                // dim H(E_r, β_r) at n = dim E_{r+1}^n, where both β's are known
                if let Some(src) = self.source_of(n) {
                    if let Some(incoming) = &page.beta[src] {
                        let h = beta.nullity(p) - incoming.rank(p);
                        let next_dim = self.page(r + 1).map(|q| q.degrees[n].dim()).unwrap_or(0);
                        if h != next_dim {
                            out.push(format!("H(E_{r}) ≠ E_{} in degree {n}", r + 1));
                        }
                    }
                }
            }
            if r < self.r_stop {
                let next = &self.pages[r as usize];
                for n in 0..self.trusted() {
                    let m = &self.embeddings[(r - 1) as usize][n];
                    if m.rank(p) != m.cols() {
                        out.push(format!("m_{} not injective (degree {n})", r + 1));
                    }
                    if next.degrees[n].dim() > page.degrees[n].dim() {
                        out.push(format!("page {} grew in degree {n}", r + 1));
                    }
                    if let Some(beta) = &page.beta[n] {
                        if !beta.compose(p, m).is_zero() {
                            out.push(format!("m_{} leaves ker β_{r} (degree {n})", r + 1));
                        }
                    }
                }
            }
        }
        out
    }

    /// Kernel law on the homology basis: `ρ_∞` kills torsion and `p·H`, and
    /// is injective on the free part mod `p`.
    pub fn kernel_law_holds(&self) -> bool {
        let p = self.ctx.p();
        let r = self.r_stop;
        let pp = self.ctx.p_power(1);
        self.homology.degrees.iter().all(|h| {
            let n = h.degree;
            let torsion_dies = h
                .torsion_reps
                .columns()
                .iter()
                .all(|z| self.rho(r, n, z).map(|v| v.iter().all(|&x| x == 0)).unwrap_or(false));
            let multiples_die = h.free_reps.columns().iter().all(|z| {
                let pz: Vec<PLocal> = z.iter().map(|x| x * &pp).collect();
                self.rho(r, n, &pz).map(|v| v.iter().all(|&x| x == 0)).unwrap_or(false)
            });
            let images: Vec<FpVector> = h
                .free_reps
                .columns()
                .iter()
                .filter_map(|z| self.rho(r, n, z).ok())
                .collect();
            let independent = FpMatrix::new(self.e_infinity_page().degrees[n].dim(), images).rank(p) == h.free_rank;
            torsion_dies && multiples_die && independent
        })
    }

    /// The reduction witness on every homology basis cycle and page.
    pub fn reduction_holds(&self) -> bool {
        self.homology.degrees.iter().all(|h| {
            let cycles = h.free_reps.columns().into_iter().chain(h.torsion_reps.columns());
            cycles.into_iter().all(|z| {
                (1..self.r_stop).all(|r| self.reduction_witness(r, h.degree, &z).map(|w| w != Some(false)).unwrap_or(false))
            })
        })
    }
}

fn unit(dim: usize, i: usize) -> FpVector {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BocksteinDegree {
    pub degree: usize,
    pub dims_per_page: Vec<usize>,
    pub dim_e_inf: usize,
    pub rank_fh: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BocksteinVerdict {
    pub r_stop: u32,
    pub per_degree: Vec<BocksteinDegree>,
    pub converged: bool,
    pub reduction_witness: bool,
    pub kernel_law: bool,
    pub law_violations: Vec<String>,
    pub status: bool,
}

/// Convergence and structural checks for one complex.
pub fn e_infinity(ctx: &PrimeContext, c: &ChainComplexFT) -> BocksteinVerdict {
    let ladder = bockstein(ctx, c);
    verdict(&ladder)
}

pub fn verdict(ladder: &BSSLadder) -> BocksteinVerdict {
    let per_degree = ladder.report();
    let converged = per_degree.iter().all(|d| d.converged);
    let reduction_witness = ladder.reduction_holds();
    let kernel_law = ladder.kernel_law_holds();
    let law_violations = ladder.law_violations();
    let status = converged && reduction_witness && kernel_law && law_violations.is_empty();
    BocksteinVerdict {
        r_stop: ladder.r_stop,
        per_degree,
        converged,
        reduction_witness,
        kernel_law,
        law_violations,
        status,
    }
}

/// Multiplicative structure needed to look for divided-power generators.
pub trait GammaOps {
    /// Product of integral cochains of degrees `a` and `b`.
    fn product(&self, a: usize, x: &[PLocal], b: usize, y: &[PLocal]) -> Vec<PLocal>;
    /// `γ^k` of an integral cochain of even degree `n`.
    fn divided_power(&self, n: usize, x: &[PLocal], k: u32) -> Option<Vec<PLocal>>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaGenerators {
    /// Rank of the generating space `V_∞` per degree.
    pub ranks: Vec<usize>,
    pub dims: Vec<usize>,
}

/// Counts divided-power generators of `E_∞` degree by degree and checks that
/// `E_∞` has the size of the free divided-power algebra on them.
pub fn gamma_page_structure(ladder: &BSSLadder, ops: &dyn GammaOps) -> Result<GammaGenerators, BocksteinError> {
    let p = ladder.ctx.p();
    let page = ladder.e_infinity_page();
    let trusted = ladder.trusted();
    let dims: Vec<usize> = page.degrees.iter().map(PageDegree::dim).collect();
    let mut ranks = vec![0usize; trusted];
    let mut generator_degrees = Vec::new();
    for n in 1..trusted {
        let deg = &page.degrees[n];
        let mut decomposables = Echelon::new(p, deg.dim());
        let mut add = |v: Vec<PLocal>| {
            let red = reduce(&ladder.ctx, &v);
            if let Some(c) = deg.coordinates(&red) {
                decomposables.insert(&pad(c, deg.dim()));
            }
        };
        for a in 1..n {
            let b = n - a;
            for x in &page.degrees[a].lifts {
                for y in &page.degrees[b].lifts {
                    add(ops.product(a, x, b, y));
                }
            }
        }
        for d in (2..n).filter(|d| d % 2 == 0 && n % d == 0) {
            for x in &page.degrees[d].lifts {
                if let Some(g) = ops.divided_power(d, x, (n / d) as u32) {
                    add(g);
                }
            }
        }
        ranks[n] = deg.dim() - decomposables.rank();
        generator_degrees.extend(std::iter::repeat_n(n as u32, ranks[n]));
    }
    let predicted = pbw_series(&generator_degrees, trusted.saturating_sub(1));
    for n in 0..trusted {
        if predicted[n] != dims[n] as u64 {
            return Err(BocksteinError::NotGammaFree {
                degree: n,
                expected: predicted[n],
                found: dims[n],
            });
        }
    }
    Ok(GammaGenerators { ranks, dims })
}

fn pad(mut v: FpVector, len: usize) -> FpVector {
    v.resize(len, 0);
    v
}
