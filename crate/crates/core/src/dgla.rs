//! Finite-rank differential graded Lie algebras over `Z_(p)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    ChainComplexFT, GradedMap, GradedBasis, HomologyDecomposition, LinalgError, Matrix,
};
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DglaError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(ValidationReport),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub label: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(label: impl Into<String>, degree: u32) -> Self {
        Generator {
            label: label.into(),
            degree,
        }
    }
}

/// A Lie element as a dense coefficient vector over the generators.
pub type LieElement = Vec<PLocal>;

/// Sparse linear combination of generator indices.
pub type Combination = Vec<(usize, PLocal)>;

/// Generators, bracket structure constants and differential constants.
///
/// The bracket table holds every ordered pair; a missing pair brackets to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGLAPresentation {
    ctx: PrimeContext,
    generators: Vec<Generator>,
    bracket: BTreeMap<(usize, usize), Combination>,
    differential: Vec<Combination>,
}

fn sign(e: u32) -> PLocal {
    PLocal::sign(e as u64)
}

fn clean(c: impl IntoIterator<Item = (usize, PLocal)>) -> Combination {
    let mut acc: BTreeMap<usize, PLocal> = BTreeMap::new();
    for (k, x) in c {
        *acc.entry(k).or_default() += x;
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

impl DGLAPresentation {
    /// Assembles a presentation without checking the axioms; see [`validate`].
    pub fn new(
        ctx: PrimeContext,
        generators: Vec<Generator>,
        bracket: BTreeMap<(usize, usize), Combination>,
        differential: Vec<Combination>,
    ) -> Self {
        assert_eq!(differential.len(), generators.len());
        let bracket = bracket
            .into_iter()
            .map(|(k, v)| (k, clean(v)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        let differential = differential.into_iter().map(clean).collect();
        DGLAPresentation {
            ctx,
            generators,
            bracket,
            differential,
        }
    }

    /// Builds and validates; errors carry the full violation report.
    pub fn validated(
        ctx: PrimeContext,
        generators: Vec<Generator>,
        bracket: BTreeMap<(usize, usize), Combination>,
        differential: Vec<Combination>,
    ) -> Result<Self, DglaError> {
        let l = DGLAPresentation::new(ctx, generators, bracket, differential);
        let report = validate(&l);
        if report.is_valid() {
            Ok(l)
        } else {
            Err(DglaError::InvalidPresentation(report))
        }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.generators[i].degree
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    pub fn bracket_table(&self) -> &BTreeMap<(usize, usize), Combination> {
        &self.bracket
    }

    pub fn differential_table(&self) -> &[Combination] {
        &self.differential
    }

    pub fn bracket_of(&self, i: usize, j: usize) -> &[(usize, PLocal)] {
        self.bracket.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    pub fn differential_of(&self, i: usize) -> &[(usize, PLocal)] {
        &self.differential[i]
    }

    /// Replaces one bracket structure constant `[g_i, g_j]_k`.
    pub fn with_bracket_constant(&self, i: usize, j: usize, k: usize, value: PLocal) -> Self {
        let mut l = self.clone();
        let entry = l.bracket.entry((i, j)).or_default();
        entry.retain(|(t, _)| *t != k);
        entry.push((k, value));
        let e = clean(std::mem::take(entry));
        if e.is_empty() {
            l.bracket.remove(&(i, j));
        } else {
            l.bracket.insert((i, j), e);
        }
        l
    }

    /// Replaces one differential constant `(∂g_i)_k`.
    pub fn with_differential_constant(&self, i: usize, k: usize, value: PLocal) -> Self {
        let mut l = self.clone();
        let mut e = std::mem::take(&mut l.differential[i]);
        e.retain(|(t, _)| *t != k);
        e.push((k, value));
        l.differential[i] = clean(e);
        l
    }

    pub fn unit_vector(&self, i: usize) -> LieElement {
        let mut v = vec![PLocal::zero(); self.len()];
        v[i] = PLocal::one();
        v
    }

    pub fn bracket(&self, x: &[PLocal], y: &[PLocal]) -> LieElement {
        let mut out = vec![PLocal::zero(); self.len()];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.bracket_of(i, j) {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    pub fn d(&self, x: &[PLocal]) -> LieElement {
        let mut out = vec![PLocal::zero(); self.len()];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, c) in &self.differential[i] {
                out[*k] += a * c;
            }
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    /// The underlying chain complex truncated at `cutoff`.
    pub fn chain_complex(&self, cutoff: usize) -> ChainComplexFT {
        let mut basis: Vec<Vec<String>> = vec![Vec::new(); cutoff + 1];
        let mut position = vec![None; self.len()];
        for (i, g) in self.generators.iter().enumerate() {
            let n = g.degree as usize;
            if n <= cutoff {
                position[i] = Some((n, basis[n].len()));
                basis[n].push(g.label.clone());
            }
        }
        let module = GradedBasis::new(basis);
        let mut blocks: Vec<Matrix> = (0..=cutoff)
            .map(|n| Matrix::zeros(module.rank(n as i64 - 1), module.rank(n as i64)))
            .collect();
        for (i, pos) in position.iter().enumerate() {
            let Some((n, col)) = *pos else { continue };
            for (k, c) in &self.differential[i] {
                if let Some((m, row)) = position[*k] {
                    debug_assert_eq!(m + 1, n);
                    blocks[n].set(row, col, c.clone());
                }
            }
        }
        ChainComplexFT::new(&self.ctx, module, GradedMap { shift: -1, blocks })
            .expect("validated Lie algebra has ∂∘∂ = 0")
    }

    /// Generator indices in each degree `0..=cutoff`, in presentation order.
    pub fn generators_by_degree(&self, cutoff: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); cutoff + 1];
        for (i, g) in self.generators.iter().enumerate() {
            if (g.degree as usize) <= cutoff {
                out[g.degree as usize].push(i);
            }
        }
        out
    }
}

impl fmt::Display for DGLAPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}:{}", g.label, g.degree))
            .collect();
        write!(f, "L<{}> over Z_({})", gens.join(", "), self.ctx.p())
    }
}

/// One violated axiom with the basis tuple witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    fn push(&mut self, axiom: &str, witness: Vec<String>) {
        self.violations.push(Violation {
            axiom: axiom.to_string(),
            witness,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} ({})", v.axiom, v.witness.join(", ")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn is_zero(v: &[PLocal]) -> bool {
    v.iter().all(PLocal::is_zero)
}

/// Checks every axiom of a connected differential graded Lie algebra.
pub fn validate(l: &DGLAPresentation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = l.len();
    let label = |i: usize| l.generators[i].label.clone();
    let deg = |i: usize| l.generators[i].degree;

    let mut seen = BTreeSet::new();
    for (i, g) in l.generators.iter().enumerate() {
        if g.degree == 0 {
            report.push("connected", vec![label(i)]);
        }
        if !seen.insert(g.label.as_str()) {
            report.push("distinct labels", vec![label(i)]);
        }
    }
    for (&(i, j), comb) in &l.bracket {
        for (k, c) in comb {
            if deg(*k) != deg(i) + deg(j) {
                report.push("bracket degree", vec![label(i), label(j)]);
            }
            if !l.ctx.is_local(c) {
                report.push("p-local constants", vec![label(i), label(j)]);
            }
        }
    }
    for (i, comb) in l.differential.iter().enumerate() {
        for (k, c) in comb {
            if deg(*k) + 1 != deg(i) {
                report.push("differential degree", vec![label(i)]);
            }
            if !l.ctx.is_local(c) {
                report.push("p-local constants", vec![label(i)]);
            }
        }
    }
    if !report.is_valid() {
        // the remaining identities need homogeneous, p-local data
        return report;
    }

    let e: Vec<LieElement> = (0..n).map(|i| l.unit_vector(i)).collect();
    for i in 0..n {
        for j in i..n {
            let lhs = l.bracket(&e[i], &e[j]);
            let rhs: LieElement = l
                .bracket(&e[j], &e[i])
                .iter()
                .map(|x| -(x * &sign(deg(i) * deg(j))))
                .collect();
            if lhs != rhs {
                report.push("antisymmetry", vec![label(i), label(j)]);
            }
        }
    }
    for i in 0..n {
        if deg(i) % 2 == 1 {
            let xx = l.bracket(&e[i], &e[i]);
            if !is_zero(&l.bracket(&e[i], &xx)) {
                report.push("odd cube", vec![label(i)]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let yz = l.bracket(&e[i], &e[j]);
            if is_zero(&yz) && (0..n).all(|k| l.bracket_of(j, k).is_empty() && l.bracket_of(k, i).is_empty()) {
                continue;
            }
            for k in 0..n {
                // (−1)^{|x||z|}[x,[y,z]] + (−1)^{|y||x|}[y,[z,x]] + (−1)^{|z||y|}[z,[x,y]]
                let (x, y, z) = (k, i, j);
                let t1 = l.bracket(&e[x], &l.bracket(&e[y], &e[z]));
                let t2 = l.bracket(&e[y], &l.bracket(&e[z], &e[x]));
                let t3 = l.bracket(&e[z], &l.bracket(&e[x], &e[y]));
                let s1 = sign(deg(x) * deg(z));
                let s2 = sign(deg(y) * deg(x));
                let s3 = sign(deg(z) * deg(y));
                let total: LieElement = (0..n)
                    .map(|m| &(&(&t1[m] * &s1) + &(&t2[m] * &s2)) + &(&t3[m] * &s3))
                    .collect();
                if !is_zero(&total) {
                    report.push("jacobi", vec![label(x), label(y), label(z)]);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = l.d(&l.bracket(&e[i], &e[j]));
            let a = l.bracket(&l.d(&e[i]), &e[j]);
            let b = l.bracket(&e[i], &l.d(&e[j]));
            let s = sign(deg(i));
            let rhs: LieElement = a.iter().zip(&b).map(|(a, b)| a + &(b * &s)).collect();
            if lhs != rhs {
                report.push("leibniz", vec![label(i), label(j)]);
            }
        }
    }
    for i in 0..n {
        if !is_zero(&l.d(&l.d(&e[i]))) {
            report.push("d squared", vec![label(i)]);
        }
    }
    report
}

/// Homology of `(L, ∂)` with the bracket induced on its free part.
#[derive(Debug, Clone)]
pub struct LieHomology {
    pub cutoff: usize,
    pub homology: HomologyDecomposition,
    /// The free part presented as a Lie algebra with zero differential.
    pub free_part: DGLAPresentation,
    /// For each free-part generator: `(degree, index within degree)`.
    pub free_index: Vec<(usize, usize)>,
    /// Cycles mapping into boundaries or brackets leaving the cycles, if any.
    pub well_defined: bool,
}

/// Embeds a vector over the degree-`n` part of the complex into a Lie element.
fn embed(l: &DGLAPresentation, by_degree: &[Vec<usize>], n: usize, v: &[PLocal]) -> LieElement {
    let mut out = vec![PLocal::zero(); l.len()];
    for (pos, &g) in by_degree[n].iter().enumerate() {
        out[g] = v[pos].clone();
    }
    out
}

fn restrict(by_degree: &[Vec<usize>], n: usize, x: &[PLocal]) -> Vec<PLocal> {
    by_degree[n].iter().map(|&g| x[g].clone()).collect()
}

pub fn lie_homology(l: &DGLAPresentation, cutoff: usize) -> Result<LieHomology, DglaError> {
    let report = validate(l);
    if !report.is_valid() {
        return Err(DglaError::InvalidPresentation(report));
    }
    let ctx = *l.ctx();
    let complex = l.chain_complex(cutoff);
    let homology = HomologyDecomposition::compute(&ctx, &complex);
    let by_degree = l.generators_by_degree(cutoff);

    let mut free_index = Vec::new();
    let mut gens = Vec::new();
    for h in &homology.degrees {
        for i in 0..h.free_rank {
            free_index.push((h.degree, i));
            gens.push(Generator::new(format!("h{}_{}", h.degree, i), h.degree as u32));
        }
    }
    let reps: Vec<LieElement> = free_index
        .iter()
        .map(|&(n, i)| embed(l, &by_degree, n, &homology.degrees[n].free_reps.column(i)))
        .collect();

    let mut well_defined = true;
    let mut bracket = BTreeMap::new();
    let trusted = homology.degrees.len();
    for (a, &(na, _)) in free_index.iter().enumerate() {
        for (b, &(nb, _)) in free_index.iter().enumerate() {
            let n = na + nb;
            if n >= trusted {
                continue;
            }
            let w = l.bracket(&reps[a], &reps[b]);
            if !is_zero(&l.d(&w)) {
                well_defined = false;
            }
            let coords = homology.degrees[n].free_coordinates(&restrict(&by_degree, n, &w));
            let comb: Combination = coords
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    let target = free_index.iter().position(|&t| t == (n, k)).expect("indexed");
                    (target, c)
                })
                .collect();
            if !comb.is_empty() {
                bracket.insert((a, b), comb);
            }
        }
    }
    // [cycle, boundary] must be a boundary
    for (a, &(na, _)) in free_index.iter().enumerate() {
        for m in 0..trusted {
            let n = na + m;
            if n >= trusted {
                continue;
            }
            let inc = complex.incoming(m);
            for col in inc.columns() {
                let bdry = embed(l, &by_degree, m, &col);
                let w = l.bracket(&reps[a], &bdry);
                if !homology.degrees[n].is_boundary(&ctx, &restrict(&by_degree, n, &w)) {
                    well_defined = false;
                }
            }
        }
    }
    let k = gens.len();
    let free_part = DGLAPresentation::new(ctx, gens, bracket, vec![Vec::new(); k]);
    Ok(LieHomology {
        cutoff,
        homology,
        free_part,
        free_index,
        well_defined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin_family, FamilyParams};

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn example_is_valid() {
        let l = builtin_family("example_z3", &FamilyParams::default()).unwrap();
        assert!(validate(&l).is_valid(), "{}", validate(&l));
    }

    #[test]
    fn abelian_is_valid() {
        let l = builtin_family(
            "abelian",
            &FamilyParams {
                degrees: vec![3, 5],
                ..Default::default()
            },
        )
        .unwrap();
        assert!(validate(&l).is_valid());
        assert!(l.bracket_table().is_empty());
    }

    #[test]
    fn non_additive_bracket_degree_is_reported() {
        // [a,b]=c, [b,c]=a, [c,a]=b on even generators of degrees 2, 4, 8
        let gens = vec![Generator::new("a", 2), Generator::new("b", 4), Generator::new("c", 8)];
        let one = PLocal::one();
        let mut br = BTreeMap::new();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            br.insert((i, j), vec![(k, one.clone())]);
            br.insert((j, i), vec![(k, -one.clone())]);
        }
        let l = DGLAPresentation::new(ctx(3), gens, br, vec![vec![]; 3]);
        let r = validate(&l);
        assert_eq!(r.violations[0].axiom, "bracket degree");
        assert_eq!(r.violations[0].witness, ["a", "b"]);
        assert!(r.violations.iter().all(|v| v.axiom == "bracket degree"));
    }

    #[test]
    fn odd_cube_and_antisymmetry() {
        let gens = vec![Generator::new("x", 1), Generator::new("y", 2), Generator::new("z", 3)];
        let one = PLocal::one();
        // [x,x] = y, [x,y] = z, [y,x] = -z ... then [x,[x,x]] = z ≠ 0
        let mut br = BTreeMap::new();
        br.insert((0, 0), vec![(1, one.clone())]);
        br.insert((0, 1), vec![(2, one.clone())]);
        br.insert((1, 0), vec![(2, -one.clone())]);
        let l = DGLAPresentation::new(ctx(5), gens.clone(), br.clone(), vec![vec![]; 3]);
        let r = validate(&l);
        assert!(r.has("odd cube"));
        // even self-bracket violates antisymmetry
        let mut br2 = BTreeMap::new();
        br2.insert((1, 1), vec![(2, one.clone())]);
        let gens2 = vec![Generator::new("x", 1), Generator::new("y", 2), Generator::new("w", 4)];
        let l2 = DGLAPresentation::new(ctx(5), gens2, br2, vec![vec![]; 3]);
        assert!(validate(&l2).has("antisymmetry"));
    }

    #[test]
    fn leibniz_and_d_squared() {
        let l = builtin_family("example_z3", &FamilyParams::default()).unwrap();
        let x1 = l.index_of("x1").unwrap();
        let y2 = l.index_of("y2").unwrap();
        let x3 = l.index_of("x3").unwrap();
        // [x1,x1] = y2 breaks Leibniz since ∂y2 = 3x1
        let bad = l.with_bracket_constant(x1, x1, y2, PLocal::one());
        assert!(validate(&bad).has("leibniz"));
        // ∂x3 = y2 breaks ∂∘∂ = 0
        let bad = l.with_differential_constant(x3, y2, PLocal::one());
        assert!(validate(&bad).has("d squared"));
    }

    #[test]
    fn example_lie_homology() {
        let l = builtin_family("example_z3", &FamilyParams::default()).unwrap();
        let h = lie_homology(&l, 12).unwrap();
        let d = &h.homology.degrees;
        assert_eq!(d[1].free_rank, 0);
        assert_eq!(d[1].torsion_orders, vec![1]);
        assert_eq!(d[3].free_rank, 1);
        assert!(d[3].torsion_orders.is_empty());
        assert_eq!(d[5].free_rank, 1);
        assert_eq!(d[2].free_rank, 0);
        assert_eq!(h.free_index, vec![(3, 0), (5, 0)]);
        // FH(L) is abelian on [x3], [x5]
        assert!(h.free_part.bracket_table().is_empty());
        assert!(h.well_defined);
        assert!(validate(&h.free_part).is_valid());
    }

    #[test]
    fn zero_differential_homology_is_l() {
        let l = builtin_family(
            "abelian",
            &FamilyParams {
                degrees: vec![1, 2, 2, 4],
                ..Default::default()
            },
        )
        .unwrap();
        let h = lie_homology(&l, 6).unwrap();
        assert_eq!(h.homology.free_ranks(), vec![0, 1, 2, 0, 1, 0]);
    }

    #[test]
    fn invalid_presentation_is_rejected() {
        let gens = vec![Generator::new("a", 2), Generator::new("b", 2)];
        let mut br = BTreeMap::new();
        br.insert((0, 1), vec![(0, PLocal::one())]);
        let l = DGLAPresentation::new(ctx(3), gens, br, vec![vec![]; 2]);
        assert!(matches!(lie_homology(&l, 4), Err(DglaError::InvalidPresentation(_))));
    }
}
