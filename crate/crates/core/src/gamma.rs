//! The dual `(UL)^♯` as a commutative differential Hopf algebra with divided powers.

use serde::Serialize;
use thiserror::Error;

use crate::bockstein::{bockstein, gamma_page_structure, GammaOps};
use crate::dgla::{DGLAPresentation, LieElement};
use crate::hopf::{HopfDegreewise, TensorVector};
use crate::linalg::snf::{smith_normal_form, Snf};
use crate::linalg::{ChainComplexFT, Matrix};
use crate::pbw::{pbw_series, Element, UEATruncation};
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("γ^{k} of a degree-{degree} element is not p-local")]
    NonIntegralDividedPower { degree: usize, k: u32 },
    #[error("divided powers need positive even degree, got {0}")]
    OddDegree(usize),
    #[error("degree {degree} exceeds cutoff {cutoff}")]
    DegreeOverflow { degree: usize, cutoff: usize },
    #[error("map is not a Lie morphism on generators ({0}, {1})")]
    NotALieMorphism(String, String),
}

/// `(UL)^♯` with product dual to `Δ`, coproduct dual to the product of `UL`,
/// and differential dual to `∂`.
#[derive(Debug, Clone)]
pub struct DualHopf {
    pub hopf: HopfDegreewise,
    /// Cochain complex; `d: G_n → G_{n+1}`.
    pub complex: ChainComplexFT,
}

pub fn dualize(u: &UEATruncation) -> DualHopf {
    let top = u.cutoff();
    let ranks = u.ranks();
    let product = (0..=top)
        .map(|a| (0..=top - a).map(|b| u.diagonal_block(a + b, a).transpose()).collect())
        .collect();
    let coproduct = (0..=top)
        .map(|n| (0..=n).map(|a| u.product_block(a, n - a).transpose()).collect())
        .collect();
    let labels = (0..=top)
        .map(|n| u.basis(n).iter().map(|m| format!("{}^#", u.monomial_label(m))).collect())
        .collect();
    DualHopf {
        hopf: HopfDegreewise::new(*u.ctx(), ranks, labels, product, coproduct),
        complex: u.chain_complex().dual(),
    }
}

fn add_into(acc: &mut [PLocal], x: &[PLocal], c: &PLocal) {
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += b * c;
        }
    }
}

fn is_zero(v: &[PLocal]) -> bool {
    v.iter().all(PLocal::is_zero)
}

fn tensor_is_zero(t: &TensorVector) -> bool {
    t.iter().all(|v| is_zero(v))
}

impl DualHopf {
    pub fn ctx(&self) -> &PrimeContext {
        self.hopf.ctx()
    }

    pub fn cutoff(&self) -> usize {
        self.hopf.top()
    }

    pub fn rank(&self, n: usize) -> usize {
        self.hopf.rank(n)
    }

    pub fn unit(&self) -> Vec<PLocal> {
        vec![PLocal::one()]
    }

    pub fn mul(&self, a: usize, x: &[PLocal], b: usize, y: &[PLocal]) -> Vec<PLocal> {
        self.hopf.mul(a, x, b, y)
    }

    /// `d: G_n → G_{n+1}`; zero at the cutoff.
    pub fn d(&self, n: usize, x: &[PLocal]) -> Vec<PLocal> {
        if n >= self.cutoff() {
            return Vec::new();
        }
        self.complex.block(n).apply(x)
    }

    fn check_degree(&self, degree: usize) -> Result<(), GammaError> {
        if degree > self.cutoff() {
            return Err(GammaError::DegreeOverflow {
                degree,
                cutoff: self.cutoff(),
            });
        }
        Ok(())
    }

    /// `γ^k(f) = f^k / k!`, failing if the quotient is not p-local.
    pub fn divided_power(&self, n: usize, f: &[PLocal], k: u32) -> Result<Vec<PLocal>, GammaError> {
        if n == 0 || n % 2 == 1 {
            return Err(GammaError::OddDegree(n));
        }
        self.check_degree(n * k as usize)?;
        let mut power = self.unit();
        for i in 0..k as usize {
            power = self.mul(i * n, &power, n, f);
        }
        let fact = PrimeContext::factorial(k);
        power
            .iter()
            .map(|x| self.ctx().divide_exact(x, &fact))
            .collect::<Result<_, _>>()
            .map_err(|_| GammaError::NonIntegralDividedPower { degree: n, k })
    }

    /// `γ^k` of an even element of `(G ⊗ G)_n`.
    pub fn tensor_divided_power(&self, n: usize, t: &TensorVector, k: u32) -> Result<TensorVector, GammaError> {
        if n == 0 || n % 2 == 1 {
            return Err(GammaError::OddDegree(n));
        }
        self.check_degree(n * k as usize)?;
        let mut power: TensorVector = vec![vec![PLocal::one()]];
        for i in 0..k as usize {
            power = self.hopf.tensor_mul(i * n, &power, n, t);
        }
        let fact = PrimeContext::factorial(k);
        power
            .iter()
            .map(|v| v.iter().map(|x| self.ctx().divide_exact(x, &fact)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(|_| GammaError::NonIntegralDividedPower { degree: n, k })
    }

    /// The Hopf algebra this one is dual to, recovered by transposing.
    pub fn predual(&self) -> HopfDegreewise {
        let top = self.cutoff();
        let h = &self.hopf;
        let product = (0..=top)
            .map(|a| (0..=top - a).map(|b| h.coproduct[a + b][a].transpose()).collect())
            .collect();
        let coproduct = (0..=top)
            .map(|n| (0..=n).map(|a| h.product[a][n - a].transpose()).collect())
            .collect();
        let labels = h
            .labels
            .iter()
            .map(|l| l.iter().map(|s| s.trim_end_matches("^#").to_string()).collect())
            .collect();
        HopfDegreewise::new(*self.ctx(), h.ranks.clone(), labels, product, coproduct)
    }

    /// `ν(f): G_n → G_{n-m}` for `f ∈ (UL)_m`, with `ν(f)(g) = g(− · f)`.
    pub fn nu(&self, predual: &HopfDegreewise, m: usize, f: &[PLocal], n: usize) -> Matrix {
        if n < m {
            return Matrix::zeros(0, self.rank(n));
        }
        let lower = n - m;
        let cols: Vec<Vec<PLocal>> = (0..self.rank(lower))
            .map(|i| predual.mul(lower, &predual.basis_vector(lower, i), m, f))
            .collect();
        // columns of R_f are images of basis vectors; ν(f) is its transpose
        Matrix::from_columns(self.rank(n), &cols).transpose()
    }
}

impl DualHopf {
    /// `ν(f)` in every degree it can act on, from degree `m` of `f` up to the cutoff.
    pub fn nu_map(&self, m: usize, f: &[PLocal]) -> Vec<Matrix> {
        let predual = self.predual();
        (m..=self.cutoff()).map(|n| self.nu(&predual, m, f, n)).collect()
    }
}

impl GammaOps for DualHopf {
    fn product(&self, a: usize, x: &[PLocal], b: usize, y: &[PLocal]) -> Vec<PLocal> {
        self.mul(a, x, b, y)
    }

    fn divided_power(&self, n: usize, x: &[PLocal], k: u32) -> Option<Vec<PLocal>> {
        DualHopf::divided_power(self, n, x, k).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub holds: bool,
    /// First few witnesses of failure.
    pub witnesses: Vec<String>,
}

impl AxiomCheck {
    fn new(name: &str, failures: Vec<String>) -> Self {
        AxiomCheck {
            name: name.to_string(),
            holds: failures.is_empty(),
            witnesses: failures.into_iter().take(8).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitiveComparison {
    pub n: usize,
    pub rank_p: usize,
    pub rank_p_tilde: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaHopfVerdict {
    pub degree_range: (usize, usize),
    pub checks: Vec<AxiomCheck>,
    pub p_vs_p_tilde: Vec<PrimitiveComparison>,
    /// Divided-power generators of `E_∞` per degree.
    pub gamma_generators: Option<Vec<usize>>,
    pub status: bool,
}

impl GammaHopfVerdict {
    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaCheckOptions {
    /// Degrees in which the per-degree checks run.
    pub degrees: (usize, usize),
    /// Run the full Hopf law check (associativity, coassociativity, compatibility).
    pub hopf_laws: bool,
}

impl GammaCheckOptions {
    pub fn full(a: &DualHopf) -> Self {
        GammaCheckOptions {
            degrees: (0, a.cutoff()),
            hopf_laws: true,
        }
    }
}

/// Decomposables `IA·IA` and `DA` in degree `n`, as columns.
fn decomposables(a: &DualHopf, n: usize) -> Result<(Matrix, Matrix), GammaError> {
    let rank = a.rank(n);
    let mut products = Vec::new();
    for i in 1..n {
        for x in 0..a.rank(i) {
            for y in 0..a.rank(n - i) {
                products.push(a.mul(i, &a.hopf.basis_vector(i, x), n - i, &a.hopf.basis_vector(n - i, y)));
            }
        }
    }
    let mut with_gamma = products.clone();
    for d in (2..n).filter(|d| d % 2 == 0 && n.is_multiple_of(*d)) {
        for x in 0..a.rank(d) {
            with_gamma.push(a.divided_power(d, &a.hopf.basis_vector(d, x), (n / d) as u32)?);
        }
    }
    Ok((Matrix::from_columns(rank, &products), Matrix::from_columns(rank, &with_gamma)))
}

/// Saturated annihilator in `(UL)_n` of the columns of `m ⊂ G_n`.
fn annihilator(ctx: &PrimeContext, m: &Matrix) -> Snf {
    smith_normal_form(ctx, &m.transpose())
}

pub fn check_gamma_hopf(a: &DualHopf) -> GammaHopfVerdict {
    check_gamma_hopf_with(a, GammaCheckOptions::full(a))
}

pub fn check_gamma_hopf_with(a: &DualHopf, options: GammaCheckOptions) -> GammaHopfVerdict {
    let ctx = *a.ctx();
    let top = a.cutoff();
    let (lo, hi) = (options.degrees.0, options.degrees.1.min(top));
    let in_range = |n: usize| n >= lo && n <= hi;
    let basis = |n: usize, i: usize| a.hopf.basis_vector(n, i);
    let predual = a.predual();
    let mut checks = Vec::new();

    // commutativity and the derivation law for d
    let mut comm = Vec::new();
    let mut deriv = Vec::new();
    for i in 0..=top {
        for j in 0..=top - i {
            if !in_range(i + j) {
                continue;
            }
            for x in 0..a.rank(i) {
                for y in 0..a.rank(j) {
                    let (f, g) = (basis(i, x), basis(j, y));
                    let fg = a.mul(i, &f, j, &g);
                    let gf = a.mul(j, &g, i, &f);
                    let s = PLocal::sign((i * j) as u64);
                    if fg.iter().zip(&gf).any(|(p, q)| p != &(q * &s)) {
                        comm.push(format!("({i},{x})·({j},{y})"));
                    }
                    if i + j < top {
                        let lhs = a.d(i + j, &fg);
                        let mut rhs = a.mul(i + 1, &a.d(i, &f), j, &g);
                        add_into(&mut rhs, &a.mul(i, &f, j + 1, &a.d(j, &g)), &PLocal::sign(i as u64));
                        if lhs != rhs {
                            deriv.push(format!("d(({i},{x})·({j},{y}))"));
                        }
                    }
                }
            }
        }
    }
    checks.push(AxiomCheck::new("graded_commutative", comm));
    checks.push(AxiomCheck::new("differential_derivation", deriv));
    if options.hopf_laws {
        checks.push(AxiomCheck::new("hopf_laws", a.hopf.law_violations()));
    }

    // divided powers
    let mut integral = Vec::new();
    let mut product_law = Vec::new();
    let mut power_law = Vec::new();
    let mut gamma_derivation = Vec::new();
    let mut gamma_diagonal = Vec::new();
    for n in (2..=top).step_by(2) {
        for x in 0..a.rank(n) {
            let f = basis(n, x);
            let max_k = (top / n) as u32;
            let mut gammas: Vec<Vec<PLocal>> = Vec::new();
            let mut ok = true;
            for k in 0..=max_k {
                match a.divided_power(n, &f, k) {
                    Ok(g) => gammas.push(g),
                    Err(e) => {
                        if in_range(n * k as usize) {
                            integral.push(format!("{e} (basis {x})"));
                        }
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let fd = a.d(n, &f);
            for k in 1..=max_k as usize {
                if !in_range(n * k) {
                    continue;
                }
                // f^k = k! γ^k
                let mut power = a.unit();
                for i in 0..k {
                    power = a.mul(i * n, &power, n, &f);
                }
                let scaled: Vec<PLocal> = gammas[k].iter().map(|c| c * &PrimeContext::factorial(k as u32)).collect();
                if power != scaled {
                    power_law.push(format!("f^{k} (degree {n}, basis {x})"));
                }
                for j in 1..k {
                    let lhs = a.mul(n * j, &gammas[j], n * (k - j), &gammas[k - j]);
                    let b = PrimeContext::binomial(k as u32, j as u32);
                    let rhs: Vec<PLocal> = gammas[k].iter().map(|c| c * &b).collect();
                    if lhs != rhs {
                        product_law.push(format!("γ^{j}γ^{} (degree {n}, basis {x})", k - j));
                    }
                }
                if n * k < top {
                    let lhs = a.d(n * k, &gammas[k]);
                    let rhs = a.mul(n + 1, &fd, n * (k - 1), &gammas[k - 1]);
                    if lhs != rhs {
                        gamma_derivation.push(format!("dγ^{k} (degree {n}, basis {x})"));
                    }
                }
                let lhs = a.hopf.coproduct_of(n * k, &gammas[k]);
                match a.tensor_divided_power(n, &a.hopf.coproduct_of(n, &f), k as u32) {
                    Ok(rhs) if rhs == lhs => {}
                    Ok(_) => gamma_diagonal.push(format!("Δγ^{k} (degree {n}, basis {x})")),
                    Err(e) => integral.push(format!("{e} in G⊗G (basis {x})")),
                }
            }
        }
    }
    checks.push(AxiomCheck::new("divided_powers_integral", integral));
    checks.push(AxiomCheck::new("gamma_power_law", power_law));
    checks.push(AxiomCheck::new("gamma_product_law", product_law));
    checks.push(AxiomCheck::new("gamma_derivation", gamma_derivation));
    checks.push(AxiomCheck::new("gamma_diagonal", gamma_diagonal));

    // P against P̃, and generation of UL by P
    let mut p_vs_p_tilde = Vec::new();
    let mut p_basis: Vec<Matrix> = vec![Matrix::zeros(a.rank(0), 0)];
    let mut p_failures = Vec::new();
    for n in 1..=top {
        match decomposables(a, n) {
            Ok((ia2, da)) => {
                let p = annihilator(&ctx, &ia2);
                let pt = annihilator(&ctx, &da);
                let (rp, rpt) = (a.rank(n) - p.rank, a.rank(n) - pt.rank);
                if in_range(n) {
                    p_vs_p_tilde.push(PrimitiveComparison {
                        n,
                        rank_p: rp,
                        rank_p_tilde: rpt,
                        equal: rp == rpt,
                    });
                    if rp != rpt {
                        p_failures.push(format!("degree {n}: {rp} vs {rpt}"));
                    }
                }
                p_basis.push(p.kernel_basis());
            }
            Err(e) => {
                p_failures.push(format!("degree {n}: {e}"));
                p_basis.push(Matrix::zeros(a.rank(n), 0));
            }
        }
    }
    checks.push(AxiomCheck::new("p_equals_p_tilde", p_failures));
    let span = predual.generated_subalgebra(&p_basis);
    let surj: Vec<String> = (1..=top)
        .filter(|&n| in_range(n) && smith_normal_form(&ctx, &span[n]).unit_rank() != a.rank(n))
        .map(|n| format!("degree {n}"))
        .collect();
    checks.push(AxiomCheck::new("primitives_generate", surj));
    let mut p_degrees = Vec::new();
    for (n, b) in p_basis.iter().enumerate() {
        p_degrees.extend(std::iter::repeat_n(n as u32, b.cols()));
    }
    let series = pbw_series(&p_degrees, top);
    let ep: Vec<String> = (0..=top)
        .filter(|&n| in_range(n) && series[n] != a.rank(n) as u64)
        .map(|n| format!("degree {n}: {} vs {}", series[n], a.rank(n)))
        .collect();
    checks.push(AxiomCheck::new("euler_poincare", ep));

    // ν
    let (nu_morphism, nu_restriction, nu_iff) = nu_checks(a, &predual, &p_basis, &in_range);
    checks.push(AxiomCheck::new("nu_algebra_morphism", nu_morphism));
    checks.push(AxiomCheck::new("nu_restriction", nu_restriction));
    checks.push(AxiomCheck::new("nu_derivation_iff_primitive", nu_iff));

    // divided-power generators of E_∞
    let ladder = bockstein(&ctx, &a.complex);
    let (gamma_generators, gfree) = match gamma_page_structure(&ladder, a) {
        Ok(g) => (Some(g.ranks), Vec::new()),
        Err(e) => (None, vec![e.to_string()]),
    };
    checks.push(AxiomCheck::new("e_infinity_gamma_free", gfree));

    let status = checks.iter().all(|c| c.holds);
    GammaHopfVerdict {
        degree_range: (lo, hi),
        checks,
        p_vs_p_tilde,
        gamma_generators,
        status,
    }
}

/// Defect of the derivation law for `ν(f)`, stacked over all basis pairs.
fn derivation_defect(a: &DualHopf, predual: &HopfDegreewise, m: usize, f: &[PLocal]) -> Vec<PLocal> {
    let top = a.cutoff();
    let mut out = Vec::new();
    let nus: Vec<Matrix> = (0..=top).map(|n| a.nu(predual, m, f, n)).collect();
    for i in 0..=top {
        for j in 0..=top - i {
            if i + j < m {
                continue;
            }
            let target = i + j - m;
            for x in 0..a.rank(i) {
                for y in 0..a.rank(j) {
                    let (g, h) = (a.hopf.basis_vector(i, x), a.hopf.basis_vector(j, y));
                    let mut defect = nus[i + j].apply(&a.mul(i, &g, j, &h));
                    if i >= m {
                        let t = a.mul(i - m, &nus[i].apply(&g), j, &h);
                        add_into(&mut defect, &t, &-PLocal::sign((m * j) as u64));
                    }
                    if j >= m {
                        let t = a.mul(i, &g, j - m, &nus[j].apply(&h));
                        add_into(&mut defect, &t, &-PLocal::one());
                    }
                    debug_assert_eq!(defect.len(), a.rank(target));
                    out.extend(defect);
                }
            }
        }
    }
    out
}

fn nu_checks(
    a: &DualHopf,
    predual: &HopfDegreewise,
    p_basis: &[Matrix],
    in_range: &dyn Fn(usize) -> bool,
) -> (Vec<String>, Vec<String>, Vec<String>) {
    let ctx = *a.ctx();
    let top = a.cutoff();
    let mut morphism = Vec::new();
    let mut restriction = Vec::new();
    let mut iff = Vec::new();
    // ν(f·g) = ν(f)∘ν(g) on basis pairs, and ν(1) = id
    for n in 0..=top {
        let id = a.nu(predual, 0, &[PLocal::one()], n);
        if id != Matrix::identity(a.rank(n)) {
            morphism.push(format!("ν(1) in degree {n}"));
        }
    }
    for i in 1..=top {
        for j in 1..=top - i {
            if !in_range(i + j) {
                continue;
            }
            for x in 0..a.rank(i) {
                for y in 0..a.rank(j) {
                    let (f, g) = (predual.basis_vector(i, x), predual.basis_vector(j, y));
                    let fg = predual.mul(i, &f, j, &g);
                    for n in i + j..=top {
                        let lhs = a.nu(predual, i + j, &fg, n);
                        let rhs = a.nu(predual, i, &f, n - j).mul(&a.nu(predual, j, &g, n));
                        if lhs != rhs {
                            morphism.push(format!("ν(({i},{x})·({j},{y})) on degree {n}"));
                        }
                    }
                }
            }
        }
    }
    for m in 1..=top {
        if !in_range(m) {
            continue;
        }
        for x in 0..a.rank(m) {
            let f = predual.basis_vector(m, x);
            let nu = a.nu(predual, m, &f, m);
            // ν(f)(g) = ⟨g, f⟩ · 1
            if nu.rows() != 1 || nu.row(0) != f {
                restriction.push(format!("degree {m}, basis {x}"));
            }
        }
        // kernel of the defect map equals P_m
        let defects: Vec<Vec<PLocal>> = (0..a.rank(m))
            .map(|x| derivation_defect(a, predual, m, &predual.basis_vector(m, x)))
            .collect();
        let rows = defects.first().map_or(0, Vec::len);
        let der_kernel = smith_normal_form(&ctx, &Matrix::from_columns(rows, &defects));
        let der_rank = a.rank(m) - der_kernel.rank;
        let p = &p_basis[m];
        if der_rank != p.cols() {
            iff.push(format!("degree {m}: derivations {der_rank}, primitives {}", p.cols()));
        }
        for col in p.columns() {
            if !is_zero(&derivation_defect(a, predual, m, &col)) {
                iff.push(format!("degree {m}: primitive with non-derivation ν"));
            }
        }
        // Γ-derivation: ν(f)(γ^k g) = ν(f)(g)·γ^{k-1}(g)
        for col in p.columns() {
            for d in (2..=top).step_by(2) {
                for y in 0..a.rank(d) {
                    let g = a.hopf.basis_vector(d, y);
                    for k in 2..=(top / d) as u32 {
                        let (Ok(gk), Ok(gk1)) = (a.divided_power(d, &g, k), a.divided_power(d, &g, k - 1)) else {
                            continue;
                        };
                        let total = d * k as usize;
                        if total < m || d < m {
                            continue;
                        }
                        let lhs = a.nu(predual, m, &col, total).apply(&gk);
                        let nu_g = a.nu(predual, m, &col, d).apply(&g);
                        let rhs = a.mul(d - m, &nu_g, d * (k as usize - 1), &gk1);
                        if lhs != rhs {
                            iff.push(format!("degree {m}: ν not a Γ-derivation on γ^{k}"));
                        }
                    }
                }
            }
        }
    }
    (morphism, restriction, iff)
}

/// Matrix of `Uφ: (UL)_n → (UL')_n` for a map given on Lie generators.
fn enveloping_map(source: &UEATruncation, target: &UEATruncation, images: &[LieElement], n: usize) -> Matrix {
    let cols: Vec<Vec<PLocal>> = source
        .basis(n)
        .iter()
        .map(|m| {
            let mut acc: Element = target.unit();
            for &g in m {
                let img = target.from_lie(&images[source.lie_generator(g)]);
                acc = target.mul(&acc, &img).expect("degree preserved");
            }
            target.coordinates(n, &acc)
        })
        .collect();
    Matrix::from_columns(target.rank(n), &cols)
}

/// Checks that the dual of the map induced by a Lie morphism `φ: L → L'`
/// commutes with divided powers; `images[i]` is `φ` of generator `i` of `L`.
pub fn lie_morphism_gamma_check(
    source: &DGLAPresentation,
    target: &DGLAPresentation,
    images: &[LieElement],
    cutoff: usize,
) -> Result<Vec<String>, GammaError> {
    for i in 0..source.len() {
        for j in 0..source.len() {
            let lhs: LieElement = {
                let b = source.bracket(&source.unit_vector(i), &source.unit_vector(j));
                let mut out = vec![PLocal::zero(); target.len()];
                for (k, c) in b.iter().enumerate() {
                    add_into(&mut out, &images[k], c);
                }
                out
            };
            if lhs != target.bracket(&images[i], &images[j]) {
                return Err(GammaError::NotALieMorphism(
                    source.generators()[i].label.clone(),
                    source.generators()[j].label.clone(),
                ));
            }
        }
    }
    for i in 0..source.len() {
        let mut lhs = vec![PLocal::zero(); target.len()];
        for (k, c) in source.d(&source.unit_vector(i)).iter().enumerate() {
            add_into(&mut lhs, &images[k], c);
        }
        if lhs != target.d(&images[i]) {
            let label = source.generators()[i].label.clone();
            return Err(GammaError::NotALieMorphism(label, "d".into()));
        }
    }
    let us = UEATruncation::new(source, cutoff).map_err(|_| GammaError::NotALieMorphism(String::new(), String::new()))?;
    let ut = UEATruncation::new(target, cutoff).map_err(|_| GammaError::NotALieMorphism(String::new(), String::new()))?;
    let gs = dualize(&us);
    let gt = dualize(&ut);
    let duals: Vec<Matrix> = (0..=cutoff).map(|n| enveloping_map(&us, &ut, images, n).transpose()).collect();
    let mut failures = Vec::new();
    for n in (2..=cutoff).step_by(2) {
        for x in 0..gt.rank(n) {
            let f = gt.hopf.basis_vector(n, x);
            let pulled = duals[n].apply(&f);
            for k in 2..=(cutoff / n) as u32 {
                let lhs = duals[n * k as usize].apply(&gt.divided_power(n, &f, k)?);
                let rhs = gs.divided_power(n, &pulled, k)?;
                if !tensor_is_zero(&vec![lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect()]) {
                    failures.push(format!("γ^{k} on degree {n}, basis {x}"));
                }
            }
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{abelian, bott_samelson_shadow, example_z3};

    fn dual_of(l: &DGLAPresentation, n: usize) -> DualHopf {
        dualize(&UEATruncation::new(l, n).unwrap())
    }

    #[test]
    fn pairing_and_commutativity() {
        let u = UEATruncation::new(&example_z3(), 8).unwrap();
        let a = dualize(&u);
        // product of duals reads off Δ
        for n in 0..=8 {
            for (c, m) in u.basis(n).iter().enumerate() {
                for ((l, r), coeff) in u.diagonal_monomial(m) {
                    let (i, j) = (u.degree_of(&l), u.degree_of(&r));
                    let fl = a.hopf.basis_vector(i, u.index_of(&l).unwrap());
                    let fr = a.hopf.basis_vector(j, u.index_of(&r).unwrap());
                    assert_eq!(a.mul(i, &fl, j, &fr)[c], coeff);
                }
            }
        }
        let pre = a.predual();
        for i in 0..=8 {
            for j in 0..=8 - i {
                assert_eq!(pre.product[i][j], u.product_block(i, j));
                assert_eq!(pre.coproduct[i + j][i], u.diagonal_block(i + j, i));
            }
        }
        // ν(counit) is the identity
        for (n, m) in a.nu_map(0, &[PLocal::one()]).iter().enumerate() {
            assert_eq!(m, &Matrix::identity(a.rank(n)));
        }
        let v = check_gamma_hopf(&a);
        assert!(v.check("graded_commutative").unwrap().holds);
    }

    #[test]
    fn divided_powers_on_polynomial_dual() {
        let l = abelian(PrimeContext::new(3).unwrap(), &[2]).unwrap();
        let a = dual_of(&l, 8);
        let f1 = a.hopf.basis_vector(2, 0);
        for k in 0..=4u32 {
            let g = a.divided_power(2, &f1, k).unwrap();
            let expected = a.hopf.basis_vector(2 * k as usize, 0);
            assert_eq!(g, expected);
        }
        let g2 = a.divided_power(2, &f1, 2).unwrap();
        let g3 = a.divided_power(2, &f1, 3).unwrap();
        let lhs = a.mul(4, &g2, 2, &f1);
        let rhs: Vec<PLocal> = g3.iter().map(|c| c * &PLocal::from_int(3)).collect();
        assert_eq!(lhs, rhs);
        assert!(matches!(a.divided_power(3, &[], 1), Err(GammaError::OddDegree(3))));
        assert!(matches!(a.divided_power(2, &f1, 5), Err(GammaError::DegreeOverflow { .. })));
        let v = check_gamma_hopf(&a);
        assert!(v.status, "{:?}", v.failed());
        assert_eq!(v.gamma_generators.as_ref().unwrap()[2], 1);
        assert_eq!(v.gamma_generators.as_ref().unwrap().iter().sum::<usize>(), 1);
    }

    #[test]
    fn example_passes() {
        let a = dual_of(&example_z3(), 10);
        let v = check_gamma_hopf(&a);
        assert!(v.status, "{:?}", v.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        let gens = v.gamma_generators.unwrap();
        let nonzero: Vec<(usize, usize)> = gens.iter().enumerate().filter(|(_, &r)| r > 0).map(|(n, &r)| (n, r)).collect();
        assert_eq!(nonzero, vec![(3, 1), (5, 1)]);
        assert!(v.p_vs_p_tilde.iter().all(|c| c.equal));
    }

    #[test]
    fn nu_counit_and_non_primitive() {
        let a = dual_of(&example_z3(), 6);
        let pre = a.predual();
        for n in 0..=6 {
            assert_eq!(a.nu(&pre, 0, &[PLocal::one()], n), Matrix::identity(a.rank(n)));
        }
        // y2^2 is not primitive, so ν(y2^2) is not a derivation
        let u = UEATruncation::new(&example_z3(), 6).unwrap();
        let y2 = u.pbw_generator_by_label("y2").unwrap();
        let f = pre.basis_vector(4, u.index_of(&[y2, y2]).unwrap());
        let defect = derivation_defect(&a, &pre, 4, &f);
        assert!(!is_zero(&defect));
        // x3 is primitive
        let x3 = u.pbw_generator_by_label("x3").unwrap();
        let x1 = u.pbw_generator_by_label("x1").unwrap();
        let i = u.index_of(&[x3]).unwrap();
        assert!(u.index_of(&[x1, y2]).is_some());
        assert!(is_zero(&derivation_defect(&a, &pre, 3, &pre.basis_vector(3, i))));
    }

    #[test]
    fn corrupted_diagonal_is_caught() {
        let mut a = dual_of(&example_z3(), 8);
        // Δ(x1y2) loses its x1⊗y2 term
        let entry = a.hopf.product[1][2].get(0, 0).clone();
        assert!(!entry.is_zero());
        a.hopf.product[1][2].set(0, 0, PLocal::zero());
        let v = check_gamma_hopf(&a);
        assert!(!v.status);
        assert!(!v.failed().is_empty());
    }

    #[test]
    fn lie_morphisms_commute_with_divided_powers() {
        let ctx = PrimeContext::new(3).unwrap();
        let free = bott_samelson_shadow(ctx, 10).unwrap();
        let ab = abelian(ctx, &[3, 7]).unwrap();
        // abelianization e3 -> x3, e7 -> x7, brackets -> 0
        let images: Vec<LieElement> = free
            .generators()
            .iter()
            .map(|g| match g.label.as_str() {
                "e3" => ab.unit_vector(0),
                "e7" => ab.unit_vector(1),
                _ => vec![PLocal::zero(); 2],
            })
            .collect();
        assert!(lie_morphism_gamma_check(&free, &ab, &images, 10).unwrap().is_empty());
        // the bad "map" sending [e3,e3] to something nonzero is rejected
        let mut bad = images.clone();
        let six = free.generators().iter().position(|g| g.degree == 6).unwrap();
        bad[six] = vec![PLocal::one(), PLocal::zero()];
        assert!(lie_morphism_gamma_check(&free, &ab, &bad, 10).is_err());

        // x3, x5 include into the example
        let z3 = example_z3();
        let sub = abelian(ctx, &[3, 5]).unwrap();
        let inc = vec![z3.unit_vector(z3.index_of("x3").unwrap()), z3.unit_vector(z3.index_of("x5").unwrap())];
        assert!(lie_morphism_gamma_check(&sub, &z3, &inc, 10).unwrap().is_empty());
        let id: Vec<LieElement> = (0..z3.len()).map(|i| z3.unit_vector(i)).collect();
        assert!(lie_morphism_gamma_check(&z3, &z3, &id, 10).unwrap().is_empty());
        // rescaling by 2^degree respects brackets but not d
        let scaled: Vec<LieElement> = id
            .iter()
            .enumerate()
            .map(|(i, v)| v.iter().map(|c| c * &PLocal::from_int(1 << z3.degree(i))).collect())
            .collect();
        assert!(matches!(
            lie_morphism_gamma_check(&z3, &z3, &scaled, 10),
            Err(GammaError::NotALieMorphism(_, d)) if d == "d"
        ));
    }
}
