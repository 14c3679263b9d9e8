//! The enveloping algebra `UL` truncated at a cutoff, in a PBW basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::RwLock;

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dgla::{validate, DGLAPresentation, LieElement};
use crate::linalg::{ChainComplexFT, GradedMap, GradedBasis, Matrix};
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UeaError {
    #[error("degree {degree} exceeds cutoff {cutoff}")]
    DegreeOverflow { degree: usize, cutoff: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),
}

/// Nondecreasing sequence of PBW generator indices.
pub type Monomial = Vec<u16>;
/// Sparse combination of PBW monomials.
pub type Element = BTreeMap<Monomial, PLocal>;
/// Sparse combination of tensors of PBW monomials.
pub type TensorElement = BTreeMap<(Monomial, Monomial), PLocal>;

type GenCombination = Vec<(u16, PLocal)>;

pub(crate) fn add_term<K: Ord>(acc: &mut BTreeMap<K, PLocal>, k: K, c: PLocal) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn add_scaled<K: Ord + Clone>(acc: &mut BTreeMap<K, PLocal>, x: &BTreeMap<K, PLocal>, c: &PLocal) {
    for (k, v) in x {
        add_term(acc, k.clone(), v * c);
    }
}

/// Truncation of `UL` to degrees `0..=cutoff` with memoized multiplication.
#[derive(Debug)]
pub struct UEATruncation {
    lie: DGLAPresentation,
    cutoff: usize,
    /// PBW index -> generator index in the presentation.
    order: Vec<usize>,
    /// Generator index -> PBW index, for generators within the cutoff.
    pbw_index: Vec<Option<u16>>,
    degrees: Vec<u32>,
    labels: Vec<String>,
    /// `[x_j, x_i]` in PBW indices, keyed `(j, i)`.
    bracket: HashMap<(u16, u16), GenCombination>,
    differential: Vec<GenCombination>,
    basis: Vec<Vec<Monomial>>,
    position: HashMap<Monomial, usize>,
    left_cache: RwLock<HashMap<(u16, Monomial), Element>>,
    product_cache: RwLock<HashMap<(Monomial, Monomial), Element>>,
}

impl UEATruncation {
    pub fn new(lie: &DGLAPresentation, cutoff: usize) -> Result<Self, UeaError> {
        let report = validate(lie);
        if !report.is_valid() {
            return Err(UeaError::InvalidPresentation(report.to_string()));
        }
        let mut order: Vec<usize> = (0..lie.len())
            .filter(|&i| lie.degree(i) as usize <= cutoff)
            .collect();
        order.sort_by(|&a, &b| {
            let (ga, gb) = (&lie.generators()[a], &lie.generators()[b]);
            (ga.degree, &ga.label).cmp(&(gb.degree, &gb.label))
        });
        if order.len() > u16::MAX as usize {
            return Err(UeaError::InvalidPresentation("too many generators".into()));
        }
        let mut pbw_index = vec![None; lie.len()];
        for (k, &g) in order.iter().enumerate() {
            pbw_index[g] = Some(k as u16);
        }
        let degrees: Vec<u32> = order.iter().map(|&g| lie.degree(g)).collect();
        let labels: Vec<String> = order.iter().map(|&g| lie.generators()[g].label.clone()).collect();
        let translate = |comb: &[(usize, PLocal)]| -> GenCombination {
            comb.iter()
                .filter_map(|(k, c)| pbw_index[*k].map(|t| (t, c.clone())))
                .collect()
        };
        let mut bracket = HashMap::new();
        for (&(a, b), comb) in lie.bracket_table() {
            if let (Some(j), Some(i)) = (pbw_index[a], pbw_index[b]) {
                let t = translate(comb);
                if !t.is_empty() {
                    bracket.insert((j, i), t);
                }
            }
        }
        let differential = order.iter().map(|&g| translate(lie.differential_of(g))).collect();
        let basis = enumerate_pbw(&degrees, cutoff);
        let mut position = HashMap::new();
        for level in &basis {
            for (i, m) in level.iter().enumerate() {
                position.insert(m.clone(), i);
            }
        }
        Ok(UEATruncation {
            lie: lie.clone(),
            cutoff,
            order,
            pbw_index,
            degrees,
            labels,
            bracket,
            differential,
            basis,
            position,
            left_cache: RwLock::new(HashMap::new()),
            product_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn lie(&self) -> &DGLAPresentation {
        &self.lie
    }

    pub fn ctx(&self) -> &PrimeContext {
        self.lie.ctx()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn generator_count(&self) -> usize {
        self.order.len()
    }

    pub fn generator_degree(&self, g: u16) -> u32 {
        self.degrees[g as usize]
    }

    pub fn generator_label(&self, g: u16) -> &str {
        &self.labels[g as usize]
    }

    /// Presentation index of a PBW generator.
    pub fn lie_generator(&self, g: u16) -> usize {
        self.order[g as usize]
    }

    /// PBW index of a presentation generator, if it lies within the cutoff.
    pub fn pbw_generator(&self, lie_index: usize) -> Option<u16> {
        self.pbw_index.get(lie_index).copied().flatten()
    }

    pub fn pbw_generator_by_label(&self, label: &str) -> Option<u16> {
        self.lie.index_of(label).and_then(|i| self.pbw_generator(i))
    }

    pub fn basis(&self, n: usize) -> &[Monomial] {
        self.basis.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn rank(&self, n: usize) -> usize {
        self.basis(n).len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn degree_of(&self, m: &[u16]) -> usize {
        m.iter().map(|&g| self.degrees[g as usize] as usize).sum()
    }

    /// Index of a PBW monomial within its degree.
    pub fn index_of(&self, m: &[u16]) -> Option<usize> {
        self.position.get(m).copied()
    }

    pub fn monomial_label(&self, m: &[u16]) -> String {
        if m.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < m.len() {
            let mut j = i;
            while j < m.len() && m[j] == m[i] {
                j += 1;
            }
            out.push_str(&self.labels[m[i] as usize]);
            if j - i > 1 {
                let _ = write!(out, "^{}", j - i);
            }
            i = j;
        }
        out
    }

    pub fn format_element(&self, x: &Element) -> String {
        join_terms(x.iter().map(|(m, c)| (c, self.monomial_label(m))))
    }

    pub fn format_tensor(&self, x: &TensorElement) -> String {
        join_terms(
            x.iter()
                .map(|((a, b), c)| (c, format!("{}⊗{}", self.monomial_label(a), self.monomial_label(b)))),
        )
    }

    fn check_degree(&self, degree: usize) -> Result<(), UeaError> {
        if degree > self.cutoff {
            Err(UeaError::DegreeOverflow {
                degree,
                cutoff: self.cutoff,
            })
        } else {
            Ok(())
        }
    }

    fn element_degree(&self, x: &Element) -> usize {
        x.keys().map(|m| self.degree_of(m)).max().unwrap_or(0)
    }

    pub fn unit(&self) -> Element {
        let mut e = Element::new();
        e.insert(Vec::new(), PLocal::one());
        e
    }

    pub fn generator(&self, g: u16) -> Element {
        let mut e = Element::new();
        e.insert(vec![g], PLocal::one());
        e
    }

    /// Image of a Lie element under `L → UL`; generators above the cutoff are dropped.
    pub fn from_lie(&self, x: &LieElement) -> Element {
        let mut e = Element::new();
        for (i, c) in x.iter().enumerate() {
            if let Some(g) = self.pbw_index[i] {
                add_term(&mut e, vec![g], c.clone());
            }
        }
        e
    }

    /// `x_g · m` for a PBW monomial `m`.
    fn left_mul(&self, g: u16, m: &[u16]) -> Element {
        let Some(&first) = m.first() else {
            let mut e = Element::new();
            e.insert(vec![g], PLocal::one());
            return e;
        };
        let odd = self.degrees[g as usize] % 2 == 1;
        if g < first || (g == first && !odd) {
            let mut w = Vec::with_capacity(m.len() + 1);
            w.push(g);
            w.extend_from_slice(m);
            let mut e = Element::new();
            e.insert(w, PLocal::one());
            return e;
        }
        let key = (g, m.to_vec());
        if let Some(hit) = self.left_cache.read().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let rest = &m[1..];
        let mut out = Element::new();
        if g == first {
            // x x = ½[x, x] for odd x
            if let Some(comb) = self.bracket.get(&(g, g)) {
                let half = PLocal::from_int(2);
                for (k, c) in comb {
                    let t = self.left_mul(*k, rest);
                    add_scaled(&mut out, &t, &self.ctx().divide_exact(c, &half).expect("2 is a unit"));
                }
            }
        } else {
            // x_g x_f = ± x_f x_g + [x_g, x_f]
            let s = PLocal::sign(self.degrees[g as usize] as u64 * self.degrees[first as usize] as u64);
            let inner = self.left_mul(g, rest);
            for (w, c) in &inner {
                let t = self.left_mul(first, w);
                add_scaled(&mut out, &t, &(c * &s));
            }
            if let Some(comb) = self.bracket.get(&(g, first)) {
                for (k, c) in comb {
                    let t = self.left_mul(*k, rest);
                    add_scaled(&mut out, &t, c);
                }
            }
        }
        self.left_cache.write().expect("cache lock").insert(key, out.clone());
        out
    }

    /// Product of two PBW monomials, memoized.
    pub fn mul_monomials(&self, a: &[u16], b: &[u16]) -> Result<Element, UeaError> {
        self.check_degree(self.degree_of(a) + self.degree_of(b))?;
        Ok(self.mul_monomials_unchecked(a, b))
    }

    fn mul_monomials_unchecked(&self, a: &[u16], b: &[u16]) -> Element {
        if a.is_empty() || b.is_empty() {
            let mut e = Element::new();
            let mut w = a.to_vec();
            w.extend_from_slice(b);
            e.insert(w, PLocal::one());
            return e;
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(hit) = self.product_cache.read().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let mut acc = Element::new();
        acc.insert(b.to_vec(), PLocal::one());
        for &g in a.iter().rev() {
            let mut next = Element::new();
            for (w, c) in &acc {
                add_scaled(&mut next, &self.left_mul(g, w), c);
            }
            acc = next;
        }
        self.product_cache.write().expect("cache lock").insert(key, acc.clone());
        acc
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element, UeaError> {
        self.check_degree(self.element_degree(x) + self.element_degree(y))?;
        let mut out = Element::new();
        for (a, c) in x {
            for (b, d) in y {
                add_scaled(&mut out, &self.mul_monomials_unchecked(a, b), &(c * d));
            }
        }
        Ok(out)
    }

    /// Normal form of a word in the generators (PBW indices) times a scalar.
    pub fn normal_form(&self, word: &[u16], coeff: &PLocal) -> Result<Element, UeaError> {
        if let Some(&g) = word.iter().find(|&&g| g as usize >= self.order.len()) {
            return Err(UeaError::UnknownGenerator(g as usize));
        }
        self.check_degree(self.degree_of(word))?;
        let mut acc = self.unit();
        for &g in word.iter().rev() {
            let mut next = Element::new();
            for (w, c) in &acc {
                add_scaled(&mut next, &self.left_mul(g, w), c);
            }
            acc = next;
        }
        Ok(acc.into_iter().map(|(m, c)| (m, c * coeff)).filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Normal form by rewriting a sum of words, with `choose(k)` picking which of
    /// the `k` reducible positions to rewrite next. Independent of the memoized
    /// multiplication; used to test confluence.
    pub fn rewrite_normal_form(
        &self,
        word: &[u16],
        coeff: &PLocal,
        choose: &mut dyn FnMut(usize) -> usize,
    ) -> Result<Element, UeaError> {
        self.check_degree(self.degree_of(word))?;
        let mut pending: BTreeMap<Vec<u16>, PLocal> = BTreeMap::new();
        add_term(&mut pending, word.to_vec(), coeff.clone());
        let mut done = Element::new();
        while let Some((w, c)) = pending.pop_first() {
            let reducible: Vec<usize> = (0..w.len().saturating_sub(1))
                .filter(|&i| {
                    w[i] > w[i + 1] || (w[i] == w[i + 1] && self.degrees[w[i] as usize] % 2 == 1)
                })
                .collect();
            if reducible.is_empty() {
                add_term(&mut done, w, c);
                continue;
            }
            let i = reducible[choose(reducible.len()) % reducible.len()];
            let (j, k) = (w[i], w[i + 1]);
            let splice = |mid: &[u16]| -> Vec<u16> {
                let mut v = w[..i].to_vec();
                v.extend_from_slice(mid);
                v.extend_from_slice(&w[i + 2..]);
                v
            };
            if j == k {
                if let Some(comb) = self.bracket.get(&(j, j)) {
                    let half = PLocal::from_int(2);
                    for (t, b) in comb {
                        let coeff = &(&c * b) * &self.ctx().divide_exact(&PLocal::one(), &half).expect("unit");
                        add_term(&mut pending, splice(&[*t]), coeff);
                    }
                }
            } else {
                let s = PLocal::sign(self.degrees[j as usize] as u64 * self.degrees[k as usize] as u64);
                add_term(&mut pending, splice(&[k, j]), &c * &s);
                if let Some(comb) = self.bracket.get(&(j, k)) {
                    for (t, b) in comb {
                        add_term(&mut pending, splice(&[*t]), &c * b);
                    }
                }
            }
        }
        Ok(done)
    }

    /// Leibniz extension of `∂` to a PBW monomial.
    fn d_monomial(&self, m: &[u16]) -> Element {
        let mut out = Element::new();
        let mut prefix_degree = 0u64;
        for (t, &g) in m.iter().enumerate() {
            let dg = &self.differential[g as usize];
            if !dg.is_empty() {
                let s = PLocal::sign(prefix_degree);
                let prefix = &m[..t];
                let suffix = &m[t + 1..];
                for (k, c) in dg {
                    let left = self.mul_monomials_unchecked(prefix, &[*k]);
                    for (w, x) in &left {
                        add_scaled(&mut out, &self.mul_monomials_unchecked(w, suffix), &(&(x * c) * &s));
                    }
                }
            }
            prefix_degree += self.degrees[g as usize] as u64;
        }
        out
    }

    pub fn differential(&self, x: &Element) -> Result<Element, UeaError> {
        self.check_degree(self.element_degree(x))?;
        let mut out = Element::new();
        for (m, c) in x {
            add_scaled(&mut out, &self.d_monomial(m), c);
        }
        Ok(out)
    }

    /// `Δ` on a PBW monomial: the shuffle sum over sub-sequences with Koszul signs.
    pub fn diagonal_monomial(&self, m: &[u16]) -> TensorElement {
        let k = m.len();
        let mut out = TensorElement::new();
        for mask in 0u64..(1u64 << k) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut exponent = 0u64;
            let mut right_degree = 0u64;
            for (t, &g) in m.iter().enumerate() {
                let d = self.degrees[g as usize] as u64;
                if mask & (1 << t) != 0 {
                    exponent += right_degree * d;
                    left.push(g);
                } else {
                    right_degree += d;
                    right.push(g);
                }
            }
            add_term(&mut out, (left, right), PLocal::sign(exponent));
        }
        out
    }

    pub fn diagonal(&self, x: &Element) -> Result<TensorElement, UeaError> {
        self.check_degree(self.element_degree(x))?;
        let mut out = TensorElement::new();
        for (m, c) in x {
            add_scaled(&mut out, &self.diagonal_monomial(m), c);
        }
        Ok(out)
    }

    /// Product in `UL ⊗ UL`: `(a⊗b)(c⊗d) = (−1)^{|b||c|} ac⊗bd`.
    pub fn tensor_mul(&self, x: &TensorElement, y: &TensorElement) -> Result<TensorElement, UeaError> {
        let deg = |t: &TensorElement| {
            t.keys()
                .map(|(a, b)| self.degree_of(a) + self.degree_of(b))
                .max()
                .unwrap_or(0)
        };
        self.check_degree(deg(x) + deg(y))?;
        let mut out = TensorElement::new();
        for ((a, b), u) in x {
            for ((c, d), v) in y {
                let s = PLocal::sign(self.degree_of(b) as u64 * self.degree_of(c) as u64);
                let coeff = &(u * v) * &s;
                let ac = self.mul_monomials_unchecked(a, c);
                let bd = self.mul_monomials_unchecked(b, d);
                for (l, p) in &ac {
                    for (r, q) in &bd {
                        add_term(&mut out, (l.clone(), r.clone()), &(p * q) * &coeff);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `∂ ⊗ 1 + 1 ⊗ ∂` with the Koszul sign on the second factor.
    pub fn tensor_differential(&self, x: &TensorElement) -> TensorElement {
        let mut out = TensorElement::new();
        for ((a, b), c) in x {
            for (da, u) in &self.d_monomial(a) {
                add_term(&mut out, (da.clone(), b.clone()), u * c);
            }
            let s = PLocal::sign(self.degree_of(a) as u64);
            for (db, u) in &self.d_monomial(b) {
                add_term(&mut out, (a.clone(), db.clone()), &(u * c) * &s);
            }
        }
        out
    }

    /// Coordinates of a homogeneous element of degree `n` in the PBW basis.
    pub fn coordinates(&self, n: usize, x: &Element) -> Vec<PLocal> {
        let mut v = vec![PLocal::zero(); self.rank(n)];
        for (m, c) in x {
            debug_assert_eq!(self.degree_of(m), n);
            v[self.position[m]] += c;
        }
        v
    }

    pub fn element(&self, n: usize, coords: &[PLocal]) -> Element {
        let mut e = Element::new();
        for (m, c) in self.basis(n).iter().zip(coords) {
            add_term(&mut e, m.clone(), c.clone());
        }
        e
    }

    /// Matrix of `∂: UL_n → UL_{n-1}`.
    pub fn differential_block(&self, n: usize) -> Matrix {
        let rows = if n == 0 { 0 } else { self.rank(n - 1) };
        let cols: Vec<Vec<PLocal>> = self
            .basis(n)
            .iter()
            .map(|m| {
                let dm = self.d_monomial(m);
                if n == 0 {
                    Vec::new()
                } else {
                    self.coordinates(n - 1, &dm)
                }
            })
            .collect();
        Matrix::from_columns(rows, &cols)
    }

    /// Multiplication `UL_a ⊗ UL_b → UL_{a+b}`; column `i·rank(b) + j` is `e_i · e_j`.
    pub fn product_block(&self, a: usize, b: usize) -> Matrix {
        let n = a + b;
        assert!(n <= self.cutoff, "product block beyond cutoff");
        let mut cols = Vec::with_capacity(self.rank(a) * self.rank(b));
        for x in self.basis(a) {
            for y in self.basis(b) {
                cols.push(self.coordinates(n, &self.mul_monomials_unchecked(x, y)));
            }
        }
        Matrix::from_columns(self.rank(n), &cols)
    }

    /// Component `UL_n → UL_a ⊗ UL_{n-a}` of `Δ`; row `i·rank(n-a) + j` is `e_i ⊗ e_j`.
    pub fn diagonal_block(&self, n: usize, a: usize) -> Matrix {
        assert!(a <= n);
        let b = n - a;
        let rb = self.rank(b);
        let mut m = Matrix::zeros(self.rank(a) * rb, self.rank(n));
        for (col, mono) in self.basis(n).iter().enumerate() {
            for ((l, r), c) in self.diagonal_monomial(mono) {
                if self.degree_of(&l) == a {
                    let row = self.position[&l] * rb + self.position[&r];
                    *m.get_mut(row, col) += c;
                }
            }
        }
        m
    }

    /// `UL` as a chain complex truncated at the cutoff.
    pub fn chain_complex(&self) -> ChainComplexFT {
        let labels: Vec<Vec<String>> = self
            .basis
            .iter()
            .map(|level| level.iter().map(|m| self.monomial_label(m)).collect())
            .collect();
        let blocks: Vec<Matrix> = (0..=self.cutoff)
            .into_par_iter()
            .map(|n| self.differential_block(n))
            .collect();
        ChainComplexFT::new(self.ctx(), GradedBasis::new(labels), GradedMap { shift: -1, blocks })
            .expect("∂ on UL squares to zero")
    }

    pub fn poincare_series_check(&self) -> PoincareCheck {
        let predicted = pbw_series(&self.degrees, self.cutoff);
        let degrees: Vec<PoincareDegree> = (0..=self.cutoff)
            .map(|n| PoincareDegree {
                degree: n,
                enumerated: self.rank(n) as u64,
                predicted: predicted[n],
            })
            .collect();
        let pass = degrees.iter().all(|d| d.enumerated == d.predicted);
        PoincareCheck { degrees, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincareDegree {
    pub degree: usize,
    pub enumerated: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincareCheck {
    pub degrees: Vec<PoincareDegree>,
    pub pass: bool,
}

/// Coefficients of `Π_{odd}(1 + t^d) · Π_{even}(1 − t^d)^{-1}` up to `t^cutoff`.
/// `9·x1y2^2 + 9·y2x3 - 6·x5`; unit coefficients are left out.
fn join_terms<'a>(terms: impl Iterator<Item = (&'a PLocal, String)>) -> String {
    let mut out = String::new();
    for (i, (c, label)) in terms.enumerate() {
        let negative = c.numer().is_negative();
        let magnitude = if negative { -c.clone() } else { c.clone() };
        out.push_str(match (i, negative) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " + ",
            (_, true) => " - ",
        });
        if magnitude.is_one() {
            out.push_str(&label);
        } else {
            let _ = write!(out, "{magnitude}·{label}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn pbw_series(degrees: &[u32], cutoff: usize) -> Vec<u64> {
    let mut s = vec![0u64; cutoff + 1];
    s[0] = 1;
    for &d in degrees {
        let d = d as usize;
        if d == 0 || d > cutoff {
            continue;
        }
        if d % 2 == 1 {
            for n in (d..=cutoff).rev() {
                s[n] += s[n - d];
            }
        } else {
            for n in d..=cutoff {
                s[n] += s[n - d];
            }
        }
    }
    s
}

/// All PBW monomials by degree, each degree sorted lexicographically.
fn enumerate_pbw(degrees: &[u32], cutoff: usize) -> Vec<Vec<Monomial>> {
    let mut out = vec![Vec::new(); cutoff + 1];
    fn extend(
        degrees: &[u32],
        cutoff: usize,
        start: usize,
        current: &mut Monomial,
        deg: usize,
        out: &mut Vec<Vec<Monomial>>,
    ) {
        out[deg].push(current.clone());
        for g in start..degrees.len() {
            let d = degrees[g] as usize;
            if deg + d > cutoff {
                continue;
            }
            current.push(g as u16);
            let next = if d % 2 == 1 { g + 1 } else { g };
            extend(degrees, cutoff, next, current, deg + d, out);
            current.pop();
        }
    }
    extend(degrees, cutoff, 0, &mut Vec::new(), 0, &mut out);
    for level in &mut out {
        level.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{abelian, bott_samelson_shadow, example_z3};

    fn example(n: usize) -> UEATruncation {
        UEATruncation::new(&example_z3(), n).unwrap()
    }

    fn gens(u: &UEATruncation) -> [u16; 4] {
        ["x1", "y2", "x3", "x5"].map(|l| u.pbw_generator_by_label(l).unwrap())
    }

    fn elt(terms: &[(i64, &[u16])]) -> Element {
        let mut e = Element::new();
        for (c, m) in terms {
            add_term(&mut e, m.to_vec(), PLocal::from_int(*c));
        }
        e
    }

    #[test]
    fn rewriting_examples() {
        let u = example(8);
        let [x1, y2, x3, _] = gens(&u);
        assert_eq!(
            u.normal_form(&[y2, x1], &PLocal::one()).unwrap(),
            elt(&[(1, &[x1, y2]), (1, &[x3])])
        );
        assert!(u.normal_form(&[x1, x1], &PLocal::one()).unwrap().is_empty());
        assert_eq!(u.normal_form(&[], &PLocal::one()).unwrap(), u.unit());
        assert!(matches!(
            u.normal_form(&[y2, y2, y2, y2, y2], &PLocal::one()),
            Err(UeaError::DegreeOverflow { degree: 10, cutoff: 8 })
        ));
    }

    #[test]
    fn differential_of_y2_cubed() {
        let u = example(8);
        let [x1, y2, x3, x5] = gens(&u);
        let y = u.generator(y2);
        assert_eq!(u.differential(&y).unwrap(), elt(&[(3, &[x1])]));
        assert!(u.differential(&u.unit()).unwrap().is_empty());
        let y3 = u.normal_form(&[y2, y2, y2], &PLocal::one()).unwrap();
        let d = u.differential(&y3).unwrap();
        // y2 precedes x3 in the PBW order, so y2x3 is already a basis monomial
        assert_eq!(d, elt(&[(9, &[x1, y2, y2]), (9, &[y2, x3]), (-6, &[x5])]));
        let x3y2 = u.normal_form(&[x3, y2], &PLocal::one()).unwrap();
        assert_eq!(x3y2, elt(&[(1, &[y2, x3]), (-1, &[x5])]));
    }

    #[test]
    fn diagonal_examples() {
        let u = example(8);
        let [x1, y2, _, _] = gens(&u);
        let dx = u.diagonal(&u.generator(x1)).unwrap();
        let mut expected = TensorElement::new();
        expected.insert((vec![x1], vec![]), PLocal::one());
        expected.insert((vec![], vec![x1]), PLocal::one());
        assert_eq!(dx, expected);
        let dy2 = u.diagonal(&elt(&[(1, &[y2, y2])])).unwrap();
        let mut expected = TensorElement::new();
        expected.insert((vec![y2, y2], vec![]), PLocal::one());
        expected.insert((vec![y2], vec![y2]), PLocal::from_int(2));
        expected.insert((vec![], vec![y2, y2]), PLocal::one());
        assert_eq!(dy2, expected);
        let mut unit = TensorElement::new();
        unit.insert((vec![], vec![]), PLocal::one());
        assert_eq!(u.diagonal(&u.unit()).unwrap(), unit);
    }

    #[test]
    fn ranks_match_series() {
        let u = example(12);
        let check = u.poincare_series_check();
        assert!(check.pass);
        assert_eq!(u.rank(2), 1);
        let y = UEATruncation::new(&abelian(PrimeContext::new(5).unwrap(), &[2]).unwrap(), 10).unwrap();
        for k in 0..=5 {
            assert_eq!(y.rank(2 * k), 1);
            if k < 5 {
                assert_eq!(y.rank(2 * k + 1), 0);
            }
        }
        let b = UEATruncation::new(&bott_samelson_shadow(PrimeContext::new(3).unwrap(), 10).unwrap(), 10).unwrap();
        assert!(b.poincare_series_check().pass);
        assert_eq!(b.rank(6), 1);
        // T(e3, e7): 1/(1 - t^3 - t^7)
        assert_eq!(b.ranks(), vec![1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 2]);
    }

    #[test]
    fn associativity_leibniz_and_hopf_laws() {
        let u = example(9);
        let n = u.cutoff();
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    for x in u.basis(a) {
                        for y in u.basis(b) {
                            let xy = u.mul_monomials(x, y).unwrap();
                            for z in u.basis(c) {
                                let zz = elt(&[(1, z)]);
                                let left = u.mul(&xy, &zz).unwrap();
                                let yz = u.mul_monomials(y, z).unwrap();
                                let right = u.mul(&elt(&[(1, x)]), &yz).unwrap();
                                assert_eq!(left, right);
                            }
                        }
                    }
                }
            }
        }
        for a in 0..=n {
            for b in 0..=n - a {
                for x in u.basis(a) {
                    for y in u.basis(b) {
                        let ex = elt(&[(1, x)]);
                        let ey = elt(&[(1, y)]);
                        let xy = u.mul(&ex, &ey).unwrap();
                        // Leibniz
                        let lhs = u.differential(&xy).unwrap();
                        let mut rhs = u.mul(&u.differential(&ex).unwrap(), &ey).unwrap();
                        let s = PLocal::sign(a as u64);
                        add_scaled(&mut rhs, &u.mul(&ex, &u.differential(&ey).unwrap()).unwrap(), &s);
                        assert_eq!(lhs, rhs);
                        // Δ is multiplicative
                        let dxy = u.diagonal(&xy).unwrap();
                        let prod = u.tensor_mul(&u.diagonal(&ex).unwrap(), &u.diagonal(&ey).unwrap()).unwrap();
                        assert_eq!(dxy, prod);
                    }
                }
            }
        }
        for n in 0..=n {
            for x in u.basis(n) {
                let ex = elt(&[(1, x)]);
                // ∂ commutes with Δ
                let lhs = u.diagonal(&u.differential(&ex).unwrap()).unwrap();
                let rhs = u.tensor_differential(&u.diagonal(&ex).unwrap());
                assert_eq!(lhs, rhs);
                // ∂∂ = 0
                assert!(u.differential(&u.differential(&ex).unwrap()).unwrap().is_empty());
                // cocommutative and counital
                let d = u.diagonal_monomial(x);
                let mut twisted = TensorElement::new();
                for ((l, r), c) in &d {
                    let s = PLocal::sign(u.degree_of(l) as u64 * u.degree_of(r) as u64);
                    add_term(&mut twisted, (r.clone(), l.clone()), c * &s);
                }
                assert_eq!(d, twisted);
                assert_eq!(d.get(&(x.clone(), vec![])), Some(&PLocal::one()));
                // coassociativity
                let mut left = BTreeMap::new();
                let mut right = BTreeMap::new();
                for ((l, r), c) in &d {
                    for ((ll, lr), e) in u.diagonal_monomial(l) {
                        add_term(&mut left, (ll, lr, r.clone()), c * &e);
                    }
                    for ((rl, rr), e) in u.diagonal_monomial(r) {
                        add_term(&mut right, (l.clone(), rl, rr), c * &e);
                    }
                }
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn chain_complex_blocks() {
        let u = example(8);
        let c = u.chain_complex();
        assert_eq!(c.rank(2), 1);
        assert_eq!(c.block(2), &Matrix::from_int_rows(&[&[3]]));
    }

    #[test]
    fn invalid_presentation_is_rejected() {
        let l = example_z3();
        let bad = l.with_differential_constant(2, 1, PLocal::one());
        assert!(matches!(UEATruncation::new(&bad, 6), Err(UeaError::InvalidPresentation(_))));
    }

    mod props {
        use super::*;
        use crate::families::random_nilpotent;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_word(u: &UEATruncation, rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<u16> {
            let mut w = Vec::new();
            let mut deg = 0;
            for _ in 0..12 {
                let g = rng.random_range(0..u.generator_count()) as u16;
                let d = u.generator_degree(g) as usize;
                if deg + d <= max_degree {
                    w.push(g);
                    deg += d;
                }
            }
            w
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn rewriting_is_confluent(seed in 0u64..1000, family_seed in 0u64..8) {
                let l = if family_seed == 0 {
                    example_z3()
                } else {
                    random_nilpotent(PrimeContext::new(3).unwrap(), family_seed, 4).unwrap()
                };
                let u = UEATruncation::new(&l, 12).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w = random_word(&u, &mut rng, 12);
                let memo = u.normal_form(&w, &PLocal::one()).unwrap();
                let mut pick = |k: usize| rng.random_range(0..k);
                let rewritten = u.rewrite_normal_form(&w, &PLocal::one(), &mut pick).unwrap();
                prop_assert_eq!(&memo, &rewritten);
                let mut first = |_: usize| 0;
                let leftmost = u.rewrite_normal_form(&w, &PLocal::one(), &mut first).unwrap();
                prop_assert_eq!(&memo, &leftmost);
            }
        }
    }
}
