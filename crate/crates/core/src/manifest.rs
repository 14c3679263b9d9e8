//! Text manifests describing a presentation.
//!
//! ```text
//! # comment
//! prime 3
//! cutoff 10
//! gen x1 1
//! gen y2 2
//! d y2 = 3*x1
//! [y2, x1] = x3
//! ```
//!
//! Sums are `term (('+' | '-') term)*` or `0`, where a term is an optional
//! coefficient `n` or `n/d` followed by `*`, `·` or a space, and a label.
//! A bracket given in one order only is extended by graded antisymmetry.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::dgla::{validate, Combination, DGLAPresentation, Generator, ValidationReport};
use crate::scalar::{PLocal, PrimeContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("presentation violates: {0}")]
    Validation(ValidationReport),
}

impl ManifestError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ManifestError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

/// A linear combination as written: `(coefficient, label)` in order.
pub type Sum = Vec<(PLocal, String)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub prime: u64,
    pub cutoff: Option<usize>,
    pub seed: Option<u64>,
    pub generators: Vec<Generator>,
    pub differentials: Vec<(String, Sum)>,
    pub brackets: Vec<((String, String), Sum)>,
}

fn is_label_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'')
}

/// Character cursor over one line, tracking 1-based columns.
struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> ManifestError {
        ManifestError::at(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn expect(&mut self, c: char) -> Result<(), ManifestError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn label(&mut self) -> Result<(String, usize), ManifestError> {
        self.skip_ws();
        let col = self.column();
        if !self.peek().is_some_and(is_label_start) {
            return Err(self.err("expected a label"));
        }
        let start = self.pos;
        while self.peek().is_some_and(is_label_char) {
            self.pos += 1;
        }
        Ok((self.chars[start..self.pos].iter().collect(), col))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ManifestError> {
        self.skip_ws();
        let col = self.column();
        let w = self.word();
        w.parse().map_err(|_| ManifestError::at(self.line, col, format!("expected {what}, found '{w}'")))
    }

    /// Parses a sum up to the end of the line; labels come with their columns.
    fn sum(&mut self, ctx: &PrimeContext) -> Result<Vec<(PLocal, String, usize)>, ManifestError> {
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            if self.at_end() {
                return Ok(out);
            }
            self.pos = save;
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let mut negative = false;
            match self.peek() {
                Some('+') if !first => self.pos += 1,
                Some('-') => {
                    negative = true;
                    self.pos += 1;
                }
                _ if first => {}
                None => break,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            }
            first = false;
            self.skip_ws();
            let coeff_col = self.column();
            let mut coeff = PLocal::one();
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let num = self.digits();
                let mut text = num;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.err("expected a denominator"));
                    }
                    text = format!("{text}/{den}");
                }
                coeff = ctx
                    .parse(&text)
                    .map_err(|e| ManifestError::at(self.line, coeff_col, e.to_string()))?;
                self.skip_ws();
                if matches!(self.peek(), Some('*') | Some('·')) {
                    self.pos += 1;
                }
            }
            let (label, col) = self.label()?;
            if negative {
                coeff = -coeff;
            }
            out.push((coeff, label, col));
            if self.at_end() {
                break;
            }
        }
        Ok(out)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

/// Parses a manifest and checks it presents a valid DGLA.
pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let m = parse_unvalidated(text)?;
    let report = validate(&m.presentation_unchecked());
    if !report.is_valid() {
        return Err(ManifestError::Validation(report));
    }
    Ok(m)
}

/// Parses without running the axiom checks; labels are still resolved.
pub fn parse_unvalidated(text: &str) -> Result<Manifest, ManifestError> {
    let mut prime = None;
    let mut cutoff = None;
    let mut seed = None;
    let mut generators: Vec<Generator> = Vec::new();
    let mut pending: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        let mut cur = Cursor::new(line, line_no);
        if cur.at_end() {
            continue;
        }
        if cur.peek() == Some('[') {
            pending.push((line_no, line.to_string()));
            continue;
        }
        let col = cur.column();
        let keyword = cur.word();
        match keyword.as_str() {
            "prime" => {
                let p: u64 = cur.number("a prime")?;
                PrimeContext::new(p).map_err(|e| ManifestError::at(line_no, col, e.to_string()))?;
                prime = Some(p);
            }
            "cutoff" => cutoff = Some(cur.number("a cutoff")?),
            "seed" => seed = Some(cur.number("a seed")?),
            "gen" => {
                let (label, lcol) = cur.label()?;
                let degree: u32 = cur.number("a degree")?;
                if generators.iter().any(|g| g.label == label) {
                    return Err(ManifestError::at(line_no, lcol, format!("duplicate generator '{label}'")));
                }
                generators.push(Generator::new(label, degree));
            }
            "d" => {
                pending.push((line_no, line.to_string()));
                continue;
            }
            _ => return Err(ManifestError::at(line_no, col, format!("unknown statement '{keyword}'"))),
        }
        if !cur.at_end() {
            return Err(cur.err("trailing input"));
        }
    }
    let prime = prime.ok_or_else(|| ManifestError::at(1, 1, "missing 'prime' line"))?;
    if generators.is_empty() {
        return Err(ManifestError::at(text.lines().count().max(1), 1, "no generators"));
    }
    let ctx = PrimeContext::new(prime).expect("checked above");
    let known = |label: &str, line: usize, col: usize| {
        if generators.iter().any(|g| g.label == label) {
            Ok(())
        } else {
            Err(ManifestError::at(line, col, format!("unknown label '{label}'")))
        }
    };
    let mut differentials: Vec<(String, Sum)> = Vec::new();
    let mut brackets: Vec<((String, String), Sum)> = Vec::new();
    for (line_no, line) in pending {
        let mut cur = Cursor::new(&line, line_no);
        cur.skip_ws();
        let start_col = cur.column();
        let key = if cur.peek() == Some('[') {
            cur.pos += 1;
            let (a, ca) = cur.label()?;
            known(&a, line_no, ca)?;
            cur.expect(',')?;
            let (b, cb) = cur.label()?;
            known(&b, line_no, cb)?;
            cur.expect(']')?;
            if brackets.iter().any(|(k, _)| k == &(a.clone(), b.clone())) {
                return Err(ManifestError::at(line_no, start_col, format!("bracket [{a}, {b}] given twice")));
            }
            Some((a, b))
        } else {
            cur.word();
            let (a, ca) = cur.label()?;
            known(&a, line_no, ca)?;
            if differentials.iter().any(|(k, _)| k == &a) {
                return Err(ManifestError::at(line_no, ca, format!("differential of '{a}' given twice")));
            }
            differentials.push((a, Vec::new()));
            None
        };
        cur.expect('=')?;
        let terms = cur.sum(&ctx)?;
        let mut sum = Vec::new();
        for (c, label, col) in terms {
            known(&label, line_no, col)?;
            sum.push((c, label));
        }
        match key {
            Some(k) => brackets.push((k, sum)),
            None => differentials.last_mut().expect("pushed above").1 = sum,
        }
    }
    Ok(Manifest {
        prime,
        cutoff,
        seed,
        generators,
        differentials,
        brackets,
    })
}

impl Manifest {
    pub fn ctx(&self) -> PrimeContext {
        PrimeContext::new(self.prime).expect("manifest prime is checked on parse")
    }

    fn combination(&self, l: &[Generator], sum: &Sum) -> Combination {
        sum.iter()
            .map(|(c, label)| (l.iter().position(|g| &g.label == label).expect("labels resolved"), c.clone()))
            .collect()
    }

    /// The presentation, without checking the axioms.
    pub fn presentation_unchecked(&self) -> DGLAPresentation {
        let gens = &self.generators;
        let idx = |label: &str| gens.iter().position(|g| g.label == label).expect("labels resolved");
        let mut bracket: BTreeMap<(usize, usize), Combination> = BTreeMap::new();
        for ((a, b), sum) in &self.brackets {
            bracket.insert((idx(a), idx(b)), self.combination(gens, sum));
        }
        for ((a, b), sum) in &self.brackets {
            let (i, j) = (idx(a), idx(b));
            bracket.entry((j, i)).or_insert_with(|| {
                let s = -PLocal::sign(gens[i].degree as u64 * gens[j].degree as u64);
                
                self.combination(gens, sum).into_iter().map(|(k, c)| (k, c * &s)).collect()
            });
        }
        let mut differential = vec![Vec::new(); gens.len()];
        for (a, sum) in &self.differentials {
            differential[idx(a)] = self.combination(gens, sum);
        }
        DGLAPresentation::new(self.ctx(), gens.clone(), bracket, differential)
    }

    pub fn presentation(&self) -> Result<DGLAPresentation, ManifestError> {
        let l = self.presentation_unchecked();
        let report = validate(&l);
        if report.is_valid() {
            Ok(l)
        } else {
            Err(ManifestError::Validation(report))
        }
    }

    /// Writes a presentation as a manifest, listing every nonzero bracket.
    pub fn from_presentation(l: &DGLAPresentation, cutoff: Option<usize>, seed: Option<u64>) -> Self {
        let label = |k: usize| l.generators()[k].label.clone();
        let sum = |c: &[(usize, PLocal)]| c.iter().map(|(k, x)| (x.clone(), label(*k))).collect::<Sum>();
        Manifest {
            prime: l.ctx().p(),
            cutoff,
            seed,
            generators: l.generators().to_vec(),
            differentials: (0..l.len())
                .filter(|&i| !l.differential_of(i).is_empty())
                .map(|i| (label(i), sum(l.differential_of(i))))
                .collect(),
            brackets: l
                .bracket_table()
                .iter()
                .map(|(&(i, j), c)| ((label(i), label(j)), sum(c)))
                .collect(),
        }
    }
}

fn render_sum(out: &mut String, sum: &Sum) {
    if sum.is_empty() {
        out.push('0');
        return;
    }
    for (i, (c, label)) in sum.iter().enumerate() {
        let negative = c.numer().sign() == num_bigint::Sign::Minus;
        let magnitude = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !magnitude.is_one() {
            let _ = write!(out, "{magnitude}*");
        }
        out.push_str(label);
    }
}

pub fn render(m: &Manifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "prime {}", m.prime);
    if let Some(n) = m.cutoff {
        let _ = writeln!(out, "cutoff {n}");
    }
    if let Some(s) = m.seed {
        let _ = writeln!(out, "seed {s}");
    }
    for g in &m.generators {
        let _ = writeln!(out, "gen {} {}", g.label, g.degree);
    }
    for (a, sum) in &m.differentials {
        let _ = write!(out, "d {a} = ");
        render_sum(&mut out, sum);
        out.push('\n');
    }
    for ((a, b), sum) in &m.brackets {
        let _ = write!(out, "[{a}, {b}] = ");
        render_sum(&mut out, sum);
        out.push('\n');
    }
    out
}
