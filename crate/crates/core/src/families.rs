//! Built-in Lie algebra families used by the tests and the CLI.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgla::{validate, Combination, DGLAPresentation, DglaError, Generator};
use crate::linalg::snf::{column_span_basis, rational_rank, solve};
use crate::linalg::Matrix;
use crate::scalar::{PLocal, PrimeContext};

pub const FAMILIES: [&str; 4] = ["example_z3", "abelian", "bott_samelson_shadow", "random_nilpotent"];

const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyParams {
    pub prime: Option<u64>,
    /// Generator degrees for `abelian`.
    pub degrees: Vec<u32>,
    pub seed: u64,
    /// Generator count for `random_nilpotent`.
    pub gens: Option<usize>,
    /// Degree bound for `bott_samelson_shadow`.
    pub cutoff: Option<usize>,
}

pub fn builtin_family(name: &str, params: &FamilyParams) -> Result<DGLAPresentation, DglaError> {
    let prime = |default: u64| {
        PrimeContext::new(params.prime.unwrap_or(default))
            .map_err(|e| DglaError::InvalidParams(e.to_string()))
    };
    match name {
        "example_z3" => {
            if params.prime.is_some_and(|p| p != 3) {
                return Err(DglaError::InvalidParams("example_z3 is defined over p = 3".into()));
            }
            Ok(example_z3())
        }
        "abelian" => {
            let degrees = if params.degrees.is_empty() { vec![3, 5] } else { params.degrees.clone() };
            abelian(prime(3)?, &degrees)
        }
        "bott_samelson_shadow" => bott_samelson_shadow(prime(3)?, params.cutoff.unwrap_or(12)),
        "random_nilpotent" => random_nilpotent(prime(3)?, params.seed, params.gens.unwrap_or(4)),
        other => Err(DglaError::UnknownFamily(other.to_string())),
    }
}

/// `x1, y2, x3, x5` over `Z_(3)` with `∂y2 = 3x1`, `[y2,x1] = x3`, `[y2,x3] = x5`.
pub fn example_z3() -> DGLAPresentation {
    let ctx = PrimeContext::new(3).expect("3 is an odd prime");
    let gens = vec![
        Generator::new("x1", 1),
        Generator::new("y2", 2),
        Generator::new("x3", 3),
        Generator::new("x5", 5),
    ];
    let one = PLocal::one();
    let mut bracket = BTreeMap::new();
    bracket.insert((1, 0), vec![(2, one.clone())]);
    bracket.insert((0, 1), vec![(2, -one.clone())]);
    bracket.insert((1, 2), vec![(3, one.clone())]);
    bracket.insert((2, 1), vec![(3, -one)]);
    let differential = vec![vec![], vec![(0, PLocal::from_int(3))], vec![], vec![]];
    DGLAPresentation::validated(ctx, gens, bracket, differential).expect("example presentation is valid")
}

pub fn abelian(ctx: PrimeContext, degrees: &[u32]) -> Result<DGLAPresentation, DglaError> {
    if degrees.contains(&0) {
        return Err(DglaError::InvalidParams("generator degrees must be positive".into()));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut count: BTreeMap<u32, usize> = BTreeMap::new();
    let gens: Vec<Generator> = sorted
        .iter()
        .map(|&d| {
            let c = count.entry(d).or_default();
            *c += 1;
            let stem = if d % 2 == 1 { "x" } else { "y" };
            if sorted.iter().filter(|&&e| e == d).count() > 1 {
                Generator::new(format!("{stem}{d}_{}", *c), d)
            } else {
                Generator::new(format!("{stem}{d}"), d)
            }
        })
        .collect();
    let n = gens.len();
    DGLAPresentation::validated(ctx, gens, BTreeMap::new(), vec![Vec::new(); n])
}

type Word = Vec<u8>;
type NcPoly = BTreeMap<Word, PLocal>;

fn nc_add(acc: &mut NcPoly, w: Word, c: PLocal) {
    let e = acc.entry(w.clone()).or_default();
    *e += c;
    if e.is_zero() {
        acc.remove(&w);
    }
}

/// Graded commutator in the tensor algebra.
fn nc_commutator(a: &NcPoly, b: &NcPoly, deg_a: u32, deg_b: u32) -> NcPoly {
    let s = if (deg_a * deg_b).is_multiple_of(2) { PLocal::one() } else { -PLocal::one() };
    let mut out = NcPoly::new();
    for (u, x) in a {
        for (v, y) in b {
            let xy = x * y;
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            nc_add(&mut out, uv, xy.clone());
            let mut vu = v.clone();
            vu.extend_from_slice(u);
            nc_add(&mut out, vu, -(&xy * &s));
        }
    }
    out
}

fn words_of_degree(letter_degrees: &[u32], n: u32) -> Vec<Word> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (l, &d) in letter_degrees.iter().enumerate() {
        if d <= n {
            for mut w in words_of_degree(letter_degrees, n - d) {
                w.insert(0, l as u8);
                out.push(w);
            }
        }
    }
    out.sort();
    out
}

/// The free graded Lie algebra on `e3` and `e_{2p+1}`, truncated at `cutoff`.
///
/// Elements live in the tensor algebra; each degree gets a basis of
/// left-normed brackets when those span the `Z_(p)`-lattice, otherwise a
/// lattice basis from the Smith form.
pub fn bott_samelson_shadow(ctx: PrimeContext, cutoff: usize) -> Result<DGLAPresentation, DglaError> {
    if cutoff > 40 {
        return Err(DglaError::InvalidParams(format!("cutoff {cutoff} too large")));
    }
    let top = 2 * ctx.p() as u32 + 1;
    let letters = [3u32, top];
    let mut basis: Vec<(Generator, NcPoly)> = Vec::new();
    let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); cutoff + 1];
    for n in 1..=cutoff as u32 {
        let mut candidates: Vec<(String, NcPoly)> = Vec::new();
        for (l, &d) in letters.iter().enumerate() {
            if d == n {
                let mut poly = NcPoly::new();
                poly.insert(vec![l as u8], PLocal::one());
                candidates.push((format!("e{d}"), poly));
            }
        }
        for (l, &d) in letters.iter().enumerate() {
            if d >= n {
                continue;
            }
            let mut gen = NcPoly::new();
            gen.insert(vec![l as u8], PLocal::one());
            for &b in &by_degree[(n - d) as usize] {
                let (g, poly) = &basis[b];
                let c = nc_commutator(&gen, poly, d, g.degree);
                if !c.is_empty() {
                    candidates.push((format!("e{d}.{}", g.label), c));
                }
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let words = words_of_degree(&letters, n);
        let coords = |poly: &NcPoly| -> Vec<PLocal> {
            words.iter().map(|w| poly.get(w).cloned().unwrap_or_default()).collect()
        };
        let all = Matrix::from_columns(words.len(), &candidates.iter().map(|(_, c)| coords(c)).collect::<Vec<_>>());
        let mut chosen: Vec<usize> = Vec::new();
        for j in 0..candidates.len() {
            let mut trial = chosen.clone();
            trial.push(j);
            if rational_rank(&all.select_columns(trial.iter().copied())) == trial.len() {
                chosen = trial;
            }
        }
        let chosen_m = all.select_columns(chosen.iter().copied());
        let spans = (0..candidates.len()).all(|j| solve(&ctx, &chosen_m, &all.column(j)).is_some());
        if spans {
            for j in chosen {
                by_degree[n as usize].push(basis.len());
                let (label, poly) = candidates[j].clone();
                basis.push((Generator::new(label, n), poly));
            }
        } else {
            let lattice = column_span_basis(&ctx, &all);
            for (k, col) in lattice.columns().into_iter().enumerate() {
                let poly: NcPoly = words
                    .iter()
                    .zip(col)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(w, c)| (w.clone(), c))
                    .collect();
                by_degree[n as usize].push(basis.len());
                basis.push((Generator::new(format!("w{n}_{k}"), n), poly));
            }
        }
    }

    let mut bracket = BTreeMap::new();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let (gi, pi) = &basis[i];
            let (gj, pj) = &basis[j];
            let n = (gi.degree + gj.degree) as usize;
            if n > cutoff || by_degree[n].is_empty() {
                continue;
            }
            let c = nc_commutator(pi, pj, gi.degree, gj.degree);
            if c.is_empty() {
                continue;
            }
            let words = words_of_degree(&letters, n as u32);
            let cols: Vec<Vec<PLocal>> = by_degree[n]
                .iter()
                .map(|&b| words.iter().map(|w| basis[b].1.get(w).cloned().unwrap_or_default()).collect())
                .collect();
            let m = Matrix::from_columns(words.len(), &cols);
            let target: Vec<PLocal> = words.iter().map(|w| c.get(w).cloned().unwrap_or_default()).collect();
            let x = solve(&ctx, &m, &target).expect("free Lie algebra is closed under brackets");
            let comb: Combination = x
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (by_degree[n][k], c))
                .collect();
            bracket.insert((i, j), comb);
        }
    }
    let gens: Vec<Generator> = basis.into_iter().map(|(g, _)| g).collect();
    let k = gens.len();
    DGLAPresentation::validated(ctx, gens, bracket, vec![Vec::new(); k])
}

fn random_constant(rng: &mut ChaCha8Rng, ctx: &PrimeContext, max_exp: u32) -> PLocal {
    let p = ctx.p();
    let unit = PLocal::from_int(rng.random_range(1..p) as i64);
    let unit = if rng.random_bool(0.5) { -unit } else { unit };
    unit * ctx.p_power(rng.random_range(0..=max_exp))
}

/// A seeded random nilpotent DGLA on `gens` generators of distinct degrees,
/// drawn by rejection sampling against the validator.
pub fn random_nilpotent(ctx: PrimeContext, seed: u64, gens: usize) -> Result<DGLAPresentation, DglaError> {
    if gens == 0 || gens > 8 {
        return Err(DglaError::InvalidParams(format!("gens must be in 1..=8, got {gens}")));
    }
    let max_degree = (gens as u32 + 3).max(6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (ctx.p() << 40) ^ ((gens as u64) << 56));
    for _ in 0..MAX_ATTEMPTS {
        let mut pool: Vec<u32> = (1..=max_degree).collect();
        let mut degrees = Vec::with_capacity(gens);
        for _ in 0..gens {
            let k = rng.random_range(0..pool.len());
            degrees.push(pool.swap_remove(k));
        }
        degrees.sort_unstable();
        let index_of = |d: u32| degrees.iter().position(|&e| e == d);
        let generators: Vec<Generator> = degrees
            .iter()
            .map(|&d| Generator::new(format!("{}{d}", if d % 2 == 1 { "x" } else { "y" }), d))
            .collect();
        let mut bracket: BTreeMap<(usize, usize), Combination> = BTreeMap::new();
        for i in 0..gens {
            for j in i..gens {
                let (di, dj) = (degrees[i], degrees[j]);
                if i == j && di % 2 == 0 {
                    continue;
                }
                let Some(k) = index_of(di + dj) else { continue };
                if !rng.random_bool(0.5) {
                    continue;
                }
                let c = random_constant(&mut rng, &ctx, 1);
                let twist = if (di * dj) % 2 == 0 { -c.clone() } else { c.clone() };
                bracket.insert((i, j), vec![(k, c)]);
                if i != j {
                    bracket.insert((j, i), vec![(k, twist)]);
                }
            }
        }
        let mut differential: Vec<Combination> = vec![Vec::new(); gens];
        for (i, d) in differential.iter_mut().enumerate() {
            let Some(k) = index_of(degrees[i].wrapping_sub(1)) else { continue };
            if rng.random_bool(0.5) {
                d.push((k, random_constant(&mut rng, &ctx, 2)));
            }
        }
        let l = DGLAPresentation::new(ctx, generators, bracket, differential);
        if validate(&l).is_valid() {
            return Ok(l);
        }
    }
    Err(DglaError::InvalidParams(format!(
        "no valid presentation found for seed {seed} within {MAX_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_family() {
        assert!(matches!(
            builtin_family("nope", &FamilyParams::default()),
            Err(DglaError::UnknownFamily(_))
        ));
        assert!(matches!(
            builtin_family("example_z3", &FamilyParams { prime: Some(5), ..Default::default() }),
            Err(DglaError::InvalidParams(_))
        ));
        assert!(matches!(
            builtin_family("abelian", &FamilyParams { prime: Some(2), ..Default::default() }),
            Err(DglaError::InvalidParams(_))
        ));
    }

    #[test]
    fn random_nilpotent_is_reproducible_and_valid() {
        for seed in 0..30 {
            for p in [3, 5] {
                let params = FamilyParams { prime: Some(p), seed, gens: Some(4), ..Default::default() };
                let a = builtin_family("random_nilpotent", &params).unwrap();
                let b = builtin_family("random_nilpotent", &params).unwrap();
                assert_eq!(a, b);
                assert!(validate(&a).is_valid());
            }
        }
    }

    #[test]
    fn random_nilpotent_is_not_always_trivial() {
        let nontrivial = (0..40)
            .filter(|&seed| {
                let l = random_nilpotent(PrimeContext::new(3).unwrap(), seed, 4).unwrap();
                !l.bracket_table().is_empty() && l.differential_table().iter().any(|d| !d.is_empty())
            })
            .count();
        assert!(nontrivial > 0);
    }

    #[test]
    fn free_lie_ranks_match_witt_formula() {
        // ranks of the free Lie algebra on two odd generators of degrees 3 and 7 (p = 3)
        let l = bott_samelson_shadow(PrimeContext::new(3).unwrap(), 20).unwrap();
        let mut ranks = [0usize; 21];
        for g in l.generators() {
            ranks[g.degree as usize] += 1;
        }
        // T(e3, e7) has Hilbert series 1/(1 - t^3 - t^7); UL = T forces the Lie ranks
        // through Π(1+t^odd)/Π(1-t^even) = 1/(1 - t^3 - t^7).
        let mut t = vec![0i64; 21];
        t[0] = 1;
        for n in 1..=20 {
            t[n] = if n >= 3 { t[n - 3] } else { 0 } + if n >= 7 { t[n - 7] } else { 0 };
        }
        let mut pbw = vec![0i64; 21];
        pbw[0] = 1;
        for (d, &r) in ranks.iter().enumerate().skip(1) {
            for _ in 0..r {
                if d % 2 == 1 {
                    for n in (d..=20).rev() {
                        pbw[n] += pbw[n - d];
                    }
                } else {
                    for n in d..=20 {
                        pbw[n] += pbw[n - d];
                    }
                }
            }
        }
        assert_eq!(pbw, t);
        assert_eq!(ranks[3], 1);
        assert_eq!(ranks[6], 1);
        assert_eq!(ranks[7], 1);
        assert_eq!(l.generators()[0].label, "e3");
    }
}
