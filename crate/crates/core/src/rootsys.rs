//! Irreducible reduced finite root systems in their standard realizations.
//!
//! Roots are addressed by index. The first `rank` indices are the simple
//! roots; positive roots follow in order of height, and the negative roots
//! occupy the second half of the table in the same order, so
//! `neg(i) = i ± n_pos`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::lattice::{solve_integer, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteType {
    family: Family,
    rank: usize,
}

impl FiniteType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 3,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(FiniteType { family, rank })
        } else {
            Err(Error::InvalidFiniteType { family: family.letter(), rank })
        }
    }

    pub fn from_parts(letter: char, rank: usize) -> Result<Self> {
        let family =
            Family::from_letter(letter).ok_or(Error::InvalidFiniteType { family: letter, rank })?;
        Self::new(family, rank)
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn rank(self) -> usize {
        self.rank
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
    }

    /// Maximal number of edges between two Dynkin nodes.
    pub fn k(self) -> i64 {
        match self.family {
            Family::A | Family::D | Family::E => 1,
            Family::B | Family::C | Family::F => 2,
            Family::G => 3,
        }
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for FiniteType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        let letter = chars.next().ok_or(Error::InvalidFiniteType { family: '?', rank: 0 })?;
        let rank = chars
            .as_str()
            .parse()
            .map_err(|_| Error::InvalidFiniteType { family: letter, rank: 0 })?;
        Self::from_parts(letter, rank)
    }
}

/// Result of adding two finite roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSum {
    Root(usize),
    Zero,
    None,
}

#[derive(Clone, Debug)]
pub struct FiniteRootSystem {
    ty: FiniteType,
    /// twice the standard coordinates, so everything is integral
    doubled: Vec<Vec<i64>>,
    coeffs: Vec<Vec<i64>>,
    by_coeffs: HashMap<Vec<i64>, usize>,
    long: Vec<bool>,
    n_pos: usize,
    form: Vec<Vec<i64>>,
    pairing: Vec<Vec<i64>>,
    reflect: Vec<Vec<usize>>,
    sum: Vec<Vec<RootSum>>,
}

fn signs(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())
}

fn e8_doubled() -> Vec<Vec<i64>> {
    let mut roots = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for (a, b) in [(2, 2), (2, -2), (-2, 2), (-2, -2)] {
                let mut v = vec![0; 8];
                v[i] = a;
                v[j] = b;
                roots.push(v);
            }
        }
    }
    roots.extend(signs(8).filter(|s| s.iter().filter(|&&x| x < 0).count() % 2 == 0));
    roots
}

fn realization(ty: FiniteType) -> Vec<Vec<i64>> {
    let l = ty.rank;
    let pm_pairs = |n: usize, with_diff: bool, with_sum: bool| {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for (a, b) in [(2, -2), (-2, 2), (2, 2), (-2, -2)] {
                    if (a == b && !with_sum) || (a != b && !with_diff) {
                        continue;
                    }
                    let mut v = vec![0; n];
                    v[i] = a;
                    v[j] = b;
                    out.push(v);
                }
            }
        }
        out
    };
    let units = |n: usize, scale: i64| {
        (0..n).flat_map(move |i| {
            [scale, -scale].map(|s| {
                let mut v = vec![0; n];
                v[i] = s;
                v
            })
        })
    };
    match ty.family {
        Family::A => pm_pairs(l + 1, true, false),
        Family::B => {
            let mut r = pm_pairs(l, true, true);
            r.extend(units(l, 2));
            r
        }
        Family::C => {
            let mut r = pm_pairs(l, true, true);
            r.extend(units(l, 4));
            r
        }
        Family::D => pm_pairs(l, true, true),
        Family::E => {
            let keep: fn(&[i64]) -> bool = match l {
                8 => |_| true,
                7 => |v| v[6] == v[7],
                _ => |v| v[5] == v[6] && v[6] == v[7],
            };
            e8_doubled().into_iter().filter(|v| keep(v)).collect()
        }
        Family::F => {
            let mut r = pm_pairs(4, true, true);
            r.extend(units(4, 2));
            r.extend(signs(4));
            r
        }
        Family::G => {
            let mut r = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        let mut v = vec![0; 3];
                        v[i] = 2;
                        v[j] = -2;
                        r.push(v);
                    }
                }
                for s in [2, -2] {
                    let mut v = vec![-s; 3];
                    v[i] = 2 * s;
                    r.push(v);
                }
            }
            r
        }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lex_desc(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    b.cmp(a)
}

impl FiniteRootSystem {
    pub fn build(ty: FiniteType) -> Self {
        let doubled = realization(ty);
        let dim = doubled[0].len();
        let functional: Vec<i64> = (0..dim).map(|i| 1i64 << (dim - 1 - i)).collect();
        assert!(doubled.iter().all(|r| dot(r, &functional) != 0), "positivity functional vanishes on a root");

        let positive: Vec<&Vec<i64>> = doubled.iter().filter(|r| dot(r, &functional) > 0).collect();
        let mut simple: Vec<Vec<i64>> = positive
            .iter()
            .filter(|r| {
                !positive.iter().any(|a| {
                    let rest: Vec<i64> = r.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
                    positive.contains(&&rest)
                })
            })
            .map(|r| (*r).clone())
            .collect();
        simple.sort_by(|a, b| lex_desc(a, b));
        assert_eq!(simple.len(), ty.rank, "wrong number of simple roots for {ty}");

        let cols: Vec<crate::lattice::IntVector> = simple.iter().cloned().map(Into::into).collect();
        let smat = IntMatrix::from_columns(dim, &cols).expect("simple roots share a dimension");
        let coeffs_of = |r: &[i64]| {
            solve_integer(&smat, r).expect("dimensions agree").expect("root is an integer combination of simple roots").0
        };

        let mut keyed: Vec<(Vec<i64>, Vec<i64>)> = doubled.into_iter().map(|r| (coeffs_of(&r), r)).collect();
        keyed.sort_by(|(ca, a), (cb, b)| {
            let pa = dot(a, &functional) > 0;
            let pb = dot(b, &functional) > 0;
            let abs = |c: &[i64]| c.iter().map(|x| x.abs()).collect::<Vec<_>>();
            let (ka, kb) = (abs(ca), abs(cb));
            let (ha, hb): (i64, i64) = (ka.iter().sum(), kb.iter().sum());
            pb.cmp(&pa).then(ha.cmp(&hb)).then_with(|| kb.cmp(&ka))
        });
        let (coeffs, doubled): (Vec<Vec<i64>>, Vec<Vec<i64>>) = keyed.into_iter().unzip();
        let n = doubled.len();
        let n_pos = n / 2;

        let min_norm = doubled.iter().map(|r| dot(r, r)).min().expect("nonempty root system");
        let form: Vec<Vec<i64>> = doubled
            .iter()
            .map(|a| {
                doubled
                    .iter()
                    .map(|b| {
                        let num = 2 * dot(a, b);
                        assert_eq!(num % min_norm, 0, "form is not integral");
                        num / min_norm
                    })
                    .collect()
            })
            .collect();
        let long: Vec<bool> = (0..n).map(|i| !ty.is_simply_laced() && form[i][i] > 2).collect();
        let by_coeffs: HashMap<Vec<i64>, usize> =
            coeffs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();

        let pairing: Vec<Vec<i64>> = (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let p = 2 * form[b][a];
                        assert_eq!(p % form[a][a], 0, "pairing is not integral");
                        p / form[a][a]
                    })
                    .collect()
            })
            .collect();
        let reflect: Vec<Vec<usize>> = (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let p = pairing[b][a];
                        let c: Vec<i64> =
                            coeffs[b].iter().zip(&coeffs[a]).map(|(x, y)| x - p * y).collect();
                        by_coeffs[&c]
                    })
                    .collect()
            })
            .collect();
        let sum: Vec<Vec<RootSum>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let c: Vec<i64> = coeffs[a].iter().zip(&coeffs[b]).map(|(x, y)| x + y).collect();
                        if c.iter().all(|&x| x == 0) {
                            RootSum::Zero
                        } else {
                            by_coeffs.get(&c).map_or(RootSum::None, |&k| RootSum::Root(k))
                        }
                    })
                    .collect()
            })
            .collect();

        let sys = FiniteRootSystem { ty, doubled, coeffs, by_coeffs, long, n_pos, form, pairing, reflect, sum };
        debug_assert!((0..n_pos).all(|i| sys.neg(i) == i + n_pos));
        sys
    }

    pub fn finite_type(&self) -> FiniteType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    pub fn k(&self) -> i64 {
        self.ty.k()
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.n_pos
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.n_pos
    }

    pub fn simple_roots(&self) -> std::ops::Range<usize> {
        0..self.ty.rank
    }

    /// Coordinates in the standard realization.
    pub fn coords(&self, i: usize) -> Vec<Ratio<i64>> {
        self.doubled[i].iter().map(|&x| Ratio::new(x, 2)).collect()
    }

    /// Coefficients in the basis of simple roots.
    pub fn simple_coeffs(&self, i: usize) -> &[i64] {
        &self.coeffs[i]
    }

    pub fn find(&self, coeffs: &[i64]) -> Option<usize> {
        self.by_coeffs.get(coeffs).copied()
    }

    pub fn height(&self, i: usize) -> i64 {
        self.coeffs[i].iter().sum()
    }

    pub fn is_long(&self, i: usize) -> bool {
        self.long[i]
    }

    pub fn is_short(&self, i: usize) -> bool {
        !self.long[i]
    }

    pub fn short_roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.long[i])
    }

    pub fn long_roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.long[i])
    }

    /// Invariant form, normalized so that short roots have norm 2.
    pub fn form(&self, a: usize, b: usize) -> i64 {
        self.form[a][b]
    }

    /// Invariant form on simple-root coefficient vectors.
    pub fn form_coeffs(&self, a: &[i64], b: &[i64]) -> i64 {
        a.iter()
            .zip(&self.form)
            .map(|(x, row)| x * b.iter().zip(row).map(|(y, g)| y * g).sum::<i64>())
            .sum()
    }

    /// `⟨β, α∨⟩ = 2(β,α)/(α,α)`
    pub fn pairing(&self, beta: usize, alpha: usize) -> i64 {
        self.pairing[beta][alpha]
    }

    /// `w_α(β)`
    pub fn reflect(&self, alpha: usize, beta: usize) -> usize {
        self.reflect[beta][alpha]
    }

    pub fn neg(&self, i: usize) -> usize {
        if i < self.n_pos {
            i + self.n_pos
        } else {
            i - self.n_pos
        }
    }

    pub fn add(&self, a: usize, b: usize) -> RootSum {
        self.sum[a][b]
    }

    /// `(d, u)` with `{β + nα : -d ≤ n ≤ u}` the α-string through β (or
    /// through 0 when `beta` is `None`) inside roots ∪ {0}.
    pub fn root_string(&self, alpha: usize, beta: Option<usize>) -> (u32, u32) {
        let base: Vec<i64> = match beta {
            Some(b) => self.coeffs[b].clone(),
            None => vec![0; self.rank()],
        };
        let present = |n: i64| {
            let c: Vec<i64> = base.iter().zip(&self.coeffs[alpha]).map(|(x, y)| x + n * y).collect();
            c.iter().all(|&x| x == 0) || self.by_coeffs.contains_key(&c)
        };
        let mut d = 0;
        while present(-(d as i64) - 1) {
            d += 1;
        }
        let mut u = 0;
        while present(u as i64 + 1) {
            u += 1;
        }
        (d, u)
    }

    fn dominant(&self, pick_long: bool) -> Option<usize> {
        (0..self.n_pos).find(|&i| {
            self.long[i] == pick_long && self.simple_roots().all(|s| self.form[i][s] >= 0)
        })
    }

    /// Highest short root, and highest long root (`None` when simply laced).
    pub fn highest_roots(&self) -> (usize, Option<usize>) {
        let short = self.dominant(false).expect("a dominant short root exists");
        let long = if self.ty.is_simply_laced() { None } else { self.dominant(true) };
        (short, long)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> FiniteRootSystem {
        FiniteRootSystem::build(s.parse().unwrap())
    }

    fn all_types() -> Vec<FiniteType> {
        ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "D5", "E6", "E7", "E8", "F4", "G2"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn rank_constraints() {
        for bad in ["A0", "B1", "C2", "D3", "E5", "E9", "F3", "G3", "H3", "X"] {
            assert!(bad.parse::<FiniteType>().is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn root_counts() {
        // (total, short, long), classical counts
        let expected = [
            ("A1", 2, 2, 0),
            ("A2", 6, 6, 0),
            ("A3", 12, 12, 0),
            ("B2", 8, 4, 4),
            ("B3", 18, 6, 12),
            ("C3", 18, 12, 6),
            ("D4", 24, 24, 0),
            ("E6", 72, 72, 0),
            ("E7", 126, 126, 0),
            ("E8", 240, 240, 0),
            ("F4", 48, 24, 24),
            ("G2", 12, 6, 6),
        ];
        for (name, total, short, long) in expected {
            let f = sys(name);
            assert_eq!(f.len(), total, "{name}");
            assert_eq!(f.short_roots().count(), short, "{name}");
            assert_eq!(f.long_roots().count(), long, "{name}");
        }
    }

    #[test]
    fn norms_and_k() {
        for ty in all_types() {
            let f = FiniteRootSystem::build(ty);
            for i in 0..f.len() {
                let n = f.form(i, i);
                assert!(n == 2 || n == 2 * f.k(), "{ty}: norm {n}");
                assert_eq!(f.is_long(i), n == 2 * f.k() && f.k() > 1);
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let a2 = sys("A2");
        assert_eq!(a2.pairing(0, 0), 2);
        assert_eq!(a2.pairing(0, 1), -1);
        let d4 = sys("D4");
        let orth = (0..d4.len()).flat_map(|i| (0..d4.len()).map(move |j| (i, j))).find(|&(i, j)| d4.form(i, j) == 0);
        let (i, j) = orth.unwrap();
        assert_eq!(d4.pairing(i, j), 0);
        assert_eq!(d4.reflect(j, i), i);
        assert_eq!(d4.root_string(j, Some(i)), (0, 0));
    }

    #[test]
    fn reflections_a2() {
        let a2 = sys("A2");
        let a12 = a2.find(&[1, 1]).unwrap();
        assert_eq!(a2.reflect(0, 1), a12);
        assert_eq!(a2.reflect(0, 0), a2.neg(0));
    }

    #[test]
    fn strings() {
        let a2 = sys("A2");
        assert_eq!(a2.root_string(0, Some(1)), (0, 1));
        assert_eq!(a2.root_string(0, Some(0)), (2, 0));
        assert_eq!(a2.root_string(0, None), (1, 1));
    }

    #[test]
    fn string_property_exhaustive() {
        for ty in all_types() {
            let f = FiniteRootSystem::build(ty);
            for a in 0..f.len() {
                for b in 0..f.len() {
                    let (d, u) = f.root_string(a, Some(b));
                    assert_eq!(d as i64 - u as i64, f.pairing(b, a), "{ty} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn closure_and_reducedness() {
        for ty in all_types() {
            let f = FiniteRootSystem::build(ty);
            for a in 0..f.len() {
                assert_eq!(f.add(a, f.neg(a)), RootSum::Zero);
                assert_eq!(f.add(a, a), RootSum::None, "{ty}: 2α is a root");
                for b in 0..f.len() {
                    assert_eq!(f.reflect(a, f.reflect(a, b)), b);
                    assert_eq!(f.is_long(f.reflect(a, b)), f.is_long(b));
                }
            }
        }
    }

    #[test]
    fn highest_roots_b2() {
        let b2 = sys("B2");
        let (s, l) = b2.highest_roots();
        let half = Ratio::new(2, 2);
        assert_eq!(b2.coords(s), vec![half, Ratio::from_integer(0)]);
        assert_eq!(b2.coords(l.unwrap()), vec![half, half]);
    }

    #[test]
    fn highest_roots_a2_g2() {
        let a2 = sys("A2");
        let (s, l) = a2.highest_roots();
        assert_eq!(a2.simple_coeffs(s), &[1, 1]);
        assert!(l.is_none());
        let g2 = sys("G2");
        let (s, l) = g2.highest_roots();
        let l = l.unwrap();
        assert!(matches!(g2.add(l, g2.neg(s)), RootSum::Root(_)));
    }

    #[test]
    fn b_short_sums_are_long() {
        let b3 = sys("B3");
        for a in b3.short_roots() {
            for b in b3.short_roots() {
                if b != a && b != b3.neg(a) {
                    match b3.add(a, b) {
                        RootSum::Root(c) => assert!(b3.is_long(c)),
                        other => panic!("short sum {a}+{b} gave {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn layout() {
        for ty in all_types() {
            let f = FiniteRootSystem::build(ty);
            for i in f.simple_roots() {
                let mut e = vec![0; f.rank()];
                e[i] = 1;
                assert_eq!(f.simple_coeffs(i), &e[..]);
            }
            for i in 0..f.n_positive() {
                assert!(f.simple_coeffs(i).iter().all(|&c| c >= 0));
                assert_eq!(f.neg(i), i + f.n_positive());
            }
        }
    }
}
