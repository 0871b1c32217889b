//! Characters on extended affine root systems with values in the `m`-th
//! roots of unity, stored as exponents in `Z/m`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ears::{invariants, Ears, EarsSpec, Root, RootData, Window};
use crate::error::{Error, Result};
use crate::lattice::{snf, solve_mod, IntLattice, IntMatrix, IntVector, ModSolution, Semilattice};
use crate::report::Report;
use crate::rootsys::{Family, FiniteType};
use crate::weyl::{check_reflectable, DecompositionTree, ReflectableSet};

/// `ζ_m^exponent` for a fixed primitive `m`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnityValue {
    pub exponent: i64,
    pub modulus: i64,
}

impl UnityValue {
    pub fn new(exponent: i64, modulus: i64) -> Self {
        UnityValue { exponent: exponent.rem_euclid(modulus), modulus }
    }

    /// The value as `±1` when `m ≤ 2`.
    pub fn sign(self) -> Option<i64> {
        match (self.modulus, self.exponent) {
            (1, _) | (2, 0) => Some(1),
            (2, 1) => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for UnityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ζ{}^{}", self.modulus, self.exponent)
    }
}

/// A homomorphism `⟨R⟩ → Z/m`, stored by its values on the standard basis
/// (simple roots, then the basis of `Λ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeHom {
    modulus: i64,
    std_values: IntVector,
}

impl LatticeHom {
    pub fn from_std_values(modulus: i64, values: IntVector) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::ZeroModulus);
        }
        Ok(LatticeHom { modulus, std_values: IntVector(values.iter().map(|v| v.rem_euclid(modulus)).collect()) })
    }

    /// The hom taking `values[j]` on `basis[j]`; the basis must be a
    /// `Z`-basis of `⟨R⟩`, given in standard coordinates.
    pub fn from_basis(modulus: i64, basis: &[IntVector], values: &[i64]) -> Result<Self> {
        let n = basis.len();
        if values.len() != n {
            return Err(Error::Dimension(format!("{} basis elements but {} values", n, values.len())));
        }
        let b = IntMatrix::from_columns(n, basis)?;
        let det = b.determinant()?;
        if det.abs() != 1 {
            return Err(Error::NotABasis(format!("determinant {det}")));
        }
        // w with wᵀB = v, i.e. w = (B⁻¹)ᵀ v and B⁻¹ = V·U
        let f = snf(&b);
        let inv = f.v.mul(&f.u)?;
        let w = inv.transpose().mul_vec(values)?;
        Self::from_std_values(modulus, w)
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn std_values(&self) -> &IntVector {
        &self.std_values
    }

    pub fn apply(&self, std_coords: &[i64]) -> i64 {
        (self.std_values.dot(&IntVector(std_coords.to_vec())) % self.modulus as i128).rem_euclid(self.modulus as i128)
            as i64
    }
}

#[derive(Clone, Debug)]
pub enum Rule {
    Hom(LatticeHom),
    /// The two-valued coset rule on type `A1` (modulus 2).
    A1Coset,
    Table { window: Window, values: BTreeMap<Root, i64> },
}

#[derive(Clone, Debug)]
pub struct Character {
    ears: Arc<Ears>,
    modulus: i64,
    rule: Rule,
}

/// Index sets of size 3..=6 among the non-zero representatives whose sum is
/// in `2Λ`; the first one found, if any.
pub fn star_violation(s: &Semilattice) -> Option<Vec<usize>> {
    let masks = s.masks();
    let m = s.index();
    (3..=6.min(m)).find_map(|k| {
        (1..=m).combinations(k).find(|idx| idx.iter().fold(0u64, |acc, &i| acc ^ masks[i]) == 0)
    })
}

/// The coset rule exponent without any validity checks.
pub fn a1_coset_exponent(e: &Ears, root: &Root) -> Result<i64> {
    let class = e.s().coset_class(&root.iso)?;
    match root.finite {
        Some(_) => match class {
            Some(0) => Ok(0),
            Some(_) => Ok(1),
            None => Err(Error::NotARoot(format!("{root:?}"))),
        },
        None => match class {
            Some(0) => Ok(0),
            Some(_) => Ok(1),
            None if e.r0_classes().contains(&root.iso) => Ok(0),
            None => Err(Error::NotARoot(format!("{root:?}"))),
        },
    }
}

fn is_a1(e: &Ears) -> bool {
    e.finite_type() == FiniteType::new(Family::A, 1).expect("A1 is valid")
}

impl Character {
    pub fn from_hom(ears: Arc<Ears>, hom: LatticeHom) -> Result<Self> {
        if hom.std_values.dim() != ears.rank() + ears.nullity() {
            return Err(Error::Dimension(format!(
                "hom has {} values, root lattice has rank {}",
                hom.std_values.dim(),
                ears.rank() + ears.nullity()
            )));
        }
        Ok(Character { modulus: hom.modulus, ears, rule: Rule::Hom(hom) })
    }

    /// The coset rule; requires type `A1` and condition (⋆).
    pub fn a1_coset(ears: Arc<Ears>) -> Result<Self> {
        if !is_a1(&ears) {
            return Err(Error::InvalidCharacter("the coset rule needs type A1".into()));
        }
        if let Some(idx) = star_violation(ears.s()) {
            return Err(Error::StarViolation(idx));
        }
        Ok(Character { ears, modulus: 2, rule: Rule::A1Coset })
    }

    /// A table over every root in the window.
    pub fn table(ears: Arc<Ears>, modulus: i64, window: Window, values: BTreeMap<Root, i64>) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::ZeroModulus);
        }
        let domain = ears.enumerate(window);
        for r in values.keys() {
            if !ears.in_window(r, window) || !ears.is_root(r) {
                return Err(Error::InvalidCharacter(format!("table entry {r:?} is not a root in the window")));
            }
        }
        if let Some(r) = domain.iter().find(|r| !values.contains_key(r)) {
            return Err(Error::InvalidCharacter(format!("table misses root {r:?}")));
        }
        let values = values.into_iter().map(|(r, v)| (r, v.rem_euclid(modulus))).collect();
        Ok(Character { ears, modulus, rule: Rule::Table { window, values } })
    }

    /// Tabulates this character on a window.
    pub fn tabulate(&self, window: Window) -> Result<Character> {
        let values = self
            .ears
            .enumerate(window)
            .into_iter()
            .map(|r| self.exponent(&r).map(|v| (r, v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Character::table(self.ears.clone(), self.modulus, window, values)
    }

    pub fn ears(&self) -> &Arc<Ears> {
        &self.ears
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Window of a table rule; rule-based characters are defined everywhere.
    pub fn domain_window(&self) -> Option<Window> {
        match &self.rule {
            Rule::Table { window, .. } => Some(*window),
            _ => None,
        }
    }

    pub fn defined_at(&self, root: &Root) -> bool {
        self.domain_window().is_none_or(|w| self.ears.in_window(root, w))
    }

    pub fn exponent(&self, root: &Root) -> Result<i64> {
        if !self.ears.is_root(root) {
            self.ears.classify(root)?;
            return Err(Error::NotARoot(format!("{root:?}")));
        }
        match &self.rule {
            Rule::Hom(h) => Ok(h.apply(&self.ears.std_coords(root)?)),
            Rule::A1Coset => a1_coset_exponent(&self.ears, root),
            Rule::Table { window, values } => values
                .get(root)
                .copied()
                .ok_or_else(|| Error::OutsideTable(format!("{root:?} outside window {}", window.bound))),
        }
    }

    pub fn eval(&self, root: &Root) -> Result<UnityValue> {
        Ok(UnityValue::new(self.exponent(root)?, self.modulus))
    }

    pub fn to_data(&self) -> CharacterData {
        let rule = match &self.rule {
            Rule::Hom(h) => RuleData::Hom { values: h.std_values.0.clone(), basis: None },
            Rule::A1Coset => RuleData::A1Coset {},
            Rule::Table { window, values } => RuleData::Table {
                window: window.bound,
                entries: values
                    .iter()
                    .map(|(r, &v)| TableEntry { root: self.ears.root_to_data(r), exponent: v })
                    .collect(),
            },
        };
        CharacterData { modulus: self.modulus, rule }
    }

    pub fn from_data(ears: Arc<Ears>, data: &CharacterData) -> Result<Self> {
        match &data.rule {
            RuleData::Hom { values, basis: None } => {
                Character::from_hom(ears, LatticeHom::from_std_values(data.modulus, IntVector(values.clone()))?)
            }
            RuleData::Hom { values, basis: Some(basis) } => {
                let coords = basis
                    .iter()
                    .map(|b| lattice_element_coords(&ears, b))
                    .collect::<Result<Vec<_>>>()?;
                let hom = LatticeHom::from_basis(data.modulus, &coords, values)?;
                Character::from_hom(ears, hom)
            }
            RuleData::A1Coset {} => {
                if data.modulus != 2 {
                    return Err(Error::InvalidCharacter("the coset rule has modulus 2".into()));
                }
                Character::a1_coset(ears)
            }
            RuleData::Table { window, entries } => {
                let values = entries
                    .iter()
                    .map(|t| ears.root_from_data(&t.root).map(|r| (r, t.exponent)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Character::table(ears, data.modulus, Window::new(*window), values)
            }
        }
    }
}

/// Standard coordinates of a lattice element given like a root, except
/// that the finite coefficients may be any integers.
fn lattice_element_coords(e: &Ears, d: &RootData) -> Result<IntVector> {
    let mut v = match &d.finite {
        Some(c) if c.len() == e.rank() => c.clone(),
        Some(c) => return Err(Error::Dimension(format!("finite part has {} coefficients", c.len()))),
        None => vec![0; e.rank()],
    };
    let c = e.lattice_coords(&d.iso).ok_or_else(|| Error::NotInLattice(d.iso.clone()))?;
    v.extend_from_slice(&c);
    Ok(IntVector(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub root: RootData,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RuleData {
    #[serde(rename = "hom")]
    Hom {
        values: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<Vec<RootData>>,
    },
    #[serde(rename = "a1coset")]
    A1Coset {},
    #[serde(rename = "table")]
    Table { window: u32, entries: Vec<TableEntry> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterData {
    pub modulus: i64,
    pub rule: RuleData,
}

/// Checks `ψ(α + β) = ψ(α) ψ(β)` for one pair; `Ok(None)` when the pair is
/// not applicable.
fn check_pair(c: &Character, a: &Root, b: &Root) -> Result<Option<(i64, i64, i64)>> {
    let Some(sum) = c.ears.add(a, b) else { return Ok(None) };
    if !c.ears.is_root(&sum) || !c.defined_at(&sum) {
        return Ok(None);
    }
    let (x, y, z) = (c.exponent(a)?, c.exponent(b)?, c.exponent(&sum)?);
    Ok(Some((x, y, z)))
}

fn pair_witness(c: &Character, a: &Root, b: &Root, vals: (i64, i64, i64)) -> serde_json::Value {
    let e = &c.ears;
    let sum = e.add(a, b).expect("applicable pair");
    json!({
        "alpha": e.root_json(a), "beta": e.root_json(b), "sum": e.root_json(&sum),
        "exponents": [vals.0, vals.1, vals.2], "modulus": c.modulus,
    })
}

fn verify_pairs(c: &Character, w: Window, include_isotropic_pairs: bool, name: &str) -> Result<Report> {
    let roots = c.ears.enumerate(w);
    let mut report = Report::new();
    let mut checked = 0u64;
    let mut failure = None;
    'outer: for a in &roots {
        if a.is_isotropic() && !include_isotropic_pairs {
            continue;
        }
        for b in &roots {
            if let Some(vals) = check_pair(c, a, b)? {
                checked += 1;
                if (vals.0 + vals.1 - vals.2).rem_euclid(c.modulus) != 0 {
                    failure = Some(pair_witness(c, a, b, vals));
                    break 'outer;
                }
            }
        }
    }
    report.record(name, format!("{checked} applicable pairs on window {}", w.bound), failure);

    let inverse_fail = roots
        .iter()
        .filter(|r| !r.is_isotropic())
        .map(|r| Ok((r, c.exponent(r)?, c.exponent(&c.ears.neg(r))?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .find(|(_, x, y)| (x + y).rem_euclid(c.modulus) != 0)
        .map(|(r, x, y)| json!({ "root": c.ears.root_json(r), "exponents": [x, y] }));
    report.record("inverse", "ψ(-α) ψ(α) = 1 on non-isotropic roots", inverse_fail);
    Ok(report)
}

/// Additivity for pairs with a non-isotropic first summand.
pub fn verify_core_character(c: &Character, w: Window) -> Result<Report> {
    verify_pairs(c, w, false, "core_additivity")
}

/// Additivity for all pairs of roots.
pub fn verify_character(c: &Character, w: Window) -> Result<Report> {
    verify_pairs(c, w, true, "additivity")
}

/// Additivity on random pairs `(α, β)` drawn from the window with `α + β`
/// a root, until `samples` applicable pairs were checked.
pub fn verify_character_sampled(c: &Character, w: Window, samples: u64, seed: u64) -> Result<Report> {
    let roots = c.ears.enumerate(w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    let (mut checked, mut attempts) = (0u64, 0u64);
    let mut failure = None;
    let max_attempts = samples.saturating_mul(1000).max(1000);
    while checked < samples && attempts < max_attempts {
        attempts += 1;
        let a = roots.choose(&mut rng).expect("window contains 0");
        let target = roots.choose(&mut rng).expect("window contains 0");
        // β = target - α, so that α + β is a root by construction
        let Some(b) = c.ears.add(target, &c.ears.neg(a)) else { continue };
        if !c.ears.is_root(&b) || !c.defined_at(&b) {
            continue;
        }
        let Some(vals) = check_pair(c, a, &b)? else { continue };
        checked += 1;
        if (vals.0 + vals.1 - vals.2).rem_euclid(c.modulus) != 0 {
            failure = Some(pair_witness(c, a, &b, vals));
            break;
        }
    }
    if failure.is_none() && checked < samples {
        failure = Some(json!({ "checked": checked, "attempts": attempts, "reason": "too few applicable pairs" }));
    }
    report.record(
        "sampled_additivity",
        format!("{checked} random applicable pairs on window {} (seed {seed}, {attempts} draws)", w.bound),
        failure,
    );
    Ok(report)
}

/// `2ψ(α) ≡ ψ(α + σ) + ψ(α - σ)` whenever `α, α ± σ` are non-isotropic roots.
pub fn verify_square_identity(c: &Character, w: Window) -> Result<Report> {
    let roots = c.ears.enumerate(w);
    let mut report = Report::new();
    let mut checked = 0u64;
    let mut failure = None;
    'outer: for sigma in roots.iter().filter(|r| r.is_isotropic()) {
        for a in roots.iter().filter(|r| !r.is_isotropic()) {
            let plus = Root::new(a.finite, a.iso.add(&sigma.iso));
            let minus = Root::new(a.finite, a.iso.sub(&sigma.iso));
            if !(c.ears.is_root(&plus) && c.ears.is_root(&minus) && c.defined_at(&plus) && c.defined_at(&minus)) {
                continue;
            }
            checked += 1;
            let (x, p, m) = (c.exponent(a)?, c.exponent(&plus)?, c.exponent(&minus)?);
            if (2 * x - p - m).rem_euclid(c.modulus) != 0 {
                failure = Some(json!({
                    "alpha": c.ears.root_json(a), "sigma": c.ears.root_json(sigma), "exponents": [x, p, m],
                }));
                break 'outer;
            }
        }
    }
    report.record("square_identity", format!("{checked} configurations on window {}", w.bound), failure);
    Ok(report)
}

/// Default representatives: `σ1..σ6`, `σ1 + ... + σ6`, then `σ7..σν`.
pub fn default_taus(nullity: usize) -> Result<Vec<IntVector>> {
    if nullity < 6 {
        return Err(Error::InvalidCharacter(format!("the default representatives need nullity ≥ 6, got {nullity}")));
    }
    let mut taus: Vec<IntVector> = (0..6).map(|i| IntVector::unit(nullity, i)).collect();
    let mut total = IntVector::zeros(nullity);
    total.0[..6].iter_mut().for_each(|x| *x = 1);
    taus.push(total);
    taus.extend((6..nullity).map(|i| IntVector::unit(nullity, i)));
    Ok(taus)
}

/// The coset-rule character on type `A1` over `Λ = Z^ν` with
/// `S = ⋃ (τ_i + 2Λ)`, `τ_0 = 0`.
pub fn build_a1_counterexample(nullity: usize, taus: Option<Vec<IntVector>>) -> Result<Character> {
    let taus = match taus {
        Some(t) => t,
        None => default_taus(nullity)?,
    };
    let mut reps = vec![IntVector::zeros(nullity)];
    reps.extend(taus);
    let s = Semilattice::new(IntLattice::standard(nullity), reps)?;
    let ears = Ears::build(&EarsSpec::a1(&s))?;
    Character::a1_coset(Arc::new(ears))
}

/// `Σ coeff · root = 0` in `⟨R⟩` with `Σ coeff · ψ(root) ≢ 0 (mod m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub terms: Vec<(Root, i64)>,
    /// True when the coordinate sum is exactly zero, not only modulo `m`.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub coordinate_sum: Vec<i64>,
    pub exponent_sum: i64,
    pub modulus: i64,
    pub valid: bool,
}

impl Witness {
    /// Recomputes both sums from scratch.
    pub fn check(&self, c: &Character) -> Result<WitnessCheck> {
        let n = c.ears.rank() + c.ears.nullity();
        let mut coords = vec![0i64; n];
        let mut exp = 0i64;
        for (r, k) in &self.terms {
            let v = c.ears.std_coords(r)?;
            for (acc, x) in coords.iter_mut().zip(v.iter()) {
                *acc += k * x;
            }
            exp += k * c.exponent(r)?;
        }
        let m = c.modulus;
        let exponent_sum = exp.rem_euclid(m);
        let zero = if self.exact {
            coords.iter().all(|&x| x == 0)
        } else {
            coords.iter().all(|&x| x.rem_euclid(m) == 0)
        };
        Ok(WitnessCheck { coordinate_sum: coords, exponent_sum, modulus: m, valid: zero && exponent_sum != 0 })
    }

    pub fn to_json(&self, e: &Ears) -> serde_json::Value {
        json!(self.terms.iter().map(|(r, k)| json!({ "root": e.root_json(r), "coeff": k })).collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug)]
pub enum Extendability {
    Sat(LatticeHom),
    Unsat(Witness),
}

fn greedy_key(r: &Root) -> (i64, usize, bool, usize, Root) {
    (
        r.iso.sup_norm(),
        r.iso.iter().filter(|&&x| x != 0).count(),
        r.finite.is_some(),
        r.iso.iter().filter(|&&x| x < 0).count(),
        r.clone(),
    )
}

/// A `Z`-basis of `⟨R⟩` picked greedily from `roots`, if one exists there.
fn greedy_basis(e: &Ears, roots: &[Root]) -> Option<Vec<Root>> {
    let n = e.rank() + e.nullity();
    let mut chosen: Vec<Root> = Vec::new();
    let mut rank = 0;
    for r in roots {
        let mut trial = chosen.clone();
        trial.push(r.clone());
        let cols: Vec<IntVector> = trial.iter().map(|x| e.std_coords(x).expect("roots lie in ⟨R⟩")).collect();
        let f = snf(&IntMatrix::from_columns(n, &cols).ok()?);
        if f.rank() > rank {
            rank = f.rank();
            chosen = trial;
        }
        if rank == n {
            break;
        }
    }
    let cols: Vec<IntVector> = chosen.iter().map(|x| e.std_coords(x).expect("roots lie in ⟨R⟩")).collect();
    let det = IntMatrix::from_columns(n, &cols).ok()?.determinant().ok()?;
    (rank == n && det.abs() == 1).then_some(chosen)
}

/// Decides whether the character restricted to `R ∩ w` is the restriction
/// of a homomorphism `⟨R⟩ → Z/m`.
pub fn extendability(c: &Character, w: Window) -> Result<Extendability> {
    let check = verify_character(c, w)?;
    if !check.passed() {
        return Err(Error::CharacterCheck(format!("{:?}", check.failures().next())));
    }
    let e = &c.ears;
    let m = c.modulus;
    let roots: Vec<Root> = e.enumerate(w).into_iter().filter(|r| c.defined_at(r)).collect();
    let n = e.rank() + e.nullity();
    let rows: Vec<Vec<i64>> = roots.iter().map(|r| e.std_coords(r).map(|v| v.0)).collect::<Result<_>>()?;
    let rhs: Vec<i64> = roots.iter().map(|r| c.exponent(r)).collect::<Result<_>>()?;
    let a = IntMatrix::from_rows(n, &rows)?;
    match solve_mod(&a, &rhs, m)? {
        ModSolution::Sat(x) => {
            let hom = LatticeHom::from_std_values(m, x)?;
            if let Some((r, _)) = roots.iter().zip(&rhs).find(|(r, &v)| {
                hom.apply(&e.std_coords(r).expect("roots lie in ⟨R⟩")) != v
            }) {
                return Err(Error::Agreement(format!("solution disagrees at {r:?}")));
            }
            Ok(Extendability::Sat(hom))
        }
        ModSolution::Unsat(cert) => {
            let mut sorted = roots.clone();
            sorted.sort_by_key(greedy_key);
            if let Some(basis) = greedy_basis(e, &sorted) {
                let cols: Vec<IntVector> = basis.iter().map(|b| e.std_coords(b)).collect::<Result<_>>()?;
                let bm = IntMatrix::from_columns(n, &cols)?;
                let basis_exp: Vec<i64> = basis.iter().map(|b| c.exponent(b)).collect::<Result<_>>()?;
                let mut fallback = None;
                for r in &sorted {
                    let coeffs = crate::lattice::solve_integer(&bm, &e.std_coords(r)?)?
                        .expect("basis spans ⟨R⟩");
                    let predicted: i64 = coeffs.iter().zip(&basis_exp).map(|(k, v)| k * v).sum();
                    let own = c.exponent(r)?;
                    if (own - predicted).rem_euclid(m) != 0 {
                        let mut terms = vec![(r.clone(), 1)];
                        terms.extend(
                            basis.iter().zip(coeffs.iter()).filter(|(_, &k)| k != 0).map(|(b, &k)| (b.clone(), -k)),
                        );
                        let witness = Witness { terms, exact: true };
                        if own != 0 {
                            return Ok(Extendability::Unsat(witness));
                        }
                        fallback.get_or_insert(witness);
                    }
                }
                if let Some(wit) = fallback {
                    return Ok(Extendability::Unsat(wit));
                }
            }
            let terms = roots
                .iter()
                .zip(cert.iter())
                .filter(|(_, &k)| k != 0)
                .map(|(r, &k)| (r.clone(), k))
                .collect();
            Ok(Extendability::Unsat(Witness { terms, exact: false }))
        }
    }
}

/// Extends a character on a system with `ind(R) = 0` through a reflectable
/// `Z`-basis `P ⊆ R^×` of `⟨R⟩`, checking agreement on the window.
pub fn extend_ind_zero(c: &Character, p: &ReflectableSet, w: Window) -> Result<(LatticeHom, Report)> {
    let e = &c.ears;
    let inv = invariants(e, None)?;
    if inv.ind_r != 0 {
        return Err(Error::InvalidCharacter(format!("ind(R) = {} is not zero", inv.ind_r)));
    }
    let coords: Vec<IntVector> = p.roots().iter().map(|r| e.std_coords(r)).collect::<Result<_>>()?;
    let values: Vec<i64> = p.roots().iter().map(|r| c.exponent(r)).collect::<Result<_>>()?;
    let hom = LatticeHom::from_basis(c.modulus, &coords, &values)?;
    let refl = check_reflectable(e, p, w, w.bound);
    if !refl.covered {
        return Err(Error::NotReflectable(format!("{} roots missed, first {:?}", refl.missing.len(), refl.missing[0])));
    }

    let mut report = Report::new();
    let tree = DecompositionTree::new(e, p, w);
    let mut telescoped = 0u64;
    let mut tele_fail = None;
    let targets: Vec<Root> = e.enumerate(w).into_iter().filter(|r| c.defined_at(r)).collect();
    for r in targets.iter().filter(|r| !r.is_isotropic()) {
        let d = tree.path(r)?;
        let mut acc = 0i64;
        for (prefix, term) in d.prefixes(e).iter().zip(&d.terms) {
            let prefix = prefix.as_ref().expect("decomposition prefixes are roots");
            acc += term.sign * c.exponent(&term.root)?;
            if c.defined_at(prefix) && (c.exponent(prefix)? - acc).rem_euclid(c.modulus) != 0 {
                tele_fail = Some(json!({ "root": e.root_json(r), "prefix": e.root_json(prefix) }));
                break;
            }
        }
        if tele_fail.is_some() {
            break;
        }
        telescoped += 1;
    }
    report.record(
        "telescoping",
        format!("{telescoped} roots reached through prefix sums over ±P"),
        tele_fail.clone(),
    );
    let direct_fail = targets
        .iter()
        .map(|r| Ok((r, c.exponent(r)?, hom.apply(&e.std_coords(r)?))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .find(|(_, x, y)| x != y)
        .map(|(r, x, y)| json!({ "root": e.root_json(r), "character": x, "extension": y }));
    report.record("agreement", format!("{} roots on window {}", targets.len(), w.bound), direct_fail.clone());
    if let Some(f) = direct_fail.or(tele_fail) {
        return Err(Error::Agreement(f.to_string()));
    }
    Ok((hom, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigma(n: usize, idx: &[usize]) -> IntVector {
        let mut v = IntVector::zeros(n);
        for &i in idx {
            v.0[i] = 1;
        }
        v
    }

    #[test]
    fn coset_rule_values() {
        let c = build_a1_counterexample(6, None).unwrap();
        let alpha = Root::new(Some(0), IntVector::zeros(6));
        assert_eq!(c.eval(&alpha).unwrap().sign(), Some(1));
        let tau1 = Root::isotropic(sigma(6, &[0]));
        assert_eq!(c.eval(&tau1).unwrap().sign(), Some(-1));
        let t12 = Root::isotropic(sigma(6, &[0, 1]));
        assert_eq!(c.eval(&t12).unwrap().sign(), Some(1));
        let tau7 = Root::isotropic(sigma(6, &[0, 1, 2, 3, 4, 5]));
        assert_eq!(c.eval(&tau7).unwrap().sign(), Some(-1));
        let product: i64 = (0..6).map(|i| c.eval(&Root::isotropic(sigma(6, &[i]))).unwrap().sign().unwrap()).product();
        assert_eq!(product, 1);
        assert!(matches!(c.eval(&Root::isotropic(sigma(6, &[0, 1, 2]))), Err(Error::NotARoot(_))));
    }

    #[test]
    fn star_rejections() {
        let taus = vec![sigma(2, &[0]), sigma(2, &[1]), sigma(2, &[0, 1])];
        assert_eq!(build_a1_counterexample(2, Some(taus)).unwrap_err(), Error::StarViolation(vec![1, 2, 3]));
        assert!(matches!(build_a1_counterexample(5, None), Err(Error::InvalidCharacter(_))));
        let dup = vec![sigma(6, &[0]), sigma(6, &[0]).scale(3)];
        assert!(matches!(build_a1_counterexample(6, Some(dup)), Err(Error::InvalidSemilattice(_))));
    }

    #[test]
    fn defaults_for_larger_nullity() {
        let c = build_a1_counterexample(7, None).unwrap();
        assert_eq!(c.ears().s().index(), 8);
    }

    #[test]
    fn coset_rule_small_window_is_character() {
        let c = build_a1_counterexample(6, None).unwrap();
        let w = Window::new(1);
        assert!(verify_character(&c, w).unwrap().passed());
        assert!(verify_core_character(&c, w).unwrap().passed());
        assert!(verify_square_identity(&c, w).unwrap().passed());
    }

    #[test]
    fn counterexample_is_not_extendable() {
        let c = build_a1_counterexample(6, None).unwrap();
        match extendability(&c, Window::new(1)).unwrap() {
            Extendability::Unsat(w) => {
                assert!(w.exact);
                let chk = w.check(&c).unwrap();
                assert!(chk.valid);
                assert_eq!(chk.exponent_sum, 1);
                // τ7 - σ1 - ... - σ6
                assert_eq!(w.terms.len(), 7);
                assert_eq!(w.terms[0], (Root::isotropic(sigma(6, &[0, 1, 2, 3, 4, 5])), 1));
            }
            Extendability::Sat(_) => panic!("counterexample extended"),
        }
    }

    fn a2_nu1() -> Arc<Ears> {
        Arc::new(Ears::build(&EarsSpec::standard("A2".parse().unwrap(), 1)).unwrap())
    }

    #[test]
    fn hom_round_trips() {
        let e = a2_nu1();
        let hom = LatticeHom::from_std_values(3, IntVector(vec![1, 2, 1])).unwrap();
        let c = Character::from_hom(e.clone(), hom.clone()).unwrap();
        match extendability(&c, Window::new(1)).unwrap() {
            Extendability::Sat(h) => assert_eq!(h, hom),
            Extendability::Unsat(_) => panic!("hom not extendable"),
        }
        let zero = Character::from_hom(e, LatticeHom::from_std_values(4, IntVector::zeros(3)).unwrap()).unwrap();
        match extendability(&zero, Window::new(1)).unwrap() {
            Extendability::Sat(h) => assert!(h.std_values().is_zero()),
            Extendability::Unsat(_) => panic!(),
        }
    }

    #[test]
    fn extend_through_basis() {
        let e = a2_nu1();
        let hom = LatticeHom::from_std_values(4, IntVector(vec![3, 1, 2])).unwrap();
        let table = Character::from_hom(e.clone(), hom.clone()).unwrap().tabulate(Window::new(3)).unwrap();
        let p = ReflectableSet::new(
            &e,
            vec![
                Root::new(Some(0), IntVector(vec![0])),
                Root::new(Some(1), IntVector(vec![0])),
                Root::new(Some(0), IntVector(vec![1])),
            ],
        )
        .unwrap();
        let (ext, report) = extend_ind_zero(&table, &p, Window::new(3)).unwrap();
        assert_eq!(ext, hom);
        assert!(report.passed());
    }

    #[test]
    fn affine_a1_extension() {
        let e = Arc::new(Ears::build(&EarsSpec::standard("A1".parse().unwrap(), 1)).unwrap());
        let hom = LatticeHom::from_std_values(2, IntVector(vec![1, 1])).unwrap();
        let table = Character::from_hom(e.clone(), hom.clone()).unwrap().tabulate(Window::new(3)).unwrap();
        for p in [
            vec![Root::new(Some(0), IntVector(vec![0])), Root::new(Some(1), IntVector(vec![1]))],
            vec![Root::new(Some(0), IntVector(vec![0])), Root::new(Some(0), IntVector(vec![1]))],
        ] {
            let p = ReflectableSet::new(&e, p).unwrap();
            assert_eq!(extend_ind_zero(&table, &p, Window::new(3)).unwrap().0, hom);
        }
        let not_basis = ReflectableSet::new(
            &e,
            vec![Root::new(Some(0), IntVector(vec![0])), Root::new(Some(0), IntVector(vec![2]))],
        )
        .unwrap();
        assert!(matches!(extend_ind_zero(&table, &not_basis, Window::new(3)), Err(Error::NotABasis(_))));
    }

    #[test]
    fn corrupted_table_fails() {
        let c = build_a1_counterexample(6, None).unwrap();
        let w = Window::new(1);
        let mut values = match c.tabulate(w).unwrap().rule {
            Rule::Table { values, .. } => values,
            _ => unreachable!(),
        };
        let alpha = Root::new(Some(0), IntVector::zeros(6));
        *values.get_mut(&alpha).unwrap() ^= 1;
        let bad = Character::table(c.ears().clone(), 2, w, values).unwrap();
        let report = verify_character(&bad, w).unwrap();
        assert!(!report.passed());
        assert!(report.failures().next().unwrap().witness.is_some());
    }

    #[test]
    fn forced_table_without_star_fails() {
        let s = Semilattice::full(IntLattice::standard(2));
        let e = Arc::new(Ears::build(&EarsSpec::a1(&s)).unwrap());
        let w = Window::new(1);
        let values = e.enumerate(w).into_iter().map(|r| {
            let v = a1_coset_exponent(&e, &r).unwrap();
            (r, v)
        });
        let forced = Character::table(e.clone(), 2, w, values.collect()).unwrap();
        let a = Root::new(Some(0), sigma(2, &[0]));
        let b = Root::new(Some(1), sigma(2, &[1]));
        let vals = check_pair(&forced, &a, &b).unwrap().unwrap();
        assert_ne!((vals.0 + vals.1 - vals.2).rem_euclid(2), 0);
        assert!(!verify_character(&forced, w).unwrap().passed());
    }

    #[test]
    fn json_round_trip() {
        let c = build_a1_counterexample(6, None).unwrap();
        let data = c.to_data();
        let text = serde_json::to_string(&data).unwrap();
        assert!(text.contains("\"kind\":\"a1coset\""));
        let back: CharacterData = serde_json::from_str(&text).unwrap();
        assert_eq!(back, data);
        let e = a2_nu1();
        let basis = vec![
            RootData { finite: Some(vec![1, 0]), iso: vec![0] },
            RootData { finite: Some(vec![0, 1]), iso: vec![0] },
            RootData { finite: Some(vec![1, 0]), iso: vec![1] },
        ];
        let data = CharacterData { modulus: 3, rule: RuleData::Hom { values: vec![1, 2, 0], basis: Some(basis) } };
        let c = Character::from_data(e, &data).unwrap();
        match c.rule() {
            Rule::Hom(h) => assert_eq!(h.std_values(), &IntVector(vec![1, 2, 2])),
            _ => unreachable!(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homs_are_characters(values in proptest::collection::vec(0i64..6, 3), m in 2i64..7) {
            let c = Character::from_hom(a2_nu1(), LatticeHom::from_std_values(m, IntVector(values)).unwrap()).unwrap();
            let w = Window::new(1);
            prop_assert!(verify_character(&c, w).unwrap().passed());
            prop_assert!(verify_square_identity(&c, w).unwrap().passed());
        }

        #[test]
        fn coset_rule_ignores_double_translates(shift in proptest::collection::vec(-2i64..=2, 6), pick in 0usize..50) {
            let c = build_a1_counterexample(6, None).unwrap();
            let roots = c.ears().enumerate(Window::new(1));
            let r = &roots[pick % roots.len()];
            let moved = Root::new(r.finite, r.iso.add(&IntVector(shift).scale(2)));
            prop_assert_eq!(c.exponent(r).unwrap(), c.exponent(&moved).unwrap());
        }
    }
}
