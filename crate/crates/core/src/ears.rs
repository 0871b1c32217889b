//! Extended affine root systems built from semilattice data.
//!
//! A root is a finite part (a root of the finite system, or nothing for
//! isotropic roots) together with an isotropic part in the ambient `Z^ν`.
//! The system is
//!
//! ```text
//! R = (S + S) ∪ (Ṙ_sh + S) ∪ (Ṙ_lg + L)
//! ```
//!
//! with `S = S1 ⊕ ⟨S2⟩` and `L = k⟨S1⟩ ⊕ S2` in the twisted presentation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::lattice::{
    parity_mask, sum_semilattices, CosetSet, IntLattice, IntVector, LatticeData, Semilattice,
    SemilatticeData,
};
use crate::report::Report;
use crate::rootsys::{Family, FiniteRootSystem, FiniteType};

/// Serialized description of an extended affine root system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarsSpec {
    #[serde(rename = "type")]
    pub family: String,
    pub rank: usize,
    pub nullity: usize,
    #[serde(default)]
    pub twist: usize,
    #[serde(rename = "S1", default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<SemilatticeData>,
    #[serde(rename = "S2", default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<SemilatticeData>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<SemilatticeData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeData>,
}

impl EarsSpec {
    /// Lattice case over `Λ = Z^ν`, twist 0.
    pub fn standard(ty: FiniteType, nullity: usize) -> Self {
        EarsSpec {
            family: ty.family().letter().to_string(),
            rank: ty.rank(),
            nullity,
            twist: 0,
            s1: None,
            s2: None,
            s: None,
            lattice: Some(LatticeData {
                dim: nullity,
                basis: IntLattice::standard(nullity).basis().to_rows(),
            }),
        }
    }

    /// Type `A1` with an arbitrary semilattice.
    pub fn a1(s: &Semilattice) -> Self {
        EarsSpec {
            family: "A".into(),
            rank: 1,
            nullity: s.dim(),
            twist: 0,
            s1: None,
            s2: None,
            s: Some(s.to_data()),
            lattice: None,
        }
    }

    pub fn twisted(ty: FiniteType, s1: &Semilattice, s2: &Semilattice) -> Self {
        EarsSpec {
            family: ty.family().letter().to_string(),
            rank: ty.rank(),
            nullity: s1.dim() + s2.dim(),
            twist: s1.dim(),
            s1: Some(s1.to_data()),
            s2: Some(s2.to_data()),
            s: None,
            lattice: None,
        }
    }

    pub fn finite_type(&self) -> Result<FiniteType> {
        let mut chars = self.family.trim().chars();
        let letter = chars.next().ok_or(Error::InvalidSpec("empty type".into()))?;
        let rest = chars.as_str();
        if !rest.is_empty() && rest.parse::<usize>().ok() != Some(self.rank) {
            return Err(Error::InvalidSpec(format!(
                "type {} disagrees with rank {}",
                self.family, self.rank
            )));
        }
        FiniteType::from_parts(letter, self.rank)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }
}

/// A root, or a candidate root: finite part plus isotropic part.
///
/// The derived order puts isotropic roots first, then sorts by finite index
/// and isotropic part.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root {
    pub finite: Option<usize>,
    pub iso: IntVector,
}

impl Root {
    pub fn new(finite: Option<usize>, iso: IntVector) -> Self {
        Root { finite, iso }
    }

    pub fn isotropic(iso: IntVector) -> Self {
        Root { finite: None, iso }
    }

    pub fn is_isotropic(&self) -> bool {
        self.finite.is_none()
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite {
            Some(i) => write!(f, "r{i}+{:?}", self.iso),
            None => write!(f, "0+{:?}", self.iso),
        }
    }
}

/// JSON form of a root: simple-root coefficients of the finite part (or
/// `null`) and the isotropic part in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootData {
    pub finite: Option<Vec<i64>>,
    pub iso: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RootClass {
    Short,
    Long,
    Isotropic,
    NotARoot,
}

impl RootClass {
    pub fn is_root(self) -> bool {
        self != RootClass::NotARoot
    }
}

/// Sup-norm bound on isotropic parts, measured in `Λ`-coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub bound: u32,
}

impl Window {
    pub fn new(bound: u32) -> Self {
        Window { bound }
    }

    pub fn widen(self, margin: u32) -> Self {
        Window { bound: self.bound + margin }
    }

    pub fn contains_coords(&self, c: &[i64]) -> bool {
        c.iter().all(|x| x.unsigned_abs() <= self.bound as u64)
    }

    /// All coordinate vectors of length `dim` in the window, lexicographically.
    pub fn coords(&self, dim: usize) -> Vec<Vec<i64>> {
        let n = self.bound as i64;
        let mut out = Vec::new();
        let mut cur = vec![-n; dim];
        loop {
            out.push(cur.clone());
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -n;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ears {
    spec: EarsSpec,
    finite: FiniteRootSystem,
    s: Semilattice,
    l: Option<Semilattice>,
    r0: CosetSet,
}

fn semilattice_or_trivial(data: Option<&SemilatticeData>, dim: usize, name: &str) -> Result<Semilattice> {
    match data {
        Some(d) => {
            let s = Semilattice::from_data(d)?;
            if s.dim() != dim {
                return Err(Error::InvalidSpec(format!("{name} has rank {}, expected {dim}", s.dim())));
            }
            Ok(s)
        }
        None if dim == 0 => Ok(Semilattice::trivial()),
        None => Err(Error::InvalidSpec(format!("missing {name}"))),
    }
}

/// Checks `⟨L⟩ ⊆ ⟨S⟩`, `k⟨S⟩ ⊆ ⟨L⟩`, `S + L ⊆ S` and `kS + L ⊆ L` on
/// coset representatives.
pub fn compatibility(s: &Semilattice, l: &Semilattice, k: i64) -> std::result::Result<(), String> {
    if s.dim() != l.dim() {
        return Err("S and L have different ranks".into());
    }
    if !s.lattice().contains_lattice(l.lattice()) {
        return Err("⟨L⟩ is not contained in ⟨S⟩".into());
    }
    let ks = s.lattice().scaled(k).map_err(|e| e.to_string())?;
    if !l.lattice().contains_lattice(&ks) {
        return Err("k⟨S⟩ is not contained in ⟨L⟩".into());
    }
    for (i, tau) in s.reps().iter().enumerate() {
        for (j, lam) in l.reps().iter().enumerate() {
            if !s.contains(&tau.add(lam)) {
                return Err(format!("τ{i} + l{j} = {:?} is not in S", tau.add(lam).0));
            }
            let v = tau.scale(k).add(lam);
            if !l.contains(&v) {
                return Err(format!("k·τ{i} + l{j} = {:?} is not in L", v.0));
            }
        }
    }
    Ok(())
}

impl Ears {
    pub fn build(spec: &EarsSpec) -> Result<Self> {
        let ty = spec.finite_type()?;
        let nu = spec.nullity;
        if spec.twist > nu {
            return Err(Error::InvalidSpec(format!("twist {} exceeds nullity {nu}", spec.twist)));
        }
        let finite = FiniteRootSystem::build(ty);
        let k = ty.k();

        let (s, l) = if let Some(lat) = &spec.lattice {
            if spec.twist != 0 || spec.s.is_some() || spec.s1.is_some() || spec.s2.is_some() {
                return Err(Error::InvalidSpec("\"lattice\" excludes twist and semilattice data".into()));
            }
            let lat = lat.to_lattice()?;
            if lat.dim() != nu {
                return Err(Error::InvalidSpec(format!("lattice has rank {}, expected {nu}", lat.dim())));
            }
            let full = Semilattice::full(lat);
            let l = (!ty.is_simply_laced()).then(|| full.clone());
            (full, l)
        } else if let Some(sd) = &spec.s {
            if ty != FiniteType::new(Family::A, 1)? {
                return Err(Error::InvalidSpec("a single semilattice \"S\" is only allowed for A1".into()));
            }
            if spec.twist != 0 || spec.s1.is_some() || spec.s2.is_some() {
                return Err(Error::InvalidSpec("\"S\" excludes twist and S1/S2".into()));
            }
            (semilattice_or_trivial(Some(sd), nu, "S")?, None)
        } else {
            let t = spec.twist;
            let s1 = semilattice_or_trivial(spec.s1.as_ref(), t, "S1")?;
            let s2 = semilattice_or_trivial(spec.s2.as_ref(), nu - t, "S2")?;
            let lattice_required = ty.is_simply_laced() && ty.rank() >= 2
                || matches!(ty.family(), Family::F | Family::G);
            if lattice_required && !(s1.is_lattice() && s2.is_lattice()) {
                return Err(Error::InvalidSpec(format!("{ty} requires S1 and S2 to be lattices")));
            }
            if ty.family() == Family::B && ty.rank() >= 3 && !s2.is_lattice() {
                return Err(Error::InvalidSpec(format!("{ty} requires L (hence S2) to be a lattice")));
            }
            if ty.family() == Family::C && !s1.is_lattice() {
                return Err(Error::InvalidSpec(format!("{ty} requires S (hence S1) to be a lattice")));
            }
            if ty == FiniteType::new(Family::A, 1)? && t != 0 {
                return Err(Error::InvalidSpec("A1 has no twist".into()));
            }
            let s = s1.direct_sum(&Semilattice::full(s2.lattice().clone()));
            let l = if ty.is_simply_laced() {
                None
            } else {
                Some(Semilattice::full(s1.lattice().scaled(k)?).direct_sum(&s2))
            };
            if ty.is_simply_laced() {
                (s1.direct_sum(&s2), None)
            } else {
                (s, l)
            }
        };
        if let Some(l) = &l {
            compatibility(&s, l, k).map_err(Error::Compatibility)?;
        }
        let r0 = sum_semilattices(&s, &s)?;
        Ok(Ears { spec: spec.clone(), finite, s, l, r0 })
    }

    /// Assembles a system without any compatibility checks.
    pub fn from_parts(ty: FiniteType, s: Semilattice, l: Option<Semilattice>) -> Result<Self> {
        let r0 = sum_semilattices(&s, &s)?;
        let spec = EarsSpec {
            family: ty.family().letter().to_string(),
            rank: ty.rank(),
            nullity: s.dim(),
            twist: 0,
            s1: None,
            s2: None,
            s: Some(s.to_data()),
            lattice: None,
        };
        Ok(Ears { spec, finite: FiniteRootSystem::build(ty), s, l, r0 })
    }

    pub fn spec(&self) -> &EarsSpec {
        &self.spec
    }

    pub fn finite(&self) -> &FiniteRootSystem {
        &self.finite
    }

    pub fn finite_type(&self) -> FiniteType {
        self.finite.finite_type()
    }

    pub fn rank(&self) -> usize {
        self.finite.rank()
    }

    pub fn nullity(&self) -> usize {
        self.s.dim()
    }

    pub fn twist(&self) -> usize {
        self.spec.twist
    }

    pub fn k(&self) -> i64 {
        self.finite.k()
    }

    /// `Λ = ⟨S⟩`
    pub fn lattice(&self) -> &IntLattice {
        self.s.lattice()
    }

    pub fn s(&self) -> &Semilattice {
        &self.s
    }

    pub fn l(&self) -> Option<&Semilattice> {
        self.l.as_ref()
    }

    pub fn r0_classes(&self) -> &CosetSet {
        &self.r0
    }

    /// Semilattice carrying the isotropic parts over finite root `i`.
    pub fn iso_semilattice(&self, i: usize) -> &Semilattice {
        match &self.l {
            Some(l) if self.finite.is_long(i) => l,
            _ => &self.s,
        }
    }

    pub fn classify(&self, root: &Root) -> Result<RootClass> {
        if root.iso.dim() != self.nullity() {
            return Err(Error::Dimension(format!(
                "isotropic part has length {}, expected {}",
                root.iso.dim(),
                self.nullity()
            )));
        }
        let coords = self.lattice().coords(&root.iso).ok_or_else(|| Error::NotInLattice(root.iso.0.clone()))?;
        Ok(match root.finite {
            None => {
                if self.r0.contains_mask(parity_mask(&coords)) {
                    RootClass::Isotropic
                } else {
                    RootClass::NotARoot
                }
            }
            Some(i) if i >= self.finite.len() => {
                return Err(Error::NotARoot(format!("finite index {i} out of range")))
            }
            Some(i) if self.finite.is_long(i) => {
                if self.l.as_ref().is_some_and(|l| l.contains(&root.iso)) {
                    RootClass::Long
                } else {
                    RootClass::NotARoot
                }
            }
            Some(_) => {
                if self.s.class_of_mask(parity_mask(&coords)).is_some() {
                    RootClass::Short
                } else {
                    RootClass::NotARoot
                }
            }
        })
    }

    pub fn is_root(&self, root: &Root) -> bool {
        self.classify(root).is_ok_and(RootClass::is_root)
    }

    pub fn is_nonisotropic_root(&self, root: &Root) -> bool {
        !root.is_isotropic() && self.is_root(root)
    }

    pub fn neg(&self, root: &Root) -> Root {
        Root { finite: root.finite.map(|i| self.finite.neg(i)), iso: root.iso.neg() }
    }

    /// Sum of two roots as a candidate root; `None` when the finite parts do
    /// not add up to a finite root or zero.
    pub fn add(&self, a: &Root, b: &Root) -> Option<Root> {
        use crate::rootsys::RootSum;
        let finite = match (a.finite, b.finite) {
            (None, f) | (f, None) => f,
            (Some(i), Some(j)) => match self.finite.add(i, j) {
                RootSum::Root(k) => Some(k),
                RootSum::Zero => None,
                RootSum::None => return None,
            },
        };
        Some(Root { finite, iso: a.iso.add(&b.iso) })
    }

    /// `a + n·b` for a candidate root; `None` when the finite part leaves
    /// `Ṙ ∪ {0}`.
    pub fn add_multiple(&self, a: &Root, n: i64, b: &Root) -> Option<Root> {
        let l = self.rank();
        let mut c: Vec<i64> = a.finite.map_or(vec![0; l], |i| self.finite.simple_coeffs(i).to_vec());
        if let Some(j) = b.finite {
            for (x, y) in c.iter_mut().zip(self.finite.simple_coeffs(j)) {
                *x += n * y;
            }
        }
        let finite = if c.iter().all(|&x| x == 0) { None } else { Some(self.finite.find(&c)?) };
        Some(Root { finite, iso: a.iso.add_scaled(n, &b.iso) })
    }

    /// Coordinates of `root` in `⟨R⟩ = Q̇ ⊕ Λ`: simple-root coefficients
    /// followed by `Λ`-coordinates.
    pub fn std_coords(&self, root: &Root) -> Result<IntVector> {
        let mut v = match root.finite {
            Some(i) => self.finite.simple_coeffs(i).to_vec(),
            None => vec![0; self.rank()],
        };
        let c = self.lattice().coords(&root.iso).ok_or_else(|| Error::NotInLattice(root.iso.0.clone()))?;
        v.extend_from_slice(&c);
        Ok(IntVector(v))
    }

    pub fn lattice_coords(&self, iso: &[i64]) -> Option<IntVector> {
        self.lattice().coords(iso)
    }

    pub fn in_window(&self, root: &Root, w: Window) -> bool {
        self.lattice().coords(&root.iso).is_some_and(|c| w.contains_coords(&c))
    }

    /// Isotropic parts whose `Λ`-coordinates lie in the window, in
    /// lexicographic coordinate order, with their parity masks.
    pub fn window_points(&self, w: Window) -> Vec<(IntVector, u64)> {
        w.coords(self.nullity())
            .into_iter()
            .map(|c| {
                let mask = parity_mask(&c);
                (self.lattice().from_coords(&c), mask)
            })
            .collect()
    }

    /// All roots with isotropic part in the window, sorted.
    pub fn enumerate(&self, w: Window) -> Vec<Root> {
        let points = self.window_points(w);
        let mut out = Vec::new();
        for (p, mask) in &points {
            if self.r0.contains_mask(*mask) {
                out.push(Root::isotropic(p.clone()));
            }
        }
        for i in 0..self.finite.len() {
            for (p, mask) in &points {
                let ok = match &self.l {
                    Some(l) if self.finite.is_long(i) => l.contains(p),
                    _ => self.s.class_of_mask(*mask).is_some(),
                };
                if ok {
                    out.push(Root::new(Some(i), p.clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Non-isotropic roots with isotropic part in the window, sorted.
    pub fn enumerate_nonisotropic(&self, w: Window) -> Vec<Root> {
        self.enumerate(w).into_iter().filter(|r| !r.is_isotropic()).collect()
    }

    pub fn root_to_data(&self, root: &Root) -> RootData {
        RootData {
            finite: root.finite.map(|i| self.finite.simple_coeffs(i).to_vec()),
            iso: root.iso.0.clone(),
        }
    }

    pub fn root_from_data(&self, data: &RootData) -> Result<Root> {
        if data.iso.len() != self.nullity() {
            return Err(Error::Dimension(format!(
                "isotropic part has length {}, expected {}",
                data.iso.len(),
                self.nullity()
            )));
        }
        let finite = match &data.finite {
            None => None,
            Some(c) if c.len() != self.rank() => {
                return Err(Error::Dimension(format!(
                    "finite part has {} coefficients, expected {}",
                    c.len(),
                    self.rank()
                )))
            }
            Some(c) => Some(
                self.finite
                    .find(c)
                    .ok_or_else(|| Error::NotARoot(format!("{c:?} is not a finite root")))?,
            ),
        };
        Ok(Root::new(finite, IntVector(data.iso.clone())))
    }

    pub fn root_json(&self, root: &Root) -> serde_json::Value {
        serde_json::to_value(self.root_to_data(root)).expect("root data serializes")
    }

    /// The form on roots: the finite form on finite parts; isotropic parts
    /// are null.
    pub fn form(&self, a: &Root, b: &Root) -> i64 {
        match (a.finite, b.finite) {
            (Some(i), Some(j)) => self.finite.form(i, j),
            _ => 0,
        }
    }
}

/// Which index count feeds the index formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `m + 1`, the number of cosets of `2Λ` in `S`.
    CosetCount,
    /// `m`, the number of non-trivial cosets.
    NontrivialCosets,
    /// The formula does not depend on the semilattices.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub window: u32,
    pub max_size: usize,
    pub refl_found: Option<usize>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Invariants {
    pub rank: usize,
    pub nullity: usize,
    pub twist: usize,
    pub twist_order: u64,
    pub ind_r: i64,
    pub refl_r: i64,
    pub lattice_rank: usize,
    pub convention: IndexConvention,
    /// The same formula under other readings, keyed by description.
    pub alternatives: BTreeMap<String, i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResult>,
    pub discrepancy: bool,
}

fn nontrivial(s: &Semilattice) -> i64 {
    s.index() as i64
}

/// Splits `S = S1 ⊕ ⟨S2⟩` back into the component semilattices given in
/// the spec, or the single semilattice for the other presentations.
fn components(e: &Ears) -> Result<(Semilattice, Semilattice)> {
    let t = e.twist();
    let nu = e.nullity();
    let spec = e.spec();
    if spec.s1.is_some() || spec.s2.is_some() || (spec.lattice.is_none() && spec.s.is_none()) {
        let s1 = semilattice_or_trivial(spec.s1.as_ref(), t, "S1")?;
        let s2 = semilattice_or_trivial(spec.s2.as_ref(), nu - t, "S2")?;
        Ok((s1, s2))
    } else {
        Ok((Semilattice::trivial(), e.s().clone()))
    }
}

pub fn invariants(e: &Ears, oracle_window: Option<Window>) -> Result<Invariants> {
    let ty = e.finite_type();
    let (l, nu, t) = (ty.rank() as i64, e.nullity() as i64, e.twist() as i64);
    let mut alternatives = BTreeMap::new();
    let (ind_r, convention) = match (ty.family(), ty.rank()) {
        (Family::A, 1) => {
            let m = nontrivial(e.s());
            alternatives.insert("nontrivial_cosets".to_string(), m - l - nu);
            (m + 1 - l - nu, IndexConvention::CosetCount)
        }
        (Family::B, 2) => {
            let (s1, s2) = components(e)?;
            let (m1, m2) = (nontrivial(&s1), nontrivial(&s2));
            alternatives.insert("coset_count".to_string(), m1 + m2 + 2 - nu);
            (m1 + m2 - nu, IndexConvention::NontrivialCosets)
        }
        (Family::B, _) => {
            let (s1, _) = components(e)?;
            let m1 = nontrivial(&s1);
            alternatives.insert("coset_count".to_string(), m1 + 1 - t);
            (m1 - t, IndexConvention::NontrivialCosets)
        }
        (Family::C, _) => {
            let (_, s2) = components(e)?;
            let m2 = nontrivial(&s2);
            alternatives.insert("coset_count".to_string(), m2 + 1 - (nu - t));
            alternatives.insert("literal_c_row".to_string(), m2 - nu - t);
            (m2 - (nu - t), IndexConvention::NontrivialCosets)
        }
        _ => (0, IndexConvention::Constant),
    };
    let lattice_rank = ty.rank() + e.nullity();
    let twist_order = match e.l() {
        Some(lsemi) => e
            .lattice()
            .sublattice_index(lsemi.lattice())
            .ok_or_else(|| Error::Compatibility("⟨L⟩ is not contained in ⟨S⟩".into()))?,
        None => 1,
    };
    let refl_r = ind_r + lattice_rank as i64;
    let oracle = match oracle_window {
        Some(w) => {
            let max_size = (refl_r.max(lattice_rank as i64) as usize) + 1;
            let found = crate::weyl::minimal_reflectable_size(e, w, max_size)?;
            let refl_found = found.map(|f| f.size);
            Some(OracleResult {
                window: w.bound,
                max_size,
                refl_found,
                agrees: refl_found == Some(refl_r as usize),
            })
        }
        None => None,
    };
    let discrepancy = oracle.as_ref().is_some_and(|o| !o.agrees);
    Ok(Invariants {
        rank: ty.rank(),
        nullity: e.nullity(),
        twist: e.twist(),
        twist_order,
        ind_r,
        refl_r,
        lattice_rank,
        convention,
        alternatives,
        oracle,
        discrepancy,
    })
}

/// Window-scale checks of the defining properties. Failures carry witnesses.
pub fn verify_axioms(e: &Ears, w: Window) -> Report {
    let mut report = Report::new();

    // (a) R⁰ = S + S class-wise; L + L must land there too
    let recomputed = sum_semilattices(e.s(), e.s());
    let a_fail = match recomputed {
        Ok(c) if c == *e.r0_classes() => e.l().and_then(|l| {
            l.reps().iter().flat_map(|x| l.reps().iter().map(move |y| x.add(y))).find(|v| {
                !e.r0_classes().contains(v)
            })
        })
        .map(|v| json!({ "l_plus_l_outside_r0": v.0 })),
        Ok(c) => Some(json!({ "stored": e.r0_classes().classes(), "recomputed": c.classes() })),
        Err(err) => Some(json!({ "error": err.to_string() })),
    };
    report.record("r0_equals_s_plus_s", "isotropic roots are exactly S+S modulo 2Λ", a_fail);

    // (b) S + L = S, kS + L = L
    let b_fail = e.l().and_then(|l| compatibility(e.s(), l, e.k()).err()).map(|m| json!({ "reason": m }));
    report.record("compatibility", "S+L=S and kS+L=L on coset representatives", b_fail);

    let roots = e.enumerate(w);
    let nonisotropic: Vec<&Root> = roots.iter().filter(|r| !r.is_isotropic()).collect();

    // (c) root strings
    let mut c_fail = None;
    'outer: for alpha in &nonisotropic {
        let ai = alpha.finite.expect("non-isotropic");
        for beta in &roots {
            let present: Vec<bool> = (-6i64..=6)
                .map(|n| e.add_multiple(beta, n, alpha).is_some_and(|r| e.is_root(&r)))
                .collect();
            let zero = 6usize;
            let mut d = 0;
            while zero > d && present[zero - d - 1] {
                d += 1;
            }
            let mut u = 0;
            while zero + u + 1 < present.len() && present[zero + u + 1] {
                u += 1;
            }
            let contiguous = present
                .iter()
                .enumerate()
                .all(|(idx, &p)| p == (idx + d >= zero && idx <= zero + u));
            let pairing = beta.finite.map_or(0, |bi| e.finite().pairing(bi, ai));
            if !contiguous || d as i64 - u as i64 != pairing {
                c_fail = Some(json!({
                    "alpha": e.root_json(alpha),
                    "beta": e.root_json(beta),
                    "d": d, "u": u, "pairing": pairing, "contiguous": contiguous,
                }));
                break 'outer;
            }
        }
    }
    report.record(
        "root_strings",
        format!("unbroken strings with d-u = pairing on window {}", w.bound),
        c_fail,
    );

    // (d) indecomposability at window scale
    let n = nonisotropic.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if e.form(nonisotropic[i], nonisotropic[j]) != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let d_fail = (1..n)
        .find(|&i| find(&mut parent, i) != find(&mut parent, 0))
        .map(|i| json!({ "disconnected": [e.root_json(nonisotropic[0]), e.root_json(nonisotropic[i])] }));
    report.record("indecomposable", "non-orthogonality graph on the window is connected", d_fail);

    // (e) reducedness
    let e_fail = nonisotropic
        .iter()
        .find(|r| {
            let c: Vec<i64> = e.finite().simple_coeffs(r.finite.expect("non-isotropic")).iter().map(|x| 2 * x).collect();
            e.finite().find(&c).is_some_and(|k| e.is_root(&Root::new(Some(k), r.iso.scale(2))))
        })
        .map(|r| json!({ "root": e.root_json(r) }));
    report.record("reduced", "2α is never a non-isotropic root", e_fail);

    report
}


#[cfg(test)]
mod oracle_tests {
    use super::*;

    #[test]
    fn twisted_c3_matches_search() {
        let c3: FiniteType = "C3".parse().unwrap();
        let e = Ears::build(&EarsSpec::twisted(c3, &Semilattice::full(IntLattice::standard(1)), &Semilattice::trivial()))
            .unwrap();
        let inv = invariants(&e, Some(Window::new(2))).unwrap();
        let oracle = inv.oracle.unwrap();
        assert_eq!(oracle.refl_found, Some(4));
        assert!(!inv.discrepancy);
        assert_eq!(inv.alternatives["literal_c_row"], -2);
    }

    #[test]
    fn a1_full_rank_two_oracle() {
        let e = Ears::build(&EarsSpec::standard("A1".parse().unwrap(), 2)).unwrap();
        let inv = invariants(&e, Some(Window::new(3))).unwrap();
        assert_eq!(inv.oracle.unwrap().refl_found, Some(4));
    }
}
