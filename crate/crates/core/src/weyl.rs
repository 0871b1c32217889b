//! Reflections on roots, orbit closures on windows, reflectable bases and
//! prefix-sum decompositions.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use itertools::Itertools;

use crate::ears::{Ears, Root, Window};
use crate::error::{Error, Result};
use crate::lattice::{parity_mask, snf, IntMatrix};

/// `w_α(β) = β - ⟨β, α∨⟩ α`; isotropic parts pair trivially.
pub fn reflect(e: &Ears, alpha: &Root, beta: &Root) -> Result<Root> {
    let a = alpha.finite.ok_or(Error::IsotropicRoot)?;
    Ok(match beta.finite {
        None => beta.clone(),
        Some(b) => {
            let p = e.finite().pairing(b, a);
            Root::new(Some(e.finite().reflect(a, b)), beta.iso.add_scaled(-p, &alpha.iso))
        }
    })
}

/// A finite set of non-isotropic roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectableSet(Vec<Root>);

impl ReflectableSet {
    pub fn new(e: &Ears, roots: Vec<Root>) -> Result<Self> {
        for r in &roots {
            if r.is_isotropic() {
                return Err(Error::IsotropicRoot);
            }
            if !e.is_root(r) {
                return Err(Error::NotARoot(format!("{r:?}")));
            }
        }
        if roots.is_empty() {
            return Err(Error::NotARoot("empty set".into()));
        }
        Ok(ReflectableSet(roots))
    }

    pub fn roots(&self) -> &[Root] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Closure of `P` under the reflections `w_β`, `β ∈ P`, computed inside the
/// window widened by `margin` and reported inside `w`.
pub fn orbit_closure(e: &Ears, p: &ReflectableSet, w: Window, margin: u32) -> BTreeSet<Root> {
    let big = w.widen(margin);
    let mut seen: HashSet<Root> = HashSet::new();
    let mut queue: VecDeque<Root> = VecDeque::new();
    for r in p.roots() {
        if e.in_window(r, big) && seen.insert(r.clone()) {
            queue.push_back(r.clone());
        }
    }
    while let Some(r) = queue.pop_front() {
        for a in p.roots() {
            let img = reflect(e, a, &r).expect("P has no isotropic roots");
            if e.in_window(&img, big) && !seen.contains(&img) {
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    seen.into_iter().filter(|r| e.in_window(r, w)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectableCheck {
    pub covered: bool,
    pub missing: Vec<Root>,
}

pub fn check_reflectable(e: &Ears, p: &ReflectableSet, w: Window, margin: u32) -> ReflectableCheck {
    let orbit = orbit_closure(e, p, w, margin);
    let missing: Vec<Root> =
        e.enumerate_nonisotropic(w).into_iter().filter(|r| !orbit.contains(r)).collect();
    ReflectableCheck { covered: missing.is_empty(), missing }
}

/// True when the standard coordinates of `roots` span `⟨R⟩` over `Z`.
pub fn generates_root_lattice(e: &Ears, roots: &[Root]) -> bool {
    let n = e.rank() + e.nullity();
    let cols: Option<Vec<_>> = roots.iter().map(|r| e.std_coords(r).ok()).collect();
    let Some(cols) = cols else { return false };
    let Ok(m) = IntMatrix::from_columns(n, &cols) else { return false };
    let f = snf(&m);
    f.rank() == n && f.diagonal().iter().take(n).all(|&d| d == 1)
}

type State = (usize, u64);

fn state(e: &Ears, r: &Root) -> State {
    let c = e.lattice_coords(&r.iso).expect("roots lie in Λ");
    (r.finite.expect("non-isotropic"), parity_mask(&c))
}

/// All (finite root, parity class) pairs realized by non-isotropic roots.
fn realized_states(e: &Ears) -> HashSet<State> {
    let mut out = HashSet::new();
    for i in 0..e.finite().len() {
        let semi = e.iso_semilattice(i);
        for rep in semi.reps() {
            let c = e.lattice_coords(rep).expect("semilattice lies in Λ");
            out.insert((i, parity_mask(&c)));
        }
    }
    out
}

/// Orbit of `P` in the quotient by `2Λ`, which is finite.
fn quotient_closure(e: &Ears, p: &[State]) -> HashSet<State> {
    let mut seen: HashSet<State> = p.iter().copied().collect();
    let mut queue: VecDeque<State> = p.iter().copied().collect();
    while let Some((b, mb)) = queue.pop_front() {
        for &(a, ma) in p {
            let pr = e.finite().pairing(b, a);
            let img = (e.finite().reflect(a, b), if pr % 2 != 0 { mb ^ ma } else { mb });
            if seen.insert(img) {
                queue.push_back(img);
            }
        }
    }
    seen
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinSearch {
    pub size: usize,
    pub base: Vec<Root>,
    pub candidates: usize,
    pub subsets_tested: u64,
    pub search_space: String,
}

/// Candidates: positive finite parts with isotropic parts from the unit
/// window or the coset representatives of the carrying semilattice.
pub fn search_candidates(e: &Ears, w: Window) -> Vec<Root> {
    let unit = e.window_points(Window::new(1.min(w.bound)));
    let mut out = BTreeSet::new();
    for i in 0..e.finite().n_positive() {
        let semi = e.iso_semilattice(i);
        for (p, _) in &unit {
            if semi.contains(p) {
                out.insert(Root::new(Some(i), p.clone()));
            }
        }
        for rep in semi.reps() {
            let r = Root::new(Some(i), rep.clone());
            if e.in_window(&r, w) {
                out.insert(r);
            }
        }
    }
    out.into_iter().collect()
}

/// Least size of a set of candidate roots whose orbit covers `R^× ∩ w`.
///
/// Subsets are pruned when they do not generate `⟨R⟩` or when their orbit
/// modulo `2Λ` misses a realized class; both conditions are necessary.
pub fn minimal_reflectable_size(e: &Ears, w: Window, max_size: usize) -> Result<Option<MinSearch>> {
    let candidates = search_candidates(e, w);
    let states: Vec<State> = candidates.iter().map(|r| state(e, r)).collect();
    let needed = realized_states(e);
    let target = e.enumerate_nonisotropic(w);
    let mut tested = 0u64;
    let min = e.rank() + e.nullity();
    for size in min.max(1)..=max_size {
        for combo in (0..candidates.len()).combinations(size) {
            tested += 1;
            let subset: Vec<Root> = combo.iter().map(|&i| candidates[i].clone()).collect();
            if !generates_root_lattice(e, &subset) {
                continue;
            }
            let sub_states: Vec<State> = combo.iter().map(|&i| states[i]).collect();
            let closure = quotient_closure(e, &sub_states);
            if !needed.iter().all(|s| closure.contains(s)) {
                continue;
            }
            let p = ReflectableSet::new(e, subset.clone())?;
            let orbit = orbit_closure(e, &p, w, w.bound);
            if target.iter().all(|r| orbit.contains(r)) {
                return Ok(Some(MinSearch {
                    size,
                    base: subset,
                    candidates: candidates.len(),
                    subsets_tested: tested,
                    search_space: format!(
                        "subsets of {} candidates (positive finite part, isotropic part in the unit window or a coset representative), size {}..={}, window {} with margin {}",
                        candidates.len(),
                        min.max(1),
                        max_size,
                        w.bound,
                        w.bound
                    ),
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub sign: i64,
    pub root: Root,
}

/// `target = ε1 β1 + ... + εk βk` with every prefix sum a root.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub terms: Vec<Term>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Partial sums after each term, computed from scratch.
    pub fn prefixes(&self, e: &Ears) -> Vec<Option<Root>> {
        let mut acc = Some(Root::isotropic(crate::lattice::IntVector::zeros(e.nullity())));
        self.terms
            .iter()
            .map(|t| {
                acc = acc.as_ref().and_then(|a| e.add_multiple(a, t.sign, &t.root));
                acc.clone()
            })
            .collect()
    }

    /// Checks that every prefix is a root and that the total is `target`.
    pub fn verify(&self, e: &Ears, target: &Root) -> std::result::Result<(), String> {
        let prefixes = self.prefixes(e);
        for (k, p) in prefixes.iter().enumerate() {
            match p {
                Some(r) if e.is_root(r) => {}
                _ => return Err(format!("prefix {} is not a root: {p:?}", k + 1)),
            }
        }
        match prefixes.last() {
            Some(Some(r)) if r == target => Ok(()),
            last => Err(format!("total {last:?} differs from target {target:?}")),
        }
    }
}

/// Breadth-first tree over `R ∩ w` from 0 with steps `±β`, `β ∈ P`, in `P`
/// order with `+` before `-`.
pub struct DecompositionTree {
    parent: HashMap<Root, (Root, i64, usize)>,
    p: Vec<Root>,
}

impl DecompositionTree {
    pub fn new(e: &Ears, p: &ReflectableSet, w: Window) -> Self {
        let zero = Root::isotropic(crate::lattice::IntVector::zeros(e.nullity()));
        let mut parent = HashMap::new();
        let mut seen: HashSet<Root> = HashSet::from([zero.clone()]);
        let mut queue = VecDeque::from([zero]);
        while let Some(r) = queue.pop_front() {
            for (idx, b) in p.roots().iter().enumerate() {
                for sign in [1i64, -1] {
                    let Some(next) = e.add_multiple(&r, sign, b) else { continue };
                    if seen.contains(&next) || !e.in_window(&next, w) || !e.is_root(&next) {
                        continue;
                    }
                    seen.insert(next.clone());
                    parent.insert(next.clone(), (r.clone(), sign, idx));
                    queue.push_back(next);
                }
            }
        }
        DecompositionTree { parent, p: p.roots().to_vec() }
    }

    pub fn reached(&self) -> impl Iterator<Item = &Root> {
        self.parent.keys()
    }

    pub fn path(&self, target: &Root) -> Result<Decomposition> {
        if !self.parent.contains_key(target) {
            return Err(Error::Unreachable(format!("{target:?}")));
        }
        let mut terms = Vec::new();
        let mut cur = target;
        while let Some((prev, sign, idx)) = self.parent.get(cur) {
            terms.push(Term { sign: *sign, root: self.p[*idx].clone() });
            cur = prev;
        }
        terms.reverse();
        Ok(Decomposition { terms })
    }
}

pub fn decompose(e: &Ears, target: &Root, p: &ReflectableSet, w: Window) -> Result<Decomposition> {
    if !e.in_window(target, w) {
        return Err(Error::Unreachable(format!("{target:?} lies outside window {}", w.bound)));
    }
    DecompositionTree::new(e, p, w).path(target)
}

/// Decompositions of every non-isotropic root in the window.
pub fn decompose_all(e: &Ears, p: &ReflectableSet, w: Window) -> Result<Vec<(Root, Decomposition)>> {
    let tree = DecompositionTree::new(e, p, w);
    e.enumerate_nonisotropic(w)
        .into_iter()
        .map(|r| tree.path(&r).map(|d| (r, d)))
        .collect()
}
