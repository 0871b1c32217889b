//! Multiloop realization of the centerless core of type `A_ℓ`: traceless
//! `(ℓ+1) × (ℓ+1)` matrices over Laurent polynomials in `ν` variables, with
//! scalars in the group ring `Q[Z/m]`.
//!
//! The matrix unit `e_ij` (`i ≠ j`) tensored with `t^λ` spans the root space
//! of `e_i - e_j + λ`; the Cartan elements `e_kk - e_{k+1,k+1}` tensored
//! with `t^λ` span the core part of the isotropic space of degree `λ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde_json::json;

use crate::characters::{verify_core_character, Character, LatticeHom};
use crate::ears::{Ears, EarsSpec, Root, Window};
use crate::error::{Error, Result};
use crate::lattice::IntVector;
use crate::report::Report;
use crate::rootsys::{Family, FiniteType};

type Q = Ratio<i64>;

/// An element of `Q[Z/m]`; `ζ^k` is the basis element `k mod m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    coeffs: Vec<Q>,
}

impl CycScalar {
    pub fn zero(m: usize) -> Self {
        CycScalar { coeffs: vec![Q::zero(); m] }
    }

    pub fn from_rational(m: usize, q: Q) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[0] = q;
        s
    }

    pub fn one(m: usize) -> Self {
        Self::from_rational(m, Q::one())
    }

    /// `ζ^k`
    pub fn unit(m: usize, k: i64) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[k.rem_euclid(m as i64) as usize] = Q::one();
        s
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(k)` when the scalar is exactly `ζ^k`.
    pub fn as_unit(&self) -> Option<i64> {
        let mut nonzero = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        match (nonzero.next(), nonzero.next()) {
            (Some((k, c)), None) if c.is_one() => Some(k as i64),
            _ => None,
        }
    }

    /// Multiplication by `ζ^k`.
    pub fn rotate(&self, k: i64) -> Self {
        let m = self.modulus();
        let k = k.rem_euclid(m as i64) as usize;
        let mut out = Self::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(i + k) % m] = *c;
        }
        out
    }

    pub fn scale(&self, q: Q) -> Self {
        CycScalar { coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }
}

impl Add for &CycScalar {
    type Output = CycScalar;
    fn add(self, o: &CycScalar) -> CycScalar {
        CycScalar { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, o: &CycScalar) -> CycScalar {
        CycScalar { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, o: &CycScalar) -> CycScalar {
        let m = self.modulus();
        let mut out = CycScalar::zero(m);
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                out.coeffs[(i + j) % m] += a * b;
            }
        }
        out
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| if k == 0 { format!("{c}") } else { format!("{c}ζ^{k}") })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Matrix part of a basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// `e_ij`, `i ≠ j`
    Unit(usize, usize),
    /// `e_kk - e_{k+1,k+1}`
    Cartan(usize),
}

impl Gen {
    fn entries(self) -> Vec<(usize, usize, i64)> {
        match self {
            Gen::Unit(i, j) => vec![(i, j, 1)],
            Gen::Cartan(k) => vec![(k, k, 1), (k + 1, k + 1, -1)],
        }
    }

    fn transpose(self) -> Gen {
        match self {
            Gen::Unit(i, j) => Gen::Unit(j, i),
            c => c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusParams {
    pub ell: usize,
    pub nu: usize,
    pub modulus: usize,
}

/// A finite combination of `gen ⊗ t^λ` in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    params: TorusParams,
    terms: BTreeMap<(Gen, IntVector), CycScalar>,
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|((g, l), c)| (format!("{g:?}⊗t^{l:?}"), c))).finish()
    }
}

impl TorusElement {
    pub fn zero(params: TorusParams) -> Self {
        TorusElement { params, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<(Gen, IntVector), CycScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, gen: Gen, degree: IntVector, c: CycScalar) {
        let key = (gen, degree);
        let merged = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn add(&self, other: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for ((g, l), c) in &other.terms {
            out.add_term(*g, l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for ((g, l), c) in &other.terms {
            out.add_term(*g, l.clone(), -c);
        }
        out
    }

    /// The single term, if this is a scalar multiple of one basis element.
    pub fn single_term(&self) -> Option<(Gen, &IntVector, &CycScalar)> {
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (Some(((g, l), c)), None) => Some((*g, l, c)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LieTorus {
    params: TorusParams,
    ears: Arc<Ears>,
}

impl LieTorus {
    pub fn new(ell: usize, nu: usize, modulus: usize) -> Result<Self> {
        if ell < 2 {
            return Err(Error::TorusParams(format!("rank {ell} < 2")));
        }
        if modulus < 1 {
            return Err(Error::ZeroModulus);
        }
        let ty = FiniteType::new(Family::A, ell)?;
        let ears = Arc::new(Ears::build(&EarsSpec::standard(ty, nu))?);
        Ok(LieTorus { params: TorusParams { ell, nu, modulus }, ears })
    }

    pub fn params(&self) -> TorusParams {
        self.params
    }

    pub fn ears(&self) -> &Arc<Ears> {
        &self.ears
    }

    pub fn size(&self) -> usize {
        self.params.ell + 1
    }

    pub fn basis_element(&self, gen: Gen, degree: IntVector) -> TorusElement {
        let mut x = TorusElement::zero(self.params);
        x.add_term(gen, degree, CycScalar::one(self.params.modulus));
        x
    }

    pub fn gens(&self) -> Vec<Gen> {
        let n = self.size();
        let mut out: Vec<Gen> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| Gen::Unit(i, j))).collect();
        out.extend((0..self.params.ell).map(Gen::Cartan));
        out
    }

    /// All `gen ⊗ t^λ` with `|λ|∞ ≤ N`.
    pub fn basis(&self, w: Window) -> Vec<(Gen, IntVector)> {
        let degrees = w.coords(self.params.nu);
        self.gens()
            .into_iter()
            .flat_map(|g| degrees.iter().map(move |d| (g, IntVector(d.clone()))))
            .collect()
    }

    /// Simple-root coefficients of the finite degree of `gen`.
    pub fn finite_degree(&self, gen: Gen) -> Vec<i64> {
        let mut c = vec![0; self.params.ell];
        if let Gen::Unit(i, j) = gen {
            let (lo, hi, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
            c[lo..hi].iter_mut().for_each(|x| *x = s);
        }
        c
    }

    /// The root whose space contains `gen ⊗ t^λ`.
    pub fn root_of(&self, gen: Gen, degree: &IntVector) -> Root {
        let c = self.finite_degree(gen);
        let finite = match gen {
            Gen::Unit(..) => Some(self.ears.finite().find(&c).expect("matrix units carry roots")),
            Gen::Cartan(_) => None,
        };
        Root::new(finite, degree.clone())
    }

    /// Basis element spanning the root space of a non-isotropic root.
    pub fn root_vector(&self, root: &Root) -> Option<Gen> {
        let i = root.finite?;
        let c = self.ears.finite().simple_coeffs(i);
        let n = self.size();
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).map(|(a, b)| Gen::Unit(a, b)).find(
            |&g| self.finite_degree(g) == c,
        )
    }

    fn check(&self, x: &TorusElement) -> Result<()> {
        if x.params != self.params {
            return Err(Error::TorusParams(format!("{:?} vs {:?}", x.params, self.params)));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &TorusElement, y: &TorusElement) -> Result<TorusElement> {
        self.check(x)?;
        self.check(y)?;
        let n = self.size();
        let mut out = TorusElement::zero(self.params);
        for ((gx, lx), cx) in &x.terms {
            for ((gy, ly), cy) in &y.terms {
                let coeff = cx * cy;
                let degree = lx.add(ly);
                let mut m: BTreeMap<(usize, usize), i64> = BTreeMap::new();
                for (a, b, u) in gx.entries() {
                    for (c, d, v) in gy.entries() {
                        if b == c {
                            *m.entry((a, d)).or_default() += u * v;
                        }
                        if d == a {
                            *m.entry((c, b)).or_default() -= u * v;
                        }
                    }
                }
                let mut diag = vec![0i64; n];
                for ((a, b), v) in m {
                    if v == 0 {
                        continue;
                    }
                    if a == b {
                        diag[a] = v;
                    } else {
                        out.add_term(Gen::Unit(a, b), degree.clone(), coeff.scale(Q::from_integer(v)));
                    }
                }
                let mut running = 0;
                for (k, d) in diag.iter().take(n - 1).enumerate() {
                    running += d;
                    if running != 0 {
                        out.add_term(Gen::Cartan(k), degree.clone(), coeff.scale(Q::from_integer(running)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `trace(x y)` summed over pairs of terms with opposite degrees.
    pub fn trace_form(&self, x: &TorusElement, y: &TorusElement) -> CycScalar {
        let mut total = CycScalar::zero(self.params.modulus);
        for ((gx, lx), cx) in &x.terms {
            for ((gy, ly), cy) in &y.terms {
                if !lx.add(ly).is_zero() {
                    continue;
                }
                let mut tr = 0i64;
                for (a, b, u) in gx.entries() {
                    for (c, d, v) in gy.entries() {
                        if b == c && d == a {
                            tr += u * v;
                        }
                    }
                }
                if tr != 0 {
                    total = &total + &(cx * cy).scale(Q::from_integer(tr));
                }
            }
        }
        total
    }

    pub fn chevalley(&self) -> TorusAutomorphism {
        TorusAutomorphism::Chevalley
    }

    pub fn diagonal_from_hom(&self, hom: &LatticeHom) -> Result<TorusAutomorphism> {
        if hom.modulus() as usize != self.params.modulus {
            return Err(Error::TorusParams(format!(
                "hom modulus {} differs from torus modulus {}",
                hom.modulus(),
                self.params.modulus
            )));
        }
        if hom.std_values().dim() != self.params.ell + self.params.nu {
            return Err(Error::Dimension(format!(
                "hom has {} values, expected {}",
                hom.std_values().dim(),
                self.params.ell + self.params.nu
            )));
        }
        Ok(TorusAutomorphism::Diagonal(hom.clone()))
    }

    pub fn apply(&self, a: &TorusAutomorphism, x: &TorusElement) -> Result<TorusElement> {
        self.check(x)?;
        let mut out = TorusElement::zero(self.params);
        match a {
            TorusAutomorphism::Composite(left, right) => return self.apply(left, &self.apply(right, x)?),
            TorusAutomorphism::Chevalley => {
                for ((g, l), c) in &x.terms {
                    out.add_term(g.transpose(), l.neg(), -c);
                }
            }
            TorusAutomorphism::Diagonal(hom) => {
                for ((g, l), c) in &x.terms {
                    let mut std = self.finite_degree(*g);
                    std.extend_from_slice(l);
                    out.add_term(*g, l.clone(), c.rotate(hom.apply(&std)));
                }
            }
            TorusAutomorphism::Scaling(map) => {
                for ((g, l), c) in &x.terms {
                    let k = map.get(&(*g, l.clone())).copied().unwrap_or(0);
                    out.add_term(*g, l.clone(), c.rotate(k));
                }
            }
        }
        Ok(out)
    }

    fn apply_power(&self, a: &TorusAutomorphism, x: &TorusElement, k: usize) -> Result<TorusElement> {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.apply(a, &y)?;
        }
        Ok(y)
    }

    /// Jacobi identity on all triples of basis elements in the window.
    pub fn verify_jacobi(&self, w: Window) -> Result<Report> {
        let basis: Vec<TorusElement> = self.basis(w).into_iter().map(|(g, l)| self.basis_element(g, l)).collect();
        let n = basis.len();
        // brackets of pairs are reused across triples
        let mut pair: Vec<Vec<TorusElement>> = Vec::with_capacity(n);
        for x in &basis {
            pair.push(basis.iter().map(|y| self.bracket(x, y)).collect::<Result<_>>()?);
        }
        let mut failure = None;
        let mut count = 0u64;
        'outer: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    count += 1;
                    let s = self
                        .bracket(&basis[i], &pair[j][k])?
                        .add(&self.bracket(&basis[j], &pair[k][i])?)
                        .add(&self.bracket(&basis[k], &pair[i][j])?);
                    if !s.is_zero() {
                        failure = Some(json!({ "triple": [format!("{:?}", basis[i]), format!("{:?}", basis[j]), format!("{:?}", basis[k])] }));
                        break 'outer;
                    }
                }
            }
        }
        let mut report = Report::new();
        report.record("jacobi", format!("{count} basis triples with degree bound {}", w.bound), failure);
        Ok(report)
    }

    /// Brackets add degrees and vanish when the degree sum is not a root.
    pub fn verify_grading(&self, w: Window) -> Result<Report> {
        let basis = self.basis(w);
        let mut failure = None;
        'outer: for (gx, lx) in &basis {
            for (gy, ly) in &basis {
                let z = self.bracket(&self.basis_element(*gx, lx.clone()), &self.basis_element(*gy, ly.clone()))?;
                let (rx, ry) = (self.root_of(*gx, lx), self.root_of(*gy, ly));
                let expected = self.ears.add(&rx, &ry).filter(|r| self.ears.is_root(r));
                let ok = match &expected {
                    None => z.is_zero(),
                    Some(r) => z.terms.keys().all(|(g, l)| self.root_of(*g, l) == *r),
                };
                if !ok {
                    failure = Some(json!({ "x": format!("{gx:?}⊗{lx:?}"), "y": format!("{gy:?}⊗{ly:?}") }));
                    break 'outer;
                }
            }
        }
        let mut report = Report::new();
        report.record("grading", format!("{} basis pairs with degree bound {}", basis.len().pow(2), w.bound), failure);
        Ok(report)
    }

    pub fn verify_automorphism(&self, a: &TorusAutomorphism, w: Window) -> Result<Report> {
        let basis = self.basis(w);
        let elems: Vec<TorusElement> = basis.iter().map(|(g, l)| self.basis_element(*g, l.clone())).collect();
        let images: Vec<TorusElement> = elems.iter().map(|x| self.apply(a, x)).collect::<Result<_>>()?;
        let mut report = Report::new();

        let mut hom_fail = None;
        'outer: for i in 0..elems.len() {
            for j in 0..elems.len() {
                let lhs = self.apply(a, &self.bracket(&elems[i], &elems[j])?)?;
                let rhs = self.bracket(&images[i], &images[j])?;
                if lhs != rhs {
                    hom_fail = Some(json!({
                        "x": format!("{:?}", elems[i]), "y": format!("{:?}", elems[j]),
                        "image_of_bracket": format!("{lhs:?}"), "bracket_of_images": format!("{rhs:?}"),
                    }));
                    break 'outer;
                }
            }
        }
        report.record("bracket_compatible", format!("{} basis pairs on window {}", elems.len().pow(2), w.bound), hom_fail);

        let sign = a.degree_sign();
        let space_fail = basis.iter().zip(&images).find_map(|((g, l), img)| {
            let r = self.root_of(*g, l);
            let target = if sign > 0 { r.clone() } else { self.ears.neg(&r) };
            let ok = !img.is_zero() && img.terms.keys().all(|(h, m)| self.root_of(*h, m) == target);
            (!ok).then(|| json!({ "element": format!("{g:?}⊗{l:?}"), "image": format!("{img:?}") }))
        });
        let desc = if sign > 0 { "maps each root space to itself" } else { "maps E_α onto E_-α" };
        report.record("root_spaces", desc, space_fail);

        let order = a.expected_order(self.params.modulus);
        let order_fail = elems
            .iter()
            .map(|x| self.apply_power(a, x, order).map(|y| (x, y)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(x, y)| *x != y)
            .map(|(x, y)| json!({ "element": format!("{x:?}"), "power_image": format!("{y:?}") }));
        report.record("order", format!("a^{order} = id on the window basis"), order_fail);
        if matches!(a, TorusAutomorphism::Chevalley) {
            let moved = elems.iter().zip(&images).any(|(x, y)| x != y);
            report.record(
                "nontrivial",
                "the involution is not the identity",
                (!moved).then(|| json!({ "reason": "identity on the window" })),
            );
        }

        let mut form_fail = None;
        'form: for i in 0..elems.len() {
            for j in 0..elems.len() {
                if !basis[i].1.add(&basis[j].1).is_zero() {
                    continue;
                }
                let before = self.trace_form(&elems[i], &elems[j]);
                let after = self.trace_form(&images[i], &images[j]);
                if before != after {
                    form_fail = Some(json!({
                        "x": format!("{:?}", elems[i]), "y": format!("{:?}", elems[j]),
                        "before": format!("{before:?}"), "after": format!("{after:?}"),
                    }));
                    break 'form;
                }
            }
        }
        report.record("form_preserved", "trace form on pairs of opposite degree", form_fail);
        Ok(report)
    }

    /// Reads the core-character of a diagonal Cartan automorphism off the
    /// window.
    pub fn extract_core_character(&self, a: &TorusAutomorphism, w: Window) -> Result<(Character, Report)> {
        let m = self.params.modulus as i64;
        let zero = IntVector::zeros(self.params.nu);
        let mut report = Report::new();
        for k in 0..self.params.ell {
            let h = self.basis_element(Gen::Cartan(k), zero.clone());
            if self.apply(a, &h)? != h {
                return Err(Error::NotCartan(format!("Cartan element {k} is moved")));
            }
        }
        report.pass("fixes_h", "every h ∈ H is fixed");

        let roots = self.ears.enumerate(w);
        let mut eta: BTreeMap<Root, i64> = BTreeMap::new();
        for r in roots.iter().filter(|r| !r.is_isotropic()) {
            let g = self.root_vector(r).expect("non-isotropic roots have root vectors");
            let img = self.apply(a, &self.basis_element(g, r.iso.clone()))?;
            let k = match img.single_term() {
                Some((h, l, c)) if h == g && *l == r.iso => c.as_unit(),
                _ => None,
            }
            .ok_or_else(|| Error::NotDiagonal(format!("{r:?} ↦ {img:?}")))?;
            eta.insert(r.clone(), k);
        }
        report.pass("diagonal", format!("{} non-isotropic root spaces act by roots of unity", eta.len()));

        let mut iso_eta: BTreeMap<Root, i64> = BTreeMap::new();
        let mut admissible = 0u64;
        for sigma in roots.iter().filter(|r| r.is_isotropic()) {
            let mut value: Option<(i64, &Root)> = None;
            for alpha in eta.keys() {
                let shifted = Root::new(alpha.finite, alpha.iso.add(&sigma.iso));
                let Some(&top) = eta.get(&shifted) else { continue };
                let Some(&bottom) = eta.get(&self.ears.neg(alpha)) else { continue };
                admissible += 1;
                let v = (top + bottom).rem_euclid(m);
                match value {
                    None => value = Some((v, alpha)),
                    Some((u, first)) if u != v => {
                        return Err(Error::EtaDisagreement(format!(
                            "σ = {sigma:?}: {u} via {first:?}, {v} via {alpha:?}"
                        )))
                    }
                    Some(_) => {}
                }
            }
            let (v, _) = value.ok_or_else(|| Error::EtaDisagreement(format!("no admissible α for {sigma:?}")))?;
            for k in 0..self.params.ell {
                let h = self.basis_element(Gen::Cartan(k), sigma.iso.clone());
                let expected = {
                    let mut e = TorusElement::zero(self.params);
                    e.add_term(Gen::Cartan(k), sigma.iso.clone(), CycScalar::unit(self.params.modulus, v));
                    e
                };
                let got = self.apply(a, &h)?;
                if got != expected {
                    report.fail(
                        "isotropic_action",
                        "Cartan ⊗ t^σ scales by η_σ",
                        json!({ "sigma": sigma.iso.0, "cartan": k, "image": format!("{got:?}"), "eta": v }),
                    );
                }
            }
            iso_eta.insert(sigma.clone(), v);
        }
        eta.extend(iso_eta);
        report.pass("eta_well_defined", format!("η^α_σ independent of α over {admissible} admissible pairs"));
        if report.get("isotropic_action").is_none() {
            report.pass("isotropic_action", "Cartan ⊗ t^σ scales by η_σ");
        }

        let character = Character::table(self.ears.clone(), m, w, eta)?;
        report.extend(verify_core_character(&character, w)?);
        Ok((character, report))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusAutomorphism {
    /// `x ⊗ t^λ ↦ -xᵀ ⊗ t^-λ`
    Chevalley,
    /// `x ⊗ t^λ ↦ ζ^hom(deg) x ⊗ t^λ`
    Diagonal(LatticeHom),
    /// Scales each listed basis element by `ζ^k` and fixes the rest.
    Scaling(BTreeMap<(Gen, IntVector), i64>),
    /// `left ∘ right`
    Composite(Box<TorusAutomorphism>, Box<TorusAutomorphism>),
}

impl TorusAutomorphism {
    pub fn compose(left: TorusAutomorphism, right: TorusAutomorphism) -> Self {
        TorusAutomorphism::Composite(Box::new(left), Box::new(right))
    }

    /// `+1` if root spaces are preserved, `-1` if `E_α` goes to `E_-α`.
    pub fn degree_sign(&self) -> i64 {
        match self {
            TorusAutomorphism::Chevalley => -1,
            TorusAutomorphism::Composite(l, r) => l.degree_sign() * r.degree_sign(),
            _ => 1,
        }
    }

    /// The order the map is expected to divide.
    pub fn expected_order(&self, modulus: usize) -> usize {
        match self {
            TorusAutomorphism::Chevalley => 2,
            TorusAutomorphism::Composite(..) if self.degree_sign() < 0 => 2,
            _ => modulus,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(ell: usize, nu: usize, m: usize) -> LieTorus {
        LieTorus::new(ell, nu, m).unwrap()
    }

    fn v(x: &[i64]) -> IntVector {
        IntVector(x.to_vec())
    }

    #[test]
    fn cyc_scalar_arithmetic() {
        let z = CycScalar::unit(4, 1);
        assert_eq!(&(&z * &z) * &(&z * &z), CycScalar::one(4));
        assert_eq!(z.rotate(3).as_unit(), Some(0));
        assert_eq!((&z + &z).as_unit(), None);
        assert!((&z - &z).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let t = torus(2, 1, 2);
        let x = t.basis_element(Gen::Unit(0, 1), v(&[1]));
        let y = t.basis_element(Gen::Unit(1, 0), v(&[-1]));
        assert_eq!(t.bracket(&x, &y).unwrap(), t.basis_element(Gen::Cartan(0), v(&[0])));
        let a = t.basis_element(Gen::Unit(0, 1), v(&[0]));
        let b = t.basis_element(Gen::Unit(1, 2), v(&[0]));
        assert_eq!(t.bracket(&a, &b).unwrap(), t.basis_element(Gen::Unit(0, 2), v(&[0])));
        let h = t.basis_element(Gen::Cartan(0), v(&[0]));
        let e = t.basis_element(Gen::Unit(0, 1), v(&[2]));
        let mut twice = TorusElement::zero(t.params());
        twice.add_term(Gen::Unit(0, 1), v(&[2]), CycScalar::from_rational(2, Q::from_integer(2)));
        assert_eq!(t.bracket(&h, &e).unwrap(), twice);
        // antisymmetry
        assert_eq!(t.bracket(&e, &h).unwrap(), TorusElement::zero(t.params()).sub(&twice));
    }

    #[test]
    fn bracket_rejects_mismatch() {
        let (t, s) = (torus(2, 1, 2), torus(2, 1, 3));
        let x = t.basis_element(Gen::Cartan(0), v(&[0]));
        let y = s.basis_element(Gen::Cartan(0), v(&[0]));
        assert!(matches!(t.bracket(&x, &y), Err(Error::TorusParams(_))));
        assert!(matches!(LieTorus::new(1, 1, 2), Err(Error::TorusParams(_))));
    }

    #[test]
    fn chevalley_examples() {
        let t = torus(2, 1, 2);
        let c = t.chevalley();
        let x = t.basis_element(Gen::Unit(0, 1), v(&[1]));
        let mut expected = TorusElement::zero(t.params());
        expected.add_term(Gen::Unit(1, 0), v(&[-1]), -&CycScalar::one(2));
        assert_eq!(t.apply(&c, &x).unwrap(), expected);
        let h = t.basis_element(Gen::Cartan(0), v(&[0]));
        assert_eq!(t.apply(&c, &h).unwrap(), TorusElement::zero(t.params()).sub(&h));
        assert!(t.verify_automorphism(&c, Window::new(1)).unwrap().passed());
    }

    #[test]
    fn diagonal_examples() {
        let t = torus(2, 1, 2);
        let hom = LatticeHom::from_std_values(2, v(&[1, 0, 0])).unwrap();
        let d = t.diagonal_from_hom(&hom).unwrap();
        let e12 = t.basis_element(Gen::Unit(0, 1), v(&[1]));
        let e23 = t.basis_element(Gen::Unit(1, 2), v(&[1]));
        let mut neg = TorusElement::zero(t.params());
        neg.add_term(Gen::Unit(0, 1), v(&[1]), CycScalar::unit(2, 1));
        assert_eq!(t.apply(&d, &e12).unwrap(), neg);
        assert_eq!(t.apply(&d, &e23).unwrap(), e23);
        assert!(t.verify_automorphism(&d, Window::new(1)).unwrap().passed());
        let wrong = LatticeHom::from_std_values(3, v(&[1, 0, 0])).unwrap();
        assert!(matches!(t.diagonal_from_hom(&wrong), Err(Error::TorusParams(_))));
    }

    #[test]
    fn composite_negates_h() {
        let t = torus(2, 1, 4);
        let hom = LatticeHom::from_std_values(4, v(&[1, 3, 2])).unwrap();
        let a = TorusAutomorphism::compose(t.chevalley(), t.diagonal_from_hom(&hom).unwrap());
        let h = t.basis_element(Gen::Cartan(1), v(&[0]));
        assert_eq!(t.apply(&a, &h).unwrap(), TorusElement::zero(t.params()).sub(&h));
        assert!(t.verify_automorphism(&a, Window::new(1)).unwrap().passed());
    }

    #[test]
    fn identity_extracts_trivial_character() {
        let t = torus(2, 1, 3);
        let id = t.diagonal_from_hom(&LatticeHom::from_std_values(3, IntVector::zeros(3)).unwrap()).unwrap();
        let (c, report) = t.extract_core_character(&id, Window::new(1)).unwrap();
        assert!(report.passed());
        for r in t.ears().enumerate(Window::new(1)) {
            assert_eq!(c.exponent(&r).unwrap(), 0);
        }
    }

    #[test]
    fn extraction_errors() {
        let t = torus(2, 1, 2);
        assert!(matches!(t.extract_core_character(&t.chevalley(), Window::new(1)), Err(Error::NotCartan(_))));
        let mut map = BTreeMap::new();
        map.insert((Gen::Unit(0, 1), v(&[1])), 1);
        let bad = TorusAutomorphism::Scaling(map);
        assert!(matches!(t.extract_core_character(&bad, Window::new(1)), Err(Error::EtaDisagreement(_))));
        let report = t.verify_automorphism(&bad, Window::new(1)).unwrap();
        assert!(!report.get("bracket_compatible").unwrap().passed);
    }

    #[test]
    fn jacobi_and_grading_small() {
        let t = torus(2, 1, 2);
        assert!(t.verify_jacobi(Window::new(0)).unwrap().passed());
        assert!(t.verify_grading(Window::new(1)).unwrap().passed());
    }
}
