use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use eala_core::characters::{
    build_a1_counterexample, extendability, verify_character, verify_core_character, Character,
    CharacterData, Extendability, LatticeHom,
};
use eala_core::ears::{invariants, verify_axioms, Ears, EarsSpec, Root, RootData, Window};
use eala_core::lattice::IntVector;
use eala_core::lie_torus::{LieTorus, TorusAutomorphism};
use eala_core::report::Report;
use eala_core::weyl::{check_reflectable, decompose, generates_root_lattice, minimal_reflectable_size, orbit_closure, ReflectableSet};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::output::{Outcome, Output};
use crate::{Command, TorusAction, WeylAction};

/// Missing roots listed in a failed reflectability witness.
const MISSING_SHOWN: usize = 10;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn parse<T: DeserializeOwned>(bytes: &[u8], what: &str) -> Result<T> {
    serde_json::from_slice(bytes).with_context(|| format!("parsing {what}"))
}

/// Inline JSON if the argument looks like JSON, otherwise a file path.
fn json_arg<T: DeserializeOwned>(arg: &str, what: &str) -> Result<(Vec<u8>, T)> {
    let trimmed = arg.trim_start();
    let bytes = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.as_bytes().to_vec()
    } else {
        read(Path::new(arg))?
    };
    let value = parse(&bytes, what)?;
    Ok((bytes, value))
}

fn load_ears(path: &Path) -> Result<(Vec<u8>, EarsSpec, Arc<Ears>)> {
    let bytes = read(path)?;
    let spec: EarsSpec = parse(&bytes, "root system spec")?;
    let ears = Ears::build(&spec).with_context(|| format!("building {}", path.display()))?;
    Ok((bytes, spec, Arc::new(ears)))
}

fn load_character(ears: &Arc<Ears>, path: &Path) -> Result<(Vec<u8>, Character)> {
    let bytes = read(path)?;
    let data: CharacterData = parse(&bytes, "character")?;
    let c = Character::from_data(ears.clone(), &data).with_context(|| format!("loading {}", path.display()))?;
    Ok((bytes, c))
}

fn roots_json(e: &Ears, roots: &[Root]) -> Value {
    json!(roots.iter().map(|r| e.root_json(r)).collect::<Vec<_>>())
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::EarsInfo { spec, window, oracle_window } => ears_info(&spec, window, oracle_window),
        Command::CharVerify { spec, character, window } => char_verify(&spec, &character, window),
        Command::CharExtend { spec, character, window } => char_extend(&spec, &character, window),
        Command::Counterexample { nullity, taus, out_dir } => counterexample(nullity, taus.as_deref(), &out_dir),
        Command::Weyl { spec, base, window, action } => weyl(&spec, base.as_deref(), window, action),
        Command::Torus { ell, nu, modulus, window, action } => torus(ell, nu, modulus, window, action),
    }
}

fn ears_info(path: &Path, window: u32, oracle_window: Option<u32>) -> Result<Outcome> {
    let (bytes, spec, e) = load_ears(path)?;
    let w = Window::new(window);
    let inv = invariants(&e, oracle_window.map(Window::new))?;
    let mut report = verify_axioms(&e, w);
    if let Some(o) = &inv.oracle {
        report.record(
            "index_oracle",
            format!("refl search on window {} against rank + ind = {}", o.window, inv.refl_r),
            (!o.agrees).then(|| json!({ "refl_found": o.refl_found, "refl_formula": inv.refl_r })),
        );
    }
    let args = json!({ "spec": path.display().to_string(), "window": window, "oracle_window": oracle_window });
    let result = json!({
        "spec": spec,
        "invariants": inv,
        "roots_in_window": e.enumerate(w).len(),
    });
    Ok(Output::new("ears-info", args, &[&bytes], Some(window), report, result).into_outcome())
}

fn char_verify(spec_path: &Path, char_path: &Path, window: u32) -> Result<Outcome> {
    let (spec_bytes, _, e) = load_ears(spec_path)?;
    let (char_bytes, c) = load_character(&e, char_path)?;
    let w = Window::new(window);
    let mut report = verify_core_character(&c, w)?;
    report.extend(verify_character(&c, w)?);
    let args = json!({ "spec": spec_path.display().to_string(), "character": char_path.display().to_string(), "window": window });
    let result = json!({ "modulus": c.modulus(), "roots_checked": e.enumerate(w).len() });
    Ok(Output::new("char-verify", args, &[&spec_bytes, &char_bytes], Some(window), report, result).into_outcome())
}

fn char_extend(spec_path: &Path, char_path: &Path, window: u32) -> Result<Outcome> {
    let (spec_bytes, _, e) = load_ears(spec_path)?;
    let (char_bytes, c) = load_character(&e, char_path)?;
    let w = Window::new(window);
    let args = json!({ "spec": spec_path.display().to_string(), "character": char_path.display().to_string(), "window": window });
    let inputs: [&[u8]; 2] = [&spec_bytes, &char_bytes];
    let check = verify_character(&c, w)?;
    if !check.passed() {
        return Ok(Output::new("char-extend", args, &inputs, Some(window), check, Value::Null).into_outcome());
    }
    let mut report = Report::new();
    let result = match extendability(&c, w)? {
        Extendability::Sat(hom) => {
            let m = hom.modulus();
            let bad = e
                .enumerate(w)
                .into_iter()
                .filter(|r| c.defined_at(r))
                .map(|r| {
                    let lhs = hom.apply(&e.std_coords(&r)?).rem_euclid(m);
                    Ok((r.clone(), lhs, c.exponent(&r)?.rem_euclid(m)))
                })
                .collect::<eala_core::Result<Vec<_>>>()?
                .into_iter()
                .find(|(_, a, b)| a != b);
            report.record(
                "agreement",
                "extension agrees with the character on every window root",
                bad.map(|(r, a, b)| json!({ "root": e.root_json(&r), "hom": a, "character": b })),
            );
            json!({ "status": "SAT", "modulus": m, "hom_values": hom.std_values().0 })
        }
        Extendability::Unsat(witness) => {
            let recheck = witness.check(&c)?;
            report.record(
                "witness_recheck",
                "coefficients sum to zero in the root lattice while exponents do not",
                (!recheck.valid).then(|| json!(recheck)),
            );
            json!({ "status": "UNSAT", "exact": witness.exact, "witness": witness.to_json(&e), "recheck": recheck })
        }
    };
    Ok(Output::new("char-extend", args, &inputs, Some(window), report, result).into_outcome())
}

fn counterexample(nullity: usize, taus: Option<&str>, out_dir: &Path) -> Result<Outcome> {
    let (taus_bytes, taus) = match taus {
        Some(arg) => {
            let (b, t): (Vec<u8>, Vec<Vec<i64>>) = json_arg(arg, "taus")?;
            (b, Some(t.into_iter().map(IntVector).collect::<Vec<_>>()))
        }
        None => (Vec::new(), None),
    };
    let c = build_a1_counterexample(nullity, taus)?;
    let spec = c.ears().spec().clone();
    let data = c.to_data();
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let spec_file = out_dir.join("spec.json");
    let char_file = out_dir.join("char.json");
    fs::write(&spec_file, serde_json::to_string_pretty(&spec)? + "\n")?;
    fs::write(&char_file, serde_json::to_string_pretty(&data)? + "\n")?;
    let mut report = Report::new();
    report.pass("star_condition", "no 3 to 6 distinct nonzero representatives sum into 2Λ");
    let args = json!({ "nullity": nullity, "taus_given": !taus_bytes.is_empty() });
    let reps: Vec<&[i64]> = c.ears().s().reps().iter().map(|v| &v[..]).collect();
    let result = json!({
        "spec_file": "spec.json",
        "char_file": "char.json",
        "reps": reps,
    });
    Ok(Output::new("counterexample", args, &[&taus_bytes], None, report, result).into_outcome())
}

fn base_set(e: &Ears, base: Option<&str>) -> Result<(Vec<u8>, ReflectableSet)> {
    let Some(arg) = base else { bail!("--base is required for this action") };
    let (bytes, data): (Vec<u8>, Vec<RootData>) = json_arg(arg, "base roots")?;
    let roots = data.iter().map(|d| e.root_from_data(d)).collect::<eala_core::Result<Vec<_>>>()?;
    Ok((bytes, ReflectableSet::new(e, roots)?))
}

fn weyl(path: &Path, base: Option<&str>, window: u32, action: WeylAction) -> Result<Outcome> {
    let (spec_bytes, _, e) = load_ears(path)?;
    let w = Window::new(window);
    let mut report = Report::new();
    let (name, extra, result) = match action {
        WeylAction::Orbit => {
            let (b, p) = base_set(&e, base)?;
            let orbit: Vec<Root> = orbit_closure(&e, &p, w, w.bound).into_iter().filter(|r| e.in_window(r, w)).collect();
            report.pass("orbit", format!("{} roots in the window", orbit.len()));
            ("orbit", b, json!({ "count": orbit.len(), "roots": roots_json(&e, &orbit) }))
        }
        WeylAction::Check => {
            let (b, p) = base_set(&e, base)?;
            let check = check_reflectable(&e, &p, w, w.bound);
            let shown: Vec<Root> = check.missing.iter().take(MISSING_SHOWN).cloned().collect();
            report.record(
                "reflectable",
                "reflection orbit of the base covers every non-isotropic window root",
                (!check.covered).then(|| json!({ "missing": check.missing.len(), "examples": roots_json(&e, &shown) })),
            );
            let generates = generates_root_lattice(&e, p.roots());
            report.record(
                "generates_root_lattice",
                "base spans the root lattice over Z",
                (!generates).then(|| json!({ "base": roots_json(&e, p.roots()) })),
            );
            ("check", b, json!({ "base_size": p.len() }))
        }
        WeylAction::Minsize { max_size } => {
            let found = minimal_reflectable_size(&e, w, max_size)?;
            let result = match &found {
                Some(ms) => json!({
                    "size": ms.size,
                    "base": roots_json(&e, &ms.base),
                    "candidates": ms.candidates,
                    "subsets_tested": ms.subsets_tested,
                    "search_space": ms.search_space,
                }),
                None => Value::Null,
            };
            report.record(
                "minsize",
                format!("reflectable base of size at most {max_size}"),
                found.is_none().then(|| json!({ "max_size": max_size })),
            );
            ("minsize", Vec::new(), result)
        }
        WeylAction::Decompose { target } => {
            let (b, p) = base_set(&e, base)?;
            let (tb, td): (Vec<u8>, RootData) = json_arg(&target, "target root")?;
            let t = e.root_from_data(&td)?;
            let d = decompose(&e, &t, &p, w)?;
            report.record("prefix_sums", "every prefix sum is a root", d.verify(&e, &t).err().map(|m| json!(m)));
            let terms: Vec<Value> = d.terms.iter().map(|t| json!({ "sign": t.sign, "root": e.root_json(&t.root) })).collect();
            ("decompose", [b, tb].concat(), json!({ "target": e.root_json(&t), "terms": terms }))
        }
    };
    let args = json!({ "spec": path.display().to_string(), "action": name, "window": window });
    Ok(Output::new("weyl", args, &[&spec_bytes, &extra], Some(window), report, result).into_outcome())
}

fn torus(ell: usize, nu: usize, modulus: usize, window: u32, action: TorusAction) -> Result<Outcome> {
    let t = LieTorus::new(ell, nu, modulus)?;
    let w = Window::new(window);
    let load_hom = |arg: &str| -> Result<(Vec<u8>, LatticeHom)> {
        let (b, values): (Vec<u8>, Vec<i64>) = json_arg(arg, "hom values")?;
        Ok((b, LatticeHom::from_std_values(modulus as i64, IntVector(values))?))
    };
    let (name, input, report, result) = match action {
        TorusAction::CheckChevalley => {
            ("check-chevalley", Vec::new(), t.verify_automorphism(&t.chevalley(), w)?, Value::Null)
        }
        TorusAction::CheckJacobi => {
            let mut report = t.verify_jacobi(w)?;
            report.extend(t.verify_grading(w)?);
            ("check-jacobi", Vec::new(), report, Value::Null)
        }
        TorusAction::CheckDiagonal { hom } => {
            let (b, hom) = load_hom(&hom)?;
            let d = t.diagonal_from_hom(&hom)?;
            let mut report = t.verify_automorphism(&d, w)?;
            let composite = t.verify_automorphism(&TorusAutomorphism::compose(t.chevalley(), d), w)?;
            for mut c in composite.checks {
                c.name = format!("chevalley_composite.{}", c.name);
                report.checks.push(c);
            }
            ("check-diagonal", b, report, Value::Null)
        }
        TorusAction::Extract { hom } => {
            let (b, hom) = load_hom(&hom)?;
            let d = t.diagonal_from_hom(&hom)?;
            match t.extract_core_character(&d, w) {
                Ok((c, mut report)) => {
                    report.extend(verify_character(&c, w)?);
                    let e = t.ears();
                    let m = modulus as i64;
                    let mismatch = e
                        .enumerate(w)
                        .into_iter()
                        .map(|r| Ok((hom.apply(&e.std_coords(&r)?).rem_euclid(m), c.exponent(&r)?.rem_euclid(m), r)))
                        .collect::<eala_core::Result<Vec<_>>>()?
                        .into_iter()
                        .find(|(a, b, _)| a != b);
                    report.record(
                        "round_trip",
                        "extracted exponents equal the hom on every window root",
                        mismatch.map(|(a, b, r)| json!({ "root": e.root_json(&r), "hom": a, "extracted": b })),
                    );
                    ("extract", b, report, json!({ "character": c.to_data() }))
                }
                Err(err) => {
                    let mut report = Report::new();
                    report.fail("extract", "extraction of a core-character", json!(err.to_string()));
                    ("extract", b, report, Value::Null)
                }
            }
        }
    };
    let args = json!({ "ell": ell, "nu": nu, "modulus": modulus, "action": name, "window": window });
    Ok(Output::new("torus", args, &[&input], Some(window), report, result).into_outcome())
}
