use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::instance::{Direction, Instance};
use super::rule::DeductionRule;
use crate::category::{Arrow, Gluing, Span, Square};
use crate::colimit::{paste_check, pushout, verify_pushout};
use crate::eqlogic::{is_pleomorphism, EqSpec, PleoVerdict, SpecMorphism, Term};
use crate::error::{Error, Result};

fn check_instance(rule: &DeductionRule, inst: &Instance) -> Result<()> {
    if inst.morphism().domain() != rule.hypothesis() {
        return Err(Error::InstanceMismatch(format!(
            "instance is not an instance of the hypothesis of `{}`",
            rule.name()
        )));
    }
    Ok(())
}

fn accept(label: &str, verdict: &PleoVerdict, assume: bool) -> Result<()> {
    match verdict {
        PleoVerdict::Verified { .. } => Ok(()),
        PleoVerdict::Unknown { .. } if assume => Ok(()),
        PleoVerdict::Unknown { reason, .. } => Err(Error::PleoVerificationFailed {
            morphism: label.to_string(),
            reason: reason.clone(),
        }),
        PleoVerdict::Refuted { refutation } => Err(Error::PleoVerificationFailed {
            morphism: label.to_string(),
            reason: format!("refuted: {refutation:?}"),
        }),
    }
}

/// What a classic deduction step built: the pushout of `h` along `ς_H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicStep {
    pub rule: String,
    /// `h_1 : Ss_H -> Ss_P`
    pub h1: SpecMorphism,
    /// `ς_P : P -> Ss_P`
    pub sigma_p: SpecMorphism,
    /// `ς_C = c ; ς_P`
    pub sigma_c: SpecMorphism,
    pub pushout_verified: bool,
    pub h1_verdict: PleoVerdict,
}

impl ClassicStep {
    pub fn result(&self) -> &EqSpec {
        self.h1.codomain()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule,
            "mode": "classic",
            "objects": {
                "Ss_H": self.h1.domain().to_text(),
                "Ss_P": self.h1.codomain().to_text(),
            },
            "faces": [{"name": "pushout", "requirement": "pushout", "holds": self.pushout_verified}],
            "verdicts": {"h_1": self.h1_verdict},
        })
    }
}

/// The deduction step of a rule `c / h` on an instance `ς_H` of `H`: push
/// `h` out along `ς_H`; the conclusion's instance is `c ; ς_P`.
pub fn classic_step(rule: &DeductionRule, inst: &Instance, depth: usize, assume_pleo: bool) -> Result<(Instance, ClassicStep)> {
    check_instance(rule, inst)?;
    let po = pushout(&Span::new(inst.morphism().clone(), rule.h().clone())?)?;
    let pushout_verified = verify_pushout(&po.square())?;
    let (h1, sigma_p) = (po.inject_left().clone(), po.inject_right().clone());
    let sigma_c = rule.c().then(&sigma_p)?;
    let verdict = is_pleomorphism(&h1, depth, None)?;
    let assumed = !verdict.is_verified();
    accept("h_1", &verdict, assume_pleo || rule.assumed())?;
    let evidence = inst
        .evidence()
        .clone()
        .with("h_1", h1.clone(), Direction::Forward, verdict.clone(), assumed)?;
    let anchor = match inst.anchor() {
        Some(a) => Some(a.then(&h1)?),
        None => None,
    };
    let next = Instance::new(sigma_c.clone(), evidence, anchor)?;
    Ok((
        next,
        ClassicStep {
            rule: rule.name().to_string(),
            h1,
            sigma_p,
            sigma_c,
            pushout_verified,
            h1_verdict: verdict,
        },
    ))
}

/// The left square of a pleopushout: `ς_K : K -> Ss_K` and a pleomorphism
/// `l_1 : Ss_K -> Ss_H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub to_kernel: SpecMorphism,
    pub inclusion: SpecMorphism,
}

impl Witness {
    pub fn kernel(&self) -> &EqSpec {
        self.to_kernel.codomain()
    }

    /// `Ss_K = Ss_H`, `ς_K = l ; ς_H`, `l_1 = id`.
    pub fn identity(rule: &DeductionRule, inst: &Instance) -> Result<Witness> {
        let span = rule.span().ok_or_else(|| Error::MissingSpan(rule.name().to_string()))?;
        check_instance(rule, inst)?;
        Ok(Witness {
            to_kernel: span.left().then(inst.morphism())?,
            inclusion: SpecMorphism::identity(inst.target()),
        })
    }
}

/// The twelve morphisms of the cube: top face `K, H, C, P`, bottom face
/// `Ss_K, Ss_H, Ss_C, Ss_P`, joined by the four `ς`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeDiagram {
    pub l: SpecMorphism,
    pub r: SpecMorphism,
    pub h: SpecMorphism,
    pub c: SpecMorphism,
    pub l1: SpecMorphism,
    pub r1: SpecMorphism,
    pub h1: SpecMorphism,
    pub c1: SpecMorphism,
    pub sigma_k: SpecMorphism,
    pub sigma_h: SpecMorphism,
    pub sigma_c: SpecMorphism,
    pub sigma_p: SpecMorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceRequirement {
    Pushout,
    Commutes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceReport {
    pub name: &'static str,
    pub requirement: FaceRequirement,
    pub holds: bool,
}

const OBJECTS: [&str; 8] = ["K", "H", "C", "P", "Ss_K", "Ss_H", "Ss_C", "Ss_P"];
const MORPHISMS: [(&str, &str, &str); 12] = [
    ("l", "K", "H"),
    ("r", "K", "C"),
    ("h", "H", "P"),
    ("c", "C", "P"),
    ("l_1", "Ss_K", "Ss_H"),
    ("r_1", "Ss_K", "Ss_C"),
    ("h_1", "Ss_H", "Ss_P"),
    ("c_1", "Ss_C", "Ss_P"),
    ("sigma_K", "K", "Ss_K"),
    ("sigma_H", "H", "Ss_H"),
    ("sigma_C", "C", "Ss_C"),
    ("sigma_P", "P", "Ss_P"),
];
/// Morphisms the theorem says are pleomorphisms.
pub const PLEO_MORPHISMS: [&str; 5] = ["h", "l_1", "r_1", "h_1", "c_1"];

impl CubeDiagram {
    pub fn morphism(&self, name: &str) -> Option<&SpecMorphism> {
        Some(match name {
            "l" => &self.l,
            "r" => &self.r,
            "h" => &self.h,
            "c" => &self.c,
            "l_1" => &self.l1,
            "r_1" => &self.r1,
            "h_1" => &self.h1,
            "c_1" => &self.c1,
            "sigma_K" => &self.sigma_k,
            "sigma_H" => &self.sigma_h,
            "sigma_C" => &self.sigma_c,
            "sigma_P" => &self.sigma_p,
            _ => return None,
        })
    }

    pub fn object(&self, name: &str) -> Option<&EqSpec> {
        Some(match name {
            "K" => self.l.domain(),
            "H" => self.h.domain(),
            "C" => self.c.domain(),
            "P" => self.h.codomain(),
            "Ss_K" => self.l1.domain(),
            "Ss_H" => self.h1.domain(),
            "Ss_C" => self.c1.domain(),
            "Ss_P" => self.h1.codomain(),
            _ => return None,
        })
    }

    fn faces(&self) -> Result<Vec<(&'static str, FaceRequirement, Square<SpecMorphism>)>> {
        use FaceRequirement::*;
        let sq = |a: &SpecMorphism, b: &SpecMorphism, c: &SpecMorphism, d: &SpecMorphism| {
            Square::from_sides(a.clone(), b.clone(), c.clone(), d.clone())
        };
        Ok(vec![
            ("top", Pushout, sq(&self.l, &self.r, &self.h, &self.c)?),
            ("bottom", Pushout, sq(&self.l1, &self.r1, &self.h1, &self.c1)?),
            ("back-left", Commutes, sq(&self.l, &self.sigma_k, &self.sigma_h, &self.l1)?),
            ("back-right", Pushout, sq(&self.sigma_k, &self.r, &self.r1, &self.sigma_c)?),
            ("front-left", Pushout, sq(&self.sigma_h, &self.h, &self.h1, &self.sigma_p)?),
            ("front-right", Commutes, sq(&self.c, &self.sigma_c, &self.sigma_p, &self.c1)?),
        ])
    }

    /// Checks every face; pushout faces also pass the pasting self-check
    /// (back-right followed by bottom).
    pub fn face_reports(&self) -> Result<Vec<FaceReport>> {
        let faces = self.faces()?;
        let mut out = Vec::new();
        for (name, requirement, square) in &faces {
            let holds = match requirement {
                FaceRequirement::Commutes => square.commutes()?,
                FaceRequirement::Pushout => match verify_pushout(square) {
                    Ok(b) => b,
                    Err(Error::NonCommuting) => false,
                    Err(e) => return Err(e),
                },
            };
            out.push(FaceReport {
                name,
                requirement: *requirement,
                holds,
            });
        }
        if out[3].holds {
            paste_check(&faces[3].2, &faces[1].2)?;
        }
        Ok(out)
    }

    pub fn verdicts(&self, depth: usize) -> Result<BTreeMap<String, PleoVerdict>> {
        let mut out = BTreeMap::new();
        for name in PLEO_MORPHISMS {
            let m = self.morphism(name).expect("known morphism");
            out.insert(name.to_string(), is_pleomorphism(m, depth, None)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let objects: serde_json::Map<String, Value> = OBJECTS
            .iter()
            .map(|o| (o.to_string(), Value::String(self.object(o).expect("known object").to_text())))
            .collect();
        let morphisms: serde_json::Map<String, Value> = MORPHISMS
            .iter()
            .map(|(name, from, to)| {
                let m = self.morphism(name).expect("known morphism");
                (name.to_string(), json!({"from": from, "to": to, "map": m.to_text()}))
            })
            .collect();
        json!({"objects": objects, "morphisms": morphisms})
    }

    /// Reads the `objects`/`morphisms` part of a cube dump.
    pub fn from_json(value: &Value) -> Result<CubeDiagram> {
        let bad = |m: String| Error::MalformedMorphism(m);
        let mut objects = BTreeMap::new();
        for o in OBJECTS {
            let text = value["objects"][o]
                .as_str()
                .ok_or_else(|| bad(format!("cube dump lacks object `{o}`")))?;
            objects.insert(o, EqSpec::parse(text)?);
        }
        let mut ms = BTreeMap::new();
        for (name, from, to) in MORPHISMS {
            let text = value["morphisms"][name]["map"]
                .as_str()
                .ok_or_else(|| bad(format!("cube dump lacks morphism `{name}`")))?;
            ms.insert(name, SpecMorphism::parse(&objects[from], &objects[to], text)?);
        }
        let mut take = |n: &str| ms.remove(n).expect("parsed above");
        Ok(CubeDiagram {
            l: take("l"),
            r: take("r"),
            h: take("h"),
            c: take("c"),
            l1: take("l_1"),
            r1: take("r_1"),
            h1: take("h_1"),
            c1: take("c_1"),
            sigma_k: take("sigma_K"),
            sigma_h: take("sigma_H"),
            sigma_c: take("sigma_C"),
            sigma_p: take("sigma_P"),
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n  node [shape=box];\n");
        for o in OBJECTS {
            let spec = self.object(o).expect("known object");
            let _ = writeln!(
                out,
                "  \"{o}\" [label=\"{o}\\n{} ops, {} eqns\"];",
                spec.ops().len(),
                spec.equations().len()
            );
        }
        for (m, from, to) in MORPHISMS {
            let style = if PLEO_MORPHISMS.contains(&m) { ", style=dashed" } else { "" };
            let _ = writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{m}\"{style}];");
        }
        out.push_str("}\n");
        out
    }
}

/// The commutative cube of a pleopushout step with its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DeductionCube {
    pub rule: String,
    pub diagram: CubeDiagram,
    pub faces: Vec<FaceReport>,
    pub verdicts: BTreeMap<String, PleoVerdict>,
    /// `h` was accepted without a verified verdict.
    pub assumed: bool,
}

impl DeductionCube {
    pub fn all_faces_hold(&self) -> bool {
        self.faces.iter().all(|f| f.holds)
    }

    pub fn all_verified(&self) -> bool {
        self.verdicts
            .iter()
            .all(|(name, v)| v.is_verified() || (self.assumed && name == "h"))
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.diagram.to_json();
        v["rule"] = json!(self.rule);
        v["faces"] = json!(self.faces);
        v["verdicts"] = json!(self.verdicts);
        v
    }
}

/// Re-checks a cube: faces and pleomorphism verdicts at `depth`.
pub fn verify_cube(diagram: &CubeDiagram, depth: usize) -> Result<(Vec<FaceReport>, BTreeMap<String, PleoVerdict>)> {
    Ok((diagram.face_reports()?, diagram.verdicts(depth)?))
}

fn rename(t: &Term, ops: &BTreeMap<&str, &str>, vars: &BTreeMap<&str, &str>) -> Option<Term> {
    Some(match t {
        Term::Var(v) if t.hole_index().is_some() => Term::Var(v.clone()),
        Term::Var(v) => Term::var(*vars.get(v.as_str())?),
        Term::App(op, args) => Term::app(
            *ops.get(op.as_str())?,
            args.iter().map(|a| rename(a, ops, vars)).collect::<Option<_>>()?,
        ),
    })
}

fn invert<'a>(pairs: Vec<(&'a str, &'a str)>) -> Option<BTreeMap<&'a str, &'a str>> {
    let mut inv = BTreeMap::new();
    for (a, b) in pairs {
        if inv.insert(b, a).is_some() {
            return None;
        }
    }
    Some(inv)
}

/// Factors `anchor : S -> Ss_H` through an injective renaming
/// `l_1 : Ss_K -> Ss_H`, when the image lies in `Ss_K`.
fn factor(anchor: &SpecMorphism, l1: &SpecMorphism) -> Option<SpecMorphism> {
    if !l1.is_simple() {
        return None;
    }
    let sorts = invert(l1.sort_map().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect())?;
    let ops = invert(
        l1.op_map()
            .iter()
            .map(|(a, t)| (a.as_str(), t.as_simple_template().expect("simple")))
            .collect(),
    )?;
    let vars = invert(l1.var_map().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect())?;
    let sort_map = anchor
        .sort_map()
        .iter()
        .map(|(s, t)| Some((s.clone(), sorts.get(t.as_str())?.to_string())))
        .collect::<Option<_>>()?;
    let op_map = anchor
        .op_map()
        .iter()
        .map(|(o, t)| Some((o.clone(), rename(t, &ops, &vars)?)))
        .collect::<Option<_>>()?;
    let var_map = anchor
        .var_map()
        .iter()
        .map(|(v, w)| Some((v.clone(), vars.get(w.as_str())?.to_string())))
        .collect::<Option<_>>()?;
    SpecMorphism::new(anchor.domain().clone(), l1.domain().clone(), sort_map, op_map, var_map).ok()
}

/// The pleopushout step: given a witness `(ς_K, l_1)` for the left square,
/// push `r` out along `ς_K` to get `Ss_C`, glue `Ss_H` and `Ss_C` over
/// `Ss_K` to get `Ss_P`, and obtain `ς_P` from the rule's pushout. The new
/// instance is `ς_C` with evidence `Ss_H -h_1-> Ss_P <-c_1- Ss_C`.
pub fn pleopushout_step(
    rule: &DeductionRule,
    inst: &Instance,
    witness: &Witness,
    depth: usize,
) -> Result<(Instance, DeductionCube)> {
    let span = rule.span().ok_or_else(|| Error::MissingSpan(rule.name().to_string()))?;
    check_instance(rule, inst)?;
    let (l, r) = (span.left(), span.right());
    let (sigma_k, l1) = (&witness.to_kernel, &witness.inclusion);
    let sigma_h = inst.morphism();
    if sigma_k.domain() != l.domain() || l1.codomain() != sigma_h.codomain() || sigma_k.codomain() != l1.domain() {
        return Err(Error::InstanceMismatch("witness does not fit the rule and instance".into()));
    }
    if l.then(sigma_h)? != sigma_k.then(l1)? {
        return Err(Error::LeftSquareNotCommuting);
    }
    let l1_verdict = is_pleomorphism(l1, depth, None)?;
    if !l1_verdict.is_verified() {
        return Err(Error::WitnessNotPleo(l1_verdict.label().to_string()));
    }

    let right = pushout(&Span::new(sigma_k.clone(), r.clone())?)?;
    let (r1, sigma_c) = (right.inject_left().clone(), right.inject_right().clone());
    let bottom = pushout(&Span::new(l1.clone(), r1.clone())?)?;
    let (h1, c1) = (bottom.inject_left().clone(), bottom.inject_right().clone());
    let top = rule.top_pushout().ok_or_else(|| Error::MissingSpan(rule.name().to_string()))?;
    let cocone = crate::category::Cospan::new(sigma_h.then(&h1)?, sigma_c.then(&c1)?)?;
    let sigma_p = SpecMorphism::mediate(&top, &cocone)?
        .ok_or_else(|| Error::CubeCheckFailed("no mediating morphism from the top pushout".into()))?;

    let diagram = CubeDiagram {
        l: l.clone(),
        r: r.clone(),
        h: rule.h().clone(),
        c: rule.c().clone(),
        l1: l1.clone(),
        r1: r1.clone(),
        h1: h1.clone(),
        c1: c1.clone(),
        sigma_k: sigma_k.clone(),
        sigma_h: sigma_h.clone(),
        sigma_c: sigma_c.clone(),
        sigma_p,
    };
    let faces = diagram.face_reports()?;
    if let Some(f) = faces.iter().find(|f| !f.holds) {
        return Err(Error::CubeCheckFailed(format!("face `{}` fails", f.name)));
    }
    let mut verdicts = BTreeMap::new();
    verdicts.insert("h".to_string(), rule.fraction().verdict.clone());
    verdicts.insert("l_1".to_string(), l1_verdict);
    for (name, m) in [("r_1", &r1), ("h_1", &h1), ("c_1", &c1)] {
        verdicts.insert(name.to_string(), is_pleomorphism(m, depth, None)?);
    }
    let cube = DeductionCube {
        rule: rule.name().to_string(),
        diagram,
        faces,
        verdicts,
        assumed: rule.assumed(),
    };
    if let Some((name, v)) = cube
        .verdicts
        .iter()
        .find(|(name, v)| !(v.is_verified() || (cube.assumed && name.as_str() == "h")))
    {
        return Err(Error::CubeCheckFailed(format!("`{name}` is {}", v.label())));
    }

    let evidence = inst
        .evidence()
        .clone()
        .with("h_1", h1.clone(), Direction::Forward, cube.verdicts["h_1"].clone(), false)?
        .with("c_1", c1, Direction::Backward, cube.verdicts["c_1"].clone(), false)?;
    let anchor = match inst.anchor().and_then(|a| factor(a, l1)) {
        Some(a) => Some(a.then(&r1)?),
        None => None,
    };
    Ok((Instance::new(sigma_c, evidence, anchor)?, cube))
}

/// Drops re-added equations, in canonical order, that the final kernel
/// turned out not to need.
fn prune(
    target: &EqSpec,
    terms: &std::collections::BTreeSet<Term>,
    mut equations: std::collections::BTreeSet<crate::eqlogic::Equation>,
    added: &[crate::eqlogic::Equation],
    depth: usize,
) -> Result<EqSpec> {
    let mut order: Vec<_> = added.to_vec();
    order.sort_by_key(|e| target.render_equation(e));
    for e in order {
        equations.remove(&e);
        let candidate = target.with_content(terms.clone(), equations.clone())?;
        let verified = SpecMorphism::inclusion(&candidate, target)
            .and_then(|l1| is_pleomorphism(&l1, depth, None))
            .is_ok_and(|v| v.is_verified());
        if !verified {
            equations.insert(e);
        }
    }
    target.with_content(terms.clone(), equations)
}

/// Looks for a small kernel `Ss_K` inside `Ss_H`: the signature, the
/// images of `K`'s terms, and the images of the ambient specification's
/// terms and equations (through the instance's anchor). Equations of `Ss_H`
/// are re-added, in canonical order, while the inclusion fails to verify;
/// re-added equations the final kernel does not need are then dropped.
pub fn minimal_witness(rule: &DeductionRule, inst: &Instance, depth: usize) -> Result<Option<Witness>> {
    let span = rule.span().ok_or_else(|| Error::MissingSpan(rule.name().to_string()))?;
    check_instance(rule, inst)?;
    let target = inst.target();
    let to_target = span.left().then(inst.morphism())?;
    let mut terms: std::collections::BTreeSet<Term> =
        span.apex().term_closure().iter().map(|t| to_target.map_term(t)).collect();
    let mut equations = std::collections::BTreeSet::new();
    let mut added = Vec::new();
    if let Some(anchor) = inst.anchor() {
        terms.extend(anchor.domain().term_closure().iter().map(|t| anchor.map_term(t)));
        equations.extend(anchor.domain().equations().iter().map(|e| anchor.map_equation(e)));
    }
    loop {
        let kernel = target.with_content(terms.clone(), equations.clone())?;
        if &kernel == target {
            return Witness::identity(rule, inst).map(Some);
        }
        let l1 = SpecMorphism::inclusion(&kernel, target)?;
        match is_pleomorphism(&l1, depth, None)? {
            PleoVerdict::Verified { .. } => {
                let kernel = prune(target, &terms, equations, &added, depth)?;
                return Ok(Some(Witness {
                    to_kernel: to_target.with_codomain(&kernel)?,
                    inclusion: SpecMorphism::inclusion(&kernel, target)?,
                }));
            }
            PleoVerdict::Unknown { pending, .. } if !pending.is_empty() => {
                equations.insert(pending[0].clone());
                added.push(pending[0].clone());
            }
            _ => {
                // nothing derivable to add: fall back to the whole of Ss_H
                let missing = target.sorted_equations().into_iter().find(|e| !equations.contains(*e));
                match missing {
                    Some(e) => {
                        equations.insert(e.clone());
                        added.push(e.clone());
                    }
                    None => return Ok(None),
                }
            }
        }
    }
}
