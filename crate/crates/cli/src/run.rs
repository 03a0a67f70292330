//! Request dispatch: each subcommand resolves its named arguments from
//! the payload, runs the library operation, and serializes the result
//! with its validation witnesses. Exit code 0 means the operation
//! succeeded, 2 a domain-level refusal (with the obstruction in the
//! report), 1 malformed input.

use crate::instance::{InstanceDocument, Resolved};
use crate::report::{self, Report};
use anyhow::{anyhow, Result};
use excat_core::complex::{is_acyclic, ChainMap, Complex};
use excat_core::curve::{global_sections, pic_classes, LineBundleClass, NodalCurve};
use excat_core::error::Error as CoreError;
use excat_core::fitting::{fitting_decompose, fitting_decompose_complex, split_homotopy_idempotent};
use excat_core::tstructure::{construct_heart_cover, ext_dim, truncate, CoverOutcome};
use excat_core::backend::{Mor, Obj};
use serde_json::{json, Value};

pub const OPS: &[&str] = &[
    "check-acyclic",
    "truncate",
    "heart-cover",
    "fitting",
    "split-idempotent",
    "ext",
    "pic",
    "sections",
];

pub struct Outcome {
    pub exit: i32,
    pub report: Report,
}

fn domain(op: &str, e: CoreError, detail: Option<Value>) -> Outcome {
    Outcome { exit: 2, report: Report::domain_error(op, e.to_string(), detail) }
}

fn invalid(op: &str, msg: String) -> Outcome {
    Outcome { exit: 1, report: Report::invalid(op, msg) }
}

fn ok(op: &str, result: Value) -> Outcome {
    Outcome { exit: 0, report: Report::ok(op, result) }
}

pub fn execute(op: &str, doc: &InstanceDocument) -> Outcome {
    if doc.request.op != op {
        return invalid(op, format!("document requests {:?}, not {op:?}", doc.request.op));
    }
    let resolved = match doc.resolve() {
        Ok(r) => r,
        Err(e) => return invalid(op, format!("{e:#}")),
    };
    match dispatch(op, &resolved) {
        Ok(outcome) => outcome,
        Err(e) => invalid(op, format!("{e:#}")),
    }
}

fn arg_str<'a>(r: &'a Resolved, key: &str) -> Result<&'a str> {
    r.request
        .args
        .get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| anyhow!("request needs a string argument {key:?}"))
}

fn arg_i64(r: &Resolved, key: &str) -> Result<i64> {
    r.request
        .args
        .get(key)
        .and_then(|v| v.as_i64())
        .ok_or_else(|| anyhow!("request needs an integer argument {key:?}"))
}

fn named_complex<'a>(r: &'a Resolved, key: &str) -> Result<&'a Complex> {
    let name = arg_str(r, key)?;
    r.complexes.get(name).ok_or_else(|| anyhow!("unknown complex {name:?} in payload"))
}

fn named_morphism<'a>(r: &'a Resolved, key: &str) -> Result<&'a Mor> {
    let name = arg_str(r, key)?;
    r.morphisms.get(name).ok_or_else(|| anyhow!("unknown morphism {name:?} in payload"))
}

fn named_chain_map<'a>(r: &'a Resolved, key: &str) -> Result<&'a ChainMap> {
    let name = arg_str(r, key)?;
    r.chain_maps.get(name).ok_or_else(|| anyhow!("unknown chain map {name:?} in payload"))
}

fn named_object<'a>(r: &'a Resolved, key: &str) -> Result<&'a Obj> {
    let name = arg_str(r, key)?;
    r.objects.get(name).ok_or_else(|| anyhow!("unknown object {name:?} in payload"))
}

fn dispatch(op: &str, r: &Resolved) -> Result<Outcome> {
    match op {
        "check-acyclic" => {
            let c = named_complex(r, "complex")?;
            match is_acyclic(c) {
                Ok(w) => {
                    let links: Vec<Value> = (w.lo..)
                        .zip(w.links.iter())
                        .map(|(i, l)| {
                            json!({
                                "degree": i,
                                "link": report::obj_json(&l.sub),
                                "include": report::mor_json(&l.include),
                                "project": report::mor_json(&l.project),
                            })
                        })
                        .collect();
                    Ok(ok(op, json!({ "acyclic": true, "links": links })))
                }
                Err(obstruction) => Ok(domain(
                    op,
                    CoreError::NotAcyclic(obstruction.clone()),
                    Some(json!({ "acyclic": false, "obstruction": obstruction.to_string() })),
                )),
            }
        }
        "truncate" => {
            let c = named_complex(r, "complex")?;
            let n = arg_i64(r, "n")?;
            match truncate(c, n) {
                Ok(tri) => Ok(ok(
                    op,
                    json!({
                        "lower": report::complex_json(&tri.a),
                        "upper": report::complex_json(&tri.b),
                        "lower_to_complex": report::chain_map_json(&tri.a_to_e),
                        "complex_to_upper": report::chain_map_json(&tri.e_to_b),
                        "connecting": report::chain_map_json(&tri.b_to_shifted_a),
                    }),
                )),
                Err(e) => Ok(domain(op, e, None)),
            }
        }
        "heart-cover" => {
            let c = named_complex(r, "complex")?;
            match construct_heart_cover(c) {
                Ok(CoverOutcome::Found(cover)) => Ok(ok(
                    op,
                    json!({
                        "found": true,
                        "heart": report::complex_json(&cover.heart.complex),
                        "cover_map": report::chain_map_json(&cover.cover_map),
                        "tail": report::complex_json(&cover.triangle.b),
                    }),
                )),
                Ok(CoverOutcome::NoCover(w)) => Ok(domain(
                    op,
                    CoreError::Invalid("no heart cover exists".into()),
                    Some(json!({
                        "found": false,
                        "witness": {
                            "psi_dim": w.psi_dim,
                            "rho_dim": w.rho_dim,
                            "equation_rows": w.equation_rows,
                            "rho_subsystem_solvable": w.rho_subsystem_solvable,
                            "note": w.note,
                        }
                    })),
                )),
                Err(e) => Ok(domain(op, e, None)),
            }
        }
        "fitting" => {
            if r.request.args.contains_key("chain_map") {
                let f = named_chain_map(r, "chain_map")?;
                match fitting_decompose_complex(f) {
                    Ok(d) => Ok(ok(
                        op,
                        json!({
                            "invertible_summand": report::complex_json(&d.invertible_summand),
                            "nilpotent_summand": report::complex_json(&d.nilpotent_summand),
                            "indices": d.indices,
                        }),
                    )),
                    Err(e) => Ok(domain(op, e, None)),
                }
            } else {
                let f = named_morphism(r, "morphism")?;
                match fitting_decompose(f) {
                    Ok(d) => Ok(ok(
                        op,
                        json!({
                            "invertible_part": report::obj_json(&d.invertible_part),
                            "nilpotent_part": report::obj_json(&d.nilpotent_part),
                            "include_invertible": report::mor_json(&d.include_inv),
                            "include_nilpotent": report::mor_json(&d.include_nil),
                            "on_invertible": report::mor_json(&d.on_inv),
                            "on_nilpotent": report::mor_json(&d.on_nil),
                            "nilpotence_index": d.nilpotence_index,
                        }),
                    )),
                    Err(e) => Ok(domain(op, e, None)),
                }
            }
        }
        "split-idempotent" => {
            let e = named_chain_map(r, "chain_map")?;
            match split_homotopy_idempotent(e) {
                Ok(s) => Ok(ok(
                    op,
                    json!({
                        "piece": report::complex_json(&s.piece),
                        "include": report::chain_map_json(&s.include),
                        "project": report::chain_map_json(&s.project),
                        "idempotency_witness": report::homotopy_json(&s.idem_witness),
                        "realization_witness": report::homotopy_json(&s.realizes),
                        "series_terms": s.series_terms,
                    }),
                )),
                Err(e) => Ok(domain(op, e, None)),
            }
        }
        "ext" => {
            let x = named_object(r, "source")?;
            let y = named_object(r, "target")?;
            let n = arg_i64(r, "n")?;
            if n < 0 {
                return Err(anyhow!("the degree must be non-negative"));
            }
            match ext_dim(x, y, n as usize) {
                Ok(d) => Ok(ok(op, json!({ "dimension": d, "degree": n }))),
                Err(e) => Ok(domain(op, e, None)),
            }
        }
        "pic" => {
            let degree = arg_i64(r, "degree")?;
            let curve: &NodalCurve =
                r.curve.as_ref().ok_or_else(|| anyhow!("the document declares no curve"))?;
            match pic_classes(curve, degree) {
                Ok(classes) => {
                    let list: Vec<Value> = classes
                        .iter()
                        .map(|c| {
                            json!({
                                "degree": c.degree,
                                "gluings": c.scalars.iter()
                                    .map(|s| serde_json::to_value(crate::instance::scalar_repr(s)).unwrap())
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    Ok(ok(op, json!({ "count": list.len(), "classes": list })))
                }
                Err(e) => Ok(domain(op, e, None)),
            }
        }
        "sections" => {
            let x = named_object(r, "object")?;
            let bundle = match x {
                Obj::VectNodal(b) => b.clone(),
                Obj::VectP1 { twists, .. } => {
                    // sections upstairs: report the dimension directly
                    let dim: usize =
                        twists.iter().map(|a| excat_core::backend::forms::section_dim(*a, 0)).sum();
                    return Ok(ok(op, json!({ "dimension": dim })));
                }
                _ => return Err(anyhow!("sections are defined for curve backends")),
            };
            let (dim, basis) = global_sections(&bundle);
            Ok(ok(
                op,
                json!({
                    "dimension": dim,
                    "basis": crate::instance::matrix_spec(&basis),
                }),
            ))
        }
        other => Err(anyhow!("unknown operation {other:?}")),
    }
}

/// Convenience used by tests: the degree-zero class list of a curve.
pub fn degree_zero_classes(curve: &NodalCurve) -> Result<Vec<LineBundleClass>> {
    Ok(pic_classes(curve, 0)?)
}
