//! Design and function files.
//!
//! A design file is a JSON object:
//!
//! ```json
//! {"kind": "explicit", "n": 2, "space": {"uniform": 4},
//!  "payload": {"atoms": [{"tuple": [1, 4], "prob": 0.25}, ...]}}
//! ```
//!
//! `space` is a weight array or `{"uniform": K}`. Points inside `tuple` are
//! 1-based. A mixture payload is `{"components": [...], "weights": [...]}`,
//! where each component is a design object that may omit `n` and `space` to
//! inherit them from the mixture.
//!
//! A function file holds one real per line, one line per point; blank lines
//! are ignored.

use std::path::Path;

use mcdl_core::{Design, FiniteSpace, SpaceFunction};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignDoc {
    kind: String,
    n: Option<usize>,
    space: Option<SpaceDoc>,
    payload: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpaceDoc {
    Weights(Vec<f64>),
    Uniform { uniform: usize },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitPayload {
    atoms: Vec<AtomDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    tuple: Vec<usize>,
    prob: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixturePayload {
    components: Vec<Value>,
    weights: Vec<f64>,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_design(path: &Path) -> CliResult<Design> {
    parse_design(&read(path)?)
}

pub fn parse_design(text: &str) -> CliResult<Design> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("design file is not valid JSON: {e}")))?;
    build(value, None, "design")
}

fn parse_field<T: for<'de> Deserialize<'de>>(value: Value, path: &str) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn invalid(path: &str, e: impl std::fmt::Display) -> CliError {
    CliError::InvalidDesign(format!("{path}: {e}"))
}

/// Parse failures are usage errors (exit 2); well-formed documents describing
/// an impossible design are invalid designs (exit 3).
fn build(value: Value, inherited: Option<(&FiniteSpace, usize)>, path: &str) -> CliResult<Design> {
    let doc: DesignDoc = parse_field(value, path)?;
    let space = match (doc.space, inherited) {
        (Some(SpaceDoc::Weights(w)), _) => {
            FiniteSpace::new(w).map_err(|e| invalid(&format!("{path}.space"), e))?
        }
        (Some(SpaceDoc::Uniform { uniform }), _) => {
            FiniteSpace::uniform(uniform).map_err(|e| invalid(&format!("{path}.space"), e))?
        }
        (None, Some((space, _))) => space.clone(),
        (None, None) => return Err(CliError::Usage(format!("{path}: missing field `space`"))),
    };
    let n = match (doc.n, inherited) {
        (Some(n), _) => n,
        (None, Some((_, n))) => n,
        (None, None) => return Err(CliError::Usage(format!("{path}: missing field `n`"))),
    };

    let kind = doc.kind.as_str();
    let payload_path = format!("{path}.payload");
    let needs_payload = matches!(kind, "explicit" | "mixture");
    if !needs_payload && doc.payload.as_ref().is_some_and(|p| !p.is_null()) {
        return Err(CliError::Usage(format!(
            "{payload_path}: `{kind}` takes no payload"
        )));
    }
    let payload = || {
        doc.payload
            .clone()
            .ok_or_else(|| CliError::Usage(format!("{path}: `{kind}` needs a payload")))
    };
    let uniform_size = || {
        if space.is_uniform() {
            Ok(space.len())
        } else {
            Err(invalid(
                &format!("{path}.space"),
                format!("`{kind}` needs a uniform space"),
            ))
        }
    };
    let kind_path = format!("{path}.kind");
    let design = match kind {
        "iid" => Design::iid(space.clone(), n),
        "srswor" => Design::srswor(uniform_size()?, n),
        "cyclic" => Design::cyclic(uniform_size()?, n),
        "stratified" => Design::stratified(uniform_size()?, n),
        "explicit" => {
            let p: ExplicitPayload = parse_field(payload()?, &payload_path)?;
            let mut atoms = Vec::with_capacity(p.atoms.len());
            for (a, atom) in p.atoms.into_iter().enumerate() {
                let tuple = atom
                    .tuple
                    .iter()
                    .map(|&k| {
                        k.checked_sub(1).ok_or_else(|| {
                            CliError::Usage(format!(
                                "{payload_path}.atoms[{a}].tuple: points are numbered from 1"
                            ))
                        })
                    })
                    .collect::<CliResult<Vec<usize>>>()?;
                atoms.push((tuple, atom.prob));
            }
            Design::explicit(space.clone(), n, atoms)
        }
        "mixture" => {
            let p: MixturePayload = parse_field(payload()?, &payload_path)?;
            let components = p
                .components
                .into_iter()
                .enumerate()
                .map(|(c, v)| build(v, Some((&space, n)), &format!("{payload_path}.components[{c}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Design::mixture(components, p.weights)
        }
        other => {
            return Err(CliError::Usage(format!(
                "{kind_path}: unknown kind `{other}`, expected iid, srswor, cyclic, stratified, explicit or mixture"
            )))
        }
    };
    design.map_err(|e| invalid(path, e))
}

pub fn read_function(path: &Path) -> CliResult<SpaceFunction> {
    parse_function(&read(path)?)
}

pub fn parse_function(text: &str) -> CliResult<SpaceFunction> {
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::Usage(format!(
                "function file line {}: `{line}` is not a number",
                line_no + 1
            ))
        })?;
        values.push(v);
    }
    SpaceFunction::new(values).map_err(|e| CliError::Usage(format!("function file: {e}")))
}

/// Errors unless `f` has one value per point of `design`'s space.
pub fn check_dimensions(design: &Design, f: &SpaceFunction) -> CliResult<()> {
    let expected = design.space().len();
    if f.len() != expected {
        return Err(CliError::DimensionMismatch(format!(
            "function has {} values, design space has {expected} points",
            f.len()
        )));
    }
    Ok(())
}
