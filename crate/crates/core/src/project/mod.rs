//! Endpoint projection: one role-free local unit per declaration and role.
//!
//! Bodies are projected statement by statement, then unit-normalised.
//! Conditionals decided by another role are projected by merging the
//! behaviours of their branches; a failed merge is a knowledge-of-choice
//! error reported as [`Code::MergeFailure`].

pub mod merge;
pub mod normalise;
mod rules;
pub mod text;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::check::{Checked, ClassInfo, TParamInfo};
use crate::prelude::Frontend;
use crate::syntax::*;

pub use merge::{merge, Conflict};
pub use normalise::{is_noop, normalise_exp, normalise_stm};
pub use text::{parse_units, print_local_exp, print_local_stm, print_unit, with_courtesy, PrintOptions};

use rules::Rules;

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Record the source choreography and role on every unit.
    pub annotate: bool,
}

/// Name of the unit implementing `role` of `decl`: single-role
/// declarations keep their name, others get the role as a suffix.
pub fn unit_name(decl: &str, roles: &[String], role: &str) -> String {
    if roles.len() <= 1 {
        decl.to_string()
    } else {
        format!("{decl}_{role}")
    }
}

fn modifiers_of(ms: &[Modifier]) -> Vec<Modifier> {
    ms.to_vec()
}

fn annotations_of(anns: &[Annotation]) -> Vec<LocalAnnotation> {
    anns.iter()
        .map(|a| LocalAnnotation {
            name: a.name.name.clone(),
            args: a.args.iter().map(|(k, v)| (k.name.clone(), v.clone())).collect(),
        })
        .collect()
}

/// Projects `decl` at `role`.
///
/// `role` must be one of the declaration's role parameters and the program
/// must have checked without errors.
pub fn project_decl(checked: &Checked, decl: &Decl, role: &str, opts: Options) -> Result<LocalDecl, Vec<Diagnostic>> {
    let info: &ClassInfo = checked.table.get(&decl.name.name).ok_or_else(|| vec![unknown(decl)])?;
    let roles = decl.role_names();
    if !roles.iter().any(|r| r == role) {
        return Err(vec![Diagnostic::error(
            Code::UnknownName,
            decl.name.span,
            format!("'{}' has no role '{role}'.", decl.name.name),
        )]);
    }
    let class_tvars = info.tparams.clone();
    let top = Rules::new(checked, role, class_tvars.clone());
    let mut diags = Vec::new();

    let fields = decl
        .fields
        .iter()
        .filter(|f| roles_in(&f.te).contains(role))
        .map(|f| LocalField { modifiers: modifiers_of(&f.modifiers), te: top.te(&f.te), name: f.name.name.clone() })
        .collect();

    let mut ctors = Vec::new();
    for (idx, c) in decl.ctors.iter().enumerate() {
        let mut tvars = class_tvars.clone();
        if let Some(k) = info.ctors.iter().find(|k| k.index == Some(idx)) {
            tvars.extend(k.tparams.iter().cloned());
        }
        let mut r = Rules::new(checked, role, tvars);
        let body = normalise_stm(&r.stm(&c.body));
        diags.append(&mut r.diags);
        ctors.push(LocalCtor {
            modifiers: modifiers_of(&c.modifiers),
            type_params: r.type_params(&c.type_params),
            params: r.params(&c.params),
            body,
        });
    }

    let mut methods = Vec::new();
    for (idx, m) in decl.methods.iter().enumerate() {
        let mut r = Rules::new(checked, role, checked.method_tvars(&decl.name.name, idx));
        let body = m.body.as_ref().map(|b| normalise_stm(&r.stm(b)));
        diags.append(&mut r.diags);
        methods.push(LocalMethod {
            annotations: annotations_of(&m.annotations),
            modifiers: modifiers_of(&m.modifiers),
            type_params: r.type_params(&m.type_params),
            ret: r.te(&m.ret),
            name: m.name.name.clone(),
            params: r.params(&m.params),
            body,
        });
    }

    if diag::has_errors(&diags) {
        return Err(diags);
    }
    let supers =
        |list: &[TypeExpr]| -> Vec<LocalTE> { list.iter().map(|t| top.te(t)).filter(|t| !t.is_unit()).collect() };
    Ok(LocalDecl {
        meta: opts.annotate.then(|| UnitMeta { source: decl.name.name.clone(), role: role.to_string() }),
        kind: decl.kind,
        annotations: annotations_of(&decl.annotations),
        modifiers: modifiers_of(&decl.modifiers),
        name: unit_name(&decl.name.name, &roles, role),
        type_params: top.type_params(&decl.type_params),
        extends: supers(&decl.extends),
        implements: supers(&decl.implements),
        fields,
        ctors,
        methods,
        cases: decl.cases.iter().map(|c| c.name.clone()).collect(),
    })
}

fn roles_in(te: &TypeExpr) -> std::collections::BTreeSet<String> {
    crate::check::roles_of_te(te)
}

fn unknown(decl: &Decl) -> Diagnostic {
    Diagnostic::error(Code::UnknownName, decl.name.span, format!("'{}' was not checked.", decl.name.name))
}

/// Units of a whole program together with the projection diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Projection {
    pub units: Vec<LocalDecl>,
    pub diags: Vec<Diagnostic>,
}

impl Projection {
    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diags)
    }

    pub fn program(&self) -> LocalProgram {
        LocalProgram { units: self.units.clone() }
    }
}

/// User declarations that take part in projection, in source order.
pub fn user_decls<'p>(program: &'p Program, checked: &Checked) -> Vec<&'p Decl> {
    checked.table.classes().filter(|c| !c.prelude).map(|c| &program.decls[c.decl]).collect()
}

/// Projects every user declaration at each of its roles. Units carry their
/// provenance; [`write_units`] decides whether printed units show it.
pub fn project_program(program: &Program, checked: &Checked) -> Projection {
    let mut out = Projection::default();
    for d in user_decls(program, checked) {
        for r in d.role_names() {
            match project_decl(checked, d, &r, Options { annotate: true }) {
                Ok(u) => out.units.push(u),
                Err(ds) => out.diags.extend(ds),
            }
        }
    }
    out.diags.sort_by_key(|d| (d.span.file, d.span.start));
    out
}

pub fn project_frontend(front: &Frontend) -> Projection {
    project_program(&front.program, &front.checked)
}

/// Normalised branch projections of every conditional of the user
/// declarations, at every role; the inputs merging sees.
pub fn harvest_branches(program: &Program, checked: &Checked) -> Vec<Vec<LocalStm>> {
    let mut out = Vec::new();
    for d in user_decls(program, checked) {
        let Some(info) = checked.table.get(&d.name.name) else { continue };
        for role in d.role_names() {
            let mut bodies: Vec<(Vec<TParamInfo>, &Stm)> =
                d.ctors.iter().map(|c| (info.tparams.clone(), &c.body)).collect();
            for (idx, m) in d.methods.iter().enumerate() {
                if let Some(b) = &m.body {
                    bodies.push((checked.method_tvars(&d.name.name, idx), b));
                }
            }
            for (tvars, body) in bodies {
                let mut r = Rules::new(checked, &role, tvars);
                r.branches = Some(Vec::new());
                r.stm(body);
                out.extend(r.branches.take().unwrap_or_default());
            }
        }
    }
    out
}

/// One entry of the projection output manifest.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ManifestEntry {
    #[serde(rename = "sourceChoreography")]
    pub source: String,
    pub role: String,
    pub file: String,
    #[serde(rename = "generatedName")]
    pub generated: String,
}

/// Writes `<out>/<Role>/<Unit>.lchor` for every unit plus `manifest.json`.
pub fn write_units(
    out: &Path,
    units: &[LocalDecl],
    annotate: bool,
    print: PrintOptions,
) -> std::io::Result<Vec<ManifestEntry>> {
    let mut manifest = Vec::new();
    for u in units {
        let meta = u.meta.clone().unwrap_or(UnitMeta { source: u.name.clone(), role: String::new() });
        let dir = if meta.role.is_empty() { out.to_path_buf() } else { out.join(&meta.role) };
        std::fs::create_dir_all(&dir)?;
        let path: PathBuf = dir.join(format!("{}.lchor", u.name));
        let mut shown = u.clone();
        if !annotate {
            shown.meta = None;
        }
        std::fs::write(&path, print_unit(&shown, print))?;
        let rel = path.strip_prefix(out).unwrap_or(&path).to_string_lossy().replace('\\', "/");
        manifest.push(ManifestEntry { source: meta.source, role: meta.role, file: rel, generated: u.name.clone() });
    }
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(out.join("manifest.json"), json + "\n")?;
    Ok(manifest)
}

#[cfg(test)]
mod tests;
