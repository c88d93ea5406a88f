//! Size and timing measurements of checking and projecting programs.

use std::time::Instant;

use serde::Serialize;

use crate::prelude::{load, Frontend};
use crate::project::{print_unit, project_frontend, user_decls, PrintOptions};
use crate::syntax::*;

pub const CSV_HEADER: &str = "program,choral_loc,roles,conditionals,local_loc,expansion_pct,typecheck_ms,projection_ms";

#[derive(Debug, Clone, Copy)]
pub struct Iterations {
    pub warmup: usize,
    pub measured: usize,
}

impl Default for Iterations {
    fn default() -> Self {
        Iterations { warmup: 50, measured: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub program: String,
    pub choral_loc: usize,
    pub roles: usize,
    pub conditionals: usize,
    pub local_loc: usize,
    pub expansion_pct: i64,
    pub typecheck_ms: f64,
    pub projection_ms: f64,
}

impl MetricsRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{:.3}",
            self.program,
            self.choral_loc,
            self.roles,
            self.conditionals,
            self.local_loc,
            self.expansion_pct,
            self.typecheck_ms,
            self.projection_ms
        )
    }
}

/// Lines that carry code: not blank and not an import or package header.
pub fn loc(text: &str) -> usize {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("import ") && !l.starts_with("package "))
        .count()
}

pub fn expansion_pct(choral: usize, local: usize) -> i64 {
    if choral == 0 {
        return 0;
    }
    ((local as f64 - choral as f64) / choral as f64 * 100.0).round() as i64
}

fn count_conditionals(s: &Stm) -> usize {
    match s {
        Stm::Nil | Stm::Return { .. } | Stm::Throw { .. } => 0,
        Stm::Exp { cont, .. } | Stm::VarDecl { cont, .. } | Stm::Assign { cont, .. } => count_conditionals(cont),
        Stm::If { then, els, cont, .. } => {
            1 + count_conditionals(then) + count_conditionals(els) + count_conditionals(cont)
        }
        Stm::Block { body, cont, .. } => count_conditionals(body) + count_conditionals(cont),
        Stm::Switch { cases, default, cont, .. } => {
            1 + cases.iter().map(|c| count_conditionals(&c.body)).sum::<usize>()
                + default.as_deref().map_or(0, count_conditionals)
                + count_conditionals(cont)
        }
        Stm::Try { body, catches, cont, .. } => {
            count_conditionals(body)
                + catches.iter().map(|k| count_conditionals(&k.body)).sum::<usize>()
                + count_conditionals(cont)
        }
    }
}

/// Number of `if` and `switch` statements in the user declarations.
pub fn conditionals(front: &Frontend) -> usize {
    user_decls(&front.program, &front.checked)
        .iter()
        .map(|d| {
            d.ctors.iter().map(|c| count_conditionals(&c.body)).sum::<usize>()
                + d.methods.iter().filter_map(|m| m.body.as_ref()).map(count_conditionals).sum::<usize>()
        })
        .sum()
}

/// Largest role count among the user declarations.
pub fn roles(front: &Frontend) -> usize {
    user_decls(&front.program, &front.checked).iter().map(|d| d.roles.len()).max().unwrap_or(0)
}

fn mean_ms(it: Iterations, mut f: impl FnMut()) -> f64 {
    for _ in 0..it.warmup {
        f();
    }
    let n = it.measured.max(1);
    let start = Instant::now();
    for _ in 0..n {
        f();
    }
    start.elapsed().as_secs_f64() * 1e3 / n as f64
}

/// Measures one program; `Err` carries the rendered diagnostics when it
/// does not check or project.
pub fn measure(name: &str, text: &str, it: Iterations) -> Result<MetricsRow, String> {
    let files = [(name.to_string(), text.to_string())];
    let front = load(&files);
    if front.has_errors() {
        return Err(front.render_diags());
    }
    let projection = project_frontend(&front);
    if projection.has_errors() {
        return Err(projection.diags.iter().map(|d| d.render(&front.sources)).collect::<Vec<_>>().join("\n"));
    }
    let local_loc = projection
        .units
        .iter()
        .map(|u| {
            let mut u = u.clone();
            u.meta = None;
            loc(&print_unit(&u, PrintOptions::default()))
        })
        .sum();
    let choral_loc = loc(text);
    let typecheck_ms = mean_ms(it, || {
        std::hint::black_box(load(&files));
    });
    let projection_ms = mean_ms(it, || {
        std::hint::black_box(project_frontend(&front));
    });
    let program = std::path::Path::new(name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_string());
    Ok(MetricsRow {
        program,
        choral_loc,
        roles: roles(&front),
        conditionals: conditionals(&front),
        local_loc,
        expansion_pct: expansion_pct(choral_loc, local_loc),
        typecheck_ms,
        projection_ms,
    })
}

pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loc_skips_blank_and_header_lines() {
        assert_eq!(loc("package a;\nimport b.C;\n\nclass X@A {\n}\n"), 2);
    }

    #[test]
    fn expansion_rounds_to_nearest() {
        assert_eq!(expansion_pct(8, 26), 225);
        assert_eq!(expansion_pct(3, 4), 33);
        assert_eq!(expansion_pct(0, 4), 0);
    }

    #[test]
    fn empty_program_has_a_row() {
        let row = measure("Empty.chor", "", Iterations { warmup: 0, measured: 1 }).unwrap();
        assert_eq!((row.choral_loc, row.roles, row.conditionals, row.local_loc), (0, 0, 0, 0));
        assert_eq!(row.csv().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn failing_programs_are_reported() {
        assert!(measure("Bad.chor", "class X@A { void f( }", Iterations { warmup: 0, measured: 1 }).is_err());
    }
}
