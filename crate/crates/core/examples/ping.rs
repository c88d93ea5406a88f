//! Checks a two-role choreography, prints its projections and runs them.
//!
//! `cargo run -p choral-core --example ping`

use std::time::Duration;

use choral_core::interp::{differential_run, Manifest};
use choral_core::prelude::load_str;
use choral_core::project::{print_unit, project_frontend, PrintOptions};

const SOURCE: &str = r#"
public class Ping@(A, B) {
    public static Integer@A roundTrip(Integer@A n, SymChannel@(A, B)<Object> ch) {
        Integer@B m = ch.<Integer>com(n);
        System@B.out.println("B got "@B.concat(m.toString()));
        return ch.<Integer>com(m + 1@B);
    }
}
"#;

fn main() {
    let front = load_str("Ping.chor", SOURCE);
    if front.has_errors() {
        eprint!("{}", front.render_diags());
        std::process::exit(1);
    }
    for unit in project_frontend(&front).units {
        println!("{}", print_unit(&unit, PrintOptions::default()));
    }
    let manifest: Manifest = serde_json::from_value(serde_json::json!({
        "entry": {"class": "Ping", "method": "roundTrip"},
        "roles": ["A", "B"],
        "method": {"channels": {"ch": "ab"}, "args": {"A": [41]}}
    }))
    .expect("valid manifest");
    let run = differential_run(&front, &manifest, Duration::from_secs(5)).expect("projects");
    println!("A returned {}", run.distributed.returns["A"]);
    println!("transcripts agree: {}", run.agrees());
}
