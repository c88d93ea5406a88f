//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use choral_core::check::Scope;
use choral_core::interp::{differential_run, Comparison, Manifest, Status};
use choral_core::metrics::CSV_HEADER;
use choral_core::prelude::{load, load_str, Frontend};
use choral_core::project::{harvest_branches, merge, normalise_stm, print_unit, project_frontend, PrintOptions};
use choral_core::runtime::View;
use choral_core::syntax::*;
use choral_core::testkit::{discover, test_frontend, CaseStatus};

const POSITIVE: [&str; 9] = [
    "HelloRoles",
    "ConsumeItems",
    "DistAuth",
    "Mergesort",
    "VitalsStreaming",
    "Karatsuba",
    "DistAuth5",
    "DistAuth10",
    "BuyerSellerShipper",
];

const DEADLINE: Duration = Duration::from_secs(10);

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn read(rel: &str) -> String {
    std::fs::read_to_string(corpus(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn frontend(name: &str) -> Result<Frontend> {
    let rel = format!("positive/{name}.chor");
    let f = load(&[(corpus(&rel).display().to_string(), read(&rel))]);
    ensure!(!f.has_errors(), "{name} does not check:\n{}", f.render_diags());
    Ok(f)
}

fn manifest(name: &str) -> Manifest {
    Manifest::load(&corpus(&format!("positive/{name}.manifest.json"))).unwrap()
}

fn agree(front: &Frontend, name: &str, m: &Manifest) -> Result<Comparison> {
    let c = differential_run(front, m, DEADLINE).map_err(|d| anyhow::anyhow!("{name} does not project: {d:?}"))?;
    ensure!(c.agrees(), "{name}: evaluators disagree: {:?}", c.diffs);
    ensure!(c.distributed.status == Status::Ok, "{name}: {:?}", c.distributed.status);
    Ok(c)
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn negative_diagnostics() -> Result<String> {
    let start = Instant::now();
    let mut n = 0;
    for entry in std::fs::read_dir(corpus("negative"))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("chor") {
            continue;
        }
        let expected: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path.with_extension("expected.json"))?)?;
        let code = expected["code"].as_str().and_then(Code::parse).context("unknown code")?;
        let line = expected["line"].as_u64().context("no line")? as usize;
        let f = load(&[(path.display().to_string(), std::fs::read_to_string(&path)?)]);
        let diags = if f.has_errors() { f.diags.clone() } else { project_frontend(&f).diags };
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        let Some(hit) = errors.iter().find(|d| d.code == code && d.line(&f.sources) == line) else {
            bail!("{}: no {code} at line {}", path.display(), line);
        };
        ensure!(
            !errors.iter().any(|d| d.span == hit.span && d.code != code),
            "{}: competing codes at the designated span",
            path.display()
        );
        n += 1;
    }
    let elapsed = start.elapsed();
    ensure!(n >= 4, "only {n} negative programs");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{n} programs in {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn first_switch(s: &LocalStm) -> Option<&LocalStm> {
    match s {
        LocalStm::Switch { .. } => Some(s),
        LocalStm::Nil | LocalStm::Return(_) => None,
        LocalStm::Exp(_, c) | LocalStm::VarDecl(_, _, _, c) | LocalStm::Assign(_, _, _, c) => first_switch(c),
        LocalStm::If(_, a, b, c) => first_switch(a).or_else(|| first_switch(b)).or_else(|| first_switch(c)),
        LocalStm::Block(b, c) | LocalStm::Try(b, _, c) => first_switch(b).or_else(|| first_switch(c)),
    }
}

fn switch_in(units: &[LocalDecl], unit: &str, method: &str) -> Result<(Vec<String>, bool)> {
    let u = units.iter().find(|u| u.name == unit).with_context(|| format!("no unit {unit}"))?;
    let body = u.methods.iter().find(|m| m.name == method).and_then(|m| m.body.as_ref()).context("no body")?;
    let Some(LocalStm::Switch { cases, default, .. }) = first_switch(body) else {
        bail!("{unit}.{method} has no switch")
    };
    Ok((cases.iter().map(|(l, _)| l.sort_key()).collect(), matches!(default, Some(LocalDefault::Throw(_)))))
}

fn knowledge_of_choice() -> Result<String> {
    let wrong = load_str("ConsumeItemsWrong.chor", &read("negative/ConsumeItemsWrong.chor"));
    ensure!(!wrong.has_errors(), "wrong version should check");
    let p = project_frontend(&wrong);
    let errors: Vec<_> = p.diags.iter().filter(|d| d.is_error()).collect();
    ensure!(errors.len() == 1, "expected one error, got {:?}", p.diags);
    let e = errors[0];
    ensure!(e.code == Code::MergeFailure && e.message.contains("'B'"), "{e:?}");
    let line = e.line(&wrong.sources);
    let text = read("negative/ConsumeItemsWrong.chor");
    ensure!(text.lines().nth(line - 1).is_some_and(|l| l.contains("if")), "span at line {line} is not the conditional");
    let fixed = project_frontend(&frontend("ConsumeItems")?);
    ensure!(!fixed.has_errors(), "{:?}", fixed.diags);
    let (cases, throws) = switch_in(&fixed.units, "ConsumeItems_B", "consumeItems")?;
    ensure!(cases == ["GO", "STOP"] && throws, "B switch: {cases:?}, default throw {throws}");
    Ok(format!("MergeFailure at B line {line}; fixed B switches on GO/STOP"))
}

fn golden_projection() -> Result<String> {
    let plain = |u: &LocalDecl| {
        let mut u = u.clone();
        u.meta = None;
        squash(&print_unit(&u, PrintOptions::default()))
    };
    let hello = project_frontend(&frontend("HelloRoles")?);
    let expected = [
        ("HelloRoles_A", "class HelloRoles_A { public static void sayHello() { String a = \"Hello from A\"; System.out.println( a ); }}"),
        ("HelloRoles_B", "class HelloRoles_B { public static void sayHello() { String b = \"Hello from B\"; System.out.println( b ); }}"),
    ];
    ensure!(hello.units.len() == 2, "{} units", hello.units.len());
    for (name, want) in expected {
        let u = hello.units.iter().find(|u| u.name == name).with_context(|| format!("no unit {name}"))?;
        ensure!(plain(u) == squash(want), "{name} differs:\n{}", print_unit(u, PrintOptions::default()));
    }
    let auth = project_frontend(&frontend("DistAuth")?);
    let (cases, throws) = switch_in(&auth.units, "DistAuth_Client", "authenticate")?;
    ensure!(cases == ["OK", "KO"] && throws, "Client switch: {cases:?}, default throw {throws}");
    Ok("HelloRoles A/B match; DistAuth Client switches on OK/KO".into())
}

fn ints(v: &View) -> Option<Vec<i32>> {
    let View::List(xs) = v else { return None };
    xs.iter().map(|x| if let View::Int(i) = x { Some(*i) } else { None }).collect()
}

fn differential() -> Result<String> {
    let start = Instant::now();
    for name in POSITIVE {
        agree(&frontend(name)?, name, &manifest(name))?;
    }
    let hello = agree(&frontend("HelloRoles")?, "HelloRoles", &manifest("HelloRoles"))?;
    ensure!(hello.distributed.transcripts["A"] == ["Hello from A"], "{:?}", hello.distributed.transcripts);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (sort, m) = (frontend("Mergesort")?, manifest("Mergesort"));
    for _ in 0..100 {
        let len = rng.gen_range(0..=32);
        let input: Vec<i32> = (0..len).map(|_| rng.gen_range(0..1000)).collect();
        let c = agree(&sort, "Mergesort", &m.with_args("A", vec![json!(input)]))?;
        let mut sorted = input.clone();
        sorted.sort();
        for (who, r) in [("global", &c.global), ("distributed", &c.distributed)] {
            ensure!(ints(&r.returns["A"]).as_ref() == Some(&sorted), "{who} sorted {input:?} to {:?}", r.returns["A"]);
        }
    }
    let (kara, m) = (frontend("Karatsuba")?, manifest("Karatsuba"));
    for _ in 0..100 {
        let (a, b): (i64, i64) = (rng.gen_range(-999_999..=999_999), rng.gen_range(-999_999..=999_999));
        let c = agree(&kara, "Karatsuba", &m.with_args("A", vec![json!(a), json!(b)]))?;
        for (who, r) in [("global", &c.global), ("distributed", &c.distributed)] {
            ensure!(r.returns["A"] == View::Long(a * b), "{who}: {a} * {b} gave {:?}", r.returns["A"]);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("9 programs, 100 sorts, 100 products in {:.1} s", elapsed.as_secs_f64()))
}

fn deadlock_freedom() -> Result<String> {
    let mut slowest = Duration::ZERO;
    for name in POSITIVE {
        let (f, m) = (frontend(name)?, manifest(name));
        for i in 0..20 {
            let start = Instant::now();
            let c = agree(&f, name, &m).with_context(|| format!("run {i}"))?;
            ensure!(!matches!(c.distributed.status, Status::DeadlockTimeout { .. }), "{name} run {i} hit the deadline");
            slowest = slowest.max(start.elapsed());
        }
    }
    Ok(format!("180 runs, slowest {:.0} ms", slowest.as_secs_f64() * 1e3))
}

/// The token held in the optional field of an `AuthResult` view.
fn token(v: &View) -> Result<Option<View>> {
    let View::Object { fields, .. } = v else { bail!("not an object: {v:?}") };
    let mut opts = fields.values().filter_map(|f| if let View::Optional(o) = f { Some(o) } else { None });
    let (Some(o), None) = (opts.next(), opts.next()) else { bail!("expected exactly one visible token field: {v:?}") };
    Ok(o.as_deref().cloned())
}

fn both_or_neither() -> Result<String> {
    let (f, m) = (frontend("DistAuth")?, manifest("DistAuth"));
    let good = agree(&f, "DistAuth", &m)?;
    let (c, s) = (token(&good.distributed.returns["Client"])?, token(&good.distributed.returns["Service"])?);
    ensure!(c.is_some() && c == s, "valid credentials: Client {c:?}, Service {s:?}");
    let bad = agree(&f, "DistAuth", &m.with_args("Client", vec![json!("mallory"), json!("guess")]))?;
    let (bc, bs) = (token(&bad.distributed.returns["Client"])?, token(&bad.distributed.returns["Service"])?);
    ensure!(bc.is_none() && bs.is_none(), "invalid credentials: Client {bc:?}, Service {bs:?}");
    Ok("equal tokens when valid, none when invalid".into())
}

fn subtype(lhs: &str, rhs: &str) -> Result<bool> {
    let f = load_str("Probe.chor", &format!("class Probe@(A, B)<T@X> {{ {lhs} l; {rhs} r; }}"));
    ensure!(!f.has_errors(), "{}", f.render_diags());
    let c = f.checked.table.get("Probe").context("no Probe")?;
    Ok(f.checked.table.is_subtype(&Scope::for_class(c), &c.fields[0].ty, &c.fields[1].ty))
}

fn channel_subtyping() -> Result<String> {
    let sym = "SymChannel@(A, B)<T>";
    let facts = [
        "DiDataChannel@(A, B)<T>",
        "DiDataChannel@(B, A)<T>",
        "DiSelectChannel@(A, B)",
        "DiSelectChannel@(B, A)",
        "DiChannel@(A, B)<T>",
        "BiChannel@(A, B)<T, T>",
    ];
    for sup in facts {
        ensure!(subtype(sym, sup)?, "{sym} is not a subtype of {sup}");
    }
    ensure!(!subtype("SymChannel@(B, A)<T>", sym)?, "SymChannel@(B, A)<T> is a subtype of {sym}");
    Ok("6 facts hold, swapped roles rejected".into())
}

fn gen_exp(rng: &mut ChaCha8Rng, depth: u32) -> LocalExp {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => LocalExp::Unit,
        1 => LocalExp::Name("x".into()),
        2 => LocalExp::Name("y".into()),
        _ => LocalExp::Lit(Literal::Int(rng.gen_range(0..3))),
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => LocalExp::UnitCall((0..rng.gen_range(0..3)).map(|_| gen_exp(rng, depth - 1)).collect()),
        1 => LocalExp::call(Some(LocalExp::Name("ch".into())), "com", vec![gen_exp(rng, depth - 1)]),
        _ => LocalExp::Binary(BinOp::Add, Box::new(gen_exp(rng, depth - 1)), Box::new(gen_exp(rng, depth - 1))),
    }
}

fn gen_stm(rng: &mut ChaCha8Rng, depth: u32) -> LocalStm {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen() { LocalStm::Nil } else { LocalStm::Return(rng.gen::<bool>().then(|| gen_exp(rng, 2))) };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(gen_stm(rng, depth - 1));
    match rng.gen_range(0..5) {
        0 => LocalStm::Exp(gen_exp(rng, 2), sub(rng)),
        1 => LocalStm::VarDecl(LocalTE::Named("Integer".into(), vec![]), "v".into(), Some(gen_exp(rng, 2)), sub(rng)),
        2 => LocalStm::If(gen_exp(rng, 1), sub(rng), sub(rng), sub(rng)),
        3 => LocalStm::Block(sub(rng), sub(rng)),
        _ => {
            let labels: Vec<_> = ["L", "R", "S"].into_iter().filter(|_| rng.gen()).collect();
            LocalStm::Switch {
                guard: LocalExp::call(Some(LocalExp::Name("ch".into())), "select", vec![LocalExp::Unit]),
                cases: labels.into_iter().map(|l| (LocalSwArg::Case(l.into()), *sub(rng))).collect(),
                default: Some(LocalDefault::Throw("unexpected".into())),
                cont: sub(rng),
            }
        }
    }
}

fn merge_laws(a: &LocalStm, b: &LocalStm) -> Result<()> {
    for s in [a, b] {
        ensure!(normalise_stm(&normalise_stm(s)) == normalise_stm(s), "normalising twice changes {s:?}");
        let n = normalise_stm(s);
        ensure!(merge(&n, &n) == Ok(n.clone()), "merge is not idempotent on {n:?}");
    }
    let (a, b) = (normalise_stm(a), normalise_stm(b));
    let ab = merge(&a, &b).map(|s| s.sorted_cases());
    let ba = merge(&b, &a).map(|s| s.sorted_cases());
    ensure!(ab.is_ok() == ba.is_ok() && (ab.is_err() || ab == ba), "merge is not symmetric on {a:?} and {b:?}");
    Ok(())
}

fn merge_properties() -> Result<String> {
    let mut harvested = 0;
    for name in POSITIVE {
        let f = frontend(name)?;
        for set in harvest_branches(&f.program, &f.checked) {
            for a in &set {
                for b in &set {
                    merge_laws(a, b)?;
                    harvested += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let generated = 500;
    for _ in 0..generated {
        merge_laws(&gen_stm(&mut rng, 4), &gen_stm(&mut rng, 4))?;
    }
    let residue = LocalStm::seq(LocalExp::UnitCall(vec![LocalExp::Unit]), LocalStm::Nil);
    let n = normalise_stm(&residue);
    ensure!(n == LocalStm::Nil, "Unit.id(Unit.id) normalises to {n:?}");
    ensure!(merge(&n, &LocalStm::Nil) == Ok(LocalStm::Nil), "residue does not merge with nil");
    ensure!(harvested + generated >= 500, "only {} instances", harvested + generated);
    Ok(format!("{harvested} harvested + {generated} generated pairs"))
}

const PSEUDONYMISE: &str = "return new Vitals@Gatherer(\"anonymous\"@Gatherer, vitals.heartRate);";

fn vitals_sources(pseudonymise: &str) -> Vec<(String, String)> {
    vec![
        ("VitalsStreaming.chor".into(), read("positive/VitalsStreaming.chor").replace(PSEUDONYMISE, pseudonymise)),
        ("VitalsStreamingTest.chor".into(), read("tests/VitalsStreamingTest.chor")),
    ]
}

fn unit_testing() -> Result<String> {
    ensure!(read("positive/VitalsStreaming.chor").contains(PSEUDONYMISE), "pseudonymiser not found");
    let f = load(&vitals_sources(PSEUDONYMISE));
    ensure!(!f.has_errors(), "{}", f.render_diags());
    let (cases, _) = discover(&f);
    ensure!(cases.len() == 1, "{} cases discovered", cases.len());
    let report = test_frontend(&f, DEADLINE).map_err(|d| anyhow::anyhow!("{d:?}"))?;
    let case = &report.cases[0];
    ensure!(case.workers == 2 && case.passed(), "{case:?}");
    let mutant = load(&vitals_sources("return vitals;"));
    ensure!(!mutant.has_errors(), "{}", mutant.render_diags());
    let report = test_frontend(&mutant, DEADLINE).map_err(|d| anyhow::anyhow!("{d:?}"))?;
    let case = &report.cases[0];
    ensure!(case.status == CaseStatus::Failed, "mutant: {:?}", case.status);
    let cause = case.cause().context("no failure recorded")?;
    ensure!(cause.message == "bad pseudonymisation", "mutant failed with {:?}", cause.message);
    Ok(format!("{} passes with 2 workers; mutant fails at {}", case.name, cause.role))
}

fn bench_table(dir: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let csv = dir.join("metrics.csv");
    let files: Vec<_> = POSITIVE.iter().map(|n| corpus(&format!("positive/{n}.chor"))).collect();
    let out = Command::new(env!("CARGO_BIN_EXE_choral"))
        .arg("bench")
        .args(&files)
        .arg("--csv")
        .arg(&csv)
        .args(["--warmup", "2", "--iterations", "10"])
        .output()?;
    ensure!(out.status.success(), "bench failed: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().context("empty table")?.split(',').map(String::from).collect();
    ensure!(header.join(",") == CSV_HEADER, "header {header:?}");
    Ok(lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect())
}

fn metrics() -> Result<String> {
    let dir = tempfile::tempdir()?;
    let rows = bench_table(dir.path())?;
    ensure!(rows.len() == POSITIVE.len(), "{} rows", rows.len());
    let row = |name: &str| rows.iter().find(|r| r["program"] == name).with_context(|| format!("no row for {name}"));
    for (name, roles, conds) in [("HelloRoles", 2, 0), ("DistAuth", 3, 1), ("Mergesort", 3, 4), ("DistAuth10", 10, 1)] {
        let r = row(name)?;
        let got: (usize, usize) = (r["roles"].parse()?, r["conditionals"].parse()?);
        ensure!(got == (roles, conds), "{name}: (roles, conditionals) = {got:?}");
    }
    let mut worst: f64 = 0.0;
    for r in &rows {
        for col in ["typecheck_ms", "projection_ms"] {
            let ms: f64 = r[col].parse()?;
            ensure!(ms < 250.0, "{} {col} = {ms}", r["program"]);
            worst = worst.max(ms);
        }
    }
    let exp = |n: &str| -> Result<i64> { Ok(row(n)?["expansion_pct"].parse()?) };
    let family = [exp("DistAuth")?, exp("DistAuth5")?, exp("DistAuth10")?];
    ensure!(family.windows(2).all(|w| w[0] <= w[1]), "expansion not monotone: {family:?}");
    Ok(format!("counts match, slowest phase {worst:.2} ms, DistAuth expansion {family:?}"))
}

type Criterion = (&'static str, fn() -> Result<String>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("negative diagnostics", negative_diagnostics),
        ("knowledge of choice", knowledge_of_choice),
        ("golden projection", golden_projection),
        ("differential compliance", differential),
        ("deadlock freedom", deadlock_freedom),
        ("DistAuth both-or-neither", both_or_neither),
        ("channel subtyping", channel_subtyping),
        ("merge and normalise properties", merge_properties),
        ("choreographic unit tests", unit_testing),
        ("metrics harness", metrics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(anyhow::anyhow!("panicked: {}", msg.unwrap_or_default()))
        });
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{ms:.0} ms]", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e:#} [{ms:.0} ms]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
