//! Unit normalisation: removes the effect-free `Unit.id` residue that
//! projection leaves behind for role-absent expressions.

use crate::syntax::*;

/// Expressions that can be dropped when used as statements or as
/// arguments of `Unit.id`.
pub fn is_noop(e: &LocalExp) -> bool {
    match e {
        LocalExp::Unit | LocalExp::Name(_) | LocalExp::This | LocalExp::Lit(_) => true,
        LocalExp::Field(base, _) => is_noop(base),
        _ => false,
    }
}

pub fn normalise_exp(e: &LocalExp) -> LocalExp {
    match e {
        LocalExp::Unit | LocalExp::Lit(_) | LocalExp::Name(_) | LocalExp::This => e.clone(),
        LocalExp::UnitCall(args) => {
            let mut kept = Vec::new();
            for a in args {
                match normalise_exp(a) {
                    LocalExp::UnitCall(inner) => kept.extend(inner),
                    n if is_noop(&n) => {}
                    n => kept.push(n),
                }
            }
            match kept.len() {
                0 => LocalExp::Unit,
                1 => kept.pop().unwrap(),
                _ => LocalExp::UnitCall(kept),
            }
        }
        LocalExp::Field(base, f) => match normalise_exp(base) {
            LocalExp::Unit => LocalExp::Unit,
            b => LocalExp::Field(Box::new(b), f.clone()),
        },
        LocalExp::Binary(op, l, r) => LocalExp::Binary(*op, Box::new(normalise_exp(l)), Box::new(normalise_exp(r))),
        LocalExp::Call { recv, type_args, name, args } => LocalExp::Call {
            recv: recv.as_ref().map(|r| Box::new(normalise_exp(r))),
            type_args: type_args.clone(),
            name: name.clone(),
            args: args.iter().map(normalise_exp).collect(),
        },
        LocalExp::New { type_args, te, args } => LocalExp::New {
            type_args: type_args.clone(),
            te: te.clone(),
            args: args.iter().map(normalise_exp).collect(),
        },
    }
}

pub fn normalise_stm(s: &LocalStm) -> LocalStm {
    let b = |x: &LocalStm| Box::new(normalise_stm(x));
    match s {
        LocalStm::Nil => LocalStm::Nil,
        LocalStm::Return(e) => LocalStm::Return(e.as_ref().map(normalise_exp)),
        LocalStm::Exp(e, c) => {
            let e = normalise_exp(e);
            if is_noop(&e) {
                normalise_stm(c)
            } else {
                LocalStm::Exp(e, b(c))
            }
        }
        LocalStm::VarDecl(t, n, i, c) => LocalStm::VarDecl(t.clone(), n.clone(), i.as_ref().map(normalise_exp), b(c)),
        LocalStm::Assign(l, op, r, c) => LocalStm::Assign(normalise_exp(l), *op, normalise_exp(r), b(c)),
        LocalStm::If(g, t, e, c) => LocalStm::If(normalise_exp(g), b(t), b(e), b(c)),
        LocalStm::Block(body, c) => {
            let body = normalise_stm(body);
            if body.is_nil() {
                normalise_stm(c)
            } else {
                LocalStm::Block(Box::new(body), b(c))
            }
        }
        LocalStm::Switch { guard, cases, default, cont } => LocalStm::Switch {
            guard: normalise_exp(guard),
            cases: cases.iter().map(|(l, s)| (l.clone(), normalise_stm(s))).collect(),
            default: default.as_ref().map(|d| match d {
                LocalDefault::Body(s) => LocalDefault::Body(b(s)),
                LocalDefault::Throw(m) => LocalDefault::Throw(m.clone()),
            }),
            cont: b(cont),
        },
        LocalStm::Try(body, catches, c) => LocalStm::Try(
            b(body),
            catches
                .iter()
                .map(|k| LocalCatch { te: k.te.clone(), name: k.name.clone(), body: normalise_stm(&k.body) })
                .collect(),
            b(c),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_call(args: Vec<LocalExp>) -> LocalExp {
        LocalExp::UnitCall(args)
    }

    fn send(x: &str) -> LocalExp {
        LocalExp::call(Some(LocalExp::Name("ch".into())), "com", vec![LocalExp::Name(x.into())])
    }

    #[test]
    fn unit_statement_is_blank() {
        assert_eq!(normalise_stm(&LocalStm::seq(LocalExp::Unit, LocalStm::Nil)), LocalStm::Nil);
    }

    #[test]
    fn nested_unit_calls_collapse() {
        let e = unit_call(vec![unit_call(vec![LocalExp::Name("x".into())])]);
        assert_eq!(normalise_exp(&e), LocalExp::Unit);
        let s = LocalStm::seq(unit_call(vec![LocalExp::Unit]), LocalStm::Nil);
        assert_eq!(normalise_stm(&s), LocalStm::Nil);
    }

    #[test]
    fn single_effect_is_kept() {
        let e = unit_call(vec![LocalExp::Unit, send("a"), LocalExp::This]);
        assert_eq!(normalise_exp(&e), send("a"));
        let two = unit_call(vec![send("a"), unit_call(vec![send("b"), LocalExp::Unit])]);
        assert_eq!(normalise_exp(&two), unit_call(vec![send("a"), send("b")]));
    }

    #[test]
    fn idempotent_on_samples() {
        let samples = vec![
            LocalStm::seq(unit_call(vec![send("a"), LocalExp::Unit]), LocalStm::Nil),
            LocalStm::Block(
                Box::new(LocalStm::seq(LocalExp::Unit, LocalStm::Nil)),
                Box::new(LocalStm::Return(Some(unit_call(vec![send("z")])))),
            ),
        ];
        for s in samples {
            let once = normalise_stm(&s);
            assert_eq!(normalise_stm(&once), once);
        }
    }
}
