//! Merging of the local behaviours of alternative branches.
//!
//! Statements merge when they have the same shape and equal expressions;
//! switches over equal guards merge case by case and keep the cases only one
//! side has.

use crate::syntax::*;

/// First pair of statements that could not be reconciled.
#[derive(Debug, Clone, PartialEq)]
pub struct Conflict {
    pub left: Box<LocalStm>,
    pub right: Box<LocalStm>,
}

fn conflict<T>(a: &LocalStm, b: &LocalStm) -> Result<T, Conflict> {
    Err(Conflict { left: Box::new(a.clone()), right: Box::new(b.clone()) })
}

pub fn merge_exp(a: &LocalExp, b: &LocalExp) -> Option<LocalExp> {
    (a == b).then(|| a.clone())
}

/// Merges two normalised statements.
pub fn merge(a: &LocalStm, b: &LocalStm) -> Result<LocalStm, Conflict> {
    use LocalStm::*;
    let bx = |s: LocalStm| Box::new(s);
    match (a, b) {
        (Nil, Nil) => Ok(Nil),
        (Return(x), Return(y)) => match (x, y) {
            (None, None) => Ok(Return(None)),
            (Some(x), Some(y)) => merge_exp(x, y).map(|e| Return(Some(e))).map_or_else(|| conflict(a, b), Ok),
            _ => conflict(a, b),
        },
        (Exp(e1, c1), Exp(e2, c2)) => match merge_exp(e1, e2) {
            Some(e) => Ok(Exp(e, bx(merge(c1, c2)?))),
            None => conflict(a, b),
        },
        (VarDecl(t1, n1, i1, c1), VarDecl(t2, n2, i2, c2)) if t1 == t2 && n1 == n2 && i1 == i2 => {
            Ok(VarDecl(t1.clone(), n1.clone(), i1.clone(), bx(merge(c1, c2)?)))
        }
        (Assign(l1, o1, r1, c1), Assign(l2, o2, r2, c2)) if l1 == l2 && o1 == o2 && r1 == r2 => {
            Ok(Assign(l1.clone(), *o1, r1.clone(), bx(merge(c1, c2)?)))
        }
        (If(g1, t1, e1, c1), If(g2, t2, e2, c2)) if g1 == g2 => {
            Ok(If(g1.clone(), bx(merge(t1, t2)?), bx(merge(e1, e2)?), bx(merge(c1, c2)?)))
        }
        (Block(b1, c1), Block(b2, c2)) => Ok(Block(bx(merge(b1, b2)?), bx(merge(c1, c2)?))),
        (
            Switch { guard: g1, cases: k1, default: d1, cont: c1 },
            Switch { guard: g2, cases: k2, default: d2, cont: c2 },
        ) if g1 == g2 => {
            let mut cases = Vec::new();
            for (l, s) in k1 {
                match k2.iter().find(|(l2, _)| l2 == l) {
                    Some((_, s2)) => cases.push((l.clone(), merge(s, s2)?)),
                    None => cases.push((l.clone(), s.clone())),
                }
            }
            for (l, s) in k2 {
                if !k1.iter().any(|(l1, _)| l1 == l) {
                    cases.push((l.clone(), s.clone()));
                }
            }
            let default = match (d1, d2) {
                (None, d) | (d, None) => d.clone(),
                (Some(LocalDefault::Throw(m1)), Some(LocalDefault::Throw(m2))) if m1 == m2 => d1.clone(),
                (Some(LocalDefault::Body(x)), Some(LocalDefault::Body(y))) => {
                    Some(LocalDefault::Body(bx(merge(x, y)?)))
                }
                _ => return conflict(a, b),
            };
            Ok(Switch { guard: g1.clone(), cases, default, cont: bx(merge(c1, c2)?) })
        }
        (Try(b1, k1, c1), Try(b2, k2, c2)) if k1.len() == k2.len() => {
            let body = merge(b1, b2)?;
            let mut catches = Vec::new();
            for (x, y) in k1.iter().zip(k2) {
                if x.te != y.te || x.name != y.name {
                    return conflict(a, b);
                }
                catches.push(LocalCatch { te: x.te.clone(), name: x.name.clone(), body: merge(&x.body, &y.body)? });
            }
            Ok(Try(bx(body), catches, bx(merge(c1, c2)?)))
        }
        _ => conflict(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::normalise::normalise_stm;

    fn sel(label: &str, body: LocalStm) -> LocalStm {
        LocalStm::Switch {
            guard: LocalExp::call(Some(LocalExp::Name("ch".into())), "select", vec![LocalExp::Unit]),
            cases: vec![(LocalSwArg::Case(label.into()), body)],
            default: Some(LocalDefault::Throw("bad label".into())),
            cont: Box::new(LocalStm::Nil),
        }
    }

    fn print(x: &str) -> LocalStm {
        LocalStm::seq(LocalExp::call(None, "print", vec![LocalExp::Name(x.into())]), LocalStm::Nil)
    }

    #[test]
    fn unit_residue_merges_with_blank() {
        let a = normalise_stm(&LocalStm::seq(LocalExp::UnitCall(vec![LocalExp::Unit]), LocalStm::Nil));
        let b = normalise_stm(&LocalStm::Nil);
        assert_eq!(merge(&a, &b), Ok(LocalStm::Nil));
    }

    #[test]
    fn switches_take_case_union() {
        let m = merge(&sel("OK", print("x")), &sel("KO", print("y"))).unwrap();
        let LocalStm::Switch { cases, default, .. } = &m else { panic!("{m:?}") };
        let labels: Vec<String> = cases.iter().map(|(l, _)| l.sort_key()).collect();
        assert_eq!(labels, ["OK", "KO"]);
        assert!(matches!(default, Some(LocalDefault::Throw(_))));
    }

    #[test]
    fn shared_cases_merge_bodies() {
        assert!(merge(&sel("GO", print("x")), &sel("GO", print("x"))).is_ok());
        let err = merge(&sel("GO", print("x")), &sel("GO", print("y"))).unwrap_err();
        assert_eq!(*err.left, print("x"));
    }

    #[test]
    fn behaviour_against_blank_fails() {
        assert!(merge(&print("x"), &LocalStm::Nil).is_err());
    }

    #[test]
    fn symmetric_up_to_case_order() {
        let (a, b) = (sel("OK", print("x")), sel("KO", print("y")));
        let ab = merge(&a, &b).unwrap().sorted_cases();
        let ba = merge(&b, &a).unwrap().sorted_cases();
        assert_eq!(ab, ba);
    }
}
