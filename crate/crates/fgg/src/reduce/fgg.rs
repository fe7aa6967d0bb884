use crate::ast::fgg::*;
use crate::ast::Name;
use crate::typecheck::fgg::{Checker, TypeEnv};

use super::{assert_failure, Halt, Outcome, Redex, Rule, Run, Step, Tracer};

/// Reduction for FGG. Method bodies are specialised at call time by
/// substituting the receiver's and the call's type actuals.
pub struct Machine<'p> {
    pub ck: Checker<'p>,
}

impl<'p> Machine<'p> {
    pub fn new(p: &'p Program) -> Self {
        Machine { ck: Checker::new(p) }
    }

    pub fn redex(e: &Expr) -> Redex {
        if e.is_value() {
            return Redex::Value;
        }
        let mut path = Vec::new();
        let mut cur = e;
        'down: loop {
            let kids = cur.children();
            for (i, k) in kids.iter().take(cur.eval_arity()).enumerate() {
                if !k.is_value() {
                    path.push(i);
                    cur = k;
                    continue 'down;
                }
            }
            return Redex::At(path);
        }
    }

    pub fn contract(&self, e: &Expr) -> Result<(Expr, Rule), Halt> {
        match &e.kind {
            ExprKind::Select { recv, field } => {
                let ExprKind::Lit { ty, targs, args } = &recv.kind else {
                    return Err(Halt::Stuck(format!("field {field} of non-struct {recv}")));
                };
                let fields =
                    self.ck.table.fields(ty, targs).ok_or_else(|| Halt::Stuck(format!("unknown struct {ty}")))?;
                let i = fields
                    .iter()
                    .position(|f| f.name == *field)
                    .ok_or_else(|| Halt::Stuck(format!("{ty} has no field {field}")))?;
                args.get(i)
                    .cloned()
                    .map(|v| (v, Rule::Fields))
                    .ok_or_else(|| Halt::Stuck(format!("literal of {ty} is missing field {field}")))
            }
            ExprKind::Call { recv, method, targs, args } => {
                let Some(Type::Named(t, recv_targs)) = recv.value_type() else {
                    return Err(Halt::Stuck("receiver is not a value".into()));
                };
                let m = self
                    .ck
                    .table
                    .method(&t, method)
                    .ok_or_else(|| Halt::Stuck(format!("{t} has no method {method}")))?;
                if m.sig.params.len() != args.len()
                    || m.sig.formal.len() != targs.len()
                    || m.recv_params.len() != recv_targs.len()
                {
                    return Err(Halt::Stuck(format!("arity mismatch calling {t}.{method}")));
                }
                let theta: Vec<(Name, Type)> = m
                    .recv_params
                    .iter()
                    .cloned()
                    .zip(recv_targs)
                    .chain(m.sig.formal.iter().map(|f| f.param.clone()).zip(targs.iter().cloned()))
                    .collect();
                let mut vars = vec![(m.recv.clone(), (**recv).clone())];
                vars.extend(m.sig.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()));
                let mut body = m.body.clone();
                body.subst_types(&theta);
                body.subst_vars(&vars);
                Ok((body, Rule::Call))
            }
            ExprKind::Assert { recv, ty } => {
                let t = recv.value_type().expect("asserted term is a value");
                if self.ck.subtype(&t, ty, &TypeEnv::default()) {
                    Ok(((**recv).clone(), Rule::Assert))
                } else {
                    Err(assert_failure(t, ty))
                }
            }
            ExprKind::BinOp { op, lhs, rhs } => match (&lhs.kind, &rhs.kind) {
                (ExprKind::Int(a), ExprKind::Int(b)) => Ok((Expr::literal(op.eval(*a, *b)).at(e.span), Rule::Binop)),
                _ => Err(Halt::Stuck(format!("{op} applied to non-integers"))),
            },
            ExprKind::If { cond, then, els } => match cond.kind {
                ExprKind::Bool(b) => Ok(((if b { then } else { els }).as_ref().clone(), Rule::If)),
                _ => Err(Halt::Stuck(format!("non-boolean condition {cond}"))),
            },
            ExprKind::Var(x) => Err(Halt::Stuck(format!("free variable {x}"))),
            ExprKind::Lit { .. } | ExprKind::Int(_) | ExprKind::Bool(_) => {
                Err(Halt::Stuck("values do not reduce".to_string()))
            }
        }
    }

    pub fn step_in_place(&self, e: &mut Expr) -> Result<Option<Rule>, Halt> {
        let Redex::At(path) = Self::redex(e) else {
            return Ok(None);
        };
        let site = e.at_path_mut(&path);
        let (next, rule) = self.contract(site)?;
        *site = next;
        Ok(Some(rule))
    }

    pub fn step(&self, e: &Expr) -> Step<Expr> {
        let mut next = e.clone();
        match self.step_in_place(&mut next) {
            Ok(Some(rule)) => Step::Stepped { next, rule },
            Ok(None) => Step::Value,
            Err(h) => Step::Halted(h),
        }
    }

    pub fn run(&self, e: &Expr, max_steps: usize) -> Run<Value> {
        self.run_traced(e, max_steps, None)
    }

    pub fn run_traced(&self, e: &Expr, max_steps: usize, mut trace: Option<Tracer<'_, Expr>>) -> Run<Value> {
        let mut cur = e.clone();
        let mut steps = 0;
        loop {
            if cur.is_value() {
                let value = Value::from_expr(&cur).expect("value form");
                return Run { outcome: Outcome::Value { value }, steps };
            }
            if steps >= max_steps {
                return Run { outcome: Outcome::BudgetExhausted, steps };
            }
            if let Some(t) = trace.as_mut() {
                if let Redex::At(path) = Self::redex(&cur) {
                    let site = cur.at_path(&path);
                    if let Ok((_, rule)) = self.contract(site) {
                        t(rule, site);
                    }
                }
            }
            match self.step_in_place(&mut cur) {
                Ok(_) => steps += 1,
                Err(h) => return Run { outcome: Outcome::halted(h), steps },
            }
        }
    }
}

pub fn run_program(p: &Program, max_steps: usize) -> Run<Value> {
    Machine::new(p).run(&p.main, max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_fgg;

    const LIST: &str = include_str!("../../tests/corpus/list.fgg");
    const BOX: &str = "package main\n\
        type Any interface {}\n\
        type Box[α Any] struct { value α }\n\
        func (b Box[α]) Nest(n int) Any {\n\
          if (n > 0) { return Box[Box[α]]{b}.Nest(n-1) } else { return b }\n\
        }\n";

    fn box_nest(k: i64) -> Program {
        parse_fgg(&format!("{BOX}func main() {{ _ = Box[int]{{0}}.Nest({k}) }}")).unwrap()
    }

    /// Box^k[int]{0} built directly, as an independent oracle.
    fn nested_box(k: usize) -> Value {
        let mut v = Value::Int(0);
        let mut t = Type::int();
        for _ in 0..=k {
            v = Value::Struct(crate::ast::name("Box"), vec![t.clone()], vec![v]);
            t = Type::named("Box", vec![t]);
        }
        v
    }

    #[test]
    fn box_nest_two() {
        let r = run_program(&box_nest(2), 1000);
        assert_eq!(r.outcome, Outcome::Value { value: nested_box(2) });
        assert_eq!(r.outcome.value().unwrap().to_string(), "Box[Box[Box[int]]]{Box[Box[int]]{Box[int]{0}}}");
    }

    #[test]
    fn box_steps_grow_with_depth() {
        let steps: Vec<usize> = (0..5).map(|k| run_program(&box_nest(k), 1000).steps).collect();
        assert!(steps.windows(2).all(|w| w[0] < w[1]), "{steps:?}");
    }

    #[test]
    fn gtfunc_apply_seven_is_false() {
        let src = LIST.replace(
            "Cons[int]{1, Cons[int]{7, Cons[int]{3, Nil[int]{}}}} // : List[int]\n        .Map[bool](GtFunc[int]{5}) // : List[bool]",
            "GtFunc[int]{5}.Apply(7)",
        );
        let p = parse_fgg(&src).unwrap();
        assert_eq!(run_program(&p, 100).outcome, Outcome::Value { value: Value::Bool(false) });
    }

    #[test]
    fn list_maps_to_booleans() {
        let p = parse_fgg(LIST).unwrap();
        let r = run_program(&p, 10_000);
        assert_eq!(
            r.outcome.value().unwrap().to_string(),
            "Cons[bool]{true, Cons[bool]{false, Cons[bool]{true, Nil[bool]{}}}}"
        );
    }

    #[test]
    fn assertion_uses_subtyping_of_instantiated_types() {
        let src = LIST.replace(
            "Cons[int]{1, Cons[int]{7, Cons[int]{3, Nil[int]{}}}} // : List[int]\n        .Map[bool](GtFunc[int]{5}) // : List[bool]",
            "GtFunc[int]{5}.(Function[bool, bool])",
        );
        let p = parse_fgg(&src).unwrap();
        assert_eq!(
            run_program(&p, 100).outcome,
            Outcome::Panic { message: "Unable to assert GtFunc[int] as type Function[bool, bool]".into() }
        );
    }
}
