use crate::ast::fg::*;
use crate::typecheck::fg::Checker;

use super::{assert_failure, Halt, Outcome, Redex, Rule, Run, Step, Tracer};

/// Reduction for FG and its extended dialect.
pub struct Machine<'p> {
    pub ck: Checker<'p>,
}

impl<'p> Machine<'p> {
    pub fn new(p: &'p Program) -> Self {
        Machine { ck: Checker::new(p) }
    }

    /// The unique decomposition `E[redex]`.
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

    /// Contracts a term whose evaluation positions all hold values.
    pub fn contract(&self, e: &Expr) -> Result<(Expr, Rule), Halt> {
        match &e.kind {
            ExprKind::Select { recv, field } => {
                let ExprKind::Lit { ty, args } = &recv.kind else {
                    return Err(Halt::Stuck(format!("field {field} of non-struct {recv}")));
                };
                let fields = self.ck.table.fields(ty).ok_or_else(|| Halt::Stuck(format!("unknown struct {ty}")))?;
                let i = fields
                    .iter()
                    .position(|f| f.name == *field)
                    .ok_or_else(|| Halt::Stuck(format!("{ty} has no field {field}")))?;
                args.get(i)
                    .cloned()
                    .map(|v| (v, Rule::Fields))
                    .ok_or_else(|| Halt::Stuck(format!("literal of {ty} is missing field {field}")))
            }
            ExprKind::Call { recv, method, args } => {
                let t = recv.value_type().expect("receiver is a value");
                let m = self
                    .ck
                    .table
                    .method(&t, method)
                    .ok_or_else(|| Halt::Stuck(format!("{t} has no method {method}")))?;
                if m.params.len() != args.len() {
                    return Err(Halt::Stuck(format!("arity mismatch calling {t}.{method}")));
                }
                let mut map = vec![(m.recv.name.clone(), (**recv).clone())];
                map.extend(m.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()));
                let mut body = m.body.clone();
                body.subst(&map);
                Ok((body, Rule::Call))
            }
            ExprKind::Assert { recv, ty } => {
                let t = recv.value_type().expect("asserted term is a value");
                if self.ck.subtype(&t, ty) {
                    Ok(((**recv).clone(), Rule::Assert))
                } else {
                    Err(assert_failure(t, ty))
                }
            }
            ExprKind::BinOp { op, lhs, rhs } => match (&lhs.kind, &rhs.kind) {
                (ExprKind::Int(a), ExprKind::Int(b)) => Ok((Expr::literal(op.eval(*a, *b)).at(e.span), Rule::Binop)),
                _ => Err(Halt::Stuck(format!("{op} applied to non-integers"))),
            },
            ExprKind::If { cond, then, els } => {
                let taken = match cond {
                    Cond::Neq(l, r) => l != r,
                    Cond::Bool(c) => match c.kind {
                        ExprKind::Bool(b) => b,
                        _ => return Err(Halt::Stuck(format!("non-boolean condition {c}"))),
                    },
                };
                Ok(((if taken { then } else { els }).as_ref().clone(), Rule::If))
            }
            ExprKind::Seq(_, rest) => Ok(((**rest).clone(), Rule::Seq)),
            ExprKind::Panic => Err(Halt::Panic("explicit panic".to_string())),
            ExprKind::Var(x) => Err(Halt::Stuck(format!("free variable {x}"))),
            ExprKind::Lit { .. } | ExprKind::Int(_) | ExprKind::Bool(_) => {
                Err(Halt::Stuck("values do not reduce".to_string()))
            }
        }
    }

    /// Performs one step in place. `Ok(None)` means `e` is a value.
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
