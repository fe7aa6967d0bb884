//! Co-simulation of an FGG program with its dictionary-passing translation.
//!
//! Target redexes fall into four classes. Erasure assertions and type-rep
//! simulation code are recognised by the origin tag the translator put on
//! the node; dictionary redexes by their shape. A macro step runs all
//! leading erasure assertions, one step, then all simulation steps, and
//! should correspond to exactly one source step once both sides are put in
//! dictionary normal form.

use serde::Serialize;

use crate::ast::fg::{Expr, ExprKind, Origin, Program};
use crate::ast::fgg;
use crate::dict::names::{is_dict_var, is_type_field, NameMangler, APPLY, REC};
use crate::dict::{DictTranslator, Options, TranslateError};
use crate::reduce::{fg as fgr, fgg as fggr, Halt, Redex, Rule, Step};
use crate::typecheck::fg::{Env, Ty};

/// Contractions allowed when normalizing one term.
pub const NORMALIZE_BOUND: usize = 10_000;

/// Target steps allowed to catch up with one source step.
const CATCH_UP_BOUND: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RedexClass {
    Erase,
    Sim,
    Dict,
    Ordinary,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("dictionary resolution did not finish within {0} steps")]
pub struct NormalizeOverflow(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroStep {
    pub next: Expr,
    pub erase: usize,
    pub rule: Rule,
    pub sim: usize,
}

/// Redex classification, macro steps and dictionary resolution over one
/// translated program.
pub struct Resolver<'t> {
    pub machine: fgr::Machine<'t>,
    names: &'t NameMangler,
    bound: usize,
    /// Typecheck after every resolution step (slow; for tests).
    pub check_steps: bool,
}

impl<'t> Resolver<'t> {
    pub fn new(p: &'t Program, names: &'t NameMangler) -> Self {
        Resolver { machine: fgr::Machine::new(p), names, bound: NORMALIZE_BOUND, check_steps: false }
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    pub fn classify(&self, redex: &Expr) -> RedexClass {
        match redex.origin {
            Origin::Erase if matches!(redex.kind, ExprKind::Assert { .. }) => RedexClass::Erase,
            Origin::Sim => RedexClass::Sim,
            _ if self.pattern(redex).is_some() => RedexClass::Dict,
            _ => RedexClass::Ordinary,
        }
    }

    /// Class of the redex in evaluation position, if `e` is not a value.
    pub fn next_class(&self, e: &Expr) -> Option<RedexClass> {
        match fgr::Machine::redex(e) {
            Redex::Value => None,
            Redex::At(path) => Some(self.classify(e.at_path(&path))),
        }
    }

    /// Erasure steps, one step, then simulation steps. `Ok(None)` if `e` is
    /// already a value.
    pub fn macro_step(&self, e: &Expr) -> Result<Option<MacroStep>, Halt> {
        let mut cur = e.clone();
        let mut erase = 0;
        while self.next_class(&cur) == Some(RedexClass::Erase) {
            self.machine.step_in_place(&mut cur)?;
            erase += 1;
        }
        let Some(rule) = self.machine.step_in_place(&mut cur)? else {
            return if erase == 0 { Ok(None) } else { Err(Halt::Stuck("erasure assertions ended in a value".into())) };
        };
        let mut sim = 0;
        while self.next_class(&cur) == Some(RedexClass::Sim) {
            self.machine.step_in_place(&mut cur)?;
            sim += 1;
        }
        Ok(Some(MacroStep { next: cur, erase, rule, sim }))
    }

    /// Contraction of a dictionary pattern rooted at `e`.
    fn pattern(&self, e: &Expr) -> Option<Expr> {
        match &e.kind {
            ExprKind::Select { recv, field } => {
                let ExprKind::Lit { ty, args } = &recv.kind else { return None };
                let generated = is_dict_var(field)
                    || self.names.is_dictionary(ty)
                    || (is_type_field(field) && self.names.is_generated(ty));
                if !generated || !recv.is_value() {
                    return None;
                }
                let i = self.machine.ck.table.fields(ty)?.iter().position(|f| f.name == *field)?;
                args.get(i).cloned()
            }
            ExprKind::Call { recv, method, args } if method.as_ref() == APPLY => {
                let ExprKind::Lit { ty, args: none } = &recv.kind else { return None };
                if !none.is_empty() || !self.names.is_method_ptr(ty) {
                    return None;
                }
                let m = self.machine.ck.table.method(ty, APPLY)?;
                if m.params.len() != args.len() || m.params.first()?.name.as_ref() != REC {
                    return None;
                }
                // Each parameter occurs once, in order, so substituting
                // unevaluated arguments keeps the evaluation order.
                let map: Vec<_> = m.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect();
                let mut body = m.body.clone();
                body.subst(&map);
                Some(body)
            }
            ExprKind::Assert { recv, ty } if self.names.is_dictionary(ty) => {
                (recv.is_value() && recv.value_type().as_ref() == Some(ty)).then(|| (**recv).clone())
            }
            _ => None,
        }
    }

    /// `e.(t)` becomes `e.(u)` when `e` has static type `u <: t`, `u != t`.
    fn refine(&self, e: &Expr) -> Option<Expr> {
        let ExprKind::Assert { recv, ty } = &e.kind else { return None };
        let ck = &self.machine.ck;
        let Ok(Ty::Named(u)) = ck.type_of(&Env::new(), recv) else { return None };
        if u == *ty || !ck.subtype(&u, ty) {
            return None;
        }
        Some(Expr { kind: ExprKind::Assert { recv: recv.clone(), ty: u }, span: e.span, origin: e.origin })
    }

    /// An erasure assertion on a value that cannot fail is dropped, as a
    /// macro step would when it reaches it. Without this, a macro step that
    /// passes such an assertion on its way to the redex could never resolve
    /// to the translation of the next source term, which still contains it.
    fn settle(&self, e: &Expr) -> Option<Expr> {
        let ExprKind::Assert { recv, ty } = &e.kind else { return None };
        if e.origin != Origin::Erase || !recv.is_value() {
            return None;
        }
        let t = recv.value_type()?;
        self.machine.ck.subtype(&t, ty).then(|| (**recv).clone())
    }

    /// One resolution step rooted at `e`.
    pub fn contract(&self, e: &Expr) -> Option<Expr> {
        self.pattern(e).or_else(|| self.settle(e)).or_else(|| self.refine(e))
    }

    /// Every position where a resolution step applies.
    pub fn dict_redexes(&self, e: &Expr) -> Vec<Vec<usize>> {
        fn walk(r: &Resolver<'_>, e: &Expr, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if r.contract(e).is_some() {
                out.push(path.clone());
            }
            for (i, c) in e.children().into_iter().enumerate() {
                path.push(i);
                walk(r, c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, e, &mut Vec::new(), &mut out);
        out
    }

    pub fn dict_step_at(&self, e: &Expr, path: &[usize]) -> Option<Expr> {
        let next = self.contract(e.at_path(path))?;
        let mut out = e.clone();
        *out.at_path_mut(path) = next;
        Some(out)
    }

    /// The dictionary normal form and the number of steps taken to reach it.
    pub fn normalize(&self, e: &Expr) -> Result<(Expr, usize), NormalizeOverflow> {
        let mut out = e.clone();
        let mut steps = 0;
        self.norm(&mut out, &mut steps)?;
        Ok((out, steps))
    }

    // Children first; a normal subterm stays normal in any context, so after
    // contracting the root only the new term's children need another pass.
    fn norm(&self, e: &mut Expr, steps: &mut usize) -> Result<(), NormalizeOverflow> {
        for i in 0..e.children().len() {
            self.norm(e.child_mut(i), steps)?;
        }
        while let Some(next) = self.contract(e) {
            *steps += 1;
            if *steps > self.bound {
                return Err(NormalizeOverflow(self.bound));
            }
            if self.check_steps {
                self.check_resolution_step(e, &next);
            }
            *e = next;
            for i in 0..e.children().len() {
                self.norm(e.child_mut(i), steps)?;
            }
        }
        Ok(())
    }

    /// Panics unless `after` keeps a subtype of the type of `before` and
    /// contains no `panic` that `before` lacked.
    pub fn check_resolution_step(&self, before: &Expr, after: &Expr) {
        let ck = &self.machine.ck;
        if let Ok(t) = ck.type_of(&Env::new(), before) {
            let u = ck
                .type_of(&Env::new(), after)
                .unwrap_or_else(|err| panic!("resolution broke typing of {before}: {err}"));
            assert!(ck.ty_subtype(&u, &t), "resolution changed {t} to {u} in {before}");
        }
        fn panics(e: &Expr) -> bool {
            matches!(e.kind, ExprKind::Panic) || e.children().into_iter().any(panics)
        }
        assert!(panics(before) || !panics(after), "resolution introduced a panic in {before}");
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MacroTrace {
    pub erase: usize,
    pub rule: Rule,
    pub sim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub fgg_step_index: usize,
    pub fgg_rule: Rule,
    pub macro_step: Option<MacroTrace>,
    pub dict_normalization_steps: usize,
    pub matched: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalKind {
    Value,
    Panic,
    Budget,
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Terminal {
    pub kind: TerminalKind,
    pub both_sides_agree: bool,
}

/// The first step at which the two sides disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub reason: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub steps: Vec<StepRecord>,
    pub terminal: Terminal,
    pub mismatch: Option<Mismatch>,
}

impl CorrespondenceReport {
    pub fn certified(&self) -> bool {
        self.steps.iter().all(|s| s.matched) && self.terminal.both_sides_agree
    }
}

/// Runs `p` for up to `max_steps` source steps alongside its translation.
///
/// Each source step `e -> e'` is checked twice: a macro step from the
/// translation of `e` must resolve to the translation of `e'`, and the
/// running target program must reach a term that resolves to it too.
pub fn check_correspondence(p: &fgg::Program, max_steps: usize) -> Result<CorrespondenceReport, TranslateError> {
    let tr = DictTranslator::new(p, Options::default())?;
    let target = tr.program()?;
    let res = Resolver::new(&target.program, &target.names);
    let src = fggr::Machine::new(p);
    Ok(Lockstep { tr: &tr, res: &res, src: &src, steps: Vec::new(), mismatch: None }.run(
        &p.main,
        &target.program.main,
        max_steps,
    ))
}

struct Lockstep<'a, 't> {
    tr: &'a DictTranslator<'a>,
    res: &'a Resolver<'t>,
    src: &'a fggr::Machine<'a>,
    steps: Vec<StepRecord>,
    mismatch: Option<Mismatch>,
}

impl Lockstep<'_, '_> {
    fn fail(&mut self, index: usize, reason: impl Into<String>, expected: &Expr, actual: &Expr) {
        if self.mismatch.is_none() {
            self.mismatch = Some(Mismatch {
                index,
                reason: reason.into(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    fn finish(self, kind: TerminalKind, both_sides_agree: bool) -> CorrespondenceReport {
        CorrespondenceReport {
            steps: self.steps,
            terminal: Terminal { kind, both_sides_agree },
            mismatch: self.mismatch,
        }
    }

    fn run(mut self, main: &fgg::Expr, target_main: &Expr, max_steps: usize) -> CorrespondenceReport {
        let mut e = main.clone();
        let mut live = target_main.clone();
        for i in 0..max_steps {
            let Ok(fresh) = self.tr.closed(&e) else {
                return self.finish(TerminalKind::Stuck, false);
            };
            match self.src.step(&e) {
                Step::Value => {
                    let v = fgg::Value::from_expr(&e).expect("value");
                    let want = self.tr.value(&v);
                    let got = self.res.machine.run(&live, max_steps.saturating_mul(CATCH_UP_BOUND));
                    let agree = got.outcome.value() == Some(&want);
                    if !agree {
                        self.fail(i, "values differ", &want.to_expr(), &live);
                    }
                    return self.finish(TerminalKind::Value, agree);
                }
                Step::Halted(Halt::Panic(_)) => {
                    let macro_panics = matches!(self.res.macro_step(&fresh), Err(Halt::Panic(_)));
                    let live_panics = self.res.machine.run(&live, CATCH_UP_BOUND).outcome.is_panic();
                    if !(macro_panics && live_panics) {
                        self.fail(i, "source panics but target does not", &fresh, &live);
                    }
                    return self.finish(TerminalKind::Panic, macro_panics && live_panics);
                }
                Step::Halted(Halt::Stuck(_)) => return self.finish(TerminalKind::Stuck, false),
                Step::Stepped { next, rule } => {
                    let record = self.step(i, rule, &fresh, &next, &mut live);
                    self.steps.push(record);
                    e = next;
                }
            }
        }
        let target_running = !live.is_value();
        let agree = target_running && self.steps.iter().all(|s| s.matched);
        self.finish(TerminalKind::Budget, agree)
    }

    fn step(&mut self, i: usize, fgg_rule: Rule, fresh: &Expr, next: &fgg::Expr, live: &mut Expr) -> StepRecord {
        let mut record =
            StepRecord { fgg_step_index: i, fgg_rule, macro_step: None, dict_normalization_steps: 0, matched: false };
        let Ok(translated_next) = self.tr.closed(next) else {
            return record;
        };
        let Ok((want, _)) = self.res.normalize(&translated_next) else {
            self.fail(i, "resolution overflow", &translated_next, &translated_next);
            return record;
        };

        let by_macro = match self.res.macro_step(fresh) {
            Ok(Some(m)) => {
                record.macro_step = Some(MacroTrace { erase: m.erase, rule: m.rule, sim: m.sim });
                match self.res.normalize(&m.next) {
                    Ok((got, n)) => {
                        record.dict_normalization_steps = n;
                        if got != want {
                            self.fail(i, "macro step does not resolve to the next source term", &want, &got);
                        }
                        got == want
                    }
                    Err(_) => {
                        self.fail(i, "resolution overflow", &want, &m.next);
                        false
                    }
                }
            }
            _ => {
                self.fail(i, "macro step did not produce a term", &want, fresh);
                false
            }
        };

        let caught_up = self.catch_up(live, &want);
        if !caught_up {
            self.fail(i, "running target did not reach the next source term", &want, live);
        }
        record.matched = by_macro && caught_up;
        record
    }

    /// Steps the running target until it resolves to `want`. Dictionary
    /// steps cannot change the normal form, so the comparison is skipped
    /// after them.
    fn catch_up(&self, live: &mut Expr, want: &Expr) -> bool {
        for _ in 0..CATCH_UP_BOUND {
            let class = self.res.next_class(live);
            if self.res.machine.step_in_place(live).is_err() {
                return false;
            }
            if class == Some(RedexClass::Dict) {
                continue;
            }
            match self.res.normalize(live) {
                Ok((got, _)) if got == *want => return true,
                Ok(_) => {}
                Err(_) => return false,
            }
        }
        false
    }
}
