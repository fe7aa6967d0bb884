//! Generated identifiers for the dictionary-passing translation.
//!
//! Every generated type name is registered so that the co-simulation can
//! recognise dictionary structs and method pointers by name, and so that a
//! source program whose identifiers clash with generated ones is rejected
//! before any output is produced.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::ast::fgg::{Decl, Program};
use crate::ast::{name, Name, BOOL, INT};

pub const ANY: &str = "Any";
pub const TYPE_MDATA: &str = "_type_mdata";
pub const TYPE_FIELD: &str = "_type";
pub const TRY_CAST: &str = "tryCast";
pub const APPLY: &str = "Apply";
pub const REC: &str = "rec";

pub fn dict_name(t: &str) -> Name {
    name(&format!("{t}Dict"))
}

pub fn meta_name(t: &str) -> Name {
    match t {
        INT => name("Int_meta"),
        BOOL => name("Bool_meta"),
        _ => name(&format!("{t}_meta")),
    }
}

pub fn spec_name(m: &str) -> Name {
    name(&format!("spec_{m}"))
}

pub fn method_ptr(t: &str, m: &str) -> Name {
    name(&format!("{t}_{m}"))
}

pub fn func(n: usize) -> Name {
    name(&format!("Func_{n}"))
}

/// The signature type-rep with `entries` fields (arity + 1).
pub fn sig_meta(entries: usize) -> Name {
    name(&format!("spec_metadata_{entries}"))
}

pub fn param_index(i: usize) -> Name {
    name(&format!("param_index_{i}"))
}

pub fn dict_var(i: usize) -> Name {
    name(&format!("dict_{i}"))
}

pub fn type_field(i: usize) -> Name {
    name(&format!("_type_{i}"))
}

fn numbered(x: &str, prefix: &str) -> bool {
    x.strip_prefix(prefix).is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

pub fn is_dict_var(x: &str) -> bool {
    numbered(x, "dict_")
}

pub fn is_type_field(x: &str) -> bool {
    x == TYPE_FIELD || numbered(x, "_type_")
}

/// The arities (type plus value parameters) of all method signatures, and
/// the largest method formal.
pub(crate) fn arities(p: &Program) -> (BTreeSet<usize>, usize) {
    let mut arities = BTreeSet::new();
    let mut max_formal = 0;
    let sigs = p.decls.iter().flat_map(|d| match d {
        Decl::Interface(i) => i.specs.iter().map(|s| &s.sig).collect(),
        Decl::Method(m) => vec![&m.sig],
        Decl::Struct(_) => vec![],
    });
    for sig in sigs {
        arities.insert(sig.formal.len() + sig.params.len());
        max_formal = max_formal.max(sig.formal.len());
    }
    (arities, max_formal)
}

fn reserved_var(x: &str) -> bool {
    x == REC || is_dict_var(x)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct Collision(pub String);

/// What each generated type name stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generated {
    Prelude,
    Dictionary,
    Metadata,
    MethodPointer,
}

#[derive(Clone, Debug, Default)]
pub struct NameMangler {
    generated: BTreeMap<Name, Generated>,
}

impl NameMangler {
    /// Registers every name the translation of `p` will emit and checks that
    /// none of them clashes with a source identifier or with each other.
    pub fn for_program(p: &Program, metadata: bool) -> Result<Self, Collision> {
        let source: BTreeSet<Name> = p
            .decls
            .iter()
            .filter_map(|d| match d {
                Decl::Struct(s) => Some(s.name.clone()),
                Decl::Interface(i) => Some(i.name.clone()),
                Decl::Method(_) => None,
            })
            .collect();
        let mut ng = NameMangler::default();
        let mut add = |n: Name, kind: Generated| -> Result<(), Collision> {
            if source.contains(&n) {
                return Err(Collision(format!("type {n} collides with a name generated by the translation")));
            }
            if ng.generated.insert(n.clone(), kind).is_some() {
                return Err(Collision(format!("generated name {n} is produced twice")));
            }
            Ok(())
        };

        if let Some(any) = p.decls.iter().find_map(|d| match d {
            Decl::Interface(i) if i.name.as_ref() == ANY => Some(i),
            _ => None,
        }) {
            if !(any.formal.is_empty() && any.specs.is_empty()) {
                return Err(Collision("Any must be the empty, non-generic interface".into()));
            }
        }
        let (arities, max_formal) = arities(p);

        if !source.contains(ANY) {
            add(name(ANY), Generated::Prelude)?;
        }
        for &n in &arities {
            add(func(n), Generated::Prelude)?;
        }
        if metadata {
            add(name(TYPE_MDATA), Generated::Prelude)?;
            for &n in &arities {
                add(sig_meta(n + 1), Generated::Prelude)?;
            }
            for i in 0..max_formal {
                add(param_index(i), Generated::Prelude)?;
            }
            add(meta_name(INT), Generated::Metadata)?;
            add(meta_name(BOOL), Generated::Metadata)?;
        }
        for d in &p.decls {
            match d {
                Decl::Interface(i) => {
                    add(dict_name(&i.name), Generated::Dictionary)?;
                    if metadata {
                        add(meta_name(&i.name), Generated::Metadata)?;
                    }
                    let mut seen = HashSet::new();
                    for s in &i.specs {
                        if let Some(x) = s.sig.params.iter().map(|p| &p.name).find(|x| reserved_var(x)) {
                            return Err(Collision(format!(
                                "parameter {x} of {}.{} is reserved by the translation",
                                i.name, s.name
                            )));
                        }
                        if seen.insert(&s.name) {
                            add(method_ptr(&i.name, &s.name), Generated::MethodPointer)?;
                        }
                    }
                }
                Decl::Struct(s) => {
                    if metadata {
                        add(meta_name(&s.name), Generated::Metadata)?;
                    }
                    if let Some(f) = s.fields.iter().find(|f| is_dict_var(&f.name)) {
                        return Err(Collision(format!("field {} of {} is reserved for dictionaries", f.name, s.name)));
                    }
                }
                Decl::Method(m) => {
                    add(method_ptr(&m.recv_type, &m.name), Generated::MethodPointer)?;
                    let vars = std::iter::once(&m.recv).chain(m.sig.params.iter().map(|p| &p.name));
                    for x in vars {
                        if reserved_var(x) {
                            return Err(Collision(format!(
                                "variable {x} in {}.{} is reserved by the translation",
                                m.recv_type, m.name
                            )));
                        }
                    }
                }
            }
        }

        // Generated method names: spec_m next to m, and the `_type` field.
        let mut methods: BTreeMap<&Name, BTreeSet<&Name>> = BTreeMap::new();
        for d in &p.decls {
            match d {
                Decl::Interface(i) => methods.entry(&i.name).or_default().extend(i.specs.iter().map(|s| &s.name)),
                Decl::Method(m) => {
                    methods.entry(&m.recv_type).or_default().insert(&m.name);
                }
                Decl::Struct(_) => {}
            }
        }
        for (t, ms) in &methods {
            for m in ms {
                if m.as_ref() == TYPE_FIELD {
                    return Err(Collision(format!("method {t}.{m} is reserved")));
                }
                if metadata && ms.iter().any(|other| spec_name(other).as_ref() == m.as_ref()) {
                    return Err(Collision(format!("method {t}.{m} collides with a generated type-rep method")));
                }
            }
        }
        Ok(ng)
    }

    pub fn is_dictionary(&self, t: &str) -> bool {
        self.generated.get(t) == Some(&Generated::Dictionary)
    }

    pub fn is_method_ptr(&self, t: &str) -> bool {
        self.generated.get(t) == Some(&Generated::MethodPointer)
    }

    pub fn is_metadata(&self, t: &str) -> bool {
        self.generated.get(t) == Some(&Generated::Metadata)
    }

    pub fn is_generated(&self, t: &str) -> bool {
        self.generated.contains_key(t)
    }

    pub fn generated(&self) -> impl Iterator<Item = (&Name, Generated)> {
        self.generated.iter().map(|(n, g)| (n, *g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_fgg;

    fn check(decls: &str) -> Result<NameMangler, Collision> {
        let p = parse_fgg(&format!("package main\n{decls}\nfunc main() {{ _ = 1 }}")).unwrap();
        NameMangler::for_program(&p, true)
    }

    #[test]
    fn mangling_scheme() {
        assert_eq!(&*dict_name("Ord"), "OrdDict");
        assert_eq!(&*meta_name("Foo"), "Foo_meta");
        assert_eq!(&*meta_name("int"), "Int_meta");
        assert_eq!(&*meta_name("bool"), "Bool_meta");
        assert_eq!(&*spec_name("do"), "spec_do");
        assert_eq!(&*method_ptr("Int", "Add"), "Int_Add");
        assert_eq!(&*sig_meta(4), "spec_metadata_4");
        assert_eq!(&*param_index(0), "param_index_0");
    }

    #[test]
    fn registers_generated_kinds() {
        let ng = check(
            "type Any interface {}\ntype Ord[T Ord[T]] interface { Gt(that T) bool }\n\
             func (this int) Gt(that int) bool { return that < this }",
        )
        .unwrap();
        assert!(ng.is_dictionary("OrdDict"));
        assert!(ng.is_dictionary("AnyDict"));
        assert!(ng.is_method_ptr("int_Gt"));
        assert!(ng.is_method_ptr("Ord_Gt"));
        assert!(ng.is_metadata("Ord_meta"));
        assert!(!ng.is_generated("Any"));
        assert!(ng.is_generated("Func_1"));
        assert!(ng.is_generated("spec_metadata_2"));
    }

    #[test]
    fn source_names_that_clash_are_rejected() {
        assert!(check("type Any interface {}\ntype AnyDict struct {}").is_err());
        assert!(check("type Nil struct {}\ntype Nil_meta struct {}").is_err());
        assert!(check("type A struct { dict_0 int }").is_err());
        assert!(check("type A struct {}\nfunc (rec A) m() A { return rec }").is_err());
        assert!(check("type A struct {}\nfunc (x A) m(dict_1 int) A { return x }").is_err());
        assert!(check("type A struct {}\nfunc (x A) m() A { return x }\nfunc (x A) spec_m() A { return x }").is_err());
        assert!(check("type Any interface { m() int }").is_err());
        // Method pointers of distinct pairs that mangle to the same name.
        assert!(check(
            "type A_b struct {}\ntype A struct {}\n\
             func (x A_b) c() int { return 1 }\nfunc (x A) b_c() int { return 1 }"
        )
        .is_err());
    }

    #[test]
    fn dict_like_names_that_are_not_reserved_pass() {
        assert!(check("type A struct { dict int; dict_x int }").is_ok());
        assert!(check("type A struct {}\nfunc (this A) spec_m() A { return this }").is_ok());
    }
}
