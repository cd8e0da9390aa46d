//! Many-sorted signatures: ADT sorts, their constructors and selectors,
//! uninterpreted predicates and Skolem functions.

use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("undeclared sort `{sort}` used by `{symbol}`")]
    UndeclaredSort { symbol: String, sort: String },
    #[error("sort `{0}` has no constructors")]
    EmptySort(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
}

/// What kind of function symbol a name denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    /// An ADT constructor; part of the automaton alphabet.
    Constructor,
    /// A Skolem function introduced for an existential variable. Gets a table
    /// in finite models but never appears in Herbrand terms.
    Skolem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub args: Vec<String>,
    pub result: String,
    pub kind: FunctionKind,
    /// Selector names, one per argument (constructors only; may be empty).
    pub selectors: Vec<String>,
}

/// Where a predicate came from. Generated relations are produced by the
/// preprocessing passes and are hidden from user-facing output by default.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredicateOrigin {
    User,
    Diseq { sort: String },
    Selector { selector: String },
    Tester { constructor: String },
}

impl PredicateOrigin {
    pub fn is_generated(&self) -> bool {
        !matches!(self, PredicateOrigin::User)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub args: Vec<String>,
    pub origin: PredicateOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorDecl {
    pub constructor: String,
    pub index: usize,
    pub sort: String,
    pub result: String,
}

/// Sorts, function symbols and predicate symbols, all in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: IndexMap<String, Vec<String>>,
    functions: IndexMap<String, FunctionDecl>,
    predicates: IndexMap<String, PredicateDecl>,
    selectors: IndexMap<String, SelectorDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if self.is_declared(name) {
            Err(SignatureError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    /// Whether `name` is used by any sort, function, predicate or selector.
    pub fn is_declared(&self, name: &str) -> bool {
        self.sorts.contains_key(name)
            || self.functions.contains_key(name)
            || self.predicates.contains_key(name)
            || self.selectors.contains_key(name)
    }

    /// Returns `base` if unused, otherwise `base_1`, `base_2`, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.is_declared(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.is_declared(n))
            .expect("unbounded")
    }

    pub fn add_sort(&mut self, name: &str) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        self.sorts.insert(name.to_string(), Vec::new());
        Ok(())
    }

    /// Adds a constructor. Argument sorts may be declared later (mutually
    /// recursive datatypes); [`Signature::validate`] checks them.
    pub fn add_constructor(
        &mut self,
        name: &str,
        args: Vec<String>,
        result: &str,
    ) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        let ctors = self
            .sorts
            .get_mut(result)
            .ok_or_else(|| SignatureError::UndeclaredSort {
                symbol: name.to_string(),
                sort: result.to_string(),
            })?;
        ctors.push(name.to_string());
        self.functions.insert(
            name.to_string(),
            FunctionDecl {
                args,
                result: result.to_string(),
                kind: FunctionKind::Constructor,
                selectors: Vec::new(),
            },
        );
        Ok(())
    }

    pub fn add_selector(
        &mut self,
        name: &str,
        constructor: &str,
        index: usize,
    ) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        let decl = self
            .functions
            .get_mut(constructor)
            .filter(|d| d.kind == FunctionKind::Constructor)
            .ok_or_else(|| SignatureError::UnknownConstructor(constructor.to_string()))?;
        if decl.selectors.len() <= index {
            decl.selectors.resize(index + 1, String::new());
        }
        decl.selectors[index] = name.to_string();
        let sel = SelectorDecl {
            constructor: constructor.to_string(),
            index,
            sort: decl.result.clone(),
            result: decl.args[index].clone(),
        };
        self.selectors.insert(name.to_string(), sel);
        Ok(())
    }

    pub fn add_skolem(
        &mut self,
        name: &str,
        args: Vec<String>,
        result: &str,
    ) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        for s in args.iter().chain(std::iter::once(&result.to_string())) {
            if !self.sorts.contains_key(s) {
                return Err(SignatureError::UndeclaredSort {
                    symbol: name.to_string(),
                    sort: s.clone(),
                });
            }
        }
        self.functions.insert(
            name.to_string(),
            FunctionDecl {
                args,
                result: result.to_string(),
                kind: FunctionKind::Skolem,
                selectors: Vec::new(),
            },
        );
        Ok(())
    }

    pub fn add_predicate(
        &mut self,
        name: &str,
        args: Vec<String>,
        origin: PredicateOrigin,
    ) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        for s in &args {
            if !self.sorts.contains_key(s) {
                return Err(SignatureError::UndeclaredSort {
                    symbol: name.to_string(),
                    sort: s.clone(),
                });
            }
        }
        self.predicates
            .insert(name.to_string(), PredicateDecl { args, origin });
        Ok(())
    }

    /// Checks the load-time invariants: every referenced sort exists and
    /// every sort is inhabited by at least one constructor.
    pub fn validate(&self) -> Result<(), SignatureError> {
        for (name, f) in &self.functions {
            for s in f.args.iter().chain(std::iter::once(&f.result)) {
                if !self.sorts.contains_key(s) {
                    return Err(SignatureError::UndeclaredSort {
                        symbol: name.clone(),
                        sort: s.clone(),
                    });
                }
            }
        }
        for (sort, ctors) in &self.sorts {
            if ctors.is_empty() {
                return Err(SignatureError::EmptySort(sort.clone()));
            }
        }
        Ok(())
    }

    pub fn sorts(&self) -> impl Iterator<Item = &str> {
        self.sorts.keys().map(String::as_str)
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_index(&self, sort: &str) -> Option<usize> {
        self.sorts.get_index_of(sort)
    }

    pub fn has_sort(&self, sort: &str) -> bool {
        self.sorts.contains_key(sort)
    }

    /// Constructors of `sort` in declaration order.
    pub fn constructors_of(&self, sort: &str) -> &[String] {
        self.sorts.get(sort).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.get(name)
    }

    pub fn constructor(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions
            .get(name)
            .filter(|d| d.kind == FunctionKind::Constructor)
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        self.constructor(name).is_some()
    }

    pub fn is_skolem(&self, name: &str) -> bool {
        self.functions
            .get(name)
            .is_some_and(|d| d.kind == FunctionKind::Skolem)
    }

    /// All function symbols (constructors first by sort, then Skolems) in
    /// declaration order.
    pub fn functions(&self) -> impl Iterator<Item = (&str, &FunctionDecl)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Constructors in declaration order.
    pub fn constructors(&self) -> impl Iterator<Item = (&str, &FunctionDecl)> {
        self.functions()
            .filter(|(_, d)| d.kind == FunctionKind::Constructor)
    }

    pub fn skolems(&self) -> impl Iterator<Item = (&str, &FunctionDecl)> {
        self.functions().filter(|(_, d)| d.kind == FunctionKind::Skolem)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.get(name)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, &PredicateDecl)> {
        self.predicates.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn selector(&self, name: &str) -> Option<&SelectorDecl> {
        self.selectors.get(name)
    }

    pub fn selectors(&self) -> impl Iterator<Item = (&str, &SelectorDecl)> {
        self.selectors.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_across_namespaces() {
        let mut sig = Signature::new();
        sig.add_sort("Nat").unwrap();
        sig.add_constructor("Z", vec![], "Nat").unwrap();
        assert_eq!(
            sig.add_predicate("Z", vec![], PredicateOrigin::User),
            Err(SignatureError::Duplicate("Z".into()))
        );
        assert_eq!(
            sig.add_sort("Nat"),
            Err(SignatureError::Duplicate("Nat".into()))
        );
    }

    #[test]
    fn empty_sort_is_rejected() {
        let mut sig = Signature::new();
        sig.add_sort("Void").unwrap();
        assert_eq!(sig.validate(), Err(SignatureError::EmptySort("Void".into())));
    }

    #[test]
    fn fresh_names_skip_taken_ones() {
        let mut sig = Signature::new();
        sig.add_sort("Nat").unwrap();
        sig.add_constructor("Z", vec![], "Nat").unwrap();
        sig.add_predicate("p", vec![], PredicateOrigin::User).unwrap();
        sig.add_predicate("p_1", vec![], PredicateOrigin::User).unwrap();
        assert_eq!(sig.fresh_name("p"), "p_2");
        assert_eq!(sig.fresh_name("q"), "q");
    }
}
