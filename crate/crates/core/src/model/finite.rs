//! Finite first-order structures and their text format.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::ir::Signature;

/// Per-sort domain sizes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CardinalityVector(pub IndexMap<String, usize>);

impl CardinalityVector {
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn get(&self, sort: &str) -> Option<usize> {
        self.0.get(sort).copied()
    }
}

impl fmt::Display for CardinalityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, k)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}:{k}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no domain for sort `{0}`")]
    MissingSort(String),
    #[error("model has no table for function `{0}`")]
    MissingFunction(String),
    #[error("model has no table for predicate `{0}`")]
    MissingPredicate(String),
    #[error("table of `{name}` does not match its declaration: {message}")]
    BadTable { name: String, message: String },
    #[error("variable `{0}` is not quantified by its clause")]
    UnboundVariable(String),
    #[error("clause {0} still contains constraints or selectors")]
    NotConstraintFree(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub args: Vec<String>,
    pub result: String,
    /// Row-major over the argument domains, first argument most significant.
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateTable {
    pub args: Vec<String>,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// Domains are `{0..k-1}` per sort; every constructor and Skolem function has
/// a total table and every predicate a set of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteModel {
    pub domains: IndexMap<String, usize>,
    pub functions: IndexMap<String, FunctionTable>,
    pub predicates: IndexMap<String, PredicateTable>,
}

/// All tuples over the given domain sizes in lexicographic order.
pub fn tuples_over(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if sizes.contains(&0) {
        return out;
    }
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

impl FiniteModel {
    pub fn cardinality(&self) -> CardinalityVector {
        CardinalityVector(self.domains.clone())
    }

    pub fn total_size(&self) -> usize {
        self.domains.values().sum()
    }

    pub fn size_of(&self, sort: &str) -> usize {
        self.domains.get(sort).copied().unwrap_or(0)
    }

    pub fn sizes(&self, sorts: &[String]) -> Vec<usize> {
        sorts.iter().map(|s| self.size_of(s)).collect()
    }

    /// Index of `tuple` in the row-major layout over `sorts`.
    pub fn tuple_index(&self, sorts: &[String], tuple: &[usize]) -> usize {
        sorts
            .iter()
            .zip(tuple)
            .fold(0, |acc, (s, &v)| acc * self.size_of(s) + v)
    }

    pub fn apply(&self, function: &str, args: &[usize]) -> Option<usize> {
        let table = self.functions.get(function)?;
        if args.len() != table.args.len()
            || args.iter().zip(&table.args).any(|(&v, s)| v >= self.size_of(s))
        {
            return None;
        }
        table.values.get(self.tuple_index(&table.args, args)).copied()
    }

    pub fn holds(&self, predicate: &str, args: &[usize]) -> bool {
        self.predicates
            .get(predicate)
            .is_some_and(|t| t.tuples.contains(args))
    }

    /// Checks that the model interprets every symbol of `sig` with tables of
    /// the right shape.
    pub fn check_against(&self, sig: &Signature) -> Result<(), ModelError> {
        for sort in sig.sorts() {
            match self.domains.get(sort) {
                Some(&k) if k > 0 => {}
                Some(_) => {
                    return Err(ModelError::BadTable {
                        name: sort.to_string(),
                        message: "empty domain".into(),
                    })
                }
                None => return Err(ModelError::MissingSort(sort.to_string())),
            }
        }
        for (name, decl) in sig.functions() {
            let table = self
                .functions
                .get(name)
                .ok_or_else(|| ModelError::MissingFunction(name.to_string()))?;
            let bad = |message: &str| ModelError::BadTable {
                name: name.to_string(),
                message: message.to_string(),
            };
            if table.args != decl.args || table.result != decl.result {
                return Err(bad("sorts differ from the signature"));
            }
            let rows: usize = self.sizes(&table.args).iter().product();
            if table.values.len() != rows {
                return Err(bad("table is not total"));
            }
            let range = self.size_of(&table.result);
            if table.values.iter().any(|&v| v >= range) {
                return Err(bad("value outside the result domain"));
            }
        }
        for (name, decl) in sig.predicates() {
            let table = self
                .predicates
                .get(name)
                .ok_or_else(|| ModelError::MissingPredicate(name.to_string()))?;
            if table.args != decl.args {
                return Err(ModelError::BadTable {
                    name: name.to_string(),
                    message: "sorts differ from the signature".into(),
                });
            }
            let sizes = self.sizes(&table.args);
            let in_range = |t: &Vec<usize>| {
                t.len() == sizes.len() && t.iter().zip(&sizes).all(|(&v, &k)| v < k)
            };
            if !table.tuples.iter().all(in_range) {
                return Err(ModelError::BadTable {
                    name: name.to_string(),
                    message: "tuple outside the domains".into(),
                });
            }
        }
        Ok(())
    }

    /// Parses the text format printed by `Display`. Argument sorts come from
    /// `sig`.
    pub fn parse(text: &str, sig: &Signature) -> Result<FiniteModel, ModelParseError> {
        parse_model(text, sig)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, t: &[usize]) -> fmt::Result {
    write!(f, "(")?;
    for (i, v) in t.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ")")
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sort, &k) in &self.domains {
            let elems: Vec<String> = (0..k).map(|i| i.to_string()).collect();
            writeln!(f, "sort {sort} = {{{}}}", elems.join(","))?;
        }
        for (name, table) in &self.functions {
            write!(f, "fun {name}: ")?;
            let rows = tuples_over(&self.sizes(&table.args));
            for (i, (row, v)) in rows.iter().zip(&table.values).enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                match row.len() {
                    0 => {}
                    1 => write!(f, "{}", row[0])?,
                    _ => write_tuple(f, row)?,
                }
                write!(f, "->{v}")?;
            }
            writeln!(f)?;
        }
        for (name, table) in &self.predicates {
            write!(f, "pred {name} = {{")?;
            for (i, t) in table.tuples.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write_tuple(f, t)?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            line,
            text,
        }
    }

    fn err(&self, message: impl Into<String>) -> ModelParseError {
        ModelParseError {
            line: self.line,
            message: format!("{} in `{}`", message.into(), self.text.trim()),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ModelParseError> {
        for c in s.chars() {
            if !self.eat(c) {
                return Err(self.err(format!("expected `{s}`")));
            }
        }
        Ok(())
    }

    fn number(&mut self) -> Result<usize, ModelParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("number out of range"))
    }

    /// `(a,b,...)`, possibly empty.
    fn tuple(&mut self) -> Result<Vec<usize>, ModelParseError> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }
}

fn parse_model(text: &str, sig: &Signature) -> Result<FiniteModel, ModelParseError> {
    let mut model = FiniteModel::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ModelParseError {
            line: line_no,
            message,
        };
        let (keyword, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(format!("malformed line `{line}`")))?;
        let rest = rest.trim_start();
        match keyword {
            "sort" => {
                let (name, elems) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `sort NAME = {...}`".into()))?;
                let name = name.trim();
                if !sig.has_sort(name) {
                    return Err(err(format!("unknown sort `{name}`")));
                }
                let mut cur = Cursor::new(elems, line_no);
                cur.expect("{")?;
                let mut k = 0;
                if !cur.eat('}') {
                    loop {
                        let v = cur.number()?;
                        if v != k {
                            return Err(cur.err(format!("expected element {k}")));
                        }
                        k += 1;
                        if cur.eat('}') {
                            break;
                        }
                        cur.expect(",")?;
                    }
                }
                if !cur.at_end() {
                    return Err(cur.err("trailing input"));
                }
                if model.domains.insert(name.to_string(), k).is_some() {
                    return Err(err(format!("sort `{name}` given twice")));
                }
            }
            "fun" => {
                let (name, entries) = rest
                    .split_once(':')
                    .ok_or_else(|| err("expected `fun NAME: ...`".into()))?;
                let name = name.trim();
                let decl = sig
                    .function(name)
                    .ok_or_else(|| err(format!("unknown function `{name}`")))?;
                let sizes = decl
                    .args
                    .iter()
                    .map(|s| {
                        model
                            .domains
                            .get(s)
                            .copied()
                            .ok_or_else(|| err(format!("sort `{s}` must be declared before `{name}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut values: Vec<Option<usize>> = vec![None; sizes.iter().product()];
                let mut cur = Cursor::new(entries, line_no);
                while !cur.at_end() {
                    let row = match sizes.len() {
                        0 => Vec::new(),
                        1 if cur.peek() != Some('(') => vec![cur.number()?],
                        _ => cur.tuple()?,
                    };
                    cur.expect("->")?;
                    let v = cur.number()?;
                    if row.len() != sizes.len() || row.iter().zip(&sizes).any(|(&a, &k)| a >= k) {
                        return Err(cur.err("argument tuple outside the domains"));
                    }
                    let idx = row.iter().zip(&sizes).fold(0, |acc, (&a, &k)| acc * k + a);
                    if values[idx].replace(v).is_some() {
                        return Err(cur.err("row given twice"));
                    }
                    if !cur.at_end() {
                        cur.expect(",")?;
                    }
                }
                let values = values
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err(format!("table of `{name}` is not total")))?;
                model.functions.insert(
                    name.to_string(),
                    FunctionTable {
                        args: decl.args.clone(),
                        result: decl.result.clone(),
                        values,
                    },
                );
            }
            "pred" => {
                let (name, body) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `pred NAME = {...}`".into()))?;
                let name = name.trim();
                let decl = sig
                    .predicate(name)
                    .ok_or_else(|| err(format!("unknown predicate `{name}`")))?;
                let mut cur = Cursor::new(body, line_no);
                cur.expect("{")?;
                let mut tuples = BTreeSet::new();
                if !cur.eat('}') {
                    loop {
                        let t = cur.tuple()?;
                        if t.len() != decl.args.len() {
                            return Err(cur.err("tuple has the wrong arity"));
                        }
                        tuples.insert(t);
                        if cur.eat('}') {
                            break;
                        }
                        cur.expect(",")?;
                    }
                }
                if !cur.at_end() {
                    return Err(cur.err("trailing input"));
                }
                model.predicates.insert(
                    name.to_string(),
                    PredicateTable {
                        args: decl.args.clone(),
                        tuples,
                    },
                );
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    model
        .check_against(sig)
        .map_err(|e| ModelParseError {
            line: 0,
            message: e.to_string(),
        })?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nat_signature;

    fn even_sig() -> Signature {
        let mut sig = nat_signature();
        sig.add_predicate("even", vec!["Nat".into()], crate::ir::PredicateOrigin::User)
            .unwrap();
        sig
    }

    #[test]
    fn prints_and_parses_back() {
        let text = "sort Nat = {0,1}\nfun Z: ->0\nfun S: 0->1, 1->0\npred even = {(0)}\n";
        let model = FiniteModel::parse(text, &even_sig()).unwrap();
        assert_eq!(model.apply("S", &[1]), Some(0));
        assert!(model.holds("even", &[0]));
        assert_eq!(model.to_string(), text);
    }

    #[test]
    fn partial_table_is_rejected() {
        let text = "sort Nat = {0,1}\nfun Z: ->0\nfun S: 0->1\npred even = {}\n";
        let err = FiniteModel::parse(text, &even_sig()).unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let text = "# model\nsort Nat = { 0 , 1 }\nfun Z : -> 0\nfun S: 0 -> 0 , 1 -> 0 # const\npred even = { ( 1 ) }";
        let model = FiniteModel::parse(text, &even_sig()).unwrap();
        assert!(model.holds("even", &[1]));
    }

    #[test]
    fn tuples_are_lexicographic() {
        assert_eq!(
            tuples_over(&[2, 2]),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(tuples_over(&[]), vec![Vec::<usize>::new()]);
    }
}
