//! The command-level view of an input script.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::error::{ParseError, ParseErrorKind};
use super::sexpr::{parse_sexprs, SExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub selector: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: String,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatatypeDecl {
    pub name: String,
    pub constructors: Vec<ConstructorDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    DeclareDatatypes(Vec<DatatypeDecl>),
    /// `Bool` result: an uninterpreted predicate; any other result: an
    /// uninterpreted (Skolem-like) function.
    DeclareFun {
        name: String,
        args: Vec<String>,
        result: String,
    },
    DefineFunRec {
        name: String,
        params: Vec<(String, String)>,
        result: String,
        body: SExpr,
    },
    Assert(SExpr),
    CheckSat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub commands: Vec<Command>,
}

impl Script {
    pub fn datatypes(&self) -> impl Iterator<Item = &DatatypeDecl> {
        self.commands.iter().flat_map(|c| match c {
            Command::DeclareDatatypes(ds) => ds.as_slice(),
            _ => &[],
        })
    }

    pub fn assertion_count(&self) -> usize {
        self.commands
            .iter()
            .filter(|c| matches!(c, Command::Assert(_)))
            .count()
    }
}

pub const KEYWORDS: &[&str] = &[
    "and", "or", "not", "=>", "=", "distinct", "ite", "match", "forall", "exists", "true",
    "false", "_",
];

fn err(e: &SExpr, kind: ParseErrorKind) -> ParseError {
    ParseError::new(e.pos(), e.token(), kind)
}

fn malformed(e: &SExpr, what: &str) -> ParseError {
    err(e, ParseErrorKind::Malformed(what.to_string()))
}

fn symbol<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, ParseError> {
    e.as_symbol().ok_or_else(|| malformed(e, what))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.as_list().ok_or_else(|| malformed(e, what))
}

#[derive(Default)]
struct SymbolTable {
    sorts: HashSet<String>,
    /// Arity of every constructor, selector, declared and defined function.
    arities: HashMap<String, usize>,
    constructors: HashSet<String>,
}

impl SymbolTable {
    fn declare(&mut self, name: &str, at: &SExpr, arity: usize) -> Result<(), ParseError> {
        if self.sorts.contains(name) || self.arities.contains_key(name) || KEYWORDS.contains(&name)
        {
            return Err(err(at, ParseErrorKind::DuplicateSymbol(name.to_string())));
        }
        self.arities.insert(name.to_string(), arity);
        Ok(())
    }

    fn require_sort(&self, e: &SExpr) -> Result<String, ParseError> {
        let s = symbol(e, "sort")?;
        if s == "Bool" || self.sorts.contains(s) {
            Ok(s.to_string())
        } else {
            Err(err(e, ParseErrorKind::UnknownSymbol(s.to_string())))
        }
    }

    fn check_arity(&self, name: &str, at: &SExpr, got: usize) -> Result<(), ParseError> {
        if let Some(&expected) = self.arities.get(name) {
            if expected != got {
                return Err(err(
                    at,
                    ParseErrorKind::ArityMismatch {
                        symbol: name.to_string(),
                        expected,
                        got,
                    },
                ));
            }
        }
        Ok(())
    }

    fn tester_target<'a>(&self, name: &'a str) -> Option<&'a str> {
        name.strip_prefix("is-")
            .filter(|c| self.constructors.contains(*c))
    }

    /// Checks that every applied symbol is known and applied at its arity.
    fn check_body(&self, e: &SExpr, bound: &mut Vec<String>) -> Result<(), ParseError> {
        match e {
            SExpr::Numeral(..) => Err(malformed(e, "term: numerals are not supported")),
            SExpr::Symbol(s, _) => {
                if bound.iter().any(|b| b == s) || s == "true" || s == "false" {
                    return Ok(());
                }
                match self.arities.get(s.as_str()) {
                    Some(0) => Ok(()),
                    Some(&n) => Err(err(
                        e,
                        ParseErrorKind::ArityMismatch {
                            symbol: s.clone(),
                            expected: n,
                            got: 0,
                        },
                    )),
                    None => Err(err(e, ParseErrorKind::UnknownSymbol(s.clone()))),
                }
            }
            SExpr::List(items, _) => {
                let Some(first) = items.first() else {
                    return Err(malformed(e, "empty application"));
                };
                let args = &items[1..];
                if let Some(inner) = first.as_list() {
                    // ((_ is c) t)
                    if inner.len() == 3
                        && inner[0].as_symbol() == Some("_")
                        && inner[1].as_symbol() == Some("is")
                    {
                        let c = symbol(&inner[2], "tester")?;
                        if !self.constructors.contains(c) {
                            return Err(err(&inner[2], ParseErrorKind::UnknownSymbol(c.into())));
                        }
                        if args.len() != 1 {
                            return Err(err(
                                e,
                                ParseErrorKind::ArityMismatch {
                                    symbol: format!("(_ is {c})"),
                                    expected: 1,
                                    got: args.len(),
                                },
                            ));
                        }
                        return self.check_body(&args[0], bound);
                    }
                    return Err(malformed(e, "application head"));
                }
                let head = symbol(first, "application head")?;
                match head {
                    "forall" | "exists" => {
                        if args.len() != 2 {
                            return Err(malformed(e, "quantifier"));
                        }
                        let n = bound.len();
                        for b in list(&args[0], "binder list")? {
                            let pair = list(b, "binder")?;
                            if pair.len() != 2 {
                                return Err(malformed(b, "binder"));
                            }
                            let v = symbol(&pair[0], "variable")?;
                            self.require_sort(&pair[1])?;
                            bound.push(v.to_string());
                        }
                        let r = self.check_body(&args[1], bound);
                        bound.truncate(n);
                        r
                    }
                    "match" => {
                        if args.len() != 2 {
                            return Err(malformed(e, "match"));
                        }
                        self.check_body(&args[0], bound)?;
                        for case in list(&args[1], "match cases")? {
                            let case_items = list(case, "match case")?;
                            if case_items.len() != 2 {
                                return Err(malformed(case, "match case"));
                            }
                            let n = bound.len();
                            match &case_items[0] {
                                SExpr::Symbol(p, _) => {
                                    if !self.constructors.contains(p) {
                                        bound.push(p.clone());
                                    } else {
                                        self.check_arity(p, &case_items[0], 0)?;
                                    }
                                }
                                SExpr::List(pat, _) => {
                                    let Some(c) = pat.first().and_then(SExpr::as_symbol) else {
                                        return Err(malformed(&case_items[0], "pattern"));
                                    };
                                    if !self.constructors.contains(c) {
                                        return Err(err(
                                            &pat[0],
                                            ParseErrorKind::UnknownSymbol(c.to_string()),
                                        ));
                                    }
                                    self.check_arity(c, &case_items[0], pat.len() - 1)?;
                                    for v in &pat[1..] {
                                        bound.push(symbol(v, "pattern variable")?.to_string());
                                    }
                                }
                                other => return Err(malformed(other, "pattern")),
                            }
                            let r = self.check_body(&case_items[1], bound);
                            bound.truncate(n);
                            r?;
                        }
                        Ok(())
                    }
                    "not" if args.len() != 1 => Err(malformed(e, "not")),
                    "=>" | "=" | "distinct" if args.len() < 2 => Err(malformed(e, head)),
                    "ite" if args.len() != 3 => Err(malformed(e, "ite")),
                    "and" | "or" | "not" | "=>" | "=" | "distinct" | "ite" => {
                        args.iter().try_for_each(|a| self.check_body(a, bound))
                    }
                    _ => {
                        if bound.iter().any(|b| b == head) {
                            return Err(malformed(first, "application of a variable"));
                        }
                        if self.tester_target(head).is_some() {
                            if args.len() != 1 {
                                return Err(err(
                                    e,
                                    ParseErrorKind::ArityMismatch {
                                        symbol: head.to_string(),
                                        expected: 1,
                                        got: args.len(),
                                    },
                                ));
                            }
                        } else if !self.arities.contains_key(head) {
                            return Err(err(first, ParseErrorKind::UnknownSymbol(head.into())));
                        } else {
                            self.check_arity(head, e, args.len())?;
                        }
                        args.iter().try_for_each(|a| self.check_body(a, bound))
                    }
                }
            }
        }
    }
}

fn parse_constructor<'a>(
    e: &'a SExpr,
    table: &mut SymbolTable,
) -> Result<(ConstructorDecl, Vec<&'a SExpr>), ParseError> {
    match e {
        SExpr::Symbol(name, _) => Ok((
            ConstructorDecl {
                name: name.clone(),
                fields: Vec::new(),
            },
            Vec::new(),
        )),
        SExpr::List(items, _) => {
            let Some(first) = items.first() else {
                return Err(malformed(e, "constructor"));
            };
            let name = symbol(first, "constructor name")?.to_string();
            let mut fields = Vec::new();
            let mut sort_exprs = Vec::new();
            for f in &items[1..] {
                let pair = list(f, "constructor field")?;
                if pair.len() != 2 {
                    return Err(malformed(f, "constructor field"));
                }
                let sel = symbol(&pair[0], "selector")?.to_string();
                let sort = symbol(&pair[1], "field sort")?.to_string();
                table.declare(&sel, &pair[0], 1)?;
                sort_exprs.push(&pair[1]);
                fields.push(Field {
                    selector: sel,
                    sort,
                });
            }
            table.declare(&name, first, fields.len())?;
            table.constructors.insert(name.clone());
            Ok((ConstructorDecl { name, fields }, sort_exprs))
        }
        _ => Err(malformed(e, "constructor")),
    }
}

fn parse_declare_datatypes(
    args: &[SExpr],
    cmd: &SExpr,
    table: &mut SymbolTable,
) -> Result<Command, ParseError> {
    if args.len() != 2 {
        return Err(malformed(cmd, "declare-datatypes"));
    }
    let heads = list(&args[0], "datatype list")?;
    let bodies = list(&args[1], "datatype bodies")?;
    // SMT-LIB 2.6: ((Nat 0) ...) (((Z) (S (p Nat))) ...)
    // legacy TIP:  () ((Nat (Z) (S (p Nat))) ...)
    let mut named: Vec<(&SExpr, &[SExpr])> = Vec::new();
    if heads.is_empty() {
        for b in bodies {
            let items = list(b, "datatype")?;
            if items.is_empty() {
                return Err(malformed(b, "datatype"));
            }
            named.push((&items[0], &items[1..]));
        }
    } else {
        if heads.len() != bodies.len() {
            return Err(malformed(cmd, "declare-datatypes: arity/body count mismatch"));
        }
        for (h, b) in heads.iter().zip(bodies) {
            let pair = list(h, "sort declaration")?;
            if pair.len() != 2 {
                return Err(malformed(h, "sort declaration"));
            }
            if !matches!(pair[1], SExpr::Numeral(0, _)) {
                return Err(malformed(&pair[1], "sort arity: parametric datatypes are not supported"));
            }
            named.push((&pair[0], list(b, "constructor list")?));
        }
    }
    for (name, _) in &named {
        let n = symbol(name, "sort name")?;
        if table.sorts.contains(n) || table.arities.contains_key(n) || n == "Bool" {
            return Err(err(name, ParseErrorKind::DuplicateSymbol(n.to_string())));
        }
        table.sorts.insert(n.to_string());
    }
    let mut decls = Vec::new();
    let mut field_sorts = Vec::new();
    for (name, ctors) in named {
        let mut constructors = Vec::new();
        for c in ctors {
            let (decl, sorts) = parse_constructor(c, table)?;
            field_sorts.extend(sorts);
            constructors.push(decl);
        }
        decls.push(DatatypeDecl {
            name: symbol(name, "sort name")?.to_string(),
            constructors,
        });
    }
    for s in field_sorts {
        let sort = table.require_sort(s)?;
        if sort == "Bool" {
            return Err(malformed(s, "field sort: Bool fields are not supported"));
        }
    }
    Ok(Command::DeclareDatatypes(decls))
}

/// Parses and validates a script: every symbol is declared before use,
/// applied at its arity, declared once, and there is exactly one `check-sat`.
pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let exprs = parse_sexprs(text)?;
    let mut table = SymbolTable::default();
    let mut commands = Vec::new();
    let mut check_sat: Option<&SExpr> = None;
    for e in &exprs {
        let items = list(e, "command")?;
        let Some(head) = items.first() else {
            return Err(malformed(e, "command"));
        };
        let name = symbol(head, "command name")?;
        let args = &items[1..];
        let cmd = match name {
            "declare-datatypes" => parse_declare_datatypes(args, e, &mut table)?,
            "declare-datatype" => {
                if args.len() != 2 {
                    return Err(malformed(e, "declare-datatype"));
                }
                let wrapped = [
                    SExpr::List(
                        vec![SExpr::List(
                            vec![args[0].clone(), SExpr::Numeral(0, args[0].pos())],
                            args[0].pos(),
                        )],
                        e.pos(),
                    ),
                    SExpr::List(vec![args[1].clone()], args[1].pos()),
                ];
                parse_declare_datatypes(&wrapped, e, &mut table)?
            }
            "declare-fun" => {
                if args.len() != 3 {
                    return Err(malformed(e, "declare-fun"));
                }
                let fname = symbol(&args[0], "function name")?;
                let sorts = list(&args[1], "argument sorts")?
                    .iter()
                    .map(|s| table.require_sort(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if sorts.iter().any(|s| s == "Bool") {
                    return Err(malformed(&args[1], "argument sorts: Bool arguments are not supported"));
                }
                let result = table.require_sort(&args[2])?;
                table.declare(fname, &args[0], sorts.len())?;
                Command::DeclareFun {
                    name: fname.to_string(),
                    args: sorts,
                    result,
                }
            }
            "define-fun-rec" => {
                if args.len() != 4 {
                    return Err(malformed(e, "define-fun-rec"));
                }
                let fname = symbol(&args[0], "function name")?;
                let mut params = Vec::new();
                for p in list(&args[1], "parameter list")? {
                    let pair = list(p, "parameter")?;
                    if pair.len() != 2 {
                        return Err(malformed(p, "parameter"));
                    }
                    let v = symbol(&pair[0], "parameter name")?.to_string();
                    let s = table.require_sort(&pair[1])?;
                    params.push((v, s));
                }
                let result = table.require_sort(&args[2])?;
                table.declare(fname, &args[0], params.len())?;
                let mut bound: Vec<String> = params.iter().map(|(v, _)| v.clone()).collect();
                table.check_body(&args[3], &mut bound)?;
                Command::DefineFunRec {
                    name: fname.to_string(),
                    params,
                    result,
                    body: args[3].clone(),
                }
            }
            "assert" => {
                if args.len() != 1 {
                    return Err(malformed(e, "assert"));
                }
                table.check_body(&args[0], &mut Vec::new())?;
                Command::Assert(args[0].clone())
            }
            "check-sat" => {
                if !args.is_empty() {
                    return Err(malformed(e, "check-sat"));
                }
                if check_sat.is_some() {
                    return Err(err(e, ParseErrorKind::MultipleCheckSat));
                }
                check_sat = Some(e);
                Command::CheckSat
            }
            other => return Err(err(head, ParseErrorKind::UnknownCommand(other.to_string()))),
        };
        commands.push(cmd);
    }
    if check_sat.is_none() {
        let pos = exprs.last().map(|e| e.pos()).unwrap_or_default();
        return Err(ParseError::new(pos, String::new(), ParseErrorKind::NoCheckSat));
    }
    Ok(Script { commands })
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::DeclareDatatypes(decls) => {
                write!(f, "(declare-datatypes (")?;
                for (i, d) in decls.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({} 0)", SExpr::sym(d.name.clone()))?;
                }
                write!(f, ") (")?;
                for (i, d) in decls.iter().enumerate() {
                    if i > 0 {
                        write!(f, "\n    ")?;
                    }
                    write!(f, "(")?;
                    for (j, c) in d.constructors.iter().enumerate() {
                        if j > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "({}", SExpr::sym(c.name.clone()))?;
                        for fld in &c.fields {
                            write!(
                                f,
                                " ({} {})",
                                SExpr::sym(fld.selector.clone()),
                                SExpr::sym(fld.sort.clone())
                            )?;
                        }
                        write!(f, ")")?;
                    }
                    write!(f, ")")?;
                }
                write!(f, "))")
            }
            Command::DeclareFun { name, args, result } => {
                write!(f, "(declare-fun {} (", SExpr::sym(name.clone()))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", SExpr::sym(a.clone()))?;
                }
                write!(f, ") {})", SExpr::sym(result.clone()))
            }
            Command::DefineFunRec {
                name,
                params,
                result,
                body,
            } => {
                write!(f, "(define-fun-rec {} (", SExpr::sym(name.clone()))?;
                for (i, (v, s)) in params.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({} {})", SExpr::sym(v.clone()), SExpr::sym(s.clone()))?;
                }
                write!(f, ") {}\n  {body})", SExpr::sym(result.clone()))
            }
            Command::Assert(e) => write!(f, "(assert {e})"),
            Command::CheckSat => write!(f, "(check-sat)"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EVEN: &str = "
        (declare-datatypes ((Nat 0)) (((Z) (S (pred Nat)))))
        (declare-fun even (Nat) Bool)
        (assert (even Z))
        (assert (forall ((x Nat)) (=> (even x) (even (S (S x))))))
        (assert (forall ((x Nat)) (=> (and (even x) (even (S x))) false)))
        (check-sat)";

    #[test]
    fn even_script_shape() {
        let s = parse_script(EVEN).unwrap();
        assert_eq!(s.datatypes().count(), 1);
        assert_eq!(s.assertion_count(), 3);
        let preds = s
            .commands
            .iter()
            .filter(|c| matches!(c, Command::DeclareFun { result, .. } if result == "Bool"))
            .count();
        assert_eq!(preds, 1);
    }

    #[test]
    fn empty_input_has_no_check_sat() {
        assert_eq!(parse_script("").unwrap_err().kind, ParseErrorKind::NoCheckSat);
        assert_eq!(parse_script("; nothing\n").unwrap_err().kind, ParseErrorKind::NoCheckSat);
    }

    #[test]
    fn duplicate_sort() {
        let e = parse_script(
            "(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))
             (declare-datatypes ((Nat 0)) (((Zero))))
             (check-sat)",
        )
        .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateSymbol("Nat".into()));
        assert_eq!(e.pos.line, 2);
    }

    #[test]
    fn arity_and_unknown_symbols() {
        let base = "(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))(declare-fun P (Nat) Bool)";
        let e = parse_script(&format!("{base}(assert (P Z Z))(check-sat)")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 1, got: 2, .. }));
        let e = parse_script(&format!("{base}(assert (Q Z))(check-sat)")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol("Q".into()));
        assert_eq!(e.token, "Q");
        let e = parse_script(&format!("{base}(set-logic HORN)(check-sat)")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownCommand("set-logic".into()));
        let e = parse_script(&format!("{base}(check-sat)(check-sat)")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MultipleCheckSat);
    }

    #[test]
    fn legacy_datatype_syntax_matches_current() {
        let a = parse_script("(declare-datatypes () ((Nat (Z) (S (p Nat)))))(check-sat)").unwrap();
        let b = parse_script("(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))(check-sat)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn print_then_parse_is_identity() {
        let s = parse_script(EVEN).unwrap();
        assert_eq!(parse_script(&s.to_string()).unwrap(), s);
    }
}
