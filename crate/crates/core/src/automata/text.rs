//! Text form of an automaton:
//!
//! ```text
//! automaton even : Nat
//! states Nat: s0, s1
//! Z -> s0
//! S(s0) -> s1
//! S(s1) -> s0
//! final: (s0)
//! ```
//!
//! States are `s<i>`, prefixed with their sort (`Type.s0`) when the table has
//! more than one sort. The whole shared table is written, so every automaton
//! of a model prints the same transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use super::automaton::{TransitionTable, TreeAutomaton};
use crate::model::tuples_over;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: second transition for `{lhs}` makes the automaton nondeterministic")]
    Nondeterministic { line: usize, lhs: String },
}

fn state_name(table: &TransitionTable, sort: &str, i: usize) -> String {
    if table.states.len() > 1 {
        format!("{sort}.s{i}")
    } else {
        format!("s{i}")
    }
}

fn write_states(
    out: &mut String,
    table: &TransitionTable,
    sorts: &[String],
    states: &[usize],
) -> fmt::Result {
    for (i, (s, &q)) in sorts.iter().zip(states).enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&state_name(table, s, q));
    }
    Ok(())
}

pub fn serialize_automaton(a: &TreeAutomaton) -> String {
    let table = &a.table;
    let mut out = String::new();
    let _ = writeln!(out, "automaton {} : {}", a.predicate, a.sorts.join(" x "));
    for (sort, &k) in &table.states {
        let names: Vec<String> = (0..k).map(|i| state_name(table, sort, i)).collect();
        let _ = writeln!(out, "states {sort}: {}", names.join(", "));
    }
    for (c, (args, result)) in &table.constructors {
        let sizes: Vec<usize> = args.iter().map(|s| table.states[s.as_str()]).collect();
        for row in tuples_over(&sizes) {
            let Some(q) = table.step(c, &row) else {
                continue;
            };
            out.push_str(c);
            if !args.is_empty() {
                out.push('(');
                let _ = write_states(&mut out, table, args, &row);
                out.push(')');
            }
            let _ = writeln!(out, " -> {}", state_name(table, result, q));
        }
    }
    out.push_str("final:");
    for (i, t) in a.finals.iter().enumerate() {
        out.push_str(if i > 0 { ", (" } else { " (" });
        let _ = write_states(&mut out, table, &a.sorts, t);
        out.push(')');
    }
    out.push('\n');
    out
}

impl fmt::Display for TreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_automaton(self))
    }
}

/// Splits `a, (b, c), d` at top-level commas.
fn split_top(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last);
    }
    parts
}

pub fn parse_automaton(text: &str) -> Result<TreeAutomaton, AutomatonParseError> {
    let mut header: Option<(String, Vec<String>)> = None;
    let mut table = TransitionTable::default();
    // state name -> (sort, index)
    let mut names: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut finals: Option<Vec<(usize, Vec<(String, usize)>)>> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| AutomatonParseError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let lookup = |name: &str| {
            names
                .get(name.trim())
                .cloned()
                .ok_or_else(|| err(format!("unknown state `{}`", name.trim())))
        };
        let keyword = |k: &str| content.strip_prefix(k).filter(|_| !content.contains("->"));
        if let Some(rest) = keyword("automaton") {
            if header.is_some() {
                return Err(err("second header".into()));
            }
            let (pred, sorts) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `automaton NAME : SORT x ...`".into()))?;
            let pred = pred.trim();
            if pred.is_empty() {
                return Err(err("missing predicate name".into()));
            }
            let sorts: Vec<String> = sorts
                .split_whitespace()
                .filter(|w| *w != "x")
                .map(str::to_string)
                .collect();
            header = Some((pred.to_string(), sorts));
        } else if let Some(rest) = keyword("states") {
            let (sort, list) = rest
                .split_once(':')
                .ok_or_else(|| err("expected `states SORT: s0, ...`".into()))?;
            let sort = sort.trim().to_string();
            if table.states.contains_key(&sort) {
                return Err(err(format!("states of `{sort}` given twice")));
            }
            let list: Vec<&str> = split_top(list);
            for (k, name) in list.iter().enumerate() {
                if name.is_empty() || names.insert(name.to_string(), (sort.clone(), k)).is_some() {
                    return Err(err(format!("bad or repeated state name `{name}`")));
                }
            }
            table.states.insert(sort, list.len());
        } else if let Some(rest) = keyword("final:") {
            if finals.is_some() {
                return Err(err("second `final:` line".into()));
            }
            let mut tuples = Vec::new();
            for tuple in split_top(rest) {
                let inner = tuple
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| err(format!("expected a parenthesized tuple, got `{tuple}`")))?;
                let states = split_top(inner)
                    .into_iter()
                    .map(lookup)
                    .collect::<Result<Vec<_>, _>>()?;
                tuples.push((line, states));
            }
            finals = Some(tuples);
        } else {
            let (lhs, rhs) = content
                .split_once("->")
                .ok_or_else(|| err(format!("unrecognized line `{content}`")))?;
            let lhs = lhs.trim();
            let (ctor, args) = match lhs.split_once('(') {
                Some((c, rest)) => {
                    let inner = rest
                        .trim_end()
                        .strip_suffix(')')
                        .ok_or_else(|| err("unbalanced parentheses".into()))?;
                    (c.trim(), split_top(inner))
                }
                None => (lhs, Vec::new()),
            };
            if ctor.is_empty() {
                return Err(err("missing constructor".into()));
            }
            let args = args.into_iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
            let (result_sort, target) = lookup(rhs)?;
            let arg_sorts: Vec<String> = args.iter().map(|(s, _)| s.clone()).collect();
            let states: Vec<usize> = args.iter().map(|(_, k)| *k).collect();
            match table.constructors.get(ctor) {
                Some((a, r)) if *a != arg_sorts || *r != result_sort => {
                    return Err(err(format!("`{ctor}` used with inconsistent sorts")));
                }
                Some(_) => {}
                None => {
                    table
                        .constructors
                        .insert(ctor.to_string(), (arg_sorts, result_sort));
                }
            }
            if table.insert_rule(ctor, states, target).is_some() {
                return Err(AutomatonParseError::Nondeterministic {
                    line,
                    lhs: lhs.to_string(),
                });
            }
        }
    }
    let (predicate, sorts) = header.ok_or(AutomatonParseError::Syntax {
        line: 0,
        message: "missing `automaton` header".into(),
    })?;
    for s in &sorts {
        if !table.states.contains_key(s) {
            return Err(AutomatonParseError::Syntax {
                line: 0,
                message: format!("no states declared for sort `{s}`"),
            });
        }
    }
    let mut final_set = BTreeSet::new();
    for (line, tuple) in finals.unwrap_or_default() {
        let tuple_sorts: Vec<&String> = tuple.iter().map(|(s, _)| s).collect();
        if tuple_sorts.len() != sorts.len() || tuple_sorts.iter().zip(&sorts).any(|(a, b)| *a != b) {
            return Err(AutomatonParseError::Syntax {
                line,
                message: "final tuple does not match the header sorts".into(),
            });
        }
        final_set.insert(tuple.into_iter().map(|(_, k)| k).collect());
    }
    Ok(TreeAutomaton {
        predicate,
        sorts,
        table: Arc::new(table),
        finals: final_set,
    })
}
