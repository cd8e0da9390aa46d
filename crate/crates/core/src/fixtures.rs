//! Bundled example systems and small signatures used by tests and the CLI
//! corpus.

use crate::ir::Signature;

pub const EVEN: &str = include_str!("../../../fixtures/even.smt2");
pub const EXAMPLE3: &str = include_str!("../../../fixtures/example3.smt2");
pub const DISEQ_ZZ: &str = include_str!("../../../fixtures/diseq_zz.smt2");
pub const INCDEC: &str = include_str!("../../../fixtures/incdec.smt2");
pub const EVENLEFT: &str = include_str!("../../../fixtures/evenleft.smt2");
pub const DIAG: &str = include_str!("../../../fixtures/diag.smt2");
pub const LTGT: &str = include_str!("../../../fixtures/ltgt.smt2");
pub const STLC: &str = include_str!("../../../fixtures/stlc.smt2");
pub const STLC_VC: &str = include_str!("../../../fixtures/extra/stlc_vc.smt2");
pub const EVEN_REC: &str = include_str!("../../../fixtures/extra/even_rec.smt2");
pub const ALLZ_SELECTORS: &str = include_str!("../../../fixtures/extra/allz_selectors.smt2");

/// Every bundled script by short name.
pub const ALL: &[(&str, &str)] = &[
    ("even", EVEN),
    ("example3", EXAMPLE3),
    ("diseq_zz", DISEQ_ZZ),
    ("incdec", INCDEC),
    ("evenleft", EVENLEFT),
    ("diag", DIAG),
    ("ltgt", LTGT),
    ("stlc", STLC),
    ("stlc_vc", STLC_VC),
    ("even_rec", EVEN_REC),
    ("allz_selectors", ALLZ_SELECTORS),
];

fn build(sorts: &[(&str, &[(&str, &[&str])])]) -> Signature {
    let mut sig = Signature::new();
    for (s, _) in sorts {
        sig.add_sort(s).unwrap();
    }
    for (s, ctors) in sorts {
        for (c, args) in *ctors {
            sig.add_constructor(c, args.iter().map(|a| a.to_string()).collect(), s)
                .unwrap();
        }
    }
    sig.validate().unwrap();
    sig
}

/// `Nat ::= Z | S(Nat)`
pub fn nat_signature() -> Signature {
    build(&[("Nat", &[("Z", &[]), ("S", &["Nat"])])])
}

/// `Tree ::= leaf | node(Tree, Tree)`
pub fn tree_signature() -> Signature {
    build(&[("Tree", &[("leaf", &[]), ("node", &["Tree", "Tree"])])])
}

/// `Nat` plus `List ::= nil | cons(car: Nat, cdr: List)`.
pub fn list_signature() -> Signature {
    let mut sig = build(&[
        ("Nat", &[("Z", &[]), ("S", &["Nat"])]),
        ("List", &[("nil", &[]), ("cons", &["Nat", "List"])]),
    ]);
    sig.add_selector("car", "cons", 0).unwrap();
    sig.add_selector("cdr", "cons", 1).unwrap();
    sig
}

/// Variable-free propositional formulas over true, false, and, or, implies.
pub fn prop_signature() -> Signature {
    build(&[(
        "Prop",
        &[
            ("top", &[]),
            ("bot", &[]),
            ("and", &["Prop", "Prop"]),
            ("or", &["Prop", "Prop"]),
            ("imp", &["Prop", "Prop"]),
        ],
    )])
}
