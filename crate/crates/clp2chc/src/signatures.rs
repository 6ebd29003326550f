//! Signature collection and SMT-LIB name assignment.
//!
//! [`collect_functions`] gathers the constructor alphabet of the universal
//! datatype by recursing through every term of the database, including
//! list elements, list tails, and arithmetic operands; arithmetic
//! operators, list constructors, integer literals, and variables
//! contribute nothing. [`NameTable`] then maps every Prolog symbol to a
//! distinct SMT-LIB symbol across the combined namespaces.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::diagnostics::Span;
use crate::smtlib::{is_simple_symbol, Sym};
use crate::syntax::{BodyItem, Database, Term};

/// A function or atom occurring in terms: constructor of the universal type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSig {
    pub name: String,
    pub arity: usize,
    pub first_occurrence: Span,
}

/// A predicate occurring in a clause head or call.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateSig {
    pub name: String,
    pub arity: usize,
}

/// Which built-in constructors the universal type needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureSet {
    pub uses_lists: bool,
    pub uses_integers: bool,
}

impl FeatureSet {
    pub fn union(self, other: FeatureSet) -> FeatureSet {
        FeatureSet {
            uses_lists: self.uses_lists || other.uses_lists,
            uses_integers: self.uses_integers || other.uses_integers,
        }
    }

    pub fn all() -> FeatureSet {
        FeatureSet {
            uses_lists: true,
            uses_integers: true,
        }
    }
}

/// Collect `(name, arity)` pairs of all atoms and functions, in order of
/// first textual occurrence.
pub fn collect_functions(db: &Database) -> Vec<FunctionSig> {
    let mut found: IndexMap<(String, usize), Span> = IndexMap::new();
    for clause in &db.clauses {
        let span = clause.span;
        if let Some(head) = &clause.head {
            for arg in &head.args {
                collect_term_functions(arg, span, &mut found);
            }
        }
        for item in &clause.body {
            collect_item_functions(item, span, &mut found);
        }
    }
    found
        .into_iter()
        .map(|((name, arity), first_occurrence)| FunctionSig {
            name,
            arity,
            first_occurrence,
        })
        .collect()
}

fn collect_item_functions(
    item: &BodyItem,
    span: Span,
    found: &mut IndexMap<(String, usize), Span>,
) {
    match item {
        BodyItem::Call(_, args) => {
            for arg in args {
                collect_term_functions(arg, span, found);
            }
        }
        BodyItem::Unify(lhs, rhs)
        | BodyItem::TermDiseq(lhs, rhs)
        | BodyItem::ArithConstraint(_, lhs, rhs) => {
            collect_term_functions(lhs, span, found);
            collect_term_functions(rhs, span, found);
        }
        BodyItem::Negation(inner) => collect_item_functions(inner, span, found),
    }
}

fn collect_term_functions(term: &Term, span: Span, found: &mut IndexMap<(String, usize), Span>) {
    match term {
        Term::Atom(name) => {
            found.entry((name.clone(), 0)).or_insert(span);
        }
        Term::Compound(name, args) => {
            found.entry((name.clone(), args.len())).or_insert(span);
            for arg in args {
                collect_term_functions(arg, span, found);
            }
        }
        Term::ListTerm(elements, tail) => {
            for element in elements {
                collect_term_functions(element, span, found);
            }
            if let Some(tail) = tail {
                collect_term_functions(tail, span, found);
            }
        }
        Term::ArithExpr(_, operands) => {
            for operand in operands {
                collect_term_functions(operand, span, found);
            }
        }
        Term::Var(_) | Term::IntLit(_) => {}
    }
}

/// Every `(name, arity)` used as a predicate, in first-occurrence order.
pub fn collect_predicates(db: &Database) -> Vec<PredicateSig> {
    let mut found: IndexMap<(String, usize), ()> = IndexMap::new();
    fn visit_item(item: &BodyItem, found: &mut IndexMap<(String, usize), ()>) {
        match item {
            BodyItem::Call(name, args) => {
                found.entry((name.clone(), args.len())).or_insert(());
            }
            BodyItem::Negation(inner) => visit_item(inner, found),
            _ => {}
        }
    }
    for clause in &db.clauses {
        if let Some(head) = &clause.head {
            found
                .entry((head.name.clone(), head.args.len()))
                .or_insert(());
        }
        for item in &clause.body {
            visit_item(item, &mut found);
        }
    }
    found
        .into_keys()
        .map(|(name, arity)| PredicateSig { name, arity })
        .collect()
}

/// Detect whether lists or integers occur anywhere in the database.
pub fn detect_features(db: &Database) -> FeatureSet {
    let mut features = FeatureSet::default();
    fn visit_term(term: &Term, features: &mut FeatureSet) {
        match term {
            Term::ListTerm(elements, tail) => {
                features.uses_lists = true;
                for element in elements {
                    visit_term(element, features);
                }
                if let Some(tail) = tail {
                    visit_term(tail, features);
                }
            }
            Term::IntLit(_) => features.uses_integers = true,
            Term::ArithExpr(_, operands) => {
                features.uses_integers = true;
                for operand in operands {
                    visit_term(operand, features);
                }
            }
            Term::Compound(_, args) => {
                for arg in args {
                    visit_term(arg, features);
                }
            }
            Term::Var(_) | Term::Atom(_) => {}
        }
    }
    fn visit_item(item: &BodyItem, features: &mut FeatureSet) {
        match item {
            BodyItem::Call(_, args) => {
                for arg in args {
                    visit_term(arg, features);
                }
            }
            BodyItem::Unify(lhs, rhs) | BodyItem::TermDiseq(lhs, rhs) => {
                visit_term(lhs, features);
                visit_term(rhs, features);
            }
            BodyItem::ArithConstraint(_, lhs, rhs) => {
                features.uses_integers = true;
                visit_term(lhs, features);
                visit_term(rhs, features);
            }
            BodyItem::Negation(inner) => visit_item(inner, features),
        }
    }
    for clause in &db.clauses {
        if let Some(head) = &clause.head {
            for arg in &head.args {
                visit_term(arg, &mut features);
            }
        }
        for item in &clause.body {
            visit_item(item, &mut features);
        }
    }
    features
}

/// All variable names of the database, in first-occurrence order.
pub fn collect_variables(db: &Database) -> Vec<String> {
    let mut seen = IndexMap::new();
    for clause in &db.clauses {
        let mut record = |name: &str| {
            seen.entry(name.to_string()).or_insert(());
        };
        if let Some(head) = &clause.head {
            for arg in &head.args {
                arg.visit_vars(&mut record);
            }
        }
        for item in &clause.body {
            item.visit_vars(&mut record);
        }
    }
    seen.into_keys().collect()
}

/// Namespaces of the symbol table. On a cross-namespace name clash the
/// earlier namespace in this declaration order keeps the verbatim name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Namespace {
    Predicate,
    Constructor,
    Selector,
    Variable,
}

impl Namespace {
    fn tag(self) -> &'static str {
        match self {
            Namespace::Predicate => "p",
            Namespace::Constructor => "c",
            Namespace::Selector => "s",
            Namespace::Variable => "v",
        }
    }
}

/// Names that user symbols must not shadow: SMT-LIB reserved words, the
/// theory symbols we emit, the universal-type scheme, and our command set.
const RESERVED: &[&str] = &[
    "_",
    "!",
    "as",
    "let",
    "exists",
    "forall",
    "match",
    "par",
    "BINARY",
    "DECIMAL",
    "HEXADECIMAL",
    "NUMERAL",
    "STRING",
    "true",
    "false",
    "not",
    "and",
    "or",
    "xor",
    "=>",
    "=",
    "distinct",
    "ite",
    "Int",
    "Bool",
    "+",
    "-",
    "*",
    "div",
    "mod",
    "abs",
    "<",
    "<=",
    ">",
    ">=",
    "nil",
    "cons",
    "head",
    "tail",
    "aList",
    "theList",
    "anInt",
    "theInt",
    "is",
    "assert",
    "check-sat",
    "declare-datatype",
    "declare-datatypes",
    "declare-fun",
    "define-fun",
    "set-logic",
    "set-option",
    "set-info",
    "get-model",
    "u$default",
    "HORN",
];

/// Sort symbols live in their own SMT-LIB namespace, so a bound variable
/// named `L` is unambiguous; global term symbols still avoid them.
const SORT_NAMES: &[&str] = &["U", "L"];

type Key = (Namespace, String, usize);

/// Deterministic, collision-free assignment of SMT-LIB symbols to Prolog
/// names. Declare every symbol first; the whole table is resolved at the
/// first lookup (or an explicit [`NameTable::resolve`]).
#[derive(Debug, Default, Clone)]
pub struct NameTable {
    declarations: Vec<Key>,
    declared: HashSet<Key>,
    assigned: HashMap<Key, Sym>,
    reverse: HashMap<String, Key>,
    used: HashSet<String>,
    resolved: bool,
}

impl NameTable {
    pub fn new() -> NameTable {
        NameTable::default()
    }

    /// Build and resolve the table for a whole database.
    pub fn for_database(db: &Database) -> NameTable {
        let mut table = NameTable::new();
        for pred in collect_predicates(db) {
            table.declare(Namespace::Predicate, &pred.name, pred.arity);
        }
        for func in collect_functions(db) {
            table.declare(Namespace::Constructor, &func.name, func.arity);
        }
        for var in collect_variables(db) {
            table.declare(Namespace::Variable, &var, 0);
        }
        table.resolve();
        table
    }

    pub fn declare(&mut self, ns: Namespace, name: &str, arity: usize) {
        assert!(!self.resolved, "declare after resolve");
        let key = (ns, name.to_string(), arity);
        if self.declared.insert(key.clone()) {
            self.declarations.push(key);
        }
    }

    /// Assign symbols: predicates first, then constructors, then the
    /// selectors derived from them, then variables; declaration order
    /// within each namespace.
    pub fn resolve(&mut self) {
        if self.resolved {
            return;
        }
        self.resolved = true;
        self.used.extend(RESERVED.iter().map(|s| s.to_string()));

        // Names used at more than one arity within a namespace all carry
        // an arity suffix, so `foo/1` and `foo/2` become foo$1 and foo$2.
        let mut arities: HashMap<(Namespace, &str), HashSet<usize>> = HashMap::new();
        for (ns, name, arity) in &self.declarations {
            arities.entry((*ns, name)).or_default().insert(*arity);
        }
        let multi: HashSet<(Namespace, String)> = arities
            .iter()
            .filter(|(_, set)| set.len() > 1)
            .map(|((ns, name), _)| (*ns, name.to_string()))
            .collect();

        let mut order: Vec<Key> = self.declarations.clone();
        order.sort_by_key(|(ns, ..)| *ns);
        // `sort_by_key` is stable, so declaration order survives within
        // each namespace.

        let mut selector_queue: Vec<(Key, Sym, usize)> = Vec::new();
        for key in order {
            let (ns, name, arity) = &key;
            let base = sanitize(name);
            let with_arity = multi.contains(&(*ns, name.clone()));
            let symbol = self.pick(&base, *arity, *ns, with_arity);
            if *ns == Namespace::Constructor {
                for index in 1..=*arity {
                    selector_queue.push((key.clone(), symbol.clone(), index));
                }
            }
            self.record(key, symbol);
        }
        for (ctor_key, ctor_sym, index) in selector_queue {
            let base = format!("{}_{index}", ctor_sym.content());
            let symbol = self.pick(&base, 0, Namespace::Selector, false);
            let (_, name, arity) = ctor_key;
            self.record(
                (Namespace::Selector, selector_key(&name, arity, index), 0),
                symbol,
            );
        }
    }

    fn pick(&mut self, base: &str, arity: usize, ns: Namespace, with_arity: bool) -> Sym {
        let free = |table: &NameTable, candidate: &str| {
            if table.used.contains(candidate) {
                return false;
            }
            if SORT_NAMES.contains(&candidate) {
                // Bound variables cannot clash with sort symbols.
                return ns == Namespace::Variable;
            }
            true
        };
        let mut candidates = Vec::new();
        if with_arity {
            candidates.push(format!("{base}${arity}"));
            candidates.push(format!("{base}${arity}${}", ns.tag()));
        } else {
            candidates.push(base.to_string());
            candidates.push(format!("{base}${}", ns.tag()));
        }
        for candidate in candidates {
            if free(self, &candidate) {
                self.used.insert(candidate.clone());
                return Sym::new(candidate);
            }
        }
        let stem = if with_arity {
            format!("{base}${arity}${}", ns.tag())
        } else {
            format!("{base}${}", ns.tag())
        };
        let mut counter = 2usize;
        loop {
            let candidate = format!("{stem}{counter}");
            if free(self, &candidate) {
                self.used.insert(candidate.clone());
                return Sym::new(candidate);
            }
            counter += 1;
        }
    }

    fn record(&mut self, key: Key, symbol: Sym) {
        self.reverse
            .insert(symbol.content().to_string(), key.clone());
        self.assigned.insert(key, symbol);
    }

    /// Declare (if new) and resolve a single symbol. Only meaningful on a
    /// table whose remaining declarations are already in.
    pub fn mangle(&mut self, ns: Namespace, name: &str, arity: usize) -> Sym {
        if !self.resolved {
            self.declare(ns, name, arity);
            self.resolve();
        }
        self.symbol(ns, name, arity)
            .cloned()
            .expect("just declared")
    }

    pub fn symbol(&self, ns: Namespace, name: &str, arity: usize) -> Option<&Sym> {
        assert!(self.resolved, "lookup before resolve");
        self.assigned.get(&(ns, name.to_string(), arity))
    }

    pub fn predicate(&self, name: &str, arity: usize) -> &Sym {
        self.symbol(Namespace::Predicate, name, arity)
            .unwrap_or_else(|| panic!("undeclared predicate {name}/{arity}"))
    }

    pub fn constructor(&self, name: &str, arity: usize) -> &Sym {
        self.symbol(Namespace::Constructor, name, arity)
            .unwrap_or_else(|| panic!("undeclared constructor {name}/{arity}"))
    }

    pub fn variable(&self, name: &str) -> &Sym {
        self.symbol(Namespace::Variable, name, 0)
            .unwrap_or_else(|| panic!("undeclared variable {name}"))
    }

    /// Selector symbol for the `index`-th argument (1-based) of a
    /// constructor declared as `name/arity`.
    pub fn selector(&self, name: &str, arity: usize, index: usize) -> &Sym {
        self.symbol(Namespace::Selector, &selector_key(name, arity, index), 0)
            .unwrap_or_else(|| panic!("undeclared selector {name}/{arity}#{index}"))
    }

    /// Reverse lookup: which Prolog symbol produced this SMT-LIB name?
    pub fn origin(&self, content: &str) -> Option<&(Namespace, String, usize)> {
        self.reverse.get(content)
    }

    pub fn emitted_symbols(&self) -> impl Iterator<Item = &Sym> {
        self.assigned.values()
    }
}

fn selector_key(ctor_name: &str, ctor_arity: usize, index: usize) -> String {
    format!("{ctor_name}\u{0}{ctor_arity}\u{0}{index}")
}

/// Strip characters that cannot appear even in a quoted SMT-LIB symbol.
fn sanitize(name: &str) -> String {
    if name.is_empty() {
        return "$empty".to_string();
    }
    if name.contains('|') || name.contains('\\') {
        name.replace('|', "$bar").replace('\\', "$bsl")
    } else {
        name.to_string()
    }
}

/// True when the name can be kept verbatim as an unquoted symbol.
pub fn is_legal_simple_symbol(name: &str) -> bool {
    is_simple_symbol(name)
}
