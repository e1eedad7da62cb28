//! Exclusive-sum-of-products expressions and the per-gate clause forms.
//!
//! A gate `p = G(x1..xk)` is encoded as a single ESOP constraint that
//! evaluates to 1 exactly when the auxiliary variable `p` agrees with `G`:
//!
//! | gate        | constraint                    |
//! |-------------|-------------------------------|
//! | AND / NAND  | `1 ^ p ^ x1&..&xk` / `p ^ x1&..&xk` |
//! | OR / NOR    | `p ^ !x1&..&!xk` / `1 ^ p ^ !x1&..&!xk` |
//! | XOR / XNOR  | `1 ^ p ^ x1 ^ .. ^ xk` / `p ^ x1 ^ .. ^ xk` |
//! | ITE(s,a,b)  | `1 ^ p ^ a ^ s&a ^ s&b`       |
//! | MAJ(a,b,c)  | `1 ^ p ^ a&b ^ a&c ^ b&c`     |
//! | NOT(x)      | `p ^ x`                       |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::netlist::{GateKind, GateTag};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            positive: true,
        }
    }

    pub fn neg(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            positive: false,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            var: self.var.clone(),
            positive: !self.positive,
        }
    }

    pub fn eval(&self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str(&self.var)
        } else {
            write!(f, "!{}", self.var)
        }
    }
}

/// A conjunction of literals over distinct variables, sorted by variable name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term(Vec<Literal>);

impl Term {
    /// Builds the conjunction; `None` when it contains both `x` and `!x`.
    pub fn new(mut lits: Vec<Literal>) -> Option<Term> {
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            return None;
        }
        Some(Term(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, mut value: impl FnMut(&str) -> bool) -> bool {
        self.0.iter().all(|l| l.eval(value(&l.var)))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("&"))
    }
}

/// `constant ^ t1 ^ t2 ^ ...`, kept in a normal form: no empty term, no
/// repeated term, and no single-literal term of negative polarity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EsopExpr {
    constant: bool,
    terms: Vec<Term>,
}

impl EsopExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn toggle(&mut self) {
        self.constant = !self.constant;
    }

    /// XORs a product term into the expression. A contradictory product is
    /// zero and leaves the expression unchanged.
    pub fn push(&mut self, lits: Vec<Literal>) {
        let Some(term) = Term::new(lits) else { return };
        match term.0.as_slice() {
            [] => {
                self.constant = !self.constant;
                return;
            }
            // !x == 1 ^ x
            [l] if !l.positive => {
                self.constant = !self.constant;
                return self.push(vec![l.negated()]);
            }
            _ => {}
        }
        if let Some(i) = self.terms.iter().position(|t| *t == term) {
            self.terms.remove(i);
        } else {
            self.terms.push(term);
        }
    }

    pub fn eval(&self, mut value: impl FnMut(&str) -> bool) -> bool {
        self.terms.iter().fold(self.constant, |acc, t| acc ^ t.eval(&mut value))
    }

    /// Every variable that occurs in some term.
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().flat_map(|t| t.0.iter().map(|l| l.var.as_str()))
    }

    /// The expression with `var` occurring only as the singleton term `[var]`
    /// removed, if that is how it occurs.
    pub fn without_linear(&self, var: &str) -> Option<EsopExpr> {
        let singles = self
            .terms
            .iter()
            .filter(|t| t.0.len() == 1 && t.0[0].var == var)
            .count();
        let total = self.vars().filter(|v| *v == var).count();
        if singles != 1 || total != 1 {
            return None;
        }
        Some(EsopExpr {
            constant: self.constant,
            terms: self
                .terms
                .iter()
                .filter(|t| !(t.0.len() == 1 && t.0[0].var == var))
                .cloned()
                .collect(),
        })
    }
}

impl fmt::Display for EsopExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.constant || self.terms.is_empty() {
            parts.push(if self.constant { "1".into() } else { "0".into() });
        }
        parts.extend(self.terms.iter().map(ToString::to_string));
        f.write_str(&parts.join(" ^ "))
    }
}

/// The ESOP constraint that holds exactly when `aux` equals `kind(fanins)`.
///
/// # Panics
/// If `fanins.len()` differs from the arity of `kind`.
pub fn esop_of_gate(kind: GateKind, aux: &str, fanins: &[Literal]) -> EsopExpr {
    assert_eq!(fanins.len(), kind.arity(), "fan-in count must match the gate arity");
    let mut e = EsopExpr::zero();
    e.push(vec![Literal::pos(aux)]);
    match kind.tag() {
        GateTag::And | GateTag::Nand => {
            e.push(fanins.to_vec());
            if kind.tag() == GateTag::And {
                e.toggle();
            }
        }
        GateTag::Or | GateTag::Nor => {
            e.push(fanins.iter().map(Literal::negated).collect());
            if kind.tag() == GateTag::Nor {
                e.toggle();
            }
        }
        GateTag::Xor | GateTag::Xnor => {
            for l in fanins {
                e.push(vec![l.clone()]);
            }
            if kind.tag() == GateTag::Xor {
                e.toggle();
            }
        }
        GateTag::Not => {
            e.push(vec![fanins[0].clone()]);
        }
        GateTag::Ite => {
            let (s, a, b) = (&fanins[0], &fanins[1], &fanins[2]);
            e.toggle();
            e.push(vec![a.clone()]);
            e.push(vec![s.clone(), a.clone()]);
            e.push(vec![s.clone(), b.clone()]);
        }
        GateTag::Maj => {
            let (a, b, c) = (&fanins[0], &fanins[1], &fanins[2]);
            e.toggle();
            e.push(vec![a.clone(), b.clone()]);
            e.push(vec![a.clone(), c.clone()]);
            e.push(vec![b.clone(), c.clone()]);
        }
    }
    e
}

/// Tseitin CNF of `aux <=> kind(fanins)` for AND/OR gates. Only used to
/// compare clause counts against the ESOP form; nothing compiles it.
pub fn tseitin_cnf(kind: GateKind, aux: &str, fanins: &[Literal]) -> Option<Vec<Vec<Literal>>> {
    let p = Literal::pos(aux);
    let (p, xs): (Literal, Vec<Literal>) = match kind.tag() {
        GateTag::And => (p, fanins.to_vec()),
        GateTag::Nand => (p.negated(), fanins.to_vec()),
        // p <=> OR(x) is !p <=> AND(!x)
        GateTag::Or => (p.negated(), fanins.iter().map(Literal::negated).collect()),
        GateTag::Nor => (p, fanins.iter().map(Literal::negated).collect()),
        _ => return None,
    };
    let mut clauses: Vec<Vec<Literal>> = xs.iter().map(|x| vec![p.negated(), x.clone()]).collect();
    let mut long = vec![p];
    long.extend(xs.iter().map(Literal::negated));
    clauses.push(long);
    Some(clauses)
}
