use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::symbol::expr::{Node, SymbolExpr};

/// Polynomial in the `2d` phase-space variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Complex64) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn variable(vars: usize, v: usize) -> Self {
        let mut e = vec![0; vars];
        e[v] = 1;
        let mut p = Polynomial::zero(vars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Complex64) {
        debug_assert_eq!(exponents.len(), self.vars);
        let slot = self.terms.entry(exponents).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
    }

    /// Non-zero terms in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().filter(|(_, c)| **c != Complex64::new(0.0, 0.0)).map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn degree(&self) -> u32 {
        self.terms().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        let mut value = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            if e.iter().any(|&p| p != 0) {
                return None;
            }
            value += c;
        }
        Some(value)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.to_vec(), c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        let mut out = Polynomial::zero(self.vars);
        for (e, c) in self.terms() {
            out.add_term(e.to_vec(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.vars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn powu(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.vars, Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Converts a tree to polynomial form; `None` if the tree is not polynomial.
    pub fn from_node(node: &Node, vars: usize) -> Option<Polynomial> {
        Some(match node {
            Node::Const(c) => Polynomial::constant(vars, *c),
            Node::Var(v) => Polynomial::variable(vars, *v),
            Node::Add(a, b) => Self::from_node(a, vars)?.add(&Self::from_node(b, vars)?),
            Node::Sub(a, b) => {
                Self::from_node(a, vars)?.add(&Self::from_node(b, vars)?.scale(Complex64::new(-1.0, 0.0)))
            }
            Node::Mul(a, b) => Self::from_node(a, vars)?.mul(&Self::from_node(b, vars)?),
            Node::Div(a, b) => {
                let den = Self::from_node(b, vars)?.as_constant()?;
                if den == Complex64::new(0.0, 0.0) {
                    return None;
                }
                Self::from_node(a, vars)?.scale(den.inv())
            }
            Node::Pow(a, n) => {
                // bound the expansion cost; beyond this nothing downstream can use it
                if *n > 64 {
                    return None;
                }
                Self::from_node(a, vars)?.powu(*n)
            }
            Node::Neg(a) => Self::from_node(a, vars)?.scale(Complex64::new(-1.0, 0.0)),
            Node::Func(_, a) => {
                // only constant arguments fold; everything else is transcendental
                Self::from_node(a, vars)?.as_constant()?;
                Polynomial::constant(vars, node.eval(&vec![0.0; vars]).ok()?)
            }
        })
    }

    pub fn from_expr(expr: &SymbolExpr) -> Option<Polynomial> {
        Self::from_node(expr.root(), 2 * expr.dims())
    }

    /// Back to an expression tree (sum of monomials).
    pub fn to_expr(&self, dims: usize) -> SymbolExpr {
        let mut root = Node::real(0.0);
        for (e, c) in self.terms() {
            let mut term = Node::constant(c);
            for (v, &p) in e.iter().enumerate() {
                term = Node::mul(term, Node::pow(Node::Var(v), p));
            }
            root = Node::add(root, term);
        }
        SymbolExpr::new(dims, root).expect("polynomial variables are in range")
    }
}
