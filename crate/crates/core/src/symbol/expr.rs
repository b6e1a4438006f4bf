use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{MultiIndex, PhasePoint};

/// Elementary functions allowed in symbols. The set is closed under differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        if z.im == 0.0 {
            let x = z.re;
            let v = match self {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
            };
            return Complex64::new(v, 0.0);
        }
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Tanh => z.tanh(),
        }
    }
}

/// Expression tree node. Variables index `x_1..x_d` as `0..d` and `xi_1..xi_d` as `d..2d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Neg(Box<Node>),
    Func(Func, Box<Node>),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

// Smart constructors: constant folding plus zero/one pruning, nothing more.
#[allow(clippy::should_implement_trait)]
impl Node {
    pub fn constant(c: Complex64) -> Node {
        Node::Const(c)
    }

    pub fn real(c: f64) -> Node {
        Node::Const(Complex64::new(c, 0.0))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: Complex64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn add(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::Const(x + y),
            (Some(x), _) if x == ZERO => b,
            (_, Some(y)) if y == ZERO => a,
            _ => Node::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::Const(x - y),
            (Some(x), _) if x == ZERO => Node::neg(b),
            (_, Some(y)) if y == ZERO => a,
            _ => Node::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == ZERO => Node::Const(ZERO),
            (Some(x), _) if x == ONE => b,
            (_, Some(y)) if y == ONE => a,
            _ => Node::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != ZERO => Node::Const(x / y),
            (Some(x), _) if x == ZERO => Node::Const(ZERO),
            (_, Some(y)) if y == ONE => a,
            _ => Node::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Node, n: u32) -> Node {
        if n == 0 {
            return Node::Const(ONE);
        }
        if n == 1 {
            return a;
        }
        match a.as_const() {
            Some(c) => Node::Const(c.powu(n)),
            None => Node::Pow(Box::new(a), n),
        }
    }

    pub fn neg(a: Node) -> Node {
        match a {
            Node::Const(c) => Node::Const(-c),
            Node::Neg(inner) => *inner,
            other => Node::Neg(Box::new(other)),
        }
    }

    pub fn func(f: Func, a: Node) -> Node {
        match a.as_const() {
            Some(c) => Node::Const(f.apply(c)),
            None => Node::Func(f, Box::new(a)),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Node::Const(_) => None,
            Node::Var(v) => Some(*v),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => a.max_var(),
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var(v) => *v == var,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => a.depends_on(var),
        }
    }

    pub(crate) fn eval(&self, z: &[f64]) -> std::result::Result<Complex64, EvalFault> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var(v) => Complex64::new(z[*v], 0.0),
            Node::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Node::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Node::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Node::Div(a, b) => {
                let num = a.eval(z)?;
                let den = b.eval(z)?;
                if den == ZERO {
                    return Err(EvalFault::DivisionByZero);
                }
                // num / den for real operands is exact real division
                if num.im == 0.0 && den.im == 0.0 {
                    Complex64::new(num.re / den.re, 0.0)
                } else {
                    num / den
                }
            }
            Node::Pow(a, n) => {
                let base = a.eval(z)?;
                if base.im == 0.0 {
                    Complex64::new(base.re.powi(*n as i32), 0.0)
                } else {
                    base.powu(*n)
                }
            }
            Node::Neg(a) => -a.eval(z)?,
            Node::Func(f, a) => {
                let v = f.apply(a.eval(z)?);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(EvalFault::NonFinite);
                }
                v
            }
        })
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Node {
        match self {
            Node::Const(_) => Node::real(0.0),
            Node::Var(v) => Node::real(if *v == var { 1.0 } else { 0.0 }),
            Node::Add(a, b) => Node::add(a.partial(var), b.partial(var)),
            Node::Sub(a, b) => Node::sub(a.partial(var), b.partial(var)),
            Node::Mul(a, b) => {
                Node::add(Node::mul(a.partial(var), (**b).clone()), Node::mul((**a).clone(), b.partial(var)))
            }
            Node::Div(a, b) => {
                let da = a.partial(var);
                let db = b.partial(var);
                if db.is_const(ZERO) {
                    return Node::div(da, (**b).clone());
                }
                Node::div(
                    Node::sub(Node::mul(da, (**b).clone()), Node::mul((**a).clone(), db)),
                    Node::pow((**b).clone(), 2),
                )
            }
            Node::Pow(_, 0) => Node::real(0.0),
            Node::Pow(a, n) => {
                Node::mul(Node::mul(Node::real(*n as f64), Node::pow((**a).clone(), n - 1)), a.partial(var))
            }
            Node::Neg(a) => Node::neg(a.partial(var)),
            Node::Func(f, a) => {
                let inner = a.partial(var);
                if inner.is_const(ZERO) {
                    return Node::real(0.0);
                }
                let u = (**a).clone();
                let outer = match f {
                    Func::Sin => Node::func(Func::Cos, u),
                    Func::Cos => Node::neg(Node::func(Func::Sin, u)),
                    Func::Exp => Node::func(Func::Exp, u),
                    Func::Sinh => Node::func(Func::Cosh, u),
                    Func::Cosh => Node::func(Func::Sinh, u),
                    Func::Tanh => Node::sub(Node::real(1.0), Node::pow(Node::func(Func::Tanh, u), 2)),
                };
                Node::mul(outer, inner)
            }
        }
    }

    /// Replaces every variable `v` by `v + offset[v]`.
    pub fn shifted(&self, offset: &[f64]) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var(v) => {
                if offset[*v] == 0.0 {
                    Node::Var(*v)
                } else {
                    Node::add(Node::Var(*v), Node::real(offset[*v]))
                }
            }
            Node::Add(a, b) => Node::add(a.shifted(offset), b.shifted(offset)),
            Node::Sub(a, b) => Node::sub(a.shifted(offset), b.shifted(offset)),
            Node::Mul(a, b) => Node::mul(a.shifted(offset), b.shifted(offset)),
            Node::Div(a, b) => Node::div(a.shifted(offset), b.shifted(offset)),
            Node::Pow(a, n) => Node::pow(a.shifted(offset), *n),
            Node::Neg(a) => Node::neg(a.shifted(offset)),
            Node::Func(f, a) => Node::func(*f, a.shifted(offset)),
        }
    }

    /// Replaces variable `var` by the constant `value`.
    pub fn substitute(&self, var: usize, value: f64) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var(v) if *v == var => Node::real(value),
            Node::Var(v) => Node::Var(*v),
            Node::Add(a, b) => Node::add(a.substitute(var, value), b.substitute(var, value)),
            Node::Sub(a, b) => Node::sub(a.substitute(var, value), b.substitute(var, value)),
            Node::Mul(a, b) => Node::mul(a.substitute(var, value), b.substitute(var, value)),
            Node::Div(a, b) => Node::div(a.substitute(var, value), b.substitute(var, value)),
            Node::Pow(a, n) => Node::pow(a.substitute(var, value), *n),
            Node::Neg(a) => Node::neg(a.substitute(var, value)),
            Node::Func(f, a) => Node::func(*f, a.substitute(var, value)),
        }
    }

    pub fn contains_division(&self) -> bool {
        match self {
            Node::Const(_) | Node::Var(_) => false,
            Node::Div(a, b) => b.as_const().is_none() || a.contains_division() || b.contains_division(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => a.contains_division() || b.contains_division(),
            Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => a.contains_division(),
        }
    }

    fn write_with_names(&self, f: &mut fmt::Formatter<'_>, dims: usize) -> fmt::Result {
        match self {
            Node::Const(c) => write_const(f, *c),
            Node::Var(v) => f.write_str(&variable_name(*v, dims)),
            Node::Add(a, b) => binary(f, a, "+", b, dims),
            Node::Sub(a, b) => binary(f, a, "-", b, dims),
            Node::Mul(a, b) => binary(f, a, "*", b, dims),
            Node::Div(a, b) => binary(f, a, "/", b, dims),
            Node::Pow(a, n) => {
                f.write_str("(")?;
                a.write_with_names(f, dims)?;
                write!(f, ")^{n}")
            }
            Node::Neg(a) => {
                f.write_str("-(")?;
                a.write_with_names(f, dims)?;
                f.write_str(")")
            }
            Node::Func(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_with_names(f, dims)?;
                f.write_str(")")
            }
        }
    }
}

fn binary(f: &mut fmt::Formatter<'_>, a: &Node, op: &str, b: &Node, dims: usize) -> fmt::Result {
    f.write_str("(")?;
    a.write_with_names(f, dims)?;
    write!(f, " {op} ")?;
    b.write_with_names(f, dims)?;
    f.write_str(")")
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    // `{:?}` on f64 is the shortest representation that round-trips.
    if c.im == 0.0 {
        if c.re < 0.0 {
            write!(f, "(-{:?})", -c.re)
        } else {
            write!(f, "{:?}", c.re)
        }
    } else {
        let sign = if c.im < 0.0 { "-" } else { "+" };
        let re = if c.re < 0.0 { format!("-{:?}", -c.re) } else { format!("{:?}", c.re) };
        write!(f, "({re} {sign} {:?}i)", c.im.abs())
    }
}

/// Canonical printed name of a variable index.
pub fn variable_name(var: usize, dims: usize) -> String {
    if dims == 1 {
        if var == 0 {
            "x".into()
        } else {
            "xi".into()
        }
    } else if var < dims {
        format!("x{}", var + 1)
    } else {
        format!("xi{}", var - dims + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EvalFault {
    DivisionByZero,
    NonFinite,
}

/// Closed-form scalar phase-space symbol in `d` degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolExpr {
    dims: usize,
    root: Node,
}

impl SymbolExpr {
    pub fn new(dims: usize, root: Node) -> Result<Self> {
        if dims == 0 {
            return Err(Error::DimensionMismatch("d must be positive".into()));
        }
        if let Some(v) = root.max_var() {
            if v >= 2 * dims {
                return Err(Error::DimensionMismatch(format!("variable index {v} out of range for d = {dims}")));
            }
        }
        Ok(SymbolExpr { dims, root })
    }

    pub fn constant(dims: usize, c: Complex64) -> Self {
        SymbolExpr { dims, root: Node::Const(c) }
    }

    /// The coordinate function `z_var`.
    pub fn coordinate(dims: usize, var: usize) -> Self {
        assert!(var < 2 * dims, "coordinate index out of range");
        SymbolExpr { dims, root: Node::Var(var) }
    }

    pub fn parse(text: &str, dims: usize) -> Result<Self> {
        crate::symbol::parse::parse_expr(text, dims)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn as_const(&self) -> Option<Complex64> {
        self.root.as_const()
    }

    pub fn evaluate(&self, z: &PhasePoint) -> Result<Complex64> {
        if z.len() != 2 * self.dims {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, symbol expects {}",
                z.len(),
                2 * self.dims
            )));
        }
        self.eval_slice(z.coords())
    }

    /// Evaluation on a raw coordinate slice; the caller guarantees its length.
    pub fn eval_slice(&self, z: &[f64]) -> Result<Complex64> {
        debug_assert_eq!(z.len(), 2 * self.dims);
        match self.root.eval(z) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
            Ok(_) | Err(EvalFault::NonFinite) => Err(Error::NonFinite { point: z.to_vec() }),
            Err(EvalFault::DivisionByZero) => Err(Error::DivisionByZero { point: z.to_vec() }),
        }
    }

    pub fn partial(&self, var: usize) -> SymbolExpr {
        SymbolExpr { dims: self.dims, root: self.root.partial(var) }
    }

    pub fn differentiate(&self, gamma: &MultiIndex) -> Result<SymbolExpr> {
        if gamma.len() != 2 * self.dims {
            return Err(Error::DimensionMismatch(format!(
                "multi-index has length {}, expected {}",
                gamma.len(),
                2 * self.dims
            )));
        }
        let mut root = self.root.clone();
        for (var, &count) in gamma.as_slice().iter().enumerate() {
            for _ in 0..count {
                root = root.partial(var);
            }
        }
        Ok(SymbolExpr { dims: self.dims, root })
    }

    /// `g(w) = f(w + z)`.
    pub fn shift(&self, z: &PhasePoint) -> Result<SymbolExpr> {
        if z.len() != 2 * self.dims {
            return Err(Error::DimensionMismatch(format!(
                "shift has {} coordinates, symbol expects {}",
                z.len(),
                2 * self.dims
            )));
        }
        Ok(SymbolExpr { dims: self.dims, root: self.root.shifted(z.coords()) })
    }

    pub fn substitute(&self, var: usize, value: f64) -> SymbolExpr {
        SymbolExpr { dims: self.dims, root: self.root.substitute(var, value) }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.root.depends_on(var)
    }

    pub fn add(&self, other: &SymbolExpr) -> SymbolExpr {
        assert_eq!(self.dims, other.dims);
        SymbolExpr { dims: self.dims, root: Node::add(self.root.clone(), other.root.clone()) }
    }

    pub fn sub(&self, other: &SymbolExpr) -> SymbolExpr {
        assert_eq!(self.dims, other.dims);
        SymbolExpr { dims: self.dims, root: Node::sub(self.root.clone(), other.root.clone()) }
    }

    pub fn scale(&self, c: Complex64) -> SymbolExpr {
        SymbolExpr { dims: self.dims, root: Node::mul(Node::Const(c), self.root.clone()) }
    }

    /// True when the tree divides by something that is not a constant.
    pub fn has_symbolic_division(&self) -> bool {
        self.root.contains_division()
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write_with_names(f, self.dims)
    }
}
