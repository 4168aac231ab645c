//! Scalar math expressions: parsing, evaluation and exact symbolic partial
//! derivatives.
//!
//! Expressions are parsed against an explicit list of variable names; the
//! resulting tree stores variables as positional slots, so evaluation takes
//! a slice of values in declaration order. Evaluation is generic over
//! [`Scalar`], which lets the solvers differentiate residuals that contain a
//! user-supplied weight with forward-mode dual numbers.
//!
//! ```
//! use bminimal::expr::Expr;
//!
//! let e = Expr::parse("-log(cos(x))", &["x"]).unwrap();
//! let d = e.differentiate("x").unwrap();
//! let v = d.eval_at(&[std::f64::consts::FRAC_PI_4]).unwrap();
//! assert!((v - 1.0).abs() < 1e-12);
//! ```

mod diff;
mod eval;
mod parse;
mod print;

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("no binding for variable `{0}`")]
    Unbound(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Neg => "neg",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Expression tree node. `Var` holds a slot into the owning [`Expr`]'s
/// variable list.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Unary(Func, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
}

impl Node {
    /// True when the subtree references no variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Var(_) => false,
            Node::Unary(_, a) => a.is_constant(),
            Node::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn count(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Unary(_, a) => 1 + a.count(),
            Node::Binary(_, a, b) => 1 + a.count() + b.count(),
        }
    }
}

/// Immutable parsed expression together with its declared variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Arc<[String]>,
}

impl Expr {
    /// Parses `text`; every identifier must be one of `variables` (with `y`
    /// and `y1` treated as aliases when only one of them is declared and no
    /// `y2` exists) or a function name.
    pub fn parse(text: &str, variables: &[&str]) -> Result<Expr, ParseError> {
        let vars: Arc<[String]> = variables.iter().map(|s| s.to_string()).collect();
        let root = parse::Parser::new(text, &vars)?.parse()?;
        Ok(Expr { root, vars })
    }

    /// Constant expression over the given variables.
    pub fn constant(value: f64, variables: &[&str]) -> Expr {
        Expr {
            root: Node::Const(value),
            vars: variables.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// The expression consisting of a single declared variable.
    pub fn variable(name: &str, variables: &[&str]) -> Result<Expr, EvalError> {
        let vars: Arc<[String]> = variables.iter().map(|s| s.to_string()).collect();
        let slot = resolve(&vars, name).ok_or_else(|| EvalError::UnknownVariable(name.into()))?;
        Ok(Expr {
            root: Node::Var(slot),
            vars,
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Slot of `name` in the variable list, honouring the `y`/`y1` alias.
    pub fn slot_of(&self, name: &str) -> Option<usize> {
        resolve(&self.vars, name)
    }

    /// True when the tree is exactly the variable `name`.
    pub fn is_variable(&self, name: &str) -> bool {
        matches!(self.root, Node::Var(s) if Some(s) == self.slot_of(name))
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.root.count()
    }

    /// Same tree re-expressed over a different variable list. Every variable
    /// used by `self` must be present (by name or alias) in `variables`.
    pub fn rebind(&self, variables: &[&str]) -> Result<Expr, EvalError> {
        let vars: Arc<[String]> = variables.iter().map(|s| s.to_string()).collect();
        let mut map = Vec::with_capacity(self.vars.len());
        for name in self.vars.iter() {
            map.push(resolve(&vars, name));
        }
        fn walk(n: &Node, map: &[Option<usize>], names: &[String]) -> Result<Node, EvalError> {
            Ok(match n {
                Node::Const(c) => Node::Const(*c),
                Node::Var(s) => Node::Var(
                    map[*s].ok_or_else(|| EvalError::UnknownVariable(names[*s].clone()))?,
                ),
                Node::Unary(f, a) => Node::Unary(*f, Box::new(walk(a, map, names)?)),
                Node::Binary(op, a, b) => Node::Binary(
                    *op,
                    Box::new(walk(a, map, names)?),
                    Box::new(walk(b, map, names)?),
                ),
            })
        }
        Ok(Expr {
            root: walk(&self.root, &map, &self.vars)?,
            vars,
        })
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    /// Parses with the default single-variable list `[x]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s, &["x"])
    }
}

fn resolve(vars: &[String], name: &str) -> Option<usize> {
    if let Some(i) = vars.iter().position(|v| v == name) {
        return Some(i);
    }
    let has = |n: &str| vars.iter().any(|v| v == n);
    if has("y2") {
        return None;
    }
    match name {
        "y" => vars.iter().position(|v| v == "y1"),
        "y1" => vars.iter().position(|v| v == "y"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::f64::consts::PI;

    #[test]
    fn grim_reaper_text_parses_with_negation_root() {
        let e = Expr::parse("-log(cos(x))", &["x"]).unwrap();
        assert!(matches!(e.root(), Node::Unary(Func::Neg, _)));
    }

    #[test]
    fn multiplication_binds_tighter_than_addition() {
        let e = Expr::parse("x + y*2", &["x", "y"]).unwrap();
        match e.root() {
            Node::Binary(BinOp::Add, l, r) => {
                assert_eq!(**l, Node::Var(0));
                assert!(matches!(**r, Node::Binary(BinOp::Mul, _, _)));
            }
            other => panic!("unexpected root {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = Expr::parse("3*q", &["x", "y"]).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                name: "q".into(),
                position: 2
            }
        );
    }

    #[test]
    fn evaluation_examples() {
        let e = Expr::parse("-log(cos(x))", &["x"]).unwrap();
        let at = |x: f64| e.eval(&HashMap::from([("x", x)])).unwrap();
        assert_eq!(at(0.0), 0.0);
        assert!((at(PI / 3.0) - 2f64.ln()).abs() < 1e-15);
        let s = Expr::parse("x + y*2", &["x", "y"]).unwrap();
        assert_eq!(s.eval(&HashMap::from([("x", 1.0), ("y", 2.0)])).unwrap(), 5.0);
    }

    #[test]
    fn derivative_examples() {
        let y = Expr::parse("y", &["y"]).unwrap().differentiate("y").unwrap();
        assert_eq!(y.eval_at(&[3.7]).unwrap(), 1.0);
        let e = Expr::parse("exp(2*y)", &["y"]).unwrap().differentiate("y").unwrap();
        assert_eq!(e.eval_at(&[0.0]).unwrap(), 2.0);
        let g = Expr::parse("-log(cos(x))", &["x"]).unwrap();
        let d = g.differentiate("x").unwrap();
        let x = PI / 4.0;
        let h = 1e-6;
        let fd = (g.eval_at(&[x + h]).unwrap() - g.eval_at(&[x - h]).unwrap()) / (2.0 * h);
        let v = d.eval_at(&[x]).unwrap();
        assert!((v - x.tan()).abs() < 1e-15);
        assert!((v - fd).abs() < 1e-8);
    }

    #[test]
    fn y_aliases_y1() {
        let e = Expr::parse("2*y", &["y1"]).unwrap();
        assert_eq!(e.eval_at(&[1.5]).unwrap(), 3.0);
        let f = Expr::parse("y1^2", &["x", "y"]).unwrap();
        assert_eq!(f.eval_at(&[0.0, 3.0]).unwrap(), 9.0);
        assert!(Expr::parse("y", &["y1", "y2"]).is_err());
    }

    #[test]
    fn log_of_negative_names_subexpression() {
        let e = Expr::parse("1 + log(x - 2)", &["x"]).unwrap();
        match e.eval_at(&[1.0]).unwrap_err() {
            EvalError::Domain { subexpr, .. } => assert_eq!(subexpr, "log(x - 2)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_binding_is_reported() {
        let e = Expr::parse("x*y", &["x", "y"]).unwrap();
        assert_eq!(
            e.eval(&HashMap::from([("x", 1.0)])).unwrap_err(),
            EvalError::Unbound("y".into())
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        for (text, pos) in [("2 x", 2), ("(x + 1", 6), ("x + * 2", 4), ("sin x", 4), ("1.2.3", 3)] {
            match Expr::parse(text, &["x"]) {
                Err(ParseError::Syntax { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
        assert_eq!(Expr::parse("   ", &["x"]).unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn precedence_of_power_and_negation() {
        let e = Expr::parse("-x^2", &["x"]).unwrap();
        assert_eq!(e.eval_at(&[3.0]).unwrap(), -9.0);
        let r = Expr::parse("2^3^2", &["x"]).unwrap();
        assert_eq!(r.eval_at(&[0.0]).unwrap(), 512.0);
        let n = Expr::parse("2^-1", &["x"]).unwrap();
        assert_eq!(n.eval_at(&[0.0]).unwrap(), 0.5);
        let s = Expr::parse("8/2/2 - 3 - 1", &["x"]).unwrap();
        assert_eq!(s.eval_at(&[0.0]).unwrap(), -2.0);
    }

    #[test]
    fn rebind_moves_slots() {
        let e = Expr::parse("y^2 + x", &["x", "y"]).unwrap();
        let r = e.rebind(&["y", "t", "x"]).unwrap();
        assert_eq!(r.eval_at(&[2.0, 0.0, 1.0]).unwrap(), 5.0);
        assert!(e.rebind(&["y"]).is_err());
    }
}
