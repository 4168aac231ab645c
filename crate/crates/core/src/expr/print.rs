use std::fmt;

use super::{BinOp, Expr, Func, Node};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(n: &Node) -> u8 {
    match n {
        Node::Const(c) if c.is_sign_negative() => PREC_NEG,
        Node::Const(_) | Node::Var(_) => PREC_ATOM,
        Node::Unary(Func::Neg, _) => PREC_NEG,
        Node::Unary(..) => PREC_ATOM,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Node::Binary(BinOp::Pow, ..) => PREC_POW,
    }
}

pub(super) struct Printer<'a> {
    pub node: &'a Node,
    pub vars: &'a [String],
}

impl Printer<'_> {
    fn sub<'b>(&'b self, node: &'b Node) -> Printer<'b> {
        Printer {
            node,
            vars: self.vars,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, node: &Node, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.sub(node))
        } else {
            write!(f, "{}", self.sub(node))
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            // negative literals print like a negated literal so that
            // print -> parse -> print is stable
            Node::Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(s) => f.write_str(&self.vars[*s]),
            Node::Unary(Func::Neg, a) => {
                f.write_str("-")?;
                self.wrapped(f, a, precedence(a) <= PREC_NEG)
            }
            Node::Unary(func, a) => write!(f, "{}({})", func.name(), self.sub(a)),
            Node::Binary(op, a, b) => {
                let p = precedence(self.node);
                let (lp, rp) = if *op == BinOp::Pow {
                    (precedence(a) <= p, precedence(b) < p)
                } else {
                    (precedence(a) < p, precedence(b) <= p)
                };
                self.wrapped(f, a, lp)?;
                if *op == BinOp::Pow {
                    f.write_str("^")?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                self.wrapped(f, b, rp)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            node: &self.root,
            vars: &self.vars,
        }
        .fmt(f)
    }
}
