use std::collections::HashMap;

use super::print::Printer;
use super::{BinOp, EvalError, Expr, Func, Node};
use crate::scalar::Scalar;

impl Expr {
    /// Evaluates with named bindings. Every variable referenced by the tree
    /// must be bound (aliases count).
    pub fn eval(&self, bindings: &HashMap<&str, f64>) -> Result<f64, EvalError> {
        let mut values = Vec::with_capacity(self.vars.len());
        let used = self.used_slots();
        for (slot, name) in self.vars.iter().enumerate() {
            let v = bindings.get(name.as_str()).copied().or_else(|| {
                bindings
                    .iter()
                    .find(|(k, _)| self.slot_of(k) == Some(slot))
                    .map(|(_, v)| *v)
            });
            match v {
                Some(v) => values.push(v),
                None if used[slot] => return Err(EvalError::Unbound(name.clone())),
                None => values.push(f64::NAN),
            }
        }
        self.eval_at(&values)
    }

    /// Evaluates with values given positionally in declaration order.
    pub fn eval_at<S: Scalar>(&self, values: &[S]) -> Result<S, EvalError> {
        if values.len() != self.vars.len() {
            return Err(EvalError::Arity {
                expected: self.vars.len(),
                got: values.len(),
            });
        }
        self.eval_node(&self.root, values)
    }

    fn used_slots(&self) -> Vec<bool> {
        fn walk(n: &Node, used: &mut [bool]) {
            match n {
                Node::Const(_) => {}
                Node::Var(s) => used[*s] = true,
                Node::Unary(_, a) => walk(a, used),
                Node::Binary(_, a, b) => {
                    walk(a, used);
                    walk(b, used);
                }
            }
        }
        let mut used = vec![false; self.vars.len()];
        walk(&self.root, &mut used);
        used
    }

    fn domain(&self, node: &Node, reason: impl Into<String>) -> EvalError {
        EvalError::Domain {
            subexpr: Printer {
                node,
                vars: &self.vars,
            }
            .to_string(),
            reason: reason.into(),
        }
    }

    fn eval_node<S: Scalar>(&self, node: &Node, values: &[S]) -> Result<S, EvalError> {
        let out = match node {
            Node::Const(c) => return Ok(S::from_f64(*c)),
            Node::Var(s) => return Ok(values[*s]),
            Node::Unary(f, a) => {
                let u = self.eval_node(a, values)?;
                let uv = u.value();
                match f {
                    Func::Neg => -u,
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan(),
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if uv <= 0.0 || uv.is_nan() {
                            return Err(self.domain(node, format!("logarithm of {uv}")));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if uv < 0.0 || uv.is_nan() {
                            return Err(self.domain(node, format!("square root of {uv}")));
                        }
                        u.sqrt()
                    }
                    Func::Abs => u.abs(),
                }
            }
            Node::Binary(op, a, b) => {
                let l = self.eval_node(a, values)?;
                let r = self.eval_node(b, values)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r.value() == 0.0 {
                            return Err(self.domain(node, "division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        if b.is_constant() {
                            l.powc(r.value())
                        } else {
                            l.powf(r)
                        }
                    }
                }
            }
        };
        if !out.value().is_finite() {
            return Err(self.domain(node, format!("non-finite result {}", out.value())));
        }
        Ok(out)
    }
}
