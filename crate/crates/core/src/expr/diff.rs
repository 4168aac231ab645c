use super::{BinOp, EvalError, Expr, Func, Node};

// Constructors that drop additive zeros and multiplicative ones. They keep
// derivative trees from exploding and avoid evaluating factors such as
// log(base) that a constant exponent never needs.

fn is_const(n: &Node, v: f64) -> bool {
    matches!(n, Node::Const(c) if *c == v)
}

fn add(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) {
        b
    } else if is_const(&b, 0.0) {
        a
    } else {
        Node::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }
}

fn sub(a: Node, b: Node) -> Node {
    if is_const(&b, 0.0) {
        a
    } else if is_const(&a, 0.0) {
        neg(b)
    } else {
        Node::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }
}

fn mul(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        Node::Const(0.0)
    } else if is_const(&a, 1.0) {
        b
    } else if is_const(&b, 1.0) {
        a
    } else {
        Node::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }
}

fn div(a: Node, b: Node) -> Node {
    if is_const(&a, 0.0) {
        Node::Const(0.0)
    } else if is_const(&b, 1.0) {
        a
    } else {
        Node::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        other => Node::Unary(Func::Neg, Box::new(other)),
    }
}

fn call(f: Func, a: Node) -> Node {
    Node::Unary(f, Box::new(a))
}

fn pow(a: Node, b: Node) -> Node {
    Node::Binary(BinOp::Pow, Box::new(a), Box::new(b))
}

fn derive(n: &Node, slot: usize) -> Node {
    match n {
        Node::Const(_) => Node::Const(0.0),
        Node::Var(s) => Node::Const(if *s == slot { 1.0 } else { 0.0 }),
        Node::Unary(f, a) => {
            let da = derive(a, slot);
            if is_const(&da, 0.0) {
                return Node::Const(0.0);
            }
            let u = (**a).clone();
            match f {
                Func::Neg => neg(da),
                Func::Sin => mul(call(Func::Cos, u), da),
                Func::Cos => neg(mul(call(Func::Sin, u), da)),
                Func::Tan => {
                    let t = call(Func::Tan, u);
                    mul(add(Node::Const(1.0), mul(t.clone(), t)), da)
                }
                Func::Exp => mul(call(Func::Exp, u), da),
                Func::Log => div(da, u),
                Func::Sqrt => div(da, mul(Node::Const(2.0), call(Func::Sqrt, u))),
                Func::Abs => mul(div(u.clone(), call(Func::Abs, u)), da),
            }
        }
        Node::Binary(op, a, b) => {
            let da = derive(a, slot);
            let db = derive(b, slot);
            let (u, v) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, v), mul(u, db)),
                BinOp::Div => {
                    if is_const(&db, 0.0) {
                        div(da, v)
                    } else {
                        sub(div(da, v.clone()), div(mul(u, db), mul(v.clone(), v)))
                    }
                }
                BinOp::Pow => {
                    if b.is_constant() {
                        // v·u^(v−1)·u'
                        let reduced = match &v {
                            Node::Const(c) => Node::Const(c - 1.0),
                            _ => sub(v.clone(), Node::Const(1.0)),
                        };
                        mul(mul(v, pow(u, reduced)), da)
                    } else {
                        // u^v·(v'·log u + v·u'/u)
                        let inner = add(
                            mul(db, call(Func::Log, u.clone())),
                            div(mul(v.clone(), da), u.clone()),
                        );
                        mul(pow(u, v), inner)
                    }
                }
            }
        }
    }
}

impl Expr {
    /// Exact symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Result<Expr, EvalError> {
        let slot = self
            .slot_of(var)
            .ok_or_else(|| EvalError::UnknownVariable(var.to_string()))?;
        Ok(Expr {
            root: derive(&self.root, slot),
            vars: self.vars.clone(),
        })
    }
}
