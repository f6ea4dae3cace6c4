use super::ast::{BinOp, Expr, Func, Symbol};
use super::jet::{DomainError, Jet};
use super::EvalPoint;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("component {component}: {error}")]
pub struct EvalError {
    pub component: usize,
    pub error: DomainError,
}

type Mat = [[Jet; 3]; 3];
type Vec3 = [Jet; 3];

#[derive(Clone, Copy)]
enum Value {
    S(Jet),
    V(Vec3),
    M(Mat),
}

pub(super) struct Env {
    t: Jet,
    x: [Jet; 3],
    f: Mat,
}

const ZERO: Jet = Jet::constant(0.0);

fn mat_from(fun: impl Fn(usize, usize) -> Jet) -> Mat {
    [
        [fun(0, 0), fun(0, 1), fun(0, 2)],
        [fun(1, 0), fun(1, 1), fun(1, 2)],
        [fun(2, 0), fun(2, 1), fun(2, 2)],
    ]
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    mat_from(|i, j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
}

fn matvec(a: &Mat, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

fn dot(u: &Vec3, v: &Vec3) -> Jet {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn det(a: &Mat) -> Jet {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl Env {
    pub(super) fn new(p: &EvalPoint) -> Self {
        Self {
            t: Jet::variable(p.t, 0),
            x: [0, 1, 2].map(|k| Jet::variable(p.x[k], 1 + k)),
            f: mat_from(|i, j| Jet::variable(p.f[(i, j)], 4 + 3 * i + j)),
        }
    }

    pub(super) fn scalar(&self, expr: &Expr, component: usize) -> Result<Jet, EvalError> {
        let wrap = |error| EvalError { component, error };
        match self.eval(expr).map_err(wrap)? {
            Value::S(j) if j.is_finite() => Ok(j),
            Value::S(_) => Err(wrap(DomainError::NonFinite)),
            _ => unreachable!("components are type-checked scalars"),
        }
    }

    fn eval(&self, expr: &Expr) -> Result<Value, DomainError> {
        Ok(match expr {
            Expr::Num(v) => Value::S(Jet::constant(*v)),
            Expr::Sym(sym) => match *sym {
                Symbol::Time => Value::S(self.t),
                Symbol::Body(k) => Value::S(self.x[k]),
                Symbol::Entry(i, j) => Value::S(self.f[i][j]),
                Symbol::Deformation => Value::M(self.f),
                Symbol::Identity => Value::M(mat_from(|i, j| Jet::constant(if i == j { 1.0 } else { 0.0 }))),
            },
            Expr::Neg(e) => match self.eval(e)? {
                Value::S(a) => Value::S(-a),
                Value::V(v) => Value::V(v.map(|a| -a)),
                Value::M(m) => Value::M(m.map(|row| row.map(|a| -a))),
            },
            Expr::Bin(op, a, b) => self.binary(*op, self.eval(a)?, self.eval(b)?)?,
            Expr::Call(func, args) => {
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                self.call(*func, &vals)?
            }
        })
    }

    fn binary(&self, op: BinOp, a: Value, b: Value) -> Result<Value, DomainError> {
        use Value::*;
        Ok(match (op, a, b) {
            (BinOp::Add, S(x), S(y)) => S(x + y),
            (BinOp::Add, V(x), V(y)) => V([0, 1, 2].map(|i| x[i] + y[i])),
            (BinOp::Add, M(x), M(y)) => M(mat_from(|i, j| x[i][j] + y[i][j])),
            (BinOp::Sub, S(x), S(y)) => S(x - y),
            (BinOp::Sub, V(x), V(y)) => V([0, 1, 2].map(|i| x[i] - y[i])),
            (BinOp::Sub, M(x), M(y)) => M(mat_from(|i, j| x[i][j] - y[i][j])),
            (BinOp::Mul, S(x), S(y)) => S(x * y),
            (BinOp::Mul, S(s), V(v)) | (BinOp::Mul, V(v), S(s)) => V(v.map(|a| s * a)),
            (BinOp::Mul, S(s), M(m)) | (BinOp::Mul, M(m), S(s)) => M(m.map(|row| row.map(|a| s * a))),
            (BinOp::Mul, M(x), M(y)) => M(matmul(&x, &y)),
            (BinOp::Mul, M(x), V(v)) => V(matvec(&x, &v)),
            (BinOp::Div, S(x), S(y)) => S(x.checked_div(y)?),
            (BinOp::Div, V(v), S(s)) => {
                let mut out = [ZERO; 3];
                for i in 0..3 {
                    out[i] = v[i].checked_div(s)?;
                }
                V(out)
            }
            (BinOp::Div, M(m), S(s)) => {
                let mut out = [[ZERO; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        out[i][j] = m[i][j].checked_div(s)?;
                    }
                }
                M(out)
            }
            (BinOp::Pow, S(x), S(y)) => S(x.pow(y)?),
            _ => unreachable!("operands are type-checked"),
        })
    }

    fn call(&self, func: Func, args: &[Value]) -> Result<Value, DomainError> {
        use Value::*;
        Ok(match (func, args) {
            (Func::Exp, [S(a)]) => S(a.exp()),
            (Func::Sin, [S(a)]) => S(a.sin()),
            (Func::Cos, [S(a)]) => S(a.cos()),
            (Func::Sqrt, [S(a)]) => S(a.sqrt()?),
            (Func::Log, [S(a)]) => S(a.ln()?),
            (Func::Tr, [M(m)]) => S(m[0][0] + m[1][1] + m[2][2]),
            (Func::Det, [M(m)]) => S(det(m)),
            (Func::Transpose, [M(m)]) => M(mat_from(|i, j| m[j][i])),
            (Func::Matmul, [M(a), M(b)]) => M(matmul(a, b)),
            (Func::Quad, [V(v), M(m)]) => S(dot(v, &matvec(m, v))),
            (Func::Vec3, [S(a), S(b), S(c)]) => V([*a, *b, *c]),
            (Func::Dot, [V(u), V(v)]) => S(dot(u, v)),
            _ => unreachable!("calls are type-checked"),
        })
    }
}
