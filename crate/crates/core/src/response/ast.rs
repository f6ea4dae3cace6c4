//! Expression trees of the response language and their canonical printer.

use std::fmt;

/// Shape of a (sub)expression value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Vector,
    Matrix,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Scalar => "scalar",
            Shape::Vector => "vector",
            Shape::Matrix => "matrix",
        })
    }
}

/// Built-in symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Time,
    /// Body coordinate `x1..x3`, zero-based.
    Body(usize),
    /// Entry `F[i][j]`, zero-based.
    Entry(usize, usize),
    /// The deformation gradient `F`.
    Deformation,
    /// The 3×3 identity `I`.
    Identity,
}

impl Symbol {
    pub fn shape(self) -> Shape {
        match self {
            Symbol::Time | Symbol::Body(_) | Symbol::Entry(..) => Shape::Scalar,
            Symbol::Deformation | Symbol::Identity => Shape::Matrix,
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        let b = name.as_bytes();
        match name {
            "t" => Some(Symbol::Time),
            "F" => Some(Symbol::Deformation),
            "I" => Some(Symbol::Identity),
            _ if b.len() == 2 && b[0] == b'x' && (b'1'..=b'3').contains(&b[1]) => {
                Some(Symbol::Body((b[1] - b'1') as usize))
            }
            _ if b.len() == 3
                && b[0] == b'F'
                && (b'1'..=b'3').contains(&b[1])
                && (b'1'..=b'3').contains(&b[2]) =>
            {
                Some(Symbol::Entry((b[1] - b'1') as usize, (b[2] - b'1') as usize))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Time => f.write_str("t"),
            Symbol::Body(i) => write!(f, "x{}", i + 1),
            Symbol::Entry(i, j) => write!(f, "F{}{}", i + 1, j + 1),
            Symbol::Deformation => f.write_str("F"),
            Symbol::Identity => f.write_str("I"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    /// Result shape, or `None` if the operand shapes are not supported.
    pub fn result_shape(self, lhs: Shape, rhs: Shape) -> Option<Shape> {
        use Shape::*;
        match (self, lhs, rhs) {
            (BinOp::Add | BinOp::Sub, a, b) if a == b => Some(a),
            (BinOp::Mul, Scalar, s) | (BinOp::Mul, s, Scalar) => Some(s),
            (BinOp::Mul, Matrix, Matrix) => Some(Matrix),
            (BinOp::Mul, Matrix, Vector) => Some(Vector),
            (BinOp::Div, s, Scalar) => Some(s),
            (BinOp::Pow, Scalar, Scalar) => Some(Scalar),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Log,
    Tr,
    Det,
    Transpose,
    Matmul,
    Quad,
    Vec3,
    Dot,
}

impl Func {
    pub fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            "tr" => Func::Tr,
            "det" => Func::Det,
            "transpose" => Func::Transpose,
            "matmul" => Func::Matmul,
            "quad" => Func::Quad,
            "vec" => Func::Vec3,
            "dot" => Func::Dot,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
            Func::Tr => "tr",
            Func::Det => "det",
            Func::Transpose => "transpose",
            Func::Matmul => "matmul",
            Func::Quad => "quad",
            Func::Vec3 => "vec",
            Func::Dot => "dot",
        }
    }

    /// Argument shapes and result shape.
    pub fn signature(self) -> (&'static [Shape], Shape) {
        use Shape::*;
        match self {
            Func::Exp | Func::Sin | Func::Cos | Func::Sqrt | Func::Log => (&[Scalar], Scalar),
            Func::Tr | Func::Det => (&[Matrix], Scalar),
            Func::Transpose => (&[Matrix], Matrix),
            Func::Matmul => (&[Matrix, Matrix], Matrix),
            Func::Quad => (&[Vector, Matrix], Scalar),
            Func::Vec3 => (&[Scalar, Scalar, Scalar], Vector),
            Func::Dot => (&[Vector, Vector], Scalar),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Sym(Symbol),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// Shape of a well-formed expression.
    pub fn shape(&self) -> Shape {
        match self {
            Expr::Num(_) => Shape::Scalar,
            Expr::Sym(s) => s.shape(),
            Expr::Neg(e) => e.shape(),
            Expr::Bin(op, a, b) => op.result_shape(a.shape(), b.shape()).expect("type-checked"),
            Expr::Call(f, _) => f.signature().1,
        }
    }
}

/// Fully parenthesized; numbers use the shortest round-trip representation,
/// so printing then parsing reproduces the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
