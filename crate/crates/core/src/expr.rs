//! Infix expressions over an algebra: parsing and evaluation.
//!
//! Grammar (whitespace insignificant, `*` mandatory between factors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := uint | 'q' | 'alpha' | 'beta' | 'gamma' | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Products keep their written order - the algebra is noncommutative - and
//! evaluation normalizes through polynomial multiplication.  Division is
//! restricted to scalar divisors so printed rational and parametric
//! coefficients (`1/2*x`, `alpha/(q-1)*y`) read back exactly.

use num::BigInt;
use thiserror::Error;

use crate::algebra::AlgebraRef;
use crate::coeffs::{BigRat, CoeffError, Param};
use crate::ncpoly::{CommuteProvider, NcError, NcPoly, RewriteEngine};

/// Parse-time errors, with byte positions into the input.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    SyntaxError { pos: usize, message: String },
    #[error("unknown symbol '{name}' at byte {pos}")]
    UnknownSymbol { pos: usize, name: String },
}

/// Evaluation errors.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum EvalError {
    #[error("division requires a nonzero scalar divisor")]
    DivisorNotScalar,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Abstract syntax of an expression; products preserve written order.
#[derive(Clone, PartialEq, Debug)]
pub enum ExprAst {
    Integer(BigInt),
    Symbol(Param),
    GenX,
    GenY,
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
    Group(Box<ExprAst>),
}

#[derive(Clone, PartialEq, Debug)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let value = digits.parse::<BigInt>().map_err(|_| ParseError::SyntaxError {
                    pos: start,
                    message: format!("bad integer literal '{}'", digits),
                })?;
                out.push((start, Token::Int(value)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(ParseError::SyntaxError {
                    pos: i,
                    message: format!("unexpected character {:?}", other),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((_, Token::Plus)) => {
                    self.bump();
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some((_, Token::Minus)) => {
                    self.bump();
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some((_, Token::Star)) => {
                    self.bump();
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some((_, Token::Slash)) => {
                    self.bump();
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        if matches!(self.peek(), Some((_, Token::Minus))) {
            self.bump();
            return Ok(ExprAst::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if matches!(self.peek(), Some((_, Token::Caret))) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some((_, Token::Int(n))) => {
                    let e = u32::try_from(&n).map_err(|_| ParseError::SyntaxError {
                        pos,
                        message: format!("exponent {} out of range", n),
                    })?;
                    return Ok(ExprAst::Pow(Box::new(base), e));
                }
                _ => {
                    return Err(ParseError::SyntaxError {
                        pos,
                        message: "expected an unsigned integer exponent after '^'".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some((_, Token::Int(n))) => Ok(ExprAst::Integer(n)),
            Some((p, Token::Ident(name))) => match name.as_str() {
                "x" => Ok(ExprAst::GenX),
                "y" => Ok(ExprAst::GenY),
                other => Param::from_name(other)
                    .map(ExprAst::Symbol)
                    .ok_or(ParseError::UnknownSymbol { pos: p, name }),
            },
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(ExprAst::Group(Box::new(inner))),
                    _ => Err(ParseError::SyntaxError {
                        pos: self.here(),
                        message: "expected ')'".into(),
                    }),
                }
            }
            Some((p, t)) => Err(ParseError::SyntaxError {
                pos: p,
                message: format!("unexpected token {:?}", t),
            }),
            None => Err(ParseError::SyntaxError {
                pos,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses an expression into its syntax tree.
pub fn parse(text: &str) -> Result<ExprAst, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let ast = p.expr()?;
    if let Some((pos, t)) = p.peek() {
        return Err(ParseError::SyntaxError {
            pos: *pos,
            message: format!("trailing input starting with {:?}", t),
        });
    }
    Ok(ast)
}

/// Evaluates a tree over the algebra, multiplying through `provider`.
/// Parameter symbols take the algebra's own values, in every field mode.
pub fn eval(
    ast: &ExprAst,
    alg: &AlgebraRef,
    provider: &mut dyn CommuteProvider,
) -> Result<NcPoly, EvalError> {
    match ast {
        ExprAst::Integer(n) => {
            let c = alg.mode().embed_rat(&BigRat::from_integer(n.clone()))?;
            Ok(NcPoly::constant(alg, c)?)
        }
        ExprAst::Symbol(p) => {
            let c = match p {
                Param::Q => alg.q().clone(),
                Param::Alpha => alg.alpha().clone(),
                Param::Beta => alg.beta().clone(),
                Param::Gamma => alg.gamma().clone(),
            };
            Ok(NcPoly::constant(alg, c)?)
        }
        ExprAst::GenX => Ok(NcPoly::gen_x(alg)),
        ExprAst::GenY => Ok(NcPoly::gen_y(alg)),
        ExprAst::Neg(inner) => Ok(eval(inner, alg, provider)?.neg()),
        ExprAst::Add(a, b) => Ok(eval(a, alg, provider)?.add(&eval(b, alg, provider)?)?),
        ExprAst::Sub(a, b) => Ok(eval(a, alg, provider)?.sub(&eval(b, alg, provider)?)?),
        ExprAst::Mul(a, b) => {
            let lhs = eval(a, alg, provider)?;
            let rhs = eval(b, alg, provider)?;
            Ok(lhs.mul_with(&rhs, provider)?)
        }
        ExprAst::Div(a, b) => {
            let lhs = eval(a, alg, provider)?;
            let rhs = eval(b, alg, provider)?;
            let scalar = as_nonzero_scalar(&rhs).ok_or(EvalError::DivisorNotScalar)?;
            Ok(lhs.scalar_mul(&scalar.try_inv()?)?)
        }
        ExprAst::Pow(base, e) => {
            let b = eval(base, alg, provider)?;
            Ok(b.pow_with(*e, provider)?)
        }
        ExprAst::Group(inner) => eval(inner, alg, provider),
    }
}

fn as_nonzero_scalar(p: &NcPoly) -> Option<crate::coeffs::FieldElem> {
    if p.is_zero() || p.total_degree() != 0 {
        return None;
    }
    Some(p.coeff(0, 0))
}

/// Parses and evaluates with the rewriting engine.
pub fn parse_and_eval(text: &str, alg: &AlgebraRef) -> Result<NcPoly, EvalError> {
    let ast = parse(text)?;
    let mut engine = RewriteEngine::new(alg);
    eval(&ast, alg, &mut engine)
}

/// Exact rational from flag text: an optional sign, an integer, and an
/// optional `/denominator`.
pub fn parse_ratio(text: &str) -> Result<BigRat, String> {
    let t = text.trim();
    let (num_str, den_str) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = num_str
        .parse::<BigInt>()
        .map_err(|_| format!("bad numerator '{}'", num_str))?;
    let den = den_str
        .parse::<BigInt>()
        .map_err(|_| format!("bad denominator '{}'", den_str))?;
    if den == BigInt::from(0) {
        return Err("denominator must be nonzero".into());
    }
    Ok(BigRat::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraParams, ModelClass};
    use crate::coeffs::{FieldElem, FieldMode};
    use crate::ncpoly::Monomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn weyl() -> AlgebraRef {
        Arc::new(ModelClass::Weyl.params(FieldMode::Rational, &FieldMode::Rational.one()).unwrap())
    }

    fn run(text: &str, alg: &AlgebraRef) -> NcPoly {
        parse_and_eval(text, alg).unwrap()
    }

    #[test]
    fn relation_examples() {
        let w = weyl();
        assert_eq!(run("y*x", &w).to_string(), "x*y + 1");
        let comm = Arc::new(
            ModelClass::Commutative
                .params(FieldMode::Rational, &FieldMode::Rational.one())
                .unwrap(),
        );
        assert_eq!(run("(x+y)^2", &comm).to_string(), "x^2 + 2*x*y + y^2");
        let qgamma = Arc::new(
            AlgebraParams::new(
                FieldElem::symbol(Param::Q),
                FieldMode::Symbolic.zero(),
                FieldMode::Symbolic.zero(),
                FieldMode::Symbolic.one(),
            )
            .unwrap(),
        );
        assert_eq!(run("y^2*x", &qgamma).to_string(), "q^2*x*y^2 + (q+1)*y");
    }

    #[test]
    fn precedence_and_negation() {
        let w = weyl();
        assert_eq!(run("-x^2", &w), run("-(x^2)", &w));
        assert_eq!(run("2*x+3", &w).to_string(), "2*x + 3");
        assert_eq!(run("2-3-4", &w).to_string(), "-5");
        assert_eq!(run("x - - y", &w), run("x + y", &w));
        assert_eq!(run("2^3", &w).to_string(), "8");
        assert_eq!(run("x^2*y", &w).coeff(2, 1), FieldMode::Rational.one());
        // '/' is scalar division and associates left.
        assert_eq!(run("1/2*x", &w).coeff(1, 0), FieldMode::Rational.embed_rat(&BigRat::new(1.into(), 2.into())).unwrap());
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(
            parse("x +"),
            Err(ParseError::SyntaxError { pos: 3, .. })
        ));
        assert!(matches!(
            parse("x ! y"),
            Err(ParseError::SyntaxError { pos: 2, .. })
        ));
        assert!(matches!(
            parse("x + z"),
            Err(ParseError::UnknownSymbol { pos: 4, .. })
        ));
        assert!(matches!(
            parse("(x"),
            Err(ParseError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse("x ^ y"),
            Err(ParseError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse("x y"),
            Err(ParseError::SyntaxError { .. })
        ));
    }

    #[test]
    fn division_requires_scalars() {
        let w = weyl();
        assert!(matches!(
            parse_and_eval("x/y", &w),
            Err(EvalError::DivisorNotScalar)
        ));
        assert!(matches!(
            parse_and_eval("x/0", &w),
            Err(EvalError::DivisorNotScalar)
        ));
        assert_eq!(run("(x+y)/2", &w), run("1/2*x + 1/2*y", &w));
    }

    #[test]
    fn symbols_take_algebra_values() {
        // In a concrete algebra the parameter names evaluate to its values.
        let alg = Arc::new(
            AlgebraParams::new(
                FieldMode::Rational.from_i64(2),
                FieldMode::Rational.from_i64(3),
                FieldMode::Rational.from_i64(0),
                FieldMode::Rational.from_i64(5),
            )
            .unwrap(),
        );
        assert_eq!(run("q + alpha + beta + gamma", &alg).to_string(), "10");
    }

    fn random_poly<R: Rng>(alg: &AlgebraRef, rng: &mut R) -> NcPoly {
        let mode = alg.mode();
        let mut p = NcPoly::zero(alg);
        for _ in 0..rng.random_range(1..=4) {
            let a = rng.random_range(0..=3u32);
            let b = rng.random_range(0..=3u32);
            let c = match mode {
                FieldMode::Rational => {
                    let n = rng.random_range(-9i64..=9);
                    let d = rng.random_range(1i64..=4);
                    mode.embed_rat(&BigRat::new(n.into(), d.into())).unwrap()
                }
                FieldMode::Symbolic => {
                    // A small parametric coefficient with an occasional
                    // (q - 1) denominator.
                    let base = match rng.random_range(0..4) {
                        0 => FieldElem::symbol(Param::Q),
                        1 => FieldElem::symbol(Param::Alpha),
                        2 => FieldElem::symbol(Param::Beta),
                        _ => FieldElem::symbol(Param::Gamma),
                    };
                    let shift = mode.from_i64(rng.random_range(-3i64..=3));
                    let num = base.try_add(&shift).unwrap();
                    if rng.random_bool(0.3) {
                        let den = FieldElem::symbol(Param::Q)
                            .try_sub(&mode.one())
                            .unwrap();
                        num.try_div(&den).unwrap()
                    } else {
                        num
                    }
                }
                FieldMode::Prime(_) => mode.from_i64(rng.random_range(0i64..=6)),
            };
            if !c.is_zero() {
                p = p
                    .add(&NcPoly::monomial(alg, a, b, c).unwrap())
                    .unwrap();
            }
        }
        p
    }

    #[test]
    fn print_parse_round_trip() {
        let algebras: Vec<AlgebraRef> = vec![
            weyl(),
            Arc::new(AlgebraParams::generic()),
            Arc::new(
                ModelClass::QuantumPlane
                    .params(FieldMode::prime(7).unwrap(), &FieldMode::prime(7).unwrap().from_i64(2))
                    .unwrap(),
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
        for alg in &algebras {
            for _ in 0..200 {
                let p = random_poly(alg, &mut rng);
                let text = p.to_string();
                let back = parse_and_eval(&text, alg)
                    .unwrap_or_else(|e| panic!("'{}' failed: {}", text, e));
                assert_eq!(back, p, "round trip of '{}'", text);
            }
        }
    }

    #[test]
    fn ratio_flag_parsing() {
        assert_eq!(parse_ratio("3/4").unwrap(), BigRat::new(3.into(), 4.into()));
        assert_eq!(parse_ratio("-2").unwrap(), BigRat::from_integer((-2).into()));
        assert_eq!(parse_ratio(" 5 / 10 ").unwrap(), BigRat::new(1.into(), 2.into()));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("a").is_err());
    }

    #[test]
    fn ast_shape_preserves_order() {
        // y*x stays (y, x): the product node must not be commuted.
        let ast = parse("y*x").unwrap();
        assert_eq!(
            ast,
            ExprAst::Mul(Box::new(ExprAst::GenY), Box::new(ExprAst::GenX))
        );
        let w = weyl();
        let yx = run("y*x", &w);
        assert_eq!(yx.coeff(0, 0), FieldMode::Rational.one());
        let xy = run("x*y", &w);
        assert_eq!(xy.coeff(0, 0), FieldMode::Rational.zero());
        assert_eq!(yx.leading_monomial(), Some(Monomial::new(1, 1).unwrap()));
    }
}
