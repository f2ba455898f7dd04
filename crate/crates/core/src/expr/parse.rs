//! Recursive-descent parser for the polynomial text grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := atom ('^' UINT)?
//! atom    := NUMBER | IDENT | '(' expr ')'
//! NUMBER  := DIGITS ('.' DIGITS?)? | '.' DIGITS
//! ```
//!
//! Division is only allowed by a nonzero constant, so `3/4*x` and `z*x/2`
//! are accepted while `x/y` is not. Decimal literals convert exactly.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::{ExprError, Polynomial, Rational};

/// Parses `text` into a polynomial over `variables`.
pub fn parse_polynomial(text: &str, variables: &[String]) -> Result<Polynomial, ExprError> {
    parse_polynomial_with(text, variables, &[])
}

/// Like [`parse_polynomial`], with named constants substituted exactly.
pub fn parse_polynomial_with(
    text: &str,
    variables: &[String],
    params: &[(String, Rational)],
) -> Result<Polynomial, ExprError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars: variables,
        params,
        end: text.chars().count() + 1,
    };
    let p = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ExprError::Syntax {
            position: tok.column,
            message: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(p)
}

/// Parses a rational literal: an optionally signed integer, decimal
/// (`-0.25`, `1.5e-3`) or fraction (`-3/4`).
pub fn parse_rational(text: &str) -> Result<Rational, ExprError> {
    let s = text.trim();
    let syntax = |message: &str| ExprError::Syntax {
        position: 1,
        message: format!("{message}: `{text}`"),
    };
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(syntax("empty number"));
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let n = decimal_to_rational(num).ok_or_else(|| syntax("bad numerator"))?;
        let d = decimal_to_rational(den).ok_or_else(|| syntax("bad denominator"))?;
        if d.is_zero() {
            return Err(syntax("zero denominator"));
        }
        n / d
    } else {
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = body[i + 1..].parse().map_err(|_| syntax("bad exponent"))?;
                (&body[..i], e)
            }
            None => (body, 0),
        };
        let m = decimal_to_rational(mantissa).ok_or_else(|| syntax("bad number"))?;
        let scale = Rational::from_integer(BigInt::from(10u32).pow(exponent.unsigned_abs()));
        if exponent >= 0 {
            m * scale
        } else {
            m / scale
        }
    };
    Ok(if negative { -value } else { value })
}

/// `"12.375"` to 12375/1000 exactly. Accepts `"12"`, `"12."` and `".5"`.
fn decimal_to_rational(s: &str) -> Option<Rational> {
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(Rational::new(numer, denom))
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(Rational, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            Self::Number(r, _) => format!("number `{r}`"),
            Self::Ident(s) => format!("identifier `{s}`"),
            Self::Plus => "`+`".into(),
            Self::Minus => "`-`".into(),
            Self::Star => "`*`".into(),
            Self::Slash => "`/`".into(),
            Self::Caret => "`^`".into(),
            Self::LParen => "`(`".into(),
            Self::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    /// 1-based character column.
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Token { kind, column });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let is_integer = !lit.contains('.');
            let value = decimal_to_rational(&lit).ok_or_else(|| ExprError::Syntax {
                position: column,
                message: format!("malformed number `{lit}`"),
            })?;
            tokens.push(Token {
                kind: TokenKind::Number(value, is_integer),
                column,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            return Err(ExprError::Syntax {
                position: column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    params: &'a [(String, Rational)],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next_kind_is(&self, kind: &TokenKind) -> bool {
        self.peek().is_some_and(|t| &t.kind == kind)
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            position: self.column(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.next_kind_is(&TokenKind::Plus) {
                self.pos += 1;
                acc = acc.add(&self.term()?)?;
            } else if self.next_kind_is(&TokenKind::Minus) {
                self.pos += 1;
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.next_kind_is(&TokenKind::Star) {
                self.pos += 1;
                acc = acc.mul(&self.unary()?)?;
            } else if self.next_kind_is(&TokenKind::Slash) {
                self.pos += 1;
                let column = self.column();
                let divisor = self.unary()?;
                let value = divisor
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| ExprError::Syntax {
                        position: column,
                        message: "division is only allowed by a nonzero constant".into(),
                    })?;
                acc = acc.scale(&value.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ExprError> {
        if self.next_kind_is(&TokenKind::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if self.next_kind_is(&TokenKind::Plus) {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, ExprError> {
        let base = self.atom()?;
        if !self.next_kind_is(&TokenKind::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Number(value, true)) => {
                let e = value
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.error("exponent too large"))?;
                self.pos += 1;
                e
            }
            Some(TokenKind::Number(_, false)) => {
                return Err(self.error("exponent must be a non-negative integer"))
            }
            Some(TokenKind::Minus) => return Err(self.error("negative exponents are not allowed")),
            _ => return Err(self.error("expected integer exponent after `^`")),
        };
        Ok(base.pow(exponent))
    }

    fn atom(&mut self) -> Result<Polynomial, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok.kind {
            TokenKind::Number(value, _) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.vars, value))
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                if self.vars.contains(&name) {
                    Polynomial::variable(self.vars, &name)
                } else if let Some((_, value)) = self.params.iter().find(|(n, _)| n == &name) {
                    Ok(Polynomial::constant(self.vars, value.clone()))
                } else {
                    Err(ExprError::UnknownVariable(name))
                }
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.next_kind_is(&TokenKind::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(self.error(format!("unexpected {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn unit_circle_terms() {
        let p = parse_polynomial("x^2 + y^2 - 1", &vars(&["x", "y"])).unwrap();
        let terms: Vec<_> = p.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        assert_eq!(terms.len(), 3);
        assert_eq!(p.coefficient(&[2, 0]), r(1, 1));
        assert_eq!(p.coefficient(&[0, 2]), r(1, 1));
        assert_eq!(p.coefficient(&[0, 0]), r(-1, 1));
    }

    #[test]
    fn undeclared_names_are_unknown() {
        let v = vars(&["x", "y"]);
        let err = parse_polynomial("-2*q*(x^2-y^2) - a", &v).unwrap_err();
        assert_eq!(err, ExprError::UnknownVariable("q".into()));

        let params = vec![("q".to_string(), r(1, 2)), ("a".to_string(), r(3, 1))];
        let p = parse_polynomial_with("-2*q*(x^2-y^2) - a", &v, &params).unwrap();
        assert_eq!(p, parse_polynomial("-x^2 + y^2 - 3", &v).unwrap());
    }

    #[test]
    fn negative_exponent_is_syntax_error() {
        let err = parse_polynomial("x^-1", &vars(&["x"])).unwrap_err();
        assert!(
            matches!(err, ExprError::Syntax { position: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let err = parse_polynomial("2x", &vars(&["x"])).unwrap_err();
        assert!(
            matches!(err, ExprError::Syntax { position: 2, .. }),
            "{err:?}"
        );
        assert!(parse_polynomial("(x)(x)", &vars(&["x"])).is_err());
    }

    #[test]
    fn decimals_are_exact() {
        let v = vars(&["x"]);
        let p = parse_polynomial("0.1*x + 2.5", &v).unwrap();
        assert_eq!(p.coefficient(&[1]), r(1, 10));
        assert_eq!(p.coefficient(&[0]), r(5, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("3/4").unwrap(), r(3, 4));
        assert_eq!(parse_rational("1.5e-3").unwrap(), r(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), r(200, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn division_by_constants_only() {
        let v = vars(&["x", "y", "z"]);
        let p = parse_polynomial("-y + z*x/2", &v).unwrap();
        assert_eq!(p.coefficient(&[1, 0, 1]), r(1, 2));
        assert!(parse_polynomial("x/y", &v).is_err());
        assert!(parse_polynomial("x/(1-1)", &v).is_err());
    }

    #[test]
    fn precedence() {
        let v = vars(&["x"]);
        assert_eq!(
            parse_polynomial("-x^2", &v).unwrap(),
            parse_polynomial("-(x^2)", &v).unwrap()
        );
        assert_eq!(
            parse_polynomial("2*(x+1)^2", &v).unwrap(),
            parse_polynomial("2*x^2 + 4*x + 2", &v).unwrap()
        );
        assert_eq!(
            parse_polynomial("1 - x - x", &v).unwrap(),
            parse_polynomial("1 - 2*x", &v).unwrap()
        );
    }

    #[test]
    fn unbalanced_and_truncated() {
        let v = vars(&["x"]);
        assert!(matches!(
            parse_polynomial("(x + 1", &v),
            Err(ExprError::Syntax { position: 7, .. })
        ));
        assert!(parse_polynomial("x +", &v).is_err());
        assert!(parse_polynomial("", &v).is_err());
        assert!(parse_polynomial("x $ 1", &v).is_err());
        assert!(parse_polynomial("x^1.5", &v).is_err());
    }
}
