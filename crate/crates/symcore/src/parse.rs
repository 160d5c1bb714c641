//! Expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? integer | '(' '-'? integer ')'
//! primary := integer | ident | ident '\''* '(' expr ')' | '(' expr ')'
//! ```
//!
//! `sqrt` and `ln` are built in. Other applications must name a declared
//! function; primes denote derivatives. Columns in errors are 0-based
//! character offsets.

use num_bigint::BigInt;

use crate::context::{Context, SymbolKind};
use crate::error::SymError;
use crate::expr::Expr;
use crate::poly::Q;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str) -> Result<Lexer> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(s.parse().unwrap()), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()'".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(SymError::Syntax {
                column: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

/// Tree with symbol positions kept for name resolution.
enum Raw {
    Num(Q),
    Sym(String, usize),
    Add(Vec<Raw>),
    Mul(Vec<Raw>),
    Pow(Box<Raw>, i64),
    Call {
        name: String,
        col: usize,
        order: u32,
        arg: Box<Raw>,
    },
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(SymError::Syntax {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek());
            self.error(format!("expected `{c}`, found {found}"))
        }
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Raw::Mul(vec![Raw::Num(Q::from_integer((-1).into())), t]));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Raw::Add(terms) })
    }

    fn term(&mut self) -> Result<Raw> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    factors.push(match self.unary()? {
                        Raw::Pow(b, k) => Raw::Pow(b, -k),
                        f => Raw::Pow(Box::new(f), -1),
                    });
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Raw::Mul(factors) })
    }

    fn unary(&mut self) -> Result<Raw> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                let inner = self.unary()?;
                Ok(Raw::Mul(vec![Raw::Num(Q::from_integer((-1).into())), inner]))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Raw> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.bump();
        }
        let k = match self.peek() {
            Tok::Int(k) => {
                let k: i64 = match k.try_into() {
                    Ok(k) => k,
                    Err(_) => return self.error("exponent too large"),
                };
                self.bump();
                k
            }
            other => {
                let found = describe(other);
                return self.error(format!("expected integer exponent, found {found}"));
            }
        };
        if paren {
            self.expect(')')?;
        }
        Ok(Raw::Pow(Box::new(base), if neg { -k } else { k }))
    }

    fn primary(&mut self) -> Result<Raw> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Raw::Num(Q::from_integer(n))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let mut order = 0;
                while *self.peek() == Tok::Op('\'') {
                    self.bump();
                    order += 1;
                }
                if *self.peek() == Tok::Op('(') {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(Raw::Call {
                        name,
                        col,
                        order,
                        arg: Box::new(arg),
                    })
                } else if order > 0 {
                    self.error("expected `(` after derivative primes")
                } else {
                    Ok(Raw::Sym(name, col))
                }
            }
            other => {
                let found = describe(&other);
                Err(SymError::Syntax {
                    column: col,
                    message: format!("expected an operand, found {found}"),
                })
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("`{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

fn resolve(raw: Raw, ctx: Option<&Context>) -> Result<Expr> {
    Ok(match raw {
        Raw::Num(q) => Expr::Num(q),
        Raw::Sym(name, col) => match ctx {
            None => Expr::Symbol(name),
            Some(ctx) => match ctx.resolve(&name) {
                Some((SymbolKind::Function, _)) | None => {
                    return Err(SymError::UnknownSymbol { name, column: col })
                }
                Some((_, canonical)) => Expr::Symbol(canonical),
            },
        },
        Raw::Add(ts) => Expr::Add(ts.into_iter().map(|t| resolve(t, ctx)).collect::<Result<_>>()?),
        Raw::Mul(fs) => Expr::Mul(fs.into_iter().map(|t| resolve(t, ctx)).collect::<Result<_>>()?),
        Raw::Pow(b, k) => Expr::Pow(Box::new(resolve(*b, ctx)?), k),
        Raw::Call { name, col, order, arg } => {
            let arg = Box::new(resolve(*arg, ctx)?);
            match (name.as_str(), order) {
                ("sqrt", 0) => Expr::Sqrt(arg),
                ("ln", 0) => Expr::Ln(arg),
                _ => {
                    let declared = ctx.is_none_or(|c| c.classify(&name) == Some(SymbolKind::Function));
                    if !declared {
                        return Err(SymError::UnknownSymbol { name, column: col });
                    }
                    Expr::Func { name, order, arg }
                }
            }
        }
    })
}

/// Parse `text`. Without a context every identifier is accepted as a
/// symbol and every application as a function.
pub fn parse(text: &str, ctx: Option<&Context>) -> Result<Expr> {
    let lexer = lex(text)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
    };
    let raw = p.expr()?;
    if *p.peek() != Tok::End {
        let found = describe(p.peek());
        return p.error(format!("unexpected {found}"));
    }
    resolve(raw, ctx)
}

impl Expr {
    /// Parse without name checking.
    pub fn parse(text: &str) -> Result<Expr> {
        parse(text, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbalanced_paren_column() {
        match Expr::parse("a/(v") {
            Err(SymError::Syntax { column, .. }) => assert_eq!(column, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_tree() {
        let e = Expr::parse("v^3/w^2").unwrap();
        let expect = Expr::Mul(vec![
            Expr::Pow(Box::new(Expr::Symbol("v".into())), 3),
            Expr::Pow(Box::new(Expr::Symbol("w".into())), -2),
        ]);
        assert_eq!(e, expect);
    }

    #[test]
    fn derivative_primes() {
        let e = Expr::parse("g11''(v)").unwrap();
        assert!(matches!(e, Expr::Func { order: 2, .. }));
    }
}
