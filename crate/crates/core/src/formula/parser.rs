use super::{is_identifier, Formula, FormulaError, FreshNames, Label, VarName, KEYWORDS, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Mu,
    Nu,
    Tt,
    Ff,
    Dot,
    LParen,
    RParen,
    AndAnd,
    OrOr,
    Star,
    Coprod,
    Diamond(String),
    Box(String),
    Not,
    Positive,
    AlmostSure,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            t => format!("{t:?}"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                let line = trimmed.find('\n').map_or(trimmed.len(), |i| i + 1);
                self.pos += line;
            } else {
                return;
            }
        }
    }

    fn ident(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphanumeric() || c == '_' || (c == '\'' && i > 0))
            })
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        &rest[..len]
    }

    /// `<a>` or `[a]`, with the opening bracket already at `self.pos`.
    fn label(&mut self, close: char) -> Result<String, FormulaError> {
        let start = self.pos;
        self.pos += 1;
        self.skip_trivia();
        let name = self.ident();
        if !is_identifier(name) {
            return self.err(start, "expected a label");
        }
        self.skip_trivia();
        if !self.rest().starts_with(close) {
            return self.err(self.pos, format!("expected `{close}`"));
        }
        self.pos += 1;
        Ok(name.to_string())
    }

    fn next(&mut self) -> Result<(usize, Tok), FormulaError> {
        self.skip_trivia();
        let start = self.pos;
        let rest = self.rest();
        let Some(c) = rest.chars().next() else {
            return Ok((start, Tok::Eof));
        };
        let fixed: &[(&str, Tok)] = &[
            ("(+)", Tok::Coprod),
            ("&&", Tok::AndAnd),
            ("||", Tok::OrOr),
            ("P>0", Tok::Positive),
            ("P=1", Tok::AlmostSure),
        ];
        for (text, tok) in fixed {
            if rest.starts_with(text) {
                self.pos += text.len();
                return Ok((start, tok.clone()));
            }
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            '!' => Tok::Not,
            '<' => return Ok((start, Tok::Diamond(self.label('>')?))),
            '[' => return Ok((start, Tok::Box(self.label(']')?))),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let word = self.ident();
                let tok = match word {
                    "mu" => Tok::Mu,
                    "nu" => Tok::Nu,
                    "tt" => Tok::Tt,
                    "ff" => Tok::Ff,
                    w => Tok::Ident(w.to_string()),
                };
                return Ok((start, tok));
            }
            c => return self.err(start, format!("unexpected character `{c}`")),
        };
        self.pos += c.len_utf8();
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(usize, Tok)>,
    fresh: FreshNames,
}

#[derive(Clone, Copy)]
enum BinOp {
    Or,
    And,
    Coprod,
    Prod,
}

impl BinOp {
    fn from_tok(t: &Tok) -> Option<Self> {
        match t {
            Tok::OrOr => Some(BinOp::Or),
            Tok::AndAnd => Some(BinOp::And),
            Tok::Coprod => Some(BinOp::Coprod),
            Tok::Star => Some(BinOp::Prod),
            _ => None,
        }
    }

    fn prec(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Coprod => 3,
            BinOp::Prod => 4,
        }
    }

    fn build(self, l: Formula, r: Formula) -> Formula {
        match self {
            BinOp::Or => Formula::or(l, r),
            BinOp::And => Formula::and(l, r),
            BinOp::Coprod => Formula::coprod(l, r),
            BinOp::Prod => Formula::prod(l, r),
        }
    }
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<&(usize, Tok), FormulaError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<(usize, Tok), FormulaError> {
        self.peek()?;
        Ok(self.peeked.take().unwrap())
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        let (pos, tok) = self.bump()?;
        if tok == want {
            Ok(())
        } else {
            Err(FormulaError::Syntax {
                pos,
                msg: format!("expected {}, found {}", want.describe(), tok.describe()),
            })
        }
    }

    fn user_var(pos: usize, name: &str) -> Result<VarName, FormulaError> {
        if name.starts_with(RESERVED_PREFIX) {
            return Err(FormulaError::Syntax {
                pos,
                msg: format!("identifiers starting with `{RESERVED_PREFIX}` are reserved"),
            });
        }
        debug_assert!(!KEYWORDS.contains(&name));
        VarName::new(name).map_err(|_| FormulaError::Syntax {
            pos,
            msg: format!("invalid variable `{name}`"),
        })
    }

    fn expr(&mut self, min_prec: u8) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while let Some(op) = BinOp::from_tok(&self.peek()?.1) {
            if op.prec() < min_prec {
                break;
            }
            self.bump()?;
            let rhs = self.expr(op.prec() + 1)?;
            lhs = op.build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let (pos, tok) = self.bump()?;
        match tok {
            Tok::Not => {
                let g = self.unary()?;
                g.negate().map_err(|e| match e {
                    FormulaError::OpenNegation(vars) => FormulaError::Syntax {
                        pos,
                        msg: format!("`!` applied to a formula with free variables: {vars}"),
                    },
                    e => e,
                })
            }
            Tok::Diamond(a) => Ok(Formula::Diamond(Label::new(&a)?, Box::new(self.unary()?))),
            Tok::Box(a) => Ok(Formula::Box(Label::new(&a)?, Box::new(self.unary()?))),
            Tok::Positive | Tok::AlmostSure => {
                // The binder is allocated before its operand so that names
                // follow pre-order.
                let x = self.fresh.fresh();
                let g = self.unary()?;
                Ok(if tok == Tok::Positive {
                    Formula::mu(&x, Formula::coprod(g, Formula::var(&x)))
                } else {
                    Formula::nu(&x, Formula::prod(g, Formula::var(&x)))
                })
            }
            Tok::Mu | Tok::Nu => {
                let (vpos, vtok) = self.bump()?;
                let Tok::Ident(name) = vtok else {
                    return Err(FormulaError::Syntax {
                        pos: vpos,
                        msg: format!("expected a variable after binder, found {}", vtok.describe()),
                    });
                };
                let x = Self::user_var(vpos, &name)?;
                self.expect(Tok::Dot)?;
                let body = self.expr(0)?;
                Ok(if tok == Tok::Mu {
                    Formula::Mu(x, Box::new(body))
                } else {
                    Formula::Nu(x, Box::new(body))
                })
            }
            Tok::Tt => Ok(Formula::tt(&mut self.fresh)),
            Tok::Ff => Ok(Formula::ff(&mut self.fresh)),
            Tok::Ident(name) => Ok(Formula::Var(Self::user_var(pos, &name)?)),
            Tok::LParen => {
                let g = self.expr(0)?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            t => Err(FormulaError::Syntax {
                pos,
                msg: format!("expected a formula, found {}", t.describe()),
            }),
        }
    }
}

/// Parse the concrete syntax, expanding `tt`, `ff`, `P>0`, `P=1` and `!`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        lexer: Lexer { src: text, pos: 0 },
        peeked: None,
        fresh: FreshNames::new(),
    };
    let f = p.expr(0)?;
    let (pos, tok) = p.bump()?;
    if tok != Tok::Eof {
        return Err(FormulaError::Syntax {
            pos,
            msg: format!("unexpected {}", tok.describe()),
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VarName {
        VarName::new(s).unwrap()
    }

    fn a() -> Label {
        Label::new("a").unwrap()
    }

    #[test]
    fn tt_expands_to_trivial_gfp() {
        let x0 = VarName::reserved(0);
        assert_eq!(parse_formula("tt").unwrap(), Formula::nu(&x0, Formula::var(&x0)));
        assert_eq!(parse_formula("ff").unwrap(), Formula::mu(&x0, Formula::var(&x0)));
    }

    #[test]
    fn intro_formula_h() {
        let f = parse_formula("mu X. (<a><a>tt (+) X)").unwrap();
        let tt = Formula::nu(&VarName::reserved(0), Formula::var(&VarName::reserved(0)));
        let expected = Formula::mu(
            &v("X"),
            Formula::coprod(
                Formula::diamond(&a(), Formula::diamond(&a(), tt)),
                Formula::var(&v("X")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn positive_threshold_macro() {
        let f = parse_formula("P>0 <a>tt").unwrap();
        let x0 = VarName::reserved(0);
        let x1 = VarName::reserved(1);
        let expected = Formula::mu(
            &x0,
            Formula::coprod(
                Formula::diamond(&a(), Formula::nu(&x1, Formula::var(&x1))),
                Formula::var(&x0),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("A || B && C (+) D * E").unwrap();
        let expected = Formula::or(
            Formula::var(&v("A")),
            Formula::and(
                Formula::var(&v("B")),
                Formula::coprod(
                    Formula::var(&v("C")),
                    Formula::prod(Formula::var(&v("D")), Formula::var(&v("E"))),
                ),
            ),
        );
        assert_eq!(f, expected);
        let left = parse_formula("A && B && C").unwrap();
        assert_eq!(
            left,
            Formula::and(
                Formula::and(Formula::var(&v("A")), Formula::var(&v("B"))),
                Formula::var(&v("C"))
            )
        );
    }

    #[test]
    fn binder_extends_right() {
        let f = parse_formula("A && mu X. X || B").unwrap();
        let expected = Formula::and(
            Formula::var(&v("A")),
            Formula::mu(&v("X"), Formula::or(Formula::var(&v("X")), Formula::var(&v("B")))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn prefix_binds_tightest() {
        let f = parse_formula("<a>X * Y").unwrap();
        assert_eq!(
            f,
            Formula::prod(Formula::diamond(&a(), Formula::var(&v("X"))), Formula::var(&v("Y")))
        );
    }

    #[test]
    fn comments_and_whitespace() {
        let f = parse_formula("# leading comment\n < a > X # trailing\n").unwrap();
        assert_eq!(f, Formula::diamond(&a(), Formula::var(&v("X"))));
    }

    #[test]
    fn negation_desugars() {
        assert_eq!(
            parse_formula("!<a>tt").unwrap(),
            parse_formula("[a]ff").unwrap()
        );
    }

    #[test]
    fn negation_of_open_formula_fails() {
        let err = parse_formula("mu X. !X").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { pos: 6, .. }), "{err:?}");
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_formula("_v0").is_err());
        assert!(parse_formula("mu _v1. _v1").is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_formula("X && ") {
            Err(FormulaError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("(X").is_err());
        assert!(parse_formula("X Y").is_err());
        assert!(parse_formula("mu . X").is_err());
        assert!(parse_formula("<>X").is_err());
        assert!(parse_formula("X $ Y").is_err());
    }

    #[test]
    fn p_prefix_identifier_is_still_a_variable() {
        assert_eq!(parse_formula("P").unwrap(), Formula::var(&v("P")));
        assert_eq!(parse_formula("Pq").unwrap(), Formula::var(&v("Pq")));
    }
}
