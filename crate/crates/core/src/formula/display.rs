use std::fmt::{self, Write};

use super::{FixKind, Formula};

const PREFIX_PREC: u8 = 5;

fn binary(f: &Formula) -> Option<(&'static str, u8, &Formula, &Formula)> {
    match f {
        Formula::Or(l, r) => Some(("||", 1, l, r)),
        Formula::And(l, r) => Some(("&&", 2, l, r)),
        Formula::Coprod(l, r) => Some(("(+)", 3, l, r)),
        Formula::Prod(l, r) => Some(("*", 4, l, r)),
        _ => None,
    }
}

/// Macro forms recognised on output. Only binders over reserved names are
/// folded back, so user-written fixpoints print as written.
enum Sugar<'a> {
    Tt,
    Ff,
    Prefix(&'static str, &'a Formula),
}

fn sugar(f: &Formula) -> Option<Sugar<'_>> {
    let (kind, x, body) = f.binder()?;
    if !x.is_reserved() {
        return None;
    }
    if matches!(body, Formula::Var(y) if y == x) {
        return Some(match kind {
            FixKind::Nu => Sugar::Tt,
            FixKind::Mu => Sugar::Ff,
        });
    }
    let is_x = |g: &Formula| matches!(g, Formula::Var(y) if y == x);
    match (kind, body) {
        (FixKind::Mu, Formula::Coprod(g, r)) if is_x(r) && !g.has_free(x) => {
            Some(Sugar::Prefix("P>0 ", g))
        }
        (FixKind::Nu, Formula::Prod(g, r)) if is_x(r) && !g.has_free(x) => {
            Some(Sugar::Prefix("P=1 ", g))
        }
        _ => None,
    }
}

/// `tail_open` is true when more input may follow this formula in the
/// enclosing context; a binder in that position must be parenthesised since
/// its body would otherwise swallow the rest.
fn write_formula(f: &Formula, out: &mut impl Write, min_prec: u8, tail_open: bool) -> fmt::Result {
    if let Some(s) = sugar(f) {
        return match s {
            Sugar::Tt => out.write_str("tt"),
            Sugar::Ff => out.write_str("ff"),
            Sugar::Prefix(tok, g) => {
                out.write_str(tok)?;
                write_formula(g, out, PREFIX_PREC, tail_open)
            }
        };
    }
    if let Some((tok, prec, l, r)) = binary(f) {
        let paren = prec < min_prec;
        let tail = !paren && tail_open;
        if paren {
            out.write_char('(')?;
        }
        write_formula(l, out, prec, true)?;
        write!(out, " {tok} ")?;
        write_formula(r, out, prec + 1, tail)?;
        if paren {
            out.write_char(')')?;
        }
        return Ok(());
    }
    match f {
        Formula::Var(x) => write!(out, "{x}"),
        Formula::Diamond(a, g) => {
            write!(out, "<{a}>")?;
            write_formula(g, out, PREFIX_PREC, tail_open)
        }
        Formula::Box(a, g) => {
            write!(out, "[{a}]")?;
            write_formula(g, out, PREFIX_PREC, tail_open)
        }
        Formula::Mu(x, g) | Formula::Nu(x, g) => {
            let kw = f.binder().unwrap().0.keyword();
            if tail_open {
                out.write_char('(')?;
            }
            write!(out, "{kw} {x}. ")?;
            write_formula(g, out, 0, false)?;
            if tail_open {
                out.write_char(')')?;
            }
            Ok(())
        }
        _ => unreachable!("binary connectives handled above"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, 0, false)
    }
}
