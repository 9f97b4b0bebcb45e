//! Parsing of element arguments: `2*a-1+1/2*a-2`, `w:E11`, `a-1@z1,a-1@z2`.

use mosva_core::exact_laurent::scalar::parse_scalar;
use mosva_core::graded::{GradedSpace, Vector};
use mosva_core::structures::{Ctx, Elem, Sp};
use mosva_core::Error;

/// A linear combination of basis labels. Terms are separated by `+` and
/// carry an optional `coefficient*` prefix.
pub fn parse_combination(space: &GradedSpace, text: &str) -> Result<Vector, Error> {
    let mut v = Vector::zero();
    let mut any = false;
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {text:?}")));
        }
        let (coeff, label) = match term.split_once('*') {
            Some((c, l)) => (parse_scalar(c)?, l.trim()),
            None => (parse_scalar("1")?, term),
        };
        let i = match space.index_of(label) {
            Ok(i) => i,
            Err(e) => match label.strip_suffix('\'') {
                Some(base) => space.index_of(base).map_err(|_| e)?,
                None => return Err(e),
            },
        };
        v.add_scaled(&Vector::basis(i), &coeff);
        any = true;
    }
    if !any {
        return Err(Error::Parse("empty element".into()));
    }
    Ok(v)
}

/// An element with an optional `v:` or `w:` space prefix.
pub fn parse_elem(ctx: &Ctx, text: &str, default: Sp) -> Result<Elem, Error> {
    let t = text.trim();
    let (sp, body) = if let Some(rest) = t.strip_prefix("v:") {
        (Sp::V, rest)
    } else if let Some(rest) = t.strip_prefix("w:") {
        (Sp::W, rest)
    } else {
        (default, t)
    };
    let space = ctx.space(sp)?;
    Ok(Elem { sp, vec: parse_combination(space, body)? })
}

/// `u1@z1,u2@z2,...`; operators default to the algebra.
pub fn parse_ops(ctx: &Ctx, text: &str) -> Result<Vec<(Elem, String)>, Error> {
    text.split(',')
        .map(|item| {
            let (u, var) = item
                .rsplit_once('@')
                .ok_or_else(|| Error::Parse(format!("operator {item:?} needs the form element@variable")))?;
            let var = var.trim();
            if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("invalid variable name {var:?}")));
            }
            Ok((parse_elem(ctx, u, Sp::V)?, var.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use mosva_core::exact_laurent::scalar::{int, ratio};

    fn space() -> GradedSpace {
        GradedSpace::new(vec![("1".into(), int(0)), ("a-1".into(), int(1)), ("a-1a-1".into(), int(2))], None).unwrap()
    }

    #[test]
    fn combinations() {
        let s = space();
        let v = parse_combination(&s, "2*a-1 + -1/2*a-1a-1+1").unwrap();
        assert_eq!(v.get(1), int(2));
        assert_eq!(v.get(2), ratio(-1, 2));
        assert_eq!(v.get(0), int(1));
        assert_eq!(parse_combination(&s, "a-1'").unwrap(), Vector::basis(1));
        assert!(parse_combination(&s, "a-2").is_err());
        assert!(parse_combination(&s, "1/0*a-1").is_err());
        assert!(parse_combination(&s, "a-1+").is_err());
    }
}
