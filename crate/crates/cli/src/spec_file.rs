//! The line-oriented `.alg` format.
//!
//! ```text
//! [algebra]
//! name = engel
//! layer = X1 X2
//! layer = Y
//! layer = Z
//! [X1,X2] = Y
//! [X1,Y] = Z
//!
//! [g0]
//! kind = conformal        # or full, explicit
//! condition = 1 0 0 -1    # explicit only: m*m coefficients, row-major
//!
//! [recipe]
//! factor = X2:x2 Y:y Z:z
//! factor = X1:x1
//!
//! [options]
//! max_k = 10
//! oracle_degree = 6
//! ```
//!
//! Coefficients are exact rationals: `[A,B] = 1/2 C - D`, `2*E`.

use carnot_core::derivations::GZeroConstraint;
use carnot_core::poly::parse_rational;
use carnot_core::{AlgebraSpec, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub algebra: AlgebraSpec,
    pub g0: GZeroConstraint,
    /// Factors of `(generator, coordinate)`; `None` means first kind.
    pub recipe: Option<Vec<Vec<(String, String)>>>,
    pub max_k: Option<usize>,
    pub oracle_degree: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Algebra,
    G0,
    Recipe,
    Options,
}

/// Characters of one line with 1-based column tracking.
struct Cursor<'a> {
    line: usize,
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, start_column: usize, text: &'a str) -> Self {
        let chars = text.chars().enumerate().map(|(i, c)| (start_column + i, c)).collect();
        Cursor { line, chars, pos: 0, text }
    }

    fn column(&self) -> usize {
        match self.chars.get(self.pos) {
            Some(&(col, _)) => col,
            None => self.chars.last().map_or(1, |&(col, _)| col + 1),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of line"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return Err(self.error(format!("expected a generator name, found `{c}`"))),
            None => return Err(self.error("expected a generator name, found end of line")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().map(|&(_, c)| c).collect())
    }

    /// An unsigned rational `p` or `p/q`, if one starts here.
    fn number(&mut self) -> Result<Option<Rational>, ParseError> {
        self.skip_ws();
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Ok(None);
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '/') {
            self.pos += 1;
        }
        let token: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let column = self.chars[start].0;
        parse_rational(&token).map(Some).ok_or(ParseError {
            line: self.line,
            column,
            message: format!("invalid rational `{token}`"),
        })
    }

    fn rest(&self) -> &'a str {
        let byte = self.text.char_indices().nth(self.pos).map_or(self.text.len(), |(b, _)| b);
        &self.text[byte..]
    }
}

type Terms = Vec<(Rational, String)>;

/// `Σ ±c·NAME`, or `0`.
fn parse_terms(cur: &mut Cursor) -> Result<Terms, ParseError> {
    let mut terms = Vec::new();
    if cur.at_end() {
        return Err(cur.error("expected bracket terms after `=`"));
    }
    let mut first = true;
    while !cur.at_end() {
        let mut sign = Rational::from_integer(1.into());
        match cur.peek() {
            Some('+') if !first => cur.pos += 1,
            Some('-') => {
                cur.pos += 1;
                sign = -sign;
            }
            Some(c) if !first => return Err(cur.error(format!("expected `+` or `-`, found `{c}`"))),
            _ => {}
        }
        first = false;
        cur.skip_ws();
        if cur.peek() == Some('-') {
            cur.pos += 1;
            sign = -sign;
        }
        let coeff = cur.number()?;
        cur.skip_ws();
        if cur.peek() == Some('*') {
            if coeff.is_none() {
                return Err(cur.error("`*` without a coefficient"));
            }
            cur.pos += 1;
        } else if let Some(c) = &coeff {
            if cur.at_end() && *c == Rational::from_integer(0.into()) && terms.is_empty() {
                return Ok(terms);
            }
        }
        let name = cur.ident()?;
        terms.push((sign * coeff.unwrap_or_else(|| Rational::from_integer(1.into())), name));
    }
    Ok(terms)
}

fn parse_bracket(cur: &mut Cursor) -> Result<(String, String, Terms), ParseError> {
    cur.expect('[')?;
    let left = cur.ident()?;
    cur.expect(',')?;
    let right = cur.ident()?;
    cur.expect(']')?;
    cur.expect('=')?;
    let terms = parse_terms(cur)?;
    Ok((left, right, terms))
}

fn parse_names(cur: &mut Cursor) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    while !cur.at_end() {
        names.push(cur.ident()?);
    }
    if names.is_empty() {
        return Err(cur.error("expected at least one generator name"));
    }
    Ok(names)
}

fn parse_rationals(cur: &mut Cursor) -> Result<Vec<Rational>, ParseError> {
    let mut out = Vec::new();
    while !cur.at_end() {
        let negative = cur.peek() == Some('-');
        if negative {
            cur.pos += 1;
        }
        match cur.number()? {
            Some(r) => out.push(if negative { -r } else { r }),
            None => return Err(cur.error("expected a rational number")),
        }
    }
    Ok(out)
}

fn parse_factor(cur: &mut Cursor) -> Result<Vec<(String, String)>, ParseError> {
    let mut out = Vec::new();
    while !cur.at_end() {
        let generator = cur.ident()?;
        cur.expect(':')?;
        let coordinate = cur.ident()?;
        out.push((generator, coordinate));
    }
    if out.is_empty() {
        return Err(cur.error("expected `GENERATOR:coordinate` pairs"));
    }
    Ok(out)
}

fn parse_unsigned<T: std::str::FromStr>(cur: &mut Cursor) -> Result<T, ParseError> {
    cur.skip_ws();
    let column = cur.column();
    let text = cur.rest().trim();
    text.parse().map_err(|_| ParseError {
        line: cur.line,
        column,
        message: format!("expected a nonnegative integer, found `{text}`"),
    })
}

pub fn parse(text: &str) -> Result<SpecFile, ParseError> {
    let mut section = Section::None;
    let mut name: Option<String> = None;
    let mut layers: Vec<Vec<String>> = Vec::new();
    let mut brackets = Vec::new();
    let mut kind: Option<(usize, usize, String)> = None;
    let mut conditions: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut factors = Vec::new();
    let mut max_k = None;
    let mut oracle_degree = None;
    let mut seen_algebra = false;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        let start_column = content.chars().count() - trimmed.chars().count() + 1;
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let header = match trimmed {
            "[algebra]" => Some(Section::Algebra),
            "[g0]" => Some(Section::G0),
            "[recipe]" => Some(Section::Recipe),
            "[options]" => Some(Section::Options),
            _ => None,
        };
        if let Some(h) = header {
            if h == Section::Algebra {
                seen_algebra = true;
            }
            section = h;
            continue;
        }
        let mut cur = Cursor::new(line, start_column, trimmed);
        if section == Section::Algebra && trimmed.starts_with('[') {
            brackets.push(parse_bracket(&mut cur)?);
            continue;
        }
        if section == Section::None {
            return Err(cur.error("content before the first section header"));
        }
        let key_column = cur.column();
        let key = cur.ident()?;
        cur.expect('=')?;
        let unknown = || ParseError {
            line,
            column: key_column,
            message: format!("unknown key `{key}` in this section"),
        };
        match (section, key.as_str()) {
            (Section::Algebra, "name") => {
                if name.is_some() {
                    return Err(ParseError { line, column: key_column, message: "`name` given twice".into() });
                }
                cur.skip_ws();
                let value = cur.rest().trim();
                if value.is_empty() {
                    return Err(cur.error("empty algebra name"));
                }
                name = Some(value.to_string());
            }
            (Section::Algebra, "layer") => layers.push(parse_names(&mut cur)?),
            (Section::G0, "kind") => {
                let column = {
                    cur.skip_ws();
                    cur.column()
                };
                let value = cur.ident()?;
                if !cur.at_end() {
                    return Err(cur.error("unexpected text after the kind"));
                }
                kind = Some((line, column, value));
            }
            (Section::G0, "condition") => conditions.push((line, parse_rationals(&mut cur)?)),
            (Section::Recipe, "factor") => factors.push(parse_factor(&mut cur)?),
            (Section::Options, "max_k") => max_k = Some(parse_unsigned(&mut cur)?),
            (Section::Options, "oracle_degree") => oracle_degree = Some(parse_unsigned(&mut cur)?),
            _ => return Err(unknown()),
        }
    }

    if !seen_algebra {
        return Err(ParseError { line: 1, column: 1, message: "missing [algebra] section".into() });
    }
    let name = name.ok_or(ParseError { line: 1, column: 1, message: "missing `name` in [algebra]".into() })?;
    let g0 = match kind {
        None => {
            if let Some((line, _)) = conditions.first() {
                return Err(ParseError { line: *line, column: 1, message: "`condition` needs `kind = explicit`".into() });
            }
            GZeroConstraint::Conformal
        }
        Some((line, column, k)) => match k.as_str() {
            "conformal" | "full" if !conditions.is_empty() => {
                return Err(ParseError {
                    line: conditions[0].0,
                    column: 1,
                    message: "`condition` needs `kind = explicit`".into(),
                })
            }
            "conformal" => GZeroConstraint::Conformal,
            "full" => GZeroConstraint::FullDerivations,
            "explicit" => GZeroConstraint::Explicit(conditions.into_iter().map(|(_, c)| c).collect()),
            other => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("unknown g0 kind `{other}`, expected conformal, full or explicit"),
                })
            }
        },
    };
    let mut algebra = AlgebraSpec::new(name);
    algebra.layers = layers;
    for (left, right, terms) in brackets {
        let refs: Vec<(Rational, &str)> = terms.iter().map(|(c, t)| (c.clone(), t.as_str())).collect();
        algebra = algebra.bracket(&left, &right, &refs);
    }
    Ok(SpecFile {
        algebra,
        g0,
        recipe: (!factors.is_empty()).then_some(factors),
        max_k,
        oracle_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use carnot_core::linalg::{int, rat};

    const ENGEL: &str = "\
# Engel
[algebra]
name = engel
layer = X1 X2
layer = Y
layer = Z
[X1,X2] = Y
[X1, Y] = Z

[recipe]
factor = X2:x2 Y:y Z:z
factor = X1:x1
";

    fn err(text: &str) -> (usize, usize) {
        let e = parse(text).unwrap_err();
        (e.line, e.column)
    }

    #[test]
    fn engel_file() {
        let spec = parse(ENGEL).unwrap();
        assert_eq!(spec.algebra.name, "engel");
        assert_eq!(spec.algebra.layers.len(), 3);
        assert_eq!(spec.algebra.brackets[1].terms, vec![(int(1), "Z".to_string())]);
        assert_eq!(spec.g0, GZeroConstraint::Conformal);
        let recipe = spec.recipe.unwrap();
        assert_eq!(recipe[1], vec![("X1".to_string(), "x1".to_string())]);
    }

    #[test]
    fn rational_terms() {
        let spec = parse("[algebra]\nname = t\nlayer = A B\nlayer = C D\n[A,B] = 1/2 C - 3*D + -2/4 C\n").unwrap();
        let terms = &spec.algebra.brackets[0].terms;
        assert_eq!(terms[0], (rat(1, 2), "C".into()));
        assert_eq!(terms[1], (int(-3), "D".into()));
        assert_eq!(terms[2].0, rat(-1, 2));
        let zero = parse("[algebra]\nname = t\nlayer = A B\n[A,B] = 0\n").unwrap();
        assert!(zero.algebra.brackets[0].terms.is_empty());
    }

    #[test]
    fn malformed_bracket_is_positioned() {
        assert_eq!(err("[algebra]\nname = e\nlayer = A B\n[A B] = C\n"), (4, 4));
        assert_eq!(err("[algebra]\nname = e\nlayer = A B\n  [A,B] = C D\n"), (4, 13));
        assert_eq!(err("[algebra]\nname = e\n[A,B] = 1/0 C\n"), (3, 9));
        assert_eq!(err("[algebra]\nname = e\n[A,B] =\n"), (3, 8));
    }

    #[test]
    fn sections_and_keys() {
        assert_eq!(err("name = e\n"), (1, 1));
        assert_eq!(err("[algebra]\nname = e\ncolour = red\n"), (3, 1));
        assert_eq!(err("[algebra]\nname = e\n[g0]\nkind = some\n"), (4, 8));
        assert_eq!(err("[algebra]\nname = e\n[options]\nmax_k = -1\n"), (4, 9));
        assert_eq!(err("[algebra]\nname = e\n[g0]\ncondition = 1 0\n"), (4, 1));
        assert_eq!(err("[algebra]\nlayer = A\n"), (1, 1));
        assert_eq!(err("[g0]\nkind = full\n"), (1, 1));
    }

    #[test]
    fn explicit_g0_and_options() {
        let text = "[algebra]\nname = h\nlayer = X Y\nlayer = T\n[X,Y] = T\n[g0]\nkind = explicit\ncondition = 1 0 0 -1\n[options]\nmax_k = 4\noracle_degree = 3\n";
        let spec = parse(text).unwrap();
        assert_eq!(spec.g0, GZeroConstraint::Explicit(vec![vec![int(1), int(0), int(0), int(-1)]]));
        assert_eq!((spec.max_k, spec.oracle_degree), (Some(4), Some(3)));
        assert_eq!(spec.recipe, None);
    }
}
