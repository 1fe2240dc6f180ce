//! Recursive-descent parser for the space expression grammar.
//!
//! Whitespace-insensitive. Keywords are case-insensitive except for the
//! single-letter atom heads `l` (sequence space) and `L` (function space),
//! which the grammar distinguishes by case. Positions are 1-based character
//! offsets into the input.

use thiserror::Error;

use super::{AtomKind, SpaceExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid parameter at position {pos}: {msg}")]
    Domain { pos: usize, msg: String },
}

impl ParseError {
    fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    fn domain(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Domain {
            pos,
            msg: msg.into(),
        }
    }
}

/// Parse an expression; the entire input must be consumed.
pub fn parse(text: &str) -> Result<SpaceExpr, ParseError> {
    let mut cur = Cursor::new(text);
    let expr = cur.parse_expr()?;
    cur.skip_ws();
    if let Some(c) = cur.peek() {
        return Err(ParseError::syntax(
            cur.pos(),
            format!("unexpected trailing input starting at '{c}'"),
        ));
    }
    Ok(expr)
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor {
            chars: text.chars().collect(),
            i: 0,
        }
    }

    fn pos(&self) -> usize {
        self.i + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.i += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.i += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.i += 1;
                Ok(())
            }
            Some(c) => Err(ParseError::syntax(
                self.pos(),
                format!("expected '{want}', found '{c}'"),
            )),
            None => Err(ParseError::syntax(
                self.pos(),
                format!("expected '{want}', found end of input"),
            )),
        }
    }

    fn read_word(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos();
        let mut w = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            w.push(self.bump().unwrap());
        }
        if w.is_empty() {
            match self.peek() {
                Some(c) => Err(ParseError::syntax(
                    start,
                    format!("expected a space expression, found '{c}'"),
                )),
                None => Err(ParseError::syntax(
                    start,
                    "expected a space expression, found end of input",
                )),
            }
        } else {
            Ok((w, start))
        }
    }

    fn read_number(&mut self) -> Result<(f64, usize), ParseError> {
        self.skip_ws();
        let start = self.pos();
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        if self.peek() == Some('.') {
            s.push(self.bump().unwrap());
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
            }
        }
        if s.is_empty() || s == "." {
            return Err(ParseError::syntax(start, "expected a number"));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| ParseError::syntax(start, format!("malformed number \"{s}\"")))?;
        Ok((v, start))
    }

    /// num | "inf"
    fn read_pval(&mut self) -> Result<(f64, usize), ParseError> {
        self.skip_ws();
        let start = self.pos();
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            let (w, wpos) = self.read_word()?;
            if w.eq_ignore_ascii_case("inf") {
                Ok((f64::INFINITY, wpos))
            } else {
                Err(ParseError::syntax(
                    wpos,
                    format!("expected a number or \"inf\", found \"{w}\""),
                ))
            }
        } else if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.read_number()
        } else {
            Err(ParseError::syntax(start, "expected a number or \"inf\""))
        }
    }

    fn read_p_arg(&mut self) -> Result<f64, ParseError> {
        let (p, pos) = self.read_pval()?;
        if !(p >= 1.0) {
            return Err(ParseError::domain(pos, "p must be ≥ 1"));
        }
        Ok(p)
    }

    fn parse_expr(&mut self) -> Result<SpaceExpr, ParseError> {
        let (word, wpos) = self.read_word()?;
        // `l` / `L` keep their case; everything else is case-insensitive.
        if word == "l" {
            self.expect('(')?;
            let p = self.read_p_arg()?;
            self.expect(')')?;
            return Ok(SpaceExpr::Atom(AtomKind::Lp(p)));
        }
        if word == "L" {
            self.expect('(')?;
            let p = self.read_p_arg()?;
            self.expect(')')?;
            return Ok(SpaceExpr::Atom(AtomKind::Lp01(p)));
        }
        match word.to_ascii_lowercase().as_str() {
            "c0" => Ok(SpaceExpr::Atom(AtomKind::C0)),
            "c01" => Ok(SpaceExpr::Atom(AtomKind::C01)),
            "cksplit" => Ok(SpaceExpr::Atom(AtomKind::CKsplit)),
            "gurarii" => Ok(SpaceExpr::Atom(AtomKind::Gurarii)),
            "reals" => Ok(SpaceExpr::Atom(AtomKind::Reals)),
            "reflexive" => Ok(SpaceExpr::Atom(AtomKind::ReflexiveGeneric)),
            "xr" => {
                self.expect('(')?;
                let (r, rpos) = self.read_number()?;
                if !(r > 1.0) {
                    return Err(ParseError::domain(rpos, "r must be > 1"));
                }
                self.expect(')')?;
                Ok(SpaceExpr::Atom(AtomKind::Xr(r)))
            }
            "findim" => {
                self.expect('(')?;
                let (v, vpos) = self.read_number()?;
                if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                    return Err(ParseError::syntax(vpos, "expected a positive integer"));
                }
                if v < 1.0 {
                    return Err(ParseError::domain(vpos, "n must be ≥ 1"));
                }
                self.expect(')')?;
                Ok(SpaceExpr::Atom(AtomKind::FiniteDim(v as u32)))
            }
            "sum" => {
                self.expect('(')?;
                let p = self.read_p_arg()?;
                self.expect(',')?;
                let left = self.parse_expr()?;
                self.expect(',')?;
                let right = self.parse_expr()?;
                self.expect(')')?;
                Ok(SpaceExpr::SumP {
                    p,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
            "c0sum" => {
                self.expect('(')?;
                let family = self.parse_exprlist()?;
                self.expect(')')?;
                Ok(SpaceExpr::C0Sum(family))
            }
            "lpsum" => {
                self.expect('(')?;
                let (p, ppos) = self.read_pval()?;
                if !(p >= 1.0) {
                    return Err(ParseError::domain(ppos, "p must be ≥ 1"));
                }
                if p.is_infinite() {
                    return Err(ParseError::domain(ppos, "lpsum requires p < inf"));
                }
                self.expect(',')?;
                let family = self.parse_exprlist()?;
                self.expect(')')?;
                Ok(SpaceExpr::LpSum { p, family })
            }
            "dual" => {
                self.expect('(')?;
                let inner = self.parse_expr()?;
                self.expect(')')?;
                Ok(SpaceExpr::Dual(Box::new(inner)))
            }
            _ => Err(ParseError::syntax(
                wpos,
                format!("unknown space or constructor \"{word}\""),
            )),
        }
    }

    fn parse_exprlist(&mut self) -> Result<Vec<SpaceExpr>, ParseError> {
        let mut items = vec![self.parse_expr()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(',') {
                self.i += 1;
                items.push(self.parse_expr()?);
            } else {
                return Ok(items);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::AtomKind::*;
    use crate::dsl::SpaceExpr::{self, *};

    fn at(k: crate::dsl::AtomKind) -> SpaceExpr {
        Atom(k)
    }

    #[test]
    fn parses_atoms_and_constructors() {
        assert_eq!(parse("l(2)").unwrap(), at(Lp(2.0)));
        assert_eq!(parse("c0sum(l(2))").unwrap(), C0Sum(vec![at(Lp(2.0))]));
        assert_eq!(
            parse("sum(2, l(1), l(1))").unwrap(),
            SpaceExpr::sum_p(2.0, at(Lp(1.0)), at(Lp(1.0)))
        );
        assert_eq!(parse("dual(c0)").unwrap(), SpaceExpr::dual(at(C0)));
        assert_eq!(parse("l(inf)").unwrap(), at(Lp(f64::INFINITY)));
        assert_eq!(parse("L(2)").unwrap(), at(Lp01(2.0)));
        assert_eq!(parse("findim(7)").unwrap(), at(FiniteDim(7)));
        assert_eq!(
            parse("lpsum(1, l(2), xr(2))").unwrap(),
            LpSum {
                p: 1.0,
                family: vec![at(Lp(2.0)), at(Xr(2.0))]
            }
        );
    }

    #[test]
    fn whitespace_and_keyword_case_are_flexible() {
        assert_eq!(
            parse("  SUM( INF ,\tC0 , ReAlS )\n").unwrap(),
            SpaceExpr::sum_p(f64::INFINITY, at(C0), at(Reals))
        );
        assert_eq!(parse("XR(2)").unwrap(), at(Xr(2.0)));
        // The single-letter heads keep their case.
        assert_eq!(parse("l(3)").unwrap(), at(Lp(3.0)));
        assert_eq!(parse("L(3)").unwrap(), at(Lp01(3.0)));
    }

    #[test]
    fn domain_errors_with_position() {
        match parse("l(0.5)").unwrap_err() {
            ParseError::Domain { pos, msg } => {
                assert_eq!(pos, 3);
                assert_eq!(msg, "p must be ≥ 1");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(matches!(
            parse("xr(1)").unwrap_err(),
            ParseError::Domain { msg, .. } if msg == "r must be > 1"
        ));
        assert!(matches!(
            parse("xr(0.25)").unwrap_err(),
            ParseError::Domain { .. }
        ));
        assert!(matches!(
            parse("lpsum(inf, l(2))").unwrap_err(),
            ParseError::Domain { msg, .. } if msg == "lpsum requires p < inf"
        ));
        assert!(matches!(
            parse("findim(0)").unwrap_err(),
            ParseError::Domain { msg, .. } if msg == "n must be ≥ 1"
        ));
        assert!(matches!(
            parse("sum(0.3, c0, c0)").unwrap_err(),
            ParseError::Domain { msg, .. } if msg == "p must be ≥ 1"
        ));
    }

    #[test]
    fn syntax_errors_never_panic() {
        for bad in [
            "", "l(", "l)", "foo", "l(2))", "sum(2, c0)", "c0sum()", "xr(inf)", "l(2,3)",
            "dual", "findim(2.5)", "l(--3)", "sum(2 c0 c0)", "((", "l (2) extra",
        ] {
            let e = parse(bad).unwrap_err();
            assert!(matches!(e, ParseError::Syntax { .. } | ParseError::Domain { .. }));
        }
    }

    #[test]
    fn positions_are_one_based_char_offsets() {
        match parse("sum(2, l(1), l(0.25))").unwrap_err() {
            ParseError::Domain { pos, msg } => {
                assert_eq!(msg, "p must be ≥ 1");
                assert_eq!(pos, 16);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
