//! Canonical text form of [`HermPoly`].
//!
//! Terms are printed in graded-lexicographic order (highest degree first) and
//! joined with ` + `. Each term is a parenthesised coefficient in `re+im*i`
//! form followed by its variable powers, e.g. `(0+2*i)*z1^2*chi1^2 + (1+0*i)*tau`.
//! Variables are `z1..zn`, `chi1..chin`, `w`, `tau`. The zero polynomial is `0`.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use super::{GRat, HermPoly, PolyError, Var};

impl fmt::Display for HermPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let n = self.arity();
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (slot, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let name = var_name(n, slot);
                if p == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

fn var_name(n: usize, slot: usize) -> String {
    if slot < n {
        format!("z{}", slot + 1)
    } else if slot < 2 * n {
        format!("chi{}", slot - n + 1)
    } else if slot == 2 * n {
        "w".to_string()
    } else {
        "tau".to_string()
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn err(&self, what: &str) -> PolyError {
        PolyError::Parse(format!("{what} at byte {}", self.pos))
    }
    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }
    fn uint(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected exponent"))
    }
}

fn parse_var(n: usize, name: &str) -> Result<Var, PolyError> {
    let index = |rest: &str| -> Result<usize, PolyError> {
        let i: usize = rest.parse().map_err(|_| PolyError::Parse(format!("bad variable `{name}`")))?;
        if i == 0 || i > n {
            return Err(PolyError::Parse(format!("variable `{name}` out of range for n={n}")));
        }
        Ok(i - 1)
    };
    match name {
        "w" => Ok(Var::W),
        "tau" => Ok(Var::Tau),
        _ if name.starts_with("chi") => Ok(Var::Chi(index(&name[3..])?)),
        _ if name.starts_with('z') => Ok(Var::Z(index(&name[1..])?)),
        _ => Err(PolyError::Parse(format!("unknown variable `{name}`"))),
    }
}

impl HermPoly {
    /// Parses the canonical text form for a polynomial with z-block size `n`.
    ///
    /// Coefficients may be omitted (`z1^2` means `(1+0*i)*z1^2`) or given as a
    /// bare rational (`-3/2*w`), and repeated monomials are summed.
    pub fn parse(n: usize, text: &str) -> Result<HermPoly, PolyError> {
        let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
        if cur.peek() == Some(b'0') && text.trim() == "0" {
            return Ok(HermPoly::zero(n));
        }
        let mut terms = Vec::new();
        loop {
            let mut coeff = GRat::one();
            let mut exps = vec![0u32; 2 * n + 2];
            let mut need_var = true;
            if cur.eat(b'(') {
                let start = cur.pos;
                while cur.pos < cur.s.len() && cur.s[cur.pos] != b')' {
                    cur.pos += 1;
                }
                if cur.pos >= cur.s.len() {
                    return Err(cur.err("unclosed coefficient"));
                }
                let body = std::str::from_utf8(&cur.s[start..cur.pos]).unwrap();
                coeff = body.parse()?;
                cur.pos += 1;
                need_var = false;
            } else if matches!(cur.peek(), Some(b'0'..=b'9' | b'-')) {
                let start = cur.pos;
                cur.pos += 1;
                while cur.pos < cur.s.len() && matches!(cur.s[cur.pos], b'0'..=b'9' | b'/') {
                    cur.pos += 1;
                }
                let body = std::str::from_utf8(&cur.s[start..cur.pos]).unwrap();
                let value: BigRational = body.parse().map_err(|_| cur.err("bad rational constant"))?;
                coeff = GRat::real(value);
                need_var = false;
            }
            loop {
                if !need_var && !cur.eat(b'*') {
                    break;
                }
                need_var = false;
                let name = cur.ident();
                if name.is_empty() {
                    return Err(cur.err("expected variable"));
                }
                let v = parse_var(n, &name)?;
                let p = if cur.eat(b'^') { cur.uint()? } else { 1 };
                exps[HermPoly::slot(n, v)] += p;
            }
            terms.push((exps, coeff));
            if cur.peek().is_none() {
                break;
            }
            if !cur.eat(b'+') {
                return Err(cur.err("expected `+`"));
            }
        }
        Ok(HermPoly::from_terms(n, terms))
    }
}
