//! Text formats for elements and words.
//!
//! ```text
//! element := ["-"] term (("+" | "-") term)*
//! term    := INT | [INT "*"] factor ((" " | "*") factor)*
//! factor  := ("P" | "Sq") "(" [INT ("," INT)*] ")" | ("P" | "Sq") "^" INT | "1"
//! ```
//!
//! "0" is the zero element. Factors in a term are multiplied left to right.
//! Error positions are byte offsets into the input.

use crate::adem::{word_to_milnor, Word};
use crate::arith::PrimePower;
use crate::error::{Error, Result};
use crate::milnor::{milnor_product, MilnorElement, MilnorSeq};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Factor {
    Milnor(MilnorSeq),
    Power(u64),
    One,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let t = self.rest();
        self.pos += t.len() - t.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.pos, msg)
    }

    fn at_end(&self) -> bool {
        self.pos == self.src.len()
    }

    fn int(&mut self) -> Result<u64> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected a number"));
        }
        let start = self.pos;
        let v = self.rest()[..digits]
            .parse()
            .map_err(|_| Error::parse(start, "number too large"))?;
        self.pos += digits;
        Ok(v)
    }

    fn factor(&mut self, ctx: &PrimePower) -> Result<Factor> {
        let start = self.pos;
        let name = if self.rest().starts_with("Sq") {
            if ctx.p() != 2 {
                return Err(self.error("Sq needs p = 2; use P"));
            }
            self.pos += 2;
            "Sq"
        } else if self.eat('P') {
            "P"
        } else if self.eat('1') {
            return Ok(Factor::One);
        } else {
            return Err(self.error("expected P, Sq or 1"));
        };
        if self.eat('^') {
            return Ok(Factor::Power(self.int()?));
        }
        if !self.eat('(') {
            return Err(Error::parse(start + name.len(), format!("expected '(' or '^' after {name}")));
        }
        let mut r = Vec::new();
        self.skip_ws();
        if !self.eat(')') {
            loop {
                self.skip_ws();
                r.push(self.int()?);
                self.skip_ws();
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(Factor::Milnor(MilnorSeq::new(r)))
    }

    /// Factors up to the next '+', '-' or end of input.
    fn factors(&mut self, ctx: &PrimePower) -> Result<Vec<Factor>> {
        let mut out = vec![self.factor(ctx)?];
        loop {
            let before = self.pos;
            self.skip_ws();
            let star = self.eat('*');
            self.skip_ws();
            match self.peek() {
                None | Some('+') | Some('-') if !star => {
                    self.pos = before;
                    self.skip_ws();
                    return Ok(out);
                }
                _ => out.push(self.factor(ctx)?),
            }
        }
    }
}

fn to_milnor(f: &Factor, ctx: PrimePower) -> MilnorElement {
    match f {
        Factor::Milnor(r) => MilnorElement::basis(ctx, r.clone()),
        Factor::Power(a) => MilnorElement::pa(ctx, *a),
        Factor::One => MilnorElement::unit(ctx),
    }
}

/// Parses an element of A_q written in Milnor basis elements and powers P^a.
pub fn parse_element(src: &str, ctx: &PrimePower) -> Result<MilnorElement> {
    let ctx = *ctx;
    let mut c = Cursor::new(src);
    let mut total = MilnorElement::zero(ctx);
    c.skip_ws();
    if c.at_end() {
        return Err(c.error("empty input"));
    }
    let mut sign = if c.eat('-') { ctx.neg(1) } else { 1 };
    loop {
        c.skip_ws();
        let mut coeff = 1u32;
        let mut has_factors = true;
        if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            coeff = ctx.reduce(c.int()?);
            c.skip_ws();
            if c.eat('*') {
                c.skip_ws();
            } else if !c.peek().is_some_and(|ch| ch == 'P' || ch == 'S') {
                has_factors = false;
            }
        }
        let mut term = MilnorElement::unit(ctx);
        if has_factors {
            for f in c.factors(&ctx)? {
                term = milnor_product(&term, &to_milnor(&f, ctx))?;
            }
        }
        total.add_scaled(&term, ctx.mul(sign, coeff));
        c.skip_ws();
        if c.at_end() {
            return Ok(total);
        }
        sign = if c.eat('+') {
            1
        } else if c.eat('-') {
            ctx.neg(1)
        } else {
            return Err(c.error("expected '+' or '-'"));
        };
    }
}

/// Parses a single word "P^a P^b ..." (or "Sq^a ..."); "1" is the empty word.
pub fn parse_word(src: &str, ctx: &PrimePower) -> Result<Word> {
    let mut c = Cursor::new(src);
    c.skip_ws();
    if c.at_end() {
        return Err(c.error("empty input"));
    }
    let fs = c.factors(ctx)?;
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("a word has no '+' or '-'"));
    }
    let mut exps = Vec::new();
    for f in fs {
        match f {
            Factor::Power(a) => exps.push(a),
            Factor::One => {}
            Factor::Milnor(r) if r.len() <= 1 => exps.push(r.get(1)),
            Factor::Milnor(r) => {
                return Err(Error::parse(0, format!("{r} is not a single power")));
            }
        }
    }
    Ok(Word::new(*ctx, exps))
}

/// Parses either format; a word is expanded in the Milnor basis.
pub fn parse_any(src: &str, ctx: &PrimePower) -> Result<MilnorElement> {
    match parse_word(src, ctx) {
        Ok(w) => Ok(word_to_milnor(&w)),
        Err(_) => parse_element(src, ctx),
    }
}
