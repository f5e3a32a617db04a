use super::*;
use crate::error::ParseError;

/// Parses the concrete syntax, desugaring derived connectives into core nodes.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn keyword(&mut self) -> Result<&str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .bytes()
            .take_while(|b| b.is_ascii_alphabetic())
            .count();
        if len == 0 {
            return Err(self.err("expected a connective name"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        if self.rest().starts_with('-') {
            return Err(self.err("negative index"));
        }
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected a natural number index"));
        }
        let start = self.pos;
        self.pos += len;
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "index out of range"))
    }

    fn pair(&mut self) -> Result<(usize, usize), ParseError> {
        self.expect('(')?;
        let i = self.index()?;
        self.expect(',')?;
        let j = self.index()?;
        self.expect(')')?;
        Ok((i, j))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.expect('(')?;
        let p = self.formula()?;
        self.expect(')')?;
        Ok(p)
    }

    fn binary(&mut self) -> Result<(Formula, Formula), ParseError> {
        self.expect('(')?;
        let p = self.formula()?;
        self.expect(',')?;
        let q = self.formula()?;
        self.expect(')')?;
        Ok((p, q))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let kw = self.keyword()?.to_owned();
        Ok(match kw.as_str() {
            "Mem" => self.pair().map(|(i, j)| member_fm(i, j))?,
            "Eq" => self.pair().map(|(i, j)| equal_fm(i, j))?,
            "FMem" => self.pair().map(|(i, j)| Formula::ForcesMem(i, j))?,
            "FEq" => self.pair().map(|(i, j)| Formula::ForcesEq(i, j))?,
            "Nand" => self.binary().map(|(p, q)| nand_fm(p, q))?,
            "And" => self.binary().map(|(p, q)| and_fm(p, q))?,
            "Or" => self.binary().map(|(p, q)| or_fm(p, q))?,
            "Imp" => self.binary().map(|(p, q)| imp_fm(p, q))?,
            "Iff" => self.binary().map(|(p, q)| iff_fm(p, q))?,
            "Forall" => self.unary().map(forall_fm)?,
            "Exists" => self.unary().map(exists_fm)?,
            "Neg" => self.unary().map(neg_fm)?,
            other => {
                return Err(ParseError::new(
                    start,
                    format!("unknown connective '{other}'"),
                ))
            }
        })
    }
}
