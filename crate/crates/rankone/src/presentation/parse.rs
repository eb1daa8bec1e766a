use crate::freegroup::{Alphabet, Word};

use super::{Presentation, PresentationError};

/// Parses `< ident (, ident)* | [word (, word)*] >`.
/// Words use whitespace-separated `ident` / `ident^k` terms with `e` for
/// the identity; `#` starts a comment running to the end of the line.
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let result = p.presentation()?;
    p.expect_end()?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Bar,
    Comma,
    Term(String, i64),
    Identity,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, PresentationError> {
    let mut out = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let content = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let mut chars = content.char_indices().peekable();
        while let Some(&(ci, c)) = chars.peek() {
            let col = ci + 1;
            match c {
                c if c.is_whitespace() => {
                    chars.next();
                }
                '<' | '>' | '|' | ',' => {
                    chars.next();
                    let tok = match c {
                        '<' => Tok::Open,
                        '>' => Tok::Close,
                        '|' => Tok::Bar,
                        _ => Tok::Comma,
                    };
                    out.push(Spanned { tok, line, col });
                }
                c if is_ident_start(c) => {
                    let mut name = String::new();
                    while let Some(&(_, c)) = chars.peek() {
                        if is_ident_char(c) {
                            name.push(c);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    let mut exp = 1i64;
                    if let Some(&(_, '^')) = chars.peek() {
                        chars.next();
                        let mut digits = String::new();
                        if let Some(&(_, '-')) = chars.peek() {
                            digits.push('-');
                            chars.next();
                        }
                        while let Some(&(_, c)) = chars.peek() {
                            if c.is_ascii_digit() {
                                digits.push(c);
                                chars.next();
                            } else {
                                break;
                            }
                        }
                        exp = digits.parse().map_err(|_| PresentationError::Syntax {
                            line,
                            col,
                            msg: format!("bad exponent `{digits}`"),
                        })?;
                        if exp == 0 {
                            return Err(PresentationError::Syntax {
                                line,
                                col,
                                msg: "zero exponent".into(),
                            });
                        }
                    }
                    let tok = if name == "e" && exp == 1 {
                        Tok::Identity
                    } else {
                        Tok::Term(name, exp)
                    };
                    out.push(Spanned { tok, line, col });
                }
                other => {
                    return Err(PresentationError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn unexpected(&self, expected: &str) -> PresentationError {
        match self.peek() {
            Some(s) => PresentationError::Unexpected {
                expected: expected.to_string(),
                found: format!("{:?}", s.tok),
                line: s.line,
                col: s.col,
            },
            None => PresentationError::Unexpected {
                expected: expected.to_string(),
                found: "end of input".to_string(),
                line: 0,
                col: 0,
            },
        }
    }

    fn eat(&mut self, tok: &Tok, expected: &str) -> Result<(), PresentationError> {
        match self.peek() {
            Some(s) if &s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn presentation(&mut self) -> Result<Presentation, PresentationError> {
        self.eat(&Tok::Open, "`<`")?;
        let mut names = Vec::new();
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Term(name, 1)) => {
                    self.pos += 1;
                    if names.contains(&name) {
                        return Err(PresentationError::DuplicateGenerator(name));
                    }
                    names.push(name);
                }
                _ => return Err(self.unexpected("generator name")),
            }
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Bar) => break,
                _ => return Err(self.unexpected("`,` or `|`")),
            }
        }
        self.eat(&Tok::Bar, "`|`")?;
        let alphabet = Alphabet::new(names).map_err(PresentationError::Word)?;

        let mut relators = Vec::new();
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Close)) {
            self.pos += 1;
            return Ok(Presentation::new(alphabet, relators));
        }
        loop {
            relators.push(self.word(&alphabet)?);
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Close) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.unexpected("`,` or `>`")),
            }
        }
        Ok(Presentation::new(alphabet, relators))
    }

    fn word(&mut self, alphabet: &Alphabet) -> Result<Word, PresentationError> {
        let mut runs = Vec::new();
        let mut any = false;
        loop {
            match self.peek().cloned() {
                Some(Spanned { tok: Tok::Term(name, exp), line, col }) => {
                    self.pos += 1;
                    any = true;
                    let gen = alphabet.index_of(&name).ok_or(PresentationError::Syntax {
                        line,
                        col,
                        msg: format!("unknown generator `{name}`"),
                    })?;
                    runs.push((gen, exp));
                }
                Some(Spanned { tok: Tok::Identity, .. }) => {
                    self.pos += 1;
                    any = true;
                }
                _ => break,
            }
        }
        if !any {
            return Err(self.unexpected("word"));
        }
        Ok(Word::from_runs(alphabet, runs)?)
    }

    fn expect_end(&mut self) -> Result<(), PresentationError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bs12() {
        let p = parse_presentation("< t, a | t a t^-1 a^-2 >").unwrap();
        assert_eq!(p.generators().names(), ["t", "a"]);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.deficiency(), 1);
    }

    #[test]
    fn parses_free_and_z2() {
        let free = parse_presentation("< a | >").unwrap();
        assert_eq!(free.relators().len(), 0);
        assert_eq!(free.deficiency(), 1);

        let z2 = parse_presentation("< a, b | a b a^-1 b^-1 >").unwrap();
        assert_eq!(z2.deficiency(), 1);
    }

    #[test]
    fn comments_and_newlines() {
        let p = parse_presentation("# a Baumslag-Solitar group\n< t, a |\n  t a t^-1 a^-2 # relator\n>").unwrap();
        assert_eq!(p.relators().len(), 1);
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_presentation("< t, a | t a t^-1 a^-2").unwrap_err();
        assert!(matches!(err, PresentationError::Unexpected { .. }));
        let err = parse_presentation("< t, t | >").unwrap_err();
        assert!(matches!(err, PresentationError::DuplicateGenerator(_)));
        let err = parse_presentation("< t, a | x >").unwrap_err();
        match err {
            PresentationError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 10);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn identity_relator_warns_via_drop_count() {
        let p = parse_presentation("< a | e >").unwrap();
        assert_eq!(p.relators().len(), 0);
        assert_eq!(p.dropped_identities(), 1);
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "< t, a | t a t^-1 a^-2 >",
            "< a, b | a b a^-1 b^-1, a^3 >",
            "< a | >",
        ] {
            let p = parse_presentation(text).unwrap();
            let reparsed = parse_presentation(&p.to_string()).unwrap();
            assert_eq!(p, reparsed);
        }
    }
}
