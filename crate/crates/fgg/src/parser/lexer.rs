use crate::ast::Span;

use super::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Magnitude only; a leading `-` is a separate token.
    Int(u64),
    Kw(&'static str),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Kw(k) => format!("`{k}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const KEYWORDS: &[&str] =
    &["package", "type", "struct", "interface", "func", "return", "if", "else", "panic", "true", "false"];

// Longest first so `!=` wins over a lone `!`.
const PUNCT: &[&str] = &["!=", "(", ")", "{", "}", "[", "]", ",", ";", ".", "=", "<", ">", "+", "-"];

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    let advance = |c: char, line: &mut u32, col: &mut u32| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };

    while let Some(&(i, c)) = chars.peek() {
        let span = Span::new(line, col);
        if c.is_whitespace() {
            advance(c, &mut line, &mut col);
            chars.next();
            continue;
        }
        let rest = &src[i..];
        if rest.starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                advance(c, &mut line, &mut col);
                chars.next();
            }
            continue;
        }
        if rest.starts_with("/*") {
            let Some(end) = rest.find("*/") else {
                return Err(Diagnostic::new("unterminated block comment", span));
            };
            let stop = i + end + 2;
            while let Some(&(j, c)) = chars.peek() {
                if j >= stop {
                    break;
                }
                advance(c, &mut line, &mut col);
                chars.next();
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !(c.is_alphanumeric() || c == '_') {
                    break;
                }
                word.push(c);
                advance(c, &mut line, &mut col);
                chars.next();
            }
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, span });
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                advance(c, &mut line, &mut col);
                chars.next();
            }
            let n = digits
                .parse::<u64>()
                .map_err(|_| Diagnostic::new(format!("integer literal {digits} out of range"), span))?;
            out.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                for c in p.chars() {
                    advance(c, &mut line, &mut col);
                    chars.next();
                }
                out.push(Token { tok: Tok::Punct(p), span });
            }
            None => {
                return Err(Diagnostic::new(format!("unexpected character `{c}`"), span));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn greek_identifiers_and_neq() {
        assert_eq!(
            toks("α != β_1"),
            vec![Tok::Ident("α".into()), Tok::Punct("!="), Tok::Ident("β_1".into()), Tok::Eof]
        );
    }

    #[test]
    fn comments_are_skipped_and_positions_tracked() {
        let ts = lex("// hi\n/* a\nb */ x").unwrap();
        assert_eq!(ts[0].tok, Tok::Ident("x".into()));
        assert_eq!((ts[0].span.line, ts[0].span.col), (3, 6));
    }

    #[test]
    fn stray_character_is_reported() {
        let d = lex("a\n  @").unwrap_err();
        assert_eq!((d.line, d.column), (2, 3));
    }
}
