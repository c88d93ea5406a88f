//! Tokeniser for both the choreographic and the local dialect.

use crate::syntax::{Code, Diagnostic, FileId, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Long(i64),
    Double(f64),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

impl Token {
    pub fn describe(&self) -> String {
        match &self.tok {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(i) => format!("'{i}'"),
            Tok::Long(i) => format!("'{i}L'"),
            Tok::Double(d) => format!("'{d}'"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Longest-match punctuation, ordered so that prefixes come after longer
/// spellings.
const PUNCT: &[&str] = &[
    ">>", "::", "->", "||", "&&", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "&=", "|=", "%=", "{", "}", "(", ")",
    "[", "]", "<", ">", ",", ";", ".", "@", "=", "+", "-", "*", "/", "%", "&", "|", "!", "?", ":",
];

pub fn lex(file: FileId, src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0usize;
    let sp = |a: usize, b: usize| Span::new(file, a as u32, b as u32);
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            while i + 1 < bytes.len() && !(bytes[i] == b'*' && bytes[i + 1] == b'/') {
                i += 1;
            }
            if i + 1 >= bytes.len() {
                diags.push(Diagnostic::error(Code::SyntaxError, sp(start, start + 2), "Unterminated comment."));
                i = bytes.len();
            } else {
                i += 2;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            toks.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: sp(start, i) });
            continue;
        }
        // `#A#` is an alternative spelling of the role identifier `A`.
        if c == b'#' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            if j > i + 1 && bytes.get(j) == Some(&b'#') {
                toks.push(Token { tok: Tok::Ident(src[i + 1..j].to_string()), span: sp(i, j + 1) });
                i = j + 1;
                continue;
            }
            diags.push(Diagnostic::error(Code::SyntaxError, sp(i, i + 1), "Unexpected character '#'."));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_double = false;
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                is_double = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            if is_double {
                toks.push(Token { tok: Tok::Double(text.parse().unwrap_or(0.0)), span: sp(start, i) });
            } else if i < bytes.len() && (bytes[i] == b'L' || bytes[i] == b'l') {
                i += 1;
                match text.parse::<i64>() {
                    Ok(v) => toks.push(Token { tok: Tok::Long(v), span: sp(start, i) }),
                    Err(_) => {
                        diags.push(Diagnostic::error(Code::SyntaxError, sp(start, i), "Integer literal out of range."))
                    }
                }
            } else {
                match text.parse::<i64>() {
                    Ok(v) => toks.push(Token { tok: Tok::Int(v), span: sp(start, i) }),
                    Err(_) => {
                        diags.push(Diagnostic::error(Code::SyntaxError, sp(start, i), "Integer literal out of range."))
                    }
                }
            }
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            let mut closed = false;
            while i < bytes.len() {
                let ch = src[i..].chars().next().unwrap();
                if ch == '"' {
                    i += 1;
                    closed = true;
                    break;
                }
                if ch == '\n' {
                    break;
                }
                if ch == '\\' && i + 1 < bytes.len() {
                    let e = bytes[i + 1];
                    s.push(match e {
                        b'n' => '\n',
                        b't' => '\t',
                        b'r' => '\r',
                        b'0' => '\0',
                        other => other as char,
                    });
                    i += 2;
                    continue;
                }
                s.push(ch);
                i += ch.len_utf8();
            }
            if !closed {
                diags.push(Diagnostic::error(Code::SyntaxError, sp(start, i), "Unterminated string literal."));
            }
            toks.push(Token { tok: Tok::Str(s), span: sp(start, i) });
            continue;
        }
        if let Some(p) = PUNCT.iter().find(|p| src[i..].starts_with(**p)) {
            i += p.len();
            toks.push(Token { tok: Tok::Punct(p), span: sp(start, i) });
            continue;
        }
        let ch = src[i..].chars().next().unwrap();
        diags.push(Diagnostic::error(
            Code::SyntaxError,
            sp(i, i + ch.len_utf8()),
            format!("Unexpected character '{ch}'."),
        ));
        i += ch.len_utf8();
    }
    toks.push(Token { tok: Tok::Eof, span: sp(bytes.len(), bytes.len()) });
    (toks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(FileId(0), src).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn hash_marked_roles_are_identifiers() {
        assert_eq!(
            kinds("String@#A#"),
            vec![Tok::Ident("String".into()), Tok::Punct("@"), Tok::Ident("A".into()), Tok::Eof]
        );
    }

    #[test]
    fn numbers_and_strings() {
        assert_eq!(
            kinds("1 2L 3.5 \"a\\\"b\""),
            vec![Tok::Int(1), Tok::Long(2), Tok::Double(3.5), Tok::Str("a\"b".into()), Tok::Eof]
        );
    }

    #[test]
    fn comments_are_skipped_and_longest_punct_wins() {
        assert_eq!(
            kinds("a >> b // x\n /* y */ >= ::"),
            vec![
                Tok::Ident("a".into()),
                Tok::Punct(">>"),
                Tok::Ident("b".into()),
                Tok::Punct(">="),
                Tok::Punct("::"),
                Tok::Eof
            ]
        );
    }
}
