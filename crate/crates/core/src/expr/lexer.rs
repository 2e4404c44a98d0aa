use crate::error::{Error, Result, SourcePos};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token.
    pub lexeme: String,
    pub pos: SourcePos,
}

/// Splits `source` into tokens. The unicode minus sign is accepted as `-`.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = source.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() || c == '.' {
            i = scan_number(&chars, i);
            let end = chars.get(i).map_or(source.len(), |&(p, _)| p);
            let text = &source[pos..end];
            let value: f64 = text.parse().map_err(|_| Error::Lex {
                pos: SourcePos(pos),
                msg: format!("malformed number `{text}`"),
            })?;
            TokenKind::Number(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(source.len(), |&(p, _)| p);
            TokenKind::Ident(source[pos..end].to_string())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Op(c),
                '\u{2212}' => TokenKind::Op('-'),
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ',' => TokenKind::Comma,
                other => {
                    return Err(Error::Lex {
                        pos: SourcePos(pos),
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        let end = chars.get(i).map_or(source.len(), |&(p, _)| p);
        debug_assert!(i > start);
        tokens.push(Token {
            kind,
            lexeme: source[pos..end].to_string(),
            pos: SourcePos(pos),
        });
    }
    Ok(tokens)
}

// Decimal literal with optional fraction and exponent. An `e` not followed by
// digits is left for the identifier scanner.
fn scan_number(chars: &[(usize, char)], mut i: usize) -> usize {
    let digit = |i: usize| chars.get(i).is_some_and(|&(_, c)| c.is_ascii_digit());
    while digit(i) {
        i += 1;
    }
    if chars.get(i).is_some_and(|&(_, c)| c == '.') {
        i += 1;
        while digit(i) {
            i += 1;
        }
    }
    if chars.get(i).is_some_and(|&(_, c)| c == 'e' || c == 'E') {
        let mut j = i + 1;
        if chars.get(j).is_some_and(|&(_, c)| c == '+' || c == '-') {
            j += 1;
        }
        if digit(j) {
            i = j;
            while digit(i) {
                i += 1;
            }
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexemes_reconstruct_input() {
        let src = "exp(-3*t) / (75 + t)*(sin(x)+abs(y)) + 1.5e-3";
        let toks = tokenize(src).unwrap();
        let joined: String = toks.iter().map(|t| t.lexeme.as_str()).collect();
        let stripped: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(joined, stripped);
    }

    #[test]
    fn exponent_needs_digits() {
        let toks = tokenize("2e").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].kind, TokenKind::Number(2.0));
        assert_eq!(toks[1].kind, TokenKind::Ident("e".into()));
        let toks = tokenize("2e-3").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Number(2e-3));
    }

    #[test]
    fn rejects_stray_characters() {
        match tokenize("t $ 2") {
            Err(Error::Lex { pos, .. }) => assert_eq!(pos, SourcePos(2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_number() {
        assert!(matches!(tokenize("."), Err(Error::Lex { .. })));
    }
}
