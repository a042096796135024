use crate::error::{Error, Result, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    If,
    WeakIf,
    Arrow,
    Bar,
    Amp,
    Bang,
    Minus,
    Hash,
    Cmp(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Int(i) => format!("integer {i}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::If => "`:-`".into(),
            Tok::WeakIf => "`:~`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Cmp(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str, file: Option<&str>) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span_at = |line: usize, col: usize| {
        let s = SourceSpan::new(line, col);
        match file {
            Some(f) => s.in_file(f),
            None => s,
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let span = span_at(line, col);
        let start = i;
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(Error::syntax(span, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                Some('n') => s.push('\n'),
                                _ => return Err(Error::syntax(span_at(line, col), "bad escape in string")),
                            }
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(s), span });
                continue;
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                col += i - start;
                let v = digits
                    .parse::<i64>()
                    .map_err(|_| Error::syntax(span.clone(), format!("integer {digits} out of range")))?;
                out.push(Token { tok: Tok::Int(v), span });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Ident(word)
                };
                out.push(Token { tok, span });
                continue;
            }
            _ => {}
        }
        let next = chars.get(i + 1).copied();
        let (tok, n) = match (c, next) {
            (':', Some('-')) => (Tok::If, 2),
            (':', Some('~')) => (Tok::WeakIf, 2),
            (':', _) => (Tok::Colon, 1),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('-', _) => (Tok::Minus, 1),
            ('!', Some('=')) => (Tok::Cmp("!="), 2),
            ('!', _) => (Tok::Bang, 1),
            ('<', Some('=')) => (Tok::Cmp("<="), 2),
            ('<', Some('>')) => (Tok::Cmp("<>"), 2),
            ('<', _) => (Tok::Cmp("<"), 1),
            ('>', Some('=')) => (Tok::Cmp(">="), 2),
            ('>', _) => (Tok::Cmp(">"), 1),
            ('=', Some('=')) => (Tok::Cmp("=="), 2),
            ('=', _) => (Tok::Cmp("="), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('|', _) => (Tok::Bar, 1),
            ('&', _) => (Tok::Amp, 1),
            ('#', _) => (Tok::Hash, 1),
            _ => return Err(Error::syntax(span, format!("unexpected character `{c}`"))),
        };
        advance(n, &mut i, &mut col);
        out.push(Token { tok, span });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span_at(line, col),
    });
    Ok(out)
}
