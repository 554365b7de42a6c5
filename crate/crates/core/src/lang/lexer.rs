use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Int(i64),
    /// Decimal literal text, kept verbatim for exact conversion.
    Float(String),
    Ident(String),
    Colon,
    Semi,
    Comma,
    DotDot,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Eq,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Iff,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Float(s) => format!("float `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::DotDot => "..",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::And => "/\\",
            Tok::Iff => "<->",
            Tok::Int(_) | Tok::Float(_) | Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

/// A token with its 1-based start position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let peek = |k: usize| chars.get(k).copied();
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let is_float = peek(j) == Some('.') && peek(j + 1).is_some_and(|d| d.is_ascii_digit());
            if is_float {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                col += j - i;
                i = j;
                Tok::Float(text)
            } else {
                let text: String = chars[i..j].iter().collect();
                let n = text.parse::<i64>().map_err(|_| ParseError {
                    line: start_line,
                    col: start_col,
                    message: format!("integer literal `{text}` out of range"),
                    expected: Vec::new(),
                })?;
                col += j - i;
                i = j;
                Tok::Int(n)
            }
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            col += j - i;
            i = j;
            Tok::Ident(text)
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
            let (tok, len) = if three == "<->" {
                (Tok::Iff, 3)
            } else {
                match two.as_str() {
                    ".." => (Tok::DotDot, 2),
                    "==" => (Tok::EqEq, 2),
                    "!=" => (Tok::Ne, 2),
                    "<=" => (Tok::Le, 2),
                    ">=" => (Tok::Ge, 2),
                    "/\\" => (Tok::And, 2),
                    _ => match c {
                        ':' => (Tok::Colon, 1),
                        ';' => (Tok::Semi, 1),
                        ',' => (Tok::Comma, 1),
                        '[' => (Tok::LBracket, 1),
                        ']' => (Tok::RBracket, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        '+' => (Tok::Plus, 1),
                        '-' => (Tok::Minus, 1),
                        '*' => (Tok::Star, 1),
                        '=' => (Tok::Eq, 1),
                        '<' => (Tok::Lt, 1),
                        '>' => (Tok::Gt, 1),
                        _ => {
                            return Err(ParseError {
                                line,
                                col,
                                message: format!("unexpected character `{c}`"),
                                expected: Vec::new(),
                            })
                        }
                    },
                }
            };
            i += len;
            col += len;
            tok
        };
        out.push(Token { tok, line: start_line, col: start_col });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
