use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Arrow,
    Cmp(&'static str),
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number(x) => format!("number `{x}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Cmp(op) => format!("`{op}`"),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexError {
    pub pos: Position,
    pub found: char,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        let peek = chars.get(i + 1).copied();

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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let (kind, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (TokenKind::Ident(chars[start..j].iter().collect()), j - start)
        } else if c.is_ascii_digit()
            || (c == '-' && peek.is_some_and(|p| p.is_ascii_digit() || p == '.'))
            || (c == '.' && peek.is_some_and(|p| p.is_ascii_digit()))
        {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            let text: String = chars[start..j].iter().collect();
            match text.parse::<f64>() {
                Ok(x) => (TokenKind::Number(x), j - start),
                Err(_) => return Err(LexError { pos, found: c }),
            }
        } else {
            match (c, peek) {
                ('-', Some('>')) => (TokenKind::Arrow, 2),
                ('=', Some('=')) => (TokenKind::Cmp("=="), 2),
                ('!', Some('=')) => (TokenKind::Cmp("!="), 2),
                ('<', Some('=')) => (TokenKind::Cmp("<="), 2),
                ('>', Some('=')) => (TokenKind::Cmp(">="), 2),
                ('<', _) => (TokenKind::Cmp("<"), 1),
                ('>', _) => (TokenKind::Cmp(">"), 1),
                ('{', _) => (TokenKind::LBrace, 1),
                ('}', _) => (TokenKind::RBrace, 1),
                ('(', _) => (TokenKind::LParen, 1),
                (')', _) => (TokenKind::RParen, 1),
                (';', _) => (TokenKind::Semi, 1),
                _ => return Err(LexError { pos, found: c }),
            }
        };
        tokens.push(Token { kind, pos });
        i += len;
        col += len;
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Position { line, column: col },
    });
    Ok(tokens)
}
