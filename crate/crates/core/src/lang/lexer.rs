use super::ast::Pos;
use super::LexError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    // keywords
    Var,
    Let,
    If,
    Else,
    While,
    For,
    In,
    Function,
    Return,
    True,
    False,
    Null,
    Delete,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Eq,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::Var => "var",
            Tok::Let => "let",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::While => "while",
            Tok::For => "for",
            Tok::In => "in",
            Tok::Function => "function",
            Tok::Return => "return",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Null => "null",
            Tok::Delete => "delete",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Ident(_) | Tok::Num(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "var" => Tok::Var,
        "let" => Tok::Let,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "for" => Tok::For,
        "in" => Tok::In,
        "function" => Tok::Function,
        "return" => Tok::Return,
        "true" => Tok::True,
        "false" => Tok::False,
        "null" => Tok::Null,
        "delete" => Tok::Delete,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }
}

/// Split source text into tokens. The final token is always `Eof`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur)?;
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = if is_ident_start(c) {
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(|c| is_ident_continue(*c)) {
                word.push(c);
                cur.bump();
            }
            keyword(&word).unwrap_or(Tok::Ident(word))
        } else if c.is_ascii_digit() {
            lex_number(&mut cur, pos)?
        } else if c == '"' || c == '\'' {
            lex_string(&mut cur, pos)?
        } else {
            cur.bump();
            let next = cur.peek();
            let two = |cur: &mut Cursor<'_>, t: Tok| {
                cur.bump();
                t
            };
            match (c, next) {
                ('(', _) => Tok::LParen,
                (')', _) => Tok::RParen,
                ('{', _) => Tok::LBrace,
                ('}', _) => Tok::RBrace,
                ('[', _) => Tok::LBracket,
                (']', _) => Tok::RBracket,
                (',', _) => Tok::Comma,
                (';', _) => Tok::Semi,
                (':', _) => Tok::Colon,
                ('.', _) => Tok::Dot,
                ('=', Some('=')) => two(&mut cur, Tok::EqEq),
                ('=', _) => Tok::Eq,
                ('!', Some('=')) => two(&mut cur, Tok::NotEq),
                ('!', _) => Tok::Bang,
                ('<', Some('=')) => two(&mut cur, Tok::Le),
                ('<', _) => Tok::Lt,
                ('>', Some('=')) => two(&mut cur, Tok::Ge),
                ('>', _) => Tok::Gt,
                ('+', _) => Tok::Plus,
                ('-', _) => Tok::Minus,
                ('*', _) => Tok::Star,
                ('/', _) => Tok::Slash,
                ('%', _) => Tok::Percent,
                ('&', Some('&')) => two(&mut cur, Tok::AndAnd),
                ('|', Some('|')) => two(&mut cur, Tok::OrOr),
                _ => return Err(LexError { pos, found: c }),
            }
        };
        out.push(Token { tok, pos });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), LexError> {
    loop {
        match cur.peek() {
            Some(c) if c.is_whitespace() => {
                cur.bump();
            }
            Some('/') => {
                let mut look = cur.chars.clone();
                look.next();
                match look.peek() {
                    Some('/') => {
                        while let Some(c) = cur.peek() {
                            if c == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                    }
                    Some('*') => {
                        let pos = cur.pos();
                        cur.bump();
                        cur.bump();
                        let mut prev = '\0';
                        loop {
                            match cur.bump() {
                                Some('/') if prev == '*' => break,
                                Some(c) => prev = c,
                                None => return Err(LexError { pos, found: '/' }),
                            }
                        }
                    }
                    _ => return Ok(()),
                }
            }
            _ => return Ok(()),
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<Tok, LexError> {
    let mut text = String::new();
    while let Some(c) = cur.peek().filter(|c| c.is_ascii_digit()) {
        text.push(c);
        cur.bump();
    }
    if cur.peek() == Some('.') {
        let mut look = cur.chars.clone();
        look.next();
        if look.peek().is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            cur.bump();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_digit()) {
                text.push(c);
                cur.bump();
            }
        }
    }
    if let Some(c) = cur.peek().filter(|c| is_ident_start(*c)) {
        return Err(LexError {
            pos: cur.pos(),
            found: c,
        });
    }
    text.parse::<f64>()
        .map(Tok::Num)
        .map_err(|_| LexError { pos, found: '0' })
}

fn lex_string(cur: &mut Cursor<'_>, pos: Pos) -> Result<Tok, LexError> {
    let quote = cur.bump().expect("caller peeked a quote");
    let mut s = String::new();
    loop {
        match cur.bump() {
            None | Some('\n') => return Err(LexError { pos, found: quote }),
            Some(c) if c == quote => return Ok(Tok::Str(s)),
            Some('\\') => {
                let esc_pos = cur.pos();
                match cur.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some('0') => s.push('\0'),
                    Some(c @ ('\\' | '\'' | '"')) => s.push(c),
                    Some(c) => return Err(LexError { pos: esc_pos, found: c }),
                    None => return Err(LexError { pos, found: quote }),
                }
            }
            Some(c) => s.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn minimal_statement() {
        assert_eq!(
            toks("x = 1"),
            vec![Tok::Ident("x".into()), Tok::Eq, Tok::Num(1.0), Tok::Eof]
        );
    }

    #[test]
    fn require_is_an_identifier() {
        assert_eq!(
            toks(r#"require("log")"#),
            vec![
                Tok::Ident("require".into()),
                Tok::LParen,
                Tok::Str("log".into()),
                Tok::RParen,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn illegal_character_reports_column() {
        let err = tokenize("a.@b").unwrap_err();
        assert_eq!(err.pos, Pos::new(1, 3));
        assert_eq!(err.found, '@');
    }

    #[test]
    fn positions_track_lines() {
        let t = tokenize("a\n  bb").unwrap();
        assert_eq!(t[1].pos, Pos::new(2, 3));
    }

    #[test]
    fn comments_and_escapes() {
        assert_eq!(
            toks("// c\n/* x */ 'a\\'b' 1.5"),
            vec![Tok::Str("a'b".into()), Tok::Num(1.5), Tok::Eof]
        );
    }

    #[test]
    fn unterminated_string_is_an_error() {
        assert!(tokenize("\"abc").is_err());
    }
}
