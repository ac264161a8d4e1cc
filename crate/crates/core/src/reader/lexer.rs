use std::ops::Range;

use crate::error::{Error, Position, Result};
use crate::numeric::Rational;
use crate::Number;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// `(` or `[`; the token text says which.
    LParen,
    /// `)` or `]`.
    RParen,
    /// A standalone `.`.
    Dot,
    Identifier,
    Number(Number),
    Str(String),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source slice.
    pub text: String,
    pub pos: Position,
    /// Byte range in the source.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_ident(&self, name: &str) -> bool {
        self.kind == TokenKind::Identifier && self.text == name
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | '"' | ';' | '\'' | '`' | ',')
}

pub(crate) fn position_of(source: &str, offset: usize) -> Position {
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    Position::new(line, column)
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn push(&mut self, kind: TokenKind, start: usize, pos: Position) {
        self.tokens.push(Token {
            kind,
            text: self.src[start..self.offset].to_string(),
            pos,
            span: start..self.offset,
        });
    }

    fn run(mut self) -> Result<Vec<Token>> {
        while let Some(c) = self.peek() {
            let start = self.offset;
            let pos = self.pos();
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '(' | '[' => {
                    self.bump();
                    self.push(TokenKind::LParen, start, pos);
                }
                ')' | ']' => {
                    self.bump();
                    self.push(TokenKind::RParen, start, pos);
                }
                '"' => self.string(start, pos)?,
                '\'' | '`' | ',' => {
                    return Err(Error::Lex { pos, message: format!("`{c}` (quotation) is not supported") })
                }
                '{' | '}' => return Err(Error::Lex { pos, message: format!("unexpected `{c}`") }),
                _ => self.atom(start, pos)?,
            }
        }
        Ok(self.tokens)
    }

    fn string(&mut self, start: usize, pos: Position) -> Result<()> {
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(Error::Lex { pos, message: "unterminated string literal".into() }),
                Some('"') => break,
                Some('\\') => {
                    let esc_pos = self.pos();
                    match self.bump() {
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some('\\') => value.push('\\'),
                        Some('"') => value.push('"'),
                        Some(other) => {
                            return Err(Error::Lex {
                                pos: esc_pos,
                                message: format!("unknown escape sequence `\\{other}`"),
                            })
                        }
                        None => {
                            return Err(Error::Lex { pos, message: "unterminated string literal".into() })
                        }
                    }
                }
                Some(c) => value.push(c),
            }
        }
        self.push(TokenKind::Str(value), start, pos);
        Ok(())
    }

    fn atom(&mut self, start: usize, pos: Position) -> Result<()> {
        while let Some(c) = self.peek() {
            if is_delimiter(c) {
                break;
            }
            self.bump();
        }
        let text = &self.src[start..self.offset];
        if text == "." {
            self.push(TokenKind::Dot, start, pos);
            return Ok(());
        }
        if let Some(rest) = text.strip_prefix('#') {
            let value = match rest {
                "t" | "true" => true,
                "f" | "false" => false,
                _ => return Err(Error::Lex { pos, message: format!("unsupported `#` syntax `{text}`") }),
            };
            self.push(TokenKind::Bool(value), start, pos);
            return Ok(());
        }
        if let "true" | "false" = text {
            self.push(TokenKind::Bool(text == "true"), start, pos);
            return Ok(());
        }
        match Rational::parse_literal(text) {
            Ok(Some(r)) => self.push(TokenKind::Number(Number::Exact(r)), start, pos),
            Err(e) => return Err(Error::Lex { pos, message: e.to_string() }),
            Ok(None) if text.len() > 1 && text.starts_with('.') && !text[1..].starts_with('.') => {
                // `.sum` written without the space: a dot followed by a message.
                self.tokens.push(Token {
                    kind: TokenKind::Dot,
                    text: ".".into(),
                    pos,
                    span: start..start + 1,
                });
                self.tokens.push(Token {
                    kind: TokenKind::Identifier,
                    text: text[1..].to_string(),
                    pos: Position::new(pos.line, pos.column + 1),
                    span: start + 1..self.offset,
                });
            }
            Ok(None) => self.push(TokenKind::Identifier, start, pos),
        }
        Ok(())
    }
}

/// Splits source text into tokens. Comments (`;` to end of line) and
/// whitespace are dropped; each token keeps its exact source slice.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    Lexer { src: source, offset: 0, line: 1, column: 1, tokens: Vec::new() }.run()
}
