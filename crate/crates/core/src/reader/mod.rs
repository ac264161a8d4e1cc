//! Source text to desugared syntax.
//!
//! [`tokenize`] splits text into tokens, [`parse_program`] builds level-checked
//! definitions, expanding dot notation into nested `send` forms on the way.

mod lexer;
mod parser;

use std::fmt;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{desugar_dot, parse_program};

use crate::error::{Error, Position, Result};
use crate::syntax::Defn;

/// Constructs introduced one level at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Classes,
    DotNotation,
    SuperClasses,
    Overriding,
    Constructors,
}

impl Feature {
    pub fn required_level(self) -> u8 {
        match self {
            Feature::Classes => 0,
            Feature::DotNotation => 1,
            Feature::SuperClasses => 2,
            Feature::Overriding => 3,
            Feature::Constructors => 4,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Feature::Classes => "classes and objects",
            Feature::DotNotation => "dot notation for method calls",
            Feature::SuperClasses => "a super class",
            Feature::Overriding => "overriding an inherited method",
            Feature::Constructors => "a constructor",
        }
    }
}

/// One of the `class/0` .. `class/4` languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageLevel(u8);

impl LanguageLevel {
    pub const MAX: LanguageLevel = LanguageLevel(4);
    /// The level used when neither a header nor a flag picks one.
    pub const DEFAULT: LanguageLevel = LanguageLevel(1);

    pub fn new(level: u8) -> Option<Self> {
        (level <= Self::MAX.0).then_some(LanguageLevel(level))
    }

    pub fn all() -> impl Iterator<Item = LanguageLevel> {
        (0..=Self::MAX.0).map(LanguageLevel)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn permits(self, feature: Feature) -> bool {
        self.0 >= feature.required_level()
    }

    /// `Ok` when `feature` is available at this level, else a level error.
    pub fn require(self, feature: Feature, pos: Option<Position>) -> Result<()> {
        if self.permits(feature) {
            Ok(())
        } else {
            Err(Error::Level { pos, feature, current: self.0 })
        }
    }
}

impl fmt::Display for LanguageLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class/{}", self.0)
    }
}

impl std::str::FromStr for LanguageLevel {
    type Err = String;

    /// Accepts `N` or `class/N`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().strip_prefix("class/").unwrap_or(s.trim());
        digits
            .parse::<u8>()
            .ok()
            .and_then(LanguageLevel::new)
            .ok_or_else(|| format!("unknown language level `{s}` (expected 0-4 or class/0-class/4)"))
    }
}

/// Source text with its `#lang` line blanked out.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceText {
    pub header_level: Option<LanguageLevel>,
    pub body: String,
}

/// Recognizes a leading `#lang class/N` line and strips it, keeping every
/// other character position unchanged.
pub fn strip_lang_header(source: &str) -> Result<SourceText> {
    let start = source.len() - source.trim_start().len();
    let rest = &source[start..];
    if !rest.starts_with("#lang") {
        return Ok(SourceText { header_level: None, body: source.to_string() });
    }
    let line_end = rest.find('\n').map(|i| start + i).unwrap_or(source.len());
    let line = &source[start..line_end];
    let pos = lexer::position_of(source, start);
    let name = line["#lang".len()..].trim();
    let level = name
        .strip_prefix("class/")
        .and_then(|n| n.parse::<u8>().ok())
        .and_then(LanguageLevel::new)
        .ok_or_else(|| Error::parse(pos, format!("unsupported language `{name}`; expected class/0 through class/4")))?;
    let mut body = String::with_capacity(source.len());
    body.push_str(&source[..start]);
    body.extend(line.chars().map(|_| ' '));
    body.push_str(&source[line_end..]);
    Ok(SourceText { header_level: Some(level), body })
}

/// Picks the active level: an explicit override wins over the header, which
/// wins over `fallback`.
pub fn resolve_level(
    override_level: Option<LanguageLevel>,
    header: Option<LanguageLevel>,
    fallback: LanguageLevel,
) -> LanguageLevel {
    override_level.or(header).unwrap_or(fallback)
}

/// Reads a whole program: header, tokens, and level-checked definitions.
pub fn read_program(
    source: &str,
    override_level: Option<LanguageLevel>,
    fallback: LanguageLevel,
) -> Result<(LanguageLevel, Vec<Defn>)> {
    let text = strip_lang_header(source)?;
    let level = resolve_level(override_level, text.header_level, fallback);
    let tokens = tokenize(&text.body)?;
    Ok((level, parse_program(&tokens, level)?))
}
