use std::fmt;
use std::str::FromStr;

use super::{Hierarchy, Result, VarError, VariableExpr};

/// One element of a path query.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Name(String),
    Index(usize),
}

/// A path from a root to one of its subvariables, e.g. `x, 1, linear_velocity`.
///
/// Names must appear in root-to-leaf order but may skip ancestors as long as
/// the path stays unambiguous. Copy indices are consumed by replicated arrays
/// along the matched chain, outermost first; where they appear between the
/// names does not matter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    tokens: Vec<Token>,
}

impl Query {
    pub fn new(tokens: Vec<Token>) -> Result<Query> {
        match tokens.first() {
            Some(Token::Name(_)) => {}
            Some(Token::Index(_)) => return Err(VarError::InvalidQuery("a query must start with a name".into())),
            None => return Err(VarError::InvalidQuery("empty query".into())),
        }
        if let Some(Token::Name(n)) = tokens.iter().find(|t| matches!(t, Token::Name(n) if n.is_empty())) {
            return Err(VarError::InvalidQuery(format!("empty name `{n}`")));
        }
        Ok(Query { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            Token::Name(n) => Some(n.as_str()),
            Token::Index(_) => None,
        })
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            Token::Index(i) => Some(*i),
            Token::Name(_) => None,
        })
    }

    /// Appends the tokens of `rest`, e.g. to address inside a previous result.
    pub fn join(&self, rest: &Query) -> Query {
        let mut tokens = self.tokens.clone();
        tokens.extend(rest.tokens.iter().cloned());
        Query { tokens }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match t {
                Token::Name(n) => f.write_str(n)?,
                Token::Index(k) => write!(f, "{k}")?,
            }
        }
        Ok(())
    }
}

/// Parses comma separated tokens; integers become copy indices.
impl FromStr for Query {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Query> {
        let tokens = s
            .split(',')
            .map(str::trim)
            .map(|t| match t.parse::<usize>() {
                Ok(i) => Token::Index(i),
                Err(_) => Token::Name(t.to_owned()),
            })
            .collect();
        Query::new(tokens)
    }
}

/// Conversion used by the [`query!`](crate::query) macro.
pub trait IntoToken {
    fn into_token(self) -> Token;
}

impl IntoToken for Token {
    fn into_token(self) -> Token {
        self
    }
}

impl IntoToken for &str {
    fn into_token(self) -> Token {
        Token::Name(self.to_owned())
    }
}

impl IntoToken for String {
    fn into_token(self) -> Token {
        Token::Name(self)
    }
}

impl IntoToken for &Hierarchy {
    fn into_token(self) -> Token {
        Token::Name(self.name().to_owned())
    }
}

/// Panics on unnamed expressions.
impl IntoToken for &VariableExpr {
    fn into_token(self) -> Token {
        Token::Name(self.name().expect("only named variables can appear in a query").to_owned())
    }
}

impl IntoToken for usize {
    fn into_token(self) -> Token {
        Token::Index(self)
    }
}

/// Lets unsuffixed integer literals work in `query!`; panics when negative.
impl IntoToken for i32 {
    fn into_token(self) -> Token {
        Token::Index(usize::try_from(self).expect("copy indices are nonnegative"))
    }
}

impl IntoToken for u32 {
    fn into_token(self) -> Token {
        Token::Index(self as usize)
    }
}
