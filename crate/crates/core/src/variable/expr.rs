use super::{Hierarchy, Kind, Result, VarError};

/// Declaration of a variable or of a group of variables.
///
/// Expressions are plain values; nothing is laid out until
/// [`build`](VariableExpr::build) turns a named expression into a [`Hierarchy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariableExpr {
    Leaf { name: String, kind: Kind },
    Concat(Vec<VariableExpr>),
    Replicate { count: usize, expr: Box<VariableExpr> },
    Bound { name: String, expr: Box<VariableExpr> },
}

/// A leaf variable with no substructure.
pub fn leaf(name: impl Into<String>, kind: Kind) -> Result<VariableExpr> {
    let name = name.into();
    if name.is_empty() {
        return Err(VarError::InvalidName);
    }
    check_leaf_kind(&kind)?;
    Ok(VariableExpr::Leaf { name, kind })
}

/// Stacks `parts` one after the other, in order.
pub fn concat(parts: Vec<VariableExpr>) -> Result<VariableExpr> {
    if parts.is_empty() {
        return Err(VarError::InvalidComposition("cannot concatenate an empty list".into()));
    }
    Ok(VariableExpr::Concat(parts))
}

/// `count` consecutive copies of a named variable, addressed by a zero-based
/// copy index.
pub fn replicate(count: usize, expr: VariableExpr) -> Result<VariableExpr> {
    if count == 0 {
        return Err(VarError::InvalidComposition("replication count must be positive".into()));
    }
    if expr.name().is_none() {
        return Err(VarError::InvalidComposition("only named variables can be replicated".into()));
    }
    Ok(VariableExpr::Replicate { count, expr: Box::new(expr) })
}

/// Gives a name to `expr`, producing a branch variable.
pub fn bind(name: impl Into<String>, expr: VariableExpr) -> Result<VariableExpr> {
    let name = name.into();
    if name.is_empty() {
        return Err(VarError::InvalidName);
    }
    Ok(VariableExpr::Bound { name, expr: Box::new(expr) })
}

pub(crate) fn check_leaf_kind(kind: &Kind) -> Result<()> {
    match kind {
        Kind::Branch => Err(VarError::InvalidKind("a leaf cannot be a branch".into())),
        Kind::Vector(0) => Err(VarError::InvalidKind("vectors need at least one scalar".into())),
        _ => Ok(()),
    }
}

impl VariableExpr {
    /// Name of a leaf or bound expression.
    pub fn name(&self) -> Option<&str> {
        match self {
            VariableExpr::Leaf { name, .. } | VariableExpr::Bound { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Lays out the expression. The root must be named.
    pub fn build(&self) -> Result<Hierarchy> {
        Hierarchy::build(self)
    }
}
