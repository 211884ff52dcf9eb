use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::expr::check_leaf_kind;
use super::{Kind, Result, VarError, VariableExpr};

/// An immutable, fully laid-out variable tree.
///
/// Cloning is cheap: nodes are reference counted and shared between copies, so
/// the `N + 1` copies of a state occupy a single node with a replication count.
#[derive(Clone, PartialEq, Eq)]
pub struct Hierarchy {
    node: Arc<Node>,
}

#[derive(PartialEq, Eq)]
struct Node {
    name: Arc<str>,
    kind: Kind,
    size: usize,
    // Addressable nodes in this subtree, counting every copy and the node itself.
    addressable: usize,
    children: Vec<ChildSlot>,
}

/// A child of a branch: either a single subvariable or an array of copies.
#[derive(Clone, PartialEq, Eq)]
pub struct ChildSlot {
    hierarchy: Hierarchy,
    replication: Option<usize>,
    offset: usize,
    id_offset: usize,
}

impl ChildSlot {
    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    /// `Some(count)` for arrays created by replication, even when `count == 1`.
    pub fn replication(&self) -> Option<usize> {
        self.replication
    }

    pub fn is_replicated(&self) -> bool {
        self.replication.is_some()
    }

    /// Number of copies laid out back to back.
    pub fn count(&self) -> usize {
        self.replication.unwrap_or(1)
    }

    /// Offset of the first copy relative to the parent.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Distance between consecutive copies.
    pub fn stride(&self) -> usize {
        self.hierarchy.size()
    }

    /// Total number of scalars covered by all copies.
    pub fn span(&self) -> usize {
        self.count() * self.stride()
    }

    pub(crate) fn id_offset(&self) -> usize {
        self.id_offset
    }

    pub(crate) fn id_stride(&self) -> usize {
        self.hierarchy.addressable_count()
    }
}

struct Part {
    hierarchy: Hierarchy,
    replication: Option<usize>,
}

enum Built {
    Named(Hierarchy),
    Parts(Vec<Part>),
}

impl Built {
    fn into_parts(self) -> Vec<Part> {
        match self {
            Built::Named(hierarchy) => vec![Part { hierarchy, replication: None }],
            Built::Parts(parts) => parts,
        }
    }
}

fn overflow() -> VarError {
    VarError::InvalidComposition("hierarchy size overflows usize".into())
}

impl Hierarchy {
    /// Builds an expression whose root is a leaf or a bound branch.
    ///
    /// The traversal uses an explicit stack, so arbitrarily deep declarations
    /// never touch the call stack.
    pub fn build(expr: &VariableExpr) -> Result<Hierarchy> {
        let mut pending: Vec<(&VariableExpr, bool)> = vec![(expr, false)];
        let mut values: Vec<Built> = Vec::new();

        while let Some((e, expanded)) = pending.pop() {
            if !expanded {
                match e {
                    VariableExpr::Leaf { name, kind } => {
                        if name.is_empty() {
                            return Err(VarError::InvalidName);
                        }
                        check_leaf_kind(kind)?;
                        values.push(Built::Named(Hierarchy::leaf(name, *kind)));
                    }
                    VariableExpr::Concat(parts) => {
                        if parts.is_empty() {
                            return Err(VarError::InvalidComposition("cannot concatenate an empty list".into()));
                        }
                        pending.push((e, true));
                        pending.extend(parts.iter().rev().map(|p| (p, false)));
                    }
                    VariableExpr::Replicate { expr: inner, .. } | VariableExpr::Bound { expr: inner, .. } => {
                        pending.push((e, true));
                        pending.push((inner, false));
                    }
                }
                continue;
            }

            match e {
                VariableExpr::Concat(parts) => {
                    let start = values.len() - parts.len();
                    let flat = values.drain(start..).flat_map(Built::into_parts).collect();
                    values.push(Built::Parts(flat));
                }
                VariableExpr::Replicate { count, .. } => {
                    if *count == 0 {
                        return Err(VarError::InvalidComposition("replication count must be positive".into()));
                    }
                    let hierarchy = match values.pop() {
                        Some(Built::Named(h)) => h,
                        _ => return Err(VarError::InvalidComposition("only named variables can be replicated".into())),
                    };
                    values.push(Built::Parts(vec![Part { hierarchy, replication: Some(*count) }]));
                }
                VariableExpr::Bound { name, .. } => {
                    if name.is_empty() {
                        return Err(VarError::InvalidName);
                    }
                    let parts = values.pop().expect("bound expression value").into_parts();
                    values.push(Built::Named(Hierarchy::branch(name, parts)?));
                }
                VariableExpr::Leaf { .. } => unreachable!("leaves are never expanded"),
            }
        }

        match values.pop() {
            Some(Built::Named(h)) => Ok(h),
            _ => Err(VarError::InvalidComposition("the root of a hierarchy must be named, wrap it with `bind`".into())),
        }
    }

    fn leaf(name: &str, kind: Kind) -> Hierarchy {
        Hierarchy {
            node: Arc::new(Node {
                name: name.into(),
                kind,
                size: kind.leaf_size().expect("leaf kind"),
                addressable: 1,
                children: Vec::new(),
            }),
        }
    }

    fn branch(name: &str, parts: Vec<Part>) -> Result<Hierarchy> {
        let mut seen = HashSet::new();
        let mut children = Vec::with_capacity(parts.len());
        let mut offset = 0usize;
        let mut id_offset = 1usize;
        for Part { hierarchy, replication } in parts {
            if !seen.insert(hierarchy.node.name.clone()) {
                return Err(VarError::DuplicateName { parent: name.to_owned(), name: hierarchy.name().to_owned() });
            }
            let count = replication.unwrap_or(1);
            let span = count.checked_mul(hierarchy.size()).ok_or_else(overflow)?;
            let ids = count.checked_mul(hierarchy.addressable_count()).ok_or_else(overflow)?;
            children.push(ChildSlot { hierarchy, replication, offset, id_offset });
            offset = offset.checked_add(span).ok_or_else(overflow)?;
            id_offset = id_offset.checked_add(ids).ok_or_else(overflow)?;
        }
        Ok(Hierarchy {
            node: Arc::new(Node {
                name: name.into(),
                kind: Kind::Branch,
                size: offset,
                addressable: id_offset,
                children,
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.node.name
    }

    pub(crate) fn shared_name(&self) -> &Arc<str> {
        &self.node.name
    }

    pub fn kind(&self) -> Kind {
        self.node.kind
    }

    /// Number of scalars spanned by the whole subtree.
    pub fn size(&self) -> usize {
        self.node.size
    }

    pub fn children(&self) -> &[ChildSlot] {
        &self.node.children
    }

    pub fn child(&self, name: &str) -> Option<&ChildSlot> {
        self.node.children.iter().find(|c| c.hierarchy.name() == name)
    }

    pub fn is_leaf(&self) -> bool {
        self.node.children.is_empty()
    }

    /// Number of individually addressable nodes, i.e. the length of an eager
    /// map's view table.
    pub fn addressable_count(&self) -> usize {
        self.node.addressable
    }

    /// Indented text dump, one line per declared subvariable:
    /// `name[kind,size]@offset` followed by ` ×count` for replicated arrays.
    /// Offsets are absolute and refer to the first copy of every ancestor.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut stack: Vec<(&Hierarchy, usize, usize, Option<usize>)> = vec![(self, 0, 0, None)];
        while let Some((h, depth, offset, replication)) = stack.pop() {
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&format!("{}[{},{}]@{}", h.name(), h.kind(), h.size(), offset));
            if let Some(n) = replication {
                out.push_str(&format!(" ×{n}"));
            }
            out.push('\n');
            for c in h.children().iter().rev() {
                stack.push((&c.hierarchy, depth + 1, offset + c.offset, c.replication));
            }
        }
        out
    }
}

impl fmt::Debug for Hierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hierarchy({}[{},{}])", self.name(), self.kind(), self.size())
    }
}

impl fmt::Debug for ChildSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChildSlot")
            .field("name", &self.hierarchy.name())
            .field("replication", &self.replication)
            .field("offset", &self.offset)
            .finish()
    }
}

impl fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
