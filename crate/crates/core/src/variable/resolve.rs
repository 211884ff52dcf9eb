use std::fmt;
use std::sync::Arc;

use super::{ChildSlot, Hierarchy, Kind, Query, Result, VarError};

/// One node on a resolved chain: its name and, for replicated arrays, the copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainStep {
    pub name: Arc<str>,
    pub copy: Option<usize>,
}

impl fmt::Display for ChainStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.copy {
            Some(k) => write!(f, "{}[{}]", self.name, k),
            None => f.write_str(&self.name),
        }
    }
}

/// Answer to a path query: where the target lives relative to the queried root.
#[derive(Clone)]
pub struct ResolvedVariable {
    offset: usize,
    size: usize,
    kind: Kind,
    chain: Vec<ChainStep>,
    id: usize,
    target: Hierarchy,
}

impl ResolvedVariable {
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Every node from the root's child down to the target, skipped ones included.
    pub fn chain(&self) -> &[ChainStep] {
        &self.chain
    }

    /// The subtree at the target, for follow-up queries relative to it.
    pub fn hierarchy(&self) -> &Hierarchy {
        &self.target
    }

    /// Position of the target in pre-order over all addressable nodes.
    pub(crate) fn id(&self) -> usize {
        self.id
    }
}

impl PartialEq for ResolvedVariable {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset && self.size == other.size && self.kind == other.kind && self.chain == other.chain
    }
}

impl Eq for ResolvedVariable {}

impl fmt::Debug for ResolvedVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{}+{} ({})", ChainDisplay(&self.chain), self.offset, self.size, self.kind)
    }
}

struct ChainDisplay<'a>(&'a [ChainStep]);

impl fmt::Display for ChainDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Finds every root-to-descendant chain (as child slot positions) whose node
/// names contain `names` as a subsequence ending at the chain's last node.
fn matching_chains(root: &Hierarchy, names: &[&str]) -> Vec<Vec<usize>> {
    let Some((&target, required)) = names.split_last() else {
        return Vec::new();
    };

    // (parent entry, slot position) arena so chains are only materialized on a match.
    let mut arena: Vec<(usize, usize)> = Vec::new();
    let mut stack: Vec<(&Hierarchy, usize, usize)> = vec![(root, usize::MAX, 0)];
    let mut found = Vec::new();

    while let Some((node, entry, matched)) = stack.pop() {
        for (pos, slot) in node.children().iter().enumerate().rev() {
            let name = slot.hierarchy().name();
            arena.push((entry, pos));
            let here = arena.len() - 1;
            if matched == required.len() && name == target {
                let mut chain = Vec::new();
                let mut e = here;
                while e != usize::MAX {
                    chain.push(arena[e].1);
                    e = arena[e].0;
                }
                chain.reverse();
                found.push(chain);
            }
            let next = if matched < required.len() && name == required[matched] { matched + 1 } else { matched };
            stack.push((slot.hierarchy(), here, next));
        }
    }
    found
}

fn chain_slots<'h>(root: &'h Hierarchy, chain: &[usize]) -> Vec<&'h ChildSlot> {
    let mut node = root;
    chain
        .iter()
        .map(|&pos| {
            let slot = &node.children()[pos];
            node = slot.hierarchy();
            slot
        })
        .collect()
}

fn chain_label(root: &Hierarchy, chain: &[usize]) -> String {
    chain_slots(root, chain).iter().map(|s| s.hierarchy().name()).collect::<Vec<_>>().join("/")
}

fn unique_chain(root: &Hierarchy, names: &[&str], label: &dyn Fn() -> String) -> Result<Vec<usize>> {
    let mut chains = matching_chains(root, names);
    match chains.len() {
        0 => Err(VarError::UnknownPath { query: label() }),
        1 => Ok(chains.pop().unwrap()),
        _ => Err(VarError::Ambiguous { query: label(), chains: chains.iter().map(|c| chain_label(root, c)).collect() }),
    }
}

impl Hierarchy {
    /// Resolves `query` against this hierarchy.
    ///
    /// The query's names must match, in order, a subsequence of the node names
    /// along exactly one chain below this root, the last name being the chain's
    /// final node. Every replicated array on that chain, skipped or not, takes
    /// one copy index.
    pub fn resolve(&self, query: &Query) -> Result<ResolvedVariable> {
        let names: Vec<&str> = query.names().collect();
        let indices: Vec<usize> = query.indices().collect();
        let chain = unique_chain(self, &names, &|| query.to_string())?;
        let slots = chain_slots(self, &chain);

        let expected = slots.iter().filter(|s| s.is_replicated()).count();
        if expected != indices.len() {
            return Err(VarError::Arity { query: query.to_string(), expected, found: indices.len() });
        }

        let mut offset = 0;
        let mut id = 0;
        let mut steps = Vec::with_capacity(slots.len());
        let mut next_index = indices.iter();
        for slot in &slots {
            let copy = match slot.replication() {
                Some(count) => {
                    let k = *next_index.next().unwrap();
                    if k >= count {
                        return Err(VarError::IndexOutOfRange {
                            node: slot.hierarchy().name().to_owned(),
                            index: k,
                            count,
                        });
                    }
                    Some(k)
                }
                None => None,
            };
            let k = copy.unwrap_or(0);
            offset += slot.offset() + k * slot.stride();
            id += slot.id_offset() + k * slot.id_stride();
            steps.push(ChainStep { name: slot.hierarchy().shared_name().clone(), copy });
        }

        let target = slots.last().expect("matched chains are nonempty").hierarchy().clone();
        Ok(ResolvedVariable { offset, size: target.size(), kind: target.kind(), chain: steps, id, target })
    }

    /// Offset of the queried subvariable.
    pub fn index(&self, query: &Query) -> Result<usize> {
        self.resolve(query).map(|r| r.offset())
    }

    /// Pre-resolves a names-only path so that copies can later be located with
    /// integer arithmetic only.
    pub fn selector(&self, names: &[&str]) -> Result<Selector> {
        if names.is_empty() || names.iter().any(|n| n.is_empty()) {
            return Err(VarError::InvalidQuery("selectors need nonempty names".into()));
        }
        let chain = unique_chain(self, names, &|| names.join(", "))?;
        let slots = chain_slots(self, &chain);
        let mut base_offset = 0;
        let mut base_id = 0;
        let mut arrays = Vec::new();
        for slot in &slots {
            base_offset += slot.offset();
            base_id += slot.id_offset();
            if let Some(count) = slot.replication() {
                arrays.push(ArrayStep { count, stride: slot.stride(), id_stride: slot.id_stride() });
            }
        }
        let target = slots.last().unwrap().hierarchy();
        Ok(Selector {
            root_size: self.size(),
            base_offset,
            base_id,
            size: target.size(),
            kind: target.kind(),
            arrays,
            label: chain_label(self, &chain),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ArrayStep {
    count: usize,
    stride: usize,
    id_stride: usize,
}

/// A pre-resolved path whose copy indices are supplied at access time.
///
/// Locating a copy never allocates and never searches the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    root_size: usize,
    base_offset: usize,
    base_id: usize,
    size: usize,
    kind: Kind,
    arrays: Vec<ArrayStep>,
    label: String,
}

impl Selector {
    /// Number of copy indices needed to locate a single copy.
    pub fn arity(&self) -> usize {
        self.arrays.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Size of the hierarchy the selector was resolved against.
    pub fn root_size(&self) -> usize {
        self.root_size
    }

    /// Copies per replicated array, outermost first.
    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.arrays.iter().map(|a| a.count)
    }

    /// Offset of the copy addressed by `indices`.
    pub fn offset(&self, indices: &[usize]) -> Result<usize> {
        self.locate(indices).map(|(offset, _)| offset)
    }

    pub(crate) fn locate(&self, indices: &[usize]) -> Result<(usize, usize)> {
        if indices.len() != self.arrays.len() {
            return Err(VarError::Arity {
                query: self.label.clone(),
                expected: self.arrays.len(),
                found: indices.len(),
            });
        }
        let mut offset = self.base_offset;
        let mut id = self.base_id;
        for (a, &k) in self.arrays.iter().zip(indices) {
            if k >= a.count {
                return Err(VarError::IndexOutOfRange { node: self.label.clone(), index: k, count: a.count });
            }
            offset += k * a.stride;
            id += k * a.id_stride;
        }
        Ok((offset, id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query;
    use crate::variable::{bind, concat, leaf, replicate};

    fn two_level() -> Hierarchy {
        let a = leaf("a", Kind::Vector(2)).unwrap();
        let b = leaf("b", Kind::Scalar).unwrap();
        let inner = bind("inner", concat(vec![a, b]).unwrap()).unwrap();
        let once = bind("once", replicate(1, inner.clone()).unwrap()).unwrap();
        bind("root", concat(vec![replicate(3, inner).unwrap(), once]).unwrap()).unwrap().build().unwrap()
    }

    #[test]
    fn single_copy_arrays_still_take_an_index() {
        let h = two_level();
        assert!(matches!(h.resolve(&query!["once", "inner"]), Err(VarError::Arity { expected: 1, found: 0, .. })));
        assert_eq!(h.index(&query!["once", "inner", 0]).unwrap(), 9);
    }

    #[test]
    fn errors() {
        let h = two_level();
        assert!(matches!(h.resolve(&query!["nope"]), Err(VarError::UnknownPath { .. })));
        assert!(matches!(h.resolve(&query!["a", 1]), Err(VarError::Ambiguous { .. })));
        assert!(matches!(h.resolve(&query!["root"]), Err(VarError::UnknownPath { .. })));
        assert!(matches!(h.resolve(&query!["inner", 3]), Err(VarError::Ambiguous { .. })));
        assert!(matches!(h.resolve(&query!["root", "inner", 3]), Err(VarError::UnknownPath { .. })));
        // Only one `inner` array sits directly under root; `once/inner` does not match.
        let err = h.resolve(&query!["inner", "a", 3]).unwrap_err();
        assert!(matches!(err, VarError::Ambiguous { .. }), "{err:?}");
        let err = h.resolve(&query!["once", "a", 2]).unwrap_err();
        assert_eq!(err, VarError::IndexOutOfRange { node: "inner".into(), index: 2, count: 1 });
        assert!(matches!(h.resolve(&query!["once", "a", 0, 0]), Err(VarError::Arity { expected: 1, found: 2, .. })));
    }

    #[test]
    fn case_sensitive_exact_names() {
        let h = two_level();
        assert!(h.resolve(&query!["ONCE", "a", 0]).is_err());
        assert!(h.resolve(&query!["onc", "a", 0]).is_err());
    }

    #[test]
    fn selector_matches_resolve() {
        let h = two_level();
        let sel = h.selector(&["once", "b"]).unwrap();
        assert_eq!(sel.arity(), 1);
        assert_eq!(sel.offset(&[0]).unwrap(), h.index(&query!["once", "b", 0]).unwrap());
        assert!(sel.offset(&[1]).is_err());
        assert!(sel.offset(&[]).is_err());
        assert!(matches!(h.selector(&["b"]), Err(VarError::Ambiguous { .. })));
    }
}
