//! Layout references written without the library: recursive size sums and
//! exhaustive query enumeration.

use strata::fixtures;
use strata::variable::{Hierarchy, Kind, Query, Token};
use strata::varmap::{EagerLocator, EagerMap, LazyLocator, LazyMap, Locator, VariableMap, VariableMapMut};

/// Layout description written out by hand: leaf sizes and replication counts.
pub enum Tree {
    Leaf(usize),
    Branch(Vec<(usize, Tree)>),
}

pub fn total(t: &Tree) -> usize {
    match t {
        Tree::Leaf(n) => *n,
        Tree::Branch(parts) => parts.iter().map(|(count, p)| count * total(p)).sum(),
    }
}

pub fn rigid_body() -> Tree {
    Tree::Branch(vec![(1, Tree::Leaf(3)), (1, Tree::Leaf(4)), (1, Tree::Leaf(3)), (1, Tree::Leaf(3))])
}

pub fn leg_input() -> Tree {
    Tree::Branch(vec![(1, Tree::Leaf(3)), (1, Tree::Leaf(3))])
}

pub fn locomotion_tree(n: usize, legs: usize) -> Tree {
    let u = Tree::Branch(vec![(legs, leg_input())]);
    Tree::Branch(vec![(1, Tree::Branch(vec![(n + 1, rigid_body())])), (1, Tree::Branch(vec![(n, u)]))])
}

pub fn clm_tree(n: usize, robots: usize, legs: usize) -> Tree {
    let arm_input = Tree::Branch(vec![(1, Tree::Leaf(3)), (1, Tree::Leaf(3))]);
    let robot_input = Tree::Branch(vec![(legs, leg_input()), (1, arm_input)]);
    let x = Tree::Branch(vec![(1, rigid_body()), (robots, rigid_body())]);
    let u = Tree::Branch(vec![(robots, robot_input)]);
    Tree::Branch(vec![(1, Tree::Branch(vec![(n + 1, x)])), (1, Tree::Branch(vec![(n, u)]))])
}

pub fn quadrotor_tree(n: usize, rotors: usize) -> Tree {
    let u = Tree::Branch(vec![(rotors, Tree::Leaf(1))]);
    Tree::Branch(vec![(1, Tree::Branch(vec![(n + 1, rigid_body())])), (1, Tree::Branch(vec![(n, u)]))])
}

/// Full queries (every name plus every index) for all addressable nodes.
pub fn all_queries(h: &Hierarchy) -> Vec<(Query, Kind)> {
    fn walk(h: &Hierarchy, prefix: &mut Vec<Token>, out: &mut Vec<(Query, Kind)>) {
        for slot in h.children() {
            let child = slot.hierarchy();
            prefix.push(Token::Name(child.name().to_owned()));
            let copies: Vec<Option<usize>> = match slot.replication() {
                Some(n) => (0..n).map(Some).collect(),
                None => vec![None],
            };
            for copy in copies {
                if let Some(i) = copy {
                    prefix.push(Token::Index(i));
                }
                out.push((Query::new(prefix.clone()).unwrap(), child.kind()));
                walk(child, prefix, out);
                if copy.is_some() {
                    prefix.pop();
                }
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(h, &mut Vec::new(), &mut out);
    out
}

pub fn fixtures() -> Vec<Hierarchy> {
    vec![
        fixtures::quadrotor(30).unwrap(),
        fixtures::locomotion(30, 4).unwrap(),
        fixtures::loco_manipulation(10, 2, 4).unwrap(),
    ]
}

/// Eager and lazy locators agree with each other and with the resolver on
/// every full query. Returns the number of queries checked.
pub fn check_agreement(h: &Hierarchy) -> Result<usize, String> {
    let eager = EagerLocator::new(h);
    let lazy = LazyLocator::new(h);
    let queries = all_queries(h);
    if queries.len() + 1 != h.addressable_count() {
        return Err(format!("{}: {} queries for {} nodes", h.name(), queries.len(), h.addressable_count()));
    }
    for (q, kind) in &queries {
        let a = eager.locate(q).map_err(|e| format!("{q}: {e}"))?;
        let b = lazy.locate(q).map_err(|e| format!("{q}: {e}"))?;
        let r = h.resolve(q).map_err(|e| format!("{q}: {e}"))?;
        if a != b || a.kind != *kind || (a.offset, a.size) != (r.offset(), r.size()) {
            return Err(format!("{q}: eager {a:?}, lazy {b:?}"));
        }
    }
    Ok(queries.len())
}

/// Writes every leaf through the lazy map over a sentinel-filled buffer and
/// checks each element is written exactly once; the eager map must produce the
/// same buffer.
pub fn check_tiling(h: &Hierarchy) -> Result<(), String> {
    const SENTINEL: f64 = -7.5;
    let leaves: Vec<Query> =
        all_queries(h).into_iter().filter(|(_, kind)| *kind != Kind::Branch).map(|(q, _)| q).collect();
    let mut buffer = vec![SENTINEL; h.size()];
    let mut writes = vec![0usize; h.size()];
    {
        let mut lazy = LazyMap::new(h, &mut buffer).map_err(|e| e.to_string())?;
        for q in &leaves {
            let slot = lazy.locator().locate(q).map_err(|e| e.to_string())?;
            for i in slot.range() {
                writes[i] += 1;
            }
            let values: Vec<f64> = slot.range().map(|i| i as f64).collect();
            lazy.get_mut(q).and_then(|mut v| v.write(&values)).map_err(|e| e.to_string())?;
        }
    }
    if let Some(i) = writes.iter().position(|w| *w != 1) {
        return Err(format!("{}: element {i} written {} times", h.name(), writes[i]));
    }
    if !buffer.iter().enumerate().all(|(i, v)| *v == i as f64) {
        return Err(format!("{}: lazy writes landed out of place", h.name()));
    }
    let mut map = EagerMap::<f64>::new(h);
    map.as_mut_slice().fill(SENTINEL);
    for q in &leaves {
        let slot = map.locator().locate(q).map_err(|e| e.to_string())?;
        let values: Vec<f64> = slot.range().map(|i| i as f64).collect();
        map.get_mut(q).and_then(|mut v| v.write(&values)).map_err(|e| e.to_string())?;
    }
    if map.into_buffer() != buffer {
        return Err(format!("{}: eager and lazy buffers differ", h.name()));
    }
    Ok(())
}
