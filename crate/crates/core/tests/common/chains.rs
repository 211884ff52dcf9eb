//! Brute-force chain enumeration: the reference for path resolution.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata::variable::{bind, concat, leaf, replicate, Kind, Query, Token, VarError, VariableExpr};

pub const NAMES: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

/// Test-side tree description, independent of the library's node layout.
#[derive(Debug, Clone)]
pub struct Spec {
    pub name: String,
    pub kind: Kind,
    pub children: Vec<(Option<usize>, Spec)>,
}

impl Spec {
    pub fn size(&self) -> usize {
        match self.kind {
            Kind::Branch => self.children.iter().map(|(c, s)| c.unwrap_or(1) * s.size()).sum(),
            Kind::Scalar => 1,
            Kind::Vector(n) => n,
            Kind::Quaternion => 4,
        }
    }

    pub fn expr(&self) -> VariableExpr {
        if self.kind != Kind::Branch {
            return leaf(self.name.as_str(), self.kind).unwrap();
        }
        let parts = self
            .children
            .iter()
            .map(|(count, child)| match count {
                Some(n) => replicate(*n, child.expr()).unwrap(),
                None => child.expr(),
            })
            .collect();
        bind(self.name.as_str(), concat(parts).unwrap()).unwrap()
    }
}

pub fn random_spec(rng: &mut ChaCha8Rng, name: &str, depth: usize) -> Spec {
    let make_leaf = depth >= 5 || (depth > 0 && rng.random_bool(0.35));
    if make_leaf {
        let kind = match rng.random_range(0..3) {
            0 => Kind::Scalar,
            1 => Kind::Vector(rng.random_range(2..=4)),
            _ => Kind::Quaternion,
        };
        return Spec { name: name.to_owned(), kind, children: vec![] };
    }
    let fanout = rng.random_range(1..=4);
    let mut names: Vec<&str> = NAMES.to_vec();
    let mut children = Vec::new();
    for _ in 0..fanout {
        let i = rng.random_range(0..names.len());
        let child_name = names.swap_remove(i);
        let count = rng.random_bool(0.4).then(|| rng.random_range(1..=6));
        children.push((count, random_spec(rng, child_name, depth + 1)));
    }
    Spec { name: name.to_owned(), kind: Kind::Branch, children }
}

#[derive(Debug, Clone)]
pub struct ChainNode {
    pub name: String,
    pub count: Option<usize>,
    pub offset: usize,
    pub size: usize,
    pub kind: Kind,
}

/// Every chain from a child of the root down to any descendant.
pub fn all_chains(spec: &Spec) -> Vec<Vec<ChainNode>> {
    fn walk(spec: &Spec, prefix: &mut Vec<ChainNode>, out: &mut Vec<Vec<ChainNode>>) {
        let mut offset = 0;
        for (count, child) in &spec.children {
            prefix.push(ChainNode {
                name: child.name.clone(),
                count: *count,
                offset,
                size: child.size(),
                kind: child.kind,
            });
            out.push(prefix.clone());
            walk(child, prefix, out);
            prefix.pop();
            offset += count.unwrap_or(1) * child.size();
        }
    }
    let mut out = Vec::new();
    walk(spec, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Found { offset: usize, size: usize, kind: Kind },
    Unknown,
    Ambiguous(usize),
    Arity,
    Range,
}

pub fn is_subsequence(needle: &[&str], hay: &[&str]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

pub fn oracle(chains: &[Vec<ChainNode>], names: &[&str], indices: &[usize]) -> Outcome {
    let matching: Vec<&Vec<ChainNode>> = chains
        .iter()
        .filter(|c| {
            let chain_names: Vec<&str> = c.iter().map(|n| n.name.as_str()).collect();
            chain_names.last() == names.last()
                && is_subsequence(&names[..names.len() - 1], &chain_names[..chain_names.len() - 1])
        })
        .collect();
    let chain = match matching.len() {
        0 => return Outcome::Unknown,
        1 => matching[0],
        n => return Outcome::Ambiguous(n),
    };
    let replicated: Vec<&ChainNode> = chain.iter().filter(|n| n.count.is_some()).collect();
    if replicated.len() != indices.len() {
        return Outcome::Arity;
    }
    let mut idx = indices.iter();
    let mut offset = 0;
    for node in chain {
        let copy = match node.count {
            Some(count) => {
                let i = *idx.next().unwrap();
                if i >= count {
                    return Outcome::Range;
                }
                i
            }
            None => 0,
        };
        offset += node.offset + copy * node.size;
    }
    let last = chain.last().unwrap();
    Outcome::Found { offset, size: last.size, kind: last.kind }
}

pub fn outcome(result: Result<strata::variable::ResolvedVariable, VarError>) -> Outcome {
    match result {
        Ok(r) => Outcome::Found { offset: r.offset(), size: r.size(), kind: r.kind() },
        Err(VarError::UnknownPath { .. }) => Outcome::Unknown,
        Err(VarError::Ambiguous { chains, .. }) => Outcome::Ambiguous(chains.len()),
        Err(VarError::Arity { .. }) => Outcome::Arity,
        Err(VarError::IndexOutOfRange { .. }) => Outcome::Range,
        Err(e) => panic!("unexpected error {e}"),
    }
}

/// A query aimed at `chain`: a subsequence of its names ending at its last
/// node, with indices (sometimes wrong) interleaved after the first name.
pub fn query_for(rng: &mut ChaCha8Rng, chain: &[ChainNode]) -> (Vec<String>, Vec<usize>) {
    let mut names: Vec<String> =
        chain[..chain.len() - 1].iter().filter(|_| rng.random_bool(0.5)).map(|n| n.name.clone()).collect();
    names.push(chain.last().unwrap().name.clone());
    let mut indices: Vec<usize> = chain
        .iter()
        .filter_map(|n| n.count)
        .map(|c| if rng.random_bool(0.05) { c } else { rng.random_range(0..c) })
        .collect();
    match rng.random_range(0..20) {
        0 => indices.push(0),
        1 => {
            indices.pop();
        }
        _ => {}
    }
    (names, indices)
}

pub fn tokens(rng: &mut ChaCha8Rng, names: &[String], indices: &[usize]) -> Query {
    // Each index goes after a random name, keeping the indices in order.
    let mut after: Vec<usize> = indices.iter().map(|_| rng.random_range(0..names.len())).collect();
    after.sort_unstable();
    let mut tokens = Vec::new();
    let mut next = indices.iter().zip(after).peekable();
    for (k, name) in names.iter().enumerate() {
        tokens.push(Token::Name(name.clone()));
        while let Some((i, _)) = next.next_if(|(_, at)| *at == k) {
            tokens.push(Token::Index(*i));
        }
    }
    Query::new(tokens).unwrap()
}

/// Outcome counts over the queries of one hierarchy.
#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub found: usize,
    pub ambiguous: usize,
    pub rejected: usize,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Tally) {
        self.found += o.found;
        self.ambiguous += o.ambiguous;
        self.rejected += o.rejected;
    }
}

/// Checks 24 queries on one random hierarchy.
pub fn check_tree(seed: u64) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(&mut rng, "root", 0);
    let h = spec.expr().build().unwrap();
    if h.size() != spec.size() {
        return Err(format!("size {} vs {}", h.size(), spec.size()));
    }
    let mut tally = Tally::default();
    let chains = all_chains(&spec);
    for _ in 0..24 {
        let (names, indices) = if rng.random_bool(0.8) {
            let chain = chains.choose(&mut rng).unwrap();
            query_for(&mut rng, chain)
        } else {
            let len = rng.random_range(1..=3);
            let names = (0..len).map(|_| NAMES.choose(&mut rng).unwrap().to_string()).collect();
            let indices = (0..rng.random_range(0..3)).map(|_| rng.random_range(0..6)).collect();
            (names, indices)
        };
        let query = tokens(&mut rng, &names, &indices);
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let expected = oracle(&chains, &name_refs, &indices);
        let got = outcome(h.resolve(&query));
        if got != expected {
            return Err(format!("query {query}: got {got:?}, expected {expected:?} on\n{}", h.render()));
        }
        match got {
            Outcome::Found { .. } => tally.found += 1,
            Outcome::Ambiguous(_) => tally.ambiguous += 1,
            _ => tally.rejected += 1,
        }
    }
    Ok(tally)
}
