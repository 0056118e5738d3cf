//! Rooted trees, their statistics, products, and the 𝒬 / 𝒟 maps on finite
//! linear combinations of trees.
//!
//! Trees are canonical: children are kept sorted under the total order
//! "by order, then lexicographically by children", which is exactly the
//! derived `Ord` of [`RootedTree`].

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Canonical unordered rooted tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTree {
    // Field order matters: the derived `Ord` compares `order` first.
    order: usize,
    children: Vec<RootedTree>,
}

/// Error from parsing the bracket form.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed tree `{0}`: expected nested brackets such as \"[[][]]\"")]
pub struct ParseTreeError(pub String);

impl RootedTree {
    /// The single vertex •.
    pub fn leaf() -> RootedTree {
        RootedTree { order: 1, children: Vec::new() }
    }

    /// `[t₁ t₂ … t_n]`: a new root joined to the roots of the given trees.
    pub fn graft(children: impl IntoIterator<Item = RootedTree>) -> RootedTree {
        let mut children: Vec<RootedTree> = children.into_iter().collect();
        children.sort();
        let order = 1 + children.iter().map(|c| c.order).sum::<usize>();
        RootedTree { order, children }
    }

    /// Root-merge product `t₁·t₂·…·t_n`: the children multisets are united.
    ///
    /// # Panics
    /// On an empty input.
    pub fn merge<'a>(ts: impl IntoIterator<Item = &'a RootedTree>) -> RootedTree {
        let mut any = false;
        let mut children = Vec::new();
        for t in ts {
            any = true;
            children.extend(t.children.iter().cloned());
        }
        assert!(any, "merge needs at least one tree");
        RootedTree::graft(children)
    }

    /// Beta-product `t₁ * t₂ = t₁ · [t₂]`.
    pub fn beta_product(t1: &RootedTree, t2: &RootedTree) -> RootedTree {
        let mut children = t1.children.clone();
        children.push(t2.clone());
        RootedTree::graft(children)
    }

    /// Bushy tree `[•ⁿ⁻¹]` with n vertices (n ≥ 1).
    pub fn bushy(n: usize) -> RootedTree {
        assert!(n >= 1);
        RootedTree::graft(std::iter::repeat_n(RootedTree::leaf(), n - 1))
    }

    /// Tall chain with n vertices (n ≥ 1).
    pub fn tall(n: usize) -> RootedTree {
        assert!(n >= 1);
        (1..n).fold(RootedTree::leaf(), |t, _| RootedTree::graft([t]))
    }

    /// Number of vertices |t|.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Sorted children.
    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Tree factorial t! = |t| · Π (child)!.
    pub fn density(&self) -> u128 {
        self.children.iter().fold(self.order as u128, |acc, c| acc * c.density())
    }

    /// Order of the symmetry group σ(t).
    pub fn symmetry(&self) -> u128 {
        let mut s: u128 = 1;
        for (child, mult) in group_children(&self.children) {
            s *= factorial(mult) * child.symmetry().pow(mult as u32);
        }
        s
    }

    /// Number of monotonic labelings α(t) = |t|! / (t! · σ(t)).
    pub fn labelings(&self) -> u128 {
        let num = factorial(self.order);
        let den = self.density() * self.symmetry();
        assert_eq!(num % den, 0, "non-integral labeling count for {self}");
        num / den
    }

    /// Nested-bracket text, "[]" for •.
    pub fn to_bracket(&self) -> String {
        let mut s = String::with_capacity(2 * self.order);
        self.write_bracket(&mut s);
        s
    }

    fn write_bracket(&self, s: &mut String) {
        s.push('[');
        for c in &self.children {
            c.write_bracket(s);
        }
        s.push(']');
    }

    /// Parses the nested-bracket form (whitespace ignored).
    pub fn parse(s: &str) -> Result<RootedTree, ParseTreeError> {
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let t = parse_at(&bytes, &mut pos).ok_or_else(|| ParseTreeError(s.to_string()))?;
        if pos != bytes.len() {
            return Err(ParseTreeError(s.to_string()));
        }
        Ok(t)
    }
}

fn parse_at(b: &[u8], pos: &mut usize) -> Option<RootedTree> {
    if b.get(*pos) != Some(&b'[') {
        return None;
    }
    *pos += 1;
    let mut children = Vec::new();
    while b.get(*pos) == Some(&b'[') {
        children.push(parse_at(b, pos)?);
    }
    if b.get(*pos) != Some(&b']') {
        return None;
    }
    *pos += 1;
    Some(RootedTree::graft(children))
}

/// Groups equal children: (child, multiplicity) in canonical order.
fn group_children(children: &[RootedTree]) -> Vec<(&RootedTree, usize)> {
    let mut out: Vec<(&RootedTree, usize)> = Vec::new();
    for c in children {
        match out.last_mut() {
            Some((t, m)) if *t == c => *m += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

/// n! as u128 (n ≤ 34).
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracket())
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracket())
    }
}

impl FromStr for RootedTree {
    type Err = ParseTreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootedTree::parse(s)
    }
}

/// Every canonical rooted tree with order ≤ `max_order`, sorted by
/// (order, canonical order), each exactly once.
pub fn enumerate_trees(max_order: usize) -> Vec<RootedTree> {
    Forest::new(max_order).trees
}

/// Process-wide forest covering at least `max_order`, built once and shared.
pub fn shared_forest(max_order: usize) -> Arc<Forest> {
    static CACHE: OnceLock<Mutex<Option<Arc<Forest>>>> = OnceLock::new();
    let mut slot = CACHE.get_or_init(|| Mutex::new(None)).lock().unwrap_or_else(|e| e.into_inner());
    match slot.as_ref() {
        Some(f) if f.max_order() >= max_order => f.clone(),
        _ => {
            let f = Arc::new(Forest::new(max_order));
            *slot = Some(f.clone());
            f
        }
    }
}

/// Enumerated trees with indices, cached statistics, and the decomposition
/// `t = t′ · [u]` (t′ = t without its last child u) used for Φ recursions.
#[derive(Debug, Clone)]
pub struct Forest {
    max_order: usize,
    trees: Vec<RootedTree>,
    index: HashMap<RootedTree, usize>,
    /// (index of t minus last child, index of last child); `None` for •.
    split: Vec<Option<(usize, usize)>>,
    density: Vec<u128>,
    symmetry: Vec<u128>,
    /// Start index of each order; `starts[n]..starts[n+1]` are trees of order n.
    starts: Vec<usize>,
}

impl Forest {
    /// Enumerates all trees with order ≤ `max_order` (≥ 1).
    pub fn new(max_order: usize) -> Forest {
        assert!(max_order >= 1, "max_order must be at least 1");
        let mut trees: Vec<RootedTree> = vec![RootedTree::leaf()];
        let mut starts = vec![0, 0, 1];
        for n in 2..=max_order {
            let mut level = Vec::new();
            let mut stack = Vec::new();
            multisets(&trees, n - 1, 0, &mut stack, &mut level);
            level.sort();
            trees.extend(level);
            starts.push(trees.len());
        }
        let index: HashMap<RootedTree, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let split = trees
            .iter()
            .map(|t| {
                let (last, rest) = t.children.split_last()?;
                let stem = RootedTree::graft(rest.iter().cloned());
                Some((index[&stem], index[last]))
            })
            .collect();
        let density = trees.iter().map(RootedTree::density).collect();
        let symmetry = trees.iter().map(RootedTree::symmetry).collect();
        Forest { max_order, trees, index, split, density, symmetry, starts }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.trees
    }

    pub fn tree(&self, i: usize) -> &RootedTree {
        &self.trees[i]
    }

    pub fn index_of(&self, t: &RootedTree) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Index range of the trees of order `n`.
    pub fn order_range(&self, n: usize) -> std::ops::Range<usize> {
        if n == 0 || n > self.max_order {
            return 0..0;
        }
        self.starts[n]..self.starts[n + 1]
    }

    /// Index range of all trees with order ≤ `n`.
    pub fn up_to(&self, n: usize) -> std::ops::Range<usize> {
        0..self.starts[n.min(self.max_order) + 1]
    }

    /// `(stem, last_child)` indices with t = stem · [last_child].
    pub fn split(&self, i: usize) -> Option<(usize, usize)> {
        self.split[i]
    }

    pub fn density(&self, i: usize) -> u128 {
        self.density[i]
    }

    pub fn symmetry(&self, i: usize) -> u128 {
        self.symmetry[i]
    }

    pub fn labelings(&self, i: usize) -> u128 {
        factorial(self.trees[i].order) / (self.density[i] * self.symmetry[i])
    }

    /// Number of trees of each order 1..=max_order.
    pub fn counts(&self) -> Vec<usize> {
        (1..=self.max_order).map(|n| self.order_range(n).len()).collect()
    }
}

/// Collects graft(multiset) for every non-decreasing index sequence over
/// `trees` whose orders sum to `remaining`.
fn multisets(trees: &[RootedTree], remaining: usize, from: usize, stack: &mut Vec<usize>, out: &mut Vec<RootedTree>) {
    if remaining == 0 {
        out.push(RootedTree {
            order: 1 + stack.iter().map(|&i| trees[i].order).sum::<usize>(),
            children: stack.iter().map(|&i| trees[i].clone()).collect(),
        });
        return;
    }
    for i in from..trees.len() {
        if trees[i].order > remaining {
            break;
        }
        stack.push(i);
        multisets(trees, remaining - trees[i].order, i, stack, out);
        stack.pop();
    }
}

/// Finite rational linear combination of rooted trees (an element of 𝒯).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TreeCombination {
    terms: BTreeMap<RootedTree, BigRational>,
}

impl TreeCombination {
    pub fn zero() -> TreeCombination {
        TreeCombination::default()
    }

    /// The combination `1·t`.
    pub fn single(t: RootedTree) -> TreeCombination {
        TreeCombination::term(t, BigRational::one())
    }

    /// The combination `c·t`.
    pub fn term(t: RootedTree, c: BigRational) -> TreeCombination {
        let mut s = TreeCombination::zero();
        s.add_term(t, c);
        s
    }

    /// Adds `c·t` in place, dropping terms that cancel.
    pub fn add_term(&mut self, t: RootedTree, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `t` (zero if absent).
    pub fn coeff(&self, t: &RootedTree) -> BigRational {
        self.terms.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in canonical tree order.
    pub fn iter(&self) -> impl Iterator<Item = (&RootedTree, &BigRational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &TreeCombination) -> TreeCombination {
        let mut s = self.clone();
        for (t, c) in &other.terms {
            s.add_term(t.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &TreeCombination) -> TreeCombination {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, a: &BigRational) -> TreeCombination {
        if a.is_zero() {
            return TreeCombination::zero();
        }
        TreeCombination { terms: self.terms.iter().map(|(t, c)| (t.clone(), c * a)).collect() }
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    /// Applies a tree-to-combination map linearly.
    pub fn map_linear(&self, f: impl Fn(&RootedTree) -> TreeCombination) -> TreeCombination {
        let mut out = TreeCombination::zero();
        for (t, c) in &self.terms {
            out = out.add(&f(t).scale(c));
        }
        out
    }
}

impl From<RootedTree> for TreeCombination {
    fn from(t: RootedTree) -> Self {
        TreeCombination::single(t)
    }
}

impl fmt::Display for TreeCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format!("({c})·{t}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for TreeCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn inv_density(t: &RootedTree) -> BigRational {
    BigRational::new(1.into(), t.density().into())
}

/// 𝒬(t) = [t] − (1/t!)·[•^{|t|}].
pub fn q_map(t: &RootedTree) -> TreeCombination {
    let mut s = TreeCombination::single(RootedTree::graft([t.clone()]));
    s.add_term(RootedTree::bushy(t.order + 1), -inv_density(t));
    s
}

/// 𝒬 extended linearly to combinations.
pub fn q_map_linear(ts: &TreeCombination) -> TreeCombination {
    ts.map_linear(q_map)
}

/// 𝒟(t, T) = t * T + (1/t!)·[•^{|t|}]·T − (1/t!)·T, linear in T.
pub fn d_map(t: &RootedTree, ts: &TreeCombination) -> TreeCombination {
    let k = inv_density(t);
    let bushy = RootedTree::bushy(t.order + 1);
    ts.map_linear(|u| {
        let mut s = TreeCombination::single(RootedTree::beta_product(t, u));
        s.add_term(RootedTree::merge([&bushy, u]), k.clone());
        s.add_term(u.clone(), -k.clone());
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> RootedTree {
        s.parse().unwrap()
    }

    #[test]
    fn basic_statistics() {
        assert_eq!(t("[]").order(), 1);
        assert_eq!(t("[[][]]").order(), 3);
        assert_eq!(t("[[][]]").density(), 3);
        assert_eq!(t("[[][]]").symmetry(), 2);
        assert_eq!(t("[[[]][]]").symmetry(), 1);
        assert_eq!(t("[[[]]]").labelings(), 1);
        assert_eq!(RootedTree::tall(10).order(), 10);
        assert_eq!(RootedTree::tall(6).density(), 720);
    }

    #[test]
    fn bushy_is_graft_of_leaves() {
        assert_eq!(RootedTree::bushy(1), RootedTree::leaf());
        assert_eq!(RootedTree::bushy(3), t("[[][]]"));
        assert_eq!(RootedTree::graft([]), RootedTree::leaf());
    }

    #[test]
    fn small_counts() {
        assert_eq!(Forest::new(5).counts(), vec![1, 1, 2, 4, 9]);
        assert_eq!(enumerate_trees(1), vec![RootedTree::leaf()]);
    }

    #[test]
    fn canonical_order_level_three() {
        let f = Forest::new(3);
        let names: Vec<String> = f.trees().iter().map(|t| t.to_bracket()).collect();
        assert_eq!(names, vec!["[]", "[[]]", "[[][]]", "[[[]]]"]);
    }

    #[test]
    fn split_reassembles() {
        let f = Forest::new(6);
        for i in 0..f.len() {
            if let Some((stem, last)) = f.split(i) {
                assert_eq!(&RootedTree::beta_product(f.tree(stem), f.tree(last)), f.tree(i));
            }
        }
    }

    #[test]
    fn q_map_examples() {
        assert!(q_map(&RootedTree::leaf()).is_zero());
        let q = q_map(&t("[[]]"));
        assert_eq!(q.coeff(&t("[[[]]]")), BigRational::one());
        assert_eq!(q.coeff(&t("[[][]]")), BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(RootedTree::parse("[[]").is_err());
        assert!(RootedTree::parse("[]]").is_err());
        assert!(RootedTree::parse("x").is_err());
    }
}
