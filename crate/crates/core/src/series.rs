//! Level-by-level evaluation of series indexed by words.
//!
//! Terms live on the nodes of a rooted tree whose depth is the word length.
//! Levels are summed with compensated arithmetic; the frontier is stored
//! while it fits under a node budget and deeper levels are reached by
//! depth-first search from that stored frontier.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::numeric::{reduce_mod_2pi_i, ComplexSum, CompensatedSum};
use crate::symbolic::Word;
use crate::{Complex, Error, Result};

/// Word packed four bits per letter, at most 32 letters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PackedWord {
    bits: u128,
    len: u8,
}

impl PackedWord {
    pub const MAX_LEN: usize = 32;

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, i: usize) -> u8 {
        ((self.bits >> (4 * i)) & 0xf) as u8
    }

    pub fn last(&self) -> Option<u8> {
        (self.len > 0).then(|| self.letter(self.len() - 1))
    }

    /// Appends a letter at the end.
    pub fn push(self, letter: u8) -> Self {
        debug_assert!(self.len() < Self::MAX_LEN);
        Self { bits: self.bits | (u128::from(letter & 0xf) << (4 * self.len)), len: self.len + 1 }
    }

    /// Prepends a letter at the front.
    pub fn prepend(self, letter: u8) -> Self {
        debug_assert!(self.len() < Self::MAX_LEN);
        Self { bits: (self.bits << 4) | u128::from(letter & 0xf), len: self.len + 1 }
    }

    pub fn to_word(self) -> Word {
        Word((0..self.len()).map(|i| self.letter(i)).collect())
    }
}

/// A tree of series terms, one level per word length.
pub trait TermTree {
    type Node: Clone;

    /// Nodes of the first level.
    fn roots(&self) -> Result<Vec<Self::Node>>;

    /// Appends the children of `node` to `out`.
    fn children(&self, node: &Self::Node, out: &mut Vec<Self::Node>) -> Result<()>;

    /// The term carried by `node`, or `None` when the node only serves as
    /// an interior vertex of the tree.
    fn term(&self, node: &Self::Node) -> Result<Option<Complex>>;

    /// The word labelling `node`.
    fn word(&self, node: &Self::Node) -> Word;
}

/// Stopping parameters for [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub eps: f64,
    /// Maximum number of levels.
    pub max_levels: usize,
    /// Largest frontier kept in memory before switching to depth-first
    /// search.
    pub frontier_cap: usize,
}

impl SeriesConfig {
    pub fn new(eps: f64, max_levels: usize) -> Self {
        Self { eps, max_levels, frontier_cap: 1 << 20 }
    }
}

/// Two sides of an evaluated identity together with convergence data.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    /// Sum of absolute values of the terms of each level.
    pub level_sums: Vec<f64>,
    /// Signed sum of the terms of each level.
    pub level_totals: Vec<Complex>,
    /// Word length of the first level.
    pub first_length: usize,
    pub partial_sum: Complex,
    pub lhs: Complex,
    pub lambda1_estimate: f64,
    pub tail_bound: f64,
    /// Whether the tail bound cleared the requested tolerance.
    pub converged: bool,
    /// Whether the identity holds modulo `2 pi i`.
    pub modulo_2pi_i: bool,
}

impl SeriesReport {
    /// `|partial_sum - lhs|`, with the imaginary part reduced to (-pi, pi]
    /// for identities that hold modulo `2 pi i`.
    pub fn gap(&self) -> f64 {
        let d = self.partial_sum - self.lhs;
        if self.modulo_2pi_i {
            reduce_mod_2pi_i(d).norm()
        } else {
            d.norm()
        }
    }

    /// Length of the longest words summed.
    pub fn depth(&self) -> usize {
        self.first_length + self.level_sums.len().saturating_sub(1)
    }
}

/// Geometric mean of the last (up to) five consecutive level-sum ratios.
pub fn lambda_estimate(level_sums: &[f64]) -> Option<f64> {
    let n = level_sums.len();
    if n < 2 {
        return None;
    }
    let start = n.saturating_sub(6);
    let window = &level_sums[start..];
    let mut acc = 0.0;
    let mut count = 0;
    for pair in window.windows(2) {
        if pair[0] > 0.0 && pair[1] > 0.0 {
            acc += Float::ln(pair[1] / pair[0]);
            count += 1;
        } else if pair[1] == 0.0 {
            return Some(0.0);
        }
    }
    (count > 0).then(|| Float::exp(acc / count as f64))
}

/// Outcome of feeding one level to a [`SeriesAccumulator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelStatus {
    Continue,
    Converged,
}

/// Running state of a level-by-level series evaluation.
#[derive(Debug, Clone)]
pub struct SeriesAccumulator {
    eps: f64,
    level_sums: Vec<f64>,
    level_totals: Vec<Complex>,
    partial: ComplexSum,
    rising: usize,
    lambda: f64,
    tail: f64,
}

impl SeriesAccumulator {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            level_sums: Vec::new(),
            level_totals: Vec::new(),
            partial: ComplexSum::new(),
            rising: 0,
            lambda: f64::NAN,
            tail: f64::INFINITY,
        }
    }

    pub fn levels(&self) -> usize {
        self.level_sums.len()
    }

    /// Records one level; fails once level sums have failed to decrease
    /// five times in a row.
    pub fn push_level(&mut self, abs_sum: f64, total: Complex) -> Result<LevelStatus> {
        if let Some(prev) = self.level_sums.last() {
            if abs_sum >= *prev {
                self.rising += 1;
            } else {
                self.rising = 0;
            }
        }
        self.level_sums.push(abs_sum);
        self.level_totals.push(total);
        self.partial.add(total);
        self.lambda = lambda_estimate(&self.level_sums).unwrap_or(f64::NAN);
        if self.rising >= 5 {
            return Err(Error::Diverging { lambda1: self.lambda, levels: self.levels() });
        }
        self.tail = if self.level_sums.len() >= 6 && self.lambda < 1.0 {
            abs_sum * self.lambda / (1.0 - self.lambda)
        } else {
            f64::INFINITY
        };
        if self.tail < self.eps {
            Ok(LevelStatus::Converged)
        } else {
            Ok(LevelStatus::Continue)
        }
    }

    /// Closes the evaluation. A run that ends with a growth estimate of at
    /// least one is reported as divergent.
    pub fn finish(self, lhs: Complex, first_length: usize, modulo_2pi_i: bool) -> Result<SeriesReport> {
        if self.level_sums.len() >= 6 && self.lambda >= 1.0 {
            return Err(Error::Diverging { lambda1: self.lambda, levels: self.levels() });
        }
        Ok(SeriesReport {
            converged: self.tail < self.eps,
            level_sums: self.level_sums,
            level_totals: self.level_totals,
            first_length,
            partial_sum: self.partial.value(),
            lhs,
            lambda1_estimate: self.lambda,
            tail_bound: self.tail,
            modulo_2pi_i,
        })
    }
}

/// Observer of every emitted term: level index, node and value.
pub trait TermVisitor<N> {
    fn visit(&mut self, level: usize, node: &N, value: Complex);
}

/// Visitor that ignores everything.
pub struct NoVisit;

impl<N> TermVisitor<N> for NoVisit {
    fn visit(&mut self, _: usize, _: &N, _: Complex) {}
}

impl<N, F: FnMut(usize, &N, Complex)> TermVisitor<N> for F {
    fn visit(&mut self, level: usize, node: &N, value: Complex) {
        self(level, node, value)
    }
}

/// Sums the series level by level until the tail rule or `max_levels`.
pub fn evaluate<T: TermTree>(
    tree: &T,
    cfg: &SeriesConfig,
    lhs: Complex,
    first_length: usize,
    modulo_2pi_i: bool,
    visitor: &mut dyn TermVisitor<T::Node>,
) -> Result<SeriesReport> {
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let mut acc = SeriesAccumulator::new(cfg.eps);
    let mut walker = LevelWalker::new(tree, cfg.frontier_cap)?;
    for level in 0..cfg.max_levels {
        let (abs, total) = walker.level(level, visitor)?;
        if acc.push_level(abs, total)? == LevelStatus::Converged {
            break;
        }
    }
    acc.finish(lhs, first_length, modulo_2pi_i)
}

/// Absolute level sums for `levels` levels without any stopping rule.
pub fn level_sums<T: TermTree>(tree: &T, levels: usize, frontier_cap: usize) -> Result<Vec<f64>> {
    let mut walker = LevelWalker::new(tree, frontier_cap)?;
    (0..levels).map(|l| walker.level(l, &mut NoVisit).map(|(abs, _)| abs)).collect()
}

/// Visits every term of `levels` levels; returns the absolute and signed
/// level sums.
pub fn walk_levels<T: TermTree>(
    tree: &T,
    levels: usize,
    frontier_cap: usize,
    visitor: &mut dyn TermVisitor<T::Node>,
) -> Result<Vec<(f64, Complex)>> {
    let mut walker = LevelWalker::new(tree, frontier_cap)?;
    (0..levels).map(|l| walker.level(l, visitor)).collect()
}

/// Produces the terms of successive levels.
struct LevelWalker<'a, T: TermTree> {
    tree: &'a T,
    cap: usize,
    frontier: Vec<T::Node>,
    frontier_level: usize,
    frozen: bool,
}

impl<'a, T: TermTree> LevelWalker<'a, T> {
    fn new(tree: &'a T, cap: usize) -> Result<Self> {
        Ok(Self { tree, cap, frontier: tree.roots()?, frontier_level: 0, frozen: false })
    }

    fn level(&mut self, level: usize, visitor: &mut dyn TermVisitor<T::Node>) -> Result<(f64, Complex)> {
        if level > self.frontier_level && !self.frozen {
            let mut next = Vec::new();
            for node in &self.frontier {
                self.tree.children(node, &mut next)?;
            }
            if next.len() <= self.cap {
                self.frontier = next;
                self.frontier_level = level;
            } else {
                self.frozen = true;
            }
        }
        let mut abs = CompensatedSum::new();
        let mut total = ComplexSum::new();
        let depth = level - self.frontier_level;
        let mut buffers: Vec<Vec<T::Node>> = vec![Vec::new(); depth];
        for node in &self.frontier {
            self.descend(node, depth, level, &mut buffers, &mut abs, &mut total, visitor)?;
        }
        Ok((abs.value(), total.value()))
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        node: &T::Node,
        depth: usize,
        level: usize,
        buffers: &mut [Vec<T::Node>],
        abs: &mut CompensatedSum,
        total: &mut ComplexSum,
        visitor: &mut dyn TermVisitor<T::Node>,
    ) -> Result<()> {
        if depth == 0 {
            if let Some(t) = self.tree.term(node)? {
                abs.add(t.norm());
                total.add(t);
                visitor.visit(level, node, t);
            }
            return Ok(());
        }
        let (head, rest) = buffers.split_first_mut().expect("buffer per depth");
        let mut kids = core::mem::take(head);
        kids.clear();
        self.tree.children(node, &mut kids)?;
        for kid in &kids {
            self.descend(kid, depth - 1, level, rest, abs, total, visitor)?;
        }
        *head = kids;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Geometric {
        ratio: f64,
    }

    impl TermTree for Geometric {
        type Node = (PackedWord, f64);

        fn roots(&self) -> Result<Vec<Self::Node>> {
            Ok(vec![(PackedWord::default(), 1.0)])
        }

        fn children(&self, node: &Self::Node, out: &mut Vec<Self::Node>) -> Result<()> {
            for l in 0..2 {
                out.push((node.0.push(l), node.1 * self.ratio / 2.0));
            }
            Ok(())
        }

        fn term(&self, node: &Self::Node) -> Result<Option<Complex>> {
            Ok(Some(Complex::new(node.1, 0.0)))
        }

        fn word(&self, node: &Self::Node) -> Word {
            node.0.to_word()
        }
    }

    #[test]
    fn geometric_converges() {
        let tree = Geometric { ratio: 0.5 };
        let cfg = SeriesConfig::new(1e-4, 40);
        let r = evaluate(&tree, &cfg, Complex::new(2.0, 0.0), 0, false, &mut NoVisit).unwrap();
        assert!(r.converged);
        assert!((r.gap() - r.tail_bound).abs() < 1e-12);
        assert!((r.lambda1_estimate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frozen_frontier_matches_stored() {
        let tree = Geometric { ratio: 0.7 };
        let a = level_sums(&tree, 12, 1 << 20).unwrap();
        let b = level_sums(&tree, 12, 8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn growth_diverges() {
        let tree = Geometric { ratio: 1.1 };
        let cfg = SeriesConfig::new(1e-10, 30);
        let r = evaluate(&tree, &cfg, Complex::new(0.0, 0.0), 0, false, &mut NoVisit);
        assert!(matches!(r, Err(Error::Diverging { .. })));
    }

    #[test]
    fn packed_word_roundtrip() {
        let w = PackedWord::default().push(1).push(3).prepend(2);
        assert_eq!(w.to_word(), Word(vec![2, 1, 3]));
        assert_eq!(w.last(), Some(3));
    }
}
