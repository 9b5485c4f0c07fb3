//! Holomorphic contracting iterated function systems: inverse branches of
//! `z^2 + c` and planar similarity pairs, their gap series and continuation
//! in the parameter.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::{sqrt_continue, sqrt_cut};
use crate::series::{
    evaluate, level_sums, walk_levels, NoVisit, PackedWord, SeriesAccumulator, SeriesConfig, SeriesReport,
    TermTree, TermVisitor,
};
use crate::symbolic::{ShiftCoding, Word};
use crate::{Complex, Error, Result};

/// Contracting conformal system with a symbolic coding.
pub trait HoloIfs {
    fn branch_count(&self) -> usize;
    fn branch(&self, j: usize, z: Complex) -> Result<Complex>;
    fn branch_derivative(&self, j: usize, z: Complex) -> Result<Complex>;
    /// Endpoints of the seed interval `U`.
    fn seed_interval(&self) -> (Complex, Complex);
    /// Endpoints of the first gap.
    fn primary_gap(&self) -> Result<(Complex, Complex)>;
    fn coding(&self) -> &ShiftCoding;
}

/// Fixed points `z1 = (1 + sqrt(1 - 4c))/2` and `z2 = 1 - z1` of `z^2 + c`.
pub fn julia_fixed_points(c: Complex) -> (Complex, Complex) {
    let z1 = (1.0 + (1.0 - 4.0 * c).sqrt()) / 2.0;
    (z1, 1.0 - z1)
}

/// Inverse branches `T1 = sqrt(z - c)` and `T2 = -sqrt(z - c)`.
///
/// The square root is cut along the outward ray from `c`, which avoids the
/// Cantor set for large `|c|` and coincides with the positive root for real
/// `c < -2`; `T1` is the branch that fixes `z1`.
#[derive(Debug, Clone)]
pub struct QuadraticIfs {
    c: Complex,
    z1: Complex,
    z2: Complex,
    cut: f64,
    sign: f64,
    coding: ShiftCoding,
}

const BRANCH_GUARD: f64 = 1e-14;

impl QuadraticIfs {
    pub fn new(c: Complex) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidInput("parameter must be finite".into()));
        }
        if (1.0 - 4.0 * c).norm() < 1e-12 {
            return Err(Error::InvalidInput("c = 1/4 has a double fixed point".into()));
        }
        let (z1, z2) = julia_fixed_points(c);
        let cut = if c.norm() > 0.0 { c.arg() } else { PI };
        let r = sqrt_cut(z1 - c, cut);
        let sign = if (r - z1).norm() <= (r + z1).norm() { 1.0 } else { -1.0 };
        Ok(Self { c, z1, z2, cut, sign, coding: ShiftCoding::full_shift(2)? })
    }

    pub fn c(&self) -> Complex {
        self.c
    }

    pub fn z1(&self) -> Complex {
        self.z1
    }

    pub fn z2(&self) -> Complex {
        self.z2
    }

    /// Escape-time heuristic: true when the critical orbit leaves the disk of
    /// radius 2 within `iterations` steps.
    pub fn escapes(&self, iterations: usize) -> bool {
        let mut z = Complex::new(0.0, 0.0);
        for _ in 0..iterations {
            z = z * z + self.c;
            if z.norm() > 2.0 {
                return true;
            }
        }
        false
    }

    fn root(&self, z: Complex) -> Result<Complex> {
        let w = z - self.c;
        if w.norm() < BRANCH_GUARD {
            return Err(Error::BranchAmbiguity);
        }
        Ok(sqrt_cut(w, self.cut) * self.sign)
    }

    /// Applies branch `j` to `v`, continuing the square root from the pair
    /// `(u, image_u)` so that both endpoints use the same branch.
    fn paired(&self, u: Complex, image_u: Complex, v: Complex) -> Result<Complex> {
        sqrt_continue(u - self.c, image_u, v - self.c)
    }
}

impl HoloIfs for QuadraticIfs {
    fn branch_count(&self) -> usize {
        2
    }

    fn branch(&self, j: usize, z: Complex) -> Result<Complex> {
        let r = self.root(z)?;
        Ok(if j == 0 { r } else { -r })
    }

    fn branch_derivative(&self, j: usize, z: Complex) -> Result<Complex> {
        Ok(1.0 / (2.0 * self.branch(j, z)?))
    }

    fn seed_interval(&self) -> (Complex, Complex) {
        (-self.z1, self.z1)
    }

    fn primary_gap(&self) -> Result<(Complex, Complex)> {
        let p = self.branch(0, -self.z1)?;
        Ok((p, -p))
    }

    fn coding(&self) -> &ShiftCoding {
        &self.coding
    }
}

/// `(w(T1(-z1)), w(T2(-z1)))` with the first letter of `w` outermost. The
/// first endpoint uses the cut branches; the second is continued from it.
pub fn gap_image(ifs: &QuadraticIfs, w: &Word) -> Result<(Complex, Complex)> {
    let (mut u, mut v) = ifs.primary_gap()?;
    for &l in w.letters().iter().rev() {
        let nu = ifs.branch(l as usize, u)?;
        v = ifs.paired(u, nu, v)?;
        u = nu;
    }
    Ok((u, v))
}

/// Node of a gap tree: endpoints, sign parity and word.
#[derive(Debug, Clone, Copy)]
pub struct GapNode {
    pub u: Complex,
    pub v: Complex,
    pub odd: bool,
    word: PackedWord,
}

impl GapNode {
    pub fn word(&self) -> Word {
        self.word.to_word()
    }
}

struct GapTree<'a> {
    ifs: &'a QuadraticIfs,
    start: (Complex, Complex),
    /// Letter whose occurrences flip the sign.
    signed_letter: u8,
}

impl TermTree for GapTree<'_> {
    type Node = GapNode;

    fn roots(&self) -> Result<Vec<GapNode>> {
        Ok(alloc::vec![GapNode {
            u: self.start.0,
            v: self.start.1,
            odd: false,
            word: PackedWord::default()
        }])
    }

    fn children(&self, node: &GapNode, out: &mut Vec<GapNode>) -> Result<()> {
        if node.word.len() >= PackedWord::MAX_LEN {
            return Err(Error::InvalidInput("word length limit exceeded".into()));
        }
        let r = self.ifs.root(node.u)?;
        let rv = self.ifs.paired(node.u, r, node.v)?;
        for l in 0..2u8 {
            let s = if l == 0 { 1.0 } else { -1.0 };
            out.push(GapNode {
                u: r * s,
                v: rv * s,
                odd: node.odd ^ (l == self.signed_letter),
                word: node.word.prepend(l),
            });
        }
        Ok(())
    }

    fn term(&self, node: &GapNode) -> Result<Option<Complex>> {
        let d = node.u - node.v;
        Ok(Some(if node.odd { -d } else { d }))
    }

    fn word(&self, node: &GapNode) -> Word {
        node.word.to_word()
    }
}

fn original_tree(ifs: &QuadraticIfs) -> Result<GapTree<'_>> {
    Ok(GapTree { ifs, start: ifs.primary_gap()?, signed_letter: 1 })
}

fn swapped_tree(ifs: &QuadraticIfs) -> Result<GapTree<'_>> {
    let u = ifs.branch(1, -ifs.z2)?;
    Ok(GapTree { ifs, start: (u, -u), signed_letter: 0 })
}

fn check_len(max_len: usize) -> Result<()> {
    if max_len >= PackedWord::MAX_LEN {
        return Err(Error::InvalidInput("max_len must be below 32".into()));
    }
    Ok(())
}

/// `2 z1 = sum (-1)^eta (w(T1(-z1)) - w(T2(-z1)))`, eta counting `T2`.
pub fn julia_identity(ifs: &QuadraticIfs, eps: f64, max_len: usize) -> Result<SeriesReport> {
    julia_identity_with(ifs, eps, max_len, &mut NoVisit)
}

pub fn julia_identity_with(
    ifs: &QuadraticIfs,
    eps: f64,
    max_len: usize,
    visitor: &mut dyn TermVisitor<GapNode>,
) -> Result<SeriesReport> {
    check_len(max_len)?;
    let cfg = SeriesConfig::new(eps, max_len + 1);
    evaluate(&original_tree(ifs)?, &cfg, 2.0 * ifs.z1, 0, false, visitor)
}

/// `2 z2 = sum (-1)^eta' (w(T2(-z2)) - w(T1(-z2)))`, eta' counting `T1`.
pub fn swapped_identity(ifs: &QuadraticIfs, eps: f64, max_len: usize) -> Result<SeriesReport> {
    swapped_identity_with(ifs, eps, max_len, &mut NoVisit)
}

pub fn swapped_identity_with(
    ifs: &QuadraticIfs,
    eps: f64,
    max_len: usize,
    visitor: &mut dyn TermVisitor<GapNode>,
) -> Result<SeriesReport> {
    check_len(max_len)?;
    let cfg = SeriesConfig::new(eps, max_len + 1);
    evaluate(&swapped_tree(ifs)?, &cfg, 2.0 * ifs.z2, 0, false, visitor)
}

/// Absolute gap level sums for word lengths `0..levels`.
pub fn julia_level_sums(ifs: &QuadraticIfs, levels: usize) -> Result<Vec<f64>> {
    check_len(levels)?;
    level_sums(&original_tree(ifs)?, levels, 1 << 20)
}

/// Gap lengths `|w(T1(-z1)) - w(T2(-z1))|` for all words of length
/// `0..=max_len`, grouped by length.
pub fn julia_gap_lengths(ifs: &QuadraticIfs, max_len: usize) -> Result<Vec<Vec<f64>>> {
    check_len(max_len)?;
    let tree = original_tree(ifs)?;
    let mut out: Vec<Vec<f64>> = (0..=max_len).map(|_| Vec::new()).collect();
    let mut record = |level: usize, _: &GapNode, t: Complex| out[level].push(t.norm());
    walk_levels(&tree, max_len + 1, 1 << 20, &mut record)?;
    Ok(out)
}

/// `f(z) = c z` and `g(z) = c (z - 1) + 1`.
#[derive(Debug, Clone)]
pub struct SimilarityIfs {
    c: Complex,
    coding: ShiftCoding,
}

impl SimilarityIfs {
    pub fn new(c: Complex) -> Result<Self> {
        let r = c.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput("similarity ratio needs 0 < |c| < 1".into()));
        }
        Ok(Self { c, coding: ShiftCoding::full_shift(2)? })
    }

    pub fn c(&self) -> Complex {
        self.c
    }
}

impl HoloIfs for SimilarityIfs {
    fn branch_count(&self) -> usize {
        2
    }

    fn branch(&self, j: usize, z: Complex) -> Result<Complex> {
        Ok(if j == 0 { self.c * z } else { self.c * (z - 1.0) + 1.0 })
    }

    fn branch_derivative(&self, _: usize, _: Complex) -> Result<Complex> {
        Ok(self.c)
    }

    fn seed_interval(&self) -> (Complex, Complex) {
        (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    fn primary_gap(&self) -> Result<(Complex, Complex)> {
        Ok((self.branch(1, 0.0.into())?, self.branch(0, 1.0.into())?))
    }

    fn coding(&self) -> &ShiftCoding {
        &self.coding
    }
}

struct SimilarityTree<'a> {
    ifs: &'a SimilarityIfs,
}

impl TermTree for SimilarityTree<'_> {
    type Node = (Complex, Complex, PackedWord);

    fn roots(&self) -> Result<Vec<Self::Node>> {
        let (u, v) = self.ifs.primary_gap()?;
        Ok(alloc::vec![(u, v, PackedWord::default())])
    }

    fn children(&self, node: &Self::Node, out: &mut Vec<Self::Node>) -> Result<()> {
        for l in 0..2u8 {
            let j = l as usize;
            out.push((self.ifs.branch(j, node.0)?, self.ifs.branch(j, node.1)?, node.2.prepend(l)));
        }
        Ok(())
    }

    fn term(&self, node: &Self::Node) -> Result<Option<Complex>> {
        Ok(Some(node.0 - node.1))
    }

    fn word(&self, node: &Self::Node) -> Word {
        node.2.to_word()
    }
}

/// Word-by-word levels evaluated before switching to closed-form level sums.
pub const SIMILARITY_WORD_LEVELS: usize = 20;

/// `1 = sum (2c)^n (1 - 2c)`: word-by-word for the first levels, then the
/// closed-form level sums.
pub fn similarity_identity(ifs: &SimilarityIfs, eps: f64, max_len: usize) -> Result<SeriesReport> {
    similarity_identity_with(ifs, eps, max_len, &mut NoVisit)
}

pub fn similarity_identity_with(
    ifs: &SimilarityIfs,
    eps: f64,
    max_len: usize,
    visitor: &mut dyn TermVisitor<(Complex, Complex, PackedWord)>,
) -> Result<SeriesReport> {
    let two_c = 2.0 * ifs.c;
    if two_c.norm() >= 1.0 - 1e-12 {
        return Err(Error::Diverging { lambda1: two_c.norm(), levels: 0 });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let word_levels = (max_len + 1).min(SIMILARITY_WORD_LEVELS);
    let tree = SimilarityTree { ifs };
    let cfg = SeriesConfig::new(eps, word_levels);
    let lhs = Complex::new(1.0, 0.0);
    let head = evaluate(&tree, &cfg, lhs, 0, false, visitor)?;
    let mut acc = SeriesAccumulator::new(eps);
    let mut done = false;
    for (s, t) in head.level_sums.iter().zip(&head.level_totals) {
        done = acc.push_level(*s, *t)? == crate::series::LevelStatus::Converged;
    }
    let base = 1.0 - two_c;
    let mut n = head.level_sums.len();
    while !done && n <= max_len {
        let total = two_c.powi(n as i32) * base;
        done = acc.push_level(total.norm(), total)? == crate::series::LevelStatus::Converged;
        n += 1;
    }
    acc.finish(lhs, 0, false)
}

/// Closed-form partial sum `sum_{n < levels} (2c)^n (1 - 2c)`.
pub fn similarity_closed_form(c: Complex, levels: usize) -> Complex {
    let two_c = 2.0 * c;
    1.0 - two_c.powi(levels as i32)
}

/// How a loop in the parameter acts on the labelling of the branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopOutcome {
    Identity,
    LabelSwap,
}

/// Values continued along a path of parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationContext {
    pub c: Complex,
    /// Continued `sqrt(1 - 4c)`.
    pub root: Complex,
    /// Continued fixed point of `T1`.
    pub z1: Complex,
    /// Continued endpoints of the first gap.
    pub gap: (Complex, Complex),
}

impl ContinuationContext {
    pub fn at(ifs: &QuadraticIfs) -> Result<Self> {
        Ok(Self {
            c: ifs.c,
            root: 2.0 * ifs.z1 - 1.0,
            z1: ifs.z1,
            gap: ifs.primary_gap()?,
        })
    }
}

/// Continues `z1` and the first gap along `path` from `path(0)`.
pub fn continue_in_c<F: Fn(f64) -> Complex>(path: F, steps: usize) -> Result<(ContinuationContext, ContinuationContext)> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be positive".into()));
    }
    let start = ContinuationContext::at(&QuadraticIfs::new(path(0.0))?)?;
    let mut cur = start;
    let base_h = 1.0 / steps as f64;
    let mut h = base_h;
    let mut t = 0.0;
    while t < 1.0 {
        let t1 = if t + h >= 1.0 - 1e-15 { 1.0 } else { t + h };
        match advance(&cur, path(t1)) {
            Some(next) => {
                cur = next;
                t = t1;
                h = (h * 2.0).min(base_h);
            }
            None => {
                h /= 2.0;
                if h < 1e-12 {
                    return Err(Error::LostTrack { t });
                }
            }
        }
    }
    Ok((start, cur))
}

/// One continuation step; `None` when some value moves more than a quarter
/// of the separation between its two candidates.
fn advance(cur: &ContinuationContext, c: Complex) -> Option<ContinuationContext> {
    let pick = |prev: Complex, cand: Complex| -> Option<Complex> {
        let (a, b) = (cand, -cand);
        let (da, db) = ((a - prev).norm(), (b - prev).norm());
        let chosen = if da <= db { a } else { b };
        let sep = 2.0 * cand.norm();
        if !(sep > 1e-14) || da.min(db) > 0.25 * sep {
            return None;
        }
        Some(chosen)
    };
    let root = pick(cur.root, (1.0 - 4.0 * c).sqrt())?;
    let z1 = (1.0 + root) / 2.0;
    let u = pick(cur.gap.0, (-z1 - c).sqrt())?;
    let v = pick(cur.gap.1, (-z1 - c).sqrt())?;
    Some(ContinuationContext { c, root, z1, gap: (u, v) })
}

/// Classifies the end of a closed continuation against its start.
pub fn loop_outcome(start: &ContinuationContext, end: &ContinuationContext) -> Result<LoopOutcome> {
    let scale = start.z1.norm().max(1.0);
    if (end.c - start.c).norm() > 1e-9 * scale {
        return Err(Error::NotClosed);
    }
    if (end.z1 - start.z1).norm() < 1e-8 * scale {
        Ok(LoopOutcome::Identity)
    } else if (end.z1 - (1.0 - start.z1)).norm() < 1e-8 * scale {
        Ok(LoopOutcome::LabelSwap)
    } else {
        Err(Error::LostTrack { t: 1.0 })
    }
}

/// Circle of radius `r` about the origin starting at angle `theta0`,
/// traversed `turns` times.
pub fn circle_path(r: f64, theta0: f64, turns: f64) -> impl Fn(f64) -> Complex {
    move |t| Complex::from_polar(r, theta0 + 2.0 * PI * turns * t)
}
