//! Complexified Basmajian identity for marked Schottky representations and
//! continuation of its terms along loops of representations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::moebius::{complex_length, cross_ratio, fixed_points, FixedPair, MoebiusMap, RiemannPoint};
use crate::series::{evaluate, PackedWord, SeriesConfig, SeriesReport, TermTree, TermVisitor};
use crate::symbolic::{compile, enumerate, Automaton, LanguageSpec, Word};
use crate::{Complex, Error, Result};

/// Generator images, boundary words and the word language of the series.
#[derive(Debug, Clone)]
pub struct MarkedRep {
    generators: Vec<MoebiusMap>,
    boundary_words: Vec<Word>,
    language: LanguageSpec,
    letter_maps: Vec<MoebiusMap>,
    boundary_fixed: Vec<FixedPair>,
}

impl MarkedRep {
    /// Lowercase letter number `i` of the alphabet maps to generator `i`,
    /// the matching uppercase letter to its inverse.
    pub fn new(
        generators: Vec<MoebiusMap>,
        boundary_words: Vec<Word>,
        language: LanguageSpec,
    ) -> Result<Self> {
        let alphabet = &language.alphabet;
        if !alphabet.has_inverses() || alphabet.len() != 2 * generators.len() {
            return Err(Error::InvalidInput(
                "alphabet must hold each generator and its inverse".into(),
            ));
        }
        let mut letter_maps = Vec::with_capacity(alphabet.len());
        for &ch in alphabet.symbols() {
            let i = (ch.to_ascii_lowercase() as u8).wrapping_sub(b'a') as usize;
            let g = generators.get(i).ok_or_else(|| {
                Error::InvalidInput(alloc::format!("letter {ch:?} has no generator"))
            })?;
            letter_maps.push(if ch.is_ascii_lowercase() { *g } else { g.inverse() });
        }
        for g in &generators {
            fixed_points(g)?;
        }
        if boundary_words.is_empty() {
            return Err(Error::InvalidInput("at least one boundary word is needed".into()));
        }
        let mut rep = Self {
            generators,
            boundary_words,
            language,
            letter_maps,
            boundary_fixed: Vec::new(),
        };
        rep.boundary_fixed = rep
            .boundary_words
            .iter()
            .map(|w| fixed_points(&rep.word_map(w)))
            .collect::<Result<_>>()?;
        Ok(rep)
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    pub fn boundary_words(&self) -> &[Word] {
        &self.boundary_words
    }

    pub fn language(&self) -> &LanguageSpec {
        &self.language
    }

    pub fn boundary_fixed(&self) -> &[FixedPair] {
        &self.boundary_fixed
    }

    pub fn letter_map(&self, letter: u8) -> &MoebiusMap {
        &self.letter_maps[letter as usize]
    }

    /// Product of the letter maps in reading order.
    pub fn word_map(&self, w: &Word) -> MoebiusMap {
        w.0.iter().fold(MoebiusMap::identity(), |m, l| m.compose(self.letter_map(*l)))
    }

    /// Sum of complex lengths of the boundary maps.
    pub fn lhs(&self) -> Result<Complex> {
        self.boundary_words
            .iter()
            .map(|w| complex_length(&self.word_map(w)))
            .sum()
    }

    /// Conjugates every generator by `g`.
    pub fn conjugated(&self, g: &MoebiusMap) -> Result<Self> {
        Self::new(
            self.generators.iter().map(|m| m.conjugate_by(g)).collect(),
            self.boundary_words.clone(),
            self.language.clone(),
        )
    }
}

/// Two image points and their difference, carried through Moebius maps
/// so that the difference keeps full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePair {
    pub x: RiemannPoint,
    pub y: RiemannPoint,
    /// `x - y` when both points are finite.
    diff: Complex,
}

impl ImagePair {
    fn new(pair: &FixedPair) -> Self {
        let diff = match (pair.attracting, pair.repelling) {
            (RiemannPoint::Finite(x), RiemannPoint::Finite(y)) => x - y,
            _ => Complex::new(f64::NAN, f64::NAN),
        };
        Self { x: pair.attracting, y: pair.repelling, diff }
    }

    fn map(&self, m: &MoebiusMap) -> Self {
        let (nx, ny) = (m.apply(self.x), m.apply(self.y));
        let diff = match (self.x, self.y, nx, ny) {
            (RiemannPoint::Finite(x), RiemannPoint::Finite(y), RiemannPoint::Finite(_), RiemannPoint::Finite(_))
                if self.diff.is_finite() =>
            {
                self.diff / ((m.c * x + m.d) * (m.c * y + m.d))
            }
            (_, _, RiemannPoint::Finite(a), RiemannPoint::Finite(b)) => a - b,
            _ => Complex::new(f64::NAN, f64::NAN),
        };
        Self { x: nx, y: ny, diff }
    }
}

/// `[z1, z2; z3, z4] - 1 = (z1 - z2)(z3 - z4) / ((z1 - z4)(z2 - z3))`,
/// which keeps full relative precision when the result is small.
fn cross_delta(outer: &FixedPair, img: &ImagePair) -> Result<Complex> {
    match (outer.attracting, outer.repelling, img.x, img.y) {
        (
            RiemannPoint::Finite(z1),
            RiemannPoint::Finite(z2),
            RiemannPoint::Finite(z3),
            RiemannPoint::Finite(z4),
        ) if img.diff.is_finite() => {
            let den = (z1 - z4) * (z2 - z3);
            let delta = (z1 - z2) * img.diff / den;
            if !delta.is_finite() || den.norm() == 0.0 || (delta + 1.0).norm() == 0.0 {
                return Err(Error::DegenerateConfiguration("cross ratio is 0, infinite or undefined"));
            }
            Ok(delta)
        }
        _ => Ok(cross_ratio(outer.attracting, outer.repelling, img.x, img.y)? - 1.0),
    }
}

/// Images of a fixed pair under a word, applying one letter at a time from
/// the innermost so that no large matrix product is ever evaluated.
fn word_images(rep: &MarkedRep, w: &Word, pair: &FixedPair) -> ImagePair {
    w.0.iter().rev().fold(ImagePair::new(pair), |img, l| img.map(rep.letter_map(*l)))
}

/// `log(1 + delta)`, accurate for small `delta`.
fn ln_1p(delta: Complex) -> Complex {
    if delta.norm() < 1e-4 {
        let mut term = delta;
        let mut acc = Complex::new(0.0, 0.0);
        for k in 1..=6 {
            acc += term / k as f64;
            term *= -delta;
        }
        acc
    } else {
        (delta + 1.0).ln()
    }
}


/// Principal log of `[a_p+, a_p-; w a_q+, w a_q-]`.
pub fn term(rep: &MarkedRep, p: usize, q: usize, w: &Word) -> Result<Complex> {
    let fp = rep.boundary_fixed.get(p).ok_or_else(|| Error::InvalidInput("p out of range".into()))?;
    let fq = rep.boundary_fixed.get(q).ok_or_else(|| Error::InvalidInput("q out of range".into()))?;
    cross_delta(fp, &word_images(rep, w, fq)).map(ln_1p)
}

/// Node of the word tree: boundary pair, automaton state, images of the
/// inner fixed pair and word. Children prepend a letter.
#[derive(Debug, Clone)]
pub struct SchottkyNode {
    pub p: usize,
    pub q: usize,
    state: usize,
    images: ImagePair,
    word: PackedWord,
}

struct SchottkyTree<'a> {
    rep: &'a MarkedRep,
    /// Automaton of the reversed language, fed letters as they are prepended.
    automaton: Automaton,
}

impl<'a> SchottkyTree<'a> {
    fn new(rep: &'a MarkedRep) -> Self {
        Self { rep, automaton: compile(&reversed(&rep.language)) }
    }
}

/// The language of reversed words.
fn reversed(spec: &LanguageSpec) -> LanguageSpec {
    let rev = |ws: &[Word]| ws.iter().map(|w| Word(w.0.iter().rev().copied().collect())).collect();
    LanguageSpec {
        alphabet: spec.alphabet.clone(),
        reduced: spec.reduced,
        forbidden_prefixes: rev(&spec.forbidden_suffixes),
        forbidden_suffixes: rev(&spec.forbidden_prefixes),
    }
}

impl TermTree for SchottkyTree<'_> {
    type Node = SchottkyNode;

    fn roots(&self) -> Result<Vec<SchottkyNode>> {
        let k = self.rep.boundary_words.len();
        let mut out = Vec::new();
        for p in 0..k {
            for q in 0..k {
                let fq = &self.rep.boundary_fixed[q];
                let base = SchottkyNode {
                    p,
                    q,
                    state: self.automaton.start,
                    images: ImagePair::new(fq),
                    word: PackedWord::default(),
                };
                self.children(&base, &mut out)?;
            }
        }
        Ok(out)
    }

    fn children(&self, node: &SchottkyNode, out: &mut Vec<SchottkyNode>) -> Result<()> {
        if node.word.len() >= PackedWord::MAX_LEN {
            return Err(Error::InvalidInput("word length limit exceeded".into()));
        }
        for l in 0..self.automaton.letters as u8 {
            if let Some(state) = self.automaton.step(node.state, l) {
                let m = self.rep.letter_map(l);
                out.push(SchottkyNode {
                    p: node.p,
                    q: node.q,
                    state,
                    images: node.images.map(m),
                    word: node.word.prepend(l),
                });
            }
        }
        Ok(())
    }

    fn term(&self, node: &SchottkyNode) -> Result<Option<Complex>> {
        if !self.automaton.accept[node.state] {
            return Ok(None);
        }
        let fp = &self.rep.boundary_fixed[node.p];
        cross_delta(fp, &node.images).map(|d| Some(ln_1p(d)))
    }

    fn word(&self, node: &SchottkyNode) -> Word {
        node.word.to_word()
    }
}

/// Sums the identity over the language by word length.
pub fn evaluate_identity(rep: &MarkedRep, eps: f64, max_len: usize) -> Result<SeriesReport> {
    evaluate_identity_with(rep, eps, max_len, &mut crate::series::NoVisit)
}

/// As [`evaluate_identity`], reporting each term to `visitor`.
pub fn evaluate_identity_with(
    rep: &MarkedRep,
    eps: f64,
    max_len: usize,
    visitor: &mut dyn TermVisitor<SchottkyNode>,
) -> Result<SeriesReport> {
    if max_len > PackedWord::MAX_LEN {
        return Err(Error::InvalidInput("max_len above 32".into()));
    }
    let tree = SchottkyTree::new(rep);
    let cfg = SeriesConfig::new(eps, max_len);
    evaluate(&tree, &cfg, rep.lhs()?, 1, true, visitor)
}

impl SchottkyNode {
    pub fn word(&self) -> Word {
        self.word.to_word()
    }
}

/// A term continued along a path of representations.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedTerm {
    pub p: usize,
    pub q: usize,
    pub word: Word,
    /// Principal log at the start of the path.
    pub base: Complex,
    /// Continued log at the end of the path.
    pub value: Complex,
    /// Accumulated multiples of `2 pi i`.
    pub winding: i64,
}

/// Closed path of representations.
pub struct LoopSpec<F: Fn(f64) -> Result<MarkedRep>> {
    pub path: F,
    pub steps: usize,
    pub adaptive: bool,
}

/// Continues every term with words up to `max_len` along the loop.
pub fn track<F: Fn(f64) -> Result<MarkedRep>>(spec: &LoopSpec<F>, max_len: usize) -> Result<Vec<TrackedTerm>> {
    if spec.steps == 0 {
        return Err(Error::InvalidInput("steps must be positive".into()));
    }
    let start = (spec.path)(0.0)?;
    let end = (spec.path)(1.0)?;
    let closed = start.generators.len() == end.generators.len()
        && start.generators.iter().zip(&end.generators).all(|(a, b)| a.approx_eq(b, 1e-8));
    if !closed {
        return Err(Error::NotClosed);
    }
    let words: Vec<Word> = enumerate(&start.language, max_len).collect();
    let k = start.boundary_words.len();
    let count = words.len();
    let labels: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|p| (0..k).flat_map(move |q| (0..count).map(move |i| (p, q, i))))
        .collect();

    let cross = |rep: &MarkedRep, fixed: &[FixedPair]| -> Result<Vec<Complex>> {
        labels
            .iter()
            .map(|&(p, q, i)| {
                cross_delta(&fixed[p], &word_images(rep, &words[i], &fixed[q]))
            })
            .collect()
    };

    let mut fixed: Vec<FixedPair> = start.boundary_fixed.clone();
    let mut cr = cross(&start, &fixed)?;
    let base: Vec<Complex> = cr.iter().map(|d| ln_1p(*d)).collect();
    let mut total = vec![Complex::new(0.0, 0.0); cr.len()];

    let base_h = 1.0 / spec.steps as f64;
    let mut h = base_h;
    let mut t = 0.0;
    while t < 1.0 {
        let t1 = if t + h >= 1.0 - 1e-15 { 1.0 } else { t + h };
        let rep = (spec.path)(t1)?;
        let retry = |h: &mut f64| -> Result<()> {
            if !spec.adaptive || *h < 1e-12 {
                return Err(Error::LostTrack { t });
            }
            *h /= 2.0;
            Ok(())
        };
        let mut next_fixed = Vec::with_capacity(k);
        let mut too_far = false;
        for (j, w) in rep.boundary_words.iter().enumerate() {
            let pair = fixed_points(&rep.word_map(w)).map_err(|_| Error::NonLoxodromic { t: t1 })?;
            let (matched, ratio) = match_pair(&fixed[j], &pair, t1)?;
            too_far |= ratio > 0.25;
            next_fixed.push(matched);
        }
        if too_far {
            retry(&mut h)?;
            continue;
        }
        let next_cr = cross(&rep, &next_fixed).map_err(|_| Error::LostTrack { t: t1 })?;
        let inc: Vec<Complex> =
            next_cr.iter().zip(&cr).map(|(a, b)| ln_1p((a - b) / (b + 1.0))).collect();
        let worst = inc.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst >= PI / 2.0 {
            retry(&mut h)?;
            continue;
        }
        for (acc, d) in total.iter_mut().zip(&inc) {
            *acc += d;
        }
        cr = next_cr;
        fixed = next_fixed;
        t = t1;
        if spec.adaptive && worst < PI / 8.0 {
            h = (h * 2.0).min(base_h);
        }
    }

    labels
        .iter()
        .zip(base.iter().zip(&total))
        .map(|(&(p, q, i), (b, d))| {
            let m = Float::round(d.im / (2.0 * PI));
            if (d.im - 2.0 * PI * m).abs() > 1e-6 {
                return Err(Error::LostTrack { t: 1.0 });
            }
            Ok(TrackedTerm { p, q, word: words[i].clone(), base: *b, value: b + d, winding: m as i64 })
        })
        .collect()
}

/// Matches the new fixed points to the previous ones by chordal distance.
/// Returns the matched pair and the motion relative to the separation.
fn match_pair(prev: &FixedPair, new: &FixedPair, t: f64) -> Result<(FixedPair, f64)> {
    let d = |a: RiemannPoint, b: RiemannPoint| a.chordal_distance(b);
    let keep = d(prev.attracting, new.attracting) + d(prev.repelling, new.repelling);
    let swap = d(prev.attracting, new.repelling) + d(prev.repelling, new.attracting);
    if (keep - swap).abs() < 1e-9 {
        return Err(Error::LostTrack { t });
    }
    let pair = if keep < swap {
        *new
    } else {
        FixedPair { attracting: new.repelling, repelling: new.attracting }
    };
    let sep = d(pair.attracting, pair.repelling).max(1e-300);
    Ok((pair, keep.min(swap) / sep))
}

/// Per-word monodromy integers along a loop.
pub fn continue_along<F: Fn(f64) -> Result<MarkedRep>>(
    spec: &LoopSpec<F>,
    max_len: usize,
) -> Result<Vec<(Word, i64)>> {
    Ok(track(spec, max_len)?.into_iter().map(|t| (t.word, t.winding)).collect())
}

/// The two loops of the one-holed torus family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Generators `X_L, Y_L`.
    Gamma,
    /// Generators `X_L^2, X_L Y_L^3`.
    GammaPrime,
}

/// Which root of `x^2 + L x + 1 = 0` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootChoice {
    /// Continuation of the larger-modulus root at `L = 5`.
    #[default]
    Larger,
    Alternate,
}

/// `L = radius * e^{2 pi i t}`.
pub fn loop_parameter(radius: f64, t: f64) -> Complex {
    Complex::from_polar(radius, 2.0 * PI * t)
}

/// Root of `x^2 + L x + 1 = 0`. For `|L| > 2` the expression is analytic in
/// `L` along circles, so it is the continuation of its value at real `L`.
pub fn x_root(l: Complex, root: RootChoice) -> Complex {
    let s = l * (Complex::new(1.0, 0.0) - 4.0 / (l * l)).sqrt();
    match root {
        RootChoice::Larger => (-l - s) / 2.0,
        RootChoice::Alternate => (-l + s) / 2.0,
    }
}

/// `X_L = [[L, 1], [-1, 0]]` and `Y_L = [[0, x], [-1/x, L]]`.
pub fn torus_matrices(l: Complex, root: RootChoice) -> Result<(MoebiusMap, MoebiusMap)> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let x = x_root(l, root);
    let xm = MoebiusMap::new(l, one, -one, zero)?;
    let ym = MoebiusMap::new(zero, x, -one / x, l)?;
    Ok((xm, ym))
}

/// Marked representation built from words in `X, Y` (lowercase letters
/// denote inverses), with the commutator `abAB` as boundary word.
pub fn torus_rep(x: &MoebiusMap, y: &MoebiusMap, generator_words: [&str; 2]) -> Result<MarkedRep> {
    let letter = |ch: char| -> Result<MoebiusMap> {
        match ch {
            'X' => Ok(*x),
            'Y' => Ok(*y),
            'x' => Ok(x.inverse()),
            'y' => Ok(y.inverse()),
            _ => Err(Error::InvalidInput(alloc::format!("unknown generator letter {ch:?}"))),
        }
    };
    let mut gens = Vec::with_capacity(2);
    for w in generator_words {
        let mut m = MoebiusMap::identity();
        for ch in w.chars() {
            m = m.compose(&letter(ch)?);
        }
        gens.push(m);
    }
    let language = LanguageSpec::torus();
    let boundary = language.alphabet.parse("abAB")?;
    MarkedRep::new(gens, vec![boundary], language)
}

impl Preset {
    pub fn generator_words(self) -> [&'static str; 2] {
        match self {
            Preset::Gamma => ["X", "Y"],
            Preset::GammaPrime => ["XX", "XYYY"],
        }
    }
}

/// Representation of the preset at loop time `t`.
pub fn preset(name: Preset, t: f64) -> Result<MarkedRep> {
    preset_with(name, t, 5.0, RootChoice::Larger)
}

/// Preset with explicit loop radius and root choice.
pub fn preset_with(name: Preset, t: f64, radius: f64, root: RootChoice) -> Result<MarkedRep> {
    let (x, y) = torus_matrices(loop_parameter(radius, t), root)?;
    torus_rep(&x, &y, name.generator_words())
}
