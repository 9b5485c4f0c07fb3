//! Words, regular word languages and subshift codings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Ordered symbols with an optional inverse pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    inverse: Vec<Option<u8>>,
}

impl Alphabet {
    /// Group alphabet whose inverse pairing is the case swap, ordered as
    /// listed. Accepts `"abAB"` or `"a>b>A>B"`.
    pub fn free_group(order: &str) -> Result<Self> {
        let symbols: Vec<char> = order.chars().filter(|c| *c != '>' && !c.is_whitespace()).collect();
        let mut inverse = Vec::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if !s.is_ascii_alphabetic() {
                return Err(Error::InvalidInput(format!("letter {s:?} is not alphabetic")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidInput(format!("letter {s:?} repeated")));
            }
            let partner = if s.is_ascii_lowercase() {
                s.to_ascii_uppercase()
            } else {
                s.to_ascii_lowercase()
            };
            let j = symbols
                .iter()
                .position(|c| *c == partner)
                .ok_or_else(|| Error::InvalidInput(format!("letter {s:?} has no inverse")))?;
            inverse.push(Some(j as u8));
        }
        Self::check_size(&symbols)?;
        Ok(Self { symbols, inverse })
    }

    /// Plain alphabet without inverses.
    pub fn plain(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidInput(format!("symbol {s:?} repeated")));
            }
        }
        Self::check_size(&symbols)?;
        let inverse = vec![None; symbols.len()];
        Ok(Self { symbols, inverse })
    }

    /// The two-symbol alphabet `1 < 2` of the quadratic coding.
    pub fn binary() -> Self {
        Self { symbols: vec!['1', '2'], inverse: vec![None, None] }
    }

    fn check_size(symbols: &[char]) -> Result<()> {
        if symbols.is_empty() || symbols.len() > 16 {
            return Err(Error::InvalidInput("alphabet needs 1 to 16 symbols".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: u8) -> char {
        self.symbols[i as usize]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, ch: char) -> Option<u8> {
        self.symbols.iter().position(|c| *c == ch).map(|i| i as u8)
    }

    pub fn inverse(&self, i: u8) -> Option<u8> {
        self.inverse[i as usize]
    }

    pub fn has_inverses(&self) -> bool {
        self.inverse.iter().all(Option::is_some)
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|ch| {
                self.index_of(ch)
                    .ok_or_else(|| Error::InvalidInput(format!("symbol {ch:?} not in alphabet")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn render(&self, w: &Word) -> String {
        w.0.iter().map(|i| self.symbol(*i)).collect()
    }

    /// Formal inverse of a word over a group alphabet.
    pub fn invert(&self, w: &Word) -> Option<Word> {
        w.0.iter().rev().map(|i| self.inverse(*i)).collect::<Option<Vec<u8>>>().map(Word)
    }
}

/// Sequence of alphabet indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Reduced-word language cut down by forbidden prefixes and suffixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSpec {
    pub alphabet: Alphabet,
    pub reduced: bool,
    pub forbidden_prefixes: Vec<Word>,
    pub forbidden_suffixes: Vec<Word>,
}

impl LanguageSpec {
    pub fn new(
        alphabet: Alphabet,
        reduced: bool,
        forbidden_prefixes: Vec<Word>,
        forbidden_suffixes: Vec<Word>,
    ) -> Result<Self> {
        let n = alphabet.len() as u8;
        let in_range = |w: &Word| w.0.iter().all(|i| *i < n) && !w.is_empty();
        if !forbidden_prefixes.iter().all(in_range) || !forbidden_suffixes.iter().all(in_range) {
            return Err(Error::InvalidInput("forbidden word outside the alphabet".into()));
        }
        if reduced && !alphabet.has_inverses() {
            return Err(Error::InvalidInput("reduced language needs inverse pairs".into()));
        }
        Ok(Self { alphabet, reduced, forbidden_prefixes, forbidden_suffixes })
    }

    /// Lexicographically-first double-coset representatives for the
    /// one-holed torus with alphabet order a > b > A > B.
    pub fn torus() -> Self {
        let alphabet = Alphabet::free_group("abAB").expect("static alphabet");
        let w = |s: &str| alphabet.parse(s).expect("static word");
        let prefixes = vec![w("abA"), w("ba")];
        let suffixes = vec![w("BA"), w("bAB")];
        Self::new(alphabet, true, prefixes, suffixes).expect("static language")
    }

    /// All reduced words of a free group alphabet.
    pub fn reduced_words(alphabet: Alphabet) -> Result<Self> {
        Self::new(alphabet, true, Vec::new(), Vec::new())
    }

    pub fn max_prefix_len(&self) -> usize {
        self.forbidden_prefixes.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn max_suffix_len(&self) -> usize {
        self.forbidden_suffixes.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Checks the rules that the last letter of `w` can break while
    /// extending a viable prefix.
    fn extension_viable(&self, w: &[u8]) -> bool {
        let n = w.len();
        if self.reduced && n >= 2 && self.alphabet.inverse(w[n - 2]) == Some(w[n - 1]) {
            return false;
        }
        !self.forbidden_prefixes.iter().any(|p| p.len() == n && p.0 == w)
    }

    fn suffix_ok(&self, w: &[u8]) -> bool {
        !self.forbidden_suffixes.iter().any(|s| w.ends_with(&s.0))
    }

    /// True when some extension of `w` (possibly `w` itself) can be accepted
    /// as far as reduction and prefix rules are concerned.
    pub fn prefix_viable(&self, w: &Word) -> bool {
        (1..=w.len()).all(|k| self.extension_viable(&w.0[..k]))
    }

    /// Full membership test for a nonempty word.
    pub fn accepts(&self, w: &Word) -> bool {
        !w.is_empty() && self.prefix_viable(w) && self.suffix_ok(&w.0)
    }
}

/// Streams accepted words of lengths `1..=max_len`, grouped by length and
/// lexicographic in the alphabet order within each length.
pub fn enumerate(spec: &LanguageSpec, max_len: usize) -> Enumerate<'_> {
    Enumerate { spec, max_len, target: 1, word: Vec::new(), next: Vec::new() }
}

/// Depth-first word stream with O(max_len) state.
#[derive(Debug, Clone)]
pub struct Enumerate<'a> {
    spec: &'a LanguageSpec,
    max_len: usize,
    target: usize,
    word: Vec<u8>,
    next: Vec<u8>,
}

impl Iterator for Enumerate<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let n = self.spec.alphabet.len() as u8;
        loop {
            if self.target > self.max_len {
                return None;
            }
            let d = self.word.len();
            if self.next.len() == d {
                self.next.push(0);
            }
            let k = self.next[d];
            if k >= n {
                self.next.pop();
                if d == 0 {
                    self.target += 1;
                } else {
                    self.word.pop();
                }
                continue;
            }
            self.next[d] += 1;
            self.word.push(k);
            if !self.spec.extension_viable(&self.word) {
                self.word.pop();
                continue;
            }
            if self.word.len() == self.target {
                let done = self.spec.suffix_ok(&self.word).then(|| Word(self.word.clone()));
                self.word.pop();
                if let Some(w) = done {
                    return Some(w);
                }
            }
        }
    }
}

/// Deterministic finite automaton over alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub letters: usize,
    pub start: usize,
    pub transitions: Vec<Vec<Option<usize>>>,
    pub accept: Vec<bool>,
}

impl Automaton {
    pub fn new(
        letters: usize,
        start: usize,
        transitions: Vec<Vec<Option<usize>>>,
        accept: Vec<bool>,
    ) -> Result<Self> {
        let states = transitions.len();
        if start >= states || accept.len() != states {
            return Err(Error::InvalidInput("automaton state tables disagree".into()));
        }
        for row in &transitions {
            if row.len() != letters || row.iter().flatten().any(|s| *s >= states) {
                return Err(Error::InvalidInput("bad transition row".into()));
            }
        }
        Ok(Self { letters, start, transitions, accept })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn step(&self, state: usize, letter: u8) -> Option<usize> {
        self.transitions[state][letter as usize]
    }

    pub fn run(&self, w: &Word) -> Option<usize> {
        w.0.iter().try_fold(self.start, |s, l| self.step(s, *l))
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.run(w).is_some_and(|s| self.accept[s])
    }

    /// Number of accepted words of each length `0..=max_len`.
    pub fn count_by_length(&self, max_len: usize) -> Vec<u64> {
        let mut ways = vec![0u64; self.state_count()];
        ways[self.start] = 1;
        let mut out = Vec::with_capacity(max_len + 1);
        for len in 0..=max_len {
            if len > 0 {
                let mut next = vec![0u64; self.state_count()];
                for (s, w) in ways.iter().enumerate() {
                    if *w == 0 {
                        continue;
                    }
                    for t in self.transitions[s].iter().flatten() {
                        next[*t] += *w;
                    }
                }
                ways = next;
            }
            out.push(ways.iter().zip(&self.accept).filter(|(_, a)| **a).map(|(w, _)| *w).sum());
        }
        out
    }

    /// Accepted words of one length in lexicographic index order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut w = Vec::new();
        self.collect(self.start, len, &mut w, &mut out);
        out
    }

    fn collect(&self, state: usize, left: usize, w: &mut Vec<u8>, out: &mut Vec<Word>) {
        if left == 0 {
            if self.accept[state] {
                out.push(Word(w.clone()));
            }
            return;
        }
        for l in 0..self.letters {
            if let Some(t) = self.transitions[state][l] {
                w.push(l as u8);
                self.collect(t, left - 1, w, out);
                w.pop();
            }
        }
    }
}

/// Compiles the filter rules into an automaton whose states remember the
/// word while it is shorter than the longest forbidden prefix, together
/// with the last few letters needed by the suffix and reduction rules.
pub fn compile(spec: &LanguageSpec) -> Automaton {
    type Signature = (Option<Vec<u8>>, Vec<u8>, bool);
    let letters = spec.alphabet.len();
    let head_len = spec.max_prefix_len();
    let tail_len = spec.max_suffix_len().max(1);
    let signature = |w: &[u8]| -> Signature {
        let head = (w.len() < head_len).then(|| w.to_vec());
        let tail = w[w.len().saturating_sub(tail_len)..].to_vec();
        (head, tail, w.is_empty())
    };
    let mut ids: BTreeMap<Signature, usize> = BTreeMap::new();
    let mut reps: Vec<Vec<u8>> = Vec::new();
    let mut transitions: Vec<Vec<Option<usize>>> = Vec::new();
    ids.insert(signature(&[]), 0);
    reps.push(Vec::new());
    let mut i = 0;
    while i < reps.len() {
        let rep = reps[i].clone();
        let mut row = vec![None; letters];
        for (l, slot) in row.iter_mut().enumerate() {
            let mut w = rep.clone();
            w.push(l as u8);
            if !spec.extension_viable(&w) {
                continue;
            }
            let sig = signature(&w);
            let id = match ids.get(&sig) {
                Some(id) => *id,
                None => {
                    let id = reps.len();
                    ids.insert(sig, id);
                    reps.push(w);
                    id
                }
            };
            *slot = Some(id);
        }
        transitions.push(row);
        i += 1;
    }
    let accept = reps.iter().map(|w| !w.is_empty() && spec.suffix_ok(w)).collect();
    Automaton { letters, start: 0, transitions, accept }
}

/// Subshift of finite type given by a 0/1 transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCoding {
    symbol_count: usize,
    matrix: Vec<Vec<bool>>,
}

impl ShiftCoding {
    pub fn new(matrix: Vec<Vec<bool>>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 || matrix.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput("transition matrix must be square".into()));
        }
        let coding = Self { symbol_count: k, matrix };
        if !coding.is_aperiodic() {
            return Err(Error::InvalidInput("transition matrix is not aperiodic".into()));
        }
        Ok(coding)
    }

    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        if rows.iter().flat_map(|r| r.iter()).any(|x| *x > 1) {
            return Err(Error::InvalidInput("entries must be 0 or 1".into()));
        }
        Self::new(rows.iter().map(|r| r.iter().map(|x| *x == 1).collect()).collect())
    }

    pub fn full_shift(k: usize) -> Result<Self> {
        Self::new(vec![vec![true; k]; k])
    }

    /// Reduced-word coding of the rank-two free group with symbols
    /// `a, b, A, B`: a symbol may not be followed by its inverse.
    pub fn free_group_rank_two() -> Self {
        Self::from_rows(&[&[1, 1, 0, 1], &[1, 1, 1, 0], &[0, 1, 1, 1], &[1, 0, 1, 1]])
            .expect("static matrix")
    }

    pub fn symbol_count(&self) -> usize {
        self.symbol_count
    }

    pub fn allowed(&self, i: u8, j: u8) -> bool {
        self.matrix[i as usize][j as usize]
    }

    /// Some power of the matrix is strictly positive (Wielandt bound).
    pub fn is_aperiodic(&self) -> bool {
        let k = self.symbol_count;
        let limit = (k - 1) * (k - 1) + 1;
        let mut power = self.matrix.clone();
        for _ in 0..limit {
            if power.iter().all(|r| r.iter().all(|x| *x)) {
                return true;
            }
            power = self.bool_product(&power);
        }
        power.iter().all(|r| r.iter().all(|x| *x))
    }

    fn bool_product(&self, p: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let k = self.symbol_count;
        (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|m| p[i][m] && self.matrix[m][j])).collect())
            .collect()
    }

    fn count_matrix_power(&self, n: usize) -> Vec<Vec<u128>> {
        let k = self.symbol_count;
        let mut out: Vec<Vec<u128>> =
            (0..k).map(|i| (0..k).map(|j| u128::from(i == j)).collect()).collect();
        for _ in 0..n {
            out = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| (0..k).filter(|m| self.matrix[*m][j]).map(|m| out[i][m]).sum())
                        .collect()
                })
                .collect();
        }
        out
    }

    /// Number of admissible strings of length `n >= 1`.
    pub fn admissible_count(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        self.count_matrix_power(n - 1).iter().flatten().sum()
    }

    /// Number of cyclically admissible strings of length `n`, the trace of
    /// the n-th matrix power.
    pub fn periodic_count(&self, n: usize) -> u128 {
        let p = self.count_matrix_power(n);
        (0..self.symbol_count).map(|i| p[i][i]).sum()
    }

    /// Admissible strings of length `n` in lexicographic order.
    pub fn shift_words(&self, n: usize) -> Vec<Word> {
        self.words_where(n, false)
    }

    /// Strings whose cyclic closure is admissible; these label the period-n
    /// points of the coded map.
    pub fn cyclic_words(&self, n: usize) -> Vec<Word> {
        self.words_where(n, true)
    }

    fn words_where(&self, n: usize, cyclic: bool) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        let mut w = Vec::with_capacity(n);
        self.extend(n, cyclic, &mut w, &mut out);
        out
    }

    fn extend(&self, n: usize, cyclic: bool, w: &mut Vec<u8>, out: &mut Vec<Word>) {
        if w.len() == n {
            if !cyclic || self.allowed(w[n - 1], w[0]) {
                out.push(Word(w.clone()));
            }
            return;
        }
        for s in 0..self.symbol_count as u8 {
            if w.last().is_none_or(|l| self.allowed(*l, s)) {
                w.push(s);
                self.extend(n, cyclic, w, out);
                w.pop();
            }
        }
    }
}

/// Exchanges the two symbols of a binary word.
pub fn swap_labels(w: &Word) -> Word {
    Word(w.0.iter().map(|s| 1 - (*s & 1)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_small_counts() {
        let spec = LanguageSpec::torus();
        let mut counts = [0usize; 4];
        for w in enumerate(&spec, 3) {
            counts[w.len()] += 1;
        }
        assert_eq!(&counts[1..], &[4, 10, 28]);
    }

    #[test]
    fn enumeration_is_canonical() {
        let spec = LanguageSpec::torus();
        let words: Vec<Word> = enumerate(&spec, 5).collect();
        for pair in words.windows(2) {
            assert!((pair[0].len(), &pair[0].0) < (pair[1].len(), &pair[1].0));
        }
    }

    #[test]
    fn shift_counts() {
        let full = ShiftCoding::full_shift(2).unwrap();
        assert_eq!(full.shift_words(3).len(), 8);
        assert_eq!(full.shift_words(1).len(), 2);
        let free = ShiftCoding::free_group_rank_two();
        assert_eq!(free.shift_words(2).len(), 12);
        assert_eq!(free.shift_words(1).len(), 4);
    }

    #[test]
    fn swap_examples() {
        let w = Word(vec![0, 1, 1]);
        assert_eq!(swap_labels(&w), Word(vec![1, 0, 0]));
        assert_eq!(swap_labels(&swap_labels(&w)), w);
    }

    #[test]
    fn periodic_matrix_rejected() {
        assert!(ShiftCoding::from_rows(&[&[0, 1], &[1, 0]]).is_err());
    }
}
