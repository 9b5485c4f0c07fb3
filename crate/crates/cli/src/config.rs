//! JSON configuration: run parameters, matrices, word languages, marked
//! representations and loops of representations.

use std::path::{Path, PathBuf};

use basmajian_core::moebius::MoebiusMap;
use basmajian_core::schottky::{torus_matrices, torus_rep, loop_parameter, MarkedRep, RootChoice};
use basmajian_core::symbolic::{Alphabet, LanguageSpec};
use basmajian_core::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Row-major `[[[re, im], [re, im]], [[re, im], [re, im]]]`.
pub type MatrixJson = [[[f64; 2]; 2]; 2];

pub fn matrix_from_json(m: &MatrixJson) -> CliResult<MoebiusMap> {
    let e = |r: usize, c: usize| Complex::new(m[r][c][0], m[r][c][1]);
    Ok(MoebiusMap::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))?)
}

pub fn matrix_to_json(m: &MoebiusMap) -> MatrixJson {
    let p = |z: Complex| [z.re, z.im];
    [[p(m.a), p(m.b)], [p(m.c), p(m.d)]]
}

/// `{"alphabet": "abAB", "order": "a>b>A>B", "reduced": true,
/// "forbidden_prefixes": [...], "forbidden_suffixes": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageJson {
    pub alphabet: String,
    #[serde(default)]
    pub order: Option<String>,
    #[serde(default = "yes")]
    pub reduced: bool,
    #[serde(default)]
    pub forbidden_prefixes: Vec<String>,
    #[serde(default)]
    pub forbidden_suffixes: Vec<String>,
}

fn yes() -> bool {
    true
}

impl LanguageJson {
    pub fn to_spec(&self) -> CliResult<LanguageSpec> {
        let order = self.order.as_deref().unwrap_or(&self.alphabet);
        let alphabet = Alphabet::free_group(order)?;
        let mut declared: Vec<char> = self.alphabet.chars().filter(|c| *c != '>').collect();
        let mut ordered = alphabet.symbols().to_vec();
        declared.sort_unstable();
        ordered.sort_unstable();
        if declared != ordered {
            return Err(CliError::Config("order must list exactly the alphabet letters".into()));
        }
        let parse = |ws: &[String]| ws.iter().map(|w| alphabet.parse(w)).collect::<Result<Vec<_>, _>>();
        let prefixes = parse(&self.forbidden_prefixes)?;
        let suffixes = parse(&self.forbidden_suffixes)?;
        Ok(LanguageSpec::new(alphabet.clone(), self.reduced, prefixes, suffixes)?)
    }

    pub fn torus() -> Self {
        Self {
            alphabet: "abAB".into(),
            order: Some("a>b>A>B".into()),
            reduced: true,
            forbidden_prefixes: vec!["abA".into(), "ba".into()],
            forbidden_suffixes: vec!["BA".into(), "bAB".into()],
        }
    }
}

/// Marked representation: generator matrices, boundary words and language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepJson {
    pub generators: Vec<MatrixJson>,
    #[serde(default = "commutator")]
    pub boundary_words: Vec<String>,
    #[serde(default = "LanguageJson::torus")]
    pub language: LanguageJson,
}

fn commutator() -> Vec<String> {
    vec!["abAB".into()]
}

impl RepJson {
    pub fn to_rep(&self) -> CliResult<MarkedRep> {
        let language = self.language.to_spec()?;
        let generators = self.generators.iter().map(matrix_from_json).collect::<CliResult<Vec<_>>>()?;
        let boundary = self
            .boundary_words
            .iter()
            .map(|w| language.alphabet.parse(w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MarkedRep::new(generators, boundary, language)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootJson {
    #[default]
    Larger,
    Alternate,
}

impl From<RootJson> for RootChoice {
    fn from(r: RootJson) -> Self {
        match r {
            RootJson::Larger => RootChoice::Larger,
            RootJson::Alternate => RootChoice::Alternate,
        }
    }
}

/// Loop `L = radius e^{2 pi i t}` of one-holed torus representations with
/// generators given as words in `X, Y` (lowercase letters are inverses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopJson {
    pub generators: [String; 2],
    #[serde(default = "five")]
    pub radius: f64,
    #[serde(default)]
    pub root: RootJson,
}

fn five() -> f64 {
    5.0
}

impl LoopJson {
    pub fn rep_at(&self, t: f64) -> basmajian_core::Result<MarkedRep> {
        let (x, y) = torus_matrices(loop_parameter(self.radius, t), self.root.into())?;
        torus_rep(&x, &y, [&self.generators[0], &self.generators[1]])
    }
}

/// Parameters shared by all commands; flags override file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub c: Option<String>,
    pub eps: Option<f64>,
    pub max_len: Option<usize>,
    pub steps: Option<usize>,
    pub rays: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Representation for `identity --target schottky`.
    pub rep: Option<RepJson>,
    /// Loop for `monodromy --loop config`.
    #[serde(rename = "loop")]
    pub loop_: Option<LoopJson>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn parse_complex(text: &str) -> CliResult<Complex> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned
        .parse::<Complex>()
        .map_err(|_| CliError::Config(format!("cannot parse complex number {text:?}")))
}

pub fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{name} must be positive")))
    }
}
