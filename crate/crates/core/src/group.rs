//! Exact word problem for free products of free-abelian and free groups.
//!
//! Elements are kept in normal form: an alternating sequence of nontrivial
//! syllables from distinct factors. A free-abelian syllable is an integer
//! vector (measured in the l1 norm); a free syllable is a reduced word. The
//! word length of an element under the standard symmetric generating set is
//! the sum of its syllable lengths, which makes distances exact integers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    FreeAbelian,
    Free,
}

#[derive(Debug, Clone)]
pub struct Factor {
    pub kind: FactorKind,
    pub rank: usize,
    /// Index of this factor's first generator in the global generator list.
    pub gen_offset: usize,
}

/// A finitely generated group presented as a free product of free-abelian
/// and free factors, with its symmetric generating set S.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    factors: Vec<Factor>,
    gen_names: Vec<String>,
    gen_factor: Vec<usize>,
    gen_local: Vec<usize>,
}

/// One directed generator: a generator id together with an inversion flag.
/// The set S is enumerated as all positive letters in declared order followed
/// by all inverse letters in declared order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn inverted(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Syllable {
    /// Nonzero integer vector in a free-abelian factor.
    Abelian { factor: u16, coords: Vec<i64> },
    /// Nonempty reduced word in a free factor; entries are +-(local index + 1).
    Free { factor: u16, word: Vec<i32> },
}

impl Syllable {
    fn factor(&self) -> u16 {
        match self {
            Syllable::Abelian { factor, .. } => *factor,
            Syllable::Free { factor, .. } => *factor,
        }
    }

    fn length(&self) -> u32 {
        match self {
            Syllable::Abelian { coords, .. } => {
                coords.iter().map(|c| c.unsigned_abs()).sum::<u64>() as u32
            }
            Syllable::Free { word, .. } => word.len() as u32,
        }
    }

    fn is_trivial(&self) -> bool {
        match self {
            Syllable::Abelian { coords, .. } => coords.iter().all(|&c| c == 0),
            Syllable::Free { word, .. } => word.is_empty(),
        }
    }
}

/// A group element in normal form. The empty syllable sequence is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    syllables: Vec<Syllable>,
}

impl Element {
    pub fn identity() -> Element {
        Element::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }
}

/// On-disk shape of a group spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpecFile {
    pub factors: Vec<FactorFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorFile {
    pub kind: FactorKind,
    pub rank: usize,
    pub generator_names: Vec<String>,
}

impl GroupSpec {
    pub fn new(factors: Vec<(FactorKind, Vec<String>)>) -> Result<GroupSpec> {
        if factors.is_empty() {
            return Err(Error::InvalidSpec("at least one factor required".into()));
        }
        let mut spec = GroupSpec {
            factors: Vec::new(),
            gen_names: Vec::new(),
            gen_factor: Vec::new(),
            gen_local: Vec::new(),
        };
        for (fi, (kind, names)) in factors.into_iter().enumerate() {
            if names.is_empty() {
                return Err(Error::InvalidSpec(format!("factor {fi} has no generators")));
            }
            let offset = spec.gen_names.len();
            for (li, name) in names.iter().enumerate() {
                if name.is_empty() || name.contains('\'') || name.contains(char::is_whitespace) {
                    return Err(Error::InvalidSpec(format!("bad generator name `{name}`")));
                }
                if spec.gen_names.contains(name) {
                    return Err(Error::InvalidSpec(format!("duplicate generator `{name}`")));
                }
                spec.gen_names.push(name.clone());
                spec.gen_factor.push(fi);
                spec.gen_local.push(li);
            }
            spec.factors.push(Factor {
                kind,
                rank: spec.gen_names.len() - offset,
                gen_offset: offset,
            });
        }
        Ok(spec)
    }

    pub fn from_file_spec(file: &GroupSpecFile) -> Result<GroupSpec> {
        let mut factors = Vec::new();
        for f in &file.factors {
            if f.rank != f.generator_names.len() {
                return Err(Error::InvalidSpec(format!(
                    "factor rank {} does not match {} generator names",
                    f.rank,
                    f.generator_names.len()
                )));
            }
            factors.push((f.kind, f.generator_names.clone()));
        }
        GroupSpec::new(factors)
    }

    pub fn to_file_spec(&self) -> GroupSpecFile {
        GroupSpecFile {
            factors: self
                .factors
                .iter()
                .map(|f| FactorFile {
                    kind: f.kind,
                    rank: f.rank,
                    generator_names: self.gen_names
                        [f.gen_offset..f.gen_offset + f.rank]
                        .to_vec(),
                })
                .collect(),
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn generator_count(&self) -> usize {
        self.gen_names.len()
    }

    pub fn generator_name(&self, gen: u16) -> &str {
        &self.gen_names[gen as usize]
    }

    /// The symmetric generating set S in canonical order: positive letters in
    /// declared order, then inverse letters in declared order.
    pub fn letters(&self) -> Vec<Letter> {
        let n = self.gen_names.len();
        let mut out = Vec::with_capacity(2 * n);
        for gen in 0..n {
            out.push(Letter {
                gen: gen as u16,
                inverse: false,
            });
        }
        for gen in 0..n {
            out.push(Letter {
                gen: gen as u16,
                inverse: true,
            });
        }
        out
    }

    pub fn letter_count(&self) -> usize {
        2 * self.gen_names.len()
    }

    pub fn letter_index(&self, letter: Letter) -> usize {
        let n = self.gen_names.len();
        letter.gen as usize + if letter.inverse { n } else { 0 }
    }

    pub fn letter_at(&self, index: usize) -> Letter {
        let n = self.gen_names.len();
        Letter {
            gen: (index % n) as u16,
            inverse: index >= n,
        }
    }

    pub fn letter_name(&self, letter: Letter) -> String {
        let base = &self.gen_names[letter.gen as usize];
        if letter.inverse {
            format!("{base}'")
        } else {
            base.clone()
        }
    }

    fn letter_syllable(&self, letter: Letter) -> Syllable {
        let fi = self.gen_factor[letter.gen as usize];
        let local = self.gen_local[letter.gen as usize];
        let factor = &self.factors[fi];
        match factor.kind {
            FactorKind::FreeAbelian => {
                let mut coords = vec![0i64; factor.rank];
                coords[local] = if letter.inverse { -1 } else { 1 };
                Syllable::Abelian {
                    factor: fi as u16,
                    coords,
                }
            }
            FactorKind::Free => {
                let signed = (local as i32 + 1) * if letter.inverse { -1 } else { 1 };
                Syllable::Free {
                    factor: fi as u16,
                    word: vec![signed],
                }
            }
        }
    }

    fn merge_into(&self, out: &mut Vec<Syllable>, syl: Syllable) {
        if syl.is_trivial() {
            return;
        }
        if let Some(last) = out.last_mut() {
            if last.factor() == syl.factor() {
                match (last, syl) {
                    (
                        Syllable::Abelian { coords, .. },
                        Syllable::Abelian { coords: add, .. },
                    ) => {
                        for (c, a) in coords.iter_mut().zip(add) {
                            *c += a;
                        }
                    }
                    (Syllable::Free { word, .. }, Syllable::Free { word: add, .. }) => {
                        for x in add {
                            if word.last() == Some(&-x) {
                                word.pop();
                            } else {
                                word.push(x);
                            }
                        }
                    }
                    _ => unreachable!("factor kinds agree when factor ids agree"),
                }
                if out.last().map(|s| s.is_trivial()).unwrap_or(false) {
                    out.pop();
                }
                return;
            }
        }
        out.push(syl);
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        let mut syllables = a.syllables.clone();
        for syl in &b.syllables {
            self.merge_into(&mut syllables, syl.clone());
        }
        Element { syllables }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        let syllables = a
            .syllables
            .iter()
            .rev()
            .map(|s| match s {
                Syllable::Abelian { factor, coords } => Syllable::Abelian {
                    factor: *factor,
                    coords: coords.iter().map(|c| -c).collect(),
                },
                Syllable::Free { factor, word } => Syllable::Free {
                    factor: *factor,
                    word: word.iter().rev().map(|x| -x).collect(),
                },
            })
            .collect();
        Element { syllables }
    }

    /// Right-multiplication by a single generator letter.
    pub fn apply_letter(&self, a: &Element, letter: Letter) -> Element {
        let mut syllables = a.syllables.clone();
        self.merge_into(&mut syllables, self.letter_syllable(letter));
        Element { syllables }
    }

    /// Word length |a| in the word metric of Cay(G, S).
    pub fn length(&self, a: &Element) -> u32 {
        a.syllables.iter().map(|s| s.length()).sum()
    }

    /// d(a, b) = |a^-1 b|; symmetric and exact.
    pub fn distance(&self, a: &Element, b: &Element) -> u32 {
        self.length(&self.multiply(&self.inverse(a), b))
    }

    pub fn element_from_letter(&self, letter: Letter) -> Element {
        Element {
            syllables: vec![self.letter_syllable(letter)],
        }
    }

    /// Parses a space-separated word such as `a b' c` (apostrophe = inverse).
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inverse) = match tok.strip_suffix('\'') {
                Some(base) => (base, true),
                None => (tok, false),
            };
            let gen = self
                .gen_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            out.push(Letter {
                gen: gen as u16,
                inverse,
            });
        }
        Ok(out)
    }

    pub fn word_to_element(&self, word: &[Letter]) -> Element {
        let mut e = Element::identity();
        for &l in word {
            e = self.apply_letter(&e, l);
        }
        e
    }

    /// A canonical geodesic spelling of the normal form; inverse of
    /// `word_to_element` on normal forms.
    pub fn element_to_word(&self, a: &Element) -> Vec<Letter> {
        let mut out = Vec::new();
        for syl in &a.syllables {
            match syl {
                Syllable::Abelian { factor, coords } => {
                    let offset = self.factors[*factor as usize].gen_offset;
                    for (i, &c) in coords.iter().enumerate() {
                        let letter = Letter {
                            gen: (offset + i) as u16,
                            inverse: c < 0,
                        };
                        for _ in 0..c.unsigned_abs() {
                            out.push(letter);
                        }
                    }
                }
                Syllable::Free { factor, word } => {
                    let offset = self.factors[*factor as usize].gen_offset;
                    for &x in word {
                        out.push(Letter {
                            gen: (offset + (x.unsigned_abs() as usize - 1)) as u16,
                            inverse: x < 0,
                        });
                    }
                }
            }
        }
        out
    }

    /// Canonical display form, e.g. `a a b' c`; the identity prints as `e`.
    pub fn display_element(&self, a: &Element) -> String {
        if a.is_identity() {
            return "e".to_string();
        }
        let mut s = String::new();
        for (i, letter) in self.element_to_word(a).into_iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{}", self.letter_name(letter));
        }
        s
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        if text.trim() == "e" {
            return Ok(Element::identity());
        }
        Ok(self.word_to_element(&self.parse_word(text)?))
    }
}
