//! The shift-space engine. An integer 1-Lipschitz field h on the ball has a
//! symbolic derivative: at each vertex the letter s -> h(vs) - h(v) over the
//! alphabet {-1, 0, 1}^S. Derivatives determine the field up to one base
//! value, carry a Bernoulli shift action, and are cut out locally by edge
//! antisymmetry plus zero-sum commutator squares in the free-abelian factors.
//!
//! Letters are stored as small per-vertex vectors; the alphabet (size 3^|S|)
//! is never materialized as a table.

use crate::ball::{Ball, VertexId};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{require_lipschitz, PartialField, Provenance, ScalarField};
use crate::group::{Element, FactorKind};
use crate::ray::RayWalk;
use serde::Serialize;
use std::collections::VecDeque;
use std::fmt::Write as _;

/// Per-vertex letters of the derivative field. `entries[v][i]` is the
/// increment along letter i of S, or None when the edge leaves the window
/// (or the vertex is outside a shifted window's overlap).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeField {
    entries: Vec<Vec<Option<i8>>>,
}

impl DerivativeField {
    pub fn entry(&self, v: VertexId, letter_index: usize) -> Option<i8> {
        self.entries[v as usize][letter_index]
    }

    pub fn letter(&self, v: VertexId) -> &[Option<i8>] {
        &self.entries[v as usize]
    }

    /// The vertex letter as a total map, if no component is absent.
    pub fn total_letter(&self, v: VertexId) -> Option<Vec<i8>> {
        self.entries[v as usize].iter().copied().collect()
    }

    /// Vertices with a fully defined letter.
    pub fn defined(&self) -> usize {
        (0..self.entries.len())
            .filter(|&v| self.total_letter(v as VertexId).is_some())
            .count()
    }

    /// CSV: normal_form, then one column per letter of S (empty = absent).
    pub fn write_csv(&self, ball: &Ball) -> String {
        let spec = ball.spec();
        let mut out = String::from("normal_form");
        for letter in spec.letters() {
            let _ = write!(out, ",{}", spec.letter_name(letter));
        }
        out.push('\n');
        for v in ball.ids() {
            let _ = write!(out, "{}", ball.display(v));
            for entry in self.letter(v) {
                match entry {
                    Some(x) => {
                        let _ = write!(out, ",{x}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(ball: &Ball, text: &str) -> Result<DerivativeField> {
        let n_letters = ball.spec().letter_count();
        let mut entries = vec![None; ball.len()];
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 && line.starts_with("normal_form") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let form = parts
                .next()
                .ok_or_else(|| Error::Config(format!("empty line {}", lineno + 1)))?;
            let elem = ball.spec().parse_element(form)?;
            let v = ball.require_vertex(&elem)?;
            let mut letter = Vec::with_capacity(n_letters);
            for part in parts {
                if part.trim().is_empty() {
                    letter.push(None);
                } else {
                    let x: i8 = part.trim().parse().map_err(|_| {
                        Error::Config(format!("bad increment `{part}` on line {}", lineno + 1))
                    })?;
                    if !(-1..=1).contains(&x) {
                        return Err(Error::Config(format!("increment {x} outside -1..=1")));
                    }
                    letter.push(Some(x));
                }
            }
            if letter.len() != n_letters {
                return Err(Error::Config(format!(
                    "line {} has {} letter columns, expected {n_letters}",
                    lineno + 1,
                    letter.len()
                )));
            }
            if entries[v as usize].replace(letter).is_some() {
                return Err(Error::Config(format!("duplicate vertex `{form}`")));
            }
        }
        let entries: Option<Vec<Vec<Option<i8>>>> = entries.into_iter().collect();
        entries
            .map(|entries| DerivativeField { entries })
            .ok_or_else(|| Error::Config("derivative does not cover the ball".into()))
    }
}

/// The symbolic derivative of a 1-Lipschitz field: letter components exist
/// exactly for in-ball edges, so boundary edges are marked absent rather than
/// invented.
pub fn derivative(ball: &Ball, h: &ScalarField) -> Result<DerivativeField> {
    require_lipschitz(ball, h)?;
    Ok(derivative_unchecked(ball, |v| Some(h.value(v))))
}

/// Derivative of a partial field; components exist where both endpoints do.
pub fn derivative_partial(ball: &Ball, h: &PartialField) -> DerivativeField {
    derivative_unchecked(ball, |v| h.values[v as usize])
}

fn derivative_unchecked(ball: &Ball, value: impl Fn(VertexId) -> Option<i64>) -> DerivativeField {
    let spec = ball.spec();
    let letters = spec.letters();
    let entries = (0..ball.len() as VertexId)
        .map(|v| {
            letters
                .iter()
                .map(|&letter| {
                    let hv = value(v)?;
                    let w = spec.apply_letter(ball.element(v), letter);
                    let wid = ball.vertex_id(&w)?;
                    let hw = value(wid)?;
                    Some((hw - hv) as i8)
                })
                .collect()
        })
        .collect();
    DerivativeField { entries }
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopViolation {
    pub kind: String,
    pub at: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub pass: bool,
    pub edges_checked: usize,
    pub squares_checked: usize,
    pub violations: Vec<LoopViolation>,
}

/// Local finite-type consistency: edge antisymmetry on every interior edge,
/// and zero increment sum around each in-window commutator square of every
/// free-abelian factor. On these windows the two checks together are
/// equivalent to integrability, which `integrate` re-verifies.
pub fn loop_check(ball: &Ball, sigma: &DerivativeField) -> LoopReport {
    let spec = ball.spec();
    let letters = spec.letters();
    let mut violations = Vec::new();
    let mut edges_checked = 0;
    for v in ball.ids() {
        for (li, &letter) in letters.iter().enumerate() {
            let Some(fwd) = sigma.entry(v, li) else {
                continue;
            };
            let w = spec.apply_letter(ball.element(v), letter);
            let Some(wid) = ball.vertex_id(&w) else {
                violations.push(LoopViolation {
                    kind: "dangling".into(),
                    at: ball.display(v),
                    detail: format!(
                        "letter {} present but edge leaves the ball",
                        spec.letter_name(letter)
                    ),
                });
                continue;
            };
            edges_checked += 1;
            let back_index = spec.letter_index(letter.inverted());
            match sigma.entry(wid, back_index) {
                Some(bwd) if bwd == -fwd => {}
                got => violations.push(LoopViolation {
                    kind: "antisymmetry".into(),
                    at: ball.display(v),
                    detail: format!(
                        "edge {} -{}-> {}: forward {fwd}, backward {got:?}",
                        ball.display(v),
                        spec.letter_name(letter),
                        ball.display(wid)
                    ),
                }),
            }
        }
    }
    // Commutator squares of each free-abelian factor.
    let mut squares_checked = 0;
    for (fi, factor) in spec.factors().iter().enumerate() {
        if factor.kind != FactorKind::FreeAbelian || factor.rank < 2 {
            continue;
        }
        let _ = fi;
        for i in 0..factor.rank {
            for j in (i + 1)..factor.rank {
                let si = spec.letter_at(factor.gen_offset + i);
                let sj = spec.letter_at(factor.gen_offset + j);
                for v in ball.ids() {
                    let Some(path) = square_increments(ball, sigma, v, si, sj) else {
                        continue;
                    };
                    squares_checked += 1;
                    let sum: i32 = path.iter().map(|&x| x as i32).sum();
                    if sum != 0 {
                        violations.push(LoopViolation {
                            kind: "square".into(),
                            at: ball.display(v),
                            detail: format!(
                                "[{}, {}]-square sums to {sum}",
                                spec.letter_name(si),
                                spec.letter_name(sj)
                            ),
                        });
                    }
                }
            }
        }
    }
    LoopReport {
        pass: violations.is_empty(),
        edges_checked,
        squares_checked,
        violations,
    }
}

fn square_increments(
    ball: &Ball,
    sigma: &DerivativeField,
    v: VertexId,
    si: crate::group::Letter,
    sj: crate::group::Letter,
) -> Option<[i8; 4]> {
    let spec = ball.spec();
    let v1 = ball.vertex_id(&spec.apply_letter(ball.element(v), si))?;
    let v2 = ball.vertex_id(&spec.apply_letter(ball.element(v1), sj))?;
    let v3 = ball.vertex_id(&spec.apply_letter(ball.element(v2), si.inverted()))?;
    let back = ball.vertex_id(&spec.apply_letter(ball.element(v3), sj.inverted()))?;
    debug_assert_eq!(back, v);
    Some([
        sigma.entry(v, spec.letter_index(si))?,
        sigma.entry(v1, spec.letter_index(sj))?,
        sigma.entry(v2, spec.letter_index(si.inverted()))?,
        sigma.entry(v3, spec.letter_index(sj.inverted()))?,
    ])
}

/// Reconstructs the unique field with the given base value whose derivative
/// is sigma. Fails with the witnessing edge if sigma is path-dependent.
pub fn integrate(
    ball: &Ball,
    sigma: &DerivativeField,
    base: VertexId,
    base_value: i64,
) -> Result<ScalarField> {
    let report = loop_check(ball, sigma);
    if !report.pass {
        let v = &report.violations[0];
        return Err(Error::IntegrationCycle {
            edge: format!("{} ({})", v.at, v.detail),
        });
    }
    let spec = ball.spec();
    let letters = spec.letters();
    let mut values: Vec<Option<i64>> = vec![None; ball.len()];
    values[base as usize] = Some(base_value);
    let mut queue = VecDeque::new();
    queue.push_back(base);
    while let Some(v) = queue.pop_front() {
        let hv = values[v as usize].expect("assigned before queueing");
        for (li, &letter) in letters.iter().enumerate() {
            let Some(inc) = sigma.entry(v, li) else {
                continue;
            };
            let w = spec.apply_letter(ball.element(v), letter);
            let Some(wid) = ball.vertex_id(&w) else {
                continue;
            };
            match values[wid as usize] {
                None => {
                    values[wid as usize] = Some(hv + inc as i64);
                    queue.push_back(wid);
                }
                Some(existing) => {
                    if existing != hv + inc as i64 {
                        // loop_check passed, so this would mean the square
                        // generators miss a cycle of the window.
                        return Err(Error::Invariant(format!(
                            "integration mismatch across {} -{}-> {}",
                            ball.display(v),
                            spec.letter_name(letter),
                            ball.display(wid)
                        )));
                    }
                }
            }
        }
    }
    let values: Option<Vec<i64>> = values.into_iter().collect();
    match values {
        Some(values) => ScalarField::new(ball, values, Provenance::Synthetic),
        None => Err(Error::Invariant(
            "ball is connected but integration left vertices unassigned".into(),
        )),
    }
}

/// Bernoulli shift on a windowed configuration: (g sigma)(v) = sigma(g^-1 v),
/// defined where g^-1 v lies in the ball.
pub fn shift_act(ball: &Ball, sigma: &DerivativeField, g: &Element) -> Result<DerivativeField> {
    let spec = ball.spec();
    let g_inv = spec.inverse(g);
    let n_letters = spec.letter_count();
    let mut defined = 0usize;
    let entries = (0..ball.len() as VertexId)
        .map(|v| {
            let moved = spec.multiply(&g_inv, ball.element(v));
            match ball.vertex_id(&moved) {
                Some(w) => {
                    defined += 1;
                    sigma.letter(w).to_vec()
                }
                None => vec![None; n_letters],
            }
        })
        .collect();
    if defined == 0 {
        return Err(Error::EmptyOverlap(spec.display_element(g)));
    }
    Ok(DerivativeField { entries })
}

/// Pointwise equality where both sides are defined; the count is the size of
/// the common domain.
pub fn agree_on_overlap(a: &DerivativeField, b: &DerivativeField) -> (bool, usize) {
    let mut common = 0;
    for (la, lb) in a.entries.iter().zip(&b.entries) {
        for (xa, xb) in la.iter().zip(lb) {
            if let (Some(xa), Some(xb)) = (xa, xb) {
                common += 1;
                if xa != xb {
                    return (false, common);
                }
            }
        }
    }
    (true, common)
}

/// A pattern: an assignment of symbols to a finite support of group elements.
#[derive(Debug, Clone)]
pub struct ForbiddenSet<T> {
    pub support: Vec<Element>,
    pub patterns: Vec<Vec<T>>,
}

impl<T> ForbiddenSet<T> {
    pub fn new(support: Vec<Element>, patterns: Vec<Vec<T>>) -> Result<ForbiddenSet<T>> {
        if support.is_empty() {
            return Err(Error::EmptyFamily("pattern support".into()));
        }
        for p in &patterns {
            if p.len() != support.len() {
                return Err(Error::Config(
                    "every pattern must cover the shared support".into(),
                ));
            }
        }
        Ok(ForbiddenSet { support, patterns })
    }
}

/// On-disk shape of a forbidden set over the letter alphabet: support points
/// as normal-form words, each pattern as one letter vector (in S order) per
/// support point.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ForbiddenSetFile {
    pub support: Vec<String>,
    pub patterns: Vec<Vec<Vec<i8>>>,
}

pub fn forbidden_set_from_file(
    spec: &crate::group::GroupSpec,
    file: &ForbiddenSetFile,
) -> Result<ForbiddenSet<Vec<i8>>> {
    let support: Vec<Element> = file
        .support
        .iter()
        .map(|w| spec.parse_element(w))
        .collect::<Result<_>>()?;
    for pattern in &file.patterns {
        for letter in pattern {
            if letter.len() != spec.letter_count() {
                return Err(Error::Config(format!(
                    "pattern letter has {} components, expected {}",
                    letter.len(),
                    spec.letter_count()
                )));
            }
            if letter.iter().any(|x| !(-1..=1).contains(x)) {
                return Err(Error::Config("letter components must be in -1..=1".into()));
            }
        }
    }
    ForbiddenSet::new(support, file.patterns.clone())
}

/// A per-vertex symbol assignment over an arbitrary finite alphabet; None
/// marks window vertices without a total symbol.
#[derive(Debug, Clone)]
pub struct SymbolField<T> {
    pub symbols: Vec<Option<T>>,
}

impl<T> SymbolField<T> {
    pub fn new(ball: &Ball, symbols: Vec<Option<T>>) -> Result<SymbolField<T>> {
        if symbols.len() != ball.len() {
            return Err(Error::Config("symbol field does not cover the ball".into()));
        }
        Ok(SymbolField { symbols })
    }
}

/// The derivative field as a symbol field over total letters.
pub fn letter_symbols(ball: &Ball, sigma: &DerivativeField) -> SymbolField<Vec<i8>> {
    SymbolField {
        symbols: ball.ids().map(|v| sigma.total_letter(v)).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanMatch {
    pub position: String,
    pub pattern: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub matches: Vec<ScanMatch>,
    pub positions_tested: usize,
    pub positions_skipped: usize,
}

/// Lists all in-ball g where some forbidden pattern equals (g sigma)|_F,
/// i.e. sigma(g^-1 f) = pattern(f) for all f in the support. Positions where
/// the translated support leaves the window (or hits an absent symbol) are
/// skipped and counted.
pub fn forbidden_scan<T: Eq + Sync + Send>(
    ball: &Ball,
    field: &SymbolField<T>,
    forbidden: &ForbiddenSet<T>,
) -> ScanReport {
    let spec = ball.spec();
    let results: Vec<Option<Option<usize>>> = exec::map_range(ball.len(), |vi| {
        let g_inv = spec.inverse(ball.element(vi as VertexId));
        let mut window = Vec::with_capacity(forbidden.support.len());
        for f in &forbidden.support {
            let spot = spec.multiply(&g_inv, f);
            match ball.vertex_id(&spot) {
                Some(w) => match &field.symbols[w as usize] {
                    Some(sym) => window.push(sym),
                    None => return None,
                },
                None => return None,
            }
        }
        for (pi, pattern) in forbidden.patterns.iter().enumerate() {
            if window.iter().zip(pattern).all(|(a, b)| **a == *b) {
                return Some(Some(pi));
            }
        }
        Some(None)
    });
    let mut matches = Vec::new();
    let mut positions_tested = 0;
    let mut positions_skipped = 0;
    for (vi, r) in results.into_iter().enumerate() {
        match r {
            None => positions_skipped += 1,
            Some(None) => positions_tested += 1,
            Some(Some(pattern)) => {
                positions_tested += 1;
                matches.push(ScanMatch {
                    position: ball.display(vi as VertexId),
                    pattern,
                });
            }
        }
    }
    ScanReport {
        matches,
        positions_tested,
        positions_skipped,
    }
}

#[derive(Debug, Clone)]
pub struct CodingResult {
    pub field: ScalarField,
    pub sigma: DerivativeField,
    pub stabilization_window: u32,
}

/// Busemann field of the ray, then its derivative, with the distance-like and
/// loop checks enforced and the basepoint normalized to h(center) = 0.
pub fn coding_pipeline(ball: &Ball, c: &RayWalk, margin: u32) -> Result<CodingResult> {
    let (h, cert) = crate::field::busemann_default(ball, c)?;
    if h.value(ball.center_id()) != 0 {
        return Err(Error::Invariant(
            "Busemann field of a based ray must vanish at the center".into(),
        ));
    }
    let report = crate::field::check_distance_like(ball, &h, margin)?;
    if !report.pass {
        return Err(Error::Invariant(format!(
            "Busemann field failed the distance-like check: {:?}",
            report.worst
        )));
    }
    let sigma = derivative(ball, &h)?;
    let loops = loop_check(ball, &sigma);
    if !loops.pass {
        return Err(Error::Invariant(format!(
            "derivative of a Busemann field failed loop_check: {:?}",
            loops.violations.first()
        )));
    }
    Ok(CodingResult {
        field: h,
        sigma,
        stabilization_window: cert.window,
    })
}
