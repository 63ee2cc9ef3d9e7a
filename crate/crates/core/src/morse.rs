//! Finite-scale metrology for hyperbolicity-like quantities: slim constants
//! for triangles, the convexity defect, K-convexity of fields along geodesic
//! families, contraction profiles of geodesics, and quasi-geodesic excursion
//! search against a Morse gauge.
//!
//! Gauges and contraction bounds are measured from below by witness search
//! and never claimed as upper bounds: enlarging any search budget can only
//! increase the reported value.

use crate::ball::{Ball, VertexId};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::ScalarField;
use crate::geodesic::{internal_points, GeodesicSegment, TriangleSides};
use crate::group::{Element, GroupSpec};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlimCondition {
    /// Each side lies in the union of the delta-neighborhoods of the other two.
    One,
    /// For each corner, the two subgeodesics to its internal points are
    /// mutually within delta (symmetric Hausdorff distance).
    Two,
}

fn min_distance_to(spec: &GroupSpec, from: &Element, set: &[Element]) -> u32 {
    set.iter()
        .map(|e| spec.distance(from, e))
        .min()
        .expect("nonempty side")
}

fn hausdorff(spec: &GroupSpec, a: &[Element], b: &[Element]) -> u32 {
    let fwd = a
        .iter()
        .map(|e| min_distance_to(spec, e, b))
        .max()
        .unwrap_or(0);
    let bwd = b
        .iter()
        .map(|e| min_distance_to(spec, e, a))
        .max()
        .unwrap_or(0);
    fwd.max(bwd)
}

/// The least delta for which the chosen side triple satisfies the chosen slim
/// condition. Values depend on the side choice; callers wanting the support
/// of all geodesic triples must enumerate sides themselves.
pub fn slim_constant(ball: &Ball, sides: &TriangleSides, condition: SlimCondition) -> Result<u32> {
    let spec = ball.spec();
    let xy = sides.xy.elements(ball);
    let xz = sides.xz.elements(ball);
    let yz = sides.yz.elements(ball);
    match condition {
        SlimCondition::One => {
            let mut delta = 0;
            for (side, others) in [
                (&xy, [&xz[..], &yz[..]]),
                (&xz, [&xy[..], &yz[..]]),
                (&yz, [&xy[..], &xz[..]]),
            ] {
                for p in side.iter() {
                    let d = min_distance_to(spec, p, others[0])
                        .min(min_distance_to(spec, p, others[1]));
                    delta = delta.max(d);
                }
            }
            Ok(delta)
        }
        SlimCondition::Two => {
            let tripod = internal_points(ball, sides)?;
            let (a2, b2, _) = tripod.doubled;
            let a = (a2 / 2) as usize;
            let b = (b2 / 2) as usize;
            // Corner x: prefixes of [x,y] and [x,z] up to the internal points.
            let seg_x1 = &xy[..=a.min(xy.len() - 1)];
            let seg_x2 = &xz[..=a.min(xz.len() - 1)];
            // Corner y: tail of [x,y] reversed and prefix of [y,z].
            let from_y_on_xy: Vec<Element> = xy.iter().rev().take(b + 1).cloned().collect();
            let seg_y2 = &yz[..=b.min(yz.len() - 1)];
            // Corner z: tails of [x,z] and [y,z].
            let c = xz.len() - 1 - a;
            let from_z_on_xz: Vec<Element> = xz.iter().rev().take(c + 1).cloned().collect();
            let from_z_on_yz: Vec<Element> = yz.iter().rev().take(c + 1).cloned().collect();
            let delta = hausdorff(spec, seg_x1, seg_x2)
                .max(hausdorff(spec, &from_y_on_xy, seg_y2))
                .max(hausdorff(spec, &from_z_on_xz, &from_z_on_yz));
            Ok(delta)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    /// d(x, x_t) * t_den - ((t_den - t_num) d(x,y) + t_num d(x,z)).
    pub defect_scaled: i64,
    /// 2 * delta' * t_den with delta' from slim condition 2 on the same sides.
    pub bound_scaled: i64,
    pub t_num: u32,
    pub t_den: u32,
    /// Set when t_num * d(y,z) was not divisible by t_den and x_t was rounded
    /// down to the nearest vertex.
    pub rounded: bool,
}

/// The convexity defect of the triangle corner x against the point x_t on the
/// side [y,z] with d(y, x_t) = (t_num/t_den) d(y,z), denominators cleared.
pub fn convexity_defect(
    ball: &Ball,
    sides: &TriangleSides,
    t_num: u32,
    t_den: u32,
) -> Result<DefectReport> {
    if t_den == 0 || t_num > t_den {
        return Err(Error::Config("t must satisfy 0 <= t_num/t_den <= 1".into()));
    }
    let spec = ball.spec();
    let x = sides.xy.start();
    let dxy = sides.xy.len() as i64;
    let dxz = sides.xz.len() as i64;
    let dyz = sides.yz.len() as u64;
    let pos_num = t_num as u64 * dyz;
    let rounded = !pos_num.is_multiple_of(t_den as u64);
    let pos = (pos_num / t_den as u64) as usize;
    let x_t = sides.yz.vertices[pos];
    let dx_xt = spec.distance(ball.element(x), ball.element(x_t)) as i64;
    let defect_scaled =
        dx_xt * t_den as i64 - ((t_den - t_num) as i64 * dxy + t_num as i64 * dxz);
    let delta2 = slim_constant(ball, sides, SlimCondition::Two)? as i64;
    let bound_scaled = 2 * delta2 * t_den as i64;
    if defect_scaled > bound_scaled && !rounded {
        return Err(Error::Invariant(format!(
            "convexity defect {defect_scaled} exceeds the slim bound {bound_scaled}"
        )));
    }
    Ok(DefectReport {
        defect_scaled,
        bound_scaled,
        t_num,
        t_den,
        rounded,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KConvexityReport {
    /// Least integer K with h(x_t) <= (1-t) h(x_0) + t h(x_1) + K over every
    /// sampled (segment, position). Negative values witness strict convexity.
    pub k_hat: i64,
    pub samples: usize,
    pub witness: Option<KConvexityWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KConvexityWitness {
    pub segment: usize,
    pub position: usize,
    pub defect_num: i64,
    pub length: u32,
}

/// Measures the least K over a family of geodesic segments; each interior
/// position t = i/n is checked with denominators cleared.
pub fn k_convexity(
    ball: &Ball,
    h: &ScalarField,
    family: &[GeodesicSegment],
) -> Result<KConvexityReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily("k_convexity".into()));
    }
    for seg in family {
        if seg.vertices.iter().any(|&v| v as usize >= ball.len()) {
            return Err(Error::NotInBall("k_convexity segment".into()));
        }
    }
    let per_segment: Vec<(i64, usize, Option<KConvexityWitness>)> =
        exec::map_range(family.len(), |si| {
            let seg = &family[si];
            let n = seg.len() as i64;
            let mut k = i64::MIN;
            let mut samples = 0;
            let mut witness = None;
            if n == 0 {
                return (0, 1, None);
            }
            let h0 = h.value(seg.start());
            let h1 = h.value(seg.end());
            for (i, &v) in seg.vertices.iter().enumerate() {
                let i = i as i64;
                let defect_num = n * h.value(v as VertexId) - ((n - i) * h0 + i * h1);
                samples += 1;
                // ceil(defect_num / n)
                let needed = defect_num.div_euclid(n)
                    + if defect_num.rem_euclid(n) != 0 { 1 } else { 0 };
                if needed > k {
                    k = needed;
                    witness = Some(KConvexityWitness {
                        segment: si,
                        position: i as usize,
                        defect_num,
                        length: seg.len(),
                    });
                }
            }
            (k, samples, witness)
        });
    let mut k_hat = i64::MIN;
    let mut samples = 0;
    let mut witness = None;
    for (k, s, w) in per_segment {
        samples += s;
        if k > k_hat {
            k_hat = k;
            witness = w;
        }
    }
    Ok(KConvexityReport {
        k_hat,
        samples,
        witness,
    })
}

/// Rectangle thinness measured directly: the two triangles of the diagonal
/// [x, z], each under slim condition 1, reported as a pair. There is no
/// predicted constant; this only measures.
pub fn rectangle_slim(
    ball: &Ball,
    x: VertexId,
    y: VertexId,
    z: VertexId,
    w: VertexId,
) -> Result<(u32, u32)> {
    let first = TriangleSides::lex_first(ball, x, y, z)?;
    let second = TriangleSides::lex_first(ball, x, z, w)?;
    Ok((
        slim_constant(ball, &first, SlimCondition::One)?,
        slim_constant(ball, &second, SlimCondition::One)?,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSpec {
    /// Normal form of the sample ball center.
    pub center: String,
    pub radius: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionSample {
    pub center: String,
    pub radius: u32,
    pub clearance: u32,
    pub projection_size: usize,
    pub diameter: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    BoundedSoFar,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionProfile {
    pub samples: Vec<ContractionSample>,
    /// Max observed projection diameter; a lower bound for any true D.
    pub d_hat: u32,
    pub trend: Trend,
}

/// Projects metric balls disjoint from gamma onto it and records the
/// projection diameters. Sample balls are materialized independently, so
/// gamma may be any geodesic word, not only one inside a prebuilt ball.
pub fn contraction_profile(
    spec: &GroupSpec,
    gamma: &[Element],
    samples: &[(Element, u32)],
) -> Result<ContractionProfile> {
    if gamma.is_empty() {
        return Err(Error::EmptyFamily("contraction geodesic".into()));
    }
    for pair in gamma.windows(2) {
        if spec.distance(&pair[0], &pair[1]) != 1 {
            return Err(Error::InvalidWord("gamma is not an edge path".into()));
        }
    }
    let d_total = spec.distance(&gamma[0], &gamma[gamma.len() - 1]);
    if d_total as usize != gamma.len() - 1 {
        return Err(Error::InvalidWord("gamma is not geodesic".into()));
    }
    if samples.is_empty() {
        return Err(Error::NoValidSamples("no samples supplied".into()));
    }
    let results: Vec<Result<ContractionSample>> = exec::map_slice(samples, |(center, radius)| {
        let clearance = gamma
            .iter()
            .map(|p| spec.distance(center, p))
            .min()
            .expect("gamma nonempty");
        if clearance <= *radius {
            return Err(Error::NoValidSamples(format!(
                "sample at `{}` (radius {radius}) meets gamma (clearance {clearance})",
                spec.display_element(center)
            )));
        }
        let sample_ball = Ball::build(spec, center.clone(), *radius)?;
        let mut projection: Vec<usize> = Vec::new();
        for v in sample_ball.ids() {
            let ve = sample_ball.element(v);
            let best = gamma
                .iter()
                .map(|p| spec.distance(ve, p))
                .min()
                .expect("gamma nonempty");
            for (i, p) in gamma.iter().enumerate() {
                if spec.distance(ve, p) == best && !projection.contains(&i) {
                    projection.push(i);
                }
            }
        }
        let diameter = projection
            .iter()
            .flat_map(|&i| {
                projection
                    .iter()
                    .map(move |&j| spec.distance(&gamma[i], &gamma[j]))
            })
            .max()
            .unwrap_or(0);
        Ok(ContractionSample {
            center: spec.display_element(center),
            radius: *radius,
            clearance,
            projection_size: projection.len(),
            diameter,
        })
    });
    let samples: Vec<ContractionSample> = results.into_iter().collect::<Result<_>>()?;
    let d_hat = samples.iter().map(|s| s.diameter).max().unwrap_or(0);
    // Sign of the least-squares slope over (radius, diameter), all integer.
    let trend = if samples.len() < 2 {
        Trend::Inconclusive
    } else {
        let n = samples.len() as i64;
        let sx: i64 = samples.iter().map(|s| s.radius as i64).sum();
        let sy: i64 = samples.iter().map(|s| s.diameter as i64).sum();
        let sxy: i64 = samples
            .iter()
            .map(|s| s.radius as i64 * s.diameter as i64)
            .sum();
        let sxx: i64 = samples.iter().map(|s| (s.radius as i64).pow(2)).sum();
        if n * sxx - sx * sx == 0 {
            Trend::Inconclusive
        } else if n * sxy - sx * sy > 0 {
            Trend::Growing
        } else {
            Trend::BoundedSoFar
        }
    };
    Ok(ContractionProfile {
        samples,
        d_hat,
        trend,
    })
}

pub fn contraction_csv(profile: &ContractionProfile) -> String {
    let mut out = String::from("center,radius,clearance,projection_size,diameter\n");
    for s in &profile.samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.center, s.radius, s.clearance, s.projection_size, s.diameter
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchScope {
    pub pairs: usize,
    pub dfs_nodes: u64,
    pub dfs_node_cap: u64,
    pub structured_family: bool,
    pub partial: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeEstimate {
    pub lambda_num: u32,
    pub lambda_den: u32,
    pub epsilon: u32,
    /// Max distance from a discovered quasi-geodesic to gamma: a lower bound
    /// for any true gauge value N(lambda, epsilon).
    pub excursion: u32,
    pub witness: Option<Vec<String>>,
    pub budget_d: u32,
    pub scope: SearchScope,
}

pub const DEFAULT_QG_NODE_CAP: u64 = 200_000;

struct QgSearch<'a> {
    spec: &'a GroupSpec,
    gamma: &'a [Element],
    lambda_num: u64,
    lambda_den: u64,
    epsilon: u64,
    node_cap: u64,
}

impl<'a> QgSearch<'a> {
    fn dist_to_gamma(&self, cache: &mut HashMap<Element, u32>, e: &Element) -> u32 {
        if let Some(&d) = cache.get(e) {
            return d;
        }
        let d = self
            .gamma
            .iter()
            .map(|p| self.spec.distance(e, p))
            .min()
            .expect("gamma nonempty");
        cache.insert(e.clone(), d);
        d
    }

    /// Full pairwise quasi-geodesic validity check for a complete path.
    fn is_quasigeodesic(&self, path: &[Element]) -> bool {
        for s in 0..path.len() {
            for t in (s + 1)..path.len() {
                let d = self.spec.distance(&path[s], &path[t]) as u64;
                let dt = (t - s) as u64;
                // d >= dt/lambda - epsilon, cleared: lambda_num * d >=
                // lambda_den * dt - lambda_num * epsilon.
                if self.lambda_num * d + self.lambda_num * self.epsilon < self.lambda_den * dt {
                    return false;
                }
            }
        }
        true
    }

    /// Incremental validity of appending `next` to `path`.
    fn step_ok(&self, path: &[Element], next: &Element) -> bool {
        let t = path.len();
        for (s, p) in path.iter().enumerate() {
            let d = self.spec.distance(p, next) as u64;
            let dt = (t - s) as u64;
            if self.lambda_num * d + self.lambda_num * self.epsilon < self.lambda_den * dt {
                return false;
            }
        }
        true
    }

    fn max_len(&self, d: u32) -> u64 {
        // len <= lambda * d + epsilon, cleared over lambda_den.
        (self.lambda_num * d as u64) / self.lambda_den + self.epsilon
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        target: &Element,
        max_len: u64,
        path: &mut Vec<Element>,
        nodes: &mut u64,
        partial: &mut bool,
        best: &mut u32,
        witness: &mut Option<Vec<Element>>,
        cache: &mut HashMap<Element, u32>,
    ) {
        if *nodes >= self.node_cap {
            *partial = true;
            return;
        }
        *nodes += 1;
        let current = path.last().unwrap().clone();
        if &current == target && path.len() > 1 {
            let exc = path
                .iter()
                .map(|e| self.dist_to_gamma(cache, e))
                .max()
                .unwrap_or(0);
            if exc > *best {
                *best = exc;
                *witness = Some(path.clone());
            }
            // A quasi-geodesic may continue through the target; keep going.
        }
        if path.len() as u64 > max_len {
            return;
        }
        let remaining = max_len + 1 - path.len() as u64;
        for letter in self.spec.letters() {
            let next = self.spec.apply_letter(&current, letter);
            if (self.spec.distance(&next, target) as u64) > remaining.saturating_sub(1) {
                continue;
            }
            if !self.step_ok(path, &next) {
                continue;
            }
            path.push(next);
            self.dfs(target, max_len, path, nodes, partial, best, witness, cache);
            path.pop();
            if *partial {
                return;
            }
        }
    }
}

/// Searches for (lambda, epsilon)-quasi-geodesics with endpoints on gamma and
/// records the worst excursion found. Two families are searched: exhaustive
/// DFS up to a node cap, and structured flat detours of the form
/// s^k (geodesic) s^-k for every letter s. The result is a certified lower
/// bound; `partial` reports whether the DFS was cut off.
pub fn quasigeodesic_excursion(
    spec: &GroupSpec,
    gamma: &[Element],
    lambda: (u32, u32),
    epsilon: u32,
    budget_d: u32,
    node_cap: u64,
) -> Result<GaugeEstimate> {
    let (lambda_num, lambda_den) = lambda;
    if lambda_den == 0 || lambda_num < lambda_den {
        return Err(Error::Config("lambda must be a rational >= 1".into()));
    }
    if gamma.is_empty() {
        return Err(Error::EmptyFamily("gauge geodesic".into()));
    }
    let search = QgSearch {
        spec,
        gamma,
        lambda_num: lambda_num as u64,
        lambda_den: lambda_den as u64,
        epsilon: epsilon as u64,
        node_cap,
    };
    let mut pairs = Vec::new();
    for i in 0..gamma.len() {
        for j in i..gamma.len() {
            let d = spec.distance(&gamma[i], &gamma[j]);
            if d <= budget_d && (i != j || epsilon > 0 || gamma.len() == 1) {
                pairs.push((i, j, d));
            }
        }
    }
    if gamma.len() == 1 {
        pairs.push((0, 0, 0));
    }
    let per_pair: Vec<(u32, Option<Vec<Element>>, u64, bool)> =
        exec::map_slice(&pairs, |&(i, j, d)| {
            let mut best = 0u32;
            let mut witness = None;
            let mut cache = HashMap::new();
            // Structured detours: s^k across, then a geodesic, then back.
            for letter in spec.letters() {
                let step = spec.element_from_letter(letter);
                let max_len = search.max_len(d);
                let mut k = 1u64;
                loop {
                    let up: Vec<Element> = {
                        let mut v = vec![gamma[i].clone()];
                        for _ in 0..k {
                            v.push(spec.multiply(v.last().unwrap(), &step));
                        }
                        v
                    };
                    let top_start = up.last().unwrap().clone();
                    let top_end = {
                        let mut e = gamma[j].clone();
                        for _ in 0..k {
                            e = spec.multiply(&e, &step);
                        }
                        e
                    };
                    let across = spec.distance(&top_start, &top_end) as u64;
                    if 2 * k + across > max_len {
                        break;
                    }
                    let mut path = up;
                    // Canonical geodesic across the top.
                    let mut current = top_start;
                    let diff = spec.multiply(&spec.inverse(&current), &top_end);
                    for l in spec.element_to_word(&diff) {
                        current = spec.apply_letter(&current, l);
                        path.push(current.clone());
                    }
                    for _ in 0..k {
                        let inv = spec.apply_letter(path.last().unwrap(), letter.inverted());
                        path.push(inv);
                    }
                    debug_assert_eq!(path.last(), Some(&gamma[j]));
                    if search.is_quasigeodesic(&path) {
                        let exc = path
                            .iter()
                            .map(|e| search.dist_to_gamma(&mut cache, e))
                            .max()
                            .unwrap_or(0);
                        if exc > best {
                            best = exc;
                            witness = Some(path.clone());
                        }
                    }
                    k += 1;
                }
            }
            // Exhaustive DFS under the node cap.
            let mut nodes = 0u64;
            let mut partial = false;
            let mut path = vec![gamma[i].clone()];
            search.dfs(
                &gamma[j],
                search.max_len(d),
                &mut path,
                &mut nodes,
                &mut partial,
                &mut best,
                &mut witness,
                &mut cache,
            );
            (best, witness, nodes, partial)
        });
    let mut excursion = 0;
    let mut witness = None;
    let mut dfs_nodes = 0;
    let mut partial = false;
    for (best, w, nodes, p) in per_pair {
        dfs_nodes += nodes;
        partial |= p;
        if best > excursion {
            excursion = best;
            witness = w;
        }
    }
    Ok(GaugeEstimate {
        lambda_num,
        lambda_den,
        epsilon,
        excursion,
        witness: witness.map(|w| w.iter().map(|e| spec.display_element(e)).collect()),
        budget_d,
        scope: SearchScope {
            pairs: pairs.len(),
            dfs_nodes,
            dfs_node_cap: node_cap,
            structured_family: true,
            partial,
        },
    })
}
