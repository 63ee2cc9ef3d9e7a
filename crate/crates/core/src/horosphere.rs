//! Horospheres and horoballs of a field, convergence and divergence evidence
//! for horosphere sequences, horoball convexity and intersection experiments,
//! and sphere-minimum audits.
//!
//! Boundary convergence is replaced by a window surrogate: for each vertex v
//! on the n-th horosphere, its depth is the length of the shortest-lived
//! initial segment over all geodesics [center, v] that stays within distance
//! one of the defining ray. A horosphere sequence whose minimal depth keeps
//! pace with n is convergence evidence; a member reachable by a geodesic
//! that exits the ray's neighborhood early is a divergence witness.

use crate::ball::{Ball, VertexId};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{level_set, ScalarField};
use crate::geodesic::all_geodesics;
use crate::group::Element;
use crate::ray::RayWalk;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct Horosphere {
    pub r: i64,
    pub members: Vec<VertexId>,
    pub empty: bool,
}

#[derive(Debug, Clone)]
pub struct Horoball {
    pub r: i64,
    pub members: Vec<VertexId>,
    pub empty: bool,
}

/// H_r = h^-1(-r) within the window.
pub fn horosphere(ball: &Ball, h: &ScalarField, r: i64) -> Horosphere {
    let ls = level_set(ball, h, -r);
    Horosphere {
        r,
        empty: ls.empty,
        members: ls.members,
    }
}

/// B_r = h^-1((-inf, -r]) within the window.
pub fn horoball(ball: &Ball, h: &ScalarField, r: i64) -> Horoball {
    let members: Vec<VertexId> = ball.ids().filter(|&v| h.value(v) <= -r).collect();
    Horoball {
        r,
        empty: members.is_empty(),
        members,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    ConvergentEvidence,
    DivergenceWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub member_count: usize,
    /// min over members of the fellow-travel depth; None when H_n is empty.
    pub m_n: Option<u32>,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub verdict: ConvergenceVerdict,
    pub threshold_const: i64,
}

impl ConvergenceReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,members,m_n,verdict\n");
        for row in &self.rows {
            let m = row
                .m_n
                .map(|m| m.to_string())
                .unwrap_or_else(|| "".into());
            let verdict = if row.witness.is_some() {
                "witness"
            } else {
                "ok"
            };
            let _ = writeln!(out, "{},{},{},{}", row.n, row.member_count, m, verdict);
        }
        out
    }
}

/// Depth data relative to the ray: which vertices are within distance one of
/// the ray image, and the cheap exits through which a center geodesic can
/// leave that neighborhood.
struct DepthOracle {
    /// Exit vertices u (outside N_1) reachable from the center through N_1,
    /// paired with d(center, u).
    exits: Vec<(VertexId, u32)>,
}

impl DepthOracle {
    fn build(ball: &Ball, c: &RayWalk) -> Result<DepthOracle> {
        let spec = ball.spec();
        let image = c.image_up_to(spec, ball.radius() + 2)?;
        let near: Vec<bool> = exec::map_range(ball.len(), |vi| {
            let v = ball.element(vi as VertexId);
            image.iter().any(|p| spec.distance(v, p) <= 1)
        });
        // within[v]: some geodesic from the center reaches v entirely inside
        // N_1. Vertices are in BFS order, so predecessors are already done.
        let mut within = vec![false; ball.len()];
        within[0] = near[0];
        for v in ball.ids().skip(1) {
            if !near[v as usize] {
                continue;
            }
            let d = ball.dist_from_center(v);
            within[v as usize] = ball
                .neighbors(v)
                .iter()
                .any(|&(_, u)| ball.dist_from_center(u) + 1 == d && within[u as usize]);
        }
        let mut exits = Vec::new();
        for u in ball.ids() {
            if near[u as usize] {
                continue;
            }
            let d = ball.dist_from_center(u);
            let reachable = ball
                .neighbors(u)
                .iter()
                .any(|&(_, w)| ball.dist_from_center(w) + 1 == d && within[w as usize]);
            if reachable {
                exits.push((u, d));
            }
        }
        Ok(DepthOracle { exits })
    }

    /// min over geodesics [center, v] of the longest prefix inside N_1.
    fn depth(&self, ball: &Ball, v: VertexId) -> u32 {
        let spec = ball.spec();
        let dv = ball.dist_from_center(v);
        let ve = ball.element(v);
        let mut depth = dv;
        for &(u, du) in &self.exits {
            if du > dv {
                continue;
            }
            if du + spec.distance(ball.element(u), ve) == dv {
                depth = depth.min(du - 1);
            }
        }
        depth
    }
}

/// For each n up to the horizon, m(n) = min over v in H_n of the depth of v.
/// Convergence evidence requires m(n) >= n/2 - threshold for every tested n;
/// otherwise each failing row carries one witness vertex.
pub fn convergence_witness(
    ball: &Ball,
    h: &ScalarField,
    c: &RayWalk,
    horizon: u32,
    threshold_const: i64,
) -> Result<ConvergenceReport> {
    if horizon > ball.radius() {
        return Err(Error::HorizonExceedsRadius {
            horizon,
            radius: ball.radius(),
        });
    }
    let oracle = DepthOracle::build(ball, c)?;
    let rows: Vec<ConvergenceRow> = (1..=horizon)
        .map(|n| {
            let sphere = horosphere(ball, h, n as i64);
            if sphere.empty {
                return ConvergenceRow {
                    n,
                    member_count: 0,
                    m_n: None,
                    witness: None,
                };
            }
            let depths: Vec<u32> =
                exec::map_slice(&sphere.members, |&v| oracle.depth(ball, v));
            let (argmin, &m_n) = depths
                .iter()
                .enumerate()
                .min_by_key(|&(i, d)| (*d, i))
                .expect("nonempty sphere");
            // Witness iff m(n) < n/2 - const, cleared of the halving.
            let witness = if 2 * (m_n as i64) < n as i64 - 2 * threshold_const {
                Some(ball.display(sphere.members[argmin]))
            } else {
                None
            };
            ConvergenceRow {
                n,
                member_count: sphere.members.len(),
                m_n: Some(m_n),
                witness,
            }
        })
        .collect();
    let verdict = if rows.iter().any(|r| r.witness.is_some()) {
        ConvergenceVerdict::DivergenceWitness
    } else {
        ConvergenceVerdict::ConvergentEvidence
    };
    Ok(ConvergenceReport {
        rows,
        verdict,
        threshold_const,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityFinding {
    pub from: String,
    pub to: String,
    pub exit: String,
    pub exit_value: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub findings: Vec<ConvexityFinding>,
}

pub const DEFAULT_FINDING_CAP: usize = 100;

/// Checks that geodesics between horoball members stay inside the horoball.
/// Pairs whose geodesics are not fully representable in the window are
/// skipped and counted. Failures are findings, not errors: on l1 grids the
/// statement genuinely fails and the report records it.
pub fn horoball_convexity(
    ball: &Ball,
    h: &ScalarField,
    hb: &Horoball,
    geodesic_cap: usize,
    finding_cap: usize,
) -> Result<ConvexityReport> {
    let mut findings = Vec::new();
    let mut pairs_checked = 0;
    let mut pairs_skipped = 0;
    let member_set: Vec<bool> = {
        let mut s = vec![false; ball.len()];
        for &m in &hb.members {
            s[m as usize] = true;
        }
        s
    };
    'outer: for (i, &x) in hb.members.iter().enumerate() {
        for &y in hb.members.iter().skip(i + 1) {
            let set = match all_geodesics(ball, x, y, geodesic_cap) {
                Ok(set) => set,
                Err(Error::Containment { .. }) => {
                    pairs_skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            pairs_checked += 1;
            for path in &set.paths {
                if let Some(&exit) = path
                    .vertices
                    .iter()
                    .find(|&&v| !member_set[v as usize])
                {
                    findings.push(ConvexityFinding {
                        from: ball.display(x),
                        to: ball.display(y),
                        exit: ball.display(exit),
                        exit_value: h.value(exit),
                    });
                    if findings.len() >= finding_cap {
                        break 'outer;
                    }
                    break;
                }
            }
        }
    }
    Ok(ConvexityReport {
        pass: findings.is_empty(),
        pairs_checked,
        pairs_skipped,
        findings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    pub r1: i64,
    pub r2: i64,
    pub size: usize,
    pub diameter: u32,
    /// min over the ball of h1 + h2; bounded below for distinct rays.
    pub sum_min: i64,
    /// Vertices where h1 + h2 attains zero (the line for opposite rays).
    pub sum_zero_count: usize,
}

/// Intersection experiment for two horoballs, plus the bounded-sum check.
/// Preconditions: both fields come from rays that separate within the window.
pub fn horoball_intersection(
    ball: &Ball,
    h1: &ScalarField,
    c1: &RayWalk,
    h2: &ScalarField,
    c2: &RayWalk,
    r1: i64,
    r2: i64,
) -> Result<IntersectionReport> {
    let spec = ball.spec();
    let t = ball
        .radius()
        .min(c1.max_t().unwrap_or(u32::MAX))
        .min(c2.max_t().unwrap_or(u32::MAX));
    let d = spec.distance(&c1.eval(spec, t)?, &c2.eval(spec, t)?);
    if d < 2 {
        return Err(Error::RaysNotDistinct);
    }
    let b1 = horoball(ball, h1, r1);
    let b2 = horoball(ball, h2, r2);
    let members: Vec<VertexId> = b1
        .members
        .iter()
        .copied()
        .filter(|v| b2.members.contains(v))
        .collect();
    let diameter = members
        .iter()
        .flat_map(|&x| {
            members
                .iter()
                .map(move |&y| spec.distance(ball.element(x), ball.element(y)))
        })
        .max()
        .unwrap_or(0);
    let sums: Vec<i64> = ball.ids().map(|v| h1.value(v) + h2.value(v)).collect();
    let sum_min = *sums.iter().min().expect("nonempty ball");
    let sum_zero_count = sums.iter().filter(|&&s| s == 0).count();
    Ok(IntersectionReport {
        r1,
        r2,
        size: members.len(),
        diameter,
        sum_min,
        sum_zero_count,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub ball_radius: u32,
    pub size: usize,
    pub diameter: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// True when the intersection diameter stabilizes over the last two
    /// window radii: boundedness evidence, never a proof.
    pub bounded_evidence: bool,
}

/// The horoball intersection experiment across growing window radii.
pub fn intersection_growth(
    spec: &crate::group::GroupSpec,
    c1: &RayWalk,
    c2: &RayWalk,
    r1: i64,
    r2: i64,
    radii: &[u32],
) -> Result<GrowthReport> {
    if radii.is_empty() {
        return Err(Error::EmptyFamily("intersection radii".into()));
    }
    let mut rows = Vec::new();
    for &radius in radii {
        let ball = Ball::build(spec, Element::identity(), radius)?;
        let (h1, _) = crate::field::busemann_default(&ball, c1)?;
        let (h2, _) = crate::field::busemann_default(&ball, c2)?;
        let report = horoball_intersection(&ball, &h1, c1, &h2, c2, r1, r2)?;
        rows.push(GrowthRow {
            ball_radius: radius,
            size: report.size,
            diameter: report.diameter,
        });
    }
    let bounded_evidence = rows.len() >= 2
        && rows[rows.len() - 1].diameter == rows[rows.len() - 2].diameter;
    Ok(GrowthReport {
        rows,
        bounded_evidence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceVerdict {
    DivergenceEvidence,
    PreconditionViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub values: Vec<i64>,
    pub tail_increasing: bool,
    pub verdict: DivergenceVerdict,
}

/// h(c'(t)) for t within the window; divergence evidence iff the trailing
/// half strictly increases. A ray along which h decreases is the defining
/// ray itself (or asymptotic to it) and is reported as a precondition
/// violation rather than evidence.
pub fn divergence_along_ray(ball: &Ball, h: &ScalarField, other: &RayWalk) -> Result<DivergenceReport> {
    let spec = ball.spec();
    let t_max = ball.radius().min(other.max_t().unwrap_or(u32::MAX));
    let mut values = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let p = other.eval(spec, t)?;
        let v = ball.require_vertex(&p)?;
        values.push(h.value(v));
    }
    let tail = &values[values.len() / 2..];
    let tail_increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if decreasing {
        DivergenceVerdict::PreconditionViolation
    } else {
        DivergenceVerdict::DivergenceEvidence
    };
    Ok(DivergenceReport {
        values,
        tail_increasing,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereMinReport {
    pub center: String,
    pub radius: u32,
    pub min_value: i64,
    pub expected_value: i64,
    pub minimizer_count: usize,
    pub minimizer_diameter: u32,
    pub unique: bool,
}

/// Minimum of h on the metric sphere S_r(x0), with uniqueness audit. The
/// sphere must be fully representable: d(center, x0) + r <= radius.
pub fn sphere_min_report(
    ball: &Ball,
    h: &ScalarField,
    x0: VertexId,
    r: u32,
) -> Result<SphereMinReport> {
    if ball.dist_from_center(x0) + r > ball.radius() {
        return Err(Error::NotInBall(format!(
            "sphere of radius {r} around `{}` is not contained in the window",
            ball.display(x0)
        )));
    }
    let spec = ball.spec();
    let x0e = ball.element(x0).clone();
    let members: Vec<VertexId> = ball
        .ids()
        .filter(|&v| spec.distance(&x0e, ball.element(v)) == r)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyFamily("metric sphere".into()));
    }
    let min_value = members.iter().map(|&v| h.value(v)).min().unwrap();
    let minimizers: Vec<VertexId> = members
        .iter()
        .copied()
        .filter(|&v| h.value(v) == min_value)
        .collect();
    let minimizer_diameter = minimizers
        .iter()
        .flat_map(|&x| {
            minimizers
                .iter()
                .map(move |&y| spec.distance(ball.element(x), ball.element(y)))
        })
        .max()
        .unwrap_or(0);
    Ok(SphereMinReport {
        center: ball.display(x0),
        radius: r,
        min_value,
        expected_value: h.value(x0) - r as i64,
        minimizer_count: minimizers.len(),
        minimizer_diameter,
        unique: minimizers.len() == 1,
    })
}
