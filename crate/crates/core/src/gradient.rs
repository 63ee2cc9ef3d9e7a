//! Gradient arcs and rays of a scalar field. On a unit-edge graph the
//! iterated projection onto descending level sets collapses to stepping to a
//! neighbor whose value is exactly one less, so every produced path drops the
//! field by one per edge and is automatically geodesic for 1-Lipschitz fields.

use crate::ball::{Ball, VertexId};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::group::Element;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_LEAF_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientPath {
    pub vertices: Vec<VertexId>,
}

impl GradientPath {
    pub fn len(&self) -> u32 {
        (self.vertices.len() - 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    pub fn elements(&self, ball: &Ball) -> Vec<Element> {
        self.vertices
            .iter()
            .map(|&v| ball.element(v).clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The walk reached the allowed boundary margin.
    Margin,
    /// No descending neighbor existed strictly inside the ball; for a
    /// distance-like field this flags the field at the stuck vertex.
    DeadEnd,
}

#[derive(Debug, Clone)]
pub struct GradientRay {
    pub path: GradientPath,
    pub stop: StopReason,
}

#[derive(Debug, Clone, Copy)]
pub enum Policy {
    /// Deterministic: always step to the first successor in letter order.
    First,
    /// The full successor tree, returned as all maximal paths (capped).
    All { leaf_cap: usize },
    /// Seeded uniform choice among successors at each step.
    Random { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct GradientRays {
    pub rays: Vec<GradientRay>,
    pub truncated: bool,
}

/// All in-ball neighbors w of v with h(w) = h(v) - 1, in letter order.
/// Requires one unit of room so the neighbor enumeration is complete.
pub fn gradient_successors(ball: &Ball, h: &ScalarField, v: VertexId) -> Result<Vec<VertexId>> {
    if ball.dist_from_center(v) >= ball.radius() {
        return Err(Error::NotInBall(format!(
            "`{}` has no interior room (distance {} of radius {})",
            ball.display(v),
            ball.dist_from_center(v),
            ball.radius()
        )));
    }
    let target = h.value(v) - 1;
    let mut out = Vec::new();
    for &(letter, w) in ball.neighbors(v) {
        if h.value(w) == target && !out.contains(&w) {
            let _ = letter;
            out.push(w);
        }
    }
    Ok(out)
}

/// Grows gradient paths from `start` until the walk reaches distance
/// radius - margin from the center or runs out of successors.
pub fn gradient_ray(
    ball: &Ball,
    h: &ScalarField,
    start: VertexId,
    policy: Policy,
    margin: u32,
) -> Result<GradientRays> {
    let limit = ball.radius().saturating_sub(margin);
    let step_room = |v: VertexId| ball.dist_from_center(v) < limit;
    match policy {
        Policy::First => {
            let mut path = vec![start];
            let mut v = start;
            let stop = loop {
                if !step_room(v) {
                    break StopReason::Margin;
                }
                let succ = gradient_successors(ball, h, v)?;
                match succ.first() {
                    Some(&w) => {
                        path.push(w);
                        v = w;
                    }
                    None => break StopReason::DeadEnd,
                }
            };
            Ok(GradientRays {
                rays: vec![GradientRay {
                    path: GradientPath { vertices: path },
                    stop,
                }],
                truncated: false,
            })
        }
        Policy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut path = vec![start];
            let mut v = start;
            let stop = loop {
                if !step_room(v) {
                    break StopReason::Margin;
                }
                let succ = gradient_successors(ball, h, v)?;
                if succ.is_empty() {
                    break StopReason::DeadEnd;
                }
                let w = succ[rng.gen_range(0..succ.len())];
                path.push(w);
                v = w;
            };
            Ok(GradientRays {
                rays: vec![GradientRay {
                    path: GradientPath { vertices: path },
                    stop,
                }],
                truncated: false,
            })
        }
        Policy::All { leaf_cap } => {
            let mut rays = Vec::new();
            let mut truncated = false;
            let mut stack = vec![start];
            expand_all(
                ball,
                h,
                &mut stack,
                limit,
                leaf_cap,
                &mut rays,
                &mut truncated,
            )?;
            Ok(GradientRays { rays, truncated })
        }
    }
}

fn expand_all(
    ball: &Ball,
    h: &ScalarField,
    stack: &mut Vec<VertexId>,
    limit: u32,
    leaf_cap: usize,
    rays: &mut Vec<GradientRay>,
    truncated: &mut bool,
) -> Result<()> {
    if rays.len() >= leaf_cap {
        *truncated = true;
        return Ok(());
    }
    let v = *stack.last().unwrap();
    if ball.dist_from_center(v) >= limit {
        rays.push(GradientRay {
            path: GradientPath {
                vertices: stack.clone(),
            },
            stop: StopReason::Margin,
        });
        return Ok(());
    }
    let succ = gradient_successors(ball, h, v)?;
    if succ.is_empty() {
        rays.push(GradientRay {
            path: GradientPath {
                vertices: stack.clone(),
            },
            stop: StopReason::DeadEnd,
        });
        return Ok(());
    }
    for w in succ {
        stack.push(w);
        expand_all(ball, h, stack, limit, leaf_cap, rays, truncated)?;
        stack.pop();
        if *truncated {
            return Ok(());
        }
    }
    Ok(())
}

/// True iff h(v0) - h(vn) = n = d(v0, vn). For a 1-Lipschitz field this
/// forces every intermediate step to drop by exactly one, so the endpoint
/// condition characterizes gradient arcs.
pub fn is_gradient_arc(ball: &Ball, h: &ScalarField, path: &[VertexId]) -> Result<bool> {
    if path.is_empty() {
        return Err(Error::EmptyFamily("gradient arc".into()));
    }
    for pair in path.windows(2) {
        if !ball.neighbors(pair[0]).iter().any(|&(_, w)| w == pair[1]) {
            return Err(Error::InvalidWord(format!(
                "vertices {} and {} are not adjacent",
                ball.display(pair[0]),
                ball.display(pair[1])
            )));
        }
    }
    let n = (path.len() - 1) as i64;
    let drop = h.value(path[0]) - h.value(*path.last().unwrap());
    let dist = ball
        .spec()
        .distance(ball.element(path[0]), ball.element(*path.last().unwrap()))
        as i64;
    Ok(drop == n && dist == n)
}

#[derive(Debug, Clone)]
pub struct Profile {
    /// d(alpha(t), beta(t)) for t up to the shorter length.
    pub distances: Vec<u32>,
    pub max: u32,
    /// Whether the profile never decreases over its trailing half.
    pub tail_nondecreasing: bool,
}

impl Profile {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,distance\n");
        for (t, d) in self.distances.iter().enumerate() {
            out.push_str(&format!("{t},{d}\n"));
        }
        out
    }
}

/// Pointwise distances between two paths aligned at t = 0.
pub fn fellow_travel_profile(ball: &Ball, alpha: &GradientPath, beta: &GradientPath) -> Profile {
    let spec = ball.spec();
    let n = alpha.vertices.len().min(beta.vertices.len());
    let distances: Vec<u32> = (0..n)
        .map(|t| {
            spec.distance(
                ball.element(alpha.vertices[t]),
                ball.element(beta.vertices[t]),
            )
        })
        .collect();
    let max = distances.iter().copied().max().unwrap_or(0);
    let tail = &distances[n / 2..];
    let tail_nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
    Profile {
        distances,
        max,
        tail_nondecreasing,
    }
}

/// Trims the path whose start has the larger h-value so both start at equal
/// field values, the normalization used when comparing rays with different
/// basepoints.
pub fn align_by_level<'a>(
    h: &ScalarField,
    alpha: &'a GradientPath,
    beta: &'a GradientPath,
) -> Result<(GradientPath, GradientPath)> {
    let ha = h.value(alpha.start());
    let hb = h.value(beta.start());
    let (hi, lo, hi_is_alpha) = if ha >= hb {
        (alpha, beta, true)
    } else {
        (beta, alpha, false)
    };
    let skip = (h.value(hi.start()) - h.value(lo.start())) as usize;
    if skip >= hi.vertices.len() {
        return Err(Error::EmptyFamily(
            "alignment trims the entire path".into(),
        ));
    }
    let trimmed = GradientPath {
        vertices: hi.vertices[skip..].to_vec(),
    };
    let other = GradientPath {
        vertices: lo.vertices.clone(),
    };
    Ok(if hi_is_alpha {
        (trimmed, other)
    } else {
        (other, trimmed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{busemann_default, ScalarField};
    use crate::fixtures;
    use crate::group::{Element, GroupSpec};

    fn unit_ball(spec: &GroupSpec, r: u32) -> Ball {
        Ball::build(spec, Element::identity(), r).unwrap()
    }

    fn neg_sum_field(ball: &Ball) -> ScalarField {
        // -(x+y) on Z^2; verified equal to the staircase Busemann field in
        // figure tests.
        let spec = ball.spec().clone();
        ScalarField::from_closed_form(ball, move |e| {
            let word = spec.element_to_word(e);
            -(word
                .iter()
                .map(|l| if l.inverse { -1i64 } else { 1 })
                .sum::<i64>())
        })
    }

    #[test]
    fn neg_sum_matches_staircase_busemann() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 6);
        let ray = fixtures::z2_staircase_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let closed = neg_sum_field(&ball);
        assert_eq!(h.values(), closed.values());
    }

    #[test]
    fn successors_at_origin() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 5);
        let h = neg_sum_field(&ball);
        let succ = gradient_successors(&ball, &h, ball.center_id()).unwrap();
        let mut names: Vec<String> = succ.iter().map(|&v| ball.display(v)).collect();
        names.sort();
        assert_eq!(names, vec!["a", "b"]);
    }

    #[test]
    fn axis_field_successors_at_origin() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 5);
        let ray = fixtures::z2_axis_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let succ = gradient_successors(&ball, &h, ball.center_id()).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(ball.display(succ[0]), "a");
    }

    #[test]
    fn tree_gradient_flows_to_projection() {
        let g = fixtures::f2();
        let ball = unit_ball(&g, 5);
        let ray = fixtures::f2_a_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let b = ball.require_vertex(&g.parse_element("b").unwrap()).unwrap();
        let succ = gradient_successors(&ball, &h, b).unwrap();
        assert_eq!(succ, vec![ball.center_id()]);
        let rays = gradient_ray(&ball, &h, b, Policy::First, 0).unwrap();
        let path = &rays.rays[0].path;
        let names: Vec<String> = path.vertices.iter().map(|&v| ball.display(v)).collect();
        assert_eq!(names[..3], ["b", "e", "a"]);
        assert!(is_gradient_arc(&ball, &h, &path.vertices).unwrap());
        assert_eq!(rays.rays[0].stop, StopReason::Margin);
    }

    #[test]
    fn all_policy_enumerates_monotone_paths() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 4);
        let h = neg_sum_field(&ball);
        let rays = gradient_ray(&ball, &h, ball.center_id(), Policy::All { leaf_cap: 1000 }, 0)
            .unwrap();
        // Monotone NE paths of length 4: one per corner split, 2^4 = 16.
        assert_eq!(rays.rays.len(), 16);
        assert!(!rays.truncated);
        for ray in &rays.rays {
            assert!(is_gradient_arc(&ball, &h, &ray.path.vertices).unwrap());
        }
    }

    #[test]
    fn axis_field_paths_from_off_axis() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 6);
        let ray = fixtures::z2_axis_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let start = ball.require_vertex(&g.parse_element("b b").unwrap()).unwrap();
        let rays = gradient_ray(&ball, &h, start, Policy::All { leaf_cap: 1000 }, 1).unwrap();
        // Every path must move right or down to the axis, then right.
        for r in &rays.rays {
            assert!(is_gradient_arc(&ball, &h, &r.path.vertices).unwrap());
            for pair in r.path.vertices.windows(2) {
                let from = g.element_to_word(ball.element(pair[0]));
                let to = g.element_to_word(ball.element(pair[1]));
                let y_from = from.iter().filter(|l| l.gen == 1).count() as i64
                    - 2 * from.iter().filter(|l| l.gen == 1 && l.inverse).count() as i64;
                let y_to = to.iter().filter(|l| l.gen == 1).count() as i64
                    - 2 * to.iter().filter(|l| l.gen == 1 && l.inverse).count() as i64;
                assert!(y_to.abs() <= y_from.abs(), "|y| never grows");
            }
        }
    }

    #[test]
    fn non_geodesic_loop_is_not_an_arc() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 3);
        let h = neg_sum_field(&ball);
        let a = ball.require_vertex(&g.parse_element("a").unwrap()).unwrap();
        let e = ball.center_id();
        let ab = ball.require_vertex(&g.parse_element("a b").unwrap()).unwrap();
        assert!(is_gradient_arc(&ball, &h, &[e, a, ab]).unwrap());
        assert!(!is_gradient_arc(&ball, &h, &[e, a, e]).unwrap());
    }

    #[test]
    fn uphill_path_is_not_an_arc() {
        let g = fixtures::f2();
        let ball = unit_ball(&g, 4);
        let ray = fixtures::f2_a_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let b = ball.require_vertex(&g.parse_element("b").unwrap()).unwrap();
        let e = ball.center_id();
        let b_inv = ball.require_vertex(&g.parse_element("b'").unwrap()).unwrap();
        assert!(!is_gradient_arc(&ball, &h, &[b, e, b_inv]).unwrap());
    }

    #[test]
    fn concatenation_of_arcs_is_an_arc() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 5);
        let h = neg_sum_field(&ball);
        let e = ball.center_id();
        let a = ball.require_vertex(&g.parse_element("a").unwrap()).unwrap();
        let ab = ball.require_vertex(&g.parse_element("a b").unwrap()).unwrap();
        let abb = ball.require_vertex(&g.parse_element("a b b").unwrap()).unwrap();
        assert!(is_gradient_arc(&ball, &h, &[e, a]).unwrap());
        assert!(is_gradient_arc(&ball, &h, &[a, ab, abb]).unwrap());
        assert!(is_gradient_arc(&ball, &h, &[e, a, ab, abb]).unwrap());
    }

    #[test]
    fn identical_paths_have_zero_profile() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 4);
        let h = neg_sum_field(&ball);
        let rays = gradient_ray(&ball, &h, ball.center_id(), Policy::First, 0).unwrap();
        let p = &rays.rays[0].path;
        let profile = fellow_travel_profile(&ball, p, p);
        assert!(profile.distances.iter().all(|&d| d == 0));
        assert_eq!(profile.max, 0);
    }

    #[test]
    fn tree_rays_merge_after_alignment() {
        let g = fixtures::f2();
        let ball = unit_ball(&g, 6);
        let ray = fixtures::f2_a_ray(&g, 200);
        let (h, _) = busemann_default(&ball, &ray).unwrap();
        let start_a = ball.require_vertex(&g.parse_element("a b").unwrap()).unwrap();
        let start_b = ball.center_id();
        let ra = gradient_ray(&ball, &h, start_a, Policy::First, 0).unwrap();
        let rb = gradient_ray(&ball, &h, start_b, Policy::First, 0).unwrap();
        let (pa, pb) = align_by_level(&h, &ra.rays[0].path, &rb.rays[0].path).unwrap();
        let profile = fellow_travel_profile(&ball, &pa, &pb);
        assert_eq!(*profile.distances.last().unwrap(), 0);
        // Pre-merge max bounded by the starting distance.
        let d0 = g.distance(ball.element(start_a), ball.element(start_b));
        assert!(profile.max <= d0);
    }

    #[test]
    fn random_policy_is_seed_deterministic() {
        let g = fixtures::z2();
        let ball = unit_ball(&g, 5);
        let h = neg_sum_field(&ball);
        let r1 = gradient_ray(&ball, &h, ball.center_id(), Policy::Random { seed: 11 }, 0).unwrap();
        let r2 = gradient_ray(&ball, &h, ball.center_id(), Policy::Random { seed: 11 }, 0).unwrap();
        assert_eq!(r1.rays[0].path, r2.rays[0].path);
    }
}
