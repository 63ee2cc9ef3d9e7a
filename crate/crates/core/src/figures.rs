//! The four shipped experiment suites, reproducing the library's reference
//! pictures end to end: the constant-derivative table on the grid, the
//! diverging staircase gradient rays, the non-converging flat horospheres,
//! and the converging tree horospheres. Each writes CSV/JSON/DOT artifacts
//! plus a manifest; outputs are byte-deterministic for a fixed seed.

use crate::ball::{Ball, DotHighlight, VertexId};
use crate::error::{Error, Result};
use crate::field::{busemann_default, ScalarField};
use crate::fixtures;
use crate::gradient::{fellow_travel_profile, is_gradient_arc, GradientPath, Profile};
use crate::group::Element;
use crate::horosphere::{convergence_witness, horosphere, ConvergenceReport, ConvergenceVerdict};
use crate::manifest::{to_json, Manifest};
use crate::symbolic::derivative;
use serde::Serialize;
use std::collections::HashSet;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Outcome {
    pub pass: bool,
    pub vertices: usize,
    pub expected_letter: Vec<i8>,
    pub mismatches: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Outcome {
    pub busemann_matches_closed_form: bool,
    pub both_are_gradient_rays: bool,
    pub profile: Vec<u32>,
    pub profile_at_8: u32,
    pub tail_nondecreasing_8_to_10: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigHorosphereOutcome {
    pub verdict: ConvergenceVerdict,
    pub rows: ConvergenceReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiguresOutcome {
    pub fig2: Fig2Outcome,
    pub fig4: Fig4Outcome,
    pub fig7: FigHorosphereOutcome,
    pub fig8: FigHorosphereOutcome,
}

/// Derivative of h(x, y) = -x on the radius-6 grid ball: every present
/// letter component must equal the constant letter (-1, 0, +1, 0).
pub fn fig2(out_dir: &Path) -> Result<Fig2Outcome> {
    let spec = fixtures::z2();
    let ball = Ball::build(&spec, Element::identity(), 6)?;
    let field_spec = spec.clone();
    let h = ScalarField::from_closed_form(&ball, move |e| {
        -(field_spec
            .element_to_word(e)
            .iter()
            .filter(|l| l.gen == 0)
            .map(|l| if l.inverse { -1i64 } else { 1 })
            .sum::<i64>())
    });
    let sigma = derivative(&ball, &h)?;
    let expected = vec![-1i8, 0, 1, 0];
    let mut mismatches = 0;
    for v in ball.ids() {
        for (i, entry) in sigma.letter(v).iter().enumerate() {
            if let Some(x) = entry {
                if *x != expected[i] {
                    mismatches += 1;
                }
            }
        }
    }
    let outcome = Fig2Outcome {
        pass: mismatches == 0,
        vertices: ball.len(),
        expected_letter: expected,
        mismatches,
    };
    let mut manifest = Manifest::new("figures/fig2");
    manifest.input("Z^2 ball radius 6, field h = -x");
    manifest.write_artifact(out_dir, "field.csv", &h.write_csv(&ball))?;
    manifest.write_artifact(out_dir, "derivative.csv", &sigma.write_csv(&ball))?;
    manifest.write_artifact(out_dir, "report.json", &to_json(&outcome)?)?;
    manifest.finish(out_dir)?;
    Ok(outcome)
}

fn ray_path_in_ball(
    ball: &Ball,
    ray: &crate::ray::RayWalk,
    t_max: u32,
) -> Result<GradientPath> {
    let spec = ball.spec();
    let mut vertices = Vec::new();
    for p in ray.image_up_to(spec, t_max)? {
        vertices.push(ball.require_vertex(&p)?);
    }
    Ok(GradientPath { vertices })
}

/// Staircase non-example: the Busemann field of the staircase equals -(x+y)
/// on the radius-10 ball, both the staircase and its transpose are gradient
/// rays, and their fellow-travel profile reads 8 at t = 8 and keeps growing
/// through t = 10.
pub fn fig4(out_dir: &Path) -> Result<Fig4Outcome> {
    let spec = fixtures::z2();
    let ball = Ball::build(&spec, Element::identity(), 10)?;
    let ray = fixtures::z2_staircase_ray(&spec, 200);
    let (h, _) = busemann_default(&ball, &ray)?;
    let closed_spec = spec.clone();
    let closed = ScalarField::from_closed_form(&ball, move |e| {
        -(closed_spec
            .element_to_word(e)
            .iter()
            .map(|l| if l.inverse { -1i64 } else { 1 })
            .sum::<i64>())
    });
    let busemann_matches_closed_form = h.values() == closed.values();
    let transpose = fixtures::z2_staircase_transpose(&spec, 200);
    let alpha = ray_path_in_ball(&ball, &ray, 10)?;
    let beta = ray_path_in_ball(&ball, &transpose, 10)?;
    let both_are_gradient_rays = is_gradient_arc(&ball, &h, &alpha.vertices)?
        && is_gradient_arc(&ball, &h, &beta.vertices)?;
    let profile: Profile = fellow_travel_profile(&ball, &alpha, &beta);
    let outcome = Fig4Outcome {
        busemann_matches_closed_form,
        both_are_gradient_rays,
        profile_at_8: profile.distances[8],
        tail_nondecreasing_8_to_10: profile.distances[8..=10].windows(2).all(|w| w[1] >= w[0]),
        profile: profile.distances.clone(),
    };
    let mut manifest = Manifest::new("figures/fig4");
    manifest.input("Z^2 ball radius 10, staircase ray and transpose");
    manifest.write_artifact(out_dir, "field.csv", &h.write_csv(&ball))?;
    manifest.write_artifact(out_dir, "profile.csv", &profile.csv())?;
    manifest.write_artifact(out_dir, "report.json", &to_json(&outcome)?)?;
    manifest.finish(out_dir)?;
    Ok(outcome)
}

fn horosphere_suite(
    out_dir: &Path,
    name: &str,
    ball: &Ball,
    ray: &crate::ray::RayWalk,
    horizon: u32,
    input: &str,
) -> Result<FigHorosphereOutcome> {
    let (h, _) = busemann_default(ball, ray)?;
    let report = convergence_witness(ball, &h, ray, horizon, 0)?;
    let ray_ids: HashSet<VertexId> = ray
        .image_up_to(ball.spec(), ball.radius())?
        .iter()
        .filter_map(|p| ball.vertex_id(p))
        .collect();
    let members: HashSet<VertexId> = (1..=horizon as i64)
        .flat_map(|n| horosphere(ball, &h, n).members)
        .collect();
    let highlight = DotHighlight {
        ray: ray_ids,
        members,
    };
    let outcome = FigHorosphereOutcome {
        verdict: report.verdict,
        rows: report,
    };
    let mut manifest = Manifest::new(&format!("figures/{name}"));
    manifest.input(input);
    manifest.budget("horizon", horizon as u64);
    manifest.write_artifact(out_dir, "horospheres.csv", &outcome.rows.csv())?;
    manifest.write_artifact(out_dir, "overlay.dot", &ball.to_dot(Some(&highlight)))?;
    manifest.write_artifact(out_dir, "report.json", &to_json(&outcome)?)?;
    manifest.finish(out_dir)?;
    Ok(outcome)
}

/// Flat horospheres: the x-axis field on the radius-8 grid ball emits a
/// divergence witness.
pub fn fig7(out_dir: &Path) -> Result<FigHorosphereOutcome> {
    let spec = fixtures::z2();
    let ball = Ball::build(&spec, Element::identity(), 8)?;
    let ray = fixtures::z2_axis_ray(&spec, 200);
    horosphere_suite(
        out_dir,
        "fig7",
        &ball,
        &ray,
        4,
        "Z^2 ball radius 8, x-axis ray",
    )
}

/// Tree horospheres: the a-ray field on the radius-8 tree ball is
/// convergence evidence with m(n) = n.
pub fn fig8(out_dir: &Path) -> Result<FigHorosphereOutcome> {
    let spec = fixtures::f2();
    let ball = Ball::build(&spec, Element::identity(), 8)?;
    let ray = fixtures::f2_a_ray(&spec, 200);
    horosphere_suite(
        out_dir,
        "fig8",
        &ball,
        &ray,
        6,
        "F_2 ball radius 8, a-ray",
    )
}

/// Runs all four suites into subdirectories of `out_dir` and writes a
/// top-level manifest over the per-figure manifests.
pub fn run_all(out_dir: &Path, seed: u64) -> Result<FiguresOutcome> {
    let fig2 = fig2(&out_dir.join("fig2"))?;
    let fig4 = fig4(&out_dir.join("fig4"))?;
    let fig7 = fig7(&out_dir.join("fig7"))?;
    let fig8 = fig8(&out_dir.join("fig8"))?;
    let outcome = FiguresOutcome {
        fig2,
        fig4,
        fig7,
        fig8,
    };
    let mut manifest = Manifest::new("figures");
    manifest.seed(seed);
    manifest.input("fig2: constant derivative table");
    manifest.input("fig4: staircase divergence profile");
    manifest.input("fig7: flat horosphere witness");
    manifest.input("fig8: tree horosphere convergence");
    manifest.write_artifact(out_dir, "summary.json", &to_json(&outcome)?)?;
    manifest.finish(out_dir)?;
    if !outcome.fig2.pass
        || !outcome.fig4.busemann_matches_closed_form
        || !outcome.fig4.both_are_gradient_rays
    {
        return Err(Error::Invariant(
            "figure suite produced an unexpected verdict".into(),
        ));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_two_passes() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = fig2(dir.path()).unwrap();
        assert!(outcome.pass);
        assert_eq!(outcome.vertices, 2 * 36 + 12 + 1);
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn figure_four_profile() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = fig4(dir.path()).unwrap();
        assert!(outcome.busemann_matches_closed_form);
        assert!(outcome.both_are_gradient_rays);
        assert_eq!(outcome.profile_at_8, 8);
        assert!(outcome.tail_nondecreasing_8_to_10);
        assert_eq!(outcome.profile, vec![0, 2, 4, 2, 0, 2, 4, 6, 8, 10, 12]);
    }
}
