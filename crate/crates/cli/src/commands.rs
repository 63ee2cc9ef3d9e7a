use crate::{Command, CommonArgs, RayArg};
use horolab::ball::{Ball, DotHighlight};
use horolab::error::{Error, Result};
use horolab::field::{busemann_default, check_distance_like, check_lipschitz, ScalarField};
use horolab::gradient::{
    align_by_level, fellow_travel_profile, gradient_ray, GradientPath, Policy,
};
use horolab::group::{Element, GroupSpec, GroupSpecFile};
use horolab::horosphere::{convergence_witness, horosphere};
use horolab::manifest::{to_json, Manifest};
use horolab::morse::{contraction_csv, contraction_profile, quasigeodesic_excursion};
use horolab::ray::{RayFile, RayWalk};
use horolab::symbolic::{
    agree_on_overlap, derivative, derivative_partial, integrate, loop_check, shift_act,
    DerivativeField,
};
use serde::Serialize;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

pub fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Ball { common } => run_ball(&common),
        Command::Busemann { common, ray, margin } => run_busemann(&common, &ray, margin),
        Command::Gradient {
            common,
            ray,
            start,
            other,
            policy,
            seed,
            budget_leaves,
        } => run_gradient(&common, &ray, &start, other.as_deref(), &policy, seed, budget_leaves),
        Command::MorseTest {
            common,
            ray,
            gauge,
            budget_dist,
            budget_nodes,
        } => run_morse_test(&common, &ray, &gauge, budget_dist, budget_nodes),
        Command::ContractionTest {
            common,
            ray,
            at,
            radii,
            offset,
            length,
        } => run_contraction(&common, &ray, &at, &radii, &offset, length),
        Command::Derivative {
            common,
            ray,
            field,
            forbidden,
        } => run_derivative(&common, ray.as_deref(), field.as_deref(), forbidden.as_deref()),
        Command::Integrate {
            common,
            deriv,
            base,
            base_value,
        } => run_integrate(&common, &deriv, &base, base_value),
        Command::ShiftCheck { common, ray, by } => run_shift_check(&common, &ray, &by),
        Command::Horosphere {
            common,
            ray,
            horizon,
            threshold,
        } => run_horosphere(&common, &ray, horizon, threshold),
        Command::Figures { out, seed } => {
            let outcome = horolab::figures::run_all(&out, seed)?;
            Ok(format!(
                "figures written to {} (fig7: {:?}, fig8: {:?})",
                out.display(),
                outcome.fig7.verdict,
                outcome.fig8.verdict
            ))
        }
    }
}

fn load_group(common: &CommonArgs) -> Result<GroupSpec> {
    let text = std::fs::read_to_string(&common.group)?;
    let file: GroupSpecFile = serde_json::from_str(&text)?;
    GroupSpec::from_file_spec(&file)
}

fn load_ray(spec: &GroupSpec, path: &Path, radius: u32) -> Result<RayWalk> {
    let text = std::fs::read_to_string(path)?;
    let file: RayFile = serde_json::from_str(&text)?;
    let period_len = spec.parse_word(&file.period)?.len() as u32;
    // The construction-time certificate: geodesic up to 4R + |period|.
    let horizon = 4 * radius + period_len;
    RayWalk::from_file(spec, &file, horizon)
}

fn build_ball(spec: &GroupSpec, common: &CommonArgs) -> Result<Ball> {
    Ball::build_capped(spec, Element::identity(), common.radius, common.cap)
}

fn wants(common: &CommonArgs, format: &str) -> bool {
    common.format.is_empty() || common.format.iter().any(|f| f == format)
}

fn manifest_for(common: &CommonArgs, command: &str) -> Manifest {
    let mut m = Manifest::new(command);
    m.input(format!("group: {}", common.group.display()));
    m.budget("radius", common.radius as u64);
    m.budget("vertex_cap", common.cap as u64);
    m
}

fn run_ball(common: &CommonArgs) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let mut manifest = manifest_for(common, "ball");
    if wants(common, "dot") {
        manifest.write_artifact(&common.out, "ball.dot", &ball.to_dot(None))?;
    }
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "distances.csv", &ball.distance_table_csv())?;
    }
    manifest.finish(&common.out)?;
    Ok(format!(
        "ball of radius {} with {} vertices written to {}",
        ball.radius(),
        ball.len(),
        common.out.display()
    ))
}

#[derive(Serialize)]
struct BusemannSummary<'a> {
    vertices: usize,
    lipschitz: &'a horolab::field::LipschitzReport,
    distance_like: &'a horolab::field::DistanceLikeReport,
    window: u32,
    t_max: u32,
}

fn run_busemann(common: &CommonArgs, ray: &RayArg, margin: u32) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let (h, cert) = busemann_default(&ball, &walk)?;
    let lipschitz = check_lipschitz(&ball, &h);
    let distance_like = check_distance_like(&ball, &h, margin)?;
    let mut manifest = manifest_for(common, "busemann");
    manifest.input(format!("ray: {}", ray.ray.display()));
    manifest.budget("margin", margin as u64);
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "field.csv", &h.write_csv(&ball))?;
    }
    if wants(common, "json") {
        let summary = BusemannSummary {
            vertices: ball.len(),
            lipschitz: &lipschitz,
            distance_like: &distance_like,
            window: cert.window,
            t_max: cert.t_max,
        };
        manifest.write_artifact(&common.out, "report.json", &to_json(&summary)?)?;
    }
    manifest.finish(&common.out)?;
    Ok(format!(
        "busemann field on {} vertices: lipschitz {}, distance-like {}",
        ball.len(),
        lipschitz.pass,
        distance_like.pass
    ))
}

fn gradient_tree_dot(ball: &Ball, h: &ScalarField, rays: &[GradientPath]) -> String {
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    let mut nodes: HashSet<u32> = HashSet::new();
    for path in rays {
        for pair in path.vertices.windows(2) {
            nodes.insert(pair[0]);
            nodes.insert(pair[1]);
            edges.insert((pair[0], pair[1]));
        }
        nodes.insert(path.vertices[0]);
    }
    let mut nodes: Vec<u32> = nodes.into_iter().collect();
    nodes.sort_unstable();
    let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
    edges.sort_unstable();
    let mut out = String::from("digraph gradient {\n    node [shape=box fontsize=10];\n");
    for v in nodes {
        let _ = writeln!(
            out,
            "    v{v} [label=\"{}\\nh={}\"];",
            ball.display(v),
            h.value(v)
        );
    }
    for (a, b) in edges {
        let _ = writeln!(out, "    v{a} -> v{b};");
    }
    out.push_str("}\n");
    out
}

fn run_gradient(
    common: &CommonArgs,
    ray: &RayArg,
    start: &str,
    other: Option<&str>,
    policy: &str,
    seed: Option<u64>,
    budget_leaves: usize,
) -> Result<String> {
    if budget_leaves == 0 {
        return Err(Error::Config("budget-leaves must be positive".into()));
    }
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let (h, _) = busemann_default(&ball, &walk)?;
    let start_id = ball.require_vertex(&spec.parse_element(start)?)?;
    let policy = match policy {
        "first" => Policy::First,
        "all" => Policy::All {
            leaf_cap: budget_leaves,
        },
        "random" => Policy::Random {
            seed: seed.ok_or_else(|| {
                Error::Config("--seed is required with --policy random".into())
            })?,
        },
        other => return Err(Error::Config(format!("unknown policy `{other}`"))),
    };
    let rays = gradient_ray(&ball, &h, start_id, policy, 0)?;
    let paths: Vec<GradientPath> = rays.rays.iter().map(|r| r.path.clone()).collect();
    let mut manifest = manifest_for(common, "gradient");
    manifest.input(format!("ray: {}", ray.ray.display()));
    manifest.input(format!("start: {start}"));
    if let Some(seed) = seed {
        manifest.seed(seed);
    }
    if wants(common, "dot") {
        manifest.write_artifact(&common.out, "tree.dot", &gradient_tree_dot(&ball, &h, &paths))?;
    }
    let mut summary = format!(
        "{} gradient path(s) from {start}{}",
        paths.len(),
        if rays.truncated { " (truncated)" } else { "" }
    );
    if let Some(other) = other {
        let other_id = ball.require_vertex(&spec.parse_element(other)?)?;
        let alt = gradient_ray(&ball, &h, other_id, Policy::First, 0)?;
        let base = gradient_ray(&ball, &h, start_id, Policy::First, 0)?;
        let (a, b) = align_by_level(&h, &base.rays[0].path, &alt.rays[0].path)?;
        let profile = fellow_travel_profile(&ball, &a, &b);
        if wants(common, "csv") {
            manifest.write_artifact(&common.out, "profile.csv", &profile.csv())?;
        }
        let _ = write!(
            summary,
            "; profile vs {other}: max {}, tail nondecreasing {}",
            profile.max, profile.tail_nondecreasing
        );
    }
    manifest.finish(&common.out)?;
    Ok(summary)
}

fn parse_gauge_list(text: &str) -> Result<Vec<((u32, u32), u32)>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lambda, eps) = part
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("gauge `{part}` is not lambda:epsilon")))?;
        let (num, den) = match lambda.split_once('/') {
            Some((n, d)) => (
                n.parse()
                    .map_err(|_| Error::Config(format!("bad lambda `{lambda}`")))?,
                d.parse()
                    .map_err(|_| Error::Config(format!("bad lambda `{lambda}`")))?,
            ),
            None => (
                lambda
                    .parse()
                    .map_err(|_| Error::Config(format!("bad lambda `{lambda}`")))?,
                1,
            ),
        };
        let eps = eps
            .parse()
            .map_err(|_| Error::Config(format!("bad epsilon `{eps}`")))?;
        out.push(((num, den), eps));
    }
    if out.is_empty() {
        return Err(Error::Config("gauge list is empty".into()));
    }
    Ok(out)
}

fn run_morse_test(
    common: &CommonArgs,
    ray: &RayArg,
    gauge: &str,
    budget_dist: u32,
    budget_nodes: u64,
) -> Result<String> {
    if budget_dist == 0 || budget_nodes == 0 {
        return Err(Error::Config("budgets must be positive".into()));
    }
    let gauges = parse_gauge_list(gauge)?;
    let spec = load_group(common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let gamma = walk.image_up_to(&spec, common.radius)?;
    let mut estimates = Vec::new();
    let mut csv = String::from("lambda_num,lambda_den,epsilon,excursion,partial\n");
    for (lambda, eps) in gauges {
        let est = quasigeodesic_excursion(&spec, &gamma, lambda, eps, budget_dist, budget_nodes)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            est.lambda_num, est.lambda_den, est.epsilon, est.excursion, est.scope.partial
        );
        estimates.push(est);
    }
    let mut manifest = manifest_for(common, "morse-test");
    manifest.input(format!("ray: {}", ray.ray.display()));
    manifest.budget("budget_dist", budget_dist as u64);
    manifest.budget("budget_nodes", budget_nodes);
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "gauges.csv", &csv)?;
    }
    if wants(common, "json") {
        manifest.write_artifact(&common.out, "gauges.json", &to_json(&estimates)?)?;
    }
    manifest.finish(&common.out)?;
    let max = estimates.iter().map(|e| e.excursion).max().unwrap_or(0);
    Ok(format!(
        "{} gauge(s) measured, max excursion {max}",
        estimates.len()
    ))
}

fn parse_u32_list(text: &str, what: &str) -> Result<Vec<u32>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad {what} entry `{p}`")))
        })
        .collect()
}

fn run_contraction(
    common: &CommonArgs,
    ray: &RayArg,
    at: &str,
    radii: &str,
    offset: &str,
    length: Option<u32>,
) -> Result<String> {
    let spec = load_group(common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let at = parse_u32_list(at, "--at")?;
    let radii = parse_u32_list(radii, "--radii")?;
    if at.len() != radii.len() || at.is_empty() {
        return Err(Error::Config(
            "--at and --radii must be nonempty lists of equal length".into(),
        ));
    }
    let offset_letters = spec.parse_word(offset)?;
    if offset_letters.len() != 1 {
        return Err(Error::Config("--offset must be a single letter".into()));
    }
    let segment_len = length.unwrap_or(common.radius);
    let gamma = walk.image_up_to(&spec, segment_len)?;
    let samples: Vec<(Element, u32)> = at
        .iter()
        .zip(&radii)
        .map(|(&t, &rho)| {
            let mut center = walk.eval(&spec, t)?;
            for _ in 0..=rho {
                center = spec.apply_letter(&center, offset_letters[0]);
            }
            Ok((center, rho))
        })
        .collect::<Result<_>>()?;
    let profile = contraction_profile(&spec, &gamma, &samples)?;
    let mut manifest = manifest_for(common, "contraction-test");
    manifest.input(format!("ray: {}", ray.ray.display()));
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "contraction.csv", &contraction_csv(&profile))?;
    }
    if wants(common, "json") {
        manifest.write_artifact(&common.out, "contraction.json", &to_json(&profile)?)?;
    }
    manifest.finish(&common.out)?;
    Ok(format!(
        "{} sample(s), max diameter {}, trend {:?}",
        profile.samples.len(),
        profile.d_hat,
        profile.trend
    ))
}

fn run_derivative(
    common: &CommonArgs,
    ray: Option<&Path>,
    field: Option<&Path>,
    forbidden: Option<&Path>,
) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let h = match (ray, field) {
        (Some(ray), None) => {
            let walk = load_ray(&spec, ray, common.radius)?;
            busemann_default(&ball, &walk)?.0
        }
        (None, Some(field)) => {
            let text = std::fs::read_to_string(field)?;
            ScalarField::from_csv(&ball, &text)?
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --ray or --field is required".into(),
            ))
        }
    };
    let sigma = derivative(&ball, &h)?;
    let report = loop_check(&ball, &sigma);
    let mut manifest = manifest_for(common, "derivative");
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "derivative.csv", &sigma.write_csv(&ball))?;
    }
    if wants(common, "json") {
        manifest.write_artifact(&common.out, "loop_check.json", &to_json(&report)?)?;
    }
    let mut summary = format!("derivative written; loop_check pass = {}", report.pass);
    if let Some(path) = forbidden {
        let file: horolab::symbolic::ForbiddenSetFile =
            serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let fs = horolab::symbolic::forbidden_set_from_file(&spec, &file)?;
        let symbols = horolab::symbolic::letter_symbols(&ball, &sigma);
        let scan = horolab::symbolic::forbidden_scan(&ball, &symbols, &fs);
        if wants(common, "json") {
            manifest.write_artifact(&common.out, "forbidden_scan.json", &to_json(&scan)?)?;
        }
        let _ = write!(summary, "; forbidden matches = {}", scan.matches.len());
    }
    manifest.finish(&common.out)?;
    Ok(summary)
}

#[derive(Serialize)]
struct IntegrateSummary {
    base: String,
    base_value: i64,
    round_trip: bool,
}

fn run_integrate(
    common: &CommonArgs,
    deriv: &Path,
    base: &str,
    base_value: i64,
) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let text = std::fs::read_to_string(deriv)?;
    let sigma = DerivativeField::from_csv(&ball, &text)?;
    let base_id = ball.require_vertex(&spec.parse_element(base)?)?;
    let h = integrate(&ball, &sigma, base_id, base_value)?;
    let round_trip = derivative(&ball, &h)? == sigma;
    let mut manifest = manifest_for(common, "integrate");
    manifest.input(format!("derivative: {}", deriv.display()));
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "field.csv", &h.write_csv(&ball))?;
    }
    if wants(common, "json") {
        let summary = IntegrateSummary {
            base: base.into(),
            base_value,
            round_trip,
        };
        manifest.write_artifact(&common.out, "report.json", &to_json(&summary)?)?;
    }
    manifest.finish(&common.out)?;
    Ok(format!("field integrated; round trip = {round_trip}"))
}

#[derive(Serialize)]
struct ShiftCheckSummary {
    by: String,
    equivariance: bool,
    overlap: usize,
    action_law: bool,
}

fn run_shift_check(common: &CommonArgs, ray: &RayArg, by: &str) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let (h, _) = busemann_default(&ball, &walk)?;
    let g = spec.parse_element(by)?;
    let sigma = derivative(&ball, &h)?;
    let lhs = derivative_partial(&ball, &horolab::field::translate(&ball, &h, &g)?);
    let rhs = shift_act(&ball, &sigma, &g)?;
    let (equivariance, overlap) = agree_on_overlap(&lhs, &rhs);
    // Action law with the square of the shift.
    let nested = shift_act(&ball, &rhs, &g)?;
    let direct = shift_act(&ball, &sigma, &spec.multiply(&g, &g))?;
    let (action_law, _) = agree_on_overlap(&nested, &direct);
    let summary = ShiftCheckSummary {
        by: by.into(),
        equivariance,
        overlap,
        action_law,
    };
    let mut manifest = manifest_for(common, "shift-check");
    manifest.input(format!("ray: {}", ray.ray.display()));
    if wants(common, "json") {
        manifest.write_artifact(&common.out, "report.json", &to_json(&summary)?)?;
    }
    manifest.finish(&common.out)?;
    Ok(format!(
        "equivariance {equivariance} on overlap {overlap}; action law {action_law}"
    ))
}

fn run_horosphere(
    common: &CommonArgs,
    ray: &RayArg,
    horizon: u32,
    threshold: i64,
) -> Result<String> {
    let spec = load_group(common)?;
    let ball = build_ball(&spec, common)?;
    let walk = load_ray(&spec, &ray.ray, common.radius)?;
    let (h, _) = busemann_default(&ball, &walk)?;
    let report = convergence_witness(&ball, &h, &walk, horizon, threshold)?;
    let ray_ids: HashSet<u32> = walk
        .image_up_to(&spec, ball.radius())?
        .iter()
        .filter_map(|p| ball.vertex_id(p))
        .collect();
    let members: HashSet<u32> = (1..=horizon as i64)
        .flat_map(|n| horosphere(&ball, &h, n).members)
        .collect();
    let mut manifest = manifest_for(common, "horosphere");
    manifest.input(format!("ray: {}", ray.ray.display()));
    manifest.budget("horizon", horizon as u64);
    if wants(common, "csv") {
        manifest.write_artifact(&common.out, "horospheres.csv", &report.csv())?;
    }
    if wants(common, "dot") {
        let highlight = DotHighlight {
            ray: ray_ids,
            members,
        };
        manifest.write_artifact(&common.out, "overlay.dot", &ball.to_dot(Some(&highlight)))?;
    }
    if wants(common, "json") {
        manifest.write_artifact(&common.out, "report.json", &to_json(&report)?)?;
    }
    manifest.finish(&common.out)?;
    Ok(format!("verdict {:?}", report.verdict))
}
