//! Shipped group and ray fixtures used by the figure suites and tests.

use crate::group::{FactorKind, GroupSpec};
use crate::ray::RayWalk;

/// Z^2 with generators a (x-direction) and b (y-direction).
pub fn z2() -> GroupSpec {
    GroupSpec::new(vec![(
        FactorKind::FreeAbelian,
        vec!["a".into(), "b".into()],
    )])
    .expect("valid fixture")
}

/// The free group F_2 on a, b.
pub fn f2() -> GroupSpec {
    GroupSpec::new(vec![(FactorKind::Free, vec!["a".into(), "b".into()])])
        .expect("valid fixture")
}

/// Z^2 * Z = <a, b, c | [a, b]>, the fundamental group of a torus wedge a circle.
pub fn z2_free_z() -> GroupSpec {
    GroupSpec::new(vec![
        (FactorKind::FreeAbelian, vec!["a".into(), "b".into()]),
        (FactorKind::Free, vec!["c".into()]),
    ])
    .expect("valid fixture")
}

/// The positive x-axis ray in Z^2.
pub fn z2_axis_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    RayWalk::periodic(spec, vec![], spec.parse_word("a").unwrap(), horizon)
        .expect("axis ray is geodesic")
}

/// A northeast staircase ray in Z^2: two steps right, then legs of eight
/// alternating up/right forever. Both coordinates grow without bound, so its
/// Busemann field is -(x+y) on every finite ball.
pub fn z2_staircase_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    let prefix = spec.parse_word("a a").unwrap();
    let period = spec.parse_word("b b b b b b b b a a a a a a a a").unwrap();
    RayWalk::periodic(spec, prefix, period, horizon).expect("staircase is geodesic")
}

/// The transpose of `z2_staircase_ray` (swap the roles of a and b).
pub fn z2_staircase_transpose(spec: &GroupSpec, horizon: u32) -> RayWalk {
    let prefix = spec.parse_word("b b").unwrap();
    let period = spec.parse_word("a a a a a a a a b b b b b b b b").unwrap();
    RayWalk::periodic(spec, prefix, period, horizon).expect("staircase is geodesic")
}

/// The ray a^infinity in F_2.
pub fn f2_a_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    RayWalk::periodic(spec, vec![], spec.parse_word("a").unwrap(), horizon)
        .expect("a-ray is geodesic")
}

/// The ray a^-infinity in F_2.
pub fn f2_a_inverse_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    RayWalk::periodic(spec, vec![], spec.parse_word("a'").unwrap(), horizon)
        .expect("inverse a-ray is geodesic")
}

/// The ray b^infinity in F_2.
pub fn f2_b_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    RayWalk::periodic(spec, vec![], spec.parse_word("b").unwrap(), horizon)
        .expect("b-ray is geodesic")
}

/// The periodic ray (ac)^infinity in Z^2 * Z.
pub fn z2_free_z_ac_ray(spec: &GroupSpec, horizon: u32) -> RayWalk {
    RayWalk::periodic(spec, vec![], spec.parse_word("a c").unwrap(), horizon)
        .expect("(ac)-ray is geodesic")
}

/// The word a c a^2 c a^3 c ... truncated after the a^n run.
pub fn wedge_word(n: u32) -> String {
    let mut parts = Vec::new();
    for k in 1..=n {
        parts.extend(vec!["a"; k as usize]);
        if k < n {
            parts.push("c");
        }
    }
    parts.join(" ")
}

/// The non-Morse witness ray a c a^2 c a^3 c ... in Z^2 * Z, truncated to a
/// finite prefix ending with the a^n run (length n(n+1)/2 + n - 1).
pub fn wedge_ray(spec: &GroupSpec, n: u32) -> RayWalk {
    RayWalk::finite(spec, spec.parse_word(&wedge_word(n)).unwrap())
        .expect("wedge ray is geodesic")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_word_shape() {
        assert_eq!(wedge_word(3), "a c a a c a a a");
        let g = z2_free_z();
        let ray = wedge_ray(&g, 5);
        assert_eq!(ray.max_t(), Some((1 + 2 + 3 + 4 + 5) + 4));
    }

    #[test]
    fn staircase_positions() {
        let g = z2();
        let ray = z2_staircase_ray(&g, 40);
        let at = |t: u32| ray.eval(&g, t).unwrap();
        assert_eq!(at(2), g.parse_element("a a").unwrap());
        assert_eq!(at(10), g.parse_element("a a b b b b b b b b").unwrap());
        assert_eq!(
            at(18),
            g.parse_element("a a a a a a a a a a b b b b b b b b").unwrap()
        );
    }
}
