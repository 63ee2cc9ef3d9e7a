//! Cross-checks of the algebraic word metric against independent oracles:
//! a string-rewriting normal form built from scratch, raw word enumeration,
//! and graph BFS inside materialized balls.

use horolab::ball::Ball;
use horolab::fixtures;
use horolab::group::{Element, GroupSpec};

/// Independent rewriter for <a, b, c | [a, b]>: words over the six letters
/// +-a, +-b, +-c are reduced by cancelling adjacent inverses and bubbling
/// a-letters before b-letters inside maximal {a, b} runs. This never touches
/// the library's syllable representation.
mod wedge_oracle {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
    pub enum Tok {
        A(i8),
        B(i8),
        C(i8),
    }

    fn inverse_pair(x: Tok, y: Tok) -> bool {
        match (x, y) {
            (Tok::A(p), Tok::A(q)) | (Tok::B(p), Tok::B(q)) | (Tok::C(p), Tok::C(q)) => p == -q,
            _ => false,
        }
    }

    fn is_ab(x: Tok) -> bool {
        matches!(x, Tok::A(_) | Tok::B(_))
    }

    pub fn reduce(word: &[Tok]) -> Vec<Tok> {
        let mut w: Vec<Tok> = word.to_vec();
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < w.len() {
                if inverse_pair(w[i], w[i + 1]) {
                    w.drain(i..=i + 1);
                    changed = true;
                    i = i.saturating_sub(1);
                    continue;
                }
                // Sort a before b within commuting runs.
                if let (Tok::B(_), Tok::A(_)) = (w[i], w[i + 1]) {
                    w.swap(i, i + 1);
                    changed = true;
                    i = i.saturating_sub(1);
                    continue;
                }
                i += 1;
            }
            // Also sort same-letter signs canonically inside runs so that
            // e.g. a a' at distance 2 within a run cancels via bubbling.
            let mut j = 0;
            while j + 1 < w.len() {
                if is_ab(w[j]) && is_ab(w[j + 1]) {
                    let swap = match (w[j], w[j + 1]) {
                        (Tok::A(p), Tok::A(q)) | (Tok::B(p), Tok::B(q)) => p < q,
                        _ => false,
                    };
                    if swap {
                        w.swap(j, j + 1);
                        changed = true;
                    }
                }
                j += 1;
            }
            if !changed {
                return w;
            }
        }
    }

    pub fn letters() -> Vec<Tok> {
        vec![
            Tok::A(1),
            Tok::B(1),
            Tok::C(1),
            Tok::A(-1),
            Tok::B(-1),
            Tok::C(-1),
        ]
    }
}

/// Enumerate all words up to the given length, reduce with the independent
/// rewriter, and return the count of distinct normal forms together with the
/// shortest-word length realizing each.
fn wedge_word_bfs(max_len: usize) -> std::collections::HashMap<Vec<wedge_oracle::Tok>, usize> {
    use std::collections::HashMap;
    let letters = wedge_oracle::letters();
    let mut shortest: HashMap<Vec<wedge_oracle::Tok>, usize> = HashMap::new();
    let mut frontier: Vec<Vec<wedge_oracle::Tok>> = vec![vec![]];
    shortest.insert(vec![], 0);
    for len in 1..=max_len {
        let mut next = Vec::new();
        for word in &frontier {
            for &l in &letters {
                let mut w = word.clone();
                w.push(l);
                let canon = wedge_oracle::reduce(&w);
                shortest.entry(canon).or_insert(len);
                next.push(w);
            }
        }
        frontier = next;
    }
    shortest
}

#[test]
fn wedge_ball_counts_match_word_enumeration() {
    // Independent count of |B_2| in Z^2 * Z: 1 identity + 6 letters + 26
    // distinct length-2 elements = 33.
    let shortest = wedge_word_bfs(2);
    let count2 = shortest.values().filter(|&&l| l <= 2).count();
    assert_eq!(count2, 33);

    let spec = fixtures::z2_free_z();
    let ball = Ball::build(&spec, Element::identity(), 2).unwrap();
    assert_eq!(ball.len(), count2);

    // Radius 3 as well, against the same independent enumeration.
    let shortest3 = wedge_word_bfs(3);
    let ball3 = Ball::build(&spec, Element::identity(), 3).unwrap();
    assert_eq!(ball3.len(), shortest3.len());
}

#[test]
fn wedge_distances_match_word_enumeration() {
    // The library distance from the identity must equal the length of the
    // shortest word reaching the same normal form, exhaustively to length 4.
    use wedge_oracle::Tok;
    let spec = fixtures::z2_free_z();
    let shortest = wedge_word_bfs(4);
    let to_library = |word: &[Tok]| -> Element {
        let mut text = String::new();
        for t in word {
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(match t {
                Tok::A(1) => "a",
                Tok::A(_) => "a'",
                Tok::B(1) => "b",
                Tok::B(_) => "b'",
                Tok::C(1) => "c",
                Tok::C(_) => "c'",
            });
        }
        if text.is_empty() {
            Element::identity()
        } else {
            spec.parse_element(&text).unwrap()
        }
    };
    let identity = Element::identity();
    for (canon, &len) in &shortest {
        let elem = to_library(canon);
        assert_eq!(
            spec.distance(&identity, &elem) as usize,
            len,
            "normal form {canon:?}"
        );
    }
    // Spot value from the mixed example: d(e, a^2 c b) = 4.
    let p = spec.parse_element("a a c b").unwrap();
    assert_eq!(spec.distance(&identity, &p), 4);
}

fn pairwise_bfs_check(spec: &GroupSpec, radius: u32) {
    let ball = Ball::build(spec, Element::identity(), radius).unwrap();
    for v in ball.ids() {
        let bfs = ball.bfs_distances_from(v);
        for w in ball.ids() {
            let alg = spec.distance(ball.element(v), ball.element(w));
            // Inside the inner region every geodesic stays in the ball, so
            // graph BFS must agree exactly.
            if alg + ball.dist_from_center(v).max(ball.dist_from_center(w)) <= radius {
                assert_eq!(
                    bfs[w as usize],
                    Some(alg),
                    "pair ({}, {})",
                    ball.display(v),
                    ball.display(w)
                );
            }
            // And BFS can never beat the group metric.
            if let Some(d) = bfs[w as usize] {
                assert!(d >= alg);
            }
        }
    }
}

#[test]
fn bfs_agrees_with_word_metric_f2() {
    pairwise_bfs_check(&fixtures::f2(), 4);
}

#[test]
fn bfs_agrees_with_word_metric_z2() {
    pairwise_bfs_check(&fixtures::z2(), 6);
}

#[test]
fn bfs_agrees_with_word_metric_wedge() {
    pairwise_bfs_check(&fixtures::z2_free_z(), 4);
}

#[test]
fn multiply_round_trip_over_ball_elements() {
    let spec = fixtures::z2_free_z();
    let ball = Ball::build(&spec, Element::identity(), 3).unwrap();
    for v in ball.ids() {
        let e = ball.element(v);
        assert!(spec.multiply(e, &spec.inverse(e)).is_identity());
    }
}

#[test]
fn ray_eval_has_exact_length() {
    let spec = fixtures::z2_free_z();
    let ray = fixtures::z2_free_z_ac_ray(&spec, 60);
    for t in 0..=60 {
        let p = ray.eval(&spec, t).unwrap();
        assert_eq!(spec.length(&p), t);
    }
}
