//! Geodesic enumeration, nearest-point projection, and tripod internal
//! points. Distances are always computed through the exact group metric, so
//! enumeration is complete; a geodesic that would leave the ball is detected
//! and reported rather than silently truncated.

use crate::ball::{Ball, VertexId};
use crate::error::{Error, Result};
use crate::group::Element;

pub const DEFAULT_PATH_CAP: usize = 100_000;

/// A geodesic vertex path inside a ball; the index sequence has length
/// d(first, last) + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicSegment {
    pub vertices: Vec<VertexId>,
}

impl GeodesicSegment {
    /// Validates adjacency and the geodesic condition n = d(v0, vn).
    pub fn new(ball: &Ball, vertices: Vec<VertexId>) -> Result<GeodesicSegment> {
        if vertices.is_empty() {
            return Err(Error::EmptyFamily("geodesic segment".into()));
        }
        for pair in vertices.windows(2) {
            if !ball.neighbors(pair[0]).iter().any(|&(_, w)| w == pair[1]) {
                return Err(Error::InvalidWord(format!(
                    "vertices {} and {} are not adjacent",
                    ball.display(pair[0]),
                    ball.display(pair[1])
                )));
            }
        }
        let spec = ball.spec();
        let d = spec.distance(
            ball.element(vertices[0]),
            ball.element(*vertices.last().unwrap()),
        );
        if d as usize != vertices.len() - 1 {
            return Err(Error::InvalidWord(format!(
                "path of length {} between vertices at distance {d}",
                vertices.len() - 1
            )));
        }
        Ok(GeodesicSegment { vertices })
    }

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

    pub fn reversed(&self) -> GeodesicSegment {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        GeodesicSegment { vertices }
    }

    pub fn elements(&self, ball: &Ball) -> Vec<Element> {
        self.vertices
            .iter()
            .map(|&v| ball.element(v).clone())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicSet {
    pub paths: Vec<GeodesicSegment>,
    pub truncated: bool,
}

/// Enumerates every geodesic from x to y. Enumeration steps through group
/// multiplication, so a geodesic that exits the ball is detected exactly and
/// reported as a containment error.
pub fn all_geodesics(ball: &Ball, x: VertexId, y: VertexId, cap: usize) -> Result<GeodesicSet> {
    let spec = ball.spec();
    let target = ball.element(y).clone();
    let d0 = spec.distance(ball.element(x), &target);
    let mut paths = Vec::new();
    let mut truncated = false;
    let mut stack = vec![x];
    enumerate(
        ball,
        &target,
        y,
        d0,
        &mut stack,
        &mut paths,
        cap,
        &mut truncated,
    )?;
    Ok(GeodesicSet { paths, truncated })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    ball: &Ball,
    target: &Element,
    y: VertexId,
    remaining: u32,
    stack: &mut Vec<VertexId>,
    paths: &mut Vec<GeodesicSegment>,
    cap: usize,
    truncated: &mut bool,
) -> Result<()> {
    if remaining == 0 {
        if paths.len() >= cap {
            *truncated = true;
            return Ok(());
        }
        paths.push(GeodesicSegment {
            vertices: stack.clone(),
        });
        return Ok(());
    }
    if *truncated && paths.len() >= cap {
        return Ok(());
    }
    let spec = ball.spec();
    let v = *stack.last().unwrap();
    let elem = ball.element(v).clone();
    for &letter in &spec.letters() {
        let w = spec.apply_letter(&elem, letter);
        if spec.distance(&w, target) != remaining - 1 {
            continue;
        }
        match ball.vertex_id(&w) {
            Some(id) => {
                stack.push(id);
                enumerate(ball, target, y, remaining - 1, stack, paths, cap, truncated)?;
                stack.pop();
            }
            None => {
                return Err(Error::Containment {
                    from: ball.display(stack[0]),
                    to: ball.display(y),
                    exit: spec.display_element(&w),
                });
            }
        }
    }
    Ok(())
}

/// The lexicographically-first geodesic: at each step take the first letter
/// in declared order that stays on a geodesic to the target.
pub fn lex_first_geodesic(ball: &Ball, x: VertexId, y: VertexId) -> Result<GeodesicSegment> {
    let spec = ball.spec();
    let target = ball.element(y).clone();
    let mut vertices = vec![x];
    let mut current = ball.element(x).clone();
    let mut remaining = spec.distance(&current, &target);
    let letters = spec.letters();
    while remaining > 0 {
        let mut advanced = false;
        for &letter in &letters {
            let w = spec.apply_letter(&current, letter);
            if spec.distance(&w, &target) == remaining - 1 {
                match ball.vertex_id(&w) {
                    Some(id) => {
                        vertices.push(id);
                        current = w;
                        remaining -= 1;
                        advanced = true;
                        break;
                    }
                    None => {
                        return Err(Error::Containment {
                            from: ball.display(x),
                            to: ball.display(y),
                            exit: spec.display_element(&w),
                        });
                    }
                }
            }
        }
        if !advanced {
            return Err(Error::Invariant(
                "no geodesic step available toward target".into(),
            ));
        }
    }
    Ok(GeodesicSegment { vertices })
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub nearest: Vec<VertexId>,
    pub distance: u32,
}

/// All members of `target` at minimal distance from x. Distances are global,
/// so the result is exact regardless of where the target sits in the ball.
pub fn project(ball: &Ball, x: VertexId, target: &[VertexId]) -> Result<Projection> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let spec = ball.spec();
    let xe = ball.element(x);
    let mut best = u32::MAX;
    let mut nearest = Vec::new();
    for &t in target {
        let d = spec.distance(xe, ball.element(t));
        if d < best {
            best = d;
            nearest.clear();
            nearest.push(t);
        } else if d == best && !nearest.contains(&t) {
            nearest.push(t);
        }
    }
    nearest.sort_unstable();
    Ok(Projection {
        nearest,
        distance: best,
    })
}

/// Tripod data for a geodesic triangle. The numbers a, b, c solve
/// a+b = d(x,y), a+c = d(x,z), b+c = d(y,z); they are stored doubled so odd
/// perimeters stay exact, with `half_integer` flagging that case. Internal
/// points are placed at the floor of each arc length on the chosen sides.
#[derive(Debug, Clone)]
pub struct Tripod {
    /// (2a, 2b, 2c)
    pub doubled: (i64, i64, i64),
    pub half_integer: bool,
    /// i_z on [x,y], i_y on [x,z], i_x on [y,z].
    pub internal: (VertexId, VertexId, VertexId),
}

#[derive(Debug, Clone)]
pub struct TriangleSides {
    pub xy: GeodesicSegment,
    pub xz: GeodesicSegment,
    pub yz: GeodesicSegment,
}

impl TriangleSides {
    /// Default sides: the lexicographically-first geodesic for each pair.
    pub fn lex_first(ball: &Ball, x: VertexId, y: VertexId, z: VertexId) -> Result<TriangleSides> {
        Ok(TriangleSides {
            xy: lex_first_geodesic(ball, x, y)?,
            xz: lex_first_geodesic(ball, x, z)?,
            yz: lex_first_geodesic(ball, y, z)?,
        })
    }
}

/// Doubled tripod numbers from three side lengths: (2a, 2b, 2c).
pub fn tripod_numbers(dxy: u32, dxz: u32, dyz: u32) -> (i64, i64, i64) {
    let (dxy, dxz, dyz) = (dxy as i64, dxz as i64, dyz as i64);
    (dxy + dxz - dyz, dxy + dyz - dxz, dxz + dyz - dxy)
}

pub fn internal_points(ball: &Ball, sides: &TriangleSides) -> Result<Tripod> {
    let spec = ball.spec();
    for side in [&sides.xy, &sides.xz, &sides.yz] {
        let d = spec.distance(ball.element(side.start()), ball.element(side.end()));
        if d != side.len() {
            return Err(Error::InvalidWord(format!(
                "side of length {} between vertices at distance {d}",
                side.len()
            )));
        }
    }
    let dxy = sides.xy.len();
    let dxz = sides.xz.len();
    let dyz = sides.yz.len();
    if sides.xy.start() != sides.xz.start()
        || sides.xy.end() != sides.yz.start()
        || sides.xz.end() != sides.yz.end()
    {
        return Err(Error::InvalidWord(
            "triangle sides do not share endpoints as [x,y], [x,z], [y,z]".into(),
        ));
    }
    let (a2, b2, c2) = tripod_numbers(dxy, dxz, dyz);
    if a2 < 0 || b2 < 0 || c2 < 0 {
        return Err(Error::Invariant(
            "negative tripod numbers violate the triangle inequality".into(),
        ));
    }
    let half_integer = a2 % 2 != 0;
    let a_floor = (a2 / 2) as usize;
    let b_floor = (b2 / 2) as usize;
    let i_z = sides.xy.vertices[a_floor.min(dxy as usize)];
    let i_y = sides.xz.vertices[a_floor.min(dxz as usize)];
    let i_x = sides.yz.vertices[b_floor.min(dyz as usize)];
    Ok(Tripod {
        doubled: (a2, b2, c2),
        half_integer,
        internal: (i_x, i_y, i_z),
    })
}
