//! Parametric stroke definitions for every shape class.
//!
//! Single-finger strokes live in the vertical x-y plane (y up). Multi-finger
//! strokes describe the palm path in 3D. Coordinates are millimetres around
//! the origin.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

pub(crate) type V3 = [f64; 3];

fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn mul(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dist(a: V3, b: V3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// One smooth stretch of a stroke, parametrised over `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Piece {
    Line { a: V3, b: V3 },
    /// `center + cos(θ) u + sin(θ) v` for θ from `start` to `start + sweep`.
    Arc { center: V3, u: V3, v: V3, start: f64, sweep: f64 },
    /// Spiral around the vertical axis through `base`, radius and height linear in the parameter.
    Spiral { base: V3, r0: f64, r1: f64, y0: f64, y1: f64, start: f64, sweep: f64 },
}

impl Piece {
    pub(crate) fn at(&self, s: f64) -> V3 {
        match *self {
            Piece::Line { a, b } => {
                if s == 1.0 {
                    b
                } else {
                    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s, a[2] + (b[2] - a[2]) * s]
                }
            }
            Piece::Arc { center, u, v, start, sweep } => {
                let th = start + sweep * s;
                add(center, add(mul(u, th.cos()), mul(v, th.sin())))
            }
            Piece::Spiral { base, r0, r1, y0, y1, start, sweep } => {
                let th = start + sweep * s;
                let r = r0 + (r1 - r0) * s;
                let y = if s == 1.0 { y1 } else { y0 + (y1 - y0) * s };
                [base[0] + r * th.cos(), base[1] + y, base[2] + r * th.sin()]
            }
        }
    }

    pub(crate) fn length(&self) -> f64 {
        match self {
            Piece::Line { a, b } => dist(*a, *b),
            _ => {
                const STEPS: usize = 256;
                (0..STEPS)
                    .map(|i| {
                        dist(
                            self.at(i as f64 / STEPS as f64),
                            self.at((i + 1) as f64 / STEPS as f64),
                        )
                    })
                    .sum()
            }
        }
    }

    /// Splits at parameter `f`.
    pub(crate) fn split(&self, f: f64) -> (Piece, Piece) {
        match *self {
            Piece::Line { a, b } => {
                let m = self.at(f);
                (Piece::Line { a, b: m }, Piece::Line { a: m, b })
            }
            Piece::Arc { center, u, v, start, sweep } => (
                Piece::Arc { center, u, v, start, sweep: sweep * f },
                Piece::Arc { center, u, v, start: start + sweep * f, sweep: sweep * (1.0 - f) },
            ),
            Piece::Spiral { base, r0, r1, y0, y1, start, sweep } => {
                let rm = r0 + (r1 - r0) * f;
                let ym = y0 + (y1 - y0) * f;
                (
                    Piece::Spiral { base, r0, r1: rm, y0, y1: ym, start, sweep: sweep * f },
                    Piece::Spiral {
                        base,
                        r0: rm,
                        r1,
                        y0: ym,
                        y1,
                        start: start + sweep * f,
                        sweep: sweep * (1.0 - f),
                    },
                )
            }
        }
    }

    fn scaled(&self, k: f64) -> Piece {
        match *self {
            Piece::Line { a, b } => Piece::Line { a: mul(a, k), b: mul(b, k) },
            Piece::Arc { center, u, v, start, sweep } => Piece::Arc {
                center: mul(center, k),
                u: mul(u, k),
                v: mul(v, k),
                start,
                sweep,
            },
            Piece::Spiral { base, r0, r1, y0, y1, start, sweep } => Piece::Spiral {
                base: mul(base, k),
                r0: r0 * k,
                r1: r1 * k,
                y0: y0 * k,
                y1: y1 * k,
                start,
                sweep,
            },
        }
    }
}

/// Size parameters of one drawn instance, in millimetres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dims {
    /// Overall extent of shapes without dedicated parameters.
    pub size: f64,
    pub height: f64,
    pub diameter: f64,
}

/// A class stroke: its pieces and whether it closes on itself.
#[derive(Clone, Debug)]
pub(crate) struct Stroke {
    pub pieces: Vec<Piece>,
    pub closed: bool,
}

const X: V3 = [1.0, 0.0, 0.0];
const Y: V3 = [0.0, 1.0, 0.0];
const Z: V3 = [0.0, 0.0, 1.0];

fn line(a: [f64; 2], b: [f64; 2]) -> Piece {
    Piece::Line { a: [a[0], a[1], 0.0], b: [b[0], b[1], 0.0] }
}

fn polyline(pts: &[[f64; 2]]) -> Vec<Piece> {
    pts.windows(2).map(|w| line(w[0], w[1])).collect()
}

fn line3(a: V3, b: V3) -> Piece {
    Piece::Line { a, b }
}

fn polyline3(pts: &[V3]) -> Vec<Piece> {
    pts.windows(2).map(|w| line3(w[0], w[1])).collect()
}

/// Planar arc in x-y with radius `r`; angles in degrees.
fn arc(c: [f64; 2], r: f64, from_deg: f64, sweep_deg: f64) -> Piece {
    Piece::Arc {
        center: [c[0], c[1], 0.0],
        u: mul(X, r),
        v: mul(Y, r),
        start: from_deg.to_radians(),
        sweep: sweep_deg.to_radians(),
    }
}

/// Arc split into quarter-turn pieces so that axis extremes land on piece ends.
fn quartered(center: V3, u: V3, v: V3, start: f64, quarters: i32) -> Vec<Piece> {
    let step = FRAC_PI_2 * f64::from(quarters.signum());
    (0..quarters.abs())
        .map(|q| Piece::Arc { center, u, v, start: start + step * f64::from(q), sweep: step })
        .collect()
}

fn regular_polygon(n: usize, r: f64, first_deg: f64, step_sign: f64) -> Vec<[f64; 2]> {
    (0..=n)
        .map(|i| {
            let a = (first_deg + step_sign * 360.0 * i as f64 / n as f64).to_radians();
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

fn unit_single(label: &str) -> Option<Stroke> {
    let open = |pieces| Some(Stroke { pieces, closed: false });
    let closed = |pieces| Some(Stroke { pieces, closed: true });
    match label {
        "bag" => {
            let mut p = polyline(&[[-0.3, 0.15], [-0.5, -0.5], [0.5, -0.5], [0.3, 0.15], [-0.3, 0.15]]);
            p.push(line([-0.3, 0.15], [-0.18, 0.15]));
            p.push(arc([0.0, 0.15], 0.18, 180.0, -180.0));
            open(p)
        }
        "circle" => closed(vec![arc([0.0, 0.0], 0.5, 90.0, 360.0)]),
        "cross" => open(polyline(&[[-0.5, 0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, -0.5]])),
        "diamond" => closed(polyline(&[[0.0, 0.5], [-0.35, 0.0], [0.0, -0.5], [0.35, 0.0], [0.0, 0.5]])),
        "flower" => {
            // five petal loops through the centre
            let p = (0..5)
                .map(|k| {
                    let dir = 90.0 + 72.0 * k as f64;
                    let d = dir.to_radians();
                    arc([0.25 * d.cos(), 0.25 * d.sin()], 0.25, dir + 180.0, 360.0)
                })
                .collect();
            open(p)
        }
        "heart" => closed(vec![
            line([0.0, -0.5], [-0.45, 0.2]),
            arc([-0.225, 0.2], 0.225, 180.0, -180.0),
            arc([0.225, 0.2], 0.225, 180.0, -180.0),
            line([0.45, 0.2], [0.0, -0.5]),
        ]),
        "up" => open(polyline(&[[0.0, -0.5], [0.0, 0.5], [-0.25, 0.25], [0.0, 0.5], [0.25, 0.25]])),
        "down" => open(polyline(&[[0.0, 0.5], [0.0, -0.5], [-0.25, -0.25], [0.0, -0.5], [0.25, -0.25]])),
        "right" => open(polyline(&[[-0.5, 0.0], [0.5, 0.0], [0.25, 0.25], [0.5, 0.0], [0.25, -0.25]])),
        "left" => open(polyline(&[[0.5, 0.0], [-0.5, 0.0], [-0.25, 0.25], [-0.5, 0.0], [-0.25, -0.25]])),
        "pyramid" => {
            let mut p = polyline(&[[-0.5, -0.5], [0.0, 0.5], [0.5, -0.5], [-0.5, -0.5]]);
            p.extend(polyline3(&[
                [-0.5, -0.5, 0.0],
                [-0.5, -0.5, 0.6],
                [0.5, -0.5, 0.6],
                [0.5, -0.5, 0.0],
            ]));
            open(p)
        }
        "house" => open(polyline(&[
            [-0.4, 0.1],
            [0.0, 0.5],
            [0.4, 0.1],
            [-0.4, 0.1],
            [-0.4, -0.5],
            [0.4, -0.5],
            [0.4, 0.1],
        ])),
        "pentagon" => closed(polyline(&regular_polygon(5, 0.5, 90.0, 1.0))),
        "moon" => {
            let inner_r = (0.3f64 * 0.3 + 0.25).sqrt();
            let a = (0.5f64).atan2(0.3).to_degrees();
            closed(vec![
                arc([0.0, 0.0], 0.5, 90.0, 180.0),
                arc([-0.3, 0.0], inner_r, -a, 2.0 * a),
            ])
        }
        "omega" => {
            let y = -0.5 * 60f64.to_radians().sin();
            open(vec![
                line([-0.5, y], [-0.25, y]),
                arc([0.0, 0.0], 0.5, 240.0, -300.0),
                line([0.25, y], [0.5, y]),
            ])
        }
        "triangle" => closed(polyline(&[[0.0, 0.5], [-0.5, -0.5], [0.5, -0.5], [0.0, 0.5]])),
        "star" => closed(polyline(&regular_polygon(5, 0.5, 90.0, 2.0))),
        "plus" => open(polyline(&[[0.0, 0.5], [0.0, -0.5], [-0.5, 0.0], [0.5, 0.0]])),
        "rectangle" => closed(polyline(&[[-0.5, 0.3], [-0.5, -0.3], [0.5, -0.3], [0.5, 0.3], [-0.5, 0.3]])),
        "at" => open(vec![
            arc([0.0, 0.0], 0.2, 0.0, 360.0),
            line([0.2, 0.0], [0.2, -0.2]),
            arc([0.35, -0.2], 0.15, 180.0, 180.0),
            arc([0.0, -0.2], 0.5, 0.0, 300.0),
        ]),
        "leaf" => {
            let r = (0.4f64 * 0.4 + 0.45 * 0.45).sqrt();
            let a = (0.45f64).atan2(0.4).to_degrees();
            open(vec![
                line([0.1, -0.7], [0.0, -0.45]),
                arc([0.4, 0.0], r, 180.0 + a, -2.0 * a),
                arc([-0.4, 0.0], r, a, -2.0 * a),
            ])
        }
        _ => None,
    }
}

fn unit_multi(label: &str) -> Option<Stroke> {
    let open = |pieces| Some(Stroke { pieces, closed: false });
    let ring = |center: V3, r: f64, start: f64| quartered(center, mul(X, r), mul(Z, r), start, 4);
    match label {
        "balloon" => {
            let mut p = quartered([0.0, 0.55, 0.0], mul(X, 0.3), mul(Y, 0.4), -FRAC_PI_2, 4);
            p.push(line3([0.0, 0.15, 0.0], [0.05, -0.5, 0.0]));
            open(p)
        }
        "cloud" => {
            let mut p = Vec::new();
            for k in 0..4 {
                let cx = -0.375 + 0.25 * k as f64;
                p.push(Piece::Arc {
                    center: [cx, 0.0, 0.0],
                    u: mul(X, 0.125),
                    v: mul(Y, 0.2),
                    start: PI,
                    sweep: -PI,
                });
            }
            p.push(Piece::Arc {
                center: [0.0, 0.0, 0.0],
                u: mul(X, 0.5),
                v: mul(Y, 0.25),
                start: 0.0,
                sweep: -PI,
            });
            open(p)
        }
        "bottle" => {
            let mut p = ring([0.0, 0.0, 0.0], 0.3, 0.0);
            p.extend(polyline3(&[[0.3, 0.0, 0.0], [0.3, 0.55, 0.0], [0.1, 0.75, 0.0], [0.1, 1.0, 0.0]]));
            p.extend(ring([0.0, 1.0, 0.0], 0.1, 0.0));
            open(p)
        }
        "hemisphere" => {
            let mut p = ring([0.0, 0.0, 0.0], 0.5, 0.0);
            p.extend(quartered([0.0, 0.0, 0.0], mul(X, 0.5), mul(Y, 0.5), 0.0, 2));
            p.push(line3([-0.5, 0.0, 0.0], [0.0, 0.0, -0.5]));
            p.extend(quartered([0.0, 0.0, 0.0], mul(Z, -0.5), mul(Y, 0.5), 0.0, 2));
            open(p)
        }
        "heart-3d" => {
            let front = unit_single("heart")?.pieces;
            let side: Vec<Piece> = front
                .iter()
                .map(|pc| match *pc {
                    Piece::Line { a, b } => Piece::Line { a: [0.0, a[1], a[0]], b: [0.0, b[1], b[0]] },
                    Piece::Arc { center, u, v, start, sweep } => Piece::Arc {
                        center: [0.0, center[1], center[0]],
                        u: [0.0, u[1], u[0]],
                        v: [0.0, v[1], v[0]],
                        start,
                        sweep,
                    },
                    ref other => other.clone(),
                })
                .collect();
            let mut p = front;
            p.extend(side);
            open(p)
        }
        "house-3d" => {
            let face = |z: f64| -> Vec<V3> {
                vec![[-0.4, -0.5, z], [-0.4, 0.1, z], [0.0, 0.5, z], [0.4, 0.1, z], [0.4, -0.5, z], [-0.4, -0.5, z]]
            };
            let mut pts = face(0.0);
            pts.extend(face(0.6));
            pts.push([0.0, 0.5, 0.6]);
            pts.push([0.0, 0.5, 0.0]);
            open(polyline3(&pts))
        }
        "square-pyramid" => {
            let c = [[-0.5, 0.0, -0.5], [0.5, 0.0, -0.5], [0.5, 0.0, 0.5], [-0.5, 0.0, 0.5]];
            let apex = [0.0, 0.8, 0.0];
            open(polyline3(&[c[0], c[1], c[2], c[3], c[0], apex, c[2], c[1], apex, c[3]]))
        }
        "spiral" => open(vec![Piece::Spiral {
            base: [0.0, 0.0, 0.0],
            r0: 0.35,
            r1: 0.35,
            y0: 0.0,
            y1: 1.0,
            start: 0.0,
            sweep: 3.0 * TAU,
        }]),
        "pipe" => {
            let yz_ring = |x: f64| quartered([x, 0.0, 0.0], mul(Y, 0.25), mul(Z, 0.25), 0.0, 4);
            let mut p = yz_ring(-0.5);
            p.push(line3([-0.5, 0.25, 0.0], [0.5, 0.25, 0.0]));
            p.extend(yz_ring(0.5));
            open(p)
        }
        "pyramid-3d" => {
            let c = [[-0.5, 0.0, -0.35], [0.5, 0.0, -0.35], [0.0, 0.0, 0.5]];
            let apex = [0.0, 0.9, 0.0];
            open(polyline3(&[c[0], c[1], c[2], c[0], apex, c[1], apex, c[2]]))
        }
        "tree" => open(polyline3(&[
            [0.0, -0.5, 0.0],
            [0.0, 0.0, 0.0],
            [-0.4, 0.0, 0.0],
            [0.0, 0.7, 0.0],
            [0.4, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, -0.3],
            [0.0, 0.7, 0.0],
            [0.0, 0.0, 0.3],
        ])),
        _ => None,
    }
}

/// Stroke of one class at the given dimensions; `None` for an unknown label.
pub(crate) fn stroke(label: &str, d: &Dims) -> Option<Stroke> {
    let r = d.diameter / 2.0;
    let h = d.height;
    let parametric = match label {
        "cylinder" => {
            let mut p = quartered([0.0, 0.0, 0.0], mul(X, r), mul(Z, r), 0.0, 4);
            p.push(line3([r, 0.0, 0.0], [r, h, 0.0]));
            Some(p)
        }
        "cone" => Some(vec![
            Piece::Spiral { base: [0.0, 0.0, 0.0], r0: r, r1: 0.0, y0: 0.0, y1: h, start: 0.0, sweep: 2.0 * TAU },
            line3([0.0, h, 0.0], [r, 0.0, 0.0]),
        ]),
        "sphere" => {
            // a vertical great circle from the bottom, then the equator
            let mut p = quartered([0.0, r, 0.0], mul(X, r), mul(Y, r), -FRAC_PI_2, 4);
            p.push(line3([0.0, 0.0, 0.0], [r, r, 0.0]));
            p.extend(quartered([0.0, r, 0.0], mul(X, r), mul(Z, r), 0.0, 4));
            Some(p)
        }
        "cube" => {
            let s = h / 2.0;
            Some(polyline3(&[
                [-s, h, -s],
                [s, h, -s],
                [s, h, s],
                [-s, h, s],
                [-s, h, -s],
                [s, h, -s],
                [s, 0.0, -s],
                [s, 0.0, s],
                [s, h, s],
            ]))
        }
        _ => None,
    };
    if let Some(pieces) = parametric {
        return Some(Stroke { pieces, closed: false });
    }
    let unit = unit_single(label).or_else(|| unit_multi(label))?;
    Some(Stroke {
        pieces: unit.pieces.iter().map(|p| p.scaled(d.size)).collect(),
        closed: unit.closed,
    })
}

/// Samples a stroke with about `frames` points, spending time on each piece in
/// proportion to its length. `warp` maps `[0, 1]` onto itself monotonically.
pub(crate) fn sample_stroke(pieces: &[Piece], frames: usize, warp: &dyn Fn(usize, f64) -> f64) -> Vec<V3> {
    let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
    let total: f64 = lengths.iter().sum();
    let steps = frames.saturating_sub(1).max(pieces.len());
    let mut out = vec![pieces[0].at(0.0)];
    for (i, (p, len)) in pieces.iter().zip(&lengths).enumerate() {
        let k = ((steps as f64 * len / total).round() as usize).max(1);
        for j in 1..=k {
            let s = if j == k { 1.0 } else { warp(i, j as f64 / k as f64) };
            out.push(p.at(s));
        }
    }
    out
}

/// Rotates a closed stroke so it starts a fraction `phase` of the way along.
pub(crate) fn shift_start(pieces: &[Piece], phase: f64) -> Vec<Piece> {
    if phase <= 0.0 {
        return pieces.to_vec();
    }
    let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
    let target = phase.min(1.0) * lengths.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, len) in lengths.iter().enumerate() {
        if acc + len > target {
            let (head, tail) = pieces[i].split((target - acc) / len);
            let mut out = vec![tail];
            out.extend_from_slice(&pieces[i + 1..]);
            out.extend_from_slice(&pieces[..i]);
            out.push(head);
            return out;
        }
        acc += len;
    }
    pieces.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::SHAPES;

    const DIMS: Dims = Dims { size: 100.0, height: 120.0, diameter: 70.0 };

    #[test]
    fn every_label_has_a_continuous_stroke() {
        for s in SHAPES {
            let st = stroke(s.label, &DIMS).unwrap_or_else(|| panic!("{}", s.label));
            for w in st.pieces.windows(2) {
                let gap = dist(w[0].at(1.0), w[1].at(0.0));
                assert!(gap < 1e-9, "{}: gap {gap}", s.label);
            }
            if st.closed {
                let first = st.pieces[0].at(0.0);
                let last = st.pieces.last().unwrap().at(1.0);
                assert!(dist(first, last) < 1e-9, "{} not closed", s.label);
            }
        }
        assert!(stroke("hexagon", &DIMS).is_none());
    }

    #[test]
    fn shift_preserves_length_and_closure() {
        let st = stroke("heart", &DIMS).unwrap();
        let total: f64 = st.pieces.iter().map(Piece::length).sum();
        let shifted = shift_start(&st.pieces, 0.3);
        let total2: f64 = shifted.iter().map(Piece::length).sum();
        assert!((total - total2).abs() < 1e-4 * total);
        for w in shifted.windows(2) {
            assert!(dist(w[0].at(1.0), w[1].at(0.0)) < 1e-9);
        }
    }

    #[test]
    fn sampled_extremes_are_exact() {
        let st = stroke("cylinder", &DIMS).unwrap();
        let pts = sample_stroke(&st.pieces, 90, &|_, u| u);
        let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        let span = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
        assert!((span - 120.0).abs() < 1e-9);
    }
}
