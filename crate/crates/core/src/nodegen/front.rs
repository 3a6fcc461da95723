//! Advancing-front fill of a rectangle with variable-density nodes.
//!
//! A front of potential node positions is kept ordered left to right. The
//! lowest position becomes a node, the positions it covers are removed and
//! five new ones are spread over the arc between the surviving neighbours.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::radius::Radius;
use crate::error::{invalid, Result};
use crate::{dist2, Point};

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(max[0] > min[0] && max[1] > min[1]) {
            return invalid(format!("degenerate rectangle {min:?}–{max:?}"));
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: &Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }
}

const NEW_POSITIONS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const FILL_SEED: u64 = 0x5eed_f111;

/// Fills `rect` with nodes spaced according to `radius`.
pub fn advancing_front_fill(rect: &Rect, radius: &Radius) -> Result<Vec<Point>> {
    Rect::new(rect.min, rect.max)?;

    // initial front along the bottom edge, finer than the local spacing
    let samples = 64;
    let mut rmin = f64::INFINITY;
    for i in 0..=samples {
        let x = rect.min[0] + rect.width() * i as f64 / samples as f64;
        rmin = rmin.min(radius.at(&[x, rect.min[1]]));
    }
    if !(rmin > 0.0) {
        return invalid("radius function must be positive");
    }
    let count = ((rect.width() / (0.25 * rmin)).ceil() as usize).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(FILL_SEED);
    let mut front: Vec<Point> = (0..=count)
        .map(|i| {
            let x = rect.min[0] + rect.width() * i as f64 / count as f64;
            // tiny vertical jitter so that the lowest position is unique
            [x, rect.min[1] + 1e-4 * rmin * rng.gen::<f64>()]
        })
        .collect();

    let mut nodes = Vec::new();
    loop {
        let Some((i, lowest)) = front
            .iter()
            .enumerate()
            .min_by(|a, b| a.1[1].total_cmp(&b.1[1]).then(a.0.cmp(&b.0)))
            .map(|(i, p)| (i, *p))
        else {
            break;
        };
        if lowest[1] > rect.max[1] {
            break;
        }
        nodes.push(lowest);
        let r = radius.at(&lowest);
        let r2 = r * r;

        let left = (0..i).rev().find(|&k| dist2(&front[k], &lowest) > r2);
        let right = (i + 1..front.len()).find(|&k| dist2(&front[k], &lowest) > r2);
        let angle_to = |k: usize| (front[k][1] - lowest[1]).atan2(front[k][0] - lowest[0]);
        // without a neighbour the arc ends where the circle meets the side
        let side = |x: f64| ((x - lowest[0]) / r).clamp(-1.0, 1.0).acos();
        let ang_left = left.map_or_else(|| side(rect.min[0]), angle_to);
        let ang_right = right.map_or_else(|| side(rect.max[0]), angle_to);

        let fresh: Vec<Point> = NEW_POSITIONS
            .iter()
            .map(|f| {
                let a = ang_left - f * (ang_left - ang_right);
                [lowest[0] + r * a.cos(), lowest[1] + r * a.sin()]
            })
            .filter(|p| p[0] >= rect.min[0] && p[0] <= rect.max[0])
            .collect();
        let lo = left.map_or(0, |k| k + 1);
        let hi = right.unwrap_or(front.len());
        front.splice(lo..hi, fresh);
    }
    Ok(nodes)
}
