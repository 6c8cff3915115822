use serde::{Deserialize, Serialize};

use super::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wall {
    Left,
    Right,
    Top,
    Bottom,
}

/// Box, ball and target. Units are pixels and pixels per step; y grows downward.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BounceWorld {
    pub box_min: [f64; 2],
    pub box_max: [f64; 2],
    pub ball: [f64; 2],
    pub ball_radius: f64,
    pub velocity: [f64; 2],
    pub target: [f64; 2],
    pub target_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounce {
    /// Step during which the contact happened (1-based: position index after it).
    pub step: usize,
    pub wall: Wall,
    /// Ball centre at the moment of contact.
    pub point: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BounceOutcome {
    /// Ball centre at t = 0, 1, ...
    pub positions: Vec<[f64; 2]>,
    /// Velocity in effect after each step (same length as `positions`).
    pub velocities: Vec<[f64; 2]>,
    pub bounces: Vec<Bounce>,
    /// Index into `positions` of the first position inside the target disc.
    pub hit: Option<usize>,
}

impl BounceOutcome {
    pub fn hit(&self) -> bool {
        self.hit.is_some()
    }
}

impl BounceWorld {
    /// Centre-position limits after shrinking the box by the ball radius.
    pub fn limits(&self) -> ([f64; 2], [f64; 2]) {
        let r = self.ball_radius;
        ([self.box_min[0] + r, self.box_min[1] + r], [self.box_max[0] - r, self.box_max[1] - r])
    }

    pub fn check(&self) -> Result<(), SolveError> {
        let (lo, hi) = self.limits();
        if self.velocity[0] == 0.0 && self.velocity[1] == 0.0 {
            return Err(SolveError::InvalidInput("velocity must be non-zero".into()));
        }
        if !(lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(SolveError::InvalidInput("box is smaller than the ball".into()));
        }
        let inside = |p: [f64; 2], m: f64| p[0] > lo[0] - m && p[0] < hi[0] + m && p[1] > lo[1] - m && p[1] < hi[1] + m;
        if !inside(self.ball, 0.0) {
            return Err(SolveError::InvalidInput("ball must start strictly inside the box".into()));
        }
        if !inside(self.target, self.ball_radius) {
            return Err(SolveError::InvalidInput("target must lie inside the box".into()));
        }
        if self.velocity[0].abs() >= hi[0] - lo[0] || self.velocity[1].abs() >= hi[1] - lo[1] {
            return Err(SolveError::InvalidInput("speed exceeds the box size per step".into()));
        }
        Ok(())
    }

    fn in_target(&self, p: [f64; 2]) -> bool {
        let (dx, dy) = (p[0] - self.target[0], p[1] - self.target[1]);
        dx * dx + dy * dy <= self.target_radius * self.target_radius
    }
}

/// Elastic point-ball simulation. Wall contacts inside a step are resolved
/// exactly by reflecting the overshoot; the run stops at the first step that
/// ends inside the target disc or after `horizon` steps.
pub fn simulate_bounce(w: &BounceWorld, horizon: usize) -> Result<BounceOutcome, SolveError> {
    w.check()?;
    let (lo, hi) = w.limits();
    let mut p = w.ball;
    let mut v = w.velocity;
    let mut out = BounceOutcome { positions: vec![p], velocities: vec![v], bounces: Vec::new(), hit: None };
    if w.in_target(p) {
        out.hit = Some(0);
        return Ok(out);
    }
    for step in 1..=horizon {
        let start = p;
        let mut next = [p[0] + v[0], p[1] + v[1]];
        let mut events: Vec<(f64, Bounce)> = Vec::new();
        for axis in 0..2 {
            let (wall, bound) = if next[axis] < lo[axis] {
                (if axis == 0 { Wall::Left } else { Wall::Top }, lo[axis])
            } else if next[axis] > hi[axis] {
                (if axis == 0 { Wall::Right } else { Wall::Bottom }, hi[axis])
            } else {
                continue;
            };
            let s = (bound - start[axis]) / v[axis];
            events.push((s, Bounce { step, wall, point: [0.0, 0.0] }));
            next[axis] = 2.0 * bound - next[axis];
            v[axis] = -v[axis];
        }
        // Contact points, in time order; the other axis may already have flipped.
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vel = [v[0], v[1]];
        for (_, e) in &events {
            // Undo flips to recover the pre-step velocity.
            match e.wall {
                Wall::Left | Wall::Right => vel[0] = -vel[0],
                Wall::Top | Wall::Bottom => vel[1] = -vel[1],
            }
        }
        let mut pos = start;
        let mut t_prev = 0.0;
        for (s, mut e) in events {
            let dt = s - t_prev;
            pos = [pos[0] + vel[0] * dt, pos[1] + vel[1] * dt];
            match e.wall {
                Wall::Left | Wall::Right => vel[0] = -vel[0],
                Wall::Top | Wall::Bottom => vel[1] = -vel[1],
            }
            e.point = pos;
            out.bounces.push(e);
            t_prev = s;
        }
        p = next;
        out.positions.push(p);
        out.velocities.push(v);
        if w.in_target(p) {
            out.hit = Some(step);
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(ball: [f64; 2], velocity: [f64; 2], target: [f64; 2]) -> BounceWorld {
        BounceWorld { box_min: [0.0, 0.0], box_max: [400.0, 300.0], ball, ball_radius: 10.0, velocity, target, target_radius: 15.0 }
    }

    #[test]
    fn straight_shot() {
        let out = simulate_bounce(&world([50.0, 150.0], [6.0, 0.0], [200.0, 150.0]), 500).unwrap();
        assert!(out.hit());
        assert!(out.bounces.is_empty());
    }

    #[test]
    fn one_bounce_matches_mirror_image() {
        // Mirror target across the right wall's centre line x = 390.
        let (ball, target): ([f64; 2], [f64; 2]) = ([100.0, 100.0], [300.0, 220.0]);
        let mirrored = [2.0 * 390.0 - target[0], target[1]];
        let (dx, dy) = (mirrored[0] - ball[0], mirrored[1] - ball[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let v = [dx / len * 7.0, dy / len * 7.0];
        let out = simulate_bounce(&world(ball, v, target), 1000).unwrap();
        assert!(out.hit());
        assert_eq!(out.bounces.len(), 1);
        let s = (390.0 - ball[0]) / dx;
        let predicted = [390.0, ball[1] + s * dy];
        let got = out.bounces[0].point;
        assert!((got[0] - predicted[0]).abs() < 1e-6 && (got[1] - predicted[1]).abs() < 1e-6, "{got:?} vs {predicted:?}");
    }

    #[test]
    fn mirrored_world_gives_mirrored_trajectory() {
        let a = world([60.0, 80.0], [5.5, 3.25], [330.0, 260.0]);
        let b = BounceWorld { ball: [400.0 - a.ball[0], a.ball[1]], velocity: [-a.velocity[0], a.velocity[1]], target: [400.0 - a.target[0], a.target[1]], ..a };
        let (oa, ob) = (simulate_bounce(&a, 300).unwrap(), simulate_bounce(&b, 300).unwrap());
        assert_eq!(oa.positions.len(), ob.positions.len());
        for (p, q) in oa.positions.iter().zip(&ob.positions) {
            assert!((p[0] - (400.0 - q[0])).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn speed_is_conserved() {
        let out = simulate_bounce(&world([200.0, 150.0], [7.3, -5.1], [-100.0, -100.0]), 400);
        assert!(out.is_err()); // target outside the box
        let mut w = world([200.0, 150.0], [7.3, -5.1], [30.0, 30.0]);
        w.target_radius = 0.5;
        let out = simulate_bounce(&w, 400).unwrap();
        let s0 = (7.3f64 * 7.3 + 5.1 * 5.1).sqrt();
        assert!(out.bounces.len() > 3);
        for v in &out.velocities {
            let s = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!((s - s0).abs() / s0 < 1e-9);
        }
        let (lo, hi) = w.limits();
        assert!(out.positions.iter().all(|p| p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]));
    }

    #[test]
    fn zero_velocity_rejected() {
        assert!(simulate_bounce(&world([50.0, 50.0], [0.0, 0.0], [100.0, 100.0]), 10).is_err());
    }
}
