//! Angles, closed arcs, and feasible heading ranges on the unit circle.
//!
//! Headings are normalized to `[0, 2π)`. An [`Arc`] is a closed interval of
//! headings; wrap through zero is encoded by letting the end exceed `2π`
//! (e.g. `[3π/2, 5π/2]` covers `3π/2..2π` and `0..π/2`). A neighbor at
//! bearing `θ` forbids every heading with a positive component toward it,
//! leaving the closed half circle `[θ + π/2, θ + 3π/2]`; the planner folds
//! such constraints together with [`FeasibleRange::intersect`].

use crate::error::{Error, Result};
use crate::vec::Vec2;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Aligned overlaps shorter than this (in radians, negative length) are
/// treated as empty; overlaps in `[-EMPTY_OVERLAP_TOL, 0]` collapse to a
/// single-point arc so that floating-point boundary contact cannot
/// spuriously zero an agent's velocity.
pub const EMPTY_OVERLAP_TOL: f64 = 1e-12;

/// A heading, normalized to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(f64);

impl Angle {
    /// Normalizes `raw` into `[0, 2π)`. Normalization is idempotent.
    pub fn normalize(raw: f64) -> Result<Angle> {
        if !raw.is_finite() {
            return Err(Error::NonFiniteAngle { value: raw });
        }
        let mut v = raw.rem_euclid(TAU);
        // rem_euclid can round a tiny negative input up to exactly 2π.
        if v >= TAU {
            v = 0.0;
        }
        Ok(Angle(v))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Quadrant-correct heading of the vector `to - from`, normalized.
pub fn bearing(from: Vec2, to: Vec2) -> Result<Angle> {
    let d = to - from;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::DegenerateBearing);
    }
    Angle::normalize(d.y.atan2(d.x))
}

/// The closed half circle of headings that do not approach a neighbor at
/// bearing `theta`: `[θ + π/2, θ + 3π/2]`, length exactly π.
pub fn half_circle_constraint(theta: Angle) -> Arc {
    let start = match Angle::normalize(theta.radians() + FRAC_PI_2) {
        Ok(a) => a.radians(),
        // theta is already normalized and finite.
        Err(_) => unreachable!(),
    };
    Arc {
        start,
        end: start + PI,
    }
}

/// A closed arc of headings in canonical form: `start ∈ [0, 2π)`,
/// `start ≤ end ≤ start + 2π`. Equality is representation-level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: f64,
    end: f64,
}

impl Arc {
    /// Builds the closed arc from `start_raw` to `end_raw` (a real-line
    /// interval; its length must lie in `[0, 2π]`). The representative is
    /// canonicalized so that `start ∈ [0, 2π)`.
    pub fn from_endpoints(start_raw: f64, end_raw: f64) -> Result<Arc> {
        if !start_raw.is_finite() {
            return Err(Error::NonFiniteAngle { value: start_raw });
        }
        if !end_raw.is_finite() {
            return Err(Error::NonFiniteAngle { value: end_raw });
        }
        let length = end_raw - start_raw;
        if !(0.0..=TAU).contains(&length) {
            return Err(Error::InvalidParams(format!(
                "arc length {length} outside [0, 2π]"
            )));
        }
        let start = Angle::normalize(start_raw)?.radians();
        Ok(Arc {
            start,
            end: start + length,
        })
    }

    /// The single-point arc `{angle}`.
    pub fn degenerate(angle: Angle) -> Arc {
        Arc {
            start: angle.radians(),
            end: angle.radians(),
        }
    }

    pub fn start(self) -> f64 {
        self.start
    }

    pub fn end(self) -> f64 {
        self.end
    }

    pub fn length(self) -> f64 {
        self.end - self.start
    }

    pub fn is_degenerate(self) -> bool {
        self.end == self.start
    }

    /// Closed membership: some `k ∈ {0, 1}` gives `start ≤ φ + 2πk ≤ end`.
    pub fn contains(self, phi: Angle) -> bool {
        let v = phi.radians();
        (v >= self.start && v <= self.end) || v + TAU <= self.end
    }
}

/// The set of permissible headings: everything, a single closed arc, or
/// nothing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeasibleRange {
    Full,
    Arc(Arc),
    Empty,
}

impl FeasibleRange {
    pub fn is_empty(self) -> bool {
        matches!(self, FeasibleRange::Empty)
    }

    pub fn contains(self, phi: Angle) -> bool {
        match self {
            FeasibleRange::Full => true,
            FeasibleRange::Arc(arc) => arc.contains(phi),
            FeasibleRange::Empty => false,
        }
    }

    /// Intersects the accumulated range with one more constraint arc.
    ///
    /// Representatives are aligned by shifting the constraint by
    /// `{0, -2π, +2π}`; each alignment with overlap `[max(α1, β1),
    /// min(α2, β2)]` of non-negative length (within [`EMPTY_OVERLAP_TOL`])
    /// yields a candidate, and the longest candidate wins. Ties keep the
    /// earliest alignment (unshifted first); this matters only in the
    /// antipodal-constraint case where the true set is a pair of opposite
    /// boundary points and a single arc cannot hold both.
    ///
    /// The set intersection is a single arc whenever the operand lengths
    /// sum to at most 2π, which holds for every planner call (the
    /// accumulator never exceeds π once a constraint has been applied and
    /// constraints are exactly π). Outside that domain the longer
    /// component is returned.
    pub fn intersect(self, constraint: &Arc) -> FeasibleRange {
        let acc = match self {
            FeasibleRange::Full => return FeasibleRange::Arc(*constraint),
            FeasibleRange::Empty => return FeasibleRange::Empty,
            FeasibleRange::Arc(arc) => arc,
        };
        let mut best: Option<Arc> = None;
        for shift in [0.0, -TAU, TAU] {
            let lo = acc.start.max(constraint.start + shift);
            let hi = acc.end.min(constraint.end + shift);
            if hi - lo < -EMPTY_OVERLAP_TOL {
                continue;
            }
            let candidate = if hi >= lo {
                match Arc::from_endpoints(lo, hi) {
                    Ok(a) => a,
                    Err(_) => continue,
                }
            } else {
                // Boundary contact within tolerance: collapse to the
                // max-of-starts point.
                match Angle::normalize(lo) {
                    Ok(a) => Arc::degenerate(a),
                    Err(_) => continue,
                }
            };
            if best.is_none_or(|b| candidate.length() > b.length()) {
                best = Some(candidate);
            }
        }
        match best {
            Some(arc) => FeasibleRange::Arc(arc),
            None => FeasibleRange::Empty,
        }
    }

    /// The lower limit of the range: the arc start, or 0 for the full
    /// circle (by convention; a full range always contains the goal
    /// heading, so the planner never consults this case).
    pub fn lower_bound(self) -> Result<Angle> {
        match self {
            FeasibleRange::Full => Angle::normalize(0.0),
            FeasibleRange::Arc(arc) => Angle::normalize(arc.start()),
            FeasibleRange::Empty => Err(Error::NoFeasibleDirection),
        }
    }
}
