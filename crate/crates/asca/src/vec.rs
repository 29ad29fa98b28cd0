//! Minimal 2D/3D vector types shared by the planner, simulator, and
//! scenario generators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Common surface for 2D and 3D coordinates so the simulation loop,
/// scenario checks, and metrics can be written once.
///
/// `coords` pads unused slots with zero; `from_coords` ignores them.
pub trait Coord:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const DIMS: usize;

    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
    fn coords(self) -> [f64; 3];
    fn from_coords(c: [f64; 3]) -> Self;

    fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Coord for Vec2 {
    const DIMS: usize = 2;

    fn zero() -> Vec2 {
        Vec2::ZERO
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn coords(self) -> [f64; 3] {
        [self.x, self.y, 0.0]
    }

    fn from_coords(c: [f64; 3]) -> Vec2 {
        Vec2::new(c[0], c[1])
    }
}

impl Coord for Vec3 {
    const DIMS: usize = 3;

    fn zero() -> Vec3 {
        Vec3::ZERO
    }

    fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn coords(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn from_coords(c: [f64; 3]) -> Vec3 {
        Vec3::new(c[0], c[1], c[2])
    }
}
