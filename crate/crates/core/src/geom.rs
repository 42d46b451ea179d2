//! Points, closed axis-aligned boxes and closed balls in three dimensions.
//!
//! Every predicate here uses closed boundaries: a point on a box face or on a
//! sphere surface is inside. The indices and the brute-force oracle all go
//! through these predicates, so they agree on boundary records by
//! construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spatial dimensions. Fixed.
pub const DIMS: usize = 3;

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    /// Builds a point, rejecting NaN and infinite components.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Point3 { x, y, z };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite(format!("point ({x}, {y}, {z})")))
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component along `axis` (0 = x, 1 = y, 2 = z).
    #[inline]
    pub fn coord(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis {axis} out of range"),
        }
    }

    #[inline]
    pub fn coord_mut(&mut self, axis: usize) -> &mut f64 {
        match axis {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("axis {axis} out of range"),
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn distance_squared(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    #[inline]
    fn component_min(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    #[inline]
    fn component_max(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }
}

/// Closed axis-aligned box `[min.x, max.x] x [min.y, max.y] x [min.z, max.z]`.
///
/// Zero-extent sides are allowed, so a single point is a valid box.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    /// Builds a box from corners without validation.
    ///
    /// Callers are responsible for `min <= max` on every axis; use
    /// [`Aabb::try_new`] for untrusted input.
    #[inline]
    pub const fn new(min: Point3, max: Point3) -> Self {
        Aabb { min, max }
    }

    pub fn try_new(min: Point3, max: Point3) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::NonFinite(format!("box {min:?}..{max:?}")));
        }
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(Error::InvertedBox { min, max });
        }
        Ok(Aabb { min, max })
    }

    /// `[lo, hi]^3`.
    pub fn cube(lo: f64, hi: f64) -> Self {
        Aabb::new(Point3::new(lo, lo, lo), Point3::new(hi, hi, hi))
    }

    /// Cube of side `side` centered on `center`.
    pub fn centered_cube(center: Point3, side: f64) -> Self {
        let h = 0.5 * side;
        Aabb::new(
            Point3::new(center.x - h, center.y - h, center.z - h),
            Point3::new(center.x + h, center.y + h, center.z + h),
        )
    }

    #[inline]
    pub fn from_point(p: Point3) -> Self {
        Aabb { min: p, max: p }
    }

    /// Tight bounding box of a set of points; `None` when empty.
    pub fn enclosing<I: IntoIterator<Item = Point3>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Aabb::from_point(first);
        for p in it {
            b.expand_to_point(p);
        }
        Some(b)
    }

    #[inline]
    pub fn expand_to_point(&mut self, p: Point3) {
        self.min = self.min.component_min(p);
        self.max = self.max.component_max(p);
    }

    #[inline]
    pub fn expand_to_box(&mut self, b: &Aabb) {
        self.min = self.min.component_min(b.min);
        self.max = self.max.component_max(b.max);
    }

    #[inline]
    pub fn union(&self, b: &Aabb) -> Aabb {
        let mut u = *self;
        u.expand_to_box(b);
        u
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.min.x <= self.max.x
            && self.min.y <= self.max.y
            && self.min.z <= self.max.z
    }

    #[inline]
    pub fn center(&self) -> Point3 {
        Point3::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y), 0.5 * (self.min.z + self.max.z))
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> f64 {
        self.max.coord(axis) - self.min.coord(axis)
    }

    /// Axis of the longest side; ties go to the lowest axis index.
    pub fn longest_axis(&self) -> usize {
        let mut best = 0;
        for axis in 1..DIMS {
            if self.extent(axis) > self.extent(best) {
                best = axis;
            }
        }
        best
    }

    pub fn max_extent(&self) -> f64 {
        self.extent(self.longest_axis())
    }

    pub fn volume(&self) -> f64 {
        self.extent(0) * self.extent(1) * self.extent(2)
    }

    /// Closed containment: boundary points are inside.
    #[inline]
    pub fn contains_point(&self, p: &Point3) -> bool {
        self.min.x <= p.x
            && p.x <= self.max.x
            && self.min.y <= p.y
            && p.y <= self.max.y
            && self.min.z <= p.z
            && p.z <= self.max.z
    }

    /// Closed overlap: boxes touching on a face, edge or corner intersect.
    #[inline]
    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
            && self.min.z <= other.max.z
            && other.min.z <= self.max.z
    }

    /// `other` lies entirely inside `self`.
    #[inline]
    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.min.x <= other.min.x
            && other.max.x <= self.max.x
            && self.min.y <= other.min.y
            && other.max.y <= self.max.y
            && self.min.z <= other.min.z
            && other.max.z <= self.max.z
    }

    /// Squared distance from `p` to the closest point of the box (0 inside).
    #[inline]
    pub fn distance_squared_to_point(&self, p: &Point3) -> f64 {
        let mut d = 0.0;
        for axis in 0..DIMS {
            let c = p.coord(axis);
            let lo = self.min.coord(axis);
            let hi = self.max.coord(axis);
            let delta = if c < lo {
                lo - c
            } else if c > hi {
                c - hi
            } else {
                0.0
            };
            d += delta * delta;
        }
        d
    }

    /// Squared distance from `p` to the farthest corner of the box.
    #[inline]
    pub fn max_distance_squared_to_point(&self, p: &Point3) -> f64 {
        let mut d = 0.0;
        for axis in 0..DIMS {
            let c = p.coord(axis);
            let delta = (c - self.min.coord(axis)).abs().max((self.max.coord(axis) - c).abs());
            d += delta * delta;
        }
        d
    }
}

/// Closed ball.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point3,
    pub radius: f64,
}

impl Sphere {
    #[inline]
    pub const fn new(center: Point3, radius: f64) -> Self {
        Sphere { center, radius }
    }

    pub fn try_new(center: Point3, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(Error::NonFinite(format!("sphere {center:?} r={radius}")));
        }
        if radius < 0.0 {
            return Err(Error::NegativeRadius(radius));
        }
        Ok(Sphere { center, radius })
    }

    #[inline]
    pub fn contains_point(&self, p: &Point3) -> bool {
        self.center.distance_squared(p) <= self.radius * self.radius
    }

    /// Closed ball touches the box.
    #[inline]
    pub fn intersects_box(&self, b: &Aabb) -> bool {
        b.distance_squared_to_point(&self.center) <= self.radius * self.radius
    }

    /// The whole box lies inside the ball.
    #[inline]
    pub fn contains_box(&self, b: &Aabb) -> bool {
        b.max_distance_squared_to_point(&self.center) <= self.radius * self.radius
    }
}

#[inline]
pub fn box_contains_point(b: &Aabb, p: &Point3) -> bool {
    b.contains_point(p)
}

#[inline]
pub fn box_intersects_box(a: &Aabb, b: &Aabb) -> bool {
    a.intersects(b)
}

#[inline]
pub fn sphere_contains_point(s: &Sphere, p: &Point3) -> bool {
    s.contains_point(p)
}

/// Smallest ball containing `b`: centered on the box midpoint with radius
/// equal to half the diagonal.
///
/// The radius is rounded up until every corner tests inside under
/// [`Sphere::contains_point`], so the closed-ball filter never drops a box
/// corner to floating-point rounding.
pub fn enclosing_sphere(b: &Aabb) -> Sphere {
    let center = b.center();
    let r2 = b.max_distance_squared_to_point(&center);
    let mut radius = r2.sqrt();
    while radius * radius < r2 {
        radius = radius.next_up();
    }
    Sphere { center, radius }
}
