//! Configurations, polygonal workspaces and the collision predicates shared by
//! every planner.
//!
//! The robot is a disk of `robot_radius`. A configuration is free when the
//! disk stays inside the bounds and its center is strictly farther than
//! `robot_radius` from every obstacle. Obstacles are closed sets, so a disk
//! that touches an obstacle is in collision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A robot placement in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Configuration {
    pub x: f64,
    pub y: f64,
}

impl Configuration {
    /// Panics on non-finite coordinates; use [`Configuration::try_new`] for
    /// untrusted input.
    pub fn new(x: f64, y: f64) -> Self {
        Self::try_new(x, y).expect("configuration coordinates must be finite")
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::InvalidConfiguration(format!("({x}, {y})")))
        }
    }

    pub fn distance(&self, other: &Configuration) -> f64 {
        distance(*self, *other)
    }

    pub(crate) fn distance_sq(&self, other: &Configuration) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    pub fn lerp(&self, other: &Configuration, t: f64) -> Configuration {
        Configuration {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }

    /// Point at `length` from `self` in direction `angle` (radians).
    pub fn offset_polar(&self, length: f64, angle: f64) -> Configuration {
        Configuration {
            x: self.x + length * angle.cos(),
            y: self.y + length * angle.sin(),
        }
    }
}

impl TryFrom<[f64; 2]> for Configuration {
    type Error = Error;

    fn try_from(value: [f64; 2]) -> Result<Self> {
        Self::try_new(value[0], value[1])
    }
}

impl From<Configuration> for [f64; 2] {
    fn from(c: Configuration) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Euclidean distance. Computed as the square root of the squared distance so
/// that orderings by either quantity agree.
pub fn distance(a: Configuration, b: Configuration) -> f64 {
    a.distance_sq(&b).sqrt()
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Configuration, a: Configuration, b: Configuration) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len_sq = abx * abx + aby * aby;
    if len_sq == 0.0 {
        return distance(p, a);
    }
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len_sq).clamp(0.0, 1.0);
    distance(p, a.lerp(&b, t))
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn square(size: f64) -> Self {
        Self::new(0.0, 0.0, size, size)
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, p: Configuration) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.min_x >= self.min_x
            && other.max_x <= self.max_x
            && other.min_y >= self.min_y
            && other.max_y <= self.max_y
    }

    fn inflate(&self, by: f64) -> Rect {
        Rect::new(
            self.min_x - by,
            self.min_y - by,
            self.max_x + by,
            self.max_y + by,
        )
    }

    fn is_valid(&self) -> bool {
        [self.min_x, self.min_y, self.max_x, self.max_y]
            .iter()
            .all(|v| v.is_finite())
            && self.max_x > self.min_x
            && self.max_y > self.min_y
    }
}

/// Simple polygon, stored counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Configuration>", into = "Vec<Configuration>")]
pub struct Polygon {
    vertices: Vec<Configuration>,
    aabb: Rect,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Configuration>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let area = signed_area(&vertices);
        if area == 0.0 || !area.is_finite() {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if is_self_intersecting(&vertices) {
            return Err(Error::InvalidPolygon("self-intersecting".into()));
        }
        let aabb = bounding_box(&vertices);
        Ok(Self { vertices, aabb })
    }

    /// Axis-aligned rectangle as a polygon.
    pub fn rectangle(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        Self::new(vec![
            Configuration::try_new(min_x, min_y)?,
            Configuration::try_new(max_x, min_y)?,
            Configuration::try_new(max_x, max_y)?,
            Configuration::try_new(min_x, max_y)?,
        ])
    }

    pub fn vertices(&self) -> &[Configuration] {
        &self.vertices
    }

    pub fn bounding_box(&self) -> Rect {
        self.aabb
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Configuration {
        let a = signed_area(&self.vertices);
        let (mut cx, mut cy) = (0.0, 0.0);
        for (p, q) in self.edges() {
            let cross = p.x * q.y - q.x * p.y;
            cx += (p.x + q.x) * cross;
            cy += (p.y + q.y) * cross;
        }
        Configuration {
            x: cx / (6.0 * a),
            y: cy / (6.0 * a),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (Configuration, Configuration)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Even-odd containment test; boundary points may go either way, callers
    /// combine it with the boundary distance.
    pub fn contains(&self, p: Configuration) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the polygon as a closed region (zero inside).
    pub fn distance_to(&self, p: Configuration) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        self.boundary_distance(p)
    }

    fn boundary_distance(&self, p: Configuration) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<Configuration>> for Polygon {
    type Error = Error;

    fn try_from(value: Vec<Configuration>) -> Result<Self> {
        Polygon::new(value)
    }
}

impl From<Polygon> for Vec<Configuration> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

fn signed_area(vertices: &[Configuration]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    twice / 2.0
}

fn bounding_box(vertices: &[Configuration]) -> Rect {
    let mut r = Rect::new(
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for v in vertices {
        r.min_x = r.min_x.min(v.x);
        r.min_y = r.min_y.min(v.y);
        r.max_x = r.max_x.max(v.x);
        r.max_y = r.max_y.max(v.y);
    }
    r
}

fn orientation(a: Configuration, b: Configuration, c: Configuration) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Configuration, b: Configuration, p: Configuration) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

pub(crate) fn segments_intersect(
    a: Configuration,
    b: Configuration,
    c: Configuration,
    d: Configuration,
) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn is_self_intersecting(vertices: &[Configuration]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Uniform bucket grid over the bounds listing, per cell, the obstacles whose
/// inflated bounding box overlaps the cell.
#[derive(Clone, Debug, Default)]
struct ObstacleGrid {
    origin_x: f64,
    origin_y: f64,
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl ObstacleGrid {
    fn build(bounds: &Rect, obstacles: &[Polygon], inflate: f64) -> Self {
        if obstacles.is_empty() {
            return Self::default();
        }
        let per_axis = ((obstacles.len() as f64).sqrt() * 2.0).ceil().clamp(1.0, 256.0);
        let cell = bounds.width().max(bounds.height()) / per_axis;
        let cols = (bounds.width() / cell).ceil().max(1.0) as usize;
        let rows = (bounds.height() / cell).ceil().max(1.0) as usize;
        let mut cells = vec![Vec::new(); cols * rows];
        for (idx, ob) in obstacles.iter().enumerate() {
            let bb = ob.bounding_box().inflate(inflate);
            let c0 = (((bb.min_x - bounds.min_x) / cell).floor().max(0.0) as usize).min(cols - 1);
            let c1 = (((bb.max_x - bounds.min_x) / cell).floor().max(0.0) as usize).min(cols - 1);
            let r0 = (((bb.min_y - bounds.min_y) / cell).floor().max(0.0) as usize).min(rows - 1);
            let r1 = (((bb.max_y - bounds.min_y) / cell).floor().max(0.0) as usize).min(rows - 1);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    cells[r * cols + c].push(idx as u32);
                }
            }
        }
        Self {
            origin_x: bounds.min_x,
            origin_y: bounds.min_y,
            cell,
            cols,
            rows,
            cells,
        }
    }

    fn candidates(&self, p: Configuration) -> &[u32] {
        if self.cells.is_empty() {
            return &[];
        }
        let c = (((p.x - self.origin_x) / self.cell).floor().max(0.0) as usize).min(self.cols - 1);
        let r = (((p.y - self.origin_y) / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        &self.cells[r * self.cols + c]
    }
}

#[derive(Deserialize)]
struct WorkspaceRepr {
    bounds: Rect,
    #[serde(default)]
    obstacles: Vec<Polygon>,
    #[serde(default)]
    robot_radius: f64,
}

/// Bounded planar region with polygonal obstacles and a disk robot.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "WorkspaceRepr")]
pub struct Workspace {
    bounds: Rect,
    obstacles: Vec<Polygon>,
    robot_radius: f64,
    #[serde(skip)]
    grid: ObstacleGrid,
}

impl TryFrom<WorkspaceRepr> for Workspace {
    type Error = Error;

    fn try_from(r: WorkspaceRepr) -> Result<Self> {
        Workspace::new(r.bounds, r.obstacles, r.robot_radius)
    }
}

impl Workspace {
    pub fn new(bounds: Rect, obstacles: Vec<Polygon>, robot_radius: f64) -> Result<Self> {
        if !bounds.is_valid() {
            return Err(Error::InvalidWorkspace(format!("bad bounds {bounds:?}")));
        }
        if !(robot_radius >= 0.0 && robot_radius.is_finite()) {
            return Err(Error::InvalidWorkspace(format!(
                "robot radius {robot_radius} must be a finite non-negative number"
            )));
        }
        if robot_radius >= bounds.width().min(bounds.height()) / 2.0 {
            return Err(Error::InvalidWorkspace(format!(
                "robot radius {robot_radius} does not fit in the bounds"
            )));
        }
        for (i, ob) in obstacles.iter().enumerate() {
            if !bounds.contains_rect(&ob.bounding_box()) {
                return Err(Error::InvalidWorkspace(format!(
                    "obstacle {i} leaves the bounds"
                )));
            }
        }
        let grid = ObstacleGrid::build(&bounds, &obstacles, robot_radius);
        Ok(Self {
            bounds,
            obstacles,
            robot_radius,
            grid,
        })
    }

    pub fn empty(bounds: Rect, robot_radius: f64) -> Result<Self> {
        Self::new(bounds, Vec::new(), robot_radius)
    }

    pub fn bounds(&self) -> &Rect {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    /// True iff the robot disk at `p` stays in bounds and touches no obstacle.
    pub fn point_free(&self, p: Configuration) -> bool {
        let r = self.robot_radius;
        let b = &self.bounds;
        if p.x - r < b.min_x || p.x + r > b.max_x || p.y - r < b.min_y || p.y + r > b.max_y {
            return false;
        }
        self.grid.candidates(p).iter().all(|&idx| {
            let ob = &self.obstacles[idx as usize];
            if !ob.bounding_box().inflate(r).contains(p) {
                return true;
            }
            ob.distance_to(p) > r
        })
    }

    /// Checks `check_points` evenly spaced configurations on `[a, b]`,
    /// endpoints included.
    pub fn segment_free(&self, a: Configuration, b: Configuration, check_points: usize) -> bool {
        let mut ignored = 0;
        self.segment_free_counted(a, b, check_points, &mut ignored)
    }

    /// Same as [`Workspace::segment_free`], adding the number of point checks
    /// actually performed to `counter`. Stops at the first colliding point.
    pub fn segment_free_counted(
        &self,
        a: Configuration,
        b: Configuration,
        check_points: usize,
        counter: &mut u64,
    ) -> bool {
        debug_assert!(check_points >= 2);
        segment_samples(a, b, check_points).all(|p| {
            *counter += 1;
            self.point_free(p)
        })
    }
}

/// The `m` evenly spaced sample points of segment `[a, b]` used by
/// [`Workspace::segment_free`].
pub fn segment_samples(
    a: Configuration,
    b: Configuration,
    m: usize,
) -> impl Iterator<Item = Configuration> {
    let last = m.saturating_sub(1);
    (0..m).map(move |i| {
        if i == 0 {
            a
        } else if i == last {
            b
        } else {
            a.lerp(&b, i as f64 / last as f64)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Configuration {
        Configuration::new(x, y)
    }

    fn square_ws(obstacles: Vec<Polygon>, r: f64) -> Workspace {
        Workspace::new(Rect::square(100.0), obstacles, r).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(c(0.0, 0.0), c(0.0, 0.0)), 0.0);
        assert_eq!(distance(c(0.0, 0.0), c(3.0, 4.0)), 5.0);
        // sqrt(4^2 + 3^2)
        assert!((distance(c(1.5, 2.0), c(-2.5, -1.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Configuration::try_new(f64::NAN, 0.0).is_err());
        assert!(Configuration::try_new(0.0, f64::INFINITY).is_err());
        assert!(serde_json::from_str::<Configuration>("[1.0, 2.0]").is_ok());
    }

    #[test]
    fn polygon_normalizes_to_ccw() {
        let cw = Polygon::new(vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]).unwrap();
        assert!(cw.area() > 0.0);
        let bow = Polygon::new(vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(bow, Err(Error::InvalidPolygon(_))));
        assert!(Polygon::new(vec![c(0.0, 0.0), c(1.0, 1.0)]).is_err());
        assert!(Polygon::new(vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 2.0)]).is_err());
    }

    #[test]
    fn workspace_invariants() {
        let outside = Polygon::rectangle(90.0, 90.0, 110.0, 95.0).unwrap();
        assert!(Workspace::new(Rect::square(100.0), vec![outside], 1.0).is_err());
        assert!(Workspace::empty(Rect::square(100.0), 50.0).is_err());
        assert!(Workspace::empty(Rect::square(100.0), -1.0).is_err());
    }

    #[test]
    fn point_free_empty_and_centroid() {
        let ws = square_ws(vec![], 1.0);
        assert!(ws.point_free(c(50.0, 50.0)));
        assert!(!ws.point_free(c(0.5, 50.0)));
        assert!(!ws.point_free(c(150.0, 50.0)));

        let tri = Polygon::new(vec![c(20.0, 20.0), c(40.0, 20.0), c(30.0, 40.0)]).unwrap();
        let centroid = tri.centroid();
        let ws = square_ws(vec![tri], 1.0);
        assert!(!ws.point_free(centroid));
    }

    #[test]
    fn boundary_distance_counts_as_collision() {
        // edge y=40 from x=40..60; point straight above at exactly r
        let ob = Polygon::rectangle(40.0, 20.0, 60.0, 40.0).unwrap();
        let p = c(50.0, 42.5);
        assert_eq!(point_segment_distance(p, c(40.0, 40.0), c(60.0, 40.0)), 2.5);
        let ws = square_ws(vec![ob.clone()], 2.5);
        assert!(!ws.point_free(p));
        assert!(ws.point_free(c(50.0, 42.5 + 1e-9)));
        // zero radius still treats the boundary as obstacle
        let ws = square_ws(vec![ob], 0.0);
        assert!(!ws.point_free(c(50.0, 40.0)));
        assert!(!ws.point_free(c(40.0, 30.0)));
    }

    #[test]
    fn segment_free_examples() {
        let ws = square_ws(vec![], 1.0);
        assert!(ws.segment_free(c(10.0, 10.0), c(90.0, 90.0), 3));

        // obstacle centered on the midpoint (50, 50)
        let block = Polygon::rectangle(45.0, 45.0, 55.0, 55.0).unwrap();
        let ws = square_ws(vec![block], 1.0);
        assert!(!ws.segment_free(c(10.0, 50.0), c(90.0, 50.0), 3));

        // wall of width 2 at x = 30, strictly between samples 10, 50, 90
        let thin = Polygon::rectangle(29.0, 5.0, 31.0, 95.0).unwrap();
        let ws = square_ws(vec![thin], 1.0);
        assert!(ws.segment_free(c(10.0, 50.0), c(90.0, 50.0), 3));
        assert!(!ws.segment_free(c(10.0, 50.0), c(90.0, 50.0), 200));
    }

    #[test]
    fn counted_checks_stop_at_first_collision() {
        let block = Polygon::rectangle(45.0, 45.0, 55.0, 55.0).unwrap();
        let ws = square_ws(vec![block], 1.0);
        let mut n = 0;
        assert!(!ws.segment_free_counted(c(10.0, 50.0), c(90.0, 50.0), 3, &mut n));
        assert_eq!(n, 2);
        let mut n = 0;
        assert!(ws.segment_free_counted(c(10.0, 10.0), c(10.0, 90.0), 5, &mut n));
        assert_eq!(n, 5);
    }

    #[test]
    fn workspace_roundtrips_through_json() {
        let ws = square_ws(vec![Polygon::rectangle(10.0, 10.0, 20.0, 30.0).unwrap()], 2.0);
        let text = serde_json::to_string(&ws).unwrap();
        let back: Workspace = serde_json::from_str(&text).unwrap();
        assert_eq!(back.obstacles(), ws.obstacles());
        assert!(!back.point_free(c(15.0, 20.0)));
        let bad = r#"{"bounds":{"min_x":0,"min_y":0,"max_x":10,"max_y":10},"robot_radius":7}"#;
        assert!(serde_json::from_str::<Workspace>(bad).is_err());
    }

    fn arb_point() -> impl Strategy<Value = Configuration> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| c(x, y))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in arb_point(), b in arb_point(), m in arb_point()) {
            prop_assert_eq!(distance(a, b), distance(b, a));
            prop_assert!(distance(a, a) == 0.0);
            prop_assert!(distance(a, m) <= distance(a, b) + distance(b, m) + 1e-9);
            if a != b {
                prop_assert!(distance(a, b) > 0.0);
            }
        }

        #[test]
        fn segment_free_is_conjunction_of_samples(
            ax in 2.0..98.0f64, ay in 2.0..98.0f64, bx in 2.0..98.0f64, by in 2.0..98.0f64,
            m in 2usize..12,
        ) {
            let ws = square_ws(vec![
                Polygon::rectangle(30.0, 30.0, 50.0, 60.0).unwrap(),
                Polygon::new(vec![c(60.0, 10.0), c(90.0, 20.0), c(70.0, 40.0)]).unwrap(),
            ], 1.5);
            let (a, b) = (c(ax, ay), c(bx, by));
            let expected = segment_samples(a, b, m).all(|p| ws.point_free(p));
            prop_assert_eq!(ws.segment_free(a, b, m), expected);
        }

        #[test]
        fn point_free_ignores_obstacle_order(x in 0.0..100.0f64, y in 0.0..100.0f64) {
            let obs = vec![
                Polygon::rectangle(30.0, 30.0, 50.0, 60.0).unwrap(),
                Polygon::new(vec![c(60.0, 10.0), c(90.0, 20.0), c(70.0, 40.0)]).unwrap(),
                Polygon::rectangle(5.0, 70.0, 25.0, 95.0).unwrap(),
            ];
            let mut rev = obs.clone();
            rev.reverse();
            let p = c(x, y);
            prop_assert_eq!(square_ws(obs, 2.0).point_free(p), square_ws(rev, 2.0).point_free(p));
        }

        #[test]
        fn grid_matches_brute_force(x in -5.0..105.0f64, y in -5.0..105.0f64) {
            let obs: Vec<Polygon> = (0..25)
                .map(|i| {
                    let (cx, cy) = ((i % 5) as f64 * 20.0 + 5.0, (i / 5) as f64 * 20.0 + 5.0);
                    Polygon::rectangle(cx, cy, cx + 8.0, cy + 6.0).unwrap()
                })
                .collect();
            let ws = square_ws(obs.clone(), 1.0);
            let p = c(x, y);
            let inside = x - 1.0 >= 0.0 && x + 1.0 <= 100.0 && y - 1.0 >= 0.0 && y + 1.0 <= 100.0;
            let brute = inside && obs.iter().all(|o| o.distance_to(p) > 1.0);
            prop_assert_eq!(ws.point_free(p), brute);
        }
    }
}
