//! Procedural maps. Every generated workspace has a connected free space,
//! checked by flood fill over a grid of cell centers.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::mix_seed;
use crate::error::{Error, Result};
use crate::geometry::{distance, segments_intersect, Configuration, Polygon, Rect, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MapKind {
    /// Jittered lattice of rectangular blocks separated by corridors.
    DenseGrid,
    /// Many small random rectangles.
    VDense,
    /// Random triangles.
    Triangles,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::DenseGrid => "DENSE_GRID",
            MapKind::VDense => "V_DENSE",
            MapKind::Triangles => "TRIANGLES",
        })
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "DENSE_GRID" | "DENSE" => Ok(MapKind::DenseGrid),
            "V_DENSE" | "VDENSE" => Ok(MapKind::VDense),
            "TRIANGLES" => Ok(MapKind::Triangles),
            _ => Err(Error::InvalidParams(format!("unknown map kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapOptions {
    pub robot_radius: f64,
    /// Flood-fill cell size; half the sampling distance by default.
    pub resolution: f64,
    pub max_retries: usize,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            robot_radius: 1.0,
            resolution: 20.0,
            max_retries: 50,
        }
    }
}

/// Generates a `size x size` workspace covering roughly `density` of the
/// area with obstacles.
pub fn generate_map(kind: MapKind, size: f64, density: f64, seed: u64) -> Result<Workspace> {
    generate_map_with(kind, size, density, seed, &MapOptions::default())
}

pub fn generate_map_with(kind: MapKind, size: f64, density: f64, seed: u64, opts: &MapOptions) -> Result<Workspace> {
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::InvalidParams(format!("density must lie in (0, 1), got {density}")));
    }
    if !(size > 0.0 && size.is_finite()) {
        return Err(Error::InvalidParams(format!("size must be positive, got {size}")));
    }
    let bounds = Rect::square(size);
    for attempt in 0..=opts.max_retries {
        let sub = if attempt == 0 { seed } else { mix_seed(seed, attempt as u64) };
        let mut rng = ChaCha8Rng::seed_from_u64(sub);
        let obstacles = match kind {
            MapKind::DenseGrid => dense_grid(&mut rng, size, density, opts),
            MapKind::VDense => scattered(&mut rng, size, density, opts, rect_around),
            MapKind::Triangles => scattered(&mut rng, size, density, opts, triangle_around),
        }?;
        let ws = Workspace::new(bounds, obstacles, opts.robot_radius)?;
        if free_space_connected(&ws, opts.resolution) {
            return Ok(ws);
        }
        log::debug!("{kind} map attempt {attempt} is disconnected; retrying");
    }
    Err(Error::MapGeneration(format!(
        "{kind} map with density {density} stayed disconnected after {} attempts",
        opts.max_retries + 1
    )))
}

const GRID_PITCH: f64 = 100.0;

fn dense_grid(rng: &mut ChaCha8Rng, size: f64, density: f64, opts: &MapOptions) -> Result<Vec<Polygon>> {
    let cells = (size / GRID_PITCH).round().max(1.0) as usize;
    let pitch = size / cells as f64;
    let side = pitch * density.sqrt();
    let gap = pitch - side;
    if gap / 2.0 <= 2.0 * opts.robot_radius {
        return Err(Error::InvalidParams(format!(
            "density {density} leaves corridors too narrow for the robot"
        )));
    }
    if side < 1e-6 {
        return Ok(Vec::new());
    }
    // blocks shift by at most a quarter gap, so corridors keep half their width
    let jitter = gap / 4.0;
    let mut out = Vec::with_capacity(cells * cells);
    for row in 0..cells {
        for col in 0..cells {
            let x = col as f64 * pitch + gap / 2.0 + rng.random_range(-jitter..=jitter);
            let y = row as f64 * pitch + gap / 2.0 + rng.random_range(-jitter..=jitter);
            out.push(Polygon::rectangle(x, y, x + side, y + side)?);
        }
    }
    Ok(out)
}

/// Places obstacles of typical extent `size / 40` at uniform centers until
/// the covered area reaches `density`. Candidates closer than one flood-fill
/// cell (plus the robot diameter) to an earlier obstacle are redrawn, so the
/// free space stays connected.
fn scattered(
    rng: &mut ChaCha8Rng,
    size: f64,
    density: f64,
    opts: &MapOptions,
    make: impl Fn(&mut ChaCha8Rng, Configuration, f64) -> Result<Polygon>,
) -> Result<Vec<Polygon>> {
    let scale = size / 40.0;
    let clearance = opts.resolution + 2.0 * opts.robot_radius;
    let target = density * size * size;
    let mut covered = 0.0;
    let mut out: Vec<Polygon> = Vec::new();
    let mut rejected = 0;
    while covered < target {
        let margin = 1.5 * scale;
        let c = Configuration::new(
            rng.random_range(margin..size - margin),
            rng.random_range(margin..size - margin),
        );
        let poly = make(rng, c, scale)?;
        if covered + poly.area() / 2.0 > target {
            break;
        }
        if out.iter().any(|o| too_close(o, &poly, clearance)) {
            rejected += 1;
            if rejected > 5_000 {
                log::warn!(
                    "obstacle placement saturated at density {:.3} of requested {density}",
                    covered / (size * size)
                );
                break;
            }
            continue;
        }
        rejected = 0;
        covered += poly.area();
        out.push(poly);
    }
    Ok(out)
}

/// Whether two convex polygons are closer than `clearance`.
fn too_close(a: &Polygon, b: &Polygon, clearance: f64) -> bool {
    let (ba, bb) = (a.bounding_box(), b.bounding_box());
    let gx = (bb.min_x - ba.max_x).max(ba.min_x - bb.max_x).max(0.0);
    let gy = (bb.min_y - ba.max_y).max(ba.min_y - bb.max_y).max(0.0);
    if gx.hypot(gy) >= clearance {
        return false;
    }
    let crossing = a
        .edges()
        .any(|(p, q)| b.edges().any(|(r, s)| segments_intersect(p, q, r, s)));
    if crossing {
        return true;
    }
    let from_a = a.vertices().iter().map(|&v| b.distance_to(v));
    let from_b = b.vertices().iter().map(|&v| a.distance_to(v));
    from_a.chain(from_b).any(|d| d < clearance)
}

fn rect_around(rng: &mut ChaCha8Rng, c: Configuration, scale: f64) -> Result<Polygon> {
    let w = scale * rng.random_range(0.5..1.5);
    let h = scale * rng.random_range(0.5..1.5);
    Polygon::rectangle(c.x - w / 2.0, c.y - h / 2.0, c.x + w / 2.0, c.y + h / 2.0)
}

fn triangle_around(rng: &mut ChaCha8Rng, c: Configuration, scale: f64) -> Result<Polygon> {
    loop {
        let mut angles = [0.0f64; 3];
        for a in &mut angles {
            *a = rng.random::<f64>() * std::f64::consts::TAU;
        }
        angles.sort_by(f64::total_cmp);
        let vertices: Vec<Configuration> = angles
            .iter()
            .map(|&a| c.offset_polar(scale * rng.random_range(0.6..1.4), a))
            .collect();
        if let Ok(p) = Polygon::new(vertices) {
            if p.area() > 0.1 * scale * scale {
                return Ok(p);
            }
        }
    }
}

/// True when every free grid cell center is reachable from every other one
/// through free segments between 8-neighbors.
pub fn free_space_connected(ws: &Workspace, resolution: f64) -> bool {
    let b = ws.bounds();
    let cols = (b.width() / resolution).ceil().max(1.0) as usize;
    let rows = (b.height() / resolution).ceil().max(1.0) as usize;
    let (dx, dy) = (b.width() / cols as f64, b.height() / rows as f64);
    let center = |r: usize, c: usize| {
        Configuration::new(b.min_x + (c as f64 + 0.5) * dx, b.min_y + (r as f64 + 0.5) * dy)
    };
    let free: Vec<bool> = (0..rows * cols)
        .map(|i| ws.point_free(center(i / cols, i % cols)))
        .collect();
    let Some(start) = free.iter().position(|&f| f) else {
        return false;
    };
    let check_points = ((dx.max(dy) / ws.robot_radius().max(0.5)).ceil() as usize + 1).max(3);
    let mut seen = vec![false; rows * cols];
    seen[start] = true;
    let mut reached = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let (r, c) = (i / cols, i % cols);
        let mut neighbors = Vec::with_capacity(8);
        for (dr, dc) in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
                neighbors.push(nr as usize * cols + nc as usize);
            }
        }
        for j in neighbors {
            if free[j] && !seen[j] && ws.segment_free(center(r, c), center(j / cols, j % cols), check_points) {
                seen[j] = true;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    reached == free.iter().filter(|&&f| f).count()
}

/// `n` collision-free targets drawn uniformly, pairwise at least
/// `min_separation` apart.
pub fn place_targets(ws: &Workspace, n: usize, min_separation: f64, seed: u64) -> Result<Vec<Configuration>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = *ws.bounds();
    let mut out: Vec<Configuration> = Vec::with_capacity(n);
    let budget = 10_000 * n.max(1);
    for _ in 0..budget {
        if out.len() == n {
            return Ok(out);
        }
        let p = Configuration::new(rng.random_range(b.min_x..b.max_x), rng.random_range(b.min_y..b.max_y));
        if ws.point_free(p) && out.iter().all(|q| distance(*q, p) >= min_separation) {
            out.push(p);
        }
    }
    if out.len() == n {
        return Ok(out);
    }
    Err(Error::MapGeneration(format!(
        "could only place {} of {n} targets with separation {min_separation}",
        out.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_density_gives_empty_dense_grid() {
        let ws = generate_map(MapKind::DenseGrid, 2000.0, 1e-20, 1).unwrap();
        assert!(ws.obstacles().is_empty());
        let ws = generate_map(MapKind::VDense, 2000.0, 1e-9, 1).unwrap();
        assert!(ws.obstacles().is_empty());
        assert!(generate_map(MapKind::Triangles, 2000.0, 0.0, 1).is_err());
        assert!(generate_map(MapKind::Triangles, 2000.0, 1.0, 1).is_err());
    }

    #[test]
    fn dense_grid_has_wide_corridors() {
        let ws = generate_map(MapKind::DenseGrid, 2000.0, 0.3, 5).unwrap();
        assert_eq!(ws.obstacles().len(), 400);
        let min_gap = ws
            .obstacles()
            .iter()
            .enumerate()
            .flat_map(|(i, a)| ws.obstacles()[i + 1..].iter().map(move |b| (a.bounding_box(), b.bounding_box())))
            .map(|(a, b)| {
                let gx = (b.min_x - a.max_x).max(a.min_x - b.max_x).max(0.0);
                let gy = (b.min_y - a.max_y).max(a.min_y - b.max_y).max(0.0);
                gx.max(gy)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap > 2.0 * ws.robot_radius(), "{min_gap}");
        assert!(free_space_connected(&ws, 20.0));
        let covered: f64 = ws.obstacles().iter().map(Polygon::area).sum();
        assert!((covered / (2000.0 * 2000.0) - 0.3).abs() < 0.01);
    }

    #[test]
    fn generators_are_deterministic() {
        for kind in [MapKind::DenseGrid, MapKind::VDense, MapKind::Triangles] {
            let a = generate_map(kind, 1000.0, 0.2, 42).unwrap();
            let b = generate_map(kind, 1000.0, 0.2, 42).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
            assert!(!a.obstacles().is_empty());
            assert!(free_space_connected(&a, 20.0));
        }
    }

    #[test]
    fn flood_fill_detects_walls() {
        let split = Workspace::new(
            Rect::square(100.0),
            vec![Polygon::rectangle(48.0, 0.0, 52.0, 100.0).unwrap()],
            1.0,
        )
        .unwrap();
        assert!(!free_space_connected(&split, 10.0));
        let gapped = Workspace::new(
            Rect::square(100.0),
            vec![Polygon::rectangle(48.0, 0.0, 52.0, 70.0).unwrap()],
            1.0,
        )
        .unwrap();
        assert!(free_space_connected(&gapped, 10.0));
    }

    #[test]
    fn targets_are_free_and_separated() {
        let ws = generate_map(MapKind::Triangles, 1000.0, 0.2, 3).unwrap();
        let t = place_targets(&ws, 20, 50.0, 9).unwrap();
        assert_eq!(t.len(), 20);
        for (i, a) in t.iter().enumerate() {
            assert!(ws.point_free(*a));
            for b in &t[i + 1..] {
                assert!(distance(*a, *b) >= 50.0);
            }
        }
        assert!(place_targets(&ws, 500, 400.0, 9).is_err());
    }
}
