//! Closed-tour solvers over a symmetric cost matrix: exact subset dynamic
//! programming for up to [`MAX_EXACT_TARGETS`] targets and a
//! nearest-neighbor + 2-opt heuristic beyond that.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest instance solved exactly by [`solve_tour`].
pub const MAX_EXACT_TARGETS: usize = 20;

const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Dense square matrix of pairwise costs. Unreachable pairs are `+inf` and
/// serialize as `null`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// All-zero `n x n` matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedMatrix);
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Symmetric matrix with `f(i, j)` above the diagonal and zeros on it.
    pub fn from_fn_symmetric(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_symmetric(i, j, f(i, j));
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn set_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).take(self.n).collect()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.get(i, j).is_finite() {
                    return Err(Error::InfiniteEntry(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a == b {
                    continue;
                }
                let scale = a.abs().max(b.abs()).max(1.0);
                let close = (a - b).abs() <= SYMMETRY_TOLERANCE * scale;
                if !close {
                    return Err(Error::AsymmetricMatrix(i, j));
                }
            }
        }
        Ok(())
    }
}

impl Serialize for CostMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Option<f64>>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.is_finite().then_some(v)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CostMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Option<f64>>>::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect())
            .collect();
        CostMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A closed visiting order and its cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub sequence: Vec<usize>,
    pub total_cost: f64,
}

/// Sum of consecutive entries along the cycle, including the closing edge.
pub fn tour_cost(matrix: &CostMatrix, sequence: &[usize]) -> Result<f64> {
    let n = matrix.len();
    let mut seen = vec![false; n];
    if sequence.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    for &s in sequence {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::NotAPermutation(n));
        }
    }
    Ok(cycle_cost(matrix, sequence))
}

fn cycle_cost(matrix: &CostMatrix, sequence: &[usize]) -> f64 {
    let n = sequence.len();
    if n < 2 {
        return 0.0;
    }
    let path: f64 = sequence.windows(2).map(|w| matrix.get(w[0], w[1])).sum();
    path + matrix.get(sequence[n - 1], sequence[0])
}

/// Rotates the cycle to start at 0 and orients it so that the second element
/// is the smaller-indexed neighbor of 0.
pub fn canonical_cycle(sequence: &[usize]) -> Vec<usize> {
    let n = sequence.len();
    let start = sequence.iter().position(|&s| s == 0).unwrap_or(0);
    let mut out: Vec<usize> = sequence[start..].iter().chain(&sequence[..start]).copied().collect();
    if n >= 3 && out[n - 1] < out[1] {
        out[1..].reverse();
    }
    out
}

fn make_tour(matrix: &CostMatrix, sequence: &[usize]) -> Tour {
    let sequence = canonical_cycle(sequence);
    let total_cost = cycle_cost(matrix, &sequence);
    Tour {
        sequence,
        total_cost,
    }
}

/// Provably optimal tour by dynamic programming over subsets.
pub fn held_karp(matrix: &CostMatrix) -> Result<Tour> {
    let n = matrix.len();
    if !(2..=MAX_EXACT_TARGETS).contains(&n) {
        return Err(Error::SolverSize {
            max: MAX_EXACT_TARGETS,
            actual: n,
        });
    }
    matrix.check_finite()?;
    matrix.check_symmetric()?;
    Ok(held_karp_unchecked(matrix))
}

/// Subset DP that tolerates infinite entries; the returned cost is infinite
/// when no finite cycle exists.
pub(crate) fn held_karp_unchecked(matrix: &CostMatrix) -> Tour {
    let n = matrix.len();
    if n <= 3 {
        return make_tour(matrix, &(0..n).collect::<Vec<_>>());
    }
    // vertices 1..n map to bits 0..m
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * m];
    let mut prev = vec![u8::MAX; (full + 1) * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = matrix.get(0, j + 1);
    }
    for mask in 1..=full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let here = cost[mask * m + last];
            if here == f64::INFINITY {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let to = mask | (1 << next);
                let cand = here + matrix.get(last + 1, next + 1);
                let slot = to * m + next;
                if cand < cost[slot] {
                    cost[slot] = cand;
                    prev[slot] = last as u8;
                }
            }
        }
    }
    let mut best = (f64::INFINITY, 0usize);
    for last in 0..m {
        let total = cost[full * m + last] + matrix.get(last + 1, 0);
        if total < best.0 {
            best = (total, last);
        }
    }
    if best.0 == f64::INFINITY {
        return Tour {
            sequence: canonical_cycle(&(0..n).collect::<Vec<_>>()),
            total_cost: f64::INFINITY,
        };
    }
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut last) = (full, best.1);
    loop {
        order.push(last + 1);
        let p = prev[mask * m + last];
        mask &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    order.push(0);
    order.reverse();
    make_tour(matrix, &order)
}

/// Nearest-neighbor construction from vertex 0 followed by first-improvement
/// 2-opt until no segment reversal lowers the cost.
pub fn heuristic_tour(matrix: &CostMatrix) -> Result<Tour> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::TooFewTargets {
            required: 2,
            actual: n,
        });
    }
    matrix.check_finite()?;
    matrix.check_symmetric()?;

    let mut tour = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut cur = 0;
    used[0] = true;
    tour.push(0);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| matrix.get(cur, a).total_cmp(&matrix.get(cur, b)).then(a.cmp(&b)))
            .expect("unvisited vertex remains");
        used[next] = true;
        tour.push(next);
        cur = next;
    }

    two_opt(matrix, &mut tour);
    Ok(make_tour(matrix, &tour))
}

/// Gain of reversing `tour[i + 1..=j]`; negative means shorter.
fn two_opt_delta(matrix: &CostMatrix, tour: &[usize], i: usize, j: usize) -> f64 {
    let n = tour.len();
    let (a, b) = (tour[i], tour[i + 1]);
    let (c, d) = (tour[j], tour[(j + 1) % n]);
    matrix.get(a, c) + matrix.get(b, d) - matrix.get(a, b) - matrix.get(c, d)
}

fn improves(matrix: &CostMatrix, tour: &[usize], i: usize, j: usize) -> bool {
    let n = tour.len();
    let removed = matrix.get(tour[i], tour[i + 1]) + matrix.get(tour[j], tour[(j + 1) % n]);
    two_opt_delta(matrix, tour, i, j) < -1e-12 * removed.max(1.0)
}

pub(crate) fn two_opt(matrix: &CostMatrix, tour: &mut [usize]) {
    let n = tour.len();
    if n < 4 {
        return;
    }
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if improves(matrix, tour, i, j) {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// True when no 2-opt move lowers the cost of `tour`.
pub fn is_two_opt_optimal(matrix: &CostMatrix, tour: &[usize]) -> bool {
    let n = tour.len();
    if n < 4 {
        return true;
    }
    (0..n - 1).all(|i| {
        ((i + 2)..n)
            .filter(|&j| !(i == 0 && j == n - 1))
            .all(|j| !improves(matrix, tour, i, j))
    })
}

/// Exact for up to [`MAX_EXACT_TARGETS`] targets, heuristic above.
pub fn solve_tour(matrix: &CostMatrix) -> Result<Tour> {
    match matrix.len() {
        0 => Err(Error::TooFewTargets {
            required: 1,
            actual: 0,
        }),
        1 => Ok(Tour {
            sequence: vec![0],
            total_cost: 0.0,
        }),
        n if n <= MAX_EXACT_TARGETS => held_karp(matrix),
        n => {
            log::warn!("{n} targets exceed the exact solver limit; using 2-opt heuristic");
            heuristic_tour(matrix)
        }
    }
}
