use serde::{Deserialize, Serialize};

use crate::numerics::{Mat, Rng};
use crate::{LrpeError, Result};

/// A bijection `π` on `0..d` together with its cycle decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSpec {
    pi: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    /// `(cycle index, offset inside the cycle)` for every element.
    place: Vec<(usize, usize)>,
    cycle_order: u64,
}

impl PermutationSpec {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let d = pi.len();
        if d == 0 {
            return Err(LrpeError::InvalidSpec("empty permutation".into()));
        }
        let mut seen = vec![false; d];
        for &p in &pi {
            if p >= d || seen[p] {
                return Err(LrpeError::InvalidSpec(format!("{pi:?} is not a bijection on 0..{d}")));
            }
            seen[p] = true;
        }

        let mut cycles = Vec::new();
        let mut place = vec![(0, 0); d];
        let mut visited = vec![false; d];
        for start in 0..d {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                place[j] = (cycles.len(), cycle.len());
                cycle.push(j);
                j = pi[j];
            }
            cycles.push(cycle);
        }
        let cycle_order = cycles.iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64));
        Ok(Self { pi, cycles, place, cycle_order })
    }

    pub fn identity(d: usize) -> Self {
        Self::new((0..d).collect()).expect("identity is a bijection")
    }

    pub fn random(d: usize, rng: &mut Rng) -> Self {
        Self::new(rng.permutation(d)).expect("Fisher-Yates yields a bijection")
    }

    pub fn d(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Smallest `k ≥ 1` with `π^k = id`.
    pub fn cycle_order(&self) -> u64 {
        self.cycle_order
    }

    /// `π^s(j)`, in O(1) via the cycle containing `j`.
    pub fn power_index(&self, s: u64, j: usize) -> usize {
        let (c, pos) = self.place[j];
        let cycle = &self.cycles[c];
        let len = cycle.len() as u64;
        cycle[((pos as u64 + s % len) % len) as usize]
    }

    /// The gather table `j ↦ π^s(j)`.
    pub fn power_table(&self, s: u64) -> Vec<usize> {
        (0..self.d()).map(|j| self.power_index(s, j)).collect()
    }

    /// Dense `(I)_{π^s}`: row `j` is the unit vector `e_{π^s(j)}`.
    pub fn dense_power(&self, s: u64) -> Mat {
        let d = self.d();
        let mut m = Mat::zeros(d, d);
        for j in 0..d {
            m.set_re(j, self.power_index(s, j), 1.0);
        }
        m
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
