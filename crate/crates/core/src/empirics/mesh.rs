use crate::error::{domain, Result};
use crate::rng::CounterRng;

/// Strictly increasing nodes on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    h: f64,
}

impl Mesh1D {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(domain("a mesh needs at least two nodes"));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("mesh nodes must be finite and strictly increasing"));
        }
        let h = nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(Self { nodes, h })
    }

    /// `n_elements` equal elements.
    pub fn uniform(a: f64, b: f64, n_elements: usize) -> Result<Self> {
        if n_elements == 0 || !(b > a) {
            return Err(domain(format!(
                "uniform mesh needs b > a and at least one element, got [{a}, {b}], n={n_elements}"
            )));
        }
        let len = b - a;
        let mut nodes: Vec<f64> = (0..=n_elements)
            .map(|i| a + len * i as f64 / n_elements as f64)
            .collect();
        nodes[n_elements] = b;
        Self::from_nodes(nodes)
    }

    /// Uniform mesh whose interior nodes are shifted by up to
    /// `fraction * (b - a) / n_elements`; `fraction` must lie in `[0, 0.5)`.
    pub fn jittered(a: f64, b: f64, n_elements: usize, fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&fraction) {
            return Err(domain(format!(
                "jitter fraction must be in [0, 0.5), got {fraction}"
            )));
        }
        let base = Self::uniform(a, b, n_elements)?;
        let spacing = (b - a) / n_elements as f64;
        let rng = CounterRng::new(seed);
        let mut nodes = base.nodes;
        let last = nodes.len() - 1;
        for (i, x) in nodes.iter_mut().enumerate().take(last).skip(1) {
            let u = 2.0 * rng.unit_at(i as u64) - 1.0;
            *x += fraction * spacing * u;
        }
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Largest element length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Index of the element containing `x` (clamped to the mesh).
    pub fn locate(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|&n| n <= x);
        idx.saturating_sub(1).min(self.n_elements() - 1)
    }
}
