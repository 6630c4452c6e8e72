use super::Qubo;

/// Compressed neighbour lists of a [`Qubo`], one row per variable.
///
/// This is the layout the samplers' inner loops read: the local field of
/// variable `i` costs one pass over its row.
#[derive(Debug, Clone)]
pub struct Adjacency {
    bias: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
}

impl Adjacency {
    pub fn new(q: &Qubo) -> Self {
        let n = q.n();
        let mut bias = vec![0.0; n];
        let mut degree = vec![0usize; n];
        for (i, j, v) in q.terms() {
            if i == j {
                bias[i] = v;
            } else {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0; total];
        let mut weights = vec![0.0; total];
        let mut cursor = offsets[..n].to_vec();
        for (i, j, v) in q.couplings() {
            neighbors[cursor[i]] = j;
            weights[cursor[i]] = v;
            cursor[i] += 1;
            neighbors[cursor[j]] = i;
            weights[cursor[j]] = v;
            cursor[j] += 1;
        }
        Self {
            bias,
            offsets,
            neighbors,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.bias.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Upper bound on the energy change of any single flip:
    /// `max_i |q_ii| + Σ_j |q_ij|`.
    pub fn max_flip(&self) -> f64 {
        (0..self.n())
            .map(|i| self.bias[i].abs() + self.row(i).map(|(_, w)| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `q_ii + Σ_j q_ij x_j`: the energy change of switching `i` on.
    #[inline]
    pub fn field(&self, i: usize, x: &[f64]) -> f64 {
        let (start, end) = (self.offsets[i], self.offsets[i + 1]);
        self.neighbors[start..end]
            .iter()
            .zip(&self.weights[start..end])
            .fold(self.bias[i], |acc, (&j, &w)| acc + w * x[j])
    }

    /// Neighbours of `i` with their coupling weights.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (start, end) = (self.offsets[i], self.offsets[i + 1]);
        self.neighbors[start..end]
            .iter()
            .copied()
            .zip(self.weights[start..end].iter().copied())
    }
}
