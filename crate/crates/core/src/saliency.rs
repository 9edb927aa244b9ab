/// Per-unit event densities with the units ranked most-dense first.
///
/// Ties are ordered by ascending unit index, so the ranking is a pure
/// function of the densities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaliencyRanking {
    densities: Vec<u64>,
    order: Vec<usize>,
}

impl SaliencyRanking {
    pub fn from_densities(densities: Vec<u64>) -> Self {
        let mut order: Vec<usize> = (0..densities.len()).collect();
        // stable: equal densities stay in index order
        order.sort_by(|&a, &b| densities[b].cmp(&densities[a]));
        SaliencyRanking { densities, order }
    }

    pub fn densities(&self) -> &[u64] {
        &self.densities
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    /// Rank of each unit (inverse of `order`).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (rank, &unit) in self.order.iter().enumerate() {
            ranks[unit] = rank;
        }
        ranks
    }

    pub fn total(&self) -> u64 {
        self.densities.iter().sum()
    }
}

/// `floor(count * fraction)`, tolerant of binary rounding so that e.g.
/// `100 * 0.29` yields 29 rather than 28.
pub(crate) fn floor_fraction(count: usize, fraction: f64) -> usize {
    let exact = count as f64 * fraction;
    ((exact + exact.abs() * 1e-12 + 1e-12).floor() as usize).min(count)
}
