use serde::{Deserialize, Serialize};

/// One finite point of a persistence diagram, with the sample indices of
/// the minimum that created the component and the maximum that killed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
    pub birth_index: usize,
    pub death_index: usize,
}

impl PersistencePair {
    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }
}

/// Finite persistence pairs of a series plus its essential class.
///
/// The essential class is kept as a birth value only; its death is `+inf`
/// and it never enters lifetime statistics. Its birth is `-inf` when one of
/// the boundary rays descends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
    essential_birth: f64,
    essential_index: Option<usize>,
    n_samples: usize,
}

impl PersistenceDiagram {
    pub fn new(
        pairs: Vec<PersistencePair>,
        essential_birth: f64,
        essential_index: Option<usize>,
        n_samples: usize,
    ) -> Self {
        debug_assert!(pairs
            .iter()
            .all(|p| p.birth.is_finite() && p.death.is_finite() && p.death >= p.birth));
        Self { pairs, essential_birth, essential_index, n_samples }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn essential_birth(&self) -> f64 {
        self.essential_birth
    }

    /// Sample index of the essential minimum, `None` when it is born at `-inf`.
    pub fn essential_index(&self) -> Option<usize> {
        self.essential_index
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn lifetimes(&self) -> Vec<f64> {
        lifetimes(self)
    }

    /// (birth, death) coordinates sorted lexicographically; the canonical
    /// form for multiset comparisons.
    pub fn sorted_points(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<_> = self.pairs.iter().map(|p| (p.birth, p.death)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts
    }
}

/// Lifetimes `death - birth` of the finite pairs, in diagram order.
pub fn lifetimes(dgm: &PersistenceDiagram) -> Vec<f64> {
    dgm.pairs.iter().map(PersistencePair::lifetime).collect()
}
