use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    pub height: f64,
    pub kind: ExtremumKind,
}

impl Extremum {
    fn new(index: usize, height: f64, kind: ExtremumKind) -> Self {
        Self { index, height, kind }
    }
}

/// Alternating local minima and maxima in index order. The first and last
/// entries are boundary sentinels with height `-inf` (minimum) or `+inf`
/// (maximum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaList {
    entries: Vec<Extremum>,
}

impl ExtremaList {
    pub fn entries(&self) -> &[Extremum] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Finite (interior) extrema only.
    pub fn interior(&self) -> impl Iterator<Item = &Extremum> {
        self.entries.iter().filter(|e| e.height.is_finite())
    }
}

fn boundary(index: usize, lower_than_neighbour: bool) -> Extremum {
    if lower_than_neighbour {
        Extremum::new(index, f64::NEG_INFINITY, ExtremumKind::Min)
    } else {
        Extremum::new(index, f64::INFINITY, ExtremumKind::Max)
    }
}

/// Local extrema of a series after plateau collapse, with boundary
/// sentinels. A constant series is treated as a degenerate monotone run and
/// yields a `-inf` minimum at the first index and a `+inf` maximum at the last.
pub fn extract_extrema(series: &TimeSeries) -> Result<ExtremaList> {
    let mut entries = Vec::new();
    for_each_extremum(series, |e| entries.push(e))?;
    Ok(ExtremaList { entries })
}

/// Streaming form of [`extract_extrema`]: calls `f` on every entry in index
/// order without materialising the list.
pub(crate) fn for_each_extremum(series: &TimeSeries, mut f: impl FnMut(Extremum)) -> Result<()> {
    series.require_len(2)?;
    let x = series.values();

    // first index of each run of equal values, two runs behind the scan
    let mut prev: Option<usize> = None;
    let mut cur = 0usize;
    for i in 1..x.len() {
        if x[i] == x[i - 1] {
            continue;
        }
        match prev {
            None => f(boundary(cur, x[cur] < x[i])),
            Some(p) => {
                let (a, c, b) = (x[p], x[cur], x[i]);
                if c < a && c < b {
                    f(Extremum::new(cur, c, ExtremumKind::Min));
                } else if c > a && c > b {
                    f(Extremum::new(cur, c, ExtremumKind::Max));
                }
            }
        }
        prev = Some(cur);
        cur = i;
    }
    match prev {
        None => {
            f(Extremum::new(0, f64::NEG_INFINITY, ExtremumKind::Min));
            f(Extremum::new(x.len() - 1, f64::INFINITY, ExtremumKind::Max));
        }
        Some(p) => f(boundary(cur, x[cur] < x[p])),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use ExtremumKind::{Max, Min};

    fn extrema(values: &[f64]) -> Vec<(usize, f64, ExtremumKind)> {
        let s = TimeSeries::from_values(values.to_vec()).unwrap();
        extract_extrema(&s)
            .unwrap()
            .entries()
            .iter()
            .map(|e| (e.index, e.height, e.kind))
            .collect()
    }

    #[test]
    fn boundary_rule_on_small_series() {
        let inf = f64::INFINITY;
        assert_eq!(
            extrema(&[2.0, 0.0, 3.0, 1.0, 4.0]),
            vec![(0, inf, Max), (1, 0.0, Min), (2, 3.0, Max), (3, 1.0, Min), (4, inf, Max)]
        );
    }

    #[test]
    fn monotone_series_has_only_sentinels() {
        let inf = f64::INFINITY;
        assert_eq!(extrema(&[1.0, 2.0, 3.0]), vec![(0, -inf, Min), (2, inf, Max)]);
        assert_eq!(extrema(&[3.0, 2.0, 1.0]), vec![(0, inf, Max), (2, -inf, Min)]);
    }

    #[test]
    fn constant_series() {
        let inf = f64::INFINITY;
        assert_eq!(extrema(&[1.0, 1.0, 1.0]), vec![(0, -inf, Min), (2, inf, Max)]);
    }

    #[test]
    fn plateaus_collapse_to_first_index() {
        let inf = f64::INFINITY;
        // plateau minimum at 2..=4, plateau maximum at 5..=6
        assert_eq!(
            extrema(&[3.0, 2.0, 0.0, 0.0, 0.0, 5.0, 5.0, 1.0, 1.0]),
            vec![(0, inf, Max), (2, 0.0, Min), (5, 5.0, Max), (7, -inf, Min)]
        );
        // a flat step on a slope is not an extremum
        assert_eq!(extrema(&[0.0, 1.0, 1.0, 2.0]), vec![(0, -inf, Min), (3, inf, Max)]);
    }

    #[test]
    fn kinds_alternate() {
        let values: Vec<f64> = (0..200).map(|i| ((i * 37 % 11) as f64).sin().round()).collect();
        let s = TimeSeries::from_values(values).unwrap();
        let list = extract_extrema(&s).unwrap();
        for w in list.entries().windows(2) {
            assert_ne!(w[0].kind, w[1].kind);
        }
    }

    #[test]
    fn too_short() {
        let s = TimeSeries::from_values(vec![1.0]).unwrap();
        assert!(matches!(extract_extrema(&s), Err(Error::SeriesTooShort { len: 1, .. })));
    }
}
