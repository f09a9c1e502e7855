use super::diagram::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const ORACLE_MAX_LEN: usize = 10_000;

#[derive(Clone, Copy)]
struct Component {
    birth: f64,
    // sample index of the birth; -1 for a ray born at -inf on the left
    birth_index: i64,
}

impl Component {
    fn older_than(&self, other: &Component) -> bool {
        (self.birth, self.birth_index) < (other.birth, other.birth_index)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Reference implementation: sweep the samples in increasing height and
/// merge components explicitly with a union-find, applying the Elder Rule at
/// every merge. Descending boundary rays enter as virtual vertices at
/// `-inf` before the sweep starts.
///
/// Independent of the extrema list used by [`super::sublevel_persistence`];
/// the two must produce identical (birth, death) multisets. Death indices
/// of plateau maxima differ (last sample of the run here, first sample
/// there).
pub fn sublevel_persistence_bruteforce(series: &TimeSeries) -> Result<PersistenceDiagram> {
    series.require_len(2)?;
    let n = series.len();
    if n > ORACLE_MAX_LEN {
        return Err(Error::OracleSizeExceeded { len: n, max: ORACLE_MAX_LEN });
    }
    let x = series.values();

    // Ray direction follows the first non-flat edge from each end.
    let left_first = x.iter().find(|&&v| v != x[0]);
    let right_first = x.iter().rev().find(|&&v| v != x[n - 1]);
    let (Some(&left_next), Some(&right_next)) = (left_first, right_first) else {
        // constant: a degenerate monotone run
        return Ok(PersistenceDiagram::new(Vec::new(), f64::NEG_INFINITY, None, n));
    };
    let left_ray_down = x[0] < left_next;
    let right_ray_down = x[n - 1] < right_next;

    let left_ray = n;
    let right_ray = n + 1;
    let mut uf = UnionFind::new(n + 2);
    let mut comp: Vec<Option<Component>> = vec![None; n + 2];
    if left_ray_down {
        comp[left_ray] = Some(Component { birth: f64::NEG_INFINITY, birth_index: -1 });
    }
    if right_ray_down {
        comp[right_ray] = Some(Component { birth: f64::NEG_INFINITY, birth_index: n as i64 });
    }
    let mut active = vec![false; n + 2];
    active[left_ray] = left_ray_down;
    active[right_ray] = right_ray_down;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let mut pairs = Vec::new();
    for &v in &order {
        active[v] = true;
        let mut neighbours = Vec::with_capacity(3);
        if v > 0 {
            neighbours.push(v - 1);
        } else {
            neighbours.push(left_ray);
        }
        if v + 1 < n {
            neighbours.push(v + 1);
        } else {
            neighbours.push(right_ray);
        }

        let mut own: Option<usize> = None;
        for w in neighbours {
            if !active[w] {
                continue;
            }
            let rw = uf.find(w);
            match own {
                None => {
                    uf.parent[v] = rw;
                    own = Some(rw);
                }
                Some(rv) if rv != rw => {
                    let (cv, cw) = (comp[rv].unwrap(), comp[rw].unwrap());
                    let (survivor, dying, dead) =
                        if cv.older_than(&cw) { (rv, rw, cw) } else { (rw, rv, cv) };
                    if dead.birth.is_finite() && x[v] > dead.birth {
                        pairs.push(PersistencePair {
                            birth: dead.birth,
                            death: x[v],
                            birth_index: dead.birth_index as usize,
                            death_index: v,
                        });
                    }
                    uf.parent[dying] = survivor;
                    own = Some(survivor);
                }
                Some(_) => {}
            }
        }
        if own.is_none() {
            comp[v] = Some(Component { birth: x[v], birth_index: v as i64 });
        }
    }

    let root = uf.find(order[0]);
    let essential = comp[root].expect("root carries a component");
    let essential_index = essential.birth.is_finite().then_some(essential.birth_index as usize);
    Ok(PersistenceDiagram::new(pairs, essential.birth, essential_index, n))
}
