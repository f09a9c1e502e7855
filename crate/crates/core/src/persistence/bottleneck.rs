use super::diagram::PersistenceDiagram;

type Point = (f64, f64);

fn linf(a: Point, b: Point) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diag_dist(p: Point) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Exact bottleneck distance between the finite parts of two diagrams.
///
/// Binary search over the candidate values (pairwise L∞ distances and
/// distances to the diagonal), with a bipartite matching test at each
/// step. At radius `r` a point farther than `r` from the diagonal must be
/// matched to a point of the other diagram; every other point may fall to
/// the diagonal. By the Mendelsohn–Dulmage theorem a matching covering both
/// must-sets exists iff one exists for each side separately, so the test is
/// two Hopcroft–Karp runs on small graphs instead of one run on the full
/// diagonal-augmented graph.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let pa: Vec<Point> = a.pairs().iter().map(|p| (p.birth, p.death)).collect();
    let pb: Vec<Point> = b.pairs().iter().map(|p| (p.birth, p.death)).collect();
    bottleneck_points(&pa, &pb)
}

pub(crate) fn bottleneck_points(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    // matching everything to the diagonal is always feasible
    let upper = a.iter().chain(b).map(|&p| diag_dist(p)).fold(0.0, f64::max);

    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    candidates.extend(a.iter().chain(b).map(|&p| diag_dist(p)));
    for &p in a {
        for &q in b {
            let d = linf(p, q);
            if d < upper {
                candidates.push(d);
            }
        }
    }
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();

    // smallest feasible candidate; the last one (== upper) is always feasible
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

fn feasible(a: &[Point], b: &[Point], r: f64) -> bool {
    covers_must_side(a, b, r) && covers_must_side(b, a, r)
}

/// Can every point of `side` that is farther than `r` from the diagonal be
/// matched to a distinct point of `other` within L∞ distance `r`?
fn covers_must_side(side: &[Point], other: &[Point], r: f64) -> bool {
    let must: Vec<Point> = side.iter().copied().filter(|&p| diag_dist(p) > r).collect();
    if must.is_empty() {
        return true;
    }
    if must.len() > other.len() {
        return false;
    }
    let adjacency: Vec<Vec<usize>> = must
        .iter()
        .map(|&p| (0..other.len()).filter(|&j| linf(p, other[j]) <= r).collect())
        .collect();
    if adjacency.iter().any(Vec::is_empty) {
        return false;
    }
    hopcroft_karp(&adjacency, other.len()) == must.len()
}

const UNMATCHED: usize = usize::MAX;

/// Maximum matching size of a bipartite graph given as left-side adjacency.
pub(crate) fn hopcroft_karp(adjacency: &[Vec<usize>], n_right: usize) -> usize {
    let n_left = adjacency.len();
    let mut match_left = vec![UNMATCHED; n_left];
    let mut match_right = vec![UNMATCHED; n_right];
    let mut dist = vec![0u32; n_left];
    let mut size = 0;

    loop {
        // BFS layering from free left vertices
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == UNMATCHED {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                let w = match_right[v];
                if w == UNMATCHED {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..n_left {
            if match_left[u] == UNMATCHED
                && augment(u, adjacency, &mut match_left, &mut match_right, &mut dist)
            {
                size += 1;
            }
        }
    }
    size
}

fn augment(
    u: usize,
    adjacency: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [u32],
) -> bool {
    for &v in &adjacency[u] {
        let w = match_right[v];
        let ok = w == UNMATCHED
            || (dist[w] == dist[u] + 1 && augment(w, adjacency, match_left, match_right, dist));
        if ok {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    dist[u] = u32::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive minimum over all partial matchings; points left out go
    /// to the diagonal.
    fn brute(a: &[Point], b: &[Point]) -> f64 {
        fn rec(i: usize, a: &[Point], b: &[Point], used: &mut Vec<bool>, cur: f64, best: &mut f64) {
            if cur >= *best {
                return;
            }
            if i == a.len() {
                let rest = b
                    .iter()
                    .zip(used.iter())
                    .filter(|(_, &u)| !u)
                    .map(|(&q, _)| diag_dist(q))
                    .fold(cur, f64::max);
                *best = best.min(rest);
                return;
            }
            rec(i + 1, a, b, used, cur.max(diag_dist(a[i])), best);
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    rec(i + 1, a, b, used, cur.max(linf(a[i], b[j])), best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
        best
    }

    #[test]
    fn spec_cases() {
        assert_eq!(bottleneck_points(&[(0.0, 2.0)], &[]), 1.0);
        assert_eq!(bottleneck_points(&[], &[]), 0.0);
        let a = [(0.0, 2.0), (0.0, 10.0)];
        let b = [(0.0, 3.0), (1.0, 10.0)];
        assert_eq!(brute(&a, &b), 1.0);
        assert_eq!(bottleneck_points(&a, &b), 1.0);
        assert_eq!(bottleneck_points(&a, &a), 0.0);
    }

    #[test]
    fn matches_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gen = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Point> {
            let k = rng.gen_range(0..5);
            (0..k)
                .map(|_| {
                    let b: f64 = rng.gen_range(0.0..5.0);
                    (b, b + rng.gen_range(0.0..4.0))
                })
                .collect()
        };
        for _ in 0..400 {
            let a = gen(&mut rng);
            let b = gen(&mut rng);
            let want = brute(&a, &b);
            let got = bottleneck_points(&a, &b);
            assert_eq!(got, want, "a={a:?} b={b:?}");
            assert_eq!(bottleneck_points(&b, &a), want);
        }
    }

    #[test]
    fn hopcroft_karp_small() {
        // perfect matching exists only through an augmenting path
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        assert_eq!(hopcroft_karp(&adj, 3), 3);
        let adj = vec![vec![0], vec![0], vec![0]];
        assert_eq!(hopcroft_karp(&adj, 1), 1);
    }
}
