//! Exhaustive set searches over vertex subsets, encoded as bitmasks.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_ROBUSTNESS_LIMIT: usize = 14;
pub const DEFAULT_ISO_LIMIT: usize = 22;

/// Largest `n` any exhaustive search accepts, whatever the user limit.
/// The robustness tables hold `2^n` bytes.
pub const HARD_LIMIT: usize = 30;

/// Non-negative exact fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn check_limit(measure: &'static str, n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(HARD_LIMIT);
    if n > limit {
        return Err(Error::ExhaustiveRefused { measure, n, limit });
    }
    Ok(())
}

fn membership(g: &Graph, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.n(),
            });
        }
        inside[v] = true;
    }
    Ok(inside)
}

/// True iff some `v` in `set` has at least `r` neighbors outside `set`.
pub fn is_r_reachable(g: &Graph, set: &[usize], r: usize) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::InvalidArgument(
            "r-reachability needs a nonempty set".into(),
        ));
    }
    let inside = membership(g, set)?;
    Ok(set
        .iter()
        .any(|&v| g.neighbors(v).iter().filter(|&&w| !inside[w]).count() >= r))
}

/// Bitmask form of [`is_r_reachable`] for callers that already hold masks.
pub fn reach_of(masks: &[u64], set: u64) -> u32 {
    let mut best = 0;
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        best = best.max((masks[v] & !set).count_ones());
    }
    best
}

/// Largest `r` such that every pair of nonempty disjoint vertex subsets has
/// at least one `r`-reachable member. Graphs with fewer than two vertices
/// have no such pair and report 0.
///
/// Exact over all `3^n` assignments of vertices to (S1, S2, neither): for a
/// fixed S1 the best partner is the nonempty subset of the complement with
/// the smallest reach, so a subset-minimum table over all `2^n` masks
/// replaces the inner enumeration.
pub fn robustness(g: &Graph, limit: usize) -> Result<usize> {
    let n = g.n();
    check_limit("robustness", n, limit)?;
    if n < 2 {
        return Ok(0);
    }
    let masks = g.neighbor_masks().expect("n below mask width");
    let size = 1usize << n;
    let full = (size - 1) as u64;

    let mut reach = vec![0u8; size];
    for s in 1..size {
        reach[s] = reach_of(&masks, s as u64) as u8;
    }

    // min_sub[c] = min reach over nonempty subsets of c
    let mut min_sub = reach.clone();
    min_sub[0] = u8::MAX;
    for bit in 0..n {
        for c in 0..size {
            if c & (1 << bit) != 0 {
                let without = min_sub[c ^ (1 << bit)];
                if without < min_sub[c] {
                    min_sub[c] = without;
                }
            }
        }
    }

    let mut best = u8::MAX;
    for s1 in 1..size - 1 {
        let partner = min_sub[(full & !(s1 as u64)) as usize];
        best = best.min(reach[s1].max(partner));
    }
    Ok(best as usize)
}

/// `min |boundary(S)| / |S|` over nonempty `S` with `|S| <= n/2`, exact.
///
/// Walks all subsets in Gray-code order, updating the boundary count by one
/// vertex flip per step.
pub fn isoperimetric_constant(g: &Graph, limit: usize) -> Result<Ratio> {
    let n = g.n();
    check_limit("isoperimetric", n, limit)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "isoperimetric constant needs n >= 2, got {n}"
        )));
    }
    let masks = g.neighbor_masks().expect("n below mask width");
    let degrees: Vec<i64> = g.degrees().into_iter().map(|d| d as i64).collect();

    let mut set = 0u64;
    let mut boundary: i64 = 0;
    let mut count: usize = 0;
    let mut best: Option<Ratio> = None;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let inside_neighbors = (masks[v] & set & !(1 << v)).count_ones() as i64;
        if set & (1 << v) == 0 {
            boundary += degrees[v] - 2 * inside_neighbors;
            count += 1;
        } else {
            boundary -= degrees[v] - 2 * inside_neighbors;
            count -= 1;
        }
        set ^= 1 << v;
        if count > 0 && 2 * count <= n {
            let candidate = Ratio::new(boundary as u64, count as u64);
            if best.is_none_or(|b| candidate < b) {
                best = Some(candidate);
            }
        }
    }
    Ok(best.expect("n >= 2 admits a singleton"))
}

/// Edge boundary size of a vertex set.
pub fn boundary_size(g: &Graph, set: &[usize]) -> Result<usize> {
    let inside = membership(g, set)?;
    Ok(g.edges()
        .iter()
        .filter(|&&(i, j)| inside[i] != inside[j])
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_knn_platoon, PlatoonSpec};

    fn platoon(n: usize, k: usize) -> Graph {
        build_knn_platoon(PlatoonSpec::new(n, k).unwrap()).unwrap()
    }

    /// Direct enumeration of all 3^n assignments, independent of the
    /// subset-minimum table.
    fn robustness_by_assignment(g: &Graph) -> usize {
        let n = g.n();
        let masks = g.neighbor_masks().unwrap();
        let total = 3usize.pow(n as u32);
        let mut best = usize::MAX;
        for code in 0..total {
            let (mut s1, mut s2, mut c) = (0u64, 0u64, code);
            for v in 0..n {
                match c % 3 {
                    1 => s1 |= 1 << v,
                    2 => s2 |= 1 << v,
                    _ => {}
                }
                c /= 3;
            }
            if s1 == 0 || s2 == 0 {
                continue;
            }
            let r = reach_of(&masks, s1).max(reach_of(&masks, s2)) as usize;
            best = best.min(r);
        }
        best
    }

    fn iso_by_subsets(g: &Graph) -> Ratio {
        let n = g.n();
        (1u64..(1 << n))
            .filter(|s| 2 * s.count_ones() as usize <= n)
            .map(|s| {
                let set: Vec<usize> = (0..n).filter(|v| s >> v & 1 == 1).collect();
                Ratio::new(boundary_size(g, &set).unwrap() as u64, set.len() as u64)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn ratio_basics() {
        assert_eq!(Ratio::new(6, 4), Ratio { num: 3, den: 2 });
        assert!(Ratio::new(1, 2) < Ratio::new(2, 3));
        assert_eq!(Ratio::new(0, 5), Ratio { num: 0, den: 1 });
        assert_eq!(Ratio::new(3, 2).to_string(), "3/2");
    }

    #[test]
    fn reachability_examples() {
        let path = Graph::path(3);
        assert!(is_r_reachable(&path, &[0], 1).unwrap());
        assert!(!is_r_reachable(&path, &[0], 2).unwrap());
        assert!(is_r_reachable(&platoon(6, 2), &[0, 1], 2).unwrap());
        assert!(is_r_reachable(&path, &[], 1).is_err());
    }

    #[test]
    fn robustness_examples() {
        for (n, k) in [(6, 1), (6, 2), (7, 3)] {
            assert_eq!(robustness(&platoon(n, k), 14).unwrap(), k, "P({n},{k})");
        }
        assert_eq!(robustness(&Graph::matched_cliques(4), 14).unwrap(), 1);
        assert_eq!(robustness(&Graph::complete(6), 14).unwrap(), 3);
    }

    #[test]
    fn robustness_matches_assignment_enumeration() {
        let graphs = [
            Graph::path(5),
            Graph::star(6),
            Graph::cycle(7).unwrap(),
            Graph::complete(5),
            Graph::matched_cliques(3),
            platoon(8, 3),
            platoon(9, 5),
            Graph::new(5, [(0, 1), (2, 3)]).unwrap(),
        ];
        for g in &graphs {
            assert_eq!(
                robustness(g, 14).unwrap(),
                robustness_by_assignment(g),
                "{g:?}"
            );
        }
    }

    #[test]
    fn robustness_refuses_over_limit() {
        let g = platoon(15, 2);
        assert!(matches!(
            robustness(&g, DEFAULT_ROBUSTNESS_LIMIT),
            Err(Error::ExhaustiveRefused {
                n: 15,
                limit: 14,
                ..
            })
        ));
        assert_eq!(robustness(&g, 15).unwrap(), 2);
    }

    #[test]
    fn iso_examples() {
        assert_eq!(
            isoperimetric_constant(&platoon(4, 1), 22).unwrap(),
            Ratio::new(1, 2)
        );
        assert_eq!(
            isoperimetric_constant(&platoon(5, 2), 22).unwrap(),
            Ratio::new(3, 2)
        );
        assert_eq!(
            isoperimetric_constant(&Graph::complete(4), 22).unwrap(),
            Ratio::new(2, 1)
        );
        assert!(isoperimetric_constant(&Graph::empty(1), 22).is_err());
        assert!(matches!(
            isoperimetric_constant(&platoon(23, 1), DEFAULT_ISO_LIMIT),
            Err(Error::ExhaustiveRefused { n: 23, .. })
        ));
    }

    #[test]
    fn iso_gray_code_matches_direct_count() {
        let graphs = [
            Graph::path(6),
            Graph::star(7),
            Graph::cycle(8).unwrap(),
            Graph::matched_cliques(4),
            platoon(9, 2),
            platoon(10, 4),
            Graph::new(6, [(0, 1), (1, 2), (3, 4)]).unwrap(),
        ];
        for g in &graphs {
            assert_eq!(
                isoperimetric_constant(g, 22).unwrap(),
                iso_by_subsets(g),
                "{g:?}"
            );
        }
    }

    #[test]
    fn boundary_of_half_platoon() {
        // 1 + 2 + ... + k edges leave the first floor(n/2) vehicles
        let g = platoon(10, 3);
        assert_eq!(boundary_size(&g, &[0, 1, 2, 3, 4]).unwrap(), 6);
    }
}
