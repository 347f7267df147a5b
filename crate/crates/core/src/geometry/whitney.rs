use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A closed interval [lo, hi] (or, as a member of an open set, the open
/// interval (lo, hi)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Same centre, length multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> Interval {
        let c = self.center();
        let h = 0.5 * self.len() * factor;
        Interval::new(c - h, c + h)
    }
}

/// Output of a Whitney decomposition.
#[derive(Debug, Clone, Default, Serialize)]
pub struct WhitneyDecomposition {
    /// Pieces with δ/4 <= diam(Q) / dist(Q, Ωᶜ) <= δ.
    pub pieces: Vec<Interval>,
    /// Cells of the finest level next to ∂Ω that the ratio test never
    /// accepted. Together with `pieces` they tile Ω exactly when the
    /// endpoints of Ω lie on the finest dyadic grid.
    pub boundary: Vec<Interval>,
    /// Largest number of doubled pieces 2Q containing a common point.
    pub doubled_overlap: usize,
}

/// Distance from the closed interval `q` to the complement of the open set
/// `set` (a sorted list of disjoint open intervals); zero if `q` is not
/// inside one component.
fn dist_to_complement(q: &Interval, set: &[Interval]) -> f64 {
    let k = set.partition_point(|c| c.hi < q.hi);
    match set.get(k) {
        Some(c) if c.lo <= q.lo && q.hi <= c.hi => (q.lo - c.lo).min(c.hi - q.hi),
        _ => 0.0,
    }
}

fn normalize(set: &[Interval]) -> Vec<Interval> {
    let mut v: Vec<Interval> = set.iter().copied().filter(|c| !c.is_empty()).collect();
    v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for c in v {
        match out.last_mut() {
            // open intervals that overlap merge; touching ones stay apart
            Some(last) if c.lo < last.hi => last.hi = last.hi.max(c.hi),
            _ => out.push(c),
        }
    }
    out
}

/// Dyadic Whitney decomposition of `set ∩ root` using the dyadic
/// subintervals of `root` down to `depth` bisections.
///
/// A dyadic interval Q is accepted when diam Q <= δ·dist(Q, Ωᶜ) and its
/// parent is not; finest cells inside Ω that are never accepted go to
/// `boundary`. For nested sets Ω' ⊂ Ω the accepted pieces of Ω' refine
/// those of Ω, since the acceptance test for Ω' implies the one for Ω.
pub(crate) fn whitney_dyadic(
    root: Interval,
    depth: u32,
    set: &[Interval],
    delta: f64,
) -> WhitneyDecomposition {
    let set = normalize(set);
    let mut out = WhitneyDecomposition::default();
    let mut stack = vec![(root, 0u32)];
    while let Some((q, level)) = stack.pop() {
        // skip dyadic intervals that miss Ω entirely
        let touches = set.iter().any(|c| c.lo < q.hi && q.lo < c.hi);
        if !touches {
            continue;
        }
        let d = dist_to_complement(&q, &set);
        if q.len() <= delta * d {
            out.pieces.push(q);
            continue;
        }
        if level == depth {
            // keep finest cells lying inside Ω (up to the cell midpoint)
            let mid = q.center();
            if set.iter().any(|c| c.lo < mid && mid < c.hi) {
                out.boundary.push(q);
            }
            continue;
        }
        let m = q.center();
        stack.push((Interval::new(m, q.hi), level + 1));
        stack.push((Interval::new(q.lo, m), level + 1));
    }
    out.pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    out.boundary.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    out.doubled_overlap = doubled_overlap(&out.pieces);
    out
}

fn doubled_overlap(pieces: &[Interval]) -> usize {
    let mut events: Vec<(f64, i32)> = pieces
        .iter()
        .flat_map(|q| {
            let d = q.dilate(2.0);
            [(d.lo, 1), (d.hi, -1)]
        })
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let (mut cur, mut best) = (0i32, 0i32);
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// Whitney decomposition of a finite union of open intervals, built per
/// connected component by bisection from the component inward. Pieces
/// shorter than `min_len` are not generated; the cells left at that
/// resolution are returned in `boundary`.
pub fn whitney_1d(open_set: &[Interval], delta: f64, min_len: f64) -> Result<WhitneyDecomposition> {
    if !(delta > 0.0 && delta <= 0.125) {
        return invalid(format!("delta must lie in (0, 1/8], got {delta}"));
    }
    if !(min_len > 0.0) {
        return invalid("min_len must be positive");
    }
    let set = normalize(open_set);
    let mut out = WhitneyDecomposition::default();
    for comp in &set {
        let depth = (comp.len() / min_len).log2().ceil().max(0.0) as u32;
        let part = whitney_dyadic(*comp, depth, std::slice::from_ref(comp), delta);
        out.pieces.extend(part.pieces);
        out.boundary.extend(part.boundary);
    }
    out.doubled_overlap = doubled_overlap(&out.pieces);
    Ok(out)
}
