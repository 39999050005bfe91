use std::collections::HashMap;

use crate::operator::Effect;

/// Effects closer than this (max entrywise difference) share an id.
const MATCH_TOL: f64 = 1.5e-9;
/// Bucket width of the fingerprint grid; larger than `MATCH_TOL` so that a
/// match always sits in a neighboring cell.
const CELL: f64 = 4e-9;

/// Deduplicated list of effects with stable integer ids.
///
/// Effects within `1e-9` entrywise map to the same id, effects more than `2e-9`
/// apart never do.
#[derive(Clone, Debug, Default)]
pub struct EffectRegistry {
    entries: Vec<Effect>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

/// Real coordinates of the upper triangle: diagonal, then real and imaginary parts.
fn coordinates(e: &Effect) -> Vec<f64> {
    let d = e.dim();
    let mut x = Vec::with_capacity(d * d);
    for i in 0..d {
        x.push(e.op().entry(i, i).re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = e.op().entry(i, j);
            x.push(z.re);
            x.push(z.im);
        }
    }
    x
}

/// Two grid cells: the first coordinate and a fixed mix of all of them. The mix
/// weights have absolute sum one, so it moves no more than the entries do.
fn fingerprint(e: &Effect) -> (i64, i64) {
    let x = coordinates(e);
    let w: Vec<f64> = (0..x.len()).map(|k| 1.0 + ((k as f64 + 1.0) * 0.618_033_988_75).fract()).collect();
    let total: f64 = w.iter().sum();
    let mix: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / total;
    ((x[0] / CELL).floor() as i64, (mix / CELL).floor() as i64)
}

impl EffectRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Effect> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> &[Effect] {
        &self.entries
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.first().map(Effect::dim)
    }

    pub fn find(&self, e: &Effect) -> Option<usize> {
        if self.dim().is_some_and(|d| d != e.dim()) {
            return None;
        }
        let (k1, k2) = fingerprint(e);
        let mut best: Option<(usize, f64)> = None;
        for d1 in -1..=1 {
            for d2 in -1..=1 {
                let Some(ids) = self.buckets.get(&(k1 + d1, k2 + d2)) else { continue };
                for &id in ids {
                    let diff = self.entries[id].op().max_abs_diff(e.op());
                    if diff <= MATCH_TOL && best.is_none_or(|(_, b)| diff < b) {
                        best = Some((id, diff));
                    }
                }
            }
        }
        best.map(|(id, _)| id)
    }

    /// Id of `e`, registering it if no stored effect matches.
    pub fn insert(&mut self, e: &Effect) -> usize {
        if let Some(id) = self.find(e) {
            return id;
        }
        let id = self.entries.len();
        self.entries.push(e.clone());
        self.buckets.entry(fingerprint(e)).or_default().push(id);
        id
    }
}
