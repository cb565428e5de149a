use serde::{Deserialize, Serialize};

/// Maximal true-runs of a boolean track as half-open `(start, end)` pairs,
/// sorted, disjoint and never adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    pub runs: Vec<(usize, usize)>,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.runs.iter().copied()
    }

    /// Rebuilds the boolean track of length `len`.
    pub fn to_track(&self, len: usize) -> Vec<bool> {
        let mut t = vec![false; len];
        for (a, b) in self.iter() {
            t[a..b].iter_mut().for_each(|v| *v = true);
        }
        t
    }
}

pub fn segment_intervals(track: &[bool]) -> IntervalSet {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &v) in track.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, track.len()));
    }
    IntervalSet { runs }
}
