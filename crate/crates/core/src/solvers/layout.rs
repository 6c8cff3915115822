use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SolveError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SortObject {
    pub kind: String,
    pub size: u32,
    pub color: [u8; 3],
    pub position: [f64; 2],
}

/// Evenly spaced slots on one horizontal line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotLayout {
    pub first_x: f64,
    pub spacing: f64,
    pub y: f64,
}

impl Default for SlotLayout {
    /// Six slots centred on a 512 px canvas.
    fn default() -> Self {
        SlotLayout { first_x: 56.0, spacing: 80.0, y: 256.0 }
    }
}

impl SlotLayout {
    pub fn slot(&self, i: usize) -> [f64; 2] {
        [self.first_x + self.spacing * i as f64, self.y]
    }
}

/// Target slot for each object (same order as the input). Types are grouped
/// in the order their leftmost instance appears; sizes ascend inside a group.
pub fn stable_sort_layout(objects: &[SortObject], slots: SlotLayout) -> Result<Vec<[f64; 2]>, SolveError> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, o) in objects.iter().enumerate() {
        groups.entry(o.kind.as_str()).or_default().push(i);
    }
    if groups.len() != 2 || groups.values().any(|g| g.len() != 3) {
        return Err(SolveError::InvalidInput(format!("expected 2 types x 3 sizes, got {} objects in {} types", objects.len(), groups.len())));
    }
    for (kind, g) in &groups {
        let mut sizes: Vec<u32> = g.iter().map(|&i| objects[i].size).collect();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() != g.len() {
            return Err(SolveError::InvalidInput(format!("duplicate sizes within type `{kind}`")));
        }
    }
    let leftmost = |g: &[usize]| g.iter().map(|&i| objects[i].position[0]).fold(f64::INFINITY, f64::min);
    let mut ordered: Vec<(&str, Vec<usize>)> = groups.into_iter().collect();
    ordered.sort_by(|a, b| leftmost(&a.1).total_cmp(&leftmost(&b.1)).then(a.0.cmp(b.0)));

    let mut out = vec![[0.0; 2]; objects.len()];
    let mut slot = 0;
    for (_, mut g) in ordered {
        g.sort_by_key(|&i| objects[i].size);
        for i in g {
            out[i] = slots.slot(slot);
            slot += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(kind: &str, size: u32, x: f64) -> SortObject {
        SortObject { kind: kind.into(), size, color: [0, 0, 0], position: [x, 100.0] }
    }

    #[test]
    fn fixed_point() {
        let l = SlotLayout::default();
        let objs: Vec<SortObject> = [("circle", 20), ("circle", 30), ("circle", 40), ("square", 20), ("square", 25), ("square", 50)]
            .iter()
            .enumerate()
            .map(|(i, (k, s))| SortObject { position: l.slot(i), ..obj(k, *s, 0.0) })
            .collect();
        let out = stable_sort_layout(&objs, l).unwrap();
        assert!(objs.iter().zip(&out).all(|(o, p)| o.position == *p));
    }

    #[test]
    fn reversed_group_is_reordered() {
        let objs = vec![obj("square", 50, 10.0), obj("square", 30, 60.0), obj("square", 20, 90.0), obj("circle", 10, 200.0), obj("circle", 20, 300.0), obj("circle", 30, 400.0)];
        let out = stable_sort_layout(&objs, SlotLayout::default()).unwrap();
        assert_eq!(out[2][0], 56.0);
        assert_eq!(out[0][0], 216.0);
        assert_eq!(out[3][0], 296.0);
    }

    #[test]
    fn duplicate_sizes_rejected() {
        let objs = vec![obj("a", 10, 0.0), obj("a", 10, 1.0), obj("a", 20, 2.0), obj("b", 1, 3.0), obj("b", 2, 4.0), obj("b", 3, 5.0)];
        assert!(stable_sort_layout(&objs, SlotLayout::default()).is_err());
    }
}
