use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{family, GenError};
use crate::sample::Split;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCounts {
    pub train_per_task: u64,
    pub test_per_task: u64,
}

impl Default for PlanCounts {
    fn default() -> Self {
        PlanCounts { train_per_task: 10_000, test_per_task: 50 }
    }
}

/// `count` consecutive indices starting at `start` for one (family, split).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub family: String,
    pub split: Split,
    pub start: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationPlan {
    pub entries: Vec<PlanEntry>,
}

impl GenerationPlan {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, split: Split) -> u64 {
        self.entries.iter().filter(|e| e.split == split).map(|e| e.count).sum()
    }

    /// Every (family, split, index) in plan order.
    pub fn items(&self) -> impl Iterator<Item = (&str, Split, u64)> + '_ {
        self.entries.iter().flat_map(|e| (e.start..e.start + e.count).map(move |i| (e.family.as_str(), e.split, i)))
    }
}

/// In-domain families get train and in-domain test indices; held-out
/// families get out-of-domain test indices only.
pub fn build_split_plan(families: &[&str], counts: PlanCounts, ood: &BTreeSet<String>) -> Result<GenerationPlan, GenError> {
    if families.is_empty() {
        return Err(GenError::Plan("no task families given".into()));
    }
    let known: BTreeSet<&str> = families.iter().copied().collect();
    if known.len() != families.len() {
        return Err(GenError::Plan("family listed twice".into()));
    }
    if let Some(f) = ood.iter().find(|f| !known.contains(f.as_str())) {
        return Err(GenError::Plan(format!("held-out family {f} is not in the family list")));
    }
    let mut entries = Vec::new();
    for code in families {
        family(code)?;
        let mut push = |split, count| {
            if count > 0 {
                entries.push(PlanEntry { family: code.to_string(), split, start: 0, count });
            }
        };
        if ood.contains(*code) {
            push(Split::TestOutOfDomain, counts.test_per_task);
        } else {
            push(Split::Train, counts.train_per_task);
            push(Split::TestInDomain, counts.test_per_task);
        }
    }
    Ok(GenerationPlan { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::family_codes;
    use crate::sample::{derive_seed, TaskId};
    use std::collections::HashSet;

    #[test]
    fn seven_in_domain_families_get_training() {
        let codes = family_codes();
        assert_eq!(codes.len(), 9);
        let ood: BTreeSet<String> = ["O-85".to_string(), "G-35".to_string()].into();
        let plan = build_split_plan(&codes, PlanCounts { train_per_task: 100, test_per_task: 50 }, &ood).unwrap();
        assert_eq!(plan.count(Split::Train), 700);
        assert_eq!(plan.count(Split::TestInDomain), 350);
        assert_eq!(plan.count(Split::TestOutOfDomain), 100);
        assert!(plan.entries.iter().all(|e| !(ood.contains(&e.family) && e.split == Split::Train)));

        let mut seen = HashSet::new();
        for (f, s, i) in plan.items() {
            assert!(seen.insert((f.to_string(), derive_seed(&TaskId::known(f).unwrap(), s, i).unwrap())));
        }
    }

    #[test]
    fn empty_and_unknown() {
        assert!(build_split_plan(&[], PlanCounts::default(), &BTreeSet::new()).is_err());
        assert!(build_split_plan(&["Z-1"], PlanCounts::default(), &BTreeSet::new()).is_err());
        assert!(build_split_plan(&["G-15"], PlanCounts::default(), &["G-16".to_string()].into()).is_err());
        assert_eq!(PlanCounts::default().test_per_task, 50);
    }
}
