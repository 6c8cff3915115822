//! Pairwise human preference records.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{spearman, AnalysisError, CapabilityMatrix};
use crate::evalkit::ScoreRecord;
use crate::sample::{Faculty, Split};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    A,
    B,
    #[serde(rename = "tie")]
    Tie,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub sample: String,
    #[serde(rename = "modelA")]
    pub model_a: String,
    #[serde(rename = "modelB")]
    pub model_b: String,
    pub outcome: Outcome,
}

impl PairRecord {
    pub fn new(sample: &str, a: &str, b: &str, outcome: Outcome) -> Self {
        PairRecord { sample: sample.into(), model_a: a.into(), model_b: b.into(), outcome }
    }

    /// Points awarded to (A, B).
    pub fn points(&self) -> (f64, f64) {
        match self.outcome {
            Outcome::A => (1.0, 0.0),
            Outcome::B => (0.0, 1.0),
            Outcome::Tie => (0.5, 0.5),
        }
    }

    /// Split encoded in a `<task>/<split>/<index>` sample id.
    pub fn split(&self) -> Option<Split> {
        self.sample.split('/').nth(1)?.parse().ok()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairwiseTable {
    records: Vec<PairRecord>,
}

impl PairwiseTable {
    /// Rejects self-comparisons and repeated unordered pairs within a sample.
    pub fn new(records: Vec<PairRecord>) -> Result<Self, AnalysisError> {
        let mut seen = BTreeSet::new();
        for r in &records {
            if r.model_a == r.model_b {
                return Err(AnalysisError::InvalidRecord(format!("{} compares {} with itself", r.sample, r.model_a)));
            }
            let key = (r.sample.clone(), r.model_a.clone().min(r.model_b.clone()), r.model_a.clone().max(r.model_b.clone()));
            if !seen.insert(key) {
                return Err(AnalysisError::InvalidRecord(format!("{} compares {} and {} twice", r.sample, r.model_a, r.model_b)));
            }
        }
        Ok(PairwiseTable { records })
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    /// Cross-verification: where a pairwise preference contradicts the
    /// absolute scores of the two outputs, the absolute judgment wins.
    /// `scores` is keyed by (sample, model). Returns the number revised.
    pub fn revise_with_absolute(&mut self, scores: &BTreeMap<(String, String), f64>) -> usize {
        let mut revised = 0;
        for r in &mut self.records {
            let (Some(a), Some(b)) = (scores.get(&(r.sample.clone(), r.model_a.clone())), scores.get(&(r.sample.clone(), r.model_b.clone()))) else {
                continue;
            };
            let absolute = if a > b {
                Outcome::A
            } else if b > a {
                Outcome::B
            } else {
                Outcome::Tie
            };
            if absolute != r.outcome {
                r.outcome = absolute;
                revised += 1;
            }
        }
        revised
    }

    /// Records whose sample belongs to `split`.
    pub fn for_split(&self, split: Split) -> PairwiseTable {
        PairwiseTable { records: self.records.iter().filter(|r| r.split() == Some(split)).cloned().collect() }
    }

    pub fn ratio(&self, model: &str) -> Result<f64, AnalysisError> {
        let (mut pts, mut n) = (0.0, 0usize);
        for r in &self.records {
            let (a, b) = r.points();
            if r.model_a == model {
                pts += a;
                n += 1;
            } else if r.model_b == model {
                pts += b;
                n += 1;
            }
        }
        if n == 0 {
            return Err(AnalysisError::UndefinedRatio(model.to_string()));
        }
        Ok(pts / n as f64)
    }

    pub fn models(&self) -> BTreeSet<String> {
        self.records.iter().flat_map(|r| [r.model_a.clone(), r.model_b.clone()]).collect()
    }
}

/// Points over appearances for every model in the table.
pub fn win_ratios(t: &PairwiseTable) -> Result<BTreeMap<String, f64>, AnalysisError> {
    t.models().into_iter().map(|m| t.ratio(&m).map(|r| (m, r))).collect()
}

pub fn read_annotations<R: Read>(r: R) -> Result<PairwiseTable, AnalysisError> {
    let records = csv::Reader::from_reader(r).deserialize().collect::<Result<Vec<PairRecord>, _>>()?;
    PairwiseTable::new(records)
}

/// Human win ratios next to automatic scores for one split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Alignment {
    pub split: Split,
    /// (model, win ratio, benchmark score)
    pub pairs: Vec<(String, f64, f64)>,
    pub rho: Option<f64>,
}

/// Benchmark score per model on `split`: task means, then their mean.
fn split_scores(records: &[ScoreRecord], split: Split) -> BTreeMap<String, f64> {
    let mut tasks: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.split == split) {
        let e = tasks.entry((r.model.clone(), r.task.clone())).or_default();
        e.0 += r.total;
        e.1 += 1;
    }
    let mut per_model: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((m, _), (s, n)) in tasks {
        per_model.entry(m).or_default().push(s / n as f64);
    }
    per_model.into_iter().map(|(m, v)| (m, v.iter().sum::<f64>() / v.len() as f64)).collect()
}

pub fn alignment(records: &[ScoreRecord], table: &PairwiseTable, split: Split) -> Result<Alignment, AnalysisError> {
    let ratios = win_ratios(&table.for_split(split))?;
    let scores = split_scores(records, split);
    let pairs: Vec<(String, f64, f64)> = ratios.iter().filter_map(|(m, r)| scores.get(m).map(|s| (m.clone(), *r, *s))).collect();
    let x: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    Ok(Alignment { split, rho: spearman(&x, &y).ok(), pairs })
}

pub fn write_matrix_csv<W: Write>(m: &CapabilityMatrix, w: W) -> Result<(), AnalysisError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["faculty".to_string()];
    header.extend(Faculty::ALL.iter().map(|f| f.name().to_string()));
    out.write_record(&header)?;
    for (i, f) in Faculty::ALL.iter().enumerate() {
        let mut row = vec![f.name().to_string()];
        row.extend(m.values[i].iter().map(|v| format!("{v:.6}")));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_wins_and_a_tie() {
        let t = PairwiseTable::new(vec![
            PairRecord::new("s1", "A", "B", Outcome::A),
            PairRecord::new("s2", "A", "B", Outcome::A),
            PairRecord::new("s3", "B", "A", Outcome::B),
            PairRecord::new("s4", "A", "B", Outcome::Tie),
        ])
        .unwrap();
        let r = win_ratios(&t).unwrap();
        assert_eq!(r["A"], 0.875);
        assert_eq!(r["B"], 0.125);
        assert!(matches!(t.ratio("C"), Err(AnalysisError::UndefinedRatio(_))));
    }

    #[test]
    fn duplicates_and_self_pairs_are_rejected() {
        assert!(PairwiseTable::new(vec![PairRecord::new("s", "A", "A", Outcome::Tie)]).is_err());
        assert!(PairwiseTable::new(vec![PairRecord::new("s", "A", "B", Outcome::A), PairRecord::new("s", "B", "A", Outcome::A)]).is_err());
    }

    #[test]
    fn absolute_scores_override_contradictions() {
        let mut t = PairwiseTable::new(vec![PairRecord::new("s", "A", "B", Outcome::A)]).unwrap();
        let scores = BTreeMap::from([(("s".to_string(), "A".to_string()), 0.2), (("s".to_string(), "B".to_string()), 0.9)]);
        assert_eq!(t.revise_with_absolute(&scores), 1);
        assert_eq!(t.records()[0].outcome, Outcome::B);
    }

    #[test]
    fn annotation_csv() {
        let text = "sample,modelA,modelB,outcome\nG-15/test-id/000001,x,y,A\nG-15/test-ood/000001,x,y,tie\n";
        let t = read_annotations(text.as_bytes()).unwrap();
        assert_eq!(t.records().len(), 2);
        assert_eq!(t.records()[1].split(), Some(Split::TestOutOfDomain));
        assert_eq!(win_ratios(&t.for_split(Split::TestInDomain)).unwrap()["x"], 1.0);
    }
}
