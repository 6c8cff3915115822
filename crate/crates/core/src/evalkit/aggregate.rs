//! Sample scores to benchmark tables: sample → task → faculty / split.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EvalError, ScoreReport};
use crate::sample::{Faculty, Split};

/// One scored (model, sample) pair; also the scores.csv row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub model: String,
    pub task: String,
    pub split: Split,
    pub faculty: Faculty,
    pub index: u64,
    pub total: f64,
    /// `id=score` pairs joined by `;`.
    pub dimensions: String,
}

impl ScoreRecord {
    pub fn from_report(model: &str, faculty: Faculty, r: &ScoreReport) -> Self {
        let dimensions = r.dimensions.iter().map(|d| format!("{}={:.6}", d.id, d.score)).collect::<Vec<_>>().join(";");
        ScoreRecord { model: model.to_string(), task: r.task.clone(), split: r.split, faculty, index: r.index, total: r.total, dimensions }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitAverages {
    /// Mean over the split's tasks.
    pub average: f64,
    /// Mean over each faculty's tasks, in `Faculty::ALL` order; `None` when
    /// the split has no task of that faculty.
    pub faculties: Vec<(Faculty, Option<f64>)>,
}

impl SplitAverages {
    pub fn faculty(&self, f: Faculty) -> Option<f64> {
        self.faculties.iter().find(|(g, _)| *g == f).and_then(|(_, v)| *v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub model: String,
    pub overall: f64,
    pub id: SplitAverages,
    pub ood: SplitAverages,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub rows: Vec<ModelRow>,
}

/// Half-up rounding to 3 decimals, tolerant of binary representation
/// error (0.3705 rounds up).
pub fn round3(x: f64) -> f64 {
    (x * 1000.0 + 0.5 + 1e-9).floor() / 1000.0
}

fn mean(v: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn split_averages(tasks: &BTreeMap<String, (Faculty, f64)>, split: Split) -> Result<SplitAverages, EvalError> {
    let average = mean(tasks.values().map(|(_, v)| *v)).ok_or_else(|| EvalError::EmptySplit(split.to_string()))?;
    let faculties = Faculty::ALL.iter().map(|&f| (f, mean(tasks.values().filter(|(g, _)| *g == f).map(|(_, v)| *v)))).collect();
    Ok(SplitAverages { average, faculties })
}

/// Task means over samples, then unweighted means over tasks. Both test
/// splits must be present for every model; training records are rejected.
pub fn aggregate(records: &[ScoreRecord]) -> Result<BenchmarkTable, EvalError> {
    type Key = (String, Split, String);
    let mut sums: BTreeMap<Key, (Faculty, f64, usize)> = BTreeMap::new();
    for r in records {
        if r.split == Split::Train {
            return Err(EvalError::UnknownRecord(format!("{} {} is a training sample", r.task, r.index)));
        }
        let e = sums.entry((r.model.clone(), r.split, r.task.clone())).or_insert((r.faculty, 0.0, 0));
        if e.0 != r.faculty {
            return Err(EvalError::UnknownRecord(format!("{} listed under both {} and {}", r.task, e.0, r.faculty)));
        }
        e.1 += r.total;
        e.2 += 1;
    }
    let mut per_model: BTreeMap<String, BTreeMap<Split, BTreeMap<String, (Faculty, f64)>>> = BTreeMap::new();
    for ((model, split, task), (f, s, n)) in sums {
        per_model.entry(model).or_default().entry(split).or_default().insert(task, (f, s / n as f64));
    }
    let mut rows = Vec::new();
    for (model, splits) in per_model {
        let empty = BTreeMap::new();
        let id = split_averages(splits.get(&Split::TestInDomain).unwrap_or(&empty), Split::TestInDomain)?;
        let ood = split_averages(splits.get(&Split::TestOutOfDomain).unwrap_or(&empty), Split::TestOutOfDomain)?;
        rows.push(ModelRow { model, overall: (id.average + ood.average) / 2.0, id, ood });
    }
    Ok(BenchmarkTable { rows })
}

impl BenchmarkTable {
    pub fn row(&self, model: &str) -> Option<&ModelRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn header() -> Vec<String> {
        let mut h = vec!["model".to_string(), "overall".to_string(), "id_avg".to_string()];
        h.extend(Faculty::ALL.iter().map(|f| format!("id_{}", f.short().to_lowercase())));
        h.push("ood_avg".to_string());
        h.extend(Faculty::ALL.iter().map(|f| format!("ood_{}", f.short().to_lowercase())));
        h
    }

    /// Rows as 3-decimal strings in table column order; empty faculty cells are `-`.
    pub fn cells(&self) -> Vec<Vec<String>> {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{:.3}", round3(x)));
        self.rows
            .iter()
            .map(|r| {
                let mut c = vec![r.model.clone(), fmt(Some(r.overall)), fmt(Some(r.id.average))];
                c.extend(r.id.faculties.iter().map(|(_, v)| fmt(*v)));
                c.push(fmt(Some(r.ood.average)));
                c.extend(r.ood.faculties.iter().map(|(_, v)| fmt(*v)));
                c
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), EvalError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::header())?;
        for row in self.cells() {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Fixed-width text rendering.
    pub fn to_text(&self) -> String {
        let mut lines = vec![Self::header()];
        lines.extend(self.cells());
        let widths: Vec<usize> = (0..lines[0].len()).map(|i| lines.iter().map(|l| l[i].len()).max().unwrap_or(0)).collect();
        lines
            .iter()
            .map(|l| l.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string() + "\n")
            .collect()
    }
}

pub fn write_scores_csv<W: Write>(records: &[ScoreRecord], w: W) -> Result<(), EvalError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_scores_csv<R: Read>(r: R) -> Result<Vec<ScoreRecord>, EvalError> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(EvalError::from)).collect()
}
