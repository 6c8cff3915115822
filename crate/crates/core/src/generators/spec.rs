use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GenError;
use crate::sample::{Faculty, ParamAssignment, ParamValue, TaskId};

/// One scoring dimension as declared in a family file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub id: String,
    pub name: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumSpec {
    pub name: String,
    /// Narrower inclusive ranges that override the family-wide ones.
    #[serde(default)]
    pub ranges: BTreeMap<String, [i64; 2]>,
}

/// Per-family configuration, loaded from `families/<code>.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub code: String,
    pub name: String,
    pub faculty: Faculty,
    pub prompt: String,
    #[serde(default)]
    pub ranges: BTreeMap<String, [i64; 2]>,
    pub strata: Vec<StratumSpec>,
    pub rubric: Vec<DimensionSpec>,
    #[serde(default = "default_fps")]
    pub frames_per_step: u32,
    #[serde(default = "default_hold")]
    pub hold: u32,
}

fn default_fps() -> u32 {
    crate::render::DEFAULT_FRAMES_PER_STEP
}

fn default_hold() -> u32 {
    crate::render::DEFAULT_HOLD
}

impl FamilySpec {
    pub fn from_toml(text: &str) -> Result<Self, GenError> {
        let spec: FamilySpec = toml::from_str(text).map_err(|e| GenError::Config(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), GenError> {
        TaskId::new(&self.code, self.faculty)?;
        if self.strata.is_empty() {
            return Err(GenError::Config(format!("{}: no difficulty strata", self.code)));
        }
        for (name, [lo, hi]) in self.ranges.iter().chain(self.strata.iter().flat_map(|s| s.ranges.iter())) {
            if lo > hi {
                return Err(GenError::Config(format!("{}: empty range for `{name}`", self.code)));
            }
        }
        for s in &self.strata {
            for (name, [lo, hi]) in &s.ranges {
                if let Some([glo, ghi]) = self.ranges.get(name) {
                    if lo < glo || hi > ghi {
                        return Err(GenError::Config(format!("{}: stratum `{}` widens `{name}`", self.code, s.name)));
                    }
                }
            }
        }
        let sum: f64 = self.rubric.iter().map(|d| d.weight).sum();
        if (sum - 1.0).abs() > 1e-9 || self.rubric.iter().any(|d| !(0.0..=1.0).contains(&d.weight)) {
            return Err(GenError::Config(format!("{}: rubric weights must lie in [0,1] and sum to 1 (got {sum})", self.code)));
        }
        if self.frames_per_step == 0 || self.hold == 0 {
            return Err(GenError::Config(format!("{}: frames_per_step and hold must be positive", self.code)));
        }
        Ok(())
    }

    pub fn task(&self) -> TaskId {
        TaskId::new(&self.code, self.faculty).expect("checked at load")
    }

    pub fn stratum(&self, i: u32) -> Result<Stratum<'_>, GenError> {
        self.strata
            .get(i as usize)
            .map(|s| Stratum { spec: self, index: i, inner: s })
            .ok_or_else(|| GenError::Config(format!("{}: no stratum {i}", self.code)))
    }

    /// Stratum used for sample `index` (round-robin).
    pub fn stratum_for(&self, index: u64) -> u32 {
        (index % self.strata.len() as u64) as u32
    }

    /// Integer parameters (and integer lists) must sit inside their declared
    /// ranges, narrowed by the sample's stratum.
    pub fn check_params(&self, p: &ParamAssignment) -> Result<(), GenError> {
        let st = self.stratum(p.stratum).map_err(|_| GenError::Bounds(format!("stratum {} out of range", p.stratum)))?;
        for name in self.ranges.keys().chain(st.inner.ranges.keys()) {
            let (lo, hi) = st.range(name)?;
            let values: Vec<i64> = match p.values.get(name) {
                Some(ParamValue::Int(v)) => vec![*v],
                Some(ParamValue::Ints(v)) => v.clone(),
                Some(_) => return Err(GenError::Bounds(format!("`{name}` has a non-integer value"))),
                None => return Err(GenError::Bounds(format!("`{name}` is missing"))),
            };
            if let Some(v) = values.iter().find(|v| **v < lo || **v > hi) {
                return Err(GenError::Bounds(format!("`{name}` = {v} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// A difficulty stratum with range lookup.
#[derive(Clone, Copy, Debug)]
pub struct Stratum<'a> {
    pub spec: &'a FamilySpec,
    pub index: u32,
    inner: &'a StratumSpec,
}

impl Stratum<'_> {
    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn range(&self, name: &str) -> Result<(i64, i64), GenError> {
        self.inner
            .ranges
            .get(name)
            .or_else(|| self.spec.ranges.get(name))
            .map(|[lo, hi]| (*lo, *hi))
            .ok_or_else(|| GenError::Config(format!("{}: no range for `{name}`", self.spec.code)))
    }

    /// Uniform draw from the (stratum-narrowed) inclusive range.
    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R, name: &str) -> Result<i64, GenError> {
        let (lo, hi) = self.range(name)?;
        Ok(rng.gen_range(lo..=hi))
    }
}
