use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SampleError;
use crate::render::{Frame, FrameSequence, SceneSpec};
use crate::solvers::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Faculty {
    Abstraction,
    Knowledge,
    Perception,
    Spatiality,
    Transformation,
}

impl Faculty {
    /// Column order used by benchmark tables.
    pub const ALL: [Faculty; 5] = [Faculty::Abstraction, Faculty::Knowledge, Faculty::Perception, Faculty::Spatiality, Faculty::Transformation];

    pub fn name(self) -> &'static str {
        match self {
            Faculty::Abstraction => "Abstraction",
            Faculty::Knowledge => "Knowledge",
            Faculty::Perception => "Perception",
            Faculty::Spatiality => "Spatiality",
            Faculty::Transformation => "Transformation",
        }
    }

    pub fn short(self) -> &'static str {
        &self.name()[..4]
    }
}

impl fmt::Display for Faculty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Faculty {
    type Err = SampleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Faculty::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s) || f.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| SampleError::InvalidTaskId(format!("unknown faculty `{s}`")))
    }
}

/// Faculty assignment of the families this crate ships.
pub const KNOWN_FACULTIES: [(&str, Faculty); 9] = [
    ("G-3", Faculty::Perception),
    ("G-15", Faculty::Spatiality),
    ("G-16", Faculty::Spatiality),
    ("G-31", Faculty::Spatiality),
    ("G-35", Faculty::Knowledge),
    ("G-45", Faculty::Spatiality),
    ("O-47", Faculty::Abstraction),
    ("O-49", Faculty::Abstraction),
    ("O-85", Faculty::Transformation),
];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskId {
    pub family_code: String,
    pub faculty: Faculty,
}

fn valid_code(code: &str) -> bool {
    let mut parts = code.splitn(2, '-');
    let (Some(letter), Some(num)) = (parts.next(), parts.next()) else {
        return false;
    };
    letter.len() == 1
        && letter.chars().all(|c| c.is_ascii_uppercase())
        && !num.is_empty()
        && num.chars().all(|c| c.is_ascii_digit())
        && !num.starts_with('0')
}

impl TaskId {
    /// Codes look like `G-15`. Known codes must carry their registered faculty.
    pub fn new(code: &str, faculty: Faculty) -> Result<Self, SampleError> {
        if !valid_code(code) {
            return Err(SampleError::InvalidTaskId(format!("`{code}` is not of the form X-<number>")));
        }
        if let Some((_, f)) = KNOWN_FACULTIES.iter().find(|(c, _)| *c == code) {
            if *f != faculty {
                return Err(SampleError::InvalidTaskId(format!("{code} belongs to {f}, not {faculty}")));
            }
        }
        Ok(TaskId { family_code: code.to_string(), faculty })
    }

    pub fn known(code: &str) -> Result<Self, SampleError> {
        let (_, f) = KNOWN_FACULTIES
            .iter()
            .find(|(c, _)| *c == code)
            .ok_or_else(|| SampleError::UnknownFamily(code.to_string()))?;
        TaskId::new(code, *f)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family_code)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Split {
    #[serde(rename = "train")]
    Train,
    #[serde(rename = "test-id")]
    TestInDomain,
    #[serde(rename = "test-ood")]
    TestOutOfDomain,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::TestInDomain, Split::TestOutOfDomain];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::TestInDomain => "test-id",
            Split::TestOutOfDomain => "test-ood",
        }
    }

    /// Offset XORed into seeds; keeps the per-split seed ranges disjoint.
    pub fn base(self) -> u64 {
        match self {
            Split::Train => 0,
            Split::TestInDomain => 1 << 32,
            Split::TestOutOfDomain => 1 << 33,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = SampleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test-id" | "id" => Ok(Split::TestInDomain),
            "test-ood" | "ood" => Ok(Split::TestOutOfDomain),
            _ => Err(SampleError::UnknownSplit(s.to_string())),
        }
    }
}

/// One parameter value. Externally tagged so JSON stays self-describing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Text(String),
    Cell(Cell),
    Cells(Vec<Cell>),
    Ints(Vec<i64>),
    Texts(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamAssignment {
    pub values: BTreeMap<String, ParamValue>,
    pub stratum: u32,
}

impl ParamAssignment {
    pub fn new(stratum: u32) -> Self {
        Self { values: BTreeMap::new(), stratum }
    }

    pub fn set(&mut self, name: &str, v: ParamValue) -> &mut Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn with(mut self, name: &str, v: ParamValue) -> Self {
        self.set(name, v);
        self
    }

    fn get(&self, name: &str) -> Result<&ParamValue, SampleError> {
        self.values.get(name).ok_or_else(|| SampleError::InvalidParameter(format!("missing parameter `{name}`")))
    }

    fn mismatch(name: &str, want: &str) -> SampleError {
        SampleError::InvalidParameter(format!("parameter `{name}` is not {want}"))
    }

    pub fn int(&self, name: &str) -> Result<i64, SampleError> {
        match self.get(name)? {
            ParamValue::Int(v) => Ok(*v),
            _ => Err(Self::mismatch(name, "an integer")),
        }
    }

    pub fn real(&self, name: &str) -> Result<f64, SampleError> {
        match self.get(name)? {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            _ => Err(Self::mismatch(name, "a number")),
        }
    }

    pub fn text(&self, name: &str) -> Result<&str, SampleError> {
        match self.get(name)? {
            ParamValue::Text(v) => Ok(v),
            _ => Err(Self::mismatch(name, "text")),
        }
    }

    pub fn cell(&self, name: &str) -> Result<Cell, SampleError> {
        match self.get(name)? {
            ParamValue::Cell(v) => Ok(*v),
            _ => Err(Self::mismatch(name, "a cell")),
        }
    }

    pub fn cells(&self, name: &str) -> Result<&[Cell], SampleError> {
        match self.get(name)? {
            ParamValue::Cells(v) => Ok(v),
            _ => Err(Self::mismatch(name, "a cell list")),
        }
    }

    pub fn ints(&self, name: &str) -> Result<&[i64], SampleError> {
        match self.get(name)? {
            ParamValue::Ints(v) => Ok(v),
            _ => Err(Self::mismatch(name, "an integer list")),
        }
    }

    pub fn texts(&self, name: &str) -> Result<&[String], SampleError> {
        match self.get(name)? {
            ParamValue::Texts(v) => Ok(v),
            _ => Err(Self::mismatch(name, "a text list")),
        }
    }
}

/// Symbolic state of a scene. Which variant a family uses, and what counts
/// as one legal step between states, is defined by the family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum State {
    Cell { row: i32, col: i32 },
    Node { id: usize },
    Board { tiles: [u8; 9] },
    Point { x: f64, y: f64 },
    Angle { deg: f64 },
    Arrangement { centers: Vec<[f64; 2]> },
    Fill { cells: Vec<u8> },
}

impl State {
    pub fn cell(c: Cell) -> State {
        State::Cell { row: c.row, col: c.col }
    }

    pub fn as_cell(&self) -> Option<Cell> {
        match self {
            State::Cell { row, col } => Some(Cell::new(*row, *col)),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<usize> {
        match self {
            State::Node { id } => Some(*id),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub frames_per_step: u32,
}

impl Trajectory {
    pub fn new(states: Vec<State>, frames_per_step: u32) -> Self {
        Self { states, frames_per_step }
    }

    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn cells(&self) -> Option<Vec<Cell>> {
        self.states.iter().map(State::as_cell).collect()
    }

    pub fn nodes(&self) -> Option<Vec<usize>> {
        self.states.iter().map(State::as_node).collect()
    }
}

/// One fully rendered task instance.
#[derive(Clone, Debug)]
pub struct Sample {
    pub task: TaskId,
    pub split: Split,
    pub index: u64,
    pub seed: u64,
    pub params: ParamAssignment,
    pub prompt: String,
    pub scene: SceneSpec,
    pub solution: Trajectory,
    pub first_frame: Frame,
    pub final_frame: Frame,
    pub gt_frames: FrameSequence,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_codes() {
        assert!(TaskId::new("G-15", Faculty::Spatiality).is_ok());
        assert!(TaskId::new("G-15", Faculty::Perception).is_err());
        assert!(TaskId::new("G15", Faculty::Spatiality).is_err());
        assert!(TaskId::new("g-15", Faculty::Spatiality).is_err());
        assert!(TaskId::new("X-200", Faculty::Knowledge).is_ok());
        assert_eq!(TaskId::known("O-85").unwrap().faculty, Faculty::Transformation);
    }

    #[test]
    fn split_names_round_trip() {
        for s in Split::ALL {
            assert_eq!(s.as_str().parse::<Split>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.as_str()));
        }
    }

    #[test]
    fn state_json_shape() {
        let s = State::Cell { row: 1, col: 2 };
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"cell","row":1,"col":2}"#);
    }
}
