//! Reference leaderboard figures used as fixtures for the aggregation and
//! residualization code.

use crate::sample::Faculty;
use Faculty::*;

/// Overall, ID avg, ID A/K/P/S/T, OOD avg, OOD A/K/P/S/T.
pub type Row = [f64; 13];

pub const HUMAN: (&str, Row) = ("Human", [0.974, 0.960, 0.919, 0.956, 1.00, 0.95, 1.00, 0.988, 1.00, 1.00, 0.990, 1.00, 0.970]);

/// Video models, human reference excluded.
pub const MODELS: [(&str, Row); 9] = [
    ("CogVideoX1.5", [0.273, 0.283, 0.241, 0.328, 0.257, 0.328, 0.305, 0.262, 0.281, 0.235, 0.250, 0.254, 0.282]),
    ("HunyuanVideo", [0.273, 0.280, 0.207, 0.357, 0.293, 0.280, 0.316, 0.265, 0.175, 0.369, 0.290, 0.253, 0.250]),
    ("Wan2.2-I2V", [0.371, 0.412, 0.430, 0.382, 0.415, 0.404, 0.419, 0.329, 0.405, 0.308, 0.343, 0.236, 0.307]),
    ("LTX-2", [0.313, 0.329, 0.316, 0.362, 0.326, 0.340, 0.306, 0.297, 0.244, 0.337, 0.317, 0.231, 0.311]),
    ("Runway Gen-4", [0.403, 0.392, 0.396, 0.409, 0.429, 0.341, 0.363, 0.414, 0.515, 0.429, 0.419, 0.327, 0.373]),
    ("Sora 2", [0.546, 0.569, 0.602, 0.477, 0.581, 0.572, 0.597, 0.523, 0.546, 0.472, 0.525, 0.462, 0.546]),
    ("Kling 2.6", [0.369, 0.408, 0.465, 0.323, 0.375, 0.347, 0.519, 0.330, 0.528, 0.135, 0.272, 0.356, 0.359]),
    ("Veo 3.1", [0.480, 0.531, 0.611, 0.503, 0.520, 0.444, 0.510, 0.429, 0.577, 0.277, 0.420, 0.441, 0.404]),
    ("Fine-tuned Wan2.2", [0.685, 0.760, 0.724, 0.750, 0.782, 0.745, 0.833, 0.610, 0.768, 0.572, 0.547, 0.618, 0.615]),
];

/// Reported residual correlations between faculty pairs.
pub const REPORTED_CORRELATIONS: [(Faculty, Faculty, f64); 8] = [
    (Knowledge, Spatiality, 0.461),
    (Knowledge, Perception, -0.757),
    (Abstraction, Transformation, -0.641),
    (Abstraction, Spatiality, -0.481),
    (Perception, Spatiality, -0.565),
    (Perception, Abstraction, -0.043),
    (Perception, Transformation, 0.057),
    (Transformation, Spatiality, -0.050),
];

pub fn id_avg(r: &Row) -> f64 {
    r[1]
}

pub fn ood_avg(r: &Row) -> f64 {
    r[7]
}

/// Faculty scores with ID and OOD averaged.
pub fn faculty_means(r: &Row) -> [f64; 5] {
    std::array::from_fn(|i| (r[2 + i] + r[8 + i]) / 2.0)
}

/// (faculty means, overall) for every model in [`MODELS`].
pub fn residualization_inputs() -> (Vec<[f64; 5]>, Vec<f64>) {
    (MODELS.iter().map(|(_, r)| faculty_means(r)).collect(), MODELS.iter().map(|(_, r)| r[0]).collect())
}
