//! The nine bundled task families.

pub mod g15;
pub mod g16;
pub mod g3;
pub mod g31;
pub mod g35;
pub mod g45;
pub mod o47;
pub mod o49;
pub mod o85;

use super::{FamilySpec, GenError, TaskFamily};

const CONFIGS: [(&str, &str); 9] = [
    ("G-15", include_str!("../../../families/g15.toml")),
    ("G-16", include_str!("../../../families/g16.toml")),
    ("G-31", include_str!("../../../families/g31.toml")),
    ("G-45", include_str!("../../../families/g45.toml")),
    ("G-3", include_str!("../../../families/g3.toml")),
    ("O-47", include_str!("../../../families/o47.toml")),
    ("O-49", include_str!("../../../families/o49.toml")),
    ("G-35", include_str!("../../../families/g35.toml")),
    ("O-85", include_str!("../../../families/o85.toml")),
];

/// Loads every bundled config and pairs it with its implementation.
pub fn all() -> Result<Vec<Box<dyn TaskFamily>>, GenError> {
    CONFIGS
        .iter()
        .map(|(code, text)| {
            let spec = FamilySpec::from_toml(text)?;
            if spec.code != *code {
                return Err(GenError::Config(format!("config for {code} declares code {}", spec.code)));
            }
            let f: Box<dyn TaskFamily> = match *code {
                "G-15" => Box::new(g15::G15::new(spec)),
                "G-16" => Box::new(g16::G16::new(spec)),
                "G-31" => Box::new(g31::G31::new(spec)),
                "G-45" => Box::new(g45::G45::new(spec)),
                "G-3" => Box::new(g3::G3::new(spec)),
                "O-47" => Box::new(o47::O47::new(spec)),
                "O-49" => Box::new(o49::O49::new(spec)),
                "G-35" => Box::new(g35::G35::new(spec)),
                _ => Box::new(o85::O85::new(spec)),
            };
            Ok(f)
        })
        .collect()
}
