use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ParamAssignment, ParamValue, SampleError};

/// 128-bit digest identifying a parameter combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DuplicateKey(#[serde(with = "hex_bytes")] pub [u8; 16]);

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8; 16], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 16], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(&s).map_err(serde::de::Error::custom)?;
        v.try_into().map_err(|_| serde::de::Error::custom("expected 16 bytes"))
    }
}

impl fmt::Display for DuplicateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

fn canonical_real(name: &str, x: f64) -> Result<f64, SampleError> {
    if !x.is_finite() {
        return Err(SampleError::InvalidParameter(format!("parameter `{name}` is not finite ({x})")));
    }
    // -0.0 and 0.0 must hash alike.
    Ok(if x == 0.0 { 0.0 } else { x })
}

/// Canonical JSON of the parameter values: keys sorted, numbers normalized.
/// The difficulty stratum is a label, not part of the scene, so it is excluded.
pub fn canonical_json(params: &ParamAssignment) -> Result<String, SampleError> {
    let mut values = params.values.clone();
    for (name, v) in values.iter_mut() {
        if let ParamValue::Real(x) = v {
            *x = canonical_real(name, *x)?;
        }
    }
    Ok(serde_json::to_string(&values)?)
}

pub fn hash_params(params: &ParamAssignment) -> Result<DuplicateKey, SampleError> {
    let d = Sha256::digest(canonical_json(params)?.as_bytes());
    Ok(DuplicateKey(d[..16].try_into().expect("16 bytes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(&str, i64)]) -> ParamAssignment {
        let mut a = ParamAssignment::new(0);
        for (k, v) in pairs {
            a.set(k, ParamValue::Int(*v));
        }
        a
    }

    #[test]
    fn insertion_order_is_irrelevant() {
        assert_eq!(hash_params(&p(&[("a", 1), ("b", 2)])).unwrap(), hash_params(&p(&[("b", 2), ("a", 1)])).unwrap());
        assert_ne!(hash_params(&p(&[("a", 1)])).unwrap(), hash_params(&p(&[("a", 2)])).unwrap());
    }

    #[test]
    fn nan_rejected_and_negative_zero_normalized() {
        let nan = ParamAssignment::new(0).with("x", ParamValue::Real(f64::NAN));
        assert!(matches!(hash_params(&nan), Err(SampleError::InvalidParameter(_))));
        let a = ParamAssignment::new(0).with("x", ParamValue::Real(-0.0));
        let b = ParamAssignment::new(0).with("x", ParamValue::Real(0.0));
        assert_eq!(hash_params(&a).unwrap(), hash_params(&b).unwrap());
    }

    #[test]
    fn key_json_round_trip() {
        let k = hash_params(&p(&[("a", 1)])).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(serde_json::from_str::<DuplicateKey>(&s).unwrap(), k);
        assert_eq!(s.len(), 34);
    }
}
