//! Serde helper for exponent fields: JSON has no literal for ∞, so p travels
//! as a plain number when finite and as the string "inf" otherwise.

use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrInf {
        Num(f64),
        Word(String),
    }
    match NumOrInf::deserialize(d)? {
        NumOrInf::Num(x) => Ok(x),
        NumOrInf::Word(w) if w.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
        NumOrInf::Word(w) => Err(serde::de::Error::custom(format!(
            "expected a number or \"inf\", got \"{w}\""
        ))),
    }
}
