//! Serialization helpers shared by the JSON reports.
//!
//! Rationals are written as strings (`"3/4"`, `"-2"`) so reports stay exact;
//! big integers are written as JSON numbers when they fit in `i64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(x))
}

pub fn ser_rational_vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&rational_string(x))?;
    }
    seq.end()
}

pub fn ser_rational_vecs<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let strings: Vec<String> = row.iter().map(rational_string).collect();
        seq.serialize_element(&strings)?;
    }
    seq.end()
}

fn int_value(x: &BigInt) -> IntOrString {
    match x.to_i64() {
        Some(v) => IntOrString::Int(v),
        None => IntOrString::Str(x.to_string()),
    }
}

#[derive(serde::Serialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

pub fn ser_bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&int_value(x))?;
    }
    seq.end()
}

pub fn ser_bigint_vecs<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let vals: Vec<IntOrString> = row.iter().map(int_value).collect();
        seq.serialize_element(&vals)?;
    }
    seq.end()
}
