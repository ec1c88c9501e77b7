//! JSON and CSV rendering.
//!
//! JSON uses the shortest round-trip representation of every float, with
//! non-finite values written as the strings `"inf"`, `"-inf"` and `"nan"`.
//! CSV writes a header row, LF line endings and floats with 17 significant
//! digits; an absent value is an empty field.

use std::fmt;

use anyhow::{bail, Result};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// A float that survives JSON even when it is infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            v if v.is_finite() => s.serialize_f64(v),
            v if v.is_nan() => s.serialize_str("nan"),
            v if v > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    "nan" => Ok(Num(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_field(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => bail!("nested values cannot be written as CSV"),
    })
}

/// One record per row; the header comes from the field names of the first row.
pub fn render_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let Value::Object(map) = serde_json::to_value(row)? else {
            bail!("CSV rows must be flat records");
        };
        let keys: Vec<String> = map.keys().cloned().collect();
        match &header {
            None => {
                w.write_record(&keys)?;
                header = Some(keys);
            }
            Some(h) if *h != keys => bail!("CSV rows have differing fields"),
            Some(_) => {}
        }
        let fields = map.values().map(csv_field).collect::<Result<Vec<_>>>()?;
        w.write_record(&fields)?;
    }
    Ok(String::from_utf8(
        w.into_inner().map_err(|e| e.into_error())?,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        x: f64,
        n: u32,
        y: Option<f64>,
        z: Num,
    }

    #[test]
    fn csv_layout() {
        let rows = [
            Row {
                name: "a",
                x: 0.1,
                n: 3,
                y: None,
                z: Num(f64::INFINITY),
            },
            Row {
                name: "b,c",
                x: -2.0,
                n: 4,
                y: Some(1.0 / 3.0),
                z: Num(1.0),
            },
        ];
        let out = render_csv(&rows).unwrap();
        assert_eq!(
            out,
            "name,x,n,y,z\n\
             a,1.0000000000000001e-1,3,,inf\n\
             \"b,c\",-2.0000000000000000e0,4,3.3333333333333331e-1,1.0000000000000000e0\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [std::f64::consts::PI, 1e-300, 6.02214076e23, 0.1 + 0.2] {
            let s = format!("{v:.16e}");
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn num_round_trips_through_json() {
        for v in [f64::INFINITY, f64::NEG_INFINITY, 2.5, -0.0, 1e-310] {
            let s = serde_json::to_string(&Num(v)).unwrap();
            let back: Num = serde_json::from_str(&s).unwrap();
            assert_eq!(back.0.to_bits(), v.to_bits(), "{s}");
        }
        let nan: Num =
            serde_json::from_str(&serde_json::to_string(&Num(f64::NAN)).unwrap()).unwrap();
        assert!(nan.0.is_nan());
        assert!(serde_json::from_str::<Num>("\"infinity\"").is_err());
    }

    #[test]
    fn nested_rows_are_rejected() {
        #[derive(Serialize)]
        struct Nested {
            v: Vec<f64>,
        }
        assert!(render_csv(&[Nested { v: vec![1.0] }]).is_err());
    }
}
