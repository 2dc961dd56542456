//! JSON wire format for complex matrices.
//!
//! A matrix serializes as `{"rows": n, "cols": t, "entries": [[[re, im],
//! ...], ...]}` with one `[re, im]` pair per entry, rows outermost. Floats
//! round-trip exactly (serde_json emits shortest-representation decimals),
//! and deserialization validates the grid shape and finiteness.

use super::{CMat, C64};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for CMat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        MatrixWire {
            rows: self.rows(),
            cols: self.cols(),
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.rows {
            return Err(D::Error::custom(format!(
                "expected {} rows of entries, got {}",
                wire.rows,
                wire.entries.len()
            )));
        }
        let mut data = Vec::with_capacity(wire.rows * wire.cols);
        for (i, row) in wire.entries.iter().enumerate() {
            if row.len() != wire.cols {
                return Err(D::Error::custom(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    wire.cols
                )));
            }
            for (j, pair) in row.iter().enumerate() {
                if !pair[0].is_finite() || !pair[1].is_finite() {
                    return Err(D::Error::custom(format!(
                        "non-finite entry at ({i},{j})"
                    )));
                }
                data.push(C64::new(pair[0], pair[1]));
            }
        }
        CMat::new(wire.rows, wire.cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_bits() {
        let mut a = CMat::zeros(2, 3);
        a.set(0, 0, C64::new(0.1, -0.2));
        a.set(1, 2, C64::new(1.0 / 3.0, 2.0_f64.sqrt()));
        let text = serde_json::to_string(&a).unwrap();
        let back: CMat = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn wire_shape_is_stable() {
        let a = CMat::identity(1);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"rows":1,"cols":1,"entries":[[[1.0,0.0]]]}"#);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let bad = r#"{"rows":2,"cols":2,"entries":[[[1.0,0.0]]]}"#;
        assert!(serde_json::from_str::<CMat>(bad).is_err());
        let ragged = r#"{"rows":1,"cols":2,"entries":[[[1.0,0.0]]]}"#;
        assert!(serde_json::from_str::<CMat>(ragged).is_err());
    }

    #[test]
    fn non_finite_is_an_error() {
        let bad = r#"{"rows":1,"cols":1,"entries":[[[1e999,0.0]]]}"#;
        assert!(serde_json::from_str::<CMat>(bad).is_err());
    }
}
