//! Flat serialization of manifold points.
//!
//! One point becomes `space.point_len()` consecutive `f64` values:
//! the coordinate vector for flat/ball spaces, the row-major real part
//! followed by the row-major imaginary part for matrix spaces, and the
//! concatenation of the component encodings for products. The binary
//! checkpoint format stores these values little-endian.

use super::{ManifoldPoint, PointData, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};

/// Append the flat encoding of a point to `out`.
pub fn encode_point(p: &ManifoldPoint, out: &mut Vec<f64>) {
    encode_data(&p.data, out);
}

fn encode_data(data: &PointData, out: &mut Vec<f64>) {
    match data {
        PointData::Vector(v) => out.extend_from_slice(v),
        PointData::Matrix(m) => {
            out.extend_from_slice(m.re.as_slice());
            out.extend_from_slice(m.im.as_slice());
        }
        PointData::Product(parts) => {
            for p in parts {
                encode_data(p, out);
            }
        }
    }
}

/// Decode one point from exactly `space.point_len()` values.
pub fn decode_point(space: &SpaceDescriptor, values: &[f64]) -> Result<ManifoldPoint> {
    if values.len() != space.point_len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} values for {space}, got {}",
            space.point_len(),
            values.len()
        )));
    }
    let mut offset = 0;
    let data = decode_data(space, values, &mut offset);
    ManifoldPoint::new(space.clone(), data)
}

fn decode_data(space: &SpaceDescriptor, values: &[f64], offset: &mut usize) -> PointData {
    match space {
        SpaceDescriptor::Euclidean { dim } | SpaceDescriptor::Poincare { dim } => {
            let v = values[*offset..*offset + dim].to_vec();
            *offset += dim;
            PointData::Vector(v)
        }
        SpaceDescriptor::SiegelUpper { n } | SpaceDescriptor::BoundedDomain { n } => {
            let sq = n * n;
            let re = RealMatrix::from_vec(*n, values[*offset..*offset + sq].to_vec());
            let im = RealMatrix::from_vec(*n, values[*offset + sq..*offset + 2 * sq].to_vec());
            *offset += 2 * sq;
            PointData::Matrix(ComplexMatrix::from_parts(re, im))
        }
        SpaceDescriptor::Product { components } => {
            PointData::Product(components.iter().map(|c| decode_data(c, values, offset)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_init;
    use proptest::prelude::*;

    #[test]
    fn encode_decode_round_trip_all_kinds() {
        for s in ["euclidean:5", "poincare:3", "siegel:2", "bounded:3",
                  "product:siegel:2+euclidean:4"] {
            let space: SpaceDescriptor = s.parse().unwrap();
            let p = random_init(&space, 11);
            let mut flat = Vec::new();
            encode_point(&p, &mut flat);
            assert_eq!(flat.len(), space.point_len());
            let back = decode_point(&space, &flat).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let space: SpaceDescriptor = "siegel:2".parse().unwrap();
        assert!(decode_point(&space, &[0.0; 3]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless_for_random_seeds(seed in 0u64..1000) {
            let space: SpaceDescriptor = "product:bounded:2+poincare:3".parse().unwrap();
            let p = random_init(&space, seed);
            let mut flat = Vec::new();
            encode_point(&p, &mut flat);
            let back = decode_point(&space, &flat).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
