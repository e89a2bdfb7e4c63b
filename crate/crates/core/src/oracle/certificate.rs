use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::handle::Oracle;
use super::point::{Point, Sign};
use crate::error::{Error, Result};

/// Witness of non-monotonicity: an edge in direction `coordinate` whose lower
/// endpoint (xᵢ = −1) evaluates to +1 and whose upper endpoint evaluates to −1.
///
/// JSON form: `{"point": "+-...-+", "coordinate": i}` with a zero-based coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AntiMonotoneEdge {
    point: Point,
    coordinate: usize,
}

impl AntiMonotoneEdge {
    pub fn new(point: Point, coordinate: usize) -> Result<Self> {
        if coordinate >= point.dim() {
            return Err(Error::DimensionMismatch { expected: point.dim(), got: coordinate + 1 });
        }
        Ok(AntiMonotoneEdge { point, coordinate })
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    /// `(lower, upper)` endpoints with the edge coordinate at −1 and +1.
    pub fn endpoints(&self) -> (Point, Point) {
        (self.point.with(self.coordinate, Sign::Minus), self.point.with(self.coordinate, Sign::Plus))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialises")
    }
}

impl fmt::Display for AntiMonotoneEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.point, self.coordinate)
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    point: String,
    coordinate: usize,
}

impl Serialize for AntiMonotoneEdge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateRepr { point: self.point.to_sign_string(), coordinate: self.coordinate }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AntiMonotoneEdge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CertificateRepr::deserialize(d)?;
        let point = Point::parse_sign_string(&repr.point).map_err(serde::de::Error::custom)?;
        AntiMonotoneEdge::new(point, repr.coordinate).map_err(serde::de::Error::custom)
    }
}

/// Re-checks a certificate with exactly two queries.
pub fn verify_certificate(f: &Oracle, cert: &AntiMonotoneEdge) -> Result<bool> {
    if cert.point.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: cert.point.dim() });
    }
    let (lo, hi) = cert.endpoints();
    let at_lo = f.query(&lo)?;
    let at_hi = f.query(&hi)?;
    Ok(at_lo == Sign::Plus && at_hi == Sign::Minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::LtfSpec;

    #[test]
    fn verify_examples() {
        let neg_dict = Oracle::ltf(LtfSpec::new(vec![-1.0], 0.0).unwrap());
        let edge = AntiMonotoneEdge::new(Point::all_plus(1), 0).unwrap();
        assert!(verify_certificate(&neg_dict, &edge).unwrap());
        assert_eq!(neg_dict.queries(), 2);

        let dict = Oracle::ltf(LtfSpec::new(vec![1.0], 0.0).unwrap());
        assert!(!verify_certificate(&dict, &edge).unwrap());

        // sign(x₁ − 2x₂) at x₁ = +1: x₂ = −1 gives +1, x₂ = +1 gives −1.
        let f = Oracle::ltf(LtfSpec::new(vec![1.0, -2.0], 0.0).unwrap());
        let edge = AntiMonotoneEdge::new(Point::parse_sign_string("++").unwrap(), 1).unwrap();
        assert!(verify_certificate(&f, &edge).unwrap());
    }

    #[test]
    fn json_form() {
        let edge = AntiMonotoneEdge::new(Point::parse_sign_string("+-+").unwrap(), 1).unwrap();
        let text = edge.to_json();
        assert_eq!(text, r#"{"point":"+-+","coordinate":1}"#);
        let back: AntiMonotoneEdge = serde_json::from_str(&text).unwrap();
        assert_eq!(back, edge);
        assert!(serde_json::from_str::<AntiMonotoneEdge>(r#"{"point":"+-","coordinate":2}"#).is_err());
    }
}
