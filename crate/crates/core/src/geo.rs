//! Spherical-earth geodesy: great-circle distance, midpoints, and
//! latitude/longitude aligned bounding squares.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Meters spanned by one degree of latitude on the sphere.
pub const METERS_PER_DEG_LAT: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
}

/// A WGS84-style coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let p = GeoPoint { lat, lon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(GeoError::Latitude(self.lat));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(GeoError::Longitude(self.lon));
        }
        Ok(())
    }

    /// Point displaced by a local east/north offset in meters, using the
    /// flat-earth approximation at this point's latitude. Adequate for the
    /// kilometer-scale fixtures this crate builds.
    pub fn offset_m(&self, east_m: f64, north_m: f64) -> GeoPoint {
        let lat = self.lat + north_m / METERS_PER_DEG_LAT;
        let lon = self.lon + east_m / meters_per_deg_lon(self.lat);
        GeoPoint { lat, lon }
    }
}

/// Meters spanned by one degree of longitude at `lat_deg`.
pub fn meters_per_deg_lon(lat_deg: f64) -> f64 {
    METERS_PER_DEG_LAT * lat_deg.to_radians().cos()
}

/// Great-circle distance between two points, in meters.
pub fn haversine_m(p: GeoPoint, q: GeoPoint) -> f64 {
    let phi1 = p.lat.to_radians();
    let phi2 = q.lat.to_radians();
    let half_dphi = (phi2 - phi1) / 2.0;
    let half_dlambda = (q.lon - p.lon).to_radians() / 2.0;
    let a = half_dphi.sin().powi(2) + phi1.cos() * phi2.cos() * half_dlambda.sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Midpoint of the great-circle arc between `p` and `q`.
pub fn midpoint(p: GeoPoint, q: GeoPoint) -> GeoPoint {
    let phi1 = p.lat.to_radians();
    let phi2 = q.lat.to_radians();
    let lambda1 = p.lon.to_radians();
    let dlambda = (q.lon - p.lon).to_radians();
    let bx = phi2.cos() * dlambda.cos();
    let by = phi2.cos() * dlambda.sin();
    let phi = (phi1.sin() + phi2.sin()).atan2(((phi1.cos() + bx).powi(2) + by * by).sqrt());
    let lambda = lambda1 + by.atan2(phi1.cos() + bx);
    GeoPoint {
        lat: phi.to_degrees(),
        lon: wrap_lon(lambda.to_degrees()),
    }
}

fn wrap_lon(lon: f64) -> f64 {
    let mut l = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if l == -180.0 && lon > 0.0 {
        l = 180.0;
    }
    l
}

/// An axis-aligned latitude/longitude square of a given side length.
///
/// The side is converted to degrees with the local meters-per-degree at the
/// center latitude, so the square is only metrically square near its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub center: GeoPoint,
    pub side_m: f64,
    pub half_lat_deg: f64,
    pub half_lon_deg: f64,
}

impl BoundingBox {
    pub fn square(center: GeoPoint, side_m: f64) -> Self {
        let half = side_m / 2.0;
        let lon_scale = meters_per_deg_lon(center.lat).max(1e-9);
        BoundingBox {
            center,
            side_m,
            half_lat_deg: half / METERS_PER_DEG_LAT,
            half_lon_deg: (half / lon_scale).min(180.0),
        }
    }

    pub fn side_km(&self) -> f64 {
        self.side_m / 1000.0
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        let dlat = (p.lat - self.center.lat).abs();
        let dlon = wrap_lon(p.lon - self.center.lon).abs();
        dlat <= self.half_lat_deg && dlon <= self.half_lon_deg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn identity_distance_is_zero() {
        let p = pt(28.61, 77.21);
        assert_eq!(haversine_m(p, p), 0.0);
    }

    #[test]
    fn one_degree_of_meridian() {
        // R * pi / 180, evaluated independently.
        let expected = 6_371_000.0_f64 * 3.141_592_653_589_793 / 180.0;
        assert!((expected - 111_194.93).abs() < 0.01);
        let d = haversine_m(pt(0.0, 0.0), pt(1.0, 0.0));
        assert!((d - expected).abs() < 0.01, "{d}");
    }

    #[test]
    fn antipodal_is_half_circumference() {
        let d = haversine_m(pt(0.0, 0.0), pt(0.0, 180.0));
        assert!((d - 20_015_086.8).abs() < 0.1, "{d}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(GeoPoint::new(95.0, 0.0), Err(GeoError::Latitude(95.0)));
        assert_eq!(GeoPoint::new(0.0, -181.0), Err(GeoError::Longitude(-181.0)));
    }

    #[test]
    fn midpoint_of_meridian_segment() {
        let m = midpoint(pt(10.0, 20.0), pt(12.0, 20.0));
        assert!((m.lat - 11.0).abs() < 1e-12);
        assert!((m.lon - 20.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_across_antimeridian() {
        let m = midpoint(pt(0.0, 179.0), pt(0.0, -179.0));
        assert!((m.lon.abs() - 180.0).abs() < 1e-9, "{m:?}");
    }

    #[test]
    fn offset_matches_distance() {
        let o = pt(28.6, 77.2);
        let east = o.offset_m(500.0, 0.0);
        let north = o.offset_m(0.0, 500.0);
        assert!((haversine_m(o, east) - 500.0).abs() < 1e-3);
        assert!((haversine_m(o, north) - 500.0).abs() < 1e-6);
    }

    #[test]
    fn box_membership() {
        let c = pt(28.6, 77.2);
        let b = BoundingBox::square(c, 5000.0);
        assert!(b.contains(c));
        assert!(b.contains(c.offset_m(2400.0, -2400.0)));
        assert!(!b.contains(c.offset_m(2600.0, 0.0)));
        assert!(!b.contains(c.offset_m(0.0, -2600.0)));
    }

    fn arb_point() -> impl Strategy<Value = GeoPoint> {
        (-89.0f64..89.0, -179.0f64..179.0).prop_map(|(lat, lon)| GeoPoint { lat, lon })
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(p in arb_point(), q in arb_point()) {
            prop_assert_eq!(haversine_m(p, q), haversine_m(q, p));
        }

        #[test]
        fn triangle_inequality(p in arb_point(), q in arb_point(), r in arb_point()) {
            let pq = haversine_m(p, q);
            let qr = haversine_m(q, r);
            let pr = haversine_m(p, r);
            prop_assert!(pr <= (pq + qr) * (1.0 + 1e-9) + 1e-9);
        }
    }
}
