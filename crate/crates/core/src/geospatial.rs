//! Hexagonal aggregation of coordinate-bearing tweets.
//!
//! Points are projected to local planar meters with an equirectangular
//! projection about a configurable origin, then assigned to a pointy-top
//! hexagonal lattice by cube-coordinate rounding, which picks the nearest
//! cell center.

use crate::corpus::Corpus;
use crate::Scalar;

pub const EARTH_RADIUS_M: Scalar = 6_371_000.0;

/// Geometry of the hexagonal grid. `cell_size` is the center-to-vertex
/// distance in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexGridSpec {
    /// `(latitude, longitude)` of the planar origin.
    pub origin: (Scalar, Scalar),
    pub cell_size: Scalar,
    /// Latitude whose cosine scales longitudes; defaults to the origin's.
    pub projection_latitude: Scalar,
}

impl HexGridSpec {
    pub fn new(origin: (Scalar, Scalar), cell_size: Scalar) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        HexGridSpec { origin, cell_size, projection_latitude: origin.0 }
    }
}

/// Equirectangular projection about the spec origin, in meters. Exact
/// inverse of [`unproject`].
pub fn project(point: (Scalar, Scalar), spec: &HexGridSpec) -> (Scalar, Scalar) {
    let (lat, lon) = point;
    let (lat0, lon0) = spec.origin;
    let x = EARTH_RADIUS_M * (lon - lon0).to_radians() * spec.projection_latitude.to_radians().cos();
    let y = EARTH_RADIUS_M * (lat - lat0).to_radians();
    (x, y)
}

pub fn unproject(xy: (Scalar, Scalar), spec: &HexGridSpec) -> (Scalar, Scalar) {
    let (x, y) = xy;
    let (lat0, lon0) = spec.origin;
    let lat = lat0 + (y / EARTH_RADIUS_M).to_degrees();
    let lon = lon0 + (x / (EARTH_RADIUS_M * spec.projection_latitude.to_radians().cos())).to_degrees();
    (lat, lon)
}

/// Planar center of the axial cell `(q, r)` on a pointy-top lattice.
pub fn hex_center(q: i64, r: i64, cell_size: Scalar) -> (Scalar, Scalar) {
    let sqrt3 = (3.0 as Scalar).sqrt();
    let x = cell_size * sqrt3 * (q as Scalar + r as Scalar / 2.0);
    let y = cell_size * 1.5 * r as Scalar;
    (x, y)
}

/// Axial cell containing a planar point: fractional axial coordinates via
/// the standard pointy-top basis, then cube rounding with the
/// largest-residual correction, which is deterministic on boundaries.
pub fn hex_index(xy: (Scalar, Scalar), cell_size: Scalar) -> (i64, i64) {
    let sqrt3 = (3.0 as Scalar).sqrt();
    let (x, y) = xy;
    let qf = (sqrt3 / 3.0 * x - y / 3.0) / cell_size;
    let rf = (2.0 / 3.0 * y) / cell_size;

    // cube coordinates: (x, y, z) = (q, -q-r, r), x + y + z = 0
    let xf = qf;
    let zf = rf;
    let yf = -xf - zf;
    let mut xr = xf.round();
    let mut zr = zf.round();
    let yr = yf.round();

    let dx = (xr - xf).abs();
    let dy = (yr - yf).abs();
    let dz = (zr - zf).abs();
    if dx > dy && dx > dz {
        xr = -yr - zr;
    } else if dy <= dz {
        zr = -xr - yr;
    }
    (xr as i64, zr as i64)
}

/// A populated lattice cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HexBin {
    pub q: i64,
    pub r: i64,
    pub count: u64,
    /// `(latitude, longitude)` of the cell center.
    pub center: (Scalar, Scalar),
}

/// Counts coordinate-bearing tweets (retweets included) per cell and drops
/// cells under `min_count`. Sorted by count descending, then `(q, r)`.
pub fn hexbin_aggregate(corpus: &Corpus, spec: &HexGridSpec, min_count: u64) -> Vec<HexBin> {
    let mut counts: std::collections::BTreeMap<(i64, i64), u64> = std::collections::BTreeMap::new();
    for tweet in &corpus.tweets {
        if let Some(point) = tweet.coordinates {
            let cell = hex_index(project(point, spec), spec.cell_size);
            *counts.entry(cell).or_insert(0) += 1;
        }
    }
    let mut bins: Vec<HexBin> = counts
        .into_iter()
        .filter(|&(_, count)| count >= min_count)
        .map(|((q, r), count)| HexBin {
            q,
            r,
            count,
            center: unproject(hex_center(q, r, spec.cell_size), spec),
        })
        .collect();
    bins.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| (a.q, a.r).cmp(&(b.q, b.r))));
    bins
}

/// Counts and per-axis medians of the geotagged subset. Even counts take
/// the lower median, so reported coordinates always occur in the data.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoSummary {
    pub geo_tweet_count: usize,
    pub geo_share: Scalar,
    pub median_lat: Option<Scalar>,
    pub median_lon: Option<Scalar>,
}

fn lower_median(values: &mut [Scalar]) -> Option<Scalar> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(values[(values.len() - 1) / 2])
}

pub fn geo_summary(corpus: &Corpus) -> GeoSummary {
    let mut lats = Vec::new();
    let mut lons = Vec::new();
    for tweet in &corpus.tweets {
        if let Some((lat, lon)) = tweet.coordinates {
            lats.push(lat);
            lons.push(lon);
        }
    }
    let geo_tweet_count = lats.len();
    let geo_share = if corpus.tweets.is_empty() {
        0.0
    } else {
        geo_tweet_count as Scalar / corpus.tweets.len() as Scalar
    };
    GeoSummary {
        geo_tweet_count,
        geo_share,
        median_lat: lower_median(&mut lats),
        median_lon: lower_median(&mut lons),
    }
}
