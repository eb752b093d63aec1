//! Planar counterexamples for distance-based ordering: distances from points
//! to a disk of classical states, measured in different p-norms or through an
//! invertible linear rescaling, rank the same points in different orders.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{real_p_norm, LinalgError, PNorm};

#[derive(Debug, Error)]
pub enum ToyError {
    #[error("scaling parameter must lie in (0,1), got {0}")]
    BadEpsilon(f64),
    #[error("disk radius must be positive, got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ToyError>;

/// Point of the two-dimensional toy state space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub fn new(x1: f64, x2: f64) -> Self {
        Vec2 { x1, x2 }
    }

    pub fn norm2(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x1 - other.x1, self.x2 - other.x2)
    }

    pub fn p_norm(self, p: PNorm) -> Result<f64> {
        Ok(real_p_norm(&[self.x1, self.x2], p)?)
    }
}

/// The classical set of the toy model: `{x : ‖x‖₂ ≤ radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    radius: f64,
}

impl Disk {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ToyError::BadRadius(radius));
        }
        Ok(Disk { radius })
    }

    pub fn radius(self) -> f64 {
        self.radius
    }

    pub fn contains(self, y: Vec2) -> bool {
        y.norm2() <= self.radius
    }

    pub fn boundary_point(self, angle: f64) -> Vec2 {
        Vec2::new(self.radius * angle.cos(), self.radius * angle.sin())
    }
}

impl Default for Disk {
    fn default() -> Self {
        Disk { radius: 0.5 }
    }
}

/// Invertible 2x2 rescaling of the toy plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyMap {
    entries: [[f64; 2]; 2],
}

impl ToyMap {
    pub fn new(entries: [[f64; 2]; 2]) -> Result<Self> {
        let m = ToyMap { entries };
        let cond = m.condition();
        if !(cond < 1e12) {
            return Err(ToyError::Linalg(LinalgError::SingularMap(cond)));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        ToyMap { entries: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn diagonal(d1: f64, d2: f64) -> Result<Self> {
        Self::new([[d1, 0.0], [0.0, d2]])
    }

    pub fn entries(self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        let [[a, b], [c, d]] = self.entries;
        Vec2::new(a * v.x1 + b * v.x2, c * v.x1 + d * v.x2)
    }

    /// Condition number from the closed-form 2x2 singular values.
    pub fn condition(self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        let t = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
        let smax = ((t + disc) / 2.0).sqrt();
        let smin = ((t - disc) / 2.0).max(0.0).sqrt();
        if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        }
    }
}

/// The three diagonal rescalings of the second counterexample, for a scaling
/// parameter `0 < ε < 1`: identity, `diag(1, 1/ε)`, and `diag(ε, 1/ε)`.
pub fn scaling_maps(epsilon: f64) -> Result<[ToyMap; 3]> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ToyError::BadEpsilon(epsilon));
    }
    Ok([
        ToyMap::identity(),
        ToyMap::diagonal(1.0, 1.0 / epsilon)?,
        ToyMap::diagonal(epsilon, 1.0 / epsilon)?,
    ])
}

const COARSE_STEPS: usize = 2048;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` over the disk boundary: a coarse angular scan brackets the
/// global minimum, then golden-section refines the bracket to width 1e−12.
fn minimize_boundary(disk: Disk, f: impl Fn(Vec2) -> f64) -> (f64, Vec2) {
    let tau = std::f64::consts::TAU;
    let step = tau / COARSE_STEPS as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..COARSE_STEPS {
        let v = f(disk.boundary_point(i as f64 * step));
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut lo = (best_i as f64 - 1.0) * step;
    let mut hi = (best_i as f64 + 1.0) * step;

    let mut t1 = hi - GOLDEN * (hi - lo);
    let mut t2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(disk.boundary_point(t1));
    let mut f2 = f(disk.boundary_point(t2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - GOLDEN * (hi - lo);
            f1 = f(disk.boundary_point(t1));
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + GOLDEN * (hi - lo);
            f2 = f(disk.boundary_point(t2));
        }
    }
    let t = 0.5 * (lo + hi);
    let x = disk.boundary_point(t);
    (f(x), x)
}

/// Distance `d_p(y, C) = inf_{x∈C} ‖y − x‖_p` together with the minimizer.
///
/// The minimizer lies on the boundary whenever `y` is outside the disk (the
/// disk is convex and every p-norm is convex); interior points return
/// distance zero at `y` itself.
pub fn disk_distance(y: Vec2, disk: Disk, p: PNorm) -> Result<(f64, Vec2)> {
    real_p_norm(&[0.0], p)?; // validate the exponent up front
    if disk.contains(y) {
        return Ok((0.0, y));
    }
    let objective = |x: Vec2| y.sub(x).p_norm(p).expect("validated exponent");
    Ok(minimize_boundary(disk, objective))
}

/// Distance under the transformed 2-norm, `inf_{x∈C} ‖T(y − x)‖₂`.
pub fn disk_distance_transformed(y: Vec2, disk: Disk, t: ToyMap) -> Result<f64> {
    let cond = t.condition();
    if !(cond < 1e12) {
        return Err(ToyError::Linalg(LinalgError::SingularMap(cond)));
    }
    if disk.contains(y) {
        return Ok(0.0);
    }
    let objective = |x: Vec2| t.apply(y.sub(x)).norm2();
    Ok(minimize_boundary(disk, objective).0)
}

/// One distance functional of the ambiguity table: a plain p-norm or a
/// transformed 2-norm.
#[derive(Clone, Debug)]
pub enum NormSpec {
    P(PNorm),
    Map { label: String, map: ToyMap },
}

impl std::fmt::Display for NormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormSpec::P(p) => write!(f, "{p}"),
            NormSpec::Map { label, .. } => write!(f, "{label}"),
        }
    }
}

/// Pairwise comparison sign: −1 when the first point is strictly closer,
/// 0 for a tie within tolerance, +1 when it is strictly farther.
pub type ComparisonSign = i8;

#[derive(Clone, Debug, Serialize)]
pub struct AmbiguityReport {
    pub labels: Vec<String>,
    /// `distances[k][i]` = distance of point i under norm k.
    pub distances: Vec<Vec<f64>>,
    /// `comparisons[k]` = signs over point pairs (i, j), i < j, in row order.
    pub comparisons: Vec<Vec<ComparisonSign>>,
    /// Pairs of norm indices that induce different comparison patterns.
    pub disagreeing: Vec<(usize, usize)>,
    pub ambiguous: bool,
    pub tie_tol: f64,
}

/// Tabulates the distances of `points` under each norm in `norms` and flags
/// every pair of norms whose induced rankings disagree.
pub fn ambiguity_report(
    points: &[Vec2],
    norms: &[NormSpec],
    disk: Disk,
    tie_tol: f64,
) -> Result<AmbiguityReport> {
    let mut labels = Vec::with_capacity(norms.len());
    let mut distances = Vec::with_capacity(norms.len());
    for norm in norms {
        labels.push(norm.to_string());
        let row: Result<Vec<f64>> = points
            .iter()
            .map(|&y| match norm {
                NormSpec::P(p) => disk_distance(y, disk, *p).map(|(d, _)| d),
                NormSpec::Map { map, .. } => disk_distance_transformed(y, disk, *map),
            })
            .collect();
        distances.push(row?);
    }
    let comparisons: Vec<Vec<ComparisonSign>> = distances
        .iter()
        .map(|row| {
            let mut signs = Vec::new();
            for i in 0..points.len() {
                for j in (i + 1)..points.len() {
                    let diff = row[i] - row[j];
                    signs.push(if diff < -tie_tol {
                        -1
                    } else if diff > tie_tol {
                        1
                    } else {
                        0
                    });
                }
            }
            signs
        })
        .collect();
    let mut disagreeing = Vec::new();
    for a in 0..comparisons.len() {
        for b in (a + 1)..comparisons.len() {
            if comparisons[a] != comparisons[b] {
                disagreeing.push((a, b));
            }
        }
    }
    let ambiguous = !disagreeing.is_empty();
    Ok(AmbiguityReport { labels, distances, comparisons, disagreeing, ambiguous, tie_tol })
}

/// The two nonclassical points of the first counterexample.
pub fn example_points_p() -> (Vec2, Vec2) {
    let h = 1.0 / 2.0_f64.sqrt();
    (Vec2::new(1.0, 0.0), Vec2::new(h, h))
}

/// The nonclassical point pair of the second (transformed-norm) example.
pub fn example_points_transformed(epsilon: f64) -> Result<(Vec2, Vec2)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ToyError::BadEpsilon(epsilon));
    }
    Ok((Vec2::new(1.0, 0.0), Vec2::new(0.0, (1.0 + epsilon) / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn p_norm_distances_match_the_closed_forms() {
        let disk = Disk::default();
        let (y1, y2) = example_points_p();

        let (d, x) = disk_distance(y1, disk, PNorm::TWO).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        assert!((x.x1 - 0.5).abs() < 1e-6 && x.x2.abs() < 1e-6);
        let (d, _) = disk_distance(y2, disk, PNorm::TWO).unwrap();
        assert!((d - 0.5).abs() < 1e-9);

        let (d1_y1, _) = disk_distance(y1, disk, PNorm::ONE).unwrap();
        let (d1_y2, _) = disk_distance(y2, disk, PNorm::ONE).unwrap();
        assert!((d1_y1 - 0.5).abs() < 1e-9);
        assert!((d1_y2 - SQRT2 / 2.0).abs() < 1e-9);
        assert!(d1_y1 < d1_y2);

        let (di_y1, _) = disk_distance(y1, disk, PNorm::Inf).unwrap();
        let (di_y2, _) = disk_distance(y2, disk, PNorm::Inf).unwrap();
        assert!((di_y1 - 0.5).abs() < 1e-9);
        assert!((di_y2 - 1.0 / (2.0 * SQRT2)).abs() < 1e-9);
        assert!(di_y1 > di_y2);
    }

    #[test]
    fn interior_point_has_zero_distance() {
        let disk = Disk::default();
        let y = Vec2::new(0.1, -0.2);
        for p in [PNorm::ONE, PNorm::TWO, PNorm::Inf] {
            let (d, x) = disk_distance(y, disk, p).unwrap();
            assert_eq!(d, 0.0);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn transformed_distances_follow_the_sign_pattern() {
        let eps = 0.5;
        let disk = Disk::default();
        let (y1, y3) = example_points_transformed(eps).unwrap();
        let [l1, l2, l3] = scaling_maps(eps).unwrap();

        let d11 = disk_distance_transformed(y1, disk, l1).unwrap();
        let d13 = disk_distance_transformed(y3, disk, l1).unwrap();
        assert!((d11 - 0.5).abs() < 1e-9);
        assert!((d13 - eps / 2.0).abs() < 1e-9);
        assert!(d11 > d13);

        let d21 = disk_distance_transformed(y1, disk, l2).unwrap();
        let d23 = disk_distance_transformed(y3, disk, l2).unwrap();
        assert!((d21 - 0.5).abs() < 1e-9);
        assert!((d23 - 0.5).abs() < 1e-9);
        assert!((d21 - d23).abs() < 1e-9);

        let d31 = disk_distance_transformed(y1, disk, l3).unwrap();
        let d33 = disk_distance_transformed(y3, disk, l3).unwrap();
        assert!((d31 - eps / 2.0).abs() < 1e-9);
        assert!((d33 - 0.5).abs() < 1e-9);
        assert!(d31 < d33);
    }

    #[test]
    fn transformed_identity_matches_plain_two_norm() {
        let disk = Disk::default();
        let (y1, _) = example_points_p();
        let d = disk_distance_transformed(y1, disk, ToyMap::identity()).unwrap();
        assert!((d - 0.5).abs() < 1e-9);

        let t = ToyMap::diagonal(0.5, 2.0).unwrap();
        let d = disk_distance_transformed(y1, disk, t).unwrap();
        assert!((d - 0.25).abs() < 1e-9);
    }

    #[test]
    fn singular_map_is_rejected() {
        assert!(matches!(
            ToyMap::new([[1.0, 0.0], [0.0, 0.0]]),
            Err(ToyError::Linalg(LinalgError::SingularMap(_)))
        ));
    }

    #[test]
    fn ambiguity_flags_the_paper_tables() {
        let disk = Disk::default();
        let (y1, y2) = example_points_p();
        let norms = vec![NormSpec::P(PNorm::ONE), NormSpec::P(PNorm::TWO), NormSpec::P(PNorm::Inf)];
        let report = ambiguity_report(&[y1, y2], &norms, disk, 1e-9).unwrap();
        assert_eq!(report.comparisons[0], vec![-1]); // d1: y1 closer
        assert_eq!(report.comparisons[1], vec![0]); // d2: tie
        assert_eq!(report.comparisons[2], vec![1]); // dinf: y2 closer
        assert!(report.ambiguous);
        assert_eq!(report.disagreeing.len(), 3);

        let single = ambiguity_report(&[y1, y2], &norms[..1], disk, 1e-9).unwrap();
        assert!(!single.ambiguous);
    }

    #[test]
    fn ambiguity_flags_the_transformed_table() {
        let eps = 0.5;
        let disk = Disk::default();
        let (y1, y3) = example_points_transformed(eps).unwrap();
        let maps = scaling_maps(eps).unwrap();
        let norms: Vec<NormSpec> = maps
            .iter()
            .enumerate()
            .map(|(i, &map)| NormSpec::Map { label: format!("Lambda{}", i + 1), map })
            .collect();
        let report = ambiguity_report(&[y1, y3], &norms, disk, 1e-9).unwrap();
        assert_eq!(report.comparisons[0], vec![1]); // y3 closer under identity
        assert_eq!(report.comparisons[1], vec![0]); // tie
        assert_eq!(report.comparisons[2], vec![-1]); // y1 closer
        assert!(report.ambiguous);
    }

    #[test]
    fn scaling_parameter_is_validated() {
        assert!(matches!(scaling_maps(1.5), Err(ToyError::BadEpsilon(_))));
        assert!(matches!(scaling_maps(0.0), Err(ToyError::BadEpsilon(_))));
    }
}
