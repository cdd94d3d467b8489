//! Negative type, generalized roundness and kernel checks on finite spaces.
//!
//! A space has q-negative type when `Σ a_i a_j d(x_i, x_j)^q <= 0` for every
//! coefficient vector with `Σ a_i = 0`. On a finite space this is decided by
//! the largest eigenvalue of `P M P`, where `M_ij = d(x_i, x_j)^q` and
//! `P = I - J/n` projects onto mean-zero vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// Default relative eigenvalue tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default upper end of the bisection interval for the negative-type supremum.
pub const DEFAULT_Q_MAX: f64 = 16.0;
/// Number of bisection steps used by [`neg_type_supremum`].
pub const BISECTION_STEPS: usize = 60;

/// `d^q`, with zero distances mapped to zero for every `q`, including `q = 0`.
#[inline]
pub fn distance_power(d: f64, q: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d.powf(q)
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

// Unit vector with its largest-magnitude entry made positive (first such
// entry on ties), so witnesses are reproducible across eigensolver sign flips.
fn normalize_sign(v: DVector<f64>) -> Vec<f64> {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() + 1e-12 {
            pivot = i;
        }
    }
    let sign = if !v.is_empty() && v[pivot] < 0.0 { -1.0 } else { 1.0 };
    v.iter().map(|x| sign * x).collect()
}

fn centering(n: usize) -> DMatrix<f64> {
    let inv = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - inv } else { -inv })
}

/// `M_ij = d(x_i, x_j)^q`.
pub fn power_matrix(space: &FiniteMetricSpace, q: f64) -> DMatrix<f64> {
    space.matrix().map(|d| distance_power(d, q))
}

/// `Σ a_i a_j d(x_i, x_j)^q`, evaluated term by term.
pub fn quadratic_form(space: &FiniteMetricSpace, q: f64, a: &[f64]) -> Result<f64> {
    if a.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), found: a.len() });
    }
    let mut total = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            total += ai * aj * distance_power(space.dist(i, j), q);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

/// Outcome of a q-negative-type test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegTypeCertificate {
    pub q: f64,
    pub verdict: Verdict,
    /// Largest eigenvalue of the centered power matrix.
    pub max_eigenvalue: f64,
    /// Absolute threshold the eigenvalue was compared against.
    pub threshold: f64,
    /// Mean-zero unit vector with a positive quadratic form, when failing.
    pub witness: Option<Vec<f64>>,
}

impl NegTypeCertificate {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Decides q-negative type through the spectrum of `P M P`. The verdict is
/// "holds" iff `λ_max <= tol * max(1, n * max|M_ij|)`.
pub fn neg_type_holds(space: &FiniteMetricSpace, q: f64, tol: f64) -> Result<NegTypeCertificate> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter { name: "q", value: q, reason: "must be finite and non-negative" });
    }
    check_tolerance(tol)?;
    let n = space.len();
    let m = power_matrix(space, q);
    let scale = (n as f64 * m.amax()).max(1.0);
    let threshold = tol * scale;
    if n < 2 {
        return Ok(NegTypeCertificate { q, verdict: Verdict::Holds, max_eigenvalue: 0.0, threshold, witness: None });
    }
    let p = centering(n);
    let centered = &p * m * &p;
    let centered = (&centered + centered.transpose()) * 0.5;
    let (values, vectors) = sorted_eigen(&centered);
    let max_eigenvalue = values[n - 1];
    if max_eigenvalue <= threshold {
        return Ok(NegTypeCertificate { q, verdict: Verdict::Holds, max_eigenvalue, threshold, witness: None });
    }
    let v = p * vectors.column(n - 1);
    let v = &v / v.norm();
    Ok(NegTypeCertificate {
        q,
        verdict: Verdict::Fails,
        max_eigenvalue,
        threshold,
        witness: Some(normalize_sign(v)),
    })
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter { name: "tol", value: tol, reason: "must be positive" });
    }
    Ok(())
}

/// Bisection estimate of the supremum of `q` with q-negative type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Supremum {
    pub value: f64,
    /// The test held at `q_max`; the true supremum is at least `value`.
    pub at_least: bool,
}

/// Bisects on `[0, q_max]`; valid because the set of admissible `q` is
/// downward closed.
pub fn neg_type_supremum(space: &FiniteMetricSpace, q_max: f64, tol: f64) -> Result<Supremum> {
    if !(q_max > 0.0) || !q_max.is_finite() {
        return Err(Error::InvalidParameter { name: "q_max", value: q_max, reason: "must be positive" });
    }
    check_tolerance(tol)?;
    if distinct_positive_distances(space) < 2 || neg_type_holds(space, q_max, tol)?.holds() {
        return Ok(Supremum { value: q_max, at_least: true });
    }
    let (mut lo, mut hi) = (0.0, q_max);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if neg_type_holds(space, mid, tol)?.holds() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Supremum { value: 0.5 * (lo + hi), at_least: false })
}

fn distinct_positive_distances(space: &FiniteMetricSpace) -> usize {
    let mut values: Vec<f64> = space.matrix().iter().copied().filter(|&d| d > 0.0).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values.len()
}

/// `log2(1 + 1/(n-1))`, the generalized roundness of `K_{n,n}`.
pub fn knn_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", value: n as f64, reason: "K_{n,n} needs n >= 2" });
    }
    Ok((1.0 + 1.0 / (n - 1) as f64).log2())
}

/// Two equal-length lists of points of a host space.
#[derive(Debug, Clone)]
pub struct RoundnessConfig<'a> {
    host: &'a FiniteMetricSpace,
    a_points: Vec<usize>,
    b_points: Vec<usize>,
}

impl<'a> RoundnessConfig<'a> {
    pub fn new(host: &'a FiniteMetricSpace, a_points: Vec<usize>, b_points: Vec<usize>) -> Result<Self> {
        if a_points.is_empty() || a_points.len() != b_points.len() {
            return Err(Error::DimensionMismatch { expected: a_points.len().max(1), found: b_points.len() });
        }
        if let Some(&bad) = a_points.iter().chain(&b_points).find(|&&i| i >= host.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: host.len() });
        }
        Ok(Self { host, a_points, b_points })
    }

    pub fn len(&self) -> usize {
        self.a_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnfloOutcome {
    pub holds: bool,
    /// Cross sum minus within sums.
    pub margin: f64,
    pub within: f64,
    pub cross: f64,
}

/// Evaluates Enflo's inequality
/// `Σ_{i<j} (d(a_i,a_j)^q + d(b_i,b_j)^q) <= Σ_{i,j} d(a_i,b_j)^q`.
/// Holds iff `margin >= -tol * max(1, cross)`.
pub fn enflo_check(config: &RoundnessConfig<'_>, q: f64, tol: f64) -> EnfloOutcome {
    let d = |i: usize, j: usize| distance_power(config.host.dist(i, j), q);
    let (a, b) = (&config.a_points, &config.b_points);
    let n = a.len();
    let mut within = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            within += d(a[i], a[j]) + d(b[i], b[j]);
        }
    }
    let mut cross = 0.0;
    for &ai in a {
        for &bj in b {
            cross += d(ai, bj);
        }
    }
    let margin = cross - within;
    EnfloOutcome {
        holds: margin >= -tol * cross.max(1.0),
        margin,
        within,
        cross,
    }
}

/// Smallest eigenvalue of a kernel matrix and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector of the smallest eigenvalue.
    pub eigenvector: Vec<f64>,
}

fn psd_check(m: &DMatrix<f64>, threshold: f64) -> PsdCheck {
    let (values, vectors) = sorted_eigen(m);
    match values.first() {
        None => PsdCheck { psd: true, min_eigenvalue: 0.0, eigenvector: Vec::new() },
        Some(&min) => PsdCheck {
            psd: min >= -threshold,
            min_eigenvalue: min,
            eigenvector: normalize_sign(vectors.column(0).into_owned()),
        },
    }
}

/// `G_ij = exp(-t d(x_i, x_j))`.
pub fn gaussian_gram(space: &FiniteMetricSpace, t: f64) -> DMatrix<f64> {
    space.matrix().map(|d| (-t * d).exp())
}

/// Positive semidefiniteness of `exp(-t d)`, with verdict
/// `min_eig >= -tol * n`.
pub fn schoenberg_gaussian_psd(space: &FiniteMetricSpace, t: f64, tol: f64) -> Result<PsdCheck> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t, reason: "must be positive" });
    }
    check_tolerance(tol)?;
    Ok(psd_check(&gaussian_gram(space, t), tol * space.len() as f64))
}

/// Positive semidefiniteness of `d(x, x0) + d(y, x0) - d(x, y)`.
pub fn schoenberg_centered_psd(space: &FiniteMetricSpace, base_index: usize, tol: f64) -> Result<PsdCheck> {
    let n = space.len();
    if base_index >= n {
        return Err(Error::IndexOutOfRange { index: base_index, len: n });
    }
    check_tolerance(tol)?;
    let k = DMatrix::from_fn(n, n, |i, j| space.dist(i, base_index) + space.dist(j, base_index) - space.dist(i, j));
    let scale = (n as f64 * k.amax()).max(1.0);
    Ok(psd_check(&k, tol * scale))
}

/// `121` logarithmically spaced values of `t` in `[1e-3, 1e3]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 121)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect()
        }
    }
}

/// Most negative Gaussian-kernel eigenvalue found over a grid of `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianScan {
    pub t: f64,
    pub min_eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    /// Whether `min_eigenvalue` is below `-witness_threshold`.
    pub witness_found: bool,
    pub witness_threshold: f64,
}

/// Scans `grid` for a Gaussian Gram matrix that is not positive
/// semidefinite. Ties keep the smallest `t`.
pub fn gaussian_scan(space: &FiniteMetricSpace, grid: &[f64], witness_threshold: f64) -> Result<GaussianScan> {
    let mut best: Option<GaussianScan> = None;
    for &t in grid {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter { name: "t", value: t, reason: "must be positive" });
        }
        let check = psd_check(&gaussian_gram(space, t), 0.0);
        if best.as_ref().is_none_or(|b| check.min_eigenvalue < b.min_eigenvalue) {
            best = Some(GaussianScan {
                t,
                min_eigenvalue: check.min_eigenvalue,
                eigenvector: check.eigenvector,
                witness_found: check.min_eigenvalue < -witness_threshold,
                witness_threshold,
            });
        }
    }
    best.ok_or(Error::InvalidParameter { name: "grid", value: 0.0, reason: "must not be empty" })
}

/// Feature-space distances `sqrt(max(0, G_ii + G_jj - 2 G_ij))` of a kernel.
pub fn kernel_distance_matrix(gram: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let n = check_gram(gram)?;
    check_tolerance(tol)?;
    let threshold = tol * (n as f64 * gram.amax()).max(1.0);
    let check = psd_check(gram, threshold);
    if !check.psd {
        return Err(Error::NotAKernel { min_eigenvalue: check.min_eigenvalue });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0).sqrt()
        }
    }))
}

fn check_gram(gram: &DMatrix<f64>) -> Result<usize> {
    let (r, c) = gram.shape();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if gram[(i, j)] != gram[(j, i)] {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    Ok(r)
}

/// Replaces `d` by `d^(q/2)`.
pub fn snowflake(space: &FiniteMetricSpace, q: f64) -> Result<FiniteMetricSpace> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter { name: "q", value: q, reason: "must be positive" });
    }
    let alpha = 0.5 * q;
    space.map_distances(|d| distance_power(d, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub input_distance: f64,
    pub output_distance: f64,
}

/// Extremes of the output distance over all pairs at one input distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeBin {
    pub input_distance: f64,
    /// Empirical lower control function at this input distance.
    pub min_output: f64,
    /// Empirical upper control function at this input distance.
    pub max_output: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub points: Vec<EnvelopePoint>,
    pub bins: Vec<EnvelopeBin>,
    pub max_output: f64,
    /// `min_output / input_distance` at the largest input distance.
    pub lower_ratio_at_diameter: Option<f64>,
    /// Set when the lower envelope at the largest sampled input distance does
    /// not exceed its value at the smallest positive one, so this sample gives
    /// no evidence that the lower control function grows without bound.
    pub lower_not_growing: bool,
}

/// Pairs every input distance with the feature-space distance induced by a
/// kernel and summarizes the empirical control functions.
pub fn distortion_envelope(space: &FiniteMetricSpace, gram: &DMatrix<f64>, tol: f64) -> Result<Envelope> {
    let n = check_gram(gram)?;
    if n != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), found: n });
    }
    let out = kernel_distance_matrix(gram, tol)?;
    let mut points = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            points.push(EnvelopePoint { input_distance: space.dist(i, j), output_distance: out[(i, j)] });
        }
    }
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.input_distance.total_cmp(&b.input_distance));
    let mut bins: Vec<EnvelopeBin> = Vec::new();
    for p in &sorted {
        match bins.last_mut() {
            Some(bin) if bin.input_distance == p.input_distance => {
                bin.min_output = bin.min_output.min(p.output_distance);
                bin.max_output = bin.max_output.max(p.output_distance);
            }
            _ => bins.push(EnvelopeBin {
                input_distance: p.input_distance,
                min_output: p.output_distance,
                max_output: p.output_distance,
            }),
        }
    }
    let max_output = points.iter().map(|p| p.output_distance).fold(0.0, f64::max);
    let positive: Vec<&EnvelopeBin> = bins.iter().filter(|b| b.input_distance > 0.0).collect();
    let lower_ratio_at_diameter = positive.last().map(|b| b.min_output / b.input_distance);
    let lower_not_growing = match (positive.first(), positive.last()) {
        (Some(first), Some(last)) => last.min_output <= first.min_output,
        _ => true,
    };
    Ok(Envelope { points, bins, max_output, lower_ratio_at_diameter, lower_not_growing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::build_knn;
    use crate::space::line;

    const TOL: f64 = DEFAULT_TOLERANCE;

    fn equilateral() -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(3, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap()
    }

    #[test]
    fn neg_type_examples() {
        assert!(neg_type_holds(&equilateral(), 2.0, TOL).unwrap().holds());

        let k22 = build_knn(2).unwrap();
        let canonical = [1.0, 1.0, -1.0, -1.0];
        assert_eq!(quadratic_form(&k22, 2.0, &canonical).unwrap(), 8.0);
        assert_eq!(quadratic_form(&k22, 1.0, &canonical).unwrap(), 0.0);

        let cert = neg_type_holds(&k22, 2.0, TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::Fails);
        let w = cert.witness.unwrap();
        let half = 0.5;
        for (x, e) in w.iter().zip(canonical) {
            assert!((x - half * e).abs() < 1e-12, "{w:?}");
        }
        assert!(w.iter().sum::<f64>().abs() < 1e-12);
        assert!(quadratic_form(&k22, 2.0, &w).unwrap() > cert.threshold);

        assert!(neg_type_holds(&k22, 1.0, TOL).unwrap().holds());
        assert!(neg_type_holds(&k22, -1.0, TOL).is_err());
        assert!(neg_type_holds(&k22, 1.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_spaces_hold() {
        let one = line(1);
        assert!(neg_type_holds(&one, 3.0, TOL).unwrap().holds());
        let empty = FiniteMetricSpace::from_rows(&[]).unwrap();
        assert!(neg_type_holds(&empty, 3.0, TOL).unwrap().holds());
        let dup = FiniteMetricSpace::from_rows(&[vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]).unwrap();
        assert!(neg_type_holds(&dup, 0.0, TOL).unwrap().holds());
    }

    #[test]
    fn supremum_examples() {
        let s = neg_type_supremum(&build_knn(2).unwrap(), DEFAULT_Q_MAX, TOL).unwrap();
        assert!((s.value - 1.0).abs() <= 1e-6, "{s:?}");
        assert!(!s.at_least);
        let s = neg_type_supremum(&build_knn(3).unwrap(), DEFAULT_Q_MAX, TOL).unwrap();
        assert!((s.value - knn_threshold(3).unwrap()).abs() <= 1e-6);
        assert!((s.value - 0.5849625).abs() <= 1e-6);
        let s = neg_type_supremum(&line(3), 2.0, TOL).unwrap();
        assert_eq!(s, Supremum { value: 2.0, at_least: true });
        let s = neg_type_supremum(&equilateral(), DEFAULT_Q_MAX, TOL).unwrap();
        assert_eq!(s, Supremum { value: DEFAULT_Q_MAX, at_least: true });
        assert!(neg_type_supremum(&line(3), 0.0, TOL).is_err());
    }

    #[test]
    fn knn_threshold_examples() {
        assert_eq!(knn_threshold(2).unwrap(), 1.0);
        assert!((knn_threshold(4).unwrap() - 0.4150375).abs() < 1e-7);
        assert!(knn_threshold(1025).unwrap() < 0.0015);
        assert!(knn_threshold(1).is_err());
        for n in 2..50 {
            assert!(knn_threshold(n + 1).unwrap() < knn_threshold(n).unwrap());
        }
    }

    #[test]
    fn enflo_examples() {
        let k44 = build_knn(4).unwrap();
        let config = RoundnessConfig::new(&k44, vec![0, 1, 2, 3], vec![4, 5, 6, 7]).unwrap();
        let at_threshold = enflo_check(&config, (4.0f64 / 3.0).log2(), TOL);
        assert!(at_threshold.margin.abs() < 1e-12);
        assert!(at_threshold.holds);
        let at_one = enflo_check(&config, 1.0, TOL);
        assert_eq!((at_one.within, at_one.cross, at_one.margin), (24.0, 16.0, -8.0));
        assert!(!at_one.holds);
        let at_zero = enflo_check(&config, 0.0, TOL);
        assert_eq!(at_zero.margin, 4.0);

        let same = RoundnessConfig::new(&k44, vec![0, 4, 2], vec![0, 4, 2]).unwrap();
        for q in [0.0, 0.3, 1.0, 2.5, 7.0] {
            assert!(enflo_check(&same, q, TOL).holds);
        }
        assert!(RoundnessConfig::new(&k44, vec![0], vec![1, 2]).is_err());
        assert!(RoundnessConfig::new(&k44, vec![], vec![]).is_err());
        assert!(RoundnessConfig::new(&k44, vec![9], vec![1]).is_err());
    }

    #[test]
    fn gaussian_examples() {
        let l = line(3);
        assert!(schoenberg_gaussian_psd(&l, 1.0, TOL).unwrap().psd);
        let scan = gaussian_scan(&build_knn(3).unwrap(), &default_t_grid(), 1e-8).unwrap();
        assert!(scan.witness_found, "{scan:?}");
        assert!(scan.min_eigenvalue < -1e-8);
        let k33 = build_knn(3).unwrap();
        for t in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let c = schoenberg_gaussian_psd(&k33, t, TOL).unwrap();
            assert!(c.min_eigenvalue >= -(k33.len() as f64) && c.min_eigenvalue <= 1.0 + 1e-12);
        }
        assert!(schoenberg_gaussian_psd(&l, 0.0, TOL).is_err());
        let grid = default_t_grid();
        assert_eq!(grid.len(), 121);
        assert!((grid[0] - 1e-3).abs() < 1e-15 && (grid[120] - 1e3).abs() < 1e-9);
        assert!((grid[60] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centered_examples() {
        assert!(schoenberg_centered_psd(&line(3), 0, TOL).unwrap().psd);
        let k33 = build_knn(3).unwrap();
        assert!((0..6).any(|b| !schoenberg_centered_psd(&k33, b, TOL).unwrap().psd));
        let c = schoenberg_centered_psd(&line(1), 0, TOL).unwrap();
        assert!(c.psd && c.min_eigenvalue == 0.0);
        assert!(schoenberg_centered_psd(&line(2), 2, TOL).is_err());
    }

    #[test]
    fn kernel_distance_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        let d = kernel_distance_matrix(&id, TOL).unwrap();
        assert_eq!(d[(0, 1)], 2f64.sqrt());
        let ones = DMatrix::from_element(3, 3, 1.0);
        assert_eq!(kernel_distance_matrix(&ones, TOL).unwrap().amax(), 0.0);
        let g = gaussian_gram(&line(3), 1.0);
        let d = kernel_distance_matrix(&g, TOL).unwrap();
        assert!((d[(0, 1)] - (2.0 - 2.0 * (-1f64).exp()).sqrt()).abs() < 1e-15);
        assert!((d[(0, 1)] - 1.1243).abs() < 1e-4);

        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(kernel_distance_matrix(&bad, TOL), Err(Error::NotAKernel { .. })));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(kernel_distance_matrix(&asym, TOL), Err(Error::NotSymmetric(0, 1))));
    }

    #[test]
    fn snowflake_examples() {
        let k22 = build_knn(2).unwrap();
        assert_eq!(snowflake(&k22, 2.0).unwrap(), k22);
        let s = snowflake(&k22, 1.0).unwrap();
        assert_eq!(s.dist(0, 1), 2f64.sqrt());
        assert_eq!(s.dist(0, 2), 1.0);
        assert!(neg_type_holds(&s, 2.0, TOL).unwrap().holds());
        let s33 = snowflake(&build_knn(3).unwrap(), 1.0).unwrap();
        assert!(!neg_type_holds(&s33, 2.0, TOL).unwrap().holds());
        assert!(snowflake(&k22, 0.0).is_err());
    }

    #[test]
    fn envelope_examples() {
        // exact Euclidean realization of four points on a segment
        let coords: [f64; 4] = [0.0, 0.5, 1.5, 3.0];
        let space = FiniteMetricSpace::from_fn(4, |i, j| (coords[i] - coords[j]).abs()).unwrap();
        let gram = DMatrix::from_fn(4, 4, |i, j| coords[i] * coords[j]);
        let env = distortion_envelope(&space, &gram, TOL).unwrap();
        for bin in &env.bins {
            assert!((bin.min_output - bin.input_distance).abs() < 1e-12);
            assert!((bin.max_output - bin.input_distance).abs() < 1e-12);
        }
        assert!(!env.lower_not_growing);

        let constant = DMatrix::from_element(4, 4, 0.7);
        let env = distortion_envelope(&space, &constant, TOL).unwrap();
        assert!(env.points.iter().all(|p| p.output_distance == 0.0));
        assert!(env.lower_not_growing);

        let mut ratios = Vec::new();
        for n in [4, 8, 16] {
            let grid = crate::embeddings::build_torus_grid(n, 1).unwrap();
            let env = distortion_envelope(&grid, &gaussian_gram(&grid, 1.0), TOL).unwrap();
            assert!(env.max_output < 2f64.sqrt());
            ratios.push(env.lower_ratio_at_diameter.unwrap());
        }
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
        assert!(distortion_envelope(&space, &DMatrix::identity(3, 3), TOL).is_err());
    }
}
