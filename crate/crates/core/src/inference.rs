//! Plug-in covariance estimators, sandwich variances, and confidence
//! regions for fitted states.
//!
//! For node `i` the curvature block is
//! `Sigma_i = (1/(w_n n)) sum_{j != i} l''(pi_ij) h_j h_j'` and the score
//! second-moment block is
//! `Omega_i = (1/(w_n n)) sum_{j != i} l'(pi_ij)^2 h_j h_j'`, with
//! `w_n = e^rho` in sparse mode and 1 otherwise. The variance of a block of
//! nodes is the sandwich `Sigma^{-1} Omega Sigma^{-1}`, and interval widths
//! carry the matching `1/sqrt(w_n n)` normalization, so the `w_n` scaling
//! cancels exactly: intervals do not depend on the estimated offset.
//!
//! Off-diagonal `Omega` blocks keep only the term in which the two score
//! sums share an edge, `(1/(w_n n)) l'(pi_ij)^2 h_j h_i'` — the estimator of
//! the population cross-covariance of score blocks `i` and `j`. The raw
//! empirical outer product of fitted score blocks is degenerate for this
//! purpose: fitted score blocks vanish at the maximizer by the first-order
//! conditions.

use ndarray::{Array1, Array2, s};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, symmetrize};
use crate::model::{EdgeFamily, LatentState, LinkFunction, ModelSpec, Network, logistic};
use crate::scalar::Scalar;
use crate::stats;

/// Condition-number ceiling for inverting curvature blocks.
const MAX_CONDITION: f64 = 1e12;

/// Per-node curvature blocks, score second-moment matrix, and the sandwich
/// variance over a node index set.
#[derive(Debug, Clone)]
pub struct CovarianceBundle<F> {
    pub nodes: Vec<usize>,
    /// `Sigma_i` for each node in `nodes`, in order.
    pub sigma_blocks: Vec<Array2<F>>,
    /// `m(r+1) x m(r+1)` score second-moment matrix in node blocks.
    pub omega: Array2<F>,
    /// `Sigma^{-1} Omega Sigma^{-1}`, symmetrized.
    pub var_sandwich: Array2<F>,
    /// Sparsity scaling applied consistently to all blocks (1 outside
    /// sparse mode).
    pub w_n: F,
    r: usize,
}

fn check_node<F: Scalar>(net: &Network<F>, i: usize) -> Result<()> {
    if i >= net.n() {
        return Err(Error::InvalidArgument(format!(
            "node index {i} out of range for n = {}",
            net.n()
        )));
    }
    Ok(())
}

/// Curvature block `Sigma_i = (1/(w_n n)) sum_{j != i} l''(pi_ij) h_j h_j'`.
///
/// The block is negative definite for nodes with enough effective
/// neighbors; singular blocks (effectively isolated nodes) surface as
/// `InferenceUnavailable` when the block is inverted in
/// [`covariance_bundle`] / [`var_sandwich`].
pub fn sigma_hat<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    i: usize,
    w_n: F,
) -> Result<Array2<F>> {
    check_node(net, i)?;
    if !(w_n > F::zero()) {
        return Err(Error::InvalidArgument("w_n must be positive".into()));
    }
    let n = net.n();
    let r = state.r();
    let scale = F::one() / (w_n * F::from_usize_lossy(n));
    let mut out = Array2::<F>::zeros((r + 1, r + 1));
    for j in 0..n {
        if j == i {
            continue;
        }
        let l2 = crate::model::l2_unchecked(spec, state.pi_total(i, j));
        let h = state.h(j);
        for a in 0..=r {
            for b in 0..=r {
                out[(a, b)] += scale * l2 * h[a] * h[b];
            }
        }
    }
    Ok(out)
}

/// Checks that `-Sigma_i` is positive definite and well-conditioned.
fn check_sigma_invertible<F: Scalar>(node: usize, sigma: &Array2<F>) -> Result<()> {
    let neg = sigma.mapv(|x| -x);
    let eig = symmetric_eigen(&neg)?;
    let d = sigma.nrows();
    let min = eig.values[0];
    let max = eig.values[d - 1];
    if min <= F::zero() || max / min > F::from_f64_lossy(MAX_CONDITION) {
        return Err(Error::InferenceUnavailable {
            node,
            reason: format!(
                "curvature block is singular or ill-conditioned (eigenvalues in [{:e}, {:e}])",
                min.to_f64_lossy(),
                max.to_f64_lossy()
            ),
        });
    }
    Ok(())
}

/// Individual score second moment
/// `Omega_i = (1/(w_n n)) sum_{j != i} l'(pi_ij)^2 h_j h_j'`.
pub fn omega_hat_individual<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    i: usize,
    w_n: F,
) -> Result<Array2<F>> {
    check_node(net, i)?;
    let n = net.n();
    let r = state.r();
    let edges = net.edges();
    let scale = F::one() / (w_n * F::from_usize_lossy(n));
    let mut out = Array2::<F>::zeros((r + 1, r + 1));
    for j in 0..n {
        if j == i {
            continue;
        }
        let l1 = crate::model::l1_unchecked(spec, edges[(i, j)], state.pi_total(i, j));
        let h = state.h(j);
        let w = scale * l1 * l1;
        for a in 0..=r {
            for b in 0..=r {
                out[(a, b)] += w * h[a] * h[b];
            }
        }
    }
    Ok(out)
}

/// Block score second-moment matrix over a node set.
///
/// Diagonal blocks are [`omega_hat_individual`]; the `(i, j)` off-diagonal
/// block is the shared-edge term `(1/(w_n n)) l'(pi_ij)^2 h_j h_i'`, which
/// satisfies `Omega_ij = Omega_ji'`.
pub fn omega_hat<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    nodes: &[usize],
    w_n: F,
) -> Result<Array2<F>> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("empty node set".into()));
    }
    let n = net.n();
    let r = state.r();
    let d = r + 1;
    let edges = net.edges();
    let scale = F::one() / (w_n * F::from_usize_lossy(n));
    let mut out = Array2::<F>::zeros((nodes.len() * d, nodes.len() * d));
    for (bi, &i) in nodes.iter().enumerate() {
        check_node(net, i)?;
        for (bj, &j) in nodes.iter().enumerate() {
            if bi == bj {
                let blk = omega_hat_individual(net, state, spec, i, w_n)?;
                out.slice_mut(s![bi * d..(bi + 1) * d, bj * d..(bj + 1) * d])
                    .assign(&blk);
            } else if i != j {
                let l1 = crate::model::l1_unchecked(spec, edges[(i, j)], state.pi_total(i, j));
                let w = scale * l1 * l1;
                let hi = state.h(i);
                let hj = state.h(j);
                for a in 0..d {
                    for b in 0..d {
                        out[(bi * d + a, bj * d + b)] = w * hj[a] * hi[b];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Sandwich `Sigma^{-1} Omega Sigma^{-1}` with `Sigma = blockdiag(sigma_blocks)`.
///
/// The result is explicitly symmetrized; the global sign of `Sigma` cancels,
/// so blocks may be passed with either sign convention.
pub fn var_sandwich<F: Scalar>(
    sigma_blocks: &[Array2<F>],
    omega: &Array2<F>,
) -> Result<Array2<F>> {
    if sigma_blocks.is_empty() {
        return Err(Error::InvalidArgument("no curvature blocks".into()));
    }
    let d = sigma_blocks[0].nrows();
    let m = sigma_blocks.len();
    if omega.nrows() != m * d || omega.ncols() != m * d {
        return Err(Error::DimensionMismatch {
            context: "var_sandwich omega",
            expected: m * d,
            actual: omega.nrows(),
        });
    }
    let mut sigma_inv = Array2::<F>::zeros((m * d, m * d));
    for (b, blk) in sigma_blocks.iter().enumerate() {
        let inv = crate::linalg::sym_inverse(blk, F::from_f64_lossy(MAX_CONDITION))
            .map_err(|e| Error::InferenceUnavailable {
                node: b,
                reason: e.to_string(),
            })?;
        sigma_inv
            .slice_mut(s![b * d..(b + 1) * d, b * d..(b + 1) * d])
            .assign(&inv);
    }
    let prod = sigma_inv.dot(omega).dot(&sigma_inv);
    Ok(symmetrize(&prod))
}

/// Builds the full bundle for a node set at a given `w_n`.
pub fn covariance_bundle<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    nodes: &[usize],
    w_n: F,
) -> Result<CovarianceBundle<F>> {
    let mut sigma_blocks = Vec::with_capacity(nodes.len());
    for &i in nodes {
        let sigma = sigma_hat(net, state, spec, i, w_n)?;
        check_sigma_invertible(i, &sigma)?;
        sigma_blocks.push(sigma);
    }
    let omega = omega_hat(net, state, spec, nodes, w_n)?;
    let sandwich = var_sandwich(&sigma_blocks, &omega)?;
    Ok(CovarianceBundle {
        nodes: nodes.to_vec(),
        sigma_blocks,
        omega,
        var_sandwich: sandwich,
        w_n,
        r: state.r(),
    })
}

/// One symmetric confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceInterval<F> {
    pub center: F,
    pub lower: F,
    pub upper: F,
}

impl<F: Scalar> ConfidenceInterval<F> {
    pub fn contains(&self, x: F) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn half_width(&self) -> F {
        (self.upper - self.lower) / F::from_f64_lossy(2.0)
    }
}

/// Ellipsoidal confidence region: the level set
/// `(phi - center)' covariance^{-1} (phi - center) <= chi2_quantile`.
#[derive(Debug, Clone)]
pub struct ConfidenceRegion<F> {
    pub center: Array1<F>,
    /// Scaled variance `var_sandwich / (w_n n)` for the block.
    pub covariance: Array2<F>,
    pub level: F,
    pub chi2_quantile: F,
}

impl<F: Scalar> ConfidenceRegion<F> {
    /// Whether a point lies inside the region. Fails if the covariance
    /// cannot be inverted.
    pub fn contains(&self, phi: &Array1<F>) -> Result<bool> {
        let inv = crate::linalg::sym_inverse(&self.covariance, F::from_f64_lossy(MAX_CONDITION))?;
        let diff = phi - &self.center;
        let q = diff.dot(&inv.dot(&diff));
        Ok(q <= self.chi2_quantile)
    }
}

/// Per-coordinate intervals plus the joint region for one node.
#[derive(Debug, Clone)]
pub struct IndividualInference<F> {
    pub node: usize,
    pub intervals: Vec<ConfidenceInterval<F>>,
    pub region: ConfidenceRegion<F>,
}

/// Axis-aligned description of a 2-d confidence ellipse.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceEllipse<F> {
    pub center: [F; 2],
    /// Semi-axis lengths, major first.
    pub semi_axes: [F; 2],
    /// Orientation of the major axis in radians.
    pub angle: F,
}

impl<F: Scalar> ConfidenceEllipse<F> {
    pub fn area(&self) -> F {
        F::from_f64_lossy(std::f64::consts::PI) * self.semi_axes[0] * self.semi_axes[1]
    }
}

impl<F: Scalar> CovarianceBundle<F> {
    fn block_index(&self, node: usize) -> Result<usize> {
        self.nodes
            .iter()
            .position(|&x| x == node)
            .ok_or_else(|| Error::InvalidArgument(format!("node {node} not in bundle")))
    }

    /// Scaled variance block `var_sandwich_ii / (w_n n)` for one node.
    pub fn scaled_variance_block(&self, node: usize, n: usize) -> Result<Array2<F>> {
        let b = self.block_index(node)?;
        let d = self.r + 1;
        let denom = self.w_n * F::from_usize_lossy(n);
        let blk = self
            .var_sandwich
            .slice(s![b * d..(b + 1) * d, b * d..(b + 1) * d])
            .to_owned();
        Ok(blk.mapv(|x| x / denom))
    }

    /// Per-coordinate confidence intervals and the joint chi-squared region
    /// for one node of the bundle.
    pub fn ci_individual(
        &self,
        state: &LatentState<F>,
        node: usize,
        level: F,
    ) -> Result<IndividualInference<F>> {
        let lf = level.to_f64_lossy();
        if !(0.0 < lf && lf < 1.0) {
            return Err(Error::InvalidArgument("level must be in (0,1)".into()));
        }
        let n = state.n();
        let d = self.r + 1;
        let cov = self.scaled_variance_block(node, n)?;
        let center = state.phi(node);
        let zq = F::from_f64_lossy(stats::normal_two_sided(lf));
        let mut intervals = Vec::with_capacity(d);
        for k in 0..d {
            let sd = cov[(k, k)].max(F::zero()).sqrt();
            intervals.push(ConfidenceInterval {
                center: center[k],
                lower: center[k] - zq * sd,
                upper: center[k] + zq * sd,
            });
        }
        let chi2 = F::from_f64_lossy(stats::chi_squared_quantile(d as f64, lf));
        Ok(IndividualInference {
            node,
            intervals,
            region: ConfidenceRegion {
                center,
                covariance: cov,
                level,
                chi2_quantile: chi2,
            },
        })
    }

    /// Confidence ellipse for the 2-d latent position of one node.
    ///
    /// Eigendecomposes the `z`-subblock `V` of the scaled variance; the
    /// semi-axis for eigenvalue `lambda_k` is `sqrt(chi2_2(level) lambda_k)`
    /// and the angle is that of the leading eigenvector.
    pub fn confidence_ellipse(
        &self,
        state: &LatentState<F>,
        node: usize,
        level: F,
    ) -> Result<ConfidenceEllipse<F>> {
        if self.r != 2 {
            return Err(Error::EllipseDimension { r: self.r });
        }
        let lf = level.to_f64_lossy();
        if !(0.0 < lf && lf < 1.0) {
            return Err(Error::InvalidArgument("level must be in (0,1)".into()));
        }
        let cov = self.scaled_variance_block(node, state.n())?;
        let v = cov.slice(s![0..2, 0..2]).to_owned();
        let eig = symmetric_eigen(&v)?;
        // ascending order: index 1 is the leading eigenpair
        let l_major = eig.values[1].max(F::zero());
        let l_minor = eig.values[0].max(F::zero());
        let chi2 = F::from_f64_lossy(stats::chi_squared_quantile(2.0, lf));
        let vx = eig.vectors[(0, 1)];
        let vy = eig.vectors[(1, 1)];
        let mut angle = vy.atan2(vx);
        // an axis is direction-free: report in (-pi/2, pi/2]
        let pi = F::from_f64_lossy(std::f64::consts::PI);
        let half_pi = pi / F::from_f64_lossy(2.0);
        if angle > half_pi {
            angle -= pi;
        } else if angle <= -half_pi {
            angle += pi;
        }
        Ok(ConfidenceEllipse {
            center: [state.z[(node, 0)], state.z[(node, 1)]],
            semi_axes: [(chi2 * l_major).sqrt(), (chi2 * l_minor).sqrt()],
            angle,
        })
    }
}

/// Link-probability point estimate and confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct LinkProbability<F> {
    pub theta_hat: F,
    pub lower: F,
    pub upper: F,
    /// Unnormalized sandwich variance of `theta_hat` (divide by `w_n n` for
    /// the interval scale).
    pub variance: F,
}

/// Confidence interval for the linkage probability `theta_ij` of a
/// Bernoulli-logistic model.
///
/// Uses the delta-method variance
/// `[theta(1-theta)]^2 (h_j; h_i)' blockdiag(Sigma_i^{-1}, Sigma_j^{-1})
///  Omega_{ij} blockdiag(Sigma_i^{-1}, Sigma_j^{-1}) (h_j; h_i)`,
/// and truncates the interval to [0, 1].
pub fn ci_link_probability<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    i: usize,
    j: usize,
    level: F,
    w_n: F,
) -> Result<LinkProbability<F>> {
    if spec.family != EdgeFamily::Bernoulli || spec.link != LinkFunction::Logistic {
        return Err(Error::InvalidSpec(
            "link-probability intervals are defined for the Bernoulli-logistic family".into(),
        ));
    }
    if i == j {
        return Err(Error::InvalidArgument(
            "link probability needs two distinct nodes".into(),
        ));
    }
    let lf = level.to_f64_lossy();
    if !(0.0 < lf && lf < 1.0) {
        return Err(Error::InvalidArgument("level must be in (0,1)".into()));
    }
    check_node(net, i)?;
    check_node(net, j)?;

    let bundle = covariance_bundle(net, state, spec, &[i, j], w_n)?;
    let theta = logistic(state.pi_total(i, j));

    let d = state.r() + 1;
    // stacked (h_j; h_i): h_j pairs with node i's blocks
    let mut v = Array1::<F>::zeros(2 * d);
    let hj = state.h(j);
    let hi = state.h(i);
    for k in 0..d {
        v[k] = hj[k];
        v[d + k] = hi[k];
    }

    let factor = theta * (F::one() - theta);
    // var_sandwich already equals Sigma^{-1} Omega Sigma^{-1}
    let quad = v.dot(&bundle.var_sandwich.dot(&v));
    let variance = factor * factor * quad;

    let zq = F::from_f64_lossy(stats::normal_two_sided(lf));
    let denom = w_n * F::from_usize_lossy(net.n());
    let half = zq * (variance / denom).max(F::zero()).sqrt();
    Ok(LinkProbability {
        theta_hat: theta,
        lower: (theta - half).max(F::zero()),
        upper: (theta + half).min(F::one()),
        variance,
    })
}
