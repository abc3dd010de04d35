//! Model family, edge log-likelihoods, derivatives, and score blocks.
//!
//! The linear predictor for a node pair is
//! `pi_ij = z_i' z_j + alpha_i + alpha_j`, and the edge parameter is
//! `theta_ij = sigma(pi_ij + rho)` for the link `sigma` and global offset
//! `rho` (zero outside sparse mode). Two concrete families are supported:
//! Bernoulli edges with the logistic link and Gaussian edges with the
//! identity link and known noise scale `delta`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFamily {
    Bernoulli,
    Gaussian,
}

impl EdgeFamily {
    pub fn name(self) -> &'static str {
        match self {
            EdgeFamily::Bernoulli => "bernoulli",
            EdgeFamily::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkFunction {
    Logistic,
    Identity,
}

impl LinkFunction {
    pub fn name(self) -> &'static str {
        match self {
            LinkFunction::Logistic => "logistic",
            LinkFunction::Identity => "identity",
        }
    }
}

/// Undirected network with dense symmetric edge storage and zero diagonal.
#[derive(Debug, Clone)]
pub struct Network<F> {
    edges: Array2<F>,
    family: EdgeFamily,
    labels: Option<Vec<String>>,
}

impl<F: Scalar> Network<F> {
    /// Validates symmetry, zero diagonal, and family-admissible entries.
    pub fn new(edges: Array2<F>, family: EdgeFamily, labels: Option<Vec<String>>) -> Result<Self> {
        let n = edges.nrows();
        if edges.ncols() != n {
            return Err(Error::InvalidNetwork(format!(
                "edge matrix must be square, got {}x{}",
                n,
                edges.ncols()
            )));
        }
        if let Some(ref l) = labels
            && l.len() != n
        {
            return Err(Error::DimensionMismatch {
                context: "network labels",
                expected: n,
                actual: l.len(),
            });
        }
        for i in 0..n {
            if edges[(i, i)] != F::zero() {
                return Err(Error::InvalidNetwork(format!(
                    "self-loop at node {i}: diagonal must be zero"
                )));
            }
            for j in 0..i {
                if edges[(i, j)] != edges[(j, i)] {
                    return Err(Error::InvalidNetwork(format!(
                        "asymmetric entries at ({i}, {j})"
                    )));
                }
                validate_edge_value(family, edges[(i, j)])?;
            }
        }
        Ok(Self {
            edges,
            family,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.edges.nrows()
    }

    pub fn edges(&self) -> &Array2<F> {
        &self.edges
    }

    pub fn family(&self) -> EdgeFamily {
        self.family
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Degree of node `i`: number of nonzero incident edges.
    pub fn degree(&self, i: usize) -> usize {
        (0..self.n())
            .filter(|&j| j != i && self.edges[(i, j)] != F::zero())
            .count()
    }

    /// Mean off-diagonal edge value (Bernoulli) or mean absolute value
    /// (Gaussian); the density proxy used by the spectral threshold.
    pub fn mean_edge_level(&self) -> F {
        let n = self.n();
        if n < 2 {
            return F::zero();
        }
        let mut sum = F::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += match self.family {
                        EdgeFamily::Bernoulli => self.edges[(i, j)],
                        EdgeFamily::Gaussian => self.edges[(i, j)].abs(),
                    };
                }
            }
        }
        sum / F::from_usize_lossy(n * (n - 1))
    }
}

pub(crate) fn validate_edge_value<F: Scalar>(family: EdgeFamily, a: F) -> Result<()> {
    match family {
        EdgeFamily::Bernoulli => {
            if a == F::zero() || a == F::one() {
                Ok(())
            } else {
                Err(Error::InvalidEdgeValue {
                    value: a.to_f64_lossy(),
                    family: family.name(),
                })
            }
        }
        EdgeFamily::Gaussian => {
            if a.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidEdgeValue {
                    value: a.to_f64_lossy(),
                    family: family.name(),
                })
            }
        }
    }
}

/// Full per-node parameter state: latent positions `Z` (n x r), degree
/// parameters `alpha` (n), and the sparsity offset `rho`.
#[derive(Debug, Clone)]
pub struct LatentState<F> {
    pub z: Array2<F>,
    pub alpha: Array1<F>,
    pub rho: F,
}

impl<F: Scalar> LatentState<F> {
    pub fn new(z: Array2<F>, alpha: Array1<F>, rho: F) -> Result<Self> {
        if z.nrows() != alpha.len() {
            return Err(Error::DimensionMismatch {
                context: "latent state rows",
                expected: z.nrows(),
                actual: alpha.len(),
            });
        }
        Ok(Self { z, alpha, rho })
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn r(&self) -> usize {
        self.z.ncols()
    }

    /// Node block `phi_i = (z_i, alpha_i)`.
    pub fn phi(&self, i: usize) -> Array1<F> {
        let r = self.r();
        let mut out = Array1::zeros(r + 1);
        for k in 0..r {
            out[k] = self.z[(i, k)];
        }
        out[r] = self.alpha[i];
        out
    }

    /// Regressor block `h_i = (z_i, 1)`.
    pub fn h(&self, i: usize) -> Array1<F> {
        let r = self.r();
        let mut out = Array1::zeros(r + 1);
        for k in 0..r {
            out[k] = self.z[(i, k)];
        }
        out[r] = F::one();
        out
    }

    /// Linear predictor including the offset: `z_i' z_j + alpha_i + alpha_j + rho`.
    pub fn pi_total(&self, i: usize, j: usize) -> F {
        let mut dot = F::zero();
        for k in 0..self.r() {
            dot += self.z[(i, k)] * self.z[(j, k)];
        }
        dot + self.alpha[i] + self.alpha[j] + self.rho
    }

    /// Dense matrix of `pi_total` values; the diagonal is meaningless and
    /// must be ignored by callers.
    pub fn pi_total_matrix(&self) -> Array2<F> {
        let n = self.n();
        let mut out = self.z.dot(&self.z.t());
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += self.alpha[i] + self.alpha[j] + self.rho;
            }
        }
        out
    }
}

/// Model family, link, and the constraint/configuration constants they carry.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec<F> {
    pub family: EdgeFamily,
    pub link: LinkFunction,
    /// Gaussian noise standard deviation (ignored by Bernoulli).
    pub delta: F,
    /// Projection radius for per-node blocks `phi_i`.
    pub m_radius: F,
    pub sparse_mode: bool,
    /// Latent dimension.
    pub r: usize,
}

impl<F: Scalar> ModelSpec<F> {
    pub const DEFAULT_M_RADIUS: f64 = 10.0;

    pub fn bernoulli(r: usize) -> Result<Self> {
        Self::new(
            EdgeFamily::Bernoulli,
            LinkFunction::Logistic,
            F::one(),
            F::from_f64_lossy(Self::DEFAULT_M_RADIUS),
            false,
            r,
        )
    }

    pub fn gaussian(r: usize, delta: F) -> Result<Self> {
        Self::new(
            EdgeFamily::Gaussian,
            LinkFunction::Identity,
            delta,
            F::from_f64_lossy(Self::DEFAULT_M_RADIUS),
            false,
            r,
        )
    }

    pub fn new(
        family: EdgeFamily,
        link: LinkFunction,
        delta: F,
        m_radius: F,
        sparse_mode: bool,
        r: usize,
    ) -> Result<Self> {
        match (family, link) {
            (EdgeFamily::Bernoulli, LinkFunction::Logistic)
            | (EdgeFamily::Gaussian, LinkFunction::Identity) => {}
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "{} family pairs with the {} link only",
                    family.name(),
                    match family {
                        EdgeFamily::Bernoulli => "logistic",
                        EdgeFamily::Gaussian => "identity",
                    }
                )));
            }
        }
        if !(delta > F::zero()) {
            return Err(Error::InvalidSpec("delta must be positive".into()));
        }
        if !(m_radius > F::zero()) {
            return Err(Error::InvalidSpec(
                "projection radius M must be positive".into(),
            ));
        }
        if r == 0 {
            return Err(Error::InvalidSpec("latent dimension r must be >= 1".into()));
        }
        Ok(Self {
            family,
            link,
            delta,
            m_radius,
            sparse_mode,
            r,
        })
    }

    pub fn with_sparse_mode(mut self, sparse: bool) -> Self {
        self.sparse_mode = sparse;
        self
    }

    pub fn with_m_radius(mut self, m: F) -> Self {
        self.m_radius = m;
        self
    }
}

/// Numerically stable `log(1 + e^x)`.
pub fn log1pexp<F: Scalar>(x: F) -> F {
    if x > F::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable logistic function `1 / (1 + e^-x)`.
pub fn logistic<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Logit `log(p / (1 - p))`.
pub fn logit<F: Scalar>(p: F) -> F {
    (p / (F::one() - p)).ln()
}

/// Evaluate the link function.
pub fn link_eval<F: Scalar>(link: LinkFunction, x: F) -> F {
    match link {
        LinkFunction::Logistic => logistic(x),
        LinkFunction::Identity => x,
    }
}

/// Edge log-likelihood `l(pi; a)` as a function of the total linear
/// predictor `pi_total = pi + rho`.
///
/// Gaussian drops the additive `-log(2 pi delta^2)/2` normalization: it is
/// constant in the parameters, so scores, curvatures, and maximizers are
/// unchanged.
pub fn loglik_edge<F: Scalar>(spec: &ModelSpec<F>, a: F, pi_total: F) -> Result<F> {
    validate_edge_value(spec.family, a)?;
    Ok(loglik_edge_unchecked(spec, a, pi_total))
}

#[inline]
pub(crate) fn loglik_edge_unchecked<F: Scalar>(spec: &ModelSpec<F>, a: F, pi_total: F) -> F {
    match spec.family {
        EdgeFamily::Bernoulli => a * pi_total - log1pexp(pi_total),
        EdgeFamily::Gaussian => {
            let resid = a - pi_total;
            let two = F::from_f64_lossy(2.0);
            -(resid * resid) / (two * spec.delta * spec.delta)
        }
    }
}

/// First three derivatives of [`loglik_edge`] in `pi_total`.
pub fn loglik_derivs<F: Scalar>(spec: &ModelSpec<F>, a: F, pi_total: F) -> Result<(F, F, F)> {
    validate_edge_value(spec.family, a)?;
    Ok(loglik_derivs_unchecked(spec, a, pi_total))
}

#[inline]
pub(crate) fn loglik_derivs_unchecked<F: Scalar>(
    spec: &ModelSpec<F>,
    a: F,
    pi_total: F,
) -> (F, F, F) {
    match spec.family {
        EdgeFamily::Bernoulli => {
            let theta = logistic(pi_total);
            // theta * (1 - theta) underflows for |pi| beyond ~37; the
            // two-logistic product keeps the tail strictly positive.
            let curv = theta * logistic(-pi_total);
            let two = F::from_f64_lossy(2.0);
            (a - theta, -curv, curv * (two * theta - F::one()))
        }
        EdgeFamily::Gaussian => {
            let inv_var = F::one() / (spec.delta * spec.delta);
            ((a - pi_total) * inv_var, -inv_var, F::zero())
        }
    }
}

#[inline]
pub(crate) fn l1_unchecked<F: Scalar>(spec: &ModelSpec<F>, a: F, pi_total: F) -> F {
    match spec.family {
        EdgeFamily::Bernoulli => a - logistic(pi_total),
        EdgeFamily::Gaussian => (a - pi_total) / (spec.delta * spec.delta),
    }
}

#[inline]
pub(crate) fn l2_unchecked<F: Scalar>(spec: &ModelSpec<F>, pi_total: F) -> F {
    match spec.family {
        EdgeFamily::Bernoulli => -(logistic(pi_total) * logistic(-pi_total)),
        EdgeFamily::Gaussian => -F::one() / (spec.delta * spec.delta),
    }
}

fn check_dims<F: Scalar>(net: &Network<F>, state: &LatentState<F>, spec: &ModelSpec<F>) -> Result<()> {
    if net.n() != state.n() {
        return Err(Error::DimensionMismatch {
            context: "network vs state",
            expected: net.n(),
            actual: state.n(),
        });
    }
    if state.r() != spec.r {
        return Err(Error::DimensionMismatch {
            context: "latent dimension",
            expected: spec.r,
            actual: state.r(),
        });
    }
    if net.family() != spec.family {
        return Err(Error::InvalidSpec(format!(
            "network family {} does not match spec family {}",
            net.family().name(),
            spec.family.name()
        )));
    }
    Ok(())
}

/// Total log-likelihood: sum of [`loglik_edge`] over unordered pairs `i < j`.
pub fn total_loglik<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
) -> Result<F> {
    check_dims(net, state, spec)?;
    let pi = state.pi_total_matrix();
    Ok(total_loglik_from_pi(net, spec, &pi))
}

pub(crate) fn total_loglik_from_pi<F: Scalar>(
    net: &Network<F>,
    spec: &ModelSpec<F>,
    pi: &Array2<F>,
) -> F {
    let n = net.n();
    let edges = net.edges();
    let mut sum = F::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            sum += loglik_edge_unchecked(spec, edges[(i, j)], pi[(i, j)]);
        }
    }
    sum
}

/// Score blocks: row `i` is `sum_{j != i} l'(pi_total_ij) h_j`, the gradient
/// of [`total_loglik`] with respect to `phi_i = (z_i, alpha_i)`.
pub fn score<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
) -> Result<Array2<F>> {
    check_dims(net, state, spec)?;
    let pi = state.pi_total_matrix();
    Ok(score_from_pi(net, state, spec, &pi))
}

pub(crate) fn score_from_pi<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
    pi: &Array2<F>,
) -> Array2<F> {
    let n = net.n();
    let r = state.r();
    let edges = net.edges();

    // l'(pi_ij) with zero diagonal; symmetric because edges and pi are.
    let mut l1 = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = l1_unchecked(spec, edges[(i, j)], pi[(i, j)]);
            l1[(i, j)] = v;
            l1[(j, i)] = v;
        }
    }

    // Block i = sum_j l1_ij * (z_j, 1): the z-part is a matrix product and
    // the alpha-part a row sum.
    let sz = l1.dot(&state.z);
    let mut out = Array2::zeros((n, r + 1));
    for i in 0..n {
        for k in 0..r {
            out[(i, k)] = sz[(i, k)];
        }
        let mut rowsum = F::zero();
        for j in 0..n {
            rowsum += l1[(i, j)];
        }
        out[(i, r)] = rowsum;
    }
    out
}

/// Euclidean norm of the full score vector (all blocks stacked).
pub fn score_norm<F: Scalar>(
    net: &Network<F>,
    state: &LatentState<F>,
    spec: &ModelSpec<F>,
) -> Result<F> {
    let s = score(net, state, spec)?;
    Ok(s.iter().map(|&x| x * x).sum::<F>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn bern_spec() -> ModelSpec<f64> {
        ModelSpec::bernoulli(1).unwrap()
    }

    #[test]
    fn link_eval_examples() {
        assert_abs_diff_eq!(link_eval(LinkFunction::Logistic, 0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(link_eval(LinkFunction::Identity, 1.3), 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(
            link_eval(LinkFunction::Logistic, -3.0),
            1.0 / (1.0 + 3.0f64.exp()),
            epsilon = 1e-15
        );
        assert!(link_eval(LinkFunction::Logistic, 800.0) <= 1.0);
        assert!(link_eval(LinkFunction::Logistic, -800.0) >= 0.0);
    }

    #[test]
    fn loglik_edge_examples() {
        let spec = bern_spec();
        assert_abs_diff_eq!(
            loglik_edge(&spec, 1.0, 0.0).unwrap(),
            -(2.0f64.ln()),
            epsilon = 1e-15
        );

        let gspec = ModelSpec::gaussian(1, 1.0).unwrap();
        assert_abs_diff_eq!(loglik_edge(&gspec, 2.0, 2.0).unwrap(), 0.0, epsilon = 1e-15);

        // Large predictor without overflow: -log(1 + e^50) = -(50 + log(1 + e^-50)).
        let v = loglik_edge(&spec, 0.0, 50.0).unwrap();
        assert!(v.is_finite());
        assert_abs_diff_eq!(v, -50.0 - (-50.0f64).exp().ln_1p(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, -50.0, epsilon = 1e-12);

        // Far beyond naive exp() range.
        let v = loglik_edge(&spec, 0.0, 700.0).unwrap();
        assert_abs_diff_eq!(v, -700.0, epsilon = 1e-9);
    }

    #[test]
    fn loglik_edge_rejects_bad_values() {
        let spec = bern_spec();
        assert!(loglik_edge(&spec, 0.5, 0.0).is_err());
        let gspec = ModelSpec::gaussian(1, 1.0).unwrap();
        assert!(loglik_edge(&gspec, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn loglik_derivs_examples() {
        let spec = bern_spec();
        let (l1, l2, l3) = loglik_derivs(&spec, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(l1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l2, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(l3, 0.0, epsilon = 1e-15);

        let gspec = ModelSpec::gaussian(1, 1.0).unwrap();
        let (l1, l2, l3) = loglik_derivs(&gspec, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(l1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l2, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l3, 0.0, epsilon = 1e-15);

        let (l1, _, _) = loglik_derivs(&spec, 0.0, -3.0).unwrap();
        assert_abs_diff_eq!(l1, -1.0 / (1.0 + 3.0f64.exp()), epsilon = 1e-15);
    }

    #[test]
    fn bernoulli_l2_range() {
        let spec = bern_spec();
        for x in [-30.0, -5.0, -1.0, 0.0, 0.5, 3.0, 40.0] {
            let (_, l2, _) = loglik_derivs(&spec, 0.0, x).unwrap();
            assert!(l2 < 0.0);
            assert!(l2 >= -0.25);
            if x == 0.0 {
                assert_abs_diff_eq!(l2, -0.25, epsilon = 1e-15);
            } else {
                assert!(l2 > -0.25);
            }
        }
    }

    fn tiny_network() -> (Network<f64>, LatentState<f64>, ModelSpec<f64>) {
        let edges = array![[0.0, 1.0], [1.0, 0.0]];
        let net = Network::new(edges, EdgeFamily::Bernoulli, None).unwrap();
        let z = array![[0.5], [-0.5]];
        let alpha = array![0.25, 0.0];
        let state = LatentState::new(z, alpha, 0.0).unwrap();
        (net, state, bern_spec())
    }

    #[test]
    fn total_loglik_single_pair() {
        let edges = array![[0.0, 1.0], [1.0, 0.0]];
        let net = Network::new(edges, EdgeFamily::Bernoulli, None).unwrap();
        let state = LatentState::new(array![[0.0], [0.0]], array![0.0, 0.0], 0.0).unwrap();
        let spec = bern_spec();
        assert_abs_diff_eq!(
            total_loglik(&net, &state, &spec).unwrap(),
            -(2.0f64.ln()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn total_loglik_zero_state_counts_pairs() {
        // With Z = 0, alpha = 0, rho = 0 each pair contributes
        // a_ij * 0 - log 2.
        let n = 5;
        let mut edges = Array2::<f64>::zeros((n, n));
        edges[(0, 1)] = 1.0;
        edges[(1, 0)] = 1.0;
        edges[(2, 4)] = 1.0;
        edges[(4, 2)] = 1.0;
        let net = Network::new(edges, EdgeFamily::Bernoulli, None).unwrap();
        let state = LatentState::new(Array2::zeros((n, 2)), Array1::zeros(n), 0.0).unwrap();
        let spec = ModelSpec::bernoulli(2).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        assert_abs_diff_eq!(
            total_loglik(&net, &state, &spec).unwrap(),
            -pairs * 2.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn total_loglik_matches_independent_loop_order() {
        // Brute-force oracle sweeping j then i over the lower triangle.
        let (net, state, spec) = tiny_network();
        let mut brute = 0.0;
        let n = net.n();
        for j in 0..n {
            for i in 0..n {
                if i < j {
                    let a = net.edges()[(j, i)];
                    let pi = state.pi_total(j, i);
                    brute += a * pi - (1.0 + pi.exp()).ln();
                }
            }
        }
        assert_abs_diff_eq!(
            total_loglik(&net, &state, &spec).unwrap(),
            brute,
            epsilon = 1e-12
        );
    }

    #[test]
    fn score_single_neighbor() {
        let (net, state, spec) = tiny_network();
        let s = score(&net, &state, &spec).unwrap();
        let pi = state.pi_total(0, 1);
        let l1 = 1.0 - logistic(pi);
        assert_abs_diff_eq!(s[(0, 0)], l1 * state.z[(1, 0)], epsilon = 1e-14);
        assert_abs_diff_eq!(s[(0, 1)], l1, epsilon = 1e-14);
    }

    #[test]
    fn score_zero_at_exact_gaussian_fit() {
        // a == theta everywhere: all residuals vanish.
        let z = array![[0.3, -0.1], [0.2, 0.4], [-0.5, 0.1]];
        let alpha = array![0.1, -0.2, 0.3];
        let state = LatentState::new(z, alpha, 0.0).unwrap();
        let spec = ModelSpec::gaussian(2, 1.0).unwrap();
        let n = 3;
        let mut edges = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = state.pi_total(i, j);
                edges[(i, j)] = v;
                edges[(j, i)] = v;
            }
        }
        let net = Network::new(edges, EdgeFamily::Gaussian, None).unwrap();
        let s = score(&net, &state, &spec).unwrap();
        for v in s.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn network_validation() {
        let asym = array![[0.0, 1.0], [0.0, 0.0]];
        assert!(Network::new(asym, EdgeFamily::Bernoulli, None).is_err());

        let selfloop = array![[1.0, 0.0], [0.0, 0.0]];
        assert!(Network::new(selfloop, EdgeFamily::Bernoulli, None).is_err());

        let nonbinary = array![[0.0, 0.7], [0.7, 0.0]];
        assert!(Network::new(nonbinary, EdgeFamily::Bernoulli, None).is_err());
        assert!(Network::new(array![[0.0, 0.7], [0.7, 0.0]], EdgeFamily::Gaussian, None).is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(
            ModelSpec::<f64>::new(
                EdgeFamily::Bernoulli,
                LinkFunction::Identity,
                1.0,
                10.0,
                false,
                2
            )
            .is_err()
        );
        assert!(ModelSpec::<f64>::gaussian(0, 1.0).is_err());
        assert!(ModelSpec::<f64>::gaussian(2, -1.0).is_err());
    }
}
