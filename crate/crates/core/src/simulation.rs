//! Seeded generators for the synthetic experiment settings.
//!
//! Latent positions are i.i.d. truncated standard normal on [-2, 2], degree
//! parameters i.i.d. uniform on [1, 3]; both are centered and the positions
//! canonicalized, so generated truths satisfy the identifiability
//! constraints the estimator targets. The offset `rho` is -3 in the bounded
//! settings and `-log(n)/2` in the sparse setting.
//!
//! Every generator is a pure function of `(setting, seed, rep_index)`:
//! replication `k` draws from an independent ChaCha stream derived from the
//! setting seed, so runs reproduce bitwise and replications can be consumed
//! concurrently.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimation::apply_identifiability;
use crate::model::{EdgeFamily, LatentState, ModelSpec, Network, logistic};
use crate::scalar::Scalar;

/// Experiment family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SettingKind {
    /// Independent Bernoulli edges, bounded parameters, rho = -3.
    BoundedIndep,
    /// Dependent Bernoulli edges from the decaying-product chain.
    Dependent1,
    /// Independent edges given an extra hidden latent dimension that the
    /// fitted model ignores.
    Dependent2,
    /// Independent Bernoulli edges with rho = -log(n)/2.
    Sparse,
    /// Independent Gaussian edges, identity link.
    GaussianIndep,
}

impl SettingKind {
    pub fn name(self) -> &'static str {
        match self {
            SettingKind::BoundedIndep => "bounded-indep",
            SettingKind::Dependent1 => "dependent-1",
            SettingKind::Dependent2 => "dependent-2",
            SettingKind::Sparse => "sparse",
            SettingKind::GaussianIndep => "gaussian-indep",
        }
    }
}

/// Rule for the generating offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoRule<F> {
    Fixed(F),
    /// `rho = -log(n)/2`.
    HalfLogN,
}

impl<F: Scalar> RhoRule<F> {
    pub fn value(self, n: usize) -> F {
        match self {
            RhoRule::Fixed(v) => v,
            RhoRule::HalfLogN => {
                -F::from_usize_lossy(n).ln() / F::from_f64_lossy(2.0)
            }
        }
    }
}

/// Full description of one synthetic setting.
#[derive(Debug, Clone, Copy)]
pub struct SimSetting<F> {
    pub kind: SettingKind,
    pub n: usize,
    pub r: usize,
    pub rho_rule: RhoRule<F>,
    /// Correlation strength of the dependent chain, as a fraction of the
    /// feasibility bound (Dependent1 only).
    pub dep_kappa: F,
    /// Fraction of nodes carrying the hidden dimension (Dependent2 only).
    pub hidden_prop: F,
    pub seed: u64,
    /// Gaussian noise scale (GaussianIndep only).
    pub delta: F,
}

impl<F: Scalar> SimSetting<F> {
    /// Paper-style defaults for each kind: r = 2, rho = -3 for the bounded
    /// and dependent settings, `-log(n)/2` for sparse, 0 for Gaussian;
    /// kappa = 0.5; hidden proportion 0.5 ("2b").
    pub fn new(kind: SettingKind, n: usize, seed: u64) -> Self {
        let rho_rule = match kind {
            SettingKind::Sparse => RhoRule::HalfLogN,
            SettingKind::GaussianIndep => RhoRule::Fixed(F::zero()),
            _ => RhoRule::Fixed(F::from_f64_lossy(-3.0)),
        };
        Self {
            kind,
            n,
            r: 2,
            rho_rule,
            dep_kappa: if kind == SettingKind::Dependent1 {
                F::from_f64_lossy(0.5)
            } else {
                F::zero()
            },
            hidden_prop: if kind == SettingKind::Dependent2 {
                F::from_f64_lossy(0.5)
            } else {
                F::zero()
            },
            seed,
            delta: F::one(),
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_hidden_prop(mut self, p: F) -> Self {
        self.hidden_prop = p;
        self
    }

    pub fn with_kappa(mut self, kappa: F) -> Self {
        self.dep_kappa = kappa;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InvalidArgument("settings need n >= 10".into()));
        }
        if self.r == 0 {
            return Err(Error::InvalidArgument("latent dimension must be >= 1".into()));
        }
        let kappa = self.dep_kappa.to_f64_lossy();
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::InvalidArgument("dep_kappa must be in [0,1)".into()));
        }
        let hp = self.hidden_prop.to_f64_lossy();
        if !(0.0..=1.0).contains(&hp) {
            return Err(Error::InvalidArgument("hidden_prop must be in [0,1]".into()));
        }
        Ok(())
    }

    /// The model the estimator fits for this setting.
    pub fn model_spec(&self) -> ModelSpec<F> {
        match self.kind {
            SettingKind::GaussianIndep => ModelSpec::gaussian(self.r, self.delta)
                .expect("valid gaussian spec"),
            SettingKind::Sparse => ModelSpec::bernoulli(self.r)
                .expect("valid bernoulli spec")
                .with_sparse_mode(true),
            _ => ModelSpec::bernoulli(self.r).expect("valid bernoulli spec"),
        }
    }

    pub fn family(&self) -> EdgeFamily {
        match self.kind {
            SettingKind::GaussianIndep => EdgeFamily::Gaussian,
            _ => EdgeFamily::Bernoulli,
        }
    }
}

/// Generating parameters for one setting draw.
#[derive(Debug, Clone)]
pub struct GroundTruth<F> {
    /// Canonicalized generating state (centered alpha, centered/rotated Z,
    /// offset per the rho rule).
    pub state: LatentState<F>,
    /// True edge parameter matrix: probabilities for Bernoulli families,
    /// means for Gaussian. Includes the hidden-dimension contribution.
    pub theta: Array2<F>,
    /// Hidden positions `Z_dep .* E` (Dependent2 only).
    pub hidden_z: Option<Array1<F>>,
}

/// Standard normal truncated to [-2, 2] by rejection.
fn truncated_normal<F: Scalar, R: Rng + ?Sized>(rng: &mut R) -> F {
    let two = F::from_f64_lossy(2.0);
    loop {
        let x = F::standard_normal(rng);
        if x.abs() <= two {
            return x;
        }
    }
}

/// Draws the generating latent state and true edge parameters for a setting.
pub fn gen_latent<F: Scalar>(setting: &SimSetting<F>) -> Result<GroundTruth<F>> {
    setting.validate()?;
    let n = setting.n;
    let r = setting.r;
    let mut rng = ChaCha8Rng::seed_from_u64(setting.seed);

    let mut z = Array2::<F>::zeros((n, r));
    for v in z.iter_mut() {
        *v = truncated_normal(&mut rng);
    }
    let mut alpha = Array1::<F>::zeros(n);
    for v in alpha.iter_mut() {
        *v = rng.random_range(F::one()..F::from_f64_lossy(3.0));
    }

    // center both exactly, then canonicalize the rotation and signs
    let nf = F::from_usize_lossy(n);
    for k in 0..r {
        let mean = (0..n).map(|i| z[(i, k)]).sum::<F>() / nf;
        for i in 0..n {
            z[(i, k)] -= mean;
        }
    }
    let abar = alpha.iter().copied().sum::<F>() / nf;
    alpha.mapv_inplace(|a| a - abar);

    let rho = setting.rho_rule.value(n);
    let state = apply_identifiability(&LatentState { z, alpha, rho }, false);

    // hidden dimension for Dependent2
    let hidden_z = if setting.kind == SettingKind::Dependent2 {
        let count = (setting.hidden_prop.to_f64_lossy() * n as f64).round() as usize;
        let mut idx: Vec<usize> = (0..n).collect();
        // Fisher-Yates prefix shuffle for the support
        for i in 0..count.min(n) {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        let mut h = Array1::<F>::zeros(n);
        for &i in idx.iter().take(count.min(n)) {
            h[i] = truncated_normal(&mut rng);
        }
        Some(h)
    } else {
        None
    };

    // true edge parameters
    let mut theta = Array2::<F>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut pi = state.pi_total(i, j);
            if let Some(ref h) = hidden_z {
                pi += h[i] * h[j];
            }
            theta[(i, j)] = match setting.family() {
                EdgeFamily::Bernoulli => logistic(pi),
                EdgeFamily::Gaussian => pi,
            };
        }
    }

    Ok(GroundTruth {
        state,
        theta,
        hidden_z,
    })
}

/// Independent edge draws from the true parameters.
pub fn gen_network_independent<F: Scalar>(
    truth: &GroundTruth<F>,
    spec: &ModelSpec<F>,
    seed: u64,
) -> Result<Network<F>> {
    let n = truth.theta.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Array2::<F>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = match spec.family {
                EdgeFamily::Bernoulli => {
                    let u: F = rng.random_range(F::zero()..F::one());
                    if u < truth.theta[(i, j)] {
                        F::one()
                    } else {
                        F::zero()
                    }
                }
                EdgeFamily::Gaussian => {
                    truth.theta[(i, j)] + spec.delta * F::standard_normal(&mut rng)
                }
            };
            edges[(i, j)] = v;
            edges[(j, i)] = v;
        }
    }
    Network::new(edges, spec.family, None)
}

/// Correlated Bernoulli edges: a first-order chain over the lexicographic
/// edge order with prescribed marginals and consecutive correlation
/// `rho_k = kappa * rho_k_max`, where `rho_k_max` is the feasibility bound
/// `min(sqrt(p_k q_{k+1} / (p_{k+1} q_k)), sqrt(p_{k+1} q_k / (p_k q_{k+1})))`.
/// The implied correlation between edges `k` and `k+d` is the product of the
/// intermediate consecutive correlations.
pub fn gen_network_dependent_chain<F: Scalar>(
    truth: &GroundTruth<F>,
    kappa: F,
    seed: u64,
) -> Result<Network<F>> {
    let kf = kappa.to_f64_lossy();
    if !(0.0..1.0).contains(&kf) {
        return Err(Error::InvalidArgument("kappa must be in [0,1)".into()));
    }
    let n = truth.theta.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Array2::<F>::zeros((n, n));

    let mut prev_a: Option<F> = None;
    let mut prev_p = F::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = truth.theta[(i, j)];
            let q = F::one() - p;
            let degenerate = !(p > F::zero()) || !(q > F::zero());

            let cond_p = match prev_a {
                Some(a) if !degenerate => {
                    let pq_prev = prev_p * (F::one() - prev_p);
                    if pq_prev > F::zero() {
                        let b1 = (prev_p * q / (p * (F::one() - prev_p))).sqrt();
                        let b2 = (p * (F::one() - prev_p) / (prev_p * q)).sqrt();
                        let rho_max = b1.min(b2);
                        let rho = kappa * rho_max;
                        let adj = rho * (p * q / pq_prev).sqrt() * (a - prev_p);
                        (p + adj).clamp(F::zero(), F::one())
                    } else {
                        p
                    }
                }
                _ => p,
            };

            let u: F = rng.random_range(F::zero()..F::one());
            let a = if u < cond_p { F::one() } else { F::zero() };
            edges[(i, j)] = a;
            edges[(j, i)] = a;
            // degenerate marginals break the chain (correlation resets)
            if degenerate {
                prev_a = None;
            } else {
                prev_a = Some(a);
                prev_p = p;
            }
        }
    }
    Network::new(edges, EdgeFamily::Bernoulli, None)
}

/// Caches the truth of one setting and hands out independent, reproducible
/// replication draws.
#[derive(Debug, Clone)]
pub struct ReplicationStream<F> {
    setting: SimSetting<F>,
    truth: GroundTruth<F>,
    spec: ModelSpec<F>,
}

impl<F: Scalar> ReplicationStream<F> {
    pub fn new(setting: SimSetting<F>) -> Result<Self> {
        let truth = gen_latent(&setting)?;
        let spec = setting.model_spec();
        Ok(Self {
            setting,
            truth,
            spec,
        })
    }

    pub fn setting(&self) -> &SimSetting<F> {
        &self.setting
    }

    pub fn truth(&self) -> &GroundTruth<F> {
        &self.truth
    }

    pub fn spec(&self) -> &ModelSpec<F> {
        &self.spec
    }

    /// Deterministic sub-seed for a replication.
    fn rep_seed(&self, rep_index: usize) -> u64 {
        // SplitMix64-style mix keeps replication streams well separated.
        let mut x = self
            .setting
            .seed
            .wrapping_add((rep_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^ (x >> 31)
    }

    /// The `rep_index`-th network draw for the cached truth.
    pub fn network(&self, rep_index: usize) -> Result<Network<F>> {
        let seed = self.rep_seed(rep_index);
        match self.setting.kind {
            SettingKind::Dependent1 => {
                gen_network_dependent_chain(&self.truth, self.setting.dep_kappa, seed)
            }
            _ => gen_network_independent(&self.truth, &self.spec, seed),
        }
    }
}
