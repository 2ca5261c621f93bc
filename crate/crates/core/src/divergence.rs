//! Quantum divergences and their lambda-decomposition.
//!
//! The chi^2_lambda contrast is the atomic object: the relative entropy is
//! its integral against the weight w(lambda) = lambda, and other
//! operator-convex divergences use their own weights. All spectral
//! evaluations run through the Jacobi eigensolver in `linalg`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::eig::hermitian_eig;
use crate::linalg::states::{matrix_log_psd, matrix_sqrt_psd, DensityMatrix};

/// Denominators of chi^2_lambda below this are clamped and the evaluation
/// flagged, so bound validity stays auditable instead of silently regular.
pub const CHI2_DENOMINATOR_FLOOR: f64 = 1e-14;

/// Eigenvalues of the second argument below this make the modular operator
/// spectral form ill-defined.
const RANK_TOL: f64 = 1e-14;

/// Gauss-Legendre nodes and weights mapped to (0, 1).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    /// Standard Gauss-Legendre rule of the given order on [0, 1]. Nodes are
    /// strictly interior, so integrands may blow up at the endpoints.
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!(
                "quadrature order must be >= 2, got {order}"
            )));
        }
        let (nodes, weights) = legendre_nodes_unit(order);
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "quadrature weights sum to {total}, expected 1"
            )));
        }
        if nodes.iter().any(|&x| x <= 0.0 || x >= 1.0) {
            return Err(Error::InvalidParameter(
                "quadrature nodes must lie strictly inside (0, 1)".into(),
            ));
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            order,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Free-function form of the rule constructor.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    QuadratureRule::gauss_legendre(order)
}

/// Gauss-Legendre on [-1, 1] by Newton iteration on the Legendre recurrence,
/// then mapped to [0, 1]. Symmetric nodes are mirrored exactly.
fn legendre_nodes_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess for the i-th root (descending)
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // central node is exactly zero
        let (_, d) = legendre_eval(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    let nodes = nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let weights = weights.iter().map(|w| 0.5 * w).collect();
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by upward recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Weight w(lambda) of the chi^2_lambda decomposition of an f-divergence.
#[derive(Clone)]
pub enum WeightFunction {
    /// w(lambda) = lambda; integrates to the relative entropy.
    Kl,
    /// w(lambda) = sqrt(lambda (1 - lambda)) / pi; integrates to the
    /// Bures-Hellinger contrast 1 - Tr(sqrt(rho) sqrt(sigma)).
    BuresHellinger,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl WeightFunction {
    pub fn evaluate(&self, lambda: f64) -> f64 {
        match self {
            WeightFunction::Kl => lambda,
            WeightFunction::BuresHellinger => (lambda * (1.0 - lambda)).max(0.0).sqrt() / PI,
            WeightFunction::Custom(f) => f(lambda),
        }
    }
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightFunction::Kl => write!(f, "WeightFunction::Kl"),
            WeightFunction::BuresHellinger => write!(f, "WeightFunction::BuresHellinger"),
            WeightFunction::Custom(_) => write!(f, "WeightFunction::Custom"),
        }
    }
}

/// Tr[rho (log rho - log sigma)] with spectral logs floored at `floor`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, floor: f64) -> Result<f64> {
    let log_rho = matrix_log_psd(rho, floor)?;
    let log_sigma = matrix_log_psd(sigma, floor)?;
    let diff = log_rho.matrix() - log_sigma.matrix();
    Ok(rho.matrix().trace_product_re(&diff))
}

/// Spectra plus the cross matrix M = A^dag (rho - sigma) B needed by every
/// lambda evaluation; computing it once makes weight integrals cheap.
struct Chi2Kernel {
    p: Vec<f64>,
    q: Vec<f64>,
    cross_sqr: Vec<Vec<f64>>, // |M_ij|^2
}

impl Chi2Kernel {
    fn new(rho: &DensityMatrix, sigma: &DensityMatrix) -> Self {
        let er = hermitian_eig(rho.hermitian());
        let es = hermitian_eig(sigma.hermitian());
        let delta = rho.matrix() - sigma.matrix();
        let m = &(&er.eigenvectors.adjoint() * &delta) * &es.eigenvectors;
        let n = rho.dim();
        let cross_sqr = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].norm_sqr()).collect())
            .collect();
        Chi2Kernel {
            p: er.eigenvalues,
            q: es.eigenvalues,
            cross_sqr,
        }
    }

    fn eval(&self, lambda: f64) -> (f64, bool) {
        let mut acc = 0.0;
        let mut floored = false;
        for (i, row) in self.cross_sqr.iter().enumerate() {
            for (j, &num) in row.iter().enumerate() {
                let mut den = (1.0 - lambda) * self.p[i] + lambda * self.q[j];
                if den < CHI2_DENOMINATOR_FLOOR {
                    den = CHI2_DENOMINATOR_FLOOR;
                    floored = true;
                }
                acc += num / den;
            }
        }
        (acc, floored)
    }
}

/// chi^2_lambda(rho || sigma): the quadratic contrast built from the
/// interpolated left/right multiplication operator
/// (1 - lambda) L_rho + lambda R_sigma, evaluated spectrally.
///
/// Returns the value and a flag that is set when any denominator had to be
/// clamped at `CHI2_DENOMINATOR_FLOOR`.
pub fn chi2_lambda(rho: &DensityMatrix, sigma: &DensityMatrix, lambda: f64) -> (f64, bool) {
    debug_assert!(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    Chi2Kernel::new(rho, sigma).eval(lambda)
}

/// Petz f-divergence in the modular-operator spectral form
/// sum_ij q_j f(p_i / q_j) |<i_rho | j_sigma>|^2.
///
/// Serves as the independent oracle for the log-based relative entropy
/// (f(t) = t ln t) and for the Hellinger affinity (f(t) = 1 - sqrt t).
/// `sigma` must be full rank; use a floor upstream if it is not.
pub fn petz_f_divergence_spectral(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let er = hermitian_eig(rho.hermitian());
    let es = hermitian_eig(sigma.hermitian());
    if es.eigenvalues[0] < RANK_TOL {
        return Err(Error::RankDeficient(format!(
            "second argument has eigenvalue {:.3e}",
            es.eigenvalues[0]
        )));
    }
    let overlap = &er.eigenvectors.adjoint() * &es.eigenvectors;
    let n = rho.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let p = er.eigenvalues[i].max(0.0);
        for j in 0..n {
            let q = es.eigenvalues[j];
            acc += q * f(p / q) * overlap[(i, j)].norm_sqr();
        }
    }
    Ok(acc)
}

/// Integral of w(lambda) chi^2_lambda(rho || sigma) over (0, 1) under the
/// given rule. The flag reports whether any node needed denominator clamping.
pub fn f_divergence_via_weights(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    weight: &WeightFunction,
    quad: &QuadratureRule,
) -> (f64, bool) {
    let kernel = Chi2Kernel::new(rho, sigma);
    let mut acc = 0.0;
    let mut floored = false;
    for (&x, &w) in quad.nodes().iter().zip(quad.weights()) {
        let (chi, fl) = kernel.eval(x);
        floored |= fl;
        acc += w * weight.evaluate(x) * chi;
    }
    (acc, floored)
}

/// Bures-Hellinger contrast 1 - Tr(sqrt(rho) sqrt(sigma)).
pub fn hellinger_affinity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let sr = matrix_sqrt_psd(rho);
    let ss = matrix_sqrt_psd(sigma);
    1.0 - sr.matrix().trace_product_re(ss.matrix())
}
