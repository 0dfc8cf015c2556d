//! Self-contained (μ/μ_w, λ) covariance matrix adaptation evolution
//! strategy with Hansen's reference parameterization: weighted
//! recombination of the best half, cumulative step-size control, rank-one
//! plus rank-μ covariance updates, and lazy eigendecomposition so the
//! amortized per-generation cost stays O(d²).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub(crate) struct Cmaes {
    dim: usize,
    pub(crate) lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mueff: f64,
    cc: f64,
    cs: f64,
    c1: f64,
    cmu: f64,
    damps: f64,
    chi_n: f64,

    mean: DVector<f64>,
    sigma: f64,
    path_sigma: DVector<f64>,
    path_cov: DVector<f64>,
    cov: DMatrix<f64>,
    eig_basis: DMatrix<f64>,
    eig_scale: DVector<f64>,
    inv_sqrt_cov: DMatrix<f64>,
    eval_count: usize,
    last_decomposition: usize,

    best_value: f64,
    best_params: Vec<f64>,
    finite_best: f64,
    finite_worst: f64,
    pub(crate) warnings: Vec<String>,
}

impl Cmaes {
    pub(crate) fn new(dim: usize, mean: Vec<f64>, sigma: f64, lambda: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        assert!(lambda >= 4, "population must hold at least 4 candidates");
        assert!(sigma > 0.0, "initial step must be positive");
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let d = dim as f64;
        let cc = (4.0 + mueff / d) / (d + 4.0 + 2.0 * mueff / d);
        let cs = (mueff + 2.0) / (d + mueff + 5.0);
        let c1 = 2.0 / ((d + 1.3).powi(2) + mueff);
        let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((d + 2.0).powi(2) + mueff));
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (d + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = d.sqrt() * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
        let best_params = mean.clone();
        Self {
            dim,
            lambda,
            mu,
            weights,
            mueff,
            cc,
            cs,
            c1,
            cmu,
            damps,
            chi_n,
            mean: DVector::from_vec(mean),
            sigma,
            path_sigma: DVector::zeros(dim),
            path_cov: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim),
            eig_basis: DMatrix::identity(dim, dim),
            eig_scale: DVector::from_element(dim, 1.0),
            inv_sqrt_cov: DMatrix::identity(dim, dim),
            eval_count: 0,
            last_decomposition: 0,
            best_value: f64::INFINITY,
            best_params,
            finite_best: f64::INFINITY,
            finite_worst: f64::NEG_INFINITY,
            warnings: Vec::new(),
        }
    }

    pub(crate) fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub(crate) fn best_value(&self) -> f64 {
        self.best_value
    }

    pub(crate) fn best_params(&self) -> &[f64] {
        &self.best_params
    }

    pub(crate) fn into_best(self) -> (Vec<f64>, Vec<String>) {
        (self.best_params, self.warnings)
    }

    /// Record the objective value of an externally evaluated point
    /// (the initial mean) so best-ever tracking starts defined.
    pub(crate) fn consider(&mut self, params: &[f64], value: f64) {
        self.note_finite(value);
        if value.is_finite() && value < self.best_value {
            self.best_value = value;
            self.best_params = params.to_vec();
        }
    }

    /// Sample λ candidates from N(mean, σ²C). Draw order is fixed, so a
    /// seeded generator makes the candidate list deterministic.
    pub(crate) fn ask<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        (0..self.lambda)
            .map(|_| {
                let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = &self.mean + (&self.eig_basis * z.component_mul(&self.eig_scale)) * self.sigma;
                x.as_slice().to_vec()
            })
            .collect()
    }

    fn note_finite(&mut self, value: f64) {
        if value.is_finite() {
            self.finite_best = self.finite_best.min(value);
            self.finite_worst = self.finite_worst.max(value);
        }
    }

    /// Non-finite objective values get a penalty beyond the worst finite
    /// value ever seen, so the candidate ranks last without poisoning the
    /// distribution updates.
    fn penalty(&self) -> f64 {
        if self.finite_worst.is_finite() {
            self.finite_worst + 10.0 * (self.finite_worst - self.finite_best).abs()
        } else {
            1e100
        }
    }

    pub(crate) fn tell(&mut self, candidates: &[Vec<f64>], raw_values: &[f64]) {
        debug_assert_eq!(candidates.len(), self.lambda);
        debug_assert_eq!(raw_values.len(), self.lambda);
        self.eval_count += self.lambda;
        for &v in raw_values {
            self.note_finite(v);
        }
        let penalty = self.penalty();
        let values: Vec<f64> = raw_values
            .iter()
            .map(|v| if v.is_finite() { *v } else { penalty })
            .collect();

        // Deterministic ranking: ties broken by candidate index.
        let mut order: Vec<usize> = (0..self.lambda).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

        let lead = order[0];
        if values[lead] < self.best_value {
            self.best_value = values[lead];
            self.best_params = candidates[lead].clone();
        }

        let xold = self.mean.clone();
        let mut new_mean = DVector::zeros(self.dim);
        for (w, &idx) in self.weights.iter().zip(&order[..self.mu]) {
            new_mean.axpy(*w, &DVector::from_column_slice(&candidates[idx]), 1.0);
        }
        self.mean = new_mean;
        let shift = (&self.mean - &xold) / self.sigma;

        let (cs, cc) = (self.cs, self.cc);
        self.path_sigma = &self.path_sigma * (1.0 - cs)
            + &self.inv_sqrt_cov * &shift * (cs * (2.0 - cs) * self.mueff).sqrt();
        let ps_norm = self.path_sigma.norm();
        let generations_term =
            (1.0 - (1.0 - cs).powf(2.0 * self.eval_count as f64 / self.lambda as f64)).sqrt();
        let hsig = ps_norm / generations_term / self.chi_n < 1.4 + 2.0 / (self.dim as f64 + 1.0);
        let hsig_f = if hsig { 1.0 } else { 0.0 };
        self.path_cov =
            &self.path_cov * (1.0 - cc) + &shift * (hsig_f * (cc * (2.0 - cc) * self.mueff).sqrt());

        // C ← (1−c1−cμ)·C + c1·(pc·pcᵀ + (1−hsig)·cc(2−cc)·C) + cμ·Σ wᵢ·yᵢyᵢᵀ
        let decay = 1.0 - self.c1 - self.cmu + self.c1 * (1.0 - hsig_f) * cc * (2.0 - cc);
        self.cov *= decay;
        self.cov.ger(self.c1, &self.path_cov, &self.path_cov, 1.0);
        for (w, &idx) in self.weights.iter().zip(&order[..self.mu]) {
            let y = (DVector::from_column_slice(&candidates[idx]) - &xold) / self.sigma;
            self.cov.ger(self.cmu * w, &y, &y, 1.0);
        }

        self.sigma *= ((cs / self.damps) * (ps_norm / self.chi_n - 1.0)).exp();

        // O(d³) decomposition amortized to O(d²) per generation.
        let due = (self.eval_count - self.last_decomposition) as f64
            > self.lambda as f64 / ((self.c1 + self.cmu) * self.dim as f64 * 10.0);
        if due {
            self.last_decomposition = self.eval_count;
            self.refresh_decomposition();
        }
    }

    fn refresh_decomposition(&mut self) {
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        self.cov = sym.clone();
        let eigen = SymmetricEigen::new(sym);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut healthy = true;
        for &e in eigen.eigenvalues.iter() {
            if !e.is_finite() || e <= 0.0 {
                healthy = false;
                break;
            }
            lo = lo.min(e);
            hi = hi.max(e);
        }
        // A condition number past 1e14 leaves no usable precision in
        // C^{-1/2}; treat it like a loss of positive definiteness.
        if healthy && hi / lo > 1e14 {
            healthy = false;
        }
        if !healthy {
            self.reset_covariance();
            return;
        }
        self.eig_scale = eigen.eigenvalues.map(f64::sqrt);
        self.eig_basis = eigen.eigenvectors;
        let inv_scale = DMatrix::from_diagonal(&self.eig_scale.map(|d| 1.0 / d));
        self.inv_sqrt_cov = &self.eig_basis * inv_scale * self.eig_basis.transpose();
    }

    fn reset_covariance(&mut self) {
        self.cov = DMatrix::identity(self.dim, self.dim);
        self.eig_basis = DMatrix::identity(self.dim, self.dim);
        self.eig_scale = DVector::from_element(self.dim, 1.0);
        self.inv_sqrt_cov = DMatrix::identity(self.dim, self.dim);
        self.warnings.push(format!(
            "covariance lost positive definiteness at evaluation {}; reset to identity",
            self.eval_count
        ));
    }
}
