//! Density matrices over the single-excitation basis `{|n>}`, where `|n>`
//! has the excitation on site `n`.
//!
//! Site indices in this API are 1-based (`1..=n_sites`), matching the usual
//! labelling of the chain. The underlying matrix is 0-based.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, QcaError, Result};
use crate::C64;

/// Tolerance on `max |rho_ij - conj(rho_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|Tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// A single-excitation density matrix of an `N`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    matrix: DMatrix<C64>,
}

impl SectorState {
    /// Wraps a matrix after checking that it is a valid density matrix.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(QcaError::InvalidState(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let state = Self { matrix };
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_raw(matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    /// `|site><site|`.
    pub fn pure_site(n_sites: usize, site: usize) -> Result<Self> {
        check_site(n_sites, site)?;
        let mut m = DMatrix::zeros(n_sites, n_sites);
        m[(site - 1, site - 1)] = C64::new(1.0, 0.0);
        Ok(Self::from_raw(m))
    }

    /// `I / N`.
    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return domain("maximally mixed state needs at least one site");
        }
        let w = C64::new(1.0 / n_sites as f64, 0.0);
        Ok(Self::from_raw(DMatrix::from_diagonal_element(
            n_sites, n_sites, w,
        )))
    }

    /// Samples `G G† / Tr(G G†)` with `G` an `N x N` matrix of independent
    /// standard complex Gaussians drawn from a ChaCha8 stream seeded by
    /// `seed`. Equal `(n_sites, seed)` give bit-identical states.
    pub fn random(n_sites: usize, seed: u64) -> Result<Self> {
        if n_sites == 0 {
            return domain("random state needs at least one site");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = DMatrix::<C64>::zeros(n_sites, n_sites);
        for r in 0..n_sites {
            for c in 0..n_sites {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                g[(r, c)] = C64::new(re, im);
            }
        }
        let gg = &g * g.adjoint();
        let herm = (&gg + gg.adjoint()).scale(0.5);
        let tr = herm.trace().re;
        Ok(Self::from_raw(herm.unscale(tr)))
    }

    pub fn n_sites(&self) -> usize {
        self.matrix.nrows()
    }

    /// The raw matrix, 0-based: entry `(i, j)` is `<i+1| rho |j+1>`.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    /// Entry `<row| rho |col>` with 1-based site labels.
    pub fn element(&self, row: usize, col: usize) -> Result<C64> {
        check_site(self.n_sites(), row)?;
        check_site(self.n_sites(), col)?;
        Ok(self.matrix[(row - 1, col - 1)])
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Populations `<n|rho|n>` in site order.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `Tr[|site><site| rho]`, i.e. the real part of the diagonal entry.
    pub fn fidelity_with_pure(&self, site: usize) -> Result<f64> {
        check_site(self.n_sites(), site)?;
        Ok(self.matrix[(site - 1, site - 1)].re)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_sites();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - C64::new(1.0, 0.0)).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues_hermitian(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks hermiticity, unit trace and positivity at the crate tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(QcaError::InvalidState(format!(
                "not Hermitian: max |rho_ij - conj(rho_ji)| = {herm:e}"
            )));
        }
        let tr = self.trace_error();
        if tr > TRACE_TOL {
            return Err(QcaError::InvalidState(format!("trace off by {tr:e}")));
        }
        let min = self.min_eigenvalue();
        if min < PSD_TOL {
            return Err(QcaError::InvalidState(format!(
                "not positive semidefinite: min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Half the sum of absolute eigenvalues of `self - other`.
    pub fn trace_distance(&self, other: &SectorState) -> Result<f64> {
        if self.n_sites() != other.n_sites() {
            return domain(format!(
                "trace distance between {}-site and {}-site states",
                self.n_sites(),
                other.n_sites()
            ));
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5
            * eigenvalues_hermitian(&diff)
                .iter()
                .map(|l| l.abs())
                .sum::<f64>())
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SectorState) -> Result<f64> {
        if self.n_sites() != other.n_sites() {
            return domain("element comparison between states of different size");
        }
        Ok((&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

pub fn pure_site_state(n_sites: usize, site: usize) -> Result<SectorState> {
    SectorState::pure_site(n_sites, site)
}

pub fn maximally_mixed(n_sites: usize) -> Result<SectorState> {
    SectorState::maximally_mixed(n_sites)
}

pub fn random_sector_state(n_sites: usize, seed: u64) -> Result<SectorState> {
    SectorState::random(n_sites, seed)
}

pub fn trace_distance(a: &SectorState, b: &SectorState) -> Result<f64> {
    a.trace_distance(b)
}

pub fn fidelity_with_pure(rho: &SectorState, site: usize) -> Result<f64> {
    rho.fidelity_with_pure(site)
}

pub(crate) fn check_site(n_sites: usize, site: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        return domain(format!("site {site} outside 1..={n_sites}"));
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part `(m + m†)/2`.
fn eigenvalues_hermitian(m: &DMatrix<C64>) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .collect()
}
