//! Brute-force cross-check in the full `2^N`-dimensional qubit space.
//!
//! Site `n` (1-based) is qubit `n - 1`; a basis index has bit `n - 1` set
//! when site `n` is excited. Every block operator is embedded as a 4x4
//! matrix on its pair, acting as the identity on `|00>` and `|11>`, and
//! applied to the whole density matrix. Nothing here reuses the sector
//! update code.

use nalgebra::{DMatrix, Matrix4};

use crate::automaton::{partition_blocks, AutomatonConfig, BlockUnitary, Partition};
use crate::error::{domain, QcaError, Result};
use crate::sector::SectorState;
use crate::C64;

/// Largest chain the oracle accepts.
pub const MAX_SITES: usize = 8;

/// Density matrix over all `2^N` occupation patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

fn check_size(n_sites: usize) -> Result<()> {
    if n_sites > MAX_SITES {
        return Err(QcaError::Capacity {
            n_sites,
            max: MAX_SITES,
        });
    }
    if n_sites < 2 {
        return domain(format!(
            "full-space chain needs at least 2 sites, got {n_sites}"
        ));
    }
    Ok(())
}

fn one_excitation_index(site: usize) -> usize {
    1 << (site - 1)
}

impl FullState {
    /// `|pattern><pattern|` for an occupation bit pattern.
    pub fn basis(n_sites: usize, pattern: usize) -> Result<Self> {
        check_size(n_sites)?;
        let dim = 1 << n_sites;
        if pattern >= dim {
            return domain(format!("pattern {pattern:#b} does not fit {n_sites} sites"));
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        matrix[(pattern, pattern)] = C64::new(1.0, 0.0);
        Ok(Self { n_sites, matrix })
    }

    pub fn vacuum(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    /// Embeds a sector state into the one-excitation subspace.
    pub fn from_sector(state: &SectorState) -> Result<Self> {
        let n = state.n_sites();
        check_size(n)?;
        let dim = 1 << n;
        let mut matrix = DMatrix::zeros(dim, dim);
        for a in 1..=n {
            for b in 1..=n {
                matrix[(one_excitation_index(a), one_excitation_index(b))] =
                    state.matrix()[(a - 1, b - 1)];
            }
        }
        Ok(Self { n_sites: n, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    fn check_config(&self, config: &AutomatonConfig) -> Result<()> {
        if config.n_sites() != self.n_sites {
            return domain(format!(
                "full state has {} sites, configuration has {}",
                self.n_sites,
                config.n_sites()
            ));
        }
        Ok(())
    }

    /// `K rho K†` summed over `ops`, each acting on qubits `(a, b)`.
    fn apply_channel(&mut self, a: usize, b: usize, ops: &[Matrix4<C64>]) {
        let dim = self.matrix.nrows();
        let mut acc = DMatrix::zeros(dim, dim);
        for k in ops {
            let mut m = self.matrix.clone();
            left_multiply(&mut m, a, b, k);
            right_multiply(&mut m, a, b, &k.adjoint());
            acc += m;
        }
        self.matrix = acc;
    }

    fn apply_block(&mut self, a: usize, b: usize, ops: &BlockOps, u: &Matrix4<C64>) {
        self.apply_channel(a, b, std::slice::from_ref(u));
        self.apply_channel(a, b, &ops.dephasing);
        self.apply_channel(a, b, &ops.damping);
    }
}

/// Local pair basis: index 0 = `|00>`, 1 = left excited, 2 = right
/// excited, 3 = `|11>`. Inserts a local index into a pattern whose bits
/// `a` and `b` are clear.
fn with_local(base: usize, a: usize, b: usize, local: usize) -> usize {
    base | ((local & 1) << a) | (((local >> 1) & 1) << b)
}

/// `m <- K m` with `K` acting on qubits `(a, b)`.
fn left_multiply(m: &mut DMatrix<C64>, a: usize, b: usize, k: &Matrix4<C64>) {
    let dim = m.nrows();
    let mask = (1 << a) | (1 << b);
    for col in 0..dim {
        for base in (0..dim).filter(|r| r & mask == 0) {
            let rows = [0, 1, 2, 3].map(|l| with_local(base, a, b, l));
            let v = rows.map(|r| m[(r, col)]);
            for (out, &r) in rows.iter().enumerate() {
                m[(r, col)] = (0..4).map(|l| k[(out, l)] * v[l]).sum();
            }
        }
    }
}

/// `m <- m K` with `K` acting on qubits `(a, b)`.
fn right_multiply(m: &mut DMatrix<C64>, a: usize, b: usize, k: &Matrix4<C64>) {
    let dim = m.nrows();
    let mask = (1 << a) | (1 << b);
    for row in 0..dim {
        for base in (0..dim).filter(|c| c & mask == 0) {
            let cols = [0, 1, 2, 3].map(|l| with_local(base, a, b, l));
            let v = cols.map(|c| m[(row, c)]);
            for (out, &c) in cols.iter().enumerate() {
                m[(row, c)] = (0..4).map(|l| v[l] * k[(l, out)]).sum();
            }
        }
    }
}

/// Two-qubit embeddings of the block channels.
struct BlockOps {
    unitary: Matrix4<C64>,
    unitary_adj: Matrix4<C64>,
    dephasing: Vec<Matrix4<C64>>,
    damping: Vec<Matrix4<C64>>,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl BlockOps {
    fn new(config: &AutomatonConfig) -> Result<Self> {
        let u2 = BlockUnitary::from_rule(config.rule())?;
        let u2 = u2.matrix();
        let mut unitary = Matrix4::identity();
        for r in 0..2 {
            for c in 0..2 {
                unitary[(r + 1, c + 1)] = u2[(r, c)];
            }
        }

        let xi = config.noise().xi();
        let mut k0 = Matrix4::identity();
        k0[(1, 1)] = real((1.0 - xi).sqrt());
        k0[(2, 2)] = real((1.0 - xi).sqrt());
        let mut k1 = Matrix4::zeros();
        k1[(1, 1)] = real(xi.sqrt());
        let mut k2 = Matrix4::zeros();
        k2[(2, 2)] = real(xi.sqrt());

        let eta = config.noise().eta();
        // population flows to the left site (local 1) for eta > 0
        let (to, from) = if eta >= 0.0 { (1, 2) } else { (2, 1) };
        let mut a0 = Matrix4::identity();
        a0[(from, from)] = real((1.0 - eta.abs()).sqrt());
        let mut a1 = Matrix4::zeros();
        a1[(to, from)] = real(eta.abs().sqrt());

        Ok(Self {
            unitary,
            unitary_adj: unitary.adjoint(),
            dephasing: vec![k0, k1, k2],
            damping: vec![a0, a1],
        })
    }
}

fn forward_schedule(n_sites: usize) -> Vec<(usize, usize)> {
    [Partition::A, Partition::B]
        .into_iter()
        .flat_map(|p| partition_blocks(n_sites, p))
        .map(|b| (b.left - 1, b.right - 1))
        .collect()
}

/// One forward step in the full space.
pub fn full_step_forward(rho: &FullState, config: &AutomatonConfig) -> Result<FullState> {
    check_size(config.n_sites())?;
    rho.check_config(config)?;
    let ops = BlockOps::new(config)?;
    let mut out = rho.clone();
    for (a, b) in forward_schedule(config.n_sites()) {
        out.apply_block(a, b, &ops, &ops.unitary);
    }
    Ok(out)
}

/// One approximate-inverse step in the full space.
pub fn full_step_inverse(rho: &FullState, config: &AutomatonConfig) -> Result<FullState> {
    check_size(config.n_sites())?;
    rho.check_config(config)?;
    let ops = BlockOps::new(config)?;
    let mut out = rho.clone();
    for (a, b) in forward_schedule(config.n_sites()).into_iter().rev() {
        out.apply_block(a, b, &ops, &ops.unitary_adj);
    }
    Ok(out)
}

/// The renormalized one-excitation block and the weight missing from it.
pub fn project_to_sector(rho: &FullState) -> Result<(SectorState, f64)> {
    let n = rho.n_sites;
    let mut block = DMatrix::zeros(n, n);
    for a in 1..=n {
        for b in 1..=n {
            block[(a - 1, b - 1)] = rho.matrix[(one_excitation_index(a), one_excitation_index(b))];
        }
    }
    let weight = block.trace().re;
    if weight < 1e-9 {
        return Err(QcaError::DegenerateProjection { weight });
    }
    Ok((SectorState::from_raw(block.unscale(weight)), 1.0 - weight))
}

/// Worst disagreement between sector and full-space evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub steps: usize,
    /// Max elementwise deviation over all forward steps.
    pub forward_diff: f64,
    /// Max elementwise deviation over the inverse steps that follow.
    pub inverse_diff: f64,
    /// Largest sector leak seen.
    pub max_leak: f64,
}

/// Runs `steps` forward then `steps` inverse steps from the configured
/// initial site in both representations, comparing after every step.
pub fn compare_with_sector(config: &AutomatonConfig, steps: usize) -> Result<OracleComparison> {
    check_size(config.n_sites())?;
    let stepper = crate::automaton::Stepper::new(config)?;
    let mut sector = config.initial_state();
    let mut full = FullState::from_sector(&sector)?;
    let mut cmp = OracleComparison {
        steps,
        forward_diff: 0.0,
        inverse_diff: 0.0,
        max_leak: 0.0,
    };
    for _ in 0..steps {
        stepper.forward_in_place(&mut sector)?;
        full = full_step_forward(&full, config)?;
        let (proj, leak) = project_to_sector(&full)?;
        cmp.forward_diff = cmp.forward_diff.max(proj.max_abs_diff(&sector)?);
        cmp.max_leak = cmp.max_leak.max(leak.abs());
    }
    for _ in 0..steps {
        stepper.inverse_in_place(&mut sector)?;
        full = full_step_inverse(&full, config)?;
        let (proj, leak) = project_to_sector(&full)?;
        cmp.inverse_diff = cmp.inverse_diff.max(proj.max_abs_diff(&sector)?);
        cmp.max_leak = cmp.max_leak.max(leak.abs());
    }
    Ok(cmp)
}
