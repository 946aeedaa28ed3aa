//! The block rule, its embedding into the chain, and the forward and
//! inverse elementary steps.
//!
//! One forward step sweeps partition A (pairs `(1,2), (3,4), ...`) left to
//! right and then partition B (pairs `(2,3), (4,5), ...`). Every block gets
//! its unitary, then dephasing, then amplitude damping. The inverse step
//! undoes the unitaries block by block in the opposite order, B before A and
//! right to left, and applies the same noise after each inverted block.
//! Unpaired edge sites are left alone (open chain).

use nalgebra::{DMatrix, Matrix2};

use crate::error::{domain, QcaError, Result};
use crate::sector::{check_site, SectorState};
use crate::C64;

/// Smallest admissible `1 - p + q`.
pub const NORMALIZATION_FLOOR: f64 = 1e-12;
/// Tolerance on `max |U†U - I|`.
pub const UNITARY_TOL: f64 = 1e-12;

/// Parameters of the 2x2 block rule: `p` and `q` are the probabilities of
/// hopping left and right, `phi1` and `phi2` the phases (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    p: f64,
    q: f64,
    phi1: f64,
    phi2: f64,
}

impl RuleParams {
    pub fn new(p: f64, q: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("p = {p} outside [0, 1]"));
        }
        if !(0.0..=1.0).contains(&q) {
            return domain(format!("q = {q} outside [0, 1]"));
        }
        if !phi1.is_finite() || !phi2.is_finite() {
            return domain(format!(
                "phases must be finite, got phi1={phi1}, phi2={phi2}"
            ));
        }
        if 1.0 - p + q <= NORMALIZATION_FLOOR {
            return Err(QcaError::DegenerateRule { p, q });
        }
        Ok(Self { p, q, phi1, phi2 })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// The amplitude-damping strength tied to this rule, `p - q`.
    pub fn linked_eta(&self) -> f64 {
        self.p - self.q
    }
}

/// Dephasing strength `xi` in `[0, 1]` and signed amplitude-damping strength
/// `eta` in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    xi: f64,
    eta: f64,
}

impl NoiseParams {
    pub fn new(xi: f64, eta: f64) -> Result<Self> {
        check_xi(xi)?;
        check_eta(eta)?;
        Ok(Self { xi, eta })
    }

    /// Noise whose damping is linked to the rule: `eta = p - q`.
    pub fn linked(rule: &RuleParams, xi: f64) -> Result<Self> {
        Self::new(xi, rule.linked_eta())
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// A chain, its rule, its noise and the site the excitation starts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomatonConfig {
    n_sites: usize,
    rule: RuleParams,
    noise: NoiseParams,
    initial_site: usize,
    decoupled_noise: bool,
}

impl AutomatonConfig {
    /// A chain with damping linked to the rule (`eta = p - q`), starting on
    /// site 1.
    pub fn new(n_sites: usize, rule: RuleParams, xi: f64) -> Result<Self> {
        check_chain(n_sites)?;
        Ok(Self {
            n_sites,
            rule,
            noise: NoiseParams::linked(&rule, xi)?,
            initial_site: 1,
            decoupled_noise: false,
        })
    }

    /// A chain with independently chosen `(xi, eta)`. Only meant for probing
    /// the channels in isolation; reproduction runs use [`AutomatonConfig::new`].
    pub fn with_decoupled_noise(
        n_sites: usize,
        rule: RuleParams,
        noise: NoiseParams,
    ) -> Result<Self> {
        check_chain(n_sites)?;
        Ok(Self {
            n_sites,
            rule,
            noise,
            initial_site: 1,
            decoupled_noise: true,
        })
    }

    pub fn with_initial_site(mut self, site: usize) -> Result<Self> {
        check_site(self.n_sites, site)?;
        self.initial_site = site;
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn rule(&self) -> &RuleParams {
        &self.rule
    }

    pub fn noise(&self) -> &NoiseParams {
        &self.noise
    }

    pub fn initial_site(&self) -> usize {
        self.initial_site
    }

    pub fn is_decoupled(&self) -> bool {
        self.decoupled_noise
    }

    /// `|initial_site><initial_site|`.
    pub fn initial_state(&self) -> SectorState {
        SectorState::pure_site(self.n_sites, self.initial_site)
            .expect("initial site validated at construction")
    }
}

fn check_chain(n_sites: usize) -> Result<()> {
    if n_sites < 2 {
        return domain(format!("chain needs at least 2 sites, got {n_sites}"));
    }
    Ok(())
}

fn check_xi(xi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&xi) {
        return domain(format!("dephasing strength xi = {xi} outside [0, 1]"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&eta) {
        return domain(format!("damping strength eta = {eta} outside [-1, 1]"));
    }
    Ok(())
}

/// The 2x2 rule acting on `(|left>, |right>)` of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockUnitary {
    matrix: Matrix2<C64>,
}

impl BlockUnitary {
    /// `(1/sqrt(1-p+q)) [[sqrt(1-p), sqrt(q) e^{i phi2}],
    ///                   [sqrt(q) e^{i phi1}, -sqrt(1-p) e^{i(phi1+phi2)}]]`
    pub fn from_rule(rule: &RuleParams) -> Result<Self> {
        let norm = 1.0 - rule.p + rule.q;
        if norm <= NORMALIZATION_FLOOR {
            return Err(QcaError::DegenerateRule {
                p: rule.p,
                q: rule.q,
            });
        }
        let scale = 1.0 / norm.sqrt();
        let stay = (1.0 - rule.p).sqrt() * scale;
        let hop = rule.q.sqrt() * scale;
        let matrix = Matrix2::new(
            C64::new(stay, 0.0),
            C64::from_polar(hop, rule.phi2),
            C64::from_polar(hop, rule.phi1),
            -C64::from_polar(stay, rule.phi1 + rule.phi2),
        );
        Ok(Self { matrix })
    }

    /// Wraps an arbitrary 2x2 matrix, rejecting non-unitary ones.
    pub fn from_matrix(matrix: Matrix2<C64>) -> Result<Self> {
        let u = Self { matrix };
        let err = u.unitarity_error();
        if err > UNITARY_TOL {
            return domain(format!(
                "block matrix is not unitary: max |U†U - I| = {err:e}"
            ));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix2::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn unitarity_error(&self) -> f64 {
        (self.matrix.adjoint() * self.matrix - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn build_block_unitary(rule: &RuleParams) -> Result<BlockUnitary> {
    BlockUnitary::from_rule(rule)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partition {
    /// Pairs `(1,2), (3,4), ...`
    A,
    /// Pairs `(2,3), (4,5), ...`
    B,
}

/// An ordered pair of distinct sites (1-based). `left` plays the role of the
/// first basis vector of the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub left: usize,
    pub right: usize,
}

impl Block {
    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }

    fn indices(&self, n_sites: usize) -> Result<(usize, usize)> {
        check_site(n_sites, self.left)?;
        check_site(n_sites, self.right)?;
        if self.left == self.right {
            return domain(format!(
                "block ({}, {}) repeats a site",
                self.left, self.right
            ));
        }
        Ok((self.left - 1, self.right - 1))
    }
}

/// Blocks of one partition in left-to-right order.
pub fn partition_blocks(n_sites: usize, partition: Partition) -> Vec<Block> {
    let first = match partition {
        Partition::A => 1,
        Partition::B => 2,
    };
    (first..n_sites)
        .step_by(2)
        .map(|left| Block::new(left, left + 1))
        .collect()
}

pub fn apply_block_unitary(
    rho: &SectorState,
    block: Block,
    u: &BlockUnitary,
) -> Result<SectorState> {
    let (i, j) = block.indices(rho.n_sites())?;
    let mut out = rho.clone();
    unitary_in_place(out.matrix_mut(), i, j, &u.matrix);
    Ok(out)
}

pub fn apply_block_dephasing(rho: &SectorState, block: Block, xi: f64) -> Result<SectorState> {
    check_xi(xi)?;
    let (i, j) = block.indices(rho.n_sites())?;
    let mut out = rho.clone();
    dephasing_in_place(out.matrix_mut(), i, j, xi);
    Ok(out)
}

pub fn apply_block_amplitude_damping(
    rho: &SectorState,
    block: Block,
    eta: f64,
) -> Result<SectorState> {
    check_eta(eta)?;
    let (i, j) = block.indices(rho.n_sites())?;
    let mut out = rho.clone();
    damping_in_place(out.matrix_mut(), i, j, eta);
    Ok(out)
}

/// One elementary step of the noisy automaton.
pub fn step_forward(rho: &SectorState, config: &AutomatonConfig) -> Result<SectorState> {
    let mut out = rho.clone();
    Stepper::new(config)?.forward_in_place(&mut out)?;
    Ok(out)
}

/// One step of the approximate inverse: inverted unitaries in reverse block
/// order, each followed by the same noise as the forward step.
pub fn step_inverse(rho: &SectorState, config: &AutomatonConfig) -> Result<SectorState> {
    let mut out = rho.clone();
    Stepper::new(config)?.inverse_in_place(&mut out)?;
    Ok(out)
}

/// Precomputed block schedule for repeated stepping of one configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    n_sites: usize,
    u: Matrix2<C64>,
    u_adj: Matrix2<C64>,
    xi: f64,
    eta: f64,
    forward: Vec<(usize, usize)>,
}

impl Stepper {
    pub fn new(config: &AutomatonConfig) -> Result<Self> {
        let u = BlockUnitary::from_rule(&config.rule)?;
        let n = config.n_sites;
        let forward = partition_blocks(n, Partition::A)
            .into_iter()
            .chain(partition_blocks(n, Partition::B))
            .map(|b| (b.left - 1, b.right - 1))
            .collect();
        Ok(Self {
            n_sites: n,
            u: u.matrix,
            u_adj: u.matrix.adjoint(),
            xi: config.noise.xi,
            eta: config.noise.eta,
            forward,
        })
    }

    fn check(&self, rho: &SectorState) -> Result<()> {
        if rho.n_sites() != self.n_sites {
            return domain(format!(
                "state has {} sites, configuration has {}",
                rho.n_sites(),
                self.n_sites
            ));
        }
        Ok(())
    }

    pub fn forward_in_place(&self, rho: &mut SectorState) -> Result<()> {
        self.check(rho)?;
        let m = rho.matrix_mut();
        for &(i, j) in &self.forward {
            self.block(m, i, j, &self.u);
        }
        Ok(())
    }

    pub fn inverse_in_place(&self, rho: &mut SectorState) -> Result<()> {
        self.check(rho)?;
        let m = rho.matrix_mut();
        for &(i, j) in self.forward.iter().rev() {
            self.block(m, i, j, &self.u_adj);
        }
        Ok(())
    }

    fn block(&self, m: &mut DMatrix<C64>, i: usize, j: usize, u: &Matrix2<C64>) {
        unitary_in_place(m, i, j, u);
        if self.xi != 0.0 {
            dephasing_in_place(m, i, j, self.xi);
        }
        if self.eta != 0.0 {
            damping_in_place(m, i, j, self.eta);
        }
    }
}

/// `rho -> V rho V†` where `V` is `u` on `(i, j)` and identity elsewhere.
fn unitary_in_place(m: &mut DMatrix<C64>, i: usize, j: usize, u: &Matrix2<C64>) {
    let n = m.nrows();
    for c in 0..n {
        let a = m[(i, c)];
        let b = m[(j, c)];
        m[(i, c)] = u[(0, 0)] * a + u[(0, 1)] * b;
        m[(j, c)] = u[(1, 0)] * a + u[(1, 1)] * b;
    }
    let (c00, c01) = (u[(0, 0)].conj(), u[(0, 1)].conj());
    let (c10, c11) = (u[(1, 0)].conj(), u[(1, 1)].conj());
    for r in 0..n {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = a * c00 + b * c01;
        m[(r, j)] = a * c10 + b * c11;
    }
}

/// Kraus set `sqrt(1-xi)(P_i + P_j) + P_rest`, `sqrt(xi) P_i`, `sqrt(xi) P_j`.
fn dephasing_in_place(m: &mut DMatrix<C64>, i: usize, j: usize, xi: f64) {
    let n = m.nrows();
    let inner = 1.0 - xi;
    let outer = inner.sqrt();
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        m[(i, k)] *= outer;
        m[(k, i)] *= outer;
        m[(j, k)] *= outer;
        m[(k, j)] *= outer;
    }
    m[(i, j)] *= inner;
    m[(j, i)] *= inner;
}

/// Kraus set `P_to + sqrt(1-|eta|) P_from + P_rest`, `sqrt(|eta|) |to><from|`,
/// where population flows toward `i` for `eta > 0` and toward `j` otherwise.
fn damping_in_place(m: &mut DMatrix<C64>, i: usize, j: usize, eta: f64) {
    if eta == 0.0 {
        return;
    }
    let (to, from) = if eta > 0.0 { (i, j) } else { (j, i) };
    let g = eta.abs();
    let keep = (1.0 - g).sqrt();
    let n = m.nrows();
    let moved = m[(from, from)] * g;
    for k in 0..n {
        if k == from {
            continue;
        }
        m[(from, k)] *= keep;
        m[(k, from)] *= keep;
    }
    m[(from, from)] *= 1.0 - g;
    m[(to, to)] += moved;
}

/// Dense `N x N` Kraus operators of block dephasing.
pub fn dephasing_kraus(n_sites: usize, block: Block, xi: f64) -> Result<Vec<DMatrix<C64>>> {
    check_xi(xi)?;
    let (i, j) = block.indices(n_sites)?;
    let mut k0 = DMatrix::<C64>::identity(n_sites, n_sites);
    k0[(i, i)] = C64::new((1.0 - xi).sqrt(), 0.0);
    k0[(j, j)] = C64::new((1.0 - xi).sqrt(), 0.0);
    let mut k1 = DMatrix::zeros(n_sites, n_sites);
    k1[(i, i)] = C64::new(xi.sqrt(), 0.0);
    let mut k2 = DMatrix::zeros(n_sites, n_sites);
    k2[(j, j)] = C64::new(xi.sqrt(), 0.0);
    Ok(vec![k0, k1, k2])
}

/// Dense `N x N` Kraus operators of block amplitude damping.
pub fn amplitude_damping_kraus(
    n_sites: usize,
    block: Block,
    eta: f64,
) -> Result<Vec<DMatrix<C64>>> {
    check_eta(eta)?;
    let (i, j) = block.indices(n_sites)?;
    let (to, from) = if eta >= 0.0 { (i, j) } else { (j, i) };
    let g = eta.abs();
    let mut a0 = DMatrix::<C64>::identity(n_sites, n_sites);
    a0[(from, from)] = C64::new((1.0 - g).sqrt(), 0.0);
    let mut a1 = DMatrix::zeros(n_sites, n_sites);
    a1[(to, from)] = C64::new(g.sqrt(), 0.0);
    Ok(vec![a0, a1])
}
