//! Proposal distributions and coupled (joint) proposal samplers.
//!
//! A coupled proposal draws `(x', y')` such that each marginal matches the
//! single-chain proposal law and equal inputs yield equal outputs exactly
//! (stickiness). Good couplings make a branched alternative chain recouple
//! to the primal quickly, which is what keeps the derivative estimator's
//! variance down.

use crate::error::{Error, Result};
use crate::ising::IsingState;
use crate::stream::RandomStream;

/// A Markov proposal kernel.
pub trait Proposal<S> {
    fn sample(&self, from: &S, stream: &mut RandomStream) -> S;

    /// `log q(to | from)`, consistent enough that density ratios are exact.
    fn log_density(&self, to: &S, from: &S) -> f64;

    /// `log q(from | to) - log q(to | from)`; zero for symmetric proposals.
    fn correction(&self, from: &S, to: &S) -> f64 {
        self.log_density(from, to) - self.log_density(to, from)
    }
}

/// Joint proposal for a primal/alternative chain pair.
///
/// `proposal_stream` carries the draws that determine the primal proposal;
/// implementations must consume it exactly as [`Proposal::sample`] would, so
/// the primal trajectory is independent of alternative tracking. Extra
/// randomness used only for the joint structure comes from `coupling_stream`.
pub trait CoupledProposal<S> {
    fn sample_pair(
        &self,
        x: &S,
        y: &S,
        proposal_stream: &mut RandomStream,
        coupling_stream: &mut RandomStream,
    ) -> (S, S);
}

/// Common random numbers: both chains' proposals are generated from the
/// identical draws. Sticky whenever the sampler is a deterministic map of
/// its draws.
pub fn crn_couple<S, P: Proposal<S>>(
    proposal: &P,
    x: &S,
    y: &S,
    stream: &mut RandomStream,
) -> (S, S) {
    let mut replay = stream.clone();
    let xp = proposal.sample(x, stream);
    let yp = proposal.sample(y, &mut replay);
    (xp, yp)
}

/// [`CoupledProposal`] adapter for [`crn_couple`].
#[derive(Debug, Clone)]
pub struct Crn<P>(pub P);

impl<S, P: Proposal<S>> CoupledProposal<S> for Crn<P> {
    fn sample_pair(
        &self,
        x: &S,
        y: &S,
        proposal_stream: &mut RandomStream,
        _coupling_stream: &mut RandomStream,
    ) -> (S, S) {
        crn_couple(&self.0, x, y, proposal_stream)
    }
}

/// Independent proposals made sticky: identical draws while the chains agree,
/// fully independent draws once they differ. A valid coupling, but one with
/// essentially no recoupling pressure; serves as the uncoupled baseline.
#[derive(Debug, Clone)]
pub struct IndependentSticky<P>(pub P);

impl<S: Clone + PartialEq, P: Proposal<S>> CoupledProposal<S> for IndependentSticky<P> {
    fn sample_pair(
        &self,
        x: &S,
        y: &S,
        proposal_stream: &mut RandomStream,
        coupling_stream: &mut RandomStream,
    ) -> (S, S) {
        let xp = self.0.sample(x, proposal_stream);
        let yp = if x == y {
            xp.clone()
        } else {
            self.0.sample(y, coupling_stream)
        };
        (xp, yp)
    }
}

// ---------------------------------------------------------------------------
// Gaussian random walk and its reflection-maximal coupling
// ---------------------------------------------------------------------------

/// Random-walk proposal `x' = x + sigma * N(0, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianRandomWalk {
    pub sigma: f64,
}

impl GaussianRandomWalk {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0);
        GaussianRandomWalk { sigma }
    }
}

impl Proposal<f64> for GaussianRandomWalk {
    fn sample(&self, from: &f64, stream: &mut RandomStream) -> f64 {
        from + self.sigma * stream.normal()
    }

    fn log_density(&self, to: &f64, from: &f64) -> f64 {
        let z = (to - from) / self.sigma;
        -0.5 * z * z
    }

    fn correction(&self, _from: &f64, _to: &f64) -> f64 {
        0.0
    }
}

/// Maximal reflection coupling of two Gaussian random-walk proposals.
///
/// Draws `x' = x + sigma xi`; with probability
/// `min(1, phi((x'-y)/sigma) / phi((x'-x)/sigma))` the chains meet
/// (`y' = x'`), otherwise `y'` is the reflection `x + y - x'`. The meeting
/// probability is the maximal-coupling bound `2 Phi(-|x-y| / (2 sigma))`.
pub fn reflection_maximal_gaussian(
    x: f64,
    y: f64,
    sigma: f64,
    proposal_stream: &mut RandomStream,
    coupling_stream: &mut RandomStream,
) -> (f64, f64) {
    let xi = proposal_stream.normal();
    let xp = x + sigma * xi;
    if x == y {
        return (xp, xp);
    }
    let zx = xi;
    let zy = (xp - y) / sigma;
    // log phi(zy) - log phi(zx), accepted against a unit-mean uniform.
    let log_ratio = 0.5 * (zx * zx - zy * zy);
    let meet = coupling_stream.uniform().ln() < log_ratio;
    let yp = if meet { xp } else { x + y - xp };
    (xp, yp)
}

/// [`CoupledProposal`] adapter for [`reflection_maximal_gaussian`].
#[derive(Debug, Clone, Copy)]
pub struct ReflectionMaximal {
    pub sigma: f64,
}

impl ReflectionMaximal {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0);
        ReflectionMaximal { sigma }
    }
}

impl CoupledProposal<f64> for ReflectionMaximal {
    fn sample_pair(
        &self,
        x: &f64,
        y: &f64,
        proposal_stream: &mut RandomStream,
        coupling_stream: &mut RandomStream,
    ) -> (f64, f64) {
        reflection_maximal_gaussian(*x, *y, self.sigma, proposal_stream, coupling_stream)
    }
}

// ---------------------------------------------------------------------------
// Discrete proposals and the maximal independent coupling
// ---------------------------------------------------------------------------

/// Inverse-CDF draw from a discrete distribution. All discrete samplers go
/// through this so coupled and uncoupled paths consume draws identically.
fn categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn validate_distribution(p: &[f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || p.iter().any(|&x| x < 0.0) {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

/// Maximal coupling of two discrete distributions over a shared support:
/// the outputs coincide with probability `1 - TV(p_x, p_y)`, the best
/// possible, while each marginal is exact.
pub fn maximal_independent_couple(
    p_x: &[f64],
    p_y: &[f64],
    stream: &mut RandomStream,
) -> Result<(usize, usize)> {
    validate_distribution(p_x)?;
    validate_distribution(p_y)?;
    let u = stream.uniform();
    Ok(maximal_independent_with(p_x, p_y, u, stream))
}

/// Core of the maximal independent coupling with the primal draw supplied.
fn maximal_independent_with(
    p_x: &[f64],
    p_y: &[f64],
    u_primal: f64,
    coupling_stream: &mut RandomStream,
) -> (usize, usize) {
    let xp = categorical(p_x, u_primal);
    // x' was just drawn from p_x, so p_x[xp] > 0.
    let meet_prob = (p_y[xp] / p_x[xp]).min(1.0);
    if coupling_stream.uniform() < meet_prob {
        return (xp, xp);
    }
    // Sample y' from the normalized residual max(0, p_y - p_x).
    let residual: Vec<f64> = p_x
        .iter()
        .zip(p_y)
        .map(|(&a, &b)| (b - a).max(0.0))
        .collect();
    let mass: f64 = residual.iter().sum();
    if mass <= 0.0 {
        // p_y <= p_x everywhere means the distributions are identical and
        // the meet branch is sure; unreachable except for rounding.
        return (xp, xp);
    }
    let normalized: Vec<f64> = residual.iter().map(|r| r / mass).collect();
    let yp = categorical(&normalized, coupling_stream.uniform());
    (xp, yp)
}

/// Row access for proposals over `0..n` states, enabling distribution-level
/// couplings.
pub trait DiscreteRowProposal: Proposal<usize> {
    fn probs(&self, from: usize) -> Vec<f64>;
}

/// State-independent uniform proposal over `0..k`.
#[derive(Debug, Clone, Copy)]
pub struct UniformProposal {
    pub k: usize,
}

impl UniformProposal {
    pub fn new(k: usize) -> Self {
        assert!(k > 0);
        UniformProposal { k }
    }

    fn row(&self) -> Vec<f64> {
        vec![1.0 / self.k as f64; self.k]
    }
}

impl Proposal<usize> for UniformProposal {
    fn sample(&self, _from: &usize, stream: &mut RandomStream) -> usize {
        categorical(&self.row(), stream.uniform())
    }

    fn log_density(&self, _to: &usize, _from: &usize) -> f64 {
        -(self.k as f64).ln()
    }

    fn correction(&self, _from: &usize, _to: &usize) -> f64 {
        0.0
    }
}

impl DiscreteRowProposal for UniformProposal {
    fn probs(&self, _from: usize) -> Vec<f64> {
        self.row()
    }
}

/// Proposal given by an explicit row-stochastic matrix.
#[derive(Debug, Clone)]
pub struct MatrixProposal {
    rows: Vec<Vec<f64>>,
}

impl MatrixProposal {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        for row in &rows {
            validate_distribution(row)?;
        }
        Ok(MatrixProposal { rows })
    }

    /// Deterministic two-state swap.
    pub fn swap_two() -> Self {
        MatrixProposal::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }
}

impl Proposal<usize> for MatrixProposal {
    fn sample(&self, from: &usize, stream: &mut RandomStream) -> usize {
        categorical(&self.rows[*from], stream.uniform())
    }

    fn log_density(&self, to: &usize, from: &usize) -> f64 {
        self.rows[*from][*to].ln()
    }
}

impl DiscreteRowProposal for MatrixProposal {
    fn probs(&self, from: usize) -> Vec<f64> {
        self.rows[from].clone()
    }
}

/// Maximal independent coupling of a discrete proposal with itself.
#[derive(Debug, Clone)]
pub struct MaximalIndependent<P>(pub P);

impl<P: DiscreteRowProposal> CoupledProposal<usize> for MaximalIndependent<P> {
    fn sample_pair(
        &self,
        x: &usize,
        y: &usize,
        proposal_stream: &mut RandomStream,
        coupling_stream: &mut RandomStream,
    ) -> (usize, usize) {
        let p_x = self.0.probs(*x);
        let p_y = self.0.probs(*y);
        let u = proposal_stream.uniform();
        maximal_independent_with(&p_x, &p_y, u, coupling_stream)
    }
}

// ---------------------------------------------------------------------------
// Ising heat-bath proposal and its shared-move coupling
// ---------------------------------------------------------------------------

/// One uniformly chosen site and a fair +1/-1 spin draw.
pub fn heat_bath_draw(side: usize, stream: &mut RandomStream) -> (usize, i8) {
    let site = stream.below((side * side) as u64) as usize;
    let spin = stream.sign();
    (site, spin)
}

/// Single-site heat-bath proposal: set one uniformly random site to a fair
/// random spin.
#[derive(Debug, Clone, Copy)]
pub struct HeatBathProposal;

impl Proposal<IsingState> for HeatBathProposal {
    fn sample(&self, from: &IsingState, stream: &mut RandomStream) -> IsingState {
        let (site, spin) = heat_bath_draw(from.side(), stream);
        from.with_spin(site, spin)
    }

    fn log_density(&self, to: &IsingState, from: &IsingState) -> f64 {
        let diffs: Vec<usize> = from
            .spins()
            .iter()
            .zip(to.spins())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect();
        let sites = (from.side() * from.side()) as f64;
        match diffs.len() {
            // Any of the L^2 sites proposed with its current value.
            0 => (0.5f64).ln(),
            1 => (1.0 / (2.0 * sites)).ln(),
            _ => f64::NEG_INFINITY,
        }
    }

    fn correction(&self, _from: &IsingState, _to: &IsingState) -> f64 {
        0.0
    }
}

/// The paper's Ising coupling: the identical `(site, spin)` move is proposed
/// for both chains; the accept step downstream shares one uniform. Preserves
/// the componentwise spin order (monotone coupling).
#[derive(Debug, Clone, Copy)]
pub struct HeatBathCoupling;

impl CoupledProposal<IsingState> for HeatBathCoupling {
    fn sample_pair(
        &self,
        x: &IsingState,
        y: &IsingState,
        proposal_stream: &mut RandomStream,
        _coupling_stream: &mut RandomStream,
    ) -> (IsingState, IsingState) {
        let (site, spin) = heat_bath_draw(x.side(), proposal_stream);
        (x.with_spin(site, spin), y.with_spin(site, spin))
    }
}
