//! Parameterized unnormalized target densities and the acceptance rule.
//!
//! A target exposes `log_g`, the log of an unnormalized density together
//! with its derivative in the scalar parameter being optimized. Only
//! log-density differences enter the samplers, so normalization constants
//! are free to be dropped (they are kept where they aid readability).

use std::fmt;

use crate::dual::DualValue;
use crate::error::{Error, Result};

/// Shape of a target's state space.
#[derive(Debug, Clone)]
pub enum StateSpace<S> {
    /// Discrete space small enough to list outright.
    Enumerable(Vec<S>),
    /// Real vectors of the given dimension.
    Continuous(usize),
    /// Discrete but too large to list; size given as log2 of the state count.
    Large(u32),
}

/// An unnormalized density with a forward-mode derivative in one parameter.
pub trait TargetModel {
    type State: Clone + PartialEq + fmt::Debug;

    /// Log of the unnormalized density and its parameter derivative.
    fn log_g(&self, state: &Self::State) -> DualValue;

    fn state_space(&self) -> StateSpace<Self::State>;
}

/// Acceptance probability of a proposed move, with derivative.
///
/// `correction` is `log q(x | x') - log q(x' | x)`; zero for symmetric
/// proposals. Moves with a nonnegative log-ratio are accepted surely and
/// carry zero derivative (the kink of `min(1, r)` at `r = 1` is assigned
/// the flat branch).
pub fn acceptance<T: TargetModel>(
    target: &T,
    correction: f64,
    current: &T::State,
    proposed: &T::State,
) -> Result<DualValue> {
    let lg_cur = target.log_g(current);
    if !lg_cur.is_finite() {
        return Err(Error::NonFiniteLogDensity {
            state: format!("{current:?}"),
        });
    }
    let lg_prop = target.log_g(proposed);
    if !lg_prop.is_finite() {
        return Err(Error::NonFiniteLogDensity {
            state: format!("{proposed:?}"),
        });
    }
    let delta = lg_prop - lg_cur + correction;
    if delta.value < 0.0 {
        let a = delta.value.exp();
        Ok(DualValue::new(a, a * delta.deriv))
    } else {
        Ok(DualValue::constant(1.0))
    }
}

/// Gaussian target N(theta, 1); the parameter is the mean.
#[derive(Debug, Clone, Copy)]
pub struct GaussianTarget {
    pub theta: f64,
}

impl GaussianTarget {
    pub fn new(theta: f64) -> Self {
        GaussianTarget { theta }
    }
}

impl TargetModel for GaussianTarget {
    type State = f64;

    fn log_g(&self, x: &f64) -> DualValue {
        let d = x - self.theta;
        DualValue::new(-0.5 * d * d, d)
    }

    fn state_space(&self) -> StateSpace<f64> {
        StateSpace::Continuous(1)
    }
}

/// Posterior over the source component of a three-Gaussian mixture given
/// one observation `h`; the parameter is the observation itself.
///
/// States are component indices 0, 1, 2.
#[derive(Debug, Clone)]
pub struct MixtureTarget {
    pub means: [f64; 3],
    pub sigma: f64,
    pub observation: f64,
}

impl MixtureTarget {
    /// The fixed mixture: means -2.5, 2, 5, common sigma 4, uniform prior.
    pub fn standard(observation: f64) -> Self {
        MixtureTarget {
            means: [-2.5, 2.0, 5.0],
            sigma: 4.0,
            observation,
        }
    }

    pub fn component_count(&self) -> usize {
        self.means.len()
    }
}

impl TargetModel for MixtureTarget {
    type State = usize;

    fn log_g(&self, j: &usize) -> DualValue {
        let mu = self.means[*j];
        let s2 = self.sigma * self.sigma;
        let d = self.observation - mu;
        // Uniform prior enters as a constant; it cancels in ratios.
        let prior = (1.0f64 / 3.0).ln();
        DualValue::new(-d * d / (2.0 * s2) + prior, -d / s2)
    }

    fn state_space(&self) -> StateSpace<usize> {
        StateSpace::Enumerable((0..self.means.len()).collect())
    }
}

/// A small discrete target defined by per-state log-weights, used by the
/// verification chains. The parameter derivative of each log-weight is
/// supplied alongside the value.
#[derive(Debug, Clone)]
pub struct TabularTarget {
    pub log_weights: Vec<DualValue>,
}

impl TabularTarget {
    pub fn new(log_weights: Vec<DualValue>) -> Self {
        TabularTarget { log_weights }
    }

    /// Two states with log-weights (0, theta): the canonical test chain.
    pub fn two_state(theta: f64) -> Self {
        TabularTarget::new(vec![
            DualValue::constant(0.0),
            DualValue::new(theta, 1.0),
        ])
    }
}

impl TargetModel for TabularTarget {
    type State = usize;

    fn log_g(&self, j: &usize) -> DualValue {
        self.log_weights[*j]
    }

    fn state_space(&self) -> StateSpace<usize> {
        StateSpace::Enumerable((0..self.log_weights.len()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_proposal_accepts_surely() {
        let target = GaussianTarget::new(0.5);
        let a = acceptance(&target, 0.0, &1.2, &1.2).unwrap();
        assert_eq!(a, DualValue::constant(1.0));
    }

    #[test]
    fn gaussian_downhill_move() {
        let target = GaussianTarget::new(0.5);
        let a = acceptance(&target, 0.0, &0.5, &1.5).unwrap();
        assert_relative_eq!(a.value, (-0.5f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(a.deriv, (-0.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn gaussian_uphill_move_is_sure_with_zero_deriv() {
        let target = GaussianTarget::new(0.5);
        let a = acceptance(&target, 0.0, &1.5, &0.5).unwrap();
        assert_eq!(a, DualValue::constant(1.0));
    }

    #[test]
    fn non_finite_log_density_reports_state() {
        struct Bad;
        impl TargetModel for Bad {
            type State = f64;
            fn log_g(&self, x: &f64) -> DualValue {
                DualValue::constant(if *x > 0.0 { f64::NAN } else { 0.0 })
            }
            fn state_space(&self) -> StateSpace<f64> {
                StateSpace::Continuous(1)
            }
        }
        let err = acceptance(&Bad, 0.0, &-1.0, &2.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2.0"), "error should name the state: {msg}");
    }

    #[test]
    fn detailed_balance_on_random_pairs() {
        // g(x) alpha(x'|x) == g(x') alpha(x|x') for symmetric proposals.
        let target = GaussianTarget::new(0.3);
        let mut stream = crate::stream::RandomStream::new(77);
        for _ in 0..1000 {
            let x = stream.normal() * 2.0;
            let y = stream.normal() * 2.0;
            let fwd = acceptance(&target, 0.0, &x, &y).unwrap().value;
            let bwd = acceptance(&target, 0.0, &y, &x).unwrap().value;
            let lhs = target.log_g(&x).value.exp() * fwd;
            let rhs = target.log_g(&y).value.exp() * bwd;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn mixture_log_g_derivative_matches_finite_difference() {
        let eps = 1e-6;
        for h in [-3.0, 0.4, 4.0, 7.5] {
            for j in 0..3 {
                let t = MixtureTarget::standard(h);
                let d = t.log_g(&j).deriv;
                let hi = MixtureTarget::standard(h + eps).log_g(&j).value;
                let lo = MixtureTarget::standard(h - eps).log_g(&j).value;
                let fd = (hi - lo) / (2.0 * eps);
                assert_relative_eq!(d, fd, max_relative = 1e-5, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn mixture_includes_prior_constant() {
        let t = MixtureTarget::standard(2.0);
        // At h == mu_2 the likelihood term vanishes, leaving only the prior.
        assert_relative_eq!(t.log_g(&1).value, (1.0f64 / 3.0).ln());
    }
}
