//! Two-dimensional isotropic Ising model on a periodic square lattice.
//!
//! The Hamiltonian is the literal double sum
//! `H(x, theta) = -theta * sum_{j,k} (x[j][k] x[j][k+1] + x[j+1][k] x[j][k])`
//! with indices wrapped mod L, so every site contributes one rightward and
//! one downward bond term. States cache the integer bond sum so energy
//! reads and single-site updates are O(1).

use crate::dual::DualValue;
use crate::stream::RandomStream;
use crate::targets::{StateSpace, TargetModel};

/// Critical temperature of the infinite lattice, `2 theta / ln(1 + sqrt 2)`
/// with Boltzmann's constant fixed to 1.
pub fn critical_temperature(theta: f64) -> f64 {
    2.0 * theta / (1.0 + 2.0f64.sqrt()).ln()
}

/// Spin configuration with a cached bond sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingState {
    side: usize,
    spins: Vec<i8>,
    bond_sum: i64,
}

impl IsingState {
    pub fn all_up(side: usize) -> Self {
        IsingState::from_spins(side, vec![1; side * side])
    }

    pub fn from_spins(side: usize, spins: Vec<i8>) -> Self {
        assert_eq!(spins.len(), side * side);
        assert!(spins.iter().all(|&s| s == 1 || s == -1));
        let mut state = IsingState {
            side,
            spins,
            bond_sum: 0,
        };
        state.bond_sum = state.recompute_bond_sum();
        state
    }

    pub fn random(side: usize, stream: &mut RandomStream) -> Self {
        let spins = (0..side * side).map(|_| stream.sign()).collect();
        IsingState::from_spins(side, spins)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn spin(&self, row: usize, col: usize) -> i8 {
        self.spins[row * self.side + col]
    }

    fn recompute_bond_sum(&self) -> i64 {
        let l = self.side;
        let mut sum = 0i64;
        for j in 0..l {
            for k in 0..l {
                let s = self.spin(j, k) as i64;
                let right = self.spin(j, (k + 1) % l) as i64;
                let down = self.spin((j + 1) % l, k) as i64;
                sum += s * right + s * down;
            }
        }
        sum
    }

    /// Bond-sum change from setting `site` to `new_spin`, from the four
    /// incident bonds only.
    fn bond_sum_delta(&self, site: usize, new_spin: i8) -> i64 {
        let l = self.side;
        let (j, k) = (site / l, site % l);
        let old = self.spins[site] as i64;
        let diff = new_spin as i64 - old;
        if diff == 0 {
            return 0;
        }
        let up = self.spin((j + l - 1) % l, k) as i64;
        let down = self.spin((j + 1) % l, k) as i64;
        let left = self.spin(j, (k + l - 1) % l) as i64;
        let right = self.spin(j, (k + 1) % l) as i64;
        diff * (up + down + left + right)
    }

    /// New state with `site` set to `new_spin`.
    pub fn with_spin(&self, site: usize, new_spin: i8) -> Self {
        let mut next = self.clone();
        next.bond_sum += self.bond_sum_delta(site, new_spin);
        next.spins[site] = new_spin;
        next
    }

    /// Componentwise order: every spin of `self` >= the matching spin of `other`.
    pub fn dominates(&self, other: &IsingState) -> bool {
        self.spins
            .iter()
            .zip(&other.spins)
            .all(|(a, b)| a >= b)
    }
}

/// Hamiltonian of a configuration.
pub fn ising_hamiltonian(state: &IsingState, theta: f64) -> f64 {
    -theta * state.bond_sum as f64
}

/// Hamiltonian recomputed from scratch; the oracle for the cached path.
pub fn ising_hamiltonian_full(state: &IsingState, theta: f64) -> f64 {
    -theta * state.recompute_bond_sum() as f64
}

/// Energy change from setting one site, computed from incident bonds only.
pub fn ising_local_hamiltonian_delta(
    state: &IsingState,
    site: usize,
    new_spin: i8,
    theta: f64,
) -> f64 {
    -theta * state.bond_sum_delta(site, new_spin) as f64
}

/// Boltzmann target `exp(-H(x, theta) / T)`; the differentiation parameter
/// is the temperature.
#[derive(Debug, Clone, Copy)]
pub struct IsingTarget {
    pub side: usize,
    pub theta: f64,
    pub temperature: f64,
}

impl IsingTarget {
    pub fn new(side: usize, theta: f64, temperature: f64) -> Self {
        IsingTarget {
            side,
            theta,
            temperature,
        }
    }
}

impl TargetModel for IsingTarget {
    type State = IsingState;

    fn log_g(&self, state: &IsingState) -> DualValue {
        let h = ising_hamiltonian(state, self.theta);
        let t = self.temperature;
        DualValue::new(-h / t, h / (t * t))
    }

    fn state_space(&self) -> StateSpace<IsingState> {
        StateSpace::Large((self.side * self.side) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hamiltonian_all_up_l2() {
        let s = IsingState::all_up(2);
        assert_eq!(ising_hamiltonian(&s, 1.0), -8.0);
    }

    #[test]
    fn hamiltonian_checkerboard_l2() {
        let s = IsingState::from_spins(2, vec![1, -1, -1, 1]);
        assert_eq!(ising_hamiltonian(&s, 1.0), 8.0);
    }

    #[test]
    fn hamiltonian_l3_single_flip() {
        let mut spins = vec![1i8; 9];
        spins[4] = -1;
        let s = IsingState::from_spins(3, spins);
        assert_eq!(ising_hamiltonian(&s, 1.0), -10.0);
    }

    #[test]
    fn local_delta_same_spin_is_zero() {
        let s = IsingState::all_up(3);
        assert_eq!(ising_local_hamiltonian_delta(&s, 4, 1, 1.0), 0.0);
    }

    #[test]
    fn local_delta_flip_on_ordered_lattice() {
        let s = IsingState::all_up(3);
        for site in 0..9 {
            assert_eq!(ising_local_hamiltonian_delta(&s, site, -1, 1.0), 8.0);
        }
    }

    #[test]
    fn local_delta_matches_full_recomputation() {
        let mut stream = crate::stream::RandomStream::new(314);
        for l in [2usize, 3, 5] {
            for _ in 0..334 {
                let state = IsingState::random(l, &mut stream);
                let site = stream.below((l * l) as u64) as usize;
                let new_spin = stream.sign();
                let delta = ising_local_hamiltonian_delta(&state, site, new_spin, 1.0);
                let next = state.with_spin(site, new_spin);
                let full =
                    ising_hamiltonian_full(&next, 1.0) - ising_hamiltonian_full(&state, 1.0);
                assert_eq!(delta, full);
                // Cache stays in sync with the recomputed value.
                assert_eq!(ising_hamiltonian(&next, 1.0), ising_hamiltonian_full(&next, 1.0));
            }
        }
    }

    #[test]
    fn critical_temperature_values() {
        assert_relative_eq!(critical_temperature(1.0), 2.26919, max_relative = 1e-5);
        assert_relative_eq!(critical_temperature(2.0), 2.0 * critical_temperature(1.0));
        assert_relative_eq!(critical_temperature(0.5), 0.5 * critical_temperature(1.0));
    }

    #[test]
    fn log_g_temperature_derivative_matches_finite_difference() {
        let mut stream = crate::stream::RandomStream::new(99);
        let state = IsingState::random(4, &mut stream);
        let eps = 1e-6;
        for t in [1.0, 2.269, 3.5] {
            let d = IsingTarget::new(4, 1.0, t).log_g(&state).deriv;
            let hi = IsingTarget::new(4, 1.0, t + eps).log_g(&state).value;
            let lo = IsingTarget::new(4, 1.0, t - eps).log_g(&state).value;
            let fd = (hi - lo) / (2.0 * eps);
            assert_relative_eq!(d, fd, max_relative = 1e-5);
        }
    }
}
