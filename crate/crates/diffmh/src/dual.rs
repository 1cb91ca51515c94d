//! Forward-mode scalar dual numbers.
//!
//! A [`DualValue`] carries a value together with its derivative with respect
//! to the single scalar parameter being differentiated. Log-density ratios
//! and acceptance probabilities are propagated through chains as duals.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A scalar and its derivative with respect to the target parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub deriv: f64,
}

impl DualValue {
    pub fn new(value: f64, deriv: f64) -> Self {
        DualValue { value, deriv }
    }

    /// A constant: zero derivative.
    pub fn constant(value: f64) -> Self {
        DualValue { value, deriv: 0.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        DualValue::new(e, e * self.deriv)
    }

    pub fn ln(self) -> Self {
        DualValue::new(self.value.ln(), self.deriv / self.value)
    }

    /// min(self, c) for a constant `c`. The kink at `value == c` is assigned
    /// the one-sided derivative of the constant branch (zero), so values at
    /// or above `c` clamp to a flat `c`.
    pub fn min_const(self, c: f64) -> Self {
        if self.value < c {
            self
        } else {
            DualValue::constant(c)
        }
    }

    pub fn is_finite(self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }
}

impl Add for DualValue {
    type Output = DualValue;
    fn add(self, rhs: Self) -> Self {
        DualValue::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for DualValue {
    type Output = DualValue;
    fn sub(self, rhs: Self) -> Self {
        DualValue::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for DualValue {
    type Output = DualValue;
    fn mul(self, rhs: Self) -> Self {
        DualValue::new(
            self.value * rhs.value,
            self.value * rhs.deriv + self.deriv * rhs.value,
        )
    }
}

impl Div for DualValue {
    type Output = DualValue;
    fn div(self, rhs: Self) -> Self {
        DualValue::new(
            self.value / rhs.value,
            (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        )
    }
}

impl Neg for DualValue {
    type Output = DualValue;
    fn neg(self) -> Self {
        DualValue::new(-self.value, -self.deriv)
    }
}

impl Mul<f64> for DualValue {
    type Output = DualValue;
    fn mul(self, rhs: f64) -> Self {
        DualValue::new(self.value * rhs, self.deriv * rhs)
    }
}

impl Add<f64> for DualValue {
    type Output = DualValue;
    fn add(self, rhs: f64) -> Self {
        DualValue::new(self.value + rhs, self.deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RandomStream;

    #[derive(Clone, Copy, Debug)]
    enum Op {
        AddConst(f64),
        MulConst(f64),
        AddTheta,
        MulTheta,
        Exp,
        Ln,
        MinConst(f64),
        Square,
    }

    fn apply(op: Op, x: DualValue, theta: DualValue) -> DualValue {
        match op {
            Op::AddConst(c) => x + c,
            Op::MulConst(c) => x * c,
            Op::AddTheta => x + theta,
            Op::MulTheta => x * theta,
            Op::Exp => x.exp(),
            Op::Ln => x.ln(),
            Op::MinConst(c) => x.min_const(c),
            Op::Square => x * x,
        }
    }

    /// Draw a random expression as an op sequence, keeping intermediate
    /// values inside a domain where exp/ln are well conditioned and away
    /// from min_const kinks so finite differences are valid.
    fn random_ops(stream: &mut RandomStream, value_at: impl Fn(&[Op], f64) -> f64) -> Vec<Op> {
        'outer: loop {
            let n = 2 + stream.below(5) as usize;
            let mut ops = Vec::with_capacity(n);
            for _ in 0..n {
                let op = match stream.below(8) {
                    0 => Op::AddConst(stream.uniform() * 4.0 - 2.0),
                    1 => Op::MulConst(stream.uniform() * 3.0 + 0.25),
                    2 => Op::AddTheta,
                    3 => Op::MulTheta,
                    4 => Op::Exp,
                    5 => Op::Ln,
                    6 => Op::MinConst(stream.uniform() * 4.0 - 2.0),
                    _ => Op::Square,
                };
                ops.push(op);
            }
            // Reject expressions that leave the safe domain anywhere near theta.
            for dt in [-1e-4, 0.0, 1e-4] {
                let v = value_at(&ops, dt);
                if !v.is_finite() || v.abs() > 1e6 {
                    continue 'outer;
                }
            }
            // Reject if any min_const kink sits within finite-difference reach.
            let theta = 0.7;
            let mut x = DualValue::new(theta * 1.3 + 0.4, 0.0);
            let mut ok = true;
            for &op in &ops {
                if let Op::MinConst(c) = op {
                    if (x.value - c).abs() < 1e-3 {
                        ok = false;
                        break;
                    }
                }
                if let Op::Ln = op {
                    if x.value < 1e-3 {
                        ok = false;
                        break;
                    }
                }
                x = apply(op, x, DualValue::constant(theta));
            }
            if ok {
                return ops;
            }
        }
    }

    fn eval(ops: &[Op], theta: DualValue) -> DualValue {
        let mut x = theta * 1.3 + 0.4;
        for &op in ops {
            x = apply(op, x, theta);
        }
        x
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let mut stream = RandomStream::new(0xD0A1);
        let theta = 0.7;
        let eps = 1e-6 * theta.abs().max(1.0);
        let mut checked = 0;
        while checked < 1000 {
            let ops = random_ops(&mut stream, |ops, dt| {
                eval(ops, DualValue::constant(theta + dt)).value
            });
            let dual = eval(&ops, DualValue::new(theta, 1.0));
            let hi = eval(&ops, DualValue::constant(theta + eps)).value;
            let lo = eval(&ops, DualValue::constant(theta - eps)).value;
            let fd = (hi - lo) / (2.0 * eps);
            let scale = dual.deriv.abs().max(fd.abs()).max(1e-8);
            assert!(
                (dual.deriv - fd).abs() / scale <= 1e-5,
                "chain rule mismatch: dual {} vs fd {} on {:?}",
                dual.deriv,
                fd,
                ops
            );
            checked += 1;
        }
    }

    #[test]
    fn min_const_clamps_with_zero_derivative() {
        let x = DualValue::new(1.5, 3.0);
        assert_eq!(x.min_const(1.0), DualValue::constant(1.0));
        // Exactly at the kink: constant branch wins.
        let y = DualValue::new(1.0, 3.0);
        assert_eq!(y.min_const(1.0), DualValue::constant(1.0));
        let z = DualValue::new(0.5, 3.0);
        assert_eq!(z.min_const(1.0), z);
    }
}
