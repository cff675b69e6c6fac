//! Beta-Bernoulli belief, the credibility-threshold rule and hysteresis.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::arena::Color;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("posterior not ready: both pseudo-counts must be positive")]
pub struct NotReady;

/// Beta pseudo-counts over the fill ratio: `alpha` counts white, `beta` black.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub alpha: f64,
    pub beta: f64,
}

impl Belief {
    pub fn new(alpha0: f64, beta0: f64) -> Self {
        Self { alpha: alpha0, beta: beta0 }
    }

    /// Conjugate update; identical for own and received colors.
    #[must_use]
    pub fn update(self, color: Color) -> Self {
        let c = f64::from(color.bit());
        Self { alpha: self.alpha + c, beta: self.beta + (1.0 - c) }
    }

    /// `P(f < theta)` under `Beta(alpha, beta)`.
    pub fn cdf_at(&self, theta: f64) -> Result<f64, NotReady> {
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(NotReady);
        }
        Ok(regularized_incomplete_beta(self.alpha, self.beta, theta))
    }

    /// Like [`Belief::cdf_at`], but a one-sided posterior takes its limit:
    /// all mass at 1 when no black was seen, at 0 when no white was seen.
    pub fn cdf_or_limit_at(&self, theta: f64) -> Result<f64, NotReady> {
        match (self.alpha > 0.0, self.beta > 0.0) {
            (false, false) => Err(NotReady),
            (true, false) => Ok(0.0),
            (false, true) => Ok(1.0),
            (true, true) => self.cdf_at(theta),
        }
    }

    /// Posterior mean `alpha / (alpha + beta)`.
    pub fn expected_fill(&self) -> Result<f64, NotReady> {
        let total = self.alpha + self.beta;
        if total <= 0.0 {
            return Err(NotReady);
        }
        Ok(self.alpha / total)
    }
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`.
///
/// Modified Lentz evaluation of the standard continued fraction, on whichever
/// side of the mean converges fastest. The iteration budget scales with the
/// parameters so large posteriors (tens of thousands of counts) still
/// converge to full double precision.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    ln_front.exp() * beta_continued_fraction(a, b, x) / a
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let max_iter = 1000 + 20 * (a.max(b).sqrt() as usize);

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return h;
        }
    }
    h
}

/// The stored classification flag `d_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    #[default]
    Undecided,
    Black,
    White,
}

impl Decision {
    /// `-1`, `0` or `1`.
    pub fn code(self) -> i8 {
        match self {
            Decision::Undecided => -1,
            Decision::Black => 0,
            Decision::White => 1,
        }
    }

    pub fn color(self) -> Option<Color> {
        match self {
            Decision::Undecided => None,
            Decision::Black => Some(Color::Black),
            Decision::White => Some(Color::White),
        }
    }
}

impl From<Color> for Decision {
    fn from(c: Color) -> Self {
        match c {
            Color::Black => Decision::Black,
            Color::White => Decision::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConstants {
    pub theta: f64,
    pub p_c: f64,
    pub h: u32,
}

impl Default for DecisionConstants {
    fn default() -> Self {
        Self { theta: 0.5, p_c: 0.95, h: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecisionState {
    pub d_f: Decision,
    /// Integrated colors so far, `o(t)`.
    pub o_total: u64,
    /// `o(t)` when the currently favored side first became favored.
    pub o_i: u64,
    pub pending_side: Option<Color>,
}

impl DecisionState {
    pub fn decision(&self) -> Decision {
        self.d_f
    }
}

/// Side the credibility condition currently favors, given `p = P(f < theta)`.
pub fn favored_side(p: f64, p_c: f64) -> Option<Color> {
    if p > p_c {
        Some(Color::Black)
    } else if 1.0 - p > p_c {
        Some(Color::White)
    } else {
        None
    }
}

/// Applies the credibility and hysteresis rules after a posterior update.
///
/// A side must stay favored while `o_total - o_i >= h` becomes true before
/// `d_f` is set to it. Losing the credibility condition clears the pending
/// side and `o_i`. Re-confirming the side already stored is a no-op.
#[must_use]
pub fn update_decision(ds: DecisionState, p: f64, consts: &DecisionConstants) -> DecisionState {
    let mut next = ds;
    match favored_side(p, consts.p_c) {
        None => {
            next.pending_side = None;
            next.o_i = 0;
        }
        Some(side) => {
            if next.pending_side != Some(side) {
                next.pending_side = Some(side);
                next.o_i = next.o_total;
            }
            let target = Decision::from(side);
            if next.d_f != target && next.o_total - next.o_i >= u64::from(consts.h) {
                next.d_f = target;
            }
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `I_{1/2}(a, b)` for integer `a, b` as a binomial tail:
    /// `P(Bin(a + b - 1, 1/2) >= a)`, summed in log space.
    fn binomial_tail_half(a: u64, b: u64) -> f64 {
        let n = a + b - 1;
        let ln_half_n = n as f64 * 0.5f64.ln();
        let mut total = 0.0;
        for k in a..=n {
            let ln_choose = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
            total += (ln_choose + ln_half_n).exp();
        }
        total
    }

    #[test]
    fn cdf_examples() {
        assert!((Belief::new(1.0, 1.0).cdf_at(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((Belief::new(2.0, 1.0).cdf_at(0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((Belief::new(1.0, 2.0).cdf_at(0.5).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cdf_not_ready_on_empty_side() {
        assert_eq!(Belief::new(0.0, 0.0).cdf_at(0.5), Err(NotReady));
        assert_eq!(Belief::new(3.0, 0.0).cdf_at(0.5), Err(NotReady));
        assert_eq!(Belief::new(0.0, 3.0).cdf_at(0.5), Err(NotReady));
        assert_eq!(Belief::new(0.0, 0.0).cdf_or_limit_at(0.5), Err(NotReady));
        assert_eq!(Belief::new(3.0, 0.0).cdf_or_limit_at(0.5), Ok(0.0));
        assert_eq!(Belief::new(0.0, 3.0).cdf_or_limit_at(0.5), Ok(1.0));
        assert_eq!(Belief::new(2.0, 1.0).cdf_or_limit_at(0.5), Belief::new(2.0, 1.0).cdf_at(0.5));
    }

    #[test]
    fn cdf_matches_binomial_closed_form() {
        for a in 1..40u64 {
            for b in 1..40u64 {
                let got = Belief::new(a as f64, b as f64).cdf_at(0.5).unwrap();
                let want = binomial_tail_half(a, b);
                assert!((got - want).abs() < 1e-10, "a={a} b={b}: {got} vs {want}");
            }
        }
        for (a, b) in [(133, 123), (1500, 1460), (14_000, 13_800), (15_000, 15_000), (30_000, 29_700)] {
            let got = Belief::new(a as f64, b as f64).cdf_at(0.5).unwrap();
            let want = binomial_tail_half(a, b);
            assert!((got - want).abs() < 1e-10, "a={a} b={b}: {got} vs {want}");
        }
    }

    #[test]
    fn belief_updates() {
        assert_eq!(Belief::new(0.0, 0.0).update(Color::White), Belief::new(1.0, 0.0));
        assert_eq!(Belief::new(2.0, 1.0).update(Color::Black), Belief::new(2.0, 2.0));
        let mut b = Belief::new(0.0, 0.0);
        for i in 0..256 {
            b = b.update(if i % 2 == 0 || i < 10 { Color::White } else { Color::Black });
        }
        assert_eq!(b, Belief::new(133.0, 123.0));
    }

    #[test]
    fn expected_fill_examples() {
        assert_eq!(Belief::new(1.0, 1.0).expected_fill(), Ok(0.5));
        assert!((Belief::new(133.0, 123.0).expected_fill().unwrap() - 133.0 / 256.0).abs() < 1e-15);
        assert_eq!(Belief::new(0.0, 5.0).expected_fill(), Ok(0.0));
        assert_eq!(Belief::new(0.0, 0.0).expected_fill(), Err(NotReady));
    }

    fn consts(h: u32) -> DecisionConstants {
        DecisionConstants { theta: 0.5, p_c: 0.95, h }
    }

    #[test]
    fn immediate_decision_without_hysteresis() {
        let ds = update_decision(DecisionState::default(), 0.99, &consts(0));
        assert_eq!(ds.decision(), Decision::Black);
        let ds = update_decision(DecisionState::default(), 0.01, &consts(0));
        assert_eq!(ds.decision(), Decision::White);
    }

    #[test]
    fn hysteresis_broken_before_h() {
        let c = consts(17);
        let mut ds = DecisionState::default();
        for _ in 0..=16 {
            ds = update_decision(ds, 0.99, &c);
            assert_eq!(ds.decision(), Decision::Undecided);
            ds.o_total += 1;
        }
        // 16 observations after o_i, then the condition lapses.
        ds.o_total -= 1;
        assert_eq!(ds.o_total - ds.o_i, 16);
        ds = update_decision(ds, 0.9, &c);
        assert_eq!(ds.pending_side, None);
        assert_eq!(ds.o_i, 0);
        assert_eq!(ds.decision(), Decision::Undecided);
    }

    #[test]
    fn hysteresis_met_after_h() {
        let c = consts(17);
        let mut ds = DecisionState { o_total: 40, ..DecisionState::default() };
        ds = update_decision(ds, 0.001, &c);
        assert_eq!(ds.o_i, 40);
        for k in 1..=17 {
            ds.o_total += 1;
            ds = update_decision(ds, 0.001, &c);
            let expected = if k < 17 { Decision::Undecided } else { Decision::White };
            assert_eq!(ds.decision(), expected, "k={k}");
        }
    }

    #[test]
    fn switching_sides_restarts_hysteresis() {
        let c = consts(3);
        let mut ds = DecisionState { d_f: Decision::White, o_total: 10, ..DecisionState::default() };
        ds = update_decision(ds, 0.99, &c);
        assert_eq!((ds.pending_side, ds.o_i), (Some(Color::Black), 10));
        ds.o_total = 12;
        ds = update_decision(ds, 0.99, &c);
        assert_eq!(ds.decision(), Decision::White);
        ds.o_total = 13;
        ds = update_decision(ds, 0.99, &c);
        assert_eq!(ds.decision(), Decision::Black);
    }

    proptest! {
        #[test]
        fn cdf_monotone_in_counts(a in 1u32..500, b in 1u32..500) {
            let base = Belief::new(f64::from(a), f64::from(b)).cdf_at(0.5).unwrap();
            let more_white = Belief::new(f64::from(a + 1), f64::from(b)).cdf_at(0.5).unwrap();
            let more_black = Belief::new(f64::from(a), f64::from(b + 1)).cdf_at(0.5).unwrap();
            prop_assert!(more_white <= base);
            prop_assert!(more_black >= base);
            if base > 1e-12 && base < 1.0 - 1e-12 {
                prop_assert!(more_white < base);
                prop_assert!(more_black > base);
            }
        }

        #[test]
        fn swapping_counts_mirrors(a in 0.1f64..300.0, b in 0.1f64..300.0, pc in 0.51f64..0.999) {
            let p = Belief::new(a, b).cdf_at(0.5).unwrap();
            let q = Belief::new(b, a).cdf_at(0.5).unwrap();
            prop_assert!((p + q - 1.0).abs() < 1e-10);
            let side = favored_side(p, pc);
            let mirrored = favored_side(q, pc);
            if (p - pc).abs() > 1e-9 && (1.0 - p - pc).abs() > 1e-9 {
                prop_assert_eq!(side.map(Color::opposite), mirrored);
            }
        }
    }
}
