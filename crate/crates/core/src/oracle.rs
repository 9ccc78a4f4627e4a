//! Independent reference implementations used by the test suites.
//!
//! Nothing here goes through the iterate recursion for composite
//! vectors: the Virasoro operators are written directly as normal-
//! ordered quadratic sums over oscillators, and the twisted anomaly
//! constant is fixed by the Virasoro bracket rather than assumed. These
//! are the oracles against which the engine's mode actions are judged.

use crate::fock::{Backend, ModuleId, Vector};
use crate::scalar::{binomial_frac, rat, Frac, Rat};
use num_traits::Zero;

/// The purely normal-ordered part of L(k) on a module:
/// (1/2) Σ_j :a_j a_{k−j}: with the summation window forced by the
/// degree of the argument. No anomaly constant is included.
pub fn normal_ordered_l(bk: &Backend, k: i64, w: &Vector, m: ModuleId) -> Vector {
    let mut out = Vector::zero();
    let Some(d) = w.max_deg() else {
        return out;
    };
    // :a_j a_{k−j}: w ≠ 0 requires max(j, k−j) ≤ deg w.
    let (lo, hi) = (Frac::int(k) - d, d);
    let start = match m {
        ModuleId::Vacuum => Frac::int(lo.floor()),
        ModuleId::ThetaTwisted => {
            let f = lo.floor();
            // least element of 1/2 + ℤ that is ≥ lo
            if Frac::half(2 * f + 1) >= lo {
                Frac::half(2 * f + 1)
            } else {
                Frac::half(2 * f + 3)
            }
        }
    };
    let mut j = start;
    while j <= hi {
        let other = Frac::int(k) - j;
        let (left, right) = if j <= other { (j, other) } else { (other, j) };
        let inner = bk.generator_mode(right, w, m);
        if !inner.is_zero() {
            let term = bk.generator_mode(left, &inner, m);
            out.add_scaled_rat(&term, &rat(1, 2));
        }
        j = j + Frac::ONE;
    }
    out
}

/// The anomaly constant μ of the twisted L(0), determined by the
/// Virasoro bracket: [L(1), L(−1)] b = 2 L(0) b = 2μ b on the bottom
/// state, where L(±1) carry no constant.
pub fn twisted_anomaly(bk: &Backend) -> Rat {
    let m = ModuleId::ThetaTwisted;
    let b = bk.bottom(m);
    let down = normal_ordered_l(bk, -1, &b, m);
    let up_down = normal_ordered_l(bk, 1, &down, m);
    let up = normal_ordered_l(bk, 1, &b, m);
    let comm = up_down.sub(&normal_ordered_l(bk, -1, &up, m));
    let bottom_state = b.iter().next().unwrap().0.clone();
    let coeff = comm
        .coeff(&bottom_state)
        .map(|c| c.as_rat().expect("rational eigenvalue"))
        .unwrap_or_else(Rat::zero);
    coeff / rat(2, 1)
}

/// Full oracle L(k): the normal-ordered sum plus, for k = 0 on the
/// twisted module, the bracket-determined anomaly.
pub fn l_oracle(bk: &Backend, k: i64, w: &Vector, m: ModuleId) -> Vector {
    let mut out = normal_ordered_l(bk, k, w, m);
    if k == 0 && m == ModuleId::ThetaTwisted {
        out.add_scaled_rat(w, &twisted_anomaly(bk));
    }
    out
}

/// The component commutator identity of the twisted Jacobi identity:
/// [u_m, v_n] w = Σ_{i≥0} C(m,i) (u_i v)_{m+n−i} w.
/// Returns the residual on failure.
pub fn commutator_check(
    bk: &Backend,
    u: &Vector,
    m_idx: Frac,
    v: &Vector,
    n_idx: Frac,
    w: &Vector,
    module: ModuleId,
) -> Result<(), String> {
    let lhs = bk
        .mode_action(u, m_idx, &bk.mode_action(v, n_idx, w, module), module)
        .sub(&bk.mode_action(v, n_idx, &bk.mode_action(u, m_idx, w, module), module));
    // u_i v dies once i exceeds wt u + wt v − 1
    let wt_u = u.max_deg().unwrap_or(Frac::ZERO);
    let wt_v = v.max_deg().unwrap_or(Frac::ZERO);
    let imax = (wt_u + wt_v - 1).floor().max(0);
    let mut rhs = Vector::zero();
    for i in 0..=imax {
        let c = binomial_frac(m_idx, i as u64);
        if c.is_zero() {
            continue;
        }
        let uv = bk.mode_action(u, Frac::int(i), v, ModuleId::Vacuum);
        if uv.is_zero() {
            continue;
        }
        let acted = bk.mode_action(&uv, m_idx + n_idx - Frac::int(i), w, module);
        rhs.add_scaled_rat(&acted, &c);
    }
    if lhs != rhs {
        return Err(format!(
            "commutator identity fails at m = {}, n = {}: lhs = {}, rhs = {}",
            m_idx, n_idx, lhs, rhs
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_states_up_to, twisted_states_up_to, State};

    #[test]
    fn anomaly_is_one_sixteenth() {
        let bk = Backend::new();
        assert_eq!(twisted_anomaly(&bk), rat(1, 16));
    }

    #[test]
    fn oracle_matches_engine_virasoro() {
        let bk = Backend::new();
        for s in fock_states_up_to(4) {
            let v = Vector::single(s.clone(), bk.one());
            for k in -2..=2 {
                assert_eq!(
                    l_oracle(&bk, k, &v, ModuleId::Vacuum),
                    bk.l_op(k, &v, ModuleId::Vacuum),
                    "L({}) differs on {}",
                    k,
                    s
                );
            }
        }
        for s in twisted_states_up_to(Frac::int(3)) {
            let v = Vector::single(s.clone(), bk.one());
            for k in -2..=2 {
                assert_eq!(
                    l_oracle(&bk, k, &v, ModuleId::ThetaTwisted),
                    bk.l_op(k, &v, ModuleId::ThetaTwisted),
                    "twisted L({}) differs on {}",
                    k,
                    s
                );
            }
        }
    }

    #[test]
    fn commutator_small_instances() {
        let bk = Backend::new();
        let a = bk.generator();
        let om = bk.omega();
        let b = State::Twisted(crate::fock::TwistedState::new(vec![Frac::half(1)]));
        let w = Vector::single(b, bk.one());
        commutator_check(&bk, &a, Frac::half(1), &om, Frac::int(1), &w, ModuleId::ThetaTwisted)
            .unwrap();
        commutator_check(&bk, &om, Frac::int(0), &om, Frac::int(1), &w, ModuleId::ThetaTwisted)
            .unwrap();
        let u = Vector::single(State::Fock(crate::fock::FockState::new(vec![2, 1])), bk.one());
        commutator_check(&bk, &u, Frac::half(-1), &a, Frac::half(3), &w, ModuleId::ThetaTwisted)
            .unwrap();
    }
}
