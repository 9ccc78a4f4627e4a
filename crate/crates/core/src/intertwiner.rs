//! Intertwining operators realized concretely as module vertex
//! operators (type (M; V M)), their integrally-regraded modes w₁(n),
//! the weight-zero modes o_I, and executable forms of the identities
//! they satisfy: the two-variable associativity, the o_I product rules,
//! the vanishing of o_I on the relation span, the straightening of a
//! composite mode into single I°-modes, and the image bimodule S_I.

use crate::bimodule::{relation_basis, Bimodule};
use crate::echelon::Echelon;
use crate::fock::{
    homogeneous_components, states_up_to, Backend, ModuleId, State, Twist, Vector,
};
use crate::products::{delta_r, star_left, star_right, TwistPair};
use crate::scalar::{binomial_frac, Cyc, Frac};
use crate::zhu::bottom_action;
use num_traits::Zero;
use std::collections::BTreeMap;

/// A concrete intertwining operator handle. The shipped handles are the
/// module vertex operators Y_M of type (M; V M), optionally scaled; the
/// mode oracle is the backend mode action shifted by h₁+h₂−h₃.
#[derive(Clone)]
pub struct Intertwiner {
    pub m1: ModuleId,
    pub m2: ModuleId,
    pub m3: ModuleId,
    /// h₁ + h₂ − h₃; I°(·,z) = z^{shift} I(·,z).
    pub shift: Frac,
    /// Scalar multiple of the underlying operator.
    pub scale: Cyc,
}

/// Y_M(·, z) on a module M, as an intertwiner of type (M; V M).
pub fn module_as_intertwiner(bk: &Backend, m: ModuleId) -> Intertwiner {
    let h = bk.descriptor(m).bottom_weight;
    Intertwiner {
        m1: ModuleId::Vacuum,
        m2: m,
        m3: m,
        shift: Frac::ZERO + h - h,
        scale: bk.one(),
    }
}

impl Intertwiner {
    pub fn scaled(&self, c: &Cyc) -> Intertwiner {
        let mut i = self.clone();
        i.scale = i.scale.mul(c);
        i
    }

    /// The I°-mode w₁(n) applied to w₂: coefficient extraction from
    /// I°(w₁,z)w₂ = Σ w₁(n) w₂ z^{−n−1}.
    pub fn mode(&self, bk: &Backend, w1: &Vector, n: Frac, w2: &Vector) -> Vector {
        assert_eq!(self.m1, ModuleId::Vacuum, "only (M; V M) handles are concrete");
        bk.mode_action(w1, n + self.shift, w2, self.m2)
            .scaled(&self.scale)
    }

    /// The weight-zero mode o_I(w₁) = w₁(deg w₁ − 1), extended linearly
    /// over degree components; maps M²(0) to M³(0).
    pub fn o_i(&self, bk: &Backend, w1: &Vector, w2: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (deg, _, _, comp) in homogeneous_components(w1, Twist::Id, Twist::Id) {
            out.add_assign(&self.mode(bk, &comp, deg - 1, w2));
        }
        out
    }
}

/// One coefficient of the left side of the associativity identity
///   (z₀+z₂)^{k+j₂/T} Y_{M³}(u, z₀+z₂) I°(w₁,z₂) w₂,
/// at z₀^α z₂^β, as a finite sum over the antidiagonal i+j = t of the
/// two binomial expansions.
fn assoc_lhs_coeff(
    bk: &Backend,
    iw: &Intertwiner,
    kq: Frac,
    u: &Vector,
    w1: &Vector,
    w2: &Vector,
    alpha: Frac,
    beta: Frac,
) -> Vector {
    let dw = w1.max_deg().unwrap_or(Frac::ZERO) + w2.max_deg().unwrap_or(Frac::ZERO);
    let tmax = (beta + dw).floor();
    let mut out = Vector::zero();
    for t in 0..=tmax.max(-1) {
        let m = kq - alpha - 1 - Frac::int(t);
        let n = Frac::int(t) - beta - 1;
        let mut c = crate::scalar::Rat::from_integer(0.into());
        for i in 0..=t {
            let j = t - i;
            let ci = binomial_frac(kq, i as u64);
            if ci.is_zero() {
                continue;
            }
            c += ci * binomial_frac(-m - 1, j as u64);
        }
        if c.is_zero() {
            continue;
        }
        let inner = iw.mode(bk, w1, n, w2);
        if inner.is_zero() {
            continue;
        }
        out.add_scaled_rat(&bk.mode_action(u, m, &inner, iw.m3), &c);
    }
    out
}

/// One coefficient of the right side,
///   (z₂+z₀)^{k+j₂/T} I°(Y_{M¹}(u,z₀)w₁, z₂) w₂,  at z₀^α z₂^β.
fn assoc_rhs_coeff(
    bk: &Backend,
    iw: &Intertwiner,
    kq: Frac,
    u: &Vector,
    w1: &Vector,
    w2: &Vector,
    alpha: Frac,
    beta: Frac,
) -> Vector {
    let wt_u = u.max_deg().unwrap_or(Frac::ZERO);
    let dw1 = w1.max_deg().unwrap_or(Frac::ZERO);
    let imax = (alpha + wt_u + dw1).floor();
    let mut out = Vector::zero();
    for i in 0..=imax.max(-1) {
        let c = binomial_frac(kq, i as u64);
        if c.is_zero() {
            continue;
        }
        let l = Frac::int(i) - alpha - 1;
        let x = bk.mode_action(u, l, w1, iw.m1);
        if x.is_zero() {
            continue;
        }
        let n = kq - Frac::int(i) - beta - 1;
        out.add_scaled_rat(&iw.mode(bk, &x, n, w2), &c);
    }
    out
}

/// Associativity of Y_{M³} against I° on a bottom-level w₂, compared
/// coefficient-by-coefficient over a finite exponent window with
/// k = wt u − 1 + δ(j₂). Returns the first differing coefficient.
pub fn check_associativity(
    bk: &Backend,
    iw: &Intertwiner,
    tp: TwistPair,
    u: &Vector,
    w1: &Vector,
    w2: &Vector,
    margin: i64,
) -> Result<(), String> {
    assert!(
        w2.iter().all(|(s, _)| s.deg() == Frac::ZERO),
        "w₂ must be bottom-level"
    );
    if u.is_zero() || w1.is_zero() || w2.is_zero() {
        return Ok(());
    }
    let (j1, j2) = crate::fock::bigrade(u, tp.g1, tp.g2).map_err(|e| e.to_string())?;
    let wt_u = u
        .homogeneous_deg()
        .ok_or("u must be weight-homogeneous")?;
    let t = tp.t as i64;
    let k = wt_u - 1 + Frac::int(delta_r(j2, tp.t) as i64);
    assert!(k.is_integer(), "k must be integral");
    let kq = k + Frac::new(j2 as i64, t);
    let dw1 = w1.max_deg().unwrap();
    // exponent classes: α ∈ j₂/T − [j₁+j₂]/T + ℤ, β ∈ −(g₂-grade of w₁)/T + ℤ
    let g12_grade = ((j1 + j2) % tp.t) as i64;
    let alpha_base = Frac::new(j2 as i64 - g12_grade, t);
    let w1_grade = match w1.iter().next().unwrap().0 {
        State::Fock(f) => f.grade(tp.g2) as i64,
        State::Twisted(_) => 0,
    };
    let beta_base = Frac::new(-w1_grade, t);
    let lo_beta = (-dw1 - 2).floor();
    let hi_beta = (dw1 + wt_u + k + margin).floor() + 2;
    let s_min = kq - dw1 - wt_u;
    for doff in 0..=margin {
        let s = s_min + Frac::int(doff);
        for bnum in lo_beta..=hi_beta {
            let beta = beta_base + Frac::int(bnum);
            let alpha = s - beta;
            if !(alpha - alpha_base).is_integer() {
                continue;
            }
            let lhs = assoc_lhs_coeff(bk, iw, kq, u, w1, w2, alpha, beta);
            let rhs = assoc_rhs_coeff(bk, iw, kq, u, w1, w2, alpha, beta);
            if lhs != rhs {
                return Err(format!(
                    "associativity fails at z0^{} z2^{}: lhs = {}, rhs = {}",
                    alpha, beta, lhs, rhs
                ));
            }
        }
    }
    Ok(())
}

/// The two o_I product rules on bottom-level w₂:
///   o_I(u ∗_{g₁g₂,g₂} w₁) w₂ = o_{M³}(u) o_I(w₁) w₂
///   o_I(w₁ ∗_{g₂,g₁g₂} u) w₂ = o_I(w₁) o_{M²}(u) w₂.
pub fn check_o_i_product_rules(
    bk: &Backend,
    iw: &Intertwiner,
    tp: TwistPair,
    u: &Vector,
    w1: &Vector,
    w2: &Vector,
) -> Result<(), String> {
    let left_lhs = iw.o_i(bk, &star_left(bk, tp, u, w1, iw.m1), w2);
    let left_rhs = bottom_action(bk, u, &iw.o_i(bk, w1, w2), iw.m3);
    if left_lhs != left_rhs {
        return Err(format!(
            "left rule fails: o_I(u∗w₁)w₂ = {}, o(u)o_I(w₁)w₂ = {}",
            left_lhs, left_rhs
        ));
    }
    let right_lhs = iw.o_i(bk, &star_right(bk, tp, w1, u, iw.m1), w2);
    let right_rhs = iw.o_i(bk, w1, &bottom_action(bk, u, w2, iw.m2));
    if right_lhs != right_rhs {
        return Err(format!(
            "right rule fails: o_I(w₁∗u)w₂ = {}, o_I(w₁)o(u)w₂ = {}",
            right_lhs, right_rhs
        ));
    }
    Ok(())
}

/// o_I annihilates the full truncated relation span on M²(0).
pub fn check_o_i_kills_relations(
    bk: &Backend,
    iw: &Intertwiner,
    bim: &Bimodule,
) -> Result<(), String> {
    let bottom = bk.bottom(iw.m2);
    for row in relation_basis(&bim.q) {
        let img = iw.o_i(bk, &row, &bottom);
        if !img.is_zero() {
            return Err(format!(
                "o_I nonzero on relation row {}: residual {}",
                row, img
            ));
        }
    }
    Ok(())
}

/// One straightened term: a coefficient-folded x ∈ M¹ and the mode n at
/// which it acts.
pub struct StraightTerm {
    pub x: Vector,
    pub n: Frac,
}

/// Rewrites the composite u_{p+[j₁+j₂]/T} w₁(n) on w₂ as a finite sum
/// Σ x_i(n_i) of single I°-modes, with the truncation integers k, k′
/// computed minimally from the degree bounds of the arguments. The
/// weight wt(x_i(n_i)) of every returned mode equals the weight of the
/// composite.
pub fn straighten(
    bk: &Backend,
    iw: &Intertwiner,
    tp: TwistPair,
    u: &Vector,
    p: i64,
    w1: &Vector,
    n: Frac,
    w2: &Vector,
) -> Result<Vec<StraightTerm>, String> {
    let (j1, j2) = crate::fock::bigrade(u, tp.g1, tp.g2).map_err(|e| e.to_string())?;
    let wt_u = u.homogeneous_deg().ok_or("u must be weight-homogeneous")?;
    let dw1 = w1.max_deg().unwrap_or(Frac::ZERO);
    let dw2 = w2.max_deg().unwrap_or(Frac::ZERO);
    let t = tp.t as i64;
    let jj = ((j1 + j2) % tp.t) as i64;
    let q2 = Frac::new(j2 as i64, t);

    // k: least integer with u_s w₂ = 0 for all s > k + j₂/T − 1 on M².
    // The degree bound kills u_s w₂ once s > deg w₂ + wt u − 1.
    let k = (dw2 + wt_u - q2).floor() + 1;
    // k′: least integer with w₁(s) w₂ = 0 for all s ≥ k′ + n; modes
    // vanish once s > deg w₁ + deg w₂ − 1.
    let kp = ((dw1 + dw2 - 1 - n).floor() + 1).max(0);

    let kq = Frac::int(k) + q2;
    let top = Frac::int(p - k) + Frac::new(jj, t) - q2;
    let mut terms = Vec::new();
    for i in 0..kp {
        let ci = binomial_frac(top, i as u64);
        if ci.is_zero() {
            continue;
        }
        // u_{top − i + j} w₁ dies once the index exceeds wt u + deg w₁ − 1.
        let jmax = (wt_u + dw1 - 1 - top + Frac::int(i)).floor();
        for j in 0..=jmax.max(-1) {
            let cj = binomial_frac(kq, j as u64);
            if cj.is_zero() {
                continue;
            }
            let idx = top - Frac::int(i) + Frac::int(j);
            let x = bk.mode_action(u, idx, w1, iw.m1);
            if x.is_zero() {
                continue;
            }
            let mode = Frac::int(i) + n + kq - Frac::int(j);
            terms.push(StraightTerm {
                x: x.scaled_rat(&(ci.clone() * cj)),
                n: mode,
            });
        }
    }
    Ok(terms)
}

/// Evaluate the two sides of the straightening identity: the composite
/// u_{p+[j₁+j₂]/T}(w₁(n)w₂) against Σ x_i(n_i)w₂.
pub fn straighten_check(
    bk: &Backend,
    iw: &Intertwiner,
    tp: TwistPair,
    u: &Vector,
    p: i64,
    w1: &Vector,
    n: Frac,
    w2: &Vector,
) -> Result<(), String> {
    let (j1, j2) = crate::fock::bigrade(u, tp.g1, tp.g2).map_err(|e| e.to_string())?;
    let jj = Frac::new(((j1 + j2) % tp.t) as i64, tp.t as i64);
    let inner = iw.mode(bk, w1, n, w2);
    let direct = bk.mode_action(u, Frac::int(p) + jj, &inner, iw.m3);
    let terms = straighten(bk, iw, tp, u, p, w1, n, w2)?;
    let mut recomposed = Vector::zero();
    for t in &terms {
        recomposed.add_assign(&iw.mode(bk, &t.x, t.n, w2));
    }
    if direct != recomposed {
        return Err(format!(
            "straighten re-evaluation differs: direct = {}, recomposed = {}",
            direct, recomposed
        ));
    }
    // weight bookkeeping: every term carries the composite's weight
    let wt_u = u.homogeneous_deg().unwrap();
    let composite_wt = (wt_u - (Frac::int(p) + jj) - 1) + (w1.max_deg().unwrap() - n - 1);
    for t in &terms {
        for (deg, _, _, _) in homogeneous_components(&t.x, Twist::Id, Twist::Id) {
            let mode_wt = deg - t.n - 1;
            if mode_wt != composite_wt {
                return Err(format!(
                    "straighten term weight {} differs from composite weight {}",
                    mode_wt, composite_wt
                ));
            }
        }
    }
    Ok(())
}

/// The image bimodule S_I = {o_I(w₁)|_{M²(0)}}: its rank, the kernel
/// containment of the relation span, and the equivariance of the induced
/// map on representatives.
pub struct SImageReport {
    pub rank: usize,
    pub kernel_contains_relations: bool,
    pub induced_map_equivariant: bool,
}

pub fn s_i_image(
    bk: &Backend,
    iw: &Intertwiner,
    bim: &Bimodule,
) -> Result<SImageReport, String> {
    let m2_bottom: Vec<State> = states_up_to(iw.m2, Frac::ZERO);
    let m3_bottom: Vec<State> = states_up_to(iw.m3, Frac::ZERO);
    let b3_index: BTreeMap<&State, usize> =
        m3_bottom.iter().enumerate().map(|(i, s)| (s, i)).collect();

    // rank of w₁ ↦ o_I(w₁)|_{M²(0)} over the ambient basis of M¹
    let mut ech = Echelon::new(m2_bottom.len() * m3_bottom.len());
    for w1s in &bim.q.ambient {
        let w1 = Vector::single(w1s.clone(), bk.one());
        let mut row: BTreeMap<usize, Cyc> = BTreeMap::new();
        for (bi, b) in m2_bottom.iter().enumerate() {
            let img = iw.o_i(bk, &w1, &Vector::single(b.clone(), bk.one()));
            for (s, c) in img.iter() {
                let col = bi * m3_bottom.len() + b3_index[s];
                row.insert(col, c.clone());
            }
        }
        ech.insert(row);
    }
    let rank = ech.rank();

    let kernel_contains_relations = check_o_i_kills_relations(bk, iw, bim).is_ok();

    // the induced map intertwines both actions on representatives
    let mut equivariant = true;
    let algebra_states = crate::fock::fock_states_up_to(bim.cap.min(3));
    'outer: for x in bim.representatives() {
        let xv = Vector::single(x.clone(), bk.one());
        for a in &algebra_states {
            let av = Vector::single(a.clone(), bk.one());
            if a.deg() + x.deg() > Frac::int(bim.cap) {
                continue;
            }
            for b in &m2_bottom {
                let bv = Vector::single(b.clone(), bk.one());
                let lhs = iw.o_i(bk, &bim.act_left(bk, &av, &xv), &bv);
                let rhs = bottom_action(bk, &av, &iw.o_i(bk, &xv, &bv), iw.m3);
                if lhs != rhs {
                    equivariant = false;
                    break 'outer;
                }
                let lhs = iw.o_i(bk, &bim.act_right(bk, &xv, &av), &bv);
                let rhs = iw.o_i(bk, &xv, &bottom_action(bk, &av, &bv, iw.m2));
                if lhs != rhs {
                    equivariant = false;
                    break 'outer;
                }
            }
        }
    }

    Ok(SImageReport {
        rank,
        kernel_contains_relations,
        induced_map_equivariant: equivariant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::build_bimodule;
    use crate::fock::FockState;
    use crate::scalar::rat;

    fn bk() -> Backend {
        Backend::new()
    }

    fn canonical_tp() -> TwistPair {
        TwistPair::new(2, Twist::Id, Twist::Theta)
    }

    fn fock(bk: &Backend, parts: &[i64]) -> Vector {
        Vector::single(State::Fock(FockState::new(parts.to_vec())), bk.one())
    }

    #[test]
    fn o_i_of_vacuum_is_identity() {
        let bk = bk();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        assert_eq!(iw.o_i(&bk, &bk.vacuum(), &b), b);
    }

    #[test]
    fn o_i_of_omega_is_h() {
        let bk = bk();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        let h = bk.descriptor(ModuleId::ThetaTwisted).bottom_weight;
        assert_eq!(iw.o_i(&bk, &bk.omega(), &b), b.scaled_rat(&h.to_rat()));
    }

    #[test]
    fn o_i_of_odd_vector_on_twisted_bottom() {
        let bk = bk();
        // o_I(a) = a(0) has no half-odd mode at 0, so it is the zero map
        // M²(0) → M³(0); still lands in the degree-0 layer.
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        assert!(iw.o_i(&bk, &bk.generator(), &b).is_zero());
    }

    #[test]
    fn mode_degree_bookkeeping() {
        let bk = bk();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let w1 = fock(&bk, &[2, 1]);
        for s in crate::fock::twisted_states_up_to(Frac::int(2)) {
            let w2 = Vector::single(s.clone(), bk.one());
            for num in -5..=5 {
                let n = Frac::half(2 * num + 1);
                let out = iw.mode(&bk, &w1, n, &w2);
                let expect = s.deg() + Frac::int(3) - n - 1;
                for (t, _) in out.iter() {
                    assert_eq!(t.deg(), expect, "w₁({}) misplaced a term", n);
                }
            }
        }
    }

    #[test]
    fn associativity_small_instances() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        check_associativity(&bk, &iw, tp, &bk.vacuum(), &fock(&bk, &[1]), &b, 3).unwrap();
        check_associativity(&bk, &iw, tp, &bk.generator(), &bk.generator(), &b, 3).unwrap();
        check_associativity(&bk, &iw, tp, &bk.omega(), &bk.generator(), &b, 3).unwrap();
        check_associativity(&bk, &iw, tp, &fock(&bk, &[2]), &fock(&bk, &[1, 1]), &b, 2).unwrap();
    }

    #[test]
    fn o_i_product_rules_small() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        for u_parts in [&[][..], &[1][..], &[2][..], &[1, 1][..]] {
            for w_parts in [&[][..], &[1][..], &[2, 1][..]] {
                let u = fock(&bk, u_parts);
                let w1 = fock(&bk, w_parts);
                check_o_i_product_rules(&bk, &iw, tp, &u, &w1, &b).unwrap();
            }
        }
    }

    #[test]
    fn straighten_vacuum_single_term() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        let w1 = fock(&bk, &[1]);
        let n = Frac::half(-1);
        // u = 𝟏, p = −1: single term (w₁, n)
        let terms = straighten(&bk, &iw, tp, &bk.vacuum(), -1, &w1, n, &b).unwrap();
        let nonzero: Vec<_> = terms.iter().filter(|t| !t.x.is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].x, w1);
        assert_eq!(nonzero[0].n, n);
        straighten_check(&bk, &iw, tp, &bk.vacuum(), -1, &w1, n, &b).unwrap();
    }

    #[test]
    fn straighten_small_sweep() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        for u_parts in [&[1][..], &[2][..], &[1, 1][..]] {
            for w_parts in [&[][..], &[1][..], &[2][..]] {
                for p in -3..=2 {
                    for n2 in [-3, -1, 1] {
                        let u = fock(&bk, u_parts);
                        let w1 = fock(&bk, w_parts);
                        // modes of w₁ on the twisted module sit in the
                        // class fixed by its parity
                        let n = if w_parts.len() % 2 == 1 {
                            Frac::half(n2)
                        } else {
                            Frac::int(n2)
                        };
                        straighten_check(&bk, &iw, tp, &u, p, &w1, n, &b).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn straighten_weight_zero_composites_use_o_i_modes() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        // u = a, w₁ = a: composite weight zero picks p, n with
        // (1 − p − 1/2 − 1) + (1 − n − 1) = 0
        let u = bk.generator();
        let w1 = bk.generator();
        let p = 0i64;
        let n = Frac::half(-1) - Frac::int(p);
        let composite_wt = (Frac::int(1) - (Frac::int(p) + Frac::half(1)) - 1)
            + (Frac::int(1) - n - 1);
        assert_eq!(composite_wt, Frac::ZERO);
        let terms = straighten(&bk, &iw, tp, &u, p, &w1, n, &b).unwrap();
        assert!(!terms.is_empty());
        for t in &terms {
            for (deg, _, _, _) in homogeneous_components(&t.x, Twist::Id, Twist::Id) {
                assert_eq!(t.n, deg - 1, "weight-zero mode is not an o_I mode");
            }
        }
        straighten_check(&bk, &iw, tp, &u, p, &w1, n, &b).unwrap();
    }

    #[test]
    fn s_i_has_rank_one_and_kills_relations() {
        let bk = bk();
        let tp = canonical_tp();
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let bim = build_bimodule(&bk, tp, ModuleId::Vacuum, 4);
        let rep = s_i_image(&bk, &iw, &bim).unwrap();
        assert_eq!(rep.rank, 1);
        assert!(rep.kernel_contains_relations);
        assert!(rep.induced_map_equivariant);
    }

    #[test]
    fn scaled_intertwiner_is_linear() {
        let bk = bk();
        let c = bk.cyc_rat(rat(3, 4));
        let iw = module_as_intertwiner(&bk, ModuleId::ThetaTwisted);
        let iw2 = iw.scaled(&c);
        let b = bk.bottom(ModuleId::ThetaTwisted);
        let w1 = fock(&bk, &[2]);
        assert_eq!(
            iw2.o_i(&bk, &w1, &b),
            iw.o_i(&bk, &w1, &b).scaled(&c)
        );
    }
}
