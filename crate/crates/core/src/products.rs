//! The δ case tables and the five residue products.
//!
//! Every product has the shape
//!
//!   prefactor · Res_z (1+z)^α / z^β · Y(u, z) w
//!     = prefactor · Σ_{i≥0} C(α, i) · u_{i−β} w,
//!
//! so all of them funnel through a single kernel, [`residue_product`],
//! and the per-product exponents live in one auditable table,
//! [`bi_product_spec`] / [`g_product_spec`]. The zero branches and the
//! phase e^{−j₁πi/T} are part of that table.

use crate::fock::{homogeneous_components, Backend, ModuleId, Twist, Vector};
use crate::scalar::{binomial_frac, phase, Cyc, Frac};
use num_traits::Zero;

/// δ(r) = 1 iff r ≡ 0 (mod T).
pub fn delta_r(r: u32, t: u32) -> u32 {
    if r % t == 0 {
        1
    } else {
        0
    }
}

/// The two-index case table:
/// δ(j₁,j₂) = 1 if j₂ = 0; 1 if j₂ ≠ 0 and j₁+j₂ ≥ T; else 0.
/// Satisfies δ(0, j₂) = δ(j₂).
pub fn delta_pair(j1: u32, j2: u32, t: u32) -> u32 {
    debug_assert!(j1 < t && j2 < t);
    if j2 == 0 || j1 + j2 >= t {
        1
    } else {
        0
    }
}

/// One residue-product instance: Res_z (1+z)^α / z^β with a scalar
/// prefactor. β − α fixes the weight shift of the top term.
#[derive(Clone, Debug)]
pub struct ResidueSpec {
    pub alpha: Frac,
    pub beta: Frac,
    pub prefactor: Cyc,
}

/// prefactor · Σ_{i≥0} C(α,i) u_{i−β} w, truncated at the first index
/// whose mode annihilates every term of w by the degree bound. `u` must
/// be weight-homogeneous (the truncation bound needs a single weight).
pub fn residue_product(
    bk: &Backend,
    spec: &ResidueSpec,
    u: &Vector,
    w: &Vector,
    m: ModuleId,
) -> Vector {
    if u.is_zero() || w.is_zero() {
        return Vector::zero();
    }
    let wt = u
        .homogeneous_deg()
        .expect("residue_product requires weight-homogeneous u");
    let deg_w = w.max_deg().unwrap();
    // u_{i−β} w = 0 once i − β exceeds wt u + deg w − 1.
    let imax = (wt + deg_w - 1 + spec.beta).floor();
    let mut out = Vector::zero();
    for i in 0..=imax.max(-1) {
        let c = binomial_frac(spec.alpha, i as u64);
        if c.is_zero() {
            continue;
        }
        let acted = bk.mode_action(u, Frac::int(i) - spec.beta, w, m);
        out.add_scaled_rat(&acted, &c);
    }
    out.scaled(&spec.prefactor)
}

/// The pair of commuting twists of a scenario, with the automorphism
/// order they live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistPair {
    pub t: u32,
    pub g1: Twist,
    pub g2: Twist,
}

impl TwistPair {
    pub fn new(t: u32, g1: Twist, g2: Twist) -> TwistPair {
        TwistPair { t, g1, g2 }
    }

    /// The composite twist g₁g₂ of the left algebra and of M³.
    pub fn g12(&self) -> Twist {
        self.g1.compose(self.g2)
    }
}

/// The three products of V against M¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiProductKind {
    /// u ∘_{g₁g₂,g₂} w₁, spanning O′.
    Circ,
    /// u ∗_{g₁g₂,g₂} w₁, the left action.
    StarLeft,
    /// w₁ ∗_{g₂,g₁g₂} u, the right action.
    StarRight,
}

/// Exponent table of the three M¹-products for homogeneous
/// u ∈ V^{(j₁,j₂)} of weight wt. `None` is the zero branch.
pub fn bi_product_spec(
    tp: TwistPair,
    wt: Frac,
    j1: u32,
    j2: u32,
    kind: BiProductKind,
) -> Option<ResidueSpec> {
    let t = tp.t;
    let ord = 2 * t;
    let j1t = Frac::new(j1 as i64, t as i64);
    let j2t = Frac::new(j2 as i64, t as i64);
    match kind {
        BiProductKind::Circ => Some(ResidueSpec {
            alpha: wt - 1 + Frac::int(delta_r(j2, t) as i64) + j2t,
            beta: Frac::int(1 + delta_pair(j1, j2, t) as i64) - j1t,
            prefactor: Cyc::one(ord),
        }),
        BiProductKind::StarLeft => ((j1 + j2) % t == 0).then(|| ResidueSpec {
            alpha: wt - 1 + Frac::int(delta_r(j2, t) as i64) + j2t,
            beta: Frac::ONE - j1t,
            prefactor: Cyc::one(ord),
        }),
        BiProductKind::StarRight => (j2 == 0).then(|| ResidueSpec {
            alpha: wt - 1,
            beta: Frac::ONE - j1t,
            prefactor: phase(j1, t, -1),
        }),
    }
}

/// The two products of the twisted Zhu algebra construction on V.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GProductKind {
    /// u ∘_g v, spanning O_g(V) together with the (L(−1)+L(0)) image.
    Circ,
    /// u ∗_g v, the algebra product.
    Star,
}

/// Exponent table of ∘_g and ∗_g for homogeneous u ∈ V^r of weight wt.
pub fn g_product_spec(t: u32, wt: Frac, r: u32, kind: GProductKind) -> Option<ResidueSpec> {
    let ord = 2 * t;
    match kind {
        GProductKind::Circ => Some(ResidueSpec {
            alpha: wt - 1 + Frac::int(delta_r(r, t) as i64) + Frac::new(r as i64, t as i64),
            beta: Frac::int(1 + delta_r(r, t) as i64),
            prefactor: Cyc::one(ord),
        }),
        GProductKind::Star => (r % t == 0).then(|| ResidueSpec {
            alpha: wt,
            beta: Frac::ONE,
            prefactor: Cyc::one(ord),
        }),
    }
}

/// u ∘_g v on V, extended linearly over the homogeneous components of u.
pub fn circ_g(bk: &Backend, g: Twist, u: &Vector, v: &Vector) -> Vector {
    apply_g(bk, g, u, v, GProductKind::Circ)
}

/// u ∗_g v on V; zero on components of u outside V⁰.
pub fn star_g(bk: &Backend, g: Twist, u: &Vector, v: &Vector) -> Vector {
    apply_g(bk, g, u, v, GProductKind::Star)
}

fn apply_g(bk: &Backend, g: Twist, u: &Vector, v: &Vector, kind: GProductKind) -> Vector {
    let mut out = Vector::zero();
    for (wt, r, _, comp) in homogeneous_components(u, g, g) {
        if let Some(spec) = g_product_spec(bk.t(), wt, r, kind) {
            out.add_assign(&residue_product(bk, &spec, &comp, v, ModuleId::Vacuum));
        }
    }
    out
}

/// u ∘_{g₁g₂,g₂} w₁, extended linearly over components of u.
pub fn circ_bi(bk: &Backend, tp: TwistPair, u: &Vector, w1: &Vector, m1: ModuleId) -> Vector {
    apply_bi(bk, tp, u, w1, m1, BiProductKind::Circ)
}

/// u ∗_{g₁g₂,g₂} w₁ (left action; zero unless j₁+j₂ ≡ 0 mod T).
pub fn star_left(bk: &Backend, tp: TwistPair, u: &Vector, w1: &Vector, m1: ModuleId) -> Vector {
    apply_bi(bk, tp, u, w1, m1, BiProductKind::StarLeft)
}

/// w₁ ∗_{g₂,g₁g₂} u (right action; zero unless j₂ = 0).
pub fn star_right(bk: &Backend, tp: TwistPair, w1: &Vector, u: &Vector, m1: ModuleId) -> Vector {
    apply_bi(bk, tp, u, w1, m1, BiProductKind::StarRight)
}

fn apply_bi(
    bk: &Backend,
    tp: TwistPair,
    u: &Vector,
    w1: &Vector,
    m1: ModuleId,
    kind: BiProductKind,
) -> Vector {
    debug_assert_eq!(m1.twist(), tp.g1, "M¹ must be g₁-twisted");
    let mut out = Vector::zero();
    for (wt, j1, j2, comp) in homogeneous_components(u, tp.g1, tp.g2) {
        if let Some(spec) = bi_product_spec(tp, wt, j1, j2, kind) {
            out.add_assign(&residue_product(bk, &spec, &comp, w1, m1));
        }
    }
    out
}

/// The generalized-exponent family Res_z (1+z)^{α+n} / z^{β+m} Y(u,z)w₁
/// with (α, β) the ∘-exponents; for m ≥ n ≥ 0 these all lie in O′.
pub fn circ_bi_shifted(
    bk: &Backend,
    tp: TwistPair,
    u: &Vector,
    w1: &Vector,
    m1: ModuleId,
    n: i64,
    m: i64,
) -> Vector {
    let mut out = Vector::zero();
    for (wt, j1, j2, comp) in homogeneous_components(u, tp.g1, tp.g2) {
        let mut spec = bi_product_spec(tp, wt, j1, j2, BiProductKind::Circ).unwrap();
        spec.alpha = spec.alpha + n;
        spec.beta = spec.beta + m;
        out.add_assign(&residue_product(bk, &spec, &comp, w1, m1));
    }
    out
}

/// Independent forms of the untwisted bimodule products (α = wt u with
/// β ∈ {1,2}, and α = wt u − 1 with β = 1), written as direct mode sums.
/// Used as the reference side of the specialization checks.
pub mod untwisted_forms {
    use super::*;
    use num_traits::Zero;

    fn mode_sum(bk: &Backend, u: &Vector, w1: &Vector, alpha: Frac, beta: i64) -> Vector {
        if u.is_zero() || w1.is_zero() {
            return Vector::zero();
        }
        let wt = u.homogeneous_deg().unwrap();
        let imax = (wt + w1.max_deg().unwrap() - 1 + Frac::int(beta)).floor();
        let mut out = Vector::zero();
        for i in 0..=imax.max(-1) {
            let c = binomial_frac(alpha, i as u64);
            if c.is_zero() {
                continue;
            }
            out.add_scaled_rat(
                &bk.mode_action(u, Frac::int(i - beta), w1, ModuleId::Vacuum),
                &c,
            );
        }
        out
    }

    /// Res (1+z)^{wt u} / z² Y(u,z)w₁.
    pub fn circ(bk: &Backend, u: &Vector, w1: &Vector) -> Vector {
        let wt = u.homogeneous_deg().unwrap();
        mode_sum(bk, u, w1, wt, 2)
    }

    /// Res (1+z)^{wt u} / z Y(u,z)w₁.
    pub fn star(bk: &Backend, u: &Vector, w1: &Vector) -> Vector {
        let wt = u.homogeneous_deg().unwrap();
        mode_sum(bk, u, w1, wt, 1)
    }

    /// Res (1+z)^{wt u − 1} / z Y(u,z)w₁.
    pub fn star_opposite(bk: &Backend, u: &Vector, w1: &Vector) -> Vector {
        let wt = u.homogeneous_deg().unwrap();
        mode_sum(bk, u, w1, wt - 1, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_states_up_to, FockState, State};
    use crate::scalar::rat;

    fn bk() -> Backend {
        Backend::new()
    }

    fn fock(bk: &Backend, parts: &[i64]) -> Vector {
        Vector::single(State::Fock(FockState::new(parts.to_vec())), bk.one())
    }

    #[test]
    fn delta_tables() {
        assert_eq!(delta_r(0, 2), 1);
        assert_eq!(delta_r(2, 2), 1);
        assert_eq!(delta_r(1, 2), 0);
        assert_eq!(delta_pair(0, 0, 2), 1);
        assert_eq!(delta_pair(1, 1, 2), 1);
        assert_eq!(delta_pair(1, 1, 3), 0);
        for t in [2u32, 3, 4, 6] {
            for j2 in 0..t {
                assert_eq!(delta_pair(0, j2, t), delta_r(j2, t));
            }
        }
    }

    #[test]
    fn vacuum_star_is_identity() {
        let bk = bk();
        let tp = TwistPair::new(2, Twist::Id, Twist::Theta);
        for parts in [&[][..], &[1][..], &[2, 1][..]] {
            let w1 = fock(&bk, parts);
            assert_eq!(star_left(&bk, tp, &bk.vacuum(), &w1, ModuleId::Vacuum), w1);
            assert_eq!(star_g(&bk, Twist::Theta, &bk.vacuum(), &w1), w1);
        }
    }

    #[test]
    fn zero_branches() {
        let bk = bk();
        let a = bk.generator();
        let w1 = fock(&bk, &[2]);
        // (1,θ): a ∈ V^{(0,1)}, j₁+j₂ = 1 ≢ 0 → left star vanishes
        let tp = TwistPair::new(2, Twist::Id, Twist::Theta);
        assert!(star_left(&bk, tp, &a, &w1, ModuleId::Vacuum).is_zero());
        // j₂ = 1 ≠ 0 → right star vanishes
        assert!(star_right(&bk, tp, &w1, &a, ModuleId::Vacuum).is_zero());
        // and ∗_θ on V vanishes off V⁰
        assert!(star_g(&bk, Twist::Theta, &a, &w1).is_zero());
    }

    #[test]
    fn star_on_v_matches_direct_expansion() {
        let bk = bk();
        // a ∗ a with g = 1: Σ C(1,i) a_{i−1} a = a_{−1}a + a₀a = a_{−1}a_{−1}𝟏
        let a = bk.generator();
        let out = star_g(&bk, Twist::Id, &a, &a);
        assert_eq!(out, fock(&bk, &[1, 1]));
    }

    #[test]
    fn circ_theta_of_generator_against_vacuum() {
        let bk = bk();
        // circ_θ(a, 𝟏): α = 1/2, β = 1; only the i = 0 term survives on 𝟏,
        // so the value is a itself.
        let a = bk.generator();
        let out = circ_g(&bk, Twist::Theta, &a, &bk.vacuum());
        assert_eq!(out, a);
    }

    #[test]
    fn circ_theta_of_generator_squared() {
        let bk = bk();
        // a ∘_θ a = a_{−1}a + C(1/2,2) a₁a = a² − (1/8)𝟏
        let a = bk.generator();
        let out = circ_g(&bk, Twist::Theta, &a, &a);
        let mut expect = fock(&bk, &[1, 1]);
        expect.add_scaled_rat(&bk.vacuum(), &rat(-1, 8));
        assert_eq!(out, expect);
    }

    #[test]
    fn circ_bi_of_vacuum_is_zero_row() {
        let bk = bk();
        let tp = TwistPair::new(2, Twist::Id, Twist::Theta);
        for parts in [&[1][..], &[2, 1][..]] {
            let w1 = fock(&bk, parts);
            assert!(circ_bi(&bk, tp, &bk.vacuum(), &w1, ModuleId::Vacuum).is_zero());
        }
    }

    #[test]
    fn weight_bookkeeping_per_term() {
        let bk = bk();
        let tp = TwistPair::new(2, Twist::Theta, Twist::Theta);
        let states = crate::fock::twisted_states_up_to(Frac::int(2));
        for u_parts in [&[1][..], &[2][..], &[1, 1][..], &[2, 1][..]] {
            let u = fock(&bk, u_parts);
            let wt = u.homogeneous_deg().unwrap();
            let (j1, j2) = crate::fock::bigrade(&u, tp.g1, tp.g2).unwrap();
            let shift = Frac::int(delta_pair(j1, j2, 2) as i64) - Frac::new(j1 as i64, 2);
            for s in &states {
                let w1 = Vector::single(s.clone(), bk.one());
                let out = circ_bi(&bk, tp, &u, &w1, ModuleId::ThetaTwisted);
                let bound = wt + s.deg() + shift;
                for (t, _) in out.iter() {
                    assert!(t.deg() <= bound, "term {} exceeds bound {}", t, bound);
                }
            }
        }
    }

    #[test]
    fn products_are_bilinear() {
        let bk = bk();
        let tp = TwistPair::new(2, Twist::Id, Twist::Theta);
        let u1 = fock(&bk, &[2, 1]);
        let u2 = fock(&bk, &[1]);
        let w1 = fock(&bk, &[1, 1]);
        let w2 = fock(&bk, &[3]);
        let c = bk.cyc_rat(rat(3, 5));
        // linear in u (across mixed grades) and in w
        let lhs = circ_bi(&bk, tp, &u1.add(&u2.scaled(&c)), &w1, ModuleId::Vacuum);
        let mut rhs = circ_bi(&bk, tp, &u1, &w1, ModuleId::Vacuum);
        rhs.add_scaled(&circ_bi(&bk, tp, &u2, &w1, ModuleId::Vacuum), &c);
        assert_eq!(lhs, rhs);
        let lhs = star_right(&bk, tp, &w1.add(&w2.scaled(&c)), &u2, ModuleId::Vacuum);
        let mut rhs = star_right(&bk, tp, &w1, &u2, ModuleId::Vacuum);
        rhs.add_scaled(&star_right(&bk, tp, &w2, &u2, ModuleId::Vacuum), &c);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fz_specialization_coefficient_level() {
        let bk = bk();
        let tp = TwistPair::new(2, Twist::Id, Twist::Id);
        let states = fock_states_up_to(4);
        for us in &states {
            let u = Vector::single(us.clone(), bk.one());
            for ws in &states {
                let w1 = Vector::single(ws.clone(), bk.one());
                assert_eq!(
                    circ_bi(&bk, tp, &u, &w1, ModuleId::Vacuum),
                    untwisted_forms::circ(&bk, &u, &w1)
                );
                assert_eq!(
                    star_left(&bk, tp, &u, &w1, ModuleId::Vacuum),
                    untwisted_forms::star(&bk, &u, &w1)
                );
                assert_eq!(
                    star_right(&bk, tp, &w1, &u, ModuleId::Vacuum),
                    untwisted_forms::star_opposite(&bk, &u, &w1)
                );
            }
        }
    }

    #[test]
    fn dlm_specialization_coefficient_level() {
        let bk = bk();
        // M¹ = V, g₂ = θ: the bimodule products collapse to ∘_θ / ∗_θ.
        let tp = TwistPair::new(2, Twist::Id, Twist::Theta);
        let states = fock_states_up_to(4);
        for us in &states {
            let u = Vector::single(us.clone(), bk.one());
            for ws in &states {
                let w1 = Vector::single(ws.clone(), bk.one());
                assert_eq!(
                    circ_bi(&bk, tp, &u, &w1, ModuleId::Vacuum),
                    circ_g(&bk, Twist::Theta, &u, &w1)
                );
                assert_eq!(
                    star_left(&bk, tp, &u, &w1, ModuleId::Vacuum),
                    star_g(&bk, Twist::Theta, &u, &w1)
                );
            }
        }
    }
}
