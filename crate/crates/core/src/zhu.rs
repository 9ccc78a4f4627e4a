//! Weight-truncated construction of the twisted Zhu algebra
//! A_g(V) = V/O_g(V), its product ∗_g, and the bottom-level action
//! o_M(u) = u_{wt u − 1}.
//!
//! O_g(V) is spanned by all u ∘_g v and (L(−1)+L(0))u; the truncation
//! O^{(N)} keeps the generators whose support fits in weight ≤ N. A
//! reduction to zero therefore certifies membership in O_g(V); a nonzero
//! residual is only evidence, and callers retry at N+2 before reporting
//! failure.

use crate::echelon::QuotientBasis;
use crate::fock::{
    fock_states_up_to, homogeneous_components, Backend, ModuleId, State, Twist, Vector,
};
use crate::products::{circ_g, delta_r, star_g};
use crate::scalar::Frac;

/// Truncated A_g(V) with its relation span in reduced echelon form.
pub struct ZhuAlgebra {
    pub g: Twist,
    pub cap: i64,
    pub q: QuotientBasis,
}

/// Generators of the truncated O_g(V) span, in deterministic order:
/// all u ∘_g v with wt u + wt v + δ(r) ≤ N over homogeneous basis pairs,
/// then (L(−1)+L(0))u for wt u ≤ N−1.
pub fn o_span_rows(bk: &Backend, g: Twist, cap: i64) -> Vec<Vector> {
    let states = fock_states_up_to(cap);
    let mut rows = Vec::new();
    for us in &states {
        let r = us.as_fock().unwrap().grade(g);
        let dr = delta_r(r, bk.t()) as i64;
        let u = Vector::single(us.clone(), bk.one());
        for vs in &states {
            if us.deg() + vs.deg() + Frac::int(dr) > Frac::int(cap) {
                continue;
            }
            let v = Vector::single(vs.clone(), bk.one());
            let row = circ_g(bk, g, &u, &v);
            if !row.is_zero() {
                rows.push(row);
            }
        }
    }
    for us in &states {
        if us.deg() > Frac::int(cap - 1) {
            continue;
        }
        let u = Vector::single(us.clone(), bk.one());
        let row = bk
            .l_op(-1, &u, ModuleId::Vacuum)
            .add(&bk.l_op(0, &u, ModuleId::Vacuum));
        if !row.is_zero() {
            rows.push(row);
        }
    }
    rows
}

/// Build the truncated quotient by deterministic row reduction.
pub fn build_zhu(bk: &Backend, g: Twist, cap: i64) -> ZhuAlgebra {
    let mut q = QuotientBasis::new(ModuleId::Vacuum, Frac::int(cap));
    for row in o_span_rows(bk, g, cap) {
        q.add_relation(&row);
    }
    ZhuAlgebra { g, cap, q }
}

impl ZhuAlgebra {
    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &Vector) -> Vector {
        self.q.reduce(v)
    }

    pub fn try_reduce(&self, v: &Vector) -> Option<Vector> {
        self.q.try_reduce(v)
    }

    /// The algebra product on representatives: reduce(x ∗_g y).
    /// Requires the raw product to stay within the cap.
    pub fn product(&self, bk: &Backend, x: &Vector, y: &Vector) -> Vector {
        self.reduce(&star_g(bk, self.g, x, y))
    }

    /// Representative states of the truncated quotient.
    pub fn representatives(&self) -> Vec<State> {
        self.q.representatives()
    }

    pub fn layer_dims(&self) -> Vec<(Frac, usize)> {
        self.q.layer_dims()
    }
}

/// The zero-mode action o_M(u) w₂ = u_{wt u − 1} w₂ on a bottom-level
/// vector, extended linearly over weight components of u.
pub fn bottom_action(bk: &Backend, u: &Vector, w2: &Vector, m: ModuleId) -> Vector {
    assert!(
        w2.iter().all(|(s, _)| s.deg() == Frac::ZERO),
        "bottom_action requires a bottom-level argument"
    );
    let mut out = Vector::zero();
    for (wt, _, _, comp) in homogeneous_components(u, Twist::Id, Twist::Id) {
        out.add_assign(&bk.mode_action(&comp, wt - 1, w2, m));
    }
    out
}
