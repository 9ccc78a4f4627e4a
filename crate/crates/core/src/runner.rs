//! Task orchestration: builds the truncated objects a scenario asks
//! for, runs the verification battery, and assembles the report.
//!
//! Every expected-zero reduction that fails at the scenario cap N is
//! retried against the spans rebuilt at N+2 before it is reported as a
//! failure: truncated reductions certify membership, never exclusion.

use crate::bimodule::{build_bimodule, relation_basis, Bimodule};
use crate::fock::{fock_states_up_to, states_up_to, Backend, ModuleId, State, Twist, Vector};
use crate::fusion::{hom_space, pi_of_intertwiner, tensor_over_algebra};
use crate::intertwiner::{
    check_associativity, check_o_i_kills_relations, check_o_i_product_rules,
    module_as_intertwiner, s_i_image, straighten_check,
};
use crate::oracle;
use crate::products::{
    circ_bi, circ_bi_shifted, circ_g, delta_pair, star_g, star_left, star_right,
    untwisted_forms, TwistPair,
};
use crate::report::{
    BimoduleReport, CheckRecord, FusionReport, Report, ScenarioEcho, TaskReport, ZhuReport,
    SCHEMA_VERSION,
};
use crate::scalar::Frac;
use crate::scenario::{Scenario, Task};
use crate::zhu::{bottom_action, build_zhu, ZhuAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

/// Shared backend plus caches of built quotients, keyed by cap so the
/// retry-at-N+2 policy reuses work.
pub struct Engine {
    pub bk: Backend,
    zhu_cache: RefCell<BTreeMap<(Twist, i64), Rc<ZhuAlgebra>>>,
    bim_cache: RefCell<BTreeMap<(Twist, Twist, ModuleId, i64), Rc<Bimodule>>>,
}

impl Engine {
    pub fn new() -> Engine {
        Engine {
            bk: Backend::new(),
            zhu_cache: RefCell::new(BTreeMap::new()),
            bim_cache: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn zhu(&self, g: Twist, cap: i64) -> Rc<ZhuAlgebra> {
        if let Some(z) = self.zhu_cache.borrow().get(&(g, cap)) {
            return z.clone();
        }
        let z = Rc::new(build_zhu(&self.bk, g, cap));
        self.zhu_cache.borrow_mut().insert((g, cap), z.clone());
        z
    }

    pub fn bim(&self, tp: TwistPair, m1: ModuleId, cap: i64) -> Rc<Bimodule> {
        let key = (tp.g1, tp.g2, m1, cap);
        if let Some(b) = self.bim_cache.borrow().get(&key) {
            return b.clone();
        }
        let b = Rc::new(build_bimodule(&self.bk, tp, m1, cap));
        self.bim_cache.borrow_mut().insert(key, b.clone());
        b
    }
}

impl Default for Engine {
    fn default() -> Engine {
        Engine::new()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum RelationSpan {
    OPrime,
    Full,
}

/// Membership certificate with retry: reduce `elem` at `cap`; when the
/// residual is nonzero (or the support exceeds the cap), rebuild at
/// cap+2 and try once more. Returns the cap used.
pub fn certify_zero(
    engine: &Engine,
    tp: TwistPair,
    m1: ModuleId,
    cap: i64,
    elem: &Vector,
    span: RelationSpan,
) -> (i64, Result<(), String>) {
    for (attempt, used_cap) in [cap, cap + 2].into_iter().enumerate() {
        let bim = engine.bim(tp, m1, used_cap);
        let reduced = match span {
            RelationSpan::OPrime => bim.reduce_oprime(elem),
            RelationSpan::Full => bim.try_reduce(elem),
        };
        match reduced {
            Some(r) if r.is_zero() => return (used_cap, Ok(())),
            Some(r) if attempt == 1 => {
                return (used_cap, Err(format!("residual after retry: {}", r)))
            }
            None if attempt == 1 => {
                return (used_cap, Err("support exceeds retry cap".to_string()))
            }
            _ => {}
        }
    }
    unreachable!()
}

/// Aggregates a sweep of same-named instances into one check record.
struct Sweep {
    name: String,
    cap: i64,
    count: usize,
    failures: Vec<String>,
}

impl Sweep {
    fn new(name: &str, cap: i64) -> Sweep {
        Sweep {
            name: name.to_string(),
            cap,
            count: 0,
            failures: Vec::new(),
        }
    }

    fn add(&mut self, instance: &str, r: Result<(), String>) {
        self.count += 1;
        if let Err(e) = r {
            self.failures.push(format!("{}: {}", instance, e));
        }
    }

    fn finish(self) -> CheckRecord {
        CheckRecord {
            name: self.name,
            instance: format!("{} instances", self.count),
            cap: self.cap,
            pass: self.failures.is_empty(),
            residual: if self.failures.is_empty() {
                None
            } else {
                Some(self.failures[..self.failures.len().min(3)].join("; "))
            },
        }
    }
}

fn eq_or(msg: String, ok: bool) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

/// Random mode index in r/T + ℤ within a small window.
fn random_mode(rng: &mut ChaCha8Rng, grade: u32, t: u32) -> Frac {
    let k = rng.gen_range(-3i64..=3);
    Frac::int(k) + Frac::new(grade as i64, t as i64)
}

/// The twisted Jacobi commutator identity on seeded random triples,
/// on both modules.
pub fn jacobi_checks(engine: &Engine, seed: u64, per_module: usize, max_wt: i64) -> Vec<CheckRecord> {
    let bk = &engine.bk;
    let v_states: Vec<State> = fock_states_up_to(max_wt);
    let mut records = Vec::new();
    for module in [ModuleId::Vacuum, ModuleId::ThetaTwisted] {
        let w_states = states_up_to(module, Frac::int(max_wt));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (module as u64).wrapping_add(1));
        let mut sweep = Sweep::new("twisted-jacobi-commutator", max_wt);
        for _ in 0..per_module {
            let us = &v_states[rng.gen_range(0..v_states.len())];
            let vs = &v_states[rng.gen_range(0..v_states.len())];
            let ws = &w_states[rng.gen_range(0..w_states.len())];
            let gu = us.as_fock().unwrap().grade(module.twist());
            let gv = vs.as_fock().unwrap().grade(module.twist());
            let m_idx = random_mode(&mut rng, gu, bk.t());
            let n_idx = random_mode(&mut rng, gv, bk.t());
            let u = Vector::single(us.clone(), bk.one());
            let v = Vector::single(vs.clone(), bk.one());
            let w = Vector::single(ws.clone(), bk.one());
            let r = oracle::commutator_check(bk, &u, m_idx, &v, n_idx, &w, module);
            sweep.add(
                &format!("{} [u={},v={},w={},m={},n={}]", module.label(), us, vs, ws, m_idx, n_idx),
                r,
            );
        }
        let mut rec = sweep.finish();
        rec.instance = format!("{} on {} (seed {})", rec.instance, module.label(), seed);
        records.push(rec);
    }
    records
}

/// The bottom module matching a twist.
fn bottom_module(g: Twist) -> ModuleId {
    match g {
        Twist::Id => ModuleId::Vacuum,
        Twist::Theta => ModuleId::ThetaTwisted,
    }
}

/// Zhu-algebra battery for one twist: unit, centrality of ω,
/// associativity, the odd-part collapse, the bottom-level homomorphism,
/// and truncation stability.
pub fn zhu_checks(engine: &Engine, g: Twist, cap: i64) -> Vec<CheckRecord> {
    let bk = &engine.bk;
    let z = engine.zhu(g, cap);
    let reps = z.representatives();
    let mut records = Vec::new();

    let mut unit = Sweep::new(&format!("thm-2-10-unit[g={}]", g), cap);
    for y in &reps {
        let yv = Vector::single(y.clone(), bk.one());
        let got = z.product(bk, &bk.vacuum(), &yv);
        unit.add(&y.to_string(), eq_or(format!("1*{} = {}", y, got), got == z.reduce(&yv)));
    }
    records.push(unit.finish());

    let mut center = Sweep::new(&format!("thm-2-10-center[g={}]", g), cap);
    for y in &reps {
        if y.deg() + Frac::int(2) > Frac::int(cap) {
            continue;
        }
        let yv = Vector::single(y.clone(), bk.one());
        let lhs = z.product(bk, &bk.omega(), &yv);
        let rhs = z.product(bk, &yv, &bk.omega());
        center.add(&y.to_string(), eq_or(format!("[ω,{}] ≠ 0", y), lhs == rhs));
    }
    records.push(center.finish());

    let mut assoc = Sweep::new(&format!("thm-2-10-assoc[g={}]", g), cap);
    for x in &reps {
        for y in &reps {
            for w in &reps {
                if x.deg() + y.deg() + w.deg() > Frac::int(cap) {
                    continue;
                }
                let (xv, yv, wv) = (
                    Vector::single(x.clone(), bk.one()),
                    Vector::single(y.clone(), bk.one()),
                    Vector::single(w.clone(), bk.one()),
                );
                let lhs = z.product(bk, &z.product(bk, &xv, &yv), &wv);
                let rhs = z.product(bk, &xv, &z.product(bk, &yv, &wv));
                assoc.add(
                    &format!("({},{},{})", x, y, w),
                    eq_or("associator nonzero".to_string(), lhs == rhs),
                );
            }
        }
    }
    records.push(assoc.finish());

    if g == Twist::Theta {
        let mut odd = Sweep::new("prop-2-9-odd-collapse", cap);
        for s in fock_states_up_to(cap - 1) {
            if s.as_fock().unwrap().grade(Twist::Theta) == 1 {
                let v = Vector::single(s.clone(), bk.one());
                let red = z.reduce(&v);
                let r = if red.is_zero() {
                    Ok(())
                } else {
                    // retry at cap + 2
                    let z2 = engine.zhu(g, cap + 2);
                    let red2 = z2.reduce(&v);
                    eq_or(format!("residual {}", red2), red2.is_zero())
                };
                odd.add(&s.to_string(), r);
            }
        }
        records.push(odd.finish());
    }

    let m = bottom_module(g);
    let b = bk.bottom(m);
    let mut hom = Sweep::new(&format!("thm-2-11-bottom-hom[g={}]", g), cap);
    let states = fock_states_up_to(cap);
    for us in &states {
        let u = Vector::single(us.clone(), bk.one());
        for vs in &states {
            let v = Vector::single(vs.clone(), bk.one());
            let lhs = bottom_action(bk, &u, &bottom_action(bk, &v, &b, m), m);
            let rhs = bottom_action(bk, &star_g(bk, g, &u, &v), &b, m);
            hom.add(
                &format!("({},{})", us, vs),
                eq_or("o(u)o(v) ≠ o(u∗v)".to_string(), lhs == rhs),
            );
        }
    }
    records.push(hom.finish());

    let mut vanish = Sweep::new(&format!("thm-2-11-o-vanishes[g={}]", g), cap);
    for row in relation_basis(&z.q) {
        let img = bottom_action(bk, &row, &b, m);
        vanish.add(
            &row.to_string(),
            eq_or(format!("o(relation) = {}", img), img.is_zero()),
        );
    }
    records.push(vanish.finish());

    let z_next = engine.zhu(g, cap + 1);
    let stable = interior_layers_match(&z.layer_dims(), &z_next.layer_dims(), Frac::int(cap - 2));
    records.push(CheckRecord::from_result(
        &format!("zhu-filtration-stable[g={}]", g),
        &format!("caps {} vs {}", cap, cap + 1),
        cap,
        eq_or("interior layer dims moved".to_string(), stable),
    ));

    records
}

/// Layers up to `upto` agree between two layer-dimension tables.
pub fn interior_layers_match(
    a: &[(Frac, usize)],
    b: &[(Frac, usize)],
    upto: Frac,
) -> bool {
    let take = |v: &[(Frac, usize)]| -> Vec<(Frac, usize)> {
        v.iter().copied().filter(|(d, _)| *d <= upto).collect()
    };
    take(a) == take(b)
}

/// Bimodule battery: relation sanity, the bimodule axioms of the two
/// actions, and the containment lemmas with retry.
pub fn bimodule_checks(engine: &Engine, tp: TwistPair, m1: ModuleId, cap: i64) -> Vec<CheckRecord> {
    let bk = &engine.bk;
    let bim = engine.bim(tp, m1, cap);
    let cap_f = Frac::int(cap);
    let mut records = Vec::new();

    let mut sanity = Sweep::new("bim-relations-vanish", cap);
    for row in relation_basis(&bim.q) {
        let red = bim.reduce(&row);
        sanity.add(&row.to_string(), eq_or("nonzero".into(), red.is_zero()));
    }
    records.push(sanity.finish());

    let reps = bim.representatives();
    let left_reps = bim.left.representatives();
    let right_reps = bim.right.representatives();

    let mut unit = Sweep::new("thm-3-6-unit", cap);
    for x in &reps {
        let xv = Vector::single(x.clone(), bk.one());
        let l = bim.act_left(bk, &bk.vacuum(), &xv);
        let r = bim.act_right(bk, &xv, &bk.vacuum());
        unit.add(
            &x.to_string(),
            eq_or("unit failed".into(), l == bim.reduce(&xv) && r == bim.reduce(&xv)),
        );
    }
    records.push(unit.finish());

    let mut lassoc = Sweep::new("thm-3-6-left-assoc", cap);
    for a in &left_reps {
        for b in &left_reps {
            if a.deg() + b.deg() > cap_f {
                continue;
            }
            let (av, bv) = (
                Vector::single(a.clone(), bk.one()),
                Vector::single(b.clone(), bk.one()),
            );
            let ab = bim.left.product(bk, &av, &bv);
            for x in &reps {
                if a.deg() + b.deg() + x.deg() > cap_f {
                    continue;
                }
                let xv = Vector::single(x.clone(), bk.one());
                let lhs = bim.act_left(bk, &ab, &xv);
                let rhs = bim.act_left(bk, &av, &bim.act_left(bk, &bv, &xv));
                lassoc.add(
                    &format!("({},{},{})", a, b, x),
                    eq_or("x∗y action mismatch".into(), lhs == rhs),
                );
            }
        }
    }
    records.push(lassoc.finish());

    let mut rassoc = Sweep::new("thm-3-6-right-assoc", cap);
    for a in &right_reps {
        for b in &right_reps {
            if a.deg() + b.deg() > cap_f {
                continue;
            }
            let (av, bv) = (
                Vector::single(a.clone(), bk.one()),
                Vector::single(b.clone(), bk.one()),
            );
            let ab = bim.right.product(bk, &av, &bv);
            for x in &reps {
                if a.deg() + b.deg() + x.deg() > cap_f {
                    continue;
                }
                let xv = Vector::single(x.clone(), bk.one());
                let lhs = bim.act_right(bk, &xv, &ab);
                let rhs = bim.act_right(bk, &bim.act_right(bk, &xv, &av), &bv);
                rassoc.add(
                    &format!("({},{},{})", x, a, b),
                    eq_or("right action mismatch".into(), lhs == rhs),
                );
            }
        }
    }
    records.push(rassoc.finish());

    let mut compat = Sweep::new("thm-3-6-compat", cap);
    for a in &left_reps {
        for b in &right_reps {
            for x in &reps {
                if a.deg() + b.deg() + x.deg() > cap_f {
                    continue;
                }
                let (av, bv, xv) = (
                    Vector::single(a.clone(), bk.one()),
                    Vector::single(b.clone(), bk.one()),
                    Vector::single(x.clone(), bk.one()),
                );
                let lhs = bim.act_right(bk, &bim.act_left(bk, &av, &xv), &bv);
                let rhs = bim.act_left(bk, &av, &bim.act_right(bk, &xv, &bv));
                compat.add(
                    &format!("({},{},{})", a, x, b),
                    eq_or("(a·x)·b ≠ a·(x·b)".into(), lhs == rhs),
                );
            }
        }
    }
    records.push(compat.finish());

    let v_states = fock_states_up_to(cap);
    let m1_states = states_up_to(m1, cap_f);

    let mut l31 = Sweep::new("lemma-3-1-family", cap);
    for us in &v_states {
        let f = us.as_fock().unwrap();
        let (j1, j2) = (f.grade(tp.g1), f.grade(tp.g2));
        let shift = Frac::int(delta_pair(j1, j2, tp.t) as i64) - Frac::new(j1 as i64, tp.t as i64);
        let u = Vector::single(us.clone(), bk.one());
        for ws in &m1_states {
            for m in 0..=3i64 {
                if us.deg() + ws.deg() + shift + Frac::int(m) > cap_f {
                    continue;
                }
                let w1 = Vector::single(ws.clone(), bk.one());
                for n in 0..=m {
                    let elem = circ_bi_shifted(bk, tp, &u, &w1, m1, n, m);
                    if elem.is_zero() {
                        continue;
                    }
                    let (used, r) = certify_zero(engine, tp, m1, cap, &elem, RelationSpan::OPrime);
                    l31.add(&format!("u={},w1={},n={},m={} (cap {})", us, ws, n, m, used), r);
                }
            }
        }
    }
    records.push(l31.finish());

    let mut l32 = Sweep::new("lemma-3-2-left-star-preserves-oprime", cap);
    let mut l33 = Sweep::new("lemma-3-3-right-star-preserves-oprime", cap);
    for us in &v_states {
        let u = Vector::single(us.clone(), bk.one());
        let uf = us.as_fock().unwrap();
        let u_left = (uf.grade(tp.g1) + uf.grade(tp.g2)) % tp.t == 0;
        let u_right = uf.grade(tp.g2) == 0;
        for vs in &v_states {
            if us.deg() + vs.deg() + 1 > cap_f {
                continue;
            }
            let v = Vector::single(vs.clone(), bk.one());
            for ws in &m1_states {
                if us.deg() + vs.deg() + ws.deg() + 1 > cap_f {
                    continue;
                }
                let w1 = Vector::single(ws.clone(), bk.one());
                let cvw = circ_bi(bk, tp, &v, &w1, m1);
                if cvw.is_zero() {
                    continue;
                }
                if u_left {
                    let elem = star_left(bk, tp, &u, &cvw, m1);
                    if !elem.is_zero() {
                        let (used, r) =
                            certify_zero(engine, tp, m1, cap, &elem, RelationSpan::OPrime);
                        l32.add(&format!("({},{},{}) cap {}", us, vs, ws, used), r);
                    }
                }
                if u_right {
                    let elem = star_right(bk, tp, &cvw, &u, m1);
                    if !elem.is_zero() {
                        let (used, r) =
                            certify_zero(engine, tp, m1, cap, &elem, RelationSpan::OPrime);
                        l33.add(&format!("({},{},{}) cap {}", us, vs, ws, used), r);
                    }
                }
            }
        }
    }
    records.push(l32.finish());
    records.push(l33.finish());

    let mut l34 = Sweep::new("lemma-3-4-mixed-associativity", cap);
    for us in &v_states {
        let u = Vector::single(us.clone(), bk.one());
        for vs in &v_states {
            if us.deg() + vs.deg() > cap_f {
                continue;
            }
            let v = Vector::single(vs.clone(), bk.one());
            for ws in &m1_states {
                if us.deg() + vs.deg() + ws.deg() > cap_f {
                    continue;
                }
                let w1 = Vector::single(ws.clone(), bk.one());
                let lhs = star_right(bk, tp, &star_left(bk, tp, &u, &w1, m1), &v, m1);
                let rhs = star_left(bk, tp, &u, &star_right(bk, tp, &w1, &v, m1), m1);
                let elem = lhs.sub(&rhs);
                if elem.is_zero() {
                    continue;
                }
                let (used, r) = certify_zero(engine, tp, m1, cap, &elem, RelationSpan::OPrime);
                l34.add(&format!("({},{},{}) cap {}", us, vs, ws, used), r);
            }
        }
    }
    records.push(l34.finish());

    let mut l35 = Sweep::new("lemma-3-5-star-preserves-o", cap);
    for a_state in &v_states {
        let a = Vector::single(a_state.clone(), bk.one());
        for gen in relation_basis(&bim.q) {
            let s = gen.max_deg().unwrap();
            if a_state.deg() + s > cap_f {
                continue;
            }
            let left = star_left(bk, tp, &a, &gen, m1);
            if !left.is_zero() {
                let (used, r) = certify_zero(engine, tp, m1, cap, &left, RelationSpan::Full);
                l35.add(&format!("a={} left (cap {})", a_state, used), r);
            }
            let right = star_right(bk, tp, &gen, &a, m1);
            if !right.is_zero() {
                let (used, r) = certify_zero(engine, tp, m1, cap, &right, RelationSpan::Full);
                l35.add(&format!("a={} right (cap {})", a_state, used), r);
            }
        }
    }
    records.push(l35.finish());

    records
}

/// Specialization battery, applicable when M¹ = V (so g₁ = 1): the
/// bimodule products collapse to the classical untwisted forms when
/// g₂ = 1 and to the twisted Zhu products for any g₂.
pub fn specialization_checks(
    engine: &Engine,
    tp: TwistPair,
    m1: ModuleId,
    cap: i64,
) -> Vec<CheckRecord> {
    let bk = &engine.bk;
    assert_eq!(m1, ModuleId::Vacuum);
    let states = fock_states_up_to(cap);
    let mut records = Vec::new();

    let mut dlm = Sweep::new(&format!("specialize-dlm-exact[g2={}]", tp.g2), cap);
    for us in &states {
        let u = Vector::single(us.clone(), bk.one());
        for ws in &states {
            let w1 = Vector::single(ws.clone(), bk.one());
            let ok = circ_bi(bk, tp, &u, &w1, m1) == circ_g(bk, tp.g2, &u, &w1)
                && star_left(bk, tp, &u, &w1, m1) == star_g(bk, tp.g2, &u, &w1);
            dlm.add(
                &format!("({},{})", us, ws),
                eq_or("∘/∗-left deviate from the ∘_g/∗_g forms".into(), ok),
            );
        }
    }
    records.push(dlm.finish());

    // right action agrees with right multiplication in the quotient
    let z = engine.zhu(tp.g2, cap);
    let mut right = Sweep::new(&format!("specialize-dlm-right-action[g2={}]", tp.g2), cap);
    for ws in &states {
        for us in &states {
            if ws.deg() + us.deg() > Frac::int(cap) {
                continue;
            }
            let u = Vector::single(us.clone(), bk.one());
            let w1 = Vector::single(ws.clone(), bk.one());
            let diff = star_right(bk, tp, &w1, &u, m1).sub(&star_g(bk, tp.g2, &w1, &u));
            let r = match z.try_reduce(&diff) {
                Some(red) if red.is_zero() => Ok(()),
                _ => {
                    let z2 = engine.zhu(tp.g2, cap + 2);
                    match z2.try_reduce(&diff) {
                        Some(red) if red.is_zero() => Ok(()),
                        Some(red) => Err(format!("residual {}", red)),
                        None => Err("support exceeds retry cap".into()),
                    }
                }
            };
            right.add(&format!("({},{})", ws, us), r);
        }
    }
    records.push(right.finish());

    if tp.g2 == Twist::Id {
        let mut fz = Sweep::new("specialize-fz-exact", cap);
        for us in &states {
            let u = Vector::single(us.clone(), bk.one());
            for ws in &states {
                let w1 = Vector::single(ws.clone(), bk.one());
                let ok = circ_bi(bk, tp, &u, &w1, m1) == untwisted_forms::circ(bk, &u, &w1)
                    && star_left(bk, tp, &u, &w1, m1) == untwisted_forms::star(bk, &u, &w1)
                    && star_right(bk, tp, &w1, &u, m1)
                        == untwisted_forms::star_opposite(bk, &u, &w1);
                fz.add(
                    &format!("({},{})", us, ws),
                    eq_or("products deviate from the untwisted forms".into(), ok),
                );
            }
        }
        records.push(fz.finish());
    }

    // quotient-level agreement: layer dims and left-action structure
    // constants match the Zhu algebra of g₂
    let bim = engine.bim(tp, m1, cap);
    let dims_ok = bim.layer_dims() == z.layer_dims();
    let mut struct_ok = true;
    'outer: for x in bim.representatives() {
        let xv = Vector::single(x.clone(), bk.one());
        for us in &states {
            if us.deg() + x.deg() > Frac::int(cap) {
                continue;
            }
            let u = Vector::single(us.clone(), bk.one());
            if bim.act_left(bk, &u, &xv) != z.product(bk, &u, &xv) {
                struct_ok = false;
                break 'outer;
            }
        }
    }
    records.push(CheckRecord::from_result(
        &format!("specialize-quotient-match[g2={}]", tp.g2),
        "layer dims and structure constants",
        cap,
        eq_or("bimodule deviates from A_g(V)".into(), dims_ok && struct_ok),
    ));

    records
}

/// Intertwiner battery for the concrete handle I = Y_{M²} of type
/// (M²; V M²), available when M¹ = V and M² = M³.
pub fn intertwiner_checks(
    engine: &Engine,
    tp: TwistPair,
    m2: ModuleId,
    cap: i64,
    seed: u64,
) -> Vec<CheckRecord> {
    let bk = &engine.bk;
    let m1 = ModuleId::Vacuum;
    let iw = module_as_intertwiner(bk, m2);
    let bim = engine.bim(tp, m1, cap);
    let bottom = bk.bottom(m2);
    let mut records = Vec::new();

    // two-variable associativity on fixed plus seeded instances
    let mut assoc = Sweep::new("prop-2-13-associativity", cap);
    let fixed: Vec<(Vector, Vector)> = vec![
        (bk.vacuum(), bk.generator()),
        (bk.generator(), bk.generator()),
        (bk.omega(), bk.generator()),
        (bk.generator(), bk.omega()),
    ];
    for (u, w1) in &fixed {
        assoc.add(
            "fixed",
            check_associativity(bk, &iw, tp, u, w1, &bottom, 3),
        );
    }
    let small = fock_states_up_to(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x2d13));
    for _ in 0..8 {
        let us = &small[rng.gen_range(0..small.len())];
        let ws = &small[rng.gen_range(0..small.len())];
        let u = Vector::single(us.clone(), bk.one());
        let w1 = Vector::single(ws.clone(), bk.one());
        assoc.add(
            &format!("(u={},w1={})", us, ws),
            check_associativity(bk, &iw, tp, &u, &w1, &bottom, 2),
        );
    }
    records.push(assoc.finish());

    let mut l38 = Sweep::new("lemma-3-8-o-i-product-rules", cap);
    let states = fock_states_up_to(cap);
    for us in &states {
        let u = Vector::single(us.clone(), bk.one());
        for ws in &states {
            let w1 = Vector::single(ws.clone(), bk.one());
            l38.add(
                &format!("({},{})", us, ws),
                check_o_i_product_rules(bk, &iw, tp, &u, &w1, &bottom),
            );
        }
    }
    records.push(l38.finish());

    records.push(CheckRecord::from_result(
        "prop-3-9-o-i-kills-relations",
        &format!("full O span at cap {}", cap),
        cap,
        check_o_i_kills_relations(bk, &iw, &bim),
    ));

    let s_i = s_i_image(bk, &iw, &bim);
    records.push(CheckRecord::from_result(
        "prop-3-11-s-i-epimorphism",
        "rank, kernel containment, equivariance",
        cap,
        s_i.map_err(|e| e.to_string()).and_then(|rep| {
            eq_or(
                format!(
                    "rank {} (expected 1), kernel ok: {}, equivariant: {}",
                    rep.rank, rep.kernel_contains_relations, rep.induced_map_equivariant
                ),
                rep.rank == 1 && rep.kernel_contains_relations && rep.induced_map_equivariant,
            )
        }),
    ));

    let mut straighten = Sweep::new("lemma-3-14-straighten", cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x314));
    let pool = fock_states_up_to(3);
    let mut weight_zero_hits = 0usize;
    for _ in 0..60 {
        let us = &pool[rng.gen_range(0..pool.len())];
        let ws = &pool[rng.gen_range(0..pool.len())];
        let u = Vector::single(us.clone(), bk.one());
        let w1 = Vector::single(ws.clone(), bk.one());
        let p = rng.gen_range(-3i64..=2);
        let w1_grade = ws.as_fock().unwrap().grade(tp.g2);
        let n = random_mode(&mut rng, w1_grade, tp.t);
        // composite weight, for bookkeeping of the weight-zero case
        let jj = {
            let f = us.as_fock().unwrap();
            Frac::new(((f.grade(tp.g1) + f.grade(tp.g2)) % tp.t) as i64, tp.t as i64)
        };
        let comp_wt = (us.deg() - (Frac::int(p) + jj) - 1) + (ws.deg() - n - 1);
        if comp_wt == Frac::ZERO {
            weight_zero_hits += 1;
        }
        straighten.add(
            &format!("(u={},p={},w1={},n={})", us, p, ws, n),
            straighten_check(bk, &iw, tp, &u, p, &w1, n, &bottom),
        );
    }
    let mut rec = straighten.finish();
    rec.instance = format!("{}, {} weight-zero composites", rec.instance, weight_zero_hits);
    records.push(rec);

    records
}

/// A concrete intertwiner exists for a scenario exactly when M¹ = V and
/// M² = M³ (the module vertex operator).
pub fn concrete_intertwiner_available(s: &Scenario) -> bool {
    s.m1 == Some(ModuleId::Vacuum) && s.m2.is_some() && s.m2 == s.m3
}

/// Fusion-bound sweep over caps {2, 4, …, N}: reports the dimension
/// sequence, the stabilization flag, and the π(Y_M) data when a
/// concrete intertwiner exists.
pub fn fusion_sweep(
    engine: &Engine,
    tp: TwistPair,
    m1: ModuleId,
    m2: ModuleId,
    m3: ModuleId,
    top_cap: i64,
    with_pi: bool,
) -> (FusionReport, Vec<CheckRecord>) {
    let bk = &engine.bk;
    let mut caps: Vec<i64> = (1..=top_cap / 2).map(|k| 2 * k).collect();
    if caps.is_empty() {
        caps.push(top_cap.max(0));
    }
    let mut dims = Vec::new();
    let mut last = None;
    for &cap in &caps {
        let bim = engine.bim(tp, m1, cap);
        let tensor = tensor_over_algebra(bk, &bim, m2);
        let hom = hom_space(bk, &bim, &tensor, m3);
        dims.push(hom.dim);
        last = Some((bim, tensor, hom));
    }
    let stabilized = dims.len() >= 2 && dims[dims.len() - 1] == dims[dims.len() - 2];
    let value = *dims.last().unwrap();
    let mut report = FusionReport {
        caps: caps.clone(),
        dims: dims.clone(),
        stabilized,
        value,
        pi_nonzero: None,
        pi_equivariant: None,
        pi_in_hom_span: None,
        pi_coords: None,
        gap_above_lower_bound: None,
    };
    let mut checks = vec![CheckRecord::from_result(
        "fusion-bound-stabilized",
        &format!("dims {:?} over caps {:?}", dims, caps),
        top_cap,
        eq_or(format!("sequence {:?} has not stabilized", dims), stabilized),
    )];
    if with_pi {
        let (_, tensor, hom) = last.as_ref().unwrap();
        let iw = module_as_intertwiner(bk, m2);
        let pi = pi_of_intertwiner(bk, &iw, tensor, hom);
        report.pi_nonzero = Some(pi.nonzero);
        report.pi_equivariant = Some(pi.equivariant);
        report.pi_in_hom_span = Some(pi.in_hom_basis_span);
        report.pi_coords = Some(
            pi.coords
                .iter()
                .map(|(k, c)| (*k, crate::report::cyc_to_json(c)))
                .collect(),
        );
        report.gap_above_lower_bound = Some(value > 1);
        checks.push(CheckRecord::from_result(
            "fusion-pi-of-module-operator",
            "nonzero, equivariant, in solution span",
            top_cap,
            eq_or(
                format!(
                    "nonzero: {}, equivariant: {}, in span: {}",
                    pi.nonzero, pi.equivariant, pi.in_hom_basis_span
                ),
                pi.nonzero && pi.equivariant && pi.in_hom_basis_span,
            ),
        ));
    }
    (report, checks)
}

fn zhu_task(engine: &Engine, s: &Scenario) -> TaskReport {
    let mut twists = vec![s.g2, s.g1.compose(s.g2)];
    twists.sort();
    twists.dedup();
    let mut algebras = Vec::new();
    for g in twists {
        let z = engine.zhu(g, s.weight_cap);
        let z_next = engine.zhu(g, s.weight_cap + 1);
        let dims = z.layer_dims();
        let stable =
            interior_layers_match(&dims, &z_next.layer_dims(), Frac::int(s.weight_cap - 2));
        algebras.push(ZhuReport {
            g: g.to_string(),
            cap: s.weight_cap,
            layer_dims: dims
                .into_iter()
                .map(|(d, n)| (d.to_string(), n))
                .collect(),
            filtration_stable: stable,
        });
    }
    TaskReport::BuildZhu { algebras }
}

fn bimodule_task(engine: &Engine, s: &Scenario) -> TaskReport {
    let tp = TwistPair::new(s.t, s.g1, s.g2);
    let m1 = s.m1.expect("validated");
    let bim = engine.bim(tp, m1, s.weight_cap);
    TaskReport::BuildBimodule {
        bimodule: BimoduleReport {
            g1: s.g1.to_string(),
            g2: s.g2.to_string(),
            m1: m1.label().to_string(),
            cap: s.weight_cap,
            layer_dims_oprime: bim
                .layer_dims_oprime()
                .into_iter()
                .map(|(d, n)| (d.to_string(), n))
                .collect(),
            layer_dims_full: bim
                .layer_dims()
                .into_iter()
                .map(|(d, n)| (d.to_string(), n))
                .collect(),
            o_double_prime_enlarges: bim.o_double_prime_enlarges(),
        },
    }
}

/// Execution order: algebras, then the bimodule, then the verification
/// battery, then the fusion bound.
pub fn dependency_order(tasks: &[Task]) -> Vec<Task> {
    let rank = |t: &Task| match t {
        Task::BuildZhu => 0,
        Task::BuildBimodule => 1,
        Task::Verify => 2,
        Task::FusionBound => 3,
    };
    let mut ordered = tasks.to_vec();
    ordered.sort_by_key(rank);
    ordered
}

/// Run a validated scenario and assemble the report.
pub fn run(scenario: &Scenario) -> Report {
    let engine = Engine::new();
    let tp = TwistPair::new(scenario.t, scenario.g1, scenario.g2);
    let mut checks: Vec<CheckRecord> = Vec::new();
    let mut tasks = Vec::new();
    let mut timing: BTreeMap<String, u64> = BTreeMap::new();

    for task in dependency_order(&scenario.tasks) {
        let started = std::time::Instant::now();
        match task {
            Task::BuildZhu => tasks.push(zhu_task(&engine, scenario)),
            Task::BuildBimodule => tasks.push(bimodule_task(&engine, scenario)),
            Task::Verify => {
                let before = checks.len();
                checks.extend(jacobi_checks(
                    &engine,
                    scenario.seed,
                    60,
                    scenario.weight_cap.min(6),
                ));
                let mut twists = vec![scenario.g1, scenario.g2, scenario.g1.compose(scenario.g2)];
                twists.sort();
                twists.dedup();
                for g in twists {
                    checks.extend(zhu_checks(&engine, g, scenario.weight_cap));
                }
                let m1 = scenario.m1.expect("validated");
                checks.extend(bimodule_checks(&engine, tp, m1, scenario.weight_cap));
                if m1 == ModuleId::Vacuum {
                    checks.extend(specialization_checks(&engine, tp, m1, scenario.weight_cap));
                }
                if concrete_intertwiner_available(scenario) {
                    checks.extend(intertwiner_checks(
                        &engine,
                        tp,
                        scenario.m2.unwrap(),
                        scenario.weight_cap,
                        scenario.seed,
                    ));
                }
                let failed = checks[before..].iter().filter(|c| !c.pass).count();
                tasks.push(TaskReport::Verify {
                    checks_run: checks.len() - before,
                    checks_failed: failed,
                });
            }
            Task::FusionBound => {
                let (report, fusion_checks) = fusion_sweep(
                    &engine,
                    tp,
                    scenario.m1.expect("validated"),
                    scenario.m2.expect("validated"),
                    scenario.m3.expect("validated"),
                    scenario.weight_cap,
                    concrete_intertwiner_available(scenario),
                );
                checks.extend(fusion_checks);
                tasks.push(TaskReport::FusionBound { fusion: report });
            }
        }
        timing.insert(task.label().to_string(), started.elapsed().as_millis() as u64);
    }

    let all_passed = checks.iter().all(|c| c.pass);
    Report {
        schema_version: SCHEMA_VERSION,
        scenario: ScenarioEcho::from_scenario(scenario),
        tasks,
        checks,
        all_passed,
        timing_ms: timing,
    }
}

/// Sparse product table of a truncated Zhu algebra over its
/// representatives: rows (left, right, coordinates).
pub fn zhu_product_table(
    bk: &Backend,
    z: &ZhuAlgebra,
) -> Vec<(usize, usize, Vec<(usize, Vec<[String; 2]>)>)> {
    let reps = z.representatives();
    let index: BTreeMap<&State, usize> = reps.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = Vec::new();
    for (i, x) in reps.iter().enumerate() {
        for (j, y) in reps.iter().enumerate() {
            if x.deg() + y.deg() > Frac::int(z.cap) {
                continue;
            }
            let prod = z.product(
                bk,
                &Vector::single(x.clone(), bk.one()),
                &Vector::single(y.clone(), bk.one()),
            );
            if prod.is_zero() {
                continue;
            }
            let coords: Vec<(usize, Vec<[String; 2]>)> = prod
                .iter()
                .map(|(s, c)| (index[s], crate::report::cyc_to_json(c)))
                .collect();
            out.push((i, j, coords));
        }
    }
    out
}
