//! The rank-1 free-boson backend: the vertex operator algebra V = M(1)
//! built on Heisenberg oscillators a_n with [a_m, a_n] = m·δ_{m+n,0},
//! its order-2 automorphism θ: a ↦ −a, the vacuum module, and the
//! θ-twisted Fock module with half-integer modes.
//!
//! Basis vectors are PBW monomials a_{−n₁}···a_{−n_k}·(highest vector)
//! with n₁ ≥ … ≥ n_k. The central operation is [`Backend::mode_action`]:
//! the mode u_n of an arbitrary u ∈ V acting on either module, computed
//! by structural recursion on the PBW length of u through the iterate
//! consequence of the twisted Jacobi identity,
//!
//!   (a_l v)_p w = Σ_{i≥0} (−1)^i C(l,i) [ a_{m+l−i} v_{p−m+i}
//!                 − (−1)^l v_{p−m+l−i} a_{m+i} ] w
//!                 − Σ_{i≥1} C(m,i) (a_{l+i} v)_{p−i} w,
//!
//! valid for any m in the mode class of the generator on the target
//! module. On the untwisted module m = 0 kills the correction sum and
//! the classical iterate formula remains; on the θ-twisted module
//! m = 1/2 and the correction sum produces the anomalous shifts (e.g.
//! the 1/16 in L(0) on the twisted bottom).

use crate::scalar::{binomial_frac, rat, Cyc, Frac, Rat};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Automorphism label. `Theta` is a ↦ −a, of order 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Twist {
    Id,
    Theta,
}

impl Twist {
    pub fn compose(self, other: Twist) -> Twist {
        if self == other {
            Twist::Id
        } else {
            Twist::Theta
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Twist::Id => write!(f, "id"),
            Twist::Theta => write!(f, "theta"),
        }
    }
}

/// The two shipped modules: V itself (untwisted vacuum module) and the
/// θ-twisted Fock module M(1)(θ).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ModuleId {
    Vacuum,
    ThetaTwisted,
}

impl ModuleId {
    pub fn twist(self) -> Twist {
        match self {
            ModuleId::Vacuum => Twist::Id,
            ModuleId::ThetaTwisted => Twist::Theta,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModuleId::Vacuum => "vacuum",
            ModuleId::ThetaTwisted => "theta-twisted",
        }
    }
}

/// Descriptor of a module: which backend space, its twist, and the
/// conformal weight of its bottom level. The twisted bottom weight is
/// not hard-coded; the backend computes it once from the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuleDescriptor {
    pub id: ModuleId,
    pub twist: Twist,
    pub bottom_weight: Frac,
}

/// PBW monomial a_{−n₁}···a_{−n_k}𝟏 of V, parts sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FockState {
    parts: Vec<i64>,
}

impl FockState {
    pub fn new(mut parts: Vec<i64>) -> FockState {
        assert!(parts.iter().all(|&p| p >= 1), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        FockState { parts }
    }

    pub fn vacuum() -> FockState {
        FockState { parts: vec![] }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// Eigenvalue exponent under a twist: 0 for the identity, PBW-length
    /// parity for θ.
    pub fn grade(&self, g: Twist) -> u32 {
        match g {
            Twist::Id => 0,
            Twist::Theta => (self.len() % 2) as u32,
        }
    }

    fn with_part(&self, p: i64) -> FockState {
        let mut parts = self.parts.clone();
        let pos = parts.partition_point(|&q| q >= p);
        parts.insert(pos, p);
        FockState { parts }
    }

    fn without_part(&self, p: i64) -> Option<(usize, FockState)> {
        let mult = self.parts.iter().filter(|&&q| q == p).count();
        if mult == 0 {
            return None;
        }
        let mut parts = self.parts.clone();
        let pos = parts.iter().position(|&q| q == p).unwrap();
        parts.remove(pos);
        Some((mult, FockState { parts }))
    }
}

/// PBW monomial a_{−r₁}···a_{−r_k}·b of the θ-twisted module, parts in
/// ℕ + 1/2 sorted descending; b is the bottom vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwistedState {
    parts: Vec<Frac>,
}

impl TwistedState {
    pub fn new(mut parts: Vec<Frac>) -> TwistedState {
        assert!(
            parts.iter().all(|p| p.den() == 2 && p.num() > 0),
            "twisted parts must be positive half-odd integers"
        );
        parts.sort_unstable_by(|a, b| b.cmp(a));
        TwistedState { parts }
    }

    pub fn bottom() -> TwistedState {
        TwistedState { parts: vec![] }
    }

    pub fn parts(&self) -> &[Frac] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Degree above the bottom level, an element of (1/2)ℕ.
    pub fn deg(&self) -> Frac {
        self.parts.iter().fold(Frac::ZERO, |acc, p| acc + *p)
    }

    fn with_part(&self, p: Frac) -> TwistedState {
        let mut parts = self.parts.clone();
        let pos = parts.partition_point(|&q| q >= p);
        parts.insert(pos, p);
        TwistedState { parts }
    }

    fn without_part(&self, p: Frac) -> Option<(usize, TwistedState)> {
        let mult = self.parts.iter().filter(|&&q| q == p).count();
        if mult == 0 {
            return None;
        }
        let mut parts = self.parts.clone();
        let pos = parts.iter().position(|&q| q == p).unwrap();
        parts.remove(pos);
        Some((mult, TwistedState { parts }))
    }
}

/// A basis vector of either module.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum State {
    Fock(FockState),
    Twisted(TwistedState),
}

impl State {
    /// Degree above the module bottom (= conformal weight for V states).
    pub fn deg(&self) -> Frac {
        match self {
            State::Fock(s) => Frac::int(s.weight()),
            State::Twisted(s) => s.deg(),
        }
    }

    pub fn module(&self) -> ModuleId {
        match self {
            State::Fock(_) => ModuleId::Vacuum,
            State::Twisted(_) => ModuleId::ThetaTwisted,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            State::Fock(s) => s.len(),
            State::Twisted(s) => s.len(),
        }
    }

    pub fn as_fock(&self) -> Option<&FockState> {
        match self {
            State::Fock(s) => Some(s),
            State::Twisted(_) => None,
        }
    }

    /// Parts as fractions, for uniform serialization.
    pub fn parts_frac(&self) -> Vec<Frac> {
        match self {
            State::Fock(s) => s.parts.iter().map(|&p| Frac::int(p)).collect(),
            State::Twisted(s) => s.parts.clone(),
        }
    }
}

impl Ord for State {
    /// Basis order: degree first, then lexicographic on the part lists.
    /// This fixes the deterministic column order of all row reductions.
    fn cmp(&self, other: &State) -> std::cmp::Ordering {
        self.deg().cmp(&other.deg()).then_with(|| match (self, other) {
            (State::Fock(a), State::Fock(b)) => a.parts.cmp(&b.parts),
            (State::Twisted(a), State::Twisted(b)) => a.parts.cmp(&b.parts),
            (State::Fock(_), State::Twisted(_)) => std::cmp::Ordering::Less,
            (State::Twisted(_), State::Fock(_)) => std::cmp::Ordering::Greater,
        })
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &State) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.parts_frac();
        if parts.is_empty() {
            return match self {
                State::Fock(_) => write!(f, "|1>"),
                State::Twisted(_) => write!(f, "|b>"),
            };
        }
        let body: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", body.join(","))
    }
}

/// Finite sparse linear combination of basis states with exact
/// cyclotomic coefficients. Zero coefficients are never stored; all
/// states of one vector belong to one module.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Vector {
    terms: BTreeMap<State, Cyc>,
}

impl Vector {
    pub fn zero() -> Vector {
        Vector::default()
    }

    pub fn single(s: State, c: Cyc) -> Vector {
        let mut v = Vector::zero();
        v.add_term(s, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, &Cyc)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &State) -> Option<&Cyc> {
        self.terms.get(s)
    }

    pub fn add_term(&mut self, s: State, c: Cyc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Vector) {
        for (s, c) in other.iter() {
            self.add_term(s.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Vector) {
        for (s, c) in other.iter() {
            self.add_term(s.clone(), c.neg());
        }
    }

    pub fn add_scaled(&mut self, other: &Vector, factor: &Cyc) {
        if factor.is_zero() {
            return;
        }
        for (s, c) in other.iter() {
            self.add_term(s.clone(), c.mul(factor));
        }
    }

    pub fn add_scaled_rat(&mut self, other: &Vector, factor: &Rat) {
        if factor.is_zero() {
            return;
        }
        for (s, c) in other.iter() {
            self.add_term(s.clone(), c.scale(factor));
        }
    }

    pub fn scaled(&self, factor: &Cyc) -> Vector {
        let mut v = Vector::zero();
        v.add_scaled(self, factor);
        v
    }

    pub fn scaled_rat(&self, factor: &Rat) -> Vector {
        let mut v = Vector::zero();
        v.add_scaled_rat(self, factor);
        v
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.sub_assign(other);
        v
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.add_assign(other);
        v
    }

    /// Largest degree among the support, if nonempty.
    pub fn max_deg(&self) -> Option<Frac> {
        self.terms.keys().map(|s| s.deg()).max()
    }

    /// All support degrees equal? Returns that degree.
    pub fn homogeneous_deg(&self) -> Option<Frac> {
        let mut it = self.terms.keys().map(|s| s.deg());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| format!("({}) {}", c, s))
            .collect();
        write!(f, "{}", body.join(" + "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct ModeKey {
    module: ModuleId,
    u: FockState,
    n: Frac,
    w: State,
}

/// The free-boson orbifold backend: T = 2, automorphisms {1, θ}.
///
/// Mode-action results are memoized per (monomial, mode, target state,
/// module); the cache is append-only and shared behind a mutex.
pub struct Backend {
    t: u32,
    theta_bottom_weight: Frac,
    memo: Mutex<HashMap<ModeKey, Arc<Vector>>>,
}

impl Backend {
    pub fn new() -> Backend {
        let mut bk = Backend {
            t: 2,
            theta_bottom_weight: Frac::ZERO,
            memo: Mutex::new(HashMap::new()),
        };
        // Bottom weight of the twisted module = o(ω)-eigenvalue on the
        // bottom state, read off from the recursion itself.
        let bottom = bk.bottom(ModuleId::ThetaTwisted);
        let l0 = bk.mode_action(&bk.omega(), Frac::int(1), &bottom, ModuleId::ThetaTwisted);
        let h = match l0.iter().next() {
            Some((s, c)) if *s == State::Twisted(TwistedState::bottom()) => {
                let r = c.as_rat().expect("bottom weight must be rational");
                assert_eq!(l0.len(), 1);
                Frac::new(
                    i64::try_from(r.numer().clone()).unwrap(),
                    i64::try_from(r.denom().clone()).unwrap(),
                )
            }
            _ => panic!("o(ω) does not act diagonally on the twisted bottom"),
        };
        bk.theta_bottom_weight = h;
        bk
    }

    /// Automorphism order of the backend (2).
    pub fn t(&self) -> u32 {
        self.t
    }

    /// Order of the cyclotomic coefficient field, 2T.
    pub fn cyc_order(&self) -> u32 {
        2 * self.t
    }

    pub fn one(&self) -> Cyc {
        Cyc::one(self.cyc_order())
    }

    pub fn cyc_rat(&self, r: Rat) -> Cyc {
        Cyc::from_rat(self.cyc_order(), r)
    }

    pub fn cyc_int(&self, n: i64) -> Cyc {
        Cyc::from_int(self.cyc_order(), n)
    }

    pub fn descriptor(&self, m: ModuleId) -> ModuleDescriptor {
        ModuleDescriptor {
            id: m,
            twist: m.twist(),
            bottom_weight: match m {
                ModuleId::Vacuum => Frac::ZERO,
                ModuleId::ThetaTwisted => self.theta_bottom_weight,
            },
        }
    }

    /// The vacuum vector 𝟏 of V.
    pub fn vacuum(&self) -> Vector {
        Vector::single(State::Fock(FockState::vacuum()), self.one())
    }

    /// The Heisenberg generator a = a_{−1}𝟏.
    pub fn generator(&self) -> Vector {
        Vector::single(State::Fock(FockState::new(vec![1])), self.one())
    }

    /// The conformal vector ω = (1/2) a_{−1}a_{−1}𝟏 (central charge 1).
    pub fn omega(&self) -> Vector {
        Vector::single(
            State::Fock(FockState::new(vec![1, 1])),
            self.cyc_rat(rat(1, 2)),
        )
    }

    /// Bottom state of a module as a vector.
    pub fn bottom(&self, m: ModuleId) -> Vector {
        let s = match m {
            ModuleId::Vacuum => State::Fock(FockState::vacuum()),
            ModuleId::ThetaTwisted => State::Twisted(TwistedState::bottom()),
        };
        Vector::single(s, self.one())
    }

    /// Action of the oscillator a_r on a basis state. Negative r creates
    /// a part, positive r contracts one via [a_r, a_{−r}] = r, and a_0
    /// annihilates the vacuum module.
    fn oscillator_state(&self, r: Frac, w: &State) -> Option<(State, Rat)> {
        match w {
            State::Fock(s) => {
                assert!(
                    r.is_integer(),
                    "oscillator index {} is not integral on the vacuum module",
                    r
                );
                let r = r.num();
                if r < 0 {
                    Some((State::Fock(s.with_part(-r)), Rat::from_integer(1.into())))
                } else if r == 0 {
                    None
                } else {
                    s.without_part(r)
                        .map(|(mult, s2)| (State::Fock(s2), rat(r * mult as i64, 1)))
                }
            }
            State::Twisted(s) => {
                assert!(
                    r.den() == 2,
                    "oscillator index {} is not half-odd on the twisted module",
                    r
                );
                if r < Frac::ZERO {
                    Some((State::Twisted(s.with_part(-r)), Rat::from_integer(1.into())))
                } else {
                    s.without_part(r).map(|(mult, s2)| {
                        (
                            State::Twisted(s2),
                            r.to_rat() * Rat::from_integer((mult as i64).into()),
                        )
                    })
                }
            }
        }
    }

    /// a_r applied to a vector of the module `m`. Panics when the index
    /// parity does not match the module kind.
    pub fn generator_mode(&self, r: Frac, w: &Vector, m: ModuleId) -> Vector {
        match m {
            ModuleId::Vacuum => assert!(r.is_integer(), "integer modes required on V"),
            ModuleId::ThetaTwisted => {
                assert!(r.den() == 2, "half-odd modes required on the twisted module")
            }
        }
        let mut out = Vector::zero();
        for (s, c) in w.iter() {
            debug_assert_eq!(s.module(), m);
            if let Some((s2, factor)) = self.oscillator_state(r, s) {
                out.add_term(s2, c.scale(&factor));
            }
        }
        out
    }

    /// u_n w for u ∈ V (any vector), w in module `m`, n ∈ (1/T)ℤ.
    /// Components of u whose mode class does not contain n act as zero.
    pub fn mode_action(&self, u: &Vector, n: Frac, w: &Vector, m: ModuleId) -> Vector {
        let mut out = Vector::zero();
        for (us, uc) in u.iter() {
            let mon = us.as_fock().expect("left entry of a mode action must lie in V");
            for (ws, wc) in w.iter() {
                let partial = self.monomial_mode(mon, n, ws, m);
                out.add_scaled(&partial, &uc.mul(wc));
            }
        }
        out
    }

    /// Default auxiliary mode index m for the iterate formula: the least
    /// positive element of the generator's mode class on the module.
    fn default_aux(&self, m: ModuleId) -> Frac {
        match m {
            ModuleId::Vacuum => Frac::ZERO,
            ModuleId::ThetaTwisted => Frac::half(1),
        }
    }

    fn monomial_mode(&self, u: &FockState, n: Frac, w: &State, module: ModuleId) -> Arc<Vector> {
        // Mode-class check: u ∈ V^r for the module twist forces
        // n ∈ r/T + ℤ; anything else acts as zero.
        let r = u.grade(module.twist()) as i64;
        if !n.in_class(r, self.t as i64) {
            return Arc::new(Vector::zero());
        }
        // Forced truncation: u_n lowers degree by n + 1 − wt u.
        if n > Frac::int(u.weight()) + w.deg() - 1 {
            return Arc::new(Vector::zero());
        }
        let key = ModeKey {
            module,
            u: u.clone(),
            n,
            w: w.clone(),
        };
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.compute_monomial_mode(u, n, w, module, self.default_aux(module)));
        self.memo
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| result.clone());
        result
    }

    /// The iterate formula with an explicit auxiliary index (any member
    /// of the generator's mode class gives the same answer; tests verify
    /// this independence).
    fn compute_monomial_mode(
        &self,
        u: &FockState,
        p: Frac,
        w: &State,
        module: ModuleId,
        aux: Frac,
    ) -> Vector {
        // 𝟏_n = δ_{n,−1}·id.
        if u.is_vacuum() {
            if p == Frac::int(-1) {
                return Vector::single(w.clone(), self.one());
            }
            return Vector::zero();
        }
        // Generator: a_n is the bare oscillator.
        if u.parts() == [1] {
            let mut out = Vector::zero();
            if let Some((s2, factor)) = self.oscillator_state(p, w) {
                out.add_term(s2, self.cyc_rat(factor));
            }
            return out;
        }

        // u = a_l v with l = −(largest part).
        let k = u.parts()[0];
        let l = Frac::int(-k);
        let rest = FockState {
            parts: u.parts()[1..].to_vec(),
        };
        let wt_rest = Frac::int(rest.weight());
        let deg_w = w.deg();
        let m = aux;
        let mut out = Vector::zero();

        // Σ_{i≥0} (−1)^i C(l,i) a_{m+l−i} ( v_{p−m+i} w ):
        // stops once v_{p−m+i} annihilates by degree.
        let i1 = (wt_rest + deg_w - 1 - p + m).floor();
        for i in 0..=i1.max(-1) {
            let coeff = binomial_frac(l, i as u64)
                * Rat::from_integer(if i % 2 == 0 { 1 } else { -1 }.into());
            if coeff.is_zero() {
                continue;
            }
            let inner = self.monomial_mode(&rest, p - m + Frac::int(i), w, module);
            if inner.is_zero() {
                continue;
            }
            let outer = self.generator_mode(m + l - Frac::int(i), &inner, module);
            out.add_scaled_rat(&outer, &coeff);
        }

        // Σ_{i≥0} (−1)^{i+l+1} C(l,i) v_{p−m+l−i} ( a_{m+i} w ):
        // stops once a_{m+i} annihilates by degree.
        let i2 = (deg_w - m).floor();
        for i in 0..=i2.max(-1) {
            let sign = if (i + k + 1) % 2 == 0 { 1 } else { -1 };
            let coeff = binomial_frac(l, i as u64) * Rat::from_integer(sign.into());
            if coeff.is_zero() {
                continue;
            }
            let inner = self.generator_mode(m + Frac::int(i), &Vector::single(w.clone(), self.one()), module);
            if inner.is_zero() {
                continue;
            }
            let n_rest = p - m + l - Frac::int(i);
            let mut step = Vector::zero();
            for (s, c) in inner.iter() {
                let partial = self.monomial_mode(&rest, n_rest, s, module);
                step.add_scaled(&partial, c);
            }
            out.add_scaled_rat(&step, &coeff);
        }

        // − Σ_{i≥1} C(m,i) (a_{l+i} v)_{p−i} w: a finite list of
        // lower-weight vectors of V, recursed on the same module.
        let i3 = wt_rest.floor() + k;
        for i in 1..=i3.max(0) {
            let coeff = binomial_frac(m, i as u64);
            if coeff.is_zero() {
                continue;
            }
            let shifted = self.generator_mode(
                l + Frac::int(i),
                &Vector::single(State::Fock(rest.clone()), self.one()),
                ModuleId::Vacuum,
            );
            if shifted.is_zero() {
                continue;
            }
            let acted = self.mode_action(&shifted, p - Frac::int(i), &Vector::single(w.clone(), self.one()), module);
            out.add_scaled_rat(&acted, &-coeff);
        }

        out
    }

    /// L(k) = ω_{k+1} acting on a module vector.
    pub fn l_op(&self, k: i64, v: &Vector, m: ModuleId) -> Vector {
        self.mode_action(&self.omega(), Frac::int(k + 1), v, m)
    }
}

impl Default for Backend {
    fn default() -> Backend {
        Backend::new()
    }
}

/// Joint eigenspace exponents of a vector under two commuting twists.
/// Errs when the vector mixes eigenspaces; the zero vector reports (0,0).
pub fn bigrade(u: &Vector, g1: Twist, g2: Twist) -> Result<(u32, u32), String> {
    let mut found: Option<(u32, u32)> = None;
    for (s, _) in u.iter() {
        let f = s.as_fock().ok_or("bigrade applies to vectors of V")?;
        let jj = (f.grade(g1), f.grade(g2));
        match found {
            None => found = Some(jj),
            Some(prev) if prev == jj => {}
            Some(prev) => {
                return Err(format!(
                    "vector mixes eigenspaces {:?} and {:?}",
                    prev, jj
                ))
            }
        }
    }
    Ok(found.unwrap_or((0, 0)))
}

/// Component of `u` in the joint eigenspace V^{(j1,j2)}. Summing the
/// projections over all (j1,j2) reconstructs `u`.
pub fn project_bigrade(u: &Vector, g1: Twist, g2: Twist, j1: u32, j2: u32) -> Vector {
    let mut out = Vector::zero();
    for (s, c) in u.iter() {
        let f = s.as_fock().expect("projection applies to vectors of V");
        if f.grade(g1) == j1 && f.grade(g2) == j2 {
            out.add_term(s.clone(), c.clone());
        }
    }
    out
}

/// Split a vector of V into components homogeneous in weight and in the
/// joint (g1, g2) eigenspace decomposition, in deterministic order.
pub fn homogeneous_components(
    u: &Vector,
    g1: Twist,
    g2: Twist,
) -> Vec<(Frac, u32, u32, Vector)> {
    let mut buckets: BTreeMap<(Frac, u32, u32), Vector> = BTreeMap::new();
    for (s, c) in u.iter() {
        let f = s.as_fock().expect("decomposition applies to vectors of V");
        let key = (s.deg(), f.grade(g1), f.grade(g2));
        buckets
            .entry(key)
            .or_insert_with(Vector::zero)
            .add_term(s.clone(), c.clone());
    }
    buckets
        .into_iter()
        .map(|((w, j1, j2), v)| (w, j1, j2, v))
        .collect()
}

fn partitions_desc(max_total: i64, max_part: i64, prefix: &mut Vec<i64>, out: &mut Vec<FockState>) {
    out.push(FockState {
        parts: prefix.clone(),
    });
    let cap = max_part.min(max_total);
    for p in (1..=cap).rev() {
        prefix.push(p);
        partitions_desc(max_total - p, p, prefix, out);
        prefix.pop();
    }
}

/// All V basis states of weight ≤ cap, in basis order.
pub fn fock_states_up_to(cap: i64) -> Vec<State> {
    let mut out = Vec::new();
    if cap >= 0 {
        partitions_desc(cap, cap, &mut Vec::new(), &mut out);
    }
    let mut states: Vec<State> = out.into_iter().map(State::Fock).collect();
    states.sort();
    states
}

fn twisted_desc(max_total: Frac, max_part: Frac, prefix: &mut Vec<Frac>, out: &mut Vec<TwistedState>) {
    out.push(TwistedState {
        parts: prefix.clone(),
    });
    let mut p = max_part;
    while p >= Frac::half(1) {
        if p <= max_total {
            prefix.push(p);
            twisted_desc(max_total - p, p, prefix, out);
            prefix.pop();
        }
        p = p - 1;
    }
}

/// All θ-twisted basis states of degree ≤ cap, in basis order.
pub fn twisted_states_up_to(cap: Frac) -> Vec<State> {
    let mut out = Vec::new();
    if cap >= Frac::ZERO {
        let top = Frac::half(2 * cap.floor() + 1);
        twisted_desc(cap, top, &mut Vec::new(), &mut out);
    }
    let mut states: Vec<State> = out.into_iter().map(State::Twisted).collect();
    states.sort();
    states
}

/// Basis of a module truncated at degree ≤ cap.
pub fn states_up_to(m: ModuleId, cap: Frac) -> Vec<State> {
    match m {
        ModuleId::Vacuum => fock_states_up_to(cap.floor()),
        ModuleId::ThetaTwisted => twisted_states_up_to(cap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn bk() -> Backend {
        Backend::new()
    }

    fn fock(parts: &[i64]) -> State {
        State::Fock(FockState::new(parts.to_vec()))
    }

    fn tw(parts2: &[i64]) -> State {
        State::Twisted(TwistedState::new(
            parts2.iter().map(|&n| Frac::half(n)).collect(),
        ))
    }

    #[test]
    fn oscillator_examples() {
        let bk = bk();
        // a₁ a_{−1}𝟏 = 𝟏
        let v = Vector::single(fock(&[1]), bk.one());
        let out = bk.generator_mode(Frac::int(1), &v, ModuleId::Vacuum);
        assert_eq!(out, bk.vacuum());
        // a₂ a_{−1}a_{−1}𝟏 = 0
        let v = Vector::single(fock(&[1, 1]), bk.one());
        assert!(bk.generator_mode(Frac::int(2), &v, ModuleId::Vacuum).is_zero());
        // a_{1/2} a_{−1/2}b = (1/2) b
        let v = Vector::single(tw(&[1]), bk.one());
        let out = bk.generator_mode(Frac::half(1), &v, ModuleId::ThetaTwisted);
        assert_eq!(out, bk.bottom(ModuleId::ThetaTwisted).scaled_rat(&rat(1, 2)));
        // a₀ kills the vacuum module
        let v = Vector::single(fock(&[2, 1]), bk.one());
        assert!(bk.generator_mode(Frac::int(0), &v, ModuleId::Vacuum).is_zero());
    }

    #[test]
    fn vacuum_vertex_operator_is_identity() {
        let bk = bk();
        let w = Vector::single(fock(&[3, 1]), bk.one());
        for n in -4..4 {
            let out = bk.mode_action(&bk.vacuum(), Frac::int(n), &w, ModuleId::Vacuum);
            if n == -1 {
                assert_eq!(out, w);
            } else {
                assert!(out.is_zero(), "1_{n} acted nontrivially");
            }
        }
    }

    #[test]
    fn virasoro_modes_on_vacuum_module() {
        let bk = bk();
        // L(0) a_{−2}𝟏 = 2 a_{−2}𝟏
        let v = Vector::single(fock(&[2]), bk.one());
        assert_eq!(bk.l_op(0, &v, ModuleId::Vacuum), v.scaled_rat(&rat_int(2)));
        // L(−1) a = a_{−2}𝟏
        let a = bk.generator();
        assert_eq!(
            bk.l_op(-1, &a, ModuleId::Vacuum),
            Vector::single(fock(&[2]), bk.one())
        );
        // central charge: L(2)L(−2)𝟏 − L(−2)L(2)𝟏 = (4L(0) + c/2)𝟏 with c = 1
        let one = bk.vacuum();
        let lm2 = bk.l_op(-2, &one, ModuleId::Vacuum);
        let comm = bk.l_op(2, &lm2, ModuleId::Vacuum);
        assert_eq!(comm, one.scaled_rat(&rat(1, 2)));
    }

    #[test]
    fn l0_grading_both_modules() {
        let bk = bk();
        for s in fock_states_up_to(5) {
            let v = Vector::single(s.clone(), bk.one());
            let expect = v.scaled_rat(&s.deg().to_rat());
            assert_eq!(bk.l_op(0, &v, ModuleId::Vacuum), expect, "L(0) on {}", s);
        }
        let h = bk.descriptor(ModuleId::ThetaTwisted).bottom_weight;
        for s in twisted_states_up_to(Frac::int(4)) {
            let v = Vector::single(s.clone(), bk.one());
            let expect = v.scaled_rat(&(s.deg() + h).to_rat());
            assert_eq!(
                bk.l_op(0, &v, ModuleId::ThetaTwisted),
                expect,
                "twisted L(0) on {}",
                s
            );
        }
    }

    #[test]
    fn twisted_bottom_weight_is_one_sixteenth() {
        let bk = bk();
        assert_eq!(
            bk.descriptor(ModuleId::ThetaTwisted).bottom_weight,
            Frac::new(1, 16)
        );
    }

    #[test]
    fn creation_property() {
        let bk = bk();
        let one = bk.vacuum();
        for s in fock_states_up_to(5) {
            let u = Vector::single(s.clone(), bk.one());
            // nonneg modes kill 𝟏, and u_{−1}𝟏 = u
            for n in 0..5 {
                assert!(bk
                    .mode_action(&u, Frac::int(n), &one, ModuleId::Vacuum)
                    .is_zero());
            }
            assert_eq!(bk.mode_action(&u, Frac::int(-1), &one, ModuleId::Vacuum), u);
        }
    }

    #[test]
    fn truncation_bound() {
        let bk = bk();
        let u = Vector::single(fock(&[2, 1]), bk.one());
        for s in twisted_states_up_to(Frac::int(2)) {
            let bound = Frac::int(3) + s.deg();
            let w = Vector::single(s, bk.one());
            let mut n = bound;
            for _ in 0..4 {
                assert!(bk
                    .mode_action(&u, n, &w, ModuleId::ThetaTwisted)
                    .is_zero());
                n = n + Frac::half(1);
            }
        }
    }

    #[test]
    fn iterate_independent_of_auxiliary_index() {
        let bk = bk();
        let u = FockState::new(vec![2, 1, 1]);
        for s in twisted_states_up_to(Frac::int(2)) {
            for num in [-3i64, -1, 1, 3, 5] {
                let p = Frac::half(num);
                let default = bk.compute_monomial_mode(&u, p, &s, ModuleId::ThetaTwisted, Frac::half(1));
                for aux in [Frac::half(-1), Frac::half(3), Frac::half(5)] {
                    let alt = bk.compute_monomial_mode(&u, p, &s, ModuleId::ThetaTwisted, aux);
                    assert_eq!(default, alt, "aux {} differs at mode {}", aux, p);
                }
            }
        }
    }

    #[test]
    fn bigrade_examples() {
        let bk = bk();
        let a = bk.generator();
        assert_eq!(bigrade(&a, Twist::Id, Twist::Theta).unwrap(), (0, 1));
        assert_eq!(bigrade(&a, Twist::Theta, Twist::Theta).unwrap(), (1, 1));
        assert_eq!(bigrade(&bk.omega(), Twist::Theta, Twist::Theta).unwrap(), (0, 0));
        let mixed = a.add(&bk.vacuum());
        assert!(bigrade(&mixed, Twist::Id, Twist::Theta).is_err());
        assert_eq!(
            project_bigrade(&mixed, Twist::Id, Twist::Theta, 0, 0),
            bk.vacuum()
        );
        assert_eq!(project_bigrade(&mixed, Twist::Id, Twist::Theta, 0, 1), a);
        // completeness
        let mut sum = Vector::zero();
        for j1 in 0..2 {
            for j2 in 0..2 {
                sum.add_assign(&project_bigrade(&mixed, Twist::Theta, Twist::Theta, j1, j2));
            }
        }
        assert_eq!(sum, mixed);
    }

    #[test]
    fn state_enumeration_counts() {
        assert_eq!(fock_states_up_to(0).len(), 1);
        assert_eq!(fock_states_up_to(4).len(), 1 + 1 + 2 + 3 + 5);
        // twisted states of degree ≤ 2: partitions of 2d into odd parts
        assert_eq!(twisted_states_up_to(Frac::int(2)).len(), 7);
        let all = twisted_states_up_to(Frac::int(3));
        assert!(all.windows(2).all(|p| p[0] < p[1]), "sorted and distinct");
    }

    #[test]
    fn weight_and_deg_examples() {
        assert_eq!(fock(&[2, 1]).deg(), Frac::int(3));
        assert_eq!(State::Fock(FockState::vacuum()).deg(), Frac::ZERO);
        assert_eq!(tw(&[1]).deg(), Frac::half(1));
    }
}
