//! Exact incremental row reduction over ℚ(ζ_n) and the weight-capped
//! quotient basis built on top of it.
//!
//! Columns are indexed by the deterministic basis order (degree, then
//! lexicographic on parts). A row's pivot is its *highest* column — the
//! heaviest state — so reduction rewrites heavy states in terms of
//! lighter ones and canonical representatives sit at the bottom of the
//! filtration. The stored rows form a reduced echelon family: each pivot
//! column occurs in exactly one row, and every row is normalized.

use crate::fock::{states_up_to, ModuleId, State, Vector};
use crate::scalar::{Cyc, Frac};
use std::collections::{BTreeMap, HashMap};

/// A sparse row: (column, coefficient) sorted by column, no zeros.
pub type Row = Vec<(usize, Cyc)>;

/// Reduced echelon family over a fixed column count.
#[derive(Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Row>,
    pivot_row: HashMap<usize, usize>,
}

fn row_from_map(map: BTreeMap<usize, Cyc>) -> Row {
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl Echelon {
    pub fn new(ncols: usize) -> Echelon {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: HashMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// Columns that are not pivots, ascending: the representative set.
    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.is_pivot(*c)).collect()
    }

    /// Canonical form of a vector modulo the row span: repeatedly clears
    /// the highest remaining pivot column. Idempotent; rows map to zero.
    pub fn reduce_map(&self, mut v: BTreeMap<usize, Cyc>) -> BTreeMap<usize, Cyc> {
        loop {
            let hit = v
                .iter()
                .rev()
                .find_map(|(c, x)| (!x.is_zero() && self.is_pivot(*c)).then_some(*c));
            let Some(col) = hit else { break };
            let row = &self.rows[self.pivot_row[&col]];
            let factor = v.get(&col).unwrap().clone();
            for (c, x) in row {
                let delta = x.mul(&factor);
                match v.entry(*c) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(delta.neg());
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get().sub(&delta);
                        if s.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = s;
                        }
                    }
                }
            }
            v.remove(&col);
        }
        v.retain(|_, c| !c.is_zero());
        v
    }

    /// Insert a row; returns true when the rank grew.
    pub fn insert(&mut self, v: BTreeMap<usize, Cyc>) -> bool {
        let reduced = self.reduce_map(v);
        if reduced.is_empty() {
            return false;
        }
        let (&pivot, pc) = reduced.iter().next_back().unwrap();
        let inv = pc.inv();
        let normalized: BTreeMap<usize, Cyc> =
            reduced.iter().map(|(c, x)| (*c, x.mul(&inv))).collect();
        // Keep the family fully reduced: clear the new pivot column from
        // every stored row.
        let new_row = row_from_map(normalized);
        for row in &mut self.rows {
            if let Some(pos) = row.iter().position(|(c, _)| *c == pivot) {
                let factor = row[pos].1.clone();
                let mut merged: BTreeMap<usize, Cyc> = row.iter().cloned().collect();
                for (c, x) in &new_row {
                    let delta = x.mul(&factor);
                    match merged.entry(*c) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(delta.neg());
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            let s = e.get().sub(&delta);
                            if s.is_zero() {
                                e.remove();
                            } else {
                                *e.get_mut() = s;
                            }
                        }
                    }
                }
                *row = row_from_map(merged);
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(new_row);
        true
    }
}

/// A weight-capped ambient basis together with a row-reduced relation
/// span and the induced reduction map: the truncated quotient.
pub struct QuotientBasis {
    pub module: ModuleId,
    pub cap: Frac,
    pub ambient: Vec<State>,
    index: HashMap<State, usize>,
    pub ech: Echelon,
}

impl QuotientBasis {
    /// Ambient basis of `module` up to `cap`, with an empty relation span.
    pub fn new(module: ModuleId, cap: Frac) -> QuotientBasis {
        let ambient = states_up_to(module, cap);
        let index = ambient
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let ech = Echelon::new(ambient.len());
        QuotientBasis {
            module,
            cap,
            ambient,
            index,
            ech,
        }
    }

    pub fn dim_ambient(&self) -> usize {
        self.ambient.len()
    }

    /// Coordinates of a vector over the ambient basis; None when the
    /// support exceeds the cap.
    pub fn coords(&self, v: &Vector) -> Option<BTreeMap<usize, Cyc>> {
        let mut out = BTreeMap::new();
        for (s, c) in v.iter() {
            let i = self.index.get(s)?;
            out.insert(*i, c.clone());
        }
        Some(out)
    }

    pub fn vector(&self, coords: &BTreeMap<usize, Cyc>) -> Vector {
        let mut v = Vector::zero();
        for (i, c) in coords {
            v.add_term(self.ambient[*i].clone(), c.clone());
        }
        v
    }

    /// Add a relation; panics if its support exceeds the cap (relation
    /// generators are enumerated to fit by construction).
    pub fn add_relation(&mut self, v: &Vector) -> bool {
        let coords = self
            .coords(v)
            .unwrap_or_else(|| panic!("relation row exceeds cap {}", self.cap));
        self.ech.insert(coords)
    }

    /// Canonical representative of the class of `v`.
    /// Returns None when the support of `v` exceeds the cap.
    pub fn try_reduce(&self, v: &Vector) -> Option<Vector> {
        let coords = self.coords(v)?;
        Some(self.vector(&self.ech.reduce_map(coords)))
    }

    pub fn reduce(&self, v: &Vector) -> Vector {
        self.try_reduce(v)
            .unwrap_or_else(|| panic!("vector support exceeds cap {}", self.cap))
    }

    /// Representative states (non-pivot columns), ascending in the basis
    /// order — the canonical basis of the truncated quotient.
    pub fn representatives(&self) -> Vec<State> {
        self.ech
            .free_cols()
            .into_iter()
            .map(|c| self.ambient[c].clone())
            .collect()
    }

    /// Number of representatives in each degree layer ≤ cap, ascending
    /// by degree. Layers with zero representatives are still listed.
    pub fn layer_dims(&self) -> Vec<(Frac, usize)> {
        let mut counts: BTreeMap<Frac, usize> = BTreeMap::new();
        let mut d = Frac::ZERO;
        let step = match self.module {
            ModuleId::Vacuum => Frac::ONE,
            ModuleId::ThetaTwisted => Frac::half(1),
        };
        while d <= self.cap {
            counts.insert(d, 0);
            d = d + step;
        }
        for s in self.representatives() {
            *counts.entry(s.deg()).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Backend, FockState};
    use crate::scalar::rat;

    #[test]
    fn echelon_reduce_and_insert() {
        let bk = Backend::new();
        let one = bk.one();
        let mut e = Echelon::new(4);
        // row: col3 + col1
        let mut r = BTreeMap::new();
        r.insert(3, one.clone());
        r.insert(1, one.clone());
        assert!(e.insert(r.clone()));
        assert!(!e.insert(r.clone()), "duplicate row must not grow rank");
        // reduce col3 → −col1
        let mut v = BTreeMap::new();
        v.insert(3, one.clone());
        let red = e.reduce_map(v);
        assert_eq!(red.len(), 1);
        assert_eq!(red[&1], one.neg());
        // idempotence
        assert_eq!(e.reduce_map(red.clone()), red);
        assert_eq!(e.free_cols(), vec![0, 1, 2]);
    }

    #[test]
    fn rref_is_fully_reduced() {
        let bk = Backend::new();
        let one = bk.one();
        let mut e = Echelon::new(5);
        let mk = |cols: &[(usize, i64)]| -> BTreeMap<usize, Cyc> {
            cols.iter()
                .map(|&(c, n)| (c, bk.cyc_rat(rat(n, 1))))
                .collect()
        };
        e.insert(mk(&[(0, 1), (4, 1)]));
        e.insert(mk(&[(1, 2), (4, 2)]));
        // second insert must clear col 4 from the first row
        for row in e.rows() {
            let pivots_in_row = row.iter().filter(|(c, _)| e.is_pivot(*c)).count();
            assert_eq!(pivots_in_row, 1);
        }
        let mut v = BTreeMap::new();
        v.insert(4, one);
        let red = e.reduce_map(v);
        assert!(red.keys().all(|c| !e.is_pivot(*c)));
    }

    #[test]
    fn quotient_basis_l_row_example() {
        let bk = Backend::new();
        // relation (L(−1)+L(0)) a = a_{−2}𝟏 + a_{−1}𝟏: the heavier state
        // pivots, so a_{−2}𝟏 reduces to −a_{−1}𝟏.
        let mut q = QuotientBasis::new(ModuleId::Vacuum, Frac::int(3));
        let a = bk.generator();
        let row = bk.l_op(-1, &a, ModuleId::Vacuum).add(&bk.l_op(0, &a, ModuleId::Vacuum));
        assert!(q.add_relation(&row));
        let two = Vector::single(State::Fock(FockState::new(vec![2])), bk.one());
        assert_eq!(q.reduce(&two), a.scaled_rat(&rat(-1, 1)));
        assert!(q.reduce(&row).is_zero());
        // representatives reduce to themselves
        for r in q.representatives() {
            let v = Vector::single(r, bk.one());
            assert_eq!(q.reduce(&v), v);
        }
    }
}
