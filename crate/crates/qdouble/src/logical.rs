//! Exact states and operators on tensor products of group algebras
//! `C[G1] (x) ... (x) C[Gk]`.
//!
//! States are kept unnormalized while protocol algebra runs and are
//! normalized at measurement time, so intermediate vectors can be compared
//! exactly against closed-form expressions. Operators are column-sparse maps;
//! group multiplication operators are permutations, irrep operators are
//! diagonal, and interface projectors average a few permutations.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::group::{Cocycle2, DiagonalSubgroup, FiniteGroup, GroupElement};
use crate::irreps::Irrep;
use crate::tol;

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// An ordered list of group-algebra slots.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalSpace {
    slots: Vec<FiniteGroup>,
    strides: Vec<usize>,
    dim: usize,
}

impl LogicalSpace {
    pub fn new(slots: Vec<FiniteGroup>) -> LogicalSpace {
        let mut strides = vec![0; slots.len()];
        let mut dim = 1;
        for (i, g) in slots.iter().enumerate().rev() {
            strides[i] = dim;
            dim *= g.order();
        }
        LogicalSpace { slots, strides, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, i: usize) -> &FiniteGroup {
        &self.slots[i]
    }

    pub fn slots(&self) -> &[FiniteGroup] {
        &self.slots
    }

    pub fn encode(&self, elems: &[GroupElement]) -> usize {
        debug_assert_eq!(elems.len(), self.slots.len());
        elems
            .iter()
            .zip(&self.strides)
            .map(|(&e, &s)| e * s)
            .sum()
    }

    pub fn decode(&self, index: usize) -> Vec<GroupElement> {
        self.slots
            .iter()
            .zip(&self.strides)
            .map(|(g, &s)| (index / s) % g.order())
            .collect()
    }

    pub fn digit(&self, index: usize, slot: usize) -> GroupElement {
        (index / self.strides[slot]) % self.slots[slot].order()
    }

    pub fn with_digit(&self, index: usize, slot: usize, value: GroupElement) -> usize {
        let old = self.digit(index, slot);
        index - old * self.strides[slot] + value * self.strides[slot]
    }

    pub fn basis_label(&self, index: usize) -> String {
        let parts: Vec<String> = self
            .decode(index)
            .iter()
            .zip(&self.slots)
            .map(|(&e, g)| g.label(e).to_string())
            .collect();
        parts.join(" ; ")
    }

    /// Space with one slot removed.
    pub fn without_slot(&self, slot: usize) -> LogicalSpace {
        let mut slots = self.slots.clone();
        slots.remove(slot);
        LogicalSpace::new(slots)
    }
}

/// A (possibly unnormalized) vector in a [`LogicalSpace`].
#[derive(Clone, Debug)]
pub struct LogicalState {
    pub space: LogicalSpace,
    pub amps: Vec<C64>,
}

impl LogicalState {
    pub fn zero(space: &LogicalSpace) -> LogicalState {
        LogicalState { space: space.clone(), amps: vec![ZERO; space.dim()] }
    }

    /// Unit vector on the decoded basis index.
    pub fn basis_state(space: &LogicalSpace, elems: &[GroupElement]) -> Result<LogicalState> {
        if elems.len() != space.slot_count() {
            return Err(Error::SlotMismatch {
                slot: elems.len(),
                msg: format!("expected {} slot values", space.slot_count()),
            });
        }
        for (i, (&e, g)) in elems.iter().zip(space.slots()).enumerate() {
            if e >= g.order() {
                return Err(Error::SlotMismatch { slot: i, msg: format!("element {e} outside {}", g.kind()) });
            }
        }
        let mut st = LogicalState::zero(space);
        st.amps[space.encode(elems)] = ONE;
        Ok(st)
    }

    pub fn from_amplitudes(space: &LogicalSpace, amps: Vec<C64>) -> LogicalState {
        assert_eq!(amps.len(), space.dim());
        LogicalState { space: space.clone(), amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> LogicalState {
        let n = self.norm_sqr().sqrt();
        let amps = self.amps.iter().map(|a| a / n).collect();
        LogicalState { space: self.space.clone(), amps }
    }

    pub fn inner(&self, other: &LogicalState) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<target|self>|^2` with both sides normalized.
    pub fn fidelity(&self, target: &LogicalState) -> f64 {
        let overlap = target.inner(self).norm_sqr();
        overlap / (self.norm_sqr() * target.norm_sqr())
    }

    pub fn scaled(&self, c: C64) -> LogicalState {
        LogicalState {
            space: self.space.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &LogicalState) -> LogicalState {
        LogicalState {
            space: self.space.clone(),
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Tensor product, concatenating slot lists.
    pub fn tensor(&self, other: &LogicalState) -> LogicalState {
        let mut slots = self.space.slots().to_vec();
        slots.extend_from_slice(other.space.slots());
        let space = LogicalSpace::new(slots);
        let mut amps = Vec::with_capacity(space.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        LogicalState { space, amps }
    }

    /// Removes a slot that is in the definite basis state `witness`.
    pub fn drop_slot_basis(&self, slot: usize, witness: GroupElement) -> Result<LogicalState> {
        let rest_space = self.space.without_slot(slot);
        let mut out = LogicalState::zero(&rest_space);
        let mut leaked = 0.0;
        for (i, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let mut digits = self.space.decode(i);
            let d = digits.remove(slot);
            if d != witness {
                leaked += a.norm_sqr();
                continue;
            }
            out.amps[rest_space.encode(&digits)] = a;
        }
        if leaked > tol::PROB_FLOOR * self.norm_sqr() {
            return Err(Error::Entangled);
        }
        Ok(out)
    }

    /// Splits off `slot` when the state is a product across that cut,
    /// returning `(factor amplitudes on the slot, remainder)`. The remainder
    /// carries the overall scale; the factor is normalized.
    pub fn factor_out_slot(&self, slot: usize) -> Result<(Vec<C64>, LogicalState)> {
        let n = self.space.slot(slot).order();
        let rest_space = self.space.without_slot(slot);
        // M[d][rest] view of the amplitude tensor.
        let mut m = vec![vec![ZERO; rest_space.dim()]; n];
        for (i, &a) in self.amps.iter().enumerate() {
            let mut digits = self.space.decode(i);
            let d = digits.remove(slot);
            m[d][rest_space.encode(&digits)] = a;
        }
        // Rank-1 check: find the largest row, use it as the remainder.
        let (best_d, best_norm) = (0..n)
            .map(|d| (d, m[d].iter().map(|a| a.norm_sqr()).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_norm == 0.0 {
            return Err(Error::Entangled);
        }
        let rest_ref = &m[best_d];
        let ref_norm_sqr: f64 = best_norm;
        // factor[d] = <rest_ref|m[d]> / |rest_ref|^2
        let mut factor = vec![ZERO; n];
        for d in 0..n {
            let overlap: C64 = rest_ref
                .iter()
                .zip(&m[d])
                .map(|(r, x)| r.conj() * x)
                .sum();
            factor[d] = overlap / ref_norm_sqr;
        }
        // Verify rank-1: m[d] == factor[d] * rest_ref
        for d in 0..n {
            for (r, x) in rest_ref.iter().zip(&m[d]) {
                if (x - factor[d] * r).norm() > tol::PROTOCOL * (1.0 + ref_norm_sqr.sqrt()) {
                    return Err(Error::Entangled);
                }
            }
        }
        let fnorm = factor.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let rest = LogicalState {
            space: rest_space,
            amps: rest_ref.iter().map(|a| a * fnorm).collect(),
        };
        let factor = factor.into_iter().map(|a| a / fnorm).collect();
        Ok((factor, rest))
    }
}

/// Returns `Some(theta)` with `a = e^{i theta} b` when the vectors agree up
/// to a global phase within `tolerance` per entry.
pub fn equal_up_to_global_phase(a: &[C64], b: &[C64], tolerance: f64) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let (k, mag) = b
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    if mag < tolerance {
        // b is zero; a must be too.
        return a.iter().all(|x| x.norm() <= tolerance).then_some(0.0);
    }
    let phase = a[k] / b[k];
    if (phase.norm() - 1.0).abs() > tolerance * 10.0 {
        return None;
    }
    let phase = phase / phase.norm();
    for (x, y) in a.iter().zip(b) {
        if (x - phase * y).norm() > tolerance {
            return None;
        }
    }
    Some(phase.arg())
}

/// A column-sparse operator on a [`LogicalSpace`].
#[derive(Clone, Debug)]
pub struct LogicalOperator {
    pub space: LogicalSpace,
    /// `cols[j]` lists `(i, c)` with `A[i,j] = c`.
    cols: Vec<Vec<(usize, C64)>>,
}

impl LogicalOperator {
    pub fn identity(space: &LogicalSpace) -> LogicalOperator {
        let cols = (0..space.dim()).map(|j| vec![(j, ONE)]).collect();
        LogicalOperator { space: space.clone(), cols }
    }

    pub fn zero(space: &LogicalSpace) -> LogicalOperator {
        LogicalOperator { space: space.clone(), cols: vec![Vec::new(); space.dim()] }
    }

    /// Operator permuting one slot: `|g> -> phase(g) |perm(g)>`.
    pub fn slot_map(
        space: &LogicalSpace,
        slot: usize,
        f: impl Fn(GroupElement) -> (GroupElement, C64),
    ) -> LogicalOperator {
        let mut cols = Vec::with_capacity(space.dim());
        for j in 0..space.dim() {
            let g = space.digit(j, slot);
            let (h, c) = f(g);
            cols.push(vec![(space.with_digit(j, slot, h), c)]);
        }
        LogicalOperator { space: space.clone(), cols }
    }

    /// Left multiplication `L^g |h> = |gh>` on one slot.
    pub fn left_mult(space: &LogicalSpace, slot: usize, g: GroupElement) -> LogicalOperator {
        let group = space.slot(slot).clone();
        Self::slot_map(space, slot, move |h| (group.mul(g, h), ONE))
    }

    /// Right multiplication `R^g |h> = |h g^-1>` on one slot.
    pub fn right_mult(space: &LogicalSpace, slot: usize, g: GroupElement) -> LogicalOperator {
        let group = space.slot(slot).clone();
        let ginv = group.inv(g);
        Self::slot_map(space, slot, move |h| (group.mul(h, ginv), ONE))
    }

    /// Diagonal operator multiplying `|g>` by the irrep matrix entry
    /// `R(g)[row, col]` (0-based indices).
    pub fn irrep_diag(
        space: &LogicalSpace,
        slot: usize,
        irrep: &Irrep,
        row: usize,
        col: usize,
    ) -> LogicalOperator {
        assert!(row < irrep.dim && col < irrep.dim, "irrep entry out of range");
        let mut cols = Vec::with_capacity(space.dim());
        for j in 0..space.dim() {
            let g = space.digit(j, slot);
            let c = irrep.entry(g, row, col);
            if c.norm() > 0.0 {
                cols.push(vec![(j, c)]);
            } else {
                cols.push(Vec::new());
            }
        }
        LogicalOperator { space: space.clone(), cols }
    }

    /// Generic diagonal operator.
    pub fn diagonal(space: &LogicalSpace, f: impl Fn(usize) -> C64) -> LogicalOperator {
        let cols = (0..space.dim())
            .map(|j| {
                let c = f(j);
                if c == ZERO {
                    Vec::new()
                } else {
                    vec![(j, c)]
                }
            })
            .collect();
        LogicalOperator { space: space.clone(), cols }
    }

    pub fn apply(&self, state: &LogicalState) -> LogicalState {
        let mut out = vec![ZERO; self.space.dim()];
        for (j, &a) in state.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for &(i, c) in &self.cols[j] {
                out[i] += c * a;
            }
        }
        LogicalState { space: state.space.clone(), amps: out }
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &LogicalOperator) -> LogicalOperator {
        let dim = self.space.dim();
        let mut cols = Vec::with_capacity(dim);
        let mut acc: Vec<C64> = vec![ZERO; dim];
        let mut touched: Vec<usize> = Vec::new();
        for j in 0..dim {
            for &(mid, cb) in &other.cols[j] {
                for &(row, ca) in &self.cols[mid] {
                    if acc[row] == ZERO {
                        touched.push(row);
                    }
                    acc[row] += ca * cb;
                }
            }
            touched.sort_unstable();
            let mut col = Vec::with_capacity(touched.len());
            for &row in &touched {
                if acc[row].norm() > 1e-15 {
                    col.push((row, acc[row]));
                }
                acc[row] = ZERO;
            }
            touched.clear();
            cols.push(col);
        }
        LogicalOperator { space: self.space.clone(), cols }
    }

    pub fn add(&self, other: &LogicalOperator) -> LogicalOperator {
        let dim = self.space.dim();
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut col = self.cols[j].clone();
            col.extend_from_slice(&other.cols[j]);
            col.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(col.len());
            for (i, c) in col {
                match merged.last_mut() {
                    Some((li, lc)) if *li == i => *lc += c,
                    _ => merged.push((i, c)),
                }
            }
            merged.retain(|e| e.1.norm() > 1e-15);
            cols.push(merged);
        }
        LogicalOperator { space: self.space.clone(), cols }
    }

    pub fn scaled(&self, c: C64) -> LogicalOperator {
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|&(i, v)| (i, v * c)).collect())
            .collect();
        LogicalOperator { space: self.space.clone(), cols }
    }

    pub fn adjoint(&self) -> LogicalOperator {
        let dim = self.space.dim();
        let mut cols = vec![Vec::new(); dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, c) in col {
                cols[i].push((j, c.conj()));
            }
        }
        for col in &mut cols {
            col.sort_by_key(|e| e.0);
        }
        LogicalOperator { space: self.space.clone(), cols }
    }

    pub fn pow(&self, e: usize) -> LogicalOperator {
        let mut acc = LogicalOperator::identity(&self.space);
        for _ in 0..e {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn approx_eq(&self, other: &LogicalOperator, tolerance: f64) -> bool {
        self.sub_frobenius(other) < tolerance
    }

    /// Frobenius norm of `self - other`.
    pub fn sub_frobenius(&self, other: &LogicalOperator) -> f64 {
        let diff = self.add(&other.scaled(C64::new(-1.0, 0.0)));
        diff.cols
            .iter()
            .flat_map(|col| col.iter().map(|e| e.1.norm_sqr()))
            .sum::<f64>()
            .sqrt()
    }

    pub fn commutator_norm(&self, other: &LogicalOperator) -> f64 {
        self.compose(other).sub_frobenius(&other.compose(self))
    }

    pub fn is_identity(&self, tolerance: f64) -> bool {
        self.approx_eq(&LogicalOperator::identity(&self.space), tolerance)
    }

    /// Dense matrix in row-major order; only for small spaces.
    pub fn to_dense(&self) -> Vec<C64> {
        let dim = self.space.dim();
        assert!(dim <= 4096, "dense extraction refused for dim {dim}");
        let mut m = vec![ZERO; dim * dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, c) in col {
                m[i * dim + j] = c;
            }
        }
        m
    }
}

/// The rough-merge-plus-split projector at the logical level:
/// `(1/|K|) sum_k  Rbar^k_(slot a) (x) Lbar^(p(k))_(slot b)`.
///
/// Cocycle phases only arise in the lattice realization; a nontrivial `phi`
/// is rejected here because all the paper's logical protocols run at
/// `phi = 1` and the phases cancel for all-identity split outcomes.
pub fn gauge_projector(
    space: &LogicalSpace,
    slot_a: usize,
    slot_b: usize,
    diag: &DiagonalSubgroup,
    phi: Option<&Cocycle2>,
) -> Result<LogicalOperator> {
    if let Some(phi) = phi {
        if !phi.is_trivial() {
            return Err(Error::Unsupported(
                "nontrivial 2-cocycles act only through the lattice module".into(),
            ));
        }
    }
    if space.slot(slot_a) != diag.left_group() {
        return Err(Error::SlotMismatch { slot: slot_a, msg: "left group mismatch".into() });
    }
    if space.slot(slot_b) != diag.right_group() {
        return Err(Error::SlotMismatch { slot: slot_b, msg: "right group mismatch".into() });
    }
    let mut acc = LogicalOperator::zero(space);
    for &(k, pk) in diag.pairs() {
        let term = LogicalOperator::right_mult(space, slot_a, k)
            .compose(&LogicalOperator::left_mult(space, slot_b, pk));
        acc = acc.add(&term);
    }
    Ok(acc.scaled(C64::new(1.0 / diag.order() as f64, 0.0)))
}

/// One recorded measurement.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RecordEntry {
    pub label: String,
    pub outcome: Outcome,
}

/// A measurement outcome: either the exponent `k` of an eigenvalue
/// `exp(2 pi i k / order)` of a finite-order unitary, or a (possibly
/// coarse-grained) computational value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Outcome {
    /// Eigenvalue exponent: eigenvalue is `exp(2 pi i k/order)`.
    Eigenvalue { k: usize, order: usize },
    /// Computational-basis element index or coarse symbol.
    Value(usize),
}

impl Outcome {
    pub fn value(&self) -> usize {
        match self {
            Outcome::Eigenvalue { k, .. } => *k,
            Outcome::Value(v) => *v,
        }
    }
}

/// Ordered list of measurement outcomes for a protocol run.
#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct MeasurementRecord {
    pub entries: Vec<RecordEntry>,
    pub seed: Option<u64>,
}

impl MeasurementRecord {
    pub fn get(&self, label: &str) -> Option<Outcome> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.outcome)
    }

    pub fn push(&mut self, label: &str, outcome: Outcome) {
        self.entries.push(RecordEntry { label: label.to_string(), outcome });
    }
}

/// Smallest `n <= cap` with `op^n = 1`, if any.
pub fn operator_order(op: &LogicalOperator, cap: usize) -> Option<usize> {
    let mut p = op.clone();
    for n in 1..=cap {
        if p.is_identity(tol::PROTOCOL) {
            return Some(n);
        }
        p = op.compose(&p);
    }
    None
}

/// One measurement branch: eigenvalue exponent, branch probability, and the
/// projected (unnormalized) post-state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    pub state: LogicalState,
}

/// All branches of a projective measurement of a finite-order unitary.
/// Probabilities are relative to the normalized input.
pub fn unitary_branches(state: &LogicalState, op: &LogicalOperator) -> Result<Vec<Branch>> {
    let order = operator_order(op, 64).ok_or(Error::NotFiniteOrder { searched: 64 })?;
    let total = state.norm_sqr();
    // Powers of op applied to the state.
    let mut powers = Vec::with_capacity(order);
    powers.push(state.clone());
    for t in 1..order {
        let prev = &powers[t - 1];
        powers.push(op.apply(prev));
    }
    let mut branches = Vec::new();
    for k in 0..order {
        let mut acc = LogicalState::zero(&state.space);
        for (t, p) in powers.iter().enumerate() {
            let theta = -2.0 * PI * (k * t) as f64 / order as f64;
            acc = acc.add(&p.scaled(C64::from_polar(1.0 / order as f64, theta)));
        }
        let prob = acc.norm_sqr() / total;
        branches.push(Branch {
            outcome: Outcome::Eigenvalue { k, order },
            probability: prob,
            state: acc,
        });
    }
    Ok(branches)
}

/// Branches of a computational-basis measurement on one slot, optionally
/// coarse-grained by `coarse[element] = symbol`.
pub fn computational_branches(
    state: &LogicalState,
    slot: usize,
    coarse: Option<&[usize]>,
) -> Vec<Branch> {
    let n = state.space.slot(slot).order();
    if let Some(map) = coarse {
        assert_eq!(map.len(), n, "coarse map must cover the slot group");
    }
    let symbol = |g: usize| coarse.map_or(g, |m| m[g]);
    let mut symbols: Vec<usize> = (0..n).map(symbol).collect();
    symbols.sort_unstable();
    symbols.dedup();
    let total = state.norm_sqr();
    symbols
        .into_iter()
        .map(|sym| {
            let mut acc = LogicalState::zero(&state.space);
            for (i, &a) in state.amps.iter().enumerate() {
                if a != ZERO && symbol(state.space.digit(i, slot)) == sym {
                    acc.amps[i] = a;
                }
            }
            let prob = acc.norm_sqr() / total;
            Branch { outcome: Outcome::Value(sym), probability: prob, state: acc }
        })
        .collect()
}

/// How a measurement resolves its outcome.
pub enum MeasureMode<'a> {
    Sampled(&'a mut dyn FnMut(f64) -> f64),
    Forced(Outcome),
}

/// Samples or forces one branch. Forced zero-probability outcomes error.
pub fn pick_branch(branches: Vec<Branch>, mode: &mut MeasureMode, label: &str) -> Result<Branch> {
    match mode {
        MeasureMode::Forced(want) => {
            let found = branches
                .into_iter()
                .find(|b| b.outcome == *want)
                .ok_or_else(|| Error::ZeroProbability { label: label.to_string(), prob: 0.0 })?;
            if found.probability < tol::PROB_FLOOR {
                return Err(Error::ZeroProbability { label: label.to_string(), prob: found.probability });
            }
            Ok(found)
        }
        MeasureMode::Sampled(draw) => {
            let x = draw(1.0);
            let mut acc = 0.0;
            let last = branches.len() - 1;
            for (i, b) in branches.into_iter().enumerate() {
                acc += b.probability;
                if x < acc || i == last {
                    return Ok(b);
                }
            }
            unreachable!()
        }
    }
}

/// Measures a finite-order normal (unitary) operator; returns the branch and
/// leaves the post-state unnormalized.
pub fn measure(
    state: &LogicalState,
    op: &LogicalOperator,
    mode: &mut MeasureMode,
    label: &str,
) -> Result<Branch> {
    pick_branch(unitary_branches(state, op)?, mode, label)
}

/// Measures one slot in the (possibly coarse-grained) computational basis.
pub fn measure_computational(
    state: &LogicalState,
    slot: usize,
    coarse: Option<&[usize]>,
    mode: &mut MeasureMode,
    label: &str,
) -> Result<Branch> {
    pick_branch(computational_branches(state, slot, coarse), mode, label)
}

/// Deterministic counter-based sampler on top of a seeded RNG.
pub fn sampler_from_rng<R: Rng>(rng: &mut R) -> impl FnMut(f64) -> f64 + '_ {
    move |hi: f64| rng.gen_range(0.0..hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupHom, GroupKind};
    use crate::irreps::irreps;

    fn group(desc: &str) -> FiniteGroup {
        build_group(&GroupKind::parse(desc).unwrap()).unwrap()
    }

    fn d4_space() -> LogicalSpace {
        LogicalSpace::new(vec![group("D4")])
    }

    #[test]
    fn basis_states_and_roundtrip() {
        let d4 = group("D4");
        let z4 = group("Z4");
        let space = LogicalSpace::new(vec![z4.clone(), d4.clone()]);
        let m2 = z4.element_by_word("m^2").unwrap();
        let r3s = d4.element_by_word("r^3s").unwrap();
        let st = LogicalState::basis_state(&space, &[m2, r3s]).unwrap();
        assert_eq!(st.amps.iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert_eq!(st.amps[space.encode(&[m2, r3s])], ONE);
        // decode(encode(x)) = x exhaustively
        for i in 0..space.dim() {
            assert_eq!(space.encode(&space.decode(i)), i);
        }
        let single = LogicalSpace::new(vec![d4]);
        let id_state = LogicalState::basis_state(&single, &[0]).unwrap();
        assert_eq!(id_state.amps[0], ONE);
    }

    #[test]
    fn left_and_right_mult_actions() {
        let space = d4_space();
        let g = space.slot(0).clone();
        let r = g.element_by_word("r").unwrap();
        let s = g.element_by_word("s").unwrap();
        let st = LogicalState::basis_state(&space, &[s]).unwrap();
        let rs = g.element_by_word("rs").unwrap();
        let moved = LogicalOperator::left_mult(&space, 0, r).apply(&st);
        assert_eq!(moved.amps[rs], ONE);
        let st0 = LogicalState::basis_state(&space, &[0]).unwrap();
        let moved = LogicalOperator::right_mult(&space, 0, r).apply(&st0);
        let r3 = g.element_by_word("r^3").unwrap();
        assert_eq!(moved.amps[r3], ONE);
    }

    #[test]
    fn mult_operators_compose_exhaustively() {
        let space = d4_space();
        let g = space.slot(0).clone();
        for a in g.elements() {
            for b in g.elements() {
                let lab = LogicalOperator::left_mult(&space, 0, a)
                    .compose(&LogicalOperator::left_mult(&space, 0, b));
                assert!(lab.approx_eq(&LogicalOperator::left_mult(&space, 0, g.mul(a, b)), tol::EXACT));
                let rab = LogicalOperator::right_mult(&space, 0, a)
                    .compose(&LogicalOperator::right_mult(&space, 0, b));
                assert!(rab.approx_eq(&LogicalOperator::right_mult(&space, 0, g.mul(a, b)), tol::EXACT));
                // The two families commute.
                let l = LogicalOperator::left_mult(&space, 0, a);
                let r = LogicalOperator::right_mult(&space, 0, b);
                assert!(l.commutator_norm(&r) < tol::EXACT);
            }
        }
    }

    #[test]
    fn irrep_diag_values() {
        let space = d4_space();
        let g = space.slot(0).clone();
        let list = irreps(&g).unwrap();
        let e = &list[4];
        let r = g.element_by_word("r").unwrap();
        let st = LogicalState::basis_state(&space, &[r]).unwrap();
        let z11 = LogicalOperator::irrep_diag(&space, 0, e, 0, 0);
        let out = z11.apply(&st);
        assert!((out.amps[r] - C64::new(0.0, 1.0)).norm() < tol::EXACT);
        // trivial irrep gives identity
        let triv = LogicalOperator::irrep_diag(&space, 0, &list[0], 0, 0);
        assert!(triv.is_identity(tol::EXACT));
    }

    #[test]
    fn fourier_completeness_reconstructs_delta() {
        // sum_R (d_R/|G|) sum_ij R(g)_ij^* Z_R^ij  projects onto |g>.
        let space = d4_space();
        let g = space.slot(0).clone();
        let list = irreps(&g).unwrap();
        for target in g.elements() {
            let mut acc = LogicalOperator::zero(&space);
            for r in &list {
                for i in 0..r.dim {
                    for j in 0..r.dim {
                        let c = r.entry(target, i, j).conj() * (r.dim as f64 / g.order() as f64);
                        acc = acc.add(&LogicalOperator::irrep_diag(&space, 0, r, i, j).scaled(c));
                    }
                }
            }
            let expect = LogicalOperator::diagonal(&space, |k| if k == target { ONE } else { ZERO });
            assert!(acc.approx_eq(&expect, tol::EXACT));
        }
    }

    #[test]
    fn gauge_projector_z4_d4() {
        let z4 = group("Z4");
        let d4 = group("D4");
        let space = LogicalSpace::new(vec![z4.clone(), d4.clone()]);
        let hom = GroupHom::from_generator_images(&z4, &d4, &[(1, 1)]).unwrap();
        let diag = crate::group::diagonal_subgroup(&z4, &d4, &hom).unwrap();
        let p = gauge_projector(&space, 0, 1, &diag, None).unwrap();
        assert!(p.compose(&p).approx_eq(&p, tol::EXACT));
        assert!(p.adjoint().approx_eq(&p, tol::EXACT));

        // |S>_Z4 (x) |Phi_id>  ->  (1/4) sum_k |k> (x) Xbar^-k |S>_D4
        let s_amps: Vec<C64> = (0..4)
            .map(|j| C64::from_polar(1.0, PI * (j * j) as f64 / 4.0))
            .collect();
        let mut input = LogicalState::zero(&space);
        for (j, a) in s_amps.iter().enumerate() {
            input.amps[space.encode(&[j, 0])] = *a;
        }
        let out = p.apply(&input);
        let mut expect = LogicalState::zero(&space);
        for k in 0..4usize {
            for j in 0..4usize {
                // Xbar^{-k} |Phi_{r^j}| contributes |r^(j-k)>
                let dst = (j + 4 - k) % 4;
                expect.amps[space.encode(&[k, dst])] += s_amps[j] * C64::new(0.25, 0.0);
            }
        }
        assert!(equal_up_to_global_phase(&out.amps, &expect.amps, tol::PROTOCOL).is_some());
    }

    #[test]
    fn trivial_projector_is_identity() {
        let z2 = group("Z2");
        let space = LogicalSpace::new(vec![z2.clone(), z2.clone()]);
        let hom = GroupHom::new(z2.trivial_subgroup(), z2.clone(), &[(0, 0)]).unwrap();
        let diag = crate::group::diagonal_subgroup(&z2, &z2, &hom).unwrap();
        let p = gauge_projector(&space, 0, 1, &diag, None).unwrap();
        assert!(p.is_identity(tol::EXACT));
    }

    #[test]
    fn measure_rbar_s_on_fiducial() {
        let space = d4_space();
        let g = space.slot(0).clone();
        let s = g.element_by_word("s").unwrap();
        let rbar_s = LogicalOperator::right_mult(&space, 0, s);
        let st = LogicalState::basis_state(&space, &[0]).unwrap();
        let branches = unitary_branches(&st, &rbar_s).unwrap();
        assert_eq!(branches.len(), 2);
        assert!((branches[0].probability - 0.5).abs() < tol::EXACT);
        let plus = branches[0].state.normalized();
        let mut expect = LogicalState::zero(&space);
        expect.amps[0] = C64::new(1.0 / 2f64.sqrt(), 0.0);
        expect.amps[s] = expect.amps[0];
        assert!(equal_up_to_global_phase(&plus.amps, &expect.amps, tol::PROTOCOL).is_some());
        // measure identity: outcome 1 with probability 1
        let id = LogicalOperator::identity(&space);
        let b = unitary_branches(&st, &id).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0].probability - 1.0).abs() < tol::EXACT);
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let space = d4_space();
        let uniform = LogicalState {
            space: space.clone(),
            amps: vec![C64::new(1.0 / 8f64.sqrt(), 0.0); 8],
        };
        // Coarse map r^j s^b -> j
        let coarse: Vec<usize> = (0..8).map(|i| i % 4).collect();
        let branches = computational_branches(&uniform, 0, Some(&coarse));
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < tol::EXACT);
        for b in &branches {
            assert!((b.probability - 0.25).abs() < tol::EXACT);
        }
    }

    #[test]
    fn coarse_z_commutes_with_rbar_s() {
        let space = d4_space();
        let g = space.slot(0).clone();
        let s = g.element_by_word("s").unwrap();
        let rbar_s = LogicalOperator::right_mult(&space, 0, s);
        for j in 0..4usize {
            let proj = LogicalOperator::diagonal(&space, |i| if i % 4 == j { ONE } else { ZERO });
            assert!(proj.commutator_norm(&rbar_s) < tol::EXACT);
        }
    }

    #[test]
    fn global_phase_comparison() {
        let a = vec![ONE, ZERO];
        let minus_a = vec![-ONE, ZERO];
        let theta = equal_up_to_global_phase(&a, &minus_a, tol::PROTOCOL).unwrap();
        assert!((theta.abs() - PI).abs() < tol::PROTOCOL);
        let b = vec![ONE, C64::new(0.5, 0.0)];
        assert!(equal_up_to_global_phase(&a, &b, tol::PROTOCOL).is_none());
    }

    #[test]
    fn factor_out_and_drop() {
        let z2 = group("Z2");
        let space2 = LogicalSpace::new(vec![z2.clone(), z2.clone()]);
        // (|0> + |1>)/sqrt2 (x) |1>
        let mut st = LogicalState::zero(&space2);
        st.amps[space2.encode(&[0, 1])] = C64::new(0.5f64.sqrt(), 0.0);
        st.amps[space2.encode(&[1, 1])] = C64::new(0.5f64.sqrt(), 0.0);
        let (factor, rest) = st.factor_out_slot(1).unwrap();
        assert!((factor[1].norm() - 1.0).abs() < tol::PROTOCOL);
        assert!((rest.norm_sqr() - 1.0).abs() < tol::PROTOCOL);
        let dropped = st.drop_slot_basis(1, 1).unwrap();
        assert!((dropped.norm_sqr() - 1.0).abs() < tol::PROTOCOL);
        // Bell state refuses to factor.
        let mut bell = LogicalState::zero(&space2);
        bell.amps[space2.encode(&[0, 0])] = C64::new(0.5f64.sqrt(), 0.0);
        bell.amps[space2.encode(&[1, 1])] = C64::new(0.5f64.sqrt(), 0.0);
        assert!(bell.factor_out_slot(1).is_err());
    }
}
