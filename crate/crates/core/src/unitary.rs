//! Normalized and unitary unit groups: brute-force enumeration, the
//! structured generation `Z · Q_8`, and the order formula
//! `|V_*(K Q_{2^{n+1}})| = 4 |K|^{2^n}`.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::gf2k::{FieldElement, FieldSpec};

/// Default cap on the number of candidate coefficient vectors.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Candidates handled by one work unit; fixed so output never depends on
/// the number of threads.
const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitaryError {
    #[error(
        "{candidates} candidates exceed the enumeration budget of {budget}; \
         raise the budget or use structured generation"
    )]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("operation requires F_(2^k) Q_8 with the canonical listing")]
    NotQ8,
    #[error("element is not a member of the unit group")]
    NotMember,
    #[error("order formula needs n >= 2, got {0}")]
    FormulaParameter(u32),
    #[error("|K|^(2^n) overflows: k = {k}, n = {n}")]
    Overflow { k: u32, n: u32 },
}

/// `4 · |K|^{2^n}` for K = GF(2^k).
pub fn unitary_order_formula(n: u32, field: &FieldSpec) -> Result<u128, UnitaryError> {
    if n < 2 {
        return Err(UnitaryError::FormulaParameter(n));
    }
    let k = field.degree();
    let overflow = UnitaryError::Overflow { k, n };
    let exp = 1u32
        .checked_shl(n)
        .filter(|_| n < 32)
        .and_then(|m| m.checked_mul(k))
        .and_then(|e| e.checked_add(2))
        .ok_or(overflow.clone())?;
    if exp >= 128 {
        return Err(overflow);
    }
    Ok(1u128 << exp)
}

/// A finite group of units stored in canonical (packed-rank) order with a
/// coefficient-vector index.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    alg: GroupAlgebra,
    elements: Vec<AlgebraElement>,
    index: HashMap<AlgebraElement, usize>,
}

impl UnitGroup {
    /// Sorts and deduplicates `elements`. Closure is not checked here; see
    /// [`UnitGroup::is_closed`].
    pub fn from_elements(alg: GroupAlgebra, mut elements: Vec<AlgebraElement>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        UnitGroup {
            alg,
            elements,
            index,
        }
    }

    /// The group basis G inside K[G].
    pub fn group_copy(alg: &GroupAlgebra) -> Self {
        Self::from_elements(alg.clone(), alg.group_basis())
    }

    pub fn algebra(&self) -> &GroupAlgebra {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &AlgebraElement {
        &self.elements[i]
    }

    pub fn position(&self, w: &AlgebraElement) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &AlgebraElement) -> bool {
        self.index.contains_key(w)
    }

    pub fn identity_position(&self) -> Option<usize> {
        self.position(&self.alg.one())
    }

    /// Product of two members by position; `None` if it leaves the set.
    pub fn mul_pos(&self, i: usize, j: usize) -> Option<usize> {
        self.position(&self.alg.mul_unchecked(&self.elements[i], &self.elements[j]))
    }

    /// Inverse by position. Tries `w*` first, then the matrix inverse.
    pub fn inv_pos(&self, i: usize) -> Option<usize> {
        let w = &self.elements[i];
        let s = self.alg.star(w);
        if let Some(p) = self.position(&s) {
            if self.alg.mul_unchecked(w, &s) == self.alg.one() {
                return Some(p);
            }
        }
        self.alg.inverse(w).ok().and_then(|v| self.position(&v))
    }

    /// Contains 1 and is closed under products and inverses (checked exhaustively).
    pub fn is_closed(&self) -> bool {
        if self.identity_position().is_none() {
            return false;
        }
        let n = self.len();
        (0..n)
            .into_par_iter()
            .all(|i| self.inv_pos(i).is_some() && (0..n).all(|j| self.mul_pos(i, j).is_some()))
    }

    /// Set equality through the coefficient-vector index.
    pub fn same_set(&self, other: &UnitGroup) -> bool {
        self.len() == other.len() && other.elements.iter().all(|e| self.contains(e))
    }

    /// Members `v` with `g v = v g`.
    pub fn centralizer(&self, g: &AlgebraElement) -> Result<Vec<AlgebraElement>, UnitaryError> {
        if !self.contains(g) {
            return Err(UnitaryError::NotMember);
        }
        Ok(self
            .elements
            .par_iter()
            .filter(|v| self.alg.commutes(g, v))
            .cloned()
            .collect())
    }

    /// The subgroup on the given member positions (kept in canonical order).
    pub fn subset(&self, positions: &[usize]) -> UnitGroup {
        Self::from_elements(
            self.alg.clone(),
            positions
                .iter()
                .map(|&p| self.elements[p].clone())
                .collect(),
        )
    }
}

/// Candidate budget for brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub budget: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            budget: DEFAULT_BUDGET,
        }
    }
}

fn candidate_count(alg: &GroupAlgebra, opts: &EnumerationOptions) -> Result<u64, UnitaryError> {
    let width = alg.packed_width();
    let candidates = if width < 128 {
        1u128 << width
    } else {
        u128::MAX
    };
    if width > 63 || candidates > opts.budget as u128 {
        return Err(UnitaryError::BudgetExceeded {
            candidates,
            budget: opts.budget,
        });
    }
    Ok(candidates as u64)
}

/// Scans every candidate vector in ascending packed-rank order, keeping those
/// accepted by `keep`. Work is split into fixed chunks and merged in chunk
/// order, so the result is identical for any thread count.
fn scan<F>(
    alg: &GroupAlgebra,
    opts: &EnumerationOptions,
    keep: F,
) -> Result<Vec<AlgebraElement>, UnitaryError>
where
    F: Fn(&[FieldElement], &mut [FieldElement]) -> bool + Sync,
{
    let total = candidate_count(alg, opts)?;
    let n = alg.dim();
    let chunks = total.div_ceil(CHUNK);
    let found: Vec<Vec<AlgebraElement>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut coeffs = vec![FieldElement::ZERO; n];
            let mut scratch = vec![FieldElement::ZERO; 2 * n];
            let mut local = Vec::new();
            for rank in c * CHUNK..((c + 1) * CHUNK).min(total) {
                alg.decode_rank_into(rank, &mut coeffs);
                if keep(&coeffs, &mut scratch) {
                    local.push(AlgebraElement::from_vec_unchecked(coeffs.clone()));
                }
            }
            local
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// V_*(KG) by exhaustive search: ε(w) = 1 and `w w* = 1`.
pub fn enumerate_unitary_units(
    alg: &GroupAlgebra,
    opts: &EnumerationOptions,
) -> Result<UnitGroup, UnitaryError> {
    let elements = scan(alg, opts, |w, scratch| alg.is_unitary_coeffs(w, scratch))?;
    Ok(UnitGroup::from_elements(alg.clone(), elements))
}

/// V(KG) by exhaustive search: ε(w) = 1 and σ(w) invertible.
pub fn enumerate_normalized_units(
    alg: &GroupAlgebra,
    opts: &EnumerationOptions,
) -> Result<UnitGroup, UnitaryError> {
    let f = *alg.field();
    let elements = scan(alg, opts, |w, _| {
        let aug = w.iter().fold(FieldElement::ZERO, |a, &c| f.add(a, c));
        aug == FieldElement::ONE && alg.is_unit(&AlgebraElement::from_vec_unchecked(w.to_vec()))
    })?;
    Ok(UnitGroup::from_elements(alg.clone(), elements))
}

/// Parameters of the central element `1+r + s x + r x² + s x³ + t y + u xy + t x²y + u x³y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CenterParams {
    pub r: FieldElement,
    pub s: FieldElement,
    pub t: FieldElement,
    pub u: FieldElement,
}

impl CenterParams {
    /// Every parameter tuple in K⁴, `r` varying slowest.
    pub fn all(field: &FieldSpec) -> impl Iterator<Item = CenterParams> + '_ {
        let q = field.order();
        (0..q.pow(4)).map(move |i| {
            let at = |p: u32| FieldElement::from_bits((i / q.pow(p) % q) as u16);
            CenterParams {
                r: at(3),
                s: at(2),
                t: at(1),
                u: at(0),
            }
        })
    }
}

/// The template element with coefficients `(1+r, s, r, s, t, u, t, u)`.
pub fn center_element(alg: &GroupAlgebra, p: CenterParams) -> Result<AlgebraElement, UnitaryError> {
    if !alg.is_canonical_q8() {
        return Err(UnitaryError::NotQ8);
    }
    let f = alg.field();
    for c in [p.r, p.s, p.t, p.u] {
        if !f.contains(c) {
            return Err(UnitaryError::NotMember);
        }
    }
    let one_r = f.add(FieldElement::ONE, p.r);
    Ok(AlgebraElement::from_vec_unchecked(vec![
        one_r, p.s, p.r, p.s, p.t, p.u, p.t, p.u,
    ]))
}

/// All template elements, one per `(r, s, t, u)`.
pub fn center_template(alg: &GroupAlgebra) -> Result<Vec<AlgebraElement>, UnitaryError> {
    CenterParams::all(alg.field())
        .map(|p| center_element(alg, p))
        .collect()
}

/// `{ z g : z a template element, g ∈ Q_8 }`, deduplicated and in canonical order.
pub fn structured_unitary_generation(alg: &GroupAlgebra) -> Result<UnitGroup, UnitaryError> {
    let centre = center_template(alg)?;
    let q8 = alg.group_basis();
    let products: Vec<AlgebraElement> = centre
        .par_iter()
        .flat_map_iter(|z| q8.iter().map(move |g| alg.mul_unchecked(z, g)))
        .collect();
    Ok(UnitGroup::from_elements(alg.clone(), products))
}
