//! Abstract-group analysis of finite unit groups: center, element orders,
//! commutator subgroup, the Hamiltonian test and the explicit internal
//! direct product `C_2^m × Q_8`.
//!
//! Algorithms work on element positions through [`FiniteGroup`], so the same
//! code analyses a Cayley table and a set of algebra units.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::groups::GroupSpec;
use crate::unitary::UnitGroup;

/// Largest group checked pairwise by [`hamiltonian_check`]; larger groups are sampled.
pub const HAMILTONIAN_FULL_LIMIT: usize = 4096;
/// Pairs drawn in sampled mode.
pub const HAMILTONIAN_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x0051_7a7e;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("element set is not closed under multiplication and inversion")]
    NotClosed,
    #[error("designated Q_8 copy is not a quaternion subgroup: {0}")]
    QNotSubgroup(String),
    #[error("operation requires F_(2^k) Q_8 with the canonical listing")]
    NotQ8,
}

/// A finite group addressed by element positions `0..order`.
pub trait FiniteGroup: Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> Option<usize>;
    /// Product by position; `None` when the result is not a member.
    fn op(&self, a: usize, b: usize) -> Option<usize>;
    fn inv(&self, a: usize) -> Option<usize>;
}

impl FiniteGroup for GroupSpec {
    fn order(&self) -> usize {
        GroupSpec::order(self)
    }
    fn identity(&self) -> Option<usize> {
        Some(self.identity_index())
    }
    fn op(&self, a: usize, b: usize) -> Option<usize> {
        Some(self.mul_idx(a, b))
    }
    fn inv(&self, a: usize) -> Option<usize> {
        Some(self.inv_idx(a))
    }
}

impl FiniteGroup for UnitGroup {
    fn order(&self) -> usize {
        self.len()
    }
    fn identity(&self) -> Option<usize> {
        self.identity_position()
    }
    fn op(&self, a: usize, b: usize) -> Option<usize> {
        self.mul_pos(a, b)
    }
    fn inv(&self, a: usize) -> Option<usize> {
        self.inv_pos(a)
    }
}

fn op<G: FiniteGroup + ?Sized>(g: &G, a: usize, b: usize) -> Result<usize, StructureError> {
    g.op(a, b).ok_or(StructureError::NotClosed)
}

fn inv<G: FiniteGroup + ?Sized>(g: &G, a: usize) -> Result<usize, StructureError> {
    g.inv(a).ok_or(StructureError::NotClosed)
}

fn identity<G: FiniteGroup + ?Sized>(g: &G) -> Result<usize, StructureError> {
    g.identity().ok_or(StructureError::NotClosed)
}

/// Smallest subgroup containing `seeds`, returned as a membership mask.
pub fn closure<G: FiniteGroup + ?Sized>(
    g: &G,
    seeds: &[usize],
) -> Result<Vec<bool>, StructureError> {
    let mut member = vec![false; g.order()];
    let e = identity(g)?;
    member[e] = true;
    let mut queue = vec![e];
    while let Some(a) = queue.pop() {
        for &s in seeds {
            let p = op(g, a, s)?;
            if !member[p] {
                member[p] = true;
                queue.push(p);
            }
        }
    }
    Ok(member)
}

fn mask_to_positions(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

/// A generating set picked greedily in position order.
pub fn generators<G: FiniteGroup + ?Sized>(g: &G) -> Result<Vec<usize>, StructureError> {
    let e = identity(g)?;
    let mut gens: Vec<usize> = Vec::new();
    let mut member = vec![false; g.order()];
    member[e] = true;
    let mut members = vec![e];
    for cand in 0..g.order() {
        if member[cand] {
            continue;
        }
        gens.push(cand);
        // extend the current subgroup by the new generator
        let mut queue = members.clone();
        while let Some(a) = queue.pop() {
            for &s in &gens {
                let p = op(g, a, s)?;
                if !member[p] {
                    member[p] = true;
                    members.push(p);
                    queue.push(p);
                }
            }
        }
    }
    Ok(gens)
}

pub fn is_abelian<G: FiniteGroup + ?Sized>(g: &G) -> Result<bool, StructureError> {
    let gens = generators(g)?;
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            if op(g, a, b)? != op(g, b, a)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Positions of central elements: those commuting with every generator.
pub fn center_positions<G: FiniteGroup + ?Sized>(g: &G) -> Result<Vec<usize>, StructureError> {
    let gens = generators(g)?;
    let flags = (0..g.order())
        .into_par_iter()
        .map(|z| {
            for &s in &gens {
                if op(g, z, s)? != op(g, s, z)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>, StructureError>>()?;
    Ok(mask_to_positions(&flags))
}

/// Positions of elements commuting with all others, by exhaustive pairing.
pub fn center_positions_exhaustive<G: FiniteGroup + ?Sized>(
    g: &G,
) -> Result<Vec<usize>, StructureError> {
    let n = g.order();
    let flags = (0..n)
        .into_par_iter()
        .map(|z| {
            for u in 0..n {
                if op(g, z, u)? != op(g, u, z)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>, StructureError>>()?;
    Ok(mask_to_positions(&flags))
}

/// Powers `1, a, a², ...` up to the first return to the identity.
pub fn cyclic_subgroup<G: FiniteGroup + ?Sized>(
    g: &G,
    a: usize,
) -> Result<Vec<usize>, StructureError> {
    let e = identity(g)?;
    let mut powers = vec![e];
    let mut p = a;
    while p != e {
        if powers.len() > g.order() {
            return Err(StructureError::NotClosed);
        }
        powers.push(p);
        p = op(g, p, a)?;
    }
    Ok(powers)
}

pub fn element_order<G: FiniteGroup + ?Sized>(g: &G, a: usize) -> Result<usize, StructureError> {
    Ok(cyclic_subgroup(g, a)?.len())
}

/// Number of elements of each order.
pub fn order_census<G: FiniteGroup + ?Sized>(g: &G) -> Result<BTreeMap<u64, u64>, StructureError> {
    let orders = (0..g.order())
        .into_par_iter()
        .map(|a| element_order(g, a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut census = BTreeMap::new();
    for o in orders {
        *census.entry(o as u64).or_insert(0u64) += 1;
    }
    Ok(census)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn exponent_from_census(census: &BTreeMap<u64, u64>) -> u64 {
    census.keys().fold(1, |acc, &o| acc / gcd(acc, o) * o)
}

/// lcm of the element orders.
pub fn exponent<G: FiniteGroup + ?Sized>(g: &G) -> Result<u64, StructureError> {
    Ok(exponent_from_census(&order_census(g)?))
}

fn commutator<G: FiniteGroup + ?Sized>(g: &G, a: usize, b: usize) -> Result<usize, StructureError> {
    let ab = op(g, a, b)?;
    let ba = op(g, b, a)?;
    op(g, inv(g, ba)?, ab)
}

/// Derived subgroup as the normal closure of commutators of a generating set.
pub fn commutator_subgroup_positions<G: FiniteGroup + ?Sized>(
    g: &G,
) -> Result<Vec<usize>, StructureError> {
    let gens = generators(g)?;
    let mut seeds = Vec::new();
    for &a in &gens {
        for &b in &gens {
            seeds.push(commutator(g, a, b)?);
        }
    }
    loop {
        let member = closure(g, &seeds)?;
        let mut extra = Vec::new();
        for &x in &seeds {
            for &s in &gens {
                let c = op(g, op(g, inv(g, s)?, x)?, s)?;
                if !member[c] {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            return Ok(mask_to_positions(&member));
        }
        seeds.extend(extra);
    }
}

/// Subgroup generated by every commutator `u⁻¹ w⁻¹ u w`.
pub fn commutator_subgroup_exhaustive<G: FiniteGroup + ?Sized>(
    g: &G,
) -> Result<Vec<usize>, StructureError> {
    let n = g.order();
    let comms = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .map(|w| commutator(g, u, w))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut seeds: Vec<usize> = comms.into_iter().flatten().collect();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(mask_to_positions(&closure(g, &seeds)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Full,
    Sampled,
}

/// Outcome of the cyclic-subgroup normality test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianCheck {
    pub is_hamiltonian: bool,
    pub abelian: bool,
    pub mode: CheckMode,
    pub pairs_checked: u64,
    /// `(h, g)` with `h g h⁻¹ ∉ ⟨g⟩`, by position.
    pub witness: Option<(usize, usize)>,
}

/// Non-abelian and every cyclic subgroup normal: `h g h⁻¹ ∈ ⟨g⟩` for all `g, h`.
/// Pairwise for groups up to [`HAMILTONIAN_FULL_LIMIT`], otherwise over
/// [`HAMILTONIAN_SAMPLES`] pairs drawn with `seed`.
pub fn hamiltonian_check<G: FiniteGroup + ?Sized>(
    g: &G,
    seed: u64,
) -> Result<HamiltonianCheck, StructureError> {
    let n = g.order();
    let abelian = is_abelian(g)?;
    let inverses = (0..n)
        .into_par_iter()
        .map(|a| inv(g, a))
        .collect::<Result<Vec<_>, _>>()?;
    let conj_in_cyclic = |h: usize, cyc: &[usize], a: usize| -> Result<bool, StructureError> {
        let c = op(g, op(g, h, a)?, inverses[h])?;
        Ok(cyc.contains(&c))
    };

    let (mode, pairs_checked, witness) = if n <= HAMILTONIAN_FULL_LIMIT {
        let per_g = (0..n)
            .into_par_iter()
            .map(|a| {
                let cyc = cyclic_subgroup(g, a)?;
                for h in 0..n {
                    if !conj_in_cyclic(h, &cyc, a)? {
                        return Ok(Some((h, a)));
                    }
                }
                Ok(None)
            })
            .collect::<Result<Vec<_>, StructureError>>()?;
        let witness = per_g.into_iter().flatten().next();
        (CheckMode::Full, (n * n) as u64, witness)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(usize, usize)> = (0..HAMILTONIAN_SAMPLES)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let results = pairs
            .par_iter()
            .map(|&(h, a)| conj_in_cyclic(h, &cyclic_subgroup(g, a)?, a))
            .collect::<Result<Vec<bool>, StructureError>>()?;
        let witness = results.iter().position(|ok| !ok).map(|i| pairs[i]);
        (CheckMode::Sampled, HAMILTONIAN_SAMPLES as u64, witness)
    };

    Ok(HamiltonianCheck {
        is_hamiltonian: !abelian && witness.is_none(),
        abelian,
        mode,
        pairs_checked,
        witness,
    })
}

/// Z(U) as a unit group.
pub fn center_of(u: &UnitGroup) -> Result<UnitGroup, StructureError> {
    Ok(u.subset(&center_positions(u)?))
}

pub fn exponent_of(u: &UnitGroup) -> Result<u64, StructureError> {
    exponent(u)
}

pub fn commutator_subgroup(u: &UnitGroup) -> Result<UnitGroup, StructureError> {
    Ok(u.subset(&commutator_subgroup_positions(u)?))
}

pub fn is_hamiltonian(u: &UnitGroup, seed: u64) -> Result<HamiltonianCheck, StructureError> {
    hamiltonian_check(u, seed)
}

/// An explicit internal direct product `U = C · Q` with `C ≅ C_2^m` central.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `m`, the rank of the elementary abelian complement.
    pub rank: usize,
    /// Positions in U of an F_2-basis of the complement.
    pub complement_basis: Vec<usize>,
    /// Positions in U of the designated Q_8 copy.
    pub q8_copy: Vec<usize>,
    /// Position of the central involution of Q, the extra center basis vector.
    pub q8_involution: usize,
    pub center_order: usize,
    pub complement_order: usize,
}

/// The first check that prevented a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailedCheck {
    CenterNotElementaryAbelian,
    InvolutionNotCentral,
    ComplementMeetsQ8,
    ComplementNotCentral,
    ProductNotWholeGroup {
        product_size: usize,
        group_order: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionOutcome {
    Decomposed(Decomposition),
    Failed(FailedCheck),
}

impl DecompositionOutcome {
    pub fn decomposition(&self) -> Option<&Decomposition> {
        match self {
            DecompositionOutcome::Decomposed(d) => Some(d),
            DecompositionOutcome::Failed(_) => None,
        }
    }
}

fn q8_positions(u: &UnitGroup, q: &[AlgebraElement]) -> Result<Vec<usize>, StructureError> {
    if q.len() != 8 {
        return Err(StructureError::QNotSubgroup(format!(
            "expected 8 elements, got {}",
            q.len()
        )));
    }
    let mut pos = q
        .iter()
        .map(|w| {
            u.position(w)
                .ok_or_else(|| StructureError::QNotSubgroup("element outside U".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    pos.sort_unstable();
    pos.dedup();
    if pos.len() != 8 {
        return Err(StructureError::QNotSubgroup("repeated elements".into()));
    }
    for &a in &pos {
        for &b in &pos {
            if pos.binary_search(&op(u, a, b)?).is_err() {
                return Err(StructureError::QNotSubgroup("not closed".into()));
            }
        }
    }
    // Among groups of order 8 only Q_8 has one involution and six elements of order 4.
    let mut orders = pos
        .iter()
        .map(|&a| element_order(u, a))
        .collect::<Result<Vec<_>, _>>()?;
    orders.sort_unstable();
    if orders != [1, 2, 4, 4, 4, 4, 4, 4] {
        return Err(StructureError::QNotSubgroup(format!(
            "element orders {orders:?} are not those of Q_8"
        )));
    }
    Ok(pos)
}

/// Builds `U = C × Q` following the constructive argument: take an F_2-basis
/// of the elementary abelian center that contains the involution of Q, and
/// let C be the span of the remaining basis vectors.
pub fn decompose_as_c2m_times_q8(
    u: &UnitGroup,
    q: &[AlgebraElement],
) -> Result<DecompositionOutcome, StructureError> {
    use DecompositionOutcome::Failed;

    let q_pos = q8_positions(u, q)?;
    let e = identity(u)?;
    let centre = center_positions(u)?;
    for &z in &centre {
        if op(u, z, z)? != e {
            return Ok(Failed(FailedCheck::CenterNotElementaryAbelian));
        }
    }
    let involution = *q_pos
        .iter()
        .find(|&&a| a != e && op(u, a, a).ok() == Some(e))
        .expect("Q_8 has an involution");
    if centre.binary_search(&involution).is_err() {
        return Ok(Failed(FailedCheck::InvolutionNotCentral));
    }

    // Basis extraction over F_2: add each center element outside the current span.
    let mut span = vec![false; u.len()];
    span[e] = true;
    let mut span_list = vec![e];
    let mut basis = Vec::new();
    let extend = |b: usize,
                  span: &mut Vec<bool>,
                  span_list: &mut Vec<usize>|
     -> Result<(), StructureError> {
        let shifted = span_list
            .iter()
            .map(|&s| op(u, s, b))
            .collect::<Result<Vec<_>, _>>()?;
        for p in shifted {
            if !span[p] {
                span[p] = true;
                span_list.push(p);
            }
        }
        Ok(())
    };
    extend(involution, &mut span, &mut span_list)?;
    for &z in &centre {
        if !span[z] {
            basis.push(z);
            extend(z, &mut span, &mut span_list)?;
        }
    }

    let complement = mask_to_positions(&closure(u, &basis)?);
    if complement
        .iter()
        .any(|c| *c != e && q_pos.binary_search(c).is_ok())
    {
        return Ok(Failed(FailedCheck::ComplementMeetsQ8));
    }
    let all: Vec<usize> = (0..u.len()).collect();
    let gens = generators(u)?;
    for &b in &basis {
        for &s in &gens {
            if op(u, b, s)? != op(u, s, b)? {
                return Ok(Failed(FailedCheck::ComplementNotCentral));
            }
        }
    }
    let mut product = vec![false; u.len()];
    for &c in &complement {
        for &g in &q_pos {
            product[op(u, c, g)?] = true;
        }
    }
    let product_size = product.iter().filter(|&&p| p).count();
    if product_size != all.len() || complement.len() * q_pos.len() != all.len() {
        return Ok(Failed(FailedCheck::ProductNotWholeGroup {
            product_size,
            group_order: all.len(),
        }));
    }
    Ok(DecompositionOutcome::Decomposed(Decomposition {
        rank: basis.len(),
        complement_basis: basis,
        q8_copy: q_pos,
        q8_involution: involution,
        center_order: centre.len(),
        complement_order: complement.len(),
    }))
}

/// Checks `Z ∩ Q = {1, q²}` and `Z · Q = U` for a candidate subgroup `z`.
pub fn lattice_holds(
    u: &UnitGroup,
    z: &[usize],
    q: &[AlgebraElement],
) -> Result<bool, StructureError> {
    let q_pos = q8_positions(u, q)?;
    let e = identity(u)?;
    let mut meet: Vec<usize> = z
        .iter()
        .copied()
        .filter(|p| q_pos.binary_search(p).is_ok())
        .collect();
    meet.sort_unstable();
    let involution = q_pos
        .iter()
        .copied()
        .find(|&a| a != e && op(u, a, a).ok() == Some(e));
    let mut expected = vec![e];
    expected.extend(involution);
    expected.sort_unstable();
    if meet != expected {
        return Ok(false);
    }
    let mut product = vec![false; u.len()];
    for &c in z {
        for &g in &q_pos {
            product[op(u, c, g)?] = true;
        }
    }
    Ok(product.iter().all(|&p| p))
}

/// Lattice check with the computed center and the group basis of F_(2^k) Q_8.
pub fn verify_lattice(u: &UnitGroup) -> Result<bool, StructureError> {
    if !u.algebra().is_canonical_q8() {
        return Err(StructureError::NotQ8);
    }
    let z = center_positions(u)?;
    lattice_holds(u, &z, &u.algebra().group_basis())
}

/// Serializable summary of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub rank: usize,
    pub complement_basis: Vec<String>,
    pub q8_copy: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub group_order: u64,
    pub center_order: u64,
    pub center_is_elementary_abelian: bool,
    pub exponent: u64,
    pub order_census: BTreeMap<u64, u64>,
    pub commutator_subgroup_order: u64,
    pub is_hamiltonian: bool,
    pub hamiltonian_mode: CheckMode,
    pub decomposition: Option<DecompositionSummary>,
}

/// Runs every analysis on `u`. The decomposition is attempted when `q` is given.
pub fn analyze(
    u: &UnitGroup,
    q: Option<&[AlgebraElement]>,
    seed: u64,
) -> Result<StructureReport, StructureError> {
    let e = identity(u)?;
    let centre = center_positions(u)?;
    let mut center_is_elementary_abelian = true;
    for &z in &centre {
        if op(u, z, z)? != e {
            center_is_elementary_abelian = false;
        }
    }
    let census = order_census(u)?;
    let ham = hamiltonian_check(u, seed)?;
    let derived = commutator_subgroup_positions(u)?;
    let decomposition = match q {
        Some(q) => decompose_as_c2m_times_q8(u, q)?
            .decomposition()
            .map(|d| DecompositionSummary {
                rank: d.rank,
                complement_basis: d
                    .complement_basis
                    .iter()
                    .map(|&p| u.get(p).to_hex_list())
                    .collect(),
                q8_copy: d.q8_copy.iter().map(|&p| u.get(p).to_hex_list()).collect(),
            }),
        None => None,
    };
    Ok(StructureReport {
        group_order: u.len() as u64,
        center_order: centre.len() as u64,
        center_is_elementary_abelian,
        exponent: exponent_from_census(&census),
        order_census: census,
        commutator_subgroup_order: derived.len() as u64,
        is_hamiltonian: ham.is_hamiltonian,
        hamiltonian_mode: ham.mode,
        decomposition,
    })
}
