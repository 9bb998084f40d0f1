//! The claim battery for F_(2^k) Q_8: order formula, center structure,
//! `Z · Q_8 = V_*`, the `C_2^{4k-1} × Q_8` decomposition, the Hamiltonian
//! property, and the regular-representation identities.
//!
//! Every claim yields one [`ClaimResult`]; the report text is a pure
//! function of `k` and the seed.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::gf2k::{FieldElement, FieldSpec};
use crate::gmatrix::{q8_block_decompose, rg_matrix, Matrix};
use crate::groups::GroupSpec;
use crate::structure::{self, DecompositionOutcome};
use crate::unitary::{
    center_template, enumerate_normalized_units, enumerate_unitary_units,
    structured_unitary_generation, unitary_order_formula, CenterParams, EnumerationOptions,
    UnitGroup,
};

/// Random pairs per (group, k) in the representation battery.
pub const SIGMA_PAIRS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub claim: String,
    pub status: Status,
    pub measured: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub k: u32,
    pub modulus: String,
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimResult> {
        self.claims.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verification for k = {} (modulus {}, seed {})",
            self.k, self.modulus, self.seed
        )?;
        let width = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.claims {
            writeln!(
                f,
                "{}  {:<width$}  {}: {}",
                c.status, c.id, c.claim, c.measured
            )?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} claims, {} failed", self.claims.len(), failed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub k: u32,
    pub seed: u64,
    pub budget: u64,
}

impl VerifyOptions {
    pub fn new(k: u32) -> Self {
        VerifyOptions {
            k,
            seed: structure::DEFAULT_SEED,
            budget: crate::unitary::DEFAULT_BUDGET,
        }
    }
}

struct Claims(Vec<ClaimResult>);

impl Claims {
    fn push(&mut self, id: &str, claim: &str, ok: bool, measured: String) {
        self.0.push(ClaimResult {
            id: id.into(),
            claim: claim.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
        });
    }

    fn skip(&mut self, id: &str, claim: &str, why: &str) {
        self.0.push(ClaimResult {
            id: id.into(),
            claim: claim.into(),
            status: Status::Skip,
            measured: why.into(),
        });
    }

    fn error(&mut self, id: &str, claim: &str, err: impl fmt::Display) {
        self.push(id, claim, false, format!("error: {err}"));
    }
}

fn census_string(c: &BTreeMap<u64, u64>) -> String {
    let parts: Vec<String> = c.iter().map(|(o, n)| format!("{o}:{n}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Census of `C_2^{4k-1} × Q_8`: `{1: 1, 2: 2^{4k} - 1, 4: 6 · 2^{4k-1}}`.
pub fn expected_census(k: u32) -> BTreeMap<u64, u64> {
    let z = 1u64 << (4 * k);
    BTreeMap::from([(1, 1), (2, z - 1), (4, 6 * (z / 2))])
}

/// True iff `w` has the template shape `a0 = 1 + a2, a1 = a3, b0 = b2, b1 = b3`.
pub fn matches_center_template(f: &FieldSpec, w: &AlgebraElement) -> bool {
    let c = w.coeffs();
    c.len() == 8
        && c[0] == f.add(FieldElement::ONE, c[2])
        && c[1] == c[3]
        && c[4] == c[6]
        && c[5] == c[7]
}

/// For each circulant A over the field: `D(A - Aᵀ) = 0` and `E(Aᵀ - A) = 0`
/// for every `D = circ(d0..d3)`, `E = circ(d2, d1, d0, d3)` exactly when
/// `a1 = a3`. Exhaustive over A and d. Returns the number of A checked, or
/// the first counterexample's first row.
pub fn circulant_commutation_criterion(f: &FieldSpec) -> Result<usize, [FieldElement; 4]> {
    let elems: Vec<FieldElement> = f.elements().collect();
    let quads: Vec<[FieldElement; 4]> = elems
        .iter()
        .flat_map(|&a| {
            let elems = &elems;
            elems.iter().flat_map(move |&b| {
                elems
                    .iter()
                    .flat_map(move |&c| elems.iter().map(move |&d| [a, b, c, d]))
            })
        })
        .collect();
    let ds: Vec<(Matrix, Matrix)> = quads
        .iter()
        .map(|d| {
            (
                Matrix::circulant(*f, d),
                Matrix::circulant(*f, &[d[2], d[1], d[0], d[3]]),
            )
        })
        .collect();
    for a in &quads {
        let am = Matrix::circulant(*f, a);
        // characteristic 2: A - Aᵀ = Aᵀ - A = A + Aᵀ
        let diff = am.add(&am.transpose()).expect("same shape");
        let annihilated = ds.iter().all(|(d, e)| {
            d.mul(&diff).expect("4x4").is_zero() && e.mul(&diff).expect("4x4").is_zero()
        });
        if annihilated != (a[1] == a[3]) {
            return Err(*a);
        }
    }
    Ok(quads.len())
}

fn random_element(alg: &GroupAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let q = alg.field().order();
    let coeffs = (0..alg.dim())
        .map(|_| FieldElement::from_bits(rng.gen_range(0..q) as u16))
        .collect();
    alg.element(coeffs)
        .expect("coefficients drawn from the field")
}

/// σ(u + w) = σ(u) + σ(w), σ(uw) = σ(u)σ(w), σ(w*) = σ(w)ᵀ on random pairs,
/// and σ(1) = I. Returns the number of pairs checked or a description of the
/// first failure.
pub fn sigma_battery(
    alg: &GroupAlgebra,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<usize, String> {
    let n = alg.dim();
    if rg_matrix(alg, &alg.one()) != Matrix::identity(*alg.field(), n) {
        return Err("sigma(1) != I".into());
    }
    for i in 0..pairs {
        let u = random_element(alg, rng);
        let w = random_element(alg, rng);
        let (su, sw) = (rg_matrix(alg, &u), rg_matrix(alg, &w));
        let sum = rg_matrix(alg, &alg.add(&u, &w).expect("same algebra"));
        if sum != su.add(&sw).expect("same shape") {
            return Err(format!("additivity fails at pair {i}"));
        }
        let prod = rg_matrix(alg, &alg.mul(&u, &w).expect("same algebra"));
        if prod != su.mul(&sw).expect("same shape") {
            return Err(format!("multiplicativity fails at pair {i}"));
        }
        if rg_matrix(alg, &alg.star(&u)) != su.transpose() {
            return Err(format!("sigma(w*) != sigma(w)^T at pair {i}"));
        }
    }
    Ok(pairs)
}

/// Unit criterion on every element of a small algebra: the matrix route
/// agrees with an exhaustive search for a two-sided inverse.
pub fn unit_criterion_exhaustive(alg: &GroupAlgebra) -> Result<usize, String> {
    let width = alg.packed_width();
    if width > 12 {
        return Err(format!(
            "{} elements is too many for pairwise search",
            1u64 << width
        ));
    }
    let all: Vec<AlgebraElement> = (0..1u64 << width).map(|r| alg.from_rank(r)).collect();
    let one = alg.one();
    let mut units = 0;
    for w in &all {
        let by_search = all.iter().find(|v| {
            alg.mul(w, v).ok().as_ref() == Some(&one) && alg.mul(v, w).ok().as_ref() == Some(&one)
        });
        let by_matrix = alg.is_unit(w);
        if by_search.is_some() != by_matrix {
            return Err(format!("disagreement at {}", w.to_hex_list()));
        }
        if let Some(v) = by_search {
            units += 1;
            if alg.inverse(w).as_ref() != Ok(v) {
                return Err(format!("inverse mismatch at {}", w.to_hex_list()));
            }
        }
    }
    Ok(units)
}

/// Every element maps to the [[A, B], [C, Aᵀ]] block pattern with the expected
/// circulants, and σ(w*) = σ(w)ᵀ.
pub fn block_pattern_check<'a>(
    alg: &GroupAlgebra,
    elements: impl Iterator<Item = &'a AlgebraElement>,
) -> Result<usize, String> {
    let f = *alg.field();
    let mut count = 0;
    for w in elements {
        let s = rg_matrix(alg, w);
        let c = w.coeffs();
        let blocks = q8_block_decompose(&s).map_err(|e| format!("{}: {e}", w.to_hex_list()))?;
        let ok = blocks.a == Matrix::circulant(f, &c[0..4])
            && blocks.b == Matrix::circulant(f, &c[4..8])
            && blocks.c == Matrix::circulant(f, &[c[6], c[5], c[4], c[7]])
            && rg_matrix(alg, &alg.star(w)) == s.transpose();
        if !ok {
            return Err(format!("pattern mismatch at {}", w.to_hex_list()));
        }
        count += 1;
    }
    Ok(count)
}

/// For every template parameter: σ(α)σ(α)ᵀ = diag(A² + B², A² + B²) = I with
/// A = circ(1+r, s, r, s), B = circ(t, u, t, u).
pub fn template_gram_check(alg: &GroupAlgebra) -> Result<usize, String> {
    let f = *alg.field();
    let mut count = 0;
    for p in CenterParams::all(&f) {
        let alpha = crate::unitary::center_element(alg, p).map_err(|e| e.to_string())?;
        let s = rg_matrix(alg, &alpha);
        let gram = s.mul(&s.transpose()).expect("8x8");
        let a = Matrix::circulant(f, &[f.add(FieldElement::ONE, p.r), p.s, p.r, p.s]);
        let b = Matrix::circulant(f, &[p.t, p.u, p.t, p.u]);
        let diag = a.mul(&a).unwrap().add(&b.mul(&b).unwrap()).unwrap();
        let z = Matrix::zeros(f, 4);
        let ok = gram.block(0, 0, 4) == diag
            && gram.block(4, 4, 4) == diag
            && gram.block(0, 4, 4) == z
            && gram.block(4, 0, 4) == z
            && gram == Matrix::identity(f, 8);
        if !ok {
            return Err(format!("gram identity fails for {p:?}"));
        }
        count += 1;
    }
    Ok(count)
}

/// Runs every claim for F_(2^k) Q_8.
pub fn verify(opts: &VerifyOptions) -> VerificationReport {
    let k = opts.k;
    let mut claims = Claims(Vec::new());
    let field = match FieldSpec::new(k, None) {
        Ok(f) => f,
        Err(e) => {
            claims.error("field", "field construction", e);
            return VerificationReport {
                k,
                modulus: String::new(),
                seed: opts.seed,
                claims: claims.0,
            };
        }
    };
    let enum_opts = EnumerationOptions {
        budget: opts.budget,
    };
    let alg = GroupAlgebra::new(field, GroupSpec::q8());
    let q = alg.field().order();

    // Order formula, Q_8.
    let formula = unitary_order_formula(2, &field).ok();
    let brute = match enumerate_unitary_units(&alg, &enum_opts) {
        Ok(v) => Some(v),
        Err(e) => {
            claims.error("order-q8", "|V_*(K Q_8)| = 4|K|^4", e);
            None
        }
    };
    if let Some(v) = &brute {
        claims.push(
            "order-q8",
            "|V_*(K Q_8)| = 4|K|^4",
            formula == Some(v.len() as u128),
            format!("enumerated {}, formula {}", v.len(), formula.unwrap_or(0)),
        );
    }

    // Order formula, Q_16.
    let q16 = GroupAlgebra::new(field, GroupSpec::quaternion(3).expect("n = 3"));
    let claim16 = "|V_*(K Q_16)| = 4|K|^8";
    match enumerate_unitary_units(&q16, &enum_opts) {
        Ok(v) => {
            let f16 = unitary_order_formula(3, &field).ok();
            claims.push(
                "order-q16",
                claim16,
                f16 == Some(v.len() as u128),
                format!("enumerated {}, formula {}", v.len(), f16.unwrap_or(0)),
            );
        }
        Err(e) => claims.skip("order-q16", claim16, &e.to_string()),
    }

    let Some(v) = brute else {
        return VerificationReport {
            k,
            modulus: field.modulus_string(),
            seed: opts.seed,
            claims: claims.0,
        };
    };

    // Center of V_*.
    let centre = structure::center_of(&v);
    match &centre {
        Ok(z) => {
            let expect = 1usize << (4 * k);
            claims.push(
                "center-order",
                "|Z(V_*)| = 2^(4k)",
                z.len() == expect,
                format!("{} (expected {expect})", z.len()),
            );
            let exp = structure::exponent_of(z);
            claims.push(
                "center-exponent",
                "Z(V_*) has exponent 2",
                exp == Ok(2),
                format!(
                    "exponent {}",
                    exp.map(|e| e.to_string()).unwrap_or_else(|e| e.to_string())
                ),
            );
            let template = center_template(&alg).map(|t| UnitGroup::from_elements(alg.clone(), t));
            let all_match = z
                .elements()
                .iter()
                .all(|w| matches_center_template(&field, w));
            let equal = template.as_ref().map(|t| t.same_set(z)).unwrap_or(false);
            claims.push(
                "center-template",
                "Z(V_*) = {1+r+sx+rx^2+sx^3+ty+uxy+tx^2y+ux^3y}",
                all_match && equal,
                format!(
                    "all center elements match template: {all_match}; set equality over {} parameters: {equal}",
                    q.pow(4)
                ),
            );
        }
        Err(e) => claims.error("center-order", "|Z(V_*)| = 2^(4k)", e),
    }

    // Z(V) = Z(V_*), needs the normalized unit group.
    let zv_claim = "Z(V) = Z(V_*)";
    if k <= 2 {
        match enumerate_normalized_units(&alg, &enum_opts)
            .map_err(|e| e.to_string())
            .and_then(|nv| {
                structure::center_of(&nv)
                    .map(|z| (nv.len(), z))
                    .map_err(|e| e.to_string())
            }) {
            Ok((nv_len, zv)) => {
                let same = centre.as_ref().map(|z| z.same_set(&zv)).unwrap_or(false);
                let inside = zv.elements().iter().all(|w| v.contains(w));
                claims.push(
                    "center-normalized",
                    zv_claim,
                    same && inside,
                    format!(
                        "|V| = {nv_len}, |Z(V)| = {}, Z(V) within V_*: {inside}, equal: {same}",
                        zv.len()
                    ),
                );
            }
            Err(e) => claims.error("center-normalized", zv_claim, e),
        }
    } else {
        claims.skip(
            "center-normalized",
            zv_claim,
            "normalized unit group too large for exhaustive center (k > 2)",
        );
    }

    let circ_claim = "D(A-A^T) = 0 and E(A^T-A) = 0 for all D, E iff a1 = a3";
    if k <= 2 {
        match circulant_commutation_criterion(&field) {
            Ok(n) => claims.push(
                "circulant-criterion",
                circ_claim,
                true,
                format!("{n} circulants A, all d"),
            ),
            Err(a) => claims.push(
                "circulant-criterion",
                circ_claim,
                false,
                format!("counterexample A = circ{a:?}"),
            ),
        }
    } else {
        claims.skip(
            "circulant-criterion",
            circ_claim,
            "exhaustive only for k <= 2",
        );
    }

    let gram_claim = "sigma(alpha) sigma(alpha)^T = diag(A^2+B^2, A^2+B^2) = I";
    match template_gram_check(&alg) {
        Ok(n) => claims.push(
            "template-gram",
            gram_claim,
            true,
            format!("{n} template elements"),
        ),
        Err(e) => claims.push("template-gram", gram_claim, false, e),
    }

    let matrix_route = v.elements().iter().all(|w| {
        let s = rg_matrix(&alg, w);
        s.mul(&s.transpose()).ok() == Some(Matrix::identity(field, 8))
    });
    claims.push(
        "unitary-matrix-route",
        "sigma(w) sigma(w)^T = I for every enumerated w",
        matrix_route,
        format!("{} elements", v.len()),
    );

    // Z · Q_8 = V_*.
    let expect_order = 1usize << (4 * k + 2);
    match structured_unitary_generation(&alg) {
        Ok(s) => claims.push(
            "structured-generation",
            "Z(V_*) . Q_8 = V_* with |Z . Q_8| = 2^(4k+2)",
            s.same_set(&v) && s.len() == expect_order,
            format!(
                "structured {}, brute force {}, set equal: {}",
                s.len(),
                v.len(),
                s.same_set(&v)
            ),
        ),
        Err(e) => claims.error("structured-generation", "Z(V_*) . Q_8 = V_*", e),
    }
    match structure::verify_lattice(&v) {
        Ok(ok) => claims.push(
            "lattice",
            "Z(V_*) meet Q_8 = {1, x^2} and Z(V_*) Q_8 = V_*",
            ok,
            ok.to_string(),
        ),
        Err(e) => claims.error("lattice", "Z(V_*) meet Q_8 = {1, x^2}", e),
    }

    // Direct product decomposition and census.
    let decomposed = match structure::decompose_as_c2m_times_q8(&v, &alg.group_basis()) {
        Ok(DecompositionOutcome::Decomposed(d)) => {
            let m = 4 * k as usize - 1;
            claims.push(
                "decomposition",
                "V_* = C_2^(4k-1) x Q_8 (internal direct product)",
                d.rank == m && d.complement_order * 8 == v.len(),
                format!(
                    "m = {} (expected {m}), |C| = {}",
                    d.rank, d.complement_order
                ),
            );
            d.rank == m
        }
        Ok(DecompositionOutcome::Failed(f)) => {
            claims.push(
                "decomposition",
                "V_* = C_2^(4k-1) x Q_8",
                false,
                format!("failed check {f:?}"),
            );
            false
        }
        Err(e) => {
            claims.error("decomposition", "V_* = C_2^(4k-1) x Q_8", e);
            false
        }
    };
    let census = structure::order_census(&v);
    let exponent = census.as_ref().map(structure::exponent_from_census).ok();
    match &census {
        Ok(c) => claims.push(
            "order-census",
            "census = {1:1, 2:2^(4k)-1, 4:6*2^(4k-1)}",
            *c == expected_census(k),
            format!(
                "{} (expected {})",
                census_string(c),
                census_string(&expected_census(k))
            ),
        ),
        Err(e) => claims.error("order-census", "order census", e),
    }

    // Hamiltonian.
    let ham = structure::is_hamiltonian(&v, opts.seed);
    match &ham {
        Ok(h) => claims.push(
            "hamiltonian",
            "V_* is Hamiltonian",
            h.is_hamiltonian,
            format!(
                "{} ({:?} mode, {} pairs)",
                h.is_hamiltonian, h.mode, h.pairs_checked
            )
            .to_lowercase(),
        ),
        Err(e) => claims.error("hamiltonian", "V_* is Hamiltonian", e),
    }
    match structure::commutator_subgroup(&v) {
        Ok(c) => claims.push(
            "commutator",
            "|[V_*, V_*]| = 2",
            c.len() == 2,
            c.len().to_string(),
        ),
        Err(e) => claims.error("commutator", "|[V_*, V_*]| = 2", e),
    }
    let hamiltonian = ham.as_ref().map(|h| h.is_hamiltonian).unwrap_or(false);
    let predicts = hamiltonian && v.len() == expect_order && exponent == Some(4);
    claims.push(
        "baer-consistency",
        "Hamiltonian of order 2^(4k+2) and exponent 4 agrees with the decomposition",
        predicts == decomposed,
        format!("hamiltonian-side {predicts}, decomposition-side {decomposed}"),
    );

    // Regular representation battery.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for n in 2..=4u32 {
        let g = GroupSpec::quaternion(n).expect("n in range");
        let order = g.order();
        let a = GroupAlgebra::new(field, g);
        let id = format!("sigma-q{order}");
        let claim = format!("sigma is a ring isomorphism on F_{q} Q_{order}");
        match sigma_battery(&a, SIGMA_PAIRS, &mut rng) {
            Ok(p) => claims.push(&id, &claim, true, format!("{p} random pairs")),
            Err(e) => claims.push(&id, &claim, false, e),
        }
    }
    let blocks_claim =
        "sigma(k) = [[A, B], [C, A^T]], C = circ(b2,b1,b0,b3), sigma(k*) = sigma(k)^T";
    let block_result = if k == 1 {
        let all: Vec<AlgebraElement> = (0..256).map(|r| alg.from_rank(r)).collect();
        block_pattern_check(&alg, all.iter()).map(|n| format!("{n} elements (exhaustive)"))
    } else {
        let sample: Vec<AlgebraElement> = (0..SIGMA_PAIRS)
            .map(|_| random_element(&alg, &mut rng))
            .collect();
        block_pattern_check(&alg, sample.iter()).map(|n| format!("{n} random elements"))
    };
    match block_result {
        Ok(m) => claims.push("q8-blocks", blocks_claim, true, m),
        Err(e) => claims.push("q8-blocks", blocks_claim, false, e),
    }
    let unit_claim = "w is a unit iff sigma(w) is invertible";
    if k == 1 {
        match unit_criterion_exhaustive(&alg) {
            Ok(u) => claims.push(
                "unit-criterion",
                unit_claim,
                true,
                format!("{u} units among 256 elements"),
            ),
            Err(e) => claims.push("unit-criterion", unit_claim, false, e),
        }
    } else {
        let mut bad = None;
        for _ in 0..SIGMA_PAIRS {
            let w = random_element(&alg, &mut rng);
            let ok = match alg.inverse(&w) {
                Ok(inv) => {
                    alg.mul(&w, &inv).ok() == Some(alg.one())
                        && alg.mul(&inv, &w).ok() == Some(alg.one())
                }
                Err(_) => alg.augmentation(&w).is_zero(),
            };
            if !ok {
                bad = Some(w);
                break;
            }
        }
        claims.push(
            "unit-criterion",
            unit_claim,
            bad.is_none(),
            match bad {
                None => format!("{SIGMA_PAIRS} random elements, inverses post-checked"),
                Some(w) => format!("failure at {}", w.to_hex_list()),
            },
        );
    }

    VerificationReport {
        k,
        modulus: field.modulus_string(),
        seed: opts.seed,
        claims: claims.0,
    }
}
