//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion's PASS/FAIL line is always printed; exits non-zero on any FAIL.

use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unitgroup::gmatrix::{q8_block_decompose, rg_matrix, Matrix};
use unitgroup::structure::{
    center_of, decompose_as_c2m_times_q8, hamiltonian_check, is_hamiltonian, CheckMode,
};
use unitgroup::unitary::{
    center_template, enumerate_normalized_units, enumerate_unitary_units,
    structured_unitary_generation, unitary_order_formula,
};
use unitgroup::verify::{
    circulant_commutation_criterion, expected_census, matches_center_template, sigma_battery,
    unit_criterion_exhaustive,
};
use unitgroup::{
    AlgebraElement, EnumerationOptions, FieldElement, FieldSpec, GroupAlgebra, GroupSpec, UnitGroup,
};

const SEED: u64 = 0x0051_7a7e;

fn record(id: u32, ok: bool, detail: impl AsRef<str>) -> bool {
    let line = format!(
        "{} criterion {id:>2}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    println!("{line}");
    ok
}

fn q8_algebra(k: u32) -> GroupAlgebra {
    GroupAlgebra::new(FieldSpec::new(k, None).unwrap(), GroupSpec::q8())
}

fn brute(alg: &GroupAlgebra) -> UnitGroup {
    enumerate_unitary_units(alg, &EnumerationOptions::default()).unwrap()
}

/// Order of `w` by repeated multiplication in the algebra, independent of the
/// unit group's position tables.
fn order_by_powers(alg: &GroupAlgebra, w: &AlgebraElement) -> u64 {
    let one = alg.one();
    let mut p = w.clone();
    let mut n = 1;
    while p != one {
        p = alg.mul(&p, w).unwrap();
        n += 1;
        assert!(n <= 64, "order exceeds 64");
    }
    n
}

fn timed_order(id: u32, k: u32, group: GroupSpec, expected: usize, limit: Duration) -> bool {
    let f = FieldSpec::new(k, None).unwrap();
    let n = group.order().trailing_zeros() - 1;
    let alg = GroupAlgebra::new(f, group);
    let start = Instant::now();
    let u = brute(&alg);
    let elapsed = start.elapsed();
    let formula = unitary_order_formula(n, &f).unwrap();
    record(
        id,
        u.len() == expected && formula == expected as u128 && elapsed < limit,
        format!(
            "|V_*(F_{} Q_{})| = {} (expected {expected}, formula {formula}) in {:.3}s (limit {}s)",
            f.order(),
            1u32 << (n + 1),
            u.len(),
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn criterion_1() -> bool {
    timed_order(1, 1, GroupSpec::q8(), 64, Duration::from_secs(1))
}

fn criterion_2() -> bool {
    timed_order(2, 2, GroupSpec::q8(), 1024, Duration::from_secs(10))
}

fn criterion_3() -> bool {
    timed_order(
        3,
        1,
        GroupSpec::quaternion(3).unwrap(),
        1024,
        Duration::from_secs(60),
    )
}

fn criterion_4() -> bool {
    let mut ok = true;
    let mut details = Vec::new();
    for k in 1..=2 {
        let alg = q8_algebra(k);
        let f = *alg.field();
        let u = brute(&alg);
        let z = center_of(&u).unwrap();
        let one = alg.one();
        let exp2 = z.elements().iter().all(|w| alg.mul(w, w).unwrap() == one) && z.len() > 1;
        let shape = z.elements().iter().all(|w| matches_center_template(&f, w));
        let template = UnitGroup::from_elements(alg.clone(), center_template(&alg).unwrap());
        let equal = template.same_set(&z);
        let good = z.len() == 1 << (4 * k) && exp2 && shape && equal;
        ok &= good;
        details.push(format!(
            "k={k}: |Z| = {} (expected {}), exponent 2 {exp2}, template shape {shape}, set equality {equal}",
            z.len(),
            1 << (4 * k)
        ));
    }
    record(4, ok, details.join("; "))
}

fn criterion_5() -> bool {
    let mut ok = true;
    let mut details = Vec::new();
    for k in 1..=2 {
        let alg = q8_algebra(k);
        let u = brute(&alg);
        let s = structured_unitary_generation(&alg).unwrap();
        let good = s.same_set(&u) && s.len() == 1 << (4 * k + 2);
        ok &= good;
        details.push(format!(
            "k={k}: structured {} vs brute force {}, set equal {}",
            s.len(),
            u.len(),
            s.same_set(&u)
        ));
    }
    record(5, ok, details.join("; "))
}

fn criterion_6() -> bool {
    let mut ok = true;
    let mut details = Vec::new();
    for k in 1..=2 {
        let alg = q8_algebra(k);
        let u = brute(&alg);
        let q = alg.group_basis();
        let outcome = decompose_as_c2m_times_q8(&u, &q).unwrap();
        let m = outcome.decomposition().map(|d| d.rank);
        let mut census = std::collections::BTreeMap::new();
        for w in u.elements() {
            *census.entry(order_by_powers(&alg, w)).or_insert(0u64) += 1;
        }
        let good = m == Some(4 * k as usize - 1) && census == expected_census(k);
        ok &= good;
        details.push(format!(
            "k={k}: m = {m:?} (expected {}), census {census:?}",
            4 * k - 1
        ));
    }
    record(6, ok, details.join("; "))
}

fn criterion_7() -> bool {
    let u = brute(&q8_algebra(1));
    let h = is_hamiltonian(&u, SEED).unwrap();
    let positive = h.is_hamiltonian && h.mode == CheckMode::Full && h.pairs_checked == 64 * 64;

    // Negative control through the text table format.
    let text = GroupSpec::dihedral(4).unwrap().serialize();
    let d8 = GroupSpec::parse(&text).unwrap();
    let neg = hamiltonian_check(&d8, SEED).unwrap();
    let witness_valid = match neg.witness {
        Some((a, b)) => {
            // h g h⁻¹ must lie outside ⟨g⟩.
            let conj = d8.mul_idx(d8.mul_idx(a, b), d8.inv_idx(a));
            let mut cyc = vec![d8.identity_index()];
            let mut p = b;
            while p != d8.identity_index() {
                cyc.push(p);
                p = d8.mul_idx(p, b);
            }
            !cyc.contains(&conj)
        }
        None => false,
    };
    record(
        7,
        positive && !neg.is_hamiltonian && witness_valid,
        format!(
            "V_*(F_2 Q_8) hamiltonian {} ({} pairs, {:?}); D_8 hamiltonian {} with witness {:?} (valid {witness_valid})",
            h.is_hamiltonian, h.pairs_checked, h.mode, neg.is_hamiltonian, neg.witness
        ),
    )
}

fn criterion_8() -> bool {
    let mut ok = true;
    let mut details = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for n in 2..=4 {
        for k in 1..=3 {
            let alg = GroupAlgebra::new(
                FieldSpec::new(k, None).unwrap(),
                GroupSpec::quaternion(n).unwrap(),
            );
            let r = sigma_battery(&alg, 1000, &mut rng);
            if r.is_err() {
                details.push(format!("Q_{} k={k}: {r:?}", 1 << (n + 1)));
            }
            ok &= r == Ok(1000);
        }
    }
    let units = unit_criterion_exhaustive(&q8_algebra(1));
    ok &= units == Ok(128);
    details.push(format!(
        "1000 pairs for each of Q_8, Q_16, Q_32 and k = 1..3; unit criterion on 256 elements: {units:?} units"
    ));
    record(8, ok, details.join("; "))
}

fn criterion_9() -> bool {
    let alg = q8_algebra(1);
    let f = *alg.field();
    let mut checked = 0;
    let mut ok = true;
    for r in 0..256 {
        let w = alg.from_rank(r);
        let c = w.coeffs();
        let s = rg_matrix(&alg, &w);
        let transpose = rg_matrix(&alg, &alg.star(&w)) == s.transpose();
        let blocks = match q8_block_decompose(&s) {
            Ok(b) => {
                b.a == Matrix::circulant(f, &c[0..4])
                    && b.b == Matrix::circulant(f, &c[4..8])
                    && b.c == Matrix::circulant(f, &[c[6], c[5], c[4], c[7]])
            }
            Err(_) => false,
        };
        ok &= transpose && blocks;
        checked += 1;
    }
    record(
        9,
        ok && checked == 256,
        format!("sigma(w*) = sigma(w)^T and A/B/C blocks on {checked} elements of F_2 Q_8"),
    )
}

fn criterion_10() -> bool {
    let f2 = circulant_commutation_criterion(&FieldSpec::new(1, None).unwrap());
    let f4 = circulant_commutation_criterion(&FieldSpec::new(2, None).unwrap());
    let alg = q8_algebra(1);
    let v = enumerate_normalized_units(&alg, &EnumerationOptions::default()).unwrap();
    let zv = center_of(&v).unwrap();
    let zu = center_of(&brute(&alg)).unwrap();
    let equal = zv.same_set(&zu);
    record(
        10,
        f2 == Ok(16) && f4 == Ok(256) && equal,
        format!(
            "circulant criterion over F_2 {f2:?}, over F_4 {f4:?}; |V| = {}, Z(V) = Z(V_*) {equal} (|Z| = {})",
            v.len(),
            zv.len()
        ),
    )
}

fn criterion_11() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ok = true;
    for k in 1..=8 {
        let f = FieldSpec::new(k, None).unwrap();
        let q = f.order();
        let one = FieldElement::ONE;
        let zero = FieldElement::ZERO;
        let elems: Vec<FieldElement> = f.elements().collect();
        ok &= elems.len() == q as usize;
        for &a in &elems {
            ok &= f.add(a, zero) == a && f.mul(a, one) == a && f.add(a, a) == zero;
            if a != zero {
                ok &= f.inv(a).map(|b| f.mul(a, b)) == Ok(one);
            } else {
                ok &= f.inv(a).is_err();
            }
        }
        for _ in 0..20_000 {
            let [a, b, c] = [0; 3].map(|_| FieldElement::from_bits(rng.gen_range(0..q) as u16));
            ok &= f.add(a, b) == f.add(b, a)
                && f.mul(a, b) == f.mul(b, a)
                && f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                && f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                && f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
        }
    }
    let elapsed = start.elapsed();
    record(
        11,
        ok && elapsed < Duration::from_secs(10),
        format!(
            "field axioms (20000 random triples) and exhaustive inverses for k = 1..8 in {:.3}s (limit 10s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_12() -> bool {
    let run = |workers: &str| {
        Process::new(env!("CARGO_BIN_EXE_unitgroup"))
            .args(["verify-paper", "--k", "1"])
            .env("UNITGROUP_WORKERS", workers)
            .output()
            .expect("binary runs")
    };
    let a = run("1");
    let b = run("4");
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    record(
        12,
        same && a.status.success() && b.status.success(),
        format!(
            "verify-paper --k 1 with 1 and 4 workers: {} bytes each, identical {same}, exit codes {:?}/{:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

fn main() -> ExitCode {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("{} criteria, {failed} failed", results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
