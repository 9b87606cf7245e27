//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line with
//! its wall time and limit to stderr, past the test harness capture. The tests share a lock so timings are not
//! inflated by each other.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qwe_core::code::library::*;
use qwe_core::dense;
use qwe_core::macwilliams::{count_a_from_b, mw_scalar};
use qwe_core::network::builders::surface_code;
use qwe_core::pauli::phase_order;
use qwe_core::scalar::enumerators_by_counting;
use qwe_core::{
    CycloPoly, Distance, EnumPoly, EnumeratorPair, LegoBlock, MWTransform, PauliString, PhasedPauli, SiteClifford,
    StabilizerGroup, Strategy, TensorEnumerator, TensorNetwork, WeightScheme, DEFAULT_GROUP_CAP, DEFAULT_MEMORY_CAP,
};

static SERIAL: Mutex<()> = Mutex::new(());

type Check = Result<String, String>;

fn criterion(id: &str, what: &str, limit_s: f64, body: impl FnOnce() -> Check) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let secs = start.elapsed().as_secs_f64();
    let verdict = match outcome {
        Ok(Ok(detail)) if secs < limit_s => Ok(detail),
        Ok(Ok(detail)) => Err(format!("{detail}; over time limit")),
        Ok(Err(e)) => Err(e),
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    };
    match verdict {
        Ok(detail) => report(format_args!("criterion {id} PASS {what} ({secs:.2} s, limit {limit_s} s) {detail}")),
        Err(e) => {
            report(format_args!("criterion {id} FAIL {what} ({secs:.2} s, limit {limit_s} s) {e}"));
            panic!("criterion {id} failed: {e}");
        }
    }
}

fn report(line: std::fmt::Arguments) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sl() -> WeightScheme {
    WeightScheme::shor_laflamme(2)
}

fn count(g: &StabilizerGroup, scheme: WeightScheme) -> EnumeratorPair {
    enumerators_by_counting(g, scheme, DEFAULT_GROUP_CAP).unwrap()
}

fn poly(scheme: WeightScheme, text: &str) -> EnumPoly {
    EnumPoly::parse(scheme, text).unwrap()
}

fn encoding(g: &StabilizerGroup) -> StabilizerGroup {
    g.encoding_state(&g.logical_operators()).unwrap()
}

fn ps(q: u32, s: &str) -> PauliString {
    PhasedPauli::parse(q, s).unwrap().into_string()
}

/// Shor-Laflamme coefficient of `z^d`.
fn coeff(p: &EnumPoly, d: usize) -> BigRational {
    p.dehomogenize().coefficient(&[d as u16])
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

#[test]
fn c01_published_enumerators() {
    criterion("1", "published enumerators", 1.0, || {
        let cases: Vec<(&str, StabilizerGroup, &str, Option<&str>)> = vec![
            ("[[5,1,3]]", five_qubit(), "w^5 + 15w z^4", Some("w^5 + 30w^2z^3 + 15w z^4 + 18z^5")),
            ("[[6,0,4]]", encoding(&five_qubit()), "w^6 + 45w^2z^4 + 18z^6", None),
            ("[[4,2,2]]", four_two_two(), "w^4 + 3z^4", Some("w^4 + 18w^2z^2 + 24w z^3 + 21z^4")),
            ("[[6,0,3]]", encoding(&four_two_two()), "w^6 + 8w^3z^3 + 21w^2z^4 + 24w z^5 + 10z^6", None),
            ("Bell", bell(), "w^2 + 3z^2", None),
            ("|0>", zero_state(), "w + z", None),
        ];
        for (name, g, a, b) in &cases {
            let pair = count(g, sl());
            ensure(pair.a == poly(sl(), a), || format!("{name}: A = {} expected {a}", pair.a))?;
            if let Some(b) = b {
                ensure(pair.b == poly(sl(), b), || format!("{name}: B = {} expected {b}", pair.b))?;
            }
        }
        Ok(format!("{} codes", cases.len()))
    });
}

#[test]
fn c02_encoding_state_identity() {
    criterion("2", "encoding-state identity", 5.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut codes = vec![five_qubit()];
        for i in 0..20 {
            codes.push(StabilizerGroup::random(2, 2 + i % 5, 1, &mut rng).unwrap());
        }
        let quarter = BigRational::new(1.into(), 4.into());
        let half = BigRational::new(1.into(), 2.into());
        for g in &codes {
            let raw = count(g, sl()).to_raw();
            let state = count(&encoding(g), sl()).to_raw();
            for d in 0..=g.n() + 1 {
                let mut rhs = &quarter * coeff(&raw.a, d);
                if d > 0 {
                    rhs = rhs + &half * coeff(&raw.b, d - 1) - &quarter * coeff(&raw.a, d - 1);
                }
                let lhs = coeff(&state.a, d);
                ensure(lhs == rhs, || format!("n = {} d = {d}: {lhs} vs {rhs}", g.n()))?;
            }
        }
        Ok(format!("{} codes", codes.len()))
    });
}

#[test]
fn c03_macwilliams() {
    criterion("3", "MacWilliams transforms", 10.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut codes = vec![five_qubit(), encoding(&five_qubit()), four_two_two(), encoding(&four_two_two()), bell(), zero_state()];
        for i in 0..20 {
            codes.push(StabilizerGroup::random(2, 2 + i % 5, 1, &mut rng).unwrap());
        }
        for g in &codes {
            let raw = count(g, sl()).to_raw();
            let b = mw_scalar(&raw.a, g.n()).map_err(|e| e.to_string())?;
            ensure(b == raw.b, || format!("MW(A) = {b} but B = {}", raw.b))?;
            let back = mw_scalar(&b, g.n()).map_err(|e| e.to_string())?;
            ensure(back == raw.a, || format!("MW(MW(A)) = {back} but A = {}", raw.a))?;
        }
        let mut schemes = 0;
        for q in [2u32, 3, 5] {
            for scheme in [
                WeightScheme::shor_laflamme(q),
                WeightScheme::double(q),
                WeightScheme::refined_double(q),
                WeightScheme::complete(q),
            ] {
                ensure(MWTransform::for_scheme(scheme).verify_phi_condition(), || format!("{scheme} at q = {q}"))?;
                schemes += 1;
            }
        }
        Ok(format!("{} codes, {schemes} scheme/q pairs", codes.len()))
    });
}

#[test]
fn c04_oracle_matches_counting() {
    criterion("4", "dense oracle equals counting", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let n = 1 + i % 5;
            let k = rng.gen_range(0..=n);
            let g = StabilizerGroup::random(2, n, k, &mut rng).unwrap();
            let scheme = if i % 2 == 0 { sl() } else { WeightScheme::double(2) };
            let (dense, residual) = dense::enumerators_dense_oracle(&g, scheme).map_err(|e| e.to_string())?;
            worst = worst.max(residual);
            let counted = count(&g, scheme);
            ensure(dense.to_count() == counted, || format!("[[{n},{k}]] {scheme}: {:?} vs {:?}", dense.to_count(), counted))?;
        }
        Ok(format!("50 codes, worst residual {worst:.1e}"))
    });
}

fn dense_merged_a(g1: &StabilizerGroup, g2: &StabilizerGroup, pairs: &[(usize, usize)], scheme: WeightScheme) -> Option<EnumPoly> {
    let q = g1.q();
    let n1 = g1.n();
    let mut psi = dense::kron_vec(&dense::state_vector(g1).unwrap(), &dense::state_vector(g2).unwrap());
    let mut sites: Vec<usize> = (0..n1 + g2.n()).collect();
    for &(i, j) in pairs {
        let a = sites.iter().position(|&s| s == i).unwrap();
        let b = sites.iter().position(|&s| s == n1 + j).unwrap();
        psi = dense::self_trace(&psi, q, sites.len(), a, b);
        sites.retain(|&s| s != i && s != n1 + j);
    }
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return None;
    }
    let psi: Vec<Complex64> = psi.iter().map(|c| c / norm).collect();
    let rho = dense::density(&psi);
    let (a, _, residual) = dense::enumerators_dense(&rho, &rho, q, sites.len(), scheme).unwrap();
    assert!(residual < 1e-6);
    Some(a.dehomogenize())
}

#[test]
fn c05_trace_theorem() {
    criterion("5", "contraction equals dense merge", 120.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let schemes = [sl(), WeightScheme::double(2), WeightScheme::complete(2)];
        let (mut checked, mut annihilated) = (0, 0);
        while checked < 25 {
            let n1 = rng.gen_range(2..=4);
            let n2 = rng.gen_range(2..=4);
            let p = rng.gen_range(1..=2usize);
            if n1 + n2 - 2 * p > 6 {
                continue;
            }
            let g1 = StabilizerGroup::random(2, n1, 0, &mut rng).unwrap();
            let g2 = StabilizerGroup::random(2, n2, 0, &mut rng).unwrap();
            let mut l1: Vec<usize> = (0..n1).collect();
            let mut l2: Vec<usize> = (0..n2).collect();
            for v in [&mut l1, &mut l2] {
                for i in (1..v.len()).rev() {
                    v.swap(i, rng.gen_range(0..=i));
                }
            }
            let pairs: Vec<(usize, usize)> = (0..p).map(|i| (l1[i], l2[i])).collect();
            let scheme = schemes[checked % 3];
            let Some(expected) = dense_merged_a(&g1, &g2, &pairs, scheme) else {
                annihilated += 1;
                continue;
            };
            let names1: Vec<String> = pairs.iter().map(|(i, _)| format!("a{i}")).collect();
            let names2: Vec<String> = pairs.iter().map(|(_, j)| format!("b{j}")).collect();
            let r1: Vec<&str> = names1.iter().map(String::as_str).collect();
            let r2: Vec<&str> = names2.iter().map(String::as_str).collect();
            let t1 = TensorEnumerator::from_lego(&LegoBlock::with_prefix(g1, "a"), &r1, scheme, DEFAULT_GROUP_CAP).unwrap();
            let t2 = TensorEnumerator::from_lego(&LegoBlock::with_prefix(g2, "b"), &r2, scheme, DEFAULT_GROUP_CAP).unwrap();
            let legs: Vec<(&str, &str)> = r1.iter().copied().zip(r2.iter().copied()).collect();
            let got = t1.contract(&t2, &legs).unwrap().normalized().unwrap().to_scalar().unwrap();
            ensure(got == expected, || format!("{scheme} pairs {pairs:?}: {got} vs {expected}"))?;
            checked += 1;
        }
        Ok(format!("25 networks ({annihilated} annihilating pairings redrawn)"))
    });
}

#[test]
fn c06_vector_enumerator_example() {
    criterion("6", "[[4,1,2]] vector enumerator", 1.0, || {
        let block = LegoBlock::with_prefix(bacon_shor_lego(), "l");
        let t = TensorEnumerator::from_lego(&block, &["l2", "l3"], sl(), DEFAULT_GROUP_CAP).unwrap().normalized().unwrap();
        let expected = [("II", "1"), ("IX", "z^2"), ("XI", "z^2"), ("XX", "z^2"), ("ZZ", "z^2"), ("ZY", "z"), ("YZ", "z"), ("YY", "z^2")];
        ensure(t.len() == expected.len(), || format!("{} terms:\n{}", t.len(), t.dump()))?;
        for (pq, c) in expected {
            let got = t.rational_entry(&ps(2, pq), &ps(2, pq)).map_err(|e| e.to_string())?;
            ensure(got == poly(sl(), c), || format!("e_{pq}: {got} expected {c}"))?;
        }
        Ok("8 terms".into())
    });
}

#[test]
fn c07_surface_code() {
    criterion("7", "5x5 surface code distance", 60.0, || {
        let net = surface_code(4, 4, sl()).unwrap();
        let plan = net.plan(Strategy::Greedy);
        let report = net.code_report(&plan, DEFAULT_MEMORY_CAP).map_err(|e| e.to_string())?;
        let pair = &report.pair;
        ensure(pair.n == 25 && pair.k == 1, || format!("[[{}, {}]]", pair.n, pair.k))?;
        let d = pair.distance().map_err(|e| e.to_string())?;
        ensure(d == Distance::Exact(4), || format!("distance {d}"))?;
        let text = std::fs::read_to_string(data("networks/surface_25_perturbed.json")).map_err(|e| e.to_string())?;
        let bent = TensorNetwork::parse_json(&text).map_err(|e| e.to_string())?;
        let bent = bent.code_report(&bent.plan(Strategy::Greedy), DEFAULT_MEMORY_CAP).map_err(|e| e.to_string())?;
        let d2 = bent.pair.distance().map_err(|e| e.to_string())?;
        ensure(d2 != Distance::Exact(4), || "perturbed network still has distance 4".into())?;
        Ok(format!("[[25,1,{d}]] width {}; perturbed network [[{},{},{d2}]] flagged", plan.width, bent.pair.n, bent.pair.k))
    });
}

/// Invariants of a count-convention double pair from a strip.
fn strip_invariants(pair: &EnumeratorPair) -> Result<(), String> {
    let a = pair.a.dehomogenize();
    let b = pair.b.dehomogenize();
    ensure(a.coefficient(&[0, 0]).is_one(), || "C[0][0] is not 1".into())?;
    for (m, c) in a.iter() {
        ensure(c.is_integer() && !c.is_negative(), || format!("A{m:?} = {c}"))?;
        let cb = b.coefficient(m);
        ensure(cb >= c, || format!("B{m:?} = {cb} < A = {c}"))?;
    }
    ensure(b.iter().all(|(_, c)| c.is_integer() && !c.is_negative()), || "B has a negative or fractional coefficient".into())?;
    let back = count_a_from_b(&pair.b, pair.n, pair.k).map_err(|e| e.to_string())?;
    ensure(back == pair.a, || "MacWilliams round trip does not return A".into())?;
    let size: BigRational = a.iter().map(|(_, c)| c).sum();
    ensure(size == BigRational::from_integer(BigInt::from(2).pow((pair.n - pair.k) as u32)), || format!("|S| = {size}"))
}

#[test]
fn c08_strip_scaling() {
    criterion("8", "3xN strip, N = 30", 300.0, || {
        let double = WeightScheme::double(2);
        let widths: Vec<usize> = [10, 20, 30].iter().map(|&n| surface_code(3, n, double).unwrap().plan(Strategy::Greedy).width).collect();
        ensure(widths.iter().all(|&w| w == widths[0]), || format!("plan widths {widths:?}"))?;
        let net = surface_code(3, 30, double).unwrap();
        let report = net.code_report(&net.plan(Strategy::Greedy), DEFAULT_MEMORY_CAP).map_err(|e| e.to_string())?;
        ensure(report.pair.n == 148, || format!("n = {}", report.pair.n))?;
        strip_invariants(&report.pair)?;
        Ok(format!("n = 148, width {}, peak {} MB, {} A terms", widths[0], report.peak_bytes >> 20, report.pair.a.len()))
    });
}

#[test]
fn c08_strip_stretch() {
    if std::env::var_os("QWE_STRETCH").is_none() {
        report(format_args!("criterion 8 NOT RUN 3xN strip, N = 150 (set QWE_STRETCH=1; limit 3600 s)"));
        return;
    }
    criterion("8", "3xN strip, N = 150", 3600.0, || {
        let net = surface_code(3, 150, WeightScheme::double(2)).unwrap();
        let plan = net.plan(Strategy::Greedy);
        let report = net.code_report(&plan, DEFAULT_MEMORY_CAP).map_err(|e| e.to_string())?;
        ensure(report.pair.n == 748, || format!("n = {}", report.pair.n))?;
        strip_invariants(&report.pair)?;
        Ok(format!("n = 748, width {}, peak {} MB", plan.width, report.peak_bytes >> 20))
    });
}

/// `q^{-k} Σ_E χ(F, E) c_E` leg by leg, with `χ` read off `F† E F E†`.
fn wigner_diagonal(t: &TensorEnumerator, f: &PauliString) -> CycloPoly {
    let q = t.q();
    let m = t.rank();
    let field = t.field().clone();
    let mut out = CycloPoly::zero(&field, t.scheme(), false);
    for (key, c) in t.entries() {
        let (e, _) = t.key_strings(key);
        let mut root = 0i64;
        for j in 0..m {
            let fj = PhasedPauli::single(q, 1, 0, f.x()[j], f.z()[j]);
            let ej = PhasedPauli::single(q, 1, 0, e.x()[j], e.z()[j]);
            let prod = fj.dagger().mul(&ej).unwrap().mul(&fj).unwrap().mul(&ej.dagger()).unwrap();
            let phase = prod.normalized_trace().expect("commutator is a scalar");
            root += field.exponent_from(phase, phase_order(q)).unwrap();
        }
        out.add_assign(&c.mul_root(root)).unwrap();
    }
    out.scale_rational(&BigRational::new(BigInt::one(), BigInt::from(q).pow(m as u32)))
}

#[test]
fn c09_diagonal_and_wigner() {
    criterion("9", "diagonal logical enumerators, Wigner", 10.0, || {
        let codes = [
            ("[[5,1,3]]", five_qubit()),
            ("[[4,2,2]]", four_two_two()),
            ("[[7,1,3]]", steane()),
            ("[[4,1,2]]", bacon_shor_lego()),
            ("[[5,1,2]]", five_one_two()),
            ("qutrit [[3,1]]", qutrit_three()),
        ];
        for (name, g) in &codes {
            let q = g.q();
            let n = g.n();
            let block = LegoBlock::with_prefix(encoding(g), "l");
            let logical: Vec<String> = (n..n + g.k()).map(|i| format!("l{i}")).collect();
            let refs: Vec<&str> = logical.iter().map(String::as_str).collect();
            for scheme in [WeightScheme::shor_laflamme(q), WeightScheme::double(q)] {
                let t = TensorEnumerator::from_lego(&block, &refs, scheme, DEFAULT_GROUP_CAP).unwrap();
                ensure(t.is_diagonal(), || format!("{name} {scheme}: off-diagonal entries"))?;
                let psi = t.psi_transform().map_err(|e| e.to_string())?;
                ensure(psi.is_diagonal(), || format!("{name}: Ψ left the diagonal"))?;
                let m = t.rank();
                let qq = (q * q) as usize;
                for code in 0..qq.pow(m as u32) {
                    let codes: Vec<u8> = (0..m).map(|j| ((code / qq.pow(j as u32)) % qq) as u8).collect();
                    let f = PauliString::from_site_codes(q, &codes);
                    let want = wigner_diagonal(&t, &f);
                    let got = psi.entry(&f, &f);
                    let same = match &got {
                        Some(p) => *p == want,
                        None => want.is_zero(),
                    };
                    ensure(same, || format!("{name} {scheme} at {f}: {got:?} vs {want:?}"))?;
                }
            }
        }
        Ok(format!("{} encoding tensors", codes.len()))
    });
}

#[test]
fn c10_clifford_covariance() {
    criterion("10", "Clifford covariance", 10.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for i in 0..10 {
            let q = if i < 7 { 2 } else { 3 };
            let n = if q == 2 { rng.gen_range(3..=5) } else { 3 };
            let k = rng.gen_range(0..=1);
            let g = StabilizerGroup::random(q, n, k, &mut rng).unwrap();
            let j = rng.gen_range(0..n);
            let other = (j + 1) % n;
            let legs = [format!("l{j}"), format!("l{other}")];
            let refs = [legs[0].as_str(), legs[1].as_str()];
            let t = TensorEnumerator::from_lego(&LegoBlock::with_prefix(g.clone(), "l"), &refs, WeightScheme::shor_laflamme(q), DEFAULT_GROUP_CAP).unwrap();
            for u in [SiteClifford::hadamard(q), SiteClifford::phase_gate(q)] {
                let moved: Vec<PhasedPauli> = g.generators().iter().map(|s| u.conjugate(s, j)).collect();
                let g2 = StabilizerGroup::new(q, n, moved).unwrap();
                let t2 = TensorEnumerator::from_lego(&LegoBlock::with_prefix(g2, "l"), &refs, WeightScheme::shor_laflamme(q), DEFAULT_GROUP_CAP).unwrap();
                let lhs = t.lambda_clifford(&legs[0], &u).map_err(|e| e.to_string())?;
                ensure(lhs == t2, || format!("code {i} (q = {q}, n = {n}) leg {j}:\n{}\nvs\n{}", lhs.dump(), t2.dump()))?;
            }
        }
        Ok("10 codes, 2 Cliffords each".into())
    });
}
