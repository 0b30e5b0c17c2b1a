use pdakit::{
    find_certificate, read_pda, search_certificate, verify_certificate, write_pda, Entry, Pda,
    Rule, StarRowCertificate,
};
use proptest::prelude::*;

/// Random grid of stars and codes, not necessarily a PDA.
fn arb_grid() -> impl Strategy<Value = (usize, usize, u32, Vec<u32>)> {
    (1usize..=5, 1usize..=5, 1u32..=6).prop_flat_map(|(f, k, s)| {
        (
            Just(f),
            Just(k),
            Just(s),
            proptest::collection::vec(0..=s, f * k),
        )
    })
}

/// Valid PDA built from a star mask with `z` stars per column, distinct
/// codes on every other cell, then greedy merges that keep C3.
fn arb_pda(max_cells: usize) -> impl Strategy<Value = Pda> {
    (1usize..=6, 1usize..=6)
        .prop_filter("size", move |(f, k)| f * k <= max_cells)
        .prop_flat_map(|(f, k)| {
            (
                Just(f),
                Just(k),
                0..f,
                proptest::collection::vec(any::<u32>(), k),
                proptest::collection::vec((any::<u16>(), any::<u16>()), 0..40),
            )
        })
        .prop_map(|(f, k, z, shifts, merges)| build_pda(f, k, z, &shifts, &merges))
}

fn build_pda(f: usize, k: usize, z: usize, shifts: &[u32], merges: &[(u16, u16)]) -> Pda {
    let mut star = vec![false; f * k];
    for (c, &sh) in shifts.iter().enumerate() {
        let start = sh as usize % f;
        for i in 0..z {
            star[((start + i) % f) * k + c] = true;
        }
    }
    let mut code = vec![0u32; f * k];
    let mut next = 0;
    for i in 0..f * k {
        if !star[i] {
            next += 1;
            code[i] = next;
        }
    }
    for &(a, b) in merges {
        if next < 2 {
            break;
        }
        let a = a as u32 % next + 1;
        let b = b as u32 % next + 1;
        if a == b {
            continue;
        }
        let mut trial = code.clone();
        for v in trial.iter_mut() {
            if *v == b {
                *v = a;
            }
        }
        if c3_ok(f, k, &trial) {
            code = trial;
        }
    }
    let mut ids = std::collections::BTreeMap::new();
    let rows: Vec<Vec<u32>> = (0..f)
        .map(|r| {
            (0..k)
                .map(|c| match code[r * k + c] {
                    0 => 0,
                    v => {
                        let n = ids.len() as u32 + 1;
                        *ids.entry(v).or_insert(n)
                    }
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
    Pda::from_code_rows(&refs).unwrap()
}

fn c3_ok(f: usize, k: usize, code: &[u32]) -> bool {
    for a in 0..f * k {
        for b in a + 1..f * k {
            if code[a] == 0 || code[a] != code[b] {
                continue;
            }
            let (r1, c1, r2, c2) = (a / k, a % k, b / k, b % k);
            if r1 == r2 || c1 == c2 || code[r1 * k + c2] != 0 || code[r2 * k + c1] != 0 {
                return false;
            }
        }
    }
    true
}

/// Direct reading of the three rules.
fn oracle_is_pda(f: usize, k: usize, s: u32, cells: &[u32]) -> bool {
    let z = (0..f).filter(|&r| cells[r * k] == 0).count();
    let c1 = (0..k).all(|c| (0..f).filter(|&r| cells[r * k + c] == 0).count() == z);
    let c2 = (1..=s).all(|v| cells.contains(&v));
    c1 && c2 && c3_ok(f, k, cells)
}

fn codes_of(p: &Pda) -> Vec<u32> {
    p.cells().iter().map(|e| e.code().unwrap_or(0)).collect()
}

fn oracle_star_rows(p: &Pda, s: u32) -> Vec<usize> {
    let cols: Vec<usize> = (0..p.cols())
        .filter(|&c| (0..p.rows()).any(|r| p.get(r, c) == Entry::Code(s)))
        .collect();
    (0..p.rows())
        .filter(|&r| cols.iter().all(|&c| p.get(r, c).is_star()))
        .collect()
}

/// Exhaustive search for a balanced star-row assignment.
fn oracle_certificate_exists(p: &Pda, lambda: usize) -> bool {
    let f = p.rows();
    let s = p.codes() as usize;
    if lambda == 0 || !f.is_multiple_of(lambda) || !(lambda * s).is_multiple_of(f) {
        return false;
    }
    let block = f / lambda;
    for r in block..f {
        for c in 0..p.cols() {
            if p.get(r, c).is_star() != p.get(r % block, c).is_star() {
                return false;
            }
        }
    }
    let cap = lambda * s / f;
    let options: Vec<Vec<usize>> = (1..=s as u32)
        .map(|v| {
            oracle_star_rows(p, v)
                .into_iter()
                .filter(|&r| r < block)
                .collect()
        })
        .collect();
    let mut load = vec![0usize; block];
    fn assign(i: usize, options: &[Vec<usize>], load: &mut [usize], cap: usize) -> bool {
        if i == options.len() {
            return load.iter().all(|&l| l == cap);
        }
        for &r in &options[i] {
            if load[r] < cap {
                load[r] += 1;
                if assign(i + 1, options, load, cap) {
                    return true;
                }
                load[r] -= 1;
            }
        }
        false
    }
    assign(0, &options, &mut load, cap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn verify_agrees_with_rule_oracle((f, k, s, cells) in arb_grid()) {
        let rows: Vec<Vec<Entry>> = (0..f)
            .map(|r| (0..k).map(|c| match cells[r * k + c] {
                0 => Entry::Star,
                v => Entry::Code(v),
            }).collect())
            .collect();
        let p = Pda::from_rows(&rows, s).unwrap();
        let report = p.verify();
        prop_assert_eq!(report.ok, oracle_is_pda(f, k, s, &cells));
        for v in &report.violations {
            if v.rule == Rule::C3 {
                let (r1, c1) = (v.row.unwrap(), v.col.unwrap());
                let (r2, c2) = (v.row2.unwrap(), v.col2.unwrap());
                prop_assert_eq!(p.get(r1, c1), p.get(r2, c2));
            }
        }
    }

    #[test]
    fn generated_arrays_verify(p in arb_pda(36)) {
        prop_assert!(p.verify().ok);
        prop_assert!(oracle_is_pda(p.rows(), p.cols(), p.codes(), &codes_of(&p)));
    }

    #[test]
    fn star_rows_match_definition(p in arb_pda(36)) {
        for s in 1..=p.codes() {
            prop_assert_eq!(p.star_rows_for(s), oracle_star_rows(&p, s));
        }
    }

    #[test]
    fn certificate_search_is_exact(p in arb_pda(24)) {
        for lambda in 1..=p.rows() {
            let expected = oracle_certificate_exists(&p, lambda);
            match find_certificate(&p, lambda) {
                Ok(cert) => {
                    prop_assert!(expected);
                    prop_assert!(verify_certificate(&p, &cert).ok);
                }
                Err(_) => prop_assert!(!expected),
            }
        }
        let any = (1..=p.rows()).any(|l| oracle_certificate_exists(&p, l));
        prop_assert_eq!(search_certificate(&p).is_ok(), any);
    }

    #[test]
    fn text_roundtrip(p in arb_pda(36)) {
        let text = write_pda(&p);
        prop_assert_eq!(read_pda(&text).unwrap(), p.clone());
        prop_assert_eq!(write_pda(&read_pda(&text).unwrap()), text);
    }

    #[test]
    fn certificate_json_roundtrip(p in arb_pda(24)) {
        if let Ok(cert) = search_certificate(&p) {
            let back = StarRowCertificate::from_json(&cert.to_json()).unwrap();
            prop_assert_eq!(back, cert);
        }
    }
}
