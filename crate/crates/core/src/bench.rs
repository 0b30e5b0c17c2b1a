//! Exact evaluators for scheme families and the comparison tables built
//! from them.
//!
//! Every stored quantity is an exact integer or rational; floating point
//! only appears when a `log2 F` is rendered.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{binom_big, log2_big};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{family}: {reason}")]
pub struct BenchError {
    pub family: &'static str,
    pub reason: String,
}

fn bench_err(family: &'static str, reason: impl Into<String>) -> BenchError {
    BenchError {
        family,
        reason: reason.into(),
    }
}

fn q(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn qi(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn qb(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow_u(base: u64, exp: u64) -> BigUint {
    Pow::pow(BigUint::from(base), exp as u32)
}

fn ratio_str(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `(K, M/N, g, R, F)` of one scheme at concrete parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeEval {
    pub family: String,
    pub params: String,
    pub users: BigUint,
    pub memory_ratio: BigRational,
    pub gain: BigRational,
    pub load: BigRational,
    pub subpacketization: BigUint,
}

impl SchemeEval {
    pub fn log2_f(&self) -> f64 {
        log2_big(&self.subpacketization)
    }

    /// Serializable view with rationals as `a/b` strings.
    pub fn to_record(&self) -> EvalRecord {
        EvalRecord {
            family: self.family.clone(),
            params: self.params.clone(),
            users: self.users.to_string(),
            memory_ratio: ratio_str(&self.memory_ratio),
            gain: ratio_str(&self.gain),
            load: ratio_str(&self.load),
            subpacketization: self.subpacketization.to_string(),
            log2_f: format!("{:.6}", self.log2_f()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalRecord {
    pub family: String,
    pub params: String,
    pub users: String,
    pub memory_ratio: String,
    pub gain: String,
    pub load: String,
    pub subpacketization: String,
    pub log2_f: String,
}

/// MN scheme on `K` users with cache level `t`.
pub fn eval_mn(k: u64, t: u64) -> Result<SchemeEval, BenchError> {
    if t == 0 || t >= k {
        return Err(bench_err(
            "MN",
            format!("need 1 <= t <= K-1, got K = {k}, t = {t}"),
        ));
    }
    Ok(SchemeEval {
        family: "MN".into(),
        params: format!("K={k},t={t}"),
        users: k.into(),
        memory_ratio: q(t, k),
        gain: qi(t + 1),
        load: q(k - t, t + 1),
        subpacketization: binom_big(k, t),
    })
}

/// `n` independent groups of a `k`-user MN scheme.
pub fn eval_grouping(k: u64, t: u64, n: u64) -> Result<SchemeEval, BenchError> {
    if t == 0 || t >= k || n == 0 {
        return Err(bench_err(
            "Grouping",
            format!("need 1 <= t < k and n >= 1, got k = {k}, t = {t}, n = {n}"),
        ));
    }
    Ok(SchemeEval {
        family: "GroupedMN".into(),
        params: format!("k={k},t={t},n={n}"),
        users: BigUint::from(n) * k,
        memory_ratio: q(t, k),
        gain: qi(t + 1),
        load: q(n * (k - t), t + 1),
        subpacketization: binom_big(k, t),
    })
}

/// Product of the subset-intersection family with `a = b + r`.
pub fn eval_scheme_a(h: u64, b: u64, r: u64, m: u64) -> Result<SchemeEval, BenchError> {
    if r == 0 || r >= b || 2 * b > h || m == 0 {
        return Err(bench_err(
            "SchemeA",
            format!("need 1 <= r < b <= H/2 and m >= 1, got H = {h}, b = {b}, r = {r}, m = {m}"),
        ));
    }
    let fb = binom_big(h, b);
    let lost = binom_big(b + r, r) * binom_big(h - b - r, b - r);
    Ok(SchemeEval {
        family: "SchemeA".into(),
        params: format!("H={h},b={b},r={r},m={m}"),
        users: binom_big(h, b + r) * m,
        memory_ratio: qi(1) - qb(lost) / qb(fb.clone()),
        gain: qb(binom_big(h - 2 * b + r, r) * m),
        load: qb(binom_big(h - b, b - r)),
        subpacketization: Pow::pow(fb, m as u32),
    })
}

/// Product of the near-square family: load 1.
pub fn eval_scheme_b(g: u64, m: u64) -> Result<SchemeEval, BenchError> {
    if g == 0 || m == 0 {
        return Err(bench_err("SchemeB", "need g >= 1 and m >= 1"));
    }
    let z = (g * g).div_ceil(2);
    let qq = z + g;
    Ok(SchemeEval {
        family: "SchemeB".into(),
        params: format!("g={g},m={m}"),
        users: BigUint::from(m * qq),
        memory_ratio: q(z, qq),
        gain: qi(m * g),
        load: qi(1),
        subpacketization: pow_u(qq, m),
    })
}

/// Product of the downgraded MN array on `q` users with cache level `z`.
/// At `m = 1` this is the downgraded array itself.
pub fn eval_scheme_c(qq: u64, z: u64, m: u64) -> Result<SchemeEval, BenchError> {
    if z == 0 || z >= qq || m == 0 {
        return Err(bench_err(
            "SchemeC",
            format!("need 1 <= z < q and m >= 1, got q = {qq}, z = {z}, m = {m}"),
        ));
    }
    Ok(SchemeEval {
        family: "SchemeC".into(),
        params: format!("q={qq},z={z},m={m}"),
        users: BigUint::from(m * qq),
        memory_ratio: q(z, qq),
        gain: qi(m * z),
        load: q(qq - z, z),
        subpacketization: Pow::pow(binom_big(qq, z), m as u32) * z,
    })
}

/// Closed-form rows of previously published schemes, evaluated as formulas.
pub mod table_rows {
    use super::*;

    /// Partition scheme, small-memory point: `(n+1)k` users, ratio `1/k`.
    pub fn partition_low(n: u64, k: u64) -> Result<SchemeEval, BenchError> {
        if n == 0 || k < 2 {
            return Err(bench_err("Partition", "need n >= 1 and k >= 2"));
        }
        Ok(SchemeEval {
            family: "TableRow(Partition)".into(),
            params: format!("n={n},k={k},point=1"),
            users: BigUint::from((n + 1) * k),
            memory_ratio: q(1, k),
            gain: qi(n + 1),
            load: qi(k - 1),
            subpacketization: pow_u(k, n),
        })
    }

    /// Partition scheme, large-memory point: ratio `(k-1)/k`.
    pub fn partition_high(n: u64, k: u64) -> Result<SchemeEval, BenchError> {
        if n == 0 || k < 2 {
            return Err(bench_err("Partition", "need n >= 1 and k >= 2"));
        }
        Ok(SchemeEval {
            family: "TableRow(Partition)".into(),
            params: format!("n={n},k={k},point=2"),
            users: BigUint::from((n + 1) * k),
            memory_ratio: q(k - 1, k),
            gain: qi((n + 1) * (k - 1)),
            load: q(1, k - 1),
            subpacketization: pow_u(k, n) * (k - 1),
        })
    }

    fn check_szg(n: u64, k: u64, b: u64) -> Result<(), BenchError> {
        if n == 0 || k < 2 || b == 0 || b > n {
            return Err(bench_err("SZG", "need n, b >= 1, k >= 2 and b <= n"));
        }
        Ok(())
    }

    /// Hypergraph scheme, ratio `1 - ((k-1)/k)^b`.
    pub fn szg_low(n: u64, k: u64, b: u64) -> Result<SchemeEval, BenchError> {
        check_szg(n, k, b)?;
        let kb = pow_u(k, b);
        let k1b = pow_u(k - 1, b);
        Ok(SchemeEval {
            family: "TableRow(SZG)".into(),
            params: format!("n={n},k={k},b={b},point=1"),
            users: binom_big(n, b) * &kb,
            memory_ratio: qi(1) - qb(k1b.clone()) / qb(kb),
            gain: qb(binom_big(n, b)),
            load: qb(k1b),
            subpacketization: pow_u(k, n),
        })
    }

    /// Hypergraph scheme, ratio `1 - 1/k^b`.
    pub fn szg_high(n: u64, k: u64, b: u64) -> Result<SchemeEval, BenchError> {
        check_szg(n, k, b)?;
        let kb = pow_u(k, b);
        let k1b = pow_u(k - 1, b);
        Ok(SchemeEval {
            family: "TableRow(SZG)".into(),
            params: format!("n={n},k={k},b={b},point=2"),
            users: binom_big(n, b) * &kb,
            memory_ratio: qi(1) - qi(1) / qb(kb),
            gain: qb(&k1b * binom_big(n, b)),
            load: qi(1) / qb(k1b.clone()),
            subpacketization: k1b * pow_u(k, n),
        })
    }

    fn floor_term(k: u64, t: u64) -> Result<u64, BenchError> {
        if t == 0 || t >= k {
            return Err(bench_err(
                "CJYT",
                format!("need 1 <= t < k, got k = {k}, t = {t}"),
            ));
        }
        Ok((k - 1) / (k - t))
    }

    /// Generalized scheme, first form: `(n+1)k` users, ratio `t/k`.
    pub fn cjyt_low(n: u64, k: u64, t: u64) -> Result<SchemeEval, BenchError> {
        let fl = floor_term(k, t)?;
        Ok(SchemeEval {
            family: "TableRow(CJYT)".into(),
            params: format!("k={k},t={t},n={n}"),
            users: BigUint::from((n + 1) * k),
            memory_ratio: q(t, k),
            gain: qi((n + 1) * fl),
            load: q(k - t, fl),
            subpacketization: pow_u(k, n) * fl,
        })
    }

    /// Generalized scheme, second form: ratio `1 - ((k-t)/k)^b`.
    pub fn cjyt_high(n: u64, k: u64, t: u64, b: u64) -> Result<SchemeEval, BenchError> {
        let fl = floor_term(k, t)?;
        if b == 0 || b > n {
            return Err(bench_err("CJYT", "need 1 <= b <= n"));
        }
        let kb = pow_u(k, b);
        Ok(SchemeEval {
            family: "TableRow(CJYT)".into(),
            params: format!("k={k},t={t},n={n},b={b}"),
            users: binom_big(n, b) * &kb,
            memory_ratio: qi(1) - qb(pow_u(k - t, b)) / qb(kb),
            gain: qb(pow_u(fl, b) * binom_big(n, b)),
            load: Pow::pow(q(k - t, fl), b as u32),
            subpacketization: pow_u(fl, b) * pow_u(k, n),
        })
    }

    fn check_tr(n: u64, l: u64, k: u64, x: u64) -> Result<(), BenchError> {
        if n == 0 || n >= l || k < 2 || x == 0 || !(l * x).is_multiple_of(n + 1) {
            return Err(bench_err(
                "TR",
                format!(
                    "need n < l, k >= 2 and (n+1) | l x; got n = {n}, l = {l}, k = {k}, x = {x}"
                ),
            ));
        }
        Ok(())
    }

    /// Linear-code scheme, ratio `1/k`.
    pub fn tr_low(k: u64, l: u64, n: u64, x: u64) -> Result<SchemeEval, BenchError> {
        check_tr(n, l, k, x)?;
        Ok(SchemeEval {
            family: "TableRow(TR)".into(),
            params: format!("k={k},l={l},n={n},x={x},point=1"),
            users: BigUint::from(l * k),
            memory_ratio: q(1, k),
            gain: qi(n + 1),
            load: q(l * (k - 1), n + 1),
            subpacketization: pow_u(k, n) * x,
        })
    }

    /// Linear-code scheme, ratio `1 - (n+1)/(lk)`.
    pub fn tr_high(k: u64, l: u64, n: u64, x: u64) -> Result<SchemeEval, BenchError> {
        check_tr(n, l, k, x)?;
        Ok(SchemeEval {
            family: "TableRow(TR)".into(),
            params: format!("k={k},l={l},n={n},x={x},point=2"),
            users: BigUint::from(l * k),
            memory_ratio: qi(1) - q(n + 1, l * k),
            gain: qi(l * (k - 1)),
            load: q(n + 1, l * (k - 1)),
            subpacketization: pow_u(k, n) * (k - 1) * (l * x / (n + 1)),
        })
    }
}

/// One line of a comparison table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompareEntry {
    Exact(Box<SchemeEval>),
    /// Printed values of a memory-sharing combination, kept verbatim.
    Reference {
        family: &'static str,
        params: &'static str,
        load: &'static str,
        subpacketization: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareRow {
    pub block: &'static str,
    pub entry: CompareEntry,
}

fn exact(block: &'static str, e: Result<SchemeEval, BenchError>) -> CompareRow {
    CompareRow {
        block,
        entry: CompareEntry::Exact(Box::new(e.expect("table parameters are in range"))),
    }
}

fn reference(
    block: &'static str,
    family: &'static str,
    params: &'static str,
    load: &'static str,
    subpacketization: &'static str,
) -> CompareRow {
    CompareRow {
        block,
        entry: CompareEntry::Reference {
            family,
            params,
            load,
            subpacketization,
        },
    }
}

/// Rows of comparison table `3` (subset-family product) or `4`
/// (near-square product) at fold `m`.
pub fn compare_table(table: u32, m: u64) -> Result<Vec<CompareRow>, BenchError> {
    use table_rows::*;
    if m == 0 {
        return Err(bench_err("compare", "m must be at least 1"));
    }
    match table {
        3 => {
            let b1 = "K=56m,M/N=13/28";
            let b2 = "K=165m,M/N=31/55";
            Ok(vec![
                exact(b1, eval_scheme_a(8, 3, 2, m)),
                reference(
                    b1,
                    "Grouping+sharing",
                    "n=8,k=7m,t=3m|4m",
                    "~9.5",
                    "O(m^-1/2 119^m)",
                ),
                exact(b1, cjyt_low(2 * m - 1, 28, 13)),
                reference(
                    b1,
                    "TR+sharing",
                    "k=4,l=14m,n=14m-1,x=1|k=2,l=28m,n=28m-1,x=1",
                    "1.1429",
                    "O(16384^(2m))",
                ),
                exact(b2, eval_scheme_a(11, 2, 1, m)),
                reference(
                    b2,
                    "Grouping+sharing",
                    "n=15,k=11m,t=6m|7m",
                    "~11.7143",
                    "O(m^-1/2 1957^m)",
                ),
                exact(b2, cjyt_low(3 * m - 1, 55, 31)),
                reference(
                    b2,
                    "TR+sharing",
                    "k=3,l=55m,n=55m-1,x=1|k=3,l=55m,n=54m-1,x=54",
                    "0.976",
                    "O(177147^(5m))",
                ),
            ])
        }
        4 => {
            let b1 = "K=24m,M/N=3/4";
            let b2 = "K=32m,M/N=25/32";
            Ok(vec![
                exact(b1, eval_scheme_b(6, m)),
                exact(b1, eval_grouping(8 * m, 6 * m, 3)),
                exact(b1, cjyt_low(6 * m - 1, 4, 3)),
                exact(b1, tr_high(3, 8 * m, 6 * m - 1, 3)),
                exact(b2, eval_scheme_b(7, m)),
                reference(
                    b2,
                    "Grouping+sharing",
                    "n=4,k=8m,t=6m|7m",
                    "~1",
                    "O(m^-1/2 90^m)",
                ),
                exact(b2, cjyt_low(m - 1, 32, 25)),
                exact(b2, tr_high(4, 8 * m, 7 * m - 1, 7)),
            ])
        }
        _ => Err(bench_err(
            "compare",
            format!("unknown table {table}, expected 3 or 4"),
        )),
    }
}

pub const COMPARE_HEADER: &str = "block,m,family,params,K,ratio,gain,load,F,log2F,kind";

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV rendering of comparison rows; identical input gives identical bytes.
pub fn render_compare_csv(rows: &[(u64, CompareRow)]) -> String {
    let mut out = String::new();
    writeln!(out, "{COMPARE_HEADER}").unwrap();
    for (m, row) in rows {
        let fields: Vec<String> = match &row.entry {
            CompareEntry::Exact(e) => {
                let r = e.to_record();
                vec![
                    row.block.into(),
                    m.to_string(),
                    r.family,
                    r.params,
                    r.users,
                    r.memory_ratio,
                    r.gain,
                    r.load,
                    r.subpacketization,
                    r.log2_f,
                    "exact".into(),
                ]
            }
            CompareEntry::Reference {
                family,
                params,
                load,
                subpacketization,
            } => vec![
                row.block.into(),
                m.to_string(),
                (*family).into(),
                (*params).into(),
                String::new(),
                String::new(),
                String::new(),
                (*load).into(),
                (*subpacketization).into(),
                String::new(),
                "reference".into(),
            ],
        };
        let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    out
}

/// Exact comparison of the downgraded-MN product against MN itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioBound {
    /// `z C(q,z)^m / C(mq, mz)`.
    pub ratio: BigRational,
    /// `C(q,z) z^z (q-z)^(q-z) / q^q`, at most `1/2`.
    pub base: BigRational,
    /// `base^m`, the exponential factor of the asymptotic estimate.
    pub decay: BigRational,
    /// `2 C(q,z) z^z (q-z)^(q-z) <= q^q`.
    pub inequality_holds: bool,
}

/// `C(q,z) z^z (q-z)^(q-z)` and `q^q`.
pub fn binomial_expansion_terms(qq: u64, z: u64) -> (BigUint, BigUint) {
    let term = binom_big(qq, z) * pow_u(z, z) * pow_u(qq - z, qq - z);
    (term, pow_u(qq, qq))
}

pub fn subpacketization_ratio_bound(qq: u64, z: u64, m: u64) -> Result<RatioBound, BenchError> {
    if m < 2 {
        return Err(bench_err("SchemeC", format!("need m >= 2, got {m}")));
    }
    let c = eval_scheme_c(qq, z, m)?;
    let mn = eval_mn(m * qq, m * z)?;
    let (term, full) = binomial_expansion_terms(qq, z);
    let base = qb(term.clone()) / qb(full.clone());
    Ok(RatioBound {
        ratio: qb(c.subpacketization) / qb(mn.subpacketization),
        decay: Pow::pow(base.clone(), m as u32),
        base,
        inequality_holds: term * 2u32 <= full,
    })
}

/// A row of the memory/load/subpacketization tradeoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffRow {
    /// `MN`, `MN-lower`, `MN-upper` or `C`.
    pub scheme: &'static str,
    pub ratio: BigRational,
    pub load: BigRational,
    pub subpacketization: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skipped {
    pub scheme: &'static str,
    pub ratio: BigRational,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TradeoffTable {
    pub rows: Vec<TradeoffRow>,
    pub skipped: Vec<Skipped>,
}

pub const TRADEOFF_HEADER: &str = "scheme,ratio_num,ratio_den,load_num,load_den,log2F";

fn mn_point(scheme: &'static str, k: u64, t: u64) -> TradeoffRow {
    TradeoffRow {
        scheme,
        ratio: q(t, k),
        load: q(k - t, t + 1),
        subpacketization: binom_big(k, t),
    }
}

/// MN and downgraded-MN product points for `K` users at each memory ratio.
///
/// MN needs `ratio * K` to be an integer; otherwise both neighbouring
/// integer points are emitted as `MN-lower` and `MN-upper`. The product
/// scheme needs the reduced ratio `z/q` to have `q | K` with `K/q >= 2`
/// and `0 < z < q`.
pub fn tradeoff_table(k: u64, ratios: &[BigRational]) -> Result<TradeoffTable, BenchError> {
    if k == 0 {
        return Err(bench_err("tradeoff", "K must be positive"));
    }
    let mut table = TradeoffTable::default();
    for r in ratios {
        if r < &BigRational::zero() || r > &BigRational::one() {
            table.skipped.push(Skipped {
                scheme: "MN",
                ratio: r.clone(),
                reason: "ratio outside [0, 1]".into(),
            });
            continue;
        }
        let kt = r * qi(k);
        if kt.is_integer() {
            let t = kt.numer().to_u64().unwrap();
            table.rows.push(mn_point("MN", k, t));
        } else {
            let lo = kt.floor().numer().to_u64().unwrap();
            table.rows.push(mn_point("MN-lower", k, lo));
            table.rows.push(mn_point("MN-upper", k, lo + 1));
        }

        let z = r.numer().to_u64().unwrap();
        let qq = r.denom().to_u64().unwrap();
        let reason = if z == 0 || z >= qq {
            Some(format!("needs 0 < z < q, got {z}/{qq}"))
        } else if !k.is_multiple_of(qq) {
            Some(format!("q = {qq} does not divide K = {k}"))
        } else if k / qq < 2 {
            Some(format!("K/q = {} is below 2", k / qq))
        } else {
            None
        };
        match reason {
            Some(reason) => table.skipped.push(Skipped {
                scheme: "C",
                ratio: r.clone(),
                reason,
            }),
            None => {
                let e = eval_scheme_c(qq, z, k / qq)?;
                table.rows.push(TradeoffRow {
                    scheme: "C",
                    ratio: e.memory_ratio,
                    load: e.load,
                    subpacketization: e.subpacketization,
                });
            }
        }
    }
    Ok(table)
}

impl TradeoffTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{TRADEOFF_HEADER}").unwrap();
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                row.scheme,
                row.ratio.numer(),
                row.ratio.denom(),
                row.load.numer(),
                row.load.denom(),
                log2_big(&row.subpacketization)
            )
            .unwrap();
        }
        out
    }
}
