//! Base PDA families.
//!
//! Each generator returns the array and, where the family is known to
//! satisfy the star-row condition with `lambda = 1`, an explicit
//! certificate.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::certificate::StarRowCertificate;
use crate::combinatorics::{subset_rank, subsets};
use crate::pda::{dense_relabel, Entry, Pda};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid parameters for {family}: {reason}")]
pub struct ParamError {
    pub family: &'static str,
    pub reason: String,
}

fn param_err(family: &'static str, reason: impl Into<String>) -> ParamError {
    ParamError {
        family,
        reason: reason.into(),
    }
}

/// `<x>_q`: the representative of `x mod q` in `[1:q]`.
fn cyc(x: i64, q: i64) -> i64 {
    (x - 1).rem_euclid(q) + 1
}

/// The `(z+1)`-regular MN array on `q` users.
///
/// Rows are the `z`-subsets of the users in lexicographic order; cell
/// `(T, k)` is a star when `k` is in `T` and otherwise the 1-based
/// lexicographic rank of `T + {k}` among the `(z+1)`-subsets.
pub fn mn_pda(q: usize, z: usize) -> Result<Pda, ParamError> {
    if z == 0 || z >= q {
        return Err(param_err(
            "mn",
            format!("need 1 <= z < q, got q = {q}, z = {z}"),
        ));
    }
    let rows = subsets(q, z);
    let codes = crate::combinatorics::binom(q, z + 1);
    let mut cells = Vec::with_capacity(rows.len() * q);
    for t in &rows {
        for k in 0..q {
            if t.contains(&k) {
                cells.push(Entry::Star);
            } else {
                let mut u = t.clone();
                let pos = u.partition_point(|&x| x < k);
                u.insert(pos, k);
                cells.push(Entry::Code(subset_rank(q, &u) as u32 + 1));
            }
        }
    }
    Ok(Pda::new(rows.len(), q, codes as u32, cells).expect("mn array is well formed"))
}

/// The `g`-regular square array with `q = ceil(g^2/2) + g` rows and users,
/// load 1, with its `lambda = 1` certificate `phi(s) = <s-1>_q`.
pub fn near_square_pda(g: usize) -> Result<(Pda, StarRowCertificate), ParamError> {
    if g == 0 {
        return Err(param_err("near-square", "g must be at least 1"));
    }
    let gi = g as i64;
    let z = (gi * gi + 1) / 2;
    let q = z + gi;
    let half = (gi + 1) / 2;
    let mut cells = Vec::with_capacity((q * q) as usize);
    for j in 1..=q {
        for k in 1..=q {
            if (k - j).rem_euclid(q) < z {
                cells.push(Entry::Star);
                continue;
            }
            let h = (j - k).rem_euclid(q);
            let s = if h <= half {
                cyc(j - (h - 1) * (gi + 2), q)
            } else {
                cyc(k - (gi - h) * (gi + 2), q)
            };
            cells.push(Entry::Code(s as u32));
        }
    }
    let p = Pda::new(q as usize, q as usize, q as u32, cells).expect("square array is well formed");
    let phi = (1..=q).map(|s| (cyc(s - 1, q) - 1) as usize).collect();
    Ok((p, StarRowCertificate::from_phi(1, phi, q as usize)))
}

/// Code label of the subset family: `(A xor B, A - B)`.
type SubsetLabel = (Vec<usize>, Vec<usize>);

/// The subset-intersection family on ground set `[1:H]`.
///
/// Rows are `b`-subsets and columns `a`-subsets, both lexicographic. Cell
/// `(B, A)` holds the label `(A xor B, A - B)` when `|A & B| = r` and a
/// star otherwise; labels become dense codes by first appearance. A
/// certificate mapping each code to row `A - B` is returned when `a = b + r`.
pub fn ytcc_pda(
    h: usize,
    a: usize,
    b: usize,
    r: usize,
) -> Result<(Pda, Option<StarRowCertificate>), ParamError> {
    if a == 0 || b == 0 || r == 0 {
        return Err(param_err("ytcc", "H, a, b, r must be positive"));
    }
    if a.max(b) >= h || r >= a.min(b) || a + b > h + r {
        return Err(param_err(
            "ytcc",
            format!("need max(a,b) < H, r < min(a,b), a + b <= H + r; got H = {h}, a = {a}, b = {b}, r = {r}"),
        ));
    }
    let rows = subsets(h, b);
    let cols = subsets(h, a);
    let mut labels: Vec<Option<SubsetLabel>> = Vec::with_capacity(rows.len() * cols.len());
    for bs in &rows {
        for as_ in &cols {
            let inter = as_.iter().filter(|x| bs.contains(x)).count();
            if inter != r {
                labels.push(None);
                continue;
            }
            let a_minus: Vec<usize> = as_.iter().copied().filter(|x| !bs.contains(x)).collect();
            let mut sym: Vec<usize> = a_minus.clone();
            sym.extend(bs.iter().copied().filter(|x| !as_.contains(x)));
            sym.sort_unstable();
            labels.push(Some((sym, a_minus)));
        }
    }
    let (cells, order) = dense_relabel(rows.len(), cols.len(), labels);
    let p = Pda::new(rows.len(), cols.len(), order.len() as u32, cells)
        .expect("subset array is well formed");
    let cert = (a == b + r).then(|| {
        let phi = order.iter().map(|(_, am)| subset_rank(h, am)).collect();
        StarRowCertificate::from_phi(1, phi, rows.len())
    });
    Ok((p, cert))
}

/// All vectors of `[1:q]^len` in lexicographic order.
fn vectors(q: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![1u32; len];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..len).rev().find(|&i| cur[i] < q) else {
            return out;
        };
        cur[i] += 1;
        for x in &mut cur[i + 1..] {
            *x = 1;
        }
    }
}

fn parity(prefix: &[u32], q: u32) -> u32 {
    cyc(prefix.iter().map(|&x| x as i64).sum(), q as i64) as u32
}

/// Lexicographic index of a row vector from its first `m - 1` coordinates.
fn row_index(prefix: &[u32], q: u32) -> usize {
    prefix
        .iter()
        .fold(0usize, |acc, &x| acc * q as usize + (x - 1) as usize)
}

/// Code label of the parity family: `(e, n_e)`.
type VectorLabel = (Vec<u32>, u32);

/// The parity-row family with `m` coordinates over `[1:q]` and
/// `t`-coordinate columns.
///
/// Rows are the vectors whose last coordinate is `<sum of the others>_q`,
/// ordered by their first `m - 1` coordinates. Columns are pairs `(T, b)`
/// with `T` a `t`-subset (lexicographic, outer) and `b` in `[1:q]^t`
/// (lexicographic, inner). When `f[T]` differs from `b` in every coordinate
/// the cell holds `(e, n_e)`, where `e` is `f` with `b` written into `T`
/// and `n_e` counts the occurrences of `e` in the column from the top.
/// A certificate is returned when `t >= 2`.
pub fn cwzw_pda(
    m: usize,
    q: usize,
    t: usize,
) -> Result<(Pda, Option<StarRowCertificate>), ParamError> {
    if t == 0 || t >= m || q < 2 {
        return Err(param_err(
            "cwzw",
            format!("need 1 <= t < m and q >= 2; got m = {m}, q = {q}, t = {t}"),
        ));
    }
    let qq = q as u32;
    let rows: Vec<Vec<u32>> = vectors(qq, m - 1)
        .into_iter()
        .map(|mut f| {
            f.push(parity(&f, qq));
            f
        })
        .collect();
    let cols: Vec<(Vec<usize>, Vec<u32>)> = subsets(m, t)
        .into_iter()
        .flat_map(|ts| vectors(qq, t).into_iter().map(move |b| (ts.clone(), b)))
        .collect();

    let mut grid: Vec<Option<VectorLabel>> = vec![None; rows.len() * cols.len()];
    for (k, (ts, b)) in cols.iter().enumerate() {
        let mut seen: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for (j, f) in rows.iter().enumerate() {
            if ts.iter().zip(b).any(|(&i, &bv)| f[i] == bv) {
                continue;
            }
            let mut e = f.clone();
            for (&i, &bv) in ts.iter().zip(b) {
                e[i] = bv;
            }
            let n = seen.entry(e.clone()).or_insert(0);
            *n += 1;
            grid[j * cols.len() + k] = Some((e, *n));
        }
    }
    let (cells, order) = dense_relabel(rows.len(), cols.len(), grid);
    let p = Pda::new(rows.len(), cols.len(), order.len() as u32, cells)
        .expect("parity array is well formed");
    let cert = (t >= 2).then(|| {
        let phi = order
            .iter()
            .map(|(e, _)| row_index(&e[..m - 1], qq))
            .collect();
        StarRowCertificate::from_phi(1, phi, rows.len())
    });
    Ok((p, cert))
}

/// `n` side-by-side copies of `p`, copy `i` (0-based) with codes shifted
/// by `i * S`.
pub fn replicate_users(p: &Pda, n: usize) -> Result<Pda, ParamError> {
    if n == 0 {
        return Err(param_err("group", "group count must be at least 1"));
    }
    let s = p.codes();
    let codes = (s as u64)
        .checked_mul(n as u64)
        .filter(|&c| c <= u32::MAX as u64)
        .ok_or_else(|| param_err("group", "code count overflows"))?;
    let mut cells = Vec::with_capacity(p.cell_count() * n);
    for j in 0..p.rows() {
        for i in 0..n as u32 {
            cells.extend(p.row(j).iter().map(|e| match *e {
                Entry::Star => Entry::Star,
                Entry::Code(c) => Entry::Code(c + i * s),
            }));
        }
    }
    Ok(Pda::new(p.rows(), p.cols() * n, codes as u32, cells).expect("replica is well formed"))
}
