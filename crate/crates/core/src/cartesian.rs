//! Cartesian-power frameworks.
//!
//! [`cartesian_power`] builds the `m`-fold product of a base PDA whose
//! star rows admit a certificate; its cells are vectors of base codes.
//! [`flatten`] maps those vectors onto dense integers. [`downgrade_regular`]
//! turns a `g`-regular PDA with equal row star counts into a
//! `(g-1)`-regular PDA that always has a certificate with `lambda = g - 1`,
//! so any such array can seed the product.

use std::fmt;

use thiserror::Error;

use crate::certificate::{verify_certificate, StarRowCertificate};
use crate::pda::{Entry, Pda};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CartesianError {
    #[error("base array is not a PDA: {0}")]
    InvalidBase(String),
    #[error("certificate rejected: {0}")]
    InvalidCertificate(String),
    #[error("fold m must be at least {min}, got {m}")]
    Fold { m: usize, min: usize },
    #[error("base array is not regular")]
    NotRegular,
    #[error("base array is {g}-regular, need g >= 2")]
    GainTooSmall { g: u64 },
    #[error("rows of the base array have different star counts")]
    Condition2,
    #[error("result too large: {0}")]
    TooLarge(String),
}

/// A non-star cell of a product array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeVector {
    /// Base codes, one per fold.
    pub e: Vec<u32>,
    /// 0-based position inside its partition set, shared by every coordinate.
    pub mu: usize,
    /// 0-based partition set of each coordinate.
    pub l: Vec<usize>,
}

impl fmt::Display for CodeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.e.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// The `m`-fold product array with vector cells.
///
/// Rows are the tuples `f` whose coordinates all lie in one block of
/// `F1 / lambda` base rows; blocks come in order and within a block the
/// first coordinate varies fastest. Columns are `(delta, b)` with `delta`
/// outer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorPda {
    base_users: usize,
    base_rows: usize,
    base_stars: usize,
    base_codes: u32,
    lambda: usize,
    m: usize,
    rows: usize,
    /// Row-major, `m` base codes per cell; all zero for a star.
    cells: Vec<u32>,
    /// `(l, mu)` of every base code.
    positions: Vec<(usize, usize)>,
}

impl VectorPda {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.m * self.base_users
    }

    pub fn fold(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `(K1, F1, Z1, S1)` of the base array.
    pub fn base_params(&self) -> (usize, usize, usize, u32) {
        (
            self.base_users,
            self.base_rows,
            self.base_stars,
            self.base_codes,
        )
    }

    /// 0-based base row of every coordinate of row `r`.
    pub fn row_tuple(&self, r: usize) -> Vec<usize> {
        let n = self.base_rows / self.lambda;
        let per_block = n.pow(self.m as u32);
        let block = r / per_block;
        let mut rest = r % per_block;
        (0..self.m)
            .map(|_| {
                let x = rest % n;
                rest /= n;
                block * n + x
            })
            .collect()
    }

    /// `(delta, b)` of column `c`, both 0-based.
    pub fn column_id(&self, c: usize) -> (usize, usize) {
        (c / self.base_users, c % self.base_users)
    }

    pub fn get(&self, r: usize, c: usize) -> Option<CodeVector> {
        let at = (r * self.cols() + c) * self.m;
        let e = &self.cells[at..at + self.m];
        if e[0] == 0 {
            return None;
        }
        let mu = self.positions[e[0] as usize - 1].1;
        let l = e
            .iter()
            .map(|&x| self.positions[x as usize - 1].0)
            .collect();
        Some(CodeVector {
            e: e.to_vec(),
            mu,
            l,
        })
    }

    /// Distinct vectors present in the array.
    pub fn distinct_vectors(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for cell in self.cells.chunks(self.m) {
            if cell[0] != 0 {
                seen.insert(cell);
            }
        }
        seen.len()
    }
}

/// One line per row, cells separated by spaces, vectors as `(a,b,..)`.
impl fmt::Display for VectorPda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                match self.get(r, c) {
                    None => f.write_str("*")?,
                    Some(v) => write!(f, "{v}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize, what: &str) -> Result<usize, CartesianError> {
    base.checked_pow(exp as u32)
        .ok_or_else(|| CartesianError::TooLarge(format!("{what} = {base}^{exp} overflows")))
}

fn check_base(p1: &Pda, cert: &StarRowCertificate) -> Result<(), CartesianError> {
    let report = p1.verify();
    if let Some(v) = report.violations.first() {
        return Err(CartesianError::InvalidBase(v.msg.clone()));
    }
    let report = verify_certificate(p1, cert);
    if let Some(v) = report.violations.first() {
        return Err(CartesianError::InvalidCertificate(v.msg.clone()));
    }
    Ok(())
}

/// The `m`-fold product of `p1` driven by `cert`.
///
/// Cell `(f, (delta, b))` is a star iff `p1(f_delta, b)` is; otherwise,
/// writing `p1(f_delta, b) = B_l[mu]`, coordinate `delta` is that code and
/// every other coordinate `h` is `B_{f_h mod F1/lambda}[mu]`.
pub fn cartesian_power(
    p1: &Pda,
    cert: &StarRowCertificate,
    m: usize,
) -> Result<VectorPda, CartesianError> {
    if m == 0 {
        return Err(CartesianError::Fold { m, min: 1 });
    }
    check_base(p1, cert)?;
    let lambda = cert.lambda;
    let n = p1.rows() / lambda;
    let per_block = checked_pow(n, m, "rows per block")?;
    let rows = per_block
        .checked_mul(lambda)
        .ok_or_else(|| CartesianError::TooLarge("row count overflows".into()))?;
    let k1 = p1.cols();
    let cols = m * k1;
    let len = rows
        .checked_mul(cols)
        .and_then(|x| x.checked_mul(m))
        .ok_or_else(|| CartesianError::TooLarge("cell count overflows".into()))?;
    let positions = cert.positions();

    let mut cells = vec![0u32; len];
    let mut f = vec![0usize; m];
    for r in 0..rows {
        let block = r / per_block;
        let mut rest = r % per_block;
        for x in f.iter_mut() {
            *x = block * n + rest % n;
            rest /= n;
        }
        for delta in 0..m {
            for b in 0..k1 {
                let Entry::Code(s) = p1.get(f[delta], b) else {
                    continue;
                };
                let mu = positions[s as usize - 1].1;
                let at = (r * cols + delta * k1 + b) * m;
                for h in 0..m {
                    cells[at + h] = if h == delta {
                        s
                    } else {
                        cert.b_sets[f[h] % n][mu]
                    };
                }
            }
        }
    }

    Ok(VectorPda {
        base_users: k1,
        base_rows: p1.rows(),
        base_stars: p1.stars_per_column().expect("verified base"),
        base_codes: p1.codes(),
        lambda,
        m,
        rows,
        cells,
        positions,
    })
}

/// Replaces every vector `e` by
/// `psi(e) = e_1 + S1 * sum_{h >= 2} l_h * (F1/lambda)^(h-2)` with 0-based
/// partition indices `l_h`, a bijection onto `[1 : S1 (F1/lambda)^(m-1)]`.
pub fn flatten(v: &VectorPda) -> Result<Pda, CartesianError> {
    let n = (v.base_rows / v.lambda) as u64;
    let s1 = v.base_codes as u64;
    let codes = (n as u128).pow(v.m as u32 - 1) * s1 as u128;
    if codes > u32::MAX as u128 {
        return Err(CartesianError::TooLarge(format!(
            "{codes} codes do not fit in 32 bits"
        )));
    }
    let cells = v
        .cells
        .chunks(v.m)
        .map(|e| {
            if e[0] == 0 {
                return Entry::Star;
            }
            let mut acc = 0u64;
            for &x in e[1..].iter().rev() {
                acc = acc * n + v.positions[x as usize - 1].0 as u64;
            }
            Entry::Code((e[0] as u64 + s1 * acc) as u32)
        })
        .collect();
    Ok(Pda::new(v.rows, v.cols(), codes as u32, cells).expect("flattened array is well formed"))
}

/// Positions of every code ordered by ascending column.
fn occurrences_by_column(p: &Pda) -> Vec<Vec<(usize, usize)>> {
    let mut occ = p.occurrences();
    for list in &mut occ {
        list.sort_by_key(|&(j, k)| (k, j));
    }
    occ
}

/// Stacks `g - 1` copies of a `g`-regular array; in copy `i` (0-based) the
/// `eta`-th occurrence (1-based, by column) of code `s` becomes
/// `g (s - 1) + <eta + i>_g`.
///
/// The returned certificate has `lambda = g - 1` and assigns the new code
/// `g (s - 1) + v` to the base row of the `<v + 1>_g`-th occurrence of `s`.
pub fn downgrade_regular(p: &Pda) -> Result<(Pda, StarRowCertificate), CartesianError> {
    if let Some(v) = p.verify().violations.first() {
        return Err(CartesianError::InvalidBase(v.msg.clone()));
    }
    let params = p
        .params()
        .map_err(|e| CartesianError::InvalidBase(e.to_string()))?;
    let g = params.regularity.ok_or(CartesianError::NotRegular)?;
    if g < 2 {
        return Err(CartesianError::GainTooSmall { g });
    }
    if !p.check_condition2() {
        return Err(CartesianError::Condition2);
    }
    let g = g as usize;
    let codes = (p.codes() as u64) * g as u64;
    if codes > u32::MAX as u64 {
        return Err(CartesianError::TooLarge(format!("{codes} codes")));
    }

    let f = p.rows();
    let k = p.cols();
    let occ = occurrences_by_column(p);
    // eta (0-based) of every cell.
    let mut eta = vec![0usize; f * k];
    for list in &occ {
        for (i, &(j, c)) in list.iter().enumerate() {
            eta[j * k + c] = i;
        }
    }

    let mut cells = Vec::with_capacity((g - 1) * f * k);
    for copy in 0..g - 1 {
        for (idx, e) in p.cells().iter().enumerate() {
            cells.push(match *e {
                Entry::Star => Entry::Star,
                Entry::Code(s) => {
                    let v = (eta[idx] + copy) % g + 1;
                    Entry::Code((g * (s as usize - 1) + v) as u32)
                }
            });
        }
    }
    let out = Pda::new((g - 1) * f, k, codes as u32, cells).expect("stacked array is well formed");

    let phi = (1..=codes as usize)
        .map(|s2| {
            let v = (s2 - 1) % g + 1;
            let s = (s2 - v) / g;
            occ[s][v % g].0
        })
        .collect();
    Ok((out, StarRowCertificate::from_phi(g - 1, phi, f)))
}

/// `flatten(cartesian_power(p1, cert, m))`.
pub fn theorem1_scheme(
    p1: &Pda,
    cert: &StarRowCertificate,
    m: usize,
) -> Result<Pda, CartesianError> {
    flatten(&cartesian_power(p1, cert, m)?)
}

/// Downgrades a `g`-regular array satisfying equal row star counts, then
/// takes its `m`-fold product.
pub fn theorem2_scheme(p: &Pda, m: usize) -> Result<Pda, CartesianError> {
    if m < 2 {
        return Err(CartesianError::Fold { m, min: 2 });
    }
    let (p1, cert) = downgrade_regular(p)?;
    theorem1_scheme(&p1, &cert, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::find_certificate;
    use crate::construct::{mn_pda, near_square_pda};

    fn ns2() -> (Pda, StarRowCertificate) {
        near_square_pda(2).unwrap()
    }

    #[test]
    fn worked_entry() {
        let (p, cert) = ns2();
        let v = cartesian_power(&p, &cert, 2).unwrap();
        assert_eq!(v.rows(), 16);
        assert_eq!(v.cols(), 8);
        assert_eq!(v.get(0, 0), None);
        // f = (2,1) in 1-based terms is row 1.
        assert_eq!(v.row_tuple(1), vec![1, 0]);
        let cv = v.get(1, 0).unwrap();
        assert_eq!(cv.e, vec![2, 2]);
        assert_eq!(cv.l, vec![0, 0]);
        assert_eq!(v.distinct_vectors(), 16);
    }

    #[test]
    fn single_fold_is_base() {
        let (p, cert) = ns2();
        let v = cartesian_power(&p, &cert, 1).unwrap();
        assert_eq!(flatten(&v).unwrap(), p);
        assert!(cartesian_power(&p, &cert, 0).is_err());
    }

    #[test]
    fn rejects_bad_certificate() {
        let (p, mut cert) = ns2();
        cert.phi[0] = 2;
        assert!(matches!(
            cartesian_power(&p, &cert, 2),
            Err(CartesianError::InvalidCertificate(_))
        ));
    }

    #[test]
    fn example2_params() {
        let (p, cert) = ns2();
        let out = theorem1_scheme(&p, &cert, 2).unwrap();
        assert!(out.verify().ok);
        let pp = out.params().unwrap();
        assert_eq!(pp.tuple(), (8, 16, 8, 16));
        assert_eq!(pp.regularity, Some(4));
        let out3 = theorem1_scheme(&p, &cert, 3).unwrap();
        assert_eq!(out3.codes(), 64);
        assert!(out3.verify().ok);
    }

    #[test]
    fn downgrade_worked_entries() {
        let (p1, cert) = downgrade_regular(&mn_pda(5, 3).unwrap()).unwrap();
        assert_eq!(p1.get(0, 3), Entry::Code(4));
        assert_eq!(p1.get(10, 3), Entry::Code(1));
        assert_eq!(p1.get(20, 3), Entry::Code(2));
        assert_eq!(cert.lambda, 3);
        assert_eq!(&cert.phi[..4], &[3, 1, 0, 6]);
        assert!(verify_certificate(&p1, &cert).ok);
        let pp = p1.params().unwrap();
        assert_eq!(pp.tuple(), (5, 30, 18, 20));
        assert_eq!(pp.regularity, Some(3));
    }

    #[test]
    fn downgrade_preconditions() {
        let (p, _) = near_square_pda(1).unwrap();
        assert_eq!(
            downgrade_regular(&p).unwrap_err(),
            CartesianError::GainTooSmall { g: 1 }
        );
        let irregular = Pda::from_code_rows(&[&[0, 1], &[1, 0], &[2, 3]]).unwrap();
        assert!(irregular.verify().ok);
        assert_eq!(
            downgrade_regular(&irregular).unwrap_err(),
            CartesianError::NotRegular
        );
        assert!(theorem2_scheme(&mn_pda(3, 1).unwrap(), 1).is_err());
    }

    #[test]
    fn theorem2_small() {
        let out = theorem2_scheme(&mn_pda(3, 1).unwrap(), 2).unwrap();
        assert!(out.verify().ok);
        let pp = out.params().unwrap();
        assert_eq!(pp.tuple(), (6, 9, 3, 18));
        assert_eq!(pp.regularity, Some(2));
    }

    #[test]
    fn matching_certificate_feeds_product() {
        let (p, _) = ns2();
        let cert = find_certificate(&p, 1).unwrap();
        assert!(theorem1_scheme(&p, &cert, 2).unwrap().verify().ok);
    }
}
