//! Star-row certificates: witnesses that a PDA can seed the Cartesian
//! power construction.
//!
//! A certificate fixes a block count `lambda` (the star pattern repeats
//! every `F / lambda` rows) and maps every code to one of the first
//! `F / lambda` rows that is a star row for it, such that every such row
//! receives exactly `lambda * S / F` codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::b_matching;
use crate::pda::{CheckReport, Pda, Rule, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarRowCertificate {
    pub lambda: usize,
    /// `phi[s - 1]` is the 0-based star row assigned to code `s`.
    pub phi: Vec<usize>,
    /// `b_sets[j]` lists the codes assigned to row `j`, ascending.
    pub b_sets: Vec<Vec<u32>>,
}

impl StarRowCertificate {
    /// Derives the partition sets from an assignment over `block_rows` rows.
    pub fn from_phi(lambda: usize, phi: Vec<usize>, block_rows: usize) -> Self {
        let mut b_sets = vec![Vec::new(); block_rows];
        for (idx, &j) in phi.iter().enumerate() {
            if j < block_rows {
                b_sets[j].push(idx as u32 + 1);
            }
        }
        StarRowCertificate {
            lambda,
            phi,
            b_sets,
        }
    }

    /// Rows per block, `F / lambda`.
    pub fn block_rows(&self) -> usize {
        self.b_sets.len()
    }

    /// Codes per row, `lambda * S / F`.
    pub fn set_size(&self) -> usize {
        self.b_sets.first().map(Vec::len).unwrap_or(0)
    }

    /// For every code `s`, `(l, mu)` with `b_sets[l][mu] == s` (both 0-based).
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![(usize::MAX, usize::MAX); self.phi.len()];
        for (l, set) in self.b_sets.iter().enumerate() {
            for (mu, &s) in set.iter().enumerate() {
                pos[s as usize - 1] = (l, mu);
            }
        }
        pos
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Where a certificate search gave up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    Divisibility,
    BlockRepetition,
    Matching,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no star-row certificate ({stage:?}): {reason}")]
pub struct Infeasible {
    pub stage: Stage,
    pub reason: String,
}

fn infeasible(stage: Stage, reason: String) -> Infeasible {
    Infeasible { stage, reason }
}

/// First `(row, col)` breaking the block-repeated star pattern.
fn block_repetition_break(p: &Pda, block_rows: usize) -> Option<(usize, usize)> {
    (block_rows..p.rows())
        .flat_map(|j| (0..p.cols()).map(move |k| (j, k)))
        .find(|&(j, k)| p.get(j, k).is_star() != p.get(j % block_rows, k).is_star())
}

/// Searches for a certificate with the given `lambda`.
///
/// Codes are matched to row slots by augmenting paths, codes ascending and
/// slots ascending, so the same input always yields the same certificate.
pub fn find_certificate(p: &Pda, lambda: usize) -> Result<StarRowCertificate, Infeasible> {
    let f = p.rows();
    let s = p.codes() as usize;
    let z = p
        .stars_per_column()
        .map_err(|e| infeasible(Stage::Divisibility, e.to_string()))?;
    if lambda == 0 || !f.is_multiple_of(lambda) || z % lambda != 0 {
        return Err(infeasible(
            Stage::Divisibility,
            format!("lambda {lambda} must divide F = {f} and Z = {z}"),
        ));
    }
    if !(lambda * s).is_multiple_of(f) {
        return Err(infeasible(
            Stage::Divisibility,
            format!("lambda * S = {} is not a multiple of F = {f}", lambda * s),
        ));
    }
    let block_rows = f / lambda;
    let capacity = lambda * s / f;
    if let Some((j, k)) = block_repetition_break(p, block_rows) {
        return Err(infeasible(
            Stage::BlockRepetition,
            format!("row {j} and row {} differ in column {k}", j % block_rows),
        ));
    }

    let adj: Vec<Vec<usize>> = (1..=s as u32)
        .map(|code| {
            p.star_rows_for(code)
                .into_iter()
                .filter(|&i| i < block_rows)
                .collect()
        })
        .collect();
    let m = b_matching(&adj, block_rows, capacity);
    if m.matched < s {
        let first = m.assignment.iter().position(Option::is_none).unwrap_or(0) + 1;
        let reason = if adj[first - 1].is_empty() {
            format!("code {first} has no star row")
        } else {
            format!(
                "only {} of {s} codes fit into {block_rows} rows of {capacity}; code {first} unassigned",
                m.matched
            )
        };
        return Err(infeasible(Stage::Matching, reason));
    }
    let phi = m.assignment.into_iter().map(|a| a.unwrap()).collect();
    Ok(StarRowCertificate::from_phi(lambda, phi, block_rows))
}

/// Tries every divisor of `gcd(F, Z)` in ascending order.
pub fn search_certificate(p: &Pda) -> Result<StarRowCertificate, Infeasible> {
    let f = p.rows();
    let z = p
        .stars_per_column()
        .map_err(|e| infeasible(Stage::Divisibility, e.to_string()))?;
    let g = num_integer::gcd(f, z);
    let mut last = infeasible(Stage::Divisibility, "no divisor of gcd(F, Z)".into());
    for lambda in (1..=g).filter(|d| g % d == 0) {
        match find_certificate(p, lambda) {
            Ok(cert) => return Ok(cert),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn cond1(row: Option<usize>, col: Option<usize>, msg: String) -> Violation {
    Violation {
        rule: Rule::Cond1,
        row,
        col,
        row2: None,
        col2: None,
        msg,
    }
}

/// Checks every certificate invariant against `p`.
pub fn verify_certificate(p: &Pda, cert: &StarRowCertificate) -> CheckReport {
    let f = p.rows();
    let s = p.codes() as usize;
    let lambda = cert.lambda;
    let mut violations = Vec::new();

    let z = match p.stars_per_column() {
        Ok(z) => z,
        Err(e) => {
            violations.push(cond1(None, None, e.to_string()));
            return CheckReport::from_violations(violations);
        }
    };
    if lambda == 0 || !f.is_multiple_of(lambda) || z % lambda != 0 {
        violations.push(cond1(
            None,
            None,
            format!("lambda {lambda} must divide F = {f} and Z = {z}"),
        ));
        return CheckReport::from_violations(violations);
    }
    let block_rows = f / lambda;
    if cert.b_sets.len() != block_rows {
        violations.push(cond1(
            None,
            None,
            format!(
                "{} partition sets, expected {block_rows}",
                cert.b_sets.len()
            ),
        ));
    }
    if cert.phi.len() != s {
        violations.push(cond1(
            None,
            None,
            format!("phi covers {} codes, expected {s}", cert.phi.len()),
        ));
        return CheckReport::from_violations(violations);
    }

    for j in block_rows..f {
        for k in 0..p.cols() {
            if p.get(j, k).is_star() != p.get(j % block_rows, k).is_star() {
                violations.push(Violation {
                    rule: Rule::Cond1,
                    row: Some(j),
                    col: Some(k),
                    row2: Some(j % block_rows),
                    col2: Some(k),
                    msg: format!(
                        "star pattern of row {j} differs from row {}",
                        j % block_rows
                    ),
                });
            }
        }
    }

    let occ = p.occurrences();
    for (idx, &row) in cert.phi.iter().enumerate() {
        let code = idx + 1;
        if row >= block_rows {
            violations.push(cond1(
                Some(row),
                None,
                format!("phi({code}) = {row} is outside the first {block_rows} rows"),
            ));
            continue;
        }
        for &(j, k) in &occ[idx] {
            if !p.get(row, k).is_star() {
                violations.push(Violation {
                    rule: Rule::Cond1,
                    row: Some(row),
                    col: Some(k),
                    row2: Some(j),
                    col2: Some(k),
                    msg: format!("row {row} is not a star row for code {code}"),
                });
            }
        }
    }

    let expected = StarRowCertificate::from_phi(lambda, cert.phi.clone(), block_rows);
    if expected.b_sets != cert.b_sets {
        violations.push(cond1(
            None,
            None,
            "partition sets do not match phi".to_string(),
        ));
    }
    if !(lambda * s).is_multiple_of(f) {
        violations.push(cond1(
            None,
            None,
            format!("lambda * S / F = {lambda} * {s} / {f} is not an integer"),
        ));
    } else {
        let size = lambda * s / f;
        for (j, set) in expected.b_sets.iter().enumerate() {
            if set.len() != size {
                violations.push(cond1(
                    Some(j),
                    None,
                    format!("row {j} is assigned {} codes, expected {size}", set.len()),
                ));
            }
        }
    }

    CheckReport::from_violations(violations)
}
