//! Coded caching driven by a PDA: placement, XOR delivery and decoding.
//!
//! User `k` caches packet `j` of every file when cell `(j, k)` is a star.
//! For every code `s` the server broadcasts the XOR of the packets
//! requested at the cells labelled `s`; each participant strips the other
//! terms using its own cache.

use num_rational::Ratio;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::pda::{Entry, Pda};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("library has {lib} packets per file but the array has {rows} rows")]
    Dimension { lib: usize, rows: usize },
    #[error("demand has {found} entries for {users} users")]
    DemandLength { found: usize, users: usize },
    #[error("user {user} requests file {file}, outside [1:{files}]")]
    DemandOutOfRange {
        user: usize,
        file: usize,
        files: usize,
    },
    #[error("user {user} cannot recover packet {row} from message {code}")]
    Decode { user: usize, row: usize, code: u32 },
    #[error("invalid array: {0}")]
    InvalidPda(String),
    #[error("library needs at least one file and one byte per packet")]
    EmptyLibrary,
}

/// `N` files of `F` packets, `L` bytes each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Library {
    files: usize,
    packets: usize,
    packet_len: usize,
    data: Vec<u8>,
}

impl Library {
    pub fn from_bytes(files: usize, packets: usize, packet_len: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), files * packets * packet_len, "library size");
        Library {
            files,
            packets,
            packet_len,
            data,
        }
    }

    /// Library filled from a ChaCha stream seeded with `seed`.
    pub fn random(
        files: usize,
        packets: usize,
        packet_len: usize,
        seed: u64,
    ) -> Result<Self, SimError> {
        if files == 0 || packets == 0 || packet_len == 0 {
            return Err(SimError::EmptyLibrary);
        }
        let mut data = vec![0u8; files * packets * packet_len];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut data);
        Ok(Library::from_bytes(files, packets, packet_len, data))
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn packets(&self) -> usize {
        self.packets
    }

    pub fn packet_len(&self) -> usize {
        self.packet_len
    }

    /// Packet `j` (0-based) of file `n` (1-based).
    pub fn packet(&self, n: usize, j: usize) -> &[u8] {
        let at = ((n - 1) * self.packets + j) * self.packet_len;
        &self.data[at..at + self.packet_len]
    }

    /// All bytes of file `n` (1-based).
    pub fn file(&self, n: usize) -> &[u8] {
        let len = self.packets * self.packet_len;
        &self.data[(n - 1) * len..n * len]
    }

    pub fn total_bytes(&self) -> usize {
        self.data.len()
    }
}

/// Requested file (1-based) of every user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandVector(pub Vec<usize>);

impl DemandVector {
    pub fn random<R: Rng>(users: usize, files: usize, rng: &mut R) -> Self {
        DemandVector((0..users).map(|_| rng.gen_range(1..=files)).collect())
    }

    fn check(&self, users: usize, files: usize) -> Result<(), SimError> {
        if self.0.len() != users {
            return Err(SimError::DemandLength {
                found: self.0.len(),
                users,
            });
        }
        for (user, &file) in self.0.iter().enumerate() {
            if file == 0 || file > files {
                return Err(SimError::DemandOutOfRange { user, file, files });
            }
        }
        Ok(())
    }
}

/// What one user stores: packet `j` of every file for each cached `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserCache {
    packet_len: usize,
    cached: usize,
    /// Slot of each packet index, if cached.
    slot: Vec<Option<usize>>,
    /// `[file][slot][byte]`.
    data: Vec<u8>,
}

impl UserCache {
    /// Sorted packet indices held by this user.
    pub fn packet_indices(&self) -> Vec<usize> {
        (0..self.slot.len())
            .filter(|&j| self.slot[j].is_some())
            .collect()
    }

    /// Packet `j` of file `n` (1-based), if cached.
    pub fn get(&self, n: usize, j: usize) -> Option<&[u8]> {
        let slot = self.slot.get(j).copied().flatten()?;
        let at = ((n - 1) * self.cached + slot) * self.packet_len;
        self.data.get(at..at + self.packet_len)
    }

    pub fn bytes(&self) -> usize {
        self.data.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheSnapshot {
    pub users: Vec<UserCache>,
}

pub fn place(p: &Pda, lib: &Library) -> Result<CacheSnapshot, SimError> {
    if lib.packets() != p.rows() {
        return Err(SimError::Dimension {
            lib: lib.packets(),
            rows: p.rows(),
        });
    }
    let l = lib.packet_len();
    let users = (0..p.cols())
        .map(|k| {
            let rows: Vec<usize> = (0..p.rows()).filter(|&j| p.get(j, k).is_star()).collect();
            let mut slot = vec![None; p.rows()];
            for (i, &j) in rows.iter().enumerate() {
                slot[j] = Some(i);
            }
            let mut data = Vec::with_capacity(lib.files() * rows.len() * l);
            for n in 1..=lib.files() {
                for &j in &rows {
                    data.extend_from_slice(lib.packet(n, j));
                }
            }
            UserCache {
                packet_len: l,
                cached: rows.len(),
                slot,
                data,
            }
        })
        .collect();
    Ok(CacheSnapshot { users })
}

/// One broadcast: the XOR payload for a code and the cells it serves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub code: u32,
    pub payload: Vec<u8>,
    /// `(row, user)` of every cell labelled `code`, row-major.
    pub participants: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransmissionLog {
    pub messages: Vec<Message>,
}

impl TransmissionLog {
    pub fn bytes_sent(&self) -> usize {
        self.messages.iter().map(|m| m.payload.len()).sum()
    }
}

fn xor_into(acc: &mut [u8], x: &[u8]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a ^= b;
    }
}

pub fn deliver(p: &Pda, lib: &Library, d: &DemandVector) -> Result<TransmissionLog, SimError> {
    if lib.packets() != p.rows() {
        return Err(SimError::Dimension {
            lib: lib.packets(),
            rows: p.rows(),
        });
    }
    d.check(p.cols(), lib.files())?;
    let messages = p
        .occurrences()
        .into_iter()
        .enumerate()
        .map(|(i, participants)| {
            let mut payload = vec![0u8; lib.packet_len()];
            for &(j, k) in &participants {
                xor_into(&mut payload, lib.packet(d.0[k], j));
            }
            Message {
                code: i as u32 + 1,
                payload,
                participants,
            }
        })
        .collect();
    Ok(TransmissionLog { messages })
}

/// Reconstructs every user's requested file from its cache and the log.
pub fn decode(
    p: &Pda,
    cache: &CacheSnapshot,
    log: &TransmissionLog,
    d: &DemandVector,
) -> Result<Vec<Vec<u8>>, SimError> {
    d.check(p.cols(), usize::MAX)?;
    (0..p.cols())
        .map(|k| {
            let own = &cache.users[k];
            let l = own.packet_len;
            let mut file = Vec::with_capacity(p.rows() * l);
            for j in 0..p.rows() {
                match p.get(j, k) {
                    Entry::Star => {
                        let bytes = own.get(d.0[k], j).ok_or(SimError::Decode {
                            user: k,
                            row: j,
                            code: 0,
                        })?;
                        file.extend_from_slice(bytes);
                    }
                    Entry::Code(s) => {
                        let fail = SimError::Decode {
                            user: k,
                            row: j,
                            code: s,
                        };
                        let msg = log
                            .messages
                            .get(s as usize - 1)
                            .ok_or_else(|| fail.clone())?;
                        let mut acc = msg.payload.clone();
                        for &(j2, k2) in &msg.participants {
                            if (j2, k2) == (j, k) {
                                continue;
                            }
                            let other = own.get(d.0[k2], j2).ok_or_else(|| fail.clone())?;
                            xor_into(&mut acc, other);
                        }
                        file.extend_from_slice(&acc);
                    }
                }
            }
            Ok(file)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimReport {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "F")]
    pub f: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub load_num: u64,
    pub load_den: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub decode_ok: bool,
    pub bytes_sent: u64,
    pub bytes_cached_per_user: u64,
}

impl SimReport {
    pub fn load(&self) -> Ratio<u64> {
        Ratio::new(self.load_num, self.load_den)
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.ratio_num, self.ratio_den)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Places, delivers and decodes one demand over a seeded library, and
/// checks the decoded files byte for byte.
pub fn run_roundtrip(
    p: &Pda,
    files: usize,
    packet_len: usize,
    d: &DemandVector,
    seed: u64,
) -> Result<SimReport, SimError> {
    let params = p
        .params()
        .map_err(|e| SimError::InvalidPda(e.to_string()))?;
    let lib = Library::random(files, p.rows(), packet_len, seed)?;
    let cache = place(p, &lib)?;
    let log = deliver(p, &lib, d)?;
    let decoded = decode(p, &cache, &log, d)?;
    let decode_ok = decoded
        .iter()
        .zip(&d.0)
        .all(|(got, &n)| got.as_slice() == lib.file(n));
    Ok(SimReport {
        k: params.users,
        f: params.subpacketization,
        z: params.stars_per_column,
        s: params.codes,
        load_num: *params.load.numer(),
        load_den: *params.load.denom(),
        ratio_num: *params.memory_ratio.numer(),
        ratio_den: *params.memory_ratio.denom(),
        decode_ok,
        bytes_sent: log.bytes_sent() as u64,
        bytes_cached_per_user: cache.users.first().map_or(0, UserCache::bytes) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns2() -> Pda {
        Pda::from_code_rows(&[&[0, 0, 3, 1], &[2, 0, 0, 4], &[1, 3, 0, 0], &[0, 2, 4, 0]]).unwrap()
    }

    fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter().zip(b).map(|(x, y)| x ^ y).collect()
    }

    #[test]
    fn placement_of_first_user() {
        let lib = Library::random(4, 4, 8, 1).unwrap();
        let cache = place(&ns2(), &lib).unwrap();
        assert_eq!(cache.users[0].packet_indices(), vec![0, 3]);
        assert_eq!(cache.users[0].bytes(), 4 * 2 * 8);
        assert_eq!(cache.users[0].get(3, 3), Some(lib.packet(3, 3)));
        assert_eq!(cache.users[0].get(3, 1), None);
    }

    #[test]
    fn delivery_messages() {
        let lib = Library::random(4, 4, 16, 7).unwrap();
        let d = DemandVector(vec![1, 2, 3, 4]);
        let log = deliver(&ns2(), &lib, &d).unwrap();
        assert_eq!(log.messages.len(), 4);
        // 1-based (file, packet) pairs from the delivery table.
        let w = |n: usize, j: usize| lib.packet(n, j - 1);
        assert_eq!(log.messages[0].payload, xor(w(1, 3), w(4, 1)));
        assert_eq!(log.messages[1].payload, xor(w(1, 2), w(2, 4)));
        assert_eq!(log.messages[2].payload, xor(w(2, 3), w(3, 1)));
        assert_eq!(log.messages[3].payload, xor(w(3, 4), w(4, 2)));
    }

    #[test]
    fn roundtrip_near_square_g2() {
        let r = run_roundtrip(&ns2(), 4, 64, &DemandVector(vec![1, 2, 3, 4]), 3).unwrap();
        assert!(r.decode_ok);
        assert_eq!(r.load(), Ratio::from_integer(1));
        assert_eq!(r.ratio(), Ratio::new(1, 2));
        assert_eq!(r.bytes_sent, 4 * 64);
        assert_eq!(r.bytes_cached_per_user, 4 * 2 * 64);
        let same = run_roundtrip(&ns2(), 4, 64, &DemandVector(vec![1, 1, 1, 1]), 3).unwrap();
        assert!(same.decode_ok);
        assert!(r
            .to_json()
            .starts_with("{\"K\":4,\"F\":4,\"Z\":2,\"S\":4,\"load_num\":1"));
    }

    #[test]
    fn single_occurrence_message_is_the_packet() {
        let p = Pda::from_code_rows(&[&[1]]).unwrap();
        let lib = Library::random(1, 1, 8, 0).unwrap();
        let log = deliver(&p, &lib, &DemandVector(vec![1])).unwrap();
        assert_eq!(log.messages[0].payload, lib.packet(1, 0));
    }

    #[test]
    fn all_star_column_decodes_from_cache() {
        let p = Pda::from_code_rows(&[&[0, 1], &[0, 2]]).unwrap();
        // Column 1 has no stars, so C1 fails, but the simulator still runs.
        let lib = Library::random(2, 2, 4, 9).unwrap();
        let d = DemandVector(vec![2, 1]);
        let cache = place(&p, &lib).unwrap();
        let log = deliver(&p, &lib, &d).unwrap();
        let out = decode(&p, &cache, &log, &d).unwrap();
        assert_eq!(out[0], lib.file(2));
        assert_eq!(out[1], lib.file(1));
    }

    #[test]
    fn bad_inputs() {
        let lib = Library::random(4, 3, 4, 0).unwrap();
        assert!(matches!(
            place(&ns2(), &lib),
            Err(SimError::Dimension { .. })
        ));
        let lib = Library::random(4, 4, 4, 0).unwrap();
        assert_eq!(
            deliver(&ns2(), &lib, &DemandVector(vec![1, 2, 5, 1])).unwrap_err(),
            SimError::DemandOutOfRange {
                user: 2,
                file: 5,
                files: 4
            }
        );
        assert!(deliver(&ns2(), &lib, &DemandVector(vec![1])).is_err());
        assert!(Library::random(0, 4, 4, 0).is_err());
    }

    #[test]
    fn c3_violation_breaks_decoding() {
        // Code 1 at (0,0) and (1,1) with (0,1) not a star.
        let p = Pda::from_code_rows(&[&[1, 2], &[0, 1]]).unwrap();
        let lib = Library::random(2, 2, 4, 5).unwrap();
        let d = DemandVector(vec![1, 2]);
        let cache = place(&p, &lib).unwrap();
        let log = deliver(&p, &lib, &d).unwrap();
        assert!(matches!(
            decode(&p, &cache, &log, &d),
            Err(SimError::Decode { code: 1, .. })
        ));
    }
}
