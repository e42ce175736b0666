//! Random MAX K-SAT instances, DIMACS I/O, and precomputed cost diagonals.
//!
//! The cost Hamiltonian counts violated clauses: a clause contributes
//! eigenvalue 1 on a basis state exactly when all of its literals are
//! false there. Basis states are indexed little-endian, bit i of the
//! index holding the truth value of variable i. Because every clause
//! uses K distinct variables, it is violated by exactly 2^(N-K) of the
//! 2^N assignments, which pins the mean energy of the uniform state to
//! M * 2^(-K).

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result, MAX_QUBITS};

/// One clause: parallel lists of variable indices and literal signs.
/// `signs[i] = +1` for the plain variable, `-1` for its negation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub vars: Vec<usize>,
    pub signs: Vec<i8>,
}

impl Clause {
    pub fn new(vars: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if vars.len() != signs.len() {
            return Err(Error::InvalidDimension(format!(
                "clause has {} variables but {} signs",
                vars.len(),
                signs.len()
            )));
        }
        if vars.is_empty() {
            return Err(Error::InvalidDimension("empty clause".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("clause signs must be +/-1".into()));
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(
                "clause references a variable twice".into(),
            ));
        }
        Ok(Clause { vars, signs })
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    /// True when every literal is false on basis state `x`, i.e. the
    /// clause is violated and contributes energy 1.
    pub fn violated(&self, x: usize) -> bool {
        self.vars.iter().zip(&self.signs).all(|(&v, &s)| {
            let bit = (x >> v) & 1;
            // literal false: plain variable with bit 0, negation with bit 1
            (s == 1 && bit == 0) || (s == -1 && bit == 1)
        })
    }

    /// Orders literals by variable index; the canonical form used by the
    /// DIMACS writer.
    fn canonicalize(&mut self) {
        let mut pairs: Vec<(usize, i8)> = self.vars.iter().copied().zip(self.signs.iter().copied()).collect();
        pairs.sort_unstable_by_key(|&(v, _)| v);
        for (i, (v, s)) in pairs.into_iter().enumerate() {
            self.vars[i] = v;
            self.signs[i] = s;
        }
    }
}

/// A MAX K-SAT instance. `k` is the nominal clause width; generated
/// instances are uniform-K, while DIMACS input may mix widths unless
/// strict-K mode is on (then `k` is the maximum width present).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SatInstance {
    pub n_vars: usize,
    pub k: usize,
    pub clauses: Vec<Clause>,
}

impl SatInstance {
    pub fn new(n_vars: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidDimension("instance needs n_vars >= 1".into()));
        }
        if n_vars > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                n_vars,
                max: MAX_QUBITS,
            });
        }
        for clause in &clauses {
            if let Some(&v) = clause.vars.iter().find(|&&v| v >= n_vars) {
                return Err(Error::InvalidDimension(format!(
                    "clause variable x{} outside instance with {} variables",
                    v + 1,
                    n_vars
                )));
            }
        }
        Ok(SatInstance { n_vars, k, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Clause density alpha = M / N.
    pub fn alpha(&self) -> f64 {
        self.m() as f64 / self.n_vars as f64
    }

    /// Number of violated clauses on basis state `x`; the per-bitstring
    /// route, used as an oracle against the subcube-enumeration diagonal.
    pub fn violated_count(&self, x: usize) -> u32 {
        self.clauses.iter().filter(|c| c.violated(x)).count() as u32
    }

    /// Canonical DIMACS text: sorted literals, no comments.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.n_vars, self.m()).unwrap();
        for clause in &self.clauses {
            let mut canon = clause.clone();
            canon.canonicalize();
            for (&v, &s) in canon.vars.iter().zip(&canon.signs) {
                let lit = (v as i64 + 1) * s as i64;
                write!(out, "{lit} ").unwrap();
            }
            writeln!(out, "0").unwrap();
        }
        out
    }

    /// SHA-256 of the canonical DIMACS form, hex-encoded. Stable id for
    /// run records and metadata headers.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_dimacs().as_bytes());
        digest.iter().fold(String::new(), |mut acc, b| {
            write!(acc, "{b:02x}").unwrap();
            acc
        })
    }
}

/// Clause count for density `alpha` on `n` variables: round(alpha * n),
/// rounding half away from zero.
pub fn clause_count(n_vars: usize, alpha: f64) -> usize {
    (alpha * n_vars as f64).round() as usize
}

/// Draws a random MAX K-SAT instance: each clause picks K distinct
/// variables uniformly and negates each independently with probability
/// 1/2. Duplicate clauses are allowed, as in the random ensemble.
pub fn random_instance<R: Rng>(n_vars: usize, k: usize, alpha: f64, rng: &mut R) -> Result<SatInstance> {
    if n_vars == 0 {
        return Err(Error::InvalidDimension("instance needs n_vars >= 1".into()));
    }
    if k == 0 || k > n_vars {
        return Err(Error::InvalidDimension(format!(
            "clause width k = {k} must satisfy 1 <= k <= n_vars = {n_vars}"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "clause density alpha = {alpha} must be positive"
        )));
    }
    let m = clause_count(n_vars, alpha);
    if m == 0 {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} on {n_vars} variables rounds to zero clauses"
        )));
    }
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vars = rand::seq::index::sample(rng, n_vars, k).into_vec();
        vars.sort_unstable();
        let signs = (0..k)
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect();
        clauses.push(Clause { vars, signs });
    }
    SatInstance::new(n_vars, k, clauses)
}

/// Precomputed spectrum of the cost Hamiltonian over all 2^N basis
/// states, with the extremes and the optimal set.
#[derive(Debug)]
pub struct CostDiagonal {
    pub energies: Vec<u32>,
    pub c_min: u32,
    pub c_max: u32,
    /// Basis indices attaining c_min.
    pub solutions: Vec<usize>,
    distances: OnceLock<Vec<u8>>,
}

impl CostDiagonal {
    /// Builds the diagonal by subcube enumeration: each clause fixes its
    /// K bits to the violating pattern and sweeps the remaining N-K
    /// freely, costing O(M * 2^(N-K)) instead of O(M * 2^N).
    pub fn build(instance: &SatInstance) -> Result<Self> {
        if instance.n_vars > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                n_vars: instance.n_vars,
                max: MAX_QUBITS,
            });
        }
        let n = instance.n_vars;
        let dim = 1usize << n;
        let full_mask = dim - 1;
        let mut energies = vec![0u32; dim];
        for clause in &instance.clauses {
            let mut fixed_mask = 0usize;
            let mut fixed_val = 0usize;
            for (&v, &s) in clause.vars.iter().zip(&clause.signs) {
                fixed_mask |= 1 << v;
                if s == -1 {
                    // negated literal is false when the bit is set
                    fixed_val |= 1 << v;
                }
            }
            let free_mask = full_mask & !fixed_mask;
            let mut sub = 0usize;
            loop {
                energies[fixed_val | sub] += 1;
                sub = sub.wrapping_sub(free_mask) & free_mask;
                if sub == 0 {
                    break;
                }
            }
        }
        let c_min = *energies.iter().min().expect("dim >= 1");
        let c_max = *energies.iter().max().expect("dim >= 1");
        let solutions = (0..dim).filter(|&x| energies[x] == c_min).collect();
        Ok(CostDiagonal {
            energies,
            c_min,
            c_max,
            solutions,
            distances: OnceLock::new(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.energies.len().trailing_zeros() as usize
    }

    /// Hamming distance from each basis state to the nearest optimal
    /// assignment, computed once by multi-source BFS over the hypercube.
    pub fn distances_to_solution(&self) -> &[u8] {
        self.distances.get_or_init(|| {
            let n = self.n_vars();
            let mut dist = vec![u8::MAX; self.energies.len()];
            let mut queue = VecDeque::with_capacity(self.solutions.len());
            for &s in &self.solutions {
                dist[s] = 0;
                queue.push_back(s);
            }
            while let Some(x) = queue.pop_front() {
                let d = dist[x];
                for q in 0..n {
                    let y = x ^ (1 << q);
                    if dist[y] == u8::MAX {
                        dist[y] = d + 1;
                        queue.push_back(y);
                    }
                }
            }
            dist
        })
    }
}

/// Whether DIMACS input must have uniform clause width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// All clauses must share one width; it becomes the instance `k`.
    Strict,
    /// Mixed widths accepted; `k` is the maximum width present.
    AllowMixed,
}

/// Parses DIMACS CNF text. Comment lines start with `c`; the problem
/// line is `p cnf <vars> <clauses>`; clauses are 0-terminated literal
/// runs, possibly spanning lines.
pub fn parse_dimacs(text: &str, policy: KPolicy) -> Result<SatInstance> {
    let mut n_vars: Option<usize> = None;
    let mut declared_m = 0usize;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut vars: Vec<usize> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if n_vars.is_some() {
                return Err(Error::DimacsParse {
                    line,
                    msg: "duplicate problem line".into(),
                });
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(Error::DimacsParse {
                    line,
                    msg: format!("expected 'p cnf <vars> <clauses>', got '{trimmed}'"),
                });
            }
            let nv = fields[1].parse::<usize>().map_err(|e| Error::DimacsParse {
                line,
                msg: format!("bad variable count: {e}"),
            })?;
            declared_m = fields[2].parse::<usize>().map_err(|e| Error::DimacsParse {
                line,
                msg: format!("bad clause count: {e}"),
            })?;
            n_vars = Some(nv);
            continue;
        }
        let nv = n_vars.ok_or(Error::DimacsParse {
            line,
            msg: "clause before problem line".into(),
        })?;
        for tok in trimmed.split_whitespace() {
            let lit = tok.parse::<i64>().map_err(|e| Error::DimacsParse {
                line,
                msg: format!("bad literal '{tok}': {e}"),
            })?;
            if lit == 0 {
                let clause = Clause::new(std::mem::take(&mut vars), std::mem::take(&mut signs))
                    .map_err(|e| Error::DimacsParse {
                        line,
                        msg: e.to_string(),
                    })?;
                clauses.push(clause);
            } else {
                let v = lit.unsigned_abs() as usize - 1;
                if v >= nv {
                    return Err(Error::DimacsParse {
                        line,
                        msg: format!("literal {lit} outside declared {nv} variables"),
                    });
                }
                vars.push(v);
                signs.push(if lit > 0 { 1 } else { -1 });
            }
        }
    }
    let n_vars = n_vars.ok_or(Error::DimacsParse {
        line: text.lines().count(),
        msg: "missing problem line".into(),
    })?;
    if !vars.is_empty() {
        return Err(Error::DimacsParse {
            line: text.lines().count(),
            msg: "unterminated clause at end of input".into(),
        });
    }
    if clauses.len() != declared_m {
        return Err(Error::DimacsParse {
            line: text.lines().count(),
            msg: format!("declared {} clauses, found {}", declared_m, clauses.len()),
        });
    }
    let k = match policy {
        KPolicy::Strict => {
            let k = clauses.first().map(Clause::width).unwrap_or(0);
            if let Some((idx, c)) = clauses.iter().enumerate().find(|(_, c)| c.width() != k) {
                return Err(Error::ClauseWidth {
                    clause: idx + 1,
                    width: c.width(),
                    k,
                });
            }
            k
        }
        KPolicy::AllowMixed => clauses.iter().map(Clause::width).max().unwrap_or(0),
    };
    SatInstance::new(n_vars, k, clauses)
}

pub fn read_dimacs(path: &Path, policy: KPolicy) -> Result<SatInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dimacs(&text, policy)
}

pub fn write_dimacs(instance: &SatInstance, path: &Path) -> Result<()> {
    std::fs::write(path, instance.to_dimacs()).map_err(|e| Error::io(path, e))
}
