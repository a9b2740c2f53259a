//! End-to-end factoring runs.
//!
//! A run is a sequence of rounds. Each round draws a diagonal, builds and
//! reduces the lattice, finds the Babai point, picks bitstrings from the
//! Hamiltonian around it (VQE or exact), turns them into uv-pairs and keeps
//! the smooth relations. Relations accumulate across rounds and the GF(2)
//! stage runs on the whole pool after every round.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, RngCore};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixture::{export_fixture, format_ratio, Fixture, RelationRow};
use crate::gf2::{factor_relations, split, FactorResult, FactorStatus};
use crate::ising::{build_hamiltonian, exact_ground_state, QuboProblem, Selection};
use crate::lattice::{
    babai_nearest_plane, brute_force_cvp, lll_reduce, BabaiResult, Basis, ReductionResult,
};
use crate::primes_lattice::{
    build_cvp, diagonal_permutation, first_primes, lattice_dimension, validate_modulus,
    CvpInstance, FactoringInstance,
};
use crate::relations::{candidate_pairs, check_sr_pair, SmoothRelation};
use crate::rng::{stream_rng, Stream};
use crate::vqe::{optimize, report_table, ReportRow, VqeConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionSource {
    Internal,
    /// Use the fixture's `reduced_basis` whenever the round's lattice equals
    /// the fixture's `basis`.
    Fixture(Box<Fixture>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solver {
    Vqe(VqeConfig),
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Only the solver's chosen bitstring.
    Argmax,
    /// All `2^n` bitstrings.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub instance: FactoringInstance,
    pub delta: BigRational,
    pub reduction: ReductionSource,
    pub solver: Solver,
    pub max_rounds: usize,
    pub selection: SelectionMode,
    pub budget: Option<Duration>,
}

impl RunConfig {
    pub fn new(instance: FactoringInstance) -> Self {
        RunConfig {
            instance,
            delta: BigRational::new(3.into(), 4.into()),
            reduction: ReductionSource::Internal,
            solver: Solver::Vqe(VqeConfig::default()),
            max_rounds: 1,
            selection: SelectionMode::Argmax,
            budget: None,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        let n = self.instance.validate()?;
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        let quarter = BigRational::new(1.into(), 4.into());
        if self.delta <= quarter || self.delta > BigRational::one() {
            return Err(Error::InvalidConfig(format!(
                "delta {} outside (1/4, 1]",
                self.delta
            )));
        }
        if let Solver::Vqe(v) = &self.solver {
            v.validate()?;
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UvRecord {
    pub selection: String,
    pub u: String,
    pub v: String,
    pub e: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeRecord {
    pub seed: u64,
    pub argmax: String,
    pub best_expectation: f64,
    pub converged: bool,
    pub restarts: Vec<crate::vqe::RestartLog>,
    pub table: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub diagonal: Vec<i64>,
    pub reduction_used: &'static str,
    pub basis: Vec<Vec<Value>>,
    pub target: Vec<Value>,
    pub reduced_basis: Vec<Vec<Value>>,
    pub b_op: Vec<Value>,
    pub babai_dist_sq: String,
    pub ground_state: String,
    pub ground_energy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vqe: Option<VqeRecord>,
    pub selections: Vec<String>,
    pub uv_pairs: Vec<UvRecord>,
    /// New smooth relations contributed by this round.
    pub sr_pairs: Vec<RelationRow>,
    pub factor_status: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Factored,
    NotFactored,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub subset: Vec<usize>,
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "W")]
    pub w: String,
    #[serde(rename = "Z")]
    pub z: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub status: RunStatus,
    /// `congruence` or `gcd` when factored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    #[serde(rename = "N")]
    pub modulus: String,
    pub l: u32,
    pub c: f64,
    pub smooth_bound: usize,
    pub seed: u64,
    pub diagonal_override: Option<Vec<i64>>,
    pub dimension: usize,
    pub delta: String,
    pub reduction: &'static str,
    pub solver: Value,
    pub max_rounds: usize,
    pub selection: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub settings: RunSettings,
    pub rounds: Vec<RoundRecord>,
    pub relations: Vec<RelationRow>,
    pub outcome: Outcome,
    /// Milliseconds per stage; excluded from replay comparisons.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<&'static str, f64>,
    #[serde(skip)]
    pub factors: Option<(BigUint, BigUint)>,
    #[serde(skip)]
    pub smooth_relations: Vec<SmoothRelation>,
}

impl RunReport {
    pub fn is_factored(&self) -> bool {
        self.outcome.status == RunStatus::Factored
    }

    pub fn to_json(&self, include_timings: bool) -> Result<String> {
        let mut s = if include_timings {
            serde_json::to_string_pretty(self)?
        } else {
            let mut copy = self.clone();
            copy.timings_ms.clear();
            serde_json::to_string_pretty(&copy)?
        };
        s.push('\n');
        Ok(s)
    }

    /// Table-style summary: one line per round plus the outcome.
    pub fn to_table(&self) -> String {
        let s = &self.settings;
        let mut out = format!(
            "N = {}  l = {}  qubits = {}  c = {}  SB = {}  reduction = {}\n",
            s.modulus, s.l, s.dimension, s.c, s.smooth_bound, s.reduction
        );
        for r in &self.rounds {
            let uv: Vec<String> = r
                .uv_pairs
                .iter()
                .map(|p| format!("({}, {})", p.u, p.v))
                .collect();
            let sr: Vec<String> = r
                .sr_pairs
                .iter()
                .map(|p| format!("({}, {})", p.u, p.v))
                .collect();
            out.push_str(&format!(
                "round {}: diagonal {:?}  b_op {}  selection [{}]  uv-pairs {}  sr-pairs {}\n",
                r.round,
                r.diagonal,
                fmt_values(&r.b_op),
                r.selections.join(", "),
                uv.join(" "),
                if sr.is_empty() {
                    "none".to_string()
                } else {
                    sr.join(" ")
                },
            ));
            if let Some(v) = &r.vqe {
                out.push_str(&crate::vqe::render_table(&v.table));
            }
        }
        match (&self.outcome.status, &self.outcome.factors) {
            (RunStatus::Factored, Some([p, q])) => out.push_str(&format!("factors: {p}, {q}\n")),
            (RunStatus::BudgetExceeded, _) => out.push_str("failed: budget exceeded\n"),
            _ => out.push_str("failed\n"),
        }
        out
    }
}

fn fmt_values(v: &[Value]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|x| x.to_string().trim_matches('"').to_string())
        .collect();
    format!("({})", parts.join(", "))
}

fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn int_values(v: &[BigInt]) -> Vec<Value> {
    v.iter().map(int_value).collect()
}

fn matrix_values(b: &Basis) -> Vec<Vec<Value>> {
    b.to_rows().iter().map(|r| int_values(r)).collect()
}

/// Seed for the VQE restarts of a given round.
pub fn round_vqe_seed(master: u64, round: usize) -> u64 {
    stream_rng(master, Stream::Vqe, (1 << 40) | round as u64).next_u64()
}

struct Stopwatch {
    start: Instant,
    budget: Option<Duration>,
    timings: BTreeMap<&'static str, f64>,
}

impl Stopwatch {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        *self.timings.entry(stage).or_default() += t0.elapsed().as_secs_f64() * 1e3;
        out
    }

    fn over_budget(&self) -> bool {
        self.budget.is_some_and(|b| self.start.elapsed() > b)
    }
}

fn reduction_for_round(
    config: &RunConfig,
    round: usize,
    basis: &Basis,
) -> Result<(ReductionResult, &'static str)> {
    if let ReductionSource::Fixture(fx) = &config.reduction {
        let fx_basis = fx.basis()?;
        if fx_basis == *basis {
            let reduced = fx
                .reduced_basis()?
                .ok_or_else(|| Error::Fixture("fixture has no reduced_basis".into()))?;
            return Ok((
                ReductionResult::from_reduced(basis.clone(), reduced, config.delta.clone())?,
                "fixture",
            ));
        }
        if round == 0 {
            return Err(Error::Fixture(
                "fixture basis does not match the constructed lattice".into(),
            ));
        }
    }
    Ok((lll_reduce(basis, &config.delta)?, "internal"))
}

pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let n = config.validate()?;
    let inst = &config.instance;
    let modulus = &inst.modulus;
    let primes = first_primes(n);
    let smooth_primes = first_primes(inst.smooth_bound).primes;

    let mut watch = Stopwatch {
        start: Instant::now(),
        budget: config.budget,
        timings: BTreeMap::new(),
    };
    let mut rounds = Vec::new();
    let mut pool: Vec<SmoothRelation> = Vec::new();
    let mut seen = HashSet::new();
    let mut outcome = None;
    let mut factors = None;

    for round in 0..config.max_rounds {
        if watch.over_budget() {
            outcome = Some(RunStatus::BudgetExceeded);
            break;
        }
        let stage = |e: Error, name| e.in_stage(name, round);

        let override_diag = if round == 0 {
            inst.diagonal_override.as_deref()
        } else {
            None
        };
        let diagonal = diagonal_permutation(n, inst.seed, round as u64, override_diag)
            .map_err(|e| stage(e, "diagonal"))?;
        let cvp = watch
            .time("lattice", || build_cvp(modulus, inst.c, &primes, &diagonal))
            .map_err(|e| stage(e, "lattice"))?;
        let (reduction, reduction_used) = watch
            .time("reduction", || {
                reduction_for_round(config, round, &cvp.basis)
            })
            .map_err(|e| stage(e, "reduction"))?;
        let babai = watch
            .time("babai", || babai_nearest_plane(&reduction, &cvp.target))
            .map_err(|e| stage(e, "babai"))?;
        let hamiltonian = watch
            .time("hamiltonian", || {
                QuboProblem::from_babai(&babai, &reduction.reduced, &cvp.target)
                    .and_then(|p| build_hamiltonian(&p))
            })
            .map_err(|e| stage(e, "hamiltonian"))?;
        let (ground_state, ground_energy) = exact_ground_state(&hamiltonian);

        let (chosen, vqe_record) = match &config.solver {
            Solver::Exact => (ground_state.clone(), None),
            Solver::Vqe(vc) => {
                let vc = VqeConfig {
                    seed: round_vqe_seed(inst.seed, round),
                    ..vc.clone()
                };
                let out = watch
                    .time("vqe", || optimize::<f64>(&hamiltonian, &vc))
                    .map_err(|e| stage(e, "vqe"))?;
                let record = VqeRecord {
                    seed: vc.seed,
                    argmax: out.argmax_bitstring.to_string(),
                    best_expectation: out.best_expectation,
                    converged: out.converged,
                    restarts: out.per_restart_log.clone(),
                    table: report_table(&out, &hamiltonian, 4),
                };
                (out.argmax_bitstring, Some(record))
            }
        };
        let selections: Vec<Selection> = match config.selection {
            SelectionMode::Argmax => vec![chosen],
            SelectionMode::Exhaustive => (0..hamiltonian.dim())
                .map(|i| Selection::from_index(i, n))
                .collect(),
        };

        let candidates = watch
            .time("relations", || {
                candidate_pairs(&babai, &selections, &reduction, &cvp.diagonal, &primes)
            })
            .map_err(|e| stage(e, "relations"))?;
        let mut new_relations = Vec::new();
        for c in &candidates {
            if factors.is_none() {
                for x in [&c.pair.u, &c.pair.v] {
                    if let Some(pq) = split(modulus, &x.gcd(modulus)) {
                        factors = Some((pq, "gcd", None));
                        break;
                    }
                }
            }
            if let Some(rel) = check_sr_pair(&c.pair, modulus, &smooth_primes) {
                if seen.insert((rel.pair.u.clone(), rel.pair.v.clone())) {
                    new_relations.push(rel);
                }
            }
        }
        pool.extend(new_relations.iter().cloned());

        let result = if factors.is_some() {
            None
        } else {
            let r = watch
                .time("gf2", || factor_relations(&pool, modulus, &smooth_primes))
                .map_err(|e| stage(e, "gf2"))?;
            if let (FactorStatus::Found, Some(pq)) = (r.status, r.factors.clone()) {
                factors = Some((pq, "congruence", Some(r.clone())));
            }
            Some(r)
        };

        rounds.push(RoundRecord {
            round,
            diagonal: cvp.diagonal.clone(),
            reduction_used,
            basis: matrix_values(&cvp.basis),
            target: int_values(&cvp.target),
            reduced_basis: matrix_values(&reduction.reduced),
            b_op: int_values(&babai.b_op),
            babai_dist_sq: babai.dist_sq.to_string(),
            ground_state: ground_state.to_string(),
            ground_energy: ground_energy.to_string(),
            vqe: vqe_record,
            selections: selections.iter().map(ToString::to_string).collect(),
            uv_pairs: candidates
                .iter()
                .map(|c| UvRecord {
                    selection: c.selection.to_string(),
                    u: c.pair.u.to_string(),
                    v: c.pair.v.to_string(),
                    e: c.pair.exponents.clone(),
                })
                .collect(),
            sr_pairs: new_relations.iter().map(RelationRow::from).collect(),
            factor_status: match (&factors, &result) {
                (Some(_), _) => "found",
                (None, Some(r)) => r.status.as_str(),
                (None, None) => "no-solution",
            },
        });
        if factors.is_some() {
            outcome = Some(RunStatus::Factored);
            break;
        }
    }

    let status = outcome.unwrap_or(RunStatus::NotFactored);
    let (final_factors, method, certificate) = match factors {
        Some((pq, method, result)) => (Some(pq), Some(method), result.and_then(certificate_record)),
        None => (None, None, None),
    };
    if let Some((p, q)) = &final_factors {
        if &(p * q) != modulus {
            return Err(Error::Inconsistency(format!("{p} × {q} ≠ {modulus}")));
        }
    }

    Ok(RunReport {
        settings: settings(config, n),
        rounds,
        relations: pool.iter().map(RelationRow::from).collect(),
        outcome: Outcome {
            status,
            method,
            factors: final_factors
                .as_ref()
                .map(|(p, q)| [p.to_string(), q.to_string()]),
            certificate,
        },
        timings_ms: watch.timings,
        factors: final_factors,
        smooth_relations: pool,
    })
}

fn certificate_record(r: FactorResult) -> Option<CertificateRecord> {
    r.certificate.map(|c| CertificateRecord {
        subset: c.subset,
        u: c.u.to_string(),
        w: c.w.to_string(),
        z: c.z.to_string(),
    })
}

fn settings(config: &RunConfig, dimension: usize) -> RunSettings {
    let inst = &config.instance;
    RunSettings {
        modulus: inst.modulus.to_string(),
        l: inst.l,
        c: inst.c,
        smooth_bound: inst.smooth_bound,
        seed: inst.seed,
        diagonal_override: inst.diagonal_override.clone(),
        dimension,
        delta: format_ratio(&config.delta),
        reduction: match config.reduction {
            ReductionSource::Internal => "internal",
            ReductionSource::Fixture(_) => "fixture",
        },
        solver: match &config.solver {
            Solver::Exact => json!({ "kind": "exact" }),
            Solver::Vqe(v) => json!({
                "kind": "vqe",
                "depth": v.depth,
                "max_iterations": v.max_iterations,
                "restarts": v.restarts,
                "tolerance": v.tolerance,
                "shots": v.shots,
            }),
        },
        max_rounds: config.max_rounds,
        selection: match config.selection {
            SelectionMode::Argmax => "argmax",
            SelectionMode::Exhaustive => "all",
        },
    }
}

/// Optimum of `‖t − b‖²` over `b = b_op + Σ k_i b_i` with `|k_i| ≤ radius`,
/// found by exhaustive search around the Babai point.
pub fn local_cvp_dist_sq(
    reduction: &ReductionResult,
    target: &[BigInt],
    babai: &BabaiResult,
    radius: i64,
) -> Result<BigInt> {
    let shifted: Vec<BigInt> = target.iter().zip(&babai.b_op).map(|(t, b)| t - b).collect();
    Ok(brute_force_cvp(&reduction.reduced, &shifted, radius)?.dist_sq)
}

/// Search radius for the recorded CVP optimum; larger lattices get none.
fn oracle_radius(n: usize) -> Option<i64> {
    match n {
        0..=5 => Some(3),
        6 => Some(2),
        _ => None,
    }
}

fn fixture_for(
    modulus: &BigUint,
    cvp: &CvpInstance,
    reduction: &ReductionResult,
    delta: &BigRational,
) -> Result<Fixture> {
    let babai = babai_nearest_plane(reduction, &cvp.target)?;
    let mut fx = Fixture::from_instance(modulus, cvp, delta)?
        .with_reduction(reduction)?
        .with_babai(&babai)?;
    if let Some(r) = oracle_radius(cvp.diagonal.len()) {
        fx.cvp_dist_sq = Some(local_cvp_dist_sq(reduction, &cvp.target, &babai, r)?.to_string());
    }
    Ok(fx)
}

/// Fixture describing one round's lattice, reduction and Babai point.
pub fn round_fixture(config: &RunConfig, round: usize) -> Result<Fixture> {
    let n = config.validate()?;
    let inst = &config.instance;
    let override_diag = if round == 0 {
        inst.diagonal_override.as_deref()
    } else {
        None
    };
    let diagonal = diagonal_permutation(n, inst.seed, round as u64, override_diag)?;
    let cvp = build_cvp(&inst.modulus, inst.c, &first_primes(n), &diagonal)?;
    let (reduction, _) = reduction_for_round(config, round, &cvp.basis)?;
    fixture_for(&inst.modulus, &cvp, &reduction, &config.delta)
}

/// Writes `round-<k>.json` for every round of `report`, each carrying the
/// relations accumulated up to that round.
pub fn emit_fixtures(config: &RunConfig, report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut relations = Vec::new();
    let mut paths = Vec::new();
    for r in &report.rounds {
        relations.extend(r.sr_pairs.iter().cloned());
        let mut fx = round_fixture(config, r.round)?;
        fx.relations = Some(relations.clone());
        paths.push(export_fixture(dir, &format!("round-{}", r.round), &fx)?);
    }
    Ok(paths)
}

/// Largest modulus drawn by [`random_fixture`].
const RANDOM_MODULUS_BITS: u32 = 24;

/// A self-contained fixture for a random valid instance of dimension
/// `2..=max_dim`, reproducible from `(seed, index)`.
pub fn random_fixture(seed: u64, index: u64, max_dim: usize) -> Result<Fixture> {
    if max_dim < 2 {
        return Err(Error::InvalidConfig("max_dim must be at least 2".into()));
    }
    let mut rng = stream_rng(seed, Stream::Fixtures, index);
    let delta = BigRational::new(3.into(), 4.into());
    loop {
        let modulus = BigUint::from(rng.gen_range(15u64..1 << RANDOM_MODULUS_BITS) | 1);
        let l = rng.gen_range(1..=2u32);
        if validate_modulus(&modulus).is_err() {
            continue;
        }
        let n = match lattice_dimension(&modulus, l) {
            Ok(n) if n <= max_dim => n,
            _ => continue,
        };
        let c = [1.0, 1.5, 2.0, 2.5][rng.gen_range(0..4)];
        let diagonal = diagonal_permutation(n, rng.next_u64(), 0, None)?;
        let cvp = build_cvp(&modulus, c, &first_primes(n), &diagonal)?;
        let reduction = lll_reduce(&cvp.basis, &delta)?;
        return fixture_for(&modulus, &cvp, &reduction, &delta);
    }
}
