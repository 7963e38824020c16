//! Benchmark orchestration: quality metrics, benchmark plans, records and
//! their aggregation.
//!
//! # CSV format
//!
//! One header line, then one line per record, comma separated:
//!
//! ```text
//! algo,dim,seed,preprocess,hermite_root,elapsed_s,loop_iterations,insertions
//! PotLLL,40,0,true,1.0142957106137064,0.004183,1204,398
//! ```
//!
//! `algo` is one of `LLL`, `PotLLL`, `PotLLL2`, `DeepLLL-<beta>`,
//! `BKZ-<beta>`. `preprocess` is `true` or `false`. Floats are written in the
//! shortest form that reads back to the same `f64`. `loop_iterations` and
//! `insertions` include the LLL preprocessing phase.
//!
//! # JSON format
//!
//! One JSON object per line with the CSV fields plus `stats`, the full
//! [`ReductionStats`] of the run (durations in seconds).
//!
//! # Preprocessing
//!
//! LLL is deterministic, so all cells of one lattice that start with LLL
//! share a single LLL run: the main phase runs on a copy of the LLL output
//! and the LLL time is added to its elapsed time. BKZ always starts with LLL,
//! whatever the preprocessing flag says.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bkz::{bkz_reduce, is_bkz_reduced};
use crate::deep_lll::{deep_lll_reduce, is_deep_reduced};
use crate::error::{LatticeError, Result};
use crate::float::ExtFloat;
use crate::gso::{compute_gso, GsoState};
use crate::latgen::{generate_random_hnf, GenSpec};
use crate::lll::{is_lll_reduced, lll_reduce};
use crate::pot_lll::{is_pot_reduced, pot_lll_reduce};
use crate::potential::log_volume;
use crate::types::{Basis, Entry, FloatConfig, InsertionStrategy, IntBasis, ReductionParams, ReductionStats};
use crate::verify::Reducedness;

/// Largest dimension a benchmark plan may ask for.
pub const MAX_BENCH_DIM: usize = 400;

/// Two-sided confidence level of [`AggregateRow`] intervals.
pub const CONFIDENCE_LEVEL: f64 = 0.999;

/// `ln ||b_i||` for every row.
fn log_row_norms<T: Entry>(basis: &Basis<T>) -> Vec<f64> {
    (0..basis.rank()).map(|i| 0.5 * basis.norm_sq(i).log2_abs() * std::f64::consts::LN_2).collect()
}

fn root_factor<T: Entry>(basis: &Basis<T>, log_norm: f64) -> Result<f64> {
    let g: GsoState<ExtFloat> = compute_gso(basis)?;
    let n = basis.rank() as f64;
    Ok(((log_norm - log_volume(&g)? / n) / n).exp())
}

/// `(||v|| / vol(L)^{1/n})^{1/n}` for the shortest row `v` of `basis`,
/// computed in the log domain.
pub fn hermite_root_factor<T: Entry>(basis: &Basis<T>) -> Result<f64> {
    let shortest = log_row_norms(basis).into_iter().fold(f64::INFINITY, f64::min);
    root_factor(basis, shortest)
}

/// As [`hermite_root_factor`], but for the first row.
pub fn first_row_hermite_root<T: Entry>(basis: &Basis<T>) -> Result<f64> {
    root_factor(basis, log_row_norms(basis)[0])
}

/// `((delta - 1/4)^{-(n-1)/4})^{1/n}`: the proven bound on the n-th root
/// Hermite factor of any `delta`-LLL reduced basis of rank `n`.
pub fn worst_case_bound(n: usize, delta: f64) -> f64 {
    let n = n as f64;
    (-(n - 1.0) / 4.0 * (delta - 0.25).ln() / n).exp()
}

/// The reducers a benchmark can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Lll,
    PotLll,
    PotLll2,
    DeepLll { beta: usize },
    Bkz { beta: usize },
}

impl Algo {
    /// The seven configurations of the standard comparison.
    pub const STANDARD: [Algo; 7] = [
        Algo::Lll,
        Algo::Bkz { beta: 5 },
        Algo::PotLll,
        Algo::PotLll2,
        Algo::DeepLll { beta: 5 },
        Algo::Bkz { beta: 10 },
        Algo::DeepLll { beta: 10 },
    ];

    pub fn params(&self, delta: f64, preprocess: bool, float: FloatConfig) -> ReductionParams {
        let mut p = ReductionParams::default().with_delta(delta).with_preprocess(preprocess);
        p.float = float;
        match *self {
            Algo::Lll | Algo::PotLll => p,
            Algo::PotLll2 => p.with_strategy(InsertionStrategy::FirstBelowDelta),
            Algo::DeepLll { beta } | Algo::Bkz { beta } => p.with_beta(beta),
        }
    }

    pub fn reduce<T: Entry>(&self, basis: &mut Basis<T>, params: &ReductionParams) -> Result<ReductionStats> {
        match self {
            Algo::Lll => lll_reduce(basis, params),
            Algo::PotLll | Algo::PotLll2 => pot_lll_reduce(basis, params),
            Algo::DeepLll { .. } => deep_lll_reduce(basis, params),
            Algo::Bkz { .. } => bkz_reduce(basis, params),
        }
    }

    /// Runs the reducedness oracle of the algorithm's own notion.
    pub fn verify<T: Entry>(&self, basis: &Basis<T>, delta: f64) -> Result<Reducedness> {
        match *self {
            Algo::Lll => is_lll_reduced(basis, delta),
            Algo::PotLll | Algo::PotLll2 => is_pot_reduced(basis, delta),
            Algo::DeepLll { beta } => is_deep_reduced(basis, delta, beta),
            Algo::Bkz { beta } => is_bkz_reduced(basis, delta, beta),
        }
    }

    /// Whether the algorithm's run starts with LLL when `preprocess` is set.
    fn starts_with_lll(&self, preprocess: bool) -> bool {
        match self {
            Algo::Lll | Algo::Bkz { .. } => true,
            _ => preprocess,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::Lll => write!(f, "LLL"),
            Algo::PotLll => write!(f, "PotLLL"),
            Algo::PotLll2 => write!(f, "PotLLL2"),
            Algo::DeepLll { beta } => write!(f, "DeepLLL-{beta}"),
            Algo::Bkz { beta } => write!(f, "BKZ-{beta}"),
        }
    }
}

/// Accepts the display names (`DeepLLL-5`) and the command-line spellings
/// (`deeplll:5`, `bkz5`), case-insensitively.
impl FromStr for Algo {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || LatticeError::InvalidParams(format!("unknown algorithm `{s}`"));
        let split = |prefix: &str| -> Option<Result<usize>> {
            let rest = lower.strip_prefix(prefix)?;
            let rest = rest.trim_start_matches([':', '-']);
            Some(rest.parse::<usize>().map_err(|_| bad()))
        };
        match lower.as_str() {
            "lll" => return Ok(Algo::Lll),
            "potlll" => return Ok(Algo::PotLll),
            "potlll2" => return Ok(Algo::PotLll2),
            _ => {}
        }
        if let Some(beta) = split("deeplll") {
            return Ok(Algo::DeepLll { beta: beta? });
        }
        if let Some(beta) = split("bkz") {
            return Ok(Algo::Bkz { beta: beta? });
        }
        Err(bad())
    }
}

impl Serialize for Algo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dimensions × seeds × cells, where a cell is an algorithm together with a
/// preprocessing flag.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchPlan {
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub cells: Vec<(Algo, bool)>,
    pub delta: f64,
    pub float: FloatConfig,
}

impl BenchPlan {
    /// `delta = 0.99`, preprocessing on.
    pub fn new(dims: Vec<usize>, seeds: Vec<u64>, algos: Vec<Algo>) -> Self {
        let cells = algos.into_iter().map(|a| (a, true)).collect();
        BenchPlan { dims, seeds, cells, delta: 0.99, float: FloatConfig::default() }
    }

    /// Runs every algorithm of the plan once per flag.
    pub fn with_preprocess(mut self, flags: Vec<bool>) -> Self {
        let mut algos: Vec<Algo> = Vec::new();
        for (a, _) in &self.cells {
            if !algos.contains(a) {
                algos.push(*a);
            }
        }
        self.cells = algos.into_iter().flat_map(|a| flags.iter().map(move |&f| (a, f))).collect();
        self
    }

    pub fn with_cells(mut self, cells: Vec<(Algo, bool)>) -> Self {
        self.cells = cells;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LatticeError::InvalidParams(m));
        if self.dims.is_empty() || self.seeds.is_empty() || self.cells.is_empty() {
            return bad("benchmark plan has an empty axis".into());
        }
        if let Some(d) = self.dims.iter().find(|&&d| !(2..=MAX_BENCH_DIM).contains(&d)) {
            return bad(format!("dimension {d} outside 2..={MAX_BENCH_DIM}"));
        }
        for (algo, _) in &self.cells {
            algo.params(self.delta, true, self.float).validate()?;
            if let Algo::DeepLll { beta } | Algo::Bkz { beta } = algo {
                if *beta < 2 {
                    return bad(format!("{algo}: blocksize must be at least 2"));
                }
            }
        }
        self.float.validate()
    }
}

/// One reduced lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algo: Algo,
    pub dim: usize,
    pub seed: u64,
    pub preprocess: bool,
    pub hermite_root: f64,
    pub elapsed_s: f64,
    pub loop_iterations: u64,
    pub insertions: u64,
    /// Full counters; absent for records read back from CSV.
    #[serde(skip_deserializing, skip_serializing_if = "Option::is_none")]
    pub stats: Option<ReductionStats>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    algo: Algo,
    dim: usize,
    seed: u64,
    preprocess: bool,
    hermite_root: f64,
    elapsed_s: f64,
    loop_iterations: u64,
    insertions: u64,
}

/// A cell that could not be completed or failed verification.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchFailure {
    pub algo: Algo,
    pub dim: usize,
    pub seed: u64,
    pub preprocess: bool,
    pub message: String,
}

impl fmt::Display for BenchFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dim {} seed {} preprocess {}: {}", self.algo, self.dim, self.seed, self.preprocess, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<BenchFailure>,
}

impl BenchReport {
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        aggregate(&self.records)
    }
}

struct Preprocessed {
    basis: IntBasis,
    stats: ReductionStats,
}

fn total_counts(stats: &ReductionStats) -> (u64, u64) {
    let (mut it, mut ins) = (stats.loop_iterations, stats.insertions);
    if let Some(pre) = &stats.preprocessing {
        it += pre.loop_iterations;
        ins += pre.insertions;
    }
    (it, ins)
}

fn run_cell(
    plan: &BenchPlan,
    algo: Algo,
    preprocess: bool,
    input: &IntBasis,
    lll: &mut Option<Result<Preprocessed, String>>,
) -> Result<BenchRecord, String> {
    let params = algo.params(plan.delta, preprocess, plan.float);
    let dim = input.rank();
    let (basis, stats) = if algo.starts_with_lll(preprocess) {
        let pre = lll.get_or_insert_with(|| {
            let mut b = input.clone();
            let lll_params = Algo::Lll.params(plan.delta, false, plan.float);
            let start = Instant::now();
            let mut stats = lll_reduce(&mut b, &lll_params).map_err(|e| format!("LLL preprocessing: {e}"))?;
            stats.elapsed = start.elapsed();
            Ok(Preprocessed { basis: b, stats })
        });
        let pre = pre.as_ref().map_err(Clone::clone)?;
        if algo == Algo::Lll {
            (pre.basis.clone(), pre.stats.clone())
        } else {
            let mut b = pre.basis.clone();
            let mut stats = algo.reduce(&mut b, &params.clone().with_preprocess(false)).map_err(|e| e.to_string())?;
            if let Algo::Bkz { .. } = algo {
                // the internal LLL pass found nothing to do; report the real one
                stats.elapsed -= stats.preprocessing.as_ref().map_or(Default::default(), |p| p.elapsed);
            }
            stats.elapsed += pre.stats.elapsed;
            stats.preprocessing = Some(Box::new(pre.stats.clone()));
            (b, stats)
        }
    } else {
        let mut b = input.clone();
        let stats = algo.reduce(&mut b, &params).map_err(|e| e.to_string())?;
        (b, stats)
    };

    match algo.verify(&basis, plan.delta).map_err(|e| e.to_string())? {
        Reducedness::Reduced => {}
        Reducedness::Violated(v) => return Err(format!("oracle rejected the output: {v}")),
    }
    let hermite_root = hermite_root_factor(&basis).map_err(|e| e.to_string())?;
    let bound = worst_case_bound(dim, plan.delta);
    if !(hermite_root.is_finite() && hermite_root > 0.0 && hermite_root <= bound) {
        return Err(format!("hermite root factor {hermite_root} violates the worst-case bound {bound}"));
    }
    let (loop_iterations, insertions) = total_counts(&stats);
    Ok(BenchRecord {
        algo,
        dim,
        seed: 0,
        preprocess,
        hermite_root,
        elapsed_s: stats.elapsed.as_secs_f64(),
        loop_iterations,
        insertions,
        stats: Some(stats),
    })
}

/// Runs every cell of `plan` in the order dims, seeds, cells, calling
/// `on_record` as each record is produced. Failed cells are collected in the
/// report and the run continues.
pub fn run_bench(plan: &BenchPlan, mut on_record: impl FnMut(&BenchRecord)) -> Result<BenchReport> {
    plan.validate()?;
    let mut report = BenchReport::default();
    for &dim in &plan.dims {
        for &seed in &plan.seeds {
            let input = generate_random_hnf(&GenSpec::new(dim, seed))?;
            let mut lll = None;
            for &(algo, preprocess) in &plan.cells {
                match run_cell(plan, algo, preprocess, &input, &mut lll) {
                    Ok(mut record) => {
                        record.seed = seed;
                        on_record(&record);
                        report.records.push(record);
                    }
                    Err(message) => {
                        let failure = BenchFailure { algo, dim, seed, preprocess, message };
                        log::error!("{failure}");
                        report.failures.push(failure);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Mean and confidence interval of one `(algo, dim, preprocess)` group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub algo: Algo,
    pub dim: usize,
    pub preprocess: bool,
    pub count: usize,
    pub mean_hermite_root: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_elapsed_s: f64,
    /// Mean of `ln elapsed_s`.
    pub mean_log_time: f64,
}

impl AggregateRow {
    /// Whether the confidence intervals of two rows intersect.
    pub fn ci_overlaps(&self, other: &AggregateRow) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Half-width of the Student-t interval at [`CONFIDENCE_LEVEL`]; zero for
/// fewer than two samples.
pub fn t_half_width(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - (1.0 - CONFIDENCE_LEVEL) / 2.0);
    t * (var / n as f64).sqrt()
}

/// Groups records by `(algo, dim, preprocess)` in order of first appearance.
pub fn aggregate(records: &[BenchRecord]) -> Vec<AggregateRow> {
    let mut order: Vec<(Algo, usize, bool)> = Vec::new();
    let mut groups: HashMap<(Algo, usize, bool), Vec<&BenchRecord>> = HashMap::new();
    for r in records {
        let key = (r.algo, r.dim, r.preprocess);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let n = rs.len() as f64;
            let roots: Vec<f64> = rs.iter().map(|r| r.hermite_root).collect();
            let mean = roots.iter().sum::<f64>() / n;
            let half = t_half_width(&roots);
            AggregateRow {
                algo: key.0,
                dim: key.1,
                preprocess: key.2,
                count: rs.len(),
                mean_hermite_root: mean,
                ci_low: mean - half,
                ci_high: mean + half,
                mean_elapsed_s: rs.iter().map(|r| r.elapsed_s).sum::<f64>() / n,
                mean_log_time: rs.iter().map(|r| r.elapsed_s.ln()).sum::<f64>() / n,
            }
        })
        .collect()
}

/// Writes records in the CSV format of the module docs.
pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            algo: r.algo,
            dim: r.dim,
            seed: r.seed,
            preprocess: r.preprocess,
            hermite_root: r.hermite_root,
            elapsed_s: r.elapsed_s,
            loop_iterations: r.loop_iterations,
            insertions: r.insertions,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<CsvRow>()
        .map(|row| {
            let r = row?;
            Ok(BenchRecord {
                algo: r.algo,
                dim: r.dim,
                seed: r.seed,
                preprocess: r.preprocess,
                hermite_root: r.hermite_root,
                elapsed_s: r.elapsed_s,
                loop_iterations: r.loop_iterations,
                insertions: r.insertions,
                stats: None,
            })
        })
        .collect()
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, records: &[BenchRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_json_lines<R: BufRead>(input: R) -> Result<Vec<BenchRecord>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}
