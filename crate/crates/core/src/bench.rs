//! Deterministic workloads and strategy benchmarking for the commutation
//! cache.
//!
//! A workload is a replayable list of products and powers in one algebra.
//! Running it under a [`CacheStrategy`] yields the final polynomials plus a
//! report: wall time, peak stored entries, and the per-`(m, n)` request
//! matrix.  Because requests are issued by the multiplication routine
//! independently of storage, the matrix is a property of the workload
//! alone - identical across strategies and across repeated runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraRef, ModelClass};
use crate::coeffs::{BigRat, FieldMode};
use crate::ncpoly::{CacheStrategy, CommuteCache, NcError, NcPoly};

/// One benchmark operation.
#[derive(Clone, Debug)]
pub enum WorkOp {
    Mul(NcPoly, NcPoly),
    Power(NcPoly, u32),
}

/// A named, replayable operation sequence in one algebra.
#[derive(Clone, Debug)]
pub struct Workload {
    pub name: String,
    pub algebra: AlgebraRef,
    pub ops: Vec<WorkOp>,
}

impl Workload {
    /// Powers `base^1 .. base^max_n`, each computed from scratch.
    pub fn powers(name: &str, alg: &AlgebraRef, base: NcPoly, max_n: u32) -> Workload {
        let ops = (1..=max_n).map(|n| WorkOp::Power(base.clone(), n)).collect();
        Workload { name: name.into(), algebra: alg.clone(), ops }
    }

    /// `count` seeded random products of degree-bounded polynomials with
    /// small integer coefficients.
    pub fn random_products(
        name: &str,
        alg: &AlgebraRef,
        count: usize,
        max_degree: u32,
        seed: u64,
    ) -> Workload {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ops = Vec::with_capacity(count);
        for _ in 0..count {
            let f = random_poly(alg, max_degree, &mut rng);
            let g = random_poly(alg, max_degree, &mut rng);
            ops.push(WorkOp::Mul(f, g));
        }
        Workload { name: name.into(), algebra: alg.clone(), ops }
    }

    /// The default suite: powers of `x + y` in the Weyl model, seeded
    /// random Weyl products, and the binomial-lemma powers in the Weyl,
    /// shift, and quantum-plane (q = 2) models.
    pub fn default_suite(seed: u64) -> Vec<Workload> {
        let rat = FieldMode::Rational;
        let weyl: AlgebraRef =
            std::sync::Arc::new(ModelClass::Weyl.params(rat, &rat.one()).unwrap());
        let shift: AlgebraRef =
            std::sync::Arc::new(ModelClass::Shift.params(rat, &rat.one()).unwrap());
        let qplane: AlgebraRef = std::sync::Arc::new(
            ModelClass::QuantumPlane.params(rat, &rat.from_i64(2)).unwrap(),
        );
        let xy = |alg: &AlgebraRef| {
            NcPoly::gen_x(alg).add(&NcPoly::gen_y(alg)).expect("same algebra")
        };
        vec![
            Workload::powers("weyl-powers", &weyl, xy(&weyl), 12),
            Workload::random_products("weyl-random-products", &weyl, 100, 5, seed),
            Workload::powers("binomial-weyl", &weyl, xy(&weyl), 12),
            Workload::powers("binomial-shift", &shift, xy(&shift), 12),
            Workload::powers("binomial-qplane", &qplane, xy(&qplane), 10),
        ]
    }
}

fn random_poly<R: Rng>(alg: &AlgebraRef, max_degree: u32, rng: &mut R) -> NcPoly {
    let mode = alg.mode();
    let mut p = NcPoly::zero(alg);
    let terms = rng.random_range(1..=4);
    for _ in 0..terms {
        let a = rng.random_range(0..=max_degree);
        let b = rng.random_range(0..=max_degree.saturating_sub(a));
        let c = rng.random_range(-9i64..=9);
        if c == 0 {
            continue;
        }
        let coeff = mode
            .embed_rat(&BigRat::from_integer(c.into()))
            .expect("integers embed in every mode");
        p = p
            .add(&NcPoly::monomial(alg, a, b, coeff).expect("degrees are small"))
            .expect("same algebra");
    }
    p
}

/// One `(m, n)` cell of the request matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RequestCount {
    pub m: u32,
    pub n: u32,
    pub count: u64,
}

/// Summary of one workload run under one strategy.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub workload: String,
    pub strategy: String,
    pub wall_ms: f64,
    pub peak_entries: usize,
    pub requests: Vec<RequestCount>,
}

/// Report plus the polynomials the workload produced, for cross-strategy
/// equality checks.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub report: BenchReport,
    pub outputs: Vec<NcPoly>,
}

struct Timer {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Timer {
    fn start() -> Timer {
        Timer {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn stop(self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64() * 1000.0
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

/// Executes the workload with a fresh cache under the given strategy.
pub fn run_bench(workload: &Workload, strategy: CacheStrategy) -> Result<BenchRun, NcError> {
    run_bench_with_cleaning(workload, strategy, None)
}

/// [`run_bench`] with optional manual cache cleaning: after every workload
/// operation, stored entries above total degree `clear_above` are dropped.
/// There is no automatic policy; the cutoff is entirely caller-chosen.
pub fn run_bench_with_cleaning(
    workload: &Workload,
    strategy: CacheStrategy,
    clear_above: Option<u32>,
) -> Result<BenchRun, NcError> {
    let mut cache = CommuteCache::new(&workload.algebra, strategy);
    let mut outputs = Vec::with_capacity(workload.ops.len());
    let timer = Timer::start();
    for op in &workload.ops {
        let out = match op {
            WorkOp::Mul(f, g) => f.mul_with(g, &mut cache)?,
            WorkOp::Power(f, n) => f.pow_with(*n, &mut cache)?,
        };
        outputs.push(out);
        if let Some(cutoff) = clear_above {
            cache.clear_above(cutoff);
        }
    }
    let wall_ms = timer.stop();
    let requests = cache
        .counters()
        .iter()
        .map(|(&(m, n), &count)| RequestCount { m, n, count })
        .collect();
    let report = BenchReport {
        workload: workload.name.clone(),
        strategy: strategy.name().to_string(),
        wall_ms,
        peak_entries: cache.peak_entries(),
        requests,
    };
    Ok(BenchRun { report, outputs })
}

impl BenchReport {
    /// CSV emission with header `m,n,count`, cells in ascending `(m, n)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,count\n");
        for r in &self.requests {
            out.push_str(&format!("{},{},{}\n", r.m, r.n, r.count));
        }
        out
    }

    /// Human-readable request matrix: `m` runs down the rows, `n` across
    /// the columns, empty cells shown as `.`.
    pub fn format_request_matrix(&self) -> String {
        if self.requests.is_empty() {
            return String::from("(no requests)\n");
        }
        let max_m = self.requests.iter().map(|r| r.m).max().unwrap();
        let max_n = self.requests.iter().map(|r| r.n).max().unwrap();
        let mut grid = vec![vec![0u64; max_n as usize]; max_m as usize];
        for r in &self.requests {
            grid[r.m as usize - 1][r.n as usize - 1] = r.count;
        }
        let width = self
            .requests
            .iter()
            .map(|r| r.count.to_string().len())
            .max()
            .unwrap()
            .max(max_n.to_string().len())
            .max(3);
        let mut out = String::new();
        out.push_str(&format!("{:>4}", "m\\n"));
        for n in 1..=max_n {
            out.push_str(&format!(" {:>width$}", n, width = width));
        }
        out.push('\n');
        for m in 1..=max_m {
            out.push_str(&format!("{:>4}", m));
            for n in 1..=max_n {
                let c = grid[m as usize - 1][n as usize - 1];
                if c == 0 {
                    out.push_str(&format!(" {:>width$}", ".", width = width));
                } else {
                    out.push_str(&format!(" {:>width$}", c, width = width));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_on_default_suite() {
        for workload in Workload::default_suite(1) {
            let runs: Vec<BenchRun> = CacheStrategy::ALL
                .iter()
                .map(|&s| run_bench(&workload, s).unwrap())
                .collect();
            // Identical outputs.
            assert_eq!(runs[0].outputs, runs[1].outputs, "{}", workload.name);
            assert_eq!(runs[1].outputs, runs[2].outputs, "{}", workload.name);
            // Identical request matrices.
            assert_eq!(
                runs[0].report.requests, runs[1].report.requests,
                "{}",
                workload.name
            );
            assert_eq!(
                runs[1].report.requests, runs[2].report.requests,
                "{}",
                workload.name
            );
            // Storage ordering: rewriting-from-cache keeps intermediates.
            let by_name: std::collections::HashMap<&str, usize> = runs
                .iter()
                .map(|r| (r.report.strategy.as_str(), r.report.peak_entries))
                .collect();
            assert!(by_name["cache-only"] >= by_name["cache-and-formulas"]);
            assert_eq!(by_name["formulas-only"], 0);
        }
    }

    #[test]
    fn repeated_runs_are_deterministic() {
        let workload = &Workload::default_suite(7)[1];
        let a = run_bench(workload, CacheStrategy::CacheAndFormulas).unwrap();
        let b = run_bench(workload, CacheStrategy::CacheAndFormulas).unwrap();
        assert_eq!(a.report.requests, b.report.requests);
        assert_eq!(a.outputs, b.outputs);
        assert_eq!(a.report.peak_entries, b.report.peak_entries);
    }

    #[test]
    fn different_seeds_change_random_workloads() {
        let suite_a = Workload::default_suite(1);
        let suite_b = Workload::default_suite(2);
        let a = run_bench(&suite_a[1], CacheStrategy::FormulasOnly).unwrap();
        let b = run_bench(&suite_b[1], CacheStrategy::FormulasOnly).unwrap();
        assert_ne!(a.report.requests, b.report.requests);
    }

    #[test]
    fn report_serialization_shape() {
        let workload = &Workload::default_suite(1)[0];
        let run = run_bench(workload, CacheStrategy::CacheOnly).unwrap();
        let value = serde_json::to_value(&run.report).unwrap();
        assert!(value.get("workload").is_some());
        assert!(value.get("strategy").is_some());
        assert!(value.get("wall_ms").is_some());
        assert!(value.get("peak_entries").is_some());
        let reqs = value.get("requests").unwrap().as_array().unwrap();
        assert!(!reqs.is_empty());
        assert!(reqs[0].get("m").is_some());
        let csv = run.report.to_csv();
        assert!(csv.starts_with("m,n,count\n"));
        assert!(csv.lines().count() > 1);
        let matrix = run.report.format_request_matrix();
        assert!(matrix.starts_with(" m\\n"));
    }

    #[test]
    fn manual_cleaning_changes_storage_not_results() {
        let workload = &Workload::default_suite(1)[0];
        let plain = run_bench(workload, CacheStrategy::CacheOnly).unwrap();
        let cleaned =
            run_bench_with_cleaning(workload, CacheStrategy::CacheOnly, Some(2)).unwrap();
        assert_eq!(plain.outputs, cleaned.outputs);
        assert_eq!(plain.report.requests, cleaned.report.requests);
        assert!(cleaned.report.peak_entries <= plain.report.peak_entries);
    }

    #[test]
    fn power_workload_requests_reflect_left_fold() {
        // (x+y)^3 in the Weyl model: the left-fold products request the
        // commutations of y-degrees against x-degree 1 only.
        let rat = FieldMode::Rational;
        let weyl: AlgebraRef =
            std::sync::Arc::new(ModelClass::Weyl.params(rat, &rat.one()).unwrap());
        let base = NcPoly::gen_x(&weyl).add(&NcPoly::gen_y(&weyl)).unwrap();
        let workload = Workload::powers("cube", &weyl, base, 3);
        let run = run_bench(&workload, CacheStrategy::CacheOnly).unwrap();
        assert!(run.report.requests.iter().all(|r| r.n == 1));
        assert!(run.report.requests.iter().any(|r| r.m == 2));
    }
}
