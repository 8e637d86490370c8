//! Batch runs over generated instances, one CSV row per instance and
//! algorithm.

use std::io;
use std::time::Instant;

use mlst_core::netgen::{GenSpec, Tsm};
use mlst_core::oracle::exact_mlst_with_limit;
use mlst_core::{bottom_up, composite_full, guaranteed_composite, top_down, Instance, Run};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algo, ExperimentConfig};

pub const HEADER: &str = "model,n,ell,tsm,seed,rep,algo,mode,cost,opt_cost,ratio,stp_calls,runtime_ms,error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub model: String,
    pub n: usize,
    pub ell: usize,
    pub tsm: String,
    pub seed: u64,
    pub rep: usize,
    pub algo: String,
    pub mode: String,
    pub cost: Option<f64>,
    pub opt_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub stp_calls: Option<usize>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn absorb(h: u64, x: u64) -> u64 {
    splitmix(h ^ splitmix(x))
}

/// Seed of one instance, independent of batch order.
pub fn instance_seed(master: u64, model: &str, n: usize, ell: usize, tsm: Tsm, rep: usize) -> u64 {
    let mut h = splitmix(master);
    for b in model.bytes() {
        h = absorb(h, b as u64);
    }
    for x in [n as u64, ell as u64, tsm as u64, rep as u64] {
        h = absorb(h, x);
    }
    h
}

#[derive(Debug, Clone)]
struct Job {
    model: String,
    n: usize,
    ell: usize,
    tsm: Tsm,
    rep: usize,
    seed: u64,
}

fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for model in &cfg.models {
        for &n in &cfg.n {
            for &ell in &cfg.ell {
                for &tsm in &cfg.tsm {
                    for rep in 0..cfg.reps {
                        let seed = instance_seed(cfg.seed, model, n, ell, tsm, rep);
                        out.push(Job { model: model.clone(), n, ell, tsm, rep, seed });
                    }
                }
            }
        }
    }
    out
}

fn run_algo(instance: &Instance, algo: Algo, cfg: &ExperimentConfig) -> mlst_core::Result<Run> {
    match algo {
        Algo::Bu => bottom_up(instance, cfg.mode),
        Algo::Td => top_down(instance, cfg.mode),
        Algo::Cmp => composite_full(instance, cfg.mode),
        Algo::Cmps => guaranteed_composite(instance, cfg.mode),
    }
}

fn run_job(job: &Job, cfg: &ExperimentConfig) -> Vec<Record> {
    let base = Record {
        model: job.model.clone(),
        n: job.n,
        ell: job.ell,
        tsm: job.tsm.to_string(),
        seed: job.seed,
        rep: job.rep,
        algo: String::new(),
        mode: cfg.mode.to_string(),
        cost: None,
        opt_cost: None,
        ratio: None,
        stp_calls: None,
        runtime_ms: None,
        error: None,
    };
    let spec = GenSpec { model: cfg.model(&job.model), n: job.n, ell: job.ell, tsm: job.tsm, seed: job.seed };
    let instance: Instance = match spec.generate() {
        Ok(i) => i,
        Err(e) => {
            return cfg
                .algos
                .iter()
                .map(|a| Record { algo: a.name().into(), error: Some(format!("generate: {e}")), ..base.clone() })
                .collect();
        }
    };
    let (opt, oracle_error) = if cfg.oracle {
        match exact_mlst_with_limit(&instance, cfg.oracle_terminals) {
            Ok((c, _)) => (Some(c), None),
            Err(e) => (None, Some(format!("oracle: {e}"))),
        }
    } else {
        (None, None)
    };
    cfg.algos
        .iter()
        .map(|&algo| {
            let started = Instant::now();
            let result = run_algo(&instance, algo, cfg);
            let elapsed = started.elapsed().as_secs_f64() * 1e3;
            let mut rec = Record { algo: algo.name().into(), opt_cost: opt, error: oracle_error.clone(), ..base.clone() };
            match result {
                Ok(run) => {
                    rec.cost = Some(run.cost);
                    rec.stp_calls = Some(run.stp_calls);
                    rec.ratio = opt.filter(|o| *o > 0.0).map(|o| run.cost / o);
                    rec.runtime_ms = cfg.runtime.then_some(elapsed);
                }
                Err(e) => rec.error = Some(format!("{algo:?}: {e}").to_lowercase()),
            }
            rec
        })
        .collect()
}

/// Runs the whole batch on a bounded pool; rows come back in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<Record> {
    let jobs = jobs(cfg);
    let work = || jobs.par_iter().map(|j| run_job(j, cfg)).collect::<Vec<_>>();
    let nested = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    nested.into_iter().flatten().collect()
}

pub fn write_csv<W: io::Write>(records: &[Record], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Vec<Record>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
