//! Grid execution, aggregation and CSV output.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::dpc::{simulate_dpc_trial, DpcInstance};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::infotheory::{
    check_probability, gaussian_rate_region, wz_rate_region, GaussianWzParams, GroupAlphabet, SymbolDistribution, WzRateRegion,
};
use crate::rng::{derive_seed, SplitMix64};
use crate::trellis::{practical_wz_pipeline, wz_bound_distortion, wz_bound_rate, ConvCode};
use crate::wz::{simulate_wz_trial, DiscreteWz, GaussianWz, TrialRecord, WzInstance};

use super::oracle::exact_small_oracle;
use super::spec::{ExperimentSpec, GridPoint, Mode};

/// Tag separating codebook seeds from per-trial source streams.
const CODEBOOK_TAG: u64 = 0xC0DE_B00C;

/// Seed of trial `trial` at grid point `grid`.
pub fn trial_seed(master: u64, grid: usize, trial: u64) -> u64 {
    derive_seed(master, &[grid as u64, trial])
}

/// Seeds of `(C0, C1)` shared by every trial of a grid point.
pub fn grid_codebook_seeds(master: u64, grid: usize) -> (u64, u64) {
    (
        derive_seed(master, &[grid as u64, CODEBOOK_TAG, 0]),
        derive_seed(master, &[grid as u64, CODEBOOK_TAG, 1]),
    )
}

/// Seeds of `(C0, C1)` redrawn for one trial.
pub fn trial_codebook_seeds(trial_seed: u64) -> (u64, u64) {
    (
        derive_seed(trial_seed, &[CODEBOOK_TAG, 0]),
        derive_seed(trial_seed, &[CODEBOOK_TAG, 1]),
    )
}

/// 95% normal-approximation half-width of a binomial rate.
pub fn binomial_half_width(rate: f64, trials: u64) -> f64 {
    1.96 * (rate * (1.0 - rate) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Adds a wall-clock `duration_s` column (makes output non-reproducible).
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub params: Vec<(String, String)>,
    pub metrics: Vec<(&'static str, f64)>,
    /// `ok`, or `error: ...` when the grid point was aborted.
    pub status: String,
    pub duration: Option<f64>,
}

impl SummaryRow {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Counter {
    hits: u64,
    trials: u64,
}

impl Counter {
    fn push(&mut self, hit: bool) {
        self.hits += hit as u64;
        self.trials += 1;
    }

    fn extend(&self, prefix: &'static [&'static str; 3], out: &mut Vec<(&'static str, f64)>) {
        let rate = self.hits as f64 / self.trials as f64;
        out.push((prefix[0], self.hits as f64));
        out.push((prefix[1], rate));
        out.push((prefix[2], binomial_half_width(rate, self.trials)));
    }
}

#[derive(Debug, Clone, Copy)]
struct Stat {
    sum: f64,
    max: f64,
    count: u64,
}

impl Default for Stat {
    fn default() -> Self {
        Self {
            sum: 0.0,
            max: f64::NEG_INFINITY,
            count: 0,
        }
    }
}

impl Stat {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.max = self.max.max(v);
        self.count += 1;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }
}

const ENC: [&str; 3] = ["encoder_errors", "encoder_error_rate", "encoder_error_ci"];
const DEC: [&str; 3] = ["decoder_errors", "decoder_error_rate", "decoder_error_ci"];
const MSG: [&str; 3] = ["message_errors", "message_error_rate", "message_error_ci"];
const PAIR: [&str; 3] = ["pair_errors", "pair_error_rate", "pair_error_ci"];

/// Metric columns emitted by a mode, in order.
pub fn metric_columns(mode: Mode) -> Vec<&'static str> {
    let region = ["r0_min", "sum_min", "r0_max", "r1_corner", "nonempty"];
    let wz_stats = [
        "mean_distortion",
        "max_distortion",
        "mean_end_distortion",
        "max_end_distortion",
    ];
    let mut cols: Vec<&'static str> = Vec::new();
    match mode {
        Mode::Rates => cols.extend(region),
        Mode::Wz | Mode::WzGaussian => {
            cols.push("trials");
            cols.extend(ENC);
            cols.extend(DEC);
            cols.extend(wz_stats);
            cols.extend(region);
        }
        Mode::Oracle => {
            cols.extend([
                "exact_encoder_error",
                "exact_decoder_error",
                "exact_mean_distortion",
                "exact_mean_end_distortion",
                "trials",
            ]);
            cols.extend(ENC);
            cols.extend(DEC);
            cols.extend(wz_stats);
        }
        Mode::Dpc => {
            cols.push("trials");
            cols.extend(ENC);
            cols.extend(MSG);
            cols.extend(PAIR);
            cols.extend(["mean_cost", "max_cost", "q", "r0_bound", "r1_bound", "sum_bound"]);
        }
        Mode::Tcq => {
            cols.push("trials");
            cols.extend(ENC);
            cols.extend(DEC);
            cols.extend(wz_stats);
            cols.extend(["rate", "bound_distortion", "gap_bits", "gap_db"]);
        }
    }
    cols
}

fn region_metrics(r: &WzRateRegion, out: &mut Vec<(&'static str, f64)>) {
    out.extend([
        ("r0_min", r.r0_min),
        ("sum_min", r.sum_min),
        ("r0_max", r.r0_max),
        ("r1_corner", r.r1_corner),
        ("nonempty", r.nonempty as u8 as f64),
    ]);
}

fn wz_metrics(records: &[TrialRecord], out: &mut Vec<(&'static str, f64)>) {
    let (mut enc, mut dec) = (Counter::default(), Counter::default());
    let (mut dist, mut end) = (Stat::default(), Stat::default());
    for r in records {
        enc.push(r.encoder_error);
        dec.push(r.decoder_error);
        dist.push(r.distortion);
        end.push(r.end_distortion);
    }
    enc.extend(&ENC, out);
    dec.extend(&DEC, out);
    out.extend([
        ("mean_distortion", dist.mean()),
        ("max_distortion", dist.max),
        ("mean_end_distortion", end.mean()),
        ("max_end_distortion", end.max),
    ]);
}

/// `p` and `q` of discrete modes: Bernoulli for `l = 1`, otherwise the
/// symmetric law with total off-zero mass `t`. `q` defaults to uniform.
fn discrete_laws(point: &GridPoint) -> Result<(GroupAlphabet, SymbolDistribution, SymbolDistribution)> {
    let l = point.int("l")?;
    let g = GroupAlphabet::new(l as u32)?;
    let t = point.req("p")?;
    check_probability("p", t)?;
    let p = SymbolDistribution::symmetric(g, t)?;
    let q = match point.num("q") {
        Some(t) => {
            check_probability("q", t)?;
            SymbolDistribution::symmetric(g, t)?
        }
        None => SymbolDistribution::uniform(g),
    };
    Ok((g, p, q))
}

fn gaussian_params(point: &GridPoint) -> Result<GaussianWzParams> {
    GaussianWzParams::new(
        point.req("py")?,
        point.req("pz")?,
        point.req("d")?,
        point.req("q")?,
        point.num("p0"),
    )
}

/// Runs `f` for every trial in order and returns the records in trial order.
fn trials<T, F>(spec: &ExperimentSpec, grid: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..spec.trials)
        .into_par_iter()
        .map(|t| f(trial_seed(spec.seed, grid, t)))
        .collect()
}

fn run_point(spec: &ExperimentSpec, point: &GridPoint) -> Result<Vec<(&'static str, f64)>> {
    let g = point.index;
    let mut out = Vec::new();
    match spec.mode {
        Mode::Rates => {
            let (alphabet, p, q) = discrete_laws(point)?;
            region_metrics(&wz_rate_region(alphabet.bits(), &p, &q, point.req("d")?)?, &mut out);
        }
        Mode::Wz => {
            let (alphabet, p, q) = discrete_laws(point)?;
            let (n, d) = (point.int("n")?, point.req("d")?);
            let (r0, r1) = (point.req("r0")?, point.req("r1")?);
            let build = |(s0, s1): (u64, u64)| DiscreteWz::new(n, p.clone(), q.clone(), d, r0, r1, s0, s1);
            let records = if point.flag("redraw") {
                trials(spec, g, |seed| {
                    let inst = WzInstance::Discrete(build(trial_codebook_seeds(seed))?);
                    simulate_wz_trial(&inst, seed)
                })?
            } else {
                let inst = WzInstance::Discrete(build(grid_codebook_seeds(spec.seed, g))?);
                trials(spec, g, |seed| simulate_wz_trial(&inst, seed))?
            };
            out.push(("trials", spec.trials as f64));
            wz_metrics(&records, &mut out);
            region_metrics(&wz_rate_region(alphabet.bits(), &p, &q, d)?, &mut out);
        }
        Mode::Oracle => {
            let (_, p, q) = discrete_laws(point)?;
            let (s0, s1) = grid_codebook_seeds(spec.seed, g);
            let inst = DiscreteWz::new(
                point.int("n")?,
                p,
                q,
                point.req("d")?,
                point.req("r0")?,
                point.req("r1")?,
                s0,
                s1,
            )?;
            let exact = exact_small_oracle(&inst)?;
            let inst = WzInstance::Discrete(inst);
            let records = trials(spec, g, |seed| simulate_wz_trial(&inst, seed))?;
            out.extend([
                ("exact_encoder_error", exact.encoder_error),
                ("exact_decoder_error", exact.decoder_error),
                ("exact_mean_distortion", exact.mean_distortion),
                ("exact_mean_end_distortion", exact.mean_end_distortion),
                ("trials", spec.trials as f64),
            ]);
            wz_metrics(&records, &mut out);
        }
        Mode::WzGaussian => {
            let params = gaussian_params(point)?;
            let n = point.int("n")?;
            let (r0, r1) = (point.req("r0")?, point.req("r1")?);
            let slack = point.req("slack")?;
            let build = |(s0, s1): (u64, u64)| GaussianWz::new(params, n, r0, r1, s0, s1).map(|w| w.with_slack(slack));
            let records = if point.flag("redraw") {
                trials(spec, g, |seed| {
                    let inst = WzInstance::Gaussian(build(trial_codebook_seeds(seed))?);
                    simulate_wz_trial(&inst, seed)
                })?
            } else {
                let inst = WzInstance::Gaussian(build(grid_codebook_seeds(spec.seed, g))?);
                trials(spec, g, |seed| simulate_wz_trial(&inst, seed))?
            };
            out.push(("trials", spec.trials as f64));
            wz_metrics(&records, &mut out);
            region_metrics(&gaussian_rate_region(&params), &mut out);
        }
        Mode::Dpc => {
            let (n, p, w) = (point.int("n")?, point.req("p")?, point.req("w")?);
            let (r0, r1) = (point.req("r0")?, point.req("r1")?);
            let q = point.num("q");
            let build = |(s0, s1): (u64, u64)| DpcInstance::new(n, p, w, q, r0, r1, s0, s1);
            let first = build(grid_codebook_seeds(spec.seed, g))?;
            let records = if point.flag("redraw") {
                trials(spec, g, |seed| simulate_dpc_trial(&build(trial_codebook_seeds(seed))?, seed))?
            } else {
                trials(spec, g, |seed| simulate_dpc_trial(&first, seed))?
            };
            let (mut enc, mut msg, mut pair, mut cost) =
                (Counter::default(), Counter::default(), Counter::default(), Stat::default());
            for r in &records {
                enc.push(r.encoder_error);
                msg.push(r.message_error);
                pair.push(r.pair_error);
                cost.push(r.cost);
            }
            out.push(("trials", spec.trials as f64));
            enc.extend(&ENC, &mut out);
            msg.extend(&MSG, &mut out);
            pair.extend(&PAIR, &mut out);
            let h = crate::infotheory::binary_entropy;
            out.extend([
                ("mean_cost", cost.mean()),
                ("max_cost", cost.max),
                ("q", first.q),
                ("r0_bound", 1.0 - h(w)?),
                ("r1_bound", h(crate::infotheory::binary_conv(p, first.q))? - h(p)?),
                ("sum_bound", 1.0 - h(p)?),
            ]);
        }
        Mode::Tcq => {
            let (n, p, d) = (point.int("n")?, point.req("p")?, point.req("d")?);
            let c0 = ConvCode::from_octal(point.text("g0")?, point.int("k0")? as u32)?;
            let c1 = ConvCode::from_octal(point.text("g1")?, point.int("k1")? as u32)?;
            c0.info_len_for(n)?;
            c1.info_len_for(n)?;
            let results = trials(spec, g, |seed| {
                let (x, y) = draw_binary_pair(n, p, seed);
                practical_wz_pipeline(&x, &y, &c0, &c1, p, d)
            })?;
            let records: Vec<TrialRecord> = results.iter().map(|r| r.record).collect();
            out.push(("trials", spec.trials as f64));
            wz_metrics(&records, &mut out);
            let rate = results[0].rate;
            let mean_end = records.iter().map(|r| r.end_distortion).sum::<f64>() / records.len() as f64;
            let bound = wz_bound_distortion(p, rate)?;
            out.extend([
                ("rate", rate),
                ("bound_distortion", bound),
                ("gap_bits", rate - wz_bound_rate(p, mean_end)?),
                ("gap_db", 10.0 * (mean_end / bound).log10()),
            ]);
        }
    }
    Ok(out)
}

/// `y` uniform bits and `x = y + z` with `z ~ Bern(p)`.
pub fn draw_binary_pair(n: usize, p: f64, trial_seed: u64) -> (Vec<u8>, Vec<u8>) {
    let mut ry = SplitMix64::derived(trial_seed, &[1]);
    let mut rz = SplitMix64::derived(trial_seed, &[2]);
    let y: Vec<u8> = (0..n).map(|_| ry.next_bernoulli(0.5) as u8).collect();
    let x = y.iter().map(|&b| b ^ rz.next_bernoulli(p) as u8).collect();
    (x, y)
}

fn run_rows(spec: &ExperimentSpec, timing: bool) -> Result<Vec<SummaryRow>> {
    let columns = metric_columns(spec.mode);
    let mut rows = Vec::new();
    for point in spec.expand()? {
        let start = Instant::now();
        let (metrics, status) = match run_point(spec, &point) {
            Ok(m) => (m, "ok".to_string()),
            Err(e @ Error::CapExceeded { .. }) => (
                columns.iter().map(|&c| (c, f64::NAN)).collect(),
                format!("error: {e}"),
            ),
            Err(e) => {
                let at: Vec<String> = point.columns().iter().map(|(k, v)| format!("{k}={v}")).collect();
                return Err(Error::param(
                    format!("grid point {}", point.index),
                    format!("{e} [{}]", at.join(" ")),
                ));
            }
        };
        debug_assert_eq!(metrics.iter().map(|m| m.0).collect::<Vec<_>>(), columns);
        rows.push(SummaryRow {
            params: point.columns(),
            metrics,
            status,
            duration: timing.then(|| start.elapsed().as_secs_f64()),
        });
    }
    Ok(rows)
}

/// Runs every grid point of `spec`; rows are in grid order.
pub fn run_experiment(spec: &ExperimentSpec, options: &RunOptions) -> Result<Vec<SummaryRow>> {
    spec.validate()?;
    match options.threads {
        None => run_rows(spec, options.timing),
        Some(k) => {
            if k == 0 {
                return Err(Error::param("threads", "must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::param("threads", e.to_string()))?;
            pool.install(|| run_rows(spec, options.timing))
        }
    }
}

/// Writes rows as CSV with a header; floats use 17 significant digits.
pub fn write_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    if let Some(first) = rows.first() {
        let mut header: Vec<&str> = first.params.iter().map(|(k, _)| k.as_str()).collect();
        header.extend(first.metrics.iter().map(|(k, _)| *k));
        header.push("status");
        if first.duration.is_some() {
            header.push("duration_s");
        }
        w.write_record(&header).map_err(io)?;
    }
    for row in rows {
        let mut rec: Vec<String> = row.params.iter().map(|(_, v)| v.clone()).collect();
        rec.extend(row.metrics.iter().map(|&(_, v)| fmt_f64(v)));
        rec.push(row.status.clone());
        if let Some(d) = row.duration {
            rec.push(fmt_f64(d));
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[SummaryRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// One boundary point of the discrete rate region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub d: f64,
    pub region: WzRateRegion,
}

pub fn emit_region_csv(l: u32, p: &SymbolDistribution, q: &SymbolDistribution, ds: &[f64]) -> Result<Vec<RegionRow>> {
    if ds.is_empty() {
        return Err(Error::param("d", "empty grid"));
    }
    ds.iter()
        .map(|&d| Ok(RegionRow { d, region: wz_rate_region(l, p, q, d)? }))
        .collect()
}

pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["d", "r0_min", "sum_min", "r0_max", "r1_corner"]).map_err(io)?;
    for r in rows {
        let g = &r.region;
        w.write_record([r.d, g.r0_min, g.sum_min, g.r0_max, g.r1_corner].map(fmt_f64))
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
