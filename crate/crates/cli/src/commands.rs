use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use bperc_core::hierarchy::{find_pods, structure_checks, PodWitness, StructureReport};
use bperc_core::montecarlo::{
    estimate_event, estimate_filled_conditioned, estimate_pc, sample_config, validate_inequality, Estimate, Verdict,
};
use bperc_core::numerics::{
    beta, cor_key_bound, crossing_bounds, droplet_bound, g, g_prime, lambda, leaving_diagonal_check, long_thin_bound,
    pc_lower_bound, seeds_bound, two_big_bound, LAMBDA_EXACT,
};
use bperc_core::{
    build_hierarchy, check_good, check_satisfied, closure, crossed, double_gap, event_d1, event_d2,
    is_internally_filled, percolates, stats, weighted_count_bound, BoundReport, Config, Constants, Error, FrameSpec,
    GoodnessReport, Hierarchy, HierarchyStats, Rect, SatisfactionCertificate,
};

use crate::args::{
    BoundArgs, BoundKind, Command, EventArgs, EventKind, GTableArgs, HierBuildArgs, HierCheckArgs, HierCommand, PcArgs,
    SimArgs, Spacing, ValidateArgs,
};
use crate::config::{read, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{num, Output, Table, ESTIMATE_HEADER};

/// Whether a run found a validation failure (exit status 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

pub fn execute(cfg: &RunConfig) -> Result<(Output, Status)> {
    match &cfg.command {
        Command::Sim(a) => sim(a, cfg),
        Command::Pc(a) => pc(a, cfg),
        Command::EventProb(a) => event_prob(a, cfg),
        Command::Bound(a) => bound(a, cfg),
        Command::GTable(a) => g_table(a, cfg),
        Command::Hier(HierCommand::Build(a)) => hier_build(a, cfg),
        Command::Hier(HierCommand::Check(a)) => hier_check(a, cfg),
        Command::Validate(a) => validate(a, cfg),
        Command::Rerun(_) => Err(CliError::Usage("rerun cannot be nested".into())),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn elapsed_ms(cfg: &RunConfig, start: Instant) -> u128 {
    if cfg.timing {
        start.elapsed().as_millis()
    } else {
        0
    }
}

fn dims_label((w, h): (i64, i64)) -> String {
    format!("{w}x{h}")
}

fn estimate_row(e: &Estimate, n_or_dims: String, runtime_ms: u128) -> Vec<String> {
    vec![
        e.event.clone(),
        n_or_dims,
        num(e.p),
        e.trials.to_string(),
        num(e.p_hat),
        num(e.ci_lo),
        num(e.ci_hi),
        e.seed.to_string(),
        runtime_ms.to_string(),
    ]
}

fn read_config(path: &std::path::Path) -> Result<Config> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn sim(args: &SimArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let initial = match (&args.input, args.dims) {
        (Some(path), _) => read_config(path)?,
        (None, Some((w, h))) => {
            sample_config(cfg.constants.p, &Rect::with_dims(w, h)?, &bperc_core::TrialStream::new(cfg.seed), 0, 0)?
        }
        (None, None) => return Err(usage("sim needs --input or --dims")),
    };
    let fin = closure(&initial);
    let mut table = Table::new(&["x", "y", "initial"]);
    for (x, y) in fin.iter() {
        table.push(vec![x.to_string(), y.to_string(), (initial.contains((x, y)) as u8).to_string()]);
    }
    let out = Output::new(table)
        .with("percolates", &fin.is_full())?
        .with("initial_count", &initial.len())?
        .with("final_count", &fin.len())?
        .with("initial", &initial)?
        .with("final", &fin)?;
    Ok((out, Status::Ok))
}

#[derive(Serialize)]
struct PcRecord {
    #[serde(flatten)]
    estimate: bperc_core::montecarlo::PcEstimate,
    p_hat_log_n: f64,
    ci_hi_log_n: f64,
    below_lambda: bool,
    runtime_ms: u128,
}

fn pc(args: &PcArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let trials = cfg.trials_or(200);
    let mut table = Table::new(&ESTIMATE_HEADER);
    let mut records = Vec::new();
    for &n in &args.n {
        let start = Instant::now();
        let e = estimate_pc(n, trials, args.tol, cfg.seed)?;
        let ms = elapsed_ms(cfg, start);
        for probe in &e.probes {
            table.push(estimate_row(&probe.estimate, n.to_string(), 0));
        }
        table.push(estimate_row(&e.as_estimate(), n.to_string(), ms));
        let log_n = (n as f64).ln();
        records.push(PcRecord {
            p_hat_log_n: e.p_hat * log_n,
            ci_hi_log_n: e.ci_hi * log_n,
            below_lambda: e.ci_hi * log_n < LAMBDA_EXACT,
            runtime_ms: ms,
            estimate: e,
        });
    }
    let out = Output::new(table).with("lambda", &LAMBDA_EXACT)?.with("estimates", &records)?;
    Ok((out, Status::Ok))
}

fn event_prob(args: &EventArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let trials = cfg.trials_or(10_000);
    let r = Rect::with_dims(args.dims.0, args.dims.1)?;
    let p = cfg.constants.p;
    let spec = || -> Result<FrameSpec> {
        let s = args.s.ok_or_else(|| usage("events d1 and d2 need --s x0,x1,y0,y1"))?;
        Ok(FrameSpec::new(s, r, args.x)?)
    };
    let start = Instant::now();
    let e = match args.event {
        EventKind::Filled => estimate_event("filled", |a| is_internally_filled(a, &r), p, &r, trials, cfg.seed)?,
        EventKind::D1 => {
            let spec = spec()?;
            estimate_event("d1", |a| event_d1(a, &spec), p, &r, trials, cfg.seed)?
        }
        EventKind::D2 => {
            let spec = spec()?;
            estimate_event("d2", |a| event_d2(a, &spec), p, &r, trials, cfg.seed)?
        }
        EventKind::Crossing => estimate_event("crossing", |a| crossed(a, &r, args.from), p, &r, trials, cfg.seed)?,
        EventKind::DoubleGap => {
            estimate_event("double-gap", |a| double_gap(a, &r, args.axis).is_some(), p, &r, trials, cfg.seed)?
        }
        EventKind::Percolation => estimate_event("percolation", percolates, p, &r, trials, cfg.seed)?,
    };
    let ms = elapsed_ms(cfg, start);
    let mut table = Table::new(&ESTIMATE_HEADER);
    table.push(estimate_row(&e, dims_label(args.dims), ms));
    let out = Output::new(table).with("estimate", &e)?.with("runtime_ms", &ms)?;
    Ok((out, Status::Ok))
}

fn need_rect(args: &BoundArgs) -> Result<Rect> {
    let (w, h) = args.dims.ok_or_else(|| usage("this bound needs --dims WxH"))?;
    Ok(Rect::with_dims(w, h)?)
}

fn report_rows(table: &mut Table, rep: &BoundReport) {
    let mut row = |quantity: String, value: String| table.push(vec![rep.formula.clone(), quantity, value]);
    row("value".into(), num(rep.value));
    row("log_value".into(), num(rep.log_value));
    row("branch".into(), rep.branch.clone().unwrap_or_default());
    row("valid".into(), rep.valid.to_string());
    row("vacuous".into(), rep.vacuous.to_string());
    for (name, v) in &rep.inputs {
        row(format!("input:{name}"), num(*v));
    }
    for (name, held) in &rep.flags {
        row(format!("flag:{name}"), held.to_string());
    }
}

fn bound(args: &BoundArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let k = &cfg.constants;
    let mut table = Table::new(&["formula", "quantity", "value"]);
    let mut reports: Vec<Value> = Vec::new();
    let mut push = |table: &mut Table, rep: BoundReport| -> Result<()> {
        report_rows(table, &rep);
        reports.push(serde_json::to_value(&rep)?);
        Ok(())
    };
    match args.kind {
        BoundKind::Lambda => {
            let value = lambda();
            for (q, v) in [("value", value), ("exact", LAMBDA_EXACT), ("abs_error", (value - LAMBDA_EXACT).abs())] {
                table.push(vec!["lambda".into(), q.into(), num(v)]);
            }
            reports.push(json!({"formula": "lambda", "value": value, "exact": LAMBDA_EXACT}));
        }
        BoundKind::Droplet => push(&mut table, droplet_bound(&need_rect(args)?, k)?)?,
        BoundKind::Seeds => push(&mut table, seeds_bound(&need_rect(args)?, k))?,
        BoundKind::Crossing => {
            let (gap, cross) = crossing_bounds(&need_rect(args)?, k);
            push(&mut table, gap)?;
            push(&mut table, cross)?;
        }
        BoundKind::CorKey => {
            let r = need_rect(args)?;
            let s = args.s.ok_or_else(|| usage("cor-key needs --s x0,x1,y0,y1"))?;
            push(&mut table, cor_key_bound(&FrameSpec::new(s, r, args.x)?, args.j, k)?)?;
        }
        BoundKind::LeavingDiagonal => {
            let (a, b) = match (args.a, args.b) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(usage("leaving-diagonal needs --a and --b")),
            };
            push(&mut table, leaving_diagonal_check(a, b, k)?)?;
        }
        BoundKind::Pc => {
            let n = args.n.ok_or_else(|| usage("pc needs --n"))?;
            let rep = pc_lower_bound(n, k)?;
            let v = serde_json::to_value(&rep)?;
            for (name, field) in v.as_object().expect("struct") {
                let text = match field {
                    Value::Null => String::new(),
                    Value::Number(x) => num(x.as_f64().expect("finite")),
                    other => other.to_string(),
                };
                table.push(vec!["pc-lower-bound".into(), name.clone(), text]);
            }
            reports.push(v);
        }
        BoundKind::LongThin => push(&mut table, long_thin_bound(&need_rect(args)?, k))?,
        BoundKind::TwoBig => push(&mut table, two_big_bound(&need_rect(args)?, k))?,
        BoundKind::WeightedCount => {
            let r = need_rect(args)?;
            let (n, m) = match (args.n, args.m) {
                (Some(n), Some(m)) => (n, m),
                _ => return Err(usage("weighted-count needs --n and --m")),
            };
            let value = weighted_count_bound(n, m, &r)?;
            table.push(vec!["weighted-count".into(), "value".into(), num(value)]);
            reports.push(json!({"formula": "weighted-count", "value": value, "N": n, "M": m, "phi": r.phi()}));
        }
    }
    let out = Output::new(table).with("reports", &reports)?;
    Ok((out, Status::Ok))
}

fn g_table(args: &GTableArgs, _cfg: &RunConfig) -> Result<(Output, Status)> {
    if !(args.z_min > 0.0 && args.z_max > args.z_min && args.points >= 2) {
        return Err(usage("g-table needs 0 < z-min < z-max and at least 2 points"));
    }
    let mut table = Table::new(&["z", "beta", "g", "g_prime"]);
    let mut rows = Vec::new();
    for i in 0..args.points {
        let t = i as f64 / (args.points - 1) as f64;
        let z = match args.spacing {
            _ if i == 0 => args.z_min,
            _ if i + 1 == args.points => args.z_max,
            Spacing::Linear => args.z_min + t * (args.z_max - args.z_min),
            Spacing::Log => (args.z_min.ln() + t * (args.z_max.ln() - args.z_min.ln())).exp(),
        };
        let b = beta(-(-z).exp_m1())?;
        let (gz, gp) = (g(z), g_prime(z));
        table.push(vec![num(z), num(b), num(gz), num(gp)]);
        rows.push(json!({"z": z, "beta": b, "g": gz, "g_prime": gp}));
    }
    Ok((Output::new(table).with("rows", &rows)?, Status::Ok))
}

#[derive(Serialize)]
struct HierRecord {
    index: usize,
    hierarchy: Hierarchy,
    config: Option<Config>,
    stats: HierarchyStats,
    goodness: GoodnessReport,
    certificate: Option<SatisfactionCertificate>,
    structure: StructureReport,
    pods: Option<PodOutcome>,
}

#[derive(Serialize)]
struct PodOutcome {
    holds: Option<bool>,
    witness: Option<PodWitness>,
    note: Option<String>,
}

fn pod_outcome(h: &Hierarchy, q: f64) -> Result<PodOutcome> {
    match find_pods(h, q, None) {
        Ok(w) => Ok(PodOutcome { holds: Some(w.is_some()), witness: w, note: None }),
        Err(Error::SearchTooLarge(msg)) => Ok(PodOutcome { holds: None, witness: None, note: Some(msg) }),
        Err(e) => Err(e.into()),
    }
}

fn record(index: usize, h: Hierarchy, a: Option<Config>, k: &Constants, pods: bool) -> Result<HierRecord> {
    let certificate = a.as_ref().map(|a| check_satisfied(&h, a));
    Ok(HierRecord {
        index,
        stats: stats(&h, k),
        goodness: check_good(&h, k),
        structure: structure_checks(&h, k),
        pods: if pods { Some(pod_outcome(&h, k.q())?) } else { None },
        certificate,
        config: a,
        hierarchy: h,
    })
}

fn hier_table(records: &[HierRecord]) -> (Table, Status) {
    let mut table = Table::new(&[
        "index",
        "root",
        "vertices",
        "seeds",
        "height",
        "X",
        "large_seeds",
        "weight",
        "good",
        "satisfied",
        "structure",
        "pods",
    ]);
    let mut status = Status::Ok;
    for r in records {
        let satisfied = r.certificate.as_ref().map(|c| c.passed);
        if !r.goodness.is_good() || satisfied == Some(false) {
            status = Status::Failed;
        }
        let opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
        table.push(vec![
            r.index.to_string(),
            r.hierarchy.root_rect().to_string(),
            r.stats.v.to_string(),
            r.stats.s.to_string(),
            r.stats.h.to_string(),
            r.stats.x.to_string(),
            r.stats.m.to_string(),
            num(r.stats.weight),
            r.goodness.is_good().to_string(),
            opt(satisfied),
            r.structure.holds().to_string(),
            opt(r.pods.as_ref().and_then(|p| p.holds)),
        ]);
    }
    (table, status)
}

fn summary(records: &[HierRecord]) -> Value {
    json!({
        "count": records.len(),
        "good": records.iter().filter(|r| r.goodness.is_good()).count(),
        "satisfied": records.iter().filter(|r| r.certificate.as_ref().is_some_and(|c| c.passed)).count(),
    })
}

fn hier_build(args: &HierBuildArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let k = &cfg.constants;
    let mut acceptance = None;
    let configs: Vec<Config> = match (&args.input, args.dims) {
        (Some(path), _) => vec![read_config(path)?],
        (None, Some((w, h))) => {
            let r = Rect::with_dims(w, h)?;
            let p = args.sample_p.unwrap_or(k.p);
            let sample = estimate_filled_conditioned(&r, p, args.count, cfg.trials_or(10_000_000), cfg.seed)?;
            if sample.partial {
                eprintln!(
                    "warning: attempt budget exhausted after {} of {} droplets",
                    sample.configs.len(),
                    args.count
                );
            }
            acceptance = Some(sample.acceptance);
            sample.configs
        }
        (None, None) => return Err(usage("hier build needs --input or --dims")),
    };
    let mut records = Vec::new();
    for (i, a) in configs.into_iter().enumerate() {
        let h = build_hierarchy(&a, &a.domain(), k)?;
        records.push(record(i, h, Some(a), k, args.pods)?);
    }
    let (table, status) = hier_table(&records);
    let out = Output::new(table)
        .with("acceptance", &acceptance)?
        .with("summary", &summary(&records))?
        .with("hierarchies", &records)?;
    Ok((out, status))
}

fn hier_check(args: &HierCheckArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let k = &cfg.constants;
    let doc: Value = serde_json::from_str(&read(&args.input)?)?;
    let mut records = Vec::new();
    match doc.get("hierarchies").and_then(Value::as_array) {
        Some(items) => {
            for (i, item) in items.iter().enumerate() {
                let h: Hierarchy = serde_json::from_value(
                    item.get("hierarchy").cloned().ok_or_else(|| usage(format!("entry {i} has no hierarchy")))?,
                )?;
                let a: Option<Config> = match item.get("config") {
                    Some(Value::Null) | None => None,
                    Some(c) => Some(serde_json::from_value(c.clone())?),
                };
                records.push(record(i, h, a, k, args.pods)?);
            }
        }
        None => {
            let h: Hierarchy = serde_json::from_value(doc)?;
            let a = args.config.as_deref().map(read_config).transpose()?;
            records.push(record(0, h, a, k, args.pods)?);
        }
    }
    let (table, status) = hier_table(&records);
    let out = Output::new(table).with("summary", &summary(&records))?.with("hierarchies", &records)?;
    Ok((out, status))
}

fn validate(args: &ValidateArgs, cfg: &RunConfig) -> Result<(Output, Status)> {
    let trials = cfg.trials_or(100_000);
    let reports = validate_inequality(&args.suite, trials, cfg.seed)?;
    let mut table =
        Table::new(&["suite", "case", "trials", "p_hat", "ci_lo", "ci_hi", "bound", "slack", "verdict", "seed"]);
    let mut status = Status::Ok;
    for r in &reports {
        if r.verdict == Verdict::Fail {
            status = Status::Failed;
        }
        let verdict = serde_json::to_value(r.verdict)?;
        table.push(vec![
            r.suite.clone(),
            r.case.clone(),
            r.empirical.trials.to_string(),
            num(r.empirical.p_hat),
            num(r.empirical.ci_lo),
            num(r.empirical.ci_hi),
            num(r.bound),
            num(r.slack),
            verdict.as_str().expect("unit variant").to_string(),
            r.empirical.seed.to_string(),
        ]);
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    eprintln!(
        "validate: {} PASS, {} UNKNOWN, {} FAIL",
        count(Verdict::Pass),
        count(Verdict::Unknown),
        count(Verdict::Fail)
    );
    let out = Output::new(table).with("reports", &reports)?;
    Ok((out, status))
}
