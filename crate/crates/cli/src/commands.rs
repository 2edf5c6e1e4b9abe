use crate::args::*;
use crate::output::*;
use crate::CliError;
use bulsol_core::exact::{enumerate_partitions_capped, stationary, DEFAULT_ROW_BUDGET};
use bulsol_core::montecarlo::{make_schedule, run_chains, sample_state_counts, ChainConfig, RegimeRunConfig};
use bulsol_core::oracle::{
    check_domination, chernoff_table, decaying_chunk_starts, domination_grid, expected_decay, run_union,
    DominationReport,
};
use bulsol_core::shape::{deviation, rescaled_boundary, shape_eval};
use bulsol_core::{
    ord, regime_scan, stationary_shape_mass, total_variation, triangular_start, Configuration, LimitShape, RegimePoint,
    RngStream, Scaling, SolitaireParams, TransitionKernel, WeakComposition,
};
use std::path::Path;
use std::sync::Arc;

fn limit_shape(shape: ShapeArg) -> LimitShape {
    match shape {
        ShapeArg::Exp => LimitShape::Exponential,
        ShapeArg::Triangle => LimitShape::Triangle,
    }
}

fn scaling(arg: ScalingArg, params: &SolitaireParams) -> Result<Scaling, CliError> {
    Ok(match arg {
        ScalingArg::FirstPart => Scaling::ByFirstPart,
        ScalingArg::Theoretical => Scaling::theoretical(params.p, params.q.to_f64())?,
    })
}

fn start_state(spec: &str, n: u64) -> Result<WeakComposition, CliError> {
    let start: WeakComposition = match spec {
        "triangular" => triangular_start(n)?.into(),
        "single" => WeakComposition::new(vec![n]),
        parts => parts.parse()?,
    };
    if start.total() != n {
        return Err(CliError::usage(format!("start {spec:?} has {} cards, expected {n}", start.total())));
    }
    Ok(start)
}

fn positive_eps(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("eps must be positive, got {eps}")))
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let params = SolitaireParams::new(a.model.n, a.model.p, a.model.q)?;
    positive_eps(a.eps)?;
    if a.seeds == 0 {
        return Err(CliError::usage("need at least one seed"));
    }
    let start = start_state(&a.start, params.n)?;
    let schedule = make_schedule::<f64>(&params);
    let burn_in = match a.burn_in {
        BurnIn::Moves(m) => m,
        BurnIn::Schedule => schedule.burn_in,
    };
    let shape = limit_shape(a.shape);
    let scaling = scaling(a.scaling, &params)?;
    let grid = a.grid.points();
    let interval = (a.interval.0, a.interval.1);

    let mut cfg = ChainConfig::new(a.moves, shape.clone(), scaling);
    cfg.burn_in = Some(burn_in);
    cfg.stride = a.stride;
    cfg.grid = grid.clone();
    cfg.interval = interval;
    cfg.epsilon = a.eps;
    cfg.sorted = !a.unsorted;
    let chains = run_chains(&start, &params, &cfg, a.seed, a.seeds)?;

    let measured = |state: &WeakComposition| -> WeakComposition {
        if a.unsorted {
            state.clone()
        } else {
            ord(state).into()
        }
    };
    let mut summaries = Vec::with_capacity(chains.len());
    for c in &chains {
        let m = measured(&c.final_state);
        let factor = scaling.resolve(&m)?;
        let report = deviation(&m, &factor, &shape, &grid, interval, a.eps)?;
        summaries.push(ChainSummary {
            stream: c.stream,
            final_sup: report.sup_on_interval,
            mean_sup: c.mean_sup,
            max_sup: c.max_sup,
            max_new_pile_deviation: c.max_new_pile_deviation(),
            max_pile_ratio: c.max_pile_ratio(),
        });
    }

    let first = &chains[0];
    let m = measured(&first.final_state);
    let factor = scaling.resolve(&m)?;
    let report = deviation(&m, &factor, &shape, &grid, interval, a.eps)?;
    let rows = report
        .pointwise
        .iter()
        .map(|&(x, d)| {
            Ok(BoundaryRow {
                x,
                rescaled_y: rescaled_boundary(&m, &factor, x)?,
                shape_y: shape_eval(&shape, x),
                abs_dev: d,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_csv_to(a.csv.as_deref(), "boundary", &["x", "rescaled_y", "shape_y", "abs_dev"], &rows)?;

    if let Some(path) = &a.traces {
        let rows: Vec<TraceRow> = first
            .piles
            .iter()
            .zip(&first.new_pile)
            .enumerate()
            .map(|(t, (&piles, &new_pile))| TraceRow { move_index: burn_in + t as u64 + 1, piles, new_pile })
            .collect();
        write_csv_to(Some(path), "traces", &["move", "N", "new_pile"], &rows)?;
    }

    if let Some(path) = &a.json {
        let stats = SimulationStats {
            schema_version: SCHEMA_VERSION,
            params,
            schedule,
            burn_in,
            moves: a.moves,
            start: a.start.clone(),
            shape: shape.name().into(),
            scaling,
            sorted: !a.unsorted,
            seeds: vec![a.seed],
            chains: summaries.clone(),
            deviation: DeviationSummary {
                sup: report.sup_on_interval,
                fraction_within: report.fraction_within,
                epsilon: a.eps,
                interval,
            },
            final_state: first.final_state.to_string(),
            traces_path: a.traces.as_ref().map(|p| p.display().to_string()),
        };
        write_json(path, &stats)?;
    }

    if let Some(path) = &a.svg {
        write_boundary_svg(path, &m, &factor, &shape, (a.grid.start, a.grid.stop), &params, a.moves + burn_in)?;
    }

    eprintln!("final_state = {}", first.final_state);
    eprintln!("piles = {}", first.final_state.nonempty_piles());
    eprintln!("sup_deviation = {}", report.sup_on_interval);
    eprintln!("fraction_within = {}", report.fraction_within);
    if chains.len() > 1 {
        for s in &summaries {
            eprintln!("chain {}: sup_deviation = {}", s.stream, s.final_sup);
        }
    }
    Ok(())
}

fn write_boundary_svg(
    path: &Path,
    config: &WeakComposition,
    factor: &bulsol_core::ScalingFactor,
    shape: &LimitShape,
    (x0, x1): (f64, f64),
    params: &SolitaireParams,
    moves: u64,
) -> Result<(), CliError> {
    let mut steps = Vec::new();
    let mut j = factor.index_at(x0);
    let mut x = x0;
    loop {
        let y = factor.height(config.part(j));
        let next = factor.edge(j + 1).min(x1);
        steps.push((x, y));
        steps.push((next, y));
        if next >= x1 {
            break;
        }
        x = next;
        j += 1;
    }
    let curve: Vec<(f64, f64)> = (0..500)
        .map(|i| {
            let x = x0 + (x1 - x0) * i as f64 / 499.0;
            (x, shape_eval(shape, x))
        })
        .collect();
    let title = format!("n = {}, p = {}, q = {}, after {} moves", params.n, params.p, params.q, moves);
    let plot = Plot {
        title: &title,
        x_range: (x0, x1),
        steps: &steps,
        curve: &curve,
        step_label: "rescaled boundary",
        curve_label: shape.name(),
    };
    std::fs::write(path, plot.to_svg()).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn exact(a: &ExactArgs) -> Result<(), CliError> {
    let params = SolitaireParams::new(a.model.n, a.model.p, a.model.q)?;
    positive_eps(a.eps)?;
    let index = Arc::new(enumerate_partitions_capped(params.n, a.max_n)?);
    let kernel = TransitionKernel::build(index.clone(), params, DEFAULT_ROW_BUDGET)?;
    let dist = stationary(&kernel)?;
    let rows: Vec<StationaryRow> =
        dist.iter().map(|(s, probability)| StationaryRow { state: s.to_string(), probability }).collect();
    write_csv_to(a.csv.as_deref(), "stationary", &["state", "probability"], &rows)?;

    if let Some(path) = &a.mass_csv {
        let shape = limit_shape(a.shape);
        let scaling = scaling(a.scaling, &params)?;
        let rows = a
            .grid
            .points()
            .into_iter()
            .map(|x| Ok(MassRow { x, mass: stationary_shape_mass(&dist, &shape, scaling, a.eps, x)? }))
            .collect::<Result<Vec<_>, CliError>>()?;
        write_csv_to(Some(path), "shape-mass", &["x", "mass"], &rows)?;
    }

    eprintln!("states = {}", index.len());
    eprintln!("method = {:?}", dist.method);
    eprintln!("residual = {:e}", dist.residual);
    eprintln!("irreducible = {}", dist.irreducible);
    if a.compare_mc {
        let burn_in = make_schedule::<f64>(&params).burn_in;
        let start: WeakComposition = triangular_start(params.n)?.into();
        let mut rng = RngStream::new(a.seed, 0);
        let counts = sample_state_counts(&index, &start, &params, burn_in, a.mc_samples, &mut rng)?;
        eprintln!("mc_samples = {}", a.mc_samples);
        eprintln!("tv_distance = {}", total_variation(&dist, &counts)?);
    }
    Ok(())
}

pub fn oracle(cmd: &OracleCommand) -> Result<(), CliError> {
    match cmd {
        OracleCommand::Domination(a) => domination(a),
        OracleCommand::Chernoff(a) => chernoff(a),
        OracleCommand::Union(a) => union(a),
    }
}

const DOMINATION_HEADER: [&str; 13] = [
    "a1",
    "r",
    "q",
    "s",
    "cutoff",
    "runs",
    "overestimate_applies",
    "overestimate_violations",
    "underestimate_hypothesis",
    "underestimate_violations",
    "below_runs",
    "above_runs",
    "violations",
];

#[derive(serde::Serialize)]
struct DominationRow {
    a1: u64,
    r: u64,
    q: bulsol_core::Proportion,
    s: f64,
    cutoff: u64,
    runs: u64,
    overestimate_applies: bool,
    overestimate_violations: u64,
    underestimate_hypothesis: u64,
    underestimate_violations: u64,
    below_runs: u64,
    above_runs: u64,
    violations: u64,
}

impl From<&DominationReport> for DominationRow {
    fn from(r: &DominationReport) -> Self {
        DominationRow {
            a1: r.a1,
            r: r.r,
            q: r.q,
            s: r.s,
            cutoff: r.cutoff,
            runs: r.runs,
            overestimate_applies: r.overestimate_applies,
            overestimate_violations: r.overestimate_violations,
            underestimate_hypothesis: r.underestimate_hypothesis,
            underestimate_violations: r.underestimate_violations,
            below_runs: r.below_runs,
            above_runs: r.above_runs,
            violations: r.violations(),
        }
    }
}

fn domination(a: &DominationArgs) -> Result<(), CliError> {
    let reports = if a.exhaustive {
        if a.values.is_empty() {
            return Err(CliError::usage("need at least one value"));
        }
        domination_grid(a.max_a1, a.max_r, &a.values)?
    } else {
        let seeds: Vec<u64> = (0..a.runs).map(|i| a.seed.wrapping_add(i)).collect();
        vec![check_domination(a.a1, a.q, a.s, a.p, a.r, &seeds)?]
    };
    let rows: Vec<DominationRow> = reports.iter().map(DominationRow::from).collect();
    write_csv_to(a.csv.as_deref(), "domination", &DOMINATION_HEADER, &rows)?;
    let matrices: u128 = reports.iter().map(|r| r.runs as u128).sum();
    let violations: u64 = reports.iter().map(|r| r.violations()).sum();
    eprintln!("points = {}", reports.len());
    eprintln!("matrices = {matrices}");
    eprintln!("violations = {violations}");
    if violations > 0 {
        return Err(CliError::violation(format!("{violations} domination violations")));
    }
    Ok(())
}

fn chernoff(a: &ChernoffArgs) -> Result<(), CliError> {
    if !(a.p > 0.0 && a.p <= 1.0) || a.m == 0 {
        return Err(CliError::usage("need m >= 1 and p in (0,1]"));
    }
    let rows = chernoff_table::<f64>(a.m, a.p, a.steps)?;
    write_csv_to(a.csv.as_deref(), "chernoff", &["m", "p", "gamma", "mu", "bound", "exact_tail"], &rows)?;
    let bad = rows.iter().filter(|r| r.exact_tail > r.bound).count();
    eprintln!("rows = {}", rows.len());
    eprintln!("bound_violations = {bad}");
    if bad > 0 {
        return Err(CliError::violation(format!("exact tail exceeds the bound in {bad} rows")));
    }
    Ok(())
}

fn union(a: &UnionArgs) -> Result<(), CliError> {
    let params = SolitaireParams::new(a.n.unwrap_or(a.a1), a.p, a.q)?;
    if a.a1 == 0 || a.chunks == 0 {
        return Err(CliError::usage("need a1 >= 1 and at least one chunk"));
    }
    let schedule = make_schedule::<f64>(&params);
    let r = a.r.unwrap_or(schedule.chunk_length);
    let s = a.s.unwrap_or(schedule.s);
    let gammas = decaying_chunk_starts(a.a1, &params, r, a.chunks);
    let u = run_union(&gammas, r, s, a.p, a.seed)?;
    let q = params.q.to_f64();
    let rows: Vec<UnionRow> = u
        .sizes
        .chunks(r as usize + 1)
        .enumerate()
        .flat_map(|(j, sizes)| {
            sizes.iter().enumerate().map(move |(k, &size)| {
                let move_index = j as u64 * r + k as u64;
                UnionRow { move_index, chunk: j, size, expected: expected_decay(a.a1 as f64, a.p, q, move_index) }
            })
        })
        .collect();
    write_csv_to(a.csv.as_deref(), "union", &["move", "chunk", "size", "expected"], &rows)?;
    eprintln!("r = {r}");
    eprintln!("s_requested = {}", u.s_requested);
    eprintln!("s_used = {}", u.s_used);
    Ok(())
}

pub fn regimes(a: &RegimesArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.points)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.points.display())))?;
    let points: Vec<RegimePoint> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad regime points: {e}")))?;
    for pt in &points {
        SolitaireParams::new(pt.n, pt.p, pt.q)?;
    }
    let cfg =
        RegimeRunConfig { seeds: a.seeds.max(1), master_seed: a.seed, max_moves: a.max_moves, ..Default::default() };
    let rows = regime_scan(&points, &cfg)?;
    write_csv_to(
        a.csv.as_deref(),
        "regimes",
        &["n", "p", "q", "pq2n", "pq2n_over_ln_n", "moves", "label", "sup_exponential", "sup_triangle"],
        &rows,
    )?;
    eprintln!("points = {}", rows.len());
    Ok(())
}
