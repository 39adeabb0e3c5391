use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use qmix_core::classical::classical_mixing_trace;
use qmix_core::generators::random_reversible;
use qmix_core::hamiltonian::build_full_with_limit;
use qmix_core::io::{num, read_chain, CsvTable};
use qmix_core::markov::{discriminant_of, s_star};
use qmix_core::pointer::ModeBasis;
use qmix_core::qlsamp::{geometric_grid, GapStatistics};
use qmix_core::random_graphs::{
    cell_seed, parse_sizes, pass_rates, MixingExperiment,
};
use qmix_core::rng::derive_seed;
use qmix_core::*;

use crate::output::RunDir;
use crate::params::Params;

/// Failed scientific assertions; empty means success.
pub type Assertions = Vec<String>;

#[derive(Serialize)]
struct ResultRecord {
    chain_id: String,
    n: usize,
    s_star: f64,
    success_prob: Option<f64>,
    fidelity: Option<f64>,
    total_time: f64,
    seed: u64,
}

struct Chain {
    id: String,
    p: StochasticMatrix,
}

fn load_chain(params: &Params) -> Result<Chain> {
    let path: PathBuf = params.require("chain")?;
    let p = read_chain(&path).with_context(|| format!("reading chain {}", path.display()))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chain".into());
    Ok(Chain { id, p })
}

fn stationary(p: &StochasticMatrix) -> Result<StationaryDistribution> {
    Ok(check_ergodic_reversible(p).require_reversible()?)
}

fn marked(params: &Params, n: usize) -> Result<MarkedSet> {
    let spec: String = params.require("marked")?;
    Ok(MarkedSet::parse(&spec, n)?)
}

fn master_seed(params: &Params) -> Result<u64> {
    params.get_or("master_seed", 0u64)
}

fn sizes(params: &Params, default: &str) -> Result<Vec<usize>> {
    let spec: String = params.get_or("sizes", default.to_string())?;
    Ok(parse_sizes(&spec)?)
}

fn node_table(probs: impl IntoIterator<Item = f64>) -> CsvTable {
    let mut t = CsvTable::new(&["node", "prob"]);
    for (i, p) in probs.into_iter().enumerate() {
        t.push(vec![i.to_string(), num(p)]);
    }
    t
}

fn trace_table(times: &[f64], distances: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "D_P"]);
    for (time, d) in times.iter().zip(distances) {
        t.push(vec![num(*time), num(*d)]);
    }
    t
}

fn opt_num(x: Option<f64>) -> String {
    num(x.unwrap_or(f64::NAN))
}

pub fn chain_info(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let chain = load_chain(params)?;
    let p = &chain.p;
    let n = p.n();
    let report = check_ergodic_reversible(p);
    out.line(format!("chain {} with n = {n}", chain.id));
    out.line(format!(
        "ergodic {} (irreducible {}, aperiodic {}), reversible {} (detailed-balance residual {:e})",
        report.ergodic, report.irreducible, report.aperiodic, report.reversible,
        report.detailed_balance_residual
    ));
    let mut info = json!({
        "chain_id": chain.id,
        "n": n,
        "ergodic": report.ergodic,
        "irreducible": report.irreducible,
        "aperiodic": report.aperiodic,
        "reversible": report.reversible,
        "detailed_balance_residual": report.detailed_balance_residual,
    });
    if let Some(pi) = &report.pi {
        out.csv("pi.csv", &CsvTable::indexed(pi.pi.iter().copied()))?;
    }
    if report.ergodic && report.reversible {
        let pi = report.pi.clone().expect("ergodic chains carry pi");
        let d = discriminant_of(p, 0.0);
        out.csv("spectrum.csv", &CsvTable::indexed(d.spectrum.values.iter().copied()))?;
        out.line(format!("spectral gap {:.6e}, pi_min {:.6e}", d.gap(), pi.min()));
        info["spectral_gap"] = json!(d.gap());
        if let Some(spec) = params.raw("marked") {
            let m = MarkedSet::parse(spec, n)?;
            let p_m = pi.p_m(&m);
            info["p_M"] = json!(p_m);
            out.line(format!("marked {m}: p_M = {p_m:.6e}"));
            let s = match params.get::<f64>("s")? {
                Some(s) => s,
                None => s_star(p_m).context("no --s given and s* is undefined")?,
            };
            let pi_s = stationary_of_interpolated(&pi, &m, s)?;
            out.csv("pi_s.csv", &CsvTable::indexed(pi_s.pi.iter().copied()))?;
            let ds = discriminant(&interpolate(p, &m, s)?)?;
            out.csv("spectrum_s.csv", &CsvTable::indexed(ds.spectrum.values.iter().copied()))?;
            out.line(format!("s = {s:.6}: gap {:.6e}", ds.gap()));
            info["s"] = json!(s);
            info["gap_s"] = json!(ds.gap());
        }
    }
    out.json("chain.json", &info)?;
    Ok(Vec::new())
}

pub fn hitting(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let chain = load_chain(params)?;
    let p = &chain.p;
    let pi = stationary(p)?;
    let m = marked(params, p.n())?;
    let grid: Vec<f64> = (0..20).map(|k| k as f64 * 0.05).collect();
    let ext = extended_hitting_time(p, &pi, &m, &grid)?;
    let mut table = CsvTable::new(&["s", "HT_s", "HT_plus_estimate"]);
    for pt in &ext.per_s {
        table.push(vec![num(pt.s), num(pt.ht_s), num(pt.ht_plus_estimate)]);
    }
    out.csv("hitting.csv", &table)?;
    let spectral = hitting_time_spectral(p, &pi, &m)?;
    out.line(format!("HT (spectral) = {:.10e}", spectral.ht));
    out.line(format!(
        "HT+ = {:.10e}, invariance residual {:.2e}",
        ext.ht_plus, ext.invariance_residual
    ));
    let trials: u64 = params.get_or("trials", 100_000)?;
    let seed = master_seed(params)?;
    let mc = if trials > 0 {
        out.seed(seed);
        let mc = hitting_time_montecarlo(p, &m, trials, seed)?;
        out.line(format!("HT (Monte Carlo, {trials} trials) = {:.6e} +- {:.2e}", mc.ht, mc.stderr));
        Some(mc)
    } else {
        None
    };

    let eps = params.epsilon(0.25)?;
    let mix = classical_mixing_time(p, &pi, eps)?;
    out.line(format!(
        "classical mixing time at eps {eps}: {} steps (bound {:.3e})",
        mix.t_mix_empirical, mix.t_mix_bound
    ));
    let horizon = (2 * mix.t_mix_empirical).max(10);
    let step = horizon.div_ceil(2000).max(1);
    let times: Vec<u64> = (0..=horizon).step_by(step as usize).collect();
    let mut trace = CsvTable::new(&["t", "tv_distance"]);
    for (t, d) in classical_mixing_trace(p, &pi, &times) {
        trace.push(vec![t.to_string(), num(d)]);
    }
    out.csv("mixing.csv", &trace)?;
    out.json(
        "hitting.json",
        &json!({
            "chain_id": chain.id,
            "spectral": spectral,
            "monte_carlo": mc,
            "extended": ext,
            "mixing": mix,
        }),
    )?;
    Ok(Vec::new())
}

pub fn search(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let chain = load_chain(params)?;
    let p = &chain.p;
    let pi = stationary(p)?;
    let m = marked(params, p.n())?;
    let eps = params.epsilon(0.1)?;
    if eps >= 0.25 {
        bail!("--epsilon must be below 1/4 for search");
    }
    let seed = master_seed(params)?;
    out.seed(seed);
    let res = spatial_search(p, &pi, &m, eps, seed)?;
    out.csv("nodes.csv", &node_table(res.node_probs.iter().copied()))?;
    out.json(
        "result.json",
        &ResultRecord {
            chain_id: chain.id.clone(),
            n: p.n(),
            s_star: res.s_star,
            success_prob: Some(res.success_prob),
            fidelity: None,
            total_time: res.total_time,
            seed,
        },
    )?;
    out.json("search.json", &res)?;
    out.line(format!("search on {} (n = {}), marked {m}, eps {eps}", chain.id, p.n()));
    out.line(format!(
        "s* = {:.6}, success probability {:.6}, post-selection {:.6}, |alpha|^2 {:.6}",
        res.s_star, res.success_prob, res.post_prob, res.alpha_sq
    ));
    out.line(format!(
        "pointer l = {}, blocks = {}, total time {:.4e}; sampled node {:?} (marked {})",
        res.l, res.blocks, res.total_time, res.sampled_node, res.is_marked
    ));
    let mut failed = Vec::new();
    if res.success_prob < 0.25 - eps {
        failed.push(format!(
            "success probability {:.6} below 1/4 - eps = {:.6}",
            res.success_prob,
            0.25 - eps
        ));
    }
    Ok(failed)
}

pub fn qssamp(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let chain = load_chain(params)?;
    let p = &chain.p;
    let j: usize = params.get_or("j", 0)?;
    let eps = params.epsilon(0.01)?;
    let res = qssamp_prepare(p, None, j, eps)?;
    let seed = master_seed(params)?;
    out.csv("state.csv", &node_table(res.state.iter().map(|z| z.norm_sqr())))?;
    out.json(
        "result.json",
        &ResultRecord {
            chain_id: chain.id.clone(),
            n: p.n(),
            s_star: res.s_star,
            success_prob: Some(res.stage_probs.0 * res.stage_probs.1),
            fidelity: Some(res.fidelity_to_pi),
            total_time: res.total_time,
            seed,
        },
    )?;
    out.json(
        "stages.json",
        &json!({
            "stages": res.stages,
            "distance": res.distance,
            "tv_to_pi": res.tv_to_pi,
        }),
    )?;
    out.line(format!("stationary-state preparation on {} (n = {}) from node {j}, eps {eps}", chain.id, p.n()));
    out.line(format!(
        "fidelity {:.10}, distance {:.3e}, TV to pi {:.3e}",
        res.fidelity_to_pi, res.distance, res.tv_to_pi
    ));
    out.line(format!(
        "stage post-selection probabilities {:.6}, {:.6}; total time {:.4e}",
        res.stage_probs.0, res.stage_probs.1, res.total_time
    ));
    let mut failed = Vec::new();
    if res.distance > 4.0 * eps {
        failed.push(format!("distance {:.3e} above 4 eps = {:.3e}", res.distance, 4.0 * eps));
    }
    Ok(failed)
}

fn qlsamp_outputs(
    out: &mut RunDir,
    modes: &ModeBasis,
    psi: &DVector<Complex64>,
    outcomes: &[usize],
    eps: f64,
    t_max: f64,
) -> Result<()> {
    let limit = limiting_distribution(modes, psi, Some(outcomes), None)?;
    out.csv("limit.csv", &node_table(limit.probs.iter().copied()))?;
    let avg = time_averaged_distribution(modes, psi, t_max, Some(outcomes))?;
    out.csv("averaged.csv", &node_table(avg.probs.iter().copied()))?;
    let points = ((t_max / 0.1).log10() * 20.0).ceil() as usize + 1;
    let grid = geometric_grid(0.1, t_max, points);
    let trace = mixing_trace(modes, psi, eps, &grid, Some(outcomes))?;
    out.csv("trace.csv", &trace_table(&trace.times, &trace.distances))?;
    let bound = mixing_time_bound(modes, psi, eps)?;
    let uniform = 1.0 / outcomes.len() as f64;
    let dev = limit.probs.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    out.line(format!(
        "limit mass {:.6} over {} outcomes, max |P(inf) - uniform| {dev:.4e}, simple spectrum {}",
        limit.probs.iter().sum::<f64>(),
        outcomes.len(),
        limit.is_simple()
    ));
    out.line(format!(
        "t_mix (grid, eps {eps}) = {}, bound {bound:.4e}",
        trace.t_mix.map_or("none".into(), |t| format!("{t:.4e}"))
    ));
    out.json(
        "qlsamp.json",
        &json!({
            "t_mix": trace.t_mix,
            "bound": bound,
            "epsilon": eps,
            "t_max": t_max,
            "max_deviation_from_uniform": dev,
            "degeneracy_groups": limit.groups.len(),
        }),
    )?;
    Ok(())
}

pub fn qlsamp(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let eps = params.epsilon(0.1)?;
    let t_max: f64 = params.get_or("t_max", 1e4)?;
    if !(t_max > 0.1) {
        bail!("--t-max must exceed 0.1");
    }
    let j: usize = params.get_or("j", 0)?;
    if params.raw("chain").is_some() {
        let chain = load_chain(params)?;
        let p = &chain.p;
        stationary(p)?;
        let n = p.n();
        if j >= n {
            bail!("--j {j} out of range for n = {n}");
        }
        let s: f64 = params.get_or("s", 0.0)?;
        let d = discriminant_of(p, s);
        let h = build_effective(&d)?;
        let mut start = DVector::zeros(n);
        start[j] = Complex64::new(1.0, 0.0);
        let psi = h.isometry.embed(&start);
        let outcomes: Vec<usize> = (0..n).map(|x| x * n).collect();
        out.line(format!("edge walk on {} (n = {n}) at s = {s}, start |{j},0>", chain.id));
        qlsamp_outputs(out, &h.modes(), &psi, &outcomes, eps, t_max)?;
    } else {
        let n: usize = params.require("n")?;
        let p: f64 = params.get_or("p", 0.5)?;
        if j >= n {
            bail!("--j {j} out of range for n = {n}");
        }
        let seed = cell_seed(master_seed(params)?, n, 0);
        out.seed(seed);
        let g = sample_gnp(n, p, seed)?;
        let mut psi = DVector::zeros(n);
        psi[j] = Complex64::new(1.0, 0.0);
        let outcomes: Vec<usize> = (0..n).collect();
        out.line(format!(
            "walk on G({n}, {p}) seed {seed} ({} edges, connected {}), start node {j}",
            g.edges,
            g.connected()
        ));
        qlsamp_outputs(out, &ModeBasis::from(&g.spectrum), &psi, &outcomes, eps, t_max)?;
    }
    Ok(Vec::new())
}

pub fn gnp_spectrum(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let n: usize = params.require("n")?;
    let p: f64 = params.get_or("p", 0.5)?;
    let seed = cell_seed(master_seed(params)?, n, 0);
    out.seed(seed);
    let g = sample_gnp(n, p, seed)?;
    let model = classical_locations(n, p)?;
    let mut table = CsvTable::new(&["i", "lambda", "gamma"]);
    for (i, &l) in g.spectrum.values.iter().enumerate() {
        let gamma = model.locations.get(i).copied().unwrap_or(f64::NAN);
        table.push(vec![i.to_string(), num(l), num(gamma)]);
    }
    out.csv("spectrum.csv", &table)?;
    let report = rmt_report(&g, &model, 0.01)?;
    out.line(format!("G({n}, {p}) seed {seed}: {} edges, connected {}", g.edges, report.connected));
    out.line(format!(
        "lambda_top {:.6}, lambda_2 {:.6}, semicircle radius {:.6}",
        report.lambda_top, report.lambda_second, model.radius_norm
    ));
    out.line(format!(
        "KS {:.4e}, rigidity violations {} of {} (max ratio {:.3}; {} after removing the 1/n shift), deloc max {:.4}",
        report.ks, report.rigidity_violations, n - 1, report.rigidity_max_ratio, report.rigidity_violations_centered, report.deloc_max
    ));
    out.line(format!(
        "Delta_min {:.4e}, Sigma_1 {:.4e}, Sigma {:.4e}, simple {}",
        report.delta_min, report.sigma1, report.sigma, report.simple_spectrum
    ));
    out.json("rmt.json", &report)?;
    Ok(Vec::new())
}

pub fn gnp_mixing(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let cfg = MixingExperiment {
        sizes: sizes(params, "10:100:10")?,
        p: params.get_or("p", 0.5)?,
        epsilon: params.epsilon(0.1)?,
        seeds_per_size: params.get_or("seeds", 3)?,
        t_max: params.get_or("t_max", 1e7)?,
        master_seed: master_seed(params)?,
        points_per_decade: 40,
    };
    if cfg.seeds_per_size == 0 {
        bail!("--seeds must be positive");
    }
    let res = mixing_exponent_experiment(&cfg)?;
    let mut table = CsvTable::new(&["n", "seed", "t_mix", "sigma", "sigma1", "delta_min", "deloc_max"]);
    for c in &res.cells {
        out.seed(c.seed);
        table.push(vec![
            c.n.to_string(),
            c.seed_index.to_string(),
            opt_num(c.t_mix),
            num(c.sigma),
            num(c.sigma1),
            num(c.delta_min),
            num(c.deloc_max),
        ]);
    }
    out.csv("table.csv", &table)?;
    let mut medians = CsvTable::new(&["n", "median_t_mix"]);
    for (n, t) in &res.per_size_median {
        medians.push(vec![n.to_string(), num(*t)]);
    }
    out.csv("medians.csv", &medians)?;
    let grid = cfg.grid();
    for c in &res.cells {
        let g = sample_gnp(c.n, cfg.p, c.seed)?;
        let mut psi = DVector::zeros(c.n);
        psi[0] = Complex64::new(1.0, 0.0);
        let trace = mixing_trace(&ModeBasis::from(&g.spectrum), &psi, cfg.epsilon, &grid, None)?;
        out.csv(
            &format!("traces/n{}_seed{}.csv", c.n, c.seed_index),
            &trace_table(&trace.times, &trace.distances),
        )?;
    }
    out.json(
        "fit.json",
        &json!({
            "exponent_c": res.exponent_c,
            "intercept": res.intercept,
            "fit_residual": res.fit_residual,
            "excluded": res.excluded,
            "per_size_median": res.per_size_median,
        }),
    )?;
    out.line(format!(
        "sizes {:?}, p {}, eps {}, {} seeds per size, t_max {:e}",
        cfg.sizes, cfg.p, cfg.epsilon, cfg.seeds_per_size, cfg.t_max
    ));
    out.line(format!(
        "t_mix ~ n^c with c = {:.4} (intercept {:.4}, rms residual {:.4}); {} cells without a crossing",
        res.exponent_c, res.intercept, res.fit_residual, res.excluded
    ));
    Ok(Vec::new())
}

pub fn sigma_scaling(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let sizes = sizes(params, "50,100,200")?;
    let p: f64 = params.get_or("p", 0.5)?;
    let seeds: usize = params.get_or("seeds", 20)?;
    let master = master_seed(params)?;
    let rows = sigma_scaling_experiment(&sizes, p, seeds, master)?;
    let mut table = CsvTable::new(&[
        "n", "seed", "sigma1", "sigma", "delta_min", "deloc_max", "simple", "sigma1_ok", "sigma_ok",
        "delta_ok", "deloc_ok", "avg_gap_ok",
    ]);
    for r in &rows {
        out.seed(r.seed);
        table.push(vec![
            r.n.to_string(),
            r.seed_index.to_string(),
            num(r.sigma1),
            num(r.sigma),
            num(r.delta_min),
            num(r.deloc_max),
            r.simple_spectrum.to_string(),
            r.sigma1_ok.to_string(),
            r.sigma_ok.to_string(),
            r.delta_ok.to_string(),
            r.deloc_ok.to_string(),
            r.avg_gap_ok.to_string(),
        ]);
    }
    out.csv("rows.csv", &table)?;
    let checks: [(&str, fn(&SigmaRow) -> bool); 6] = [
        ("simple", |r| r.simple_spectrum),
        ("sigma1", |r| r.sigma1_ok),
        ("sigma", |r| r.sigma_ok),
        ("delta_min", |r| r.delta_ok),
        ("deloc", |r| r.deloc_ok),
        ("avg_gap", |r| r.avg_gap_ok),
    ];
    let mut rates = CsvTable::new(&["n", "check", "rate"]);
    for (name, check) in checks {
        let per = pass_rates(&rows, check);
        out.line(format!(
            "{name:>9}: {}",
            per.iter()
                .map(|(n, r)| format!("n={n} {:.0}%", 100.0 * r))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        for (n, r) in per {
            rates.push(vec![n.to_string(), name.to_string(), num(r)]);
        }
    }
    out.csv("pass_rates.csv", &rates)?;
    Ok(Vec::new())
}

/// `|gamma| < 1/2` for every nonzero energy at or above the gap.
fn verify_lemma1(out: &mut RunDir) -> Result<Assertions> {
    let mut worst = 0.0_f64;
    let mut table = CsvTable::new(&["gap", "E", "abs_gamma"]);
    for gi in 0..10 {
        let gap = 10f64.powf(-3.0 + 3.0 * gi as f64 / 9.0);
        let cfg = PointerConfig::for_gap(gap, 0.1)?;
        for k in 0..100 {
            let mag = gap + (1.0 - gap) * k as f64 / 99.0;
            let e = if k % 2 == 0 { mag } else { -mag };
            let g = pointer_zero_amplitude(e, cfg.tau, cfg.l).norm();
            worst = worst.max(g);
            table.push(vec![num(gap), num(e), num(g)]);
        }
    }
    out.csv("lemma1.csv", &table)?;
    out.line(format!("lemma1: max |gamma| over 1000 grid points = {worst:.6}"));
    Ok(if worst < 0.5 {
        Vec::new()
    } else {
        vec![format!("pointer amplitude {worst} reaches 1/2")]
    })
}

/// Effective energies against the dense edge-space Hamiltonian.
fn verify_spectral(out: &mut RunDir, master: u64) -> Result<Assertions> {
    let mut worst = 0.0_f64;
    let mut failed = Vec::new();
    for id in 0..10u64 {
        let n = 3 + (id as usize % 4);
        let p = random_reversible(n, derive_seed(master, &[id]), true);
        let h = build_effective(&discriminant_of(&p, 0.0))?;
        let mut eff: Vec<f64> = h.energies().into_iter().filter(|e| e.abs() > 1e-9).collect();
        let full = build_full_with_limit(&p, 6)?.spectrum();
        let mut dense: Vec<f64> = full.values.iter().copied().filter(|e| e.abs() > 1e-9).collect();
        let zeros = n * n - dense.len();
        eff.sort_by(f64::total_cmp);
        dense.sort_by(f64::total_cmp);
        if eff.len() != dense.len() || zeros != (n - 1) * (n - 1) + 1 {
            failed.push(format!("chain {id}: spectrum sizes differ"));
            continue;
        }
        for (a, b) in eff.iter().zip(&dense) {
            worst = worst.max((a - b).abs());
        }
    }
    out.line(format!("spectral: max |E_eff - E_dense| = {worst:.3e}"));
    if worst > 1e-10 {
        failed.push(format!("effective energies deviate by {worst:e}"));
    }
    Ok(failed)
}

fn verify_gapmap(out: &mut RunDir, master: u64) -> Result<Assertions> {
    let mut failed = Vec::new();
    let mut sandwich_ok = 0;
    for id in 0..10u64 {
        let n = 3 + id as usize;
        let p = random_reversible(n, derive_seed(master, &[100 + id]), true);
        let d = discriminant_of(&p, 0.0);
        let map = edge_walk_gap_map(&d)?;
        if !(map.lower_holds && map.upper_holds) {
            failed.push(format!("chain {id}: gap-map bounds violated"));
        }
        let stats: GapStatistics = gap_statistics(d.spectrum.values.as_slice(), 1e-12)?;
        if stats.sandwich_holds() {
            sandwich_ok += 1;
        } else {
            failed.push(format!("chain {id}: gap-sum sandwich violated"));
        }
    }
    out.line(format!("gapmap: {} violations, sandwich held on {sandwich_ok}/10", failed.len()));
    Ok(failed)
}

pub fn verify(params: &Params, out: &mut RunDir) -> Result<Assertions> {
    let suite: String = params.get_or("suite", "all".to_string())?;
    let master = master_seed(params)?;
    let mut failed = Vec::new();
    let all = suite == "all";
    let mut ran = false;
    if all || suite == "lemma1" {
        failed.extend(verify_lemma1(out)?);
        ran = true;
    }
    if all || suite == "spectral" {
        failed.extend(verify_spectral(out, master)?);
        ran = true;
    }
    if all || suite == "gapmap" {
        failed.extend(verify_gapmap(out, master)?);
        ran = true;
    }
    if !ran {
        bail!("unknown suite {suite:?}; expected lemma1, spectral, gapmap or all");
    }
    Ok(failed)
}
