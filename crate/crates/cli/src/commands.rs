use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;

use nanopteron::dispersion::SymbolSet;
use nanopteron::io::{write_csv, Gate, ProfileFile, RunConfig, RunRecord};
use nanopteron::kdv::Soliton;
use nanopteron::lattice::{
    self, shape_error, shape_error_away_from_seam, stegoton_diagnostics, LatticeConfig, WaveProfile,
};
use nanopteron::nanopteron_solver::{solve_with, NanopteronConfig, NanopteronOperators};
use nanopteron::periodic_solver::{solve_periodic, PeriodicConfig};
use nanopteron::{LineGrid, Params, Symbols};

use crate::settings::{self, get, invalid, merge, CliError, CliResult};
use crate::Common;

#[derive(Args, Debug)]
pub struct NanopteronArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated ε values; one record per value.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    /// Half-length of the long-wave domain.
    #[arg(long = "L")]
    half_length: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// `new` or `original`.
    #[arg(long)]
    form: Option<String>,
    /// `quotient` or `band-zero`.
    #[arg(long)]
    inversion: Option<String>,
    #[arg(long)]
    anderson: Option<usize>,
    /// Fail instead of doubling n when the ripple is under-resolved.
    #[arg(long)]
    fixed_grid: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// `leading` or the path of a profile file written by `nanopteron`.
    #[arg(long, default_value = "leading")]
    init: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time; defaults to 20/c_ε.
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    snap_every: Option<usize>,
    /// `rk4` or `verlet`.
    #[arg(long)]
    integrator: Option<String>,
}

fn out_path(cfg: &RunConfig, name: &str) -> CliResult<Option<PathBuf>> {
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(Path::new(dir).join(name)))
        }
        None => Ok(None),
    }
}

/// Print the record and, with `--out-dir`, also write it to `name`.
fn emit(cfg: &RunConfig, rec: &RunRecord, name: &str) -> CliResult<()> {
    let text = rec.to_toml()?;
    say(&text)?;
    if let Some(p) = out_path(cfg, name)? {
        std::fs::write(p, text)?;
    }
    Ok(())
}

/// Print a line; a closed pipe ends output quietly.
pub fn say(text: &str) -> CliResult<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn dump_csv(cfg: &RunConfig, name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> CliResult<()> {
    if let Some(p) = out_path(cfg, name)? {
        write_csv(BufWriter::new(File::create(p)?), header, rows)?;
    }
    Ok(())
}

fn tag(eps: f64) -> String {
    format!("{eps}").replace('.', "p")
}

pub fn dispersion(common: &Common, eps: Option<f64>, samples: Option<usize>) -> CliResult<u8> {
    let cfg = merge(common, RunConfig { eps, samples, ..Default::default() })?;
    let params = settings::params(&cfg)?;
    let eps = get(cfg.eps, "eps")?;
    let n = get(cfg.samples, "samples")?;
    if n < 2 {
        return Err(invalid(format!("samples must be >= 2, got {n}")));
    }
    let sym = Symbols::new(params)?;
    let c_sq = sym.c_kappa_sq() + eps * eps;
    let pi = std::f64::consts::PI;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let k = -pi + 2.0 * pi * i as f64 / (n - 1) as f64;
            let (lm, lp) = sym.lambda_pm(k);
            let (vm, vp) = sym.eigvec_v_pm(k);
            vec![k, lm, lp, vm, vp, sym.varpi_c(c_sq, k)]
        })
        .collect();
    let header = ["k", "lambda_minus", "lambda_plus", "v_minus", "v_plus", "varpi_eps"];
    match out_path(&cfg, "dispersion.csv")? {
        Some(p) => write_csv(BufWriter::new(File::create(p)?), &header, rows)?,
        None => {
            let mut buf = vec![];
            write_csv(&mut buf, &header, rows)?;
            say(String::from_utf8_lossy(&buf).trim_end())?;
        }
    }
    Ok(0)
}

pub fn periodic(
    common: &Common,
    eps: Option<f64>,
    a: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    modes: Option<usize>,
) -> CliResult<u8> {
    let flags = RunConfig { eps, a, tol, max_iter, modes, ..Default::default() };
    let cfg = merge(common, flags)?;
    let params = settings::params(&cfg)?;
    let eps = get(cfg.eps, "eps")?;
    let a = get(cfg.a, "a")?;
    let pcfg = PeriodicConfig {
        modes: get(cfg.modes, "modes")?,
        tol: get(cfg.tol, "tol")?.min(1e-12),
        max_iter: get(cfg.max_iter, "max_iter")?,
        anderson: cfg.anderson,
        q_scaling: settings::q_scaling(&cfg)?,
        ..PeriodicConfig::default()
    };
    let sym = Symbols::new(params)?;
    let mut rec = RunRecord::new("periodic", &cfg);
    let start = Instant::now();
    let wave = match solve_periodic(&sym, eps, a, &pcfg) {
        Ok(w) => w,
        Err(e) => {
            let code = settings::solver_exit_code(&e);
            rec.result("converged", false).result("error", e.to_string());
            emit(&cfg, &rec, "periodic.toml")?;
            return if code == 1 { Ok(1) } else { Err(e.into()) };
        }
    };
    rec.timing("solve_seconds", start.elapsed().as_secs_f64());
    rec.result("converged", true)
        .result("iterations", wave.log.iterations() as i64)
        .result("residual", wave.residual)
        .result("omega_eps", wave.resonance.omega_eps)
        .result("omega", wave.omega)
        .result("t", wave.t)
        .result("upsilon", wave.resonance.upsilon)
        .result("contraction_ratio", wave.contraction_ratio())
        .result("modes", wave.modes() as i64);
    let prof = wave.profile();
    let rows = (0..prof[0].modes() + 1)
        .map(|j| vec![j as f64, prof[0].coeffs()[j], prof[1].coeffs()[j]])
        .collect();
    dump_csv(&cfg, "periodic_coeffs.csv", &["j", "phi1", "phi2"], rows)?;
    emit(&cfg, &rec, "periodic.toml")?;
    Ok(0)
}

struct SweepOutcome {
    eps: f64,
    record: RunRecord,
    code: u8,
    files: Vec<(String, Vec<u8>)>,
}

fn nanopteron_one(params: &Params, cfg: &RunConfig, ncfg: &NanopteronConfig<f64>, eps: f64) -> SweepOutcome {
    let mut run_cfg = cfg.clone();
    run_cfg.eps = Some(eps);
    run_cfg.sweep = None;
    let mut rec = RunRecord::new("nanopteron", &run_cfg);
    let fail = |mut rec: RunRecord, e: nanopteron::Error| {
        rec.result("converged", false).result("error", e.to_string());
        SweepOutcome { eps, record: rec, code: settings::solver_exit_code(&e), files: vec![] }
    };
    let sym = match SymbolSet::new(params.clone()) {
        Ok(s) => s,
        Err(e) => return fail(rec, e),
    };
    let start = Instant::now();
    let op = match NanopteronOperators::new(sym, eps, ncfg) {
        Ok(o) => o,
        Err(e) => return fail(rec, e),
    };
    let sol = match solve_with(&op, ncfg) {
        Ok(s) => s,
        Err(e) => return fail(rec, e),
    };
    rec.timing("solve_seconds", start.elapsed().as_secs_f64());
    let d = &sol.diagnostics;
    rec.result("converged", true)
        .result("a", sol.state.a)
        .result("eta_max", d.eta_max)
        .result("eta_l2", d.eta_l2)
        .result("eta_weighted", d.eta_weighted)
        .result("eta_over_eps", d.eta_max / eps)
        .result("q", d.q)
        .result("residual", d.residual.relative)
        .result("residual_periodic", d.residual.periodic)
        .result("solvability_defect", d.solvability)
        .result("upsilon", d.upsilon)
        .result("iterations", d.log.iterations() as i64)
        .result("contraction_ratio", d.log.contraction_ratio(1e-9))
        .result("periodic_solves", d.periodic_solves as i64)
        .result("omega_eps", op.resonance().omega_eps)
        .result("omega", sol.wave.omega)
        .result("n", d.n as i64);
    let grid = op.grid();
    let sigma = op.sigma();
    let rows: Vec<Vec<f64>> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(m, &x)| vec![x, sigma.values()[m], sol.state.eta[0].values()[m], sol.state.eta[1].values()[m]])
        .collect();
    let mut csv = vec![];
    let mut files = vec![];
    if write_csv(&mut csv, &["X", "sigma", "eta1", "eta2"], rows).is_ok() {
        files.push((format!("nanopteron_{}.csv", tag(eps)), csv));
    }
    if let Ok(text) = ProfileFile::from_profile(&WaveProfile::from_solution(&op, &sol)).to_toml() {
        files.push((format!("profile_{}.toml", tag(eps)), text.into_bytes()));
    }
    SweepOutcome { eps, record: rec, code: 0, files }
}

pub fn nanopteron(args: &NanopteronArgs) -> CliResult<u8> {
    let flags = RunConfig {
        eps: args.eps,
        sweep: args.sweep.clone(),
        half_length: args.half_length,
        n: args.n,
        tol: args.tol,
        max_iter: args.max_iter,
        form: args.form.clone(),
        inversion: args.inversion.clone(),
        anderson: args.anderson,
        threads: args.threads,
        auto_grid: if args.fixed_grid { Some(false) } else { None },
        ..Default::default()
    };
    let cfg = merge(&args.common, flags)?;
    let params = settings::params(&cfg)?;
    let ncfg = NanopteronConfig {
        half_length: get(cfg.half_length, "half_length")?,
        n: get(cfg.n, "n")?,
        auto_grid: get(cfg.auto_grid, "auto_grid")?,
        tol: get(cfg.tol, "tol")?,
        max_iter: get(cfg.max_iter, "max_iter")?,
        form: settings::form(&cfg)?,
        inversion: settings::inversion(&cfg)?,
        anderson: cfg.anderson,
        q_scaling: settings::q_scaling(&cfg)?,
        ..NanopteronConfig::default()
    };
    let eps_list = match &cfg.sweep {
        Some(v) if !v.is_empty() => v.clone(),
        _ => vec![get(cfg.eps, "eps")?],
    };
    let threads = get(cfg.threads, "threads")?.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let outcomes: Vec<SweepOutcome> =
        pool.install(|| eps_list.par_iter().map(|&e| nanopteron_one(&params, &cfg, &ncfg, e)).collect());
    let mut code = 0u8;
    for (i, o) in outcomes.iter().enumerate() {
        if eps_list.len() > 1 {
            say(&format!("# run {} of {}: eps = {}", i + 1, eps_list.len(), o.eps))?;
        }
        emit(&cfg, &o.record, &format!("nanopteron_{}.toml", tag(o.eps)))?;
        for (name, bytes) in &o.files {
            if let Some(p) = out_path(&cfg, name)? {
                std::fs::write(p, bytes)?;
            }
        }
        code = code.max(o.code);
    }
    if code == 2 {
        return Err(invalid("invalid configuration (see records)".into()));
    }
    Ok(code)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<u8> {
    let flags = RunConfig {
        eps: args.eps,
        sites: args.sites,
        dt: args.dt,
        t_final: args.t_final,
        snap_every: args.snap_every,
        integrator: args.integrator.clone(),
        ..Default::default()
    };
    let cfg = merge(&args.common, flags)?;
    let params = settings::params(&cfg)?;
    let profile = if args.init == "leading" {
        let grid = LineGrid::new(get(cfg.half_length, "half_length")?, get(cfg.n, "n")?)?;
        WaveProfile::leading(&params, get(cfg.eps, "eps")?, &grid)
    } else {
        let text = std::fs::read_to_string(&args.init).map_err(|e| CliError::Io(format!("{}: {e}", args.init)))?;
        ProfileFile::from_toml(&text)?.to_profile()?
    };
    let sites = get(cfg.sites, "sites")?;
    let t_final = cfg.t_final.unwrap_or(20.0 / profile.speed);
    let lcfg = LatticeConfig {
        snap_every: get(cfg.snap_every, "snap_every")?,
        integrator: settings::integrator(&cfg)?,
        ..LatticeConfig::new(sites, get(cfg.dt, "dt")?, t_final)
    };
    lcfg.validate(&params)?;
    let (init, mean) = profile.initial_state(sites);
    let start = Instant::now();
    let traj = lattice::simulate(&params, init, &lcfg)?;
    let mut rec = RunRecord::new("simulate", &cfg);
    rec.timing("simulate_seconds", start.elapsed().as_secs_f64());
    let last = traj.last();
    let st = stegoton_diagnostics(&traj, profile.core_width);
    let ratio_dev = st.iter().map(|s| (s.ratio / params.kappa() - 1.0).abs()).fold(0.0, f64::max);
    rec.result("init", args.init.clone())
        .result("eps", profile.eps)
        .result("speed", profile.speed)
        .result("t_final", last.t)
        .result("snapshots", traj.snapshots.len() as i64)
        .result("energy_drift", traj.energy_drift())
        .result("shape_error", shape_error(last, &profile))
        .result("shape_error_away_from_seam", shape_error_away_from_seam(last, &profile, params.sound_speed(), 10.0))
        .result("peak_ratio_final", st.last().map(|s| s.ratio).unwrap_or(f64::NAN))
        .result("peak_ratio_max_deviation", ratio_dev)
        .result("ripple_tail", st.last().map(|s| s.tail).unwrap_or(f64::NAN))
        .result("removed_mean_rdot", mean);
    let mut rows = vec![];
    for s in &traj.snapshots {
        for (i, &r) in s.state.r.iter().enumerate() {
            rows.push(vec![s.t, lcfg.site(i) as f64, r]);
        }
    }
    dump_csv(&cfg, "trajectory.csv", &["t", "j", "r"], rows)?;
    let srows = st.iter().map(|s| vec![s.t, s.even_peak, s.odd_peak, s.ratio, s.center, s.tail]).collect();
    dump_csv(&cfg, "stegoton.csv", &["t", "even_peak", "odd_peak", "ratio", "center", "tail"], srows)?;
    emit(&cfg, &rec, "simulate.toml")?;
    Ok(0)
}

pub fn validate(common: &Common) -> CliResult<u8> {
    let cfg = merge(common, RunConfig::default())?;
    let params = settings::params(&cfg)?;
    let sym = Symbols::new(params.clone())?;
    let kappa = params.kappa();
    let mut rec = RunRecord::new("validate", &cfg);
    let start = Instant::now();
    let pi = std::f64::consts::PI;
    let ks: Vec<f64> = (0..10_000).map(|i| -pi + 2.0 * pi * (i as f64 + 0.5) / 10_000.0).collect();

    let mut trace: f64 = 0.0;
    let mut det: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    let c_sq = sym.c_kappa_sq();
    for &k in &ks {
        let (lm, lp) = sym.lambda_pm(k);
        trace = trace.max((lm + lp - 2.0 - 2.0 * kappa).abs());
        det = det.max((lm * lp - 4.0 * kappa * k.sin().powi(2)).abs());
        let (dm, dp) = sym.lambda_prime(k);
        let bound = (2.0f64).min(2.0 * c_sq * k.abs()) + 1e-6;
        deriv = deriv.max(dm.abs().max(dp.abs()) / bound);
    }
    rec.gate(Gate::at_most("dispersion trace identity", trace, 1e-12));
    rec.gate(Gate::at_most("dispersion determinant identity", det, 1e-12));
    rec.gate(
        Gate::at_most("derivative bound |λ'| <= min(2, 2c²|k|)", deriv, 1.0)
            .with_note("c² in place of c; see README"),
    );

    let mut res: f64 = 0.0;
    let mut inside = true;
    for eps in [0.3, 0.1, 0.03] {
        let r = sym.find_resonance(eps)?;
        res = res.max(sym.xi(r.c_sq, r.omega_c).abs());
        let c = r.c();
        inside &= r.omega_c >= (2.0 * kappa).sqrt() / c && r.omega_c <= (2.0 + 2.0 * kappa).sqrt() / c;
    }
    rec.gate(Gate::at_most("resonance residual", res, 1e-12));
    rec.gate(Gate::at_least("resonance inside bracket", if inside { 1.0 } else { 0.0 }, 1.0));

    let grid = LineGrid::new(40.0, 2048)?;
    let sol = Soliton::new(&params);
    let kdv = sol.kdv_residual(&sol.sigma_field(&grid)).max_abs();
    rec.gate(Gate::at_most("KdV residual of sigma", kdv, 1e-10));

    let ncfg = NanopteronConfig { half_length: 40.0, n: 4096, ..NanopteronConfig::default() };
    match NanopteronOperators::new(sym.clone(), 0.2, &ncfg) {
        Ok(op) => {
            let sp = op.soliton().sigma_prime_field(op.grid());
            rec.gate(Gate::at_most("Friesecke-Pego kernel", op.apply_a(&sp).max_abs() / sp.max_abs(), 1e-6));
            match solve_with(&op, &ncfg) {
                Ok(s) => {
                    rec.gate(Gate::at_most("nanopteron residual eps=0.2", s.diagnostics.residual.relative, 1e-6));
                }
                Err(e) => {
                    rec.gate(Gate::at_most("nanopteron residual eps=0.2", f64::INFINITY, 1e-6).with_note(e.to_string()));
                }
            }
        }
        Err(e) => {
            rec.gate(Gate::at_most("Friesecke-Pego kernel", f64::INFINITY, 1e-6).with_note(e.to_string()));
        }
    }

    match solve_periodic(&sym, 0.1, 1e-3, &PeriodicConfig::default()) {
        Ok(w) => {
            rec.gate(Gate::at_most("periodic residual eps=0.1 a=1e-3", w.residual, 1e-10));
            rec.gate(Gate::at_most("periodic iterations", w.log.iterations() as f64, 50.0));
            rec.gate(Gate::at_most("periodic contraction ratio", w.contraction_ratio(), 0.9));
        }
        Err(e) => {
            rec.gate(Gate::at_most("periodic residual eps=0.1 a=1e-3", f64::INFINITY, 1e-10).with_note(e.to_string()));
        }
    }

    let prof = WaveProfile::leading(&params, 0.2, &grid);
    let (init, _) = prof.initial_state(256);
    let lcfg = LatticeConfig::new(256, 1e-3, 0.1);
    let traj = lattice::simulate(&params, init, &lcfg)?;
    rec.gate(Gate::at_most("lattice energy drift (100 steps)", traj.energy_drift(), 1e-8));

    rec.timing("validate_seconds", start.elapsed().as_secs_f64());
    for g in &rec.gates {
        say(&g.line())?;
    }
    emit(&cfg, &rec, "validate.toml")?;
    Ok(if rec.all_passed() { 0 } else { 1 })
}
