//! One function per subcommand, each producing a single report.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use ucp_core::analytic::{bargmann, cauchy_riemann_residual, envelope_fit, hardy_classify};
use ucp_core::evolution::{dissipation_report, dissipation_rows, run, Equation};
use ucp_core::hermite::{hermite_basis, hermite_eigenvalue};
use ucp_core::localization::{
    annihilation_constant, annihilation_constant_power, faris_constant, local_uncertainty_check,
    thickness, BandSubspace,
};
use ucp_core::moments::{heisenberg_check, hermite_form, time_frequency_moments};
use ucp_core::prolate::{concentration_tails, landau_pollak_check, prolate_system};
use ucp_core::sequences::{
    random_orthonormal, rayleigh_ritz_compress, shapiro_sum, shapiro_table, OrthonormalSequence,
};
use ucp_core::sets::SetOnGrid;
use ucp_core::umbrella::{gaussian_envelope_bound, power_envelope_bound, umbrella_bound, Envelope};
use ucp_core::{io, poisson_residual, Grid, SampledFunction};

use crate::error::{CliError, FlagContext};
use crate::output::{Report, Table};
use crate::Command;

/// Hermite basis size used for random sequences and subspaces.
const RANDOM_SPAN: usize = 20;
const GRAM_LIMIT: f64 = 1e-8;
const RAYLEIGH_RITZ_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SequenceKind {
    Hermite,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Dense,
    Power,
}

pub fn parse_equation(s: &str) -> Result<Equation, String> {
    s.parse().map_err(|e: ucp_core::UcpError| e.to_string())
}

pub fn dispatch(cmd: &Command, grid: Grid, seed: u64) -> Result<Report, CliError> {
    match cmd {
        Command::Hermite { k, export } => hermite(grid, *k, export.as_deref()),
        Command::Moments { input } => moments(&load(input)?),
        Command::Heisenberg { input } => heisenberg(&load(input)?),
        Command::Shapiro { n, sequence } => shapiro(grid, *n, *sequence, seed),
        Command::RayleighRitz { dim } => rayleigh_ritz(grid, *dim, seed),
        Command::Prolate {
            t,
            omega,
            count,
            export,
        } => prolate(grid, *t, *omega, *count, export.as_deref()),
        Command::LandauPollak {
            t,
            omega,
            eps,
            input,
        } => landau_pollak(*t, *omega, *eps, &load(input)?),
        Command::Annihilate { s, sigma, method } => annihilate(grid, s, sigma, *method),
        Command::Thickness { e, a } => thick(grid, e, *a),
        Command::Local { alpha, e, input } => local(*alpha, e, &load(input)?),
        Command::FarisK { alpha, d } => faris(*alpha, *d),
        Command::Umbrella { envelope, psi } => umbrella(envelope, psi.as_deref()),
        Command::Bargmann { input, z } => bargmann_points(&load(input)?, z),
        Command::Hardy { input } => hardy(&load(input)?),
        Command::Evolve {
            equation,
            t,
            input,
            s,
            sigma,
            export,
        } => evolve(
            *equation,
            t,
            &load(input)?,
            s.as_deref(),
            sigma.as_deref(),
            export.as_deref(),
        ),
        Command::Poisson {
            input,
            x,
            xi,
            terms,
        } => poisson(&load(input)?, *x, *xi, *terms),
        Command::Sample { kind, save } => sample(grid, kind, save, seed),
    }
}

fn load(path: &Path) -> Result<SampledFunction, CliError> {
    io::load(path).map_err(|e| CliError::from_flag("input", e))
}

fn export_matrix(rows: &[SampledFunction], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::usage(format!("--export {}: {e}", path.display())))?;
    io::write_matrix(rows, BufWriter::new(file)).flag("export")
}

fn grid_value(g: &Grid) -> Value {
    json!({ "n": g.n(), "spacing": g.spacing(), "half_width": g.half_width() })
}

fn hermite(grid: Grid, k: usize, export: Option<&Path>) -> Result<Report, CliError> {
    let basis = hermite_basis(grid, k).flag("k")?;
    let gram = basis.gram_deviation();
    let eigen = basis.fourier_eigen_deviation()?;
    if let Some(p) = export {
        export_matrix(basis.functions(), p)?;
    }
    let mut table = Table::new(&["k", "eigenvalue", "norm"]);
    for (j, h) in basis.functions().iter().enumerate() {
        table.push(vec![j.into(), hermite_eigenvalue(j).into(), h.norm().into()]);
    }
    Ok(Report::new("hermite")
        .field("k", k)
        .field("grid", grid_value(&grid))
        .field("gram_deviation", gram)
        .field("fourier_eigen_deviation", eigen)
        .table(table)
        .fail_if(gram > GRAM_LIMIT || eigen > GRAM_LIMIT, || {
            format!("gram deviation {gram:e}, transform deviation {eigen:e} exceed {GRAM_LIMIT:e}")
        }))
}

fn moments(f: &SampledFunction) -> Result<Report, CliError> {
    let (time, freq) = time_frequency_moments(f).flag("input")?;
    Ok(Report::new("moments")
        .field("time", time)
        .field("frequency", freq)
        .field("hermite_form", hermite_form(f).flag("input")?))
}

fn heisenberg(f: &SampledFunction) -> Result<Report, CliError> {
    let r = heisenberg_check(f).flag("input")?;
    let pass = r.pass;
    Ok(Report::new("heisenberg")
        .field("ratio", r.ratio())
        .field("report", &r)
        .fail_if(!pass, || format!("lhs {} < rhs {}", r.lhs, r.rhs)))
}

fn shapiro(grid: Grid, n: usize, kind: SequenceKind, seed: u64) -> Result<Report, CliError> {
    let span = RANDOM_SPAN.max(2 * (n + 1));
    let basis = hermite_basis(grid, span).flag("n")?;
    let seq = match kind {
        SequenceKind::Hermite => OrthonormalSequence::hermite(&basis, n + 1).flag("n")?,
        SequenceKind::Random => random_orthonormal(&basis, n + 1, seed).flag("n")?,
    };
    let r = shapiro_sum(&seq, n).flag("n")?;
    let mut table = Table::new(&["n", "lhs", "rhs", "margin", "equality_flag"]);
    for (m, row) in shapiro_table(&seq)?.iter().enumerate() {
        table.push(vec![m.into(), row.lhs.into(), row.rhs.into(), row.margin.into(), row.extremal.into()]);
    }
    let pass = r.pass;
    Ok(Report::new("shapiro")
        .field("sequence", kind_name(kind))
        .field("n", n)
        .field("report", &r)
        .table(table)
        .fail_if(!pass, || format!("lhs {} < rhs {}", r.lhs, r.rhs)))
}

fn kind_name(kind: SequenceKind) -> &'static str {
    match kind {
        SequenceKind::Hermite => "hermite",
        SequenceKind::Random => "random",
    }
}

fn rayleigh_ritz(grid: Grid, dim: usize, seed: u64) -> Result<Report, CliError> {
    let basis = hermite_basis(grid, RANDOM_SPAN.max(dim + 10)).flag("dim")?;
    let v = random_orthonormal(&basis, dim, seed).flag("dim")?;
    let mu = rayleigh_ritz_compress(&v, &basis)?;
    let mut table = Table::new(&["k", "mu", "lower", "margin", "pass"]);
    let mut worst = f64::INFINITY;
    for (k, &m) in mu.iter().enumerate() {
        let lower = hermite_eigenvalue(k);
        worst = worst.min(m - lower);
        table.push(vec![
            k.into(),
            m.into(),
            lower.into(),
            (m - lower).into(),
            (m >= lower - RAYLEIGH_RITZ_SLACK).into(),
        ]);
    }
    Ok(Report::new("rayleigh-ritz")
        .field("dim", dim)
        .field("seed", seed)
        .field("worst_margin", worst)
        .table(table)
        .fail_if(worst < -RAYLEIGH_RITZ_SLACK, || format!("margin {worst:e}")))
}

fn prolate(grid: Grid, t: f64, omega: f64, count: usize, export: Option<&Path>) -> Result<Report, CliError> {
    let sys = prolate_system(grid, t, omega, count).flag("T")?;
    if let Some(p) = export {
        export_matrix(sys.functions(), p)?;
    }
    let mut table = Table::new(&["n", "lambda"]);
    for (n, l) in sys.eigenvalue_table() {
        table.push(vec![n.into(), l.into()]);
    }
    Ok(Report::new("prolate")
        .field("T", t)
        .field("Omega", omega)
        .field("four_t_omega", 4.0 * t * omega)
        .field("d", sys.d())
        .field("count_above_half", sys.count_above(0.5))
        .table(table))
}

fn landau_pollak(t: f64, omega: f64, eps: f64, f: &SampledFunction) -> Result<Report, CliError> {
    let d = (4.0 * t * omega).floor() as usize + 1;
    let sys = prolate_system(*f.grid(), t, omega, d).flag("T")?;
    let tails = concentration_tails(f, &sys).flag("input")?;
    let r = landau_pollak_check(f, &sys, eps).flag("eps")?;
    let pass = r.pass;
    Ok(Report::new("landau-pollak")
        .field("d", sys.d())
        .field("tails", tails)
        .field("smallest_epsilon", tails.smallest_epsilon())
        .field("report", &r)
        .fail_if(!pass, || format!("distance {} exceeds {}", r.lhs, r.rhs)))
}

fn annihilate(grid: Grid, s: &str, sigma: &str, method: Method) -> Result<Report, CliError> {
    let s_set = SetOnGrid::parse(grid, s).flag("S")?;
    let sigma_set = SetOnGrid::parse(grid.dual(), sigma).flag("Sigma")?;
    let r = match method {
        Method::Dense => annihilation_constant(&s_set, &sigma_set)?,
        Method::Power => annihilation_constant_power(&s_set, &sigma_set)?,
    };
    let verified = r.verified;
    Ok(Report::new("annihilate")
        .field("S", s)
        .field("Sigma", sigma)
        .field("report", &r)
        .fail_if(!verified, || {
            format!("sampled ratio {} below D = {}", r.worst_sampled_ratio, r.d)
        }))
}

fn thick(grid: Grid, e: &str, a: f64) -> Result<Report, CliError> {
    let set = SetOnGrid::parse(grid, e).flag("E")?;
    let gamma = thickness(&set, a).flag("a")?;
    Ok(Report::new("thickness").field("E", e).field("a", a).field("gamma", gamma))
}

fn local(alpha: f64, e: &str, f: &SampledFunction) -> Result<Report, CliError> {
    let set = SetOnGrid::parse(f.grid().dual(), e).flag("E")?;
    let r = local_uncertainty_check(f, &set, alpha).flag("alpha")?;
    let pass = r.pass;
    Ok(Report::new("local")
        .field("alpha", alpha)
        .field("E", e)
        .field("K", faris_constant(alpha, 1).flag("alpha")?)
        .field("report", &r)
        .fail_if(!pass, || format!("lhs {} > rhs {}", r.lhs, r.rhs)))
}

fn faris(alpha: f64, d: u32) -> Result<Report, CliError> {
    let k = faris_constant(alpha, d).flag("alpha")?;
    Ok(Report::new("faris-k").field("alpha", alpha).field("d", d).field("K", k))
}

fn parse_pair(flag: &str, body: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("--{flag}: expected two numbers \"x,y\", got \"{body}\""));
    let (a, b) = body.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_envelope(flag: &str, spec: &str) -> Result<Envelope, CliError> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("--{flag}: expected kind:params, got \"{spec}\"")))?;
    match kind {
        "gaussian" => {
            let (c, a) = parse_pair(flag, body)?;
            Envelope::gaussian(c, a).flag(flag)
        }
        "power" => {
            let (c, p) = parse_pair(flag, body)?;
            Envelope::power(c, p).flag(flag)
        }
        "file" => Envelope::tabulated(io::load(body).flag(flag)?).flag(flag),
        other => Err(CliError::usage(format!(
            "--{flag}: unknown envelope kind \"{other}\", expected gaussian, power or file"
        ))),
    }
}

fn umbrella(envelope: &str, psi: Option<&str>) -> Result<Report, CliError> {
    let phi = parse_envelope("envelope", envelope)?;
    let psi_env = match psi {
        Some(p) => parse_envelope("psi", p)?,
        None => phi.clone(),
    };
    let cert = umbrella_bound(&phi, &psi_env)?;
    let mut report = Report::new("umbrella")
        .field("envelope", envelope)
        .field("psi", psi.unwrap_or(envelope))
        .field("certificate", &cert);
    if phi == psi_env {
        match phi {
            Envelope::Gaussian { c, a } => {
                report = report.field("closed_form", gaussian_envelope_bound(c, a)?);
            }
            Envelope::Power { c, p } if p > 1.0 => {
                report = report.field("closed_form", power_envelope_bound(c, p)?);
            }
            _ => {}
        }
    }
    Ok(report)
}

fn parse_points(spec: &str) -> Result<Vec<Complex64>, CliError> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| parse_pair("z", p).map(|(re, im)| Complex64::new(re, im)))
        .collect()
}

fn bargmann_points(f: &SampledFunction, z: &str) -> Result<Report, CliError> {
    let zs = parse_points(z)?;
    if zs.is_empty() {
        return Err(CliError::usage("--z: no points given"));
    }
    let mut table = Table::new(&["re_z", "im_z", "re_f", "im_f", "cauchy_riemann"]);
    for &p in &zs {
        let v = bargmann(f, p).flag("z")?;
        let cr = cauchy_riemann_residual(f, p, 1e-4).flag("z")?;
        table.push(vec![p.re.into(), p.im.into(), v.re.into(), v.im.into(), cr.into()]);
    }
    Ok(Report::new("bargmann").field("points", zs.len()).table(table))
}

fn hardy(f: &SampledFunction) -> Result<Report, CliError> {
    let r = hardy_classify(f).flag("input")?;
    Ok(Report::new("hardy")
        .field("time_fit", envelope_fit(f).flag("input")?)
        .field("frequency_fit", envelope_fit(&f.fourier_transform()?).flag("input")?)
        .field("report", r))
}

fn parse_times(spec: &str) -> Result<Vec<f64>, CliError> {
    let times = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--t: \"{s}\" is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if times.is_empty() {
        return Err(CliError::usage("--t: no times given"));
    }
    Ok(times)
}

fn evolve(
    equation: Equation,
    t: &str,
    f: &SampledFunction,
    s: Option<&str>,
    sigma: Option<&str>,
    export: Option<&Path>,
) -> Result<Report, CliError> {
    let times = parse_times(t)?;
    let ev = run(f, &times, equation).flag("t")?;
    if let Some(p) = export {
        export_matrix(&ev.states, p)?;
    }
    let report = Report::new("evolve")
        .field("equation", equation)
        .field("initial_norm", f.norm());
    match (s, sigma) {
        (None, None) => {
            let mut table = Table::new(&["t", "norm"]);
            for (&t, &n) in ev.times.iter().zip(&ev.norms) {
                table.push(vec![t.into(), n.into()]);
            }
            Ok(report.table(table))
        }
        (Some(s), Some(sigma)) => {
            let g = f.grid();
            let s_set = SetOnGrid::parse(*g, s).flag("S")?;
            let sigma_set = SetOnGrid::parse(g.dual(), sigma).flag("Sigma")?;
            let reports = dissipation_report(&ev, &s_set, &sigma_set).flag("Sigma")?;
            let rows = dissipation_rows(&ev, &reports);
            let mut table = Table::new(&["t", "norm", "outside", "rhs", "pass"]);
            for r in &rows {
                table.push(vec![r.t.into(), r.norm.into(), r.outside.into(), r.rhs.into(), r.pass.into()]);
            }
            let failed: Vec<f64> = rows.iter().filter(|r| !r.pass).map(|r| r.t).collect();
            Ok(report
                .field("S", s)
                .field("Sigma", sigma)
                .table(table)
                .fail_if(!failed.is_empty(), || format!("dissipation bound fails at t = {failed:?}")))
        }
        (Some(_), None) => Err(CliError::usage("--Sigma: required together with --S")),
        (None, Some(_)) => Err(CliError::usage("--S: required together with --Sigma")),
    }
}

fn poisson(f: &SampledFunction, x: f64, xi: f64, terms: usize) -> Result<Report, CliError> {
    let r = poisson_residual(f, x, xi, terms).flag("x")?;
    Ok(Report::new("poisson")
        .field("x", x)
        .field("xi", xi)
        .field("terms", terms)
        .field("result", r))
}

fn sample(grid: Grid, kind: &str, save: &Path, seed: u64) -> Result<Report, CliError> {
    let (name, arg) = match kind.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (kind, None),
    };
    let number = |default: Option<f64>| -> Result<f64, CliError> {
        match arg {
            Some(a) => a
                .parse()
                .map_err(|_| CliError::usage(format!("--kind: \"{a}\" is not a number"))),
            None => default.ok_or_else(|| CliError::usage(format!("--kind: {name} needs a parameter"))),
        }
    };
    let f = match name {
        "gaussian" => {
            let a = number(Some(1.0))?;
            SampledFunction::from_real_fn(grid, |x| (-PI * a * x * x).exp())
        }
        "hermite" => {
            let k = number(None)? as usize;
            hermite_basis(grid, k).flag("kind")?.function(k).clone()
        }
        "band" => {
            let omega = number(Some(1.0))?;
            let sigma = SetOnGrid::symmetric(grid.dual(), omega).flag("kind")?;
            let sub = BandSubspace::new(&sigma).flag("kind")?;
            sub.random_element(&mut ChaCha8Rng::seed_from_u64(seed)).flag("kind")?
        }
        "zero" => SampledFunction::zeros(grid),
        other => {
            return Err(CliError::usage(format!(
                "--kind: unknown kind \"{other}\", expected gaussian, hermite, band or zero"
            )))
        }
    };
    let text = save.extension().is_some_and(|e| e == "json");
    if text {
        io::save_text(&f, save).flag("save")?;
    } else {
        io::save_binary(&f, save).flag("save")?;
    }
    Ok(Report::new("sample")
        .field("kind", kind)
        .field("path", save.display().to_string())
        .field("grid", grid_value(&grid))
        .field("norm", f.norm()))
}
