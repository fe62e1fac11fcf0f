//! The `bergspec` command line: one experiment per invocation, JSON report on
//! stdout, optional CSV plot data under `--out`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    DifferenceMode, ExperimentConfig, MapConfig, OperatorName, ResolventMode, SpectrumTarget,
};
use crate::difference::{
    calibrate_gamma0, compactness_params, default_gamma, difference_functional,
    eventual_compactness_test, eventual_norm_continuity_test, ContinuityParams, ContinuityReport,
    DifferenceParams,
};
use crate::error::{Error, Result};
use crate::resolvent::{
    apply_j, apply_l_h, apply_m_z, apply_p_h, apply_q_h, apply_r_h, apply_resolvent,
    bloch_little_o_test, boundary_agrees_with_bloch, circle_grid, generator_boundary_test,
    log_h_over_z, r_h_spectrum, BlochVerdict,
};
use crate::semigroup::{
    maximal_opening, KoenigsFunction, OpeningParams, PhiPath, SemigroupSpec, SpiralGeometry,
};
use crate::series::AnalyticSeries;
use crate::spectral::{
    cphi_spectrum, generator_spectrum, point_spectrum, ContinuityEvidence, SpectrumReport,
};
use crate::trend::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// Tolerance of the little-Bloch profile when `--tol` is absent.
const BLOCH_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "bergspec",
    version,
    about = "Spectra of composition semigroups on weighted Bergman spaces",
    after_help = "Exit codes: 0 ok, 1 numeric error, 2 inconclusive verdict, 3 precondition refusal or invalid input.\n\
Without --config every command runs on defaults: standard weight with alpha = 0 and p = 2.\n\
Commands that need a semigroup refuse (exit 3) when none is configured."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// experiment config (JSON, see schemas/config.schema.json)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// directory for <command>.json and CSV files
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// write plot-ready CSV files into --out
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
    /// Taylor truncation for series-valued Koenigs functions [default: 256]
    #[arg(long, global = true, value_name = "N")]
    pub truncation: Option<usize>,
    /// tolerance override: difference quadrature (default 1e-9) and Bloch profile (default 1e-8)
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// doubling diagnostics of the weight, ω̂ and ω* profiles
    #[command(
        after_help = "Config keys: weights.levels [24], weights.profile_points [96].\n\
CSV weights_profile.csv: r, omega_hat, omega_star on r = 1 - 2^(-j/4)."
    )]
    Weights,
    /// spectrum of the generator, of C_phi_t, or the point spectrum
    #[command(
        after_help = "Config keys: spectrum.target generator|cphi|point [generator], spectrum.t [1],\n\
spectrum.k_max [64], spectrum.continuity {status: passed_at, t0}|{status: failed}|{status: inconclusive} [none],\n\
spectrum.auto_continuity [false], spectrum.opening [estimated], spectrum.theta0 [0], spectrum.section_dim [24],\n\
spectrum.radius {n_max [6], j_min [2], j_max [14], angles [64], zero_threshold [1e-3]}.\n\
The generator target with p != 2 needs continuity evidence and refuses without it.\n\
CSV radius_profile.csv: r, ratio, n; continuity_curves.csv when auto_continuity runs."
    )]
    Spectrum,
    /// difference functional, eventual norm continuity, eventual compactness
    #[command(
        after_help = "Config keys: difference.mode functional|continuity|compactness [functional],\n\
difference.phi, difference.psi {kind: linear, c}|{kind: series, series}|{kind: semigroup, t},\n\
difference.gamma [2 max(gamma0, 1/2)], difference.t0 [[1]], difference.t_list [[1]],\n\
difference.a_levels [12], difference.a_angles [32].\n\
CSV continuity_curves.csv: t0, t, sign, j, s, value; compactness_profile.csv: t, r, ratio."
    )]
    Difference,
    /// R_h and related operators, resolvent of the generator, Bloch tests
    #[command(
        after_help = "Config keys: resolvent.mode spectrum|apply|resolvent|bloch [spectrum],\n\
resolvent.h builtin name (z, log(1/(1-z)), log((1+z)/(1-z)), z/(1-z), koebe) or series [semigroup h, else z],\n\
resolvent.mu [[1, 0]], resolvent.operator R_h|P_h|Q_h|L_h|J|M_z [R_h], resolvent.f series,\n\
resolvent.lambda [[1, 0]], resolvent.k_max [32], resolvent.section_dim [32], resolvent.opening [estimated],\n\
resolvent.boundary_points [16], resolvent.boundary_levels [12].\n\
CSV bloch_profile.csv: r, value."
    )]
    Resolvent,
    /// trajectories and Koenigs residuals of the semigroup
    #[command(
        after_help = "Config keys: trajectory.z0 [[[0.5,0],[0,0.7],[-0.6,-0.3],[0.85,0.4]]], trajectory.t_max [5],\n\
trajectory.steps [50], trajectory.residual_times [[0.1, 0.7]], trajectory.residual_radius [0.9].\n\
CSV trajectory.csv: z0_re, z0_im, t, re, im."
    )]
    Semigroup,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Spectrum => "spectrum",
            Command::Difference => "difference",
            Command::Resolvent => "resolvent",
            Command::Semigroup => "semigroup",
        }
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub inconclusive: bool,
    /// `(file name, contents)`
    pub csv: Vec<(String, String)>,
}

/// Parses `args` (including the program name), runs the command and writes
/// the JSON envelope to `stdout`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_REFUSED
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let name = cli.command.name();
    match execute(&cli) {
        Ok(outcome) => {
            let code = if outcome.inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            let envelope = json!({
                "command": name,
                "status": if outcome.inconclusive { "inconclusive" } else { "ok" },
                "exit_code": code,
                "result": outcome.result,
            });
            match emit(&cli, name, &envelope, &outcome.csv, stdout) {
                Ok(()) => code,
                Err(e) => fail(name, &e, stdout, stderr),
            }
        }
        Err(e) => fail(name, &e, stdout, stderr),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Refused(_) | Error::Config(_) => EXIT_REFUSED,
        _ => EXIT_NUMERIC,
    }
}

fn fail(name: &str, e: &Error, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let code = exit_code(e);
    let status = if code == EXIT_REFUSED {
        "refused"
    } else {
        "error"
    };
    let envelope =
        json!({ "command": name, "status": status, "exit_code": code, "error": e.to_string() });
    let _ = writeln!(
        stdout,
        "{}",
        serde_json::to_string_pretty(&envelope).unwrap_or_default()
    );
    let _ = writeln!(stderr, "bergspec {name}: {e}");
    code
}

fn emit(
    cli: &Cli,
    name: &str,
    envelope: &Value,
    csv: &[(String, String)],
    stdout: &mut dyn Write,
) -> Result<()> {
    let text = serde_json::to_string_pretty(envelope)?;
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{name}.json")), format!("{text}\n"))?;
        if cli.emit_plot_data {
            for (file, body) in csv {
                std::fs::write(dir.join(file), body)?;
            }
        }
    }
    writeln!(stdout, "{text}")?;
    Ok(())
}

/// Loads the config, applies flag overrides and runs the command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    if cli.emit_plot_data && cli.out.is_none() {
        return Err(Error::Config("--emit-plot-data needs --out <dir>".into()));
    }
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.truncation.is_some() {
        cfg.truncation = cli.truncation;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    cfg.validate()?;
    match cli.command {
        Command::Weights => cmd_weights(&cfg),
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Difference => cmd_difference(&cfg),
        Command::Resolvent => cmd_resolvent(&cfg),
        Command::Semigroup => cmd_semigroup(&cfg),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn cmd_weights(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.weight()?;
    let report = w.doubling_diagnostics(cfg.weights.levels, 0.1)?;
    let in_d = report.in_d();
    let mut rows = Vec::new();
    for j in 1..=cfg.weights.profile_points {
        let r = 1.0 - 2f64.powf(-(j as f64) / 4.0);
        rows.push(vec![
            num(r),
            num(w.tail_integral(r)?),
            num(w.omega_star(r)?),
        ]);
    }
    let inconclusive =
        report.in_dhat == Verdict::Inconclusive || report.in_dcheck == Verdict::Inconclusive;
    let result = json!({
        "weight": w.spec(),
        "doubling": report,
        "in_D": in_d,
        "method": "dyadic ratios ω̂(r)/ω̂((1+r)/2) and ω̂(r)/ω̂(1-(1-r)/K) from cached adaptive Gauss-Kronrod tails",
        "tolerance": report.stabilization_rel,
    });
    Ok(Outcome {
        result,
        inconclusive,
        csv: vec![(
            "weights_profile.csv".into(),
            csv_table(&["r", "omega_hat", "omega_star"], rows)?,
        )],
    })
}

fn radius_csv(report: &SpectrumReport) -> Result<Option<(String, String)>> {
    let Some(er) = &report.essential_radius else {
        return Ok(None);
    };
    let rows = er.profiles.iter().flat_map(|p| {
        p.radii
            .iter()
            .zip(&p.ratios)
            .map(move |(r, q)| vec![num(*r), num(*q), p.n.to_string()])
    });
    Ok(Some((
        "radius_profile.csv".into(),
        csv_table(&["r", "ratio", "n"], rows)?,
    )))
}

fn continuity_csv(report: &ContinuityReport) -> Result<(String, String)> {
    let rows = report.curves.iter().flat_map(|c| {
        c.j.iter().zip(&c.s).zip(&c.values).map(move |((j, s), v)| {
            vec![
                num(c.t0),
                num(c.t),
                c.sign.to_string(),
                j.to_string(),
                num(*s),
                num(*v),
            ]
        })
    });
    Ok((
        "continuity_curves.csv".into(),
        csv_table(&["t0", "t", "sign", "j", "s", "value"], rows)?,
    ))
}

fn memberships_inconclusive(report: &SpectrumReport) -> bool {
    !report.undecided.is_empty()
}

fn continuity_params(cfg: &ExperimentConfig) -> ContinuityParams {
    ContinuityParams {
        difference: difference_params(cfg),
        ..Default::default()
    }
}

fn difference_params(cfg: &ExperimentConfig) -> DifferenceParams {
    DifferenceParams {
        a_levels: cfg.difference.a_levels,
        a_angles: cfg.difference.a_angles,
        rel_tol: cfg.tol.unwrap_or(DifferenceParams::default().rel_tol),
        ..DifferenceParams::default()
    }
}

/// Exact opening when configured, else estimated from `h(𝔻)`.
fn spiral_geometry(
    spec: &SemigroupSpec,
    opening: Option<f64>,
    theta0: f64,
) -> Result<SpiralGeometry> {
    match opening {
        Some(eta) => SpiralGeometry::exact(spec.mu(), eta, theta0),
        None if spec.is_automorphism_group() || spec.h_series().is_polynomial() => {
            SpiralGeometry::exact(spec.mu(), 0.0, theta0)
        }
        None => maximal_opening(spec, &OpeningParams::default()),
    }
}

pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.semigroup()?;
    let w = cfg.weight()?;
    let sec = &cfg.spectrum;
    let mut csv = Vec::new();
    let mut continuity_report = None;
    let report = match sec.target {
        SpectrumTarget::Point => {
            let geo = spiral_geometry(&spec, sec.opening, sec.theta0)?;
            point_spectrum(&spec, cfg.p, &w, &geo, sec.k_max)?
        }
        SpectrumTarget::Cphi => cphi_spectrum(
            &spec.phi_map(sec.t),
            spec.b(),
            cfg.p,
            &w,
            &sec.radius,
            sec.k_max,
            sec.section_dim,
        )?,
        SpectrumTarget::Generator => {
            let mut evidence = sec.continuity;
            if evidence.is_none()
                && sec.auto_continuity
                && cfg.p != 2.0
                && !spec.is_automorphism_group()
            {
                let r = eventual_norm_continuity_test(
                    &spec,
                    cfg.p,
                    &w,
                    &cfg.difference.t0,
                    cfg.difference.gamma,
                    &continuity_params(cfg),
                )?;
                evidence = Some(r.evidence);
                csv.push(continuity_csv(&r)?);
                continuity_report = Some(r);
            }
            let geo = match sec.opening {
                Some(eta) => Some(SpiralGeometry::exact(spec.mu(), eta, sec.theta0)?),
                None => None,
            };
            generator_spectrum(
                &spec,
                cfg.p,
                &w,
                sec.t,
                evidence.as_ref(),
                geo.as_ref(),
                &sec.radius,
                sec.k_max,
            )?
        }
    };
    if let Some(c) = radius_csv(&report)? {
        csv.push(c);
    }
    let inconclusive = memberships_inconclusive(&report);
    let mut result = to_value(&report)?;
    result["semigroup"] = to_value(&spec.to_json())?;
    result["p"] = json!(cfg.p);
    if let Some(r) = continuity_report {
        result["continuity"] = to_value(&r)?;
    }
    Ok(Outcome {
        result,
        inconclusive,
        csv,
    })
}

fn map_config<'a>(m: &'a Option<MapConfig>, which: &str) -> Result<&'a MapConfig> {
    m.as_ref()
        .ok_or_else(|| Error::Config(format!("difference.{which} is required in functional mode")))
}

pub fn cmd_difference(cfg: &ExperimentConfig) -> Result<Outcome> {
    let w = cfg.weight()?;
    let d = &cfg.difference;
    match d.mode {
        DifferenceMode::Functional => {
            let phi = cfg.map(map_config(&d.phi, "phi")?)?;
            let psi = cfg.map(map_config(&d.psi, "psi")?)?;
            let mut params = difference_params(cfg);
            let gamma0 = calibrate_gamma0(&w, params.calibration_levels)?.gamma0;
            params.gamma0 = Some(gamma0);
            let gamma = d.gamma.unwrap_or(default_gamma(gamma0));
            let est = difference_functional(&phi, &psi, cfg.p, &w, gamma, &params)?;
            Ok(Outcome {
                result: to_value(&est)?,
                inconclusive: false,
                csv: Vec::new(),
            })
        }
        DifferenceMode::Continuity => {
            let spec = cfg.semigroup()?;
            let r = eventual_norm_continuity_test(
                &spec,
                cfg.p,
                &w,
                &d.t0,
                d.gamma,
                &continuity_params(cfg),
            )?;
            let inconclusive = r.evidence == ContinuityEvidence::Inconclusive;
            let csv = vec![continuity_csv(&r)?];
            Ok(Outcome {
                result: to_value(&r)?,
                inconclusive,
                csv,
            })
        }
        DifferenceMode::Compactness => {
            let spec = cfg.semigroup()?;
            let params = compactness_params();
            let verdicts = eventual_compactness_test(&spec, &w, &d.t_list, &params)?;
            let inconclusive = verdicts.iter().any(|v| v.verdict == Verdict::Inconclusive);
            let rows = verdicts.iter().flat_map(|v| {
                v.profile
                    .radii
                    .iter()
                    .zip(&v.profile.ratios)
                    .map(move |(r, q)| vec![num(v.t), num(*r), num(*q)])
            });
            let csv = vec![(
                "compactness_profile.csv".into(),
                csv_table(&["t", "r", "ratio"], rows)?,
            )];
            let result = json!({
                "verdicts": verdicts,
                "method": "limsup of ω*(z)/ω*(φ_t(z)) along r = 1 - 2^-j, Aitken-extrapolated; Yes means compact",
                "radius_params": params,
                "tolerance": 1e-3,
            });
            Ok(Outcome {
                result,
                inconclusive,
                csv,
            })
        }
    }
}

fn series_arg(cfg: &ExperimentConfig) -> Result<AnalyticSeries> {
    match &cfg.resolvent.f {
        Some(f) => AnalyticSeries::from_json(f),
        None => Err(Error::Config("resolvent.f is required in this mode".into())),
    }
}

fn bloch_csv(radii: &[f64], profile: &[f64]) -> Result<(String, String)> {
    let rows = radii
        .iter()
        .zip(profile)
        .map(|(r, v)| vec![num(*r), num(*v)]);
    Ok((
        "bloch_profile.csv".into(),
        csv_table(&["r", "value"], rows)?,
    ))
}

pub fn cmd_resolvent(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rs = &cfg.resolvent;
    let tol = cfg.tol.unwrap_or(BLOCH_TOL);
    match rs.mode {
        ResolventMode::Spectrum => {
            let h = cfg.koenigs()?;
            let w = cfg.weight()?;
            let bloch = bloch_little_o_test(&log_h_over_z(&h)?, tol)?;
            let mu = Complex64::new(rs.mu[0], rs.mu[1]);
            let carrier = SemigroupSpec::new_unchecked(
                KoenigsFunction::from_series(h.clone()),
                Complex64::new(0.0, 0.0),
                -mu,
                None,
            );
            let geo = spiral_geometry(&carrier, rs.opening, 0.0)?;
            let report = r_h_spectrum(&h, cfg.p, &w, &geo, &bloch, rs.k_max, rs.section_dim)?;
            let inconclusive =
                bloch.verdict == BlochVerdict::Inconclusive || memberships_inconclusive(&report);
            let csv = vec![bloch_csv(&bloch.radii, &bloch.profile)?];
            let mut result = to_value(&report)?;
            result["bloch"] = to_value(&bloch)?;
            Ok(Outcome {
                result,
                inconclusive,
                csv,
            })
        }
        ResolventMode::Apply => {
            let f = series_arg(cfg)?;
            let needs_h = !matches!(rs.operator, OperatorName::J | OperatorName::MZ);
            let h = if needs_h { Some(cfg.koenigs()?) } else { None };
            let h = h.as_ref();
            let out = match rs.operator {
                OperatorName::RH => apply_r_h(h.unwrap(), &f)?,
                OperatorName::PH => apply_p_h(h.unwrap(), &f)?,
                OperatorName::QH => apply_q_h(h.unwrap(), &f)?,
                OperatorName::LH => apply_l_h(h.unwrap(), &f)?,
                OperatorName::J => apply_j(&f),
                OperatorName::MZ => apply_m_z(&f),
            };
            let result = json!({
                "operator": rs.operator,
                "series": out.to_json(),
                "method": "coefficient recurrences; only coefficients determined exactly by the inputs are kept",
                "tolerance": 0.0,
            });
            Ok(Outcome {
                result,
                inconclusive: false,
                csv: Vec::new(),
            })
        }
        ResolventMode::Resolvent => {
            let spec = cfg.semigroup()?;
            if spec.b().norm() > 1e-14 {
                return Err(Error::Refused(
                    "the resolvent formula needs the Denjoy-Wolff point at 0; conjugate the semigroup first".into(),
                ));
            }
            let f = series_arg(cfg)?;
            let lambda = Complex64::new(rs.lambda[0], rs.lambda[1]);
            let out = apply_resolvent(&spec, lambda, &f)?;
            let result = json!({
                "lambda": lambda,
                "series": out.to_json(),
                "method": "R(λ,Γ)f = (1/λ) h^(-c) ∫ f h^(c-1) h' with c = λ/μ, evaluated on coefficients",
                "tolerance": out.tail_bound(),
            });
            Ok(Outcome {
                result,
                inconclusive: false,
                csv: Vec::new(),
            })
        }
        ResolventMode::Bloch => {
            let h = cfg.koenigs()?;
            let bloch = bloch_little_o_test(&log_h_over_z(&h)?, tol)?;
            let mut inconclusive = bloch.verdict == BlochVerdict::Inconclusive;
            let csv = vec![bloch_csv(&bloch.radii, &bloch.profile)?];
            let mut result = json!({ "bloch": bloch });
            if cfg.semigroup.is_some() {
                let spec = cfg.semigroup()?;
                let boundary = generator_boundary_test(
                    &spec,
                    &circle_grid(rs.boundary_points),
                    rs.boundary_levels,
                )?;
                inconclusive |= boundary.divergent_everywhere == Verdict::Inconclusive;
                result["agrees"] = json!(boundary_agrees_with_bloch(&boundary, &bloch));
                result["boundary"] = to_value(&boundary)?;
            }
            Ok(Outcome {
                result,
                inconclusive,
                csv,
            })
        }
    }
}

pub fn cmd_semigroup(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.semigroup()?;
    let tr = &cfg.trajectory;
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    for z0 in &tr.z0 {
        let z = Complex64::new(z0[0], z0[1]);
        let mut pts = Vec::with_capacity(tr.steps + 1);
        for i in 0..=tr.steps {
            let t = tr.t_max * i as f64 / tr.steps as f64;
            let v = spec.evaluate_phi(t, z)?;
            rows.push(vec![num(z.re), num(z.im), num(t), num(v.re), num(v.im)]);
            pts.push(json!([t, v.re, v.im]));
        }
        trajectories.push(json!({ "z0": z0, "points": pts }));
    }
    let default = spec.law_residuals(&tr.residual_times, tr.residual_radius, PhiPath::Default)?;
    let newton = spec.law_residuals(&tr.residual_times, tr.residual_radius, PhiPath::Newton)?;
    let result = json!({
        "semigroup": spec.to_json(),
        "label": spec.label(),
        "b": spec.b(),
        "gprime_b": spec.gprime_b(),
        "fixed_point": spec.fixed_point_check(),
        "residuals": [default, newton],
        "trajectories": trajectories,
        "method": "φ_t from the closed form when known, else Newton continuation on h(φ_t(z)) = e^(G'(b)t) h(z); residuals are sup norms on |z| <= residual_radius",
        "tolerance": 1e-10,
    });
    Ok(Outcome {
        result,
        inconclusive: false,
        csv: vec![(
            "trajectory.csv".into(),
            csv_table(&["z0_re", "z0_im", "t", "re", "im"], rows)?,
        )],
    })
}
